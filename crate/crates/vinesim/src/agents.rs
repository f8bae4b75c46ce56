//! Agent profiles: the timing constants and row-coverage strategy of each
//! operator type.

use serde::Deserialize;
use std::collections::BTreeMap;

use crate::field::Difficulty;

/// How an agent covers one vineyard row while scanning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanStrategy {
    /// One pass per row inspects both sides (a walking scout).
    SinglePassBothSides,
    /// One pass per row with cameras facing both sides at once.
    SinglePassDualCamera,
    /// Each row is traversed out and back, one side per pass, with a U-turn
    /// at the far headland before the return leg.
    DoublePass,
}

/// Timing constants and capabilities of one operator type.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentProfile {
    pub name: String,
    /// Seconds to service an easily reachable spot.
    pub time_easy: f64,
    /// Seconds to service a spot hidden in the canopy.
    pub time_difficult: f64,
    /// Travel speed in m/s, along rows and across headlands alike.
    pub speed: f64,
    /// Seconds charged per row-entry or U-turn event.
    pub row_transition_time: f64,
    pub scan_strategy: ScanStrategy,
    /// Whether the agent stores spot coordinates for the treatment phase.
    pub has_memory: bool,
}

impl AgentProfile {
    /// Service time for one spot of the given difficulty.
    pub fn service_time(&self, difficulty: Difficulty) -> f64 {
        match difficulty {
            Difficulty::Easy => self.time_easy,
            Difficulty::Difficult => self.time_difficult,
        }
    }
}

pub const HUMAN: &str = "human";
pub const IMMERSIVE: &str = "immersive";
pub const NON_IMMERSIVE: &str = "non_immersive";

/// The three built-in profiles, keyed by name.
///
/// | agent         | easy | difficult | speed | transition | strategy               |
/// |---------------|------|-----------|-------|------------|------------------------|
/// | human         | 5 s  | 5 s       | 1.25  | 5 s        | single pass, both sides|
/// | immersive     | 24 s | 50 s      | 1.25  | 10 s       | double pass            |
/// | non_immersive | 24 s | 50 s      | 1.25  | 10 s       | single pass, dual cam  |
pub fn builtin_profiles() -> BTreeMap<String, AgentProfile> {
    let mut map = BTreeMap::new();
    map.insert(
        HUMAN.to_string(),
        AgentProfile {
            name: HUMAN.to_string(),
            time_easy: 5.0,
            time_difficult: 5.0,
            speed: 1.25,
            row_transition_time: 5.0,
            scan_strategy: ScanStrategy::SinglePassBothSides,
            has_memory: false,
        },
    );
    map.insert(
        IMMERSIVE.to_string(),
        AgentProfile {
            name: IMMERSIVE.to_string(),
            time_easy: 24.0,
            time_difficult: 50.0,
            speed: 1.25,
            row_transition_time: 10.0,
            scan_strategy: ScanStrategy::DoublePass,
            has_memory: true,
        },
    );
    map.insert(
        NON_IMMERSIVE.to_string(),
        AgentProfile {
            name: NON_IMMERSIVE.to_string(),
            time_easy: 24.0,
            time_difficult: 50.0,
            speed: 1.25,
            row_transition_time: 10.0,
            scan_strategy: ScanStrategy::SinglePassDualCamera,
            has_memory: true,
        },
    );
    map
}
