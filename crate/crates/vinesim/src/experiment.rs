//! Monte Carlo harness: runs seeded trial batches across agents and spot
//! counts, aggregates per-phase statistics, and compares against a baseline
//! agent.
//!
//! Reproducibility contract: the seed of each trial depends only on
//! `(master_seed, spot_count, trial_index)`, every agent within one trial
//! sees the identical spot set, and aggregation folds per-trial values in
//! trial-index order. Results are therefore independent of thread scheduling.

use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::agents::AgentProfile;
use crate::error::{Error, Result};
use crate::field::{generate_spots, FieldGeometry};
use crate::phase::{simulate_scan, simulate_treatment_full_rescan, simulate_treatment_targeted};
use crate::routing::PlannerKind;

/// One experiment setup: field, scenario sizes, trial count, and agents.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub field: FieldGeometry,
    pub spot_counts: Vec<usize>,
    pub trials: usize,
    pub p_difficult: f64,
    pub master_seed: u64,
    /// Agent profile names, in report order.
    pub agents: Vec<String>,
    /// Agent whose means anchor the percent differences.
    pub baseline: String,
    pub planner: PlannerKind,
}

/// Simulated phase of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Detection,
    Treatment,
    Survey,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Detection => "detection",
            Phase::Treatment => "treatment",
            Phase::Survey => "survey",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detection" => Ok(Phase::Detection),
            "treatment" => Ok(Phase::Treatment),
            "survey" => Ok(Phase::Survey),
            other => Err(Error::Config(format!("unknown phase '{other}'"))),
        }
    }
}

/// Aggregate of `total_time` over the trials of one (agent, scenario, phase).
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub agent: String,
    pub scenario_spots: usize,
    pub phase: Phase,
    pub mean_s: f64,
    pub std_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    /// Signed percent vs the baseline agent's mean; absent when the baseline
    /// is missing or its mean is not positive.
    pub pct_diff_vs_baseline: Option<f64>,
}

/// All aggregates of one experiment, in (spot_count, agent, phase) order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentStats {
    pub rows: Vec<StatRow>,
}

impl ExperimentStats {
    pub fn get(&self, agent: &str, spots: usize, phase: Phase) -> Option<&StatRow> {
        self.rows
            .iter()
            .find(|r| r.agent == agent && r.scenario_spots == spots && r.phase == phase)
    }

    pub fn spot_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !counts.contains(&r.scenario_spots) {
                counts.push(r.scenario_spots);
            }
        }
        counts
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based derivation of a per-trial seed: splitmix64 applied to the
/// master seed, xor-folded with the spot count, mixed again, xor-folded with
/// the trial index, and mixed once more. Depends only on the three inputs.
pub fn derive_trial_seed(master_seed: u64, spot_count: usize, trial_index: usize) -> u64 {
    let mut state = master_seed;
    let mixed = splitmix64(&mut state);
    let mut state = mixed ^ (spot_count as u64);
    let mixed = splitmix64(&mut state);
    let mut state = mixed ^ (trial_index as u64);
    splitmix64(&mut state)
}

/// Signed percent difference of `agent_mean` against `baseline_mean`.
pub fn percent_difference(agent_mean: f64, baseline_mean: f64) -> Result<f64> {
    if baseline_mean.is_nan() || baseline_mean <= 0.0 {
        return Err(Error::NonPositiveBaseline(baseline_mean));
    }
    Ok((agent_mean - baseline_mean) / baseline_mean * 100.0)
}

/// Hours-and-minutes display, rounded to the nearest minute.
pub fn format_hours_minutes(seconds: f64) -> String {
    let minutes = (seconds / 60.0).round() as i64;
    format!("{:02} hrs {:02} mins", minutes / 60, minutes % 60)
}

fn aggregate(totals: &[f64]) -> (f64, f64, f64, f64) {
    let n = totals.len() as f64;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &t in totals {
        sum += t;
        min = min.min(t);
        max = max.max(t);
    }
    let mean = sum / n;
    // A constant sample has zero spread by definition; skipping the sum of
    // squares there keeps rounding noise out of the reported std.
    let std = if min == max {
        0.0
    } else {
        let mut sq = 0.0;
        for &t in totals {
            sq += (t - mean) * (t - mean);
        }
        (sq / n).sqrt()
    };
    (mean, std, min, max)
}

/// Runs the full experiment: for every spot count, `trials` seeded trials,
/// each sharing one spot set across all agents (paired comparison). Phase 1
/// is the scan; phase 2 is targeted treatment for memory agents and a full
/// rescan otherwise. Trials run in parallel; aggregation order is fixed.
pub fn run_experiment(
    config: &ScenarioConfig,
    profiles: &BTreeMap<String, AgentProfile>,
) -> Result<ExperimentStats> {
    if config.trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    if config.spot_counts.is_empty() {
        return Err(Error::Config("spot_counts must be non-empty".into()));
    }
    if !(0.0..=1.0).contains(&config.p_difficult) {
        return Err(Error::Config(format!(
            "p_difficult must be in [0, 1] (got {})",
            config.p_difficult
        )));
    }
    let agent_profiles: Vec<&AgentProfile> = config
        .agents
        .iter()
        .map(|n| {
            profiles
                .get(n)
                .ok_or_else(|| Error::UnknownAgent(n.clone()))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for &count in &config.spot_counts {
        // (detection, treatment) totals per agent, per trial; collect keeps
        // trial-index order regardless of scheduling.
        let trial_totals: Vec<Vec<(f64, f64)>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| -> Result<Vec<(f64, f64)>> {
                let seed = derive_trial_seed(config.master_seed, count, trial);
                let spots = generate_spots(&config.field, count, config.p_difficult, seed);
                agent_profiles
                    .iter()
                    .map(|profile| {
                        let scan = simulate_scan(&config.field, profile, &spots);
                        let treatment = if profile.has_memory {
                            simulate_treatment_targeted(
                                &config.field,
                                profile,
                                &scan.visited_spots,
                                config.planner,
                            )?
                        } else {
                            simulate_treatment_full_rescan(&config.field, profile, &spots)?
                        };
                        Ok((scan.total_time, treatment.total_time))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;

        for (agent_idx, name) in config.agents.iter().enumerate() {
            for phase in [Phase::Detection, Phase::Treatment] {
                let totals: Vec<f64> = trial_totals
                    .iter()
                    .map(|t| match phase {
                        Phase::Detection => t[agent_idx].0,
                        _ => t[agent_idx].1,
                    })
                    .collect();
                let (mean, std, min, max) = aggregate(&totals);
                rows.push(StatRow {
                    agent: name.clone(),
                    scenario_spots: count,
                    phase,
                    mean_s: mean,
                    std_s: std,
                    min_s: min,
                    max_s: max,
                    pct_diff_vs_baseline: None,
                });
            }
        }
    }

    let mut stats = ExperimentStats { rows };
    fill_percent_differences(&mut stats, &config.baseline);
    Ok(stats)
}

/// Fills `pct_diff_vs_baseline` on every row from the baseline agent's mean
/// for the same (scenario, phase); leaves `None` where undefined.
pub fn fill_percent_differences(stats: &mut ExperimentStats, baseline: &str) {
    let baseline_means: Vec<(usize, Phase, f64)> = stats
        .rows
        .iter()
        .filter(|r| r.agent == baseline)
        .map(|r| (r.scenario_spots, r.phase, r.mean_s))
        .collect();
    for row in &mut stats.rows {
        let anchor = baseline_means
            .iter()
            .find(|(s, p, _)| *s == row.scenario_spots && *p == row.phase);
        row.pct_diff_vs_baseline = match anchor {
            Some(&(_, _, mean)) => percent_difference(row.mean_s, mean).ok(),
            None => None,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{builtin_profiles, HUMAN, IMMERSIVE, NON_IMMERSIVE};
    use crate::field::FieldPreset;
    use approx::assert_relative_eq;

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            field: FieldPreset::Rows52x227.geometry(),
            spot_counts: vec![20, 30, 40],
            trials: 20,
            p_difficult: 0.5,
            master_seed: 42,
            agents: vec![HUMAN.into(), IMMERSIVE.into(), NON_IMMERSIVE.into()],
            baseline: HUMAN.into(),
            planner: PlannerKind::NnTwoOpt,
        }
    }

    #[test]
    fn run_is_deterministic() {
        let config = ScenarioConfig {
            trials: 1,
            ..base_config()
        };
        let profiles = builtin_profiles();
        let a = run_experiment(&config, &profiles).unwrap();
        let b = run_experiment(&config, &profiles).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_matches_single_threaded() {
        let config = base_config();
        let profiles = builtin_profiles();
        let parallel = run_experiment(&config, &profiles).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let sequential = pool.install(|| run_experiment(&config, &profiles).unwrap());
        assert_eq!(parallel, sequential);
    }

    #[test]
    fn human_detection_mean_steps_by_fifty_seconds() {
        // The human scan is deterministic apart from the spot count, so each
        // +10 spots adds exactly 10 * 5 s to the mean.
        let config = base_config();
        let profiles = builtin_profiles();
        let stats = run_experiment(&config, &profiles).unwrap();
        let m20 = stats.get(HUMAN, 20, Phase::Detection).unwrap().mean_s;
        let m30 = stats.get(HUMAN, 30, Phase::Detection).unwrap().mean_s;
        let m40 = stats.get(HUMAN, 40, Phase::Detection).unwrap().mean_s;
        assert_relative_eq!(m30 - m20, 50.0, max_relative = 1e-9);
        assert_relative_eq!(m40 - m30, 50.0, max_relative = 1e-9);
    }

    #[test]
    fn immersive_detection_pct_diff_near_reference() {
        let config = base_config();
        let profiles = builtin_profiles();
        let stats = run_experiment(&config, &profiles).unwrap();
        let pct = stats
            .get(IMMERSIVE, 20, Phase::Detection)
            .unwrap()
            .pct_diff_vs_baseline
            .unwrap();
        assert!((97.0..=121.0).contains(&pct), "pct {pct}");
    }

    #[test]
    fn paired_trials_are_agent_set_independent() {
        // Adding agents must not change another agent's statistics: trial
        // seeds and spot sets depend only on (master_seed, count, trial).
        let profiles = builtin_profiles();
        let solo = ScenarioConfig {
            agents: vec![HUMAN.into()],
            ..base_config()
        };
        let all = base_config();
        let solo_stats = run_experiment(&solo, &profiles).unwrap();
        let all_stats = run_experiment(&all, &profiles).unwrap();
        for spots in [20, 30, 40] {
            for phase in [Phase::Detection, Phase::Treatment] {
                let a = solo_stats.get(HUMAN, spots, phase).unwrap();
                let b = all_stats.get(HUMAN, spots, phase).unwrap();
                assert_eq!(a.mean_s, b.mean_s);
                assert_eq!(a.std_s, b.std_s);
            }
        }
    }

    #[test]
    fn mean_matches_naive_recomputation() {
        let config = ScenarioConfig {
            spot_counts: vec![20],
            trials: 25,
            ..base_config()
        };
        let profiles = builtin_profiles();
        let stats = run_experiment(&config, &profiles).unwrap();
        // Recompute the human detection mean trial by trial.
        let mut totals = Vec::new();
        for trial in 0..25 {
            let seed = derive_trial_seed(42, 20, trial);
            let spots = generate_spots(&config.field, 20, 0.5, seed);
            totals.push(simulate_scan(&config.field, &profiles[HUMAN], &spots).total_time);
        }
        let naive = totals.iter().sum::<f64>() / totals.len() as f64;
        let reported = stats.get(HUMAN, 20, Phase::Detection).unwrap().mean_s;
        assert_relative_eq!(reported, naive, max_relative = 1e-9);
    }

    #[test]
    fn scan_time_std_is_zero_for_single_pass_at_fixed_difficulty() {
        // With p = 0 every spot is easy and single-pass scan time depends
        // only on the count, so the std over trials is exactly zero.
        let config = ScenarioConfig {
            p_difficult: 0.0,
            spot_counts: vec![30],
            ..base_config()
        };
        let profiles = builtin_profiles();
        let stats = run_experiment(&config, &profiles).unwrap();
        assert_eq!(stats.get(HUMAN, 30, Phase::Detection).unwrap().std_s, 0.0);
        assert_eq!(
            stats.get(NON_IMMERSIVE, 30, Phase::Detection).unwrap().std_s,
            0.0
        );
    }

    #[test]
    fn trial_seed_depends_only_on_inputs() {
        let a = derive_trial_seed(42, 20, 7);
        let b = derive_trial_seed(42, 20, 7);
        assert_eq!(a, b);
        assert_ne!(a, derive_trial_seed(42, 20, 8));
        assert_ne!(a, derive_trial_seed(42, 30, 7));
        assert_ne!(a, derive_trial_seed(43, 20, 7));
    }

    #[test]
    fn percent_difference_examples() {
        // (19920, 9660) -> +106.2%; (3300, 9660) -> -65.8%; (x, x) -> 0.
        assert_relative_eq!(
            percent_difference(19_920.0, 9_660.0).unwrap(),
            106.21118012422359,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            percent_difference(3_300.0, 9_660.0).unwrap(),
            -65.83850931677019,
            max_relative = 1e-12
        );
        assert_eq!(percent_difference(1234.5, 1234.5).unwrap(), 0.0);
        assert!(matches!(
            percent_difference(10.0, 0.0),
            Err(Error::NonPositiveBaseline(_))
        ));
    }

    #[test]
    fn hours_minutes_formatting() {
        assert_eq!(format_hours_minutes(9_796.6), "02 hrs 43 mins");
        assert_eq!(format_hours_minutes(3_300.0), "00 hrs 55 mins");
        assert_eq!(format_hours_minutes(0.0), "00 hrs 00 mins");
        // Rounding carries into the hour.
        assert_eq!(format_hours_minutes(3_599.0), "01 hrs 00 mins");
    }

    #[test]
    fn unknown_agent_is_rejected() {
        let config = ScenarioConfig {
            agents: vec!["cyborg".into()],
            ..base_config()
        };
        let profiles = builtin_profiles();
        assert!(matches!(
            run_experiment(&config, &profiles),
            Err(Error::UnknownAgent(_))
        ));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let profiles = builtin_profiles();
        let no_trials = ScenarioConfig {
            trials: 0,
            ..base_config()
        };
        assert!(run_experiment(&no_trials, &profiles).is_err());
        let no_counts = ScenarioConfig {
            spot_counts: vec![],
            ..base_config()
        };
        assert!(run_experiment(&no_counts, &profiles).is_err());
    }
}
