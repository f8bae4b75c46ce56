//! Phase simulation: serpentine scanning, full-rescan treatment, targeted
//! treatment, and yield surveys, each producing a time decomposition plus the
//! traversed path polyline.

use crate::agents::{AgentProfile, ScanStrategy};
use crate::error::{Error, Result};
use crate::field::{Difficulty, FieldGeometry, FieldPoint, Side, Spot, ZoneEpicenter};
use crate::routing::{self, PlannerKind};

/// Time decomposition and path of one simulated phase.
///
/// `total_time` is always `travel + service + transition` accumulated in that
/// order, so the decomposition is exact, not approximate.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub travel_time: f64,
    pub service_time: f64,
    pub transition_time: f64,
    pub total_time: f64,
    /// Cartesian polyline of the traversal (meters).
    pub path: Vec<(f64, f64)>,
    /// Spots serviced during the phase, in service order.
    pub visited_spots: Vec<Spot>,
    /// True when the agent stored the spot coordinates for a later phase.
    pub records_coordinates: bool,
}

impl PhaseResult {
    pub(crate) fn from_components(
        travel_time: f64,
        service_time: f64,
        transition_time: f64,
        path: Vec<(f64, f64)>,
        visited_spots: Vec<Spot>,
        records_coordinates: bool,
    ) -> Self {
        let total_time = travel_time + service_time + transition_time;
        Self {
            travel_time,
            service_time,
            transition_time,
            total_time,
            path,
            visited_spots,
            records_coordinates,
        }
    }

    fn empty() -> Self {
        Self::from_components(0.0, 0.0, 0.0, Vec::new(), Vec::new(), false)
    }

    pub(crate) fn with_visits(mut self, visited: Vec<Spot>, records: bool) -> Self {
        self.visited_spots = visited;
        self.records_coordinates = records;
        self
    }
}

/// Serpentine polyline over all rows: row 0 outbound, row 1 back, and so on.
fn serpentine_path(field: &FieldGeometry) -> Vec<(f64, f64)> {
    let len = field.row_length();
    let mut pts = Vec::with_capacity(field.num_rows() * 2);
    for row in 0..field.num_rows() {
        let (enter, exit) = if row % 2 == 0 { (0.0, len) } else { (len, 0.0) };
        pts.push(field.cartesian(FieldPoint::new(row, enter)));
        pts.push(field.cartesian(FieldPoint::new(row, exit)));
    }
    pts
}

/// Out-and-back polyline: every row is walked to the far headland and back
/// before advancing along the near headland.
fn double_pass_path(field: &FieldGeometry) -> Vec<(f64, f64)> {
    let len = field.row_length();
    let mut pts = Vec::with_capacity(field.num_rows() * 3);
    for row in 0..field.num_rows() {
        pts.push(field.cartesian(FieldPoint::new(row, 0.0)));
        pts.push(field.cartesian(FieldPoint::new(row, len)));
        pts.push(field.cartesian(FieldPoint::new(row, 0.0)));
    }
    pts
}

/// Spots in single-pass traversal order: rows ascending, x following the
/// serpentine direction of each row.
fn single_pass_visit_order(spots: &[Spot]) -> Vec<Spot> {
    let mut by_row: std::collections::BTreeMap<usize, Vec<Spot>> = Default::default();
    for &s in spots {
        by_row.entry(s.location.row).or_default().push(s);
    }
    let mut out = Vec::with_capacity(spots.len());
    for (row, mut group) in by_row {
        group.sort_by(|a, b| a.location.x.partial_cmp(&b.location.x).unwrap());
        if row % 2 == 1 {
            group.reverse();
        }
        out.extend(group);
    }
    out
}

/// Spots in double-pass order: per row, left-side spots on the outbound leg
/// (ascending x), right-side spots on the return leg (descending x).
fn double_pass_visit_order(spots: &[Spot]) -> Vec<Spot> {
    let mut by_row: std::collections::BTreeMap<usize, Vec<Spot>> = Default::default();
    for &s in spots {
        by_row.entry(s.location.row).or_default().push(s);
    }
    let mut out = Vec::with_capacity(spots.len());
    for (_, group) in by_row {
        let mut left: Vec<Spot> = group.iter().copied().filter(|s| s.side == Side::Left).collect();
        let mut right: Vec<Spot> =
            group.iter().copied().filter(|s| s.side == Side::Right).collect();
        left.sort_by(|a, b| a.location.x.partial_cmp(&b.location.x).unwrap());
        right.sort_by(|a, b| b.location.x.partial_cmp(&a.location.x).unwrap());
        out.extend(left);
        out.extend(right);
    }
    out
}

fn total_service_time(profile: &AgentProfile, visited: &[Spot]) -> f64 {
    let mut t = 0.0;
    for s in visited {
        t += profile.service_time(s.difficulty);
    }
    t
}

/// Simulates the first-round scan. Single-pass strategies cover each row
/// once (travel `R*L/speed`, `R-1` transitions); the double-pass strategy
/// covers each row out and back (travel `2*R*L/speed`, `2R-1` transitions:
/// one far-headland U-turn per row plus `R-1` advances). Detection is
/// perfect: every spot is serviced exactly once.
pub fn simulate_scan(field: &FieldGeometry, profile: &AgentProfile, spots: &[Spot]) -> PhaseResult {
    debug_assert!(spots.iter().all(|s| field.contains(s.location)));
    let rows = field.num_rows() as f64;
    let row_meters = rows * field.row_length();
    let (travel_time, transitions, path, visited) = match profile.scan_strategy {
        ScanStrategy::SinglePassBothSides | ScanStrategy::SinglePassDualCamera => (
            row_meters / profile.speed,
            field.num_rows() - 1,
            serpentine_path(field),
            single_pass_visit_order(spots),
        ),
        ScanStrategy::DoublePass => (
            2.0 * row_meters / profile.speed,
            2 * field.num_rows() - 1,
            double_pass_path(field),
            double_pass_visit_order(spots),
        ),
    };
    let service_time = total_service_time(profile, &visited);
    let transition_time = transitions as f64 * profile.row_transition_time;
    PhaseResult::from_components(
        travel_time,
        service_time,
        transition_time,
        path,
        visited,
        profile.has_memory,
    )
}

/// Second-round treatment for a memory-less agent: the full scan traversal is
/// repeated and spots are sprayed in traversal order.
pub fn simulate_treatment_full_rescan(
    field: &FieldGeometry,
    profile: &AgentProfile,
    spots: &[Spot],
) -> Result<PhaseResult> {
    if profile.has_memory {
        return Err(Error::AgentMisuse(format!(
            "'{}' stores coordinates and must use targeted treatment",
            profile.name
        )));
    }
    let mut result = simulate_scan(field, profile, spots);
    result.records_coordinates = false;
    Ok(result)
}

/// Second-round treatment for a memory-capable agent: an open tour from
/// (row 0, x 0) over the recorded spot locations, planned by `planner`, with
/// the same per-spot service constants charged as spray time. Zero recorded
/// spots means no deployment: a zero-time result.
pub fn simulate_treatment_targeted(
    field: &FieldGeometry,
    profile: &AgentProfile,
    recorded: &[Spot],
    planner: PlannerKind,
) -> Result<PhaseResult> {
    if !profile.has_memory {
        return Err(Error::AgentMisuse(format!(
            "'{}' has no stored coordinates for targeted treatment",
            profile.name
        )));
    }
    if recorded.is_empty() {
        return Ok(PhaseResult::empty());
    }
    for s in recorded {
        field.validate_point(s.location)?;
    }
    let start = FieldPoint::new(0, 0.0);
    let targets: Vec<FieldPoint> = recorded.iter().map(|s| s.location).collect();
    let order = match planner {
        PlannerKind::NearestNeighbor => routing::nearest_neighbor_order(field, start, &targets),
        PlannerKind::NnTwoOpt => {
            let order = routing::nearest_neighbor_order(field, start, &targets);
            routing::two_opt_order(field, start, &targets, order)
        }
        PlannerKind::Exact => routing::exact_order(field, start, &targets)?,
    };
    let route = routing::route_from_order(field, start, &targets, &order);
    let service: Vec<(FieldPoint, Difficulty)> = recorded
        .iter()
        .map(|s| (s.location, s.difficulty))
        .collect();
    let timed = routing::route_time(field, profile, &route, &service)?;
    let visited: Vec<Spot> = order.iter().map(|&i| recorded[i]).collect();
    Ok(timed.with_visits(visited, false))
}

/// Survey coverage mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurveyMode {
    /// Exhaustive serpentine pass servicing zone epicenters en route.
    FullCoverage,
    /// Open tour over the zone epicenters only.
    Targeted,
}

/// Surveys low-yield zone epicenters. Zone service is charged at the
/// profile's easy-spot time in both modes.
pub fn simulate_yield_survey(
    field: &FieldGeometry,
    profile: &AgentProfile,
    zones: &[ZoneEpicenter],
    mode: SurveyMode,
    planner: PlannerKind,
) -> Result<PhaseResult> {
    for z in zones {
        field.validate_point(z.center)?;
    }
    let service_time = zones.len() as f64 * profile.time_easy;
    match mode {
        SurveyMode::FullCoverage => {
            let rows = field.num_rows() as f64;
            let travel_time = rows * field.row_length() / profile.speed;
            let transition_time = (field.num_rows() - 1) as f64 * profile.row_transition_time;
            Ok(PhaseResult::from_components(
                travel_time,
                service_time,
                transition_time,
                serpentine_path(field),
                Vec::new(),
                false,
            ))
        }
        SurveyMode::Targeted => {
            if zones.is_empty() {
                return Ok(PhaseResult::empty());
            }
            let start = FieldPoint::new(0, 0.0);
            let targets: Vec<FieldPoint> = zones.iter().map(|z| z.center).collect();
            let route = routing::plan_route(field, start, &targets, planner)?;
            let service: Vec<(FieldPoint, Difficulty)> =
                targets.iter().map(|&p| (p, Difficulty::Easy)).collect();
            routing::route_time(field, profile, &route, &service)
        }
    }
}
