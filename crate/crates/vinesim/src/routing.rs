//! Row-constrained distance metric and tour planning for targeted visits.
//!
//! Movement is restricted to along-row travel plus crossings at the two
//! headlands (`x = 0` and `x = row_length`), so the distance between points
//! on different rows is the shorter of the two headland detours. Tours are
//! open: they start at a depot and end at the last visit.

use crate::agents::AgentProfile;
use crate::error::{Error, Result};
use crate::field::{Difficulty, FieldGeometry, FieldPoint};
use crate::phase::PhaseResult;

/// Largest instance the exhaustive planner accepts.
pub const EXACT_PLANNER_MAX: usize = 10;

/// Improvement threshold for 2-opt moves; guards against cycling on
/// floating-point noise.
const TWO_OPT_EPS: f64 = 1e-9;

/// Tour construction choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    /// Greedy nearest-neighbor construction only.
    NearestNeighbor,
    /// Nearest-neighbor followed by first-improvement 2-opt (the default).
    NnTwoOpt,
    /// Exhaustive search, limited to [`EXACT_PLANNER_MAX`] targets.
    Exact,
}

impl std::str::FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(PlannerKind::NearestNeighbor),
            "nn2opt" => Ok(PlannerKind::NnTwoOpt),
            "exact" => Ok(PlannerKind::Exact),
            other => Err(Error::Config(format!(
                "unknown planner '{other}' (expected nn, nn2opt, or exact)"
            ))),
        }
    }
}

/// An open tour: fixed start, ordered visits, per-leg distances, and their
/// sum accumulated in leg order.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub start: FieldPoint,
    pub visits: Vec<FieldPoint>,
    pub leg_distances: Vec<f64>,
    pub total_distance: f64,
}

/// Shortest travel distance between two field points under row-constrained
/// movement. Same row: `|a.x - b.x|`. Different rows: the cheaper of the two
/// headland detours. Symmetric by construction.
pub fn row_distance(field: &FieldGeometry, a: FieldPoint, b: FieldPoint) -> f64 {
    debug_assert!(field.contains(a), "point a off the field");
    debug_assert!(field.contains(b), "point b off the field");
    if a.row == b.row {
        return (a.x - b.x).abs();
    }
    let cross = a.row.abs_diff(b.row) as f64 * field.row_spacing();
    let len = field.row_length();
    // Sum the along-row parts first: f64 addition commutes, so the result is
    // bit-identical under argument swap.
    let via_near = (a.x + b.x) + cross;
    let via_far = ((len - a.x) + (len - b.x)) + cross;
    via_near.min(via_far)
}

/// Distances from the start and between all targets, precomputed once per
/// planning call.
struct DistanceTable {
    from_start: Vec<f64>,
    between: Vec<Vec<f64>>,
}

impl DistanceTable {
    fn build(field: &FieldGeometry, start: FieldPoint, targets: &[FieldPoint]) -> Self {
        let from_start = targets
            .iter()
            .map(|&t| row_distance(field, start, t))
            .collect();
        let between = targets
            .iter()
            .map(|&a| targets.iter().map(|&b| row_distance(field, a, b)).collect())
            .collect();
        Self {
            from_start,
            between,
        }
    }

    fn leg(&self, from: Option<usize>, to: usize) -> f64 {
        match from {
            None => self.from_start[to],
            Some(i) => self.between[i][to],
        }
    }
}

/// Greedy visit order: repeatedly move to the nearest unvisited target, ties
/// broken by (row, x) of the candidate.
pub fn nearest_neighbor_order(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
) -> Vec<usize> {
    let table = DistanceTable::build(field, start, targets);
    let mut remaining: Vec<usize> = (0..targets.len()).collect();
    let mut order = Vec::with_capacity(targets.len());
    let mut current: Option<usize> = None;
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                let da = table.leg(current, a);
                let db = table.leg(current, b);
                da.partial_cmp(&db)
                    .unwrap()
                    .then_with(|| targets[a].lex_cmp(&targets[b]))
            })
            .unwrap();
        let next = remaining.remove(pos);
        order.push(next);
        current = Some(next);
    }
    order
}

/// First-improvement 2-opt on an open tour: scans segment reversals in
/// (i, j) order, applies the first one that shortens the tour, and restarts
/// until no improving reversal remains. Interior leg lengths are invariant
/// under reversal because the metric is symmetric.
pub fn two_opt_order(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
    mut order: Vec<usize>,
) -> Vec<usize> {
    let table = DistanceTable::build(field, start, targets);
    let n = order.len();
    if n < 2 {
        return order;
    }
    'improve: loop {
        for i in 0..n {
            for j in (i + 1)..n {
                let before = if i == 0 { None } else { Some(order[i - 1]) };
                let old = table.leg(before, order[i])
                    + if j + 1 < n {
                        table.between[order[j]][order[j + 1]]
                    } else {
                        0.0
                    };
                let new = table.leg(before, order[j])
                    + if j + 1 < n {
                        table.between[order[i]][order[j + 1]]
                    } else {
                        0.0
                    };
                if new < old - TWO_OPT_EPS {
                    order[i..=j].reverse();
                    continue 'improve;
                }
            }
        }
        return order;
    }
}

/// Exhaustive minimum-length visit order. Enumerates permutations in
/// lexicographic order of the target indices (pre-sorted by (row, x)), so
/// among equal-length tours the first, lexicographically smallest one wins.
pub fn exact_order(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
) -> Result<Vec<usize>> {
    if targets.len() > EXACT_PLANNER_MAX {
        return Err(Error::TooManyTargets {
            n: targets.len(),
            max: EXACT_PLANNER_MAX,
        });
    }
    let table = DistanceTable::build(field, start, targets);
    let mut ranked: Vec<usize> = (0..targets.len()).collect();
    ranked.sort_by(|&a, &b| targets[a].lex_cmp(&targets[b]));

    let mut best_order: Vec<usize> = Vec::new();
    let mut best_len = f64::INFINITY;
    let mut prefix: Vec<usize> = Vec::with_capacity(targets.len());
    let mut used = vec![false; targets.len()];

    fn search(
        table: &DistanceTable,
        ranked: &[usize],
        used: &mut [bool],
        prefix: &mut Vec<usize>,
        partial: f64,
        best_len: &mut f64,
        best_order: &mut Vec<usize>,
    ) {
        if partial >= *best_len {
            return; // any completion only adds non-negative legs
        }
        if prefix.len() == ranked.len() {
            *best_len = partial;
            *best_order = prefix.clone();
            return;
        }
        for pos in 0..ranked.len() {
            if used[pos] {
                continue;
            }
            let idx = ranked[pos];
            let leg = table.leg(prefix.last().copied(), idx);
            used[pos] = true;
            prefix.push(idx);
            search(
                table,
                ranked,
                used,
                prefix,
                partial + leg,
                best_len,
                best_order,
            );
            prefix.pop();
            used[pos] = false;
        }
    }

    search(
        &table,
        &ranked,
        &mut used,
        &mut prefix,
        0.0,
        &mut best_len,
        &mut best_order,
    );
    Ok(best_order)
}

/// Materializes a route from a visit order over `targets`.
pub fn route_from_order(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
    order: &[usize],
) -> Route {
    let mut visits = Vec::with_capacity(order.len());
    let mut leg_distances = Vec::with_capacity(order.len());
    let mut total = 0.0;
    let mut current = start;
    for &i in order {
        let next = targets[i];
        let d = row_distance(field, current, next);
        leg_distances.push(d);
        total += d;
        visits.push(next);
        current = next;
    }
    Route {
        start,
        visits,
        leg_distances,
        total_distance: total,
    }
}

/// Nearest-neighbor open tour from `start` over the target set.
pub fn plan_route_nearest_neighbor(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
) -> Route {
    let order = nearest_neighbor_order(field, start, targets);
    route_from_order(field, start, targets, &order)
}

/// Applies first-improvement 2-opt to an existing route. The result visits
/// the same points and is never longer.
pub fn improve_route_2opt(field: &FieldGeometry, route: &Route) -> Route {
    let targets = route.visits.clone();
    let order: Vec<usize> = (0..targets.len()).collect();
    let improved = two_opt_order(field, route.start, &targets, order);
    route_from_order(field, route.start, &targets, &improved)
}

/// Exhaustive minimum-length open tour; errors beyond [`EXACT_PLANNER_MAX`]
/// targets.
pub fn plan_route_exact(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
) -> Result<Route> {
    let order = exact_order(field, start, targets)?;
    Ok(route_from_order(field, start, targets, &order))
}

/// Plans a route with the selected planner.
pub fn plan_route(
    field: &FieldGeometry,
    start: FieldPoint,
    targets: &[FieldPoint],
    kind: PlannerKind,
) -> Result<Route> {
    match kind {
        PlannerKind::NearestNeighbor => Ok(plan_route_nearest_neighbor(field, start, targets)),
        PlannerKind::NnTwoOpt => {
            let order = nearest_neighbor_order(field, start, targets);
            let order = two_opt_order(field, start, targets, order);
            Ok(route_from_order(field, start, targets, &order))
        }
        PlannerKind::Exact => plan_route_exact(field, start, targets),
    }
}

/// Times a route for an agent: travel at `speed`, one row-transition charge
/// per leg whose endpoints lie on different rows, and per-visit service
/// looked up in `service` (consumed multiset-style, so duplicate locations
/// resolve correctly). The polyline follows the row/headland geometry of
/// each leg.
pub fn route_time(
    field: &FieldGeometry,
    profile: &AgentProfile,
    route: &Route,
    service: &[(FieldPoint, Difficulty)],
) -> Result<PhaseResult> {
    let travel_time = route.total_distance / profile.speed;

    let mut row_changes = 0usize;
    let mut current = route.start;
    for &v in &route.visits {
        if v.row != current.row {
            row_changes += 1;
        }
        current = v;
    }
    let transition_time = row_changes as f64 * profile.row_transition_time;

    let mut consumed = vec![false; service.len()];
    let mut service_time = 0.0;
    for &v in &route.visits {
        let found = service.iter().enumerate().position(|(k, &(p, _))| {
            !consumed[k] && p.row == v.row && p.x.to_bits() == v.x.to_bits()
        });
        match found {
            Some(k) => {
                consumed[k] = true;
                service_time += profile.service_time(service[k].1);
            }
            None => {
                return Err(Error::MissingService { row: v.row, x: v.x });
            }
        }
    }

    let path = route_polyline(field, route);
    Ok(PhaseResult::from_components(
        travel_time,
        service_time,
        transition_time,
        path,
        Vec::new(),
        false,
    ))
}

/// Cartesian polyline of a route: same-row legs go straight, cross-row legs
/// run to the cheaper headland, across, and back in.
pub fn route_polyline(field: &FieldGeometry, route: &Route) -> Vec<(f64, f64)> {
    if route.visits.is_empty() {
        return Vec::new();
    }
    let mut pts: Vec<(f64, f64)> = vec![field.cartesian(route.start)];
    let push = |pts: &mut Vec<(f64, f64)>, p: (f64, f64)| {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    };
    let mut current = route.start;
    for &v in &route.visits {
        if v.row == current.row {
            push(&mut pts, field.cartesian(v));
        } else {
            let len = field.row_length();
            let via_near = current.x + v.x;
            let via_far = (len - current.x) + (len - v.x);
            let h = if via_near <= via_far { 0.0 } else { len };
            push(&mut pts, field.cartesian(FieldPoint::new(current.row, h)));
            push(&mut pts, field.cartesian(FieldPoint::new(v.row, h)));
            push(&mut pts, field.cartesian(v));
        }
        current = v;
    }
    pts
}
