//! CSV emission/parsing and summary-table rendering.
//!
//! Seconds are serialized with Rust's shortest round-trip float formatting,
//! so re-parsing a CSV reproduces the in-memory values bit for bit and
//! identical runs produce byte-identical files.

use crate::agents::AgentProfile;
use crate::error::{Error, Result};
use crate::experiment::{format_hours_minutes, ExperimentStats, Phase, StatRow};
use crate::field::{Difficulty, FieldGeometry, FieldPoint, Side, Spot};
use crate::phase::PhaseResult;
use crate::routing::Route;

pub const STATS_CSV_HEADER: &str =
    "agent,scenario_spots,phase,mean_s,std_s,min_s,max_s,pct_diff_vs_human";
pub const ROUTE_CSV_HEADER: &str =
    "leg_index,from_row,from_x_m,to_row,to_x_m,leg_distance_m,cumulative_s";
pub const PHASE_CSV_HEADER: &str = "agent,phase,spots,travel_s,service_s,transition_s,total_s";
pub const SPOTS_CSV_HEADER: &str = "row,x_m,side,difficulty";
pub const COMPARISON_CSV_HEADER: &str =
    "mode,zone_count,travel_s,service_s,transition_s,total_s,pct_diff_vs_full";

pub fn write_stats_csv(stats: &ExperimentStats) -> String {
    let mut out = String::from(STATS_CSV_HEADER);
    out.push('\n');
    for r in &stats.rows {
        let pct = match r.pct_diff_vs_baseline {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.agent,
            r.scenario_spots,
            r.phase.label(),
            r.mean_s,
            r.std_s,
            r.min_s,
            r.max_s,
            pct
        ));
    }
    out
}

pub fn parse_stats_csv(text: &str) -> Result<Vec<StatRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == STATS_CSV_HEADER => {}
        _ => return Err(Error::format_at(1, "missing stats CSV header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::format_at(
                lineno,
                format!("expected 8 fields, found {}", fields.len()),
            ));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::format_at(lineno, format!("cannot parse {what} '{s}'")))
        };
        rows.push(StatRow {
            agent: fields[0].to_string(),
            scenario_spots: fields[1]
                .parse()
                .map_err(|_| Error::format_at(lineno, "cannot parse scenario_spots"))?,
            phase: fields[2].parse()?,
            mean_s: parse_f(fields[3], "mean_s")?,
            std_s: parse_f(fields[4], "std_s")?,
            min_s: parse_f(fields[5], "min_s")?,
            max_s: parse_f(fields[6], "max_s")?,
            pct_diff_vs_baseline: if fields[7].is_empty() {
                None
            } else {
                Some(parse_f(fields[7], "pct_diff")?)
            },
        });
    }
    Ok(rows)
}

/// Route CSV: one line per leg. `cumulative_s` is the elapsed time after
/// completing the leg: its travel, `transitions_per_leg[i]` row-transition
/// charges, and the service of the destination visit. Targeted tours charge
/// one transition per row-changing leg; a full-rescan traversal charges one
/// per row crossed.
pub fn write_route_csv(
    profile: &AgentProfile,
    route: &Route,
    visited: &[Spot],
    transitions_per_leg: &[usize],
) -> String {
    debug_assert_eq!(route.visits.len(), visited.len());
    debug_assert_eq!(route.visits.len(), transitions_per_leg.len());
    let mut out = String::from(ROUTE_CSV_HEADER);
    out.push('\n');
    let mut from = route.start;
    let mut elapsed = 0.0;
    for (i, (&to, spot)) in route.visits.iter().zip(visited).enumerate() {
        elapsed += route.leg_distances[i] / profile.speed;
        elapsed += transitions_per_leg[i] as f64 * profile.row_transition_time;
        elapsed += profile.service_time(spot.difficulty);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i, from.row, from.x, to.row, to.x, route.leg_distances[i], elapsed
        ));
        from = to;
    }
    out
}

/// Transition counts for a targeted tour: one per leg that changes rows.
pub fn tour_transition_counts(route: &Route) -> Vec<usize> {
    let mut counts = Vec::with_capacity(route.visits.len());
    let mut from = route.start;
    for &to in &route.visits {
        counts.push(usize::from(to.row != from.row));
        from = to;
    }
    counts
}

pub fn write_phase_csv(agent: &str, phase: Phase, spots: usize, result: &PhaseResult) -> String {
    format!(
        "{PHASE_CSV_HEADER}\n{},{},{},{},{},{},{}\n",
        agent,
        phase.label(),
        spots,
        result.travel_time,
        result.service_time,
        result.transition_time,
        result.total_time
    )
}

pub fn parse_phase_csv(text: &str) -> Result<(String, Phase, usize, f64, f64, f64, f64)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == PHASE_CSV_HEADER => {}
        _ => return Err(Error::format_at(1, "missing phase CSV header")),
    }
    let line = lines
        .next()
        .ok_or_else(|| Error::format_at(2, "missing phase CSV data row"))?;
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(Error::format_at(2, "expected 7 fields"));
    }
    let f = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::format_at(2, format!("cannot parse '{s}'")))
    };
    Ok((
        fields[0].to_string(),
        fields[1].parse()?,
        fields[2]
            .parse()
            .map_err(|_| Error::format_at(2, "cannot parse spots"))?,
        f(fields[3])?,
        f(fields[4])?,
        f(fields[5])?,
        f(fields[6])?,
    ))
}

pub fn write_recorded_spots_csv(spots: &[Spot]) -> String {
    let mut out = String::from(SPOTS_CSV_HEADER);
    out.push('\n');
    for s in spots {
        let side = match s.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        let difficulty = match s.difficulty {
            Difficulty::Easy => "easy",
            Difficulty::Difficult => "difficult",
        };
        out.push_str(&format!(
            "{},{},{side},{difficulty}\n",
            s.location.row, s.location.x
        ));
    }
    out
}

pub fn parse_recorded_spots_csv(text: &str, field: &FieldGeometry) -> Result<Vec<Spot>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SPOTS_CSV_HEADER => {}
        _ => {
            return Err(Error::format_at(
                1,
                format!("missing header '{SPOTS_CSV_HEADER}'"),
            ))
        }
    }
    let mut spots = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::format_at(
                lineno,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let row: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::format_at(lineno, format!("cannot parse row '{}'", fields[0])))?;
        let x: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::format_at(lineno, format!("cannot parse x_m '{}'", fields[1])))?;
        let side = match fields[2].trim() {
            "left" => Side::Left,
            "right" => Side::Right,
            other => {
                return Err(Error::format_at(
                    lineno,
                    format!("side must be left or right, got '{other}'"),
                ))
            }
        };
        let difficulty = match fields[3].trim() {
            "easy" => Difficulty::Easy,
            "difficult" => Difficulty::Difficult,
            other => {
                return Err(Error::format_at(
                    lineno,
                    format!("difficulty must be easy or difficult, got '{other}'"),
                ))
            }
        };
        let location = FieldPoint::new(row, x);
        field.validate_point(location).map_err(|e| {
            Error::format_at(lineno, format!("spot off the field: {e}"))
        })?;
        spots.push(Spot {
            location,
            side,
            difficulty,
        });
    }
    Ok(spots)
}

/// Yield-survey comparison CSV with one row per coverage mode.
pub fn write_comparison_csv(
    zone_count: usize,
    full: &PhaseResult,
    targeted: &PhaseResult,
) -> String {
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    let pct = if full.total_time > 0.0 {
        format!(
            "{}",
            (targeted.total_time - full.total_time) / full.total_time * 100.0
        )
    } else {
        String::new()
    };
    out.push_str(&format!(
        "full_coverage,{zone_count},{},{},{},{},\n",
        full.travel_time, full.service_time, full.transition_time, full.total_time
    ));
    out.push_str(&format!(
        "targeted,{zone_count},{},{},{},{},{pct}\n",
        targeted.travel_time, targeted.service_time, targeted.transition_time, targeted.total_time
    ));
    out
}

fn render_grid(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let push_row = |cells: &[String], out: &mut String| {
        for (i, cell) in cells.iter().enumerate() {
            out.push_str(&format!("{:<width$}", cell, width = widths[i]));
            if i + 1 < cols {
                out.push_str("  ");
            }
        }
        out.push('\n');
    };
    push_row(headers, &mut out);
    let total: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        push_row(row, &mut out);
    }
    out
}

fn signed_pct(v: Option<f64>) -> String {
    match v {
        Some(p) => format!("{p:+.0}%"),
        None => "-".into(),
    }
}

fn phase_table(
    stats: &ExperimentStats,
    phase: Phase,
    agents: &[String],
    baseline: &str,
    scenario_label: &str,
) -> Option<String> {
    let counts: Vec<usize> = stats
        .spot_counts()
        .into_iter()
        .filter(|&c| agents.iter().any(|a| stats.get(a, c, phase).is_some()))
        .collect();
    if counts.is_empty() {
        return None;
    }
    let mut headers = vec![scenario_label.to_string()];
    for agent in agents {
        headers.push(agent.clone());
        headers.push(format!("{agent}_mean_s"));
        if agent != baseline {
            headers.push("% diff".into());
        }
    }
    let mut rows = Vec::new();
    for count in counts {
        let mut row = vec![count.to_string()];
        for agent in agents {
            match stats.get(agent, count, phase) {
                Some(r) => {
                    row.push(format_hours_minutes(r.mean_s));
                    row.push(format!("{:.1}", r.mean_s));
                    if agent != baseline {
                        row.push(signed_pct(r.pct_diff_vs_baseline));
                    }
                }
                None => {
                    row.push("-".into());
                    row.push("-".into());
                    if agent != baseline {
                        row.push("-".into());
                    }
                }
            }
        }
        rows.push(row);
    }
    Some(render_grid(&headers, &rows))
}

/// Renders the detection, second-round, and (when present) yield-survey
/// summary tables.
pub fn render_tables(stats: &ExperimentStats, agents: &[String], baseline: &str) -> String {
    let mut out = String::new();
    if let Some(t) = phase_table(stats, Phase::Detection, agents, baseline, "Spots") {
        out.push_str("Detection phase completion time (mean over trials)\n\n");
        out.push_str(&t);
        out.push('\n');
    }
    if let Some(t) = phase_table(stats, Phase::Treatment, agents, baseline, "Spots") {
        out.push_str("Second-round treatment completion time (mean over trials)\n\n");
        out.push_str(&t);
        out.push('\n');
    }
    if let Some(t) = phase_table(stats, Phase::Survey, agents, baseline, "Zones") {
        out.push_str("Low-yield zone survey completion time\n\n");
        out.push_str(&t);
        out.push('\n');
    }
    out
}
