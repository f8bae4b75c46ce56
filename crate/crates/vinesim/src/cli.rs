//! Command implementations behind the binary's subcommands. Each command
//! writes its artifacts under the configured output directory and returns
//! the written paths.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ResolvedConfig;
use crate::error::{Error, Result};
use crate::experiment::{fill_percent_differences, run_experiment, Phase, StatRow};
use crate::field::{
    extract_low_yield_zones, generate_spots, load_yield_map, FieldGeometry, FieldPoint, Spot,
    YieldMap, ZoneEpicenter,
};
use crate::phase::{
    simulate_scan, simulate_treatment_full_rescan, simulate_treatment_targeted,
    simulate_yield_survey, PhaseResult, SurveyMode,
};
use crate::report;
use crate::routing::{route_from_order, PlannerKind, Route};
use crate::svg::FieldPlot;

/// Where the treatment phase gets its recorded spots.
pub enum TreatSource<'a> {
    /// Run a fresh seeded scan of `spots` spots first.
    Fresh { spots: usize },
    /// Load a recorded-spots CSV.
    File(&'a Path),
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn spot_markers(field: &FieldGeometry, spots: &[Spot]) -> Vec<(f64, f64)> {
    spots.iter().map(|s| field.cartesian(s.location)).collect()
}

/// One seeded first-round scan for one agent: phase CSV, recorded-spots CSV,
/// and a path SVG with spot markers.
pub fn cmd_scan(
    cfg: &ResolvedConfig,
    agent: &str,
    spots: usize,
    p_difficult: Option<f64>,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let profile = cfg.profile(agent)?;
    let seed = seed.unwrap_or(cfg.scenario.master_seed);
    let p = p_difficult.unwrap_or(cfg.scenario.p_difficult);
    let drawn = generate_spots(&cfg.field, spots, p, seed);
    let result = simulate_scan(&cfg.field, profile, &drawn);

    let markers = spot_markers(&cfg.field, &drawn);
    let legend_line = format!("scan path: {agent}");
    let legend: Vec<&str> = vec![legend_line.as_str(), "o infected spots"];
    let svg = FieldPlot {
        field: &cfg.field,
        result: &result,
        draw_rows: false,
        as_route: false,
        markers: &markers,
        marker_class: "spot",
        legend: &legend,
    }
    .render();

    Ok(vec![
        write_file(
            &cfg.out_dir,
            "scan_phase.csv",
            &report::write_phase_csv(agent, Phase::Detection, spots, &result),
        )?,
        write_file(
            &cfg.out_dir,
            "recorded_spots.csv",
            &report::write_recorded_spots_csv(&result.visited_spots),
        )?,
        write_file(&cfg.out_dir, "scan_path.svg", &svg)?,
    ])
}

/// Serpentine arc-length of a point: meters of row travel before reaching it
/// on a full single-pass traversal.
fn serpentine_position(field: &FieldGeometry, p: FieldPoint) -> f64 {
    let along = if p.row.is_multiple_of(2) {
        p.x
    } else {
        field.row_length() - p.x
    };
    p.row as f64 * field.row_length() + along
}

/// Route and per-leg transition counts for a full-rescan traversal: legs run
/// along the serpentine, transitions count every row boundary crossed.
fn rescan_route(field: &FieldGeometry, visited: &[Spot]) -> (Route, Vec<usize>) {
    let start = FieldPoint::new(0, 0.0);
    let mut legs = Vec::with_capacity(visited.len());
    let mut transitions = Vec::with_capacity(visited.len());
    let mut prev = start;
    let mut prev_pos = 0.0;
    let mut total = 0.0;
    for s in visited {
        let pos = serpentine_position(field, s.location);
        legs.push(pos - prev_pos);
        total += pos - prev_pos;
        transitions.push(s.location.row - prev.row);
        prev = s.location;
        prev_pos = pos;
    }
    let route = Route {
        start,
        visits: visited.iter().map(|s| s.location).collect(),
        leg_distances: legs,
        total_distance: total,
    };
    (route, transitions)
}

/// Second-round treatment for one agent: targeted tour for memory agents,
/// full rescan for the rest. Writes phase CSV, route CSV, and a path SVG.
pub fn cmd_treat(
    cfg: &ResolvedConfig,
    agent: &str,
    source: TreatSource,
    planner: Option<PlannerKind>,
    p_difficult: Option<f64>,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    let profile = cfg.profile(agent)?;
    let planner = planner.unwrap_or(cfg.scenario.planner);
    let recorded: Vec<Spot> = match source {
        TreatSource::File(path) => {
            let text = fs::read_to_string(path)?;
            report::parse_recorded_spots_csv(&text, &cfg.field)?
        }
        TreatSource::Fresh { spots } => {
            let seed = seed.unwrap_or(cfg.scenario.master_seed);
            let p = p_difficult.unwrap_or(cfg.scenario.p_difficult);
            let drawn = generate_spots(&cfg.field, spots, p, seed);
            simulate_scan(&cfg.field, profile, &drawn).visited_spots
        }
    };

    let (result, route, transitions, as_route) = if profile.has_memory {
        let result = simulate_treatment_targeted(&cfg.field, profile, &recorded, planner)?;
        let targets: Vec<FieldPoint> = result.visited_spots.iter().map(|s| s.location).collect();
        let order: Vec<usize> = (0..targets.len()).collect();
        let route = route_from_order(&cfg.field, FieldPoint::new(0, 0.0), &targets, &order);
        let transitions = report::tour_transition_counts(&route);
        (result, route, transitions, true)
    } else {
        let result = simulate_treatment_full_rescan(&cfg.field, profile, &recorded)?;
        let (route, transitions) = rescan_route(&cfg.field, &result.visited_spots);
        (result, route, transitions, false)
    };

    let markers = spot_markers(&cfg.field, &result.visited_spots);
    let legend_line = format!("- treatment path: {agent}");
    let legend: Vec<&str> = vec!["x infected spots", legend_line.as_str()];
    let svg = FieldPlot {
        field: &cfg.field,
        result: &result,
        draw_rows: true,
        as_route,
        markers: &markers,
        marker_class: "spot",
        legend: &legend,
    }
    .render();

    Ok(vec![
        write_file(
            &cfg.out_dir,
            "treat_phase.csv",
            &report::write_phase_csv(agent, Phase::Treatment, recorded.len(), &result),
        )?,
        write_file(
            &cfg.out_dir,
            "treat_route.csv",
            &report::write_route_csv(profile, &route, &result.visited_spots, &transitions),
        )?,
        write_file(&cfg.out_dir, "treat_path.svg", &svg)?,
    ])
}

fn load_configured_yield_map(cfg: &ResolvedConfig, path: &Path, cell_size: Option<f64>) -> Result<YieldMap> {
    let cell = cell_size.unwrap_or(cfg.yield_settings.cell_size_m);
    let map = load_yield_map(path, cell)?;
    match &cfg.yield_settings.class_values {
        Some(table) => map.map_classes(table),
        None => Ok(map),
    }
}

fn survey_stat_row(agent: &str, zones: usize, result: &PhaseResult) -> StatRow {
    StatRow {
        agent: agent.to_string(),
        scenario_spots: zones,
        phase: Phase::Survey,
        mean_s: result.total_time,
        std_s: 0.0,
        min_s: result.total_time,
        max_s: result.total_time,
        pct_diff_vs_baseline: None,
    }
}

/// Full Monte Carlo experiment: stats CSV plus the summary tables. When the
/// config names a yield map file, a survey comparison is appended to the
/// stats and a third table is emitted.
pub fn cmd_run(cfg: &ResolvedConfig, quiet: bool) -> Result<Vec<PathBuf>> {
    let mut stats = run_experiment(&cfg.scenario, &cfg.profiles)?;

    if let Some(path) = &cfg.yield_settings.file {
        let map = load_configured_yield_map(cfg, path, None)?;
        let zones = extract_low_yield_zones(&map, cfg.yield_settings.threshold, &cfg.field);
        for agent in &cfg.scenario.agents {
            let profile = cfg.profile(agent)?;
            let mode = if profile.has_memory {
                SurveyMode::Targeted
            } else {
                SurveyMode::FullCoverage
            };
            let result =
                simulate_yield_survey(&cfg.field, profile, &zones, mode, cfg.scenario.planner)?;
            stats.rows.push(survey_stat_row(agent, zones.len(), &result));
        }
        fill_percent_differences(&mut stats, &cfg.scenario.baseline);
    }

    let tables = report::render_tables(&stats, &cfg.scenario.agents, &cfg.scenario.baseline);
    if !quiet {
        print!("{tables}");
    }
    Ok(vec![
        write_file(&cfg.out_dir, "stats.csv", &report::write_stats_csv(&stats))?,
        write_file(&cfg.out_dir, "tables.txt", &tables)?,
    ])
}

fn zone_markers(field: &FieldGeometry, zones: &[ZoneEpicenter]) -> Vec<(f64, f64)> {
    zones.iter().map(|z| field.cartesian(z.center)).collect()
}

/// Yield survey comparison: loads the map, extracts low-yield zones, runs
/// the exhaustive and targeted modes, and writes the comparison CSV plus one
/// SVG per mode.
pub fn cmd_yield_survey(
    cfg: &ResolvedConfig,
    file: Option<&Path>,
    threshold: Option<f64>,
    cell_size: Option<f64>,
    human_agent: &str,
    robot_agent: &str,
) -> Result<Vec<PathBuf>> {
    let path = match file.or(cfg.yield_settings.file.as_deref()) {
        Some(p) => p.to_path_buf(),
        None => {
            return Err(Error::Config(
                "no yield map file given (use --yield-file or yield.file in the config)".into(),
            ))
        }
    };
    let threshold = threshold.unwrap_or(cfg.yield_settings.threshold);
    let map = load_configured_yield_map(cfg, &path, cell_size)?;
    let zones = extract_low_yield_zones(&map, threshold, &cfg.field);

    let human = cfg.profile(human_agent)?;
    let robot = cfg.profile(robot_agent)?;
    let full = simulate_yield_survey(
        &cfg.field,
        human,
        &zones,
        SurveyMode::FullCoverage,
        cfg.scenario.planner,
    )?;
    let targeted = simulate_yield_survey(
        &cfg.field,
        robot,
        &zones,
        SurveyMode::Targeted,
        cfg.scenario.planner,
    )?;

    let markers = zone_markers(&cfg.field, &zones);
    let zones_line = format!("o low-yield zones ({})", zones.len());
    let full_line = format!("- full-coverage survey: {human_agent}");
    let targeted_line = format!("- targeted survey: {robot_agent}");

    let full_legend: Vec<&str> = vec![zones_line.as_str(), full_line.as_str()];
    let full_svg = FieldPlot {
        field: &cfg.field,
        result: &full,
        draw_rows: true,
        as_route: false,
        markers: &markers,
        marker_class: "zone",
        legend: &full_legend,
    }
    .render();

    let targeted_legend: Vec<&str> = vec![zones_line.as_str(), targeted_line.as_str()];
    let targeted_svg = FieldPlot {
        field: &cfg.field,
        result: &targeted,
        draw_rows: true,
        as_route: true,
        markers: &markers,
        marker_class: "zone",
        legend: &targeted_legend,
    }
    .render();

    Ok(vec![
        write_file(
            &cfg.out_dir,
            "yield_comparison.csv",
            &report::write_comparison_csv(zones.len(), &full, &targeted),
        )?,
        write_file(&cfg.out_dir, "yield_full_coverage.svg", &full_svg)?,
        write_file(&cfg.out_dir, "yield_targeted.svg", &targeted_svg)?,
    ])
}
