//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Default configuration in every criterion: 52 rows x 227 m, spacing
//! 3.428 m, speed 1.25 m/s, p_difficult 0.5, 100 trials, planner nn2opt,
//! start (row 0, x 0), master seed = the shipped default.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vinesim::agents::{builtin_profiles, HUMAN, IMMERSIVE, NON_IMMERSIVE};
use vinesim::cli::{cmd_run, cmd_yield_survey};
use vinesim::config::{resolve, FileConfig, Overrides};
use vinesim::experiment::{run_experiment, Phase};
use vinesim::field::{
    extract_low_yield_zones, generate_spots, load_yield_map_str, FieldPoint, FieldPreset,
};
use vinesim::phase::{
    simulate_scan, simulate_treatment_full_rescan, simulate_treatment_targeted,
    simulate_yield_survey, SurveyMode,
};
use vinesim::routing::{plan_route, row_distance, PlannerKind};

fn default_config() -> vinesim::config::ResolvedConfig {
    let cfg = resolve(FileConfig::default(), &Overrides::default()).unwrap();
    // The acceptance configuration is the shipped default configuration.
    assert_eq!(cfg.field.num_rows(), 52);
    assert_eq!(cfg.field.row_length(), 227.0);
    assert_eq!(cfg.field.row_spacing(), 3.428);
    assert_eq!(cfg.scenario.trials, 100);
    assert_eq!(cfg.scenario.p_difficult, 0.5);
    assert_eq!(cfg.scenario.planner, PlannerKind::NnTwoOpt);
    assert_eq!(cfg.scenario.spot_counts, vec![20, 30, 40]);
    cfg
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

fn detection_means(cfg: &vinesim::config::ResolvedConfig, agent: &str) -> Vec<(usize, f64)> {
    let stats = run_experiment(&cfg.scenario, &cfg.profiles).unwrap();
    cfg.scenario
        .spot_counts
        .iter()
        .map(|&n| (n, stats.get(agent, n, Phase::Detection).unwrap().mean_s))
        .collect()
}

fn within(reference: f64, mean: f64, tol: f64) -> bool {
    (mean - reference).abs() / reference <= tol
}

#[test]
fn criterion_01_human_detection_times() {
    let mut cfg = default_config();
    cfg.scenario.agents = vec![HUMAN.into()];
    let started = Instant::now();
    let means = detection_means(&cfg, HUMAN);
    let elapsed = started.elapsed();
    let refs = [(20, 9_660.0), (30, 9_720.0), (40, 9_780.0)];
    let mut pass = elapsed.as_secs_f64() < 1.0;
    let mut detail = format!("runtime {:.3} s;", elapsed.as_secs_f64());
    for ((n, mean), (rn, reference)) in means.iter().zip(refs) {
        assert_eq!(*n, rn);
        pass &= within(reference, *mean, 0.05);
        detail += &format!(" n={n}: {mean:.1} s vs {reference:.0} (±5%)");
    }
    report("1 (human detection means)", pass, &detail);
}

#[test]
fn criterion_02_non_immersive_detection_times() {
    let cfg = default_config();
    let means = detection_means(&cfg, NON_IMMERSIVE);
    let refs = [(20, 10_320.0), (30, 10_860.0), (40, 11_280.0)];
    let mut pass = true;
    let mut detail = String::new();
    for ((n, mean), (rn, reference)) in means.iter().zip(refs) {
        assert_eq!(*n, rn);
        pass &= within(reference, *mean, 0.05);
        detail += &format!(" n={n}: {mean:.1} s vs {reference:.0} (±5%)");
    }
    report("2 (non-immersive detection means)", pass, detail.trim());
}

#[test]
fn criterion_03_immersive_detection_times_and_pct() {
    let cfg = default_config();
    let stats = run_experiment(&cfg.scenario, &cfg.profiles).unwrap();
    let refs = [(20, 19_920.0), (30, 20_460.0), (40, 20_880.0)];
    let mut pass = true;
    let mut detail = String::new();
    for (n, reference) in refs {
        let row = stats.get(IMMERSIVE, n, Phase::Detection).unwrap();
        let pct = row.pct_diff_vs_baseline.unwrap();
        pass &= within(reference, row.mean_s, 0.05);
        pass &= (97.0..=121.0).contains(&pct);
        detail += &format!(" n={n}: {:.1} s vs {reference:.0}, pct {pct:+.1}%", row.mean_s);
    }
    report(
        "3 (immersive detection means, pct in [+97, +121])",
        pass,
        detail.trim(),
    );
}

#[test]
fn criterion_04_human_second_round() {
    let mut cfg = default_config();
    cfg.scenario.agents = vec![HUMAN.into()];
    let stats = run_experiment(&cfg.scenario, &cfg.profiles).unwrap();
    let refs = [(20, 9_660.0), (30, 9_720.0), (40, 9_780.0)];
    let mut pass = true;
    let mut detail = String::new();
    for (n, reference) in refs {
        let mean = stats.get(HUMAN, n, Phase::Treatment).unwrap().mean_s;
        pass &= within(reference, mean, 0.05);
        detail += &format!(" n={n}: {mean:.1} s vs {reference:.0} (±5%)");
    }
    report("4 (human full-rescan second round)", pass, detail.trim());
}

#[test]
fn criterion_05_immersive_targeted_second_round() {
    let cfg = default_config();
    let stats = run_experiment(&cfg.scenario, &cfg.profiles).unwrap();
    let refs = [(20, 3_300.0), (30, 4_500.0), (40, 5_880.0)];
    let mut pass = true;
    let mut detail = String::new();
    let mut pcts = Vec::new();
    for (n, reference) in refs {
        let row = stats.get(IMMERSIVE, n, Phase::Treatment).unwrap();
        pass &= within(reference, row.mean_s, 0.15);
        pcts.push(row.pct_diff_vs_baseline.unwrap());
        detail += &format!(" n={n}: {:.1} s vs {reference:.0} (±15%)", row.mean_s);
    }
    let monotone = pcts[0].abs() > pcts[1].abs() && pcts[1].abs() > pcts[2].abs();
    pass &= monotone;
    detail += &format!(
        "; pct trend {:+.1}/{:+.1}/{:+.1}% (|.| decreasing: {monotone})",
        pcts[0], pcts[1], pcts[2]
    );
    report("5 (immersive targeted second round)", pass, &detail);
}

/// 7x8 checkerboard: 28 isolated low cells under 4-connectivity.
fn synthetic_28_zone_map() -> String {
    let mut text = String::from("#cell_size=20\n");
    for i in 0..7 {
        let row: Vec<&str> = (0..8).map(|j| if (i + j) % 2 == 0 { "1" } else { "9" }).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

#[test]
fn criterion_06_yield_survey_properties() {
    let cfg = default_config();
    let profiles = builtin_profiles();
    let mut pass = true;
    let mut detail = String::new();

    // 28-zone synthetic map: zone count, targeted < full, route touches
    // every epicenter.
    let map = load_yield_map_str(&synthetic_28_zone_map(), 20.0).unwrap();
    let zones = extract_low_yield_zones(&map, 1.0, &cfg.field);
    pass &= zones.len() == 28;
    let full = simulate_yield_survey(
        &cfg.field,
        &profiles[HUMAN],
        &zones,
        SurveyMode::FullCoverage,
        PlannerKind::NnTwoOpt,
    )
    .unwrap();
    let targeted = simulate_yield_survey(
        &cfg.field,
        &profiles[IMMERSIVE],
        &zones,
        SurveyMode::Targeted,
        PlannerKind::NnTwoOpt,
    )
    .unwrap();
    pass &= targeted.total_time < full.total_time;
    let visited_epicenters = zones
        .iter()
        .filter(|z| targeted.path.contains(&cfg.field.cartesian(z.center)))
        .count();
    pass &= visited_epicenters == 28;
    detail += &format!(
        "28-zone map: zones={}, epicenters on route={visited_epicenters}, targeted {:.0} s < full {:.0} s;",
        zones.len(),
        targeted.total_time,
        full.total_time
    );

    // Two-zone construction plus random maps: strict inequality whenever at
    // least one zone exists.
    let two_zone = "#cell_size=10\n1,9,9\n9,9,9\n9,9,1\n";
    let map2 = load_yield_map_str(two_zone, 10.0).unwrap();
    let zones2 = extract_low_yield_zones(&map2, 1.0, &cfg.field);
    assert_eq!(zones2.len(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut random_maps_ok = true;
    for _ in 0..20 {
        let mut grid = Vec::new();
        for _ in 0..6 {
            let row: Vec<String> = (0..6)
                .map(|_| if rng.gen_bool(0.2) { "1".into() } else { "9".into() })
                .collect();
            grid.push(row.join(","));
        }
        let text = format!("#cell_size=20\n{}\n", grid.join("\n"));
        let m = load_yield_map_str(&text, 20.0).unwrap();
        let zs = extract_low_yield_zones(&m, 1.0, &cfg.field);
        if zs.is_empty() {
            continue;
        }
        let f = simulate_yield_survey(
            &cfg.field,
            &profiles[HUMAN],
            &zs,
            SurveyMode::FullCoverage,
            PlannerKind::NnTwoOpt,
        )
        .unwrap();
        let t = simulate_yield_survey(
            &cfg.field,
            &profiles[IMMERSIVE],
            &zs,
            SurveyMode::Targeted,
            PlannerKind::NnTwoOpt,
        )
        .unwrap();
        random_maps_ok &= t.total_time < f.total_time;
    }
    let f2 = simulate_yield_survey(
        &cfg.field,
        &profiles[HUMAN],
        &zones2,
        SurveyMode::FullCoverage,
        PlannerKind::NnTwoOpt,
    )
    .unwrap();
    let t2 = simulate_yield_survey(
        &cfg.field,
        &profiles[IMMERSIVE],
        &zones2,
        SurveyMode::Targeted,
        PlannerKind::NnTwoOpt,
    )
    .unwrap();
    random_maps_ok &= t2.total_time < f2.total_time;
    pass &= random_maps_ok;
    detail += &format!(" targeted < full on 2-zone and random maps: {random_maps_ok};");

    // The comparison CSV reports both modes with the zone count.
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("yield.csv");
    std::fs::write(&map_path, synthetic_28_zone_map()).unwrap();
    let mut out_cfg = cfg.clone();
    out_cfg.out_dir = dir.path().join("out");
    let files = cmd_yield_survey(
        &out_cfg,
        Some(&map_path),
        Some(1.0),
        Some(20.0),
        HUMAN,
        IMMERSIVE,
    )
    .unwrap();
    let csv = std::fs::read_to_string(&files[0]).unwrap();
    let csv_ok = csv.contains("full_coverage,28,") && csv.contains("targeted,28,");
    pass &= csv_ok;
    detail += &format!(" comparison CSV lists both modes at zone_count 28: {csv_ok}");

    report("6 (yield survey properties)", pass, &detail);
}

#[test]
fn criterion_07_routing_oracle_equivalence() {
    let field = FieldPreset::Rows52x227.geometry();
    let start = FieldPoint::new(0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut ordering_ok = true;
    let mut small = 0usize;
    let mut small_equal = 0usize;
    for instance in 0..200 {
        let n = rng.gen_range(2..=8);
        let targets: Vec<FieldPoint> = generate_spots(&field, n, 0.5, 9000 + instance)
            .into_iter()
            .map(|s| s.location)
            .collect();
        let nn = plan_route(&field, start, &targets, PlannerKind::NearestNeighbor).unwrap();
        let opt = plan_route(&field, start, &targets, PlannerKind::NnTwoOpt).unwrap();
        let exact = plan_route(&field, start, &targets, PlannerKind::Exact).unwrap();
        ordering_ok &= exact.total_distance <= opt.total_distance * (1.0 + 1e-12);
        ordering_ok &= opt.total_distance <= nn.total_distance * (1.0 + 1e-12);
        if n <= 5 {
            small += 1;
            if (opt.total_distance - exact.total_distance).abs()
                <= 1e-9 * exact.total_distance.max(1.0)
            {
                small_equal += 1;
            }
        }
    }
    let rate = small_equal as f64 / small as f64;
    // The ordering is the hard requirement; the equality rate is recorded
    // and, being fixed-seed deterministic, asserted against its 60% floor.
    let detail = format!(
        "exact <= 2opt <= nn on 200 instances: {ordering_ok}; 2opt == exact at n <= 5: \
         {small_equal}/{small} ({:.0}%, floor 60%)",
        rate * 100.0
    );
    report(
        "7 (routing oracle equivalence)",
        ordering_ok && rate >= 0.60,
        &detail,
    );
}

#[test]
fn criterion_08_metric_property_suite() {
    let field = FieldPreset::Rows52x227.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut symmetric = true;
    let mut triangle = true;
    let mut same_row = true;
    for _ in 0..10_000 {
        let mut p = || {
            FieldPoint::new(
                rng.gen_range(0..field.num_rows()),
                rng.gen_range(0.0..field.row_length()),
            )
        };
        let (a, b, c) = (p(), p(), p());
        let ab = row_distance(&field, a, b);
        symmetric &= ab == row_distance(&field, b, a);
        let ac = row_distance(&field, a, c);
        let cb = row_distance(&field, c, b);
        triangle &= ab <= (ac + cb) * (1.0 + 1e-9);
        let same = FieldPoint::new(a.row, b.x);
        same_row &= row_distance(&field, a, same) == (a.x - b.x).abs();
    }
    let pass = symmetric && triangle && same_row;
    let detail = format!(
        "10,000 triples: symmetry exact {symmetric}, triangle within 1e-9 {triangle}, \
         same-row |dx| exact {same_row}"
    );
    report("8 (metric property suite)", pass, &detail);
}

#[test]
fn criterion_09_byte_identical_stats() {
    let cfg = default_config();
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let mut run_cfg = cfg.clone();
        run_cfg.out_dir = dir.path().join(name);
        cmd_run(&run_cfg, true).unwrap();
        bytes.push(std::fs::read(run_cfg.out_dir.join("stats.csv")).unwrap());
    }
    // Same run forced onto one thread.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut run_cfg = cfg.clone();
    run_cfg.out_dir = dir.path().join("single");
    pool.install(|| cmd_run(&run_cfg, true)).unwrap();
    bytes.push(std::fs::read(run_cfg.out_dir.join("stats.csv")).unwrap());

    let pass = bytes[0] == bytes[1] && bytes[0] == bytes[2];
    let detail = format!(
        "two parallel runs and one single-threaded run: {} bytes each, identical: {pass}",
        bytes[0].len()
    );
    report("9 (byte-identical stats CSV)", pass, &detail);
}

#[test]
fn criterion_10_exact_decomposition() {
    let cfg = default_config();
    let profiles = builtin_profiles();
    let mut pass = true;
    let mut checked = 0usize;
    let mut check = |r: &vinesim::phase::PhaseResult| {
        pass &= r.total_time - (r.travel_time + r.service_time + r.transition_time) == 0.0;
        checked += 1;
    };
    for seed in 0..25u64 {
        let spots = generate_spots(&cfg.field, 20 + (seed as usize % 21), 0.5, seed);
        for name in [HUMAN, IMMERSIVE, NON_IMMERSIVE] {
            let profile = &profiles[name];
            check(&simulate_scan(&cfg.field, profile, &spots));
            if profile.has_memory {
                check(
                    &simulate_treatment_targeted(
                        &cfg.field,
                        profile,
                        &spots,
                        PlannerKind::NnTwoOpt,
                    )
                    .unwrap(),
                );
            } else {
                check(&simulate_treatment_full_rescan(&cfg.field, profile, &spots).unwrap());
            }
        }
    }
    let map = load_yield_map_str(&synthetic_28_zone_map(), 20.0).unwrap();
    let zones = extract_low_yield_zones(&map, 1.0, &cfg.field);
    for mode in [SurveyMode::FullCoverage, SurveyMode::Targeted] {
        check(
            &simulate_yield_survey(
                &cfg.field,
                &profiles[IMMERSIVE],
                &zones,
                mode,
                PlannerKind::NnTwoOpt,
            )
            .unwrap(),
        );
    }
    let detail = format!("total - (travel + service + transition) == 0 on {checked} phases");
    report("10 (exact time decomposition)", pass, &detail);
}
