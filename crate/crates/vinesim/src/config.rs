//! TOML config file schema and resolution into runtime settings.
//!
//! Every section is optional; omitted keys fall back to the defaults below.
//!
//! ```toml
//! [field]
//! preset = "52x227"        # or explicit dimensions:
//! num_rows = 52
//! row_length_m = 227.0
//! row_spacing_m = 3.428    # derived from the 10-acre total when omitted
//!
//! [experiment]
//! trials = 100
//! spot_counts = [20, 30, 40]
//! p_difficult = 0.5
//! master_seed = 42
//! agents = ["human", "immersive", "non_immersive"]
//! baseline = "human"
//!
//! [agents.human]           # per-profile overrides or new profiles
//! time_easy_s = 5.0
//! time_difficult_s = 5.0
//! speed_mps = 1.25
//! row_transition_s = 5.0
//! strategy = "single_pass_both_sides"
//! has_memory = false
//!
//! [planner]
//! kind = "nn2opt"          # nn | nn2opt | exact
//!
//! [yield]
//! cell_size_m = 26.0
//! threshold = 1.0
//! file = "yield.csv"       # enables the survey table in `run`
//! # class_values = { "0" = 4.0, "1" = 1.0 }
//!
//! [output]
//! dir = "out"
//! ```

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::agents::{builtin_profiles, AgentProfile, ScanStrategy, HUMAN, IMMERSIVE, NON_IMMERSIVE};
use crate::error::{Error, Result};
use crate::experiment::ScenarioConfig;
use crate::field::{derived_spacing, FieldGeometry, FieldPreset};
use crate::routing::PlannerKind;

/// Master seed used when neither config nor CLI provides one.
pub const DEFAULT_MASTER_SEED: u64 = 15;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SPOT_COUNTS: [usize; 3] = [20, 30, 40];
pub const DEFAULT_P_DIFFICULT: f64 = 0.5;
pub const DEFAULT_YIELD_CELL_SIZE_M: f64 = 26.0;
pub const DEFAULT_YIELD_THRESHOLD: f64 = 1.0;
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub agents: BTreeMap<String, AgentSection>,
    #[serde(default)]
    pub planner: PlannerSection,
    #[serde(default, rename = "yield")]
    pub yield_map: YieldSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub preset: Option<String>,
    pub num_rows: Option<usize>,
    pub row_length_m: Option<f64>,
    pub row_spacing_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: Option<usize>,
    pub spot_counts: Option<Vec<usize>>,
    pub p_difficult: Option<f64>,
    pub master_seed: Option<u64>,
    pub agents: Option<Vec<String>>,
    pub baseline: Option<String>,
}

/// Per-agent overrides. For built-in names, omitted keys keep the built-in
/// value; new agents must provide every key.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    pub time_easy_s: Option<f64>,
    pub time_difficult_s: Option<f64>,
    pub speed_mps: Option<f64>,
    pub row_transition_s: Option<f64>,
    pub strategy: Option<ScanStrategy>,
    pub has_memory: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    pub kind: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YieldSection {
    pub cell_size_m: Option<f64>,
    pub threshold: Option<f64>,
    pub file: Option<PathBuf>,
    /// Optional ordinal-class to yield-value mapping applied after loading.
    pub class_values: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// CLI-level overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub preset: Option<FieldPreset>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
    pub planner: Option<PlannerKind>,
}

/// Yield-map settings after resolution.
#[derive(Debug, Clone)]
pub struct YieldSettings {
    pub cell_size_m: f64,
    pub threshold: f64,
    pub file: Option<PathBuf>,
    pub class_values: Option<BTreeMap<i64, f64>>,
}

/// Everything a command needs, derived from file config plus overrides.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub field: FieldGeometry,
    pub profiles: BTreeMap<String, AgentProfile>,
    pub scenario: ScenarioConfig,
    pub yield_settings: YieldSettings,
    pub out_dir: PathBuf,
}

impl ResolvedConfig {
    pub fn profile(&self, name: &str) -> Result<&AgentProfile> {
        self.profiles
            .get(name)
            .ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve_field(section: &FieldSection, preset_override: Option<FieldPreset>) -> Result<FieldGeometry> {
    let preset = match (&preset_override, &section.preset) {
        (Some(p), _) => *p,
        (None, Some(s)) => s.parse()?,
        (None, None) => FieldPreset::Rows52x227,
    };
    let base = preset.geometry();
    let num_rows = section.num_rows.unwrap_or(base.num_rows());
    let row_length = section.row_length_m.unwrap_or(base.row_length());
    let row_spacing = match section.row_spacing_m {
        Some(s) => s,
        // Keep the preset's pinned spacing while its layout is unchanged;
        // otherwise derive the spacing from the ten-acre total.
        None if num_rows == base.num_rows() && row_length == base.row_length() => {
            base.row_spacing()
        }
        None => derived_spacing(num_rows, row_length),
    };
    FieldGeometry::new(num_rows, row_length, row_spacing)
}

fn resolve_profiles(sections: &BTreeMap<String, AgentSection>) -> Result<BTreeMap<String, AgentProfile>> {
    let mut profiles = builtin_profiles();
    for (name, section) in sections {
        let base = profiles.get(name).cloned();
        let missing = |key: &str| {
            Error::Config(format!("agents.{name}: '{key}' required for a new profile"))
        };
        let profile = AgentProfile {
            name: name.clone(),
            time_easy: match (section.time_easy_s, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.time_easy,
                (None, None) => return Err(missing("time_easy_s")),
            },
            time_difficult: match (section.time_difficult_s, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.time_difficult,
                (None, None) => return Err(missing("time_difficult_s")),
            },
            speed: match (section.speed_mps, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.speed,
                (None, None) => return Err(missing("speed_mps")),
            },
            row_transition_time: match (section.row_transition_s, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.row_transition_time,
                (None, None) => return Err(missing("row_transition_s")),
            },
            scan_strategy: match (section.strategy, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.scan_strategy,
                (None, None) => return Err(missing("strategy")),
            },
            has_memory: match (section.has_memory, &base) {
                (Some(v), _) => v,
                (None, Some(b)) => b.has_memory,
                (None, None) => return Err(missing("has_memory")),
            },
        };
        if profile.speed.is_nan() || profile.speed <= 0.0 {
            return Err(Error::Config(format!(
                "agents.{name}: speed_mps must be positive"
            )));
        }
        if profile.time_easy < 0.0 || profile.time_difficult < 0.0 || profile.row_transition_time < 0.0 {
            return Err(Error::Config(format!(
                "agents.{name}: times must be non-negative"
            )));
        }
        profiles.insert(name.clone(), profile);
    }
    Ok(profiles)
}

/// Applies defaults and overrides to a file config.
pub fn resolve(file: FileConfig, overrides: &Overrides) -> Result<ResolvedConfig> {
    let field = resolve_field(&file.field, overrides.preset)?;
    let profiles = resolve_profiles(&file.agents)?;

    let planner = match (overrides.planner, &file.planner.kind) {
        (Some(p), _) => p,
        (None, Some(s)) => s.parse()?,
        (None, None) => PlannerKind::NnTwoOpt,
    };

    let exp = &file.experiment;
    let agents = exp.agents.clone().unwrap_or_else(|| {
        vec![HUMAN.to_string(), IMMERSIVE.to_string(), NON_IMMERSIVE.to_string()]
    });
    for a in &agents {
        if !profiles.contains_key(a) {
            return Err(Error::UnknownAgent(a.clone()));
        }
    }
    let baseline = exp.baseline.clone().unwrap_or_else(|| HUMAN.to_string());
    let p_difficult = exp.p_difficult.unwrap_or(DEFAULT_P_DIFFICULT);
    if !(0.0..=1.0).contains(&p_difficult) {
        return Err(Error::Config(format!(
            "experiment.p_difficult must be in [0, 1] (got {p_difficult})"
        )));
    }
    let trials = overrides
        .trials
        .or(exp.trials)
        .unwrap_or(DEFAULT_TRIALS);
    if trials < 1 {
        return Err(Error::Config("experiment.trials must be >= 1".into()));
    }
    let spot_counts = exp
        .spot_counts
        .clone()
        .unwrap_or_else(|| DEFAULT_SPOT_COUNTS.to_vec());
    if spot_counts.is_empty() {
        return Err(Error::Config("experiment.spot_counts must be non-empty".into()));
    }
    let master_seed = overrides
        .seed
        .or(exp.master_seed)
        .unwrap_or(DEFAULT_MASTER_SEED);

    let scenario = ScenarioConfig {
        field: field.clone(),
        spot_counts,
        trials,
        p_difficult,
        master_seed,
        agents,
        baseline,
        planner,
    };

    let class_values = match &file.yield_map.class_values {
        None => None,
        Some(raw) => {
            let mut table = BTreeMap::new();
            for (k, &v) in raw {
                let class: i64 = k.parse().map_err(|_| {
                    Error::Config(format!("yield.class_values key '{k}' is not an integer"))
                })?;
                table.insert(class, v);
            }
            Some(table)
        }
    };
    let yield_settings = YieldSettings {
        cell_size_m: file
            .yield_map
            .cell_size_m
            .unwrap_or(DEFAULT_YIELD_CELL_SIZE_M),
        threshold: file.yield_map.threshold.unwrap_or(DEFAULT_YIELD_THRESHOLD),
        file: file.yield_map.file.clone(),
        class_values,
    };
    if yield_settings.cell_size_m.is_nan() || yield_settings.cell_size_m <= 0.0 {
        return Err(Error::Config("yield.cell_size_m must be positive".into()));
    }

    let out_dir = overrides
        .out
        .clone()
        .or(file.output.dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    Ok(ResolvedConfig {
        field,
        profiles,
        scenario,
        yield_settings,
        out_dir,
    })
}

/// Loads the optional config file and resolves it with overrides.
pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<ResolvedConfig> {
    let file = match path {
        Some(p) => load_file_config(p)?,
        None => FileConfig::default(),
    };
    resolve(file, overrides)
}
