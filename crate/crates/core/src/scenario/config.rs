//! World and payoff configuration files (TOML).
//!
//! A world file has a `[world]` table with [`WorldConfig`] keys and optional
//! `[hyperparameters]` and `[evaluation]` tables. A payoff file has the four
//! tables `callee`, `caller`, `neighborFixed` and `neighborExplained`:
//!
//! ```toml
//! [callee.known.answer]
//! casual = 0.50
//! urgent = 1.00
//! [caller.ignore]
//! casual = -0.50
//! urgent = -1.00
//! [neighborFixed.answer]
//! ER = 1.00
//! H = 0.67
//! # ...
//! [neighborExplained.answer.ignore]   # callee action, then neighbor expectation
//! ER = -1.00
//! # ...
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use super::{LocationKind, RelationshipClass};
use crate::explanation::FollowMode;
use crate::norm::{Action, Hyperparameters};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration {path}:\n  {}", problems.join("\n  "))]
    Invalid { path: PathBuf, problems: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct RelationshipProbs {
    pub family: f64,
    pub friend: f64,
    pub colleague: f64,
    pub stranger: f64,
}

impl Default for RelationshipProbs {
    fn default() -> Self {
        Self { family: 0.25, friend: 0.25, colleague: 0.25, stranger: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct WorldConfig {
    pub num_agents: usize,
    pub homes: usize,
    pub parties: usize,
    pub meetings: usize,
    pub libraries: usize,
    pub emergency_rooms: usize,
    pub stay_mean: f64,
    pub stay_sd: f64,
    pub stay_clamp: [u32; 2],
    pub own_circle_location_prob: f64,
    pub call_prob_mean: f64,
    pub call_prob_sd: f64,
    /// Draw a fresh call probability every step instead of once per agent.
    pub redraw_call_prob_each_step: bool,
    pub relationship_category_prob: RelationshipProbs,
    pub urgent_prob: f64,
    pub steps: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            num_agents: 40,
            homes: 10,
            parties: 4,
            meetings: 4,
            libraries: 1,
            emergency_rooms: 1,
            stay_mean: 60.0,
            stay_sd: 30.0,
            stay_clamp: [30, 90],
            own_circle_location_prob: 0.75,
            call_prob_mean: 0.05,
            call_prob_sd: 0.01,
            redraw_call_prob_each_step: false,
            relationship_category_prob: RelationshipProbs::default(),
            urgent_prob: 0.5,
            steps: 10_000,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.num_agents < 2 {
            problems.push(format!("world.numAgents = {} must be at least 2", self.num_agents));
        }
        for (name, n) in [("homes", self.homes), ("parties", self.parties), ("meetings", self.meetings)] {
            if n == 0 {
                problems.push(format!("world.{name} must be at least 1"));
            }
        }
        let probs = [
            ("ownCircleLocationProb", self.own_circle_location_prob),
            ("callProbMean", self.call_prob_mean),
            ("urgentProb", self.urgent_prob),
            ("relationshipCategoryProb.family", self.relationship_category_prob.family),
            ("relationshipCategoryProb.friend", self.relationship_category_prob.friend),
            ("relationshipCategoryProb.colleague", self.relationship_category_prob.colleague),
            ("relationshipCategoryProb.stranger", self.relationship_category_prob.stranger),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                problems.push(format!("world.{name} = {p} is not in [0, 1]"));
            }
        }
        let r = &self.relationship_category_prob;
        if r.family + r.friend + r.colleague + r.stranger <= 0.0 {
            problems.push("world.relationshipCategoryProb must have positive total weight".into());
        }
        if self.call_prob_sd < 0.0 || self.stay_sd < 0.0 {
            problems.push("world standard deviations must be non-negative".into());
        }
        let [lo, hi] = self.stay_clamp;
        if lo == 0 || lo > hi {
            problems.push(format!("world.stayClamp = [{lo}, {hi}] must satisfy 1 <= lo <= hi"));
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub follow_mode: FollowMode,
    /// Fraction of an antecedent's contexts an agent must act on as the
    /// norm prescribes to count as complying.
    pub adoption_compliance_fraction: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self { follow_mode: FollowMode::Generalized, adoption_compliance_fraction: 1.0 }
    }
}

/// Everything a world file can configure.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub world: WorldConfig,
    #[serde(default)]
    pub hyperparameters: Hyperparameters,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
}

impl SimulationConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.into(), message: e.to_string() })?;
        let mut problems = cfg.world.validate();
        problems.extend(cfg.hyperparameters.validate());
        let f = cfg.evaluation.adoption_compliance_fraction;
        if !(f > 0.0 && f <= 1.0) {
            problems.push(format!("evaluation.adoptionComplianceFraction = {f} is not in (0, 1]"));
        }
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid { path: path.into(), problems })
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })
}

/// Payoffs for every stakeholder role. Actions index as ring/answer = 0,
/// ignore = 1; urgency as casual = 0, urgent = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTables {
    /// `[relationship class][action][urgency]`
    pub callee: [[[f64; 2]; 2]; 2],
    /// `[action][urgency]`
    pub caller: [[f64; 2]; 2],
    /// `[action][location]`
    pub neighbor_fixed: [[f64; 5]; 2],
    /// `[action][expected action][location]`
    pub neighbor_explained: [[[f64; 5]; 2]; 2],
}

pub const DEFAULT_PAYOFFS_TOML: &str = include_str!("../../configs/payoffs_default.toml");
pub const APPENDIX_PAYOFFS_TOML: &str = include_str!("../../configs/payoffs_appendix.toml");
pub const DEFAULT_WORLD_TOML: &str = include_str!("../../configs/world_default.toml");

const ACTION_KEYS: [&str; 2] = ["answer", "ignore"];
const URGENCY_KEYS: [&str; 2] = ["casual", "urgent"];
const CLASS_KEYS: [&str; 2] = ["known", "stranger"];

impl Default for PayoffTables {
    /// The default callee, caller and neighbor payoffs.
    fn default() -> Self {
        let agree = [1.00, 0.67, 1.00, 1.00, 0.67];
        let disagree = [-1.00, -0.33, -1.00, -1.00, -0.33];
        Self {
            callee: [[[0.50, 1.00], [0.00, -0.50]], [[-1.50, 0.50], [1.50, -0.25]]],
            caller: [[0.50, 1.00], [-0.50, -1.00]],
            neighbor_fixed: [[1.00, 0.67, -1.00, -1.00, -0.33], [-1.00, -0.33, 1.00, 1.00, 0.67]],
            neighbor_explained: [[agree, disagree], [disagree, agree]],
        }
    }
}

impl PayoffTables {
    /// The alternate payoff set: identical except for stranger callee payoffs.
    pub fn appendix() -> Self {
        Self::parse(APPENDIX_PAYOFFS_TOML, Path::new("payoffs_appendix.toml")).expect("shipped file is valid")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&read(path)?, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let root: Table =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.into(), message: e.to_string() })?;
        let mut problems = Vec::new();
        let mut out = Self {
            callee: [[[0.0; 2]; 2]; 2],
            caller: [[0.0; 2]; 2],
            neighbor_fixed: [[0.0; 5]; 2],
            neighbor_explained: [[[0.0; 5]; 2]; 2],
        };
        for key in root.keys() {
            if !["callee", "caller", "neighborFixed", "neighborExplained"].contains(&key.as_str()) {
                problems.push(format!("unknown table `{key}`"));
            }
        }
        let loc_keys: Vec<&str> = LocationKind::ALL.iter().map(|l| l.code()).collect();

        for (ci, class) in CLASS_KEYS.iter().enumerate() {
            for (ai, act) in ACTION_KEYS.iter().enumerate() {
                let path = ["callee", class, act];
                let cells = read_row(&root, &path, &URGENCY_KEYS, &mut problems);
                out.callee[ci][ai].copy_from_slice(&cells);
            }
        }
        for (ai, act) in ACTION_KEYS.iter().enumerate() {
            let cells = read_row(&root, &["caller", act], &URGENCY_KEYS, &mut problems);
            out.caller[ai].copy_from_slice(&cells);
            let cells = read_row(&root, &["neighborFixed", act], &loc_keys, &mut problems);
            out.neighbor_fixed[ai].copy_from_slice(&cells);
            for (ei, exp) in ACTION_KEYS.iter().enumerate() {
                let cells = read_row(&root, &["neighborExplained", act, exp], &loc_keys, &mut problems);
                out.neighbor_explained[ai][ei].copy_from_slice(&cells);
            }
        }
        check_keys(&root, &["callee"], &CLASS_KEYS, &mut problems);
        for class in CLASS_KEYS {
            check_keys(&root, &["callee", class], &ACTION_KEYS, &mut problems);
        }
        for table in ["caller", "neighborFixed", "neighborExplained"] {
            check_keys(&root, &[table], &ACTION_KEYS, &mut problems);
        }
        for act in ACTION_KEYS {
            check_keys(&root, &["neighborExplained", act], &ACTION_KEYS, &mut problems);
        }
        // A missing parent table is met once per row below it.
        let mut seen = std::collections::HashSet::new();
        problems.retain(|p| seen.insert(p.clone()));
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(ConfigError::Invalid { path: path.into(), problems })
        }
    }

    pub fn callee_payoff(&self, class: RelationshipClass, action: Action, urgent: bool) -> f64 {
        self.callee[class as usize][action.index()][urgent as usize]
    }

    pub fn caller_payoff(&self, action: Action, urgent: bool) -> f64 {
        self.caller[action.index()][urgent as usize]
    }

    pub fn neighbor_fixed_payoff(&self, action: Action, loc: LocationKind) -> f64 {
        self.neighbor_fixed[action.index()][loc as usize]
    }

    pub fn neighbor_explained_payoff(&self, action: Action, expected: Action, loc: LocationKind) -> f64 {
        self.neighbor_explained[action.index()][expected.index()][loc as usize]
    }
}

/// Flags keys of the table at `path` outside `allowed`.
fn check_keys(root: &Table, path: &[&str], allowed: &[&str], problems: &mut Vec<String>) {
    let mut table = root;
    for key in path {
        match table.get(*key) {
            Some(Value::Table(t)) => table = t,
            _ => return,
        }
    }
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            problems.push(format!("unknown table `{}.{key}`", path.join(".")));
        }
    }
}

/// Reads `cells` under the nested table at `path`, recording gaps, extra
/// keys and non-numeric values in `problems`.
fn read_row(root: &Table, path: &[&str], cells: &[&str], problems: &mut Vec<String>) -> Vec<f64> {
    let mut out = vec![0.0; cells.len()];
    let mut table = root;
    for (depth, key) in path.iter().enumerate() {
        match table.get(*key) {
            Some(Value::Table(t)) => table = t,
            Some(_) => {
                problems.push(format!("`{}` must be a table", path[..=depth].join(".")));
                return out;
            }
            None => {
                problems.push(format!("missing table `{}`", path[..=depth].join(".")));
                return out;
            }
        }
    }
    let dotted = path.join(".");
    for (i, cell) in cells.iter().enumerate() {
        match table.get(*cell) {
            Some(Value::Float(v)) => out[i] = *v,
            Some(Value::Integer(v)) => out[i] = *v as f64,
            Some(_) => problems.push(format!("`{dotted}.{cell}` must be a number")),
            None => problems.push(format!("missing entry `{dotted}.{cell}`")),
        }
    }
    for key in table.keys() {
        if !cells.contains(&key.as_str()) {
            problems.push(format!("unknown entry `{dotted}.{key}`"));
        }
    }
    out
}
