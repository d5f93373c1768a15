//! Contexts, norms and classifiers.
//!
//! A [`ContextSchema`] fixes the contextual properties and their value sets.
//! Keys and values are kept in lexicographic order, so a property is
//! addressed by its position and a value by its index within the property.
//! [`Context`] is a full assignment, [`Antecedent`] a partial one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormError {
    #[error("schema mismatch: expected {expected} properties, got {got}")]
    SchemaMismatch { expected: usize, got: usize },
    #[error("unknown property `{0}`")]
    UnknownKey(String),
    #[error("unknown value `{value}` for property `{key}`")]
    UnknownValue { key: String, value: String },
    #[error("property `{0}` bound more than once")]
    DuplicateKey(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("malformed norm text `{0}`")]
    Malformed(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub key: String,
    pub values: Vec<String>,
}

/// Ordered contextual properties plus the scenario's action set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSchema {
    properties: Vec<Property>,
    actions: Vec<String>,
}

impl ContextSchema {
    /// Builds a schema. Properties and their values are sorted
    /// lexicographically; actions keep the given order, which is also the
    /// tie-break order for greedy selection.
    pub fn new<K, V, A>(properties: Vec<(K, Vec<V>)>, actions: Vec<A>) -> Result<Self, NormError>
    where
        K: Into<String>,
        V: Into<String>,
        A: Into<String>,
    {
        let mut props: Vec<Property> = properties
            .into_iter()
            .map(|(k, vs)| {
                let mut values: Vec<String> = vs.into_iter().map(Into::into).collect();
                values.sort();
                Property { key: k.into(), values }
            })
            .collect();
        props.sort_by(|a, b| a.key.cmp(&b.key));
        for w in props.windows(2) {
            if w[0].key == w[1].key {
                return Err(NormError::DuplicateKey(w[0].key.clone()));
            }
        }
        for p in &props {
            if p.values.is_empty() {
                return Err(NormError::InvalidSchema(format!("property `{}` has no values", p.key)));
            }
            if p.values.windows(2).any(|w| w[0] == w[1]) {
                return Err(NormError::InvalidSchema(format!("property `{}` repeats a value", p.key)));
            }
            if p.values.len() > u8::MAX as usize {
                return Err(NormError::InvalidSchema(format!("property `{}` has too many values", p.key)));
            }
        }
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        if actions.is_empty() {
            return Err(NormError::InvalidSchema("no actions".into()));
        }
        Ok(Self { properties: props, actions })
    }

    /// The phone-ringer schema: callee location, caller relationship, urgency.
    pub fn ringer() -> Self {
        Self::new(
            vec![
                ("calleeLoc", vec!["ER", "H", "L", "M", "P"]),
                ("callerRel", vec!["family", "friend", "colleague", "stranger"]),
                ("urgent", vec!["true", "false"]),
            ],
            vec!["ring", "ignore"],
        )
        .expect("ringer schema is well formed")
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn key_index(&self, key: &str) -> Result<usize, NormError> {
        self.properties
            .iter()
            .position(|p| p.key == key)
            .ok_or_else(|| NormError::UnknownKey(key.to_string()))
    }

    pub fn value_index(&self, key: usize, value: &str) -> Result<u8, NormError> {
        let prop = &self.properties[key];
        prop.values
            .iter()
            .position(|v| v == value)
            .map(|i| i as u8)
            .ok_or_else(|| NormError::UnknownValue { key: prop.key.clone(), value: value.to_string() })
    }

    pub fn action(&self, name: &str) -> Result<Action, NormError> {
        self.actions
            .iter()
            .position(|a| a == name)
            .map(|i| Action(i as u8))
            .ok_or_else(|| NormError::UnknownAction(name.to_string()))
    }

    pub fn action_name(&self, action: Action) -> &str {
        &self.actions[action.index()]
    }

    pub fn all_actions(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.actions.len()).map(|i| Action(i as u8))
    }

    pub fn context_count(&self) -> usize {
        self.properties.iter().map(|p| p.values.len()).product()
    }

    pub fn antecedent_count(&self) -> usize {
        self.properties.iter().map(|p| p.values.len() + 1).product()
    }

    /// Builds a context from `(key, value)` names in any order.
    pub fn context(&self, pairs: &[(&str, &str)]) -> Result<Context, NormError> {
        let ante = self.antecedent(pairs)?;
        if ante.len() != self.len() {
            return Err(NormError::SchemaMismatch { expected: self.len(), got: ante.len() });
        }
        Ok(Context(ante.0.iter().map(|v| v.expect("fully bound")).collect()))
    }

    /// Builds an antecedent from `(key, value)` names in any order.
    pub fn antecedent(&self, pairs: &[(&str, &str)]) -> Result<Antecedent, NormError> {
        let mut slots = vec![None; self.len()];
        for (k, v) in pairs {
            let ki = self.key_index(k)?;
            if slots[ki].is_some() {
                return Err(NormError::DuplicateKey(k.to_string()));
            }
            slots[ki] = Some(self.value_index(ki, v)?);
        }
        Ok(Antecedent(slots))
    }

    pub fn norm(&self, pairs: &[(&str, &str)], action: &str) -> Result<Norm, NormError> {
        Ok(Norm { antecedent: self.antecedent(pairs)?, consequent: self.action(action)? })
    }

    /// All full contexts in lexicographic order (first property varies slowest).
    pub fn enumerate_contexts(&self) -> Vec<Context> {
        let mut out = Vec::with_capacity(self.context_count());
        let mut cursor = vec![0u8; self.len()];
        loop {
            out.push(Context(cursor.clone()));
            let mut i = self.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cursor[i] += 1;
                if (cursor[i] as usize) < self.properties[i].values.len() {
                    break;
                }
                cursor[i] = 0;
            }
        }
    }

    /// Every antecedent (each property unbound or bound to one value).
    pub fn enumerate_antecedents(&self) -> Vec<Antecedent> {
        let mut out = Vec::with_capacity(self.antecedent_count());
        let mut cursor: Vec<Option<u8>> = vec![None; self.len()];
        loop {
            out.push(Antecedent(cursor.clone()));
            let mut i = self.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                let next = match cursor[i] {
                    None => Some(0),
                    Some(v) if (v as usize + 1) < self.properties[i].values.len() => Some(v + 1),
                    Some(_) => None,
                };
                cursor[i] = next;
                if next.is_some() {
                    break;
                }
            }
        }
    }

    /// Every norm: each antecedent paired with each action.
    pub fn enumerate_norms(&self) -> Vec<Norm> {
        let antecedents = self.enumerate_antecedents();
        let mut out = Vec::with_capacity(antecedents.len() * self.num_actions());
        for a in antecedents {
            for act in self.all_actions() {
                out.push(Norm { antecedent: a.clone(), consequent: act });
            }
        }
        out
    }

    /// Canonical text of an antecedent: `k=v & k=v` with sorted keys, or `true`.
    pub fn format_antecedent(&self, ante: &Antecedent) -> String {
        let parts: Vec<String> = ante
            .pairs()
            .map(|(k, v)| {
                let p = &self.properties[k];
                format!("{}={}", p.key, p.values[v as usize])
            })
            .collect();
        if parts.is_empty() {
            "true".to_string()
        } else {
            parts.join(" & ")
        }
    }

    /// Canonical norm text, `<antecedent> -> <action>`.
    pub fn format_norm(&self, norm: &Norm) -> String {
        format!("{} -> {}", self.format_antecedent(&norm.antecedent), self.action_name(norm.consequent))
    }

    pub fn format_context(&self, ctx: &Context) -> String {
        self.format_antecedent(&ctx.to_antecedent())
    }

    pub fn parse_antecedent(&self, text: &str) -> Result<Antecedent, NormError> {
        let text = text.trim();
        if text == "true" {
            return Ok(Antecedent::empty(self.len()));
        }
        let mut pairs = Vec::new();
        for part in text.split(" & ") {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| NormError::Malformed(text.to_string()))?;
            if k.is_empty() || v.is_empty() || k.contains(char::is_whitespace) {
                return Err(NormError::Malformed(text.to_string()));
            }
            pairs.push((k, v));
        }
        self.antecedent(&pairs)
    }

    pub fn parse_norm(&self, text: &str) -> Result<Norm, NormError> {
        let (ante, act) = text
            .rsplit_once(" -> ")
            .ok_or_else(|| NormError::Malformed(text.to_string()))?;
        Ok(Norm { antecedent: self.parse_antecedent(ante)?, consequent: self.action(act.trim())? })
    }
}

/// Index into the schema's action list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action(pub u8);

impl Action {
    pub const RING: Action = Action(0);
    pub const IGNORE: Action = Action(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A full assignment: one value index per schema property.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context(Vec<u8>);

impl Context {
    pub fn from_indices(values: Vec<u8>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn value(&self, key: usize) -> u8 {
        self.0[key]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_antecedent(&self) -> Antecedent {
        Antecedent(self.0.iter().map(|&v| Some(v)).collect())
    }
}

/// A conjunction of key-value pairs, at most one value per key.
/// Slot `i` holds the bound value of property `i`, or `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antecedent(Vec<Option<u8>>);

impl Antecedent {
    pub fn empty(len: usize) -> Self {
        Self(vec![None; len])
    }

    pub fn from_slots(slots: Vec<Option<u8>>) -> Self {
        Self(slots)
    }

    pub fn slots(&self) -> &[Option<u8>] {
        &self.0
    }

    pub(crate) fn slots_mut(&mut self) -> &mut [Option<u8>] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of bound pairs.
    pub fn specificity(&self) -> usize {
        self.0.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_true(&self) -> bool {
        self.specificity() == 0
    }

    pub fn get(&self, key: usize) -> Option<u8> {
        self.0[key]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.0.iter().enumerate().filter_map(|(k, v)| v.map(|v| (k, v)))
    }

    /// True iff every bound pair agrees with `ctx`.
    pub fn matches(&self, ctx: &Context) -> Result<bool, NormError> {
        if self.0.len() != ctx.0.len() {
            return Err(NormError::SchemaMismatch { expected: ctx.0.len(), got: self.0.len() });
        }
        Ok(self.holds_in(ctx))
    }

    #[inline]
    pub(crate) fn holds_in(&self, ctx: &Context) -> bool {
        self.0.iter().zip(&ctx.0).all(|(a, c)| a.is_none_or(|a| a == *c))
    }

    /// True iff this pair-set is a subset of `other`'s (equal counts).
    #[inline]
    pub fn is_subset_of(&self, other: &Antecedent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.is_none() || a == b)
    }

    /// Strict generality: this pair-set is a proper subset of `other`'s.
    pub fn is_more_general(&self, other: &Antecedent) -> bool {
        self.is_subset_of(other) && self.specificity() < other.specificity()
    }

    /// Pair-set union; on conflicting bindings `self` wins.
    pub fn union(&self, other: &Antecedent) -> Antecedent {
        Antecedent(self.0.iter().zip(&other.0).map(|(a, b)| a.or(*b)).collect())
    }
}

/// `IF antecedent THEN consequent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Norm {
    pub antecedent: Antecedent,
    pub consequent: Action,
}

impl Norm {
    pub fn new(antecedent: Antecedent, consequent: Action) -> Self {
        Self { antecedent, consequent }
    }
}

/// Learning parameters of one macro-classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    pub prediction: f64,
    pub error: f64,
    pub fitness: f64,
    pub numerosity: u32,
    pub experience: u64,
    pub action_set_size: f64,
    pub last_ga_step: u64,
}

impl ClassifierParams {
    /// Parameters of a freshly covered rule.
    pub fn covering(step: u64) -> Self {
        Self {
            prediction: 0.01,
            error: 0.0,
            fitness: 0.01,
            numerosity: 1,
            experience: 0,
            action_set_size: 1.0,
            last_ga_step: step,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub norm: Norm,
    pub params: ClassifierParams,
    /// Creation order within the owning population; smaller is older.
    pub id: u64,
}

impl Classifier {
    pub fn antecedent(&self) -> &Antecedent {
        &self.norm.antecedent
    }

    pub fn action(&self) -> Action {
        self.norm.consequent
    }
}

/// XCS hyperparameters. Defaults are the standard settings with a
/// population cap of 30 micro-classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub max_micro_population: u32,
    pub dont_care_prob: f64,
    pub error_threshold: f64,
    pub fitness_exponent: f64,
    pub learning_rate: f64,
    pub scaling_factor: f64,
    pub ga_threshold: f64,
    pub mutation_prob: f64,
    pub crossover_prob: f64,
    pub deletion_experience_threshold: u64,
    pub subsumption_experience_threshold: u64,
    pub fitness_falloff: f64,
    pub explore_prob: f64,
    pub tournament_fraction: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            max_micro_population: 30,
            dont_care_prob: 0.3,
            error_threshold: 0.01,
            fitness_exponent: 5.0,
            learning_rate: 0.1,
            scaling_factor: 0.1,
            ga_threshold: 25.0,
            mutation_prob: 0.4,
            crossover_prob: 0.8,
            deletion_experience_threshold: 20,
            subsumption_experience_threshold: 20,
            fitness_falloff: 0.1,
            explore_prob: 0.1,
            tournament_fraction: 0.3,
        }
    }
}

impl Hyperparameters {
    /// Lists every violated constraint.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let probs = [
            ("dontCareProb", self.dont_care_prob),
            ("mutationProb", self.mutation_prob),
            ("crossoverProb", self.crossover_prob),
            ("exploreProb", self.explore_prob),
            ("tournamentFraction", self.tournament_fraction),
            ("fitnessFalloff", self.fitness_falloff),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                problems.push(format!("hyperparameters.{name} = {p} is not in [0, 1]"));
            }
        }
        if self.max_micro_population < 1 {
            problems.push("hyperparameters.maxMicroPopulation must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            problems.push(format!("hyperparameters.learningRate = {} is not in (0, 1]", self.learning_rate));
        }
        if !(self.error_threshold > 0.0) {
            problems.push(format!("hyperparameters.errorThreshold = {} must be > 0", self.error_threshold));
        }
        problems
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "action#{}", self.0)
    }
}
