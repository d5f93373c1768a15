//! Accuracy-based rule learning over a population of norms.
//!
//! One [`Population`] belongs to one agent. Match and action sets refer to
//! classifiers by id, so they stay meaningful across insertions; members that
//! disappear (subsumed or deleted) are simply skipped.

mod deletion;
mod discovery;

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::norm::{Action, Antecedent, Classifier, ClassifierParams, Context, ContextSchema, Hyperparameters, Norm};

pub use discovery::{crossover, mutate, tournament_select};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("prediction array is empty; cover the context before selecting")]
    EmptyPredictionArray,
    #[error("action set is empty")]
    EmptyActionSet,
}

/// Classifiers matching one context.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSet {
    pub ids: Vec<u64>,
}

/// Match-set members supporting one action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    pub action: Action,
    pub ids: Vec<u64>,
}

impl ActionSet {
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Fitness-weighted prediction per supported action.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionArray {
    entries: Vec<Option<PaEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaEntry {
    pub value: f64,
    pub total_fitness: f64,
}

impl PredictionArray {
    /// Aggregates `(action, prediction, fitness)` triples. Supporters whose
    /// fitness sums to zero yield a value of 0.
    pub fn from_supporters<I>(num_actions: usize, supporters: I) -> Self
    where
        I: IntoIterator<Item = (Action, f64, f64)>,
    {
        let mut sums = vec![None::<(f64, f64)>; num_actions];
        for (a, p, f) in supporters {
            let e = sums[a.index()].get_or_insert((0.0, 0.0));
            e.0 += p * f;
            e.1 += f;
        }
        let entries = sums
            .into_iter()
            .map(|s| {
                s.map(|(pf, f)| PaEntry { value: if f > 0.0 { pf / f } else { 0.0 }, total_fitness: f })
            })
            .collect();
        Self { entries }
    }

    pub fn get(&self, action: Action) -> Option<f64> {
        self.entries.get(action.index()).copied().flatten().map(|e| e.value)
    }

    pub fn entry(&self, action: Action) -> Option<PaEntry> {
        self.entries.get(action.index()).copied().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(Option::is_none)
    }

    pub fn supported(&self) -> impl Iterator<Item = (Action, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|e| (Action(i as u8), e.value)))
    }

    pub fn num_supported(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// Argmax; ties resolve to the earliest action in schema order.
    pub fn best(&self) -> Option<Action> {
        let mut best: Option<(Action, f64)> = None;
        for (a, v) in self.supported() {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((a, v));
            }
        }
        best.map(|(a, _)| a)
    }

    /// Argmax; a tie involving `preferred` resolves to `preferred`.
    pub fn best_preferring(&self, preferred: Action) -> Option<Action> {
        let best = self.best()?;
        match (self.get(best), self.get(preferred)) {
            (Some(b), Some(p)) if p >= b => Some(preferred),
            _ => Some(best),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explore,
    Exploit,
}

/// Greedy choice in exploit mode, uniform over every action in explore mode.
pub fn select_action<R: Rng + ?Sized>(
    pa: &PredictionArray,
    mode: Mode,
    num_actions: usize,
    rng: &mut R,
) -> Result<Action, EngineError> {
    if pa.is_empty() {
        return Err(EngineError::EmptyPredictionArray);
    }
    match mode {
        Mode::Exploit => Ok(pa.best().expect("non-empty")),
        Mode::Explore => Ok(Action(rng.random_range(0..num_actions) as u8)),
    }
}

/// Accuracy of a rule with prediction error `error`.
pub fn accuracy(error: f64, hp: &Hyperparameters) -> f64 {
    if error < hp.error_threshold {
        1.0
    } else {
        hp.scaling_factor * (error / hp.error_threshold).powf(-hp.fitness_exponent)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Population {
    classifiers: Vec<Classifier>,
    next_id: u64,
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn classifiers(&self) -> &[Classifier] {
        &self.classifiers
    }

    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    /// Total numerosity.
    pub fn micro_size(&self) -> u32 {
        self.classifiers.iter().map(|c| c.params.numerosity).sum()
    }

    pub fn get(&self, id: u64) -> Option<&Classifier> {
        self.classifiers.iter().find(|c| c.id == id)
    }

    pub fn get_mut(&mut self, id: u64) -> Option<&mut Classifier> {
        self.classifiers.iter_mut().find(|c| c.id == id)
    }

    pub fn find(&self, norm: &Norm) -> Option<&Classifier> {
        self.classifiers.iter().find(|c| &c.norm == norm)
    }

    /// Adds a classifier, merging into an existing one with the same norm.
    /// Returns the id holding the norm. Does not enforce the size cap.
    pub fn insert(&mut self, norm: Norm, params: ClassifierParams) -> u64 {
        if let Some(c) = self.classifiers.iter_mut().find(|c| c.norm == norm) {
            c.params.numerosity += params.numerosity;
            return c.id;
        }
        let id = self.next_id;
        self.next_id += 1;
        self.classifiers.push(Classifier { norm, params, id });
        id
    }

    pub(crate) fn remove(&mut self, id: u64) -> Option<Classifier> {
        let pos = self.classifiers.iter().position(|c| c.id == id)?;
        Some(self.classifiers.remove(pos))
    }

    pub fn match_set(&self, ctx: &Context) -> MatchSet {
        MatchSet {
            ids: self.classifiers.iter().filter(|c| c.antecedent().holds_in(ctx)).map(|c| c.id).collect(),
        }
    }

    /// Classifiers whose antecedent holds under a partial observation,
    /// i.e. whose pairs are all among the observed pairs.
    pub fn match_set_observed(&self, observed: &Antecedent) -> MatchSet {
        MatchSet {
            ids: self.classifiers.iter().filter(|c| c.antecedent().is_subset_of(observed)).map(|c| c.id).collect(),
        }
    }

    fn members<'a>(&'a self, ids: &'a [u64]) -> impl Iterator<Item = &'a Classifier> + 'a {
        ids.iter().filter_map(move |&id| self.get(id))
    }

    fn distinct_actions(&self, ms: &MatchSet, num_actions: usize) -> Vec<bool> {
        let mut present = vec![false; num_actions];
        for c in self.members(&ms.ids) {
            present[c.action().index()] = true;
        }
        present
    }

    /// Adds one random matching rule per action missing from the match set
    /// until every action has support. Enforces the population cap after
    /// each round; members removed by deletion are dropped from `ms`.
    pub fn cover<R: Rng + ?Sized>(
        &mut self,
        ms: &mut MatchSet,
        ctx: &Context,
        num_actions: usize,
        step: u64,
        hp: &Hyperparameters,
        rng: &mut R,
    ) {
        loop {
            let present = self.distinct_actions(ms, num_actions);
            let missing: Vec<usize> = (0..num_actions).filter(|&a| !present[a]).collect();
            if missing.is_empty() {
                return;
            }
            for a in missing {
                let slots = ctx
                    .values()
                    .iter()
                    .map(|&v| if rng.random_bool(hp.dont_care_prob) { None } else { Some(v) })
                    .collect();
                let norm = Norm::new(Antecedent::from_slots(slots), Action(a as u8));
                let id = self.insert(norm, ClassifierParams::covering(step));
                if !ms.ids.contains(&id) {
                    ms.ids.push(id);
                }
            }
            self.delete_excess(hp, rng);
            ms.ids.retain(|&id| self.get(id).is_some());
        }
    }

    pub fn prediction_array(&self, ms: &MatchSet, num_actions: usize) -> PredictionArray {
        PredictionArray::from_supporters(
            num_actions,
            self.members(&ms.ids).map(|c| (c.action(), c.params.prediction, c.params.fitness)),
        )
    }

    pub fn action_set(&self, ms: &MatchSet, action: Action) -> ActionSet {
        ActionSet {
            action,
            ids: self.members(&ms.ids).filter(|c| c.action() == action).map(|c| c.id).collect(),
        }
    }

    /// The distinct norms of an action set.
    pub fn action_set_norms(&self, aset: &ActionSet) -> Vec<Norm> {
        self.members(&aset.ids).map(|c| c.norm.clone()).collect()
    }

    /// Numerosity-weighted normalized accuracies `κ·n / Σ κ·n` of the set.
    pub fn relative_accuracies(&self, aset: &ActionSet, hp: &Hyperparameters) -> Vec<(u64, f64)> {
        let raw: Vec<(u64, f64)> = self
            .members(&aset.ids)
            .map(|c| (c.id, accuracy(c.params.error, hp) * c.params.numerosity as f64))
            .collect();
        let total: f64 = raw.iter().map(|(_, k)| k).sum();
        raw.into_iter().map(|(id, k)| (id, k / total)).collect()
    }

    /// Reward credit for the action set: experience, error against the
    /// pre-update prediction, prediction, set-size estimate, then fitness
    /// toward normalized accuracy.
    pub fn update_action_set(&mut self, aset: &ActionSet, reward: f64, hp: &Hyperparameters) -> Result<(), EngineError> {
        let set_size: u32 = self.members(&aset.ids).map(|c| c.params.numerosity).sum();
        if set_size == 0 {
            return Err(EngineError::EmptyActionSet);
        }
        let beta = hp.learning_rate;
        for &id in &aset.ids {
            if let Some(c) = self.get_mut(id) {
                let p = &mut c.params;
                p.experience += 1;
                let p_old = p.prediction;
                p.error += beta * ((reward - p_old).abs() - p.error);
                p.prediction += beta * (reward - p_old);
                p.action_set_size += beta * (set_size as f64 - p.action_set_size);
            }
        }
        for (id, k_rel) in self.relative_accuracies(aset, hp) {
            let c = self.get_mut(id).expect("member present");
            c.params.fitness += beta * (k_rel - c.params.fitness);
        }
        Ok(())
    }

    /// Text dump, one classifier per line in population order.
    pub fn dump(&self, schema: &ContextSchema) -> String {
        let mut out = String::new();
        for c in &self.classifiers {
            let p = &c.params;
            writeln!(
                out,
                "{} | p={:.6} e={:.6} F={:.6} n={} exp={}",
                schema.format_norm(&c.norm),
                p.prediction,
                p.error,
                p.fitness,
                p.numerosity,
                p.experience
            )
            .expect("write to string");
        }
        out
    }

    /// Greedy action for a full context without covering, or `None` when
    /// no rule matches.
    pub fn greedy_action(&self, ctx: &Context, num_actions: usize) -> Option<Action> {
        let ms = self.match_set(ctx);
        self.prediction_array(&ms, num_actions).best()
    }
}
