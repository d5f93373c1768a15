//! Social experience, cohesion and norm adoption.

use crate::agents::{AgentKind, FixedNormTable};
use crate::engine::Population;
use crate::norm::{Action, ContextSchema, Norm};
use crate::simulation::{Interaction, Simulation};

pub const EMERGENCE_THRESHOLD: f64 = 0.90;
pub const SERIES_INTERVAL: u64 = 100;
pub const SERIES_WINDOW: u64 = 1000;

/// Mean reward over the interactions, `None` when there are none.
pub fn social_experience(interactions: &[Interaction]) -> Option<f64> {
    if interactions.is_empty() {
        return None;
    }
    Some(interactions.iter().map(|i| i.reward).sum::<f64>() / interactions.len() as f64)
}

/// Share of compliant neighbor votes, `None` when nobody voted.
pub fn cohesion(interactions: &[Interaction]) -> Option<f64> {
    let (yes, all) = interactions.iter().fold((0usize, 0usize), |(y, a), i| {
        (y + i.votes.iter().filter(|&&v| v).count(), a + i.votes.len())
    });
    (all > 0).then(|| yes as f64 / all as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub step: u64,
    pub social_experience: Option<f64>,
    pub cohesion: Option<f64>,
}

/// One point every 100 steps over the trailing 1000-step window.
/// `interactions` must be in step order.
pub fn series(interactions: &[Interaction], steps: u64) -> Vec<SeriesPoint> {
    (1..=steps / SERIES_INTERVAL)
        .map(|k| {
            let end = k * SERIES_INTERVAL;
            let start = end.saturating_sub(SERIES_WINDOW);
            let lo = interactions.partition_point(|i| i.step <= start);
            let hi = interactions.partition_point(|i| i.step <= end);
            let window = &interactions[lo..hi];
            SeriesPoint { step: end, social_experience: social_experience(window), cohesion: cohesion(window) }
        })
        .collect()
}

/// Exploit-mode behavior of every agent in every context, in
/// `enumerate_contexts` order. `None` marks no applicable rule or, for a
/// fixed agent, conflicting norms.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTable {
    pub choices: Vec<Vec<Option<Action>>>,
}

impl BehaviorTable {
    pub fn from_populations<'a, I>(schema: &ContextSchema, populations: I) -> Self
    where
        I: IntoIterator<Item = &'a Population>,
    {
        let contexts = schema.enumerate_contexts();
        let choices = populations
            .into_iter()
            .map(|p| contexts.iter().map(|c| p.greedy_action(c, schema.num_actions())).collect())
            .collect();
        Self { choices }
    }

    pub fn fixed(schema: &ContextSchema, table: &FixedNormTable, agents: usize) -> Self {
        let row: Vec<Option<Action>> = schema.enumerate_contexts().iter().map(|c| table.prescribed(c)).collect();
        Self { choices: vec![row; agents] }
    }

    pub fn from_simulation(schema: &ContextSchema, sim: &Simulation) -> Self {
        match sim.kind() {
            AgentKind::Fixed => Self::fixed(schema, sim.fixed_table(), sim.agents().len()),
            _ => Self::from_populations(schema, sim.agents().iter().map(|a| &a.population)),
        }
    }

    pub fn num_agents(&self) -> usize {
        self.choices.len()
    }
}

/// Fraction of agents complying with `norm`. An agent complies when its
/// choice equals the consequent in at least `required` of the contexts the
/// antecedent covers; `required = 1.0` means all of them.
pub fn adoption(schema: &ContextSchema, norm: &Norm, behavior: &BehaviorTable, required: f64) -> f64 {
    if behavior.num_agents() == 0 {
        return 0.0;
    }
    let covered: Vec<usize> = schema
        .enumerate_contexts()
        .iter()
        .enumerate()
        .filter(|(_, c)| norm.antecedent.holds_in(c))
        .map(|(i, _)| i)
        .collect();
    let need = required * covered.len() as f64 - 1e-9;
    let complying = behavior
        .choices
        .iter()
        .filter(|row| {
            let hits = covered.iter().filter(|&&i| row[i] == Some(norm.consequent)).count();
            hits as f64 >= need
        })
        .count();
    complying as f64 / behavior.num_agents() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdoptionRecord {
    pub norm: Norm,
    pub adoption: f64,
    pub emerged: bool,
    /// Emerged, and no strictly more general emerged norm shares its consequent.
    pub maximal: bool,
}

/// Adoption of every candidate norm in `enumerate_norms` order.
pub fn emerged_norms(schema: &ContextSchema, behavior: &BehaviorTable, required: f64) -> Vec<AdoptionRecord> {
    let mut records: Vec<AdoptionRecord> = schema
        .enumerate_norms()
        .into_iter()
        .map(|norm| {
            let adoption = adoption(schema, &norm, behavior, required);
            AdoptionRecord { norm, adoption, emerged: adoption >= EMERGENCE_THRESHOLD, maximal: false }
        })
        .collect();
    let emerged: Vec<Norm> = records.iter().filter(|r| r.emerged).map(|r| r.norm.clone()).collect();
    for r in records.iter_mut().filter(|r| r.emerged) {
        r.maximal = !emerged
            .iter()
            .any(|e| e.consequent == r.norm.consequent && e.antecedent.is_more_general(&r.norm.antecedent));
    }
    records
}

/// The maximal emerged norms of a report.
pub fn maximal_norms(records: &[AdoptionRecord]) -> Vec<&AdoptionRecord> {
    records.iter().filter(|r| r.maximal).collect()
}

/// Mean adoption over emerged norms, `None` when none emerged.
pub fn mean_emerged_adoption(records: &[AdoptionRecord]) -> Option<f64> {
    let e: Vec<f64> = records.iter().filter(|r| r.emerged).map(|r| r.adoption).collect();
    (!e.is_empty()).then(|| e.iter().sum::<f64>() / e.len() as f64)
}
