//! Explanations: the norms behind an action, and how an observer judges them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ActionSet, PredictionArray};
use crate::engine::Population;
use crate::norm::{Action, Antecedent, ContextSchema, Norm, NormError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplanationError {
    #[error("cannot explain an empty action set")]
    EmptyActionSet,
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// The norms supporting an observed action, parameters stripped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Explanation {
    norms: BTreeSet<Norm>,
}

impl Explanation {
    pub fn from_norms<I: IntoIterator<Item = Norm>>(norms: I) -> Self {
        Self { norms: norms.into_iter().collect() }
    }

    pub fn norms(&self) -> impl Iterator<Item = &Norm> {
        self.norms.iter()
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// Newline-separated canonical norm strings.
    pub fn to_wire(&self, schema: &ContextSchema) -> String {
        self.norms.iter().map(|n| schema.format_norm(n)).collect::<Vec<_>>().join("\n")
    }

    pub fn from_wire(schema: &ContextSchema, text: &str) -> Result<Self, ExplanationError> {
        let norms = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| schema.parse_norm(l))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Self { norms })
    }
}

pub fn build_explanation(population: &Population, aset: &ActionSet) -> Result<Explanation, ExplanationError> {
    let norms = population.action_set_norms(aset);
    if norms.is_empty() {
        return Err(ExplanationError::EmptyActionSet);
    }
    Ok(Explanation::from_norms(norms))
}

/// When an observer counts as following an explained norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FollowMode {
    /// Owns a rule with the same consequent and an equal or more general antecedent.
    #[default]
    Generalized,
    /// Owns exactly the explained norm.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationVerdict {
    pub accepted: bool,
    pub induced_action: Option<Action>,
    pub matched_explanation_norms: BTreeSet<Norm>,
    pub violated_own_norms: BTreeSet<Norm>,
}

/// Judges `observed` in light of `expl`. The evaluation set holds the
/// observer's rules that back explained norms plus its rules that hold under
/// `observable` and prescribe something else. The observer accepts when that
/// set is empty or its greedy choice (ties favour `observed`) is `observed`.
pub fn evaluate_explanation(
    observer: &Population,
    expl: &Explanation,
    observed: Action,
    observable: &Antecedent,
    num_actions: usize,
    mode: FollowMode,
) -> EvaluationVerdict {
    let mut matched = BTreeSet::new();
    let mut violated = BTreeSet::new();
    let mut eval_ids = BTreeSet::new();

    for n in expl.norms() {
        let mut follows = false;
        for c in observer.classifiers() {
            if c.action() != n.consequent {
                continue;
            }
            let backs = match mode {
                FollowMode::Generalized => c.antecedent().is_subset_of(&n.antecedent),
                FollowMode::Exact => c.antecedent() == &n.antecedent,
            };
            if backs {
                follows = true;
                eval_ids.insert(c.id);
            }
        }
        if follows {
            matched.insert(n.clone());
        }
    }
    for c in observer.classifiers() {
        if c.action() != observed && c.antecedent().is_subset_of(observable) {
            violated.insert(c.norm.clone());
            eval_ids.insert(c.id);
        }
    }

    if eval_ids.is_empty() {
        return EvaluationVerdict {
            accepted: true,
            induced_action: None,
            matched_explanation_norms: matched,
            violated_own_norms: violated,
        };
    }
    let pa = PredictionArray::from_supporters(
        num_actions,
        eval_ids.iter().filter_map(|&id| observer.get(id)).map(|c| (c.action(), c.params.prediction, c.params.fitness)),
    );
    let induced = pa.best_preferring(observed);
    EvaluationVerdict {
        accepted: induced == Some(observed),
        induced_action: induced,
        matched_explanation_norms: matched,
        violated_own_norms: violated,
    }
}

/// Compliance judgement of a learning observer. Without an explanation the
/// observer's own greedy choice under `observable` is compared with
/// `observed`; no applicable rule counts as compliant.
pub fn perceive_compliance(
    observer: &Population,
    observed: Action,
    observable: &Antecedent,
    expl: Option<&Explanation>,
    num_actions: usize,
    mode: FollowMode,
) -> bool {
    match expl {
        Some(e) if !e.is_empty() => evaluate_explanation(observer, e, observed, observable, num_actions, mode).accepted,
        _ => {
            let ms = observer.match_set_observed(observable);
            match observer.prediction_array(&ms, num_actions).best() {
                None => true,
                Some(a) => a == observed,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{ClassifierParams, Context};

    fn p(pred: f64, fit: f64) -> ClassifierParams {
        ClassifierParams { prediction: pred, fitness: fit, ..ClassifierParams::covering(0) }
    }

    fn meeting_family_urgent(s: &ContextSchema) -> Context {
        s.context(&[("calleeLoc", "M"), ("callerRel", "family"), ("urgent", "true")]).unwrap()
    }

    #[test]
    fn explanation_from_action_set() {
        let s = ContextSchema::ringer();
        let mut alice = Population::new();
        alice.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), p(1.0, 0.5));
        alice.insert(s.norm(&[("callerRel", "family")], "ring").unwrap(), p(0.8, 0.5));
        alice.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), p(0.2, 0.5));
        let ctx = meeting_family_urgent(&s);
        let ms = alice.match_set(&ctx);
        let aset = alice.action_set(&ms, Action::RING);
        let expl = build_explanation(&alice, &aset).unwrap();
        assert_eq!(
            expl.to_wire(&s),
            "urgent=true -> ring\ncallerRel=family -> ring"
        );
        assert_eq!(Explanation::from_wire(&s, &expl.to_wire(&s)).unwrap(), expl);

        let empty = ActionSet { action: Action::RING, ids: vec![] };
        assert_eq!(build_explanation(&alice, &empty), Err(ExplanationError::EmptyActionSet));
    }

    #[test]
    fn duplicate_norms_collapse() {
        let s = ContextSchema::ringer();
        let n = s.norm(&[("urgent", "true")], "ring").unwrap();
        let e = Explanation::from_norms([n.clone(), n]);
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn charlie_accepts_when_urgency_outweighs_meeting() {
        let s = ContextSchema::ringer();
        let expl = Explanation::from_norms([
            s.norm(&[("urgent", "true")], "ring").unwrap(),
            s.norm(&[("callerRel", "family")], "ring").unwrap(),
        ]);
        let observable = s.antecedent(&[("calleeLoc", "M"), ("urgent", "true"), ("callerRel", "family")]).unwrap();
        let mut charlie = Population::new();
        charlie.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), p(1.0, 0.6));
        charlie.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), p(0.4, 0.6));
        let v = evaluate_explanation(&charlie, &expl, Action::RING, &observable, 2, FollowMode::Generalized);
        assert!(v.accepted);
        assert_eq!(v.induced_action, Some(Action::RING));
        assert_eq!(v.matched_explanation_norms.len(), 1);
        assert_eq!(v.violated_own_norms.len(), 1);

        charlie.get_mut(1).unwrap().params.prediction = 1.5;
        let v = evaluate_explanation(&charlie, &expl, Action::RING, &observable, 2, FollowMode::Generalized);
        assert!(!v.accepted);
        assert_eq!(v.induced_action, Some(Action::IGNORE));
    }

    #[test]
    fn empty_observer_accepts() {
        let s = ContextSchema::ringer();
        let expl = Explanation::from_norms([s.norm(&[], "ring").unwrap()]);
        let obs = s.antecedent(&[("calleeLoc", "L")]).unwrap();
        let v = evaluate_explanation(&Population::new(), &expl, Action::RING, &obs, 2, FollowMode::Generalized);
        assert!(v.accepted);
        assert_eq!(v.induced_action, None);
    }

    #[test]
    fn opposite_rule_rejects() {
        let s = ContextSchema::ringer();
        let expl = Explanation::from_norms([s.norm(&[("urgent", "true")], "ring").unwrap()]);
        let obs = s.antecedent(&[("calleeLoc", "L"), ("urgent", "true")]).unwrap();
        let mut pop = Population::new();
        pop.insert(s.norm(&[("calleeLoc", "L")], "ignore").unwrap(), p(0.5, 0.5));
        let v = evaluate_explanation(&pop, &expl, Action::RING, &obs, 2, FollowMode::Generalized);
        assert!(!v.accepted);
        assert_eq!(v.induced_action, Some(Action::IGNORE));
    }

    #[test]
    fn follow_modes_differ_on_general_rules() {
        let s = ContextSchema::ringer();
        let expl = Explanation::from_norms([s.norm(&[("urgent", "true")], "ring").unwrap()]);
        let obs = s.antecedent(&[("calleeLoc", "M"), ("urgent", "true")]).unwrap();
        let mut pop = Population::new();
        pop.insert(s.norm(&[], "ring").unwrap(), p(1.0, 0.5));
        pop.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), p(0.5, 0.5));
        let g = evaluate_explanation(&pop, &expl, Action::RING, &obs, 2, FollowMode::Generalized);
        assert!(g.accepted);
        let e = evaluate_explanation(&pop, &expl, Action::RING, &obs, 2, FollowMode::Exact);
        assert!(!e.accepted);
        assert!(e.matched_explanation_norms.is_empty());
    }

    #[test]
    fn compliance_without_explanation() {
        let s = ContextSchema::ringer();
        let obs = s.antecedent(&[("calleeLoc", "M")]).unwrap();
        assert!(perceive_compliance(&Population::new(), Action::RING, &obs, None, 2, FollowMode::Generalized));
        let mut pop = Population::new();
        pop.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), p(0.5, 0.5));
        pop.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), p(2.0, 0.5));
        assert!(!perceive_compliance(&pop, Action::RING, &obs, None, 2, FollowMode::Generalized));
        assert!(perceive_compliance(&pop, Action::IGNORE, &obs, None, 2, FollowMode::Generalized));
        let empty = Explanation::default();
        assert_eq!(
            perceive_compliance(&pop, Action::RING, &obs, Some(&empty), 2, FollowMode::Generalized),
            perceive_compliance(&pop, Action::RING, &obs, None, 2, FollowMode::Generalized)
        );
    }
}
