//! The phone-ringer world: an agent decides whether to ring its owner's
//! phone, and the callee, the caller and everyone nearby are affected.

mod config;
mod world;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use config::{
    ConfigError, EvaluationConfig, PayoffTables, RelationshipProbs, SimulationConfig, WorldConfig,
    APPENDIX_PAYOFFS_TOML, DEFAULT_PAYOFFS_TOML, DEFAULT_WORLD_TOML,
};
pub use world::{AgentProfile, Call, World};

use crate::explanation::Explanation;
use crate::norm::{Action, Antecedent, Context};

pub const LOC_KEY: usize = 0;
pub const REL_KEY: usize = 1;
pub const URGENT_KEY: usize = 2;

/// Location kinds in schema value order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationKind {
    EmergencyRoom = 0,
    Home = 1,
    Library = 2,
    Meeting = 3,
    Party = 4,
}

impl LocationKind {
    pub const ALL: [LocationKind; 5] = [
        LocationKind::EmergencyRoom,
        LocationKind::Home,
        LocationKind::Library,
        LocationKind::Meeting,
        LocationKind::Party,
    ];

    pub fn code(self) -> &'static str {
        match self {
            LocationKind::EmergencyRoom => "ER",
            LocationKind::Home => "H",
            LocationKind::Library => "L",
            LocationKind::Meeting => "M",
            LocationKind::Party => "P",
        }
    }

    pub fn from_index(i: u8) -> Self {
        Self::ALL[i as usize]
    }
}

/// Caller relationships in schema value order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relationship {
    Colleague = 0,
    Family = 1,
    Friend = 2,
    Stranger = 3,
}

impl Relationship {
    pub const ALL: [Relationship; 4] =
        [Relationship::Colleague, Relationship::Family, Relationship::Friend, Relationship::Stranger];

    pub fn from_index(i: u8) -> Self {
        Self::ALL[i as usize]
    }

    pub fn class(self) -> RelationshipClass {
        match self {
            Relationship::Stranger => RelationshipClass::Stranger,
            _ => RelationshipClass::Known,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationshipClass {
    Known = 0,
    Stranger = 1,
}

/// Builds a ringer context.
pub fn ringer_context(loc: LocationKind, rel: Relationship, urgent: bool) -> Context {
    // urgent values sort as false < true
    Context::from_indices(vec![loc as u8, rel as u8, urgent as u8])
}

pub fn context_location(ctx: &Context) -> LocationKind {
    LocationKind::from_index(ctx.value(LOC_KEY))
}

pub fn context_relationship(ctx: &Context) -> Relationship {
    Relationship::from_index(ctx.value(REL_KEY))
}

pub fn context_urgent(ctx: &Context) -> bool {
    ctx.value(URGENT_KEY) == 1
}

/// How much weight an agent puts on its own payoff versus others'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attitude {
    Selfish,
    Pragmatic,
    Considerate,
}

/// Attitude make-up of a whole society.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Society {
    Pragmatic,
    Selfish,
    Considerate,
    /// A quarter selfish, a quarter considerate, the rest pragmatic.
    Mixed,
}

impl Society {
    pub const ALL: [Society; 4] = [Society::Pragmatic, Society::Selfish, Society::Considerate, Society::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Society::Pragmatic => "pragmatic",
            Society::Selfish => "selfish",
            Society::Considerate => "considerate",
            Society::Mixed => "mixed",
        }
    }

    /// Per-agent attitudes; a mixed society is shuffled.
    pub fn attitudes<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Vec<Attitude> {
        match self {
            Society::Pragmatic => vec![Attitude::Pragmatic; n],
            Society::Selfish => vec![Attitude::Selfish; n],
            Society::Considerate => vec![Attitude::Considerate; n],
            Society::Mixed => {
                let quarter = (n as f64 / 4.0).round() as usize;
                let mut out = vec![Attitude::Pragmatic; n];
                out[..quarter].fill(Attitude::Selfish);
                out[quarter..(2 * quarter).min(n)].fill(Attitude::Considerate);
                out.shuffle(rng);
                out
            }
        }
    }
}

impl fmt::Display for Society {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Society {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown society `{s}` (expected pragmatic, selfish, considerate or mixed)"))
    }
}

/// Self and others' weights; others share their weight equally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocietyWeights {
    pub w_self: f64,
    pub w_others: f64,
}

impl SocietyWeights {
    /// Weights for `stakeholders` parties including the agent itself.
    pub fn for_attitude(attitude: Attitude, stakeholders: usize) -> Self {
        match attitude {
            Attitude::Selfish => Self { w_self: 1.0, w_others: 0.0 },
            Attitude::Considerate => Self { w_self: 0.0, w_others: 1.0 },
            Attitude::Pragmatic => {
                let k = stakeholders.max(1) as f64;
                Self { w_self: 1.0 / k, w_others: (k - 1.0) / k }
            }
        }
    }
}

/// `w_self * callee + w_others * mean(caller, neighbors...)`.
pub fn aggregate_reward(weights: SocietyWeights, callee: f64, caller: f64, neighbors: &[f64]) -> f64 {
    let others = (caller + neighbors.iter().sum::<f64>()) / (1 + neighbors.len()) as f64;
    weights.w_self * callee + weights.w_others * others
}

/// Reward for the callee's agent with its own attitude.
pub fn callee_reward(attitude: Attitude, callee: f64, caller: f64, neighbors: &[f64]) -> f64 {
    let w = SocietyWeights::for_attitude(attitude, 2 + neighbors.len());
    aggregate_reward(w, callee, caller, neighbors)
}

/// The neighbor-visible part of `ctx`: the location, plus whatever the
/// explanation's antecedents reveal.
pub fn observable_context(ctx: &Context, expl: Option<&Explanation>) -> Antecedent {
    let mut slots = vec![None; ctx.len()];
    slots[LOC_KEY] = Some(ctx.value(LOC_KEY));
    let mut obs = Antecedent::from_slots(slots);
    if let Some(e) = expl {
        for n in e.norms() {
            obs = obs.union(&n.antecedent);
        }
    }
    obs
}

/// What each neighbor expected, when neighbors evaluated an explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborView {
    LocationOnly,
    Expected(Action),
}

/// Callee, caller and per-neighbor payoffs for one call.
pub fn lookup_payoffs(
    tables: &PayoffTables,
    ctx: &Context,
    action: Action,
    neighbors: &[NeighborView],
) -> (f64, f64, Vec<f64>) {
    let loc = context_location(ctx);
    let urgent = context_urgent(ctx);
    let callee = tables.callee_payoff(context_relationship(ctx).class(), action, urgent);
    let caller = tables.caller_payoff(action, urgent);
    let ns = neighbors
        .iter()
        .map(|v| match v {
            NeighborView::LocationOnly => tables.neighbor_fixed_payoff(action, loc),
            NeighborView::Expected(e) => tables.neighbor_explained_payoff(action, *e, loc),
        })
        .collect();
    (callee, caller, ns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::ContextSchema;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ringer_context_agrees_with_schema() {
        let s = ContextSchema::ringer();
        let c = ringer_context(LocationKind::Meeting, Relationship::Family, true);
        assert_eq!(c, s.context(&[("calleeLoc", "M"), ("callerRel", "family"), ("urgent", "true")]).unwrap());
        for (i, l) in LocationKind::ALL.iter().enumerate() {
            assert_eq!(s.properties()[LOC_KEY].values[i], l.code());
        }
        let rels = ["colleague", "family", "friend", "stranger"];
        assert_eq!(s.properties()[REL_KEY].values, rels);
    }

    #[test]
    fn payoff_lookup_examples() {
        let t = PayoffTables::default();
        let stranger_casual_h = ringer_context(LocationKind::Home, Relationship::Stranger, false);
        let (callee, _, _) = lookup_payoffs(&t, &stranger_casual_h, Action::RING, &[]);
        assert_eq!(callee, -1.50);
        let urgent = ringer_context(LocationKind::Home, Relationship::Friend, true);
        let (_, caller, _) = lookup_payoffs(&t, &urgent, Action::IGNORE, &[]);
        assert_eq!(caller, -1.00);
        let (_, _, ns) =
            lookup_payoffs(&t, &urgent, Action::RING, &[NeighborView::Expected(Action::IGNORE), NeighborView::LocationOnly]);
        assert_eq!(ns, vec![-0.33, 0.67]);
    }

    #[test]
    fn known_rows_are_identical() {
        let t = PayoffTables::default();
        for urgent in [false, true] {
            for a in [Action::RING, Action::IGNORE] {
                let payoffs: Vec<f64> = [Relationship::Family, Relationship::Friend, Relationship::Colleague]
                    .iter()
                    .map(|r| lookup_payoffs(&t, &ringer_context(LocationKind::Party, *r, urgent), a, &[]).0)
                    .collect();
                assert!(payoffs.windows(2).all(|w| w[0] == w[1]));
            }
        }
    }

    #[test]
    fn aggregation_examples() {
        let selfish = SocietyWeights::for_attitude(Attitude::Selfish, 4);
        assert_eq!(aggregate_reward(selfish, 0.5, 1.0, &[-1.0, 1.0]), 0.5);
        let considerate = SocietyWeights::for_attitude(Attitude::Considerate, 4);
        assert_eq!(aggregate_reward(considerate, 0.5, 1.0, &[-1.0, 0.0]), 0.0);
        // Four stakeholders at 1/4 each: (0.5 + 1.0 - 1.0 + 0.67) / 4
        let pragmatic = SocietyWeights::for_attitude(Attitude::Pragmatic, 4);
        assert_abs_diff_eq!(aggregate_reward(pragmatic, 0.5, 1.0, &[-1.0, 0.67]), 1.17 / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(callee_reward(Attitude::Pragmatic, 0.5, 1.0, &[]), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn mixed_society_proportions() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let atts = Society::Mixed.attitudes(40, &mut rng);
        let count = |a| atts.iter().filter(|&&x| x == a).count();
        assert_eq!((count(Attitude::Selfish), count(Attitude::Considerate), count(Attitude::Pragmatic)), (10, 10, 20));
        assert_eq!("Mixed".parse::<Society>().unwrap(), Society::Mixed);
        assert!("chaotic".parse::<Society>().is_err());
    }

    #[test]
    fn observable_context_examples() {
        let s = ContextSchema::ringer();
        let ctx = ringer_context(LocationKind::Meeting, Relationship::Family, true);
        let loc_only = s.antecedent(&[("calleeLoc", "M")]).unwrap();
        assert_eq!(observable_context(&ctx, None), loc_only);
        let e = Explanation::from_norms([s.norm(&[("urgent", "true")], "ring").unwrap()]);
        assert_eq!(
            observable_context(&ctx, Some(&e)),
            s.antecedent(&[("calleeLoc", "M"), ("urgent", "true")]).unwrap()
        );
        let t = Explanation::from_norms([s.norm(&[], "ring").unwrap()]);
        assert_eq!(observable_context(&ctx, Some(&t)), loc_only);
    }
}
