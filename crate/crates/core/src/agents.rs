//! Fixed, NSIGA and XSIGA agents.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{select_action, ActionSet, Mode, Population};
use crate::norm::{Action, Context, Hyperparameters};
use crate::scenario::{context_location, context_relationship, context_urgent, Attitude, LocationKind, Relationship};

/// What a fixed agent does: one rule per location, one per circle and urgency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedNormTable {
    /// Indexed by `LocationKind`.
    pub location: [Action; 5],
    /// Indexed by `Relationship`, then casual/urgent.
    pub circle: [[Action; 2]; 4],
}

impl Default for FixedNormTable {
    fn default() -> Self {
        let (a, i) = (Action::RING, Action::IGNORE);
        Self {
            // ER, H, L, M, P
            location: [a, a, i, i, a],
            // colleague, family, friend, stranger
            circle: [[a, a], [a, a], [a, a], [i, a]],
        }
    }
}

impl FixedNormTable {
    pub fn location_norm(&self, loc: LocationKind) -> Action {
        self.location[loc as usize]
    }

    pub fn circle_norm(&self, rel: Relationship, urgent: bool) -> Action {
        self.circle[rel as usize][urgent as usize]
    }

    /// The agreed action, or `None` when the two norms conflict.
    pub fn prescribed(&self, ctx: &Context) -> Option<Action> {
        let by_loc = self.location_norm(context_location(ctx));
        let by_circle = self.circle_norm(context_relationship(ctx), context_urgent(ctx));
        (by_loc == by_circle).then_some(by_loc)
    }
}

/// Follows the table; a conflict is settled by a fair coin.
pub fn fixed_decide<R: Rng + ?Sized>(table: &FixedNormTable, ctx: &Context, rng: &mut R) -> Action {
    match table.prescribed(ctx) {
        Some(a) => a,
        None => Action(rng.random_range(0..2u8)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Fixed,
    Nsiga,
    Xsiga,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Fixed, AgentKind::Nsiga, AgentKind::Xsiga];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Fixed => "fixed",
            AgentKind::Nsiga => "nsiga",
            AgentKind::Xsiga => "xsiga",
        }
    }

    pub fn learns(self) -> bool {
        self != AgentKind::Fixed
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown agent kind `{s}` (expected fixed, nsiga or xsiga)"))
    }
}

/// One agent's state. Fixed agents keep an empty population forever.
#[derive(Debug, Clone)]
pub struct Agent {
    pub attitude: Attitude,
    pub population: Population,
    /// Learning interactions so far; the clock for covering and the GA.
    pub learn_step: u64,
}

impl Agent {
    pub fn new(attitude: Attitude) -> Self {
        Self { attitude, population: Population::new(), learn_step: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub action: Action,
    pub action_set: ActionSet,
    pub mode: Mode,
}

/// Match, cover, then pick explore or exploit and build the action set.
pub fn siga_decide<R: Rng + ?Sized>(
    population: &mut Population,
    ctx: &Context,
    num_actions: usize,
    step: u64,
    hp: &Hyperparameters,
    rng: &mut R,
) -> Decision {
    let mut ms = population.match_set(ctx);
    population.cover(&mut ms, ctx, num_actions, step, hp, rng);
    let pa = population.prediction_array(&ms, num_actions);
    let mode = if rng.random_bool(hp.explore_prob) { Mode::Explore } else { Mode::Exploit };
    let action = select_action(&pa, mode, num_actions, rng).expect("covering supports every action");
    Decision { action, action_set: population.action_set(&ms, action), mode }
}

/// Credits `reward` to the action set and runs subsumption, the GA and
/// deletion, in that order.
pub fn learn<R: Rng + ?Sized>(
    population: &mut Population,
    mut aset: ActionSet,
    ctx: &Context,
    reward: f64,
    step: u64,
    hp: &Hyperparameters,
    rng: &mut R,
) {
    population.update_action_set(&aset, reward, hp).expect("decision yields a non-empty action set");
    population.subsume_action_set(&mut aset, hp);
    population.run_ga(&aset, ctx, step, hp, rng);
    population.delete_excess(hp, rng);
}
