//! One run: a world, a homogeneous society of agents, and the call loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agents::{fixed_decide, learn, siga_decide, Agent, AgentKind, FixedNormTable};
use crate::engine::Population;
use crate::explanation::{build_explanation, evaluate_explanation, perceive_compliance, Explanation, FollowMode};
use crate::norm::{Action, Context, ContextSchema};
use crate::scenario::{
    callee_reward, context_location, lookup_payoffs, observable_context, Call, NeighborView, PayoffTables,
    SimulationConfig, Society, World,
};

const WORLD_STREAM: u64 = 0;
const AGENT_STREAM: u64 = 1;

/// Everything that happened in one call.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub step: u64,
    pub caller: usize,
    pub callee: usize,
    pub context: Context,
    pub action: Action,
    pub callee_payoff: f64,
    pub caller_payoff: f64,
    pub neighbors: Vec<usize>,
    pub neighbor_payoffs: Vec<f64>,
    pub reward: f64,
    /// One compliance verdict per neighbor.
    pub votes: Vec<bool>,
    pub explanation: Option<Explanation>,
}

/// Line-delimited log form of an [`Interaction`].
#[derive(Debug, Serialize)]
pub struct InteractionRecord<'a> {
    pub step: u64,
    pub caller: usize,
    pub callee: usize,
    pub context: String,
    pub action: &'a str,
    pub reward: f64,
    pub neighbors: &'a [usize],
    pub verdicts: &'a [bool],
    pub explanation: Vec<String>,
}

impl Interaction {
    pub fn record<'a>(&'a self, schema: &'a ContextSchema) -> InteractionRecord<'a> {
        InteractionRecord {
            step: self.step,
            caller: self.caller,
            callee: self.callee,
            context: schema.format_context(&self.context),
            action: schema.action_name(self.action),
            reward: self.reward,
            neighbors: &self.neighbors,
            verdicts: &self.votes,
            explanation: self
                .explanation
                .iter()
                .flat_map(|e| e.norms())
                .map(|n| schema.format_norm(n))
                .collect(),
        }
    }
}

pub struct Simulation {
    kind: AgentKind,
    config: SimulationConfig,
    payoffs: PayoffTables,
    fixed: FixedNormTable,
    num_actions: usize,
    world: World,
    agents: Vec<Agent>,
    world_rng: ChaCha8Rng,
    agent_rng: ChaCha8Rng,
}

impl Simulation {
    /// World layout, attitudes and movement come from one random stream and
    /// agent choices from another, so every agent kind under the same seed
    /// sees the same calls.
    pub fn new(kind: AgentKind, society: Society, config: SimulationConfig, payoffs: PayoffTables, seed: u64) -> Self {
        let mut world_rng = ChaCha8Rng::seed_from_u64(seed);
        world_rng.set_stream(WORLD_STREAM);
        let mut agent_rng = ChaCha8Rng::seed_from_u64(seed);
        agent_rng.set_stream(AGENT_STREAM);
        let attitudes = society.attitudes(config.world.num_agents, &mut world_rng);
        let world = World::new(config.world.clone(), &attitudes, &mut world_rng);
        let agents = attitudes.iter().map(|&a| Agent::new(a)).collect();
        Self {
            kind,
            num_actions: ContextSchema::ringer().num_actions(),
            config,
            payoffs,
            fixed: FixedNormTable::default(),
            world,
            agents,
            world_rng,
            agent_rng,
        }
    }

    pub fn kind(&self) -> AgentKind {
        self.kind
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn fixed_table(&self) -> &FixedNormTable {
        &self.fixed
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    /// Advances the world one step and plays out its calls in caller order.
    pub fn step(&mut self) -> Vec<Interaction> {
        let calls = self.world.step(&mut self.world_rng);
        calls.into_iter().map(|c| self.process_interaction(c)).collect()
    }

    /// Runs `steps` steps and returns every interaction.
    pub fn run(&mut self, steps: u64) -> Vec<Interaction> {
        let mut out = Vec::new();
        for _ in 0..steps {
            out.extend(self.step());
        }
        out
    }

    /// Decides, gathers verdicts and payoffs, and lets the callee learn.
    /// Only the callee's population changes.
    pub fn process_interaction(&mut self, call: Call) -> Interaction {
        let Call { caller, callee, context } = call;
        let hp = self.config.hyperparameters.clone();
        let neighbors = self.world.neighbors(callee, caller);

        let decision = match self.kind {
            AgentKind::Fixed => None,
            AgentKind::Nsiga | AgentKind::Xsiga => {
                let agent = &mut self.agents[callee];
                agent.learn_step += 1;
                Some(siga_decide(
                    &mut agent.population,
                    &context,
                    self.num_actions,
                    agent.learn_step,
                    &hp,
                    &mut self.agent_rng,
                ))
            }
        };
        let action = match &decision {
            Some(d) => d.action,
            None => fixed_decide(&self.fixed, &context, &mut self.agent_rng),
        };

        let explanation = match (&decision, self.kind) {
            (Some(d), AgentKind::Xsiga) => Some(
                build_explanation(&self.agents[callee].population, &d.action_set).expect("non-empty action set"),
            ),
            _ => None,
        };
        let observable = observable_context(&context, explanation.as_ref());
        let mode = self.config.evaluation.follow_mode;

        let mut votes = Vec::with_capacity(neighbors.len());
        let mut views = Vec::with_capacity(neighbors.len());
        for &n in &neighbors {
            let (vote, view) = self.observe(n, &context, action, &observable, explanation.as_ref(), mode);
            votes.push(vote);
            views.push(view);
        }

        let (callee_payoff, caller_payoff, neighbor_payoffs) = lookup_payoffs(&self.payoffs, &context, action, &views);
        let reward = callee_reward(self.agents[callee].attitude, callee_payoff, caller_payoff, &neighbor_payoffs);

        if let Some(d) = decision {
            let agent = &mut self.agents[callee];
            learn(&mut agent.population, d.action_set, &context, reward, agent.learn_step, &hp, &mut self.agent_rng);
        }

        Interaction {
            step: self.world.current_step(),
            caller,
            callee,
            context,
            action,
            callee_payoff,
            caller_payoff,
            neighbors,
            neighbor_payoffs,
            reward,
            votes,
            explanation,
        }
    }

    fn observe(
        &self,
        observer: usize,
        ctx: &Context,
        action: Action,
        observable: &crate::norm::Antecedent,
        explanation: Option<&Explanation>,
        mode: FollowMode,
    ) -> (bool, NeighborView) {
        let pop: &Population = &self.agents[observer].population;
        match (self.kind, explanation) {
            (AgentKind::Fixed, _) => (self.fixed.location_norm(context_location(ctx)) == action, NeighborView::LocationOnly),
            (AgentKind::Xsiga, Some(e)) => {
                let v = evaluate_explanation(pop, e, action, observable, self.num_actions, mode);
                // An observer with nothing to weigh expects what it saw.
                (v.accepted, NeighborView::Expected(v.induced_action.unwrap_or(action)))
            }
            _ => (
                perceive_compliance(pop, action, observable, None, self.num_actions, mode),
                NeighborView::LocationOnly,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::WorldConfig;

    fn config(agents: usize) -> SimulationConfig {
        SimulationConfig {
            world: WorldConfig { num_agents: agents, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn kinds_share_the_call_sequence() {
        let mut runs: Vec<Vec<(u64, usize, usize, Context)>> = AgentKind::ALL
            .iter()
            .map(|&k| {
                let mut sim = Simulation::new(k, Society::Pragmatic, config(40), PayoffTables::default(), 11);
                sim.run(300).into_iter().map(|i| (i.step, i.caller, i.callee, i.context)).collect()
            })
            .collect();
        let first = runs.remove(0);
        assert!(!first.is_empty());
        for r in runs {
            assert_eq!(r, first);
        }
    }

    #[test]
    fn fixed_agents_never_learn() {
        let mut sim = Simulation::new(AgentKind::Fixed, Society::Pragmatic, config(40), PayoffTables::default(), 3);
        let log = sim.run(500);
        assert!(!log.is_empty());
        assert!(sim.agents().iter().all(|a| a.population.is_empty() && a.learn_step == 0));
        for i in &log {
            assert!(i.explanation.is_none());
            assert_eq!(i.votes.len(), i.neighbors.len());
            assert_eq!(i.neighbor_payoffs.len(), i.neighbors.len());
            assert!(!i.neighbors.contains(&i.callee) && !i.neighbors.contains(&i.caller));
        }
    }

    #[test]
    fn xsiga_always_explains() {
        let mut sim = Simulation::new(AgentKind::Xsiga, Society::Selfish, config(40), PayoffTables::default(), 5);
        for i in sim.run(500) {
            assert!(!i.explanation.as_ref().unwrap().is_empty());
            let e = i.explanation.as_ref().unwrap();
            assert!(e.norms().all(|n| n.consequent == i.action));
        }
        let cap = sim.config().hyperparameters.max_micro_population;
        assert!(sim.agents().iter().all(|a| a.population.micro_size() <= cap));
    }

    #[test]
    fn same_seed_same_log() {
        let run = |seed| {
            let mut sim = Simulation::new(AgentKind::Xsiga, Society::Mixed, config(40), PayoffTables::default(), seed);
            sim.run(400)
        };
        assert_eq!(run(8), run(8));
        assert_ne!(run(8), run(9));
    }
}
