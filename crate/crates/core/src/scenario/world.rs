use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ringer_context, Attitude, LocationKind, Relationship, WorldConfig};
use crate::norm::Context;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentProfile {
    pub id: usize,
    /// Location ids; each doubles as the id of the circle living there.
    pub home: usize,
    pub party: usize,
    pub meeting: usize,
    pub attitude: Attitude,
    pub call_prob: f64,
}

impl AgentProfile {
    pub fn circles(&self) -> [usize; 3] {
        [self.home, self.party, self.meeting]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub caller: usize,
    pub callee: usize,
    pub context: Context,
}

/// Locations, circles, agent positions and stay timers.
#[derive(Debug, Clone)]
pub struct World {
    config: WorldConfig,
    locations: Vec<LocationKind>,
    profiles: Vec<AgentProfile>,
    position: Vec<usize>,
    stay: Vec<u32>,
    occupants: Vec<Vec<usize>>,
    /// `relations[agent][relationship]`: candidate callees per category.
    relations: Vec<[Vec<usize>; 4]>,
    stay_dist: Option<Normal<f64>>,
    call_dist: Option<Normal<f64>>,
    step: u64,
}

fn normal(mean: f64, sd: f64) -> Option<Normal<f64>> {
    (sd > 0.0).then(|| Normal::new(mean, sd).expect("finite parameters"))
}

impl World {
    /// Builds a world. Circle memberships are balanced: shuffled agents are
    /// dealt round-robin into homes, parties and meetings. `attitudes[i]`
    /// belongs to agent `i`.
    pub fn new<R: Rng + ?Sized>(config: WorldConfig, attitudes: &[Attitude], rng: &mut R) -> Self {
        let n = config.num_agents;
        assert_eq!(attitudes.len(), n, "one attitude per agent");
        let mut locations = Vec::new();
        let mut block = |kind: LocationKind, count: usize| -> usize {
            let start = locations.len();
            locations.extend(std::iter::repeat_n(kind, count));
            start
        };
        let home0 = block(LocationKind::Home, config.homes);
        let party0 = block(LocationKind::Party, config.parties);
        let meeting0 = block(LocationKind::Meeting, config.meetings);
        block(LocationKind::Library, config.libraries);
        block(LocationKind::EmergencyRoom, config.emergency_rooms);

        let mut deal = |start: usize, count: usize| -> Vec<usize> {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut out = vec![0; n];
            for (slot, agent) in order.into_iter().enumerate() {
                out[agent] = start + slot % count;
            }
            out
        };
        let homes = deal(home0, config.homes);
        let parties = deal(party0, config.parties);
        let meetings = deal(meeting0, config.meetings);

        let call_dist = normal(config.call_prob_mean, config.call_prob_sd);
        let profiles: Vec<AgentProfile> = (0..n)
            .map(|id| AgentProfile {
                id,
                home: homes[id],
                party: parties[id],
                meeting: meetings[id],
                attitude: attitudes[id],
                call_prob: draw_call_prob(&config, call_dist.as_ref(), rng),
            })
            .collect();

        let relations = profiles
            .iter()
            .map(|me| {
                let mut rel: [Vec<usize>; 4] = Default::default();
                for other in profiles.iter().filter(|o| o.id != me.id) {
                    let mut any = false;
                    if other.home == me.home {
                        rel[Relationship::Family as usize].push(other.id);
                        any = true;
                    }
                    if other.party == me.party {
                        rel[Relationship::Friend as usize].push(other.id);
                        any = true;
                    }
                    if other.meeting == me.meeting {
                        rel[Relationship::Colleague as usize].push(other.id);
                        any = true;
                    }
                    if !any {
                        rel[Relationship::Stranger as usize].push(other.id);
                    }
                }
                rel
            })
            .collect();

        let mut world = Self {
            stay_dist: normal(config.stay_mean, config.stay_sd),
            call_dist,
            occupants: vec![Vec::new(); locations.len()],
            locations,
            profiles,
            position: vec![0; n],
            stay: vec![0; n],
            relations,
            config,
            step: 0,
        };
        for a in 0..n {
            let loc = world.choose_location(a, rng);
            world.position[a] = loc;
            world.occupants[loc].push(a);
            world.stay[a] = world.draw_stay(rng);
        }
        world
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn profiles(&self) -> &[AgentProfile] {
        &self.profiles
    }

    pub fn num_agents(&self) -> usize {
        self.profiles.len()
    }

    pub fn locations(&self) -> &[LocationKind] {
        &self.locations
    }

    pub fn position(&self, agent: usize) -> usize {
        self.position[agent]
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    pub fn location_kind(&self, location: usize) -> LocationKind {
        self.locations[location]
    }

    pub fn stay_remaining(&self, agent: usize) -> u32 {
        self.stay[agent]
    }

    pub fn current_step(&self) -> u64 {
        self.step
    }

    pub fn relations(&self, agent: usize, rel: Relationship) -> &[usize] {
        &self.relations[agent][rel as usize]
    }

    /// Agents sharing the callee's location, excluding callee and caller,
    /// in id order.
    pub fn neighbors(&self, callee: usize, caller: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.occupants[self.position[callee]]
            .iter()
            .copied()
            .filter(|&a| a != callee && a != caller)
            .collect();
        out.sort_unstable();
        out
    }

    fn draw_stay<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let [lo, hi] = self.config.stay_clamp;
        match &self.stay_dist {
            None => (self.config.stay_mean.round().max(0.0) as u32).clamp(lo, hi),
            Some(d) => loop {
                let x = d.sample(rng).round();
                if x >= lo as f64 && x <= hi as f64 {
                    break x as u32;
                }
            },
        }
    }

    /// Own circle location with the configured probability, else a uniform
    /// location outside the agent's circles.
    fn choose_location<R: Rng + ?Sized>(&self, agent: usize, rng: &mut R) -> usize {
        let own = self.profiles[agent].circles();
        let others = self.locations.len() - own.len();
        if others == 0 || rng.random_bool(self.config.own_circle_location_prob) {
            return own[rng.random_range(0..own.len())];
        }
        let mut k = rng.random_range(0..others);
        for loc in 0..self.locations.len() {
            if own.contains(&loc) {
                continue;
            }
            if k == 0 {
                return loc;
            }
            k -= 1;
        }
        unreachable!("others counted above")
    }

    /// Whether `location` is one of `agent`'s circle locations.
    pub fn is_own_location(&self, agent: usize, location: usize) -> bool {
        self.profiles[agent].circles().contains(&location)
    }

    fn relocate<R: Rng + ?Sized>(&mut self, agent: usize, rng: &mut R) {
        let to = self.choose_location(agent, rng);
        let from = self.position[agent];
        if let Some(i) = self.occupants[from].iter().position(|&a| a == agent) {
            self.occupants[from].swap_remove(i);
        }
        self.occupants[to].push(agent);
        self.position[agent] = to;
        self.stay[agent] = self.draw_stay(rng);
    }

    /// Advances timers, relocates agents whose stay ended, then generates
    /// this step's calls in caller id order.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<Call> {
        self.step += 1;
        for a in 0..self.num_agents() {
            self.stay[a] = self.stay[a].saturating_sub(1);
            if self.stay[a] == 0 {
                self.relocate(a, rng);
            }
        }
        self.generate_calls(rng)
    }

    pub fn generate_calls<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Call> {
        let probs = &self.config.relationship_category_prob;
        let weights = [probs.colleague, probs.family, probs.friend, probs.stranger];
        let mut calls = Vec::new();
        for caller in 0..self.num_agents() {
            let p = if self.config.redraw_call_prob_each_step {
                draw_call_prob(&self.config, self.call_dist.as_ref(), rng)
            } else {
                self.profiles[caller].call_prob
            };
            if !rng.random_bool(p) {
                continue;
            }
            let usable: f64 = (0..4).filter(|&r| !self.relations[caller][r].is_empty()).map(|r| weights[r]).sum();
            if usable <= 0.0 {
                continue;
            }
            let rel = loop {
                let r = pick_weighted(&weights, rng);
                if !self.relations[caller][r].is_empty() {
                    break r;
                }
            };
            let pool = &self.relations[caller][rel];
            let callee = pool[rng.random_range(0..pool.len())];
            let urgent = rng.random_bool(self.config.urgent_prob);
            let loc = self.locations[self.position[callee]];
            calls.push(Call { caller, callee, context: ringer_context(loc, Relationship::ALL[rel], urgent) });
        }
        calls
    }
}

fn draw_call_prob<R: Rng + ?Sized>(config: &WorldConfig, dist: Option<&Normal<f64>>, rng: &mut R) -> f64 {
    match dist {
        None => config.call_prob_mean,
        Some(d) => d.sample(rng).clamp(0.0, 1.0),
    }
}

fn pick_weighted<R: Rng + ?Sized>(weights: &[f64; 4], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(3)
}
