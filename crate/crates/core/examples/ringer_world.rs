//! A few hundred steps of the phone-ringer world: where people are, who
//! calls whom, and what each call pays when answered or ignored.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siga::norm::{Action, ContextSchema};
use siga::scenario::{
    callee_reward, lookup_payoffs, LocationKind, NeighborView, PayoffTables, Society, World, WorldConfig,
};

fn main() {
    let s = ContextSchema::ringer();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let config = WorldConfig::default();
    let attitudes = Society::Mixed.attitudes(config.num_agents, &mut rng);
    let mut world = World::new(config, &attitudes, &mut rng);
    let tables = PayoffTables::default();

    let mut calls = Vec::new();
    for _ in 0..300 {
        calls.extend(world.step(&mut rng));
    }
    println!("{} calls in {} steps", calls.len(), world.current_step());

    for kind in LocationKind::ALL {
        let here = world
            .positions()
            .iter()
            .filter(|&&loc| world.location_kind(loc) == kind)
            .count();
        println!("  {:<3} {here} agents", kind.code());
    }

    println!("\nlast calls:");
    for c in calls.iter().rev().take(6) {
        let neighbors = world.neighbors(c.callee, c.caller);
        let views = vec![NeighborView::LocationOnly; neighbors.len()];
        let attitude = world.profiles()[c.callee].attitude;
        print!("  {} -> {} in {} with {} nearby:", c.caller, c.callee, s.format_context(&c.context), neighbors.len());
        for a in [Action::RING, Action::IGNORE] {
            let (callee, caller, ns) = lookup_payoffs(&tables, &c.context, a, &views);
            print!("  {} {:+.2} ({attitude:?})", s.action_name(a), callee_reward(attitude, callee, caller, &ns));
        }
        println!();
    }
}
