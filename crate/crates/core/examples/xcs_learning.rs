//! One selfish learner trained on uniformly drawn contexts with its own
//! payoff as reward, then its population and greedy policy.
//!
//! cargo run --release --example xcs_learning -- [steps] [cap]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siga::agents::{learn, siga_decide};
use siga::engine::Population;
use siga::norm::{Action, ContextSchema, Hyperparameters};
use siga::scenario::{callee_reward, lookup_payoffs, Attitude, PayoffTables};

fn main() {
    let mut args = std::env::args().skip(1);
    let steps: u64 = args.next().map(|a| a.parse().expect("steps")).unwrap_or(5000);
    let cap: u32 = args.next().map(|a| a.parse().expect("cap")).unwrap_or(30);
    let s = ContextSchema::ringer();
    let hp = Hyperparameters { max_micro_population: cap, ..Default::default() };
    let tables = PayoffTables::default();
    let reward = |ctx: &_, a| {
        let (callee, caller, ns) = lookup_payoffs(&tables, ctx, a, &[]);
        callee_reward(Attitude::Selfish, callee, caller, &ns)
    };

    let contexts = s.enumerate_contexts();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pop = Population::new();
    let mut total = 0.0;
    for step in 1..=steps {
        let ctx = &contexts[rng.random_range(0..contexts.len())];
        let d = siga_decide(&mut pop, ctx, s.num_actions(), step, &hp, &mut rng);
        let r = reward(ctx, d.action);
        total += r;
        learn(&mut pop, d.action_set, ctx, r, step, &hp, &mut rng);
    }
    println!("mean reward over {steps} steps: {:.3}", total / steps as f64);
    println!("\n{} macro-classifiers, {} micro:", pop.len(), pop.micro_size());
    print!("{}", pop.dump(&s));

    let mut right = 0;
    println!("\ngreedy policy (* = not the best action):");
    for ctx in &contexts {
        let best = if reward(ctx, Action::RING) >= reward(ctx, Action::IGNORE) { Action::RING } else { Action::IGNORE };
        let got = pop.greedy_action(ctx, s.num_actions());
        right += (got == Some(best)) as usize;
        let name = got.map(|a| s.action_name(a)).unwrap_or("-");
        println!("  {:<55} {name}{}", s.format_context(ctx), if got == Some(best) { "" } else { " *" });
    }
    println!("{right}/{} contexts right", contexts.len());
}
