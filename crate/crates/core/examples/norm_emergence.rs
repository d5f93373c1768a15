//! One XSIGA run: social experience and cohesion over time, then the norms
//! that most agents ended up following.
//!
//! cargo run --release --example norm_emergence -- [society] [seed]

use siga::agents::AgentKind;
use siga::metrics::{emerged_norms, maximal_norms, series, BehaviorTable};
use siga::norm::ContextSchema;
use siga::scenario::{PayoffTables, SimulationConfig, Society};
use siga::simulation::Simulation;

fn main() {
    let mut args = std::env::args().skip(1);
    let society: Society = args.next().map(|a| a.parse().expect("society")).unwrap_or(Society::Pragmatic);
    let seed: u64 = args.next().map(|a| a.parse().expect("seed")).unwrap_or(0);
    let s = ContextSchema::ringer();
    let config = SimulationConfig::default();
    let steps = config.world.steps;

    let mut sim = Simulation::new(AgentKind::Xsiga, society, config, PayoffTables::default(), seed);
    let log = sim.run(steps);
    println!("{} interactions", log.len());
    for p in series(&log, steps).iter().filter(|p| p.step % 2000 == 0) {
        println!(
            "  step {:>5}: social experience {:.3}  cohesion {:.3}",
            p.step,
            p.social_experience.unwrap_or(f64::NAN),
            p.cohesion.unwrap_or(f64::NAN)
        );
    }

    let behavior = BehaviorTable::from_simulation(&s, &sim);
    let report = emerged_norms(&s, &behavior, 1.0);
    println!("\n{} norms emerged; the most general of them:", report.iter().filter(|r| r.emerged).count());
    for r in maximal_norms(&report) {
        println!("  {:<45} {:.0}%", s.format_norm(&r.norm), 100.0 * r.adoption);
    }

    println!("\nagent 0 holds:");
    print!("{}", sim.agents()[0].population.dump(&s));
}
