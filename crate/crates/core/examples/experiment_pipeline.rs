//! What `siga run` and `siga stats` do, through the library: three short
//! experiments written to disk, then the paired comparison.
//!
//! cargo run --release --example experiment_pipeline -- [out-dir]

use std::path::PathBuf;

use siga::agents::AgentKind;
use siga::experiment::{run_experiment, run_stats, ExperimentSpec};
use siga::scenario::Society;

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("siga-pipeline"));
    let mut dirs = Vec::new();
    for kind in AgentKind::ALL {
        let dir = out.join(kind.name());
        let spec = ExperimentSpec { runs: 4, steps: 3000, ..ExperimentSpec::new(Society::Pragmatic, kind) };
        let runs = run_experiment(&spec, &dir).expect("experiment");
        let se: Vec<String> = runs.iter().map(|r| format!("{:.3}", r.social_experience.unwrap_or(f64::NAN))).collect();
        println!("{kind:>6} -> {}: {}", dir.display(), se.join(" "));
        dirs.push(dir);
    }

    let stats = out.join("stats.csv");
    for r in run_stats(&dirs, &stats).expect("stats") {
        println!("{:<17} xsiga vs {:<5} t = {:>8.2}  p = {:.2e}", r.metric, r.baseline, r.t, r.p);
    }
    println!("wrote {}", stats.display());
}
