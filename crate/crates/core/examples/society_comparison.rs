//! Fixed, NSIGA and XSIGA agents in one society, eight paired seeds each,
//! compared with paired t-tests. Pass `appendix` to use the alternate
//! payoff tables.
//!
//! cargo run --release --example society_comparison -- [society] [steps] [appendix]

use siga::agents::AgentKind;
use siga::experiment::{run_all, ExperimentSpec, RunSummary};
use siga::metrics::maximal_norms;
use siga::norm::ContextSchema;
use siga::scenario::{PayoffTables, Society};
use siga::stats::{cohens_d, mean, paired_t_test};

fn main() {
    let mut args = std::env::args().skip(1);
    let society: Society = args.next().map(|s| s.parse().unwrap()).unwrap_or(Society::Pragmatic);
    let steps: u64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let payoffs = match args.next().as_deref() {
        Some("appendix") => PayoffTables::appendix(),
        _ => PayoffTables::default(),
    };
    let schema = ContextSchema::ringer();

    let mut results: Vec<(AgentKind, Vec<RunSummary>)> = Vec::new();
    for kind in AgentKind::ALL {
        let spec = ExperimentSpec { steps, payoffs: payoffs.clone(), ..ExperimentSpec::new(society, kind) };
        let runs: Vec<RunSummary> = run_all(&spec).unwrap().into_iter().map(|o| o.summary).collect();
        let se: Vec<f64> = runs.iter().map(|r| r.social_experience.unwrap()).collect();
        let co: Vec<f64> = runs.iter().map(|r| r.cohesion.unwrap_or(f64::NAN)).collect();
        println!("{kind:>6}: social experience {:.3}  cohesion {:.3}", mean(&se), mean(&co));
        if kind.learns() {
            for r in &runs {
                let norms: Vec<String> = maximal_norms(&r.norms)
                    .iter()
                    .map(|n| format!("{} ({:.0}%)", schema.format_norm(&n.norm), 100.0 * n.adoption))
                    .collect();
                println!("        seed {}: {}", r.seed, norms.join(", "));
            }
        }
        results.push((kind, runs));
    }

    let metric = |runs: &[RunSummary], f: fn(&RunSummary) -> Option<f64>| -> Vec<f64> {
        runs.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect()
    };
    let metrics: [(&str, fn(&RunSummary) -> Option<f64>); 2] =
        [("social experience", |r| r.social_experience), ("cohesion", |r| r.cohesion)];
    let xsiga = &results[2].1;
    for (name, f) in metrics {
        for (kind, runs) in &results[..2] {
            let (a, b) = (metric(xsiga, f), metric(runs, f));
            let t = paired_t_test(&a, &b).unwrap();
            let d = cohens_d(&a, &b).map(|d| format!("{d:.2}")).unwrap_or_else(|e| e.to_string());
            println!("{name}: xsiga vs {kind}: t = {:.2}, p = {:.2e}, d = {d}", t.t, t.p);
        }
    }
    let (n, f) = (metric(&results[1].1, metrics[0].1), metric(&results[0].1, metrics[0].1));
    let t = paired_t_test(&n, &f).unwrap();
    println!("social experience: nsiga vs fixed: t = {:.2}, p = {:.2e}", t.t, t.p);
}
