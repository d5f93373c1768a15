//! Alice ignores a call at a meeting except when it is urgent family.
//! She rings and explains; two observers judge the explanation.

use siga::engine::Population;
use siga::explanation::{build_explanation, evaluate_explanation, perceive_compliance, FollowMode};
use siga::norm::{Action, ClassifierParams, ContextSchema};
use siga::scenario::observable_context;

fn rule(prediction: f64, fitness: f64) -> ClassifierParams {
    ClassifierParams { prediction, fitness, ..ClassifierParams::covering(0) }
}

fn main() {
    let s = ContextSchema::ringer();
    let ctx = s.context(&[("calleeLoc", "M"), ("callerRel", "family"), ("urgent", "true")]).unwrap();

    let mut alice = Population::new();
    alice.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), rule(1.0, 0.5));
    alice.insert(s.norm(&[("callerRel", "family")], "ring").unwrap(), rule(0.8, 0.5));
    alice.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), rule(0.2, 0.5));
    let ms = alice.match_set(&ctx);
    let action = alice.prediction_array(&ms, 2).best().unwrap();
    let expl = build_explanation(&alice, &alice.action_set(&ms, action)).unwrap();
    println!("alice: {} because\n{}", s.action_name(action), expl.to_wire(&s));

    let observable = observable_context(&ctx, Some(&expl));
    println!("\nobservers see: {}", s.format_antecedent(&observable));

    let mut bob = Population::new();
    bob.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), rule(0.9, 0.6));
    let mut charlie = Population::new();
    charlie.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), rule(1.0, 0.6));
    charlie.insert(s.norm(&[("calleeLoc", "M")], "ignore").unwrap(), rule(0.4, 0.6));

    for (name, observer) in [("bob", &bob), ("charlie", &charlie)] {
        let v = evaluate_explanation(observer, &expl, Action::RING, &observable, 2, FollowMode::Generalized);
        let without = perceive_compliance(observer, Action::RING, &observable_context(&ctx, None), None, 2, FollowMode::Generalized);
        println!(
            "\n{name}: {} (expected {}; without the explanation: {})",
            if v.accepted { "accepts" } else { "sanctions" },
            v.induced_action.map(|a| s.action_name(a)).unwrap_or("-"),
            if without { "accepts" } else { "sanctions" },
        );
        for n in &v.matched_explanation_norms {
            println!("  follows  {}", s.format_norm(n));
        }
        for n in &v.violated_own_norms {
            println!("  violated {}", s.format_norm(n));
        }
    }
}
