use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siga::agents::{learn, siga_decide};
use siga::engine::{select_action, Mode, Population};
use siga::norm::{Action, Antecedent, ClassifierParams, Context, ContextSchema, Hyperparameters, Norm};

type RuleSpec = (Option<u8>, Option<u8>, Option<u8>, u8, f64, f64, u32);

fn rule() -> impl Strategy<Value = RuleSpec> {
    (
        proptest::option::of(0u8..5),
        proptest::option::of(0u8..4),
        proptest::option::of(0u8..2),
        0u8..2,
        -1.5f64..1.5,
        prop_oneof![Just(0.0), 0.0f64..1.0],
        1u32..4,
    )
}

fn context() -> impl Strategy<Value = Context> {
    (0u8..5, 0u8..4, 0u8..2).prop_map(|(l, r, u)| Context::from_indices(vec![l, r, u]))
}

fn build(rules: &[RuleSpec]) -> Population {
    let mut pop = Population::new();
    for &(l, r, u, a, p, f, n) in rules {
        let norm = Norm::new(Antecedent::from_slots(vec![l, r, u]), Action(a));
        pop.insert(norm, ClassifierParams { prediction: p, fitness: f, numerosity: n, ..ClassifierParams::covering(0) });
    }
    pop
}

fn slot_match(slots: &[Option<u8>], ctx: &Context) -> bool {
    slots.iter().enumerate().all(|(k, s)| s.is_none_or(|v| v == ctx.values()[k]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn prediction_array_is_the_fitness_weighted_mean(rules in proptest::collection::vec(rule(), 0..30), ctx in context()) {
        let pop = build(&rules);
        let ms = pop.match_set(&ctx);
        let pa = pop.prediction_array(&ms, 2);
        for a in [Action::RING, Action::IGNORE] {
            let supporters: Vec<_> = pop
                .classifiers()
                .iter()
                .filter(|c| c.action() == a && slot_match(c.antecedent().slots(), &ctx))
                .collect();
            match pa.get(a) {
                None => prop_assert!(supporters.is_empty()),
                Some(v) => {
                    let f: f64 = supporters.iter().map(|c| c.params.fitness).sum();
                    let pf: f64 = supporters.iter().map(|c| c.params.fitness * c.params.prediction).sum();
                    let want = if f > 0.0 { pf / f } else { 0.0 };
                    prop_assert!(!supporters.is_empty());
                    prop_assert!((v - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn match_and_action_sets_agree_with_a_filter(rules in proptest::collection::vec(rule(), 0..30), ctx in context()) {
        let pop = build(&rules);
        let ms = pop.match_set(&ctx);
        let want: Vec<u64> = pop
            .classifiers()
            .iter()
            .filter(|c| slot_match(c.antecedent().slots(), &ctx))
            .map(|c| c.id)
            .collect();
        prop_assert_eq!(&ms.ids, &want);
        for a in [Action::RING, Action::IGNORE] {
            let aset = pop.action_set(&ms, a);
            let want_a: Vec<u64> = want.iter().copied().filter(|&id| pop.get(id).unwrap().action() == a).collect();
            prop_assert_eq!(aset.ids, want_a);
        }
    }

    #[test]
    fn normalized_accuracy_sums_to_one(rules in proptest::collection::vec(rule(), 1..30), r in -1.5f64..1.5) {
        let schema = ContextSchema::ringer();
        let hp = Hyperparameters::default();
        let mut pop = build(&rules);
        let ctx = schema.enumerate_contexts().into_iter().find(|c| !pop.match_set(c).ids.is_empty()).unwrap_or_else(|| {
            Context::from_indices(vec![0, 0, 0])
        });
        let ms = pop.match_set(&ctx);
        prop_assume!(!ms.ids.is_empty());
        let a = pop.get(ms.ids[0]).unwrap().action();
        let aset = pop.action_set(&ms, a);
        pop.update_action_set(&aset, r, &hp).unwrap();
        let total: f64 = pop.relative_accuracies(&aset, &hp).iter().map(|(_, k)| k).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn learning_respects_the_cap(seed in any::<u64>(), steps in 1u64..200) {
        let hp = Hyperparameters::default();
        let contexts = ContextSchema::ringer().enumerate_contexts();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pop = Population::new();
        for step in 1..=steps {
            let ctx = &contexts[rng.random_range(0..contexts.len())];
            let d = siga_decide(&mut pop, ctx, 2, step, &hp, &mut rng);
            prop_assert!(pop.micro_size() <= hp.max_micro_population);
            prop_assert!(!d.action_set.is_empty());
            learn(&mut pop, d.action_set, ctx, rng.random_range(-1.5..1.5), step, &hp, &mut rng);
            prop_assert!(pop.micro_size() <= hp.max_micro_population);
            let mut norms: Vec<&Norm> = pop.classifiers().iter().map(|c| &c.norm).collect();
            norms.sort();
            norms.dedup();
            prop_assert_eq!(norms.len(), pop.len());
        }
    }
}

fn single_rule() -> (Population, siga::engine::ActionSet) {
    let s = ContextSchema::ringer();
    let mut pop = Population::new();
    pop.insert(s.norm(&[("urgent", "true")], "ring").unwrap(), ClassifierParams::covering(0));
    let ctx = s.context(&[("calleeLoc", "H"), ("callerRel", "friend"), ("urgent", "true")]).unwrap();
    let aset = pop.action_set(&pop.match_set(&ctx), Action::RING);
    (pop, aset)
}

#[test]
fn prediction_converges_geometrically() {
    let hp = Hyperparameters::default();
    let (mut pop, aset) = single_rule();
    for _ in 0..200 {
        pop.update_action_set(&aset, 1.0, &hp).unwrap();
    }
    let p = pop.classifiers()[0].params.prediction;
    assert!((p - 1.0).abs() < 1e-6);
    // |r - p| shrinks by (1 - beta) per step from |1 - 0.01|
    assert_abs_diff_eq!(1.0 - p, 0.99 * 0.9f64.powi(200), epsilon = 1e-12);
}

#[test]
fn error_decays_under_constant_reward() {
    let hp = Hyperparameters::default();
    let (mut pop, aset) = single_rule();
    for _ in 0..500 {
        pop.update_action_set(&aset, 1.0, &hp).unwrap();
    }
    assert!(pop.classifiers()[0].params.error < 1e-3);
}

#[test]
fn explore_is_uniform() {
    let s = ContextSchema::ringer();
    let hp = Hyperparameters::default();
    let ctx = s.context(&[("calleeLoc", "P"), ("callerRel", "colleague"), ("urgent", "false")]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pop = Population::new();
    let mut ms = pop.match_set(&ctx);
    pop.cover(&mut ms, &ctx, 2, 0, &hp, &mut rng);
    let pa = pop.prediction_array(&ms, 2);
    let draws = 100_000;
    let rings = (0..draws).filter(|_| select_action(&pa, Mode::Explore, 2, &mut rng).unwrap() == Action::RING).count();
    assert!((rings as f64 / draws as f64 - 0.5).abs() < 0.01);
}

#[test]
fn replay_gives_identical_populations() {
    let s = ContextSchema::ringer();
    let hp = Hyperparameters::default();
    let contexts = s.enumerate_contexts();
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pop = Population::new();
        for step in 1..=1000 {
            let ctx = &contexts[rng.random_range(0..contexts.len())];
            let d = siga_decide(&mut pop, ctx, 2, step, &hp, &mut rng);
            learn(&mut pop, d.action_set, ctx, rng.random_range(-1.0..1.0), step, &hp, &mut rng);
        }
        pop
    };
    assert_eq!(run(4), run(4));
    assert_eq!(run(4).dump(&s), run(4).dump(&s));
}

#[test]
fn ga_children_stay_in_the_niche() {
    let s = ContextSchema::ringer();
    let hp = Hyperparameters { ga_threshold: 0.0, ..Default::default() };
    let ctx = s.context(&[("calleeLoc", "L"), ("callerRel", "stranger"), ("urgent", "true")]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for step in 1..200 {
        let mut pop = Population::new();
        pop.insert(s.norm(&[("calleeLoc", "L")], "ignore").unwrap(), ClassifierParams::covering(0));
        pop.insert(s.norm(&[("urgent", "true"), ("callerRel", "stranger")], "ignore").unwrap(), ClassifierParams::covering(0));
        let aset = pop.action_set(&pop.match_set(&ctx), Action::IGNORE);
        assert!(pop.run_ga(&aset, &ctx, step, &hp, &mut rng));
        assert!(pop.classifiers().iter().all(|c| c.antecedent().matches(&ctx).unwrap() && c.action() == Action::IGNORE));
        assert!(pop.micro_size() <= 4);
    }
}
