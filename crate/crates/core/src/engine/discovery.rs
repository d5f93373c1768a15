//! Rule discovery: tournament selection, norm crossover and mutation, and
//! the two subsumption checks.

use rand::Rng;

use super::{ActionSet, Population};
use crate::norm::{Antecedent, Classifier, ClassifierParams, Context, Hyperparameters, Norm};

/// Swaps each key bound in either parent between the two children with
/// probability one half.
pub fn crossover<R: Rng + ?Sized>(a: &Antecedent, b: &Antecedent, rng: &mut R) -> (Antecedent, Antecedent) {
    let mut x = a.clone();
    let mut y = b.clone();
    for key in 0..a.len() {
        if (a.get(key).is_some() || b.get(key).is_some()) && rng.random_bool(0.5) {
            let xs = x.slots_mut();
            let tmp = xs[key];
            xs[key] = y.slots()[key];
            y.slots_mut()[key] = tmp;
        }
    }
    (x, y)
}

/// Flips the presence of each key with probability `mutation_prob`; added
/// keys take their value from `ctx`.
pub fn mutate<R: Rng + ?Sized>(antecedent: &Antecedent, ctx: &Context, hp: &Hyperparameters, rng: &mut R) -> Antecedent {
    let mut out = antecedent.clone();
    for (key, slot) in out.slots_mut().iter_mut().enumerate() {
        if rng.random_bool(hp.mutation_prob) {
            *slot = match slot {
                Some(_) => None,
                None => Some(ctx.value(key)),
            };
        }
    }
    out
}

/// Samples `ceil(fraction * |set|)` members with replacement and returns the
/// fittest (ties: higher prediction, then first drawn).
pub fn tournament_select<'a, R: Rng + ?Sized>(
    members: &[&'a Classifier],
    fraction: f64,
    rng: &mut R,
) -> &'a Classifier {
    assert!(!members.is_empty(), "tournament over an empty set");
    let size = ((fraction * members.len() as f64).ceil() as usize).max(1);
    let mut winner: Option<&Classifier> = None;
    for _ in 0..size {
        let c = members[rng.random_range(0..members.len())];
        let better = match winner {
            None => true,
            Some(w) => {
                c.params.fitness > w.params.fitness
                    || (c.params.fitness == w.params.fitness && c.params.prediction > w.params.prediction)
            }
        };
        if better {
            winner = Some(c);
        }
    }
    winner.expect("size >= 1")
}

fn can_subsume(c: &Classifier, hp: &Hyperparameters) -> bool {
    c.params.experience > hp.subsumption_experience_threshold && c.params.error < hp.error_threshold
}

/// Outcome of offering a child to its parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildFate {
    SubsumedBy(u64),
    Inserted(u64),
}

impl Population {
    /// Absorbs every member strictly generalized by the most general
    /// accurate, experienced member. Total numerosity is unchanged.
    /// Removed members are dropped from `aset`.
    pub fn subsume_action_set(&mut self, aset: &mut ActionSet, hp: &Hyperparameters) {
        let mut best: Option<&Classifier> = None;
        for c in aset.ids.iter().filter_map(|&id| self.get(id)) {
            if !can_subsume(c, hp) {
                continue;
            }
            let replace = match best {
                None => true,
                Some(b) => {
                    let (cs, bs) = (c.antecedent().specificity(), b.antecedent().specificity());
                    cs < bs
                        || (cs == bs && c.params.numerosity > b.params.numerosity)
                        || (cs == bs && c.params.numerosity == b.params.numerosity && c.id < b.id)
                }
            };
            if replace {
                best = Some(c);
            }
        }
        let Some(subsumer) = best else { return };
        let (sid, sante) = (subsumer.id, subsumer.antecedent().clone());
        let victims: Vec<u64> = aset
            .ids
            .iter()
            .filter_map(|&id| self.get(id))
            .filter(|c| c.id != sid && sante.is_more_general(c.antecedent()))
            .map(|c| c.id)
            .collect();
        let mut absorbed = 0;
        for id in &victims {
            absorbed += self.remove(*id).expect("victim present").params.numerosity;
        }
        self.get_mut(sid).expect("subsumer present").params.numerosity += absorbed;
        aset.ids.retain(|id| !victims.contains(id));
    }

    /// Discards `child` into the first eligible parent (same consequent,
    /// strictly more general, accurate and experienced), else inserts it.
    pub fn subsume_or_insert_child(
        &mut self,
        child: Norm,
        params: ClassifierParams,
        parents: &[u64],
        hp: &Hyperparameters,
    ) -> ChildFate {
        for &pid in parents {
            if let Some(p) = self.get(pid) {
                if p.action() == child.consequent
                    && p.antecedent().is_more_general(&child.antecedent)
                    && can_subsume(p, hp)
                {
                    self.get_mut(pid).expect("parent present").params.numerosity += 1;
                    return ChildFate::SubsumedBy(pid);
                }
            }
        }
        ChildFate::Inserted(self.insert(child, params))
    }

    /// Numerosity-weighted mean of a per-classifier quantity over the set.
    fn set_mean(&self, aset: &ActionSet, f: impl Fn(&Classifier) -> f64) -> Option<f64> {
        let (mut sum, mut n) = (0.0, 0u32);
        for c in aset.ids.iter().filter_map(|&id| self.get(id)) {
            sum += f(c) * c.params.numerosity as f64;
            n += c.params.numerosity;
        }
        (n > 0).then(|| sum / n as f64)
    }

    /// Breeds two children from the action set when it is experienced enough
    /// and has not bred recently. Returns whether the GA fired.
    pub fn run_ga<R: Rng + ?Sized>(
        &mut self,
        aset: &ActionSet,
        ctx: &Context,
        step: u64,
        hp: &Hyperparameters,
        rng: &mut R,
    ) -> bool {
        let Some(mean_exp) = self.set_mean(aset, |c| c.params.experience as f64) else {
            return false;
        };
        let mean_last = self.set_mean(aset, |c| c.params.last_ga_step as f64).expect("non-empty");
        if mean_exp < hp.ga_threshold || (step as f64 - mean_last) < hp.ga_threshold {
            return false;
        }
        for &id in &aset.ids {
            if let Some(c) = self.get_mut(id) {
                c.params.last_ga_step = step;
            }
        }

        let members: Vec<&Classifier> = aset.ids.iter().filter_map(|&id| self.get(id)).collect();
        let p1 = tournament_select(&members, hp.tournament_fraction, rng).clone();
        let p2 = tournament_select(&members, hp.tournament_fraction, rng).clone();

        let (mut a1, mut a2) = (p1.antecedent().clone(), p2.antecedent().clone());
        if rng.random_bool(hp.crossover_prob) {
            (a1, a2) = crossover(&a1, &a2, rng);
        }
        let a1 = mutate(&a1, ctx, hp, rng);
        let a2 = mutate(&a2, ctx, hp, rng);

        let (pp, pe) = (
            (p1.params.prediction + p2.params.prediction) / 2.0,
            (p1.params.error + p2.params.error) / 2.0,
        );
        let child_params = ClassifierParams {
            prediction: pp,
            error: pe,
            fitness: 0.1 * (p1.params.fitness + p2.params.fitness) / 2.0,
            numerosity: 1,
            experience: 0,
            action_set_size: (p1.params.action_set_size + p2.params.action_set_size) / 2.0,
            last_ga_step: step,
        };
        let parents = [p1.id, p2.id];
        for ante in [a1, a2] {
            let child = Norm::new(ante, aset.action);
            self.subsume_or_insert_child(child, child_params.clone(), &parents, hp);
        }
        self.delete_excess(hp, rng);
        true
    }
}
