//! Population cap enforcement by roulette deletion.
//!
//! A classifier's vote is `action_set_size * n`, scaled up by
//! `mean_fitness / (F / n)` once it is experienced and its per-micro fitness
//! has fallen below `fitness_falloff * mean_fitness`.

use rand::Rng;

use super::Population;
use crate::norm::{Classifier, Hyperparameters};

/// Deletion vote of `c` given the population mean fitness per micro-classifier.
pub fn deletion_vote(c: &Classifier, mean_fitness: f64, hp: &Hyperparameters) -> f64 {
    let n = c.params.numerosity as f64;
    let vote = c.params.action_set_size * n;
    let micro_fitness = c.params.fitness / n;
    if c.params.experience > hp.deletion_experience_threshold && micro_fitness < hp.fitness_falloff * mean_fitness {
        if micro_fitness > 0.0 {
            vote * mean_fitness / micro_fitness
        } else {
            f64::MAX / 1e3
        }
    } else {
        vote
    }
}

impl Population {
    pub fn mean_micro_fitness(&self) -> f64 {
        let n = self.micro_size();
        if n == 0 {
            return 0.0;
        }
        self.classifiers.iter().map(|c| c.params.fitness).sum::<f64>() / n as f64
    }

    /// Removes one micro-classifier at a time until the cap holds.
    pub fn delete_excess<R: Rng + ?Sized>(&mut self, hp: &Hyperparameters, rng: &mut R) {
        while self.micro_size() > hp.max_micro_population {
            let idx = self.roulette_victim(hp, rng);
            let c = &mut self.classifiers[idx];
            c.params.numerosity -= 1;
            if c.params.numerosity == 0 {
                self.classifiers.remove(idx);
            }
        }
    }

    fn roulette_victim<R: Rng + ?Sized>(&self, hp: &Hyperparameters, rng: &mut R) -> usize {
        let mean = self.mean_micro_fitness();
        let votes: Vec<f64> = self.classifiers.iter().map(|c| deletion_vote(c, mean, hp)).collect();
        let total: f64 = votes.iter().sum();
        if !(total > 0.0) {
            return rng.random_range(0..self.classifiers.len());
        }
        let mut point = rng.random::<f64>() * total;
        for (i, v) in votes.iter().enumerate() {
            if point < *v {
                return i;
            }
            point -= v;
        }
        votes.len() - 1
    }
}
