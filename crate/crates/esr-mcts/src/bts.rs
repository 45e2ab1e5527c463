//! Bootstrap Thompson sampling over scalar utilities.
//!
//! Instead of a parametric posterior, a [`BtsDistribution`] keeps `J`
//! bootstrap replicates of a running utility average. Each observed utility
//! is assigned to a random half of the replicates, so the spread across
//! replicate means approximates posterior uncertainty about the true expected
//! utility, and sampling one replicate uniformly plays the role of sampling
//! from a posterior.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BtsError {
    #[error("a bootstrap distribution needs at least one replicate")]
    NoReplicates,
    #[error("beta_init must be positive (it is a pseudo-count), got {0}")]
    NonPositiveBeta(f64),
}

/// `J` bootstrap replicates of a running mean: replicate `j` holds a utility
/// sum `alpha_j` and an observation count `beta_j`, its mean being
/// `alpha_j / beta_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BtsDistribution {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl BtsDistribution {
    /// `alpha_init` may be any finite value (negative values bias early
    /// sampled means low); `beta_init` must be positive so replicate means
    /// are always defined.
    pub fn new(replicates: usize, alpha_init: f64, beta_init: f64) -> Result<Self, BtsError> {
        if replicates == 0 {
            return Err(BtsError::NoReplicates);
        }
        if !(beta_init > 0.0) {
            return Err(BtsError::NonPositiveBeta(beta_init));
        }
        Ok(BtsDistribution {
            alphas: vec![alpha_init; replicates],
            betas: vec![beta_init; replicates],
        })
    }

    pub fn replicates(&self) -> usize {
        self.alphas.len()
    }

    /// Folds one observed utility into a random half of the replicates: one
    /// fair coin per replicate, in index order, heads adding the utility to
    /// `alpha_j` and one count to `beta_j`. Cost is linear in `J`.
    ///
    /// Panics on non-finite utilities; those indicate a broken reward or
    /// utility computation upstream and would poison every later sample.
    pub fn update<R: Rng + ?Sized>(&mut self, utility: f64, rng: &mut R) {
        assert!(
            utility.is_finite(),
            "refusing to fold non-finite utility {utility} into a bootstrap distribution"
        );
        for j in 0..self.alphas.len() {
            if rng.gen_bool(0.5) {
                self.alphas[j] += utility;
                self.betas[j] += 1.0;
            }
        }
    }

    /// Thompson draw: the mean of one uniformly chosen replicate.
    pub fn sample_mean<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let j = rng.gen_range(0..self.alphas.len());
        self.alphas[j] / self.betas[j]
    }

    pub fn replicate_mean(&self, j: usize) -> f64 {
        self.alphas[j] / self.betas[j]
    }

    /// Average of all replicate means.
    pub fn mean_of_means(&self) -> f64 {
        let sum: f64 = (0..self.replicates()).map(|j| self.replicate_mean(j)).sum();
        sum / self.replicates() as f64
    }
}
