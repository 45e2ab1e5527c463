//! Multi-objective bandits: one-step environments for posterior sanity
//! checks and utility-convergence experiments.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::EnvError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::ReturnVector;

/// Arm means of the default two-objective bandit. The second arm is
/// optimal under the scaled product utility.
pub const MOMAB_ARM_MEANS: [[f64; 2]; 4] = [[0.0, 0.8], [0.4, 0.4], [0.8, 0.0], [0.9, 0.1]];

#[derive(Debug, Clone, PartialEq)]
pub struct BanditParams {
    pub arms: Vec<Vec<f64>>,
    /// Per-objective Gaussian noise variance, uncorrelated across objectives.
    pub variance: f64,
}

impl Default for BanditParams {
    fn default() -> Self {
        BanditParams {
            arms: MOMAB_ARM_MEANS.iter().map(|m| m.to_vec()).collect(),
            variance: 0.0005,
        }
    }
}

/// Draw one reward vector from an arm: its mean plus independent Gaussian
/// noise per objective.
pub fn bandit_pull(params: &BanditParams, arm: usize, rng: &mut dyn RngCore) -> ReturnVector {
    let means = &params.arms[arm];
    if params.variance == 0.0 {
        return ReturnVector::new(means.clone());
    }
    let noise = Normal::new(0.0, params.variance.sqrt()).expect("validated at construction");
    ReturnVector::new(means.iter().map(|m| m + noise.sample(rng)).collect())
}

#[derive(Debug, Clone)]
pub struct Momab {
    params: BanditParams,
}

impl Momab {
    pub fn new(params: BanditParams) -> Result<Self, EnvError> {
        if params.arms.is_empty() {
            return Err(EnvError::BadConfig("bandit needs at least one arm".into()));
        }
        let dim = params.arms[0].len();
        if dim == 0 {
            return Err(EnvError::BadConfig("arm mean vectors are empty".into()));
        }
        if params.arms.iter().any(|a| a.len() != dim) {
            return Err(EnvError::BadConfig(
                "arm mean vectors have mismatched lengths".into(),
            ));
        }
        if !(params.variance >= 0.0) {
            return Err(EnvError::BadConfig(format!(
                "noise variance {} must be non-negative",
                params.variance
            )));
        }
        Ok(Momab { params })
    }

    pub fn params(&self) -> &BanditParams {
        &self.params
    }
}

impl EnvironmentModel for Momab {
    type State = ();

    fn num_objectives(&self) -> usize {
        self.params.arms[0].len()
    }

    fn horizon(&self) -> usize {
        1
    }

    fn num_actions(&self, _state: &()) -> usize {
        self.params.arms.len()
    }

    fn initial_state(&self) {}

    fn step(&self, _state: &(), action: usize, rng: &mut dyn RngCore) -> Step<()> {
        assert!(action < self.params.arms.len(), "arm {action} out of range");
        Step {
            state: (),
            reward: bandit_pull(&self.params, action, rng),
            terminal: true,
        }
    }
}

/// One arm paying `[1, 1]` with probability one half and `[0, 0]`
/// otherwise; under a product utility the expected utility is 0.5 while
/// the utility of the expected return would be 0.25.
#[derive(Debug, Clone, Default)]
pub struct SingleArmDemo;

impl EnvironmentModel for SingleArmDemo {
    type State = ();

    fn num_objectives(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        1
    }

    fn num_actions(&self, _state: &()) -> usize {
        1
    }

    fn initial_state(&self) {}

    fn step(&self, _state: &(), action: usize, rng: &mut dyn RngCore) -> Step<()> {
        assert_eq!(action, 0, "the demo bandit has a single arm");
        let reward = if rng.gen_bool(0.5) {
            ReturnVector::new(vec![1.0, 1.0])
        } else {
            ReturnVector::zeros(2)
        };
        Step {
            state: (),
            reward,
            terminal: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{UtilityKind, UtilitySpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn zero_variance_returns_the_mean_exactly() {
        let params = BanditParams {
            variance: 0.0,
            ..BanditParams::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let reward = bandit_pull(&params, 1, &mut rng);
        assert_eq!(reward.values(), &[0.4, 0.4]);
    }

    #[test]
    fn noise_variance_matches_the_configuration() {
        let params = BanditParams::default();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let r = bandit_pull(&params, 1, &mut rng);
            sum += r[0];
            sum_sq += r[0] * r[0];
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 0.4).abs() < 0.001, "empirical mean {mean}");
        assert!(
            (var - 0.0005).abs() < 0.0001,
            "empirical variance {var}"
        );
    }

    #[test]
    fn optimal_arm_has_the_highest_expected_scaled_product() {
        let env = Momab::new(BanditParams::default()).unwrap();
        let spec = UtilitySpec::new(UtilityKind::MomabScaledProduct);
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let mut means = Vec::new();
        for arm in 0..4 {
            let mut total = 0.0;
            let pulls = 10_000;
            for _ in 0..pulls {
                let step = env.step(&(), arm, &mut rng);
                total += spec.eval(&step.reward).unwrap();
            }
            means.push(total / pulls as f64);
        }
        assert!(
            (means[1] - 1.0).abs() < 0.02,
            "balanced arm utility {}",
            means[1]
        );
        for arm in [0usize, 2, 3] {
            assert!(
                means[1] > means[arm] + 0.3,
                "balanced arm must dominate arm {arm} ({} vs {})",
                means[1],
                means[arm]
            );
        }
    }

    #[test]
    fn demo_bandit_expected_utility_is_one_half() {
        let env = SingleArmDemo;
        let spec = UtilitySpec::new(UtilityKind::Product);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut total = 0.0;
        let pulls = 10_000;
        for _ in 0..pulls {
            let step = env.step(&(), 0, &mut rng);
            assert!(step.terminal);
            total += spec.eval(&step.reward).unwrap();
        }
        let mean = total / pulls as f64;
        assert!((mean - 0.5).abs() < 0.03, "mean demo utility {mean}");
    }

    #[test]
    fn rejects_inconsistent_arms() {
        let params = BanditParams {
            arms: vec![vec![0.1, 0.2], vec![0.3]],
            variance: 0.0,
        };
        assert!(Momab::new(params).is_err());
        let params = BanditParams {
            arms: vec![],
            variance: 0.0,
        };
        assert!(Momab::new(params).is_err());
        let params = BanditParams {
            variance: -1.0,
            ..BanditParams::default()
        };
        assert!(Momab::new(params).is_err());
    }
}
