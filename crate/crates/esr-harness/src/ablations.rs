//! Focused studies of the bootstrap posterior: update cost, bandit
//! convergence, and the effect of the replicate count on planning quality.

use std::time::Instant;

use esr_mcts::bts::BtsDistribution;
use esr_mcts::config::{AlgorithmTag, EnvTag, RunConfig};
use esr_mcts::envs::{bandit_pull, BanditParams, RandomMomdp, RandomMomdpParams};
use esr_mcts::rng::planner_rng;
use esr_mcts::{UtilityKind, UtilitySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::HarnessError;
use crate::experiment::{
    compensated_mean, run_planner_experiment, ExperimentConfig, ExperimentResult,
};

#[derive(Debug, Clone)]
pub struct BtsTiming {
    pub replicates: usize,
    /// Wall time of each repetition's batch of updates, in seconds.
    pub seconds_per_batch: Vec<f64>,
    pub updates_per_batch: usize,
}

impl BtsTiming {
    pub fn mean_seconds(&self) -> f64 {
        compensated_mean(&self.seconds_per_batch)
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean_seconds();
        let n = self.seconds_per_batch.len();
        if n < 2 {
            return 0.0;
        }
        self.seconds_per_batch
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / (n - 1) as f64
    }
}

/// Measure the wall time of posterior updates for each replicate count.
/// Utilities are pre-drawn so only the update itself is timed.
pub fn ablation_bts_runtime(
    j_values: &[usize],
    repetitions: usize,
    updates_per_batch: usize,
) -> Result<Vec<BtsTiming>, HarnessError> {
    if j_values.is_empty() {
        return Err(HarnessError::Config("no replicate counts given".into()));
    }
    if repetitions == 0 || updates_per_batch == 0 {
        return Err(HarnessError::Config(
            "repetitions and batch size must be positive".into(),
        ));
    }
    let mut timings = Vec::with_capacity(j_values.len());
    for (i, &j) in j_values.iter().enumerate() {
        let mut seconds = Vec::with_capacity(repetitions);
        for rep in 0..repetitions {
            let mut rng = ChaCha12Rng::seed_from_u64((i * repetitions + rep) as u64);
            let utilities: Vec<f64> = (0..updates_per_batch)
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
                .collect();
            let mut dist = BtsDistribution::new(j, 1.0, 1.0)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            // one throwaway update so allocation warm-up stays out of the clock
            dist.update(0.5, &mut rng);
            let start = Instant::now();
            for &u in &utilities {
                dist.update(u, &mut rng);
            }
            let elapsed = start.elapsed().as_secs_f64();
            std::hint::black_box(dist.mean_of_means());
            seconds.push(elapsed);
        }
        timings.push(BtsTiming {
            replicates: j,
            seconds_per_batch: seconds,
            updates_per_batch,
        });
    }
    Ok(timings)
}

/// Least-squares fit quality of time against replicate count. Returns
/// (slope, intercept, r_squared).
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    assert!(points.len() >= 2, "need at least two points to fit a line");
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r_squared)
}

#[derive(Debug, Clone)]
pub struct MomabCurve {
    pub replicates: usize,
    /// Per-trial utility, averaged over the seeds.
    pub mean_utility: Vec<f64>,
    /// arm_pull_frequency[arm][trial]: fraction of seeds pulling that arm.
    pub arm_pull_frequency: Vec<Vec<f64>>,
}

impl MomabCurve {
    pub fn trailing_mean(&self, window: usize) -> f64 {
        let n = self.mean_utility.len();
        let w = window.min(n);
        compensated_mean(&self.mean_utility[n - w..])
    }

    pub fn trailing_arm_frequency(&self, arm: usize, window: usize) -> f64 {
        let n = self.arm_pull_frequency[arm].len();
        let w = window.min(n);
        compensated_mean(&self.arm_pull_frequency[arm][n - w..])
    }
}

/// A tree-free bandit agent: one posterior per arm, Thompson choice each
/// trial, only the pulled arm's posterior updated.
pub fn ablation_momab(
    j_values: &[usize],
    trials: usize,
    seeds: &[u64],
) -> Result<Vec<MomabCurve>, HarnessError> {
    if j_values.is_empty() || seeds.is_empty() || trials == 0 {
        return Err(HarnessError::Config(
            "need replicate counts, seeds and a positive trial count".into(),
        ));
    }
    let params = BanditParams::default();
    let utility = UtilitySpec::new(UtilityKind::MomabScaledProduct);
    let arms = params.arms.len();
    let mut curves = Vec::with_capacity(j_values.len());
    for &j in j_values {
        let mut utility_totals = vec![0.0; trials];
        let mut pull_counts = vec![vec![0u32; trials]; arms];
        for &seed in seeds {
            let mut rng = planner_rng(seed, j as u64);
            let mut posteriors: Vec<BtsDistribution> = (0..arms)
                .map(|_| BtsDistribution::new(j, 1.0, 1.0))
                .collect::<Result<_, _>>()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            for trial in 0..trials {
                let mut best = 0;
                let mut best_sample = f64::NEG_INFINITY;
                for (arm, posterior) in posteriors.iter().enumerate() {
                    let sample = posterior.sample_mean(&mut rng);
                    if sample > best_sample {
                        best_sample = sample;
                        best = arm;
                    }
                }
                let reward = bandit_pull(&params, best, &mut rng);
                let u = utility
                    .eval(&reward)
                    .map_err(|e| HarnessError::Runtime(e.to_string()))?;
                posteriors[best].update(u, &mut rng);
                utility_totals[trial] += u;
                pull_counts[best][trial] += 1;
            }
        }
        let denom = seeds.len() as f64;
        curves.push(MomabCurve {
            replicates: j,
            mean_utility: utility_totals.iter().map(|t| t / denom).collect(),
            arm_pull_frequency: pull_counts
                .iter()
                .map(|row| row.iter().map(|&c| c as f64 / denom).collect())
                .collect(),
        });
    }
    Ok(curves)
}

/// Planner-quality sweep over replicate counts on the seeded random MOMDP
/// with the squared-objectives utility.
pub fn ablation_random_momdp(
    j_values: &[usize],
    episodes: usize,
    runs: usize,
    n_exec: usize,
    seed: u64,
    trailing_window: usize,
) -> Result<Vec<(usize, ExperimentResult)>, HarnessError> {
    if j_values.is_empty() {
        return Err(HarnessError::Config("no replicate counts given".into()));
    }
    let env = RandomMomdp::new(RandomMomdpParams::default())
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut results = Vec::with_capacity(j_values.len());
    for &j in j_values {
        let mut run = RunConfig::new(EnvTag::RandomMomdp, AlgorithmTag::Dmcts);
        run.episodes = episodes;
        run.n_exec = n_exec;
        run.seed = seed;
        run.replicates = j;
        let mut config =
            ExperimentConfig::new(run, UtilitySpec::new(UtilityKind::QuadraticSum));
        config.runs = runs;
        config.trailing_window = trailing_window;
        results.push((j, run_planner_experiment(&env, &config)?));
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_table_has_one_row_per_replicate_count() {
        let timings = ablation_bts_runtime(&[10, 100], 3, 200).unwrap();
        assert_eq!(timings.len(), 2);
        for t in &timings {
            assert_eq!(t.seconds_per_batch.len(), 3);
            assert!(t.seconds_per_batch.iter().all(|&s| s > 0.0));
            assert!(t.variance() >= 0.0);
        }
        assert!(timings[1].mean_seconds() > timings[0].mean_seconds());
    }

    #[test]
    fn linear_fit_recovers_an_exact_line() {
        let points = vec![(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)];
        let (slope, intercept, r2) = linear_fit(&points);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momab_agent_finds_the_balanced_arm() {
        let curves = ablation_momab(&[100], 2_000, &[0, 1, 2]).unwrap();
        let curve = &curves[0];
        assert_eq!(curve.mean_utility.len(), 2_000);
        let trailing = curve.trailing_mean(200);
        assert!(trailing > 0.9, "trailing utility only reached {trailing}");
        let balanced = curve.trailing_arm_frequency(1, 200);
        assert!(balanced > 0.9, "balanced-arm frequency {balanced}");
    }

    #[test]
    fn empty_inputs_are_config_errors() {
        assert!(matches!(
            ablation_bts_runtime(&[], 1, 1),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(
            ablation_momab(&[10], 0, &[1]),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(
            ablation_random_momdp(&[], 10, 1, 1, 0, 5),
            Err(HarnessError::Config(_))
        ));
    }
}
