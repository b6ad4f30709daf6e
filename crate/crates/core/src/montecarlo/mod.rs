//! Monte Carlo simulation of the experiment.
//!
//! The quantum model postselects each trial with the exact success
//! probability and draws the probe momentum from the exact conditional
//! density. The classical baseline replaces the superposition by a random
//! arm choice whose kick is either `-r` (near arm) or `0` (far arm), with an
//! arbitrary arm-dependent acceptance rule standing in for postselection.
//! Whatever the rule, the accepted mean stays in `[-r, 0]`.
//!
//! Trials are processed in fixed-size batches; batch `b` draws from substream
//! `b` and partial statistics are merged in batch order, so a seed fixes the
//! output bit for bit for any thread count.

mod sampler;
mod stream;

pub use sampler::InverseCdfSampler;
pub use stream::{stream, Stream};

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol;
use crate::statistics::{self, neumaier_sum};
use stream::{substream, DOMAIN_CLASSICAL, DOMAIN_DETECTION, DOMAIN_QUANTUM};

/// Trials per batch (and per substream).
pub const BATCH: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every trial is a Bernoulli postselection.
    Full,
    /// Every trial is drawn from the postselected density directly.
    Conditioned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub mode: Mode,
    pub model: Model,
}

impl RunConfig {
    pub fn new(n_trials: u64, seed: u64, mode: Mode, model: Model) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::InvalidParameter {
                field: "n_trials",
                rule: "must be >= 1".to_string(),
            });
        }
        Ok(Self {
            n_trials,
            seed,
            mode,
            model,
        })
    }
}

/// One simulated run. Momentum (widths) and position (m) are present iff postselected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub postselected: bool,
    pub momentum: Option<f64>,
    pub position_m: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub model: Model,
    pub mode: Mode,
    pub n_trials: u64,
    pub n_postselected: u64,
    /// Observed acceptance fraction; `None` in conditioned mode.
    pub empirical_p_success: Option<f64>,
    /// Closed-form success probability used by the quantum model.
    pub p_success_exact: Option<f64>,
    /// Conditioned mode: Bernoulli trials the postselected samples would have
    /// cost, drawn from the geometric distribution.
    pub equivalent_trials: Option<u64>,
    /// Mean postselected momentum, in widths.
    pub postselected_mean: f64,
    pub sample_std: f64,
    pub standard_error: f64,
    /// `postselected_mean / standard_error`.
    pub z_against_null: f64,
    pub position_mean_m: Option<f64>,
    pub position_standard_error_m: Option<f64>,
}

/// Welford accumulator, merged with Chan's pairwise update.
#[derive(Clone, Copy, Debug, Default)]
struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    fn std(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

#[derive(Default)]
struct BatchResult {
    trials: u64,
    acc: Accumulator,
    geometric_trials: u64,
    outcomes: Vec<TrialOutcome>,
}

fn batch_count(n: u64) -> u64 {
    n.div_ceil(BATCH)
}

fn batch_len(n: u64, b: u64) -> u64 {
    BATCH.min(n - b * BATCH)
}

fn summarize(
    config: &RunConfig,
    batches: Vec<BatchResult>,
    p_success_exact: Option<f64>,
    meters_per_width: Option<f64>,
) -> (RunSummary, Vec<TrialOutcome>) {
    let mut acc = Accumulator::default();
    let mut geometric = 0u64;
    let mut outcomes = Vec::new();
    let mut trials = 0;
    for b in batches {
        acc.merge(&b.acc);
        geometric += b.geometric_trials;
        trials += b.trials;
        outcomes.extend(b.outcomes);
    }
    let sample_std = acc.std();
    let standard_error = sample_std / (acc.n as f64).sqrt();
    let mean = if acc.n == 0 { f64::NAN } else { acc.mean };
    let z = if standard_error > 0.0 {
        mean / standard_error
    } else if mean == 0.0 {
        0.0
    } else {
        mean.signum() * f64::INFINITY
    };
    let conditioned = config.mode == Mode::Conditioned;
    let summary = RunSummary {
        model: config.model,
        mode: config.mode,
        n_trials: trials,
        n_postselected: acc.n,
        empirical_p_success: (!conditioned).then(|| acc.n as f64 / trials as f64),
        p_success_exact,
        equivalent_trials: conditioned.then_some(geometric),
        postselected_mean: mean,
        sample_std,
        standard_error,
        z_against_null: z,
        position_mean_m: meters_per_width.map(|s| mean * s),
        position_standard_error_m: meters_per_width.map(|s| standard_error * s),
    };
    (summary, outcomes)
}

/// Quantum model with the probe kicked by `r` widths and preselection bias
/// `epsilon`. Positions are reported when `meters_per_width` is given.
pub fn run_quantum(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    meters_per_width: Option<f64>,
) -> Result<RunSummary> {
    run_quantum_inner(config, epsilon, r, meters_per_width, false).map(|(s, _)| s)
}

/// As [`run_quantum`], also returning every trial.
pub fn run_quantum_with_samples(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    meters_per_width: Option<f64>,
) -> Result<(RunSummary, Vec<TrialOutcome>)> {
    run_quantum_inner(config, epsilon, r, meters_per_width, true)
}

fn check_inputs(epsilon: f64, r: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter {
            field: "epsilon",
            rule: format!("needs 0 < epsilon < 1 (got {epsilon})"),
        });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "r",
            rule: format!("kick must be finite and >= 0 (got {r})"),
        });
    }
    Ok(())
}

fn run_quantum_inner(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    meters_per_width: Option<f64>,
    record: bool,
) -> Result<(RunSummary, Vec<TrialOutcome>)> {
    check_inputs(epsilon, r)?;
    let post = protocol::postselected_state(epsilon, r)?;
    let p_success = protocol::postselection_probability(epsilon, r);
    if !(p_success > 0.0) {
        return Err(Error::ZeroSuccess);
    }
    let sampler = InverseCdfSampler::new(&post.state)?;
    let geometric = Geometric::new(p_success).map_err(|_| Error::ZeroProbability(p_success))?;
    let n = config.n_trials;

    let batches: Vec<BatchResult> = (0..batch_count(n))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(config.seed, substream(DOMAIN_QUANTUM, b));
            let mut out = BatchResult {
                trials: batch_len(n, b),
                ..Default::default()
            };
            for i in 0..out.trials {
                let trial = b * BATCH + i;
                let momentum = match config.mode {
                    Mode::Full => {
                        let u: f64 = rng.random();
                        (u < p_success).then(|| sampler.sample(rng.random()))
                    }
                    Mode::Conditioned => {
                        out.geometric_trials += geometric.sample(&mut rng) + 1;
                        Some(sampler.sample(rng.random()))
                    }
                };
                if let Some(p) = momentum {
                    out.acc.push(p);
                }
                if record {
                    out.outcomes.push(TrialOutcome {
                        trial,
                        postselected: momentum.is_some(),
                        momentum,
                        position_m: momentum.zip(meters_per_width).map(|(p, s)| p * s),
                    });
                }
            }
            out
        })
        .collect();
    Ok(summarize(config, batches, Some(p_success), meters_per_width))
}

/// Acceptance probability for each arm: an arbitrary function of the arm label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArmConditioning {
    pub accept_l: f64,
    pub accept_r: f64,
}

impl ArmConditioning {
    pub fn new(accept_l: f64, accept_r: f64) -> Result<Self> {
        for (field, v) in [("accept_l", accept_l), ("accept_r", accept_r)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    field,
                    rule: format!("acceptance probability must be in [0, 1] (got {v})"),
                });
            }
        }
        Ok(Self { accept_l, accept_r })
    }

    pub fn accept_all() -> Self {
        Self {
            accept_l: 1.0,
            accept_r: 1.0,
        }
    }
}

/// Classical mixture: arm `R` with probability `(1 - epsilon)/2`, kick `-r`
/// on `R` and none on `L`, accepted with the arm's probability. The mode
/// is ignored: every trial passes through the acceptance step.
pub fn run_classical(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    conditioning: &ArmConditioning,
    meters_per_width: Option<f64>,
) -> Result<RunSummary> {
    run_classical_inner(config, epsilon, r, conditioning, meters_per_width, false).map(|(s, _)| s)
}

pub fn run_classical_with_samples(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    conditioning: &ArmConditioning,
    meters_per_width: Option<f64>,
) -> Result<(RunSummary, Vec<TrialOutcome>)> {
    run_classical_inner(config, epsilon, r, conditioning, meters_per_width, true)
}

fn run_classical_inner(
    config: &RunConfig,
    epsilon: f64,
    r: f64,
    conditioning: &ArmConditioning,
    meters_per_width: Option<f64>,
    record: bool,
) -> Result<(RunSummary, Vec<TrialOutcome>)> {
    check_inputs(epsilon, r)?;
    let p_near = (1.0 - epsilon) / 2.0;
    let n = config.n_trials;
    let batches: Vec<BatchResult> = (0..batch_count(n))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(config.seed, substream(DOMAIN_CLASSICAL, b));
            let mut out = BatchResult {
                trials: batch_len(n, b),
                ..Default::default()
            };
            for i in 0..out.trials {
                let near = rng.random::<f64>() < p_near;
                let accept = if near { conditioning.accept_r } else { conditioning.accept_l };
                let accepted = rng.random::<f64>() < accept;
                let momentum = accepted.then_some(if near { -r } else { 0.0 });
                if let Some(p) = momentum {
                    out.acc.push(p);
                }
                if record {
                    out.outcomes.push(TrialOutcome {
                        trial: b * BATCH + i,
                        postselected: accepted,
                        momentum,
                        position_m: momentum.zip(meters_per_width).map(|(p, s)| p * s),
                    });
                }
            }
            out
        })
        .collect();
    let config = RunConfig {
        mode: Mode::Full,
        model: Model::Classical,
        ..*config
    };
    let (summary, outcomes) = summarize(&config, batches, None, meters_per_width);
    if summary.n_postselected == 0 {
        return Err(Error::NothingAccepted(summary.n_trials));
    }
    Ok((summary, outcomes))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionConfig {
    /// One-sided z to reach.
    pub significance_target: f64,
    pub seed: u64,
    /// Maximum Bernoulli trials before giving up.
    pub budget: u64,
    /// Postselected samples between significance checks.
    pub check_every: u64,
}

impl DetectionConfig {
    pub fn new(significance_target: f64, seed: u64) -> Self {
        Self {
            significance_target,
            seed,
            budget: 10_000_000_000,
            check_every: 128,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionRun {
    pub total_trials: u64,
    pub n_postselected: u64,
    pub z: f64,
}

/// Accumulates postselected readout positions until the one-sided z-test
/// against the unshifted probe (mean 0, standard deviation
/// `meters_per_width / sqrt 2`) exceeds the target. Postselected samples come
/// from the conditional density and the Bernoulli trials they cost from the
/// geometric distribution, which is equivalent to running every trial.
pub fn empirical_runs_to_detection(
    epsilon: f64,
    r: f64,
    meters_per_width: f64,
    config: &DetectionConfig,
) -> Result<DetectionRun> {
    let prepared = DetectionSetup::new(epsilon, r)?;
    prepared.run(meters_per_width, config, 0)
}

/// Median total trials over `replicates` independent detection runs.
pub fn median_runs_to_detection(
    epsilon: f64,
    r: f64,
    meters_per_width: f64,
    config: &DetectionConfig,
    replicates: u64,
) -> Result<(u64, Vec<DetectionRun>)> {
    if replicates == 0 {
        return Err(Error::InvalidParameter {
            field: "replicates",
            rule: "must be >= 1".to_string(),
        });
    }
    let prepared = DetectionSetup::new(epsilon, r)?;
    let runs = (0..replicates)
        .into_par_iter()
        .map(|k| prepared.run(meters_per_width, config, k))
        .collect::<Result<Vec<_>>>()?;
    let mut totals: Vec<u64> = runs.iter().map(|d| d.total_trials).collect();
    totals.sort_unstable();
    let mid = totals.len() / 2;
    let median = if totals.len() % 2 == 1 {
        totals[mid]
    } else {
        (totals[mid - 1] + totals[mid]) / 2
    };
    Ok((median, runs))
}

struct DetectionSetup {
    sampler: InverseCdfSampler,
    geometric: Geometric,
}

impl DetectionSetup {
    fn new(epsilon: f64, r: f64) -> Result<Self> {
        check_inputs(epsilon, r)?;
        let post = protocol::postselected_state(epsilon, r)?;
        let p_success = protocol::postselection_probability(epsilon, r);
        if !(p_success > 0.0) {
            return Err(Error::ZeroSuccess);
        }
        Ok(Self {
            sampler: InverseCdfSampler::new(&post.state)?,
            geometric: Geometric::new(p_success).map_err(|_| Error::ZeroProbability(p_success))?,
        })
    }

    fn run(&self, meters_per_width: f64, config: &DetectionConfig, replicate: u64) -> Result<DetectionRun> {
        if !(config.significance_target > 0.0) {
            return Err(Error::InvalidParameter {
                field: "significance_target",
                rule: "must be > 0".to_string(),
            });
        }
        let null_sigma = meters_per_width * std::f64::consts::FRAC_1_SQRT_2;
        let check_every = config.check_every.max(1);
        let mut positions: Vec<f64> = Vec::new();
        let mut sum_parts: Vec<f64> = Vec::new();
        let mut total_trials = 0u64;
        let mut z = 0.0;
        for batch in 0u64.. {
            let id = substream(DOMAIN_DETECTION, (replicate << 32) | batch);
            let mut rng = stream(config.seed, id);
            positions.clear();
            for _ in 0..check_every {
                total_trials = total_trials.saturating_add(self.geometric.sample(&mut rng) + 1);
                positions.push(self.sampler.sample(rng.random()) * meters_per_width);
            }
            sum_parts.push(neumaier_sum(positions.iter().copied()));
            let n = (batch + 1) * check_every;
            let mean = neumaier_sum(sum_parts.iter().copied()) / n as f64;
            z = statistics::z_score(mean, n, 0.0, null_sigma);
            if total_trials > config.budget {
                return Err(Error::BudgetExhausted {
                    trials: total_trials,
                    z,
                });
            }
            if z >= config.significance_target {
                return Ok(DetectionRun {
                    total_trials,
                    n_postselected: n,
                    z,
                });
            }
        }
        unreachable!("loop exits through budget or detection; last z = {z}")
    }
}
