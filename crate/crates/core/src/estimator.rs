//! End-to-end expectation estimation.
//!
//! group → diagonalize → allocate shots → run measurement circuits →
//! parity-weighted aggregation. All-identity terms bypass the pipeline and
//! add their coefficient directly.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagonalize::{diagonalize_all, DiagonalizedGroup};
use crate::error::{Error, Result};
use crate::grouping::sorted_insertion_grouping;
use crate::hamiltonian::Hamiltonian;
use crate::oracle::exact_expectation;
use crate::par::{self, ExecPolicy};
use crate::shots::{allocate_for_scheme, bin_plan, ShotPlan, WeightingScheme};
use crate::sim::{build_random_ansatz, exact_distribution, sample, Circuit, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Multinomial sampling with the allocated shot counts.
    Sampled,
    /// Exact outcome probabilities in place of counts (infinite shots).
    ExactProbability,
}

impl std::str::FromStr for EstimationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(EstimationMode::Sampled),
            "exact" | "exact_probability" => Ok(EstimationMode::ExactProbability),
            _ => Err(Error::config("mode", format!("unknown mode {s:?}; valid: sampled, exact"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub k: usize,
    pub scheme: WeightingScheme,
    pub total_shots: u64,
    pub bin_fraction: Option<f64>,
    pub mode: EstimationMode,
    pub seed: u64,
    #[serde(default)]
    pub policy: ExecPolicy,
}

impl EstimationConfig {
    pub fn new(k: usize, scheme: WeightingScheme, total_shots: u64, mode: EstimationMode, seed: u64) -> Self {
        EstimationConfig {
            k,
            scheme,
            total_shots,
            bin_fraction: None,
            mode,
            seed,
            policy: ExecPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupContribution {
    pub group: usize,
    pub shots: u64,
    pub contribution: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub group_ms: f64,
    pub diagonalize_ms: f64,
    pub allocate_ms: f64,
    pub execute_ms: f64,
    pub aggregate_ms: f64,
}

impl PhaseTimes {
    pub fn total_ms(&self) -> f64 {
        self.group_ms + self.diagonalize_ms + self.allocate_ms + self.execute_ms + self.aggregate_ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub value: f64,
    /// Sum of all-identity coefficients, included in `value`.
    pub identity_offset: f64,
    pub per_group: Vec<GroupContribution>,
    pub circuits_executed: usize,
    pub groups: usize,
    pub max_measurement_depth: usize,
    pub shots_realized: u64,
    pub fallback_synthesis_used: bool,
    pub timings: PhaseTimes,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// RNG stream for one group, independent of every other group's draws.
pub fn group_rng(seed: u64, group: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(group as u64);
    rng
}

/// Basis-index mask of a diagonal image's Z support.
fn parity_mask(d: &DiagonalizedGroup, member: usize) -> usize {
    d.images[member].pauli.basis_z_mask() as usize
}

/// sum_j c_j sign_j (-1)^{parity_j(outcome)}, averaged over a distribution.
fn group_value<I>(h: &Hamiltonian, d: &DiagonalizedGroup, outcomes: I) -> f64
where
    I: Iterator<Item = (usize, f64)> + Clone,
{
    d.group
        .members
        .iter()
        .enumerate()
        .map(|(j, &term)| {
            let mask = parity_mask(d, j);
            let mean: f64 = outcomes
                .clone()
                .map(|(b, w)| if (b & mask).count_ones() % 2 == 1 { -w } else { w })
                .sum();
            h.terms()[term].coeff * d.images[j].sign() * mean
        })
        .sum()
}

/// Per-shot variance of the group estimator under the exact distribution.
pub fn group_variance(h: &Hamiltonian, d: &DiagonalizedGroup, state: &StateVector) -> Result<f64> {
    let mut measured = state.clone();
    measured.apply_clifford(&d.circuit)?;
    let dist = exact_distribution(&measured);
    let per_outcome = |b: usize| -> f64 {
        d.group
            .members
            .iter()
            .enumerate()
            .map(|(j, &term)| {
                let odd = (b & parity_mask(d, j)).count_ones() % 2 == 1;
                let v = h.terms()[term].coeff * d.images[j].sign();
                if odd {
                    -v
                } else {
                    v
                }
            })
            .sum()
    };
    let mean: f64 = dist.iter().map(|(&b, &p)| p * per_outcome(b)).sum();
    let second: f64 = dist.iter().map(|(&b, &p)| p * per_outcome(b).powi(2)).sum();
    Ok((second - mean * mean).max(0.0))
}

/// Groups and diagonalizes the non-identity part of `h`.
pub struct Prepared {
    /// Non-identity terms of the source Hamiltonian.
    pub active: Option<Hamiltonian>,
    pub identity_offset: f64,
    pub groups: Vec<DiagonalizedGroup>,
    pub group_ms: f64,
    pub diagonalize_ms: f64,
}

pub fn prepare(h: &Hamiltonian, k: usize, policy: ExecPolicy) -> Result<Prepared> {
    let n = h.num_qubits();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let identity_offset = h.terms().iter().filter(|t| t.pauli.is_identity()).fold(0.0, |acc, t| acc + t.coeff);
    let keep: Vec<usize> = (0..h.len()).filter(|&i| !h.terms()[i].pauli.is_identity()).collect();
    if keep.is_empty() {
        return Ok(Prepared {
            active: None,
            identity_offset,
            groups: Vec::new(),
            group_ms: 0.0,
            diagonalize_ms: 0.0,
        });
    }
    let active = h.subset(&keep)?;
    let t = Instant::now();
    let grouping = sorted_insertion_grouping(&active, k)?;
    let group_ms = ms(t);
    let t = Instant::now();
    let groups = diagonalize_all(&active, &grouping, policy)?;
    let diagonalize_ms = ms(t);
    Ok(Prepared {
        active: Some(active),
        identity_offset,
        groups,
        group_ms,
        diagonalize_ms,
    })
}

/// Runs the full pipeline on the state `prep|0…0>`.
pub fn estimate(h: &Hamiltonian, prep: &Circuit, cfg: &EstimationConfig) -> Result<EstimationReport> {
    let prepared = prepare(h, cfg.k, cfg.policy)?;
    estimate_prepared(h, &prepared, prep, cfg)
}

/// Pipeline with grouping and diagonalization already done.
pub fn estimate_prepared(h: &Hamiltonian, prepared: &Prepared, prep: &Circuit, cfg: &EstimationConfig) -> Result<EstimationReport> {
    if prep.num_qubits() != h.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.num_qubits(),
            found: prep.num_qubits(),
        });
    }
    let n_groups = prepared.groups.len();
    let mut timings = PhaseTimes {
        group_ms: prepared.group_ms,
        diagonalize_ms: prepared.diagonalize_ms,
        ..PhaseTimes::default()
    };
    let Some(active) = &prepared.active else {
        return Ok(EstimationReport {
            value: prepared.identity_offset,
            identity_offset: prepared.identity_offset,
            per_group: Vec::new(),
            circuits_executed: 0,
            groups: 0,
            max_measurement_depth: 0,
            shots_realized: 0,
            fallback_synthesis_used: false,
            timings,
        });
    };

    let t = Instant::now();
    let coeffs: Vec<Vec<f64>> = prepared.groups.iter().map(|d| d.group.coeffs(active)).collect();
    let plan: Option<ShotPlan> = match allocate_for_scheme(cfg.total_shots, &coeffs, cfg.scheme) {
        Ok(p) => Some(match cfg.bin_fraction {
            Some(f) => bin_plan(&p, f)?,
            None => p,
        }),
        Err(e @ Error::BudgetTooSmall { .. }) if cfg.mode == EstimationMode::Sampled => return Err(e),
        Err(Error::BudgetTooSmall { .. }) => None,
        Err(e) => return Err(e),
    };
    let shots: Vec<u64> = plan.as_ref().map_or(vec![0; n_groups], ShotPlan::executed_shots);
    timings.allocate_ms = ms(t);

    let t = Instant::now();
    let mut state = StateVector::zero(h.num_qubits())?;
    state.apply_circuit(prep, cfg.policy)?;
    let contributions = par::try_map_indices(cfg.policy, n_groups, |g| -> Result<f64> {
        let d = &prepared.groups[g];
        let mut measured = state.clone();
        measured.apply_clifford(&d.circuit)?;
        match cfg.mode {
            EstimationMode::ExactProbability => {
                let dist = exact_distribution(&measured);
                Ok(group_value(active, d, dist.iter().map(|(&b, &p)| (b, p))))
            }
            EstimationMode::Sampled => {
                let mut rng = group_rng(cfg.seed, g);
                let counts = sample(&measured, shots[g], &mut rng)?;
                let total = counts.shots as f64;
                let freq = counts.counts.iter().map(|(&b, &c)| (b, c as f64 / total));
                Ok(group_value(active, d, freq))
            }
        }
    })?;
    timings.execute_ms = ms(t);

    let t = Instant::now();
    let per_group: Vec<GroupContribution> = contributions
        .iter()
        .enumerate()
        .map(|(g, &c)| GroupContribution {
            group: g,
            shots: shots[g],
            contribution: c,
        })
        .collect();
    let value = prepared.identity_offset + contributions.iter().sum::<f64>();
    timings.aggregate_ms = ms(t);

    Ok(EstimationReport {
        value,
        identity_offset: prepared.identity_offset,
        per_group,
        circuits_executed: plan.as_ref().map_or(n_groups, ShotPlan::executions),
        groups: n_groups,
        max_measurement_depth: prepared.groups.iter().map(|d| d.measurement_depth()).max().unwrap_or(0),
        shots_realized: shots.iter().sum(),
        fallback_synthesis_used: prepared.groups.iter().any(|d| d.fallback_used),
        timings,
    })
}

/// Outcome of one repetition in [`repeated_error`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub ansatz_seed: u64,
    pub sample_seed: u64,
    pub estimate: f64,
    pub exact: f64,
    pub report: EstimationReport,
}

impl RepetitionResult {
    pub fn diff(&self) -> f64 {
        self.estimate - self.exact
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStatistic {
    /// Sample standard deviation of (estimate - exact).
    pub stddev: f64,
    /// Mean of (estimate - exact).
    pub bias: f64,
    pub repetitions: Vec<RepetitionResult>,
}

/// Sample mean and (n-1)-normalised standard deviation.
pub fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Seed for the sampling stream of repetition `rep`.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add((rep as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Estimates `h` on `repetitions` random ansatz states (seeds `ansatz_seed`,
/// `ansatz_seed + 1`, …) and summarises estimate − exact.
pub fn repeated_error(
    h: &Hamiltonian,
    ansatz_layers: usize,
    ansatz_seed: u64,
    cfg: &EstimationConfig,
    repetitions: usize,
) -> Result<ErrorStatistic> {
    if repetitions < 2 {
        return Err(Error::TooFewRepetitions {
            min: 2,
            found: repetitions,
        });
    }
    let prepared = prepare(h, cfg.k, cfg.policy)?;
    let inner = EstimationConfig {
        policy: ExecPolicy::Sequential,
        ..cfg.clone()
    };
    let reps = par::try_map_indices(cfg.policy, repetitions, |r| -> Result<RepetitionResult> {
        let a_seed = ansatz_seed.wrapping_add(r as u64);
        let prep = build_random_ansatz(h.num_qubits(), ansatz_layers, a_seed);
        let rep_cfg = EstimationConfig {
            seed: repetition_seed(cfg.seed, r),
            ..inner.clone()
        };
        let report = estimate_prepared(h, &prepared, &prep, &rep_cfg)?;
        let mut state = StateVector::zero(h.num_qubits())?;
        state.apply_circuit(&prep, ExecPolicy::Sequential)?;
        let exact = exact_expectation(h, &state)?;
        Ok(RepetitionResult {
            ansatz_seed: a_seed,
            sample_seed: rep_cfg.seed,
            estimate: report.value,
            exact,
            report,
        })
    })?;
    let diffs: Vec<f64> = reps.iter().map(RepetitionResult::diff).collect();
    let (bias, stddev) = mean_and_stddev(&diffs);
    Ok(ErrorStatistic {
        stddev,
        bias,
        repetitions: reps,
    })
}
