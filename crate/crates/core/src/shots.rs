//! Shot-budget allocation across measurement circuits.
//!
//! Weighted allocation runs three steps in a fixed order: proportional
//! rounding (half away from zero), raising zero entries to one shot, then
//! moving the remaining surplus or deficit onto the largest entry (lowest
//! index on ties). If that entry cannot absorb a surplus without dropping
//! below one shot, the remainder moves on to the next-largest entry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingScheme {
    Uniform,
    Max,
    MaxSq,
    Mean,
    MeanSq,
}

impl WeightingScheme {
    pub const ALL: [WeightingScheme; 5] = [
        WeightingScheme::Uniform,
        WeightingScheme::Max,
        WeightingScheme::MaxSq,
        WeightingScheme::Mean,
        WeightingScheme::MeanSq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightingScheme::Uniform => "uniform",
            WeightingScheme::Max => "max",
            WeightingScheme::MaxSq => "max_sq",
            WeightingScheme::Mean => "mean",
            WeightingScheme::MeanSq => "mean_sq",
        }
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightingScheme::ALL.into_iter().find(|w| w.name() == s).ok_or_else(|| {
            let valid: Vec<&str> = WeightingScheme::ALL.iter().map(|w| w.name()).collect();
            Error::config("scheme", format!("unknown scheme {s:?}; valid: {}", valid.join(", ")))
        })
    }
}

/// Per-group weight v_i for the given scheme.
pub fn group_statistic(coeffs: &[f64], scheme: WeightingScheme) -> Result<f64> {
    if coeffs.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let max = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let len = coeffs.len() as f64;
    Ok(match scheme {
        WeightingScheme::Uniform => 1.0,
        WeightingScheme::Max => max,
        WeightingScheme::MaxSq => max * max,
        WeightingScheme::Mean => coeffs.iter().map(|c| c.abs()).sum::<f64>() / len,
        WeightingScheme::MeanSq => coeffs.iter().map(|c| c * c).sum::<f64>() / len,
    })
}

/// Shots per group for target precision `epsilon`:
/// g_i = N^2 max_j c_ij^2 / epsilon^2. Not rounded.
pub fn shots_for_precision(group_coeffs: &[Vec<f64>], epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let n = group_coeffs.len() as f64;
    group_coeffs
        .iter()
        .map(|c| {
            let max_sq = group_statistic(c, WeightingScheme::MaxSq)?;
            if max_sq == 0.0 {
                log::warn!("group with zero maximum coefficient gets no precision shots");
            }
            Ok(n * n * max_sq / (epsilon * epsilon))
        })
        .collect()
}

/// Circuits sharing one representative shot count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub members: Vec<usize>,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub shots: Vec<u64>,
    pub total: u64,
    pub bins: Option<Vec<Bin>>,
}

impl ShotPlan {
    /// Shots each group is actually executed with (bin representative when
    /// binned).
    pub fn executed_shots(&self) -> Vec<u64> {
        match &self.bins {
            None => self.shots.clone(),
            Some(bins) => {
                let mut out = vec![0; self.shots.len()];
                for b in bins {
                    for &m in &b.members {
                        out[m] = b.shots;
                    }
                }
                out
            }
        }
    }

    pub fn realized_total(&self) -> u64 {
        self.executed_shots().iter().sum()
    }

    /// Distinct executions: one per bin when binned, else one per group.
    pub fn executions(&self) -> usize {
        self.bins.as_ref().map_or(self.shots.len(), Vec::len)
    }
}

/// Rounds half away from zero (`f64::round` semantics).
fn round_half_away(x: f64) -> u64 {
    x.round() as u64
}

/// Proportional rounding before the floor and conservation steps.
pub fn proportional_round(total: u64, v: &[f64]) -> Vec<u64> {
    let sum: f64 = v.iter().sum();
    v.iter().map(|&vi| round_half_away(total as f64 * vi / sum)).collect()
}

/// Weighted allocation with exact budget conservation and a one-shot floor.
pub fn allocate(total: u64, v: &[f64]) -> Result<ShotPlan> {
    let n = v.len();
    if n == 0 || total < n as u64 {
        return Err(Error::BudgetTooSmall { total, groups: n });
    }
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || v.iter().sum::<f64>() <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    let mut shots = proportional_round(total, v);
    for s in shots.iter_mut() {
        if *s == 0 {
            *s = 1;
        }
    }

    // largest first, lowest index on ties
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| shots[b].cmp(&shots[a]));
    let sum: u64 = shots.iter().sum();
    if sum < total {
        shots[order[0]] += total - sum;
    } else {
        let mut surplus = sum - total;
        for &i in &order {
            if surplus == 0 {
                break;
            }
            let take = surplus.min(shots[i] - 1);
            shots[i] -= take;
            surplus -= take;
        }
        debug_assert_eq!(surplus, 0);
    }
    Ok(ShotPlan { shots, total, bins: None })
}

/// Even split: floor(S/N) each, one extra to the first S mod N groups.
pub fn allocate_uniform(total: u64, groups: usize) -> Result<ShotPlan> {
    if groups == 0 || total < groups as u64 {
        return Err(Error::BudgetTooSmall { total, groups });
    }
    let base = total / groups as u64;
    let extra = (total % groups as u64) as usize;
    let shots = (0..groups).map(|i| base + u64::from(i < extra)).collect();
    Ok(ShotPlan { shots, total, bins: None })
}

/// Allocation for a scheme given each group's coefficients.
pub fn allocate_for_scheme(total: u64, group_coeffs: &[Vec<f64>], scheme: WeightingScheme) -> Result<ShotPlan> {
    if scheme == WeightingScheme::Uniform {
        return allocate_uniform(total, group_coeffs.len());
    }
    let v = group_coeffs
        .iter()
        .map(|c| group_statistic(c, scheme))
        .collect::<Result<Vec<_>>>()?;
    allocate(total, &v)
}

/// Relative spread of a descending run.
fn run_cost(sorted: &[u64]) -> f64 {
    let (max, min) = (sorted[0] as f64, *sorted.last().unwrap() as f64);
    if max == 0.0 {
        0.0
    } else {
        (max - min) / max
    }
}

/// Groups circuits with similar shot counts into at most
/// max(1, floor(fraction·N)) bins, each executed with the rounded mean of its
/// members' counts (at least one shot).
pub fn bin_plan(plan: &ShotPlan, fraction: f64) -> Result<ShotPlan> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    let n = plan.shots.len();
    let max_bins = ((fraction * n as f64).floor() as usize).max(1).min(n.max(1));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| plan.shots[b].cmp(&plan.shots[a]));
    let sorted: Vec<u64> = order.iter().map(|&i| plan.shots[i]).collect();

    // Greedy boundary placement: each split is the one that most reduces the
    // summed relative spread; stop early once no split helps.
    let mut cuts: Vec<usize> = vec![0, n];
    while cuts.len() - 1 < max_bins {
        let mut best: Option<(f64, usize)> = None;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let whole = run_cost(&sorted[lo..hi]);
            for cut in lo + 1..hi {
                let gain = whole - run_cost(&sorted[lo..cut]) - run_cost(&sorted[cut..hi]);
                if gain > 1e-12 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, cut));
                }
            }
        }
        match best {
            Some((_, cut)) => {
                let pos = cuts.partition_point(|&c| c < cut);
                cuts.insert(pos, cut);
            }
            None => break,
        }
    }

    let bins = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let members: Vec<usize> = order[w[0]..w[1]].to_vec();
            let mean = sorted[w[0]..w[1]].iter().sum::<u64>() as f64 / (w[1] - w[0]) as f64;
            Bin {
                members,
                shots: round_half_away(mean).max(1),
            }
        })
        .collect();
    Ok(ShotPlan {
        shots: plan.shots.clone(),
        total: plan.total,
        bins: Some(bins),
    })
}
