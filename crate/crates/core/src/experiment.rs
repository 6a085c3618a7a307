//! Batch experiments: k sweeps, weighting-scheme comparisons, shot sweeps and
//! Trotter evolution runs, emitting one metrics row per (point, repetition).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_prepared, mean_and_stddev, prepare, repetition_seed, EstimationConfig, EstimationMode, Prepared};
use crate::grouping::sorted_insertion_grouping;
use crate::hamiltonian::{parse_hamiltonian, Hamiltonian};
use crate::models;
use crate::oracle::{exact_evolve, exact_expectation, MAX_EVOLUTION_QUBITS};
use crate::par::{self, ExecPolicy};
use crate::shots::{group_statistic, WeightingScheme};
use crate::sim::{build_neel, build_random_ansatz, build_trotter, Circuit, StateVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tfim,
    Heisenberg,
    /// Periodic TFIM with a dominant Z_0 term; see [`models::imbalanced_tfim`].
    Imbalanced,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tfim => "tfim",
            ModelKind::Heisenberg => "heisenberg",
            ModelKind::Imbalanced => "imbalanced",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfim" => Ok(ModelKind::Tfim),
            "heisenberg" => Ok(ModelKind::Heisenberg),
            "imbalanced" => Ok(ModelKind::Imbalanced),
            _ => Err(Error::config(
                "model",
                format!("unknown model {s:?}; valid: tfim, heisenberg, imbalanced"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianSource {
    File(PathBuf),
    Model {
        model: ModelKind,
        n: usize,
        j: f64,
        h: f64,
        periodic: bool,
    },
}

impl HamiltonianSource {
    pub fn label(&self) -> String {
        match self {
            HamiltonianSource::File(p) => format!(
                "file:{}",
                p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
            ),
            HamiltonianSource::Model { model, .. } => model.name().to_string(),
        }
    }

    pub fn load(&self) -> Result<Hamiltonian> {
        match self {
            HamiltonianSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::config("hamiltonian", format!("{}: {e}", path.display())))?;
                parse_hamiltonian(&text)
            }
            HamiltonianSource::Model { model, n, j, h, periodic } => match model {
                ModelKind::Tfim => models::tfim(*n, *j, *h, *periodic),
                ModelKind::Heisenberg => models::heisenberg(*n, *j, *h, *periodic),
                ModelKind::Imbalanced => {
                    let ham = models::imbalanced_tfim(*n)?;
                    let ratio = imbalance_ratio(&ham)?;
                    assert!(ratio >= 10.0, "imbalanced instance has group ratio {ratio}");
                    Ok(ham)
                }
            },
        }
    }
}

/// Ratio between the largest and smallest mean-|c| group statistic under
/// full (k = n) grouping.
pub fn imbalance_ratio(h: &Hamiltonian) -> Result<f64> {
    let g = sorted_insertion_grouping(h, h.num_qubits())?;
    let stats = g
        .groups
        .iter()
        .map(|grp| group_statistic(&grp.coeffs(h), WeightingScheme::Mean))
        .collect::<Result<Vec<_>>>()?;
    let max = stats.iter().copied().fold(f64::MIN, f64::max);
    let min = stats.iter().copied().fold(f64::MAX, f64::min);
    Ok(max / min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    KSweep,
    SchemeCompare,
    ShotSweep,
    TrotterEvolve,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KSweep => "k_sweep",
            ExperimentKind::SchemeCompare => "scheme_compare",
            ExperimentKind::ShotSweep => "shot_sweep",
            ExperimentKind::TrotterEvolve => "trotter_evolve",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "k_sweep" => Ok(ExperimentKind::KSweep),
            "scheme_compare" => Ok(ExperimentKind::SchemeCompare),
            "shot_sweep" => Ok(ExperimentKind::ShotSweep),
            "trotter_evolve" => Ok(ExperimentKind::TrotterEvolve),
            _ => Err(Error::config(
                "experiment",
                format!("unknown experiment {s:?}; valid: k-sweep, scheme-compare, shot-sweep, trotter-evolve"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterSettings {
    pub time: f64,
    pub steps: Vec<usize>,
}

impl Default for TrotterSettings {
    fn default() -> Self {
        TrotterSettings { time: 0.1, steps: vec![1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: HamiltonianSource,
    pub kind: ExperimentKind,
    /// Segment sizes; empty means the experiment's default.
    pub ks: Vec<usize>,
    pub schemes: Vec<WeightingScheme>,
    pub shots: Vec<u64>,
    pub reps: usize,
    pub seed: u64,
    pub mode: EstimationMode,
    pub bin_fraction: Option<f64>,
    pub trotter: TrotterSettings,
    pub ansatz_layers: usize,
    #[serde(default)]
    pub policy: ExecPolicy,
}

impl ExperimentConfig {
    pub fn new(source: HamiltonianSource, kind: ExperimentKind) -> Self {
        ExperimentConfig {
            source,
            kind,
            ks: Vec::new(),
            schemes: vec![WeightingScheme::Uniform],
            shots: vec![4000],
            reps: 100,
            seed: 0,
            mode: EstimationMode::Sampled,
            bin_fraction: None,
            trotter: TrotterSettings::default(),
            ansatz_layers: 2,
            policy: ExecPolicy::default(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("scheme", "list must not be empty"));
        }
        if self.shots.is_empty() {
            return Err(Error::config("shots", "list must not be empty"));
        }
        if self.shots.contains(&0) {
            return Err(Error::config("shots", "budgets must be positive"));
        }
        if let Some(&k) = self.ks.iter().find(|&&k| k < 1 || k > n) {
            return Err(Error::config("k", format!("k={k} outside 1..={n}")));
        }
        if let Some(f) = self.bin_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::config("bin-fraction", format!("{f} outside (0, 1]")));
            }
        }
        if self.kind == ExperimentKind::ShotSweep && self.shots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("shots", "shot sweep budgets must be strictly ascending"));
        }
        if self.kind == ExperimentKind::TrotterEvolve {
            if self.trotter.steps.is_empty() || self.trotter.steps.contains(&0) {
                return Err(Error::config("trotter-steps", "step counts must be positive"));
            }
            if !self.trotter.time.is_finite() {
                return Err(Error::config("time", "must be finite"));
            }
        }
        Ok(())
    }

    fn k_values(&self, n: usize) -> Vec<usize> {
        match self.kind {
            ExperimentKind::SchemeCompare => vec![n],
            ExperimentKind::KSweep if self.ks.is_empty() => {
                let mut ks = vec![1, (n / 2).max(1), n];
                ks.dedup();
                ks
            }
            _ if self.ks.is_empty() => vec![n],
            ExperimentKind::KSweep => self.ks.clone(),
            _ => vec![self.ks[0]],
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub experiment: String,
    pub model: String,
    pub n: usize,
    pub terms: usize,
    pub k: usize,
    pub scheme: String,
    pub shots_budget: u64,
    pub shots_realized: u64,
    pub groups: usize,
    pub circuits: usize,
    pub max_meas_depth: usize,
    pub rep: usize,
    pub seed: u64,
    pub estimate: f64,
    pub exact: Option<f64>,
    pub diff: Option<f64>,
    pub fallback_used: bool,
    pub t_group_ms: f64,
    pub t_diag_ms: f64,
    pub t_alloc_ms: f64,
    pub t_exec_ms: f64,
    pub t_total_ms: f64,
}

/// Column order of the metrics CSV.
pub const CSV_COLUMNS: [&str; 22] = [
    "experiment",
    "model",
    "n",
    "terms",
    "k",
    "scheme",
    "shots_budget",
    "shots_realized",
    "groups",
    "circuits",
    "max_meas_depth",
    "rep",
    "seed",
    "estimate",
    "exact",
    "diff",
    "fallback_used",
    "t_group_ms",
    "t_diag_ms",
    "t_alloc_ms",
    "t_exec_ms",
    "t_total_ms",
];

/// Aggregate over the repetitions of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub label: String,
    pub k: usize,
    pub scheme: String,
    pub shots_budget: u64,
    pub trotter_steps: Option<usize>,
    pub groups: usize,
    pub circuits: usize,
    pub max_meas_depth: usize,
    pub reps: usize,
    pub error_stddev: Option<f64>,
    /// `error_stddev` divided by the Hamiltonian 1-norm.
    pub error_stddev_rel: Option<f64>,
    pub bias: Option<f64>,
    pub mean_estimate: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub scheme: String,
    /// Budget of the uniform run whose fitted error is the target.
    pub uniform_shots: u64,
    pub target_error: f64,
    /// Budget at which the scheme's fitted error reaches the target.
    pub shots_needed: f64,
    pub savings: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub scheme: String,
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterPoint {
    pub steps: usize,
    pub exact: Option<f64>,
    /// Exact-probability estimate minus exact evolved value.
    pub trotter_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub model: String,
    pub n: usize,
    pub terms: usize,
    pub one_norm: f64,
    pub seed: u64,
    pub points: Vec<PointSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fits: Vec<PowerFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover: Option<Vec<Crossover>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trotter: Vec<TrotterPoint>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<MetricsRecord>,
    pub summary: Summary,
}

/// Least-squares fit of ln y = a + b ln x; returns (a, b).
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

struct Point {
    k: usize,
    scheme: WeightingScheme,
    shots: u64,
    steps: Option<usize>,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    h: &'a Hamiltonian,
    model: String,
}

impl Context<'_> {
    fn label(&self, p: &Point) -> String {
        match p.steps {
            Some(r) => format!("{}:r={}", self.cfg.kind, r),
            None => self.cfg.kind.to_string(),
        }
    }

    fn est_config(&self, p: &Point) -> EstimationConfig {
        EstimationConfig {
            k: p.k,
            scheme: p.scheme,
            total_shots: p.shots,
            bin_fraction: self.cfg.bin_fraction,
            mode: self.cfg.mode,
            seed: self.cfg.seed,
            policy: ExecPolicy::Sequential,
        }
    }

    /// Runs all repetitions of one point. `prep_for` gives the preparation
    /// circuit and exact value for repetition r.
    fn run_point<F>(&self, p: &Point, prepared: &Prepared, prep_for: F) -> (Vec<MetricsRecord>, PointSummary)
    where
        F: Fn(usize) -> Result<(Circuit, Option<f64>)> + Sync + Send,
    {
        let h = self.h;
        let base = self.est_config(p);
        let label = self.label(p);
        let outcome = par::try_map_indices(self.cfg.policy, self.cfg.reps, |r| {
            let (prep, exact) = prep_for(r)?;
            let cfg = EstimationConfig {
                seed: repetition_seed(self.cfg.seed, r),
                ..base.clone()
            };
            let t = Instant::now();
            let rep = estimate_prepared(h, prepared, &prep, &cfg)?;
            let elapsed = t.elapsed().as_secs_f64() * 1e3;
            Ok::<_, Error>(MetricsRecord {
                experiment: label.clone(),
                model: self.model.clone(),
                n: h.num_qubits(),
                terms: h.len(),
                k: p.k,
                scheme: p.scheme.to_string(),
                shots_budget: p.shots,
                shots_realized: rep.shots_realized,
                groups: rep.groups,
                circuits: rep.circuits_executed,
                max_meas_depth: rep.max_measurement_depth,
                rep: r,
                seed: cfg.seed,
                estimate: rep.value,
                exact,
                diff: exact.map(|e| rep.value - e),
                fallback_used: rep.fallback_synthesis_used,
                t_group_ms: prepared.group_ms,
                t_diag_ms: prepared.diagonalize_ms,
                t_alloc_ms: rep.timings.allocate_ms,
                t_exec_ms: rep.timings.execute_ms,
                t_total_ms: prepared.group_ms + prepared.diagonalize_ms + elapsed,
            })
        });
        let mut summary = PointSummary {
            label,
            k: p.k,
            scheme: p.scheme.to_string(),
            shots_budget: p.shots,
            trotter_steps: p.steps,
            groups: prepared.groups.len(),
            circuits: 0,
            max_meas_depth: prepared.groups.iter().map(|d| d.measurement_depth()).max().unwrap_or(0),
            reps: self.cfg.reps,
            error_stddev: None,
            error_stddev_rel: None,
            bias: None,
            mean_estimate: f64::NAN,
            error: None,
        };
        match outcome {
            Ok(rows) => {
                summary.circuits = rows.first().map_or(0, |r| r.circuits);
                let estimates: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
                summary.mean_estimate = mean_and_stddev(&estimates).0;
                let diffs: Vec<f64> = rows.iter().filter_map(|r| r.diff).collect();
                if diffs.len() == rows.len() && !diffs.is_empty() {
                    let (bias, sd) = mean_and_stddev(&diffs);
                    summary.bias = Some(bias);
                    summary.error_stddev = Some(sd);
                    summary.error_stddev_rel = Some(sd / h.one_norm());
                }
                (rows, summary)
            }
            Err(e) => {
                log::warn!("point {} k={} scheme={} shots={}: {e}", summary.label, p.k, p.scheme, p.shots);
                summary.error = Some(e.to_string());
                (Vec::new(), summary)
            }
        }
    }
}

/// Runs an experiment end to end.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let h = cfg.source.load()?;
    let n = h.num_qubits();
    cfg.validate(n)?;
    let ctx = Context {
        cfg,
        h: &h,
        model: cfg.source.label(),
    };
    let mut summary = Summary {
        schema_version: SCHEMA_VERSION,
        experiment: cfg.kind.to_string(),
        model: ctx.model.clone(),
        n,
        terms: h.len(),
        one_norm: h.one_norm(),
        seed: cfg.seed,
        points: Vec::new(),
        winner: None,
        fits: Vec::new(),
        crossover: None,
        trotter: Vec::new(),
        warnings: Vec::new(),
    };
    let mut records = Vec::new();

    let ks = cfg.k_values(n);
    let steps: Vec<Option<usize>> = match cfg.kind {
        ExperimentKind::TrotterEvolve => cfg.trotter.steps.iter().map(|&r| Some(r)).collect(),
        _ => vec![None],
    };

    if cfg.kind == ExperimentKind::TrotterEvolve && n > MAX_EVOLUTION_QUBITS {
        let msg = format!("n={n} exceeds the exact-evolution limit of {MAX_EVOLUTION_QUBITS}; exact column omitted");
        log::warn!("{msg}");
        summary.warnings.push(msg);
    }

    for &k in &ks {
        let prepared = prepare(&h, k, cfg.policy)?;
        for &r in &steps {
            // Trotter runs share one prepared state across repetitions.
            let trotter_state = match r {
                Some(r) => Some(trotter_inputs(&h, cfg.trotter.time, r)?),
                None => None,
            };
            if let (Some(r), Some((prep, exact))) = (r, &trotter_state) {
                let exact_cfg = EstimationConfig::new(k, WeightingScheme::Uniform, 1, EstimationMode::ExactProbability, 0);
                let trotter_error = match exact {
                    Some(e) => Some(estimate_prepared(&h, &prepared, prep, &exact_cfg)?.value - e),
                    None => None,
                };
                summary.trotter.push(TrotterPoint {
                    steps: r,
                    exact: *exact,
                    trotter_error,
                });
            }
            for &scheme in &cfg.schemes {
                for &shots in &cfg.shots {
                    let point = Point {
                        k,
                        scheme,
                        shots,
                        steps: r,
                    };
                    let (rows, ps) = match &trotter_state {
                        Some((prep, exact)) => ctx.run_point(&point, &prepared, |_| Ok((prep.clone(), *exact))),
                        None => ctx.run_point(&point, &prepared, |rep| {
                            let prep = build_random_ansatz(n, cfg.ansatz_layers, cfg.seed.wrapping_add(rep as u64));
                            let mut s = StateVector::zero(n)?;
                            s.apply_circuit(&prep, ExecPolicy::Sequential)?;
                            let exact = exact_expectation(&h, &s)?;
                            Ok((prep, Some(exact)))
                        }),
                    };
                    records.extend(rows);
                    summary.points.push(ps);
                }
            }
        }
    }

    match cfg.kind {
        ExperimentKind::SchemeCompare => {
            summary.winner = summary
                .points
                .iter()
                .filter_map(|p| p.error_stddev.map(|e| (e, &p.scheme)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, s)| s.clone());
        }
        ExperimentKind::ShotSweep => shot_sweep_tables(cfg, &mut summary),
        _ => {}
    }
    Ok(ExperimentOutput { records, summary })
}

/// Neel state evolved by the product formula, plus the exact evolved energy
/// when the register is small enough.
fn trotter_inputs(h: &Hamiltonian, t: f64, steps: usize) -> Result<(Circuit, Option<f64>)> {
    let n = h.num_qubits();
    let mut prep = build_neel(n);
    prep.extend(&build_trotter(h, t, steps, None)?)?;
    let exact = if n <= MAX_EVOLUTION_QUBITS {
        let mut neel = StateVector::zero(n)?;
        neel.apply_circuit(&build_neel(n), ExecPolicy::Sequential)?;
        Some(exact_expectation(h, &exact_evolve(h, &neel, t)?)?)
    } else {
        None
    };
    Ok((prep, exact))
}

fn shot_sweep_tables(cfg: &ExperimentConfig, summary: &mut Summary) {
    if cfg.shots.len() < 2 {
        return;
    }
    let series = |scheme: &str| -> Option<(Vec<f64>, Vec<f64>)> {
        let pts: Vec<(f64, f64)> = summary
            .points
            .iter()
            .filter(|p| p.scheme == scheme)
            .filter_map(|p| p.error_stddev.filter(|e| *e > 0.0).map(|e| (p.shots_budget as f64, e)))
            .collect();
        (pts.len() >= 2).then(|| pts.into_iter().unzip())
    };
    let mut fits = Vec::new();
    for s in &cfg.schemes {
        if let Some((x, y)) = series(s.name()) {
            let (a, b) = loglog_fit(&x, &y);
            if b >= 0.0 {
                summary
                    .warnings
                    .push(format!("fitted error for scheme {s} does not decrease with budget (slope {b:.3})"));
            }
            fits.push(PowerFit {
                scheme: s.to_string(),
                intercept: a,
                slope: b,
            });
        }
    }
    let uniform = fits.iter().find(|f| f.scheme == WeightingScheme::Uniform.name()).cloned();
    if let Some(u) = uniform {
        let mut table = Vec::new();
        for f in fits.iter().filter(|f| f.scheme != u.scheme && f.slope < 0.0) {
            for &budget in &cfg.shots {
                let target = (u.intercept + u.slope * (budget as f64).ln()).exp();
                let needed = ((target.ln() - f.intercept) / f.slope).exp();
                table.push(Crossover {
                    scheme: f.scheme.clone(),
                    uniform_shots: budget,
                    target_error: target,
                    shots_needed: needed,
                    savings: 1.0 - needed / budget as f64,
                });
            }
        }
        summary.crossover = Some(table);
    }
    summary.fits = fits;
}

/// Writes `metrics.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, out: &ExperimentOutput) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("metrics.csv");
    let json_path = dir.join("summary.json");
    std::fs::write(&csv_path, records_to_csv(&out.records)?)?;
    let json = serde_json::to_string_pretty(&out.summary).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok((csv_path, json_path))
}

/// CSV text with a header row, in canonical (point, repetition) order.
pub fn records_to_csv(records: &[MetricsRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).map_err(|e| Error::Io(e.to_string()))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
