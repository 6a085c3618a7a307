use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use kcommute::estimator::{estimate, EstimationConfig, EstimationMode};
use kcommute::experiment::{run_experiment, write_outputs, ExperimentConfig, ExperimentKind, HamiltonianSource, ModelKind};
use kcommute::oracle::{exact_expectation, MAX_EXPECTATION_QUBITS};
use kcommute::sim::{build_neel, build_random_ansatz, build_trotter, StateVector};
use kcommute::{Error, ExecPolicy, WeightingScheme};

// A closed pipe (`| head`) ends the report quietly instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "kcommute", version, about = "Estimate <H> with k-commuting measurement groups")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimate and print a JSON report.
    Estimate(Flags),
    /// Run a sweep and write metrics.csv and summary.json.
    Bench(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON file mirroring these flags; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// bench only: k-sweep, scheme-compare, shot-sweep or trotter-evolve.
    #[arg(long)]
    experiment: Option<String>,
    /// Hamiltonian text file.
    #[arg(long, conflicts_with = "model")]
    hamiltonian: Option<PathBuf>,
    /// Built-in model: tfim, heisenberg or imbalanced.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long = "h", id = "field")]
    field: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    periodic: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<u64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// sampled or exact.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    bin_fraction: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    trotter_steps: Option<Vec<usize>>,
    #[arg(long)]
    time: Option<f64>,
    /// Layers of the random ansatz used as the input state.
    #[arg(long)]
    ansatz_layers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    experiment: Option<String>,
    hamiltonian: Option<PathBuf>,
    model: Option<String>,
    n: Option<usize>,
    j: Option<f64>,
    h: Option<f64>,
    periodic: Option<bool>,
    k: Option<OneOrMany<usize>>,
    scheme: Option<OneOrMany<String>>,
    shots: Option<OneOrMany<u64>>,
    reps: Option<usize>,
    seed: Option<u64>,
    mode: Option<String>,
    bin_fraction: Option<f64>,
    trotter_steps: Option<OneOrMany<usize>>,
    time: Option<f64>,
    ansatz_layers: Option<usize>,
    out: Option<PathBuf>,
    sequential: Option<bool>,
}

impl Flags {
    /// Fills every unset flag from the config file, if one was given.
    fn merged(mut self) -> Result<Flags, Error> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        let file: FileConfig = serde_json::from_str(&text).map_err(|e| Error::config("config", e.to_string()))?;
        // relative paths in the file resolve against the file's directory
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        macro_rules! fill {
            ($($f:ident <- $g:ident),* $(,)?) => { $( if self.$f.is_none() { self.$f = file.$g.map(Into::into); } )* };
        }
        fill!(
            experiment <- experiment, model <- model, n <- n, j <- j, field <- h, periodic <- periodic,
            k <- k, scheme <- scheme, shots <- shots, reps <- reps, seed <- seed, mode <- mode,
            bin_fraction <- bin_fraction, trotter_steps <- trotter_steps, time <- time,
            ansatz_layers <- ansatz_layers,
        );
        if self.hamiltonian.is_none() && self.model.is_none() {
            self.hamiltonian = file.hamiltonian.map(|p| base.join(p));
        }
        if self.out.is_none() {
            self.out = file.out.map(|p| base.join(p));
        }
        self.sequential |= file.sequential.unwrap_or(false);
        Ok(self)
    }

    fn source(&self) -> Result<HamiltonianSource, Error> {
        if let Some(path) = &self.hamiltonian {
            return Ok(HamiltonianSource::File(path.clone()));
        }
        let model: ModelKind = self
            .model
            .as_deref()
            .ok_or_else(|| Error::config("model", "either --hamiltonian or --model is required"))?
            .parse()?;
        let n = self.n.ok_or_else(|| Error::config("n", "required with --model"))?;
        Ok(HamiltonianSource::Model {
            model,
            n,
            j: self.j.unwrap_or(1.0),
            h: self.field.unwrap_or(1.0),
            periodic: self.periodic.unwrap_or(false),
        })
    }

    fn schemes(&self) -> Result<Vec<WeightingScheme>, Error> {
        match &self.scheme {
            Some(list) => list.iter().map(|s| s.parse()).collect(),
            None => Ok(vec![WeightingScheme::Uniform]),
        }
    }

    fn mode(&self) -> Result<EstimationMode, Error> {
        self.mode.as_deref().map_or(Ok(EstimationMode::Sampled), str::parse)
    }

    fn policy(&self) -> ExecPolicy {
        if self.sequential {
            ExecPolicy::Sequential
        } else {
            ExecPolicy::default()
        }
    }

    fn experiment_config(&self) -> Result<ExperimentConfig, Error> {
        let kind: ExperimentKind = self
            .experiment
            .as_deref()
            .ok_or_else(|| Error::config("experiment", "bench needs --experiment"))?
            .parse()?;
        let mut cfg = ExperimentConfig::new(self.source()?, kind);
        cfg.ks = self.k.clone().unwrap_or_default();
        cfg.schemes = self.schemes()?;
        if let Some(s) = &self.shots {
            cfg.shots = s.clone();
        }
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        cfg.seed = self.seed.unwrap_or(0);
        cfg.mode = self.mode()?;
        cfg.bin_fraction = self.bin_fraction;
        if let Some(steps) = &self.trotter_steps {
            cfg.trotter.steps = steps.clone();
        }
        if let Some(t) = self.time {
            cfg.trotter.time = t;
        }
        if let Some(l) = self.ansatz_layers {
            cfg.ansatz_layers = l;
        }
        cfg.policy = self.policy();
        Ok(cfg)
    }
}

fn single<T: Copy>(list: &Option<Vec<T>>, field: &str) -> Result<Option<T>, Error> {
    match list.as_deref() {
        None | Some([]) => Ok(None),
        Some([x]) => Ok(Some(*x)),
        Some(_) => Err(Error::config(field, "estimate takes a single value")),
    }
}

fn run_estimate(flags: Flags) -> Result<(), Error> {
    let h = flags.source()?.load()?;
    let n = h.num_qubits();
    let scheme = match flags.schemes()?.as_slice() {
        [s] => *s,
        _ => return Err(Error::config("scheme", "estimate takes a single value")),
    };
    let mut cfg = EstimationConfig::new(
        single(&flags.k, "k")?.unwrap_or(n),
        scheme,
        single(&flags.shots, "shots")?.unwrap_or(4000),
        flags.mode()?,
        flags.seed.unwrap_or(0),
    );
    cfg.bin_fraction = flags.bin_fraction;
    cfg.policy = flags.policy();

    let prep = match single(&flags.trotter_steps, "trotter-steps")? {
        Some(r) => {
            let mut c = build_neel(n);
            c.extend(&build_trotter(&h, flags.time.unwrap_or(0.1), r, None)?)?;
            c
        }
        None => build_random_ansatz(n, flags.ansatz_layers.unwrap_or(2), cfg.seed),
    };
    let report = estimate(&h, &prep, &cfg)?;
    let exact = if n <= MAX_EXPECTATION_QUBITS {
        let mut s = StateVector::zero(n)?;
        s.apply_circuit(&prep, cfg.policy)?;
        Some(exact_expectation(&h, &s)?)
    } else {
        log::warn!("n={n} exceeds {MAX_EXPECTATION_QUBITS} qubits; exact value omitted");
        None
    };
    let out = json!({
        "n": n,
        "terms": h.len(),
        "config": cfg,
        "estimate": report.value,
        "exact": exact,
        "diff": exact.map(|e| report.value - e),
        "report": report,
    });
    let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(dir) = &flags.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("estimate.json"), format!("{text}\n"))?;
    }
    out!("{text}");
    Ok(())
}

fn run_bench(flags: Flags) -> Result<(), Error> {
    let cfg = flags.experiment_config()?;
    let out = run_experiment(&cfg)?;
    let dir = flags.out.clone().unwrap_or_else(|| PathBuf::from("kcommute-out"));
    let (csv, json) = write_outputs(&dir, &out)?;
    for p in &out.summary.points {
        match (&p.error, p.error_stddev) {
            (Some(e), _) => out!(
                "{:<22} k={:<3} {:<8} shots={:<7} error: {e}",
                p.label,
                p.k,
                p.scheme,
                p.shots_budget
            ),
            (None, sd) => out!(
                "{:<22} k={:<3} {:<8} shots={:<7} groups={:<4} stddev={}",
                p.label,
                p.k,
                p.scheme,
                p.shots_budget,
                p.groups,
                sd.map_or("-".into(), |v| format!("{v:.6}")),
            ),
        }
    }
    if let Some(w) = &out.summary.winner {
        out!("winner: {w}");
    }
    for t in &out.summary.trotter {
        if let Some(e) = t.trotter_error {
            out!("trotter r={:<4} error={e:.3e}", t.steps);
        }
    }
    out!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Estimate(f) => f.merged().and_then(run_estimate),
        Command::Bench(f) => f.merged().and_then(run_bench),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
