use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use simplex_forecast::baselines::Method;
use simplex_forecast::evaluation::{cross_validate_beta, run_experiment, ExperimentConfig, Fold};
use simplex_forecast::synthetic::{consistency_experiment, normality_experiment, MonteCarloOptions, SyntheticConfig};
use simplex_forecast::{
    build_index, build_slice_tables, confidence_interval, estimate_or_fallback, load_prefix, slice, BootstrapOptions,
    Error, FallbackPolicy, Filtration, KernelParams, Simplex,
};

#[derive(Parser)]
#[command(
    name = "simplex-forecast",
    version,
    about = "Forecast simplex closures in temporal simplicial complexes"
)]
struct Cli {
    /// Worker threads for parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score candidate closures for the slice after the last one.
    Predict {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Number of top-scoring candidates to print.
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Only score candidates of this simplex, e.g. `3,7`.
        #[arg(long)]
        simplex: Option<String>,
        /// Attach a bootstrap interval at this level, e.g. 0.9.
        #[arg(long)]
        interval: Option<f64>,
    },
    /// Run the evaluation protocol and report AUC.
    Evaluate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo checks of the estimator on synthetic filtrations.
    Validate {
        #[command(subcommand)]
        check: Check,
    },
}

#[derive(Subcommand)]
enum Check {
    /// Mean absolute error at several horizons with β = 1/T.
    Consistency {
        #[arg(long = "T-grid", value_delimiter = ',', default_value = "25,100,400")]
        t_grid: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// KS test of standardized errors with β = T^-0.6.
    Normality {
        #[arg(long = "T", default_value_t = 500)]
        slices: usize,
        #[arg(long, default_value_t = 200)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Experiment flags; each one overrides the same key from `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// Dataset prefix (`<prefix>-nverts.txt` ...) or a directory holding one dataset.
    #[arg(long)]
    data: Option<String>,
    /// File of `key=value` lines using the flag names below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "T")]
    slices: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Highest f-vector entry kept (defaults to d + 2).
    #[arg(long = "D")]
    max_dim: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Fixed β; otherwise chosen by cross-validation over `--beta-grid`.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long = "beta-grid")]
    beta_grid: Option<String>,
    /// Cross-validation folds.
    #[arg(long = "K")]
    folds: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long = "n-per-class")]
    n_per_class: Option<String>,
    /// Extra history slices in the index (defaults to all).
    #[arg(long)]
    window: Option<String>,
    /// ours, aa, jc, pa or all.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

enum Failure {
    Usage(String),
    Data(String),
    Insufficient(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) | Error::MalformedDataset(_) | Error::Parse(_) => Failure::Data(msg),
            Error::InsufficientData { .. }
            | Error::InsufficientSlices { .. }
            | Error::InsufficientPositives { .. }
            | Error::InsufficientNegatives { .. }
            | Error::TooManySlices { .. }
            | Error::DegenerateLabels
            | Error::DegenerateStart(_)
            | Error::DegenerateDistribution
            | Error::LabelSliceMissing(_) => Failure::Insufficient(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl ExperimentArgs {
    /// Returns the merged config and whether `--method all` was requested.
    fn resolve(&self) -> Result<(ExperimentConfig, bool), Failure> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
                ExperimentConfig::from_kv(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let mut all = false;
        let flags = [
            ("data", &self.data),
            ("T", &self.slices),
            ("d", &self.d),
            ("k", &self.k),
            ("D", &self.max_dim),
            ("delta", &self.delta),
            ("beta", &self.beta),
            ("beta-grid", &self.beta_grid),
            ("K", &self.folds),
            ("repeats", &self.repeats),
            ("n-per-class", &self.n_per_class),
            ("window", &self.window),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| Failure::Usage(e.to_string()))?;
            }
        }
        match self.method.as_deref() {
            Some("all") => all = true,
            Some(m) => cfg.set("method", m).map_err(|e| Failure::Usage(e.to_string()))?,
            None => {}
        }
        cfg.validate()?;
        Ok((cfg, all))
    }
}

fn resolve_prefix(data: &str) -> Result<PathBuf, Failure> {
    let path = Path::new(data);
    if !path.is_dir() {
        return Ok(path.to_path_buf());
    }
    let mut found: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Failure::Data(format!("{data}: {e}")))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            name.strip_suffix("-nverts.txt").map(|stem| path.join(stem))
        })
        .collect();
    match found.len() {
        1 => Ok(found.remove(0)),
        0 => Err(Failure::Data(format!("{data}: no *-nverts.txt file found"))),
        _ => Err(Failure::Data(format!("{data}: several datasets found, pass a prefix"))),
    }
}

fn load(cfg: &ExperimentConfig) -> Result<Filtration, Failure> {
    let data = cfg
        .data
        .as_deref()
        .ok_or_else(|| Failure::Usage("--data is required".into()))?;
    let log = load_prefix(resolve_prefix(data)?)?;
    Ok(slice(&log, cfg.slices)?)
}

fn parse_simplex(s: &str) -> Result<Simplex, Failure> {
    let vs: Vec<u32> = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad vertex {v:?} in --simplex")))
        })
        .collect::<Result<_, _>>()?;
    Simplex::new(vs).map_err(|e| Failure::Usage(e.to_string()))
}

fn predict(exp: &ExperimentArgs, top: usize, only: Option<&str>, level: Option<f64>) -> Result<(), Failure> {
    let (cfg, _) = exp.resolve()?;
    let mut f = load(&cfg)?;
    let t = f.num_slices();
    let beta = match cfg.beta {
        Some(b) => b,
        None => cross_validate_beta(&f, &cfg.beta_grid, cfg.folds, &cfg.sampler(cfg.seed))?,
    };
    let params = KernelParams::new(beta, cfg.delta)?;
    let last = t - 2;
    let window = cfg.window.map_or(last, |p| p.min(last));
    let index = build_index(&f, last, window, cfg.features())?;
    let tables = match level {
        Some(_) => Some(build_slice_tables(&f, last, window, cfg.features())?),
        None => None,
    };
    f.push_slice(Vec::new());
    let fold = Fold::population_only(&f, t, cfg.features())?;
    let only = only.map(parse_simplex).transpose()?;
    if let Some(s) = &only {
        if !fold.snapshot.contains(s) {
            return Err(Error::SimplexNotPresent(s.to_string()).into());
        }
    }
    let mut scored = Vec::new();
    for c in &fold.population {
        if only.as_ref().is_some_and(|s| *s != c.simplex) {
            continue;
        }
        let p = estimate_or_fallback(&index, &c.feature, params, FallbackPolicy::BaseRate)?;
        scored.push((p, c));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (p, c) in scored.into_iter().take(top) {
        let mut row = json!({
            "simplex": c.simplex.vertices(),
            "candidate": c.candidate,
            "feature": c.feature.values(),
            "probability": p,
            "beta": beta,
        });
        if let (Some(level), Some(tables)) = (level, &tables) {
            let (lo, hi) = confidence_interval(
                tables,
                &c.feature,
                params,
                level,
                BootstrapOptions {
                    seed: cfg.seed,
                    ..BootstrapOptions::default()
                },
            )?;
            row["interval"] = json!([lo, hi]);
        }
        println!("{row}");
    }
    Ok(())
}

fn evaluate(exp: &ExperimentArgs, as_json: bool) -> Result<(), Failure> {
    let (cfg, all) = exp.resolve()?;
    let f = load(&cfg)?;
    let methods: Vec<Method> = if all {
        std::iter::once(Method::Ours).chain(Method::BASELINES).collect()
    } else {
        vec![cfg.method]
    };
    for (i, method) in methods.into_iter().enumerate() {
        let report = run_experiment(&f, &ExperimentConfig { method, ..cfg.clone() })?;
        if as_json {
            println!("{}", report.to_json());
        } else {
            let table = report.to_table();
            // header only once
            let body = if i == 0 {
                table.as_str()
            } else {
                table.split_once('\n').map_or("", |x| x.1)
            };
            print!("{body}");
        }
    }
    Ok(())
}

fn validate(check: &Check) -> Result<(), Failure> {
    match *check {
        Check::Consistency {
            ref t_grid,
            replicates,
            seed,
        } => {
            let start = *t_grid
                .first()
                .ok_or_else(|| Failure::Usage("--T-grid is empty".into()))?;
            let cfg = SyntheticConfig::star_family(start, seed);
            let report = consistency_experiment(&cfg, t_grid, &MonteCarloOptions::consistency(replicates))?;
            print!("{}", report.to_csv());
            let probes: Vec<_> = report.probes.iter().map(|p| p.values().to_vec()).collect();
            eprintln!("probes {probes:?}, truth {:?}", report.truth);
        }
        Check::Normality {
            slices,
            replicates,
            seed,
        } => {
            let cfg = SyntheticConfig::star_family(slices, seed);
            let report = normality_experiment(&cfg, &MonteCarloOptions::normality(replicates))?;
            print!("{}", report.to_csv());
            eprintln!(
                "probe {:?}, g {:.4}, beta {:.4}, KS D {:.4}, p-value {:.4}",
                report.probe.values(),
                report.truth,
                report.beta,
                report.ks.statistic,
                report.ks.p_value
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Predict {
            exp,
            top,
            simplex,
            interval,
        } => predict(exp, *top, simplex.as_deref(), *interval),
        Command::Evaluate { exp, json } => evaluate(exp, *json),
        Command::Validate { check } => validate(check),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Insufficient(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
    }
}
