use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use soqo::bounds::{BoundInputs, BoundReport};
use soqo::experiment::{preset, preset_names, run_experiment, rows_to_csv, write_outputs, ExperimentConfig, ExperimentError};
use soqo::policies::offline_optimal;
use soqo::{Matrix, MinimizerTrace, PolicySpec, SpectralMatrix};

/// Smoothed online quadratic optimization experiments.
#[derive(Debug, Parser)]
#[command(name = "soqo", version)]
struct Cli {
    /// Master seed; overrides the config.
    #[arg(long, global = true, env = "SOQO_SEED")]
    seed: Option<u64>,
    /// Monte Carlo replications; overrides the config.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Output directory for CSV, SVG and the resolved config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run { config: PathBuf },
    /// Run a built-in experiment.
    Preset {
        name: String,
        /// Print the preset's TOML instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Print every closed-form bound that applies, as JSON.
    Bounds {
        /// `eig:l1,l2,..`, `geom:r,d`, `dense:a,b;c,d` or a bare eigenvalue list.
        a: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Per-coordinate increment variance (Σ = variance·I).
        #[arg(long)]
        variance: Option<f64>,
    },
    /// Hindsight-optimal cost of a trace CSV (`t,coord,value`).
    Offline {
        trace: PathBuf,
        /// Hitting-cost matrix, same syntax as for `bounds`.
        #[arg(long = "a")]
        a: String,
    },
    /// Print a coefficient schedule as CSV `t,i,rho`.
    DumpSchedule {
        a: String,
        #[arg(long = "T")]
        horizon: usize,
        /// `lai`, `lai-gamma:g`, `robd` or `fi:c1,c2,..`.
        #[arg(long)]
        kind: String,
    },
    /// List the built-in presets.
    ListPresets,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<soqo::Error> for Failure {
    fn from(e: soqo::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Config(format!("bad number `{x}` in matrix spec"))))
        .collect()
}

/// Parses the compact matrix syntax used on the command line.
fn parse_matrix(spec: &str) -> Result<SpectralMatrix<f64>, Failure> {
    let bad = |e: soqo::Error| Failure::Config(format!("matrix `{spec}`: {e}"));
    let (kind, body) = spec.split_once(':').unwrap_or(("eig", spec));
    match kind {
        "eig" => SpectralMatrix::diagonal(&parse_list(body)?).map_err(bad),
        "geom" => {
            let p = parse_list(body)?;
            let [r, d] = p[..] else {
                return Err(Failure::Config("geom takes `ratio,dim`".into()));
            };
            if d < 1.0 || d.fract() != 0.0 {
                return Err(Failure::Config("geom dimension must be a positive integer".into()));
            }
            let eig: Vec<f64> = (0..d as i32).map(|i| r.powi(i)).collect();
            SpectralMatrix::diagonal(&eig).map_err(bad)
        }
        "dense" => {
            let rows = body.split(';').map(parse_list).collect::<Result<Vec<_>, _>>()?;
            let m = Matrix::from_rows(&rows).ok_or_else(|| Failure::Config("dense rows differ in length".into()))?;
            SpectralMatrix::decompose(&m).map_err(bad)
        }
        other => Err(Failure::Config(format!("unknown matrix kind `{other}`"))),
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(n) = cli.runs {
        cfg.runs = n;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
}

fn execute(cli: &Cli, mut cfg: ExperimentConfig) -> Result<(), Failure> {
    apply_overrides(cli, &mut cfg);
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| Path::new(".").to_path_buf());
    let rows = run_experiment(&cfg)?;
    for path in write_outputs(&cfg, &rows, &dir)? {
        eprintln!("wrote {}", path.display());
    }
    emit(&rows_to_csv(&rows));
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config } => execute(cli, ExperimentConfig::load(config)?),
        Command::Preset { name, print_config } => {
            if name == "list-presets" || name == "list" {
                return dispatch_list();
            }
            let mut cfg = preset(name).ok_or_else(|| Failure::Config(format!("unknown preset `{name}`")))?;
            if *print_config {
                apply_overrides(cli, &mut cfg);
                emit(&cfg.to_toml());
                return Ok(());
            }
            execute(cli, cfg)
        }
        Command::Bounds {
            a,
            gamma,
            horizon,
            variance,
        } => {
            let a = parse_matrix(a)?;
            let inputs = BoundInputs {
                gamma: *gamma,
                horizon: *horizon,
                sigma: variance.map(|v| Matrix::identity(a.dim()).scale(v)),
            };
            let report = BoundReport::evaluate(&a, &inputs).map_err(|e| Failure::Config(e.to_string()))?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::Offline { trace, a } => {
            let a = parse_matrix(a)?;
            let text =
                std::fs::read_to_string(trace).map_err(|e| Failure::Runtime(format!("{}: {e}", trace.display())))?;
            let trace = MinimizerTrace::<f64>::from_csv(&text).map_err(|e| Failure::Config(e.to_string()))?;
            let sol = offline_optimal(&a, &trace)?;
            let out = serde_json::json!({
                "horizon": trace.horizon(),
                "dim": trace.dim(),
                "cost": sol.run.total,
                "kkt_residual": sol.kkt_residual,
            });
            println!("{}", serde_json::to_string_pretty(&out).map_err(|e| Failure::Runtime(e.to_string()))?);
            Ok(())
        }
        Command::DumpSchedule { a, horizon, kind } => {
            let a = parse_matrix(a)?;
            let spec: PolicySpec = kind.parse().map_err(|e: soqo::Error| Failure::Config(e.to_string()))?;
            let prepared = spec.prepare(&a, *horizon).map_err(|e| Failure::Config(e.to_string()))?;
            let schedule = prepared
                .schedule()
                .ok_or_else(|| Failure::Config(format!("`{kind}` has no coefficient schedule")))?;
            let mut csv = String::from("t,i,rho\n");
            for (t, row) in schedule.rows().iter().enumerate() {
                for (i, rho) in row.iter().enumerate() {
                    csv.push_str(&format!("{},{i},{rho}\n", t + 1));
                }
            }
            emit(&csv);
            Ok(())
        }
        Command::ListPresets => dispatch_list(),
    }
}

fn dispatch_list() -> Result<(), Failure> {
    let mut out = String::new();
    for name in preset_names() {
        let cfg = preset(&name).expect("listed presets resolve");
        out.push_str(&format!("{name}\t{}\n", cfg.description.unwrap_or_default()));
    }
    emit(&out);
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
