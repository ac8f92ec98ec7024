//! jigsaw: command-line front end over the double-graph solver, the seeded
//! ensembles, the exploration certificate, the closed-form bounds, and the
//! Monte Carlo experiment drivers.
//!
//! Reproducibility contract: stochastic subcommands require an explicit
//! --seed (no wall-clock default), every run with --out also writes
//! <out>.manifest.json holding the full configuration, and `jigsaw
//! --manifest <file>` replays that configuration byte-for-byte. --workers
//! only sizes the rayon pool; it never changes output bytes.
//!
//! Exit codes: 0 success, 2 usage, 3 input parse, 4 runtime.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use jigsaw_core::{
    cluster_stats, cycle_puzzle_threshold, estimate_critical_product, gen_double,
    normalized_spread, parse_edge_list, run_three_stage_traced, scaling_study, solve_fast,
    solve_reference, subcritical_union_bound, union_bound_window, wilson_interval,
    write_edge_list, ClusterStats, ERParams, ExperimentError, ExploreTrace,
    PercolationCertificate, RatioPolicy, ScalingRow, SeedSpec, ThresholdEstimate, DEFAULT_REL_TOL,
};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "jigsaw", version, about = "jigsaw percolation toolkit")]
struct Cli {
    /// Master seed; required by every stochastic subcommand
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (wall time only, never output bytes)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Artifact format where tabular output makes sense
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the artifact here plus <out>.manifest.json; stdout otherwise
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replay a stored run manifest (instead of a subcommand)
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Solve a double graph from an edge-list file (header "n m_red
    /// m_blue", then "R u v" and "B u v" lines)
    Solve {
        input: PathBuf,
        /// Use the quadratic reference solver instead of the fast one
        #[arg(long)]
        #[serde(default)]
        reference: bool,
    },
    /// Estimate percolation probability plus cluster statistics
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long)]
        trials: u64,
    },
    /// Bisect the critical product q = p1·p2 at fixed n
    Threshold {
        #[arg(long)]
        n: u32,
        /// Hold p1 fixed and search p2 = q/p1 (default: p1 = p2 = √q)
        #[arg(long)]
        #[serde(default)]
        fixed_p1: Option<f64>,
        #[arg(long, default_value_t = 400)]
        trials_per_probe: u64,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// Critical products across several n with the n·q̂·ln n column
    Scale {
        /// Comma-separated vertex counts
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<u32>,
        #[arg(long, default_value_t = 400)]
        trials_per_probe: u64,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// Cycle-puzzle threshold: blue n-cycle, red G(n,p), reporting p̂·ln n
    Cycle {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 200)]
        trials_per_probe: u64,
    },
    /// Evaluate the subcritical union bound chain over a product grid
    Bounds {
        #[arg(long)]
        n: u64,
        /// Comma-separated products q = p1·p2, split symmetrically
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
    },
    /// Run the staged exploration and emit its certificate
    Explore {
        #[arg(long)]
        n: u32,
        /// Per-sprinkle red density
        #[arg(long)]
        p1: f64,
        /// Per-sprinkle blue density
        #[arg(long)]
        p2: f64,
        /// Include the reveal-level trace (per-round and per-step sizes)
        #[arg(long)]
        #[serde(default)]
        trace: bool,
    },
    /// Generate a seeded double graph as edge-list text
    DumpGraph {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Sample { .. } => "sample",
            Command::Threshold { .. } => "threshold",
            Command::Scale { .. } => "scale",
            Command::Cycle { .. } => "cycle",
            Command::Bounds { .. } => "bounds",
            Command::Explore { .. } => "explore",
            Command::DumpGraph { .. } => "dump-graph",
        }
    }

    fn stochastic(&self) -> bool {
        !matches!(self, Command::Solve { .. } | Command::Bounds { .. })
    }
}

/// The serialized run manifest; replaying one reproduces the artifact
/// byte-for-byte.
#[derive(Clone, Serialize, Deserialize)]
struct RunConfig {
    #[serde(flatten)]
    command: Command,
    seed: Option<u64>,
    format: Format,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (mut config, replay) = match (cli.manifest, cli.command) {
        (Some(path), None) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
                CliError::Parse(format!("{}: line {}: {e}", path.display(), e.line()))
            })?;
            (cfg, true)
        }
        (None, Some(command)) => {
            let explicit_format = cli.format;
            validate_format(&command, explicit_format)?;
            let cfg = RunConfig {
                format: explicit_format.unwrap_or(Format::Json),
                command,
                seed: cli.seed,
                out: cli.out.clone(),
                workers: cli.workers,
            };
            (cfg, false)
        }
        (Some(_), Some(_)) => {
            return Err(usage("give either a subcommand or --manifest, not both"))
        }
        (None, None) => return Err(usage("missing subcommand (or --manifest <file>)")),
    };

    if replay {
        // only knobs that cannot change output bytes may be overridden
        if cli.seed.is_some() || cli.format.is_some() {
            return Err(usage("--seed/--format are fixed by the manifest"));
        }
        if let Some(out) = cli.out {
            config.out = Some(out);
        }
        if cli.workers.is_some() {
            config.workers = cli.workers;
        }
    }

    if config.command.stochastic() && config.seed.is_none() {
        return Err(usage(format!(
            "{} is stochastic and needs --seed",
            config.command.name()
        )));
    }
    if let Some(k) = config.workers {
        if k == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }

    let artifact = render(&config)?;

    match &config.out {
        Some(path) => {
            fs::write(path, &artifact)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            if !replay {
                let mpath = manifest_path(path);
                let mut manifest = serde_json::to_string_pretty(&config)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                manifest.push('\n');
                fs::write(&mpath, manifest)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", mpath.display())))?;
            }
        }
        None => print!("{artifact}"),
    }
    Ok(())
}

/// solve, explore and dump-graph have a single natural output shape; an
/// explicit conflicting --format is a usage error rather than silently
/// ignored.
fn validate_format(command: &Command, format: Option<Format>) -> Result<(), CliError> {
    match command {
        Command::Solve { .. } | Command::Explore { .. } => {
            if format == Some(Format::Csv) {
                Err(usage(format!("{} emits JSON only", command.name())))
            } else {
                Ok(())
            }
        }
        Command::DumpGraph { .. } => {
            if format.is_some() {
                Err(usage("dump-graph emits edge-list text; --format does not apply"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn seed_spec(config: &RunConfig) -> SeedSpec {
    // presence was validated up front
    SeedSpec::new(config.seed.expect("seed validated"), 0)
}

fn er_params(n: u32, p1: f64, p2: f64) -> Result<ERParams, CliError> {
    ERParams::new(n, p1, p2).map_err(|e| usage(e.to_string()))
}

fn experiment_error(e: ExperimentError) -> CliError {
    match e {
        // bad flag values, not failures of the run itself
        ExperimentError::TooSmall { .. } | ExperimentError::Param(_) => usage(e.to_string()),
        ExperimentError::BracketNotFound { .. } => CliError::Runtime(e.to_string()),
    }
}

fn check_probe_args(trials_per_probe: u64, rel_tol: f64) -> Result<(), CliError> {
    if trials_per_probe == 0 {
        return Err(usage("--trials-per-probe must be at least 1"));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(usage("--rel-tol must lie in (0, 1)"));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct SampleReport {
    estimate: f64,
    ci: [f64; 2],
    #[serde(flatten)]
    stats: ClusterStats,
}

#[derive(Serialize)]
struct ThresholdReport {
    #[serde(flatten)]
    estimate: ThresholdEstimate,
    normalized: f64,
}

const THRESHOLD_CSV_HEADER: &str =
    "n,q_lo,q_hi,est_lo,est_hi,q_hat,trials_per_probe,probes,normalized\n";

fn threshold_csv(est: &ThresholdEstimate) -> String {
    format!(
        "{}{},{},{},{},{},{},{},{},{}\n",
        THRESHOLD_CSV_HEADER,
        est.n,
        est.q_lo,
        est.q_hi,
        est.est_lo,
        est.est_hi,
        est.q_hat,
        est.trials_per_probe,
        est.probes,
        est.normalized()
    )
}

fn render(config: &RunConfig) -> Result<String, CliError> {
    match &config.command {
        Command::Solve { input, reference } => {
            let text = fs::read_to_string(input)
                .map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
            let dg = parse_edge_list(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let result = if *reference {
                solve_reference(&dg)
            } else {
                solve_fast(&dg)
            };
            to_json(&result.report())
        }
        Command::Sample { n, p1, p2, trials } => {
            let params = er_params(*n, *p1, *p2)?;
            if *trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let stats = cluster_stats(params, *trials, seed_spec(config));
            match config.format {
                Format::Csv => Ok(stats.to_csv()),
                Format::Json => {
                    let ci = wilson_interval(stats.percolated, stats.trials);
                    to_json(&SampleReport {
                        estimate: stats.percolated as f64 / stats.trials as f64,
                        ci: [ci.0, ci.1],
                        stats,
                    })
                }
            }
        }
        Command::Threshold {
            n,
            fixed_p1,
            trials_per_probe,
            rel_tol,
        } => {
            check_probe_args(*trials_per_probe, *rel_tol)?;
            let policy = match fixed_p1 {
                Some(p1) => RatioPolicy::FixedP1(*p1),
                None => RatioPolicy::Symmetric,
            };
            let est = estimate_critical_product(
                *n,
                policy,
                *trials_per_probe,
                *rel_tol,
                seed_spec(config),
            )
            .map_err(experiment_error)?;
            match config.format {
                Format::Csv => Ok(threshold_csv(&est)),
                Format::Json => to_json(&ThresholdReport {
                    normalized: est.normalized(),
                    estimate: est,
                }),
            }
        }
        Command::Scale {
            ns,
            trials_per_probe,
            rel_tol,
        } => {
            check_probe_args(*trials_per_probe, *rel_tol)?;
            let rows = scaling_study(ns, *trials_per_probe, *rel_tol, seed_spec(config))
                .map_err(experiment_error)?;
            match config.format {
                Format::Csv => {
                    let mut out = String::from("n,q_hat,normalized\n");
                    for r in &rows {
                        out.push_str(&format!("{},{},{}\n", r.n, r.q_hat, r.normalized));
                    }
                    Ok(out)
                }
                Format::Json => to_json(&ScaleReport {
                    spread: normalized_spread(&rows),
                    rows,
                }),
            }
        }
        Command::Cycle { n, trials_per_probe } => {
            if *trials_per_probe == 0 {
                return Err(usage("--trials-per-probe must be at least 1"));
            }
            let est = cycle_puzzle_threshold(*n, *trials_per_probe, seed_spec(config))
                .map_err(experiment_error)?;
            match config.format {
                Format::Csv => Ok(threshold_csv(&est)),
                Format::Json => to_json(&ThresholdReport {
                    normalized: est.normalized(),
                    estimate: est,
                }),
            }
        }
        Command::Bounds { n, q } => {
            let rows: Vec<BoundsRow> = q
                .iter()
                .map(|&q| BoundsRow::evaluate(*n, q))
                .collect::<Result<_, _>>()?;
            match config.format {
                Format::Csv => {
                    let mut out = String::from(BOUNDS_CSV_HEADER);
                    for r in &rows {
                        out.push_str(&r.csv_line());
                    }
                    Ok(out)
                }
                Format::Json => to_json(&rows),
            }
        }
        Command::Explore { n, p1, p2, trace } => {
            let params = er_params(*n, *p1, *p2)?;
            let (cert, reveals) = run_three_stage_traced(params, seed_spec(config))
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            if *trace {
                to_json(&TracedCertificate {
                    certificate: cert,
                    trace: reveals,
                })
            } else {
                to_json(&cert)
            }
        }
        Command::DumpGraph { n, p1, p2 } => {
            let params = er_params(*n, *p1, *p2)?;
            let dg = gen_double(params, seed_spec(config));
            Ok(write_edge_list(&dg))
        }
    }
}

#[derive(Serialize)]
struct ScaleReport {
    rows: Vec<ScalingRow>,
    spread: f64,
}

#[derive(Serialize)]
struct TracedCertificate {
    #[serde(flatten)]
    certificate: PercolationCertificate,
    trace: ExploreTrace,
}

const BOUNDS_CSV_HEADER: &str =
    "n,q,p1,p2,k_lo,k_hi,ln_exact,exact,ln_step1,step1,ln_step2,step2,ln_geometric,geometric,divergent\n";

/// One evaluated grid point of the subcritical union bound chain.
#[derive(Serialize)]
struct BoundsRow {
    n: u64,
    q: f64,
    p1: f64,
    p2: f64,
    k_lo: u64,
    k_hi: u64,
    ln_exact: f64,
    exact: f64,
    ln_step1: f64,
    step1: f64,
    ln_step2: f64,
    step2: f64,
    ln_geometric: f64,
    geometric: f64,
    divergent: bool,
}

impl BoundsRow {
    fn evaluate(n: u64, q: f64) -> Result<BoundsRow, CliError> {
        if n < 3 {
            return Err(usage("--n must be at least 3"));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(usage(format!("product {q} outside [0,1]")));
        }
        let p = q.sqrt();
        let (exact, chain) = subcritical_union_bound(n, p, p);
        let (k_lo, k_hi) = union_bound_window(n);
        Ok(BoundsRow {
            n,
            q,
            p1: p,
            p2: p,
            k_lo,
            k_hi,
            ln_exact: exact.log_value,
            exact: exact.linear,
            ln_step1: chain[0].log_value,
            step1: chain[0].linear,
            ln_step2: chain[1].log_value,
            step2: chain[1].linear,
            ln_geometric: chain[2].log_value,
            geometric: chain[2].linear,
            divergent: chain[2].has_flag("divergent"),
        })
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.n,
            self.q,
            self.p1,
            self.p2,
            self.k_lo,
            self.k_hi,
            self.ln_exact,
            self.exact,
            self.ln_step1,
            self.step1,
            self.ln_step2,
            self.step2,
            self.ln_geometric,
            self.geometric,
            self.divergent
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_every_subcommand() {
        let configs = vec![
            RunConfig {
                command: Command::Solve {
                    input: PathBuf::from("g.txt"),
                    reference: true,
                },
                seed: None,
                format: Format::Json,
                out: None,
                workers: None,
            },
            RunConfig {
                command: Command::Threshold {
                    n: 256,
                    fixed_p1: Some(0.25),
                    trials_per_probe: 400,
                    rel_tol: 0.05,
                },
                seed: Some(7),
                format: Format::Csv,
                out: Some(PathBuf::from("t.csv")),
                workers: Some(4),
            },
            RunConfig {
                command: Command::Scale {
                    ns: vec![256, 512],
                    trials_per_probe: 400,
                    rel_tol: 0.05,
                },
                seed: Some(11),
                format: Format::Csv,
                out: None,
                workers: None,
            },
            RunConfig {
                command: Command::DumpGraph {
                    n: 10,
                    p1: 0.5,
                    p2: 0.25,
                },
                seed: Some(1),
                format: Format::Json,
                out: None,
                workers: None,
            },
        ];
        for cfg in configs {
            let json = serde_json::to_string(&cfg).unwrap();
            let back: RunConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
    }

    #[test]
    fn manifest_json_names_the_subcommand() {
        let cfg = RunConfig {
            command: Command::Cycle {
                n: 4096,
                trials_per_probe: 200,
            },
            seed: Some(3),
            format: Format::Json,
            out: None,
            workers: None,
        };
        let v: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(v["subcommand"], "cycle");
        assert_eq!(v["n"], 4096);
        assert_eq!(v["seed"], 3);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("dir/run.csv")),
            PathBuf::from("dir/run.csv.manifest.json")
        );
        assert_eq!(
            manifest_path(Path::new("out")),
            PathBuf::from("out.manifest.json")
        );
    }

    #[test]
    fn format_restrictions() {
        let solve = Command::Solve {
            input: PathBuf::from("x"),
            reference: false,
        };
        assert!(validate_format(&solve, Some(Format::Csv)).is_err());
        assert!(validate_format(&solve, Some(Format::Json)).is_ok());
        let dump = Command::DumpGraph {
            n: 4,
            p1: 0.5,
            p2: 0.5,
        };
        assert!(validate_format(&dump, Some(Format::Json)).is_err());
        assert!(validate_format(&dump, None).is_ok());
    }

    #[test]
    fn bounds_row_matches_direct_evaluation() {
        let row = BoundsRow::evaluate(4096, 1e-6).unwrap();
        let p = 1e-6f64.sqrt();
        let (exact, chain) = subcritical_union_bound(4096, p, p);
        assert_eq!(row.ln_exact, exact.log_value);
        assert_eq!(row.ln_geometric, chain[2].log_value);
        assert_eq!((row.k_lo, row.k_hi), union_bound_window(4096));
    }
}
