//! `chords`: counting, sampling and experiments on chord diagrams.
//!
//! Exit codes: 0 success, 1 failed validation, 2 configuration or input
//! error.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use chords_core::analytics::component_summary;
use chords_core::exact::brute::brute_force_row;
use chords_core::exact::{crossing_row, max_crossings, touchard_riordan, write_rows_csv,
    write_rows_json};
use chords_core::experiments::{run_asym_table, run_connectivity, run_cutdist, run_sweep,
    run_validate, ExperimentConfig, Format, RunRecord, ValidateOptions};
use chords_core::sampler::{sample, Method, SamplerConfig, Tilt};
use chords_core::{dp_count, ChordDiagram};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chords", version, about = "Chord diagrams graded by crossing number")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key = value` file; its settings override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    Formula,
    Dp,
    Brute,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of diagrams with n chords and m crossings.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = CountMethod::Formula)]
        method: CountMethod,
    },
    /// The full crossing distribution for each listed n.
    Row {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Uniform random diagrams with exactly m crossings.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Connected components of a diagram given as 1-based pairs, e.g.
    /// `[[1,4],[2,5],[3,6]]`.
    Components {
        /// Pairs as JSON; read from standard input when omitted.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Cross-checks the counting algorithms against each other.
    Validate {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Corrupt one DP value to exercise the failure path.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Monte Carlo and table experiments.
    Exp {
        #[command(subcommand)]
        kind: ExpKind,
    },
}

#[derive(Args, Debug, Clone)]
struct SamplerArgs {
    #[arg(long, default_value = "exact")]
    method: String,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    /// Positive number or `auto`.
    #[arg(long, default_value = "auto")]
    tilt: String,
}

#[derive(Args, Debug, Clone)]
struct ExpArgs {
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Comma-separated rules such as `100`, `n/14`, `0.1*nlogn`.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    replicates: Option<usize>,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Subcommand, Debug)]
enum ExpKind {
    /// Largest-component statistics over a grid of (n, m)
    Sweep(ExpArgs),
    /// Cut-count histogram against its limiting law
    Cutdist(ExpArgs),
    /// Connectivity and isolated chords of uniform diagrams
    Connectivity(ExpArgs),
    /// Exact counts against the asymptotic formula
    Asym(ExpArgs),
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

struct Globals {
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    threads: Option<usize>,
    /// Keys from the config file that are not global.
    rest: Vec<(String, String)>,
}

fn globals(cli: &Cli) -> anyhow::Result<Globals> {
    let mut g = Globals {
        seed: cli.seed,
        format: cli.format.into(),
        out: cli.out.clone(),
        threads: cli.threads,
        rest: Vec::new(),
    };
    let Some(path) = &cli.config else { return Ok(g) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(config_err(format!("{}:{}: expected key = value", path.display(), lineno + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        let parse_err = |_| config_err(format!("bad value {v:?} for {k}"));
        match k {
            "seed" => g.seed = v.parse().map_err(parse_err)?,
            "format" => g.format = v.parse().map_err(config_err)?,
            "out" => g.out = Some(PathBuf::from(v)),
            "threads" => g.threads = Some(v.parse().map_err(parse_err)?),
            _ => g.rest.push((k.to_string(), v.to_string())),
        }
    }
    Ok(g)
}

fn output(g: &Globals) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &g.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| config_err(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn no_extra_keys(g: &Globals) -> anyhow::Result<()> {
    if let Some((k, _)) = g.rest.first() {
        return Err(config_err(format!("config key {k:?} does not apply to this command")));
    }
    Ok(())
}

fn sampler_config(seed: u64, args: &SamplerArgs) -> anyhow::Result<SamplerConfig> {
    let method: Method = args.method.parse().map_err(config_err)?;
    let tilt = if args.tilt == "auto" {
        Tilt::Auto
    } else {
        Tilt::Fixed(args.tilt.parse().map_err(|_| config_err(format!("bad tilt {:?}", args.tilt)))?)
    };
    let cfg = SamplerConfig {
        seed,
        method,
        mcmc_burn_in: args.burn_in,
        mcmc_thin: args.thin,
        tilt,
        ..SamplerConfig::default()
    };
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn experiment_config(name: &str, args: &ExpArgs, g: &Globals) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(name);
    cfg.seed = g.seed;
    cfg.format = g.format;
    cfg.out = g.out.clone();
    cfg.n_list = args.n.clone();
    if let Some(m) = &args.m {
        cfg.set("m", m).map_err(config_err)?;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    let s = sampler_config(g.seed, &args.sampler)?;
    cfg.method = s.method;
    cfg.mcmc_burn_in = s.mcmc_burn_in;
    cfg.mcmc_thin = s.mcmc_thin;
    cfg.tilt = s.tilt;
    for (k, v) in &g.rest {
        cfg.set(k, v).map_err(config_err)?;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn count(n: usize, m: usize, method: CountMethod) -> anyhow::Result<String> {
    if n == 0 {
        return Err(config_err("n must be positive"));
    }
    Ok(match method {
        CountMethod::Formula => touchard_riordan(n, m).to_string(),
        CountMethod::Dp => {
            if m > max_crossings(n) {
                "0".to_string()
            } else {
                dp_count(n, m).map_err(config_err)?.0.to_string()
            }
        }
        CountMethod::Brute => brute_force_row(n).map_err(config_err)?.get(m).to_string(),
    })
}

/// Returns `Ok(false)` when a validation ran and failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let g = globals(&cli)?;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Count { n, m, method } => {
            no_extra_keys(&g)?;
            let value = count(*n, *m, *method)?;
            let mut out = output(&g)?;
            match g.format {
                Format::Csv => writeln!(out, "n,m,T\n{n},{m},{value}")?,
                Format::Json => writeln!(out, "{{\"n\":{n},\"m\":{m},\"T\":\"{value}\"}}")?,
            }
            out.flush()?;
        }
        Command::Row { n } => {
            no_extra_keys(&g)?;
            if n.contains(&0) {
                return Err(config_err("n must be positive"));
            }
            let rows: Vec<_> = n.iter().map(|&k| crossing_row(k)).collect();
            let mut out = output(&g)?;
            match g.format {
                Format::Csv => write_rows_csv(&rows, &mut out)?,
                Format::Json => write_rows_json(&rows, &mut out)?,
            }
            out.flush()?;
        }
        Command::Sample { n, m, count, sampler } => {
            no_extra_keys(&g)?;
            let cfg = sampler_config(g.seed, sampler)?;
            let batch = sample(*n, *m, *count, &cfg).map_err(config_err)?;
            let mut out = output(&g)?;
            match g.format {
                Format::Json => batch.write_jsonl(&mut out)?,
                Format::Csv => {
                    writeln!(out, "n,m,seed,method,index,pairs")?;
                    for (i, d) in batch.diagrams.iter().enumerate() {
                        writeln!(out, "{n},{m},{},{},{i},\"{}\"", g.seed, cfg.method, d.to_json())?;
                    }
                }
            }
            out.flush()?;
            if let Some(rate) = batch.diagnostics.acceptance_rate {
                eprintln!("acceptance rate {rate:.4}");
            }
        }
        Command::Components { pairs } => {
            no_extra_keys(&g)?;
            let text = match pairs {
                Some(p) => p.clone(),
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let d = ChordDiagram::from_json(text.trim()).map_err(config_err)?;
            let s = component_summary(&d);
            let mut out = output(&g)?;
            match g.format {
                Format::Json => {
                    serde_json::to_writer(&mut out, &s)?;
                    writeln!(out)?;
                }
                Format::Csv => {
                    writeln!(out, "component,nu,mu,members,largest,densest")?;
                    for (i, c) in s.components.iter().enumerate() {
                        let members: Vec<String> =
                            c.members.iter().map(|v| (v + 1).to_string()).collect();
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            i + 1,
                            c.nu,
                            c.mu,
                            members.join(" "),
                            s.largest_by_chords == Some(i),
                            s.densest == Some(i)
                        )?;
                    }
                }
            }
            out.flush()?;
        }
        Command::Validate { max_n, inject_fault } => {
            no_extra_keys(&g)?;
            let report =
                run_validate(ValidateOptions { max_n: *max_n, inject_fault: *inject_fault })
                    .map_err(config_err)?;
            let mut out = output(&g)?;
            for (what, ok) in &report.checks {
                writeln!(out, "{} {what}", if *ok { "ok  " } else { "FAIL" })?;
            }
            writeln!(out, "{}", report.summary())?;
            out.flush()?;
            return Ok(report.passed());
        }
        Command::Exp { kind } => {
            let (name, args) = match kind {
                ExpKind::Sweep(a) => ("sweep", a),
                ExpKind::Cutdist(a) => ("cutdist", a),
                ExpKind::Connectivity(a) => ("connectivity", a),
                ExpKind::Asym(a) => ("asym", a),
            };
            let cfg = experiment_config(name, args, &g)?;
            let record: RunRecord = match name {
                "sweep" => run_sweep(&cfg),
                "cutdist" => run_cutdist(&cfg),
                "connectivity" => run_connectivity(&cfg),
                _ => run_asym_table(&cfg),
            }
            .map_err(config_err)?;
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            record.write_output(&mut lock)?;
            lock.flush()?;
            eprintln!(
                "{name}: {} rows, version {}, seed {}, {:.2} s",
                record.table.rows.len(),
                record.version,
                record.seed,
                record.wall_time.as_secs_f64()
            );
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
