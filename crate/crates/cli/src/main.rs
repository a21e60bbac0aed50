use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use heatstein_cli::config::parse_list;
use heatstein_cli::{
    dump_samples, emit, run_suite, write_jsonl, EmitKind, ExperimentConfig, FileConfig, Header,
    Overrides, SampleKind, Suite,
};

#[derive(Parser)]
#[command(name = "heatstein", version, about = "Seeded verification runs for W = Tr(AO) on the orthogonal group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write JSON-lines reports.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Write CSV plot data.
    Emit {
        #[arg(value_enum)]
        kind: EmitKind,
        #[command(flatten)]
        common: Common,
    },
    /// Dump raw Haar or exchangeable-pair samples as CSV.
    Sample {
        #[arg(value_enum, default_value = "pairs")]
        kind: SampleKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// identity | borel | random:SEED | file:PATH
    #[arg(long = "A", value_name = "SOURCE")]
    a: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Haar samples for scalar and distance checks (accepts 1e6).
    #[arg(long, value_parser = parse_count)]
    samples: Option<usize>,
    /// Resamples per base point and time for conditional and increment checks.
    #[arg(long, value_parser = parse_count)]
    resamples: Option<usize>,
    /// Number of base points for conditional checks.
    #[arg(long)]
    panel: Option<usize>,
    /// Heat times for the conditional checks, comma separated.
    #[arg(long = "t-grid", value_name = "T,T,..")]
    t_grid: Option<String>,
    /// Heat times for the increment scaling fit, comma separated.
    #[arg(long = "increment-grid", value_name = "T,T,..")]
    increment_grid: Option<String>,
    /// MGF truncation degree and weight cap for the symbolic suite.
    #[arg(long = "max-degree")]
    max_degree: Option<usize>,
    /// Dimensions for `emit bound-vs-n`, comma separated.
    #[arg(long, value_name = "N,N,..")]
    ns: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => Err(format!("expected a whole number, got {s:?}")),
    }
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let file = self.config.as_deref().map(FileConfig::load).transpose()?;
        let overrides = Overrides {
            n: self.n,
            a: self.a.as_deref().map(str::parse).transpose()?,
            seed: self.seed,
            samples: self.samples,
            resamples: self.resamples,
            panel: self.panel,
            t_grid: self.t_grid.as_deref().map(parse_list).transpose()?,
            increment_grid: self.increment_grid.as_deref().map(parse_list).transpose()?,
            max_degree: self.max_degree,
            bound_ns: self.ns.as_deref().map(parse_list).transpose()?,
            out: self.out.clone(),
            threads: self.threads,
        };
        ExperimentConfig::build(file, overrides)
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn setup(common: &Common) -> Result<ExperimentConfig> {
    let cfg = common.resolve()?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring worker threads")?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, common } => {
            let cfg = setup(&common)?;
            let reports = run_suite(&cfg, suite)?;
            let command = format!("verify {}", suite_name(suite));
            write_jsonl(open_output(cfg.out.as_deref())?, &Header::new(&command, &cfg), &reports)?;
            let mut stderr = io::stderr().lock();
            for r in &reports {
                writeln!(stderr, "{}", r.summary_line())?;
            }
            let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
            writeln!(stderr, "{}/{} checks passed", reports.len() - failed.len(), reports.len())?;
            for r in &failed {
                writeln!(stderr, "failed: {}", r.name)?;
            }
            Ok(failed.is_empty())
        }
        Command::Emit { kind, common } => {
            let cfg = setup(&common)?;
            emit(&cfg, kind, open_output(cfg.out.as_deref())?)?;
            Ok(true)
        }
        Command::Sample { kind, common } => {
            let cfg = setup(&common)?;
            dump_samples(&cfg, kind, open_output(cfg.out.as_deref())?)?;
            Ok(true)
        }
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Symbolic => "symbolic",
        Suite::Lemmas => "lemmas",
        Suite::Distance => "distance",
        Suite::All => "all",
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
