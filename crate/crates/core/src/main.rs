use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use cram_core::controller::Mode;
use cram_core::harness::{
    generate, parse_trace, run, write_trace, Config, TraceRecord, WorkloadKind,
};

#[derive(Parser)]
#[command(
    name = "cramsim",
    about = "Trace-driven compressed-memory bandwidth simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a trace under one or more modes and write CSV statistics.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trace file, or `gen:<workload>` for a synthetic one.
        #[arg(long)]
        trace: String,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "uncompressed,explicit,cram-static,cram-dynamic,ideal"
        )]
        modes: Vec<Mode>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a synthetic trace.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        kind: WorkloadKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: Option<&PathBuf>, seed: Option<u64>) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::from_file(p).with_context(|| format!("config {}", p.display()))?,
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.set_seed(s);
    }
    Ok(cfg)
}

fn load_trace(source: &str, cfg: &Config) -> Result<Vec<TraceRecord>> {
    if let Some(kind) = source.strip_prefix("gen:") {
        let kind: WorkloadKind = kind.parse().map_err(anyhow::Error::msg)?;
        return Ok(generate(kind, &cfg.gen, cfg.ctrl.seed));
    }
    let f = File::open(source).with_context(|| format!("opening trace {source}"))?;
    parse_trace(BufReader::new(f)).with_context(|| format!("parsing trace {source}"))
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run {
            config,
            trace,
            modes,
            out,
            seed,
        } => {
            if modes.is_empty() {
                bail!("no modes requested");
            }
            let cfg = load_config(config.as_ref(), seed)?;
            let records = load_trace(&trace, &cfg)?;
            let report = run(&cfg, &records, &modes)?;
            let mut w = output(out.as_ref())?;
            w.write_all(report.to_csv().as_bytes())?;
            w.flush()?;
        }
        Cmd::Gen {
            config,
            kind,
            out,
            seed,
        } => {
            let cfg = load_config(config.as_ref(), seed)?;
            let records = generate(kind, &cfg.gen, cfg.ctrl.seed);
            let mut w = output(out.as_ref())?;
            write_trace(&records, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
