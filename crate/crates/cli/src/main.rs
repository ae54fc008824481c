use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use permendo::commands::{self, OracleTarget, TableSource};
use permendo::scenario::{parse_sqrt, Overrides};
use permendo::{render, CliError};
use serde_json::Value;

/// Endomorphism rings of permutation modules: orbits, intersection matrices,
/// character tables and reduction modulo a prime.
#[derive(Debug, Parser)]
#[command(name = "permendo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random elements drawn during orbit enumeration.
    #[arg(long, global = true)]
    budget_probes: Option<u64>,
    /// Bytes available for stored orbit points.
    #[arg(long, global = true)]
    budget_memory: Option<u64>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Image of a square root mod p, as `n=s`; repeatable.
    #[arg(long, global = true, value_parser = parse_sqrt)]
    sqrt: Vec<(i64, u64)>,
    /// Print an aligned text rendering instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Also write the JSON report into this directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Intersection file with every P_j.
    #[arg(long)]
    intersection: Option<PathBuf>,
    /// Character table file; disables the regular-module Cartan check.
    #[arg(long)]
    chartab: Option<PathBuf>,
}

impl Source {
    fn resolve(self) -> TableSource {
        match (self.scenario, self.intersection, self.chartab) {
            (Some(s), _, _) => TableSource::Scenario(s),
            (_, Some(i), _) => TableSource::Intersection(i),
            (_, _, Some(c)) => TableSource::Chartab(c),
            _ => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// H-orbits on O.
    Orbits { scenario: PathBuf },
    /// Intersection matrices P_j.
    Intersect {
        scenario: PathBuf,
        /// 1-based orbit indices; all when omitted.
        #[arg(short = 'j', long = "orbit")]
        orbits: Vec<usize>,
    },
    /// Split character table of E.
    Chartab {
        #[command(flatten)]
        source: Source,
    },
    /// Reduced table, basic set, decomposition and Cartan matrices, blocks.
    Decomp {
        #[command(flatten)]
        source: Source,
    },
    /// Whether the permutation module is indecomposable.
    Verdict {
        #[command(flatten)]
        source: Source,
    },
    /// Candidates for the projective cover of the trivial module.
    Candidates {
        #[arg(value_name = "TABLE")]
        file: PathBuf,
    },
    /// Cross-check against brute-force constructions.
    Oracle {
        scenario: Option<PathBuf>,
        /// One corpus instance by name.
        #[arg(long, conflicts_with = "scenario")]
        instance: Option<String>,
    },
    /// Consistency checks on the stored J4 tables.
    Fixtures,
    /// The corpus used by the oracle command.
    Corpus,
}

fn run(command: Command, g: &Global) -> Result<(&'static str, Value), CliError> {
    let o = Overrides { seed: g.seed, budget_probes: g.budget_probes, budget_memory: g.budget_memory, p: g.p, sqrt: g.sqrt.clone() };
    Ok(match command {
        Command::Orbits { scenario } => ("orbits", commands::orbits(&scenario, &o)?),
        Command::Intersect { scenario, orbits } => ("intersect", commands::intersect(&scenario, &orbits, &o)?),
        Command::Chartab { source } => ("chartab", commands::chartab(&source.resolve(), &o)?),
        Command::Decomp { source } => ("decomp", commands::decomp(&source.resolve(), &o)?),
        Command::Verdict { source } => ("verdict", commands::verdict(&source.resolve(), &o)?),
        Command::Candidates { file } => ("candidates", commands::candidates(&file, &o)?),
        Command::Oracle { scenario, instance } => {
            let target = match scenario {
                Some(s) => OracleTarget::Scenario(s),
                None => OracleTarget::Corpus(instance),
            };
            ("oracle", commands::oracle(&target, &o)?)
        }
        Command::Fixtures => ("fixtures", commands::fixtures()?),
        Command::Corpus => ("corpus", commands::corpus_manifest()?),
    })
}

fn emit(name: &str, v: &Value, g: &Global) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(CliError::input)?;
    if let Some(dir) = &g.output {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    if g.table {
        print!("{}", render::render(v));
    } else {
        println!("{text}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let Cli { command, global } = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(command, &global) {
        Ok((name, v)) => {
            if let Err(e) = emit(name, &v, &global) {
                eprintln!("permendo: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            if v.get("passed") == Some(&Value::Bool(false)) {
                eprintln!("permendo: {name} checks failed");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("permendo: {e}");
            if let CliError::Budget { report, .. } = &e {
                let _ = emit("budget", &serde_json::json!({ "status": "budget_exhausted", "message": e.to_string(), "report": report }), &global);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
