//! `canonforge`: enumerate digraphs, search reset words, or run a pipeline
//! over a domain described in JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use canonforge::domain::SpecFile;
use canonforge::parallel::WORKERS_ENV;
use canonforge::pipeline::Method;
use canonforge::problems::{automata, digraphs, reset_word_pipeline, shortest_reset_word, without_loops, ResetMode};
use canonforge::value::value_to_json;
use canonforge::{Domain, ExecutionContext, Output, Pipeline, PoolConfig, Value};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "canonforge",
    version,
    about = "Enumerate discrete structures up to isomorphism"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Directed graphs on N unlabeled nodes.
    Digraphs {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        nodes: u32,
        /// iterate, cnfs or generate:K
        #[arg(long, default_value = "cnfs")]
        mode: Mode,
        /// Keep only graphs without self-loops.
        #[arg(long)]
        no_loops: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Longest minimal reset word over automata with N states and K symbols.
    Resetwords {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        states: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        symbols: u32,
        #[arg(long, value_enum, default_value = "cnfs")]
        mode: ResetArg,
        /// Job duration the parallel planner aims for.
        #[arg(long, default_value_t = 100)]
        target_job_ms: u64,
        /// Also report how many classes have no reset word at all.
        #[arg(long)]
        distinguish: bool,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 1)]
        warmup: u32,
    },
    /// Run a pipeline over a domain read from a JSON spec file.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// iterate, cnfs or generate:K
        #[arg(long, default_value = "iterate")]
        method: Mode,
        #[arg(long, value_enum, default_value = "collect")]
        action: ActionArg,
        /// Stop after this many elements.
        #[arg(long)]
        take: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(clap::Args)]
struct Common {
    /// Write JSON lines here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print elements in display syntax rather than JSON.
    #[arg(long)]
    text: bool,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Seed for generate; falls back to CANONFORGE_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Untimed runs before the timed one.
    #[arg(long, default_value_t = 1)]
    warmup: u32,
}

#[derive(Clone, Copy, Debug)]
enum Mode {
    Iterate,
    Cnfs,
    Generate(u64),
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "iterate" => Ok(Mode::Iterate),
            "cnfs" => Ok(Mode::Cnfs),
            _ => s
                .strip_prefix("generate:")
                .and_then(|k| k.parse().ok())
                .map(Mode::Generate)
                .ok_or_else(|| format!("expected iterate, cnfs or generate:K, got `{s}`")),
        }
    }
}

impl From<Mode> for Method {
    fn from(m: Mode) -> Method {
        match m {
            Mode::Iterate => Method::Iterate,
            Mode::Cnfs => Method::Cnfs,
            Mode::Generate(k) => Method::Generate(k),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ResetArg {
    Cnfs,
    Iterate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionArg {
    Collect,
    Count,
    First,
    Max,
}

fn context(workers: Option<usize>, seed: Option<u64>, target_job_ms: Option<u64>) -> ExecutionContext {
    let ctx = match workers.filter(|&w| w > 0) {
        Some(w) => {
            let cfg = PoolConfig::new(w);
            ExecutionContext::pool(match target_job_ms {
                Some(ms) => cfg.with_target_job_ms(ms),
                None => cfg,
            })
        }
        None => ExecutionContext::serial(),
    };
    match seed {
        Some(s) => ctx.with_seed(s),
        None => ctx,
    }
}

/// Runs `p` after `warmup` untimed runs and reports the timed wall clock.
fn timed(p: &Pipeline, ctx: &ExecutionContext, warmup: u32) -> canonforge::Result<Output> {
    for _ in 0..warmup {
        p.run_with(ctx)?;
    }
    let start = Instant::now();
    let out = p.run_with(ctx)?;
    eprintln!("wall: {:.3} s", start.elapsed().as_secs_f64());
    Ok(out)
}

fn render(v: &Value, text: bool) -> String {
    if text {
        v.to_string()
    } else {
        value_to_json(v).to_string()
    }
}

fn emit(out: Output, common: &Common) -> Result<(), Box<dyn std::error::Error>> {
    let mut sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let count = match out {
        Output::List(items) => {
            for v in &items {
                writeln!(sink, "{}", render(v, common.text))?;
            }
            items.len() as u64
        }
        Output::Value(v) | Output::First(Some(v)) => {
            writeln!(sink, "{}", render(&v, common.text))?;
            1
        }
        Output::First(None) => {
            writeln!(sink, "null")?;
            0
        }
        Output::Count(n) => {
            writeln!(sink, "{n}")?;
            n
        }
    };
    sink.flush()?;
    eprintln!("count: {count}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Digraphs {
            nodes,
            mode,
            no_loops,
            common,
        } => {
            let mut d = digraphs(nodes)?;
            if no_loops {
                d = without_loops(&d);
            }
            let p = Pipeline::new(&d).with_method(mode.into());
            let ctx = context(common.workers, common.seed, None);
            emit(timed(&p, &ctx, common.warmup)?, &common)
        }
        Command::Resetwords {
            states,
            symbols,
            mode,
            target_job_ms,
            distinguish,
            workers,
            warmup,
        } => {
            let a = automata(states, symbols)?;
            let mode = match mode {
                ResetArg::Cnfs => ResetMode::Cnfs,
                ResetArg::Iterate => ResetMode::Iterate,
            };
            let ctx = context(workers, None, Some(target_job_ms));
            let best = timed(&reset_word_pipeline(&a, mode), &ctx, warmup)?
                .into_list()
                .and_then(|l| l.into_iter().next())
                .and_then(|v| v.as_int())
                .unwrap_or(0);
            println!(
                "The maximal length of a minimal reset word for an automaton with {states} states and {symbols} symbols is {best}."
            );
            if distinguish {
                let base = match mode {
                    ResetMode::Cnfs => Pipeline::cnfs(&a.domain),
                    ResetMode::Iterate => Pipeline::iterate(&a.domain),
                };
                let none = base
                    .filter_labeled(
                        "no_reset_word",
                        Arc::new(|d: &Value| Ok(shortest_reset_word(d).is_none())),
                    )
                    .count()
                    .run_with(&ctx)?
                    .into_count()
                    .unwrap_or(0);
                let meaning = if states == 1 {
                    "already synchronized"
                } else {
                    "synchronizing"
                };
                println!("Automata without a reset word: {none}; a length of 0 otherwise means {meaning}.");
            }
            Ok(())
        }
        Command::Run {
            spec,
            method,
            action,
            take,
            common,
        } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            let d: Domain = SpecFile::from_json(&text)?.build()?;
            let mut p = Pipeline::new(&d).with_method(method.into());
            if let Some(k) = take {
                p = p.take(k);
            }
            p = match action {
                ActionArg::Collect => p.collect(),
                ActionArg::Count => p.count(),
                ActionArg::First => p.first(),
                ActionArg::Max => p.max(),
            };
            let ctx = context(common.workers, common.seed, None);
            emit(timed(&p, &ctx, common.warmup)?, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
