use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use portwalk::experiments::{
    self, hunt_run, lowerbound_hunt, parse_suite, run_suite, rv_run, sleeper_adversarial,
    sleeper_run, write_reports, ExpError, ExperimentReport,
};
use portwalk::graph::parse_graph_ref;
use portwalk::hunt::{write_hunt_trace, HuntConfig};
use portwalk::oracle::character_weight;
use portwalk::path::phase_types;
use portwalk::rendezvous::{merged_trace, write_rv_summary, write_rv_trace, RvConfig};
use portwalk::{EnumMode, PortGraph, Value};

/// Treasure hunt and rendezvous in port-numbered graphs.
#[derive(Parser)]
#[command(name = "portwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hunt for a treasure and check the time against twice the weight.
    Hunt(HuntArgs),
    /// Print the character, weight and first witness path of a node pair.
    Weight(WeightArgs),
    /// Simulate two-agent rendezvous.
    Rv(RvArgs),
    /// Adversarial treasure placement on the infinite-degree tree.
    Lowerbound(LowerboundArgs),
    /// Rendezvous with a partner that never wakes up.
    Sleeper(SleeperArgs),
    /// List the types of phase J.
    Phase(PhaseArgs),
    /// Run a suite file and write one CSV row per check.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = EnumMode::Fixed)]
    mode: EnumMode,
    /// Weight oracle cap.
    #[arg(long, default_value_t = experiments::DEFAULT_CAP)]
    cap: u64,
    /// Write the report CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HuntArgs {
    /// Builtin `name[:p1,p2,...]` or graph file.
    #[arg(long)]
    graph: String,
    #[arg(long)]
    base: String,
    #[arg(long)]
    treasure: String,
    #[arg(long, default_value_t = experiments::DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// Write the step trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, default_value_t = experiments::DEFAULT_CAP)]
    cap: u64,
}

#[derive(Args)]
struct RvArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    start1: String,
    #[arg(long)]
    label1: u64,
    #[arg(long)]
    start2: String,
    #[arg(long)]
    label2: u64,
    /// Rounds agent 2 sleeps after agent 1 wakes.
    #[arg(long, default_value_t = 0)]
    delay: u64,
    #[arg(long, default_value_t = experiments::DEFAULT_MAX_ROUNDS)]
    max_rounds: u64,
    #[arg(long, default_value_t = EnumMode::Fixed)]
    mode: EnumMode,
    #[arg(long, default_value_t = experiments::DEFAULT_CAP)]
    cap: u64,
    /// Write the per-round trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the `met,meeting_round,meeting_node` summary here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    i: u64,
    #[arg(long, default_value_t = experiments::DEFAULT_MAX_STEPS)]
    max_steps: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SleeperArgs {
    /// Ignored with `--adversarial`, which always uses `tree_omega`.
    #[arg(long, default_value = "tree_omega")]
    graph: String,
    #[arg(long, default_value = "r")]
    start1: String,
    #[arg(long, default_value_t = 1)]
    label1: u64,
    #[arg(long, required_unless_present = "adversarial")]
    start2: Option<String>,
    /// Put the sleeper on the last of root children I+1..2I that agent 1 reaches.
    #[arg(long, value_name = "I")]
    adversarial: Option<u64>,
    #[arg(long, default_value_t = experiments::DEFAULT_MAX_ROUNDS)]
    max_rounds: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PhaseArgs {
    j: u64,
    #[arg(long, default_value_t = EnumMode::Fixed)]
    mode: EnumMode,
}

#[derive(Args)]
struct BenchArgs {
    suite: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(all_pass) => ExitCode::from(if all_pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, ExpError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn finish(reports: &[ExperimentReport], out: Option<&PathBuf>) -> Result<bool, ExpError> {
    for r in reports {
        println!("{r}");
    }
    if let Some(path) = out {
        write_reports(reports, create(path)?)?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn run(command: Command) -> Result<bool, ExpError> {
    match command {
        Command::Hunt(a) => {
            let g = parse_graph_ref(&a.graph)?;
            let (b, t) = (g.resolve(&a.base)?, g.resolve(&a.treasure)?);
            let cfg = HuntConfig {
                mode: a.common.mode,
                max_steps: a.max_steps,
                trace: a.trace.is_some(),
            };
            let instance = format!("{} {}->{} {}", a.graph, a.base, a.treasure, a.common.mode);
            let run = hunt_run(&g, &b, &t, &cfg, &Value::from(a.common.cap), &instance)?;
            let r = &run.result;
            println!("found: {}", r.found);
            println!("steps: {}", r.steps);
            if let (Some(ty), Some(v)) = (r.found_during_type, &r.found_phase_value) {
                println!("found during type {ty} in phase {v}");
            }
            match &run.oracle {
                Some(Ok(w)) => println!("character {} weight {}", w.character, w.weight),
                Some(Err(e)) => println!("oracle: {e}"),
                None => {}
            }
            if let Some(path) = &a.trace {
                write_hunt_trace(&r.trace, create(path)?)?;
            }
            finish(&run.reports, a.common.out.as_ref())
        }
        Command::Weight(a) => {
            let g = parse_graph_ref(&a.graph)?;
            let (u, v) = (g.resolve(&a.from)?, g.resolve(&a.to)?);
            let w = character_weight(&g, &u, &v, &Value::from(a.cap))?;
            println!("character: {}", w.character);
            println!("weight: {}", w.weight);
            println!("witness: {}", w.witness);
            println!("index: {}", w.witness_index);
            Ok(true)
        }
        Command::Rv(a) => {
            let g = parse_graph_ref(&a.graph)?;
            let (s1, s2) = (g.resolve(&a.start1)?, g.resolve(&a.start2)?);
            let cfg = RvConfig {
                delay: a.delay,
                max_rounds: a.max_rounds,
                mode: a.mode,
                trace: a.trace.is_some(),
            };
            let instance = format!(
                "{} {}#{} {}#{} delay={}",
                a.graph, a.start1, a.label1, a.start2, a.label2, a.delay
            );
            let run = rv_run(
                &g,
                (&s1, a.label1),
                (&s2, a.label2),
                &cfg,
                &Value::from(a.cap),
                &instance,
            )?;
            write_rv_summary(&run.result, io::stdout().lock())?;
            if let Some(Err(e)) = &run.bound {
                println!("oracle: {e}");
            }
            if let Some(path) = &a.trace {
                write_rv_trace(&merged_trace(&run.result), create(path)?)?;
            }
            if let Some(path) = &a.out {
                write_rv_summary(&run.result, create(path)?)?;
            }
            finish(&run.reports, None)
        }
        Command::Lowerbound(a) => {
            let cfg = HuntConfig {
                mode: a.common.mode,
                max_steps: a.max_steps,
                trace: false,
            };
            let run = lowerbound_hunt(a.i, &cfg, &Value::from(a.common.cap))?;
            println!(
                "adversary picks child {} (weight {}); hunt takes {} steps",
                run.r, run.weight, run.steps
            );
            finish(&run.reports, a.common.out.as_ref())
        }
        Command::Sleeper(a) => {
            let cap = Value::from(a.common.cap);
            let reports = if let Some(i) = a.adversarial {
                let run = sleeper_adversarial(i, a.label1, a.common.mode, a.max_rounds, &cap)?;
                println!(
                    "sleeper at child {} (W = {}); met after {} rounds",
                    run.r, run.weight, run.rounds
                );
                run.reports
            } else {
                let g = parse_graph_ref(&a.graph)?;
                let start2 = a.start2.as_deref().expect("required by clap");
                let (s1, s2) = (g.resolve(&a.start1)?, g.resolve(start2)?);
                let instance = format!("{} {}#{} sleeper@{}", a.graph, a.start1, a.label1, start2);
                let run = sleeper_run(
                    &g,
                    (&s1, a.label1),
                    &s2,
                    a.common.mode,
                    a.max_rounds,
                    &cap,
                    &instance,
                )?;
                write_rv_summary(&run.result, io::stdout().lock())?;
                if let Some(Err(e)) = &run.bound {
                    println!("oracle: {e}");
                }
                run.reports
            };
            finish(&reports, a.common.out.as_ref())
        }
        Command::Phase(a) => {
            if a.j < 2 {
                return Err(ExpError::Precondition("phase values start at 2".into()));
            }
            let mut out = io::stdout().lock();
            for ty in phase_types(&Value::from(a.j), a.mode) {
                writeln!(out, "{ty}")?;
            }
            Ok(true)
        }
        Command::Bench(a) => {
            let text = std::fs::read_to_string(&a.suite)?;
            let reports = run_suite(&parse_suite(&text)?)?;
            match &a.out {
                Some(path) => write_reports(&reports, create(path)?)?,
                None => write_reports(&reports, io::stdout().lock())?,
            }
            Ok(reports.iter().all(|r| r.pass))
        }
    }
}
