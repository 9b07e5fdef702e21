use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use votectl_core::experiment::{format_summary, read_csv, run_grid, summarize, write_csv, ExperimentConfig};
use votectl_core::format::{parse_election, parse_instance, write_instance};
use votectl_core::oracle::brute_force_witness;
use votectl_core::{
    brute_force, gen_instance_with, solve_with, CandidatePick, ControlType, Deadline, DistModel, Rule, SolverOptions,
    TieRule, TrialSeed, Verdict,
};

#[derive(Parser)]
#[command(name = "votectl", version, about = "Electoral control under Bucklin, fallback and plurality voting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a control instance with the pruned depth-first search.
    Solve(SolveArgs),
    /// Decide a control instance by exhaustive enumeration.
    Oracle(SolveArgs),
    /// Print the winner set of an election file.
    Winners {
        #[arg(long)]
        election: PathBuf,
    },
    /// Generate one random control instance.
    Gen(GenArgs),
    /// Run a grid of Monte-Carlo trials and write a CSV.
    Experiment(ExperimentArgs),
    /// Reduce an experiment CSV to min/max/timeout percentages.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 600.0)]
    timeout_secs: f64,
    /// Search in plain index order.
    #[arg(long)]
    no_preorder: bool,
    /// Skip the trivial-case checks.
    #[arg(long)]
    no_conditions: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    rule: Rule,
    #[arg(long, default_value = "IC")]
    dist: DistModel,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Control type, e.g. CCDV or DCPV (tie rule via --tie) or DCPV-TE.
    #[arg(long)]
    control: String,
    #[arg(long)]
    tie: Option<TieRule>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// How c is chosen: nontrivial (as in `experiment`) or uniform.
    #[arg(long, default_value = "nontrivial")]
    pick: CandidatePick,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',', default_value = "bucklin,fallback")]
    rules: Vec<Rule>,
    /// Comma-separated control types; defaults to every studied type.
    #[arg(long, value_delimiter = ',')]
    controls: Vec<ControlType>,
    #[arg(long, value_delimiter = ',', default_value = "IC,TM")]
    dists: Vec<DistModel>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64,128")]
    m_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64,128")]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 600.0)]
    timeout_secs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    #[arg(long)]
    allow_unstudied: bool,
    /// How c is chosen: nontrivial (not yet decided before control) or uniform.
    #[arg(long, default_value = "nontrivial")]
    pick: CandidatePick,
    /// Leave the timing columns empty, making the CSV a pure function of the seed.
    #[arg(long)]
    no_timing: bool,
}

fn control_with_tie(name: &str, tie: Option<TieRule>) -> Result<ControlType> {
    let ct: ControlType = match tie {
        Some(t) if !name.contains('-') => format!("{name}-{}", t.tag()).parse()?,
        _ => name.parse()?,
    };
    Ok(ct)
}

fn load_instance(path: &PathBuf) -> Result<votectl_core::ControlInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn timeout(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| anyhow::anyhow!("invalid timeout {secs}"))
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let opts = SolverOptions {
        conditions: !a.no_conditions,
        preorder: !a.no_preorder,
    };
    let out = solve_with(&inst, Deadline::new(timeout(a.timeout_secs)?), opts)?;
    match out.verdict {
        Verdict::Yes(w) => println!("YES witness={w}"),
        Verdict::No => println!("NO"),
        Verdict::Timeout => println!("TIMEOUT elapsed_ms={:.3}", out.elapsed_ms()),
    }
    Ok(())
}

fn cmd_oracle(a: &SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let v = brute_force(&inst)?;
    if v.yes {
        let w = brute_force_witness(&inst)?.expect("oracle found a witness");
        println!("YES witness={w} witnesses_checked={}", v.witnesses_checked);
    } else {
        println!("NO witnesses_checked={}", v.witnesses_checked);
    }
    Ok(())
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let control = control_with_tie(&a.control, a.tie)?;
    let seed = TrialSeed {
        master: a.seed,
        rule: a.rule,
        control,
        dist: a.dist,
        m: a.m,
        n: a.n,
        trial: a.trial,
    };
    let inst = gen_instance_with(control, a.rule, a.dist, a.m, a.n, a.pick, &mut seed.rng())?;
    let text = write_instance(&inst)?;
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let controls = if a.controls.is_empty() {
        ExperimentConfig::default().controls
    } else {
        a.controls.clone()
    };
    let cfg = ExperimentConfig {
        rules: a.rules.clone(),
        controls,
        dists: a.dists.clone(),
        m_values: a.m_list.clone(),
        n_values: a.n_list.clone(),
        trials: a.trials,
        timeout: timeout(a.timeout_secs)?,
        seed: a.seed,
        jobs: a.jobs,
        allow_unstudied: a.allow_unstudied,
        pick: a.pick,
        record_timing: !a.no_timing,
    };
    let table = run_grid(&cfg)?;
    write_csv(&table, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!("{} cells written to {}", table.len(), a.out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Winners { election } => {
            let text = fs::read_to_string(&election).with_context(|| format!("reading {}", election.display()))?;
            let w = parse_election(&text)?.winners()?;
            let ids: Vec<String> = w.winners.iter().map(|c| c.to_string()).collect();
            match w.winning_level {
                Some(l) => println!("winners={} level={l}", ids.join(",")),
                None => println!("winners={}", ids.join(",")),
            }
            Ok(())
        }
        Command::Gen(a) => cmd_gen(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Summarize { input, out } => {
            let table = read_csv(&input).with_context(|| format!("reading {}", input.display()))?;
            if table.is_empty() {
                bail!("{} has no rows", input.display());
            }
            let text = format_summary(&summarize(&table));
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
