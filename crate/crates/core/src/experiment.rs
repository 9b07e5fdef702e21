//! Monte-Carlo experiment grid: generate, solve, tally, write CSV, summarize.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;

use crate::control::{ControlType, Direction, Family, TieRule, Verdict};
use crate::election::Rule;
use crate::error::{Error, Result};
use crate::generate::{default_budget, gen_instance_with, CandidatePick, DistModel, TrialSeed};
use crate::solver::{solve, Deadline};

pub const CSV_HEADER: [&str; 15] = [
    "rule",
    "control",
    "tie",
    "dist",
    "m",
    "n",
    "trials",
    "k",
    "cp",
    "ci",
    "to",
    "avg_ms_yes",
    "avg_ms_no",
    "avg_ms_decided",
    "seed",
];

pub const DEFAULT_SIZES: [usize; 6] = [4, 8, 16, 32, 64, 128];

/// Whether the original experiments ran this (rule, control) pair. DCAV and
/// DCDV are polynomial everywhere; plurality CCAV, CCDV and the TE voter
/// partitions were not part of the study either.
pub fn is_studied_pair(rule: Rule, control: ControlType) -> bool {
    if control.is_unstudied() {
        return false;
    }
    if rule == Rule::Plurality {
        let skipped = match control.family {
            Family::AddVoters | Family::DeleteVoters => control.direction == Direction::Constructive,
            Family::PartitionVoters => control.tie == Some(TieRule::TiesEliminate),
            _ => false,
        };
        return !skipped;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub rule: Rule,
    pub control: ControlType,
    pub dist: DistModel,
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rules: Vec<Rule>,
    pub controls: Vec<ControlType>,
    pub dists: Vec<DistModel>,
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub timeout: Duration,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub allow_unstudied: bool,
    pub pick: CandidatePick,
    /// When false the average-time columns are left empty so that output
    /// depends only on the seed.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rules: vec![Rule::Bucklin, Rule::Fallback],
            controls: ControlType::all().into_iter().filter(|c| !c.is_unstudied()).collect(),
            dists: DistModel::ALL.to_vec(),
            m_values: DEFAULT_SIZES.to_vec(),
            n_values: DEFAULT_SIZES.to_vec(),
            trials: 500,
            timeout: Deadline::DEFAULT.budget,
            seed: 0,
            jobs: 0,
            allow_unstudied: false,
            pick: CandidatePick::NonTrivial,
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::MalformedInstance("trials must be at least 1".into()));
        }
        if self.m_values.contains(&0) {
            return Err(Error::NoCandidates);
        }
        if !self.allow_unstudied {
            for &rule in &self.rules {
                for &control in &self.controls {
                    if !is_studied_pair(rule, control) {
                        return Err(Error::UnstudiedPair(format!("{} {}", rule.short(), control)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cells in canonical output order: rule, control, dist, m, n.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &rule in &self.rules {
            for &control in &self.controls {
                for &dist in &self.dists {
                    for &m in &self.m_values {
                        for &n in &self.n_values {
                            out.push(Cell {
                                rule,
                                control,
                                dist,
                                m,
                                n,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub cell: Cell,
    pub trials: usize,
    pub k: usize,
    pub cp: usize,
    pub ci: usize,
    pub to: usize,
    pub avg_ms_yes: Option<f64>,
    pub avg_ms_no: Option<f64>,
    pub avg_ms_decided: Option<f64>,
    pub seed: u64,
}

impl CellStats {
    pub fn yes_percent(&self) -> f64 {
        100.0 * self.cp as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialResult {
    verdict: Tally,
    ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tally {
    Yes,
    No,
    Timeout,
}

fn run_trial(cfg: &ExperimentConfig, cell: Cell, trial: usize) -> Result<TrialResult> {
    let seed = TrialSeed {
        master: cfg.seed,
        rule: cell.rule,
        control: cell.control,
        dist: cell.dist,
        m: cell.m,
        n: cell.n,
        trial: trial as u64,
    };
    let inst = gen_instance_with(cell.control, cell.rule, cell.dist, cell.m, cell.n, cfg.pick, &mut seed.rng())?;
    let out = solve(&inst, Deadline::new(cfg.timeout))?;
    let verdict = match out.verdict {
        Verdict::Yes(_) => Tally::Yes,
        Verdict::No => Tally::No,
        Verdict::Timeout => Tally::Timeout,
    };
    Ok(TrialResult {
        verdict,
        ms: out.elapsed_ms(),
    })
}

fn mean_ms(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    // Rounded to microseconds so the CSV text round-trips exactly.
    (count > 0).then(|| (sum / count as f64 * 1000.0).round() / 1000.0)
}

fn aggregate(cfg: &ExperimentConfig, cell: Cell, results: &[TrialResult]) -> CellStats {
    let count = |t: Tally| results.iter().filter(|r| r.verdict == t).count();
    let avg = |pred: &dyn Fn(Tally) -> bool| {
        if cfg.record_timing {
            mean_ms(results.iter().filter(|r| pred(r.verdict)).map(|r| r.ms))
        } else {
            None
        }
    };
    CellStats {
        cell,
        trials: results.len(),
        k: default_budget(cell.control, cell.m, cell.n),
        cp: count(Tally::Yes),
        ci: count(Tally::No),
        to: count(Tally::Timeout),
        avg_ms_yes: avg(&|t| t == Tally::Yes),
        avg_ms_no: avg(&|t| t == Tally::No),
        avg_ms_decided: avg(&|t| t != Tally::Timeout),
        seed: cfg.seed,
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))
}

pub fn run_cell(cfg: &ExperimentConfig, cell: Cell) -> Result<CellStats> {
    if !cfg.allow_unstudied && !is_studied_pair(cell.rule, cell.control) {
        return Err(Error::UnstudiedPair(format!("{} {}", cell.rule.short(), cell.control)));
    }
    let one = ExperimentConfig {
        rules: vec![cell.rule],
        controls: vec![cell.control],
        dists: vec![cell.dist],
        m_values: vec![cell.m],
        n_values: vec![cell.n],
        ..cfg.clone()
    };
    let mut stats = run_grid(&one)?;
    Ok(stats.remove(0))
}

/// Runs every cell of the grid. All (cell, trial) pairs are scheduled on
/// one pool; each trial seeds itself, so the thread count never changes the
/// result.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<CellStats>> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|ci| (0..cfg.trials).map(move |t| (ci, t)))
        .collect();
    let results: Vec<TrialResult> = pool(cfg.jobs)?.install(|| {
        jobs.par_iter()
            .map(|&(ci, t)| run_trial(cfg, cells[ci], t))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(cells
        .iter()
        .zip(results.chunks(cfg.trials))
        .map(|(&cell, chunk)| aggregate(cfg, cell, chunk))
        .collect())
}

fn fmt_avg(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.3}"))
}

pub fn write_csv_to<W: std::io::Write>(table: &[CellStats], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for s in table {
        let c = &s.cell;
        wtr.write_record([
            c.rule.name().to_string(),
            c.control.base_name(),
            c.control.tie.map_or("-", |t| t.tag()).to_string(),
            c.dist.tag().to_string(),
            c.m.to_string(),
            c.n.to_string(),
            s.trials.to_string(),
            s.k.to_string(),
            s.cp.to_string(),
            s.ci.to_string(),
            s.to.to_string(),
            fmt_avg(s.avg_ms_yes),
            fmt_avg(s.avg_ms_no),
            fmt_avg(s.avg_ms_decided),
            s.seed.to_string(),
        ])
        ?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv(table: &[CellStats], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv_to(table, f)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad value '{raw}' in column {}", CSV_HEADER[i]),
    })
}

fn opt_field(rec: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        None | Some("") => Ok(None),
        Some(_) => field(rec, i, line).map(Some),
    }
}

pub fn read_csv_from<R: std::io::Read>(r: R) -> Result<Vec<CellStats>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected CSV header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let base: String = field(&rec, 1, line)?;
        let tie: String = field(&rec, 2, line)?;
        let name = if tie == "-" { base } else { format!("{base}-{tie}") };
        let control: ControlType = name.parse()?;
        out.push(CellStats {
            cell: Cell {
                rule: field(&rec, 0, line)?,
                control,
                dist: field(&rec, 3, line)?,
                m: field(&rec, 4, line)?,
                n: field(&rec, 5, line)?,
            },
            trials: field(&rec, 6, line)?,
            k: field(&rec, 7, line)?,
            cp: field(&rec, 8, line)?,
            ci: field(&rec, 9, line)?,
            to: field(&rec, 10, line)?,
            avg_ms_yes: opt_field(&rec, 11, line)?,
            avg_ms_no: opt_field(&rec, 12, line)?,
            avg_ms_decided: opt_field(&rec, 13, line)?,
            seed: field(&rec, 14, line)?,
        });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<CellStats>> {
    let f = std::fs::File::open(path)?;
    read_csv_from(f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub control: ControlType,
    pub rule: Rule,
    pub dist: DistModel,
    pub min_pct: f64,
    pub max_pct: f64,
    pub to_pct: f64,
}

/// Per (control, rule, dist): extreme yes-rates over all cells (timeouts
/// count against the rate) and the overall timeout share.
pub fn summarize(table: &[CellStats]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(ControlType, Rule, DistModel), Vec<&CellStats>> = BTreeMap::new();
    for s in table {
        groups.entry((s.cell.control, s.cell.rule, s.cell.dist)).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|((control, rule, dist), cells)| {
            let rates = cells.iter().map(|s| s.yes_percent());
            let min_pct = rates.clone().fold(f64::INFINITY, f64::min);
            let max_pct = rates.fold(f64::NEG_INFINITY, f64::max);
            let to: usize = cells.iter().map(|s| s.to).sum();
            let trials: usize = cells.iter().map(|s| s.trials).sum();
            SummaryRow {
                control,
                rule,
                dist,
                min_pct,
                max_pct,
                to_pct: 100.0 * to as f64 / trials as f64,
            }
        })
        .collect()
}

/// One block per distribution model: a row per control type, a min/max/to
/// column triple per rule.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let mut dists: Vec<DistModel> = rows.iter().map(|r| r.dist).collect();
    dists.sort();
    dists.dedup();
    for dist in dists {
        let sub: Vec<&SummaryRow> = rows.iter().filter(|r| r.dist == dist).collect();
        let mut rules: Vec<Rule> = sub.iter().map(|r| r.rule).collect();
        rules.sort();
        rules.dedup();
        let mut controls: Vec<ControlType> = sub.iter().map(|r| r.control).collect();
        controls.sort();
        controls.dedup();
        let _ = writeln!(out, "{} model", dist.tag());
        let _ = write!(out, "{:<11}", "control");
        for r in &rules {
            let _ = write!(out, " | {:^23}", r.name());
        }
        out.push('\n');
        let _ = write!(out, "{:<11}", "");
        for _ in &rules {
            let _ = write!(out, " | {:>7} {:>7} {:>7}", "min", "max", "to");
        }
        out.push('\n');
        for ct in controls {
            let _ = write!(out, "{:<11}", ct.to_string());
            for r in &rules {
                match sub.iter().find(|x| x.control == ct && x.rule == *r) {
                    Some(x) => {
                        let _ = write!(out, " | {:>7.1} {:>7.1} {:>7.1}", x.min_pct, x.max_pct, x.to_pct);
                    }
                    None => {
                        let _ = write!(out, " | {:>7} {:>7} {:>7}", "-", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
