//! Heuristic control solver: trivial-case checks, preordering of voters or
//! candidates, then a depth-first walk over bounded sublists with a
//! wall-clock deadline.

use std::time::{Duration, Instant};

use crate::control::{
    active_position, condition1, condition4_candidates, condition4_decide, condition_levels,
    goal_satisfied, ControlAction, ControlInstance, Direction, Family, LevelMode, Outcome, Verdict,
};
use crate::election::{Ballot, CandidateId, CandidateSet, Rule};
use crate::error::Result;

/// Depth-first enumeration of all nonempty increasing index lists over
/// `0..n` of length at most `k`.
///
/// The order is the one of a left-first DFS on the sublist tree: `(0)`,
/// `(0,1)`, `(0,1,2)`, `(0,1,3)`, ..., `(0,2)`, ...
#[derive(Debug, Clone)]
pub struct BoundedSublists {
    n: usize,
    k: usize,
    path: Vec<usize>,
    started: bool,
}

impl BoundedSublists {
    pub fn new(n: usize, k: usize) -> Self {
        BoundedSublists {
            n,
            k: k.min(n),
            path: Vec::with_capacity(k.min(n)),
            started: false,
        }
    }

    /// Moves to the next node and returns its path, without allocating.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.k == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            self.path.push(0);
            return Some(&self.path);
        }
        let last = *self.path.last()?;
        if self.path.len() < self.k && last + 1 < self.n {
            self.path.push(last + 1);
            return Some(&self.path);
        }
        while let Some(x) = self.path.pop() {
            if x + 1 < self.n {
                self.path.push(x + 1);
                return Some(&self.path);
            }
        }
        None
    }
}

impl Iterator for BoundedSublists {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().map(<[usize]>::to_vec)
    }
}

pub fn bounded_sublists(n: usize, k: usize) -> BoundedSublists {
    BoundedSublists::new(n, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderDirection {
    /// Items worst for `c` first (voters) / fewest voters preferring the
    /// candidate over `c` first (candidates).
    Ascending,
    Descending,
}

/// Stable permutation of vote indices by the position of `c`. Ascending
/// puts voters that rank `c` worst first; a disapproving fallback voter is
/// worse than any position.
pub fn preorder_voters(
    votes: &[Ballot],
    active: &CandidateSet,
    c: CandidateId,
    direction: OrderDirection,
) -> Vec<usize> {
    let worst = active.len();
    let keys: Vec<usize> = votes
        .iter()
        .map(|b| active_position(b, active, c).unwrap_or(worst))
        .collect();
    let mut order: Vec<usize> = (0..votes.len()).collect();
    match direction {
        OrderDirection::Ascending => order.sort_by(|&a, &b| keys[b].cmp(&keys[a])),
        OrderDirection::Descending => order.sort_by(|&a, &b| keys[a].cmp(&keys[b])),
    }
    order
}

/// Stable ordering of every active candidate other than `c` by the number
/// of votes placing it strictly before `c`. Descending puts the largest
/// count first.
pub fn preorder_candidates(
    votes: &[Ballot],
    active: &CandidateSet,
    c: CandidateId,
    direction: OrderDirection,
) -> Vec<CandidateId> {
    let mut ahead = vec![0usize; active.universe()];
    for b in votes {
        for x in b.iter() {
            if x == c {
                break;
            }
            if active.contains(x) {
                ahead[x.index()] += 1;
            }
        }
    }
    let mut order: Vec<CandidateId> = active.iter().filter(|&x| x != c).collect();
    match direction {
        OrderDirection::Ascending => order.sort_by_key(|x| ahead[x.index()]),
        OrderDirection::Descending => order.sort_by(|a, b| ahead[b.index()].cmp(&ahead[a.index()])),
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    Condition1,
    ConditionLevels(LevelMode),
    Condition4Voters,
    Condition4Candidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderTarget {
    Voters,
    PoolVoters,
    Candidates,
    Spoilers,
}

/// Which cell the distinguished candidate is pinned to when enumerating
/// candidate partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinnedCell {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPlan {
    pub pruning: Vec<Pruning>,
    pub order_target: OrderTarget,
    pub order: Option<OrderDirection>,
    pub pinned: Option<PinnedCell>,
}

impl SearchPlan {
    pub fn for_instance(inst: &ControlInstance) -> SearchPlan {
        use OrderDirection::*;
        let ct = inst.control;
        let levels_ok = inst.rule() != Rule::Plurality;
        let constructive = ct.direction == Direction::Constructive;
        let mut pruning = Vec::new();
        let (order_target, order, pinned) = match ct.family {
            Family::DeleteVoters => {
                if constructive {
                    pruning.push(Pruning::Condition1);
                    if levels_ok {
                        pruning.push(Pruning::ConditionLevels(LevelMode::Delete));
                    }
                }
                (OrderTarget::Voters, constructive.then_some(Ascending), None)
            }
            Family::AddVoters => {
                if constructive {
                    pruning.push(Pruning::Condition1);
                    if levels_ok {
                        pruning.push(Pruning::ConditionLevels(LevelMode::Add));
                    }
                }
                (OrderTarget::PoolVoters, constructive.then_some(Descending), None)
            }
            Family::PartitionVoters => {
                pruning.push(Pruning::Condition4Voters);
                if constructive {
                    pruning.push(Pruning::Condition1);
                }
                (OrderTarget::Voters, constructive.then_some(Descending), None)
            }
            Family::DeleteCandidates => {
                if constructive {
                    pruning.push(Pruning::Condition1);
                    (OrderTarget::Candidates, Some(Descending), None)
                } else {
                    pruning.push(Pruning::Condition4Candidates);
                    (OrderTarget::Candidates, Some(Ascending), None)
                }
            }
            Family::AddCandidates => {
                if constructive {
                    pruning.push(Pruning::Condition1);
                    (OrderTarget::Spoilers, Some(Ascending), None)
                } else {
                    pruning.push(Pruning::Condition4Candidates);
                    (OrderTarget::Spoilers, Some(Descending), None)
                }
            }
            Family::PartitionCandidates | Family::RunoffPartitionCandidates => {
                if constructive {
                    (OrderTarget::Candidates, Some(Ascending), Some(PinnedCell::Second))
                } else {
                    pruning.push(Pruning::Condition4Candidates);
                    (OrderTarget::Candidates, Some(Descending), Some(PinnedCell::First))
                }
            }
        };
        SearchPlan {
            pruning,
            order_target,
            order,
            pinned,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Deadline {
    pub budget: Duration,
}

impl Deadline {
    pub const DEFAULT: Deadline = Deadline {
        budget: Duration::from_secs(600),
    };

    pub fn new(budget: Duration) -> Self {
        Deadline { budget }
    }

    pub fn from_secs_f64(secs: f64) -> Self {
        Deadline::new(Duration::from_secs_f64(secs))
    }

    /// Long enough to never trigger in practice.
    pub fn unlimited() -> Self {
        Deadline::new(Duration::from_secs(60 * 60 * 24 * 365))
    }
}

impl Default for Deadline {
    fn default() -> Self {
        Deadline::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub conditions: bool,
    pub preorder: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            conditions: true,
            preorder: true,
        }
    }
}

pub fn solve(inst: &ControlInstance, deadline: Deadline) -> Result<Outcome> {
    solve_with(inst, deadline, SolverOptions::default())
}

pub fn solve_with(inst: &ControlInstance, deadline: Deadline, opts: SolverOptions) -> Result<Outcome> {
    let start = Instant::now();
    inst.validate()?;
    let verdict = search(inst, start.checked_add(deadline.budget), opts)?;
    Ok(Outcome {
        verdict,
        elapsed: start.elapsed(),
    })
}

fn run_pruning(inst: &ControlInstance, plan: &SearchPlan) -> Result<Option<Verdict>> {
    for p in &plan.pruning {
        match p {
            Pruning::Condition4Voters => {
                if let Some(v) = condition4_decide(inst)? {
                    return Ok(Some(v));
                }
            }
            Pruning::Condition1 => {
                if condition1(inst)? {
                    return Ok(Some(Verdict::No));
                }
            }
            Pruning::ConditionLevels(mode) => {
                if condition_levels(inst, *mode)? {
                    return Ok(Some(Verdict::No));
                }
            }
            Pruning::Condition4Candidates => {
                if condition4_candidates(inst)? {
                    return Ok(Some(Verdict::No));
                }
            }
        }
    }
    Ok(None)
}

enum Step {
    Found(ControlAction),
    Exhausted,
    TimedOut,
}

/// Walks `bounded_sublists(items.len(), k)` and tests each mapped action.
fn dfs<T: Copy>(
    inst: &ControlInstance,
    items: &[T],
    k: usize,
    due: Option<Instant>,
    mut make: impl FnMut(&[T]) -> ControlAction,
) -> Result<Step> {
    let mut tree = BoundedSublists::new(items.len(), k);
    let mut picked: Vec<T> = Vec::with_capacity(k);
    while let Some(path) = tree.advance() {
        if due.is_some_and(|d| Instant::now() >= d) {
            return Ok(Step::TimedOut);
        }
        picked.clear();
        picked.extend(path.iter().map(|&i| items[i]));
        let action = make(&picked);
        if goal_satisfied(inst, &action)? {
            return Ok(Step::Found(action));
        }
    }
    Ok(Step::Exhausted)
}

fn search(inst: &ControlInstance, due: Option<Instant>, opts: SolverOptions) -> Result<Verdict> {
    let plan = SearchPlan::for_instance(inst);
    if opts.conditions {
        if let Some(v) = run_pruning(inst, &plan)? {
            return Ok(v);
        }
    }
    let fam = inst.control.family;
    let empty = ControlAction::empty_for(fam);
    if goal_satisfied(inst, &empty)? {
        return Ok(Verdict::Yes(empty));
    }

    let e = &inst.election;
    let c = inst.distinguished;
    let order = if opts.preorder { plan.order } else { None };
    let voters = |votes: &[Ballot]| match order {
        Some(dir) => preorder_voters(votes, e.candidates(), c, dir),
        None => (0..votes.len()).collect(),
    };
    let candidates = |active: &CandidateSet, pool: &CandidateSet| -> Vec<CandidateId> {
        let ordered = match order {
            Some(dir) => preorder_candidates(e.raw_ballots(), active, c, dir),
            None => active.iter().filter(|&x| x != c).collect(),
        };
        ordered.into_iter().filter(|&x| pool.contains(x)).collect()
    };

    let step = match fam {
        Family::DeleteVoters => {
            let items = voters(e.raw_ballots());
            dfs(inst, &items, inst.budget, due, |s| ControlAction::DeleteVoters(s.to_vec()))?
        }
        Family::AddVoters => {
            let items = voters(&inst.pool_voters);
            dfs(inst, &items, inst.budget, due, |s| ControlAction::AddVoters(s.to_vec()))?
        }
        Family::PartitionVoters => {
            let items = voters(e.raw_ballots());
            let half = e.num_votes() / 2;
            dfs(inst, &items, half, due, |s| ControlAction::VoterPartition(s.to_vec()))?
        }
        Family::DeleteCandidates => {
            let items = candidates(e.candidates(), e.candidates());
            dfs(inst, &items, inst.budget, due, |s| ControlAction::DeleteCandidates(s.to_vec()))?
        }
        Family::AddCandidates => {
            let items = candidates(&inst.full_candidates(), &inst.spoilers);
            dfs(inst, &items, inst.budget, due, |s| ControlAction::AddCandidates(s.to_vec()))?
        }
        Family::PartitionCandidates | Family::RunoffPartitionCandidates => {
            let rivals = candidates(e.candidates(), e.candidates());
            let pinned = plan.pinned.unwrap_or(PinnedCell::First);
            let mut cells = vec![pinned];
            // Runoff partitions are symmetric in the two cells; the
            // non-runoff variant also needs `c` on the other side.
            if fam == Family::PartitionCandidates {
                cells.push(match pinned {
                    PinnedCell::First => PinnedCell::Second,
                    PinnedCell::Second => PinnedCell::First,
                });
            }
            let mut result = Step::Exhausted;
            for cell in cells {
                let to_c1 = |with_c: &[CandidateId]| -> ControlAction {
                    match cell {
                        PinnedCell::First => {
                            let mut c1 = Vec::with_capacity(with_c.len() + 1);
                            c1.push(c);
                            c1.extend_from_slice(with_c);
                            ControlAction::CandidatePartition(c1)
                        }
                        PinnedCell::Second => ControlAction::CandidatePartition(
                            rivals.iter().copied().filter(|x| !with_c.contains(x)).collect(),
                        ),
                    }
                };
                let alone = to_c1(&[]);
                if goal_satisfied(inst, &alone)? {
                    result = Step::Found(alone);
                    break;
                }
                match dfs(inst, &rivals, rivals.len(), due, to_c1)? {
                    Step::Exhausted => {}
                    other => {
                        result = other;
                        break;
                    }
                }
            }
            result
        }
    };
    Ok(match step {
        Step::Found(a) => Verdict::Yes(a),
        Step::Exhausted => Verdict::No,
        Step::TimedOut => Verdict::Timeout,
    })
}

/// `Σ_{ℓ=1..k} C(n, ℓ)`, saturating.
pub fn sublist_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for l in 1..=k.min(n) {
        binom = binom.saturating_mul((n - l + 1) as u128) / l as u128;
        total = total.saturating_add(binom);
    }
    total
}
