//! Exhaustive ground truth for small instances.
//!
//! Enumerates every legal action with plain combinatorics (no preordering,
//! no pruning) and replays each one.

use crate::control::{goal_satisfied, ControlAction, ControlInstance, Family};
use crate::election::CandidateId;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub yes: bool,
    pub witnesses_checked: u64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Lexicographic k-combinations of `0..n`, sizes `0..=max` in turn.
struct Combinations {
    n: usize,
    max: usize,
    cur: Vec<usize>,
    fresh: bool,
}

impl Combinations {
    fn new(n: usize, max: usize) -> Self {
        Combinations {
            n,
            max: max.min(n),
            cur: Vec::new(),
            fresh: true,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.fresh {
            self.fresh = false;
            return Some(Vec::new());
        }
        let k = self.cur.len();
        // Rightmost slot that can still move.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                return Some(self.cur.clone());
            }
        }
        if k < self.max {
            self.cur = (0..=k).collect();
            return Some(self.cur.clone());
        }
        None
    }
}

/// All subsets of `0..n` encoded as bitmasks, optionally only those that
/// leave out the last element (one representative per unordered split).
fn bitmask_subsets(n: usize, unordered: bool) -> impl Iterator<Item = Vec<usize>> {
    let bits = if unordered { n.saturating_sub(1) } else { n };
    (0u64..(1u64 << bits)).map(move |mask| (0..bits).filter(|i| mask >> i & 1 == 1).collect())
}

/// Number of actions [`enumerate_actions`] will emit.
pub fn action_space_size(inst: &ControlInstance) -> u128 {
    let up_to = |n: usize, k: usize| (0..=k.min(n)).map(|l| binomial(n, l)).sum::<u128>();
    let pow2 = |b: usize| if b >= 127 { u128::MAX } else { 1u128 << b };
    let e = &inst.election;
    match inst.control.family {
        Family::DeleteVoters => up_to(e.num_votes(), inst.budget),
        Family::AddVoters => up_to(inst.pool_voters.len(), inst.budget),
        Family::DeleteCandidates => up_to(e.num_candidates() - 1, inst.budget),
        Family::AddCandidates => up_to(inst.spoilers.len(), inst.budget),
        Family::PartitionVoters => pow2(e.num_votes().saturating_sub(1)),
        Family::PartitionCandidates => pow2(e.num_candidates()),
        Family::RunoffPartitionCandidates => pow2(e.num_candidates() - 1),
    }
}

/// Every legal action exactly once: subsets of size `≤ k` (including the
/// empty one) for adding/deleting, each unordered split once for voter
/// partitions and runoff candidate partitions, and every ordered split for
/// non-runoff candidate partitions (where `C1` and `C2` play different
/// roles).
pub fn enumerate_actions(inst: &ControlInstance) -> Box<dyn Iterator<Item = ControlAction> + '_> {
    let e = &inst.election;
    let c = inst.distinguished;
    let k = inst.budget;
    match inst.control.family {
        Family::DeleteVoters => Box::new(Combinations::new(e.num_votes(), k).map(ControlAction::DeleteVoters)),
        Family::AddVoters => {
            Box::new(Combinations::new(inst.pool_voters.len(), k).map(ControlAction::AddVoters))
        }
        Family::DeleteCandidates => {
            let rivals: Vec<CandidateId> = e.candidates().iter().filter(|&x| x != c).collect();
            Box::new(
                Combinations::new(rivals.len(), k)
                    .map(move |s| ControlAction::DeleteCandidates(s.iter().map(|&i| rivals[i]).collect())),
            )
        }
        Family::AddCandidates => {
            let pool = inst.spoilers.to_vec();
            Box::new(
                Combinations::new(pool.len(), k)
                    .map(move |s| ControlAction::AddCandidates(s.iter().map(|&i| pool[i]).collect())),
            )
        }
        Family::PartitionVoters => {
            Box::new(bitmask_subsets(e.num_votes(), true).map(ControlAction::VoterPartition))
        }
        Family::PartitionCandidates | Family::RunoffPartitionCandidates => {
            let all = e.candidates().to_vec();
            let unordered = inst.control.family == Family::RunoffPartitionCandidates;
            Box::new(
                bitmask_subsets(all.len(), unordered)
                    .map(move |s| ControlAction::CandidatePartition(s.iter().map(|&i| all[i]).collect())),
            )
        }
    }
}

pub fn brute_force(inst: &ControlInstance) -> Result<OracleVerdict> {
    brute_force_capped(inst, DEFAULT_CAP)
}

pub fn brute_force_capped(inst: &ControlInstance, cap: u128) -> Result<OracleVerdict> {
    inst.validate()?;
    let size = action_space_size(inst);
    if size > cap {
        return Err(Error::OracleTooLarge { size, cap });
    }
    let mut checked = 0u64;
    for action in enumerate_actions(inst) {
        checked += 1;
        if goal_satisfied(inst, &action)? {
            return Ok(OracleVerdict {
                yes: true,
                witnesses_checked: checked,
            });
        }
    }
    Ok(OracleVerdict {
        yes: false,
        witnesses_checked: checked,
    })
}

/// Like [`brute_force`] but also returns the first witness found.
pub fn brute_force_witness(inst: &ControlInstance) -> Result<Option<ControlAction>> {
    inst.validate()?;
    let size = action_space_size(inst);
    if size > DEFAULT_CAP {
        return Err(Error::OracleTooLarge { size, cap: DEFAULT_CAP });
    }
    for action in enumerate_actions(inst) {
        if goal_satisfied(inst, &action)? {
            return Ok(Some(action));
        }
    }
    Ok(None)
}
