//! Electoral control problems: instances, actions, goal replay and the
//! trivial-case conditions used to short-circuit the search.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::election::{
    compute_winners, majority_threshold, Ballot, CandidateId, CandidateSet, Election, Rule,
    WinnerSet,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    AddVoters,
    DeleteVoters,
    PartitionVoters,
    AddCandidates,
    DeleteCandidates,
    PartitionCandidates,
    RunoffPartitionCandidates,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::AddCandidates,
        Family::DeleteCandidates,
        Family::PartitionCandidates,
        Family::RunoffPartitionCandidates,
        Family::AddVoters,
        Family::DeleteVoters,
        Family::PartitionVoters,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::AddVoters => "AV",
            Family::DeleteVoters => "DV",
            Family::PartitionVoters => "PV",
            Family::AddCandidates => "AC",
            Family::DeleteCandidates => "DC",
            Family::PartitionCandidates => "PC",
            Family::RunoffPartitionCandidates => "roPC",
        }
    }

    pub fn is_partition(self) -> bool {
        matches!(
            self,
            Family::PartitionVoters | Family::PartitionCandidates | Family::RunoffPartitionCandidates
        )
    }

    pub fn has_budget(self) -> bool {
        !self.is_partition()
    }

    pub fn is_voter_control(self) -> bool {
        matches!(self, Family::AddVoters | Family::DeleteVoters | Family::PartitionVoters)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Constructive,
    Destructive,
}

impl Direction {
    pub fn prefix(self) -> &'static str {
        match self {
            Direction::Constructive => "CC",
            Direction::Destructive => "DC",
        }
    }

    /// Turns "c is the unique winner" into the goal for this direction.
    #[inline]
    pub fn goal(self, c_unique: bool) -> bool {
        match self {
            Direction::Constructive => c_unique,
            Direction::Destructive => !c_unique,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TieRule {
    /// Only a unique subelection winner proceeds.
    TiesEliminate,
    /// All subelection winners proceed.
    TiesPromote,
}

impl TieRule {
    pub fn tag(self) -> &'static str {
        match self {
            TieRule::TiesEliminate => "TE",
            TieRule::TiesPromote => "TP",
        }
    }

    /// Winners of a subelection that move on. `None` means the subelection
    /// had no voters or no candidates.
    pub fn survivors(self, ws: Option<WinnerSet>) -> Vec<CandidateId> {
        match (self, ws) {
            (_, None) => Vec::new(),
            (TieRule::TiesPromote, Some(w)) => w.winners,
            (TieRule::TiesEliminate, Some(w)) if w.winners.len() == 1 => w.winners,
            (TieRule::TiesEliminate, Some(_)) => Vec::new(),
        }
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TE" => Ok(TieRule::TiesEliminate),
            "TP" => Ok(TieRule::TiesPromote),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown tie rule '{other}'"),
            }),
        }
    }
}

/// One of the supported control decision problems, e.g. `CCDV` or
/// `DCroPC-TE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlType {
    pub family: Family,
    pub direction: Direction,
    pub tie: Option<TieRule>,
}

impl ControlType {
    pub fn new(family: Family, direction: Direction, tie: Option<TieRule>) -> Result<Self> {
        let ct = ControlType {
            family,
            direction,
            tie,
        };
        if family.is_partition() != tie.is_some() {
            return Err(Error::UnsupportedControl(format!(
                "{}{} {}",
                direction.prefix(),
                family.tag(),
                if family.is_partition() {
                    "requires a tie rule"
                } else {
                    "takes no tie rule"
                }
            )));
        }
        Ok(ct)
    }

    /// All 20 supported types (the 18 studied ones plus DCAV and DCDV).
    pub fn all() -> Vec<ControlType> {
        let mut out = Vec::new();
        for family in Family::ALL {
            for direction in [Direction::Constructive, Direction::Destructive] {
                if family.is_partition() {
                    for tie in [TieRule::TiesEliminate, TieRule::TiesPromote] {
                        out.push(ControlType {
                            family,
                            direction,
                            tie: Some(tie),
                        });
                    }
                } else {
                    out.push(ControlType {
                        family,
                        direction,
                        tie: None,
                    });
                }
            }
        }
        out
    }

    /// DCAV and DCDV are polynomial for all three rules and were not part of
    /// the original experiments.
    pub fn is_unstudied(&self) -> bool {
        self.direction == Direction::Destructive
            && matches!(self.family, Family::AddVoters | Family::DeleteVoters)
    }

    pub fn is_constructive(&self) -> bool {
        self.direction == Direction::Constructive
    }

    /// Name without the tie suffix, e.g. `CCPV`.
    pub fn base_name(&self) -> String {
        format!("{}{}", self.direction.prefix(), self.family.tag())
    }
}

impl fmt::Display for ControlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tie {
            Some(t) => write!(f, "{}-{}", self.base_name(), t.tag()),
            None => f.write_str(&self.base_name()),
        }
    }
}

impl FromStr for ControlType {
    type Err = Error;

    /// Accepts `CCDV`, `DCPV-TE`, `CCroPC-TP` (also `CCRPC-TP`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (base, tie) = match s.split_once('-') {
            Some((b, t)) => (b, Some(t.parse::<TieRule>()?)),
            None => (s, None),
        };
        let upper = base.to_ascii_uppercase();
        if upper.len() < 4 {
            return Err(Error::UnsupportedControl(s.to_string()));
        }
        let direction = match &upper[..2] {
            "CC" => Direction::Constructive,
            "DC" => Direction::Destructive,
            _ => return Err(Error::UnsupportedControl(s.to_string())),
        };
        let family = match &upper[2..] {
            "AV" => Family::AddVoters,
            "DV" => Family::DeleteVoters,
            "PV" => Family::PartitionVoters,
            "AC" => Family::AddCandidates,
            "DC" => Family::DeleteCandidates,
            "PC" => Family::PartitionCandidates,
            "ROPC" | "RPC" => Family::RunoffPartitionCandidates,
            _ => return Err(Error::UnsupportedControl(s.to_string())),
        };
        ControlType::new(family, direction, tie)
    }
}

/// Everything one control decision problem needs.
///
/// For adding candidates, `election` holds ballots over the whole universe
/// `C ∪ D` with only `C` active; `spoilers` is `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlInstance {
    pub control: ControlType,
    pub election: Election,
    pub distinguished: CandidateId,
    pub budget: usize,
    pub pool_voters: Vec<Ballot>,
    pub spoilers: CandidateSet,
}

impl ControlInstance {
    /// Instance without pools; use [`with_pool_voters`](Self::with_pool_voters)
    /// or [`with_spoilers`](Self::with_spoilers) for AV/AC.
    pub fn new(control: ControlType, election: Election, distinguished: CandidateId, budget: usize) -> Self {
        let universe = election.universe();
        ControlInstance {
            control,
            election,
            distinguished,
            budget,
            pool_voters: Vec::new(),
            spoilers: CandidateSet::empty(universe),
        }
    }

    pub fn with_pool_voters(mut self, pool: Vec<Ballot>) -> Self {
        self.pool_voters = pool;
        self
    }

    /// Marks candidates of the election's universe as spoilers and
    /// deactivates them in the registered election.
    pub fn with_spoilers(mut self, spoilers: CandidateSet) -> Result<Self> {
        let registered = CandidateSet::from_ids(
            self.election.universe(),
            self.election.candidates().iter().filter(|&c| !spoilers.contains(c)),
        );
        self.election = self.election.restrict(&registered)?;
        self.spoilers = spoilers;
        Ok(self)
    }

    pub fn rule(&self) -> Rule {
        self.election.rule()
    }

    /// Registered election plus every spoiler.
    pub fn full_candidates(&self) -> CandidateSet {
        self.election.candidates().union(&self.spoilers)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedInstance(msg));
        let c = self.distinguished;
        let cands = self.election.candidates();
        if !cands.contains(c) {
            return bad(format!("distinguished candidate {c} is not registered"));
        }
        if self.spoilers.iter().any(|d| cands.contains(d)) {
            return bad("spoiler candidates overlap the registered candidates".into());
        }
        let fam = self.control.family;
        if fam != Family::AddCandidates && !self.spoilers.is_empty() {
            return bad(format!("{} takes no spoiler candidates", self.control));
        }
        if fam != Family::AddVoters && !self.pool_voters.is_empty() {
            return bad(format!("{} takes no unregistered voters", self.control));
        }
        if fam == Family::AddCandidates
            && self.full_candidates().len() != self.election.universe()
        {
            return bad("ballots must cover exactly the registered and spoiler candidates".into());
        }
        if fam == Family::AddVoters {
            let m = self.election.universe();
            for (i, b) in self.pool_voters.iter().enumerate() {
                let mut seen = vec![false; m];
                for x in b.iter() {
                    if x.index() >= m || !cands.contains(x) || seen[x.index()] {
                        return bad(format!("unregistered vote {i} is not over the registered candidates"));
                    }
                    seen[x.index()] = true;
                }
                if self.rule().full_rankings() && b.len() != cands.len() {
                    return bad(format!("unregistered vote {i} is not a full ranking"));
                }
            }
        }
        let limit = match fam {
            Family::AddVoters => Some(self.pool_voters.len()),
            Family::DeleteVoters => Some(self.election.num_votes()),
            Family::AddCandidates => Some(self.spoilers.len()),
            Family::DeleteCandidates => Some(cands.len() - 1),
            _ => None,
        };
        match limit {
            Some(l) if self.budget > l => bad(format!("budget {} exceeds {l}", self.budget)),
            None if self.budget != 0 => bad(format!("{} takes no budget", self.control)),
            _ => Ok(()),
        }
    }
}

/// A concrete control action that can be replayed against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ControlAction {
    /// Indices into the registered vote list.
    DeleteVoters(Vec<usize>),
    /// Indices into the unregistered vote list.
    AddVoters(Vec<usize>),
    DeleteCandidates(Vec<CandidateId>),
    AddCandidates(Vec<CandidateId>),
    /// Indices of `V1`; `V2` is the rest.
    VoterPartition(Vec<usize>),
    /// Members of `C1`; `C2` is the rest.
    CandidatePartition(Vec<CandidateId>),
}

impl ControlAction {
    /// The action that changes nothing (or the trivial partition).
    pub fn empty_for(family: Family) -> ControlAction {
        match family {
            Family::AddVoters => ControlAction::AddVoters(Vec::new()),
            Family::DeleteVoters => ControlAction::DeleteVoters(Vec::new()),
            Family::PartitionVoters => ControlAction::VoterPartition(Vec::new()),
            Family::AddCandidates => ControlAction::AddCandidates(Vec::new()),
            Family::DeleteCandidates => ControlAction::DeleteCandidates(Vec::new()),
            Family::PartitionCandidates | Family::RunoffPartitionCandidates => {
                ControlAction::CandidatePartition(Vec::new())
            }
        }
    }

    pub fn matches(&self, family: Family) -> bool {
        matches!(
            (self, family),
            (ControlAction::DeleteVoters(_), Family::DeleteVoters)
                | (ControlAction::AddVoters(_), Family::AddVoters)
                | (ControlAction::DeleteCandidates(_), Family::DeleteCandidates)
                | (ControlAction::AddCandidates(_), Family::AddCandidates)
                | (ControlAction::VoterPartition(_), Family::PartitionVoters)
                | (
                    ControlAction::CandidatePartition(_),
                    Family::PartitionCandidates | Family::RunoffPartitionCandidates
                )
        )
    }
}

impl fmt::Display for ControlAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            ControlAction::DeleteVoters(v) => write!(f, "delete_voters[{}]", join(v)),
            ControlAction::AddVoters(v) => write!(f, "add_voters[{}]", join(v)),
            ControlAction::DeleteCandidates(v) => write!(f, "delete_candidates[{}]", join(v)),
            ControlAction::AddCandidates(v) => write!(f, "add_candidates[{}]", join(v)),
            ControlAction::VoterPartition(v) => write!(f, "voter_partition[{}]", join(v)),
            ControlAction::CandidatePartition(v) => write!(f, "candidate_partition[{}]", join(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(ControlAction),
    No,
    Timeout,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1000.0
    }
}

fn index_mask(len: usize, indices: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; len];
    for &i in indices {
        if i >= len || mask[i] {
            return Err(Error::IndexOutOfRange(i));
        }
        mask[i] = true;
    }
    Ok(mask)
}

fn candidate_subset(
    allowed: &CandidateSet,
    ids: &[CandidateId],
) -> Result<CandidateSet> {
    let mut out = CandidateSet::empty(allowed.universe());
    for &c in ids {
        if !allowed.contains(c) || out.contains(c) {
            return Err(Error::UnknownCandidate(c));
        }
        out.insert(c);
    }
    Ok(out)
}

/// Two-stage voter-partition election: subelections `(C, V1)` and `(C, V2)`,
/// then a runoff between the surviving winners under the full vote list.
/// Returns `None` when no candidate survives the first stage.
pub fn apply_voter_partition(e: &Election, v1: &[usize], tie: TieRule) -> Result<Option<Election>> {
    let in_v1 = index_mask(e.num_votes(), v1)?;
    let w = voter_partition_survivors(e, &in_v1, tie);
    if w.is_empty() {
        return Ok(None);
    }
    Ok(Some(e.with_active(w)))
}

fn voter_partition_survivors(e: &Election, in_v1: &[bool], tie: TieRule) -> CandidateSet {
    let ballots = e.raw_ballots();
    let active = e.candidates();
    let side = |want: bool| {
        if !in_v1.iter().any(|&s| s == want) {
            return None;
        }
        compute_winners(
            e.rule(),
            active,
            ballots
                .iter()
                .zip(in_v1)
                .filter(move |(_, &s)| s == want)
                .map(|(b, _)| b),
        )
    };
    let mut w = CandidateSet::from_ids(e.universe(), tie.survivors(side(true)));
    for c in tie.survivors(side(false)) {
        w.insert(c);
    }
    w
}

/// Candidate-partition election. Non-runoff: `(W1 ∪ C2, V)`. Runoff:
/// `(W1 ∪ W2, V)`. Returns `None` when the final candidate set is empty.
pub fn apply_candidate_partition(
    e: &Election,
    c1: &[CandidateId],
    tie: TieRule,
    runoff: bool,
) -> Result<Option<Election>> {
    let c1 = candidate_subset(e.candidates(), c1)?;
    let fin = candidate_partition_final(e, &c1, tie, runoff);
    if fin.is_empty() {
        return Ok(None);
    }
    Ok(Some(e.with_active(fin)))
}

fn candidate_partition_final(e: &Election, c1: &CandidateSet, tie: TieRule, runoff: bool) -> CandidateSet {
    let universe = e.universe();
    let c2 = CandidateSet::from_ids(universe, e.candidates().iter().filter(|&c| !c1.contains(c)));
    let sub = |cell: &CandidateSet| compute_winners(e.rule(), cell, e.raw_ballots());
    let mut fin = CandidateSet::from_ids(universe, tie.survivors(sub(c1)));
    if runoff {
        for c in tie.survivors(sub(&c2)) {
            fin.insert(c);
        }
    } else {
        for c in c2.iter() {
            fin.insert(c);
        }
    }
    fin
}

/// Winner set of the election that results from applying `action`, or
/// `None` when that election has no candidates.
pub fn final_winners(inst: &ControlInstance, action: &ControlAction) -> Result<Option<WinnerSet>> {
    let fam = inst.control.family;
    if !action.matches(fam) {
        return Err(Error::ActionMismatch(inst.control.to_string()));
    }
    let e = &inst.election;
    let rule = e.rule();
    let check_budget = |used: usize| {
        if used > inst.budget {
            Err(Error::BudgetExceeded {
                used,
                budget: inst.budget,
            })
        } else {
            Ok(())
        }
    };
    let out = match action {
        ControlAction::DeleteVoters(idx) => {
            check_budget(idx.len())?;
            let del = index_mask(e.num_votes(), idx)?;
            compute_winners(
                rule,
                e.candidates(),
                e.raw_ballots().iter().zip(&del).filter(|(_, &d)| !d).map(|(b, _)| b),
            )
        }
        ControlAction::AddVoters(idx) => {
            check_budget(idx.len())?;
            index_mask(inst.pool_voters.len(), idx)?;
            compute_winners(
                rule,
                e.candidates(),
                e.raw_ballots().iter().chain(idx.iter().map(|&i| &inst.pool_voters[i])),
            )
        }
        ControlAction::DeleteCandidates(ids) => {
            check_budget(ids.len())?;
            if ids.contains(&inst.distinguished) {
                return Err(Error::DeletesDistinguished);
            }
            let del = candidate_subset(e.candidates(), ids)?;
            let keep = CandidateSet::from_ids(e.universe(), e.candidates().iter().filter(|&c| !del.contains(c)));
            compute_winners(rule, &keep, e.raw_ballots())
        }
        ControlAction::AddCandidates(ids) => {
            check_budget(ids.len())?;
            let add = candidate_subset(&inst.spoilers, ids)?;
            compute_winners(rule, &e.candidates().union(&add), e.raw_ballots())
        }
        ControlAction::VoterPartition(v1) => {
            let tie = inst.control.tie.expect("partition control has a tie rule");
            let in_v1 = index_mask(e.num_votes(), v1)?;
            let w = voter_partition_survivors(e, &in_v1, tie);
            compute_winners(rule, &w, e.raw_ballots())
        }
        ControlAction::CandidatePartition(c1) => {
            let tie = inst.control.tie.expect("partition control has a tie rule");
            let runoff = fam == Family::RunoffPartitionCandidates;
            let c1 = candidate_subset(e.candidates(), c1)?;
            let fin = candidate_partition_final(e, &c1, tie, runoff);
            compute_winners(rule, &fin, e.raw_ballots())
        }
    };
    Ok(out)
}

/// Whether `action` achieves the instance's goal: `c` is (constructive) or
/// is not (destructive) the unique winner of the resulting election.
pub fn goal_satisfied(inst: &ControlInstance, action: &ControlAction) -> Result<bool> {
    let c_unique = final_winners(inst, action)?
        .map(|w| w.is_unique(inst.distinguished))
        .unwrap_or(false);
    Ok(inst.control.direction.goal(c_unique))
}

/// Position of `c` among the active entries of `b`, or `None` if `c` is
/// not listed (disapproved, for fallback).
pub(crate) fn active_position(b: &Ballot, active: &CandidateSet, c: CandidateId) -> Option<usize> {
    let mut pos = 0;
    for x in b.iter() {
        if x == c {
            return Some(pos);
        }
        if active.contains(x) {
            pos += 1;
        }
    }
    None
}

fn active_len(b: &Ballot, active: &CandidateSet) -> usize {
    b.iter().filter(|&x| active.contains(x)).count()
}

fn last_or_disapproved(rule: Rule, b: &Ballot, active: &CandidateSet, c: CandidateId) -> bool {
    let m = active.len();
    match active_position(b, active, c) {
        None => rule == Rule::Fallback,
        Some(p) => p + 1 == m && (rule.full_rankings() || active_len(b, active) == m),
    }
}

/// Condition 1: the distinguished candidate is last in every relevant vote
/// (or, for fallback, last or disapproved). When true the instance is a
/// no-instance.
pub fn condition1(inst: &ControlInstance) -> Result<bool> {
    let ct = inst.control;
    if ct.direction == Direction::Destructive {
        return Err(Error::ConditionNotApplicable("constructive control"));
    }
    if matches!(ct.family, Family::PartitionCandidates | Family::RunoffPartitionCandidates) {
        return Err(Error::ConditionNotApplicable("non-candidate-partition control"));
    }
    let e = &inst.election;
    let c = inst.distinguished;
    let rule = e.rule();
    let m = e.num_candidates();
    // With a single candidate left, being last means winning.
    if m < 2 {
        return Ok(false);
    }
    if ct.family == Family::DeleteCandidates && inst.budget + 2 > m {
        return Ok(false);
    }
    let registered = e.candidates();
    let all_last =
        |ballots: &[Ballot], active: &CandidateSet| ballots.iter().all(|b| last_or_disapproved(rule, b, active, c));
    let mut held = all_last(e.raw_ballots(), registered);
    match ct.family {
        Family::AddVoters => held = held && all_last(&inst.pool_voters, registered),
        Family::AddCandidates => {
            held = held && all_last(e.raw_ballots(), &inst.full_candidates())
        }
        _ => {}
    }
    Ok(held)
}

/// Which budgeted voter operation Conditions 2/3 reason about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// Condition 2, deleting voters.
    Delete,
    /// Condition 3, adding voters.
    Add,
}

/// Smallest level (1-based) at which `scores[level-1][c] >= threshold`.
fn first_level_reaching(scores: &[Vec<u32>], c: CandidateId, threshold: i64) -> Option<usize> {
    scores
        .iter()
        .position(|row| row[c.index()] as i64 >= threshold)
        .map(|p| p + 1)
}

/// Conditions 2 and 3. True iff for every `k' ≤ k` some rival reaches its
/// adjusted majority threshold at a level strictly below the level at
/// which `c` reaches its own. True means the instance is a no-instance.
pub fn condition_levels(inst: &ControlInstance, mode: LevelMode) -> Result<bool> {
    let e = &inst.election;
    if e.rule() == Rule::Plurality {
        return Err(Error::PluralityUnsupported);
    }
    let c = inst.distinguished;
    let n = e.num_votes() as i64;
    let scores = e.level_scores();
    let rivals: Vec<CandidateId> = e.candidates().iter().filter(|&x| x != c).collect();
    for kp in 0..=inst.budget as i64 {
        let (c_thr, rival_thr) = match mode {
            LevelMode::Delete => {
                let base = (n - kp).div_euclid(2) + 1;
                (base, base + kp)
            }
            LevelMode::Add => {
                let base = (n + kp).div_euclid(2) + 1;
                (base - kp, base)
            }
        };
        let j = first_level_reaching(&scores, c, c_thr);
        let beaten = rivals.iter().any(|&r| match (first_level_reaching(&scores, r, rival_thr), j) {
            (Some(i), Some(j)) => i < j,
            (Some(_), None) => true,
            (None, _) => false,
        });
        if !beaten {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Candidate holding a strict majority of first (approved) positions.
pub fn level_one_majority(e: &Election) -> Option<CandidateId> {
    if e.num_votes() == 0 {
        return None;
    }
    let maj = majority_threshold(e.num_votes());
    let active = e.candidates();
    let mut firsts = vec![0usize; e.universe()];
    for b in e.raw_ballots() {
        if let Some(top) = b.iter().find(|&x| active.contains(x)) {
            firsts[top.index()] += 1;
        }
    }
    active.iter().find(|c| firsts[c.index()] >= maj)
}

/// Condition 4 for voter partition: a level-1 majority winner `w` stays
/// the unique winner of every two-stage election, which decides the
/// instance outright.
pub fn condition4_decide(inst: &ControlInstance) -> Result<Option<Verdict>> {
    if inst.control.family != Family::PartitionVoters {
        return Err(Error::ConditionNotApplicable("partition of voters"));
    }
    let Some(w) = level_one_majority(&inst.election) else {
        return Ok(None);
    };
    let met = inst.control.direction.goal(w == inst.distinguished);
    Ok(Some(if met {
        Verdict::Yes(ControlAction::VoterPartition(Vec::new()))
    } else {
        Verdict::No
    }))
}

/// Condition 4 for destructive candidate control: if `c` holds a strict
/// level-1 majority (over all ballots including spoilers for AC), no
/// candidate action can unseat it.
pub fn condition4_candidates(inst: &ControlInstance) -> Result<bool> {
    let ct = inst.control;
    if ct.direction != Direction::Destructive || ct.family.is_voter_control() {
        return Err(Error::ConditionNotApplicable("destructive candidate control"));
    }
    let e = if ct.family == Family::AddCandidates {
        inst.election.with_active(inst.full_candidates())
    } else {
        inst.election.clone()
    };
    Ok(level_one_majority(&e) == Some(inst.distinguished))
}
