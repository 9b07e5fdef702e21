//! Elections and winner determination for Bucklin, fallback and plurality
//! voting.
//!
//! Ballots are stored once over a candidate *universe* and shared between an
//! election and all of its restrictions; an [`Election`] only carries the
//! mask of candidates that are still running. Removing a candidate therefore
//! never rewrites ballots, it just hides the candidate when positions are
//! counted.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense candidate index, stable across restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateId(pub u32);

impl CandidateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for CandidateId {
    fn from(i: usize) -> Self {
        CandidateId(i as u32)
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Bucklin,
    Fallback,
    Plurality,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Bucklin, Rule::Fallback, Rule::Plurality];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Bucklin => "bucklin",
            Rule::Fallback => "fallback",
            Rule::Plurality => "plurality",
        }
    }

    /// Short tag used in experiment tables.
    pub fn short(self) -> &'static str {
        match self {
            Rule::Bucklin => "BV",
            Rule::Fallback => "FV",
            Rule::Plurality => "PV",
        }
    }

    /// Whether ballots are complete rankings (as opposed to approved prefixes).
    pub fn full_rankings(self) -> bool {
        !matches!(self, Rule::Fallback)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bucklin" | "bv" => Ok(Rule::Bucklin),
            "fallback" | "fv" => Ok(Rule::Fallback),
            "plurality" | "pv" => Ok(Rule::Plurality),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown rule '{other}'"),
            }),
        }
    }
}

/// A single ballot: a ranking of candidates, most preferred first.
///
/// For Bucklin and plurality this is a full ranking of the universe. For
/// fallback it lists the approved candidates only, in preference order, and
/// may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ballot(Vec<CandidateId>);

impl Ballot {
    pub fn new(ranking: Vec<CandidateId>) -> Self {
        Ballot(ranking)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Ballot(it.into_iter().map(CandidateId::from).collect())
    }

    pub fn as_slice(&self) -> &[CandidateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, c: CandidateId) -> Option<usize> {
        self.0.iter().position(|&x| x == c)
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.0.iter().copied()
    }
}

/// Candidate membership mask over a universe of dense ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateSet {
    mask: Vec<bool>,
    len: usize,
}

impl CandidateSet {
    pub fn empty(universe: usize) -> Self {
        CandidateSet {
            mask: vec![false; universe],
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        CandidateSet {
            mask: vec![true; universe],
            len: universe,
        }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = CandidateId>) -> Self {
        let mut s = Self::empty(universe);
        for c in ids {
            s.insert(c);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, c: CandidateId) -> bool {
        self.mask.get(c.index()).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, c: CandidateId) {
        if !self.mask[c.index()] {
            self.mask[c.index()] = true;
            self.len += 1;
        }
    }

    pub fn remove(&mut self, c: CandidateId) {
        if self.mask[c.index()] {
            self.mask[c.index()] = false;
            self.len -= 1;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| CandidateId::from(i))
    }

    pub fn is_subset(&self, other: &CandidateSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    pub fn union(&self, other: &CandidateSet) -> CandidateSet {
        let mut out = self.clone();
        for c in other.iter() {
            out.insert(c);
        }
        out
    }

    pub fn intersection(&self, other: &CandidateSet) -> CandidateSet {
        CandidateSet::from_ids(self.universe(), self.iter().filter(|&c| other.contains(c)))
    }

    pub fn to_vec(&self) -> Vec<CandidateId> {
        self.iter().collect()
    }
}

/// Result of winner determination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerSet {
    /// Sorted by id.
    pub winners: Vec<CandidateId>,
    /// Bucklin/fallback level at which a strict majority was reached.
    pub winning_level: Option<usize>,
}

impl WinnerSet {
    pub fn is_unique(&self, c: CandidateId) -> bool {
        self.winners.len() == 1 && self.winners[0] == c
    }

    pub fn unique(&self) -> Option<CandidateId> {
        match self.winners.as_slice() {
            [w] => Some(*w),
            _ => None,
        }
    }
}

/// `⌊n/2⌋ + 1`.
#[inline]
pub fn majority_threshold(n: usize) -> usize {
    n / 2 + 1
}

/// Per-position counts of a vote list restricted to an active candidate set.
///
/// `count(pos, c)` is the number of ballots whose `pos`-th active entry is `c`.
pub(crate) struct PositionCounts {
    universe: usize,
    levels: usize,
    counts: Vec<u32>,
    voters: usize,
}

impl PositionCounts {
    pub(crate) fn build<'a, I>(active: &CandidateSet, max_levels: usize, ballots: I) -> Self
    where
        I: IntoIterator<Item = &'a Ballot>,
    {
        let universe = active.universe();
        let levels = max_levels.min(active.len());
        let mut counts = vec![0u32; universe * levels];
        let mut voters = 0;
        for b in ballots {
            voters += 1;
            let mut pos = 0;
            for c in b.iter() {
                if pos >= levels {
                    break;
                }
                if active.contains(c) {
                    counts[pos * universe + c.index()] += 1;
                    pos += 1;
                }
            }
        }
        PositionCounts {
            universe,
            levels,
            counts,
            voters,
        }
    }

    #[inline]
    fn row(&self, pos: usize) -> &[u32] {
        &self.counts[pos * self.universe..(pos + 1) * self.universe]
    }

    /// Cumulative level scores, one vector per level `1..=levels`.
    pub(crate) fn cumulative(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(self.levels);
        let mut acc = vec![0u32; self.universe];
        for pos in 0..self.levels {
            for (a, &x) in acc.iter_mut().zip(self.row(pos)) {
                *a += x;
            }
            out.push(acc.clone());
        }
        out
    }
}

fn argmax(active: &CandidateSet, scores: &[u32]) -> Vec<CandidateId> {
    let best = active.iter().map(|c| scores[c.index()]).max().unwrap_or(0);
    active.iter().filter(|c| scores[c.index()] == best).collect()
}

/// Winner determination over an arbitrary sequence of ballots and an active
/// candidate set. Returns `None` when there are no candidates; with no
/// voters every candidate ties.
pub(crate) fn compute_winners<'a, I>(rule: Rule, active: &CandidateSet, ballots: I) -> Option<WinnerSet>
where
    I: IntoIterator<Item = &'a Ballot>,
{
    if active.is_empty() {
        return None;
    }
    let max_levels = match rule {
        Rule::Plurality => 1,
        _ => active.len(),
    };
    let pc = PositionCounts::build(active, max_levels, ballots);
    if pc.voters == 0 {
        // Every candidate ties at zero.
        return Some(WinnerSet {
            winners: active.to_vec(),
            winning_level: None,
        });
    }
    let maj = majority_threshold(pc.voters) as u32;
    match rule {
        Rule::Plurality => Some(WinnerSet {
            winners: argmax(active, pc.row(0)),
            winning_level: None,
        }),
        Rule::Bucklin | Rule::Fallback => {
            let mut acc = vec![0u32; pc.universe];
            for level in 0..pc.levels {
                for (a, &x) in acc.iter_mut().zip(pc.row(level)) {
                    *a += x;
                }
                if active.iter().any(|c| acc[c.index()] >= maj) {
                    return Some(WinnerSet {
                        winners: argmax(active, &acc),
                        winning_level: Some(level + 1),
                    });
                }
            }
            // Only fallback can get here: `acc` now holds approval scores.
            debug_assert_eq!(rule, Rule::Fallback);
            Some(WinnerSet {
                winners: argmax(active, &acc),
                winning_level: None,
            })
        }
    }
}

/// An election `(C, V)`.
#[derive(Debug, Clone)]
pub struct Election {
    rule: Rule,
    active: CandidateSet,
    ballots: Arc<Vec<Ballot>>,
}

impl PartialEq for Election {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.active == other.active && self.votes() == other.votes()
    }
}

impl Election {
    /// Builds an election over candidates `0..m`, validating every ballot.
    pub fn new(rule: Rule, m: usize, ballots: Vec<Ballot>) -> Result<Self> {
        if m == 0 {
            return Err(Error::NoCandidates);
        }
        let mut seen = vec![usize::MAX; m];
        for (i, b) in ballots.iter().enumerate() {
            for c in b.iter() {
                if c.index() >= m {
                    return Err(Error::MalformedVote {
                        index: i,
                        reason: format!("candidate {c} outside 0..{m}"),
                    });
                }
                if seen[c.index()] == i {
                    return Err(Error::MalformedVote {
                        index: i,
                        reason: format!("candidate {c} listed twice"),
                    });
                }
                seen[c.index()] = i;
            }
            if rule.full_rankings() && b.len() != m {
                return Err(Error::MalformedVote {
                    index: i,
                    reason: format!("ranks {} of {m} candidates", b.len()),
                });
            }
        }
        Ok(Election {
            rule,
            active: CandidateSet::full(m),
            ballots: Arc::new(ballots),
        })
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Size of the id space the ballots are written over.
    pub fn universe(&self) -> usize {
        self.active.universe()
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.active
    }

    pub fn num_candidates(&self) -> usize {
        self.active.len()
    }

    pub fn num_votes(&self) -> usize {
        self.ballots.len()
    }

    /// Raw ballots over the universe, including inactive candidates.
    pub fn raw_ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    /// Vote `i` restricted to the active candidates.
    pub fn vote(&self, i: usize) -> Ballot {
        Ballot(
            self.ballots[i]
                .iter()
                .filter(|&c| self.active.contains(c))
                .collect(),
        )
    }

    pub fn votes(&self) -> Vec<Ballot> {
        (0..self.num_votes()).map(|i| self.vote(i)).collect()
    }

    pub(crate) fn with_active(&self, active: CandidateSet) -> Election {
        Election {
            rule: self.rule,
            active,
            ballots: Arc::clone(&self.ballots),
        }
    }

    fn check_candidate(&self, c: CandidateId) -> Result<()> {
        if self.active.contains(c) {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(c))
        }
    }

    /// Number of voters ranking `c` among their top `level` (approved)
    /// positions.
    pub fn level_score(&self, c: CandidateId, level: usize) -> Result<usize> {
        self.check_candidate(c)?;
        let m = self.num_candidates();
        if level == 0 || level > m {
            return Err(Error::LevelOutOfRange { level, max: m });
        }
        let count = self
            .ballots
            .iter()
            .filter(|b| {
                b.iter()
                    .filter(|&x| self.active.contains(x))
                    .take(level)
                    .any(|x| x == c)
            })
            .count();
        Ok(count)
    }

    /// All level scores: `scores[l][c]` is the level `l+1` score of `c`.
    pub fn level_scores(&self) -> Vec<Vec<u32>> {
        PositionCounts::build(&self.active, self.num_candidates(), self.ballots.iter()).cumulative()
    }

    fn nonempty(&self) -> Result<()> {
        if self.ballots.is_empty() {
            Err(Error::EmptyElection)
        } else {
            Ok(())
        }
    }

    fn expect_rule(&self, rule: Rule) -> Result<()> {
        if self.rule == rule {
            Ok(())
        } else {
            Err(Error::WrongRule {
                expected: rule.name(),
                found: self.rule,
            })
        }
    }

    pub fn bucklin_winners(&self) -> Result<WinnerSet> {
        self.expect_rule(Rule::Bucklin)?;
        self.winners()
    }

    pub fn fallback_winners(&self) -> Result<WinnerSet> {
        self.expect_rule(Rule::Fallback)?;
        self.winners()
    }

    pub fn plurality_winners(&self) -> Result<WinnerSet> {
        self.expect_rule(Rule::Plurality)?;
        self.winners()
    }

    /// Winners under the election's own rule.
    pub fn winners(&self) -> Result<WinnerSet> {
        self.nonempty()?;
        Ok(compute_winners(self.rule, &self.active, self.ballots.iter())
            .expect("nonempty election always has a winner set"))
    }

    pub fn is_unique_winner(&self, c: CandidateId) -> Result<bool> {
        self.check_candidate(c)?;
        Ok(self.winners()?.is_unique(c))
    }

    /// Election restricted to `keep`, which must be a nonempty subset of the
    /// active candidates. Rankings keep their relative order.
    pub fn restrict(&self, keep: &CandidateSet) -> Result<Election> {
        if keep.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        if let Some(c) = keep.iter().find(|&c| !self.active.contains(c)) {
            return Err(Error::UnknownCandidate(c));
        }
        Ok(self.with_active(keep.clone()))
    }

    pub fn restrict_to(&self, keep: &[CandidateId]) -> Result<Election> {
        if let Some(&c) = keep.iter().find(|c| c.index() >= self.universe()) {
            return Err(Error::UnknownCandidate(c));
        }
        self.restrict(&CandidateSet::from_ids(self.universe(), keep.iter().copied()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> Vec<CandidateId> {
        v.iter().map(|&i| CandidateId::from(i)).collect()
    }

    fn el(rule: Rule, m: usize, votes: &[&[usize]]) -> Election {
        Election::new(
            rule,
            m,
            votes.iter().map(|v| Ballot::from_indices(v.iter().copied())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn majority_threshold_values() {
        assert_eq!(majority_threshold(5), 3);
        assert_eq!(majority_threshold(0), 1);
        assert_eq!(majority_threshold(128), 65);
    }

    #[test]
    fn level_score_example_vote() {
        // c1=0, c2=1, c3=2; vote "c2 c1 c3"
        let e = el(Rule::Bucklin, 3, &[&[1, 0, 2]]);
        assert_eq!(e.level_score(CandidateId(1), 1).unwrap(), 1);
        assert_eq!(e.level_score(CandidateId(0), 2).unwrap(), 1);
        assert_eq!(e.level_score(CandidateId(2), 2).unwrap(), 0);
        for c in 0..3 {
            assert_eq!(e.level_score(CandidateId(c), 3).unwrap(), 1);
        }
    }

    #[test]
    fn level_score_disapproved_never_scores() {
        let e = el(Rule::Fallback, 3, &[&[2]]);
        assert_eq!(e.level_score(CandidateId(0), 3).unwrap(), 0);
        assert_eq!(e.level_score(CandidateId(2), 1).unwrap(), 1);
    }

    #[test]
    fn level_score_errors() {
        let e = el(Rule::Bucklin, 3, &[&[1, 0, 2]]);
        assert_eq!(
            e.level_score(CandidateId(7), 1),
            Err(Error::UnknownCandidate(CandidateId(7)))
        );
        assert!(matches!(e.level_score(CandidateId(0), 0), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(e.level_score(CandidateId(0), 4), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn bucklin_examples() {
        let e = el(Rule::Bucklin, 3, &[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2]]);
        let w = e.bucklin_winners().unwrap();
        assert_eq!(w.winners, ids(&[0]));
        assert_eq!(w.winning_level, Some(1));

        let e = el(Rule::Bucklin, 3, &[&[0, 1, 2]]);
        let w = e.bucklin_winners().unwrap();
        assert_eq!((w.winners, w.winning_level), (ids(&[0]), Some(1)));

        let e = el(
            Rule::Bucklin,
            4,
            &[&[0, 1, 2, 3], &[1, 0, 2, 3], &[2, 3, 0, 1], &[3, 2, 1, 0]],
        );
        let w = e.bucklin_winners().unwrap();
        assert_eq!(w.winners, ids(&[2]));
        assert_eq!(w.winning_level, Some(3));
    }

    #[test]
    fn empty_vote_list_rejected() {
        let e = el(Rule::Bucklin, 3, &[]);
        assert_eq!(e.winners(), Err(Error::EmptyElection));
        let e = el(Rule::Fallback, 3, &[]);
        assert_eq!(e.fallback_winners(), Err(Error::EmptyElection));
        let e = el(Rule::Plurality, 3, &[]);
        assert_eq!(e.plurality_winners(), Err(Error::EmptyElection));
    }

    #[test]
    fn fallback_examples() {
        let e = el(Rule::Fallback, 2, &[&[0], &[1], &[]]);
        let w = e.fallback_winners().unwrap();
        assert_eq!(w.winners, ids(&[0, 1]));
        assert_eq!(w.winning_level, None);

        let e = el(Rule::Fallback, 2, &[&[0], &[0], &[1]]);
        let w = e.fallback_winners().unwrap();
        assert_eq!((w.winners, w.winning_level), (ids(&[0]), Some(1)));
    }

    #[test]
    fn fallback_all_zero_approvals_everyone_wins() {
        let e = el(Rule::Fallback, 3, &[&[], &[]]);
        let w = e.fallback_winners().unwrap();
        assert_eq!(w.winners, ids(&[0, 1, 2]));
        for c in 0..3 {
            assert!(!e.is_unique_winner(CandidateId(c)).unwrap());
        }
    }

    #[test]
    fn fallback_full_approval_matches_bucklin() {
        let votes: &[&[usize]] = &[&[0, 1, 2, 3], &[1, 0, 2, 3], &[2, 3, 0, 1], &[3, 2, 1, 0]];
        let b = el(Rule::Bucklin, 4, votes).winners().unwrap();
        let f = el(Rule::Fallback, 4, votes).winners().unwrap();
        assert_eq!(b, f);
    }

    #[test]
    fn plurality_examples() {
        let e = el(Rule::Plurality, 2, &[&[0, 1], &[0, 1], &[1, 0]]);
        assert_eq!(e.plurality_winners().unwrap().winners, ids(&[0]));
        let e = el(Rule::Plurality, 2, &[&[0, 1], &[1, 0]]);
        let w = e.plurality_winners().unwrap();
        assert_eq!(w.winners, ids(&[0, 1]));
        assert_eq!(w.winning_level, None);
        assert!(!e.is_unique_winner(CandidateId(0)).unwrap());
        let e = el(Rule::Plurality, 3, &[&[2, 0, 1]]);
        assert_eq!(e.plurality_winners().unwrap().winners, ids(&[2]));
    }

    #[test]
    fn wrong_rule_is_an_error() {
        let e = el(Rule::Plurality, 2, &[&[0, 1]]);
        assert!(matches!(e.bucklin_winners(), Err(Error::WrongRule { .. })));
    }

    #[test]
    fn level_one_winner_is_unique() {
        let e = el(Rule::Bucklin, 3, &[&[2, 0, 1], &[2, 1, 0], &[0, 1, 2]]);
        assert!(e.is_unique_winner(CandidateId(2)).unwrap());
    }

    #[test]
    fn restrict_examples() {
        let e = el(Rule::Bucklin, 3, &[&[1, 0, 2], &[2, 1, 0]]);
        let same = e.restrict(&CandidateSet::full(3)).unwrap();
        assert_eq!(same, e);

        let r = e.restrict_to(&ids(&[0, 2])).unwrap();
        assert_eq!(r.vote(0).as_slice(), ids(&[0, 2]).as_slice());
        assert_eq!(r.num_candidates(), 2);
        assert_eq!(r.num_votes(), 2);

        let f = el(Rule::Fallback, 3, &[&[2, 0]]);
        let r = f.restrict_to(&ids(&[1])).unwrap();
        assert!(r.vote(0).is_empty());
        assert_eq!(r.num_votes(), 1);

        assert_eq!(e.restrict_to(&[]), Err(Error::EmptyRestriction));
        let r = e.restrict_to(&ids(&[0, 2])).unwrap();
        assert!(matches!(r.restrict_to(&ids(&[1])), Err(Error::UnknownCandidate(_))));
    }

    #[test]
    fn malformed_votes_rejected() {
        let bad = Election::new(Rule::Bucklin, 3, vec![Ballot::from_indices([0, 1])]);
        assert!(matches!(bad, Err(Error::MalformedVote { .. })));
        let bad = Election::new(Rule::Fallback, 3, vec![Ballot::from_indices([0, 0])]);
        assert!(matches!(bad, Err(Error::MalformedVote { .. })));
        let bad = Election::new(Rule::Fallback, 3, vec![Ballot::from_indices([5])]);
        assert!(matches!(bad, Err(Error::MalformedVote { .. })));
        assert!(matches!(Election::new(Rule::Bucklin, 0, vec![]), Err(Error::NoCandidates)));
    }
}
