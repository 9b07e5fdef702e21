//! Seeded random elections and control instances under the Impartial
//! Culture (IC) and Two Mainstreams (TM) models.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{ControlInstance, ControlType, Family};
use crate::election::{Ballot, CandidateId, CandidateSet, Election, Rule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistModel {
    ImpartialCulture,
    TwoMainstreams,
}

impl DistModel {
    pub const ALL: [DistModel; 2] = [DistModel::ImpartialCulture, DistModel::TwoMainstreams];

    pub fn tag(self) -> &'static str {
        match self {
            DistModel::ImpartialCulture => "IC",
            DistModel::TwoMainstreams => "TM",
        }
    }
}

impl fmt::Display for DistModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DistModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "IC" => Ok(DistModel::ImpartialCulture),
            "TM" => Ok(DistModel::TwoMainstreams),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown distribution model '{other}'"),
            }),
        }
    }
}

pub type TrialRng = ChaCha8Rng;

/// Coordinates of one experiment trial; the random stream is a pure
/// function of all fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub master: u64,
    pub rule: Rule,
    pub control: ControlType,
    pub dist: DistModel,
    pub m: usize,
    pub n: usize,
    pub trial: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl TrialSeed {
    pub fn derive(&self) -> u64 {
        let mut h = splitmix64(self.master);
        let mut absorb = |x: u64| h = splitmix64(h ^ x);
        absorb(self.rule as u64);
        for b in self.control.to_string().bytes() {
            absorb(b as u64);
        }
        absorb(self.dist as u64 + 0x100);
        absorb(self.m as u64);
        absorb(self.n as u64);
        absorb(self.trial);
        h
    }

    pub fn rng(&self) -> TrialRng {
        ChaCha8Rng::seed_from_u64(self.derive())
    }
}

pub fn random_ranked_vote<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Ballot {
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    Ballot::from_indices(v)
}

/// Uniform ranking truncated to a uniform number `ℓ ∈ {0..m}` of approved
/// candidates, drawn independently.
pub fn random_fallback_vote<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Ballot {
    let mut v: Vec<usize> = (0..m).collect();
    v.shuffle(rng);
    let approved = rng.gen_range(0..=m);
    v.truncate(approved);
    Ballot::from_indices(v)
}

pub fn random_vote<R: Rng + ?Sized>(rule: Rule, m: usize, rng: &mut R) -> Ballot {
    match rule {
        Rule::Fallback => random_fallback_vote(m, rng),
        Rule::Bucklin | Rule::Plurality => random_ranked_vote(m, rng),
    }
}

/// Number of distinct fallback ballots over `m` candidates:
/// `Σ_{ℓ=0..m} C(m,ℓ)·ℓ!`.
pub fn fallback_domain_size(m: usize) -> u128 {
    // C(m,ℓ)·ℓ! = m!/(m-ℓ)!, the falling factorial.
    let mut total = 0u128;
    let mut falling = 1u128;
    for l in 0..=m {
        if l > 0 {
            falling *= (m - l + 1) as u128;
        }
        total += falling;
    }
    total
}

/// Which branch of the TM mixture produced a ballot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Mainstream1,
    Mainstream2,
    Fresh,
}

/// Ballot source for one election (and its unregistered pool).
#[derive(Debug, Clone)]
pub enum VoteSource {
    Impartial { rule: Rule, m: usize },
    Mainstreams { rule: Rule, m: usize, first: Ballot, second: Ballot },
}

impl VoteSource {
    pub fn new<R: Rng + ?Sized>(rule: Rule, dist: DistModel, m: usize, rng: &mut R) -> Self {
        match dist {
            DistModel::ImpartialCulture => VoteSource::Impartial { rule, m },
            DistModel::TwoMainstreams => {
                let first = random_vote(rule, m, rng);
                let second = random_vote(rule, m, rng);
                VoteSource::Mainstreams {
                    rule,
                    m,
                    first,
                    second,
                }
            }
        }
    }

    pub fn draw_with_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> (Ballot, Branch) {
        match self {
            VoteSource::Impartial { rule, m } => (random_vote(*rule, *m, rng), Branch::Fresh),
            VoteSource::Mainstreams {
                rule,
                m,
                first,
                second,
            } => match rng.gen_range(0..3u8) {
                0 => (first.clone(), Branch::Mainstream1),
                1 => (second.clone(), Branch::Mainstream2),
                _ => (random_vote(*rule, *m, rng), Branch::Fresh),
            },
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Ballot {
        self.draw_with_branch(rng).0
    }

    pub fn draw_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Ballot> {
        (0..count).map(|_| self.draw(rng)).collect()
    }
}

pub fn gen_election<R: Rng + ?Sized>(rule: Rule, dist: DistModel, m: usize, n: usize, rng: &mut R) -> Result<Election> {
    let source = VoteSource::new(rule, dist, m, rng);
    Election::new(rule, m, source.draw_many(n, rng))
}

/// Budget used by the generated instances: `⌊n/3⌋`, clamped to what the
/// control type allows.
pub fn default_budget(control: ControlType, m: usize, n: usize) -> usize {
    let k = n / 3;
    match control.family {
        Family::AddVoters | Family::DeleteVoters => k,
        Family::AddCandidates => k.min(m),
        Family::DeleteCandidates => k.min(m.saturating_sub(1)),
        _ => 0,
    }
}

/// How the distinguished candidate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CandidatePick {
    /// Uniformly among the registered candidates.
    Uniform,
    /// Only instances that are not decided before any control: for
    /// constructive control `c` is drawn uniformly among the candidates that
    /// are not already the unique winner; for destructive control `c` is the
    /// unique winner, and elections without one are redrawn. This is the
    /// convention the published yes-rates are consistent with.
    #[default]
    NonTrivial,
}

impl CandidatePick {
    pub fn tag(self) -> &'static str {
        match self {
            CandidatePick::Uniform => "uniform",
            CandidatePick::NonTrivial => "nontrivial",
        }
    }
}

impl fmt::Display for CandidatePick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CandidatePick {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(CandidatePick::Uniform),
            "nontrivial" | "non-trivial" => Ok(CandidatePick::NonTrivial),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown candidate pick '{other}'"),
            }),
        }
    }
}

/// Redraws allowed when looking for an election with a unique winner
/// before settling for a uniform pick.
const MAX_REDRAWS: usize = 10_000;

/// Random control instance with `m` registered candidates and `n`
/// registered voters, `c` drawn uniformly. AV instances get `n`
/// unregistered voters from the same source; AC instances get `m` spoilers,
/// with every ballot cast over all `2m` candidates.
pub fn gen_instance<R: Rng + ?Sized>(
    control: ControlType,
    rule: Rule,
    dist: DistModel,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<ControlInstance> {
    gen_instance_with(control, rule, dist, m, n, CandidatePick::Uniform, rng)
}

pub fn gen_instance_with<R: Rng + ?Sized>(
    control: ControlType,
    rule: Rule,
    dist: DistModel,
    m: usize,
    n: usize,
    pick: CandidatePick,
    rng: &mut R,
) -> Result<ControlInstance> {
    if m == 0 {
        return Err(Error::NoCandidates);
    }
    let mut inst = draw_instance(control, rule, dist, m, n, rng)?;
    if pick == CandidatePick::NonTrivial {
        for _ in 0..MAX_REDRAWS {
            let unique = match inst.election.winners() {
                Ok(w) => w.unique(),
                Err(_) => None,
            };
            if control.is_constructive() {
                let rivals: Vec<CandidateId> =
                    inst.election.candidates().iter().filter(|&x| Some(x) != unique).collect();
                // A lone candidate always wins; nothing non-trivial exists.
                if !rivals.is_empty() {
                    inst.distinguished = rivals[rng.gen_range(0..rivals.len())];
                }
                break;
            }
            if let Some(w) = unique {
                inst.distinguished = w;
                break;
            }
            inst = draw_instance(control, rule, dist, m, n, rng)?;
        }
    }
    inst.validate()?;
    Ok(inst)
}

fn draw_instance<R: Rng + ?Sized>(
    control: ControlType,
    rule: Rule,
    dist: DistModel,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<ControlInstance> {
    let budget = default_budget(control, m, n);
    Ok(match control.family {
        Family::AddCandidates => {
            let universe = 2 * m;
            let source = VoteSource::new(rule, dist, universe, rng);
            let e = Election::new(rule, universe, source.draw_many(n, rng))?;
            let c = CandidateId::from(rng.gen_range(0..m));
            let spoilers = CandidateSet::from_ids(universe, (m..universe).map(CandidateId::from));
            ControlInstance::new(control, e, c, budget).with_spoilers(spoilers)?
        }
        Family::AddVoters => {
            let source = VoteSource::new(rule, dist, m, rng);
            let e = Election::new(rule, m, source.draw_many(n, rng))?;
            let pool = source.draw_many(n, rng);
            let c = CandidateId::from(rng.gen_range(0..m));
            ControlInstance::new(control, e, c, budget).with_pool_voters(pool)
        }
        _ => {
            let e = gen_election(rule, dist, m, n, rng)?;
            let c = CandidateId::from(rng.gen_range(0..m));
            ControlInstance::new(control, e, c, budget)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_sizes() {
        assert_eq!(fallback_domain_size(0), 1);
        assert_eq!(fallback_domain_size(1), 2);
        assert_eq!(fallback_domain_size(3), 16);
    }

    #[test]
    fn single_candidate_vote() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_ranked_vote(1, &mut rng), Ballot::from_indices([0]));
    }

    #[test]
    fn budgets() {
        let dv: ControlType = "CCDV".parse().unwrap();
        let dc: ControlType = "CCDC".parse().unwrap();
        let pv: ControlType = "CCPV-TE".parse().unwrap();
        assert_eq!(default_budget(dv, 4, 4), 1);
        assert_eq!(default_budget(dv, 4, 128), 42);
        assert_eq!(default_budget(dc, 4, 128), 3);
        assert_eq!(default_budget(pv, 4, 128), 0);
    }

    #[test]
    fn pool_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let av = gen_instance("CCAV".parse().unwrap(), Rule::Fallback, DistModel::ImpartialCulture, 4, 8, &mut rng)
            .unwrap();
        assert_eq!(av.pool_voters.len(), 8);
        assert_eq!(av.budget, 2);
        let ac = gen_instance("DCAC".parse().unwrap(), Rule::Bucklin, DistModel::TwoMainstreams, 4, 8, &mut rng)
            .unwrap();
        assert_eq!(ac.spoilers.len(), 4);
        assert_eq!(ac.election.num_candidates(), 4);
        assert_eq!(ac.election.universe(), 8);
        assert_eq!(ac.election.raw_ballots()[0].len(), 8);
        let e = gen_election(Rule::Bucklin, DistModel::ImpartialCulture, 3, 0, &mut rng).unwrap();
        assert_eq!(e.num_votes(), 0);
    }

    #[test]
    fn same_seed_same_instance() {
        let seed = TrialSeed {
            master: 42,
            rule: Rule::Fallback,
            control: "CCAV".parse().unwrap(),
            dist: DistModel::TwoMainstreams,
            m: 8,
            n: 16,
            trial: 3,
        };
        let a = gen_instance(seed.control, seed.rule, seed.dist, seed.m, seed.n, &mut seed.rng()).unwrap();
        let b = gen_instance(seed.control, seed.rule, seed.dist, seed.m, seed.n, &mut seed.rng()).unwrap();
        assert_eq!(a, b);
        let other = TrialSeed { trial: 4, ..seed };
        assert_ne!(seed.derive(), other.derive());
    }

    #[test]
    fn nontrivial_pick() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..200 {
            let (name, rule) = if i % 2 == 0 { ("CCDV", Rule::Plurality) } else { ("DCPV-TE", Rule::Fallback) };
            let ct: ControlType = name.parse().unwrap();
            let inst =
                gen_instance_with(ct, rule, DistModel::ImpartialCulture, 4, 4, CandidatePick::NonTrivial, &mut rng)
                    .unwrap();
            let unique = inst.election.is_unique_winner(inst.distinguished).unwrap();
            assert_eq!(unique, !ct.is_constructive(), "{name}");
        }
        // One candidate: nothing to choose, still a valid instance.
        let ct: ControlType = "CCDC".parse().unwrap();
        let inst =
            gen_instance_with(ct, Rule::Bucklin, DistModel::ImpartialCulture, 1, 3, CandidatePick::NonTrivial, &mut rng)
                .unwrap();
        assert_eq!(inst.distinguished, CandidateId(0));
    }
}
