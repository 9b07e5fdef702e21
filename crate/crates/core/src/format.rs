//! Plain-text election and control-instance files.
//!
//! ```text
//! rule=fallback
//! 3 2
//! 0 2
//!
//! control=CCPV
//! tie=TE
//! c=0
//! k=0
//! ```
//!
//! Vote lines list 0-based candidate ids; fallback lines hold only the
//! approved prefix and may be blank. An instance may add a
//! `pool_voters=<count>` block followed by that many vote lines, and
//! `pool_candidates=<count>` to declare spoilers `m..m+count-1` (every
//! ballot then covers the union).

use std::fmt::Write as _;

use crate::control::{ControlInstance, ControlType, TieRule};
use crate::election::{Ballot, CandidateId, CandidateSet, Election, Rule};
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    /// 1-based number of the line `next` would return.
    fn lineno(&self) -> usize {
        self.pos + 1
    }

    fn next(&mut self) -> Option<&'a str> {
        let l = self.lines.get(self.pos).copied();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    /// Next line that is neither blank nor a `#` comment.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        while let Some(l) = self.next() {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((self.pos, t));
            }
        }
        None
    }

    fn vote(&mut self) -> Result<Ballot> {
        let no = self.lineno();
        let l = self.next().ok_or_else(|| perr(no, "missing vote line"))?;
        parse_vote(no, l)
    }
}

fn parse_vote(line: usize, s: &str) -> Result<Ballot> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| perr(line, format!("bad candidate index '{tok}'")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Ballot::from_indices)
}

fn key_value<'a>(line: usize, s: &'a str, key: &str) -> Result<&'a str> {
    match s.split_once('=') {
        Some((k, v)) if k.trim() == key => Ok(v.trim()),
        _ => Err(perr(line, format!("expected '{key}=...', found '{s}'"))),
    }
}

fn int(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| perr(line, format!("expected a non-negative integer, found '{s}'")))
}

struct RawElection {
    rule: Rule,
    m: usize,
    votes: Vec<Ballot>,
}

fn parse_election_block(lines: &mut Lines<'_>) -> Result<RawElection> {
    let (no, l) = lines.next_content().ok_or_else(|| perr(1, "empty input"))?;
    let rule: Rule = key_value(no, l, "rule")?
        .parse()
        .map_err(|e: Error| perr(no, e.to_string()))?;
    let (no, l) = lines.next_content().ok_or_else(|| perr(no + 1, "missing 'm n' line"))?;
    let mut it = l.split_whitespace();
    let (m, n) = match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => (int(no, a)?, int(no, b)?),
        _ => return Err(perr(no, "expected 'm n'")),
    };
    let votes = (0..n).map(|_| lines.vote()).collect::<Result<Vec<_>>>()?;
    Ok(RawElection { rule, m, votes })
}

pub fn parse_election(text: &str) -> Result<Election> {
    let mut lines = Lines::new(text);
    let raw = parse_election_block(&mut lines)?;
    if let Some((no, l)) = lines.next_content() {
        return Err(perr(no, format!("trailing content '{l}'")));
    }
    Election::new(raw.rule, raw.m, raw.votes)
}

fn push_vote(out: &mut String, b: &Ballot) {
    let parts: Vec<String> = b.iter().map(|c| c.0.to_string()).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

fn push_election(out: &mut String, e: &Election, m: usize) {
    let _ = writeln!(out, "rule={}", e.rule().name());
    let _ = writeln!(out, "{} {}", m, e.num_votes());
    for b in e.raw_ballots() {
        push_vote(out, b);
    }
}

/// Serializes an election whose candidates are all of `0..m`.
pub fn write_election(e: &Election) -> Result<String> {
    if e.num_candidates() != e.universe() {
        return Err(Error::MalformedInstance(
            "only unrestricted elections can be written".into(),
        ));
    }
    let mut out = String::new();
    push_election(&mut out, e, e.universe());
    Ok(out)
}

pub fn parse_instance(text: &str) -> Result<ControlInstance> {
    let mut lines = Lines::new(text);
    let raw = parse_election_block(&mut lines)?;
    let mut control: Option<(usize, String)> = None;
    let mut tie: Option<Option<TieRule>> = None;
    let mut c: Option<usize> = None;
    let mut k: Option<usize> = None;
    let mut pool_voters: Vec<Ballot> = Vec::new();
    let mut pool_candidates = 0usize;
    while let Some((no, l)) = lines.next_content() {
        let (key, value) = l
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| perr(no, format!("expected 'key=value', found '{l}'")))?;
        match key {
            "control" => control = Some((no, value.to_string())),
            "tie" => {
                tie = Some(match value {
                    "-" => None,
                    t => Some(t.parse().map_err(|e: Error| perr(no, e.to_string()))?),
                })
            }
            "c" => c = Some(int(no, value)?),
            "k" => k = Some(int(no, value)?),
            "pool_voters" => {
                let count = int(no, value)?;
                pool_voters = (0..count).map(|_| lines.vote()).collect::<Result<Vec<_>>>()?;
            }
            "pool_candidates" => pool_candidates = int(no, value)?,
            other => return Err(perr(no, format!("unknown key '{other}'"))),
        }
    }
    let (cno, cname) = control.ok_or_else(|| perr(lines.lineno(), "missing control="))?;
    let mut ct: ControlType = cname.parse().or_else(|_| {
        // `control=CCPV` with the tie rule given separately.
        let with_tie = match tie {
            Some(Some(t)) => format!("{cname}-{}", t.tag()),
            _ => cname.clone(),
        };
        with_tie.parse().map_err(|e: Error| perr(cno, e.to_string()))
    })?;
    if let Some(t) = tie {
        if ct.tie != t {
            ct = ControlType::new(ct.family, ct.direction, t).map_err(|e| perr(cno, e.to_string()))?;
        }
    }
    let c = c.ok_or_else(|| perr(lines.lineno(), "missing c="))?;
    let k = k.ok_or_else(|| perr(lines.lineno(), "missing k="))?;
    if c >= raw.m {
        return Err(Error::UnknownCandidate(CandidateId::from(c)));
    }
    let universe = raw.m + pool_candidates;
    let e = Election::new(raw.rule, universe, raw.votes)?;
    let mut inst = ControlInstance::new(ct, e, CandidateId::from(c), k);
    if !pool_voters.is_empty() {
        // Validate pool ballots against the same universe.
        Election::new(raw.rule, universe, pool_voters.clone())?;
        inst = inst.with_pool_voters(pool_voters);
    }
    if pool_candidates > 0 {
        let spoilers = CandidateSet::from_ids(universe, (raw.m..universe).map(CandidateId::from));
        inst = inst.with_spoilers(spoilers)?;
    }
    inst.validate()?;
    Ok(inst)
}

/// Serializes an instance. Spoilers, if any, must be the highest ids.
pub fn write_instance(inst: &ControlInstance) -> Result<String> {
    let e = &inst.election;
    let m = e.num_candidates();
    let universe = e.universe();
    let expected = CandidateSet::from_ids(universe, (m..universe).map(CandidateId::from));
    if inst.spoilers != expected || inst.full_candidates().len() != universe {
        return Err(Error::MalformedInstance(
            "spoilers must be exactly the candidates m..m+count-1".into(),
        ));
    }
    let mut out = String::new();
    push_election(&mut out, e, m);
    let _ = writeln!(out, "control={}", inst.control.base_name());
    let _ = writeln!(out, "tie={}", inst.control.tie.map_or("-", |t| t.tag()));
    let _ = writeln!(out, "c={}", inst.distinguished.0);
    let _ = writeln!(out, "k={}", inst.budget);
    if !inst.pool_voters.is_empty() {
        let _ = writeln!(out, "pool_voters={}", inst.pool_voters.len());
        for b in &inst.pool_voters {
            push_vote(&mut out, b);
        }
    }
    if !inst.spoilers.is_empty() {
        let _ = writeln!(out, "pool_candidates={}", inst.spoilers.len());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn election_round_trip_keeps_blank_fallback_lines() {
        let text = "rule=fallback\n3 3\n0 2\n\n1\n";
        let e = parse_election(text).unwrap();
        assert_eq!(e.num_votes(), 3);
        assert!(e.raw_ballots()[1].is_empty());
        assert_eq!(write_election(&e).unwrap(), text);
    }

    #[test]
    fn bucklin_requires_full_rankings() {
        assert!(parse_election("rule=bucklin\n3 1\n0 1\n").is_err());
        assert!(matches!(parse_election("rule=bucklin\n3 1\n0 x 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_election("rule=borda\n3 0\n").is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = "rule=bucklin\n2 2\n0 1\n1 0\ncontrol=CCAV\ntie=-\nc=0\nk=1\npool_voters=1\n0 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.pool_voters.len(), 1);
        assert_eq!(write_instance(&inst).unwrap(), text);

        let text = "rule=plurality\n2 1\n2 0 1\ncontrol=DCAC\ntie=-\nc=1\nk=1\npool_candidates=1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.election.num_candidates(), 2);
        assert_eq!(inst.spoilers.to_vec(), vec![CandidateId(2)]);
        assert_eq!(write_instance(&inst).unwrap(), text);
    }

    #[test]
    fn tie_given_either_way() {
        let a = parse_instance("rule=bucklin\n2 1\n0 1\ncontrol=DCPV\ntie=TP\nc=0\nk=0\n").unwrap();
        let b = parse_instance("rule=bucklin\n2 1\n0 1\ncontrol=DCPV-TP\nc=0\nk=0\n").unwrap();
        assert_eq!(a, b);
        assert!(parse_instance("rule=bucklin\n2 1\n0 1\ncontrol=DCPV\ntie=-\nc=0\nk=0\n").is_err());
        assert!(parse_instance("rule=bucklin\n2 1\n0 1\ncontrol=CCDV\ntie=-\nc=2\nk=0\n").is_err());
    }
}
