use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use votectl_core::experiment::{read_csv_from, summarize, write_csv_to, Cell, CellStats};
use votectl_core::format::{parse_election, parse_instance, write_election, write_instance};
use votectl_core::generate::random_vote;
use votectl_core::oracle::enumerate_actions;
use votectl_core::{
    brute_force, final_winners, gen_election, gen_instance, gen_instance_with, goal_satisfied, solve, solve_with,
    CandidateId, CandidatePick, CandidateSet, ControlInstance, ControlType, Deadline, Direction, DistModel, Election,
    Rule, SolverOptions, TrialSeed, Verdict,
};

fn any_rule() -> impl Strategy<Value = Rule> {
    prop_oneof![Just(Rule::Bucklin), Just(Rule::Fallback), Just(Rule::Plurality)]
}

fn any_dist() -> impl Strategy<Value = DistModel> {
    prop_oneof![Just(DistModel::ImpartialCulture), Just(DistModel::TwoMainstreams)]
}

fn any_control() -> impl Strategy<Value = ControlType> {
    proptest::sample::select(ControlType::all())
}

fn election(rule: Rule, m: usize, n: usize, seed: u64) -> Election {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let votes = (0..n).map(|_| random_vote(rule, m, &mut rng)).collect();
    Election::new(rule, m, votes).unwrap()
}

fn small_instance(control: ControlType, rule: Rule, m: usize, n: usize, seed: u64) -> ControlInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_instance(control, rule, DistModel::ImpartialCulture, m, n, &mut rng).unwrap()
}

fn flipped(ct: ControlType) -> ControlType {
    let direction = match ct.direction {
        Direction::Constructive => Direction::Destructive,
        Direction::Destructive => Direction::Constructive,
    };
    ControlType::new(ct.family, direction, ct.tie).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn level_scores_grow_with_level(rule in any_rule(), m in 1usize..7, n in 1usize..12, seed: u64) {
        let e = election(rule, m, n, seed);
        for c in e.candidates().iter() {
            let mut prev = 0;
            for level in 1..=m {
                let s = e.level_score(c, level).unwrap();
                prop_assert!(s >= prev && s <= n);
                prev = s;
            }
            if rule.full_rankings() {
                prop_assert_eq!(prev, n);
            }
        }
    }

    #[test]
    fn winners_are_active_and_nonempty(rule in any_rule(), m in 1usize..7, n in 1usize..12, seed: u64) {
        let e = election(rule, m, n, seed);
        let w = e.winners().unwrap();
        prop_assert!(!w.winners.is_empty());
        prop_assert!(w.winners.iter().all(|&c| e.candidates().contains(c)));
        prop_assert!(w.winners.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn vote_order_does_not_matter(rule in any_rule(), m in 1usize..7, n in 1usize..12, seed: u64) {
        let e = election(rule, m, n, seed);
        let mut votes = e.votes();
        votes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(1)));
        let shuffled = Election::new(rule, m, votes).unwrap();
        prop_assert_eq!(e.winners().unwrap(), shuffled.winners().unwrap());
    }

    #[test]
    fn fallback_on_full_rankings_is_bucklin(m in 1usize..7, n in 1usize..12, seed: u64) {
        let b = election(Rule::Bucklin, m, n, seed);
        let f = Election::new(Rule::Fallback, m, b.votes()).unwrap();
        prop_assert_eq!(b.winners().unwrap(), f.winners().unwrap());
    }

    #[test]
    fn restrictions_compose(rule in any_rule(), m in 2usize..7, n in 1usize..10, seed: u64, a: u8, b: u8) {
        let e = election(rule, m, n, seed);
        let outer: Vec<CandidateId> = (0..m).filter(|i| a >> i & 1 == 1 || *i == 0).map(CandidateId::from).collect();
        let inner: Vec<CandidateId> = outer.iter().copied().filter(|c| b >> c.index() & 1 == 1 || c.index() == 0).collect();
        let twice = e.restrict_to(&outer).unwrap().restrict_to(&inner).unwrap();
        let once = e.restrict_to(&inner).unwrap();
        prop_assert_eq!(twice.winners().unwrap(), once.winners().unwrap());
        prop_assert_eq!(twice.level_scores(), once.level_scores());
    }

    #[test]
    fn election_text_round_trips(rule in any_rule(), m in 1usize..7, n in 0usize..10, seed: u64) {
        let e = election(rule, m, n, seed);
        let back = parse_election(&write_election(&e).unwrap()).unwrap();
        prop_assert_eq!(back.votes(), e.votes());
        prop_assert_eq!(back.rule(), rule);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn destructive_goal_is_the_complement(
        control in any_control(), rule in any_rule(), m in 1usize..4, n in 1usize..5, seed: u64,
    ) {
        let inst = small_instance(control, rule, m, n, seed);
        let mut other = inst.clone();
        other.control = flipped(control);
        for action in enumerate_actions(&inst).take(200) {
            prop_assert_eq!(final_winners(&inst, &action).unwrap(), final_winners(&other, &action).unwrap());
            prop_assert_ne!(goal_satisfied(&inst, &action).unwrap(), goal_satisfied(&other, &action).unwrap());
        }
    }

    #[test]
    fn more_budget_never_hurts(
        control in any_control(), rule in any_rule(), m in 1usize..4, n in 1usize..6, seed: u64,
    ) {
        prop_assume!(control.family.has_budget());
        let mut inst = small_instance(control, rule, m, n, seed);
        let mut prev = false;
        for k in 0..=n.max(m) {
            inst.budget = k;
            if inst.validate().is_err() {
                break;
            }
            let yes = brute_force(&inst).unwrap().yes;
            prop_assert!(yes || !prev, "yes at k={} but not at k={}", k - 1, k);
            prev = yes;
        }
    }

    #[test]
    fn pruning_and_ordering_do_not_change_the_verdict(
        control in any_control(), rule in any_rule(), m in 1usize..5, n in 1usize..7, seed: u64,
    ) {
        let inst = small_instance(control, rule, m, n, seed);
        let truth = brute_force(&inst).unwrap().yes;
        for conditions in [false, true] {
            for preorder in [false, true] {
                let out = solve_with(&inst, Deadline::unlimited(), SolverOptions { conditions, preorder }).unwrap();
                prop_assert_eq!(out.verdict.is_yes(), truth);
                if let Verdict::Yes(a) = &out.verdict {
                    prop_assert!(goal_satisfied(&inst, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn solving_is_deterministic(
        control in any_control(), rule in any_rule(), m in 1usize..6, n in 1usize..8, seed: u64,
    ) {
        let inst = small_instance(control, rule, m, n, seed);
        let a = solve(&inst, Deadline::unlimited()).unwrap().verdict;
        let b = solve(&inst, Deadline::unlimited()).unwrap().verdict;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_are_reproducible(
        control in any_control(), rule in any_rule(), dist in any_dist(), m in 1usize..10, n in 0usize..10,
        master: u64, trial in 0u64..1000, uniform: bool,
    ) {
        let pick = if uniform { CandidatePick::Uniform } else { CandidatePick::NonTrivial };
        let seed = TrialSeed { master, rule, control, dist, m, n, trial };
        let a = gen_instance_with(control, rule, dist, m, n, pick, &mut seed.rng()).unwrap();
        let b = gen_instance_with(control, rule, dist, m, n, pick, &mut seed.rng()).unwrap();
        prop_assert_eq!(&a, &b);
        a.validate().unwrap();
        prop_assert_eq!(a.election.num_candidates(), m);
        prop_assert_eq!(a.election.num_votes(), n);
        let back = parse_instance(&write_instance(&a).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn elections_depend_only_on_the_seed(rule in any_rule(), dist in any_dist(), m in 1usize..10, n in 0usize..10, seed: u64) {
        let a = gen_election(rule, dist, m, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = gen_election(rule, dist, m, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a.votes(), b.votes());
    }
}

fn any_stats() -> impl Strategy<Value = CellStats> {
    (any_rule(), any_control(), any_dist(), 1usize..200, 1usize..200, 1usize..600, any::<u64>(), 0u64..3)
        .prop_flat_map(|(rule, control, dist, m, n, trials, seed, ms)| {
            (0..=trials, 0..=trials, proptest::collection::vec(0u32..1_000_000, 3)).prop_map(
                move |(a, b, times)| {
                    let (cp, rest) = (a.min(trials), trials - a.min(trials));
                    let ci = b.min(rest);
                    let t = |i: usize| (ms > 0).then(|| times[i] as f64 / 1000.0);
                    CellStats {
                        cell: Cell { rule, control, dist, m, n },
                        trials,
                        k: n / 3,
                        cp,
                        ci,
                        to: rest - ci,
                        avg_ms_yes: t(0),
                        avg_ms_no: t(1),
                        avg_ms_decided: t(2),
                        seed,
                    }
                },
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trips(table in proptest::collection::vec(any_stats(), 0..12)) {
        let mut buf = Vec::new();
        write_csv_to(&table, &mut buf).unwrap();
        prop_assert_eq!(read_csv_from(buf.as_slice()).unwrap(), table);
    }

    #[test]
    fn summary_bounds_hold(table in proptest::collection::vec(any_stats(), 1..20)) {
        for row in summarize(&table) {
            let cells: Vec<&CellStats> = table
                .iter()
                .filter(|s| s.cell.control == row.control && s.cell.rule == row.rule && s.cell.dist == row.dist)
                .collect();
            prop_assert!(!cells.is_empty());
            prop_assert!(row.min_pct <= row.max_pct);
            for s in &cells {
                prop_assert!(s.cp + s.ci + s.to == s.trials);
                let p = s.yes_percent();
                prop_assert!(row.min_pct <= p && p <= row.max_pct);
            }
            prop_assert!((0.0..=100.0).contains(&row.to_pct));
        }
    }
}

#[test]
fn spoiler_universe_is_twice_the_registered_set() {
    let ct: ControlType = "CCAC".parse().unwrap();
    let inst = small_instance(ct, Rule::Bucklin, 3, 4, 9);
    assert_eq!(inst.election.universe(), 6);
    let expected = CandidateSet::from_ids(6, (3..6).map(CandidateId::from));
    assert_eq!(inst.spoilers, expected);
}
