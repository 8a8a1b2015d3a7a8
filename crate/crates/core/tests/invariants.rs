use proptest::prelude::*;

use npos_abc::dataset::{
    committee_overlap, relative_changes, simplicity_statistic, weight_order_statistics,
};
use npos_abc::io::{CommitteeFile, ElectionFile, TraceFile};
use npos_abc::representation::{
    min_avg_satisfaction, pav_score, priceability_gap, supporting_group_census,
    weighted_satisfaction,
};
use npos_abc::rules::{balanced_assignment, run_rule};
use npos_abc::security::{
    maximin_support, min_approval_weight_subset, replacement_cost, stake_lost_curve, SubsetMethod,
};
use npos_abc::{Committee, Election, RuleId, RuleOptions};

const TOL: f64 = 1e-7;

prop_compose! {
    fn election()(m in 2usize..7, n in 1usize..10)
        (k in 1..=m.min(4),
         weights in prop::collection::vec(1u32..20, n),
         masks in prop::collection::vec(1u32..(1 << m), n),
         m in Just(m))
        -> Election
    {
        let mut ballots: Vec<Vec<usize>> = masks
            .iter()
            .map(|mask| (0..m).filter(|c| mask >> c & 1 == 1).collect())
            .collect();
        let n = ballots.len();
        for c in 0..m {
            if !ballots.iter().any(|b| b.contains(&c)) {
                ballots[c % n].push(c);
            }
        }
        let weights: Vec<f64> = weights.into_iter().map(f64::from).collect();
        let refs: Vec<&[usize]> = ballots.iter().map(Vec::as_slice).collect();
        Election::from_ballots(m, k, &weights, &refs).unwrap().normalize().unwrap()
    }
}

fn any_rule() -> impl Strategy<Value = RuleId> {
    prop::sample::select(RuleId::ALL.to_vec())
}

fn prefix(e: &Election, take: usize) -> Committee {
    Committee::new(
        (0..take.min(e.num_candidates())).collect(),
        e.num_candidates(),
        false,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rules_fill_exactly_k_seats(e in election(), rule in any_rule()) {
        let out = run_rule(rule, &e, &RuleOptions::default()).unwrap();
        prop_assert_eq!(out.committee.len(), e.k());
        prop_assert_eq!(out.committee.distinct().len(), e.k());
        prop_assert_eq!(out.trace.order.len(), e.k());
        prop_assert_eq!(out.trace.per_round.len(), e.k());
        let again = run_rule(rule, &e, &RuleOptions::default()).unwrap();
        prop_assert_eq!(out, again);
    }

    #[test]
    fn copy_mode_fills_k_seats(e in election(), rule in prop::sample::select(vec![
        RuleId::SeqPav, RuleId::SeqPhragmen, RuleId::Mes, RuleId::Phragmms,
    ])) {
        let out = run_rule(rule, &e, &RuleOptions::with_copies()).unwrap();
        prop_assert_eq!(out.committee.len(), e.k());
    }

    #[test]
    fn balanced_assignment_is_complete(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let assignment = balanced_assignment(&e, &w);
        prop_assert!(assignment.violations(&e, true, TOL).is_empty());
    }

    #[test]
    fn satisfaction_bounds(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let pav = pav_score(&e, &w);
        let sat = weighted_satisfaction(&e, &w);
        prop_assert!(pav >= -TOL && pav <= sat + TOL);
        prop_assert!(sat <= take as f64 + TOL);
    }

    #[test]
    fn group_measures_are_monotone_in_ell(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let census = supporting_group_census(&e, &w);
        prop_assert_eq!(census.len(), e.k());
        prop_assert!(census.windows(2).all(|p| p[0] >= p[1]));
        let values: Vec<Option<f64>> = (1..=e.k()).map(|ell| min_avg_satisfaction(&e, &w, ell).map(|g| g.value)).collect();
        for pair in values.windows(2) {
            match (pair[0], pair[1]) {
                (Some(a), Some(b)) => prop_assert!(a <= b + TOL),
                (None, Some(_)) => prop_assert!(false, "larger ℓ found a group the smaller ℓ missed"),
                _ => {}
            }
        }
    }

    #[test]
    fn price_systems_are_valid(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let report = priceability_gap(&e, &w).unwrap();
        prop_assert!(report.system.violations(&e, &w, 1e-6).is_empty());
        prop_assert!(report.gap >= -report.system.price - TOL);
    }

    #[test]
    fn subset_weight_is_monotone(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let weights: Vec<f64> = (1..=w.distinct().len())
            .map(|ell| min_approval_weight_subset(&e, &w, ell, SubsetMethod::Ilp, None).unwrap().weight)
            .collect();
        prop_assert!(weights.windows(2).all(|p| p[0] <= p[1] + TOL));
        prop_assert!(weights.last().is_none_or(|&x| x <= 1.0 + TOL));
    }

    #[test]
    fn maximin_bounds(e in election(), take in 1usize..5) {
        let w = prefix(&e, take);
        let mms = maximin_support(&e, &w).unwrap();
        let weakest = w.distinct().iter().map(|&c| e.candidate_weight(c)).fold(f64::INFINITY, f64::min);
        prop_assert!(mms.value >= -TOL && mms.value <= weakest + TOL);
        prop_assert!(mms.value <= 1.0 / w.len() as f64 + TOL);
        prop_assert!(mms.assignment.violations(&e, true, 1e-6).is_empty());
        let curve = stake_lost_curve(&mms.assignment);
        prop_assert!((curve[0] - mms.value).abs() <= 1e-6);
        prop_assert!(curve.windows(2).all(|p| p[0] <= p[1] + TOL));
    }

    #[test]
    fn replacement_costs_grow_with_ell(e in election(), rule in prop::sample::select(vec![
        RuleId::Av, RuleId::Sav, RuleId::SeqPhragmen, RuleId::Phragmms,
    ])) {
        let trace = run_rule(rule, &e, &RuleOptions::default()).unwrap().trace;
        let costs: Vec<f64> = (1..=e.k())
            .map(|ell| replacement_cost(rule, &trace, ell, e.ballot_cap()).unwrap().cost)
            .collect();
        prop_assert!(costs.iter().all(|&c| c >= 0.0));
        prop_assert!(costs.windows(2).all(|p| p[0] <= p[1] + TOL), "{costs:?}");
    }

    #[test]
    fn dataset_statistics_are_bounded(a in election(), b in election()) {
        let changes = relative_changes(&a, &b);
        for q in [Some(changes.voters), changes.opinion, Some(changes.candidates)].into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&q));
        }
        let same = relative_changes(&a, &a);
        prop_assert_eq!(same.voters, 0.0);
        prop_assert_eq!(same.candidates, 0.0);
        prop_assert!(same.weight.is_none_or(|x| x == 0.0));
        prop_assert!(same.opinion.is_none_or(|x| x == 0.0));

        let wa = prefix(&a, a.k());
        let wb = prefix(&b, b.k());
        let ab = committee_overlap(&a, &wa, &b, &wb);
        prop_assert_eq!(ab, committee_overlap(&b, &wb, &a, &wa));
        prop_assert!(ab <= a.k().min(b.k()));

        if let Some(s) = simplicity_statistic(&a) {
            prop_assert!(s > 0.0 && s <= 0.5 + TOL);
        }
        let stats = weight_order_statistics(&a);
        prop_assert!(stats.half_weight_prefix >= 1 && stats.half_weight_prefix <= a.num_voters());
    }

    #[test]
    fn files_round_trip(e in election(), rule in any_rule()) {
        let text = ElectionFile::from_election(&e, serde_json::Value::Null).to_json();
        let parsed = ElectionFile::parse(&text).unwrap();
        prop_assert_eq!(parsed.to_json(), text);
        prop_assert_eq!(parsed.to_election().unwrap(), e.clone());

        let out = run_rule(rule, &e, &RuleOptions::default()).unwrap();
        let committee = CommitteeFile::new(&e, rule, &out.committee).to_json();
        prop_assert_eq!(CommitteeFile::parse(&committee).unwrap().to_json(), committee);
        let trace = TraceFile::new(&e, &out.trace).to_json();
        let back = TraceFile::parse(&trace).unwrap();
        prop_assert_eq!(back.to_json(), trace);
        prop_assert_eq!(back.to_trace(&e).unwrap(), out.trace);
    }
}
