//! Underrepresentation measures: PAV score, JR / EJR+ violations,
//! minimum average satisfaction of ℓ-supporting groups and the
//! priceability gap.
//!
//! A candidate `c` is *open* if it is not in the committee, or if the
//! committee allows copies (then every candidate is open). An ℓ-supporting
//! group of an open candidate is a set of its supporters with total weight
//! at least `ℓ/k` of the electorate.

mod min_avg;
mod priceability;

use crate::election::{Committee, Election};
use crate::EPS;

pub use min_avg::{min_avg_satisfaction, min_avg_satisfaction_with, MinAvgGroup, SearchBudget};
pub use priceability::{priceability_gap, PriceSystem, PriceabilityReport};

fn harmonic(n: u32) -> f64 {
    (1..=n).map(|i| 1.0 / f64::from(i)).sum()
}

/// `Σ_v w(v) · H(|A_v ∩ W|)`.
pub fn pav_score(election: &Election, committee: &Committee) -> f64 {
    election
        .ballots()
        .iter()
        .zip(election.weights())
        .map(|(ballot, &w)| w * harmonic(committee.satisfaction(ballot)))
        .sum()
}

/// `Σ_v w(v) · |A_v ∩ W|`.
pub fn weighted_satisfaction(election: &Election, committee: &Committee) -> f64 {
    election
        .ballots()
        .iter()
        .zip(election.weights())
        .map(|(ballot, &w)| w * f64::from(committee.satisfaction(ballot)))
        .sum()
}

/// Weight needed for an ℓ-supporting group, less the comparison tolerance.
pub(crate) fn group_threshold(election: &Election, ell: usize) -> f64 {
    let total = election.total_weight();
    ell as f64 / election.k() as f64 * total - EPS * total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Jr,
    EjrPlus,
}

/// Open candidates violating JR or EJR+, in index order.
///
/// `c` violates EJR+ if for some `ℓ ∈ [k]` its supporters approving fewer
/// than ℓ committee members weigh at least `ℓ/k`; JR is the case `ℓ = 1`.
pub fn ejr_violations(election: &Election, committee: &Committee, axiom: Axiom) -> Vec<usize> {
    let k = election.k();
    let max_ell = match axiom {
        Axiom::Jr => 1,
        Axiom::EjrPlus => k,
    };
    let satisfaction = committee.satisfactions(election);
    let mut buckets = vec![0.0; max_ell];
    (0..election.num_candidates())
        .filter(|&c| committee.is_open(c))
        .filter(|&c| {
            buckets.iter_mut().for_each(|b| *b = 0.0);
            for &v in election.supporters_of(c) {
                let s = satisfaction[v] as usize;
                if s < max_ell {
                    buckets[s] += election.weight(v);
                }
            }
            let mut below = 0.0;
            (1..=max_ell).any(|ell| {
                below += buckets[ell - 1];
                below >= group_threshold(election, ell)
            })
        })
        .collect()
}

/// For each `ℓ ∈ [k]`, the number of open candidates whose supporters weigh
/// at least `ℓ/k`.
pub fn supporting_group_census(election: &Election, committee: &Committee) -> Vec<usize> {
    let weights: Vec<f64> = (0..election.num_candidates())
        .filter(|&c| committee.is_open(c))
        .map(|c| election.candidate_weight(c))
        .collect();
    (1..=election.k())
        .map(|ell| {
            let threshold = group_threshold(election, ell);
            weights.iter().filter(|&&w| w >= threshold).count()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupRecord {
    pub ell: usize,
    /// `None` when no ℓ-supporting group exists.
    pub worst: Option<MinAvgGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub records: Vec<GroupRecord>,
    /// `census[ℓ-1]` from [`supporting_group_census`].
    pub census: Vec<usize>,
}

pub fn group_report(election: &Election, committee: &Committee, ells: &[usize]) -> GroupReport {
    GroupReport {
        records: ells
            .iter()
            .map(|&ell| GroupRecord {
                ell,
                worst: min_avg_satisfaction(election, committee, ell),
            })
            .collect(),
        census: supporting_group_census(election, committee),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::{e1, e3};

    fn committee(e: &Election, members: &[usize]) -> Committee {
        Committee::new(members.to_vec(), e.num_candidates(), false).unwrap()
    }

    #[test]
    fn pav_examples() {
        let e = e1();
        assert!((pav_score(&e, &committee(&e, &[0, 1])) - 0.95).abs() < 1e-15);
        assert!((pav_score(&e, &committee(&e, &[0, 2])) - 1.0).abs() < 1e-15);
        assert_eq!(pav_score(&e, &committee(&e, &[])), 0.0);
    }

    #[test]
    fn satisfaction_examples() {
        let e = e1();
        assert!((weighted_satisfaction(&e, &committee(&e, &[0, 1])) - 1.1).abs() < 1e-15);
        assert_eq!(weighted_satisfaction(&e, &committee(&e, &[])), 0.0);
        let uniform =
            Election::from_ballots(3, 2, &[0.25; 4], &[&[0, 1], &[0, 1, 2], &[0, 1], &[1, 0]])
                .unwrap();
        assert!(
            (weighted_satisfaction(&uniform, &committee(&uniform, &[0, 1])) - 2.0).abs() < 1e-15
        );
    }

    #[test]
    fn jr_examples() {
        let e = e3();
        assert_eq!(
            ejr_violations(&e, &committee(&e, &[0, 1]), Axiom::Jr),
            vec![2]
        );
        let e = e1();
        assert!(ejr_violations(&e, &committee(&e, &[0, 1]), Axiom::Jr).is_empty());
    }

    #[test]
    fn ejr_plus_sees_higher_levels() {
        // c2's supporters approve one member, but weigh 0.8 < 2/2.
        let e = Election::from_ballots(3, 2, &[0.8, 0.2], &[&[0, 1], &[2]]).unwrap();
        let w = committee(&e, &[0, 2]);
        assert!(ejr_violations(&e, &w, Axiom::Jr).is_empty());
        assert!(ejr_violations(&e, &w, Axiom::EjrPlus).is_empty());
        let e = Election::from_ballots(3, 2, &[1.0], &[&[0, 1]]).unwrap();
        let w = committee(&e, &[0, 2]);
        assert!(ejr_violations(&e, &w, Axiom::Jr).is_empty());
        assert_eq!(ejr_violations(&e, &w, Axiom::EjrPlus), vec![1]);
    }

    #[test]
    fn census_examples() {
        let e = e3();
        assert_eq!(
            supporting_group_census(&e, &committee(&e, &[0, 1])),
            vec![1, 0]
        );
        assert_eq!(
            supporting_group_census(&e, &committee(&e, &[0, 1, 2]).clone()),
            vec![0, 0]
        );
        let e = e1();
        assert_eq!(supporting_group_census(&e, &committee(&e, &[1, 2]))[0], 1);
    }

    #[test]
    fn copies_make_every_candidate_open() {
        let e = e3();
        let w = Committee::new(vec![2, 2], 3, true).unwrap();
        assert_eq!(supporting_group_census(&e, &w), vec![3, 0]);
    }
}
