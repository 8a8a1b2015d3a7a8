//! Statistics over election collections and a synthetic generator.
//!
//! Elections in a series are matched by identifier strings, not indices:
//! the same voter or candidate keeps its identifier across eras.

mod generator;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::election::{Committee, Election};
use crate::error::{Error, Result};

pub use generator::{generate, ApprovalModel, GeneratorConfig, WeightModel};

/// Relative change between two elections; each quotient is 0 for identical
/// elections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeChanges {
    pub voters: f64,
    /// Over voters present in both elections; `None` if there are none or
    /// their earlier weight is zero.
    pub weight: Option<f64>,
    /// Mean over common voters whose restricted ballots are not both empty;
    /// `None` if no voter qualifies.
    pub opinion: Option<f64>,
    pub candidates: f64,
}

fn symmetric_quotient<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let size = a.len() + b.len();
    if size == 0 {
        return 0.0;
    }
    a.symmetric_difference(b).count() as f64 / size as f64
}

fn ballot_ids(e: &Election, v: usize) -> BTreeSet<&str> {
    e.ballot(v)
        .iter()
        .map(|&c| e.candidates()[c].as_str())
        .collect()
}

pub fn relative_changes(before: &Election, after: &Election) -> RelativeChanges {
    let v1: HashMap<&str, usize> = before
        .voters()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let v2: HashMap<&str, usize> = after
        .voters()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let ids1: BTreeSet<&str> = v1.keys().copied().collect();
    let ids2: BTreeSet<&str> = v2.keys().copied().collect();
    let c1: BTreeSet<&str> = before.candidates().iter().map(String::as_str).collect();
    let c2: BTreeSet<&str> = after.candidates().iter().map(String::as_str).collect();

    let mut diff = 0.0;
    let mut base = 0.0;
    let mut opinion_sum = 0.0;
    let mut opinion_count = 0usize;
    for id in ids1.intersection(&ids2) {
        let (a, b) = (v1[id], v2[id]);
        diff += (before.weight(a) - after.weight(b)).abs();
        base += before.weight(a);
        let old: BTreeSet<&str> = ballot_ids(before, a).intersection(&c2).copied().collect();
        let new: BTreeSet<&str> = ballot_ids(after, b).intersection(&c1).copied().collect();
        if old.len() + new.len() > 0 {
            opinion_sum += symmetric_quotient(&old, &new);
            opinion_count += 1;
        }
    }
    RelativeChanges {
        voters: symmetric_quotient(&ids1, &ids2),
        weight: (base > 0.0).then(|| diff / base),
        opinion: (opinion_count > 0).then(|| opinion_sum / opinion_count as f64),
        candidates: symmetric_quotient(&c1, &c2),
    }
}

/// Number of candidates (by identifier) in both committees.
pub fn committee_overlap(e1: &Election, w1: &Committee, e2: &Election, w2: &Committee) -> usize {
    let a: BTreeSet<&str> = w1
        .distinct()
        .iter()
        .map(|&c| e1.candidates()[c].as_str())
        .collect();
    let b: BTreeSet<&str> = w2
        .distinct()
        .iter()
        .map(|&c| e2.candidates()[c].as_str())
        .collect();
    a.intersection(&b).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatistics {
    /// Weights in decreasing order.
    pub sorted: Vec<f64>,
    /// Fewest top voters jointly holding at least half the total weight.
    pub half_weight_prefix: usize,
}

pub fn weight_order_statistics(election: &Election) -> OrderStatistics {
    let mut sorted = election.weights().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let half = 0.5 * sorted.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut half_weight_prefix = sorted.len();
    for (i, w) in sorted.iter().enumerate() {
        acc += w;
        if acc >= half * (1.0 - 1e-12) {
            half_weight_prefix = i + 1;
            break;
        }
    }
    OrderStatistics {
        sorted,
        half_weight_prefix,
    }
}

/// Candidate approval weights in decreasing order.
pub fn approval_weight_order(election: &Election) -> Vec<f64> {
    let mut weights: Vec<f64> = (0..election.num_candidates())
        .map(|c| election.candidate_weight(c))
        .collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    weights
}

/// Mean of `|A_u ∩ A_v| / (|A_u| + |A_v|)` over voter pairs whose ballots
/// intersect; `None` if no pair does.
pub fn simplicity_statistic(election: &Election) -> Option<f64> {
    let ballots: Vec<Vec<usize>> = election
        .ballots()
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b.dedup();
            b
        })
        .collect();
    let mut sum = 0.0;
    let mut pairs = 0u64;
    // only pairs sharing a candidate matter; find them through supporters
    let mut seen = vec![usize::MAX; ballots.len()];
    let mut shared = vec![0usize; ballots.len()];
    for u in 0..ballots.len() {
        let mut partners = Vec::new();
        for &c in &ballots[u] {
            for &v in election.supporters_of(c) {
                if v <= u {
                    continue;
                }
                if seen[v] != u {
                    seen[v] = u;
                    shared[v] = 0;
                    partners.push(v);
                }
                shared[v] += 1;
            }
        }
        for v in partners {
            sum += shared[v] as f64 / (ballots[u].len() + ballots[v].len()) as f64;
            pairs += 1;
        }
    }
    (pairs > 0).then(|| sum / pairs as f64)
}

/// Elections ordered by era label.
#[derive(Debug, Clone, Default)]
pub struct ElectionSeries {
    eras: BTreeMap<u64, Election>,
}

impl ElectionSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an era; labels must be unique.
    pub fn insert(&mut self, era: u64, election: Election) -> Result<()> {
        if self.eras.contains_key(&era) {
            return Err(Error::Validation(format!("duplicate era label {era}")));
        }
        self.eras.insert(era, election);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.eras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eras.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Election)> {
        self.eras.iter().map(|(&era, e)| (era, e))
    }

    /// Changes between consecutive eras present in the series.
    pub fn consecutive_changes(&self) -> Vec<(u64, u64, RelativeChanges)> {
        let eras: Vec<(u64, &Election)> = self.iter().collect();
        eras.windows(2)
            .map(|w| (w[0].0, w[1].0, relative_changes(w[0].1, w[1].1)))
            .collect()
    }

    /// Era labels missing between the first and last era.
    pub fn missing_eras(&self) -> Vec<u64> {
        let labels: Vec<u64> = self.eras.keys().copied().collect();
        labels.windows(2).flat_map(|w| w[0] + 1..w[1]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;

    fn election(
        voters: &[&str],
        weights: &[f64],
        candidates: &[&str],
        ballots: &[&[usize]],
    ) -> Election {
        Election::new(
            candidates.iter().map(|s| s.to_string()).collect(),
            voters.iter().map(|s| s.to_string()).collect(),
            weights.to_vec(),
            ballots.iter().map(|b| b.to_vec()).collect(),
            1,
            None,
        )
        .unwrap()
    }

    #[test]
    fn identical_elections_do_not_change() {
        let e = e1();
        let r = relative_changes(&e, &e);
        assert_eq!(r.voters, 0.0);
        assert_eq!(r.weight, Some(0.0));
        assert_eq!(r.opinion, Some(0.0));
        assert_eq!(r.candidates, 0.0);
    }

    #[test]
    fn voter_turnover() {
        let a = election(&["a", "b"], &[0.5, 0.5], &["x"], &[&[0], &[0]]);
        let b = election(&["b", "c"], &[0.5, 0.5], &["x"], &[&[0], &[0]]);
        assert_eq!(relative_changes(&a, &b).voters, 0.5);
        let c = election(&["d", "e"], &[0.5, 0.5], &["x"], &[&[0], &[0]]);
        let r = relative_changes(&a, &c);
        assert_eq!(r.voters, 1.0);
        assert_eq!(r.weight, None);
        assert_eq!(r.opinion, None);
    }

    #[test]
    fn opinion_ignores_departed_candidates() {
        // v approves {x, y} then {x, z}; y and z are each in one election only.
        let a = election(&["v"], &[1.0], &["x", "y"], &[&[0, 1]]);
        let b = election(&["v"], &[1.0], &["x", "z"], &[&[0, 1]]);
        let r = relative_changes(&a, &b);
        assert_eq!(r.opinion, Some(0.0));
        assert_eq!(r.candidates, 0.5);
    }

    #[test]
    fn overlap_by_identifier() {
        let a = election(&["v"], &[1.0], &["x", "y", "z"], &[&[0]]);
        let b = election(&["v"], &[1.0], &["z", "y"], &[&[0]]);
        let wa = Committee::new(vec![1, 2], 3, false).unwrap();
        let wb = Committee::new(vec![0, 1], 2, false).unwrap();
        assert_eq!(committee_overlap(&a, &wa, &b, &wb), 2);
        let wb = Committee::new(vec![], 2, false).unwrap();
        assert_eq!(committee_overlap(&a, &wa, &b, &wb), 0);
    }

    #[test]
    fn order_statistics_examples() {
        assert_eq!(weight_order_statistics(&e1()).half_weight_prefix, 1);
        let uniform = election(
            &["a", "b", "c", "d", "e"],
            &[0.2; 5],
            &["x"],
            &[&[0][..]; 5],
        );
        assert_eq!(weight_order_statistics(&uniform).half_weight_prefix, 3);
        let single = election(&["a"], &[1.0], &["x"], &[&[0]]);
        assert_eq!(weight_order_statistics(&single).half_weight_prefix, 1);
        assert_eq!(approval_weight_order(&e1()), vec![0.8, 0.3, 0.2]);
    }

    #[test]
    fn simplicity_examples() {
        let party = Election::from_ballots(4, 2, &[0.25; 4], &[&[0, 1], &[0, 1], &[2, 3], &[2, 3]])
            .unwrap();
        assert_eq!(simplicity_statistic(&party), Some(0.5));
        let pair = Election::from_ballots(2, 1, &[0.5, 0.5], &[&[0, 1], &[0]]).unwrap();
        assert!((simplicity_statistic(&pair).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let disjoint = Election::from_ballots(2, 1, &[0.5, 0.5], &[&[0], &[1]]).unwrap();
        assert_eq!(simplicity_statistic(&disjoint), None);
    }

    #[test]
    fn series_rejects_duplicates_and_reports_gaps() {
        let mut s = ElectionSeries::new();
        s.insert(3, e1()).unwrap();
        s.insert(1, e1()).unwrap();
        assert!(s.insert(3, e1()).is_err());
        assert_eq!(s.missing_eras(), vec![2]);
        let changes = s.consecutive_changes();
        assert_eq!(changes.len(), 1);
        assert_eq!((changes[0].0, changes[0].1), (1, 3));
    }
}
