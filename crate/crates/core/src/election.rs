//! Election model: candidates, weighted voters with approval ballots, and the
//! committee / vote-assignment types shared by every rule and measure.

use crate::error::{Error, Result};

/// Sum of weights tolerated as "already normalized".
const NORMALIZED_TOLERANCE: f64 = 1e-12;

/// A weighted approval-based committee election.
///
/// Candidates and voters are addressed by index; their identifiers are kept
/// only for I/O and for matching elections across a time series. Values are
/// immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Election {
    candidates: Vec<String>,
    voters: Vec<String>,
    weights: Vec<f64>,
    ballots: Vec<Vec<usize>>,
    k: usize,
    ballot_cap: Option<usize>,
    supporters: Vec<Vec<usize>>,
}

impl Election {
    /// Builds an election. Ballot entries must be valid candidate indices;
    /// every other invariant is reported by [`Election::validate`] instead of
    /// being rejected here.
    pub fn new(
        candidates: Vec<String>,
        voters: Vec<String>,
        weights: Vec<f64>,
        ballots: Vec<Vec<usize>>,
        k: usize,
        ballot_cap: Option<usize>,
    ) -> Result<Self> {
        if voters.len() != weights.len() || voters.len() != ballots.len() {
            return Err(Error::Validation(format!(
                "{} voters, {} weights and {} ballots",
                voters.len(),
                weights.len(),
                ballots.len()
            )));
        }
        let m = candidates.len();
        let mut supporters = vec![Vec::new(); m];
        for (v, ballot) in ballots.iter().enumerate() {
            for &c in ballot {
                let list: &mut Vec<usize> =
                    supporters.get_mut(c).ok_or(Error::UnknownCandidate(c))?;
                if list.last() != Some(&v) {
                    list.push(v);
                }
            }
        }
        Ok(Self {
            candidates,
            voters,
            weights,
            ballots,
            k,
            ballot_cap,
            supporters,
        })
    }

    /// Convenience constructor with generated identifiers `c1..cm` and
    /// `v1..vn`.
    pub fn from_ballots(m: usize, k: usize, weights: &[f64], ballots: &[&[usize]]) -> Result<Self> {
        Self::new(
            (1..=m).map(|i| format!("c{i}")).collect(),
            (1..=weights.len()).map(|i| format!("v{i}")).collect(),
            weights.to_vec(),
            ballots.iter().map(|b| b.to_vec()).collect(),
            k,
            None,
        )
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ballot_cap(&self) -> Option<usize> {
        self.ballot_cap
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn voters(&self) -> &[String] {
        &self.voters
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn ballots(&self) -> &[Vec<usize>] {
        &self.ballots
    }

    pub fn ballot(&self, v: usize) -> &[usize] {
        &self.ballots[v]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn candidate_index(&self, id: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c == id)
    }

    /// Voters approving `c`, in ascending index order.
    pub fn supporters(&self, c: usize) -> Result<&[usize]> {
        self.supporters
            .get(c)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownCandidate(c))
    }

    pub(crate) fn supporters_of(&self, c: usize) -> &[usize] {
        &self.supporters[c]
    }

    /// Total weight of the voters approving `c`.
    pub fn candidate_weight(&self, c: usize) -> f64 {
        self.supporters[c].iter().map(|&v| self.weights[v]).sum()
    }

    /// Total weight of voters approving at least one candidate of `set`.
    pub fn approval_weight(&self, set: &[usize]) -> Result<f64> {
        let mut mask = vec![false; self.num_candidates()];
        for &c in set {
            *mask.get_mut(c).ok_or(Error::UnknownCandidate(c))? = true;
        }
        Ok(self
            .ballots
            .iter()
            .zip(&self.weights)
            .filter(|(ballot, _)| ballot.iter().any(|&c| mask[c]))
            .map(|(_, w)| w)
            .sum())
    }

    /// Returns a copy with weights scaled to sum to one. Elections whose
    /// weights already sum to one within 1e-12 are returned unchanged, which
    /// makes the operation idempotent.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total_weight();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::Validation(format!(
                "total voter weight must be positive, got {total}"
            )));
        }
        let mut out = self.clone();
        if (total - 1.0).abs() > NORMALIZED_TOLERANCE {
            for w in &mut out.weights {
                *w /= total;
            }
        }
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_weight() - 1.0).abs() <= NORMALIZED_TOLERANCE
    }

    /// Same election with a different committee size.
    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn with_ballot_cap(&self, ballot_cap: Option<usize>) -> Self {
        Self {
            ballot_cap,
            ..self.clone()
        }
    }

    /// Human-readable descriptions of every violated invariant. Empty iff the
    /// election is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.k == 0 {
            violations.push("committee size must be positive".to_string());
        }
        if self.k > self.num_candidates() {
            violations.push("k exceeds candidate count".to_string());
        }
        if self.ballot_cap == Some(0) {
            violations.push("ballot cap must be positive".to_string());
        }
        for (v, ballot) in self.ballots.iter().enumerate() {
            let mut seen = ballot.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                violations.push(format!(
                    "duplicate approval in ballot of voter {}",
                    self.voters[v]
                ));
            }
            if let Some(cap) = self.ballot_cap {
                if seen.len() > cap {
                    violations.push(format!(
                        "ballot of voter {} has {} approvals, cap is {cap}",
                        self.voters[v],
                        seen.len()
                    ));
                }
            }
        }
        for (v, &w) in self.weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                violations.push(format!("voter {} has invalid weight {w}", self.voters[v]));
            }
        }
        if self.total_weight().is_nan() || self.total_weight() <= 0.0 {
            violations.push("total voter weight is zero".to_string());
        }
        violations
    }
}

/// Selected candidates. In multi-copy mode a candidate may appear several
/// times and counts with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Committee {
    members: Vec<usize>,
    allow_copies: bool,
    counts: Vec<u32>,
}

impl Committee {
    pub fn new(members: Vec<usize>, num_candidates: usize, allow_copies: bool) -> Result<Self> {
        let mut counts = vec![0u32; num_candidates];
        for &c in &members {
            let count = counts.get_mut(c).ok_or(Error::UnknownCandidate(c))?;
            if *count > 0 && !allow_copies {
                return Err(Error::Validation(format!("candidate {c} selected twice")));
            }
            *count += 1;
        }
        Ok(Self {
            members,
            allow_copies,
            counts,
        })
    }

    /// Members in selection order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn allow_copies(&self) -> bool {
        self.allow_copies
    }

    pub fn multiplicity(&self, c: usize) -> u32 {
        self.counts.get(c).copied().unwrap_or(0)
    }

    pub fn contains(&self, c: usize) -> bool {
        self.multiplicity(c) > 0
    }

    /// Whether `c` is treated as a non-selected candidate by the measures.
    /// With copies allowed every candidate qualifies, since another copy
    /// could always be added.
    pub fn is_open(&self, c: usize) -> bool {
        self.allow_copies || !self.contains(c)
    }

    /// `|A_v ∩ W|`, counting multiplicity.
    pub fn satisfaction(&self, ballot: &[usize]) -> u32 {
        ballot.iter().map(|&c| self.multiplicity(c)).sum()
    }

    pub fn satisfactions(&self, election: &Election) -> Vec<u32> {
        election
            .ballots()
            .iter()
            .map(|b| self.satisfaction(b))
            .collect()
    }

    /// Distinct members sorted by index.
    pub fn distinct(&self) -> Vec<usize> {
        (0..self.counts.len())
            .filter(|&c| self.counts[c] > 0)
            .collect()
    }
}

/// Split of voter weight across committee seats.
///
/// Seats are positions in [`Committee::members`], so copies of the same
/// candidate are backed independently.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteAssignment {
    seats: Vec<usize>,
    entries: Vec<Vec<(usize, f64)>>,
}

impl VoteAssignment {
    /// `seats[s]` is the candidate occupying seat `s`; `entries[v]` lists
    /// `(seat, amount)` pairs of voter `v`.
    pub fn new(seats: Vec<usize>, entries: Vec<Vec<(usize, f64)>>) -> Self {
        Self { seats, entries }
    }

    pub fn seats(&self) -> &[usize] {
        &self.seats
    }

    pub fn entries(&self) -> &[Vec<(usize, f64)>] {
        &self.entries
    }

    pub fn voter_entries(&self, v: usize) -> &[(usize, f64)] {
        &self.entries[v]
    }

    /// Backing weight of every seat.
    pub fn backing(&self) -> Vec<f64> {
        let mut backing = vec![0.0; self.seats.len()];
        for row in &self.entries {
            for &(s, a) in row {
                backing[s] += a;
            }
        }
        backing
    }

    pub fn assigned(&self, v: usize) -> f64 {
        self.entries[v].iter().map(|&(_, a)| a).sum()
    }

    /// Violations of the assignment constraints. With `complete`, voters
    /// approving some seat must have their full weight assigned.
    pub fn violations(&self, election: &Election, complete: bool, tolerance: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.entries.len() != election.num_voters() {
            out.push("assignment does not cover every voter".to_string());
            return out;
        }
        for (v, row) in self.entries.iter().enumerate() {
            let ballot = election.ballot(v);
            let approves_any = self.seats.iter().any(|c| ballot.contains(c));
            for &(s, a) in row {
                if a < -tolerance {
                    out.push(format!("negative amount for voter {v}"));
                }
                let Some(&c) = self.seats.get(s) else {
                    out.push(format!("voter {v} assigned to unknown seat {s}"));
                    continue;
                };
                if a > tolerance && !ballot.contains(&c) {
                    out.push(format!("voter {v} backs unapproved candidate {c}"));
                }
            }
            let assigned = self.assigned(v);
            let w = election.weight(v);
            if assigned > w + tolerance {
                out.push(format!("voter {v} assigns {assigned} > weight {w}"));
            }
            if complete && approves_any && (assigned - w).abs() > tolerance {
                out.push(format!(
                    "voter {v} assigns {assigned}, expected full weight {w}"
                ));
            }
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Election;

    /// c1..c3; v1 (0.5) {c1}, v2 (0.3) {c1,c2}, v3 (0.2) {c3}; k = 2.
    pub fn e1() -> Election {
        Election::from_ballots(3, 2, &[0.5, 0.3, 0.2], &[&[0], &[0, 1], &[2]]).unwrap()
    }

    /// v1 (0.5) {c1,c2}, v2 (0.5) {c3}; k = 2.
    pub fn e3() -> Election {
        Election::from_ballots(3, 2, &[0.5, 0.5], &[&[0, 1], &[2]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{e1, e3};
    use super::*;

    fn weights_of(raw: &[f64]) -> Vec<f64> {
        let ballots: Vec<&[usize]> = raw.iter().map(|_| &[][..]).collect();
        Election::from_ballots(1, 1, raw, &ballots)
            .unwrap()
            .normalize()
            .unwrap()
            .weights()
            .to_vec()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(weights_of(&[2.0, 2.0]), vec![0.5, 0.5]);
        assert_eq!(weights_of(&[1.0, 3.0]), vec![0.25, 0.75]);
        let w = weights_of(&[5.0, 3.0, 2.0]);
        for (a, b) in w.iter().zip([0.5, 0.3, 0.2]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_zero_weight() {
        let e = Election::from_ballots(1, 1, &[0.0, 0.0], &[&[0], &[]]).unwrap();
        assert!(matches!(e.normalize(), Err(Error::Validation(_))));
    }

    #[test]
    fn approval_weight_examples() {
        let e = e1();
        assert!((e.approval_weight(&[0]).unwrap() - 0.8).abs() < 1e-15);
        assert!((e.approval_weight(&[0, 1]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(e.approval_weight(&[]).unwrap(), 0.0);
        assert_eq!(e.approval_weight(&[7]), Err(Error::UnknownCandidate(7)));
    }

    #[test]
    fn supporters_examples() {
        let e = e1();
        assert_eq!(e.supporters(0).unwrap(), &[0, 1]);
        assert_eq!(e.supporters(2).unwrap(), &[2]);
        let lonely = Election::from_ballots(2, 1, &[1.0], &[&[0]]).unwrap();
        assert!(lonely.supporters(1).unwrap().is_empty());
        assert!(lonely.supporters(2).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(e1().validate().is_empty());
        assert!(e3().validate().is_empty());
        assert_eq!(e1().with_k(5).validate(), vec!["k exceeds candidate count"]);
        let dup = Election::from_ballots(2, 1, &[1.0], &[&[0, 0]]).unwrap();
        let v = dup.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("duplicate approval"));
        let capped = e1().with_ballot_cap(Some(1));
        assert_eq!(capped.validate().len(), 1);
    }

    #[test]
    fn ballot_index_out_of_range_is_rejected() {
        assert_eq!(
            Election::from_ballots(2, 1, &[1.0], &[&[3]]),
            Err(Error::UnknownCandidate(3))
        );
    }

    #[test]
    fn empty_ballots_count_towards_total_only() {
        let e = Election::from_ballots(2, 1, &[1.0, 1.0], &[&[0], &[]])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(e.approval_weight(&[0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn committee_multiplicity() {
        assert!(Committee::new(vec![0, 0], 2, false).is_err());
        let w = Committee::new(vec![0, 0, 1], 2, true).unwrap();
        assert_eq!(w.satisfaction(&[0]), 2);
        assert_eq!(w.satisfaction(&[0, 1]), 3);
        assert!(w.is_open(0));
        let plain = Committee::new(vec![1], 2, false).unwrap();
        assert!(!plain.is_open(1));
        assert!(plain.is_open(0));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn election_strategy() -> impl Strategy<Value = Election> {
        (1usize..6, 1usize..8).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(0.0f64..10.0, n),
                proptest::collection::vec(proptest::collection::btree_set(0..m, 0..=m), n),
            )
                .prop_map(move |(mut weights, ballots)| {
                    weights[0] += 0.5;
                    let ballots: Vec<Vec<usize>> = ballots
                        .into_iter()
                        .map(|b| b.into_iter().collect())
                        .collect();
                    Election::new(
                        (0..m).map(|c| format!("c{c}")).collect(),
                        (0..n).map(|v| format!("v{v}")).collect(),
                        weights,
                        ballots,
                        1,
                        None,
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(e in election_strategy()) {
            let once = e.normalize().unwrap();
            let twice = once.normalize().unwrap();
            prop_assert_eq!(once.weights(), twice.weights());
            prop_assert!((once.total_weight() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn approval_weight_is_monotone(e in election_strategy(), mask in proptest::collection::vec(any::<(bool, bool)>(), 6)) {
            let m = e.num_candidates();
            let small: Vec<usize> = (0..m).filter(|&c| mask[c].0 && mask[c].1).collect();
            let large: Vec<usize> = (0..m).filter(|&c| mask[c].0).collect();
            prop_assert!(e.approval_weight(&small).unwrap() <= e.approval_weight(&large).unwrap() + 1e-12);
        }

        #[test]
        fn full_set_weight_is_nonempty_ballot_weight(e in election_strategy()) {
            let all: Vec<usize> = (0..e.num_candidates()).collect();
            let expected: f64 = e.ballots().iter().zip(e.weights()).filter(|(b, _)| !b.is_empty()).map(|(_, w)| w).sum();
            prop_assert!((e.approval_weight(&all).unwrap() - expected).abs() < 1e-12);
        }
    }
}
