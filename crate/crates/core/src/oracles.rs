//! Exhaustive reference implementations over exact rationals.
//!
//! Everything here is exponential and only meant for cross-checking the
//! fast paths on tiny instances; each function refuses inputs above its
//! size limit.

use num::{BigRational, ToPrimitive, Zero};

use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::rules::{run_rule, RuleId, RuleOptions};
use crate::security::{extend_election, WitnessVoter};

pub const MAX_SUPPORTERS: usize = 12;
pub const MAX_SUBSET_COMMITTEE: usize = 20;
pub const MAX_MMS_COMMITTEE: usize = 12;

/// An election's weights as exact rationals (each float converted exactly).
#[derive(Debug, Clone)]
pub struct RationalElection<'a> {
    pub election: &'a Election,
    pub weights: Vec<BigRational>,
    pub total: BigRational,
}

impl<'a> RationalElection<'a> {
    pub fn new(election: &'a Election) -> Result<Self> {
        let weights = election
            .weights()
            .iter()
            .map(|&w| {
                BigRational::from_float(w)
                    .ok_or_else(|| Error::Validation(format!("weight {w} is not finite")))
            })
            .collect::<Result<Vec<_>>>()?;
        let total = weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
        Ok(Self {
            election,
            weights,
            total,
        })
    }

    /// `ℓ/k` of the total weight.
    pub fn threshold(&self, ell: usize) -> BigRational {
        let k = self.election.k();
        self.total.clone() * BigRational::new(ell.into(), k.into())
    }

    fn weight_of_voters(&self, voters: impl Iterator<Item = usize>) -> BigRational {
        voters.fold(BigRational::zero(), |acc, v| acc + &self.weights[v])
    }

    /// Approval weight of a candidate set.
    pub fn approval_weight(&self, set: &[usize]) -> BigRational {
        let voters = (0..self.election.num_voters())
            .filter(|&v| self.election.ballot(v).iter().any(|c| set.contains(c)));
        self.weight_of_voters(voters)
    }
}

/// Exact minimum average satisfaction over all ℓ-supporting groups of open
/// candidates, by enumerating every subset of every supporter set.
pub fn brute_min_avg_satisfaction(
    election: &Election,
    committee: &Committee,
    ell: usize,
) -> Result<Option<BigRational>> {
    let re = RationalElection::new(election)?;
    let threshold = re.threshold(ell);
    let satisfaction = committee.satisfactions(election);
    let mut best: Option<BigRational> = None;
    for c in (0..election.num_candidates()).filter(|&c| committee.is_open(c)) {
        let supporters: Vec<usize> = election
            .supporters_of(c)
            .iter()
            .copied()
            .filter(|&v| election.weight(v) > 0.0)
            .collect();
        if supporters.len() > MAX_SUPPORTERS {
            return Err(Error::TooLarge(format!(
                "candidate {c} has {} supporters, limit {MAX_SUPPORTERS}",
                supporters.len()
            )));
        }
        for mask in 1u32..(1 << supporters.len()) {
            let group = supporters
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v);
            let mut weight = BigRational::zero();
            let mut sum = BigRational::zero();
            for v in group {
                weight += &re.weights[v];
                sum += &re.weights[v] * BigRational::from_integer(satisfaction[v].into());
            }
            if weight < threshold {
                continue;
            }
            let avg = sum / weight;
            if best.as_ref().is_none_or(|b| &avg < b) {
                best = Some(avg);
            }
        }
    }
    Ok(best)
}

/// Exact minimum approval weight over all ℓ-subsets of the distinct
/// committee members.
pub fn brute_min_subset_weight(
    election: &Election,
    committee: &Committee,
    ell: usize,
) -> Result<BigRational> {
    let winners = committee.distinct();
    if winners.len() > MAX_SUBSET_COMMITTEE {
        return Err(Error::TooLarge(format!(
            "{} winners, limit {MAX_SUBSET_COMMITTEE}",
            winners.len()
        )));
    }
    if ell == 0 || ell > winners.len() {
        return Err(Error::InvalidParameter(format!(
            "ℓ = {ell} outside 1..={}",
            winners.len()
        )));
    }
    let re = RationalElection::new(election)?;
    let mut best: Option<BigRational> = None;
    for mask in 1u32..(1 << winners.len()) {
        if mask.count_ones() as usize != ell {
            continue;
        }
        let set: Vec<usize> = (0..winners.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| winners[i])
            .collect();
        let w = re.approval_weight(&set);
        if best.as_ref().is_none_or(|b| &w < b) {
            best = Some(w);
        }
    }
    Ok(best.expect("ℓ is in range"))
}

/// Maximin support value as `min w(W') / |W'|` over nonempty `W' ⊆ W`,
/// counting copies in `|W'|`.
pub fn brute_maximin_support(election: &Election, committee: &Committee) -> Result<BigRational> {
    let winners = committee.distinct();
    if winners.is_empty() {
        return Err(Error::InvalidParameter("empty committee".into()));
    }
    if winners.len() > MAX_MMS_COMMITTEE {
        return Err(Error::TooLarge(format!(
            "{} winners, limit {MAX_MMS_COMMITTEE}",
            winners.len()
        )));
    }
    let re = RationalElection::new(election)?;
    let mut best: Option<BigRational> = None;
    for mask in 1u32..(1 << winners.len()) {
        let set: Vec<usize> = (0..winners.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| winners[i])
            .collect();
        let seats: u32 = set.iter().map(|&c| committee.multiplicity(c)).sum();
        let avg = re.approval_weight(&set) / BigRational::from_integer(seats.into());
        if best.as_ref().is_none_or(|b| &avg < b) {
            best = Some(avg);
        }
    }
    Ok(best.expect("nonempty committee"))
}

/// Reruns `rule` with `ell` new candidates and the given new voters, and
/// reports whether every new candidate is elected.
pub fn brute_replacement_check(
    rule: RuleId,
    election: &Election,
    ell: usize,
    replacement: &[WitnessVoter],
) -> Result<bool> {
    let extended = extend_election(election, ell, replacement)?;
    let outcome = run_rule(rule, &extended, &RuleOptions::default())?;
    Ok((0..ell).all(|c| outcome.committee.contains(c)))
}

/// Converts an oracle value for comparison with a float result.
pub fn as_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `true` if `a` and `b` agree within `tol` relative to `max(1, |b|)`.
pub fn close(a: f64, b: &BigRational, tol: f64) -> bool {
    let b = as_f64(b);
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::{e1, e3};
    use crate::rules::run_av;

    fn committee(e: &Election, members: &[usize]) -> Committee {
        Committee::new(members.to_vec(), e.num_candidates(), false).unwrap()
    }

    #[test]
    fn e3_values() {
        let e = e3();
        let w = committee(&e, &[0, 1]);
        assert_eq!(
            brute_min_avg_satisfaction(&e, &w, 1).unwrap(),
            Some(BigRational::zero())
        );
        assert_eq!(brute_min_avg_satisfaction(&e, &w, 2).unwrap(), None);
        assert_eq!(as_f64(&brute_min_subset_weight(&e, &w, 2).unwrap()), 0.5);
        assert_eq!(as_f64(&brute_maximin_support(&e, &w).unwrap()), 0.25);
    }

    #[test]
    fn single_subset_is_min_weight() {
        let e = e1();
        let w = committee(&e, &[0, 1, 2]);
        assert_eq!(as_f64(&brute_min_subset_weight(&e, &w, 1).unwrap()), 0.2);
    }

    #[test]
    fn disjoint_mms_is_min_weight() {
        let e = Election::from_ballots(3, 3, &[0.5, 0.3, 0.2], &[&[0], &[1], &[2]]).unwrap();
        let w = committee(&e, &[0, 1, 2]);
        assert_eq!(as_f64(&brute_maximin_support(&e, &w).unwrap()), 0.2);
    }

    #[test]
    fn av_replacement_on_e1() {
        let e = e1();
        let x = run_av(&e).unwrap().trace.per_round[1];
        let voter = |weight| {
            vec![WitnessVoter {
                weight,
                approvals: vec![0],
            }]
        };
        assert!(brute_replacement_check(RuleId::Av, &e, 1, &voter(x)).unwrap());
        assert!(!brute_replacement_check(RuleId::Av, &e, 1, &voter(x - 1e-3)).unwrap());
        assert!(!brute_replacement_check(RuleId::Av, &e, 1, &voter(0.0)).unwrap());
    }

    #[test]
    fn refuses_large_inputs() {
        let weights = vec![1.0 / 13.0; 13];
        let ballots: Vec<&[usize]> = vec![&[1]; 13];
        let e = Election::from_ballots(2, 1, &weights, &ballots).unwrap();
        let w = committee(&e, &[0]);
        assert!(matches!(
            brute_min_avg_satisfaction(&e, &w, 1),
            Err(Error::TooLarge(_))
        ));
    }
}
