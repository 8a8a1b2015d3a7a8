use super::balance::Balancer;
use super::{exceeds, touched_candidates, Outcome, RuleId, RuleOptions};
use crate::election::{Election, VoteAssignment};
use crate::error::{Error, Result};

/// Largest backing `t` that `c` could receive if its supporters moved stake
/// away from seats backed above `t`, scaling each such seat down to exactly
/// `t` at most.
///
/// With `a_s` the stake the supporters of `c` currently give seat `s` and
/// `b_s` its backing, a supporter set can free
/// `S(t) = w(V_c) − Σ_s a_s · min(1, t / b_s)`; the score is the fixed point
/// `S(t) = t`. `S` is piecewise linear with breakpoints at the backings, so
/// the crossing is found by walking the sorted breakpoints.
fn score_with<'e>(
    election: &Election,
    c: usize,
    entries: impl Fn(usize) -> &'e [(usize, f64)],
    backing: &[f64],
    pooled: &mut [f64],
    touched: &mut Vec<usize>,
) -> f64 {
    let mut weight = 0.0;
    for &v in election.supporters_of(c) {
        weight += election.weight(v);
        for &(s, a) in entries(v) {
            if a > 0.0 {
                if pooled[s] == 0.0 {
                    touched.push(s);
                }
                pooled[s] += a;
            }
        }
    }
    let mut pieces: Vec<(f64, f64)> = touched.iter().map(|&s| (backing[s], pooled[s])).collect();
    for s in touched.drain(..) {
        pooled[s] = 0.0;
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    // suffix[j] = Σ_{i ≥ j} a_i / b_i
    let mut suffix = vec![0.0; pieces.len() + 1];
    for j in (0..pieces.len()).rev() {
        suffix[j] = suffix[j + 1] + pieces[j].1 / pieces[j].0;
    }
    let mut low = 0.0;
    for j in 0..=pieces.len() {
        let t = (weight - low) / (1.0 + suffix[j]);
        match pieces.get(j) {
            Some(&(b, a)) if t > b => low += a,
            _ => return t.max(0.0),
        }
    }
    unreachable!("the last piece always returns")
}

/// Phragmms score of `c` against an existing assignment.
pub fn phragmms_score(election: &Election, c: usize, assignment: &VoteAssignment) -> f64 {
    let backing = assignment.backing();
    let mut pooled = vec![0.0; backing.len()];
    score_with(
        election,
        c,
        |v| assignment.voter_entries(v),
        &backing,
        &mut pooled,
        &mut Vec::new(),
    )
}

/// Phragmms: repeatedly elect the candidate of highest score, then
/// rebalance the vote assignment of the grown committee.
pub fn run_phragmms(election: &Election, options: &RuleOptions) -> Result<Outcome> {
    let m = election.num_candidates();
    let k = election.k();
    let mut balancer = Balancer::new(election, options.balance.clone());
    let mut open = vec![true; m];
    let mut pooled = vec![0.0; k];
    let mut touched = Vec::new();
    let mut scores: Vec<f64> = (0..m).map(|c| election.candidate_weight(c)).collect();
    let mut order = Vec::with_capacity(k);
    let mut per_round = Vec::with_capacity(k);

    for _ in 0..k {
        let mut best: Option<usize> = None;
        for c in (0..m).filter(|&c| open[c]) {
            if best.is_none_or(|b| exceeds(scores[c], scores[b])) {
                best = Some(c);
            }
        }
        let chosen = best.ok_or(Error::InsufficientElectable {
            filled: order.len(),
            k,
        })?;
        order.push(chosen);
        per_round.push(scores[chosen]);
        if !options.allow_copies {
            open[chosen] = false;
        }
        let component = balancer.add_seat(chosen).to_vec();
        let mut dirty = vec![false; m];
        touched_candidates(election, &component, &mut dirty);
        for c in (0..m).filter(|&c| dirty[c] && open[c]) {
            scores[c] = score_with(
                election,
                c,
                |v| balancer.voter_entries(v),
                balancer.backing(),
                &mut pooled,
                &mut touched,
            );
        }
    }

    let mut outcome = Outcome::sequential(
        election,
        RuleId::Phragmms,
        order,
        per_round,
        options.allow_copies,
    )?;
    outcome.assignment = Some(balancer.assignment());
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;
    use crate::election::Committee;
    use crate::rules::{balanced_assignment, run_seq_phragmen};

    #[test]
    fn e1_second_round_reclaims_stake_from_c1() {
        let out = run_phragmms(&e1(), &RuleOptions::default()).unwrap();
        assert_eq!(out.trace.order, vec![0, 1]);
        assert!((out.trace.per_round[0] - 0.8).abs() < 1e-15);
        // 0.3 − 0.3·t/0.8 = t  ⇒  t = 12/55
        assert!((out.trace.per_round[1] - 12.0 / 55.0).abs() < 1e-12);
    }

    #[test]
    fn empty_committee_scores_are_approval_weights() {
        let e = e1();
        let empty = VoteAssignment::new(Vec::new(), vec![Vec::new(); 3]);
        for c in 0..3 {
            assert!((phragmms_score(&e, c, &empty) - e.candidate_weight(c)).abs() < 1e-15);
        }
    }

    #[test]
    fn score_against_balanced_assignment() {
        let e = e1();
        let w = Committee::new(vec![0], 3, false).unwrap();
        let a = balanced_assignment(&e, &w);
        assert!((phragmms_score(&e, 1, &a) - 12.0 / 55.0).abs() < 1e-12);
        assert!((phragmms_score(&e, 2, &a) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn disjoint_parties_match_seq_phragmen() {
        let e = Election::from_ballots(5, 4, &[0.5, 0.3, 0.2], &[&[0, 1], &[2, 3], &[4]]).unwrap();
        let a = run_phragmms(&e, &RuleOptions::default()).unwrap();
        let b = run_seq_phragmen(&e, &RuleOptions::default(), None).unwrap();
        assert_eq!(a.committee.members(), b.committee.members());
    }

    #[test]
    fn assignment_is_complete() {
        let e = e1();
        let out = run_phragmms(&e, &RuleOptions::default()).unwrap();
        let a = out.assignment.unwrap();
        assert!(a.violations(&e, true, 1e-9).is_empty());
    }
}
