use super::seq_phragmen::PhragmenClock;
use super::{exceeds, touched_candidates, Outcome, Phase, RuleId, RuleOptions, SelectionTrace};
use crate::election::{Committee, Election};
use crate::error::{Error, Result};

/// Budget shortfall tolerated when deciding affordability.
const AFFORD_TOL: f64 = 1e-12;

/// Smallest `q` with `Σ min(b_v, q) ≥ 1` over the supporters, if any.
fn min_q(election: &Election, c: usize, budgets: &[f64]) -> Option<f64> {
    let mut held: Vec<f64> = election
        .supporters_of(c)
        .iter()
        .map(|&v| budgets[v])
        .filter(|&b| b > 0.0)
        .collect();
    let total: f64 = held.iter().sum();
    if total < 1.0 - AFFORD_TOL {
        return None;
    }
    held.sort_by(f64::total_cmp);
    let mut need = 1.0;
    for (i, &b) in held.iter().enumerate() {
        let payers = (held.len() - i) as f64;
        if b * payers >= need {
            return Some(need / payers);
        }
        need -= b;
    }
    held.last().copied()
}

/// Method of equal shares with seq-Phragmén completion.
///
/// Each voter starts with `k·w(v)` (relative to the total weight). When no
/// candidate is affordable any more, leftover budgets seed the money of a
/// seq-Phragmén run that fills the remaining seats.
pub fn run_mes(election: &Election, options: &RuleOptions) -> Result<Outcome> {
    let k = election.k();
    let m = election.num_candidates();
    let total = election.total_weight();
    let mut budgets: Vec<f64> = election
        .weights()
        .iter()
        .map(|&w| k as f64 * w / total)
        .collect();
    let mut open = vec![true; m];
    let mut qs: Vec<Option<f64>> = (0..m).map(|c| min_q(election, c, &budgets)).collect();
    let mut order = Vec::with_capacity(k);
    let mut per_round = Vec::with_capacity(k);
    let mut phase = Vec::with_capacity(k);

    while order.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..m).filter(|&c| open[c]) {
            if let Some(q) = qs[c] {
                if best.is_none_or(|(_, bq)| exceeds(bq, q)) {
                    best = Some((c, q));
                }
            }
        }
        let Some((chosen, q)) = best else { break };
        order.push(chosen);
        per_round.push(q);
        phase.push(Phase::Mes);
        if !options.allow_copies {
            open[chosen] = false;
        }
        let supporters = election.supporters_of(chosen);
        for &v in supporters {
            budgets[v] = (budgets[v] - q).max(0.0);
        }
        let mut dirty = vec![false; m];
        touched_candidates(election, supporters, &mut dirty);
        for c in (0..m).filter(|&c| dirty[c]) {
            qs[c] = min_q(election, c, &budgets);
        }
    }

    if order.len() < k {
        let mut clock = PhragmenClock::new(election, Some(&budgets), open, options.allow_copies);
        while order.len() < k {
            let (c, t) = clock.step().ok_or(Error::InsufficientElectable {
                filled: order.len(),
                k,
            })?;
            order.push(c);
            per_round.push(t);
            phase.push(Phase::Completion);
        }
    }

    Ok(Outcome {
        committee: Committee::new(order.clone(), m, options.allow_copies)?,
        trace: SelectionTrace {
            rule: RuleId::Mes,
            order,
            per_round,
            phase: Some(phase),
        },
        assignment: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;

    #[test]
    fn e1_mes_then_completion() {
        let out = run_mes(&e1(), &RuleOptions::default()).unwrap();
        assert_eq!(out.trace.order, vec![0, 1]);
        assert!((out.trace.per_round[0] - 0.5).abs() < 1e-12);
        assert!((out.trace.per_round[1] - 3.0).abs() < 1e-9);
        assert_eq!(out.trace.phase, Some(vec![Phase::Mes, Phase::Completion]));
    }

    #[test]
    fn single_voter_pays_in_full() {
        let e = Election::from_ballots(1, 1, &[1.0], &[&[0]]).unwrap();
        let out = run_mes(&e, &RuleOptions::default()).unwrap();
        assert_eq!(out.trace.order, vec![0]);
        assert_eq!(out.trace.per_round, vec![1.0]);
    }

    #[test]
    fn party_list_gets_one_seat_each() {
        let e = Election::from_ballots(4, 2, &[0.5, 0.5], &[&[0, 1], &[2, 3]]).unwrap();
        let out = run_mes(&e, &RuleOptions::default()).unwrap();
        assert_eq!(out.committee.members(), &[0, 2]);
        assert_eq!(out.trace.phase, Some(vec![Phase::Mes, Phase::Mes]));
    }

    #[test]
    fn min_q_water_level() {
        let e = Election::from_ballots(1, 1, &[0.2, 0.3, 0.5], &[&[0], &[0], &[0]]).unwrap();
        let q = min_q(&e, 0, &[0.1, 1.0, 1.0]).unwrap();
        assert!((q - 0.45).abs() < 1e-15);
        assert_eq!(min_q(&e, 0, &[0.1, 0.2, 0.3]), None);
    }
}
