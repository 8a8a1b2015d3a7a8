use super::{exceeds, touched_candidates, Outcome, RuleId, RuleOptions};
use crate::election::Election;
use crate::error::Result;

fn marginal(election: &Election, c: usize, satisfaction: &[u32]) -> f64 {
    election
        .supporters_of(c)
        .iter()
        .map(|&v| election.weight(v) / f64::from(satisfaction[v] + 1))
        .sum()
}

/// Sequential PAV: greedily adds the candidate with the largest marginal
/// increase of the harmonic PAV score. The trace records each marginal.
pub fn run_seq_pav(election: &Election, options: &RuleOptions) -> Result<Outcome> {
    let m = election.num_candidates();
    let mut satisfaction = vec![0u32; election.num_voters()];
    let mut open = vec![true; m];
    let mut scores: Vec<f64> = (0..m)
        .map(|c| marginal(election, c, &satisfaction))
        .collect();
    let mut order = Vec::with_capacity(election.k());
    let mut per_round = Vec::with_capacity(election.k());

    for _ in 0..election.k() {
        let mut best: Option<usize> = None;
        for c in (0..m).filter(|&c| open[c]) {
            if best.is_none_or(|b| exceeds(scores[c], scores[b])) {
                best = Some(c);
            }
        }
        let Some(chosen) = best else { break };
        order.push(chosen);
        per_round.push(scores[chosen]);
        if !options.allow_copies {
            open[chosen] = false;
        }
        let supporters = election.supporters_of(chosen);
        for &v in supporters {
            satisfaction[v] += 1;
        }
        let mut dirty = vec![false; m];
        touched_candidates(election, supporters, &mut dirty);
        for c in (0..m).filter(|&c| dirty[c]) {
            scores[c] = marginal(election, c, &satisfaction);
        }
    }
    Outcome::sequential(
        election,
        RuleId::SeqPav,
        order,
        per_round,
        options.allow_copies,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;
    use crate::rules::run_av;

    #[test]
    fn seq_pav_on_e1() {
        let out = run_seq_pav(&e1(), &RuleOptions::default()).unwrap();
        assert_eq!(out.trace.order, vec![0, 2]);
        assert!((out.trace.per_round[0] - 0.8).abs() < 1e-15);
        assert!((out.trace.per_round[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn seq_pav_three_replacement_figure() {
        let w = 2.0 / 3.0;
        let e =
            Election::from_ballots(3, 3, &[w, w, w, w], &[&[0, 2], &[0, 1], &[1], &[2]]).unwrap();
        let out = run_seq_pav(&e, &RuleOptions::default()).unwrap();
        assert_eq!(out.trace.order, vec![0, 1, 2]);
        let expected = [4.0 / 3.0, 1.0, 1.0];
        for (got, want) in out.trace.per_round.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn k1_matches_av() {
        let e = e1().with_k(1);
        assert_eq!(
            run_seq_pav(&e, &RuleOptions::default())
                .unwrap()
                .trace
                .order,
            run_av(&e).unwrap().trace.order
        );
    }

    #[test]
    fn copies_can_repeat_a_candidate() {
        let e = Election::from_ballots(2, 3, &[0.9, 0.1], &[&[0], &[1]]).unwrap();
        let out = run_seq_pav(&e, &RuleOptions::with_copies()).unwrap();
        assert_eq!(out.trace.order, vec![0, 0, 0]);
        assert_eq!(out.committee.multiplicity(0), 3);
    }
}
