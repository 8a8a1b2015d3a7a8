use super::{Outcome, RuleId};
use crate::election::Election;
use crate::error::Result;

/// Top-k candidates by score; equal scores go to the smaller index.
fn top_k(election: &Election, rule: RuleId, scores: Vec<f64>) -> Result<Outcome> {
    let mut ranked: Vec<usize> = (0..scores.len()).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ranked.truncate(election.k());
    let per_round = ranked.iter().map(|&c| scores[c]).collect();
    Outcome::sequential(election, rule, ranked, per_round, false)
}

/// Approval voting: the k candidates of highest approval weight.
pub fn run_av(election: &Election) -> Result<Outcome> {
    let scores = (0..election.num_candidates())
        .map(|c| election.candidate_weight(c))
        .collect();
    top_k(election, RuleId::Av, scores)
}

/// Satisfaction approval voting: every voter splits its weight evenly over
/// its ballot.
pub fn run_sav(election: &Election) -> Result<Outcome> {
    let mut scores = vec![0.0; election.num_candidates()];
    for (ballot, &w) in election.ballots().iter().zip(election.weights()) {
        if ballot.is_empty() {
            continue;
        }
        let share = w / ballot.len() as f64;
        for &c in ballot {
            scores[c] += share;
        }
    }
    top_k(election, RuleId::Sav, scores)
}
