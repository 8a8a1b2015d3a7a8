//! Overrepresentation and attack-cost measures: minimum approval weight of
//! committee subsets, maximin support, stake-lost curves and replacement
//! costs.

mod maximin;
mod replacement;
mod subset;

pub use maximin::{maximin_support, MaximinSupport};
pub use replacement::{
    extend_election, replacement_cost, seqpav_replacement_lp, ReplacementQuote, SeqPavLp,
    WitnessVoter, SEQPAV_LP_MAX_ELL,
};
pub use subset::{min_approval_weight_subset, SubsetMethod, SubsetWeightResult, ENUMERATION_LIMIT};

use crate::election::VoteAssignment;

/// `curve[ℓ-1]` is the sum of the ℓ smallest backings under `assignment`.
pub fn stake_lost_curve(assignment: &VoteAssignment) -> Vec<f64> {
    let mut backing = assignment.backing();
    backing.sort_by(f64::total_cmp);
    backing
        .iter()
        .scan(0.0, |acc, &b| {
            *acc += b;
            Some(*acc)
        })
        .collect()
}

/// Population variance of the backings.
pub fn backing_variance(assignment: &VoteAssignment) -> f64 {
    let backing = assignment.backing();
    if backing.is_empty() {
        return 0.0;
    }
    let n = backing.len() as f64;
    let mean = backing.iter().sum::<f64>() / n;
    backing.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / n
}
