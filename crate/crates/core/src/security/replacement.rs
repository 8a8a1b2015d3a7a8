//! Exogenous replacement costs: the least total weight of new voters that,
//! together with ℓ new candidates, gets all new candidates elected.

use crate::election::Election;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense};
use crate::rules::{RuleId, SelectionTrace};

/// A new voter: weight and the positions `0..ℓ` of the new candidates it
/// approves.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVoter {
    pub weight: f64,
    pub approvals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementQuote {
    pub rule: RuleId,
    pub ell: usize,
    pub cost: f64,
    pub ballot_cap: Option<usize>,
    pub witness: Vec<WitnessVoter>,
}

impl ReplacementQuote {
    /// The same witness with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Vec<WitnessVoter> {
        self.witness
            .iter()
            .map(|v| WitnessVoter {
                weight: v.weight * factor,
                approvals: v.approvals.clone(),
            })
            .collect()
    }
}

/// Adds `ell` new candidates in front of the existing ones (so they win
/// lexicographic ties) and appends `voters`. Existing candidate `c` becomes
/// `c + ell`. Weights are kept as given, without renormalising.
pub fn extend_election(
    election: &Election,
    ell: usize,
    voters: &[WitnessVoter],
) -> Result<Election> {
    let mut candidates: Vec<String> = (1..=ell).map(|i| format!("new{i}")).collect();
    candidates.extend(election.candidates().iter().cloned());
    let mut ids = election.voters().to_vec();
    let mut weights = election.weights().to_vec();
    let mut ballots: Vec<Vec<usize>> = election
        .ballots()
        .iter()
        .map(|b| b.iter().map(|&c| c + ell).collect())
        .collect();
    for (i, v) in voters.iter().enumerate() {
        if let Some(&bad) = v.approvals.iter().find(|&&c| c >= ell) {
            return Err(Error::UnknownCandidate(bad));
        }
        ids.push(format!("attacker{}", i + 1));
        weights.push(v.weight);
        ballots.push(v.approvals.clone());
    }
    Election::new(
        candidates,
        ids,
        weights,
        ballots,
        election.k(),
        election.ballot_cap(),
    )
}

fn singletons(ell: usize, weight: f64) -> Vec<WitnessVoter> {
    (0..ell)
        .map(|i| WitnessVoter {
            weight,
            approvals: vec![i],
        })
        .collect()
}

/// Minimum cost of an ℓ-replacement from the trace of the original run.
pub fn replacement_cost(
    rule: RuleId,
    trace: &SelectionTrace,
    ell: usize,
    ballot_cap: Option<usize>,
) -> Result<ReplacementQuote> {
    if trace.rule != rule {
        return Err(Error::InvalidParameter(format!(
            "trace was produced by {}, not {}",
            trace.rule, rule
        )));
    }
    let k = trace.order.len();
    if ell == 0 || ell > k || trace.per_round.len() != k {
        return Err(Error::InvalidParameter(format!(
            "ℓ = {ell} outside 1..={k}"
        )));
    }
    if ballot_cap == Some(0) {
        return Err(Error::InvalidParameter(
            "ballot cap must be positive".into(),
        ));
    }
    // c_{k−ℓ+1}, zero-based
    let pivot = k - ell;
    let (cost, witness) = match rule {
        RuleId::Av => {
            let x = trace.per_round[pivot];
            let per_ballot = ballot_cap.unwrap_or(ell).min(ell);
            let witness: Vec<WitnessVoter> = (0..ell)
                .step_by(per_ballot)
                .map(|start| WitnessVoter {
                    weight: x,
                    approvals: (start..(start + per_ballot).min(ell)).collect(),
                })
                .collect();
            (witness.len() as f64 * x, witness)
        }
        RuleId::Sav => {
            let x = trace.per_round[pivot];
            (ell as f64 * x, singletons(ell, x))
        }
        RuleId::SeqPhragmen => {
            let t = trace.per_round[pivot];
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "election time {t} is not positive"
                )));
            }
            (ell as f64 / t, singletons(ell, 1.0 / t))
        }
        RuleId::Phragmms => {
            let s = trace.per_round[..=pivot]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            (ell as f64 * s, singletons(ell, s))
        }
        RuleId::SeqPav => {
            return Err(Error::ReplacementUnsupported {
                rule: "seq-pav",
                reason: "the optimum needs the subset LP; use seqpav_replacement_lp".into(),
            })
        }
        RuleId::Mes => {
            return Err(Error::ReplacementUnsupported {
                rule: "mes",
                reason: "MES is not candidate monotone with additional voters".into(),
            })
        }
    };
    Ok(ReplacementQuote {
        rule,
        ell,
        cost,
        ballot_cap,
        witness,
    })
}

/// Largest ℓ accepted by [`seqpav_replacement_lp`].
pub const SEQPAV_LP_MAX_ELL: usize = 21;

#[derive(Debug, Clone, PartialEq)]
pub struct SeqPavLp {
    pub ell: usize,
    /// Minimum replacement weight for a marginal score of 1 to beat.
    pub value: f64,
    /// Positive `y(S)`, with `S` as a bit mask over `c_1..c_ℓ` (bit `i` is
    /// `c_{i+1}`).
    pub voters: Vec<(u32, f64)>,
}

/// Solves the subset LP for the cheapest seq-PAV ℓ-replacement at `x = 1`.
///
/// `y(S)` is the weight of the new voter approving exactly `S`. The new
/// candidates must be picked in the order `c_1, …, c_ℓ`, and `c_ℓ` must
/// still have marginal score at least 1 when it is picked.
pub fn seqpav_replacement_lp(ell: usize) -> Result<SeqPavLp> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be positive".into()));
    }
    if ell > SEQPAV_LP_MAX_ELL {
        return Err(Error::TooLarge(format!(
            "ℓ = {ell} needs 2^{ell} LP variables; at most ℓ = {SEQPAV_LP_MAX_ELL} is supported"
        )));
    }
    let subsets = 1u32 << ell;
    let mut lp = LinearProgram::new(Sense::Minimize);
    // The empty set never helps, so it gets no variable.
    let y: Vec<_> = (1..subsets)
        .map(|_| lp.var(1.0, 0.0, f64::INFINITY))
        .collect();
    let var = |mask: u32| y[mask as usize - 1];
    // t(S, i) = 1 / (|S ∩ {c_1..c_{i−1}}| + 1), with i zero-based here
    let t = |mask: u32, i: usize| 1.0 / f64::from((mask & ((1u32 << i) - 1)).count_ones() + 1);

    for i in 0..ell {
        for j in i + 1..ell {
            let mut row = Vec::new();
            for mask in 1..subsets {
                let has_i = mask >> i & 1 == 1;
                let has_j = mask >> j & 1 == 1;
                if has_i != has_j {
                    row.push((var(mask), if has_i { t(mask, i) } else { -t(mask, i) }));
                }
            }
            lp.constraint(row, Cmp::Ge, 0.0);
        }
    }
    let last = ell - 1;
    let row = (1..subsets)
        .filter(|mask| mask >> last & 1 == 1)
        .map(|mask| (var(mask), t(mask, last)))
        .collect();
    lp.constraint(row, Cmp::Ge, 1.0);

    let sol = lp.solve()?;
    let voters = (1..subsets)
        .map(|mask| (mask, sol.value(var(mask))))
        .filter(|&(_, w)| w > 1e-12)
        .collect();
    Ok(SeqPavLp {
        ell,
        value: sol.objective,
        voters,
    })
}
