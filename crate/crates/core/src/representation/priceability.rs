//! Priceability gap.
//!
//! A price system `(p, f)` has every winner paid exactly `p` (per copy) by
//! its supporters, with no voter paying more than its weight. The gap of a
//! system is the largest spare money held by the supporters of an open
//! candidate, minus `p`; a committee is priceable iff some system has gap at
//! most zero. We minimise the gap by linear programming and, among the
//! minimisers, take the largest price.

use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense, Var};
use crate::EPS;

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSystem {
    pub price: f64,
    /// `payments[v]` lists `(candidate, amount)` with positive amounts.
    pub payments: Vec<Vec<(usize, f64)>>,
}

impl PriceSystem {
    /// Money voter `v` keeps after paying.
    pub fn spare(&self, election: &Election, v: usize) -> f64 {
        election.weight(v) - self.payments[v].iter().map(|&(_, a)| a).sum::<f64>()
    }

    /// Spare money of the supporters of `c`.
    pub fn spare_of(&self, election: &Election, c: usize) -> f64 {
        election
            .supporters_of(c)
            .iter()
            .map(|&v| self.spare(election, v))
            .sum()
    }

    /// Checks the three priceability conditions without trusting the solver.
    pub fn violations(
        &self,
        election: &Election,
        committee: &Committee,
        tolerance: f64,
    ) -> Vec<String> {
        let mut out = Vec::new();
        if self.payments.len() != election.num_voters() {
            out.push(format!(
                "payments cover {} voters, election has {}",
                self.payments.len(),
                election.num_voters()
            ));
            return out;
        }
        if self.price < -tolerance {
            out.push(format!("negative price {}", self.price));
        }
        let mut received = vec![0.0; election.num_candidates()];
        for (v, row) in self.payments.iter().enumerate() {
            let ballot = election.ballot(v);
            let mut paid = 0.0;
            for &(c, a) in row {
                if a < -tolerance {
                    out.push(format!(
                        "voter {v} pays negative amount {a} to candidate {c}"
                    ));
                }
                if !committee.contains(c) || !ballot.contains(&c) {
                    out.push(format!("voter {v} pays candidate {c} it may not pay"));
                }
                paid += a;
                if let Some(r) = received.get_mut(c) {
                    *r += a;
                }
            }
            if paid > election.weight(v) + tolerance {
                out.push(format!(
                    "voter {v} pays {paid}, above its weight {}",
                    election.weight(v)
                ));
            }
        }
        for c in committee.distinct() {
            let due = self.price * f64::from(committee.multiplicity(c));
            if (received[c] - due).abs() > tolerance {
                out.push(format!(
                    "candidate {c} receives {}, expected {due}",
                    received[c]
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceabilityReport {
    /// Maximum spare money of an open candidate's supporters, minus the
    /// price; `-p` when no candidate is open.
    pub gap: f64,
    /// `gap / p`, undefined for a zero price.
    pub normalized_gap: Option<f64>,
    pub system: PriceSystem,
    /// Open candidates whose supporters' spare money exceeds the price.
    pub exceeding: Vec<usize>,
    pub diagnostic: Option<String>,
}

pub fn priceability_gap(election: &Election, committee: &Committee) -> Result<PriceabilityReport> {
    if committee.is_empty() {
        return Err(Error::InvalidParameter(
            "priceability needs a nonempty committee".into(),
        ));
    }
    let total = election.total_weight();
    let winners = committee.distinct();
    let open: Vec<usize> = (0..election.num_candidates())
        .filter(|&c| committee.is_open(c))
        .collect();

    let mut lp = LinearProgram::new(Sense::Minimize);
    let p = lp.var(0.0, 0.0, f64::INFINITY);
    let g = lp.var(1.0, f64::NEG_INFINITY, f64::INFINITY);

    // f(v, c) for winners on each ballot; voters without one only hold spare.
    let mut pay: Vec<Vec<(usize, Var)>> = vec![Vec::new(); election.num_voters()];
    let mut income: Vec<Vec<(Var, f64)>> = vec![Vec::new(); election.num_candidates()];
    for (v, ballot) in election.ballots().iter().enumerate() {
        let mut seen: Vec<usize> = ballot
            .iter()
            .copied()
            .filter(|&c| committee.contains(c))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        for c in seen {
            let f = lp.var(0.0, 0.0, f64::INFINITY);
            pay[v].push((c, f));
            income[c].push((f, 1.0));
        }
        if !pay[v].is_empty() {
            let row = pay[v].iter().map(|&(_, f)| (f, 1.0)).collect();
            lp.constraint(row, Cmp::Le, election.weight(v));
        }
    }
    for &c in &winners {
        let mut row = std::mem::take(&mut income[c]);
        row.push((p, -f64::from(committee.multiplicity(c))));
        lp.constraint(row, Cmp::Eq, 0.0);
    }
    // g + p + Σ_{v ∈ V_c} paid(v) ≥ w(V_c)
    for &c in &open {
        let mut row = vec![(g, 1.0), (p, 1.0)];
        for &v in election.supporters_of(c) {
            row.extend(pay[v].iter().map(|&(_, f)| (f, 1.0)));
        }
        lp.constraint(row, Cmp::Ge, election.candidate_weight(c));
    }

    if open.is_empty() {
        lp.set_objective(g, 0.0);
        lp.set_bounds(g, 0.0, 0.0);
    } else {
        let first = lp.solve()?;
        lp.set_bounds(g, f64::NEG_INFINITY, first.objective + EPS * total);
        lp.set_objective(g, 0.0);
    }
    lp.set_objective(p, 1.0);
    lp.set_sense(Sense::Maximize);
    let solution = lp.solve()?;

    let price = solution.value(p).max(0.0);
    let payments = pay
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(c, f)| (c, solution.value(f).max(0.0)))
                .filter(|&(_, a)| a > 0.0)
                .collect()
        })
        .collect();
    let system = PriceSystem { price, payments };

    let spare: Vec<(usize, f64)> = open
        .iter()
        .map(|&c| (c, system.spare_of(election, c)))
        .collect();
    let max_spare = spare
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = if open.is_empty() {
        -price
    } else {
        max_spare - price
    };
    let exceeding = spare
        .iter()
        .filter(|&&(_, s)| s > price + EPS * total)
        .map(|&(c, _)| c)
        .collect();
    let degenerate = price <= EPS * total;
    Ok(PriceabilityReport {
        gap,
        normalized_gap: (!degenerate).then(|| gap / price),
        diagnostic: degenerate.then(|| {
            "no positive uniform price can be paid; using the degenerate system p = 0".to_string()
        }),
        system,
        exceeding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::{e1, e3};
    use crate::rules::{run_seq_phragmen, RuleOptions};

    fn committee(e: &Election, members: &[usize]) -> Committee {
        Committee::new(members.to_vec(), e.num_candidates(), false).unwrap()
    }

    #[test]
    fn e3_av_committee() {
        let e = e3();
        let w = committee(&e, &[0, 1]);
        let r = priceability_gap(&e, &w).unwrap();
        assert!((r.gap - 0.25).abs() < 1e-9);
        assert!((r.normalized_gap.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.system.price - 0.25).abs() < 1e-9);
        assert_eq!(r.exceeding, vec![2]);
        assert!(r.system.violations(&e, &w, 1e-9).is_empty());
    }

    #[test]
    fn full_committee_gap_is_minus_price() {
        let e = e1().with_k(3);
        let w = committee(&e, &[0, 1, 2]);
        let r = priceability_gap(&e, &w).unwrap();
        assert!((r.gap + r.system.price).abs() < 1e-12);
        // c3 is paid by v3 alone
        assert!((r.system.price - 0.2).abs() < 1e-9);
    }

    #[test]
    fn seq_phragmen_is_priceable() {
        let e = e1();
        let out = run_seq_phragmen(&e, &RuleOptions::default(), None).unwrap();
        let r = priceability_gap(&e, &out.committee).unwrap();
        assert!(r.gap <= 1e-7, "{}", r.gap);
        assert!(r.system.violations(&e, &out.committee, 1e-9).is_empty());
    }

    #[test]
    fn unsupported_winner_is_degenerate() {
        let e = Election::from_ballots(3, 2, &[1.0], &[&[0]]).unwrap();
        let r = priceability_gap(&e, &committee(&e, &[0, 1])).unwrap();
        assert_eq!(r.system.price, 0.0);
        assert!(r.normalized_gap.is_none());
        assert!(r.diagnostic.is_some());
    }

    #[test]
    fn empty_committee_is_rejected() {
        let e = e1();
        assert!(priceability_gap(&e, &committee(&e, &[])).is_err());
    }

    #[test]
    fn violations_catch_overpayment() {
        let e = e3();
        let w = committee(&e, &[0, 1]);
        let bad = PriceSystem {
            price: 0.3,
            payments: vec![vec![(0, 0.3), (1, 0.3)], vec![]],
        };
        assert_eq!(bad.violations(&e, &w, 1e-9).len(), 1);
    }
}
