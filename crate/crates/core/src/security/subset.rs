//! Minimum approval weight of an ℓ-subset of the committee.
//!
//! Integer program: binary `x_c` per winner, continuous `y_v` per voter with
//! `x_c + y_v ≤ 1` whenever `c ∈ A_v`, `Σ x_c = ℓ`, minimising
//! `Σ w(v)·(1 − y_v)`. Voters are first merged by the set of winners they
//! approve. The search branches on `x` in depth-first order and prunes with
//! the LP relaxation.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense};

pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMethod {
    Ilp,
    Enumerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetWeightResult {
    pub ell: usize,
    /// Candidate indices, ascending.
    pub subset: Vec<usize>,
    pub weight: f64,
    /// False if the time budget ran out; `bound` then holds a proven lower
    /// bound on the optimum.
    pub optimal: bool,
    pub bound: f64,
}

/// Voters grouped by the winners they approve, as positions in `winners`.
struct Reduced {
    winners: Vec<usize>,
    groups: Vec<(Vec<usize>, f64)>,
}

impl Reduced {
    fn new(election: &Election, winners: Vec<usize>) -> Self {
        let mut position = vec![usize::MAX; election.num_candidates()];
        for (i, &c) in winners.iter().enumerate() {
            position[c] = i;
        }
        let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (v, ballot) in election.ballots().iter().enumerate() {
            let mut key: Vec<usize> = ballot
                .iter()
                .map(|&c| position[c])
                .filter(|&p| p != usize::MAX)
                .collect();
            if key.is_empty() || election.weight(v) == 0.0 {
                continue;
            }
            key.sort_unstable();
            key.dedup();
            *merged.entry(key).or_insert(0.0) += election.weight(v);
        }
        Self {
            winners,
            groups: merged.into_iter().collect(),
        }
    }

    fn weight_of(&self, chosen: &[bool]) -> f64 {
        self.groups
            .iter()
            .filter(|(key, _)| key.iter().any(|&i| chosen[i]))
            .map(|(_, w)| w)
            .sum()
    }

    /// LP relaxation with some `x` fixed. Returns the bound and the
    /// fractional `x`, or `None` if the fixing is infeasible.
    fn relax(&self, ell: usize, fixed: &[Option<bool>]) -> Result<Option<(f64, Vec<f64>)>> {
        let ones = fixed.iter().filter(|f| **f == Some(true)).count();
        let free = fixed.iter().filter(|f| f.is_none()).count();
        if ones > ell || ones + free < ell {
            return Ok(None);
        }
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x: Vec<_> = fixed
            .iter()
            .map(|f| match f {
                Some(true) => lp.var(0.0, 1.0, 1.0),
                Some(false) => lp.var(0.0, 0.0, 0.0),
                None => lp.var(0.0, 0.0, 1.0),
            })
            .collect();
        lp.constraint(x.iter().map(|&v| (v, 1.0)).collect(), Cmp::Eq, ell as f64);
        // z_v = 1 − y_v ≥ x_c for every winner c the group approves.
        for (key, w) in &self.groups {
            let z = lp.var(*w, 0.0, 1.0);
            for &i in key {
                lp.constraint(vec![(z, 1.0), (x[i], -1.0)], Cmp::Ge, 0.0);
            }
        }
        let sol = lp.solve()?;
        Ok(Some((
            sol.objective,
            x.iter().map(|&v| sol.value(v)).collect(),
        )))
    }

    /// The ℓ winners with largest `x`, ties to lower position.
    fn round(&self, ell: usize, x: &[f64]) -> Vec<bool> {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
        let mut chosen = vec![false; x.len()];
        for &i in &order[..ell] {
            chosen[i] = true;
        }
        chosen
    }

    fn result(
        &self,
        ell: usize,
        chosen: &[bool],
        weight: f64,
        optimal: bool,
        bound: f64,
    ) -> SubsetWeightResult {
        let mut subset: Vec<usize> = (0..chosen.len())
            .filter(|&i| chosen[i])
            .map(|i| self.winners[i])
            .collect();
        subset.sort_unstable();
        SubsetWeightResult {
            ell,
            subset,
            weight,
            optimal,
            bound,
        }
    }
}

fn enumerate(reduced: &Reduced, ell: usize) -> SubsetWeightResult {
    let n = reduced.winners.len();
    let mut best: Option<(f64, Vec<bool>)> = None;
    let mut chosen = vec![false; n];
    let mut idx: Vec<usize> = (0..ell).collect();
    loop {
        chosen.iter_mut().for_each(|c| *c = false);
        for &i in &idx {
            chosen[i] = true;
        }
        let w = reduced.weight_of(&chosen);
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, chosen.clone()));
        }
        // next combination in lexicographic order
        let mut i = ell;
        while i > 0 && idx[i - 1] == n - ell + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..ell {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let (w, chosen) = best.expect("at least one combination");
    reduced.result(ell, &chosen, w, true, w)
}

fn branch_and_bound(
    reduced: &Reduced,
    ell: usize,
    budget: Option<Duration>,
) -> Result<SubsetWeightResult> {
    let n = reduced.winners.len();
    let start = Instant::now();
    let root_fix = vec![None; n];
    let (root_bound, root_x) = reduced
        .relax(ell, &root_fix)?
        .ok_or_else(|| Error::Lp("root relaxation infeasible".into()))?;
    let mut incumbent = reduced.round(ell, &root_x);
    let mut best = reduced.weight_of(&incumbent);

    let prunes = |bound: f64, best: f64| bound >= best - 1e-12 * best.abs().max(1e-300);
    // (fixings, bound of the parent node)
    let mut stack: Vec<(Vec<Option<bool>>, f64)> = vec![(root_fix, root_bound)];
    let mut optimal = true;
    while let Some((fix, parent_bound)) = stack.pop() {
        if budget.is_some_and(|b| start.elapsed() > b) {
            stack.push((fix, parent_bound));
            optimal = false;
            break;
        }
        if prunes(parent_bound, best) {
            continue;
        }
        let Some((bound, x)) = reduced.relax(ell, &fix)? else {
            continue;
        };
        let candidate = reduced.round(ell, &x);
        let w = reduced.weight_of(&candidate);
        if w < best {
            best = w;
            incumbent = candidate;
        }
        if prunes(bound, best) {
            continue;
        }
        // branch on the most fractional free variable, else the first free
        let free = (0..n).filter(|&i| fix[i].is_none());
        let Some(pick) = free.min_by(|&a, &b| {
            (x[a] - 0.5)
                .abs()
                .total_cmp(&(x[b] - 0.5).abs())
                .then(a.cmp(&b))
        }) else {
            continue;
        };
        let mut out = fix.clone();
        out[pick] = Some(false);
        let mut inn = fix;
        inn[pick] = Some(true);
        stack.push((out, bound));
        stack.push((inn, bound));
    }
    let bound = if optimal {
        best
    } else {
        stack.iter().map(|&(_, b)| b).fold(best, f64::min)
    };
    Ok(reduced.result(ell, &incumbent, best, optimal, bound))
}

/// Minimum joint approval weight of `ℓ` distinct committee members.
pub fn min_approval_weight_subset(
    election: &Election,
    committee: &Committee,
    ell: usize,
    method: SubsetMethod,
    budget: Option<Duration>,
) -> Result<SubsetWeightResult> {
    let winners = committee.distinct();
    if ell == 0 || ell > winners.len() {
        return Err(Error::InvalidParameter(format!(
            "ℓ = {ell} outside 1..={}",
            winners.len()
        )));
    }
    let reduced = Reduced::new(election, winners);
    match method {
        SubsetMethod::Enumerate if reduced.winners.len() > ENUMERATION_LIMIT => {
            Err(Error::TooLarge(format!(
                "enumeration supports at most {ENUMERATION_LIMIT} winners, got {}",
                reduced.winners.len()
            )))
        }
        SubsetMethod::Enumerate => Ok(enumerate(&reduced, ell)),
        SubsetMethod::Ilp => branch_and_bound(&reduced, ell, budget),
    }
}
