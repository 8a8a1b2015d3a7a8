//! Minimum average satisfaction of ℓ-supporting groups.
//!
//! For a fixed open candidate the task is: among subsets of its supporters
//! weighing at least `T = ℓ/k`, minimise `Σ w·s / Σ w` where `s` is the
//! voter's satisfaction. Taking the lowest-satisfaction supporters until `T`
//! is reached is not optimal in general (a heavy voter can overshoot `T` by
//! much more than a slightly more satisfied light voter would), and with two
//! satisfaction levels the problem already contains subset-sum. We solve it
//! exactly by depth-first branch and bound over supporters sorted by
//! satisfaction, bounded by the fractional relaxation, seeded with the greedy
//! prefix.

use super::group_threshold;
use crate::election::{Committee, Election};

#[derive(Debug, Clone, PartialEq)]
pub struct MinAvgGroup {
    pub candidate: usize,
    /// Voter indices, ascending.
    pub group: Vec<usize>,
    pub weight: f64,
    pub value: f64,
    /// False when the node budget ran out before optimality was proven.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum branch-and-bound nodes per candidate.
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { nodes: 2_000_000 }
    }
}

struct Item {
    voter: usize,
    sat: f64,
    weight: f64,
}

struct Search<'a> {
    items: &'a [Item],
    target: f64,
    /// Prefix sums of weight and weight·satisfaction.
    pw: Vec<f64>,
    ps: Vec<f64>,
    /// First index of the satisfaction level containing each item.
    level_end: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(items: &'a [Item], target: f64) -> Self {
        let n = items.len();
        let mut pw = vec![0.0; n + 1];
        let mut ps = vec![0.0; n + 1];
        for (i, it) in items.iter().enumerate() {
            pw[i + 1] = pw[i] + it.weight;
            ps[i + 1] = ps[i] + it.weight * it.sat;
        }
        let mut level_end = vec![n; n];
        for i in (0..n.saturating_sub(1)).rev() {
            level_end[i] = if items[i + 1].sat == items[i].sat {
                level_end[i + 1]
            } else {
                i + 1
            };
        }
        Self {
            items,
            target,
            pw,
            ps,
            level_end,
        }
    }

    /// Best fractional average reachable from `(sum, weight)` using items
    /// `i..`, or infinity if the target cannot be reached.
    fn relaxation(&self, i: usize, mut sum: f64, mut weight: f64) -> f64 {
        let n = self.items.len();
        let mut pos = i;
        if weight < self.target {
            let need = self.target - weight;
            let available = self.pw[n] - self.pw[i];
            if available < need {
                return f64::INFINITY;
            }
            // last index p with pw[p] - pw[i] < need
            let base = self.pw[i];
            let p = i + self.pw[i..=n].partition_point(|&x| x - base < need) - 1;
            sum += self.ps[p] - self.ps[i];
            weight += self.pw[p] - base;
            let part = self.target - weight;
            sum += part * self.items[p].sat;
            weight += part;
            // remainder of item p and the rest of its level
            let avg = sum / weight;
            let sat = self.items[p].sat;
            if sat >= avg {
                return avg;
            }
            let end = self.level_end[p];
            sum += (self.items[p].weight - part) * sat + (self.ps[end] - self.ps[p + 1]);
            weight += (self.items[p].weight - part) + (self.pw[end] - self.pw[p + 1]);
            pos = end;
        }
        while pos < n {
            let sat = self.items[pos].sat;
            if weight > 0.0 && sat >= sum / weight {
                break;
            }
            let end = self.level_end[pos];
            sum += self.ps[end] - self.ps[pos];
            weight += self.pw[end] - self.pw[pos];
            pos = end;
        }
        if weight >= self.target && weight > 0.0 {
            sum / weight
        } else {
            f64::INFINITY
        }
    }

    /// Greedy prefix: lowest satisfaction first until the target is met,
    /// then any further supporter below the running average.
    fn greedy(&self) -> Option<(f64, usize)> {
        let n = self.items.len();
        let mut sum = 0.0;
        let mut weight = 0.0;
        let mut taken = 0;
        while taken < n && (weight < self.target || self.items[taken].sat < sum / weight) {
            sum += self.items[taken].weight * self.items[taken].sat;
            weight += self.items[taken].weight;
            taken += 1;
        }
        (weight >= self.target && weight > 0.0).then(|| (sum / weight, taken))
    }

    fn run(&self, budget: SearchBudget) -> Option<(f64, Vec<usize>, bool)> {
        let (mut best, prefix) = self.greedy()?;
        let mut best_set: Vec<usize> = (0..prefix).collect();
        let n = self.items.len();

        // (next item, sum, weight, path length); `chosen` is the shared
        // path, truncated on backtrack.
        let mut chosen: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, f64, f64, usize)> = vec![(0, 0.0, 0.0, 0)];
        let mut nodes = 0u64;
        let mut exact = true;
        while let Some((i, sum, weight, depth)) = stack.pop() {
            nodes += 1;
            if nodes > budget.nodes {
                exact = false;
                break;
            }
            chosen.truncate(depth);
            let feasible = weight >= self.target && weight > 0.0;
            if feasible {
                let avg = sum / weight;
                if avg < best - 1e-15 * best.abs().max(1.0) {
                    best = avg;
                    best_set = chosen.clone();
                }
            }
            if i == n {
                continue;
            }
            if feasible && self.items[i].sat >= sum / weight {
                continue;
            }
            let bound = self.relaxation(i, sum, weight);
            if bound >= best - 1e-12 * best.abs().max(1.0) {
                continue;
            }
            let it = &self.items[i];
            // include is explored first
            stack.push((i + 1, sum, weight, depth));
            chosen.push(i);
            stack.push((
                i + 1,
                sum + it.weight * it.sat,
                weight + it.weight,
                depth + 1,
            ));
        }
        Some((best, best_set, exact))
    }
}

/// Exact minimum for one candidate.
fn candidate_minimum(
    election: &Election,
    satisfaction: &[u32],
    c: usize,
    target: f64,
    budget: SearchBudget,
) -> Option<MinAvgGroup> {
    let mut items: Vec<Item> = election
        .supporters_of(c)
        .iter()
        .filter(|&&v| election.weight(v) > 0.0)
        .map(|&v| Item {
            voter: v,
            sat: f64::from(satisfaction[v]),
            weight: election.weight(v),
        })
        .collect();
    items.sort_by(|a, b| {
        a.sat
            .total_cmp(&b.sat)
            .then(b.weight.total_cmp(&a.weight))
            .then(a.voter.cmp(&b.voter))
    });
    let (value, picked, exact) = Search::new(&items, target).run(budget)?;
    let mut group: Vec<usize> = picked.iter().map(|&i| items[i].voter).collect();
    group.sort_unstable();
    let weight = group.iter().map(|&v| election.weight(v)).sum();
    Some(MinAvgGroup {
        candidate: c,
        group,
        weight,
        value,
        exact,
    })
}

/// Lowest average satisfaction over all ℓ-supporting groups of open
/// candidates, or `None` if no such group exists. Ties go to the smaller
/// candidate index.
pub fn min_avg_satisfaction(
    election: &Election,
    committee: &Committee,
    ell: usize,
) -> Option<MinAvgGroup> {
    min_avg_satisfaction_with(election, committee, ell, SearchBudget::default())
}

pub fn min_avg_satisfaction_with(
    election: &Election,
    committee: &Committee,
    ell: usize,
    budget: SearchBudget,
) -> Option<MinAvgGroup> {
    let target = group_threshold(election, ell).max(f64::MIN_POSITIVE);
    let satisfaction = committee.satisfactions(election);
    let mut best: Option<MinAvgGroup> = None;
    for c in (0..election.num_candidates()).filter(|&c| committee.is_open(c)) {
        if election.candidate_weight(c) < target {
            continue;
        }
        if let Some(found) = candidate_minimum(election, &satisfaction, c, target, budget) {
            if best.as_ref().is_none_or(|b| found.value < b.value) {
                best = Some(found);
            }
        }
    }
    best
}
