//! Maximin support by bisection on the target backing with a max-flow
//! feasibility check.

use std::collections::VecDeque;

use crate::election::{Committee, Election, VoteAssignment};
use crate::error::{Error, Result};

/// Bisection stops at this width, relative to the total weight.
const BISECTION_WIDTH: f64 = 1e-9;
const FLOW_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct MaximinSupport {
    pub value: f64,
    /// A complete assignment whose minimum backing is `value`.
    pub assignment: VoteAssignment,
}

struct Edge {
    to: usize,
    cap: f64,
}

/// Dinic's algorithm on a graph with floating capacities.
struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0.0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > FLOW_EPS && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > FLOW_EPS && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let got = self.dfs(s, t, f64::INFINITY);
                if got <= 0.0 {
                    break;
                }
                flow += got;
            }
        }
        flow
    }
}

/// Seats (one per committee member, copies included) and, per voter, the
/// seats it approves.
struct Layout {
    seats: Vec<usize>,
    voter_seats: Vec<Vec<usize>>,
}

impl Layout {
    fn new(election: &Election, committee: &Committee) -> Self {
        let seats = committee.members().to_vec();
        let mut seats_of = vec![Vec::new(); election.num_candidates()];
        for (s, &c) in seats.iter().enumerate() {
            seats_of[c].push(s);
        }
        let voter_seats = election
            .ballots()
            .iter()
            .map(|ballot| {
                let mut row: Vec<usize> = ballot
                    .iter()
                    .flat_map(|&c| seats_of[c].iter().copied())
                    .collect();
                row.sort_unstable();
                row.dedup();
                row
            })
            .collect();
        Self { seats, voter_seats }
    }

    /// Max flow with every seat capped at `t`; returns the flow and the
    /// voter-to-seat amounts.
    fn flow(&self, election: &Election, t: f64) -> (f64, Vec<Vec<(usize, f64)>>) {
        let n = election.num_voters();
        let k = self.seats.len();
        let source = n + k;
        let sink = source + 1;
        let mut net = FlowNetwork::new(sink + 1);
        let mut arcs = Vec::new();
        for (v, row) in self.voter_seats.iter().enumerate() {
            if row.is_empty() || election.weight(v) <= 0.0 {
                continue;
            }
            net.add_edge(source, v, election.weight(v));
            for &s in row {
                arcs.push((v, s, net.add_edge(v, n + s, election.weight(v))));
            }
        }
        for s in 0..k {
            net.add_edge(n + s, sink, t);
        }
        let flow = net.max_flow(source, sink);
        let mut entries = vec![Vec::new(); n];
        for (v, s, e) in arcs {
            let amount = net.edges[e ^ 1].cap;
            if amount > 0.0 {
                entries[v].push((s, amount));
            }
        }
        (flow, entries)
    }
}

/// Tops up every voter to its full weight, sending the rest to its
/// approved seat of lowest backing.
fn complete(
    election: &Election,
    layout: &Layout,
    mut entries: Vec<Vec<(usize, f64)>>,
) -> VoteAssignment {
    let mut backing = vec![0.0; layout.seats.len()];
    for row in &entries {
        for &(s, a) in row {
            backing[s] += a;
        }
    }
    for (v, row) in entries.iter_mut().enumerate() {
        let seats = &layout.voter_seats[v];
        if seats.is_empty() {
            continue;
        }
        let used: f64 = row.iter().map(|&(_, a)| a).sum();
        let rest = election.weight(v) - used;
        if rest <= 0.0 {
            continue;
        }
        let target = *seats
            .iter()
            .min_by(|&&a, &&b| backing[a].total_cmp(&backing[b]).then(a.cmp(&b)))
            .expect("nonempty");
        backing[target] += rest;
        match row.iter_mut().find(|(s, _)| *s == target) {
            Some(entry) => entry.1 += rest,
            None => {
                row.push((target, rest));
                row.sort_by_key(|&(s, _)| s);
            }
        }
    }
    VoteAssignment::new(layout.seats.clone(), entries)
}

/// Maximin support value of the committee, within `1e-9` of the total
/// weight, and an assignment attaining it.
pub fn maximin_support(election: &Election, committee: &Committee) -> Result<MaximinSupport> {
    if committee.is_empty() {
        return Err(Error::InvalidParameter(
            "maximin support needs a nonempty committee".into(),
        ));
    }
    let layout = Layout::new(election, committee);
    let k = layout.seats.len() as f64;
    let total = election.total_weight();
    let mut hi = committee
        .distinct()
        .iter()
        .map(|&c| election.candidate_weight(c) / f64::from(committee.multiplicity(c)))
        .fold(total / k, f64::min);
    let mut lo = 0.0;
    let mut best = layout.flow(election, 0.0).1;
    if hi > 0.0 {
        let (flow, entries) = layout.flow(election, hi);
        if flow >= k * hi * (1.0 - 1e-12) {
            lo = hi;
            best = entries;
        }
    }
    let width = BISECTION_WIDTH * total;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let (flow, entries) = layout.flow(election, mid);
        if flow >= k * mid * (1.0 - 1e-12) {
            lo = mid;
            best = entries;
        } else {
            hi = mid;
        }
    }
    let assignment = complete(election, &layout, best);
    let value = assignment
        .backing()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(MaximinSupport { value, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::{e1, e3};

    fn committee(e: &Election, members: &[usize]) -> Committee {
        Committee::new(members.to_vec(), e.num_candidates(), false).unwrap()
    }

    #[test]
    fn e3_splits_v1() {
        let e = e3();
        let r = maximin_support(&e, &committee(&e, &[0, 1])).unwrap();
        assert!((r.value - 0.25).abs() < 1e-8);
        assert!(r.assignment.violations(&e, true, 1e-9).is_empty());
    }

    #[test]
    fn disjoint_singletons_give_min_weight() {
        let e = Election::from_ballots(3, 3, &[0.5, 0.3, 0.2], &[&[0], &[1], &[2]]).unwrap();
        let r = maximin_support(&e, &committee(&e, &[0, 1, 2])).unwrap();
        assert!((r.value - 0.2).abs() < 1e-8);
    }

    #[test]
    fn unsupported_winner_is_zero() {
        let e = Election::from_ballots(3, 2, &[1.0], &[&[0]]).unwrap();
        let r = maximin_support(&e, &committee(&e, &[0, 1])).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.assignment.violations(&e, true, 1e-12).is_empty());
    }

    #[test]
    fn e1_pair() {
        // {c1, c3}: c3 only has v3.
        let e = e1();
        let r = maximin_support(&e, &committee(&e, &[0, 2])).unwrap();
        assert!((r.value - 0.2).abs() < 1e-8);
        // {c1, c2}: min(0.8 / 2, 0.3) = 0.3
        let r = maximin_support(&e, &committee(&e, &[0, 1])).unwrap();
        assert!((r.value - 0.3).abs() < 1e-8);
    }

    #[test]
    fn copies_share_support() {
        let e = Election::from_ballots(2, 2, &[0.6, 0.4], &[&[0], &[1]]).unwrap();
        let w = Committee::new(vec![0, 0], 2, true).unwrap();
        let r = maximin_support(&e, &w).unwrap();
        assert!((r.value - 0.3).abs() < 1e-8);
    }
}
