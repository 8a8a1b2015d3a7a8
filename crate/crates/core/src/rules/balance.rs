//! Balanced vote assignments.
//!
//! A balanced assignment is complete (every voter approving some seat
//! assigns its full weight) and minimises the sum of squared backings. It is
//! computed by block coordinate descent: each voter in turn redistributes
//! its weight so that the seats it approves are water-filled to a common
//! level. Seats are grouped into connected components through shared
//! voters; components are balanced independently, so adding a seat only
//! disturbs the component it joins.

use std::collections::BTreeSet;

use crate::election::{Committee, Election, VoteAssignment};

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceConfig {
    /// Stop once every voter's local imbalance (highest backing it funds
    /// minus lowest backing it could fund) is below this fraction of the
    /// component's weight.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 20_000,
        }
    }
}

pub(crate) struct Balancer<'a> {
    election: &'a Election,
    config: BalanceConfig,
    seats: Vec<usize>,
    entries: Vec<Vec<(usize, f64)>>,
    backing: Vec<f64>,
    parent: Vec<usize>,
    comp_voters: Vec<Vec<usize>>,
    comp_seats: Vec<Vec<usize>>,
}

impl<'a> Balancer<'a> {
    pub(crate) fn new(election: &'a Election, config: BalanceConfig) -> Self {
        Self {
            election,
            config,
            seats: Vec::new(),
            entries: vec![Vec::new(); election.num_voters()],
            backing: Vec::new(),
            parent: Vec::new(),
            comp_voters: Vec::new(),
            comp_seats: Vec::new(),
        }
    }

    pub(crate) fn backing(&self) -> &[f64] {
        &self.backing
    }

    pub(crate) fn voter_entries(&self, v: usize) -> &[(usize, f64)] {
        &self.entries[v]
    }

    fn find(&mut self, mut s: usize) -> usize {
        while self.parent[s] != s {
            self.parent[s] = self.parent[self.parent[s]];
            s = self.parent[s];
        }
        s
    }

    /// Adds a seat for candidate `c`, funding it with its supporters' unused
    /// weight, and merges the components it connects. Returns the new root.
    fn push_seat(&mut self, c: usize) -> usize {
        let s = self.seats.len();
        self.seats.push(c);
        self.backing.push(0.0);
        self.parent.push(s);
        self.comp_voters.push(Vec::new());
        self.comp_seats.push(vec![s]);

        let supporters = self.election.supporters_of(c);
        let mut roots = BTreeSet::new();
        for &v in supporters {
            let linked: Vec<usize> = self.entries[v].iter().map(|&(t, _)| t).collect();
            for t in linked {
                roots.insert(self.find(t));
            }
            let used: f64 = self.entries[v].iter().map(|&(_, a)| a).sum();
            let slack = (self.election.weight(v) - used).max(0.0);
            self.entries[v].push((s, slack));
            self.backing[s] += slack;
        }
        let mut voters = supporters.to_vec();
        let mut seats = vec![s];
        for r in roots {
            voters.append(&mut self.comp_voters[r]);
            seats.append(&mut self.comp_seats[r]);
            self.parent[r] = s;
        }
        voters.sort_unstable();
        voters.dedup();
        seats.sort_unstable();
        self.comp_voters[s] = voters;
        self.comp_seats[s] = seats;
        s
    }

    /// Adds a seat and rebalances its component. Returns the voters of that
    /// component, whose entries may have changed.
    pub(crate) fn add_seat(&mut self, c: usize) -> &[usize] {
        let root = self.push_seat(c);
        self.rebalance(root);
        &self.comp_voters[root]
    }

    fn refresh_backing(&mut self, root: usize) {
        for &s in &self.comp_seats[root] {
            self.backing[s] = 0.0;
        }
        for &v in &self.comp_voters[root] {
            for &(s, a) in &self.entries[v] {
                self.backing[s] += a;
            }
        }
    }

    fn residual(&self, root: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for &v in &self.comp_voters[root] {
            let row = &self.entries[v];
            if row.len() < 2 {
                continue;
            }
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for &(s, a) in row {
                lo = lo.min(self.backing[s]);
                if a > 0.0 {
                    hi = hi.max(self.backing[s]);
                }
            }
            worst = worst.max(hi - lo);
        }
        worst
    }

    fn water_fill(&mut self, v: usize) {
        let row = &mut self.entries[v];
        let n = row.len();
        if n < 2 {
            return;
        }
        let others: Vec<f64> = row.iter().map(|&(s, a)| self.backing[s] - a).collect();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| {
            others[i]
                .total_cmp(&others[j])
                .then(row[i].0.cmp(&row[j].0))
        });
        let w = self.election.weight(v);
        let mut acc = 0.0;
        let mut level = 0.0;
        let mut filled = n;
        for (j, &i) in idx.iter().enumerate() {
            acc += others[i];
            level = (w + acc) / (j + 1) as f64;
            if j + 1 == n || level <= others[idx[j + 1]] {
                filled = j + 1;
                break;
            }
        }
        let mut in_fill = vec![false; n];
        for &i in &idx[..filled] {
            in_fill[i] = true;
        }
        for i in 0..n {
            let amount = if in_fill[i] {
                (level - others[i]).max(0.0)
            } else {
                0.0
            };
            row[i].1 = amount;
            self.backing[row[i].0] = others[i] + amount;
        }
    }

    fn rebalance(&mut self, root: usize) {
        let weight: f64 = self.comp_voters[root]
            .iter()
            .map(|&v| self.election.weight(v))
            .sum();
        let tol = self.config.tolerance * weight;
        let voters = self.comp_voters[root].clone();
        for sweep in 0..=self.config.max_sweeps {
            self.refresh_backing(root);
            if sweep == self.config.max_sweeps || self.residual(root) <= tol {
                break;
            }
            for &v in &voters {
                self.water_fill(v);
            }
        }
    }

    pub(crate) fn assignment(&self) -> VoteAssignment {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().copied().filter(|&(_, a)| a > 0.0).collect())
            .collect();
        VoteAssignment::new(self.seats.clone(), entries)
    }
}

/// Balanced assignment for `committee` with the default configuration.
pub fn balanced_assignment(election: &Election, committee: &Committee) -> VoteAssignment {
    balanced_assignment_with(election, committee, &BalanceConfig::default())
}

pub fn balanced_assignment_with(
    election: &Election,
    committee: &Committee,
    config: &BalanceConfig,
) -> VoteAssignment {
    let mut balancer = Balancer::new(election, config.clone());
    for &c in committee.members() {
        balancer.push_seat(c);
    }
    let mut roots = Vec::new();
    for s in 0..committee.len() {
        roots.push(balancer.find(s));
    }
    roots.sort_unstable();
    roots.dedup();
    for root in roots {
        balancer.rebalance(root);
    }
    balancer.assignment()
}
