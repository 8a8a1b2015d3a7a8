use super::{exceeds, touched_candidates, Outcome, RuleId, RuleOptions};
use crate::election::Election;
use crate::error::{Error, Result};

/// Event-driven continuous-time Phragmén.
///
/// Voter `v` holds `w(v)·t − offset[v]` money at time `t`. The supporters of
/// `c` reach one unit of money at `t_c = (1 + Σ offset) / w(V_c)`, so the next
/// election time of every candidate is available in closed form and only the
/// candidates sharing a voter with the last winner need recomputing.
pub(crate) struct PhragmenClock<'a> {
    election: &'a Election,
    offsets: Vec<f64>,
    now: f64,
    open: Vec<bool>,
    times: Vec<f64>,
    allow_copies: bool,
}

impl<'a> PhragmenClock<'a> {
    /// `money[v]` is the amount voter `v` holds at time zero.
    pub(crate) fn new(
        election: &'a Election,
        money: Option<&[f64]>,
        open: Vec<bool>,
        allow_copies: bool,
    ) -> Self {
        let offsets = match money {
            Some(money) => money.iter().map(|&m| -m).collect(),
            None => vec![0.0; election.num_voters()],
        };
        let mut clock = Self {
            election,
            offsets,
            now: 0.0,
            open,
            times: vec![f64::INFINITY; election.num_candidates()],
            allow_copies,
        };
        for c in 0..election.num_candidates() {
            clock.times[c] = clock.time_of(c);
        }
        clock
    }

    fn time_of(&self, c: usize) -> f64 {
        let supporters = self.election.supporters_of(c);
        let weight: f64 = supporters.iter().map(|&v| self.election.weight(v)).sum();
        let offset: f64 = supporters.iter().map(|&v| self.offsets[v]).sum();
        if weight > 0.0 {
            ((1.0 + offset) / weight).max(self.now)
        } else if -offset >= 1.0 - 1e-12 {
            self.now
        } else {
            f64::INFINITY
        }
    }

    /// Elects the next candidate, returning it with its election time.
    pub(crate) fn step(&mut self) -> Option<(usize, f64)> {
        let mut best: Option<usize> = None;
        for c in (0..self.times.len()).filter(|&c| self.open[c]) {
            if self.times[c].is_finite()
                && best.is_none_or(|b| exceeds(self.times[b], self.times[c]))
            {
                best = Some(c);
            }
        }
        let chosen = best?;
        let t = self.times[chosen];
        self.now = t;
        if !self.allow_copies {
            self.open[chosen] = false;
        }
        let supporters = self.election.supporters_of(chosen);
        for &v in supporters {
            self.offsets[v] = self.election.weight(v) * t;
        }
        let mut dirty = vec![false; self.times.len()];
        touched_candidates(self.election, supporters, &mut dirty);
        dirty[chosen] = true;
        for c in (0..self.times.len()).filter(|&c| dirty[c]) {
            self.times[c] = self.time_of(c);
        }
        Some((chosen, t))
    }
}

/// Sequential Phragmén. `initial_money` seeds voter balances at time zero
/// (used by the MES completion phase); by default every voter starts empty.
pub fn run_seq_phragmen(
    election: &Election,
    options: &RuleOptions,
    initial_money: Option<&[f64]>,
) -> Result<Outcome> {
    if let Some(money) = initial_money {
        if money.len() != election.num_voters() {
            return Err(Error::InvalidParameter(format!(
                "initial money for {} voters, election has {}",
                money.len(),
                election.num_voters()
            )));
        }
    }
    let open = vec![true; election.num_candidates()];
    let mut clock = PhragmenClock::new(election, initial_money, open, options.allow_copies);
    let k = election.k();
    let mut order = Vec::with_capacity(k);
    let mut times = Vec::with_capacity(k);
    while order.len() < k {
        let (c, t) = clock.step().ok_or(Error::InsufficientElectable {
            filled: order.len(),
            k,
        })?;
        order.push(c);
        times.push(t);
    }
    Outcome::sequential(
        election,
        RuleId::SeqPhragmen,
        order,
        times,
        options.allow_copies,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;

    #[test]
    fn e1_times() {
        let out = run_seq_phragmen(&e1(), &RuleOptions::default(), None).unwrap();
        assert_eq!(out.trace.order, vec![0, 1]);
        assert!((out.trace.per_round[0] - 1.25).abs() < 1e-12);
        assert!((out.trace.per_round[1] - 55.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_tie_is_lexicographic() {
        let e = Election::from_ballots(2, 2, &[0.5, 0.5], &[&[1], &[0]]).unwrap();
        let out = run_seq_phragmen(&e, &RuleOptions::default(), None).unwrap();
        assert_eq!(out.trace.order, vec![0, 1]);
        assert_eq!(out.trace.per_round, vec![2.0, 2.0]);
    }

    #[test]
    fn single_voter() {
        let e = Election::from_ballots(1, 1, &[1.0], &[&[0]]).unwrap();
        let out = run_seq_phragmen(&e, &RuleOptions::default(), None).unwrap();
        assert_eq!(out.trace.order, vec![0]);
        assert_eq!(out.trace.per_round, vec![1.0]);
    }

    #[test]
    fn unsupported_candidates_are_never_elected() {
        let e = Election::from_ballots(3, 2, &[1.0], &[&[0]]).unwrap();
        assert_eq!(
            run_seq_phragmen(&e, &RuleOptions::default(), None),
            Err(Error::InsufficientElectable { filled: 1, k: 2 })
        );
    }

    #[test]
    fn initial_money_shortens_the_wait() {
        let e = Election::from_ballots(2, 1, &[0.5, 0.5], &[&[0], &[1]]).unwrap();
        let out = run_seq_phragmen(&e, &RuleOptions::default(), Some(&[0.0, 0.5])).unwrap();
        assert_eq!(out.trace.order, vec![1]);
        assert!((out.trace.per_round[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn copies_reelect_a_dominant_candidate() {
        let e = Election::from_ballots(2, 3, &[0.9, 0.1], &[&[0], &[1]]).unwrap();
        let out = run_seq_phragmen(&e, &RuleOptions::with_copies(), None).unwrap();
        assert_eq!(out.committee.multiplicity(0), 3);
        assert!(out.trace.per_round.windows(2).all(|w| w[0] <= w[1]));
    }
}
