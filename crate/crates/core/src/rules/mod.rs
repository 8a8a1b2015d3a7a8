//! Committee rules behind a common trait, selectable by name.
//!
//! Every rule returns the committee together with a [`SelectionTrace`]: the
//! chronological selection order and one rule-specific scalar per round.
//! The replacement-cost formulas in [`crate::security`] read these scalars
//! back, so traces are part of each rule's contract.

mod approval;
mod balance;
mod mes;
mod phragmms;
mod seq_pav;
mod seq_phragmen;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::election::{Committee, Election, VoteAssignment};
use crate::error::{Error, Result};

pub use approval::{run_av, run_sav};
pub use balance::{balanced_assignment, balanced_assignment_with, BalanceConfig};
pub use mes::run_mes;
pub use phragmms::{phragmms_score, run_phragmms};
pub use seq_pav::run_seq_pav;
pub use seq_phragmen::run_seq_phragmen;

/// Relative gap below which two sequential-rule scores are treated as tied.
/// Ties go to the smaller candidate index.
pub(crate) const TIE_REL: f64 = 1e-10;

/// `a` is larger than `b` by more than the tie tolerance.
pub(crate) fn exceeds(a: f64, b: f64) -> bool {
    a - b > TIE_REL * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Av,
    Sav,
    SeqPav,
    SeqPhragmen,
    Mes,
    Phragmms,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [
        RuleId::Av,
        RuleId::Sav,
        RuleId::SeqPav,
        RuleId::SeqPhragmen,
        RuleId::Mes,
        RuleId::Phragmms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Av => "av",
            RuleId::Sav => "sav",
            RuleId::SeqPav => "seq-pav",
            RuleId::SeqPhragmen => "seq-phragmen",
            RuleId::Mes => "mes",
            RuleId::Phragmms => "phragmms",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Ok(match key.as_str() {
            "av" | "approval" => RuleId::Av,
            "sav" => RuleId::Sav,
            "seq-pav" | "seqpav" | "pav" => RuleId::SeqPav,
            "seq-phragmen" | "seqphragmen" | "phragmen" | "seq-phragmén" => RuleId::SeqPhragmen,
            "mes" | "equal-shares" => RuleId::Mes,
            "phragmms" => RuleId::Phragmms,
            _ => return Err(Error::UnknownRule(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Mes,
    Completion,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Mes => "mes",
            Phase::Completion => "completion",
        }
    }
}

/// Chronological record of a rule execution.
///
/// `per_round[i]` holds the scalar that decided round `i`: approval weight
/// (AV), SAV score, seq-PAV marginal score, seq-Phragmén election time,
/// Phragmms score, or MES `q` / completion time depending on `phase[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub rule: RuleId,
    pub order: Vec<usize>,
    pub per_round: Vec<f64>,
    pub phase: Option<Vec<Phase>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleOptions {
    /// Multi-copy selection: elected candidates stay eligible.
    pub allow_copies: bool,
    pub balance: BalanceConfig,
}

impl RuleOptions {
    pub fn with_copies() -> Self {
        Self {
            allow_copies: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub committee: Committee,
    pub trace: SelectionTrace,
    /// Final vote assignment for rules that maintain one (Phragmms).
    pub assignment: Option<VoteAssignment>,
}

impl Outcome {
    pub(crate) fn sequential(
        election: &Election,
        rule: RuleId,
        order: Vec<usize>,
        per_round: Vec<f64>,
        allow_copies: bool,
    ) -> Result<Self> {
        let committee = Committee::new(order.clone(), election.num_candidates(), allow_copies)?;
        Ok(Self {
            committee,
            trace: SelectionTrace {
                rule,
                order,
                per_round,
                phase: None,
            },
            assignment: None,
        })
    }
}

/// An approval-based committee rule.
pub trait CommitteeRule: Send + Sync {
    fn id(&self) -> RuleId;

    fn name(&self) -> &'static str {
        self.id().name()
    }

    /// Whether the rule has a multi-copy variant.
    fn supports_copies(&self) -> bool {
        false
    }

    fn elect(&self, election: &Election, options: &RuleOptions) -> Result<Outcome>;
}

macro_rules! rule {
    ($ty:ident, $id:expr, $copies:expr, |$e:ident, $o:ident| $body:expr) => {
        #[derive(Debug, Default, Clone, Copy)]
        pub struct $ty;

        impl CommitteeRule for $ty {
            fn id(&self) -> RuleId {
                $id
            }

            fn supports_copies(&self) -> bool {
                $copies
            }

            fn elect(&self, $e: &Election, $o: &RuleOptions) -> Result<Outcome> {
                if $o.allow_copies && !$copies {
                    return Err(Error::CopiesUnsupported($id.name()));
                }
                $body
            }
        }
    };
}

rule!(ApprovalVoting, RuleId::Av, false, |e, _o| run_av(e));
rule!(SatisfactionApprovalVoting, RuleId::Sav, false, |e, _o| {
    run_sav(e)
});
rule!(SequentialPav, RuleId::SeqPav, true, |e, o| run_seq_pav(
    e, o
));
rule!(SequentialPhragmen, RuleId::SeqPhragmen, true, |e, o| {
    run_seq_phragmen(e, o, None)
});
rule!(EqualShares, RuleId::Mes, true, |e, o| run_mes(e, o));
rule!(Phragmms, RuleId::Phragmms, true, |e, o| run_phragmms(e, o));

/// Name-keyed collection of rules.
pub struct RuleRegistry {
    rules: BTreeMap<&'static str, Box<dyn CommitteeRule>>,
}

impl RuleRegistry {
    pub fn empty() -> Self {
        Self {
            rules: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, rule: Box<dyn CommitteeRule>) {
        self.rules.insert(rule.name(), rule);
    }

    /// Looks a rule up by canonical name or alias.
    pub fn get(&self, name: &str) -> Result<&dyn CommitteeRule> {
        let id = RuleId::from_str(name)?;
        self.rules
            .get(id.name())
            .map(Box::as_ref)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn CommitteeRule> {
        self.rules.values().map(Box::as_ref)
    }
}

impl Default for RuleRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(ApprovalVoting));
        registry.register(Box::new(SatisfactionApprovalVoting));
        registry.register(Box::new(SequentialPav));
        registry.register(Box::new(SequentialPhragmen));
        registry.register(Box::new(EqualShares));
        registry.register(Box::new(Phragmms));
        registry
    }
}

/// Runs `rule` through the default registry.
pub fn run_rule(rule: RuleId, election: &Election, options: &RuleOptions) -> Result<Outcome> {
    RuleRegistry::default()
        .get(rule.name())?
        .elect(election, options)
}

/// Candidates adjacent (through a shared voter) to any of `voters`.
pub(crate) fn touched_candidates(election: &Election, voters: &[usize], mark: &mut [bool]) {
    for &v in voters {
        for &c in election.ballot(v) {
            mark[c] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;

    #[test]
    fn registry_resolves_names_and_aliases() {
        let registry = RuleRegistry::default();
        assert_eq!(registry.names().count(), 6);
        for id in RuleId::ALL {
            assert_eq!(registry.get(id.name()).unwrap().id(), id);
        }
        assert_eq!(
            registry.get("Seq_Phragmen").unwrap().id(),
            RuleId::SeqPhragmen
        );
        assert!(matches!(registry.get("stv"), Err(Error::UnknownRule(_))));
    }

    #[test]
    fn copies_rejected_for_av_and_sav() {
        let registry = RuleRegistry::default();
        let opts = RuleOptions::with_copies();
        for name in ["av", "sav"] {
            let rule = registry.get(name).unwrap();
            assert!(!rule.supports_copies());
            assert!(matches!(
                rule.elect(&e1(), &opts),
                Err(Error::CopiesUnsupported(_))
            ));
        }
        for name in ["seq-pav", "seq-phragmen", "mes", "phragmms"] {
            assert!(registry.get(name).unwrap().supports_copies());
        }
    }

    #[test]
    fn every_rule_fills_k_seats() {
        let e = e1();
        for rule in RuleRegistry::default().iter() {
            let out = rule.elect(&e, &RuleOptions::default()).unwrap();
            assert_eq!(out.committee.len(), 2, "{}", rule.name());
            assert_eq!(out.trace.per_round.len(), 2);
        }
    }
}
