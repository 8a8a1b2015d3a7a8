//! Weighted approval-based committee (ABC) elections as used for validator
//! selection in nominated proof-of-stake networks.
//!
//! The crate is organised around a registry of committee rules
//! ([`rules::RuleRegistry`]): approval voting, satisfaction approval voting,
//! sequential PAV, sequential Phragmén, the method of equal shares and
//! Phragmms all implement [`rules::CommitteeRule`] and can be selected by
//! name at runtime. Committees produced by any rule can then be scored with
//! the underrepresentation measures in [`representation`] and the
//! overrepresentation / attack-cost measures in [`security`].
//!
//! [`oracles`] holds exact, exponential-time reference implementations over
//! rational arithmetic. They exist to cross-check the fast paths on small
//! instances.

pub mod dataset;
pub mod election;
pub mod error;
pub mod io;
pub mod lp;
pub mod oracles;
pub mod representation;
pub mod rules;
pub mod security;

pub use election::{Committee, Election, VoteAssignment};
pub use error::{Error, Result};
pub use rules::{CommitteeRule, Outcome, RuleId, RuleOptions, RuleRegistry, SelectionTrace};

/// Comparison tolerance used by measures on normalized elections.
pub const EPS: f64 = 1e-9;
