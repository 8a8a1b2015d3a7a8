//! JSON file formats for elections, committees and selection traces.
//!
//! Weights are written as decimal strings. Readers accept strings, integers
//! and plain JSON numbers. Committees and traces refer to candidates by
//! identifier, so they stay meaningful across elections of a series.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use crate::rules::{Phase, RuleId, SelectionTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawWeight {
    Decimal(String),
    Integer(u64),
    Number(f64),
}

impl RawWeight {
    pub fn value(&self) -> Result<f64> {
        match self {
            RawWeight::Integer(i) => Ok(*i as f64),
            RawWeight::Number(x) => Ok(*x),
            RawWeight::Decimal(s) => {
                let trimmed = s.trim();
                let numeric = !trimmed.is_empty()
                    && trimmed
                        .chars()
                        .all(|ch| ch.is_ascii_digit() || matches!(ch, '.' | '-' | '+' | 'e' | 'E'));
                match trimmed.parse::<f64>() {
                    Ok(x) if numeric && x.is_finite() => Ok(x),
                    _ => Err(Error::Parse(format!(
                        "weight `{s}` is not a decimal number"
                    ))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoterRecord {
    pub id: String,
    pub weight: RawWeight,
    pub approvals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionFile {
    #[serde(default)]
    pub meta: Value,
    pub k: usize,
    #[serde(default)]
    pub ballot_cap: Option<usize>,
    pub candidates: Vec<String>,
    pub voters: Vec<VoterRecord>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "{what}: {e} (line {}, column {})",
            e.line(),
            e.column()
        ))
    })
}

impl ElectionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "election file")
    }

    /// Builds the election with raw (unnormalized) weights.
    pub fn to_election(&self) -> Result<Election> {
        let weights = self
            .voters
            .iter()
            .map(|v| v.weight.value())
            .collect::<Result<Vec<_>>>()?;
        Election::new(
            self.candidates.clone(),
            self.voters.iter().map(|v| v.id.clone()).collect(),
            weights,
            self.voters.iter().map(|v| v.approvals.clone()).collect(),
            self.k,
            self.ballot_cap,
        )
    }

    pub fn from_election(election: &Election, meta: Value) -> Self {
        Self {
            meta,
            k: election.k(),
            ballot_cap: election.ballot_cap(),
            candidates: election.candidates().to_vec(),
            voters: (0..election.num_voters())
                .map(|v| VoterRecord {
                    id: election.voters()[v].clone(),
                    weight: RawWeight::Decimal(format!("{}", election.weight(v))),
                    approvals: election.ballot(v).to_vec(),
                })
                .collect(),
        }
    }

    /// Era label from `meta.era`, if present.
    pub fn era(&self) -> Option<u64> {
        self.meta.get("era").and_then(Value::as_u64)
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

fn resolve(election: &Election, ids: &[String]) -> Result<Vec<usize>> {
    ids.iter()
        .map(|id| {
            election
                .candidate_index(id)
                .ok_or_else(|| Error::UnknownCandidateId(id.clone()))
        })
        .collect()
}

fn names(election: &Election, members: &[usize]) -> Vec<String> {
    members
        .iter()
        .map(|&c| election.candidates()[c].clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitteeFile {
    pub rule: String,
    #[serde(default)]
    pub allow_copies: bool,
    pub members: Vec<String>,
}

impl CommitteeFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "committee file")
    }

    pub fn new(election: &Election, rule: RuleId, committee: &Committee) -> Self {
        Self {
            rule: rule.name().to_string(),
            allow_copies: committee.allow_copies(),
            members: names(election, committee.members()),
        }
    }

    pub fn to_committee(&self, election: &Election) -> Result<Committee> {
        Committee::new(
            resolve(election, &self.members)?,
            election.num_candidates(),
            self.allow_copies,
        )
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub rule: String,
    pub order: Vec<String>,
    pub per_round: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Vec<String>>,
}

impl TraceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "trace file")
    }

    pub fn new(election: &Election, trace: &SelectionTrace) -> Self {
        Self {
            rule: trace.rule.name().to_string(),
            order: names(election, &trace.order),
            per_round: trace.per_round.clone(),
            phase: trace
                .phase
                .as_ref()
                .map(|p| p.iter().map(|ph| ph.name().to_string()).collect()),
        }
    }

    pub fn to_trace(&self, election: &Election) -> Result<SelectionTrace> {
        let order = resolve(election, &self.order)?;
        if order.len() != self.per_round.len() {
            return Err(Error::Validation(format!(
                "trace lists {} candidates but {} per-round values",
                order.len(),
                self.per_round.len()
            )));
        }
        let phase = self
            .phase
            .as_ref()
            .map(|p| {
                p.iter()
                    .map(|s| match s.as_str() {
                        "mes" => Ok(Phase::Mes),
                        "completion" => Ok(Phase::Completion),
                        other => Err(Error::Parse(format!("unknown phase `{other}`"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(SelectionTrace {
            rule: self.rule.parse()?,
            order,
            per_round: self.per_round.clone(),
            phase,
        })
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::fixtures::e1;
    use crate::rules::{run_mes, RuleOptions};

    const E1: &str = r#"{
        "meta": {"era": 7},
        "k": 2,
        "ballot_cap": null,
        "candidates": ["c1", "c2", "c3"],
        "voters": [
            {"id": "v1", "weight": "5", "approvals": [0]},
            {"id": "v2", "weight": 3, "approvals": [0, 1]},
            {"id": "v3", "weight": "2.0", "approvals": [2]}
        ]
    }"#;

    #[test]
    fn parses_mixed_weights() {
        let file = ElectionFile::parse(E1).unwrap();
        assert_eq!(file.era(), Some(7));
        let e = file.to_election().unwrap().normalize().unwrap();
        assert_eq!(e.weights(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ElectionFile::parse("{\n  \"k\": ,\n}").unwrap_err();
        assert!(
            matches!(&err, Error::Parse(m) if m.contains("line 2")),
            "{err}"
        );
        let bad = E1.replace("\"2.0\"", "\"two\"");
        assert!(matches!(
            ElectionFile::parse(&bad).unwrap().to_election(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn election_round_trip() {
        let e = e1();
        let text = ElectionFile::from_election(&e, Value::Null).to_json();
        let back = ElectionFile::parse(&text).unwrap();
        assert_eq!(back.to_election().unwrap(), e);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn trace_round_trip() {
        let e = e1();
        let out = run_mes(&e, &RuleOptions::default()).unwrap();
        let text = TraceFile::new(&e, &out.trace).to_json();
        assert!(text.contains("\"completion\""));
        let back = TraceFile::parse(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.to_trace(&e).unwrap(), out.trace);

        let committee = CommitteeFile::new(&e, RuleId::Mes, &out.committee).to_json();
        let parsed = CommitteeFile::parse(&committee).unwrap();
        assert_eq!(parsed.to_json(), committee);
        assert_eq!(parsed.to_committee(&e).unwrap(), out.committee);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let e = e1();
        let file = CommitteeFile {
            rule: "av".into(),
            allow_copies: false,
            members: vec!["c9".into()],
        };
        assert_eq!(
            file.to_committee(&e),
            Err(Error::UnknownCandidateId("c9".into()))
        );
    }
}
