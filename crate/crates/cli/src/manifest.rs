use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;
use crate::ElectionOverrides;

/// Everything `run` and `measure` need; read from a JSON manifest and/or
/// assembled from flags, flags taking precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub rules: Vec<String>,
    #[serde(default)]
    pub allow_copies: bool,
    #[serde(default)]
    pub ballot_cap: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub committee: Option<PathBuf>,
    #[serde(default)]
    pub metrics: Vec<String>,
    #[serde(default)]
    pub l_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Seconds per minimum-weight ILP.
    #[serde(default)]
    pub time_budget: Option<f64>,
    /// Recorded in measure output; no rule or measure is randomized.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_grid(s: &str) -> Result<Vec<usize>, CliError> {
    split_list(s)
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| CliError::semantic(format!("invalid ℓ value `{p}` in --l-grid")))
        })
        .collect()
}

impl RunManifest {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut manifest: Self = serde_json::from_str(&text).map_err(|e| {
            CliError::Parse(format!(
                "{}: {e} (line {}, column {})",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        manifest.inputs.iter_mut().for_each(rebase);
        manifest.committee.iter_mut().for_each(rebase);
        manifest.out.iter_mut().for_each(rebase);
        Ok(manifest)
    }

    pub fn resolve(
        manifest: Option<&Path>,
        path: Option<PathBuf>,
        rule: Option<String>,
        overrides: ElectionOverrides,
        allow_copies: bool,
        out: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let mut m = match manifest {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(p) = path {
            m.inputs = vec![p];
        }
        if let Some(r) = rule {
            m.rules = split_list(&r);
        }
        m.k = overrides.k.or(m.k);
        m.ballot_cap = overrides.ballot_cap.or(m.ballot_cap);
        m.allow_copies |= allow_copies;
        m.out = out.or(m.out);
        if m.inputs.is_empty() {
            return Err(CliError::semantic("no election input given"));
        }
        Ok(m)
    }

    pub fn merge_measure_flags(
        &mut self,
        committee: Option<PathBuf>,
        metrics: Option<String>,
        l_grid: Option<String>,
        time_budget: Option<f64>,
    ) -> Result<(), CliError> {
        self.committee = committee.or(self.committee.take());
        if let Some(list) = metrics {
            self.metrics = split_list(&list);
        }
        if let Some(grid) = l_grid {
            self.l_grid = Some(parse_grid(&grid)?);
        }
        self.time_budget = time_budget.or(self.time_budget);
        if self
            .time_budget
            .is_some_and(|t| !(t >= 0.0 && t.is_finite()))
        {
            return Err(CliError::semantic(
                "--time-budget must be a nonnegative number of seconds",
            ));
        }
        Ok(())
    }

    pub fn overrides(&self) -> ElectionOverrides {
        ElectionOverrides {
            k: self.k,
            ballot_cap: self.ballot_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1, 15,30").unwrap(), vec![1, 15, 30]);
        assert!(parse_grid("1,x").is_err());
    }

    #[test]
    fn flags_override_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        fs::write(&path, r#"{"inputs": ["e.json"], "rules": ["av"], "k": 4}"#).unwrap();
        let m = RunManifest::resolve(
            Some(&path),
            None,
            Some("mes,phragmms".into()),
            ElectionOverrides {
                k: None,
                ballot_cap: Some(3),
            },
            false,
            None,
        )
        .unwrap();
        assert_eq!(m.inputs, vec![dir.path().join("e.json")]);
        assert_eq!(m.rules, vec!["mes", "phragmms"]);
        assert_eq!((m.k, m.ballot_cap), (Some(4), Some(3)));
    }

    #[test]
    fn malformed_manifest_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        fs::write(&path, "{").unwrap();
        let err = RunManifest::resolve(
            Some(&path),
            None,
            None,
            ElectionOverrides::default(),
            false,
            None,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
