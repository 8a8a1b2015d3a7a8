use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto};

use crate::election::Election;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightModel {
    /// Every voter gets the same weight.
    Uniform,
    /// Weights drawn from a Pareto distribution with scale 1 and this shape.
    Pareto { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApprovalModel {
    /// Ballot size uniform in `1..=B`, then a uniformly random subset.
    Impartial,
    /// Candidates are split into `groups` contiguous blocks; each voter picks
    /// a block and approves a random subset of it.
    Clustered { groups: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub ballot_cap: usize,
    pub weights: WeightModel,
    pub approvals: ApprovalModel,
    pub seed: u64,
}

impl GeneratorConfig {
    fn check(&self) -> Result<()> {
        if self.m < self.k {
            return Err(Error::InvalidParameter(format!(
                "m = {} is below k = {}",
                self.m, self.k
            )));
        }
        if self.n == 0 || self.m == 0 || self.k == 0 || self.ballot_cap == 0 {
            return Err(Error::InvalidParameter(
                "n, m, k and the ballot cap must be positive".into(),
            ));
        }
        match self.weights {
            WeightModel::Pareto { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "Pareto shape {alpha} must be positive"
                )))
            }
            _ => {}
        }
        if let ApprovalModel::Clustered { groups } = self.approvals {
            if groups == 0 || groups > self.m {
                return Err(Error::InvalidParameter(format!(
                    "{groups} clusters for {} candidates",
                    self.m
                )));
            }
        }
        Ok(())
    }
}

fn random_ballot(rng: &mut ChaCha8Rng, offset: usize, size: usize, cap: usize) -> Vec<usize> {
    let len = rng.random_range(1..=cap.min(size));
    let mut ballot: Vec<usize> = sample(rng, size, len)
        .into_iter()
        .map(|c| c + offset)
        .collect();
    ballot.sort_unstable();
    ballot
}

/// Deterministic random election; the seed fixes the output. Weights are
/// normalized.
pub fn generate(config: &GeneratorConfig) -> Result<Election> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights: Vec<f64> = match config.weights {
        WeightModel::Uniform => vec![1.0; config.n],
        WeightModel::Pareto { alpha } => {
            let dist =
                Pareto::new(1.0, alpha).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..config.n).map(|_| dist.sample(&mut rng)).collect()
        }
    };
    let ballots: Vec<Vec<usize>> = (0..config.n)
        .map(|_| match config.approvals {
            ApprovalModel::Impartial => random_ballot(&mut rng, 0, config.m, config.ballot_cap),
            ApprovalModel::Clustered { groups } => {
                let g = rng.random_range(0..groups);
                let start = g * config.m / groups;
                let end = (g + 1) * config.m / groups;
                random_ballot(&mut rng, start, end - start, config.ballot_cap)
            }
        })
        .collect();
    Election::new(
        (1..=config.m).map(|i| format!("c{i}")).collect(),
        (1..=config.n).map(|i| format!("v{i}")).collect(),
        weights,
        ballots,
        config.k,
        Some(config.ballot_cap),
    )?
    .normalize()
}
