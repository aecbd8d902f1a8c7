use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use mspec_core::DistributionSpec;
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Eigenvalues, one file per (n, seed)
    Spectrum,
    /// Binned ESD with a reference-density overlay
    Hist,
    /// Wasserstein distances, scaled edges and invariant-measure TV across n
    Converge,
    /// Chain ESD moments against the loop-path formula
    Moments,
    /// Extreme eigenvalues, and the gap lower bound for chains
    Edge,
    /// Invariant measure and its distance to uniform
    Invariant,
    /// Spectral moments against summed return probabilities
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Complete,
    Chain,
}

#[derive(Debug, Parser)]
#[command(name = "mspec", version, about = "Spectra of random reversible Markov kernels")]
pub struct Args {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, value_enum)]
    pub model: Model,
    /// pointmass:c | uniform:a,b | uniform2:a,b,c,d | beta:a,b | atom0:p,<law>
    #[arg(long)]
    pub law: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    /// Wasserstein orders reported by `converge`
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub p: Vec<f64>,
    /// Largest horizon for `trace`
    #[arg(long, default_value_t = 6)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub experiment: Experiment,
    pub model: Model,
    #[serde(serialize_with = "as_string")]
    pub law: DistributionSpec,
    pub n: Vec<usize>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub bins: usize,
    pub p: Vec<f64>,
    pub max_steps: usize,
}

fn as_string<S: serde::Serializer>(law: &DistributionSpec, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&law.to_string())
}

impl Config {
    pub fn from_args(a: Args) -> Result<Self, Failure> {
        let bad = |m: String| Err(Failure::Config(m));
        let law: DistributionSpec = a.law.parse().map_err(|e: mspec_core::Error| Failure::Config(e.to_string()))?;
        if a.model == Model::Chain && !law.on_unit_interval() {
            return bad(format!("chain environment law {law} must live on [0, 1]"));
        }
        let min_n = if a.model == Model::Chain { 3 } else { 2 };
        if let Some(n) = a.n.iter().find(|n| **n < min_n) {
            return bad(format!("n = {n} is too small; need n >= {min_n}"));
        }
        if a.model == Model::Complete {
            if let Some(n) = a.n.iter().find(|n| **n > mspec_core::config::DENSE_MAX_DIM) {
                return bad(format!("n = {n} exceeds the dense limit {}", mspec_core::config::DENSE_MAX_DIM));
            }
        }
        if a.bins == 0 {
            return bad("--bins must be positive".into());
        }
        if let Some(p) = a.p.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
            return bad(format!("Wasserstein order {p} must be >= 1"));
        }
        match (a.experiment, a.model) {
            (Experiment::Converge, Model::Chain) => return bad("converge runs on the complete model".into()),
            (Experiment::Moments, Model::Complete) => return bad("moments runs on the chain model".into()),
            (Experiment::Converge, _) if a.n.len() < 2 => return bad("converge needs at least two sizes".into()),
            _ => {}
        }
        Ok(Self {
            experiment: a.experiment,
            model: a.model,
            law,
            n: a.n,
            seeds: a.seeds,
            out: a.out,
            bins: a.bins,
            p: a.p,
            max_steps: a.max_steps,
        })
    }

    /// Every (n, seed) pair, sizes outermost.
    pub fn pairs(&self) -> Vec<(usize, u64)> {
        self.n.iter().flat_map(|&n| self.seeds.iter().map(move |&s| (n, s))).collect()
    }
}
