//! Common interface of the two evolvable network encodings and their
//! on-disk document format.

use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::echo::EchoGenome;
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::rnn::RnnGenome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GenomeKind {
    Echo,
    Rnn,
}

impl GenomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenomeKind::Echo => "echo",
            GenomeKind::Rnn => "rnn",
        }
    }

    /// Name used in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            GenomeKind::Echo => "Echo Network",
            GenomeKind::Rnn => "RNN",
        }
    }
}

impl fmt::Display for GenomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A genome the evolution engine can create, compare, vary and evaluate.
pub trait Evolvable: Clone + Send + Sync + Sized {
    const KIND: GenomeKind;

    /// Minimal starting network: three inputs, one output, one bias.
    fn minimal<R: Rng + ?Sized>(sigma_init: f64, rng: &mut R) -> Self;

    /// Compatibility distance used for speciation.
    fn distance(&self, other: &Self, coefficients: &DistanceCoefficients) -> f64;

    /// Applies at most one mutation operator, chosen by the configured
    /// per-genome probabilities.
    fn mutate<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R);

    /// Child of `fitter` and `other`; size and role designations follow
    /// `fitter`.
    fn recombine<R: Rng + ?Sized>(
        fitter: &Self,
        other: &Self,
        config: &EvolutionConfig,
        rng: &mut R,
    ) -> Self;

    fn check_invariants(&self) -> Result<()>;

    /// Runs the network over a sequence of input rows from a fresh state
    /// and writes the sigmoid output of the first output neuron per row.
    fn output_trace(
        &self,
        rows: &[f64],
        width: usize,
        init_value: f64,
        out: &mut Vec<f64>,
    ) -> Result<()>;

    fn input_count(&self) -> usize;
    fn output_count(&self) -> usize;

    fn into_document(self) -> GenomeDocument;
}

/// Weights of the three distance terms: neuron-count difference,
/// connectivity-pattern mismatch and mean weight gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceCoefficients {
    pub size: f64,
    pub pattern: f64,
    pub weight: f64,
}

impl Default for DistanceCoefficients {
    fn default() -> Self {
        DistanceCoefficients {
            size: 1.0,
            pattern: 2.0,
            weight: 0.5,
        }
    }
}

/// Genome file contents, tagged by network kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genome", rename_all = "snake_case")]
pub enum GenomeDocument {
    Echo(EchoGenome),
    Rnn(RnnGenome),
}

impl GenomeDocument {
    pub fn kind(&self) -> GenomeKind {
        match self {
            GenomeDocument::Echo(_) => GenomeKind::Echo,
            GenomeDocument::Rnn(_) => GenomeKind::Rnn,
        }
    }

    pub fn to_text(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}
