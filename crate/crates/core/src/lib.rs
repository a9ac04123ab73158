//! Neuroevolution of Echo Networks, recurrent networks described by a single
//! square connection matrix, next to a layered recurrent baseline, applied to
//! binary classification of single-channel time signals.
//!
//! The main pieces:
//!
//! - [`EchoGenome`] and [`EchoState`]: matrix-encoded network and its
//!   step-wise evaluation.
//! - [`RnnGenome`]: layered network with forward and recurrent synapses.
//! - [`evolution`]: speciation, fitness sharing, selection, variation and
//!   island migration, generic over [`Evolvable`].
//! - [`harness`]: windowed classification, fitness and champion tracking.
//! - [`data`]: recording loading, filtering, balancing and synthetic data.
//! - [`experiment`]: repeated runs with on-disk artefacts and summaries.
//! - [`dot`]: Graphviz rendering of genomes.

pub mod activation;
pub mod data;
pub mod dot;
pub mod echo;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod genome;
pub mod harness;
pub mod rnn;

pub use activation::{ActivationFn, InputFn, OutputFn};
pub use echo::{EchoGenome, EchoState, NeuronRole};
pub use error::{Error, Result};
pub use genome::{DistanceCoefficients, Evolvable, GenomeDocument, GenomeKind};
pub use rnn::{NeuronId, RnnEvaluator, RnnGenome, RnnNeuron, RnnStepOutput, Synapse, SynapseKind};
