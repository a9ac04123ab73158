//! Population-based evolution: speciation, fitness sharing, selection,
//! variation, elitism and the island model.

mod config;
mod echo_ops;
mod island;
mod population;
mod rnn_ops;
mod selection;

use rand::Rng;
use rand_distr::{Distribution, Normal};

pub use config::{EvolutionConfig, MutationRates};
pub use island::{migrate, migration_due};
pub use population::{smooth_fitness, Individual, Population, Species};
pub use selection::sus_select;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MutationOp {
    Weights,
    AddSynapse,
    RemoveSynapse,
    AddNeuron,
    RemoveNeuron,
}

/// Picks at most one mutation operator by its per-genome probability.
pub(crate) fn choose_mutation<R: Rng + ?Sized>(
    rates: &MutationRates,
    rng: &mut R,
) -> Option<MutationOp> {
    let u = rng.random::<f64>();
    let mut cumulative = 0.0;
    for (p, op) in [
        (rates.weight, MutationOp::Weights),
        (rates.add_synapse, MutationOp::AddSynapse),
        (rates.remove_synapse, MutationOp::RemoveSynapse),
        (rates.add_neuron, MutationOp::AddNeuron),
        (rates.remove_neuron, MutationOp::RemoveNeuron),
    ] {
        cumulative += p;
        if u < cumulative {
            return Some(op);
        }
    }
    None
}

/// Gaussian draw that is never exactly zero, since a zero weight would
/// mean "no synapse".
pub(crate) fn gaussian_nonzero<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    let normal = Normal::new(0.0, sigma).expect("sigma validated");
    loop {
        let w = normal.sample(rng);
        if w != 0.0 {
            return w;
        }
        if sigma == 0.0 {
            return f64::MIN_POSITIVE;
        }
    }
}
