//! Builds a layered RNN baseline, shows the layers derived from its forward
//! synapses and runs a few time steps.
//!
//! cargo run --example rnn_baseline

use std::collections::BTreeMap;

use echonet::rnn::{RnnGenome, RnnNeuron, Synapse, SynapseKind};
use echonet::NeuronRole;

fn neuron(id: u32, role: NeuronRole) -> RnnNeuron {
    RnnNeuron { id, role, layer: 0 }
}

fn synapse(src: u32, dst: u32, weight: f64, kind: SynapseKind) -> Synapse {
    Synapse {
        src,
        dst,
        weight,
        kind,
    }
}

fn main() -> echonet::Result<()> {
    use SynapseKind::{Forward, Recurrent};
    let genome = RnnGenome::new(
        vec![
            neuron(0, NeuronRole::Input),
            neuron(1, NeuronRole::Input),
            neuron(2, NeuronRole::Input),
            neuron(3, NeuronRole::Output),
            neuron(4, NeuronRole::Bias),
            neuron(5, NeuronRole::Hidden),
            neuron(6, NeuronRole::Hidden),
        ],
        vec![
            synapse(0, 5, 0.9, Forward),
            synapse(1, 5, -0.3, Forward),
            synapse(5, 6, 1.1, Forward),
            synapse(2, 6, 0.4, Forward),
            synapse(6, 3, 0.7, Forward),
            synapse(4, 3, -0.5, Forward),
            synapse(6, 5, 0.5, Recurrent),
            synapse(3, 3, 0.2, Recurrent),
        ],
    )?;
    for n in genome.neurons() {
        println!("neuron {} ({:?}) on layer {}", n.id, n.role, n.layer);
    }

    let mut activations: BTreeMap<u32, f64> =
        genome.neurons().iter().map(|n| (n.id, 0.0)).collect();
    for input in [[1.0, 0.0, 0.5], [0.5, 0.5, 0.5], [0.0, 1.0, -1.0]] {
        let out = genome.rnn_step(&activations, &input)?;
        println!("input {input:?} -> output {:.4}", out.outputs[0]);
        activations = out.activations;
    }
    Ok(())
}
