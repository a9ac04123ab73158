//! Builds a small Echo Network from its connection matrix and steps it
//! through a short input sequence.
//!
//! cargo run --example echo_evaluation

use echonet::{ActivationFn, EchoGenome, InputFn, OutputFn};

fn main() -> echonet::Result<()> {
    // Neurons 0-2 take the input triplet (neuron 2 sign-reversed), 3 is the
    // output, 4 the bias and 5 a hidden neuron. Row = source, column = target.
    let rows = vec![
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.8],
        vec![0.0, 0.0, 0.0, 0.5, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, -0.4],
        vec![0.0, 0.0, 0.0, 0.3, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, -0.2, 1.0, 0.1],
        vec![0.0, 0.0, 0.0, 1.2, 0.0, 0.0],
    ];
    let genome = EchoGenome::from_rows(
        rows,
        vec![0, 1, 2],
        vec![InputFn::Identity, InputFn::Identity, InputFn::SignReversal],
        vec![3],
        vec![4],
    )?;
    println!(
        "{} neurons, {} non-zero weights, longest input-to-output path {}",
        genome.neuron_count(),
        genome.nonzero_count(),
        genome.longest_acyclic_path()
    );

    let mut state = genome.init_state(1.0);
    for input in [
        [0.2, 0.4, 0.1],
        [1.0, -0.5, 0.3],
        [0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5],
    ] {
        genome.step_in_place(&mut state, &input, ActivationFn::Relu)?;
        let y = genome.read_output(&state, OutputFn::Sigmoid)?[0];
        println!(
            "step {}: input {input:?} -> output {y:.4}, activations {:.3?}",
            state.step(),
            state.activations()
        );
    }
    Ok(())
}
