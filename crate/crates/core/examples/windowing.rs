//! Turns a signal into overlapping three-sample windows and classifies it
//! with a freshly initialised minimal Echo Network.
//!
//! cargo run --example windowing

use echonet::data::{window, Label, Recording};
use echonet::evolution::EvolutionConfig;
use echonet::experiment::rng_stream;
use echonet::harness::{classify_recording, PreparedRecording, WINDOW_WIDTH};
use echonet::{EchoGenome, Evolvable};

fn main() -> echonet::Result<()> {
    let samples: Vec<f64> = (0..1000).map(|t| (t as f64 * 0.1).sin()).collect();
    let windows = window(&samples, WINDOW_WIDTH)?;
    println!(
        "{} samples -> {} x {} windows",
        samples.len(),
        windows.rows(),
        windows.width()
    );
    println!("first rows: {:?} {:?}", windows.row(0), windows.row(1));

    let recording = Recording {
        id: "sine".into(),
        samples,
        label: Label::Normal,
        strat_fold: 1,
        human_validated: true,
        normal_confidence: 100.0,
    };
    let config = EvolutionConfig::default();
    let genome = EchoGenome::minimal(config.sigma_init, &mut rng_stream(3, 2));
    let outcome = classify_recording(
        &genome,
        &PreparedRecording::new(&recording, WINDOW_WIDTH)?,
        config.init_value,
        config.decision_threshold,
    )?;
    println!(
        "mean rounded output {:.3} -> predicted {:?} (true {:?})",
        outcome.mean_output, outcome.predicted, outcome.truth
    );
    Ok(())
}
