//! Runs a short repeated experiment for both network types into a
//! temporary directory and prints the accuracy table.
//!
//! cargo run --release --example run_experiment

use echonet::experiment::{run_experiment, summarize, ExperimentConfig};
use echonet::GenomeKind;

fn main() -> echonet::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| echonet::Error::Data(e.to_string()))?;
    for network in [GenomeKind::Echo, GenomeKind::Rnn] {
        let mut config = ExperimentConfig {
            repeats: 3,
            network,
            ..ExperimentConfig::default()
        };
        config.evolution.population_size = 40;
        config.evolution.generations = 15;
        config.evolution.subset_fraction = 0.5;
        run_experiment(&config, &dir.path().join(network.as_str()), &mut |line| {
            println!("  {line}")
        })?;
    }
    print!("{}", summarize(dir.path())?);
    Ok(())
}
