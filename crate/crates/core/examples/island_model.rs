//! Evolves Echo Networks on a ring of islands that exchange their best
//! individuals every few generations.
//!
//! cargo run --release --example island_model

use echonet::data::synth_dataset;
use echonet::experiment::{evolve, rng_stream, ExperimentConfig, Mode, PreparedData};
use echonet::EchoGenome;

fn main() -> echonet::Result<()> {
    let mut config = ExperimentConfig {
        mode: Mode::Islands,
        ..ExperimentConfig::default()
    };
    config.evolution.island_count = 4;
    config.evolution.island_population_size = 30;
    config.evolution.generations = 20;
    config.evolution.subset_fraction = 0.5;
    config.validate()?;

    let split = synth_dataset(&config.synthetic, &mut rng_stream(config.evolution.seed, 0))?;
    let data = PreparedData::new(&split)?;
    let outcome = evolve::<EchoGenome>(&config, &data, 11)?;
    for record in &outcome.metrics.generations {
        println!(
            "generation {:>2}: best fitness {:>8.3}, species {}, best validation accuracy {:.3}",
            record.generation,
            record.best_raw_fitness,
            record.species_count,
            record.best_validation_accuracy
        );
    }
    println!(
        "champion from generation {} reaches test accuracy {:.3}",
        outcome.champion_generation, outcome.test_accuracy
    );
    Ok(())
}
