//! Drives a single Echo Network population by hand on the synthetic
//! burst-versus-sine task and prints per-generation statistics.
//!
//! cargo run --release --example evolve_synthetic [generations]

use echonet::data::{synth_dataset, SynthConfig};
use echonet::evolution::{EvolutionConfig, Population};
use echonet::experiment::{rng_stream, PreparedData};
use echonet::harness::{error_rate, fitness_of, sample_subset};
use echonet::{EchoGenome, Evolvable};

fn main() -> echonet::Result<()> {
    let generations: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(30);
    let config = EvolutionConfig {
        population_size: 50,
        subset_fraction: 0.5,
        ..EvolutionConfig::default()
    };
    let split = synth_dataset(&SynthConfig::default(), &mut rng_stream(1, 0))?;
    let data = PreparedData::new(&split)?;

    let mut subset_rng = rng_stream(1, 1);
    let mut rng = rng_stream(1, 2);
    let mut population: Population<EchoGenome> =
        Population::seed(config.population_size, &config, 1, &mut rng);

    println!("gen  best_fitness  val_acc  species  mean_neurons  max_neurons  max_distance");
    for generation in 1..=generations {
        let subset = sample_subset(data.train.len(), config.subset_fraction, &mut subset_rng);
        let raw = population
            .individuals
            .iter()
            .map(|ind| {
                fitness_of(
                    &ind.genome,
                    subset.iter().map(|&i| &data.train[i]),
                    config.init_value,
                    config.decision_threshold,
                )
            })
            .collect::<echonet::Result<Vec<f64>>>()?;
        population.record_fitness(&raw)?;
        let champion = &population.individuals[population.champion_index().unwrap()];
        let val_acc = 1.0
            - error_rate(
                &champion.genome,
                &data.validation,
                config.init_value,
                config.decision_threshold,
            )?;
        let best = champion.raw_fitness;

        let sizes: Vec<usize> = population
            .individuals
            .iter()
            .map(|i| i.genome.neuron_count())
            .collect();
        let first = &population.individuals[0].genome;
        let max_distance = population
            .individuals
            .iter()
            .map(|i| first.distance(&i.genome, &config.distance))
            .fold(0.0, f64::max);

        population.reproduce(&config, &mut rng)?;
        println!(
            "{generation:>3}  {best:>12.3}  {val_acc:>7.3}  {:>7}  {:>12.2}  {:>11}  {max_distance:>12.3}",
            population.species.len(),
            sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
            sizes.iter().max().unwrap(),
        );
    }
    Ok(())
}
