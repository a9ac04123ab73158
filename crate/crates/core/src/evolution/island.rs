//! Ring migration between island populations.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::genome::Evolvable;

use super::{EvolutionConfig, Individual, Population};

/// Whether islands exchange individuals after evaluating `generation`
/// (counted from 1).
pub fn migration_due(generation: usize, config: &EvolutionConfig) -> bool {
    config.migration_interval > 0
        && generation > 0
        && generation.is_multiple_of(config.migration_interval)
}

/// Sends copies of each island's `migrant_count` best individuals (by
/// smoothed fitness) to the next island of the ring, where they replace the
/// worst. Migrants are chosen before any island is modified. Returns
/// whether a migration took place.
pub fn migrate<G: Evolvable>(
    islands: &mut [Population<G>],
    generation: usize,
    config: &EvolutionConfig,
) -> Result<bool> {
    let count = config.migrant_count;
    if !migration_due(generation, config) || count == 0 || islands.len() < 2 {
        return Ok(false);
    }
    if let Some(small) = islands.iter().find(|p| p.len() < count) {
        return Err(Error::PopulationTooSmall {
            population: small.len(),
            required: count,
            what: "migrants",
        });
    }
    let outgoing: Vec<Vec<Individual<G>>> = islands
        .iter()
        .map(|island| {
            ranked(island)
                .into_iter()
                .rev()
                .take(count)
                .map(|i| island.individuals[i].clone())
                .collect()
        })
        .collect();
    let ring = islands.len();
    for (source, migrants) in outgoing.into_iter().enumerate() {
        let target = &mut islands[(source + 1) % ring];
        let worst: Vec<usize> = ranked(target).into_iter().take(count).collect();
        for (slot, migrant) in worst.into_iter().zip(migrants) {
            target.individuals[slot] = migrant;
        }
    }
    Ok(true)
}

/// Indices ordered from worst to best smoothed fitness; ties keep the later
/// index on the worse side.
fn ranked<G>(island: &Population<G>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..island.individuals.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = island.individuals[a].smoothed_fitness;
        let fb = island.individuals[b].smoothed_fitness;
        fa.partial_cmp(&fb)
            .unwrap_or(Ordering::Equal)
            .then(b.cmp(&a))
    });
    order
}
