use std::cmp::Ordering;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::{DistanceCoefficients, Evolvable};

use super::{sus_select, EvolutionConfig};

/// One genome with its fitness record.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<G> {
    pub genome: G,
    pub raw_fitness: f64,
    pub smoothed_fitness: f64,
    pub shared_fitness: f64,
    /// Raw fitness from the previous generation, if the individual (or the
    /// parent it was mutated from) existed then.
    pub previous_fitness: Option<f64>,
    pub species_id: usize,
    pub age: usize,
}

impl<G> Individual<G> {
    pub fn new(genome: G) -> Self {
        Individual {
            genome,
            raw_fitness: 0.0,
            smoothed_fitness: 0.0,
            shared_fitness: 0.0,
            previous_fitness: None,
            species_id: 0,
            age: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species<G> {
    pub id: usize,
    pub representative: G,
    /// Indices into the population's individuals.
    pub members: Vec<usize>,
    pub best_smoothed_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct Population<G> {
    pub individuals: Vec<Individual<G>>,
    pub species: Vec<Species<G>>,
    pub generation: usize,
    /// Seed of the stream that drives this population's evolution.
    pub seed: u64,
    next_species_id: usize,
}

/// Mean of the current and previous raw fitness; new individuals keep
/// their current value.
pub fn smooth_fitness(current: f64, previous: Option<f64>) -> f64 {
    match previous {
        Some(p) => (current + p) / 2.0,
        None => current,
    }
}

fn descending(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

impl<G: Evolvable> Population<G> {
    /// `size` minimal genomes with Gaussian initial weights.
    pub fn seed<R: Rng + ?Sized>(
        size: usize,
        config: &EvolutionConfig,
        seed: u64,
        rng: &mut R,
    ) -> Self {
        let individuals = (0..size)
            .map(|_| Individual::new(G::minimal(config.sigma_init, rng)))
            .collect();
        Population::from_individuals(individuals, seed)
    }

    pub fn from_individuals(individuals: Vec<Individual<G>>, seed: u64) -> Self {
        Population {
            individuals,
            species: Vec::new(),
            generation: 0,
            seed,
            next_species_id: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Stores this generation's raw fitness values and their smoothed form.
    pub fn record_fitness(&mut self, raw: &[f64]) -> Result<()> {
        if raw.len() != self.individuals.len() {
            return Err(Error::Config(format!(
                "{} fitness values for {} individuals",
                raw.len(),
                self.individuals.len()
            )));
        }
        for (ind, &f) in self.individuals.iter_mut().zip(raw) {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::Config(format!("invalid fitness value {f}")));
            }
            ind.raw_fitness = f;
            ind.smoothed_fitness = smooth_fitness(f, ind.previous_fitness);
        }
        Ok(())
    }

    /// Index of the individual with the highest raw fitness (first on ties).
    pub fn champion_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, ind) in self.individuals.iter().enumerate() {
            if best.is_none_or(|b| ind.raw_fitness > self.individuals[b].raw_fitness) {
                best = Some(i);
            }
        }
        best
    }

    /// Assigns every individual to the first species whose representative
    /// lies within `threshold`, founding new species as needed. Afterwards
    /// each species draws a random member as representative for the next
    /// call.
    pub fn speciate<R: Rng + ?Sized>(
        &mut self,
        threshold: f64,
        coefficients: &DistanceCoefficients,
        rng: &mut R,
    ) {
        for s in &mut self.species {
            s.members.clear();
        }
        for i in 0..self.individuals.len() {
            let genome = &self.individuals[i].genome;
            let slot = self
                .species
                .iter()
                .position(|s| s.representative.distance(genome, coefficients) <= threshold);
            let slot = match slot {
                Some(slot) => slot,
                None => {
                    self.species.push(Species {
                        id: self.next_species_id,
                        representative: genome.clone(),
                        members: Vec::new(),
                        best_smoothed_fitness: 0.0,
                    });
                    self.next_species_id += 1;
                    self.species.len() - 1
                }
            };
            self.species[slot].members.push(i);
            self.individuals[i].species_id = self.species[slot].id;
        }
        self.species.retain(|s| !s.members.is_empty());
        for s in &mut self.species {
            let pick = *s.members.choose(rng).expect("species are non-empty");
            s.representative = self.individuals[pick].genome.clone();
            s.best_smoothed_fitness = s
                .members
                .iter()
                .map(|&m| self.individuals[m].smoothed_fitness)
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }

    /// Divides each smoothed fitness by the size of its species.
    pub fn share_fitness(&mut self) {
        for s in &self.species {
            let size = s.members.len() as f64;
            for &m in &s.members {
                let ind = &mut self.individuals[m];
                ind.shared_fitness = ind.smoothed_fitness / size;
            }
        }
    }

    /// Records `raw` fitness and replaces the population with its successor.
    pub fn next_generation<R: Rng + ?Sized>(
        &mut self,
        raw: &[f64],
        config: &EvolutionConfig,
        rng: &mut R,
    ) -> Result<()> {
        self.record_fitness(raw)?;
        self.reproduce(config, rng)
    }

    /// Builds the next generation from already recorded fitness values:
    /// speciation and sharing, elites copied unchanged, the bottom share by
    /// shared fitness eliminated, and the remaining slots filled with
    /// mutated and recombined offspring of parents drawn by stochastic
    /// universal sampling.
    pub fn reproduce<R: Rng + ?Sized>(
        &mut self,
        config: &EvolutionConfig,
        rng: &mut R,
    ) -> Result<()> {
        let size = self.individuals.len();
        if size == 0 || size < config.elite_count {
            return Err(Error::PopulationTooSmall {
                population: size,
                required: config.elite_count.max(1),
                what: "elites",
            });
        }
        self.speciate(config.compatibility_threshold, &config.distance, rng);
        self.share_fitness();

        let mut by_smoothed: Vec<usize> = (0..size).collect();
        by_smoothed.sort_by(|&a, &b| {
            descending(
                self.individuals[a].smoothed_fitness,
                self.individuals[b].smoothed_fitness,
            )
        });
        let mut by_shared: Vec<usize> = (0..size).collect();
        by_shared.sort_by(|&a, &b| {
            descending(
                self.individuals[a].shared_fitness,
                self.individuals[b].shared_fitness,
            )
        });
        let survivors = &by_shared[..config.survivor_count(size)];
        let mut weights: Vec<f64> = survivors
            .iter()
            .map(|&i| self.individuals[i].shared_fitness)
            .collect();
        if weights.iter().all(|&w| w <= 0.0) {
            weights.iter_mut().for_each(|w| *w = 1.0);
        }

        let mut next = Vec::with_capacity(size);
        for &i in &by_smoothed[..config.elite_count] {
            let parent = &self.individuals[i];
            next.push(Individual {
                previous_fitness: Some(parent.raw_fitness),
                species_id: parent.species_id,
                age: parent.age + 1,
                ..Individual::new(parent.genome.clone())
            });
        }

        let offspring = size - config.elite_count;
        let mutants = (offspring as f64 * config.offspring_mutation_fraction).round() as usize;
        let mutants = mutants.min(offspring);
        let pairs = offspring - mutants;

        for pick in sus_select(&weights, mutants, rng)? {
            let parent = &self.individuals[survivors[pick]];
            let mut genome = parent.genome.clone();
            genome.mutate(config, rng);
            debug_assert!(genome.check_invariants().is_ok());
            next.push(Individual {
                previous_fitness: Some(parent.raw_fitness),
                species_id: parent.species_id,
                ..Individual::new(genome)
            });
        }

        let mut mates = sus_select(&weights, 2 * pairs, rng)?;
        mates.shuffle(rng);
        for pair in mates.chunks_exact(2) {
            let a = &self.individuals[survivors[pair[0]]];
            let b = &self.individuals[survivors[pair[1]]];
            let (fitter, other) = if b.smoothed_fitness > a.smoothed_fitness {
                (b, a)
            } else {
                (a, b)
            };
            let genome = G::recombine(&fitter.genome, &other.genome, config, rng);
            debug_assert!(genome.check_invariants().is_ok());
            next.push(Individual {
                species_id: fitter.species_id,
                ..Individual::new(genome)
            });
        }
        debug_assert_eq!(next.len(), size);
        self.individuals = next;
        self.generation += 1;
        Ok(())
    }
}
