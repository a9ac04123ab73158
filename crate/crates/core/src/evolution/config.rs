use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::DistanceCoefficients;

/// Per-genome probabilities of the mutation operators. At most one
/// operator is applied per mutation; probability mass left over after the
/// five operators means "no change".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationRates {
    pub weight: f64,
    pub add_synapse: f64,
    pub remove_synapse: f64,
    pub add_neuron: f64,
    pub remove_neuron: f64,
    /// Fraction of existing synapses touched by a weight mutation (at
    /// least one synapse is always touched).
    pub weight_entry_fraction: f64,
    /// Probability of redrawing a touched weight instead of perturbing it.
    pub redraw: f64,
}

impl Default for MutationRates {
    fn default() -> Self {
        MutationRates {
            weight: 0.88,
            add_synapse: 0.05,
            remove_synapse: 0.03,
            add_neuron: 0.03,
            remove_neuron: 0.01,
            weight_entry_fraction: 0.2,
            redraw: 0.5,
        }
    }
}

impl MutationRates {
    /// All operators disabled.
    pub fn none() -> Self {
        MutationRates {
            weight: 0.0,
            add_synapse: 0.0,
            remove_synapse: 0.0,
            add_neuron: 0.0,
            remove_neuron: 0.0,
            ..Self::default()
        }
    }

    fn operator_total(&self) -> f64 {
        self.weight + self.add_synapse + self.remove_synapse + self.add_neuron + self.remove_neuron
    }
}

/// Hyperparameters of one evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Individuals in the single population.
    pub population_size: usize,
    pub generations: usize,
    /// Share of the training recordings drawn fresh each generation.
    pub subset_fraction: f64,
    /// Share of the population, ranked by shared fitness, excluded from
    /// parent selection.
    pub elimination_proportion: f64,
    pub elite_count: usize,
    pub mutation: MutationRates,
    /// Probability that recombination uses crossover; averaging otherwise.
    pub crossover: f64,
    /// Share of non-elite offspring produced by mutation; the rest come
    /// from recombination.
    pub offspring_mutation_fraction: f64,
    pub sigma_init: f64,
    pub sigma_new: f64,
    pub sigma_perturb: f64,
    pub compatibility_threshold: f64,
    pub distance: DistanceCoefficients,
    pub island_count: usize,
    pub island_population_size: usize,
    pub migration_interval: usize,
    pub migrant_count: usize,
    /// Initial activation of every neuron at the start of a recording.
    pub init_value: f64,
    /// Mean rounded output above which a recording is labelled atypical.
    pub decision_threshold: f64,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 200,
            generations: 200,
            subset_fraction: 0.05,
            elimination_proportion: 0.66,
            elite_count: 6,
            mutation: MutationRates::default(),
            crossover: 0.5,
            offspring_mutation_fraction: 0.5,
            sigma_init: 1.0,
            sigma_new: 1.0,
            sigma_perturb: 0.1,
            compatibility_threshold: 3.0,
            distance: DistanceCoefficients::default(),
            island_count: 8,
            island_population_size: 120,
            migration_interval: 4,
            migrant_count: 2,
            init_value: 1.0,
            decision_threshold: 0.5,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        let m = &self.mutation;
        for (name, v) in [
            ("mutation.weight", m.weight),
            ("mutation.add_synapse", m.add_synapse),
            ("mutation.remove_synapse", m.remove_synapse),
            ("mutation.add_neuron", m.add_neuron),
            ("mutation.remove_neuron", m.remove_neuron),
            ("mutation.weight_entry_fraction", m.weight_entry_fraction),
            ("mutation.redraw", m.redraw),
            ("crossover", self.crossover),
            (
                "offspring_mutation_fraction",
                self.offspring_mutation_fraction,
            ),
            ("elimination_proportion", self.elimination_proportion),
        ] {
            unit(name, v)?;
        }
        if m.operator_total() > 1.0 + 1e-9 {
            return Err(Error::Config(format!(
                "mutation operator probabilities sum to {} > 1",
                m.operator_total()
            )));
        }
        if !(self.subset_fraction > 0.0 && self.subset_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "subset_fraction must lie in (0, 1], got {}",
                self.subset_fraction
            )));
        }
        for (name, v) in [
            ("decision_threshold", self.decision_threshold),
            ("sigma_init", self.sigma_init),
            ("sigma_new", self.sigma_new),
            ("sigma_perturb", self.sigma_perturb),
            ("compatibility_threshold", self.compatibility_threshold),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.population_size == 0 || self.island_population_size == 0 {
            return Err(Error::Config("population sizes must be positive".into()));
        }
        if self.island_count == 0 {
            return Err(Error::Config("island_count must be positive".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be positive".into()));
        }
        Ok(())
    }

    /// Number of individuals kept as parent candidates after elimination.
    pub fn survivor_count(&self, population: usize) -> usize {
        // tolerance keeps 200 * 0.34 at 68 despite rounding in 1 - 0.66
        let kept = (population as f64 * (1.0 - self.elimination_proportion) - 1e-9).ceil() as usize;
        kept.clamp(1, population.max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        EvolutionConfig::default().validate().unwrap();
    }

    #[test]
    fn survivor_arithmetic() {
        let c = EvolutionConfig::default();
        assert_eq!(c.survivor_count(200), 68);
        let keep_all = EvolutionConfig {
            elimination_proportion: 0.0,
            ..c
        };
        assert_eq!(keep_all.survivor_count(200), 200);
    }

    #[test]
    fn rejects_out_of_range_probability() {
        let c = EvolutionConfig {
            crossover: 1.5,
            ..EvolutionConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = EvolutionConfig::default();
        c.mutation.add_neuron = 0.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn parses_partial_toml() {
        let c: EvolutionConfig =
            toml::from_str("population_size = 50\n[mutation]\nweight = 0.5\n").unwrap();
        assert_eq!(c.population_size, 50);
        assert_eq!(c.mutation.weight, 0.5);
        assert_eq!(c.mutation.add_synapse, 0.05);
        assert_eq!(c.elite_count, 6);
    }
}
