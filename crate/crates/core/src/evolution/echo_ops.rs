//! Variation operators and speciation distance for Echo Networks.
//!
//! Every operator works directly on the connection matrix: growing the
//! network appends a row and a column, shrinking it deletes one of each,
//! and recombination aligns parents by position in the matrix.

use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::activation::{ActivationFn, InputFn, OutputFn};
use crate::echo::EchoGenome;
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::genome::{DistanceCoefficients, Evolvable, GenomeDocument, GenomeKind};

use super::{choose_mutation, gaussian_nonzero, MutationOp};

const MINIMAL_INPUTS: [usize; 3] = [0, 1, 2];
const MINIMAL_OUTPUT: usize = 3;
const MINIMAL_BIAS: usize = 4;

impl EchoGenome {
    /// Positions `(row, col)` whose weights evolve freely: everything
    /// outside bias columns.
    fn free_positions(&self, nonzero: bool) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| !self.is_bias(c) && (self.weight(r, c) != 0.0) == nonzero)
            .collect()
    }

    fn set(&mut self, r: usize, c: usize, w: f64) {
        let n = self.n;
        self.weights[r * n + c] = w;
    }

    fn mutate_weights<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        let candidates = self.free_positions(true);
        if candidates.is_empty() {
            return;
        }
        let touched = ((candidates.len() as f64 * config.mutation.weight_entry_fraction).round()
            as usize)
            .clamp(1, candidates.len());
        let redraw = Normal::new(0.0, config.sigma_new).expect("sigma validated");
        let perturb = Normal::new(0.0, config.sigma_perturb).expect("sigma validated");
        for i in index::sample(rng, candidates.len(), touched) {
            let (r, c) = candidates[i];
            let w = if rng.random::<f64>() < config.mutation.redraw {
                redraw.sample(rng)
            } else {
                self.weight(r, c) + perturb.sample(rng)
            };
            self.set(r, c, w);
        }
    }

    fn add_synapse<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        if let Some(&(r, c)) = self.free_positions(false).choose(rng) {
            let w = gaussian_nonzero(config.sigma_new, rng);
            self.set(r, c, w);
        }
    }

    fn remove_synapse<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if let Some(&(r, c)) = self.free_positions(true).choose(rng) {
            self.set(r, c, 0.0);
        }
    }

    /// Appends one hidden neuron with one incoming and one outgoing synapse.
    fn add_neuron<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        let old = self.n;
        let n = old + 1;
        let mut weights = vec![0.0; n * n];
        for r in 0..old {
            weights[r * n..r * n + old].copy_from_slice(&self.weights[r * old..(r + 1) * old]);
        }
        self.n = n;
        self.weights = weights;
        let new = old;
        let source = rng.random_range(0..old);
        self.set(source, new, gaussian_nonzero(config.sigma_new, rng));
        let destinations: Vec<usize> = (0..old).filter(|&c| !self.is_bias(c)).collect();
        if let Some(&dst) = destinations.choose(rng) {
            self.set(new, dst, gaussian_nonzero(config.sigma_new, rng));
        }
    }

    /// Deletes a random hidden neuron's row and column.
    fn remove_neuron<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let Some(&victim) = self.hidden_neurons().choose(rng) else {
            return;
        };
        let old = self.n;
        let n = old - 1;
        let weights: Vec<f64> = (0..old)
            .filter(|&r| r != victim)
            .flat_map(|r| (0..old).filter(|&c| c != victim).map(move |c| (r, c)))
            .map(|(r, c)| self.weights[r * old + c])
            .collect();
        debug_assert_eq!(weights.len(), n * n);
        self.n = n;
        self.weights = weights;
        let shift = |i: &mut usize| {
            if *i > victim {
                *i -= 1;
            }
        };
        self.input_neurons.iter_mut().for_each(shift);
        self.output_neurons.iter_mut().for_each(shift);
        self.bias_neurons.iter_mut().for_each(shift);
    }
}

impl Evolvable for EchoGenome {
    const KIND: GenomeKind = GenomeKind::Echo;

    /// Five neurons: three inputs (identity, identity, sign reversal), one
    /// output and one bias, with every input↔output entry and the
    /// bias→output entry set.
    fn minimal<R: Rng + ?Sized>(sigma_init: f64, rng: &mut R) -> Self {
        let n = 5;
        let mut g = EchoGenome {
            n,
            weights: vec![0.0; n * n],
            input_neurons: MINIMAL_INPUTS.to_vec(),
            input_functions: vec![InputFn::Identity, InputFn::Identity, InputFn::SignReversal],
            output_neurons: vec![MINIMAL_OUTPUT],
            bias_neurons: vec![MINIMAL_BIAS],
        };
        for i in MINIMAL_INPUTS {
            let w = gaussian_nonzero(sigma_init, rng);
            g.set(i, MINIMAL_OUTPUT, w);
            let w = gaussian_nonzero(sigma_init, rng);
            g.set(MINIMAL_OUTPUT, i, w);
        }
        let w = gaussian_nonzero(sigma_init, rng);
        g.set(MINIMAL_BIAS, MINIMAL_OUTPUT, w);
        g.enforce_bias_columns();
        g
    }

    /// `size·|n_a − n_b| + pattern·H/S + weight·W̄` over the overlapping
    /// top-left block: `H` counts positions where exactly one matrix has a
    /// synapse, `S` is the block size and `W̄` the mean absolute weight
    /// difference where both have one.
    fn distance(&self, other: &Self, k: &DistanceCoefficients) -> f64 {
        let m = self.n.min(other.n);
        let mut mismatched = 0usize;
        let mut shared = 0usize;
        let mut gap = 0.0;
        for r in 0..m {
            for c in 0..m {
                let (a, b) = (self.weight(r, c), other.weight(r, c));
                match (a != 0.0, b != 0.0) {
                    (true, true) => {
                        shared += 1;
                        gap += (a - b).abs();
                    }
                    (true, false) | (false, true) => mismatched += 1,
                    (false, false) => {}
                }
            }
        }
        let mean_gap = if shared > 0 { gap / shared as f64 } else { 0.0 };
        k.size * self.n.abs_diff(other.n) as f64
            + k.pattern * mismatched as f64 / (m * m) as f64
            + k.weight * mean_gap
    }

    fn mutate<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        match choose_mutation(&config.mutation, rng) {
            Some(MutationOp::Weights) => self.mutate_weights(config, rng),
            Some(MutationOp::AddSynapse) => self.add_synapse(config, rng),
            Some(MutationOp::RemoveSynapse) => self.remove_synapse(rng),
            Some(MutationOp::AddNeuron) => self.add_neuron(config, rng),
            Some(MutationOp::RemoveNeuron) => self.remove_neuron(rng),
            None => return,
        }
        self.enforce_bias_columns();
        debug_assert!(self.validate().is_ok(), "{:?}", self.validate());
    }

    /// Positional alignment: the other parent is zero-padded (or cropped)
    /// to the fitter parent's size, then either every entry is taken from a
    /// random parent (crossover) or every entry is the mean of both
    /// (averaging, absent synapses count as 0).
    fn recombine<R: Rng + ?Sized>(
        fitter: &Self,
        other: &Self,
        config: &EvolutionConfig,
        rng: &mut R,
    ) -> Self {
        let n = fitter.n;
        let aligned = |r: usize, c: usize| {
            if r < other.n && c < other.n {
                other.weight(r, c)
            } else {
                0.0
            }
        };
        let mut child = fitter.clone();
        let crossover = rng.random::<f64>() < config.crossover;
        for r in 0..n {
            for c in 0..n {
                let (a, b) = (fitter.weight(r, c), aligned(r, c));
                let w = if crossover {
                    if rng.random::<bool>() {
                        a
                    } else {
                        b
                    }
                } else {
                    (a + b) / 2.0
                };
                child.set(r, c, w);
            }
        }
        child.enforce_bias_columns();
        debug_assert!(child.validate().is_ok(), "{:?}", child.validate());
        child
    }

    fn check_invariants(&self) -> Result<()> {
        self.validate()
    }

    fn output_trace(
        &self,
        rows: &[f64],
        width: usize,
        init_value: f64,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        if self.input_neurons.len() != width {
            return Err(Error::InputArity {
                expected: self.input_neurons.len(),
                got: width,
            });
        }
        let Some(&output) = self.output_neurons.first() else {
            return Err(Error::InvalidGenome("no output neuron".into()));
        };
        out.clear();
        let mut state = self.init_state(init_value);
        for row in rows.chunks_exact(width) {
            self.step_in_place(&mut state, row, ActivationFn::Relu)?;
            out.push(OutputFn::Sigmoid.apply(state.pre_activations()[output]));
        }
        Ok(())
    }

    fn input_count(&self) -> usize {
        self.input_neurons.len()
    }

    fn output_count(&self) -> usize {
        self.output_neurons.len()
    }

    fn into_document(self) -> GenomeDocument {
        GenomeDocument::Echo(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::MutationRates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config_with(rates: MutationRates) -> EvolutionConfig {
        EvolutionConfig {
            mutation: rates,
            ..EvolutionConfig::default()
        }
    }

    fn only(op: MutationOp) -> MutationRates {
        let mut r = MutationRates::none();
        match op {
            MutationOp::Weights => r.weight = 1.0,
            MutationOp::AddSynapse => r.add_synapse = 1.0,
            MutationOp::RemoveSynapse => r.remove_synapse = 1.0,
            MutationOp::AddNeuron => r.add_neuron = 1.0,
            MutationOp::RemoveNeuron => r.remove_neuron = 1.0,
        }
        r
    }

    #[test]
    fn minimal_genome_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = EchoGenome::minimal(1.0, &mut rng);
        g.validate().unwrap();
        assert_eq!(g.neuron_count(), 5);
        for i in 0..3 {
            assert_ne!(g.weight(i, 3), 0.0);
            assert_ne!(g.weight(3, i), 0.0);
        }
        for r in 0..5 {
            assert_eq!(g.weight(r, 4), if r == 4 { 1.0 } else { 0.0 });
        }
        assert_eq!(
            g.input_functions(),
            &[InputFn::Identity, InputFn::Identity, InputFn::SignReversal]
        );
    }

    #[test]
    fn remove_neuron_keeps_minimal_genome() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = EchoGenome::minimal(1.0, &mut rng);
        let mut m = g.clone();
        m.mutate(&config_with(only(MutationOp::RemoveNeuron)), &mut rng);
        assert_eq!(m, g);
    }

    #[test]
    fn add_neuron_grows_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = EchoGenome::minimal(1.0, &mut rng);
        let mut m = g.clone();
        m.mutate(&config_with(only(MutationOp::AddNeuron)), &mut rng);
        assert_eq!(m.neuron_count(), 6);
        m.validate().unwrap();
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(m.weight(r, c), g.weight(r, c));
            }
        }
        assert!((0..6).any(|r| m.weight(r, 5) != 0.0));
        assert_eq!(m.hidden_neurons(), vec![5]);
    }

    #[test]
    fn add_then_remove_neuron_restores_roles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = EchoGenome::minimal(1.0, &mut rng);
        let mut m = g.clone();
        m.mutate(&config_with(only(MutationOp::AddNeuron)), &mut rng);
        m.mutate(&config_with(only(MutationOp::RemoveNeuron)), &mut rng);
        assert_eq!(m, g);
    }

    #[test]
    fn zero_rates_leave_genome_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = EchoGenome::minimal(1.0, &mut rng);
        let mut m = g.clone();
        for _ in 0..50 {
            m.mutate(&config_with(MutationRates::none()), &mut rng);
        }
        assert_eq!(m, g);
    }

    #[test]
    fn weight_mutation_touches_only_existing_synapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = EchoGenome::minimal(1.0, &mut rng);
        let mut m = g.clone();
        m.mutate(&config_with(only(MutationOp::Weights)), &mut rng);
        assert_ne!(m, g);
        for (a, b) in g.weights().iter().zip(m.weights()) {
            if *a == 0.0 {
                assert_eq!(*b, 0.0);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let k = DistanceCoefficients::default();
        let a = EchoGenome::minimal(1.0, &mut rng);
        assert_eq!(a.distance(&a, &k), 0.0);

        let rows = |shift: f64| {
            vec![
                vec![0.5 + shift, 0.0, -1.5 + shift],
                vec![0.0, 2.0 + shift, 0.0],
                vec![0.25 + shift, 0.0, 0.0],
            ]
        };
        let p = EchoGenome::from_rows(rows(0.0), vec![], vec![], vec![2], vec![]).unwrap();
        let q = EchoGenome::from_rows(rows(1.0), vec![], vec![], vec![2], vec![]).unwrap();
        assert!((p.distance(&q, &k) - 0.5).abs() < 1e-12);

        let mut grown = a.clone();
        grown.add_neuron(&EvolutionConfig::default(), &mut rng);
        for c in 0..6 {
            grown.set(5, c, 0.0);
            grown.set(c, 5, 0.0);
        }
        assert_eq!(a.distance(&grown, &k), 1.0);
        assert_eq!(grown.distance(&a, &k), 1.0);
    }

    #[test]
    fn averaging_with_absent_entry_halves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows = |w: f64| vec![vec![0.0, w], vec![0.0, 0.0]];
        let a = EchoGenome::from_rows(rows(2.0), vec![], vec![], vec![1], vec![]).unwrap();
        let b = EchoGenome::from_rows(rows(0.0), vec![], vec![], vec![1], vec![]).unwrap();
        let config = EvolutionConfig {
            crossover: 0.0,
            ..EvolutionConfig::default()
        };
        let child = EchoGenome::recombine(&a, &b, &config, &mut rng);
        assert_eq!(child.weight(0, 1), 1.0);
    }

    #[test]
    fn recombining_identical_parents_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = EchoGenome::minimal(1.0, &mut rng);
        for crossover in [0.0, 1.0] {
            let config = EvolutionConfig {
                crossover,
                ..EvolutionConfig::default()
            };
            for _ in 0..10 {
                assert_eq!(EchoGenome::recombine(&a, &a, &config, &mut rng), a);
            }
        }
    }

    #[test]
    fn crossover_of_disjoint_patterns_keeps_provenance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 6;
        let mut ra = vec![vec![0.0; n]; n];
        let mut rb = vec![vec![0.0; n]; n];
        for r in 0..n {
            for c in 0..n {
                if (r + c) % 2 == 0 {
                    ra[r][c] = 1.0 + r as f64;
                } else {
                    rb[r][c] = -1.0 - c as f64;
                }
            }
        }
        let a = EchoGenome::from_rows(ra, vec![], vec![], vec![0], vec![]).unwrap();
        let b = EchoGenome::from_rows(rb, vec![], vec![], vec![0], vec![]).unwrap();
        let config = EvolutionConfig {
            crossover: 1.0,
            ..EvolutionConfig::default()
        };
        let child = EchoGenome::recombine(&a, &b, &config, &mut rng);
        for r in 0..n {
            for c in 0..n {
                let w = child.weight(r, c);
                if w != 0.0 {
                    let in_a = w == a.weight(r, c);
                    let in_b = w == b.weight(r, c);
                    assert!(in_a ^ in_b);
                }
            }
        }
    }

    #[test]
    fn child_takes_fitter_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let small = EchoGenome::minimal(1.0, &mut rng);
        let mut big = small.clone();
        big.add_neuron(&EvolutionConfig::default(), &mut rng);
        big.add_neuron(&EvolutionConfig::default(), &mut rng);
        let config = EvolutionConfig::default();
        assert_eq!(
            EchoGenome::recombine(&big, &small, &config, &mut rng).neuron_count(),
            7
        );
        let child = EchoGenome::recombine(&small, &big, &config, &mut rng);
        assert_eq!(child.neuron_count(), 5);
        child.validate().unwrap();
    }
}
