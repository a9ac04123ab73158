//! Variation operators and speciation distance for the RNN baseline.
//!
//! Parents are aligned by synapse identity `(src, dst, kind)`; no
//! historical markers are kept.

use std::collections::BTreeMap;

use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::echo::NeuronRole;
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::genome::{DistanceCoefficients, Evolvable, GenomeDocument, GenomeKind};
use crate::rnn::{RnnGenome, RnnNeuron, Synapse, SynapseKey, SynapseKind};

use super::{choose_mutation, gaussian_nonzero, MutationOp};

/// Random candidate pairs tried before an add-synapse mutation gives up.
const ADD_SYNAPSE_ATTEMPTS: usize = 32;

impl RnnGenome {
    fn relayer(&mut self) {
        self.assign_layers_in_place()
            .expect("operators keep the forward subgraph acyclic");
    }

    fn mutate_weights<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        if self.synapses.is_empty() {
            return;
        }
        let count = self.synapses.len();
        let touched = ((count as f64 * config.mutation.weight_entry_fraction).round() as usize)
            .clamp(1, count);
        let redraw = Normal::new(0.0, config.sigma_new).expect("sigma validated");
        let perturb = Normal::new(0.0, config.sigma_perturb).expect("sigma validated");
        for i in index::sample(rng, count, touched) {
            let s = &mut self.synapses[i];
            s.weight = if rng.random::<f64>() < config.mutation.redraw {
                redraw.sample(rng)
            } else {
                s.weight + perturb.sample(rng)
            };
        }
    }

    fn add_synapse<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        let ids: Vec<_> = self.neurons.iter().map(|n| n.id).collect();
        for _ in 0..ADD_SYNAPSE_ATTEMPTS {
            let src = *ids.choose(rng).expect("genome has neurons");
            let dst = *ids.choose(rng).expect("genome has neurons");
            let kind = if rng.random::<bool>() {
                SynapseKind::Forward
            } else {
                SynapseKind::Recurrent
            };
            if self.admits(src, dst, kind) {
                let weight = gaussian_nonzero(config.sigma_new, rng);
                self.synapses.push(Synapse {
                    src,
                    dst,
                    weight,
                    kind,
                });
                self.relayer();
                return;
            }
        }
    }

    fn remove_synapse<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.synapses.is_empty() {
            return;
        }
        let i = rng.random_range(0..self.synapses.len());
        self.synapses.remove(i);
        self.relayer();
    }

    /// Splits a random forward synapse `s → d` into `s → new → d`, or, when
    /// there is none, spawns a neuron between an input or bias and an output.
    fn add_neuron<R: Rng + ?Sized>(&mut self, config: &EvolutionConfig, rng: &mut R) {
        let id = self.next_neuron_id();
        let forward: Vec<usize> = (0..self.synapses.len())
            .filter(|&i| self.synapses[i].kind == SynapseKind::Forward)
            .collect();
        let (src, dst, w_in, w_out) = if let Some(&i) = forward.choose(rng) {
            let old = self.synapses.remove(i);
            (old.src, old.dst, 1.0, old.weight)
        } else {
            let sources: Vec<_> = self
                .neurons
                .iter()
                .filter(|n| matches!(n.role, NeuronRole::Input | NeuronRole::Bias))
                .map(|n| n.id)
                .collect();
            let outputs = self.output_ids();
            let (Some(&src), Some(&dst)) = (sources.choose(rng), outputs.choose(rng)) else {
                return;
            };
            (
                src,
                dst,
                gaussian_nonzero(config.sigma_new, rng),
                gaussian_nonzero(config.sigma_new, rng),
            )
        };
        self.neurons.push(RnnNeuron {
            id,
            role: NeuronRole::Hidden,
            layer: 0,
        });
        self.synapses.push(Synapse {
            src,
            dst: id,
            weight: w_in,
            kind: SynapseKind::Forward,
        });
        self.synapses.push(Synapse {
            src: id,
            dst,
            weight: w_out,
            kind: SynapseKind::Forward,
        });
        self.relayer();
    }

    fn remove_neuron<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let Some(&victim) = self.hidden_ids().choose(rng) else {
            return;
        };
        self.neurons.retain(|n| n.id != victim);
        self.synapses.retain(|s| s.src != victim && s.dst != victim);
        self.relayer();
    }

    fn synapse_map(&self) -> BTreeMap<SynapseKey, f64> {
        self.synapses.iter().map(|s| (s.key(), s.weight)).collect()
    }

    /// Adds `synapse` to a child under construction if it is admissible.
    fn try_inherit(&mut self, key: SynapseKey, weight: f64) {
        let (src, dst, kind) = key;
        if self.admits(src, dst, kind) {
            self.synapses.push(Synapse {
                src,
                dst,
                weight,
                kind,
            });
        }
    }
}

impl Evolvable for RnnGenome {
    const KIND: GenomeKind = GenomeKind::Rnn;

    /// Three inputs (ids 0 to 2), output 3 and bias 4, with forward synapses
    /// from every input and the bias to the output and a recurrent
    /// self-synapse on the output.
    fn minimal<R: Rng + ?Sized>(sigma_init: f64, rng: &mut R) -> Self {
        let roles = [
            NeuronRole::Input,
            NeuronRole::Input,
            NeuronRole::Input,
            NeuronRole::Output,
            NeuronRole::Bias,
        ];
        let neurons = roles
            .iter()
            .enumerate()
            .map(|(id, &role)| RnnNeuron {
                id: id as u32,
                role,
                layer: 0,
            })
            .collect();
        let mut synapses: Vec<Synapse> = [0, 1, 2, 4]
            .into_iter()
            .map(|src| Synapse {
                src,
                dst: 3,
                weight: gaussian_nonzero(sigma_init, rng),
                kind: SynapseKind::Forward,
            })
            .collect();
        synapses.push(Synapse {
            src: 3,
            dst: 3,
            weight: gaussian_nonzero(sigma_init, rng),
            kind: SynapseKind::Recurrent,
        });
        RnnGenome::new(neurons, synapses).expect("minimal genome is valid")
    }

    /// `size·|Δneurons| + pattern·|A △ B| / |A ∪ B| + weight·W̄` where `A`
    /// and `B` are the synapse key sets and `W̄` is the mean absolute weight
    /// gap over shared synapses.
    fn distance(&self, other: &Self, k: &DistanceCoefficients) -> f64 {
        let a = self.synapse_map();
        let b = other.synapse_map();
        let mut shared = 0usize;
        let mut gap = 0.0;
        for (key, wa) in &a {
            if let Some(wb) = b.get(key) {
                shared += 1;
                gap += (wa - wb).abs();
            }
        }
        let union = a.len() + b.len() - shared;
        let mismatched = union - shared;
        let pattern = if union > 0 {
            mismatched as f64 / union as f64
        } else {
            0.0
        };
        let mean_gap = if shared > 0 { gap / shared as f64 } else { 0.0 };
        k.size * self.neurons.len().abs_diff(other.neurons.len()) as f64
            + k.pattern * pattern
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
        debug_assert!(self.validate().is_ok(), "{:?}", self.validate());
    }

    /// The child keeps the fitter parent's neurons. Crossover takes each
    /// aligned synapse from a random parent (absent if that parent lacks
    /// it); averaging takes the mean of shared synapses and inherits the
    /// rest from whichever parent has them.
    fn recombine<R: Rng + ?Sized>(
        fitter: &Self,
        other: &Self,
        config: &EvolutionConfig,
        rng: &mut R,
    ) -> Self {
        let theirs = other.synapse_map();
        let mine = fitter.synapse_map();
        let crossover = rng.random::<f64>() < config.crossover;
        let mut child = RnnGenome {
            neurons: fitter.neurons.clone(),
            synapses: Vec::with_capacity(fitter.synapses.len()),
        };
        for s in &fitter.synapses {
            let weight = match (crossover, theirs.get(&s.key())) {
                (true, Some(&w)) => {
                    if rng.random::<bool>() {
                        s.weight
                    } else {
                        w
                    }
                }
                (true, None) => {
                    if rng.random::<bool>() {
                        s.weight
                    } else {
                        continue;
                    }
                }
                (false, Some(&w)) => (s.weight + w) / 2.0,
                (false, None) => s.weight,
            };
            child.synapses.push(Synapse {
                weight,
                ..s.clone()
            });
        }
        for s in other
            .synapses
            .iter()
            .filter(|s| !mine.contains_key(&s.key()))
        {
            if !crossover || rng.random::<bool>() {
                child.try_inherit(s.key(), s.weight);
            }
        }
        child.relayer();
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
        let eval = self.evaluator();
        if eval.output_count() == 0 {
            return Err(Error::InvalidGenome("no output neuron".into()));
        }
        let count = eval.neuron_count();
        let mut prev = vec![init_value; count];
        let mut current = vec![0.0; count];
        let mut outputs = vec![0.0; eval.output_count()];
        out.clear();
        for row in rows.chunks_exact(width) {
            eval.step(&prev, &mut current, row, &mut outputs)?;
            out.push(outputs[0]);
            std::mem::swap(&mut prev, &mut current);
        }
        Ok(())
    }

    fn input_count(&self) -> usize {
        self.input_ids().len()
    }

    fn output_count(&self) -> usize {
        self.output_ids().len()
    }

    fn into_document(self) -> GenomeDocument {
        GenomeDocument::Rnn(self)
    }
}
