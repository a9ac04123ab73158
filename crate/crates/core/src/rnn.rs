//! Layered recurrent networks used as the comparison baseline.
//!
//! Layers are not part of the genetic code; they are recomputed after every
//! edit as the longest forward path reaching each neuron. Within one time
//! step layers are evaluated in ascending order: forward synapses read the
//! current step's values of lower layers, recurrent synapses read the
//! previous step's values.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::activation::{sigmoid, ActivationFn};
use crate::echo::NeuronRole;
use crate::error::{Error, Result};

pub type NeuronId = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RnnNeuron {
    pub id: NeuronId,
    pub role: NeuronRole,
    #[serde(default)]
    pub layer: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynapseKind {
    Forward,
    Recurrent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Synapse {
    pub src: NeuronId,
    pub dst: NeuronId,
    pub weight: f64,
    pub kind: SynapseKind,
}

impl Synapse {
    pub fn key(&self) -> SynapseKey {
        (self.src, self.dst, self.kind)
    }
}

/// Identity of a synapse for alignment between genomes.
pub type SynapseKey = (NeuronId, NeuronId, SynapseKind);

/// Genetic code of a baseline RNN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RnnGenomeDoc", into = "RnnGenomeDoc")]
pub struct RnnGenome {
    pub(crate) neurons: Vec<RnnNeuron>,
    pub(crate) synapses: Vec<Synapse>,
}

#[derive(Serialize, Deserialize)]
struct RnnGenomeDoc {
    neurons: Vec<RnnNeuron>,
    synapses: Vec<Synapse>,
}

impl From<RnnGenome> for RnnGenomeDoc {
    fn from(g: RnnGenome) -> Self {
        RnnGenomeDoc {
            neurons: g.neurons,
            synapses: g.synapses,
        }
    }
}

impl TryFrom<RnnGenomeDoc> for RnnGenome {
    type Error = Error;

    fn try_from(doc: RnnGenomeDoc) -> Result<Self> {
        let g = RnnGenome {
            neurons: doc.neurons,
            synapses: doc.synapses,
        };
        g.validate()?;
        Ok(g)
    }
}

impl RnnGenome {
    /// Builds a genome and assigns its layers.
    pub fn new(neurons: Vec<RnnNeuron>, synapses: Vec<Synapse>) -> Result<Self> {
        let mut g = RnnGenome { neurons, synapses };
        g.assign_layers_in_place()?;
        g.validate()?;
        Ok(g)
    }

    pub fn neurons(&self) -> &[RnnNeuron] {
        &self.neurons
    }

    pub fn synapses(&self) -> &[Synapse] {
        &self.synapses
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn role_of(&self, id: NeuronId) -> Option<NeuronRole> {
        self.neurons.iter().find(|n| n.id == id).map(|n| n.role)
    }

    fn ids_with_role(&self, role: NeuronRole) -> impl Iterator<Item = NeuronId> + '_ {
        self.neurons
            .iter()
            .filter(move |n| n.role == role)
            .map(|n| n.id)
    }

    pub fn input_ids(&self) -> Vec<NeuronId> {
        self.ids_with_role(NeuronRole::Input).collect()
    }

    pub fn output_ids(&self) -> Vec<NeuronId> {
        self.ids_with_role(NeuronRole::Output).collect()
    }

    pub fn hidden_ids(&self) -> Vec<NeuronId> {
        self.ids_with_role(NeuronRole::Hidden).collect()
    }

    pub(crate) fn next_neuron_id(&self) -> NeuronId {
        self.neurons.iter().map(|n| n.id + 1).max().unwrap_or(0)
    }

    pub fn contains_synapse(&self, key: SynapseKey) -> bool {
        self.synapses.iter().any(|s| s.key() == key)
    }

    /// Whether `synapse` may be added without breaking the role rules or
    /// making the forward subgraph cyclic.
    pub(crate) fn admits(&self, src: NeuronId, dst: NeuronId, kind: SynapseKind) -> bool {
        let (Some(src_role), Some(dst_role)) = (self.role_of(src), self.role_of(dst)) else {
            return false;
        };
        if matches!(dst_role, NeuronRole::Input | NeuronRole::Bias) {
            return false;
        }
        if self.contains_synapse((src, dst, kind)) {
            return false;
        }
        match kind {
            SynapseKind::Recurrent => true,
            SynapseKind::Forward => {
                src != dst && src_role != NeuronRole::Output && !self.forward_reaches(dst, src)
            }
        }
    }

    fn forward_reaches(&self, from: NeuronId, to: NeuronId) -> bool {
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(node) = stack.pop() {
            if node == to {
                return true;
            }
            if !seen.insert(node) {
                continue;
            }
            stack.extend(
                self.synapses
                    .iter()
                    .filter(|s| s.kind == SynapseKind::Forward && s.src == node)
                    .map(|s| s.dst),
            );
        }
        false
    }

    /// Returns a copy with layers recomputed from the forward subgraph.
    pub fn assign_layers(&self) -> Result<RnnGenome> {
        let mut g = self.clone();
        g.assign_layers_in_place()?;
        Ok(g)
    }

    /// Sets each neuron's layer to the length of the longest forward path
    /// ending in it. Inputs, biases and neurons without forward in-edges sit
    /// on layer 0; output neurons are lifted to the top layer.
    pub fn assign_layers_in_place(&mut self) -> Result<()> {
        let count = self.neurons.len();
        let index: HashMap<NeuronId, usize> = self
            .neurons
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        let mut successors = vec![Vec::new(); count];
        let mut in_degree = vec![0usize; count];
        for s in self
            .synapses
            .iter()
            .filter(|s| s.kind == SynapseKind::Forward)
        {
            let (Some(&a), Some(&b)) = (index.get(&s.src), index.get(&s.dst)) else {
                return Err(Error::InvalidGenome(format!(
                    "synapse {}->{} references an unknown neuron",
                    s.src, s.dst
                )));
            };
            successors[a].push(b);
            in_degree[b] += 1;
        }
        let mut layer = vec![0usize; count];
        let mut ready: Vec<usize> = (0..count).filter(|&i| in_degree[i] == 0).collect();
        let mut visited = 0;
        while let Some(node) = ready.pop() {
            visited += 1;
            for &next in &successors[node] {
                layer[next] = layer[next].max(layer[node] + 1);
                in_degree[next] -= 1;
                if in_degree[next] == 0 {
                    ready.push(next);
                }
            }
        }
        if visited != count {
            return Err(Error::ForwardCycle);
        }
        let top = layer.iter().copied().max().unwrap_or(0);
        for (neuron, &l) in self.neurons.iter_mut().zip(&layer) {
            neuron.layer = match neuron.role {
                NeuronRole::Input | NeuronRole::Bias => 0,
                NeuronRole::Output => top,
                NeuronRole::Hidden => l,
            };
        }
        Ok(())
    }

    /// Checks the type invariants, including consistency of assigned layers.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenome(msg));
        let mut ids = HashSet::new();
        for n in &self.neurons {
            if !ids.insert(n.id) {
                return bad(format!("duplicate neuron id {}", n.id));
            }
        }
        let layer_of: HashMap<NeuronId, &RnnNeuron> =
            self.neurons.iter().map(|n| (n.id, n)).collect();
        let top = self.neurons.iter().map(|n| n.layer).max().unwrap_or(0);
        for n in &self.neurons {
            match n.role {
                NeuronRole::Input | NeuronRole::Bias if n.layer != 0 => {
                    return bad(format!("{:?} neuron {} not on layer 0", n.role, n.id));
                }
                NeuronRole::Output if n.layer != top => {
                    return bad(format!("output neuron {} not on the top layer", n.id));
                }
                _ => {}
            }
        }
        let mut keys = HashSet::new();
        for s in &self.synapses {
            if !keys.insert(s.key()) {
                return bad(format!(
                    "duplicate synapse {}->{} {:?}",
                    s.src, s.dst, s.kind
                ));
            }
            if !s.weight.is_finite() {
                return bad(format!("non-finite weight on {}->{}", s.src, s.dst));
            }
            let (Some(src), Some(dst)) = (layer_of.get(&s.src), layer_of.get(&s.dst)) else {
                return bad(format!(
                    "synapse {}->{} references an unknown neuron",
                    s.src, s.dst
                ));
            };
            if matches!(dst.role, NeuronRole::Input | NeuronRole::Bias) {
                return bad(format!("synapse into {:?} neuron {}", dst.role, dst.id));
            }
            if s.kind == SynapseKind::Forward {
                if src.role == NeuronRole::Output {
                    return bad(format!("forward synapse leaving output neuron {}", src.id));
                }
                if src.layer >= dst.layer {
                    return bad(format!(
                        "forward synapse {}->{} does not ascend ({} -> {})",
                        s.src, s.dst, src.layer, dst.layer
                    ));
                }
            }
        }
        Ok(())
    }

    /// Precomputes the evaluation order and incoming-synapse lists.
    pub fn evaluator(&self) -> RnnEvaluator {
        let index: HashMap<NeuronId, usize> = self
            .neurons
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        let mut order: Vec<usize> = (0..self.neurons.len()).collect();
        order.sort_by_key(|&i| (self.neurons[i].layer, i));
        let mut forward_in = vec![Vec::new(); self.neurons.len()];
        let mut recurrent_in = vec![Vec::new(); self.neurons.len()];
        for s in &self.synapses {
            let (src, dst) = (index[&s.src], index[&s.dst]);
            match s.kind {
                SynapseKind::Forward => forward_in[dst].push((src, s.weight)),
                SynapseKind::Recurrent => recurrent_in[dst].push((src, s.weight)),
            }
        }
        let inputs = order_by_role(&self.neurons, NeuronRole::Input);
        let outputs = order_by_role(&self.neurons, NeuronRole::Output);
        RnnEvaluator {
            roles: self.neurons.iter().map(|n| n.role).collect(),
            order,
            forward_in,
            recurrent_in,
            input_slot: {
                let mut slot = vec![usize::MAX; self.neurons.len()];
                for (k, &i) in inputs.iter().enumerate() {
                    slot[i] = k;
                }
                slot
            },
            input_count: inputs.len(),
            outputs,
        }
    }

    /// One time step over id-keyed activations.
    pub fn rnn_step(
        &self,
        prev_activations: &BTreeMap<NeuronId, f64>,
        input: &[f64],
    ) -> Result<RnnStepOutput> {
        let prev = self
            .neurons
            .iter()
            .map(|n| {
                prev_activations
                    .get(&n.id)
                    .copied()
                    .ok_or(Error::MissingActivation(n.id))
            })
            .collect::<Result<Vec<_>>>()?;
        let eval = self.evaluator();
        let mut current = vec![0.0; prev.len()];
        let mut outputs = vec![0.0; eval.outputs.len()];
        eval.step(&prev, &mut current, input, &mut outputs)?;
        Ok(RnnStepOutput {
            activations: self.neurons.iter().map(|n| n.id).zip(current).collect(),
            outputs,
        })
    }
}

fn order_by_role(neurons: &[RnnNeuron], role: NeuronRole) -> Vec<usize> {
    neurons
        .iter()
        .enumerate()
        .filter(|(_, n)| n.role == role)
        .map(|(i, _)| i)
        .collect()
}

/// Result of [`RnnGenome::rnn_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct RnnStepOutput {
    pub activations: BTreeMap<NeuronId, f64>,
    /// Sigmoid of each output neuron's aggregation, in neuron-list order.
    pub outputs: Vec<f64>,
}

/// Index-based evaluator for repeated stepping of one genome.
#[derive(Debug, Clone)]
pub struct RnnEvaluator {
    roles: Vec<NeuronRole>,
    order: Vec<usize>,
    forward_in: Vec<Vec<(usize, f64)>>,
    recurrent_in: Vec<Vec<(usize, f64)>>,
    input_slot: Vec<usize>,
    input_count: usize,
    outputs: Vec<usize>,
}

impl RnnEvaluator {
    pub fn neuron_count(&self) -> usize {
        self.roles.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Advances one time step. `prev` and `current` are indexed like the
    /// genome's neuron list; `outputs` receives the sigmoid outputs.
    pub fn step(
        &self,
        prev: &[f64],
        current: &mut [f64],
        input: &[f64],
        outputs: &mut [f64],
    ) -> Result<()> {
        if input.len() != self.input_count {
            return Err(Error::InputArity {
                expected: self.input_count,
                got: input.len(),
            });
        }
        for &i in &self.order {
            current[i] = match self.roles[i] {
                NeuronRole::Input => input[self.input_slot[i]],
                NeuronRole::Bias => 1.0,
                _ => ActivationFn::Relu.apply(self.aggregate(i, prev, current)),
            };
        }
        // Outputs read the aggregation, not the post-activation value.
        for (out, &o) in outputs.iter_mut().zip(&self.outputs) {
            *out = sigmoid(self.aggregate(o, prev, current));
        }
        Ok(())
    }

    fn aggregate(&self, neuron: usize, prev: &[f64], current: &[f64]) -> f64 {
        let forward: f64 = self.forward_in[neuron]
            .iter()
            .map(|&(s, w)| w * current[s])
            .sum();
        let recurrent: f64 = self.recurrent_in[neuron]
            .iter()
            .map(|&(s, w)| w * prev[s])
            .sum();
        forward + recurrent
    }
}
