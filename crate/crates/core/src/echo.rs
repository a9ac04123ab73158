//! Echo Networks: recurrent networks defined entirely by one square
//! connection matrix.
//!
//! Row `r`, column `c` of the matrix holds the weight of the synapse from
//! source neuron `r` to destination neuron `c`; an exact `0.0` means the
//! synapse does not exist. One evaluation step computes
//! `a_t = f(Cᵀ a_{t-1} + input terms)` for all neurons at once. Inputs and
//! outputs are designations on top of the matrix, and bias neurons are
//! encoded inside it as a column that is zero everywhere except for a unit
//! diagonal entry.

use serde::{Deserialize, Serialize};

use crate::activation::{ActivationFn, InputFn, OutputFn};
use crate::error::{Error, Result};

/// Exhaustive path search gives up after this many DFS expansions and
/// falls back to the neuron count.
const PATH_SEARCH_BUDGET: usize = 2_000_000;
/// Largest network for which an exact longest-path search is attempted.
const EXACT_PATH_MAX_NEURONS: usize = 32;

/// The complete genetic code of one Echo Network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EchoGenomeDoc", into = "EchoGenomeDoc")]
pub struct EchoGenome {
    pub(crate) n: usize,
    /// Row-major `n × n`.
    pub(crate) weights: Vec<f64>,
    pub(crate) input_neurons: Vec<usize>,
    pub(crate) input_functions: Vec<InputFn>,
    pub(crate) output_neurons: Vec<usize>,
    pub(crate) bias_neurons: Vec<usize>,
}

impl EchoGenome {
    /// Builds a genome from a row-major weight matrix and role designations.
    ///
    /// Bias columns are not repaired here; a matrix that violates the bias
    /// encoding is rejected.
    pub fn new(
        n: usize,
        weights: Vec<f64>,
        input_neurons: Vec<usize>,
        input_functions: Vec<InputFn>,
        output_neurons: Vec<usize>,
        bias_neurons: Vec<usize>,
    ) -> Result<Self> {
        let genome = EchoGenome {
            n,
            weights,
            input_neurons,
            input_functions,
            output_neurons,
            bias_neurons,
        };
        genome.validate()?;
        Ok(genome)
    }

    /// Convenience constructor taking the matrix as rows.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        input_neurons: Vec<usize>,
        input_functions: Vec<InputFn>,
        output_neurons: Vec<usize>,
        bias_neurons: Vec<usize>,
    ) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGenome(
                "connection matrix is not square".into(),
            ));
        }
        let weights = rows.into_iter().flatten().collect();
        Self::new(
            n,
            weights,
            input_neurons,
            input_functions,
            output_neurons,
            bias_neurons,
        )
    }

    pub fn neuron_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, src: usize, dst: usize) -> f64 {
        self.weights[src * self.n + dst]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks_exact(self.n)
    }

    pub fn input_neurons(&self) -> &[usize] {
        &self.input_neurons
    }

    pub fn input_functions(&self) -> &[InputFn] {
        &self.input_functions
    }

    pub fn output_neurons(&self) -> &[usize] {
        &self.output_neurons
    }

    pub fn bias_neurons(&self) -> &[usize] {
        &self.bias_neurons
    }

    pub fn is_bias(&self, neuron: usize) -> bool {
        self.bias_neurons.contains(&neuron)
    }

    /// Neurons without an input, output or bias designation.
    pub fn hidden_neurons(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.role(i) == NeuronRole::Hidden)
            .collect()
    }

    pub fn role(&self, neuron: usize) -> NeuronRole {
        if self.input_neurons.contains(&neuron) {
            NeuronRole::Input
        } else if self.output_neurons.contains(&neuron) {
            NeuronRole::Output
        } else if self.bias_neurons.contains(&neuron) {
            NeuronRole::Bias
        } else {
            NeuronRole::Hidden
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }

    /// Checks every structural invariant of the genome.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenome(msg));
        if self.n == 0 {
            return bad("neuron count must be positive".into());
        }
        if self.weights.len() != self.n * self.n {
            return bad(format!(
                "expected {} weights for n={}, found {}",
                self.n * self.n,
                self.n,
                self.weights.len()
            ));
        }
        if let Some(w) = self.weights.iter().find(|w| !w.is_finite()) {
            return bad(format!("non-finite weight {w}"));
        }
        if self.input_functions.len() != self.input_neurons.len() {
            return bad(format!(
                "{} input functions for {} input neurons",
                self.input_functions.len(),
                self.input_neurons.len()
            ));
        }
        let mut seen = vec![false; self.n];
        for &i in self
            .input_neurons
            .iter()
            .chain(&self.output_neurons)
            .chain(&self.bias_neurons)
        {
            if i >= self.n {
                return bad(format!("neuron index {i} out of range for n={}", self.n));
            }
            if seen[i] {
                return bad(format!("neuron {i} carries more than one designation"));
            }
            seen[i] = true;
        }
        for &b in &self.bias_neurons {
            for r in 0..self.n {
                let expected = if r == b { 1.0 } else { 0.0 };
                if self.weight(r, b) != expected {
                    return bad(format!(
                        "bias column {b} has weight {} at row {r}",
                        self.weight(r, b)
                    ));
                }
            }
        }
        Ok(())
    }

    /// Rewrites every bias column to the unit vector of its neuron.
    pub(crate) fn enforce_bias_columns(&mut self) {
        let n = self.n;
        for &b in &self.bias_neurons {
            for r in 0..n {
                self.weights[r * n + b] = if r == b { 1.0 } else { 0.0 };
            }
        }
    }

    /// Fresh evaluation state with every activation set to `init_value`.
    pub fn init_state(&self, init_value: f64) -> EchoState {
        EchoState {
            activations: vec![init_value; self.n],
            pre_activations: vec![0.0; self.n],
            step: 0,
        }
    }

    /// One evaluation step, returning the successor state.
    pub fn step(
        &self,
        state: &EchoState,
        input: &[f64],
        activation: ActivationFn,
    ) -> Result<EchoState> {
        let mut next = state.clone();
        self.step_in_place(&mut next, input, activation)?;
        Ok(next)
    }

    /// One evaluation step, updating `state` without allocating.
    ///
    /// The aggregation of every neuron is kept in the state so that
    /// [`EchoGenome::read_output`] can apply the output function to the
    /// value before activation.
    pub fn step_in_place(
        &self,
        state: &mut EchoState,
        input: &[f64],
        activation: ActivationFn,
    ) -> Result<()> {
        if input.len() != self.input_neurons.len() {
            return Err(Error::InputArity {
                expected: self.input_neurons.len(),
                got: input.len(),
            });
        }
        debug_assert_eq!(state.activations.len(), self.n);
        let pre = &mut state.pre_activations;
        pre.iter_mut().for_each(|p| *p = 0.0);
        for (row, &a) in self.weights.chunks_exact(self.n).zip(&state.activations) {
            if a == 0.0 {
                continue;
            }
            for (p, &w) in pre.iter_mut().zip(row) {
                *p += w * a;
            }
        }
        for ((&neuron, &func), &x) in self
            .input_neurons
            .iter()
            .zip(&self.input_functions)
            .zip(input)
        {
            pre[neuron] += func.apply(x);
        }
        for (a, &p) in state.activations.iter_mut().zip(pre.iter()) {
            *a = activation.apply(p);
        }
        state.step += 1;
        Ok(())
    }

    /// Output-function values of the output neurons for the most recent step.
    pub fn read_output(&self, state: &EchoState, output_fn: OutputFn) -> Result<Vec<f64>> {
        if state.step == 0 {
            return Err(Error::NotEvaluated);
        }
        Ok(self
            .output_neurons
            .iter()
            .map(|&o| output_fn.apply(state.pre_activations[o]))
            .collect())
    }

    /// Number of evaluation steps needed for every input to be able to
    /// reach every output: the edge count of the longest simple path over
    /// non-zero synapses from an input to an output neuron.
    ///
    /// Exact for networks up to 32 neurons when the search stays within its
    /// budget; otherwise the neuron count is returned, which is always a
    /// sufficient number of steps.
    pub fn longest_acyclic_path(&self) -> usize {
        if self.n > EXACT_PATH_MAX_NEURONS {
            return self.n;
        }
        let adjacency: Vec<Vec<usize>> = (0..self.n)
            .map(|r| {
                (0..self.n)
                    .filter(|&c| c != r && self.weight(r, c) != 0.0)
                    .collect()
            })
            .collect();
        let mut is_output = vec![false; self.n];
        for &o in &self.output_neurons {
            is_output[o] = true;
        }
        let mut search = PathSearch {
            adjacency: &adjacency,
            is_output: &is_output,
            visited: vec![false; self.n],
            best: 0,
            ceiling: self.n - 1,
            expansions: 0,
        };
        for &start in &self.input_neurons {
            if search.run(start) == Search::Exhausted {
                return self.n;
            }
            if search.best == search.ceiling {
                break;
            }
        }
        search.best
    }
}

#[derive(PartialEq)]
enum Search {
    Done,
    Exhausted,
}

struct PathSearch<'a> {
    adjacency: &'a [Vec<usize>],
    is_output: &'a [bool],
    visited: Vec<bool>,
    best: usize,
    ceiling: usize,
    expansions: usize,
}

impl PathSearch<'_> {
    fn run(&mut self, start: usize) -> Search {
        self.visited[start] = true;
        let outcome = self.visit(start, 0);
        self.visited[start] = false;
        outcome
    }

    fn visit(&mut self, node: usize, depth: usize) -> Search {
        self.expansions += 1;
        if self.expansions > PATH_SEARCH_BUDGET {
            return Search::Exhausted;
        }
        if self.is_output[node] && depth > self.best {
            self.best = depth;
        }
        if self.best == self.ceiling {
            return Search::Done;
        }
        for i in 0..self.adjacency[node].len() {
            let next = self.adjacency[node][i];
            if self.visited[next] {
                continue;
            }
            self.visited[next] = true;
            let outcome = self.visit(next, depth + 1);
            self.visited[next] = false;
            if outcome == Search::Exhausted {
                return outcome;
            }
            if self.best == self.ceiling {
                return Search::Done;
            }
        }
        Search::Done
    }
}

/// Role designation of a neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronRole {
    Input,
    Output,
    Bias,
    Hidden,
}

/// Post-activation state of an Echo Network between evaluation steps.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoState {
    activations: Vec<f64>,
    pre_activations: Vec<f64>,
    step: usize,
}

impl EchoState {
    pub fn activations(&self) -> &[f64] {
        &self.activations
    }

    /// Aggregation values of the last step (before activation).
    pub fn pre_activations(&self) -> &[f64] {
        &self.pre_activations
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Resets the state for a new sequence without reallocating.
    pub fn reset(&mut self, init_value: f64) {
        self.activations.iter_mut().for_each(|a| *a = init_value);
        self.pre_activations.iter_mut().for_each(|p| *p = 0.0);
        self.step = 0;
    }
}

/// On-disk form of [`EchoGenome`].
#[derive(Serialize, Deserialize)]
struct EchoGenomeDoc {
    n: usize,
    weights: Vec<Vec<f64>>,
    input_neurons: Vec<usize>,
    input_functions: Vec<InputFn>,
    output_neurons: Vec<usize>,
    bias_neurons: Vec<usize>,
}

impl From<EchoGenome> for EchoGenomeDoc {
    fn from(g: EchoGenome) -> Self {
        EchoGenomeDoc {
            n: g.n,
            weights: g.weights.chunks_exact(g.n).map(<[f64]>::to_vec).collect(),
            input_neurons: g.input_neurons,
            input_functions: g.input_functions,
            output_neurons: g.output_neurons,
            bias_neurons: g.bias_neurons,
        }
    }
}

impl TryFrom<EchoGenomeDoc> for EchoGenome {
    type Error = Error;

    fn try_from(doc: EchoGenomeDoc) -> Result<Self> {
        if doc.weights.len() != doc.n || doc.weights.iter().any(|r| r.len() != doc.n) {
            return Err(Error::InvalidGenome(format!(
                "weight matrix is not {0}×{0}",
                doc.n
            )));
        }
        EchoGenome::new(
            doc.n,
            doc.weights.into_iter().flatten().collect(),
            doc.input_neurons,
            doc.input_functions,
            doc.output_neurons,
            doc.bias_neurons,
        )
    }
}
