//! Reference implementations and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use echonet::evolution::{EvolutionConfig, MutationRates};
use echonet::rnn::{RnnGenome, SynapseKind};
use echonet::{EchoGenome, Evolvable, InputFn, NeuronRole};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Echo genome with `n` in 4..=max_n neurons: three inputs, one
/// output and, if `with_bias` and room allows, one bias neuron, at random
/// positions. About 60% of the entries are non-zero.
pub fn random_echo(rng: &mut ChaCha8Rng, max_n: usize, with_bias: bool) -> EchoGenome {
    let n = rng.random_range(4..=max_n.max(4));
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    let inputs = order[..3].to_vec();
    let output = order[3];
    let bias = if with_bias && n >= 5 {
        vec![order[4]]
    } else {
        vec![]
    };
    let functions = (0..3)
        .map(|_| {
            if rng.random_bool(0.5) {
                InputFn::Identity
            } else {
                InputFn::SignReversal
            }
        })
        .collect();
    let mut rows = vec![vec![0.0; n]; n];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, w) in row.iter_mut().enumerate() {
            if bias.contains(&c) {
                *w = if r == c { 1.0 } else { 0.0 };
            } else if rng.random_bool(0.6) {
                *w = rng.random_range(-2.0..2.0);
            }
        }
    }
    EchoGenome::from_rows(rows, inputs, functions, vec![output], bias)
        .expect("generated genome is valid")
}

/// Scalar per-neuron interpreter: one step of ReLU dynamics. Returns the
/// new activations and pre-activations.
pub fn echo_reference_step(
    genome: &EchoGenome,
    activations: &[f64],
    input: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = genome.neuron_count();
    let mut pre = vec![0.0; n];
    for (j, p) in pre.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (r, &a) in activations.iter().enumerate() {
            sum += genome.weight(r, j) * a;
        }
        if let Some(k) = genome.input_neurons().iter().position(|&i| i == j) {
            sum += match genome.input_functions()[k] {
                InputFn::Identity => input[k],
                InputFn::SignReversal => -input[k],
            };
        }
        *p = sum;
    }
    let act = pre.iter().map(|&p| if p > 0.0 { p } else { 0.0 }).collect();
    (act, pre)
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Genome reached by `steps` random structural and weight mutations from
/// a minimal one.
pub fn mutated<G: Evolvable>(rng: &mut ChaCha8Rng, steps: usize) -> G {
    let config = EvolutionConfig {
        mutation: MutationRates {
            weight: 0.4,
            add_synapse: 0.2,
            remove_synapse: 0.1,
            add_neuron: 0.2,
            remove_neuron: 0.1,
            ..MutationRates::default()
        },
        ..EvolutionConfig::default()
    };
    let mut genome = G::minimal(1.0, rng);
    for _ in 0..steps {
        genome.mutate(&config, rng);
    }
    genome
}

/// Recursive evaluation of an RNN straight from its synapse list, without
/// layers: a neuron's value at step t aggregates forward sources at step t
/// and recurrent sources at step t-1. Returns the sigmoid outputs per step.
pub fn rnn_reference(genome: &RnnGenome, inputs: &[[f64; 3]], init: f64) -> Vec<Vec<f64>> {
    let input_ids = genome.input_ids();
    let output_ids = genome.output_ids();
    let mut prev: BTreeMap<u32, f64> = genome.neurons().iter().map(|n| (n.id, init)).collect();
    let mut trace = Vec::new();
    for x in inputs {
        let mut memo: BTreeMap<u32, f64> = BTreeMap::new();
        fn aggregate(
            g: &RnnGenome,
            id: u32,
            prev: &BTreeMap<u32, f64>,
            memo: &mut BTreeMap<u32, f64>,
            inputs: &[u32],
            x: &[f64; 3],
        ) -> f64 {
            let mut sum = 0.0;
            for s in g.synapses().iter().filter(|s| s.dst == id) {
                sum += s.weight
                    * match s.kind {
                        SynapseKind::Forward => value(g, s.src, prev, memo, inputs, x),
                        SynapseKind::Recurrent => prev[&s.src],
                    };
            }
            sum
        }
        fn value(
            g: &RnnGenome,
            id: u32,
            prev: &BTreeMap<u32, f64>,
            memo: &mut BTreeMap<u32, f64>,
            inputs: &[u32],
            x: &[f64; 3],
        ) -> f64 {
            if let Some(&v) = memo.get(&id) {
                return v;
            }
            let v = match g.role_of(id).unwrap() {
                NeuronRole::Input => x[inputs.iter().position(|&i| i == id).unwrap()],
                NeuronRole::Bias => 1.0,
                _ => aggregate(g, id, prev, memo, inputs, x).max(0.0),
            };
            memo.insert(id, v);
            v
        }
        let ids: Vec<u32> = genome.neurons().iter().map(|n| n.id).collect();
        for &id in &ids {
            value(genome, id, &prev, &mut memo, &input_ids, x);
        }
        let outs = output_ids
            .iter()
            .map(|&o| sigmoid(aggregate(genome, o, &prev, &mut memo, &input_ids, x)))
            .collect();
        trace.push(outs);
        prev = memo;
    }
    trace
}

/// Parsed view of a DOT graph produced by the exporter.
#[derive(Debug, Default)]
pub struct DotGraph {
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

fn parse_attributes(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut attrs = BTreeMap::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let eq = rest
            .find('=')
            .ok_or_else(|| format!("attribute without '=': {rest}"))?;
        let key = rest[..eq].trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad attribute key {key:?}"));
        }
        rest = rest[eq + 1..].trim_start();
        let value;
        if let Some(stripped) = rest.strip_prefix('"') {
            let mut end = None;
            let mut escaped = false;
            for (i, c) in stripped.char_indices() {
                match c {
                    '\\' if !escaped => escaped = true,
                    '"' if !escaped => {
                        end = Some(i);
                        break;
                    }
                    _ => escaped = false,
                }
            }
            let end = end.ok_or("unterminated string")?;
            value = stripped[..end].to_string();
            rest = stripped[end + 1..].trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            value = rest[..end].trim().to_string();
            if value.is_empty() {
                return Err(format!("empty value for {key}"));
            }
            rest = &rest[end..];
        }
        if attrs.insert(key.clone(), value).is_some() {
            return Err(format!("duplicate attribute {key}"));
        }
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(attrs)
}

fn is_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.starts_with(|c: char| c.is_ascii_digit())
}

/// Checks the subset of the DOT grammar the exporter emits: one `digraph`,
/// graph/node default statements, node statements, `->` edges between
/// declared nodes, well-formed attribute lists, numeric non-negative
/// pen widths and `#rrggbb` colours.
pub fn check_dot(text: &str) -> Result<DotGraph, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or("empty document")?;
    let name = header
        .strip_prefix("digraph ")
        .and_then(|h| h.strip_suffix('{'))
        .map(str::trim)
        .ok_or_else(|| format!("bad header {header:?}"))?;
    if !is_id(name) {
        return Err(format!("bad graph name {name:?}"));
    }
    let mut graph = DotGraph::default();
    let mut closed = false;
    for line in lines {
        if closed {
            return Err(format!("content after closing brace: {line:?}"));
        }
        if line == "}" {
            closed = true;
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| format!("missing ';': {line:?}"))?;
        if let Some((lhs, value)) = stmt
            .split_once('=')
            .filter(|(l, _)| is_id(l.trim()) && !stmt.contains('['))
        {
            if value.trim().is_empty() || lhs.trim().is_empty() {
                return Err(format!("bad graph attribute {stmt:?}"));
            }
            continue;
        }
        let open = stmt
            .find('[')
            .ok_or_else(|| format!("statement without attributes: {stmt:?}"))?;
        let body = stmt[open + 1..]
            .strip_suffix(']')
            .ok_or_else(|| format!("unclosed attribute list: {stmt:?}"))?;
        let attrs = parse_attributes(body)?;
        for key in ["color", "fillcolor"] {
            if let Some(c) = attrs.get(key) {
                if !(c.len() == 7
                    && c.starts_with('#')
                    && c[1..].chars().all(|h| h.is_ascii_hexdigit()))
                {
                    return Err(format!("bad colour {c:?}"));
                }
            }
        }
        if let Some(p) = attrs.get("penwidth") {
            let w: f64 = p
                .parse()
                .map_err(|_| format!("penwidth {p:?} is not a number"))?;
            if !(w >= 0.0 && w.is_finite()) {
                return Err(format!("penwidth {w} out of range"));
            }
        }
        let target = stmt[..open].trim();
        if let Some((a, b)) = target.split_once("->") {
            let (a, b) = (a.trim().to_string(), b.trim().to_string());
            if !is_id(&a) || !is_id(&b) {
                return Err(format!("bad edge endpoints {target:?}"));
            }
            graph.edges.push((a, b, attrs));
        } else if target == "node" || target == "edge" || target == "graph" {
            continue;
        } else {
            if !is_id(target) {
                return Err(format!("bad node id {target:?}"));
            }
            if !graph.edges.is_empty() {
                return Err("node declared after edges".into());
            }
            if graph.nodes.insert(target.to_string(), attrs).is_some() {
                return Err(format!("node {target} declared twice"));
            }
        }
    }
    if !closed {
        return Err("missing closing brace".into());
    }
    let declared: BTreeSet<&String> = graph.nodes.keys().collect();
    for (a, b, _) in &graph.edges {
        if !declared.contains(a) || !declared.contains(b) {
            return Err(format!("edge {a} -> {b} references an undeclared node"));
        }
    }
    Ok(graph)
}
