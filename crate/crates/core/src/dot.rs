//! Graphviz rendering of genomes.
//!
//! Nodes are coloured by role (input green, output gold, bias purple,
//! hidden brown). Edge width is proportional to the absolute weight; the
//! dark shade of a hue marks a positive weight and the light shade a
//! negative one. Echo Network edges are blue; RNN forward synapses are blue
//! and recurrent synapses red.

use std::fmt::Write;

use crate::activation::InputFn;
use crate::echo::{EchoGenome, NeuronRole};
use crate::genome::GenomeDocument;
use crate::rnn::{RnnGenome, SynapseKind};

/// Width of the heaviest edge.
const MAX_PENWIDTH: f64 = 4.0;

fn fill(role: NeuronRole) -> &'static str {
    match role {
        NeuronRole::Input => "#4caf50",
        NeuronRole::Output => "#ffd700",
        NeuronRole::Bias => "#8e44ad",
        NeuronRole::Hidden => "#8b5a2b",
    }
}

fn role_name(role: NeuronRole) -> &'static str {
    match role {
        NeuronRole::Input => "input",
        NeuronRole::Output => "output",
        NeuronRole::Bias => "bias",
        NeuronRole::Hidden => "hidden",
    }
}

#[derive(Clone, Copy)]
enum Hue {
    Blue,
    Red,
}

fn edge_color(hue: Hue, weight: f64) -> &'static str {
    match (hue, weight >= 0.0) {
        (Hue::Blue, true) => "#1f3a93",
        (Hue::Blue, false) => "#9ecbff",
        (Hue::Red, true) => "#a31515",
        (Hue::Red, false) => "#f4a6a6",
    }
}

struct Edge {
    src: String,
    dst: String,
    weight: f64,
    hue: Hue,
}

fn render(name: &str, nodes: &[(String, String, NeuronRole)], edges: &[Edge]) -> String {
    let max = edges.iter().fold(0.0f64, |m, e| m.max(e.weight.abs()));
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(
        out,
        "  node [shape=circle, style=filled, fontname=\"Helvetica\"];"
    )
    .unwrap();
    for (id, label, role) in nodes {
        let font = if *role == NeuronRole::Bias {
            "white"
        } else {
            "black"
        };
        writeln!(
            out,
            "  {id} [label=\"{label}\", fillcolor=\"{}\", fontcolor=\"{font}\"];",
            fill(*role)
        )
        .unwrap();
    }
    for e in edges {
        let width = if max > 0.0 {
            MAX_PENWIDTH * e.weight.abs() / max
        } else {
            0.0
        };
        writeln!(
            out,
            "  {} -> {} [color=\"{}\", penwidth={:.4}, tooltip=\"{}\"];",
            e.src,
            e.dst,
            edge_color(e.hue, e.weight),
            width,
            e.weight
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn echo_to_dot(genome: &EchoGenome) -> String {
    let n = genome.neuron_count();
    let nodes: Vec<_> = (0..n)
        .map(|i| {
            let role = genome.role(i);
            let mut label = format!("{i}\\n{}", role_name(role));
            if let Some(k) = genome.input_neurons().iter().position(|&x| x == i) {
                if genome.input_functions()[k] == InputFn::SignReversal {
                    label.push_str(" (-x)");
                }
            }
            (format!("n{i}"), label, role)
        })
        .collect();
    let mut edges = Vec::new();
    for src in 0..n {
        for dst in 0..n {
            let w = genome.weight(src, dst);
            if w != 0.0 {
                edges.push(Edge {
                    src: format!("n{src}"),
                    dst: format!("n{dst}"),
                    weight: w,
                    hue: Hue::Blue,
                });
            }
        }
    }
    render("echo", &nodes, &edges)
}

pub fn rnn_to_dot(genome: &RnnGenome) -> String {
    let mut neurons: Vec<_> = genome.neurons().iter().collect();
    neurons.sort_by_key(|n| (n.layer, n.id));
    let nodes: Vec<_> = neurons
        .iter()
        .map(|n| {
            (
                format!("n{}", n.id),
                format!("{}\\n{}\\nL{}", n.id, role_name(n.role), n.layer),
                n.role,
            )
        })
        .collect();
    let mut synapses: Vec<_> = genome.synapses().iter().collect();
    synapses.sort_by_key(|s| s.key());
    let edges: Vec<_> = synapses
        .iter()
        .map(|s| Edge {
            src: format!("n{}", s.src),
            dst: format!("n{}", s.dst),
            weight: s.weight,
            hue: match s.kind {
                SynapseKind::Forward => Hue::Blue,
                SynapseKind::Recurrent => Hue::Red,
            },
        })
        .collect();
    render("rnn", &nodes, &edges)
}

pub fn export_dot(document: &GenomeDocument) -> String {
    match document {
        GenomeDocument::Echo(g) => echo_to_dot(g),
        GenomeDocument::Rnn(g) => rnn_to_dot(g),
    }
}
