//! Renders a minimal Echo Network and a minimal RNN as Graphviz graphs.
//!
//! cargo run --example dot_export [out_dir]

use std::path::PathBuf;

use echonet::dot::export_dot;
use echonet::experiment::rng_stream;
use echonet::{EchoGenome, Evolvable, RnnGenome};

fn main() -> echonet::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let mut rng = rng_stream(5, 2);
    let docs = [
        (
            "echo_minimal",
            EchoGenome::minimal(1.0, &mut rng).into_document(),
        ),
        (
            "rnn_minimal",
            RnnGenome::minimal(1.0, &mut rng).into_document(),
        ),
    ];
    for (name, doc) in docs {
        let json = out.join(format!("{name}.json"));
        let dot = out.join(format!("{name}.dot"));
        doc.write(&json)?;
        std::fs::write(&dot, export_dot(&doc)).map_err(|e| echonet::Error::Data(e.to_string()))?;
        println!("wrote {} and {}", json.display(), dot.display());
    }
    Ok(())
}
