//! Writes a tiny export (metadata table plus `.f32` waveforms) and runs it
//! through the loading and filtering pipeline.
//!
//! cargo run --example load_export

use std::fs;

use echonet::data::{load_and_filter, LoadOptions};
use echonet::experiment::rng_stream;

fn main() -> echonet::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| echonet::Error::Data(e.to_string()))?;
    let mut table = String::from("id,fold,validated_by_human,normal_confidence,label\n");
    for i in 0..60u32 {
        let fold = 1 + i % 10;
        let label = if i % 3 == 0 { "MI" } else { "NORM" };
        let validated = u8::from(i % 7 != 0);
        let confidence = if i % 11 == 0 { 25 } else { 100 };
        table.push_str(&format!("{i:05},{fold},{validated},{confidence},{label}\n"));
        let bytes: Vec<u8> = (0..100)
            .flat_map(|t| ((t as f32 * 0.2 + i as f32).sin()).to_le_bytes())
            .collect();
        fs::write(dir.path().join(format!("{i:05}.f32")), bytes)
            .map_err(|e| echonet::Error::Data(e.to_string()))?;
    }
    fs::write(dir.path().join("metadata.csv"), table)
        .map_err(|e| echonet::Error::Data(e.to_string()))?;

    let options = LoadOptions {
        set_aside_count: 4,
        ..LoadOptions::default()
    };
    let (split, report) = load_and_filter(dir.path(), &options, &mut rng_stream(0, 0))?;
    print!("{}", split.summary());
    println!("set aside: {}", report.set_aside);
    for (name, counts) in [
        ("train", report.train),
        ("validation", report.validation),
        ("test", report.test),
    ] {
        println!("{name}: {counts:?}");
    }
    Ok(())
}
