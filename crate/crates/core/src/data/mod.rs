//! Recordings, dataset splits and sliding-window input preparation.

mod export;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use export::{load_and_filter, FilterReport, LoadOptions, SplitCounts, WaveformFormat};
pub use synth::{synth_dataset, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Normal,
    Atypical,
}

impl Label {
    /// Binary class index: 0 normal, 1 atypical.
    pub fn as_index(self) -> u8 {
        match self {
            Label::Normal => 0,
            Label::Atypical => 1,
        }
    }
}

/// One single-channel recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub id: String,
    pub samples: Vec<f64>,
    pub label: Label,
    pub strat_fold: u8,
    pub human_validated: bool,
    /// Confidence (percent) of the normal annotation.
    pub normal_confidence: f64,
}

/// Train, validation and test partitions plus the untouched set-aside.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Recording>,
    pub validation: Vec<Recording>,
    pub test: Vec<Recording>,
    pub set_aside: Vec<Recording>,
}

impl DatasetSplit {
    pub fn summary(&self) -> String {
        let count = |rs: &[Recording], l: Label| rs.iter().filter(|r| r.label == l).count();
        let mut out = String::new();
        for (name, rs) in [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            out.push_str(&format!(
                "{name}: {} ({} normal / {} atypical)\n",
                rs.len(),
                count(rs, Label::Normal),
                count(rs, Label::Atypical)
            ));
        }
        out
    }
}

/// Row-major `rows × width` matrix of overlapping sample windows.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMatrix {
    width: usize,
    values: Vec<f64>,
}

impl WindowMatrix {
    pub fn rows(&self) -> usize {
        self.values.len() / self.width
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width)
    }

    /// All rows concatenated.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Every run of `width` consecutive samples, stride one, without padding.
pub fn window(samples: &[f64], width: usize) -> Result<WindowMatrix> {
    if width == 0 || samples.len() < width {
        return Err(Error::SignalTooShort {
            len: samples.len(),
            width,
        });
    }
    let values = samples.windows(width).flatten().copied().collect();
    Ok(WindowMatrix { width, values })
}
