//! Synthetic two-class signals for desk-scale experiments: a noisy sine
//! ("normal") against the same sine with amplitude bursts ("atypical").

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{DatasetSplit, Label, Recording};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    /// Samples per recording.
    pub length: usize,
    /// Standard deviation of the additive Gaussian noise.
    pub noise: f64,
    pub amplitude: f64,
    /// Sine period in samples.
    pub period: f64,
    pub burst_count: usize,
    /// Length of each burst as a share of the recording.
    pub burst_fraction: f64,
    /// Amplitude multiplier inside a burst.
    pub burst_gain: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            train: 100,
            validation: 40,
            test: 40,
            length: 200,
            noise: 0.3,
            amplitude: 1.0,
            period: 20.0,
            burst_count: 3,
            burst_fraction: 0.2,
            burst_gain: 1.6,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.length < 3 {
            return Err(Error::Config("synthetic length must be at least 3".into()));
        }
        if self.burst_count == 0 || self.burst_fraction <= 0.0 {
            return Err(Error::Config("synthetic bursts must be non-empty".into()));
        }
        if self.burst_fraction * self.burst_count as f64 > 1.0 {
            return Err(Error::Config(format!(
                "{} bursts of {} do not fit in one recording",
                self.burst_count, self.burst_fraction
            )));
        }
        if !(self.noise >= 0.0 && self.period > 0.0 && self.amplitude > 0.0) {
            return Err(Error::Config(
                "synthetic noise, period and amplitude out of range".into(),
            ));
        }
        Ok(())
    }

    fn burst_len(&self) -> usize {
        ((self.burst_fraction * self.length as f64).round() as usize).max(1)
    }
}

fn recording<R: Rng + ?Sized>(
    config: &SynthConfig,
    id: String,
    fold: u8,
    label: Label,
    rng: &mut R,
) -> Recording {
    let noise = Normal::new(0.0, config.noise).expect("noise validated");
    let phase = rng.random::<f64>() * TAU;
    let mut gain = vec![1.0; config.length];
    if label == Label::Atypical {
        let segment = config.length / config.burst_count;
        let burst = config.burst_len().min(segment);
        for k in 0..config.burst_count {
            let start = k * segment + rng.random_range(0..=segment - burst);
            gain[start..start + burst]
                .iter_mut()
                .for_each(|g| *g = config.burst_gain);
        }
    }
    let samples = gain
        .iter()
        .enumerate()
        .map(|(t, g)| {
            let clean = g * config.amplitude * (TAU * t as f64 / config.period + phase).sin();
            if config.noise > 0.0 {
                clean + noise.sample(rng)
            } else {
                clean
            }
        })
        .collect();
    Recording {
        id,
        samples,
        label,
        strat_fold: fold,
        human_validated: true,
        normal_confidence: if label == Label::Normal { 100.0 } else { 0.0 },
    }
}

fn split<R: Rng + ?Sized>(
    config: &SynthConfig,
    name: &str,
    count: usize,
    fold: u8,
    rng: &mut R,
) -> Vec<Recording> {
    (0..count)
        .map(|i| {
            let label = if i % 2 == 0 {
                Label::Normal
            } else {
                Label::Atypical
            };
            recording(config, format!("synth-{name}-{i:05}"), fold, label, rng)
        })
        .collect()
}

/// Generates balanced train/validation/test splits (classes alternate, so
/// odd counts carry one extra normal recording).
pub fn synth_dataset<R: Rng + ?Sized>(config: &SynthConfig, rng: &mut R) -> Result<DatasetSplit> {
    config.validate()?;
    Ok(DatasetSplit {
        train: split(config, "train", config.train, 1, rng),
        validation: split(config, "validation", config.validation, 9, rng),
        test: split(config, "test", config.test, 10, rng),
        set_aside: Vec::new(),
    })
}
