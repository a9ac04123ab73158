//! Recording classification, fitness, and the validation/test protocol.
//!
//! A recording is classified by running the network over its window rows
//! from a fresh state, rounding each sigmoid output to 0 or 1 and comparing
//! the mean of those bits with a threshold. Fitness is the inverse of the
//! classification error on a random subset of the training recordings.

use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::data::{window, Label, Recording, WindowMatrix};
use crate::error::{Error, Result};
use crate::genome::Evolvable;

/// Offset added to the error before inversion; a perfect score maps to 1000.
pub const FITNESS_EPSILON: f64 = 1e-3;

/// Window width fed to the three input neurons.
pub const WINDOW_WIDTH: usize = 3;

/// A recording turned into network input.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedRecording {
    pub id: String,
    pub label: Label,
    pub windows: WindowMatrix,
}

impl PreparedRecording {
    pub fn new(recording: &Recording, width: usize) -> Result<Self> {
        Ok(PreparedRecording {
            id: recording.id.clone(),
            label: recording.label,
            windows: window(&recording.samples, width)?,
        })
    }
}

pub fn prepare_all(recordings: &[Recording], width: usize) -> Result<Vec<PreparedRecording>> {
    recordings
        .iter()
        .map(|r| PreparedRecording::new(r, width))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationOutcome {
    pub predicted: Label,
    /// Mean of the rounded per-step outputs.
    pub mean_output: f64,
    pub truth: Label,
}

impl EvaluationOutcome {
    pub fn is_correct(&self) -> bool {
        self.predicted == self.truth
    }
}

/// Classifies one recording. `threshold` is compared strictly: a mean
/// above it means atypical.
pub fn classify_recording<G: Evolvable>(
    genome: &G,
    recording: &PreparedRecording,
    init_value: f64,
    threshold: f64,
) -> Result<EvaluationOutcome> {
    let width = recording.windows.width();
    if genome.input_count() != width {
        return Err(Error::InputArity {
            expected: genome.input_count(),
            got: width,
        });
    }
    let mut trace = Vec::with_capacity(recording.windows.rows());
    genome.output_trace(recording.windows.as_slice(), width, init_value, &mut trace)?;
    let ones = trace.iter().filter(|&&y| y >= 0.5).count();
    let mean_output = ones as f64 / trace.len() as f64;
    Ok(EvaluationOutcome {
        predicted: if mean_output > threshold {
            Label::Atypical
        } else {
            Label::Normal
        },
        mean_output,
        truth: recording.label,
    })
}

/// Share of misclassified recordings.
pub fn error_rate<'a, G: Evolvable>(
    genome: &G,
    recordings: impl IntoIterator<Item = &'a PreparedRecording>,
    init_value: f64,
    threshold: f64,
) -> Result<f64> {
    let mut total = 0usize;
    let mut wrong = 0usize;
    for r in recordings {
        total += 1;
        if !classify_recording(genome, r, init_value, threshold)?.is_correct() {
            wrong += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptySubset);
    }
    Ok(wrong as f64 / total as f64)
}

pub fn fitness_from_error(error: f64) -> f64 {
    1.0 / (error + FITNESS_EPSILON)
}

/// Inverse classification error over `subset`.
pub fn fitness_of<'a, G: Evolvable>(
    genome: &G,
    subset: impl IntoIterator<Item = &'a PreparedRecording>,
    init_value: f64,
    threshold: f64,
) -> Result<f64> {
    error_rate(genome, subset, init_value, threshold).map(fitness_from_error)
}

/// `round(fraction · len)` distinct indices (at least one), sorted.
pub fn sample_subset<R: Rng + ?Sized>(len: usize, fraction: f64, rng: &mut R) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let size = ((fraction * len as f64).round() as usize).clamp(1, len);
    let mut picked = index::sample(rng, len, size).into_vec();
    picked.sort_unstable();
    picked
}

/// One row of the per-generation metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_raw_fitness: f64,
    pub species_count: usize,
    /// Validation accuracy of this generation's champion.
    #[serde(skip)]
    pub validation_accuracy: f64,
    /// Best validation accuracy so far.
    pub best_validation_accuracy: f64,
    pub champion_stored: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    pub generations: Vec<GenerationRecord>,
    pub champion_generation: Option<usize>,
    pub test_accuracy: Option<f64>,
}

impl RunMetrics {
    /// CSV with one row per generation and a closing `test_accuracy` row.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for record in &self.generations {
            writer.serialize(record)?;
        }
        if let Some(acc) = self.test_accuracy {
            writer.write_record(["test_accuracy", &acc.to_string(), "", "", ""])?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Data(format!("metrics buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }

    /// Final test accuracy recorded in a metrics CSV.
    pub fn read_test_accuracy(path: &Path) -> Result<Option<f64>> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .from_path(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        for record in reader.records() {
            let record = record?;
            if record.get(0) == Some("test_accuracy") {
                let value = record.get(1).unwrap_or_default();
                return value
                    .parse()
                    .map(Some)
                    .map_err(|e| Error::Data(format!("{}: {value:?}: {e}", path.display())));
            }
        }
        Ok(None)
    }
}

/// Tracks the best network on the validation set across generations and
/// evaluates it on the test set at the end of a run.
#[derive(Debug, Clone)]
pub struct ChampionTracker<G> {
    init_value: f64,
    threshold: f64,
    best_error: f64,
    stored: Option<(usize, G)>,
    metrics: RunMetrics,
}

impl<G: Evolvable> ChampionTracker<G> {
    pub fn new(init_value: f64, threshold: f64) -> Self {
        ChampionTracker {
            init_value,
            threshold,
            best_error: f64::INFINITY,
            stored: None,
            metrics: RunMetrics::default(),
        }
    }

    /// Evaluates this generation's champion on the full validation set and
    /// stores it if it beats every earlier champion. Returns whether it was
    /// stored.
    pub fn observe(
        &mut self,
        generation: usize,
        champion: &G,
        best_raw_fitness: f64,
        species_count: usize,
        validation: &[PreparedRecording],
    ) -> Result<bool> {
        if validation.is_empty() {
            return Err(Error::Data("validation split is empty".into()));
        }
        let error = error_rate(champion, validation, self.init_value, self.threshold)?;
        let stored = error < self.best_error;
        if stored {
            self.best_error = error;
            self.stored = Some((generation, champion.clone()));
            self.metrics.champion_generation = Some(generation);
        }
        self.metrics.generations.push(GenerationRecord {
            generation,
            best_raw_fitness,
            species_count,
            validation_accuracy: 1.0 - error,
            best_validation_accuracy: 1.0 - self.best_error,
            champion_stored: stored,
        });
        Ok(stored)
    }

    pub fn stored(&self) -> Option<(usize, &G)> {
        self.stored.as_ref().map(|(g, genome)| (*g, genome))
    }

    /// Accuracy of the stored network on the test set.
    pub fn finish(&mut self, test: &[PreparedRecording]) -> Result<f64> {
        if test.is_empty() {
            return Err(Error::Data("test split is empty".into()));
        }
        let (_, genome) = self
            .stored
            .as_ref()
            .ok_or_else(|| Error::Data("no generation was observed".into()))?;
        let accuracy = 1.0 - error_rate(genome, test, self.init_value, self.threshold)?;
        self.metrics.test_accuracy = Some(accuracy);
        Ok(accuracy)
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::InputFn;
    use crate::echo::EchoGenome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_genome() -> EchoGenome {
        EchoGenome::from_rows(
            vec![vec![0.0; 4]; 4],
            vec![0, 1, 2],
            vec![InputFn::Identity; 3],
            vec![3],
            vec![],
        )
        .unwrap()
    }

    /// Output aggregates +1 from the bias: every step rounds to 1.
    fn always_atypical() -> EchoGenome {
        let mut rows = vec![vec![0.0; 5]; 5];
        rows[4][4] = 1.0;
        rows[4][3] = 1.0;
        EchoGenome::from_rows(
            rows,
            vec![0, 1, 2],
            vec![InputFn::Identity; 3],
            vec![3],
            vec![4],
        )
        .unwrap()
    }

    /// Output aggregates -1 from the bias: every step rounds to 0.
    fn always_normal() -> EchoGenome {
        let mut rows = vec![vec![0.0; 5]; 5];
        rows[4][4] = 1.0;
        rows[4][3] = -1.0;
        EchoGenome::from_rows(
            rows,
            vec![0, 1, 2],
            vec![InputFn::Identity; 3],
            vec![3],
            vec![4],
        )
        .unwrap()
    }

    fn prepared(label: Label, len: usize) -> PreparedRecording {
        let samples: Vec<f64> = (0..len).map(|i| (i as f64).sin()).collect();
        PreparedRecording {
            id: "r".into(),
            label,
            windows: window(&samples, 3).unwrap(),
        }
    }

    #[test]
    fn zero_genome_labels_atypical() {
        let out =
            classify_recording(&zero_genome(), &prepared(Label::Normal, 1000), 1.0, 0.5).unwrap();
        assert_eq!(out.mean_output, 1.0);
        assert_eq!(out.predicted, Label::Atypical);
        assert!(!out.is_correct());
    }

    #[test]
    fn unreachable_threshold_means_normal() {
        let out =
            classify_recording(&zero_genome(), &prepared(Label::Normal, 50), 1.0, 1.1).unwrap();
        assert_eq!(out.predicted, Label::Normal);
    }

    #[test]
    fn arity_mismatch() {
        let rec = PreparedRecording {
            id: "w".into(),
            label: Label::Normal,
            windows: window(&[1.0; 10], 4).unwrap(),
        };
        assert!(matches!(
            classify_recording(&zero_genome(), &rec, 1.0, 0.5),
            Err(Error::InputArity { .. })
        ));
    }

    #[test]
    fn fitness_formula() {
        assert!((fitness_from_error(0.5) - 1.0 / 0.501).abs() < 1e-12);
        assert!((fitness_from_error(0.0) - 1000.0).abs() < 1e-9);
        assert!((fitness_from_error(1.0) - 1.0 / 1.001).abs() < 1e-12);
    }

    #[test]
    fn fitness_on_subset() {
        let recs = [prepared(Label::Atypical, 20), prepared(Label::Normal, 20)];
        let f = fitness_of(&always_atypical(), &recs, 1.0, 0.5).unwrap();
        assert!((f - fitness_from_error(0.5)).abs() < 1e-12);
        let only_atypical = [prepared(Label::Atypical, 20)];
        assert!(
            (fitness_of(&always_atypical(), &only_atypical, 1.0, 0.5).unwrap() - 1000.0).abs()
                < 1e-9
        );
        assert!(matches!(
            fitness_of(&always_atypical(), &[], 1.0, 0.5),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn subset_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_subset(9960, 0.05, &mut rng).len(), 498);
        assert_eq!(
            sample_subset(10, 1.0, &mut rng),
            (0..10).collect::<Vec<_>>()
        );
        assert_eq!(sample_subset(10, 0.05, &mut rng).len(), 1);
    }

    #[test]
    fn tracker_keeps_best_validation_network() {
        let validation = [prepared(Label::Normal, 20), prepared(Label::Normal, 20)];
        let test = [prepared(Label::Normal, 20), prepared(Label::Atypical, 20)];
        let mut tracker = ChampionTracker::new(1.0, 0.5);
        assert!(tracker
            .observe(1, &always_atypical(), 1.0, 1, &validation)
            .unwrap());
        assert!(tracker
            .observe(2, &always_normal(), 1.0, 1, &validation)
            .unwrap());
        assert!(!tracker
            .observe(3, &always_atypical(), 1.0, 1, &validation)
            .unwrap());
        assert_eq!(tracker.stored().unwrap().0, 2);
        assert_eq!(tracker.finish(&test).unwrap(), 0.5);
        let best: Vec<f64> = tracker
            .metrics()
            .generations
            .iter()
            .map(|r| r.best_validation_accuracy)
            .collect();
        assert_eq!(best, vec![0.0, 1.0, 1.0]);
        let csv = tracker.metrics().to_csv().unwrap();
        assert!(csv.starts_with(
            "generation,best_raw_fitness,species_count,best_validation_accuracy,champion_stored\n"
        ));
        assert!(csv.ends_with("test_accuracy,0.5,,,\n"));
    }

    #[test]
    fn first_champion_is_kept_without_improvement() {
        let validation = [prepared(Label::Normal, 20)];
        let mut tracker = ChampionTracker::new(1.0, 0.5);
        tracker
            .observe(1, &always_normal(), 1.0, 1, &validation)
            .unwrap();
        tracker
            .observe(2, &always_atypical(), 1.0, 1, &validation)
            .unwrap();
        assert_eq!(tracker.stored().unwrap().0, 1);
    }

    #[test]
    fn missing_splits() {
        let mut tracker: ChampionTracker<EchoGenome> = ChampionTracker::new(1.0, 0.5);
        assert!(tracker.observe(1, &always_normal(), 1.0, 1, &[]).is_err());
        assert!(tracker.finish(&[prepared(Label::Normal, 5)]).is_err());
    }
}
