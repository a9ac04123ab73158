//! Repeated seeded evolution runs with on-disk artefacts.
//!
//! Layout of an experiment directory:
//!
//! ```text
//! out/
//!   config.toml          resolved configuration
//!   run_manifest.json    config, seed, timestamps, run records, summary
//!   summary.txt          accuracy table
//!   data_report.json     filtering counts (exported data only)
//!   run_00/
//!     metrics.csv
//!     champion_g0001.json ...   one file per stored champion
//!     champion.json
//!     champion.dot
//!     run.json
//! ```
//!
//! Run `r` uses seed `seed + r`. Each run draws from separate ChaCha
//! streams for subset sampling and for every island's evolution, so
//! parallel evaluation never touches an evolution stream. The dataset is
//! built once per experiment from the base seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    load_and_filter, synth_dataset, DatasetSplit, FilterReport, LoadOptions, SynthConfig,
};
use crate::dot::export_dot;
use crate::echo::EchoGenome;
use crate::error::{Error, Result};
use crate::evolution::{migrate, EvolutionConfig, Population};
use crate::genome::{Evolvable, GenomeDocument, GenomeKind};
use crate::harness::{
    fitness_of, prepare_all, sample_subset, ChampionTracker, PreparedRecording, RunMetrics,
    WINDOW_WIDTH,
};
use crate::rnn::RnnGenome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One population of `population_size`.
    #[default]
    Single,
    /// `island_count` populations of `island_population_size` on a ring.
    Islands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// A metadata table plus waveform files under `data_path`.
    Real,
    #[default]
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub repeats: usize,
    pub mode: Mode,
    pub network: GenomeKind,
    pub data: DataSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_path: Option<PathBuf>,
    pub evolution: EvolutionConfig,
    pub load: LoadOptions,
    pub synthetic: SynthConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            repeats: 10,
            mode: Mode::Single,
            network: GenomeKind::Echo,
            data: DataSource::Synthetic,
            data_path: None,
            evolution: EvolutionConfig::default(),
            load: LoadOptions::default(),
            synthetic: SynthConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.evolution.validate()?;
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.data == DataSource::Real && self.data_path.is_none() {
            return Err(Error::Config("exported data needs data_path".into()));
        }
        Ok(())
    }

    fn population_layout(&self) -> (usize, usize) {
        match self.mode {
            Mode::Single => (1, self.evolution.population_size),
            Mode::Islands => (
                self.evolution.island_count,
                self.evolution.island_population_size,
            ),
        }
    }
}

/// `seed` on ChaCha stream `stream`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const DATA_STREAM: u64 = 0;
const SUBSET_STREAM: u64 = 1;
const EVOLUTION_STREAM: u64 = 2;

/// Windowed splits ready for evaluation.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Vec<PreparedRecording>,
    pub validation: Vec<PreparedRecording>,
    pub test: Vec<PreparedRecording>,
}

impl PreparedData {
    pub fn new(split: &DatasetSplit) -> Result<Self> {
        let data = PreparedData {
            train: prepare_all(&split.train, WINDOW_WIDTH)?,
            validation: prepare_all(&split.validation, WINDOW_WIDTH)?,
            test: prepare_all(&split.test, WINDOW_WIDTH)?,
        };
        for (name, set) in [
            ("train", &data.train),
            ("validation", &data.validation),
            ("test", &data.test),
        ] {
            if set.is_empty() {
                return Err(Error::Data(format!("{name} split is empty")));
            }
        }
        Ok(data)
    }
}

/// Builds the dataset named by `config` from the experiment's base seed.
pub fn load_data(config: &ExperimentConfig) -> Result<(DatasetSplit, Option<FilterReport>)> {
    let mut rng = rng_stream(config.evolution.seed, DATA_STREAM);
    match config.data {
        DataSource::Synthetic => Ok((synth_dataset(&config.synthetic, &mut rng)?, None)),
        DataSource::Real => {
            let dir = config
                .data_path
                .as_deref()
                .ok_or_else(|| Error::Config("exported data needs data_path".into()))?;
            let (split, report) =
                load_and_filter(dir, &config.load, &mut rng).map_err(|e| match e {
                    Error::Io { path, source } => {
                        Error::Data(format!("{}: {source}", path.display()))
                    }
                    other => other,
                })?;
            Ok((split, Some(report)))
        }
    }
}

/// Outcome of one evolution run.
#[derive(Debug, Clone)]
pub struct RunOutcome<G> {
    pub metrics: RunMetrics,
    pub champion: G,
    pub champion_generation: usize,
    pub test_accuracy: f64,
    /// Every stored champion with the generation it was found in.
    pub history: Vec<(usize, G)>,
}

/// Evolves one run from `seed` and evaluates the stored champion on the
/// test split. Nothing is written to disk.
pub fn evolve<G: Evolvable>(
    config: &ExperimentConfig,
    data: &PreparedData,
    seed: u64,
) -> Result<RunOutcome<G>> {
    let evo = &config.evolution;
    let (island_count, size) = config.population_layout();
    let mut subset_rng = rng_stream(seed, SUBSET_STREAM);
    let mut rngs: Vec<ChaCha8Rng> = (0..island_count)
        .map(|i| rng_stream(seed, EVOLUTION_STREAM + i as u64))
        .collect();
    let mut islands: Vec<Population<G>> = rngs
        .iter_mut()
        .map(|rng| Population::seed(size, evo, seed, rng))
        .collect();
    let mut tracker = ChampionTracker::new(evo.init_value, evo.decision_threshold);
    let mut history = Vec::new();

    for generation in 1..=evo.generations {
        let subsets: Vec<Vec<usize>> = islands
            .iter()
            .map(|_| sample_subset(data.train.len(), evo.subset_fraction, &mut subset_rng))
            .collect();
        let fitness: Vec<Vec<f64>> = islands
            .par_iter()
            .zip(&subsets)
            .map(|(island, subset)| {
                island
                    .individuals
                    .par_iter()
                    .map(|ind| {
                        fitness_of(
                            &ind.genome,
                            subset.iter().map(|&i| &data.train[i]),
                            evo.init_value,
                            evo.decision_threshold,
                        )
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        for (island, raw) in islands.iter_mut().zip(&fitness) {
            island.record_fitness(raw)?;
        }

        let mut best = (0, 0);
        for (k, island) in islands.iter().enumerate() {
            if let Some(i) = island.champion_index() {
                if island.individuals[i].raw_fitness
                    > islands[best.0].individuals[best.1].raw_fitness
                {
                    best = (k, i);
                }
            }
        }
        let champion = islands[best.0].individuals[best.1].genome.clone();
        let best_raw = islands[best.0].individuals[best.1].raw_fitness;

        migrate(&mut islands, generation, evo)?;
        islands
            .par_iter_mut()
            .zip(rngs.par_iter_mut())
            .try_for_each(|(island, rng)| island.reproduce(evo, rng))?;
        let species: usize = islands.iter().map(|p| p.species.len()).sum();

        if tracker.observe(generation, &champion, best_raw, species, &data.validation)? {
            history.push((generation, champion));
        }
    }
    let test_accuracy = tracker.finish(&data.test)?;
    let (champion_generation, champion) =
        tracker
            .stored()
            .map(|(g, genome)| (g, genome.clone()))
            .ok_or_else(|| Error::Data("no champion stored".into()))?;
    Ok(RunOutcome {
        metrics: tracker.metrics().clone(),
        champion,
        champion_generation,
        test_accuracy,
        history,
    })
}

/// Per-run record written to `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub network: GenomeKind,
    pub mode: Mode,
    pub test_accuracy: f64,
    pub champion_generation: usize,
    /// Directory relative to the experiment directory.
    pub directory: PathBuf,
}

/// Accuracy statistics over repeated runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub network: GenomeKind,
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(network: GenomeKind, accuracies: &[f64]) -> Result<Self> {
        if accuracies.is_empty() {
            return Err(Error::Data("no completed runs".into()));
        }
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let std = if accuracies.len() > 1 {
            (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Summary {
            network,
            runs: accuracies.len(),
            mean,
            std,
            min: accuracies.iter().copied().fold(f64::INFINITY, f64::min),
            max: accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Accuracy table with one row per network type.
pub fn summary_table(rows: &[Summary]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<14}{:>6}{:>9}{:>9}{:>9}{:>9}",
        "network", "runs", "mean", "std", "min", "max"
    )
    .unwrap();
    for s in rows {
        writeln!(
            out,
            "{:<14}{:>6}{:>9.4}{:>9.4}{:>9.4}{:>9.4}",
            s.network.display_name(),
            s.runs,
            s.mean,
            s.std,
            s.min,
            s.max
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_run<G: Evolvable>(dir: &Path, outcome: &RunOutcome<G>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    outcome.metrics.write_csv(&dir.join("metrics.csv"))?;
    for (generation, genome) in &outcome.history {
        genome
            .clone()
            .into_document()
            .write(&dir.join(format!("champion_g{generation:04}.json")))?;
    }
    let doc = outcome.champion.clone().into_document();
    doc.write(&dir.join("champion.json"))?;
    write(&dir.join("champion.dot"), &export_dot(&doc))
}

fn run_all<G: Evolvable>(
    config: &ExperimentConfig,
    data: &PreparedData,
    out: &Path,
    log: &mut dyn FnMut(&str),
) -> Result<Vec<RunRecord>> {
    let mut records = Vec::with_capacity(config.repeats);
    for run in 0..config.repeats {
        let seed = config.evolution.seed.wrapping_add(run as u64);
        let outcome = evolve::<G>(config, data, seed)?;
        let directory = PathBuf::from(format!("run_{run:02}"));
        write_run(&out.join(&directory), &outcome)?;
        let record = RunRecord {
            run,
            seed,
            network: G::KIND,
            mode: config.mode,
            test_accuracy: outcome.test_accuracy,
            champion_generation: outcome.champion_generation,
            directory: directory.clone(),
        };
        write(
            &out.join(&directory).join("run.json"),
            &(serde_json::to_string_pretty(&record)? + "\n"),
        )?;
        log(&format!(
            "run {run}: test accuracy {:.4} (champion from generation {})",
            outcome.test_accuracy, outcome.champion_generation
        ));
        records.push(record);
    }
    Ok(records)
}

/// Runs `config.repeats` seeded runs and writes every artefact under `out`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out: &Path,
    log: &mut dyn FnMut(&str),
) -> Result<RunManifest> {
    config.validate()?;
    let started_unix = unix_now();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write(&out.join("config.toml"), &config.to_toml()?)?;

    let (split, report) = load_data(config)?;
    if let Some(report) = &report {
        write(
            &out.join("data_report.json"),
            &(serde_json::to_string_pretty(report)? + "\n"),
        )?;
    }
    log(split.summary().trim_end());
    let data = PreparedData::new(&split)?;

    let runs = match config.network {
        GenomeKind::Echo => run_all::<EchoGenome>(config, &data, out, log)?,
        GenomeKind::Rnn => run_all::<RnnGenome>(config, &data, out, log)?,
    };
    let accuracies: Vec<f64> = runs.iter().map(|r| r.test_accuracy).collect();
    let summary = Summary::of(config.network, &accuracies)?;
    write(&out.join("summary.txt"), &summary_table(&[summary]))?;
    let manifest = RunManifest {
        config: config.clone(),
        seed: config.evolution.seed,
        started_unix,
        finished_unix: unix_now(),
        runs,
        summary,
    };
    write(
        &out.join("run_manifest.json"),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    Ok(manifest)
}

fn collect_runs(dir: &Path, found: &mut Vec<(GenomeKind, f64)>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_runs(&path, found)?;
        }
    }
    let record = dir.join("run.json");
    let metrics = dir.join("metrics.csv");
    if record.is_file() && metrics.is_file() {
        let text = std::fs::read_to_string(&record).map_err(|e| Error::io(&record, e))?;
        let record: RunRecord = serde_json::from_str(&text)?;
        if let Some(acc) = RunMetrics::read_test_accuracy(&metrics)? {
            found.push((record.network, acc));
        }
    }
    Ok(())
}

/// Test-accuracy statistics per network type over every completed run
/// below `dir`.
pub fn summarize_runs(dir: &Path) -> Result<Vec<Summary>> {
    let mut found = Vec::new();
    collect_runs(dir, &mut found)?;
    let mut rows = Vec::new();
    for kind in [GenomeKind::Echo, GenomeKind::Rnn] {
        let acc: Vec<f64> = found
            .iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, a)| *a)
            .collect();
        if !acc.is_empty() {
            rows.push(Summary::of(kind, &acc)?);
        }
    }
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "no completed runs under {}",
            dir.display()
        )));
    }
    Ok(rows)
}

pub fn summarize(dir: &Path) -> Result<String> {
    Ok(summary_table(&summarize_runs(dir)?))
}

/// DOT text for a genome file.
pub fn export_dot_file(path: &Path) -> Result<String> {
    Ok(export_dot(&GenomeDocument::read(path)?))
}
