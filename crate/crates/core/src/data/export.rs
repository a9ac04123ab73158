//! Ingestion of a flat PTB-XL export: one metadata table plus one
//! single-channel waveform file per recording.
//!
//! Metadata table (`metadata.csv`, UTF-8, comma-delimited, header row):
//!
//! ```text
//! id,fold,validated_by_human,normal_confidence,label[,set_aside]
//! 00001,3,1,100,NORM
//! 00002,9,1,0,MI
//! ```
//!
//! `label` is `NORM`/`normal` for normal recordings; every other label is
//! pooled into the atypical class. The optional `set_aside` column (0/1)
//! pins the set-aside recordings; without it they are drawn at random from
//! the training folds. Waveforms live next to the table as `<id>.f32`
//! (little-endian 32-bit floats) or `<id>.txt` (whitespace or comma
//! separated decimals).

use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetSplit, Label, Recording};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformFormat {
    #[default]
    F32,
    Text,
}

impl WaveformFormat {
    fn extension(self) -> &'static str {
        match self {
            WaveformFormat::F32 => "f32",
            WaveformFormat::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadOptions {
    pub metadata_file: String,
    pub waveform_format: WaveformFormat,
    /// Training recordings removed at random before any exclusion, unless
    /// the table carries a `set_aside` column.
    pub set_aside_count: usize,
    /// Normal recordings annotated with a lower confidence are excluded.
    pub min_normal_confidence: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            metadata_file: "metadata.csv".into(),
            waveform_format: WaveformFormat::F32,
            set_aside_count: 2174,
            min_normal_confidence: 50.0,
        }
    }
}

/// Recording counts after each filtering stage for one split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub input: usize,
    pub excluded_unvalidated: usize,
    pub excluded_low_confidence: usize,
    pub final_unbalanced: usize,
    pub normal: usize,
    pub atypical: usize,
    /// `None` for the training split, which is not balanced.
    pub balanced: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub set_aside: usize,
    pub train: SplitCounts,
    pub validation: SplitCounts,
    pub test: SplitCounts,
}

#[derive(Debug, Deserialize)]
struct MetadataRow {
    id: String,
    fold: u8,
    validated_by_human: u8,
    normal_confidence: f64,
    label: String,
    #[serde(default)]
    set_aside: Option<u8>,
}

#[derive(Debug, Clone)]
struct Entry {
    id: String,
    fold: u8,
    human_validated: bool,
    normal_confidence: f64,
    label: Label,
}

fn parse_label(raw: &str) -> Option<Label> {
    let raw = raw.trim();
    if raw.is_empty() {
        None
    } else if raw.eq_ignore_ascii_case("norm") || raw.eq_ignore_ascii_case("normal") {
        Some(Label::Normal)
    } else {
        Some(Label::Atypical)
    }
}

fn read_metadata(path: &Path) -> Result<Vec<(Entry, Option<bool>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Data(format!("{}: {other:?}", path.display())),
        })?;
    let mut entries = Vec::new();
    for (i, row) in reader.deserialize::<MetadataRow>().enumerate() {
        let row_number = i + 2;
        let row = row.map_err(|e| Error::MalformedRow {
            row: row_number,
            reason: e.to_string(),
        })?;
        let malformed = |reason: String| Error::MalformedRow {
            row: row_number,
            reason,
        };
        if !(1..=10).contains(&row.fold) {
            return Err(malformed(format!("fold {} outside 1..=10", row.fold)));
        }
        if row.validated_by_human > 1 {
            return Err(malformed("validated_by_human must be 0 or 1".into()));
        }
        if !(0.0..=100.0).contains(&row.normal_confidence) {
            return Err(malformed(format!(
                "normal_confidence {} outside [0, 100]",
                row.normal_confidence
            )));
        }
        let label = parse_label(&row.label).ok_or_else(|| malformed("empty label".into()))?;
        let set_aside = match row.set_aside {
            None => None,
            Some(0) => Some(false),
            Some(1) => Some(true),
            Some(v) => return Err(malformed(format!("set_aside must be 0 or 1, got {v}"))),
        };
        entries.push((
            Entry {
                id: row.id,
                fold: row.fold,
                human_validated: row.validated_by_human == 1,
                normal_confidence: row.normal_confidence,
                label,
            },
            set_aside,
        ));
    }
    Ok(entries)
}

fn read_waveform(path: &Path, format: WaveformFormat) -> Result<Vec<f64>> {
    let samples: Vec<f64> = match format {
        WaveformFormat::F32 => {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            if bytes.len() % 4 != 0 {
                return Err(Error::Data(format!(
                    "{}: length {} is not a multiple of 4",
                    path.display(),
                    bytes.len()
                )));
            }
            bytes
                .chunks_exact(4)
                .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
                .collect()
        }
        WaveformFormat::Text => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| Error::Data(format!("{}: {t:?}: {e}", path.display())))
                })
                .collect::<Result<_>>()?
        }
    };
    if samples.is_empty() {
        return Err(Error::Data(format!("{}: empty waveform", path.display())));
    }
    Ok(samples)
}

/// Keeps a uniformly random subset of the majority class so both classes
/// have the minority's count; table order is preserved.
fn balance<R: Rng + ?Sized>(entries: Vec<Entry>, rng: &mut R) -> Vec<Entry> {
    let normal: Vec<usize> = (0..entries.len())
        .filter(|&i| entries[i].label == Label::Normal)
        .collect();
    let atypical: Vec<usize> = (0..entries.len())
        .filter(|&i| entries[i].label == Label::Atypical)
        .collect();
    let (minority, majority) = if normal.len() <= atypical.len() {
        (normal, atypical)
    } else {
        (atypical, normal)
    };
    let mut keep = vec![false; entries.len()];
    for &i in &minority {
        keep[i] = true;
    }
    for k in index::sample(rng, majority.len(), minority.len()) {
        keep[majority[k]] = true;
    }
    entries
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

struct Stage {
    counts: SplitCounts,
    entries: Vec<Entry>,
}

fn exclude(entries: Vec<Entry>, drop_unvalidated: bool, min_confidence: f64) -> Stage {
    let mut counts = SplitCounts {
        input: entries.len(),
        ..SplitCounts::default()
    };
    let entries: Vec<Entry> = entries
        .into_iter()
        .filter(|e| {
            if drop_unvalidated && !e.human_validated {
                counts.excluded_unvalidated += 1;
                false
            } else if e.label == Label::Normal && e.normal_confidence < min_confidence {
                counts.excluded_low_confidence += 1;
                false
            } else {
                true
            }
        })
        .collect();
    counts.final_unbalanced = entries.len();
    counts.normal = entries.iter().filter(|e| e.label == Label::Normal).count();
    counts.atypical = counts.final_unbalanced - counts.normal;
    Stage { counts, entries }
}

/// Reads an export directory and produces the train/validation/test split.
///
/// Stages, in order: fold assignment (1 to 8 train, 9 validation, 10 test),
/// set-aside removal from train, exclusion of recordings without human
/// validation (train only), exclusion of normal recordings annotated below
/// the confidence floor, and class balancing of validation and test.
pub fn load_and_filter<R: Rng + ?Sized>(
    dir: &Path,
    options: &LoadOptions,
    rng: &mut R,
) -> Result<(DatasetSplit, FilterReport)> {
    let table = dir.join(&options.metadata_file);
    if !table.is_file() {
        return Err(Error::Data(format!(
            "missing metadata table {}",
            table.display()
        )));
    }
    let rows = read_metadata(&table)?;
    let pinned = rows.iter().any(|(_, flag)| flag.is_some());

    let mut train = Vec::new();
    let mut validation = Vec::new();
    let mut test = Vec::new();
    let mut set_aside = Vec::new();
    for (entry, flag) in rows {
        if flag == Some(true) {
            set_aside.push(entry);
            continue;
        }
        match entry.fold {
            9 => validation.push(entry),
            10 => test.push(entry),
            _ => train.push(entry),
        }
    }
    if !pinned {
        if options.set_aside_count > train.len() {
            return Err(Error::Data(format!(
                "cannot set aside {} of {} training recordings",
                options.set_aside_count,
                train.len()
            )));
        }
        let mut chosen = vec![false; train.len()];
        for i in index::sample(rng, train.len(), options.set_aside_count) {
            chosen[i] = true;
        }
        let (aside, kept): (Vec<_>, Vec<_>) = train.into_iter().zip(chosen).partition(|(_, c)| *c);
        set_aside = aside.into_iter().map(|(e, _)| e).collect();
        train = kept.into_iter().map(|(e, _)| e).collect();
    }

    let train = exclude(train, true, options.min_normal_confidence);
    let mut validation = exclude(validation, false, options.min_normal_confidence);
    let mut test = exclude(test, false, options.min_normal_confidence);
    validation.entries = balance(validation.entries, rng);
    validation.counts.balanced = Some(validation.entries.len());
    test.entries = balance(test.entries, rng);
    test.counts.balanced = Some(test.entries.len());

    let report = FilterReport {
        set_aside: set_aside.len(),
        train: train.counts,
        validation: validation.counts,
        test: test.counts,
    };
    let load = |entries: Vec<Entry>| -> Result<Vec<Recording>> {
        entries
            .into_par_iter()
            .map(|e| {
                let path: PathBuf =
                    dir.join(format!("{}.{}", e.id, options.waveform_format.extension()));
                Ok(Recording {
                    samples: read_waveform(&path, options.waveform_format)?,
                    id: e.id,
                    label: e.label,
                    strat_fold: e.fold,
                    human_validated: e.human_validated,
                    normal_confidence: e.normal_confidence,
                })
            })
            .collect()
    };
    let split = DatasetSplit {
        train: load(train.entries)?,
        validation: load(validation.entries)?,
        test: load(test.entries)?,
        set_aside: load(set_aside)?,
    };
    Ok((split, report))
}
