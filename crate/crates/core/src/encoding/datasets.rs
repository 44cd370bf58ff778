//! MNIST (IDX) and pre-extracted ECG beat loaders.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use super::Sample;
use crate::error::{Error, Result};

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Samples per ECG beat window.
pub const ECG_WIDTH: usize = 251;
/// Number of beat classes.
pub const ECG_CLASSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MnistSplit {
    Train,
    Test,
}

impl MnistSplit {
    fn file_names(self) -> (&'static str, &'static str) {
        match self {
            MnistSplit::Train => ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
            MnistSplit::Test => ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
        }
    }
}

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads one MNIST split from a directory holding the standard file names.
pub fn load_mnist(dir: &Path, split: MnistSplit, limit: Option<usize>) -> Result<Vec<Sample>> {
    let (images, labels) = split.file_names();
    load_mnist_files(&dir.join(images), &dir.join(labels), limit)
}

/// Paths of the image and label files of a split.
pub fn mnist_paths(dir: &Path, split: MnistSplit) -> (PathBuf, PathBuf) {
    let (images, labels) = split.file_names();
    (dir.join(images), dir.join(labels))
}

/// Loads an IDX image/label pair, flattening each image row-major and
/// scaling pixels by `1/255`. `limit` keeps only the first samples.
pub fn load_mnist_files(images: &Path, labels: &Path, limit: Option<usize>) -> Result<Vec<Sample>> {
    load_mnist_range(images, labels, 0, limit)
}

/// Loads samples `start..start + count` (to the end when `count` is `None`).
pub fn load_mnist_range(
    images: &Path,
    labels: &Path,
    start: usize,
    count: Option<usize>,
) -> Result<Vec<Sample>> {
    let img = read(images)?;
    let lab = read(labels)?;
    if img.len() < 16 {
        return Err(Error::dataset(images, "truncated IDX header"));
    }
    if be_u32(&img, 0) != IDX_IMAGES_MAGIC {
        return Err(Error::dataset(
            images,
            format!(
                "bad magic {:#010x}, expected {IDX_IMAGES_MAGIC:#010x}",
                be_u32(&img, 0)
            ),
        ));
    }
    if lab.len() < 8 {
        return Err(Error::dataset(labels, "truncated IDX header"));
    }
    if be_u32(&lab, 0) != IDX_LABELS_MAGIC {
        return Err(Error::dataset(
            labels,
            format!(
                "bad magic {:#010x}, expected {IDX_LABELS_MAGIC:#010x}",
                be_u32(&lab, 0)
            ),
        ));
    }
    let total = be_u32(&img, 4) as usize;
    let rows = be_u32(&img, 8) as usize;
    let cols = be_u32(&img, 12) as usize;
    let label_count = be_u32(&lab, 4) as usize;
    if total != label_count {
        return Err(Error::dataset(
            images,
            format!("{total} images but {label_count} labels"),
        ));
    }
    let pixels = rows * cols;
    if img.len() != 16 + total * pixels {
        return Err(Error::dataset(
            images,
            format!(
                "expected {} bytes, found {}",
                16 + total * pixels,
                img.len()
            ),
        ));
    }
    if lab.len() != 8 + total {
        return Err(Error::dataset(
            labels,
            format!("expected {} bytes, found {}", 8 + total, lab.len()),
        ));
    }
    let start = start.min(total);
    let end = count.map_or(total, |c| start.saturating_add(c).min(total));
    (start..end)
        .map(|k| {
            let label = lab[8 + k];
            if label > 9 {
                return Err(Error::dataset(
                    labels,
                    format!("label {label} at {k} is not a digit"),
                ));
            }
            let start = 16 + k * pixels;
            let features = img[start..start + pixels]
                .iter()
                .map(|&p| f64::from(p) / 255.0)
                .collect();
            Ok(Sample {
                features,
                label: usize::from(label),
            })
        })
        .collect()
}

/// Reads the IDX header of an image file and returns the sample count.
pub fn mnist_count(images: &Path) -> Result<usize> {
    let mut img = [0u8; 16];
    fs::File::open(images)
        .and_then(|mut f| f.read_exact(&mut img))
        .map_err(|e| Error::io(images, e))?;
    if be_u32(&img, 0) != IDX_IMAGES_MAGIC {
        return Err(Error::dataset(images, "not an IDX image file"));
    }
    Ok(be_u32(&img, 4) as usize)
}

/// Min-max scales a beat into `[0, 1]`; a flat beat maps to zeros.
pub fn normalize_beat(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|&a| (a - lo) / range).collect()
}

/// Loads beats from CSV text: 251 amplitudes then a class id in `0..4` per
/// line, no header. Each beat is min-max normalised on its own.
pub fn load_ecg_beats(path: &Path) -> Result<Vec<Sample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ecg_beats(&text, path)
}

pub fn parse_ecg_beats(text: &str, origin: &Path) -> Result<Vec<Sample>> {
    let origin: PathBuf = origin.to_path_buf();
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != ECG_WIDTH + 1 {
            return Err(Error::dataset(
                &origin,
                format!(
                    "line {}: {} columns, expected {}",
                    n + 1,
                    cols.len(),
                    ECG_WIDTH + 1
                ),
            ));
        }
        let raw = cols[..ECG_WIDTH]
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        Error::dataset(&origin, format!("line {}: bad amplitude `{c}`", n + 1))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        let label: usize = cols[ECG_WIDTH].parse().map_err(|_| {
            Error::dataset(
                &origin,
                format!("line {}: bad class `{}`", n + 1, cols[ECG_WIDTH]),
            )
        })?;
        if label >= ECG_CLASSES {
            return Err(Error::dataset(
                &origin,
                format!("line {}: unknown class id {label}", n + 1),
            ));
        }
        out.push(Sample {
            features: normalize_beat(&raw),
            label,
        });
    }
    Ok(out)
}

/// Distinct labels present in a sample set.
pub fn class_set(samples: &[Sample]) -> BTreeSet<usize> {
    samples.iter().map(|s| s.label).collect()
}
