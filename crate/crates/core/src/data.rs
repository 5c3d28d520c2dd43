//! Seeded 2-D binary classification datasets.
//!
//! | name     | class 0                                   | class 1                                    |
//! |----------|-------------------------------------------|--------------------------------------------|
//! | gaussian | clusters at (1,1), (−1,−1), σ = 0.5       | clusters at (1,−1), (−1,1), σ = 0.5        |
//! | moon     | upper arc (cos t, sin t)                  | lower arc (1 − cos t, 0.5 − sin t)         |
//! | rings    | circle of radius 1.0                      | circle of radius 0.5                       |
//!
//! Moon points carry isotropic Gaussian noise with σ = 0.1, ring points σ = 0.08.
//! Each class gets 250 points, shuffled, split 150 train / 100 test.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::binn::LabeledPoint;
use crate::{seed, Error, Result};

pub const TRAIN_PER_CLASS: usize = 150;
pub const TEST_PER_CLASS: usize = 100;

pub const GAUSSIAN_STD: f64 = 0.5;
pub const MOON_NOISE: f64 = 0.1;
pub const MOON_OFFSET: f64 = 0.5;
pub const RING_RADII: [f64; 2] = [1.0, 0.5];
pub const RING_NOISE: f64 = 0.08;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Gaussian,
    Moon,
    Rings,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] =
        [DatasetKind::Gaussian, DatasetKind::Moon, DatasetKind::Rings];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Gaussian => "gaussian",
            DatasetKind::Moon => "moon",
            DatasetKind::Rings => "rings",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(DatasetKind::Gaussian),
            "moon" => Ok(DatasetKind::Moon),
            "rings" => Ok(DatasetKind::Rings),
            other => Err(Error::UnknownDataset(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: DatasetKind,
    pub train: Vec<LabeledPoint>,
    pub test: Vec<LabeledPoint>,
}

/// Draws one point of class `label`; `i` alternates between the two
/// Gaussian clusters of a class.
fn draw_point<R: Rng>(kind: DatasetKind, label: u8, i: usize, rng: &mut R) -> [f64; 2] {
    match kind {
        DatasetKind::Gaussian => {
            let noise = Normal::new(0.0, GAUSSIAN_STD).expect("positive std");
            let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            let center = if label == 0 {
                [sign, sign]
            } else {
                [sign, -sign]
            };
            [center[0] + noise.sample(rng), center[1] + noise.sample(rng)]
        }
        DatasetKind::Moon => {
            let noise = Normal::new(0.0, MOON_NOISE).expect("positive std");
            let t = rng.random::<f64>() * std::f64::consts::PI;
            let (s, c) = t.sin_cos();
            let clean = if label == 0 {
                [c, s]
            } else {
                [1.0 - c, 1.0 - s - MOON_OFFSET]
            };
            [clean[0] + noise.sample(rng), clean[1] + noise.sample(rng)]
        }
        DatasetKind::Rings => {
            let noise = Normal::new(0.0, RING_NOISE).expect("positive std");
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            let r = RING_RADII[label as usize];
            let (s, c) = t.sin_cos();
            [r * c + noise.sample(rng), r * s + noise.sample(rng)]
        }
    }
}

/// Draws `n` points of class `label` from the generator behind `kind`.
pub fn draw_class(kind: DatasetKind, label: u8, n: usize, rng_seed: u64) -> Vec<LabeledPoint> {
    let mut rng = seed::rng(rng_seed);
    (0..n)
        .map(|i| LabeledPoint::new(draw_point(kind, label, i, &mut rng), label))
        .collect()
}

/// Balanced dataset with 150 train and 100 test points per class.
pub fn generate(kind: DatasetKind, rng_seed: u64) -> Dataset {
    let mut rng = seed::rng(rng_seed);
    let mut train = Vec::with_capacity(2 * TRAIN_PER_CLASS);
    let mut test = Vec::with_capacity(2 * TEST_PER_CLASS);
    for label in 0..2u8 {
        let mut points: Vec<LabeledPoint> = (0..TRAIN_PER_CLASS + TEST_PER_CLASS)
            .map(|i| LabeledPoint::new(draw_point(kind, label, i, &mut rng), label))
            .collect();
        points.shuffle(&mut rng);
        test.extend_from_slice(&points[TRAIN_PER_CLASS..]);
        points.truncate(TRAIN_PER_CLASS);
        train.extend(points);
    }
    Dataset {
        name: kind,
        train,
        test,
    }
}

/// Parses the name then generates; unknown names are an error.
pub fn generate_named(name: &str, rng_seed: u64) -> Result<Dataset> {
    Ok(generate(name.parse()?, rng_seed))
}

pub const CSV_HEADER: [&str; 4] = ["x1", "x2", "y", "split"];

/// Writes `x1,x2,y,split` rows, train first. Coordinates carry 17
/// significant digits so they read back bit-for-bit.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let rows = dataset
        .train
        .iter()
        .map(|p| (p, "train"))
        .chain(dataset.test.iter().map(|p| (p, "test")));
    for (p, split) in rows {
        w.write_record([
            format!("{:.16e}", p.x[0]),
            format!("{:.16e}", p.x[1]),
            p.y.to_string(),
            split.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(dataset, BufWriter::new(File::create(path)?))
}

/// Reads the format written by [`write_csv`]. The dataset name is not part
/// of the file and must be supplied.
pub fn read_csv<R: Read>(name: DatasetKind, reader: R) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut saw_header = false;
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if !saw_header {
            if record.iter().ne(CSV_HEADER) {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header {}", CSV_HEADER.join(",")),
                });
            }
            saw_header = true;
            continue;
        }
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let coord = |i: usize| -> Result<f64> {
            let v: f64 = record[i].trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("{} = {:?} is not a number", CSV_HEADER[i], &record[i]),
            })?;
            if !v.is_finite() {
                return Err(Error::Validation {
                    line,
                    message: format!("{} is not finite", CSV_HEADER[i]),
                });
            }
            Ok(v)
        };
        let x = [coord(0)?, coord(1)?];
        let y = match record[2].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Validation {
                    line,
                    message: format!("label {other:?} is not 0 or 1"),
                })
            }
        };
        match record[3].trim() {
            "train" => train.push(LabeledPoint::new(x, y)),
            "test" => test.push(LabeledPoint::new(x, y)),
            other => {
                return Err(Error::Validation {
                    line,
                    message: format!("split {other:?} is not train or test"),
                })
            }
        }
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            message: "empty file".into(),
        });
    }
    Ok(Dataset { name, train, test })
}

pub fn load_csv(name: DatasetKind, path: impl AsRef<Path>) -> Result<Dataset> {
    read_csv(name, BufReader::new(File::open(path)?))
}
