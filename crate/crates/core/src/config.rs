//! Run configuration.
//!
//! The file format is line oriented `key = value` with dotted section
//! prefixes, `#` comments and blank lines:
//!
//! ```text
//! seed = 7
//! topology.n_exc = 100
//! lif.v_thresh = 20
//! numeric.mode = fixed
//! ```
//!
//! Unknown and repeated keys are errors. Every key has a default, so an empty
//! file is a valid configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::dynamics::{LifParams, TraceParams};
use crate::encoding::{derive_seed, EncodingPlan};
use crate::error::{Error, Result};
use crate::numerics::{NumericMode, QFormat};
use crate::plasticity::StdpParams;
use crate::topology::{NetworkParams, TopologyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Ecg,
}

impl DatasetKind {
    fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Ecg => "ecg",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataConfig {
    pub kind: DatasetKind,
    /// MNIST: directory of IDX files. ECG: training CSV.
    pub train: PathBuf,
    /// MNIST: directory of IDX files. ECG: test CSV.
    pub test: PathBuf,
    /// Training samples to stream (0 = all available).
    pub train_samples: usize,
    /// Held-out tail of the training set used for label assignment.
    pub label_samples: usize,
    /// Test samples to evaluate (0 = all available).
    pub test_samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Samples whose weight changes are accumulated before being applied.
    /// 1 applies every update immediately.
    pub batch_size: usize,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub mode: NumericMode,
    pub state_format: QFormat,
    pub weight_format: QFormat,
    pub network: NetworkParams,
    pub max_rate: f64,
    pub timesteps: u32,
    pub train: TrainConfig,
    pub data: DataConfig,
    pub input_fifo: usize,
    pub output_fifo: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            mode: NumericMode::Float,
            state_format: QFormat::Q8_8,
            weight_format: QFormat::Q2_14,
            network: NetworkParams {
                topology: TopologyParams {
                    n_input: 784,
                    n_exc: 100,
                    w_inh: 9.0,
                },
                lif: LifParams {
                    v_rest: 0.0,
                    v_thresh: 60.0,
                    tau_v: 100.0,
                    dt: 1.0,
                    v_floor: None,
                },
                trace: TraceParams {
                    tau_x: 10.0,
                    alpha: 8.0,
                    x_max: 80.0,
                },
                stdp: StdpParams {
                    alpha_pre: 0.00125,
                    alpha_post: 0.00125,
                    w_min: 0.0,
                    w_max: 1.0,
                },
            },
            max_rate: 0.25,
            timesteps: 100,
            train: TrainConfig {
                batch_size: 1,
                epochs: 1,
            },
            data: DataConfig {
                kind: DatasetKind::Mnist,
                train: PathBuf::from("data/mnist"),
                test: PathBuf::from("data/mnist"),
                train_samples: 10_000,
                label_samples: 1_000,
                test_samples: 2_000,
            },
            input_fifo: crate::engine::DEFAULT_FIFO_CAPACITY,
            output_fifo: crate::engine::DEFAULT_FIFO_CAPACITY,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_qformat(key: &str, value: &str) -> Result<QFormat> {
    let bad = || {
        Error::Config(format!(
            "`{key}`: expected a Q-format like Q8.8, got `{value}`"
        ))
    };
    let body = value
        .strip_prefix('Q')
        .or_else(|| value.strip_prefix('q'))
        .ok_or_else(bad)?;
    let (i, f) = body.split_once('.').ok_or_else(bad)?;
    QFormat::new(i.parse().map_err(|_| bad())?, f.parse().map_err(|_| bad())?)
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

impl RunConfig {
    /// Every key in canonical order.
    pub const KEYS: &'static [&'static str] = &[
        "data.kind",
        "data.label_samples",
        "data.test",
        "data.test_samples",
        "data.train",
        "data.train_samples",
        "encoder.max_rate",
        "encoder.timesteps",
        "engine.input_fifo",
        "engine.output_fifo",
        "lif.dt",
        "lif.tau_v",
        "lif.v_floor",
        "lif.v_rest",
        "lif.v_thresh",
        "numeric.mode",
        "numeric.state_format",
        "numeric.weight_format",
        "seed",
        "stdp.alpha_post",
        "stdp.alpha_pre",
        "stdp.w_max",
        "stdp.w_min",
        "topology.n_exc",
        "topology.n_input",
        "topology.w_inh",
        "trace.alpha",
        "trace.tau_x",
        "trace.x_max",
        "train.batch_size",
        "train.epochs",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let n = &mut self.network;
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "numeric.mode" => self.mode = value.parse()?,
            "numeric.state_format" => self.state_format = parse_qformat(key, value)?,
            "numeric.weight_format" => self.weight_format = parse_qformat(key, value)?,
            "topology.n_input" => n.topology.n_input = parse_num(key, value)?,
            "topology.n_exc" => n.topology.n_exc = parse_num(key, value)?,
            "topology.w_inh" => n.topology.w_inh = parse_num(key, value)?,
            "lif.v_rest" => n.lif.v_rest = parse_num(key, value)?,
            "lif.v_thresh" => n.lif.v_thresh = parse_num(key, value)?,
            "lif.tau_v" => n.lif.tau_v = parse_num(key, value)?,
            "lif.dt" => n.lif.dt = parse_num(key, value)?,
            "lif.v_floor" => {
                n.lif.v_floor = match value {
                    "auto" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "trace.tau_x" => n.trace.tau_x = parse_num(key, value)?,
            "trace.alpha" => n.trace.alpha = parse_num(key, value)?,
            "trace.x_max" => n.trace.x_max = parse_num(key, value)?,
            "stdp.alpha_pre" => n.stdp.alpha_pre = parse_num(key, value)?,
            "stdp.alpha_post" => n.stdp.alpha_post = parse_num(key, value)?,
            "stdp.w_min" => n.stdp.w_min = parse_num(key, value)?,
            "stdp.w_max" => n.stdp.w_max = parse_num(key, value)?,
            "encoder.max_rate" => self.max_rate = parse_num(key, value)?,
            "encoder.timesteps" => self.timesteps = parse_num(key, value)?,
            "train.batch_size" => self.train.batch_size = parse_num(key, value)?,
            "train.epochs" => self.train.epochs = parse_num(key, value)?,
            "data.kind" => {
                self.data.kind = match value {
                    "mnist" => DatasetKind::Mnist,
                    "ecg" => DatasetKind::Ecg,
                    other => {
                        return Err(Error::Config(format!(
                            "`data.kind`: expected mnist or ecg, got `{other}`"
                        )))
                    }
                }
            }
            "data.train" => self.data.train = PathBuf::from(value),
            "data.test" => self.data.test = PathBuf::from(value),
            "data.train_samples" => self.data.train_samples = parse_num(key, value)?,
            "data.label_samples" => self.data.label_samples = parse_num(key, value)?,
            "data.test_samples" => self.data.test_samples = parse_num(key, value)?,
            "engine.input_fifo" => self.input_fifo = parse_num(key, value)?,
            "engine.output_fifo" => self.output_fifo = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let n = &self.network;
        Some(match key {
            "seed" => self.seed.to_string(),
            "numeric.mode" => self.mode.to_string(),
            "numeric.state_format" => self.state_format.to_string(),
            "numeric.weight_format" => self.weight_format.to_string(),
            "topology.n_input" => n.topology.n_input.to_string(),
            "topology.n_exc" => n.topology.n_exc.to_string(),
            "topology.w_inh" => fmt_f64(n.topology.w_inh),
            "lif.v_rest" => fmt_f64(n.lif.v_rest),
            "lif.v_thresh" => fmt_f64(n.lif.v_thresh),
            "lif.tau_v" => fmt_f64(n.lif.tau_v),
            "lif.dt" => fmt_f64(n.lif.dt),
            "lif.v_floor" => n.lif.v_floor.map_or_else(|| "auto".to_string(), fmt_f64),
            "trace.tau_x" => fmt_f64(n.trace.tau_x),
            "trace.alpha" => fmt_f64(n.trace.alpha),
            "trace.x_max" => fmt_f64(n.trace.x_max),
            "stdp.alpha_pre" => fmt_f64(n.stdp.alpha_pre),
            "stdp.alpha_post" => fmt_f64(n.stdp.alpha_post),
            "stdp.w_min" => fmt_f64(n.stdp.w_min),
            "stdp.w_max" => fmt_f64(n.stdp.w_max),
            "encoder.max_rate" => fmt_f64(self.max_rate),
            "encoder.timesteps" => self.timesteps.to_string(),
            "train.batch_size" => self.train.batch_size.to_string(),
            "train.epochs" => self.train.epochs.to_string(),
            "data.kind" => self.data.kind.as_str().to_string(),
            "data.train" => self.data.train.display().to_string(),
            "data.test" => self.data.test.display().to_string(),
            "data.train_samples" => self.data.train_samples.to_string(),
            "data.label_samples" => self.data.label_samples.to_string(),
            "data.test_samples" => self.data.test_samples.to_string(),
            "engine.input_fifo" => self.input_fifo.to_string(),
            "engine.output_fifo" => self.output_fifo.to_string(),
            _ => return None,
        })
    }

    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    n + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` repeated",
                    n + 1
                )));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    /// All keys in canonical order, one `key = value` per line.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for key in Self::KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("canonical key"));
        }
        out
    }

    /// Digest of the canonical form with the seed excluded; artifacts carry
    /// the seed separately.
    pub fn hash(&self) -> u64 {
        let mut hasher = Sha256::new();
        for key in Self::KEYS.iter().filter(|&&k| k != "seed") {
            hasher.update(key.as_bytes());
            hasher.update(b"=");
            hasher.update(self.get(key).expect("canonical key").as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash())
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.encoding_plan().validate()?;
        if self.train.batch_size == 0 {
            return Err(Error::Config("train.batch_size must be >= 1".into()));
        }
        if self.data.label_samples == 0 {
            return Err(Error::Config("data.label_samples must be >= 1".into()));
        }
        if self.input_fifo == 0 || self.output_fifo == 0 {
            return Err(Error::Config("engine FIFO capacities must be >= 1".into()));
        }
        Ok(())
    }

    /// Seed for weight initialisation.
    pub fn init_seed(&self) -> u64 {
        derive_seed(self.seed, 1)
    }

    /// Root seed of all encoder streams.
    pub fn encoder_seed(&self) -> u64 {
        derive_seed(self.seed, 2)
    }

    pub fn encoding_plan(&self) -> EncodingPlan {
        EncodingPlan {
            timesteps: self.timesteps,
            max_rate: self.max_rate,
            seed: self.encoder_seed(),
        }
    }
}
