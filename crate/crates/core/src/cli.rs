//! Batch commands behind the `aern` binary.
//!
//! Every command writes into `--out` and stamps its artifacts with the
//! config hash and seed: the checkpoint header carries both, JSON records
//! carry them as fields, CSV files start with a `# config_hash=... seed=...`
//! line, and trace files get a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::encoding::{poisson_encode, shift_packets, Stream};
use crate::engine::aer::{read_trace, write_trace, write_trace_text};
use crate::engine::{write_activation_log, AerPacket, Engine, EngineOptions, RunStats};
use crate::error::{Error, Result};
use crate::evaluator::{
    assign_labels, engine_options, evaluate, sweep, train, Datasets, Metrics, NeuronLabels,
    SweepParam, TrainStats,
};
use crate::numerics::{Arithmetic, FixedArith, FloatArith, NumericMode};
use crate::topology::{
    build_network, encode_checkpoint, load_checkpoint, peek_checkpoint, weight_digest,
};

pub const CHECKPOINT_FILE: &str = "checkpoint.aern";
pub const LABELS_FILE: &str = "labels.csv";
pub const METRICS_FILE: &str = "metrics.jsonl";
pub const METRICS_CSV: &str = "metrics.csv";

#[derive(Debug, Parser)]
#[command(
    name = "aern",
    version,
    about = "Event-driven spiking network processor model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on the configured dataset, label neurons and evaluate.
    Train(Common),
    /// Label and evaluate a checkpoint with frozen weights.
    Eval(Common),
    /// Train and evaluate once per value of one hyperparameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of n_exc, batch_size, v_thresh, timesteps.
        #[arg(long)]
        param: String,
        /// Comma separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Encode dataset samples into an AER trace on one timeline.
    Encode {
        #[command(flatten)]
        common: Common,
        /// Which split to encode.
        #[arg(long, default_value = "test")]
        split: SplitArg,
        /// Number of samples (0 = all).
        #[arg(long, default_value_t = 0)]
        limit: usize,
        /// Also write the `timestamp,neuron_id` text form.
        #[arg(long)]
        text: bool,
    },
    /// Run an AER trace through the engine, one sample per `timesteps` window.
    Run {
        #[command(flatten)]
        common: Common,
        /// Binary AER trace to feed.
        #[arg(long)]
        input: PathBuf,
        /// Also write the handler-activation log.
        #[arg(long)]
        activation_log: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SplitArg {
    Learn,
    Label,
    Test,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Checkpoint to resume from (train, run) or evaluate (eval).
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value = "runs/latest")]
    pub out: PathBuf,
    #[arg(long)]
    pub numeric_mode: Option<NumericMode>,
    /// Keep weights frozen.
    #[arg(long)]
    pub no_learning: bool,
}

impl Common {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.numeric_mode {
            cfg.mode = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Train(c) => cmd_train(c).map(|_| ()),
        Command::Eval(c) => cmd_eval(c).map(|_| ()),
        Command::Sweep {
            common,
            param,
            values,
        } => cmd_sweep(common, &param.parse()?, values).map(|_| ()),
        Command::Encode {
            common,
            split,
            limit,
            text,
        } => cmd_encode(common, *split, *limit, *text).map(|_| ()),
        Command::Run {
            common,
            input,
            activation_log,
        } => cmd_run(common, input, *activation_log).map(|_| ()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub mode: NumericMode,
    pub samples_seen: u64,
    pub weight_digest: String,
    pub accuracy: f64,
    pub total: u64,
    pub confusion: Vec<Vec<u64>>,
    pub per_class_recall: Vec<f64>,
}

/// What `train` and `eval` report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub record: MetricsRecord,
    pub labels: NeuronLabels,
    pub train: TrainStats,
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn stamp(cfg: &RunConfig) -> String {
    format!("# config_hash={} seed={}\n", cfg.hash_hex(), cfg.seed)
}

fn write_metrics(
    out: &Path,
    cfg: &RunConfig,
    record: &MetricsRecord,
    labels: &NeuronLabels,
) -> Result<()> {
    let line = serde_json::to_string(record).map_err(|e| Error::Evaluation(e.to_string()))?;
    write_file(&out.join(METRICS_FILE), format!("{line}\n"))?;
    write_file(
        &out.join(METRICS_CSV),
        format!(
            "{}command,mode,samples_seen,accuracy,total\n{},{},{},{:?},{}\n",
            stamp(cfg),
            record.command,
            record.mode,
            record.samples_seen,
            record.accuracy,
            record.total
        ),
    )?;
    write_file(
        &out.join(LABELS_FILE),
        format!("{}{}", stamp(cfg), labels.to_csv()),
    )?;
    write_file(&out.join("config.txt"), cfg.canonical())
}

fn record<A: Arithmetic>(
    command: &str,
    cfg: &RunConfig,
    engine: &Engine<A>,
    samples_seen: u64,
    m: Metrics,
) -> MetricsRecord {
    MetricsRecord {
        command: command.to_string(),
        config_hash: cfg.hash_hex(),
        seed: cfg.seed,
        mode: cfg.mode,
        samples_seen,
        weight_digest: weight_digest(engine.arith(), engine.store()),
        accuracy: m.accuracy,
        total: m.total,
        confusion: m.confusion,
        per_class_recall: m.per_class_recall,
    }
}

fn arith_dispatch<R>(
    cfg: &RunConfig,
    float: impl FnOnce(FloatArith) -> Result<R>,
    fixed: impl FnOnce(FixedArith) -> Result<R>,
) -> Result<R> {
    match cfg.mode {
        NumericMode::Float => float(FloatArith::with_formats(
            cfg.state_format,
            cfg.weight_format,
        )),
        NumericMode::Fixed => fixed(FixedArith::new(cfg.state_format, cfg.weight_format)),
    }
}

/// Builds (or resumes) the network, streams the training set, labels,
/// evaluates and writes checkpoint, labels and metrics.
pub fn cmd_train(c: &Common) -> Result<Report> {
    let cfg = c.config()?;
    let data = Datasets::load(&cfg)?;
    data.check_width(cfg.network.topology.n_input)?;
    arith_dispatch(
        &cfg,
        |a| train_with(a, c, &cfg, &data),
        |a| train_with(a, c, &cfg, &data),
    )
}

fn open_engine<A: Arithmetic>(arith: A, c: &Common, cfg: &RunConfig) -> Result<(Engine<A>, u64)> {
    let (store, seen) = match &c.checkpoint {
        Some(path) => {
            let (store, meta) = load_checkpoint(path, &arith)?;
            if meta.config_hash != cfg.hash() || meta.seed != cfg.seed {
                log::warn!(
                    "checkpoint was written by config {:016x} seed {}; continuing with {} seed {}",
                    meta.config_hash,
                    meta.seed,
                    cfg.hash_hex(),
                    cfg.seed
                );
            }
            (store, meta.samples_seen)
        }
        None => (build_network(&arith, &cfg.network, cfg.init_seed())?, 0),
    };
    let mut engine = Engine::with_options(arith, &cfg.network, store, engine_options(cfg))?;
    engine.set_learning(!c.no_learning);
    Ok((engine, seen))
}

fn train_with<A: Arithmetic>(
    arith: A,
    c: &Common,
    cfg: &RunConfig,
    data: &Datasets,
) -> Result<Report> {
    let (mut engine, seen) = open_engine(arith, c, cfg)?;
    let plan = cfg.encoding_plan();
    let total = (data.learn.len() * cfg.train.epochs) as u64;
    let (train_stats, seen) = if c.no_learning {
        (TrainStats::default(), seen)
    } else {
        let s = train(
            &mut engine,
            &data.learn,
            &plan,
            cfg.train.batch_size,
            seen.min(total)..total,
        )?;
        (s, seen.max(total))
    };
    let labels = assign_labels(&engine, &data.label, data.n_classes, &plan)?;
    let metrics = evaluate(&engine, &labels, &data.test, &plan)?;
    let rec = record("train", cfg, &engine, seen, metrics);

    create_out(&c.out)?;
    let bytes = encode_checkpoint(engine.arith(), engine.store(), cfg.hash(), cfg.seed, seen);
    write_file(&c.out.join(CHECKPOINT_FILE), bytes)?;
    write_metrics(&c.out, cfg, &rec, &labels)?;
    let stats = serde_json::json!({
        "config_hash": cfg.hash_hex(),
        "seed": cfg.seed,
        "samples": train_stats.samples,
        "input_spikes": train_stats.input_spikes,
        "output_spikes": train_stats.output_spikes,
        "handler_activations": train_stats.handler_activations,
    });
    write_file(&c.out.join("train_stats.json"), format!("{stats}\n"))?;
    log::info!(
        "accuracy {:.4} over {} test samples",
        rec.accuracy,
        rec.total
    );
    Ok(Report {
        record: rec,
        labels,
        train: train_stats,
    })
}

/// Labels and evaluates a checkpoint without changing its weights.
pub fn cmd_eval(c: &Common) -> Result<Report> {
    let cfg = c.config()?;
    let path = c
        .checkpoint
        .as_ref()
        .ok_or_else(|| Error::Config("eval needs --checkpoint".into()))?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (_, n_input, n_exc) = peek_checkpoint(&bytes)?;
    if n_input != cfg.network.topology.n_input || n_exc != cfg.network.topology.n_exc {
        return Err(Error::Checkpoint(format!(
            "checkpoint is {}x{} but config topology is {}x{}",
            n_input, n_exc, cfg.network.topology.n_input, cfg.network.topology.n_exc
        )));
    }
    let data = Datasets::load(&cfg)?;
    data.check_width(cfg.network.topology.n_input)?;
    arith_dispatch(
        &cfg,
        |a| eval_with(a, c, &cfg, &data),
        |a| eval_with(a, c, &cfg, &data),
    )
}

fn eval_with<A: Arithmetic>(
    arith: A,
    c: &Common,
    cfg: &RunConfig,
    data: &Datasets,
) -> Result<Report> {
    let (engine, seen) = open_engine(arith, c, cfg)?;
    let plan = cfg.encoding_plan();
    let labels = assign_labels(&engine, &data.label, data.n_classes, &plan)?;
    let metrics = evaluate(&engine, &labels, &data.test, &plan)?;
    let rec = record("eval", cfg, &engine, seen, metrics);
    create_out(&c.out)?;
    write_metrics(&c.out, cfg, &rec, &labels)?;
    Ok(Report {
        record: rec,
        labels,
        train: TrainStats::default(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub config_hash: String,
    pub seed: u64,
    pub param: SweepParam,
    pub value: f64,
    pub accuracy: f64,
    /// Wall clock; kept out of the JSON record so it stays reproducible.
    #[serde(skip)]
    pub runtime_secs: f64,
    pub confusion: Vec<Vec<u64>>,
}

/// Writes `sweep_<param>.csv` (value, accuracy, runtime) and a JSON line per
/// point to `sweep_<param>.jsonl`.
pub fn cmd_sweep(c: &Common, param: &SweepParam, values: &[f64]) -> Result<Vec<SweepRecord>> {
    let cfg = c.config()?;
    let data = Datasets::load(&cfg)?;
    let points = sweep(&cfg, *param, values, &data)?;
    let records: Vec<SweepRecord> = points
        .into_iter()
        .map(|p| SweepRecord {
            config_hash: cfg.hash_hex(),
            seed: cfg.seed,
            param: *param,
            value: p.value,
            accuracy: p.metrics.accuracy,
            runtime_secs: p.runtime_secs,
            confusion: p.metrics.confusion,
        })
        .collect();
    create_out(&c.out)?;
    let mut csv = format!("{}value,accuracy,runtime_secs\n", stamp(&cfg));
    let mut jsonl = String::new();
    for r in &records {
        csv.push_str(&format!(
            "{:?},{:?},{:.3}\n",
            r.value, r.accuracy, r.runtime_secs
        ));
        jsonl.push_str(&serde_json::to_string(r).map_err(|e| Error::Evaluation(e.to_string()))?);
        jsonl.push('\n');
    }
    let name = param.as_str();
    write_file(&c.out.join(format!("sweep_{name}.csv")), csv)?;
    write_file(&c.out.join(format!("sweep_{name}.jsonl")), jsonl)?;
    write_file(&c.out.join("config.txt"), cfg.canonical())?;
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMeta {
    pub config_hash: String,
    pub seed: u64,
    pub timesteps: u32,
    pub samples: usize,
    pub packets: usize,
    pub labels: Vec<usize>,
}

/// Encodes samples back to back: sample `k`, step `t` lands at
/// `k * timesteps + t`. Writes `trace.aer`, `trace.json` and optionally
/// `trace.txt`.
pub fn cmd_encode(c: &Common, split: SplitArg, limit: usize, text: bool) -> Result<Vec<AerPacket>> {
    let cfg = c.config()?;
    let data = Datasets::load(&cfg)?;
    let (samples, stream) = match split {
        SplitArg::Learn => (&data.learn, Stream::Train { epoch: 0 }),
        SplitArg::Label => (&data.label, Stream::Label),
        SplitArg::Test => (&data.test, Stream::Test),
    };
    let samples = if limit > 0 && limit < samples.len() {
        &samples[..limit]
    } else {
        &samples[..]
    };
    let plan = cfg.encoding_plan();
    let mut packets = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        let offset = u32::try_from(k as u64 * u64::from(plan.timesteps))
            .map_err(|_| Error::Encoding("trace exceeds the 32-bit timestamp range".into()))?;
        let mut p = poisson_encode(s, &plan.params(stream, k))?;
        shift_packets(&mut p, offset);
        packets.extend(p);
    }
    create_out(&c.out)?;
    write_trace(&c.out.join("trace.aer"), &packets)?;
    if text {
        write_trace_text(&c.out.join("trace.txt"), &packets)?;
    }
    let meta = TraceMeta {
        config_hash: cfg.hash_hex(),
        seed: cfg.seed,
        timesteps: plan.timesteps,
        samples: samples.len(),
        packets: packets.len(),
        labels: samples.iter().map(|s| s.label).collect(),
    };
    let json = serde_json::to_string(&meta).map_err(|e| Error::Evaluation(e.to_string()))?;
    write_file(&c.out.join("trace.json"), format!("{json}\n"))?;
    Ok(packets)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub seed: u64,
    pub stats: RunStats,
}

/// Feeds a trace file through the engine with state reset at every
/// `timesteps` window. Writes `output.aer` and `run_stats.json`.
pub fn cmd_run(
    c: &Common,
    input: &Path,
    activation_log: bool,
) -> Result<(Vec<AerPacket>, RunStats)> {
    let cfg = c.config()?;
    let packets = read_trace(input)?;
    arith_dispatch(
        &cfg,
        |a| run_with(a, c, &cfg, packets.clone(), activation_log),
        |a| run_with(a, c, &cfg, packets.clone(), activation_log),
    )
}

fn run_with<A: Arithmetic>(
    arith: A,
    c: &Common,
    cfg: &RunConfig,
    packets: Vec<AerPacket>,
    activation_log: bool,
) -> Result<(Vec<AerPacket>, RunStats)> {
    let (engine, _) = open_engine(arith, c, cfg)?;
    let opts = EngineOptions {
        learning: !c.no_learning,
        log_activations: activation_log,
        ..engine_options(cfg)
    };
    let mut engine = Engine::with_options(
        engine.arith().clone(),
        &cfg.network,
        engine.into_store(),
        opts,
    )?;
    let out = engine.run_segmented(packets, cfg.timesteps)?;
    create_out(&c.out)?;
    write_trace(&c.out.join("output.aer"), &out.spikes)?;
    let rec = RunRecord {
        config_hash: cfg.hash_hex(),
        seed: cfg.seed,
        stats: out.stats,
    };
    let json = serde_json::to_string(&rec).map_err(|e| Error::Evaluation(e.to_string()))?;
    write_file(&c.out.join("run_stats.json"), format!("{json}\n"))?;
    if activation_log {
        let path = c.out.join("activations.csv");
        let mut buf = Vec::new();
        write_activation_log(&mut buf, &engine.take_activation_log())
            .map_err(|e| Error::io(&path, e))?;
        write_file(&path, buf)?;
    }
    Ok((out.spikes, out.stats))
}
