//! Unsupervised online learning on MNIST, then label assignment and test.
//!
//! ```text
//! cargo run --release --example mnist_online -- [config] [key=value ...]
//! ```
//!
//! Expects the IDX files under `data/mnist` (see `scripts/fetch_mnist.sh`).

use std::time::Instant;

use aern::config::RunConfig;
use aern::evaluator::{run_experiment, Datasets};
use aern::{FixedArith, FloatArith, NumericMode};

fn main() -> aern::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut cfg = RunConfig::default();
    for arg in std::env::args().skip(1) {
        match arg.split_once('=') {
            Some((k, v)) => cfg.set(k.trim(), v.trim())?,
            None => cfg = RunConfig::load(arg.as_ref())?,
        }
    }
    cfg.validate()?;
    let data = Datasets::load(&cfg)?;
    println!(
        "learn {} / label {} / test {} samples, n_exc = {}, mode = {}",
        data.learn.len(),
        data.label.len(),
        data.test.len(),
        cfg.network.topology.n_exc,
        cfg.mode
    );
    let start = Instant::now();
    let (metrics, stats, silent) = match cfg.mode {
        NumericMode::Float => {
            let e = run_experiment(FloatArith::new(), &cfg, &data)?;
            (e.metrics, e.train, e.labels.silent)
        }
        NumericMode::Fixed => {
            let e = run_experiment(
                FixedArith::new(cfg.state_format, cfg.weight_format),
                &cfg,
                &data,
            )?;
            (e.metrics, e.train, e.labels.silent)
        }
    };
    println!(
        "accuracy {:.4}  ({} input spikes, {} output spikes, {} silent neurons, {:.1}s)",
        metrics.accuracy,
        stats.input_spikes,
        stats.output_spikes,
        silent.iter().filter(|&&s| s).count(),
        start.elapsed().as_secs_f64()
    );
    for (c, r) in metrics.per_class_recall.iter().enumerate() {
        println!("  class {c}: recall {r:.3}");
    }
    Ok(())
}
