//! Accuracy against firing threshold (or any other sweepable parameter) on
//! a reduced MNIST run.
//!
//! ```text
//! cargo run --release --example threshold_sweep -- [param] [v1,v2,...] [train_samples]
//! ```
//!
//! Defaults: `v_thresh 60,90,120,180` over 3,000 learning samples. Expects
//! the IDX files under `data/mnist`.

use aern::config::RunConfig;
use aern::evaluator::{sweep, Datasets, SweepParam};

fn main() -> aern::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut args = std::env::args().skip(1);
    let param: SweepParam = args.next().as_deref().unwrap_or("v_thresh").parse()?;
    let values: Vec<f64> = args
        .next()
        .as_deref()
        .unwrap_or("60,90,120,180")
        .split(',')
        .map(|v| v.trim().parse().expect("numeric sweep value"))
        .collect();
    let mut cfg = RunConfig::default();
    cfg.data.train_samples = args
        .next()
        .map_or(Ok(3000), |s| s.parse())
        .expect("train_samples");
    cfg.data.test_samples = 1000;
    let data = Datasets::load(&cfg)?;

    println!("{:>10} {:>9} {:>8}", param.as_str(), "accuracy", "seconds");
    for p in sweep(&cfg, param, &values, &data)? {
        println!(
            "{:>10} {:>9.4} {:>8.1}",
            p.value, p.metrics.accuracy, p.runtime_secs
        );
    }
    Ok(())
}
