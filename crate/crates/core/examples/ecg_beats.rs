//! Four-class heartbeat classification on MIT-BIH beats.
//!
//! ```text
//! python3 scripts/extract_mitbih_beats.py --download data/mitdb
//! python3 scripts/extract_mitbih_beats.py --db data/mitdb --out data/ecg
//! cargo run --release --example ecg_beats -- [configs/ecg.cfg]
//! ```

use aern::config::RunConfig;
use aern::evaluator::{run_experiment, Datasets};
use aern::FloatArith;

const CLASSES: [&str; 4] = ["N", "S", "V", "F"];

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "configs/ecg.cfg".into());
    if let Err(e) = run(&path) {
        eprintln!("error: {e}");
        eprintln!("ECG beats come from scripts/extract_mitbih_beats.py (see its --help)");
        std::process::exit(e.exit_code());
    }
}

fn run(path: &str) -> aern::Result<()> {
    let cfg = RunConfig::load(path.as_ref())?;
    let data = Datasets::load(&cfg)?;
    println!(
        "{} learning, {} labelling, {} test beats",
        data.learn.len(),
        data.label.len(),
        data.test.len()
    );
    let e = run_experiment(FloatArith::new(), &cfg, &data)?;
    println!("accuracy {:.4}", e.metrics.accuracy);
    for (name, (row, recall)) in CLASSES
        .iter()
        .zip(e.metrics.confusion.iter().zip(&e.metrics.per_class_recall))
    {
        println!("  {name}: recall {recall:.3}  {row:?}");
    }
    Ok(())
}
