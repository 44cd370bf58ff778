//! Training split across a checkpoint gives the same weights as training in
//! one go, in both numeric modes.
//!
//! ```text
//! cargo run --release --example checkpoint_resume -- [samples]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aern::config::RunConfig;
use aern::encoding::Sample;
use aern::evaluator::train;
use aern::topology::{load_checkpoint, save_checkpoint, weight_digest};
use aern::{build_network, Arithmetic, Engine, FixedArith, FloatArith};

/// Random oriented bars on a 28x28 canvas.
fn bars(n: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..n)
        .map(|_| {
            let label = rng.gen_range(0..2);
            let at: usize = rng.gen_range(4..24);
            let features = (0..784)
                .map(|i: usize| {
                    let (r, c) = (i / 28, i % 28);
                    let on = if label == 0 {
                        c.abs_diff(at) < 2
                    } else {
                        r.abs_diff(at) < 2
                    };
                    if on {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            Sample { features, label }
        })
        .collect()
}

fn check<A: Arithmetic>(arith: A, cfg: &RunConfig, samples: &[Sample]) -> aern::Result<()> {
    let plan = cfg.encoding_plan();
    let n = samples.len() as u64;
    let fresh = || -> aern::Result<Engine<A>> {
        let store = build_network(&arith, &cfg.network, cfg.init_seed())?;
        Engine::new(arith.clone(), &cfg.network, store)
    };

    let mut whole = fresh()?;
    train(&mut whole, samples, &plan, 1, 0..n)?;

    let mut first = fresh()?;
    train(&mut first, samples, &plan, 1, 0..n / 2)?;
    let path = std::env::temp_dir().join(format!("resume_{}.aern", arith.mode()));
    save_checkpoint(&path, &arith, first.store(), cfg.hash(), cfg.seed, n / 2)?;
    let (store, meta) = load_checkpoint(&path, &arith)?;
    let mut second = Engine::new(arith.clone(), &cfg.network, store)?;
    train(&mut second, samples, &plan, 1, meta.samples_seen..n)?;

    let a = weight_digest(&arith, whole.store());
    let b = weight_digest(&arith, second.store());
    println!(
        "{:>5}: one pass {}..  resumed at {} from {}: {}..  {}",
        arith.mode(),
        &a[..16],
        meta.samples_seen,
        path.display(),
        &b[..16],
        if a == b { "identical" } else { "DIFFERENT" }
    );
    Ok(())
}

fn main() -> aern::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(Ok(200), |s| s.parse())
        .expect("samples");
    let cfg = RunConfig::default();
    let samples = bars(n);
    check(FloatArith::new(), &cfg, &samples)?;
    check(
        FixedArith::new(cfg.state_format, cfg.weight_format),
        &cfg,
        &samples,
    )
}
