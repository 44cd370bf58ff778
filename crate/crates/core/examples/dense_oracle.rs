//! The event engine against the dense clock-driven reference on random
//! small networks. Both must agree bit for bit.
//!
//! ```text
//! cargo run --example dense_oracle -- [cases]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aern::dynamics::{LifParams, TraceParams};
use aern::reference::{dense_simulate, SpikeGrid};
use aern::topology::TopologyParams;
use aern::{build_network, Engine, EngineOptions, FloatArith, NetworkParams};

fn main() -> aern::Result<()> {
    let cases: u64 = std::env::args()
        .nth(1)
        .map_or(Ok(50), |s| s.parse())
        .expect("cases");
    let mut agree = 0;
    for seed in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n_in, n_exc, steps) = (
            rng.gen_range(1..=10),
            rng.gen_range(1..=5),
            rng.gen_range(1..=200),
        );
        let p = NetworkParams {
            topology: TopologyParams {
                n_input: n_in,
                n_exc,
                w_inh: rng.gen_range(0.0..0.5),
            },
            lif: LifParams {
                v_thresh: rng.gen_range(0.5..2.0),
                ..LifParams::default()
            },
            trace: TraceParams {
                tau_x: rng.gen_range(5.0..40.0),
                ..TraceParams::default()
            },
            ..NetworkParams::default()
        };
        let store = build_network(&FloatArith::new(), &p, seed)?;
        let mut grid = SpikeGrid::new(steps, n_in);
        for t in 0..steps {
            for i in 0..n_in {
                grid.set(t, i, rng.gen_bool(0.3));
            }
        }
        let learning = seed % 2 == 0;
        let (dense_store, dense_out) = dense_simulate(&store, &p, &grid, learning)?;
        let opts = EngineOptions {
            learning,
            ..EngineOptions::default()
        };
        let mut engine = Engine::with_options(FloatArith::new(), &p, store, opts)?;
        let out = engine.run(grid.to_packets(), steps as u32)?;
        let same = out.spikes == dense_out.to_packets() && engine.store() == &dense_store;
        if same {
            agree += 1;
        } else {
            println!("seed {seed}: mismatch ({n_in}x{n_exc}, {steps} steps, learning {learning})");
        }
    }
    println!("{agree}/{cases} random networks identical to the dense reference");
    Ok(())
}
