//! One Poisson-coded sample through the event engine: output spikes, the
//! handler-activation log, and how much work the event-driven schedule saves
//! over touching every synapse every step.
//!
//! ```text
//! cargo run --example event_engine -- [max_rate]
//! ```

use aern::config::RunConfig;
use aern::encoding::{poisson_encode, EncoderParams, Sample};
use aern::engine::{write_activation_log, Phase};
use aern::{build_network, Engine, EngineOptions, FloatArith};

fn main() -> aern::Result<()> {
    let max_rate: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(0.25), |s| s.parse())
        .expect("max_rate");
    let cfg = RunConfig::default();
    let n_in = cfg.network.topology.n_input;
    // A synthetic "image": a bright vertical bar.
    let features = (0..n_in)
        .map(|i| {
            if (12..16).contains(&(i % 28)) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let sample = Sample { features, label: 1 };
    let enc = EncoderParams {
        timesteps: cfg.timesteps,
        max_rate,
        seed: 7,
    };
    let packets = poisson_encode(&sample, &enc)?;

    let arith = FloatArith::new();
    let store = build_network(&arith, &cfg.network, cfg.init_seed())?;
    let opts = EngineOptions {
        log_activations: true,
        ..EngineOptions::default()
    };
    let mut engine = Engine::with_options(arith, &cfg.network, store, opts)?;
    let out = engine.run(packets.clone(), enc.timesteps)?;

    let s = out.stats;
    println!(
        "{} input packets, {} output spikes",
        packets.len(),
        out.spikes.len()
    );
    println!(
        "activations: integrate {}, leak {}, fire {} ({} idle steps)",
        s.integrate_activations, s.leak_activations, s.fire_activations, s.idle_steps
    );
    let n_exc = cfg.network.topology.n_exc as u64;
    let dense = u64::from(enc.timesteps) * n_in as u64 * n_exc;
    let event = s.packets_integrated * n_exc;
    println!(
        "synapse reads: event driven {event}, clock driven {dense} ({:.1}% of dense)",
        100.0 * event as f64 / dense as f64
    );

    let log = engine.activation_log().unwrap_or_default();
    let first_fire = log
        .iter()
        .position(|r| r.phase == Phase::Firing)
        .unwrap_or(0);
    println!("activation log around the first fire phase (ts,phase,count):");
    let lo = first_fire.saturating_sub(4);
    write_activation_log(
        std::io::stdout().lock(),
        &log[lo..(first_fire + 3).min(log.len())],
    )
    .expect("stdout");
    Ok(())
}
