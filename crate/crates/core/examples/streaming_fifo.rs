//! Encoder, engine and consumer on three threads joined by bounded FIFOs.
//! The tiny input FIFO forces the encoder to wait on the engine; the result
//! is identical to a single-threaded run.
//!
//! ```text
//! cargo run --release --example streaming_fifo -- [input_capacity]
//! ```

use std::thread;

use aern::config::RunConfig;
use aern::encoding::{poisson_encode, EncoderParams, Sample};
use aern::engine::SharedFifo;
use aern::{build_network, Engine, FloatArith};

fn main() -> aern::Result<()> {
    let capacity: usize = std::env::args()
        .nth(1)
        .map_or(Ok(8), |s| s.parse())
        .expect("capacity");
    let cfg = RunConfig::default();
    let features: Vec<f64> = (0..784).map(|i| ((i % 28) as f64 / 27.0).powi(2)).collect();
    let enc = EncoderParams {
        timesteps: cfg.timesteps,
        max_rate: cfg.max_rate,
        seed: 11,
    };
    let packets = poisson_encode(&Sample { features, label: 0 }, &enc)?;
    let arith = FloatArith::new();
    let store = build_network(&arith, &cfg.network, cfg.init_seed())?;

    let mut reference = Engine::new(arith.clone(), &cfg.network, store.clone())?;
    let expected = reference.run(packets.clone(), enc.timesteps)?;

    let input = SharedFifo::new(capacity);
    let output = SharedFifo::new(cfg.output_fifo);
    let feeder = {
        let input = input.clone();
        thread::spawn(move || {
            let mut waits = 0;
            for p in packets {
                if input.len() == input.capacity() {
                    waits += 1;
                }
                if input.push(p).is_err() {
                    break;
                }
            }
            input.close();
            waits
        })
    };
    let consumer = {
        let output = output.clone();
        thread::spawn(move || {
            let mut spikes = Vec::new();
            while let Some(p) = output.pop() {
                spikes.push(p);
            }
            spikes
        })
    };
    let mut engine = Engine::new(arith, &cfg.network, store)?;
    let stats = engine.run_shared(&input, &output, enc.timesteps)?;
    let waits = feeder.join().expect("feeder thread");
    let spikes = consumer.join().expect("consumer thread");

    println!(
        "{} packets in through a {capacity}-slot FIFO (feeder found it full {waits} times), {} spikes out",
        stats.packets_in,
        spikes.len()
    );
    println!(
        "same as the single-threaded run: {}",
        spikes == expected.spikes && engine.store() == reference.store()
    );
    Ok(())
}
