//! The trace rule against the pair-based STDP window, for one pre/post pair
//! at every lag, then the same pair replayed through the event engine.
//!
//! ```text
//! cargo run --example stdp_pair -- [tau]
//! ```

use aern::dynamics::{LifParams, TraceParams};
use aern::plasticity::{
    pair_stdp_delta, trace_stdp_delta, PairStdpParams, SpikeTrain, StdpParams, TraceDecay,
};
use aern::topology::{StateStore, SynapseMatrix, TopologyParams};
use aern::{AerPacket, Engine, FloatArith, NetworkParams};

fn main() -> aern::Result<()> {
    let tau: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(20.0), |s| s.parse())
        .expect("tau");
    let a = 0.01;
    let p = PairStdpParams {
        a_pre: a,
        a_post: a,
        tau_pre: tau,
        tau_post: tau,
    };
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>9}",
        "lag", "pair", "trace exp", "trace iter", "rel err"
    );
    for lag in [-40, -20, -10, -5, -1, 0, 1, 5, 10, 20, 40] {
        let pre = SpikeTrain::new(vec![100.0])?;
        let post = SpikeTrain::new(vec![100.0 + f64::from(lag)])?;
        let pair = pair_stdp_delta(&pre, &post, &p);
        let exp = trace_stdp_delta(&pre, &post, &p, TraceDecay::Exponential)?;
        let iter = trace_stdp_delta(&pre, &post, &p, TraceDecay::Iterative { dt: 1.0 })?;
        let rel = if pair == 0.0 {
            0.0
        } else {
            ((iter - pair) / pair).abs()
        };
        println!("{lag:>5} {pair:>12.3e} {exp:>12.3e} {iter:>12.3e} {rel:>9.2e}");
    }

    // Input 0 is the synapse under study; input 1 is strong enough to make
    // the single neuron fire when it spikes.
    let params = NetworkParams {
        topology: TopologyParams {
            n_input: 2,
            n_exc: 1,
            w_inh: 0.0,
        },
        lif: LifParams {
            v_thresh: 1.0,
            ..LifParams::default()
        },
        trace: TraceParams {
            tau_x: tau,
            alpha: 1.0,
            x_max: 10.0,
        },
        stdp: StdpParams {
            alpha_pre: a,
            alpha_post: a,
            ..StdpParams::default()
        },
    };
    let arith = FloatArith::new();
    let res = params.resolve(&arith)?;
    println!("\nengine, pre at t = 10 and post at t = 10 + lag:");
    for lag in [1u32, 5, 10] {
        let w = SynapseMatrix::from_vec(2, 1, vec![0.5, 1.0])?;
        let mut e = Engine::new(arith.clone(), &params, StateStore::with_weights(w, &res))?;
        e.run(
            [AerPacket::new(0, 10), AerPacket::new(1, 10 + lag)],
            10 + lag + 1,
        )?;
        let dw = e.store().weights.get(0, 0) - 0.5;
        let h = 1.0 / tau;
        println!(
            "  lag {lag:>2}: dw = {dw:.6e}; a(1-dt/tau)^(lag+1) = {:.6e} (LTP reads the trace after that step's leak)",
            a * (1.0 - h).powi(lag as i32 + 1)
        );
    }
    Ok(())
}
