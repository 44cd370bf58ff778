//! Dense, clock-driven `f64` simulator of the same network.
//!
//! This is the oracle for the event engine. It walks every timestep and
//! every neuron with plain arithmetic and deliberately calls none of the
//! kernels in `dynamics`, `plasticity` or `engine`, so a bug there cannot
//! hide behind a shared implementation.

use crate::engine::AerPacket;
use crate::error::{Error, Result};
use crate::topology::{NetworkParams, StateStore};

/// A `T x n` spike raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeGrid {
    steps: usize,
    width: usize,
    cells: Vec<bool>,
}

pub type DenseInput = SpikeGrid;

impl SpikeGrid {
    pub fn new(steps: usize, width: usize) -> Self {
        SpikeGrid {
            steps,
            width,
            cells: vec![false; steps * width],
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, t: usize, n: usize) -> bool {
        self.cells[t * self.width + n]
    }

    pub fn set(&mut self, t: usize, n: usize, on: bool) {
        self.cells[t * self.width + n] = on;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Builds a raster from packets; every packet must fit the grid.
    pub fn from_packets(packets: &[AerPacket], steps: usize, width: usize) -> Result<Self> {
        let mut g = SpikeGrid::new(steps, width);
        for p in packets {
            let (t, n) = (p.timestamp as usize, usize::from(p.neuron_id));
            if t >= steps || n >= width {
                return Err(Error::Packet(format!(
                    "packet {p:?} outside a {steps}x{width} grid"
                )));
            }
            g.set(t, n, true);
        }
        Ok(g)
    }

    /// Packets ordered by timestamp, then neuron id.
    pub fn to_packets(&self) -> Vec<AerPacket> {
        let mut out = Vec::new();
        for t in 0..self.steps {
            for n in 0..self.width {
                if self.get(t, n) {
                    out.push(AerPacket::new(n as u16, t as u32));
                }
            }
        }
        out
    }
}

/// Simulates `input.steps()` timesteps from `store`.
///
/// Each step: (1) inputs spiking at `t` in ascending id integrate their row,
/// depress it and bump their trace; (2) every voltage and trace leaks and
/// queued inhibition is subtracted; (3) a threshold scan in ascending id
/// potentiates, resets, bumps and queues inhibition for each spiking neuron.
///
/// Only `f64` stores are accepted; there is no fixed-point path here.
pub fn dense_simulate(
    store: &StateStore<f64>,
    params: &NetworkParams,
    input: &DenseInput,
    learning: bool,
) -> Result<(StateStore<f64>, SpikeGrid)> {
    params.validate()?;
    let n_in = params.topology.n_input;
    let n_exc = params.topology.n_exc;
    if input.width() != n_in || store.n_input() != n_in || store.n_exc() != n_exc {
        return Err(Error::Config(format!(
            "dense input {}x{} / store {}x{} do not match topology {n_in}x{n_exc}",
            input.steps(),
            input.width(),
            store.n_input(),
            store.n_exc()
        )));
    }

    let lif = &params.lif;
    let tr = &params.trace;
    let sp = &params.stdp;
    let w_inh = params.topology.w_inh;
    let v_floor = lif.v_floor.unwrap_or(-lif.v_thresh);
    let dt = lif.dt;

    let mut w: Vec<f64> = store.weights.as_slice().to_vec();
    let mut v: Vec<f64> = store.exc.iter().map(|s| s.v).collect();
    let mut x_post: Vec<f64> = store.exc.iter().map(|s| s.x).collect();
    let mut x_pre: Vec<f64> = store.input_traces.clone();
    let mut inh: Vec<f64> = store.pending_inhibition.clone();
    let mut out = SpikeGrid::new(input.steps(), n_exc);

    for t in 0..input.steps() {
        for i in 0..n_in {
            if !input.get(t, i) {
                continue;
            }
            for j in 0..n_exc {
                let k = i * n_exc + j;
                v[j] += w[k];
                if learning {
                    w[k] = (w[k] - sp.alpha_post * x_post[j]).clamp(sp.w_min, sp.w_max);
                }
            }
            x_pre[i] = (x_pre[i] + tr.alpha).min(tr.x_max);
        }

        for j in 0..n_exc {
            let leaked = v[j] - dt * (v[j] - lif.v_rest) / lif.tau_v;
            v[j] = (leaked - inh[j]).max(v_floor);
            x_post[j] -= dt * x_post[j] / tr.tau_x;
            inh[j] = 0.0;
        }
        for x in x_pre.iter_mut() {
            *x -= dt * *x / tr.tau_x;
        }

        for j in 0..n_exc {
            if v[j] < lif.v_thresh {
                continue;
            }
            if learning {
                for i in 0..n_in {
                    let k = i * n_exc + j;
                    w[k] = (w[k] + sp.alpha_pre * x_pre[i]).clamp(sp.w_min, sp.w_max);
                }
            }
            v[j] = lif.v_rest;
            x_post[j] = (x_post[j] + tr.alpha).min(tr.x_max);
            for (k, p) in inh.iter_mut().enumerate() {
                if k != j {
                    *p += w_inh;
                }
            }
            out.set(t, j, true);
        }
    }

    let mut next = store.clone();
    next.weights.as_mut_slice().copy_from_slice(&w);
    for (j, s) in next.exc.iter_mut().enumerate() {
        s.v = v[j];
        s.x = x_post[j];
    }
    next.input_traces = x_pre;
    next.pending_inhibition = inh;
    Ok((next, out))
}
