//! The event-driven core.
//!
//! Input AER packets are buffered in a FIFO and handed to a controller that
//! tracks the current timestamp. A packet stamped with the current timestamp
//! is integrated immediately. A later timestamp first closes every elapsed
//! step, one leak and one fire phase each, so a gap of `n` timestamps costs
//! `n` leak/fire cycles and never a lumped one. Spikes emitted by the fire
//! phase leave through the output FIFO stamped with the step they fired in.
//!
//! Within a step the order is fixed: every integration, then the leak, then
//! the fire scan.
//!
//! * integrate: add the input's fan-out row to every excitatory voltage, then
//!   depress each of those synapses by the postsynaptic trace as it stood
//!   before this step's leak, then bump the input trace.
//! * leak: decay voltages toward rest and subtract queued inhibition (floored
//!   at `v_floor`), decay every trace, clear the queue.
//! * fire: every neuron at or above threshold fires (ascending id).
//!   Its column is potentiated by the input traces, its voltage resets, its
//!   trace bumps, and it queues inhibition on all other neurons for the next
//!   leak.

pub mod aer;
pub mod fifo;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use aer::{decode_packet, encode_packet, AerPacket, PACKET_BYTES};
pub use fifo::{EventFifo, SharedFifo, DEFAULT_FIFO_CAPACITY};

use crate::dynamics::{bump_trace, fire_check, integrate, leak_state};
use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, Numeric};
use crate::plasticity::{ltd_on_pre, ltp_on_post};
use crate::topology::{queue_inhibition, reset_for_sample, NetworkParams, Resolved, StateStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Idle,
    Integrating,
    Leaking,
    Firing,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Idle => "idle",
            Phase::Integrating => "integrate",
            Phase::Leaking => "leak",
            Phase::Firing => "fire",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ControllerState {
    pub current_timestamp: u32,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub packets_in: u64,
    pub packets_integrated: u64,
    pub packets_dropped: u64,
    pub packets_out: u64,
    pub integrate_activations: u64,
    pub leak_activations: u64,
    pub fire_activations: u64,
    /// Closed steps that received no input.
    pub idle_steps: u64,
}

impl RunStats {
    pub fn handler_activations(&self) -> u64 {
        self.integrate_activations + self.leak_activations + self.fire_activations
    }

    pub fn accumulate(&mut self, o: &RunStats) {
        self.packets_in += o.packets_in;
        self.packets_integrated += o.packets_integrated;
        self.packets_dropped += o.packets_dropped;
        self.packets_out += o.packets_out;
        self.integrate_activations += o.integrate_activations;
        self.leak_activations += o.leak_activations;
        self.fire_activations += o.fire_activations;
        self.idle_steps += o.idle_steps;
    }
}

/// One line of the handler-activation log: `ts,phase,count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActivationRecord {
    pub timestamp: u32,
    pub phase: Phase,
    pub count: u32,
}

pub fn write_activation_log<W: Write>(mut out: W, log: &[ActivationRecord]) -> std::io::Result<()> {
    for r in log {
        writeln!(out, "{},{},{}", r.timestamp, r.phase, r.count)?;
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub spikes: Vec<AerPacket>,
    pub stats: RunStats,
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub learning: bool,
    pub input_capacity: usize,
    pub output_capacity: usize,
    pub log_activations: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            learning: true,
            input_capacity: DEFAULT_FIFO_CAPACITY,
            output_capacity: DEFAULT_FIFO_CAPACITY,
            log_activations: false,
        }
    }
}

/// One processor instance: state store, controller and FIFOs.
#[derive(Clone, Debug)]
pub struct Engine<A: Arithmetic> {
    arith: A,
    params: NetworkParams,
    res: Resolved<A::Value>,
    store: StateStore<A::Value>,
    learning: bool,
    /// Accumulated weight changes while a batch is open.
    deferred: Option<Vec<A::Value>>,
    controller: ControllerState,
    step_had_input: bool,
    input_fifo: EventFifo,
    output_fifo: EventFifo,
    stats: RunStats,
    log: Option<Vec<ActivationRecord>>,
    fired: Vec<usize>,
}

impl<A: Arithmetic> Engine<A> {
    pub fn new(arith: A, params: &NetworkParams, store: StateStore<A::Value>) -> Result<Self> {
        Engine::with_options(arith, params, store, EngineOptions::default())
    }

    pub fn with_options(
        arith: A,
        params: &NetworkParams,
        store: StateStore<A::Value>,
        opts: EngineOptions,
    ) -> Result<Self> {
        params.validate()?;
        if store.n_input() != params.topology.n_input || store.n_exc() != params.topology.n_exc {
            return Err(Error::Config(format!(
                "store is {}x{} but topology is {}x{}",
                store.n_input(),
                store.n_exc(),
                params.topology.n_input,
                params.topology.n_exc
            )));
        }
        if opts.input_capacity == 0 || opts.output_capacity == 0 {
            return Err(Error::Config("FIFO capacities must be positive".into()));
        }
        let res = params.resolve(&arith)?;
        Ok(Engine {
            arith,
            params: params.clone(),
            res,
            store,
            learning: opts.learning,
            deferred: None,
            controller: ControllerState {
                current_timestamp: 0,
                phase: Phase::Idle,
            },
            step_had_input: false,
            input_fifo: EventFifo::new(opts.input_capacity),
            output_fifo: EventFifo::new(opts.output_capacity),
            stats: RunStats::default(),
            log: opts.log_activations.then(Vec::new),
            fired: Vec::new(),
        })
    }

    pub fn arith(&self) -> &A {
        &self.arith
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn resolved(&self) -> &Resolved<A::Value> {
        &self.res
    }

    pub fn store(&self) -> &StateStore<A::Value> {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut StateStore<A::Value> {
        &mut self.store
    }

    pub fn into_store(self) -> StateStore<A::Value> {
        self.store
    }

    pub fn controller(&self) -> ControllerState {
        self.controller
    }

    pub fn learning(&self) -> bool {
        self.learning
    }

    pub fn set_learning(&mut self, on: bool) {
        self.learning = on;
    }

    /// Cumulative statistics since construction.
    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn activation_log(&self) -> Option<&[ActivationRecord]> {
        self.log.as_deref()
    }

    pub fn take_activation_log(&mut self) -> Vec<ActivationRecord> {
        self.log.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// Starts deferring weight updates: LTD/LTP changes are computed against
    /// the frozen weights and accumulated until [`Engine::commit_batch`].
    pub fn begin_batch(&mut self) {
        if self.deferred.is_none() {
            let zero = self.arith.weight(0.0);
            self.deferred = Some(vec![zero; self.store.weights.len()]);
        }
    }

    /// Applies the accumulated batch, clamped to the weight bounds, and
    /// returns to immediate updates.
    pub fn commit_batch(&mut self) {
        if let Some(deltas) = self.deferred.take() {
            let stdp = &self.res.stdp;
            for (w, d) in self.store.weights.as_mut_slice().iter_mut().zip(deltas) {
                *w = w.add(d).clamp_to(stdp.w_min, stdp.w_max);
            }
        }
    }

    /// Clears neuron state for a new sample and restarts the controller at
    /// `start_ts`.
    pub fn reset_sample(&mut self, start_ts: u32) {
        reset_for_sample(&mut self.store, &self.res);
        self.controller = ControllerState {
            current_timestamp: start_ts,
            phase: Phase::Idle,
        };
        self.step_had_input = false;
        self.input_fifo.clear();
        self.output_fifo.clear();
    }

    fn record(&mut self, timestamp: u32, phase: Phase, count: u32) {
        if let Some(log) = self.log.as_mut() {
            match log.last_mut() {
                Some(r) if r.timestamp == timestamp && r.phase == phase => r.count += count,
                _ => log.push(ActivationRecord {
                    timestamp,
                    phase,
                    count,
                }),
            }
        }
    }

    /// Integrates one input spike into every excitatory neuron.
    ///
    /// The packet must carry the controller's current timestamp; ids outside
    /// the input layer are rejected without touching state.
    pub fn integrate_handler(&mut self, packet: AerPacket) -> Result<()> {
        let pre = usize::from(packet.neuron_id);
        if pre >= self.store.n_input() {
            return Err(Error::Packet(format!(
                "input id {pre} out of range (n_input = {})",
                self.store.n_input()
            )));
        }
        self.controller.phase = Phase::Integrating;
        let stdp = &self.res.stdp;
        let StateStore {
            exc,
            input_traces,
            weights,
            ..
        } = &mut self.store;
        let row = weights.row_mut(pre);
        match (&mut self.deferred, self.learning) {
            (_, false) => {
                for (s, &w) in exc.iter_mut().zip(row.iter()) {
                    *s = integrate(*s, w);
                }
            }
            (None, true) => {
                for (s, w) in exc.iter_mut().zip(row.iter_mut()) {
                    *s = integrate(*s, *w);
                    *w = ltd_on_pre(*w, s.x, stdp);
                }
            }
            (Some(deltas), true) => {
                let n_exc = exc.len();
                let d_row = &mut deltas[pre * n_exc..(pre + 1) * n_exc];
                for ((s, &w), d) in exc.iter_mut().zip(row.iter()).zip(d_row) {
                    *s = integrate(*s, w);
                    *d = d.add(ltd_on_pre(w, s.x, stdp).sub(w));
                }
            }
        }
        input_traces[pre] = bump_trace(input_traces[pre], &self.res.trace);
        self.stats.integrate_activations += 1;
        self.stats.packets_integrated += 1;
        self.step_had_input = true;
        self.record(packet.timestamp, Phase::Integrating, 1);
        Ok(())
    }

    /// Leaks every voltage and trace and applies queued inhibition.
    pub fn leak_handler(&mut self) {
        self.controller.phase = Phase::Leaking;
        let Resolved {
            lif,
            trace,
            inh_zero,
            ..
        } = &self.res;
        let StateStore {
            exc,
            input_traces,
            pending_inhibition,
            ..
        } = &mut self.store;
        for (s, p) in exc.iter_mut().zip(pending_inhibition.iter_mut()) {
            let leaked = leak_state(*s, lif, trace);
            s.v = leaked.v.sub_floored(*p, lif.v_floor);
            s.x = leaked.x;
            *p = *inh_zero;
        }
        for x in input_traces.iter_mut() {
            *x = x.leak_decay(&trace.decay);
        }
        self.stats.leak_activations += 1;
        let ts = self.controller.current_timestamp;
        self.record(ts, Phase::Leaking, 1);
    }

    /// Fires every neuron at or above threshold and emits their packets
    /// stamped `ts`. Returns the number of spikes.
    pub fn fire_handler(&mut self, ts: u32) -> Result<usize> {
        self.controller.phase = Phase::Firing;
        let Resolved {
            lif,
            trace,
            stdp,
            w_inh,
            ..
        } = &self.res;
        let mut fired = std::mem::take(&mut self.fired);
        fired.clear();
        fired.extend(
            self.store
                .exc
                .iter()
                .enumerate()
                .filter(|(_, s)| s.v >= lif.v_thresh)
                .map(|(j, _)| j),
        );
        let n_exc = self.store.n_exc();
        for &j in &fired {
            if self.learning {
                let StateStore {
                    input_traces,
                    weights,
                    ..
                } = &mut self.store;
                match &mut self.deferred {
                    None => {
                        for (i, &x_pre) in input_traces.iter().enumerate() {
                            let w = weights.get(i, j);
                            weights.set(i, j, ltp_on_post(w, x_pre, stdp));
                        }
                    }
                    Some(deltas) => {
                        for (i, &x_pre) in input_traces.iter().enumerate() {
                            let w = weights.get(i, j);
                            let d = &mut deltas[i * n_exc + j];
                            *d = d.add(ltp_on_post(w, x_pre, stdp).sub(w));
                        }
                    }
                }
            }
            let (after, _) = fire_check(self.store.exc[j], lif, trace);
            self.store.exc[j] = after;
        }
        queue_inhibition(&mut self.store, &fired, *w_inh);
        for &j in &fired {
            let packet = AerPacket::new(j as u16, ts);
            if self.output_fifo.push(packet).is_err() {
                self.fired = fired;
                return Err(Error::OutputOverflow {
                    timestamp: ts,
                    capacity: self.output_fifo.capacity(),
                });
            }
        }
        let n = fired.len();
        self.fired = fired;
        self.stats.fire_activations += 1;
        self.stats.packets_out += n as u64;
        self.record(ts, Phase::Firing, 1);
        Ok(n)
    }

    /// Closes steps `from_ts .. to_ts`, one leak and one fire each, and
    /// leaves the controller at `to_ts`.
    pub fn run_timestep_boundary(&mut self, from_ts: u32, to_ts: u32) -> Result<Vec<AerPacket>> {
        let mut out = Vec::new();
        for ts in from_ts..to_ts {
            self.controller.current_timestamp = ts;
            if !self.step_had_input {
                self.stats.idle_steps += 1;
            }
            self.leak_handler();
            self.fire_handler(ts)?;
            out.extend(self.output_fifo.drain());
            self.step_had_input = false;
        }
        self.controller = ControllerState {
            current_timestamp: to_ts.max(from_ts),
            phase: Phase::Idle,
        };
        Ok(out)
    }

    /// Feeds one packet through the controller. Returns spikes from any steps
    /// the packet's timestamp closed. Out-of-range ids are dropped and
    /// counted; a timestamp earlier than the current one is a protocol error.
    pub fn process_packet(&mut self, p: AerPacket) -> Result<Vec<AerPacket>> {
        self.stats.packets_in += 1;
        if usize::from(p.neuron_id) >= self.store.n_input() {
            self.stats.packets_dropped += 1;
            log::debug!("dropping malformed packet {p:?}");
            return Ok(Vec::new());
        }
        let current = self.controller.current_timestamp;
        if p.timestamp < current {
            return Err(Error::DecreasingTimestamp {
                current,
                got: p.timestamp,
            });
        }
        let out = if p.timestamp > current {
            self.run_timestep_boundary(current, p.timestamp)?
        } else {
            Vec::new()
        };
        self.integrate_handler(p)?;
        Ok(out)
    }

    /// Closes every remaining step before `stop_ts`.
    pub fn finish(&mut self, stop_ts: u32) -> Result<Vec<AerPacket>> {
        let current = self.controller.current_timestamp;
        if stop_ts > current {
            self.run_timestep_boundary(current, stop_ts)
        } else {
            Ok(Vec::new())
        }
    }

    /// Drains `input` through the input FIFO and closes steps up to
    /// `stop_ts`. Input timestamps must be non-decreasing and below `stop_ts`.
    pub fn run<I>(&mut self, input: I, stop_ts: u32) -> Result<RunOutput>
    where
        I: IntoIterator<Item = AerPacket>,
    {
        let before = self.stats;
        let mut spikes = Vec::new();
        let mut feed = input.into_iter();
        loop {
            while !self.input_fifo.is_full() {
                match feed.next() {
                    Some(p) => {
                        let _ = self.input_fifo.push(p);
                    }
                    None => break,
                }
            }
            let Some(p) = self.input_fifo.pop() else {
                break;
            };
            if p.timestamp >= stop_ts {
                return Err(Error::Packet(format!(
                    "packet {p:?} lies at or beyond stop timestamp {stop_ts}"
                )));
            }
            spikes.extend(self.process_packet(p)?);
        }
        spikes.extend(self.finish(stop_ts)?);
        Ok(RunOutput {
            spikes,
            stats: diff(&self.stats, &before),
        })
    }

    /// Consumes `input` until it is closed and drained, writes spikes to
    /// `output` and closes steps up to `stop_ts`. `output` is closed on
    /// return; on error `input` is closed too so a blocked feeder wakes.
    /// A full `output` is fatal, as for the internal output FIFO.
    pub fn run_shared(
        &mut self,
        input: &SharedFifo,
        output: &SharedFifo,
        stop_ts: u32,
    ) -> Result<RunStats> {
        let before = self.stats;
        let result = self.drive_shared(input, output, stop_ts);
        output.close();
        if result.is_err() {
            input.close();
        }
        result.map(|()| diff(&self.stats, &before))
    }

    fn drive_shared(
        &mut self,
        input: &SharedFifo,
        output: &SharedFifo,
        stop_ts: u32,
    ) -> Result<()> {
        let emit = |spikes: Vec<AerPacket>| -> Result<()> {
            for s in spikes {
                if output.try_push(s).is_err() {
                    return Err(Error::OutputOverflow {
                        timestamp: s.timestamp,
                        capacity: output.capacity(),
                    });
                }
            }
            Ok(())
        };
        while let Some(p) = input.pop() {
            if p.timestamp >= stop_ts {
                return Err(Error::Packet(format!(
                    "packet {p:?} lies at or beyond stop timestamp {stop_ts}"
                )));
            }
            emit(self.process_packet(p)?)?;
        }
        emit(self.finish(stop_ts)?)
    }

    /// Runs a stream laid out on one timeline where sample `k` occupies
    /// `[k * sample_len, (k + 1) * sample_len)`. State is reset at every
    /// sample that has input; samples without packets are skipped.
    pub fn run_segmented<I>(&mut self, input: I, sample_len: u32) -> Result<RunOutput>
    where
        I: IntoIterator<Item = AerPacket>,
    {
        if sample_len == 0 {
            return Err(Error::Config("sample length must be positive".into()));
        }
        let before = self.stats;
        let mut spikes = Vec::new();
        let mut segment: Option<u32> = None;
        for p in input {
            let seg = p.timestamp / sample_len;
            if segment != Some(seg) {
                if let Some(s) = segment {
                    if seg < s {
                        return Err(Error::DecreasingTimestamp {
                            current: self.controller.current_timestamp,
                            got: p.timestamp,
                        });
                    }
                    spikes.extend(self.finish((s + 1) * sample_len)?);
                }
                self.reset_sample(seg * sample_len);
                segment = Some(seg);
            }
            spikes.extend(self.process_packet(p)?);
        }
        if let Some(s) = segment {
            spikes.extend(self.finish((s + 1) * sample_len)?);
        }
        Ok(RunOutput {
            spikes,
            stats: diff(&self.stats, &before),
        })
    }
}

fn diff(after: &RunStats, before: &RunStats) -> RunStats {
    RunStats {
        packets_in: after.packets_in - before.packets_in,
        packets_integrated: after.packets_integrated - before.packets_integrated,
        packets_dropped: after.packets_dropped - before.packets_dropped,
        packets_out: after.packets_out - before.packets_out,
        integrate_activations: after.integrate_activations - before.integrate_activations,
        leak_activations: after.leak_activations - before.leak_activations,
        fire_activations: after.fire_activations - before.fire_activations,
        idle_steps: after.idle_steps - before.idle_steps,
    }
}
