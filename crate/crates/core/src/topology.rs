//! Network construction and the time-multiplexed state store.
//!
//! The network is a single excitatory layer fully connected to the inputs.
//! Each excitatory neuron drives one inhibitory relay that inhibits every
//! other excitatory neuron. The relays are not simulated: a spike from
//! neuron `j` queues `w_inh` of inhibition on every `k != j`, which the next
//! leak phase subtracts.
//!
//! Checkpoint layout (all integers little-endian):
//!
//! ```text
//! "AERN" | version u16 | mode u8 | n_input u32 | n_exc u32
//!        | state Q (int u8, frac u8) | weight Q (int u8, frac u8)
//!        | config hash u64 | seed u64 | samples seen u64
//! weights   n_input * n_exc values, input-major
//! voltages  n_exc values
//! exc trace n_exc values
//! in trace  n_input values
//! pending   n_exc values
//! ```
//!
//! Values are `f64` bit patterns in float mode and `i32` mantissas in fixed
//! mode.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Lif, LifParams, NeuronState, Trace, TraceParams};
use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, Domain, Numeric, NumericMode, QFormat};
use crate::plasticity::{Stdp, StdpParams};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"AERN";
pub const CHECKPOINT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 4 + 4 + 2 + 2 + 8 + 8 + 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyParams {
    pub n_input: usize,
    pub n_exc: usize,
    /// Magnitude of the inhibition one spike imposes on each competitor.
    pub w_inh: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            n_input: 784,
            n_exc: 100,
            w_inh: 0.15,
        }
    }
}

impl TopologyParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_input == 0 || self.n_exc == 0 {
            return Err(Error::Config(format!(
                "topology needs at least one input and one excitatory neuron (n_input={}, n_exc={})",
                self.n_input, self.n_exc
            )));
        }
        let limit = usize::from(u16::MAX) + 1;
        if self.n_input > limit || self.n_exc > limit {
            return Err(Error::Config(format!(
                "neuron ids are 16-bit: n_input and n_exc must be <= {limit}"
            )));
        }
        if !(self.w_inh >= 0.0) {
            return Err(Error::Config(format!(
                "topology.w_inh must be non-negative (got {})",
                self.w_inh
            )));
        }
        Ok(())
    }
}

/// Every constant of the network model, in real units.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub topology: TopologyParams,
    pub lif: LifParams,
    pub trace: TraceParams,
    pub stdp: StdpParams,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.lif.validate()?;
        self.trace.validate(self.lif.dt)?;
        self.stdp.validate()
    }

    pub fn resolve<A: Arithmetic>(&self, arith: &A) -> Result<Resolved<A::Value>> {
        self.topology.validate()?;
        Ok(Resolved {
            lif: self.lif.resolve(arith)?,
            trace: self.trace.resolve(arith, self.lif.dt)?,
            stdp: self.stdp.resolve(arith)?,
            w_inh: arith.state(self.topology.w_inh),
            inh_zero: arith.accumulator(0.0),
        })
    }
}

/// [`NetworkParams`] converted into the active numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved<V> {
    pub lif: Lif<V>,
    pub trace: Trace<V>,
    pub stdp: Stdp<V>,
    pub w_inh: V,
    /// Empty pending-inhibition accumulator.
    pub inh_zero: V,
}

/// Dense `n_input x n_exc` weights, stored input-major so that one input's
/// fan-out is contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct SynapseMatrix<V> {
    n_input: usize,
    n_exc: usize,
    w: Vec<V>,
}

impl<V: Numeric> SynapseMatrix<V> {
    pub fn from_vec(n_input: usize, n_exc: usize, w: Vec<V>) -> Result<Self> {
        if w.len() != n_input * n_exc {
            return Err(Error::Config(format!(
                "weight matrix needs {} entries, got {}",
                n_input * n_exc,
                w.len()
            )));
        }
        Ok(SynapseMatrix { n_input, n_exc, w })
    }

    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn n_exc(&self) -> usize {
        self.n_exc
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    #[inline]
    pub fn get(&self, input: usize, exc: usize) -> V {
        self.w[input * self.n_exc + exc]
    }

    #[inline]
    pub fn set(&mut self, input: usize, exc: usize, value: V) {
        self.w[input * self.n_exc + exc] = value;
    }

    /// Fan-out of one input neuron.
    #[inline]
    pub fn row(&self, input: usize) -> &[V] {
        &self.w[input * self.n_exc..(input + 1) * self.n_exc]
    }

    #[inline]
    pub fn row_mut(&mut self, input: usize) -> &mut [V] {
        &mut self.w[input * self.n_exc..(input + 1) * self.n_exc]
    }

    pub fn as_slice(&self) -> &[V] {
        &self.w
    }

    pub fn as_mut_slice(&mut self) -> &mut [V] {
        &mut self.w
    }
}

/// All neuron and synapse state of one network instance.
#[derive(Clone, Debug, PartialEq)]
pub struct StateStore<V> {
    pub exc: Vec<NeuronState<V>>,
    pub input_traces: Vec<V>,
    pub weights: SynapseMatrix<V>,
    pub pending_inhibition: Vec<V>,
}

impl<V: Numeric> StateStore<V> {
    pub fn n_input(&self) -> usize {
        self.input_traces.len()
    }

    pub fn n_exc(&self) -> usize {
        self.exc.len()
    }

    /// A store at rest around the given weights.
    pub fn with_weights(weights: SynapseMatrix<V>, res: &Resolved<V>) -> Self {
        let rest = NeuronState::at_rest(&res.lif, &res.trace);
        StateStore {
            exc: vec![rest; weights.n_exc()],
            input_traces: vec![res.trace.zero; weights.n_input()],
            pending_inhibition: vec![res.inh_zero; weights.n_exc()],
            weights,
        }
    }
}

/// Builds a network with seeded uniform weights in the middle 60% of
/// `[w_min, w_max]` and every neuron at rest.
pub fn build_network<A: Arithmetic>(
    arith: &A,
    params: &NetworkParams,
    seed: u64,
) -> Result<StateStore<A::Value>> {
    params.validate()?;
    let res = params.resolve(arith)?;
    let TopologyParams { n_input, n_exc, .. } = params.topology;
    let StdpParams { w_min, w_max, .. } = params.stdp;
    let lo = w_min + 0.2 * (w_max - w_min);
    let hi = w_min + 0.8 * (w_max - w_min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n_input * n_exc)
        .map(|_| arith.weight(rng.gen_range(lo..hi)))
        .collect();
    let weights = SynapseMatrix::from_vec(n_input, n_exc, w)?;
    Ok(StateStore::with_weights(weights, &res))
}

/// Adds `w_inh` to the pending inhibition of every neuron except the one
/// that fired, for each fired neuron in the order given.
pub fn queue_inhibition<V: Numeric>(store: &mut StateStore<V>, fired: &[usize], w_inh: V) {
    for &j in fired {
        for (k, p) in store.pending_inhibition.iter_mut().enumerate() {
            if k != j {
                *p = p.add(w_inh);
            }
        }
    }
}

/// Returns every neuron to rest and clears traces and inhibition. Weights
/// are the only state carried across samples.
pub fn reset_for_sample<V: Numeric>(store: &mut StateStore<V>, res: &Resolved<V>) {
    let rest = NeuronState::at_rest(&res.lif, &res.trace);
    store.exc.fill(rest);
    store.input_traces.fill(res.trace.zero);
    store.pending_inhibition.fill(res.inh_zero);
}

/// Header fields of a checkpoint besides the array sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointMeta {
    pub mode: NumericMode,
    pub state_format: QFormat,
    pub weight_format: QFormat,
    pub config_hash: u64,
    pub seed: u64,
    pub samples_seen: u64,
}

pub fn encode_checkpoint<A: Arithmetic>(
    arith: &A,
    store: &StateStore<A::Value>,
    config_hash: u64,
    seed: u64,
    samples_seen: u64,
) -> Vec<u8> {
    let (state_format, weight_format) = arith.formats();
    let n_values = store.weights.len() + 3 * store.n_exc() + store.n_input();
    let mut out = Vec::with_capacity(HEADER_LEN + n_values * A::VALUE_BYTES);
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.push(arith.mode().code());
    out.extend_from_slice(&(store.n_input() as u32).to_le_bytes());
    out.extend_from_slice(&(store.n_exc() as u32).to_le_bytes());
    out.extend_from_slice(&[
        state_format.int_bits(),
        state_format.frac_bits(),
        weight_format.int_bits(),
        weight_format.frac_bits(),
    ]);
    out.extend_from_slice(&config_hash.to_le_bytes());
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend_from_slice(&samples_seen.to_le_bytes());
    for &w in store.weights.as_slice() {
        arith.write_value(w, &mut out);
    }
    for s in &store.exc {
        arith.write_value(s.v, &mut out);
    }
    for s in &store.exc {
        arith.write_value(s.x, &mut out);
    }
    for &x in &store.input_traces {
        arith.write_value(x, &mut out);
    }
    for &p in &store.pending_inhibition {
        arith.write_value(p, &mut out);
    }
    out
}

fn le_u16(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

fn le_u64(b: &[u8]) -> u64 {
    let mut a = [0u8; 8];
    a.copy_from_slice(&b[..8]);
    u64::from_le_bytes(a)
}

/// Reads only the header of a checkpoint: `(meta, n_input, n_exc)`.
pub fn peek_checkpoint(bytes: &[u8]) -> Result<(CheckpointMeta, usize, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Checkpoint(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic, expected \"AERN\"".into()));
    }
    let version = le_u16(&bytes[4..]);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version} (this build reads {CHECKPOINT_VERSION})"
        )));
    }
    let mode = NumericMode::from_code(bytes[6])
        .ok_or_else(|| Error::Checkpoint(format!("unknown numeric mode code {}", bytes[6])))?;
    let n_input = le_u32(&bytes[7..]) as usize;
    let n_exc = le_u32(&bytes[11..]) as usize;
    let state_format =
        QFormat::new(bytes[15], bytes[16]).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let weight_format =
        QFormat::new(bytes[17], bytes[18]).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let meta = CheckpointMeta {
        mode,
        state_format,
        weight_format,
        config_hash: le_u64(&bytes[19..]),
        seed: le_u64(&bytes[27..]),
        samples_seen: le_u64(&bytes[35..]),
    };
    Ok((meta, n_input, n_exc))
}

pub fn decode_checkpoint<A: Arithmetic>(
    arith: &A,
    bytes: &[u8],
) -> Result<(StateStore<A::Value>, CheckpointMeta)> {
    let (meta, n_input, n_exc) = peek_checkpoint(bytes)?;
    if meta.mode != arith.mode() {
        return Err(Error::Checkpoint(format!(
            "checkpoint was written in {} mode, run is configured for {}",
            meta.mode,
            arith.mode()
        )));
    }
    if meta.mode == NumericMode::Fixed && (meta.state_format, meta.weight_format) != arith.formats()
    {
        let (s, w) = arith.formats();
        return Err(Error::Checkpoint(format!(
            "checkpoint formats {}/{} differ from configured {s}/{w}",
            meta.state_format, meta.weight_format
        )));
    }
    let n_values = n_input * n_exc + 3 * n_exc + n_input;
    let expected = HEADER_LEN + n_values * A::VALUE_BYTES;
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "expected {expected} bytes for {n_input}x{n_exc}, found {}",
            bytes.len()
        )));
    }
    let width = A::VALUE_BYTES;
    let mut cursor = HEADER_LEN;
    let mut take = |n: usize, domain: Domain| -> Vec<A::Value> {
        let vals = (0..n)
            .map(|k| arith.read_value(&bytes[cursor + k * width..], domain))
            .collect();
        cursor += n * width;
        vals
    };
    let weights = take(n_input * n_exc, Domain::Weight);
    let v = take(n_exc, Domain::State);
    let x = take(n_exc, Domain::State);
    let input_traces = take(n_input, Domain::State);
    let pending_inhibition = take(n_exc, Domain::Accumulator);
    let store = StateStore {
        exc: v
            .into_iter()
            .zip(x)
            .map(|(v, x)| NeuronState { v, x })
            .collect(),
        input_traces,
        weights: SynapseMatrix::from_vec(n_input, n_exc, weights)?,
        pending_inhibition,
    };
    Ok((store, meta))
}

pub fn save_checkpoint<A: Arithmetic>(
    path: &Path,
    arith: &A,
    store: &StateStore<A::Value>,
    config_hash: u64,
    seed: u64,
    samples_seen: u64,
) -> Result<()> {
    let bytes = encode_checkpoint(arith, store, config_hash, seed, samples_seen);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<A: Arithmetic>(
    path: &Path,
    arith: &A,
) -> Result<(StateStore<A::Value>, CheckpointMeta)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(arith, &bytes)
}

/// SHA-256 of the serialized weights, as hex.
pub fn weight_digest<A: Arithmetic>(arith: &A, store: &StateStore<A::Value>) -> String {
    let mut buf = Vec::with_capacity(store.weights.len() * A::VALUE_BYTES);
    for &w in store.weights.as_slice() {
        arith.write_value(w, &mut buf);
    }
    Sha256::digest(&buf)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{FixedArith, FloatArith};
    use proptest::prelude::*;

    fn params(n_input: usize, n_exc: usize) -> NetworkParams {
        NetworkParams {
            topology: TopologyParams {
                n_input,
                n_exc,
                w_inh: 0.5,
            },
            ..NetworkParams::default()
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = build_network(&FloatArith::new(), &params(20, 7), 42).unwrap();
        let b = build_network(&FloatArith::new(), &params(20, 7), 42).unwrap();
        let c = build_network(&FloatArith::new(), &params(20, 7), 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn mnist_sized_network_has_dense_synapses() {
        let s = build_network(&FloatArith::new(), &params(784, 400), 1).unwrap();
        assert_eq!(s.weights.len(), 313_600);
        assert!(s
            .weights
            .as_slice()
            .iter()
            .all(|&w| (0.2..=0.8).contains(&w)));
        assert!(s.exc.iter().all(|n| n.v == 0.0 && n.x == 0.0));
        assert!(s.input_traces.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn init_range_follows_weight_bounds() {
        let mut p = params(30, 10);
        p.stdp.w_min = -1.0;
        p.stdp.w_max = 1.0;
        let s = build_network(&FloatArith::new(), &p, 9).unwrap();
        assert!(s
            .weights
            .as_slice()
            .iter()
            .all(|&w| (-0.6..=0.6).contains(&w)));
    }

    #[test]
    fn build_rejects_empty_layers() {
        assert!(build_network(&FloatArith::new(), &params(0, 3), 1).is_err());
        assert!(build_network(&FloatArith::new(), &params(3, 0), 1).is_err());
    }

    #[test]
    fn fixed_build_quantizes_float_build() {
        let p = params(10, 4);
        let f = build_network(&FloatArith::new(), &p, 5).unwrap();
        let q = build_network(&FixedArith::default(), &p, 5).unwrap();
        for (a, b) in f.weights.as_slice().iter().zip(q.weights.as_slice()) {
            assert!((a - b.to_real()).abs() <= QFormat::Q2_14.resolution() / 2.0);
        }
    }

    #[test]
    fn inhibition_examples() {
        let mut s = build_network(&FloatArith::new(), &params(2, 3), 0).unwrap();
        let before = s.clone();
        queue_inhibition(&mut s, &[], 0.5);
        assert_eq!(s, before);

        queue_inhibition(&mut s, &[1], 0.5);
        assert_eq!(s.pending_inhibition, vec![0.5, 0.0, 0.5]);

        let mut s = before.clone();
        queue_inhibition(&mut s, &[0, 1], 0.5);
        assert_eq!(s.pending_inhibition, vec![0.5, 0.5, 1.0]);
    }

    #[test]
    fn reset_keeps_only_weights() {
        let p = params(4, 3);
        let res = p.resolve(&FloatArith::new()).unwrap();
        let fresh = build_network(&FloatArith::new(), &p, 3).unwrap();
        let mut s = fresh.clone();
        reset_for_sample(&mut s, &res);
        assert_eq!(s, fresh);

        s.exc[1].v = 0.7;
        s.exc[2].x = 3.0;
        s.input_traces[0] = 1.0;
        s.pending_inhibition[0] = 0.5;
        s.weights.set(2, 1, 0.33);
        let weights = s.weights.clone();
        reset_for_sample(&mut s, &res);
        assert_eq!(s.exc[1].v, 0.0);
        assert_eq!(s.weights, weights);
        assert!(s.pending_inhibition.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn checkpoint_header_layout() {
        let arith = FixedArith::default();
        let s = build_network(&arith, &params(3, 2), 1).unwrap();
        let bytes = encode_checkpoint(&arith, &s, 0xAB, 7, 11);
        assert_eq!(&bytes[..4], b"AERN");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 1);
        assert_eq!(&bytes[7..11], &[3, 0, 0, 0]);
        assert_eq!(&bytes[11..15], &[2, 0, 0, 0]);
        assert_eq!(&bytes[15..19], &[8, 8, 2, 14]);
        assert_eq!(bytes.len(), HEADER_LEN + (6 + 6 + 3) * 4);
        // first weight mantissa follows the header
        let w0 = i32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap());
        assert_eq!(w0, s.weights.get(0, 0).raw());
    }

    #[test]
    fn checkpoint_rejects_mismatches() {
        let s = build_network(&FloatArith::new(), &params(3, 2), 1).unwrap();
        let bytes = encode_checkpoint(&FloatArith::new(), &s, 1, 2, 3);
        assert!(matches!(
            decode_checkpoint(&FixedArith::default(), &bytes),
            Err(Error::Checkpoint(_))
        ));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(decode_checkpoint(&FloatArith::new(), &bad).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_checkpoint(&FloatArith::new(), &bad).is_err());
        assert!(decode_checkpoint(&FloatArith::new(), &bytes[..bytes.len() - 1]).is_err());
        assert!(decode_checkpoint(&FloatArith::new(), &bytes[..10]).is_err());
    }

    proptest! {
        #[test]
        fn checkpoint_round_trips(seed in any::<u64>(), n_in in 1usize..12, n_exc in 1usize..6,
                                  v in -3.0f64..3.0, x in 0.0f64..10.0, fixed in any::<bool>()) {
            let p = params(n_in, n_exc);
            if fixed {
                let a = FixedArith::default();
                let mut s = build_network(&a, &p, seed).unwrap();
                s.exc[0].v = a.state(v);
                s.input_traces[n_in - 1] = a.state(x);
                let bytes = encode_checkpoint(&a, &s, seed ^ 1, seed, 5);
                let (back, meta) = decode_checkpoint(&a, &bytes).unwrap();
                prop_assert_eq!(back, s);
                prop_assert_eq!(meta.seed, seed);
            } else {
                let a = FloatArith::new();
                let mut s = build_network(&a, &p, seed).unwrap();
                s.exc[0].v = v;
                s.pending_inhibition[n_exc - 1] = x;
                let bytes = encode_checkpoint(&a, &s, 17, seed, 0);
                let (back, meta) = decode_checkpoint(&a, &bytes).unwrap();
                prop_assert_eq!(back, s);
                prop_assert_eq!(meta.config_hash, 17);
            }
        }

        #[test]
        fn inhibition_excludes_self(n in 1usize..8, j in 0usize..8, w in 0.0f64..2.0) {
            let j = j % n;
            let mut s = build_network(&FloatArith::new(), &params(1, n), 0).unwrap();
            s.pending_inhibition[j] = 0.125;
            queue_inhibition(&mut s, &[j], w);
            prop_assert_eq!(s.pending_inhibition[j], 0.125);
            prop_assert!(s.pending_inhibition.iter().all(|&p| p >= 0.0));
        }
    }
}
