//! Software model of an online-learning spiking neuromorphic processor.
//!
//! The processor is event driven: spikes arrive as AER packets
//! `(neuron id, timestamp)`, flow through bounded FIFOs into a controller
//! that runs three handlers per timestep (integrate, leak, fire), and leave
//! as AER packets. A single excitatory layer with winner-take-all inhibition
//! learns online with trace-based STDP. All state can run in `f64` or in
//! saturating fixed point.
//!
//! Module map:
//!
//! * [`numerics`]: Q-format values, leak kernels, numeric modes
//! * [`dynamics`]: LIF neuron and trace state transitions
//! * [`plasticity`]: trace STDP and the pair-based reference window
//! * [`topology`]: network construction, state store, checkpoints
//! * [`engine`]: AER codec, FIFOs, controller and handlers
//! * [`encoding`]: Poisson rate coding, MNIST and ECG loaders
//! * [`evaluator`]: training loop, label assignment, metrics, sweeps
//! * [`reference`]: dense clock-driven oracle simulator
//! * [`config`] and [`cli`]: run configuration and the batch commands

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod encoding;
pub mod engine;
pub mod error;
pub mod evaluator;
pub mod numerics;
pub mod plasticity;
pub mod reference;
pub mod topology;

pub use engine::{AerPacket, Engine, EngineOptions, RunOutput, RunStats};
pub use error::{Error, Result};
pub use numerics::{Arithmetic, FixedArith, FloatArith, NumericMode, QFormat};
pub use topology::{build_network, NetworkParams, StateStore};
