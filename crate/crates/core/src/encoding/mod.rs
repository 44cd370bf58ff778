//! Rate coding of samples into AER spike streams.
//!
//! Every input neuron spikes independently at each timestep with probability
//! `feature * max_rate` (a Bernoulli discretisation of a Poisson process).
//! Streams are sorted by `(timestamp, neuron_id)`, which is what the engine
//! expects.

pub mod datasets;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::AerPacket;
use crate::error::{Error, Result};

pub use datasets::{
    load_ecg_beats, load_mnist, load_mnist_files, load_mnist_range, mnist_count, mnist_paths,
    MnistSplit, ECG_CLASSES, ECG_WIDTH,
};

/// Timesteps used for ECG beats.
pub const ECG_TIMESTEPS: u32 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub timesteps: u32,
    pub max_rate: f64,
    pub seed: u64,
}

impl EncoderParams {
    pub fn validate(&self) -> Result<()> {
        if self.timesteps == 0 {
            return Err(Error::Config("encoder.timesteps must be >= 1".into()));
        }
        if !(self.max_rate > 0.0 && self.max_rate <= 1.0) {
            return Err(Error::Config(format!(
                "encoder.max_rate must lie in (0, 1], got {}",
                self.max_rate
            )));
        }
        Ok(())
    }

    /// ECG defaults: 100 timesteps at full rate.
    pub fn ecg(seed: u64) -> Self {
        EncoderParams {
            timesteps: ECG_TIMESTEPS,
            max_rate: 1.0,
            seed,
        }
    }
}

/// A labelled input vector with features in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: usize,
}

/// Independent families of per-sample encoder seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Train { epoch: u32 },
    Label,
    Test,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Label => 1,
            Stream::Test => 2,
            Stream::Train { epoch } => 1 << 32 | u64::from(epoch),
        }
    }
}

/// Encoder settings shared by a run; every sample gets its own seed.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingPlan {
    pub timesteps: u32,
    pub max_rate: f64,
    pub seed: u64,
}

impl EncodingPlan {
    pub fn params(&self, stream: Stream, index: usize) -> EncoderParams {
        EncoderParams {
            timesteps: self.timesteps,
            max_rate: self.max_rate,
            seed: derive_seed(derive_seed(self.seed, stream.tag()), index as u64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params(Stream::Test, 0).validate()
    }
}

/// SplitMix64 finaliser; derives independent seeds from one root.
pub fn derive_seed(root: u64, tag: u64) -> u64 {
    let mut z = root ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn poisson_encode(s: &Sample, p: &EncoderParams) -> Result<Vec<AerPacket>> {
    p.validate()?;
    if s.features.len() > usize::from(u16::MAX) + 1 {
        return Err(Error::Encoding(format!(
            "{} features exceed the 16-bit neuron id space",
            s.features.len()
        )));
    }
    if let Some((i, f)) = s
        .features
        .iter()
        .enumerate()
        .find(|(_, f)| !(0.0..=1.0).contains(*f))
    {
        return Err(Error::Encoding(format!(
            "feature {i} = {f} lies outside [0, 1]"
        )));
    }
    let rates: Vec<(u16, f64)> = s
        .features
        .iter()
        .enumerate()
        .filter(|(_, &f)| f > 0.0)
        .map(|(i, &f)| (i as u16, f * p.max_rate))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Vec::new();
    for t in 0..p.timesteps {
        for &(i, rate) in &rates {
            if rng.gen::<f64>() < rate {
                out.push(AerPacket::new(i, t));
            }
        }
    }
    Ok(out)
}

/// ECG beats use the same mechanism; only the defaults differ.
pub fn rate_encode_ecg(s: &Sample, p: &EncoderParams) -> Result<Vec<AerPacket>> {
    poisson_encode(s, p)
}

/// Moves a stream `offset` timesteps later.
pub fn shift_packets(packets: &mut [AerPacket], offset: u32) {
    for p in packets {
        p.timestamp += offset;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(features: Vec<f64>) -> Sample {
        Sample { features, label: 0 }
    }

    fn params(timesteps: u32, max_rate: f64, seed: u64) -> EncoderParams {
        EncoderParams {
            timesteps,
            max_rate,
            seed,
        }
    }

    #[test]
    fn zero_features_are_silent() {
        let out = poisson_encode(&sample(vec![0.0; 50]), &params(100, 1.0, 3)).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn certain_rate_spikes_every_step() {
        let out = poisson_encode(&sample(vec![0.0, 1.0, 0.0]), &params(25, 1.0, 3)).unwrap();
        assert_eq!(out.len(), 25);
        assert!(out
            .iter()
            .enumerate()
            .all(|(t, p)| p.neuron_id == 1 && p.timestamp == t as u32));
    }

    #[test]
    fn spike_count_concentrates() {
        let out = poisson_encode(&sample(vec![0.5]), &params(10_000, 0.5, 11)).unwrap();
        let sigma = (10_000.0f64 * 0.25 * 0.75).sqrt();
        assert!(
            (out.len() as f64 - 2500.0).abs() <= 3.0 * sigma,
            "{}",
            out.len()
        );
    }

    #[test]
    fn sorted_and_deterministic() {
        let s = sample((0..40).map(|i| f64::from(i) / 40.0).collect());
        let a = poisson_encode(&s, &params(60, 0.3, 99)).unwrap();
        let b = poisson_encode(&s, &params(60, 0.3, 99)).unwrap();
        let c = poisson_encode(&s, &params(60, 0.3, 100)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .windows(2)
            .all(|w| (w[0].timestamp, w[0].neuron_id) < (w[1].timestamp, w[1].neuron_id)));
    }

    #[test]
    fn rejects_out_of_range_features() {
        assert!(poisson_encode(&sample(vec![1.5]), &params(5, 1.0, 0)).is_err());
        assert!(poisson_encode(&sample(vec![-0.1]), &params(5, 1.0, 0)).is_err());
        assert!(poisson_encode(&sample(vec![f64::NAN]), &params(5, 1.0, 0)).is_err());
        assert!(poisson_encode(&sample(vec![0.5]), &params(0, 1.0, 0)).is_err());
        assert!(poisson_encode(&sample(vec![0.5]), &params(5, 0.0, 0)).is_err());
    }

    #[test]
    fn ecg_defaults() {
        let p = EncoderParams::ecg(5);
        assert_eq!(p.timesteps, 100);
        let beat = sample(vec![0.0; ECG_WIDTH]);
        assert!(rate_encode_ecg(&beat, &p).unwrap().is_empty());
        let beat = sample((0..ECG_WIDTH).map(|i| (i % 7) as f64 / 6.0).collect());
        assert_eq!(
            rate_encode_ecg(&beat, &p).unwrap(),
            rate_encode_ecg(&beat, &p).unwrap()
        );
    }

    #[test]
    fn plan_streams_are_independent() {
        let plan = EncodingPlan {
            timesteps: 10,
            max_rate: 0.5,
            seed: 3,
        };
        let a = plan.params(Stream::Test, 0).seed;
        assert_ne!(a, plan.params(Stream::Test, 1).seed);
        assert_ne!(a, plan.params(Stream::Label, 0).seed);
        assert_ne!(
            plan.params(Stream::Train { epoch: 0 }, 0).seed,
            plan.params(Stream::Train { epoch: 1 }, 0).seed
        );
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, 0);
        assert_ne!(a, derive_seed(1, 1));
        assert_ne!(a, derive_seed(2, 0));
        assert_eq!(a, derive_seed(1, 0));
    }
}
