//! Trace-based STDP.
//!
//! A presynaptic spike depresses the synapse by the postsynaptic trace
//! (`w -= alpha_post * x_post`), a postsynaptic spike potentiates it by the
//! presynaptic trace (`w += alpha_pre * x_pre`). Both results are clamped to
//! `[w_min, w_max]`.
//!
//! [`pair_stdp_delta`] is the classic all-pairs exponential window. It is kept
//! as a reference for testing the trace rule and is never used for learning;
//! [`trace_stdp_delta`] applies the trace rule to the same spike trains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, DecayParams, Numeric};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StdpParams {
    pub alpha_pre: f64,
    pub alpha_post: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for StdpParams {
    fn default() -> Self {
        StdpParams {
            alpha_pre: 0.01,
            alpha_post: 0.005,
            w_min: 0.0,
            w_max: 1.0,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_pre > 0.0 && self.alpha_post > 0.0) {
            return Err(Error::Config(format!(
                "stdp learning rates must be positive (alpha_pre={}, alpha_post={})",
                self.alpha_pre, self.alpha_post
            )));
        }
        if !(self.w_min < self.w_max) {
            return Err(Error::Config(format!(
                "stdp.w_min ({}) must be below stdp.w_max ({})",
                self.w_min, self.w_max
            )));
        }
        Ok(())
    }

    pub fn resolve<A: Arithmetic>(&self, arith: &A) -> Result<Stdp<A::Value>> {
        self.validate()?;
        Ok(Stdp {
            alpha_pre: arith.weight(self.alpha_pre),
            alpha_post: arith.weight(self.alpha_post),
            w_min: arith.weight(self.w_min),
            w_max: arith.weight(self.w_max),
        })
    }
}

/// [`StdpParams`] converted into the active numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Stdp<V> {
    pub alpha_pre: V,
    pub alpha_post: V,
    pub w_min: V,
    pub w_max: V,
}

/// Long-term depression, applied when the presynaptic neuron spikes.
#[inline]
pub fn ltd_on_pre<V: Numeric>(w: V, x_post: V, p: &Stdp<V>) -> V {
    w.sub(p.alpha_post.mul(x_post)).clamp_to(p.w_min, p.w_max)
}

/// Long-term potentiation, applied when the postsynaptic neuron spikes.
#[inline]
pub fn ltp_on_post<V: Numeric>(w: V, x_pre: V, p: &Stdp<V>) -> V {
    w.add(p.alpha_pre.mul(x_pre)).clamp_to(p.w_min, p.w_max)
}

/// Amplitudes and time constants of the pair-based window.
#[derive(Clone, Debug, PartialEq)]
pub struct PairStdpParams {
    pub a_pre: f64,
    pub a_post: f64,
    pub tau_pre: f64,
    pub tau_post: f64,
}

/// Strictly increasing spike times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpikeTrain {
    times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config(
                "spike train timestamps must be strictly increasing".into(),
            ));
        }
        Ok(SpikeTrain { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Total weight change over every `(pre, post)` spike pair.
///
/// Coincident pairs (`t_post == t_pre`) contribute nothing.
pub fn pair_stdp_delta(pre: &SpikeTrain, post: &SpikeTrain, p: &PairStdpParams) -> f64 {
    let mut delta = 0.0;
    for &t_pre in pre.times() {
        for &t_post in post.times() {
            let dt = t_post - t_pre;
            if dt > 0.0 {
                delta += p.a_pre * (-dt / p.tau_pre).exp();
            } else if dt < 0.0 {
                delta -= p.a_post * (dt / p.tau_post).exp();
            }
        }
    }
    delta
}

/// How traces fall between spikes in [`trace_stdp_delta`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceDecay {
    /// Closed form `x * exp(-t / tau)`.
    Exponential,
    /// One forward-Euler leak per tick of length `dt`; spike times must be
    /// whole multiples of `dt`.
    Iterative { dt: f64 },
}

fn decay_over(x: f64, t: f64, tau: f64, decay: TraceDecay) -> Result<f64> {
    match decay {
        TraceDecay::Exponential => Ok(x * (-t / tau).exp()),
        TraceDecay::Iterative { dt } => {
            let ticks = t / dt;
            if (ticks - ticks.round()).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "interval {t} is not a multiple of dt = {dt}"
                )));
            }
            let p = DecayParams::new(tau, dt)?;
            Ok((0..ticks.round() as u64).fold(x, |x, _| x.leak_decay(&p)))
        }
    }
}

/// Weight change of one unclamped synapse under the trace rule: unit bumps
/// with no ceiling, pre spikes read the post trace, post spikes read the
/// pre trace, and traces are read before the same-time bumps.
///
/// With [`TraceDecay::Exponential`] this equals [`pair_stdp_delta`].
pub fn trace_stdp_delta(
    pre: &SpikeTrain,
    post: &SpikeTrain,
    p: &PairStdpParams,
    decay: TraceDecay,
) -> Result<f64> {
    let (mut x_pre, mut x_post) = (0.0, 0.0);
    let (mut i, mut j) = (0, 0);
    let mut last = f64::NEG_INFINITY;
    let mut delta = 0.0;
    let (a, b) = (pre.times(), post.times());
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if last.is_finite() {
            x_pre = decay_over(x_pre, t - last, p.tau_pre, decay)?;
            x_post = decay_over(x_post, t - last, p.tau_post, decay)?;
        }
        last = t;
        let pre_fires = a.get(i) == Some(&t);
        let post_fires = b.get(j) == Some(&t);
        if pre_fires {
            delta -= p.a_post * x_post;
            i += 1;
        }
        if post_fires {
            delta += p.a_pre * x_pre;
            j += 1;
        }
        if pre_fires {
            x_pre += 1.0;
        }
        if post_fires {
            x_post += 1.0;
        }
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::FloatArith;
    use proptest::prelude::*;

    fn stdp(alpha_pre: f64, alpha_post: f64) -> Stdp<f64> {
        StdpParams {
            alpha_pre,
            alpha_post,
            w_min: 0.0,
            w_max: 1.0,
        }
        .resolve(&FloatArith::new())
        .unwrap()
    }

    fn pair(a: f64, tau: f64) -> PairStdpParams {
        PairStdpParams {
            a_pre: a,
            a_post: a,
            tau_pre: tau,
            tau_post: tau,
        }
    }

    #[test]
    fn ltd_examples() {
        let p = stdp(0.1, 0.1);
        assert_eq!(ltd_on_pre(0.5, 0.0, &p), 0.5);
        assert!((ltd_on_pre(0.5, 0.2, &p) - 0.48).abs() < 1e-15);
        assert_eq!(ltd_on_pre(0.0, 3.0, &p), 0.0);
    }

    #[test]
    fn ltp_examples() {
        let p = stdp(0.1, 0.1);
        assert_eq!(ltp_on_post(0.5, 0.0, &p), 0.5);
        assert!((ltp_on_post(0.5, 1.0, &p) - 0.6).abs() < 1e-15);
        assert_eq!(ltp_on_post(1.0, 3.0, &p), 1.0);
    }

    #[test]
    fn pair_examples() {
        let empty = SpikeTrain::default();
        let post = SpikeTrain::new(vec![10.0]).unwrap();
        assert_eq!(pair_stdp_delta(&empty, &post, &pair(0.01, 20.0)), 0.0);

        let pre = SpikeTrain::new(vec![0.0]).unwrap();
        let d = pair_stdp_delta(&pre, &post, &pair(0.01, 20.0));
        assert!((d - 0.0060653066).abs() < 1e-9, "{d}");

        let pre = SpikeTrain::new(vec![10.0]).unwrap();
        let post = SpikeTrain::new(vec![0.0]).unwrap();
        let d = pair_stdp_delta(&pre, &post, &pair(0.01, 20.0));
        assert!((d + 0.0060653066).abs() < 1e-9, "{d}");
    }

    #[test]
    fn coincident_pair_contributes_nothing() {
        let a = SpikeTrain::new(vec![3.0]).unwrap();
        assert_eq!(pair_stdp_delta(&a, &a, &pair(0.5, 4.0)), 0.0);
    }

    #[test]
    fn spike_train_rejects_unordered() {
        assert!(SpikeTrain::new(vec![1.0, 1.0]).is_err());
        assert!(SpikeTrain::new(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn trace_rule_examples() {
        let p = pair(0.01, 20.0);
        let pre = SpikeTrain::new(vec![0.0]).unwrap();
        let post = SpikeTrain::new(vec![10.0]).unwrap();
        let exp = trace_stdp_delta(&pre, &post, &p, TraceDecay::Exponential).unwrap();
        assert!((exp - 0.01 * (-0.5f64).exp()).abs() < 1e-15);
        let it = trace_stdp_delta(&pre, &post, &p, TraceDecay::Iterative { dt: 1.0 }).unwrap();
        assert!((it - 0.01 * 0.95f64.powi(10)).abs() < 1e-15);
        let odd = SpikeTrain::new(vec![0.5]).unwrap();
        assert!(trace_stdp_delta(&odd, &post, &p, TraceDecay::Iterative { dt: 1.0 }).is_err());
        assert_eq!(
            trace_stdp_delta(&pre, &pre, &p, TraceDecay::Exponential).unwrap(),
            0.0
        );
    }

    fn train(max: usize) -> impl Strategy<Value = SpikeTrain> {
        proptest::collection::btree_set(0u32..200, 0..max)
            .prop_map(|s| SpikeTrain::new(s.into_iter().map(f64::from).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn weights_stay_bounded(ops in proptest::collection::vec((any::<bool>(), 0.0f64..10.0), 0..300),
                                w0 in 0.0f64..=1.0) {
            let p = stdp(0.07, 0.05);
            let mut w = w0;
            for (pot, x) in ops {
                w = if pot { ltp_on_post(w, x, &p) } else { ltd_on_pre(w, x, &p) };
                prop_assert!((0.0..=1.0).contains(&w));
            }
        }

        #[test]
        fn updates_monotone_in_trace(w in 0.0f64..=1.0, a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let p = stdp(0.03, 0.02);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(ltp_on_post(w, lo, &p) <= ltp_on_post(w, hi, &p));
            prop_assert!(ltd_on_pre(w, lo, &p) >= ltd_on_pre(w, hi, &p));
        }

        #[test]
        fn trace_rule_equals_pair_window(pre in train(8), post in train(10)) {
            let p = PairStdpParams { a_pre: 0.02, a_post: 0.015, tau_pre: 15.0, tau_post: 25.0 };
            let a = pair_stdp_delta(&pre, &post, &p);
            let b = trace_stdp_delta(&pre, &post, &p, TraceDecay::Exponential).unwrap();
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        #[test]
        fn pair_delta_additive_over_post_partition(pre in train(8), post in train(10), split in 0usize..10) {
            let p = PairStdpParams { a_pre: 0.02, a_post: 0.015, tau_pre: 15.0, tau_post: 25.0 };
            let times = post.times();
            let k = split.min(times.len());
            let left = SpikeTrain::new(times[..k].to_vec()).unwrap();
            let right = SpikeTrain::new(times[k..].to_vec()).unwrap();
            let whole = pair_stdp_delta(&pre, &post, &p);
            let parts = pair_stdp_delta(&pre, &left, &p) + pair_stdp_delta(&pre, &right, &p);
            prop_assert!((whole - parts).abs() < 1e-12);
        }
    }
}
