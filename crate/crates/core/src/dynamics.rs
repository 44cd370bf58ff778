//! Leaky integrate-and-fire neurons and their activity traces.
//!
//! A neuron is a `(v, x)` pair. Input weights are summed into `v`, `v` leaks
//! toward rest once per timestep, and crossing the threshold (inclusive) fires
//! a spike, hard-resets `v` to rest and bumps the trace `x` by `alpha`, capped
//! at `x_max`. There is no refractory period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Arithmetic, DecayParams, Numeric};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    pub v_rest: f64,
    pub v_thresh: f64,
    pub tau_v: f64,
    pub dt: f64,
    /// Lower bound applied after inhibition. `None` means `-v_thresh`.
    pub v_floor: Option<f64>,
}

impl Default for LifParams {
    fn default() -> Self {
        LifParams {
            v_rest: 0.0,
            v_thresh: 1.0,
            tau_v: 100.0,
            dt: 1.0,
            v_floor: None,
        }
    }
}

impl LifParams {
    pub fn floor(&self) -> f64 {
        self.v_floor.unwrap_or(-self.v_thresh)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_thresh > self.v_rest) {
            return Err(Error::Config(format!(
                "lif.v_thresh ({}) must exceed lif.v_rest ({})",
                self.v_thresh, self.v_rest
            )));
        }
        if !(self.floor() <= self.v_rest) {
            return Err(Error::Config(format!(
                "lif.v_floor ({}) must not exceed lif.v_rest ({})",
                self.floor(),
                self.v_rest
            )));
        }
        DecayParams::new(self.tau_v, self.dt).map(|_| ())
    }

    pub fn resolve<A: Arithmetic>(&self, arith: &A) -> Result<Lif<A::Value>> {
        self.validate()?;
        Ok(Lif {
            v_rest: arith.state(self.v_rest),
            v_thresh: arith.state(self.v_thresh),
            v_floor: arith.state(self.floor()),
            decay: DecayParams::new(self.tau_v, self.dt)?,
        })
    }
}

/// [`LifParams`] converted into the active numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Lif<V> {
    pub v_rest: V,
    pub v_thresh: V,
    pub v_floor: V,
    pub decay: DecayParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub tau_x: f64,
    pub alpha: f64,
    pub x_max: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            tau_x: 20.0,
            alpha: 1.0,
            x_max: 10.0,
        }
    }
}

impl TraceParams {
    pub fn validate(&self, dt: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.x_max >= self.alpha) {
            return Err(Error::Config(format!(
                "trace needs alpha > 0 and x_max >= alpha (alpha={}, x_max={})",
                self.alpha, self.x_max
            )));
        }
        DecayParams::new(self.tau_x, dt).map(|_| ())
    }

    pub fn resolve<A: Arithmetic>(&self, arith: &A, dt: f64) -> Result<Trace<A::Value>> {
        self.validate(dt)?;
        Ok(Trace {
            alpha: arith.state(self.alpha),
            x_max: arith.state(self.x_max),
            zero: arith.state(0.0),
            decay: DecayParams::new(self.tau_x, dt)?,
        })
    }
}

/// [`TraceParams`] converted into the active numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<V> {
    pub alpha: V,
    pub x_max: V,
    pub zero: V,
    pub decay: DecayParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronState<V> {
    pub v: V,
    pub x: V,
}

impl<V: Numeric> NeuronState<V> {
    pub fn at_rest(lif: &Lif<V>, trace: &Trace<V>) -> Self {
        NeuronState {
            v: lif.v_rest,
            x: trace.zero,
        }
    }
}

/// Adds one input activation. No clamping at threshold; firing is decided by
/// [`fire_check`].
#[inline]
pub fn integrate<V: Numeric>(s: NeuronState<V>, weight: V) -> NeuronState<V> {
    NeuronState {
        v: s.v.add(weight),
        x: s.x,
    }
}

#[inline]
pub fn leak_state<V: Numeric>(s: NeuronState<V>, lif: &Lif<V>, trace: &Trace<V>) -> NeuronState<V> {
    NeuronState {
        v: s.v.leak_toward(lif.v_rest, &lif.decay),
        x: s.x.leak_decay(&trace.decay),
    }
}

#[inline]
pub fn fire_check<V: Numeric>(
    s: NeuronState<V>,
    lif: &Lif<V>,
    trace: &Trace<V>,
) -> (NeuronState<V>, bool) {
    if s.v >= lif.v_thresh {
        let fired = NeuronState {
            v: lif.v_rest,
            x: bump_trace(s.x, trace),
        };
        (fired, true)
    } else {
        (s, false)
    }
}

#[inline]
pub fn bump_trace<V: Numeric>(x: V, trace: &Trace<V>) -> V {
    x.add(trace.alpha).min_of(trace.x_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{to_real, FixedArith, FloatArith};
    use proptest::prelude::*;

    fn lif(v_thresh: f64, tau_v: f64) -> Lif<f64> {
        LifParams {
            v_thresh,
            tau_v,
            ..LifParams::default()
        }
        .resolve(&FloatArith::new())
        .unwrap()
    }

    fn trace(tau_x: f64, alpha: f64, x_max: f64) -> Trace<f64> {
        TraceParams {
            tau_x,
            alpha,
            x_max,
        }
        .resolve(&FloatArith::new(), 1.0)
        .unwrap()
    }

    #[test]
    fn integrate_sums_activations() {
        let s = NeuronState { v: 0.0, x: 0.25 };
        assert_eq!(integrate(s, 0.0), s);
        let s2 = integrate(integrate(s, 0.3), 0.4);
        assert!((s2.v - 0.7).abs() < 1e-12);
        assert_eq!(s2.x, 0.25);
        let over = integrate(NeuronState { v: 0.9, x: 0.0 }, 0.3);
        assert!((over.v - 1.2).abs() < 1e-12);
    }

    #[test]
    fn leak_state_examples() {
        let l = lif(1.0, 100.0);
        let t = trace(4.0, 1.0, 10.0);
        let rest = NeuronState { v: 0.0, x: 0.0 };
        assert_eq!(leak_state(rest, &l, &t), rest);

        let s = leak_state(NeuronState { v: 1.0, x: 8.0 }, &l, &t);
        assert!((s.v - 0.99).abs() < 1e-15);
        assert_eq!(s.x, 6.0);

        let mut s = NeuronState { v: 1.0, x: 0.0 };
        for _ in 0..100 {
            s = leak_state(s, &l, &t);
        }
        let e = (-1.0f64).exp();
        assert!(s.v >= e - 0.05 && s.v <= e + 0.05, "v = {}", s.v);
    }

    #[test]
    fn fire_check_examples() {
        let l = lif(1.0, 100.0);
        let t = trace(20.0, 1.0, 10.0);

        let below = NeuronState {
            v: 1.0 - 1e-9,
            x: 0.5,
        };
        assert_eq!(fire_check(below, &l, &t), (below, false));

        let (s, spiked) = fire_check(NeuronState { v: 1.2, x: 0.5 }, &l, &t);
        assert!(spiked);
        assert_eq!(s, NeuronState { v: 0.0, x: 1.5 });

        let (s, spiked) = fire_check(NeuronState { v: 1.0, x: 0.0 }, &l, &t);
        assert!(spiked, "threshold is inclusive");
        assert_eq!(s.v, 0.0);
    }

    #[test]
    fn fire_check_inclusive_in_fixed_mode() {
        let arith = FixedArith::default();
        let l = LifParams::default().resolve(&arith).unwrap();
        let t = TraceParams::default().resolve(&arith, 1.0).unwrap();
        let s = NeuronState {
            v: l.v_thresh,
            x: t.zero,
        };
        let (after, spiked) = fire_check(s, &l, &t);
        assert!(spiked);
        assert_eq!(after.v, l.v_rest);
        assert_eq!(to_real(after.x), 1.0);
    }

    #[test]
    fn bump_trace_examples() {
        let t = trace(2.0, 1.0, 10.0);
        assert_eq!(bump_trace(0.0, &t), 1.0);
        assert_eq!(bump_trace(9.5, &t), 10.0);

        let l = lif(1.0, 100.0);
        let x = bump_trace(bump_trace(0.0, &t), &t);
        assert_eq!(x, 2.0);
        let s = leak_state(NeuronState { v: 0.0, x }, &l, &t);
        assert_eq!(s.x, 1.0);
    }

    #[test]
    fn params_validation() {
        let bad = LifParams {
            v_rest: 1.0,
            v_thresh: 1.0,
            ..LifParams::default()
        };
        assert!(bad.validate().is_err());
        let bad_floor = LifParams {
            v_floor: Some(0.5),
            ..LifParams::default()
        };
        assert!(bad_floor.validate().is_err());
        let bad_trace = TraceParams {
            tau_x: 5.0,
            alpha: 2.0,
            x_max: 1.0,
        };
        assert!(bad_trace.validate(1.0).is_err());
    }

    #[derive(Clone, Debug)]
    enum Op {
        Bump,
        Leak,
        Fire(f64),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            Just(Op::Bump),
            Just(Op::Leak),
            (0.0f64..3.0).prop_map(Op::Fire),
        ]
    }

    proptest! {
        #[test]
        fn trace_stays_in_bounds(ops in proptest::collection::vec(op(), 0..200),
                                 alpha in 0.1f64..3.0, tau_x in 1.5f64..60.0) {
            let l = lif(1.0, 50.0);
            let t = trace(tau_x, alpha, 10.0);
            let mut s = NeuronState { v: 0.0, x: 0.0 };
            for o in ops {
                match o {
                    Op::Bump => s.x = bump_trace(s.x, &t),
                    Op::Leak => s = leak_state(s, &l, &t),
                    Op::Fire(v) => {
                        s.v = v;
                        let (next, spiked) = fire_check(s, &l, &t);
                        if spiked {
                            prop_assert_eq!(next.v, l.v_rest);
                        }
                        s = next;
                    }
                }
                prop_assert!(s.x >= 0.0 && s.x <= 10.0);
            }
        }

        #[test]
        fn fire_check_idempotent_without_spike(v in -2.0f64..0.999, x in 0.0f64..10.0) {
            let l = lif(1.0, 50.0);
            let t = trace(10.0, 1.0, 10.0);
            let s = NeuronState { v, x };
            let (once, spiked) = fire_check(s, &l, &t);
            prop_assert!(!spiked);
            prop_assert_eq!(fire_check(once, &l, &t), (once, false));
        }

        #[test]
        fn leak_moves_voltage_toward_rest(v in -5.0f64..5.0, tau_v in 1.5f64..300.0) {
            prop_assume!(v.abs() > 1e-9);
            let l = lif(10.0, tau_v);
            let t = trace(10.0, 1.0, 10.0);
            let s = leak_state(NeuronState { v, x: 0.0 }, &l, &t);
            prop_assert!((s.v - l.v_rest).abs() < (v - l.v_rest).abs());
        }
    }
}
