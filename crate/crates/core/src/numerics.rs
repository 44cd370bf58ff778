//! Fixed-point values and the discrete leak kernels.
//!
//! Two numeric modes share one interface. [`FloatArith`] runs everything in
//! `f64` and is the reference; [`FixedArith`] models the hardware datapath with
//! saturating Q-format integers, where division by a time constant is a
//! multiplication by a precomputed reciprocal and products truncate toward
//! zero.
//!
//! Both leak kernels are single-step forward-Euler updates:
//!
//! ```text
//! x' = x - dt * x / tau
//! v' = v - dt * (v - rest) / tau
//! ```

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional bits of the decay coefficient `dt / tau` in fixed mode.
pub const COEFF_FRAC_BITS: u8 = 16;

/// Layout of a signed fixed-point number: `int_bits` (sign included) plus
/// `frac_bits`, at most 32 bits in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QFormat {
    int_bits: u8,
    frac_bits: u8,
}

impl QFormat {
    /// Default format for voltages and traces.
    pub const Q8_8: QFormat = QFormat {
        int_bits: 8,
        frac_bits: 8,
    };
    /// Default format for synaptic weights and learning rates.
    pub const Q2_14: QFormat = QFormat {
        int_bits: 2,
        frac_bits: 14,
    };
    /// Format of the decay coefficient.
    pub const COEFF: QFormat = QFormat {
        int_bits: 16,
        frac_bits: COEFF_FRAC_BITS,
    };

    pub fn new(int_bits: u8, frac_bits: u8) -> Result<Self> {
        if int_bits < 1 || u32::from(int_bits) + u32::from(frac_bits) > 32 {
            return Err(Error::Config(format!(
                "Q{int_bits}.{frac_bits}: need int_bits >= 1 and int_bits + frac_bits <= 32"
            )));
        }
        Ok(QFormat {
            int_bits,
            frac_bits,
        })
    }

    pub fn int_bits(self) -> u8 {
        self.int_bits
    }

    pub fn frac_bits(self) -> u8 {
        self.frac_bits
    }

    pub fn total_bits(self) -> u32 {
        u32::from(self.int_bits) + u32::from(self.frac_bits)
    }

    pub fn max_raw(self) -> i32 {
        ((1i64 << (self.total_bits() - 1)) - 1) as i32
    }

    pub fn min_raw(self) -> i32 {
        (-(1i64 << (self.total_bits() - 1))) as i32
    }

    /// Value of one least-significant bit.
    pub fn resolution(self) -> f64 {
        (-f64::from(self.frac_bits)).exp2()
    }

    pub fn max_value(self) -> f64 {
        f64::from(self.max_raw()) * self.resolution()
    }

    pub fn min_value(self) -> f64 {
        f64::from(self.min_raw()) * self.resolution()
    }

    fn saturate(self, raw: i64) -> i32 {
        raw.clamp(i64::from(self.min_raw()), i64::from(self.max_raw())) as i32
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.int_bits, self.frac_bits)
    }
}

/// A saturating fixed-point number. Real value is `raw * 2^-frac_bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fixed {
    raw: i32,
    format: QFormat,
}

impl Fixed {
    /// Builds a value from a raw mantissa, saturating it into the format.
    pub fn from_raw(raw: i64, format: QFormat) -> Self {
        Fixed {
            raw: format.saturate(raw),
            format,
        }
    }

    pub fn zero(format: QFormat) -> Self {
        Fixed { raw: 0, format }
    }

    pub fn raw(self) -> i32 {
        self.raw
    }

    pub fn format(self) -> QFormat {
        self.format
    }

    /// The raw mantissa rescaled to `frac_bits` without saturating.
    fn raw_in(self, frac_bits: u8) -> i64 {
        let raw = i64::from(self.raw);
        match frac_bits.cmp(&self.format.frac_bits) {
            Ordering::Equal => raw,
            Ordering::Greater => raw << (frac_bits - self.format.frac_bits),
            Ordering::Less => {
                let div = 1i64 << (self.format.frac_bits - frac_bits);
                let q = (raw.abs() + div / 2) / div;
                if raw < 0 {
                    -q
                } else {
                    q
                }
            }
        }
    }

    /// Re-expresses the value in another format. Dropped fractional bits
    /// round to nearest, ties away from zero; out-of-range values saturate.
    pub fn convert(self, to: QFormat) -> Fixed {
        Fixed::from_raw(self.raw_in(to.frac_bits), to)
    }

    pub fn saturating_add(self, rhs: Fixed) -> Fixed {
        let rhs = rhs.convert(self.format);
        Fixed::from_raw(i64::from(self.raw) + i64::from(rhs.raw), self.format)
    }

    pub fn saturating_sub(self, rhs: Fixed) -> Fixed {
        let rhs = rhs.convert(self.format);
        Fixed::from_raw(i64::from(self.raw) - i64::from(rhs.raw), self.format)
    }

    /// Product expressed in `self`'s format, truncated toward zero.
    pub fn saturating_mul(self, rhs: Fixed) -> Fixed {
        let wide = i64::from(self.raw) * i64::from(rhs.raw);
        Fixed::from_raw(wide / (1i64 << rhs.format.frac_bits), self.format)
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}|{})", to_real(*self), self.raw, self.format)
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.format.frac_bits == other.format.frac_bits {
            Some(self.raw.cmp(&other.raw))
        } else {
            to_real(*self).partial_cmp(&to_real(*other))
        }
    }
}

/// Converts a real to fixed point: round to nearest (ties away from zero),
/// then saturate. NaN maps to zero.
pub fn to_fixed(r: f64, format: QFormat) -> Fixed {
    if r.is_nan() {
        return Fixed::zero(format);
    }
    let scaled = (r * f64::from(format.frac_bits).exp2()).round();
    let raw = if scaled >= i64::MAX as f64 {
        i64::MAX
    } else if scaled <= i64::MIN as f64 {
        i64::MIN
    } else {
        scaled as i64
    };
    Fixed::from_raw(raw, format)
}

pub fn to_real(x: Fixed) -> f64 {
    f64::from(x.raw) * x.format.resolution()
}

/// Time constant and tick of one leak kernel.
///
/// The fixed-point reciprocal `dt / tau` is computed once at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayParams {
    tau: f64,
    dt: f64,
    coeff: Fixed,
}

impl DecayParams {
    pub fn new(tau: f64, dt: f64) -> Result<Self> {
        if !(tau > 0.0 && dt > 0.0 && dt / tau < 1.0) {
            return Err(Error::Config(format!(
                "decay needs tau > 0, dt > 0 and dt/tau < 1 (tau={tau}, dt={dt})"
            )));
        }
        Ok(DecayParams {
            tau,
            dt,
            coeff: to_fixed(dt / tau, QFormat::COEFF),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `dt / tau` as the fixed-point multiplier used by the hardware datapath.
    pub fn coefficient(&self) -> Fixed {
        self.coeff
    }
}

/// Scalar arithmetic shared by both numeric modes.
pub trait Numeric: Copy + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// Sum, expressed in `self`'s domain.
    fn add(self, rhs: Self) -> Self;
    /// Difference, expressed in `self`'s domain.
    fn sub(self, rhs: Self) -> Self;
    /// Product, expressed in `self`'s domain.
    fn mul(self, rhs: Self) -> Self;
    fn to_real(self) -> f64;
    /// One step of `x - dt * x / tau`.
    fn leak_decay(self, p: &DecayParams) -> Self;
    /// One step of `v - dt * (v - rest) / tau`.
    fn leak_toward(self, rest: Self, p: &DecayParams) -> Self;

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn clamp_to(self, lo: Self, hi: Self) -> Self {
        self.max_of(lo).min_of(hi)
    }

    /// `max(self - rhs, floor)` in `self`'s domain, with no intermediate
    /// saturation when `rhs` is wider than `self`.
    fn sub_floored(self, rhs: Self, floor: Self) -> Self {
        self.sub(rhs).max_of(floor)
    }
}

impl Numeric for f64 {
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }

    #[inline]
    fn to_real(self) -> f64 {
        self
    }

    #[inline]
    fn leak_decay(self, p: &DecayParams) -> Self {
        self - p.dt * self / p.tau
    }

    #[inline]
    fn leak_toward(self, rest: Self, p: &DecayParams) -> Self {
        self - p.dt * (self - rest) / p.tau
    }
}

impl Numeric for Fixed {
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.saturating_add(rhs)
    }

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.saturating_sub(rhs)
    }

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.saturating_mul(rhs)
    }

    #[inline]
    fn to_real(self) -> f64 {
        to_real(self)
    }

    #[inline]
    fn leak_decay(self, p: &DecayParams) -> Self {
        self.saturating_sub(self.saturating_mul(p.coeff))
    }

    fn sub_floored(self, rhs: Self, floor: Self) -> Self {
        let diff = i64::from(self.raw) - rhs.raw_in(self.format.frac_bits);
        let floor = floor.raw_in(self.format.frac_bits);
        Fixed::from_raw(diff.max(floor), self.format)
    }

    #[inline]
    fn leak_toward(self, rest: Self, p: &DecayParams) -> Self {
        let excess = self.saturating_sub(rest);
        self.saturating_sub(excess.saturating_mul(p.coeff))
    }
}

pub fn leak_decay<V: Numeric>(x: V, p: &DecayParams) -> V {
    x.leak_decay(p)
}

pub fn leak_toward<V: Numeric>(v: V, rest: V, p: &DecayParams) -> V {
    v.leak_toward(rest, p)
}

/// Continuous decay `x0 * exp(-t / tau)`; the ground truth the iterative
/// kernels approximate.
pub fn exp_decay_reference(x0: f64, t: f64, tau: f64) -> f64 {
    x0 * (-t / tau).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Float,
    Fixed,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Float => "float",
            NumericMode::Fixed => "fixed",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            NumericMode::Float => 0,
            NumericMode::Fixed => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(NumericMode::Float),
            1 => Some(NumericMode::Fixed),
            _ => None,
        }
    }
}

impl std::str::FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(NumericMode::Float),
            "fixed" => Ok(NumericMode::Fixed),
            other => Err(Error::Config(format!(
                "unknown numeric mode `{other}` (expected float or fixed)"
            ))),
        }
    }
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which storage format a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Voltages, traces and inhibition strength.
    State,
    /// Synaptic weights and learning rates.
    Weight,
    /// Queued inhibition. Same resolution as `State` but 32 bits wide, so
    /// fan-in from many simultaneous spikes does not saturate.
    Accumulator,
}

/// A numeric mode: how reals become values and how values are stored.
pub trait Arithmetic: Clone + fmt::Debug + Send + Sync + 'static {
    type Value: Numeric;

    /// Bytes per value in checkpoint files.
    const VALUE_BYTES: usize;

    fn mode(&self) -> NumericMode;

    /// Formats recorded in checkpoints as `(state, weight)`.
    fn formats(&self) -> (QFormat, QFormat);

    fn value(&self, r: f64, domain: Domain) -> Self::Value;

    fn state(&self, r: f64) -> Self::Value {
        self.value(r, Domain::State)
    }

    fn weight(&self, r: f64) -> Self::Value {
        self.value(r, Domain::Weight)
    }

    fn accumulator(&self, r: f64) -> Self::Value {
        self.value(r, Domain::Accumulator)
    }

    fn write_value(&self, v: Self::Value, out: &mut Vec<u8>);

    fn read_value(&self, bytes: &[u8], domain: Domain) -> Self::Value;
}

/// `f64` reference arithmetic.
#[derive(Clone, Debug, Default)]
pub struct FloatArith {
    formats: Option<(QFormat, QFormat)>,
}

impl FloatArith {
    pub fn new() -> Self {
        FloatArith::default()
    }

    /// Float arithmetic that still records the configured Q-formats in
    /// checkpoints.
    pub fn with_formats(state: QFormat, weight: QFormat) -> Self {
        FloatArith {
            formats: Some((state, weight)),
        }
    }
}

impl Arithmetic for FloatArith {
    type Value = f64;
    const VALUE_BYTES: usize = 8;

    fn mode(&self) -> NumericMode {
        NumericMode::Float
    }

    fn formats(&self) -> (QFormat, QFormat) {
        self.formats.unwrap_or((QFormat::Q8_8, QFormat::Q2_14))
    }

    #[inline]
    fn value(&self, r: f64, _domain: Domain) -> f64 {
        r
    }

    fn write_value(&self, v: f64, out: &mut Vec<u8>) {
        out.extend_from_slice(&v.to_bits().to_le_bytes());
    }

    fn read_value(&self, bytes: &[u8], _domain: Domain) -> f64 {
        let mut b = [0u8; 8];
        b.copy_from_slice(&bytes[..8]);
        f64::from_bits(u64::from_le_bytes(b))
    }
}

/// Saturating fixed-point arithmetic with separate state and weight formats.
#[derive(Clone, Debug)]
pub struct FixedArith {
    state: QFormat,
    weight: QFormat,
}

impl FixedArith {
    pub fn new(state: QFormat, weight: QFormat) -> Self {
        FixedArith { state, weight }
    }

    fn format(&self, domain: Domain) -> QFormat {
        match domain {
            Domain::State => self.state,
            Domain::Weight => self.weight,
            Domain::Accumulator => QFormat {
                int_bits: 32 - self.state.frac_bits,
                frac_bits: self.state.frac_bits,
            },
        }
    }
}

impl Default for FixedArith {
    fn default() -> Self {
        FixedArith::new(QFormat::Q8_8, QFormat::Q2_14)
    }
}

impl Arithmetic for FixedArith {
    type Value = Fixed;
    const VALUE_BYTES: usize = 4;

    fn mode(&self) -> NumericMode {
        NumericMode::Fixed
    }

    fn formats(&self) -> (QFormat, QFormat) {
        (self.state, self.weight)
    }

    #[inline]
    fn value(&self, r: f64, domain: Domain) -> Fixed {
        to_fixed(r, self.format(domain))
    }

    fn write_value(&self, v: Fixed, out: &mut Vec<u8>) {
        out.extend_from_slice(&v.raw().to_le_bytes());
    }

    fn read_value(&self, bytes: &[u8], domain: Domain) -> Fixed {
        let mut b = [0u8; 4];
        b.copy_from_slice(&bytes[..4]);
        Fixed::from_raw(i64::from(i32::from_le_bytes(b)), self.format(domain))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn decay(tau: f64) -> DecayParams {
        DecayParams::new(tau, 1.0).unwrap()
    }

    #[test]
    fn qformat_bounds() {
        let q = QFormat::Q8_8;
        assert_eq!(q.max_raw(), 32767);
        assert_eq!(q.min_raw(), -32768);
        assert_eq!(q.min_value(), -128.0);
        assert_eq!(q.max_value(), 128.0 - 1.0 / 256.0);
        assert!(QFormat::new(0, 8).is_err());
        assert!(QFormat::new(20, 13).is_err());
        assert_eq!(QFormat::new(1, 31).unwrap().max_raw(), i32::MAX);
    }

    #[test]
    fn narrowing_rounds_to_nearest() {
        let w = QFormat::Q2_14;
        let v = QFormat::Q8_8;
        // 0.5 + 40/16384 sits 0.625 LSB above 0.5 in Q8.8
        let x = Fixed::from_raw(8192 + 40, w).convert(v);
        assert_eq!(x.raw(), 129);
        assert_eq!(Fixed::from_raw(-(8192 + 40), w).convert(v).raw(), -129);
        assert_eq!(Fixed::from_raw(32, w).convert(v).raw(), 1);
        assert_eq!(Fixed::from_raw(-32, w).convert(v).raw(), -1);
        assert_eq!(Fixed::from_raw(31, w).convert(v).raw(), 0);
        assert_eq!(Fixed::from_raw(3, v).convert(w).raw(), 192);
    }

    #[test]
    fn accumulator_holds_large_fan_in() {
        let a = FixedArith::default();
        let mut p = a.accumulator(0.0);
        for _ in 0..99 {
            p = p.add(a.state(9.0));
        }
        assert_eq!(p.to_real(), 891.0);
        let v = a.state(70.0);
        assert_eq!(v.sub_floored(p, a.state(-60.0)).to_real(), -60.0);
        assert_eq!(
            v.sub_floored(a.accumulator(30.5), a.state(-60.0)).to_real(),
            39.5
        );
        assert_eq!(70.0f64.sub_floored(891.0, -60.0), -60.0);
    }

    #[test]
    fn leak_decay_examples() {
        assert_eq!(leak_decay(0.0, &decay(4.0)), 0.0);
        assert_eq!(leak_decay(8.0, &decay(4.0)), 6.0);
        assert_eq!(leak_decay(100.0, &decay(100.0)), 99.0);

        let q = QFormat::Q8_8;
        assert_eq!(leak_decay(Fixed::zero(q), &decay(7.0)), Fixed::zero(q));
        // tau = 4 is an exact power of two, so fixed mode is exact as well
        let x = to_fixed(8.0, q);
        assert_eq!(to_real(leak_decay(x, &decay(4.0))), 6.0);
    }

    #[test]
    fn leak_toward_examples() {
        assert_eq!(leak_toward(0.3, 0.3, &decay(10.0)), 0.3);
        assert!((leak_toward(1.0, 0.0, &decay(100.0)) - 0.99).abs() < 1e-15);
        assert_eq!(leak_toward(-0.5, 0.0, &decay(2.0)), -0.25);

        let q = QFormat::Q8_8;
        let v = to_fixed(-0.5, q);
        assert_eq!(to_real(leak_toward(v, Fixed::zero(q), &decay(2.0))), -0.25);
    }

    #[test]
    fn exp_reference_examples() {
        assert_eq!(exp_decay_reference(3.5, 0.0, 10.0), 3.5);
        assert!((exp_decay_reference(1.0, 7.0, 7.0) - 0.367879).abs() < 5e-7);
        assert!((exp_decay_reference(2.0, 14.0, 7.0) - 0.270671).abs() < 5e-7);
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(to_fixed(0.0, QFormat::Q8_8).raw(), 0);
        assert_eq!(to_fixed(0.5, QFormat::Q8_8).raw(), 128);
        assert_eq!(to_fixed(300.0, QFormat::Q8_8).raw(), 32767);
        assert_eq!(to_fixed(-300.0, QFormat::Q8_8).raw(), -32768);
        // ties away from zero
        assert_eq!(to_fixed(1.5 / 256.0, QFormat::Q8_8).raw(), 2);
        assert_eq!(to_fixed(-1.5 / 256.0, QFormat::Q8_8).raw(), -2);
        assert_eq!(to_fixed(f64::NAN, QFormat::Q8_8).raw(), 0);
        assert_eq!(to_fixed(f64::INFINITY, QFormat::Q2_14).raw(), 32767);
    }

    #[test]
    fn mul_truncates_toward_zero() {
        let q = QFormat::Q8_8;
        let half = to_fixed(0.5, q);
        let tiny = Fixed::from_raw(1, q);
        assert_eq!(tiny.saturating_mul(half).raw(), 0);
        assert_eq!(Fixed::from_raw(-1, q).saturating_mul(half).raw(), 0);
        assert_eq!(Fixed::from_raw(-3, q).saturating_mul(half).raw(), -1);
    }

    #[test]
    fn mixed_format_add_converts_rhs() {
        let v = to_fixed(1.0, QFormat::Q8_8);
        let w = to_fixed(0.25, QFormat::Q2_14);
        let sum = v.saturating_add(w);
        assert_eq!(sum.format(), QFormat::Q8_8);
        assert_eq!(to_real(sum), 1.25);
    }

    #[test]
    fn reciprocal_exact_for_power_of_two_tau() {
        for k in 1..10 {
            let tau = f64::from(1u32 << k);
            assert_eq!(to_real(decay(tau).coefficient()), 1.0 / tau);
        }
    }

    #[test]
    fn decay_params_validation() {
        assert!(DecayParams::new(0.0, 1.0).is_err());
        assert!(DecayParams::new(1.0, 1.0).is_err());
        assert!(DecayParams::new(4.0, -1.0).is_err());
        assert!(DecayParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn iterative_decay_within_relative_bound() {
        for tau in [10.0, 20.0, 100.0] {
            let p = decay(tau);
            let mut x = 1.0;
            for k in 1..=(tau as usize) {
                x = leak_decay(x, &p);
                let exact = exp_decay_reference(1.0, k as f64, tau);
                let rel = (x - exact).abs() / exact;
                assert!(rel <= 1.0 / tau, "tau={tau} k={k} rel={rel}");
            }
        }
    }

    #[test]
    fn fixed_point_of_leak_in_both_modes() {
        let p = decay(37.0);
        assert_eq!(leak_toward(-0.75, -0.75, &p), -0.75);
        let rest = to_fixed(-0.75, QFormat::Q8_8);
        assert_eq!(leak_toward(rest, rest, &p), rest);
    }

    proptest! {
        #[test]
        fn round_trip_within_half_lsb(r in -127.9f64..127.9) {
            let q = QFormat::Q8_8;
            let back = to_real(to_fixed(r, q));
            prop_assert!((back - r).abs() <= q.resolution() / 2.0);
        }

        #[test]
        fn round_trip_weight_format(r in -1.99f64..1.99) {
            let q = QFormat::Q2_14;
            prop_assert!((to_real(to_fixed(r, q)) - r).abs() <= q.resolution() / 2.0);
        }

        #[test]
        fn saturation_never_panics(a in any::<i32>(), b in any::<i32>(), ia in 1u8..17, fa in 0u8..16) {
            let q = QFormat::new(ia, fa).unwrap();
            let x = Fixed::from_raw(i64::from(a), q);
            let y = Fixed::from_raw(i64::from(b), QFormat::Q2_14);
            for r in [x.saturating_add(y), x.saturating_sub(y), x.saturating_mul(y), y.saturating_mul(x)] {
                prop_assert!(r.raw() >= r.format().min_raw() && r.raw() <= r.format().max_raw());
            }
        }

        #[test]
        fn float_leak_is_strict_contraction(v in -50.0f64..50.0, rest in -5.0f64..5.0, tau in 1.5f64..500.0) {
            prop_assume!((v - rest).abs() > 1e-6);
            let out = leak_toward(v, rest, &DecayParams::new(tau, 1.0).unwrap());
            if v > rest {
                prop_assert!(rest <= out && out < v);
            } else {
                prop_assert!(v < out && out <= rest);
            }
        }

        #[test]
        fn fixed_leak_never_expands(raw in -32768i64..32768, rest_raw in -512i64..512, tau in 1.5f64..500.0) {
            let q = QFormat::Q8_8;
            let v = Fixed::from_raw(raw, q);
            let rest = Fixed::from_raw(rest_raw, q);
            let out = leak_toward(v, rest, &DecayParams::new(tau, 1.0).unwrap());
            if v >= rest {
                prop_assert!(rest <= out && out <= v);
            } else {
                prop_assert!(v <= out && out <= rest);
            }
        }
    }
}
