//! Scalar numeric abstraction over `f32`/`f64`.
//!
//! Storage is 32-bit; the `f64` instantiation exists for gradient checking.
//! Transcendentals are routed through `libm` so that identical inputs give
//! identical bits on every platform.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + PartialOrd
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    const ZERO: Self;
    const ONE: Self;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_f32(v: f32) -> Self;
    fn to_f32(self) -> f32;

    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
}

impl Real for f32 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn from_f32(v: f32) -> Self {
        v
    }
    #[inline]
    fn to_f32(self) -> f32 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        libm::expf(self)
    }
    #[inline]
    fn ln(self) -> Self {
        libm::logf(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        libm::sqrtf(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        libm::tanhf(self)
    }
    #[inline]
    fn abs(self) -> Self {
        libm::fabsf(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        f32::min(self, other)
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        f32::max(self, other)
    }
}

impl Real for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_f32(v: f32) -> Self {
        v as f64
    }
    #[inline]
    fn to_f32(self) -> f32 {
        self as f32
    }
    #[inline]
    fn exp(self) -> Self {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        libm::log(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        libm::tanh(self)
    }
    #[inline]
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
}

/// Numerically stable logistic function, identical on both tails.
#[inline]
pub fn sigmoid<E: Real>(x: E) -> E {
    if x >= E::ZERO {
        E::ONE / (E::ONE + (-x).exp())
    } else {
        let e = x.exp();
        e / (E::ONE + e)
    }
}

/// Tanh-approximation GELU: `0.5·x·(1 + tanh(√(2/π)·(x + 0.044715·x³)))`.
/// The two constants below are the approximation; they are fixed.
pub const GELU_SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
pub const GELU_CUBIC_COEF: f64 = 0.044_715;

#[inline]
pub fn gelu<E: Real>(x: E) -> E {
    let c0 = E::from_f64(GELU_SQRT_2_OVER_PI);
    let c1 = E::from_f64(GELU_CUBIC_COEF);
    let half = E::from_f64(0.5);
    let inner = c0 * (x + c1 * x * x * x);
    half * x * (E::ONE + inner.tanh())
}

/// Derivative of the tanh-approximation GELU with respect to its input.
#[inline]
pub fn gelu_grad<E: Real>(x: E) -> E {
    let c0 = E::from_f64(GELU_SQRT_2_OVER_PI);
    let c1 = E::from_f64(GELU_CUBIC_COEF);
    let half = E::from_f64(0.5);
    let three = E::from_f64(3.0);
    let inner = c0 * (x + c1 * x * x * x);
    let t = inner.tanh();
    let sech2 = E::ONE - t * t;
    half * (E::ONE + t) + half * x * sech2 * c0 * (E::ONE + three * c1 * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_matches_closed_form() {
        assert_eq!(sigmoid(0.0f32), 0.5);
        assert!((sigmoid(2.0f64) - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-15);
        // saturation
        assert_eq!(sigmoid(f32::NEG_INFINITY), 0.0);
        assert_eq!(sigmoid(f32::INFINITY), 1.0);
    }

    #[test]
    fn gelu_fixed_points() {
        assert_eq!(gelu(0.0f32), 0.0);
        assert!((gelu(10.0f64) - 10.0).abs() < 1e-4);
    }

    #[test]
    fn gelu_close_to_erf_form() {
        // exact GELU uses the normal CDF: x·Φ(x) with Φ via erf
        let x = 1.0f64;
        let exact = x * 0.5 * (1.0 + libm::erf(x / core::f64::consts::SQRT_2));
        assert!((gelu(x) - exact).abs() < 1e-3);
    }

    #[test]
    fn gelu_grad_matches_finite_difference() {
        for &x in &[-2.0f64, -0.3, 0.0, 0.7, 1.9] {
            let h = 1e-6;
            let fd = (gelu(x + h) - gelu(x - h)) / (2.0 * h);
            assert!((gelu_grad(x) - fd).abs() < 1e-8, "x={x}");
        }
    }
}
