//! Thin wrappers over `libm` so the crate stays `no_std`-clean.
//!
//! Call sites use these instead of the `std` inherent methods on `f64`.

pub use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// `exp(i phi)` as a complex number.
#[inline]
pub fn cis(phi: f64) -> Complex64 {
    Complex64::new(cos(phi), sin(phi))
}

/// |z| without pulling in std.
#[inline]
pub fn cabs(z: Complex64) -> f64 {
    hypot(z.re, z.im)
}
