//! Unit conversions. Internally all frequencies are angular (rad/s) and all
//! times are seconds; files and the CLI use GHz/MHz and µs.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

#[inline]
pub fn ghz(f: f64) -> f64 {
    TWO_PI * f * 1e9
}

#[inline]
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f * 1e6
}

#[inline]
pub fn khz(f: f64) -> f64 {
    TWO_PI * f * 1e3
}

#[inline]
pub fn hz(f: f64) -> f64 {
    TWO_PI * f
}

#[inline]
pub fn to_ghz(omega: f64) -> f64 {
    omega / TWO_PI / 1e9
}

#[inline]
pub fn to_mhz(omega: f64) -> f64 {
    omega / TWO_PI / 1e6
}

#[inline]
pub fn to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

#[inline]
pub fn us(t: f64) -> f64 {
    t * 1e-6
}

#[inline]
pub fn ns(t: f64) -> f64 {
    t * 1e-9
}
