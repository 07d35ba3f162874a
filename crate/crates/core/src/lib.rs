//! Simulation of two-qubit superconducting circuits with a fixed bus cavity
//! and a flux-tunable coupler.
//!
//! The crate covers the static ZZ rate ζ (exact diagonalization and the
//! closed fourth-order expression), zero-ζ operating points, randomized
//! benchmarking under ZZ crosstalk and decoherence, and parametric √iSWAP
//! gate characterization (readout correction, state and process tomography,
//! coupler-temperature effects).

pub mod channels;
pub mod coupler;
pub mod device;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod linalg;
pub mod perturbation;
pub mod rb;
pub mod spectrum;
pub mod tomography;
pub mod units;

pub use device::{Coherence, Coupler, Couplings, DeviceParams, Mode, PerMode, Qubit};
pub use error::{Error, Result};
