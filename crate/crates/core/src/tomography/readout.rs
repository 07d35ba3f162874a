//! Confusion-matrix readout correction.
//!
//! Matrices are column-stochastic: column = prepared state, row = reported
//! outcome. Two-qubit outcomes are ordered 00, 01, 10, 11 (qubit 1 first).

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

/// Largest condition number accepted for the combined correction matrix.
pub const MAX_CONDITION: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutCalibration {
    c1: RMatrix,
    c2: RMatrix,
    cct: RMatrix,
}

fn check_stochastic(name: &str, m: &RMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
    }
    for (j, col) in m.column_iter().enumerate() {
        if col.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Validation { field: name.into(), reason: format!("column {j} has entries outside [0, 1]") });
        }
        let sum: f64 = col.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation { field: name.into(), reason: format!("column {j} sums to {sum}") });
        }
    }
    Ok(())
}

impl ReadoutCalibration {
    pub fn new(c1: RMatrix, c2: RMatrix, cct: RMatrix) -> Result<ReadoutCalibration> {
        check_stochastic("c1", &c1, 2)?;
        check_stochastic("c2", &c2, 2)?;
        check_stochastic("cct", &cct, 4)?;
        Ok(ReadoutCalibration { c1, c2, cct })
    }

    /// Perfect readout.
    pub fn ideal() -> ReadoutCalibration {
        ReadoutCalibration { c1: RMatrix::identity(2, 2), c2: RMatrix::identity(2, 2), cct: RMatrix::identity(4, 4) }
    }

    /// Single-qubit matrix [[1−ε₀, ε₁], [ε₀, 1−ε₁]] where εₖ is the error when |k⟩ is prepared.
    pub fn single_qubit(err0: f64, err1: f64) -> RMatrix {
        RMatrix::from_row_slice(2, 2, &[1.0 - err0, err1, err0, 1.0 - err1])
    }

    /// Independent single-qubit errors and no crosstalk.
    pub fn from_error_rates(q1: (f64, f64), q2: (f64, f64)) -> Result<ReadoutCalibration> {
        ReadoutCalibration::new(
            Self::single_qubit(q1.0, q1.1),
            Self::single_qubit(q2.0, q2.1),
            RMatrix::identity(4, 4),
        )
    }

    pub fn c1(&self) -> &RMatrix {
        &self.c1
    }

    pub fn c2(&self) -> &RMatrix {
        &self.c2
    }

    pub fn cct(&self) -> &RMatrix {
        &self.cct
    }

    /// C_CT·(C₁⊗C₂).
    pub fn combined(&self) -> RMatrix {
        &self.cct * self.c1.kronecker(&self.c2)
    }

    /// 2-norm condition number of the combined matrix.
    pub fn condition_number(&self) -> f64 {
        let sv = self.combined().svd(false, false).singular_values;
        let (max, min) = (sv.max(), sv.min());
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Apply [C_CT·(C₁⊗C₂)]⁻¹ to measured outcome frequencies. Entries may land
/// slightly outside [0, 1]; see [`clip_probabilities`].
pub fn correct_readout(measured: &[f64; 4], cal: &ReadoutCalibration) -> Result<[f64; 4]> {
    let sum: f64 = measured.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::Validation { field: "measured".into(), reason: format!("frequencies sum to {sum}") });
    }
    let condition = cal.condition_number();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = nalgebra::DVector::from_column_slice(measured);
    let solved = cal.combined().lu().solve(&rhs).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    Ok([solved[0], solved[1], solved[2], solved[3]])
}

/// Clip to [0, 1] and renormalize.
pub fn clip_probabilities(p: &[f64; 4]) -> [f64; 4] {
    let clipped = p.map(|x| x.clamp(0.0, 1.0));
    let total: f64 = clipped.iter().sum();
    if total == 0.0 {
        return [0.25; 4];
    }
    clipped.map(|x| x / total)
}
