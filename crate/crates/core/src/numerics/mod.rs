//! Dense complex linear algebra used by every construction in the crate:
//! Hermitian eigendecomposition, PSD certification, range factorizations,
//! matrix pencils and least-squares maps.

mod eigen;
mod factor;
mod matrix;
pub mod random;

pub use eigen::{canonical_basis, herm_eig, jacobi_eigenvalues, HermEig};
pub use factor::{
    kernel_contained, kernel_leak, lstsq_map, pencil_max, pencil_max_with, pinv, psd_check,
    psd_inv_sqrt, psd_sqrt, range_factor, rank, LstsqMap, PsdCheck, RangeFactor,
};
pub use matrix::{CMatrix, C64, ONE, ZERO};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Residual bound used by all certificates (reconstruction, morphism,
/// intertwining, recovered operators), relative to the natural scale of the
/// quantity checked.
pub const CERT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |A - A*| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (lambda_min = {lambda_min:e})")]
    NotPsd { lambda_min: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

/// Numerical thresholds. `eps_psd` and `eps_rank` are relative to the largest
/// eigenvalue, `eps_eq` to the largest entry of the operands compared.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_psd: f64,
    pub eps_eq: f64,
    pub eps_rank: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_psd: 1e-9,
            eps_eq: 1e-10,
            eps_rank: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(eps_psd: f64, eps_eq: f64, eps_rank: f64) -> Result<Self, NumericsError> {
        for (name, v) in [
            ("eps_psd", eps_psd),
            ("eps_eq", eps_eq),
            ("eps_rank", eps_rank),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(NumericsError::InvalidTolerance(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            eps_psd,
            eps_eq,
            eps_rank,
        })
    }

    /// PSD threshold for a matrix of spectral norm `norm`.
    pub fn psd_floor(&self, norm: f64) -> f64 {
        -self.eps_psd * norm.max(1.0)
    }
}

/// Optimal constant of an inequality `B ⪯ K·A`, or no finite constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_f64(*v),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}
