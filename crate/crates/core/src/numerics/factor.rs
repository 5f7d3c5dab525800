use super::eigen::{herm_eig, HermEig};
use super::matrix::CMatrix;
use super::{Bound, NumericsError, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub lambda_min: f64,
    pub norm: f64,
}

/// `is_psd ⇔ λ_min(A) ≥ −eps_psd·max(1, ‖A‖₂)`.
pub fn psd_check(a: &CMatrix, tol: &Tolerance) -> Result<PsdCheck, NumericsError> {
    let eig = herm_eig(a, tol)?;
    Ok(psd_from_eig(&eig, tol))
}

fn psd_from_eig(eig: &HermEig, tol: &Tolerance) -> PsdCheck {
    let lambda_min = eig.lambda_min();
    let norm = lambda_min.abs().max(eig.lambda_max().abs());
    PsdCheck {
        is_psd: lambda_min >= tol.psd_floor(norm),
        lambda_min,
        norm,
    }
}

/// Factorization `Γ = E*E` onto the numerical range of a PSD matrix.
///
/// `E = Λ₊^{1/2} Q₊*` keeps the eigenpairs with `λ > eps_rank·λ_max`; the
/// rank decided here is final for everything built on top of it.
#[derive(Clone, Debug)]
pub struct RangeFactor {
    pub e: CMatrix,
    pub e_pinv: CMatrix,
    pub rank: usize,
    /// Orthonormal basis of the discarded eigenvectors (`N × (N − rank)`).
    pub kernel: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub lambda_min: f64,
}

impl RangeFactor {
    pub fn dim(&self) -> usize {
        self.e.cols()
    }

    /// Orthogonal projector `E⁺E` onto the range.
    pub fn projector(&self) -> CMatrix {
        &self.e_pinv * &self.e
    }

    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }
}

pub fn range_factor(gamma: &CMatrix, tol: &Tolerance) -> Result<RangeFactor, NumericsError> {
    let eig = herm_eig(gamma, tol)?;
    let check = psd_from_eig(&eig, tol);
    if !check.is_psd {
        return Err(NumericsError::NotPsd {
            lambda_min: check.lambda_min,
        });
    }
    let n = eig.dim();
    let cutoff = tol.eps_rank * eig.lambda_max().max(0.0);
    let keep = eig.indices_above(cutoff);
    let drop: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let r = keep.len();
    let q = &eig.vectors;
    let e = CMatrix::from_fn(r, n, |k, j| {
        q[(j, keep[k])].conj() * eig.values[keep[k]].sqrt()
    });
    let e_pinv = CMatrix::from_fn(n, r, |j, k| q[(j, keep[k])] / eig.values[keep[k]].sqrt());
    Ok(RangeFactor {
        e,
        e_pinv,
        rank: r,
        kernel: q.select_columns(&drop),
        lambda_min: check.lambda_min,
        eigenvalues: eig.values,
    })
}

/// `‖B·P_ker(A)‖₂` with the kernel recorded in `fa`.
pub fn kernel_leak(fa: &RangeFactor, b: &CMatrix) -> f64 {
    if fa.kernel.cols() == 0 {
        return 0.0;
    }
    (b * &fa.kernel).norm_2()
}

fn require_psd(m: &CMatrix, tol: &Tolerance) -> Result<PsdCheck, NumericsError> {
    let c = psd_check(m, tol)?;
    if c.is_psd {
        Ok(c)
    } else {
        Err(NumericsError::NotPsd {
            lambda_min: c.lambda_min,
        })
    }
}

fn same_square(a: &CMatrix, b: &CMatrix) -> Result<(), NumericsError> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(NumericsError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `true ⇔ ‖B·P_ker(A)‖₂ ≤ eps_psd·max(1, ‖B‖₂)`.
pub fn kernel_contained(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<bool, NumericsError> {
    same_square(a, b)?;
    let fa = range_factor(a, tol)?;
    let cb = require_psd(b, tol)?;
    Ok(kernel_leak(&fa, b) <= tol.eps_psd * cb.norm.max(1.0))
}

/// Least `K` with `B ⪯ K·A`.
pub fn pencil_max(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Bound, NumericsError> {
    same_square(a, b)?;
    let fa = range_factor(a, tol)?;
    require_psd(b, tol)?;
    Ok(pencil_max_with(&fa, b, tol))
}

/// Pencil optimum against an already-factored `A`: `λ_max(E⁺* B E⁺)`, or
/// `Unbounded` when `B` does not vanish on `ker A`.
pub fn pencil_max_with(fa: &RangeFactor, b: &CMatrix, tol: &Tolerance) -> Bound {
    let leak = kernel_leak(fa, b);
    let b_norm = b.norm_2();
    if leak > tol.eps_psd * b_norm {
        return Bound::Unbounded;
    }
    if fa.rank == 0 {
        return Bound::Finite(0.0);
    }
    let reduced = &(&fa.e_pinv.adjoint() * b) * &fa.e_pinv;
    let top = super::eigen::jacobi_eigenvalues(&reduced)
        .last()
        .copied()
        .unwrap_or(0.0);
    Bound::Finite(top.max(0.0))
}

/// Moore–Penrose pseudo-inverse through the eigendecomposition of `A*A`.
pub fn pinv(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return CMatrix::zeros(n, m);
    }
    let ata = &a.adjoint() * a;
    let eig = herm_eig(&ata, tol).expect("A*A is Hermitian");
    let cutoff = tol.eps_rank * eig.lambda_max().max(0.0);
    let inv = eig.apply_fn(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    &inv * &a.adjoint()
}

/// Numerical rank from the eigenvalues of the smaller Gram matrix.
pub fn rank(a: &CMatrix, tol: &Tolerance) -> usize {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0;
    }
    let g = if m <= n {
        a * &a.adjoint()
    } else {
        &a.adjoint() * a
    };
    let eig = herm_eig(&g, tol).expect("Gram matrix is Hermitian");
    let cutoff = tol.eps_rank * eig.lambda_max().max(0.0);
    eig.indices_above(cutoff).len()
}

#[derive(Clone, Debug)]
pub struct LstsqMap {
    pub map: CMatrix,
    /// `‖X·D − I‖_F`.
    pub residual: f64,
}

/// `X = images · domain⁺`, the least-squares solution of `X·domain ≈ images`.
pub fn lstsq_map(
    domain: &CMatrix,
    images: &CMatrix,
    tol: &Tolerance,
) -> Result<LstsqMap, NumericsError> {
    if domain.cols() != images.cols() {
        return Err(NumericsError::ShapeMismatch(format!(
            "{} domain vectors vs {} images",
            domain.cols(),
            images.cols()
        )));
    }
    let x = images * &pinv(domain, tol);
    let residual = (&(&x * domain) - images).norm_fro();
    Ok(LstsqMap { map: x, residual })
}

fn psd_fn(a: &CMatrix, tol: &Tolerance, f: impl Fn(f64) -> f64) -> Result<CMatrix, NumericsError> {
    let eig = herm_eig(a, tol)?;
    let check = psd_from_eig(&eig, tol);
    if !check.is_psd {
        return Err(NumericsError::NotPsd {
            lambda_min: check.lambda_min,
        });
    }
    let cutoff = tol.eps_rank * eig.lambda_max().max(0.0);
    Ok(eig.apply_fn(|l| if l > cutoff { f(l) } else { 0.0 }))
}

/// `A^{1/2}`, eigenvalues at or below the rank cutoff clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix, NumericsError> {
    psd_fn(a, tol, f64::sqrt)
}

/// `A^{+1/2}`: inverse square root on the range, zero on the kernel.
pub fn psd_inv_sqrt(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix, NumericsError> {
    psd_fn(a, tol, |l| 1.0 / l.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn ones(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0))
    }

    #[test]
    fn psd_examples() {
        let c = psd_check(&CMatrix::identity(3), &tol()).unwrap();
        assert!(c.is_psd && (c.lambda_min - 1.0).abs() < 1e-15);
        let c = psd_check(
            &CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]),
            &tol(),
        )
        .unwrap();
        assert!(!c.is_psd && (c.lambda_min + 1.0).abs() < 1e-14);
        let c = psd_check(&ones(3), &tol()).unwrap();
        assert!(c.is_psd && c.lambda_min.abs() < 1e-14);
    }

    #[test]
    fn range_factor_examples() {
        let f = range_factor(&CMatrix::identity(3), &tol()).unwrap();
        assert_eq!(f.rank, 3);
        assert!((&f.e * &f.e.adjoint()).max_abs_diff(&CMatrix::identity(3)) < 1e-14);

        let f = range_factor(&ones(2), &tol()).unwrap();
        assert_eq!(f.rank, 1);
        assert!((f.e[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((f.e[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-14);

        let f = range_factor(&CMatrix::diag_real(&[2.0, 0.0]), &tol()).unwrap();
        assert_eq!(f.rank, 1);
        assert!((f.e[(0, 0)].re - 2f64.sqrt()).abs() < 1e-14 && f.e[(0, 1)].norm() == 0.0);
        assert!((&f.e * &f.e_pinv).max_abs_diff(&CMatrix::identity(1)) < 1e-14);

        let bad = CMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(
            range_factor(&bad, &tol()),
            Err(NumericsError::NotPsd { .. })
        ));
    }

    #[test]
    fn pencil_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(pencil_max(&i2, &i2, &tol()).unwrap(), Bound::Finite(1.0));
        let a = CMatrix::diag_real(&[1.0, 0.0]);
        let b = CMatrix::diag_real(&[3.0, 0.0]);
        let k = pencil_max(&a, &b, &tol()).unwrap().value().unwrap();
        assert!((k - 3.0).abs() < 1e-13);
        assert_eq!(pencil_max(&a, &i2, &tol()).unwrap(), Bound::Unbounded);
    }

    #[test]
    fn kernel_containment_examples() {
        let b = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        assert!(kernel_contained(&CMatrix::identity(2), &b, &tol()).unwrap());
        assert!(!kernel_contained(
            &CMatrix::diag_real(&[1.0, 0.0]),
            &CMatrix::identity(2),
            &tol()
        )
        .unwrap());
        assert!(kernel_contained(&ones(2), &ones(2), &tol()).unwrap());
    }

    #[test]
    fn lstsq_examples() {
        let img = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let r = lstsq_map(&CMatrix::identity(2), &img, &tol()).unwrap();
        assert!(r.map.max_abs_diff(&img) < 1e-14 && r.residual < 1e-14);

        let dup = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let consistent = CMatrix::from_real_rows(&[&[7.0, 7.0]]);
        assert!(lstsq_map(&dup, &consistent, &tol()).unwrap().residual < 1e-13);
        let inconsistent = CMatrix::from_real_rows(&[&[1.0, 3.0]]);
        let r = lstsq_map(&dup, &inconsistent, &tol()).unwrap();
        assert!((r.residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_and_inverse_sqrt() {
        let a = CMatrix::diag_real(&[4.0, 0.0, 9.0]);
        let s = psd_sqrt(&a, &tol()).unwrap();
        assert!(s.max_abs_diff(&CMatrix::diag_real(&[2.0, 0.0, 3.0])) < 1e-14);
        let si = psd_inv_sqrt(&a, &tol()).unwrap();
        assert!(si.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.0, 1.0 / 3.0])) < 1e-14);
    }
}
