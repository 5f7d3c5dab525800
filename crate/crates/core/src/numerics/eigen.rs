//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! accumulated transform stays unitary and the diagonal stays real. The sweep
//! order is fixed (row-cyclic), which makes the result bit-reproducible.
//!
//! Output conventions, which callers are allowed to rely on:
//! - eigenvalues ascending;
//! - eigenvalues closer than `eps_eq·‖A‖_max` form one cluster whose basis is
//!   rebuilt by Gram–Schmidt of `P e_0, P e_1, …` (`P` the cluster projector),
//!   so the basis depends on the eigenspace only;
//! - every eigenvector is rotated so that its first component of modulus
//!   above `eps_rank` is real and nonnegative.

use super::matrix::{CMatrix, C64, ZERO};
use super::{NumericsError, Tolerance};

const MAX_SWEEPS: usize = 80;

/// Eigendecomposition `A = Q Λ Q*` with the conventions above.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Q f(Λ) Q*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let q = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * q[(j, k)].conj() * fl[k])
                .sum::<C64>()
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|l| l)
    }

    /// Indices of eigenvalues strictly above `threshold`.
    pub fn indices_above(&self, threshold: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| self.values[k] > threshold)
            .collect()
    }
}

/// Hermitian eigendecomposition with input validation.
pub fn herm_eig(a: &CMatrix, tol: &Tolerance) -> Result<HermEig, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let scale = a.norm_max();
    let defect = a.hermitian_defect();
    if defect > tol.eps_eq * scale {
        return Err(NumericsError::NotHermitian { defect });
    }
    let (values, vectors) = jacobi(&a.hermitian_part());
    let mut eig = sorted(values, vectors);
    canonicalize_clusters(&mut eig, tol.eps_eq * scale);
    fix_phases(&mut eig.vectors, tol.eps_rank);
    Ok(eig)
}

/// Eigenvalues only, ascending, of the Hermitian part of `a`. No validation;
/// used for norms.
pub fn jacobi_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let (mut values, _) = jacobi(&a.hermitian_part());
    values.sort_by(f64::total_cmp);
    values
}

fn jacobi(a0: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a0.rows();
    let mut a = a0.clone();
    let mut v = CMatrix::identity(n);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let fro = a.norm_fro();
    let target = (1e-15 * fro).powi(2);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let abs_b = b.norm();
    if abs_b <= f64::MIN_POSITIVE {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase_conj = (b / abs_b).conj();

    let tau = (aqq - app) / (2.0 * abs_b);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // W = diag(1, e^{-iθ}) · [[c, s], [-s, c]]
    let w_pp = C64::new(c, 0.0);
    let w_pq = C64::new(s, 0.0);
    let w_qp = phase_conj * (-s);
    let w_qq = phase_conj * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * abs_b, 0.0);
    a[(q, q)] = C64::new(aqq + t * abs_b, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

fn sorted(values: Vec<f64>, vectors: CMatrix) -> HermEig {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    HermEig {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: vectors.select_columns(&order),
    }
}

fn canonicalize_clusters(eig: &mut HermEig, cluster_tol: f64) {
    let n = eig.dim();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let block = eig.vectors.columns(start, end - start);
            let basis = canonical_basis(&block);
            for (k, col) in basis.iter().enumerate() {
                eig.vectors.set_column(start + k, col);
            }
        }
        start = end;
    }
}

/// Basis of the column span of the orthonormal `q` obtained by Gram–Schmidt
/// on the projections of the standard basis vectors, taken in index order.
///
/// A candidate is accepted when its residual norm² exceeds `1/(2N)`; the
/// residuals of all N candidates sum to the remaining dimension, so a single
/// pass always completes the basis.
pub fn canonical_basis(q: &CMatrix) -> Vec<Vec<C64>> {
    let (n, k) = q.shape();
    let threshold = 0.5 / n as f64;
    let proj = q * &q.adjoint();
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(k);
    for i in 0..n {
        if chosen.len() == k {
            break;
        }
        let mut v = proj.column(i);
        for _ in 0..2 {
            for u in &chosen {
                let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
        }
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 > threshold {
            let inv = 1.0 / norm2.sqrt();
            chosen.push(v.into_iter().map(|z| z * inv).collect());
        }
    }
    if chosen.len() < k {
        // Unreachable for orthonormal input; keep the solver's basis.
        return (0..k).map(|j| q.column(j)).collect();
    }
    chosen
}

fn fix_phases(vectors: &mut CMatrix, eps: f64) {
    let (n, k) = vectors.shape();
    for j in 0..k {
        if let Some(i) = (0..n).find(|&i| vectors[(i, j)].norm() > eps) {
            let z = vectors[(i, j)];
            let rot = z.conj() / z.norm();
            for r in 0..n {
                vectors[(r, j)] *= rot;
            }
            vectors[(i, j)] = C64::new(vectors[(i, j)].re.abs(), 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_matrix_gives_identity_basis() {
        let e = herm_eig(&CMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
        assert!(e.vectors.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn all_ones_two_by_two() {
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let e = herm_eig(&a, &tol()).unwrap();
        assert!((e.values[0] - 0.0).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two_closed_form() {
        // [[2, i], [-i, 2]] has eigenvalues 2 ± 1.
        let a = CMatrix::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ]);
        let e = herm_eig(&a, &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&a) < 1e-14);
        // phase rule: first component real nonnegative
        for j in 0..2 {
            assert!(e.vectors[(0, j)].im.abs() < 1e-15 && e.vectors[(0, j)].re >= 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            herm_eig(&a, &tol()),
            Err(NumericsError::NotHermitian { .. })
        ));
        assert!(matches!(
            herm_eig(&CMatrix::zeros(2, 3), &tol()),
            Err(NumericsError::NotSquare { .. })
        ));
    }

    #[test]
    fn degenerate_cluster_basis_is_rotation_invariant() {
        // Same eigenspaces presented in two different bases give the same Q.
        let a = CMatrix::from_real_rows(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0], &[1.0, 1.0, 2.0]]);
        let e = herm_eig(&a, &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let u = crate::numerics::random::random_unitary(3, 11);
        let b = &(&u * &a) * &u.adjoint();
        let eb = herm_eig(&b, &tol()).unwrap();
        let back = &u.adjoint() * &eb.vectors;
        // eigenspace projectors agree and reconstruction holds
        assert!(eb.reconstruct().max_abs_diff(&b) < 1e-13);
        let pa = &e.vectors.columns(0, 2) * &e.vectors.columns(0, 2).adjoint();
        let pb = &back.columns(0, 2) * &back.columns(0, 2).adjoint();
        assert!(pa.max_abs_diff(&pb) < 1e-13);
    }
}
