//! Seeded random matrices for tests, property checks and PSD sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// `G·G*` for a Gaussian `n × k` matrix, so rank `min(n, k)`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, k);
    &g * &g.adjoint()
}

/// Haar-ish unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    unitary_from(&mut r, n)
}

pub fn unitary_from<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut q = CMatrix::zeros(n, n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for k in 0..j {
                let qk = q.column(k);
                let dot: C64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= dot * qi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            q.set_column(j, &v);
        }
        if ok {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary_and_reproducible() {
        let u = random_unitary(4, 3);
        assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(4)) < 1e-13);
        assert_eq!(u, random_unitary(4, 3));
    }
}
