//! Named maps used by the test suites, the CLI examples and the demo.

use std::f64::consts::PI;

use crate::acp::OperatorMap;
use crate::group::{cyclic, dihedral, identity_involution, inverse_involution};
use crate::numerics::{CMatrix, C64};

fn scalar(x: f64) -> CMatrix {
    CMatrix::scalar(C64::new(x, 0.0))
}

/// Trivial group with `φ(e) = I_d`.
pub fn trivial(d: usize) -> OperatorMap {
    let g = cyclic(1).unwrap();
    let a = identity_involution(&g);
    OperatorMap::new(g, a, vec![CMatrix::identity(d)]).unwrap()
}

/// Z₂ with `α = id` and scalar values `(x, y)`.
pub fn z2(x: f64, y: f64) -> OperatorMap {
    let g = cyclic(2).unwrap();
    let a = identity_involution(&g);
    OperatorMap::new(g, a, vec![scalar(x), scalar(y)]).unwrap()
}

/// Z₃ with scalar values `(1, t, t)`; `alpha_inverse` selects `α(k) = −k`
/// over `α = id`.
pub fn z3_family(t: f64, alpha_inverse: bool) -> OperatorMap {
    let g = cyclic(3).unwrap();
    let a = if alpha_inverse {
        inverse_involution(&g).unwrap()
    } else {
        identity_involution(&g)
    };
    OperatorMap::new(g, a, vec![scalar(1.0), scalar(t), scalar(t)]).unwrap()
}

/// Z₃ with `α(k) = −k` and `φ(k) = ω^k`, `ω = e^{2πi/3}`.
pub fn z3_omega() -> OperatorMap {
    let g = cyclic(3).unwrap();
    let a = inverse_involution(&g).unwrap();
    OperatorMap::from_fn(g, a, |k| {
        CMatrix::scalar(C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0))
    })
    .unwrap()
}

/// `φ = δ_e`, whose minimal dilation is the regular representation.
pub fn regular_z3() -> OperatorMap {
    let g = cyclic(3).unwrap();
    let a = identity_involution(&g);
    OperatorMap::from_fn(g, a, |k| scalar(if k == 0 { 1.0 } else { 0.0 })).unwrap()
}

pub fn regular_d3() -> OperatorMap {
    let g = dihedral(3).unwrap();
    let a = identity_involution(&g);
    OperatorMap::from_fn(g, a, |k| scalar(if k == 0 { 1.0 } else { 0.0 })).unwrap()
}

/// Z₄ with `α(k) = −k`, `d = 2` and `φ(k) = A + (−1)^k B` for fixed PSD `A`, `B`.
pub fn z4_two_dim() -> OperatorMap {
    let a_mat = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
    let b_mat = CMatrix::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5)],
        vec![C64::new(0.0, -0.5), C64::new(0.5, 0.0)],
    ]);
    let g = cyclic(4).unwrap();
    let a = inverse_involution(&g).unwrap();
    OperatorMap::from_fn(g, a, |k| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        &a_mat + &b_mat.scale(sign)
    })
    .unwrap()
}

/// Two-dimensional irreducible representation of D₃ with `α = id`.
pub fn d3_standard() -> OperatorMap {
    let g = dihedral(3).unwrap();
    let a = identity_involution(&g);
    OperatorMap::from_fn(g, a, |x| {
        let (r, s) = (x % 3, x / 3);
        let th = 2.0 * PI * r as f64 / 3.0;
        let rot = CMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        if s == 0 {
            rot
        } else {
            &rot * &CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
        }
    })
    .unwrap()
}

/// `φ(g) = I_d` for every `g` of Z_n with `α(k) = −k`.
pub fn constant_identity(n: usize, d: usize) -> OperatorMap {
    let g = cyclic(n).unwrap();
    let a = inverse_involution(&g).unwrap();
    OperatorMap::from_fn(g, a, |_| CMatrix::identity(d)).unwrap()
}

/// The α-completely positive maps the downstream suites run on.
pub fn acp_fixtures() -> Vec<(&'static str, OperatorMap)> {
    vec![
        ("trivial_d2", trivial(2)),
        ("z2_ones", z2(1.0, 1.0)),
        ("z2_delta", z2(1.0, 0.0)),
        ("z3_id_half", z3_family(0.5, false)),
        ("z3_inv_one", z3_family(1.0, true)),
        ("z3_regular", regular_z3()),
        ("z4_inv_d2", z4_two_dim()),
        ("d3_regular", regular_d3()),
        ("d3_standard", d3_standard()),
    ]
}
