use acp_core::fixtures::{self, acp_fixtures};
use acp_core::group::{cyclic, inverse_involution};
use acp_core::group_algebra::{
    alpha_tilde, convolution, eval_extended_map, eval_extended_rep, multiplicativity_check,
    rn_correspondence_check, star, AlgebraElement, ExtendedMap,
};
use acp_core::numerics::random::rng;
use acp_core::numerics::{CMatrix, Tolerance, C64};
use acp_core::radon_nikodym::{
    commutant_basis, derivative_of, dilate, phi_t, sample_psd_commutant,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn extended_map_basics() {
    let phi = fixtures::z4_two_dim();
    let em = ExtendedMap::new(phi.clone());
    assert_eq!(em.eval(&AlgebraElement::delta(4, 0)), phi.at(0).clone());
    let f = AlgebraElement::delta(4, 1).add(&AlgebraElement::delta(4, 3));
    assert!(em.eval(&f).max_abs_diff(&(phi.at(1) + phi.at(3))) < 1e-15);
    assert_eq!(
        eval_extended_map(&phi, &AlgebraElement::zero(4)),
        CMatrix::zeros(2, 2)
    );
}

#[test]
fn extended_rep_is_multiplicative() {
    for (name, phi) in acp_fixtures() {
        let t = dilate(&phi, &tol()).unwrap();
        let n = t.group.order();
        let id = eval_extended_rep(&t, &AlgebraElement::delta(n, t.group.identity()));
        assert!(id.max_abs_diff(&CMatrix::identity(t.m())) < 1e-12, "{name}");
        for g in t.group.elements() {
            for h in t.group.elements() {
                let f = convolution(
                    &t.group,
                    &AlgebraElement::delta(n, g),
                    &AlgebraElement::delta(n, h),
                );
                assert_eq!(f, AlgebraElement::delta(n, t.group.mul(g, h)));
            }
        }
        assert!(multiplicativity_check(&t, 50, 3).passes(1e-9), "{name}");
    }
}

#[test]
fn alpha_tilde_examples() {
    let g = cyclic(3).unwrap();
    let a = inverse_involution(&g).unwrap();
    let f = AlgebraElement {
        coeffs: vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)],
    };
    assert_eq!(
        alpha_tilde(&f, &a).coeffs,
        vec![f.coeffs[0], f.coeffs[2], f.coeffs[1]]
    );
    let mut r = rng(9);
    for _ in 0..10 {
        let f = AlgebraElement::random(3, &mut r);
        assert_eq!(alpha_tilde(&alpha_tilde(&f, &a), &a), f);
    }
}

#[test]
fn hermitian_and_alpha_invariant_extension() {
    let mut r = rng(4);
    for (name, phi) in acp_fixtures() {
        for _ in 0..20 {
            let f = AlgebraElement::random(phi.n(), &mut r);
            let lhs = eval_extended_map(&phi, &star(phi.group(), &f));
            assert!(
                lhs.max_abs_diff(&eval_extended_map(&phi, &f).adjoint()) < 1e-12,
                "{name}"
            );
            let a = eval_extended_map(&phi, &alpha_tilde(&f, phi.alpha()));
            assert!(
                a.max_abs_diff(&eval_extended_map(&phi, &f)) < 1e-12,
                "{name}"
            );
        }
    }
}

#[test]
fn correspondence_on_commutant_samples() {
    for (name, phi) in acp_fixtures() {
        let t = dilate(&phi, &tol()).unwrap();
        let basis = commutant_basis(&t, &tol());
        let t0 = sample_psd_commutant(&basis, t.m(), 0.0, &mut rng(2));
        let psi = phi_t(&t, &t0, &tol()).unwrap();
        let cert = derivative_of(&t, &psi, &tol()).unwrap();
        let rep = rn_correspondence_check(&t, &cert, &psi, 100, 8);
        assert!(rep.passes(1e-8), "{name}: {}", rep.max_relative);
        let half = phi.scale(0.5);
        let cert = derivative_of(&t, &half, &tol()).unwrap();
        assert!(rn_correspondence_check(&t, &cert, &half, 20, 1).passes(1e-8));
    }
}
