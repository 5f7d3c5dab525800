use acp_core::acp::{dominates, find_domination_constant, verify_acp, DominationSearch};
use acp_core::dilation::unitary_equivalence;
use acp_core::fixtures::{self, acp_fixtures};
use acp_core::numerics::random::rng;
use acp_core::numerics::{herm_eig, CMatrix, Tolerance};
use acp_core::radon_nikodym::{
    affine_check, commutant_basis, dilate, intertwiner, phi_t, recover_dilation, rn_derivative,
    sample_commutant_projector, sample_psd_commutant, uniform_equiv_unitary, Constraint, RnError,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn phi_t_examples() {
    let phi = fixtures::z3_family(0.5, false);
    let t = dilate(&phi, &tol()).unwrap();
    let id = CMatrix::identity(t.m());
    assert!(phi_t(&t, &id, &tol()).unwrap().max_abs_diff(&phi) < 1e-13);
    assert!(
        phi_t(&t, &id.scale(0.5), &tol())
            .unwrap()
            .max_abs_diff(&phi.scale(0.5))
            < 1e-13
    );
    let zero = phi_t(&t, &CMatrix::zeros(3, 3), &tol()).unwrap();
    assert!(verify_acp(&zero, &tol()).is_acp());
    assert_eq!(
        phi_t(&t, &id.scale(-1.0), &tol()).unwrap_err(),
        RnError::ConstraintViolated(Constraint::Positivity)
    );
    let mut bad = CMatrix::zeros(3, 3);
    bad[(0, 0)] = acp_core::numerics::ONE;
    assert_eq!(
        phi_t(&t, &bad, &tol()).unwrap_err(),
        RnError::ConstraintViolated(Constraint::Commutant)
    );
}

#[test]
fn commutant_dimensions() {
    let t = dilate(&fixtures::trivial(3), &tol()).unwrap();
    assert_eq!(commutant_basis(&t, &tol()).dim(), 9);
    let t = dilate(&fixtures::z2(1.0, 1.0), &tol()).unwrap();
    assert_eq!(commutant_basis(&t, &tol()).dim(), 1);
    let t = dilate(&fixtures::regular_z3(), &tol()).unwrap();
    assert_eq!(commutant_basis(&t, &tol()).dim(), 3);
    let t = dilate(&fixtures::regular_d3(), &tol()).unwrap();
    assert_eq!(commutant_basis(&t, &tol()).dim(), 6);
}

#[test]
fn derivative_of_scalar_multiples() {
    for (name, phi) in acp_fixtures() {
        let tp = dilate(&phi, &tol()).unwrap();
        let c = rn_derivative(&tp, &tp, &tol()).unwrap();
        assert!(
            c.t.max_abs_diff(&CMatrix::identity(tp.m())) < 1e-12,
            "{name}"
        );
        assert!(c.unique && c.solution_dim == 0, "{name}");
        let half = dilate(&phi.scale(0.25), &tol()).unwrap();
        let c = rn_derivative(&tp, &half, &tol()).unwrap();
        assert!(
            c.t.max_abs_diff(&CMatrix::identity(tp.m()).scale(0.25)) < 1e-12,
            "{name}"
        );
        let s = intertwiner(&tp, &half, &tol()).unwrap().s;
        assert!((&s.adjoint() * &s).max_abs_diff(&CMatrix::identity(tp.m()).scale(0.25)) < 1e-12);
    }
}

#[test]
fn round_trip_through_commutant_samples() {
    for (name, phi) in acp_fixtures() {
        let tp = dilate(&phi, &tol()).unwrap();
        let basis = commutant_basis(&tp, &tol());
        let mut r = rng(17);
        for shift in [0.0, 0.3] {
            let t0 = sample_psd_commutant(&basis, tp.m(), shift, &mut r);
            let psi = phi_t(&tp, &t0, &tol()).unwrap();
            assert!(verify_acp(&psi, &tol()).is_acp(), "{name}");
            let tpsi = dilate(&psi, &tol()).unwrap();
            let cert = rn_derivative(&tp, &tpsi, &tol()).unwrap();
            assert!((&cert.t - &t0).norm_2() <= 1e-8 * t0.norm_2(), "{name}");
            let rec = recover_dilation(&tp, &cert, Some(&tpsi), &tol()).unwrap();
            assert!(rec.equivalence.unwrap().residuals.max() < 1e-8, "{name}");
        }
        if let Some(p) = sample_commutant_projector(&basis, tp.m(), &mut r, &tol()) {
            let psi = phi_t(&tp, &p, &tol()).unwrap();
            let tpsi = dilate(&psi, &tol()).unwrap();
            assert!(tpsi.m() < tp.m(), "{name}");
            let cert = rn_derivative(&tp, &tpsi, &tol()).unwrap();
            assert!((&cert.t - &p).norm_2() < 1e-8, "{name}");
            let rec = recover_dilation(&tp, &cert, Some(&tpsi), &tol()).unwrap();
            assert!(rec.equivalence.is_some());
            assert!(matches!(
                uniform_equiv_unitary(&tp, &tpsi, &tol()),
                Err(RnError::NotUniformlyEquivalent(_))
            ));
        }
    }
}

#[test]
fn uniform_equivalence_unitaries() {
    for (name, phi) in acp_fixtures() {
        let tp = dilate(&phi, &tol()).unwrap();
        let u = uniform_equiv_unitary(&tp, &tp, &tol()).unwrap();
        assert!(
            u.u.max_abs_diff(&CMatrix::identity(tp.m())) < 1e-12,
            "{name}"
        );
        assert!(u.v_identity_holds());
        let t3 = dilate(&phi.scale(3.0), &tol()).unwrap();
        let u = uniform_equiv_unitary(&tp, &t3, &tol()).unwrap();
        assert!(
            u.residuals.unitarity < 1e-12 && u.residuals.j < 1e-12 && u.residuals.pi < 1e-12,
            "{name}"
        );
        assert!(u.polar_v < 1e-12, "{name}");
        assert!(
            (u.residuals.v - (3f64.sqrt() - 1.0) * tp.v.norm_2()).abs() < 1e-12,
            "{name}"
        );
        assert!(!u.v_identity_holds());
        let equiv = unitary_equivalence(&tp, &tp, &tol()).unwrap();
        assert!(equiv.residuals.max() < 1e-12);
    }
}

#[test]
fn kernel_mismatch_is_not_dominated() {
    let phi = fixtures::z2(1.0, 1.0);
    let psi = fixtures::z2(1.0, 0.0);
    let tp = dilate(&phi, &tol()).unwrap();
    let tq = dilate(&psi, &tol()).unwrap();
    assert!(matches!(
        rn_derivative(&tp, &tq, &tol()),
        Err(RnError::KernelNotContained { .. })
    ));
    assert_eq!(
        find_domination_constant(&psi, &phi, 100.0, 50, &tol()).unwrap(),
        DominationSearch::Unbounded
    );
}

#[test]
fn domination_examples() {
    let phi = fixtures::z4_two_dim();
    assert!(dominates(&phi.scale(0.5), &phi, 1.0, &tol()).unwrap());
    assert!(dominates(&phi, &phi, 1.0, &tol()).unwrap());
    assert!(!dominates(&phi.scale(2.0), &phi, 1.0, &tol()).unwrap());
    match find_domination_constant(&phi.scale(0.3), &phi, 10.0, 100, &tol()).unwrap() {
        DominationSearch::Found(l) => assert!((l - 0.3).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    let tp = dilate(&phi, &tol()).unwrap();
    let half = phi_t(&tp, &CMatrix::identity(tp.m()).scale(0.5), &tol()).unwrap();
    match find_domination_constant(&half, &phi, 10.0, 100, &tol()).unwrap() {
        DominationSearch::Found(l) => assert!((l - 0.5).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
}

#[test]
fn affine_scalar_case() {
    let phi = fixtures::regular_d3();
    let tp = dilate(&phi, &tol()).unwrap();
    let r = affine_check(&tp, &phi.scale(0.5), &phi.scale(0.25), 0.5, None, &tol()).unwrap();
    assert!(r.affine_ok());
    let mix = acp_core::radon_nikodym::derivative_of(&tp, &phi.scale(0.375), &tol()).unwrap();
    assert!(mix.t.max_abs_diff(&CMatrix::identity(tp.m()).scale(0.375)) < 1e-12);
    let order = r.order.unwrap();
    assert!(order.dominated && order.holds);
    let lmin = herm_eig(&CMatrix::identity(2), &tol())
        .unwrap()
        .lambda_min();
    assert_eq!(lmin, 1.0);
}
