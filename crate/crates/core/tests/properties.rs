use acp_core::acp::{dominates, gram_matrix, selection, tuple_matrix, verify_acp, OperatorMap};
use acp_core::dilation::compress_map;
use acp_core::fixtures::acp_fixtures;
use acp_core::group::{
    cyclic, dihedral, direct_product, inverse_involution, FiniteGroup, Involution,
};
use acp_core::group_algebra::{
    alpha_tilde, eval_extended_map, eval_extended_rep, star, AlgebraElement,
};
use acp_core::numerics::random::{complex_gaussian, random_hermitian, random_psd, rng};
use acp_core::numerics::{
    herm_eig, pencil_max, psd_check, range_factor, Bound, CMatrix, Tolerance, C64,
};
use acp_core::radon_nikodym::{commutant_basis, dilate, phi_t, sample_psd_commutant};
use proptest::prelude::*;
use rand::Rng as _;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn vec_dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A random element of the cone `{φ_T : T ⪰ 0 in the commutant}` over a fixture.
fn random_acp(fixture: usize, seed: u64) -> OperatorMap {
    let (_, phi) = acp_fixtures().swap_remove(fixture % acp_fixtures().len());
    let t = dilate(&phi, &tol()).unwrap();
    let basis = commutant_basis(&t, &tol());
    let t0 = sample_psd_commutant(&basis, t.m(), 0.1, &mut rng(seed));
    phi_t(&t, &t0, &tol()).unwrap()
}

fn validate_again(g: &FiniteGroup) {
    FiniteGroup::validate(g.table().to_vec(), g.identity(), g.inverse_table().to_vec()).unwrap();
    Involution::validate(g, inverse_involution(g).unwrap().perm().to_vec()).unwrap();
    Involution::validate(g, (0..g.order()).collect()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn herm_eig_reconstructs(n in 1usize..=64, seed in any::<u64>()) {
        let a = random_hermitian(&mut rng(seed), n);
        let eig = herm_eig(&a, &tol()).unwrap();
        let limit = 10.0 * tol().eps_eq * a.norm_max();
        prop_assert!(eig.reconstruct().max_abs_diff(&a) <= limit);
        let again = herm_eig(&a, &tol()).unwrap();
        prop_assert_eq!(&eig.values, &again.values);
        prop_assert_eq!(eig.vectors.as_slice(), again.vectors.as_slice());
    }

    #[test]
    fn range_factor_is_isometric(n in 1usize..=16, k in 1usize..=16, seed in any::<u64>()) {
        let mut r = rng(seed);
        let gamma = random_psd(&mut r, n, k.min(n));
        let fa = range_factor(&gamma, &tol()).unwrap();
        let g2 = gamma.norm_2();
        for _ in 0..40 {
            let x: Vec<C64> = (0..n).map(|_| complex_gaussian(&mut r)).collect();
            let y: Vec<C64> = (0..n).map(|_| complex_gaussian(&mut r)).collect();
            let lhs = vec_dot(&x, &gamma.mul_vec(&y));
            let rhs = vec_dot(&fa.e.mul_vec(&x), &fa.e.mul_vec(&y));
            prop_assert!((lhs - rhs).norm() <= tol().eps_eq * g2 * vec_norm(&x) * vec_norm(&y));
        }
    }

    #[test]
    fn pencil_constant_is_tight(n in 1usize..=10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = &CMatrix::identity(n) + &random_psd(&mut r, n, n);
        let b = random_psd(&mut r, n, n);
        let Bound::Finite(k) = pencil_max(&a, &b, &tol()).unwrap() else {
            panic!("full-rank pencil is bounded");
        };
        prop_assert!(psd_check(&(&a.scale(k) - &b), &tol()).unwrap().is_psd);
        let lower = k - 10.0 * tol().eps_psd * k.max(1.0) * a.norm_2();
        prop_assert!(!psd_check(&(&a.scale(lower) - &b), &tol()).unwrap().is_psd);
    }

    #[test]
    fn built_groups_validate(n in 1usize..=12, m in 1usize..=4) {
        let c = cyclic(n).unwrap();
        validate_again(&c);
        let inv = inverse_involution(&c).unwrap();
        prop_assert!((0..n).all(|k| inv.apply(k) == (n - k) % n));
        let d = dihedral(n).unwrap();
        prop_assert_eq!(d.order(), 2 * n);
        validate_again(&d);
        let p = direct_product(&c, &cyclic(m).unwrap());
        validate_again(&p);
        for g in [&c, &d, &p] {
            for x in g.elements() {
                let mut l = g.left_translation(x);
                l.sort_unstable();
                prop_assert_eq!(l, g.elements().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn derived_identities_hold(fixture in 0usize..9, seed in any::<u64>()) {
        let phi = random_acp(fixture, seed);
        let limit = 1e-9 * phi.norm_max().max(1.0);
        prop_assert!(verify_acp(&phi, &tol()).is_acp());
        for g in phi.group().elements() {
            prop_assert!(phi.at(phi.alpha().apply(g)).max_abs_diff(phi.at(g)) <= limit);
            prop_assert!(phi.at(phi.group().inv(g)).max_abs_diff(&phi.at(g).adjoint()) <= limit);
        }
    }

    #[test]
    fn tuple_matrices_are_gram_compressions(fixture in 0usize..9, seed in any::<u64>(), len in 1usize..=7) {
        let phi = random_acp(fixture, seed);
        let gram = gram_matrix(&phi).flat;
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..10 {
            let tuple: Vec<usize> = (0..len).map(|_| r.random_range(0..phi.n())).collect();
            let sel = selection(phi.n(), phi.d(), &tuple);
            let tm = tuple_matrix(&phi, &tuple);
            prop_assert!(tm.max_abs_diff(&(&(&sel.adjoint() * &gram) * &sel)) <= 1e-10 * gram.norm_2());
            prop_assert!(psd_check(&tm, &tol()).unwrap().is_psd);
        }
    }

    #[test]
    fn verification_is_scale_invariant(fixture in 0usize..9, c in 0.01f64..100.0) {
        let (_, phi) = acp_fixtures().swap_remove(fixture);
        let base = verify_acp(&phi, &tol());
        let scaled = verify_acp(&phi.scale(c), &tol());
        prop_assert_eq!(base.is_acp(), scaled.is_acp());
        let k0 = base.k_min.unwrap().value().unwrap();
        let k1 = scaled.k_min.unwrap().value().unwrap();
        prop_assert!((k1 - c * k0).abs() <= 1e-8 * (c * k0).max(1.0));
        for (a, b) in base.m_min.unwrap().iter().zip(scaled.m_min.unwrap().iter()) {
            prop_assert!((a.value().unwrap() - b.value().unwrap()).abs() <= 1e-8 * a.value().unwrap().max(1.0));
        }
    }

    #[test]
    fn domination_is_monotone(fixture in 0usize..9, seed in any::<u64>()) {
        let (_, phi) = acp_fixtures().swap_remove(fixture);
        let psi = random_acp(fixture, seed);
        let mut seen = false;
        for step in 0..30 {
            let lambda = 0.1 * step as f64;
            let holds = dominates(&psi, &phi, lambda, &tol()).unwrap();
            prop_assert!(holds || !seen, "domination lost at λ = {}", lambda);
            seen |= holds;
        }
    }

    #[test]
    fn compression_round_trip(fixture in 0usize..9, seed in any::<u64>()) {
        let phi = random_acp(fixture, seed);
        let t = dilate(&phi, &tol()).unwrap();
        let back = compress_map(&t.as_quadruple(), &t.group, &t.alpha, true, &tol()).unwrap();
        prop_assert!(back.max_abs_diff(&phi) <= 1e-8 * phi.norm_max().max(1.0));
    }

    #[test]
    fn algebra_extension_identities(fixture in 0usize..9, seed in any::<u64>()) {
        let phi = random_acp(fixture, seed);
        let t = dilate(&phi, &tol()).unwrap();
        let f = AlgebraElement::random(phi.n(), &mut rng(seed));
        let scale = f.l1() * phi.norm_max().max(1.0);
        let lhs = eval_extended_map(&phi, &star(phi.group(), &f));
        prop_assert!(lhs.max_abs_diff(&eval_extended_map(&phi, &f).adjoint()) <= 1e-9 * scale);
        let lhs = eval_extended_map(&phi, &alpha_tilde(&f, phi.alpha()));
        prop_assert!(lhs.max_abs_diff(&eval_extended_map(&phi, &f)) <= 1e-9 * scale);
        let e = AlgebraElement::delta(phi.n(), phi.group().identity());
        prop_assert!(eval_extended_rep(&t, &e).max_abs_diff(&CMatrix::identity(t.m())) <= 1e-9);
    }
}
