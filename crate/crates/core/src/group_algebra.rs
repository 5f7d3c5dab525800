//! Linear extensions of maps and representations to the group algebra ℂ[G].

use rand::Rng;

use crate::acp::OperatorMap;
use crate::dilation::DilationTriple;
use crate::group::{FiniteGroup, Involution};
use crate::numerics::random::{complex_gaussian, rng};
use crate::numerics::{CMatrix, C64};
use crate::radon_nikodym::RnCertificate;

/// `f = Σ f(g)·δ_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<C64>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn delta(n: usize, g: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[g] = C64::new(1.0, 0.0);
        f
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            coeffs: (0..n).map(|_| complex_gaussian(rng)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }
}

/// `(f ⋆ h)(x) = Σ_{gk = x} f(g)h(k)`.
pub fn convolution(group: &FiniteGroup, f: &AlgebraElement, h: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(group.order());
    for g in group.elements() {
        for k in group.elements() {
            out.coeffs[group.mul(g, k)] += f.coeffs[g] * h.coeffs[k];
        }
    }
    out
}

/// `f*(g) = conj(f(g⁻¹))`.
pub fn star(group: &FiniteGroup, f: &AlgebraElement) -> AlgebraElement {
    AlgebraElement {
        coeffs: group
            .elements()
            .map(|g| f.coeffs[group.inv(g)].conj())
            .collect(),
    }
}

/// `α̃(f) = f∘α`.
pub fn alpha_tilde(f: &AlgebraElement, alpha: &Involution) -> AlgebraElement {
    AlgebraElement {
        coeffs: (0..f.coeffs.len())
            .map(|g| f.coeffs[alpha.apply(g)])
            .collect(),
    }
}

fn weighted_sum(mats: &[CMatrix], f: &AlgebraElement) -> CMatrix {
    let (r, c) = mats[0].shape();
    mats.iter()
        .zip(&f.coeffs)
        .fold(CMatrix::zeros(r, c), |acc, (m, &z)| &acc + &m.scale_c(z))
}

/// `φ̃(f) = Σ f(g)·φ(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedMap {
    pub base: OperatorMap,
}

impl ExtendedMap {
    pub fn new(base: OperatorMap) -> Self {
        Self { base }
    }

    pub fn eval(&self, f: &AlgebraElement) -> CMatrix {
        eval_extended_map(&self.base, f)
    }
}

pub fn eval_extended_map(phi: &OperatorMap, f: &AlgebraElement) -> CMatrix {
    weighted_sum(phi.mats(), f)
}

/// `π̃(f) = Σ f(g)·π(g)`.
pub fn eval_extended_rep(t: &DilationTriple, f: &AlgebraElement) -> CMatrix {
    weighted_sum(&t.pi, f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub samples: usize,
    pub max_residual: f64,
    /// Largest residual divided by its own scale.
    pub max_relative: f64,
}

impl SampleReport {
    pub fn passes(&self, limit: f64) -> bool {
        self.max_relative <= limit
    }
}

/// `‖π̃(f⋆h) − π̃(f)π̃(h)‖₂` over seeded random pairs, relative to
/// `‖f‖₁‖h‖₁·max‖π(g)‖₂²`.
pub fn multiplicativity_check(t: &DilationTriple, samples: usize, seed: u64) -> SampleReport {
    let mut r = rng(seed);
    let n = t.group.order();
    let pi_scale = t.pi_norm();
    let mut report = SampleReport {
        samples,
        max_residual: 0.0,
        max_relative: 0.0,
    };
    for _ in 0..samples {
        let f = AlgebraElement::random(n, &mut r);
        let h = AlgebraElement::random(n, &mut r);
        let lhs = eval_extended_rep(t, &convolution(&t.group, &f, &h));
        let rhs = &eval_extended_rep(t, &f) * &eval_extended_rep(t, &h);
        let res = (&lhs - &rhs).norm_2();
        report.max_residual = report.max_residual.max(res);
        report.max_relative = report
            .max_relative
            .max(res / (f.l1() * h.l1() * pi_scale * pi_scale).max(1.0));
    }
    report
}

/// `ψ̃(f) = V_φ*·Δ_φ(ψ)·π̃_φ(f)·V_φ` over seeded random `f`, relative to
/// `max(1, ‖f‖₁·‖ψ‖_max)`.
pub fn rn_correspondence_check(
    tphi: &DilationTriple,
    cert: &RnCertificate,
    psi: &OperatorMap,
    samples: usize,
    seed: u64,
) -> SampleReport {
    let mut r = rng(seed);
    let n = tphi.group.order();
    let left = &tphi.v.adjoint() * &cert.t;
    let mut report = SampleReport {
        samples,
        max_residual: 0.0,
        max_relative: 0.0,
    };
    for _ in 0..samples {
        let f = AlgebraElement::random(n, &mut r);
        let lhs = eval_extended_map(psi, &f);
        let rhs = &(&left * &eval_extended_rep(tphi, &f)) * &tphi.v;
        let res = lhs.max_abs_diff(&rhs);
        report.max_residual = report.max_residual.max(res);
        report.max_relative = report
            .max_relative
            .max(res / (f.l1() * psi.norm_max()).max(1.0));
    }
    report
}
