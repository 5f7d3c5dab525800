//! Radon–Nikodym derivatives `Δ_φ(ψ)` of uniformly dominated maps.

use rand::Rng;
use thiserror::Error;

use crate::acp::{
    dominates, find_domination_constant, verify_acp, AcpError, DominationSearch, OperatorMap,
};
use crate::dilation::{
    construct_minimal, equivalence_residuals, unitary_equivalence, DilationError, DilationTriple,
    Equivalence, EquivalenceResiduals, KreinSpace,
};
use crate::numerics::{
    herm_eig, pinv, psd_check, psd_inv_sqrt, psd_sqrt, rank, CMatrix, NumericsError, Tolerance,
    C64, CERT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RnError {
    #[error("operator violates the {0} constraint")]
    ConstraintViolated(Constraint),
    #[error("ker Gamma_phi is not contained in ker Gamma_psi (leak {leak:e}); psi is not uniformly dominated")]
    KernelNotContained { leak: f64 },
    #[error(
        "V* T pi(g) V does not reproduce psi (residual {residual:e}); domination inconclusive"
    )]
    ReconstructionFailed { residual: f64 },
    #[error("maps are not uniformly equivalent: {0}")]
    NotUniformlyEquivalent(String),
    #[error("certificate failed: {0}")]
    CertificateFailed(String),
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Acp(#[from] AcpError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Commutant,
    JCommutation,
    Positivity,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Constraint::Commutant => "commutant",
            Constraint::JCommutation => "J-commutation",
            Constraint::Positivity => "positivity",
        })
    }
}

/// Verifies the map, builds its minimal dilation and returns the triple.
pub fn dilate(phi: &OperatorMap, tol: &Tolerance) -> Result<DilationTriple, RnError> {
    let report = verify_acp(phi, tol);
    Ok(construct_minimal(phi, &report, tol)?.0)
}

fn commutation_residuals(t: &DilationTriple, op: &CMatrix) -> (f64, f64) {
    let pi =
        t.pi.iter()
            .fold(0.0_f64, |r, p| r.max(op.commutator(p).norm_2()));
    (pi, op.commutator(t.j()).norm_2())
}

/// `g ↦ V*·T·π(g)·V` for `T ⪰ 0` in the commutant of `π(G)` and of `J`.
pub fn phi_t(t: &DilationTriple, op: &CMatrix, tol: &Tolerance) -> Result<OperatorMap, RnError> {
    if op.shape() != (t.m(), t.m()) {
        return Err(
            NumericsError::ShapeMismatch(format!("T is {:?}, m = {}", op.shape(), t.m())).into(),
        );
    }
    let psd =
        psd_check(op, tol).map_err(|_| RnError::ConstraintViolated(Constraint::Positivity))?;
    if !psd.is_psd {
        return Err(RnError::ConstraintViolated(Constraint::Positivity));
    }
    let scale = op.norm_2().max(1.0);
    let (rp, rj) = commutation_residuals(t, op);
    if rp > CERT_TOL * scale * t.pi_norm() {
        return Err(RnError::ConstraintViolated(Constraint::Commutant));
    }
    if rj > CERT_TOL * scale {
        return Err(RnError::ConstraintViolated(Constraint::JCommutation));
    }
    let left = &t.v.adjoint() * op;
    Ok(OperatorMap::new(
        t.group.clone(),
        t.alpha.clone(),
        t.pi.iter().map(|p| &(&left * p) * &t.v).collect(),
    )?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Intertwiner {
    pub s: CMatrix,
    pub kernel_leak: f64,
    pub pi: f64,
    pub v: f64,
    pub j: f64,
}

fn gram_of(t: &DilationTriple) -> CMatrix {
    &t.e.adjoint() * &t.e
}

/// `S = E_ψ·E_φ⁺ : H_φ → H_ψ`, the operator with `S π_φ(g)V_φ ξ = π_ψ(g)V_ψ ξ`.
pub fn intertwiner(
    tphi: &DilationTriple,
    tpsi: &DilationTriple,
    tol: &Tolerance,
) -> Result<Intertwiner, RnError> {
    if tphi.group != tpsi.group || tphi.alpha != tpsi.alpha || tphi.d != tpsi.d {
        return Err(
            AcpError::DimensionMismatch("triples over different (G, alpha, d)".into()).into(),
        );
    }
    let n = tphi.e.cols();
    let p_ker = &CMatrix::identity(n) - &(&tphi.e_pinv * &tphi.e);
    let gamma_psi = gram_of(tpsi);
    let leak = (&gamma_psi * &p_ker).norm_2();
    if leak > tol.eps_psd * gamma_psi.norm_2().max(1.0) {
        return Err(RnError::KernelNotContained { leak });
    }
    let s = &tpsi.e * &tphi.e_pinv;
    let pi = tphi
        .pi
        .iter()
        .zip(&tpsi.pi)
        .fold(0.0_f64, |r, (a, b)| r.max((&(&s * a) - &(b * &s)).norm_2()));
    let v = (&(&s * &tphi.v) - &tpsi.v).norm_2();
    let j = (&(&s * tphi.j()) - &(tpsi.j() * &s)).norm_2();
    let scale = s.norm_2().max(1.0) * tphi.pi_norm().max(tpsi.pi_norm());
    let vscale = tpsi.v.norm_2().max(1.0);
    if pi > CERT_TOL * scale || j > CERT_TOL * scale || v > CERT_TOL * vscale {
        return Err(RnError::CertificateFailed(format!(
            "intertwiner residuals pi {pi:e}, V {v:e}, J {j:e}"
        )));
    }
    Ok(Intertwiner {
        s,
        kernel_leak: leak,
        pi,
        v,
        j,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnResiduals {
    pub commutation: f64,
    pub j_commutation: f64,
    pub lambda_min: f64,
    pub reconstruction: f64,
    pub commutant_projection: f64,
    pub intertwiner_pi: f64,
    pub intertwiner_v: f64,
    pub intertwiner_j: f64,
    pub kernel_leak: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnCertificate {
    pub t: CMatrix,
    pub s: CMatrix,
    pub residuals: RnResiduals,
    pub unique: bool,
    pub commutant_dim: usize,
    /// Dimension of `{T′ in the commutant : V*T′π(g)V = 0 ∀g}`.
    pub solution_dim: usize,
}

/// `T = S*S` with its full certificate.
pub fn rn_derivative(
    tphi: &DilationTriple,
    tpsi: &DilationTriple,
    tol: &Tolerance,
) -> Result<RnCertificate, RnError> {
    let sw = intertwiner(tphi, tpsi, tol)?;
    let t = (&sw.s.adjoint() * &sw.s).hermitian_part();
    let (commutation, j_commutation) = commutation_residuals(tphi, &t);
    let lambda_min = herm_eig(&t, tol)?.lambda_min();
    let psi = tpsi.compress();
    let left = &tphi.v.adjoint() * &t;
    let reconstruction = tphi.pi.iter().enumerate().fold(0.0_f64, |r, (g, p)| {
        r.max((&(&left * p) * &tphi.v).max_abs_diff(psi.at(g)))
    });
    let psi_scale = psi.norm_max().max(1.0);
    if reconstruction > CERT_TOL * psi_scale {
        return Err(RnError::ReconstructionFailed {
            residual: reconstruction,
        });
    }
    let basis = commutant_basis(tphi, tol);
    let coeffs: Vec<f64> = basis.elements.iter().map(|b| frobenius(b, &t)).collect();
    let projected = basis.combine(&coeffs, t.rows());
    let commutant_projection = (&t - &projected).norm_fro();
    let images = basis_images(tphi, &basis);
    let injective_rank = if basis.dim() == 0 {
        0
    } else {
        rank(&images, tol)
    };
    let t_scale = t.norm_2().max(1.0);
    let residuals = RnResiduals {
        commutation,
        j_commutation,
        lambda_min,
        reconstruction,
        commutant_projection,
        intertwiner_pi: sw.pi,
        intertwiner_v: sw.v,
        intertwiner_j: sw.j,
        kernel_leak: sw.kernel_leak,
    };
    if commutation > CERT_TOL * t_scale * tphi.pi_norm()
        || j_commutation > CERT_TOL * t_scale
        || lambda_min < -CERT_TOL * t_scale
        || commutant_projection > CERT_TOL * t_scale
    {
        return Err(RnError::CertificateFailed(format!("{residuals:?}")));
    }
    Ok(RnCertificate {
        t,
        s: sw.s,
        unique: injective_rank == basis.dim(),
        commutant_dim: basis.dim(),
        solution_dim: basis.dim() - injective_rank,
        residuals,
    })
}

/// Real inner product `Re tr(A*B)`.
fn frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Columns: realified `(V*B_kπ(g)V)_g` for each basis element `B_k`.
fn basis_images(t: &DilationTriple, basis: &Commutant) -> CMatrix {
    let vs = t.v.adjoint();
    let cols: Vec<Vec<f64>> = basis
        .elements
        .iter()
        .map(|b| {
            let left = &vs * b;
            t.pi.iter()
                .flat_map(|p| realify(&(&(&left * p) * &t.v)))
                .collect()
        })
        .collect();
    real_columns(&cols)
}

fn realify(m: &CMatrix) -> Vec<f64> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn real_columns(cols: &[Vec<f64>]) -> CMatrix {
    let rows = cols.first().map_or(0, Vec::len);
    CMatrix::from_fn(rows, cols.len(), |i, j| C64::new(cols[j][i], 0.0))
}

/// Real basis of `{T = T* : Tπ(g) = π(g)T ∀g, TJ = JT}`, orthonormal for
/// `Re tr(A*B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Commutant {
    pub elements: Vec<CMatrix>,
    pub constraint_residual: f64,
}

impl Commutant {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn combine(&self, coeffs: &[f64], m: usize) -> CMatrix {
        self.elements
            .iter()
            .zip(coeffs)
            .fold(CMatrix::zeros(m, m), |acc, (b, &c)| &acc + &b.scale(c))
    }
}

/// Orthonormal Hermitian basis of `m × m` matrices: `E_aa`,
/// `(E_ab + E_ba)/√2` and `i(E_ab − E_ba)/√2` for `a < b`.
fn hermitian_basis(m: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        let mut h = CMatrix::zeros(m, m);
        h[(a, a)] = C64::new(1.0, 0.0);
        out.push(h);
    }
    for a in 0..m {
        for b in a + 1..m {
            let mut s = CMatrix::zeros(m, m);
            s[(a, b)] = C64::new(r, 0.0);
            s[(b, a)] = C64::new(r, 0.0);
            out.push(s);
            let mut k = CMatrix::zeros(m, m);
            k[(a, b)] = C64::new(0.0, -r);
            k[(b, a)] = C64::new(0.0, r);
            out.push(k);
        }
    }
    out
}

pub fn commutant_basis(t: &DilationTriple, tol: &Tolerance) -> Commutant {
    let m = t.m();
    let herm = hermitian_basis(m);
    let mut ops: Vec<&CMatrix> = t.pi.iter().collect();
    ops.push(t.j());
    let cols: Vec<Vec<f64>> = herm
        .iter()
        .map(|h| ops.iter().flat_map(|p| realify(&h.commutator(p))).collect())
        .collect();
    let c = real_columns(&cols);
    let ctc = (&c.adjoint() * &c).map(|z| C64::new(z.re, 0.0));
    let eig = herm_eig(&ctc, tol).expect("CᵀC is symmetric");
    let cutoff = tol.eps_rank * eig.lambda_max().max(1.0);
    let mut elements = Vec::new();
    let mut constraint_residual = 0.0_f64;
    for k in 0..eig.dim() {
        if eig.values[k] > cutoff {
            continue;
        }
        let coeffs: Vec<f64> = eig.vectors.column(k).iter().map(|z| z.re).collect();
        let b = herm
            .iter()
            .zip(&coeffs)
            .fold(CMatrix::zeros(m, m), |acc, (h, &x)| &acc + &h.scale(x));
        constraint_residual = constraint_residual.max(
            ops.iter()
                .fold(0.0_f64, |r, p| r.max(b.commutator(p).norm_2())),
        );
        elements.push(b);
    }
    Commutant {
        elements,
        constraint_residual,
    }
}

/// Eigenvalue clusters of a Hermitian matrix with their spectral projectors.
pub fn spectral_projectors(b: &CMatrix, tol: &Tolerance) -> Vec<(f64, CMatrix)> {
    let eig = herm_eig(b, tol).expect("commutant elements are Hermitian");
    let gap = 1e-6
        * eig
            .lambda_min()
            .abs()
            .max(eig.lambda_max().abs())
            .max(1e-300);
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &l) in eig.values.iter().enumerate() {
        match out.last_mut() {
            Some((l0, idx)) if (l - *l0).abs() <= gap => idx.push(k),
            _ => out.push((l, vec![k])),
        }
    }
    out.into_iter()
        .map(|(l, idx)| {
            let q = eig.vectors.select_columns(&idx);
            (l, &q * &q.adjoint())
        })
        .collect()
}

/// `T₀ = Σ w_k B_k²` with seeded weights `w_k ∈ [0, 1)`, rescaled to
/// `‖T₀‖₂ = 1`, plus `shift·I`.
pub fn sample_psd_commutant<R: Rng + ?Sized>(
    basis: &Commutant,
    m: usize,
    shift: f64,
    rng: &mut R,
) -> CMatrix {
    let raw = basis.elements.iter().fold(CMatrix::zeros(m, m), |acc, b| {
        let w: f64 = rng.random();
        &acc + &(b * b).scale(w)
    });
    let norm = raw.norm_2();
    let base = if norm > 0.0 {
        raw.scale(1.0 / norm)
    } else {
        raw
    };
    (&base + &CMatrix::identity(m).scale(shift)).hermitian_part()
}

/// Spectral projector of a seeded random commutant element onto its top
/// eigenvalue cluster, a singular PSD commutant element whenever the
/// commutant is not the scalars.
pub fn sample_commutant_projector<R: Rng + ?Sized>(
    basis: &Commutant,
    m: usize,
    rng: &mut R,
    tol: &Tolerance,
) -> Option<CMatrix> {
    let coeffs: Vec<f64> = (0..basis.dim())
        .map(|_| rng.random::<f64>() - 0.5)
        .collect();
    let b = basis.combine(&coeffs, m);
    let projectors = spectral_projectors(&b, tol);
    if projectors.len() < 2 {
        return None;
    }
    projectors.last().map(|(_, p)| p.hermitian_part())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub triple: DilationTriple,
    pub projector_residual: f64,
    pub equivalence: Option<Equivalence>,
}

/// ψ's minimal triple inside φ's: restrict `π_φ`, `J_φ` to `(ker T)^⊥` and
/// take `P·T^{1/2}·V_φ`.
pub fn recover_dilation(
    tphi: &DilationTriple,
    cert: &RnCertificate,
    reference: Option<&DilationTriple>,
    tol: &Tolerance,
) -> Result<Recovery, RnError> {
    let eig = herm_eig(&cert.t, tol)?;
    let cutoff = tol.eps_rank * eig.lambda_max().max(0.0);
    let q = eig.vectors.select_columns(&eig.indices_above(cutoff));
    let qs = q.adjoint();
    let p = &q * &qs;
    let (rp, rj) = commutation_residuals(tphi, &p);
    let projector_residual = rp.max(rj);
    if projector_residual > CERT_TOL * tphi.pi_norm() {
        return Err(RnError::CertificateFailed(format!(
            "kernel projector does not commute (residual {projector_residual:e})"
        )));
    }
    let root = psd_sqrt(&cert.t, tol)?;
    let qroot = &qs * &root;
    let e = &qroot * &tphi.e;
    let triple = DilationTriple {
        group: tphi.group.clone(),
        alpha: tphi.alpha.clone(),
        d: tphi.d,
        krein: KreinSpace {
            j: &(&qs * tphi.j()) * &q,
        },
        pi: tphi.pi.iter().map(|x| &(&qs * x) * &q).collect(),
        v: &qroot * &tphi.v,
        e_pinv: pinv(&e, tol),
        e,
    };
    let equivalence = reference
        .map(|r| unitary_equivalence(&triple, r, tol))
        .transpose()?;
    Ok(Recovery {
        triple,
        projector_residual,
        equivalence,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformEquivalence {
    pub u: CMatrix,
    /// `unitarity`, `UJ_φ = J_ψU`, `UV_φ = V_ψ` and `Uπ_φ(g) = π_ψ(g)U`.
    pub residuals: EquivalenceResiduals,
    /// `‖U·Δ^{1/2}·V_φ − V_ψ‖₂`.
    pub polar_v: f64,
}

impl UniformEquivalence {
    pub fn v_identity_holds(&self) -> bool {
        self.residuals.v <= CERT_TOL * self.u.norm_2().max(1.0)
    }
}

/// `U = S·Δ_φ(ψ)^{−1/2}` for uniformly equivalent `φ`, `ψ`. Unitarity and the
/// `J` and `π` intertwining relations are certified; the relation
/// `UV_φ = V_ψ` is reported as measured.
pub fn uniform_equiv_unitary(
    tphi: &DilationTriple,
    tpsi: &DilationTriple,
    tol: &Tolerance,
) -> Result<UniformEquivalence, RnError> {
    let not = |msg: String| RnError::NotUniformlyEquivalent(msg);
    if tphi.m() != tpsi.m() {
        return Err(not(format!(
            "dimensions differ ({} vs {})",
            tphi.m(),
            tpsi.m()
        )));
    }
    let s1 = match intertwiner(tphi, tpsi, tol) {
        Ok(s) => s.s,
        Err(RnError::KernelNotContained { .. }) => {
            return Err(not("psi is not dominated by phi".into()))
        }
        Err(e) => return Err(e),
    };
    match intertwiner(tpsi, tphi, tol) {
        Ok(_) => {}
        Err(RnError::KernelNotContained { .. }) => {
            return Err(not("phi is not dominated by psi".into()))
        }
        Err(e) => return Err(e),
    }
    let t = (&s1.adjoint() * &s1).hermitian_part();
    let eig = herm_eig(&t, tol)?;
    let (lo, hi) = (eig.lambda_min().max(0.0), eig.lambda_max());
    if hi <= 0.0 || lo.sqrt() <= tol.eps_rank * hi.sqrt() {
        return Err(not(format!(
            "S is not invertible (sigma_min^2 = {lo:e}, sigma_max^2 = {hi:e})"
        )));
    }
    let u = &s1 * &psd_inv_sqrt(&t, tol)?;
    let residuals = equivalence_residuals(&u, tphi, tpsi);
    let scale = tphi.pi_norm().max(tpsi.pi_norm());
    if residuals.unitarity > CERT_TOL || residuals.j > CERT_TOL || residuals.pi > CERT_TOL * scale {
        return Err(RnError::CertificateFailed(format!("{residuals:?}")));
    }
    let polar_v = (&(&u * &(&psd_sqrt(&t, tol)? * &tphi.v)) - &tpsi.v).norm_2();
    Ok(UniformEquivalence {
        u,
        residuals,
        polar_v,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderCheck {
    pub lambda: f64,
    pub dominated: bool,
    pub lambda_min: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineReport {
    pub t: f64,
    pub deviation: f64,
    pub scale: f64,
    pub order: Option<OrderCheck>,
}

impl AffineReport {
    pub fn affine_ok(&self) -> bool {
        self.deviation <= CERT_TOL * self.scale
    }
}

/// `Δ_φ` of a map, through its own minimal dilation.
pub fn derivative_of(
    tphi: &DilationTriple,
    psi: &OperatorMap,
    tol: &Tolerance,
) -> Result<RnCertificate, RnError> {
    rn_derivative(tphi, &dilate(psi, tol)?, tol)
}

/// Compares `Δ(tψ₁ + (1 − t)ψ₂)` with `tΔ(ψ₁) + (1 − t)Δ(ψ₂)`, and checks
/// `λΔ(ψ₂) − Δ(ψ₁) ⪰ 0` whenever `λψ₂ − ψ₁` is α-completely positive.
pub fn affine_check(
    tphi: &DilationTriple,
    psi1: &OperatorMap,
    psi2: &OperatorMap,
    t: f64,
    lambda: Option<f64>,
    tol: &Tolerance,
) -> Result<AffineReport, RnError> {
    let d1 = derivative_of(tphi, psi1, tol)?.t;
    let d2 = derivative_of(tphi, psi2, tol)?.t;
    let mix = psi1.combine(t, psi2, 1.0 - t)?;
    let dm = derivative_of(tphi, &mix, tol)?.t;
    let expected = &d1.scale(t) + &d2.scale(1.0 - t);
    let deviation = (&dm - &expected).norm_2();
    let scale = d1.norm_2().max(d2.norm_2()).max(1.0);

    let lambda = match lambda {
        Some(l) => Some(l),
        None => match find_domination_constant(psi1, psi2, 1e3, 200, tol)? {
            DominationSearch::Found(l) => Some(l),
            _ => None,
        },
    };
    let order = match lambda {
        Some(l) => {
            let dominated = dominates(psi1, psi2, l, tol)?;
            let gap = &d2.scale(l) - &d1;
            let lambda_min = herm_eig(&gap.hermitian_part(), tol)?.lambda_min();
            let gscale = (l * d2.norm_2()).max(d1.norm_2()).max(1.0);
            Some(OrderCheck {
                lambda: l,
                dominated,
                lambda_min,
                holds: !dominated || lambda_min >= -CERT_TOL * gscale,
            })
        }
        None => None,
    };
    Ok(AffineReport {
        t,
        deviation,
        scale,
        order,
    })
}
