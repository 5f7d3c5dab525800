//! Minimal Krein-space Stinespring dilations `(π_φ, (H_φ, J_φ), V_φ)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::acp::{AcpReport, OperatorMap};
use crate::group::{FiniteGroup, Involution};
use crate::numerics::{lstsq_map, rank, CMatrix, Tolerance, C64, CERT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DilationError {
    #[error("map is not alpha-completely positive")]
    NotAcp,
    #[error("kernel of the Gram matrix is not invariant under {what} (residual {residual:e})")]
    QuotientNotInvariant { what: String, residual: f64 },
    #[error("constructed triple failed certification: {0}")]
    CertificateFailed(String),
    #[error("quadruple has no value at element {0}")]
    UndefinedElement(i64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(Clause),
    #[error("triples are not unitarily equivalent: {0}")]
    NotEquivalent(String),
    #[error("J is not a fundamental symmetry (residual {0:e})")]
    NotFundamentalSymmetry(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    Morphism,
    JUnitary,
    Span,
    Intertwining,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Clause::Morphism => "morphism",
            Clause::JUnitary => "J-unitarity",
            Clause::Span => "minimal span",
            Clause::Intertwining => "intertwining",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KreinSpace {
    pub j: CMatrix,
}

impl KreinSpace {
    pub fn new(j: CMatrix) -> Result<Self, DilationError> {
        let r = fundamental_symmetry_residual(&j);
        if r > CERT_TOL {
            return Err(DilationError::NotFundamentalSymmetry(r));
        }
        Ok(Self { j })
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    /// `[x, y] = ⟨Jx, y⟩`, linear in the first slot.
    pub fn product(&self, x: &[C64], y: &[C64]) -> C64 {
        self.j
            .mul_vec(x)
            .iter()
            .zip(y)
            .map(|(a, b)| a * b.conj())
            .sum()
    }
}

/// `max(‖J − J*‖₂, ‖J² − I‖₂)`.
pub fn fundamental_symmetry_residual(j: &CMatrix) -> f64 {
    if !j.is_square() {
        return f64::INFINITY;
    }
    let id = CMatrix::identity(j.rows());
    (j - &j.adjoint()).norm_2().max((&(j * j) - &id).norm_2())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DilationTriple {
    pub group: FiniteGroup,
    pub alpha: Involution,
    pub d: usize,
    pub krein: KreinSpace,
    pub pi: Vec<CMatrix>,
    pub v: CMatrix,
    /// Quotient factor `F(G, H) → H_φ`, `m × n·d`.
    pub e: CMatrix,
    pub e_pinv: CMatrix,
}

impl DilationTriple {
    pub fn m(&self) -> usize {
        self.v.rows()
    }

    pub fn j(&self) -> &CMatrix {
        &self.krein.j
    }

    /// Columns `π(g)Vξ_k` in lexicographic `(g, k)` order.
    pub fn span_matrix(&self) -> CMatrix {
        CMatrix::hstack(&self.pi.iter().map(|p| p * &self.v).collect::<Vec<_>>())
    }

    pub fn pi_norm(&self) -> f64 {
        self.pi.iter().fold(1.0_f64, |m, p| m.max(p.norm_2()))
    }

    pub fn compress(&self) -> OperatorMap {
        OperatorMap::new(
            self.group.clone(),
            self.alpha.clone(),
            self.pi
                .iter()
                .map(|p| &(&self.v.adjoint() * p) * &self.v)
                .collect(),
        )
        .expect("compression has consistent shapes")
    }

    pub fn as_quadruple(&self) -> Quadruple {
        Quadruple {
            krein: self.krein.clone(),
            pi_at: self
                .pi
                .iter()
                .enumerate()
                .map(|(g, p)| (g as i64, p.clone()))
                .collect(),
            v: self.v.clone(),
        }
    }
}

/// `(E·L_g)`: column block `h` of `E` replaced by column block `g·h`.
fn e_times_translation(e: &CMatrix, group: &FiniteGroup, d: usize, g: usize) -> CMatrix {
    let mut out = CMatrix::zeros(e.rows(), e.cols());
    for h in group.elements() {
        out.set_submatrix(0, h * d, &e.columns(group.mul(g, h) * d, d));
    }
    out
}

/// `(E·A_α)` with `(A_α f)(h) = f(α(h))`.
fn e_times_alpha(e: &CMatrix, alpha: &Involution, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(e.rows(), e.cols());
    for k in 0..alpha.perm().len() {
        out.set_submatrix(0, k * d, &e.columns(alpha.apply(k) * d, d));
    }
    out
}

/// Builds `π_φ(g) = E·L_g·E⁺`, `J_φ = E·A_α·E⁺`, `V_φ = E·ι_e` on the
/// recorded range factor of `Γ_φ` and certifies the result.
pub fn construct_minimal(
    phi: &OperatorMap,
    report: &AcpReport,
    tol: &Tolerance,
) -> Result<(DilationTriple, TripleReport), DilationError> {
    if !report.is_acp() {
        return Err(DilationError::NotAcp);
    }
    let factor = report.factor.as_ref().ok_or(DilationError::NotAcp)?;
    let (group, alpha, d) = (phi.group(), phi.alpha(), phi.d());
    let e = &factor.e;
    let limit = tol.eps_rank.sqrt() * e.norm_2();
    let leak = |m: &CMatrix| {
        if factor.kernel.cols() == 0 {
            0.0
        } else {
            (m * &factor.kernel).norm_2()
        }
    };

    let mut pi = Vec::with_capacity(phi.n());
    for g in group.elements() {
        let el = e_times_translation(e, group, d, g);
        let r = leak(&el);
        if r > limit {
            return Err(DilationError::QuotientNotInvariant {
                what: format!("L_{g}"),
                residual: r,
            });
        }
        pi.push(&el * &factor.e_pinv);
    }
    let ea = e_times_alpha(e, alpha, d);
    let r = leak(&ea);
    if r > limit {
        return Err(DilationError::QuotientNotInvariant {
            what: "A_alpha".into(),
            residual: r,
        });
    }
    let j = &ea * &factor.e_pinv;
    let triple = DilationTriple {
        group: group.clone(),
        alpha: alpha.clone(),
        d,
        krein: KreinSpace { j },
        pi,
        v: e.columns(group.identity() * d, d),
        e: e.clone(),
        e_pinv: factor.e_pinv.clone(),
    };
    let check = verify_triple(&triple, phi, tol);
    if !check.passes() {
        return Err(DilationError::CertificateFailed(check.summary()));
    }
    Ok((triple, check))
}

/// Residuals of every dilation property; each is compared with
/// `CERT_TOL` times its own scale.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleReport {
    pub m: usize,
    pub span_rank: usize,
    pub reconstruction: f64,
    pub identity: f64,
    pub morphism: f64,
    pub j_unitarity: f64,
    pub fundamental_symmetry: f64,
    pub intertwining: f64,
    pub remark_form: f64,
    pub jv: f64,
    pub map_scale: f64,
    pub pi_scale: f64,
}

impl TripleReport {
    pub fn reconstruction_ok(&self) -> bool {
        self.reconstruction <= CERT_TOL * self.map_scale
    }

    pub fn representation_ok(&self) -> bool {
        self.identity <= CERT_TOL
            && self.morphism <= CERT_TOL * self.pi_scale * self.pi_scale
            && self.j_unitarity <= CERT_TOL * self.pi_scale
            && self.fundamental_symmetry <= CERT_TOL
    }

    pub fn minimal(&self) -> bool {
        self.span_rank == self.m
    }

    pub fn intertwining_ok(&self) -> bool {
        self.intertwining <= CERT_TOL * self.pi_scale * self.map_scale.sqrt()
    }

    pub fn remark_form_ok(&self) -> bool {
        self.remark_form <= CERT_TOL * self.map_scale
    }

    pub fn jv_ok(&self) -> bool {
        self.jv <= CERT_TOL * self.map_scale.sqrt()
    }

    pub fn passes(&self) -> bool {
        self.passes_weak() && self.intertwining_ok() && self.jv_ok()
    }

    /// All properties except `Jπ(g)V = π(α(g))V` and `JV = V`, the form
    /// satisfied by the flipped operator `J_φV_φ` as well.
    pub fn passes_weak(&self) -> bool {
        self.reconstruction_ok()
            && self.representation_ok()
            && self.minimal()
            && self.remark_form_ok()
    }

    pub fn max_residual(&self) -> f64 {
        [
            self.reconstruction,
            self.identity,
            self.morphism,
            self.j_unitarity,
            self.fundamental_symmetry,
            self.intertwining,
            self.remark_form,
            self.jv,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> String {
        let mut bad = Vec::new();
        if !self.reconstruction_ok() {
            bad.push(format!("reconstruction {:e}", self.reconstruction));
        }
        if !self.representation_ok() {
            bad.push(format!(
                "representation (identity {:e}, morphism {:e}, J-unitarity {:e}, J {:e})",
                self.identity, self.morphism, self.j_unitarity, self.fundamental_symmetry
            ));
        }
        if !self.minimal() {
            bad.push(format!("span rank {} < m = {}", self.span_rank, self.m));
        }
        if !self.intertwining_ok() {
            bad.push(format!("intertwining {:e}", self.intertwining));
        }
        if !self.remark_form_ok() {
            bad.push(format!("V*pi(g)*pi(h)V form {:e}", self.remark_form));
        }
        if !self.jv_ok() {
            bad.push(format!("JV = V {:e}", self.jv));
        }
        if bad.is_empty() {
            "all properties hold".into()
        } else {
            bad.join("; ")
        }
    }
}

pub fn verify_triple(t: &DilationTriple, phi: &OperatorMap, tol: &Tolerance) -> TripleReport {
    let (group, alpha) = (&t.group, &t.alpha);
    let m = t.m();
    let j = t.j();
    let id = CMatrix::identity(m);
    let vs = t.v.adjoint();
    let pv: Vec<CMatrix> = t.pi.iter().map(|p| p * &t.v).collect();

    let mut reconstruction = 0.0_f64;
    let mut morphism = 0.0_f64;
    let mut j_unitarity = 0.0_f64;
    let mut intertwining = 0.0_f64;
    let mut remark_form = 0.0_f64;
    for g in group.elements() {
        reconstruction = reconstruction.max((&vs * &pv[g]).max_abs_diff(phi.at(g)));
        let jpj = &(j * &t.pi[g].adjoint()) * j;
        j_unitarity = j_unitarity.max((&t.pi[group.inv(g)] - &jpj).norm_2());
        intertwining = intertwining.max((&(j * &pv[g]) - &pv[alpha.apply(g)]).norm_2());
        let left = pv[g].adjoint();
        for h in group.elements() {
            morphism = morphism.max((&(&t.pi[g] * &t.pi[h]) - &t.pi[group.mul(g, h)]).norm_2());
            let target = &vs * &pv[group.mul(alpha.apply(group.inv(g)), h)];
            remark_form = remark_form.max((&left * &pv[h]).max_abs_diff(&target));
        }
    }
    TripleReport {
        m,
        span_rank: rank(&t.span_matrix(), tol),
        reconstruction,
        identity: (&t.pi[group.identity()] - &id).norm_2(),
        morphism,
        j_unitarity,
        fundamental_symmetry: fundamental_symmetry_residual(j),
        intertwining,
        remark_form,
        jv: (&(j * &t.v) - &t.v).norm_2(),
        map_scale: phi.norm_max().max(1.0),
        pi_scale: t.pi_norm(),
    }
}

/// Candidate `(π, (H, J), V)` with `π` known only at some elements; nothing
/// about it is assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadruple {
    pub krein: KreinSpace,
    pub pi_at: BTreeMap<i64, CMatrix>,
    pub v: CMatrix,
}

pub fn compress_at(q: &Quadruple, g: i64) -> Result<CMatrix, DilationError> {
    let p = q.pi_at.get(&g).ok_or(DilationError::UndefinedElement(g))?;
    Ok(&(&q.v.adjoint() * p) * &q.v)
}

/// `g ↦ V*π(g)V` over a finite group. With `certify`, the hypotheses under
/// which the result is α-completely positive are checked first.
pub fn compress_map(
    q: &Quadruple,
    group: &FiniteGroup,
    alpha: &Involution,
    certify: bool,
    tol: &Tolerance,
) -> Result<OperatorMap, DilationError> {
    let pi: Vec<CMatrix> = group
        .elements()
        .map(|g| {
            q.pi_at
                .get(&(g as i64))
                .cloned()
                .ok_or(DilationError::UndefinedElement(g as i64))
        })
        .collect::<Result<_, _>>()?;
    if certify {
        if let Some(c) = quadruple_precondition(q, &pi, group, alpha, tol) {
            return Err(DilationError::PreconditionFailed(c));
        }
    }
    let vs = q.v.adjoint();
    OperatorMap::new(
        group.clone(),
        alpha.clone(),
        pi.iter().map(|p| &(&vs * p) * &q.v).collect(),
    )
    .map_err(|e| DilationError::CertificateFailed(e.to_string()))
}

fn quadruple_precondition(
    q: &Quadruple,
    pi: &[CMatrix],
    group: &FiniteGroup,
    alpha: &Involution,
    tol: &Tolerance,
) -> Option<Clause> {
    let j = &q.krein.j;
    let m = j.rows();
    let scale = pi.iter().fold(1.0_f64, |s, p| s.max(p.norm_2()));
    let id = CMatrix::identity(m);
    let morphism = (&pi[group.identity()] - &id).norm_2() <= CERT_TOL
        && group.elements().all(|g| {
            group.elements().all(|h| {
                (&(&pi[g] * &pi[h]) - &pi[group.mul(g, h)]).norm_2() <= CERT_TOL * scale * scale
            })
        });
    if !morphism {
        return Some(Clause::Morphism);
    }
    let j_unitary = group
        .elements()
        .all(|g| (&pi[group.inv(g)] - &(&(j * &pi[g].adjoint()) * j)).norm_2() <= CERT_TOL * scale);
    if !j_unitary {
        return Some(Clause::JUnitary);
    }
    let span = CMatrix::hstack(&pi.iter().map(|p| p * &q.v).collect::<Vec<_>>());
    if rank(&span, tol) != m {
        return Some(Clause::Span);
    }
    let vscale = q.v.norm_2().max(1.0);
    let intertwines = group.elements().all(|g| {
        (&(&(j * &pi[g]) * &q.v) - &(&pi[alpha.apply(g)] * &q.v)).norm_2()
            <= CERT_TOL * scale * vscale
    });
    if !intertwines {
        return Some(Clause::Intertwining);
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceResiduals {
    pub lstsq: f64,
    pub unitarity: f64,
    pub j: f64,
    pub v: f64,
    pub pi: f64,
}

impl EquivalenceResiduals {
    pub fn max(&self) -> f64 {
        [self.lstsq, self.unitarity, self.j, self.v, self.pi]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub u: CMatrix,
    pub residuals: EquivalenceResiduals,
}

/// Residuals of `U` as an isomorphism of triples: unitarity, `UJ₁ = J₂U`,
/// `UV₁ = V₂`, `Uπ₁(g) = π₂(g)U`.
pub fn equivalence_residuals(
    u: &CMatrix,
    t1: &DilationTriple,
    t2: &DilationTriple,
) -> EquivalenceResiduals {
    let m = u.rows();
    let id = CMatrix::identity(m);
    let us = u.adjoint();
    let unitarity = (&(&us * u) - &id).norm_2().max((&(u * &us) - &id).norm_2());
    let j = (&(u * t1.j()) - &(t2.j() * u)).norm_2();
    let v = (&(u * &t1.v) - &t2.v).norm_2();
    let pi = t1.pi.iter().zip(&t2.pi).fold(0.0_f64, |r, (p1, p2)| {
        r.max((&(u * p1) - &(p2 * u)).norm_2())
    });
    EquivalenceResiduals {
        lstsq: 0.0,
        unitarity,
        j,
        v,
        pi,
    }
}

fn certify_equivalence(
    u: CMatrix,
    lstsq: f64,
    t1: &DilationTriple,
    t2: &DilationTriple,
) -> Result<Equivalence, DilationError> {
    let mut residuals = equivalence_residuals(&u, t1, t2);
    residuals.lstsq = lstsq;
    let scale = t1.pi_norm().max(t2.pi_norm());
    let vscale = t1.v.norm_2().max(t2.v.norm_2()).max(1.0);
    let checks = [
        ("least-squares", lstsq, CERT_TOL * vscale),
        ("unitarity", residuals.unitarity, CERT_TOL),
        ("UJ = JU", residuals.j, CERT_TOL),
        ("UV = V", residuals.v, CERT_TOL * vscale),
        ("U pi = pi U", residuals.pi, CERT_TOL * scale),
    ];
    if let Some((name, r, _)) = checks.iter().find(|(_, r, lim)| r.is_nan() || r > lim) {
        return Err(DilationError::NotEquivalent(format!(
            "{name} residual {r:e}"
        )));
    }
    Ok(Equivalence { u, residuals })
}

/// The unitary `U: H₁ → H₂` with `U(π₁(g)V₁ξ) = π₂(g)V₂ξ`.
pub fn unitary_equivalence(
    t1: &DilationTriple,
    t2: &DilationTriple,
    tol: &Tolerance,
) -> Result<Equivalence, DilationError> {
    if t1.m() != t2.m() || t1.d != t2.d || t1.group != t2.group {
        return Err(DilationError::NotEquivalent(format!(
            "dimensions differ (m = {} vs {})",
            t1.m(),
            t2.m()
        )));
    }
    let fit = lstsq_map(&t1.span_matrix(), &t2.span_matrix(), tol)
        .map_err(|e| DilationError::NotEquivalent(e.to_string()))?;
    certify_equivalence(fit.map, fit.residual, t1, t2)
}

/// `(Wπ W*, W J W*, W V)` for a unitary `W`; the factor becomes `W·E`.
pub fn conjugate(t: &DilationTriple, w: &CMatrix) -> DilationTriple {
    let ws = w.adjoint();
    DilationTriple {
        group: t.group.clone(),
        alpha: t.alpha.clone(),
        d: t.d,
        krein: KreinSpace {
            j: &(w * t.j()) * &ws,
        },
        pi: t.pi.iter().map(|p| &(w * p) * &ws).collect(),
        v: w * &t.v,
        e: w * &t.e,
        e_pinv: &t.e_pinv * &ws,
    }
}

/// The two-dimensional Krein-space quadruple on ℤ with `J(x, y) = (y, x)`,
/// `π(n) = diag(eⁿ, e⁻ⁿ)` and `V(x, y) = (x − y, y)`, evaluated on `range`.
pub fn integer_counterexample(range: std::ops::RangeInclusive<i64>) -> Quadruple {
    let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let pi_at = range
        .map(|n| {
            let x = n as f64;
            (n, CMatrix::diag_real(&[x.exp(), (-x).exp()]))
        })
        .collect();
    Quadruple {
        krein: KreinSpace { j },
        pi_at,
        v: CMatrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 1.0]]),
    }
}

/// On Z₂ with `α = id`: `J = diag(1, −1)`, the J-unitary involution
/// `π(a) = [[cosh s, sinh s], [−sinh s, −cosh s]]` and `V = e₁` satisfy every
/// hypothesis except `Jπ(g)V = π(α(g))V`.
pub fn hyperbolic_quadruple(s: f64) -> Quadruple {
    let (c, sh) = (s.cosh(), s.sinh());
    let mut pi_at = BTreeMap::new();
    pi_at.insert(0, CMatrix::identity(2));
    pi_at.insert(1, CMatrix::from_real_rows(&[&[c, sh], &[-sh, -c]]));
    Quadruple {
        krein: KreinSpace {
            j: CMatrix::diag_real(&[1.0, -1.0]),
        },
        pi_at,
        v: CMatrix::from_real_rows(&[&[1.0], &[0.0]]),
    }
}
