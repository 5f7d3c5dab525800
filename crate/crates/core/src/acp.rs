//! α-complete positivity of maps `φ: G → L(H)` and the domination pre-order.

use thiserror::Error;

use crate::group::{FiniteGroup, Involution};
use crate::numerics::{
    pencil_max, pencil_max_with, range_factor, Bound, CMatrix, NumericsError, RangeFactor,
    Tolerance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map value at element {g} has non-finite entries")]
    NonFinite { g: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMap {
    group: FiniteGroup,
    alpha: Involution,
    d: usize,
    mats: Vec<CMatrix>,
}

impl OperatorMap {
    pub fn new(
        group: FiniteGroup,
        alpha: Involution,
        mats: Vec<CMatrix>,
    ) -> Result<Self, AcpError> {
        if mats.len() != group.order() || alpha.perm().len() != group.order() {
            return Err(AcpError::DimensionMismatch(format!(
                "{} matrices for a group of order {}",
                mats.len(),
                group.order()
            )));
        }
        let d = mats[0].rows();
        for (g, m) in mats.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(AcpError::DimensionMismatch(format!(
                    "phi({g}) is {:?}, expected {d}x{d}",
                    m.shape()
                )));
            }
            if !m.is_finite() {
                return Err(AcpError::NonFinite { g });
            }
        }
        Ok(Self {
            group,
            alpha,
            d,
            mats,
        })
    }

    pub fn from_fn(
        group: FiniteGroup,
        alpha: Involution,
        f: impl Fn(usize) -> CMatrix,
    ) -> Result<Self, AcpError> {
        let mats = group.elements().map(f).collect();
        Self::new(group, alpha, mats)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn alpha(&self) -> &Involution {
        &self.alpha
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.group.order()
    }

    pub fn at(&self, g: usize) -> &CMatrix {
        &self.mats[g]
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn norm_max(&self) -> f64 {
        self.mats.iter().fold(0.0, |m, a| m.max(a.norm_max()))
    }

    pub fn same_domain(&self, other: &OperatorMap) -> bool {
        self.d == other.d && self.group == other.group && self.alpha == other.alpha
    }

    fn require_same_domain(&self, other: &OperatorMap) -> Result<(), AcpError> {
        if self.same_domain(other) {
            Ok(())
        } else {
            Err(AcpError::DimensionMismatch(
                "maps live on different (G, alpha, d)".into(),
            ))
        }
    }

    pub fn scale(&self, c: f64) -> OperatorMap {
        self.with_mats(self.mats.iter().map(|m| m.scale(c)).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &OperatorMap, b: f64) -> Result<OperatorMap, AcpError> {
        self.require_same_domain(other)?;
        Ok(self.with_mats(
            self.mats
                .iter()
                .zip(&other.mats)
                .map(|(x, y)| &x.scale(a) + &y.scale(b))
                .collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &OperatorMap) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .fold(0.0, |m, (x, y)| m.max(x.max_abs_diff(y)))
    }

    pub(crate) fn with_mats(&self, mats: Vec<CMatrix>) -> OperatorMap {
        OperatorMap {
            group: self.group.clone(),
            alpha: self.alpha.clone(),
            d: self.d,
            mats,
        }
    }

    /// Index of `α(g)⁻¹·h`.
    pub fn gram_index(&self, g: usize, h: usize) -> usize {
        self.group.mul(self.group.inv(self.alpha.apply(g)), h)
    }
}

/// Block matrix `[φ(α(g_i)⁻¹g_j)]` over the full tuple of group elements.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub n: usize,
    pub d: usize,
    pub flat: CMatrix,
}

impl GramMatrix {
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        self.flat.submatrix(i * self.d, j * self.d, self.d, self.d)
    }
}

fn assemble(k: usize, d: usize, block: impl Fn(usize, usize) -> CMatrix) -> CMatrix {
    let mut flat = CMatrix::zeros(k * d, k * d);
    for i in 0..k {
        for j in 0..k {
            flat.set_submatrix(i * d, j * d, &block(i, j));
        }
    }
    flat
}

pub fn gram_matrix(phi: &OperatorMap) -> GramMatrix {
    GramMatrix {
        n: phi.n(),
        d: phi.d,
        flat: tuple_matrix(phi, &phi.group.elements().collect::<Vec<_>>()),
    }
}

/// `[φ(α(g_i)⁻¹g_j)]` for an arbitrary tuple, repetitions allowed.
pub fn tuple_matrix(phi: &OperatorMap, tuple: &[usize]) -> CMatrix {
    assemble(tuple.len(), phi.d, |i, j| {
        phi.at(phi.gram_index(tuple[i], tuple[j])).clone()
    })
}

/// 0/1 block selection `Sel` with `Sel*·Γ·Sel` the tuple matrix.
pub fn selection(n: usize, d: usize, tuple: &[usize]) -> CMatrix {
    let mut sel = CMatrix::zeros(n * d, tuple.len() * d);
    for (col, &g) in tuple.iter().enumerate() {
        sel.set_submatrix(g * d, col * d, &CMatrix::identity(d));
    }
    sel
}

/// `B = [φ(g_i)*φ(g_j)]`, the Gram matrix of the row `(φ(g_1) … φ(g_n))`.
pub fn product_gram(phi: &OperatorMap) -> CMatrix {
    let row = CMatrix::hstack(phi.mats());
    &row.adjoint() * &row
}

/// `Γ_g = [φ(α(g·g_i)⁻¹·g·g_j)]`, a block permutation of `Γ_φ`.
pub fn translated_gram(phi: &OperatorMap, g: usize) -> CMatrix {
    let l = phi.group.left_translation(g);
    assemble(phi.n(), phi.d, |i, j| {
        phi.at(phi.gram_index(l[i], l[j])).clone()
    })
}

fn relative_limit(phi: &OperatorMap, tol: &Tolerance) -> f64 {
    tol.eps_eq * phi.norm_max()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition1 {
    pub ok: bool,
    pub max_residual: f64,
    /// Every failing pair `(g₁, g₂)` in lexicographic order.
    pub witnesses: Vec<(usize, usize)>,
}

pub fn check_condition1(phi: &OperatorMap, tol: &Tolerance) -> Condition1 {
    let (grp, a) = (&phi.group, &phi.alpha);
    let limit = relative_limit(phi, tol);
    let mut max_residual = 0.0_f64;
    let mut witnesses = Vec::new();
    for g1 in grp.elements() {
        for g2 in grp.elements() {
            let prod = phi.at(grp.mul(g1, g2));
            let r = phi
                .at(grp.mul(a.apply(g1), a.apply(g2)))
                .max_abs_diff(prod)
                .max(phi.at(a.apply(grp.mul(g1, g2))).max_abs_diff(prod));
            max_residual = max_residual.max(r);
            if r > limit {
                witnesses.push((g1, g2));
            }
        }
    }
    Condition1 {
        ok: witnesses.is_empty(),
        max_residual,
        witnesses,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition2 {
    pub ok: bool,
    pub lambda_min: f64,
    /// `Some` when the Gram matrix is not Hermitian within tolerance.
    pub hermitian_defect: Option<f64>,
}

pub fn check_condition2(gram: &GramMatrix, tol: &Tolerance) -> Condition2 {
    match crate::numerics::psd_check(&gram.flat, tol) {
        Ok(c) => Condition2 {
            ok: c.is_psd,
            lambda_min: c.lambda_min,
            hermitian_defect: None,
        },
        Err(_) => Condition2 {
            ok: false,
            lambda_min: f64::NAN,
            hermitian_defect: Some(gram.flat.hermitian_defect()),
        },
    }
}

/// Least `K` with `[φ(g_i)*φ(g_j)] ⪯ K·Γ_φ`.
pub fn check_condition3(phi: &OperatorMap, factor: &RangeFactor, tol: &Tolerance) -> Bound {
    pencil_max_with(factor, &product_gram(phi), tol)
}

/// Least `M(g)` with `Γ_g ⪯ M(g)·Γ_φ`, `M(e) = 1`.
pub fn check_condition4(phi: &OperatorMap, factor: &RangeFactor, tol: &Tolerance) -> Vec<Bound> {
    phi.group
        .elements()
        .map(|g| {
            if g == phi.group.identity() {
                Bound::Finite(1.0)
            } else {
                pencil_max_with(factor, &translated_gram(phi, g), tol)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Condition1 { g1: usize, g2: usize },
    NotHermitian { defect: f64 },
    NotPsd { lambda_min: f64 },
    KUnbounded,
    MUnbounded { g: usize },
    AlphaInvariance { g: usize },
    Adjoint { g: usize },
}

#[derive(Clone, Debug)]
pub struct AcpReport {
    pub cond1_ok: bool,
    pub cond2_ok: bool,
    pub cond3_ok: bool,
    pub cond4_ok: bool,
    pub remark_ok: bool,
    pub k_min: Option<Bound>,
    pub m_min: Option<Vec<Bound>>,
    pub gram: GramMatrix,
    pub lambda_min: f64,
    pub rank: Option<usize>,
    pub failures: Vec<Witness>,
    pub cond1_residual: f64,
    pub alpha_residual: f64,
    pub adjoint_residual: f64,
    /// Range factor of `Γ_φ`, recorded once for every downstream construction.
    pub factor: Option<RangeFactor>,
}

impl AcpReport {
    pub fn is_acp(&self) -> bool {
        self.cond1_ok && self.cond2_ok && self.cond3_ok && self.cond4_ok && self.remark_ok
    }
}

pub fn verify_acp(phi: &OperatorMap, tol: &Tolerance) -> AcpReport {
    let gram = gram_matrix(phi);
    let c1 = check_condition1(phi, tol);
    let mut failures: Vec<Witness> = c1
        .witnesses
        .iter()
        .map(|&(g1, g2)| Witness::Condition1 { g1, g2 })
        .collect();

    let limit = relative_limit(phi, tol);
    let mut alpha_residual = 0.0_f64;
    let mut adjoint_residual = 0.0_f64;
    for g in phi.group.elements() {
        let a = phi.at(phi.alpha.apply(g)).max_abs_diff(phi.at(g));
        let b = phi.at(phi.group.inv(g)).max_abs_diff(&phi.at(g).adjoint());
        alpha_residual = alpha_residual.max(a);
        adjoint_residual = adjoint_residual.max(b);
        if a > limit {
            failures.push(Witness::AlphaInvariance { g });
        }
        if b > limit {
            failures.push(Witness::Adjoint { g });
        }
    }
    let remark_ok = alpha_residual <= limit && adjoint_residual <= limit;

    let mut report = AcpReport {
        cond1_ok: c1.ok,
        cond2_ok: false,
        cond3_ok: false,
        cond4_ok: false,
        remark_ok,
        k_min: None,
        m_min: None,
        lambda_min: f64::NAN,
        rank: None,
        failures,
        cond1_residual: c1.max_residual,
        alpha_residual,
        adjoint_residual,
        factor: None,
        gram,
    };
    if !c1.ok {
        return report;
    }

    let c2 = check_condition2(&report.gram, tol);
    report.lambda_min = c2.lambda_min;
    report.cond2_ok = c2.ok;
    if let Some(defect) = c2.hermitian_defect {
        report.failures.push(Witness::NotHermitian { defect });
    } else if !c2.ok {
        report.failures.push(Witness::NotPsd {
            lambda_min: c2.lambda_min,
        });
    }
    if !c2.ok {
        return report;
    }
    let factor = range_factor(&report.gram.flat, tol).expect("certified PSD Gram factors");

    let k = check_condition3(phi, &factor, tol);
    report.cond3_ok = k.is_finite();
    if !report.cond3_ok {
        report.failures.push(Witness::KUnbounded);
    }
    let m = check_condition4(phi, &factor, tol);
    for (g, b) in m.iter().enumerate() {
        if !b.is_finite() {
            report.failures.push(Witness::MUnbounded { g });
        }
    }
    report.cond4_ok = m.iter().all(Bound::is_finite);
    report.k_min = Some(k);
    report.m_min = Some(m);
    report.rank = Some(factor.rank);
    report.factor = Some(factor);
    report
}

/// `λ·φ − ψ` is α-completely positive.
pub fn dominates(
    psi: &OperatorMap,
    phi: &OperatorMap,
    lambda: f64,
    tol: &Tolerance,
) -> Result<bool, AcpError> {
    Ok(verify_acp(&domination_gap(psi, phi, lambda, tol)?, tol).is_acp())
}

/// `λ·φ − ψ` with cancellation noise below `eps_eq·scale` set to zero.
pub fn domination_gap(
    psi: &OperatorMap,
    phi: &OperatorMap,
    lambda: f64,
    tol: &Tolerance,
) -> Result<OperatorMap, AcpError> {
    let diff = phi.combine(lambda, psi, -1.0)?;
    let chop = tol.eps_eq * (lambda.abs() * phi.norm_max()).max(psi.norm_max());
    Ok(diff.with_mats(diff.mats.iter().map(|m| m.chop(chop)).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DominationSearch {
    Found(f64),
    /// No λ up to the search limit worked; inconclusive.
    NotFound,
    /// `ker Γ_φ ⊄ ker Γ_ψ`: no λ exists.
    Unbounded,
}

/// Semi-decision for `ψ ≤_u φ`: scans `λ₀·(1 + kδ)` up to `lambda_max`
/// starting from the Gram pencil bound `λ₀`.
pub fn find_domination_constant(
    psi: &OperatorMap,
    phi: &OperatorMap,
    lambda_max: f64,
    steps: usize,
    tol: &Tolerance,
) -> Result<DominationSearch, AcpError> {
    phi.require_same_domain(psi)?;
    let lower = match pencil_max(&gram_matrix(phi).flat, &gram_matrix(psi).flat, tol)? {
        Bound::Unbounded => return Ok(DominationSearch::Unbounded),
        Bound::Finite(v) => v,
    };
    let start = if lower > 0.0 {
        lower
    } else {
        lambda_max.min(1.0)
    };
    if start > lambda_max {
        return Ok(DominationSearch::NotFound);
    }
    let steps = steps.max(1);
    let delta = (lambda_max / start - 1.0) / steps as f64;
    for k in 0..=steps {
        let lambda = start * (1.0 + k as f64 * delta);
        if dominates(psi, phi, lambda, tol)? {
            return Ok(DominationSearch::Found(lambda));
        }
    }
    Ok(DominationSearch::NotFound)
}
