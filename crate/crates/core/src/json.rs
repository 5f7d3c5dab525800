//! JSON encodings: complex numbers as `[re, im]`, matrices as arrays of rows.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::acp::{AcpReport, OperatorMap, Witness};
use crate::dilation::{
    DilationTriple, Equivalence, EquivalenceResiduals, KreinSpace, TripleReport,
};
use crate::group::{
    cyclic, dihedral, identity_involution, inverse_involution, FiniteGroup, GroupError, Involution,
};
use crate::numerics::{Bound, CMatrix, Tolerance, C64};
use crate::radon_nikodym::RnCertificate;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&z| complex(z)).collect()))
            .collect(),
    )
}

pub fn parse_matrix(rows: &MatrixJson) -> Result<CMatrix, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err("ragged matrix rows".into());
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| C64::new(re, im))
        .collect();
    Ok(CMatrix::from_vec(r, c, data))
}

pub fn real_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn bound(b: &Bound) -> Value {
    match b {
        Bound::Finite(v) => json!(v),
        Bound::Unbounded => json!("unbounded"),
    }
}

pub fn indexed<T>(items: &[T], f: impl Fn(&T) -> Value) -> Value {
    Value::Object(
        items
            .iter()
            .enumerate()
            .map(|(g, x)| (g.to_string(), f(x)))
            .collect::<Map<_, _>>(),
    )
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Named(String),
    Table(Vec<usize>),
}

/// Either explicit tables or a builder shorthand such as `{"cyclic": 3}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub n: Option<usize>,
    pub mul: Option<Vec<Vec<usize>>>,
    pub e: Option<usize>,
    pub inv: Option<Vec<usize>>,
    pub cyclic: Option<usize>,
    pub dihedral: Option<usize>,
    pub alpha: AlphaSpec,
}

impl GroupSpec {
    pub fn build(&self) -> Result<(FiniteGroup, Involution), GroupError> {
        let group = match (self.cyclic, self.dihedral, &self.mul) {
            (Some(n), None, None) => cyclic(n)?,
            (None, Some(n), None) => dihedral(n)?,
            (None, None, Some(mul)) => {
                if let Some(n) = self.n {
                    if n != mul.len() {
                        return Err(GroupError::InvalidParameter(format!(
                            "n = {n} but the table has {} rows",
                            mul.len()
                        )));
                    }
                }
                let e = self
                    .e
                    .ok_or_else(|| GroupError::InvalidParameter("missing e".into()))?;
                let inv = self
                    .inv
                    .clone()
                    .ok_or_else(|| GroupError::InvalidParameter("missing inv".into()))?;
                FiniteGroup::validate(mul.clone(), e, inv)?
            }
            _ => {
                return Err(GroupError::InvalidParameter(
                    "give exactly one of mul, cyclic, dihedral".into(),
                ))
            }
        };
        let alpha = match &self.alpha {
            AlphaSpec::Table(p) => Involution::validate(&group, p.clone())?,
            AlphaSpec::Named(s) if s == "identity" => identity_involution(&group),
            AlphaSpec::Named(s) if s == "inverse" => inverse_involution(&group)?,
            AlphaSpec::Named(s) => {
                return Err(GroupError::InvalidParameter(format!(
                    "unknown alpha {s:?} (use \"identity\", \"inverse\" or a table)"
                )))
            }
        };
        Ok((group, alpha))
    }
}

pub fn group_json(group: &FiniteGroup, alpha: &Involution) -> Value {
    json!({
        "n": group.order(),
        "mul": group.table(),
        "e": group.identity(),
        "inv": group.inverse_table(),
        "alpha": alpha.perm(),
    })
}

pub fn parse_map(
    group: &FiniteGroup,
    alpha: &Involution,
    d: usize,
    mats: &BTreeMap<String, MatrixJson>,
) -> Result<OperatorMap, String> {
    let mut out = Vec::with_capacity(group.order());
    for g in group.elements() {
        let m = mats
            .get(&g.to_string())
            .ok_or_else(|| format!("missing matrix for element {g}"))?;
        let m = parse_matrix(m).map_err(|e| format!("element {g}: {e}"))?;
        if m.shape() != (d, d) {
            return Err(format!(
                "element {g}: expected {d}x{d}, got {:?}",
                m.shape()
            ));
        }
        out.push(m);
    }
    if let Some(extra) = mats
        .keys()
        .find(|k| k.parse::<usize>().map_or(true, |g| g >= group.order()))
    {
        return Err(format!("unknown element key {extra:?}"));
    }
    OperatorMap::new(group.clone(), alpha.clone(), out).map_err(|e| e.to_string())
}

pub fn map_json(phi: &OperatorMap) -> Value {
    json!({
        "group": group_json(phi.group(), phi.alpha()),
        "d": phi.d(),
        "mats": indexed(phi.mats(), matrix),
    })
}

/// Triple given by its operators; `E` is optional.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub m: Option<usize>,
    #[serde(rename = "J")]
    pub j: MatrixJson,
    pub pi: BTreeMap<String, MatrixJson>,
    #[serde(rename = "V")]
    pub v: MatrixJson,
    #[serde(rename = "E")]
    pub e: Option<MatrixJson>,
    pub residuals: Option<Value>,
}

impl TripleSpec {
    pub fn build(
        &self,
        group: &FiniteGroup,
        alpha: &Involution,
        d: usize,
        tol: &Tolerance,
    ) -> Result<DilationTriple, String> {
        let j = parse_matrix(&self.j)?;
        let v = parse_matrix(&self.v)?;
        let m = v.rows();
        if self.m.is_some_and(|x| x != m) || j.shape() != (m, m) || v.cols() != d {
            return Err(format!(
                "triple shapes disagree (V is {:?}, J is {:?})",
                v.shape(),
                j.shape()
            ));
        }
        let mut pi = Vec::with_capacity(group.order());
        for g in group.elements() {
            let p = self
                .pi
                .get(&g.to_string())
                .ok_or_else(|| format!("triple is missing pi({g})"))?;
            let p = parse_matrix(p)?;
            if p.shape() != (m, m) {
                return Err(format!("pi({g}) is {:?}, expected {m}x{m}", p.shape()));
            }
            pi.push(p);
        }
        let e = match &self.e {
            Some(e) => parse_matrix(e)?,
            None => CMatrix::hstack(&pi.iter().map(|p| p * &v).collect::<Vec<_>>()),
        };
        if e.shape() != (m, group.order() * d) {
            return Err(format!(
                "E is {:?}, expected {}x{}",
                e.shape(),
                m,
                group.order() * d
            ));
        }
        let e_pinv = crate::numerics::pinv(&e, tol);
        Ok(DilationTriple {
            group: group.clone(),
            alpha: alpha.clone(),
            d,
            krein: KreinSpace::new(j).map_err(|e| e.to_string())?,
            pi,
            v,
            e,
            e_pinv,
        })
    }
}

pub fn triple_report_json(r: &TripleReport) -> Value {
    json!({
        "reconstruction": r.reconstruction,
        "identity": r.identity,
        "morphism": r.morphism,
        "j_unitarity": r.j_unitarity,
        "fundamental_symmetry": r.fundamental_symmetry,
        "intertwining": r.intertwining,
        "remark_form": r.remark_form,
        "jv": r.jv,
        "span_rank": r.span_rank,
        "max": r.max_residual(),
    })
}

pub fn triple_json(
    t: &DilationTriple,
    report: Option<&TripleReport>,
    emit_matrices: bool,
) -> Value {
    let mut out = Map::new();
    out.insert("m".into(), json!(t.m()));
    if let Some(r) = report {
        out.insert("residuals".into(), triple_report_json(r));
    }
    if emit_matrices {
        out.insert("J".into(), matrix(t.j()));
        out.insert("pi".into(), indexed(&t.pi, matrix));
        out.insert("V".into(), matrix(&t.v));
        out.insert("E".into(), matrix(&t.e));
    }
    Value::Object(out)
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Condition1 { g1, g2 } => json!({"condition": 1, "pair": [g1, g2]}),
        Witness::NotHermitian { defect } => json!({"condition": 2, "not_hermitian": defect}),
        Witness::NotPsd { lambda_min } => json!({"condition": 2, "lambda_min": lambda_min}),
        Witness::KUnbounded => json!({"condition": 3, "k": "unbounded"}),
        Witness::MUnbounded { g } => json!({"condition": 4, "element": g}),
        Witness::AlphaInvariance { g } => {
            json!({"identity": "phi(alpha(g)) = phi(g)", "element": g})
        }
        Witness::Adjoint { g } => json!({"identity": "phi(g^-1) = phi(g)*", "element": g}),
    }
}

pub fn acp_report_json(r: &AcpReport, emit_matrices: bool) -> Value {
    let mut out = Map::new();
    out.insert("acp".into(), json!(r.is_acp()));
    out.insert(
        "conditions".into(),
        json!({
            "1": r.cond1_ok,
            "2": r.cond2_ok,
            "3": r.cond3_ok,
            "4": r.cond4_ok,
            "remark_identities": r.remark_ok,
        }),
    );
    out.insert("k_min".into(), r.k_min.as_ref().map_or(Value::Null, bound));
    out.insert(
        "m_min".into(),
        r.m_min.as_ref().map_or(Value::Null, |m| indexed(m, bound)),
    );
    out.insert("lambda_min".into(), real_or_null(r.lambda_min));
    out.insert("rank".into(), json!(r.rank));
    out.insert(
        "residuals".into(),
        json!({
            "condition1": r.cond1_residual,
            "alpha_invariance": r.alpha_residual,
            "adjoint": r.adjoint_residual,
        }),
    );
    out.insert(
        "failures".into(),
        Value::Array(r.failures.iter().map(witness_json).collect()),
    );
    if emit_matrices {
        out.insert("gram".into(), matrix(&r.gram.flat));
    }
    Value::Object(out)
}

pub fn equivalence_residuals_json(r: &EquivalenceResiduals) -> Value {
    json!({
        "lstsq": r.lstsq,
        "unitarity": r.unitarity,
        "UJ=JU": r.j,
        "UV=V": r.v,
        "Upi=piU": r.pi,
    })
}

pub fn equivalence_json(e: &Equivalence, emit_matrices: bool) -> Value {
    let mut out = Map::new();
    out.insert("residuals".into(), equivalence_residuals_json(&e.residuals));
    if emit_matrices {
        out.insert("U".into(), matrix(&e.u));
    }
    Value::Object(out)
}

pub fn certificate_json(c: &RnCertificate, emit_matrices: bool) -> Value {
    let r = &c.residuals;
    let mut out = Map::new();
    out.insert(
        "residuals".into(),
        json!({
            "commutation": r.commutation,
            "j_commutation": r.j_commutation,
            "lambda_min": r.lambda_min,
            "reconstruction": r.reconstruction,
            "commutant_projection": r.commutant_projection,
            "intertwiner_pi": r.intertwiner_pi,
            "intertwiner_v": r.intertwiner_v,
            "intertwiner_j": r.intertwiner_j,
            "kernel_leak": r.kernel_leak,
        }),
    );
    out.insert("unique".into(), json!(c.unique));
    out.insert("commutant_dim".into(), json!(c.commutant_dim));
    out.insert("solution_dim".into(), json!(c.solution_dim));
    if emit_matrices {
        out.insert("T".into(), matrix(&c.t));
        out.insert("S".into(), matrix(&c.s));
    }
    Value::Object(out)
}
