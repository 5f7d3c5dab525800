//! Browser bindings for the demo page. Every export returns a JSON string.

use acp_core::acp::{verify_acp, OperatorMap};
use acp_core::dilation::{compress_at, integer_counterexample, DilationTriple};
use acp_core::fixtures::{acp_fixtures, z3_family};
use acp_core::numerics::{herm_eig, CMatrix, Tolerance};
use acp_core::radon_nikodym::{
    commutant_basis, dilate, phi_t, rn_derivative, uniform_equiv_unitary,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn fixture(name: &str) -> Result<OperatorMap, String> {
    acp_fixtures()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, phi)| phi)
        .ok_or_else(|| format!("unknown fixture {name:?}"))
}

fn text(v: Value) -> String {
    v.to_string()
}

fn error(msg: impl std::fmt::Display) -> String {
    text(json!({ "error": msg.to_string() }))
}

#[wasm_bindgen]
pub fn fixture_names() -> String {
    text(json!(acp_fixtures()
        .iter()
        .map(|(n, _)| *n)
        .collect::<Vec<_>>()))
}

/// Gram spectrum and verdict of `φ = (1, t, t)` on Z₃ for `steps + 1` values of `t`.
#[wasm_bindgen]
pub fn t_family(alpha_inverse: bool, t_min: f64, t_max: f64, steps: u32) -> String {
    let steps = steps.clamp(1, 2000);
    let points: Vec<Value> = (0..=steps)
        .map(|k| {
            let t = t_min + (t_max - t_min) * k as f64 / steps as f64;
            let phi = z3_family(t, alpha_inverse);
            let r = verify_acp(&phi, &tol());
            let eig = herm_eig(&r.gram.flat.hermitian_part(), &tol())
                .map(|e| e.values)
                .unwrap_or_default();
            json!({ "t": t, "eigenvalues": eig, "acp": r.is_acp() })
        })
        .collect();
    text(json!({ "alpha_inverse": alpha_inverse, "points": points }))
}

/// `φ(n)` and `φ(−n)` of the integer-group quadruple for `|n| ≤ range`.
#[wasm_bindgen]
pub fn counterexample_curves(range: u32) -> String {
    let r = range.clamp(1, 12) as i64;
    let q = integer_counterexample(-r..=r);
    let points: Vec<Value> = (-r..=r)
        .map(|n| {
            let p = compress_at(&q, n).unwrap();
            let m = compress_at(&q, -n).unwrap();
            json!({
                "n": n,
                "phi": [[p[(0, 0)].re, p[(0, 1)].re], [p[(1, 0)].re, p[(1, 1)].re]],
                "gap": p.max_abs_diff(&m),
            })
        })
        .collect();
    text(json!({ "points": points }))
}

#[wasm_bindgen]
pub fn commutant_dim(name: &str) -> String {
    let run = || -> Result<Value, String> {
        let t = dilate(&fixture(name)?, &tol()).map_err(|e| e.to_string())?;
        Ok(json!({ "m": t.m(), "dim": commutant_basis(&t, &tol()).dim() }))
    };
    run().map(text).unwrap_or_else(error)
}

fn spectrum(a: &CMatrix) -> Vec<f64> {
    herm_eig(&a.hermitian_part(), &tol())
        .map(|e| e.values)
        .unwrap_or_default()
}

/// Builds `T₀ = Σ w_k B_k² + shift·I` in the commutant of the fixture's
/// minimal dilation, forms `ψ = φ_{T₀}` and recovers `T₀` from `ψ`.
#[wasm_bindgen]
pub fn rn_explore(name: &str, weights: &[f64], shift: f64) -> String {
    let run = || -> Result<Value, String> {
        let phi = fixture(name)?;
        let tphi: DilationTriple = dilate(&phi, &tol()).map_err(|e| e.to_string())?;
        let m = tphi.m();
        let basis = commutant_basis(&tphi, &tol());
        let t0 = basis
            .elements
            .iter()
            .zip(weights.iter().chain(std::iter::repeat(&0.0)))
            .fold(
                CMatrix::identity(m).scale(shift.max(0.0)),
                |acc, (b, &w)| &acc + &(b * b).scale(w.max(0.0)),
            );
        let psi = phi_t(&tphi, &t0, &tol()).map_err(|e| e.to_string())?;
        let acp = verify_acp(&psi, &tol()).is_acp();
        let tpsi = dilate(&psi, &tol()).map_err(|e| e.to_string())?;
        let cert = rn_derivative(&tphi, &tpsi, &tol()).map_err(|e| e.to_string())?;
        let uniform = match uniform_equiv_unitary(&tphi, &tpsi, &tol()) {
            Ok(u) => {
                json!({ "equivalent": true, "UJ=JU": u.residuals.j, "Upi=piU": u.residuals.pi, "UV=V": u.residuals.v, "polar_v": u.polar_v })
            }
            Err(e) => json!({ "equivalent": false, "reason": e.to_string() }),
        };
        Ok(json!({
            "m_phi": m,
            "m_psi": tpsi.m(),
            "psi_acp": acp,
            "t0_spectrum": spectrum(&t0),
            "t_spectrum": spectrum(&cert.t),
            "recovery_error": (&cert.t - &t0).norm_2(),
            "unique": cert.unique,
            "uniform": uniform,
        }))
    };
    run().map(text).unwrap_or_else(error)
}
