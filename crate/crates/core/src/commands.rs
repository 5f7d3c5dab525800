//! The command pipeline behind the `acp` binary: JSON instance in, JSON
//! report and exit code out.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::acp::{find_domination_constant, verify_acp, DominationSearch, OperatorMap};
use crate::dilation::{
    compress_at, construct_minimal, integer_counterexample, unitary_equivalence, verify_triple,
};
use crate::group_algebra::rn_correspondence_check;
use crate::json::{self, GroupSpec, MatrixJson, TripleSpec};
use crate::numerics::{rank, CMatrix, Tolerance};
use crate::radon_nikodym::{dilate, rn_derivative, uniform_equiv_unitary, RnError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Dilate,
    Rn,
    Equiv,
    Counterexample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Dilate => "dilate",
            Command::Rn => "rn",
            Command::Equiv => "equiv",
            Command::Counterexample => "counterexample",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub eps_psd: Option<f64>,
    pub eps_eq: Option<f64>,
    pub eps_rank: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
    pub emit_matrices: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub eps_psd: Option<f64>,
    pub eps_eq: Option<f64>,
    pub eps_rank: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub group: GroupSpec,
    pub d: usize,
    pub mats: BTreeMap<String, MatrixJson>,
    pub psi: Option<BTreeMap<String, MatrixJson>>,
    pub triples: Option<Vec<TripleSpec>>,
    pub tolerances: Option<ToleranceSpec>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

impl Outcome {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

struct Loaded {
    phi: OperatorMap,
    psi: Option<OperatorMap>,
    triples: Vec<TripleSpec>,
    tol: Tolerance,
    seed: u64,
}

fn input_error(command: Command, message: String, location: Option<(usize, usize)>) -> Outcome {
    let mut err = Map::new();
    err.insert("kind".into(), json!("input"));
    err.insert("message".into(), json!(message));
    if let Some((line, column)) = location {
        err.insert("line".into(), json!(line));
        err.insert("column".into(), json!(column));
    }
    Outcome {
        report: json!({"command": command.name(), "exit_code": EXIT_INPUT, "error": Value::Object(err)}),
        exit_code: EXIT_INPUT,
    }
}

fn resolve_tolerance(
    file: Option<&ToleranceSpec>,
    flags: &ToleranceOverrides,
) -> Result<Tolerance, String> {
    let base = Tolerance::default();
    let pick =
        |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
    Tolerance::new(
        pick(flags.eps_psd, file.and_then(|f| f.eps_psd), base.eps_psd),
        pick(flags.eps_eq, file.and_then(|f| f.eps_eq), base.eps_eq),
        pick(flags.eps_rank, file.and_then(|f| f.eps_rank), base.eps_rank),
    )
    .map_err(|e| e.to_string())
}

fn load(command: Command, input: &str, opts: &Options) -> Result<Loaded, Outcome> {
    let inst: ProblemInstance = serde_json::from_str(input)
        .map_err(|e| input_error(command, e.to_string(), Some((e.line(), e.column()))))?;
    let bad = |m: String| input_error(command, m, None);
    let (group, alpha) = inst.group.build().map_err(|e| bad(e.to_string()))?;
    if inst.d == 0 {
        return Err(bad("d must be >= 1".into()));
    }
    let phi = json::parse_map(&group, &alpha, inst.d, &inst.mats)
        .map_err(|e| bad(format!("mats: {e}")))?;
    let psi = inst
        .psi
        .as_ref()
        .map(|m| json::parse_map(&group, &alpha, inst.d, m))
        .transpose()
        .map_err(|e| bad(format!("psi: {e}")))?;
    let tol = resolve_tolerance(inst.tolerances.as_ref(), &opts.tolerances).map_err(bad)?;
    Ok(Loaded {
        phi,
        psi,
        triples: inst.triples.unwrap_or_default(),
        tol,
        seed: opts.seed.or(inst.seed).unwrap_or(0),
    })
}

fn finish(
    command: Command,
    verdict: &str,
    exit_code: i32,
    tol: Option<&Tolerance>,
    body: Map<String, Value>,
) -> Outcome {
    let mut report = body;
    report.insert("command".into(), json!(command.name()));
    report.insert("verdict".into(), json!(verdict));
    report.insert("exit_code".into(), json!(exit_code));
    if let Some(t) = tol {
        report.insert(
            "tolerances".into(),
            json!({"eps_psd": t.eps_psd, "eps_eq": t.eps_eq, "eps_rank": t.eps_rank}),
        );
    }
    Outcome {
        report: Value::Object(report),
        exit_code,
    }
}

/// Runs one command on a JSON instance. `input` is ignored by
/// `counterexample`.
pub fn run(command: Command, input: &str, opts: &Options) -> Outcome {
    if command == Command::Counterexample {
        return cmd_counterexample(opts);
    }
    let loaded = match load(command, input, opts) {
        Ok(l) => l,
        Err(o) => return o,
    };
    match command {
        Command::Verify => cmd_verify(&loaded, opts),
        Command::Dilate => cmd_dilate(&loaded, opts),
        Command::Rn => cmd_rn(&loaded, opts),
        Command::Equiv => cmd_equiv(&loaded, opts),
        Command::Counterexample => unreachable!(),
    }
}

fn cmd_verify(l: &Loaded, opts: &Options) -> Outcome {
    let r = verify_acp(&l.phi, &l.tol);
    let mut body = Map::new();
    body.insert(
        "report".into(),
        json::acp_report_json(&r, opts.emit_matrices),
    );
    let (verdict, code) = if r.is_acp() {
        ("acp", EXIT_OK)
    } else {
        ("not-acp", EXIT_NEGATIVE)
    };
    finish(Command::Verify, verdict, code, Some(&l.tol), body)
}

fn cmd_dilate(l: &Loaded, opts: &Options) -> Outcome {
    let r = verify_acp(&l.phi, &l.tol);
    let mut body = Map::new();
    if !r.is_acp() {
        body.insert("report".into(), json::acp_report_json(&r, false));
        return finish(
            Command::Dilate,
            "not-acp",
            EXIT_NEGATIVE,
            Some(&l.tol),
            body,
        );
    }
    match construct_minimal(&l.phi, &r, &l.tol) {
        Ok((t, check)) => {
            body.insert(
                "triple".into(),
                json::triple_json(&t, Some(&check), opts.emit_matrices),
            );
            body.insert("gram_rank".into(), json!(r.rank));
            finish(Command::Dilate, "dilated", EXIT_OK, Some(&l.tol), body)
        }
        Err(e) => {
            body.insert("error".into(), json!(e.to_string()));
            finish(
                Command::Dilate,
                "construction-failed",
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            )
        }
    }
}

fn cmd_rn(l: &Loaded, opts: &Options) -> Outcome {
    let mut body = Map::new();
    let Some(psi) = &l.psi else {
        return input_error(Command::Rn, "rn needs both mats and psi".into(), None);
    };
    for (name, m) in [("phi", &l.phi), ("psi", psi)] {
        let r = verify_acp(m, &l.tol);
        if !r.is_acp() {
            body.insert(format!("{name}_report"), json::acp_report_json(&r, false));
            return finish(
                Command::Rn,
                &format!("{name}-not-acp"),
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            );
        }
    }
    let (tphi, tpsi) = match (dilate(&l.phi, &l.tol), dilate(psi, &l.tol)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            body.insert("error".into(), json!(e.to_string()));
            return finish(
                Command::Rn,
                "construction-failed",
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            );
        }
    };
    match rn_derivative(&tphi, &tpsi, &l.tol) {
        Ok(cert) => {
            let lambda_max = 4.0 * cert.t.norm_2() + 1.0;
            let lambda = match find_domination_constant(psi, &l.phi, lambda_max, 64, &l.tol) {
                Ok(DominationSearch::Found(x)) => json!(x),
                _ => Value::Null,
            };
            body.insert("lambda".into(), lambda);
            body.insert(
                "certificate".into(),
                json::certificate_json(&cert, opts.emit_matrices),
            );
            body.insert("m_phi".into(), json!(tphi.m()));
            body.insert("m_psi".into(), json!(tpsi.m()));
            let corr = rn_correspondence_check(&tphi, &cert, psi, 8, l.seed);
            body.insert(
                "correspondence".into(),
                json!({"samples": corr.samples, "seed": l.seed, "max_relative": corr.max_relative}),
            );
            finish(Command::Rn, "dominated", EXIT_OK, Some(&l.tol), body)
        }
        Err(RnError::KernelNotContained { leak }) => {
            body.insert("kernel_leak".into(), json!(leak));
            finish(
                Command::Rn,
                "not-dominated",
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            )
        }
        Err(e) => {
            body.insert("error".into(), json!(e.to_string()));
            finish(
                Command::Rn,
                "inconclusive",
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            )
        }
    }
}

fn cmd_equiv(l: &Loaded, opts: &Options) -> Outcome {
    let mut body = Map::new();
    let (group, alpha, d) = (l.phi.group(), l.phi.alpha(), l.phi.d());
    if !l.triples.is_empty() {
        if l.triples.len() != 2 {
            return input_error(
                Command::Equiv,
                "equiv needs exactly two triples".into(),
                None,
            );
        }
        let mut built = Vec::with_capacity(2);
        for (k, spec) in l.triples.iter().enumerate() {
            let t = match spec.build(group, alpha, d, &l.tol) {
                Ok(t) => t,
                Err(e) => return input_error(Command::Equiv, format!("triples[{k}]: {e}"), None),
            };
            let check = verify_triple(&t, &l.phi, &l.tol);
            if !check.passes() {
                body.insert(
                    "error".into(),
                    json!(format!(
                        "triples[{k}] is not a minimal dilation of phi: {}",
                        check.summary()
                    )),
                );
                return finish(
                    Command::Equiv,
                    "not-equivalent",
                    EXIT_NEGATIVE,
                    Some(&l.tol),
                    body,
                );
            }
            built.push(t);
        }
        body.insert("mode".into(), json!("triples"));
        return match unitary_equivalence(&built[0], &built[1], &l.tol) {
            Ok(eq) => {
                body.insert(
                    "equivalence".into(),
                    json::equivalence_json(&eq, opts.emit_matrices),
                );
                finish(Command::Equiv, "equivalent", EXIT_OK, Some(&l.tol), body)
            }
            Err(e) => {
                body.insert("error".into(), json!(e.to_string()));
                finish(
                    Command::Equiv,
                    "not-equivalent",
                    EXIT_NEGATIVE,
                    Some(&l.tol),
                    body,
                )
            }
        };
    }
    let Some(psi) = &l.psi else {
        return input_error(
            Command::Equiv,
            "equiv needs psi or two triples".into(),
            None,
        );
    };
    body.insert("mode".into(), json!("maps"));
    let (tphi, tpsi) = match (dilate(&l.phi, &l.tol), dilate(psi, &l.tol)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            body.insert("error".into(), json!(e.to_string()));
            return finish(Command::Equiv, "not-acp", EXIT_NEGATIVE, Some(&l.tol), body);
        }
    };
    match uniform_equiv_unitary(&tphi, &tpsi, &l.tol) {
        Ok(ue) => {
            let mut eq = Map::new();
            eq.insert(
                "residuals".into(),
                json::equivalence_residuals_json(&ue.residuals),
            );
            eq.insert("polar_v".into(), json!(ue.polar_v));
            eq.insert("v_identity_holds".into(), json!(ue.v_identity_holds()));
            if opts.emit_matrices {
                eq.insert("U".into(), json::matrix(&ue.u));
            }
            body.insert("equivalence".into(), Value::Object(eq));
            finish(Command::Equiv, "equivalent", EXIT_OK, Some(&l.tol), body)
        }
        Err(e) => {
            body.insert("error".into(), json!(e.to_string()));
            finish(
                Command::Equiv,
                "not-equivalent",
                EXIT_NEGATIVE,
                Some(&l.tol),
                body,
            )
        }
    }
}

fn cmd_counterexample(opts: &Options) -> Outcome {
    let range = -3..=3_i64;
    let wide = -6..=6_i64;
    let q = integer_counterexample(wide.clone());
    let j = &q.krein.j;
    let mut values = Map::new();
    let mut all_unequal = true;
    let mut min_gap = f64::INFINITY;
    for n in range.clone() {
        let p = compress_at(&q, n).expect("range is inside the quadruple");
        let m = compress_at(&q, -n).expect("range is inside the quadruple");
        let gap = p.max_abs_diff(&m);
        if n != 0 {
            all_unequal &= gap > 0.0;
            min_gap = min_gap.min(gap);
        }
        let mut entry = Map::new();
        entry.insert("gap".into(), json!(gap));
        if opts.emit_matrices || n.abs() <= 1 {
            entry.insert("phi(n)".into(), json::matrix(&p));
            entry.insert("phi(-n)".into(), json::matrix(&m));
        }
        values.insert(n.to_string(), Value::Object(entry));
    }
    let mut remark_form = 0.0_f64;
    let mut j_unitarity = 0.0_f64;
    let mut intertwining_gap = f64::INFINITY;
    let vs = q.v.adjoint();
    for n in range.clone() {
        let pn = &q.pi_at[&n];
        let star = &(j * &pn.adjoint()) * j;
        j_unitarity = j_unitarity.max((&q.pi_at[&(-n)] - &star).norm_2() / pn.norm_2());
        for m in range.clone() {
            let lhs = &(&(&vs * &pn.adjoint()) * &q.pi_at[&m]) * &q.v;
            let rhs = &(&vs * &q.pi_at[&(n + m)]) * &q.v;
            remark_form = remark_form.max(lhs.max_abs_diff(&rhs) / rhs.norm_max().max(1.0));
        }
        if n != 0 {
            let a = &(j * pn) * &q.v;
            let b = &q.pi_at[&(-n)] * &q.v;
            intertwining_gap = intertwining_gap.min(a.max_abs_diff(&b));
        }
    }
    let span = CMatrix::hstack(
        &range
            .clone()
            .map(|n| &q.pi_at[&n] * &q.v)
            .collect::<Vec<_>>(),
    );
    let tol = Tolerance::default();
    let span_rank = rank(&span, &tol);
    let hypotheses = span_rank == 2 && remark_form <= 1e-12 && j_unitarity <= 1e-12;
    let p1 = compress_at(&q, 1).unwrap();
    let m1 = compress_at(&q, -1).unwrap();
    let gap1 = p1.max_abs_diff(&m1);
    let ok = all_unequal && hypotheses;

    let mut body = Map::new();
    body.insert("values".into(), Value::Object(values));
    body.insert(
        "checks".into(),
        json!({
            "phi(n) != phi(-n) for n != 0": all_unequal,
            "min_gap": min_gap,
            "gap_at_1": gap1,
            "span_rank": span_rank,
            "remark_form_residual": remark_form,
            "j_unitarity_residual": j_unitarity,
            "hypotheses_hold": hypotheses,
            "min_intertwining_defect": intertwining_gap,
        }),
    );
    body.insert(
        "quadruple".into(),
        json!({
            "J": json::matrix(j),
            "V": json::matrix(&q.v),
            "pi(1)": json::matrix(&q.pi_at[&1]),
        }),
    );
    let (verdict, code) = if ok {
        ("not-alpha-cp", EXIT_OK)
    } else {
        ("check-failed", EXIT_NEGATIVE)
    };
    finish(Command::Counterexample, verdict, code, None, body)
}
