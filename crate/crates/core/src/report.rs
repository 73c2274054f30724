//! Machine-readable reports shared by the command line and the tests.

use rand::{rngs::StdRng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith;
use crate::descent::{divisibility_verdict, evaluate_all, nu_table, DescentVerdict, FiberModel};
use crate::dual_graph::{component_group, h1_basis, ComponentGroup, IntersectionMatrix};
use crate::families::genus4::{self, Genus4, Genus4Input};
use crate::families::hyperelliptic::{self, Hyperelliptic, HyperellipticInput, ReductionType};
use crate::families::local_functions::direct_table;
use crate::families::{field_of_order, FamilyError, UndeterminedReason, Verdict};
use crate::finite_field::{FieldElement, FiniteField};
use crate::oracle::{self, EnumerationSummary};
use crate::parse::{format_univariate, ParseError};
use crate::torus::{
    component_polynomials, eval_int_poly, find_principal_decomposition, frobenius_char_poly, torus_order,
    CharacterLattice, PrincipalDecomposition,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const TORSION_LABEL: &str = "J(K)(p')";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    SyntaxError,
    HypothesisViolated,
    Undetermined,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::SyntaxError => 2,
            Status::HypothesisViolated => 3,
            Status::Undetermined => 4,
        }
    }
}

/// An error or warning with a stable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

impl Issue {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Issue { code: code.to_string(), message: message.into(), position: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub valid: bool,
    pub errors: Vec<Issue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    /// A multidegree lifting each invariant-factor generator.
    pub generators: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusComponent {
    pub label: String,
    pub chi: Vec<i64>,
    pub rank: usize,
    pub poly: Vec<i64>,
    pub mu_order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusReport {
    pub char_poly: Vec<i64>,
    pub order: u64,
    pub decomposition: Option<Vec<TorusComponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    /// Where the verdict comes from: `closed_form` or `engine`.
    pub source: String,
    pub engine: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityReport {
    pub r: u64,
    pub verdict: VerdictReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdicts {
    pub theta: Option<VerdictReport>,
    pub cube_root: Option<VerdictReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisibility: Option<DivisibilityReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub label: String,
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    pub source: String,
    pub engine: Option<Vec<u64>>,
    /// `order = f(q) |Φ(p')|`.
    pub order_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub enumeration: EnumerationSummary,
    pub expected_order: u64,
    pub chain_trials: u64,
    pub chain_agreements: u64,
    pub r: u64,
    pub exhaustive: Option<bool>,
    pub engine: Option<bool>,
    /// Engine outputs the oracle consumes rather than recomputes.
    pub shared_inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub command: String,
    pub status: Status,
    pub input: Value,
    pub validity: Validity,
    pub phi: Option<PhiReport>,
    pub torus: Option<TorusReport>,
    pub verdicts: Verdicts,
    pub torsion: Option<TorsionReport>,
    pub tables: Vec<Table>,
    pub cross_check: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub warnings: Vec<Issue>,
}

impl JsonReport {
    fn new(command: &str, input: Value) -> Self {
        JsonReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            status: Status::Ok,
            input,
            validity: Validity { valid: true, errors: Vec::new() },
            phi: None,
            torus: None,
            verdicts: Verdicts::default(),
            torsion: None,
            tables: Vec::new(),
            cross_check: Vec::new(),
            oracle: None,
            warnings: Vec::new(),
        }
    }

    fn invalid(mut self, status: Status, errors: Vec<Issue>) -> Self {
        self.status = status;
        self.validity = Validity { valid: false, errors };
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Sets the status from the verdicts and adds a warning per undetermined verdict.
    fn finish(mut self) -> Self {
        if !matches!(self.status, Status::Ok | Status::Undetermined) {
            return self;
        }
        let v = &self.verdicts;
        let mut reasons = Vec::new();
        for (name, r) in [("theta", &v.theta), ("cube_root", &v.cube_root)] {
            if let Some(VerdictReport { verdict: Verdict::Undetermined(reason), .. }) = r {
                reasons.push((name, *reason));
            }
        }
        if let Some(DivisibilityReport { verdict: VerdictReport { verdict: Verdict::Undetermined(reason), .. }, .. }) =
            &v.divisibility
        {
            reasons.push(("divisibility", *reason));
        }
        for (name, reason) in &reasons {
            self.warnings.push(Issue::new(reason.code(), format!("{name} verdict is undetermined")));
        }
        if !reasons.is_empty() {
            self.status = Status::Undetermined;
        }
        self
    }

    /// Plain-text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("{}: {}", self.command, status_word(self.status)));
        for e in &self.validity.errors {
            match e.position {
                Some(p) => line(format!("  error [{}] at position {p}: {}", e.code, e.message)),
                None => line(format!("  error [{}]: {}", e.code, e.message)),
            }
        }
        if let Some(phi) = &self.phi {
            line(format!("component group: {:?} (order {})", phi.invariant_factors, phi.order));
            if !phi.generators.is_empty() {
                line(format!("  generator multidegrees: {:?}", phi.generators));
            }
        }
        if let Some(t) = &self.torus {
            line(format!("torus: characteristic polynomial {:?}, order {}", t.char_poly, t.order));
            for c in t.decomposition.iter().flatten() {
                line(format!("  {} rank {} -> mu_{}", c.label, c.rank, c.mu_order));
            }
            if let Some(e) = &t.enumeration {
                line(format!("  enumerated {} points, invariant factors {:?}", e.points, e.invariant_factors));
            }
        }
        let verdict = |name: &str, v: &VerdictReport| format!("{name}: {} ({})", verdict_word(v.verdict), v.source);
        if let Some(v) = &self.verdicts.theta {
            line(verdict("theta", v));
        }
        if let Some(v) = &self.verdicts.cube_root {
            line(verdict("cube_root", v));
        }
        if let Some(d) = &self.verdicts.divisibility {
            line(verdict(&format!("divisible by {}", d.r), &d.verdict));
        }
        if let Some(t) = &self.torsion {
            line(format!("torsion {}: {:?} (order {}, {})", t.label, t.invariant_factors, t.order, t.source));
        }
        for t in &self.tables {
            line(format!("table {}: {}", t.name, t.columns.join(" | ")));
            for r in &t.rows {
                line(format!("  {}: {}", r.label, r.values.join(" | ")));
            }
        }
        for c in &self.cross_check {
            line(format!("check {}: {}", c.name, if c.passed { "pass" } else { "FAIL" }));
        }
        if let Some(o) = &self.oracle {
            line(format!(
                "oracle: {} points (expected {}), chain agreement {}/{}, exhaustive {:?} vs engine {:?}",
                o.enumeration.points, o.expected_order, o.chain_agreements, o.chain_trials, o.exhaustive, o.engine
            ));
        }
        for w in &self.warnings {
            line(format!("warning [{}]: {}", w.code, w.message));
        }
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::SyntaxError => "syntax error",
        Status::HypothesisViolated => "hypothesis violated",
        Status::Undetermined => "undetermined",
    }
}

fn verdict_word(v: Verdict) -> String {
    match v {
        Verdict::True => "true".into(),
        Verdict::False => "false".into(),
        Verdict::Undetermined(r) => format!("undetermined [{}]", r.code()),
    }
}

/// A report for input that failed to parse.
pub fn syntax_error_report(command: &str, input: Value, field: &str, e: &ParseError) -> JsonReport {
    JsonReport::new(command, input).invalid(
        Status::SyntaxError,
        vec![Issue { code: "syntax_error".into(), message: format!("{field}: {}", e.message), position: Some(e.position) }],
    )
}

/// A report for malformed flags or JSON arguments.
pub fn usage_error_report(command: &str, input: Value, message: impl Into<String>) -> JsonReport {
    JsonReport::new(command, input).invalid(Status::SyntaxError, vec![Issue::new("syntax_error", message)])
}

fn error_code<E: Serialize>(e: &E) -> String {
    serde_json::to_value(e)
        .ok()
        .and_then(|v| v.get("code").and_then(|c| c.as_str()).map(str::to_string))
        .unwrap_or_else(|| "invalid".into())
}

fn phi_report(phi: &ComponentGroup) -> PhiReport {
    let generators = (0..phi.invariant_factors.len())
        .map(|j| {
            let unit: Vec<u64> = (0..phi.invariant_factors.len()).map(|i| u64::from(i == j)).collect();
            phi.lift(&unit)
        })
        .collect();
    PhiReport { invariant_factors: phi.invariant_factors.clone(), order: phi.order(), generators }
}

pub fn component_group_report(matrix: &[Vec<i64>]) -> JsonReport {
    let r = JsonReport::new("component-group", json!({ "matrix": matrix }));
    let m = IntersectionMatrix(matrix.to_vec());
    if let Err(e) = m.validate() {
        return r.invalid(Status::HypothesisViolated, vec![Issue::new("invalid_intersection_matrix", e)]);
    }
    match component_group(&m) {
        Ok(phi) => JsonReport { phi: Some(phi_report(&phi)), ..r }.finish(),
        Err(e) => r.invalid(Status::HypothesisViolated, vec![Issue::new("invalid_intersection_matrix", e.to_string())]),
    }
}

fn components_of(
    lattice: &CharacterLattice,
    dec: &PrincipalDecomposition,
    labels: &[String],
    q: u64,
) -> Option<Vec<TorusComponent>> {
    let polys = component_polynomials(lattice, dec).ok()?;
    Some(
        dec.components
            .iter()
            .zip(&polys)
            .enumerate()
            .map(|(i, (c, f))| TorusComponent {
                label: labels.get(i).cloned().unwrap_or_else(|| format!("T{}", i + 1)),
                chi: c.chi.clone(),
                rank: c.rank,
                poly: f.clone(),
                mu_order: eval_int_poly(f, q as i128) as u64,
            })
            .collect(),
    )
}

pub fn torus_report(frobenius: &[Vec<i64>], q: u64, enumerate: bool, limit: u64) -> JsonReport {
    let r = JsonReport::new("torus", json!({ "frobenius": frobenius, "q": q, "enumerate": enumerate }));
    let lattice = match CharacterLattice::new(frobenius.to_vec(), "input") {
        Ok(l) => l,
        Err(e) => return r.invalid(Status::HypothesisViolated, vec![Issue::new("invalid_lattice", e.to_string())]),
    };
    let field = match field_of_order(q, limit) {
        Ok(f) => f,
        Err(e) => return r.invalid(Status::HypothesisViolated, vec![Issue::new("invalid_field", e.to_string())]),
    };
    let mut warnings = Vec::new();
    let decomposition = match find_principal_decomposition(&lattice) {
        Some(dec) => components_of(&lattice, &dec, &[], q),
        None => {
            warnings.push(Issue::new(
                UndeterminedReason::UnsupportedTorusDecomposition.code(),
                "no principal decomposition generated by basis vectors",
            ));
            None
        }
    };
    let enumeration = if enumerate {
        match oracle::enumerate_torus_lattice(&lattice, &field) {
            Ok(t) => Some(t.summary()),
            Err(e) => {
                warnings.push(Issue::new("enumeration_failed", e.to_string()));
                None
            }
        }
    } else {
        None
    };
    let torus = TorusReport {
        char_poly: frobenius_char_poly(&lattice),
        order: torus_order(&lattice, q),
        decomposition,
        enumeration,
    };
    JsonReport { torus: Some(torus), warnings, ..r }.finish()
}

fn format_row(l: &FiniteField, row: &[FieldElement]) -> Vec<String> {
    row.iter().map(|&x| l.format(x)).collect()
}

fn verdict_of(v: &DescentVerdict) -> Verdict {
    match v.as_bool() {
        Some(b) => Verdict::from_bool(b),
        None => Verdict::Undetermined(UndeterminedReason::UnsupportedTorusDecomposition),
    }
}

fn model_torus(model: &FiberModel, q: u64) -> TorusReport {
    let labels: Vec<String> = model.charts.iter().map(|c| c.label.clone()).collect();
    TorusReport {
        char_poly: frobenius_char_poly(&model.h1.lattice),
        order: torus_order(&model.h1.lattice, q),
        decomposition: components_of(&model.h1.lattice, &model.decomposition, &labels, q),
        enumeration: None,
    }
}

fn nu_rows(model: &FiberModel, r: u64) -> Option<Table> {
    let rows = nu_table(model, r).ok()?;
    Some(Table {
        name: format!("nu_mod_{r}"),
        columns: model.charts.iter().map(|c| c.label.clone()).collect(),
        rows: rows
            .into_iter()
            .map(|row| TableRow {
                label: format!("{:?}", row.delta),
                values: row.classes.iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
    })
}

pub fn hyperelliptic_input_echo(input: &HyperellipticInput, qp: bool) -> Value {
    json!({
        "field": if qp { "p" } else { "q" },
        "q": input.q,
        "g": format_univariate(&input.g),
        "h": format_univariate(&input.h),
        "r": input.r,
    })
}

pub fn hyperelliptic_report(input: &HyperellipticInput, qp: bool, limit: u64) -> JsonReport {
    let r = JsonReport::new("hyperelliptic", hyperelliptic_input_echo(input, qp));
    if qp && !arith::is_prime(input.q) {
        return r.invalid(Status::HypothesisViolated, vec![Issue::new("bad_field", format!("{} is not prime", input.q))]);
    }
    let c = match hyperelliptic::validate_hyperelliptic(input, limit) {
        Ok(c) => c,
        Err(errs) => {
            let issues = errs.iter().map(|e| Issue::new(&error_code(e), e.to_string())).collect();
            return r.invalid(Status::HypothesisViolated, issues);
        }
    };
    match hyperelliptic_sections(r.clone(), &c, qp) {
        Ok(rep) => rep.finish(),
        Err(e) => r.invalid(Status::HypothesisViolated, vec![Issue::new("computation_failed", e.to_string())]),
    }
}

fn hyperelliptic_sections(mut r: JsonReport, c: &Hyperelliptic, qp: bool) -> Result<JsonReport, FamilyError> {
    let q = c.q();
    let d = c.d as i64;
    let phi = component_group(&IntersectionMatrix(vec![vec![-d, d], vec![d, -d]])).map_err(crate::descent::DescentError::from)?;
    r.phi = Some(phi_report(&phi));
    let model = match hyperelliptic::hyperelliptic_model(c) {
        Ok(m) => Some(m),
        Err(FamilyError::Unsupported) => None,
        Err(e) => return Err(e),
    };
    r.torus = Some(match &model {
        Some(m) => model_torus(m, q),
        None => {
            let graph = hyperelliptic::hyperelliptic_graph(c).map_err(crate::descent::DescentError::from)?;
            let h1 = h1_basis(&graph).map_err(crate::descent::DescentError::from)?;
            TorusReport {
                char_poly: frobenius_char_poly(&h1.lattice),
                order: torus_order(&h1.lattice, q),
                decomposition: None,
                enumeration: None,
            }
        }
    });
    let undetermined = Verdict::Undetermined(UndeterminedReason::UnsupportedTorusDecomposition);
    let engine_for = |rr: u64| -> Result<Verdict, FamilyError> {
        match &model {
            Some(m) => Ok(verdict_of(&divisibility_verdict(m, &hyperelliptic::canonical_divisor(c), rr)?)),
            None => Ok(undetermined),
        }
    };
    // theta characteristic
    let closed = hyperelliptic::theta_bd(c);
    let engine = engine_for(2)?;
    let (verdict, source) = match closed {
        Verdict::Undetermined(_) if engine.as_bool().is_some() => (engine, "engine"),
        v => (v, "closed_form"),
    };
    r.verdicts.theta = Some(VerdictReport { verdict, source: source.into(), engine: Some(engine) });
    if closed.as_bool().is_some() && engine.as_bool().is_some() {
        r.cross_check.push(Check { name: "theta_closed_form_vs_engine".into(), passed: closed == engine });
    }
    let target = c.input.r;
    if target == 3 {
        let v = engine_for(3)?;
        r.verdicts.cube_root = Some(VerdictReport { verdict: v, source: "engine".into(), engine: Some(v) });
    } else if target != 2 {
        let v = engine_for(target)?;
        r.verdicts.divisibility = Some(DivisibilityReport {
            r: target,
            verdict: VerdictReport { verdict: v, source: "engine".into(), engine: Some(v) },
        });
    }
    // torsion
    let closed_t = hyperelliptic::torsion_bd(c);
    let engine_t = match &model {
        Some(_) => hyperelliptic::torsion_engine(c)?,
        None => None,
    };
    let expected = r.torus.as_ref().map_or(0, |t| t.order) * arith::prime_to_part(c.d as u64, c.field.characteristic());
    let chosen = closed_t.clone().map(|t| (t, "closed_form")).or_else(|| engine_t.clone().map(|t| (t, "engine")));
    if let Some((t, source)) = chosen {
        let order: u64 = t.iter().product();
        r.torsion = Some(TorsionReport {
            label: TORSION_LABEL.into(),
            order,
            invariant_factors: t,
            source: source.into(),
            engine: engine_t.clone(),
            order_consistent: order == expected,
        });
    } else {
        r.warnings.push(Issue::new(UndeterminedReason::UnsupportedTorusDecomposition.code(), "torsion is undetermined"));
        r.status = Status::Undetermined;
    }
    if let (Some(a), Some(b)) = (&closed_t, &engine_t) {
        r.cross_check.push(Check { name: "torsion_closed_form_vs_engine".into(), passed: a == b });
    }
    if let Some(m) = &model {
        if let Some(t) = nu_rows(m, target) {
            r.tables.push(t);
        }
    }
    // notes
    if qp {
        r.warnings.push(Issue::new(
            "qp_full_torsion",
            format!(
                "K = Q_{q}: the kernel of reduction is torsion-free for p != 2, so {TORSION_LABEL} is the full rational torsion when Φ[p] = 0 (|Φ| = {}, p = {q})",
                phi.order()
            ),
        ));
    }
    if (q - 1) % target != 0 {
        r.warnings.push(Issue::new(
            "per_component_mu",
            format!("r = {target} does not divide q - 1; classes are computed in each μ(T_i) separately"),
        ));
    }
    if c.d == 3 && c.reduction_type() == ReductionType::OneRationalRoot && q % 3 == 2 {
        r.warnings.push(Issue::new(
            "torsion_one_root_q_2_mod_3",
            "one rational root with q = 2 mod 3: the 3-part test uses h(α_1)^((q^2-1)/3) = 1 without α_0",
        ));
    }
    Ok(r)
}

pub fn genus4_input_echo(input: &Genus4Input) -> Value {
    json!({ "q": input.q, "eps": input.eps, "r": input.r })
}

pub fn genus4_report(input: &Genus4Input, limit: u64) -> JsonReport {
    let r = JsonReport::new("genus4", genus4_input_echo(input));
    if input.r != 2 && input.r != 3 {
        return r.invalid(Status::HypothesisViolated, vec![Issue::new("bad_r", "r must be 2 or 3")]);
    }
    let c = match genus4::validate_genus4(input, limit) {
        Ok(c) => c,
        Err(errs) => {
            let issues = errs.iter().map(|e| Issue::new(&error_code(e), e.to_string())).collect();
            return r.invalid(Status::HypothesisViolated, issues);
        }
    };
    match genus4_sections(r.clone(), &c) {
        Ok(rep) => rep.finish(),
        Err(e) => r.invalid(Status::HypothesisViolated, vec![Issue::new("computation_failed", e.to_string())]),
    }
}

fn genus4_sections(mut r: JsonReport, c: &Genus4) -> Result<JsonReport, FamilyError> {
    let q = c.q();
    let model = genus4::genus4_model(c)?;
    r.phi = Some(phi_report(&model.phi));
    r.torus = Some(model_torus(&model, q));
    let l = c.big();
    let table = genus4::closed_form_table(c);
    r.tables.push(Table {
        name: "loop_values".into(),
        columns: vec!["gamma1".into(), "gamma2".into(), "gamma3".into(), "gamma4".into()],
        rows: table
            .iter()
            .zip(genus4::TABLE_ROWS)
            .map(|(row, label)| TableRow { label: format!("div({label})"), values: format_row(l, row) })
            .collect(),
    });
    r.tables.push(Table {
        name: "eps_at_nodes".into(),
        columns: vec!["value".into()],
        rows: genus4::node_value_list(c)
            .into_iter()
            .map(|(label, v)| TableRow { label: label.into(), values: vec![l.format(v)] })
            .collect(),
    });
    r.cross_check.push(Check { name: "table_closed_form_vs_direct".into(), passed: direct_table(c)? == table });
    let theta = genus4::theta_genus4(c);
    let theta_e = genus4::theta_engine(c)?;
    r.verdicts.theta = Some(VerdictReport { verdict: theta, source: "closed_form".into(), engine: Some(theta_e) });
    r.cross_check.push(Check { name: "theta_closed_form_vs_engine".into(), passed: theta == theta_e });
    let cube = genus4::cuberoot_genus4(c);
    let cube_e = genus4::cuberoot_engine(c)?;
    r.verdicts.cube_root = Some(VerdictReport { verdict: cube, source: "closed_form".into(), engine: Some(cube_e) });
    r.cross_check.push(Check { name: "cube_root_closed_form_vs_engine".into(), passed: cube == cube_e });
    let literal = genus4::cuberoot_literal(c);
    if literal != cube {
        r.warnings.push(Issue::new(
            "cube_root_literal_criterion_differs",
            format!(
                "the test ε(i,i,-1,1)^((q^2-1)/3) = 1 gives {}, but the row div(Z-W) already lies in the cubes when i is not in k and q = 2 mod 3",
                verdict_word(literal)
            ),
        ));
    }
    let t = genus4::torsion_genus4(c);
    let te = genus4::torsion_engine(c)?;
    let order: u64 = t.iter().product();
    let expected = r.torus.as_ref().map_or(0, |t| t.order) * model.phi.order();
    r.cross_check.push(Check { name: "torsion_closed_form_vs_engine".into(), passed: t == te });
    r.torsion = Some(TorsionReport {
        label: TORSION_LABEL.into(),
        invariant_factors: t,
        order,
        source: "closed_form".into(),
        engine: Some(te),
        order_consistent: order == expected,
    });
    if !c.i_in_k {
        r.warnings.push(Issue::new("i_not_rational", format!("i is not in GF({q}); values of γ3, γ4 lie in GF({})", q * q)));
    }
    Ok(r)
}

pub fn oracle_report(input: &HyperellipticInput, trials: u64, seed: u64, limit: u64) -> JsonReport {
    let mut echo = hyperelliptic_input_echo(input, false);
    echo["trials"] = json!(trials);
    echo["seed"] = json!(seed);
    let r = JsonReport::new("oracle", echo);
    let c = match hyperelliptic::validate_hyperelliptic(input, limit) {
        Ok(c) => c,
        Err(errs) => {
            let issues = errs.iter().map(|e| Issue::new(&error_code(e), e.to_string())).collect();
            return r.invalid(Status::HypothesisViolated, issues);
        }
    };
    let model = match hyperelliptic::hyperelliptic_model(&c) {
        Ok(m) => m,
        Err(FamilyError::Unsupported) => {
            let mut r = r;
            r.status = Status::Undetermined;
            r.warnings.push(Issue::new(UndeterminedReason::UnsupportedTorusDecomposition.code(), "no descent model"));
            return r;
        }
        Err(e) => return r.invalid(Status::HypothesisViolated, vec![Issue::new("computation_failed", e.to_string())]),
    };
    let run = || -> Result<OracleReport, String> {
        let torus = oracle::enumerate_torus(&model.graph, &model.base).map_err(|e| e.to_string())?;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut agree = 0;
        for _ in 0..trials {
            let d = oracle::random_divisor(&mut rng, &model, true);
            let engine = evaluate_all(&model, &d, 0).map_err(|e| e.to_string())?;
            let ok = (0..model.charts.len())
                .all(|i| oracle::chain_evaluate(&model, i, &d).map(|v| v == engine[i]).unwrap_or(false));
            agree += u64::from(ok);
        }
        let canon = hyperelliptic::canonical_divisor(&c);
        let rr = input.r;
        let engine = divisibility_verdict(&model, &canon, rr).map_err(|e| e.to_string())?.as_bool();
        let exhaustive = oracle::exhaustive_verdict_with(&model, &torus, &canon, rr).map_err(|e| e.to_string())?;
        Ok(OracleReport {
            enumeration: torus.summary(),
            expected_order: model.torus_order(),
            chain_trials: trials,
            chain_agreements: agree,
            r: rr,
            exhaustive: Some(exhaustive),
            engine,
            shared_inputs: vec!["nu_rows".into(), "divisor_evaluation_for_membership".into()],
        })
    };
    match run() {
        Ok(o) => {
            let mut r = r;
            r.cross_check.push(Check { name: "enumeration_order".into(), passed: o.enumeration.points == o.expected_order });
            r.cross_check.push(Check { name: "chain_vs_engine".into(), passed: o.chain_agreements == o.chain_trials });
            r.cross_check.push(Check { name: "exhaustive_vs_engine".into(), passed: o.exhaustive == o.engine });
            r.oracle = Some(o);
            r.finish()
        }
        Err(e) => r.invalid(Status::HypothesisViolated, vec![Issue::new("oracle_failed", e)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::SyntaxError.exit_code(), 2);
        assert_eq!(Status::HypothesisViolated.exit_code(), 3);
        assert_eq!(Status::Undetermined.exit_code(), 4);
    }

    #[test]
    fn component_group_example() {
        let r = component_group_report(&[vec![-4, 2, 2], vec![2, -4, 2], vec![2, 2, -4]]);
        assert_eq!(r.phi.unwrap().invariant_factors, vec![2, 6]);
    }
}
