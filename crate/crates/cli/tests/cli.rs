use std::process::{Command, Output};

use jacdesc::report::{JsonReport, Status};

fn jacdesc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacdesc")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (JsonReport, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = jacdesc(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let r: JsonReport = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (r, out.status.code().unwrap())
}

#[test]
fn component_group_example() {
    let (r, code) = report(&["component-group", "--matrix", "[[-4,2,2],[2,-4,2],[2,2,-4]]"]);
    assert_eq!(code, 0);
    assert_eq!(r.phi.unwrap().invariant_factors, vec![2, 6]);
}

#[test]
fn theta_at_23() {
    let (r, code) = report(&["hyperelliptic", "--p", "23", "--g", "x^3-x", "--h", "x+2", "--r", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r.verdicts.theta.unwrap().verdict.as_bool(), Some(true));
    assert!(r.warnings.iter().any(|w| w.code == "qp_full_torsion"));
    let t = r.torsion.unwrap();
    assert_eq!(t.label, "J(K)(p')");
    assert!(t.order_consistent);
}

#[test]
fn residue_field_mode_has_no_qp_warning() {
    let (r, _) = report(&["hyperelliptic", "--q", "7", "--g", "x^3-x", "--h", "x+2"]);
    assert!(r.warnings.iter().all(|w| w.code != "qp_full_torsion"));
    assert_eq!(r.torsion.unwrap().invariant_factors, vec![6, 18]);
}

#[test]
fn genus4_example() {
    let (r, code) = report(&["genus4", "--q", "13", "--eps", "X^3+Y^3+W*Z^2", "--r", "3"]);
    assert_eq!(code, 0);
    assert!(r.cross_check.iter().all(|c| c.passed), "{:?}", r.cross_check);
    assert!(r.verdicts.cube_root.is_some());
    let table = r.tables.iter().find(|t| t.name == "loop_values").unwrap();
    assert_eq!(table.rows[0].values[..2], ["12".to_string(), "12".to_string()]);
    // γ1(div(Z - W)) at q = 13
    assert_eq!(table.rows[1].values[0], "3");
}

#[test]
fn syntax_errors_exit_2_with_position() {
    let (r, code) = report(&["hyperelliptic", "--q", "7", "--g", "x**3", "--h", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r.status, Status::SyntaxError);
    assert_eq!(r.validity.errors[0].position, Some(2));

    let (_, code) = report(&["genus4", "--q", "13", "--eps", "2X^3"]);
    assert_eq!(code, 2);
    let (_, code) = report(&["component-group", "--matrix", "[[1,2]"]);
    assert_eq!(code, 2);
    assert_eq!(jacdesc(&["hyperelliptic", "--q", "7"]).status.code(), Some(2));
}

#[test]
fn hypothesis_violations_exit_3() {
    let (r, code) = report(&["hyperelliptic", "--q", "7", "--g", "x^3", "--h", "1"]);
    assert_eq!(code, 3);
    assert!(r.validity.errors.iter().any(|e| e.code == "not_separable_reduction"));
    let (_, code) = report(&["hyperelliptic", "--p", "25", "--g", "x^3-x", "--h", "1"]);
    assert_eq!(code, 3);
    let (_, code) = report(&["component-group", "--matrix", "[[-3,2],[3,-3]]"]);
    assert_eq!(code, 3);
}

#[test]
fn undetermined_exits_4_with_reason() {
    // ḡ mod 7 is a product of two irreducible quadratics: no rational root
    let (r, code) = report(&["hyperelliptic", "--q", "7", "--g", "(x^2+1)*(x^2+2)", "--h", "1"]);
    assert_eq!(code, 4);
    assert_eq!(r.status, Status::Undetermined);
    assert!(r.torsion.is_none());
    assert!(r.warnings.iter().any(|w| w.code == "unsupported_torus_decomposition"));
}

#[test]
fn json_is_deterministic_and_round_trips() {
    let args = ["genus4", "--q", "11", "--eps", "X^3 + 2*Y*Z*W - W^3", "--r", "3", "--json"];
    let a = jacdesc(&args).stdout;
    let b = jacdesc(&args).stdout;
    assert_eq!(a, b);
    let r: JsonReport = serde_json::from_slice(&a).unwrap();
    assert_eq!(r.to_json() + "\n", String::from_utf8(a).unwrap());
}

#[test]
fn field_limit_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_jacdesc"))
        .args(["genus4", "--q", "11", "--eps", "X^3+Y^3", "--json"])
        .env("JACDESC_FIELD_LIMIT", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_jacdesc"))
        .args(["component-group", "--matrix", "[[-3,3],[3,-3]]"])
        .env("JACDESC_FIELD_LIMIT", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batch_preserves_order() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("batch.txt");
    let mut lines = Vec::new();
    for p in [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        lines.push(format!("hyperelliptic --p {p} --g 'x^3-x' --h 'x+2'"));
    }
    lines.push("component-group --matrix '[[-3,3],[3,-3]]'".into());
    lines.push("hyperelliptic --q 7 --g 'x**3' --h 1".into());
    std::fs::write(&path, lines.join("\n")).unwrap();
    let out = jacdesc(&["--batch", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    let reports: Vec<JsonReport> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), lines.len());
    for (r, p) in reports.iter().zip([5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]) {
        assert_eq!(r.input["q"], p);
        let expected = p % 24 == 1 || p % 24 == 23;
        assert_eq!(r.verdicts.theta.as_ref().unwrap().verdict.as_bool(), Some(expected), "p = {p}");
    }
    assert_eq!(reports[13].phi.as_ref().unwrap().invariant_factors, vec![3]);
    assert_eq!(reports[14].status, Status::SyntaxError);
}

#[test]
fn torus_enumeration_matches_order() {
    let (r, code) = report(&["torus", "--q", "5", "--lattice", "cyclotomic:3", "--enumerate"]);
    assert_eq!(code, 0);
    let t = r.torus.unwrap();
    assert_eq!(t.order, 31);
    assert_eq!(t.enumeration.unwrap().points, 31);
}

#[test]
fn oracle_agrees() {
    let (r, code) = report(&["oracle", "--q", "7", "--g", "x^3-x", "--h", "x+2", "--r", "3", "--trials", "40"]);
    assert_eq!(code, 0);
    assert!(r.cross_check.iter().all(|c| c.passed), "{:?}", r.cross_check);
    assert!(!r.oracle.unwrap().shared_inputs.is_empty());
}
