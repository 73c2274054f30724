use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use jacdesc::families::genus4::Genus4Input;
use jacdesc::families::hyperelliptic::HyperellipticInput;
use jacdesc::finite_field::DEFAULT_FIELD_LIMIT;
use jacdesc::parse::{parse_cubic_form, parse_univariate};
use jacdesc::report::{self, JsonReport, Status};
use jacdesc::torus::CharacterLattice;

const LIMIT_VAR: &str = "JACDESC_FIELD_LIMIT";

#[derive(Parser, Debug)]
#[command(name = "jacdesc", version, about = "Divisor class descent and torsion on degenerating curves")]
struct Cli {
    /// Emit JSON reports.
    #[arg(long, global = true)]
    json: bool,

    /// Read one request per line (same syntax as the command line, without the program name).
    #[arg(long, value_name = "PATH")]
    batch: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

/// A single batch line.
#[derive(Parser, Debug)]
#[command(name = "jacdesc", no_binary_name = true)]
struct Line {
    #[arg(long)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Character lattice, order and principal decomposition of a torus over GF(q).
    Torus(TorusArgs),
    /// Component group of an intersection matrix.
    ComponentGroup {
        /// JSON matrix, e.g. "[[-3,3],[3,-3]]".
        #[arg(long)]
        matrix: String,
    },
    /// Theta characteristic and torsion for y^2 = g^2 + πh.
    Hyperelliptic(HyperellipticArgs),
    /// The genus-4 curve XY = ZW, (X - Y)(Z - W)(Z + W) = πε.
    Genus4 {
        #[arg(long)]
        q: u64,
        /// Homogeneous cubic in X, Y, Z, W.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 2)]
        r: u64,
    },
    /// Brute-force cross-check of the descent engine on a hyperelliptic fiber.
    Oracle {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "1")]
        h: String,
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct TorusArgs {
    #[arg(long)]
    q: u64,
    /// Frobenius matrix on the character lattice as JSON.
    #[arg(long, conflicts_with = "lattice", required_unless_present = "lattice")]
    frobenius: Option<String>,
    /// `split:G`, `norm:G` or `cyclotomic:D`.
    #[arg(long)]
    lattice: Option<String>,
    /// Also enumerate the rational points.
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args, Debug, Clone)]
#[group(id = "field", required = true, multiple = false)]
struct FieldArg {
    /// K = Q_p.
    #[arg(long, group = "field")]
    p: Option<u64>,
    /// Residue field GF(q) only.
    #[arg(long, group = "field")]
    q: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct HyperellipticArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    g: String,
    #[arg(long)]
    h: String,
    #[arg(long, default_value_t = 2)]
    r: u64,
}

fn field_limit() -> Result<u64, String> {
    match std::env::var(LIMIT_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{LIMIT_VAR} must be a positive integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_FIELD_LIMIT),
    }
}

fn preset(name: &str) -> Option<CharacterLattice> {
    let (kind, n) = name.split_once(':')?;
    let n: usize = n.parse().ok().filter(|&n| (1..=16).contains(&n))?;
    match kind {
        "split" => Some(CharacterLattice::split(n)),
        "norm" => Some(CharacterLattice::norm_torus(n)),
        "cyclotomic" if n >= 2 => Some(CharacterLattice::cyclotomic_quotient(n)),
        _ => None,
    }
}

fn run(command: &Command, limit: u64) -> JsonReport {
    match command {
        Command::ComponentGroup { matrix } => match serde_json::from_str::<Vec<Vec<i64>>>(matrix) {
            Ok(m) => report::component_group_report(&m),
            Err(e) => report::usage_error_report("component-group", json!({ "matrix": matrix }), format!("--matrix: {e}")),
        },
        Command::Torus(a) => {
            let echo = json!({ "q": a.q, "frobenius": a.frobenius, "lattice": a.lattice });
            let frob = match (&a.frobenius, &a.lattice) {
                (Some(f), _) => serde_json::from_str::<Vec<Vec<i64>>>(f).map_err(|e| format!("--frobenius: {e}")),
                (None, Some(l)) => preset(l)
                    .map(|l| l.frobenius.clone())
                    .ok_or_else(|| format!("--lattice: expected split:G, norm:G or cyclotomic:D, got {l:?}")),
                (None, None) => Err("one of --frobenius, --lattice is required".into()),
            };
            match frob {
                Ok(f) => report::torus_report(&f, a.q, a.enumerate, limit),
                Err(e) => report::usage_error_report("torus", echo, e),
            }
        }
        Command::Hyperelliptic(a) => {
            let (q, qp) = match (a.field.p, a.field.q) {
                (Some(p), _) => (p, true),
                (None, Some(q)) => (q, false),
                (None, None) => unreachable!("clap enforces the field group"),
            };
            let echo = json!({ "field": if qp { "p" } else { "q" }, "q": q, "g": a.g, "h": a.h, "r": a.r });
            let g = match parse_univariate(&a.g) {
                Ok(g) => g,
                Err(e) => return report::syntax_error_report("hyperelliptic", echo, "--g", &e),
            };
            let h = match parse_univariate(&a.h) {
                Ok(h) => h,
                Err(e) => return report::syntax_error_report("hyperelliptic", echo, "--h", &e),
            };
            report::hyperelliptic_report(&HyperellipticInput { q, g, h, r: a.r }, qp, limit)
        }
        Command::Genus4 { q, eps, r } => {
            let echo = json!({ "q": q, "eps": eps, "r": r });
            match parse_cubic_form(eps) {
                Ok(e) => report::genus4_report(&Genus4Input { q: *q, eps: e, r: *r }, limit),
                Err(e) => report::syntax_error_report("genus4", echo, "--eps", &e),
            }
        }
        Command::Oracle { q, g, h, r, trials, seed } => {
            let echo = json!({ "q": q, "g": g, "h": h, "r": r, "trials": trials, "seed": seed });
            let g = match parse_univariate(g) {
                Ok(g) => g,
                Err(e) => return report::syntax_error_report("oracle", echo, "--g", &e),
            };
            let h = match parse_univariate(h) {
                Ok(h) => h,
                Err(e) => return report::syntax_error_report("oracle", echo, "--h", &e),
            };
            report::oracle_report(&HyperellipticInput { q: *q, g, h, r: *r }, *trials, *seed, limit)
        }
    }
}

fn render(r: &JsonReport, json: bool, compact: bool) -> String {
    match (json, compact) {
        (true, true) => serde_json::to_string(r).expect("report serializes") + "\n",
        (true, false) => r.to_json() + "\n",
        (false, _) => r.render_text(),
    }
}

fn run_batch(path: &str, json: bool, limit: u64) -> io::Result<ExitCode> {
    let text = std::fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')).collect();
    let reports: Vec<JsonReport> = lines
        .par_iter()
        .map(|line| {
            let Some(words) = shlex::split(line) else {
                return report::usage_error_report("batch", json!({ "line": line }), "unbalanced quotes");
            };
            match Line::try_parse_from(words) {
                Ok(l) => run(&l.command, limit),
                Err(e) => report::usage_error_report("batch", json!({ "line": line }), e.kind().to_string()),
            }
        })
        .collect();
    let mut out = io::stdout().lock();
    let mut worst = Status::Ok;
    for r in &reports {
        out.write_all(render(r, json, true).as_bytes())?;
        if r.exit_code() > worst.exit_code() {
            worst = r.status;
        }
    }
    Ok(ExitCode::from(worst.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let limit = match field_limit() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.batch {
        return match run_batch(path, cli.json, limit) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {path}: {e}");
                ExitCode::from(2)
            }
        };
    }
    let Some(command) = &cli.command else {
        eprintln!("error: a subcommand or --batch is required (see --help)");
        return ExitCode::from(2);
    };
    let r = run(command, limit);
    print!("{}", render(&r, cli.json, false));
    ExitCode::from(r.exit_code() as u8)
}
