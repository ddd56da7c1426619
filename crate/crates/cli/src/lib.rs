//! `kcalc` command handling, separated from `main` so tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use kcalc_core::abelian::GroupExpr;
use kcalc_core::consistency;
use kcalc_core::dsl::{parse, parse_group};
use kcalc_core::rules::{eval_concrete, eval_formal, AssumptionCheck, AssumptionStatus, Evaluator, Mutation};
use kcalc_core::spaces::canonical;
use kcalc_projrep::battery::{run_battery, BatteryReport, DEFAULT_TOLERANCE, MAX_LEVEL};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kcalc", version, about = "Formal K-groups of function algebras and a finite-level operator lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a space description to formal K-groups.
    Eval {
        expr: String,
        #[arg(long)]
        json: bool,
        /// Print the derivation tree.
        #[arg(long)]
        explain: bool,
    },
    /// Substitute concrete groups for K0(F) and K1(F).
    Instantiate {
        expr: String,
        #[arg(long, value_name = "GROUP")]
        k0: String,
        #[arg(long, value_name = "GROUP")]
        k1: String,
        #[arg(long)]
        json: bool,
        /// Treat a violated hypothesis as an error.
        #[arg(long)]
        strict: bool,
    },
    /// Run the cross-rule and six-term consistency suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Evaluate with one rule exponent perturbed, e.g. `R3:same:+1`.
        #[arg(long, hide = true)]
        mutate: Option<Mutation>,
    },
    /// Run the projective-representation identity battery.
    Projrep {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=MAX_LEVEL as i64))]
        levels: u32,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationEntry {
    pub depth: usize,
    pub rule: String,
    pub cite: String,
    pub conclusion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcreteSection {
    #[serde(rename = "K0")]
    pub k0: String,
    #[serde(rename = "K1")]
    pub k1: String,
    pub assumption_report: Vec<AssumptionCheck>,
}

/// The machine-readable result of `eval` and `instantiate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub version: u32,
    pub space: String,
    #[serde(rename = "K0")]
    pub k0: GroupExpr,
    #[serde(rename = "K1")]
    pub k1: GroupExpr,
    pub assumptions: Vec<String>,
    pub derivation: Vec<DerivationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concrete: Option<ConcreteSection>,
}

#[derive(Serialize)]
struct Versioned<'a, T> {
    version: u32,
    #[serde(flatten)]
    report: &'a T,
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    serde_json::to_string_pretty(&v).expect("values serialize") + "\n"
}

fn document(text: &str) -> Result<OutputDocument, String> {
    let x = parse(text).map_err(|e| e.to_string())?;
    let ev = eval_formal(&x).map_err(|e| e.to_string())?;
    let derivation = ev
        .derivation
        .flatten()
        .into_iter()
        .map(|(depth, s)| DerivationEntry {
            depth,
            rule: s.rule.id().into(),
            cite: s.citation.clone(),
            conclusion: s.conclusion.clone(),
        })
        .collect();
    Ok(OutputDocument {
        version: SCHEMA_VERSION,
        space: canonical(&x),
        k0: ev.kpair.k0,
        k1: ev.kpair.k1,
        assumptions: ev.kpair.assumptions.iter().map(|a| a.tag().to_string()).collect(),
        derivation,
        concrete: None,
    })
}

fn render_document(doc: &OutputDocument, explain: bool) -> String {
    let mut s = format!("space: {}\nK0: {}\nK1: {}\n", doc.space, doc.k0, doc.k1);
    if !doc.assumptions.is_empty() {
        s.push_str(&format!("assumptions: {}\n", doc.assumptions.join(", ")));
    }
    if let Some(c) = &doc.concrete {
        s.push_str(&format!("K0 = {}\nK1 = {}\n", c.k0, c.k1));
        for a in &c.assumption_report {
            s.push_str(&format!("assumption {}: {}\n", a.tag, status_word(a.status)));
        }
    }
    if explain {
        s.push_str("derivation:\n");
        for d in &doc.derivation {
            s.push_str(&format!("{}[{}] {}: {}\n", "  ".repeat(d.depth + 1), d.rule, d.cite, d.conclusion));
        }
    }
    s
}

fn status_word(s: AssumptionStatus) -> &'static str {
    match s {
        AssumptionStatus::Satisfied => "satisfied",
        AssumptionStatus::Violated => "violated",
        AssumptionStatus::Unverified => "unverified",
    }
}

fn cmd_eval(expr: &str, json: bool, explain: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match document(expr) {
        Ok(doc) => {
            let text = if json { to_sorted_json(&doc) } else { render_document(&doc, explain) };
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn cmd_instantiate(
    expr: &str,
    k0: &str,
    k1: &str,
    json: bool,
    strict: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let prepared = (|| {
        let g0 = parse_group(k0).map_err(|e| format!("--k0: {e}"))?;
        let g1 = parse_group(k1).map_err(|e| format!("--k1: {e}"))?;
        let mut doc = document(expr)?;
        let x = parse(expr).map_err(|e| e.to_string())?;
        let c = eval_concrete(&x, &g0, &g1).map_err(|e| e.to_string())?;
        doc.concrete = Some(ConcreteSection { k0: c.k0.to_string(), k1: c.k1.to_string(), assumption_report: c.assumptions });
        Ok::<_, String>((doc, g0, g1))
    })();
    let (doc, g0, g1) = match prepared {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let concrete = doc.concrete.as_ref().expect("set above");
    let violated: Vec<&AssumptionCheck> =
        concrete.assumption_report.iter().filter(|a| a.status == AssumptionStatus::Violated).collect();
    for a in &violated {
        let (label, g) = if a.tag.tag().ends_with("K1F") { ("K1(F)", &g1) } else { ("K0(F)", &g0) };
        let level = if strict { "error" } else { "warning" };
        let _ = writeln!(err, "{level}: assumption {} violated: {label} = {g} has 2-torsion", a.tag);
    }
    if strict && !violated.is_empty() {
        return EXIT_ASSUMPTION;
    }
    let text = if json { to_sorted_json(&doc) } else { render_document(&doc, false) };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_check(seed: u64, json: bool, mutate: Option<Mutation>, out: &mut dyn Write) -> i32 {
    let ev = match mutate {
        Some(m) => Evaluator::with_mutation(m),
        None => Evaluator::new(),
    };
    let report = consistency::run_checks(seed, &ev);
    let text = if json {
        to_sorted_json(&Versioned { version: SCHEMA_VERSION, report: &report })
    } else {
        report.render_text()
    };
    let _ = out.write_all(text.as_bytes());
    if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED }
}

fn cmd_projrep(levels: u32, tol: f64, seed: u64, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !(tol.is_finite() && tol >= 0.0) {
        let _ = writeln!(err, "error: --tol must be a finite non-negative number");
        return EXIT_INPUT;
    }
    let report: BatteryReport = run_battery(levels, tol, seed);
    let text = if json {
        to_sorted_json(&Versioned { version: SCHEMA_VERSION, report: &report })
    } else {
        report.render_text()
    };
    let _ = out.write_all(text.as_bytes());
    if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED }
}

/// Parses `args` (including the program name) and runs one command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let text = e.render().to_string();
            if informational {
                let _ = out.write_all(text.as_bytes());
                return EXIT_OK;
            }
            let _ = err.write_all(text.as_bytes());
            return EXIT_INPUT;
        }
    };
    match cli.command {
        Command::Eval { expr, json, explain } => cmd_eval(&expr, json, explain, out, err),
        Command::Instantiate { expr, k0, k1, json, strict } => cmd_instantiate(&expr, &k0, &k1, json, strict, out, err),
        Command::Check { seed, json, mutate } => cmd_check(seed, json, mutate, out),
        Command::Projrep { levels, tol, seed, json } => cmd_projrep(levels, tol, seed, json, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("kcalc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_rp2_json() {
        let (code, out, _) = call(&["eval", "rp2", "--json"]);
        assert_eq!(code, 0);
        let doc: OutputDocument = serde_json::from_str(&out).unwrap();
        assert_eq!(doc.k0, GroupExpr::new(1, 0, 1, 0));
        assert_eq!(doc.assumptions, ["no_2_torsion_K0F", "no_2_torsion_K1F"]);
        assert_eq!(doc.version, SCHEMA_VERSION);
    }

    #[test]
    fn json_keys_are_sorted_and_round_trip() {
        let (_, out, _) = call(&["instantiate", "sum(rp2,sphere(3))", "--k0", "Z", "--k1", "Z/3", "--json"]);
        let doc: OutputDocument = serde_json::from_str(&out).unwrap();
        assert_eq!(to_sorted_json(&doc), out);
        let keys: Vec<String> = serde_json::from_str::<serde_json::Value>(&out).unwrap().as_object().unwrap().keys().cloned().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn eval_rejects_zero_dimension() {
        let (code, out, err) = call(&["eval", "ball(0)"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.contains("dimension must be ≥ 1"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let (code, _, err) = call(&["eval", "ball(3"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("at byte 6"), "{err}");
    }

    #[test]
    fn explain_lists_rules_in_order() {
        let (code, out, _) = call(&["eval", "sum(sphere(2),point)", "--explain"]);
        assert_eq!(code, 0);
        let rules: Vec<&str> = out.lines().filter_map(|l| l.trim_start().strip_prefix('[')).map(|l| &l[..l.find(']').unwrap()]).collect();
        assert_eq!(rules, ["R10", "R5", "R1"]);
    }

    #[test]
    fn instantiate_examples() {
        let (code, out, _) = call(&["instantiate", "rp2", "--k0", "Z", "--k1", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("K0 = Z + Z/2\nK1 = 0\n"), "{out}");
        let (_, out, _) = call(&["instantiate", "euclid(3)", "--k0", "Z", "--k1", "0"]);
        assert!(out.contains("K0 = 0\nK1 = Z\n"), "{out}");
    }

    #[test]
    fn strict_violation_exits_two() {
        let (code, out, err) = call(&["instantiate", "klein_open", "--k0", "Z/4", "--k1", "0", "--strict"]);
        assert_eq!(code, EXIT_ASSUMPTION);
        assert!(out.is_empty());
        assert!(err.contains("no_2_torsion_K0F violated"), "{err}");
        let (code, _, err) = call(&["instantiate", "klein_open", "--k0", "Z/4", "--k1", "0"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.starts_with("warning"));
    }

    #[test]
    fn bad_group_is_input_error() {
        let (code, _, err) = call(&["instantiate", "rp2", "--k0", "Q", "--k1", "0"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--k0"));
    }

    #[test]
    fn check_passes_and_mutation_fails() {
        let (code, out, _) = call(&["check"]);
        assert_eq!(code, 0, "{out}");
        let (code, out, _) = call(&["check", "--mutate", "R3:same:+1"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(out.lines().any(|l| l.starts_with("FAIL sixterm/ball/")), "{out}");
    }

    #[test]
    fn projrep_level_bounds() {
        assert_eq!(call(&["projrep", "--levels", "5"]).0, EXIT_INPUT);
        assert_eq!(call(&["projrep", "--levels", "0"]).0, EXIT_INPUT);
        let (code, out, _) = call(&["projrep", "--levels", "2"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn projrep_tight_tolerance_reports_individually() {
        let (_, out, _) = call(&["projrep", "--levels", "1", "--tol", "1e-15"]);
        for id in ["cocycle/identity", "cocycle/constraints", "cocycle/beta", "projective/L1", "lemma80a/m1"] {
            assert!(out.lines().any(|l| l.starts_with(&format!("pass {id} "))), "{id}\n{out}");
        }
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("instantiate"));
    }
}
