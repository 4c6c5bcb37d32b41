//! Command line: parse surface-syntax files, check proof scripts, interpret
//! terms and formulas in finite-set environments, construct and verify
//! colimits, and run the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fintopos::colimit::{finite_colimit, oracle_colimit, VerifyOptions};
use fintopos::interp::{interp_formula, interp_term};
use fintopos::report::Report;
use fintopos::sequent::{Checker, DerivedRuleRegistry, RuleId};
use fintopos::sexpr::{self, math_formula, math_term, parse_document};
use fintopos::suites::{self, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "fintopos",
    version,
    about = "Internal-language toolkit over finite sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and round-trip every item through the printer.
    Parse { path: PathBuf },
    /// Check the proof scripts in a file against the deduction rules.
    CheckProof {
        path: PathBuf,
        /// Separate signature file, when the proof file carries none.
        #[arg(long)]
        signature: Option<PathBuf>,
    },
    /// Interpret the named formulas and terms of a file in an environment.
    Interpret {
        path: PathBuf,
        /// File carrying the signature and environment (defaults to `path`).
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Construct the colimit of a diagram file.
    Colimit {
        diagram: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
    /// Run verification suites (default: all).
    Verify {
        /// Suite selector, e.g. heyting, coproducts, colimits, all.
        #[arg(default_value = "all")]
        selector: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Case count override for randomized suites.
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Internal,
    Oracle,
    Both,
}

fn read(path: &PathBuf, report: &mut Report) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            report.error(format!("{}: {e}", path.display()));
            None
        }
    }
}

fn cmd_parse(path: &PathBuf, report: &mut Report) {
    let Some(src) = read(path, report) else {
        return;
    };
    let doc = match parse_document(&src) {
        Ok(d) => d,
        Err(e) => {
            report.error(format!("parse error at {e}"));
            return;
        }
    };
    if let Some(sig) = &doc.signature {
        report.push("signature", true, sexpr::print_signature(sig));
    }
    for (name, tree) in &doc.proofs {
        // round-trip through the printer
        let printed = sexpr::print_proof(tree);
        let sig = doc.signature.clone().unwrap_or_default();
        let families = sexpr::FamilyRegistry::new();
        let pctx = sexpr::ParseCtx {
            sig: &sig,
            families: &families,
        };
        let reread = sexpr::read_all(&printed)
            .ok()
            .and_then(|s| sexpr::parse_proof(&pctx, &s[0]).ok());
        let ok = reread
            .map(|t| t.conclusion.matches(&tree.conclusion) && t.node_count() == tree.node_count())
            .unwrap_or(false);
        report.push(
            format!("proof/{name}"),
            ok,
            format!("{} nodes, round-trips", tree.node_count()),
        );
    }
    for (name, ctx, f) in &doc.formulas {
        report.push(
            format!("formula/{name}"),
            true,
            format!("⊢[{}] {}", ctx, math_formula(f)),
        );
    }
    for (name, ctx, t) in &doc.terms {
        report.push(
            format!("term/{name}"),
            true,
            format!("[{}] {}", ctx, math_term(t)),
        );
    }
    if let Some((spec, _)) = &doc.diagram {
        report.push(
            "diagram",
            true,
            format!(
                "{} object(s), {} morphism(s)",
                spec.objects.len(),
                spec.morphisms.len()
            ),
        );
    }
}

fn cmd_check_proof(path: &PathBuf, signature: &Option<PathBuf>, report: &mut Report) {
    let Some(src) = read(path, report) else {
        return;
    };
    let mut doc = match parse_document(&src) {
        Ok(d) => d,
        Err(e) => {
            report.error(format!("parse error at {e}"));
            return;
        }
    };
    if let Some(sig_path) = signature {
        let Some(sig_src) = read(sig_path, report) else {
            return;
        };
        match parse_document(&sig_src) {
            Ok(d) => doc.signature = d.signature,
            Err(e) => {
                report.error(format!("signature parse error at {e}"));
                return;
            }
        }
        // re-parse the proofs under the provided signature
        doc = match parse_with_signature(&src, doc.signature.clone()) {
            Ok(d) => d,
            Err(e) => {
                report.error(format!("parse error at {e}"));
                return;
            }
        };
    }
    let Some(sig) = doc.signature.clone() else {
        report.error("no signature in the file; pass --signature");
        return;
    };
    // derived-sequent leaves need the semantically validated registry
    let needs_registry = doc.proofs.iter().any(|(_, t)| tree_uses_derived(t));
    let registry = if needs_registry {
        match suites::validated_registry() {
            Ok(r) => r,
            Err(e) => {
                report.error(format!("derived-rule validation failed: {e}"));
                return;
            }
        }
    } else {
        DerivedRuleRegistry::new()
    };
    let checker = Checker::new(&sig, &registry);
    for (name, tree) in &doc.proofs {
        match checker.check_tree(tree) {
            Ok(()) => report.push(
                format!("proof/{name}"),
                true,
                format!("{} nodes accepted", tree.node_count()),
            ),
            Err(e) => report.push(format!("proof/{name}"), false, e.to_string()),
        }
    }
}

fn parse_with_signature(
    src: &str,
    sig: Option<fintopos::Signature>,
) -> Result<sexpr::Document, sexpr::ParseError> {
    // splice the signature in front so proofs see its symbols
    let mut full = String::new();
    if let Some(sig) = sig {
        full.push_str(&sexpr::print_signature(&sig));
        full.push('\n');
    }
    full.push_str(src);
    parse_document(&full)
}

fn tree_uses_derived(tree: &fintopos::ProofTree) -> bool {
    matches!(tree.rule, RuleId::DerivedSequent(_)) || tree.premises.iter().any(tree_uses_derived)
}

fn cmd_interpret(path: &PathBuf, env_path: &Option<PathBuf>, report: &mut Report) {
    let Some(src) = read(path, report) else {
        return;
    };
    let doc = match parse_document(&src) {
        Ok(d) => d,
        Err(e) => {
            report.error(format!("parse error at {e}"));
            return;
        }
    };
    let env = match env_path {
        Some(p) => {
            let Some(env_src) = read(p, report) else {
                return;
            };
            match parse_document(&env_src) {
                Ok(d) => d.environment,
                Err(e) => {
                    report.error(format!("environment parse error at {e}"));
                    return;
                }
            }
        }
        None => doc.environment.clone(),
    };
    let Some(env) = env else {
        report.error("no environment found; add one to the file or pass --env");
        return;
    };
    for (name, ctx, f) in &doc.formulas {
        match interp_formula(ctx, f, &env) {
            Ok(sub) => {
                report.push(
                    format!("formula/{name}"),
                    true,
                    format!(
                        "{} of {} carrier elements satisfy {}",
                        sub.size(),
                        sub.ambient.size(),
                        math_formula(f)
                    ),
                );
                report.artifact(format!("formula/{name}"), &sub);
            }
            Err(e) => report.push(format!("formula/{name}"), false, e.to_string()),
        }
    }
    for (name, ctx, t) in &doc.terms {
        match interp_term(ctx, t, &env) {
            Ok(mor) => {
                report.push(
                    format!("term/{name}"),
                    true,
                    format!("morphism with {} table entries", mor.table().len()),
                );
                report.artifact(format!("term/{name}"), &mor);
            }
            Err(e) => report.push(format!("term/{name}"), false, e.to_string()),
        }
    }
}

fn cmd_colimit(diagram: &PathBuf, mode: Mode, seed: u64, size_cap: usize, report: &mut Report) {
    let Some(src) = read(diagram, report) else {
        return;
    };
    let doc = match parse_document(&src) {
        Ok(d) => d,
        Err(e) => {
            report.error(format!("parse error at {e}"));
            return;
        }
    };
    let Some((spec, env)) = doc.diagram else {
        report.error("no diagram in the file");
        return;
    };
    let opts = VerifyOptions {
        apex_cap: size_cap,
        seed,
        ..VerifyOptions::default()
    };
    let oracle = if matches!(mode, Mode::Oracle | Mode::Both) {
        match oracle_colimit(&spec, &env) {
            Ok((obj, cocone)) => {
                report.push(
                    "oracle",
                    true,
                    format!("oracle colimit has {} element(s)", obj.size()),
                );
                report.artifact("oracle/object", &obj);
                for (j, leg) in cocone.legs.iter().enumerate() {
                    report.artifact(format!("oracle/leg{j}"), leg);
                }
                Some(obj)
            }
            Err(e) => {
                report.push("oracle", false, e.to_string());
                None
            }
        }
    } else {
        None
    };
    if matches!(mode, Mode::Internal | Mode::Both) {
        match finite_colimit(&spec, &env, &opts) {
            Ok(result) => {
                report.push(
                    "internal",
                    true,
                    format!("internal colimit has {} element(s)", result.object.size()),
                );
                report.push_verification("internal", &result.verification);
                for line in &result.construction_trace {
                    report.push("trace", true, format!("; {line}"));
                }
                report.artifact("internal/object", &result.object);
                if let Some(oracle_obj) = &oracle {
                    report.push(
                        "agreement",
                        result.object.size() == oracle_obj.size(),
                        format!(
                            "internal {} vs oracle {}",
                            result.object.size(),
                            oracle_obj.size()
                        ),
                    );
                }
            }
            Err(e) => report.push("internal", false, e.to_string()),
        }
    }
}

fn cmd_verify(selector: &str, config: &SuiteConfig, report: &mut Report) {
    let outcomes = if selector == "all" {
        suites::run_all(config)
    } else {
        vec![suites::run_suite(selector, config)]
    };
    for o in &outcomes {
        report.push_outcome(o);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::new("fintopos", 0);
    match &cli.command {
        Command::Parse { path } => {
            report.command = "parse".into();
            cmd_parse(path, &mut report);
        }
        Command::CheckProof { path, signature } => {
            report.command = "check-proof".into();
            cmd_check_proof(path, signature, &mut report);
        }
        Command::Interpret { path, env } => {
            report.command = "interpret".into();
            cmd_interpret(path, env, &mut report);
        }
        Command::Colimit {
            diagram,
            mode,
            seed,
            size_cap,
        } => {
            report.command = "colimit".into();
            report.seed = *seed;
            cmd_colimit(diagram, *mode, *seed, *size_cap, &mut report);
        }
        Command::Verify {
            selector,
            seed,
            cases,
            size_cap,
        } => {
            report.command = format!("verify {selector}");
            report.seed = *seed;
            let config = SuiteConfig {
                seed: *seed,
                cases: *cases,
                size_cap: *size_cap,
            };
            cmd_verify(selector, &config, &mut report);
        }
    }
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("could not write report: {e}");
            return ExitCode::from(2);
        }
    }
    for item in &report.items {
        if item.id == "trace" {
            println!("{}", item.detail);
        } else {
            println!(
                "{}: {} ({}) [{} ms]",
                item.id, item.status, item.detail, item.millis
            );
        }
    }
    for ce in &report.counterexamples {
        eprintln!("counterexample: {ce}");
    }
    println!("overall: {}", report.status);
    ExitCode::from(report.exit_code() as u8)
}
