//! Subcommand implementations. Each returns the process exit code.

use std::path::Path;

use serde_json::json;

use nsa_core::corpus::{self, GoldenCase};
use nsa_core::creal::{ModFamily, Modulus, RealFn};
use nsa_core::formulas::{parse_document, parse_type, recognize_normal_form, Document, Signature};
use nsa_core::pipeline::{run_template_with, PipelineError, Role, Strategy};
use nsa_core::ust::{interpret, simplify_monotone};
use nsa_core::verifier::{self, VerificationReport, VerifyError};

use crate::output::Sink;
use crate::{Cli, Command, FnArgs, Global, RoleArg, Theorem};

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const USAGE: u8 = 2;

/// Failure before any result is produced.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

pub fn run(cli: &Cli) -> u8 {
    let mut sink = Sink::new(&cli.global);
    let code = match dispatch(cli, &mut sink) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {}", msg);
            return USAGE;
        }
    };
    if let Err(e) = sink.finish(&cli.global) {
        eprintln!("error: {}", e);
        return USAGE;
    }
    code
}

fn dispatch(cli: &Cli, sink: &mut Sink) -> Result<u8, Usage> {
    let g = &cli.global;
    match &cli.command {
        Command::Typecheck => typecheck(g, sink),
        Command::Ust => ust(g, sink),
        Command::Normalform {
            trace,
            budget,
            role,
            strategy,
        } => normalform(g, sink, *trace, *budget, *role, strategy),
        Command::Verify { theorem } => verify(g, sink, theorem),
        Command::Corpus { only, bless } => corpus_cmd(g, sink, only.as_deref(), *bless),
    }
}

fn input_path(g: &Global) -> Result<&Path, Usage> {
    g.input.as_deref().ok_or_else(|| Usage("--in PATH is required".into()))
}

fn base_signature(g: &Global) -> Result<Signature, Usage> {
    let mut sig = Signature::analysis();
    for d in &g.decls {
        let (name, ty) = d
            .split_once(':')
            .ok_or_else(|| Usage(format!("expected NAME:TYPE, got '{}'", d)))?;
        sig.declare(name.trim(), parse_type(ty.trim())?, true);
    }
    Ok(sig)
}

fn read_document(g: &Global) -> Result<(String, Document), Usage> {
    let path = input_path(g)?;
    let src = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {}", path.display(), e)))?;
    let doc = parse_document(&src, &base_signature(g)?).map_err(|e| Usage(format!("{}: {}", path.display(), e)))?;
    Ok((src, doc))
}

fn typecheck(g: &Global, sink: &mut Sink) -> Result<u8, Usage> {
    let (_, doc) = read_document(g)?;
    let internal = doc.formula.is_internal();
    let nf = recognize_normal_form(&doc.formula).is_ok();
    sink.emit(
        || format!("ok {}\n  internal     {}\n  normal form  {}", doc.formula, internal, nf),
        || json!({"command": "typecheck", "formula": doc.formula.to_string(), "ok": true, "internal": internal, "normal_form": nf}),
    );
    Ok(OK)
}

fn ust(g: &Global, sink: &mut Sink) -> Result<u8, Usage> {
    let (_, doc) = read_document(g)?;
    let raw = interpret(&doc.formula, &doc.signature)?;
    let simple = simplify_monotone(&raw);
    let (r, s) = (raw.render().to_string(), simple.result.render().to_string());
    sink.emit(
        || format!("raw         {}\nsimplified  {}", r, s),
        || {
            json!({"command": "ust", "input": doc.formula.to_string(), "raw": r, "simplified": s,
                   "simplify_steps": simple.steps, "shape_mismatch": simple.shape_mismatch})
        },
    );
    Ok(OK)
}

fn normalform(
    g: &Global,
    sink: &mut Sink,
    trace: bool,
    budget: Option<usize>,
    role: Option<RoleArg>,
    strategy: &str,
) -> Result<u8, Usage> {
    let (src, doc) = read_document(g)?;
    let stem = input_path(g)?.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    let known = corpus::Fixture::from_source(stem, src);
    let role = match role {
        Some(RoleArg::Hypothesis) => Role::Hypothesis,
        Some(RoleArg::Claim) => Role::Claim,
        None => known.role,
    };
    let mut strat = Strategy::all()
        .into_iter()
        .find(|s| s.name == strategy)
        .ok_or_else(|| Usage(format!("unknown strategy '{}'", strategy)))?;
    if let Some(b) = budget {
        strat = strat.with_budget(b);
    }
    let mut sig = doc.signature.clone();
    for p in &known.params {
        sig.declare(&p.name, p.ty.clone(), true);
    }
    let steps = |entries: &[nsa_core::pipeline::TraceEntry]| {
        entries
            .iter()
            .map(|e| json!({"rule": e.rule.name(), "evidence": e.evidence, "after": e.after.to_string()}))
            .collect::<Vec<_>>()
    };
    let text_steps = |entries: &[nsa_core::pipeline::TraceEntry]| {
        entries
            .iter()
            .map(|e| format!("{} [{}]\n  {}\n", e.rule.name(), e.evidence, e.after))
            .collect::<String>()
    };
    match run_template_with(&doc.formula, &strat, &sig, role, &known.params) {
        Ok(run) => {
            let nf = run.normal_form.to_string();
            sink.emit(
                || {
                    let t = if trace { text_steps(&run.trace.entries) } else { String::new() };
                    format!("{}normal-form {}", t, nf)
                },
                || {
                    let mut r = json!({"command": "normalform", "outcome": "normal_form", "normal_form": nf,
                                       "steps": run.trace.entries.len()});
                    if trace {
                        r["trace"] = json!(steps(&run.trace.entries));
                    }
                    r
                },
            );
            Ok(OK)
        }
        Err(PipelineError::Stuck { last, reason, trace: t }) => {
            sink.emit(
                || {
                    let s = if trace { text_steps(&t.entries) } else { String::new() };
                    format!("{}stuck {}\n  {}", s, reason, last)
                },
                || {
                    let mut r = json!({"command": "normalform", "outcome": "stuck", "reason": reason,
                                       "last": last.to_string(), "steps": t.entries.len()});
                    if trace {
                        r["trace"] = json!(steps(&t.entries));
                    }
                    r
                },
            );
            Ok(FAILED)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            Ok(FAILED)
        }
    }
}

fn function(args: &FnArgs) -> Result<(RealFn, Modulus), Usage> {
    let f = RealFn::parse(&args.f)?;
    let g = match &args.g {
        Some(src) => Modulus::parse(src)?,
        None => f.modulus(),
    };
    Ok((f, g))
}

fn verify(g: &Global, sink: &mut Sink, theorem: &Theorem) -> Result<u8, Usage> {
    let (trials, seed) = (g.trials, g.seed);
    let report = match theorem {
        Theorem::Cri { func, n } => {
            let (f, m) = function(func)?;
            verifier::check_cri(&f, &m, *n, trials, seed)
        }
        Theorem::Ftc { func, k, l } => {
            let (f, m) = function(func)?;
            outcome("ftc", verifier::check_ftc(&f, &m, *k, *l, trials, seed))?
        }
        Theorem::FtcSecond { func, k } => {
            let (f, m) = function(func)?;
            verifier::check_ftc_second(&f, &m, *k, trials.min(16))
        }
        Theorem::Ulc {
            f,
            family,
            h,
            sequence,
            k,
        } => {
            let limit = RealFn::parse(f)?;
            let (family, h) = (ModFamily::parse(family)?, Modulus::parse(h)?);
            let mut r = verifier::check_ulc(&limit, &family, &h, *k, trials, seed);
            if let Some(seq) = sequence {
                let c = outcome("ulc", verifier::check_uniform_convergence(seq, &limit, &h, *k, trials, seed))?;
                r.pass &= c.pass;
                if r.witness.is_none() {
                    r.witness = c.witness.map(|w| format!("convergence: {}", w));
                }
            }
            r
        }
        Theorem::Wei { func, k } => {
            let (f, m) = function(func)?;
            verifier::check_wei(&f, &m, *k, trials, seed)
        }
        Theorem::Ivt { func, k } => {
            let (f, m) = function(func)?;
            outcome("ivt", verifier::check_ivt(&f, &m, *k))?
        }
        Theorem::FixedPoint { func, k } => {
            let (f, m) = function(func)?;
            outcome("fixed_point", verifier::check_fixed_point(&f, &m, *k))?
        }
        Theorem::Modulus { func, k } => {
            let (f, m) = function(func)?;
            let term = m.source.clone();
            verifier::check_uniform_modulus("uniform_modulus", term, &f, &m, *k, trials, seed)
        }
    };
    emit_report(sink, &report);
    Ok(if report.pass { OK } else { FAILED })
}

/// Turns argument errors into usage failures and keeps violated
/// preconditions as failed reports.
fn outcome(id: &str, r: Result<VerificationReport, VerifyError>) -> Result<VerificationReport, Usage> {
    match r {
        Ok(rep) => Ok(rep),
        Err(VerifyError::InvalidArgument(m)) => Err(Usage(m)),
        Err(VerifyError::Expr(e)) => Err(Usage(e.to_string())),
        Err(e) => {
            let mut rep = VerificationReport::new(id, String::new(), Default::default(), 0);
            rep.pass = false;
            rep.witness = Some(e.to_string());
            Ok(rep)
        }
    }
}

fn emit_report(sink: &mut Sink, r: &VerificationReport) {
    sink.emit(|| r.to_string(), || r.to_json());
}

fn corpus_cmd(g: &Global, sink: &mut Sink, only: Option<&str>, bless: bool) -> Result<u8, Usage> {
    let cases: Vec<GoldenCase> = match &g.input {
        Some(dir) => corpus::golden_cases_in(dir)?,
        None => corpus::golden_cases(),
    };
    let selected: Vec<&GoldenCase> = cases.iter().filter(|c| c.selected(only)).collect();
    if selected.is_empty() {
        return Err(Usage(format!("no fixture matches '{}'", only.unwrap_or(""))));
    }
    let strategy = Strategy::default();
    if bless {
        let dir = input_path(g)?;
        for case in &selected {
            let path = corpus::golden_path(dir, case);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, case.transcript(&strategy)?)?;
            sink.emit(
                || format!("wrote {}", path.display()),
                || json!({"command": "corpus", "blessed": path.display().to_string()}),
            );
        }
        return Ok(OK);
    }
    let mut failed = 0;
    for case in &selected {
        let diff = match case.check(&strategy) {
            Ok(d) => d,
            Err(e) => Some(e.to_string()),
        };
        failed += usize::from(diff.is_some());
        let cat = case.category.name();
        sink.emit(
            || match &diff {
                None => format!("PASS {} {}", cat, case.name),
                Some(d) => format!("FAIL {} {}\n{}", cat, case.name, indent(d)),
            },
            || json!({"command": "corpus", "category": cat, "name": case.name, "pass": diff.is_none(), "diff": diff}),
        );
    }
    let passed = selected.len() - failed;
    sink.emit(
        || format!("{} passed, {} failed", passed, failed),
        || json!({"command": "corpus", "passed": passed, "failed": failed}),
    );
    Ok(if failed == 0 { OK } else { FAILED })
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {}\n", l)).collect()
}
