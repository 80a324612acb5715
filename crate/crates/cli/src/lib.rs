//! Batch front end: reduction, τ and forcing values, chain conditions, and
//! goal verification. Output is plain text and deterministic.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use classreal::algebra::{
    algebra_delta_chain_condition, ba_delta_cc, forcing_value, tau_process, tau_stack, tau_term,
    uniform_delta_chain_condition, BoolAlg, ChainVerdict, TauContext,
};
use classreal::formulas::parse_formula;
use classreal::kam::reduce;
use classreal::lambda_c::{parse_stack, parse_term, Printer, Process, Stack};
use classreal::verifier::{
    library_printer, parse_universe, resolve_term, verify_corpus, Config, Report, Verdict,
};
use classreal::NameUniverse;

/// Exit status for a run whose checks all held.
pub const EXIT_OK: i32 = 0;
/// Exit status when a goal failed, ran out of fuel, or verdicts disagreed.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for usage, I/O and parse errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "classreal", version, about = "Classical realizability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Machine steps allowed per reduction.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Write the output to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Print full traces: every machine step, or every proof rule.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs the machine on `TERM ⋆ STACK`.
    Reduce {
        term: String,
        #[arg(long, default_value = "w_0")]
        stack: String,
        /// Print terms structurally, without library names.
        #[arg(long)]
        plain: bool,
    },
    /// Prints τ of a term, a stack, or the process they form.
    Tau {
        term: Option<String>,
        #[arg(long)]
        stack: Option<String>,
        /// `atomsN` or a path to an algebra file.
        #[arg(long)]
        algebra: String,
    },
    /// Prints the forcing value of a closed formula.
    Force {
        formula: String,
        #[arg(long)]
        algebra: String,
        /// Range of unbounded quantifiers: inline names or a file.
        #[arg(long)]
        universe: Option<String>,
    },
    /// Decides the antichain and realizability chain conditions.
    ChainCheck {
        /// Powerset algebra on this many atoms.
        #[arg(long, conflicts_with = "algebra")]
        atoms: Option<usize>,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<usize>,
    },
    /// Proves a single claim, e.g. `realizes cc : ((A -> B) -> A) -> A`.
    Verify {
        claim: String,
        /// Extra goal directives such as `hyp realizer u : A`.
        #[arg(long = "with")]
        with: Vec<String>,
        #[arg(long)]
        universe: Option<String>,
    },
    /// Verifies a goal corpus file, or every `*.goals` file in a directory.
    Corpus { path: PathBuf },
}

enum Failure {
    Usage(String),
    Io(String),
    Parse(String),
    Eval(String),
}

impl Failure {
    fn text(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Io(m) => format!("io error: {m}"),
            Failure::Parse(m) => format!("parse error: {m}"),
            Failure::Eval(m) => format!("error: {m}"),
        }
    }
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Parse(format!("{what}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// An inline value, or the contents of the file it names.
fn inline_or_file(s: &str) -> Result<String, Failure> {
    let p = Path::new(s);
    if p.is_file() {
        read(p)
    } else {
        Ok(s.to_string())
    }
}

fn algebra(spec: &str) -> Result<BoolAlg, Failure> {
    let text = if spec.starts_with("atoms") {
        spec.to_string()
    } else {
        read(Path::new(spec))?
    };
    BoolAlg::from_spec_or_text(&text).map_err(|e| parse_err("algebra", e))
}

fn universe(spec: Option<&str>) -> Result<Option<NameUniverse>, Failure> {
    spec.map(|s| {
        let text = inline_or_file(s)?;
        let joined = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(", ");
        parse_universe(&joined).map_err(|e| parse_err("universe", e))
    })
    .transpose()
}

fn term(s: &str) -> Result<classreal::Term, Failure> {
    parse_term(s)
        .map(|t| resolve_term(&t))
        .map_err(|e| parse_err("term", e))
}

fn stack(s: &str) -> Result<Stack, Failure> {
    parse_stack(s)
        .map(|st| st.map_terms(&mut |t| resolve_term(t)))
        .map_err(|e| parse_err("stack", e))
}

fn elems(alg: &BoolAlg, xs: &[usize]) -> String {
    let names: Vec<&str> = xs.iter().map(|&x| alg.name(x)).collect();
    format!("{{{}}}", names.join(","))
}

fn chain_line(label: &str, alg: &BoolAlg, v: &ChainVerdict) -> String {
    match &v.counterexample {
        None => format!("{label}: HOLDS"),
        Some((c, bs)) => format!(
            "{label}: FAIL c={} witness={}",
            alg.name(*c),
            elems(alg, bs)
        ),
    }
}

fn report_text(report: &Report, trace: bool) -> String {
    let mut out = String::new();
    let lines = if trace {
        report.render_detailed()
    } else {
        report.render()
    };
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    if trace {
        for g in &report.goals {
            for (label, t) in g.traces() {
                let _ = writeln!(out, "proof of {} {label}", g.id);
                for l in t.render() {
                    let _ = writeln!(out, "  {l}");
                }
            }
        }
    }
    let passed = report
        .goals
        .iter()
        .filter(|g| g.status == classreal::verifier::GoalStatus::Pass)
        .count();
    let _ = writeln!(
        out,
        "summary: {passed}/{} goals as expected",
        report.goals.len()
    );
    out
}

fn corpus_text(path: &Path) -> Result<String, Failure> {
    if !path.is_dir() {
        return read(path);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "goals"))
        .collect();
    files.sort();
    let mut text = String::new();
    for f in files {
        text.push_str(&read(&f)?);
        text.push('\n');
    }
    Ok(text)
}

fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    let Common { fuel, trace, .. } = cli.common;
    let config = Config {
        fuel,
        ..Config::default()
    };
    let mut out = String::new();
    let code = match &cli.command {
        Command::Reduce {
            term: t,
            stack: s,
            plain,
        } => {
            let p = Process::new(term(t)?, stack(s)?);
            let tr = reduce(&p, fuel);
            let printer = if *plain {
                Printer::plain()
            } else {
                library_printer()
            };
            let _ = writeln!(out, "status: {}, {} steps", tr.status, tr.len());
            let lines = tr.render(&printer);
            let shown = if trace {
                &lines[..]
            } else {
                &lines[lines.len() - 1..]
            };
            if trace {
                let _ = writeln!(out, "{}", shown[0]);
                for (l, r) in shown[1..].iter().zip(&tr.rules) {
                    let _ = writeln!(out, "{l}    ({r})");
                }
            } else {
                let _ = writeln!(out, "{}", shown[0]);
            }
            EXIT_OK
        }
        Command::Tau {
            term: t,
            stack: s,
            algebra: a,
        } => {
            let ctx = TauContext::canonical(algebra(a)?);
            let v = match (t, s) {
                (Some(t), Some(s)) => tau_process(&Process::new(term(t)?, stack(s)?), &ctx),
                (Some(t), None) => tau_term(&term(t)?, &ctx),
                (None, Some(s)) => tau_stack(&stack(s)?, &ctx),
                (None, None) => {
                    return Err(Failure::Usage("give a term, a --stack, or both".into()))
                }
            }
            .map_err(|e| Failure::Eval(e.to_string()))?;
            let _ = writeln!(out, "{}", ctx.algebra.name(v));
            EXIT_OK
        }
        Command::Force {
            formula,
            algebra: a,
            universe: u,
        } => {
            let ctx = TauContext::canonical(algebra(a)?);
            let phi = parse_formula(formula).map_err(|e| parse_err("formula", e))?;
            let u = universe(u.as_deref())?;
            let v =
                forcing_value(&phi, u.as_ref(), &ctx).map_err(|e| Failure::Eval(e.to_string()))?;
            let _ = writeln!(out, "{}", ctx.algebra.name(v));
            EXIT_OK
        }
        Command::ChainCheck {
            atoms,
            algebra: a,
            delta,
        } => {
            let alg = match (atoms, a) {
                (Some(n), _) => BoolAlg::powerset(*n).map_err(|e| Failure::Usage(e.to_string()))?,
                (None, Some(a)) => algebra(a)?,
                (None, None) => return Err(Failure::Usage("give --atoms or --algebra".into())),
            };
            let ctx = TauContext::canonical(alg);
            let alg = &ctx.algebra;
            let mut agree = true;
            for &d in delta {
                if delta.len() > 1 {
                    let _ = writeln!(out, "delta {d}");
                }
                let a = ba_delta_cc(alg, d);
                let _ = match &a.witness {
                    None => writeln!(out, "delta-cc: HOLDS"),
                    Some(w) => writeln!(out, "delta-cc: FAIL witness={}", elems(alg, w)),
                };
                let c = algebra_delta_chain_condition(&ctx, d);
                let u = uniform_delta_chain_condition(&ctx, d);
                let _ = writeln!(out, "{}", chain_line("chain", alg, &c));
                let _ = writeln!(out, "{}", chain_line("uniform-chain", alg, &u));
                agree &= a.holds == c.holds && c.holds == u.holds;
            }
            if agree {
                EXIT_OK
            } else {
                let _ = writeln!(out, "verdicts disagree");
                EXIT_FAILED
            }
        }
        Command::Verify {
            claim,
            with,
            universe: u,
        } => {
            let mut text = String::from("goal claim expect accept\n");
            if let Some(u) = u {
                let _ = writeln!(text, "universe {}", inline_or_file(u)?.trim());
            }
            for w in with {
                let _ = writeln!(text, "{w}");
            }
            let _ = writeln!(text, "claim {claim}");
            let report = verify_corpus(&text, &config).map_err(|e| parse_err("goal", e))?;
            let r = &report.goals[0].results[0];
            match &r.verdict {
                Verdict::Accepted(t) => {
                    let _ = writeln!(out, "ACCEPTED {} steps", t.steps);
                    if trace {
                        for l in t.render() {
                            let _ = writeln!(out, "{l}");
                        }
                    }
                    EXIT_OK
                }
                Verdict::Rejected(j) => {
                    let _ = writeln!(out, "REJECTED {j}");
                    EXIT_FAILED
                }
                Verdict::OutOfFuel { steps } => {
                    let _ = writeln!(out, "OUT OF FUEL after {steps} steps");
                    EXIT_FAILED
                }
            }
        }
        Command::Corpus { path } => {
            let text = corpus_text(path)?;
            let report = verify_corpus(&text, &config).map_err(|e| parse_err("corpus", e))?;
            out.push_str(&report_text(&report, trace));
            if report.success() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
    };
    if let Some(path) = &cli.common.output {
        std::fs::write(path, &out).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        out.clear();
    }
    Ok((code, out))
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit
/// status and the text to print.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let text = if code == EXIT_ERROR {
                format!("usage error: {text}")
            } else {
                text
            };
            return (code, text);
        }
    };
    match execute(&cli) {
        Ok(r) => r,
        Err(f) => (EXIT_ERROR, format!("{}\n", f.text())),
    }
}
