//! The goal corpus: a line-oriented file of goal families.
//!
//! ```text
//! # comment
//! goal w0 expect accept
//! param a in 1..=3          # instances for a = 1, 2, 3
//! side a < 5                # instances violating this are dropped
//! universe std 3, hat 0..4  # range of unbounded quantifiers
//! fun s = rsucc 5           # also `hsucc n` or `{name -> name, ...}`
//! hyp realizer u : A
//! hyp falsity pi : B
//! claim realizes w0 : all x. x sub x
//! using lemma w1
//! induction rank            # or `off`
//! bound 12                  # nesting bound
//! fuel 10000                # machine steps per pole goal
//! note free text
//! ```
//!
//! `$a` and `$(a+1)` in a body line are replaced by parameter values.
//! Free identifiers in claimed terms name library combinators when they
//! can, and opaque atoms otherwise.

use std::collections::BTreeMap;
use std::path::Path;

use super::display::{resolve_process, resolve_stack, resolve_term};
use super::{prove, Claim, Config, Goal, Hypothesis, Lemma, ProofTrace, Rejection, Verdict};
use crate::formulas::{
    parse_formula_with, parse_fun_table, parse_name_list, plain_fun, FormulaEnv, FunDef, LiftKind,
};
use crate::lambda_c::{ident, is_realizer, parse_process, parse_stack, parse_term};
use crate::names::{
    mk_gimel, mk_hat, mk_reish, op, reish_ord_segment, reish_succ_map, sng, up, Name, NameUniverse,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, CorpusError> {
    Err(CorpusError::Syntax {
        line,
        msg: msg.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Accept,
    Reject,
}

/// One instantiation of a goal family.
#[derive(Clone, Debug)]
pub struct Instance {
    /// Parameter values, e.g. `a=1 b=0`; empty without parameters.
    pub label: String,
    pub goal: Goal,
    pub config: Config,
    /// Ids of the families whose accepted claims are available as lemmas.
    pub using: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct GoalFamily {
    pub id: String,
    pub expect: Expect,
    pub line: usize,
    pub notes: Vec<String>,
    pub instances: Vec<Instance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalStatus {
    Pass,
    Fail,
    Fuel,
}

#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub label: String,
    pub goal: Goal,
    pub config: Config,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct GoalReport {
    pub id: String,
    pub expect: Expect,
    pub status: GoalStatus,
    pub steps: u64,
    pub notes: Vec<String>,
    pub results: Vec<InstanceResult>,
}

impl GoalReport {
    /// The family is accepted iff every instance is.
    pub fn accepted(&self) -> bool {
        self.results.iter().all(|r| r.verdict.is_accepted())
    }

    pub fn traces(&self) -> impl Iterator<Item = (&str, &ProofTrace)> {
        self.results.iter().filter_map(|r| match &r.verdict {
            Verdict::Accepted(t) => Some((r.label.as_str(), t)),
            _ => None,
        })
    }

    /// First rejection, with the instance it came from.
    pub fn failure(&self) -> Option<(&str, &Rejection)> {
        self.results.iter().find_map(|r| match &r.verdict {
            Verdict::Rejected(j) => Some((r.label.as_str(), j)),
            _ => None,
        })
    }

    /// Every accepted instance handles its generic elements uniformly.
    pub fn uniform(&self) -> bool {
        self.traces().all(|(_, t)| t.is_uniform())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub goals: Vec<GoalReport>,
}

impl Report {
    pub fn success(&self) -> bool {
        self.goals.iter().all(|g| g.status == GoalStatus::Pass)
    }

    pub fn goal(&self, id: &str) -> Option<&GoalReport> {
        self.goals.iter().find(|g| g.id == id)
    }

    /// `<id> PASS|FAIL|FUEL <steps>`, one line per family.
    pub fn render(&self) -> Vec<String> {
        self.goals
            .iter()
            .map(|g| {
                let s = match g.status {
                    GoalStatus::Pass => "PASS",
                    GoalStatus::Fail => "FAIL",
                    GoalStatus::Fuel => "FUEL",
                };
                format!("{} {s} {}", g.id, g.steps)
            })
            .collect()
    }

    /// [`Report::render`] with instance counts, notes and failure reasons.
    pub fn render_detailed(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (g, line) in self.goals.iter().zip(self.render()) {
            out.push(line);
            let ok = g.results.iter().filter(|r| r.verdict.is_accepted()).count();
            let expect = match g.expect {
                Expect::Accept => "accept",
                Expect::Reject => "reject",
            };
            out.push(format!(
                "  expect {expect}; {ok}/{} instances accepted{}",
                g.results.len(),
                if ok > 0 && g.uniform() {
                    "; uniform"
                } else {
                    ""
                }
            ));
            for n in &g.notes {
                out.push(format!("  note: {n}"));
            }
            if let Some((label, r)) = g.failure() {
                let label = if label.is_empty() {
                    String::new()
                } else {
                    format!(" [{label}]")
                };
                out.push(format!("  rejected{label}: {r}"));
            }
            if let Some(r) = g
                .results
                .iter()
                .find(|r| matches!(r.verdict, Verdict::OutOfFuel { .. }))
            {
                out.push(format!("  out of fuel [{}]", r.label));
            }
        }
        out
    }
}

struct Block {
    id: String,
    expect: Expect,
    line: usize,
    params: Vec<(String, String, String, usize)>,
    sides: Vec<(String, usize)>,
    body: Vec<(usize, String)>,
}

/// `#` opens a comment at the start of a line, or when followed by a
/// space; `#chi` in a term is an instruction.
fn strip_comment(line: &str) -> &str {
    let line = line.trim();
    let cut = line.char_indices().find(|&(i, c)| {
        c == '#' && (i == 0 || line[i + 1..].chars().next().is_none_or(char::is_whitespace))
    });
    match cut {
        Some((i, _)) => line[..i].trim(),
        None => line.trim(),
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim()),
        None => (s, ""),
    }
}

/// `e ::= term (('+' | '-') term)*`, terms being integers or parameters.
fn eval_expr(s: &str, vals: &BTreeMap<String, i64>) -> Result<i64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut total = 0i64;
    let mut sign = 1i64;
    let mut cur = String::new();
    let flush = |cur: &mut String, sign: i64, total: &mut i64| -> Result<(), String> {
        if cur.is_empty() {
            return Err("missing operand".into());
        }
        let v = match cur.parse::<i64>() {
            Ok(n) => n,
            Err(_) => *vals
                .get(cur.as_str())
                .ok_or_else(|| format!("unknown parameter `{cur}`"))?,
        };
        *total += sign * v;
        cur.clear();
        Ok(())
    };
    for c in s.chars() {
        match c {
            '+' | '-' => {
                if cur.is_empty() && total == 0 && sign == 1 && c == '-' {
                    sign = -1;
                    continue;
                }
                flush(&mut cur, sign, &mut total)?;
                sign = if c == '+' { 1 } else { -1 };
            }
            c if c.is_ascii_alphanumeric() || c == '_' => cur.push(c),
            other => return Err(format!("unexpected `{other}` in expression")),
        }
    }
    flush(&mut cur, sign, &mut total)?;
    Ok(total)
}

fn eval_side(s: &str, vals: &BTreeMap<String, i64>) -> Result<bool, String> {
    for op in ["<=", ">=", "==", "!=", "<", ">"] {
        if let Some(i) = s.find(op) {
            let a = eval_expr(&s[..i], vals)?;
            let b = eval_expr(&s[i + op.len()..], vals)?;
            return Ok(match op {
                "<=" => a <= b,
                ">=" => a >= b,
                "==" => a == b,
                "!=" => a != b,
                "<" => a < b,
                _ => a > b,
            });
        }
    }
    Err(format!("`{s}` is not a comparison"))
}

/// Replaces `$(expr)` and `$name`.
fn expand(line: &str, vals: &BTreeMap<String, i64>) -> Result<String, String> {
    let mut out = String::new();
    let mut rest = line;
    while let Some(i) = rest.find('$') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        if let Some(inner) = after.strip_prefix('(') {
            let close = inner.find(')').ok_or("unclosed `$(`")?;
            out.push_str(&eval_expr(&inner[..close], vals)?.to_string());
            rest = &inner[close + 1..];
        } else {
            let len = after
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(after.len());
            let name = &after[..len];
            let v = vals
                .get(name)
                .ok_or_else(|| format!("unknown parameter `{name}`"))?;
            out.push_str(&v.to_string());
            rest = &after[len..];
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn blocks(text: &str) -> Result<Vec<Block>, CorpusError> {
    let mut out: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = strip_comment(raw);
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = split_word(l);
        if kw == "goal" {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let expect = match parts.as_slice() {
                [_, "expect", "accept"] => Expect::Accept,
                [_, "expect", "reject"] => Expect::Reject,
                _ => return syntax(line, "expected `goal <id> expect accept|reject`"),
            };
            if out.iter().any(|b| b.id == parts[0]) {
                return syntax(line, format!("goal `{}` is defined twice", parts[0]));
            }
            out.push(Block {
                id: parts[0].to_string(),
                expect,
                line,
                params: Vec::new(),
                sides: Vec::new(),
                body: Vec::new(),
            });
            continue;
        }
        let Some(b) = out.last_mut() else {
            return syntax(line, "directive outside a goal");
        };
        match kw {
            "param" => {
                let (name, range) = split_word(rest);
                let Some(range) = range.strip_prefix("in") else {
                    return syntax(line, "expected `param <name> in <lo>..=<hi>`");
                };
                let Some((lo, hi)) = range.split_once("..=") else {
                    return syntax(line, "expected an inclusive range `lo..=hi`");
                };
                b.params.push((
                    name.to_string(),
                    lo.trim().to_string(),
                    hi.trim().to_string(),
                    line,
                ));
            }
            "side" => b.sides.push((rest.to_string(), line)),
            _ => b.body.push((line, l.to_string())),
        }
    }
    Ok(out)
}

fn assignments(b: &Block) -> Result<Vec<BTreeMap<String, i64>>, CorpusError> {
    let mut acc = vec![BTreeMap::new()];
    for (name, lo, hi, line) in &b.params {
        let mut next = Vec::new();
        for vals in acc {
            let lo = eval_expr(lo, &vals).or_else(|e| syntax(*line, e))?;
            let hi = eval_expr(hi, &vals).or_else(|e| syntax(*line, e))?;
            for v in lo..=hi {
                let mut m = vals.clone();
                m.insert(name.clone(), v);
                next.push(m);
            }
        }
        acc = next;
    }
    let mut kept = Vec::new();
    for vals in acc {
        let mut ok = true;
        for (s, line) in &b.sides {
            ok &= eval_side(s, &vals).or_else(|e| syntax(*line, e))?;
        }
        if ok {
            kept.push(vals);
        }
    }
    Ok(kept)
}

fn number(line: usize, s: &str) -> Result<usize, CorpusError> {
    s.trim()
        .parse()
        .or_else(|_| syntax(line, format!("expected a number, found `{s}`")))
}

/// Names of rank at most `max` built from `⌐0` by `⌐k`, singletons,
/// gimels of pairs, `up` and `op`.
fn std_universe(max: usize) -> NameUniverse {
    let mut all: Vec<Name> = (0..=max).map(mk_reish).collect();
    loop {
        let mut new = Vec::new();
        let cur = all.clone();
        let mut push = |n: Name| {
            if n.rank() <= max && !all.contains(&n) && !new.contains(&n) {
                new.push(n);
            }
        };
        for a in &cur {
            push(sng(a.clone()));
            for b in &cur {
                push(mk_gimel([a.clone(), b.clone()]));
                push(up(a.clone(), b.clone()));
                push(op(a.clone(), b.clone()));
            }
        }
        if new.is_empty() {
            return NameUniverse::closure(all);
        }
        all.extend(new);
    }
}

fn universe(line: usize, spec: &str, env: &FormulaEnv) -> Result<NameUniverse, CorpusError> {
    let (kw, rest) = split_word(spec);
    let (mut u, rest) = match kw {
        "std" | "segment" => {
            let (n, rest) = rest.split_once(',').unwrap_or((rest, ""));
            let n = number(line, n)?;
            let u = if kw == "std" {
                std_universe(n)
            } else {
                reish_ord_segment(n).universe
            };
            (u, rest)
        }
        _ => (NameUniverse::default(), spec),
    };
    for n in parse_name_list(rest.trim(), env).or_else(|e| syntax(line, e.to_string()))? {
        u.insert(n);
    }
    Ok(u)
}

/// A universe in corpus syntax: `std N`, `segment N`, then closed names,
/// e.g. `std 2, hat 0..3`.
pub fn parse_universe(spec: &str) -> Result<NameUniverse, CorpusError> {
    universe(1, spec, &FormulaEnv::default())
}

fn fun_def(line: usize, name: &str, spec: &str, env: &FormulaEnv) -> Result<FunDef, CorpusError> {
    let (kw, rest) = split_word(spec);
    match kw {
        "rsucc" => Ok(plain_fun(name, reish_succ_map(number(line, rest)?))),
        "hsucc" => {
            let n = number(line, rest)?;
            let map = (0..n)
                .map(|m| Ok((mk_hat(m, n + 1)?, mk_hat(m + 1, n + 1)?)))
                .collect::<Result<_, crate::names::NameError>>()
                .or_else(|e| syntax(line, e.to_string()))?;
            Ok(FunDef {
                id: ident(name),
                kind: LiftKind::Ordered,
                map,
            })
        }
        _ => Ok(plain_fun(
            name,
            parse_fun_table(spec, env).or_else(|e| syntax(line, e.to_string()))?,
        )),
    }
}

fn instance(
    b: &Block,
    vals: &BTreeMap<String, i64>,
    defaults: &Config,
) -> Result<(Instance, Vec<String>), CorpusError> {
    let mut env = FormulaEnv::default();
    let mut config = *defaults;
    let mut context = Vec::new();
    let mut universe_ = None;
    let mut claim = None;
    let mut using = Vec::new();
    let mut notes = Vec::new();
    let mut induction = false;
    for (line, raw) in &b.body {
        let line = *line;
        let text = expand(raw, vals).or_else(|e| syntax(line, e))?;
        let (kw, rest) = split_word(&text);
        let formula = |s: &str, env: &FormulaEnv| {
            parse_formula_with(s.trim(), env).or_else(|e| syntax(line, format!("formula: {e}")))
        };
        match kw {
            "universe" => universe_ = Some(universe(line, rest, &env)?),
            "fun" => {
                let Some((name, spec)) = rest.split_once('=') else {
                    return syntax(line, "expected `fun <name> = <definition>`");
                };
                env.define(fun_def(line, name.trim(), spec.trim(), &env)?);
            }
            "hyp" => {
                let (kind, rest) = split_word(rest);
                let Some((id, f)) = rest.split_once(':') else {
                    return syntax(line, "expected `hyp realizer|falsity <id> : <formula>`");
                };
                let id = ident(id.trim().trim_start_matches('?'));
                let formula = formula(f, &env)?;
                context.push(match kind {
                    "realizer" => Hypothesis::Realizer { atom: id, formula },
                    "falsity" => Hypothesis::Falsity { tail: id, formula },
                    _ => return syntax(line, "expected `realizer` or `falsity`"),
                });
            }
            "claim" => {
                let (kind, rest) = split_word(rest);
                let c = match kind {
                    "realizes" | "infalsity" => {
                        let Some((obj, f)) = rest.split_once(':') else {
                            return syntax(line, "expected `<object> : <formula>`");
                        };
                        let phi = formula(f, &env)?;
                        if kind == "realizes" {
                            let t = parse_term(obj.trim())
                                .or_else(|e| syntax(line, format!("term: {e}")))?;
                            Claim::Realizes(resolve_term(&t), phi)
                        } else {
                            let s = parse_stack(obj.trim())
                                .or_else(|e| syntax(line, format!("stack: {e}")))?;
                            Claim::InFalsity(resolve_stack(&s), phi)
                        }
                    }
                    "inpole" => {
                        let p = parse_process(rest)
                            .or_else(|e| syntax(line, format!("process: {e}")))?;
                        Claim::InPole(resolve_process(&p))
                    }
                    _ => return syntax(line, "expected `realizes`, `inpole` or `infalsity`"),
                };
                if claim.replace(c).is_some() {
                    return syntax(line, "a goal has one claim");
                }
            }
            "using" => {
                let Some(ids) = rest.strip_prefix("lemma") else {
                    return syntax(line, "expected `using lemma <id>, ...`");
                };
                using.extend(
                    ids.split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty()),
                );
            }
            "induction" => {
                induction = match rest {
                    "rank" => true,
                    "off" => false,
                    _ => return syntax(line, "expected `induction rank|off`"),
                }
            }
            "bound" => config.max_depth = number(line, rest)?,
            "fuel" => config.fuel = number(line, rest)? as u64,
            "note" => notes.push(rest.to_string()),
            _ => return syntax(line, format!("unknown directive `{kw}`")),
        }
    }
    let Some(claim) = claim else {
        return syntax(b.line, format!("goal `{}` has no claim", b.id));
    };
    let label = vals
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    let goal = Goal {
        claim,
        context,
        universe: universe_,
        side: b.sides.iter().map(|(s, _)| s.clone()).collect(),
        induction,
    };
    Ok((
        Instance {
            label,
            goal,
            config,
            using,
        },
        notes,
    ))
}

/// Parses and instantiates every goal family; `defaults` seeds each
/// instance's configuration.
pub fn parse_corpus(text: &str, defaults: &Config) -> Result<Vec<GoalFamily>, CorpusError> {
    blocks(text)?
        .into_iter()
        .map(|b| {
            let mut notes = Vec::new();
            let mut instances = Vec::new();
            for vals in assignments(&b)? {
                let (inst, n) = instance(&b, &vals, defaults)?;
                for n in n {
                    if !notes.contains(&n) {
                        notes.push(n);
                    }
                }
                instances.push(inst);
            }
            if instances.is_empty() {
                return syntax(b.line, format!("goal `{}` has no instances", b.id));
            }
            Ok(GoalFamily {
                id: b.id,
                expect: b.expect,
                line: b.line,
                notes,
                instances,
            })
        })
        .collect()
}

/// Verifies every family in order. Accepted families with `expect accept`
/// become lemmas for later families.
pub fn verify_corpus(text: &str, defaults: &Config) -> Result<Report, CorpusError> {
    let families = parse_corpus(text, defaults)?;
    let mut lemmas: BTreeMap<String, Vec<Lemma>> = BTreeMap::new();
    let mut report = Report::default();
    for fam in families {
        let mut results = Vec::with_capacity(fam.instances.len());
        for inst in fam.instances {
            let mut goal = inst.goal;
            let mut missing = None;
            for id in &inst.using {
                match lemmas.get(id) {
                    Some(ls) => goal
                        .context
                        .extend(ls.iter().cloned().map(Hypothesis::Lemma)),
                    None => missing = Some(id.clone()),
                }
            }
            let verdict = match missing {
                Some(id) => Verdict::Rejected(Rejection {
                    reason: format!("lemma `{id}` is not available"),
                    at: None,
                }),
                None => prove(&goal, &inst.config)
                    .or_else(|e| syntax(fam.line, format!("goal `{}`: {e}", fam.id)))?,
            };
            results.push(InstanceResult {
                label: inst.label,
                goal,
                config: inst.config,
                verdict,
            });
        }
        let steps = results
            .iter()
            .map(|r| match &r.verdict {
                Verdict::Accepted(t) => t.steps,
                Verdict::OutOfFuel { steps } => *steps,
                Verdict::Rejected(_) => 0,
            })
            .sum();
        let accepted = results.iter().all(|r| r.verdict.is_accepted());
        let fuel = results
            .iter()
            .any(|r| matches!(r.verdict, Verdict::OutOfFuel { .. }));
        let status = match (fam.expect, accepted, fuel) {
            (Expect::Accept, true, _) | (Expect::Reject, false, false) => GoalStatus::Pass,
            (_, _, true) => GoalStatus::Fuel,
            _ => GoalStatus::Fail,
        };
        if fam.expect == Expect::Accept && accepted {
            let ls = results
                .iter()
                .filter_map(|r| match &r.goal.claim {
                    Claim::Realizes(t, f) if is_realizer(t) => Some(Lemma {
                        id: fam.id.clone(),
                        term: t.clone(),
                        formula: f.clone(),
                        universe: r.goal.universe.clone(),
                    }),
                    _ => None,
                })
                .collect();
            lemmas.insert(fam.id.clone(), ls);
        }
        report.goals.push(GoalReport {
            id: fam.id,
            expect: fam.expect,
            status,
            steps,
            notes: fam.notes,
            results,
        });
    }
    Ok(report)
}

pub fn verify_corpus_file(
    path: impl AsRef<Path>,
    defaults: &Config,
) -> Result<Report, CorpusError> {
    verify_corpus(&std::fs::read_to_string(path)?, defaults)
}
