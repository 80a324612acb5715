//! Acceptance suite: one line per criterion, `criterion N: PASS|FAIL`.
//! Exits nonzero when any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use classreal::algebra::{
    algebra_delta_chain_condition, ba_delta_cc, forcing_value, uniform_delta_chain_condition,
};
use classreal::formulas::{Formula, NameExpr};
use classreal::kam::{reduce, step, Rule, Step};
use classreal::lambda_c::{parse_process, Ident, Printer, Process, Stack, Term};
use classreal::names::{mk_reish, Name, StackSpec};
use classreal::verifier::{
    check_displayed_lines, parse_universe, resolve_term, verify_corpus, Expect, GoalReport,
    ProofNode, ProofRule, Report,
};
use classreal::{prove, Claim, Config, Goal, NameUniverse, Verdict};
use common::*;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};

const CORPUS: &str = include_str!("../corpus/realizers.goals");

/// Wall-clock limit for each of the criterion 2 goals.
const PEIRCE_LIMIT: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        ProptestConfig {
            cases,
            failure_persistence: None,
            ..ProptestConfig::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn property<S: Strategy>(
    what: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| format!("{what}: {e}"))
}

fn process(s: &str) -> Process {
    let p = parse_process(s).unwrap();
    Process::new(
        resolve_term(&p.head),
        p.stack.map_terms(&mut |t| resolve_term(t)),
    )
}

fn goal<'a>(r: &'a Report, id: &str) -> Result<&'a GoalReport, String> {
    r.goal(id)
        .ok_or_else(|| format!("goal `{id}` missing from the corpus"))
}

fn accepted_all(r: &Report, id: &str) -> Result<usize, String> {
    let g = goal(r, id)?;
    ensure(g.expect == Expect::Accept && g.accepted(), || {
        match g.failure() {
            Some((label, why)) => format!("{id} [{label}] rejected: {why}"),
            None => format!("{id} not accepted"),
        }
    })?;
    Ok(g.results.len())
}

fn rules(n: &ProofNode, out: &mut BTreeSet<ProofRule>) {
    out.insert(n.rule);
    n.children.iter().for_each(|c| rules(c, out));
}

fn criterion_1() -> Outcome {
    let displayed = [
        ("(t s) * ?pi", "t * s . ?pi", Rule::Push),
        ("(\\u. u u) * s . ?pi", "s s * ?pi", Rule::Grab),
        ("cc * t . ?pi", "t * k[?pi] . ?pi", Rule::Save),
        ("k[?sigma] * t . ?pi", "t * ?sigma", Rule::Restore),
        ("cc * t . w_b", "t * k[w_b] . w_b", Rule::Save),
        (
            "#chi * nu2 . nu5 . t . s . r . ?pi",
            "t * ?pi",
            Rule::Instr(Arc::from("chi")),
        ),
    ];
    for (from, to, rule) in displayed {
        let got = step(&process(from));
        ensure(got == Step::Next(process(to), rule.clone()), || {
            format!("{from} gave {got:?}")
        })?;
    }
    let w0 = reduce(&process("w0 * t . ?pi"), 8);
    ensure(
        w0.steps.len() == 6 && *w0.last() == process("t * w0 . w0 . ?pi"),
        || "w0 unfolding".into(),
    )?;
    let swap = reduce(&process("(\\u.\\v. v u) * a . b . ?pi"), 4);
    ensure(*swap.last() == process("b * a . ?pi"), || "swap".into())?;
    for a in 0..=10u32 {
        for b in 0..=10u32 {
            let p = process(&format!("#chi * nu{a} . nu{b} . t . s . r . ?pi"));
            let want = match a.cmp(&b) {
                std::cmp::Ordering::Less => "t",
                std::cmp::Ordering::Equal => "s",
                std::cmp::Ordering::Greater => "r",
            };
            let Step::Next(q, _) = step(&p) else {
                return Err(format!("chi stuck at {a},{b}"));
            };
            ensure(q == process(&format!("{want} * ?pi")), || {
                format!("chi at {a},{b} chose {q:?}")
            })?;
        }
    }
    property("step conformance", 1000, process_shape(), |s| {
        check_step(&s)
    })?;
    property(
        "determinism and fuel prefix",
        1000,
        (process_shape(), 0u64..40),
        |(s, f)| check_reduce(&s, f),
    )?;
    Ok("6 displayed rules, w0, swap, 121 χ cases, 2×1000 random processes".into())
}

fn criterion_2(r: &Report) -> Outcome {
    let cfg = Config::default();
    let t = resolve_term(&classreal::lambda_c::parse_term("cc").unwrap());
    let phi = classreal::formulas::parse_formula("((A -> B) -> A) -> A").unwrap();
    let start = Instant::now();
    let v = prove(&Goal::new(Claim::Realizes(t, phi)), &cfg).unwrap();
    let peirce = start.elapsed();
    ensure(v.is_accepted() && peirce < PEIRCE_LIMIT, || {
        format!("peirce: {v:?} in {peirce:?}")
    })?;
    for id in ["peirce", "kpi", "kpi-pole"] {
        accepted_all(r, id)?;
    }
    let pole = goal(r, "kpi-pole")?;
    let (_, trace) = pole.traces().next().unwrap();
    let mut used = BTreeSet::new();
    rules(&trace.root, &mut used);
    ensure(
        trace.root.rule == ProofRule::AntiEval && !used.contains(&ProofRule::Kpi),
        || format!("k[π] ⋆ u·ρ used {used:?}"),
    )?;
    let mut worst = peirce;
    for g in ["peirce", "kpi", "kpi-pole"] {
        let inst = &goal(r, g)?.results[0];
        let start = Instant::now();
        prove(&inst.goal, &inst.config).unwrap();
        worst = worst.max(start.elapsed());
    }
    ensure(worst < PEIRCE_LIMIT, || {
        format!("slowest goal took {worst:?}")
    })?;
    Ok(format!(
        "slowest {worst:.2?}, k[π] ⋆ u·ρ by ANTI-EVAL without KPI"
    ))
}

fn criterion_3(r: &Report) -> Outcome {
    let mut shapes = BTreeSet::new();
    for id in ["bounded-forall", "bounded-forall-converse"] {
        let n = accepted_all(r, id)?;
        ensure(n == 3, || format!("{id}: {n} instances"))?;
        let g = goal(r, id)?;
        ensure(g.uniform(), || {
            format!("{id}: skeletons differ between instances")
        })?;
        let mut s = BTreeSet::new();
        for (_, t) in g.traces() {
            s.extend(t.instance_skeletons());
        }
        ensure(s.len() == 1, || {
            format!("{id}: {} skeletons across universe sizes", s.len())
        })?;
        shapes.extend(s);
    }
    Ok(format!("gimel sizes 1..3, {} skeletons", shapes.len()))
}

fn criterion_4(r: &Report) -> Outcome {
    let counts = [
        ("reish-elements", 5),
        ("reish-transitive", 5),
        ("reish-largest", 5),
        ("reish-limit", 5),
    ];
    for (id, want) in counts {
        let n = accepted_all(r, id)?;
        ensure(n == want, || format!("{id}: {n} instances"))?;
    }
    Ok("δ ≤ 5, α ≤ 4, truncations 1..5".into())
}

fn criterion_5(r: &Report) -> Outcome {
    let counts = [
        ("hat-elements", 5),
        ("hat-transitive", 5),
        ("hat-successor", 4),
        ("hat-membership", 10),
    ];
    for (id, want) in counts {
        let n = accepted_all(r, id)?;
        ensure(n == want, || format!("{id}: {n} instances"))?;
    }
    let wrong = goal(r, "hat-membership-wrong-literal")?;
    ensure(!wrong.accepted() && wrong.failure().is_some(), || {
        "wrong literal accepted".into()
    })?;
    Ok("bounds ≤ 5, β < α ≤ 4".into())
}

fn criterion_6(r: &Report) -> Outcome {
    for id in ["w0", "w1", "w2", "w5", "w6"] {
        accepted_all(r, id)?;
    }
    let rank3 = parse_universe("std 3").unwrap();
    for id in ["w0", "w2"] {
        let inst = &goal(r, id)?.results[0];
        let u = inst.goal.universe.as_ref().ok_or("no universe")?;
        let covers = rank3.iter().all(|a| u.contains(a));
        ensure(u.is_dom_closed() && covers, || {
            format!("{id}: universe misses rank-3 names")
        })?;
        let Verdict::Accepted(t) = &inst.verdict else {
            unreachable!()
        };
        ensure(t.root.rule == ProofRule::RankInd, || {
            format!("{id}: root {}", t.root.rule)
        })?;
    }
    let size = goal(r, "w0")?.results[0]
        .goal
        .universe
        .as_ref()
        .unwrap()
        .len();
    let neg = goal(r, "w0-no-induction")?;
    ensure(!neg.accepted() && neg.failure().is_some(), || {
        "w0 accepted without induction".into()
    })?;
    Ok(format!(
        "rank induction over {size} names, negative control rejected"
    ))
}

fn criterion_7(r: &Report) -> Outcome {
    accepted_all(r, "reish-ord-bounded")?;
    accepted_all(r, "reish-omega")?;
    Ok("segment below 5, successor lift to 5".into())
}

fn criterion_8() -> Outcome {
    property(
        "τ homomorphism",
        1000,
        (
            term_shape(),
            prop::collection::vec(term_shape(), 0..4),
            any::<u8>(),
            1usize..=3,
        ),
        |(h, s, b, a)| check_tau(&h, &s, b, a),
    )?;
    property(
        "pole closure",
        200,
        (process_shape(), 1usize..=3),
        |(s, a)| check_pole(&s, a),
    )?;
    let mut exhaustive = 0;
    for atoms in 1..=3 {
        let c = ctx(atoms);
        for names in universes(&c) {
            let universe = NameUniverse::closure(names.iter().cloned());
            let mut oracle = Oracle::new(&c, &names);
            for f in formulas_up_to_depth_one(names.len() as u8) {
                let phi = f.build(&names);
                let got = forcing_value(&phi, Some(&universe), &c).map_err(|e| e.to_string())?;
                let want = oracle.value(&phi);
                ensure(got == want, || {
                    format!("forcing {phi:?}: {got} against {want}")
                })?;
                exhaustive += 1;
            }
        }
    }
    property(
        "forcing sample",
        500,
        (formula_shape(), 1usize..=3, 0usize..3),
        |(f, a, u)| check_forcing(&f, a, u),
    )?;
    Ok(format!(
        "1000 τ, 200 traces, {exhaustive} formulas of depth ≤ 1, 500 of depth ≤ 3"
    ))
}

fn criterion_9() -> Outcome {
    for atoms in 2..=4 {
        let c = ctx(atoms);
        let alg = &c.algebra;
        for delta in 2..=4 {
            let a = ba_delta_cc(alg, delta);
            let ch = algebra_delta_chain_condition(&c, delta);
            let un = uniform_delta_chain_condition(&c, delta);
            // A powerset algebra's largest antichain is its set of atoms.
            let want = atoms < delta;
            ensure(
                a.holds == want && ch.holds == want && un.holds == want,
                || {
                    format!(
                        "{atoms} atoms, δ={delta}: {} {} {}",
                        a.holds, ch.holds, un.holds
                    )
                },
            )?;
            if let Some(w) = &a.witness {
                let pairwise = w.iter().enumerate().all(|(i, &x)| {
                    x != alg.zero() && w[i + 1..].iter().all(|&y| alg.meet(x, y) == alg.zero())
                });
                ensure(w.len() >= delta && pairwise, || {
                    format!("bad witness {w:?}")
                })?;
            }
            ensure(a.witness.is_some() != a.holds, || {
                "witness disagrees with verdict".into()
            })?;
        }
    }
    Ok("2..4 atoms × δ 2..4 agree; witnesses pairwise disjoint".into())
}

fn criterion_10() -> Outcome {
    let v = "\\t.\\s. cc (\\k. w5 (\\u. k (p (t w1) u)) (s I)) w6";
    let printer = Printer::with_names(
        [
            ("v", v),
            ("w5", "w5"),
            ("w6", "w6"),
            ("w1", "w1"),
            ("I", "I"),
        ]
        .into_iter()
        .map(|(n, t)| {
            (
                n.to_string(),
                resolve_term(&classreal::lambda_c::parse_term(t).unwrap()),
            )
        })
        .collect(),
    );
    let first = process(&format!("({v}) * t . s . ?pi"));
    let first_lines = [
        "cc (\\k.w5 (\\u.k (p (t w1) u)) (s I)) w6 ⋆ ?pi",
        "cc ⋆ (\\k.w5 (\\u.k (p (t w1) u)) (s I)).w6.?pi",
        "\\k.w5 (\\u.k (p (t w1) u)) (s I) ⋆ k[w6.?pi].w6.?pi",
        "w5 (\\u.k[w6.?pi] (p (t w1) u)) ⋆ (s I).w6.?pi",
    ];
    ensure(
        check_displayed_lines(&first, &first_lines, &printer, 100),
        || "reduction of v".into(),
    )?;
    let second = process("(\\u. k[w6 . ?pi] (p (t w1) u)) * ub . ?pib");
    let second_lines = [
        "\\u.k[w6.?pi] (p (t w1) u) ⋆ ub.?pib",
        "k[w6.?pi] ⋆ (p (t w1) ub).?pib",
        "p (t w1) ub ⋆ w6.?pi",
        "p ⋆ (t w1).ub.w6.?pi",
    ];
    ensure(
        check_displayed_lines(&second, &second_lines, &printer, 100),
        || "reduction of λu.k(...)".into(),
    )?;
    let mut swapped = first_lines;
    swapped.swap(1, 2);
    ensure(
        !check_displayed_lines(&first, &swapped, &printer, 100),
        || "misordered lines matched".into(),
    )?;
    Ok("both displays are subsequences of the machine traces".into())
}

/// Closed formulas substituted for formula letters, by arity.
struct Pool {
    nullary: Vec<Formula>,
    unary: Vec<fn(&NameExpr, &[Name]) -> Formula>,
    names: Vec<Name>,
}

impl Pool {
    fn new(ctx: &classreal::TauContext) -> Pool {
        let b = bottoms(ctx);
        let k = |i: usize| Term::kont(Stack::bottom(&b[i]));
        let c = Name::new([(Name::empty(), StackSpec::prefix([k(1)]))]);
        let d = Name::new([(Name::empty(), StackSpec::prefix([k(b.len() - 2)]))]);
        let e = || NameExpr::Const(Name::empty());
        Pool {
            nullary: vec![
                Formula::Top,
                Formula::Bot,
                Formula::NotEps(e(), NameExpr::Const(c.clone())),
                Formula::imp(
                    Formula::NotEps(e(), NameExpr::Const(d.clone())),
                    Formula::Bot,
                ),
            ],
            unary: vec![
                |_, _| Formula::Bot,
                |x, n| Formula::NotEps(x.clone(), NameExpr::Const(n[0].clone())),
                |x, n| {
                    Formula::imp(
                        Formula::NotEps(x.clone(), NameExpr::Const(n[1].clone())),
                        Formula::Bot,
                    )
                },
                |x, _| Formula::Sub(x.clone(), NameExpr::Const(mk_reish(1))),
            ],
            names: vec![c, d],
        }
    }
}

fn letters(phi: &Formula, out: &mut BTreeSet<(Ident, usize)>) {
    match phi {
        Formula::Meta(p, args) => {
            out.insert((p.clone(), args.len()));
        }
        Formula::Imp(a, b) => {
            letters(a, out);
            letters(b, out);
        }
        Formula::Forall(_, b)
        | Formula::ForallGimel(_, _, b)
        | Formula::ForallHat(_, _, b)
        | Formula::ForallReishOrd(_, _, b) => letters(b, out),
        _ => {}
    }
}

fn instantiate(phi: &Formula, choice: &HashMap<Ident, usize>, pool: &Pool) -> Formula {
    let rec = |f: &Arc<Formula>| Arc::new(instantiate(f, choice, pool));
    match phi {
        Formula::Meta(p, args) => match args.as_slice() {
            [] => pool.nullary[choice[p]].clone(),
            [x] => pool.unary[choice[p]](x, &pool.names),
            _ => unreachable!("letters of arity above one are skipped"),
        },
        Formula::Imp(a, b) => Formula::Imp(rec(a), rec(b)),
        Formula::Forall(x, b) => Formula::Forall(x.clone(), rec(b)),
        Formula::ForallGimel(x, s, b) => Formula::ForallGimel(x.clone(), s.clone(), rec(b)),
        Formula::ForallHat(x, n, b) => Formula::ForallHat(x.clone(), *n, rec(b)),
        Formula::ForallReishOrd(x, n, b) => Formula::ForallReishOrd(x.clone(), *n, rec(b)),
        other => other.clone(),
    }
}

fn criterion_11(r: &Report) -> Outcome {
    let contexts: Vec<_> = (1..=3).map(ctx).collect();
    let (mut instances, mut checks, mut skipped) = (0, 0, 0);
    for g in &r.goals {
        for inst in &g.results {
            let Claim::Realizes(t, phi) = &inst.goal.claim else {
                continue;
            };
            let hyps = inst
                .goal
                .context
                .iter()
                .any(|h| !matches!(h, classreal::Hypothesis::Lemma(_)));
            if !inst.verdict.is_accepted() || t.has_opaque() || hyps {
                continue;
            }
            let mut ls = BTreeSet::new();
            letters(phi, &mut ls);
            if ls.iter().any(|(_, n)| *n > 1) {
                skipped += 1;
                continue;
            }
            instances += 1;
            for c in &contexts {
                let pool = Pool::new(c);
                let mut choices = vec![HashMap::new()];
                for (p, arity) in &ls {
                    let n = if *arity == 0 {
                        pool.nullary.len()
                    } else {
                        pool.unary.len()
                    };
                    choices = choices
                        .into_iter()
                        .flat_map(|m| {
                            (0..n).map(move |i| {
                                let mut m = m.clone();
                                m.insert(p.clone(), i);
                                m
                            })
                        })
                        .collect();
                }
                for choice in &choices {
                    let inst_phi = instantiate(phi, choice, &pool);
                    let v = forcing_value(&inst_phi, inst.goal.universe.as_ref(), c)
                        .map_err(|e| format!("{} [{}]: {e}", g.id, inst.label))?;
                    ensure(v == c.algebra.zero(), || {
                        format!(
                            "{} [{}] forced to {} under {choice:?}",
                            g.id,
                            inst.label,
                            c.algebra.name(v)
                        )
                    })?;
                    checks += 1;
                }
            }
        }
    }
    ensure(skipped == 0, || {
        format!("{skipped} instances have letters of arity above one")
    })?;
    Ok(format!(
        "{instances} instances, {checks} forcing checks over 1..3 atoms"
    ))
}

fn main() {
    let start = Instant::now();
    let report = verify_corpus(CORPUS, &Config::default());
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            println!("corpus: {e}");
            std::process::exit(1);
        }
    };
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(|| criterion_2(&report))),
        (3, Box::new(|| criterion_3(&report))),
        (4, Box::new(|| criterion_4(&report))),
        (5, Box::new(|| criterion_5(&report))),
        (6, Box::new(|| criterion_6(&report))),
        (7, Box::new(|| criterion_7(&report))),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
        (11, Box::new(|| criterion_11(&report))),
    ];
    let mut failed = 0;
    for (n, run) in &criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {:.2?})", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why})");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
