//! Generators and oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use classreal::algebra::{forcing_value, pole_decide, tau_process, tau_stack, tau_term};
use classreal::formulas::{Formula, NameExpr};
use classreal::kam::{reduce, step, Rule, Step};
use classreal::lambda_c::{ident, substitute, Process, Stack, Term};
use classreal::names::{mk_reish, Name, StackSpec};
use classreal::{BoolAlg, NameUniverse, TauContext};
use proptest::prelude::*;

pub fn ctx(atoms: usize) -> TauContext {
    TauContext::canonical(BoolAlg::powerset(atoms).unwrap())
}

/// Bottom names of `ctx`, one per element, in element order.
pub fn bottoms(ctx: &TauContext) -> Vec<String> {
    ctx.algebra
        .elements()
        .map(|e| ctx.algebra.name(e).to_string())
        .collect()
}

/// A term skeleton; variables are de Bruijn-style indices into the binders
/// in scope, resolved by [`TermShape::build`].
#[derive(Debug, Clone)]
pub enum TermShape {
    Var(u8),
    Cc,
    Opaque(u8),
    App(Box<TermShape>, Box<TermShape>),
    Abs(Box<TermShape>),
    Kont(Vec<TermShape>, u8),
}

impl TermShape {
    /// A closed term. With no binder in scope a variable becomes an opaque
    /// atom when `opaque` holds and `cc` otherwise; `Opaque` likewise.
    pub fn build(&self, bottoms: &[String], opaque: bool) -> Term {
        self.build_at(0, bottoms, opaque)
    }

    fn build_at(&self, depth: usize, bottoms: &[String], opaque: bool) -> Term {
        match self {
            TermShape::Var(i) if depth > 0 => {
                Term::var(&format!("x{}", depth - 1 - *i as usize % depth))
            }
            TermShape::Var(i) | TermShape::Opaque(i) => {
                if opaque {
                    Term::opaque(&format!("u{}", i % 4))
                } else {
                    Term::Cc
                }
            }
            TermShape::Cc => Term::Cc,
            TermShape::App(f, a) => Term::app(
                f.build_at(depth, bottoms, opaque),
                a.build_at(depth, bottoms, opaque),
            ),
            TermShape::Abs(b) => {
                Term::abs(&format!("x{depth}"), b.build_at(depth + 1, bottoms, opaque))
            }
            TermShape::Kont(ts, b) => Term::kont(build_stack(ts, *b, depth, bottoms, opaque)),
        }
    }
}

fn build_stack(ts: &[TermShape], b: u8, depth: usize, bottoms: &[String], opaque: bool) -> Stack {
    let ts: Vec<_> = ts
        .iter()
        .map(|t| t.build_at(depth, bottoms, opaque))
        .collect();
    Stack::from_terms(ts, Stack::bottom(&bottoms[b as usize % bottoms.len()]))
}

pub fn term_shape() -> impl Strategy<Value = TermShape> {
    let leaf = prop_oneof![
        3 => any::<u8>().prop_map(TermShape::Var),
        1 => Just(TermShape::Cc),
        1 => any::<u8>().prop_map(TermShape::Opaque),
        1 => any::<u8>().prop_map(|b| TermShape::Kont(vec![], b)),
    ];
    leaf.prop_recursive(5, 24, 3, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(f, a)| TermShape::App(Box::new(f), Box::new(a))),
            3 => inner.clone().prop_map(|b| TermShape::Abs(Box::new(b))),
            1 => (prop::collection::vec(inner, 0..3), any::<u8>()).prop_map(|(ts, b)| TermShape::Kont(ts, b)),
        ]
    })
}

/// A process skeleton: head, pushed terms and a bottom index.
#[derive(Debug, Clone)]
pub struct ProcessShape {
    pub head: TermShape,
    pub stack: Vec<TermShape>,
    pub bottom: u8,
}

impl ProcessShape {
    pub fn build(&self, bottoms: &[String], opaque: bool) -> Process {
        Process::new(
            self.head.build(bottoms, opaque),
            build_stack(&self.stack, self.bottom, 0, bottoms, opaque),
        )
    }
}

pub fn process_shape() -> impl Strategy<Value = ProcessShape> {
    (
        term_shape(),
        prop::collection::vec(term_shape(), 0..5),
        any::<u8>(),
    )
        .prop_map(|(head, stack, bottom)| ProcessShape {
            head,
            stack,
            bottom,
        })
}

/// A formula skeleton over a universe given by index; `Var(j)` names one of
/// the enclosing binders and falls back to a name when none is in scope.
#[derive(Debug, Clone)]
pub enum FormulaShape {
    Top,
    Bot,
    Atom(u8, Arg, Arg),
    Imp(Box<FormulaShape>, Box<FormulaShape>),
    All(Box<FormulaShape>),
    /// Bounded by the universe names selected by the mask.
    AllGimel(u8, Box<FormulaShape>),
}

#[derive(Debug, Clone, Copy)]
pub enum Arg {
    Name(u8),
    Var(u8),
}

impl FormulaShape {
    pub fn build(&self, names: &[Name]) -> Formula {
        self.build_at(0, names)
    }

    fn build_at(&self, depth: usize, names: &[Name]) -> Formula {
        let arg = |a: Arg| match a {
            Arg::Var(j) if depth > 0 => {
                NameExpr::var(&format!("x{}", depth - 1 - j as usize % depth))
            }
            Arg::Var(j) | Arg::Name(j) => NameExpr::Const(names[j as usize % names.len()].clone()),
        };
        match self {
            FormulaShape::Top => Formula::Top,
            FormulaShape::Bot => Formula::Bot,
            FormulaShape::Atom(k, a, b) => {
                let (a, b) = (arg(*a), arg(*b));
                match k % 4 {
                    0 => Formula::NotEps(a, b),
                    1 => Formula::Neq(a, b),
                    2 => Formula::NotIn(a, b),
                    _ => Formula::Sub(a, b),
                }
            }
            FormulaShape::Imp(p, q) => {
                Formula::imp(p.build_at(depth, names), q.build_at(depth, names))
            }
            FormulaShape::All(b) => {
                Formula::forall(&format!("x{depth}"), b.build_at(depth + 1, names))
            }
            FormulaShape::AllGimel(mask, b) => {
                let range = names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, n)| n.clone());
                Formula::ForallGimel(
                    ident(&format!("x{depth}")),
                    range.collect(),
                    Arc::new(b.build_at(depth + 1, names)),
                )
            }
        }
    }

    /// Connective depth: atoms, `⊤` and `⊥` are 0.
    pub fn depth(&self) -> usize {
        match self {
            FormulaShape::Top | FormulaShape::Bot | FormulaShape::Atom(..) => 0,
            FormulaShape::Imp(p, q) => 1 + p.depth().max(q.depth()),
            FormulaShape::All(b) | FormulaShape::AllGimel(_, b) => 1 + b.depth(),
        }
    }
}

fn arg() -> impl Strategy<Value = Arg> {
    prop_oneof![
        any::<u8>().prop_map(Arg::Name),
        any::<u8>().prop_map(Arg::Var)
    ]
}

/// Formulas of connective depth at most 3.
pub fn formula_shape() -> impl Strategy<Value = FormulaShape> {
    let leaf = prop_oneof![
        1 => Just(FormulaShape::Top),
        1 => Just(FormulaShape::Bot),
        6 => (any::<u8>(), arg(), arg()).prop_map(|(k, a, b)| FormulaShape::Atom(k, a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            2 => (inner.clone(), inner.clone()).prop_map(|(p, q)| FormulaShape::Imp(Box::new(p), Box::new(q))),
            1 => inner.clone().prop_map(|b| FormulaShape::All(Box::new(b))),
            1 => (any::<u8>(), inner).prop_map(|(m, b)| FormulaShape::AllGimel(m, Box::new(b))),
        ]
    })
}

/// Every formula of connective depth at most 1 over `n` names.
pub fn formulas_up_to_depth_one(n: u8) -> Vec<FormulaShape> {
    let mut atoms = Vec::new();
    for k in 0..4 {
        for a in 0..n {
            for b in 0..n {
                atoms.push(FormulaShape::Atom(k, Arg::Name(a), Arg::Name(b)));
            }
        }
    }
    let mut d0 = vec![FormulaShape::Top, FormulaShape::Bot];
    d0.extend(atoms);
    let mut open = Vec::new();
    for k in 0..4 {
        open.push(FormulaShape::Atom(k, Arg::Var(0), Arg::Var(0)));
        for a in 0..n {
            open.push(FormulaShape::Atom(k, Arg::Var(0), Arg::Name(a)));
            open.push(FormulaShape::Atom(k, Arg::Name(a), Arg::Var(0)));
        }
    }
    let mut out = d0.clone();
    for p in &d0 {
        for q in &d0 {
            out.push(FormulaShape::Imp(Box::new(p.clone()), Box::new(q.clone())));
        }
    }
    for body in open {
        out.push(FormulaShape::All(Box::new(body.clone())));
        for mask in 0..1u8 << n {
            out.push(FormulaShape::AllGimel(mask, Box::new(body.clone())));
        }
    }
    out
}

/// Dom-closed universes of at most four names whose stack sets mention the
/// bottoms of `ctx`, so that falsity values are not all zero or one.
pub fn universes(ctx: &TauContext) -> Vec<Vec<Name>> {
    let b = bottoms(ctx);
    let atom = |i: usize| b[(1usize << i).min(b.len() - 1)].clone();
    let k = |x: &str| Term::kont(Stack::bottom(x));
    let e = Name::empty();
    let c = Name::new([(e.clone(), StackSpec::prefix([k(&atom(0))]))]);
    let r1 = mk_reish(1);
    let d = Name::new([
        (c.clone(), StackSpec::AllStacks),
        (r1.clone(), StackSpec::prefix([k(&atom(1))])),
    ]);
    let f = Name::new([(
        e.clone(),
        StackSpec::Finite(vec![
            Arc::new(Stack::bottom(&atom(1))),
            Arc::new(Stack::from_terms(
                [k(&atom(0))],
                Stack::bottom(&b[b.len() - 1]),
            )),
        ]),
    )]);
    let g = Name::new([
        (f.clone(), StackSpec::prefix([k(&atom(0)), k(&atom(1))])),
        (e.clone(), StackSpec::AllStacks),
    ]);
    vec![
        vec![e.clone(), r1.clone(), mk_reish(2)],
        vec![e.clone(), c, r1, d],
        vec![e, f, g],
    ]
}

/// `F(φ)` by direct enumeration of `‖φ‖` as a set of concrete stacks.
///
/// Realizer candidates are one term `k_{ω_e}` per element `e`, so every
/// τ-class is tried. Stack tails range over the bottoms only: pushing a
/// term never raises τ, so bottoms carry every extremal value.
pub struct Oracle<'a> {
    ctx: &'a TauContext,
    universe: Vec<Name>,
    reps: Vec<Term>,
    pi: Vec<Stack>,
    memo: HashMap<Formula, Rc<BTreeSet<Stack>>>,
}

impl<'a> Oracle<'a> {
    pub fn new(ctx: &'a TauContext, universe: &[Name]) -> Oracle<'a> {
        let b = bottoms(ctx);
        Oracle {
            ctx,
            universe: universe.to_vec(),
            reps: b.iter().map(|x| Term::kont(Stack::bottom(x))).collect(),
            pi: b.iter().map(|x| Stack::bottom(x)).collect(),
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, phi: &Formula) -> usize {
        let alg = &self.ctx.algebra;
        let set = self.falsity(phi);
        set.iter()
            .map(|s| tau_stack(s, self.ctx).unwrap())
            .fold(alg.zero(), |a, v| alg.join(a, v))
    }

    /// `t ⊩ φ`: every process against `‖φ‖` is in the pole.
    pub fn realizes(&mut self, t: &Term, phi: &Formula) -> bool {
        let set = self.falsity(phi);
        set.iter().all(|s| {
            let p = Process::new(t.clone(), s.clone());
            tau_process(&p, self.ctx).unwrap() == self.ctx.algebra.zero()
        })
    }

    fn spec_stacks(&self, spec: &StackSpec) -> Vec<Stack> {
        match spec {
            StackSpec::AllStacks => self.pi.clone(),
            StackSpec::PrefixAll(ts) => self
                .pi
                .iter()
                .map(|p| Stack::from_terms(ts.iter().map(|t| (**t).clone()), p.clone()))
                .collect(),
            StackSpec::Finite(ss) => ss.iter().map(|s| (**s).clone()).collect(),
        }
    }

    /// Realizer candidates for `φ`.
    fn realizers(&mut self, phi: &Formula) -> Vec<Term> {
        self.reps
            .clone()
            .into_iter()
            .filter(|t| self.realizes(t, phi))
            .collect()
    }

    pub fn falsity(&mut self, phi: &Formula) -> Rc<BTreeSet<Stack>> {
        if let Some(s) = self.memo.get(phi) {
            return s.clone();
        }
        let name = |e: &NameExpr| e.eval().expect("closed name");
        let mut out = BTreeSet::new();
        match phi {
            Formula::Top => {}
            Formula::Bot => out.extend(self.pi.iter().cloned()),
            Formula::NotEps(a, b) => {
                let (a, b) = (name(a), name(b));
                for (c, spec) in b.entries() {
                    if *c == a {
                        out.extend(self.spec_stacks(spec));
                    }
                }
            }
            Formula::Neq(a, b) => {
                if name(a) == name(b) {
                    out.extend(self.pi.iter().cloned());
                }
            }
            Formula::NotIn(a, b) => {
                let (a, b) = (name(a), name(b));
                for (c, spec) in b.entries() {
                    let ts = self.realizers(&Formula::Sub(a.clone().into(), c.clone().into()));
                    let us = self.realizers(&Formula::Sub(c.clone().into(), a.clone().into()));
                    for s in self.spec_stacks(spec) {
                        for t in &ts {
                            for u in &us {
                                out.insert(Stack::from_terms([t.clone(), u.clone()], s.clone()));
                            }
                        }
                    }
                }
            }
            Formula::Sub(a, b) => {
                let (a, b) = (name(a), name(b));
                for (c, spec) in a.entries() {
                    let ts = self.realizers(&Formula::NotIn(c.clone().into(), b.clone().into()));
                    for s in self.spec_stacks(spec) {
                        for t in &ts {
                            out.insert(Stack::push(t.clone(), s.clone()));
                        }
                    }
                }
            }
            Formula::Imp(p, q) => {
                let ts = self.realizers(p);
                let qs = self.falsity(q);
                for s in qs.iter() {
                    for t in &ts {
                        out.insert(Stack::push(t.clone(), s.clone()));
                    }
                }
            }
            Formula::Forall(x, body) => {
                for a in self.universe.clone() {
                    out.extend(self.falsity(&body.subst_name(x, &a)).iter().cloned());
                }
            }
            Formula::ForallGimel(x, range, body) => {
                for a in range {
                    out.extend(self.falsity(&body.subst_name(x, a)).iter().cloned());
                }
            }
            other => panic!("the oracle does not cover {other:?}"),
        }
        let out = Rc::new(out);
        self.memo.insert(phi.clone(), out.clone());
        out
    }
}

/// The transition `p` must take, read off the shape of its head.
pub fn expected_step(p: &Process) -> Option<(Process, Rule)> {
    let pop = |s: &Stack| match s {
        Stack::Push(t, rest) => Some(((**t).clone(), (**rest).clone())),
        _ => None,
    };
    match &*p.head {
        Term::App(f, a) => Some((
            Process::new(
                (**f).clone(),
                Stack::push((**a).clone(), (*p.stack).clone()),
            ),
            Rule::Push,
        )),
        Term::Abs(x, body) => {
            let (s, rest) = pop(&p.stack)?;
            Some((Process::new(substitute(body, x, &s), rest), Rule::Grab))
        }
        Term::Cc => {
            let (t, rest) = pop(&p.stack)?;
            Some((
                Process::new(t, Stack::push(Term::kont(rest.clone()), rest)),
                Rule::Save,
            ))
        }
        Term::Kont(sigma) => {
            let (t, _) = pop(&p.stack)?;
            Some((Process::new(t, (**sigma).clone()), Rule::Restore))
        }
        _ => None,
    }
}

pub fn check_step(shape: &ProcessShape) -> Result<(), TestCaseError> {
    let p = shape.build(&bottoms(&ctx(2)), true);
    match (step(&p), expected_step(&p)) {
        (Step::Next(q, r), Some((q2, r2))) => {
            prop_assert_eq!(q, q2);
            prop_assert_eq!(r, r2);
        }
        (Step::Stuck, None) => {}
        (got, want) => prop_assert!(false, "step {:?}, expected {:?}", got, want),
    }
    Ok(())
}

pub fn check_reduce(shape: &ProcessShape, fuel: u64) -> Result<(), TestCaseError> {
    let p = shape.build(&bottoms(&ctx(2)), true);
    let a = reduce(&p, fuel);
    prop_assert_eq!(&a, &reduce(&p, fuel));
    let b = reduce(&p, fuel + 1);
    prop_assert!(b.steps.starts_with(&a.steps));
    prop_assert!(b.rules.starts_with(&a.rules));
    prop_assert_eq!(&a.steps[0], &p);
    for (i, r) in a.rules.iter().enumerate() {
        prop_assert_eq!(
            step(&a.steps[i]),
            Step::Next(a.steps[i + 1].clone(), r.clone())
        );
    }
    Ok(())
}

pub fn check_tau(
    head: &TermShape,
    stack: &[TermShape],
    b: u8,
    atoms: usize,
) -> Result<(), TestCaseError> {
    let c = ctx(atoms);
    let names = bottoms(&c);
    let alg = &c.algebra;
    let t = head.build(&names, false);
    let tau = |t: &Term| tau_term(t, &c).unwrap();
    let v = tau(&t);
    match &t {
        Term::Var(_) | Term::Cc => prop_assert_eq!(v, alg.one()),
        Term::App(f, a) => prop_assert_eq!(v, alg.meet(tau(f), tau(a))),
        Term::Abs(_, body) => prop_assert_eq!(v, tau(body)),
        Term::Kont(s) => prop_assert_eq!(v, tau_stack(s, &c).unwrap()),
        _ => prop_assert!(false, "unexpected head {:?}", t),
    }
    let bottom = &names[b as usize % names.len()];
    let s = Stack::from_terms(
        stack.iter().map(|x| x.build(&names, false)),
        Stack::bottom(bottom),
    );
    let expect = s
        .terms()
        .fold(c.bottoms[bottom.as_str()], |acc, x| alg.meet(acc, tau(x)));
    prop_assert_eq!(tau_stack(&s, &c).unwrap(), expect);
    let p = Process::new(t, s.clone());
    prop_assert_eq!(tau_process(&p, &c).unwrap(), alg.meet(v, expect));
    Ok(())
}

pub fn check_pole(shape: &ProcessShape, atoms: usize) -> Result<(), TestCaseError> {
    let c = ctx(atoms);
    let p = shape.build(&bottoms(&c), false);
    let trace = reduce(&p, 20);
    for w in trace.steps.windows(2) {
        let (a, b) = (
            tau_process(&w[0], &c).unwrap(),
            tau_process(&w[1], &c).unwrap(),
        );
        prop_assert!(c.algebra.le(a, b));
        if pole_decide(&w[1], &c).unwrap().in_pole {
            prop_assert!(pole_decide(&w[0], &c).unwrap().in_pole);
        }
    }
    Ok(())
}

/// `forcing_value` against [`Oracle`] for one formula.
pub fn check_forcing(shape: &FormulaShape, atoms: usize, u: usize) -> Result<(), TestCaseError> {
    let c = ctx(atoms);
    let names = &universes(&c)[u];
    let universe = NameUniverse::closure(names.iter().cloned());
    let phi = shape.build(names);
    let mut oracle = Oracle::new(&c, names);
    prop_assert_eq!(
        forcing_value(&phi, Some(&universe), &c).unwrap(),
        oracle.value(&phi),
        "{:?}",
        phi
    );
    Ok(())
}
