//! Proof search. Every rule is syntax-directed except the choice of entry
//! in an existential falsity value, which is tried in order.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::display::printer;
use super::{
    Claim, Config, Goal, Hypothesis, Lemma, ProofNode, ProofRule, ProofTrace, Rejection, Verdict,
    VerifierError,
};
use crate::formulas::{falsity_shape, Formula, NameExpr, Shape};
use crate::kam::{reduce, Status};
use crate::lambda_c::{alpha_eq, ident, is_realizer, Ident, Process, Stack, Term};
use crate::names::{mk_reish, FalsityDescriptor, Name, NameUniverse, StackSpec};

enum Fail {
    Reject(Rejection),
    Fuel,
}

type R = Result<ProofNode, Fail>;

fn reject(reason: impl Into<String>) -> Fail {
    Fail::Reject(Rejection {
        reason: reason.into(),
        at: None,
    })
}

fn stuck(reason: &str, q: &Process) -> Fail {
    Fail::Reject(Rejection {
        reason: reason.into(),
        at: Some(printer().process(q)),
    })
}

/// Records `q` as the location of a failure that has none yet.
fn located(f: Fail, q: &Process) -> Fail {
    match f {
        Fail::Reject(mut r) if r.at.is_none() => {
            r.at = Some(printer().process(q));
            Fail::Reject(r)
        }
        other => other,
    }
}

/// `Ok(None)` for a rejected alternative; fuel exhaustion propagates.
fn attempt(r: R) -> Result<Option<ProofNode>, Fail> {
    match r {
        Ok(n) => Ok(Some(n)),
        Err(Fail::Reject(_)) => Ok(None),
        Err(Fail::Fuel) => Err(Fail::Fuel),
    }
}

#[derive(Clone)]
enum NewHyp {
    Realizer(Ident, Formula),
    Tail(Ident, Formula),
}

#[derive(Clone, Default)]
struct Ctx {
    realizers: Vec<(Ident, Formula)>,
    tails: Vec<(Ident, Formula)>,
    /// Induction hypotheses, by formula.
    facts: Arc<HashMap<Formula, Vec<Term>>>,
    /// Closed terms whose realizability is being proved on this branch.
    active: Vec<Term>,
    depth: usize,
}

impl Ctx {
    fn realizer(&self, u: &str) -> Option<&Formula> {
        self.realizers
            .iter()
            .rev()
            .find(|(x, _)| &**x == u)
            .map(|(_, f)| f)
    }

    fn tail(&self, r: &str) -> Option<&Formula> {
        self.tails
            .iter()
            .rev()
            .find(|(x, _)| &**x == r)
            .map(|(_, f)| f)
    }

    fn extend(&self, hyps: &[NewHyp]) -> Ctx {
        let mut c = self.clone();
        for h in hyps {
            match h {
                NewHyp::Realizer(u, f) => c.realizers.push((u.clone(), f.clone())),
                NewHyp::Tail(r, f) => c.tails.push((r.clone(), f.clone())),
            }
        }
        c
    }
}

/// The generic elements of a falsity value: a tree of case distinctions
/// whose leaves are stacks built from fresh opaque atoms and tails.
enum Decomp {
    Split {
        rule: ProofRule,
        note: String,
        cases: Vec<Decomp>,
    },
    Case {
        hyps: Vec<NewHyp>,
        stack: Arc<Stack>,
    },
}

type Cont<'k, 'a> = dyn FnMut(&mut Engine<'a>, &Ctx, Arc<Stack>) -> R + 'k;

struct Engine<'a> {
    config: &'a Config,
    universe: Option<&'a NameUniverse>,
    lemmas: &'a [Lemma],
    used: BTreeSet<Ident>,
    counter: usize,
    steps: u64,
}

fn const_atom(mk: fn(NameExpr, NameExpr) -> Formula, a: &Name, b: &Name) -> Formula {
    mk(NameExpr::Const(a.clone()), NameExpr::Const(b.clone()))
}

impl<'a> Engine<'a> {
    fn fresh(&mut self, base: &str) -> Ident {
        loop {
            self.counter += 1;
            let id = ident(&format!("{base}{}", self.counter));
            if self.used.insert(id.clone()) {
                return id;
            }
        }
    }

    fn shape(&self, phi: &Formula) -> Result<Shape, Fail> {
        falsity_shape(phi, self.universe).map_err(|e| reject(e.to_string()))
    }

    fn tail_case(&mut self, f: Formula, prefix: &[Arc<Term>], hyps: &[NewHyp]) -> Decomp {
        let r = self.fresh("r");
        let mut hyps = hyps.to_vec();
        hyps.push(NewHyp::Tail(r.clone(), f));
        Decomp::Case {
            hyps,
            stack: Stack::prepend(prefix, Arc::new(Stack::OpaqueTail(r))),
        }
    }

    fn spec_cases(&mut self, spec: &StackSpec, prefix: &[Arc<Term>], hyps: &[NewHyp]) -> Decomp {
        match spec {
            StackSpec::AllStacks => self.tail_case(Formula::Bot, prefix, hyps),
            StackSpec::PrefixAll(ts) => {
                let p: Vec<_> = prefix.iter().chain(ts).cloned().collect();
                self.tail_case(Formula::Bot, &p, hyps)
            }
            StackSpec::Finite(ss) => Decomp::Split {
                rule: ProofRule::CaseSplit,
                note: format!("{} stacks", ss.len()),
                cases: ss
                    .iter()
                    .map(|s| Decomp::Case {
                        hyps: hyps.to_vec(),
                        stack: Stack::prepend(prefix, s.clone()),
                    })
                    .collect(),
            },
        }
    }

    fn decompose(
        &mut self,
        phi: &Formula,
        prefix: &[Arc<Term>],
        hyps: &[NewHyp],
    ) -> Result<Decomp, Fail> {
        let with_atom = |prefix: &[Arc<Term>], atoms: &[Ident]| -> Vec<Arc<Term>> {
            let mut p = prefix.to_vec();
            p.extend(atoms.iter().map(|u| Arc::new(Term::Opaque(u.clone()))));
            p
        };
        Ok(match self.shape(phi)? {
            Shape::Empty => Decomp::Split {
                rule: ProofRule::Falsity,
                note: format!("‖{phi}‖ is empty"),
                cases: Vec::new(),
            },
            Shape::All => self.tail_case(Formula::Bot, prefix, hyps),
            Shape::Meta(..) => self.tail_case(phi.clone(), prefix, hyps),
            Shape::Imp { realizer, tail } => {
                let u = self.fresh("u");
                let note = format!("{u} ⊩ {realizer}");
                let mut h = hyps.to_vec();
                h.push(NewHyp::Realizer(u.clone(), realizer));
                Decomp::Split {
                    rule: ProofRule::ImpIntro,
                    note,
                    cases: vec![self.decompose(&tail, &with_atom(prefix, &[u]), &h)?],
                }
            }
            Shape::Family(v) => Decomp::Split {
                rule: ProofRule::ForallIntro,
                note: format!("{} instances", v.len()),
                cases: v
                    .iter()
                    .map(|(_, f)| self.decompose(f, prefix, hyps))
                    .collect::<Result<_, _>>()?,
            },
            Shape::HatFamily(v) => Decomp::Split {
                rule: ProofRule::ForallIntro,
                note: format!("{} instances", v.len()),
                cases: v
                    .iter()
                    .map(|(b, f)| {
                        let mut p = prefix.to_vec();
                        p.push(Arc::new(Term::EnumLit(*b)));
                        self.decompose(f, &p, hyps)
                    })
                    .collect::<Result<_, _>>()?,
            },
            Shape::Atom {
                a, b, descriptor, ..
            } => {
                let note = format!("‖{phi}‖");
                let cases = match descriptor {
                    FalsityDescriptor::Stacks(specs) => specs
                        .iter()
                        .map(|s| self.spec_cases(s, prefix, hyps))
                        .collect(),
                    FalsityDescriptor::NotIn(entries) => entries
                        .iter()
                        .map(|(c, s)| {
                            let (u1, u2) = (self.fresh("u"), self.fresh("u"));
                            let mut h = hyps.to_vec();
                            h.push(NewHyp::Realizer(
                                u1.clone(),
                                const_atom(Formula::Sub, &a, c),
                            ));
                            h.push(NewHyp::Realizer(
                                u2.clone(),
                                const_atom(Formula::Sub, c, &a),
                            ));
                            self.spec_cases(s, &with_atom(prefix, &[u1, u2]), &h)
                        })
                        .collect(),
                    FalsityDescriptor::Sub(entries) => entries
                        .iter()
                        .map(|(c, s)| {
                            let u = self.fresh("u");
                            let mut h = hyps.to_vec();
                            h.push(NewHyp::Realizer(
                                u.clone(),
                                const_atom(Formula::NotIn, c, &b),
                            ));
                            self.spec_cases(s, &with_atom(prefix, &[u]), &h)
                        })
                        .collect(),
                };
                Decomp::Split {
                    rule: ProofRule::Falsity,
                    note,
                    cases,
                }
            }
        })
    }

    fn discharge(&mut self, ctx: &Ctx, d: &Decomp, k: &mut Cont<'_, 'a>) -> R {
        match d {
            Decomp::Split { rule, note, cases } => {
                let mut children = Vec::with_capacity(cases.len());
                for c in cases {
                    children.push(self.discharge(ctx, c, k)?);
                }
                Ok(ProofNode::with(*rule, note.clone(), children))
            }
            Decomp::Case { hyps, stack } => k(self, &ctx.extend(hyps), stack.clone()),
        }
    }

    fn lemma_for(&self, t: &Term, phi: &Formula) -> Option<&'a Lemma> {
        self.lemmas.iter().find(|l| {
            alpha_eq(&l.term, t) && covers(&l.formula, phi, l.universe.as_ref().or(self.universe))
        })
    }

    /// `t ⊩ φ`.
    fn realize(&mut self, ctx: &Ctx, t: &Term, phi: &Formula) -> R {
        let note = || format!("{} ⊩ {phi}", printer().term(t));
        if let Term::Opaque(u) = t {
            if ctx.realizer(u) == Some(phi) {
                return Ok(ProofNode::leaf(ProofRule::Hyp, note()));
            }
        }
        if ctx
            .facts
            .get(phi)
            .is_some_and(|ts| ts.iter().any(|f| alpha_eq(f, t)))
        {
            return Ok(ProofNode::leaf(
                ProofRule::Lemma,
                format!("{} by induction", note()),
            ));
        }
        if let Some(l) = self.lemma_for(t, phi) {
            return Ok(ProofNode::leaf(
                ProofRule::Lemma,
                format!("{} by {}", note(), l.id),
            ));
        }
        if let (Term::Kont(s), Formula::Imp(psi, _)) = (t, phi) {
            if let Some(n) = attempt(self.falsity(ctx, s, psi))? {
                return Ok(ProofNode::with(ProofRule::Kpi, note(), vec![n]));
            }
        }
        if let Some(x) = t.free_vars().into_iter().next() {
            return Err(reject(format!(
                "free variable `{x}` in `{}`",
                printer().term(t)
            )));
        }
        let closed = is_realizer(t);
        if closed && ctx.active.iter().any(|a| alpha_eq(a, t)) {
            return Err(reject(format!("`{}` needs itself", note())));
        }
        if ctx.depth >= self.config.max_depth {
            return Err(reject(format!(
                "nesting bound reached proving `{}`",
                note()
            )));
        }
        let mut inner = ctx.clone();
        inner.depth += 1;
        if closed {
            inner.active.push(t.clone());
        }
        let d = self.decompose(phi, &[], &[])?;
        let head = Arc::new(t.clone());
        let mut body = self.discharge(&inner, &d, &mut |eng, c, s| {
            eng.in_pole(
                c,
                &Process {
                    head: head.clone(),
                    stack: s,
                },
            )
        })?;
        body.note = if body.rule == ProofRule::AntiEval {
            format!("{}: {}", note(), body.note)
        } else {
            format!("{}; {}", note(), body.note)
        };
        Ok(body)
    }

    /// `p ∈ ⊥⊥`.
    fn in_pole(&mut self, ctx: &Ctx, p: &Process) -> R {
        let trace = reduce(p, self.config.fuel);
        self.steps += trace.rules.len() as u64;
        if trace.status == Status::OutOfFuel || self.steps > self.config.budget {
            return Err(Fail::Fuel);
        }
        let q = trace.last().clone();
        let child = match &*q.head {
            Term::Opaque(u) => {
                let Some(psi) = ctx.realizer(u).cloned() else {
                    return Err(stuck(&format!("nothing is known about `{u}`"), &q));
                };
                let n = self
                    .falsity(ctx, &q.stack, &psi)
                    .map_err(|e| located(e, &q))?;
                ProofNode::with(ProofRule::HypMatch, format!("{u} ⊩ {psi}"), vec![n])
            }
            Term::Abs(..) | Term::Cc | Term::Kont(_) => {
                let Stack::OpaqueTail(r) = &*q.stack else {
                    return Err(stuck("reduction ended without reaching an opaque head", &q));
                };
                let theta = match ctx.tail(r) {
                    Some(th) if self.unfoldable(th) => th.clone(),
                    _ => return Err(stuck("stuck on an opaque stack", &q)),
                };
                let d = self.decompose(&theta, &[], &[])?;
                let head = q.head.clone();
                let n = self.discharge(ctx, &d, &mut |eng, c, s| {
                    eng.in_pole(
                        c,
                        &Process {
                            head: head.clone(),
                            stack: s,
                        },
                    )
                })?;
                ProofNode::with(ProofRule::Falsity, format!("?{r} ∈ ‖{theta}‖"), vec![n])
            }
            _ => return Err(stuck("reduction ended without reaching an opaque head", &q)),
        };
        Ok(ProofNode {
            rule: ProofRule::AntiEval,
            note: printer().process(p),
            children: vec![child],
            machine: Some(trace),
        })
    }

    fn unfoldable(&self, theta: &Formula) -> bool {
        !matches!(
            falsity_shape(theta, self.universe),
            Ok(Shape::All | Shape::Meta(..)) | Err(_)
        )
    }

    /// `s ∈ ‖φ‖`.
    fn falsity(&mut self, ctx: &Ctx, s: &Arc<Stack>, phi: &Formula) -> R {
        let note = || format!("{} ∈ ‖{phi}‖", printer().stack(s));
        if let Stack::OpaqueTail(r) = &**s {
            if ctx.tail(r) == Some(phi) {
                return Ok(ProofNode::leaf(ProofRule::Hyp, note()));
            }
        }
        let missing = || reject(format!("`{}` is not in ‖{phi}‖", printer().stack(s)));
        match self.shape(phi)? {
            Shape::Empty => Err(missing()),
            Shape::All => Ok(ProofNode::leaf(ProofRule::Falsity, note())),
            Shape::Meta(..) => Err(missing()),
            Shape::Imp { realizer, tail } => {
                let (t, rest) = s.pop().ok_or_else(missing)?;
                let a = self.realize(ctx, t, &realizer)?;
                let b = self.falsity(ctx, rest, &tail)?;
                Ok(ProofNode::with(ProofRule::Falsity, note(), vec![a, b]))
            }
            Shape::Family(v) => {
                for (_, f) in &v {
                    if let Some(n) = attempt(self.falsity(ctx, s, f))? {
                        return Ok(ProofNode::with(ProofRule::Falsity, note(), vec![n]));
                    }
                }
                Err(missing())
            }
            Shape::HatFamily(v) => {
                let (t, rest) = s.pop().ok_or_else(missing)?;
                let Term::EnumLit(b) = &**t else {
                    return Err(missing());
                };
                let (_, f) = v.iter().find(|(c, _)| c == b).ok_or_else(missing)?;
                let n = self.falsity(ctx, rest, f)?;
                Ok(ProofNode::with(ProofRule::Falsity, note(), vec![n]))
            }
            Shape::Atom {
                a, b, descriptor, ..
            } => match descriptor {
                FalsityDescriptor::Stacks(specs) => {
                    if specs.iter().any(|sp| sp.contains(s)) {
                        Ok(ProofNode::leaf(ProofRule::Falsity, note()))
                    } else {
                        Err(missing())
                    }
                }
                FalsityDescriptor::NotIn(entries) => {
                    let (s1, r1) = s.pop().ok_or_else(missing)?;
                    let (s2, rest) = r1.pop().ok_or_else(missing)?;
                    for (c, sp) in &entries {
                        if !sp.contains(rest) {
                            continue;
                        }
                        let Some(n1) =
                            attempt(self.realize(ctx, s1, &const_atom(Formula::Sub, &a, c)))?
                        else {
                            continue;
                        };
                        let Some(n2) =
                            attempt(self.realize(ctx, s2, &const_atom(Formula::Sub, c, &a)))?
                        else {
                            continue;
                        };
                        return Ok(ProofNode::with(ProofRule::Falsity, note(), vec![n1, n2]));
                    }
                    Err(missing())
                }
                FalsityDescriptor::Sub(entries) => {
                    let (t, rest) = s.pop().ok_or_else(missing)?;
                    for (c, sp) in &entries {
                        if !sp.contains(rest) {
                            continue;
                        }
                        if let Some(n) =
                            attempt(self.realize(ctx, t, &const_atom(Formula::NotIn, c, &b)))?
                        {
                            return Ok(ProofNode::with(ProofRule::Falsity, note(), vec![n]));
                        }
                    }
                    Err(missing())
                }
            },
        }
    }

    /// `t ⊩ ∀x φ` instance by instance in rank order, each instance may use
    /// the instances of strictly smaller rank.
    fn rank_induction(&mut self, ctx: &Ctx, t: &Term, phi: &Formula) -> R {
        let Shape::Family(mut instances) = self.shape(phi)? else {
            return self.realize(ctx, t, phi);
        };
        instances.sort_by_key(|(a, _)| a.rank());
        let mut facts: HashMap<Formula, Vec<Term>> = HashMap::new();
        let mut shared = Arc::new(facts.clone());
        let mut pending: Vec<Formula> = Vec::new();
        let mut rank = None;
        let mut children = Vec::with_capacity(instances.len());
        for (a, f) in instances {
            if rank != Some(a.rank()) {
                for g in pending.drain(..) {
                    facts.entry(g).or_default().push(t.clone());
                }
                shared = Arc::new(facts.clone());
                rank = Some(a.rank());
            }
            let mut c = ctx.clone();
            c.facts = shared.clone();
            children.push(self.realize(&c, t, &f)?);
            pending.push(f);
        }
        Ok(ProofNode::with(
            ProofRule::RankInd,
            format!("{} ⊩ {phi} by rank", printer().term(t)),
            children,
        ))
    }
}

/// `general` is `target` or has `target` as an instance, with the
/// instantiated names inside the quantifier ranges.
fn covers(general: &Formula, target: &Formula, universe: Option<&NameUniverse>) -> bool {
    if general == target {
        return true;
    }
    let (x, body): (&Ident, &Formula) = match general {
        Formula::Forall(x, b)
        | Formula::ForallGimel(x, _, b)
        | Formula::ForallReishOrd(x, _, b) => (x, b),
        _ => return false,
    };
    let in_range = |a: &Name| match general {
        Formula::Forall(..) => universe.is_some_and(|u| u.contains(a)),
        Formula::ForallGimel(_, s, _) => s.contains(a),
        Formula::ForallReishOrd(_, n, _) => (0..*n).any(|m| mk_reish(m) == *a),
        _ => false,
    };
    let mut cands = BTreeSet::new();
    bindings(body, target, x, &mut cands);
    cands
        .iter()
        .any(|a| in_range(a) && covers(&body.subst_name(x, a), target, universe))
}

/// Names sitting opposite a free occurrence of `x` in `pat`.
fn bindings(pat: &Formula, tgt: &Formula, x: &Ident, out: &mut BTreeSet<Name>) {
    use Formula as F;
    match (pat, tgt) {
        (F::Imp(a, b), F::Imp(c, d)) => {
            bindings(a, c, x, out);
            bindings(b, d, x, out);
        }
        (F::Forall(y, b), F::Forall(z, d))
        | (F::ForallGimel(y, _, b), F::ForallGimel(z, _, d))
        | (F::ForallReishOrd(y, _, b), F::ForallReishOrd(z, _, d))
        | (F::ForallHat(y, _, b), F::ForallHat(z, _, d))
            if y == z =>
        {
            if y != x {
                bindings(b, d, x, out);
            }
        }
        (F::Forall(y, b), _)
        | (F::ForallGimel(y, _, b), _)
        | (F::ForallReishOrd(y, _, b), _)
        | (F::ForallHat(y, _, b), _) => {
            if y != x {
                bindings(b, tgt, x, out);
            }
        }
        (F::Meta(p, xs), F::Meta(q, ys)) if p == q && xs.len() == ys.len() => {
            for (e, f) in xs.iter().zip(ys) {
                expr_bindings(e, f, x, out);
            }
        }
        _ => {
            if let (Some((k1, a1, b1)), Some((k2, a2, b2))) = (pat.as_atom(), tgt.as_atom()) {
                if k1 == k2 {
                    expr_bindings(a1, a2, x, out);
                    expr_bindings(b1, b2, x, out);
                }
            }
        }
    }
}

fn expr_bindings(p: &NameExpr, t: &NameExpr, x: &Ident, out: &mut BTreeSet<Name>) {
    match (p, t) {
        (NameExpr::Var(v), NameExpr::Const(n)) if v == x => {
            out.insert(n.clone());
        }
        (NameExpr::Sng(a), NameExpr::Sng(b)) => expr_bindings(a, b, x, out),
        (NameExpr::Up(a, b), NameExpr::Up(c, d)) | (NameExpr::Op(a, b), NameExpr::Op(c, d)) => {
            expr_bindings(a, c, x, out);
            expr_bindings(b, d, x, out);
        }
        (NameExpr::Apply(f, a), NameExpr::Apply(g, b)) if f == g => expr_bindings(a, b, x, out),
        _ => {}
    }
}

fn opaque_ids_term(t: &Term, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Opaque(u) => {
            out.insert(u.clone());
        }
        Term::App(f, a) => {
            opaque_ids_term(f, out);
            opaque_ids_term(a, out);
        }
        Term::Abs(x, b) => {
            out.insert(x.clone());
            opaque_ids_term(b, out);
        }
        Term::Kont(s) => opaque_ids_stack(s, out),
        Term::Var(_) | Term::Cc | Term::Instr(_) | Term::EnumLit(_) => {}
    }
}

fn opaque_ids_stack(s: &Stack, out: &mut BTreeSet<Ident>) {
    match s {
        Stack::Push(t, rest) => {
            opaque_ids_term(t, out);
            opaque_ids_stack(rest, out);
        }
        Stack::OpaqueTail(r) => {
            out.insert(r.clone());
        }
        Stack::Bottom(_) => {}
    }
}

fn check_closed(phi: &Formula) -> Result<(), VerifierError> {
    match phi.free_vars().into_iter().next() {
        Some(x) => Err(VerifierError::Malformed(format!(
            "formula `{phi}` has free variable `{x}`"
        ))),
        None => Ok(()),
    }
}

pub(super) fn prove(goal: &Goal, config: &Config) -> Result<Verdict, VerifierError> {
    let mut ctx = Ctx::default();
    let mut lemmas = Vec::new();
    let mut used = BTreeSet::new();
    for h in &goal.context {
        match h {
            Hypothesis::Realizer { atom: id, formula }
            | Hypothesis::Falsity { tail: id, formula } => {
                if !used.insert(id.clone()) {
                    return Err(VerifierError::DuplicateOpaque(id.clone()));
                }
                check_closed(formula)?;
                if matches!(h, Hypothesis::Realizer { .. }) {
                    ctx.realizers.push((id.clone(), formula.clone()));
                } else {
                    ctx.tails.push((id.clone(), formula.clone()));
                }
            }
            Hypothesis::Lemma(l) => {
                if !is_realizer(&l.term) {
                    return Err(VerifierError::Malformed(format!(
                        "lemma `{}` is not a closed realizer",
                        l.id
                    )));
                }
                check_closed(&l.formula)?;
                lemmas.push(l.clone());
            }
        }
    }
    match &goal.claim {
        Claim::Realizes(t, phi) => {
            if let Some(x) = t.free_vars().into_iter().next() {
                return Err(VerifierError::FreeVariable(x));
            }
            check_closed(phi)?;
            opaque_ids_term(t, &mut used);
        }
        Claim::InPole(p) => {
            opaque_ids_term(&p.head, &mut used);
            opaque_ids_stack(&p.stack, &mut used);
        }
        Claim::InFalsity(s, phi) => {
            check_closed(phi)?;
            opaque_ids_stack(s, &mut used);
        }
    }
    let mut eng = Engine {
        config,
        universe: goal.universe.as_ref(),
        lemmas: &lemmas,
        used,
        counter: 0,
        steps: 0,
    };
    let result = match &goal.claim {
        Claim::Realizes(t, phi) if goal.induction => eng.rank_induction(&ctx, t, phi),
        Claim::Realizes(t, phi) => eng.realize(&ctx, t, phi),
        Claim::InPole(p) => eng.in_pole(&ctx, p),
        Claim::InFalsity(s, phi) => eng.falsity(&ctx, &Arc::new(s.clone()), phi),
    };
    Ok(match result {
        Ok(root) => Verdict::Accepted(ProofTrace {
            root,
            steps: eng.steps,
        }),
        Err(Fail::Reject(r)) => Verdict::Rejected(r),
        Err(Fail::Fuel) => Verdict::OutOfFuel { steps: eng.steps },
    })
}
