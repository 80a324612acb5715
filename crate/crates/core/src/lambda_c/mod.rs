//! λc-terms, stacks and processes.
//!
//! Terms are immutable trees with `Arc` sharing. Structural equality (`==`)
//! compares bound names literally; use [`alpha_eq`] for equality up to
//! renaming.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse_process, parse_stack, parse_term, ParseError};
pub use print::{Abbreviations, Printer};

/// Interned identifier.
pub type Ident = Arc<str>;

pub fn ident(s: &str) -> Ident {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Ident),
    App(Arc<Term>, Arc<Term>),
    Abs(Ident, Arc<Term>),
    /// call-with-current-continuation.
    Cc,
    /// Continuation constant `k_π`.
    Kont(Arc<Stack>),
    /// Special instruction, written `#name`.
    Instr(Ident),
    /// Enumeration literal `ν_n`.
    EnumLit(u32),
    /// Unknown closed term; only meaningful inside the verifier.
    Opaque(Ident),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stack {
    /// Stack bottom `ω_b`; the ident excludes the `w_` prefix.
    Bottom(Ident),
    Push(Arc<Term>, Arc<Stack>),
    /// Unknown stack; only meaningful inside the verifier.
    OpaqueTail(Ident),
}

/// A machine state `head ⋆ stack`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Process {
    pub head: Arc<Term>,
    pub stack: Arc<Stack>,
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(ident(x))
    }

    pub fn opaque(x: &str) -> Term {
        Term::Opaque(ident(x))
    }

    pub fn instr(x: &str) -> Term {
        Term::Instr(ident(x))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// Left-nested application `f a₁ … aₙ`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(ident(x), Arc::new(body))
    }

    /// `λx₁.…λxₙ.body`.
    pub fn abss(xs: &[&str], body: Term) -> Term {
        xs.iter().rev().fold(body, |b, x| Term::abs(x, b))
    }

    pub fn kont(s: Stack) -> Term {
        Term::Kont(Arc::new(s))
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// True iff a `Kont` occurs anywhere, including inside nested stacks.
    pub fn has_kont(&self) -> bool {
        match self {
            Term::Kont(_) => true,
            Term::App(f, a) => f.has_kont() || a.has_kont(),
            Term::Abs(_, b) => b.has_kont(),
            _ => false,
        }
    }

    /// True iff an `Opaque` atom or `OpaqueTail` occurs anywhere.
    pub fn has_opaque(&self) -> bool {
        match self {
            Term::Opaque(_) => true,
            Term::App(f, a) => f.has_opaque() || a.has_opaque(),
            Term::Abs(_, b) => b.has_opaque(),
            Term::Kont(s) => s.has_opaque(),
            _ => false,
        }
    }

    pub fn has_enum_lit(&self) -> bool {
        match self {
            Term::EnumLit(_) => true,
            Term::App(f, a) => f.has_enum_lit() || a.has_enum_lit(),
            Term::Abs(_, b) => b.has_enum_lit(),
            Term::Kont(s) => s.terms().any(|t| t.has_enum_lit()),
            _ => false,
        }
    }

    /// Node count, counting stacks inside continuations.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Abs(_, b) => 1 + b.size(),
            Term::Kont(s) => 1 + s.size(),
            _ => 1,
        }
    }

    /// Replaces every free variable by an opaque atom of the same name.
    pub fn opaquify(&self) -> Term {
        opaquify_term(self, &mut Vec::new())
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Abs(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::Kont(s) => {
            for t in s.terms() {
                collect_free(t, bound, out);
            }
        }
        _ => {}
    }
}

fn opaquify_term(t: &Term, bound: &mut Vec<Ident>) -> Term {
    match t {
        Term::Var(x) if !bound.contains(x) => Term::Opaque(x.clone()),
        Term::App(f, a) => Term::App(
            Arc::new(opaquify_term(f, bound)),
            Arc::new(opaquify_term(a, bound)),
        ),
        Term::Abs(x, b) => {
            bound.push(x.clone());
            let nb = opaquify_term(b, bound);
            bound.pop();
            Term::Abs(x.clone(), Arc::new(nb))
        }
        Term::Kont(s) => Term::Kont(Arc::new(s.map_terms(&mut |t| opaquify_term(t, bound)))),
        other => other.clone(),
    }
}

impl Stack {
    pub fn bottom(b: &str) -> Stack {
        Stack::Bottom(ident(b))
    }

    pub fn opaque(r: &str) -> Stack {
        Stack::OpaqueTail(ident(r))
    }

    pub fn push(t: Term, s: Stack) -> Stack {
        Stack::Push(Arc::new(t), Arc::new(s))
    }

    /// `t₁·…·tₙ·tail`.
    pub fn from_terms(ts: impl IntoIterator<Item = Term>, tail: Stack) -> Stack {
        let ts: Vec<Term> = ts.into_iter().collect();
        ts.into_iter().rev().fold(tail, |s, t| Stack::push(t, s))
    }

    /// Prepends shared terms onto a shared tail.
    pub fn prepend(ts: &[Arc<Term>], tail: Arc<Stack>) -> Arc<Stack> {
        ts.iter()
            .rev()
            .fold(tail, |s, t| Arc::new(Stack::Push(t.clone(), s)))
    }

    pub fn pop(&self) -> Option<(&Arc<Term>, &Arc<Stack>)> {
        match self {
            Stack::Push(t, rest) => Some((t, rest)),
            _ => None,
        }
    }

    /// The pushed terms, top first.
    pub fn terms(&self) -> StackTerms<'_> {
        StackTerms { cur: self }
    }

    /// The bottom or opaque tail.
    pub fn tail(&self) -> &Stack {
        let mut cur = self;
        while let Stack::Push(_, rest) = cur {
            cur = rest;
        }
        cur
    }

    pub fn depth(&self) -> usize {
        self.terms().count()
    }

    pub fn size(&self) -> usize {
        match self {
            Stack::Push(t, s) => 1 + t.size() + s.size(),
            _ => 1,
        }
    }

    pub fn has_opaque(&self) -> bool {
        match self {
            Stack::OpaqueTail(_) => true,
            Stack::Push(t, s) => t.has_opaque() || s.has_opaque(),
            Stack::Bottom(_) => false,
        }
    }

    /// All bottom idents, including those inside nested continuations.
    pub fn bottoms(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        stack_bottoms(self, &mut out);
        out
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Stack {
        match self {
            Stack::Push(t, s) => Stack::Push(Arc::new(f(t)), Arc::new(s.map_terms(f))),
            other => other.clone(),
        }
    }

    pub fn opaquify(&self) -> Stack {
        self.map_terms(&mut |t| t.opaquify())
    }
}

fn stack_bottoms(s: &Stack, out: &mut BTreeSet<Ident>) {
    match s {
        Stack::Bottom(b) => {
            out.insert(b.clone());
        }
        Stack::Push(t, rest) => {
            term_bottoms(t, out);
            stack_bottoms(rest, out);
        }
        Stack::OpaqueTail(_) => {}
    }
}

fn term_bottoms(t: &Term, out: &mut BTreeSet<Ident>) {
    match t {
        Term::App(f, a) => {
            term_bottoms(f, out);
            term_bottoms(a, out);
        }
        Term::Abs(_, b) => term_bottoms(b, out),
        Term::Kont(s) => stack_bottoms(s, out),
        _ => {}
    }
}

pub struct StackTerms<'a> {
    cur: &'a Stack,
}

impl<'a> Iterator for StackTerms<'a> {
    type Item = &'a Arc<Term>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.cur {
            Stack::Push(t, rest) => {
                self.cur = rest;
                Some(t)
            }
            _ => None,
        }
    }
}

impl Process {
    pub fn new(head: Term, stack: Stack) -> Process {
        Process {
            head: Arc::new(head),
            stack: Arc::new(stack),
        }
    }

    pub fn has_opaque(&self) -> bool {
        self.head.has_opaque() || self.stack.has_opaque()
    }

    pub fn size(&self) -> usize {
        self.head.size() + self.stack.size()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::plain().term(self))
    }
}

impl fmt::Display for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::plain().stack(self))
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::plain().process(self))
    }
}

/// A name not in `avoid`, built by appending primes to `base`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let mut candidate = format!("{base}'");
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    ident(&candidate)
}

/// Capture-avoiding substitution `body[var := value]`.
pub fn substitute(body: &Term, var: &str, value: &Term) -> Term {
    let fv = value.free_vars();
    let value = Arc::new(value.clone());
    subst_rec(body, var, &value, &fv)
        .map(|t| (*t).clone())
        .unwrap_or_else(|| body.clone())
}

/// Shared-structure variant of [`substitute`] used by the machine.
pub fn substitute_arc(body: &Arc<Term>, var: &str, value: &Arc<Term>) -> Arc<Term> {
    let fv = value.free_vars();
    subst_rec(body, var, value, &fv).unwrap_or_else(|| body.clone())
}

// Returns None when the substitution leaves the term unchanged.
fn subst_rec(t: &Term, var: &str, value: &Arc<Term>, fv: &BTreeSet<Ident>) -> Option<Arc<Term>> {
    match t {
        Term::Var(x) if &**x == var => Some(value.clone()),
        Term::App(f, a) => {
            let nf = subst_rec(f, var, value, fv);
            let na = subst_rec(a, var, value, fv);
            if nf.is_none() && na.is_none() {
                return None;
            }
            Some(Arc::new(Term::App(
                nf.unwrap_or_else(|| f.clone()),
                na.unwrap_or_else(|| a.clone()),
            )))
        }
        Term::Abs(x, b) => {
            if &**x == var {
                return None;
            }
            if fv.contains(x) {
                let body_fv = b.free_vars();
                if !body_fv.contains(var) {
                    return None;
                }
                let mut avoid = body_fv;
                avoid.extend(fv.iter().cloned());
                let y = fresh_name(x, &avoid);
                let renamed = subst_rec(
                    b,
                    x,
                    &Arc::new(Term::Var(y.clone())),
                    &BTreeSet::from([y.clone()]),
                )
                .unwrap_or_else(|| b.clone());
                let nb = subst_rec(&renamed, var, value, fv).unwrap_or(renamed);
                return Some(Arc::new(Term::Abs(y, nb)));
            }
            subst_rec(b, var, value, fv).map(|nb| Arc::new(Term::Abs(x.clone(), nb)))
        }
        Term::Kont(s) => subst_stack(s, var, value, fv).map(|ns| Arc::new(Term::Kont(ns))),
        _ => None,
    }
}

fn subst_stack(
    s: &Stack,
    var: &str,
    value: &Arc<Term>,
    fv: &BTreeSet<Ident>,
) -> Option<Arc<Stack>> {
    match s {
        Stack::Push(t, rest) => {
            let nt = subst_rec(t, var, value, fv);
            let nr = subst_stack(rest, var, value, fv);
            if nt.is_none() && nr.is_none() {
                return None;
            }
            Some(Arc::new(Stack::Push(
                nt.unwrap_or_else(|| t.clone()),
                nr.unwrap_or_else(|| rest.clone()),
            )))
        }
        _ => None,
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha_term(a, b, &mut Vec::new(), &mut Vec::new())
}

pub fn alpha_eq_stack(a: &Stack, b: &Stack) -> bool {
    alpha_stack(a, b, &mut Vec::new(), &mut Vec::new())
}

pub fn alpha_eq_process(p: &Process, q: &Process) -> bool {
    alpha_eq(&p.head, &q.head) && alpha_eq_stack(&p.stack, &q.stack)
}

// Innermost binding index counted from the end of the environment.
fn level(env: &[Ident], x: &Ident) -> Option<usize> {
    env.iter().rev().position(|y| y == x)
}

fn alpha_term(a: &Term, b: &Term, ea: &mut Vec<Ident>, eb: &mut Vec<Ident>) -> bool {
    if std::ptr::eq(a, b) && ea.is_empty() && eb.is_empty() {
        return true;
    }
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (level(ea, x), level(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_term(f1, f2, ea, eb) && alpha_term(a1, a2, ea, eb)
        }
        (Term::Abs(x, b1), Term::Abs(y, b2)) => {
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_term(b1, b2, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::Kont(s1), Term::Kont(s2)) => alpha_stack(s1, s2, ea, eb),
        (Term::Cc, Term::Cc) => true,
        (Term::Instr(x), Term::Instr(y)) => x == y,
        (Term::EnumLit(m), Term::EnumLit(n)) => m == n,
        (Term::Opaque(x), Term::Opaque(y)) => x == y,
        _ => false,
    }
}

fn alpha_stack(a: &Stack, b: &Stack, ea: &mut Vec<Ident>, eb: &mut Vec<Ident>) -> bool {
    match (a, b) {
        (Stack::Bottom(x), Stack::Bottom(y)) => x == y,
        (Stack::OpaqueTail(x), Stack::OpaqueTail(y)) => x == y,
        (Stack::Push(t1, r1), Stack::Push(t2, r2)) => {
            alpha_term(t1, t2, ea, eb) && alpha_stack(r1, r2, ea, eb)
        }
        _ => false,
    }
}

/// Church numeral `n̲`: `0̲ = λu.λv.v`, `1̲ = λu.λv.u v` and
/// `n+1̲ = λu.λv.(n̲ u)(u v)` for `n ≥ 1`.
pub fn church(n: u32) -> Term {
    match n {
        0 => Term::abss(&["u", "v"], Term::var("v")),
        1 => Term::abss(&["u", "v"], Term::app(Term::var("u"), Term::var("v"))),
        _ => Term::abss(
            &["u", "v"],
            Term::app(
                Term::app(church(n - 1), Term::var("u")),
                Term::app(Term::var("u"), Term::var("v")),
            ),
        ),
    }
}

/// β-normal form of `n̲`: `λu.λv.u (u (… v))`.
pub fn church_normal(n: u32) -> Term {
    let mut body = Term::var("v");
    for _ in 0..n {
        body = Term::app(Term::var("u"), body);
    }
    Term::abss(&["u", "v"], body)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombinatorError {
    #[error("no displayed term for combinator `{0}`; supply it as a hypothesis")]
    NoDisplayedTerm(String),
    #[error("unknown combinator `{0}`")]
    Unknown(String),
}

/// Ids accepted by [`combinator`].
pub const COMBINATORS: &[&str] = &[
    "I", "theta", "w0", "w1", "theta'", "w2", "w5", "w6", "s_succ",
];

fn uu() -> Term {
    Term::app(Term::var("u"), Term::var("u"))
}

fn theta() -> Term {
    Term::abss(
        &["u", "v"],
        Term::app(Term::app(Term::var("v"), uu()), uu()),
    )
}

fn theta_prime() -> Term {
    Term::abss(&["u", "v", "w"], Term::app(Term::var("v"), uu()))
}

/// The named closed terms of the realizer library.
pub fn combinator(id: &str) -> Result<Term, CombinatorError> {
    let t = match id {
        "I" => Term::abs("u", Term::var("u")),
        "theta" | "θ" => theta(),
        "w0" => Term::app(theta(), theta()),
        "w1" => {
            let w0 = combinator("w0")?;
            Term::abs("u", Term::app(Term::app(Term::var("u"), w0.clone()), w0))
        }
        "theta'" | "θ'" => theta_prime(),
        "w2" => Term::app(theta_prime(), theta_prime()),
        "w5" => Term::abss(&["u", "v"], Term::app(Term::var("v"), Term::var("u"))),
        "w6" => Term::abss(&["f", "g"], Term::app(Term::var("g"), combinator("w2")?)),
        "s_succ" | "s" => Term::abss(
            &["n", "u", "v"],
            Term::app(
                Term::app(Term::var("n"), Term::var("u")),
                Term::app(Term::var("u"), Term::var("v")),
            ),
        ),
        "w3" | "w4" => return Err(CombinatorError::NoDisplayedTerm(id.to_string())),
        _ => return Err(CombinatorError::Unknown(id.to_string())),
    };
    Ok(t)
}

/// Closed, no continuation constants, no opaque atoms.
pub fn is_realizer(t: &Term) -> bool {
    t.is_closed() && !t.has_kont() && !t.has_opaque()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("out of fuel after {steps} β-steps")]
pub struct OutOfFuel {
    pub steps: u64,
    pub last: Term,
}

/// One leftmost-outermost β-step, if a redex exists.
pub fn beta_step(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, a) => {
            if let Term::Abs(x, body) = &**f {
                return Some(substitute(body, x, a));
            }
            if let Some(nf) = beta_step(f) {
                return Some(Term::App(Arc::new(nf), a.clone()));
            }
            beta_step(a).map(|na| Term::App(f.clone(), Arc::new(na)))
        }
        Term::Abs(x, b) => beta_step(b).map(|nb| Term::Abs(x.clone(), Arc::new(nb))),
        _ => None,
    }
}

/// Normal-order β-normalization with at most `fuel` steps.
pub fn beta_normalize(t: &Term, fuel: u64) -> Result<Term, OutOfFuel> {
    let mut cur = t.clone();
    for _ in 0..fuel {
        match beta_step(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    if beta_step(&cur).is_none() {
        Ok(cur)
    } else {
        Err(OutOfFuel {
            steps: fuel,
            last: cur,
        })
    }
}
