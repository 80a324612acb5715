//! Formulas over the signature `{∉, ⊆, ε̸, ≠}` with `→`, `⊤`, `⊥`, `∀` and
//! bounded quantifiers, plus the sugar that desugars into them.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::lambda_c::{ident, Ident, Term};
use crate::names::{
    falsity_atomic, mk_gimel, mk_hat, mk_reish, op, sng, up, AtomKind, FalsityDescriptor, Name,
    NameUniverse,
};

pub use parse::{
    parse_formula, parse_formula_with, parse_fun_table, parse_name_expr, parse_name_list,
    parse_sugar, plain_fun, FormulaEnv,
};

/// A ground-model function lifted to a name, usable as a function symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunDef {
    pub id: Ident,
    pub kind: LiftKind,
    pub map: BTreeMap<Name, Name>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiftKind {
    /// `⌐f`: outside the domain an atom mentioning `f(x)` is false on Π.
    Plain,
    /// `f̂` over hat ordinals: outside the domain the atom is empty.
    Ordered,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NameExpr {
    Var(Ident),
    Const(Name),
    Sng(Box<NameExpr>),
    Up(Box<NameExpr>, Box<NameExpr>),
    Op(Box<NameExpr>, Box<NameExpr>),
    Apply(Arc<FunDef>, Box<NameExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("free variable `{0}`")]
    Free(Ident),
    #[error("`{fun}` is not defined at {arg}")]
    OutsideDomain {
        fun: Ident,
        kind: LiftKind,
        arg: Name,
    },
}

impl NameExpr {
    pub fn var(x: &str) -> NameExpr {
        NameExpr::Var(ident(x))
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Ident>) {
        match self {
            NameExpr::Var(x) => {
                out.insert(x.clone());
            }
            NameExpr::Const(_) => {}
            NameExpr::Sng(a) | NameExpr::Apply(_, a) => a.free_vars_into(out),
            NameExpr::Up(a, b) | NameExpr::Op(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        let mut v = BTreeSet::new();
        self.free_vars_into(&mut v);
        v.is_empty()
    }

    pub fn eval(&self) -> Result<Name, EvalError> {
        Ok(match self {
            NameExpr::Var(x) => return Err(EvalError::Free(x.clone())),
            NameExpr::Const(n) => n.clone(),
            NameExpr::Sng(a) => sng(a.eval()?),
            NameExpr::Up(a, b) => up(a.eval()?, b.eval()?),
            NameExpr::Op(a, b) => op(a.eval()?, b.eval()?),
            NameExpr::Apply(f, a) => {
                let arg = a.eval()?;
                match f.map.get(&arg) {
                    Some(v) => v.clone(),
                    None => {
                        return Err(EvalError::OutsideDomain {
                            fun: f.id.clone(),
                            kind: f.kind,
                            arg,
                        })
                    }
                }
            }
        })
    }

    fn subst(&self, x: &str, a: &Name) -> NameExpr {
        match self {
            NameExpr::Var(y) if &**y == x => NameExpr::Const(a.clone()),
            NameExpr::Var(_) | NameExpr::Const(_) => self.clone(),
            NameExpr::Sng(b) => NameExpr::Sng(Box::new(b.subst(x, a))),
            NameExpr::Up(b, c) => NameExpr::Up(Box::new(b.subst(x, a)), Box::new(c.subst(x, a))),
            NameExpr::Op(b, c) => NameExpr::Op(Box::new(b.subst(x, a)), Box::new(c.subst(x, a))),
            NameExpr::Apply(f, b) => NameExpr::Apply(f.clone(), Box::new(b.subst(x, a))),
        }
    }

    /// Evaluates closed subexpressions to constants.
    pub fn simplify(&self) -> NameExpr {
        if self.is_closed() {
            if let Ok(n) = self.eval() {
                return NameExpr::Const(n);
            }
        }
        self.clone()
    }

    pub fn names_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            NameExpr::Var(_) => {}
            NameExpr::Const(n) => {
                out.insert(n.clone());
            }
            NameExpr::Sng(a) => a.names_into(out),
            NameExpr::Apply(f, a) => {
                for (k, v) in &f.map {
                    out.insert(k.clone());
                    out.insert(v.clone());
                }
                a.names_into(out);
            }
            NameExpr::Up(a, b) | NameExpr::Op(a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
        }
    }

    fn is_compound(&self) -> bool {
        match self {
            NameExpr::Var(_) | NameExpr::Apply(..) => false,
            NameExpr::Const(n) => n.describe().contains(' '),
            _ => true,
        }
    }

    fn write_arg(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_compound() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for NameExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameExpr::Var(x) => f.write_str(x),
            NameExpr::Const(n) => f.write_str(&n.describe()),
            NameExpr::Sng(a) => {
                f.write_str("sng ")?;
                a.write_arg(f)
            }
            NameExpr::Up(a, b) | NameExpr::Op(a, b) => {
                f.write_str(if matches!(self, NameExpr::Up(..)) {
                    "up "
                } else {
                    "op "
                })?;
                a.write_arg(f)?;
                f.write_str(" ")?;
                b.write_arg(f)
            }
            NameExpr::Apply(g, a) => write!(f, "{}({a})", g.id),
        }
    }
}

impl From<Name> for NameExpr {
    fn from(n: Name) -> NameExpr {
        NameExpr::Const(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    NotEps(NameExpr, NameExpr),
    Neq(NameExpr, NameExpr),
    NotIn(NameExpr, NameExpr),
    Sub(NameExpr, NameExpr),
    Imp(Arc<Formula>, Arc<Formula>),
    Forall(Ident, Arc<Formula>),
    /// `∀x^{𝔤(A)}`, ranging over the listed names.
    ForallGimel(Ident, Vec<Name>, Arc<Formula>),
    /// `∀x^{α̂}`: instances `β̂` for `β < α`, each behind `ν_β`.
    ForallHat(Ident, usize, Arc<Formula>),
    /// `∀x^{⌐Ord}` truncated to `⌐β` for `β < bound`.
    ForallReishOrd(Ident, usize, Arc<Formula>),
    /// A schematic formula letter standing for an arbitrary formula; its
    /// falsity value is only known through hypotheses.
    Meta(Ident, Vec<NameExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("formula is not closed: free variable `{0}`")]
    NotClosed(Ident),
    #[error("unbounded quantifier `all {0}` needs a declared universe")]
    NoUniverse(Ident),
    #[error("name {0} is outside the universe")]
    OutsideUniverse(Name),
    #[error(transparent)]
    Name(#[from] crate::names::NameError),
}

impl Formula {
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn negation(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(ident(x), Arc::new(body))
    }

    pub fn atom(kind: AtomKind, a: NameExpr, b: NameExpr) -> Formula {
        match kind {
            AtomKind::NotEps => Formula::NotEps(a, b),
            AtomKind::Neq => Formula::Neq(a, b),
            AtomKind::NotIn => Formula::NotIn(a, b),
            AtomKind::Sub => Formula::Sub(a, b),
        }
    }

    pub fn as_atom(&self) -> Option<(AtomKind, &NameExpr, &NameExpr)> {
        match self {
            Formula::NotEps(a, b) => Some((AtomKind::NotEps, a, b)),
            Formula::Neq(a, b) => Some((AtomKind::Neq, a, b)),
            Formula::NotIn(a, b) => Some((AtomKind::NotIn, a, b)),
            Formula::Sub(a, b) => Some((AtomKind::Sub, a, b)),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.free_vars_rec(&BTreeSet::new(), &mut out);
        out
    }

    fn free_vars_rec(&self, bound: &BTreeSet<Ident>, out: &mut BTreeSet<Ident>) {
        let mut push = |e: &NameExpr| {
            let mut v = BTreeSet::new();
            e.free_vars_into(&mut v);
            out.extend(v.into_iter().filter(|x| !bound.contains(x)));
        };
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::NotEps(a, b)
            | Formula::Neq(a, b)
            | Formula::NotIn(a, b)
            | Formula::Sub(a, b) => {
                push(a);
                push(b);
            }
            Formula::Meta(_, args) => args.iter().for_each(push),
            Formula::Imp(a, b) => {
                a.free_vars_rec(bound, out);
                b.free_vars_rec(bound, out);
            }
            Formula::Forall(x, body)
            | Formula::ForallGimel(x, _, body)
            | Formula::ForallHat(x, _, body)
            | Formula::ForallReishOrd(x, _, body) => {
                let mut inner = bound.clone();
                inner.insert(x.clone());
                body.free_vars_rec(&inner, out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// `φ[a/x]`; closed name subexpressions are evaluated.
    pub fn subst_name(&self, x: &str, a: &Name) -> Formula {
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::NotEps(b, c) => {
                Formula::NotEps(b.subst(x, a).simplify(), c.subst(x, a).simplify())
            }
            Formula::Neq(b, c) => Formula::Neq(b.subst(x, a).simplify(), c.subst(x, a).simplify()),
            Formula::NotIn(b, c) => {
                Formula::NotIn(b.subst(x, a).simplify(), c.subst(x, a).simplify())
            }
            Formula::Sub(b, c) => Formula::Sub(b.subst(x, a).simplify(), c.subst(x, a).simplify()),
            Formula::Meta(p, args) => Formula::Meta(
                p.clone(),
                args.iter().map(|e| e.subst(x, a).simplify()).collect(),
            ),
            Formula::Imp(b, c) => Formula::imp(b.subst_name(x, a), c.subst_name(x, a)),
            Formula::Forall(y, _)
            | Formula::ForallGimel(y, _, _)
            | Formula::ForallHat(y, _, _)
            | Formula::ForallReishOrd(y, _, _)
                if &**y == x =>
            {
                self.clone()
            }
            Formula::Forall(y, b) => Formula::Forall(y.clone(), Arc::new(b.subst_name(x, a))),
            Formula::ForallGimel(y, s, b) => {
                Formula::ForallGimel(y.clone(), s.clone(), Arc::new(b.subst_name(x, a)))
            }
            Formula::ForallHat(y, n, b) => {
                Formula::ForallHat(y.clone(), *n, Arc::new(b.subst_name(x, a)))
            }
            Formula::ForallReishOrd(y, n, b) => {
                Formula::ForallReishOrd(y.clone(), *n, Arc::new(b.subst_name(x, a)))
            }
        }
    }

    /// Every name constant mentioned, including quantifier ranges.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.names_rec(&mut out);
        out
    }

    fn names_rec(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::NotEps(a, b)
            | Formula::Neq(a, b)
            | Formula::NotIn(a, b)
            | Formula::Sub(a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
            Formula::Meta(_, args) => args.iter().for_each(|e| e.names_into(out)),
            Formula::Imp(a, b) => {
                a.names_rec(out);
                b.names_rec(out);
            }
            Formula::Forall(_, b) => b.names_rec(out),
            Formula::ForallGimel(_, s, b) => {
                out.extend(s.iter().cloned());
                b.names_rec(out);
            }
            Formula::ForallHat(_, n, b) => {
                out.extend((0..*n).filter_map(|b| mk_hat(b, *n).ok()));
                b.names_rec(out);
            }
            Formula::ForallReishOrd(_, n, b) => {
                out.extend((0..*n).map(mk_reish));
                b.names_rec(out);
            }
        }
    }

    /// Number of connectives and quantifiers.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, b)
            | Formula::ForallGimel(_, _, b)
            | Formula::ForallHat(_, _, b)
            | Formula::ForallReishOrd(_, _, b) => 1 + b.depth(),
            _ => 0,
        }
    }

    pub fn has_unbounded_forall(&self) -> bool {
        match self {
            Formula::Forall(..) => true,
            Formula::Imp(a, b) => a.has_unbounded_forall() || b.has_unbounded_forall(),
            Formula::ForallGimel(_, _, b)
            | Formula::ForallHat(_, _, b)
            | Formula::ForallReishOrd(_, _, b) => b.has_unbounded_forall(),
            _ => false,
        }
    }
}

fn write_quant_body(f: &mut fmt::Formatter<'_>, head: String, body: &Formula) -> fmt::Result {
    write!(f, "{head}. {body}")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::NotEps(a, b) => write!(f, "{a} !eps {b}"),
            Formula::Neq(a, b) => write!(f, "{a} != {b}"),
            Formula::NotIn(a, b) => write!(f, "{a} !in {b}"),
            Formula::Sub(a, b) => write!(f, "{a} sub {b}"),
            Formula::Meta(p, args) if args.is_empty() => f.write_str(p),
            Formula::Meta(p, args) => {
                let parts: Vec<_> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{p}({})", parts.join(", "))
            }
            Formula::Imp(a, b) => {
                if matches!(**a, Formula::Imp(..))
                    || matches!(
                        **a,
                        Formula::Forall(..)
                            | Formula::ForallGimel(..)
                            | Formula::ForallHat(..)
                            | Formula::ForallReishOrd(..)
                    )
                {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            Formula::Forall(x, b) => write_quant_body(f, format!("all {x}"), b),
            Formula::ForallGimel(x, s, b) => {
                let parts: Vec<_> = s.iter().map(|n| n.describe()).collect();
                write_quant_body(f, format!("all {x}^gimel{{{}}}", parts.join(", ")), b)
            }
            Formula::ForallHat(x, n, b) => write_quant_body(f, format!("all {x}^hat({n})"), b),
            Formula::ForallReishOrd(x, n, b) => {
                write_quant_body(f, format!("all {x}^rord({n})"), b)
            }
        }
    }
}

/// Formulas with the abbreviations of the ε-language still in place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sugar {
    Top,
    Bot,
    Atom(AtomKind, NameExpr, NameExpr),
    /// `a ε b`.
    Eps(NameExpr, NameExpr),
    /// `a ∈ b`.
    In(NameExpr, NameExpr),
    /// `a = b`.
    Eq(NameExpr, NameExpr),
    /// `a ≃ b`.
    Sim(NameExpr, NameExpr),
    /// `a ≄ b`, i.e. `a ⊆ b → (b ⊆ a → ⊥)`.
    NotSim(NameExpr, NameExpr),
    /// `a ⊆_ε b`.
    SubEps(NameExpr, NameExpr),
    Not(Box<Sugar>),
    Imp(Box<Sugar>, Box<Sugar>),
    And(Box<Sugar>, Box<Sugar>),
    Or(Box<Sugar>, Box<Sugar>),
    Forall(Ident, Range, Box<Sugar>),
    Exists(Ident, Option<NameExpr>, Box<Sugar>),
    Meta(Ident, Vec<NameExpr>),
    /// Extensional function with domain `a`.
    ExtFun(NameExpr, NameExpr),
    /// ε-function with domain `a`.
    EpsFun(NameExpr, NameExpr),
    /// `f` is an ε-surjection from `a` onto `b`.
    EpsSurj(NameExpr, NameExpr, NameExpr),
    /// The non-extensional axiom of choice.
    Neac,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    All,
    Gimel(Vec<Name>),
    Hat(usize),
    ReishOrd(usize),
    /// `∀x ε a`.
    Eps(NameExpr),
}

impl Sugar {
    fn imp(a: Sugar, b: Sugar) -> Sugar {
        Sugar::Imp(Box::new(a), Box::new(b))
    }

    fn and(a: Sugar, b: Sugar) -> Sugar {
        Sugar::And(Box::new(a), Box::new(b))
    }

    fn all(x: &Ident, body: Sugar) -> Sugar {
        Sugar::Forall(x.clone(), Range::All, Box::new(body))
    }

    fn all_eps(x: &Ident, a: &NameExpr, body: Sugar) -> Sugar {
        Sugar::Forall(x.clone(), Range::Eps(a.clone()), Box::new(body))
    }

    fn var(x: &Ident) -> NameExpr {
        NameExpr::Var(x.clone())
    }

    fn op(a: &Ident, b: &Ident) -> NameExpr {
        NameExpr::Op(Box::new(Sugar::var(a)), Box::new(Sugar::var(b)))
    }
}

impl From<Formula> for Sugar {
    fn from(f: Formula) -> Sugar {
        match f {
            Formula::Top => Sugar::Top,
            Formula::Bot => Sugar::Bot,
            Formula::NotEps(a, b) => Sugar::Atom(AtomKind::NotEps, a, b),
            Formula::Neq(a, b) => Sugar::Atom(AtomKind::Neq, a, b),
            Formula::NotIn(a, b) => Sugar::Atom(AtomKind::NotIn, a, b),
            Formula::Sub(a, b) => Sugar::Atom(AtomKind::Sub, a, b),
            Formula::Imp(a, b) => Sugar::imp((*a).clone().into(), (*b).clone().into()),
            Formula::Forall(x, b) => Sugar::Forall(x, Range::All, Box::new((*b).clone().into())),
            Formula::ForallGimel(x, s, b) => {
                Sugar::Forall(x, Range::Gimel(s), Box::new((*b).clone().into()))
            }
            Formula::ForallHat(x, n, b) => {
                Sugar::Forall(x, Range::Hat(n), Box::new((*b).clone().into()))
            }
            Formula::ForallReishOrd(x, n, b) => {
                Sugar::Forall(x, Range::ReishOrd(n), Box::new((*b).clone().into()))
            }
            Formula::Meta(p, args) => Sugar::Meta(p, args),
        }
    }
}

fn fresh(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let mut s = base.to_string();
    while avoid.contains(s.as_str()) {
        s.push('\'');
    }
    ident(&s)
}

fn exprs_vars(es: &[&NameExpr]) -> BTreeSet<Ident> {
    let mut v = BTreeSet::new();
    for e in es {
        e.free_vars_into(&mut v);
    }
    v
}

/// Eliminates every abbreviation.
///
/// `∧`, `∨`, `∃` use De Morgan encodings; `a ≃ b` is
/// `(a ⊆ b → (b ⊆ a → ⊥)) → ⊥`.
pub fn desugar(s: &Sugar) -> Formula {
    let d = |x: &Sugar| desugar(x);
    match s {
        Sugar::Top => Formula::Top,
        Sugar::Bot => Formula::Bot,
        Sugar::Atom(k, a, b) => Formula::atom(*k, a.clone(), b.clone()),
        Sugar::Eps(a, b) => Formula::negation(Formula::NotEps(a.clone(), b.clone())),
        Sugar::In(a, b) => Formula::negation(Formula::NotIn(a.clone(), b.clone())),
        Sugar::Eq(a, b) => Formula::negation(Formula::Neq(a.clone(), b.clone())),
        Sugar::Sim(a, b) => Formula::negation(not_sim(a, b)),
        Sugar::NotSim(a, b) => not_sim(a, b),
        Sugar::SubEps(a, b) => {
            let x = fresh("x", &exprs_vars(&[a, b]));
            let xv = Sugar::var(&x);
            d(&Sugar::all_eps(&x, a, Sugar::Eps(xv, b.clone())))
        }
        Sugar::Not(a) => Formula::negation(d(a)),
        Sugar::Imp(a, b) => Formula::imp(d(a), d(b)),
        Sugar::And(a, b) => Formula::negation(Formula::imp(d(a), Formula::negation(d(b)))),
        Sugar::Or(a, b) => Formula::imp(
            Formula::negation(d(a)),
            Formula::negation(Formula::negation(d(b))),
        ),
        Sugar::Forall(x, r, body) => {
            let b = Arc::new(d(body));
            match r {
                Range::All => Formula::Forall(x.clone(), b),
                Range::Gimel(s) => Formula::ForallGimel(x.clone(), s.clone(), b),
                Range::Hat(n) => Formula::ForallHat(x.clone(), *n, b),
                Range::ReishOrd(n) => Formula::ForallReishOrd(x.clone(), *n, b),
                Range::Eps(a) => Formula::Forall(
                    x.clone(),
                    Arc::new(Formula::imp(
                        Formula::negation(Formula::NotEps(Sugar::var(x), a.clone())),
                        (*b).clone(),
                    )),
                ),
            }
        }
        Sugar::Exists(x, None, body) => {
            Formula::negation(Formula::forall(x, Formula::negation(d(body))))
        }
        Sugar::Exists(x, Some(a), body) => Formula::negation(Formula::Forall(
            x.clone(),
            Arc::new(Formula::imp(
                d(body),
                Formula::NotEps(Sugar::var(x), a.clone()),
            )),
        )),
        Sugar::Meta(p, args) => Formula::Meta(p.clone(), args.clone()),
        Sugar::ExtFun(f, a) => {
            let avoid = exprs_vars(&[f, a]);
            let (x, x2, y, y2) = (
                fresh("x", &avoid),
                fresh("x2", &avoid),
                fresh("y", &avoid),
                fresh("y2", &avoid),
            );
            let premise = Sugar::and(
                Sugar::Eps(Sugar::op(&x, &y), f.clone()),
                Sugar::and(
                    Sugar::Eps(Sugar::op(&x2, &y2), f.clone()),
                    Sugar::Sim(Sugar::var(&x), Sugar::var(&x2)),
                ),
            );
            let body = Sugar::imp(premise, Sugar::Sim(Sugar::var(&y), Sugar::var(&y2)));
            d(&Sugar::all_eps(
                &x,
                a,
                Sugar::all_eps(&x2, a, Sugar::all(&y, Sugar::all(&y2, body))),
            ))
        }
        Sugar::EpsFun(f, a) => {
            let avoid = exprs_vars(&[f, a]);
            let (x, y, y2) = (fresh("x", &avoid), fresh("y", &avoid), fresh("y2", &avoid));
            let premise = Sugar::and(
                Sugar::Eps(Sugar::op(&x, &y), f.clone()),
                Sugar::Eps(Sugar::op(&x, &y2), f.clone()),
            );
            let body = Sugar::imp(premise, Sugar::Eq(Sugar::var(&y), Sugar::var(&y2)));
            d(&Sugar::all_eps(
                &x,
                a,
                Sugar::all(&y, Sugar::all(&y2, body)),
            ))
        }
        Sugar::EpsSurj(f, a, b) => {
            let avoid = exprs_vars(&[f, a, b]);
            let (x, y) = (fresh("x", &avoid), fresh("y", &avoid));
            let inner = Sugar::all(
                &x,
                Sugar::imp(
                    Sugar::Eps(Sugar::op(&x, &y), f.clone()),
                    Sugar::Atom(AtomKind::NotEps, Sugar::var(&x), a.clone()),
                ),
            );
            d(&Sugar::all(
                &y,
                Sugar::imp(
                    Sugar::Eps(Sugar::var(&y), b.clone()),
                    Sugar::imp(inner, Sugar::Bot),
                ),
            ))
        }
        Sugar::Neac => {
            let (r, f, x, y, y2) = (ident("r"), ident("f"), ident("x"), ident("y"), ident("y2"));
            let fv = Sugar::var(&f);
            let rv = Sugar::var(&r);
            let functional = Sugar::all(
                &x,
                Sugar::all(
                    &y,
                    Sugar::all(
                        &y2,
                        Sugar::imp(
                            Sugar::and(
                                Sugar::Eps(Sugar::op(&x, &y), fv.clone()),
                                Sugar::Eps(Sugar::op(&x, &y2), fv.clone()),
                            ),
                            Sugar::Eq(Sugar::var(&y), Sugar::var(&y2)),
                        ),
                    ),
                ),
            );
            let below = Sugar::SubEps(fv.clone(), rv.clone());
            let total = Sugar::all(
                &x,
                Sugar::all(
                    &y,
                    Sugar::Exists(
                        y2.clone(),
                        None,
                        Box::new(Sugar::imp(
                            Sugar::Eps(Sugar::op(&x, &y), rv),
                            Sugar::Eps(Sugar::op(&x, &y2), fv),
                        )),
                    ),
                ),
            );
            d(&Sugar::all(
                &r,
                Sugar::Exists(
                    f.clone(),
                    None,
                    Box::new(Sugar::and(functional, Sugar::and(below, total))),
                ),
            ))
        }
    }
}

fn not_sim(a: &NameExpr, b: &NameExpr) -> Formula {
    Formula::imp(
        Formula::Sub(a.clone(), b.clone()),
        Formula::negation(Formula::Sub(b.clone(), a.clone())),
    )
}

/// One level of the falsity value of a closed formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `‖⊤‖ = ∅`.
    Empty,
    /// `‖⊥‖ = Π`.
    All,
    Atom {
        kind: AtomKind,
        a: Name,
        b: Name,
        descriptor: FalsityDescriptor,
    },
    /// `{t·π : t ⊩ ψ, π ∈ ‖θ‖}`.
    Imp { realizer: Formula, tail: Formula },
    /// `⋃ᵢ ‖φᵢ‖`, one instance per name in range.
    Family(Vec<(Name, Formula)>),
    /// `⋃_β {ν_β·π : π ∈ ‖φ(β̂)‖}`.
    HatFamily(Vec<(u32, Formula)>),
    /// Only known through hypotheses.
    Meta(Ident, Vec<Name>),
}

/// The falsity value of an atom whose names may not evaluate.
pub fn atom_shape(kind: AtomKind, a: &NameExpr, b: &NameExpr) -> Result<Shape, FormulaError> {
    match (a.eval(), b.eval()) {
        (Ok(x), Ok(y)) => Ok(Shape::Atom {
            descriptor: falsity_atomic(kind, &x, &y),
            kind,
            a: x,
            b: y,
        }),
        (Err(EvalError::Free(v)), _) | (_, Err(EvalError::Free(v))) => {
            Err(FormulaError::NotClosed(v))
        }
        (Err(EvalError::OutsideDomain { kind, .. }), _)
        | (_, Err(EvalError::OutsideDomain { kind, .. })) => Ok(match kind {
            LiftKind::Plain => Shape::All,
            LiftKind::Ordered => Shape::Empty,
        }),
    }
}

/// Decomposes `‖φ‖` one level. Unbounded `∀` ranges over `universe`.
pub fn falsity_shape(
    phi: &Formula,
    universe: Option<&NameUniverse>,
) -> Result<Shape, FormulaError> {
    if let Some(x) = phi.free_vars().into_iter().next() {
        return Err(FormulaError::NotClosed(x));
    }
    Ok(match phi {
        Formula::Top => Shape::Empty,
        Formula::Bot => Shape::All,
        Formula::NotEps(a, b) | Formula::Neq(a, b) | Formula::NotIn(a, b) | Formula::Sub(a, b) => {
            let (kind, _, _) = phi.as_atom().unwrap();
            return atom_shape(kind, a, b);
        }
        Formula::Meta(p, args) => Shape::Meta(
            p.clone(),
            args.iter()
                .map(|e| e.eval().map_err(|_| FormulaError::NotClosed(p.clone())))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Imp(a, b) => Shape::Imp {
            realizer: (**a).clone(),
            tail: (**b).clone(),
        },
        Formula::Forall(x, body) => {
            let u = universe.ok_or_else(|| FormulaError::NoUniverse(x.clone()))?;
            Shape::Family(
                u.iter()
                    .map(|a| (a.clone(), body.subst_name(x, a)))
                    .collect(),
            )
        }
        Formula::ForallGimel(x, s, body) => Shape::Family(
            s.iter()
                .map(|a| (a.clone(), body.subst_name(x, a)))
                .collect(),
        ),
        Formula::ForallReishOrd(x, n, body) => Shape::Family(
            (0..*n)
                .map(|m| {
                    let a = mk_reish(m);
                    (a.clone(), body.subst_name(x, &a))
                })
                .collect(),
        ),
        Formula::ForallHat(x, n, body) => Shape::HatFamily(
            (0..*n)
                .map(|b| Ok((b as u32, body.subst_name(x, &mk_hat(b, *n)?))))
                .collect::<Result<_, crate::names::NameError>>()?,
        ),
    })
}

/// The gimel name `𝔤(A)` ranged over by `∀x^{𝔤(A)}`.
pub fn gimel_of(s: &[Name]) -> Name {
    mk_gimel(s.iter().cloned())
}

/// `ν_β` as a term, for hat families.
pub fn nu(beta: u32) -> Term {
    Term::EnumLit(beta)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::names::mk_reish as r;

    fn c(n: usize) -> NameExpr {
        NameExpr::Const(r(n))
    }

    #[test]
    fn desugar_examples() {
        let (a, b) = (NameExpr::var("a"), NameExpr::var("b"));
        assert_eq!(
            desugar(&Sugar::Eps(a.clone(), b.clone())),
            Formula::imp(Formula::NotEps(a.clone(), b.clone()), Formula::Bot)
        );
        let p = Sugar::Meta(ident("P"), vec![]);
        let q = Sugar::Meta(ident("Q"), vec![]);
        let (pf, qf) = (
            Formula::Meta(ident("P"), vec![]),
            Formula::Meta(ident("Q"), vec![]),
        );
        assert_eq!(
            desugar(&Sugar::Or(Box::new(p.clone()), Box::new(q))),
            Formula::imp(
                Formula::negation(pf.clone()),
                Formula::negation(Formula::negation(qf))
            )
        );
        let px = Sugar::Meta(ident("P"), vec![NameExpr::var("x")]);
        assert_eq!(
            desugar(&Sugar::Exists(ident("x"), None, Box::new(px))),
            Formula::negation(Formula::forall(
                "x",
                Formula::negation(Formula::Meta(ident("P"), vec![NameExpr::var("x")]))
            ))
        );
    }

    #[test]
    fn desugar_is_identity_on_primitives() {
        let f = Formula::forall(
            "x",
            Formula::imp(
                Formula::Sub(NameExpr::var("x"), NameExpr::var("x")),
                Formula::NotIn(NameExpr::var("x"), c(2)),
            ),
        );
        assert_eq!(desugar(&Sugar::from(f.clone())), f);
    }

    #[test]
    fn substitution() {
        let f = Formula::NotEps(NameExpr::var("x"), c(1));
        assert_eq!(f.subst_name("x", &r(0)), Formula::NotEps(c(0), c(1)));
        let g = Formula::forall("x", f.clone());
        assert_eq!(g.subst_name("x", &r(0)), g);
        let h = Formula::negation(Formula::Sub(NameExpr::var("x"), NameExpr::var("x")));
        assert_eq!(
            h.subst_name("x", &r(2)),
            Formula::negation(Formula::Sub(c(2), c(2)))
        );
        let s = Formula::NotEps(NameExpr::Sng(Box::new(NameExpr::var("x"))), c(2));
        assert_eq!(s.subst_name("x", &r(0)), Formula::NotEps(c(1), c(2)));
    }

    #[test]
    fn shapes() {
        assert_eq!(falsity_shape(&Formula::Bot, None).unwrap(), Shape::All);
        assert_eq!(falsity_shape(&Formula::Top, None).unwrap(), Shape::Empty);
        let body = Formula::NotEps(NameExpr::var("x"), c(2));
        let hat = Formula::ForallHat(ident("x"), 2, Arc::new(body.clone()));
        let Shape::HatFamily(v) = falsity_shape(&hat, None).unwrap() else {
            panic!()
        };
        assert_eq!(v.iter().map(|(b, _)| *b).collect::<Vec<_>>(), vec![0, 1]);
        let g = Formula::ForallGimel(ident("x"), vec![r(0)], Arc::new(body.clone()));
        assert_eq!(
            falsity_shape(&g, None).unwrap(),
            Shape::Family(vec![(r(0), Formula::NotEps(c(0), c(2)))])
        );
        assert!(matches!(
            falsity_shape(&Formula::forall("x", body), None),
            Err(FormulaError::NoUniverse(_))
        ));
    }

    #[test]
    fn macros_are_closed_over_their_arguments() {
        let (f, a, b) = (NameExpr::var("f"), NameExpr::var("a"), NameExpr::var("b"));
        for s in [
            Sugar::ExtFun(f.clone(), a.clone()),
            Sugar::EpsFun(f.clone(), a.clone()),
            Sugar::EpsSurj(f.clone(), a.clone(), b.clone()),
        ] {
            let fv = desugar(&s).free_vars();
            assert!(fv.iter().all(|v| ["f", "a", "b"].contains(&&**v)), "{fv:?}");
        }
        assert!(desugar(&Sugar::Neac).is_closed());
    }

    #[test]
    fn surj_matches_displayed_form() {
        let s = desugar(&Sugar::EpsSurj(
            NameExpr::var("f"),
            NameExpr::var("a"),
            NameExpr::var("b"),
        ));
        assert_eq!(
            s.to_string(),
            "all y. (y !eps b -> bot) -> (all x. (op x y !eps f -> bot) -> x !eps a) -> bot"
        );
    }
}
