//! The valuation τ into a Boolean algebra, the pole `τ = 0` it induces, and
//! the forcing value `F(φ) = ⋁ τ[‖φ‖]`.

use std::collections::BTreeMap;

use super::{BoolAlg, Elem};
use crate::formulas::{atom_shape, Formula, FormulaError, Shape};
use crate::lambda_c::{ident, Ident, Process, Stack, Term};
use crate::names::{AtomKind, FalsityDescriptor, Name, NameUniverse, StackSpec};

/// A Boolean algebra with an assignment of stack bottoms to elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauContext {
    pub algebra: BoolAlg,
    /// Keys exclude the `w_` prefix.
    pub bottoms: BTreeMap<Ident, Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TauError {
    #[error("stack bottom `w_{0}` has no value")]
    UnmappedBottom(Ident),
    #[error("τ is undefined on opaque content")]
    Opaque,
    #[error("τ is undefined on enumeration literals")]
    EnumLit,
    #[error("formula letter `{0}` has no forcing value")]
    Meta(Ident),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

impl TauContext {
    /// One bottom per element, named after it: `w_0`, `w_1`, `w_a1a2`, ...
    pub fn canonical(algebra: BoolAlg) -> TauContext {
        let bottoms = algebra
            .elements()
            .map(|e| (ident(algebra.name(e)), e))
            .collect();
        TauContext { algebra, bottoms }
    }

    /// `⋁ τ[Π]`, the join of all bottom values.
    pub fn sup_all(&self) -> Elem {
        self.algebra.join_all(self.bottoms.values().copied())
    }

    /// A bottom whose value is `e`, if any.
    pub fn bottom_for(&self, e: Elem) -> Option<&Ident> {
        self.bottoms.iter().find(|(_, &v)| v == e).map(|(k, _)| k)
    }
}

/// Whether `ν_n` evaluates like the Church numeral `n̲` (value one).
#[derive(Clone, Copy)]
enum Enum {
    Reject,
    AsNumeral,
}

fn term_rec(t: &Term, ctx: &TauContext, en: Enum) -> Result<Elem, TauError> {
    let b = &ctx.algebra;
    match t {
        Term::Var(_) | Term::Cc | Term::Instr(_) => Ok(b.one()),
        Term::App(f, a) => Ok(b.meet(term_rec(f, ctx, en)?, term_rec(a, ctx, en)?)),
        Term::Abs(_, body) => term_rec(body, ctx, en),
        Term::Kont(s) => stack_rec(s, ctx, en),
        Term::EnumLit(_) => match en {
            Enum::Reject => Err(TauError::EnumLit),
            Enum::AsNumeral => Ok(b.one()),
        },
        Term::Opaque(_) => Err(TauError::Opaque),
    }
}

fn stack_rec(s: &Stack, ctx: &TauContext, en: Enum) -> Result<Elem, TauError> {
    let mut acc = ctx.algebra.one();
    let mut cur = s;
    loop {
        match cur {
            Stack::Bottom(x) => {
                let v = *ctx
                    .bottoms
                    .get(x)
                    .ok_or_else(|| TauError::UnmappedBottom(x.clone()))?;
                return Ok(ctx.algebra.meet(acc, v));
            }
            Stack::OpaqueTail(_) => return Err(TauError::Opaque),
            Stack::Push(t, rest) => {
                acc = ctx.algebra.meet(acc, term_rec(t, ctx, en)?);
                cur = rest;
            }
        }
    }
}

/// τ on terms: variables, `cc` and instructions are one; application is
/// meet; abstraction is transparent; `τ(k_π) = τ(π)`.
pub fn tau_term(t: &Term, ctx: &TauContext) -> Result<Elem, TauError> {
    term_rec(t, ctx, Enum::Reject)
}

/// τ on stacks: the meet of the entries and the bottom's value.
pub fn tau_stack(s: &Stack, ctx: &TauContext) -> Result<Elem, TauError> {
    stack_rec(s, ctx, Enum::Reject)
}

pub fn tau_process(p: &Process, ctx: &TauContext) -> Result<Elem, TauError> {
    Ok(ctx
        .algebra
        .meet(tau_term(&p.head, ctx)?, tau_stack(&p.stack, ctx)?))
}

/// `⋁ τ[σ]`. Enumeration literals count as the numerals they index.
pub fn tau_sup(spec: &StackSpec, ctx: &TauContext) -> Result<Elem, TauError> {
    let b = &ctx.algebra;
    match spec {
        StackSpec::AllStacks => Ok(ctx.sup_all()),
        StackSpec::PrefixAll(ts) => {
            let mut acc = ctx.sup_all();
            for t in ts {
                acc = b.meet(acc, term_rec(t, ctx, Enum::AsNumeral)?);
            }
            Ok(acc)
        }
        StackSpec::Finite(ss) => {
            let mut acc = b.zero();
            for s in ss {
                acc = b.join(acc, stack_rec(s, ctx, Enum::AsNumeral)?);
            }
            Ok(acc)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoleVerdict {
    pub in_pole: bool,
    pub witness_value: Elem,
}

/// `t ⋆ π ∈ ⊥⊥` iff `τ(t) ∧ τ(π) = 0`.
pub fn pole_decide(p: &Process, ctx: &TauContext) -> Result<PoleVerdict, TauError> {
    let v = tau_process(p, ctx)?;
    Ok(PoleVerdict {
        in_pole: v == ctx.algebra.zero(),
        witness_value: v,
    })
}

/// `p ≻ q` iff `τ(p) ≤ τ(q)`.
pub fn preorder_decide(p: &Process, q: &Process, ctx: &TauContext) -> Result<bool, TauError> {
    Ok(ctx.algebra.le(tau_process(p, ctx)?, tau_process(q, ctx)?))
}

/// `F(φ) = ⋁ τ[‖φ‖]`, computed by recursion on `φ`.
///
/// A term realizes `ψ` exactly when its value lies below `¬F(ψ)`, and every
/// element is the value of some term, so `F(ψ → θ) = ¬F(ψ) ∧ F(θ)`.
pub fn forcing_value(
    phi: &Formula,
    universe: Option<&NameUniverse>,
    ctx: &TauContext,
) -> Result<Elem, TauError> {
    let mut memo = BTreeMap::new();
    force_rec(phi, universe, ctx, &mut memo)
}

type Memo = BTreeMap<(AtomKind, Name, Name), Elem>;

fn force_rec(
    phi: &Formula,
    universe: Option<&NameUniverse>,
    ctx: &TauContext,
    memo: &mut Memo,
) -> Result<Elem, TauError> {
    let b = &ctx.algebra;
    match phi {
        Formula::Imp(p, q) => {
            let fp = force_rec(p, universe, ctx, memo)?;
            let fq = force_rec(q, universe, ctx, memo)?;
            Ok(b.meet(b.neg(fp), fq))
        }
        _ => match crate::formulas::falsity_shape(phi, universe)? {
            Shape::Empty => Ok(b.zero()),
            Shape::All => Ok(ctx.sup_all()),
            Shape::Atom { kind, a, b: c, .. } => force_atom(kind, &a, &c, ctx, memo),
            Shape::Imp { .. } => unreachable!("handled above"),
            Shape::Family(v) => {
                let mut acc = b.zero();
                for (_, inst) in v {
                    acc = b.join(acc, force_rec(&inst, universe, ctx, memo)?);
                }
                Ok(acc)
            }
            Shape::HatFamily(v) => {
                let mut acc = b.zero();
                for (beta, inst) in v {
                    let nu = term_rec(&Term::EnumLit(beta), ctx, Enum::AsNumeral)?;
                    acc = b.join(acc, b.meet(nu, force_rec(&inst, universe, ctx, memo)?));
                }
                Ok(acc)
            }
            Shape::Meta(p, _) => Err(TauError::Meta(p)),
        },
    }
}

fn force_atom(
    kind: AtomKind,
    a: &Name,
    c: &Name,
    ctx: &TauContext,
    memo: &mut Memo,
) -> Result<Elem, TauError> {
    let key = (kind, a.clone(), c.clone());
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let b = &ctx.algebra;
    let shape = atom_shape(kind, &a.clone().into(), &c.clone().into())?;
    let Shape::Atom { descriptor, .. } = shape else {
        unreachable!("constant atoms always evaluate")
    };
    let v = match descriptor {
        FalsityDescriptor::Stacks(specs) => {
            let mut acc = b.zero();
            for s in &specs {
                acc = b.join(acc, tau_sup(s, ctx)?);
            }
            acc
        }
        // The recursion descends on the rank pair: each entry is strictly
        // lower in rank than the name it came from.
        FalsityDescriptor::NotIn(entries) => {
            let mut acc = b.zero();
            for (d, sigma) in &entries {
                let f1 = force_atom(AtomKind::Sub, a, d, ctx, memo)?;
                let f2 = force_atom(AtomKind::Sub, d, a, ctx, memo)?;
                let s = tau_sup(sigma, ctx)?;
                acc = b.join(acc, b.meet_all([b.neg(f1), b.neg(f2), s]));
            }
            acc
        }
        FalsityDescriptor::Sub(entries) => {
            let mut acc = b.zero();
            for (d, sigma) in &entries {
                let f = force_atom(AtomKind::NotIn, d, c, ctx, memo)?;
                let s = tau_sup(sigma, ctx)?;
                acc = b.join(acc, b.meet(b.neg(f), s));
            }
            acc
        }
    };
    memo.insert(key, v);
    Ok(v)
}
