//! Names: hereditary finite sets of (name, stack set) pairs.
//!
//! Only three stack-set shapes are representable: all of Π, a fixed term
//! prefix over Π, and finite lists of stacks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::lambda_c::{alpha_eq, alpha_eq_stack, church, Printer, Stack, Term};

/// A set of stacks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackSpec {
    /// Π.
    AllStacks,
    /// `{t₁·…·tₖ·π : π ∈ Π}`; the prefix is nonempty.
    PrefixAll(Vec<Arc<Term>>),
    Finite(Vec<Arc<Stack>>),
}

impl StackSpec {
    pub fn prefix(ts: impl IntoIterator<Item = Term>) -> StackSpec {
        let ts: Vec<_> = ts.into_iter().map(Arc::new).collect();
        assert!(!ts.is_empty(), "a stack prefix is nonempty");
        StackSpec::PrefixAll(ts)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, StackSpec::Finite(v) if v.is_empty())
    }

    /// Membership up to α-equivalence of the terms involved.
    pub fn contains(&self, s: &Stack) -> bool {
        match self {
            StackSpec::AllStacks => true,
            StackSpec::PrefixAll(ts) => {
                let mut cur = s;
                for t in ts {
                    match cur.pop() {
                        Some((u, rest)) if alpha_eq(t, u) => cur = rest,
                        _ => return false,
                    }
                }
                true
            }
            StackSpec::Finite(ss) => ss.iter().any(|x| alpha_eq_stack(x, s)),
        }
    }

    pub fn render(&self, printer: &Printer) -> String {
        match self {
            StackSpec::AllStacks => "Π".into(),
            StackSpec::PrefixAll(ts) => {
                let mut out = String::new();
                for t in ts {
                    out.push_str(
                        &printer.stack(&Stack::Push(t.clone(), Arc::new(Stack::bottom("")))),
                    );
                    out.truncate(out.len() - 2);
                }
                out.push('Π');
                out
            }
            StackSpec::Finite(ss) => {
                let parts: Vec<_> = ss.iter().map(|s| printer.stack(s)).collect();
                format!("{{{}}}", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for StackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&Printer::plain()))
    }
}

struct NameInner {
    /// Sorted, without duplicates.
    entries: Vec<(Name, StackSpec)>,
    rank: usize,
}

/// A name. Equality is structural and ignores entry order.
///
/// Names order by rank first, so sorted collections list low-rank names
/// before the names built from them.
#[derive(Clone)]
pub struct Name(Arc<NameInner>);

impl PartialEq for Name {
    fn eq(&self, other: &Name) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.rank == other.0.rank && self.0.entries == other.0.entries)
    }
}

impl Eq for Name {}

impl Ord for Name {
    fn cmp(&self, other: &Name) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .rank
            .cmp(&other.0.rank)
            .then_with(|| self.0.entries.cmp(&other.0.entries))
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Name) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.rank.hash(state);
        self.0.entries.hash(state);
    }
}

impl Name {
    pub fn new(entries: impl IntoIterator<Item = (Name, StackSpec)>) -> Name {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort();
        entries.dedup();
        let rank = entries.iter().map(|(c, _)| c.rank() + 1).max().unwrap_or(0);
        Name(Arc::new(NameInner { entries, rank }))
    }

    pub fn empty() -> Name {
        Name::new([])
    }

    pub fn entries(&self) -> &[(Name, StackSpec)] {
        &self.0.entries
    }

    /// 1 + the largest child rank; 0 for the empty name.
    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn dom(&self) -> BTreeSet<Name> {
        self.entries().iter().map(|(c, _)| c.clone()).collect()
    }

    pub fn in_dom(&self, a: &Name) -> bool {
        self.entries().iter().any(|(c, _)| c == a)
    }

    /// The stack sets paired with `a`.
    pub fn specs_for<'a>(&'a self, a: &'a Name) -> impl Iterator<Item = &'a StackSpec> + 'a {
        self.entries()
            .iter()
            .filter(move |(c, _)| c == a)
            .map(|(_, s)| s)
    }

    /// Short description: `reish n`, `hat n`, `gimel{...}` when the name has
    /// one of those shapes.
    pub fn describe(&self) -> String {
        let n = self.rank();
        if *self == mk_reish(n) {
            return format!("reish {n}");
        }
        if let Ok(h) = mk_hat(n, n) {
            if *self == h {
                return format!("hat {n}");
            }
        }
        if self
            .entries()
            .iter()
            .all(|(_, s)| *s == StackSpec::AllStacks)
        {
            let parts: Vec<_> = self.entries().iter().map(|(c, _)| c.describe()).collect();
            return format!("gimel{{{}}}", parts.join(", "));
        }
        let parts: Vec<_> = self
            .entries()
            .iter()
            .map(|(c, s)| format!("({}, {})", c.describe(), s))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("hat {n} exceeds the enumeration bound {bound}")]
    HatBound { n: usize, bound: usize },
    #[error("ordered lift expects a map defined on exactly 0..{bound}")]
    LiftDomain { bound: usize },
}

/// `x × Π`.
pub fn mk_gimel(xs: impl IntoIterator<Item = Name>) -> Name {
    Name::new(xs.into_iter().map(|x| (x, StackSpec::AllStacks)))
}

/// `⌐n`, pairing each `⌐m` (m < n) with every stack.
pub fn mk_reish(n: usize) -> Name {
    let mut built = Vec::with_capacity(n + 1);
    for k in 0..=n {
        built.push(mk_gimel(built[..k].iter().cloned()));
    }
    built.pop().unwrap()
}

/// `n̂`, pairing each `m̂` (m < n) with the stacks `ν_m·π`. The literal
/// `ν_m` exists only for `m < enum_bound`.
pub fn mk_hat(n: usize, enum_bound: usize) -> Result<Name, NameError> {
    if n > enum_bound {
        return Err(NameError::HatBound {
            n,
            bound: enum_bound,
        });
    }
    Ok(hat_list(n).pop().unwrap())
}

/// `{a} × Π`.
pub fn sng(a: Name) -> Name {
    mk_gimel([a])
}

/// `{(a, 0̲·π)} ∪ {(b, 1̲·π)}`.
pub fn up(a: Name, b: Name) -> Name {
    Name::new([
        (a, StackSpec::prefix([church(0)])),
        (b, StackSpec::prefix([church(1)])),
    ])
}

/// `up(up(sng a, ⌐0), sng(sng b))`.
pub fn op(a: Name, b: Name) -> Name {
    up(up(sng(a), mk_reish(0)), sng(sng(b)))
}

/// `{(op(c, f(c)), π) : c ∈ dom f}`.
pub fn lift(f: &BTreeMap<Name, Name>) -> Name {
    mk_gimel(f.iter().map(|(c, v)| op(c.clone(), v.clone())))
}

/// `{(op(α̂, f(α)̂), ν_α·π) : α < bound}`; `f` must be defined on exactly
/// `0..bound`. Values of `f` may exceed `bound`.
pub fn ordered_lift(f: &BTreeMap<usize, usize>, bound: usize) -> Result<Name, NameError> {
    if f.len() != bound || f.keys().enumerate().any(|(i, k)| i != *k) {
        return Err(NameError::LiftDomain { bound });
    }
    let top = f.values().copied().max().unwrap_or(0).max(bound);
    let hats = hat_list(top);
    Ok(Name::new(f.iter().map(|(&a, &v)| {
        (
            op(hats[a].clone(), hats[v].clone()),
            StackSpec::prefix([Term::EnumLit(a as u32)]),
        )
    })))
}

/// `[0̂, …, n̂]`.
fn hat_list(n: usize) -> Vec<Name> {
    let mut built: Vec<Name> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        built.push(Name::new(built[..k].iter().enumerate().map(|(m, h)| {
            (h.clone(), StackSpec::prefix([Term::EnumLit(m as u32)]))
        })));
    }
    built
}

/// The successor map `⌐m ↦ ⌐(m+1)` for `m < bound`, as a lift domain.
pub fn reish_succ_map(bound: usize) -> BTreeMap<Name, Name> {
    (0..bound).map(|m| (mk_reish(m), mk_reish(m + 1))).collect()
}

/// `succ` on `0..bound`, for [`ordered_lift`].
pub fn succ_map(bound: usize) -> BTreeMap<usize, usize> {
    (0..bound).map(|m| (m, m + 1)).collect()
}

/// The lift of `𝔥(⌐a, x) = 0 if a = 0, x if a = 1`, with the argument pair
/// encoded as `op(⌐a, x)`, restricted to the given `x`.
pub fn h_lift(xs: impl IntoIterator<Item = Name>) -> Name {
    let zero = mk_reish(0);
    let one = mk_reish(1);
    let mut f = BTreeMap::new();
    for x in xs {
        f.insert(op(zero.clone(), x.clone()), zero.clone());
        f.insert(op(one.clone(), x.clone()), x);
    }
    lift(&f)
}

/// `⟨x < y⟩`: `⌐1` when `x ∈ dom(y)`, else `⌐0`.
pub fn lt_truth(x: &Name, y: &Name) -> Name {
    mk_reish(usize::from(y.in_dom(x)))
}

/// A finite set of names closed under `dom`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameUniverse {
    members: BTreeSet<Name>,
}

impl NameUniverse {
    /// The dom-closure of `names`.
    pub fn closure(names: impl IntoIterator<Item = Name>) -> NameUniverse {
        let mut u = NameUniverse::default();
        for n in names {
            u.insert(n);
        }
        u
    }

    /// Adds `a` and everything hereditarily in its domain.
    pub fn insert(&mut self, a: Name) {
        let mut todo = vec![a];
        while let Some(n) = todo.pop() {
            if self.members.insert(n.clone()) {
                todo.extend(n.dom());
            }
        }
    }

    pub fn contains(&self, a: &Name) -> bool {
        self.members.contains(a)
    }

    /// Members in rank order.
    pub fn iter(&self) -> impl Iterator<Item = &Name> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_dom_closed(&self) -> bool {
        self.members
            .iter()
            .all(|n| n.dom().iter().all(|c| self.members.contains(c)))
    }
}

/// A finite truncation of a class of names standing in for the class in
/// bounded quantifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSegment {
    pub universe: NameUniverse,
    /// The class this segment truncates, e.g. `reish Ord`.
    pub class: &'static str,
    pub bound: usize,
}

/// `{⌐α : α < bound}`, standing in for `⌐Ord`.
pub fn reish_ord_segment(bound: usize) -> ClassSegment {
    ClassSegment {
        universe: NameUniverse::closure((0..bound).map(mk_reish)),
        class: "reish Ord",
        bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    NotEps,
    Neq,
    NotIn,
    Sub,
}

/// The falsity value of an atomic formula, one level deep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FalsityDescriptor {
    /// The union of the listed stack sets; no sets means ∅.
    Stacks(Vec<StackSpec>),
    /// `‖a ∉ b‖`: for each `(c, σ) ∈ b`, the stacks `u·u'·π` with
    /// `u ⊩ a ⊆ c`, `u' ⊩ c ⊆ a`, `π ∈ σ`.
    NotIn(Vec<(Name, StackSpec)>),
    /// `‖a ⊆ b‖`: for each `(c, σ) ∈ a`, the stacks `u·π` with
    /// `u ⊩ c ∉ b`, `π ∈ σ`.
    Sub(Vec<(Name, StackSpec)>),
}

impl FalsityDescriptor {
    /// True when the descriptor certainly denotes ∅.
    pub fn is_empty(&self) -> bool {
        match self {
            FalsityDescriptor::Stacks(v) => v.iter().all(StackSpec::is_empty),
            FalsityDescriptor::NotIn(v) | FalsityDescriptor::Sub(v) => {
                v.iter().all(|(_, s)| s.is_empty())
            }
        }
    }
}

pub fn falsity_atomic(atom: AtomKind, a: &Name, b: &Name) -> FalsityDescriptor {
    match atom {
        AtomKind::NotEps => FalsityDescriptor::Stacks(b.specs_for(a).cloned().collect()),
        AtomKind::Neq => FalsityDescriptor::Stacks(if a == b {
            vec![StackSpec::AllStacks]
        } else {
            vec![]
        }),
        AtomKind::NotIn => FalsityDescriptor::NotIn(b.entries().to_vec()),
        AtomKind::Sub => FalsityDescriptor::Sub(a.entries().to_vec()),
    }
}
