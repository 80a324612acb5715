//! Finite Boolean algebras and the realizability algebra they induce.
//!
//! Elements are dense ids `0..size`. In a powerset algebra the id of a set
//! is its bitmask, so `zero` is id 0 and `one` is the largest id.

mod chain;
mod tau;

use std::collections::BTreeMap;
use std::fmt;

pub use chain::{
    algebra_delta_chain_condition, ba_delta_cc, uniform_delta_chain_condition, AntichainVerdict,
    ChainVerdict,
};
pub use tau::{
    forcing_value, pole_decide, preorder_decide, tau_process, tau_stack, tau_sup, tau_term,
    PoleVerdict, TauContext, TauError,
};

pub type Elem = usize;

#[derive(Clone, PartialEq, Eq)]
pub struct BoolAlg {
    names: Vec<String>,
    meet: Vec<Vec<Elem>>,
    join: Vec<Vec<Elem>>,
    neg: Vec<Elem>,
    zero: Elem,
    one: Elem,
}

impl fmt::Debug for BoolAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoolAlg")
            .field("elements", &self.names)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("missing table entry: {0}")]
    Incomplete(String),
    #[error("not a Boolean algebra: {0}")]
    Law(String),
    #[error("powerset algebras are limited to 16 atoms, got {0}")]
    TooLarge(usize),
}

impl BoolAlg {
    /// The powerset of `{a1, …, an}`.
    pub fn powerset(atoms: usize) -> Result<BoolAlg, AlgebraError> {
        if atoms > 16 {
            return Err(AlgebraError::TooLarge(atoms));
        }
        let size = 1usize << atoms;
        let full = size - 1;
        let names = (0..size)
            .map(|m| match m {
                0 => "0".to_string(),
                m if m == full => "1".to_string(),
                m => (0..atoms)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| format!("a{}", i + 1))
                    .collect(),
            })
            .collect();
        Ok(BoolAlg {
            names,
            meet: (0..size)
                .map(|a| (0..size).map(|b| a & b).collect())
                .collect(),
            join: (0..size)
                .map(|a| (0..size).map(|b| a | b).collect())
                .collect(),
            neg: (0..size).map(|a| full & !a).collect(),
            zero: 0,
            one: full,
        })
    }

    /// `atomsN` for a powerset algebra, else the text of an algebra file.
    pub fn from_spec_or_text(s: &str) -> Result<BoolAlg, AlgebraError> {
        if let Some(n) = s.strip_prefix("atoms").and_then(|d| d.parse().ok()) {
            return BoolAlg::powerset(n);
        }
        BoolAlg::parse(s)
    }

    /// Reads either `atoms n`, or explicit tables:
    ///
    /// ```text
    /// elem 0 p q 1
    /// zero 0
    /// one 1
    /// meet p q = 0
    /// ```
    ///
    /// Statements are separated by newlines or `;`, and `#` starts a
    /// comment. Meets may be given in one order only. Missing `join` and
    /// `neg` tables are derived from the meet order.
    pub fn parse(text: &str) -> Result<BoolAlg, AlgebraError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, Elem> = BTreeMap::new();
        let mut zero = None;
        let mut one = None;
        let mut meets = Vec::new();
        let mut joins = Vec::new();
        let mut negs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.split('#').next().unwrap_or("");
            for stmt in line.split(';') {
                let words: Vec<&str> = stmt.split_whitespace().collect();
                let syntax = |msg: &str| AlgebraError::Syntax {
                    line: line_no,
                    msg: msg.to_string(),
                };
                match words.as_slice() {
                    [] => {}
                    ["atoms", n] => {
                        if !names.is_empty() || !meets.is_empty() {
                            return Err(syntax("`atoms` must be the only statement"));
                        }
                        let n = n
                            .parse()
                            .map_err(|_| syntax("expected a number of atoms"))?;
                        let rest = text
                            .lines()
                            .skip(line_no)
                            .any(|l| !l.split('#').next().unwrap_or("").trim().is_empty());
                        if rest {
                            return Err(syntax("`atoms` must be the only statement"));
                        }
                        return BoolAlg::powerset(n);
                    }
                    ["elem", xs @ ..] if !xs.is_empty() => {
                        for x in xs {
                            if index.insert(x.to_string(), names.len()).is_some() {
                                return Err(syntax(&format!("element `{x}` declared twice")));
                            }
                            names.push(x.to_string());
                        }
                    }
                    ["zero", x] => zero = Some(x.to_string()),
                    ["one", x] => one = Some(x.to_string()),
                    ["meet", a, b, "=", c] => {
                        meets.push((a.to_string(), b.to_string(), c.to_string()))
                    }
                    ["join", a, b, "=", c] => {
                        joins.push((a.to_string(), b.to_string(), c.to_string()))
                    }
                    ["neg", a, "=", b] => negs.push((a.to_string(), b.to_string())),
                    _ => return Err(syntax(&format!("cannot read `{}`", stmt.trim()))),
                }
            }
        }
        let look = |x: &str| {
            index
                .get(x)
                .copied()
                .ok_or_else(|| AlgebraError::UnknownElement(x.to_string()))
        };
        let zero = look(&zero.ok_or_else(|| AlgebraError::Incomplete("no `zero`".into()))?)?;
        let one = look(&one.ok_or_else(|| AlgebraError::Incomplete("no `one`".into()))?)?;
        let n = names.len();
        let table = |rows: &[(String, String, String)], what: &str, zero: Elem, one: Elem| {
            let mut t = vec![vec![None; n]; n];
            #[allow(clippy::needless_range_loop)]
            for a in 0..n {
                // Laws with the bounds need not be written out.
                let (ident_el, absorb) = if what == "meet" {
                    (one, zero)
                } else {
                    (zero, one)
                };
                t[a][ident_el] = Some(a);
                t[ident_el][a] = Some(a);
                t[a][absorb] = Some(absorb);
                t[absorb][a] = Some(absorb);
                t[a][a] = Some(a);
            }
            for (a, b, c) in rows {
                let (a, b, c) = (look(a)?, look(b)?, look(c)?);
                for (x, y) in [(a, b), (b, a)] {
                    if let Some(old) = t[x][y] {
                        if old != c {
                            return Err(AlgebraError::Law(format!(
                                "{what} {} {} given as both {} and {}",
                                names[x], names[y], names[old], names[c]
                            )));
                        }
                    }
                    t[x][y] = Some(c);
                }
            }
            let mut out = vec![vec![0; n]; n];
            for a in 0..n {
                for b in 0..n {
                    out[a][b] = t[a][b].ok_or_else(|| {
                        AlgebraError::Incomplete(format!("{what} {} {}", names[a], names[b]))
                    })?;
                }
            }
            Ok(out)
        };
        let meet = table(&meets, "meet", zero, one)?;
        let le = |a: Elem, b: Elem| meet[a][b] == a;
        let join = if joins.is_empty() {
            let mut j = vec![vec![0; n]; n];
            for a in 0..n {
                for b in 0..n {
                    let ubs: Vec<Elem> = (0..n).filter(|&c| le(a, c) && le(b, c)).collect();
                    j[a][b] = *ubs
                        .iter()
                        .find(|&&c| ubs.iter().all(|&d| le(c, d)))
                        .ok_or_else(|| {
                            AlgebraError::Law(format!("{} and {} have no join", names[a], names[b]))
                        })?;
                }
            }
            j
        } else {
            table(&joins, "join", zero, one)?
        };
        let neg = if negs.is_empty() {
            (0..n)
                .map(|a| {
                    (0..n)
                        .find(|&b| meet[a][b] == zero && join[a][b] == one)
                        .ok_or_else(|| AlgebraError::Law(format!("{} has no complement", names[a])))
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            let mut v = vec![None; n];
            for (a, b) in &negs {
                v[look(a)?] = Some(look(b)?);
            }
            v.into_iter()
                .enumerate()
                .map(|(a, b)| {
                    b.ok_or_else(|| AlgebraError::Incomplete(format!("neg {}", names[a])))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        let alg = BoolAlg {
            names,
            meet,
            join,
            neg,
            zero,
            one,
        };
        alg.check_laws()?;
        Ok(alg)
    }

    /// Checks the Boolean-algebra laws on the full tables.
    pub fn check_laws(&self) -> Result<(), AlgebraError> {
        let n = self.size();
        let fail = |law: &str, xs: &[Elem]| {
            let names: Vec<_> = xs.iter().map(|&x| self.names[x].as_str()).collect();
            Err(AlgebraError::Law(format!(
                "{law} fails at {}",
                names.join(", ")
            )))
        };
        if self.zero == self.one && n > 1 {
            return fail("zero ≠ one", &[self.zero]);
        }
        for a in 0..n {
            let na = self.neg[a];
            if self.meet(a, na) != self.zero || self.join(a, na) != self.one {
                return fail("complement", &[a]);
            }
            if self.meet(a, self.one) != a || self.join(a, self.zero) != a {
                return fail("bounds", &[a]);
            }
            for b in 0..n {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return fail("commutativity", &[a, b]);
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return fail("absorption", &[a, b]);
                }
                for c in 0..n {
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        return fail("associativity", &[a, b, c]);
                    }
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return fail("distributivity", &[a, b, c]);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a][b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a][b]
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }

    pub fn le(&self, a: Elem, b: Elem) -> bool {
        self.meet(a, b) == a
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.one, |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.zero, |acc, x| self.join(acc, x))
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&a| {
                a != self.zero
                    && self
                        .elements()
                        .all(|b| b == self.zero || b == a || !self.le(b, a))
            })
            .collect()
    }
}
