use std::collections::BTreeMap;
use std::sync::Arc;

use super::{desugar, Formula, FunDef, LiftKind, NameExpr, Range, Sugar};
use crate::lambda_c::{ident, ParseError};
use crate::names::{lift, lt_truth, mk_gimel, mk_hat, mk_reish, ordered_lift, AtomKind, Name};

/// Function symbols and limits available to the formula parser.
#[derive(Clone, Debug)]
pub struct FormulaEnv {
    pub funs: BTreeMap<String, Arc<FunDef>>,
    /// Largest `n` for which `hat n` may be written.
    pub hat_bound: usize,
}

impl Default for FormulaEnv {
    fn default() -> FormulaEnv {
        FormulaEnv {
            funs: BTreeMap::new(),
            hat_bound: 64,
        }
    }
}

impl FormulaEnv {
    pub fn define(&mut self, f: FunDef) {
        self.funs.insert(f.id.to_string(), Arc::new(f));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Caret,
    Arrow,
    MapsTo,
    Bang,
    Neq,
    Sim,
    NotSim,
    Equals,
    And,
    Or,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |j: usize| chars.get(j).map(|c| c.1);
    while i < chars.len() {
        let (pos, c) = chars[i];
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '^' => (Tok::Caret, 1),
            '→' => (Tok::Arrow, 1),
            '∧' => (Tok::And, 1),
            '∨' => (Tok::Or, 1),
            '≃' => (Tok::Sim, 1),
            '≄' => (Tok::NotSim, 1),
            '≠' => (Tok::Neq, 1),
            '⊥' => (Tok::Ident("bot".into()), 1),
            '⊤' => (Tok::Ident("top".into()), 1),
            '∀' => (Tok::Ident("all".into()), 1),
            '∃' => (Tok::Ident("ex".into()), 1),
            '¬' => (Tok::Ident("not".into()), 1),
            '-' if at(i + 1) == Some('>') => (Tok::Arrow, 2),
            '!' if at(i + 1) == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            '~' if at(i + 1) == Some('=') => (Tok::Sim, 2),
            '~' if at(i + 1) == Some('/') && at(i + 2) == Some('=') => (Tok::NotSim, 3),
            '=' => (Tok::Equals, 1),
            '/' if at(i + 1) == Some('\\') => (Tok::And, 2),
            '\\' if at(i + 1) == Some('/') => (Tok::Or, 2),
            '|' if at(i + 1) == Some('-') && at(i + 2) == Some('>') => (Tok::MapsTo, 3),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().map(|c| c.1).collect();
                let n = s.parse().map_err(|_| ParseError {
                    pos,
                    msg: "number out of range".into(),
                })?;
                (Tok::Num(n), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].1.is_ascii_alphanumeric()
                        || chars[j].1 == '_'
                        || chars[j].1 == '\'')
                {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().map(|c| c.1).collect()), j - i)
            }
            other => {
                return Err(ParseError {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const KEYWORDS: &[&str] = &[
    "all", "ex", "top", "bot", "not", "eps", "in", "sub", "sub_eps", "reish", "hat", "gimel",
    "sng", "up", "op", "ltt", "lift", "olift", "rord",
];

const MACROS: &[&str] = &["ExtFun", "EpsFun", "EpsSurj", "NEAC"];

struct P<'e> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    env: &'e FormulaEnv,
}

impl P<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.toks[self.i].1,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn num(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    /// `n` or `(n)`.
    fn bound(&mut self) -> Result<usize, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let n = self.num()?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(n)
        } else {
            self.num()
        }
    }

    fn var_name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) if !KEYWORDS.contains(&x.as_str()) => {
                self.bump();
                Ok(x)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<Sugar, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Sugar::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Sugar, ParseError> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.disj()?;
            return Ok(Sugar::Or(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Sugar, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = self.conj()?;
            return Ok(Sugar::And(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Sugar, ParseError> {
        if self.is_kw("not") {
            self.bump();
            return Ok(Sugar::Not(Box::new(self.unary()?)));
        }
        if self.is_kw("all") || self.is_kw("ex") {
            return self.quantifier();
        }
        self.primary()
    }

    fn quantifier(&mut self) -> Result<Sugar, ParseError> {
        let universal = self.is_kw("all");
        self.bump();
        let x = ident(&self.var_name()?);
        let mut range = Range::All;
        if *self.peek() == Tok::Caret {
            self.bump();
            range = self.range()?;
        } else if self.is_kw("eps") {
            self.bump();
            range = Range::Eps(self.name_expr()?);
        }
        self.expect(Tok::Dot, "`.` after the quantified variable")?;
        let body = Box::new(self.formula()?);
        if universal {
            return Ok(Sugar::Forall(x, range, body));
        }
        match range {
            Range::All => Ok(Sugar::Exists(x, None, body)),
            Range::Eps(a) => Ok(Sugar::Exists(x, Some(a), body)),
            _ => self.err("bounded `ex` supports only `ex x eps a.`"),
        }
    }

    fn range(&mut self) -> Result<Range, ParseError> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "gimel" => {
                self.bump();
                Ok(Range::Gimel(self.name_set()?))
            }
            Tok::Ident(k) if k == "hat" => {
                self.bump();
                let n = self.bound()?;
                if n > self.env.hat_bound {
                    return self.err(format!("hat {n} exceeds the enumeration bound"));
                }
                Ok(Range::Hat(n))
            }
            Tok::Ident(k) if k == "rord" => {
                self.bump();
                Ok(Range::ReishOrd(self.bound()?))
            }
            _ => self.err("expected `gimel{...}`, `hat(n)` or `rord(n)`"),
        }
    }

    fn name_set(&mut self) -> Result<Vec<Name>, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let out = if *self.peek() != Tok::RBrace {
            self.name_items()?
        } else {
            Vec::new()
        };
        self.expect(Tok::RBrace, "`}`")?;
        Ok(out)
    }

    /// Comma-separated closed names; `reish i..j` and `hat i..j` stand for
    /// the members with indices in `[i, j)`.
    fn name_items(&mut self) -> Result<Vec<Name>, ParseError> {
        let mut out = Vec::new();
        loop {
            let range = match (
                self.peek(),
                &self.toks[(self.i + 2).min(self.toks.len() - 1)].0,
            ) {
                (Tok::Ident(k), Tok::Dot) if k == "reish" || k == "hat" => Some(k.clone()),
                _ => None,
            };
            match range {
                Some(k) => {
                    self.bump();
                    let lo = self.num()?;
                    self.expect(Tok::Dot, "`..`")?;
                    self.expect(Tok::Dot, "`..`")?;
                    let hi = self.num()?;
                    for n in lo..hi {
                        out.push(if k == "reish" {
                            mk_reish(n)
                        } else {
                            match mk_hat(n, self.env.hat_bound) {
                                Ok(h) => h,
                                Err(err) => return self.err(err.to_string()),
                            }
                        });
                    }
                }
                None => out.push(self.closed_name()?),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn closed_name(&mut self) -> Result<Name, ParseError> {
        let e = self.name_expr()?;
        match e.eval() {
            Ok(n) => Ok(n),
            Err(err) => self.err(format!("expected a closed name: {err}")),
        }
    }

    fn primary(&mut self) -> Result<Sugar, ParseError> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "top" => {
                self.bump();
                Ok(Sugar::Top)
            }
            Tok::Ident(k) if k == "bot" => {
                self.bump();
                Ok(Sugar::Bot)
            }
            Tok::Ident(k) if MACROS.contains(&k.as_str()) => self.macro_call(&k),
            Tok::Ident(k) if k.starts_with(|c: char| c.is_ascii_uppercase()) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args = self.expr_list()?;
                    self.expect(Tok::RParen, "`)`")?;
                }
                Ok(Sugar::Meta(ident(&k), args))
            }
            Tok::LParen => {
                let save = self.i;
                self.bump();
                if let Ok(f) = self.formula() {
                    if *self.peek() == Tok::RParen {
                        self.bump();
                        if !self.at_relation() {
                            return Ok(f);
                        }
                    }
                }
                self.i = save;
                self.relation()
            }
            _ => self.relation(),
        }
    }

    fn expr_list(&mut self) -> Result<Vec<NameExpr>, ParseError> {
        let mut out = vec![self.name_expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.name_expr()?);
        }
        Ok(out)
    }

    fn macro_call(&mut self, k: &str) -> Result<Sugar, ParseError> {
        self.bump();
        if k == "NEAC" {
            return Ok(Sugar::Neac);
        }
        self.expect(Tok::LParen, "`(`")?;
        let args = self.expr_list()?;
        self.expect(Tok::RParen, "`)`")?;
        let want = if k == "EpsSurj" { 3 } else { 2 };
        if args.len() != want {
            return self.err(format!("{k} takes {want} arguments"));
        }
        let mut a = args.into_iter();
        let (f, x) = (a.next().unwrap(), a.next().unwrap());
        Ok(match k {
            "ExtFun" => Sugar::ExtFun(f, x),
            "EpsFun" => Sugar::EpsFun(f, x),
            _ => Sugar::EpsSurj(f, x, a.next().unwrap()),
        })
    }

    fn at_relation(&self) -> bool {
        match self.peek() {
            Tok::Bang | Tok::Neq | Tok::Sim | Tok::NotSim | Tok::Equals => true,
            Tok::Ident(k) => matches!(k.as_str(), "eps" | "in" | "sub" | "sub_eps"),
            _ => false,
        }
    }

    fn relation(&mut self) -> Result<Sugar, ParseError> {
        let a = self.name_expr()?;
        let rel = self.bump();
        let rel = match rel {
            Tok::Bang => match self.bump() {
                Tok::Ident(k) if k == "eps" => "!eps",
                Tok::Ident(k) if k == "in" => "!in",
                _ => return self.err("expected `eps` or `in` after `!`"),
            },
            Tok::Neq => "!=",
            Tok::Sim => "~=",
            Tok::NotSim => "~/=",
            Tok::Equals => "=",
            Tok::Ident(k) if k == "eps" => "eps",
            Tok::Ident(k) if k == "in" => "in",
            Tok::Ident(k) if k == "sub" => "sub",
            Tok::Ident(k) if k == "sub_eps" => "sub_eps",
            _ => {
                self.i -= 1;
                return self.err("expected a relation");
            }
        };
        let b = self.name_expr()?;
        Ok(match rel {
            "!eps" => Sugar::Atom(AtomKind::NotEps, a, b),
            "!=" => Sugar::Atom(AtomKind::Neq, a, b),
            "!in" => Sugar::Atom(AtomKind::NotIn, a, b),
            "sub" => Sugar::Atom(AtomKind::Sub, a, b),
            "eps" => Sugar::Eps(a, b),
            "in" => Sugar::In(a, b),
            "=" => Sugar::Eq(a, b),
            "~=" => Sugar::Sim(a, b),
            "~/=" => Sugar::NotSim(a, b),
            _ => Sugar::SubEps(a, b),
        })
    }

    /// Constructors take a fixed number of arguments, so nesting needs no
    /// parentheses: `op sng x reish 1`.
    fn name_expr(&mut self) -> Result<NameExpr, ParseError> {
        let tok = self.peek().clone();
        let e = match tok {
            Tok::LParen => {
                self.bump();
                let e = self.name_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(e);
            }
            Tok::Ident(k) => k,
            _ => return self.err("expected a name expression"),
        };
        let konst = |n: Name| Ok(NameExpr::Const(n));
        match e.as_str() {
            "reish" => {
                self.bump();
                let n = self.num()?;
                konst(mk_reish(n))
            }
            "hat" => {
                self.bump();
                let n = self.num()?;
                match mk_hat(n, self.env.hat_bound) {
                    Ok(h) => konst(h),
                    Err(err) => self.err(err.to_string()),
                }
            }
            "gimel" => {
                self.bump();
                let s = self.name_set()?;
                konst(mk_gimel(s))
            }
            "sng" => {
                self.bump();
                Ok(NameExpr::Sng(Box::new(self.name_expr()?)).simplify())
            }
            "up" | "op" => {
                self.bump();
                let a = Box::new(self.name_expr()?);
                let b = Box::new(self.name_expr()?);
                Ok(if e == "up" {
                    NameExpr::Up(a, b)
                } else {
                    NameExpr::Op(a, b)
                }
                .simplify())
            }
            "ltt" => {
                self.bump();
                let a = self.closed_name()?;
                let b = self.closed_name()?;
                konst(lt_truth(&a, &b))
            }
            "lift" => {
                self.bump();
                let map = self.fun_map()?;
                konst(lift(&map))
            }
            "olift" => {
                self.bump();
                let which = self
                    .var_name()
                    .or_else(|_| self.err("expected `succ` or `id`"))?;
                let n = self.num()?;
                let map: BTreeMap<usize, usize> = match which.as_str() {
                    "succ" => (0..n).map(|m| (m, m + 1)).collect(),
                    "id" => (0..n).map(|m| (m, m)).collect(),
                    _ => return self.err("expected `succ` or `id`"),
                };
                match ordered_lift(&map, n) {
                    Ok(h) => konst(h),
                    Err(err) => self.err(err.to_string()),
                }
            }
            kw if KEYWORDS.contains(&kw) => self.err(format!("unexpected `{kw}`")),
            _ => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    if let Some(f) = self.env.funs.get(&e).cloned() {
                        self.bump();
                        let a = self.name_expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        return Ok(NameExpr::Apply(f, Box::new(a)).simplify());
                    }
                    if !e.starts_with(|c: char| c.is_ascii_uppercase()) {
                        self.i -= 1;
                        return self.err(format!("unknown function `{e}`"));
                    }
                }
                Ok(NameExpr::Var(ident(&e)))
            }
        }
    }

    /// `{a -> b, ...}` or with `|->`.
    pub fn fun_map(&mut self) -> Result<BTreeMap<Name, Name>, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut map = BTreeMap::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let a = self.closed_name()?;
                if !matches!(self.bump(), Tok::Arrow | Tok::MapsTo) {
                    self.i -= 1;
                    return self.err("expected `->`");
                }
                let b = self.closed_name()?;
                if map.insert(a, b).is_some() {
                    return self.err("duplicate argument in function table");
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(map)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

fn parser<'e>(text: &str, env: &'e FormulaEnv) -> Result<P<'e>, ParseError> {
    Ok(P {
        toks: lex(text)?,
        i: 0,
        env,
    })
}

/// Parses a formula with its abbreviations intact.
pub fn parse_sugar(text: &str, env: &FormulaEnv) -> Result<Sugar, ParseError> {
    let mut p = parser(text, env)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses and desugars.
pub fn parse_formula_with(text: &str, env: &FormulaEnv) -> Result<Formula, ParseError> {
    Ok(desugar(&parse_sugar(text, env)?))
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &FormulaEnv::default())
}

pub fn parse_name_expr(text: &str, env: &FormulaEnv) -> Result<NameExpr, ParseError> {
    let mut p = parser(text, env)?;
    let e = p.name_expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a comma-separated list of closed names, with `reish i..j` and
/// `hat i..j` ranges.
pub fn parse_name_list(text: &str, env: &FormulaEnv) -> Result<Vec<Name>, ParseError> {
    let mut p = parser(text, env)?;
    if *p.peek() == Tok::End {
        return Ok(Vec::new());
    }
    let v = p.name_items()?;
    p.finish()?;
    Ok(v)
}

/// Parses `{a -> b, ...}` into a plain lift table.
pub fn parse_fun_table(text: &str, env: &FormulaEnv) -> Result<BTreeMap<Name, Name>, ParseError> {
    let mut p = parser(text, env)?;
    let m = p.fun_map()?;
    p.finish()?;
    Ok(m)
}

/// A plain lift from a parsed table.
pub fn plain_fun(id: &str, map: BTreeMap<Name, Name>) -> FunDef {
    FunDef {
        id: ident(id),
        kind: LiftKind::Plain,
        map,
    }
}
