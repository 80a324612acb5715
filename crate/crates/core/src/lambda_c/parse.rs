use std::sync::Arc;

use super::{ident, Process, Stack, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    KontOpen,
    RBracket,
    Star,
    Cc,
    Nu(u32),
    Instr(String),
    Tail(String),
    Ident(String),
    End,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let read_ident = |mut j: usize| -> (String, usize) {
        let mut s = String::new();
        while j < chars.len() && is_ident_char(chars[j].1) {
            s.push(chars[j].1);
            j += 1;
        }
        (s, j)
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '\\' | 'λ' => {
                toks.push((Tok::Lambda, pos));
                i += 1;
            }
            '.' | '·' => {
                toks.push((Tok::Dot, pos));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, pos));
                i += 1;
            }
            '*' | '⋆' => {
                toks.push((Tok::Star, pos));
                i += 1;
            }
            '#' | '?' => {
                let (name, j) = read_ident(i + 1);
                if name.is_empty() {
                    return Err(ParseError {
                        pos,
                        msg: format!("expected identifier after `{c}`"),
                    });
                }
                toks.push((
                    if c == '#' {
                        Tok::Instr(name)
                    } else {
                        Tok::Tail(name)
                    },
                    pos,
                ));
                i = j;
            }
            c if is_ident_start(c) => {
                let (name, j) = read_ident(i);
                i = j;
                if name == "k" && i < chars.len() && chars[i].1 == '[' {
                    toks.push((Tok::KontOpen, pos));
                    i += 1;
                } else if name == "cc" {
                    toks.push((Tok::Cc, pos));
                } else if let Some(n) = name
                    .strip_prefix("nu")
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                {
                    let n = n.parse().map_err(|_| ParseError {
                        pos,
                        msg: "enumeration index out of range".into(),
                    })?;
                    toks.push((Tok::Nu(n), pos));
                } else {
                    toks.push((Tok::Ident(name), pos));
                }
            }
            other => {
                return Err(ParseError {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
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
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Cc | Tok::Nu(_) | Tok::Instr(_) | Tok::LParen | Tok::KontOpen
        )
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.abs();
        }
        if !self.starts_atom() {
            return self.err("expected a term");
        }
        let mut t = self.atom()?;
        loop {
            if self.starts_atom() {
                let a = self.atom()?;
                t = Term::App(Arc::new(t), Arc::new(a));
            } else if *self.peek() == Tok::Lambda {
                let a = self.abs()?;
                return Ok(Term::App(Arc::new(t), Arc::new(a)));
            } else {
                return Ok(t);
            }
        }
    }

    fn abs(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda, "`\\`")?;
        let Tok::Ident(x) = self.peek().clone() else {
            return self.err("expected a bound variable");
        };
        self.bump();
        self.expect(Tok::Dot, "`.` after the bound variable")?;
        let body = self.term()?;
        Ok(Term::Abs(ident(&x), Arc::new(body)))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Tok::Ident(x) => Ok(Term::Var(ident(&x))),
            Tok::Cc => Ok(Term::Cc),
            Tok::Nu(n) => Ok(Term::EnumLit(n)),
            Tok::Instr(x) => Ok(Term::Instr(ident(&x))),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::KontOpen => {
                let s = self.stack()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Term::Kont(Arc::new(s)))
            }
            _ => self.err("expected a term"),
        }
    }

    fn stack(&mut self) -> Result<Stack, ParseError> {
        if let Tok::Tail(r) = self.peek().clone() {
            self.bump();
            return Ok(Stack::OpaqueTail(ident(&r)));
        }
        if let Tok::Ident(x) = self.peek().clone() {
            if let Some(b) = x.strip_prefix("w_") {
                if matches!(
                    self.peek_at(1),
                    Tok::End | Tok::RBracket | Tok::RParen | Tok::Star
                ) {
                    if b.is_empty() {
                        return self.err("empty bottom name");
                    }
                    self.bump();
                    return Ok(Stack::Bottom(ident(b)));
                }
            }
        }
        let t = self.term()?;
        self.expect(Tok::Dot, "`.` after a stack entry")?;
        let rest = self.stack()?;
        Ok(Stack::Push(Arc::new(t), Arc::new(rest)))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        i: 0,
    })
}

/// Parses `t ::= ident | cc | #ident | nuN | t t | \x.t | k[π]`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = parser(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `π ::= w_ident | ?ident | t . π`.
pub fn parse_stack(text: &str) -> Result<Stack, ParseError> {
    let mut p = parser(text)?;
    let s = p.stack()?;
    p.finish()?;
    Ok(s)
}

/// Parses `t ⋆ π`; `*` is accepted for `⋆`.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let mut p = parser(text)?;
    let t = p.term()?;
    p.expect(Tok::Star, "`⋆`")?;
    let s = p.stack()?;
    p.finish()?;
    Ok(Process {
        head: Arc::new(t),
        stack: Arc::new(s),
    })
}
