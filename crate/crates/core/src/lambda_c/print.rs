use super::{alpha_eq, Process, Stack, Term};

/// Named terms printed by name instead of by structure.
pub type Abbreviations = Vec<(String, Term)>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    Fun,
    Arg,
}

/// Minimal-parenthesis printer.
///
/// Application is left-associative and an abstraction body extends to the
/// end of its enclosing expression, so parentheses appear only around an
/// abstraction in function or argument position and around an application
/// in argument position. Compound stack entries are parenthesised.
#[derive(Clone, Default)]
pub struct Printer {
    names: Abbreviations,
}

impl Printer {
    pub fn plain() -> Printer {
        Printer::default()
    }

    /// Subterms α-equal to a listed term print as its name.
    pub fn with_names(names: Abbreviations) -> Printer {
        Printer { names }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(t, Pos::Top, &mut out);
        out
    }

    pub fn stack(&self, s: &Stack) -> String {
        let mut out = String::new();
        self.write_stack(s, &mut out);
        out
    }

    pub fn process(&self, p: &Process) -> String {
        let mut out = String::new();
        self.write_term(&p.head, Pos::Top, &mut out);
        out.push_str(" ⋆ ");
        self.write_stack(&p.stack, &mut out);
        out
    }

    fn abbreviation(&self, t: &Term) -> Option<&str> {
        if self.names.is_empty() || !matches!(t, Term::App(..) | Term::Abs(..)) {
            return None;
        }
        self.names
            .iter()
            .find(|(_, n)| alpha_eq(n, t))
            .map(|(name, _)| name.as_str())
    }

    fn write_term(&self, t: &Term, pos: Pos, out: &mut String) {
        if let Some(name) = self.abbreviation(t) {
            out.push_str(name);
            return;
        }
        match t {
            Term::Var(x) | Term::Opaque(x) => out.push_str(x),
            Term::Cc => out.push_str("cc"),
            Term::Instr(x) => {
                out.push('#');
                out.push_str(x);
            }
            Term::EnumLit(n) => {
                out.push_str("nu");
                out.push_str(&n.to_string());
            }
            Term::Kont(s) => {
                out.push_str("k[");
                self.write_stack(s, out);
                out.push(']');
            }
            Term::Abs(x, b) => {
                let paren = pos != Pos::Top;
                if paren {
                    out.push('(');
                }
                out.push('\\');
                out.push_str(x);
                out.push('.');
                self.write_term(b, Pos::Top, out);
                if paren {
                    out.push(')');
                }
            }
            Term::App(f, a) => {
                let paren = pos == Pos::Arg;
                if paren {
                    out.push('(');
                }
                self.write_term(f, Pos::Fun, out);
                out.push(' ');
                self.write_term(a, Pos::Arg, out);
                if paren {
                    out.push(')');
                }
            }
        }
    }

    fn write_stack(&self, s: &Stack, out: &mut String) {
        match s {
            Stack::Bottom(b) => {
                out.push_str("w_");
                out.push_str(b);
            }
            Stack::OpaqueTail(r) => {
                out.push('?');
                out.push_str(r);
            }
            Stack::Push(t, rest) => {
                // Arg position parenthesises exactly the compound terms.
                self.write_term(t, Pos::Arg, out);
                out.push('.');
                self.write_stack(rest, out);
            }
        }
    }
}
