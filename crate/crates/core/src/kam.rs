//! The Krivine abstract machine.
//!
//! Weak head reduction on processes: push, grab, save, restore, plus
//! registered instruction rules. χ is the only instruction shipped.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::lambda_c::{ident, substitute_arc, Ident, Printer, Process, Stack, Term};

/// Which transition fired.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Push,
    Grab,
    Save,
    Restore,
    Instr(Ident),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Push => f.write_str("push"),
            Rule::Grab => f.write_str("grab"),
            Rule::Save => f.write_str("save"),
            Rule::Restore => f.write_str("restore"),
            Rule::Instr(x) => write!(f, "#{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Next(Process, Rule),
    Stuck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// No rule applies and nothing opaque is in the way.
    ReachedNormal,
    /// No rule applies because an opaque head or tail blocks it.
    StuckOnOpaque,
    OutOfFuel,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::ReachedNormal => "reached-normal",
            Status::StuckOnOpaque => "stuck-on-opaque",
            Status::OutOfFuel => "out-of-fuel",
        })
    }
}

/// Consecutive processes are related by exactly one rule; `rules[i]` takes
/// `steps[i]` to `steps[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Process>,
    pub rules: Vec<Rule>,
    pub status: Status,
}

impl Trace {
    pub fn last(&self) -> &Process {
        self.steps.last().expect("a trace starts with its input")
    }

    /// Number of transitions taken.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// One `head ⋆ stack` line per process.
    pub fn render(&self, printer: &Printer) -> Vec<String> {
        self.steps.iter().map(|p| printer.process(p)).collect()
    }
}

/// An instruction rule: given the stack below the instruction, the next
/// process, or `None` when the rule does not apply.
pub type InstrRule = Arc<dyn Fn(&Stack) -> Option<Process> + Send + Sync>;

#[derive(Clone, Default)]
pub struct Machine {
    rules: BTreeMap<Ident, InstrRule>,
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Machine")
            .field("instructions", &self.rules.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// `χ ⋆ ν_α·ν_β·t·s·r·π` goes to `t`, `s` or `r` on `π` as α is below,
/// equal to, or above β.
pub fn chi_rule(stack: &Stack) -> Option<Process> {
    let mut it = stack.terms();
    let a = it.next()?;
    let b = it.next()?;
    let t = it.next()?;
    let s = it.next()?;
    let r = it.next()?;
    let (Term::EnumLit(alpha), Term::EnumLit(beta)) = (&**a, &**b) else {
        return None;
    };
    let mut rest = stack;
    for _ in 0..5 {
        rest = rest.pop()?.1;
    }
    let chosen = match alpha.cmp(beta) {
        std::cmp::Ordering::Less => t,
        std::cmp::Ordering::Equal => s,
        std::cmp::Ordering::Greater => r,
    };
    Some(Process {
        head: chosen.clone(),
        stack: Arc::new(rest.clone()),
    })
}

impl Machine {
    /// No instruction rules.
    pub fn bare() -> Machine {
        Machine::default()
    }

    /// The standard machine: `#chi` is registered.
    pub fn standard() -> Machine {
        let mut m = Machine::bare();
        m.register("chi", Arc::new(chi_rule));
        m
    }

    /// Registers (or replaces) the rule for `#name`.
    pub fn register(&mut self, name: &str, rule: InstrRule) {
        self.rules.insert(ident(name), rule);
    }

    pub fn has_rule(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn step(&self, p: &Process) -> Step {
        match &*p.head {
            Term::App(t, s) => Step::Next(
                Process {
                    head: t.clone(),
                    stack: Arc::new(Stack::Push(s.clone(), p.stack.clone())),
                },
                Rule::Push,
            ),
            Term::Abs(u, body) => match p.stack.pop() {
                Some((s, rest)) => Step::Next(
                    Process {
                        head: substitute_arc(body, u, s),
                        stack: rest.clone(),
                    },
                    Rule::Grab,
                ),
                None => Step::Stuck,
            },
            Term::Cc => match p.stack.pop() {
                Some((t, _)) => Step::Next(
                    Process {
                        head: t.clone(),
                        stack: Arc::new(Stack::Push(
                            Arc::new(Term::Kont(p.stack.pop().unwrap().1.clone())),
                            p.stack.pop().unwrap().1.clone(),
                        )),
                    },
                    Rule::Save,
                ),
                None => Step::Stuck,
            },
            Term::Kont(sigma) => match p.stack.pop() {
                Some((t, _)) => Step::Next(
                    Process {
                        head: t.clone(),
                        stack: sigma.clone(),
                    },
                    Rule::Restore,
                ),
                None => Step::Stuck,
            },
            Term::Instr(x) => match self.rules.get(x).and_then(|r| r(&p.stack)) {
                Some(next) => Step::Next(next, Rule::Instr(x.clone())),
                None => Step::Stuck,
            },
            Term::Var(_) | Term::EnumLit(_) | Term::Opaque(_) => Step::Stuck,
        }
    }

    /// Steps until stuck or until `fuel` transitions have been taken.
    pub fn reduce(&self, p: &Process, fuel: u64) -> Trace {
        let mut steps = vec![p.clone()];
        let mut rules = Vec::new();
        let mut cur = p.clone();
        for _ in 0..fuel {
            match self.step(&cur) {
                Step::Next(next, rule) => {
                    rules.push(rule);
                    steps.push(next.clone());
                    cur = next;
                }
                Step::Stuck => {
                    return Trace {
                        steps,
                        rules,
                        status: stuck_status(&cur),
                    }
                }
            }
        }
        let status = match self.step(&cur) {
            Step::Stuck => stuck_status(&cur),
            Step::Next(..) => Status::OutOfFuel,
        };
        Trace {
            steps,
            rules,
            status,
        }
    }
}

fn stuck_status(p: &Process) -> Status {
    let blocked_by_opaque = match &*p.head {
        Term::Opaque(_) => true,
        Term::Abs(..) | Term::Cc | Term::Kont(_) => matches!(&*p.stack, Stack::OpaqueTail(_)),
        Term::Instr(_) => p.stack.has_opaque(),
        _ => false,
    };
    if blocked_by_opaque {
        Status::StuckOnOpaque
    } else {
        Status::ReachedNormal
    }
}

fn standard_machine() -> &'static Machine {
    static M: OnceLock<Machine> = OnceLock::new();
    M.get_or_init(Machine::standard)
}

/// One step of the standard machine.
pub fn step(p: &Process) -> Step {
    standard_machine().step(p)
}

/// Fueled reduction on the standard machine.
pub fn reduce(p: &Process, fuel: u64) -> Trace {
    standard_machine().reduce(p, fuel)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::lambda_c::{combinator, parse_process};

    fn proc(s: &str) -> Process {
        let p = parse_process(s).unwrap();
        Process {
            head: Arc::new(p.head.opaquify()),
            stack: Arc::new(p.stack.opaquify()),
        }
    }

    #[test]
    fn save_and_restore() {
        let Step::Next(q, Rule::Save) = step(&proc("cc ⋆ t.?pi")) else {
            panic!()
        };
        assert_eq!(q.to_string(), "t ⋆ k[?pi].?pi");
        let Step::Next(q, Rule::Restore) = step(&proc("k[?sigma] ⋆ t.?pi")) else {
            panic!()
        };
        assert_eq!(q.to_string(), "t ⋆ ?sigma");
    }

    #[test]
    fn chi_example() {
        let Step::Next(q, Rule::Instr(_)) = step(&proc("#chi ⋆ nu2.nu5.t.s.r.?pi")) else {
            panic!()
        };
        assert_eq!(q.to_string(), "t ⋆ ?pi");
        assert_eq!(step(&proc("#chi ⋆ nu2.t.s.r.?pi")), Step::Stuck);
        assert_eq!(
            Machine::bare().step(&proc("#chi ⋆ nu2.nu5.t.s.r.?pi")),
            Step::Stuck
        );
    }

    #[test]
    fn w0_unfolds_to_two_copies() {
        let w0 = combinator("w0").unwrap();
        let p = Process::new(
            w0.clone(),
            Stack::push(Term::opaque("t"), Stack::opaque("pi")),
        );
        let tr = reduce(&p, 8);
        // Six processes, five transitions.
        assert_eq!(tr.steps.len(), 6);
        assert_eq!(tr.len(), 5);
        assert_eq!(
            *tr.last(),
            Process::new(
                Term::opaque("t"),
                Stack::from_terms([w0.clone(), w0], Stack::opaque("pi"))
            )
        );
        assert_eq!(tr.status, Status::StuckOnOpaque);
    }

    #[test]
    fn swap_grabs_twice() {
        let tr = reduce(&proc("(\\u.\\v. v u) ⋆ a.b.?pi"), 4);
        assert_eq!(tr.last().to_string(), "b ⋆ a.?pi");
        assert_eq!(tr.rules, vec![Rule::Grab, Rule::Grab, Rule::Push]);
    }

    #[test]
    fn identity_without_argument_is_stuck() {
        let tr = reduce(&proc("(\\u.u) ⋆ w_b"), 1);
        assert!(tr.is_empty());
        assert_eq!(tr.status, Status::ReachedNormal);
        let tr = reduce(&proc("(\\u.u) ⋆ ?pi"), 1);
        assert_eq!(tr.status, Status::StuckOnOpaque);
    }

    #[test]
    fn quote_has_no_rule() {
        assert_eq!(step(&proc("#q ⋆ t.w_b")), Step::Stuck);
    }

    #[test]
    fn out_of_fuel() {
        let w0 = combinator("w0").unwrap();
        let p = Process::new(Term::app(w0.clone(), w0), Stack::bottom("b"));
        let tr = reduce(&p, 3);
        assert_eq!(tr.status, Status::OutOfFuel);
        assert_eq!(tr.len(), 3);
    }

    #[test]
    fn registered_rule_fires() {
        let mut m = Machine::standard();
        m.register(
            "drop",
            Arc::new(|s: &Stack| {
                let (t, rest) = s.pop()?;
                Some(Process {
                    head: t.clone(),
                    stack: rest.pop()?.1.clone(),
                })
            }),
        );
        let tr = m.reduce(&proc("#drop ⋆ a.b.?pi"), 5);
        assert_eq!(tr.last().to_string(), "a ⋆ ?pi");
        assert_eq!(tr.rules, vec![Rule::Instr(ident("drop"))]);
    }
}
