//! Checking reductions written out by hand, and the printer used for them.

use std::sync::OnceLock;

use crate::kam::reduce;
use crate::lambda_c::{
    alpha_eq_process, combinator, substitute, Printer, Process, Stack, Term, COMBINATORS,
};

pub(super) fn printer() -> &'static Printer {
    static P: OnceLock<Printer> = OnceLock::new();
    P.get_or_init(|| {
        Printer::with_names(
            COMBINATORS
                .iter()
                .map(|id| (id.to_string(), combinator(id).expect("library combinator")))
                .collect(),
        )
    })
}

/// Prints library combinators by name.
pub fn library_printer() -> Printer {
    printer().clone()
}

/// Free identifiers naming library combinators become those terms; every
/// other free identifier becomes an opaque atom.
pub fn resolve_term(t: &Term) -> Term {
    let mut out = t.clone();
    for x in t.free_vars() {
        if let Some(id) = COMBINATORS.iter().find(|c| **c == &*x) {
            out = substitute(&out, &x, &combinator(id).expect("library combinator"));
        }
    }
    out.opaquify()
}

pub(super) fn resolve_stack(s: &Stack) -> Stack {
    s.map_terms(&mut |t| resolve_term(t))
}

pub(super) fn resolve_process(p: &Process) -> Process {
    Process::new(resolve_term(&p.head), resolve_stack(&p.stack))
}

/// The reduction of `p` passes through every process of `expected`, in
/// order and up to α-equivalence, within `fuel` steps. Intermediate
/// processes may be omitted; an empty `expected` is never matched.
pub fn check_displayed_trace(p: &Process, expected: &[Process], fuel: u64) -> bool {
    matches_in_order(p, expected.len(), fuel, |q, i| {
        alpha_eq_process(q, &expected[i])
    })
}

/// As [`check_displayed_trace`], comparing rendered lines byte for byte.
pub fn check_displayed_lines(p: &Process, expected: &[&str], printer: &Printer, fuel: u64) -> bool {
    matches_in_order(p, expected.len(), fuel, |q, i| {
        printer.process(q) == expected[i]
    })
}

fn matches_in_order(
    p: &Process,
    n: usize,
    fuel: u64,
    eq: impl Fn(&Process, usize) -> bool,
) -> bool {
    if n == 0 {
        return false;
    }
    let mut next = 0;
    for q in &reduce(p, fuel).steps {
        if next < n && eq(q, next) {
            next += 1;
        }
    }
    next == n
}
