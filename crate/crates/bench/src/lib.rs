//! Workloads shared by the `machine` and `verifier` benches.

use classreal::lambda_c::{church, combinator, Process, Stack, Term};
use classreal::verifier::resolve_term;
use classreal::{Claim, Formula, Goal, NameUniverse};

/// The goal corpus shipped with the core crate.
pub const CORPUS: &str = include_str!("../../core/corpus/realizers.goals");

/// `n f x ⋆ w_0` for a Church numeral `n`: `3n + O(1)` transitions, all
/// push and grab.
pub fn church_run(n: u32) -> Process {
    let t = Term::apps(church(n), [Term::opaque("f"), Term::opaque("x")]);
    Process::new(t, Stack::bottom("w_0"))
}

/// `ω ⋆ w_0`: never stops, so every run spends its whole fuel.
pub fn omega() -> Process {
    let d = Term::abs("x", Term::app(Term::var("x"), Term::var("x")));
    Process::new(Term::app(d.clone(), d), Stack::bottom("w_0"))
}

/// `w0 ⋆ t.?pi`: the first transitions of the fixed-point realizer.
pub fn fixpoint_unfold() -> Process {
    let w0 = combinator("w0").expect("library combinator");
    Process::new(
        w0,
        Stack::from_terms([Term::opaque("t")], Stack::opaque("pi")),
    )
}

/// Peirce's law realized by `cc`.
pub fn peirce() -> Goal {
    goal("cc", "((A -> B) -> A) -> A", None)
}

/// Reflexivity of inclusion over ranks below `n`, by rank induction.
pub fn reflexivity(n: usize) -> Goal {
    let u = NameUniverse::closure((0..n).map(classreal::names::mk_reish));
    goal("w0", "all x. x sub x", Some(u)).by_induction()
}

fn goal(t: &str, f: &str, u: Option<NameUniverse>) -> Goal {
    let t = resolve_term(&classreal::lambda_c::parse_term(t).expect("term"));
    let f: Formula = classreal::formulas::parse_formula(f).expect("formula");
    let g = Goal::new(Claim::Realizes(t, f));
    match u {
        Some(u) => g.over(u),
        None => g,
    }
}
