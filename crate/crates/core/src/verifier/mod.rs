//! A small proof checker for realizability claims.
//!
//! Goals are `t ⊩ φ`, `t ⋆ π ∈ ⊥⊥` and `π ∈ ‖φ‖` under hypotheses about
//! opaque terms and stacks. Realizability goals are reduced to pole goals on
//! generic elements of the falsity value; pole goals are run on the machine
//! until an opaque head is reached, whose hypothesis is then matched against
//! the remaining stack.

mod corpus;
mod display;
mod engine;

use std::fmt;

use crate::formulas::Formula;
use crate::kam::Trace;
use crate::lambda_c::{Ident, Process, Stack, Term};
use crate::names::NameUniverse;

pub use corpus::{
    parse_corpus, parse_universe, verify_corpus, verify_corpus_file, CorpusError, Expect,
    GoalFamily, GoalReport, GoalStatus, Instance, InstanceResult, Report,
};
pub use display::{check_displayed_lines, check_displayed_trace, library_printer, resolve_term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// The opaque term `atom` realizes `formula`.
    Realizer { atom: Ident, formula: Formula },
    /// The opaque stack `?tail` lies in `‖formula‖`.
    Falsity { tail: Ident, formula: Formula },
    /// A previously accepted claim.
    Lemma(Lemma),
}

/// An accepted `term ⊩ formula`, with the universe its unbounded
/// quantifiers were checked over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma {
    pub id: String,
    pub term: Term,
    pub formula: Formula,
    pub universe: Option<NameUniverse>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Realizes(Term, Formula),
    InPole(Process),
    InFalsity(Stack, Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub claim: Claim,
    pub context: Vec<Hypothesis>,
    /// Range of unbounded quantifiers.
    pub universe: Option<NameUniverse>,
    /// Recorded side conditions, already discharged by instantiation.
    pub side: Vec<String>,
    /// Prove a top-level `∀` by recursion on rank.
    pub induction: bool,
}

impl Goal {
    pub fn new(claim: Claim) -> Goal {
        Goal {
            claim,
            context: Vec::new(),
            universe: None,
            side: Vec::new(),
            induction: false,
        }
    }

    pub fn with(mut self, h: Hypothesis) -> Goal {
        self.context.push(h);
        self
    }

    pub fn over(mut self, universe: NameUniverse) -> Goal {
        self.universe = Some(universe);
        self
    }

    pub fn by_induction(mut self) -> Goal {
        self.induction = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    /// Machine transitions allowed per pole goal.
    pub fuel: u64,
    /// Machine transitions allowed over the whole proof.
    pub budget: u64,
    /// Nesting bound on realizability subgoals proved by decomposition.
    pub max_depth: usize,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            fuel: 10_000,
            budget: 20_000_000,
            max_depth: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProofRule {
    AntiEval,
    HypMatch,
    ImpIntro,
    ForallIntro,
    Falsity,
    Kpi,
    CaseSplit,
    Lemma,
    RankInd,
    /// Direct use of a hypothesis.
    Hyp,
}

impl fmt::Display for ProofRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofRule::AntiEval => "ANTI-EVAL",
            ProofRule::HypMatch => "HYP-MATCH",
            ProofRule::ImpIntro => "IMP-INTRO",
            ProofRule::ForallIntro => "FORALL-INTRO",
            ProofRule::Falsity => "FALSITY",
            ProofRule::Kpi => "KPI",
            ProofRule::CaseSplit => "CASE-SPLIT",
            ProofRule::Lemma => "LEMMA",
            ProofRule::RankInd => "RANK-IND",
            ProofRule::Hyp => "HYP",
        })
    }
}

/// One rule application and the derivations of its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: ProofRule,
    pub note: String,
    pub children: Vec<ProofNode>,
    /// The reduction, for `ANTI-EVAL`.
    pub machine: Option<Trace>,
}

impl ProofNode {
    fn leaf(rule: ProofRule, note: impl Into<String>) -> ProofNode {
        ProofNode {
            rule,
            note: note.into(),
            children: Vec::new(),
            machine: None,
        }
    }

    fn with(rule: ProofRule, note: impl Into<String>, children: Vec<ProofNode>) -> ProofNode {
        ProofNode {
            rule,
            note: note.into(),
            children,
            machine: None,
        }
    }

    /// Rule names only, in tree shape.
    pub fn skeleton(&self) -> String {
        let mut out = self.rule.to_string();
        if !self.children.is_empty() {
            out.push('(');
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&c.skeleton());
            }
            out.push(')');
        }
        out
    }

    fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    fn render_into(&self, depth: usize, out: &mut Vec<String>) {
        let pad = "  ".repeat(depth);
        out.push(format!("{pad}{} {}", self.rule, self.note));
        if let Some(t) = &self.machine {
            for line in t.render(&library_printer()) {
                out.push(format!("{pad}  | {line}"));
            }
        }
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}

/// A derivation of an accepted goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub root: ProofNode,
    /// Total machine transitions taken while searching.
    pub steps: u64,
}

impl ProofTrace {
    /// Skeletons of the pole derivations under the top-level decomposition,
    /// one per generic element.
    pub fn instance_skeletons(&self) -> Vec<String> {
        fn walk(n: &ProofNode, out: &mut Vec<String>) {
            match n.rule {
                ProofRule::ImpIntro
                | ProofRule::ForallIntro
                | ProofRule::RankInd
                | ProofRule::CaseSplit
                | ProofRule::Falsity => n.children.iter().for_each(|c| walk(c, out)),
                _ => out.push(n.skeleton()),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Every generic element is handled by the same rule skeleton.
    pub fn is_uniform(&self) -> bool {
        let s = self.instance_skeletons();
        s.windows(2).all(|w| w[0] == w[1])
    }

    /// Number of rule applications.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Indented rendering, machine runs included.
    pub fn render(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.root.render_into(0, &mut out);
        out
    }

    /// Re-derives the goal and checks that the same derivation comes out,
    /// and that every recorded machine run is what the machine produces.
    pub fn replay(&self, goal: &Goal, config: &Config) -> bool {
        fn runs_ok(n: &ProofNode, fuel: u64) -> bool {
            n.machine
                .as_ref()
                .is_none_or(|t| crate::kam::reduce(&t.steps[0], fuel) == *t)
                && n.children.iter().all(|c| runs_ok(c, fuel))
        }
        runs_ok(&self.root, config.fuel)
            && matches!(prove(goal, config), Ok(Verdict::Accepted(t)) if t == *self)
    }
}

/// Why a goal was not accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub reason: String,
    /// The process the search was stuck on, rendered.
    pub at: Option<String>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)?;
        if let Some(p) = &self.at {
            write!(f, " at `{p}`")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted(ProofTrace),
    Rejected(Rejection),
    /// The machine ran out of fuel; distinct from rejection.
    OutOfFuel {
        steps: u64,
    },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifierError {
    #[error("opaque id `{0}` is declared twice")]
    DuplicateOpaque(Ident),
    #[error("claimed term has free variable `{0}`")]
    FreeVariable(Ident),
    #[error("malformed goal: {0}")]
    Malformed(String),
}

/// Proves `goal` with the fixed rule set.
pub fn prove(goal: &Goal, config: &Config) -> Result<Verdict, VerifierError> {
    engine::prove(goal, config)
}
