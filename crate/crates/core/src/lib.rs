//! Classical realizability over the Krivine machine: λ_c terms and the
//! machine, names and formulas, realizability algebras, and a proof checker
//! for realizability claims.

pub mod algebra;
pub mod formulas;
pub mod kam;
pub mod lambda_c;
pub mod names;
pub mod verifier;

pub use algebra::{BoolAlg, Elem, TauContext};
pub use formulas::{Formula, NameExpr};
pub use kam::{Machine, Trace};
pub use lambda_c::{Ident, Process, Stack, Term};
pub use names::{Name, NameUniverse, StackSpec};
pub use verifier::{prove, Claim, Config, Goal, Hypothesis, Verdict};
