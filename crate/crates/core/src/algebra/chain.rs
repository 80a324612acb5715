//! Chain conditions, decided on the τ-quotient.
//!
//! A context `t, π` contributes only `c = τ(t) ∧ τ(π)` and a term `u_β` only
//! `b_β = τ(u_β)`; every element is the value of a bottom, so quantifying over
//! terms and stacks is the same as quantifying over elements. The candidate
//! realizer has no bottoms, hence value one, and `p ⋆ t·u_β·π` is in the pole
//! iff `c ∧ b_β = 0`.

use super::{BoolAlg, Elem, TauContext};

/// Verdict of the antichain form of the δ-c.c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntichainVerdict {
    pub holds: bool,
    /// Lexicographically least antichain of size δ, when one exists.
    pub witness: Option<Vec<Elem>>,
}

/// Verdict of a realizability chain condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVerdict {
    pub holds: bool,
    /// A context value `c` and elements `b` with `c ∧ b_γ ∧ b_β = 0` for
    /// `γ ≠ β` but `c ∧ b_β ≠ 0` for every `β`.
    pub counterexample: Option<(Elem, Vec<Elem>)>,
}

impl ChainVerdict {
    fn from_search(found: Option<(Elem, Vec<Elem>)>) -> ChainVerdict {
        ChainVerdict {
            holds: found.is_none(),
            counterexample: found,
        }
    }
}

/// Extends `acc` to length `delta` with elements compatible under `c`.
/// `ordered` explores sequences; otherwise only increasing sets.
fn extend(
    alg: &BoolAlg,
    c: Elem,
    delta: usize,
    ordered: bool,
    cands: &[Elem],
    acc: &mut Vec<Elem>,
) -> bool {
    if acc.len() == delta {
        return true;
    }
    for &e in cands {
        if !ordered && acc.last().is_some_and(|&l| e <= l) {
            continue;
        }
        // Disjointness below `c` also rules out repeats, since `c ∧ e ≠ 0`.
        if acc
            .iter()
            .all(|&x| alg.meet(c, alg.meet(x, e)) == alg.zero())
        {
            acc.push(e);
            if extend(alg, c, delta, ordered, cands, acc) {
                return true;
            }
            acc.pop();
        }
    }
    false
}

fn search_below(alg: &BoolAlg, c: Elem, delta: usize, ordered: bool) -> Option<Vec<Elem>> {
    let cands: Vec<Elem> = alg
        .elements()
        .filter(|&e| alg.meet(c, e) != alg.zero())
        .collect();
    if cands.len() < delta {
        return None;
    }
    let mut acc = Vec::with_capacity(delta);
    extend(alg, c, delta, ordered, &cands, &mut acc).then_some(acc)
}

fn search(ctx: &TauContext, delta: usize, ordered: bool) -> Option<(Elem, Vec<Elem>)> {
    let alg = &ctx.algebra;
    // Pigeonhole: a sequence longer than the carrier repeats some `b`, and
    // the hypothesis on that pair already gives `c ∧ b = 0`.
    if delta > alg.size() {
        return None;
    }
    alg.elements()
        .rev()
        .filter(|&c| c != alg.zero())
        .find_map(|c| search_below(alg, c, delta, ordered).map(|s| (c, s)))
}

/// Every antichain of nonzero elements has fewer than `delta` members.
pub fn ba_delta_cc(alg: &BoolAlg, delta: usize) -> AntichainVerdict {
    let witness = if delta > alg.size() {
        None
    } else {
        search_below(alg, alg.one(), delta, false)
    };
    AntichainVerdict {
        holds: witness.is_none(),
        witness,
    }
}

/// The δ-chain condition over δ-sequences, with the context value `c`
/// searched from the top element down.
pub fn algebra_delta_chain_condition(ctx: &TauContext, delta: usize) -> ChainVerdict {
    ChainVerdict::from_search(search(ctx, delta, true))
}

/// The uniform variant, over sets of at least δ terms. Sets of terms with
/// a repeated value satisfy the conclusion through that pair, so sets of
/// exactly δ distinct elements suffice.
pub fn uniform_delta_chain_condition(ctx: &TauContext, delta: usize) -> ChainVerdict {
    ChainVerdict::from_search(search(ctx, delta, false))
}

#[cfg(test)]
mod test {
    use super::*;

    fn ctx(atoms: usize) -> TauContext {
        TauContext::canonical(BoolAlg::powerset(atoms).unwrap())
    }

    /// Largest antichain by exhaustive subset enumeration.
    fn max_antichain(alg: &BoolAlg) -> usize {
        let n = alg.size();
        let mut best = 0;
        for mask in 0u64..(1 << n) {
            let set: Vec<Elem> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let ok = set.iter().all(|&x| x != alg.zero())
                && set
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| set[i + 1..].iter().all(|&y| alg.meet(x, y) == alg.zero()));
            if ok {
                best = best.max(set.len());
            }
        }
        best
    }

    /// Direct check of the quotient condition over all `c` and all δ-tuples.
    fn brute_chain(alg: &BoolAlg, delta: usize) -> bool {
        let n = alg.size();
        let z = alg.zero();
        for c in alg.elements() {
            let mut tuple = vec![0usize; delta];
            loop {
                let hyp = (0..delta).all(|g| {
                    (g + 1..delta).all(|b| alg.meet(c, alg.meet(tuple[g], tuple[b])) == z)
                });
                let concl = tuple.iter().any(|&b| alg.meet(c, b) == z);
                if hyp && !concl {
                    return false;
                }
                let mut i = 0;
                while i < delta {
                    tuple[i] += 1;
                    if tuple[i] < n {
                        break;
                    }
                    tuple[i] = 0;
                    i += 1;
                }
                if i == delta {
                    break;
                }
            }
        }
        true
    }

    #[test]
    fn antichain_examples() {
        let three = BoolAlg::powerset(3).unwrap();
        let v = ba_delta_cc(&three, 3);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(three.atoms()));
        assert!(ba_delta_cc(&three, 4).holds);
        assert!(ba_delta_cc(&BoolAlg::powerset(1).unwrap(), 2).holds);
    }

    #[test]
    fn chain_examples() {
        let c3 = ctx(3);
        let v = algebra_delta_chain_condition(&c3, 3);
        assert_eq!(
            v.counterexample,
            Some((c3.algebra.one(), c3.algebra.atoms()))
        );
        assert!(algebra_delta_chain_condition(&c3, 4).holds);
        assert!(algebra_delta_chain_condition(&ctx(1), 2).holds);
        assert!(!uniform_delta_chain_condition(&ctx(2), 2).holds);
        assert!(uniform_delta_chain_condition(&ctx(2), 3).holds);
        assert!(!uniform_delta_chain_condition(&c3, 3).holds);
    }

    #[test]
    fn agrees_with_oracles() {
        for atoms in 1..=4 {
            let c = ctx(atoms);
            let max = max_antichain(&c.algebra);
            assert_eq!(max, atoms);
            for delta in 2..=5 {
                let a = ba_delta_cc(&c.algebra, delta);
                let b = algebra_delta_chain_condition(&c, delta);
                let u = uniform_delta_chain_condition(&c, delta);
                assert_eq!(a.holds, delta > max, "atoms={atoms} delta={delta}");
                assert_eq!(b.holds, a.holds);
                assert_eq!(u.holds, a.holds);
                if delta <= 4 {
                    assert_eq!(b.holds, brute_chain(&c.algebra, delta));
                }
            }
        }
    }

    #[test]
    fn witnesses_are_valid() {
        let c = ctx(4);
        let alg = &c.algebra;
        for delta in 2..=4 {
            let (top, seq) = algebra_delta_chain_condition(&c, delta)
                .counterexample
                .unwrap();
            assert_eq!(seq.len(), delta);
            for (i, &x) in seq.iter().enumerate() {
                assert_ne!(alg.meet(top, x), alg.zero());
                for &y in &seq[i + 1..] {
                    assert_eq!(alg.meet(top, alg.meet(x, y)), alg.zero());
                }
            }
        }
    }
}
