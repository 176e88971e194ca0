//! Intrinsic extensions and closure, primitivity, minimal pairs, copy counts
//! and d-independence.
//!
//! All queries reduce to least minimizers. If `L` is the least set attaining
//! `d_M(A)`, then every strong set containing `A` contains `L`, and `L` is
//! itself strong and intrinsic over `A`. Hence `icl_M(A) = L`, and `A ≤_i B`
//! holds exactly when `B` is the least minimizer of `d_B(A)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::dimension::{check_subset, DimValue, Predim};
use crate::embed::for_each_embedding;
use crate::error::{Error, Result};
use crate::structure::{ElemSet, Structure};

/// Default cap on candidate sets examined by [`icl_m`] and on search nodes
/// for [`chi_star`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureResult {
    pub closure: ElemSet,
    pub converged: bool,
    pub rounds: usize,
    pub budget_hit: bool,
}

/// `A ≤_i B`: no proper subset of `B` containing `A` is strong in `B`.
pub fn is_intrinsic(pd: &Predim, a: &ElemSet, b: &Structure) -> Result<bool> {
    Ok(pd.d_in(b, a)?.minimizer == *b.elements())
}

/// The least strong superset of `a` in `m`.
pub fn closure_by_minimizer(pd: &Predim, m: &Structure, a: &ElemSet) -> Result<ElemSet> {
    Ok(pd.d_in(m, a)?.minimizer)
}

/// `icl^m_M(A)`: union of the `B` with `A ≤_i B ⊆ M` and `|B - A| < m`.
pub fn icl_m(pd: &Predim, m_struct: &Structure, a: &ElemSet, m: usize, budget: u64) -> Result<ElemSet> {
    let l = closure_by_minimizer(pd, m_struct, a)?;
    let free: Vec<u32> = l.difference(a).copied().collect();
    if free.len() < m {
        return Ok(l);
    }
    // Intrinsic extensions of A lie inside L; enumerate them by size.
    let mut union = a.clone();
    let mut examined = 0u64;
    let mut chosen: Vec<usize> = Vec::new();
    for size in 1..m {
        chosen.clear();
        chosen.extend(0..size);
        loop {
            examined += 1;
            if examined > budget {
                return Err(Error::BudgetExceeded(format!(
                    "icl^{m} examined more than {budget} candidate sets"
                )));
            }
            if chosen.iter().any(|&i| !union.contains(&free[i])) {
                let mut b = a.clone();
                b.extend(chosen.iter().map(|&i| free[i]));
                if is_intrinsic(pd, a, &m_struct.induced(&b)?)? {
                    union.extend(b);
                }
            }
            if !next_combination(&mut chosen, free.len()) {
                break;
            }
        }
    }
    Ok(union)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `icl_M(A)`, iterated to a fixed point.
pub fn icl(pd: &Predim, m: &Structure, a: &ElemSet) -> Result<ClosureResult> {
    check_subset(m, a)?;
    let mut current = a.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let next = match closure_by_minimizer(pd, m, &current) {
            Ok(n) => n,
            Err(Error::BudgetExceeded(_)) => {
                return Ok(ClosureResult {
                    closure: current,
                    converged: false,
                    rounds,
                    budget_hit: true,
                })
            }
            Err(e) => return Err(e),
        };
        if next == current {
            return Ok(ClosureResult {
                closure: current,
                converged: true,
                rounds,
                budget_hit: false,
            });
        }
        current = next;
    }
}

/// `B ≤ C` with no strong set strictly between.
pub fn is_primitive(pd: &Predim, b: &ElemSet, c: &Structure) -> Result<bool> {
    if !pd.is_strong(b, c)? {
        return Err(Error::NotStrong);
    }
    // A strong B' ⊋ B containing u contains the least minimizer over B + u.
    for &u in c.elements().difference(b) {
        let mut bu = b.clone();
        bu.insert(u);
        if pd.d_in(c, &bu)?.minimizer != *c.elements() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `δ(B/A) < 0` and `δ(B/A) < δ(B'/A)` for all `A ⊆ B' ⊊ B`.
pub fn is_minimal_pair(pd: &Predim, a: &ElemSet, b: &Structure) -> Result<bool> {
    let rel = pd.delta_rel(b, b.elements(), a)?;
    if pd.sign(&rel)? != Ordering::Less {
        return Ok(false);
    }
    // B is then the unique minimizer over A.
    is_intrinsic(pd, a, b)
}

/// Distinct image sets of `pattern` over `base` in `m`.
pub fn copies(m: &Structure, pattern: &Structure, base: &ElemSet) -> Vec<ElemSet> {
    let mut images = BTreeSet::new();
    for_each_embedding(pattern, base, m, |map| {
        images.insert(map.values().copied().collect::<ElemSet>());
        ControlFlow::Continue(())
    });
    images.into_iter().collect()
}

/// `χ`: number of distinct copies of the pattern over `base`.
pub fn chi(m: &Structure, pattern: &Structure, base: &ElemSet) -> usize {
    copies(m, pattern, base).len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiStar {
    /// Largest family found (exact unless `budget_hit`).
    pub value: usize,
    /// Greedy lower bound.
    pub greedy: usize,
    pub budget_hit: bool,
}

/// `χ*`: largest family of copies pairwise disjoint outside `base`.
pub fn chi_star(m: &Structure, pattern: &Structure, base: &ElemSet, budget: u64) -> ChiStar {
    let sets: Vec<ElemSet> = copies(m, pattern, base)
        .into_iter()
        .map(|s| s.difference(base).copied().collect())
        .collect();
    let mut greedy_used = ElemSet::new();
    let mut greedy = 0;
    let mut by_size: Vec<&ElemSet> = sets.iter().collect();
    by_size.sort_by_key(|s| s.len());
    for s in by_size {
        if s.is_disjoint(&greedy_used) {
            greedy_used.extend(s);
            greedy += 1;
        }
    }
    let mut search = Packing {
        sets: &sets,
        best: greedy,
        nodes: 0,
        budget,
        hit: false,
    };
    search.run(0, &mut ElemSet::new(), 0);
    ChiStar {
        value: search.best,
        greedy,
        budget_hit: search.hit,
    }
}

struct Packing<'a> {
    sets: &'a [ElemSet],
    best: usize,
    nodes: u64,
    budget: u64,
    hit: bool,
}

impl Packing<'_> {
    fn run(&mut self, from: usize, used: &mut ElemSet, count: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.hit = true;
            return;
        }
        self.best = self.best.max(count);
        let remaining = self.sets[from..].iter().filter(|s| s.is_disjoint(used)).count();
        if count + remaining <= self.best {
            return;
        }
        for i in from..self.sets.len() {
            if self.hit {
                return;
            }
            if !self.sets[i].is_disjoint(used) {
                continue;
            }
            used.extend(&self.sets[i]);
            self.run(i + 1, used, count + 1);
            for e in &self.sets[i] {
                used.remove(e);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceCertificate {
    pub independent: bool,
    pub d_clause: bool,
    pub closure_clause: bool,
    /// `d(A/C)`.
    pub d_over_c: DimValue,
    /// `d(A/CB)`.
    pub d_over_cb: DimValue,
    /// Elements of `icl(AC) ∩ icl(BC)` outside `icl(C)`.
    pub closure_excess: ElemSet,
}

/// `A` and `B` are d-independent over `C` inside the finite ambient `m`.
pub fn d_independent(
    pd: &Predim,
    m: &Structure,
    a: &ElemSet,
    b: &ElemSet,
    c: &ElemSet,
) -> Result<IndependenceCertificate> {
    let union = |x: &ElemSet, y: &ElemSet| -> ElemSet { x.union(y).copied().collect() };
    let cb = union(c, b);
    let d_over_c = pd.d_rel(m, a, c)?;
    let d_over_cb = pd.d_rel(m, a, &cb)?;
    let d_clause = pd.cmp(&d_over_c, &d_over_cb)? == Ordering::Equal;
    let ac = closure_by_minimizer(pd, m, &union(a, c))?;
    let bc = closure_by_minimizer(pd, m, &cb)?;
    let cc = closure_by_minimizer(pd, m, c)?;
    let closure_excess: ElemSet = ac
        .intersection(&bc)
        .filter(|e| !cc.contains(e))
        .copied()
        .collect();
    let closure_clause = closure_excess.is_empty();
    Ok(IndependenceCertificate {
        independent: d_clause && closure_clause,
        d_clause,
        closure_clause,
        d_over_c,
        d_over_cb,
        closure_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::structure::{set, Signature, EDGE};

    fn pd(n: i128, d: i128) -> Predim {
        Predim::exact(ratio(n, d)).unwrap()
    }

    fn cherry() -> Structure {
        Structure::graph(3, &[(2, 0), (2, 1)]).unwrap()
    }

    #[test]
    fn intrinsic_examples() {
        let p = pd(2, 3);
        assert!(is_intrinsic(&p, &set([0, 1, 2]), &cherry()).unwrap());
        assert!(is_intrinsic(&p, &set([0, 1]), &cherry()).unwrap());
        let single = Structure::graph(3, &[(2, 0)]).unwrap();
        assert!(!is_intrinsic(&pd(1, 2), &set([0, 1]), &single).unwrap());
    }

    #[test]
    fn icl_m_examples() {
        let p = pd(2, 3);
        assert_eq!(icl_m(&p, &cherry(), &set([0, 1]), 1, 100).unwrap(), set([0, 1]));
        assert_eq!(icl_m(&p, &cherry(), &set([0, 1]), 2, 100).unwrap(), set([0, 1, 2]));
        let discrete = Structure::discrete(Signature::graph(), 0..6);
        for m in 1..5 {
            assert_eq!(icl_m(&p, &discrete, &set([0]), m, 1000).unwrap(), set([0]));
        }
    }

    #[test]
    fn icl_is_idempotent() {
        let p = pd(2, 3);
        let r = icl(&p, &cherry(), &set([0, 1])).unwrap();
        assert!(r.converged && !r.budget_hit);
        assert_eq!(r.closure, set([0, 1, 2]));
        assert_eq!(icl(&p, &cherry(), &r.closure).unwrap().closure, r.closure);
    }

    #[test]
    fn primitivity() {
        let single = Structure::graph(3, &[(2, 0)]).unwrap();
        assert_eq!(is_primitive(&pd(1, 2), &set([0, 1]), &single), Ok(true));
        assert_eq!(is_primitive(&pd(2, 3), &set([0, 1]), &cherry()), Err(Error::NotStrong));
        // two stacked one-point layers over {0}: the first layer is strong
        let stacked = Structure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(is_primitive(&pd(1, 2), &set([0]), &stacked), Ok(false));
    }

    #[test]
    fn minimal_pairs() {
        let s = Structure::graph(4, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let p = pd(1, 2);
        assert!(is_minimal_pair(&p, &set([0, 1, 2]), &s).unwrap());
        let mut t = s.clone();
        t.add_element(4);
        assert!(!is_minimal_pair(&p, &set([0, 1, 2]), &t).unwrap());
        assert!(!is_minimal_pair(&p, &set([0, 1, 2]), &Structure::discrete(Signature::graph(), 0..4)).unwrap());
    }

    #[test]
    fn copy_counts_on_star() {
        let star = Structure::graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let mut edge = Structure::discrete(Signature::graph(), [0, 100]);
        edge.add_instance(EDGE, [0, 100]).unwrap();
        assert_eq!(chi(&star, &edge, &set([0])), 5);
        let cs = chi_star(&star, &edge, &set([0]), 1000);
        assert_eq!((cs.value, cs.greedy, cs.budget_hit), (5, 5, false));
        let point = Structure::discrete(Signature::graph(), [0]);
        assert_eq!(chi(&star, &point, &set([0])), 1);
    }

    #[test]
    fn discrete_points_are_independent() {
        let m = Structure::discrete(Signature::graph(), 0..4);
        let cert = d_independent(&pd(1, 2), &m, &set([0]), &set([1]), &ElemSet::new()).unwrap();
        assert!(cert.independent);
        let same = d_independent(&pd(1, 2), &m, &set([0]), &set([0]), &ElemSet::new()).unwrap();
        assert!(!same.independent && !same.d_clause && !same.closure_clause);
    }
}
