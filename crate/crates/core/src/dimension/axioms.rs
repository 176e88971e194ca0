//! Randomized checks of the three predimension axioms on disjoint triples.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DimValue, Predim};
use crate::error::Result;
use crate::rational::{self, Rational};
use crate::structure::{ElemSet, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: u8,
    pub a: ElemSet,
    pub b: ElemSet,
    pub c: ElemSet,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    /// Triples where the axiom's hypothesis held, per axiom.
    pub applicable: [usize; 3],
    /// `ε_n` used for axiom 2, if α is exact.
    pub epsilon2: Option<String>,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `α·count` as an affine value.
fn cost(count: usize) -> DimValue {
    DimValue::new(Rational::from(0), Rational::from(-(count as i128)))
}

/// Checks one triple, appending any violation to `report`.
pub fn check_triple(
    pd: &Predim,
    s: &Structure,
    a: &ElemSet,
    b: &ElemSet,
    c: &ElemSet,
    report: &mut AxiomReport,
) -> Result<()> {
    let union = |x: &ElemSet, y: &ElemSet| -> ElemSet { x.union(y).copied().collect() };
    let mut fail = |axiom: u8, detail: String| {
        report.violations.push(AxiomViolation {
            axiom,
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            detail,
        })
    };

    // Axiom 1: δ(C/A) ≥ δ(C/AB), the gap being α per instance meeting C and B.
    let gap1 = pd.delta_rel(s, c, a)? - pd.delta_rel(s, c, &union(a, b))?;
    let k1 = s.e_cross3(c, a, b)?;
    if gap1 != cost(k1) || pd.sign(&gap1)? == Ordering::Less {
        fail(1, format!("gap {gap1} with {k1} crossing instances"));
    }

    // Axiom 2: negative relative dimension is at most -ε.
    let rel = pd.delta_rel(s, a, b)?;
    let mut applicable = [true, false, false];
    if pd.sign(&rel)? == Ordering::Less {
        applicable[1] = true;
        if let Some(eps) = pd.lattice_step() {
            let bound = DimValue::constant(-eps);
            if pd.cmp(&rel, &bound)? == Ordering::Greater {
                fail(2, format!("δ(A/B) = {rel} exceeds -{}", rational::format(&eps)));
            }
        }
    }

    // Axiom 3 with ε = α: a gap below α means no A–C instance and no gap.
    let gap3 = rel - pd.delta_rel(s, a, &union(b, c))?;
    let k3 = s.e_cross3(a, b, c)?;
    if gap3 != cost(k3) {
        fail(3, format!("gap {gap3} but {k3} crossing instances"));
    }
    if pd.cmp(&gap3, &cost(1))? == Ordering::Less {
        applicable[2] = true;
        if k3 != 0 || !gap3.is_zero() {
            fail(3, format!("gap {gap3} below α with {k3} crossing instances"));
        }
    }
    for (slot, hit) in report.applicable.iter_mut().zip(applicable) {
        *slot += hit as usize;
    }
    report.trials += 1;
    Ok(())
}

/// Samples `trials` random disjoint triples of `s` (each element lands in A,
/// B, C or none with equal probability).
pub fn verify_axioms(pd: &Predim, s: &Structure, trials: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        epsilon2: pd.lattice_step().map(|e| rational::format(&e)),
        ..AxiomReport::default()
    };
    for _ in 0..trials {
        let mut parts = [ElemSet::new(), ElemSet::new(), ElemSet::new()];
        for &x in s.elements() {
            let slot: usize = rng.gen_range(0..4);
            if slot < 3 {
                parts[slot].insert(x);
            }
        }
        let [a, b, c] = parts;
        check_triple(pd, s, &a, &b, &c, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::structure::set;

    #[test]
    fn random_graph_passes() {
        let edges: Vec<(u32, u32)> = (0..12).flat_map(|i| [(i, (i + 1) % 12), (i, (i + 5) % 12)]).collect();
        let s = Structure::graph(12, &edges).unwrap();
        let pd = Predim::exact(ratio(2, 3)).unwrap();
        let r = verify_axioms(&pd, &s, 300, 7).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.trials, 300);
        assert_eq!(r.epsilon2.as_deref(), Some("1/3"));
    }

    #[test]
    fn axiom_two_bound_is_tight() {
        // c adjacent to both a and b: δ(c/ab) = 1 - 2·(2/3) = -1/3
        let s = Structure::graph(3, &[(2, 0), (2, 1)]).unwrap();
        let pd = Predim::exact(ratio(2, 3)).unwrap();
        let mut r = AxiomReport::default();
        check_triple(&pd, &s, &set([2]), &set([0, 1]), &ElemSet::new(), &mut r).unwrap();
        assert!(r.ok());
        assert_eq!(r.applicable, [1, 1, 1]);
    }
}
