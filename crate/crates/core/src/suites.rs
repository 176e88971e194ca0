//! Randomized property suites shared by `predim check` and the acceptance
//! harness. Every suite is deterministic in its seed.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure;
use crate::constructions::{amalg_copies_unchecked, chain, find_seed, XCertificate};
use crate::dimension::axioms::{check_triple, AxiomReport};
use crate::dimension::{AlphaSpec, DimValue, Predim};
use crate::error::Result;
use crate::oracle;
use crate::rational::{self, Rational};
use crate::structure::{free_amalgam, Elem, ElemSet, Structure};

const MAX_FAILURES: usize = 10;

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    /// Trials on which every check passed.
    pub passed: usize,
    /// Passing count per named check.
    pub checks: BTreeMap<String, usize>,
    /// Up to ten failure descriptions.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteReport {
            suite: suite.into(),
            seed,
            ..Default::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }

    pub fn check(&self, name: &str) -> usize {
        self.checks.get(name).copied().unwrap_or(0)
    }

    /// Records one trial given its named outcomes.
    fn record(&mut self, outcomes: &[(&str, bool)], context: impl FnOnce() -> String) {
        self.trials += 1;
        let mut all = true;
        for &(name, ok) in outcomes {
            *self.checks.entry(name.to_string()).or_default() += ok as usize;
            all &= ok;
        }
        if all {
            self.passed += 1;
        } else if self.failures.len() < MAX_FAILURES {
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.1).map(|o| o.0).collect();
            self.failures.push(format!("{}: {}", failed.join(","), context()));
        }
    }
}

/// `p/q` with `2 ≤ q ≤ 12`.
pub fn random_alpha(rng: &mut impl Rng) -> Rational {
    let q = rng.gen_range(2..=12i128);
    Rational::new(rng.gen_range(1..q), q)
}

/// Graph on `0..n` with independent edges of probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: u32, p: f64) -> Structure {
    let edges: Vec<(Elem, Elem)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Structure::graph(n, &edges).expect("valid edges")
}

/// A random graph in `K_α`, by rejection with decreasing density.
pub fn random_k_graph(rng: &mut impl Rng, pd: &Predim, n: u32) -> Result<Structure> {
    let mut p = rng.gen_range(0.15..0.6);
    loop {
        for _ in 0..8 {
            let g = random_graph(rng, n, p);
            if oracle::is_in_k(pd, &g)? {
                return Ok(g);
            }
        }
        p *= 0.7;
    }
}

fn random_subset(rng: &mut impl Rng, elems: &ElemSet, p: f64) -> ElemSet {
    elems.iter().copied().filter(|_| rng.gen_bool(p)).collect()
}

/// Submodularity, the lattice bound and the gap rule on random disjoint
/// triples in random graphs with `|M| ≤ max_size` and random rational α.
pub fn axiom_suite(trials: usize, seed: u64, max_size: u32) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("axioms", seed);
    for _ in 0..trials {
        let alpha = random_alpha(&mut rng);
        let pd = Predim::exact(alpha)?;
        let n = rng.gen_range(3..=max_size.max(3));
        let p = rng.gen_range(0.1..0.7);
        let m = random_graph(&mut rng, n, p);
        let mut parts = [ElemSet::new(), ElemSet::new(), ElemSet::new()];
        for &x in m.elements() {
            let slot: usize = rng.gen_range(0..4);
            if slot < 3 {
                parts[slot].insert(x);
            }
        }
        let mut r = AxiomReport::default();
        check_triple(&pd, &m, &parts[0], &parts[1], &parts[2], &mut r)?;
        let fails = |k: u8| r.violations.iter().any(|v| v.axiom == k);
        report.record(
            &[
                ("axiom1", !fails(1)),
                ("axiom2", !fails(2)),
                ("axiom3", !fails(3)),
            ],
            || {
                format!(
                    "alpha {} graph {} {:?}",
                    rational::format(&alpha),
                    crate::io::to_json(&m),
                    r.violations
                )
            },
        )
    }
    Ok(report)
}

/// Idempotence of `icl`, agreement with the intersection of strong sets and
/// with the union of intrinsic extensions, and strongness of the closure.
pub fn closure_suite(trials: usize, seed: u64, max_size: u32) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("closure", seed);
    for _ in 0..trials {
        let alpha = random_alpha(&mut rng);
        let pd = Predim::exact(alpha)?;
        let n = rng.gen_range(2..=max_size.max(2));
        let m = random_k_graph(&mut rng, &pd, n)?;
        let density = rng.gen_range(0.05..0.4);
        let a = random_subset(&mut rng, m.elements(), density);
        let first = closure::icl(&pd, &m, &a)?;
        let again = closure::icl(&pd, &m, &first.closure)?;
        let meet = oracle::strong_intersection(&pd, &m, &a)?;
        let union = oracle::icl(&pd, &m, &a)?;
        let strong = oracle::is_strong(&pd, &first.closure, &m)?;
        report.record(
            &[
                ("converged", first.converged),
                ("idempotent", again.closure == first.closure),
                ("strong_intersection", meet == first.closure),
                ("intrinsic_union", union == first.closure),
                ("strong", strong),
            ],
            || format!("alpha {} graph {} base {a:?}", rational::format(&alpha), crate::io::to_json(&m)),
        );
    }
    Ok(report)
}

/// Random `A ≤ B` and `A ⊆ C` in `K_α`: the free amalgam lies in `K_α` and
/// `C` is strong in it.
pub fn amalgamation_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("amalgamation", seed);
    for _ in 0..trials {
        let alpha = random_alpha(&mut rng);
        let pd = Predim::exact(alpha)?;
        let size = rng.gen_range(1..=6);
        let c = random_k_graph(&mut rng, &pd, size)?;
        let a = random_subset(&mut rng, c.elements(), 0.5);
        let b = random_strong_extension(&mut rng, &pd, &c, &a)?;
        let d = free_amalgam(&b, &c, &a)?;
        let in_k = oracle::is_in_k(&pd, &d)?;
        let strong = oracle::is_strong(&pd, c.elements(), &d)?;
        let engine = pd.is_in_k(&d)? == in_k && pd.is_strong(c.elements(), &d)? == strong;
        report.record(
            &[("in_k", in_k), ("c_strong", strong), ("engine_agrees", engine)],
            || {
                format!(
                    "alpha {} B {} C {} base {a:?}",
                    rational::format(&alpha),
                    crate::io::to_json(&b),
                    crate::io::to_json(&c)
                )
            },
        );
    }
    Ok(report)
}

/// `B ⊇ A` in `K_α` with `A ≤ B`, new points taking ids past those of `c`.
fn random_strong_extension(
    rng: &mut impl Rng,
    pd: &Predim,
    c: &Structure,
    a: &ElemSet,
) -> Result<Structure> {
    let base = c.induced(a)?;
    let start = c.fresh_id();
    for _ in 0..200 {
        let extra = rng.gen_range(1..=4u32);
        let p = rng.gen_range(0.1..0.6);
        let mut b = base.clone();
        let new: Vec<Elem> = (start..start + extra).collect();
        for &x in &new {
            b.add_element(x);
        }
        let old: Vec<Elem> = b.elements().iter().copied().collect();
        // every earlier id, base or new, is a candidate neighbour
        for &x in &new {
            for &y in old.iter().filter(|&&y| y < x) {
                if rng.gen_bool(p) {
                    b.add_instance(crate::structure::EDGE, [x.min(y), x.max(y)])?;
                }
            }
        }
        if oracle::is_in_k(pd, &b)? && oracle::is_strong(pd, a, &b)? {
            return Ok(b);
        }
    }
    let mut b = base;
    b.add_element(start);
    Ok(b)
}

/// Random pairs from a pool of reachable certificates at random exact α:
/// the copies and chain values agree with `δ(A/{a,b})` recomputed from the
/// raw structures, and chains with value in `[0, 1)` have `δ ≥ 1` over
/// each endpoint.
pub fn identity_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    const POOL_MAX_SIZE: usize = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("identities", seed);
    let mut pools: BTreeMap<i128, (AlphaSpec, Vec<XCertificate>)> = BTreeMap::new();
    for _ in 0..trials {
        let i = rng.gen_range(1..100i128);
        if let std::collections::btree_map::Entry::Vacant(slot) = pools.entry(i) {
            let alpha = AlphaSpec::exact(Rational::new(i, 100))?;
            let pool = certificate_pool(&alpha, POOL_MAX_SIZE)?;
            slot.insert((alpha, pool));
        }
        let (alpha, pool) = &pools[&i];
        let pd = Predim::new(alpha.clone());
        let x1 = pool.choose(&mut rng).expect("pool is non-empty");
        let x2 = pool.choose(&mut rng).expect("pool is non-empty");
        let k = rng.gen_range(1..=4usize);

        let copies = amalg_copies_unchecked(x1, k, alpha);
        let copies_ok = raw_beta(&pd, &copies)? == x1.beta * Rational::from(k as i128)
            && copies.beta == raw_beta(&pd, &copies)?;

        let ch = chain(x1, x2, alpha)?;
        let one = DimValue::constant(Rational::from(1));
        let chain_ok = raw_beta(&pd, &ch)? == x1.beta + x2.beta + one && ch.beta == raw_beta(&pd, &ch)?;

        let in_regime = pd.sign(&ch.beta)? != Ordering::Less && pd.cmp(&ch.beta, &one)? == Ordering::Less;
        let mut endpoints_ok = true;
        if in_regime {
            let p = &ch.pointed;
            let rest = |x: Elem| -> ElemSet { p.s.elements().iter().copied().filter(|&y| y != x).collect() };
            let over_a = pd.delta_rel(&p.s, &rest(p.a), &[p.a].into())?;
            let over_b = pd.delta_rel(&p.s, &rest(p.b), &[p.b].into())?;
            endpoints_ok = pd.cmp(&over_a, &one)? != Ordering::Less
                && pd.cmp(&over_b, &one)? != Ordering::Less
                && ch.endpoint_facts.as_ref().is_some_and(|f| f.holds && f.delta_over_a == over_a);
        }
        *report.checks.entry("endpoint_regime".into()).or_default() += in_regime as usize;
        report.record(
            &[("copies", copies_ok), ("chain", chain_ok), ("endpoints", endpoints_ok)],
            || format!("alpha {i}/100 k {k} betas {} {}", x1.beta, x2.beta),
        );
    }
    Ok(report)
}

fn raw_beta(pd: &Predim, x: &XCertificate) -> Result<DimValue> {
    let base = x.pointed.base();
    let rest: ElemSet = x.pointed.s.elements().difference(&base).copied().collect();
    pd.delta_rel(&x.pointed.s, &rest, &base)
}

/// The seed, its admissible copies, and chains among those, capped in size.
fn certificate_pool(alpha: &AlphaSpec, max_size: usize) -> Result<Vec<XCertificate>> {
    let seed = find_seed(alpha)?;
    let mut pool = vec![seed.clone()];
    for k in 2..=4 {
        let c = amalg_copies_unchecked(&seed, k, alpha);
        if c.is_member() && c.size() <= max_size {
            pool.push(c);
        }
    }
    let base = pool.clone();
    for x in &base {
        for y in &base {
            if x.size() + y.size() <= max_size {
                let c = chain(x, y, alpha)?;
                if c.is_member() {
                    pool.push(c);
                }
            }
        }
    }
    Ok(pool)
}

/// Compares the engine's `d` (least minimizer and value) with the exhaustive
/// oracle on induced truncations of `s` that keep `keep` and have at most
/// `max_elems` elements, for each base in `bases`.
pub fn decomposition_suite(
    pd: &Predim,
    s: &Structure,
    keep: &ElemSet,
    bases: &[ElemSet],
    max_elems: usize,
    samples: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("decomposition", seed);
    let others: Vec<Elem> = s.elements().difference(keep).copied().collect();
    let room = max_elems.saturating_sub(keep.len());
    let mut truncations: Vec<ElemSet> = Vec::new();
    if s.len() <= max_elems {
        truncations.push(s.elements().clone());
    }
    for _ in 0..samples {
        let take = rng.gen_range(0..=room.min(others.len()));
        let mut t = keep.clone();
        t.extend(others.choose_multiple(&mut rng, take).copied());
        truncations.push(t);
    }
    for t in truncations {
        let sub = s.induced(&t)?;
        for base in bases {
            let engine = pd.d_in(&sub, base)?;
            let (value, minimizers) = oracle::d_in(pd, &sub, base)?;
            let least = minimizers
                .iter()
                .fold(sub.elements().clone(), |acc, m| acc.intersection(m).copied().collect());
            report.record(
                &[
                    ("value", engine.value == value),
                    ("least_minimizer", engine.minimizer == least && minimizers.contains(&least)),
                ],
                || format!("truncation {t:?} base {base:?}"),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for r in [
            axiom_suite(60, 1, 10).unwrap(),
            closure_suite(30, 2, 9).unwrap(),
            amalgamation_suite(30, 3).unwrap(),
            identity_suite(20, 4).unwrap(),
        ] {
            assert!(r.ok(), "{}: {:?}", r.suite, r.failures);
        }
    }

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&axiom_suite(20, 9, 8).unwrap()).unwrap();
        let b = serde_json::to_string(&axiom_suite(20, 9, 8).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decomposition_on_glued_blocks() {
        let s = Structure::graph(8, &[(0, 3), (3, 2), (1, 4), (4, 2), (0, 5), (5, 6), (6, 2), (1, 7), (7, 2)]).unwrap();
        let pd = Predim::exact(Rational::new(1, 2)).unwrap();
        let keep: ElemSet = [0, 1, 2].into();
        let bases: Vec<ElemSet> = vec![[2].into(), [0, 1, 2].into(), [0].into()];
        let r = decomposition_suite(&pd, &s, &keep, &bases, 18, 10, 5).unwrap();
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.trials, 33);
    }
}
