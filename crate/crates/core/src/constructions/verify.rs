//! Membership in the class 𝒜 of pointed structures `(A, a, b, e)`:
//!
//! 1. `A ∈ K` (every subset has `δ ≥ 0`);
//! 2. `{a, b, e}` carries no relation;
//! 3. `δ(A') > δ(A)` for every `B ⊊ A' ⊊ A`, where `B = {a, b}`;
//! 4. `-1 < δ(A/B) ≤ 0`.
//!
//! The exhaustive verifier enumerates subsets up to twin symmetry: vertices
//! with the same neighbourhood are interchangeable, so a subset is determined
//! up to `δ` by how many members of each twin class it takes.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::PointedStructure;
use crate::dimension::{AlphaSpec, Counts, DimValue, Predim, Scale};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::Rational;
use crate::structure::{Elem, ElemSet};

/// Largest number of count vectors the exhaustive verifier will visit.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every subset, up to twin symmetry.
    Exhaustive,
    /// Least-minimizer characterization through the dimension engine.
    Lattice,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AClassReport {
    pub member: bool,
    pub k0: bool,
    pub discrete_triple: bool,
    pub strictly_minimal: bool,
    pub in_range: bool,
    /// `δ(A/B)`.
    pub beta: DimValue,
    pub method: Method,
    /// Clauses 2–4 imply clause 1; false would indicate a bug.
    pub obs2_consistent: bool,
    /// A subset violating clause 1 or clause 3, if any.
    pub witness: Option<ElemSet>,
}

#[derive(Debug)]
struct TwinClass {
    members: Vec<usize>,
    clique: bool,
}

/// `δ` over subsets of a vertex region, enumerated by twin-class counts.
struct Quotient {
    classes: Vec<TwinClass>,
    adj: Vec<Vec<usize>>,
    base_deg: Vec<i64>,
}

impl Quotient {
    fn new(g: &Graph, region: &[usize], base: &[usize]) -> Self {
        let words = g.words();
        let mut base_mask = vec![0u64; words];
        for &v in base {
            base_mask[v / 64] |= 1 << (v % 64);
        }
        let mut open: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for &v in region {
            open.entry(g.row(v)).or_default().push(v);
        }
        let mut classes = Vec::new();
        let mut singles = Vec::new();
        for (_, members) in open {
            if members.len() > 1 {
                classes.push(TwinClass {
                    members,
                    clique: false,
                });
            } else {
                singles.push(members[0]);
            }
        }
        let mut closed: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for v in singles {
            let mut row = g.row(v).to_vec();
            row[v / 64] |= 1 << (v % 64);
            closed.entry(row).or_default().push(v);
        }
        for (_, members) in closed {
            let clique = members.len() > 1;
            classes.push(TwinClass { members, clique });
        }
        for c in &mut classes {
            c.members.sort_unstable();
        }
        classes.sort_by_key(|c| c.members[0]);
        let reps: Vec<usize> = classes.iter().map(|c| c.members[0]).collect();
        let adj = (0..classes.len())
            .map(|i| {
                (0..classes.len())
                    .filter(|&j| j != i && g.has_edge(reps[i], reps[j]))
                    .collect()
            })
            .collect();
        let base_deg = reps
            .iter()
            .map(|&r| {
                g.row(r)
                    .iter()
                    .zip(&base_mask)
                    .map(|(x, m)| (x & m).count_ones() as i64)
                    .sum()
            })
            .collect();
        Quotient {
            classes,
            adj,
            base_deg,
        }
    }

    fn vectors(&self) -> u64 {
        self.classes
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.members.len() as u64 + 1))
            .unwrap_or(u64::MAX)
    }

    fn full(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.members.len() as u32).collect()
    }

    fn members(&self, counts: &[u32]) -> Vec<usize> {
        self.classes
            .iter()
            .zip(counts)
            .flat_map(|(c, &k)| c.members[..k as usize].iter().copied())
            .collect()
    }

    /// Visits every count vector with its counts relative to the base.
    /// Stops at the first vector for which `visit` returns true.
    fn find<F>(&self, mut visit: F) -> Result<Option<Vec<u32>>>
    where
        F: FnMut(&[u32], Counts) -> Result<bool>,
    {
        let k = self.classes.len();
        let mut c = vec![0u32; k];
        let mut sum = vec![0i64; k];
        let mut cur = Counts::default();
        loop {
            if visit(&c, cur)? {
                return Ok(Some(c));
            }
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(None);
                }
                if (c[i] as usize) < self.classes[i].members.len() {
                    let gain = self.classes[i].clique as i64 * c[i] as i64 + sum[i] + self.base_deg[i];
                    cur = cur + Counts::new(1, gain);
                    c[i] += 1;
                    for &j in &self.adj[i] {
                        sum[j] += 1;
                    }
                    break;
                }
                while c[i] > 0 {
                    c[i] -= 1;
                    for &j in &self.adj[i] {
                        sum[j] -= 1;
                    }
                    let loss = self.classes[i].clique as i64 * c[i] as i64 + sum[i] + self.base_deg[i];
                    cur = cur - Counts::new(1, loss);
                }
                i += 1;
            }
        }
    }
}

fn to_set(g: &Graph, vs: &[usize]) -> ElemSet {
    vs.iter().map(|&v| g.ids()[v]).collect()
}

fn clause2(p: &PointedStructure) -> bool {
    p.s.is_discrete_on(&p.triple())
}

fn clause4(pd: &Predim, beta: &DimValue) -> Result<bool> {
    Ok(pd.cmp(beta, &DimValue::constant(Rational::from(-1)))? == Ordering::Greater
        && pd.sign(beta)? != Ordering::Greater)
}

fn assemble(
    k0: bool,
    discrete_triple: bool,
    strictly_minimal: bool,
    in_range: bool,
    beta: DimValue,
    method: Method,
    witness: Option<ElemSet>,
) -> AClassReport {
    AClassReport {
        member: k0 && discrete_triple && strictly_minimal && in_range,
        k0,
        discrete_triple,
        strictly_minimal,
        in_range,
        beta,
        method,
        obs2_consistent: k0 || !(discrete_triple && strictly_minimal && in_range),
        witness,
    }
}

/// Exhaustive check of all four clauses (binary signatures only).
pub fn is_in_a_class(p: &PointedStructure, alpha: &AlphaSpec) -> Result<AClassReport> {
    let g = Graph::from_structure(&p.s)?;
    let pd = Predim::new(alpha.clone());
    let scale = Scale::new(alpha.clone(), Rational::from(1));
    let ia = g.index_of(p.a).expect("a in S");
    let ib = g.index_of(p.b).expect("b in S");
    let all: Vec<usize> = (0..g.n()).collect();
    let free: Vec<usize> = all.iter().copied().filter(|&v| v != ia && v != ib).collect();

    let q1 = Quotient::new(&g, &all, &[]);
    let q3 = Quotient::new(&g, &free, &[ia, ib]);
    if q1.vectors() > EXHAUSTIVE_LIMIT || q3.vectors() > EXHAUSTIVE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive class check needs {} subsets",
            q1.vectors().max(q3.vectors())
        )));
    }

    let beta = p.beta();
    let mut witness = None;
    let bad1 = q1.find(|_, c| Ok(scale.sign(c)? == Ordering::Less))?;
    if let Some(v) = &bad1 {
        witness = Some(to_set(&g, &q1.members(v)));
    }
    let full = q3.full();
    let full_counts = Counts::new(free.len() as i64, (p.s.e_count() - p.s.e_within(&p.base())) as i64);
    let bad3 = q3.find(|v, c| {
        if v.iter().all(|&x| x == 0) || v == full.as_slice() {
            return Ok(false);
        }
        Ok(scale.cmp(c, full_counts)? != Ordering::Greater)
    })?;
    if let (Some(v), None) = (&bad3, &witness) {
        let mut set = to_set(&g, &q3.members(v));
        set.extend([p.a, p.b]);
        witness = Some(set);
    }
    Ok(assemble(
        bad1.is_none(),
        clause2(p),
        bad3.is_none(),
        clause4(&pd, &beta)?,
        beta,
        Method::Exhaustive,
        witness,
    ))
}

/// Exact check through least minimizers: clause 3 holds iff for every
/// `u ∈ A - B` the least minimizer of `δ` over supersets of `B + u` is `A`.
pub fn lattice_check(p: &PointedStructure, alpha: &AlphaSpec) -> Result<AClassReport> {
    let pd = Predim::new(alpha.clone());
    let beta = p.beta();
    let violation = pd.k_violation(&p.s)?;
    let base = p.base();
    let mut bad3 = None;
    for &u in p.s.elements().difference(&base) {
        let mut bu = base.clone();
        bu.insert(u);
        let r = pd.d_in(&p.s, &bu)?;
        if r.minimizer != *p.s.elements() {
            bad3 = Some(r.minimizer);
            break;
        }
    }
    let k0 = violation.is_none();
    let witness = violation.or_else(|| bad3.clone());
    Ok(assemble(
        k0,
        clause2(p),
        bad3.is_none(),
        clause4(&pd, &beta)?,
        beta,
        Method::Lattice,
        witness,
    ))
}

/// Exhaustive when feasible, lattice check otherwise.
pub fn verify(p: &PointedStructure, alpha: &AlphaSpec) -> Result<AClassReport> {
    match is_in_a_class(p, alpha) {
        Err(Error::BudgetExceeded(_)) | Err(Error::NotAGraph) => lattice_check(p, alpha),
        other => other,
    }
}

/// Clause 3 on `samples` random sets strictly between `B` and `A`.
/// Returns the first violating set found.
pub fn spot_check_clause3(
    p: &PointedStructure,
    alpha: &AlphaSpec,
    samples: usize,
    seed: u64,
) -> Result<Option<ElemSet>> {
    let pd = Predim::new(alpha.clone());
    let free: Vec<Elem> = p.s.elements().difference(&p.base()).copied().collect();
    if free.len() < 2 {
        return Ok(None);
    }
    let whole = pd.delta(&p.s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut set = p.base();
        loop {
            set.retain(|x| *x == p.a || *x == p.b);
            for &x in &free {
                if rng.gen_bool(0.5) {
                    set.insert(x);
                }
            }
            if set.len() > 2 && set.len() < p.s.len() {
                break;
            }
        }
        let d = pd.delta_of(&p.s, &set)?;
        if pd.cmp(&d, &whole)? != Ordering::Greater {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::seeds;
    use crate::rational::ratio;
    use crate::structure::Structure;

    fn exact(n: i128, d: i128) -> AlphaSpec {
        AlphaSpec::exact(ratio(n, d)).unwrap()
    }

    #[test]
    fn a32_at_five_elevenths() {
        let p = seeds::a_nk(3, 2);
        let r = is_in_a_class(&p, &exact(5, 11)).unwrap();
        assert!(r.member, "{r:?}");
        assert_eq!(r.beta.value(&exact(5, 11)), Some(ratio(-9, 11)));
        assert!(lattice_check(&p, &exact(5, 11)).unwrap().member);
    }

    #[test]
    fn case1_at_one_half_is_out_of_range() {
        let p = seeds::case1();
        let r = is_in_a_class(&p, &exact(1, 2)).unwrap();
        assert!(!r.member && !r.in_range);
        assert_eq!(r.beta.value(&exact(1, 2)), Some(ratio(1, 1)));
    }

    #[test]
    fn edge_in_triple_fails_clause_two() {
        let mut s = seeds::case1().s;
        s.add_instance(crate::structure::EDGE, [0, 2]).unwrap();
        let p = PointedStructure::new(s, 0, 1, 2).unwrap();
        let r = is_in_a_class(&p, &exact(4, 5)).unwrap();
        assert!(!r.discrete_triple && !r.member);
    }

    #[test]
    fn quotient_matches_raw_counts() {
        // the number of count vectors weighted by multiplicity is 2^n
        let s = Structure::graph(6, &[(0, 2), (1, 2), (0, 3), (1, 3), (4, 5)]).unwrap();
        let g = Graph::from_structure(&s).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let q = Quotient::new(&g, &all, &[]);
        let mut total = 0u64;
        let mut seen = Vec::new();
        q.find(|v, c| {
            let mult: u64 = q
                .classes
                .iter()
                .zip(v)
                .map(|(cl, &k)| binom(cl.members.len() as u64, k as u64))
                .product();
            total += mult;
            let set = to_set(&g, &q.members(v));
            assert_eq!(c, Counts::new(set.len() as i64, s.e_within(&set) as i64));
            seen.push(v.to_vec());
            Ok(false)
        })
        .unwrap();
        assert_eq!(total, 64);
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn spot_check_agrees_on_member() {
        let p = seeds::a_nk(3, 2);
        assert_eq!(spot_check_clause3(&p, &exact(5, 11), 500, 1).unwrap(), None);
    }
}
