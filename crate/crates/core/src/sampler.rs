//! Random graphs `G(n, c·n^{-α})` and subgraph census.
//!
//! Pair `{i, j}` with `i < j` has index `i(2n - i - 1)/2 + (j - i - 1)`; its
//! edge decision uses words `2·index` and `2·index + 1` of a ChaCha8 stream
//! keyed by the seed, so any pair can be decided on its own.

use std::collections::HashSet;

use num_traits::{ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{self, Rational};
use crate::structure::{Elem, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleSpec {
    pub n: u32,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
    pub seed: u64,
}

impl SampleSpec {
    /// `p = c·n^{-α}`; fails if `p > 1` or an argument is out of range.
    pub fn probability(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.coeff < Rational::zero() || self.alpha < Rational::zero() {
            return Err(Error::InvalidArgument("coefficient and exponent must be nonnegative".into()));
        }
        if exceeds_one(self) {
            return Err(Error::ProbabilityOverflow(format!(
                "{} * {}^(-{})",
                rational::format(&self.coeff),
                self.n,
                rational::format(&self.alpha)
            )));
        }
        let p = rational::to_f64(&self.coeff) * (self.n as f64).powf(-rational::to_f64(&self.alpha));
        Ok(p.min(1.0))
    }
}

/// Whether `c > n^α`, exactly when the powers fit in `i128`.
fn exceeds_one(spec: &SampleSpec) -> bool {
    let (a, b) = (*spec.alpha.numer(), *spec.alpha.denom());
    let (cn, cd) = (*spec.coeff.numer(), *spec.coeff.denom());
    // c^b vs n^a: cn^b vs cd^b · n^a
    let exact = (|| {
        let lhs = cn.checked_pow(u32::try_from(b).ok()?)?;
        let rhs = cd
            .checked_pow(u32::try_from(b).ok()?)?
            .checked_mul((spec.n as i128).checked_pow(u32::try_from(a).ok()?)?)?;
        Some(lhs > rhs)
    })();
    exact.unwrap_or_else(|| {
        let lhs = rational::to_f64(&spec.coeff).ln();
        let rhs = rational::to_f64(&spec.alpha) * (spec.n as f64).ln();
        lhs > rhs
    })
}

pub fn pair_index(n: u32, i: u32, j: u32) -> u64 {
    let (i, j) = (i.min(j) as u64, i.max(j) as u64);
    let n = n as u64;
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn uniform(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The decision for a single pair, independent of any other.
pub fn edge_decision(spec: &SampleSpec, i: u32, j: u32) -> Result<bool> {
    let p = spec.probability()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_word_pos(2 * pair_index(spec.n, i, j) as u128);
    Ok(uniform(rng.next_u64()) < p)
}

/// A sample on elements `0..n`.
pub fn sample(spec: &SampleSpec) -> Result<Structure> {
    let p = spec.probability()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    // pairs in index order read consecutive words of the stream
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if uniform(rng.next_u64()) < p {
                edges.push((i, j));
            }
        }
    }
    Structure::graph(spec.n, &edges)
}

/// Largest pattern accepted by [`census`].
pub const MAX_PATTERN: usize = 6;

/// Number of vertex sets of `m` on which some injective map from `h`
/// carries every edge of `h` to an edge (copies need not be induced).
/// `budget` bounds the number of partial maps explored.
pub fn census(m: &Structure, h: &Structure, budget: u64) -> Result<u64> {
    let g = Graph::from_structure(m)?;
    let hg = Graph::from_structure(h)?;
    let k = hg.n();
    if k > MAX_PATTERN {
        return Err(Error::InvalidArgument(format!("pattern has {k} vertices; at most {MAX_PATTERN}")));
    }
    if k == 0 {
        return Ok(1);
    }
    if k > g.n() {
        return Ok(0);
    }
    // place vertices adjacent to already placed ones first
    let mut order: Vec<usize> = Vec::with_capacity(k);
    while order.len() < k {
        let next = (0..k)
            .filter(|v| !order.contains(v))
            .max_by_key(|&v| {
                let back = order.iter().filter(|&&u| hg.has_edge(u, v)).count();
                (back, hg.degree(v), std::cmp::Reverse(v))
            })
            .expect("a vertex remains");
        order.push(next);
    }
    let anchor: Vec<Option<usize>> = order
        .iter()
        .enumerate()
        .map(|(pos, &v)| order[..pos].iter().position(|&u| hg.has_edge(u, v)))
        .collect();
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    let mut image = vec![usize::MAX; k];
    let mut nodes = 0u64;
    struct Ctx<'a> {
        g: &'a Graph,
        hg: &'a Graph,
        order: &'a [usize],
        anchor: &'a [Option<usize>],
        budget: u64,
    }
    fn go(
        c: &Ctx,
        pos: usize,
        image: &mut Vec<usize>,
        nodes: &mut u64,
        found: &mut HashSet<Vec<usize>>,
    ) -> Result<()> {
        if pos == c.order.len() {
            let mut set = image.clone();
            set.sort_unstable();
            found.insert(set);
            return Ok(());
        }
        *nodes += 1;
        if *nodes > c.budget {
            return Err(Error::BudgetExceeded(format!("census explored {} partial maps", c.budget)));
        }
        let v = c.order[pos];
        let candidates: Vec<usize> = match c.anchor[pos] {
            Some(a) => c.g.neighbors(image[a]).collect(),
            None => (0..c.g.n()).collect(),
        };
        'cand: for x in candidates {
            for &u in &c.order[..pos] {
                if image[u] == x || (c.hg.has_edge(u, v) && !c.g.has_edge(image[u], x)) {
                    continue 'cand;
                }
            }
            image[v] = x;
            go(c, pos + 1, image, nodes, found)?;
            image[v] = usize::MAX;
        }
        Ok(())
    }
    let ctx = Ctx {
        g: &g,
        hg: &hg,
        order: &order,
        anchor: &anchor,
        budget,
    };
    go(&ctx, 0, &mut image, &mut nodes, &mut found)?;
    Ok(found.len() as u64)
}

/// Number of permutations of `h`'s vertices preserving its edges.
pub fn automorphisms(h: &Structure) -> Result<u64> {
    let hg = Graph::from_structure(h)?;
    let k = hg.n();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut count = 0;
    fn heap(k: usize, perm: &mut Vec<usize>, hg: &Graph, count: &mut u64) {
        if k <= 1 {
            let ok = (0..perm.len())
                .all(|u| (u + 1..perm.len()).all(|v| hg.has_edge(u, v) == hg.has_edge(perm[u], perm[v])));
            *count += ok as u64;
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, hg, count);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    heap(k, &mut perm, &hg, &mut count);
    Ok(count)
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expected number of copies of `h`: `C(n, v) · (v! / |Aut h|) · p^e`.
pub fn expected_count(spec: &SampleSpec, h: &Structure) -> Result<f64> {
    let p = spec.probability()?;
    let v = h.len() as u64;
    let e = h.e_count() as i32;
    let labelled = (1..=v).product::<u64>() as f64 / automorphisms(h)? as f64;
    Ok(binomial(spec.n as u64, v) * labelled * p.powi(e))
}

/// Small named patterns for the command line.
pub fn named_pattern(name: &str) -> Option<Structure> {
    let complete = |k: u32| {
        let edges: Vec<(Elem, Elem)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        Structure::graph(k, &edges).expect("valid")
    };
    let upper = name.to_ascii_uppercase();
    match upper.as_str() {
        "VERTEX" | "K1" => Some(complete(1)),
        "EDGE" | "K2" => Some(complete(2)),
        "TRIANGLE" | "K3" => Some(complete(3)),
        "K4" => Some(complete(4)),
        "K5" => Some(complete(5)),
        "C4" => Some(Structure::graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).expect("valid")),
        "P3" => Some(Structure::graph(3, &[(0, 1), (1, 2)]).expect("valid")),
        _ => None,
    }
}

/// `census` of a sample as a float, for averaging.
pub fn mean(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().map(|&v| v.to_f64().unwrap_or(f64::MAX)).sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn spec(n: u32, a: Rational, c: Rational, seed: u64) -> SampleSpec {
        SampleSpec {
            n,
            alpha: a,
            coeff: c,
            seed,
        }
    }

    #[test]
    fn extremes() {
        let zero = sample(&spec(10, ratio(1, 2), ratio(0, 1), 1)).unwrap();
        assert_eq!(zero.e_count(), 0);
        let one = sample(&spec(4, ratio(1, 2), ratio(2, 1), 1)).unwrap();
        assert_eq!(one.e_count(), 6);
        let over = spec(4, ratio(1, 2), ratio(3, 1), 1);
        assert!(matches!(sample(&over), Err(Error::ProbabilityOverflow(_))));
    }

    #[test]
    fn reproducible_and_pairwise() {
        let s = spec(60, ratio(1, 2), ratio(1, 1), 9);
        let g = sample(&s).unwrap();
        assert_eq!(crate::io::to_json(&g), crate::io::to_json(&sample(&s).unwrap()));
        for (i, j) in [(0, 1), (3, 59), (17, 18), (40, 2)] {
            assert_eq!(edge_decision(&s, i, j).unwrap(), g.has_instance("E", &[i.min(j), i.max(j)]));
        }
    }

    #[test]
    fn census_examples() {
        let k4 = named_pattern("K4").unwrap();
        let k3 = named_pattern("K3").unwrap();
        assert_eq!(census(&k4, &k3, 1_000).unwrap(), 4);
        let edge = named_pattern("edge").unwrap();
        let discrete = Structure::graph(5, &[]).unwrap();
        assert_eq!(census(&discrete, &edge, 1_000).unwrap(), 0);
        let v = named_pattern("vertex").unwrap();
        assert_eq!(census(&k4, &v, 1_000).unwrap(), 4);
        let c4 = named_pattern("C4").unwrap();
        assert_eq!(census(&k4, &c4, 1_000).unwrap(), 1);
    }

    #[test]
    fn expectations() {
        let s = spec(100, ratio(1, 2), ratio(1, 1), 0);
        let p = 0.1;
        let e = expected_count(&s, &named_pattern("edge").unwrap()).unwrap();
        assert!((e - 4950.0 * p).abs() < 1e-9);
        let k4 = expected_count(&s, &named_pattern("K4").unwrap()).unwrap();
        assert!((k4 - binomial(100, 4) * p.powi(6)).abs() < 1e-12);
        assert_eq!(automorphisms(&named_pattern("C4").unwrap()).unwrap(), 8);
        let zero = spec(100, ratio(1, 2), ratio(0, 1), 0);
        assert_eq!(expected_count(&zero, &named_pattern("K3").unwrap()).unwrap(), 0.0);
    }
}
