//! Seed members of 𝒜 for every `α ∈ (0, 1)`.

use std::cmp::Ordering;

use num_traits::One;
use serde::Serialize;

use super::{verify, Membership, PointedStructure, Trace, XCertificate};
use crate::dimension::AlphaSpec;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::structure::{Elem, Structure};

/// Named seed shapes; all use `a = 0`, `b = 1`, `e = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedKind {
    /// `b1 ~ a, e` and `b2 ~ b, e`.
    Case1,
    /// `b1 ~ a, b, e` and `b2 ~ b, e`.
    Case2,
    /// `n` points joined to `a, b, e`, and `k` points joined to all of those.
    Ank { n: u32, k: u32 },
    /// A small graph found by direct search.
    Small { extra: u32, edges: Vec<(Elem, Elem)> },
}

impl SeedKind {
    pub fn build(&self) -> PointedStructure {
        match self {
            SeedKind::Case1 => case1(),
            SeedKind::Case2 => case2(),
            SeedKind::Ank { n, k } => a_nk(*n, *k),
            SeedKind::Small { extra, edges } => pointed(3 + extra, edges),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SeedKind::Case1 | SeedKind::Case2 => 5,
            SeedKind::Ank { n, k } => (n + k + 3) as usize,
            SeedKind::Small { extra, .. } => (3 + extra) as usize,
        }
    }
}

fn pointed(n: u32, edges: &[(Elem, Elem)]) -> PointedStructure {
    let s = Structure::graph(n, edges).expect("seed edges are valid");
    PointedStructure::new(s, 0, 1, 2).expect("seed has a, b, e")
}

pub fn case1() -> PointedStructure {
    pointed(5, &[(3, 0), (3, 2), (4, 1), (4, 2)])
}

pub fn case2() -> PointedStructure {
    pointed(5, &[(3, 0), (3, 1), (3, 2), (4, 1), (4, 2)])
}

/// `A_{n,k}`: points `3..3+n` adjacent to `a, b, e`; points `3+n..3+n+k`
/// adjacent to each of the first group.
pub fn a_nk(n: u32, k: u32) -> PointedStructure {
    let mut edges = Vec::new();
    for i in 0..n {
        let ai = 3 + i;
        edges.extend([(ai, 0), (ai, 1), (ai, 2)]);
        for j in 0..k {
            edges.push((ai, 3 + n + j));
        }
    }
    pointed(3 + n + k, &edges)
}

/// Range of α for which `δ(A_{n,k}/B) = (n+k+1) - (nk+3n)α` lies in `(-1, 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcceptabilityInterval {
    pub n: u32,
    pub k: u32,
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
}

pub fn acceptability(n: u32, k: u32) -> AcceptabilityInterval {
    let (n, k) = (n as i128, k as i128);
    let denom = n * k + 3 * n;
    AcceptabilityInterval {
        n: n as u32,
        k: k as u32,
        lower: Rational::new(n + k + 1, denom),
        upper: Rational::new(n + k + 2, denom),
    }
}

/// `lower ≤ α < upper`, or an error if an endpoint falls inside an
/// irrational interval.
fn accepts(iv: &AcceptabilityInterval, alpha: &AlphaSpec) -> Result<bool> {
    Ok(alpha.cmp_rational(&iv.lower)? != Ordering::Less
        && alpha.cmp_rational(&iv.upper)? == Ordering::Less)
}

pub(crate) fn certified(seed: SeedKind, alpha: &AlphaSpec) -> Result<Option<XCertificate>> {
    let p = seed.build();
    let report = verify::is_in_a_class(&p, alpha)?;
    if !report.member {
        return Ok(None);
    }
    let trace = Trace::Seed {
        seed,
        beta: p.beta(),
    };
    Ok(Some(XCertificate {
        beta: p.beta(),
        pointed: p,
        trace,
        membership: Membership::Verified {
            method: report.method,
        },
        endpoint_facts: None,
    }))
}

fn scan_limit(alpha: &AlphaSpec) -> u32 {
    let lo = match alpha {
        AlphaSpec::Exact(a) => *a,
        AlphaSpec::Irrational { lo, .. } => *lo,
    };
    let bound = (Rational::from(8) / lo).ceil().to_integer();
    bound.clamp(50, 5000) as u32
}

/// A verified member of 𝒜. Candidates are tried in a fixed order and the
/// first one passing the exhaustive check is returned:
/// Case 1 on `(3/4, 1)`, Case 2 on `[2/3, 4/5)`, `A_{n,k}` with `k ≥ 1`
/// by increasing `(n + k, n)`, then `A_{n,0}`, then small graphs.
pub fn find_seed(alpha: &AlphaSpec) -> Result<XCertificate> {
    if alpha.cmp_rational(&Rational::one())? != Ordering::Less {
        return Err(Error::AlphaOutOfRange("alpha must be below 1".into()));
    }
    if alpha.in_open(&Rational::new(3, 4), &Rational::one())? {
        if let Some(c) = certified(SeedKind::Case1, alpha)? {
            return Ok(c);
        }
    }
    if alpha.cmp_rational(&Rational::new(2, 3))? != Ordering::Less
        && alpha.cmp_rational(&Rational::new(4, 5))? == Ordering::Less
    {
        if let Some(c) = certified(SeedKind::Case2, alpha)? {
            return Ok(c);
        }
    }
    let limit = scan_limit(alpha);
    for total in 2..=limit {
        for n in 1..total {
            let k = total - n;
            if accepts(&acceptability(n, k), alpha)? {
                if let Some(c) = certified(SeedKind::Ank { n, k }, alpha)? {
                    return Ok(c);
                }
            }
        }
    }
    for n in 1..=limit {
        if accepts(&acceptability(n, 0), alpha)? {
            if let Some(c) = certified(SeedKind::Ank { n, k: 0 }, alpha)? {
                return Ok(c);
            }
        }
    }
    for extra in 1..=3u32 {
        let mut slots = Vec::new();
        for x in 3..3 + extra {
            for y in 0..x {
                slots.push((x, y));
            }
        }
        for mask in 0u32..1 << slots.len() {
            let edges: Vec<(Elem, Elem)> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            if let Some(c) = certified(SeedKind::Small { extra, edges }, alpha)? {
                return Ok(c);
            }
        }
    }
    Err(Error::Unachievable(format!("no seed found for alpha {alpha}")))
}
