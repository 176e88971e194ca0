//! Primitive extensions `C_n` of relative dimension in `[0, 1/n)` and the
//! structures glued from them.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use super::ops::{chain, explore, Node, SearchBudget};
use super::{Membership, Method, PointedStructure, Trace, XCertificate};
use crate::closure;
use crate::dimension::{AlphaSpec, DimValue, Predim};
use crate::error::{Error, Result};
use crate::oracle;
use crate::rational::{self, Rational};
use crate::structure::{glue, set, Elem, ElemSet, Remap, Structure};

/// Largest `|C|` for which primitivity is checked by the exhaustive oracle.
pub const EXHAUSTIVE_PRIMITIVE_MAX: usize = 22;

/// A block `C` over `B = {x, y}` with its checks.
#[derive(Clone, Debug, Serialize)]
pub struct CnResult {
    #[serde(skip)]
    pub pointed: PointedStructure,
    pub n: u64,
    pub x: Elem,
    pub y: Elem,
    pub c: Elem,
    pub size: usize,
    pub trace: Trace,
    /// `δ(C/B)`.
    pub delta: DimValue,
    /// `0 ≤ δ(C/B) < 1/n`.
    pub delta_in_range: bool,
    pub discrete_triple: bool,
    pub primitive: bool,
    pub primitivity_method: Method,
    /// `δ(C/x)`, `δ(C/y)`.
    pub delta_over_x: DimValue,
    pub delta_over_y: DimValue,
    pub endpoints_at_least_one: bool,
    /// `d_C(c/x)`, `d_C(c/y)`.
    pub d_c_over_x: DimValue,
    pub d_c_over_y: DimValue,
    /// Both of the above are at least 1.
    pub separated: bool,
}

impl CnResult {
    pub fn ok(&self) -> bool {
        self.delta_in_range && self.discrete_triple && self.primitive && self.endpoints_at_least_one
    }

    pub fn structure(&self) -> &Structure {
        &self.pointed.s
    }
}

fn check_block(p: PointedStructure, trace: Trace, n: u64, alpha: &AlphaSpec) -> Result<CnResult> {
    let pd = Predim::new(alpha.clone());
    let base = p.base();
    let delta = p.beta();
    let bound = DimValue::constant(Rational::new(1, n as i128));
    let delta_in_range = pd.sign(&delta)? != Ordering::Less && pd.cmp(&delta, &bound)? == Ordering::Less;
    let discrete_triple = p.s.is_discrete_on(&p.triple());
    let (primitive, primitivity_method) = if p.s.len() <= EXHAUSTIVE_PRIMITIVE_MAX {
        let strong = oracle::is_strong(&pd, &base, &p.s)?;
        (strong && oracle::is_primitive(&pd, &base, &p.s)?, Method::Exhaustive)
    } else {
        let r = match closure::is_primitive(&pd, &base, &p.s) {
            Err(Error::NotStrong) => false,
            other => other?,
        };
        (r, Method::Lattice)
    };
    let whole = pd.delta(&p.s);
    let delta_over_x = whole - pd.delta_of(&p.s, &set([p.a]))?;
    let delta_over_y = whole - pd.delta_of(&p.s, &set([p.b]))?;
    let one = DimValue::constant(Rational::one());
    let endpoints_at_least_one =
        pd.cmp(&delta_over_x, &one)? != Ordering::Less && pd.cmp(&delta_over_y, &one)? != Ordering::Less;
    let d_c_over_x = pd.d_rel(&p.s, &set([p.e]), &set([p.a]))?;
    let d_c_over_y = pd.d_rel(&p.s, &set([p.e]), &set([p.b]))?;
    let separated =
        pd.cmp(&d_c_over_x, &one)? != Ordering::Less && pd.cmp(&d_c_over_y, &one)? != Ordering::Less;
    Ok(CnResult {
        n,
        x: p.a,
        y: p.b,
        c: p.e,
        size: p.s.len(),
        trace,
        delta,
        delta_in_range,
        discrete_triple,
        primitive,
        primitivity_method,
        delta_over_x,
        delta_over_y,
        endpoints_at_least_one,
        d_c_over_x,
        d_c_over_y,
        separated,
        pointed: p,
    })
}

fn realized(node: &Node) -> XCertificate {
    XCertificate::from_trace(node.trace.clone(), Membership::Composed)
}

/// Searches reachable values for a block: a single zero element (when
/// `allow_zero`) or a chain `X1 * X2` with `β1 + β2 ∈ [-1, -1 + 1/n)`, strict
/// on the left when `allow_zero` is false. Candidates are verified before
/// being returned.
fn search_block(
    alpha: &AlphaSpec,
    n: u64,
    budget: SearchBudget,
    allow_zero: bool,
) -> Result<std::result::Result<CnResult, Error>> {
    let minus_one = DimValue::constant(-Rational::one());
    let upper = DimValue::constant(Rational::new(1, n as i128) - Rational::one());
    let pd = Predim::new(alpha.clone());
    explore(alpha, budget, |nodes, j| {
        let new = &nodes[j];
        if allow_zero && new.beta.value(alpha).is_some_and(|v| v.is_zero()) {
            let x = realized(new);
            let r = check_block(x.pointed, x.trace, n, alpha)?;
            if r.ok() {
                return Ok(Some(r));
            }
        }
        // Pairs with the new node on either side, smaller chains first.
        let mut order: Vec<usize> = (0..=j).collect();
        order.sort_by_key(|&i| nodes[i].size);
        for i in order {
            let other = &nodes[i];
            if new.size + other.size - 1 > budget.max_size {
                continue;
            }
            let sum = new.beta + other.beta;
            let lo = pd.cmp(&sum, &minus_one);
            let hi = pd.cmp(&sum, &upper);
            let lo_ok = match lo {
                Ok(Ordering::Greater) => true,
                Ok(Ordering::Equal) => allow_zero,
                _ => false,
            };
            if !lo_ok || !matches!(hi, Ok(Ordering::Less)) {
                continue;
            }
            for (l, r) in [(other, new), (new, other)] {
                let x = chain(&realized(l), &realized(r), alpha)?;
                let res = check_block(x.pointed, x.trace, n, alpha)?;
                if res.ok() {
                    return Ok(Some(res));
                }
                if i == j {
                    break;
                }
            }
        }
        Ok(None)
    })
}

/// Whether a value in `(0, 1/n)` is possible at all: for exact α every
/// value is a multiple of `gcd(1, α)`.
fn positive_possible(alpha: &AlphaSpec, n: u64) -> bool {
    match alpha.exact_value() {
        Some(a) => rational::gcd(&Rational::one(), &a) < Rational::new(1, n as i128),
        None => true,
    }
}

/// `C_n`: a structure over a discrete pair `B = {x, y}` with a point `c`,
/// `(x, y, c)` discrete, `0 ≤ δ(C/B) < 1/n` and `C` primitive over `B`.
/// `budget.max_size` bounds `|C|`.
pub fn build_cn(alpha: &AlphaSpec, n: u64, budget: SearchBudget) -> Result<CnResult> {
    build_cn_with(alpha, n, budget, BlockOptions::default())
}

/// Choices for [`build_cn_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlockOptions {
    /// Look for `δ(C/B) > 0` first.
    pub prefer_positive: bool,
    /// Also search small graphs directly, preferring blocks with
    /// `d(c/x) ≥ 1` and `d(c/y) ≥ 1`.
    pub direct_search: bool,
}

/// As [`build_cn`]. With `prefer_positive` a block with `δ(C/B) > 0` is
/// sought first, falling back to `δ = 0` when none exists.
///
/// With `direct_search`, small blocks (up to [`SMALL_BLOCK_EXTRA`] points
/// besides `x, y, c`) are tried first; a separated one is returned at once,
/// otherwise the chain search runs and the small block is kept as a fallback.
pub fn build_cn_with(
    alpha: &AlphaSpec,
    n: u64,
    budget: SearchBudget,
    options: BlockOptions,
) -> Result<CnResult> {
    let BlockOptions {
        prefer_positive,
        direct_search,
    } = options;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let modes: &[bool] = if prefer_positive && positive_possible(alpha, n) {
        &[true, false]
    } else {
        &[false]
    };
    let mut last = None;
    for &positive in modes {
        let small = if direct_search {
            small_block(alpha, n, positive, budget.max_size)?
        } else {
            None
        };
        if let Some(r) = small.as_ref().filter(|r| r.separated) {
            return Ok(r.clone());
        }
        match search_block(alpha, n, budget, !positive)? {
            Ok(r) => return Ok(small.unwrap_or(r)),
            Err(e @ (Error::Unachievable(_) | Error::BudgetExceeded(_))) => {
                if let Some(r) = small {
                    return Ok(r);
                }
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one mode"))
}

/// Largest number of points outside `{x, y, c}` in the direct block search.
pub const SMALL_BLOCK_EXTRA: u32 = 4;

/// Direct search over graphs on `x = 0, y = 1, c = 2` and up to
/// [`SMALL_BLOCK_EXTRA`] further points, with no edges inside `{x, y, c}`.
/// Returns the first separated block, else the first valid one.
fn small_block(alpha: &AlphaSpec, n: u64, positive: bool, max_size: usize) -> Result<Option<CnResult>> {
    let pd = Predim::new(alpha.clone());
    let bound = DimValue::constant(Rational::new(1, n as i128));
    let mut fallback = None;
    for k in 1..=SMALL_BLOCK_EXTRA {
        if 3 + k as usize > max_size {
            break;
        }
        let mut slots = Vec::new();
        for u in 3..3 + k {
            for v in 0..u {
                slots.push((u, v));
            }
        }
        for mask in 0u32..1 << slots.len() {
            let e = mask.count_ones() as i128;
            let delta = DimValue::new(Rational::from(k as i128 + 1), Rational::from(e));
            let lo = pd.sign(&delta);
            let hi = pd.cmp(&delta, &bound);
            let in_range = match (lo, hi) {
                (Ok(Ordering::Greater), Ok(Ordering::Less)) => true,
                (Ok(Ordering::Equal), Ok(Ordering::Less)) => !positive,
                _ => false,
            };
            if !in_range {
                continue;
            }
            let edges: Vec<(Elem, Elem)> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            // every extra point needs an edge, or it splits off as a strong set
            if (3..3 + k).any(|u| !edges.iter().any(|&(a, b)| a == u || b == u)) {
                continue;
            }
            let s = Structure::graph(3 + k, &edges)?;
            if !oracle::is_in_k(&pd, &s)? {
                continue;
            }
            let p = PointedStructure::new(s, 0, 1, 2)?;
            let trace = Trace::Seed {
                seed: super::SeedKind::Small { extra: k, edges },
                beta: delta,
            };
            let r = check_block(p, trace, n, alpha)?;
            if !r.ok() {
                continue;
            }
            if r.separated {
                return Ok(Some(r));
            }
            fallback.get_or_insert(r);
        }
    }
    Ok(fallback)
}

fn glue_blocks(blocks: &[CnResult], shared: impl Fn(&CnResult) -> Remap) -> Result<Structure> {
    let mut acc = blocks[0].structure().clone();
    for b in &blocks[1..] {
        acc = glue(&acc, b.structure(), &shared(b))?.0;
    }
    Ok(acc)
}

/// The rank-0 witness: blocks `C_1 … C_N` glued over `{x, y, c}`.
#[derive(Clone, Debug, Serialize)]
pub struct Rank0Report {
    #[serde(skip)]
    pub structure: Structure,
    pub x: Elem,
    pub y: Elem,
    pub c: Elem,
    pub blocks: Vec<CnResult>,
    /// `d(c/{x,y})`, `d(c/x)`, `d(c/y)` in the glued structure.
    pub d_c_over_xy: DimValue,
    pub d_c_over_x: DimValue,
    pub d_c_over_y: DimValue,
    /// `d(c/{x,y}) < 1/N`.
    pub below_reciprocal: bool,
    pub endpoints_at_least_one: bool,
    /// Every `δ(C_n/B_n) ≥ 0`.
    pub blocks_nonnegative: bool,
}

impl Rank0Report {
    pub fn ok(&self) -> bool {
        self.below_reciprocal
            && self.endpoints_at_least_one
            && self.blocks_nonnegative
            && self.blocks.iter().all(CnResult::ok)
    }
}

pub fn rank0_witness(alpha: &AlphaSpec, blocks: u64, budget: SearchBudget) -> Result<Rank0Report> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    let parts = (1..=blocks)
        .map(|n| build_cn_with(alpha, n, budget, BlockOptions { prefer_positive: false, direct_search: true }))
        .collect::<Result<Vec<_>>>()?;
    let (x, y, c) = (parts[0].x, parts[0].y, parts[0].c);
    let structure = glue_blocks(&parts, |b| {
        [(b.x, x), (b.y, y), (b.c, c)].into_iter().collect()
    })?;
    let pd = Predim::new(alpha.clone());
    let d_c_over_xy = pd.d_rel(&structure, &set([c]), &set([x, y]))?;
    let d_c_over_x = pd.d_rel(&structure, &set([c]), &set([x]))?;
    let d_c_over_y = pd.d_rel(&structure, &set([c]), &set([y]))?;
    let one = DimValue::constant(Rational::one());
    let below_reciprocal =
        pd.cmp(&d_c_over_xy, &DimValue::constant(Rational::new(1, blocks as i128)))? == Ordering::Less;
    let endpoints_at_least_one =
        pd.cmp(&d_c_over_x, &one)? != Ordering::Less && pd.cmp(&d_c_over_y, &one)? != Ordering::Less;
    let mut blocks_nonnegative = true;
    for b in &parts {
        blocks_nonnegative &= pd.sign(&b.delta)? != Ordering::Less;
    }
    Ok(Rank0Report {
        structure,
        x,
        y,
        c,
        blocks: parts,
        d_c_over_xy,
        d_c_over_x,
        d_c_over_y,
        below_reciprocal,
        endpoints_at_least_one,
        blocks_nonnegative,
    })
}

/// `N` base pairs `B_n = {x_n, y_n}`, one block over each, sharing only `c`.
#[derive(Clone, Debug, Serialize)]
pub struct PairsReport {
    #[serde(skip)]
    pub structure: Structure,
    pub c: Elem,
    pub pairs: Vec<(Elem, Elem)>,
    pub blocks: Vec<CnResult>,
    /// `d(c/∪ B_n)`.
    pub d_all: DimValue,
    /// `d(c/∪ all B_n) < 1/N`.
    pub below_reciprocal: bool,
    /// `d(c/∪_{n<m} B_n)` for `m = 0 … N-1`.
    pub prefix: Vec<DimValue>,
    pub prefix_positive: Vec<bool>,
}

impl PairsReport {
    pub fn ok(&self) -> bool {
        self.below_reciprocal
            && self.prefix_positive.iter().all(|&p| p)
            && self.blocks.iter().all(CnResult::ok)
    }

    /// `B_0 ∪ … ∪ B_{m-1}`.
    pub fn prefix_base(&self, m: usize) -> ElemSet {
        self.pairs[..m].iter().flat_map(|&(x, y)| [x, y]).collect()
    }
}

pub fn pairs_witness(alpha: &AlphaSpec, blocks: u64, budget: SearchBudget) -> Result<PairsReport> {
    if blocks < 2 {
        return Err(Error::InvalidArgument("need at least two blocks".into()));
    }
    let parts = (1..=blocks)
        .map(|n| build_cn_with(alpha, n, budget, BlockOptions { prefer_positive: true, direct_search: true }))
        .collect::<Result<Vec<_>>>()?;
    let c = parts[0].c;
    let mut structure = parts[0].structure().clone();
    let mut pairs = vec![(parts[0].x, parts[0].y)];
    for b in &parts[1..] {
        let identify: Remap = [(b.c, c)].into_iter().collect();
        let (s, map) = glue(&structure, b.structure(), &identify)?;
        pairs.push((map[&b.x], map[&b.y]));
        structure = s;
    }
    let pd = Predim::new(alpha.clone());
    let mut report = PairsReport {
        structure,
        c,
        pairs,
        blocks: parts,
        d_all: DimValue::zero(),
        below_reciprocal: false,
        prefix: Vec::new(),
        prefix_positive: Vec::new(),
    };
    let all = report.prefix_base(blocks as usize);
    report.d_all = pd.d_rel(&report.structure, &set([c]), &all)?;
    report.below_reciprocal = pd.cmp(
        &report.d_all,
        &DimValue::constant(Rational::new(1, blocks as i128)),
    )? == Ordering::Less;
    for m in 0..blocks as usize {
        let base = report.prefix_base(m);
        let d = pd.d_rel(&report.structure, &set([c]), &base)?;
        report.prefix_positive.push(pd.sign(&d)? == Ordering::Greater);
        report.prefix.push(d);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn exact(n: i128, d: i128) -> AlphaSpec {
        AlphaSpec::exact(ratio(n, d)).unwrap()
    }

    #[test]
    fn cn_at_one_half_is_zero_block() {
        let a = exact(1, 2);
        for n in 1..=4 {
            let r = build_cn(&a, n, SearchBudget::default()).unwrap();
            assert!(r.ok(), "{r:?}");
            assert_eq!(r.delta.value(&a), Some(Rational::zero()));
            assert_eq!(r.primitivity_method, Method::Exhaustive);
        }
    }

    #[test]
    fn cn_budget() {
        let a = exact(1, 2);
        let tight = SearchBudget { max_size: 10, ..SearchBudget::default() };
        assert!(matches!(build_cn(&a, 9, tight), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn positive_block_when_lattice_allows() {
        let a = exact(5, 8);
        let opts = BlockOptions { prefer_positive: true, direct_search: true };
        let r = build_cn_with(&a, 3, SearchBudget::default(), opts).unwrap();
        assert!(r.ok());
        assert!(r.delta.value(&a).unwrap() > Rational::zero());
        let half = exact(1, 2);
        let r = build_cn_with(&half, 2, SearchBudget::default(), opts).unwrap();
        assert_eq!(r.delta.value(&half), Some(Rational::zero()));
    }

    #[test]
    fn rank0_one_block() {
        let a = exact(1, 2);
        let r = rank0_witness(&a, 1, SearchBudget::default()).unwrap();
        assert!(r.ok(), "{r:?}");
        assert!(r.blocks[0].separated);
        assert_eq!(r.d_c_over_xy.value(&a), Some(Rational::zero()));
        assert!(rank0_witness(&a, 0, SearchBudget::default()).is_err());
    }

    #[test]
    fn pairs_two_blocks() {
        let a = exact(1, 2);
        let r = pairs_witness(&a, 2, SearchBudget::default()).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.d_all.value(&a), Some(Rational::zero()));
        assert!(r.prefix[1].value(&a).unwrap() > Rational::zero());
    }
}
