//! The two composition operations and search over reachable values of `X`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use num_traits::{One, Zero};

use super::{
    chain_structure, copies_structure, find_seed, format_value, reciprocal_bound, Membership,
    EndpointFacts, Trace, XCertificate,
};
use crate::dimension::{cmp, AlphaSpec, DimValue, Predim};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn minus_one() -> DimValue {
    DimValue::constant(-Rational::one())
}

/// Free amalgam of `k` copies of `x` over `{a, b}`; `β' = kβ`.
/// Fails with `XRangeViolation` unless `kβ > -1`.
pub fn amalg_copies(x: &XCertificate, k: usize, alpha: &AlphaSpec) -> Result<XCertificate> {
    let beta = x.beta * Rational::from(k as i128);
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one copy".into()));
    }
    if cmp(&beta, &minus_one(), alpha)? != Ordering::Greater {
        return Err(Error::XRangeViolation(format_value(&beta, alpha)));
    }
    Ok(amalg_copies_unchecked(x, k, alpha))
}

/// As [`amalg_copies`] but builds the structure whatever the range,
/// marking the result as rejected when `kβ ≤ -1` or `kβ = 0` with `k > 1`.
pub fn amalg_copies_unchecked(x: &XCertificate, k: usize, alpha: &AlphaSpec) -> XCertificate {
    if k == 1 {
        return x.clone();
    }
    let beta = x.beta * Rational::from(k as i128);
    let pointed = copies_structure(&x.pointed, k);
    assert_eq!(pointed.beta(), beta, "copies identity");
    let membership = match cmp(&beta, &minus_one(), alpha) {
        Ok(Ordering::Greater) if x.beta.is_zero() => Membership::Rejected {
            reason: "copies of a zero element are not strictly minimal".into(),
        },
        Ok(Ordering::Greater) if x.is_member() => Membership::Composed,
        Ok(Ordering::Greater) => x.membership.clone(),
        _ => Membership::Rejected {
            reason: "relative dimension at most -1".into(),
        },
    };
    XCertificate {
        pointed,
        beta,
        trace: Trace::Copies {
            k,
            beta,
            child: Box::new(x.trace.clone()),
        },
        membership,
        endpoint_facts: None,
    }
}

/// Identifies `b1` with `a2` and amalgamates freely; `β' = β1 + β2 + 1`.
/// The result is in 𝒜 when `β1 + β2 ∈ (-2, -1]`. When `β' ∈ [0, 1)` the
/// lower bounds on `δ` over each endpoint are recorded.
pub fn chain(x1: &XCertificate, x2: &XCertificate, alpha: &AlphaSpec) -> Result<XCertificate> {
    let sum = x1.beta + x2.beta;
    let beta = sum + DimValue::constant(Rational::one());
    let pointed = chain_structure(&x1.pointed, &x2.pointed);
    assert_eq!(pointed.beta(), beta, "chain identity");
    let two = DimValue::constant(Rational::from(-2));
    let in_range = cmp(&sum, &two, alpha)? == Ordering::Greater
        && cmp(&sum, &minus_one(), alpha)? != Ordering::Greater;
    let membership = if !in_range {
        Membership::Rejected {
            reason: "beta1 + beta2 outside (-2, -1]".into(),
        }
    } else if x1.is_member() && x2.is_member() {
        Membership::Composed
    } else {
        Membership::Rejected {
            reason: "a part is not in the class".into(),
        }
    };
    let pd = Predim::new(alpha.clone());
    let endpoint_facts = if cmp(&beta, &DimValue::zero(), alpha)? != Ordering::Less
        && cmp(&beta, &DimValue::constant(Rational::one()), alpha)? == Ordering::Less
    {
        let whole = pd.delta(&pointed.s);
        let point = DimValue::constant(Rational::one());
        let delta_over_a = whole - point;
        let delta_over_b = whole - point;
        let holds = pd.cmp(&delta_over_a, &point)? != Ordering::Less
            && pd.cmp(&delta_over_b, &point)? != Ordering::Less;
        Some(EndpointFacts {
            delta_prime: beta,
            n: reciprocal_bound(&beta, alpha),
            delta_over_a,
            delta_over_b,
            holds,
        })
    } else {
        None
    };
    Ok(XCertificate {
        pointed,
        beta,
        trace: Trace::Chain {
            beta,
            left: Box::new(x1.trace.clone()),
            right: Box::new(x2.trace.clone()),
        },
        membership,
        endpoint_facts,
    })
}

/// Caps for the search over reachable values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest structure the search may build.
    pub max_size: usize,
    /// Largest number of distinct values it may settle.
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_size: 400,
            max_nodes: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub beta: DimValue,
    pub size: usize,
    pub trace: Trace,
}

/// Outcome of a search that did not reach its goal.
enum Miss {
    /// Every reachable value within the size cap was settled.
    Exhausted,
    /// Some move was cut off by the budget.
    Truncated,
}

/// Uniform-cost search over values of `X` reachable from the seed, ordered
/// by structure size (ties: larger β first). `goal` sees the settled nodes
/// and the index of the newest; it returns a result to stop the search.
pub(crate) fn explore<R>(
    alpha: &AlphaSpec,
    budget: SearchBudget,
    mut goal: impl FnMut(&[Node], usize) -> Result<Option<R>>,
) -> Result<std::result::Result<R, Error>> {
    let seed = find_seed(alpha)?;
    let rep = alpha.representative();
    let key = |b: &DimValue| b.eval(&rep);
    let mut heap: BinaryHeap<Reverse<(usize, Reverse<Rational>, usize)>> = BinaryHeap::new();
    let mut pending: Vec<Node> = Vec::new();
    let mut queued: HashMap<DimValue, usize> = HashMap::new();
    let mut settled: Vec<Node> = Vec::new();
    let mut done: HashMap<DimValue, usize> = HashMap::new();
    let mut truncated = false;

    let push = |node: Node,
                    heap: &mut BinaryHeap<_>,
                    pending: &mut Vec<Node>,
                    queued: &mut HashMap<DimValue, usize>,
                    done: &HashMap<DimValue, usize>,
                    truncated: &mut bool| {
        if node.size > budget.max_size {
            *truncated = true;
            return;
        }
        if done.contains_key(&node.beta) {
            return;
        }
        if queued.get(&node.beta).is_some_and(|&s| s <= node.size) {
            return;
        }
        queued.insert(node.beta, node.size);
        heap.push(Reverse((node.size, Reverse(key(&node.beta)), pending.len())));
        pending.push(node);
    };

    push(
        Node {
            beta: seed.beta,
            size: seed.size(),
            trace: seed.trace.clone(),
        },
        &mut heap,
        &mut pending,
        &mut queued,
        &done,
        &mut truncated,
    );

    let minus_two = DimValue::constant(Rational::from(-2));
    while let Some(Reverse((_, _, idx))) = heap.pop() {
        let node = pending[idx].clone();
        if done.contains_key(&node.beta) || queued.get(&node.beta) != Some(&node.size) {
            continue;
        }
        if settled.len() >= budget.max_nodes {
            return Ok(Err(Error::BudgetExceeded(format!(
                "search settled {} values",
                budget.max_nodes
            ))));
        }
        done.insert(node.beta, settled.len());
        settled.push(node.clone());
        let newest = settled.len() - 1;
        if let Some(r) = goal(&settled, newest)? {
            return Ok(Ok(r));
        }

        // copies of the new value
        if node.beta.q.is_zero() && node.beta.p.is_zero() {
            // zero cannot be copied
        } else {
            for k in 2usize.. {
                let b = node.beta * Rational::from(k as i128);
                if !matches!(cmp(&b, &minus_one(), alpha), Ok(Ordering::Greater)) {
                    break;
                }
                let size = k * (node.size - 2) + 2;
                if size > budget.max_size {
                    truncated = true;
                    break;
                }
                let trace = Trace::Copies {
                    k,
                    beta: b,
                    child: Box::new(node.trace.clone()),
                };
                push(
                    Node { beta: b, size, trace },
                    &mut heap,
                    &mut pending,
                    &mut queued,
                    &done,
                    &mut truncated,
                );
            }
        }
        // chains with every settled value, the new one included
        for other in &settled {
            let sum = node.beta + other.beta;
            let ok = matches!(cmp(&sum, &minus_two, alpha), Ok(Ordering::Greater))
                && matches!(cmp(&sum, &minus_one(), alpha), Ok(Ordering::Less | Ordering::Equal));
            if !ok {
                continue;
            }
            let b = sum + DimValue::constant(Rational::one());
            let trace = Trace::Chain {
                beta: b,
                left: Box::new(other.trace.clone()),
                right: Box::new(node.trace.clone()),
            };
            push(
                Node {
                    beta: b,
                    size: node.size + other.size - 1,
                    trace,
                },
                &mut heap,
                &mut pending,
                &mut queued,
                &done,
                &mut truncated,
            );
        }
    }
    let miss = if truncated { Miss::Truncated } else { Miss::Exhausted };
    Ok(Err(match miss {
        Miss::Truncated => Error::BudgetExceeded(format!(
            "no suitable value among structures of at most {} elements",
            budget.max_size
        )),
        Miss::Exhausted => Error::Unachievable("no reachable value qualifies".into()),
    }))
}

fn certificate(trace: Trace) -> XCertificate {
    let membership = match &trace {
        Trace::Seed { .. } => Membership::Verified {
            method: super::Method::Exhaustive,
        },
        _ => Membership::Composed,
    };
    XCertificate::from_trace(trace, membership)
}

/// A value `β ∈ (-1/m, 0]` of `X`, with the smallest structure found.
pub fn approach_zero(alpha: &AlphaSpec, m: u64, budget: SearchBudget) -> Result<XCertificate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let bound = DimValue::constant(-Rational::new(1, m as i128));
    let found = explore(alpha, budget, |nodes, i| {
        Ok(match cmp(&nodes[i].beta, &bound, alpha) {
            Ok(Ordering::Greater) => Some(nodes[i].trace.clone()),
            _ => None,
        })
    })?;
    found.map(certificate)
}

/// The smallest reachable element with `β = 0`, if the search finds one.
pub fn find_zero(alpha: &AlphaSpec, budget: SearchBudget) -> Result<Option<XCertificate>> {
    if !alpha.is_exact() {
        return Ok(None);
    }
    match explore(alpha, budget, |nodes, i| {
        Ok(nodes[i].beta.value(alpha).filter(Rational::is_zero).map(|_| nodes[i].trace.clone()))
    })? {
        Ok(trace) => Ok(Some(certificate(trace))),
        Err(Error::Unachievable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A value of `X` strictly between `gamma` and `delta`.
pub fn dense_find(
    alpha: &AlphaSpec,
    gamma: &Rational,
    delta: &Rational,
    budget: SearchBudget,
) -> Result<XCertificate> {
    if *gamma < -Rational::one() || gamma >= delta || *delta > Rational::zero() {
        return Err(Error::InvalidArgument(format!(
            "need -1 <= gamma < delta <= 0, got ({}, {})",
            rational::format(gamma),
            rational::format(delta)
        )));
    }
    if let Some(a) = alpha.exact_value() {
        // every value lies in gℤ, g = gcd(1, α)
        let g = rational::gcd(&Rational::one(), &a);
        let j = (gamma / g).floor() + Rational::one();
        if j * g >= *delta {
            return Err(Error::Unachievable(format!(
                "all values are multiples of {}; none lies in ({}, {})",
                rational::format(&g),
                rational::format(gamma),
                rational::format(delta)
            )));
        }
    }
    let lo = DimValue::constant(*gamma);
    let hi = DimValue::constant(*delta);
    let found = explore(alpha, budget, |nodes, i| {
        let b = &nodes[i].beta;
        let inside = matches!(cmp(b, &lo, alpha), Ok(Ordering::Greater))
            && matches!(cmp(b, &hi, alpha), Ok(Ordering::Less));
        Ok(inside.then(|| nodes[i].trace.clone()))
    })?;
    found.map(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn exact(n: i128, d: i128) -> AlphaSpec {
        AlphaSpec::exact(ratio(n, d)).unwrap()
    }

    #[test]
    fn copies_examples() {
        let a = exact(5, 11);
        let seed = super::super::seeds::certified(super::super::SeedKind::Ank { n: 3, k: 2 }, &a)
            .unwrap()
            .unwrap();
        assert_eq!(amalg_copies(&seed, 1, &a).unwrap(), seed);
        assert!(matches!(amalg_copies(&seed, 2, &a), Err(Error::XRangeViolation(_))));
        let off = amalg_copies_unchecked(&seed, 2, &a);
        assert!(!off.is_member());
        assert_eq!(off.beta.value(&a), Some(ratio(-18, 11)));
        let half = chain(&seed, &seed, &a).unwrap();
        assert_eq!(half.beta.value(&a), Some(ratio(-7, 11)));
        let five = chain(&half, &seed, &a).unwrap();
        assert_eq!(five.beta.value(&a), Some(ratio(-5, 11)));
        let two = amalg_copies(&five, 2, &a).unwrap();
        assert_eq!(two.beta.value(&a), Some(ratio(-10, 11)));
        assert_eq!(two.membership, Membership::Composed);
    }

    #[test]
    fn approach_zero_examples() {
        let a = exact(5, 11);
        let x = approach_zero(&a, 2, SearchBudget::default()).unwrap();
        assert_eq!(x.beta.value(&a), Some(ratio(-5, 11)));
        assert_eq!(x.size(), 7);
        let half = exact(1, 2);
        let z = approach_zero(&half, 5, SearchBudget::default()).unwrap();
        assert_eq!(z.beta.value(&half), Some(Rational::zero()));
        assert_eq!(z.size(), 11);
    }

    #[test]
    fn dense_find_lattice() {
        let half = exact(1, 2);
        let r = dense_find(&half, &ratio(-2, 5), &ratio(-3, 10), SearchBudget::default());
        assert!(matches!(r, Err(Error::Unachievable(_))));
        let a = exact(5, 11);
        let x = dense_find(&a, &ratio(-1, 2), &ratio(-2, 5), SearchBudget::default()).unwrap();
        assert_eq!(x.beta.value(&a), Some(ratio(-5, 11)));
    }

    #[test]
    fn zero_sizes() {
        let mut sizes = Vec::new();
        for (n, d) in [(1, 2), (5, 8), (7, 10), (5, 11)] {
            let a = exact(n, d);
            let mut z = find_zero(&a, SearchBudget::default()).unwrap().unwrap();
            assert!(z.verify(&a).unwrap().member);
            sizes.push(z.size());
        }
        assert_eq!(sizes, vec![11, 17, 9, 62]);
    }
}
