//! Pointed structures `(A, a, b, e)`, the class 𝒜 and the set `X` of values
//! `δ(A/{a,b})`, the two composition operations, and the witnesses built
//! from them.
//!
//! Element layout for every seed: `a = 0`, `b = 1`, `e = 2`, others from 3.

mod ops;
pub mod seeds;
pub mod verify;
mod witness;

use num_traits::{One, Zero};
use serde::Serialize;

pub use ops::{
    amalg_copies, amalg_copies_unchecked, approach_zero, chain, dense_find, find_zero,
    SearchBudget,
};
pub use seeds::{acceptability, find_seed, AcceptabilityInterval, SeedKind};
pub use verify::{is_in_a_class, AClassReport, Method};
pub use witness::{
    build_cn, build_cn_with, BlockOptions, pairs_witness, rank0_witness, CnResult, PairsReport, Rank0Report,
    EXHAUSTIVE_PRIMITIVE_MAX, SMALL_BLOCK_EXTRA,
};

use crate::dimension::{AlphaSpec, DimValue};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::structure::{glue, Elem, ElemSet, Remap, Structure};

/// A structure with distinguished base pair `{a, b}` and point `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedStructure {
    pub s: Structure,
    pub a: Elem,
    pub b: Elem,
    pub e: Elem,
}

impl PointedStructure {
    pub fn new(s: Structure, a: Elem, b: Elem, e: Elem) -> Result<Self> {
        for x in [a, b, e] {
            if !s.contains(x) {
                return Err(Error::UnknownElement(x));
            }
        }
        if a == b || a == e || b == e {
            return Err(Error::InvalidArgument("a, b, e must be distinct".into()));
        }
        Ok(PointedStructure { s, a, b, e })
    }

    pub fn base(&self) -> ElemSet {
        [self.a, self.b].into_iter().collect()
    }

    pub fn triple(&self) -> ElemSet {
        [self.a, self.b, self.e].into_iter().collect()
    }

    /// `δ(A/{a,b})` for `δ = δ_{1,α}`.
    pub fn beta(&self) -> DimValue {
        let n = self.s.len() as i128 - 2;
        let e = (self.s.e_count() - self.s.e_within(&self.base())) as i128;
        DimValue::new(Rational::from(n), Rational::from(e))
    }
}

/// How an element of `X` was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Trace {
    Seed {
        seed: SeedKind,
        beta: DimValue,
    },
    Copies {
        k: usize,
        beta: DimValue,
        child: Box<Trace>,
    },
    Chain {
        beta: DimValue,
        left: Box<Trace>,
        right: Box<Trace>,
    },
}

impl Trace {
    pub fn beta(&self) -> DimValue {
        match self {
            Trace::Seed { beta, .. } | Trace::Copies { beta, .. } | Trace::Chain { beta, .. } => *beta,
        }
    }

    /// Number of elements of the realized structure.
    pub fn size(&self) -> usize {
        match self {
            Trace::Seed { seed, .. } => seed.size(),
            Trace::Copies { k, child, .. } => k * (child.size() - 2) + 2,
            Trace::Chain { left, right, .. } => left.size() + right.size() - 1,
        }
    }

    /// Builds the structure described by the trace.
    pub fn realize(&self) -> PointedStructure {
        match self {
            Trace::Seed { seed, .. } => seed.build(),
            Trace::Copies { k, child, .. } => copies_structure(&child.realize(), *k),
            Trace::Chain { left, right, .. } => chain_structure(&left.realize(), &right.realize()),
        }
    }

    /// Rebuilds every node and checks that its stored `β` equals `δ(A/{a,b})`
    /// recomputed from the raw structure. Returns the realized root.
    pub fn revalidate(&self) -> std::result::Result<PointedStructure, String> {
        let p = match self {
            Trace::Seed { seed, .. } => seed.build(),
            Trace::Copies { k, child, .. } => copies_structure(&child.revalidate()?, *k),
            Trace::Chain { left, right, .. } => {
                chain_structure(&left.revalidate()?, &right.revalidate()?)
            }
        };
        if p.beta() != self.beta() {
            return Err(format!(
                "stored beta {} but structure gives {}",
                self.beta(),
                p.beta()
            ));
        }
        Ok(p)
    }
}

/// `k` copies of `p` freely amalgamated over `{a, b}`; `e` from the first.
pub(crate) fn copies_structure(p: &PointedStructure, k: usize) -> PointedStructure {
    let mut s = p.s.clone();
    let identify: Remap = [(p.a, p.a), (p.b, p.b)].into_iter().collect();
    for _ in 1..k {
        s = glue(&s, &p.s, &identify).expect("copies share only the base").0;
    }
    PointedStructure { s, ..p.clone() }
}

/// `b1` identified with `a2`; distinguished `(a1, b2, e1)`.
pub(crate) fn chain_structure(p1: &PointedStructure, p2: &PointedStructure) -> PointedStructure {
    let identify: Remap = [(p2.a, p1.b)].into_iter().collect();
    let (s, map) = glue(&p1.s, &p2.s, &identify).expect("chain shares one point");
    PointedStructure {
        s,
        a: p1.a,
        b: map[&p2.b],
        e: p1.e,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership {
    /// All four clauses checked.
    Verified { method: Method },
    /// Follows from the composition rules applied to verified parts.
    Composed,
    /// Known not to be in 𝒜.
    Rejected { reason: String },
}

/// Facts recorded for a chain whose value `δ' = β1 + β2 + 1` lies in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndpointFacts {
    pub delta_prime: DimValue,
    /// Largest `n` with `δ' < 1/n`; absent when `δ' = 0`.
    pub n: Option<u64>,
    /// `δ(A*/a1)`.
    pub delta_over_a: DimValue,
    /// `δ(A*/b2)`.
    pub delta_over_b: DimValue,
    pub holds: bool,
}

/// A pointed structure together with its value in `X` and provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XCertificate {
    pub pointed: PointedStructure,
    pub beta: DimValue,
    pub trace: Trace,
    pub membership: Membership,
    pub endpoint_facts: Option<EndpointFacts>,
}

impl XCertificate {
    pub fn from_trace(trace: Trace, membership: Membership) -> Self {
        let pointed = trace.realize();
        XCertificate {
            beta: pointed.beta(),
            pointed,
            trace,
            membership,
            endpoint_facts: None,
        }
    }

    pub fn size(&self) -> usize {
        self.pointed.s.len()
    }

    pub fn is_member(&self) -> bool {
        !matches!(self.membership, Membership::Rejected { .. })
    }

    /// Re-checks membership (exhaustively when feasible) and records the outcome.
    pub fn verify(&mut self, alpha: &AlphaSpec) -> Result<AClassReport> {
        let report = verify::verify(&self.pointed, alpha)?;
        self.membership = if report.member {
            Membership::Verified {
                method: report.method,
            }
        } else {
            Membership::Rejected {
                reason: failing_clause(&report),
            }
        };
        Ok(report)
    }
}

pub(crate) fn failing_clause(r: &AClassReport) -> String {
    let mut failed = Vec::new();
    if !r.k0 {
        failed.push("not in K");
    }
    if !r.discrete_triple {
        failed.push("relation on {a,b,e}");
    }
    if !r.strictly_minimal {
        failed.push("not strictly minimal over {a,b}");
    }
    if !r.in_range {
        failed.push("relative dimension outside (-1, 0]");
    }
    failed.join("; ")
}

/// Supremum of `v` over the admissible α.
pub(crate) fn sup_value(v: &DimValue, alpha: &AlphaSpec) -> Rational {
    match alpha {
        AlphaSpec::Exact(a) => v.eval(a),
        AlphaSpec::Irrational { lo, hi } => {
            if v.q >= Rational::zero() {
                v.eval(lo)
            } else {
                v.eval(hi)
            }
        }
    }
}

/// Largest `n` with `v < 1/n` for every admissible α, given `0 < v < 1`.
pub(crate) fn reciprocal_bound(v: &DimValue, alpha: &AlphaSpec) -> Option<u64> {
    let sup = sup_value(v, alpha);
    if sup <= Rational::zero() {
        return None;
    }
    let inv = Rational::one() / sup;
    let n = inv.ceil().to_integer() - 1;
    Some(n.max(0) as u64)
}

pub(crate) fn format_value(v: &DimValue, alpha: &AlphaSpec) -> String {
    match v.value(alpha) {
        Some(r) => rational::format(&r),
        None => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn copies_and_chain_sizes() {
        let p = seeds::a_nk(3, 2);
        assert_eq!(p.s.len(), 8);
        let c = copies_structure(&p, 3);
        assert_eq!(c.s.len(), 3 * 6 + 2);
        assert_eq!(c.beta(), p.beta() * Rational::from(3));
        let ch = chain_structure(&p, &p);
        assert_eq!(ch.s.len(), 15);
        let one = DimValue::constant(Rational::one());
        assert_eq!(ch.beta(), p.beta() + p.beta() + one);
        assert!(ch.s.is_discrete_on(&ch.triple()));
    }

    #[test]
    fn reciprocal_bounds() {
        let a = AlphaSpec::exact(ratio(5, 11)).unwrap();
        let v = DimValue::constant(ratio(2, 11));
        assert_eq!(reciprocal_bound(&v, &a), Some(5));
        let v = DimValue::constant(ratio(1, 3));
        assert_eq!(reciprocal_bound(&v, &a), Some(2));
        assert_eq!(reciprocal_bound(&DimValue::zero(), &a), None);
    }
}
