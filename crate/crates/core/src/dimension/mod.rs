//! Predimension `δ_{β,α}(A) = β|A| - α·e(A)` and the dimension `d_N`.

mod alpha;
pub mod axioms;
mod flow;
mod minimize;

use std::cmp::Ordering;

use num_traits::{One, Zero};

pub use alpha::{cmp, AlphaSpec, DimValue};
pub use minimize::{Counts, Scale, Strategy};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::structure::{ElemSet, Structure};

/// Default node budget for a single minimization.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// `d_N(A)` with the inclusion-least set attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimResult {
    pub value: DimValue,
    pub minimizer: ElemSet,
}

/// Evaluation context: α, β and the minimization settings.
#[derive(Clone, Debug)]
pub struct Predim {
    scale: Scale,
    strategy: Strategy,
    budget: u64,
}

impl Predim {
    /// `δ_{1,α}`.
    pub fn new(alpha: AlphaSpec) -> Self {
        Predim {
            scale: Scale::new(alpha, Rational::one()),
            strategy: Strategy::Auto,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_beta(alpha: AlphaSpec, beta: Rational) -> Result<Self> {
        if beta <= Rational::zero() {
            return Err(Error::InvalidArgument(format!(
                "beta must be positive, got {}",
                rational::format(&beta)
            )));
        }
        Ok(Predim {
            scale: Scale::new(alpha, beta),
            strategy: Strategy::Auto,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn exact(alpha: Rational) -> Result<Self> {
        Ok(Predim::new(AlphaSpec::exact(alpha)?))
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn alpha(&self) -> &AlphaSpec {
        self.scale.alpha()
    }

    pub fn beta(&self) -> Rational {
        self.scale.beta()
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn value(&self, c: Counts) -> DimValue {
        DimValue::new(
            self.beta() * Rational::from(c.n as i128),
            Rational::from(c.e as i128),
        )
    }

    pub fn cmp(&self, x: &DimValue, y: &DimValue) -> Result<Ordering> {
        cmp(x, y, self.alpha())
    }

    pub fn sign(&self, x: &DimValue) -> Result<Ordering> {
        self.cmp(x, &DimValue::zero())
    }

    pub fn delta(&self, s: &Structure) -> DimValue {
        self.value(Counts::new(s.len() as i64, s.e_count() as i64))
    }

    pub(crate) fn counts_of(&self, s: &Structure, set: &ElemSet) -> Result<Counts> {
        check_subset(s, set)?;
        Ok(Counts::new(set.len() as i64, s.e_within(set) as i64))
    }

    /// `δ` of the substructure induced on `set`.
    pub fn delta_of(&self, s: &Structure, set: &ElemSet) -> Result<DimValue> {
        Ok(self.value(self.counts_of(s, set)?))
    }

    /// `δ(A/B) = δ(A ∪ B) - δ(B)`.
    pub fn delta_rel(&self, s: &Structure, a: &ElemSet, b: &ElemSet) -> Result<DimValue> {
        let ab: ElemSet = a.union(b).copied().collect();
        Ok(self.delta_of(s, &ab)? - self.delta_of(s, b)?)
    }

    /// `d_N(A)`: minimum of `δ` over `A ⊆ A' ⊆ N`, with the least minimizer.
    pub fn d_in(&self, n: &Structure, a: &ElemSet) -> Result<DimResult> {
        let (c, minimizer) =
            minimize::least_minimizer(&self.scale, n, a, self.strategy, self.budget)?;
        Ok(DimResult {
            value: self.value(c),
            minimizer,
        })
    }

    /// `d_N(A/B) = d_N(A ∪ B) - d_N(B)`.
    pub fn d_rel(&self, n: &Structure, a: &ElemSet, b: &ElemSet) -> Result<DimValue> {
        let ab: ElemSet = a.union(b).copied().collect();
        Ok(self.d_in(n, &ab)?.value - self.d_in(n, b)?.value)
    }

    /// `A ≤ N`.
    pub fn is_strong(&self, a: &ElemSet, n: &Structure) -> Result<bool> {
        // A is strong iff it is its own least minimizer.
        Ok(self.d_in(n, a)?.minimizer == *a)
    }

    /// `None` if every substructure has `δ ≥ 0`; otherwise an
    /// inclusion-minimal subset with negative `δ`.
    pub fn k_violation(&self, s: &Structure) -> Result<Option<ElemSet>> {
        let r = self.d_in(s, &ElemSet::new())?;
        if self.sign(&r.value)? != Ordering::Less {
            return Ok(None);
        }
        let mut w = r.minimizer;
        'shrink: loop {
            for &u in &w {
                let mut smaller = w.clone();
                smaller.remove(&u);
                let sub = s.induced(&smaller)?;
                let r = self.d_in(&sub, &ElemSet::new())?;
                if self.sign(&r.value)? == Ordering::Less {
                    w = r.minimizer;
                    continue 'shrink;
                }
            }
            return Ok(Some(w));
        }
    }

    pub fn is_in_k(&self, s: &Structure) -> Result<bool> {
        Ok(self.k_violation(s)?.is_none())
    }

    /// Generator of the group `βℤ + αℤ` for exact α.
    pub fn lattice_step(&self) -> Option<Rational> {
        self.alpha()
            .exact_value()
            .map(|a| rational::gcd(&self.beta(), &a))
    }
}

pub(crate) fn check_subset(s: &Structure, set: &ElemSet) -> Result<()> {
    match set.iter().find(|e| !s.contains(**e)) {
        Some(&e) => Err(Error::UnknownElement(e)),
        None => Ok(()),
    }
}
