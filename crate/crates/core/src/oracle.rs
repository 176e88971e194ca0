//! Exhaustive reference implementations, straight from the definitions.
//!
//! Every query tabulates `δ` over all sets between a base and an ambient
//! structure, so the cost is exponential in the number of free elements.
//! Nothing here shares code with the minimization engine.

use std::cmp::Ordering;

use crate::dimension::{check_subset, DimValue, Predim};
use crate::error::{Error, Result};
use crate::structure::{ElemSet, Structure};

/// Largest number of free elements the oracle accepts.
pub const MAX_FREE: usize = 20;

struct Table<'a> {
    pd: &'a Predim,
    base: ElemSet,
    free: Vec<u32>,
    vals: Vec<DimValue>,
}

impl<'a> Table<'a> {
    fn new(pd: &'a Predim, ambient: &Structure, base: &ElemSet) -> Result<Self> {
        check_subset(ambient, base)?;
        let free: Vec<u32> = ambient
            .elements()
            .iter()
            .copied()
            .filter(|e| !base.contains(e))
            .collect();
        if free.len() > MAX_FREE {
            return Err(Error::BudgetExceeded(format!(
                "oracle limited to {MAX_FREE} free elements, got {}",
                free.len()
            )));
        }
        let vals = (0u32..1 << free.len())
            .map(|mask| {
                let mut set = base.clone();
                set.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &e)| e),
                );
                pd.delta_of(ambient, &set)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            pd,
            base: base.clone(),
            free,
            vals,
        })
    }

    fn full(&self) -> u32 {
        (1u32 << self.free.len()) - 1
    }

    fn set(&self, mask: u32) -> ElemSet {
        let mut s = self.base.clone();
        s.extend(
            self.free
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e),
        );
        s
    }

    fn cmp(&self, x: u32, y: u32) -> Result<Ordering> {
        self.pd.cmp(&self.vals[x as usize], &self.vals[y as usize])
    }

    /// `sub ≤ sup`: no set between them has smaller `δ` than `sub`.
    fn strong(&self, sub: u32, sup: u32) -> Result<bool> {
        let extra = sup & !sub;
        let mut t = extra;
        loop {
            if self.cmp(sub | t, sub)? == Ordering::Less {
                return Ok(false);
            }
            if t == 0 {
                return Ok(true);
            }
            t = (t - 1) & extra;
        }
    }

    /// `base ≤_i sup`: no proper subset of `sup` containing the base is strong in `sup`.
    fn intrinsic(&self, sup: u32) -> Result<bool> {
        let mut t = sup;
        loop {
            if t != sup && self.strong(t, sup)? {
                return Ok(false);
            }
            if t == 0 {
                return Ok(true);
            }
            t = (t - 1) & sup;
        }
    }
}

/// Minimum of `δ` over sets between `a` and `n`, with every minimizer.
pub fn d_in(pd: &Predim, n: &Structure, a: &ElemSet) -> Result<(DimValue, Vec<ElemSet>)> {
    let t = Table::new(pd, n, a)?;
    let mut best = 0u32;
    let mut argmins = vec![0u32];
    for m in 1..=t.full() {
        match t.cmp(m, best)? {
            Ordering::Less => {
                best = m;
                argmins = vec![m];
            }
            Ordering::Equal => argmins.push(m),
            Ordering::Greater => {}
        }
    }
    Ok((
        t.vals[best as usize],
        argmins.into_iter().map(|m| t.set(m)).collect(),
    ))
}

pub fn is_strong(pd: &Predim, a: &ElemSet, n: &Structure) -> Result<bool> {
    let t = Table::new(pd, n, a)?;
    t.strong(0, t.full())
}

/// Every subset has `δ ≥ 0`.
pub fn is_in_k(pd: &Predim, s: &Structure) -> Result<bool> {
    let t = Table::new(pd, s, &ElemSet::new())?;
    for v in &t.vals {
        if pd.sign(v)? == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// No proper subset of `b` containing `a` is strong in `b`.
pub fn is_intrinsic(pd: &Predim, a: &ElemSet, b: &Structure) -> Result<bool> {
    let t = Table::new(pd, b, a)?;
    t.intrinsic(t.full())
}

/// Union of all `B ⊆ m` with `a ≤_i B`.
pub fn icl(pd: &Predim, m: &Structure, a: &ElemSet) -> Result<ElemSet> {
    let t = Table::new(pd, m, a)?;
    let mut union = 0u32;
    for sup in 0..=t.full() {
        if sup & !union != 0 && t.intrinsic(sup)? {
            union |= sup;
        }
    }
    Ok(t.set(union))
}

/// Intersection of all strong substructures of `m` containing `a`.
pub fn strong_intersection(pd: &Predim, m: &Structure, a: &ElemSet) -> Result<ElemSet> {
    let t = Table::new(pd, m, a)?;
    let mut meet = t.full();
    for sub in 0..=t.full() {
        if sub & meet != meet && t.strong(sub, t.full())? {
            meet &= sub;
        }
    }
    Ok(t.set(meet))
}

/// `b ≤ c` with no strong set strictly between.
pub fn is_primitive(pd: &Predim, b: &ElemSet, c: &Structure) -> Result<bool> {
    let t = Table::new(pd, c, b)?;
    if !t.strong(0, t.full())? {
        return Err(Error::NotStrong);
    }
    for mid in 1..t.full() {
        if t.strong(mid, t.full())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `δ(B/A) < 0` and `δ(B/A) < δ(B'/A)` for every `A ⊆ B' ⊊ B`.
pub fn is_minimal_pair(pd: &Predim, a: &ElemSet, b: &Structure) -> Result<bool> {
    let t = Table::new(pd, b, a)?;
    let full = t.full();
    if t.cmp(full, 0)? != Ordering::Less {
        return Ok(false);
    }
    for mid in 0..full {
        if t.cmp(full, mid)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::structure::set;

    fn pd(n: i128, d: i128) -> Predim {
        Predim::exact(ratio(n, d)).unwrap()
    }

    #[test]
    fn cherry_examples() {
        let s = Structure::graph(3, &[(2, 0), (2, 1)]).unwrap();
        let p = pd(2, 3);
        let (v, mins) = d_in(&p, &s, &set([0, 1])).unwrap();
        assert_eq!(v.value(p.alpha()), Some(ratio(5, 3)));
        assert_eq!(mins, vec![set([0, 1, 2])]);
        assert!(is_intrinsic(&p, &set([0, 1]), &s).unwrap());
        assert_eq!(icl(&p, &s, &set([0, 1])).unwrap(), set([0, 1, 2]));
        assert_eq!(strong_intersection(&p, &s, &set([0, 1])).unwrap(), set([0, 1, 2]));
    }

    #[test]
    fn single_edge_is_not_intrinsic() {
        let s = Structure::graph(3, &[(2, 0)]).unwrap();
        assert!(!is_intrinsic(&pd(1, 2), &set([0, 1]), &s).unwrap());
    }

    #[test]
    fn minimal_pair_examples() {
        let s = Structure::graph(4, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let p = pd(1, 2);
        assert!(is_minimal_pair(&p, &set([0, 1, 2]), &s).unwrap());
        let mut t = s.clone();
        t.add_element(4);
        assert!(!is_minimal_pair(&p, &set([0, 1, 2]), &t).unwrap());
    }

    #[test]
    fn primitivity_requires_strong_base() {
        let s = Structure::graph(3, &[(2, 0), (2, 1)]).unwrap();
        assert_eq!(is_primitive(&pd(2, 3), &set([0, 1]), &s), Err(Error::NotStrong));
        let e = Structure::graph(3, &[(2, 0)]).unwrap();
        assert_eq!(is_primitive(&pd(1, 2), &set([0, 1]), &e), Ok(true));
    }
}
