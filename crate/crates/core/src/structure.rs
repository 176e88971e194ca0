//! Finite relational structures.
//!
//! Relations are symmetric and hold only of distinct elements, so an instance
//! is stored as a sorted element set. The same set may carry several symbols;
//! each occurrence counts separately in [`Structure::e_count`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Element id, scoped to a structure.
pub type Elem = u32;
pub type ElemSet = BTreeSet<Elem>;

/// Map from the elements of one structure to their ids in another.
pub type Remap = BTreeMap<Elem, Elem>;

/// Symbol used by [`Signature::graph`].
pub const EDGE: &str = "E";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, arity) in symbols {
            let name = name.into();
            if arity < 2 {
                return Err(Error::InvalidSignature(format!(
                    "symbol `{name}` has arity {arity}, need at least 2"
                )));
            }
            if map.insert(name.clone(), arity).is_some() {
                return Err(Error::InvalidSignature(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Signature { symbols: map })
    }

    /// A single binary symbol `E`.
    pub fn graph() -> Self {
        Signature::new([(EDGE, 2)]).expect("static signature")
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.symbols.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(s, a)| (s.as_str(), *a))
    }

    /// True for a signature with exactly one symbol, of arity 2.
    pub fn is_graph(&self) -> bool {
        self.symbols.len() == 1 && self.symbols.values().all(|&a| a == 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    signature: Signature,
    elements: ElemSet,
    instances: BTreeMap<String, BTreeSet<Vec<Elem>>>,
}

impl Structure {
    pub fn new(signature: Signature) -> Self {
        let instances = signature
            .symbols
            .keys()
            .map(|s| (s.clone(), BTreeSet::new()))
            .collect();
        Structure {
            signature,
            elements: ElemSet::new(),
            instances,
        }
    }

    /// Discrete structure on the given elements.
    pub fn discrete(signature: Signature, elements: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Structure::new(signature);
        s.elements.extend(elements);
        s
    }

    /// Graph on `0..n` with the given edges.
    pub fn graph(n: u32, edges: &[(Elem, Elem)]) -> Result<Self> {
        let mut s = Structure::discrete(Signature::graph(), 0..n);
        for &(u, v) in edges {
            s.add_instance(EDGE, [u, v])?;
        }
        Ok(s)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn elements(&self) -> &ElemSet {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.contains(&e)
    }

    pub fn max_elem(&self) -> Option<Elem> {
        self.elements.iter().next_back().copied()
    }

    /// Smallest id greater than every element.
    pub fn fresh_id(&self) -> Elem {
        self.max_elem().map_or(0, |m| m + 1)
    }

    pub fn add_element(&mut self, e: Elem) -> bool {
        self.elements.insert(e)
    }

    /// Adds an instance of `symbol`. Returns false if it was already present.
    pub fn add_instance(&mut self, symbol: &str, elems: impl IntoIterator<Item = Elem>) -> Result<bool> {
        let arity = self
            .signature
            .arity(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        let mut tuple: Vec<Elem> = elems.into_iter().collect();
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        tuple.sort_unstable();
        if tuple.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::RepeatedElement);
        }
        if let Some(&e) = tuple.iter().find(|e| !self.elements.contains(e)) {
            return Err(Error::UnknownElement(e));
        }
        Ok(self.instances.get_mut(symbol).expect("symbol checked").insert(tuple))
    }

    pub fn has_instance(&self, symbol: &str, elems: &[Elem]) -> bool {
        let mut tuple = elems.to_vec();
        tuple.sort_unstable();
        self.instances.get(symbol).is_some_and(|set| set.contains(&tuple))
    }

    pub fn instances_of(&self, symbol: &str) -> impl Iterator<Item = &[Elem]> {
        self.instances
            .get(symbol)
            .into_iter()
            .flat_map(|set| set.iter().map(Vec::as_slice))
    }

    /// All `(symbol, instance)` pairs in canonical order.
    pub fn instances(&self) -> impl Iterator<Item = (&str, &[Elem])> {
        self.instances
            .iter()
            .flat_map(|(sym, set)| set.iter().map(move |t| (sym.as_str(), t.as_slice())))
    }

    /// `e(S)`: number of relation instances, counted once per symbol.
    pub fn e_count(&self) -> usize {
        self.instances.values().map(BTreeSet::len).sum()
    }

    fn check_subset(&self, set: &ElemSet) -> Result<()> {
        match set.iter().find(|e| !self.elements.contains(e)) {
            Some(&e) => Err(Error::UnknownElement(e)),
            None => Ok(()),
        }
    }

    /// Substructure on `set` with exactly the instances lying inside it.
    pub fn induced(&self, set: &ElemSet) -> Result<Structure> {
        self.check_subset(set)?;
        let instances = self
            .instances
            .iter()
            .map(|(sym, tuples)| {
                let kept = tuples
                    .iter()
                    .filter(|t| t.iter().all(|e| set.contains(e)))
                    .cloned()
                    .collect();
                (sym.clone(), kept)
            })
            .collect();
        Ok(Structure {
            signature: self.signature.clone(),
            elements: set.clone(),
            instances,
        })
    }

    /// Number of instances inside `set` (no validation of `set`).
    pub fn e_within(&self, set: &ElemSet) -> usize {
        self.instances()
            .filter(|(_, t)| t.iter().all(|e| set.contains(e)))
            .count()
    }

    /// `e(A,B)`: instances inside `A ∪ B` meeting both `A` and `B`.
    pub fn e_cross(&self, a: &ElemSet, b: &ElemSet) -> Result<usize> {
        self.check_subset(a)?;
        self.check_subset(b)?;
        if !a.is_disjoint(b) {
            return Err(Error::SetsNotDisjoint);
        }
        Ok(self
            .instances()
            .filter(|(_, t)| {
                t.iter().all(|e| a.contains(e) || b.contains(e))
                    && t.iter().any(|e| a.contains(e))
                    && t.iter().any(|e| b.contains(e))
            })
            .count())
    }

    /// `e(A,B,C)`: instances inside `A ∪ B ∪ C` meeting both `A` and `C`.
    pub fn e_cross3(&self, a: &ElemSet, b: &ElemSet, c: &ElemSet) -> Result<usize> {
        for s in [a, b, c] {
            self.check_subset(s)?;
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::SetsNotDisjoint);
        }
        Ok(self
            .instances()
            .filter(|(_, t)| {
                t.iter().all(|e| a.contains(e) || b.contains(e) || c.contains(e))
                    && t.iter().any(|e| a.contains(e))
                    && t.iter().any(|e| c.contains(e))
            })
            .count())
    }

    /// True if no instance lies inside `set`.
    pub fn is_discrete_on(&self, set: &ElemSet) -> bool {
        self.e_within(set) == 0
    }

    /// Applies an injective renaming defined on every element.
    pub fn rename(&self, map: &Remap) -> Result<Structure> {
        let mut out = Structure::new(self.signature.clone());
        for e in &self.elements {
            let img = *map.get(e).ok_or(Error::UnknownElement(*e))?;
            if !out.elements.insert(img) {
                return Err(Error::InvalidArgument("renaming is not injective".into()));
            }
        }
        for (sym, t) in self.instances() {
            out.add_instance(sym, t.iter().map(|e| map[e]))?;
        }
        Ok(out)
    }

    /// Relabels elements as `0..n` in increasing order.
    pub fn compact(&self) -> (Structure, Remap) {
        let map: Remap = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as Elem))
            .collect();
        (self.rename(&map).expect("compact map is a bijection"), map)
    }
}

/// `B ⊗_A C`: union of the two structures, adding no instances beyond theirs.
/// Elements are identified by id; `base` must be exactly the shared part.
pub fn free_amalgam(b: &Structure, c: &Structure, base: &ElemSet) -> Result<Structure> {
    if b.signature != c.signature {
        return Err(Error::SignatureMismatch);
    }
    let shared: ElemSet = b.elements.intersection(&c.elements).copied().collect();
    if &shared != base {
        return Err(Error::OverlapViolation);
    }
    if b.induced(base)? != c.induced(base)? {
        return Err(Error::BaseMismatch);
    }
    let mut out = b.clone();
    out.elements.extend(c.elements.iter().copied());
    for (sym, t) in c.instances() {
        out.instances
            .get_mut(sym)
            .expect("same signature")
            .insert(t.to_vec());
    }
    Ok(out)
}

/// Freely amalgamates `c` onto `b`, identifying each `c`-element in
/// `identify` with its `b`-image and giving the other `c`-elements fresh ids.
/// Returns the amalgam and the renaming applied to `c`.
pub fn glue(b: &Structure, c: &Structure, identify: &Remap) -> Result<(Structure, Remap)> {
    let mut next = b.fresh_id();
    let mut map = Remap::new();
    for &e in c.elements() {
        let img = match identify.get(&e) {
            Some(&t) => {
                if !b.contains(t) {
                    return Err(Error::UnknownElement(t));
                }
                t
            }
            None => {
                next += 1;
                next - 1
            }
        };
        map.insert(e, img);
    }
    if let Some(&e) = identify.keys().find(|e| !c.contains(**e)) {
        return Err(Error::UnknownElement(e));
    }
    let renamed = c.rename(&map)?;
    let base: ElemSet = identify.values().copied().collect();
    Ok((free_amalgam(b, &renamed, &base)?, map))
}

pub fn set<I: IntoIterator<Item = Elem>>(items: I) -> ElemSet {
    items.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Structure {
        Structure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn star(leaves: u32) -> Structure {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Structure::graph(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn induced_examples() {
        let t = k3();
        assert_eq!(t.induced(&set([0, 1, 2])).unwrap(), t);
        let e = t.induced(&set([0, 2])).unwrap();
        assert_eq!(e.e_count(), 1);
        assert!(e.has_instance(EDGE, &[2, 0]));
        let p = star(5).induced(&set([0])).unwrap();
        assert_eq!((p.len(), p.e_count()), (1, 0));
        assert_eq!(t.induced(&set([7])), Err(Error::UnknownElement(7)));
    }

    #[test]
    fn instance_validation() {
        let mut s = Structure::discrete(Signature::graph(), 0..3);
        assert_eq!(s.add_instance(EDGE, [1, 1]), Err(Error::RepeatedElement));
        assert_eq!(s.add_instance(EDGE, [1, 5]), Err(Error::UnknownElement(5)));
        assert!(matches!(
            s.add_instance(EDGE, [0, 1, 2]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(s.add_instance(EDGE, [2, 1]).unwrap());
        assert!(!s.add_instance(EDGE, [1, 2]).unwrap());
    }

    #[test]
    fn multiplicity_across_symbols() {
        let sig = Signature::new([("R", 2), ("S", 2)]).unwrap();
        let mut s = Structure::discrete(sig, 0..2);
        s.add_instance("R", [0, 1]).unwrap();
        s.add_instance("S", [0, 1]).unwrap();
        assert_eq!(s.e_count(), 2);
    }

    #[test]
    fn free_amalgam_path() {
        // B = edge {a,x}, C = edge {a,y}, A = {a}
        let b = Structure::graph(2, &[(0, 1)]).unwrap();
        let mut c = Structure::discrete(Signature::graph(), [0, 2]);
        c.add_instance(EDGE, [0, 2]).unwrap();
        let m = free_amalgam(&b, &c, &set([0])).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.e_count(), 2);
        assert!(!m.has_instance(EDGE, &[1, 2]));
        assert_eq!(free_amalgam(&b, &b, &set([0, 1])).unwrap(), b);
    }

    #[test]
    fn free_amalgam_errors() {
        let b = Structure::graph(2, &[(0, 1)]).unwrap();
        let c = Structure::discrete(Signature::graph(), [0, 1, 2]);
        assert_eq!(free_amalgam(&b, &c, &set([0, 1])), Err(Error::BaseMismatch));
        assert_eq!(free_amalgam(&b, &c, &set([0])), Err(Error::OverlapViolation));
    }

    #[test]
    fn glue_renames_fresh() {
        let b = Structure::graph(2, &[(0, 1)]).unwrap();
        let (m, map) = glue(&b, &b, &Remap::from([(0, 0)])).unwrap();
        assert_eq!(map[&1], 2);
        assert_eq!(m.len(), 3);
        assert!(m.has_instance(EDGE, &[0, 2]));
    }

    #[test]
    fn cross_counts() {
        let s = star(4);
        assert_eq!(s.e_cross(&set([0]), &set([1, 2, 3, 4])).unwrap(), 4);
        assert_eq!(s.e_cross(&set([1]), &set([2])).unwrap(), 0);
        assert_eq!(s.e_cross(&set([0]), &set([0, 1])), Err(Error::SetsNotDisjoint));
        // path 1-0-2 plus edge 2-3: A={1}, B={0}, C={2,3}; only A–C instances count
        let g = Structure::graph(4, &[(1, 0), (0, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(g.e_cross3(&set([1]), &set([0]), &set([2, 3])).unwrap(), 1);
    }
}
