//! Induced embeddings fixing a base set pointwise.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use crate::graph::{bits, Graph};
use crate::structure::{Elem, ElemSet, Structure};

/// Injective map that preserves and reflects every relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    map: BTreeMap<Elem, Elem>,
}

impl Embedding {
    pub fn get(&self, e: Elem) -> Option<Elem> {
        self.map.get(&e).copied()
    }

    pub fn map(&self) -> &BTreeMap<Elem, Elem> {
        &self.map
    }

    pub fn image(&self) -> ElemSet {
        self.map.values().copied().collect()
    }

    /// Images listed in ascending order of source element.
    pub fn image_vec(&self) -> Vec<Elem> {
        self.map.values().copied().collect()
    }
}

type Index<'a> = HashMap<Elem, Vec<(&'a str, &'a [Elem])>>;

fn index(s: &Structure) -> Index<'_> {
    let mut idx: Index<'_> = HashMap::new();
    for (sym, t) in s.instances() {
        for &e in t {
            idx.entry(e).or_default().push((sym, t));
        }
    }
    idx
}

fn base_compatible(pattern: &Structure, base: &ElemSet, target: &Structure) -> bool {
    if pattern.signature() != target.signature() {
        return false;
    }
    if !base.iter().all(|e| pattern.contains(*e) && target.contains(*e)) {
        return false;
    }
    matches!(
        (pattern.induced(base), target.induced(base)),
        (Ok(x), Ok(y)) if x == y
    )
}

/// Free elements of `pattern` ordered so that each one, where possible, is
/// adjacent to something already placed.
fn placement_order(pattern: &Structure, base: &ElemSet) -> Vec<Elem> {
    let idx = index(pattern);
    let mut placed: ElemSet = base.clone();
    let mut order = Vec::new();
    let mut rest: Vec<Elem> = pattern
        .elements()
        .iter()
        .copied()
        .filter(|e| !base.contains(e))
        .collect();
    while !rest.is_empty() {
        let score = |e: &Elem| {
            idx.get(e).map_or(0, |v| {
                v.iter()
                    .filter(|(_, t)| t.iter().any(|x| placed.contains(x)))
                    .count()
            })
        };
        let (pos, _) = rest
            .iter()
            .enumerate()
            .max_by_key(|(i, e)| (score(e), std::cmp::Reverse(*i)))
            .expect("nonempty");
        let e = rest.remove(pos);
        placed.insert(e);
        order.push(e);
    }
    order
}

/// Visits every embedding of `pattern` into `target` fixing `base`.
/// Stops early if the visitor breaks.
pub fn for_each_embedding<F>(pattern: &Structure, base: &ElemSet, target: &Structure, mut visit: F)
where
    F: FnMut(&BTreeMap<Elem, Elem>) -> ControlFlow<()>,
{
    if !base_compatible(pattern, base, target) {
        return;
    }
    if let (Ok(pg), Ok(tg)) = (Graph::from_structure(pattern), Graph::from_structure(target)) {
        graph_embeddings(&pg, base, &tg, &mut visit);
        return;
    }
    generic_embeddings(pattern, base, target, &mut visit);
}

fn generic_embeddings<F>(pattern: &Structure, base: &ElemSet, target: &Structure, visit: &mut F)
where
    F: FnMut(&BTreeMap<Elem, Elem>) -> ControlFlow<()>,
{
    let order = placement_order(pattern, base);
    let pidx = index(pattern);
    let tidx = index(target);
    let mut map: BTreeMap<Elem, Elem> = base.iter().map(|&e| (e, e)).collect();
    let mut inverse: BTreeMap<Elem, Elem> = map.clone();
    let candidates: Vec<Elem> = target
        .elements()
        .iter()
        .copied()
        .filter(|e| !base.contains(e))
        .collect();

    struct Ctx<'a, F> {
        order: &'a [Elem],
        pattern: &'a Structure,
        target: &'a Structure,
        pidx: &'a Index<'a>,
        tidx: &'a Index<'a>,
        candidates: &'a [Elem],
        visit: &'a mut F,
    }

    fn consistent<F>(ctx: &Ctx<'_, F>, map: &BTreeMap<Elem, Elem>, inverse: &BTreeMap<Elem, Elem>, x: Elem, y: Elem) -> bool {
        // preservation: instances of x whose elements are all placed
        if let Some(list) = ctx.pidx.get(&x) {
            for (sym, t) in list {
                if t.iter().all(|e| *e == x || map.contains_key(e)) {
                    let img: Vec<Elem> = t.iter().map(|e| if *e == x { y } else { map[e] }).collect();
                    if !ctx.target.has_instance(sym, &img) {
                        return false;
                    }
                }
            }
        }
        // reflection: target instances of y among placed images
        if let Some(list) = ctx.tidx.get(&y) {
            for (sym, t) in list {
                if t.iter().all(|e| *e == y || inverse.contains_key(e)) {
                    let pre: Vec<Elem> = t.iter().map(|e| if *e == y { x } else { inverse[e] }).collect();
                    if !ctx.pattern.has_instance(sym, &pre) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn rec<F>(ctx: &mut Ctx<'_, F>, depth: usize, map: &mut BTreeMap<Elem, Elem>, inverse: &mut BTreeMap<Elem, Elem>) -> ControlFlow<()>
    where
        F: FnMut(&BTreeMap<Elem, Elem>) -> ControlFlow<()>,
    {
        if depth == ctx.order.len() {
            return (ctx.visit)(map);
        }
        let x = ctx.order[depth];
        for &y in ctx.candidates {
            if inverse.contains_key(&y) || !consistent(ctx, map, inverse, x, y) {
                continue;
            }
            map.insert(x, y);
            inverse.insert(y, x);
            let flow = rec(ctx, depth + 1, map, inverse);
            map.remove(&x);
            inverse.remove(&y);
            flow?;
        }
        ControlFlow::Continue(())
    }

    let mut ctx = Ctx {
        order: &order,
        pattern,
        target,
        pidx: &pidx,
        tidx: &tidx,
        candidates: &candidates,
        visit,
    };
    let _ = rec(&mut ctx, 0, &mut map, &mut inverse);
}

fn graph_embeddings<F>(pattern: &Graph, base: &ElemSet, target: &Graph, visit: &mut F)
where
    F: FnMut(&BTreeMap<Elem, Elem>) -> ControlFlow<()>,
{
    let words = target.words();
    let pat_base: Vec<usize> = base.iter().map(|&e| pattern.index_of(e).expect("base in pattern")).collect();
    let tgt_base: Vec<usize> = base.iter().map(|&e| target.index_of(e).expect("base in target")).collect();

    // Place pattern vertices greedily by number of already-placed neighbours.
    let mut placed = vec![false; pattern.n()];
    for &p in &pat_base {
        placed[p] = true;
    }
    let mut order = Vec::new();
    while order.len() + pat_base.len() < pattern.n() {
        let next = (0..pattern.n())
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                (
                    pattern.neighbors(v).filter(|&u| placed[u]).count(),
                    std::cmp::Reverse(v),
                )
            })
            .expect("unplaced vertex");
        placed[next] = true;
        order.push(next);
    }

    let mut assign: Vec<Option<usize>> = vec![None; pattern.n()];
    for (&p, &t) in pat_base.iter().zip(&tgt_base) {
        assign[p] = Some(t);
    }
    let mut used = vec![0u64; words];
    for &t in &tgt_base {
        used[t / 64] |= 1 << (t % 64);
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<F>(
        depth: usize,
        order: &[usize],
        pattern: &Graph,
        target: &Graph,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<u64>,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&BTreeMap<Elem, Elem>) -> ControlFlow<()>,
    {
        if depth == order.len() {
            let map = assign
                .iter()
                .enumerate()
                .map(|(p, t)| (pattern.ids()[p], target.ids()[t.expect("complete")]))
                .collect();
            return visit(&map);
        }
        let x = order[depth];
        let words = target.words();
        let mut cand: Vec<u64> = vec![u64::MAX; words];
        let tail = target.n() % 64;
        if tail != 0 {
            cand[words - 1] = (1u64 << tail) - 1;
        }
        if target.n() == 0 {
            cand[0] = 0;
        }
        for (p, t) in assign.iter().enumerate() {
            let Some(t) = t else { continue };
            let row = target.row(*t);
            if pattern.has_edge(x, p) {
                for w in 0..words {
                    cand[w] &= row[w];
                }
            } else {
                for w in 0..words {
                    cand[w] &= !row[w];
                }
            }
        }
        for w in 0..words {
            cand[w] &= !used[w];
        }
        for y in bits(&cand).collect::<Vec<_>>() {
            assign[x] = Some(y);
            used[y / 64] |= 1 << (y % 64);
            let flow = rec(depth + 1, order, pattern, target, assign, used, visit);
            used[y / 64] &= !(1 << (y % 64));
            assign[x] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }

    let _ = rec(0, &order, pattern, target, &mut assign, &mut used, visit);
}

/// All embeddings of `pattern` into `target` fixing `base` pointwise, in
/// lexicographic order of their image vectors.
pub fn embeddings_over(pattern: &Structure, base: &ElemSet, target: &Structure) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(pattern, base, target, |m| {
        out.push(Embedding { map: m.clone() });
        ControlFlow::Continue(())
    });
    out.sort_by_key(Embedding::image_vec);
    out
}

/// Same as [`embeddings_over`] but never takes the graph fast path.
pub fn embeddings_over_generic(pattern: &Structure, base: &ElemSet, target: &Structure) -> Vec<Embedding> {
    let mut out = Vec::new();
    if base_compatible(pattern, base, target) {
        generic_embeddings(pattern, base, target, &mut |m: &BTreeMap<Elem, Elem>| {
            out.push(Embedding { map: m.clone() });
            ControlFlow::Continue(())
        });
    }
    out.sort_by_key(Embedding::image_vec);
    out
}

/// True iff some bijective embedding `s1 -> s2` fixes `base` pointwise.
pub fn isomorphic_over(s1: &Structure, s2: &Structure, base: &ElemSet) -> bool {
    if s1.len() != s2.len() || s1.signature() != s2.signature() {
        return false;
    }
    let counts = |s: &Structure| -> Vec<usize> {
        s.signature()
            .symbols()
            .map(|(sym, _)| s.instances_of(sym).count())
            .collect()
    };
    if counts(s1) != counts(s2) {
        return false;
    }
    let mut found = false;
    for_each_embedding(s1, base, s2, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{set, Signature, EDGE};

    fn star(leaves: u32) -> Structure {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Structure::graph(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn point_into_discrete() {
        let b = Structure::discrete(Signature::graph(), [100]);
        let m = Structure::discrete(Signature::graph(), 0..5);
        let embs = embeddings_over(&b, &ElemSet::new(), &m);
        assert_eq!(embs.len(), 5);
        assert_eq!(embs[0].get(100), Some(0));
        assert_eq!(embs[4].get(100), Some(4));
    }

    #[test]
    fn edge_over_center_of_star() {
        let mut b = Structure::discrete(Signature::graph(), [0, 99]);
        b.add_instance(EDGE, [0, 99]).unwrap();
        assert_eq!(embeddings_over(&b, &set([0]), &star(5)).len(), 5);
        assert_eq!(embeddings_over_generic(&b, &set([0]), &star(5)).len(), 5);
    }

    #[test]
    fn triangle_into_triangle_free() {
        let k3 = Structure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let c5 = Structure::graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(embeddings_over(&k3, &ElemSet::new(), &c5).is_empty());
    }

    #[test]
    fn induced_semantics() {
        // two isolated points do not embed onto the ends of an edge
        let two = Structure::discrete(Signature::graph(), [0, 1]);
        let edge = Structure::graph(2, &[(0, 1)]).unwrap();
        assert!(embeddings_over(&two, &ElemSet::new(), &edge).is_empty());
        assert!(embeddings_over_generic(&two, &ElemSet::new(), &edge).is_empty());
    }

    #[test]
    fn isomorphic_examples() {
        let s = star(3);
        assert!(isomorphic_over(&s, &s, &set([0, 1])));
        let mut e1 = Structure::discrete(Signature::graph(), [0, 1]);
        e1.add_instance(EDGE, [0, 1]).unwrap();
        let mut e2 = Structure::discrete(Signature::graph(), [0, 2]);
        e2.add_instance(EDGE, [0, 2]).unwrap();
        // different element sets, same shape over the shared endpoint
        let (e2c, _) = e2.compact();
        assert!(isomorphic_over(&e1, &e2c, &set([0])));
        let non = Structure::discrete(Signature::graph(), [0, 1]);
        assert!(!isomorphic_over(&e1, &non, &ElemSet::new()));
    }

    #[test]
    fn hypergraph_embeddings() {
        let sig = Signature::new([("R", 3)]).unwrap();
        let mut m = Structure::discrete(sig.clone(), 0..5);
        m.add_instance("R", [0, 1, 2]).unwrap();
        m.add_instance("R", [0, 3, 4]).unwrap();
        let mut p = Structure::discrete(sig, [0, 10, 11]);
        p.add_instance("R", [0, 10, 11]).unwrap();
        // two copies, each in two orders
        assert_eq!(embeddings_over(&p, &set([0]), &m).len(), 4);
    }

    #[test]
    fn mismatched_base_gives_nothing() {
        let edge = Structure::graph(2, &[(0, 1)]).unwrap();
        let two = Structure::discrete(Signature::graph(), [0, 1, 2]);
        assert!(embeddings_over(&edge, &set([0, 1]), &two).is_empty());
    }
}
