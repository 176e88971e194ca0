//! Bitset adjacency representation for single-binary-symbol structures.
//!
//! Vertices are dense indices `0..n`; `ids[i]` is the element id of vertex `i`
//! in the originating [`Structure`] (ascending).

use crate::error::{Error, Result};
use crate::structure::{Elem, Signature, Structure, EDGE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    ids: Vec<Elem>,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Iterates the set bits of a word slice.
pub fn bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let t = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + t)
        })
    })
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
            ids: (0..n as Elem).collect(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_structure(s: &Structure) -> Result<Self> {
        if !s.signature().is_graph() {
            return Err(Error::NotAGraph);
        }
        let ids: Vec<Elem> = s.elements().iter().copied().collect();
        let mut g = Graph::empty(ids.len());
        g.ids = ids;
        let (sym, _) = s.signature().symbols().next().expect("graph signature");
        for t in s.instances_of(sym) {
            let u = g.ids.binary_search(&t[0]).expect("instance element present");
            let v = g.ids.binary_search(&t[1]).expect("instance element present");
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn to_structure(&self) -> Structure {
        let mut s = Structure::discrete(Signature::graph(), self.ids.iter().copied());
        for u in 0..self.n {
            for v in bits(self.row(u)).filter(|&v| v > u) {
                s.add_instance(EDGE, [self.ids[u], self.ids[v]])
                    .expect("valid edge");
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn ids(&self) -> &[Elem] {
        &self.ids
    }

    pub fn index_of(&self, e: Elem) -> Option<usize> {
        self.ids.binary_search(&e).ok()
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u},{v})");
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.row(u))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Edges inside the vertex set given as a bitmask (n <= 64).
    pub fn edges_within_mask(&self, mask: u64) -> u32 {
        debug_assert!(self.n <= 64);
        let mut total = 0;
        let mut m = mask;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            total += (self.adj[u] & mask).count_ones();
        }
        total / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::set;

    #[test]
    fn roundtrip_and_counts() {
        let s = Structure::graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let g = Graph::from_structure(&s).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.to_structure(), s);
        assert_eq!(g.edges_within_mask(0b0111), 3);
    }

    #[test]
    fn sparse_ids_preserved() {
        let s = Structure::graph(6, &[(1, 5), (3, 5)])
            .unwrap()
            .induced(&set([1, 3, 5]))
            .unwrap();
        let g = Graph::from_structure(&s).unwrap();
        assert_eq!(g.ids(), &[1, 3, 5]);
        assert!(g.has_edge(0, 2) && !g.has_edge(0, 1));
        assert_eq!(g.to_structure(), s);
    }

    #[test]
    fn rejects_non_graph() {
        let sig = Signature::new([("R", 3)]).unwrap();
        let s = Structure::discrete(sig, 0..3);
        assert_eq!(Graph::from_structure(&s), Err(Error::NotAGraph));
    }

    #[test]
    fn wide_graphs() {
        let g = Graph::from_edges(130, &[(0, 129), (64, 65)]);
        assert!(g.has_edge(129, 0));
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![129]);
        assert_eq!(g.edge_count(), 2);
    }
}
