//! Least minimizer of `δ` over supersets of a base set.
//!
//! Elements outside the base become vertices of a hypergraph whose edges are
//! the free parts of the relation instances; instances lying inside the base
//! are constants. The objective `β|S| - α·#{edges ⊆ S}` is submodular, so its
//! minimizers form a lattice and the least one is well defined.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::{Add, Sub};

use super::alpha::AlphaSpec;
use super::flow::FlowNetwork;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::structure::{ElemSet, Structure};

/// Minimization route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Decomposition with brute force on small components, min-cut on large
    /// components when α is exact, branch-and-bound otherwise.
    #[default]
    Auto,
    /// Decomposition and branch-and-bound only.
    BranchAndBound,
    /// Min-cut on every component (falls back to branching for irrational α).
    MinCut,
}

const BRUTE_MAX: usize = 10;
const BRANCH_MAX_EXACT: usize = 24;

/// `β·n - α·e` as the integer pair `(n, e)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub n: i64,
    pub e: i64,
}

impl Counts {
    pub fn new(n: i64, e: i64) -> Self {
        Counts { n, e }
    }
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts::new(self.n + o.n, self.e + o.e)
    }
}

impl Sub for Counts {
    type Output = Counts;
    fn sub(self, o: Counts) -> Counts {
        Counts::new(self.n - o.n, self.e - o.e)
    }
}

/// Decides signs of `β·n - α·e`.
#[derive(Clone, Debug)]
pub struct Scale {
    alpha: AlphaSpec,
    beta: Rational,
    /// `(wn, we)` with `β·n - α·e ∝ wn·n - we·e` when α is exact.
    weights: Option<(i128, i128)>,
}

impl Scale {
    pub fn new(alpha: AlphaSpec, beta: Rational) -> Self {
        let weights = alpha.exact_value().map(|a| {
            (
                beta.numer() * a.denom(),
                a.numer() * beta.denom(),
            )
        });
        Scale { alpha, beta, weights }
    }

    pub fn alpha(&self) -> &AlphaSpec {
        &self.alpha
    }

    pub fn beta(&self) -> Rational {
        self.beta
    }

    pub(crate) fn weights(&self) -> Option<(i128, i128)> {
        self.weights
    }

    pub fn sign(&self, c: Counts) -> Result<Ordering> {
        match self.weights {
            Some((wn, we)) => Ok((wn * c.n as i128 - we * c.e as i128).cmp(&0)),
            None => self
                .alpha
                .sign_of(&(self.beta * Rational::from(c.n as i128)), &Rational::from(c.e as i128)),
        }
    }

    pub fn cmp(&self, a: Counts, b: Counts) -> Result<Ordering> {
        self.sign(a - b)
    }
}

/// Least superset of `base` inside `s` minimizing `δ`, with its counts.
pub fn least_minimizer(
    scale: &Scale,
    s: &Structure,
    base: &ElemSet,
    strategy: Strategy,
    budget: u64,
) -> Result<(Counts, ElemSet)> {
    for &b in base {
        if !s.contains(b) {
            return Err(Error::UnknownElement(b));
        }
    }
    let free: Vec<u32> = s.elements().iter().copied().filter(|e| !base.contains(e)).collect();
    let pos: HashMap<u32, u32> = free.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let mut constant = 0i64;
    let mut edges = Vec::new();
    for (_, t) in s.instances() {
        let mut part: Vec<u32> = t.iter().filter_map(|e| pos.get(e).copied()).collect();
        if part.is_empty() {
            constant += 1;
        } else {
            part.sort_unstable();
            part.dedup();
            edges.push(part);
        }
    }
    let mut solver = Solver {
        scale,
        strategy,
        nodes: 0,
        budget,
    };
    let (c, chosen) = solver.solve(free.len(), edges)?;
    let mut set = base.clone();
    set.extend(chosen.iter().map(|&i| free[i as usize]));
    Ok((Counts::new(base.len() as i64, constant) + c, set))
}

struct Solver<'a> {
    scale: &'a Scale,
    strategy: Strategy,
    nodes: u64,
    budget: u64,
}

type Edges = Vec<Vec<u32>>;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components as (vertex list, relabelled edges).
fn components(k: usize, edges: &Edges) -> Vec<(Vec<u32>, Edges)> {
    let mut parent: Vec<usize> = (0..k).collect();
    for e in edges {
        let r = find(&mut parent, e[0] as usize);
        for &v in &e[1..] {
            let rv = find(&mut parent, v as usize);
            if rv != r {
                parent[rv] = r;
            }
        }
    }
    let mut comp_of = vec![usize::MAX; k];
    let mut local = vec![0u32; k];
    let mut comps: Vec<(Vec<u32>, Edges)> = Vec::new();
    for v in 0..k {
        let r = find(&mut parent, v);
        if comp_of[r] == usize::MAX {
            comp_of[r] = comps.len();
            comps.push((Vec::new(), Vec::new()));
        }
        let c = comp_of[r];
        comp_of[v] = c;
        local[v] = comps[c].0.len() as u32;
        comps[c].0.push(v as u32);
    }
    for e in edges {
        let c = comp_of[e[0] as usize];
        comps[c].1.push(e.iter().map(|&v| local[v as usize]).collect());
    }
    comps
}

/// Gaifman adjacency lists.
fn gaifman(k: usize, edges: &Edges) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); k];
    for e in edges {
        for &u in e {
            for &v in e {
                if u != v {
                    adj[u as usize].push(v);
                }
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

fn articulation_points(adj: &[Vec<u32>]) -> Vec<usize> {
    let k = adj.len();
    let mut disc = vec![usize::MAX; k];
    let mut low = vec![0; k];
    let mut is_ap = vec![false; k];
    let mut timer = 0;
    for root in 0..k {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        while let Some(&mut (u, parent, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let v = adj[u][*i] as usize;
                *i += 1;
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((v, u, 0));
                } else if v != parent {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if parent != root && low[u] >= disc[parent] {
                        is_ap[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_ap[root] = true;
        }
    }
    (0..k).filter(|&v| is_ap[v]).collect()
}

/// Size of the largest component after deleting `u`.
fn largest_after_removal(adj: &[Vec<u32>], u: usize) -> usize {
    let k = adj.len();
    let mut seen = vec![false; k];
    seen[u] = true;
    let mut best = 0;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for &y in &adj[x] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y as usize);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn pivot(k: usize, edges: &Edges) -> usize {
    let adj = gaifman(k, edges);
    let aps = articulation_points(&adj);
    if let Some(&u) = aps
        .iter()
        .min_by_key(|&&u| (largest_after_removal(&adj, u), u))
    {
        return u;
    }
    let mut deg = vec![0usize; k];
    for e in edges {
        for &v in e {
            deg[v as usize] += 1;
        }
    }
    (0..k).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap_or(0)
}

/// Drops vertex `u` and relabels the rest to `0..k-1`.
fn relabel_without(u: u32, v: u32) -> u32 {
    if v > u {
        v - 1
    } else {
        v
    }
}

impl Solver<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "minimization exceeded {} search nodes",
                self.budget
            )));
        }
        Ok(())
    }

    /// Returns the least minimizer over vertices `0..k` (sorted).
    fn solve(&mut self, k: usize, edges: Edges) -> Result<(Counts, Vec<u32>)> {
        self.tick()?;
        if k == 0 {
            return Ok((Counts::default(), Vec::new()));
        }
        let comps = components(k, &edges);
        if comps.len() > 1 {
            let mut total = Counts::default();
            let mut chosen = Vec::new();
            for (verts, ce) in comps {
                if ce.is_empty() {
                    // isolated vertex: β > 0, never worth adding
                    continue;
                }
                let (c, set) = self.solve(verts.len(), ce)?;
                total = total + c;
                chosen.extend(set.iter().map(|&i| verts[i as usize]));
            }
            chosen.sort_unstable();
            return Ok((total, chosen));
        }
        if edges.is_empty() {
            return Ok((Counts::default(), Vec::new()));
        }
        if k <= BRUTE_MAX {
            return self.brute(k, &edges);
        }
        let exact = self.scale.weights().is_some();
        let use_cut = exact
            && match self.strategy {
                Strategy::Auto => k > BRANCH_MAX_EXACT,
                Strategy::MinCut => true,
                Strategy::BranchAndBound => false,
            };
        if use_cut {
            if let Some(r) = self.min_cut(k, &edges) {
                return Ok(r);
            }
        }
        self.branch(k, edges)
    }

    fn brute(&mut self, k: usize, edges: &Edges) -> Result<(Counts, Vec<u32>)> {
        let masks: Vec<u64> = edges
            .iter()
            .map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let mut best = Counts::default();
        let mut least: u64 = 0;
        let mut best_scaled = 0i128;
        let weights = self.scale.weights();
        for mask in 1u64..(1u64 << k) {
            let c = Counts::new(
                mask.count_ones() as i64,
                masks.iter().filter(|&&m| m & mask == m).count() as i64,
            );
            let ord = match weights {
                Some((wn, we)) => {
                    let v = wn * c.n as i128 - we * c.e as i128;
                    let o = v.cmp(&best_scaled);
                    if o == Ordering::Less {
                        best_scaled = v;
                    }
                    o
                }
                None => self.scale.cmp(c, best)?,
            };
            match ord {
                Ordering::Less => {
                    best = c;
                    least = mask;
                }
                Ordering::Equal => least &= mask,
                Ordering::Greater => {}
            }
        }
        let set: Vec<u32> = (0..k as u32).filter(|&v| least >> v & 1 == 1).collect();
        let c = Counts::new(
            set.len() as i64,
            masks.iter().filter(|&&m| m & least == m).count() as i64,
        );
        Ok((c, set))
    }

    /// Lower bound on the objective over all subsets.
    fn lower_bound(&self, k: usize, edges: &Edges) -> Counts {
        let mut deg = vec![0i64; k];
        for e in edges {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        let mut lb = Counts::default();
        for d in deg {
            let term = Counts::new(1, d);
            match self.scale.sign(term) {
                Ok(Ordering::Less) => lb = lb + term,
                Ok(_) => {}
                Err(_) => lb = lb + Counts::new(0, d),
            }
        }
        lb
    }

    fn branch(&mut self, k: usize, edges: Edges) -> Result<(Counts, Vec<u32>)> {
        let u = pivot(k, &edges) as u32;
        let mut excl = Vec::new();
        let mut incl = Vec::new();
        let mut absorbed = 0i64;
        for e in &edges {
            if e.contains(&u) {
                let rest: Vec<u32> = e
                    .iter()
                    .filter(|&&v| v != u)
                    .map(|&v| relabel_without(u, v))
                    .collect();
                if rest.is_empty() {
                    absorbed += 1;
                } else {
                    incl.push(rest);
                }
            } else {
                let r: Vec<u32> = e.iter().map(|&v| relabel_without(u, v)).collect();
                incl.push(r.clone());
                excl.push(r);
            }
        }
        let restore = |set: Vec<u32>| -> Vec<u32> {
            set.into_iter().map(|v| if v >= u { v + 1 } else { v }).collect()
        };
        let (ce, se) = self.solve(k - 1, excl)?;
        let head = Counts::new(1, absorbed);
        let lb = head + self.lower_bound(k - 1, &incl);
        if matches!(self.scale.cmp(lb, ce), Ok(Ordering::Greater | Ordering::Equal)) {
            return Ok((ce, restore(se)));
        }
        let (ci, si) = self.solve(k - 1, incl)?;
        let ci = head + ci;
        if self.scale.cmp(ci, ce)? == Ordering::Less {
            let mut set = restore(si);
            set.push(u);
            set.sort_unstable();
            Ok((ci, set))
        } else {
            Ok((ce, restore(se)))
        }
    }

    /// Closure-problem min-cut. `None` if the weights overflow `i64`.
    fn min_cut(&mut self, k: usize, edges: &Edges) -> Option<(Counts, Vec<u32>)> {
        let (wn, we) = self.scale.weights()?;
        let wn = i64::try_from(wn).ok()?;
        let we = i64::try_from(we).ok()?;
        let m = edges.len();
        let inf = we.checked_mul(m as i64 + 1)?.checked_add(wn.checked_mul(k as i64 + 1)?)?;
        let (s, t) = (0, 1);
        let mut net = FlowNetwork::new(2 + m + k);
        for (i, e) in edges.iter().enumerate() {
            net.add_arc(s, 2 + i, we);
            for &v in e {
                net.add_arc(2 + i, 2 + m + v as usize, inf);
            }
        }
        for v in 0..k {
            net.add_arc(2 + m + v, t, wn);
        }
        net.max_flow(s, t);
        let side = net.source_side(s);
        let set: Vec<u32> = (0..k as u32).filter(|&v| side[2 + m + v as usize]).collect();
        let mut member = vec![false; k];
        for &v in &set {
            member[v as usize] = true;
        }
        let inside = edges.iter().filter(|e| e.iter().all(|&v| member[v as usize])).count();
        Some((Counts::new(set.len() as i64, inside as i64), set))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::structure::set;

    fn scale(n: i128, d: i128) -> Scale {
        Scale::new(AlphaSpec::exact(ratio(n, d)).unwrap(), Rational::from(1))
    }

    #[test]
    fn articulation_points_of_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        assert_eq!(articulation_points(&adj), vec![1, 2]);
        let cycle = vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![2, 0]];
        assert!(articulation_points(&cycle).is_empty());
    }

    #[test]
    fn k4_over_empty() {
        let k4 = Structure::graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (c, m) = least_minimizer(&scale(3, 4), &k4, &ElemSet::new(), Strategy::Auto, 1000).unwrap();
        assert_eq!(c, Counts::new(4, 6));
        assert_eq!(m, set([0, 1, 2, 3]));
    }

    #[test]
    fn strategies_agree_on_wide_star() {
        // 30 leaves hanging off a base point, plus a triangle among three leaves
        let mut edges: Vec<(u32, u32)> = (1..=30).map(|l| (0, l)).collect();
        edges.extend([(1, 2), (2, 3), (1, 3)]);
        let s = Structure::graph(31, &edges).unwrap();
        let sc = scale(2, 3);
        let base = set([0]);
        let results: Vec<_> = [Strategy::Auto, Strategy::BranchAndBound, Strategy::MinCut]
            .into_iter()
            .map(|st| least_minimizer(&sc, &s, &base, st, 1_000_000).unwrap())
            .collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        // the triangle with its edges to 0 adds 3 - 6·(2/3) = -1
        assert_eq!(results[0].1, set([0, 1, 2, 3]));
        assert_eq!(results[0].0, Counts::new(4, 6));
    }

    #[test]
    fn budget_is_enforced() {
        let edges: Vec<(u32, u32)> = (0..20).map(|i| (i, (i + 1) % 20)).collect();
        let s = Structure::graph(20, &edges).unwrap();
        let r = least_minimizer(&scale(1, 2), &s, &ElemSet::new(), Strategy::BranchAndBound, 3);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }
}
