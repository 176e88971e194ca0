//! Finite stages of the generic model for graphs.
//!
//! The builder keeps a FIFO of obligations `(image of A, extension type
//! A ≤ B)`. Each step discharges the oldest one by freely amalgamating a
//! fresh copy of `B` over the image. Subsets that become available at a stage
//! are examined lazily, in order of discovery. That is equivalent to
//! examining them at discovery time, because a subset that is strong (or not)
//! in `M` stays so in every later stage.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure;
use crate::dimension::Predim;
use crate::embed;
use crate::error::{Error, Result};
use crate::oracle;
use crate::structure::{glue, Elem, ElemSet, Remap, Structure};

/// Default cap on `|B|` for the catalog.
pub const DEFAULT_MAX_EXT: usize = 4;

/// A strong extension `A ≤ B` with `A = {0, …, k-1}` and `B = {0, …, m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionType {
    pub base_size: usize,
    pub size: usize,
    /// Edges of `B`.
    pub edges: Vec<(Elem, Elem)>,
}

impl ExtensionType {
    pub fn structure(&self) -> Structure {
        Structure::graph(self.size as u32, &self.edges).expect("catalog edges are valid")
    }

    fn base_mask(&self) -> u64 {
        edge_mask(self.base_size, |i, j| self.edges.contains(&(i as Elem, j as Elem)))
    }
}

/// Bit `t` is set when the `t`-th pair `(i, j)`, `i < j`, in lexicographic
/// order is an edge.
fn edge_mask(k: usize, adjacent: impl Fn(usize, usize) -> bool) -> u64 {
    let mut mask = 0;
    let mut t = 0;
    for i in 0..k {
        for j in i + 1..k {
            if adjacent(i, j) {
                mask |= 1 << t;
            }
            t += 1;
        }
    }
    mask
}

fn pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All strong pairs `A ≤ B` with `|A| < |B| ≤ s`, one per isomorphism type
/// over `A` (new points may be permuted, `A` is fixed pointwise).
pub fn catalog(pd: &Predim, s: usize) -> Result<Vec<ExtensionType>> {
    if s == 0 {
        return Err(Error::InvalidArgument("extension size must be at least 1".into()));
    }
    if s > 6 {
        return Err(Error::BudgetExceeded(format!("catalog with |B| <= {s}")));
    }
    let mut out = Vec::new();
    for m in 1..=s {
        let all = pairs(m);
        for k in 0..m {
            let base_pairs = k * k.saturating_sub(1) / 2;
            let free: Vec<usize> = (k..m).collect();
            let perms = permutations(&free);
            let mut seen = std::collections::BTreeSet::new();
            for a_mask in 0u64..1 << base_pairs {
                for ext in 0u64..1 << (all.len() - base_pairs) {
                    let full = a_mask | ext << base_pairs;
                    let adj = |i: usize, j: usize| {
                        let (i, j) = (i.min(j), i.max(j));
                        let t = all.iter().position(|&p| p == (i, j)).expect("pair");
                        full >> t & 1 == 1
                    };
                    // canonical: least mask over permutations of the new points
                    let canon = perms
                        .iter()
                        .map(|p| {
                            let img = |v: usize| if v < k { v } else { p[v - k] };
                            edge_mask(m, |i, j| adj(img(i), img(j)))
                        })
                        .min()
                        .expect("at least one permutation");
                    if canon != full || !seen.insert(full) {
                        continue;
                    }
                    let edges: Vec<(Elem, Elem)> = all
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| full >> t & 1 == 1)
                        .map(|(_, &(i, j))| (i as Elem, j as Elem))
                        .collect();
                    let b = Structure::graph(m as u32, &edges)?;
                    let base: ElemSet = (0..k as Elem).collect();
                    if !oracle::is_in_k(pd, &b)? || !oracle::is_strong(pd, &base, &b)? {
                        continue;
                    }
                    out.push(ExtensionType {
                        base_size: k,
                        size: m,
                        edges,
                    });
                }
            }
        }
    }
    out.sort_by(|x, y| (x.base_size, x.size, &x.edges).cmp(&(y.base_size, y.size, &y.edges)));
    Ok(out)
}

/// A discharged obligation: `B`'s base went to `image`, its new points to `added`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Task {
    pub image: Vec<Elem>,
    pub ext: usize,
    pub added: Vec<Elem>,
}

/// Subsets of `[0, hi)` of size `k ≤ max_k` whose largest element is at
/// least `lo`, by size and then lexicographically from the top element.
#[derive(Clone, Debug)]
struct Cursor {
    lo: Elem,
    hi: Elem,
    max_k: usize,
    next: Option<Vec<Elem>>,
}

impl Cursor {
    fn new(lo: Elem, hi: Elem, max_k: usize) -> Self {
        let mut c = Cursor { lo, hi, max_k, next: None };
        c.next = c.first_of_size(if lo == hi && lo == 0 { 0 } else { 1 });
        c
    }

    fn first_of_size(&self, k: usize) -> Option<Vec<Elem>> {
        (k..=self.max_k).find_map(|k| {
            if k == 0 {
                return Some(Vec::new());
            }
            let top = self.lo.max(k as Elem - 1);
            (top < self.hi).then(|| {
                let mut v: Vec<Elem> = (0..k as Elem - 1).collect();
                v.push(top);
                v
            })
        })
    }

    fn advance(&self, cur: &[Elem]) -> Option<Vec<Elem>> {
        let k = cur.len();
        if k == 0 {
            return self.first_of_size(1);
        }
        let top = cur[k - 1];
        let mut rest = cur[..k - 1].to_vec();
        // next combination of the lower k-1 elements below `top`
        let mut i = rest.len();
        while i > 0 {
            i -= 1;
            let limit = top - (rest.len() - i) as Elem;
            if rest[i] < limit {
                rest[i] += 1;
                for j in i + 1..rest.len() {
                    rest[j] = rest[j - 1] + 1;
                }
                rest.push(top);
                return Some(rest);
            }
        }
        if top + 1 < self.hi {
            let mut v: Vec<Elem> = (0..k as Elem - 1).collect();
            v.push(top + 1);
            return Some(v);
        }
        self.first_of_size(k + 1)
    }
}

impl Iterator for Cursor {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let cur = self.next.take()?;
        self.next = self.advance(&cur);
        Some(cur)
    }
}

/// A finite stage of the generic construction.
#[derive(Clone, Debug)]
pub struct GenericApprox {
    pd: Predim,
    pub max_ext: usize,
    pub seed: u64,
    pub catalog: Vec<ExtensionType>,
    pub m: Structure,
    /// `|M|` after each stage; stage `i` is `{0, …, stage_sizes[i] - 1}`.
    pub stage_sizes: Vec<usize>,
    pub completed: Vec<Task>,
    by_base: BTreeMap<(usize, u64), Vec<usize>>,
    cursors: VecDeque<Cursor>,
    ready: VecDeque<(Vec<Elem>, usize)>,
    rng: ChaCha8Rng,
}

impl GenericApprox {
    pub fn new(pd: Predim, max_ext: usize, seed: u64) -> Result<Self> {
        let catalog = catalog(&pd, max_ext)?;
        let mut by_base: BTreeMap<(usize, u64), Vec<usize>> = BTreeMap::new();
        for (i, t) in catalog.iter().enumerate() {
            by_base.entry((t.base_size, t.base_mask())).or_default().push(i);
        }
        let mut cursors = VecDeque::new();
        cursors.push_back(Cursor::new(0, 0, max_ext - 1));
        Ok(GenericApprox {
            pd,
            max_ext,
            seed,
            catalog,
            m: Structure::new(crate::structure::Signature::graph()),
            stage_sizes: vec![0],
            completed: Vec::new(),
            by_base,
            cursors,
            ready: VecDeque::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn predim(&self) -> &Predim {
        &self.pd
    }

    pub fn stage(&self) -> usize {
        self.stage_sizes.len() - 1
    }

    /// Elements of stage `i`.
    pub fn stage_set(&self, i: usize) -> ElemSet {
        (0..self.stage_sizes[i] as Elem).collect()
    }

    /// Obligations found but not yet discharged.
    pub fn pending(&self) -> usize {
        self.ready.len()
    }

    fn next_obligation(&mut self) -> Result<Option<(Vec<Elem>, usize)>> {
        loop {
            if let Some(o) = self.ready.pop_front() {
                return Ok(Some(o));
            }
            let Some(cursor) = self.cursors.front_mut() else {
                return Ok(None);
            };
            let Some(subset) = cursor.next() else {
                self.cursors.pop_front();
                continue;
            };
            let mask = edge_mask(subset.len(), |i, j| self.m.has_instance("E", &[subset[i], subset[j]]));
            let Some(types) = self.by_base.get(&(subset.len(), mask)) else {
                continue;
            };
            let set: ElemSet = subset.iter().copied().collect();
            if !self.pd.is_strong(&set, &self.m)? {
                continue;
            }
            let mut types = types.clone();
            types.shuffle(&mut self.rng);
            for t in types {
                self.ready.push_back((subset.clone(), t));
            }
        }
    }

    /// Discharges up to `steps` obligations. Returns the number discharged.
    pub fn run(&mut self, steps: usize) -> Result<usize> {
        for done in 0..steps {
            let Some((image, ext)) = self.next_obligation()? else {
                return Ok(done);
            };
            let t = &self.catalog[ext];
            let identify: Remap = image.iter().enumerate().map(|(i, &x)| (i as Elem, x)).collect();
            let (m, map) = glue(&self.m, &t.structure(), &identify)?;
            let added: Vec<Elem> = (t.base_size..t.size).map(|i| map[&(i as Elem)]).collect();
            let lo = self.m.len() as Elem;
            self.m = m;
            let hi = self.m.len() as Elem;
            self.cursors.push_back(Cursor::new(lo, hi, self.max_ext - 1));
            self.stage_sizes.push(self.m.len());
            self.completed.push(Task { image, ext, added });
        }
        Ok(steps)
    }

    /// Serializable summary (the structure itself is exported separately).
    pub fn summary(&self) -> GenericSummary {
        GenericSummary {
            alpha: self.pd.alpha().to_string(),
            beta: crate::rational::format(&self.pd.beta()),
            max_ext: self.max_ext,
            seed: self.seed,
            catalog: self.catalog.clone(),
            stages: self.stage(),
            size: self.m.len(),
            edges: self.m.e_count(),
            tasks: self.completed.clone(),
            pending: self.ready.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericSummary {
    pub alpha: String,
    pub beta: String,
    pub max_ext: usize,
    pub seed: u64,
    pub catalog: Vec<ExtensionType>,
    pub stages: usize,
    pub size: usize,
    pub edges: usize,
    pub tasks: Vec<Task>,
    pub pending: usize,
}

/// Builds `M` by discharging `steps` obligations over the catalog of
/// extensions with `|B| ≤ max_ext`.
pub fn build(pd: Predim, steps: usize, max_ext: usize, seed: u64) -> Result<GenericApprox> {
    let mut g = GenericApprox::new(pd, max_ext, seed)?;
    g.run(steps)?;
    Ok(g)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtensionAudit {
    /// Discharged obligations and how many still have a strong copy.
    pub scheduled: usize,
    pub scheduled_satisfied: usize,
    pub failures: Vec<usize>,
    /// Pending obligations sampled, and their outcome.
    pub unscheduled_checked: usize,
    pub unscheduled_satisfied: usize,
    pub unscheduled_unknown: usize,
    /// `∅ ≤ M`.
    pub empty_strong: bool,
    /// `M ∈ K`.
    pub in_k: bool,
}

impl ExtensionAudit {
    pub fn ok(&self) -> bool {
        self.scheduled == self.scheduled_satisfied && self.empty_strong && self.in_k
    }
}

/// Embedding candidates examined per pending obligation.
const SEARCH_CAP: usize = 20_000;

/// Checks every discharged obligation (the copy is isomorphic to `B` over
/// the image and strong in `M`) and up to `sample` pending ones.
pub fn audit_extension(g: &GenericApprox, sample: usize) -> Result<ExtensionAudit> {
    let pd = &g.pd;
    let mut audit = ExtensionAudit {
        empty_strong: pd.is_strong(&ElemSet::new(), &g.m)?,
        in_k: pd.is_in_k(&g.m)?,
        ..ExtensionAudit::default()
    };
    for (i, task) in g.completed.iter().enumerate() {
        audit.scheduled += 1;
        let t = &g.catalog[task.ext];
        let img = |v: Elem| -> Elem {
            let v = v as usize;
            if v < t.base_size {
                task.image[v]
            } else {
                task.added[v - t.base_size]
            }
        };
        let copy: ElemSet = task.image.iter().chain(&task.added).copied().collect();
        let b = t.structure();
        let iso = (0..t.size as Elem).all(|u| {
            (u + 1..t.size as Elem).all(|v| {
                b.has_instance("E", &[u, v]) == g.m.has_instance("E", &[img(u), img(v)])
            })
        });
        if iso && pd.is_strong(&copy, &g.m)? {
            audit.scheduled_satisfied += 1;
        } else {
            audit.failures.push(i);
        }
    }
    // the next obligations in FIFO order, found without discharging them
    let mut probe = g.clone();
    for _ in 0..sample {
        let Some((image, ext)) = probe.next_obligation()? else {
            break;
        };
        audit.unscheduled_checked += 1;
        match strong_copy_exists(g, &image, &g.catalog[ext])? {
            Some(true) => audit.unscheduled_satisfied += 1,
            Some(false) => {}
            None => audit.unscheduled_unknown += 1,
        }
    }
    Ok(audit)
}

/// Whether some strong copy of `B` over `image` lies in `M`; `None` when the
/// search cap is hit first.
fn strong_copy_exists(g: &GenericApprox, image: &[Elem], t: &ExtensionType) -> Result<Option<bool>> {
    let fresh = g.m.fresh_id();
    let rename: Remap = (0..t.size as Elem)
        .map(|v| {
            let to = if (v as usize) < t.base_size {
                image[v as usize]
            } else {
                fresh + v
            };
            (v, to)
        })
        .collect();
    let pattern = t.structure().rename(&rename)?;
    let base: ElemSet = image.iter().copied().collect();
    let mut seen = 0usize;
    let mut found = false;
    let mut err = None;
    embed::for_each_embedding(&pattern, &base, &g.m, |e| {
        seen += 1;
        let copy: ElemSet = e.values().copied().chain(image.iter().copied()).collect();
        match g.pd.is_strong(&copy, &g.m) {
            Ok(true) => {
                found = true;
                return std::ops::ControlFlow::Break(());
            }
            Ok(false) => {}
            Err(x) => {
                err = Some(x);
                return std::ops::ControlFlow::Break(());
            }
        }
        if seen >= SEARCH_CAP {
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(if found {
        Some(true)
    } else if seen >= SEARCH_CAP {
        None
    } else {
        Some(false)
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureAudit {
    pub subsets: usize,
    /// The closure converged, contains `A` and is strong in `M`.
    pub closures_ok: usize,
    pub largest_closure: usize,
    pub stage_pairs: usize,
    /// `stage_i ≤ stage_{i+1}`.
    pub stage_chain_ok: usize,
}

impl ClosureAudit {
    pub fn ok(&self) -> bool {
        self.subsets == self.closures_ok && self.stage_pairs == self.stage_chain_ok
    }
}

/// Closures of `sample` random subsets (one to three points) and the
/// strong chain of stages.
pub fn audit_finite_closures(g: &GenericApprox, sample: usize, seed: u64) -> Result<ClosureAudit> {
    let pd = &g.pd;
    let mut audit = ClosureAudit::default();
    let elems: Vec<Elem> = g.m.elements().iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !elems.is_empty() {
        for _ in 0..sample {
            let k = rng.gen_range(1..=3.min(elems.len()));
            let a: ElemSet = elems.choose_multiple(&mut rng, k).copied().collect();
            let r = closure::icl(pd, &g.m, &a)?;
            audit.subsets += 1;
            audit.largest_closure = audit.largest_closure.max(r.closure.len());
            if r.converged && r.closure.is_superset(&a) && pd.is_strong(&r.closure, &g.m)? {
                audit.closures_ok += 1;
            }
        }
    }
    for i in 0..g.stage() {
        let next = g.m.induced(&g.stage_set(i + 1))?;
        audit.stage_pairs += 1;
        if pd.is_strong(&g.stage_set(i), &next)? {
            audit.stage_chain_ok += 1;
        }
    }
    Ok(audit)
}
