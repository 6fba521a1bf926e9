//! Finite partial orders stored as a Hasse diagram plus a cached
//! reflexive-transitive closure.

pub mod analysis;
pub(crate) mod format;
mod generators;

pub use analysis::{
    central_element, count_ideals, dilworth_decomposition, exact_decision_depth, gamma_bruteforce,
    maximal_elements, siblings, ChainDecomposition, GammaResult, Probe, DECISION_DEPTH_LIMIT,
    GAMMA_LIMIT, IDEAL_LIMIT,
};
pub use generators::{
    antichain, chain, complete_bipartite, forest_poset, grid_poset, random_forest, random_poset,
};

use fixedbitset::FixedBitSet;
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Elements of an `n`-element poset are the ids `0..n`.
pub type Element = usize;

/// A subset of the elements of a poset.
pub type ElementSet = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    /// `(u, v)` with `v` covering `u`, sorted.
    covers: Vec<(Element, Element)>,
    parents: Vec<Vec<Element>>,
    children: Vec<Vec<Element>>,
    /// `down[v] = {x : x <= v}`
    down: Vec<FixedBitSet>,
    /// `up[v] = {x : v <= x}`
    up: Vec<FixedBitSet>,
    topo: Vec<Element>,
}

impl Poset {
    /// Builds a poset from its cover relation. Every pair must be a genuine
    /// cover: pairs implied by a longer path are rejected.
    pub fn new(n: usize, covers: &[(Element, Element)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(u, v) in covers {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Range { element: x, len: n });
                }
            }
            if u == v {
                return Err(Error::Cycle(u));
            }
            if parents[u].contains(&v) {
                return Err(Error::RedundantCover(u, v));
            }
            parents[u].push(v);
            children[v].push(u);
        }
        let topo = topological_order(n, &parents, &children)?;
        let (down, up) = closure(n, &topo, &children);

        for &(u, v) in covers {
            let implied = children[v]
                .iter()
                .any(|&w| w != u && down[w].contains(u));
            if implied {
                return Err(Error::RedundantCover(u, v));
            }
        }

        let mut covers = covers.to_vec();
        covers.sort_unstable();
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            covers,
            parents,
            children,
            down,
            up,
            topo,
        })
    }

    /// Builds a poset from an arbitrary acyclic set of strict relations
    /// `u < v`, taking the transitive closure and reducing it to covers.
    pub fn from_relations(n: usize, relations: &[(Element, Element)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(u, v) in relations {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Range { element: x, len: n });
                }
            }
            if u == v {
                return Err(Error::Cycle(u));
            }
            parents[u].push(v);
            children[v].push(u);
        }
        let topo = topological_order(n, &parents, &children)?;
        let (down, up) = closure(n, &topo, &children);
        let covers = reduction(n, &down, &up);
        Self::new(n, &covers)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn covers(&self) -> &[(Element, Element)] {
        &self.covers
    }

    /// Elements covering `x`.
    pub fn parents(&self, x: Element) -> &[Element] {
        &self.parents[x]
    }

    /// Elements covered by `x`.
    pub fn children(&self, x: Element) -> &[Element] {
        &self.children[x]
    }

    pub fn leq(&self, x: Element, y: Element) -> bool {
        self.down[y].contains(x)
    }

    pub fn lt(&self, x: Element, y: Element) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: Element, y: Element) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{x : x <= v}`
    pub fn down_set(&self, v: Element) -> &ElementSet {
        &self.down[v]
    }

    /// `{x : v <= x}`
    pub fn up_set(&self, v: Element) -> &ElementSet {
        &self.up[v]
    }

    /// A linear extension: every element appears after everything below it.
    pub fn topological_order(&self) -> &[Element] {
        &self.topo
    }

    pub fn full_set(&self) -> ElementSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.n)
    }

    /// Every element is covered by at most one other element.
    pub fn is_forest(&self) -> bool {
        self.parents.iter().all(|p| p.len() <= 1)
    }

    /// Size of the largest antichain, read off a minimum chain cover.
    pub fn width(&self) -> usize {
        dilworth_decomposition(self).chains.len()
    }

    /// Number of elements on the longest chain.
    pub fn height(&self) -> usize {
        let mut longest = vec![0usize; self.n];
        for &v in &self.topo {
            longest[v] = 1 + self.children[v]
                .iter()
                .map(|&c| longest[c])
                .max()
                .unwrap_or(0);
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// Strict relation pairs `u < v` of the closure, in lexicographic order.
    pub fn strict_relations(&self) -> Vec<(Element, Element)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.up[u].ones() {
                if v != u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Covers of the sub-poset induced on `set`, re-indexed in increasing id
    /// order. Returns the sub-poset and the original id of each new element.
    pub fn induced(&self, set: &ElementSet) -> (Poset, Vec<Element>) {
        let ids: Vec<Element> = set.ones().collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &e) in ids.iter().enumerate() {
            index[e] = i;
        }
        let mut rel = Vec::new();
        for (i, &u) in ids.iter().enumerate() {
            for v in self.up[u].ones() {
                if v != u && index[v] != usize::MAX {
                    rel.push((i, index[v]));
                }
            }
        }
        let sub = Poset::from_relations(ids.len(), &rel).expect("induced order is acyclic");
        (sub, ids)
    }
}

fn topological_order(
    n: usize,
    parents: &[Vec<Element>],
    children: &[Vec<Element>],
) -> Result<Vec<Element>> {
    let mut indegree: Vec<usize> = children.iter().map(Vec::len).collect();
    let mut queue: VecDeque<Element> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &p in &parents[v] {
            indegree[p] -= 1;
            if indegree[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

fn closure(
    n: usize,
    topo: &[Element],
    children: &[Vec<Element>],
) -> (Vec<FixedBitSet>, Vec<FixedBitSet>) {
    let mut down = vec![FixedBitSet::with_capacity(n); n];
    for &v in topo {
        let mut set = FixedBitSet::with_capacity(n);
        set.insert(v);
        for &c in &children[v] {
            set.union_with(&down[c]);
        }
        down[v] = set;
    }
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for (v, d) in down.iter().enumerate() {
        for x in d.ones() {
            up[x].insert(v);
        }
    }
    (down, up)
}

/// Cover pairs of a closed relation: `u` is covered by `v` when `u` is a
/// maximal element of the strict down-set of `v`.
fn reduction(n: usize, down: &[FixedBitSet], up: &[FixedBitSet]) -> Vec<(Element, Element)> {
    let mut covers = Vec::new();
    for v in 0..n {
        let mut strict = down[v].clone();
        strict.set(v, false);
        for u in strict.ones() {
            let mut above = up[u].clone();
            above.intersect_with(&strict);
            if above.count_ones(..) == 1 {
                covers.push((u, v));
            }
        }
    }
    covers
}
