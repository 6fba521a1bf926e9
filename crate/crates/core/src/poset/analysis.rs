use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Element, ElementSet, Poset};
use crate::error::{Error, Result};

pub const GAMMA_LIMIT: usize = 16;
pub const DECISION_DEPTH_LIMIT: usize = 12;
pub const IDEAL_LIMIT: usize = 24;

/// The second argument of the two-parameter abstract oracle `f_a(x, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Probe {
    /// `z = 0`: is the marked element at or below `x`?
    AtOrBelow,
    /// `z = 1`: is `x` the marked element?
    Equal,
}

impl Probe {
    pub fn bit(self) -> u8 {
        match self {
            Probe::AtOrBelow => 0,
            Probe::Equal => 1,
        }
    }

    pub fn from_bit(z: u8) -> Self {
        if z == 0 {
            Probe::AtOrBelow
        } else {
            Probe::Equal
        }
    }
}

/// A partition of the elements into chains, each listed bottom to top.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    pub chains: Vec<Vec<Element>>,
}

impl ChainDecomposition {
    /// Checks the partition and chain properties against `p`.
    pub fn is_valid_for(&self, p: &Poset) -> bool {
        let mut seen = vec![false; p.len()];
        for chain in &self.chains {
            if chain.is_empty() {
                return false;
            }
            for &x in chain {
                if x >= p.len() || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
            if chain.windows(2).any(|w| !p.lt(w[0], w[1])) {
                return false;
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn longest(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Minimum chain cover: a minimum path cover of the strict comparability
/// DAG, obtained from a maximum bipartite matching (`u` on the left matched
/// to its successor `v` on the right).
pub fn dilworth_decomposition(p: &Poset) -> ChainDecomposition {
    let n = p.len();
    let succ: Vec<Vec<Element>> = (0..n)
        .map(|u| p.up_set(u).ones().filter(|&v| v != u).collect())
        .collect();
    let mut match_right: Vec<Option<Element>> = vec![None; n];
    let mut match_left: Vec<Option<Element>> = vec![None; n];
    let mut visited = vec![0usize; n];
    let mut stamp = 0;

    fn augment(
        u: Element,
        succ: &[Vec<Element>],
        match_left: &mut [Option<Element>],
        match_right: &mut [Option<Element>],
        visited: &mut [usize],
        stamp: usize,
    ) -> bool {
        for &v in &succ[u] {
            if visited[v] == stamp {
                continue;
            }
            visited[v] = stamp;
            let free = match match_right[v] {
                None => true,
                Some(w) => augment(w, succ, match_left, match_right, visited, stamp),
            };
            if free {
                match_right[v] = Some(u);
                match_left[u] = Some(v);
                return true;
            }
        }
        false
    }

    // Greedy seed, then augmenting paths.
    for u in 0..n {
        if let Some(&v) = succ[u].iter().find(|&&v| match_right[v].is_none()) {
            match_right[v] = Some(u);
            match_left[u] = Some(v);
        }
    }
    for u in 0..n {
        if match_left[u].is_none() {
            stamp += 1;
            augment(u, &succ, &mut match_left, &mut match_right, &mut visited, stamp);
        }
    }

    let mut chains = Vec::new();
    for start in 0..n {
        if match_right[start].is_some() {
            continue;
        }
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(next) = match_left[cur] {
            chain.push(next);
            cur = next;
        }
        chains.push(chain);
    }
    ChainDecomposition { chains }
}

/// The exact value of gamma for the family `{f_a : a in S}` together with
/// a minimizing subset and its best query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaResult {
    pub value: Ratio<u32>,
    pub witness_subset: Vec<Element>,
    pub witness_query: (Element, Probe),
}

impl GammaResult {
    pub fn as_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

/// Exhaustive evaluation of
/// `min_{S' ⊆ S, |S'| >= 2} max_{(x,z)} min_b |S'_{(x,z),b}| / |S'|`.
pub fn gamma_bruteforce(p: &Poset) -> Result<GammaResult> {
    let n = p.len();
    if n > GAMMA_LIMIT {
        return Err(Error::Size {
            what: "gamma",
            size: n,
            limit: GAMMA_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::Undefined("gamma of a poset with fewer than two elements"));
    }
    // Query (x, z) answers 1 exactly for the candidates a in `answer_ones`.
    let mut queries: Vec<(Element, Probe, u32)> = Vec::with_capacity(2 * n);
    for x in 0..n {
        let below: u32 = p.down_set(x).ones().fold(0, |m, a| m | (1 << a));
        queries.push((x, Probe::AtOrBelow, below));
        queries.push((x, Probe::Equal, 1 << x));
    }

    let mut best: Option<(u32, u32, u32, usize)> = None; // (num, den, subset, query idx)
    for subset in 1u32..(1u32 << n) {
        let size = subset.count_ones();
        if size < 2 {
            continue;
        }
        let (mut split, mut arg) = (0u32, 0usize);
        for (qi, &(_, _, ones)) in queries.iter().enumerate() {
            let yes = (subset & ones).count_ones();
            let guaranteed = yes.min(size - yes);
            if guaranteed > split {
                split = guaranteed;
                arg = qi;
            }
        }
        let better = match best {
            None => true,
            Some((num, den, _, _)) => (split as u64) * (den as u64) < (num as u64) * (size as u64),
        };
        if better {
            best = Some((split, size, subset, arg));
        }
    }
    let (num, den, subset, qi) = best.expect("at least one subset of size two");
    let (x, z, _) = queries[qi];
    Ok(GammaResult {
        value: Ratio::new(num, den),
        witness_subset: (0..n).filter(|&a| subset & (1 << a) != 0).collect(),
        witness_query: (x, z),
    })
}

/// `wt(v) = |{x in T : x <= v}|`, restricted to `T`.
pub fn weight_in(p: &Poset, set: &ElementSet, v: Element) -> usize {
    p.down_set(v).intersection(set).count()
}

/// The element of `set` with the largest weight not exceeding
/// `ceil(|set| / 2)`, lowest id on ties.
pub fn central_element(p: &Poset, set: &ElementSet) -> Result<Element> {
    let size = set.count_ones(..);
    if size == 0 {
        return Err(Error::EmptySet);
    }
    let cap = size.div_ceil(2);
    let mut best: Option<(usize, Element)> = None;
    for v in set.ones() {
        let w = weight_in(p, set, v);
        if w <= cap && best.is_none_or(|(bw, _)| w > bw) {
            best = Some((w, v));
        }
    }
    Ok(best.expect("minimal elements have weight 1").1)
}

/// Elements of `set` with no strict upper bound inside `set`.
pub fn maximal_elements(p: &Poset, set: &ElementSet) -> ElementSet {
    let mut out = FixedBitSet::with_capacity(p.len());
    for v in set.ones() {
        if p.up_set(v).intersection(set).all(|u| u == v) {
            out.insert(v);
        }
    }
    out
}

/// Elements of `set` covered by the single element covering `x`. A root
/// `x` has as siblings the roots contained in `set`.
pub fn siblings(p: &Poset, set: &ElementSet, x: Element) -> Result<ElementSet> {
    if x >= p.len() {
        return Err(Error::Range {
            element: x,
            len: p.len(),
        });
    }
    let mut out = FixedBitSet::with_capacity(p.len());
    match p.parents(x) {
        [] => {
            for v in set.ones().filter(|&v| p.parents(v).is_empty()) {
                out.insert(v);
            }
        }
        [parent] => {
            for &c in p.children(*parent) {
                if set.contains(c) {
                    out.insert(c);
                }
            }
        }
        _ => return Err(Error::NotForest(x)),
    }
    Ok(out)
}

/// Worst-case number of queries of an optimal exact classical search in the
/// concrete model, by memoized game search. A query to an unmarked element
/// `s` is answered either "below" (marking `down(s)`) or "above" (marking
/// `up(s)`); the search ends when every element is classified.
pub fn exact_decision_depth(p: &Poset) -> Result<usize> {
    let n = p.len();
    if n > DECISION_DEPTH_LIMIT {
        return Err(Error::Size {
            what: "exact decision depth",
            size: n,
            limit: DECISION_DEPTH_LIMIT,
        });
    }
    let down: Vec<u16> = (0..n)
        .map(|x| p.down_set(x).ones().fold(0, |m, a| m | (1 << a)))
        .collect();
    let up: Vec<u16> = (0..n)
        .map(|x| p.up_set(x).ones().fold(0, |m, a| m | (1 << a)))
        .collect();
    let all: u16 = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };

    fn solve(
        below: u16,
        above: u16,
        all: u16,
        down: &[u16],
        up: &[u16],
        memo: &mut HashMap<(u16, u16), u8>,
    ) -> u8 {
        let marked = below | above;
        if marked == all {
            return 0;
        }
        if let Some(&d) = memo.get(&(below, above)) {
            return d;
        }
        let mut best = u8::MAX;
        let mut unmarked = all & !marked;
        while unmarked != 0 {
            let s = unmarked.trailing_zeros() as usize;
            unmarked &= unmarked - 1;
            let lo = solve(below | down[s], above, all, down, up, memo);
            if lo + 1 >= best {
                continue;
            }
            let hi = solve(below, above | up[s], all, down, up, memo);
            best = best.min(1 + lo.max(hi));
        }
        memo.insert((below, above), best);
        best
    }

    let mut memo = HashMap::new();
    Ok(solve(0, 0, all, &down, &up, &mut memo) as usize)
}

/// Number of down-closed subsets (including the empty one).
pub fn count_ideals(p: &Poset) -> Result<u64> {
    let n = p.len();
    if n > IDEAL_LIMIT {
        return Err(Error::Size {
            what: "ideal count",
            size: n,
            limit: IDEAL_LIMIT,
        });
    }
    let order = p.topological_order().to_vec();
    let child_masks: Vec<u32> = (0..n)
        .map(|v| p.children(v).iter().fold(0, |m, &c| m | (1 << c)))
        .collect();

    fn walk(i: usize, ideal: u32, order: &[Element], child_masks: &[u32]) -> u64 {
        if i == order.len() {
            return 1;
        }
        let v = order[i];
        let mut total = walk(i + 1, ideal, order, child_masks);
        if child_masks[v] & !ideal == 0 {
            total += walk(i + 1, ideal | (1 << v), order, child_masks);
        }
        total
    }

    Ok(walk(0, 0, &order, &child_masks))
}
