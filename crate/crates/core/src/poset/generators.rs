use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Element, Poset};
use crate::error::{Error, Result};

pub fn chain(n: usize) -> Result<Poset> {
    let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::new(n, &covers)
}

pub fn antichain(n: usize) -> Result<Poset> {
    Poset::new(n, &[])
}

/// The product of `d` chains of length `m`, with cell `(i_1, .., i_d)` stored
/// at row-major index `sum i_j m^(d-j)`.
pub fn grid_poset(d: usize, m: usize) -> Result<Poset> {
    if d == 0 || m == 0 {
        return Err(Error::Parameter("grid dimension and side must be positive".into()));
    }
    let n = checked_pow(m, d).ok_or_else(|| Error::Parameter("grid too large".into()))?;
    let mut covers = Vec::new();
    for cell in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            if (cell / stride) % m + 1 < m {
                covers.push((cell, cell + stride));
            }
            stride *= m;
        }
    }
    Poset::new(n, &covers)
}

/// A complete `k`-ary tree with `levels` levels, root on top. Nodes are
/// numbered breadth-first from the root `0`; node `i > 0` sits directly
/// below `(i - 1) / k`.
pub fn forest_poset(k: usize, levels: usize) -> Result<Poset> {
    if k == 0 {
        return Err(Error::Parameter("arity must be positive".into()));
    }
    let mut n = 0usize;
    let mut width = 1usize;
    for _ in 0..levels {
        n = n
            .checked_add(width)
            .ok_or_else(|| Error::Parameter("tree too large".into()))?;
        width = width.saturating_mul(k);
    }
    let covers: Vec<_> = (1..n).map(|i| (i, (i - 1) / k)).collect();
    Poset::new(n, &covers)
}

/// `a` pairwise incomparable bottom elements, each below every one of `b`
/// top elements.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Poset> {
    let mut covers = Vec::with_capacity(a * b);
    for u in 0..a {
        for v in a..a + b {
            covers.push((u, v));
        }
    }
    Poset::new(a + b, &covers)
}

/// Includes each pair `i < j` as a relation independently with probability
/// `density`, then reduces to covers.
pub fn random_poset(n: usize, density: f64, seed: u64) -> Result<Poset> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Parameter(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                rel.push((i, j));
            }
        }
    }
    Poset::from_relations(n, &rel)
}

/// A random forest: node `i` becomes a new root or hangs below one of the
/// earlier nodes, uniformly among the `i + 1` choices.
pub fn random_forest(n: usize, seed: u64) -> Result<Poset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covers: Vec<(Element, Element)> = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..=i);
        if parent < i {
            covers.push((i, parent));
        }
    }
    Poset::new(n, &covers)
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}
