//! Recursive amplitude amplification over a database that splits into
//! smaller databases: the cost/probability model and a Monte Carlo run on
//! concrete instances.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grover::BBHT_GROWTH;
use crate::error::{Error, Result};

/// How the `n^alpha` amplification executions per level are rounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Executions {
    /// Real-valued `n^alpha`, with success `sin^2(n^alpha asin(sqrt p))`.
    Exact,
    /// The largest odd integer not above `max(1, floor(n^alpha))`.
    FloorOdd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionParams {
    /// Number of parts per split.
    pub k: usize,
    /// Exponent with `f(n) = O(n^(1/2 - epsilon))`.
    pub epsilon: f64,
    /// Sizes at or below this are searched directly.
    pub base_size: usize,
    pub base_cost: f64,
    pub executions: Executions,
}

impl RecursionParams {
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("branching {k} below 2")));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Parameter(format!("epsilon {epsilon} outside (0, 1/2)")));
        }
        Ok(Self {
            k,
            epsilon,
            base_size: 4,
            base_cost: 4.0,
            executions: Executions::Exact,
        })
    }

    pub fn with_base(mut self, size: usize, cost: f64) -> Self {
        self.base_size = size.max(1);
        self.base_cost = cost;
        self
    }

    pub fn with_executions(mut self, executions: Executions) -> Self {
        self.executions = executions;
        self
    }

    pub fn delta(&self) -> f64 {
        self.epsilon / 2.0
    }

    pub fn alpha(&self) -> f64 {
        let e = self.epsilon;
        e * (4.0 - 3.0 * e) / (8.0 * (2.0 - e))
    }

    /// `max(1, ceil(delta log_k n))`
    pub fn split_levels(&self, n: usize) -> u32 {
        let l = self.delta() * (n as f64).ln() / (self.k as f64).ln();
        (l - 1e-9).ceil().max(1.0) as u32
    }

    /// Executions per level at size `n` when a single descent succeeds with
    /// probability `p0`. Never rotates past the marked axis.
    pub fn executions_for(&self, n: usize, p0: f64) -> f64 {
        let raw = (n as f64).powf(self.alpha());
        let theta = p0.clamp(0.0, 1.0).sqrt().asin();
        let limit = if theta > 0.0 { FRAC_PI_2 / theta } else { f64::INFINITY };
        match self.executions {
            Executions::Exact => raw.min(limit).max(1.0),
            Executions::FloorOdd => largest_odd(raw.floor().min(limit.floor())) as f64,
        }
    }
}

fn largest_odd(x: f64) -> u64 {
    let x = x.max(1.0) as u64;
    if x % 2 == 0 {
        x - 1
    } else {
        x
    }
}

/// `sin^2(r asin(sqrt p))`
pub(crate) fn amplified(p: f64, r: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    (r * p.min(1.0).sqrt().asin()).sin().powi(2)
}

/// Rounds of exact amplification needed from success `p`.
fn outer_rounds(p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    let theta = p.min(1.0).sqrt().asin();
    (PI / (4.0 * theta) - 0.5 - 1e-9).ceil().max(0.0) as u64
}

/// One recursion level of the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub size: usize,
    pub split_levels: u32,
    pub child_size: usize,
    pub split_cost: f64,
    pub executions: f64,
    /// Success of one descent before amplification.
    pub base_probability: f64,
    pub probability: f64,
    pub cost: f64,
}

struct ModelMemo<'f> {
    params: RecursionParams,
    f: &'f dyn Fn(usize) -> f64,
    memo: HashMap<usize, LevelRecord>,
}

impl<'f> ModelMemo<'f> {
    fn new(params: &RecursionParams, f: &'f dyn Fn(usize) -> f64) -> Self {
        Self {
            params: params.clone(),
            f,
            memo: HashMap::new(),
        }
    }

    fn record(&mut self, n: usize) -> LevelRecord {
        if let Some(r) = self.memo.get(&n) {
            return r.clone();
        }
        let p = self.params.clone();
        let rec = if n <= p.base_size {
            LevelRecord {
                size: n,
                split_levels: 0,
                child_size: 0,
                split_cost: 0.0,
                executions: 1.0,
                base_probability: 1.0,
                probability: 1.0,
                cost: p.base_cost,
            }
        } else {
            let l = p.split_levels(n);
            let k = p.k as f64;
            let parts = k.powi(l as i32);
            let child = ((n as f64 / parts).ceil() as usize).max(1);
            let split_cost: f64 = (0..l)
                .map(|i| {
                    let ki = k.powi(i as i32);
                    ki * (self.f)((n as f64 / ki).ceil() as usize)
                })
                .sum();
            let sub = self.record(child);
            let p0 = sub.probability / parts;
            let r = p.executions_for(n, p0);
            LevelRecord {
                size: n,
                split_levels: l,
                child_size: child,
                split_cost,
                executions: r,
                base_probability: p0,
                probability: amplified(p0, r),
                cost: r * (split_cost + sub.cost),
            }
        };
        self.memo.insert(n, rec.clone());
        rec
    }

    fn executions(&mut self, n: usize) -> f64 {
        self.record(n).executions
    }
}

/// The recurrences
/// `T(n) = r (sum_{i<l} k^i f(n/k^i) + T(n/k^l))` and
/// `P(n) = sin^2(r asin(sqrt(P(n/k^l) / k^l)))` with `r = n^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionCostModel {
    pub params: RecursionParams,
    pub delta: f64,
    pub alpha: f64,
    /// Top level first.
    pub levels: Vec<LevelRecord>,
    pub cost: f64,
    pub success: f64,
    pub outer_rounds: u64,
    /// Cost after amplifying the whole search to near-certain success.
    pub wrapped_cost: f64,
}

impl RecursionCostModel {
    pub fn new(n: usize, params: &RecursionParams, f: &dyn Fn(usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("empty database".into()));
        }
        let mut memo = ModelMemo::new(params, f);
        let mut levels = vec![memo.record(n)];
        while let Some(last) = levels.last() {
            if last.split_levels == 0 {
                break;
            }
            let next = memo.record(last.child_size);
            levels.push(next);
        }
        let top = &levels[0];
        let rounds = outer_rounds(top.probability);
        Ok(Self {
            params: params.clone(),
            delta: params.delta(),
            alpha: params.alpha(),
            cost: top.cost,
            success: top.probability,
            outer_rounds: rounds,
            wrapped_cost: top.cost * (2 * rounds + 1) as f64,
            levels,
        })
    }
}

/// A database that can be split recursively. All methods are uncharged
/// reads: split costs are returned and accounted for by the run.
pub trait Divider {
    type Part: Clone;
    type Found: Clone;

    fn size(&self, part: &Self::Part) -> usize;
    /// The parts and the number of queries the split makes.
    fn split(&self, part: &Self::Part) -> Result<(Vec<Self::Part>, u64)>;
    fn contains_target(&self, part: &Self::Part) -> bool;
    /// Queries needed to search a base-case part directly.
    fn base_cost(&self, part: &Self::Part) -> u64;
    /// The target inside a base-case part, as the direct search finds it.
    fn locate(&self, part: &Self::Part) -> Option<Self::Found>;
    /// Declared bound `f(n)` on the cost of splitting a database of size `n`.
    fn split_cost_bound(&self, size: usize) -> f64;
}

/// The charged side of a run.
pub trait Verifier<F> {
    /// Classical check of a measured candidate; `None` stands for a measured
    /// element that is not the target.
    fn verify(&mut self, candidate: Option<&F>) -> Result<bool>;
    fn charge_quantum(&mut self, units: u64) -> Result<()>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OuterWrap {
    /// One execution of the recursive algorithm.
    Single,
    /// Unknown-probability amplification of the whole algorithm.
    Bbht,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub outer: OuterWrap,
    /// Require exactly one part to contain the target after every split.
    pub strict: bool,
    /// Treat the first measurement as successful.
    pub force_success: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            outer: OuterWrap::Bbht,
            strict: true,
            force_success: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome<F> {
    pub found: Option<F>,
    /// Success of one execution on this instance.
    pub success_probability: f64,
    /// Success of one execution predicted by the model at this size.
    pub model_probability: f64,
    pub cost_per_execution: f64,
    pub executions: u64,
    pub rounds: u64,
    pub quantum_charged: u64,
    pub verifications: u64,
}

struct Traversal<'a, D: Divider> {
    divider: &'a D,
    memo: ModelMemo<'a>,
    strict: bool,
    k: usize,
    base_size: usize,
}

impl<D: Divider> Traversal<'_, D> {
    fn split_checked(&self, part: &D::Part, contains: bool) -> Result<(Vec<D::Part>, u64)> {
        let n = self.divider.size(part);
        let (parts, cost) = self.divider.split(part)?;
        if parts.len() > self.k {
            return Err(Error::ConditionViolation(format!(
                "split of a size-{n} database produced {} parts, more than {}",
                parts.len(),
                self.k
            )));
        }
        let cap = n.div_ceil(self.k);
        if let Some(big) = parts.iter().map(|p| self.divider.size(p)).find(|&s| s > cap) {
            return Err(Error::ConditionViolation(format!(
                "split of a size-{n} database produced a part of size {big}, above {cap}"
            )));
        }
        if contains && self.strict {
            let hits = parts.iter().filter(|p| self.divider.contains_target(p)).count();
            if hits != 1 {
                return Err(Error::ConditionViolation(format!(
                    "target lies in {hits} parts of a split, not exactly one"
                )));
            }
        }
        Ok((parts, cost))
    }

    fn cost(&mut self, part: &D::Part) -> Result<f64> {
        let n = self.divider.size(part);
        if n <= self.base_size {
            return Ok(self.divider.base_cost(part) as f64);
        }
        let mut cur = part.clone();
        let mut acc = 0u64;
        let mut sub = 0.0;
        let mut alive = true;
        for _ in 0..self.memo.params.split_levels(n) {
            if self.divider.size(&cur) <= 1 {
                break;
            }
            let contains = self.divider.contains_target(&cur);
            let (parts, c) = self.split_checked(&cur, contains)?;
            acc += c;
            match parts.into_iter().max_by_key(|p| self.divider.size(p)) {
                Some(p) => cur = p,
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            sub = self.cost(&cur)?;
        }
        Ok(self.memo.executions(n) * (acc as f64 + sub))
    }

    /// Parts reached by a uniformly random descent that contain the target,
    /// with their probabilities.
    fn descend(&self, part: &D::Part) -> Result<Vec<(D::Part, f64)>> {
        let n = self.divider.size(part);
        let mut frontier = vec![(part.clone(), 1.0)];
        for _ in 0..self.memo.params.split_levels(n) {
            let mut next = Vec::new();
            for (p, w) in frontier {
                if self.divider.size(&p) <= 1 {
                    next.push((p, w));
                    continue;
                }
                let (parts, _) = self.split_checked(&p, true)?;
                let share = w / parts.len().max(1) as f64;
                next.extend(
                    parts
                        .into_iter()
                        .filter(|c| self.divider.contains_target(c))
                        .map(|c| (c, share)),
                );
            }
            frontier = next;
        }
        Ok(frontier)
    }

    fn prob(&mut self, part: &D::Part) -> Result<f64> {
        if !self.divider.contains_target(part) {
            return Ok(0.0);
        }
        let n = self.divider.size(part);
        if n <= self.base_size {
            return Ok(1.0);
        }
        let mut p0 = 0.0;
        for (leaf, w) in self.descend(part)? {
            p0 += w * self.prob(&leaf)?;
        }
        Ok(amplified(p0, self.memo.executions(n)))
    }

    /// A target drawn according to which descent paths succeed.
    fn sample<R: Rng + ?Sized>(&mut self, part: &D::Part, rng: &mut R) -> Result<Option<D::Found>> {
        if self.divider.size(part) <= self.base_size {
            return Ok(self.divider.locate(part));
        }
        let leaves = self.descend(part)?;
        let mut weights = Vec::with_capacity(leaves.len());
        for (leaf, w) in &leaves {
            weights.push(w * self.prob(leaf)?);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Ok(None);
        }
        let mut x = rng.gen::<f64>() * total;
        for ((leaf, _), w) in leaves.iter().zip(&weights) {
            if x < *w {
                return self.sample(leaf, rng);
            }
            x -= w;
        }
        let last = leaves.iter().zip(&weights).rev().find(|(_, &w)| w > 0.0);
        match last {
            Some(((leaf, _), _)) => self.sample(leaf, rng),
            None => Ok(None),
        }
    }
}

/// Runs the recursive search on `root`: split costs and success
/// probabilities are computed on the actual instance, the measurement is
/// sampled, and every measured candidate is verified classically.
pub fn recursive_amplified_run<D, V, R>(
    divider: &D,
    root: &D::Part,
    verifier: &mut V,
    params: &RecursionParams,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunOutcome<D::Found>>
where
    D: Divider,
    V: Verifier<D::Found> + ?Sized,
    R: Rng + ?Sized,
{
    let f = |m: usize| divider.split_cost_bound(m);
    let mut tr = Traversal {
        divider,
        memo: ModelMemo::new(params, &f),
        strict: options.strict,
        k: params.k,
        base_size: params.base_size,
    };
    let n = divider.size(root);
    let cost = tr.cost(root)?;
    let p = tr.prob(root)?;
    let model_p = tr.memo.record(n).probability;

    let mut out = RunOutcome {
        found: None,
        success_probability: p,
        model_probability: model_p,
        cost_per_execution: cost,
        executions: 0,
        rounds: 0,
        quantum_charged: 0,
        verifications: 0,
    };
    let theta = p.min(1.0).sqrt().asin();
    let (cap, max_guess) = match options.outer {
        OuterWrap::Single => (1, 1.0),
        OuterWrap::Bbht => {
            let inv = 1.0 / model_p.max(f64::MIN_POSITIVE).sqrt();
            ((super::grover::BBHT_CUTOFF * inv).ceil() as u64, inv.max(1.0))
        }
    };
    let mut guess = 1.0f64;
    while out.executions < cap {
        let j = match options.outer {
            OuterWrap::Single => 0,
            OuterWrap::Bbht => rng.gen_range(0..guess.ceil() as u64),
        };
        let runs = 2 * j + 1;
        let units = (runs as f64 * cost).ceil() as u64;
        verifier.charge_quantum(units)?;
        out.quantum_charged += units;
        out.executions += runs;
        out.rounds += 1;
        let success = (options.force_success && out.rounds == 1)
            || rng.gen::<f64>() < (runs as f64 * theta).sin().powi(2);
        let candidate = if success { tr.sample(root, rng)? } else { None };
        out.verifications += 1;
        if verifier.verify(candidate.as_ref())? {
            out.found = candidate;
            break;
        }
        guess = (guess * BBHT_GROWTH).min(max_guess);
    }
    Ok(out)
}

/// The interval `0..n` split into equal consecutive chunks, with an optional
/// target index. Split cost is `ceil(log2 n)`.
#[derive(Clone, Debug)]
pub struct IntervalDivider {
    pub target: Option<usize>,
    pub chunks: usize,
}

impl IntervalDivider {
    pub fn new(target: Option<usize>, chunks: usize) -> Self {
        Self { target, chunks }
    }
}

impl Divider for IntervalDivider {
    type Part = (usize, usize);
    type Found = usize;

    fn size(&self, part: &(usize, usize)) -> usize {
        part.1 - part.0
    }

    fn split(&self, &(lo, hi): &(usize, usize)) -> Result<(Vec<(usize, usize)>, u64)> {
        let len = hi - lo;
        let step = len.div_ceil(self.chunks).max(1);
        let parts = (lo..hi)
            .step_by(step)
            .map(|s| (s, (s + step).min(hi)))
            .collect();
        Ok((parts, self.split_cost_bound(len) as u64))
    }

    fn contains_target(&self, &(lo, hi): &(usize, usize)) -> bool {
        self.target.is_some_and(|t| lo <= t && t < hi)
    }

    fn base_cost(&self, part: &(usize, usize)) -> u64 {
        self.size(part) as u64
    }

    fn locate(&self, part: &(usize, usize)) -> Option<usize> {
        self.target.filter(|_| self.contains_target(part))
    }

    fn split_cost_bound(&self, size: usize) -> f64 {
        (size.max(1) as f64).log2().ceil()
    }
}

/// Verifier for [`IntervalDivider`] runs that counts its charges.
#[derive(Clone, Debug, Default)]
pub struct IntervalVerifier {
    pub target: Option<usize>,
    pub classical: u64,
    pub quantum: u64,
}

impl Verifier<usize> for IntervalVerifier {
    fn verify(&mut self, candidate: Option<&usize>) -> Result<bool> {
        self.classical += 1;
        Ok(candidate.is_some() && candidate.copied() == self.target)
    }

    fn charge_quantum(&mut self, units: u64) -> Result<()> {
        self.quantum += units;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn log2(n: usize) -> f64 {
        (n.max(1) as f64).log2()
    }

    #[test]
    fn parameter_formulas() {
        let p = RecursionParams::new(2, 0.25).unwrap();
        assert!((p.alpha() - 13.0 / 224.0).abs() < 1e-15);
        assert!((p.delta() - 0.125).abs() < 1e-15);
        let half = RecursionParams { epsilon: 0.5, ..p.clone() };
        assert!((half.alpha() - 5.0 / 48.0).abs() < 1e-15);
        assert!(RecursionParams::new(1, 0.25).is_err());
        assert!(RecursionParams::new(2, 0.5).is_err());
    }

    #[test]
    fn base_case() {
        let p = RecursionParams::new(2, 0.25).unwrap().with_base(8, 3.0);
        let m = RecursionCostModel::new(8, &p, &log2).unwrap();
        assert_eq!(m.levels.len(), 1);
        assert_eq!((m.cost, m.success), (3.0, 1.0));
    }

    #[test]
    fn model_levels_chain_down() {
        let p = RecursionParams::new(2, 0.25).unwrap();
        let m = RecursionCostModel::new(1 << 16, &p, &log2).unwrap();
        assert!(m.levels.windows(2).all(|w| w[1].size == w[0].child_size));
        assert!(m.success > 0.0 && m.success <= 1.0);
        assert!(m.wrapped_cost >= m.cost);
    }

    #[test]
    fn too_many_parts() {
        let params = RecursionParams::new(2, 0.25).unwrap();
        let d = IntervalDivider::new(Some(5), 3);
        let mut v = IntervalVerifier::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = recursive_amplified_run(&d, &(0, 64), &mut v, &params, &RunOptions::default(), &mut rng);
        assert!(matches!(r, Err(Error::ConditionViolation(_))));
    }

    #[test]
    fn run_probability_matches_model() {
        let params = RecursionParams::new(2, 0.25).unwrap();
        let d = IntervalDivider::new(Some(1234), 2);
        let mut v = IntervalVerifier { target: Some(1234), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let opts = RunOptions { outer: OuterWrap::Single, ..Default::default() };
        let out = recursive_amplified_run(&d, &(0, 4096), &mut v, &params, &opts, &mut rng).unwrap();
        assert!((out.success_probability - out.model_probability).abs() < 1e-12);
        if let Some(t) = out.found {
            assert_eq!(t, 1234);
        }
    }

    #[test]
    fn absent_target_is_never_reported() {
        let params = RecursionParams::new(2, 0.25).unwrap();
        let d = IntervalDivider::new(None, 2);
        let mut v = IntervalVerifier::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out =
            recursive_amplified_run(&d, &(0, 1000), &mut v, &params, &RunOptions::default(), &mut rng)
                .unwrap();
        assert_eq!(out.found, None);
        assert_eq!(out.success_probability, 0.0);
        assert_eq!(v.classical, out.verifications);
    }

    #[test]
    fn forced_success_returns_target() {
        let params = RecursionParams::new(2, 0.25).unwrap();
        let d = IntervalDivider::new(Some(77), 2);
        let mut v = IntervalVerifier { target: Some(77), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let opts = RunOptions { force_success: true, ..Default::default() };
        let out = recursive_amplified_run(&d, &(0, 500), &mut v, &params, &opts, &mut rng).unwrap();
        assert_eq!(out.found, Some(77));
        assert_eq!(out.rounds, 1);
    }
}
