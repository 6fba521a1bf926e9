//! Searches in the concrete model: nested search over a chain cover, the
//! recursive 2D array search in classical and quantum form, and its
//! extension to `d` dimensions.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::array::{
    binary_search_cost, checked_cells, split_rect, ArrayOracle, ArraySession, ArrayView,
    CellVerifier, GridDivider, Rect, SortedArrayD, SplitStep,
};
use crate::error::{Error, Result};
use crate::oracle::{ConcreteOracle, QueryLedger};
use crate::poset::{dilworth_decomposition, ChainDecomposition, Element, Poset};
use crate::qsim::{
    bbht_search, exact_grover, recursive_amplified_run, RecursionCostModel, RecursionParams,
    RunOptions, RunOutcome, SearchPredicate,
};

/// Binary search for `a` along `chain`, whose values ascend.
fn chain_binary_search<O: ConcreteOracle + ?Sized>(
    oracle: &mut O,
    label: &str,
    chain: &[Element],
    a: i64,
) -> Result<Option<Element>> {
    let (mut lo, mut hi) = (0, chain.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let v = oracle.query(label, chain[mid])?;
        match v.cmp(&a) {
            std::cmp::Ordering::Equal => return Ok(Some(chain[mid])),
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
        }
    }
    Ok(None)
}

/// Binary search on each chain of a minimum chain cover in turn.
pub fn dilworth_search_classical<O: ConcreteOracle + ?Sized>(
    oracle: &mut O,
) -> Result<Option<Element>> {
    let cover = dilworth_decomposition(oracle.poset());
    chain_search_classical(oracle, &cover)
}

/// Binary search on each chain of `cover` in turn.
pub fn chain_search_classical<O: ConcreteOracle + ?Sized>(
    oracle: &mut O,
    cover: &ChainDecomposition,
) -> Result<Option<Element>> {
    check_cover(oracle.poset(), cover)?;
    let a = oracle.target();
    for chain in &cover.chains {
        if let Some(x) = chain_binary_search(oracle, "binary", chain, a)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

struct ChainPredicate<'o, O: ?Sized> {
    oracle: &'o mut O,
    chains: Vec<Vec<Element>>,
    cost_per_eval: u64,
    target: i64,
    found: Option<Element>,
}

impl<O: ConcreteOracle + ?Sized> SearchPredicate for ChainPredicate<'_, O> {
    fn len(&self) -> usize {
        self.chains.len()
    }

    fn coherent(&self, item: usize) -> bool {
        self.chains[item]
            .iter()
            .any(|&x| self.oracle.coherent(x) == self.target)
    }

    fn charge_iterations(&mut self, iterations: u64) -> Result<()> {
        self.oracle
            .charge_quantum("grover", iterations * self.cost_per_eval)
    }

    fn verify(&mut self, item: usize) -> Result<bool> {
        self.found = chain_binary_search(self.oracle, "binary", &self.chains[item], self.target)?;
        Ok(self.found.is_some())
    }
}

/// Exact search over the chains of a minimum chain cover, where the
/// predicate "this chain holds the target" is a binary search. With
/// duplicate values the chain search switches to the unknown-count search.
pub fn dilworth_search_quantum<O: ConcreteOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    distinct: bool,
    rng: &mut R,
) -> Result<Option<Element>> {
    let cover = dilworth_decomposition(oracle.poset());
    chain_search_quantum(oracle, &cover, distinct, rng)
}

/// Quantum search over the chains of `cover`.
pub fn chain_search_quantum<O: ConcreteOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    cover: &ChainDecomposition,
    distinct: bool,
    rng: &mut R,
) -> Result<Option<Element>> {
    check_cover(oracle.poset(), cover)?;
    let chains = cover.chains.clone();
    let height = chains.iter().map(Vec::len).max().unwrap_or(0);
    let target = oracle.target();
    let mut pred = ChainPredicate {
        oracle,
        chains,
        cost_per_eval: binary_search_cost(height),
        target,
        found: None,
    };
    let hit = if distinct {
        exact_grover(&mut pred, rng)?.found
    } else {
        bbht_search(&mut pred, rng)?.found
    };
    Ok(hit.and(pred.found))
}

fn check_cover(p: &Poset, cover: &ChainDecomposition) -> Result<()> {
    if cover.is_valid_for(p) {
        Ok(())
    } else {
        Err(Error::Parameter("not a chain partition of the poset".into()))
    }
}

/// Trace of the classical 2D search.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Search2DTrace {
    pub found: Option<(usize, usize)>,
    /// Recursion level (1-based) of every split.
    pub steps: Vec<(usize, SplitStep)>,
    pub levels: usize,
}

/// Recursive central row/column search, processed level by level.
pub fn classical_2d_search<O: ArrayOracle + ?Sized>(
    oracle: &mut O,
    a: i64,
) -> Result<Search2DTrace> {
    let mut trace = Search2DTrace::default();
    let root = Rect::new(0, oracle.rows(), 0, oracle.cols());
    let mut queue = VecDeque::new();
    if root.area() > 0 {
        queue.push_back((1usize, root));
    }
    while let Some((level, rect)) = queue.pop_front() {
        let step = split_rect(rect, a, |i, j| oracle.query("binary", i, j))?;
        trace.levels = trace.levels.max(level);
        let hit = step.hit;
        let children = if hit.is_none() { step.children.clone() } else { Vec::new() };
        trace.steps.push((level, step));
        if hit.is_some() {
            trace.found = hit;
            break;
        }
        queue.extend(children.into_iter().map(|c| (level + 1, c)));
    }
    Ok(trace)
}

/// Parameters of the quantum 2D search: two parts per split, declared
/// exponent 1/4.
pub fn grid_params() -> RecursionParams {
    RecursionParams::new(2, 0.25).expect("valid constants")
}

/// Model of the quantum 2D search cost for an array of the given area.
pub fn grid_model(area: usize) -> Result<RecursionCostModel> {
    RecursionCostModel::new(area.max(1), &grid_params(), &|n: usize| {
        (n.max(1) as f64).log2().ceil() + 1.0
    })
}

/// Recursive amplitude amplification over the central split. `view` gives
/// the simulator's uncharged reads; all charges go to `oracle`.
pub fn quantum_2d_search<A, O, R>(
    view: &A,
    oracle: &mut O,
    a: i64,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunOutcome<(usize, usize)>>
where
    A: ArrayView + ?Sized,
    O: ArrayOracle + ?Sized,
    R: Rng + ?Sized,
{
    let divider = GridDivider::new(view, a);
    let mut verifier = CellVerifier { oracle, target: a };
    recursive_amplified_run(
        &divider,
        &Rect::full(view),
        &mut verifier,
        &grid_params(),
        options,
        rng,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DdimMode {
    Classical,
    Quantum,
}

/// Outcome of a `d`-dimensional search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdimOutcome {
    /// Row-major cell index.
    pub found: Option<usize>,
    pub ledger: QueryLedger,
    /// `m^((d-1)/2) d log2 m`, for comparison with the measured counts.
    pub reference_charge: f64,
    /// Repetitions per predicate evaluation standing in for robust search.
    pub repetition_factor: u64,
}

pub const DEFAULT_CELL_BUDGET: usize = 1 << 24;
const REPETITIONS: u64 = 3;

struct SlicePredicate<'a, R: ?Sized> {
    array: &'a SortedArrayD,
    target: i64,
    contains: Vec<bool>,
    per_eval: u64,
    ledger: QueryLedger,
    rng: &'a mut R,
    found: Option<(usize, (usize, usize))>,
}

impl<R: Rng + ?Sized> SearchPredicate for SlicePredicate<'_, R> {
    fn len(&self) -> usize {
        self.contains.len()
    }

    fn coherent(&self, item: usize) -> bool {
        self.contains[item]
    }

    fn charge_iterations(&mut self, iterations: u64) -> Result<()> {
        self.ledger
            .charge_quantum("slice-grover", iterations * self.per_eval)
    }

    fn verify(&mut self, item: usize) -> Result<bool> {
        let slice = self.array.slice(item);
        for _ in 0..REPETITIONS {
            let mut session = ArraySession::new(&slice);
            let out = quantum_2d_search(
                &slice,
                &mut session,
                self.target,
                &RunOptions::default(),
                self.rng,
            )?;
            self.ledger.absorb(session.ledger())?;
            if let Some(cell) = out.found {
                self.found = Some((item, cell));
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `d = 1`: binary search; `d = 2`: the 2D search; `d >= 3`: search over
/// the `m^(d-2)` two-dimensional slices with a repeated 2D search as the
/// predicate.
pub fn ddim_search<R: Rng + ?Sized>(
    array: &SortedArrayD,
    a: i64,
    mode: DdimMode,
    cell_budget: usize,
    rng: &mut R,
) -> Result<DdimOutcome> {
    let (d, m) = (array.d, array.m);
    checked_cells(d, m, cell_budget)?;
    let log_m = (m.max(2) as f64).log2();
    let mut out = DdimOutcome {
        found: None,
        ledger: QueryLedger::new(),
        reference_charge: (m as f64).powf((d as f64 - 1.0) / 2.0) * d as f64 * log_m,
        repetition_factor: 1,
    };
    match d {
        0 => return Err(Error::Parameter("dimension must be positive".into())),
        1 => {
            let (mut lo, mut hi) = (0, m);
            while lo < hi {
                let mid = (lo + hi) / 2;
                out.ledger.charge_classical("binary", 1)?;
                match array.cells[mid].cmp(&a) {
                    std::cmp::Ordering::Equal => {
                        out.found = Some(mid);
                        break;
                    }
                    std::cmp::Ordering::Less => lo = mid + 1,
                    std::cmp::Ordering::Greater => hi = mid,
                }
            }
        }
        2 => {
            let slice = array.slice(0);
            let mut session = ArraySession::new(&slice);
            let cell = match mode {
                DdimMode::Classical => classical_2d_search(&mut session, a)?.found,
                DdimMode::Quantum => {
                    quantum_2d_search(&slice, &mut session, a, &RunOptions::default(), rng)?.found
                }
            };
            out.found = cell.map(|(i, j)| i * m + j);
            out.ledger = session.into_ledger();
        }
        _ => {
            let slices = array.slice_count();
            match mode {
                DdimMode::Classical => {
                    for s in 0..slices {
                        let slice = array.slice(s);
                        let mut session = ArraySession::new(&slice);
                        let trace = classical_2d_search(&mut session, a)?;
                        out.ledger.absorb(session.ledger())?;
                        if let Some((i, j)) = trace.found {
                            out.found = Some(s * m * m + i * m + j);
                            break;
                        }
                    }
                }
                DdimMode::Quantum => {
                    let model = grid_model(m * m)?;
                    let per_eval = REPETITIONS * model.wrapped_cost.ceil() as u64;
                    let contains = (0..slices)
                        .map(|s| !crate::array::positions_of(&array.slice(s), a).is_empty())
                        .collect();
                    let mut pred = SlicePredicate {
                        array,
                        target: a,
                        contains,
                        per_eval,
                        ledger: QueryLedger::new(),
                        rng,
                        found: None,
                    };
                    let mut grover_rng = ChaCha8Rng::seed_from_u64(pred.rng.gen());
                    let hit = exact_grover(&mut pred, &mut grover_rng)?.found;
                    if hit.is_some() {
                        if let Some((s, (i, j))) = pred.found {
                            out.found = Some(s * m * m + i * m + j);
                        }
                    }
                    out.ledger = pred.ledger;
                    out.repetition_factor = REPETITIONS;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::SortedArray2D;
    use crate::oracle::{random_linear_extension, ConcreteSession};
    use crate::poset::{antichain, chain, grid_poset};
    use crate::qsim::OuterWrap;

    fn grid_instance() -> (crate::poset::Poset, Vec<i64>) {
        (grid_poset(2, 3).unwrap(), vec![1, 3, 6, 2, 4, 8, 5, 7, 9])
    }

    #[test]
    fn dilworth_classical_on_grid_instance() {
        let (g, v) = grid_instance();
        let mut s = ConcreteSession::new(&g, &v, 6, true).unwrap();
        assert_eq!(dilworth_search_classical(&mut s).unwrap(), Some(2));
        assert!(s.ledger().total() <= 6);
        let mut s = ConcreteSession::new(&g, &v, 10, true).unwrap();
        assert_eq!(dilworth_search_classical(&mut s).unwrap(), None);
    }

    #[test]
    fn dilworth_classical_on_chain() {
        let c = chain(100).unwrap();
        let v: Vec<i64> = (1..=100).collect();
        for a in [1, 37, 100] {
            let mut s = ConcreteSession::new(&c, &v, a, true).unwrap();
            assert_eq!(dilworth_search_classical(&mut s).unwrap(), Some(a as usize - 1));
            assert!(s.ledger().total() <= binary_search_cost(100));
        }
    }

    #[test]
    fn dilworth_quantum_on_grid_instance() {
        let (g, v) = grid_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rows = ChainDecomposition {
            chains: vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
        };
        for (a, cell) in v.iter().zip(0..) {
            let mut s = ConcreteSession::new(&g, &v, *a, true).unwrap();
            assert_eq!(chain_search_quantum(&mut s, &rows, true, &mut rng).unwrap(), Some(cell));
            assert!(s.ledger().total() <= 2 * binary_search_cost(3));
            let mut s = ConcreteSession::new(&g, &v, *a, true).unwrap();
            assert_eq!(dilworth_search_quantum(&mut s, true, &mut rng).unwrap(), Some(cell));
        }
    }

    #[test]
    fn dilworth_quantum_antichain() {
        let a = antichain(9).unwrap();
        let v = random_linear_extension(&a, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = ConcreteSession::new(&a, &v, v[5], true).unwrap();
        assert_eq!(dilworth_search_quantum(&mut s, true, &mut rng).unwrap(), Some(5));
        let mut s = ConcreteSession::new(&a, &v, 100, true).unwrap();
        assert_eq!(dilworth_search_quantum(&mut s, true, &mut rng).unwrap(), None);
    }

    #[test]
    fn classical_2d_small_cases() {
        let one = SortedArray2D::from_rows(&[vec![5]]).unwrap();
        let mut s = ArraySession::new(&one);
        let t = classical_2d_search(&mut s, 5).unwrap();
        assert_eq!(t.found, Some((0, 0)));
        assert_eq!(s.ledger().total(), 1);
        let a = SortedArray2D::random(6, 9, 2);
        for (i, j) in [(0, 0), (5, 8), (3, 4)] {
            let mut s = ArraySession::new(&a);
            assert_eq!(classical_2d_search(&mut s, a.value(i, j)).unwrap().found, Some((i, j)));
        }
        let mut s = ArraySession::new(&a);
        assert_eq!(classical_2d_search(&mut s, 1).unwrap().found, None);
    }

    #[test]
    fn quantum_2d_forced_on_grid_instance() {
        let a = SortedArray2D::from_rows(&[vec![1, 3, 6], vec![2, 4, 8], vec![5, 7, 9]]).unwrap();
        let mut s = ArraySession::new(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let opts = RunOptions {
            force_success: true,
            ..Default::default()
        };
        let out = quantum_2d_search(&a, &mut s, 6, &opts, &mut rng).unwrap();
        assert_eq!(out.found, Some((0, 2)));
    }

    #[test]
    fn quantum_2d_absent_never_reports() {
        let a = SortedArray2D::random(16, 16, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mut s = ArraySession::new(&a);
            let out = quantum_2d_search(&a, &mut s, 3, &RunOptions::default(), &mut rng).unwrap();
            assert_eq!(out.found, None);
        }
        let mut s = ArraySession::new(&a);
        let single = RunOptions {
            outer: OuterWrap::Single,
            ..Default::default()
        };
        let out = quantum_2d_search(&a, &mut s, a.value(3, 3), &single, &mut rng).unwrap();
        assert!(out.success_probability > 0.0);
    }

    fn ddim_instance(d: usize, m: usize, seed: u64) -> SortedArrayD {
        let g = grid_poset(d, m).unwrap();
        SortedArrayD::new(d, m, random_linear_extension(&g, seed)).unwrap()
    }

    #[test]
    fn ddim_one_dimension() {
        let arr = ddim_instance(1, 20, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = ddim_search(&arr, 7, DdimMode::Quantum, DEFAULT_CELL_BUDGET, &mut rng).unwrap();
        assert_eq!(out.found, Some(6));
        assert!(out.ledger.total() <= binary_search_cost(20));
    }

    #[test]
    fn ddim_three_dimensions() {
        let arr = ddim_instance(3, 8, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hits = 0;
        for t in 0..60 {
            let cell = (t * 37) % 512;
            let out = ddim_search(&arr, arr.cells[cell], DdimMode::Quantum, DEFAULT_CELL_BUDGET, &mut rng)
                .unwrap();
            if let Some(c) = out.found {
                assert_eq!(c, cell);
                hits += 1;
            }
        }
        assert!(hits >= 40, "hits={hits}");
        assert!(ddim_search(&arr, 1, DdimMode::Quantum, 100, &mut rng).is_err());
    }

    #[test]
    fn ddim_two_delegates() {
        let arr = ddim_instance(2, 16, 3);
        let a = arr.cells[77];
        let out = ddim_search(&arr, a, DdimMode::Quantum, DEFAULT_CELL_BUDGET, &mut ChaCha8Rng::seed_from_u64(5))
            .unwrap();
        let slice = arr.slice(0);
        let mut s = ArraySession::new(&slice);
        let direct = quantum_2d_search(&slice, &mut s, a, &RunOptions::default(), &mut ChaCha8Rng::seed_from_u64(5))
            .unwrap();
        assert_eq!(out.found, direct.found.map(|(i, j)| i * 16 + j));
        assert_eq!(&out.ledger, s.ledger());
    }
}
