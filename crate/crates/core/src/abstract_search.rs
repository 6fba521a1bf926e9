//! Abstract-model search: exact quantum search of forest-like posets, its
//! sampling variant for several marked elements, and the classical halving
//! learner for arbitrary posets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::AbstractOracle;
use crate::poset::analysis::weight_in;
use crate::poset::{central_element, maximal_elements, siblings, Element, ElementSet, Poset, Probe};
use crate::qsim::{exact_grover, SearchPredicate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// `|T|` at the start of the iteration.
    pub residual: usize,
    pub central: Element,
    pub central_maximal: bool,
    pub candidates: Vec<Element>,
    /// Total weight of the candidates within `T`.
    pub candidate_weight: usize,
    pub hit: Option<Element>,
    /// Ledger total charged by this iteration.
    pub queries: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestSearchTrace {
    pub iterations: Vec<IterationRecord>,
    pub found: Option<Element>,
    pub queries: u64,
}

impl ForestSearchTrace {
    pub fn loop_bound(n: usize) -> usize {
        ceil_log2(n) + 1
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn check_forest(p: &Poset) -> Result<()> {
    match (0..p.len()).find(|&x| p.parents(x).len() > 1) {
        Some(x) => Err(Error::NotForest(x)),
        None => Ok(()),
    }
}

struct CandidatePredicate<'o, O: ?Sized> {
    oracle: &'o mut O,
    items: &'o [Element],
}

impl<O: AbstractOracle + ?Sized> SearchPredicate for CandidatePredicate<'_, O> {
    fn len(&self) -> usize {
        self.items.len()
    }

    fn coherent(&self, item: usize) -> bool {
        self.oracle.coherent(self.items[item], Probe::AtOrBelow)
    }

    fn charge_iterations(&mut self, iterations: u64) -> Result<()> {
        self.oracle.charge_quantum("grover", iterations)
    }

    fn verify(&mut self, item: usize) -> Result<bool> {
        self.oracle.query("verify", self.items[item], Probe::AtOrBelow)
    }
}

/// Candidate set of one iteration: the maximal elements of `T` when the
/// central element is maximal, else its siblings within `T`.
fn candidates(p: &Poset, t: &ElementSet) -> Result<(Element, bool, Vec<Element>)> {
    let x = central_element(p, t)?;
    let maximal = maximal_elements(p, t);
    if maximal.contains(x) {
        if !p.parents(x).is_empty() {
            return Err(Error::ConditionViolation(format!(
                "central element {x} is maximal in the residual set but not in the poset"
            )));
        }
        Ok((x, true, maximal.ones().collect()))
    } else {
        let mut g = siblings(p, t, x)?;
        g.intersect_with(t);
        Ok((x, false, g.ones().collect()))
    }
}

fn shrink(p: &Poset, t: &mut ElementSet, g: &[Element], hit: Option<Element>) {
    match hit {
        Some(y) => t.intersect_with(p.down_set(y)),
        None => {
            for &y in g {
                t.difference_with(p.down_set(y));
            }
        }
    }
}

fn final_check<O: AbstractOracle + ?Sized>(
    oracle: &mut O,
    t: &ElementSet,
) -> Result<Option<Element>> {
    match t.ones().next() {
        Some(v) if oracle.query("confirm", v, Probe::Equal)? => Ok(Some(v)),
        _ => Ok(None),
    }
}

/// Exact search of a forest-like poset holding at most one marked element.
/// Each iteration runs exact Grover search over a candidate set whose
/// down-sets cover at least half of the residual set `T`.
pub fn forest_search<O: AbstractOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    rng: &mut R,
) -> Result<ForestSearchTrace> {
    let p = oracle.poset().clone();
    check_forest(&p)?;
    let start = oracle.ledger().total();
    let mut trace = ForestSearchTrace::default();
    let mut t = p.full_set();
    while t.count_ones(..) > 1 {
        let before = oracle.ledger().total();
        let residual = t.count_ones(..);
        let (x, central_maximal, g) = candidates(&p, &t)?;
        let candidate_weight: usize = g.iter().map(|&y| weight_in(&p, &t, y)).sum();
        if 2 * candidate_weight < residual {
            return Err(Error::ConditionViolation(format!(
                "candidates weigh {candidate_weight} in a residual set of {residual}"
            )));
        }
        let run = exact_grover(
            &mut CandidatePredicate {
                oracle: &mut *oracle,
                items: &g,
            },
            rng,
        )?;
        let hit = run.found.map(|i| g[i]);
        shrink(&p, &mut t, &g, hit);
        trace.iterations.push(IterationRecord {
            residual,
            central: x,
            central_maximal,
            candidates: g,
            candidate_weight,
            hit,
            queries: oracle.ledger().total() - before,
        });
    }
    trace.found = final_check(oracle, &t)?;
    trace.queries = oracle.ledger().total() - start;
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiMode {
    /// Charged classical sampling with a verification query per sample.
    ClassicalRepetition,
    /// Uncharged sampling; the ledger receives the amplified quantum charge
    /// plus one verification per round.
    QuantumCost,
}

/// Samples drawn per round in repetition mode.
pub fn repetition_samples(group: usize, n: usize) -> u64 {
    let log_n = (n.max(2) as f64).log2();
    (group as f64 * (3.0 * log_n).ln()).ceil() as u64
}

/// Quantum charge per round in cost mode.
pub fn amplified_charge(group: usize, n: usize) -> u64 {
    let log_log = (n.max(2) as f64).log2().log2().max(1.0);
    (group as f64 * log_log).sqrt().ceil() as u64
}

/// Forest search with any number of marked elements, replacing exact
/// Grover search by repeated uniform sampling from the candidate set.
pub fn forest_search_multi<O: AbstractOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    mode: MultiMode,
    rng: &mut R,
) -> Result<ForestSearchTrace> {
    let p = oracle.poset().clone();
    check_forest(&p)?;
    let n = p.len();
    let start = oracle.ledger().total();
    let mut trace = ForestSearchTrace::default();
    let mut t = p.full_set();
    while t.count_ones(..) > 1 {
        let before = oracle.ledger().total();
        let residual = t.count_ones(..);
        let (x, central_maximal, g) = candidates(&p, &t)?;
        let candidate_weight: usize = g.iter().map(|&y| weight_in(&p, &t, y)).sum();
        let samples = repetition_samples(g.len(), n);
        let mut hit = None;
        match mode {
            MultiMode::ClassicalRepetition => {
                for _ in 0..samples {
                    let y = g[rng.gen_range(0..g.len())];
                    if oracle.query("sample", y, Probe::AtOrBelow)? {
                        hit = Some(y);
                        break;
                    }
                }
            }
            MultiMode::QuantumCost => {
                oracle.charge_quantum("amplify", amplified_charge(g.len(), n))?;
                let mut last = g[0];
                for _ in 0..samples {
                    last = g[rng.gen_range(0..g.len())];
                    if oracle.coherent(last, Probe::AtOrBelow) {
                        break;
                    }
                }
                if oracle.query("verify", last, Probe::AtOrBelow)? {
                    hit = Some(last);
                }
            }
        }
        shrink(&p, &mut t, &g, hit);
        trace.iterations.push(IterationRecord {
            residual,
            central: x,
            central_maximal,
            candidates: g,
            candidate_weight,
            hit,
            queries: oracle.ledger().total() - before,
        });
    }
    trace.found = final_check(oracle, &t)?;
    trace.queries = oracle.ledger().total() - start;
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerOutcome {
    pub element: Element,
    pub queries: u64,
    pub version_sizes: Vec<usize>,
}

/// Elements of `v` answering yes to `(x, z)`.
fn yes_side(p: &Poset, v: &ElementSet, x: Element, z: Probe) -> usize {
    match z {
        Probe::AtOrBelow => p.down_set(x).intersection(v).count(),
        Probe::Equal => usize::from(v.contains(x)),
    }
}

/// Identifies the single marked element of an arbitrary poset by always
/// asking the query with the largest guaranteed elimination from the
/// version space, then confirms it.
pub fn halving_learner<O: AbstractOracle + ?Sized>(oracle: &mut O) -> Result<LearnerOutcome> {
    let p = oracle.poset().clone();
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let start = oracle.ledger().total();
    let mut v = p.full_set();
    let mut version_sizes = vec![p.len()];
    loop {
        let size = v.count_ones(..);
        if size == 0 {
            return Err(Error::InconsistentOracle);
        }
        if size == 1 {
            break;
        }
        let mut best: Option<(usize, Element, Probe)> = None;
        for x in 0..p.len() {
            for z in [Probe::AtOrBelow, Probe::Equal] {
                let yes = yes_side(&p, &v, x, z);
                let guaranteed = yes.min(size - yes);
                if best.is_none_or(|(g, _, _)| guaranteed > g) {
                    best = Some((guaranteed, x, z));
                }
            }
        }
        let (_, x, z) = best.expect("poset is non-empty");
        let answer = oracle.query("learn", x, z)?;
        let keep = match z {
            Probe::AtOrBelow => p.down_set(x).clone(),
            Probe::Equal => {
                let mut s = p.empty_set();
                s.insert(x);
                s
            }
        };
        if answer {
            v.intersect_with(&keep);
        } else {
            v.difference_with(&keep);
        }
        version_sizes.push(v.count_ones(..));
    }
    let element = v.ones().next().expect("singleton");
    if !oracle.query("confirm", element, Probe::Equal)? {
        return Err(Error::InconsistentOracle);
    }
    Ok(LearnerOutcome {
        element,
        queries: oracle.ledger().total() - start,
        version_sizes,
    })
}
