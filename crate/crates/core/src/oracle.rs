//! Query-counted access to hidden data. Search algorithms only see the
//! traits in this module; the `coherent` methods are for the amplitude
//! simulator, which needs the predicate values of every basis state and
//! never charges for them.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Element, Poset, Probe};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub classical: u64,
    pub quantum: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.classical + self.quantum
    }
}

/// Classical and quantum query counts, broken down by subroutine label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub classical: u64,
    pub quantum: u64,
    pub breakdown: BTreeMap<String, Counts>,
    #[serde(skip)]
    budget: Option<u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: Option<u64>) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn total(&self) -> u64 {
        self.classical + self.quantum
    }

    pub fn charge_classical(&mut self, label: &str, n: u64) -> Result<()> {
        self.check(n)?;
        self.classical += n;
        self.entry(label).classical += n;
        Ok(())
    }

    pub fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.check(n)?;
        self.quantum += n;
        self.entry(label).quantum += n;
        Ok(())
    }

    /// Adds every count of `other` under the same labels.
    pub fn absorb(&mut self, other: &QueryLedger) -> Result<()> {
        for (label, c) in &other.breakdown {
            self.charge_classical(label, c.classical)?;
            self.charge_quantum(label, c.quantum)?;
        }
        Ok(())
    }

    fn check(&self, n: u64) -> Result<()> {
        match self.budget {
            Some(b) if self.total() + n > b => Err(Error::Budget(b)),
            _ => Ok(()),
        }
    }

    fn entry(&mut self, label: &str) -> &mut Counts {
        if !self.breakdown.contains_key(label) {
            self.breakdown.insert(label.to_owned(), Counts::default());
        }
        self.breakdown.get_mut(label).expect("inserted above")
    }
}

/// The two-parameter oracle `f_A(x, z)` of the abstract model.
pub trait AbstractOracle {
    fn poset(&self) -> &Poset;
    fn query(&mut self, label: &str, x: Element, z: Probe) -> Result<bool>;
    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()>;
    /// Uncharged evaluation, for the amplitude simulator only.
    fn coherent(&self, x: Element, z: Probe) -> bool;
    fn ledger(&self) -> &QueryLedger;
}

/// Stored-integer oracle of the concrete model.
pub trait ConcreteOracle {
    fn poset(&self) -> &Poset;
    fn target(&self) -> i64;
    fn query(&mut self, label: &str, x: Element) -> Result<i64>;
    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()>;
    /// Uncharged read, for the amplitude simulator only.
    fn coherent(&self, x: Element) -> i64;
    fn ledger(&self) -> &QueryLedger;
}

#[derive(Clone, Debug)]
pub struct AbstractSession<'a> {
    poset: &'a Poset,
    marked: Vec<Element>,
    ledger: QueryLedger,
}

impl<'a> AbstractSession<'a> {
    /// A session with marked set `marked`, which may be empty or hold
    /// several elements.
    pub fn new(poset: &'a Poset, marked: &[Element]) -> Result<Self> {
        for &a in marked {
            if a >= poset.len() {
                return Err(Error::Range {
                    element: a,
                    len: poset.len(),
                });
            }
        }
        let mut marked = marked.to_vec();
        marked.sort_unstable();
        marked.dedup();
        Ok(Self {
            poset,
            marked,
            ledger: QueryLedger::new(),
        })
    }

    pub fn single(poset: &'a Poset, marked: Option<Element>) -> Result<Self> {
        Self::new(poset, marked.as_slice())
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.ledger = QueryLedger::with_budget(budget);
        self
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }

    fn eval(&self, x: Element, z: Probe) -> bool {
        match z {
            Probe::AtOrBelow => self.marked.iter().any(|&a| self.poset.leq(a, x)),
            Probe::Equal => self.marked.binary_search(&x).is_ok(),
        }
    }
}

impl AbstractOracle for AbstractSession<'_> {
    fn poset(&self) -> &Poset {
        self.poset
    }

    fn query(&mut self, label: &str, x: Element, z: Probe) -> Result<bool> {
        if x >= self.poset.len() {
            return Err(Error::Range {
                element: x,
                len: self.poset.len(),
            });
        }
        self.ledger.charge_classical(label, 1)?;
        Ok(self.eval(x, z))
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_quantum(label, n)
    }

    fn coherent(&self, x: Element, z: Probe) -> bool {
        self.eval(x, z)
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// Answer of a three-valued abstract query about the marked element `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `a < x`
    Below,
    /// `a = x`
    Equal,
    /// `a` is not at or below `x`
    NotBelow,
}

/// Simulates one three-valued query with at most two binary ones.
pub fn ternary_query<O: AbstractOracle + ?Sized>(
    oracle: &mut O,
    label: &str,
    x: Element,
) -> Result<Relation> {
    if !oracle.query(label, x, Probe::AtOrBelow)? {
        return Ok(Relation::NotBelow);
    }
    Ok(if oracle.query(label, x, Probe::Equal)? {
        Relation::Equal
    } else {
        Relation::Below
    })
}

/// An oracle that natively answers three-valued queries, charging one query
/// each. Binary queries are answered from a single three-valued one.
pub struct TernarySession<'a> {
    inner: AbstractSession<'a>,
    ledger: QueryLedger,
}

impl<'a> TernarySession<'a> {
    pub fn new(inner: AbstractSession<'a>) -> Self {
        let ledger = QueryLedger::with_budget(inner.ledger.budget());
        Self { inner, ledger }
    }

    pub fn query3(&mut self, label: &str, x: Element) -> Result<Relation> {
        self.ledger.charge_classical(label, 1)?;
        let below = self.inner.coherent(x, Probe::AtOrBelow);
        let equal = self.inner.coherent(x, Probe::Equal);
        Ok(match (below, equal) {
            (_, true) => Relation::Equal,
            (true, false) => Relation::Below,
            (false, _) => Relation::NotBelow,
        })
    }
}

impl AbstractOracle for TernarySession<'_> {
    fn poset(&self) -> &Poset {
        self.inner.poset
    }

    fn query(&mut self, label: &str, x: Element, z: Probe) -> Result<bool> {
        let r = self.query3(label, x)?;
        Ok(match z {
            Probe::AtOrBelow => r != Relation::NotBelow,
            Probe::Equal => r == Relation::Equal,
        })
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_quantum(label, n)
    }

    fn coherent(&self, x: Element, z: Probe) -> bool {
        self.inner.coherent(x, z)
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// Forwards to an inner oracle while counting entry-point invocations and
/// units charged, independently of the inner ledger.
pub struct CountingSpy<O> {
    pub inner: O,
    pub calls: u64,
    pub units: u64,
}

impl<O> CountingSpy<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: 0,
            units: 0,
        }
    }
}

impl<O: AbstractOracle> AbstractOracle for CountingSpy<O> {
    fn poset(&self) -> &Poset {
        self.inner.poset()
    }

    fn query(&mut self, label: &str, x: Element, z: Probe) -> Result<bool> {
        self.calls += 1;
        self.units += 1;
        self.inner.query(label, x, z)
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.calls += 1;
        self.units += n;
        self.inner.charge_quantum(label, n)
    }

    fn coherent(&self, x: Element, z: Probe) -> bool {
        self.inner.coherent(x, z)
    }

    fn ledger(&self) -> &QueryLedger {
        self.inner.ledger()
    }
}

impl<O: ConcreteOracle> ConcreteOracle for CountingSpy<O> {
    fn poset(&self) -> &Poset {
        self.inner.poset()
    }

    fn target(&self) -> i64 {
        self.inner.target()
    }

    fn query(&mut self, label: &str, x: Element) -> Result<i64> {
        self.calls += 1;
        self.units += 1;
        self.inner.query(label, x)
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.calls += 1;
        self.units += n;
        self.inner.charge_quantum(label, n)
    }

    fn coherent(&self, x: Element) -> i64 {
        self.inner.coherent(x)
    }

    fn ledger(&self) -> &QueryLedger {
        self.inner.ledger()
    }
}

#[derive(Clone, Debug)]
pub struct ConcreteSession<'a> {
    poset: &'a Poset,
    values: &'a [i64],
    target: i64,
    distinct: bool,
    ledger: QueryLedger,
}

impl<'a> ConcreteSession<'a> {
    /// Checks that `values` is monotone along the order and, when
    /// `distinct` is set, injective.
    pub fn new(poset: &'a Poset, values: &'a [i64], target: i64, distinct: bool) -> Result<Self> {
        if values.len() != poset.len() {
            return Err(Error::Parameter(format!(
                "{} values for {} elements",
                values.len(),
                poset.len()
            )));
        }
        if let Some(&(u, v)) = poset.covers().iter().find(|&&(u, v)| values[u] > values[v]) {
            return Err(Error::Parameter(format!(
                "value of {u} exceeds value of {v} although {u} < {v}"
            )));
        }
        if distinct {
            let mut sorted = values.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter("values are not distinct".into()));
            }
        }
        Ok(Self {
            poset,
            values,
            target,
            distinct,
            ledger: QueryLedger::new(),
        })
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.ledger = QueryLedger::with_budget(budget);
        self
    }

    pub fn distinct(&self) -> bool {
        self.distinct
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }
}

impl ConcreteOracle for ConcreteSession<'_> {
    fn poset(&self) -> &Poset {
        self.poset
    }

    fn target(&self) -> i64 {
        self.target
    }

    fn query(&mut self, label: &str, x: Element) -> Result<i64> {
        let v = *self.values.get(x).ok_or(Error::Range {
            element: x,
            len: self.values.len(),
        })?;
        self.ledger.charge_classical(label, 1)?;
        Ok(v)
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_quantum(label, n)
    }

    fn coherent(&self, x: Element) -> i64 {
        self.values[x]
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// A poset with one stored integer per element. Text form: the poset
/// format, then `values <n>` and `n` lines `<element> <integer>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteInstance {
    pub poset: Poset,
    pub values: Vec<i64>,
}

impl std::fmt::Display for ConcreteInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.poset)?;
        writeln!(f, "values {}", self.values.len())?;
        for (x, v) in self.values.iter().enumerate() {
            writeln!(f, "{x} {v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ConcreteInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |line, message: String| Error::Parse { line, message };
        let (poset, rest) = crate::poset::format::parse_prefix(s)?;
        let mut rest = rest.into_iter();
        let (line_no, header) = rest
            .next()
            .ok_or_else(|| parse_err(0, "missing `values <n>` section".into()))?;
        let count = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["values", n] => n
                .parse::<usize>()
                .map_err(|e| parse_err(line_no, format!("bad value count: {e}")))?,
            _ => return Err(parse_err(line_no, "expected `values <n>`".into())),
        };
        if count != poset.len() {
            return Err(parse_err(
                line_no,
                format!("{count} values for {} elements", poset.len()),
            ));
        }
        let mut values: Vec<Option<i64>> = vec![None; count];
        for (line_no, line) in rest {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [x, v] = fields.as_slice() else {
                return Err(parse_err(line_no, "expected `<element> <integer>`".into()));
            };
            let x: usize = x
                .parse()
                .map_err(|e| parse_err(line_no, format!("bad element: {e}")))?;
            let v: i64 = v
                .parse()
                .map_err(|e| parse_err(line_no, format!("bad value: {e}")))?;
            match values.get_mut(x) {
                Some(slot @ None) => *slot = Some(v),
                Some(Some(_)) => return Err(parse_err(line_no, format!("element {x} repeated"))),
                None => return Err(Error::Range { element: x, len: count }),
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| parse_err(0, format!("no value for element {x}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { poset, values })
    }
}

/// A uniformly random choice at each step of Kahn's algorithm, returned as
/// the values `1..=n` in extension order.
pub fn random_linear_extension(p: &Poset, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.len();
    let mut pending: Vec<usize> = (0..n).map(|v| p.children(v).len()).collect();
    let mut ready: Vec<Element> = (0..n).filter(|&v| pending[v] == 0).collect();
    let mut values = vec![0i64; n];
    let mut next = 1;
    while !ready.is_empty() {
        let i = rand::Rng::gen_range(&mut rng, 0..ready.len());
        let v = ready.swap_remove(i);
        values[v] = next;
        next += 1;
        for &u in p.parents(v) {
            pending[u] -= 1;
            if pending[u] == 0 {
                ready.push(u);
            }
        }
    }
    values
}

/// The ordinal sum `V ⊕ T ⊕ U`: everything in `V` lies below everything in
/// `T`, which lies below everything in `U`.
#[derive(Clone, Debug)]
pub struct LayeredInstance {
    pub poset: Poset,
    pub values: Vec<i64>,
    /// Element ids of the middle layer.
    pub section: Range<Element>,
    /// Values stored in the middle layer.
    pub section_values: Range<i64>,
}

pub fn layered_instance(v: &Poset, t: &Poset, u: &Poset, seed: u64) -> Result<LayeredInstance> {
    let layers = [v, t, u];
    let offsets = [0, v.len(), v.len() + t.len()];
    let n = offsets[2] + u.len();
    let mut covers = Vec::new();
    for (layer, &off) in layers.iter().zip(&offsets) {
        covers.extend(layer.covers().iter().map(|&(a, b)| (a + off, b + off)));
    }
    let nonempty: Vec<usize> = (0..3).filter(|&i| !layers[i].is_empty()).collect();
    for w in nonempty.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let tops: Vec<_> = (0..layers[lo].len())
            .filter(|&x| layers[lo].parents(x).is_empty())
            .collect();
        let bottoms: Vec<_> = (0..layers[hi].len())
            .filter(|&x| layers[hi].children(x).is_empty())
            .collect();
        for &a in &tops {
            for &b in &bottoms {
                covers.push((a + offsets[lo], b + offsets[hi]));
            }
        }
    }
    let poset = Poset::new(n, &covers)?;

    let mut values = Vec::with_capacity(n);
    for (i, layer) in layers.iter().enumerate() {
        let base = offsets[i] as i64;
        let ext = random_linear_extension(layer, seed.wrapping_add(i as u64));
        values.extend(ext.into_iter().map(|x| x + base));
    }
    Ok(LayeredInstance {
        poset,
        values,
        section: offsets[1]..offsets[2],
        section_values: offsets[1] as i64 + 1..offsets[2] as i64 + 1,
    })
}

/// Shuffled copy of `0..n`, used to pick random marked positions.
pub fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    ids
}
