//! Arrays sorted along every axis, their oracles, and the central row/column
//! split used by the 2D searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::QueryLedger;
use crate::qsim::{Divider, Verifier};

/// Read-only, uncharged access to a 2D array.
pub trait ArrayView {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn value(&self, i: usize, j: usize) -> i64;
}

/// Charged access to a 2D array.
pub trait ArrayOracle {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn query(&mut self, label: &str, i: usize, j: usize) -> Result<i64>;
    fn charge_classical(&mut self, label: &str, n: u64) -> Result<()>;
    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()>;
    fn ledger(&self) -> &QueryLedger;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortedArray2D {
    rows: usize,
    cols: usize,
    cells: Vec<i64>,
}

impl SortedArray2D {
    /// A 5x5 array whose search for 11 finishes at the second level.
    pub fn worked_example() -> Self {
        Self::from_rows(&[
            vec![1, 3, 5, 10, 13],
            vec![2, 4, 7, 11, 14],
            vec![6, 8, 9, 15, 21],
            vec![12, 16, 17, 20, 24],
            vec![18, 19, 22, 23, 25],
        ])
        .expect("sorted rows and columns")
    }

    /// Checks that every row and every column is non-decreasing.
    pub fn new(rows: usize, cols: usize, cells: Vec<i64>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::Parameter(format!(
                "{} cells for a {rows}x{cols} array",
                cells.len()
            )));
        }
        let a = Self { rows, cols, cells };
        for i in 0..rows {
            for j in 0..cols {
                let v = a.value(i, j);
                if (j + 1 < cols && v > a.value(i, j + 1)) || (i + 1 < rows && v > a.value(i + 1, j)) {
                    return Err(Error::Parameter(format!("array not sorted at ({i}, {j})")));
                }
            }
        }
        Ok(a)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Parameter("ragged rows".into()));
        }
        Self::new(rows.len(), c, rows.concat())
    }

    /// A random `rows x cols` array of distinct even values.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut base = vec![0i64; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                let up = if i > 0 { base[(i - 1) * cols + j] } else { 0 };
                let left = if j > 0 { base[i * cols + j - 1] } else { 0 };
                base[i * cols + j] = up.max(left) + 1 + rng.gen_range(0..3);
            }
        }
        let area = (rows * cols) as i64;
        let cells = base
            .iter()
            .enumerate()
            .map(|(idx, &b)| 2 * (b * area + idx as i64))
            .collect();
        Self { rows, cols, cells }
    }

    pub fn is_distinct(&self) -> bool {
        let mut v = self.cells.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    /// Row-major CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.cells.chunks(self.cols.max(1)) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Self::from_rows(&parse_csv_rows(text)?)
    }

    /// Every cell holding `a`, by row-wise binary search.
    pub fn positions_of(&self, a: i64) -> Vec<(usize, usize)> {
        positions_of(self, a)
    }
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim().parse::<i64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

impl ArrayView for SortedArray2D {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn value(&self, i: usize, j: usize) -> i64 {
        self.cells[i * self.cols + j]
    }
}

pub fn positions_of<A: ArrayView + ?Sized>(a: &A, target: i64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..a.rows() {
        let (mut lo, mut hi) = (0, a.cols());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if a.value(i, mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let mut j = lo;
        while j < a.cols() && a.value(i, j) == target {
            out.push((i, j));
            j += 1;
        }
    }
    out
}

pub struct ArraySession<'a, A: ArrayView + ?Sized> {
    array: &'a A,
    ledger: QueryLedger,
}

impl<'a, A: ArrayView + ?Sized> ArraySession<'a, A> {
    pub fn new(array: &'a A) -> Self {
        Self {
            array,
            ledger: QueryLedger::new(),
        }
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.ledger = QueryLedger::with_budget(budget);
        self
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }
}

impl<A: ArrayView + ?Sized> ArrayOracle for ArraySession<'_, A> {
    fn rows(&self) -> usize {
        self.array.rows()
    }

    fn cols(&self) -> usize {
        self.array.cols()
    }

    fn query(&mut self, label: &str, i: usize, j: usize) -> Result<i64> {
        if i >= self.array.rows() || j >= self.array.cols() {
            return Err(Error::Parameter(format!("cell ({i}, {j}) out of range")));
        }
        self.ledger.charge_classical(label, 1)?;
        Ok(self.array.value(i, j))
    }

    fn charge_classical(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_classical(label, n)
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_quantum(label, n)
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// Rows `r0..r1` and columns `c0..c1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub r0: usize,
    pub r1: usize,
    pub c0: usize,
    pub c1: usize,
}

impl Rect {
    pub fn new(r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self { r0, r1, c0, c1 }
    }

    pub fn full<A: ArrayView + ?Sized>(a: &A) -> Self {
        Self::new(0, a.rows(), 0, a.cols())
    }

    pub fn cell(i: usize, j: usize) -> Self {
        Self::new(i, i + 1, j, j + 1)
    }

    pub fn height(&self) -> usize {
        self.r1.saturating_sub(self.r0)
    }

    pub fn width(&self) -> usize {
        self.c1.saturating_sub(self.c0)
    }

    pub fn area(&self) -> usize {
        self.height() * self.width()
    }

    pub fn max_dim(&self) -> usize {
        self.height().max(self.width())
    }

    pub fn contains(&self, (i, j): (usize, usize)) -> bool {
        self.r0 <= i && i < self.r1 && self.c0 <= j && j < self.c1
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.r0.max(other.r0) < self.r1.min(other.r1) && self.c0.max(other.c0) < self.c1.min(other.c1)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.r0..self.r1).flat_map(move |i| (self.c0..self.c1).map(move |j| (i, j)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Line {
    Row(usize),
    Column(usize),
}

/// One step of the central row/column split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitStep {
    pub rect: Rect,
    pub line: Line,
    /// Largest value below the target and smallest above it on the line,
    /// when they exist.
    pub below: Option<i64>,
    pub above: Option<i64>,
    pub hit: Option<(usize, usize)>,
    pub children: Vec<Rect>,
    pub queries: u64,
}

/// `ceil(log2(len + 1))`, the worst-case cost of a binary search over
/// `len` cells.
pub fn binary_search_cost(len: usize) -> u64 {
    (usize::BITS - len.leading_zeros()) as u64
}

/// Splits `rect` around the target `a`. With at least as many columns as
/// rows, the column at position `ceil(c/2)` is searched for its last cell
/// `<= a`; otherwise the row at position `ceil(r/2)` is searched for its
/// first cell `>= a`. Without a hit, the cells above-left and below-right
/// of the straddle are discarded. A hit yields the hit cell and the region
/// below and to its left.
pub fn split_rect<F>(rect: Rect, a: i64, mut read: F) -> Result<SplitStep>
where
    F: FnMut(usize, usize) -> Result<i64>,
{
    let (r, c) = (rect.height(), rect.width());
    let mut queries = 0u64;
    let mut children = Vec::new();
    let mut hit = None;
    let (line, below, above);
    if r <= c {
        let jc = rect.c0 + c.div_ceil(2) - 1;
        let (mut lo, mut hi) = (rect.r0, rect.r1);
        let (mut le, mut gt) = (None, None);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let v = read(mid, jc)?;
            queries += 1;
            if v <= a {
                le = Some(v);
                lo = mid + 1;
            } else {
                gt = Some(v);
                hi = mid;
            }
        }
        let s = lo;
        line = Line::Column(jc);
        if le == Some(a) {
            hit = Some((s - 1, jc));
            children.push(Rect::cell(s - 1, jc));
            below = None;
        } else {
            below = le;
            children.push(Rect::new(rect.r0, s, jc + 1, rect.c1));
        }
        above = gt;
        children.push(Rect::new(s, rect.r1, rect.c0, jc));
    } else {
        let ic = rect.r0 + r.div_ceil(2) - 1;
        let (mut lo, mut hi) = (rect.c0, rect.c1);
        let (mut lt, mut ge) = (None, None);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let v = read(ic, mid)?;
            queries += 1;
            if v < a {
                lt = Some(v);
                lo = mid + 1;
            } else {
                ge = Some(v);
                hi = mid;
            }
        }
        let q = lo;
        line = Line::Row(ic);
        below = lt;
        if ge == Some(a) {
            hit = Some((ic, q));
            children.push(Rect::cell(ic, q));
            above = None;
        } else {
            above = ge;
            children.push(Rect::new(rect.r0, ic, q, rect.c1));
        }
        children.push(Rect::new(ic + 1, rect.r1, rect.c0, q));
    }
    children.retain(|ch| ch.area() > 0);
    Ok(SplitStep {
        rect,
        line,
        below,
        above,
        hit,
        children,
        queries,
    })
}

/// The central split as a recursive divider, with area as the size.
pub struct GridDivider<'a, A: ArrayView + ?Sized> {
    array: &'a A,
    target: i64,
    targets: Vec<(usize, usize)>,
}

impl<'a, A: ArrayView + ?Sized> GridDivider<'a, A> {
    pub fn new(array: &'a A, target: i64) -> Self {
        Self {
            array,
            target,
            targets: positions_of(array, target),
        }
    }

    pub fn targets(&self) -> &[(usize, usize)] {
        &self.targets
    }
}

impl<A: ArrayView + ?Sized> Divider for GridDivider<'_, A> {
    type Part = Rect;
    type Found = (usize, usize);

    fn size(&self, part: &Rect) -> usize {
        part.area()
    }

    fn split(&self, part: &Rect) -> Result<(Vec<Rect>, u64)> {
        let step = split_rect(*part, self.target, |i, j| Ok(self.array.value(i, j)))?;
        let len = match step.line {
            Line::Column(_) => part.height(),
            Line::Row(_) => part.width(),
        };
        Ok((step.children, binary_search_cost(len)))
    }

    fn contains_target(&self, part: &Rect) -> bool {
        self.targets.iter().any(|&t| part.contains(t))
    }

    fn base_cost(&self, part: &Rect) -> u64 {
        part.area() as u64
    }

    fn locate(&self, part: &Rect) -> Option<(usize, usize)> {
        part.cells().find(|&(i, j)| self.array.value(i, j) == self.target)
    }

    fn split_cost_bound(&self, size: usize) -> f64 {
        (size.max(1) as f64).log2().ceil() + 1.0
    }
}

/// Verifies measured cells against the target through a charged oracle.
pub struct CellVerifier<'o, O: ArrayOracle + ?Sized> {
    pub oracle: &'o mut O,
    pub target: i64,
}

impl<O: ArrayOracle + ?Sized> Verifier<(usize, usize)> for CellVerifier<'_, O> {
    fn verify(&mut self, candidate: Option<&(usize, usize)>) -> Result<bool> {
        match candidate {
            Some(&(i, j)) => Ok(self.oracle.query("verify", i, j)? == self.target),
            None => {
                self.oracle.charge_classical("verify", 1)?;
                Ok(false)
            }
        }
    }

    fn charge_quantum(&mut self, units: u64) -> Result<()> {
        self.oracle.charge_quantum("amplify", units)
    }
}

/// A `d`-dimensional `m x .. x m` array in row-major order, sorted along
/// every axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortedArrayD {
    pub d: usize,
    pub m: usize,
    pub cells: Vec<i64>,
}

impl SortedArrayD {
    pub fn new(d: usize, m: usize, cells: Vec<i64>) -> Result<Self> {
        let n = checked_cells(d, m, usize::MAX)?;
        if cells.len() != n {
            return Err(Error::Parameter(format!("{} cells for {n}", cells.len())));
        }
        let a = Self { d, m, cells };
        let mut stride = 1;
        for _ in 0..d {
            for idx in 0..n {
                if (idx / stride) % m + 1 < m && a.cells[idx] > a.cells[idx + stride] {
                    return Err(Error::Parameter(format!("array not sorted at index {idx}")));
                }
            }
            stride *= m;
        }
        Ok(a)
    }

    /// Random distinct even values, sorted along every coordinate.
    pub fn random(d: usize, m: usize, seed: u64, cell_budget: usize) -> Result<Self> {
        let n = checked_cells(d, m, cell_budget)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut base = vec![0i64; n];
        for idx in 0..n {
            let mut stride = 1;
            let mut below = 0;
            for _ in 0..d {
                if (idx / stride) % m > 0 {
                    below = below.max(base[idx - stride]);
                }
                stride *= m;
            }
            base[idx] = below + 1 + rng.gen_range(0..3);
        }
        let cells = base
            .iter()
            .enumerate()
            .map(|(idx, &b)| 2 * (b * n as i64 + idx as i64))
            .collect();
        Ok(Self { d, m, cells })
    }

    /// Rows of `m` values along the last coordinate.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.cells.chunks(self.m.max(1)) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads rows of `m` values; `d` follows from the number of rows.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = parse_csv_rows(text)?;
        let (rows, m) = (table.len(), table.first().map_or(0, Vec::len));
        if table.iter().any(|r| r.len() != m) {
            return Err(Error::Parameter("rows of unequal length".into()));
        }
        let mut d = 1;
        let mut count = 1usize;
        while count < rows {
            count = count.saturating_mul(m.max(2));
            d += 1;
        }
        if count != rows || (m < 2 && rows > 1) {
            return Err(Error::Parameter(format!(
                "{rows} rows of {m} values do not form a cube"
            )));
        }
        Self::new(d, m, table.concat())
    }

    /// The `s`-th `m x m` slice spanned by the last two coordinates.
    pub fn slice(&self, s: usize) -> Slice2D<'_> {
        Slice2D {
            array: self,
            offset: s * self.m * self.m,
        }
    }

    pub fn slice_count(&self) -> usize {
        if self.d < 2 {
            0
        } else {
            self.m.pow(self.d as u32 - 2)
        }
    }
}

/// Number of cells `m^d`, refused above `budget`.
pub fn checked_cells(d: usize, m: usize, budget: usize) -> Result<usize> {
    let n = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(m));
    match n {
        Some(n) if n <= budget => Ok(n),
        _ => Err(Error::Size {
            what: "array cells",
            size: n.unwrap_or(usize::MAX),
            limit: budget,
        }),
    }
}

pub struct Slice2D<'a> {
    array: &'a SortedArrayD,
    offset: usize,
}

impl ArrayView for Slice2D<'_> {
    fn rows(&self) -> usize {
        self.array.m
    }

    fn cols(&self) -> usize {
        self.array.m
    }

    fn value(&self, i: usize, j: usize) -> i64 {
        self.array.cells[self.offset + i * self.array.m + j]
    }
}
