//! Common values of two ascending lists, found as zero entries of the
//! notional array `T(x, y) = L[x] - M[m - 1 - y]`, which is sorted along
//! rows and columns and never materialized.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::array::{ArrayOracle, ArrayView, CellVerifier, GridDivider, Rect};
use crate::concrete_search::grid_params;
use crate::error::{Error, Result};
use crate::oracle::QueryLedger;
use crate::qsim::{recursive_amplified_run, OuterWrap, RunOptions};

pub fn check_sorted(list: &[i64]) -> Result<()> {
    match list.windows(2).position(|w| w[0] > w[1]) {
        Some(i) => Err(Error::UnsortedInput(i + 1)),
        None => Ok(()),
    }
}

/// Whitespace-separated ascending integers.
pub fn parse_list(text: &str) -> Result<Vec<i64>> {
    let list = text
        .split_whitespace()
        .map(|t| {
            t.parse::<i64>().map_err(|e| Error::Parse {
                line: 0,
                message: format!("{t}: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_sorted(&list)?;
    Ok(list)
}

/// Two-pointer merge; the smallest common value.
pub fn merge_intersect_baseline(l: &[i64], m: &[i64]) -> Result<Option<i64>> {
    check_sorted(l)?;
    check_sorted(m)?;
    let (mut i, mut j) = (0, 0);
    while i < l.len() && j < m.len() {
        match l[i].cmp(&m[j]) {
            std::cmp::Ordering::Equal => return Ok(Some(l[i])),
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug)]
pub struct NotionalArray<'a> {
    pub l: &'a [i64],
    pub m: &'a [i64],
}

impl ArrayView for NotionalArray<'_> {
    fn rows(&self) -> usize {
        self.l.len()
    }

    fn cols(&self) -> usize {
        self.m.len()
    }

    fn value(&self, x: usize, y: usize) -> i64 {
        self.l[x] - self.m[self.m.len() - 1 - y]
    }
}

impl NotionalArray<'_> {
    /// Maximal zero rectangles, each as a rectangle of the array.
    pub fn zero_blocks(&self) -> Vec<Rect> {
        let mut blocks = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (l, m) = (self.l, self.m);
        let mut mrev: Vec<i64> = m.to_vec();
        mrev.reverse();
        // Runs of equal values in L and in M pair up into blocks.
        while i < l.len() && j < m.len() {
            match l[i].cmp(&m[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let v = l[i];
                    let i1 = i + l[i..].iter().take_while(|&&x| x == v).count();
                    let j1 = j + m[j..].iter().take_while(|&&x| x == v).count();
                    let mlen = m.len();
                    blocks.push(Rect::new(i, i1, mlen - j1, mlen - j));
                    i = i1;
                    j = j1;
                }
            }
        }
        blocks
    }
}

/// Charged access to the notional array: every entry read costs one query
/// to each list.
pub struct ListSession<'a> {
    array: NotionalArray<'a>,
    ledger: QueryLedger,
    pub queries_l: u64,
    pub queries_m: u64,
}

impl<'a> ListSession<'a> {
    pub fn new(array: NotionalArray<'a>) -> Self {
        Self {
            array,
            ledger: QueryLedger::new(),
            queries_l: 0,
            queries_m: 0,
        }
    }

    fn charge_lists(&mut self, n: u64) {
        self.queries_l += n;
        self.queries_m += n;
    }

    /// Binary search for `v` in one list, one query per probe.
    fn find_in(&mut self, in_l: bool, v: i64) -> Result<Option<usize>> {
        let list = if in_l { self.array.l } else { self.array.m };
        let (mut lo, mut hi) = (0, list.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            self.ledger.charge_classical("confirm", 1)?;
            if in_l {
                self.queries_l += 1;
            } else {
                self.queries_m += 1;
            }
            match list[mid].cmp(&v) {
                std::cmp::Ordering::Equal => return Ok(Some(mid)),
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
            }
        }
        Ok(None)
    }
}

impl ArrayOracle for ListSession<'_> {
    fn rows(&self) -> usize {
        self.array.rows()
    }

    fn cols(&self) -> usize {
        self.array.cols()
    }

    fn query(&mut self, label: &str, i: usize, j: usize) -> Result<i64> {
        self.ledger.charge_classical(label, 2)?;
        self.charge_lists(1);
        Ok(self.array.value(i, j))
    }

    fn charge_classical(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_classical(label, 2 * n)?;
        self.charge_lists(n);
        Ok(())
    }

    fn charge_quantum(&mut self, label: &str, n: u64) -> Result<()> {
        self.ledger.charge_quantum(label, 2 * n)?;
        self.charge_lists(n);
        Ok(())
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub value: i64,
    #[serde(rename = "index_L")]
    pub index_l: usize,
    #[serde(rename = "index_M")]
    pub index_m: usize,
    #[serde(rename = "queries_L")]
    pub queries_l: u64,
    #[serde(rename = "queries_M")]
    pub queries_m: u64,
    pub round: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectOutcome {
    pub found: Option<Match>,
    pub queries_l: u64,
    pub queries_m: u64,
    pub rounds: u32,
    pub ledger: QueryLedger,
}

/// Searches the notional array for a zero entry and confirms the value by
/// binary search in both full lists. Returns the confirmed match, if any.
fn block_search<R: Rng + ?Sized>(
    sub_l: &[i64],
    sub_m: &[i64],
    strict: bool,
    session: &mut ListSession<'_>,
    rng: &mut R,
) -> Result<Option<(i64, usize, usize)>> {
    if sub_l.is_empty() || sub_m.is_empty() {
        return Ok(None);
    }
    let view = NotionalArray { l: sub_l, m: sub_m };
    let divider = GridDivider::new(&view, 0);
    let mut sub_session = ListSession::new(view);
    let options = RunOptions {
        outer: OuterWrap::Bbht,
        strict,
        force_success: false,
    };
    let out = {
        let mut verifier = CellVerifier {
            oracle: &mut sub_session,
            target: 0,
        };
        recursive_amplified_run(
            &divider,
            &Rect::full(&view),
            &mut verifier,
            &grid_params(),
            &options,
            rng,
        )
    };
    let out = match out {
        Err(Error::ConditionViolation(msg)) => {
            return Err(Error::PromiseViolation(format!("zero block promise: {msg}")))
        }
        other => other?,
    };
    session.ledger.absorb(sub_session.ledger())?;
    session.queries_l += sub_session.queries_l;
    session.queries_m += sub_session.queries_m;
    let Some((x, _)) = out.found else {
        return Ok(None);
    };
    let value = sub_l[x];
    let (Some(il), Some(im)) = (session.find_in(true, value)?, session.find_in(false, value)?)
    else {
        return Ok(None);
    };
    Ok(Some((value, il, im)))
}

fn outcome(session: ListSession<'_>, found: Option<(i64, usize, usize)>, round: u32) -> IntersectOutcome {
    IntersectOutcome {
        found: found.map(|(value, index_l, index_m)| Match {
            value,
            index_l,
            index_m,
            queries_l: session.queries_l,
            queries_m: session.queries_m,
            round,
        }),
        queries_l: session.queries_l,
        queries_m: session.queries_m,
        rounds: round + 1,
        ledger: session.ledger,
    }
}

/// Quantum 2D search on the notional array under the promise that its
/// zero entries form at most one block.
pub fn single_block_search<R: Rng + ?Sized>(
    l: &[i64],
    m: &[i64],
    rng: &mut R,
) -> Result<IntersectOutcome> {
    check_sorted(l)?;
    check_sorted(m)?;
    let mut session = ListSession::new(NotionalArray { l, m });
    let found = block_search(l, m, true, &mut session, rng)?;
    Ok(outcome(session, found, 0))
}

/// One uniformly random element from each consecutive chunk of `2^k`
/// elements, with its original index. A short final chunk still
/// contributes.
pub fn subsample<R: Rng + ?Sized>(list: &[i64], k: u32, rng: &mut R) -> (Vec<i64>, Vec<usize>) {
    let chunk = 1usize << k;
    let mut values = Vec::with_capacity(list.len().div_ceil(chunk));
    let mut index = Vec::with_capacity(values.capacity());
    for start in (0..list.len()).step_by(chunk) {
        let end = (start + chunk).min(list.len());
        let i = rng.gen_range(start..end);
        values.push(list[i]);
        index.push(i);
    }
    (values, index)
}

/// Round `k` searches the lists thinned to one element per chunk of `2^k`,
/// so that with `z` common values some round likely leaves exactly one.
pub fn multi_block_intersect<R: Rng + ?Sized>(
    l: &[i64],
    m: &[i64],
    rng: &mut R,
) -> Result<IntersectOutcome> {
    check_sorted(l)?;
    check_sorted(m)?;
    let mut session = ListSession::new(NotionalArray { l, m });
    let longest = l.len().max(m.len()).max(1);
    let rounds = (usize::BITS - (longest - 1).leading_zeros()).max(1);
    for k in 0..rounds {
        let found = if k == 0 {
            block_search(l, m, false, &mut session, rng)?
        } else {
            let (sl, _) = subsample(l, k, rng);
            let (sm, _) = subsample(m, k, rng);
            block_search(&sl, &sm, false, &mut session, rng)?
        };
        if found.is_some() {
            return Ok(outcome(session, found, k));
        }
    }
    let mut out = outcome(session, None, rounds - 1);
    out.rounds = rounds;
    Ok(out)
}

/// Ascending lists of lengths `l_len` and `m_len` with distinct entries and
/// exactly `z` common values.
pub fn planted_lists(l_len: usize, m_len: usize, z: usize, seed: u64) -> Result<(Vec<i64>, Vec<i64>)> {
    if z > l_len.min(m_len) {
        return Err(Error::Parameter(format!("{z} common values exceed the list lengths")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = l_len + m_len - z;
    let range = 10 * total.max(1) as i64;
    let mut pool = std::collections::BTreeSet::new();
    while pool.len() < total {
        pool.insert(rng.gen_range(0..range));
    }
    let mut pool: Vec<i64> = pool.into_iter().collect();
    rand::seq::SliceRandom::shuffle(pool.as_mut_slice(), &mut rng);
    let common = &pool[..z];
    let mut l: Vec<i64> = common.iter().chain(&pool[z..l_len]).copied().collect();
    let mut m: Vec<i64> = common.iter().chain(&pool[l_len..]).copied().collect();
    l.sort_unstable();
    m.sort_unstable();
    Ok((l, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_examples() {
        assert_eq!(merge_intersect_baseline(&[1, 2, 3], &[3, 4, 5]).unwrap(), Some(3));
        assert_eq!(merge_intersect_baseline(&[1, 2], &[3, 4]).unwrap(), None);
        assert_eq!(
            merge_intersect_baseline(&[2, 1], &[1]),
            Err(Error::UnsortedInput(1))
        );
    }

    #[test]
    fn notional_entries() {
        let a = NotionalArray {
            l: &[1, 2, 2, 3],
            m: &[2, 5],
        };
        assert_eq!(a.value(0, 0), 1 - 5);
        assert_eq!(a.value(1, 1), 0);
        assert_eq!(a.zero_blocks(), vec![Rect::new(1, 3, 1, 2)]);
    }

    #[test]
    fn single_block_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            if let Some(hit) = single_block_search(&[1, 2, 3], &[3, 4, 5], &mut rng).unwrap().found {
                assert_eq!((hit.value, hit.index_l, hit.index_m), (3, 2, 0));
            }
            if let Some(hit) = single_block_search(&[1, 2, 2, 3], &[2, 5], &mut rng).unwrap().found {
                assert_eq!(hit.value, 2);
            }
            assert!(single_block_search(&[1, 2], &[3, 4], &mut rng).unwrap().found.is_none());
        }
    }

    #[test]
    fn subsampling_keeps_one_per_chunk() {
        let list: Vec<i64> = (0..10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (v, idx) = subsample(&list, 2, &mut rng);
        assert_eq!(v.len(), 3);
        assert!(idx[0] < 4 && (4..8).contains(&idx[1]) && idx[2] >= 8);
    }

    #[test]
    fn planted_instances() {
        let (l, m) = planted_lists(64, 64, 3, 5).unwrap();
        let ls: std::collections::HashSet<_> = l.iter().collect();
        assert_eq!(m.iter().filter(|v| ls.contains(v)).count(), 3);
        let (l, m) = planted_lists(16, 16, 16, 5).unwrap();
        assert_eq!(l, m);
    }

    #[test]
    fn match_json_field_names() {
        let m = Match {
            value: 3,
            index_l: 2,
            index_m: 0,
            queries_l: 5,
            queries_m: 5,
            round: 0,
        };
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"value":3,"index_L":2,"index_M":0,"queries_L":5,"queries_M":5,"round":0}"#
        );
    }
}
