use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth factor of the iteration-count guess between rounds of the
/// unknown-count search.
pub const BBHT_GROWTH: f64 = 6.0 / 5.0;
/// Total work budget of the unknown-count search, in units of `sqrt(N)`.
pub const BBHT_CUTOFF: f64 = 13.5;

/// A predicate over the items `0..len()` that a quantum search evaluates in
/// superposition.
pub trait SearchPredicate {
    fn len(&self) -> usize;
    /// Predicate value as seen inside the simulated superposition. Never
    /// charged.
    fn coherent(&self, item: usize) -> bool;
    /// Charges `iterations` applications of the predicate in superposition.
    fn charge_iterations(&mut self, iterations: u64) -> Result<()>;
    /// Classical evaluation on a measured candidate.
    fn verify(&mut self, item: usize) -> Result<bool>;
}

fn check_counts(n: u64, m: u64) -> Result<()> {
    if n == 0 || m > n {
        return Err(Error::Parameter(format!(
            "need 0 <= m <= N and N >= 1, got N={n}, m={m}"
        )));
    }
    Ok(())
}

/// `sin^2((2t + 1) asin(sqrt(m / N)))`
pub fn grover_success_prob(n: u64, m: u64, t: u64) -> Result<f64> {
    check_counts(n, m)?;
    let theta = (m as f64 / n as f64).sqrt().asin();
    Ok(((2 * t + 1) as f64 * theta).sin().powi(2))
}

/// Iteration plan of exact search over `N` items with one marked item. All
/// but the last iteration are standard; the last one uses phases chosen so
/// that the marked amplitude reaches modulus one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverPlan {
    pub set_size: u64,
    pub iterations: u64,
    pub theta: f64,
    /// `(oracle phase, diffusion phase)` of the final iteration, if adjusted.
    pub final_phases: Option<(f64, f64)>,
}

impl GroverPlan {
    pub fn exact(n: u64) -> Result<Self> {
        check_counts(n, 1)?;
        let theta = (1.0 / n as f64).sqrt().asin();
        if n == 1 {
            return Ok(Self {
                set_size: 1,
                iterations: 0,
                theta,
                final_phases: None,
            });
        }
        let t = (PI / (4.0 * theta) - 0.5 - 1e-9).ceil().max(1.0) as u64;
        let reached = ((2 * t + 1) as f64 * theta).sin().powi(2);
        let final_phases = if (1.0 - reached).abs() < 1e-13 {
            None
        } else {
            Some(final_phases(theta, (2 * t - 1) as f64 * theta)?)
        };
        Ok(Self {
            set_size: n,
            iterations: t,
            theta,
            final_phases,
        })
    }

    /// Probability of measuring a marked item when `m` of the `N` items are
    /// marked and this plan is executed.
    pub fn marked_probability(&self, m: u64) -> Result<f64> {
        check_counts(self.set_size, m)?;
        if m == 0 {
            return Ok(0.0);
        }
        let theta = (m as f64 / self.set_size as f64).sqrt().asin();
        let mut state = [Complex64::new(theta.sin(), 0.0), Complex64::new(theta.cos(), 0.0)];
        let standard = match self.final_phases {
            Some(_) => self.iterations.saturating_sub(1),
            None => self.iterations,
        };
        for _ in 0..standard {
            state = iterate(state, theta, PI, PI);
        }
        if let Some((oracle, diffusion)) = self.final_phases {
            state = iterate(state, theta, oracle, diffusion);
        }
        Ok(state[0].norm_sqr().min(1.0))
    }
}

/// One generalized iteration `-(I - (1 - e^{i phi}) |psi><psi|) S(varphi)`
/// acting on the (marked, unmarked) amplitude pair.
fn iterate(state: [Complex64; 2], theta: f64, oracle: f64, diffusion: f64) -> [Complex64; 2] {
    let psi = [theta.sin(), theta.cos()];
    let marked = state[0] * Complex64::from_polar(1.0, oracle);
    let overlap = marked * psi[0] + state[1] * psi[1];
    let u = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, diffusion);
    [-(marked - u * overlap * psi[0]), -(state[1] - u * overlap * psi[1])]
}

/// Phases for a last iteration that takes the state at marked angle `alpha`
/// fully onto the marked item. The unmarked amplitude vanishes when
/// `u = cos(alpha) / (cos(theta) c)` with `c = <psi|S(varphi)|state>`, and
/// `u = 1 - e^{i phi}` needs `|1 - u| = 1`; the oracle phase is found by
/// bisection on that constraint.
fn final_phases(theta: f64, alpha: f64) -> Result<(f64, f64)> {
    let u_of = |varphi: f64| {
        let c = Complex64::from_polar(theta.sin() * alpha.sin(), varphi)
            + theta.cos() * alpha.cos();
        Complex64::new(alpha.cos() / theta.cos(), 0.0) / c
    };
    let g = |varphi: f64| (Complex64::new(1.0, 0.0) - u_of(varphi)).norm() - 1.0;

    const SCAN: usize = 256;
    let mut bracket = None;
    let mut prev = (0.0, g(0.0));
    for i in 1..=SCAN {
        let x = PI * i as f64 / SCAN as f64;
        let gx = g(x);
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0));
            break;
        }
        if prev.1.signum() != gx.signum() {
            bracket = Some((prev.0, x));
            break;
        }
        prev = (x, gx);
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Parameter(format!("no phase-matched final iteration for theta={theta}"))
    })?;
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let varphi = 0.5 * (lo + hi);
    let e = Complex64::new(1.0, 0.0) - u_of(varphi);
    Ok((varphi, e.arg()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverRun {
    pub found: Option<usize>,
    pub iterations: u64,
    /// Probability that the measured candidate was marked.
    pub success_probability: f64,
}

fn measure<R: Rng + ?Sized>(
    marked: &[usize],
    n: usize,
    p_marked: f64,
    rng: &mut R,
) -> usize {
    if !marked.is_empty() && (marked.len() == n || rng.gen::<f64>() < p_marked) {
        return marked[rng.gen_range(0..marked.len())];
    }
    // Uniform over the unmarked items.
    let unmarked = n - marked.len();
    let mut k = rng.gen_range(0..unmarked);
    for i in 0..n {
        if marked.binary_search(&i).is_err() {
            if k == 0 {
                return i;
            }
            k -= 1;
        }
    }
    unreachable!("an unmarked item exists")
}

/// Exact search under the promise that at most one item is marked, followed
/// by a classical verification of the measured candidate.
pub fn exact_grover<P: SearchPredicate + ?Sized, R: Rng + ?Sized>(
    pred: &mut P,
    rng: &mut R,
) -> Result<GroverRun> {
    let n = pred.len();
    if n == 0 {
        return Ok(GroverRun {
            found: None,
            iterations: 0,
            success_probability: 0.0,
        });
    }
    let marked: Vec<usize> = (0..n).filter(|&i| pred.coherent(i)).collect();
    let plan = GroverPlan::exact(n as u64)?;
    pred.charge_iterations(plan.iterations)?;
    let p = plan.marked_probability(marked.len() as u64)?;
    let candidate = measure(&marked, n, p, rng);
    if pred.verify(candidate)? {
        return Ok(GroverRun {
            found: Some(candidate),
            iterations: plan.iterations,
            success_probability: p,
        });
    }
    if marked.len() >= 2 {
        return Err(Error::PromiseViolation(format!(
            "exact search over {n} items found {} marked items",
            marked.len()
        )));
    }
    Ok(GroverRun {
        found: None,
        iterations: plan.iterations,
        success_probability: p,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbhtRun {
    pub found: Option<usize>,
    pub rounds: u64,
    pub iterations: u64,
}

/// Search with an unknown number of marked items: each round applies a
/// uniformly random number of iterations below a growing guess, then
/// measures and verifies. Stops once the work exceeds `BBHT_CUTOFF * sqrt(N)`.
pub fn bbht_search<P: SearchPredicate + ?Sized, R: Rng + ?Sized>(
    pred: &mut P,
    rng: &mut R,
) -> Result<BbhtRun> {
    let n = pred.len();
    let mut run = BbhtRun {
        found: None,
        rounds: 0,
        iterations: 0,
    };
    if n == 0 {
        return Ok(run);
    }
    let marked: Vec<usize> = (0..n).filter(|&i| pred.coherent(i)).collect();
    let theta = (marked.len() as f64 / n as f64).sqrt().asin();
    let cutoff = (BBHT_CUTOFF * (n as f64).sqrt()).ceil() as u64;
    let cap = (n as f64).sqrt();
    let mut guess = 1.0f64;
    let mut work = 0u64;
    while work < cutoff {
        let j = rng.gen_range(0..guess.ceil() as u64);
        pred.charge_iterations(j)?;
        run.iterations += j;
        run.rounds += 1;
        work += j + 1;
        let p = ((2 * j + 1) as f64 * theta).sin().powi(2);
        let candidate = measure(&marked, n, p, rng);
        if pred.verify(candidate)? {
            run.found = Some(candidate);
            return Ok(run);
        }
        guess = (guess * BBHT_GROWTH).min(cap.max(1.0));
    }
    Ok(run)
}
