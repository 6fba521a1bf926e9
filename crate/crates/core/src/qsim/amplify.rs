use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_probability(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("base success {eps} outside (0, 1]")));
    }
    Ok(())
}

/// Success probability after `m` rounds of amplitude amplification of an
/// algorithm that succeeds with probability `eps`, i.e. `2m + 1` executions.
pub fn amplify_exact(eps: f64, m: u64) -> Result<f64> {
    check_probability(eps)?;
    let t = (2 * m + 1) as f64;
    Ok((t * eps.sqrt().asin()).sin().powi(2))
}

/// The lower bound `(1 - t^2 eps / 3) t^2 eps` with `t = 2m + 1`.
pub fn amplify_bound(eps: f64, m: u64) -> Result<f64> {
    check_probability(eps)?;
    let t2e = ((2 * m + 1) as f64).powi(2) * eps;
    Ok((1.0 - t2e / 3.0) * t2e)
}

/// Largest `m` with `m <= pi / asin(sqrt(eps)) - 1/2`.
pub fn max_bound_rounds(eps: f64) -> Result<u64> {
    check_probability(eps)?;
    Ok((PI / eps.sqrt().asin() - 0.5).floor().max(0.0) as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifySchedule {
    pub base_success: f64,
    pub rounds: u64,
    pub executions: u64,
    pub bound_value: f64,
    pub exact_value: f64,
}

impl AmplifySchedule {
    pub fn new(eps: f64, rounds: u64) -> Result<Self> {
        Ok(Self {
            base_success: eps,
            rounds,
            executions: 2 * rounds + 1,
            bound_value: amplify_bound(eps, rounds)?,
            exact_value: amplify_exact(eps, rounds)?,
        })
    }

    pub fn within_bound_range(&self) -> bool {
        max_bound_rounds(self.base_success).is_ok_and(|m| self.rounds <= m)
    }

    /// The bound holds, or is vacuous because it is negative.
    pub fn bound_holds(&self) -> bool {
        self.bound_value < 0.0 || self.exact_value >= self.bound_value - 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_epsilon_example() {
        let s = AmplifySchedule::new(0.01, 1).unwrap();
        assert!((s.bound_value - 0.0873).abs() < 1e-12);
        assert!((s.exact_value - 0.087_616).abs() < 1e-5);
        assert!(s.bound_holds());
    }

    #[test]
    fn no_rounds() {
        for eps in [0.001, 0.2, 0.9] {
            assert!((amplify_exact(eps, 0).unwrap() - eps).abs() < 1e-12);
            assert!(amplify_bound(eps, 0).unwrap() <= eps);
        }
        assert!((amplify_exact(1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(amplify_exact(0.0, 1).is_err());
        assert!(amplify_bound(1.5, 1).is_err());
    }

    #[test]
    fn bound_range() {
        assert_eq!(max_bound_rounds(1.0).unwrap(), 1);
        assert_eq!(max_bound_rounds(0.25).unwrap(), 5);
    }
}
