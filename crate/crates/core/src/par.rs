//! Seeded independent trials. With the `parallel` feature the trials run on
//! the rayon pool; results are identical either way because every trial
//! owns its own random stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn map_sequential<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64, &mut ChaCha8Rng) -> T,
{
    (0..trials).map(|i| f(i, &mut trial_rng(seed, i))).collect()
}

#[cfg(feature = "parallel")]
pub fn map_trials<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_trials<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    map_sequential(seed, trials, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn parallel_matches_sequential() {
        let f = |i: u64, r: &mut ChaCha8Rng| i * 1000 + r.gen_range(0..1000);
        assert_eq!(map_trials(9, 257, f), map_sequential(9, 257, f));
    }

    #[test]
    fn streams_differ() {
        let a: u64 = trial_rng(1, 0).gen();
        let b: u64 = trial_rng(1, 1).gen();
        assert_ne!(a, b);
    }
}
