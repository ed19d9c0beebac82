//! Sequence generators shared by the `verify` command and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Rank;

/// Every surjective sequence of length `n` onto `0..m`, in lexicographic
/// order.
pub fn surjective(n: usize, m: u32) -> impl Iterator<Item = Vec<Rank>> {
    let total = (m as u64).checked_pow(n as u32).expect("enumeration fits in u64");
    (0..total).filter_map(move |mut code| {
        let mut v = vec![0 as Rank; n];
        for slot in v.iter_mut().rev() {
            *slot = (code % m as u64) as Rank;
            code /= m as u64;
        }
        let mut seen = vec![false; m as usize];
        for &r in &v {
            seen[r as usize] = true;
        }
        seen.iter().all(|&s| s).then_some(v)
    })
}

/// All surjective sequences with `1 <= N <= max_n` and `1 <= M <= min(N, max_m)`.
pub fn exhaustive(max_n: usize, max_m: u32) -> impl Iterator<Item = (Vec<Rank>, u32)> {
    (1..=max_n).flat_map(move |n| {
        (1..=max_m.min(n as u32)).flat_map(move |m| surjective(n, m).map(move |v| (v, m)))
    })
}

/// Deterministic generator for random trials.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform ranks in `0..m`.
pub fn random_levels<R: Rng>(rng: &mut R, n: usize, m: u32) -> Vec<Rank> {
    (0..n).map(|_| rng.random_range(0..m)).collect()
}

/// A length-`n` sequence with `m` ranks and long flats: each run repeats its
/// level a random number of times.
pub fn random_plateaus<R: Rng>(rng: &mut R, n: usize, m: u32) -> Vec<Rank> {
    let mut v = Vec::with_capacity(n);
    while v.len() < n {
        let level = rng.random_range(0..m);
        let run = rng.random_range(1..=4).min(n - v.len());
        v.extend(std::iter::repeat_n(level, run));
    }
    v
}
