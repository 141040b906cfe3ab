//! Monte Carlo estimates for the continuous limit game.
//!
//! Trials are split into fixed blocks, each driven by its own generator
//! seeded from `(seed, block index)`, so the totals do not depend on how
//! blocks are spread across threads.

use rand::{Rng, SeedableRng};
use rand_distr::Exp1;
use rand_xorshift::XorShiftRng;
use rayon::prelude::*;

use crate::error::{domain, Result};

const BLOCK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub k: usize,
    pub j: usize,
    pub lambda: f64,
    pub trials: u64,
    pub wins: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl SimResult {
    fn new(k: usize, j: usize, lambda: f64, trials: u64, wins: u64, seed: u64) -> Self {
        let estimate = wins as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        SimResult { k, j, lambda, trials, wins, estimate, std_error, seed }
    }

    /// `(estimate - target) / std_error`; infinite when the error is zero
    /// and the estimate misses.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.estimate - target;
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(d)
        }
    }

    /// `k=… j=… lambda=… trials=… seed=… wins=… estimate=… std_error=…`
    pub fn record(&self) -> String {
        format!(
            "k={} j={} lambda={} trials={} seed={} wins={} estimate={:.8} std_error={:.8}",
            self.k, self.j, self.lambda, self.trials, self.seed, self.wins, self.estimate, self.std_error
        )
    }
}

/// SplitMix64 finalizer applied to the block index mixed into the seed.
fn block_seed(seed: u64, block: u64) -> u64 {
    let mut z = seed ^ block.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One game of the interval searcher against the uniform-simplex hider.
fn trial(rng: &mut XorShiftRng, k: usize, j: usize, lambda: f64, nuts: &mut Vec<(f64, f64)>) -> bool {
    nuts.clear();
    let mut total = 0.0;
    let mut draws = [0.0f64; 16];
    for d in draws.iter_mut().take(k + 1) {
        *d = rng.sample(Exp1);
        total += *d;
    }
    for d in draws.iter().take(k) {
        nuts.push((rng.random::<f64>() * lambda, d / total));
    }
    let mut t = 0.0;
    for q in 0..j {
        let lo = q as f64;
        let hit = nuts.iter().filter(|(x, _)| *x >= lo && *x < lo + 1.0).map(|&(_, y)| y).fold(f64::INFINITY, f64::min);
        if t + hit > 1.0 {
            return false;
        }
        t += hit;
    }
    true
}

/// Win rate of the parallel-interval searcher against the uniform-simplex
/// hider in the limit game with `k` nuts, `j` to find and `lambda` holes'
/// worth of width.
pub fn simulate_limit_game(k: usize, j: usize, lambda: f64, trials: u64, seed: u64) -> Result<SimResult> {
    if !(j == k || j + 1 == k) || j == 0 || k > 15 {
        return domain(format!("need j = k or j = k - 1 with 1 <= j and k <= 15, got k = {k}, j = {j}"));
    }
    if !lambda.is_finite() || lambda < k as f64 {
        return domain(format!("need lambda >= k, got {lambda}"));
    }
    if trials == 0 {
        return domain("trials must be positive");
    }
    let blocks = trials.div_ceil(BLOCK);
    let wins: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = XorShiftRng::seed_from_u64(block_seed(seed, b));
            let count = BLOCK.min(trials - b * BLOCK);
            let mut nuts = Vec::with_capacity(k);
            (0..count).filter(|_| trial(&mut rng, k, j, lambda, &mut nuts)).count() as u64
        })
        .sum();
    Ok(SimResult::new(k, j, lambda, trials, wins, seed))
}

/// `k! / lambda^k`.
pub fn limit_value(k: usize, lambda: f64) -> f64 {
    (1..=k).map(|i| i as f64).product::<f64>() / lambda.powi(k as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoubleLimitRun {
    pub runs: Vec<(SimResult, f64)>,
    /// Intercept of the least-squares fit `scaled = a + b / lambda`.
    pub extrapolated: f64,
}

pub const DOUBLE_LIMIT_LAMBDAS: [f64; 3] = [25.0, 50.0, 100.0];

/// Finite-`lambda` estimates scaled by `lambda^j`, and their extrapolation
/// to `lambda = infinity`.
pub fn simulate_double_limit(k: usize, j: usize, trials: u64, seed: u64) -> Result<DoubleLimitRun> {
    let mut runs = Vec::new();
    for (i, &lambda) in DOUBLE_LIMIT_LAMBDAS.iter().enumerate() {
        let r = simulate_limit_game(k, j, lambda, trials, block_seed(seed, i as u64))?;
        let scaled = r.estimate * lambda.powi(j as i32);
        runs.push((r, scaled));
    }
    let pts: Vec<(f64, f64)> = runs.iter().map(|(r, s)| (1.0 / r.lambda, *s)).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(DoubleLimitRun { runs, extrapolated: my - slope * mx })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_thread_independent() {
        let a = simulate_limit_game(2, 2, 4.0, 200_000, 7).unwrap();
        let b = simulate_limit_game(2, 2, 4.0, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| simulate_limit_game(2, 2, 4.0, 200_000, 7).unwrap());
        assert_eq!(a, c);
        assert_ne!(a.wins, simulate_limit_game(2, 2, 4.0, 200_000, 8).unwrap().wins);
    }

    #[test]
    fn matches_the_limit_value() {
        for (k, lambda) in [(2, 4.0), (2, 2.0), (3, 3.0)] {
            let r = simulate_limit_game(k, k, lambda, 300_000, 11).unwrap();
            assert!(r.z_score(limit_value(k, lambda)).abs() <= 5.0, "{}", r.record());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(simulate_limit_game(3, 1, 4.0, 10, 0).is_err());
        assert!(simulate_limit_game(2, 2, 1.5, 10, 0).is_err());
        assert!(simulate_limit_game(2, 2, 4.0, 0, 0).is_err());
    }
}
