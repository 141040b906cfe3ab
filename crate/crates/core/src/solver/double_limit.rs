//! Scores in the extremal double limit game with two nuts, and the implied
//! bracket relating the discrete game to the limit game.
//!
//! The hider plays depths `(y, 1 - y)`. After a find at depth `y` the
//! searcher spends the rest of the budget reaching depth `1 - y` over as wide
//! a stretch as possible.

use num_traits::ToPrimitive;

use crate::caching::model::GameParams;
use crate::error::{domain, Result};
use crate::exactnum::{int, rat, Rational};

/// Score of `f_t(x) = 1 for x < t`: the first nut found is the nearer one,
/// then fresh ground is dug to the other depth.
pub fn score_full_depth(y: f64) -> f64 {
    1.0 / (2.0 * (1.0 - y)) + 1.0 / (2.0 * y)
}

/// Score of `f'_t(x) = 1/2 for x < 2t`: only the shallower nut can be found
/// first; the old half-depth region is deepened before fresh ground is dug.
pub fn score_half_depth(y: f64) -> f64 {
    let s = y.min(1.0 - y);
    (1.5 - s) / ((1.0 - s) * (1.0 - s))
}

/// Expected score of playing `f` with probability `w` and `f'` otherwise
/// against the extremal pair `(y, 1 - y)`.
pub fn double_limit_extremal_score(w: f64, y: f64) -> f64 {
    w * score_full_depth(y) + (1.0 - w) * score_half_depth(y)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// `(argmin y, min score)` over `y` in `(0, 1)`; the scores are symmetric
/// under `y -> 1 - y`, so only `(0, 1/2]` is scanned.
pub fn min_over_depth(w: f64) -> (f64, f64) {
    const GRID: usize = 4000;
    let f = |y: f64| double_limit_extremal_score(w, y);
    let (mut by, mut bv) = (0.5, f(0.5));
    for i in 1..GRID {
        let y = 0.5 * i as f64 / GRID as f64;
        let v = f(y);
        if v < bv {
            by = y;
            bv = v;
        }
    }
    let step = 0.5 / GRID as f64;
    let (y, v) = golden_min(f, (by - step).max(1e-12), (by + step).min(0.5), 80);
    if v < bv {
        (y, v)
    } else {
        (by, bv)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixtureOptimum {
    pub weight: f64,
    pub worst_depth: f64,
    pub score: f64,
}

/// Mixture weight maximizing the worst-case score, by golden-section search.
pub fn optimize_mixture() -> MixtureOptimum {
    let (w, neg) = golden_min(|w| -min_over_depth(w).1, 0.0, 1.0, 100);
    let (worst_depth, score) = min_over_depth(w);
    debug_assert!((score + neg).abs() < 1e-9);
    MixtureOptimum { weight: w, worst_depth, score }
}

/// Maximum of `s(2 - s/2)` over `s` in `[0, 4]`, as `(argmax, max)`.
pub fn cap_maximum() -> (Rational, Rational) {
    let f = |s: &Rational| s * (int(2) - s / int(2));
    // vertex of the downward parabola
    let s = int(2);
    let v = f(&s);
    debug_assert!(f(&int(0)) <= v && f(&int(4)) <= v && f(&rat(3, 2)) < v);
    (s, v)
}

/// `(limit_value * ((h - j) / h)^j, limit_value)`.
pub fn limitthm_bracket(params: &GameParams, limit_value: f64) -> Result<(f64, f64)> {
    let j = Rational::from_integer(params.j.into());
    if params.h <= j {
        return domain(format!("need h > j, got h = {}, j = {}", params.h, params.j));
    }
    let factor = ((&params.h - &j) / &params.h).pow(params.j as i32);
    Ok((limit_value * factor.to_f64().expect("finite"), limit_value))
}
