//! The Manickam–Miklós–Singhi subset-sum problem, finite and limit forms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::exactnum::{
    binom, binomial_tail_ge, from_decimal_f64, normal_cdf, subset_sum_distribution, to_f64,
    CoefficientMultiset, Rational,
};

/// Exact `Pr(a_{i1} + ... + a_{ik} > (k/n) sum a)` over uniform `k`-subsets.
pub fn mms_value(coeffs: &CoefficientMultiset, k: u64) -> Result<Rational> {
    let n = coeffs.n();
    if k > n || n == 0 {
        return domain(format!("k = {k} must lie in [0, n = {n}]"));
    }
    let dist = subset_sum_distribution(coeffs, k)?;
    let mean = coeffs.sum() * Rational::new(BigInt::from(k), BigInt::from(n));
    Ok(dist.prob_gt(&mean))
}

/// `(n - k) / n`, the value attained by `1 - n, 1, 1, ..., 1`.
pub fn mms_conjectured_value(n: u64, k: u64) -> Rational {
    Rational::new(BigInt::from(n - k.min(n)), BigInt::from(n))
}

/// A candidate for the limit problem: finitely many nonzero coefficients, a
/// gaussian weight and the success probability of the indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitSolution {
    pub coeffs: Vec<Rational>,
    pub gauss_weight: f64,
    pub p: f64,
}

impl LimitSolution {
    pub fn new(coeffs: Vec<Rational>, gauss_weight: f64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("p = {p} must lie in (0, 1)"));
        }
        if !(gauss_weight.is_finite() && gauss_weight >= 0.0) {
            return domain(format!("gaussian weight {gauss_weight} must be finite and >= 0"));
        }
        let coeffs: Vec<Rational> = coeffs.into_iter().filter(|c| !c.is_zero()).collect();
        if coeffs.is_empty() && gauss_weight == 0.0 {
            return Err(Error::DegenerateSolution);
        }
        Ok(LimitSolution { coeffs, gauss_weight, p })
    }

    /// `p(1-p) sum a_i^2 + d^2`.
    pub fn variance(&self) -> f64 {
        let sq: f64 = self.coeffs.iter().map(|a| to_f64(a).powi(2)).sum();
        self.p * (1.0 - self.p) * sq + self.gauss_weight * self.gauss_weight
    }
}

const MAX_OUTCOMES: u64 = 1 << 24;

/// `Pr(sum a_i (x_i - p) + d x_0 > threshold)`.
///
/// Equal coefficients are grouped so the enumeration runs over success counts
/// per distinct value. With `d = 0` the comparison is exact.
pub fn limit_objective(s: &LimitSolution, threshold: f64) -> Result<f64> {
    if s.coeffs.is_empty() && s.gauss_weight == 0.0 {
        return Err(Error::DegenerateSolution);
    }
    let groups = CoefficientMultiset::from_values(&s.coeffs);
    let outcomes = groups
        .entries()
        .iter()
        .try_fold(1u64, |acc, (_, m)| acc.checked_mul(m + 1).filter(|&v| v <= MAX_OUTCOMES));
    if outcomes.is_none() {
        return domain("too many distinct outcome combinations to enumerate");
    }
    let p = from_decimal_f64(s.p)?;
    let thr = from_decimal_f64(threshold)?;
    let pmfs: Vec<Vec<f64>> = groups
        .entries()
        .iter()
        .map(|(_, m)| (0..=*m).map(|i| binom_pmf_f64(*m, s.p, i)).collect())
        .collect();

    let mut total = 0.0;
    let mut counts = vec![0u64; groups.entries().len()];
    loop {
        let mut weight = 1.0;
        let mut partial = Rational::zero();
        for (g, (v, m)) in groups.entries().iter().enumerate() {
            let i = counts[g];
            weight *= pmfs[g][i as usize];
            let centred = Rational::from_integer(BigInt::from(i))
                - &p * Rational::from_integer(BigInt::from(*m));
            partial += v * centred;
        }
        total += weight * tail_prob(&partial, &thr, s.gauss_weight);
        // odometer over the per-group success counts
        let mut g = 0;
        loop {
            if g == counts.len() {
                return Ok(total.clamp(0.0, 1.0));
            }
            counts[g] += 1;
            if counts[g] <= groups.entries()[g].1 {
                break;
            }
            counts[g] = 0;
            g += 1;
        }
    }
}

fn tail_prob(partial: &Rational, thr: &Rational, d: f64) -> f64 {
    if d == 0.0 {
        if partial > thr {
            1.0
        } else {
            0.0
        }
    } else {
        normal_cdf(to_f64(&(partial - thr)) / d)
    }
}

fn binom_pmf_f64(m: u64, p: f64, i: u64) -> f64 {
    binom(m, i).to_f64().unwrap_or(f64::INFINITY) * p.powi(i as i32) * (1.0 - p).powi((m - i) as i32)
}

/// `limit_objective` at threshold `-eps`.
pub fn slack_objective(s: &LimitSolution, eps: f64) -> Result<f64> {
    if eps < 0.0 {
        return domain(format!("eps = {eps} must be >= 0"));
    }
    limit_objective(s, -eps)
}

/// The six curves plotted for the limit problem: `q` equal coefficients of one
/// sign and nothing else.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Neg1,
    Pos3,
    Neg3,
    Pos5,
    Neg5,
    Pos2,
}

impl Family {
    /// Tie-break order used by [`best_family`].
    pub const ALL: [Family; 6] =
        [Family::Neg1, Family::Pos3, Family::Neg3, Family::Pos5, Family::Neg5, Family::Pos2];

    pub fn q(self) -> u64 {
        match self {
            Family::Neg1 => 1,
            Family::Pos2 => 2,
            Family::Pos3 | Family::Neg3 => 3,
            Family::Pos5 | Family::Neg5 => 5,
        }
    }

    pub fn positive(self) -> bool {
        matches!(self, Family::Pos2 | Family::Pos3 | Family::Pos5)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::Neg1 => "neg1",
            Family::Pos3 => "pos3",
            Family::Neg3 => "neg3",
            Family::Pos5 => "pos5",
            Family::Neg5 => "neg5",
            Family::Pos2 => "pos2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family {s:?}")))
    }
}

/// A point on one of the family curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyCurvePoint {
    pub p: f64,
    pub family: Family,
    pub value: f64,
}

/// Exact `Pr(sign * (B(q, p) - q p) > 0)`.
pub fn equal_coefficients_value(q: u64, positive: bool, p: &Rational) -> Rational {
    let qp = p * Rational::from_integer(BigInt::from(q));
    if positive {
        // B > qp  <=>  B >= floor(qp) + 1
        let m: BigInt = qp.floor().to_integer() + 1;
        binomial_tail_ge(q, p, m.to_i64().unwrap_or(i64::MAX))
    } else {
        // B < qp  <=>  not (B >= ceil(qp))
        let m = qp.ceil().to_integer();
        Rational::one() - binomial_tail_ge(q, p, m.to_i64().unwrap_or(i64::MAX))
    }
}

pub fn family_curve_exact(family: Family, p: &Rational) -> Result<Rational> {
    if !p.is_positive() || *p >= Rational::one() {
        return domain(format!("p = {p} must lie in (0, 1)"));
    }
    Ok(equal_coefficients_value(family.q(), family.positive(), p))
}

/// Value of a family curve at the decimal `p` (so `0.4` means exactly `2/5`).
pub fn family_curve(family: Family, p: f64) -> Result<f64> {
    family_curve_exact(family, &from_decimal_f64(p)?).map(|v| to_f64(&v))
}

/// The best of the six curves at `p`, ties going to the earlier family in
/// [`Family::ALL`].
pub fn best_family(p: f64) -> Result<(Family, f64)> {
    if !(p > 0.0 && p <= 0.5) {
        return domain(format!("p = {p} must lie in (0, 1/2]"));
    }
    let pr = from_decimal_f64(p)?;
    let mut best: Option<(Family, Rational)> = None;
    for f in Family::ALL {
        let v = family_curve_exact(f, &pr)?;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((f, v));
        }
    }
    let (f, v) = best.expect("six families");
    Ok((f, to_f64(&v)))
}

const SCAN_STEPS: usize = 2000;
const BISECTION_TOL: f64 = 1e-9;

/// A point in `[lo, hi]` where the two curves cross.
///
/// The difference is scanned on a uniform grid; every bracketed sign change is
/// bisected, and the first one where the curves actually meet (rather than
/// jump past each other at a lattice point `q p in Z`) is returned.
pub fn family_crossing(f1: Family, f2: Family, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return domain(format!("bad bracket [{lo}, {hi}]"));
    }
    let g = |p: f64| -> Result<f64> { Ok(family_curve(f1, p)? - family_curve(f2, p)?) };
    let mut prev_p = lo;
    let mut prev = g(lo)?;
    for i in 1..=SCAN_STEPS {
        let p = lo + (hi - lo) * i as f64 / SCAN_STEPS as f64;
        let cur = g(p)?;
        if prev == 0.0 {
            return Ok(prev_p);
        }
        if prev.signum() != cur.signum() {
            let root = bisect(&g, prev_p, p, prev)?;
            let gap = (family_curve(f1, root)? - family_curve(f2, root)?).abs();
            if gap < 1e-6 {
                return Ok(root);
            }
        }
        prev_p = p;
        prev = cur;
    }
    Err(Error::NoSignChange { lo, hi })
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, ga: f64) -> Result<f64> {
    let sa = ga.signum();
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Rows `(p, family, value)` for every family on the grid `p_min, p_min + step, ...`.
pub fn family_curve_table(p_min: f64, p_max: f64, step: f64) -> Result<Vec<FamilyCurvePoint>> {
    let grid = p_grid(p_min, p_max, step)?;
    let mut out = Vec::with_capacity(grid.len() * Family::ALL.len());
    for p in grid {
        for family in Family::ALL {
            out.push(FamilyCurvePoint { p, family, value: family_curve(family, p)? });
        }
    }
    Ok(out)
}

/// `p_min, p_min + step, ...` up to `p_max` (inclusive, with a small tolerance).
pub fn p_grid(p_min: f64, p_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(p_min > 0.0) || !(p_min < p_max) || p_max >= 1.0 {
        return domain(format!("bad grid: [{p_min}, {p_max}] step {step}"));
    }
    let count = ((p_max - p_min) / step + 1e-9).floor() as usize;
    // round to the step's decimal resolution so 0.01 * 29 prints as 0.29
    let scale = 1e12;
    Ok((0..=count)
        .map(|i| ((p_min + step * i as f64) * scale).round() / scale)
        .collect())
}

/// A finite sequence of length `n` whose `k`-subset sums mimic `s`.
///
/// The listed coefficients are kept; the remaining slots are split evenly
/// between `+eps` and `-eps` (one extra zero when their number is odd), with
/// `eps` chosen to restore the variance of the limit solution. The result is
/// shifted to sum to zero.
pub fn limit_to_finite(s: &LimitSolution, n: u64, k: u64) -> Result<CoefficientMultiset> {
    let m = s.coeffs.len() as u64;
    if n < m + 2 {
        return domain(format!("n = {n} leaves fewer than two free slots"));
    }
    if k == 0 || k >= n {
        return domain(format!("k = {k} must lie in (0, n)"));
    }
    let p_hat = k as f64 / n as f64;
    if (p_hat - s.p).abs() > 0.1 {
        return domain(format!("k/n = {p_hat} is too far from p = {}", s.p));
    }
    let sq: f64 = s.coeffs.iter().map(|a| to_f64(a).powi(2)).sum();
    let target = s.variance();
    let mut residual = target - p_hat * (1.0 - p_hat) * sq;
    if residual < 0.0 {
        if residual > -1e-12 * target.max(1.0) {
            residual = 0.0;
        } else {
            return domain(format!("negative variance residual {residual}"));
        }
    }
    let free = n - m;
    let pm = free / 2;
    let eps = (residual / (p_hat * (1.0 - p_hat) * (2 * pm) as f64)).sqrt();
    let eps = dyadic(eps);
    let mut entries: Vec<(Rational, u64)> = s.coeffs.iter().map(|a| (a.clone(), 1)).collect();
    entries.push((eps.clone(), pm));
    entries.push((-eps, pm));
    entries.push((Rational::zero(), free - 2 * pm));
    let raw = CoefficientMultiset::new(entries);
    let mean = raw.sum() / Rational::from_integer(BigInt::from(n));
    Ok(CoefficientMultiset::new(
        raw.entries().iter().map(|(v, c)| (v - &mean, *c)),
    ))
}

fn dyadic(x: f64) -> Rational {
    let scale = (1u64 << 40) as f64;
    Rational::new(BigInt::from((x * scale).round() as i64), BigInt::from(1u64 << 40))
}

/// Exact small-sample probability next to its gaussian approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct CltCheck {
    pub dp_prob: Rational,
    pub gauss_approx: f64,
    pub abs_diff: f64,
}

/// Compares `Pr(S < (k/n) sum a + t)` with `Phi(t / sigma)`, where `S` is the
/// sum of a uniform `k`-subset and `sigma^2` its exact variance.
pub fn clt_check(coeffs: &CoefficientMultiset, k: u64, t: &Rational) -> Result<CltCheck> {
    let n = coeffs.n();
    if k == 0 || k >= n {
        return domain(format!("k = {k} must lie in (0, n = {n})"));
    }
    let nr = Rational::from_integer(BigInt::from(n));
    let kr = Rational::from_integer(BigInt::from(k));
    let mean = coeffs.sum() / &nr;
    let ss = coeffs
        .entries()
        .iter()
        .map(|(v, m)| (v - &mean) * (v - &mean) * Rational::from_integer(BigInt::from(*m)))
        .fold(Rational::zero(), |a, b| a + b);
    if ss.is_zero() {
        return Err(Error::ZeroVariance);
    }
    // finite population: Var = k (n - k) / (n (n - 1)) * sum (a - mean)^2
    let var = &kr * (&nr - &kr) / (&nr * (&nr - Rational::one())) * ss;
    let sigma = to_f64(&var).sqrt();
    let dist = subset_sum_distribution(coeffs, k)?;
    let dp_prob = dist.prob_lt(&(mean * kr + t));
    let gauss_approx = normal_cdf(to_f64(t) / sigma);
    let abs_diff = (to_f64(&dp_prob) - gauss_approx).abs();
    Ok(CltCheck { dp_prob, gauss_approx, abs_diff })
}

/// Exact `Pr(1 <= S <= M)` for a zero-sum sequence.
pub fn interval_objective(coeffs: &CoefficientMultiset, k: u64, big_m: &Rational) -> Result<Rational> {
    if *big_m <= Rational::one() {
        return domain(format!("M = {big_m} must exceed 1"));
    }
    if !coeffs.sum().is_zero() {
        return domain("coefficients must sum to zero");
    }
    let dist = subset_sum_distribution(coeffs, k)?;
    let one = Rational::one();
    Ok(dist.prob_where(|s| *s >= one && s <= big_m))
}

const EXACT_MATCHING_LIMIT: usize = 12;

/// Distance between two limit solutions: the cheapest way to pair up the
/// coefficients (unpaired ones against zero) plus the largest absolute value
/// left in each tail.
///
/// Tails are always the smallest-magnitude coefficients. The pairing is an
/// exact assignment for supports up to 12 and a sorted greedy pairing beyond.
/// The gaussian weights do not enter.
pub fn solution_distance(s1: &LimitSolution, s2: &LimitSolution) -> f64 {
    to_f64(&coefficient_distance(&s1.coeffs, &s2.coeffs))
}

pub fn coefficient_distance(a: &[Rational], b: &[Rational]) -> Rational {
    let by_abs = |v: &[Rational]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| y.abs().cmp(&x.abs()));
        v
    };
    let a = by_abs(a);
    let b = by_abs(b);
    let mut best: Option<Rational> = None;
    for ka in 0..=a.len() {
        let tail_a = a.get(ka).map(|v| v.abs()).unwrap_or_else(Rational::zero);
        for kb in 0..=b.len() {
            let tail_b = b.get(kb).map(|v| v.abs()).unwrap_or_else(Rational::zero);
            let cost = matching_cost(&a[..ka], &b[..kb]) + &tail_a + &tail_b;
            if best.as_ref().is_none_or(|c| cost < *c) {
                best = Some(cost);
            }
        }
    }
    best.unwrap_or_else(Rational::zero)
}

fn matching_cost(a: &[Rational], b: &[Rational]) -> Rational {
    if a.len().max(b.len()) > EXACT_MATCHING_LIMIT {
        return greedy_matching_cost(a, b);
    }
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    // dp[mask] = cheapest cost with the used subset `mask` of b after the
    // first i elements of a, each matched to a member of b or to zero
    let full = 1usize << b.len();
    let mut dp: Vec<Option<Rational>> = vec![None; full];
    dp[0] = Some(Rational::zero());
    for x in a {
        let mut next: Vec<Option<Rational>> = vec![None; full];
        for mask in 0..full {
            let Some(base) = &dp[mask] else { continue };
            relax(&mut next[mask], base + x.abs());
            for (j, y) in b.iter().enumerate() {
                if mask >> j & 1 == 0 {
                    relax(&mut next[mask | 1 << j], base + (x - y).abs());
                }
            }
        }
        dp = next;
    }
    (0..full)
        .filter_map(|mask| {
            dp[mask].as_ref().map(|c| {
                let rest = b
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 0)
                    .fold(Rational::zero(), |acc, (_, y)| acc + y.abs());
                c + rest
            })
        })
        .min()
        .unwrap_or_else(Rational::zero)
}

fn relax(slot: &mut Option<Rational>, v: Rational) {
    if slot.as_ref().is_none_or(|c| v < *c) {
        *slot = Some(v);
    }
}

fn greedy_matching_cost(a: &[Rational], b: &[Rational]) -> Rational {
    let sorted = |v: &[Rational]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    let mut a = sorted(a);
    let mut b = sorted(b);
    let len = a.len().max(b.len());
    a.resize(len, Rational::zero());
    b.resize(len, Rational::zero());
    let a = sorted(&a);
    let b = sorted(&b);
    a.iter().zip(&b).fold(Rational::zero(), |acc, (x, y)| acc + (x - y).abs())
}
