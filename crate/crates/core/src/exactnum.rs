//! Exact combinatorial probability kernel.
//!
//! Everything with rational inputs is computed with big rationals and never
//! rounded. The only floating point routine here is [`normal_cdf`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Exact arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    // Large numerators and denominators overflow f64 individually, so scale
    // both down before dividing.
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Exact value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Exact rational of the shortest decimal that round-trips to `x`, so `0.4`
/// becomes `2/5` rather than the nearest binary fraction.
pub fn from_decimal_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return domain(format!("non-finite value {x}"));
    }
    parse_rational(&format!("{x}"))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` into an exact
/// rational. No binary floating point is involved.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(num, den));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn ratio(num: BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den.clone()))
}

/// Unnormalized hypergeometric weights `C(s, x) C(n - s, k - x)` for
/// `x = 0..=k`. They sum to `C(n, k)`.
pub fn hypergeom_counts(n: u64, s: u64, k: u64) -> Result<Vec<BigUint>> {
    if s > n || k > n {
        return domain(format!("hypergeometric needs s, k <= n (n={n}, s={s}, k={k})"));
    }
    let mut out = vec![BigUint::zero(); (k + 1) as usize];
    let lo = k.saturating_sub(n - s);
    let hi = s.min(k);
    if lo > hi {
        return Ok(out);
    }
    // Walk x upwards: C(s, x+1) = C(s, x) (s - x) / (x + 1),
    // C(m, r-1) = C(m, r) r / (m - r + 1) with m = n - s, r = k - x.
    let m = n - s;
    let mut a = binom(s, lo);
    let mut b = binom(m, k - lo);
    for x in lo..=hi {
        out[x as usize] = &a * &b;
        if x == hi {
            break;
        }
        a = a * (s - x) / (x + 1);
        let r = k - x;
        b = b * r / (m - r + 1);
    }
    Ok(out)
}

/// Exact `Pr(X > t)` for `X ~ Hypergeometric(population n, marked s, draws k)`.
pub fn hypergeom_tail_gt(n: u64, s: u64, k: u64, t: &Rational) -> Result<Rational> {
    let counts = hypergeom_counts(n, s, k)?;
    let first = first_integer_above(t);
    let total = binom(n, k);
    let mut acc = BigUint::zero();
    for (x, c) in counts.iter().enumerate() {
        if BigInt::from(x) >= first {
            acc += c;
        }
    }
    Ok(ratio(acc, &total))
}

/// Smallest integer strictly greater than `t`.
pub fn first_integer_above(t: &Rational) -> BigInt {
    t.floor().to_integer() + 1
}

/// Exact `Pr(B(q, p) >= m)`. Returns 1 for `m <= 0` and 0 for `m > q`.
///
/// Panics if `p` is outside `[0, 1]`.
pub fn binomial_tail_ge(q: u64, p: &Rational, m: i64) -> Rational {
    assert!(
        !p.is_negative() && *p <= Rational::one(),
        "binomial probability {p} outside [0, 1]"
    );
    if m <= 0 {
        return Rational::one();
    }
    if m as u64 > q {
        return Rational::zero();
    }
    let one_minus = Rational::one() - p;
    (m as u64..=q)
        .map(|i| {
            Rational::from_integer(BigInt::from(binom(q, i)))
                * num_traits::pow(p.clone(), i as usize)
                * num_traits::pow(one_minus.clone(), (q - i) as usize)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// Exact `Pr(B(q, p) = i)`.
pub fn binomial_pmf(q: u64, p: &Rational, i: u64) -> Rational {
    if i > q {
        return Rational::zero();
    }
    Rational::from_integer(BigInt::from(binom(q, i)))
        * num_traits::pow(p.clone(), i as usize)
        * num_traits::pow(Rational::one() - p, (q - i) as usize)
}

/// A finite multiset of rational coefficients stored as distinct values with
/// multiplicities, sorted by value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefficientMultiset {
    entries: Vec<(Rational, u64)>,
    n: u64,
}

impl CoefficientMultiset {
    /// Merges repeated values and drops zero multiplicities.
    pub fn new(entries: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut merged: BTreeMap<Rational, u64> = BTreeMap::new();
        for (v, m) in entries {
            if m > 0 {
                *merged.entry(v).or_default() += m;
            }
        }
        let n = merged.values().sum();
        CoefficientMultiset { entries: merged.into_iter().collect(), n }
    }

    pub fn from_values(values: &[Rational]) -> Self {
        Self::new(values.iter().cloned().map(|v| (v, 1)))
    }

    pub fn entries(&self) -> &[(Rational, u64)] {
        &self.entries
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum(&self) -> Rational {
        self.entries
            .iter()
            .map(|(v, m)| v * Rational::from_integer(BigInt::from(*m)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self::new(self.entries.iter().map(|(v, m)| (v * c, *m)))
    }

    /// Every value repeated by its multiplicity, in ascending order.
    pub fn values(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v.clone(), *m as usize))
            .collect()
    }
}

impl fmt::Display for CoefficientMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({v}, {m})")?;
        }
        write!(f, "}}")
    }
}

/// Exact distribution of a random variable with finite rational support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumDistribution {
    /// `(value, probability)` pairs with strictly increasing values.
    pub support: Vec<(Rational, Rational)>,
}

impl SumDistribution {
    pub fn prob_where(&self, pred: impl Fn(&Rational) -> bool) -> Rational {
        self.support
            .iter()
            .filter(|(s, _)| pred(s))
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }

    pub fn prob_gt(&self, t: &Rational) -> Rational {
        self.prob_where(|s| s > t)
    }

    pub fn prob_lt(&self, t: &Rational) -> Rational {
        self.prob_where(|s| s < t)
    }

    pub fn total(&self) -> Rational {
        self.prob_where(|_| true)
    }
}

/// Distribution of `a_{i1} + ... + a_{ik}` over a uniformly random `k`-subset
/// of the multiset.
///
/// Dynamic program over (distinct value, number taken so far); each distinct
/// value with multiplicity `m` contributes `C(m, t)` ways of taking `t` copies.
pub fn subset_sum_distribution(coeffs: &CoefficientMultiset, k: u64) -> Result<SumDistribution> {
    if k > coeffs.n() {
        return domain(format!("subset size {k} exceeds multiset size {}", coeffs.n()));
    }
    let k = k as usize;
    // Largest multiplicity last: the final value only ever fills the gap to k.
    let mut order: Vec<&(Rational, u64)> = coeffs.entries().iter().collect();
    order.sort_by_key(|(_, m)| *m);
    let mut remaining: u64 = coeffs.n();
    let mut layers: Vec<BTreeMap<Rational, BigUint>> = vec![BTreeMap::new(); k + 1];
    layers[0].insert(Rational::zero(), BigUint::one());
    for (idx, (value, mult)) in order.iter().enumerate() {
        let last = idx + 1 == order.len();
        remaining -= mult;
        let choose: Vec<BigUint> = (0..=*mult).map(|t| binom(*mult, t)).collect();
        let mut next: Vec<BTreeMap<Rational, BigUint>> = vec![BTreeMap::new(); k + 1];
        for (taken, layer) in layers.iter().enumerate() {
            let room = (k - taken).min(*mult as usize);
            // after this value at most `remaining` more items can be taken
            let t_min = (k - taken).saturating_sub(remaining as usize);
            let t_lo = if last { k - taken } else { t_min };
            if t_lo > room {
                continue;
            }
            for (sum, ways) in layer {
                for t in t_lo..=room {
                    let key = sum + value * Rational::from_integer(BigInt::from(t));
                    let w = ways * &choose[t];
                    *next[taken + t].entry(key).or_insert_with(BigUint::zero) += w;
                }
            }
        }
        layers = next;
    }
    let total = binom(coeffs.n(), k as u64);
    let support = std::mem::take(&mut layers[k])
        .into_iter()
        .map(|(s, w)| (s, ratio(w, &total)))
        .collect();
    Ok(SumDistribution { support })
}

/// Standard normal distribution function.
///
/// Evaluated as `erfc(-x / sqrt(2)) / 2`. For `|z| < 3` erf uses the
/// positive-term series `erf(z) = 2/sqrt(pi) exp(-z^2) sum 2^n z^(2n+1) / (2n+1)!!`,
/// which has no cancellation; for `|z| >= 3` erfc uses its Laplace continued
/// fraction evaluated with the modified Lentz method. Absolute error is below
/// 1e-15 on the whole line.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x.abs() / std::f64::consts::SQRT_2;
    let tail = 0.5 * erfc_nonneg(z);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

fn erfc_nonneg(z: f64) -> f64 {
    const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    if z < 3.0 {
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * z2 / (2.0 * n + 1.0);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        1.0 - FRAC_2_SQRT_PI * (-z2).exp() * sum
    } else if z > 27.0 {
        0.0
    } else {
        // erfc(z) = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
        let tiny = 1e-300;
        let mut f = z;
        let mut c = z;
        let mut d = 0.0;
        for k in 1..200 {
            let a = k as f64 / 2.0;
            d = z + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = z + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        FRAC_2_SQRT_PI / 2.0 * (-z * z).exp() / f
    }
}

pub(crate) fn lcm_denoms<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subsets(values: &[Rational], k: usize) -> BTreeMap<Rational, u64> {
        let n = values.len();
        let mut out = BTreeMap::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let s = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .fold(Rational::zero(), |a, i| a + &values[i]);
            *out.entry(s).or_default() += 1;
        }
        out
    }

    #[test]
    fn binom_small_and_identity() {
        assert_eq!(binom(4, 2), BigUint::from(6u32));
        assert_eq!(binom(0, 0), BigUint::one());
        assert_eq!(binom(3, 5), BigUint::zero());
    }

    #[test]
    fn binom_413_138_matches_pascal() {
        let c = binom(413, 138);
        assert_eq!(c.to_string().len(), 113);
        assert_eq!(c, binom(412, 137) + binom(412, 138));
    }

    #[test]
    fn hypergeom_examples() {
        assert_eq!(hypergeom_tail_gt(4, 2, 2, &int(0)).unwrap(), rat(5, 6));
        for (n, s, k) in [(7, 3, 4), (10, 10, 3), (5, 0, 5)] {
            assert!(hypergeom_tail_gt(n, s, k, &int(k as i64)).unwrap().is_zero());
        }
        // enumeration of C(10, 5) subsets with 3 marked items
        let mut hits = 0;
        let mut total = 0;
        for mask in 0u32..1024 {
            if mask.count_ones() == 5 {
                total += 1;
                if (mask & 0b111).count_ones() >= 2 {
                    hits += 1;
                }
            }
        }
        assert_eq!(total, 252);
        assert_eq!(hypergeom_tail_gt(10, 3, 5, &rat(3, 2)).unwrap(), rat(hits, total));
        assert_eq!(rat(hits, total), rat(1, 2));
    }

    #[test]
    fn hypergeom_domain_error() {
        assert!(hypergeom_tail_gt(4, 5, 2, &int(0)).is_err());
        assert!(hypergeom_tail_gt(4, 2, 5, &int(0)).is_err());
    }

    #[test]
    fn binomial_tail_examples() {
        assert_eq!(binomial_tail_ge(3, &rat(1, 4), 1), rat(37, 64));
        assert_eq!(binomial_tail_ge(2, &rat(10, 29), 1), rat(480, 841));
        let v = to_f64(&binomial_tail_ge(29, &rat(10, 29), 10));
        assert_eq!(format!("{v:.4}"), "0.5694");
        let v = to_f64(&binomial_tail_ge(29, &rat(10, 29), 11));
        assert_eq!(format!("{v:.4}"), "0.4151");
        assert_eq!(binomial_tail_ge(5, &rat(1, 3), 0), int(1));
        assert_eq!(binomial_tail_ge(5, &rat(1, 3), 6), int(0));
    }

    #[test]
    fn subset_sum_examples() {
        let d = subset_sum_distribution(&CoefficientMultiset::new([(int(1), 2)]), 1).unwrap();
        assert_eq!(d.support, vec![(int(1), int(1))]);

        let c = CoefficientMultiset::new([(int(-3), 1), (int(1), 3)]);
        let d = subset_sum_distribution(&c, 2).unwrap();
        assert_eq!(d.support, vec![(int(-2), rat(1, 2)), (int(2), rat(1, 2))]);

        let c = CoefficientMultiset::new([(int(1), 2), (int(-1), 2)]);
        let d = subset_sum_distribution(&c, 2).unwrap();
        assert_eq!(
            d.support,
            vec![(int(-2), rat(1, 6)), (int(0), rat(2, 3)), (int(2), rat(1, 6))]
        );
        assert!(subset_sum_distribution(&c, 5).is_err());
    }

    #[test]
    fn subset_sum_matches_enumeration() {
        let values: Vec<Rational> =
            [3, -1, -1, 2, 0, 5, -1, 2].iter().map(|&v| rat(v, 3)).collect();
        let c = CoefficientMultiset::from_values(&values);
        for k in 0..=values.len() {
            let d = subset_sum_distribution(&c, k as u64).unwrap();
            let brute = brute_subsets(&values, k);
            let total: u64 = brute.values().sum();
            let expect: Vec<_> = brute.into_iter().map(|(s, w)| (s, rat(w as i64, total as i64))).collect();
            assert_eq!(d.support, expect);
        }
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("131/392").unwrap(), rat(131, 392));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert_eq!(from_decimal_f64(0.4).unwrap(), rat(2, 5));
        assert_eq!(from_decimal_f64(1e-7).unwrap(), rat(1, 10_000_000));
        assert_eq!(from_decimal_f64(-3.0).unwrap(), int(-3));
    }

    fn simpson_phi(x: f64) -> f64 {
        // Phi(x) = 1/2 + integral_0^x density
        let steps = 20_000;
        let h = x / steps as f64;
        let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(0.0) + f(x);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn normal_cdf_examples() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(40.0) - 1.0).abs() <= 1e-12);
        assert!((normal_cdf(1.959963985) - 0.975).abs() <= 1e-9);
    }

    #[test]
    fn normal_cdf_matches_quadrature() {
        for i in -60..=60 {
            let x = i as f64 * 0.1;
            let oracle = simpson_phi(x);
            assert!((normal_cdf(x) - oracle).abs() < 1e-12, "x={x}: {} vs {oracle}", normal_cdf(x));
        }
    }

    #[test]
    fn normal_cdf_symmetry() {
        for i in 0..=800 {
            let x = i as f64 * 0.01;
            assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn to_f64_handles_huge_terms() {
        let t = Rational::new(BigInt::from(binom(413, 138)), BigInt::from(binom(413, 138)) * 2);
        assert_eq!(to_f64(&t), 0.5);
        let t = Rational::new(BigInt::from(binom(2000, 1000)) - 1, BigInt::from(binom(2000, 1000)));
        assert!((to_f64(&t) - 1.0).abs() < 1e-15);
    }
}
