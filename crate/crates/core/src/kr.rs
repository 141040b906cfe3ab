//! The Kikuta–Ruckle threshold problem.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::exactnum::{
    binom, binomial_tail_ge, from_decimal_f64, hypergeom_counts, subset_sum_distribution, to_f64,
    CoefficientMultiset, Rational,
};

/// `n` items, `k` drawn, threshold `d`. `strict` selects `> d` (the default)
/// over `>= d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KRInstance {
    pub n: u64,
    pub k: u64,
    pub d: Rational,
    pub strict: bool,
}

impl KRInstance {
    pub fn new(n: u64, k: u64, d: Rational) -> Result<Self> {
        Self::with_strictness(n, k, d, true)
    }

    pub fn with_strictness(n: u64, k: u64, d: Rational, strict: bool) -> Result<Self> {
        if k < 1 || k > n {
            return domain(format!("need 1 <= k <= n (n={n}, k={k})"));
        }
        if !d.is_positive() || d >= Rational::one() {
            return domain(format!("d = {d} must lie in (0, 1)"));
        }
        Ok(KRInstance { n, k, d, strict })
    }

    /// Smallest count `x` with `x > t` (strict) or `x >= t`.
    fn first_hit(&self, t: &Rational) -> BigInt {
        if self.strict {
            t.floor().to_integer() + 1
        } else {
            t.ceil().to_integer()
        }
    }

    fn passes(&self, sum: &Rational) -> bool {
        if self.strict {
            *sum > self.d
        } else {
            *sum >= self.d
        }
    }
}

fn check_s(inst: &KRInstance, s: u64) -> Result<()> {
    if s < 1 || s > inst.n {
        return domain(format!("s = {s} must lie in [1, {}]", inst.n));
    }
    Ok(())
}

/// Exact value of `s` equal weights `1/s`: `Pr(X / s > d)` with
/// `X ~ Hypergeometric(n, s, k)`.
pub fn kr_uniform_value(inst: &KRInstance, s: u64) -> Result<Rational> {
    check_s(inst, s)?;
    let counts = hypergeom_counts(inst.n, s, inst.k)?;
    let first = inst.first_hit(&(&inst.d * Rational::from_integer(BigInt::from(s))));
    Ok(Rational::new(BigInt::from(tail_sum(&counts, &first)), BigInt::from(binom(inst.n, inst.k))))
}

fn tail_sum(counts: &[BigUint], first: &BigInt) -> BigUint {
    let start = match first.to_usize() {
        Some(i) => i,
        None if first.is_negative() => 0,
        None => return BigUint::zero(),
    };
    counts.iter().skip(start).sum()
}

/// Exact `Pr(a_{i1} + ... + a_{ik} > d)` for a nonnegative sequence summing to one.
pub fn kr_general_value(inst: &KRInstance, coeffs: &CoefficientMultiset) -> Result<Rational> {
    if coeffs.n() != inst.n {
        return domain(format!("multiset has {} entries, expected n = {}", coeffs.n(), inst.n));
    }
    if coeffs.entries().iter().any(|(v, _)| v.is_negative()) {
        return domain("coefficients must be nonnegative");
    }
    if !coeffs.sum().is_one() {
        return domain(format!("coefficients sum to {}, not 1", coeffs.sum()));
    }
    let dist = subset_sum_distribution(coeffs, inst.k)?;
    Ok(dist.prob_where(|s| inst.passes(s)))
}

/// Tail counts `sum_{x >= i} C(s, x) C(n - s, k - x)` for every `s` of a fixed
/// `(n, k)`, sharing the denominator `C(n, k)`.
#[derive(Clone, Debug)]
pub struct UniformTable {
    pub n: u64,
    pub k: u64,
    suffix: Vec<Vec<BigUint>>,
    total: BigUint,
}

impl UniformTable {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        if k < 1 || k > n {
            return domain(format!("need 1 <= k <= n (n={n}, k={k})"));
        }
        let mut suffix = Vec::with_capacity(n as usize + 1);
        suffix.push(Vec::new());
        for s in 1..=n {
            let counts = hypergeom_counts(n, s, k)?;
            let mut acc = BigUint::zero();
            let mut col = vec![BigUint::zero(); counts.len() + 1];
            for x in (0..counts.len()).rev() {
                acc += &counts[x];
                col[x] = acc.clone();
            }
            suffix.push(col);
        }
        Ok(UniformTable { n, k, suffix, total: binom(n, k) })
    }

    /// Numerator of [`kr_uniform_value`] over `C(n, k)`.
    pub fn numerator(&self, d: &Rational, strict: bool, s: u64) -> BigUint {
        let t = d * Rational::from_integer(BigInt::from(s));
        let first = if strict { t.floor().to_integer() + 1 } else { t.ceil().to_integer() };
        let col = &self.suffix[s as usize];
        match first.to_usize() {
            Some(i) if i < col.len() => col[i].clone(),
            Some(_) => BigUint::zero(),
            None if first.is_negative() => col[0].clone(),
            None => BigUint::zero(),
        }
    }

    pub fn value(&self, d: &Rational, strict: bool, s: u64) -> Rational {
        Rational::new(BigInt::from(self.numerator(d, strict, s)), BigInt::from(self.total.clone()))
    }

    /// Smallest optimal `s`, its numerator, and every optimal `s`.
    fn argmax(&self, d: &Rational, strict: bool) -> (u64, BigUint, Vec<u64>) {
        let mut best = BigUint::zero();
        let mut arg = Vec::new();
        for s in 1..=self.n {
            let v = self.numerator(d, strict, s);
            if arg.is_empty() || v > best {
                best = v;
                arg = vec![s];
            } else if v == best {
                arg.push(s);
            }
        }
        (arg[0], best, arg)
    }
}

/// Exhaustive best `s`; ties go to the smallest.
pub fn kr_best_uniform(inst: &KRInstance) -> Result<(u64, Rational)> {
    let table = UniformTable::new(inst.n, inst.k)?;
    let (s, num, _) = table.argmax(&inst.d, inst.strict);
    Ok((s, Rational::new(BigInt::from(num), BigInt::from(table.total))))
}

/// `max{y in Z : y < x}`, or `y <= x` when `strict` is false.
pub fn strict_floor(x: &Rational, strict: bool) -> BigInt {
    let f = x.floor().to_integer();
    if strict && x.is_integer() {
        f - 1
    } else {
        f
    }
}

/// `max{y : y = residue (mod 2), y < x}` (or `y <= x`).
pub fn parity_floor(x: &Rational, residue: u64, strict: bool) -> BigInt {
    let f = strict_floor(x, strict);
    let r = BigInt::from(residue % 2);
    if f.mod_floor(&BigInt::from(2)) == r {
        f
    } else {
        f - 1
    }
}

const FIXED_CANDIDATES: [u64; 9] = [5, 7, 8, 11, 14, 17, 20, 23, 26];
const FROM_TOP: [u64; 14] = [24, 21, 18, 15, 13, 12, 10, 9, 7, 6, 5, 4, 3, 0];

/// The candidate set of the strengthened conjecture, restricted to `[1, n]`.
///
/// Terms with `2d - 1` in the denominator are left out when `d <= 1/2`.
pub fn kr_conjectured_s_set(inst: &KRInstance) -> BTreeSet<u64> {
    let n = inst.n;
    let d = &inst.d;
    let strict = inst.strict;
    let mut raw: Vec<BigInt> = Vec::new();
    raw.push(strict_floor(&d.recip(), strict));
    let two_d_minus_one = d * Rational::from_integer(BigInt::from(2)) - Rational::one();
    if two_d_minus_one.is_positive() {
        raw.push(parity_floor(&two_d_minus_one.recip(), 1, strict));
        let num = Rational::from_integer(BigInt::from(2 * inst.k) - BigInt::from(n));
        raw.push(parity_floor(&(num / &two_d_minus_one), n % 2, strict));
    }
    raw.extend(FIXED_CANDIDATES.iter().map(|&c| BigInt::from(c)));
    raw.push(strict_floor(&(Rational::from_integer(BigInt::from(inst.k)) / d), strict));
    raw.extend(FROM_TOP.iter().map(|&c| BigInt::from(n) - BigInt::from(c)));
    raw.into_iter()
        .filter_map(|s| s.to_u64())
        .filter(|&s| s >= 1 && s <= n)
        .collect()
}

/// Outcome of comparing the conjectured candidates with all `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureCheck {
    pub holds: bool,
    /// Smallest optimal `s` over all of `1..=n`.
    pub s_star: u64,
    pub witness_value: Rational,
    /// Best candidate inside the conjectured set with its value.
    pub best_in_set: Option<(u64, Rational)>,
}

pub const CHECK_MAX_N: u64 = 2000;

pub fn kr_check_conjecture(inst: &KRInstance) -> Result<ConjectureCheck> {
    if inst.n > CHECK_MAX_N {
        return Err(Error::Guard(format!("n = {} exceeds {CHECK_MAX_N}", inst.n)));
    }
    let table = UniformTable::new(inst.n, inst.k)?;
    Ok(check_with_table(&table, inst))
}

fn check_with_table(table: &UniformTable, inst: &KRInstance) -> ConjectureCheck {
    let (s_star, best, _) = table.argmax(&inst.d, inst.strict);
    let set = kr_conjectured_s_set(inst);
    let best_in_set = set
        .iter()
        .map(|&s| (s, table.numerator(&inst.d, inst.strict, s)))
        .fold(None::<(u64, BigUint)>, |acc, (s, v)| match acc {
            Some((_, ref b)) if *b >= v => acc,
            _ => Some((s, v)),
        });
    let holds = best_in_set.as_ref().is_some_and(|(_, v)| *v == best);
    let den = BigInt::from(table.total.clone());
    ConjectureCheck {
        holds,
        s_star,
        witness_value: Rational::new(BigInt::from(best), den.clone()),
        best_in_set: best_in_set.map(|(s, v)| (s, Rational::new(BigInt::from(v), den.clone()))),
    }
}

/// One line of a conjecture scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub n: u64,
    pub k: u64,
    pub d: Rational,
    pub s_star: u64,
    pub value: Rational,
    pub in_conjectured_set: bool,
}

/// Reduced fractions `a/b` in `(0, 1)` with `b <= max_den`, ascending.
pub fn farey_interior(max_den: u64) -> Vec<Rational> {
    let set: BTreeSet<Rational> = (2..=max_den)
        .flat_map(|b| (1..b).map(move |a| Rational::new(BigInt::from(a), BigInt::from(b))))
        .collect();
    set.into_iter().collect()
}

/// Checks the conjecture for every `n` in `ns`, every `1 <= k <= n` and every
/// `d` in `ds`. Output is ordered by `(n, k, d)` whatever the thread count.
pub fn kr_scan(ns: &[u64], ds: &[Rational], strict: bool) -> Result<Vec<ScanRecord>> {
    let pairs: Vec<(u64, u64)> = ns.iter().flat_map(|&n| (1..=n).map(move |k| (n, k))).collect();
    if let Some(&(n, _)) = pairs.iter().find(|(n, _)| *n > CHECK_MAX_N) {
        return Err(Error::Guard(format!("n = {n} exceeds {CHECK_MAX_N}")));
    }
    let chunks: Vec<Result<Vec<ScanRecord>>> = pairs
        .par_iter()
        .map(|&(n, k)| {
            let table = UniformTable::new(n, k)?;
            ds.iter()
                .map(|d| {
                    let inst = KRInstance::with_strictness(n, k, d.clone(), strict)?;
                    let c = check_with_table(&table, &inst);
                    Ok(ScanRecord {
                        n,
                        k,
                        d: d.clone(),
                        s_star: c.s_star,
                        value: c.witness_value,
                        in_conjectured_set: c.holds,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Exact `Pr(B(s, p) >= ceil(s p))`: the value of `s` equal weights in the
/// limit where `k/n` and `d` tend to `p` with `d` just below `p`.
pub fn kr_limit_value_exact(p: &Rational, s: u64) -> Result<Rational> {
    if s < 1 {
        return domain("s must be >= 1");
    }
    if !p.is_positive() || *p >= Rational::one() {
        return domain(format!("p = {p} must lie in (0, 1)"));
    }
    let m = (p * Rational::from_integer(BigInt::from(s))).ceil().to_integer();
    Ok(binomial_tail_ge(s, p, m.to_i64().unwrap_or(i64::MAX)))
}

/// [`kr_limit_value_exact`] for a decimal `p`.
pub fn kr_limit_value(p: f64, s: u64) -> Result<f64> {
    kr_limit_value_exact(&from_decimal_f64(p)?, s).map(|v| to_f64(&v))
}

/// Value of `m2` weights `2/s` plus `s - 2 m2` weights `1/s`, rest zero.
pub fn kr_probe_two_level(inst: &KRInstance, s: u64, m2: u64) -> Result<Rational> {
    if s < 1 || 2 * m2 > s || s - m2 > inst.n {
        return domain(format!("infeasible two-level shape: s = {s}, m2 = {m2}, n = {}", inst.n));
    }
    let sr = BigInt::from(s);
    let coeffs = CoefficientMultiset::new([
        (Rational::new(BigInt::from(2), sr.clone()), m2),
        (Rational::new(BigInt::one(), sr), s - 2 * m2),
        (Rational::zero(), inst.n - (s - m2)),
    ]);
    kr_general_value(inst, &coeffs)
}

/// `kr_uniform_value(s1) - kr_uniform_value(s2)`.
pub fn kr_gap(inst: &KRInstance, s1: u64, s2: u64) -> Result<Rational> {
    Ok(kr_uniform_value(inst, s1)? - kr_uniform_value(inst, s2)?)
}
