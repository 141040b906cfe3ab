//! Explicit hider mixtures and searcher strategies with known guarantees.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::caching::model::{DepthPair, GameParams, HiderPairMix};
use crate::error::{domain, Error, Result};
use crate::exactnum::{int, rat, Rational};

fn pair(a: Rational, b: Rational) -> DepthPair {
    DepthPair::new(a, b).expect("hard-coded pair is valid")
}

fn mix(atoms: Vec<(DepthPair, Rational)>) -> HiderPairMix {
    HiderPairMix::new(atoms).expect("hard-coded mixture is valid")
}

/// The three thresholds `h*` of the four-atom family near `h = 19/7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case19_7 {
    H67_25,
    H51_19,
    H19_7,
}

impl Case19_7 {
    pub const ALL: [Case19_7; 3] = [Case19_7::H67_25, Case19_7::H51_19, Case19_7::H19_7];

    pub fn h_star(self) -> Rational {
        match self {
            Case19_7::H67_25 => rat(67, 25),
            Case19_7::H51_19 => rat(51, 19),
            Case19_7::H19_7 => rat(19, 7),
        }
    }

    /// Claimed bound times `n(n+1)`.
    pub fn numerator(self) -> Rational {
        match self {
            Case19_7::H67_25 => int(14) + rat(2, 53),
            Case19_7::H51_19 => int(14) + rat(2, 27),
            Case19_7::H19_7 => int(14) + rat(2, 11),
        }
    }

    fn weights(self) -> [Rational; 4] {
        match self {
            Case19_7::H67_25 => [rat(12, 53), rat(4, 53), rat(36, 53), rat(1, 53)],
            Case19_7::H51_19 => [rat(20, 81), rat(4, 81), rat(56, 81), rat(1, 81)],
            Case19_7::H19_7 => [rat(4, 33), rat(4, 33), rat(8, 11), rat(1, 33)],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Case19_7::H67_25 => "h67_25",
            Case19_7::H51_19 => "h51_19",
            Case19_7::H19_7 => "h19_7",
        }
    }
}

impl fmt::Display for Case19_7 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Case19_7 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Case19_7::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| Error::Domain(format!("unknown case {s:?}")))
    }
}

/// Four-atom mixture for `h` just below `h*`, with its claimed numerator.
pub fn hider_19_7_mixture(case: Case19_7) -> (HiderPairMix, Rational) {
    let hs = case.h_star();
    let one = Rational::one();
    let depths = [
        ((int(3) - &hs) / int(2), (&hs - &one) / int(2)),
        ((&hs - &one) / int(6), (int(7) - &hs) / int(6)),
        ((&hs - &one) / int(4), (int(5) - &hs) / int(4)),
        ((&hs - &one) / int(6), (&hs - &one) / int(6)),
    ];
    let atoms = depths.into_iter().zip(case.weights()).map(|((a, b), w)| (pair(a, b), w)).collect();
    (mix(atoms), case.numerator())
}

/// Selector for the two-atom mixtures just below `h = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SmallH {
    /// `h` in `[2 - 1/(q-1), 2 - 1/q)`, `q` in 5..=9.
    Q(u32),
    /// `h` in `[9/5, 2)`.
    NineFifths,
}

impl SmallH {
    /// The `h` interval `[lo, hi)` the mixture is stated for.
    pub fn interval(self) -> (Rational, Rational) {
        match self {
            SmallH::Q(q) => (int(2) - rat(1, q as i64 - 1), int(2) - rat(1, q as i64)),
            SmallH::NineFifths => (rat(9, 5), int(2)),
        }
    }
}

impl FromStr for SmallH {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "nine_fifths" {
            return Ok(SmallH::NineFifths);
        }
        let q: u32 = s.parse().map_err(|_| Error::Domain(format!("bad selector {s:?}")))?;
        Ok(SmallH::Q(q))
    }
}

pub fn hider_small_h_strategy(sel: SmallH) -> Result<(HiderPairMix, Rational)> {
    match sel {
        SmallH::NineFifths => Ok((
            mix(vec![(pair(rat(1, 4), rat(3, 4)), rat(2, 3)), (pair(rat(1, 2), rat(1, 2)), rat(1, 3))]),
            int(6),
        )),
        SmallH::Q(q) => {
            let (p, num) = match q {
                5 => (rat(1, 2), rat(9, 2)),
                6 => (rat(1, 2), int(5)),
                7 => (rat(2, 5), rat(26, 5)),
                8 => (rat(2, 5), rat(28, 5)),
                9 => (rat(1, 3), rat(17, 3)),
                _ => return domain(format!("q = {q} outside 5..=9")),
            };
            let q = q as i64;
            let rest = Rational::one() - &p;
            let atoms = vec![
                (pair(rat(1, q), rat(q - 1, q)), p),
                (pair(rat(q - 1, 2 * q), rat(q + 1, 2 * q)), rest),
            ];
            Ok((mix(atoms), num))
        }
    }
}

/// `(1/4, 3/4)` and `(1/2, 1/2)` evenly; searcher wins at most
/// `11 / (n(n+1))` whenever `h < 5/2`.
pub struct Hider52 {
    pub mix: HiderPairMix,
}

impl Hider52 {
    pub fn bound(&self, n: usize) -> Rational {
        rat(11, (n * (n + 1)) as i64)
    }
}

pub fn hider_5_2_strategy() -> Hider52 {
    Hider52 { mix: mix(vec![(pair(rat(1, 4), rat(3, 4)), rat(1, 2)), (pair(rat(1, 2), rat(1, 2)), rat(1, 2))]) }
}

/// Uniform over ordered depth pairs on the `1/b` lattice with `y1 + y2 <= 1`.
pub fn hider_lattice_mix(b: u32) -> Result<HiderPairMix> {
    if b < 2 {
        return domain("lattice denominator must be at least 2");
    }
    let b = b as i64;
    let total = b * (b - 1) / 2;
    let mut atoms = Vec::new();
    for i in 1..b {
        for j in i..b {
            if i + j <= b {
                let w = if i == j { rat(1, total) } else { rat(2, total) };
                atoms.push((pair(rat(i, b), rat(j, b)), w));
            }
        }
    }
    HiderPairMix::new(atoms)
}

/// Both nuts at depth 1 of one random hole.
pub fn hider_stacked() -> HiderPairMix {
    HiderPairMix::pure(DepthPair::stacked())
}

/// Searcher strategy for integer `h <= (n+1)/2`: dig `h` random holes in
/// parallel until a find at depth `y`, then dig `h` fresh holes (the found
/// hole among them with probability `2h/(n+1)`) by `1 - y` more.
#[derive(Clone, Debug)]
pub struct IntegerHStrategy {
    pub n: u64,
    pub h: u64,
}

impl IntegerHStrategy {
    pub fn new(params: &GameParams) -> Result<Self> {
        params.require_two()?;
        if !params.h.is_integer() || params.h.is_zero() {
            return domain(format!("h = {} must be a positive integer", params.h));
        }
        let n = params.n as u64;
        let h: u64 = params.h.to_integer().try_into().map_err(|_| Error::Domain("h too large".into()))?;
        if n < 2 || 2 * h > n + 1 {
            return domain(format!("need n >= 2 and h <= (n+1)/2, got n = {n}, h = {h}"));
        }
        Ok(IntegerHStrategy { n, h })
    }

    fn revisit(&self) -> Rational {
        rat(2 * self.h as i64, self.n as i64 + 1)
    }

    /// Win probability given the nuts are in two different holes: exactly one
    /// of them among the first `h` holes, the other among the fresh ones.
    pub fn distinct_class_payoff(&self) -> Rational {
        let (n, h) = (self.n as i64, self.h as i64);
        let pairs = int(n * (n - 1) / 2);
        let split = int(h * (n - h));
        let p = self.revisit();
        let reach = if n == h {
            Rational::zero()
        } else {
            (&p * int(h - 1) + (Rational::one() - &p) * int(h)) / int(n - h)
        };
        split * reach / pairs
    }

    /// Win probability given both nuts share a hole.
    pub fn same_hole_class_payoff(&self) -> Rational {
        rat(self.h as i64, self.n as i64) * self.revisit()
    }
}

pub fn searcher_integer_h_value(params: &GameParams) -> Result<Rational> {
    let s = IntegerHStrategy::new(params)?;
    let a = s.distinct_class_payoff();
    let b = s.same_hole_class_payoff();
    if a != b {
        return Err(Error::Guard(format!("class payoffs differ: {a} vs {b}")));
    }
    Ok(a)
}

/// Searcher strategy for `h >= (n+1)/2`: dig `m = floor(h)` random holes in
/// parallel; after a find at depth `y` finish that hole, take the other
/// chosen holes to `max(y, 1-y)` and the rest to `min(y, 1-y)`.
#[derive(Clone, Debug)]
pub struct LargeHStrategy {
    pub n: u64,
    pub h: Rational,
    pub m: u64,
}

impl LargeHStrategy {
    pub fn new(params: &GameParams) -> Result<Self> {
        params.require_two()?;
        let n = params.n as u64;
        if params.h.clone() * int(2) < int(n as i64 + 1) {
            return domain(format!("h = {} below (n+1)/2 = {}", params.h, rat(n as i64 + 1, 2)));
        }
        let m: u64 = params.h.floor().to_integer().try_into().map_err(|_| Error::Domain("h too large".into()))?;
        Ok(LargeHStrategy { n, h: params.h.clone(), m })
    }

    /// Total digging on the branch where the first nut shows up at depth `y`.
    pub fn branch_cost(&self, y: &Rational) -> Rational {
        let one = Rational::one();
        let other = &one - y;
        let (lo, hi) = if *y <= other { (y.clone(), other) } else { (other, y.clone()) };
        one + int(self.m as i64 - 1) * hi + int((self.n - self.m) as i64) * lo
    }

    /// `1 + (2h-2) min + (h-1)(max - min)`, which telescopes to `h`.
    fn relaxed_cost(&self, y: &Rational) -> Rational {
        let one = Rational::one();
        let other = &one - y;
        let (lo, hi) = if *y <= other { (y.clone(), other) } else { (other, y.clone()) };
        let hm1 = &self.h - &one;
        one + (&hm1 * int(2)) * &lo + hm1 * (hi - lo)
    }

    /// Checks `cost <= relaxed == h` on the no-find branch and at every
    /// find depth in `depths`.
    pub fn audit(&self, depths: &[Rational]) -> Result<()> {
        if int(self.m as i64) > self.h {
            return Err(Error::Guard("no-find branch over budget".into()));
        }
        for y in depths {
            if *y <= Rational::zero() || *y > Rational::one() {
                return domain(format!("find depth {y} outside (0, 1]"));
            }
            let c = self.branch_cost(y);
            let r = self.relaxed_cost(y);
            if c > r || r != self.h {
                return Err(Error::Guard(format!("branch y = {y}: cost {c}, relaxed {r}, budget {}", self.h)));
            }
        }
        Ok(())
    }

    pub fn value(&self) -> Rational {
        rat(self.m as i64, self.n as i64)
    }
}

/// `floor(h)/n` for `(n+1)/2 <= h <= n`, after auditing the strategy's
/// budget on a fine grid of find depths (the cost is piecewise linear in `y`
/// with breakpoint `1/2`, so the grid covers every extreme branch).
pub fn largeh_value(params: &GameParams) -> Result<Rational> {
    let s = LargeHStrategy::new(params)?;
    let depths: Vec<Rational> = (1..=64).map(|i| rat(i, 64)).collect();
    s.audit(&depths)?;
    Ok(s.value())
}
