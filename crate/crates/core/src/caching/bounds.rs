//! Closed-form values and bounds for the caching game.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::caching::io::{parse_value_table, ValueTableRow};
use crate::caching::model::GameParams;
use crate::caching::strategies::{largeh_value, searcher_integer_h_value, Case19_7};
use crate::error::{domain, Result};
use crate::exactnum::{binom, int, rat, Rational};

/// `h^k / C(n+k-1, k)`: the uniform-simplex hider caps the searcher here.
pub fn bound_uniform_simplex(params: &GameParams) -> Result<Rational> {
    if params.k != params.j {
        return domain(format!("needs k = j, got k = {}, j = {}", params.k, params.j));
    }
    let c = binom((params.n + params.k - 1) as u64, params.k as u64);
    let hk = num_traits::pow(params.h.clone(), params.k);
    Ok(hk / Rational::from_integer(BigInt::from(c)))
}

/// `2(a-1)(a-2) / (b(b-1) n(n+1))` for `h < a/b`.
pub fn discretelimit_bound(params: &GameParams, a: u64, b: u64) -> Result<Rational> {
    params.require_two()?;
    if a < 3 || b < 2 {
        return domain(format!("need a >= 3 and b >= 2, got a = {a}, b = {b}"));
    }
    if params.h >= rat(a as i64, b as i64) {
        return domain(format!("h = {} is not below {a}/{b}", params.h));
    }
    let n = params.n as i64;
    Ok(rat(2 * (a as i64 - 1) * (a as i64 - 2), b as i64 * (b as i64 - 1) * n * (n + 1)))
}

/// Best lattice bound over `b <= b_max`, returned with its `(a, b)`.
pub fn best_discretelimit_bound(params: &GameParams, b_max: u64) -> Result<(Rational, u64, u64)> {
    params.require_two()?;
    let mut best: Option<(Rational, u64, u64)> = None;
    for b in 2..=b_max.max(2) {
        let hb = &params.h * int(b as i64);
        let a: BigInt = hb.floor().to_integer() + 1;
        let a = a.to_u64().unwrap_or(u64::MAX).max(3);
        let v = discretelimit_bound(params, a, b)?;
        if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
            best = Some((v, a, b));
        }
    }
    Ok(best.expect("b range is nonempty"))
}

/// `C(n+j-1, j) * v_star`.
pub fn discretelimitthm_bound(params: &GameParams, v_star: &Rational) -> Result<Rational> {
    if v_star.is_negative() {
        return domain(format!("v* = {v_star} is negative"));
    }
    let c = binom((params.n + params.j - 1) as u64, params.j as u64);
    Ok(Rational::from_integer(BigInt::from(c)) * v_star)
}

static TABLE_2_2_4: OnceLock<Vec<ValueTableRow>> = OnceLock::new();

/// Rows of the known step function `v(2, 2, 4, h)`.
pub fn table_2_2_4_rows() -> &'static [ValueTableRow] {
    TABLE_2_2_4.get_or_init(|| {
        parse_value_table(include_str!("../../data/v_2_2_4.txt")).expect("bundled table parses")
    })
}

pub fn table_2_2_4(h: &Rational) -> Result<Rational> {
    for row in table_2_2_4_rows() {
        if row.contains(h) {
            return Ok(row.value.clone());
        }
    }
    domain(format!("h = {h} outside [0, 4]"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Proved,
    UpperBound,
    Open,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proved => "proved",
            Status::UpperBound => "upper_bound",
            Status::Open => "open",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryEntry {
    pub value: Rational,
    pub status: Status,
    pub row: String,
}

/// Largest `b` tried when a row asks for the infimum of the lattice bounds.
pub const LATTICE_B_MAX: u64 = 200;

/// `min(lattice bounds for b <= LATTICE_B_MAX, 2h^2/(n(n+1)))`.
fn lattice_inf(params: &GameParams) -> Result<Rational> {
    let (v, _, _) = best_discretelimit_bound(params, LATTICE_B_MAX)?;
    Ok(v.min(bound_uniform_simplex(params)?))
}

/// Smallest proved upper bound among the closed forms that apply at `(n, h)`.
pub fn best_known_upper_bound(params: &GameParams) -> Result<Rational> {
    params.require_two()?;
    let n = params.n as i64;
    let nn = int(n * (n + 1));
    let h = &params.h;
    let mut best = Rational::one().min(rat(h.floor().to_integer().to_i64().unwrap_or(i64::MAX), n));
    best = best.min(bound_uniform_simplex(params)?);
    best = best.min(best_discretelimit_bound(params, LATTICE_B_MAX)?.0);
    if *h < rat(5, 2) {
        best = best.min(int(11) / &nn);
    }
    if params.n <= 11 {
        for c in Case19_7::ALL {
            if *h < c.h_star() {
                best = best.min(c.numerator() / &nn);
            }
        }
    }
    Ok(best)
}

enum Formula {
    Num(Rational),
    LatticeInf,
    Unknown,
}

struct Row {
    lo: Rational,
    hi: Rational,
    point: bool,
    open_lo: bool,
    formula: Formula,
    min_n: usize,
    max_n: usize,
    status: Status,
}

fn rows() -> Vec<Row> {
    let r = |lo: Rational, hi: Rational, formula: Formula, min_n: usize, status: Status| Row {
        lo,
        hi,
        point: false,
        open_lo: false,
        formula,
        min_n,
        max_n: usize::MAX,
        status,
    };
    use Formula::*;
    use Status::*;
    let mut v = vec![
        r(int(0), int(1), Num(int(0)), 1, Proved),
        r(int(1), rat(3, 2), Num(int(2)), 2, Proved),
        r(rat(3, 2), rat(5, 3), Num(int(3)), 2, Proved),
        r(rat(5, 3), rat(7, 4), Num(int(4)), 3, Proved),
        r(rat(7, 4), rat(9, 5), Num(rat(9, 2)), 4, Proved),
        r(rat(9, 5), rat(11, 6), Num(int(5)), 5, Proved),
        r(rat(11, 6), rat(13, 7), Num(rat(26, 5)), 6, Proved),
        r(rat(13, 7), rat(15, 8), Num(rat(28, 5)), 7, Proved),
        r(rat(15, 8), rat(17, 9), Num(rat(17, 3)), 8, Proved),
        r(rat(17, 9), int(2), Num(int(6)), 5, Proved),
        r(int(2), rat(11, 5), Num(int(8)), 4, Proved),
        r(rat(11, 5), rat(7, 3), Num(int(9)), 4, Proved),
        r(rat(7, 3), rat(17, 7), Unknown, 5, Open),
        r(rat(17, 7), rat(5, 2), Num(int(11)), 5, UpperBound),
    ];
    v.push(Row { point: true, ..r(rat(5, 2), rat(5, 2), Num(rat(25, 2)), 6, UpperBound) });
    v.push(Row { open_lo: true, ..r(rat(5, 2), rat(8, 3), LatticeInf, 6, UpperBound) });
    let mut lo = rat(8, 3);
    for c in Case19_7::ALL {
        v.push(Row { max_n: 11, ..r(lo.clone(), c.h_star(), Num(c.numerator()), 6, UpperBound) });
        lo = c.h_star();
    }
    v.push(r(rat(19, 7), int(3), LatticeInf, 8, UpperBound));
    v
}

/// Best statement available for `v(2, 2, n, h)`: a proved value, a proved
/// upper bound, or (status `Open`) the best closed-form upper bound.
///
/// `n = 4` reads the full known table. Otherwise the row's validity range in
/// `n` must hold or the entry falls back to `Open`.
pub fn summary_table(h: &Rational, n: usize) -> Result<SummaryEntry> {
    let params = GameParams::two(n, h.clone())?;
    let entry = |value: Rational, status: Status, row: &str| Ok(SummaryEntry { value, status, row: row.to_string() });
    let nn = int((n * (n + 1)) as i64);
    if n == 4 {
        return entry(table_2_2_4(h)?, Status::Proved, "v(2,2,4,h) table");
    }
    let half = rat(n as i64 + 1, 2);
    if *h >= half {
        return entry(largeh_value(&params)?, Status::Proved, "[(n+1)/2, n]: floor(h)/n");
    }
    let fl = h.floor();
    if h.is_integer() && *h >= int(3) {
        return entry(searcher_integer_h_value(&params)?, Status::Proved, "integer h <= (n+1)/2: 2h^2/(n(n+1))");
    }
    if *h < int(3) {
        for row in rows() {
            let inside = if row.point {
                *h == row.lo
            } else if row.open_lo {
                *h > row.lo && *h < row.hi
            } else {
                *h >= row.lo && *h < row.hi
            };
            if !inside || n < row.min_n || n > row.max_n {
                continue;
            }
            let label = format!("[{}, {})", row.lo, row.hi);
            return match row.formula {
                Formula::Num(num) => entry(num / &nn, row.status, &label),
                Formula::LatticeInf => entry(lattice_inf(&params)?, row.status, &label),
                Formula::Unknown => entry(best_known_upper_bound(&params)?, Status::Open, &label),
            };
        }
    }
    let sq_over_floor = if fl.is_zero() { Rational::zero() } else { h * h / &fl };
    if *h > int(3) && n >= 6 && sq_over_floor <= half {
        return entry(bound_uniform_simplex(&params)?, Status::UpperBound, "(3, n/2 + O(1)]: 2h^2/(n(n+1))");
    }
    if !fl.is_zero() && sq_over_floor >= half {
        return entry(&fl / int(n as i64), Status::UpperBound, "(n+1)/2 <= h^2/floor(h): floor(h)/n");
    }
    entry(best_known_upper_bound(&params)?, Status::Open, "no matching row")
}
