//! Exact zero-sum matrix games.
//!
//! Rows are the minimizing player (the hider), columns the maximizing player
//! (the searcher); entries are the searcher's payoff.

use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, to_f64, Rational};

/// A solved matrix game with its optimal mixed strategies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGame {
    pub payoff: Vec<Vec<Rational>>,
    pub value: Rational,
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
}

impl MatrixGame {
    /// Exact zero-gap certificate: no column beats `value` against
    /// `row_mix`, and no row holds `col_mix` below `value`.
    pub fn certify(&self) -> Result<()> {
        check_mix(&self.row_mix, self.payoff.len(), "row")?;
        let cols = self.payoff.first().map_or(0, Vec::len);
        check_mix(&self.col_mix, cols, "column")?;
        let best_col = col_values(&self.payoff, &self.row_mix).into_iter().max();
        let worst_row = row_values(&self.payoff, &self.col_mix).into_iter().min();
        match (best_col, worst_row) {
            (Some(hi), Some(lo)) if hi == self.value && lo == self.value => Ok(()),
            (hi, lo) => Err(Error::Guard(format!(
                "certificate failed: value {}, best column {hi:?}, worst row {lo:?}",
                self.value
            ))),
        }
    }

    /// `rows cols` header, then one line of entries per row.
    pub fn to_text(&self) -> String {
        write_matrix(&self.payoff)
    }
}

fn check_mix(mix: &[Rational], len: usize, what: &str) -> Result<()> {
    if mix.len() != len || mix.iter().any(|p| p.is_negative()) || mix.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::Guard(format!("{what} mix is not a probability vector")));
    }
    Ok(())
}

/// `(mu^T A)_j` for every column.
pub fn col_values(a: &[Vec<Rational>], mu: &[Rational]) -> Vec<Rational> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().zip(mu).filter(|(_, p)| !p.is_zero()).map(|(r, p)| &r[j] * p).sum())
        .collect()
}

/// `(A y)_i` for every row.
pub fn row_values(a: &[Vec<Rational>], y: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|r| r.iter().zip(y).filter(|(_, q)| !q.is_zero()).map(|(v, q)| v * q).sum())
        .collect()
}

pub fn write_matrix(a: &[Vec<Rational>]) -> String {
    let cols = a.first().map_or(0, Vec::len);
    let mut s = format!("{} {}\n", a.len(), cols);
    for r in a {
        let line: Vec<String> = r.iter().map(ToString::to_string).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split('#').next().unwrap_or("").split_whitespace().map(move |t| (i + 1, t)));
    let mut dim = |what: &str| -> Result<usize> {
        let (line, t) = tokens.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("missing {what}") })?;
        t.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} {t:?}") })
    };
    let (m, c) = (dim("row count")?, dim("column count")?);
    let mut out = vec![Vec::with_capacity(c); m];
    for row in out.iter_mut() {
        for _ in 0..c {
            let (line, t) = tokens.next().ok_or_else(|| Error::Parse { line: 0, msg: "too few entries".into() })?;
            row.push(parse_rational(t).map_err(|e| Error::Parse { line, msg: e.to_string() })?);
        }
    }
    if let Some((line, _)) = tokens.next() {
        return Err(Error::Parse { line, msg: "too many entries".into() });
    }
    Ok(out)
}

const DEGENERATE_RUN: usize = 64;
const GROW: usize = 8;

/// Dense simplex tableau for `max 1.u  s.t.  M u <= 1, u >= 0` with `M > 0`.
struct Tableau {
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    obj: Vec<Rational>,
    obj_value: Rational,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(a: &[Vec<Rational>]) -> Self {
        let m = a.len();
        let c = a[0].len();
        let t = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let mut obj = vec![Rational::one(); c];
        obj.extend(std::iter::repeat_n(Rational::zero(), m));
        Tableau { t, rhs: vec![Rational::one(); m], obj, obj_value: Rational::zero(), basis: (c..c + m).collect() }
    }

    /// Largest reduced cost enters; after a run of degenerate pivots the
    /// rule switches to Bland's for the rest of the solve, which rules out
    /// cycling.
    fn solve(&mut self) {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let enter = if bland {
                self.obj.iter().position(|d| d.is_positive())
            } else {
                self.obj
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.is_positive())
                    .fold(None::<(usize, &Rational)>, |best, (j, d)| match best {
                        Some((_, b)) if b >= d => best,
                        _ => Some((j, d)),
                    })
                    .map(|(j, _)| j)
            };
            let Some(enter) = enter else { break };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (r, ratio) = leave.expect("positive matrix keeps the LP bounded");
            if ratio.is_zero() {
                degenerate += 1;
                bland |= degenerate > DEGENERATE_RUN;
            } else {
                degenerate = 0;
            }
            self.pivot(r, enter);
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.t[r][col].clone();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.rhs[r] /= &p;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][col].is_zero() {
                continue;
            }
            let f = self.t[i][col].clone();
            for (v, pv) in self.t[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.obj[col].clone();
        for (v, pv) in self.obj.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
        self.obj_value += &f * &prhs;
        self.basis[r] = col;
    }
}

/// Exact value and optimal mixed strategies of a zero-sum matrix game.
///
/// A floating-point solve proposes supports; the subgame on them is solved
/// by a rational simplex and checked against the whole matrix, and the most
/// violating rows and columns are added until the exact certificate holds.
pub fn solve_matrix_game(payoff: &[Vec<Rational>]) -> Result<MatrixGame> {
    let m = payoff.len();
    let c = payoff.first().map_or(0, Vec::len);
    if m == 0 || c == 0 || payoff.iter().any(|r| r.len() != c) {
        return Err(Error::Domain("payoff must be a nonempty rectangular matrix".into()));
    }
    let approx: Vec<Vec<f64>> = payoff.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let (_, guess_rows, guess_cols) = solve_matrix_game_f64(&approx);
    let support = |mix: &[f64]| -> Vec<usize> {
        let s: Vec<usize> = (0..mix.len()).filter(|&i| mix[i] > 1e-9).collect();
        if s.is_empty() { (0..mix.len()).collect() } else { s }
    };
    let (mut rs, mut cs) = (support(&guess_rows), support(&guess_cols));
    loop {
        let sub: Vec<Vec<Rational>> = rs.iter().map(|&i| cs.iter().map(|&j| payoff[i][j].clone()).collect()).collect();
        let sub_shift = Rational::one() - sub.iter().flatten().min().expect("nonempty");
        let g = simplex_game(&sub, &sub_shift)?;
        let mut row_mix = vec![Rational::zero(); m];
        rs.iter().zip(&g.row_mix).for_each(|(&i, p)| row_mix[i] = p.clone());
        let mut col_mix = vec![Rational::zero(); c];
        cs.iter().zip(&g.col_mix).for_each(|(&j, p)| col_mix[j] = p.clone());
        let game = MatrixGame { payoff: payoff.to_vec(), value: g.value, row_mix, col_mix };
        let mut cols: Vec<(Rational, usize)> = col_values(payoff, &game.row_mix)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v > game.value)
            .map(|(j, v)| (v, j))
            .collect();
        let mut rows: Vec<(Rational, usize)> = row_values(payoff, &game.col_mix)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v < game.value)
            .map(|(i, v)| (v, i))
            .collect();
        if cols.is_empty() && rows.is_empty() {
            game.certify()?;
            return Ok(game);
        }
        cols.sort_by(|a, b| b.cmp(a));
        rows.sort();
        cs.extend(cols.iter().take(GROW).map(|(_, j)| *j));
        rs.extend(rows.iter().take(GROW).map(|(_, i)| *i));
        cs.sort_unstable();
        rs.sort_unstable();
    }
}

fn simplex_game(payoff: &[Vec<Rational>], shift: &Rational) -> Result<MatrixGame> {
    let m = payoff.len();
    let c = payoff[0].len();
    // hider LP: max 1.u  s.t.  (A + shift)^T u <= 1; column duals give the searcher
    let shifted: Vec<Vec<Rational>> =
        (0..c).map(|j| (0..m).map(|i| &payoff[i][j] + shift).collect()).collect();
    let mut tab = Tableau::new(&shifted);
    tab.solve();
    let total = tab.obj_value.clone();
    let mut row_mix = vec![Rational::zero(); m];
    for (k, &b) in tab.basis.iter().enumerate() {
        if b < m {
            row_mix[b] = &tab.rhs[k] / &total;
        }
    }
    let col_mix: Vec<Rational> = (0..c).map(|j| -&tab.obj[m + j] / &total).collect();
    let value = Rational::one() / &total - shift;
    let game = MatrixGame { payoff: payoff.to_vec(), value, row_mix, col_mix };
    game.certify()?;
    Ok(game)
}

/// Approximate value and mixes in floating point, same conventions as
/// [`solve_matrix_game`]. Used to steer column generation; never certified.
pub fn solve_matrix_game_f64(payoff: &[Vec<f64>]) -> (f64, Vec<f64>, Vec<f64>) {
    const EPS: f64 = 1e-11;
    let m = payoff.len();
    let c = payoff[0].len();
    let min = payoff.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let width = m + c;
    let mut t: Vec<Vec<f64>> = (0..c)
        .map(|j| {
            let mut row: Vec<f64> = (0..m).map(|i| payoff[i][j] + shift).collect();
            row.extend((0..c).map(|k| if k == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    // distinct right-hand sides keep the float pivots away from degenerate ties
    let mut rhs: Vec<f64> = (0..c).map(|j| 1.0 + 1e-7 * (j + 1) as f64 / c as f64).collect();
    let mut obj: Vec<f64> = (0..width).map(|j| if j < m { 1.0 } else { 0.0 }).collect();
    let mut total = 0.0;
    let mut basis: Vec<usize> = (m..width).collect();
    let mut degenerate = 0usize;
    for _ in 0..100 * width {
        let enter = if degenerate > DEGENERATE_RUN {
            obj.iter().position(|&d| d > EPS)
        } else {
            let (j, d) = obj.iter().enumerate().fold((0, 0.0), |b, (j, &d)| if d > b.1 { (j, d) } else { b });
            (d > EPS).then_some(j)
        };
        let Some(enter) = enter else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..c {
            if t[i][enter] > EPS {
                let ratio = rhs[i] / t[i][enter];
                if leave.is_none_or(|(li, lr)| ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li])) {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, ratio)) = leave else { break };
        degenerate = if ratio <= EPS { degenerate + 1 } else { 0 };
        let p = t[r][enter];
        t[r].iter_mut().for_each(|v| *v /= p);
        rhs[r] /= p;
        let prow = t[r].clone();
        for i in 0..c {
            if i != r && t[i][enter] != 0.0 {
                let f = t[i][enter];
                t[i].iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
                rhs[i] -= f * rhs[r];
            }
        }
        let f = obj[enter];
        obj.iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
        total += f * rhs[r];
        basis[r] = enter;
    }
    let mut row_mix = vec![0.0; m];
    for (k, &b) in basis.iter().enumerate() {
        if b < m {
            row_mix[b] = rhs[k].max(0.0);
        }
    }
    let mut col_mix: Vec<f64> = (0..c).map(|j| (-obj[m + j]).max(0.0)).collect();
    for mix in [&mut row_mix, &mut col_mix] {
        let s: f64 = mix.iter().sum();
        if s > 0.0 {
            mix.iter_mut().for_each(|p| *p /= s);
        }
    }
    (1.0 / total - shift, row_mix, col_mix)
}
