//! The two-nut caching game with hider depths restricted to a Farey grid.
//!
//! Every grid pair is a row from the start. Searcher columns are generated by
//! the exact best response to the current optimal hider mixture until it no
//! longer beats the LP value, so the searcher side is unrestricted.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::caching::model::{DepthPair, DigPlan, GameParams, HiderPairMix};
use crate::caching::payoff::win_units;
use crate::error::{Error, Result};
use crate::exactnum::{to_f64, Rational};
use crate::solver::best_response::{best_response, MAX_GRID};
use crate::solver::lp::{solve_matrix_game, solve_matrix_game_f64, MatrixGame};

pub const MAX_RESTRICTED_HOLES: usize = 6;
const SMOOTHING: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct RestrictedGame {
    pub rows: Vec<DepthPair>,
    pub cols: Vec<DigPlan>,
    pub game: MatrixGame,
    pub iterations: usize,
}

impl RestrictedGame {
    pub fn value(&self) -> &Rational {
        &self.game.value
    }

    /// The optimal hider mixture over the grid rows.
    pub fn hider_mix(&self) -> HiderPairMix {
        let atoms = self
            .rows
            .iter()
            .zip(&self.game.row_mix)
            .filter(|(_, w)| w.is_positive())
            .map(|(p, w)| (p.clone(), w.clone()))
            .collect();
        HiderPairMix::new(atoms).expect("LP mixture is a distribution")
    }
}

/// Fractions `p/q` in `(0, 1]` with `q <= g`, increasing.
pub fn farey_depths(g: u32) -> Vec<Rational> {
    let mut out: Vec<Rational> = (1..=g as i64)
        .flat_map(|q| (1..=q).filter(move |p| p.gcd(&q) == 1).map(move |p| Rational::new(p.into(), q.into())))
        .collect();
    out.sort();
    out
}

/// All pairs `y1 <= y2` from the Farey grid with `y1 + y2 <= 1`, followed by
/// the stacked placement.
pub fn grid_pairs(g: u32) -> Vec<DepthPair> {
    let depths = farey_depths(g);
    let mut out = Vec::new();
    for (i, a) in depths.iter().enumerate() {
        for b in &depths[i..] {
            if a + b <= Rational::one() {
                out.push(DepthPair::new(a.clone(), b.clone()).expect("grid pair is valid"));
            }
        }
    }
    out.push(DepthPair::stacked());
    out
}

fn column(params: &GameParams, rows: &[DepthPair], plan: &DigPlan) -> Vec<u64> {
    rows.iter().map(|r| win_units(plan, params.n, r)).collect()
}

/// Exact value of the grid-restricted game, with guards `n <= 6` and
/// `grid <= 8`.
pub fn restricted_game_value(params: &GameParams, grid: u32) -> Result<RestrictedGame> {
    params.require_two()?;
    if params.n > MAX_RESTRICTED_HOLES || grid == 0 || grid > MAX_GRID {
        return Err(Error::Guard(format!("need n <= {MAX_RESTRICTED_HOLES} and 1 <= grid <= {MAX_GRID}")));
    }
    let rows = grid_pairs(grid);
    restricted_game_over(params, rows)
}

/// Weights rounded to multiples of `1/2^24` and renormalized exactly.
fn rationalize(rows: &[DepthPair], weights: &[f64]) -> Option<HiderPairMix> {
    let scaled: Vec<i64> = weights.iter().map(|w| (w * (1u64 << 24) as f64).round() as i64).collect();
    let sum: i64 = scaled.iter().filter(|&&p| p > 0).sum();
    if sum == 0 {
        return None;
    }
    let atoms = rows
        .iter()
        .zip(&scaled)
        .filter(|(_, p)| **p > 0)
        .map(|(r, p)| (r.clone(), Rational::new((*p).into(), sum.into())))
        .collect();
    HiderPairMix::new(atoms).ok()
}

fn mix_of(rows: &[DepthPair], weights: &[Rational]) -> Result<HiderPairMix> {
    HiderPairMix::new(
        rows.iter().zip(weights).filter(|(_, w)| w.is_positive()).map(|(r, w)| (r.clone(), w.clone())).collect(),
    )
}

/// Column generation over an explicit row set: a floating-point phase picks
/// up most columns cheaply, then exact rounds run until the exact best
/// response no longer beats the exact LP value.
pub fn restricted_game_over(params: &GameParams, rows: Vec<DepthPair>) -> Result<RestrictedGame> {
    params.require_two()?;
    if rows.is_empty() {
        return Err(Error::Domain("no hider rows".into()));
    }
    let n = params.n;
    let total = (n * (n + 1)) as f64;
    let mut cols: Vec<DigPlan> = Vec::new();
    for r in &rows {
        let plan = best_response(params, &HiderPairMix::pure(r.clone()))?.plan;
        if !cols.contains(&plan) {
            cols.push(plan);
        }
    }
    let mut units: Vec<Vec<u64>> = cols.iter().map(|c| column(params, &rows, c)).collect();
    let mut iterations = 0;
    // smoothing center: the hider mix with the lowest best-response value so far
    let mut center: Option<(f64, Vec<f64>)> = None;
    loop {
        iterations += 1;
        let payoff: Vec<Vec<f64>> =
            (0..rows.len()).map(|i| units.iter().map(|c| c[i] as f64 / total).collect()).collect();
        let (v, mu, _) = solve_matrix_game_f64(&payoff);
        let against_mu = |plan_units: &[u64]| -> f64 {
            plan_units.iter().zip(&mu).map(|(u, w)| *u as f64 * w).sum::<f64>() / total
        };
        let mut queries = Vec::new();
        if let Some((_, c)) = &center {
            queries.push(c.iter().zip(&mu).map(|(a, b)| SMOOTHING * a + (1.0 - SMOOTHING) * b).collect::<Vec<_>>());
        }
        queries.push(mu.clone());
        let mut added = false;
        for q in queries {
            let Some(mix) = rationalize(&rows, &q) else { continue };
            let br = best_response(params, &mix)?;
            let ub = to_f64(&br.value);
            if center.as_ref().is_none_or(|(best, _)| ub < *best) {
                center = Some((ub, q));
            }
            let col = column(params, &rows, &br.plan);
            if against_mu(&col) > v + 1e-9 && !cols.contains(&br.plan) {
                units.push(col);
                cols.push(br.plan);
                added = true;
                break;
            }
        }
        if !added {
            break;
        }
    }
    let denom = Rational::from_integer(BigInt::from(n * (n + 1)));
    loop {
        iterations += 1;
        let payoff: Vec<Vec<Rational>> = (0..rows.len())
            .map(|i| units.iter().map(|c| Rational::from_integer(c[i].into()) / &denom).collect())
            .collect();
        let game = solve_matrix_game(&payoff)?;
        let br = best_response(params, &mix_of(&rows, &game.row_mix)?)?;
        if br.value <= game.value {
            return Ok(RestrictedGame { rows, cols, game, iterations });
        }
        units.push(column(params, &rows, &br.plan));
        cols.push(br.plan);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn farey_grid() {
        assert_eq!(farey_depths(3), vec![rat(1, 3), rat(1, 2), rat(2, 3), int(1)]);
        // (1/2, 1/2) and the stacked pair
        assert_eq!(grid_pairs(2).len(), 2);
        assert_eq!(grid_pairs(4).len(), 10);
    }

    #[test]
    fn small_table_entries() {
        let g = restricted_game_value(&GameParams::two(4, int(1)).unwrap(), 2).unwrap();
        assert_eq!(g.game.value, rat(1, 10));
        let g = restricted_game_value(&GameParams::two(4, int(2)).unwrap(), 4).unwrap();
        assert_eq!(g.game.value, rat(109, 264));
    }

    #[test]
    fn two_rows_of_the_half_grid_concede_one_half_at_h_2() {
        // holes 1 and 2 to 1/2, then both to 1; after a find at 1/2 the rest
        // of the budget goes to half-depth partners, or to the bottom of the
        // found hole once only one hole can still be reached
        let params = GameParams::two(4, int(2)).unwrap();
        let g = restricted_game_value(&params, 2).unwrap();
        assert_eq!(g.game.value, rat(1, 2));
        g.game.certify().unwrap();
    }

    #[test]
    fn guards() {
        assert!(restricted_game_value(&GameParams::two(7, int(2)).unwrap(), 2).is_err());
        assert!(restricted_game_value(&GameParams::two(4, int(2)).unwrap(), 9).is_err());
    }
}
