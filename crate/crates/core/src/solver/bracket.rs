//! Exact brackets around the grid-restricted value of the two-nut game:
//! explicit searcher strategies from below, best responses to explicit hider
//! mixtures from above.

use num_traits::{One, Zero};

use crate::caching::model::{GameParams, HiderPairMix};
use crate::caching::strategies::{
    hider_5_2_strategy, hider_lattice_mix, hider_small_h_strategy, hider_stacked, largeh_value,
    searcher_integer_h_value, SmallH,
};
use crate::error::Result;
use crate::exactnum::{int, Rational};
use crate::solver::best_response::{best_response_searcher, on_grid};
use crate::solver::restricted::restricted_game_value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub n: usize,
    pub h: Rational,
    pub lower: Rational,
    pub lower_source: String,
    pub value: Rational,
    pub upper: Rational,
    pub upper_source: String,
}

impl Bracket {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

/// Best lower bound from the integer-`h` and large-`h` searcher strategies.
pub fn searcher_lower_bound(params: &GameParams) -> Result<(Rational, String)> {
    let mut best = (Rational::zero(), "trivial".to_string());
    let floor = params.h.floor();
    let half = Rational::new((params.n as i64 + 1).into(), 2.into());
    if params.n >= 2 && floor >= Rational::one() && floor <= half {
        let p = GameParams::two(params.n, floor.clone())?;
        let v = searcher_integer_h_value(&p)?;
        if v > best.0 {
            best = (v, format!("integer_h({floor})"));
        }
    }
    if params.h >= half {
        let v = largeh_value(params)?;
        if v > best.0 {
            best = (v, "largeh".to_string());
        }
    }
    Ok(best)
}

/// Named hider mixtures whose depths all lie on the grid.
pub fn grid_hider_mixes(grid: u32) -> Vec<(String, HiderPairMix)> {
    let mut out = vec![("stacked".to_string(), hider_stacked()), ("hider_5_2".to_string(), hider_5_2_strategy().mix)];
    for sel in [SmallH::NineFifths, SmallH::Q(5), SmallH::Q(6), SmallH::Q(7), SmallH::Q(8), SmallH::Q(9)] {
        let (m, _) = hider_small_h_strategy(sel).expect("listed selectors are valid");
        let name = match sel {
            SmallH::NineFifths => "small_h(nine_fifths)".to_string(),
            SmallH::Q(q) => format!("small_h({q})"),
        };
        out.push((name, m));
    }
    for b in 2..=grid {
        out.push((format!("lattice({b})"), hider_lattice_mix(b).expect("b >= 2")));
    }
    out.retain(|(_, m)| on_grid(m, grid));
    out
}

/// Lowest best-response value over [`grid_hider_mixes`].
pub fn hider_upper_bound(params: &GameParams, grid: u32) -> Result<(Rational, String)> {
    let mut best = (int(1), "trivial".to_string());
    for (name, m) in grid_hider_mixes(grid) {
        let v = best_response_searcher(params, &m, grid)?.value;
        if v < best.0 {
            best = (v, name);
        }
    }
    Ok(best)
}

pub fn bracket(n: usize, h: &Rational, grid: u32) -> Result<Bracket> {
    let params = GameParams::two(n, h.clone())?;
    let (lower, lower_source) = searcher_lower_bound(&params)?;
    let (upper, upper_source) = hider_upper_bound(&params, grid)?;
    let value = restricted_game_value(&params, grid)?.game.value;
    Ok(Bracket { n, h: h.clone(), lower, lower_source, value, upper, upper_source })
}
