//! Exact win probability of a dig plan against pair-form hiders.
//!
//! A pair `(y1, y2)` is resolved into `n(n+1)` equally likely unit events:
//! `n(n-1)` ordered hole pairs `(a, b)` with nut depths `y1` at `a` and `y2`
//! at `b`, and two same-hole events per hole, `(x, y1), (x, 1)` and
//! `(x, y2), (x, 1)`. The stacked pair puts both nuts at depth 1 of one hole,
//! `n + 1` units per hole.

use num_traits::Zero;

use crate::caching::model::{Continuation, DepthPair, DigPlan, GameParams, HiderPairMix, Probe};
use crate::error::Result;
use crate::exactnum::Rational;

/// One placement: two nuts as `(hole, depth)` with 0-based holes, carrying
/// `units` out of `n(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementEvent {
    pub nuts: [(usize, Rational); 2],
    pub units: u64,
}

pub fn placement_events(pair: &DepthPair, n: usize) -> Vec<PlacementEvent> {
    let one = Rational::from_integer(1.into());
    let mut out = Vec::new();
    if pair.is_stacked() {
        for x in 0..n {
            out.push(PlacementEvent { nuts: [(x, one.clone()), (x, one.clone())], units: n as u64 + 1 });
        }
        return out;
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push(PlacementEvent { nuts: [(a, pair.y1.clone()), (b, pair.y2.clone())], units: 1 });
            }
        }
    }
    for x in 0..n {
        for y in pair.depths() {
            out.push(PlacementEvent { nuts: [(x, y.clone()), (x, one.clone())], units: 1 });
        }
    }
    out
}

struct Dig<'a> {
    levels: Vec<Rational>,
    found: [bool; 2],
    nuts: &'a [(usize, Rational); 2],
}

impl Dig<'_> {
    /// Digs toward `p.target`; stops at the first nut and returns its depth.
    fn probe(&mut self, p: &Probe) -> Option<Rational> {
        let hole = p.hole - 1;
        let lvl = &self.levels[hole];
        let hit = self
            .nuts
            .iter()
            .enumerate()
            .filter(|(i, (x, y))| !self.found[*i] && *x == hole && y > lvl && *y <= p.target)
            .map(|(_, (_, y))| y.clone())
            .min();
        match hit {
            Some(y) => {
                for (i, (x, d)) in self.nuts.iter().enumerate() {
                    if *x == hole && *d == y {
                        self.found[i] = true;
                    }
                }
                self.levels[hole] = y.clone();
                Some(y)
            }
            None => {
                self.levels[hole] = p.target.clone();
                None
            }
        }
    }

    fn done(&self) -> bool {
        self.found[0] && self.found[1]
    }
}

/// Whether `plan` finds both nuts of one placement. The plan is assumed valid.
pub fn plan_wins(plan: &DigPlan, n: usize, nuts: &[(usize, Rational); 2]) -> bool {
    let mut dig = Dig { levels: vec![Rational::zero(); n], found: [false; 2], nuts };
    for (i, p) in plan.prefind.iter().enumerate() {
        while let Some(y) = dig.probe(p) {
            if dig.done() {
                return true;
            }
            match &plan.continuation {
                Continuation::Resume => continue,
                Continuation::Table(table) => {
                    let Some(rest) = table.get(&(i, y)) else {
                        return false;
                    };
                    return rest.iter().any(|q| dig.probe(q).is_some());
                }
            }
        }
    }
    false
}

/// Units (out of `n(n+1)`) of placements of `pair` that `plan` wins.
pub fn win_units(plan: &DigPlan, n: usize, pair: &DepthPair) -> u64 {
    placement_events(pair, n)
        .iter()
        .filter(|e| plan_wins(plan, n, &e.nuts))
        .map(|e| e.units)
        .sum()
}

/// Exact probability that `plan` finds both nuts against `mix`.
pub fn pair_payoff(params: &GameParams, mix: &HiderPairMix, plan: &DigPlan) -> Result<Rational> {
    params.require_two()?;
    plan.validate(params.n, &params.h)?;
    let n = params.n;
    let total = Rational::from_integer(((n * (n + 1)) as u64).into());
    let mut acc = Rational::zero();
    for (pair, w) in &mix.atoms {
        let units = win_units(plan, n, pair);
        acc += w * Rational::from_integer(units.into());
    }
    Ok(acc / total)
}
