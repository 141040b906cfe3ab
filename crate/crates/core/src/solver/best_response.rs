//! Exact searcher best response against a pair-form hider mixture.
//!
//! Before the first find the searcher learns nothing, so a pure strategy is
//! a fixed sequence of single-level digging steps; holes are exchangeable, so
//! the state is the multiset of hole levels. After a find at depth `y` the
//! other nut's location is fixed by the placement and nothing more is learned
//! until it turns up, so the rest of the plan is a budgeted choice of one
//! target per hole (a multiple-choice knapsack, solved on Pareto frontiers).
//!
//! Only depths in the mixture's support, plus 0 and 1, are ever worth digging
//! to. Masses are integers: weights are scaled by their common denominator,
//! placements by `n(n+1)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, AddAssign};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::caching::model::{Continuation, DigPlan, GameParams, HiderPairMix, Probe};
use crate::caching::payoff::pair_payoff;
use crate::error::{Error, Result};
use crate::exactnum::{lcm_denoms, Rational};

pub const MAX_HOLES: usize = 12;
pub const MAX_GRID: u32 = 8;
const MAX_LEVELS: usize = 31;

pub trait Mass: Clone + Ord + Zero + Add<Output = Self> + for<'a> AddAssign<&'a Self> {
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Mass for i128 {
    fn from_big(v: &BigInt) -> Self {
        v.to_i128().expect("caller checked the range")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Mass for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Debug)]
pub struct BestResponse {
    pub value: Rational,
    pub plan: DigPlan,
}

/// Whether every depth of `mix` has denominator at most `grid`.
pub fn on_grid(mix: &HiderPairMix, grid: u32) -> bool {
    mix.depths().iter().all(|d| d.denom() <= &BigInt::from(grid))
}

/// Best response with the tractability guards `n <= 12`, `grid <= 8` and
/// all mixture depths on the grid (denominators at most `grid`).
pub fn best_response_searcher(params: &GameParams, mix: &HiderPairMix, grid: u32) -> Result<BestResponse> {
    params.require_two()?;
    if params.n > MAX_HOLES || grid == 0 || grid > MAX_GRID {
        return Err(Error::Guard(format!("need n <= {MAX_HOLES} and 1 <= grid <= {MAX_GRID}")));
    }
    if !on_grid(mix, grid) {
        return Err(Error::Guard(format!("mixture depths are not all on the 1/{grid} Farey grid")));
    }
    best_response(params, mix)
}

/// Best response without the grid guard; the level count is still capped.
pub fn best_response(params: &GameParams, mix: &HiderPairMix) -> Result<BestResponse> {
    params.require_two()?;
    let model = Model::new(params, mix)?;
    let total = model.total_mass();
    let br = if total.bits() < 120 {
        Solver::<i128>::new(&model).run()
    } else {
        Solver::<BigInt>::new(&model).run()
    };
    let check = pair_payoff(params, mix, &br.plan)?;
    if check != br.value {
        return Err(Error::Guard(format!("plan evaluates to {check}, search claimed {}", br.value)));
    }
    Ok(br)
}

struct Model {
    n: usize,
    levels: Vec<Rational>,
    units: Vec<i64>,
    budget: i64,
    scale: BigInt,
    stacked: BigInt,
    same_hole: Vec<BigInt>,
    partners: Vec<BTreeMap<usize, BigInt>>,
}

impl Model {
    fn new(params: &GameParams, mix: &HiderPairMix) -> Result<Self> {
        let n = params.n;
        let mut levels = mix.depths();
        levels.push(Rational::zero());
        levels.push(Rational::one());
        levels.sort();
        levels.dedup();
        if levels.len() > MAX_LEVELS {
            return Err(Error::Guard(format!("{} distinct depths exceed the limit {MAX_LEVELS}", levels.len())));
        }
        let d = lcm_denoms(levels.iter().chain(std::iter::once(&params.h)));
        let to_units = |r: &Rational| -> Result<i64> {
            (r * Rational::from_integer(d.clone()))
                .floor()
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Guard("depth lattice too fine".into()))
        };
        let units = levels.iter().map(to_units).collect::<Result<Vec<_>>>()?;
        let budget = to_units(&params.h)?;
        let scale = lcm_denoms(mix.atoms.iter().map(|(_, w)| w));
        let idx = |r: &Rational| levels.binary_search(r).expect("depth is a level");
        let mut stacked = BigInt::zero();
        let mut same_hole = vec![BigInt::zero(); levels.len()];
        let mut partners = vec![BTreeMap::new(); levels.len()];
        for (p, w) in &mix.atoms {
            let m = (w * Rational::from_integer(scale.clone())).to_integer();
            if p.is_stacked() {
                stacked += &m * BigInt::from(n + 1);
                continue;
            }
            let (a, b) = (idx(&p.y1), idx(&p.y2));
            same_hole[a] += &m;
            same_hole[b] += &m;
            *partners[a].entry(b).or_insert_with(BigInt::zero) += &m;
            *partners[b].entry(a).or_insert_with(BigInt::zero) += &m;
        }
        Ok(Model { n, levels, units, budget, scale, stacked, same_hole, partners })
    }

    fn total_mass(&self) -> BigInt {
        &self.scale * BigInt::from(self.n * (self.n + 1))
    }

    fn top(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Sorted hole levels packed 5 bits per hole.
type Key = u64;

fn pack(levels: &[u8]) -> Key {
    levels.iter().fold(0, |acc, &l| (acc << 5) | l as u64)
}

#[derive(Clone)]
struct Choice {
    /// `(hole level, target level)` per dug other hole.
    others: Vec<(u8, u8)>,
    finish_found: bool,
}

struct Solver<'a, M: Mass> {
    m: &'a Model,
    stacked: M,
    same_hole: Vec<M>,
    partners: Vec<Vec<(usize, M)>>,
    memo: HashMap<Key, M>,
    cont_memo: HashMap<(Key, u8), M>,
}

impl<'a, M: Mass> Solver<'a, M> {
    fn new(m: &'a Model) -> Self {
        Solver {
            m,
            stacked: M::from_big(&m.stacked),
            same_hole: m.same_hole.iter().map(M::from_big).collect(),
            partners: m.partners.iter().map(|p| p.iter().map(|(k, v)| (*k, M::from_big(v))).collect()).collect(),
            memo: HashMap::new(),
            cont_memo: HashMap::new(),
        }
    }

    fn spent(&self, state: &[u8]) -> i64 {
        state.iter().map(|&l| self.m.units[l as usize]).sum()
    }

    /// Steps available from `state`: `(level, cost)` for each distinct level
    /// that can go one deeper within budget.
    fn moves(&self, state: &[u8]) -> Vec<(u8, i64)> {
        let spent = self.spent(state);
        let mut out = Vec::new();
        let mut prev = None;
        for &l in state {
            if Some(l) == prev || l as usize >= self.m.top() {
                prev = Some(l);
                continue;
            }
            prev = Some(l);
            let cost = self.m.units[l as usize + 1] - self.m.units[l as usize];
            if spent + cost <= self.m.budget {
                out.push((l, cost));
            }
        }
        out
    }

    fn advance(state: &[u8], l: u8) -> Vec<u8> {
        let mut s = state.to_vec();
        let pos = s.iter().rposition(|&x| x == l).expect("level present");
        s[pos] = l + 1;
        s.sort_unstable();
        s
    }

    fn others_after_find(state: &[u8], l: u8) -> Vec<u8> {
        let mut s = state.to_vec();
        let pos = s.iter().position(|&x| x == l).expect("level present");
        s.remove(pos);
        s
    }

    fn value(&mut self, state: &[u8]) -> M {
        let key = pack(state);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut best = M::zero();
        for (l, cost) in self.moves(state) {
            let v = self.step_gain(state, l, cost) + self.value(&Self::advance(state, l));
            if v > best {
                best = v;
            }
        }
        self.memo.insert(key, best.clone());
        best
    }

    /// Mass won by placements whose first nut turns up on this step.
    fn step_gain(&mut self, state: &[u8], l: u8, cost: i64) -> M {
        let y = l + 1;
        let others = Self::others_after_find(state, l);
        let left = self.m.budget - self.spent(state) - cost;
        let mut g = self.continuation(&others, y, left).0;
        if y as usize == self.m.top() {
            g += &self.stacked;
        }
        g
    }

    fn continuation(&mut self, others: &[u8], y: u8, left: i64) -> (M, Option<Choice>) {
        let key = (pack(others), y);
        if let Some(v) = self.cont_memo.get(&key) {
            return (v.clone(), None);
        }
        let (v, _) = self.knapsack(others, y, left, false);
        self.cont_memo.insert(key, v.clone());
        (v, None)
    }

    /// Best post-find digging; with `track`, also the argmax choice.
    fn knapsack(&self, others: &[u8], y: u8, left: i64, track: bool) -> (M, Choice) {
        let units = &self.m.units;
        // frontier entries: (cost, gain, choice), cost increasing, gain strictly increasing
        let mut front: Vec<(i64, M, Choice)> =
            vec![(0, M::zero(), Choice { others: Vec::new(), finish_found: false })];
        let mut items: Vec<(Option<u8>, Vec<(i64, M, u8)>)> = Vec::new();
        let sh = &self.same_hole[y as usize];
        if (y as usize) < self.m.top() && !sh.is_zero() {
            items.push((None, vec![(units[self.m.top()] - units[y as usize], sh.clone(), self.m.top() as u8)]));
        }
        for &l in others {
            let mut opts = Vec::new();
            let mut acc = M::zero();
            for (w, mass) in &self.partners[y as usize] {
                if *w as u8 <= l {
                    continue;
                }
                acc += mass;
                opts.push((units[*w] - units[l as usize], acc.clone(), *w as u8));
            }
            if !opts.is_empty() {
                items.push((Some(l), opts));
            }
        }
        for (hole, opts) in items {
            let mut next: Vec<(i64, M, Choice)> = Vec::with_capacity(front.len() * (opts.len() + 1));
            for (c, g, ch) in &front {
                next.push((*c, g.clone(), ch.clone()));
                for (oc, og, target) in &opts {
                    let nc = c + oc;
                    if nc > left {
                        continue;
                    }
                    let mut nch = if track { ch.clone() } else { Choice { others: Vec::new(), finish_found: false } };
                    if track {
                        match hole {
                            None => nch.finish_found = true,
                            Some(l) => nch.others.push((l, *target)),
                        }
                    }
                    next.push((nc, g.clone() + og.clone(), nch));
                }
            }
            next.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
            front.clear();
            for e in next {
                if front.last().is_none_or(|last| e.1 > last.1) {
                    front.push(e);
                }
            }
        }
        let (_, g, ch) = front.pop().expect("frontier keeps the empty choice");
        (g, ch)
    }

    fn run(mut self) -> BestResponse {
        let n = self.m.n;
        let start = vec![0u8; n];
        let best = self.value(&start);

        let mut holes = vec![0u8; n];
        let mut prefind = Vec::new();
        let mut table = BTreeMap::new();
        let mut state = start;
        let mut remaining = best.clone();
        while !remaining.is_zero() {
            let mut pick = None;
            for (l, cost) in self.moves(&state) {
                let gain = self.step_gain(&state, l, cost);
                let next = Self::advance(&state, l);
                let v = gain.clone() + self.value(&next);
                if v == remaining {
                    pick = Some((l, cost, next, v, gain));
                    break;
                }
            }
            let (l, cost, next, _, gain) = pick.expect("memoized optimum is reachable");
            let x = holes.iter().position(|&h| h == l).expect("a hole sits at this level");
            let y = l + 1;
            let probe_idx = prefind.len();
            prefind.push(Probe::new(x + 1, self.m.levels[y as usize].clone()));
            let others = Self::others_after_find(&state, l);
            let left = self.m.budget - self.spent(&state) - cost;
            let (_, choice) = self.knapsack(&others, y, left, true);
            let mut probes = Vec::new();
            if choice.finish_found {
                probes.push(Probe::new(x + 1, Rational::one()));
            }
            let mut used = vec![false; n];
            used[x] = true;
            for (lvl, target) in choice.others {
                let z = (0..n).find(|&z| !used[z] && holes[z] == lvl).expect("hole at this level");
                used[z] = true;
                probes.push(Probe::new(z + 1, self.m.levels[target as usize].clone()));
            }
            if !probes.is_empty() {
                table.insert((probe_idx, self.m.levels[y as usize].clone()), probes);
            }
            holes[x] = y;
            remaining = remaining_after(&remaining, &gain);
            state = next;
        }

        let denom = Rational::from_integer(self.m.total_mass());
        let value = Rational::from_integer(best.to_big()) / denom;
        BestResponse { value, plan: DigPlan { prefind, continuation: Continuation::Table(table) } }
    }
}

fn remaining_after<M: Mass>(total: &M, gain: &M) -> M {
    M::from_big(&(total.to_big() - gain.to_big()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caching::model::DepthPair;
    use crate::caching::strategies::{hider_5_2_strategy, hider_stacked};
    use crate::exactnum::{int, rat};

    fn half_half() -> HiderPairMix {
        HiderPairMix::pure(DepthPair::new(rat(1, 2), rat(1, 2)).unwrap())
    }

    #[test]
    fn full_budget_digs_everything() {
        let br = best_response_searcher(&GameParams::two(4, int(4)).unwrap(), &half_half(), 2).unwrap();
        assert_eq!(br.value, int(1));
    }

    #[test]
    fn beats_the_two_hole_plan() {
        let params = GameParams::two(4, int(2)).unwrap();
        let br = best_response_searcher(&params, &half_half(), 2).unwrap();
        assert!(br.value >= rat(3, 10));
        // four holes to 1/2 finds every split placement
        assert_eq!(br.value, rat(12, 20));
    }

    #[test]
    fn stacked_hider_caps_at_floor_h_over_n() {
        for (n, h) in [(4, rat(5, 2)), (5, int(3)), (6, rat(7, 4))] {
            let params = GameParams::two(n, h.clone()).unwrap();
            let br = best_response_searcher(&params, &hider_stacked(), 2).unwrap();
            assert_eq!(br.value, h.floor() / int(n as i64));
        }
    }

    #[test]
    fn five_halves_mixture_respects_its_bound() {
        let s = hider_5_2_strategy();
        let params = GameParams::two(5, rat(249, 100)).unwrap();
        let br = best_response_searcher(&params, &s.mix, 4).unwrap();
        assert!(br.value <= s.bound(5), "{}", br.value);
    }

    #[test]
    fn guards() {
        let params = GameParams::two(13, int(2)).unwrap();
        assert!(matches!(best_response_searcher(&params, &half_half(), 2), Err(Error::Guard(_))));
        let params = GameParams::two(4, int(2)).unwrap();
        assert!(best_response_searcher(&params, &half_half(), 9).is_err());
        let third = HiderPairMix::pure(DepthPair::new(rat(1, 3), rat(1, 3)).unwrap());
        assert!(best_response_searcher(&params, &third, 2).is_err());
        assert!(best_response_searcher(&params, &third, 3).is_ok());
    }
}
