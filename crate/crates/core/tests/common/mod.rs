//! Independent dig simulator shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lgl_core::caching::{pair_payoff, Continuation, DepthPair, DigPlan, GameParams, HiderPairMix, Probe};
use lgl_core::exactnum::{int, rat, subset_sum_distribution, CoefficientMultiset};
use lgl_core::kr::{kr_general_value, KRInstance};
use lgl_core::mms::mms_value;
use lgl_core::solver::restricted::grid_pairs;
use lgl_core::Rational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Digging in cells of depth `1/CELLS`.
pub const CELLS: i64 = 840;

pub fn cells(r: &Rational) -> i64 {
    let c = r * int(CELLS);
    assert!(c.is_integer());
    c.to_integer().try_into().unwrap()
}

struct Sim {
    level: Vec<i64>,
    nuts: Vec<(usize, i64, bool)>,
}

impl Sim {
    /// Digs one cell at a time; returns the cell of the first nut uncovered.
    fn probe(&mut self, p: &Probe) -> Option<i64> {
        let hole = p.hole - 1;
        let target = cells(&p.target);
        while self.level[hole] < target {
            self.level[hole] += 1;
            let here = self.level[hole];
            let mut hit = false;
            for nut in &mut self.nuts {
                if nut.0 == hole && nut.1 == here && !nut.2 {
                    nut.2 = true;
                    hit = true;
                }
            }
            if hit {
                return Some(here);
            }
        }
        None
    }

    fn all_found(&self) -> bool {
        self.nuts.iter().all(|n| n.2)
    }
}

fn wins(plan: &DigPlan, n: usize, nuts: &[(usize, i64)]) -> bool {
    let mut sim = Sim { level: vec![0; n], nuts: nuts.iter().map(|&(x, y)| (x, y, false)).collect() };
    let mut i = 0;
    while i < plan.prefind.len() {
        let Some(y) = sim.probe(&plan.prefind[i]) else {
            i += 1;
            continue;
        };
        if sim.all_found() {
            return true;
        }
        match &plan.continuation {
            // keep digging the same probe
            Continuation::Resume => {}
            Continuation::Table(t) => {
                let Some(rest) = t.get(&(i, rat(y, CELLS))) else { return false };
                for q in rest {
                    if sim.probe(q).is_some() {
                        return true;
                    }
                }
                return false;
            }
        }
    }
    false
}

/// Hider chooses one of the `C(n+1, 2)` hole multisets uniformly, then one of
/// two depth assignments.
pub fn brute_payoff(n: usize, mix: &HiderPairMix, plan: &DigPlan) -> Rational {
    let choices = int((n * (n + 1) / 2) as i64);
    let mut acc = int(0);
    for (pair, w) in &mix.atoms {
        let (y1, y2) = (cells(&pair.y1), cells(&pair.y2));
        let mut won = int(0);
        if pair.is_stacked() {
            for x in 0..n {
                if wins(plan, n, &[(x, CELLS), (x, CELLS)]) {
                    won += rat(1, n as i64);
                }
            }
        } else {
            for a in 0..n {
                for b in a..n {
                    let options = if a == b {
                        [[(a, y1), (a, CELLS)], [(a, y2), (a, CELLS)]]
                    } else {
                        [[(a, y1), (b, y2)], [(a, y2), (b, y1)]]
                    };
                    for nuts in options {
                        if wins(plan, n, &nuts) {
                            won += rat(1, 2) / &choices;
                        }
                    }
                }
            }
        }
        acc += w * won;
    }
    acc
}

fn quarter(rng: &mut StdRng, above: &Rational) -> Option<Rational> {
    let lo = cells(above) / (CELLS / 4) + 1;
    (lo <= 4).then(|| rat(rng.random_range(lo..=4), 4))
}

/// A valid plan on the quarter grid: random prefind probes within budget and,
/// most of the time, a random continuation table.
pub fn random_plan(rng: &mut StdRng, n: usize, h: &Rational) -> DigPlan {
    let mut levels = vec![int(0); n];
    let mut spent = int(0);
    let mut prefind = Vec::new();
    for _ in 0..rng.random_range(1..=8) {
        let hole = rng.random_range(0..n);
        let Some(t) = quarter(rng, &levels[hole]) else { continue };
        let cost = &t - &levels[hole];
        if &spent + &cost > *h {
            continue;
        }
        spent += cost;
        levels[hole] = t.clone();
        prefind.push(Probe::new(hole + 1, t));
    }
    if rng.random_bool(0.4) {
        return DigPlan::resume(prefind);
    }
    let mut table = BTreeMap::new();
    let mut levels = vec![int(0); n];
    let mut spent = int(0);
    for (i, p) in prefind.iter().enumerate() {
        let start = levels[p.hole - 1].clone();
        let mut y = start.clone() + rat(1, 4);
        while y <= p.target {
            if rng.random_bool(0.7) {
                let mut lv = levels.clone();
                lv[p.hole - 1] = y.clone();
                let mut cost = &spent + &y - &start;
                let mut rest = Vec::new();
                for _ in 0..rng.random_range(0..=3) {
                    let hole = rng.random_range(0..n);
                    let Some(t) = quarter(rng, &lv[hole]) else { continue };
                    if &cost + &t - &lv[hole] > *h {
                        continue;
                    }
                    cost += &t - &lv[hole];
                    lv[hole] = t.clone();
                    rest.push(Probe::new(hole + 1, t));
                }
                table.insert((i, y.clone()), rest);
            }
            y += rat(1, 4);
        }
        spent += &p.target - &start;
        levels[p.hole - 1] = p.target.clone();
    }
    DigPlan { prefind, continuation: Continuation::Table(table) }
}

/// Random weights on a random subset of the quarter-grid pairs.
pub fn random_mix(rng: &mut StdRng) -> HiderPairMix {
    let pairs: Vec<DepthPair> = grid_pairs(4);
    let mut atoms = Vec::new();
    for p in &pairs {
        if rng.random_bool(0.4) {
            atoms.push((p.clone(), int(rng.random_range(1..=5))));
        }
    }
    if atoms.is_empty() {
        atoms.push((pairs[rng.random_range(0..pairs.len())].clone(), int(1)));
    }
    let total: Rational = atoms.iter().map(|(_, w)| w.clone()).sum();
    HiderPairMix::new(atoms.into_iter().map(|(p, w)| (p, w / &total)).collect()).unwrap()
}

/// Index sets of size `k` out of `0..n`, by bitmask.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).filter(move |m| m.count_ones() as usize == k).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

pub fn subset_sums(values: &[Rational], k: usize) -> Vec<Rational> {
    subsets(values.len(), k).map(|s| s.iter().map(|&i| values[i].clone()).sum()).collect()
}

fn random_values(rng: &mut StdRng, n: usize, lo: i64, hi: i64) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.random_range(lo..=hi), rng.random_range(1..=4))).collect()
}

/// Each oracle check runs `instances` random cases and stops at the first
/// disagreement.
pub type Check = Result<(), String>;

pub fn check_subset_sum_distribution(instances: usize, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.random_range(1..=10);
        let k = rng.random_range(0..=n);
        let values = random_values(&mut rng, n, -3, 3);
        let sums = subset_sums(&values, k);
        let total = int(sums.len() as i64);
        let mut expected: BTreeMap<Rational, Rational> = BTreeMap::new();
        for s in sums {
            *expected.entry(s).or_insert_with(|| int(0)) += int(1) / &total;
        }
        let got = subset_sum_distribution(&CoefficientMultiset::from_values(&values), k as u64).unwrap();
        if got.support != expected.into_iter().collect::<Vec<_>>() {
            return Err(format!("subset sums differ for {values:?}, k = {k}"));
        }
    }
    Ok(())
}

pub fn check_mms_value(instances: usize, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.random_range(1..=10);
        let k = rng.random_range(1..=n);
        let mut values = random_values(&mut rng, n, -4, 4);
        // shift to sum zero
        let mean: Rational = values.iter().cloned().sum::<Rational>() / int(n as i64);
        for v in &mut values {
            *v -= &mean;
        }
        let sums = subset_sums(&values, k);
        let wins = sums.iter().filter(|s| **s > int(0)).count();
        let expected = rat(wins as i64, sums.len() as i64);
        let got = mms_value(&CoefficientMultiset::from_values(&values), k as u64).unwrap();
        if got != expected {
            return Err(format!("mms_value {got} != {expected} for {values:?}, k = {k}"));
        }
    }
    Ok(())
}

pub fn check_kr_general_value(instances: usize, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.random_range(1..=10);
        let k = rng.random_range(1..=n);
        let mut raw: Vec<i64> = (0..n).map(|_| rng.random_range(0..=5)).collect();
        if raw.iter().all(|&x| x == 0) {
            raw[0] = 1;
        }
        let total: i64 = raw.iter().sum();
        let values: Vec<Rational> = raw.iter().map(|&x| rat(x, total)).collect();
        let den = rng.random_range(2..=12);
        let d = rat(rng.random_range(1..den), den);
        let strict = rng.random_bool(0.5);
        let sums = subset_sums(&values, k);
        let wins = sums.iter().filter(|s| if strict { **s > d } else { **s >= d }).count();
        let expected = rat(wins as i64, sums.len() as i64);
        let inst = KRInstance::with_strictness(n as u64, k as u64, d.clone(), strict).unwrap();
        let got = kr_general_value(&inst, &CoefficientMultiset::from_values(&values)).unwrap();
        if got != expected {
            return Err(format!("kr_general_value {got} != {expected} for {values:?}, k = {k}, d = {d}, strict = {strict}"));
        }
    }
    Ok(())
}

/// Also requires a quarter of the cases to have a positive payoff, so the
/// comparison is not vacuous.
pub fn check_pair_payoff(instances: usize, seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut nonzero = 0;
    for _ in 0..instances {
        let n = rng.random_range(1..=4);
        let h = rat(rng.random_range(1..=4 * n as i64), 4);
        let params = GameParams::two(n, h.clone()).unwrap();
        let plan = random_plan(&mut rng, n, &h);
        plan.validate(n, &h).map_err(|e| e.to_string())?;
        let mix = random_mix(&mut rng);
        let got = pair_payoff(&params, &mix, &plan).unwrap();
        let expected = brute_payoff(n, &mix, &plan);
        if got != expected {
            return Err(format!("pair_payoff {got} != {expected} for n = {n}, h = {h}, plan = {plan:?}, mix = {mix:?}"));
        }
        if got > int(0) {
            nonzero += 1;
        }
    }
    if nonzero < instances / 4 {
        return Err(format!("only {nonzero} of {instances} cases had a positive payoff"));
    }
    Ok(())
}
