use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::exactnum::Rational;

/// `n` holes, `k` nuts hidden, `j` to find, total digging budget `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameParams {
    pub n: usize,
    pub k: usize,
    pub j: usize,
    pub h: Rational,
}

impl GameParams {
    pub fn new(n: usize, k: usize, j: usize, h: Rational) -> Result<Self> {
        if n == 0 || k == 0 || j == 0 {
            return domain("n, k and j must be positive");
        }
        if j > k {
            return domain(format!("j = {j} exceeds k = {k}"));
        }
        if h.is_negative() {
            return domain(format!("negative budget h = {h}"));
        }
        if h > Rational::from_integer(n.into()) {
            return domain(format!("h = {h} exceeds n = {n}"));
        }
        Ok(GameParams { n, k, j, h })
    }

    /// The two-nut game `k = j = 2`.
    pub fn two(n: usize, h: Rational) -> Result<Self> {
        Self::new(n, 2, 2, h)
    }

    pub(crate) fn require_two(&self) -> Result<()> {
        if self.k != 2 || self.j != 2 {
            return domain(format!("needs k = j = 2, got k = {}, j = {}", self.k, self.j));
        }
        Ok(())
    }
}

/// Depths of the two nuts of a pair-form placement, `y1 <= y2`,
/// `y1 + y2 <= 1`.
///
/// `(0, 1)` is the stacked placement: both nuts at depth 1 in one uniformly
/// random hole. Every other pair has `y1 > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepthPair {
    pub y1: Rational,
    pub y2: Rational,
    pub extremal: bool,
}

impl DepthPair {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        let (y1, y2) = if a <= b { (a, b) } else { (b, a) };
        let one = Rational::one();
        if y1.is_negative() || y2 > one {
            return domain(format!("depths ({y1}, {y2}) must lie in [0, 1]"));
        }
        let sum = &y1 + &y2;
        if sum > one {
            return domain(format!("depths ({y1}, {y2}) sum above 1"));
        }
        if y1.is_zero() && !y2.is_one() {
            return domain(format!("depth 0 is only allowed in the stacked pair (0, 1), got ({y1}, {y2})"));
        }
        Ok(DepthPair { extremal: sum == one, y1, y2 })
    }

    pub fn stacked() -> Self {
        DepthPair { y1: Rational::zero(), y2: Rational::one(), extremal: true }
    }

    pub fn is_stacked(&self) -> bool {
        self.y1.is_zero()
    }

    pub fn depths(&self) -> [&Rational; 2] {
        [&self.y1, &self.y2]
    }
}

impl fmt::Display for DepthPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.y1, self.y2)
    }
}

/// Finite mixture of pair-form placements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiderPairMix {
    pub atoms: Vec<(DepthPair, Rational)>,
}

impl HiderPairMix {
    /// Merges repeated pairs; rejects non-positive weights and weights not
    /// summing to exactly 1.
    pub fn new(atoms: Vec<(DepthPair, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<DepthPair, Rational> = BTreeMap::new();
        for (p, w) in atoms {
            if !w.is_positive() {
                return domain(format!("non-positive weight {w} on {p}"));
            }
            *merged.entry(p).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return domain(format!("weights sum to {total}, not 1"));
        }
        Ok(HiderPairMix { atoms: merged.into_iter().collect() })
    }

    pub fn pure(pair: DepthPair) -> Self {
        HiderPairMix { atoms: vec![(pair, Rational::one())] }
    }

    /// Distinct nut depths used by the mixture (stacked pairs contribute 1).
    pub fn depths(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for (p, _) in &self.atoms {
            if p.is_stacked() {
                out.push(Rational::one());
            } else {
                out.push(p.y1.clone());
                out.push(p.y2.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for HiderPairMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}:{w}")?;
        }
        Ok(())
    }
}

/// Dig `hole` (1-based) from its current level down to `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probe {
    pub hole: usize,
    pub target: Rational,
}

impl Probe {
    pub fn new(hole: usize, target: Rational) -> Self {
        Probe { hole, target }
    }
}

/// What the searcher does after the first find.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Continuation {
    /// Finish the interrupted probe, then the rest of the prefind sequence.
    Resume,
    /// Probes to run after the first nut turns up during prefind probe `i`
    /// at depth `y`, keyed by `(i, y)`. A missing key means stop.
    Table(BTreeMap<(usize, Rational), Vec<Probe>>),
}

/// Adaptive searcher pure strategy for the two-nut game.
///
/// Probes run in order; a probe stops early when it uncovers a nut. The
/// searcher learns nothing else before the first find, and the game ends
/// at the second, so this covers every pure strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigPlan {
    pub prefind: Vec<Probe>,
    pub continuation: Continuation,
}

impl DigPlan {
    pub fn empty() -> Self {
        DigPlan { prefind: Vec::new(), continuation: Continuation::Resume }
    }

    pub fn resume(prefind: Vec<Probe>) -> Self {
        DigPlan { prefind, continuation: Continuation::Resume }
    }

    /// Checks hole indices, strictly increasing targets per hole, and the
    /// budget on every branch.
    pub fn validate(&self, n: usize, h: &Rational) -> Result<()> {
        let mut levels = vec![Rational::zero(); n];
        let mut spent = Rational::zero();
        let mut starts = Vec::with_capacity(self.prefind.len());
        for (i, p) in self.prefind.iter().enumerate() {
            let lvl = level_of(&levels, p, n, i)?;
            if p.target > Rational::one() {
                return Err(Error::InvalidPlan(format!("probe {i} targets depth {} below 1", p.target)));
            }
            starts.push((lvl.clone(), spent.clone()));
            spent += &p.target - lvl;
            levels[p.hole - 1] = p.target.clone();
        }
        over_budget(&spent, h)?;
        if let Continuation::Table(table) = &self.continuation {
            for ((i, y), probes) in table {
                let Some(p) = self.prefind.get(*i) else {
                    return Err(Error::InvalidPlan(format!("continuation key refers to probe {i}")));
                };
                let (start, spent_before) = &starts[*i];
                if y <= start || *y > p.target {
                    return Err(Error::InvalidPlan(format!(
                        "find depth {y} outside probe {i} range ({start}, {}]",
                        p.target
                    )));
                }
                let mut lv = replay_levels(&self.prefind[..*i], n);
                lv[p.hole - 1] = y.clone();
                let mut cost = spent_before + (y - start);
                for (c, q) in probes.iter().enumerate() {
                    let lvl = level_of(&lv, q, n, c)?;
                    if q.target > Rational::one() {
                        return Err(Error::InvalidPlan(format!("continuation targets depth {} below 1", q.target)));
                    }
                    cost += &q.target - lvl;
                    lv[q.hole - 1] = q.target.clone();
                }
                over_budget(&cost, h)?;
            }
        }
        Ok(())
    }

    /// Total cost of the prefind sequence when nothing is found.
    pub fn prefind_cost(&self, n: usize) -> Rational {
        let mut levels = vec![Rational::zero(); n];
        let mut spent = Rational::zero();
        for p in &self.prefind {
            if p.hole >= 1 && p.hole <= n && p.target > levels[p.hole - 1] {
                spent += &p.target - &levels[p.hole - 1];
                levels[p.hole - 1] = p.target.clone();
            }
        }
        spent
    }
}

fn level_of<'a>(levels: &'a [Rational], p: &Probe, n: usize, i: usize) -> Result<&'a Rational> {
    if p.hole == 0 || p.hole > n {
        return Err(Error::InvalidPlan(format!("probe {i} names hole {} of {n}", p.hole)));
    }
    let lvl = &levels[p.hole - 1];
    if p.target <= *lvl {
        return Err(Error::InvalidPlan(format!(
            "probe {i} on hole {} targets {} but the hole is already at {lvl}",
            p.hole, p.target
        )));
    }
    Ok(lvl)
}

fn replay_levels(probes: &[Probe], n: usize) -> Vec<Rational> {
    let mut levels = vec![Rational::zero(); n];
    for p in probes {
        levels[p.hole - 1] = p.target.clone();
    }
    levels
}

fn over_budget(cost: &Rational, h: &Rational) -> Result<()> {
    if cost > h {
        return Err(Error::OverBudget { needed: cost.to_string(), budget: h.to_string() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn pairs_are_canonical() {
        let p = DepthPair::new(rat(3, 4), rat(1, 4)).unwrap();
        assert_eq!(p.y1, rat(1, 4));
        assert!(p.extremal);
        assert!(!DepthPair::new(rat(1, 4), rat(1, 4)).unwrap().extremal);
        assert!(DepthPair::new(rat(3, 4), rat(1, 2)).is_err());
        assert!(DepthPair::new(int(0), rat(1, 2)).is_err());
        assert_eq!(DepthPair::new(int(0), int(1)).unwrap(), DepthPair::stacked());
    }

    #[test]
    fn mix_weights_must_sum_to_one() {
        let p = DepthPair::new(rat(1, 2), rat(1, 2)).unwrap();
        assert!(HiderPairMix::new(vec![(p.clone(), rat(1, 2))]).is_err());
        let m = HiderPairMix::new(vec![(p.clone(), rat(1, 2)), (p, rat(1, 2))]).unwrap();
        assert_eq!(m.atoms.len(), 1);
    }

    #[test]
    fn budget_is_checked_on_every_branch() {
        let plan = DigPlan::resume(vec![Probe::new(1, int(1)), Probe::new(2, int(1))]);
        assert!(plan.validate(4, &int(2)).is_ok());
        assert!(matches!(plan.validate(4, &rat(3, 2)), Err(Error::OverBudget { .. })));

        let mut table = BTreeMap::new();
        table.insert((0, rat(1, 2)), vec![Probe::new(2, int(1)), Probe::new(3, int(1))]);
        let plan = DigPlan { prefind: vec![Probe::new(1, int(1))], continuation: Continuation::Table(table) };
        assert!(plan.validate(4, &rat(5, 2)).is_ok());
        assert!(plan.validate(4, &int(2)).is_err());
    }

    #[test]
    fn targets_must_increase() {
        let plan = DigPlan::resume(vec![Probe::new(1, rat(1, 2)), Probe::new(1, rat(1, 2))]);
        assert!(matches!(plan.validate(3, &int(3)), Err(Error::InvalidPlan(_))));
        let plan = DigPlan::resume(vec![Probe::new(5, rat(1, 2))]);
        assert!(plan.validate(3, &int(3)).is_err());
    }
}
