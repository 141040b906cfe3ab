//! Line-oriented text formats for mixtures, dig plans and value tables.
//!
//! Blank lines and `#` comments are ignored everywhere. All numbers are exact
//! rationals written as `p/q` or integers.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::caching::model::{Continuation, DepthPair, DigPlan, HiderPairMix, Probe};
use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, Rational};

pub const MIX_HEADER: &str = "hider-pair-mix v1";
pub const PLAN_HEADER: &str = "dig-plan v1";

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num(line: usize, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| perr(line, e.to_string()))
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, header: &str) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == header => Ok(()),
        Some((i, l)) => Err(perr(i, format!("expected header {header:?}, found {l:?}"))),
        None => Err(perr(0, format!("empty input, expected {header:?}"))),
    }
}

/// `y1 y2 weight` per line, e.g. `1/7 6/7 4/33`.
pub fn write_mix(mix: &HiderPairMix) -> String {
    let mut s = format!("{MIX_HEADER}\n");
    for (p, w) in &mix.atoms {
        writeln!(s, "{} {} {}", p.y1, p.y2, w).unwrap();
    }
    s
}

pub fn parse_mix(text: &str) -> Result<HiderPairMix> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, MIX_HEADER)?;
    let mut atoms = Vec::new();
    for (i, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(i, format!("expected `y1 y2 weight`, found {l:?}")));
        }
        let pair = DepthPair::new(num(i, f[0])?, num(i, f[1])?).map_err(|e| perr(i, e.to_string()))?;
        atoms.push((pair, num(i, f[2])?));
    }
    HiderPairMix::new(atoms).map_err(|e| perr(0, e.to_string()))
}

fn probe_list(probes: &[Probe]) -> String {
    probes.iter().map(|p| format!("{} {}", p.hole, p.target)).collect::<Vec<_>>().join(", ")
}

/// ```text
/// dig-plan v1
/// probe 1 1/2
/// probe 2 1
/// continuation table
/// on 0 1/2 -> 1 1, 3 1/2
/// ```
/// `on i y -> ...` lists the probes run after the first find at depth `y`
/// during prefind probe `i` (0-based). `continuation resume` has no `on`
/// lines.
pub fn write_plan(plan: &DigPlan) -> String {
    let mut s = format!("{PLAN_HEADER}\n");
    for p in &plan.prefind {
        writeln!(s, "probe {} {}", p.hole, p.target).unwrap();
    }
    match &plan.continuation {
        Continuation::Resume => s.push_str("continuation resume\n"),
        Continuation::Table(t) => {
            s.push_str("continuation table\n");
            for ((i, y), probes) in t {
                writeln!(s, "on {i} {y} -> {}", probe_list(probes)).unwrap();
            }
        }
    }
    s
}

fn parse_probe(i: usize, a: &str, b: &str) -> Result<Probe> {
    let hole = a.parse::<usize>().map_err(|_| perr(i, format!("bad hole {a:?}")))?;
    Ok(Probe::new(hole, num(i, b)?))
}

pub fn parse_plan(text: &str) -> Result<DigPlan> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, PLAN_HEADER)?;
    let mut prefind = Vec::new();
    let mut continuation = None;
    for (i, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        match f.as_slice() {
            ["probe", a, b] => {
                if continuation.is_some() {
                    return Err(perr(i, "probe after continuation"));
                }
                prefind.push(parse_probe(i, a, b)?);
            }
            ["continuation", "resume"] => continuation = Some(Continuation::Resume),
            ["continuation", "table"] => continuation = Some(Continuation::Table(BTreeMap::new())),
            ["on", idx, y, "->", ..] => {
                let Some(Continuation::Table(t)) = continuation.as_mut() else {
                    return Err(perr(i, "`on` line outside a table continuation"));
                };
                let idx = idx.parse::<usize>().map_err(|_| perr(i, format!("bad probe index {idx:?}")))?;
                let rest = l.split_once("->").map(|(_, r)| r).unwrap_or("");
                let mut probes = Vec::new();
                for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let g: Vec<&str> = part.split_whitespace().collect();
                    if g.len() != 2 {
                        return Err(perr(i, format!("expected `hole depth`, found {part:?}")));
                    }
                    probes.push(parse_probe(i, g[0], g[1])?);
                }
                if t.insert((idx, num(i, y)?), probes).is_some() {
                    return Err(perr(i, "duplicate continuation key"));
                }
            }
            _ => return Err(perr(i, format!("unrecognised line {l:?}"))),
        }
    }
    Ok(DigPlan { prefind, continuation: continuation.unwrap_or(Continuation::Resume) })
}

/// One step of a piecewise-constant value table: `value` on `[lo, hi)`, or
/// at the single point `lo` when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueTableRow {
    pub lo: Rational,
    pub hi: Rational,
    pub value: Rational,
}

impl ValueTableRow {
    pub fn contains(&self, h: &Rational) -> bool {
        if self.lo == self.hi {
            *h == self.lo
        } else {
            *h >= self.lo && *h < self.hi
        }
    }
}

pub fn parse_value_table(text: &str) -> Result<Vec<ValueTableRow>> {
    let mut out: Vec<ValueTableRow> = Vec::new();
    for (i, l) in content_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(i, format!("expected `lo hi value`, found {l:?}")));
        }
        let row = ValueTableRow { lo: num(i, f[0])?, hi: num(i, f[1])?, value: num(i, f[2])? };
        if row.hi < row.lo {
            return Err(perr(i, "hi below lo"));
        }
        if let Some(prev) = out.last() {
            if prev.hi != row.lo {
                return Err(perr(i, format!("gap or overlap after {}", prev.hi)));
            }
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caching::strategies::{hider_19_7_mixture, Case19_7};
    use crate::exactnum::{int, rat};

    #[test]
    fn mix_round_trip() {
        let (m, _) = hider_19_7_mixture(Case19_7::H19_7);
        let text = write_mix(&m);
        assert!(text.starts_with("hider-pair-mix v1\n"));
        assert!(text.contains("1/7 6/7 4/33"));
        assert_eq!(parse_mix(&text).unwrap(), m);
    }

    #[test]
    fn mix_errors_carry_line_numbers() {
        let err = parse_mix("hider-pair-mix v1\n1/2 1/2 1/2\n1/2 1/2 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(parse_mix("nope\n").is_err());
        assert!(parse_mix("hider-pair-mix v1\n1/2 1/2 1/2\n").is_err());
    }

    #[test]
    fn plan_round_trip() {
        let mut t = BTreeMap::new();
        t.insert((0, rat(1, 2)), vec![Probe::new(1, int(1)), Probe::new(3, rat(1, 2))]);
        t.insert((1, int(1)), vec![]);
        let plan = DigPlan {
            prefind: vec![Probe::new(1, rat(1, 2)), Probe::new(2, int(1))],
            continuation: Continuation::Table(t),
        };
        let text = write_plan(&plan);
        assert!(text.contains("on 0 1/2 -> 1 1, 3 1/2"));
        assert_eq!(parse_plan(&text).unwrap(), plan);
        let resume = DigPlan::resume(vec![Probe::new(2, rat(3, 4))]);
        assert_eq!(parse_plan(&write_plan(&resume)).unwrap(), resume);
    }

    #[test]
    fn table_rows_must_chain() {
        assert!(parse_value_table("0 1 0\n2 3 1\n").is_err());
        let rows = parse_value_table("0 1 0\n1 1 1/2 # closing point\n").unwrap();
        assert!(rows[1].contains(&int(1)));
        assert!(!rows[0].contains(&int(1)));
    }
}
