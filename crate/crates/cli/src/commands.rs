use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_traits::One;

use lgl_core::caching::io::{parse_mix, write_mix, write_plan};
use lgl_core::caching::{
    hider_19_7_mixture, hider_5_2_strategy, hider_lattice_mix, hider_small_h_strategy, hider_stacked,
    summary_table, table_2_2_4_rows, Case19_7, GameParams, HiderPairMix, SmallH,
};
use lgl_core::exactnum::{parse_rational, to_f64, CoefficientMultiset};
use lgl_core::kr::{
    farey_interior, kr_check_conjecture, kr_conjectured_s_set, kr_probe_two_level, kr_scan, kr_uniform_value,
    KRInstance, ScanRecord,
};
use lgl_core::mms::{best_family, family_crossing, family_curve, mms_value, p_grid, Family};
use lgl_core::solver::best_response::best_response_searcher;
use lgl_core::solver::bracket::bracket;
use lgl_core::solver::lp::{parse_matrix, solve_matrix_game};
use lgl_core::solver::restricted::restricted_game_value;
use lgl_core::solver::sim::{simulate_double_limit, simulate_limit_game};
use lgl_core::Rational;

use crate::report::Report;

/// Exact rational flag: `p/q` or an integer, never a decimal.
pub fn exact_rational(s: &str) -> std::result::Result<Rational, String> {
    if s.contains(['.', 'e', 'E']) {
        return Err(format!("{s:?} is not an exact rational; write it as p/q"));
    }
    parse_rational(s).map_err(|e| e.to_string())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn decimal(r: &Rational) -> String {
    format!("{:.10}", to_f64(r))
}

// ---- mms ----

pub fn mms_curve(p_min: f64, p_max: f64, step: f64) -> Result<Report> {
    if !(p_min > 0.0 && p_min < p_max && p_max <= 0.5) {
        bail!("need 0 < p_min < p_max <= 1/2, got [{p_min}, {p_max}]");
    }
    let grid = p_grid(p_min, p_max, step)?;
    let mut cols = vec!["p", "best_family", "best_value"];
    cols.extend(Family::ALL.iter().map(|f| f.tag()));
    let mut r = Report::new(&cols);
    for p in grid {
        let (best, value) = best_family(p)?;
        let mut row = vec![format!("{p}"), best.to_string(), format!("{value:.10}")];
        for f in Family::ALL {
            row.push(format!("{:.10}", family_curve(f, p)?));
        }
        r.push(row);
    }
    Ok(r)
}

pub fn mms_eval(coeffs: Option<&str>, n: Option<u64>, k: Option<u64>, p: Option<f64>) -> Result<Report> {
    if let Some(p) = p {
        let (best, value) = best_family(p)?;
        let mut cols = vec!["p", "best_family", "best_value"];
        cols.extend(Family::ALL.iter().map(|f| f.tag()));
        let mut r = Report::new(&cols);
        let mut row = vec![format!("{p}"), best.to_string(), format!("{value:.10}")];
        for f in Family::ALL {
            row.push(format!("{:.10}", family_curve(f, p)?));
        }
        r.push(row);
        return Ok(r);
    }
    let k = k.ok_or_else(|| anyhow!("--k is required unless --p is given"))?;
    let values: Vec<Rational> = match (coeffs, n) {
        (Some(list), _) => list.split(',').map(|t| exact_rational(t).map_err(|e| anyhow!(e))).collect::<Result<_>>()?,
        (None, Some(n)) if n >= 1 => {
            let mut v = vec![Rational::from_integer((1 - n as i64).into())];
            v.extend(std::iter::repeat_n(Rational::one(), n as usize - 1));
            v
        }
        _ => bail!("give --coeffs or --n"),
    };
    let multiset = CoefficientMultiset::from_values(&values);
    let value = mms_value(&multiset, k)?;
    let n = multiset.n();
    let mut r = Report::new(&["n", "k", "coeffs", "value", "value_decimal", "conjectured"]);
    let conjectured = Rational::new((n - k.min(n)).into(), n.into());
    r.push(vec![n.to_string(), k.to_string(), join(&values), value.to_string(), decimal(&value), conjectured.to_string()]);
    Ok(r)
}

/// The crossings marked in the family-curve figure.
const FIGURE_CROSSINGS: [(Family, Family, f64, f64); 3] = [
    (Family::Neg1, Family::Pos3, 0.2, 0.34),
    (Family::Neg3, Family::Pos5, 0.35, 0.399),
    (Family::Neg5, Family::Pos2, 0.40, 0.43),
];

pub fn mms_cross(pair: Option<(Family, Family)>, lo: Option<f64>, hi: Option<f64>) -> Result<Report> {
    let jobs: Vec<(Family, Family, f64, f64)> = match pair {
        Some((a, b)) => vec![(a, b, lo.unwrap_or(0.01), hi.unwrap_or(0.5))],
        None => FIGURE_CROSSINGS.to_vec(),
    };
    let mut r = Report::new(&["f1", "f2", "lo", "hi", "p"]);
    for (a, b, lo, hi) in jobs {
        let p = family_crossing(a, b, lo, hi)?;
        r.push(vec![a.to_string(), b.to_string(), lo.to_string(), hi.to_string(), format!("{p:.9}")]);
    }
    Ok(r)
}

// ---- kr ----

/// `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
        let b: u64 = b.trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
        if a > b {
            bail!("empty range {s:?}");
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![s.trim().parse().with_context(|| format!("bad integer {s:?}"))?])
    }
}

const SCAN_COLUMNS: [&str; 6] = ["n", "k", "d", "s_star", "value", "in_conjectured_set"];

fn scan_row(rec: &ScanRecord) -> Vec<String> {
    vec![
        rec.n.to_string(),
        rec.k.to_string(),
        rec.d.to_string(),
        rec.s_star.to_string(),
        rec.value.to_string(),
        rec.in_conjectured_set.to_string(),
    ]
}

pub fn kr_scan_cmd(ns: &[u64], k: Option<u64>, d: Option<&Rational>, max_den: u64, strict: bool) -> Result<Report> {
    let ds = match d {
        Some(d) => vec![d.clone()],
        None => farey_interior(max_den),
    };
    let mut r = Report::new(&SCAN_COLUMNS);
    match k {
        Some(k) => {
            for &n in ns {
                for d in &ds {
                    let inst = KRInstance::with_strictness(n, k, d.clone(), strict)?;
                    let c = kr_check_conjecture(&inst)?;
                    r.push(scan_row(&ScanRecord {
                        n,
                        k,
                        d: d.clone(),
                        s_star: c.s_star,
                        value: c.witness_value,
                        in_conjectured_set: c.holds,
                    }));
                }
            }
        }
        None => {
            for rec in kr_scan(ns, &ds, strict)? {
                r.push(scan_row(&rec));
            }
        }
    }
    Ok(r)
}

pub fn kr_check_cmd(n: u64, k: u64, d: &Rational, strict: bool) -> Result<Report> {
    let inst = KRInstance::with_strictness(n, k, d.clone(), strict)?;
    let c = kr_check_conjecture(&inst)?;
    let set: Vec<u64> = kr_conjectured_s_set(&inst).into_iter().collect();
    let (bs, bv) = c.best_in_set.map_or((String::new(), String::new()), |(s, v)| (s.to_string(), v.to_string()));
    let mut r = Report::new(&["n", "k", "d", "s_star", "value", "holds", "best_in_set", "best_in_set_value", "conjectured_set"]);
    r.push(vec![
        n.to_string(),
        k.to_string(),
        d.to_string(),
        c.s_star.to_string(),
        c.witness_value.to_string(),
        c.holds.to_string(),
        bs,
        bv,
        join(&set),
    ]);
    Ok(r)
}

pub fn kr_probe_cmd(n: u64, k: u64, d: &Rational, s: u64, m2: Option<u64>, s2: Option<u64>, strict: bool) -> Result<Report> {
    let inst = KRInstance::with_strictness(n, k, d.clone(), strict)?;
    let value = match m2 {
        Some(m2) => kr_probe_two_level(&inst, s, m2)?,
        None => kr_uniform_value(&inst, s)?,
    };
    let mut cols = vec!["n", "k", "d", "s", "m2", "value", "value_decimal"];
    let mut row = vec![
        n.to_string(),
        k.to_string(),
        d.to_string(),
        s.to_string(),
        m2.unwrap_or(0).to_string(),
        value.to_string(),
        decimal(&value),
    ];
    if let Some(s2) = s2 {
        let other = kr_uniform_value(&inst, s2)?;
        let gap = &value - &other;
        cols.extend(["s2", "value2", "gap", "gap_decimal"]);
        row.extend([s2.to_string(), other.to_string(), gap.to_string(), format!("{:e}", to_f64(&gap))]);
    }
    let mut r = Report::new(&cols);
    r.push(row);
    Ok(r)
}

// ---- caching ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Representative {
    /// Midpoint of each interval.
    Mid,
    /// Left endpoint of each interval.
    Left,
}

pub fn caching_table(n: usize, grid: u32, at: Representative, h: Option<&Rational>) -> Result<Report> {
    let mut r = Report::new(&["interval", "h", "paper_value", "status", "computed_value", "match"]);
    for row in table_2_2_4_rows() {
        let rep = match (h, at) {
            (Some(h), _) if row.contains(h) => h.clone(),
            (Some(_), _) => continue,
            (None, Representative::Mid) => (&row.lo + &row.hi) / Rational::from_integer(2.into()),
            (None, Representative::Left) => row.lo.clone(),
        };
        if rep > Rational::from_integer(n.into()) {
            continue;
        }
        let params = GameParams::two(n, rep.clone())?;
        let computed = restricted_game_value(&params, grid)?.game.value;
        let paper = summary_table(&rep, n)?;
        let interval = if row.lo == row.hi { format!("{{{}}}", row.lo) } else { format!("[{}, {})", row.lo, row.hi) };
        let matched = computed == paper.value;
        r.push(vec![interval, rep.to_string(), paper.value.to_string(), paper.status.to_string(), computed.to_string(), matched.to_string()]);
    }
    if r.rows.is_empty() {
        bail!("no table interval applies");
    }
    Ok(r)
}

pub fn caching_value(n: usize, h: &Rational, grid: u32, mix_out: Option<&Path>) -> Result<Report> {
    let params = GameParams::two(n, h.clone())?;
    let g = restricted_game_value(&params, grid)?;
    g.game.certify()?;
    if let Some(path) = mix_out {
        fs::write(path, write_mix(&g.hider_mix())).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut r = Report::new(&["n", "h", "grid", "value", "value_decimal", "rows", "columns", "iterations"]);
    r.push(vec![
        n.to_string(),
        h.to_string(),
        grid.to_string(),
        g.game.value.to_string(),
        decimal(&g.game.value),
        g.rows.len().to_string(),
        g.cols.len().to_string(),
        g.iterations.to_string(),
    ]);
    Ok(r)
}

/// `stacked`, `hider_5_2`, `19_7:<h67_25|h51_19|h19_7>`, `lattice:<b>` or
/// `small_h:<nine_fifths|q>`.
pub fn named_strategy(name: &str) -> Result<HiderPairMix> {
    let (head, arg) = name.split_once(':').unwrap_or((name, ""));
    Ok(match head {
        "stacked" => hider_stacked(),
        "hider_5_2" => hider_5_2_strategy().mix,
        "19_7" => {
            let case = Case19_7::ALL
                .into_iter()
                .find(|c| c.tag() == arg)
                .ok_or_else(|| anyhow!("unknown case {arg:?}; use h67_25, h51_19 or h19_7"))?;
            hider_19_7_mixture(case).0
        }
        "lattice" => hider_lattice_mix(arg.parse().with_context(|| format!("bad lattice denominator {arg:?}"))?)?,
        "small_h" => hider_small_h_strategy(arg.parse::<SmallH>()?)?.0,
        _ => bail!("unknown strategy {name:?}"),
    })
}

pub fn caching_best_response(
    n: usize,
    h: &Rational,
    grid: u32,
    strategy: Option<&str>,
    mix_file: Option<&Path>,
    plan_out: Option<&Path>,
) -> Result<Report> {
    let (label, mix) = match (strategy, mix_file) {
        (Some(s), None) => (s.to_string(), named_strategy(s)?),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            (p.display().to_string(), parse_mix(&text)?)
        }
        _ => bail!("give exactly one of --strategy and --mix"),
    };
    let params = GameParams::two(n, h.clone())?;
    let br = best_response_searcher(&params, &mix, grid)?;
    if let Some(path) = plan_out {
        fs::write(path, write_plan(&br.plan)).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut r = Report::new(&["n", "h", "grid", "strategy", "value", "value_decimal", "value_times_n_n_plus_1"]);
    let scaled = &br.value * Rational::from_integer((n * (n + 1)).into());
    r.push(vec![n.to_string(), h.to_string(), grid.to_string(), label, br.value.to_string(), decimal(&br.value), scaled.to_string()]);
    Ok(r)
}

pub fn caching_bounds(n: usize, h: &Rational, grid: u32) -> Result<Report> {
    let b = bracket(n, h, grid)?;
    let s = summary_table(h, n)?;
    let mut r = Report::new(&[
        "n",
        "h",
        "grid",
        "lower",
        "lower_source",
        "value",
        "upper",
        "upper_source",
        "holds",
        "summary_value",
        "summary_status",
        "summary_row",
    ]);
    r.push(vec![
        n.to_string(),
        h.to_string(),
        grid.to_string(),
        b.lower.to_string(),
        b.lower_source.clone(),
        b.value.to_string(),
        b.upper.to_string(),
        b.upper_source.clone(),
        b.holds().to_string(),
        s.value.to_string(),
        s.status.to_string(),
        s.row,
    ]);
    Ok(r)
}

// ---- simulate ----

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn simulate_limit(k: usize, j: usize, lambda: f64, trials: u64, seed: u64) -> Result<Report> {
    let res = simulate_limit_game(k, j, lambda, trials, seed)?;
    // exact for j = k, the leading term of the double limit for j = k - 1
    let target = factorial(k) / lambda.powi(j as i32);
    let kind = if j == k { "exact" } else { "asymptotic" };
    let mut r = Report::new(&[
        "k", "j", "lambda", "trials", "seed", "wins", "estimate", "std_error", "target", "target_kind", "z",
    ]);
    r.push(vec![
        k.to_string(),
        j.to_string(),
        lambda.to_string(),
        trials.to_string(),
        seed.to_string(),
        res.wins.to_string(),
        format!("{:.8}", res.estimate),
        format!("{:.8}", res.std_error),
        format!("{target:.8}"),
        kind.to_string(),
        format!("{:.4}", res.z_score(target)),
    ]);
    Ok(r)
}

pub fn simulate_double(k: usize, j: usize, trials: u64, seed: u64) -> Result<Report> {
    let run = simulate_double_limit(k, j, trials, seed)?;
    let target = factorial(k);
    let mut r = Report::new(&["k", "j", "lambda", "trials", "seed", "estimate", "std_error", "scaled", "target"]);
    for (res, scaled) in &run.runs {
        r.push(vec![
            k.to_string(),
            j.to_string(),
            res.lambda.to_string(),
            res.trials.to_string(),
            res.seed.to_string(),
            format!("{:.8}", res.estimate),
            format!("{:.8}", res.std_error),
            format!("{scaled:.6}"),
            format!("{target}"),
        ]);
    }
    r.push(vec![
        k.to_string(),
        j.to_string(),
        "inf".into(),
        trials.to_string(),
        seed.to_string(),
        String::new(),
        String::new(),
        format!("{:.6}", run.extrapolated),
        format!("{target}"),
    ]);
    Ok(r)
}

// ---- game ----

pub fn game_solve(text: &str) -> Result<Report> {
    let payoff = parse_matrix(text)?;
    let game = solve_matrix_game(&payoff)?;
    game.certify()?;
    let mut r = Report::new(&["rows", "columns", "value", "value_decimal", "row_mix", "col_mix"]);
    r.push(vec![
        payoff.len().to_string(),
        payoff.first().map_or(0, Vec::len).to_string(),
        game.value.to_string(),
        decimal(&game.value),
        join(&game.row_mix),
        join(&game.col_mix),
    ]);
    Ok(r)
}

pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("LGL_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => {
            let t: usize = s.trim().parse().with_context(|| format!("LGL_THREADS={s:?} is not a count"))?;
            if t == 0 {
                bail!("LGL_THREADS must be positive");
            }
            Ok(Some(t))
        }
    }
}
