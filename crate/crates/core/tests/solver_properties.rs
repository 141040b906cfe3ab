mod common;

use common::{brute_payoff, random_mix, random_plan};
use lgl_core::caching::{hider_19_7_mixture, pair_payoff, Case19_7, GameParams};
use lgl_core::exactnum::{int, rat, to_f64};
use lgl_core::solver::best_response::best_response_searcher;
use lgl_core::solver::lp::solve_matrix_game;
use lgl_core::solver::restricted::restricted_game_value;
use lgl_core::Rational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Brown–Robinson fictitious play with the row player minimizing. Returns
/// the lower and upper security levels of the empirical mixtures.
fn fictitious_play(a: &[Vec<f64>], rounds: usize) -> (f64, f64) {
    let (m, n) = (a.len(), a[0].len());
    let mut row_counts = vec![0u64; m];
    let mut col_counts = vec![0u64; n];
    // cumulative payoff of each row against the column history and vice versa
    let mut row_acc = vec![0.0; m];
    let mut col_acc = vec![0.0; n];
    let (mut r, mut c) = (0, 0);
    for _ in 0..rounds {
        row_counts[r] += 1;
        col_counts[c] += 1;
        for j in 0..n {
            col_acc[j] += a[r][j];
        }
        for (i, acc) in row_acc.iter_mut().enumerate() {
            *acc += a[i][c];
        }
        r = (0..m).min_by(|&x, &y| row_acc[x].total_cmp(&row_acc[y])).unwrap();
        c = (0..n).max_by(|&x, &y| col_acc[x].total_cmp(&col_acc[y])).unwrap();
    }
    let t = rounds as f64;
    let upper = (0..n).map(|j| (0..m).map(|i| row_counts[i] as f64 * a[i][j]).sum::<f64>() / t).fold(f64::MIN, f64::max);
    let lower = (0..m).map(|i| (0..n).map(|j| col_counts[j] as f64 * a[i][j]).sum::<f64>() / t).fold(f64::MAX, f64::min);
    (lower, upper)
}

#[test]
fn three_by_three_agrees_with_fictitious_play() {
    let a = [[3, -1, -3], [-2, 4, -1], [-5, -6, 2]];
    let exact: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let game = solve_matrix_game(&exact).unwrap();
    game.certify().unwrap();
    let float: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let (lo, hi) = fictitious_play(&float, 2_000_000);
    let v = to_f64(&game.value);
    assert!(lo - 1e-9 <= v && v <= hi + 1e-9, "value {v} outside [{lo}, {hi}]");
    assert!(hi - lo < 1e-2, "fictitious play gap {}", hi - lo);
}

#[test]
fn best_response_dominates_random_plans() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..60 {
        let n = rng.random_range(1..=4);
        let h = rat(rng.random_range(1..=4 * n as i64), 4);
        let params = GameParams::two(n, h.clone()).unwrap();
        let mix = random_mix(&mut rng);
        let br = best_response_searcher(&params, &mix, 4).unwrap();
        assert_eq!(br.value, brute_payoff(n, &mix, &br.plan), "n={n} h={h}");
        for _ in 0..20 {
            let plan = random_plan(&mut rng, n, &h);
            assert!(pair_payoff(&params, &mix, &plan).unwrap() <= br.value, "n={n} h={h} plan={plan:?}");
        }
    }
}

#[test]
fn finer_grids_never_help_the_searcher() {
    for h in [int(1), rat(7, 4), int(2), rat(5, 2)] {
        let params = GameParams::two(4, h.clone()).unwrap();
        let values: Vec<Rational> =
            [2, 4, 8].iter().map(|&g| restricted_game_value(&params, g).unwrap().game.value).collect();
        assert!(values[0] >= values[1] && values[1] >= values[2], "h={h}: {values:?}");
    }
}

#[test]
fn eighth_grid_reaches_nine_fortieths() {
    let g = restricted_game_value(&GameParams::two(4, rat(7, 4)).unwrap(), 8).unwrap();
    assert_eq!(g.game.value, rat(9, 40));
    g.game.certify().unwrap();
}

/// Digging all five holes in sevenths and finishing a hole to the bottom after
/// a find at 2/7 catches the same-hole placement, which is enough to clear
/// `(14 + 2/11)/30` against this mixture.
#[test]
fn nineteen_sevenths_mixture_against_five_holes() {
    let (mix, numerator) = hider_19_7_mixture(Case19_7::H19_7);
    assert_eq!(numerator, int(14) + rat(2, 11));
    let params = GameParams::two(5, rat(19, 7) - rat(1, 100)).unwrap();
    let br = best_response_searcher(&params, &mix, 7).unwrap();
    assert_eq!(br.value, brute_payoff(5, &mix, &br.plan));
    assert_eq!(br.value, rat(47, 99));
    assert!(br.value > numerator / int(30));
}
