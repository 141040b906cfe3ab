use std::process::{Command, Output};

fn lgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgl")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = lgl(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// `key=value` lookup in one record line.
fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
}

#[test]
fn mms_curve_rows_and_quarter_point() {
    let text = stdout(&["mms", "curve", "--p-min", "0.01", "--p-max", "0.49", "--step", "0.01"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,best_family,best_value,neg1,pos3,neg3,pos5,neg5,pos2");
    assert_eq!(lines.len(), 1 + 49);
    let quarter: Vec<&str> = lines.iter().find(|l| l.starts_with("0.25,")).unwrap().split(',').collect();
    assert_eq!(quarter[1], "neg1");
    assert_eq!(quarter[2].parse::<f64>().unwrap(), 0.75);
}

#[test]
fn mms_curve_flips_near_the_first_crossing() {
    let text = stdout(&["mms", "curve", "--p-min", "0.3", "--p-max", "0.33", "--step", "0.001"]);
    let rows: Vec<(f64, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].to_string())
        })
        .collect();
    let flip = rows.windows(2).find(|w| w[0].1 != w[1].1).expect("a family change");
    assert_eq!((flip[0].1.as_str(), flip[1].1.as_str()), ("neg1", "pos3"));
    assert!(flip[0].0 <= 0.3177 && 0.3177 <= flip[1].0, "{flip:?}");
}

#[test]
fn bad_curve_range_fails() {
    assert!(!lgl(&["mms", "curve", "--step", "0"]).status.success());
    assert!(!lgl(&["mms", "curve", "--step=-0.1"]).status.success());
    assert!(!lgl(&["mms", "curve", "--p-max", "0.6"]).status.success());
}

#[test]
fn kr_scan_records() {
    let line = stdout(&["kr", "scan", "--n", "10", "--k", "5", "--d", "49/100"]);
    assert_eq!(field(&line, "s_star"), "10");
    assert_eq!(field(&line, "value"), "1");
    assert_eq!(field(&line, "in_conjectured_set"), "true");
}

#[test]
fn kr_sweep_stays_in_the_conjectured_set() {
    let text = stdout(&["kr", "scan", "--n", "4..30", "--max-den", "12"]);
    assert!(text.lines().count() > 10_000);
    for line in text.lines() {
        assert_eq!(field(line, "in_conjectured_set"), "true", "{line}");
    }
}

#[test]
fn rational_flags_reject_decimals() {
    let out = lgl(&["kr", "check", "--n", "29", "--k", "10", "--d", "0.3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("p/q"));
}

#[test]
fn caching_guards_and_coarse_grid() {
    assert!(!lgl(&["caching", "table", "--n", "7", "--grid", "8"]).status.success());
    let text = stdout(&["caching", "table", "--n", "4", "--grid", "2", "--h", "7/4"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(",9/40,proved,1/4,false"), "{}", lines[1]);
}

#[test]
fn caching_value_and_best_response_round_trip() {
    let dir = std::env::temp_dir().join(format!("lgl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mix = dir.join("mix.txt");
    let plan = dir.join("plan.txt");
    let line = stdout(&["caching", "value", "--n", "4", "--h", "1", "--grid", "2", "--mix-out", mix.to_str().unwrap()]);
    assert_eq!(field(&line, "value"), "1/10");
    let line = stdout(&[
        "caching",
        "bestresponse",
        "--n",
        "4",
        "--h",
        "1",
        "--grid",
        "2",
        "--mix",
        mix.to_str().unwrap(),
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(field(&line, "value"), "1/10");
    assert!(std::fs::read_to_string(&plan).unwrap().starts_with("dig-plan v1\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn caching_bounds_record() {
    let line = stdout(&["caching", "bounds", "--n", "4", "--h", "2", "--grid", "4"]);
    assert_eq!(field(&line, "lower"), "2/5");
    assert_eq!(field(&line, "holds"), "true");
}

#[test]
fn simulation_is_on_target_and_reproducible() {
    let args = ["simulate", "limit", "--k", "2", "--j", "2", "--lambda", "4", "--trials", "1000000", "--seed", "42"];
    let a = stdout(&args);
    assert!(field(&a, "z").parse::<f64>().unwrap().abs() <= 4.0, "{a}");
    assert_eq!(field(&a, "target"), "0.12500000");
    assert_eq!(a, stdout(&args));
    let single = Command::new(env!("CARGO_BIN_EXE_lgl")).args(args).env("LGL_THREADS", "1").output().unwrap();
    assert_eq!(a, String::from_utf8(single.stdout).unwrap());
    assert!(!lgl(&["simulate", "limit", "--k", "3", "--j", "1", "--lambda", "4"]).status.success());
}

#[test]
fn bad_thread_count_fails() {
    let out = Command::new(env!("CARGO_BIN_EXE_lgl")).args(["mms", "cross"]).env("LGL_THREADS", "0").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn game_solve_from_file_to_file() {
    let dir = std::env::temp_dir().join(format!("lgl-game-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("m.txt");
    let output = dir.join("out.csv");
    std::fs::write(&input, "2 2\n0 1\n1 0\n").unwrap();
    stdout(&["game", "solve", "--input", input.to_str().unwrap(), "--format", "csv", "--out", output.to_str().unwrap()]);
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text, "rows,columns,value,value_decimal,row_mix,col_mix\n2,2,1/2,0.5000000000,1/2;1/2,1/2;1/2\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
