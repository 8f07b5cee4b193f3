use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinduality"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{:?}: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

// theta: two vertices joined by three edges, so Z / (2^V prod cosh) = ((1+Y)^3 + (1-Y)^3) / 2
fn theta_z(num: i64, den: i64) -> (i64, i64) {
    let (p, m) = ((den + num).pow(3), (den - num).pow(3));
    reduce(p + m, 2 * den.pow(3))
}

fn reduce(a: i64, b: i64) -> (i64, i64) {
    let g = gcd(a.abs(), b.abs());
    (a / g, b / g)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn graph_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["theta", "k4", "prism3", "cube"] {
        let text = stdout(&run(&["graph", "text", "--generate", name]));
        let path = dir.path().join(format!("{}.graph", name));
        fs::write(&path, format!("# {}\n{}", name, text)).unwrap();
        let from_file = json(&["graph", "canonical", "--graph", path.to_str().unwrap()]);
        let generated = json(&["graph", "canonical", "--generate", name]);
        assert_eq!(from_file["result"], generated["result"]);
    }
}

#[test]
fn ising_z_and_corr_on_theta() {
    for (n, d) in [(1, 2), (1, 3), (-2, 5)] {
        let y = format!("Y={}/{}", n, d);
        let (a, b) = theta_z(n, d);
        let v = json(&["ising", "z", "--generate", "theta", "--coupling", &y]);
        assert_eq!(v["result"]["p"], format!("{}/{}", a, b));

        let (p, m) = ((d + n).pow(3), (d - n).pow(3));
        let (a, b) = reduce(p - m, p + m);
        let v = json(&[
            "ising",
            "corr",
            "--generate",
            "theta",
            "--Y",
            &y,
            "--edge",
            "1",
        ]);
        let want = if b == 1 {
            a.to_string()
        } else {
            format!("{}/{}", a, b)
        };
        assert!(
            v["result"].to_string().contains(&want),
            "{} lacks {}",
            v,
            want
        );
    }
    let text = stdout(&run(&[
        "ising",
        "corr",
        "--generate",
        "theta",
        "--Y",
        "1/2",
        "--edge",
        "0",
    ]));
    assert!(text.contains("13/14"));
}

#[test]
fn kasteleyn_orientation_lines_and_exit_codes() {
    let text = stdout(&run(&["kasteleyn", "make", "--generate", "k4"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    for (e, line) in lines.iter().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 4);
        assert_eq!(f[0], "edge");
        assert_eq!(f[1], e.to_string());
    }

    let dir = tempfile::tempdir().unwrap();
    let good = stdout(&run(&["graph", "text", "--generate", "theta"]));
    let good_path = dir.path().join("theta.graph");
    fs::write(&good_path, &good).unwrap();
    assert_eq!(
        run(&["kasteleyn", "check", "--graph", good_path.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    // reversing one edge changes the parity of both faces it borders
    let bad = good.replace("edge 0 0 1", "edge 0 1 0");
    assert_ne!(bad, good);
    let bad_path = dir.path().join("flipped.graph");
    fs::write(&bad_path, bad).unwrap();
    let out = run(&["kasteleyn", "check", "--graph", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.graph");
    fs::write(
        &path,
        "vertex 0 0 2 4\nvertex 0 5 3 1\nedge 0 0 1\nedge 1 2 3\nedge 2 4 5\n",
    )
    .unwrap();
    assert_eq!(
        run(&["graph", "info", "--graph", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["ising", "z", "--generate", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["ising", "z", "--generate", "theta", "--Y", "1/0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["--bogus"]).status.code(), Some(2));
}

#[test]
fn spinnet_series_lines_are_sorted_and_exact() {
    let text = stdout(&run(&[
        "spinnet",
        "series",
        "--generate",
        "theta",
        "--degree",
        "2",
    ]));
    let mut lines: Vec<&str> = text.lines().collect();
    // 1/P^2 with P = 1 + Y1 Y2 + Y1 Y3 + Y2 Y3: constant 1 and -2 on each pair
    assert!(lines.contains(&"1"));
    for pair in ["Y1^1 Y2^1", "Y1^1 Y3^1", "Y2^1 Y3^1"] {
        assert!(lines.contains(&format!("-2 {}", pair).as_str()), "{}", text);
    }
    let again = stdout(&run(&[
        "spinnet",
        "series",
        "--generate",
        "theta",
        "--degree",
        "2",
    ]));
    assert_eq!(text, again);
    lines.retain(|l| !l.is_empty());
    assert_eq!(lines.len(), 4);
}

#[test]
fn spinnet_eval_theta_integral() {
    // Int(theta; 2,2,2) = (-1)^3 * 4! / (1! 1! 1!)
    let v = json(&[
        "spinnet",
        "eval",
        "--generate",
        "theta",
        "--colors",
        "2,2,2",
        "--norm",
        "integral",
    ]);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value + 24.0).abs() < 1e-9, "{}", v);
}

#[test]
fn bridge_and_verify_all_pass() {
    for g in ["theta", "k4", "prism3"] {
        let out = run(&["bridge", "verify", "--generate", g, "--Y", "1/3", "--all"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let out = run(&["verify-all", "--generate", g, "--Y", "2/7"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}

#[test]
fn json_carries_schema_version() {
    for args in [
        vec!["graph", "info", "--generate", "cube"],
        vec!["ising", "p", "--generate", "k4"],
        vec!["crit", "yc"],
        vec!["bridge", "fundamental", "--generate", "theta", "--Y", "1/4"],
    ] {
        let v = json(&args);
        assert_eq!(v["schema_version"], 1, "{:?}", args);
        assert!(v["command"].is_string());
    }
}

#[test]
fn hex_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(&[
        "crit",
        "hex",
        "--from",
        "0.05",
        "--to",
        "1.7",
        "--step",
        "0.01",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("y,g,mean_j_plus_half,dj_dbeta"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 166);
    assert!(rows
        .iter()
        .all(|r| r.len() == 4 && r.iter().all(|x| x.is_finite())));
    assert!((rows[0][0] - 0.05).abs() < 1e-12 && (rows[165][0] - 1.7).abs() < 1e-12);
}

#[test]
fn stationary_triangles_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.txt");
    fs::write(&path, "# l s1 s2 t1 t2\n1 1 1 1 1\n3 4 5 4 5\n").unwrap();
    let v = json(&["crit", "stationary", "--triangles", path.to_str().unwrap()]);
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let eq = rows[0]["tangent"].as_f64().unwrap();
    assert!((eq - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    // shared side 3 sits opposite the angle between sides 4 and 5
    let gamma = (32.0f64 / 40.0).acos();
    let want = (gamma / 2.0).tan();
    assert!((rows[1]["tangent"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!((rows[1]["ratio"].as_f64().unwrap() - want).abs() < 1e-12);
}
