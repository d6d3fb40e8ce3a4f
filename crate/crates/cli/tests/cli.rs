//! End-to-end tests of the binary: flag surface, output formats, and the
//! exit-code contract (0 success, 2 usage, 3 domain, 4 verification failure).

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetakit"))
        .args(args)
        .env_remove("THETAKIT_TOL")
        .env_remove("THETAKIT_MAX_TERMS")
        .env_remove("THETAKIT_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_expansion_matches_fourier_oracle() {
    let expansion = run(&[
        "eval", "theta4", "--rep", "expansion", "--v", "0.1", "--tau", "2i", "--format", "json",
    ]);
    assert!(expansion.status.success());
    let fourier = run(&[
        "eval", "theta4", "--rep", "fourier", "--v", "0.1", "--tau", "2i", "--format", "json",
    ]);
    let parse = |o: &Output| -> serde_json::Value { serde_json::from_str(&stdout(o)).unwrap() };
    let a = parse(&expansion);
    let b = parse(&fourier);
    let av = a["value"][0].as_f64().unwrap();
    let bv = b["value"][0].as_f64().unwrap();
    assert!((av - bv).abs() < 1e-9 * bv.abs());
    assert_eq!(a["representation"], "theta4/expansion");
    assert_eq!(a["strip"]["status"], "inside");
    assert!(a["terms"].as_u64().unwrap() > 0);
}

#[test]
fn eval_theta1_at_zero_is_zero() {
    let out = run(&["eval", "theta1", "--v", "0", "--tau", "i", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["value"][0].as_f64().unwrap().abs() < 1e-15);
    assert!(v["value"][1].as_f64().unwrap().abs() < 1e-15);
}

#[test]
fn eval_rr_routes_cross_check() {
    let product = run(&["eval", "rr", "--route", "product", "--tau", "1.5i", "--format", "json"]);
    let cf = run(&["eval", "rr", "--route", "cf", "--tau", "1.5i", "--format", "json"]);
    let value = |o: &Output| {
        let v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v["value"][0].as_f64().unwrap()
    };
    let p = value(&product);
    assert!((p - value(&cf)).abs() <= 1e-9 * p.abs());
}

#[test]
fn coeffs_formal_prints_exact_rationals() {
    let out = run(&["coeffs", "c", "--formal", "--order", "6", "--p", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "[0, 4, 8, 16, 16, 24, 32]");
}

#[test]
fn coeffs_numeric_families_are_consistent() {
    let out = run(&["coeffs", "c", "--tau", "2i", "--max-p", "3", "--format", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    for row in rows.as_array().unwrap() {
        assert!(row["value"][0].as_f64().unwrap().is_finite());
    }
    // bridge: [(2p+2)(2p+1) c_{2p+2} - 4 p^2 c_{2p}] / a_{2p} = 4/pi^2
    let a_out = run(&["coeffs", "a", "--tau", "2i", "--max-p", "2", "--format", "json"]);
    let a_rows: serde_json::Value = serde_json::from_str(&stdout(&a_out)).unwrap();
    let c = |p: usize| rows[p - 1]["value"][0].as_f64().unwrap();
    let a1 = a_rows[0]["value"][0].as_f64().unwrap();
    let bracket = 12.0 * c(2) - 4.0 * c(1);
    let ratio = bracket / a1;
    assert!(
        (ratio - 4.0 / (std::f64::consts::PI.powi(2))).abs() < 1e-9,
        "bridge ratio {ratio}"
    );
}

#[test]
fn verify_formal_passes_and_emits_json_lines() {
    let out = run(&["verify", "formal", "--order", "40"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut rogers_seen = false;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("JSON line");
        assert_eq!(v["status"], "pass", "{line}");
        if v["identity"]
            .as_str()
            .unwrap()
            .starts_with("formal.rogers")
        {
            rogers_seen = true;
        }
    }
    assert!(rogers_seen);
}

#[test]
fn verify_reports_but_never_asserts_printed_inv_tau_displays() {
    let out = run(&["verify", "modular", "--tau-grid", "1.5i"]);
    assert!(out.status.success(), "report-only entries must not fail the run");
    let text = stdout(&out);
    assert!(text.lines().any(|l| {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        v["identity"] == "cor3-1.inv-tau-display" && v["status"] == "reported"
    }));
}

#[test]
fn exit_codes_contract() {
    // usage: missing required suite argument
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
    // usage: unknown function
    let out = run(&["eval", "nope", "--tau", "2i"]);
    assert_eq!(out.status.code(), Some(2));
    // usage: formal a-family is not representable
    let out = run(&["coeffs", "a", "--formal"]);
    assert_eq!(out.status.code(), Some(2));
    // domain: tau in the lower half-plane
    let out = run(&["eval", "theta4", "--v", "0.1", "--tau", "1-2i"]);
    assert_eq!(out.status.code(), Some(2), "parse-time tau validation is usage");
    // domain: outside the validity strip under enforce
    let out = run(&[
        "eval", "theta1", "--rep", "expansion", "--v", "0.1+1i", "--tau", "2i",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("strip"), "{err}");
}

#[test]
fn bench_emits_expected_csv_shape() {
    let out = run(&["bench", "--nx", "5", "--ny", "5", "--reps", "expansion,fourier"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "v_re,v_im,tau,representation,terms_to_tol,wall_time_ns,error_vs_oracle"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50, "5x5 grid x 2 representations");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7, "{row}");
        let err: f64 = fields[6].parse().unwrap();
        assert!(err < 1e-9, "{row}");
    }
}

#[test]
fn bench_terms_grow_toward_strip_boundary() {
    // expansion term count is monotone in the strip ratio along Im v
    let out = run(&[
        "bench", "--nx", "1", "--ny", "6", "--y-max", "0.55", "--reps", "expansion", "--tau", "1.4i",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut by_abs_im: Vec<(f64, u64)> = text
        .lines()
        .skip(1)
        .map(|row| {
            let fields: Vec<&str> = row.split(',').collect();
            (
                fields[1].parse::<f64>().unwrap().abs(),
                fields[4].parse::<u64>().unwrap(),
            )
        })
        .collect();
    by_abs_im.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair in by_abs_im.windows(2) {
        assert!(
            pair[1].1 >= pair[0].1,
            "terms not monotone in |Im v|: {by_abs_im:?}"
        );
    }
}

#[test]
fn env_defaults_are_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_thetakit"))
        .args(["coeffs", "c", "--formal", "--p", "1"])
        .env("THETAKIT_ORDER", "4")
        .output()
        .unwrap();
    assert_eq!(stdout(&out).trim(), "[0, 4, 8, 16, 16]");
}
