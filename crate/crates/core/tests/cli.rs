use ballprob::cli::run;
use serde_json::Value;

fn exec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ballprob").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn kappa_identity_three() {
    let (code, out, _) = exec(&["kappa", "--spectrum", "[1,1,1]"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["kappa"].as_f64().unwrap() - 3f64.sqrt().recip()).abs() < 1e-15);
    assert_eq!(v["regime"], "HighDim");
}

#[test]
fn degenerate_band_record() {
    let (code, out, _) = exec(&["experiment", "degenerate-band", "--eps", "0.25"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert!((v["observed"].as_f64().unwrap() - 0.38292).abs() < 1e-5);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn compare_from_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, r#"{"spectrum": [1, 1], "shift": [0.5]}"#).unwrap();
    std::fs::write(&b, r#"{"spectrum": [1, 1]}"#).unwrap();
    let (code, out, _) = exec(&["compare", "--x", a.to_str().unwrap(), "--y", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    let d = v["distance"].as_f64().unwrap();
    let bound = v["bound"]["value"].as_f64().unwrap();
    assert!(d > 0.0 && d <= ballprob::calibration::C_EMP * bound);
    assert!((v["ratio"].as_f64().unwrap() * bound - d).abs() < 1e-15);
    // inline form gives the same record
    let (_, inline, _) = exec(&["compare", "--sx", "[1,1]", "--sy", "[1,1]", "--shift", "[0.5]"]);
    assert_eq!(inline, out);
}

#[test]
fn cdf_density_quantile() {
    let (_, out, _) = exec(&["cdf", "--spectrum", "[1,1]", "--x", "2"]);
    let v = json(&out);
    assert!((v["cdf"].as_f64().unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-8);
    let (_, out, _) = exec(&["density", "--spectrum", "[1,1]", "--x", "1", "--x", "3"]);
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!((v[1]["density"].as_f64().unwrap() - 0.5 * (-1.5f64).exp()).abs() < 1e-8);
    let (_, out, _) = exec(&["quantile", "--spectrum", "[1,1,1]", "--p", "0.95"]);
    assert!((json(&out)["quantile"].as_f64().unwrap() - 7.814727903251178).abs() < 1e-5);
}

#[test]
fn bounds_and_bands() {
    let (_, out, _) = exec(&["bound", "comparison", "--sx", "[1,1,1]", "--sy", "[1,1,1.1]"]);
    assert_eq!(json(&out)["formula_id"], "comparison");
    let (_, out, _) = exec(&["bound", "density-uniform", "--spectrum", "[4,1]"]);
    assert!((json(&out)["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    let (code, _, err) = exec(&["bound", "frobenius", "--sx", "[4,1]", "--sy", "[1,1,1]"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"], "ConditionError");
    let (_, out, _) = exec(&["band", "--spectrum", "[1]", "--eps", "0.25", "--at", "0"]);
    assert!((json(&out)["probability"].as_f64().unwrap() - 0.382924922548026).abs() < 1e-6);
    let (_, out, _) = exec(&["band", "--spectrum", "[1,1,1]", "--eps", "0.1"]);
    assert!(json(&out)["probability"].as_f64().unwrap() <= 0.1 / 3f64.sqrt());
}

#[test]
fn exit_codes() {
    let (code, _, err) = exec(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    let (code, _, _) = exec(&["kappa", "--bogus"]);
    assert_eq!(code, 1);
    let (code, _, err) = exec(&["kappa", "--spectrum", "[-1]"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"], "DomainError");
    let (code, _, err) = exec(&["--tol", "1e-300", "cdf", "--spectrum", "[1,1]", "--x", "1"]);
    assert_eq!(code, 3);
    assert_eq!(json(&err)["error"], "NumericalError");
    let (code, _, _) = exec(&["compare", "--x", "/no/such/file.json", "--sy", "[1]"]);
    assert_eq!(code, 2);
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["kappa", "cdf", "density", "quantile", "bound", "compare", "band", "experiment", "sweep", "bayes"] {
        let (code, out, _) = exec(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.lines().next().is_some_and(|l| !l.trim().is_empty()), "{sub}");
    }
}

#[test]
fn sweep_is_byte_identical() {
    std::env::set_var("BALLPROB_THREADS", "2");
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let (code, out, _) = exec(&["sweep", "--n", "12", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }
    let a = std::fs::read(&p1).unwrap();
    assert_eq!(a, std::fs::read(&p2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "instance_id,regime_x,regime_y,distance,bound,ratio");
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn bayes_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(&p, r#"{"n": 20, "p": 5, "sigma2": 1.0, "design_seed": 11, "G_spec": 2.0, "G1_spec": 1.0, "alpha": 0.05}"#).unwrap();
    let (code, out, _) = exec(&["bayes", "--scenario", p.to_str().unwrap(), "--mc", "20000"]);
    assert_eq!(code, 0);
    let recs: Vec<Value> = out.lines().map(json).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["name"], "prior_impact");
    assert_eq!(recs[1]["name"], "np_bayes_coverage");
    for r in &recs {
        assert_eq!(r["verdict"], "pass");
    }
    let exact = recs[0]["extras"]["exceedance"].as_f64().unwrap();
    let mc = recs[0]["extras"]["exceedance_mc"].as_f64().unwrap();
    assert!((exact - mc).abs() < 4.0 * (exact * (1.0 - exact) / 20000.0).sqrt());
}

#[test]
fn experiments_pass() {
    for args in [
        vec!["experiment", "r3", "--lam", "[2,1,0.5]", "--eps", "0.2"],
        vec!["experiment", "one-dim", "--lam-x", "1", "--lam-y", "4"],
        vec!["experiment", "h-integral", "--a", "2"],
    ] {
        let (code, out, _) = exec(&args);
        assert_eq!(code, 0);
        assert_eq!(json(&out)["verdict"], "pass", "{args:?}");
    }
    let (_, out, _) = exec(&["experiment", "holder", "--spectrum", "[1,1,1]"]);
    let v = json(&out);
    assert_eq!(v["record"]["verdict"], "pass");
    assert!((v["record"]["extras"]["tau"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}
