use std::path::Path;
use std::process::Command;

use riccati2d::cli::{parse_config, run, verify_file, RunOptions};
use riccati2d::{DomainSpec, ScalarField};
use serde_json::Value;

fn verify(text: &str) -> riccati2d::cli::Report {
    run(&parse_config(text, None).unwrap(), &RunOptions::default()).unwrap()
}

#[test]
fn oracle_riccati_residual_passes() {
    let r = verify(
        "case = riccati-residual\ndomain = -1 1 -1 1\noracle = exp_family nu=1 theta=0.927295218\n",
    );
    assert!(r.pass);
    let first = &r.identities[0].result;
    assert!(first.name.starts_with("riccati-residual"));
    assert!(first.residual < 1e-10);
}

#[test]
fn open_contour_is_reported_not_raised() {
    let r = verify("case = cauchy-riccati\ndomain = -1 1 -1 1\ncontour = polyline 0 0 1 1 4\n");
    assert!(!r.pass);
    assert_eq!(r.exit_code(), 1);
    assert_eq!(
        r.identities[0].result.reason.as_deref(),
        Some("contour not closed")
    );
}

#[test]
fn default_suite_passes_and_is_ordered() {
    let r = verify("case = all\ndomain = -1.5 1.5 -1.5 1.5\n");
    assert!(r.pass);
    assert!(r.identities.len() >= 8);
    let names: Vec<&str> = r
        .identities
        .iter()
        .map(|i| i.result.name.as_str())
        .collect();
    let mut groups: Vec<&str> = names.iter().map(|n| n.split('[').next().unwrap()).collect();
    groups.dedup();
    let order = ["cauchy", "darboux", "euler1", "euler2", "laplace", "picard"];
    let firsts: Vec<usize> = order
        .iter()
        .map(|p| groups.iter().position(|g| g.starts_with(p)).unwrap())
        .collect();
    assert!(firsts.windows(2).all(|w| w[0] < w[1]), "{names:?}");
}

#[test]
fn report_json_has_the_documented_keys() {
    let r = verify("case = darboux\ndomain = -1 1 -1 1\nv = -0.5*exp(0.6*x+0.8*y) + 0.5*exp(-x)\n");
    let v: Value = serde_json::from_str(&r.to_json()).unwrap();
    let ids = v["identities"].as_array().unwrap();
    assert_eq!(ids.len(), 4);
    for id in ids {
        for key in [
            "case",
            "residual",
            "tolerance",
            "pass",
            "refinement",
            "elapsed_ms",
        ] {
            assert!(id.get(key).is_some(), "missing {key} in {id}");
        }
    }
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["config"]["case"], "darboux");
}

#[test]
fn perturbation_fails_the_checkers() {
    for case in ["riccati-residual", "picard", "cauchy-riccati"] {
        let r = verify(&format!(
            "case = {case}\ndomain = -1.5 1.5 -1.5 1.5\nperturb = 0.1\n"
        ));
        assert!(!r.pass, "{case}");
        let worst = r
            .identities
            .iter()
            .map(|i| i.result.residual)
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3, "{case}: {worst}");
    }
}

#[test]
fn grid_refinement_fills_tables() {
    let r = run(
        &parse_config(
            "case = picard\ndomain = -1 1 -1 1\nbackend = grid\ngrid = 11\n",
            None,
        )
        .unwrap(),
        &RunOptions {
            refine: Some(3),
            dump_dir: None,
        },
    )
    .unwrap();
    let t = &r.identities[0].result.refinement;
    assert_eq!(
        t.iter().map(|p| p.0).collect::<Vec<_>>(),
        vec![11.0, 21.0, 41.0]
    );
    assert!(t[0].1 > t[1].1 && t[1].1 > t[2].1);
}

#[test]
fn csv_fields_and_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let d = DomainSpec::new(-1.0, 1.0, -1.0, 1.0, 41, 41).unwrap();
    ScalarField::parse("exp(0.6*x + 0.8*y)", &d)
        .unwrap()
        .to_grid()
        .unwrap()
        .write_csv(&tmp.path().join("u.csv"))
        .unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "case = riccati-residual\ndomain = -1 1 -1 1\nbackend = grid\nu_csv = u.csv\nnu = 1\n",
    )
    .unwrap();
    let dumps = tmp.path().join("dumps");
    let r = verify_file(
        &cfg,
        &RunOptions {
            refine: None,
            dump_dir: Some(dumps.clone()),
        },
    )
    .unwrap();
    assert!(r.pass, "{}", r.to_json());
    let written: Vec<_> = std::fs::read_dir(&dumps)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(!written.is_empty());
}

#[test]
fn binary_writes_report_to_out() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "case = laplace-reductions\ndomain = -1.5 1.5 -1.5 1.5\n",
    )
    .unwrap();
    let out = tmp.path().join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_riccati2d"))
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(v["identities"].as_array().unwrap().len(), 2);
}
