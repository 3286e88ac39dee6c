use super::commands::fitted_order;
use super::*;

const FLAT: &str = "[grid]\nn = 3\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\n";

fn opts() -> Options {
    Options::default()
}

#[test]
fn flat_constraints_vanish() {
    let r = execute(Command::Constraints, FLAT, &opts()).unwrap();
    assert_eq!(r.residuals["constraints.rho.max"], 0.0);
    assert_eq!(r.residuals["constraints.j.max"], 0.0);
    assert!(r.passed());
}

#[test]
fn constant_k_has_rho_three() {
    let scene = "[grid]\nn = 3\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\n\
                 k = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\n";
    let r = execute(Command::Constraints, scene, &opts()).unwrap();
    assert!((r.residuals["constraints.rho.max"] - 3.0).abs() < 1e-12);
    assert!(r.residuals["constraints.j.max"] < 1e-12);
    assert!(r.passed());
}

#[test]
fn recipe_rigidity_passes() {
    let scene = "[grid]\nn = 3\ns_points = 17\nleaf_points = 16\n\
                 [data]\nphi = \"1 + 0.2*s + 0.05*sin(2*pi*x1)\"\n\
                 [tolerances]\ndefault = 1e-5\n";
    let r = execute(Command::Rigidity, scene, &opts()).unwrap();
    let failed: Vec<_> = r.verdicts.iter().filter(|(_, v)| !v.pass).collect();
    assert!(failed.is_empty(), "{failed:?}\n{:#?}", r.residuals);
    assert_eq!(r.residuals["rigidity.tt.applicable"], 1.0);
}

#[test]
fn random_tt_self_test_uses_the_seed() {
    let scene = "[grid]\nn = 4\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1\"\n";
    let o = Options {
        seed: Some(7),
        ..opts()
    };
    let a = execute(Command::Rigidity, scene, &o).unwrap();
    let b = execute(Command::Rigidity, scene, &o).unwrap();
    assert_eq!(a.residuals, b.residuals);
    for k in ["trace", "div", "c"] {
        assert!(a.verdicts[&format!("rigidity.tt_random.{k}")].pass);
    }
}

#[test]
fn killing_dev_on_s_only_recipe() {
    let scene = "[grid]\nn = 3\ns_points = 9\nleaf_points = 8\n[data]\nphi = \"1 + 0.3*s\"\n";
    let r = execute(Command::KillingDev, scene, &opts()).unwrap();
    assert!(r.passed(), "{:#?}", r.residuals);
    assert_eq!(r.residuals["kd.dec.violations"], 0.0);
}

#[test]
fn ppwave_wave_scene() {
    let scene = "[grid]\nn = 3\ns_points = 9\nleaf_points = 16\n\
                 [data]\nppwave = { f = \"sin(2*pi*x1)\" }\n\
                 [tolerances]\n\"ppwave.formula\" = 1e-10\n";
    let r = execute(Command::PpWave, scene, &opts()).unwrap();
    assert!(r.passed(), "{:#?}", r.verdicts);
    assert!(r.residuals["ppwave.formula"] < 1e-10);
    // f changes sign, so the slice v = 0 is not spacelike.
    assert_eq!(r.residuals["ppwave.round_trip.skipped"], 1.0);

    // Marginal null dust on the slice; the residual is leaf-resolution limited.
    let scene = scene
        .replace("sin(2*pi*x1)", "1.5 + 0.5*sin(2*pi*x1)")
        .replace("leaf_points = 16", "leaf_points = 32");
    let r = execute(Command::PpWave, &scene, &opts()).unwrap();
    assert!(r.passed(), "{:#?}", r.verdicts);
    assert!(r.residuals["ppwave.round_trip"] < 1e-8);
    assert!(r.residuals["ppwave.induced.null_dust"] < 1e-8, "{:#?}", r.residuals);
}

#[test]
fn ppwave_command_needs_a_ppwave_scene() {
    let e = execute(Command::PpWave, FLAT, &opts()).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn validation_and_numerical_errors_map_to_exit_codes() {
    let neg = FLAT.replace("phi = \"1\"", "phi = \"s - 0.5\"");
    assert_eq!(execute(Command::Constraints, &neg, &opts()).unwrap_err().exit_code(), 2);
    let nonper = FLAT.replace("phi = \"1\"", "phi = \"1 + 0.1*x1\"");
    assert_eq!(execute(Command::Rigidity, &nonper, &opts()).unwrap_err().exit_code(), 2);
    assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
}

#[test]
fn scheme_flag_switches_every_axis() {
    let o = Options {
        scheme: Some(crate::mesh::Scheme::Fd2),
        ..opts()
    };
    let s = apply_flags(Scene::parse(FLAT).unwrap(), &o).unwrap();
    assert!((0..3).all(|a| s.grid.scheme(a) == crate::mesh::Scheme::Fd2));
    let o = Options {
        scheme: Some(crate::mesh::Scheme::Spectral),
        ..opts()
    };
    let s = apply_flags(Scene::parse(FLAT).unwrap(), &o).unwrap();
    assert_eq!(s.grid.scheme(0), crate::mesh::Scheme::Fd4);
}

#[test]
fn convergence_fits_the_fd_order() {
    assert!((fitted_order(&[0.4, 0.2, 0.1], &[16.0, 1.0, 0.0625]) - 4.0).abs() < 1e-12);
    let scene = "[grid]\nn = 2\ns_points = 17\nleaf_points = 16\n[data]\nphi = \"exp(s)\"\n";
    let o = Options {
        check: Some("rigidity.leaf_parallel.max".into()),
        ..opts()
    };
    // φ = φ(s): the leaf residual is exactly zero at every level.
    let r = execute(Command::Convergence, scene, &o).unwrap();
    assert!(r.passed());
    let o = Options {
        check: Some("rigidity.normal_parallel.max".into()),
        ..opts()
    };
    let r = execute(Command::Convergence, scene, &o).unwrap();
    assert!(r.residuals["convergence.order"] > 3.5, "{:#?}", r.residuals);
    assert!(r.passed());
    let o = Options {
        check: Some("nonsense".into()),
        ..opts()
    };
    assert_eq!(execute(Command::Convergence, scene, &o).unwrap_err().exit_code(), 2);
}

#[test]
fn run_writes_report_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.scene");
    std::fs::write(&path, FLAT).unwrap();
    let out = dir.path().join("report.json");
    let dumps = dir.path().join("fields");
    let o = Options {
        out: Some(out.clone()),
        dump_fields: Some(dumps.clone()),
        ..opts()
    };
    assert_eq!(run(Command::Constraints, &path, &o), 0);
    let a = std::fs::read_to_string(&out).unwrap();
    assert!(a.contains("\"digest\": \"sha256:"));
    assert!(dumps.join("rho.csv").exists());
    assert_eq!(run(Command::Constraints, &path, &o), 0);
    let b = std::fs::read_to_string(&out).unwrap();
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(run(Command::Constraints, &dir.path().join("missing"), &o), 2);
}
