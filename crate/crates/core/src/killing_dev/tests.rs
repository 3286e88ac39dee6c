use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::exprlang::{parse, Expr};
use crate::mesh::{Grid, Kind};
use crate::rigidity::{build_parallel_candidate, rigid_recipe};

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn grid(n: usize, ns: usize, nx: usize) -> Arc<Grid> {
    Arc::new(Grid::product(n, 1.0, ns, &vec![nx; n - 1], &vec![1.0; n - 1]).unwrap())
}

fn recipe_table(phi: &str, g: &Arc<Grid>) -> (KillingDevelopment, EinsteinTable) {
    let ids = rigid_recipe(&e(phi), g).unwrap();
    let v = build_parallel_candidate(&ids).unwrap();
    let kd = build_kd(&ids, &v, 1e-8).unwrap();
    let t = kd_einstein(&kd).unwrap();
    (kd, t)
}

#[test]
fn flat_development_is_flat() {
    let (kd, t) = recipe_table("1", &grid(3, 9, 8));
    // ḡ = ds⊗dv + dv⊗ds + g
    let g = kd.metric().g();
    assert!(g.comp(1).iter().all(|&v| v == 1.0));
    assert_eq!(kd.slice_defect(), 0.0);
    assert_eq!(kd.killing_parallel_residual(), 0.0);
    assert!(t.einstein.max_abs() < 1e-13);
    let dec = kd_dec_check(&t, 64, 1e-8);
    assert!(dec.holds() && dec.min.abs() < 1e-13, "{dec:?}");
}

#[test]
fn frame_is_orthonormal_with_nu_last() {
    let (kd, _) = recipe_table("1 + 0.2*s + 0.1*sin(2*pi*x1)", &grid(3, 9, 16));
    let d = 4;
    for p in [0, 37, 300] {
        let f = kd.frame(p).unwrap();
        let g: Vec<f64> = (0..d * d).map(|c| kd.metric().g().at(c, p)).collect();
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for m in 0..d {
                    for q in 0..d {
                        s += g[m * d + q] * f[a][m] * f[b][q];
                    }
                }
                let want = if a != b { 0.0 } else if a == 0 { -1.0 } else { 1.0 };
                assert!((s - want).abs() < 1e-13);
            }
        }
        // e₀ future: ḡ(e₀, ∂_v) = e₀^s < 0. And ∂_v = φ⁻¹(e₀ + ν).
        assert!(f[0][1] < 0.0);
        let phi = kd.base().phi().at(0, p);
        let sum: Vec<f64> = (0..d).map(|m| (f[0][m] + f[3][m]) / phi).collect();
        assert!((sum[0] - 1.0).abs() < 1e-13 && sum[1..].iter().all(|v| v.abs() < 1e-13), "{sum:?}");
    }
}

#[test]
fn s_only_recipe_is_vacuum() {
    // φ² is quadratic in s, so fd4 differentiates the development exactly.
    let (_, t) = recipe_table("1 + 0.3*s", &grid(3, 9, 8));
    assert!(t.einstein.max_abs() < 1e-11, "{}", t.einstein.max_abs());
    assert!(t.rho.max_abs() < 1e-12);
    assert!(kd_dec_check(&t, 64, 1e-8).holds());
}

#[test]
fn leaf_dependent_recipe_has_null_dust_pattern() {
    let g = grid(3, 9, 32);
    let (kd, t) = recipe_table("1 + 0.2*s + 0.1*sin(2*pi*x1)*cos(2*pi*x2)", &g);
    assert!(t.rho.max_abs() > 0.1);
    assert!(t.relative_pattern_defect() < 1e-8, "{}", t.pattern_defect);
    assert!(t.scal_max < 1e-8 * t.curvature_scale);
    assert!(t.leaf_block < 1e-8 && t.leaf_ricci < 1e-12);
    assert!(t.marginal_chain < 1e-8);
    assert!(t.killing_parallel < 1e-13);
    // ρ against the closed-form constraints.
    let closed = kd.base().closed_form().unwrap();
    for p in [5, 200, 4000] {
        let c = closed.constraints_at(&g.point(p)).unwrap();
        assert!((t.rho.at(0, p) - c.rho).abs() < 1e-9);
        assert!((t.einstein.at2(0, 0, p) - c.rho).abs() < 1e-8);
        assert!((t.einstein.at2(0, 3, p) + c.rho).abs() < 1e-8);
    }
    // ρ = −Δ(φ²)/(2φ²) changes sign, so DEC fails somewhere.
    let dec = kd_dec_check(&t, 64, 1e-8);
    assert!(!dec.holds() && dec.violations > 0);
}

#[test]
fn dec_negative_control_is_localized() {
    let g = grid(3, 9, 8);
    let bad = 13;
    let ein = Field::from_fn(&g, Kind::Tensor2, 1, |p, out| {
        let r = if p == bad { -0.5 } else { 1.0 + p as f64 * 0.01 };
        out[0] = r;
        out[3] = -r;
        out[12] = -r;
        out[15] = r;
    });
    let dec = dec_check_frame(&ein, 64, 1e-8);
    assert!(!dec.holds());
    assert_eq!(dec.violations, 1);
    assert_eq!(dec.node, bad);
    assert_eq!(dec.coords, g.coords(bad));
    // Null dust with ρ ≥ 0 is DEC.
    let ok = Field::from_fn(&g, Kind::Tensor2, 1, |_, out| {
        out[0] = 2.0;
        out[3] = -2.0;
        out[12] = -2.0;
        out[15] = 2.0;
    });
    let dec = dec_check_frame(&ok, 64, 1e-8);
    assert!(dec.holds() && dec.min >= 0.0);
}

#[test]
fn ppwave_formula_matches_grid_curvature() {
    let g = grid(3, 9, 16);
    let spec = PpWaveSpec::new(3, e("sin(2*pi*x1)"));
    let r = ppwave_einstein_check(&spec, &g, 64, 1e-8).unwrap();
    assert!(r.formula_residual < 1e-10, "{}", r.formula_residual);
    assert!(r.parallel_residual < 1e-14);
    assert!(r.scal_max < 1e-10);
    assert!(!r.superharmonic && !r.dec.holds());
    // Ein_ss = −½Δf = +2π² sin(2πx1)
    let p = g.flat_index(&[4, 3, 5]);
    let x1 = g.coords(p)[1];
    let want = 2.0 * PI * PI * (2.0 * PI * x1).sin();
    assert!((r.einstein.at2(1, 1, p) - want).abs() < 1e-10);
    // Oracle agrees with the formula.
    let sym = spec.sym_metric().at(&g.point(p)).unwrap().einstein();
    assert!((sym[5] - want).abs() < 1e-10);
}

#[test]
fn ppwave_minkowski_and_superharmonic_profiles() {
    let g = grid(3, 9, 8);
    let flat = ppwave_einstein_check(&PpWaveSpec::new(3, e("0")), &g, 64, 1e-8).unwrap();
    assert!(flat.einstein.max_abs() < 1e-14 && flat.dec.holds());
    // On a torus the only superharmonic profiles are leaf-constant.
    let r = ppwave_einstein_check(&PpWaveSpec::new(3, e("2 + s^2")), &g, 64, 1e-8).unwrap();
    assert!(r.superharmonic && r.dec.holds());
    assert!(r.formula_residual < 1e-12);
}

#[test]
fn induced_unit_profile_is_marginal() {
    let g = grid(3, 9, 8);
    let spec = PpWaveSpec::new(3, e("1"));
    let ind = induce_from_ppwave(&spec, &g, &e("0")).unwrap();
    let c = ind.ids.constraints().unwrap();
    let jn = ind.ids.metric().dot_covectors(&c.j, &c.j).unwrap();
    for p in 0..g.len() {
        assert!((c.rho.at(0, p) - jn.at(0, p).sqrt()).abs() < 1e-12);
    }
    // Flat g; ∂_v is a parallel lightlike field on the data.
    let gm = ind.ids.metric().g();
    for c in 0..9 {
        let want = if c % 4 == 0 { 1.0 } else { 0.0 };
        assert!(gm.comp(c).iter().all(|&v| v == want));
    }
    assert!(ind.v.is_lightlike(ind.ids.metric(), 1e-13).unwrap());
    let par = crate::initial_data::ambient_gradient(&ind.ids, &ind.v).unwrap();
    assert!(par.iter().all(|w| w.max_abs() < 1e-13));
}

fn round_trip(f: &str, w: &str, g: &Arc<Grid>) -> f64 {
    let spec = PpWaveSpec::new(g.dim(), e(f));
    let w = e(w);
    let ind = induce_from_ppwave(&spec, g, &w).unwrap();
    let kd = build_kd(&ind.ids, &ind.v, 1e-8).unwrap();
    let t = kd_einstein(&kd).unwrap();
    let want = ppwave_frame_table(&spec, &w, &kd).unwrap();
    t.einstein.max_abs_diff(&want)
}

#[test]
fn ppwave_round_trip_reproduces_einstein_table() {
    let g = grid(3, 9, 32);
    let d = round_trip("1.5 + 0.5*sin(2*pi*x1)*cos(2*pi*x2)", "0", &g);
    assert!(d < 1e-8, "{d}");
    // A curved graph: g_ss = f − 2∂_s w stays linear in s.
    let d = round_trip("2 + 0.3*cos(2*pi*x2)", "0.1*s^2", &g);
    assert!(d < 1e-8, "{d}");
}

#[test]
fn non_spacelike_and_non_product_graphs_are_rejected() {
    let g = grid(3, 9, 8);
    let spec = PpWaveSpec::new(3, e("sin(2*pi*x1)"));
    match induce_from_ppwave(&spec, &g, &e("0")) {
        Err(KdError::NotSpacelike { coords, .. }) => assert!((2.0 * PI * coords[1]).sin() <= 0.0),
        other => panic!("expected NotSpacelike, got {other:?}"),
    }
    let spec = PpWaveSpec::new(3, e("2"));
    assert!(matches!(
        induce_from_ppwave(&spec, &g, &e("0.1*sin(2*pi*x1)")),
        Err(KdError::Data(DataError::NotProductForm { .. }))
    ));
}

#[test]
fn non_transversal_field_is_rejected() {
    let ids = rigid_recipe(&e("1"), &grid(3, 9, 8)).unwrap();
    let mut v = build_parallel_candidate(&ids).unwrap();
    v.a.set(0, 7, 0.0);
    assert!(matches!(
        build_kd(&ids, &v, 1e-8),
        Err(KdError::Data(DataError::NotTransversal { node: 7, .. }))
    ));
}
