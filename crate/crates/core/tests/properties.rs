//! Property tests across modules.

use std::sync::Arc;

use proptest::prelude::*;

use idrig::exprlang::{parse, Expr, Var};
use idrig::geometry::MetricField;
use idrig::initial_data::InitialDataSet;
use idrig::killing_dev::{null_directions, orthonormal_frame};
use idrig::mesh::{partial, sample, sample_scalar, Field, Grid, Kind, Scheme};
use idrig::rigidity::random::FieldSampler;
use idrig::rigidity::{hodge_decompose, rigid_recipe, tt_split, RigidReport};

fn grid(n: usize, ns: usize, nx: usize) -> Arc<Grid> {
    Arc::new(Grid::product(n, 1.0, ns, &vec![nx; n - 1], &vec![1.0; n - 1]).unwrap())
}

fn torus_metric(shape: &[usize], g: &[f64]) -> MetricField {
    let grid = Arc::new(Grid::torus(shape, &vec![1.0; shape.len()], 0.0).unwrap());
    MetricField::new(Field::from_fn(&grid, Kind::Sym2, 0, |_, o| o.copy_from_slice(g))).unwrap()
}

/// Random 3×3 SPD matrix `A Aᵀ + I`.
fn spd3() -> impl Strategy<Value = [f64; 9]> {
    prop::array::uniform9(-0.5f64..0.5).prop_map(|a| {
        let mut g = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[i * 3 + j] = (0..3).map(|k| a[i * 3 + k] * a[j * 3 + k]).sum::<f64>()
                    + if i == j { 1.0 } else { 0.0 };
            }
        }
        g
    })
}

/// Small expression trees over `s`, `x1`, `x2` that stay in every domain.
fn expr_tree() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("s".to_string()),
        Just("sin(2*pi*x1)".to_string()),
        Just("cos(2*pi*x2)".to_string()),
        (-3.0f64..3.0).prop_map(|c| format!("({c})")),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("exp(0.3*{a})")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("-({a})^2")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_reparses_to_the_same_function(src in expr_tree(), s in 0.0f64..1.0, x in 0.0f64..1.0) {
        let e = parse(&src).unwrap();
        let again = parse(&e.to_string()).unwrap();
        let p = [s, x, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let (a, b) = (e.eval(&p).unwrap(), again.eval(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn symbolic_derivative_matches_central_difference(src in expr_tree(), s in 0.1f64..0.9, x in 0.0f64..1.0) {
        let e = parse(&src).unwrap();
        let d = e.diff(Var::S);
        let h = 1e-5;
        let at = |s: f64| e.eval(&[s, x, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let fd = (at(s + h) - at(s - h)) / (2.0 * h);
        let exact = d.eval(&[s, x, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{src}: {fd} vs {exact}");
    }

    #[test]
    fn fd4_is_exact_on_quartics(c in prop::array::uniform5(-2.0f64..2.0), ns in 9usize..40) {
        let src = format!("{} + {}*s + {}*s^2 + {}*s^3 + {}*s^4", c[0], c[1], c[2], c[3], c[4]);
        let e = parse(&src).unwrap();
        let g = grid(2, ns, 8);
        let f = sample_scalar(&e, &g).unwrap();
        let d = partial(&f, 0, Scheme::Fd4).unwrap();
        let exact = sample_scalar(&e.diff(Var::S), &g).unwrap();
        prop_assert!(d.max_abs_diff(&exact) < 1e-9);
    }

    #[test]
    fn spectral_is_exact_on_trig_polynomials(a in prop::array::uniform4(-1.0f64..1.0), m in 1i32..7) {
        let src = format!(
            "{}*sin(2*pi*{m}*x1) + {}*cos(2*pi*x1) + {}*sin(2*pi*(x1 + {m}*x2)) + {}",
            a[0], a[1], a[2], a[3]
        );
        let e = parse(&src).unwrap();
        let g = grid(3, 9, 16);
        let f = sample_scalar(&e, &g).unwrap();
        for axis in 1..3 {
            let d = partial(&f, axis, Scheme::Spectral).unwrap();
            let exact = sample_scalar(&e.diff(Var::leaf(axis).unwrap()), &g).unwrap();
            prop_assert!(d.max_abs_diff(&exact) < 1e-10);
        }
    }

    #[test]
    fn constant_k_multiple_of_g_has_rho_n_choose_2(c in -2.0f64..2.0) {
        // k = c g on flat data: ρ = ½(n² − n)c², j = 0.
        let g = grid(3, 9, 8);
        let id: Vec<Expr> = (0..4).map(|i| Expr::constant(if i % 3 == 0 { 1.0 } else { 0.0 })).collect();
        let k: Vec<Expr> = (0..9).map(|i| Expr::constant(if i % 4 == 0 { c } else { 0.0 })).collect();
        let ids = InitialDataSet::from_exprs(&g, &Expr::constant(1.0), &id, &k).unwrap();
        let con = ids.constraints().unwrap();
        let want = 3.0 * c * c;
        prop_assert!(con.rho.comp(0).iter().all(|r| (r - want).abs() < 1e-12));
        prop_assert!(con.j.max_abs() < 1e-12);
    }

    #[test]
    fn riemann_symmetries_hold_for_any_metric(a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let g = grid(3, 9, 8);
        let src = [
            format!("1 + {a}*sin(2*pi*x1)*s"), format!("{b}*cos(2*pi*x2)"), "0".into(),
            format!("{b}*cos(2*pi*x2)"), format!("1.2 + {b}*s^2"), format!("{a}*sin(2*pi*x2)"),
            "0".into(), format!("{a}*sin(2*pi*x2)"), format!("0.9 + {a}*cos(2*pi*x1)"),
        ];
        let ex: Vec<Expr> = src.iter().map(|s| parse(s).unwrap()).collect();
        let m = MetricField::new(sample(&ex, &g, Kind::Sym2).unwrap()).unwrap();
        let r = m.riemann().unwrap();
        prop_assert!(r.symmetry_defect() < 1e-10 * r.scale());
        prop_assert!(r.bianchi_defect() < 1e-10 * r.scale());
        prop_assert!(m.inverse_defect() < 1e-13);
    }

    #[test]
    fn frames_are_orthonormal(g3 in spd3(), lapse in 0.5f64..2.0) {
        // Lorentzian block-diagonal metric diag(−lapse², g3).
        let d = 4;
        let mut g = vec![0.0; 16];
        g[0] = -lapse * lapse;
        for i in 0..3 {
            for j in 0..3 {
                g[(i + 1) * d + j + 1] = g3[i * 3 + j];
            }
        }
        let f = orthonormal_frame(&g, d, &[vec![1.0, 0.1, 0.0, 0.0]]).unwrap();
        for a in 0..d {
            for b in 0..d {
                let s: f64 = (0..d).flat_map(|m| (0..d).map(move |q| (m, q)))
                    .map(|(m, q)| g[m * d + q] * f[a][m] * f[b][q]).sum();
                let want = if a != b { 0.0 } else if a == 0 { -1.0 } else { 1.0 };
                prop_assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn null_directions_are_unit(m in 1usize..5, count in 1usize..80) {
        for v in null_directions(m, count) {
            prop_assert_eq!(v.len(), m);
            let n: f64 = v.iter().map(|x| x * x).sum();
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hodge_split_reconstructs(seed in any::<u64>(), g3 in spd3()) {
        let gm = torus_metric(&[8, 8, 8], &g3);
        let w = FieldSampler::new(seed, 2).covector(gm.grid(), true).unwrap();
        let h = hodge_decompose(&w, &gm).unwrap();
        prop_assert!(h.reconstruction_defect(&w) < 1e-12 * w.max_abs().max(1.0));
        prop_assert!(h.orthogonality_defect(&gm).unwrap() < 1e-11);
    }

    #[test]
    fn tt_split_of_random_deformations(seed in any::<u64>(), g3 in spd3()) {
        let gm = torus_metric(&[8, 8, 8], &g3);
        let d = FieldSampler::new(seed, 2).deformation(&gm).unwrap();
        let s = tt_split(&d.gdot, &gm, 1e-10).unwrap();
        let (div, tr) = s.tt_defects(&gm).unwrap();
        prop_assert!(div < 1e-9 && tr < 1e-10, "{div} {tr}");
        prop_assert!((s.c - d.c0).abs() < 1e-11);
    }

    #[test]
    fn recipe_is_leafwise_parallel(a in 0.0f64..0.3, b in 0.0f64..0.3, c in -0.3f64..0.3) {
        let phi = format!("1.5 + {a}*sin(2*pi*x1) + {b}*cos(2*pi*x2)*s + {c}*s");
        let ids = rigid_recipe(&parse(&phi).unwrap(), &grid(3, 9, 32)).unwrap();
        let r = RigidReport::compute(&ids).unwrap();
        prop_assert!(r.addrigid.max < 1e-10, "{:?}", r.addrigid);
        prop_assert!(r.chi.max < 1e-10);
    }
}
