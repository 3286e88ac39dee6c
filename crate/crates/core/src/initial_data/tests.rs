use std::sync::Arc;

use super::*;
use crate::exprlang::parse;
use crate::geometry::MetricField;
use crate::mesh::{sample, Grid};

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn es(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| e(s)).collect()
}

fn grid(n: usize, ns: usize, nx: usize) -> Arc<Grid> {
    Arc::new(Grid::product(n, 1.0, ns, &vec![nx; n - 1], &vec![1.0; n - 1]).unwrap())
}

fn identity(m: usize) -> Vec<Expr> {
    (0..m * m)
        .map(|c| Expr::constant(if c / m == c % m { 1.0 } else { 0.0 }))
        .collect()
}

fn flat(n: usize, k: Vec<Expr>) -> InitialDataSet {
    InitialDataSet::from_exprs(&grid(n, 9, 8), &e("1"), &identity(n - 1), &k).unwrap()
}

#[test]
fn constraint_examples() {
    let ids = flat(3, vec![Expr::constant(0.0); 9]);
    let c = ids.constraints().unwrap();
    assert!(c.rho.max_abs() < 1e-12 && c.j.max_abs() < 1e-12);

    let ids = flat(3, identity(3));
    let c = ids.constraints().unwrap();
    assert!(c.rho.comp(0).iter().all(|v| (v - 3.0).abs() < 1e-12));
    assert!(c.j.max_abs() < 1e-12);
}

#[test]
fn constraints_match_oracle() {
    let phi = e("exp(0.2*sin(2*s) + 0.1*cos(2*pi*x1))");
    let leaf = es(&["1 + 0.1*s", "0.05*sin(2*pi*x2)", "0.05*sin(2*pi*x2)", "1"]);
    let k = es(&[
        "0.3*cos(s)", "0.1*sin(2*pi*x1)", "0",
        "0.1*sin(2*pi*x1)", "0.2", "0.1*s",
        "0", "0.1*s", "-0.1*cos(2*pi*x2)",
    ]);
    let mut errs = Vec::new();
    for ns in [17, 33, 65] {
        let g = grid(3, ns, 16);
        let ids = InitialDataSet::from_exprs(&g, &phi, &leaf, &k).unwrap();
        let c = ids.constraints().unwrap();
        let oracle = ids.closed_form().unwrap();
        let mut err = 0.0f64;
        for p in 0..g.len() {
            let ex = oracle.constraints_at(&g.point(p)).unwrap();
            err = err.max((c.rho.at(0, p) - ex.rho).abs());
            for b in 0..3 {
                err = err.max((c.j.at(b, p) - ex.j[b]).abs());
            }
        }
        errs.push(err);
    }
    assert!(errs[2] < 1e-4, "{errs:?}");
    assert!((errs[1] / errs[2]).log2() > 2.8, "{errs:?}");
}

#[test]
fn dec_examples() {
    let ids = flat(2, vec![Expr::constant(0.0); 4]);
    let c = ids.constraints().unwrap();
    let m = dec_margin(&c.rho, &c.j, ids.metric()).unwrap();
    assert!(m.max_abs() < 1e-12);
    assert!(dec_holds(&m, default_dec_tol(&c.rho)));

    let one = Field::constant(ids.grid(), 1.0);
    let zero = Field::zeros(ids.grid(), Kind::Covector);
    let m = dec_margin(&one, &zero, ids.metric()).unwrap();
    assert!(m.comp(0).iter().all(|&v| v == 1.0));

    let j = sample(&es(&["2", "0"]), ids.grid(), Kind::Covector).unwrap();
    let m = dec_margin(&one, &j, ids.metric()).unwrap();
    assert!(!dec_holds(&m, 1e-8));
}

#[test]
fn rejects_invalid_data() {
    let g = grid(2, 9, 8);
    assert!(matches!(
        InitialDataSet::from_exprs(&g, &e("s - 0.5"), &identity(1), &identity(2)),
        Err(DataError::NonPositiveLapse { .. })
    ));
    let gf = sample(&es(&["1", "0.1", "0.1", "1"]), &g, Kind::Sym2).unwrap();
    let k = sample(&identity(2), &g, Kind::Sym2).unwrap();
    assert!(matches!(
        InitialDataSet::from_fields(Field::constant(&g, 1.0), gf, k.clone()),
        Err(DataError::NotProductForm { .. })
    ));
    assert!(matches!(
        InitialDataSet::from_exprs(&g, &e("1"), &identity(2), &identity(2)),
        Err(DataError::ComponentCount { .. })
    ));
}

/// Data whose fields are at most linear in `s`, so fd4 differentiates all
/// products exactly along the interval.
fn smooth_data() -> InitialDataSet {
    let g = grid(3, 33, 32);
    let phi = e("(1 + 0.2*s)*exp(0.1*sin(2*pi*x1))");
    let leaf = es(&["1 + 0.1*cos(2*pi*x2)", "0.05*sin(2*pi*x1)", "0.05*sin(2*pi*x1)", "1.2"]);
    let k = es(&[
        "0.3 + 0.1*s", "0.2*sin(2*pi*x2)", "0",
        "0.2*sin(2*pi*x2)", "0.1*cos(2*pi*x1)", "0.05",
        "0", "0.05", "-0.2*s",
    ]);
    InitialDataSet::from_exprs(&g, &phi, &leaf, &k).unwrap()
}

#[test]
fn ambient_connection_reduces_and_specializes() {
    let ids = flat(3, vec![Expr::constant(0.0); 9]);
    let g = ids.grid();
    let v = AmbientVector::new(
        sample(&[e("sin(2*pi*x1)")], g, Kind::Scalar).unwrap(),
        sample(&es(&["s", "cos(2*pi*x2)", "1"]), g, Kind::Vector).unwrap(),
    )
    .unwrap();
    let y = sample(&es(&["1", "2", "0"]), g, Kind::Vector).unwrap();
    let r = ambient_connection(&ids, &y, &v).unwrap();
    let da = sample(&[e("4*pi*cos(2*pi*x1)")], g, Kind::Scalar).unwrap();
    assert!(r.a.max_abs_diff(&da) < 1e-10);
    let dx = sample(&es(&["1", "0", "0"]), g, Kind::Vector).unwrap();
    assert!(r.x.max_abs_diff(&dx) < 1e-10);

    let ids = smooth_data();
    let e0 = AmbientVector::e0(&ids);
    let y = sample(&es(&["0.5", "1", "-1"]), ids.grid(), Kind::Vector).unwrap();
    let r = ambient_connection(&ids, &y, &e0).unwrap();
    assert!(r.a.max_abs() < 1e-14);
    let m = ids.metric();
    let ky = Field::from_fn(ids.grid(), Kind::Covector, 0, |p, out| {
        for b in 0..3 {
            out[b] = (0..3).map(|c| y.at(c, p) * ids.k().at2(c, b, p)).sum();
        }
    });
    assert!(r.x.max_abs_diff(&m.raise(&ky).unwrap()) < 1e-13);
}

#[test]
fn ambient_connection_is_metric() {
    let ids = smooth_data();
    let g = ids.grid();
    let v = AmbientVector::new(
        sample(&[e("1 + 0.3*s*cos(2*pi*x2)")], g, Kind::Scalar).unwrap(),
        sample(&es(&["0.2 - s", "sin(2*pi*(x1 + x2))", "0.5*s"]), g, Kind::Vector).unwrap(),
    )
    .unwrap();
    let w = AmbientVector::new(
        sample(&[e("exp(sin(2*pi*x1))")], g, Kind::Scalar).unwrap(),
        sample(&es(&["1", "s*cos(2*pi*x1)", "-0.4"]), g, Kind::Vector).unwrap(),
    )
    .unwrap();
    for ysrc in [["1", "0", "0"], ["0", "1", "0"], ["0.3", "-1", "2"]] {
        let y = sample(&es(&ysrc), g, Kind::Vector).unwrap();
        let r = metricity_residual(&ids, &y, &v, &w).unwrap();
        assert!(r < 1e-10, "metricity residual {r}");
    }
}

#[test]
fn gauss_codazzi_cross_check() {
    let ids = smooth_data();
    let n = 3;
    let m = ids.metric();
    let curv = ambient_curvature(&ids, &AmbientVector::e0(&ids)).unwrap();
    let nk = m.covariant_derivative(ids.k()).unwrap();
    let mut worst = 0.0f64;
    for p in 0..ids.grid().len() {
        for c in 0..n {
            for d in 0..n {
                assert!(curv.a.at(c * n + d, p).abs() < 1e-9);
                for b in 0..n {
                    let lowered: f64 = (0..n)
                        .map(|q| m.g().at2(b, q, p) * curv.x.at((c * n + d) * n + q, p))
                        .sum();
                    let codazzi = nk.at(nk.idx3(c, d, b), p) - nk.at(nk.idx3(d, c, b), p);
                    worst = worst.max((lowered - codazzi).abs());
                }
            }
        }
    }
    assert!(worst < 1e-8, "Codazzi defect {worst}");

    // Gauss: ḡ(R̄(∂_c,∂_d)∂_b, ∂_a) = R_abcd + k_db k_ca − k_cb k_da.
    let riem = m.riemann().unwrap().riemann;
    let k = ids.k();
    for b in 0..n {
        let zb = Field::from_fn(ids.grid(), Kind::Vector, 0, |_, o| o[b] = 1.0);
        let v = AmbientVector::new(Field::constant(ids.grid(), 0.0), zb).unwrap();
        let cv = ambient_curvature(&ids, &v).unwrap();
        let mut worst = 0.0f64;
        for p in 0..ids.grid().len() {
            for a in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs: f64 = (0..n)
                            .map(|q| m.g().at2(a, q, p) * cv.x.at((c * n + d) * n + q, p))
                            .sum();
                        let rhs = riem.at(riem.idx4(a, b, c, d), p)
                            + k.at2(d, b, p) * k.at2(c, a, p)
                            - k.at2(c, b, p) * k.at2(d, a, p);
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-7, "Gauss defect {worst}");
    }
}

#[test]
fn leaf_null_geometry_examples() {
    let ids = flat(3, vec![Expr::constant(0.0); 9]);
    let ld = leaf_null_geometry(&ids, 3).unwrap();
    assert!(ld.chi.max_abs() < 1e-14 && ld.theta.max_abs() < 1e-14);
    assert!(ld.nu_norm_defect < 1e-12);

    let c = 0.7;
    let k: Vec<Expr> = identity(3).into_iter().map(|x| Expr::Mul(Box::new(x), Box::new(Expr::constant(c)))).collect();
    let ids = flat(3, k);
    let ld = leaf_null_geometry(&ids, 0).unwrap();
    assert!(ld.theta.comp(0).iter().all(|t| (t - 2.0 * c).abs() < 1e-12));
    assert!(ld.trace_defect() < 1e-12);

    let eps = 0.3;
    let phi = e("1.5 + 0.2*s");
    let leaf = es(&["(1 + 0.3*s)^2", "0", "0", "(1 + 0.3*s)^2"]);
    let ids = InitialDataSet::from_exprs(&grid(3, 33, 8), &phi, &leaf, &vec![Expr::constant(0.0); 9]).unwrap();
    let ng = NullGeometry::compute(&ids).unwrap();
    let g = ids.grid();
    for p in 0..g.len() {
        let s = g.point(p)[0];
        let want = 2.0 * eps / ((1.0 + eps * s) * (1.5 + 0.2 * s));
        assert!((ng.theta.at(0, p) - want).abs() < 1e-6);
    }
    let ld = leaf_null_geometry(&ids, 5).unwrap();
    assert!(ld.trace_defect() < 1e-12);
}

#[test]
fn transport_on_flat_data_is_trivial() {
    let ids = flat(3, vec![Expr::constant(0.0); 9]);
    let t = parallel_transport(&ids, 1.0, &[0.5, -0.3, 0.2], &[2, 3, 4], &[(0, 4), (1, -9), (2, 3), (0, -2)]).unwrap();
    assert!((t.a - 1.0).abs() < 1e-14);
    assert!((t.x[0] - 0.5).abs() < 1e-14 && (t.x[1] + 0.3).abs() < 1e-14);
    assert_eq!(t.end, vec![4, 2, 7]);
    assert!(t.drift < 1e-14);
    let want_len = 4.0 / 8.0 + 9.0 / 8.0 + 3.0 / 8.0 + 2.0 / 8.0;
    assert!((t.length - want_len).abs() < 1e-12);
    assert!(matches!(
        parallel_transport(&ids, 1.0, &[0.0; 3], &[2, 0, 0], &[(0, 7)]),
        Err(DataError::Path(PathError::LeavesInterval { .. }))
    ));
}

#[test]
fn transport_conserves_norm() {
    let ids = smooth_data();
    let t = parallel_transport(&ids, 1.0, &[0.2, 0.5, -0.1], &[3, 0, 5], &[(0, 20), (1, 32), (2, -7), (0, -10)]).unwrap();
    assert!(t.drift / t.length < 1e-8, "drift {} length {}", t.drift, t.length);
}

#[test]
fn leaf_metric_is_metric() {
    let ids = smooth_data();
    let lm: MetricField = ids.leaf_metric(4).unwrap();
    assert_eq!(lm.dim(), 2);
    assert!(lm.inverse_defect() < 1e-14);
}
