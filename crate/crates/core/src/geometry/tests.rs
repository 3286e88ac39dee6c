use std::sync::Arc;

use super::*;
use crate::exprlang::{parse, Expr};
use crate::mesh::{sample, sample_scalar, Grid};
use crate::symbolic::SymMetric;

fn exprs(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| parse(s).unwrap()).collect()
}

fn metric_on(grid: &Arc<Grid>, src: &[&str]) -> MetricField {
    MetricField::new(sample(&exprs(src), grid, Kind::Sym2).unwrap()).unwrap()
}

fn grid(n: usize, ns: usize, nx: usize) -> Arc<Grid> {
    Arc::new(Grid::product(n, 1.0, ns, &vec![nx; n - 1], &vec![1.0; n - 1]).unwrap())
}

#[test]
fn flat_metric_has_no_curvature() {
    let g = grid(3, 9, 8);
    let m = metric_on(&g, &["1", "0", "0", "0", "1", "0", "0", "0", "1"]);
    assert_eq!(m.christoffels().max_abs(), 0.0);
    let c = m.riemann().unwrap();
    assert!(c.riemann.max_abs() < 1e-12);
    assert!(c.scal.max_abs() < 1e-12);
    assert!(m.inverse_defect() < 1e-15);
}

#[test]
fn rejects_indefinite_metric() {
    let g = grid(2, 9, 8);
    let f = sample(&exprs(&["1", "0", "0", "s - 0.5"]), &g, Kind::Sym2).unwrap();
    assert!(matches!(
        MetricField::new(f),
        Err(GeometryError::NotPositiveDefinite { .. })
    ));
}

#[test]
fn exponential_lapse_christoffels() {
    let g = grid(2, 33, 8);
    let m = metric_on(&g, &["exp(2*s)", "0", "0", "1"]);
    let gam = m.christoffels();
    let want = 1.0;
    let err = gam.comp(0).iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
    assert!(err < 1e-5, "Γ^s_ss error {err}");
    for c in 1..8 {
        assert!(gam.comp(c).iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn metric_compatibility_is_algebraic() {
    let g = grid(3, 17, 16);
    let m = metric_on(
        &g,
        &[
            "exp(0.2*sin(2*pi*x1))*(1+0.1*s)",
            "0.1*cos(2*pi*x2)",
            "0",
            "0.1*cos(2*pi*x2)",
            "1 + 0.2*s^2",
            "0.05*sin(2*pi*(x1+x2))",
            "0",
            "0.05*sin(2*pi*(x1+x2))",
            "2",
        ],
    );
    assert!(m.compatibility_residual().unwrap() < 1e-10);
    assert!(m.inverse_defect() < 1e-12);
}

#[test]
fn scalar_curvature_converges_to_oracle() {
    let src = ["exp(0.6*sin(2*s) + 0.2*sin(2*pi*x1))", "0", "0", "1 + 0.3*s*s*(1 + 0.2*cos(2*pi*x1))"];
    let sym = SymMetric::new(2, 0, exprs(&src));
    let mut errs = Vec::new();
    for ns in [17, 33, 65] {
        let g = grid(2, ns, 16);
        let m = metric_on(&g, &src);
        let c = m.riemann().unwrap();
        let mut err = 0.0f64;
        for p in 0..g.len() {
            let exact = sym.at(&g.point(p)).unwrap().scal;
            err = err.max((c.scal.at(0, p) - exact).abs());
        }
        errs.push(err);
        assert!(c.symmetry_defect() < 1e-9 * c.scale());
        assert!(c.bianchi_defect() < 1e-9 * c.scale());
    }
    let order = (errs[1] / errs[2]).log2();
    assert!(order > 2.8, "errors {errs:?}");
}

#[test]
fn leaf_dependent_lapse_is_spectral() {
    let src = [
        "exp(2*0.01*sin(2*pi*x1))", "0", "0",
        "0", "1", "0",
        "0", "0", "1",
    ];
    let sym = SymMetric::new(3, 0, exprs(&src));
    let g = grid(3, 9, 16);
    let m = metric_on(&g, &src);
    let c = m.riemann().unwrap();
    for p in 0..g.len() {
        let exact = sym.at(&g.point(p)).unwrap().scal;
        assert!((c.scal.at(0, p) - exact).abs() < 1e-10);
    }
}

#[test]
fn contracted_bianchi() {
    let src = ["1 + 0.2*s^2 + 0.1*sin(2*pi*x1)", "0", "0", "exp(0.3*s*cos(2*pi*x1))"];
    let g = grid(2, 65, 32);
    let m = metric_on(&g, &src);
    let c = m.riemann().unwrap();
    let div_ric = m.div_sym2(&c.ricci).unwrap();
    let dscal = exterior_d(&c.scal).unwrap().scale(0.5);
    let defect = div_ric.sub(&dscal).unwrap();
    // Interior nodes only: second derivatives are third order at the boundary.
    let mut err = 0.0f64;
    for p in 0..g.len() {
        let i = g.multi_index(p)[0];
        if i > 4 && i < 60 {
            err = err.max(defect.at(0, p).abs()).max(defect.at(1, p).abs());
        }
    }
    assert!(err < 1e-4, "contracted Bianchi defect {err}");
}

#[test]
fn lie_derivative_identities() {
    let g = grid(3, 9, 16);
    let flat = metric_on(&g, &["1", "0", "0", "0", "1", "0", "0", "0", "1"]);
    let zero = Field::zeros(&g, Kind::Vector);
    assert_eq!(flat.lie_metric(&zero).unwrap().max_abs(), 0.0);

    let w = sample(&exprs(&["0", "sin(2*pi*x1)", "0"]), &g, Kind::Vector).unwrap();
    let l = flat.lie_metric(&w).unwrap();
    let want = sample_scalar(&parse("4*pi*cos(2*pi*x1)").unwrap(), &g).unwrap();
    assert!(l.component(l.idx2(1, 1)).max_abs_diff(&want) < 1e-11);
    for c in 0..9 {
        if c != 4 {
            assert!(l.comp(c).iter().all(|v| v.abs() < 1e-11));
        }
    }

    let curved = metric_on(
        &g,
        &["2", "0", "0", "0", "1 + 0.1*sin(2*pi*x2)", "0.2", "0", "0.2", "1.5"],
    );
    let w = sample(
        &exprs(&["s", "cos(2*pi*x1)", "sin(2*pi*(x1 - x2))"]),
        &g,
        Kind::Vector,
    )
    .unwrap();
    let tr = curved.trace_sym2(&curved.lie_metric(&w).unwrap()).unwrap();
    let div = curved.div_vector(&w).unwrap().scale(2.0);
    assert!(tr.max_abs_diff(&div) < 1e-10);
}

#[test]
fn divergence_and_trace() {
    let g = grid(3, 17, 16);
    let m = metric_on(
        &g,
        &["1 + 0.1*s", "0", "0", "0", "1", "0.1*sin(2*pi*x1)", "0", "0.1*sin(2*pi*x1)", "1"],
    );
    let div_g = m.div_sym2(m.g()).unwrap();
    assert!(div_g.max_abs() < 1e-10);
    let tr = m.trace_sym2(m.g()).unwrap();
    assert!(tr.comp(0).iter().all(|v| (v - 3.0).abs() < 1e-12));

    let f = sample_scalar(&parse("cos(2*pi*x2) + 0.5*s*s").unwrap(), &g).unwrap();
    let t = m.g().mul_scalar(&f).unwrap();
    let j = m.div_sym2(&t).unwrap().sub(&exterior_d(&m.trace_sym2(&t).unwrap()).unwrap()).unwrap();
    let want = exterior_d(&f).unwrap().scale(-2.0);
    assert!(j.max_abs_diff(&want) < 1e-9);

    let flat = metric_on(&g, &["1", "0", "0", "0", "1", "0", "0", "0", "1"]);
    let c = sample(
        &exprs(&["1", "2", "3", "2", "5", "6", "3", "6", "9"]),
        &g,
        Kind::Sym2,
    )
    .unwrap();
    assert_eq!(flat.div_sym2(&c).unwrap().max_abs(), 0.0);
    let nonsym = c.clone().retag(Kind::Tensor2);
    assert!(flat.div_sym2(&nonsym).is_err());
}

fn torus(n: usize) -> Arc<Grid> {
    Arc::new(Grid::torus(&[n, n], &[1.0, 1.0], 0.0).unwrap())
}

#[test]
fn d_squared_vanishes() {
    let t = torus(16);
    let f = sample_scalar(&parse("exp(sin(2*pi*x1))*cos(2*pi*x2)").unwrap(), &t).unwrap();
    let ddf = exterior_d(&exterior_d(&f).unwrap()).unwrap();
    assert!(ddf.max_abs() < 1e-12);
    let g3 = grid(3, 9, 16);
    let w = sample(&exprs(&["s*x1", "sin(2*pi*x2)", "cos(2*pi*x1)*s"]), &g3, Kind::Covector).unwrap();
    let ddw = exterior_d(&exterior_d(&w).unwrap()).unwrap();
    assert!(ddw.max_abs() < 1e-10);
    assert!(matches!(exterior_d(&ddw), Err(GeometryError::Rank(3))));
}

#[test]
fn codifferential_is_adjoint() {
    let t = torus(16);
    let m = MetricField::new(
        sample(&exprs(&["2", "0.3", "0.3", "1"]), &t, Kind::Sym2).unwrap(),
    )
    .unwrap();
    let w = sample(
        &exprs(&["sin(2*pi*x1)*cos(2*pi*x2)", "exp(cos(2*pi*x2))"]),
        &t,
        Kind::Covector,
    )
    .unwrap();
    let b01 = parse("sin(2*pi*(x1 + 2*x2)) + 0.3").unwrap();
    let beta = sample(
        &[Expr::constant(0.0), b01.clone(), Expr::Neg(Box::new(b01)), Expr::constant(0.0)],
        &t,
        Kind::TwoForm,
    )
    .unwrap();
    let lhs = l2_inner(&exterior_d(&w).unwrap(), &beta, &m).unwrap();
    let rhs = l2_inner(&w, &codifferential(&beta, &m).unwrap(), &m).unwrap();
    assert!((lhs - rhs).abs() < 1e-11, "{lhs} vs {rhs}");

    let f = sample_scalar(&parse("cos(2*pi*x1)*sin(2*pi*x2)").unwrap(), &t).unwrap();
    let lhs = l2_inner(&exterior_d(&f).unwrap(), &w, &m).unwrap();
    let rhs = l2_inner(&f, &codifferential(&w, &m).unwrap(), &m).unwrap();
    assert!((lhs - rhs).abs() < 1e-11, "{lhs} vs {rhs}");
}

#[test]
fn hodge_laplacian_examples() {
    let t = torus(16);
    let m = MetricField::new(sample(&exprs(&["1", "0", "0", "1"]), &t, Kind::Sym2).unwrap()).unwrap();
    let c = sample(&exprs(&["1.5", "-2"]), &t, Kind::Covector).unwrap();
    assert!(hodge_laplacian(&c, &m).unwrap().max_abs() < 1e-12);
    // Eigenform: △ (sin 2πx1 dx2) = 4π² sin 2πx1 dx2.
    let w = sample(&exprs(&["0", "sin(2*pi*x1)"]), &t, Kind::Covector).unwrap();
    let lw = hodge_laplacian(&w, &m).unwrap();
    let k = 4.0 * std::f64::consts::PI.powi(2);
    assert!(lw.max_abs_diff(&w.scale(k)) < 1e-10);
    // On functions it is minus the analyst's Laplacian.
    let f = sample_scalar(&parse("cos(2*pi*x2)").unwrap(), &t).unwrap();
    let lf = hodge_laplacian(&f, &m).unwrap();
    assert!(lf.max_abs_diff(&m.laplacian(&f).unwrap().scale(-1.0)) < 1e-10);
    // 2-forms: δd + dδ on a top form reduces to dδ.
    let b = parse("sin(2*pi*x1)").unwrap();
    let beta = sample(
        &[Expr::constant(0.0), b.clone(), Expr::Neg(Box::new(b)), Expr::constant(0.0)],
        &t,
        Kind::TwoForm,
    )
    .unwrap();
    assert!(hodge_laplacian(&beta, &m).unwrap().max_abs_diff(&beta.scale(k)) < 1e-9);
}

#[test]
fn three_form_codifferential_adjoint() {
    let g3 = Arc::new(Grid::torus(&[8, 8, 8], &[1.0, 1.0, 1.0], 0.0).unwrap());
    let m = MetricField::new(
        sample(&exprs(&["1", "0", "0", "0", "2", "0.1", "0", "0.1", "1"]), &g3, Kind::Sym2).unwrap(),
    )
    .unwrap();
    let w = sample(
        &exprs(&["sin(2*pi*x1)", "cos(2*pi*x3)", "sin(2*pi*(x1+x2))"]),
        &g3,
        Kind::Covector,
    )
    .unwrap();
    let beta = exterior_d(&w).unwrap();
    let gamma = exterior_d(
        &sample(
            &exprs(&["0", "cos(2*pi*x2)", "0", "-cos(2*pi*x2)", "0", "sin(2*pi*x1)", "0", "-sin(2*pi*x1)", "0"]),
            &g3,
            Kind::TwoForm,
        )
        .unwrap(),
    )
    .unwrap();
    let f = Field::from_fn(&g3, Kind::Tensor3, 0, |p, out| {
        let v = 1.0 + 0.5 * (g3.coords(p)[2] * 2.0 * std::f64::consts::PI).sin();
        let s = [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (1, 0, 2, -1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0)];
        for (a, b, c, sg) in s {
            out[(a * 3 + b) * 3 + c] = sg * v;
        }
    });
    let gamma = gamma.add(&f).unwrap();
    let lhs = l2_inner(&exterior_d(&beta.add(&beta).unwrap()).unwrap(), &gamma, &m).unwrap();
    let rhs = l2_inner(&beta.scale(2.0), &codifferential(&gamma, &m).unwrap(), &m).unwrap();
    assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
}
