//! Leaf null geometry and the first-variation formula.
//!
//! On a foliation by MOTS (`θ⁺ ≡ 0`) the variation `∂_s θ⁺` matches its
//! right-hand side up to fd error; off MOTS the simplified and unsimplified
//! right-hand sides still agree.
//!
//! ```text
//! cargo run --release --example null_geometry
//! ```

use std::sync::Arc;

use idrig::exprlang::{parse, Expr};
use idrig::initial_data::{leaf_null_geometry, InitialDataSet};
use idrig::mesh::Grid;
use idrig::rigidity::RigidityContext;

fn exprs(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| parse(s).unwrap()).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = exprs(&[
        "0.2*cos(2*pi*x2)", "0.1*sin(2*pi*x2)", "0.1*cos(2*pi*x1)",
        "0.1*sin(2*pi*x2)", "0.3*sin(2*pi*x1)", "0.2*cos(2*pi*x2)",
        "0.1*cos(2*pi*x1)", "0.2*cos(2*pi*x2)", "-0.3*sin(2*pi*x1)",
    ]);
    let phi = parse("1.5 + 0.2*sin(2*pi*x1)*cos(s)")?;
    let id = exprs(&["1", "0", "0", "1"]);
    println!("MOTS foliation (flat leaves, trace-free k):");
    for ns in [9, 17, 33] {
        let grid = Arc::new(Grid::product(3, 1.0, ns, &[32, 32], &[1.0, 1.0])?);
        let ids = InitialDataSet::from_exprs(&grid, &phi, &id, &k)?;
        let ctx = RigidityContext::new(&ids)?;
        let leaf = leaf_null_geometry(&ids, ns / 2)?;
        let worst = (0..ns)
            .map(|tau| ctx.variation(tau).map(|v| v.residual.max_abs()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!(
            "  N_s = {ns:2}: max|theta+| {:.1e}, max|chi+| {:.3}, variation residual {worst:.2e}",
            ctx.null_geometry().theta.max_abs(),
            leaf.chi.max_abs()
        );
    }

    let grid = Arc::new(Grid::product(3, 1.0, 17, &[32, 32], &[1.0, 1.0])?);
    let ids = InitialDataSet::from_exprs(
        &grid,
        &parse("exp(0.2*sin(2*s) + 0.1*cos(2*pi*x1))")?,
        &exprs(&["1 + 0.1*s", "0.05*sin(2*pi*x2)", "0.05*sin(2*pi*x2)", "1"]),
        &exprs(&[
            "0.3*cos(s)", "0.1*sin(2*pi*x1)", "0",
            "0.1*sin(2*pi*x1)", "0.2", "0.1*s",
            "0", "0.1*s", "-0.1*cos(2*pi*x2)",
        ]),
    )?;
    let ctx = RigidityContext::new(&ids)?;
    println!("\ngeneric data: max|theta+| = {:.3}", ctx.null_geometry().theta.max_abs());
    for tau in [0, 8, 16] {
        let v = ctx.variation(tau)?;
        println!(
            "  leaf {tau:2}: |rhs| {:.3e}, simplified - unsimplified {:.1e}",
            v.rhs.max_abs(),
            v.formula_difference().max_abs()
        );
    }
    Ok(())
}
