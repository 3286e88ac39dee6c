//! Ambient connection on `R ⊕ TM` and parallel transport.
//!
//! Checks metricity of the connection, transports an ambient vector along
//! a polyline and measures the holonomy of the rigid parallel field around
//! closed loops.
//!
//! ```text
//! cargo run --example ambient_transport
//! ```

use std::sync::Arc;

use idrig::exprlang::{parse, Expr};
use idrig::initial_data::{metricity_residual, parallel_transport, AmbientVector, InitialDataSet};
use idrig::mesh::{sample, Grid, Kind};
use idrig::rigidity::{build_parallel_candidate, rigid_recipe};

fn exprs(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| parse(s).unwrap()).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(Grid::product(3, 1.0, 33, &[32, 32], &[1.0, 1.0])?);
    let ids = InitialDataSet::from_exprs(
        &grid,
        &parse("(1 + 0.2*s)*exp(0.1*sin(2*pi*x1))")?,
        &exprs(&["1 + 0.1*cos(2*pi*x2)", "0.05*sin(2*pi*x1)", "0.05*sin(2*pi*x1)", "1.2"]),
        &exprs(&[
            "0.3 + 0.1*s", "0.2*sin(2*pi*x2)", "0",
            "0.2*sin(2*pi*x2)", "0.1*cos(2*pi*x1)", "0.05",
            "0", "0.05", "-0.2*s",
        ]),
    )?;
    let v = AmbientVector::new(
        sample(&exprs(&["1 + 0.3*s*cos(2*pi*x2)"]), &grid, Kind::Scalar)?,
        sample(&exprs(&["0.2 - s", "sin(2*pi*(x1 + x2))", "0.5*s"]), &grid, Kind::Vector)?,
    )?;
    let w = AmbientVector::new(
        sample(&exprs(&["exp(sin(2*pi*x1))"]), &grid, Kind::Scalar)?,
        sample(&exprs(&["1", "s*cos(2*pi*x1)", "-0.4"]), &grid, Kind::Vector)?,
    )?;
    for (name, y) in [("d/ds", ["1", "0", "0"]), ("d/dx1", ["0", "1", "0"]), ("mixed", ["0.3", "-1", "2"])] {
        let y = sample(&exprs(&y), &grid, Kind::Vector)?;
        println!("metricity along {name:6}: {:.2e}", metricity_residual(&ids, &y, &v, &w)?);
    }

    let t = parallel_transport(&ids, 0.2, &[0.5, -0.1, 0.3], &[3, 0, 5], &[(0, 20), (1, 32), (2, -7), (0, -10)])?;
    println!(
        "transport: length {:.3}, {} RK4 steps, |g(V,V) drift| {:.2e}, end node {:?}",
        t.length, t.steps, t.drift, t.end
    );

    // On rigid data the candidate field is parallel: loops bring it back.
    let grid = Arc::new(Grid::product(3, 1.0, 17, &[32, 32], &[1.0, 1.0])?);
    let ids = rigid_recipe(&parse("1 + 0.2*s + 0.05*sin(2*pi*x1)*cos(2*pi*x2)")?, &grid)?;
    let field = build_parallel_candidate(&ids)?;
    let start = [4, 3, 10];
    let p = grid.flat_index(&start);
    let x0: Vec<f64> = (0..3).map(|c| field.x.at(c, p)).collect();
    let loops = [
        vec![(1, 8), (2, 8), (1, -8), (2, -8)],
        vec![(0, 8), (1, 16), (0, -8), (1, -16)],
    ];
    for moves in loops {
        let t = parallel_transport(&ids, field.a.at(0, p), &x0, &start, &moves)?;
        let hol = t.x.iter().zip(&x0).map(|(a, b)| (a - b).abs()).fold((t.a - field.a.at(0, p)).abs(), f64::max);
        println!("loop {moves:?}: holonomy defect {hol:.2e}");
    }
    Ok(())
}
