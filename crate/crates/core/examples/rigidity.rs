//! Rigidity identities on the rigid recipe.
//!
//! Builds recipe data from a lapse `φ`, prints every residual of the
//! rigidity report and shows the fd4 convergence of the `s`-limited ones.
//!
//! ```text
//! cargo run --release --example rigidity ["phi expression"]
//! ```

use std::sync::Arc;

use idrig::exprlang::parse;
use idrig::mesh::Grid;
use idrig::rigidity::{rigid_recipe, RigidReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "2 + 0.3*sin(2*pi*x1)*cos(s) + 0.2*cos(2*pi*x2)".into());
    let phi = parse(&phi)?;
    println!("phi = {phi}\n");

    let mut reports = Vec::new();
    for ns in [17, 33, 65] {
        let grid = Arc::new(Grid::product(3, 1.0, ns, &[32, 32], &[1.0, 1.0])?);
        reports.push(RigidReport::compute(&rigid_recipe(&phi, &grid)?)?);
    }
    println!("{:28} {:>10} {:>10} {:>10}  order", "residual (max)", "N_s=17", "33", "65");
    let names: Vec<&str> = reports[0].entries().iter().map(|(n, _)| *n).collect();
    for (i, name) in names.iter().enumerate() {
        let v: Vec<f64> = reports.iter().map(|r| r.entries()[i].1.max).collect();
        let order = if v[2] > 1e-12 { format!("{:.2}", (v[1] / v[2]).log2()) } else { "-".into() };
        println!("{name:28} {:10.2e} {:10.2e} {:10.2e}  {order}", v[0], v[1], v[2]);
    }
    Ok(())
}
