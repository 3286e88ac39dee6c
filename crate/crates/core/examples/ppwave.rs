//! pp-wave spacetimes: the Einstein formula and the induction round trip.
//!
//! ```text
//! cargo run --release --example ppwave
//! ```

use std::sync::Arc;

use idrig::exprlang::parse;
use idrig::killing_dev::{build_kd, induce_from_ppwave, kd_einstein, ppwave_einstein_check, ppwave_frame_table, PpWaveSpec};
use idrig::mesh::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(Grid::product(3, 1.0, 9, &[32, 32], &[1.0, 1.0])?);
    for f in ["sin(2*pi*x1)", "2 + s^2", "0.5*cos(2*pi*x1)*sin(4*pi*x2)"] {
        let spec = PpWaveSpec::new(3, parse(f)?);
        let r = ppwave_einstein_check(&spec, &grid, 64, 1e-8)?;
        println!("f = {f}");
        println!("  Ein vs formula {:.1e}, parallel d/dv {:.1e}, scal {:.1e}", r.formula_residual, r.parallel_residual, r.scal_max);
        println!(
            "  max|Laplacian f| {:.3}, superharmonic {}, DEC {}",
            r.laplacian_max,
            r.superharmonic,
            if r.dec.holds() { "holds" } else { "fails" }
        );
    }

    // Induce data on the graph v = w, rebuild the development from them and
    // compare the two Einstein frame tables.
    let spec = PpWaveSpec::new(3, parse("2 + 0.3*cos(2*pi*x2)")?);
    let w = parse("0.1*s^2")?;
    let ind = induce_from_ppwave(&spec, &grid, &w)?;
    let kd = build_kd(&ind.ids, &ind.v, 1e-8)?;
    let rebuilt = kd_einstein(&kd)?;
    let direct = ppwave_frame_table(&spec, &w, &kd)?;
    println!("\nround trip on v = {w}: table difference {:.1e}", rebuilt.einstein.max_abs_diff(&direct));
    Ok(())
}
