//! Killing development of rigid data and its Einstein tensor.
//!
//! Builds the development from the parallel candidate field of the rigid
//! recipe, prints the frame components of the Einstein tensor at a node
//! and runs the sampled DEC check.
//!
//! ```text
//! cargo run --release --example killing_development [table.csv]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;

use idrig::exprlang::parse;
use idrig::killing_dev::{build_kd, kd_dec_check, kd_einstein};
use idrig::mesh::Grid;
use idrig::rigidity::{build_parallel_candidate, rigid_recipe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(Grid::product(3, 1.0, 9, &[32, 32], &[1.0, 1.0])?);
    for phi in ["1 + 0.3*s", "1 + 0.2*s + 0.1*sin(2*pi*x1)*cos(2*pi*x2)"] {
        let ids = rigid_recipe(&parse(phi)?, &grid)?;
        let v = build_parallel_candidate(&ids)?;
        let kd = build_kd(&ids, &v, 1e-8)?;
        let t = kd_einstein(&kd)?;
        println!("phi = {phi}");
        println!("  curvature scale {:.3}, max|rho| {:.4}", t.curvature_scale, t.rho.max_abs());
        println!(
            "  off-pattern {:.1e} (relative), scal {:.1e}, leaf block {:.1e}",
            t.relative_pattern_defect(),
            t.scal_max,
            t.leaf_block
        );
        let p = grid.flat_index(&[4, 5, 9]);
        println!("  frame components at {:?} (order e0, e1, e2, nu):", grid.coords(p));
        for a in 0..4 {
            let row: Vec<String> = (0..4).map(|b| format!("{:9.5}", t.einstein.at2(a, b, p))).collect();
            println!("    [{}]", row.join(" "));
        }
        let dec = kd_dec_check(&t, 64, 1e-8);
        println!(
            "  DEC: min {:.3e} at {:?}, {} violating nodes -> {}\n",
            dec.min,
            dec.coords,
            dec.violations,
            if dec.holds() { "holds" } else { "fails" }
        );
        if let Some(path) = std::env::args().nth(1) {
            t.write_csv(BufWriter::new(File::create(&path)?))?;
            println!("  wrote {path}");
        }
    }
    Ok(())
}
