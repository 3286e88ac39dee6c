//! Constraint quantities and the dominant energy condition.
//!
//! ```text
//! cargo run --example constraints [out_dir]
//! ```
//!
//! With an output directory, ρ, j and the DEC margin are written as CSV.

use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;

use idrig::exprlang::{parse, Expr};
use idrig::initial_data::{dec_holds, dec_margin, default_dec_tol, InitialDataSet};
use idrig::mesh::{write_csv, Grid};

fn exprs(src: &[&str]) -> Result<Vec<Expr>, idrig::exprlang::ExprError> {
    src.iter().map(|s| parse(s)).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(Grid::product(3, 1.0, 17, &[16, 16], &[1.0, 1.0])?);
    let id = exprs(&["1", "0", "0", "1"])?;

    // k = g on flat data: ρ = 3 everywhere, j = 0.
    let ids = InitialDataSet::from_exprs(&grid, &parse("1")?, &id, &exprs(&["1", "0", "0", "0", "1", "0", "0", "0", "1"])?)?;
    let c = ids.constraints()?;
    println!("k = g:    rho in [{:.3}, {:.3}], max|j| = {:.1e}", min(c.rho.comp(0)), c.rho.max_abs(), c.j.max_abs());

    // A curved example with a leaf-dependent lapse and an off-diagonal k.
    let ids = InitialDataSet::from_exprs(
        &grid,
        &parse("1.2 + 0.1*sin(2*pi*x1)")?,
        &exprs(&["1 + 0.2*s", "0", "0", "1"])?,
        &exprs(&[
            "0.4", "0.1*cos(2*pi*x2)", "0",
            "0.1*cos(2*pi*x2)", "0.5", "0",
            "0", "0", "0.3",
        ])?,
    )?;
    let c = ids.constraints()?;
    let margin = dec_margin(&c.rho, &c.j, ids.metric())?;
    let tol = default_dec_tol(&c.rho);
    println!(
        "curved:   rho in [{:.4}, {:.4}], max|j| = {:.4}, min(rho - |j|) = {:.4}, DEC {}",
        min(c.rho.comp(0)),
        c.rho.comp(0).iter().copied().fold(f64::NEG_INFINITY, f64::max),
        c.j.max_abs(),
        min(margin.comp(0)),
        if dec_holds(&margin, tol) { "holds" } else { "fails" }
    );
    println!("norms of rho: {:?}", c.rho.norms());

    if let Some(dir) = std::env::args().nth(1) {
        std::fs::create_dir_all(&dir)?;
        for (name, f) in [("rho", &c.rho), ("j", &c.j), ("dec_margin", &margin)] {
            let path = std::path::Path::new(&dir).join(format!("{name}.csv"));
            write_csv(f, BufWriter::new(File::create(&path)?))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}
