//! Hodge decomposition of 1-forms and the TT split of symmetric tensors on
//! a flat torus.
//!
//! ```text
//! cargo run --release --example hodge_tt [seed]
//! ```

use std::sync::Arc;

use idrig::geometry::MetricField;
use idrig::mesh::{Field, Grid, Kind};
use idrig::rigidity::random::FieldSampler;
use idrig::rigidity::{bilaplacian_bound, hodge_decompose, lambda_min, tt_split};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let g = [1.0, 0.2, 0.0, 0.2, 1.3, 0.1, 0.0, 0.1, 0.8];
    let grid = Arc::new(Grid::torus(&[16, 16, 16], &[1.0; 3], 0.0)?);
    let gm = MetricField::new(Field::from_fn(&grid, Kind::Sym2, 0, |_, o| o.copy_from_slice(&g)))?;
    let mut rng = FieldSampler::new(seed, 3);

    let w = rng.covector(&grid, true)?;
    let h = hodge_decompose(&w, &gm)?;
    println!("Hodge split of a random 1-form (seed {seed}):");
    println!("  |exact| {:.3}  |harmonic| {:.3}  |coexact| {:.3}", h.exact.max_abs(), h.harmonic.max_abs(), h.coexact.max_abs());
    println!("  reconstruction defect {:.1e}", h.reconstruction_defect(&w));
    println!("  orthogonality defect  {:.1e}", h.orthogonality_defect(&gm)?);
    let b = bilaplacian_bound(&h.coexact, &gm)?;
    println!(
        "  |bilaplacian coexact| / (lambda_min^2 |coexact|) = {:.2} (lambda_min = {:.3})",
        b.ratio(),
        lambda_min(&gm)?
    );

    let d = rng.deformation(&gm)?;
    let s = tt_split(&d.gdot, &gm, 1e-10)?;
    let (div, tr) = s.tt_defects(&gm)?;
    println!("\nTT split of c0 g + L_W g + h:");
    println!("  c = {:.6} (drawn {:.6})", s.c, d.c0);
    println!("  |h - h_drawn| {:.1e}, |tr h| {tr:.1e}, |div h| {div:.1e}", s.h.max_abs_diff(&d.h_tt));
    Ok(())
}
