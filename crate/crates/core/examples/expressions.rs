//! Expression language and the symbolic derivative oracle.
//!
//! Parses a field expression, differentiates it symbolically and compares
//! the result with every grid derivative operator.
//!
//! ```text
//! cargo run --example expressions
//! ```

use std::sync::Arc;

use idrig::exprlang::{parse, periodicity_lint, Var};
use idrig::mesh::{partial, sample_scalar, Grid, Scheme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse("exp(0.5*s)*sin(2*pi*x1) + s^2*cos(2*pi*x2)")?;
    let ds = f.diff(Var::S);
    println!("f      = {f}");
    println!("df/ds  = {ds}");
    println!("f(0.5, 0.25, 0) = {}", f.eval(&[0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])?);

    // Leaf coordinates must enter periodically.
    let bad = parse("sin(2*pi*x1) + x2")?;
    for w in periodicity_lint(&bad, 1.0, &[1.0, 1.0]) {
        println!("lint: {w:?}");
    }

    println!("\n  N_s   fd2 error   fd4 error");
    let mut prev: Option<(f64, f64)> = None;
    for ns in [17, 33, 65] {
        let g = Arc::new(Grid::product(3, 1.0, ns, &[16, 16], &[1.0, 1.0])?);
        let field = sample_scalar(&f, &g)?;
        let exact = sample_scalar(&ds, &g)?;
        let e2 = partial(&field, 0, Scheme::Fd2)?.max_abs_diff(&exact);
        let e4 = partial(&field, 0, Scheme::Fd4)?.max_abs_diff(&exact);
        match prev {
            Some((p2, p4)) => println!(
                "{ns:5}  {e2:.3e} (order {:.2})  {e4:.3e} (order {:.2})",
                (p2 / e2).log2(),
                (p4 / e4).log2()
            ),
            None => println!("{ns:5}  {e2:.3e}               {e4:.3e}"),
        }
        prev = Some((e2, e4));
    }

    let g = Arc::new(Grid::product(3, 1.0, 9, &[16, 16], &[1.0, 1.0])?);
    let field = sample_scalar(&f, &g)?;
    for axis in 1..3 {
        let exact = sample_scalar(&f.diff(Var::leaf(axis).unwrap()), &g)?;
        let err = partial(&field, axis, Scheme::Spectral)?.max_abs_diff(&exact);
        println!("spectral d/dx{axis}: max error {err:.2e}");
    }
    Ok(())
}
