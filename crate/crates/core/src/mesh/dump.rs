//! CSV field dumps.
//!
//! Header: the axis coordinate names (`s,x1,...`) followed by `value` for a
//! scalar or one `comp_<indices>` column per component (indices are the
//! 0-based tensor slots concatenated, e.g. `comp_01`). Rows run over the
//! nodes in row-major order; numbers use 17 significant digits.

use std::io::Write;

use super::{Field, Kind, MeshError};

pub fn write_csv<W: Write>(f: &Field, mut w: W) -> Result<(), MeshError> {
    let grid = f.grid();
    let mut header: Vec<String> = grid.axes().iter().map(|a| a.var.name()).collect();
    if f.kind() == Kind::Scalar {
        header.push("value".into());
    } else {
        for c in 0..f.ncomp() {
            header.push(format!("comp_{}", component_label(c, f.rank(), f.dim())));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    let mut row = String::new();
    for p in 0..grid.len() {
        row.clear();
        for x in grid.coords(p) {
            row.push_str(&format!("{x:.16e},"));
        }
        for c in 0..f.ncomp() {
            row.push_str(&format!("{:.16e},", f.at(c, p)));
        }
        row.pop();
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// Index digits of component `c` of a rank-`rank` tensor.
pub(crate) fn component_label(c: usize, rank: usize, dim: usize) -> String {
    let mut digits = vec![0; rank];
    let mut rem = c;
    for d in digits.iter_mut().rev() {
        *d = rem % dim;
        rem /= dim;
    }
    digits.iter().map(|d| d.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::Grid;

    #[test]
    fn header_and_rows() {
        let g = Arc::new(Grid::product(2, 1.0, 8, &[8], &[1.0]).unwrap());
        let f = Field::zeros(&g, Kind::Covector);
        let mut out = Vec::new();
        write_csv(&f, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "s,x1,comp_0,comp_1");
        assert_eq!(text.lines().count(), 1 + 64);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 4);
        assert_eq!(first[0], "0.0000000000000000e0");

        let s = Field::constant(&g, 0.1);
        let mut out = Vec::new();
        write_csv(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("s,x1,value\n"));
        let v: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn labels() {
        assert_eq!(component_label(5, 2, 3), "12");
        assert_eq!(component_label(0, 0, 3), "");
    }
}
