//! Tiny dense linear algebra for per-node metric matrices (dimension ≤ 5).

/// Cholesky test on the trailing principal block starting at `start`.
/// Pivots must be positive relative to the block scale.
pub fn cholesky_ok(m: &[f64], d: usize, start: usize) -> bool {
    let k = d - start;
    if k == 0 {
        return true;
    }
    let mut l = vec![0.0; k * k];
    let scale = (start..d).fold(0.0f64, |s, i| s.max(m[i * d + i].abs()));
    for i in 0..k {
        for j in 0..=i {
            let mut s = m[(start + i) * d + start + j];
            for q in 0..j {
                s -= l[i * k + q] * l[j * k + q];
            }
            if i == j {
                if !(s > 1e-14 * scale) {
                    return false;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    true
}

/// Inverse and determinant by Gauss–Jordan elimination with partial pivoting.
pub fn invert_small(m: &[f64], d: usize) -> Option<(Vec<f64>, f64)> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| {
            a[x * d + col].abs().total_cmp(&a[y * d + col].abs())
        })?;
        let pv = a[piv * d + col];
        if pv == 0.0 || !pv.is_finite() {
            return None;
        }
        if piv != col {
            for j in 0..d {
                a.swap(piv * d + j, col * d + j);
                inv.swap(piv * d + j, col * d + j);
            }
            det = -det;
        }
        det *= pv;
        let r = 1.0 / pv;
        for j in 0..d {
            a[col * d + j] *= r;
            inv[col * d + j] *= r;
        }
        for row in 0..d {
            if row == col {
                continue;
            }
            let f = a[row * d + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..d {
                a[row * d + j] -= f * a[col * d + j];
                inv[row * d + j] -= f * inv[col * d + j];
            }
        }
    }
    Some((inv, det))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &[f64], d: usize) -> Vec<f64> {
    let mut a = m.to_vec();
    for _ in 0..64 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j] * a[i * d + j])
            .sum();
        let diag: f64 = (0..d).map(|i| a[i * d + i] * a[i * d + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Signature `(−,+,…,+)`: one negative eigenvalue, the rest positive
/// relative to the largest magnitude.
pub fn is_lorentzian(m: &[f64], d: usize) -> bool {
    let ev = symmetric_eigenvalues(m, d);
    let scale = ev.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = 1e-13 * scale;
    ev[0] < -tol && ev[1..].iter().all(|&v| v > tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let (inv, det) = invert_small(&m, 3).unwrap();
        assert!((det - 18.0).abs() < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(cholesky_ok(&m, 3, 0));
        let mink = [0.0, 1.0, 1.0, 0.0];
        assert!(!cholesky_ok(&mink, 2, 0));
        let (_, det) = invert_small(&mink, 2).unwrap();
        assert_eq!(det, -1.0);
        assert!(invert_small(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let ev = symmetric_eigenvalues(&m, 3);
        // Roots of λ³ − 9λ² + 24λ − 18.
        for l in &ev {
            assert!((l * l * l - 9.0 * l * l + 24.0 * l - 18.0).abs() < 1e-12);
        }
        assert!((ev.iter().sum::<f64>() - 9.0).abs() < 1e-13);
        // pp-wave block with f < 0 is Lorentzian although g_ss < 0.
        let pp = [0.0, -1.0, 0.0, -1.0, -0.5, 0.0, 0.0, 0.0, 1.0];
        assert!(is_lorentzian(&pp, 3));
        assert!(!is_lorentzian(&m, 3));
        assert!(!is_lorentzian(&[-1.0, 0.0, 0.0, -1.0], 2));
    }
}
