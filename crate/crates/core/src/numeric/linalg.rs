//! Dense linear algebra for small real matrices: determinants (closed form up
//! to 3x3, pivoted LU beyond), the cyclic Jacobi symmetric eigensolver, and
//! Sturm-sequence bisection for symmetric tridiagonal spectra.

use alloc::vec;
use alloc::vec::Vec;

/// Determinant of the row-major `n` x `n` matrix `a` (`a.len() == n * n`).
///
/// Separations up to 3 dominate the workload, so those orders use closed
/// forms; larger orders (long-range entanglement studies at small anisotropy)
/// fall back to LU with partial pivoting.
pub fn det(a: &[f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => det_lu(a, n),
    }
}

fn det_lu(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    for col in 0..n {
        // Partial pivot: largest magnitude entry on or below the diagonal.
        let mut pivot = col;
        let mut best = libm::fabs(m[col * n + col]);
        for row in col + 1..n {
            let v = libm::fabs(m[row * n + col]);
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            sign = -sign;
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / d;
            if factor != 0.0 {
                for k in col..n {
                    m[row * n + k] -= factor * m[col * n + k];
                }
            }
        }
    }
    let mut prod = sign;
    for i in 0..n {
        prod *= m[i * n + i];
    }
    prod
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns of a row-major matrix (`vectors[i * n + j]` is
/// component `i` of eigenvector `j`).
pub fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut scale = 0.0;
    for x in &m {
        scale += x * x;
    }
    scale = libm::sqrt(scale).max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if libm::sqrt(2.0 * off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if libm::fabs(apq) <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    (values, vectors)
}

/// The `k` lowest eigenvalues of the symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (`e.len() == d.len() - 1`), by bisection
/// on the Sturm sequence. Robust companion to the Lanczos iteration.
pub fn tridiag_lowest(d: &[f64], e: &[f64], k: usize) -> Vec<f64> {
    let n = d.len();
    debug_assert!(n >= 1 && e.len() + 1 == n);
    let k = k.min(n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { libm::fabs(e[i - 1]) } else { 0.0 }
            + if i + 1 < n { libm::fabs(e[i]) } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let count_below = |x: f64| -> usize {
        let mut q = d[0] - x;
        let mut cnt = usize::from(q < 0.0);
        for i in 1..n {
            if libm::fabs(q) < 1e-300 {
                q = -1e-300;
            }
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
            cnt += usize::from(q < 0.0);
        }
        cnt
    };
    (1..=k)
        .map(|idx| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..120 {
                let mid = 0.5 * (a + b);
                if count_below(mid) >= idx {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= 1e-15 * libm::fabs(b).max(1.0) {
                    break;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_closed_forms() {
        assert_eq!(det(&[], 0), 1.0);
        assert_eq!(det(&[3.5], 1), 3.5);
        assert_eq!(det(&[1.0, 2.0, 3.0, 4.0], 2), -2.0);
        let m3 = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        assert!((det(&m3, 3) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn det_lu_matches_known_values() {
        // 4x4 Hilbert matrix: det = 1/6048000.
        let mut h = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                h[i * 4 + j] = 1.0 / ((i + j + 1) as f64);
            }
        }
        let exact = 1.0 / 6_048_000.0;
        assert!((det(&h, 4) - exact).abs() < 1e-18);
        // Permutation matrix with one swap: det = -1 (exercises pivoting).
        let p = [
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ];
        assert_eq!(det(&p, 4), -1.0);
        // Singular matrix.
        let s = [
            1.0, 2.0, 3.0, 4.0, //
            2.0, 4.0, 6.0, 8.0, //
            0.0, 1.0, 0.0, 1.0, //
            5.0, 0.0, 0.0, 1.0,
        ];
        assert_eq!(det(&s, 4), 0.0);
    }

    #[test]
    fn det_lu_agrees_with_closed_form_on_embedded_3x3() {
        // The same 3x3 embedded in a 4x4 with a decoupled unit row/column.
        let m3 = [1.7, -0.3, 0.2, -0.3, 0.9, 0.5, 0.2, 0.5, -1.1];
        let mut m4 = [0.0; 16];
        for i in 0..3 {
            for j in 0..3 {
                m4[i * 4 + j] = m3[i * 3 + j];
            }
        }
        m4[15] = 1.0;
        assert!((det(&m4, 4) - det(&m3, 3)).abs() < 1e-14);
    }

    #[test]
    fn jacobi_known_spectrum() {
        let (vals, _) = sym_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_matrix_and_is_orthonormal() {
        let a = [
            4.0, -1.0, 0.5, 0.2, //
            -1.0, 3.0, -0.7, 0.1, //
            0.5, -0.7, 2.0, 0.3, //
            0.2, 0.1, 0.3, 1.0,
        ];
        let (vals, vecs) = sym_eigen(&a, 4);
        // V^T V = I
        for i in 0..4 {
            for j in 0..4 {
                let mut dot = 0.0;
                for k in 0..4 {
                    dot += vecs[k * 4 + i] * vecs[k * 4 + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        // V diag(vals) V^T = A
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += vecs[i * 4 + k] * vals[k] * vecs[j * 4 + k];
                }
                assert!((s - a[i * 4 + j]).abs() < 1e-12);
            }
        }
        // Ascending order.
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn tridiag_bisection_matches_jacobi() {
        let d = [1.0, -0.5, 2.0, 0.3, -1.2];
        let e = [0.6, -0.4, 0.9, 0.2];
        let n = d.len();
        let mut full = vec![0.0; n * n];
        for i in 0..n {
            full[i * n + i] = d[i];
            if i + 1 < n {
                full[i * n + i + 1] = e[i];
                full[(i + 1) * n + i] = e[i];
            }
        }
        let (jac, _) = sym_eigen(&full, n);
        let bis = tridiag_lowest(&d, &e, 3);
        for i in 0..3 {
            assert!(
                (jac[i] - bis[i]).abs() < 1e-12,
                "eig {i}: jacobi {} vs bisect {}",
                jac[i],
                bis[i]
            );
        }
    }
}
