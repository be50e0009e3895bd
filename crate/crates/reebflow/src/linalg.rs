//! Small dense linear algebra for the slice tangent space (dimension <= 3
//! in practice, so nothing clever is needed).

// index-style loops match the in-place pivot/rotation updates here
#![allow(clippy::needless_range_loop)]

/// Orthonormal basis of the zero-sum subspace of `R^dim` (Helmert vectors).
pub(crate) fn zero_sum_basis(dim: usize) -> Vec<Vec<f64>> {
    let mut basis = Vec::with_capacity(dim - 1);
    for k in 1..dim {
        let norm = (k as f64 * (k as f64 + 1.0)).sqrt();
        let mut v = vec![0.0; dim];
        for item in v.iter_mut().take(k) {
            *item = 1.0 / norm;
        }
        v[k] = -(k as f64) / norm;
        basis.push(v);
    }
    basis
}

/// Solve `A x = b` for a small symmetric positive definite matrix by
/// Gaussian elimination with partial pivoting.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in row + 1..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub(crate) fn sym_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j].abs();
            }
        }
        if off < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}
