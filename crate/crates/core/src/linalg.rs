//! Dense helpers for the mixture and projection code. Matrices here are
//! `Vec<Vec<f64>>` in row-major order and stay tiny (feature dimensions in
//! the tens at most), so straightforward loops beat a linear algebra
//! dependency.

pub(crate) type Matrix = Vec<Vec<f64>>;

pub(crate) fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let dim = rows[0].len();
    let mut mean = vec![0.0; dim];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = rows.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    mean
}

/// Population covariance (divides by N, matching the standardization step).
pub(crate) fn covariance(rows: &[Vec<f64>], mean: &[f64]) -> Matrix {
    let dim = mean.len();
    let mut cov = vec![vec![0.0; dim]; dim];
    for row in rows {
        for i in 0..dim {
            let di = row[i] - mean[i];
            for j in i..dim {
                cov[i][j] += di * (row[j] - mean[j]);
            }
        }
    }
    let n = rows.len() as f64;
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns None when a pivot is not strictly positive.
pub(crate) struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Option<Self> {
        let n = a.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return None;
                    }
                    l[i][j] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        Some(Cholesky { l })
    }

    /// ln |A| = 2 * sum(ln L_ii)
    pub fn log_det(&self) -> f64 {
        2.0 * self.l.iter().enumerate().map(|(i, row)| row[i].ln()).sum::<f64>()
    }

    /// (x - mu)^T A^{-1} (x - mu) via one forward substitution.
    pub fn mahalanobis_sq(&self, diff: &[f64]) -> f64 {
        let n = self.l.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = diff[i];
            for k in 0..i {
                sum -= self.l[i][k] * y[k];
            }
            y[i] = sum / self.l[i][i];
        }
        y.iter().map(|v| v * v).sum()
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvectors-as-rows), sorted by descending
/// eigenvalue; ties keep their original diagonal order. Deterministic for
/// identical input.
pub(crate) fn eigen_symmetric(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.len();
    let mut m = a.clone();
    // v accumulates the rotations columnwise: column j is eigenvector j.
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let frob: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * frob.max(1.0);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= tol * 1e-2 {
                    continue;
                }
                // Standard two-sided rotation zeroing m[p][q].
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let eigenvectors: Matrix = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        // B^T B + n*I is comfortably positive definite.
        let b: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a[i][j] += b[k][i] * b[k][j];
                }
            }
            a[i][i] += n as f64;
        }
        a
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-2.0..2.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        a
    }

    fn to_na(a: &Matrix) -> DMatrix<f64> {
        let n = a.len();
        DMatrix::from_fn(n, n, |i, j| a[i][j])
    }

    #[test]
    fn cholesky_factor_reproduces_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            let a = random_spd(n, &mut rng);
            let chol = Cholesky::new(&a).expect("spd");
            for i in 0..n {
                for j in 0..n {
                    let mut sum = 0.0;
                    for k in 0..n {
                        sum += chol.l[i][k] * chol.l[j][k];
                    }
                    assert!((sum - a[i][j]).abs() < 1e-10, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn cholesky_log_det_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let a = random_spd(n, &mut rng);
            let chol = Cholesky::new(&a).unwrap();
            let want = to_na(&a).determinant().ln();
            assert!((chol.log_det() - want).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn mahalanobis_matches_explicit_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            let a = random_spd(n, &mut rng);
            let chol = Cholesky::new(&a).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();

            let inv = to_na(&a).try_inverse().unwrap();
            let xv = nalgebra::DVector::from_column_slice(&x);
            let want = (xv.transpose() * inv * &xv)[(0, 0)];

            assert!((chol.mahalanobis_sq(&x) - want).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_matrices() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]]; // eigenvalues 3, -1
        assert!(Cholesky::new(&a).is_none());
    }

    #[test]
    fn eigen_matches_nalgebra_symmetric_eigen() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            let a = random_symmetric(n, &mut rng);
            let (vals, vecs) = eigen_symmetric(&a);

            let mut want: Vec<f64> = to_na(&a).symmetric_eigen().eigenvalues.iter().copied().collect();
            want.sort_by(|x, y| y.total_cmp(x));
            for (got, want) in vals.iter().zip(&want) {
                assert!((got - want).abs() < 1e-10, "n={n}");
            }

            // Residual check: A v = lambda v.
            for (lambda, vec) in vals.iter().zip(&vecs) {
                for i in 0..n {
                    let av: f64 = (0..n).map(|j| a[i][j] * vec[j]).sum();
                    assert!((av - lambda * vec[i]).abs() < 1e-9, "n={n}");
                }
            }

            // Orthonormal rows.
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-10, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn covariance_matches_direct_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let mean = mean_rows(&rows);
        let cov = covariance(&rows, &mean);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for row in &rows {
                    acc += (row[i] - mean[i]) * (row[j] - mean[j]);
                }
                acc /= 30.0;
                assert!((cov[i][j] - acc).abs() < 1e-12);
            }
        }
    }
}
