//! Principal component projection via eigendecomposition of the covariance
//! matrix.

use serde::Serialize;

use crate::linalg::{covariance, eigen_symmetric, mean_rows};
use crate::{Error, Result};

/// Fitted projection. `components` holds one unit-norm row per retained
/// direction, strongest first; each row is oriented so its
/// largest-magnitude entry is positive, which pins an otherwise arbitrary
/// sign.
#[derive(Debug, Clone, Serialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let dim = self.mean.len();
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != dim {
                    return Err(Error::Data(format!(
                        "row {i} has dimension {}, expected {dim}",
                        row.len()
                    )));
                }
                Ok(self
                    .components
                    .iter()
                    .map(|c| {
                        c.iter()
                            .zip(row.iter().zip(&self.mean))
                            .map(|(w, (x, m))| w * (x - m))
                            .sum()
                    })
                    .collect())
            })
            .collect()
    }
}

/// Fits the projection onto the top `target_dim` eigenvectors of the
/// population covariance and returns the projected rows. Requires
/// `1 <= target_dim <= min(N - 1, F)`.
pub fn pca_fit_transform(
    rows: &[Vec<f64>],
    target_dim: usize,
) -> Result<(PcaModel, Vec<Vec<f64>>)> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::Data(format!("projection needs at least 2 rows, got {n}")));
    }
    let dim = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Data(format!(
                "row {i} has dimension {}, expected {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("row {i} has a non-finite value")));
        }
    }
    let max_dim = dim.min(n - 1);
    if target_dim == 0 || target_dim > max_dim {
        return Err(Error::Config(format!(
            "target dimension must lie in [1, {max_dim}] for {n} rows of \
             dimension {dim}, got {target_dim}"
        )));
    }

    let mean = mean_rows(rows);
    let cov = covariance(rows, &mean);
    let (eigenvalues, eigenvectors) = eigen_symmetric(&cov);

    let mut components = Vec::with_capacity(target_dim);
    let mut explained_variance = Vec::with_capacity(target_dim);
    for (value, mut vector) in eigenvalues
        .into_iter()
        .zip(eigenvectors)
        .take(target_dim)
    {
        // Covariance eigenvalues are nonnegative up to roundoff.
        explained_variance.push(value.max(0.0));
        let lead = (0..vector.len())
            .max_by(|&i, &j| vector[i].abs().total_cmp(&vector[j].abs()))
            .unwrap();
        if vector[lead] < 0.0 {
            vector.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(vector);
    }

    let model = PcaModel {
        mean,
        components,
        explained_variance,
    };
    let projected = model.transform(rows)?;
    Ok((model, projected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                (0..dim)
                    .map(|d| rng.random_range(-1.0..1.0) * (d as f64 + 1.0))
                    .collect()
            })
            .collect()
    }

    // Independent oracle: nalgebra's symmetric eigendecomposition of the
    // same covariance.
    #[test]
    fn projections_match_an_independent_eigensolver() {
        let rows = random_rows(30, 4, 61);
        let (model, projected) = pca_fit_transform(&rows, 2).unwrap();

        let mean = crate::linalg::mean_rows(&rows);
        let cov = crate::linalg::covariance(&rows, &mean);
        let na_cov = nalgebra::DMatrix::from_fn(4, 4, |i, j| cov[i][j]);
        let eig = na_cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        for (c, &which) in order.iter().take(2).enumerate() {
            assert!(
                (model.explained_variance[c] - eig.eigenvalues[which]).abs() < 1e-8,
                "variance {c}"
            );
            let oracle: Vec<f64> = eig.eigenvectors.column(which).iter().copied().collect();
            // Sign is arbitrary on the oracle side; align before comparing.
            let dot: f64 = model.components[c].iter().zip(&oracle).map(|(a, b)| a * b).sum();
            let flip = if dot < 0.0 { -1.0 } else { 1.0 };
            for (got, want) in model.components[c].iter().zip(&oracle) {
                assert!((got - flip * want).abs() < 1e-8, "component {c}");
            }
        }

        // And the projected rows themselves.
        for (row, proj) in rows.iter().zip(&projected) {
            for c in 0..2 {
                let want: f64 = model.components[c]
                    .iter()
                    .zip(row.iter().zip(&model.mean))
                    .map(|(w, (x, m))| w * (x - m))
                    .sum();
                assert!((proj[c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let rows = random_rows(25, 5, 67);
        let (model, _) = pca_fit_transform(&rows, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = model.components[i]
                    .iter()
                    .zip(&model.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8, "({i},{j}) dot {dot}");
            }
        }
    }

    #[test]
    fn explained_variance_is_nonincreasing_and_nonnegative() {
        let rows = random_rows(40, 6, 71);
        let (model, _) = pca_fit_transform(&rows, 6).unwrap();
        for w in model.explained_variance.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(model.explained_variance.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn full_rank_projection_preserves_total_variance() {
        let rows = random_rows(40, 5, 73);
        let (model, _) = pca_fit_transform(&rows, 5).unwrap();
        let mean = crate::linalg::mean_rows(&rows);
        let cov = crate::linalg::covariance(&rows, &mean);
        let trace: f64 = (0..5).map(|i| cov[i][i]).sum();
        let total: f64 = model.explained_variance.iter().sum();
        assert!((total - trace).abs() < 1e-8, "{total} vs {trace}");
    }

    #[test]
    fn sign_convention_points_the_largest_entry_up() {
        let rows = random_rows(30, 4, 79);
        let (model, _) = pca_fit_transform(&rows, 4).unwrap();
        for comp in &model.components {
            let lead = (0..comp.len())
                .max_by(|&i, &j| comp[i].abs().total_cmp(&comp[j].abs()))
                .unwrap();
            assert!(comp[lead] > 0.0);
        }
    }

    #[test]
    fn collinear_data_concentrates_variance_in_one_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let t: f64 = rng.random_range(-3.0..3.0);
                vec![2.0 * t, -t]
            })
            .collect();
        let (model, projected) = pca_fit_transform(&rows, 2).unwrap();
        assert!(model.explained_variance[1].abs() < 1e-9);
        for p in &projected {
            assert!(p[1].abs() < 1e-7);
        }
        // The first component lies along (2, -1) normalized.
        let along = (model.components[0][0] / model.components[0][1] + 2.0).abs();
        assert!(along < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_target_dims() {
        let rows = random_rows(10, 3, 89);
        assert!(pca_fit_transform(&rows, 0).is_err());
        assert!(pca_fit_transform(&rows, 4).is_err());
        // N = 3 rows cap the target at N - 1 = 2.
        let three = random_rows(3, 5, 97);
        assert!(pca_fit_transform(&three, 3).is_err());
        assert!(pca_fit_transform(&three, 2).is_ok());
    }

    #[test]
    fn identical_inputs_give_bitwise_identical_projections() {
        let rows = random_rows(20, 4, 101);
        let (ma, pa) = pca_fit_transform(&rows, 2).unwrap();
        let (mb, pb) = pca_fit_transform(&rows, 2).unwrap();
        assert_eq!(ma.components, mb.components);
        assert_eq!(pa, pb);
    }
}
