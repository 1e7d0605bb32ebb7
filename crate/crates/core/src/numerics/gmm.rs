//! Gaussian mixture fitting by expectation-maximization.
//!
//! Full covariance matrices, k-means++ initialization from a fixed seed,
//! and log-sum-exp throughout, so small clusters do not underflow. The
//! per-iteration log-likelihood never decreases beyond floating-point
//! noise; tests pin that at 1e-9.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::splitmix64;
use crate::linalg::{covariance, mean_rows, Cholesky, Matrix};
use crate::{Error, Result};

const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Clone, Serialize)]
pub struct GmmConfig {
    pub k: usize,
    pub max_iterations: usize,
    pub rel_tolerance: f64,
    /// Added to every covariance diagonal each M-step so tight clusters
    /// stay factorable.
    pub covariance_regularizer: f64,
    pub seed: u64,
    /// Independent EM runs from distinct initializations; the best final
    /// log-likelihood wins. 1 keeps the single seeded run.
    pub restarts: usize,
}

impl GmmConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        GmmConfig {
            k,
            max_iterations: 200,
            rel_tolerance: 1e-6,
            covariance_regularizer: 1e-6,
            seed,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Matrix>,
    pub converged: bool,
    pub final_log_likelihood: f64,
    /// Total log-likelihood after each EM iteration, ending at the value
    /// for the returned parameters.
    pub log_likelihood_history: Vec<f64>,
}

impl GmmModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, |m| m.len())
    }

    /// Debug dump: weights, means, and row-major flattened covariances.
    pub fn dump_json(&self, path: &std::path::Path) -> Result<()> {
        let flat: Vec<Vec<f64>> = self
            .covariances
            .iter()
            .map(|c| c.iter().flatten().copied().collect())
            .collect();
        let doc = serde_json::json!({
            "weights": self.weights,
            "means": self.means,
            "covariances": flat,
            "converged": self.converged,
            "final_log_likelihood": self.final_log_likelihood,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap())?;
        Ok(())
    }
}

fn validate_data(data: &[Vec<f64>]) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::Data("no data points to fit".into()));
    }
    let dim = data[0].len();
    if dim == 0 {
        return Err(Error::Data("data points have zero dimension".into()));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Data(format!(
                "point {i} has dimension {}, expected {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("point {i} has a non-finite value")));
        }
    }
    Ok(dim)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, the rest sampled with
/// probability proportional to squared distance from the nearest chosen
/// center. Falls back to the lowest unchosen index when every remaining
/// point coincides with a center.
fn kmeans_pp_indices(data: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = data.len();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = data.iter().map(|x| sq_dist(x, &data[chosen[0]])).collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if target < acc {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave target just past the last positive weight.
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap())
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, x) in data.iter().enumerate() {
            let d = sq_dist(x, &data[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
}

struct Params {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covs: Vec<Matrix>,
}

fn add_diagonal(m: &mut Matrix, value: f64) {
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += value;
    }
}

/// Factors every covariance, boosting the diagonal in decades when a factor
/// fails. Gives up after eight boosts rather than looping forever.
fn factor_all(covs: &mut [Matrix], regularizer: f64) -> Result<Vec<Cholesky>> {
    let mut factors = Vec::with_capacity(covs.len());
    for (k, cov) in covs.iter_mut().enumerate() {
        let mut boost = regularizer.max(1e-12);
        let mut attempts = 0;
        let chol = loop {
            if let Some(c) = Cholesky::new(cov) {
                break c;
            }
            if attempts == 8 {
                return Err(Error::Data(format!(
                    "component {k} covariance stayed non-positive-definite \
                     after regularization"
                )));
            }
            add_diagonal(cov, boost);
            boost *= 10.0;
            attempts += 1;
        };
        factors.push(chol);
    }
    Ok(factors)
}

fn log_pdf(chol: &Cholesky, dim: usize, diff: &[f64]) -> f64 {
    -0.5 * (dim as f64 * LN_2PI + chol.log_det() + chol.mahalanobis_sq(diff))
}

/// Per-point log-density under the mixture, via log-sum-exp over components.
fn point_log_likelihood(
    x: &[f64],
    params: &Params,
    chols: &[Cholesky],
    joint: &mut [f64],
) -> f64 {
    let dim = x.len();
    let mut max = f64::NEG_INFINITY;
    let mut diff = vec![0.0; dim];
    for k in 0..params.weights.len() {
        let w = params.weights[k];
        joint[k] = if w > 0.0 {
            for (d, (xv, mv)) in x.iter().zip(&params.means[k]).enumerate() {
                diff[d] = xv - mv;
            }
            w.ln() + log_pdf(&chols[k], dim, &diff)
        } else {
            f64::NEG_INFINITY
        };
        if joint[k] > max {
            max = joint[k];
        }
    }
    let sum: f64 = joint.iter().map(|j| (j - max).exp()).sum();
    max + sum.ln()
}

fn e_step(
    data: &[Vec<f64>],
    params: &Params,
    chols: &[Cholesky],
    resp: &mut [Vec<f64>],
) -> f64 {
    let k = params.weights.len();
    let mut joint = vec![0.0; k];
    let mut total = 0.0;
    for (i, x) in data.iter().enumerate() {
        let lse = point_log_likelihood(x, params, chols, &mut joint);
        total += lse;
        for (r, j) in resp[i].iter_mut().zip(&joint) {
            *r = (j - lse).exp();
        }
    }
    total
}

fn m_step(data: &[Vec<f64>], resp: &[Vec<f64>], params: &mut Params, regularizer: f64) {
    let n = data.len();
    let dim = data[0].len();
    let k = params.weights.len();

    for c in 0..k {
        let nk: f64 = resp.iter().map(|r| r[c]).sum();
        if nk < 1e-12 {
            // Dead component: freeze its shape, zero its weight so it drops
            // out of the log-sum-exp.
            params.weights[c] = 0.0;
            continue;
        }
        params.weights[c] = nk / n as f64;

        let mean = &mut params.means[c];
        mean.iter_mut().for_each(|m| *m = 0.0);
        for (x, r) in data.iter().zip(resp) {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += r[c] * v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= nk);

        let cov = &mut params.covs[c];
        for row in cov.iter_mut() {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        for (x, r) in data.iter().zip(resp) {
            for i in 0..dim {
                let di = x[i] - mean[i];
                for j in i..dim {
                    cov[i][j] += r[c] * di * (x[j] - mean[j]);
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                cov[i][j] /= nk;
                cov[j][i] = cov[i][j];
            }
            cov[i][i] += regularizer;
        }
    }
}

fn fit_once(data: &[Vec<f64>], config: &GmmConfig, seed: u64) -> Result<GmmModel> {
    let n = data.len();
    let k = config.k;
    let reg = config.covariance_regularizer;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = kmeans_pp_indices(data, k, &mut rng);

    let mut pooled = covariance(data, &mean_rows(data));
    add_diagonal(&mut pooled, reg);
    let mut params = Params {
        weights: vec![1.0 / k as f64; k],
        means: centers.iter().map(|&i| data[i].clone()).collect(),
        covs: vec![pooled; k],
    };
    let mut chols = factor_all(&mut params.covs, reg)?;

    let mut resp = vec![vec![0.0; k]; n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut prev_ll = f64::NEG_INFINITY;

    for iter in 0..config.max_iterations {
        let ll = e_step(data, &params, &chols, &mut resp);
        if !ll.is_finite() {
            return Err(Error::Data(format!(
                "log-likelihood became non-finite at iteration {iter}"
            )));
        }
        history.push(ll);
        if iter > 0 && (ll - prev_ll).abs() / prev_ll.abs().max(1.0) < config.rel_tolerance {
            converged = true;
            break;
        }
        prev_ll = ll;
        m_step(data, &resp, &mut params, reg);
        chols = factor_all(&mut params.covs, reg)?;
    }

    if !converged {
        // The loop ran out after an M-step; measure the parameters we return.
        let mut joint = vec![0.0; k];
        let ll: f64 = data
            .iter()
            .map(|x| point_log_likelihood(x, &params, &chols, &mut joint))
            .sum();
        history.push(ll);
    }

    Ok(GmmModel {
        weights: params.weights,
        means: params.means,
        covariances: params.covs,
        converged,
        final_log_likelihood: *history.last().unwrap(),
        log_likelihood_history: history,
    })
}

/// Fits a k-component full-covariance mixture. Deterministic for identical
/// data and config.
pub fn gmm_fit(data: &[Vec<f64>], config: &GmmConfig) -> Result<GmmModel> {
    let _dim = validate_data(data)?;
    if config.k == 0 {
        return Err(Error::Config("component count k must be at least 1".into()));
    }
    if config.k > data.len() {
        return Err(Error::Data(format!(
            "cannot fit {} components to {} points",
            config.k,
            data.len()
        )));
    }
    if config.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be at least 1".into()));
    }
    if config.restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    if !(config.rel_tolerance > 0.0) {
        return Err(Error::Config("rel_tolerance must be positive".into()));
    }
    if config.covariance_regularizer < 0.0 {
        return Err(Error::Config("covariance_regularizer must be nonnegative".into()));
    }

    let mut best: Option<GmmModel> = None;
    for r in 0..config.restarts {
        let seed = if r == 0 {
            config.seed
        } else {
            splitmix64(config.seed.wrapping_add(r as u64))
        };
        let model = fit_once(data, config, seed)?;
        let better = best
            .as_ref()
            .map_or(true, |b| model.final_log_likelihood > b.final_log_likelihood);
        if better {
            best = Some(model);
        }
    }
    Ok(best.unwrap())
}

/// Log-density of each point under the mixture.
pub fn gmm_log_likelihood(model: &GmmModel, data: &[Vec<f64>]) -> Result<Vec<f64>> {
    let dim = validate_data(data)?;
    if dim != model.dim() {
        return Err(Error::Data(format!(
            "data has dimension {dim}, model has {}",
            model.dim()
        )));
    }
    let params = Params {
        weights: model.weights.clone(),
        means: model.means.clone(),
        covs: model.covariances.clone(),
    };
    let mut covs = params.covs.clone();
    let chols: Vec<Cholesky> = covs
        .iter_mut()
        .enumerate()
        .map(|(k, c)| {
            Cholesky::new(c).ok_or_else(|| {
                Error::Data(format!("component {k} covariance is not positive definite"))
            })
        })
        .collect::<Result<_>>()?;
    let mut joint = vec![0.0; model.k()];
    Ok(data
        .iter()
        .map(|x| point_log_likelihood(x, &params, &chols, &mut joint))
        .collect())
}

/// Most responsible component per point; ties go to the lower index.
pub fn gmm_predict(model: &GmmModel, data: &[Vec<f64>]) -> Result<Vec<usize>> {
    let dim = validate_data(data)?;
    if dim != model.dim() {
        return Err(Error::Data(format!(
            "data has dimension {dim}, model has {}",
            model.dim()
        )));
    }
    let mut covs = model.covariances.clone();
    let chols: Vec<Cholesky> = covs
        .iter_mut()
        .enumerate()
        .map(|(k, c)| {
            Cholesky::new(c).ok_or_else(|| {
                Error::Data(format!("component {k} covariance is not positive definite"))
            })
        })
        .collect::<Result<_>>()?;

    let assignments = data
        .iter()
        .map(|x| {
            let mut best = 0;
            let mut best_joint = f64::NEG_INFINITY;
            let mut diff = vec![0.0; dim];
            for k in 0..model.k() {
                if model.weights[k] <= 0.0 {
                    continue;
                }
                for (d, (xv, mv)) in x.iter().zip(&model.means[k]).enumerate() {
                    diff[d] = xv - mv;
                }
                let joint = model.weights[k].ln() + log_pdf(&chols[k], dim, &diff);
                if joint > best_joint {
                    best_joint = joint;
                    best = k;
                }
            }
            best
        })
        .collect();
    Ok(assignments)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionCriterion {
    Bic,
    Aic,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSelection {
    pub chosen_k: usize,
    /// (candidate k, criterion score) in the order the candidates were given.
    pub scores: Vec<(usize, f64)>,
}

/// Fits each candidate component count and scores it; the minimum score
/// wins, ties to the smaller k. Parameter count for a k-component mixture
/// over dimension R is (k-1) + kR + kR(R+1)/2.
pub fn gmm_select_k(
    data: &[Vec<f64>],
    candidates: &[usize],
    criterion: SelectionCriterion,
    base: &GmmConfig,
) -> Result<ModelSelection> {
    if candidates.is_empty() {
        return Err(Error::Config("no candidate component counts".into()));
    }
    let dim = validate_data(data)? as f64;
    let n = data.len() as f64;

    let mut scores = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, usize)> = None;
    for &k in candidates {
        let config = GmmConfig { k, ..base.clone() };
        let model = gmm_fit(data, &config)?;
        let p = (k as f64 - 1.0) + k as f64 * dim + k as f64 * dim * (dim + 1.0) / 2.0;
        let ll = model.final_log_likelihood;
        let score = match criterion {
            SelectionCriterion::Bic => p * n.ln() - 2.0 * ll,
            SelectionCriterion::Aic => 2.0 * p - 2.0 * ll,
        };
        scores.push((k, score));
        let better = match best {
            None => true,
            Some((bs, bk)) => score < bs || (score == bs && k < bk),
        };
        if better {
            best = Some((score, k));
        }
    }
    Ok(ModelSelection {
        chosen_k: best.unwrap().1,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(center: &[f64], n: usize, spread: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        // Box-Muller pairs; good enough for test fixtures.
        let gauss = |rng: &mut ChaCha8Rng| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        (0..n)
            .map(|_| {
                center
                    .iter()
                    .map(|c| c + spread * gauss(rng))
                    .collect()
            })
            .collect()
    }

    fn two_blobs(seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = blob(&[0.0, 0.0], 20, 0.5, &mut rng);
        data.extend(blob(&[8.0, 8.0], 20, 0.5, &mut rng));
        data
    }

    #[test]
    fn single_component_recovers_mean_and_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data = blob(&[3.0, -1.0, 0.5], 40, 1.3, &mut rng);
        let model = gmm_fit(&data, &GmmConfig::new(1, 0)).unwrap();

        assert_eq!(model.weights, vec![1.0]);

        // Oracle: direct mean and population covariance plus the regularizer.
        let n = data.len() as f64;
        for d in 0..3 {
            let mean: f64 = data.iter().map(|x| x[d]).sum::<f64>() / n;
            assert!((model.means[0][d] - mean).abs() < 1e-9);
        }
        for i in 0..3 {
            for j in 0..3 {
                let mi: f64 = data.iter().map(|x| x[i]).sum::<f64>() / n;
                let mj: f64 = data.iter().map(|x| x[j]).sum::<f64>() / n;
                let mut cov: f64 = data.iter().map(|x| (x[i] - mi) * (x[j] - mj)).sum::<f64>() / n;
                if i == j {
                    cov += 1e-6;
                }
                assert!((model.covariances[0][i][j] - cov).abs() < 1e-8, "({i},{j})");
            }
        }
    }

    #[test]
    fn standard_normal_log_density_at_origin() {
        let model = GmmModel {
            weights: vec![1.0],
            means: vec![vec![0.0]],
            covariances: vec![vec![vec![1.0]]],
            converged: true,
            final_log_likelihood: 0.0,
            log_likelihood_history: vec![],
        };
        let ll = gmm_log_likelihood(&model, &[vec![0.0]]).unwrap();
        assert!((ll[0] - (-0.9189385332046727)).abs() < 1e-12);
    }

    // Independent oracle: sum the densities directly, with the matrix
    // inverse and determinant from nalgebra.
    #[test]
    fn log_likelihood_matches_naive_density_sum() {
        let data = two_blobs(3);
        let model = gmm_fit(&data, &GmmConfig::new(2, 5)).unwrap();
        let lls = gmm_log_likelihood(&model, &data).unwrap();

        for (x, ll) in data.iter().zip(&lls) {
            let mut density = 0.0;
            for k in 0..model.k() {
                let dim = model.dim();
                let cov = nalgebra::DMatrix::from_fn(dim, dim, |i, j| model.covariances[k][i][j]);
                let det = cov.determinant();
                let inv = cov.try_inverse().unwrap();
                let diff = nalgebra::DVector::from_iterator(
                    dim,
                    x.iter().zip(&model.means[k]).map(|(a, b)| a - b),
                );
                let maha = (diff.transpose() * inv * &diff)[(0, 0)];
                let norm = (std::f64::consts::TAU.powi(dim as i32) * det).sqrt();
                density += model.weights[k] * (-0.5 * maha).exp() / norm;
            }
            assert!((ll - density.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn em_is_monotone_on_a_smoke_dataset() {
        let data = two_blobs(11);
        let model = gmm_fit(&data, &GmmConfig::new(3, 7)).unwrap();
        for w in model.log_likelihood_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "history decreased: {:?}", w);
        }
        assert_eq!(
            model.final_log_likelihood,
            *model.log_likelihood_history.last().unwrap()
        );
    }

    #[test]
    fn fitted_model_is_valid() {
        let data = two_blobs(23);
        let model = gmm_fit(&data, &GmmConfig::new(4, 9)).unwrap();

        let wsum: f64 = model.weights.iter().sum();
        assert!((wsum - 1.0).abs() < 1e-9);

        for cov in &model.covariances {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(cov[i][j], cov[j][i]);
                }
            }
            assert!(crate::linalg::Cholesky::new(cov).is_some(), "not PD");
        }
    }

    #[test]
    fn identical_inputs_give_bitwise_identical_models() {
        let data = two_blobs(29);
        let config = GmmConfig::new(3, 1234);
        let a = gmm_fit(&data, &config).unwrap();
        let b = gmm_fit(&data, &config).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.means, b.means);
        assert_eq!(a.covariances, b.covariances);
        assert_eq!(a.final_log_likelihood, b.final_log_likelihood);
    }

    #[test]
    fn restarts_never_lose_to_the_first_seed() {
        let data = two_blobs(31);
        let single = gmm_fit(&data, &GmmConfig::new(3, 42)).unwrap();
        let multi = gmm_fit(
            &data,
            &GmmConfig {
                restarts: 4,
                ..GmmConfig::new(3, 42)
            },
        )
        .unwrap();
        assert!(multi.final_log_likelihood >= single.final_log_likelihood - 1e-12);
    }

    #[test]
    fn rejects_degenerate_requests() {
        let data = two_blobs(37);
        assert!(gmm_fit(&data, &GmmConfig::new(0, 0)).is_err());
        assert!(gmm_fit(&data, &GmmConfig::new(data.len() + 1, 0)).is_err());
        assert!(gmm_fit(&[], &GmmConfig::new(1, 0)).is_err());
        assert!(gmm_fit(&[vec![1.0], vec![f64::NAN]], &GmmConfig::new(1, 0)).is_err());
    }

    #[test]
    fn bic_picks_two_components_for_two_blobs() {
        let data = two_blobs(41);
        let selection =
            gmm_select_k(&data, &[1, 2, 3, 4], SelectionCriterion::Bic, &GmmConfig::new(1, 13))
                .unwrap();
        assert_eq!(selection.chosen_k, 2);
        assert_eq!(selection.scores.len(), 4);
    }

    #[test]
    fn aic_and_bic_differ_by_the_parameter_penalty() {
        let data = two_blobs(43);
        let base = GmmConfig::new(1, 3);
        let bic = gmm_select_k(&data, &[1, 2, 3], SelectionCriterion::Bic, &base).unwrap();
        let aic = gmm_select_k(&data, &[1, 2, 3], SelectionCriterion::Aic, &base).unwrap();
        let n = data.len() as f64;
        for ((k, b), (_, a)) in bic.scores.iter().zip(&aic.scores) {
            let kf = *k as f64;
            let dim = 2.0;
            let p = (kf - 1.0) + kf * dim + kf * dim * (dim + 1.0) / 2.0;
            let want = p * (n.ln() - 2.0);
            assert!(((b - a) - want).abs() < 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn predict_assigns_points_to_their_blob() {
        let data = two_blobs(47);
        let model = gmm_fit(&data, &GmmConfig::new(2, 3)).unwrap();
        let labels = gmm_predict(&model, &data).unwrap();
        // All of the first blob together, all of the second together.
        assert!(labels[..20].iter().all(|&l| l == labels[0]));
        assert!(labels[20..].iter().all(|&l| l == labels[20]));
        assert_ne!(labels[0], labels[20]);
    }

    #[test]
    fn model_dump_is_flat_json() {
        let data = two_blobs(53);
        let model = gmm_fit(&data, &GmmConfig::new(2, 3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.dump_json(&path).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["weights"].as_array().unwrap().len(), 2);
        assert_eq!(doc["covariances"][0].as_array().unwrap().len(), 4);
        assert!(doc["final_log_likelihood"].is_number());
    }

    #[test]
    fn duplicate_points_still_fit() {
        // More components than distinct locations exercises the k-means++
        // fallback and the covariance regularizer.
        let mut data = vec![vec![1.0, 1.0]; 6];
        data.extend(vec![vec![2.0, 2.0]; 6]);
        let model = gmm_fit(&data, &GmmConfig::new(4, 8)).unwrap();
        let wsum: f64 = model.weights.iter().sum();
        assert!((wsum - 1.0).abs() < 1e-9);
        assert!(model.final_log_likelihood.is_finite());
    }
}
