//! Expectation-maximization fit of a Gaussian mixture to agent positions.
//!
//! Initialization is k-means++ seeding followed by a few Lloyd iterations.
//! Covariances are kept well conditioned by clamping their eigenvalues to
//! `cov_floor` after every M-step, which is the constrained maximizer of the
//! M-step objective and therefore keeps EM monotone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::{Gaussian, GaussianMixture};
use crate::error::{Error, Result};
use crate::linalg::{SymMat2, Vec2};
use crate::mix_seed;

const KMEANS_ITERS: usize = 10;

/// Components whose responsibility mass drops below this fraction of the
/// point count are re-seeded.
const EMPTY_COMPONENT_FRACTION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Stop when the log-likelihood changes by less than this, relatively.
    pub rel_tol: f64,
    /// Eigenvalue floor for every fitted covariance (m²).
    pub cov_floor: f64,
    pub n_restarts: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            max_iters: 200,
            rel_tol: 1e-8,
            cov_floor: 1e-3,
            n_restarts: 3,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidInput("em max_iters must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("em rel_tol must be positive".into()));
        }
        if !(self.cov_floor > 0.0 && self.cov_floor.is_finite()) {
            return Err(Error::InvalidInput("em cov_floor must be positive".into()));
        }
        if self.n_restarts < 1 {
            return Err(Error::InvalidInput("em n_restarts must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub mixture: GaussianMixture,
    pub log_likelihood: f64,
    /// Completed M-steps in the winning restart.
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each E-step of the winning restart.
    pub history: Vec<f64>,
    /// Whether a starved component was re-seeded during the winning restart.
    pub reseeded: bool,
}

/// Σ_p log g(p; mix), computed with log-sum-exp.
pub fn log_likelihood(mix: &GaussianMixture, points: &[Vec2]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &p) in points.iter().enumerate() {
        let l = log_density(mix, p);
        if !l.is_finite() {
            return Err(Error::ZeroDensity { index: i });
        }
        total += l;
    }
    Ok(total)
}

fn log_density(mix: &GaussianMixture, p: Vec2) -> f64 {
    let terms: Vec<f64> = mix
        .components()
        .iter()
        .zip(mix.weights())
        .map(|(g, &w)| w.ln() + g.ln_pdf(p))
        .collect();
    log_sum_exp(&terms)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Posterior component probabilities, one row per point.
pub fn responsibilities(mix: &GaussianMixture, points: &[Vec2]) -> Vec<Vec<f64>> {
    points.iter().map(|&p| e_row(mix, p).0).collect()
}

fn e_row(mix: &GaussianMixture, p: Vec2) -> (Vec<f64>, f64) {
    let terms: Vec<f64> = mix
        .components()
        .iter()
        .zip(mix.weights())
        .map(|(g, &w)| w.ln() + g.ln_pdf(p))
        .collect();
    let lse = log_sum_exp(&terms);
    (terms.iter().map(|t| (t - lse).exp()).collect(), lse)
}

/// Fit `m` components to `points`; best of `cfg.n_restarts` runs.
///
/// Points are put in a canonical order first, so the result does not depend
/// on how the caller ordered them.
pub fn fit(points: &[Vec2], m: usize, cfg: &EmConfig, seed: u64) -> Result<FitResult> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidInput("cannot fit zero components".into()));
    }
    if points.len() < m {
        return Err(Error::InsufficientData {
            points: points.len(),
            components: m,
        });
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} is not finite")));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));

    let mut best: Option<FitResult> = None;
    for restart in 0..cfg.n_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x656d, restart as u64));
        let run = run_em(&sorted, m, cfg, &mut rng)?;
        if best
            .as_ref()
            .is_none_or(|b| run.log_likelihood > b.log_likelihood)
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

struct Params {
    weights: Vec<f64>,
    means: Vec<Vec2>,
    covs: Vec<SymMat2>,
}

impl Params {
    fn to_mixture(&self) -> Result<GaussianMixture> {
        let comps = self
            .means
            .iter()
            .zip(&self.covs)
            .map(|(&mu, &cov)| Gaussian::new(mu, cov))
            .collect::<Result<Vec<_>>>()?;
        // Weights come from normalized responsibilities; renormalize to clear rounding.
        let total: f64 = self.weights.iter().sum();
        GaussianMixture::new(comps, self.weights.iter().map(|w| w / total).collect())
    }
}

fn run_em(points: &[Vec2], m: usize, cfg: &EmConfig, rng: &mut impl Rng) -> Result<FitResult> {
    let n = points.len();
    let mut params = kmeans_init(points, m, cfg.cov_floor, rng)?;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut reseeded = false;

    loop {
        let mix = params.to_mixture()?;
        let mut resp = Vec::with_capacity(n);
        let mut ll = 0.0;
        for (i, &p) in points.iter().enumerate() {
            let (row, lse) = e_row(&mix, p);
            if !lse.is_finite() {
                return Err(Error::ZeroDensity { index: i });
            }
            ll += lse;
            resp.push(row);
        }
        if let Some(&prev) = history.last() {
            let prev: f64 = prev;
            if (ll - prev).abs() < cfg.rel_tol * prev.abs() {
                converged = true;
            }
        }
        history.push(ll);
        if converged || iterations == cfg.max_iters {
            return Ok(FitResult {
                mixture: mix,
                log_likelihood: ll,
                iterations,
                converged,
                history,
                reseeded,
            });
        }

        // M-step
        for j in 0..m {
            let nk: f64 = resp.iter().map(|r| r[j]).sum();
            if nk < EMPTY_COMPONENT_FRACTION * n as f64 {
                let worst = points
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (i, log_density(&mix, p)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(i, _)| i)
                    .expect("points are non-empty");
                params.means[j] = points[worst];
                params.covs[j] = pooled_covariance(points, cfg.cov_floor)?;
                params.weights[j] = 1.0 / n as f64;
                reseeded = true;
                continue;
            }
            let mean = points
                .iter()
                .zip(&resp)
                .fold(Vec2::ZERO, |acc, (&p, r)| acc + p * r[j])
                / nk;
            let cov = points
                .iter()
                .zip(&resp)
                .fold(SymMat2::default(), |acc, (&p, r)| {
                    acc.add(&outer(p - mean).scale(r[j]))
                })
                .scale(1.0 / nk);
            params.weights[j] = nk / n as f64;
            params.means[j] = mean;
            params.covs[j] = cov.clamp_eigenvalues(cfg.cov_floor)?;
        }
        iterations += 1;
    }
}

fn outer(d: Vec2) -> SymMat2 {
    SymMat2::new(d.x * d.x, d.x * d.y, d.y * d.y)
}

fn pooled_covariance(points: &[Vec2], floor: f64) -> Result<SymMat2> {
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::ZERO, |a, &p| a + p) / n;
    points
        .iter()
        .fold(SymMat2::default(), |acc, &p| acc.add(&outer(p - mean)))
        .scale(1.0 / n)
        .clamp_eigenvalues(floor)
}

/// k-means++ seeding plus Lloyd iterations, then per-cluster statistics.
fn kmeans_init(points: &[Vec2], m: usize, floor: f64, rng: &mut impl Rng) -> Result<Params> {
    let n = points.len();
    let mut centers = Vec::with_capacity(m);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    centers.push(points[first]);
    chosen[first] = true;
    while centers.len() < m {
        let d2: Vec<f64> = points
            .iter()
            .map(|&p| {
                centers
                    .iter()
                    .map(|&c| (p - c).norm_sq())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc >= target {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("total > 0"))
        } else {
            // All remaining points coincide with a center.
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[idx] = true;
        centers.push(points[idx]);
    }

    let mut labels = vec![0usize; n];
    for _ in 0..KMEANS_ITERS {
        for (i, &p) in points.iter().enumerate() {
            labels[i] = nearest(&centers, p);
        }
        for (j, c) in centers.iter_mut().enumerate() {
            let (sum, count) = points
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == j)
                .fold((Vec2::ZERO, 0usize), |(s, k), (&p, _)| (s + p, k + 1));
            if count > 0 {
                *c = sum / count as f64;
            }
        }
    }
    for (i, &p) in points.iter().enumerate() {
        labels[i] = nearest(&centers, p);
    }

    let mut weights = Vec::with_capacity(m);
    let mut covs = Vec::with_capacity(m);
    for (j, &c) in centers.iter().enumerate() {
        let members: Vec<Vec2> = points
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == j)
            .map(|(&p, _)| p)
            .collect();
        if members.is_empty() {
            weights.push(1.0 / n as f64);
            covs.push(pooled_covariance(points, floor)?);
            continue;
        }
        let k = members.len() as f64;
        let cov = members
            .iter()
            .fold(SymMat2::default(), |acc, &p| acc.add(&outer(p - c)))
            .scale(1.0 / k);
        weights.push(k / n as f64);
        covs.push(cov.clamp_eigenvalues(floor)?);
    }
    Ok(Params {
        weights,
        means: centers,
        covs,
    })
}

fn nearest(centers: &[Vec2], p: Vec2) -> usize {
    centers
        .iter()
        .enumerate()
        .min_by(|a, b| (p - *a.1).norm_sq().total_cmp(&(p - *b.1).norm_sq()))
        .map(|(j, _)| j)
        .expect("centers are non-empty")
}
