//! Gaussian mixtures and the closed-form time-varying reference density.
//!
//! A [`DensityPath`] keeps the `m0` initial components frozen with weights
//! decaying as `e^{α(t−t0)}`, and adds `m` moving components that start on an
//! initial component and relax toward the final mixture: means exponentially,
//! covariances along the interpolation
//! `Σ0^{-1/2} [e Σ0 + (1−e)(Σ0^{1/2} Σf Σ0^{1/2})^{1/2}]² Σ0^{-1/2}`,
//! weights taking up whatever mass the frozen components release.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Disk, Rect};
use crate::linalg::{spd_inv_sqrt, spd_sqrt, SymMat2, Vec2};

/// Allowed deviation of mixture weights from the probability simplex.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Draw budget for rejection sampling of initial positions.
pub const SETTLING_EXPONENT: f64 = 20.0;

pub const SAMPLE_BUDGET: usize = 1_000_000;

/// A scalar field over the plane that may vary in time.
pub trait Density: Sync {
    fn eval(&self, q: Vec2, t: f64) -> f64;
}

impl<F> Density for F
where
    F: Fn(Vec2, f64) -> f64 + Sync,
{
    fn eval(&self, q: Vec2, t: f64) -> f64 {
        self(q, t)
    }
}

/// Bivariate normal density with cached inverse and normalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    mean: Vec2,
    cov: SymMat2,
    precision: SymMat2,
    norm: f64,
}

impl Gaussian {
    pub fn new(mean: Vec2, cov: SymMat2) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite mean {mean:?}")));
        }
        if !cov.is_spd() {
            return Err(Error::Domain(format!(
                "covariance {cov:?} is not positive definite"
            )));
        }
        let precision = cov.inverse()?;
        let norm = 1.0 / (2.0 * PI * cov.det().sqrt());
        Ok(Gaussian {
            mean,
            cov,
            precision,
            norm,
        })
    }

    pub fn mean(&self) -> Vec2 {
        self.mean
    }

    pub fn cov(&self) -> SymMat2 {
        self.cov
    }

    pub fn pdf(&self, q: Vec2) -> f64 {
        self.norm * (-0.5 * self.precision.quad_form(q - self.mean)).exp()
    }

    pub fn ln_pdf(&self, q: Vec2) -> f64 {
        self.norm.ln() - 0.5 * self.precision.quad_form(q - self.mean)
    }
}

/// `ρ_N(q; μ, Σ)` for `k = 2`.
pub fn gaussian_pdf(q: Vec2, g: &Gaussian) -> f64 {
    g.pdf(q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    components: Vec<Gaussian>,
    weights: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(components: Vec<Gaussian>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("mixture has no components".into()));
        }
        if components.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "weights {weights:?} must be non-negative"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidInput(format!(
                "weights {weights:?} sum to {total}, not 1"
            )));
        }
        Ok(GaussianMixture {
            components,
            weights,
        })
    }

    pub fn single(g: Gaussian) -> Self {
        GaussianMixture {
            components: vec![g],
            weights: vec![1.0],
        }
    }

    pub fn components(&self) -> &[Gaussian] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn eval(&self, q: Vec2) -> f64 {
        self.components
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(g, &w)| w * g.pdf(q))
            .sum()
    }
}

impl Density for GaussianMixture {
    fn eval(&self, q: Vec2, _t: f64) -> f64 {
        GaussianMixture::eval(self, q)
    }
}

/// `g(q; G, λ) = Σ λ_j ρ_N(q; μ_j, Σ_j)`.
pub fn gm_eval(q: Vec2, mix: &GaussianMixture) -> f64 {
    mix.eval(q)
}

/// Exponential relaxation rates of a [`DensityPath`], all strictly negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    /// Mean rate.
    pub a: f64,
    /// Covariance rate.
    pub b: f64,
    /// Weight-transfer rate.
    pub alpha: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Rates {
            a: -0.5,
            b: -0.5,
            alpha: -0.5,
        }
    }
}

impl Rates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("alpha", self.alpha)] {
            if !(v < 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "rate {name} = {v} must be strictly negative"
                )));
            }
        }
        Ok(())
    }

    /// Magnitude of the slowest rate.
    pub fn slowest(&self) -> f64 {
        self.a.abs().min(self.b.abs()).min(self.alpha.abs())
    }

    /// Time after which every exponential factor is below `e^-20` and a path
    /// is indistinguishable from its target.
    pub fn settling_time(&self) -> f64 {
        SETTLING_EXPONENT / self.slowest()
    }
}

/// Per moving component: the square-root factors its covariance path needs.
#[derive(Clone, Debug, PartialEq)]
struct CovarianceLeg {
    start: SymMat2,
    inv_sqrt_start: SymMat2,
    /// `(Σ0^{1/2} Σf Σ0^{1/2})^{1/2}`
    bridge: SymMat2,
}

/// Time-varying Gaussian-mixture reference density.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPath {
    t0: f64,
    initial: GaussianMixture,
    target: GaussianMixture,
    pairing: Vec<usize>,
    rates: Rates,
    legs: Vec<CovarianceLeg>,
}

impl DensityPath {
    pub fn new(
        t0: f64,
        initial: GaussianMixture,
        target: GaussianMixture,
        rates: Rates,
    ) -> Result<Self> {
        rates.validate()?;
        if !t0.is_finite() {
            return Err(Error::InvalidInput(format!("t0 = {t0} is not finite")));
        }
        let init_means: Vec<Vec2> = initial.components().iter().map(|g| g.mean()).collect();
        let final_means: Vec<Vec2> = target.components().iter().map(|g| g.mean()).collect();
        let pairing = assign_pairing(&init_means, &final_means);
        let legs = pairing
            .iter()
            .zip(target.components())
            .map(|(&j1, g_f)| {
                let start = initial.components()[j1].cov();
                let sqrt_start = spd_sqrt(&start)?;
                let inv_sqrt_start = spd_inv_sqrt(&start)?;
                let bridge = spd_sqrt(&sqrt_start.sandwich(&g_f.cov()))?;
                Ok(CovarianceLeg {
                    start,
                    inv_sqrt_start,
                    bridge,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityPath {
            t0,
            initial,
            target,
            pairing,
            rates,
            legs,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn initial(&self) -> &GaussianMixture {
        &self.initial
    }

    pub fn target(&self) -> &GaussianMixture {
        &self.target
    }

    pub fn rates(&self) -> Rates {
        self.rates
    }

    /// Whether the path is constant in time: it starts at its target and
    /// every moving component starts from its own target component.
    pub fn is_stationary(&self) -> bool {
        self.initial == self.target && self.pairing.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Index of the initial component each moving component starts from.
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    fn elapsed(&self, t: f64) -> Result<f64> {
        if !(t >= self.t0) {
            return Err(Error::Domain(format!(
                "path starts at t0 = {}, queried at t = {t}",
                self.t0
            )));
        }
        Ok(t - self.t0)
    }

    fn check_index(&self, j2: usize) -> Result<()> {
        if j2 >= self.target.len() {
            return Err(Error::InvalidInput(format!(
                "component {j2} out of range for {} moving components",
                self.target.len()
            )));
        }
        Ok(())
    }

    /// `μ_f + (μ_0 − μ_f) e^{a(t−t0)}`.
    pub fn mean(&self, j2: usize, t: f64) -> Result<Vec2> {
        self.check_index(j2)?;
        let e = (self.rates.a * self.elapsed(t)?).exp();
        let mu_f = self.target.components()[j2].mean();
        let mu_0 = self.initial.components()[self.pairing[j2]].mean();
        Ok(mu_f + (mu_0 - mu_f) * e)
    }

    pub fn cov(&self, j2: usize, t: f64) -> Result<SymMat2> {
        self.check_index(j2)?;
        let e = (self.rates.b * self.elapsed(t)?).exp();
        let leg = &self.legs[j2];
        let bracket = leg.start.scale(e).add(&leg.bridge.scale(1.0 - e));
        Ok(leg.inv_sqrt_start.sandwich(&bracket.square()))
    }

    /// Frozen-component weights followed by moving-component weights.
    pub fn weights(&self, t: f64) -> Result<Vec<f64>> {
        let e = (self.rates.alpha * self.elapsed(t)?).exp();
        let mut w: Vec<f64> = self.initial.weights().iter().map(|l| l * e).collect();
        let released = 1.0 - w.iter().sum::<f64>();
        w.extend(self.target.weights().iter().map(|l| l * released));
        Ok(w)
    }

    /// The instantaneous mixture `φ(·, t)` with `m0 + m` components.
    pub fn mixture_at(&self, t: f64) -> Result<GaussianMixture> {
        let weights = self.weights(t)?;
        let mut components = self.initial.components().to_vec();
        for j2 in 0..self.target.len() {
            components.push(Gaussian::new(self.mean(j2, t)?, self.cov(j2, t)?)?);
        }
        Ok(GaussianMixture {
            components,
            weights,
        })
    }

    pub fn eval(&self, q: Vec2, t: f64) -> Result<f64> {
        Ok(self.mixture_at(t)?.eval(q))
    }
}

/// Pair each final component with an initial one.
///
/// Equal counts use the assignment minimizing total squared mean distance
/// (exhaustive for up to 8 components, greedy above); otherwise indices cycle.
pub fn assign_pairing(initial_means: &[Vec2], final_means: &[Vec2]) -> Vec<usize> {
    let m0 = initial_means.len();
    let m = final_means.len();
    if m0 != m {
        return (0..m).map(|j2| j2 % m0).collect();
    }
    let cost = |j2: usize, j1: usize| (final_means[j2] - initial_means[j1]).norm_sq();
    if m <= 8 {
        let mut perm: Vec<usize> = (0..m).collect();
        let mut best = perm.clone();
        let mut best_cost = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            let c: f64 = p.iter().enumerate().map(|(j2, &j1)| cost(j2, j1)).sum();
            if c < best_cost {
                best_cost = c;
                best.copy_from_slice(p);
            }
        });
        best
    } else {
        let mut taken = vec![false; m0];
        (0..m)
            .map(|j2| {
                let j1 = (0..m0)
                    .filter(|&j1| !taken[j1])
                    .min_by(|&x, &y| cost(j2, x).total_cmp(&cost(j2, y)))
                    .expect("equal counts leave a free index");
                taken[j1] = true;
                j1
            })
            .collect()
    }
}

/// Visits permutations in lexicographic order, so ties keep the earliest.
fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p[k..=i].rotate_right(1);
        permute(p, k + 1, visit);
        p[k..=i].rotate_left(1);
    }
}

/// Draw `n` points from `mix`, rejecting those outside `domain` or on an obstacle.
pub fn sample_mixture(
    mix: &GaussianMixture,
    n: usize,
    domain: &Rect,
    obstacles: &[Disk],
    seed: u64,
) -> Result<Vec<Vec2>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(mix.weights())
        .map_err(|e| Error::InvalidInput(format!("mixture weights: {e}")))?;
    let roots = mix
        .components()
        .iter()
        .map(|g| spd_sqrt(&g.cov()))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(n);
    for _ in 0..SAMPLE_BUDGET {
        let j = pick.sample(&mut rng);
        let z = Vec2::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        );
        let q = mix.components()[j].mean() + roots[j].mul_vec(z);
        let feasible =
            domain.contains(q) && obstacles.iter().all(|d| q.distance(d.center) > d.radius);
        if feasible {
            out.push(q);
            if out.len() == n {
                return Ok(out);
            }
        }
    }
    Err(Error::InfeasibleScenario(format!(
        "only {} of {n} feasible samples after {SAMPLE_BUDGET} draws",
        out.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mx: f64, my: f64, cov: SymMat2) -> Gaussian {
        Gaussian::new(Vec2::new(mx, my), cov).unwrap()
    }

    fn one(mean: Vec2, cov: SymMat2) -> GaussianMixture {
        GaussianMixture::single(Gaussian::new(mean, cov).unwrap())
    }

    #[test]
    fn pdf_examples() {
        let unit = g(0.0, 0.0, SymMat2::IDENTITY);
        let two_pi = 2.0 * PI;
        assert!((gaussian_pdf(Vec2::ZERO, &unit) - 1.0 / two_pi).abs() < 1e-16);
        assert!(
            (gaussian_pdf(Vec2::new(1.0, 0.0), &unit) - (-0.5f64).exp() / two_pi).abs() < 1e-16
        );
        let wide = g(0.0, 0.0, SymMat2::diag(4.0, 1.0));
        assert!((gaussian_pdf(Vec2::ZERO, &wide) - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!(
            (unit.ln_pdf(Vec2::new(0.3, -1.0)) - unit.pdf(Vec2::new(0.3, -1.0)).ln()).abs() < 1e-14
        );
    }

    #[test]
    fn singular_covariance_is_rejected() {
        assert!(matches!(
            Gaussian::new(Vec2::ZERO, SymMat2::new(1.0, 1.0, 1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mixture_validation() {
        let c = g(0.0, 0.0, SymMat2::IDENTITY);
        assert!(GaussianMixture::new(vec![], vec![]).is_err());
        assert!(GaussianMixture::new(vec![c.clone()], vec![0.5, 0.5]).is_err());
        assert!(GaussianMixture::new(vec![c.clone(), c.clone()], vec![0.5, 0.6]).is_err());
        assert!(GaussianMixture::new(vec![c.clone(), c.clone()], vec![1.5, -0.5]).is_err());
        assert!(GaussianMixture::new(vec![c.clone(), c], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn mixture_examples() {
        let c = g(1.0, 2.0, SymMat2::new(2.0, 0.3, 1.0));
        let q = Vec2::new(0.5, 2.5);
        assert_eq!(gm_eval(q, &GaussianMixture::single(c.clone())), c.pdf(q));
        let twin = GaussianMixture::new(vec![c.clone(), c.clone()], vec![0.5, 0.5]).unwrap();
        assert!((gm_eval(q, &twin) - c.pdf(q)).abs() < 1e-17);
    }

    #[test]
    fn initial_scenario_mixture_at_first_mean() {
        let mix = GaussianMixture::new(
            vec![
                g(3.0, 12.0, SymMat2::new(0.2, -0.6, 3.0)),
                g(12.0, 14.0, SymMat2::new(10.5, -0.5, 2.0)),
            ],
            vec![0.3, 0.7],
        )
        .unwrap();
        let q = Vec2::new(3.0, 12.0);
        // Component 1 sits at its mean: 1/(2π√det) with det = 0.24.
        // Component 2 is at offset (-9, -2) with det = 20.75.
        let c1 = 1.0 / (2.0 * PI * 0.24f64.sqrt());
        let det2: f64 = 10.5 * 2.0 - 0.25;
        let (dx, dy) = (-9.0, -2.0);
        let quad2 = (2.0 * dx * dx + 2.0 * 0.5 * dx * dy + 10.5 * dy * dy) / det2;
        let c2 = (-0.5 * quad2).exp() / (2.0 * PI * det2.sqrt());
        let expected = 0.3 * c1 + 0.7 * c2;
        assert!((gm_eval(q, &mix) - expected).abs() < 1e-14 * expected);
    }

    fn simple_path(a: f64) -> DensityPath {
        DensityPath::new(
            0.0,
            one(Vec2::new(0.0, 0.0), SymMat2::IDENTITY),
            one(Vec2::new(10.0, 0.0), SymMat2::scaled_identity(4.0)),
            Rates { a, b: a, alpha: a },
        )
        .unwrap()
    }

    #[test]
    fn mean_path_examples() {
        let p = simple_path(-1.0);
        assert_eq!(p.mean(0, 0.0).unwrap(), Vec2::ZERO);
        assert!((p.mean(0, 2f64.ln()).unwrap() - Vec2::new(5.0, 0.0)).norm() < 1e-14);
        assert!((p.mean(0, 60.0).unwrap() - Vec2::new(10.0, 0.0)).norm() < 1e-12);
        assert!(matches!(p.mean(0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cov_path_examples() {
        let p = simple_path(-1.0);
        let at = |t| p.cov(0, t).unwrap();
        assert!((at(0.0).add(&SymMat2::IDENTITY.scale(-1.0))).frobenius() < 1e-15);
        // e = 0.5: (0.5·1 + 0.5·2)² = 2.25
        let mid = at(2f64.ln());
        assert!((mid.a11 - 2.25).abs() < 1e-14 && mid.a12.abs() < 1e-15);
        assert!((at(60.0).add(&SymMat2::scaled_identity(-4.0))).frobenius() < 1e-12);
    }

    #[test]
    fn cov_path_recovers_general_endpoints() {
        let s0 = SymMat2::new(0.2, -0.6, 3.0);
        let sf = SymMat2::new(0.8, 0.2, 0.4);
        let p = DensityPath::new(
            0.0,
            one(Vec2::ZERO, s0),
            one(Vec2::ZERO, sf),
            Rates::default(),
        )
        .unwrap();
        let start = p.cov(0, 0.0).unwrap();
        let end = p.cov(0, 200.0).unwrap();
        assert!(start.add(&s0.scale(-1.0)).frobenius() < 1e-12);
        assert!(end.add(&sf.scale(-1.0)).frobenius() < 1e-12);
    }

    #[test]
    fn weight_path_examples() {
        let p = DensityPath::new(
            0.0,
            one(Vec2::ZERO, SymMat2::IDENTITY),
            GaussianMixture::new(
                vec![
                    g(1.0, 0.0, SymMat2::IDENTITY),
                    g(-1.0, 0.0, SymMat2::IDENTITY),
                ],
                vec![0.5, 0.5],
            )
            .unwrap(),
            Rates {
                a: -1.0,
                b: -1.0,
                alpha: -1.0,
            },
        )
        .unwrap();
        assert_eq!(p.weights(0.0).unwrap(), vec![1.0, 0.0, 0.0]);
        let w = p.weights(2f64.ln()).unwrap();
        for (got, want) in w.iter().zip([0.5, 0.25, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        let w = p.weights(1000.0).unwrap();
        assert_eq!(w, vec![0.0, 0.5, 0.5]);
        // m0 != m: indices cycle
        assert_eq!(p.pairing(), &[0, 0]);
    }

    #[test]
    fn path_eval_boundaries() {
        let p = simple_path(-0.5);
        let q = Vec2::new(2.0, 1.0);
        assert_eq!(p.eval(q, 0.0).unwrap(), p.initial().eval(q));
        let late = p.eval(q, 100.0).unwrap();
        assert!((late - p.target().eval(q)).abs() < 1e-10);
        assert!(p.eval(Vec2::new(-30.0, 0.0), 1.0).unwrap() > 0.0);
    }

    #[test]
    fn rates_must_be_negative() {
        let r = DensityPath::new(
            0.0,
            one(Vec2::ZERO, SymMat2::IDENTITY),
            one(Vec2::ZERO, SymMat2::IDENTITY),
            Rates {
                a: -1.0,
                b: 0.0,
                alpha: -1.0,
            },
        );
        assert!(r.is_err());
    }

    #[test]
    fn pairing_prefers_nearest_means() {
        let init = [
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 0.0),
            Vec2::new(5.0, 5.0),
        ];
        let fin = [
            Vec2::new(9.0, 1.0),
            Vec2::new(4.0, 6.0),
            Vec2::new(1.0, -1.0),
        ];
        assert_eq!(assign_pairing(&init, &fin), vec![1, 2, 0]);
        assert_eq!(assign_pairing(&init[..2], &fin), vec![0, 1, 0]);
    }

    #[test]
    fn pairing_greedy_above_eight() {
        let init: Vec<Vec2> = (0..9).map(|i| Vec2::new(i as f64, 0.0)).collect();
        let fin: Vec<Vec2> = init.iter().rev().copied().collect();
        assert_eq!(
            assign_pairing(&init, &fin),
            (0..9).rev().collect::<Vec<_>>()
        );
    }

    #[test]
    fn sampling_respects_domain_and_obstacles() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let mix = one(Vec2::ZERO, SymMat2::scaled_identity(4.0));
        assert!(sample_mixture(&mix, 0, &domain, &[], 1).unwrap().is_empty());

        let obs = [Disk::new(Vec2::ZERO, 1.0).unwrap()];
        let pts = sample_mixture(&mix, 500, &domain, &obs, 3).unwrap();
        assert_eq!(pts.len(), 500);
        assert!(pts.iter().all(|p| domain.contains(*p) && p.norm() > 1.0));
        assert_eq!(pts, sample_mixture(&mix, 500, &domain, &obs, 3).unwrap());
        assert_ne!(pts, sample_mixture(&mix, 500, &domain, &obs, 4).unwrap());
    }

    #[test]
    fn tight_gaussian_samples_stay_near_mean() {
        let domain = Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap();
        let sigma = 0.01;
        let mix = one(
            Vec2::new(1.0, -2.0),
            SymMat2::scaled_identity(sigma * sigma),
        );
        let pts = sample_mixture(&mix, 1000, &domain, &[], 11).unwrap();
        assert!(pts
            .iter()
            .all(|p| p.distance(Vec2::new(1.0, -2.0)) < 6.0 * sigma));
    }

    #[test]
    fn infeasible_sampling_errors() {
        let domain = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let mix = one(Vec2::new(50.0, 50.0), SymMat2::scaled_identity(0.01));
        assert!(matches!(
            sample_mixture(&mix, 1, &domain, &[], 0),
            Err(Error::InfeasibleScenario(_))
        ));
    }
}
