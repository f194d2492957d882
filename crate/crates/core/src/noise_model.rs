//! Correlated Gaussian distribution of the mixing angle θ and loss angle φ,
//! its sampler, and the trigonometric moments that enter every channel output.
//!
//! The exponent matrix `[[1, -x], [-x, 1]] / σ²` is a precision matrix, so the
//! covariance is `σ²/(1-x²) · [[1, x], [x, 1]]`: marginal variances grow with
//! `x`, and only at `x = 0` do they equal `σ²`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, GaussHermite};

/// Sampling and density evaluation reject correlations this close to 1.
pub const MAX_SAMPLING_X: f64 = 1.0 - 1e-9;
pub const MIN_MC_SAMPLES: usize = 1000;
/// Marginal spread above which angular periodicity can no longer be ignored.
pub const PERIODICITY_WARNING_SPREAD: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    theta_star: f64,
    phi_star: f64,
    sigma: f64,
    x: f64,
    periodicity_warning: bool,
}

impl ChannelParams {
    pub fn new(theta_star: f64, phi_star: f64, sigma: f64, x: f64) -> Result<Self> {
        for (name, v) in [("theta_star", theta_star), ("phi_star", phi_star), ("sigma", sigma), ("x", x)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if sigma <= 0.0 {
            return Err(Error::NonPositiveSigma(sigma));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::CorrelationOutOfRange(x));
        }
        let spread = if x < 1.0 { sigma / (1.0 - x * x).sqrt() } else { f64::INFINITY };
        Ok(Self { theta_star, phi_star, sigma, x, periodicity_warning: spread > PERIODICITY_WARNING_SPREAD })
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }
    pub fn phi_star(&self) -> f64 {
        self.phi_star
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Set when the marginal standard deviation `σ/√(1-x²)` exceeds π/8.
    pub fn periodicity_warning(&self) -> bool {
        self.periodicity_warning
    }

    pub fn with_x(&self, x: f64) -> Result<Self> {
        Self::new(self.theta_star, self.phi_star, self.sigma, x)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.theta_star, self.phi_star, sigma, self.x)
    }

    fn require_proper(&self) -> Result<()> {
        if self.x >= MAX_SAMPLING_X {
            Err(Error::DegenerateCorrelation(self.x))
        } else {
            Ok(())
        }
    }

    /// Marginal variance `σ²/(1-x²)` of each angle.
    pub fn marginal_variance(&self) -> f64 {
        self.sigma * self.sigma / (1.0 - self.x * self.x)
    }

    /// Lower-triangular square root of the covariance, `[[l11, 0], [l21, l22]]`.
    pub fn cholesky(&self) -> Result<[[f64; 2]; 2]> {
        self.require_proper()?;
        let sd = self.marginal_variance().sqrt();
        Ok([[sd, 0.0], [self.x * sd, self.sigma]])
    }

    fn transform(&self, l: &[[f64; 2]; 2], u1: f64, u2: f64) -> AngleSample {
        AngleSample { theta: self.theta_star + l[0][0] * u1, phi: self.phi_star + l[1][0] * u1 + l[1][1] * u2 }
    }

    /// Tensor Gauss–Hermite nodes mapped through the whitening transform,
    /// with weights summing to one.
    pub fn quadrature_points(&self, nodes_per_axis: usize) -> Result<Vec<(AngleSample, f64)>> {
        let l = self.cholesky()?;
        let gh = GaussHermite::new(nodes_per_axis)?;
        let mut pts = Vec::with_capacity(gh.len() * gh.len());
        for (&u1, &w1) in gh.nodes.iter().zip(&gh.weights) {
            for (&u2, &w2) in gh.nodes.iter().zip(&gh.weights) {
                pts.push((self.transform(&l, u1, u2), w1 * w2));
            }
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSample {
    pub theta: f64,
    pub phi: f64,
}

/// How an average over P(θ, φ) is evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Quadrature { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Integrator {
    pub fn check(&self) -> Result<()> {
        match *self {
            Integrator::Quadrature { nodes } if nodes < GaussHermite::MIN_NODES => Err(Error::InsufficientEffort(
                format!("{nodes} quadrature nodes (need at least {})", GaussHermite::MIN_NODES),
            )),
            Integrator::MonteCarlo { samples, .. } if samples < MIN_MC_SAMPLES => Err(Error::InsufficientEffort(
                format!("{samples} Monte-Carlo samples (need at least {MIN_MC_SAMPLES})"),
            )),
            _ => Ok(()),
        }
    }

    /// Weighted evaluation points for this integrator; weights sum to one.
    pub fn points(&self, params: &ChannelParams) -> Result<Vec<(AngleSample, f64)>> {
        self.check()?;
        match *self {
            Integrator::Quadrature { nodes } => params.quadrature_points(nodes),
            Integrator::MonteCarlo { samples, seed } => {
                let w = 1.0 / samples as f64;
                Ok(sample(params, seed, samples)?.into_iter().map(|s| (s, w)).collect())
            }
        }
    }
}

/// Joint density P(θ, φ).
pub fn pdf(params: &ChannelParams, theta: f64, phi: f64) -> Result<f64> {
    params.require_proper()?;
    let s2 = params.sigma * params.sigma;
    let x = params.x;
    let (u, w) = (theta - params.theta_star, phi - params.phi_star);
    let quad = u * u + w * w - 2.0 * x * u * w;
    // 1/√|γ⁻¹| = √(1 - x²)
    Ok((1.0 - x * x).sqrt() / (2.0 * PI * s2) * (-quad / (2.0 * s2)).exp())
}

/// Infinite stream of correlated angle draws.
pub struct AngleSampler {
    params: ChannelParams,
    chol: [[f64; 2]; 2],
    rng: ChaCha8Rng,
}

impl AngleSampler {
    pub fn new(params: &ChannelParams, seed: u64) -> Result<Self> {
        Ok(Self { params: *params, chol: params.cholesky()?, rng: ChaCha8Rng::seed_from_u64(seed) })
    }
}

impl Iterator for AngleSampler {
    type Item = AngleSample;

    fn next(&mut self) -> Option<AngleSample> {
        let u1: f64 = StandardNormal.sample(&mut self.rng);
        let u2: f64 = StandardNormal.sample(&mut self.rng);
        Some(self.params.transform(&self.chol, u1, u2))
    }
}

pub fn sample(params: &ChannelParams, seed: u64, n: usize) -> Result<Vec<AngleSample>> {
    if n == 0 {
        return Err(Error::InsufficientEffort("zero samples requested".into()));
    }
    Ok(AngleSampler::new(params, seed)?.take(n).collect())
}

/// Averages of the trigonometric functions of (θ, φ) that parameterize the channel:
///
/// | field | integrand |
/// |---|---|
/// | `a` | cos²θ cos²φ |
/// | `b` | sin²θ cos²φ |
/// | `c` | sin 2θ cos²φ |
/// | `d` | cos θ cos φ |
/// | `e` | sin θ cos φ |
/// | `epsilon` | sin²φ |
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub epsilon: f64,
}

impl GaussianMoments {
    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.epsilon]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4], epsilon: v[5] }
    }

    pub const NAMES: [&'static str; 6] = ["A", "B", "C", "D", "E", "epsilon"];

    /// `|a + b + epsilon - 1|`.
    pub fn completeness_defect(&self) -> f64 {
        (self.a + self.b + self.epsilon - 1.0).abs()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }
}

// exp(-k / denom) with the x → 1 limit (denom → 0⁺) taken as 0.
fn damped(k: f64, denom: f64) -> f64 {
    if denom <= 0.0 {
        0.0
    } else {
        (-k / denom).exp()
    }
}

struct Dampings {
    /// e^{-2σ²/(1-x²)}: damping of cos 2θ, cos 2φ.
    single: f64,
    /// e^{-4σ²/(1-x)}: damping of harmonics in 2θ + 2φ.
    sum2: f64,
    /// e^{-4σ²/(1+x)}: damping of harmonics in 2θ - 2φ.
    diff2: f64,
    /// e^{-σ²/(1-x)}: damping of harmonics in θ + φ.
    sum1: f64,
    /// e^{-σ²/(1+x)}: damping of harmonics in θ - φ.
    diff1: f64,
}

impl Dampings {
    fn new(p: &ChannelParams) -> Self {
        let s2 = p.sigma * p.sigma;
        let x = p.x;
        Self {
            single: damped(2.0 * s2, 1.0 - x * x),
            sum2: damped(4.0 * s2, 1.0 - x),
            diff2: damped(4.0 * s2, 1.0 + x),
            sum1: damped(s2, 1.0 - x),
            diff1: damped(s2, 1.0 + x),
        }
    }
}

/// Exact Gaussian averages for arbitrary mean angles (periodicity ignored).
/// Accepts `x = 1` through the limit of the damping factors.
pub fn moments_closed_form(params: &ChannelParams) -> GaussianMoments {
    let g = Dampings::new(params);
    let (t, p) = (params.theta_star, params.phi_star);
    let cos2t = (2.0 * t).cos();
    let cos2p = (2.0 * p).cos();
    // ⟨cos 2θ cos 2φ⟩ and ⟨sin 2θ cos 2φ⟩ through sum/difference angles.
    let cc = 0.5 * ((2.0 * (t + p)).cos() * g.sum2 + (2.0 * (t - p)).cos() * g.diff2);
    let sc = 0.5 * ((2.0 * (t + p)).sin() * g.sum2 + (2.0 * (t - p)).sin() * g.diff2);
    let a = 0.25 * (1.0 + g.single * (cos2t + cos2p) + cc);
    let b = 0.25 * (1.0 - g.single * (cos2t - cos2p) - cc);
    let c = 0.5 * g.single * (2.0 * t).sin() + 0.5 * sc;
    let d = 0.5 * ((t + p).cos() * g.sum1 + (t - p).cos() * g.diff1);
    let e = 0.5 * ((t + p).sin() * g.sum1 + (t - p).sin() * g.diff1);
    let epsilon = 0.5 * (1.0 - cos2p * g.single);
    GaussianMoments { a, b, c, d, e, epsilon }
}

/// The moment expressions exactly as commonly printed for this model. They
/// coincide with [`moments_closed_form`] for `a`, `b`, `d`, `e` whenever
/// `θ* = 0` or `φ* = 0` (and `x = 0` for `e`), but the printed `c` carries a
/// sign error and `cos φ*` in place of `cos 2φ*`, so it is only right at
/// `θ* = 0`. Kept for comparison; nothing downstream uses it.
pub fn moments_printed(params: &ChannelParams) -> GaussianMoments {
    let g = Dampings::new(params);
    let (t, p) = (params.theta_star, params.phi_star);
    let pair4 = g.sum2 + g.diff2;
    let pair1 = g.sum1 + g.diff1;
    let cos2t = (2.0 * t).cos();
    let cos2p = (2.0 * p).cos();
    GaussianMoments {
        a: 0.25 * (1.0 + g.single * (cos2t + cos2p) + 0.5 * pair4 * cos2t * cos2p),
        b: 0.25 * (1.0 - g.single * (cos2t - cos2p) - 0.5 * pair4 * cos2t * cos2p),
        c: 0.25 * (2.0 * g.single - pair4 * p.cos()) * (2.0 * t).sin(),
        d: 0.5 * pair1 * t.cos() * p.cos(),
        e: 0.5 * pair1 * t.sin() * p.cos(),
        epsilon: 0.5 * (1.0 - cos2p * g.single),
    }
}

fn integrands(s: &AngleSample) -> [f64; 6] {
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let cp2 = cp * cp;
    [ct * ct * cp2, st * st * cp2, 2.0 * st * ct * cp2, ct * cp, st * cp, sp * sp]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentsEstimate {
    pub moments: GaussianMoments,
    /// Per-moment sample standard errors (Monte Carlo only).
    pub std_errors: Option<GaussianMoments>,
}

/// Numerical evaluation of the moment integrals, independent of the closed forms.
pub fn moments_oracle(params: &ChannelParams, method: Integrator) -> Result<MomentsEstimate> {
    method.check()?;
    match method {
        Integrator::Quadrature { .. } => {
            let mut acc = [CompensatedSum::new(); 6];
            for (s, w) in method.points(params)? {
                for (a, v) in acc.iter_mut().zip(integrands(&s)) {
                    a.add(w * v);
                }
            }
            Ok(MomentsEstimate { moments: GaussianMoments::from_array(acc.map(|a| a.value())), std_errors: None })
        }
        Integrator::MonteCarlo { samples, seed } => {
            let mut sum = [CompensatedSum::new(); 6];
            let mut sum_sq = [CompensatedSum::new(); 6];
            for s in AngleSampler::new(params, seed)?.take(samples) {
                for (k, v) in integrands(&s).into_iter().enumerate() {
                    sum[k].add(v);
                    sum_sq[k].add(v * v);
                }
            }
            let n = samples as f64;
            let mean = sum.map(|s| s.value() / n);
            let mut se = [0.0; 6];
            for k in 0..6 {
                let var = (sum_sq[k].value() / n - mean[k] * mean[k]).max(0.0) * n / (n - 1.0);
                se[k] = (var / n).sqrt();
            }
            Ok(MomentsEstimate {
                moments: GaussianMoments::from_array(mean),
                std_errors: Some(GaussianMoments::from_array(se)),
            })
        }
    }
}

/// `p(θ)p(φ)·|1 - exp(-(θ-θ*)(φ-φ*)x / 2σ²)|`, with `p` the `x = 0` marginal of variance σ².
pub fn distribution_distance(params: &ChannelParams, theta: f64, phi: f64) -> Result<f64> {
    params.require_proper()?;
    let s2 = params.sigma * params.sigma;
    let (u, w) = (theta - params.theta_star, phi - params.phi_star);
    let marginal = |d: f64| (-d * d / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
    Ok(marginal(u) * marginal(w) * (1.0 - (-u * w * params.x / (2.0 * s2)).exp()).abs())
}
