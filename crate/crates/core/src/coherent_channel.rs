//! Weak coherent inputs: closed-form output state, ensemble-averaged state and
//! the Holevo information of a centered Gaussian ensemble of amplitudes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::{self, HermitianMatrix, DEFAULT_EIGEN_TOL};
use crate::error::{Error, Result};
use crate::fock_sim::{DensityMatrix5, DEFAULT_WEAKNESS_GUARD};
use crate::noise_model::{moments_closed_form, ChannelParams, GaussianMoments};
use crate::quadrature::{integrate, AdaptiveSettings};
use crate::sweep::CurvePoint;

pub const MAX_DELTA: f64 = 0.3;
pub const DEFAULT_DELTA: f64 = 0.1;
/// Radial integrals stop at this many Δ; the neglected Gaussian weight is e^{-32}.
pub const RADIAL_CUTOFF: f64 = 8.0;
const MOMENT_TOL: f64 = 1e-12;

/// Spread Δ of the amplitude distribution `℘(α) = exp(-|α|²/2Δ²) / 2πΔ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentEnsembleParams {
    delta: f64,
}

impl CoherentEnsembleParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::NonFinite("delta"));
        }
        if delta <= 0.0 || delta > MAX_DELTA {
            return Err(Error::Regime(format!("delta = {delta} outside (0, {MAX_DELTA}]")));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Radial density of |α|: `(r/Δ²) exp(-r²/2Δ²)`.
    pub fn radial_weight(&self, r: f64) -> f64 {
        let d2 = self.delta * self.delta;
        r / d2 * (-r * r / (2.0 * d2)).exp()
    }

    fn cutoff(&self) -> f64 {
        RADIAL_CUTOFF * self.delta
    }
}

impl Default for CoherentEnsembleParams {
    fn default() -> Self {
        Self { delta: DEFAULT_DELTA }
    }
}

fn check_moments(m: &GaussianMoments) -> Result<()> {
    let defect = m.completeness_defect();
    if defect > MOMENT_TOL || !defect.is_finite() {
        return Err(Error::InconsistentMoments(defect));
    }
    Ok(())
}

/// Output state for input amplitude α in the basis `B5`.
pub fn output_state_closed_form(moments: &GaussianMoments, alpha: Complex64) -> Result<DensityMatrix5> {
    output_state_closed_form_guarded(moments, alpha, DEFAULT_WEAKNESS_GUARD)
}

/// [`output_state_closed_form`] with an explicit bound on |α|.
pub fn output_state_closed_form_guarded(
    moments: &GaussianMoments,
    alpha: Complex64,
    guard: f64,
) -> Result<DensityMatrix5> {
    if alpha.norm() > guard {
        return Err(Error::AmplitudeTooLarge(alpha.norm(), guard));
    }
    check_moments(moments)?;
    closed_form_unguarded(moments, alpha)
}

// The Gaussian ensemble has tails beyond the weak-state guard; the truncated
// two-level model is still applied there when integrating over ℘(α).
fn closed_form_unguarded(m: &GaussianMoments, alpha: Complex64) -> Result<DensityMatrix5> {
    let a2 = alpha.norm_sqr();
    let n2 = 1.0 / (1.0 + 2.0 * a2);
    let ac = alpha.conj();
    let re = |v: f64| Complex64::new(v, 0.0);
    let vac = re(1.0 + 2.0 * a2 * (1.0 - m.a - m.b));
    let cross = re(-0.5 * a2 * m.c);
    let rows: [[Complex64; 5]; 5] = [
        [vac, ac * m.d, ac * m.d, -ac * m.e, -ac * m.e],
        [alpha * m.d, re(a2 * m.a), re(a2 * m.a), cross, cross],
        [alpha * m.d, re(a2 * m.a), re(a2 * m.a), cross, cross],
        [-alpha * m.e, cross, cross, re(a2 * m.b), re(a2 * m.b)],
        [-alpha * m.e, cross, cross, re(a2 * m.b), re(a2 * m.b)],
    ];
    DensityMatrix5::new(HermitianMatrix::from_fn(5, |i, j| rows[i][j] * n2)?)
}

/// The commonly printed eigenvalue formulas for the `C = E = 0` regime,
/// evaluated literally. Diagnostic only.
pub fn printed_eigenvalues(moments: &GaussianMoments, abs_alpha: f64) -> Result<[f64; 5]> {
    if moments.c.abs() >= 1e-6 || moments.e.abs() >= 1e-6 {
        return Err(Error::Regime(format!("need |C|, |E| < 1e-6, got C = {}, E = {}", moments.c, moments.e)));
    }
    let a2 = abs_alpha * abs_alpha;
    let n2 = 1.0 / (1.0 + 2.0 * a2);
    let base = 1.0 + 2.0 * a2 - 2.0 * a2 * moments.b;
    let root = ((1.0 - 2.0 * a2 * moments.a).powi(2) + 8.0 * a2 * moments.d).sqrt();
    Ok([0.5 * n2 * (base + root), 0.5 * n2 * (base - root), 2.0 * n2 * a2 * moments.b, 0.0, 0.0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueComparison {
    pub printed: [f64; 5],
    /// Descending eigenvalues of the full closed-form matrix.
    pub numeric: Vec<f64>,
    /// Largest gap after sorting both lists in descending order.
    pub max_discrepancy: f64,
}

pub fn compare_printed_eigenvalues(moments: &GaussianMoments, abs_alpha: f64) -> Result<EigenvalueComparison> {
    let printed = printed_eigenvalues(moments, abs_alpha)?;
    let rho = output_state_closed_form(moments, Complex64::new(abs_alpha, 0.0))?;
    let numeric = density::eigenvalues(rho.matrix(), DEFAULT_EIGEN_TOL)?;
    let mut sorted = printed;
    sorted.sort_by(|x, y| y.total_cmp(x));
    let max_discrepancy = sorted.iter().zip(&numeric).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    Ok(EigenvalueComparison { printed, numeric, max_discrepancy })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LIntegral {
    pub value: f64,
    /// Quadrature error estimate plus a bound on the truncated tail.
    pub error: f64,
}

/// `ℒ = ∫ d²α ℘(α) |α|²/(1+2|α|²)` as a radial integral over `[0, 8Δ]`.
pub fn ensemble_l(ensemble: &CoherentEnsembleParams) -> Result<LIntegral> {
    let d = ensemble.delta;
    let settings = AdaptiveSettings { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 500 };
    let est = integrate(|r| ensemble.radial_weight(r) * r * r / (1.0 + 2.0 * r * r), 0.0, ensemble.cutoff(), settings)?;
    // Beyond the cutoff |α|²/(1+2|α|²) ≤ |α|², whose tail integral is 2Δ²(1 + c²/2)e^{-c²/2}.
    let c = RADIAL_CUTOFF;
    let tail = 2.0 * d * d * (1.0 + 0.5 * c * c) * (-0.5 * c * c).exp();
    Ok(LIntegral { value: est.value, error: est.error + tail })
}

/// Ensemble-averaged output `ρ̃`. Off-diagonal couplings linear in α vanish
/// because ℘ is even; the `C` cross terms survive whenever `C ≠ 0`.
pub fn average_state(moments: &GaussianMoments, ensemble: &CoherentEnsembleParams) -> Result<DensityMatrix5> {
    check_moments(moments)?;
    let l = ensemble_l(ensemble)?.value;
    average_state_with_l(moments, l)
}

fn average_state_with_l(m: &GaussianMoments, l: f64) -> Result<DensityMatrix5> {
    let block = |i: usize, j: usize| -> f64 {
        match (i, j) {
            (0, 0) => 1.0 - 2.0 * l * (m.a + m.b),
            (0, _) | (_, 0) => 0.0,
            (1..=2, 1..=2) => m.a * l,
            (3..=4, 3..=4) => m.b * l,
            _ => -0.5 * m.c * l,
        }
    };
    DensityMatrix5::new(HermitianMatrix::from_fn(5, |i, j| Complex64::new(block(i, j), 0.0))?)
}

/// Entropy (bits) of the channel output for input amplitude α.
pub fn output_entropy(moments: &GaussianMoments, alpha: Complex64) -> Result<f64> {
    check_moments(moments)?;
    density::von_neumann_entropy(closed_form_unguarded(moments, alpha)?.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoSettings {
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for HolevoSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_intervals: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoResult {
    /// Holevo information in bits.
    pub chi: f64,
    /// `S(ρ̃)` in bits.
    pub s_average: f64,
    /// `∫ d²α ℘(α) S(Φ(|α⟩⟨α|))` in bits.
    pub mean_output_entropy: f64,
    pub evaluations: usize,
    pub intervals: usize,
    pub estimated_error: f64,
}

/// Holevo information of the Gaussian weak-coherent ensemble. The output
/// entropy depends on |α| only (a diagonal phase conjugation removes arg α),
/// so the average is a one-dimensional radial integral.
pub fn holevo_chi(
    params: &ChannelParams,
    ensemble: &CoherentEnsembleParams,
    settings: HolevoSettings,
) -> Result<HolevoResult> {
    let m = moments_closed_form(params);
    check_moments(&m)?;
    let l = ensemble_l(ensemble)?;
    let s_average = density::von_neumann_entropy(average_state_with_l(&m, l.value)?.matrix())?;

    let mut failure: Option<Error> = None;
    let est = integrate(
        |r| match output_entropy(&m, Complex64::new(r, 0.0)) {
            Ok(s) => ensemble.radial_weight(r) * s,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        ensemble.cutoff(),
        AdaptiveSettings { abs_tol: 1e-15, rel_tol: settings.rel_tol, max_intervals: settings.max_intervals },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mean_output_entropy = est.value;
    Ok(HolevoResult {
        chi: s_average - mean_output_entropy,
        s_average,
        mean_output_entropy,
        evaluations: est.evaluations,
        intervals: est.intervals,
        estimated_error: est.error,
    })
}

/// χ for every `(σ, x)` pair, σ-major. Points are computed in parallel but
/// each is an independent pure evaluation.
pub fn sweep_x(
    params_base: &ChannelParams,
    ensemble: &CoherentEnsembleParams,
    x_grid: &[f64],
    sigma_list: &[f64],
    settings: HolevoSettings,
) -> Result<Vec<CurvePoint>> {
    if x_grid.is_empty() || sigma_list.is_empty() {
        return Err(Error::InvalidGrid("empty x grid or sigma list".into()));
    }
    let pairs: Vec<(f64, f64)> = sigma_list.iter().flat_map(|&s| x_grid.iter().map(move |&x| (s, x))).collect();
    pairs
        .par_iter()
        .map(|&(sigma, x)| {
            let p = ChannelParams::new(params_base.theta_star(), params_base.phi_star(), sigma, x)?;
            Ok(CurvePoint { x, sigma, value: holevo_chi(&p, ensemble, settings)?.chi })
        })
        .collect()
}
