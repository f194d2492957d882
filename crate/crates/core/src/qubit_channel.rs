//! Dual-rail single-photon encoding. The channel acts as an erasure channel
//! with flag state `|2⟩_L = |00⟩` and erasure probability ε = ⟨sin²φ⟩, so its
//! classical capacity is `1 - ε` bits.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::{self, HermitianMatrix};
use crate::error::{Error, Result};
use crate::noise_model::{moments_closed_form, ChannelParams};
use crate::sweep::CurvePoint;

const NORM_TOL: f64 = 1e-12;

/// `c0|0⟩_L + c1|1⟩_L` with `|0⟩_L = |01⟩` and `|1⟩_L = |10⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalQubit {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl LogicalQubit {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let norm = c0.norm_sqr() + c1.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("|c0|² + |c1|² = {norm}")));
        }
        Ok(Self { c0, c1 })
    }

    /// Rescales a non-zero pair to unit norm.
    pub fn normalized(c0: Complex64, c1: Complex64) -> Result<Self> {
        let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitudes".into()));
        }
        Self::new(c0 / n, c1 / n)
    }

    pub fn zero() -> Self {
        Self { c0: Complex64::new(1.0, 0.0), c1: Complex64::default() }
    }

    pub fn one() -> Self {
        Self { c0: Complex64::default(), c1: Complex64::new(1.0, 0.0) }
    }

    /// `(|0⟩_L + sign·i|1⟩_L)/√2`: eigenstates of every logical rotation.
    pub fn sigma_y_eigenstate(sign: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { c0: Complex64::new(h, 0.0), c1: Complex64::new(0.0, sign.signum() * h) }
    }

    fn density(&self) -> [[Complex64; 2]; 2] {
        let v = [self.c0, self.c1];
        [[v[0] * v[0].conj(), v[0] * v[1].conj()], [v[1] * v[0].conj(), v[1] * v[1].conj()]]
    }
}

/// 3×3 output in `(|0⟩_L, |1⟩_L, |2⟩_L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritDensity(HermitianMatrix);

impl QutritDensity {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        if m.dim() != 3 {
            return Err(Error::BadDimension(m.dim()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn from_parts(logical: [[Complex64; 2]; 2], erased: f64) -> Result<Self> {
        Self::new(HermitianMatrix::from_fn(3, |i, j| match (i, j) {
            (2, 2) => Complex64::new(erased, 0.0),
            (2, _) | (_, 2) => Complex64::default(),
            _ => logical[i][j],
        })?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEnsemble {
    members: Vec<(f64, LogicalQubit)>,
}

impl DiscreteEnsemble {
    pub fn new(members: Vec<(f64, LogicalQubit)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if members.iter().any(|(p, _)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidEnsemble("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, LogicalQubit)] {
        &self.members
    }
}

/// Erasure probability `½(1 - cos 2φ* · e^{-2σ²/(1-x²)})`, with the `x → 1` limit ½.
pub fn epsilon(params: &ChannelParams) -> f64 {
    let x = params.x();
    let s2 = params.sigma() * params.sigma();
    let damping = if x >= 1.0 { 0.0 } else { (-2.0 * s2 / (1.0 - x * x)).exp() };
    0.5 * (1.0 - (2.0 * params.phi_star()).cos() * damping)
}

pub fn erasure_capacity(params: &ChannelParams) -> f64 {
    1.0 - epsilon(params)
}

type Mat2 = [[Complex64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

// Rotation generator: |0⟩_L → -|1⟩_L, |1⟩_L → |0⟩_L.
fn generator() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    [[Complex64::default(), one], [-one, Complex64::default()]]
}

/// Logical rotation performed by the mixing splitter at angle θ: `cos θ·I + sin θ·Y`.
pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[Complex64::new(c, 0.0), Complex64::new(s, 0.0)], [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputForm {
    /// Gaussian average of rotation-then-loss over P(θ, φ).
    #[default]
    Exact,
    /// Single rotation by the mean angle θ*, weighted by `1 - ε`.
    MeanRotation,
}

/// `ε|2⟩⟨2| ⊕ [Aρ + (C/2)(Yρ - ρY) - B·YρY]`.
pub fn channel_output_exact(params: &ChannelParams, psi: &LogicalQubit) -> Result<QutritDensity> {
    let m = moments_closed_form(params);
    let rho = psi.density();
    let y = generator();
    let yr = mul(&y, &rho);
    let ry = mul(&rho, &y);
    let yry = mul(&yr, &y);
    let mut block = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            block[i][j] = rho[i][j] * m.a + (yr[i][j] - ry[i][j]) * (0.5 * m.c) - yry[i][j] * m.b;
        }
    }
    QutritDensity::from_parts(block, m.epsilon)
}

/// `ε|2⟩⟨2| + (1-ε) R(θ*) ρ R(θ*)†`.
pub fn channel_output_mean_rotation(params: &ChannelParams, psi: &LogicalQubit) -> Result<QutritDensity> {
    let eps = epsilon(params);
    let r = rotation(params.theta_star());
    let rt = [[r[0][0], r[1][0]], [r[0][1], r[1][1]]];
    let rotated = mul(&mul(&r, &psi.density()), &rt);
    QutritDensity::from_parts(rotated.map(|row| row.map(|z| z * (1.0 - eps))), eps)
}

pub fn channel_output(params: &ChannelParams, psi: &LogicalQubit, form: OutputForm) -> Result<QutritDensity> {
    match form {
        OutputForm::Exact => channel_output_exact(params, psi),
        OutputForm::MeanRotation => channel_output_mean_rotation(params, psi),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormDiscrepancy {
    pub exact: QutritDensity,
    pub mean_rotation: QutritDensity,
    pub max_abs_diff: f64,
    pub exact_entropy: f64,
    pub mean_rotation_entropy: f64,
}

pub fn compare_output_forms(params: &ChannelParams, psi: &LogicalQubit) -> Result<FormDiscrepancy> {
    let exact = channel_output_exact(params, psi)?;
    let mean_rotation = channel_output_mean_rotation(params, psi)?;
    Ok(FormDiscrepancy {
        max_abs_diff: exact.max_abs_diff(&mean_rotation),
        exact_entropy: density::von_neumann_entropy(exact.matrix())?,
        mean_rotation_entropy: density::von_neumann_entropy(mean_rotation.matrix())?,
        exact,
        mean_rotation,
    })
}

/// `S(Φ(Σ pᵢρᵢ)) - Σ pᵢ S(Φ(ρᵢ))` in bits, using the exact averaged map.
pub fn holevo_for_ensemble(params: &ChannelParams, ensemble: &DiscreteEnsemble) -> Result<f64> {
    holevo_for_ensemble_with(params, ensemble, OutputForm::Exact)
}

pub fn holevo_for_ensemble_with(params: &ChannelParams, ensemble: &DiscreteEnsemble, form: OutputForm) -> Result<f64> {
    let mut avg = vec![Complex64::default(); 9];
    let mut mean_entropy = 0.0;
    for (p, psi) in ensemble.members() {
        let out = channel_output(params, psi, form)?;
        mean_entropy += p * density::von_neumann_entropy(out.matrix())?;
        for (a, z) in avg.iter_mut().zip(out.matrix().entries()) {
            *a += z * p;
        }
    }
    let avg = HermitianMatrix::from_row_major(3, avg)?;
    Ok(density::von_neumann_entropy(&avg)? - mean_entropy)
}

/// The two σ_y eigenstates with probability ½ each.
pub fn optimal_ensemble() -> DiscreteEnsemble {
    DiscreteEnsemble {
        members: vec![(0.5, LogicalQubit::sigma_y_eigenstate(1.0)), (0.5, LogicalQubit::sigma_y_eigenstate(-1.0))],
    }
}

/// Erasure capacity for every `(σ, x)` pair, σ-major.
pub fn sweep_x(params_base: &ChannelParams, x_grid: &[f64], sigma_list: &[f64]) -> Result<Vec<CurvePoint>> {
    if x_grid.is_empty() || sigma_list.is_empty() {
        return Err(Error::InvalidGrid("empty x grid or sigma list".into()));
    }
    let pairs: Vec<(f64, f64)> = sigma_list.iter().flat_map(|&s| x_grid.iter().map(move |&x| (s, x))).collect();
    pairs
        .par_iter()
        .map(|&(sigma, x)| {
            let p = ChannelParams::new(params_base.theta_star(), params_base.phi_star(), sigma, x)?;
            Ok(CurvePoint { x, sigma, value: erasure_capacity(&p) })
        })
        .collect()
}
