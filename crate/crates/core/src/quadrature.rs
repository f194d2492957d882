//! Numerical integration rules shared by the oracles and the Holevo pipeline.

use crate::error::{Error, Result};

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Gauss–Hermite rule for expectations over a standard normal variable:
/// `E[f(U)] ≈ Σ weights[i] · f(nodes[i])` with `U ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub const MIN_NODES: usize = 8;

    /// Builds an `n`-point rule by Newton iteration on the orthonormal
    /// physicists' Hermite recurrence, then rescales to the probabilists' weight.
    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::InsufficientEffort(format!(
                "{n} Gauss-Hermite nodes (need at least {})",
                Self::MIN_NODES
            )));
        }
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut roots = vec![0.0; n];
        let mut wts = vec![0.0; n];
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * roots[0],
                3 => 1.91 * z - 0.91 * roots[1],
                _ => 2.0 * z - roots[i - 2],
            };
            let mut converged = false;
            let mut pp = 0.0;
            for _ in 0..100 {
                let (p1, deriv) = hermite_orthonormal(n, z, pim4);
                pp = deriv;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Quadrature(format!("Hermite root {i} of {n} did not converge")));
            }
            let (_, deriv) = hermite_orthonormal(n, z, pim4);
            pp = if deriv != 0.0 { deriv } else { pp };
            roots[i] = z;
            roots[n - 1 - i] = -z;
            wts[i] = 2.0 / (pp * pp);
            wts[n - 1 - i] = wts[i];
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let nodes = roots.iter().rev().map(|t| t * std::f64::consts::SQRT_2).collect();
        let weights = wts.iter().rev().map(|w| w / sqrt_pi).collect();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

// Returns (p_n(z), p_n'(z)) for orthonormal physicists' Hermite polynomials.
fn hermite_orthonormal(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
/// Always bisects the interval with the largest local error estimate, so the
/// result is deterministic for a given integrand.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: AdaptiveSettings,
) -> Result<IntegralEstimate> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
    }
    let (v0, e0) = kronrod15(&mut f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).collect::<CompensatedSum>().value();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= target {
            return Ok(IntegralEstimate { value, error, evaluations, intervals: intervals.len() });
        }
        if intervals.len() >= settings.max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {error:e} above target {target:e} after {} intervals",
                intervals.len()
            )));
        }
        let worst = intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).map(|(i, _)| i).unwrap_or(0);
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = kronrod15(&mut f, lo, mid);
        let (vr, er) = kronrod15(&mut f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
        // Keep a canonical ordering so summation order does not depend on history.
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
}
