//! Small dense Hermitian matrices: cyclic Jacobi eigenvalues, von Neumann
//! entropy in bits, and density-matrix diagnostics.

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 9;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const DEFAULT_EIGEN_TOL: f64 = 1e-13;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clipped to zero.
pub const PSD_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Row-major `n × n` complex Hermitian matrix, `2 ≤ n ≤ 9`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

fn hermiticity_defect(n: usize, data: &[Complex64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((data[i * n + j] - data[j * n + i].conj()).norm());
        }
    }
    worst
}

impl HermitianMatrix {
    /// Accepts matrices whose Hermiticity defect is at most 1e-12 and stores
    /// the exactly Hermitian part.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) || data.len() != n * n {
            return Err(Error::BadDimension(n));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NotHermitian(f64::NAN));
        }
        let defect = hermiticity_defect(n, &data);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let mut m = Self { n, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::from_row_major(n, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_fn(diag.len(), |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::default() })
    }

    /// `|ψ⟩⟨ψ|` (not normalized).
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            let d = &mut self.data[i * n + i];
            *d = Complex64::new(d.re, 0.0);
            for j in i + 1..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `U M U†` for a unitary `U` given row-major.
    pub fn conjugate_by(&self, u: &[Complex64]) -> Result<Self> {
        let n = self.n;
        assert_eq!(u.len(), n * n, "dimension mismatch");
        let mut tmp = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                tmp[i * n + j] = (0..n).map(|k| u[i * n + k] * self.data[k * n + j]).sum();
            }
        }
        Self::from_fn(n, |i, j| (0..n).map(|k| tmp[i * n + k] * u[j * n + k].conj()).sum())
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * w + b * (1.0 - w)).collect();
        Self { n: self.n, data }
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

fn off_diagonal_norm(n: usize, a: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Real eigenvalues in descending order by cyclic complex Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm is below `tol · ‖M‖_F`.
pub fn eigenvalues(m: &HermitianMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = m.n;
    let mut a = m.data.clone();
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let threshold = tol * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(n, &a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(n, &mut a, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(n, &a) > threshold {
        return Err(Error::NotConverged(MAX_SWEEPS));
    }
    let mut evs: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    evs.sort_by(|x, y| y.total_cmp(x));
    Ok(evs)
}

// Annihilates a[p][q] with the unitary W = D·R, where D = diag(.., ē at q, ..)
// makes the pivot real and R is a real Givens rotation.
fn rotate(n: usize, a: &mut [Complex64], p: usize, q: usize) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let wpp = Complex64::new(c, 0.0);
    let wqp = -phase.conj() * s;
    let wpq = Complex64::new(s, 0.0);
    let wqq = phase.conj() * c;
    // A ← A·W (columns p, q)
    for r in 0..n {
        let (arp, arq) = (a[r * n + p], a[r * n + q]);
        a[r * n + p] = arp * wpp + arq * wqp;
        a[r * n + q] = arp * wpq + arq * wqq;
    }
    // A ← W†·A (rows p, q)
    for col in 0..n {
        let (apc, aqc) = (a[p * n + col], a[q * n + col]);
        a[p * n + col] = wpp.conj() * apc + wqp.conj() * aqc;
        a[q * n + col] = wpq.conj() * apc + wqq.conj() * aqc;
    }
    a[p * n + q] = Complex64::default();
    a[q * n + p] = Complex64::default();
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

/// Shannon entropy in bits of a spectrum, after checking it is a probability
/// vector up to the clipping window.
pub fn spectrum_entropy(evs: &[f64]) -> Result<f64> {
    let total: f64 = evs.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotDensity(format!("trace {total} deviates from 1")));
    }
    let mut s = 0.0;
    for &l in evs {
        if l < -PSD_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {l:e}")));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    spectrum_entropy(&eigenvalues(rho, DEFAULT_EIGEN_TOL)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Diagnostic check of the density-matrix contract; never fails.
pub fn assert_density(m: &HermitianMatrix, tol_trace: f64, tol_psd: f64) -> DensityReport {
    let hermiticity_defect = hermiticity_defect(m.n, &m.data);
    let trace_defect = (m.trace() - 1.0).abs();
    let min_eigenvalue = eigenvalues(m, DEFAULT_EIGEN_TOL).map(|v| v[v.len() - 1]).unwrap_or(f64::NAN);
    let passed = hermiticity_defect <= HERMITIAN_TOL && trace_defect <= tol_trace && min_eigenvalue >= -tol_psd;
    DensityReport { hermiticity_defect, trace_defect, min_eigenvalue, passed }
}
