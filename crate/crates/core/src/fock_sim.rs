//! Exact simulation of the three-beam-splitter circuit in the vacuum plus
//! single-photon sector. Inputs carry at most one photon, so this sector is
//! closed under the circuit and no Fock cutoff is involved.
//!
//! Slots follow the optical layout: `S1` is mode 1→3→7, `S2` is 2→4→8, and the
//! environment slots `E1`, `E2` are modes 5→9 and 6→10. Both loss splitters
//! share the same angle φ.

use num_complex::Complex64;

use crate::density::HermitianMatrix;
use crate::error::{Error, Result};
use crate::noise_model::{ChannelParams, Integrator};
use crate::quadrature::CompensatedSum;
use crate::qubit_channel::{LogicalQubit, QutritDensity};

pub const DEFAULT_WEAKNESS_GUARD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    S1 = 0,
    S2 = 1,
    E1 = 2,
    E2 = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pol {
    H = 0,
    V = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinglePhotonState {
    pub amp_vacuum: Complex64,
    /// `amp[slot][pol]`
    pub amp: [[Complex64; 2]; 4],
}

impl SinglePhotonState {
    pub fn vacuum() -> Self {
        Self { amp_vacuum: Complex64::new(1.0, 0.0), ..Default::default() }
    }

    pub fn get(&self, slot: Slot, pol: Pol) -> Complex64 {
        self.amp[slot as usize][pol as usize]
    }

    pub fn set(&mut self, slot: Slot, pol: Pol, v: Complex64) {
        self.amp[slot as usize][pol as usize] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_vacuum.norm_sqr() + self.photon_probability()
    }

    pub fn photon_probability(&self) -> f64 {
        self.amp.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Dual-rail logical qubit as one H photon: `|0⟩_L` in `S2`, `|1⟩_L` in `S1`.
    pub fn dual_rail(psi: &LogicalQubit) -> Self {
        let mut s = Self::default();
        s.set(Slot::S2, Pol::H, psi.c0);
        s.set(Slot::S1, Pol::H, psi.c1);
        s
    }
}

/// `N(|00⟩ + α|0 1_V⟩ + α|1_H 0⟩)` with `N = 1/√(1+2|α|²)`.
pub fn input_state_weak_coherent(alpha: Complex64) -> Result<SinglePhotonState> {
    input_state_weak_coherent_guarded(alpha, DEFAULT_WEAKNESS_GUARD)
}

pub fn input_state_weak_coherent_guarded(alpha: Complex64, guard: f64) -> Result<SinglePhotonState> {
    if alpha.norm() > guard {
        return Err(Error::AmplitudeTooLarge(alpha.norm(), guard));
    }
    Ok(weak_coherent_unchecked(alpha))
}

fn weak_coherent_unchecked(alpha: Complex64) -> SinglePhotonState {
    let n = 1.0 / (1.0 + 2.0 * alpha.norm_sqr()).sqrt();
    let mut s = SinglePhotonState { amp_vacuum: Complex64::new(n, 0.0), ..Default::default() };
    s.set(Slot::S2, Pol::V, alpha * n);
    s.set(Slot::S1, Pol::H, alpha * n);
    s
}

/// Creation operators transform as `a† → cos·a† + sin·b†`, `b† → -sin·a† + cos·b†`,
/// independently for each polarization.
pub fn beam_splitter(state: &SinglePhotonState, a: Slot, b: Slot, angle: f64) -> Result<SinglePhotonState> {
    if a == b {
        return Err(Error::SameSlot);
    }
    let (s, c) = angle.sin_cos();
    let mut out = *state;
    for pol in [Pol::H, Pol::V] {
        let (ca, cb) = (state.get(a, pol), state.get(b, pol));
        out.set(a, pol, ca * c - cb * s);
        out.set(b, pol, ca * s + cb * c);
    }
    Ok(out)
}

/// Runs the polarization mixer followed by the two loss splitters.
pub fn propagate(input: &SinglePhotonState, theta: f64, phi: f64) -> SinglePhotonState {
    let mixed = beam_splitter(input, Slot::S1, Slot::S2, theta).expect("distinct slots");
    let lossy = beam_splitter(&mixed, Slot::S1, Slot::E1, phi).expect("distinct slots");
    beam_splitter(&lossy, Slot::S2, Slot::E2, phi).expect("distinct slots")
}

/// Phases of the output basis relative to plain Fock states:
/// `B5 = (|00⟩, |0 1_V⟩, |1_H 0⟩, -|0 1_H⟩, |1_V 0⟩)`.
/// The sign on the fourth vector makes the averaged output take the standard
/// closed form in which both `E` couplings and both `C` couplings share a sign.
pub const B5_PHASES: [f64; 5] = [1.0, 1.0, 1.0, -1.0, 1.0];

/// 5×5 output state in the basis `B5` (see [`B5_PHASES`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix5(HermitianMatrix);

impl DensityMatrix5 {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        if m.dim() != 5 {
            return Err(Error::BadDimension(m.dim()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// Compensated accumulator for a weighted sum of small complex matrices.
struct MatrixSum<const N: usize> {
    re: [[CompensatedSum; N]; N],
    im: [[CompensatedSum; N]; N],
}

impl<const N: usize> MatrixSum<N> {
    fn new() -> Self {
        Self { re: [[CompensatedSum::new(); N]; N], im: [[CompensatedSum::new(); N]; N] }
    }

    fn add(&mut self, i: usize, j: usize, z: Complex64) {
        self.re[i][j].add(z.re);
        self.im[i][j].add(z.im);
    }

    fn add_outer(&mut self, v: &[Complex64; N], weight: f64) {
        for i in 0..N {
            for j in 0..N {
                self.add(i, j, v[i] * v[j].conj() * weight);
            }
        }
    }

    fn to_matrix(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::from_fn(N, |i, j| Complex64::new(self.re[i][j].value(), self.im[i][j].value()))
    }
}

// Accumulates a weighted 5×5 reduced state; `phases` fixes the basis signs.
struct Reduced5 {
    acc: MatrixSum<5>,
}

impl Reduced5 {
    fn new() -> Self {
        Self { acc: MatrixSum::new() }
    }

    fn add(&mut self, out: &SinglePhotonState, weight: f64, phases: &[f64; 5]) {
        let v = [
            out.amp_vacuum * phases[0],
            out.get(Slot::S2, Pol::V) * phases[1],
            out.get(Slot::S1, Pol::H) * phases[2],
            out.get(Slot::S2, Pol::H) * phases[3],
            out.get(Slot::S1, Pol::V) * phases[4],
        ];
        // Environment-excited components leave the system in vacuum and carry
        // no coherence with system-excited ones after the trace.
        let env: f64 =
            [Slot::E1, Slot::E2].iter().flat_map(|&s| [Pol::H, Pol::V].map(|p| out.get(s, p).norm_sqr())).sum();
        self.acc.add_outer(&v, weight);
        self.acc.add(0, 0, Complex64::new(env * weight, 0.0));
    }

    fn finish(self) -> Result<DensityMatrix5> {
        DensityMatrix5::new(self.acc.to_matrix()?)
    }
}

fn reduce_with_phases(out: &SinglePhotonState, phases: &[f64; 5]) -> Result<DensityMatrix5> {
    let mut r = Reduced5::new();
    r.add(out, 1.0, phases);
    r.finish()
}

/// Single realization `Φ_{θ,φ}` acting on the weak coherent input.
pub fn apply_channel_once(alpha: Complex64, theta: f64, phi: f64) -> Result<DensityMatrix5> {
    let input = input_state_weak_coherent(alpha)?;
    reduce_with_phases(&propagate(&input, theta, phi), &B5_PHASES)
}

/// Same as [`apply_channel_once`] but reported in the plain Fock basis
/// `(|00⟩, |0 1_V⟩, |1_H 0⟩, |0 1_H⟩, |1_V 0⟩)` without the sign convention.
pub fn apply_channel_once_fock_basis(alpha: Complex64, theta: f64, phi: f64) -> Result<DensityMatrix5> {
    let input = input_state_weak_coherent(alpha)?;
    reduce_with_phases(&propagate(&input, theta, phi), &[1.0; 5])
}

/// Average of [`apply_channel_once`] over P(θ, φ).
pub fn channel_output(params: &ChannelParams, alpha: Complex64, integrator: Integrator) -> Result<DensityMatrix5> {
    let input = input_state_weak_coherent(alpha)?;
    let mut r = Reduced5::new();
    for (s, w) in integrator.points(params)? {
        r.add(&propagate(&input, s.theta, s.phi), w, &B5_PHASES);
    }
    r.finish()
}

/// Dual-rail qubit through the same circuit: single-shot output as a qutrit
/// state in `(|0⟩_L, |1⟩_L, |2⟩_L = |00⟩)`.
pub fn dual_rail_once(psi: &LogicalQubit, theta: f64, phi: f64) -> Result<QutritDensity> {
    let mut acc = MatrixSum::new();
    add_dual_rail(&mut acc, psi, theta, phi, 1.0);
    QutritDensity::new(acc.to_matrix()?)
}

/// Dual-rail output averaged over P(θ, φ).
pub fn dual_rail_output(params: &ChannelParams, psi: &LogicalQubit, integrator: Integrator) -> Result<QutritDensity> {
    let mut acc = MatrixSum::new();
    for (s, w) in integrator.points(params)? {
        add_dual_rail(&mut acc, psi, s.theta, s.phi, w);
    }
    QutritDensity::new(acc.to_matrix()?)
}

fn add_dual_rail(acc: &mut MatrixSum<3>, psi: &LogicalQubit, theta: f64, phi: f64, w: f64) {
    let out = propagate(&SinglePhotonState::dual_rail(psi), theta, phi);
    let v = [out.get(Slot::S2, Pol::H), out.get(Slot::S1, Pol::H), Complex64::default()];
    acc.add_outer(&v, w);
    let lost = out.get(Slot::E1, Pol::H).norm_sqr() + out.get(Slot::E2, Pol::H).norm_sqr();
    acc.add(2, 2, Complex64::new(lost * w, 0.0));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weak_coherent_input() {
        let s = input_state_weak_coherent(c(0.0, 0.0)).unwrap();
        assert_eq!(s, SinglePhotonState::vacuum());
        let s = input_state_weak_coherent(c(0.1, 0.0)).unwrap();
        assert!((s.amp_vacuum.re - 0.990148).abs() < 5e-7);
        assert!((s.get(Slot::S1, Pol::H).re - 0.099015).abs() < 5e-7);
        assert!((s.get(Slot::S2, Pol::V).re - 0.099015).abs() < 5e-7);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(matches!(input_state_weak_coherent(c(0.4, 0.4)), Err(Error::AmplitudeTooLarge(..))));
        assert!(input_state_weak_coherent_guarded(c(0.4, 0.4), 0.6).is_ok());
    }

    #[test]
    fn splitter_identity_and_quarter_turn() {
        let mut s = SinglePhotonState::default();
        s.set(Slot::S1, Pol::H, c(0.6, 0.0));
        s.set(Slot::S2, Pol::V, c(0.0, 0.8));
        assert_eq!(beam_splitter(&s, Slot::S1, Slot::S2, 0.0).unwrap(), s);
        let q = beam_splitter(&s, Slot::S1, Slot::S2, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((q.get(Slot::S2, Pol::H) - c(0.6, 0.0)).norm() < 1e-15);
        assert!((q.get(Slot::S1, Pol::V) - c(0.0, -0.8)).norm() < 1e-15);
        assert!(q.get(Slot::S1, Pol::H).norm() < 1e-15);
        assert!(matches!(beam_splitter(&s, Slot::E1, Slot::E1, 0.3), Err(Error::SameSlot)));
    }

    #[test]
    fn noiseless_realization_is_input_projector() {
        let alpha = c(0.1, -0.05);
        let out = apply_channel_once(alpha, 0.0, 0.0).unwrap();
        let inp = input_state_weak_coherent(alpha).unwrap();
        let psi = [inp.amp_vacuum, inp.get(Slot::S2, Pol::V), inp.get(Slot::S1, Pol::H), c(0.0, 0.0), c(0.0, 0.0)];
        let proj = HermitianMatrix::projector(&psi).unwrap();
        assert!(out.matrix().max_abs_diff(&proj) < 1e-15);
    }

    #[test]
    fn total_loss_leaves_vacuum() {
        let out = apply_channel_once(c(0.3, 0.1), 0.7, std::f64::consts::FRAC_PI_2).unwrap();
        let vac = HermitianMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(out.matrix().max_abs_diff(&vac) < 1e-15);
    }

    #[test]
    fn quarter_mixing_gives_flipped_polarizations() {
        // Fock basis: N(|00⟩ + α|0 1_H⟩ - α|1_V 0⟩)
        let alpha: f64 = 0.1;
        let n = 1.0 / (1.0 + 2.0 * alpha * alpha).sqrt();
        let out = apply_channel_once_fock_basis(c(alpha, 0.0), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let psi = [c(n, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(alpha * n, 0.0), c(-alpha * n, 0.0)];
        let expected = HermitianMatrix::projector(&psi).unwrap();
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn photon_number_is_conserved_before_trace() {
        for &(t, p) in &[(0.1, 0.2), (1.3, -0.4), (-2.0, 2.9)] {
            let alpha = c(0.2, 0.15);
            let n2 = 1.0 / (1.0 + 2.0 * alpha.norm_sqr());
            let out = propagate(&input_state_weak_coherent(alpha).unwrap(), t, p);
            assert!((out.photon_probability() - 2.0 * alpha.norm_sqr() * n2).abs() < 1e-15);
        }
    }

    #[test]
    fn monte_carlo_average_has_unit_trace() {
        let params = ChannelParams::new(0.0, 0.0, 0.1, 0.5).unwrap();
        let out = channel_output(&params, c(0.1, 0.0), Integrator::MonteCarlo { samples: 100_000, seed: 3 }).unwrap();
        assert!((out.matrix().trace() - 1.0).abs() < 1e-12);
        assert!(channel_output(&params, c(0.1, 0.0), Integrator::MonteCarlo { samples: 10, seed: 3 }).is_err());
        assert!(channel_output(&params, c(0.1, 0.0), Integrator::Quadrature { nodes: 4 }).is_err());
    }
}
