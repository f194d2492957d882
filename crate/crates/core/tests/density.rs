use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polloss::density::{
    assert_density, eigenvalues, spectrum_entropy, von_neumann_entropy, HermitianMatrix, DEFAULT_EIGEN_TOL,
};

// Haar-ish unitary: Gram–Schmidt on a random complex matrix (rows orthonormal).
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    while rows.len() < n {
        let mut v: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        for r in &rows {
            let proj: Complex64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ri) in v.iter_mut().zip(r) {
                *vi -= proj * ri;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    rows.concat()
}

fn random_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut s: Vec<f64> = raw.iter().map(|v| v / total).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn recovers_spectrum_under_unitary_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..=9 {
        for _ in 0..20 {
            let spec = random_spectrum(n, &mut rng);
            let m =
                HermitianMatrix::from_real_diagonal(&spec).unwrap().conjugate_by(&random_unitary(n, &mut rng)).unwrap();
            let ev = eigenvalues(&m, DEFAULT_EIGEN_TOL).unwrap();
            for (a, b) in ev.iter().zip(&spec) {
                assert!((a - b).abs() < 1e-12, "n={n}: {ev:?} vs {spec:?}");
            }
            assert!(assert_density(&m, 1e-10, 1e-10).passed);
        }
    }
}

#[test]
fn degenerate_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = [0.25, 0.25, 0.25, 0.25, 0.0];
    let m = HermitianMatrix::from_real_diagonal(&spec).unwrap().conjugate_by(&random_unitary(5, &mut rng)).unwrap();
    let ev = eigenvalues(&m, DEFAULT_EIGEN_TOL).unwrap();
    for (a, b) in ev.iter().zip(&spec) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((von_neumann_entropy(&m).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn entropy_reference_values() {
    assert_eq!(spectrum_entropy(&[1.0, 0.0]).unwrap(), 0.0);
    assert!((spectrum_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
    let third = 1.0 / 3.0;
    assert!((spectrum_entropy(&[third; 3]).unwrap() - 3f64.log2()).abs() < 1e-14);
    // Round-off inside the clipping window is tolerated, outside it is not.
    assert!(spectrum_entropy(&[1.0 + 5e-11, -5e-11]).is_ok());
    assert!(spectrum_entropy(&[1.1, -0.1]).is_err());
    assert!(spectrum_entropy(&[0.5, 0.4]).is_err());
}

#[test]
fn entropy_is_unitarily_invariant_and_concave() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let a = HermitianMatrix::from_real_diagonal(&random_spectrum(n, &mut rng)).unwrap();
        let b = a.conjugate_by(&random_unitary(n, &mut rng)).unwrap();
        let (sa, sb) = (von_neumann_entropy(&a).unwrap(), von_neumann_entropy(&b).unwrap());
        assert!((sa - sb).abs() < 1e-11);
        let c = HermitianMatrix::from_real_diagonal(&random_spectrum(n, &mut rng))
            .unwrap()
            .conjugate_by(&random_unitary(n, &mut rng))
            .unwrap();
        let sc = von_neumann_entropy(&c).unwrap();
        let w = rng.random_range(0.0..1.0);
        let mixed = von_neumann_entropy(&b.mix(&c, w)).unwrap();
        assert!(mixed >= w * sb + (1.0 - w) * sc - 1e-12);
        assert!(mixed <= (n as f64).log2() + 1e-12);
    }
}

#[test]
fn contract_report_flags_bad_matrices() {
    let not_unit = HermitianMatrix::from_real_diagonal(&[0.7, 0.2]).unwrap();
    let r = assert_density(&not_unit, 1e-10, 1e-10);
    assert!(!r.passed && (r.trace_defect - 0.1).abs() < 1e-15);
    let negative = HermitianMatrix::from_real_diagonal(&[1.1, -0.1]).unwrap();
    let r = assert_density(&negative, 1e-10, 1e-10);
    assert!(!r.passed && (r.min_eigenvalue + 0.1).abs() < 1e-15);
}

proptest! {
    #[test]
    fn pure_states_have_zero_entropy(re in prop::collection::vec(-1.0f64..1.0, 5), im in prop::collection::vec(-1.0f64..1.0, 5)) {
        let v: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-2);
        let psi: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        let rho = HermitianMatrix::projector(&psi).unwrap();
        let ev = eigenvalues(&rho, DEFAULT_EIGEN_TOL).unwrap();
        prop_assert!((ev[0] - 1.0).abs() < 1e-12);
        prop_assert!(von_neumann_entropy(&rho).unwrap() < 1e-9);
    }
}
