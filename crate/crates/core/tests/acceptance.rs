//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the process
//! exits non-zero if any criterion fails. Runs without the libtest harness so
//! the lines are always visible.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use polloss::coherent_channel::{self, CoherentEnsembleParams, HolevoSettings};
use polloss::density::{self, assert_density, HermitianMatrix, DEFAULT_EIGEN_TOL, PSD_TOL, TRACE_TOL};
use polloss::fock_sim;
use polloss::noise_model::{moments_closed_form, moments_oracle, ChannelParams, GaussianMoments, Integrator};
use polloss::quadrature::{integrate, AdaptiveSettings};
use polloss::qubit_channel::{self, LogicalQubit, OutputForm};
use polloss::verify::moment_grid;

const MC_SAMPLES: usize = 1_000_000;
const NODES: usize = 40;
const MAX_Z: f64 = 4.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn z_score(estimate: f64, exact: f64, se: f64) -> f64 {
    if se > 0.0 {
        (estimate - exact).abs() / se
    } else if (estimate - exact).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn params(t: f64, p: f64, s: f64, x: f64) -> ChannelParams {
    ChannelParams::new(t, p, s, x).expect("valid parameters")
}

fn moment_oracles() -> Outcome {
    let grid = moment_grid();
    let quad_worst = grid
        .par_iter()
        .map(|p| {
            let q = moments_oracle(p, Integrator::Quadrature { nodes: NODES }).unwrap();
            q.moments.max_abs_diff(&moments_closed_form(p))
        })
        .reduce(|| 0.0, f64::max);
    let z_worst = grid
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mc = moments_oracle(p, Integrator::MonteCarlo { samples: MC_SAMPLES, seed: 1000 + i as u64 }).unwrap();
            let se = mc.std_errors.unwrap().as_array();
            let exact = moments_closed_form(p).as_array();
            (0..6).map(|k| z_score(mc.moments.as_array()[k], exact[k], se[k])).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        quad_worst <= 1e-10 && z_worst <= MAX_Z,
        format!("{} points: quadrature max |diff| {quad_worst:.2e}, Monte Carlo max {z_worst:.2} SE", grid.len()),
    )
}

fn channel_oracle() -> Outcome {
    let mut cases = Vec::new();
    for &s in &[0.05, 0.1, 0.2] {
        for &x in &[0.0, 0.5, 0.9] {
            for &a in &[0.05, 0.1, 0.2] {
                cases.push((s, x, a));
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(s, x, a)| {
            let p = params(0.0, 0.0, s, x);
            let alpha = Complex64::new(a, 0.0);
            let sim = fock_sim::channel_output(&p, alpha, Integrator::Quadrature { nodes: NODES }).unwrap();
            let closed = coherent_channel::output_state_closed_form(&moments_closed_form(&p), alpha).unwrap();
            sim.max_abs_diff(&closed)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-8, format!("{} points: max entrywise |diff| {worst:.2e}", cases.len()))
}

fn random_params(rng: &mut ChaCha8Rng) -> ChannelParams {
    params(
        rng.random_range(-PI / 4.0..PI / 4.0),
        rng.random_range(-PI / 4.0..PI / 4.0),
        rng.random_range(0.005..0.3),
        rng.random_range(0.0..0.95),
    )
}

fn random_qubit(rng: &mut ChaCha8Rng) -> LogicalQubit {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    LogicalQubit::normalized(c(), c()).unwrap()
}

fn density_contracts() -> Outcome {
    const CASES: usize = 1000;
    let ens = CoherentEnsembleParams::default();
    let (failures, checked, worst_herm, worst_trace, worst_min) = (0..CASES)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(7_000 + i as u64);
            let p = random_params(&mut rng);
            let alpha = Complex64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..TAU));
            let psi = random_qubit(&mut rng);
            let m = moments_closed_form(&p);
            let mats: Vec<HermitianMatrix> = vec![
                coherent_channel::output_state_closed_form(&m, alpha).unwrap().into_matrix(),
                coherent_channel::average_state(&m, &ens).unwrap().into_matrix(),
                fock_sim::apply_channel_once(alpha, p.theta_star(), p.phi_star()).unwrap().into_matrix(),
                fock_sim::channel_output(&p, alpha, Integrator::Quadrature { nodes: 16 }).unwrap().into_matrix(),
                fock_sim::dual_rail_output(&p, &psi, Integrator::Quadrature { nodes: 16 }).unwrap().matrix().clone(),
                qubit_channel::channel_output(&p, &psi, OutputForm::Exact).unwrap().matrix().clone(),
                qubit_channel::channel_output(&p, &psi, OutputForm::MeanRotation).unwrap().matrix().clone(),
            ];
            let reports: Vec<_> = mats.iter().map(|m| assert_density(m, TRACE_TOL, PSD_TOL)).collect();
            (
                reports.iter().filter(|r| !r.passed).count(),
                reports.len(),
                reports.iter().map(|r| r.hermiticity_defect).fold(0.0, f64::max),
                reports.iter().map(|r| r.trace_defect).fold(0.0, f64::max),
                reports.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min),
            )
        })
        .reduce(
            || (0, 0, 0.0, 0.0, f64::INFINITY),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2), a.3.max(b.3), a.4.min(b.4)),
        );
    outcome(
        failures == 0,
        format!(
            "{failures}/{checked} matrices failed over {CASES} cases; worst hermiticity {worst_herm:.1e}, trace {worst_trace:.1e}, min eigenvalue {worst_min:.1e}"
        ),
    )
}

fn erasure_capacity_values() -> Outcome {
    let cases = [(0.0, 0.5 * (1.0 + (-0.02f64).exp()), 0.990050), (0.9, 0.950043, 0.950043)];
    let mut passed = true;
    let mut detail = Vec::new();
    for (i, &(x, reference, quoted)) in cases.iter().enumerate() {
        let p = params(0.0, 0.0, 0.1, x);
        let c = qubit_channel::erasure_capacity(&p);
        // Exact value of the erasure probability at these parameters.
        let formula = 0.5 * (1.0 + (-2.0 * 0.01 / (1.0 - x * x)).exp());
        let mc = moments_oracle(&p, Integrator::MonteCarlo { samples: MC_SAMPLES, seed: 42 + i as u64 }).unwrap();
        let z = z_score(mc.moments.epsilon, 1.0 - c, mc.std_errors.unwrap().epsilon);
        let ok = (c - formula).abs() <= 1e-9 && (c - reference).abs() <= 1e-6 && z <= MAX_Z;
        passed &= ok;
        detail.push(format!("x={x}: C={c:.10} (quoted {quoted}), MC eps {z:.2} SE"));
    }
    outcome(passed, detail.join("; "))
}

fn optimal_ensemble_holevo() -> Outcome {
    let ens = qubit_channel::optimal_ensemble();
    let worst = moment_grid()
        .iter()
        .map(|p| (qubit_channel::holevo_for_ensemble(p, &ens).unwrap() - (1.0 - qubit_channel::epsilon(p))).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |chi - (1 - eps)| {worst:.2e}"))
}

const SIGMAS: [f64; 3] = [0.1, 0.2, 0.3];

fn x_grid() -> Vec<f64> {
    (0..10).map(|k| k as f64 / 10.0).collect()
}

// Non-increasing along x within each σ series, strictly larger for smaller σ.
fn trends(series: &[Vec<f64>]) -> (bool, bool) {
    let monotone = series.iter().all(|s| s.windows(2).all(|w| w[1] <= w[0]));
    let ordered =
        series.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(small_sigma, large_sigma)| small_sigma > large_sigma));
    (monotone, ordered)
}

fn series_by_sigma(points: &[polloss::sweep::CurvePoint]) -> Vec<Vec<f64>> {
    SIGMAS.iter().map(|&s| points.iter().filter(|p| p.sigma == s).map(|p| p.value).collect()).collect()
}

fn holevo_trends() -> Outcome {
    let ens = CoherentEnsembleParams::new(0.1).unwrap();
    let pts =
        coherent_channel::sweep_x(&params(0.0, 0.0, 0.1, 0.0), &ens, &x_grid(), &SIGMAS, HolevoSettings::default())
            .unwrap();
    let series = series_by_sigma(&pts);
    let (monotone, ordered) = trends(&series);
    let nonneg = pts.iter().all(|p| p.value >= -1e-9);
    outcome(
        monotone && ordered && nonneg,
        format!(
            "chi(x=0..0.9): sigma=0.1 {:.6}->{:.6}, sigma=0.3 {:.6}->{:.6}",
            series[0][0], series[0][9], series[2][0], series[2][9]
        ),
    )
}

fn capacity_trends() -> Outcome {
    let pts = qubit_channel::sweep_x(&params(0.0, 0.0, 0.1, 0.0), &x_grid(), &SIGMAS).unwrap();
    let series = series_by_sigma(&pts);
    let (monotone, ordered) = trends(&series);
    outcome(
        monotone && ordered,
        format!(
            "C(x=0..0.9): sigma=0.1 {:.6}->{:.6}, sigma=0.3 {:.6}->{:.6}",
            series[0][0], series[0][9], series[2][0], series[2][9]
        ),
    )
}

fn limits() -> Outcome {
    let tiny = moments_closed_form(&params(0.0, 0.0, 1e-4, 0.0));
    let (da, dd, b) = ((tiny.a - 1.0).abs(), (tiny.d - 1.0).abs(), tiny.b);
    let mut finite = true;
    for &t in &[0.0, 0.3, -0.7] {
        for &ph in &[0.0, 0.3, 1.1] {
            for &s in &[1e-4, 0.1, 0.3] {
                let p = params(t, ph, s, 1.0);
                let m = moments_closed_form(&p);
                finite &= m.as_array().iter().all(|v| v.is_finite());
                finite &= qubit_channel::epsilon(&p).is_finite();
                finite &= coherent_channel::output_state_closed_form(&m, Complex64::new(0.2, 0.1)).is_ok();
            }
        }
    }
    outcome(
        da <= 1e-7 && dd <= 1e-7 && b <= 1e-7 && finite,
        format!("|A-1| {da:.1e}, |D-1| {dd:.1e}, B {b:.1e}; x=1 finite: {finite}"),
    )
}

// Entrywise average of the closed-form output over ℘(α): radial Gauss–Kronrod
// times an equally spaced angular rule (exact for the trigonometric α-dependence).
fn averaged_by_quadrature(m: &GaussianMoments, ens: &CoherentEnsembleParams) -> HermitianMatrix {
    const ANGLES: usize = 8;
    let settings = AdaptiveSettings { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 500 };
    let mut entries = vec![Complex64::default(); 25];
    for (k, entry) in entries.iter_mut().enumerate() {
        let part = |r: f64, im: bool| -> f64 {
            let mut s = 0.0;
            for j in 0..ANGLES {
                let alpha = Complex64::from_polar(r, TAU * j as f64 / ANGLES as f64);
                let rho = coherent_channel::output_state_closed_form_guarded(m, alpha, f64::INFINITY).unwrap();
                let z = rho.entry(k / 5, k % 5);
                s += if im { z.im } else { z.re };
            }
            ens.radial_weight(r) * s / ANGLES as f64
        };
        let hi = 12.0 * ens.delta();
        let re = integrate(|r| part(r, false), 0.0, hi, settings).unwrap().value;
        let im = integrate(|r| part(r, true), 0.0, hi, settings).unwrap().value;
        *entry = Complex64::new(re, im);
    }
    HermitianMatrix::from_row_major(5, entries).unwrap()
}

fn average_state_consistency() -> Outcome {
    let ens = CoherentEnsembleParams::default();
    let mut worst_sum = 0.0_f64;
    let mut worst_entry = 0.0_f64;
    let mut worst_spectrum = 0.0_f64;
    for p in [params(0.0, 0.0, 0.1, 0.0), params(0.0, 0.0, 0.2, 0.5), params(0.3, 0.3, 0.1, 0.6)] {
        let m = moments_closed_form(&p);
        let rho = coherent_channel::average_state(&m, &ens).unwrap();
        let evs = density::eigenvalues(rho.matrix(), DEFAULT_EIGEN_TOL).unwrap();
        worst_sum = worst_sum.max((evs.iter().sum::<f64>() - 1.0).abs());
        worst_entry = worst_entry.max(rho.matrix().max_abs_diff(&averaged_by_quadrature(&m, &ens)));
        if m.c == 0.0 {
            // Block-diagonal case: spectrum {1 - 2L(A+B), 2AL, 2BL, 0, 0}.
            let l = coherent_channel::ensemble_l(&ens).unwrap().value;
            let mut expected = [1.0 - 2.0 * l * (m.a + m.b), 2.0 * m.a * l, 2.0 * m.b * l, 0.0, 0.0];
            expected.sort_by(|x, y| y.total_cmp(x));
            worst_spectrum =
                worst_spectrum.max(expected.iter().zip(&evs).map(|(e, v)| (e - v).abs()).fold(0.0, f64::max));
        }
    }
    outcome(
        worst_sum <= 1e-12 && worst_entry <= 1e-8 && worst_spectrum <= 1e-12,
        format!("|sum(eig) - 1| {worst_sum:.1e}, vs averaged outputs {worst_entry:.1e}, vs block spectrum {worst_spectrum:.1e}"),
    )
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "moment-oracle-equivalence", budget: Some(Duration::from_secs(10)), run: moment_oracles },
        Criterion { name: "channel-oracle-equivalence", budget: Some(Duration::from_secs(30)), run: channel_oracle },
        Criterion { name: "density-contracts", budget: None, run: density_contracts },
        Criterion { name: "erasure-capacity-values", budget: None, run: erasure_capacity_values },
        Criterion { name: "optimal-ensemble-holevo", budget: None, run: optimal_ensemble_holevo },
        Criterion { name: "holevo-trends", budget: Some(Duration::from_secs(300)), run: holevo_trends },
        Criterion { name: "capacity-trends", budget: Some(Duration::from_secs(1)), run: capacity_trends },
        Criterion { name: "noiseless-and-x1-limits", budget: None, run: limits },
        Criterion { name: "average-state-consistency", budget: None, run: average_state_consistency },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.budget.is_none_or(|b| elapsed <= b);
        let passed = out.passed && in_time;
        if !passed {
            failed += 1;
        }
        let budget = c.budget.map(|b| format!(" / {:.0}s", b.as_secs_f64())).unwrap_or_default();
        println!(
            "{} {:<28} {} [{:.2}s{budget}]",
            if passed { "PASS" } else { "FAIL" },
            c.name,
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
