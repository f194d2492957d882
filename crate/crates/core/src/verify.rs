//! Oracle cross-check suite behind the `verify` subcommand. Every check
//! compares a closed form against an independent numerical route and reports
//! pass/fail with the observed defect. Output is a pure function of the
//! configuration (no timings), so identical seeds give identical reports.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coherent_channel::{self, CoherentEnsembleParams, HolevoSettings};
use crate::density::{self, assert_density, PSD_TOL, TRACE_TOL};
use crate::error::Result;
use crate::fock_sim;
use crate::noise_model::{moments_closed_form, moments_oracle, ChannelParams, Integrator};
use crate::qubit_channel::{self, LogicalQubit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mc_samples: usize,
    pub quadrature_nodes: usize,
    pub random_cases: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 1, mc_samples: 200_000, quadrature_nodes: 40, random_cases: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<32} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{n_pass}/{} checks passed", self.checks.len())
    }
}

pub const SIGMA_GRID: [f64; 4] = [0.05, 0.1, 0.2, 0.3];
pub const X_GRID: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
pub const MEAN_GRID: [f64; 2] = [0.0, 0.3];

/// Parameter grid used by the moment checks.
pub fn moment_grid() -> Vec<ChannelParams> {
    let mut out = Vec::new();
    for &s in &SIGMA_GRID {
        for &x in &X_GRID {
            for &t in &MEAN_GRID {
                for &p in &MEAN_GRID {
                    out.push(ChannelParams::new(t, p, s, x).expect("grid values are valid"));
                }
            }
        }
    }
    out
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let grid = moment_grid();

    let mut worst = 0.0_f64;
    for p in &grid {
        let q = moments_oracle(p, Integrator::Quadrature { nodes: config.quadrature_nodes })?;
        worst = worst.max(q.moments.max_abs_diff(&moments_closed_form(p)));
    }
    checks.push(outcome("moments-vs-quadrature", worst <= 1e-10, format!("max |diff| = {worst:.3e} (tol 1e-10)")));

    let mut worst_z = 0.0_f64;
    for (i, p) in grid.iter().enumerate() {
        let mc = moments_oracle(
            p,
            Integrator::MonteCarlo { samples: config.mc_samples, seed: config.seed.wrapping_add(i as u64) },
        )?;
        let se = mc.std_errors.expect("Monte Carlo reports standard errors").as_array();
        let closed = moments_closed_form(p).as_array();
        for ((m, c), s) in mc.moments.as_array().iter().zip(closed).zip(se) {
            let z = if s > 0.0 {
                (m - c).abs() / s
            } else if (m - c).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
        }
    }
    checks.push(outcome("moments-vs-monte-carlo", worst_z <= 4.0, format!("max deviation = {worst_z:.3} SE (tol 4)")));

    let mut worst = 0.0_f64;
    for &s in &[0.05, 0.1, 0.2] {
        for &x in &[0.0, 0.5, 0.9] {
            for &a in &[0.05, 0.1, 0.2] {
                let p = ChannelParams::new(0.0, 0.0, s, x)?;
                let alpha = Complex64::new(a, 0.0);
                let sim =
                    fock_sim::channel_output(&p, alpha, Integrator::Quadrature { nodes: config.quadrature_nodes })?;
                let closed = coherent_channel::output_state_closed_form(&moments_closed_form(&p), alpha)?;
                worst = worst.max(sim.max_abs_diff(&closed));
            }
        }
    }
    checks.push(outcome("output-vs-fock-simulator", worst <= 1e-8, format!("max |diff| = {worst:.3e} (tol 1e-8)")));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut failures = 0;
    for _ in 0..config.random_cases {
        let p = ChannelParams::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.01..0.3),
            rng.random_range(0.0..0.95),
        )?;
        let alpha = Complex64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..std::f64::consts::TAU));
        let psi = LogicalQubit::normalized(
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )?;
        let m = moments_closed_form(&p);
        let mats = [
            coherent_channel::output_state_closed_form(&m, alpha)?.into_matrix(),
            fock_sim::apply_channel_once(alpha, p.theta_star(), p.phi_star())?.into_matrix(),
            qubit_channel::channel_output_exact(&p, &psi)?.matrix().clone(),
        ];
        failures += mats.iter().filter(|m| !assert_density(m, TRACE_TOL, PSD_TOL).passed).count();
    }
    checks.push(outcome(
        "density-contracts",
        failures == 0,
        format!("{failures} failures in {} random cases", config.random_cases),
    ));

    let mut worst = 0.0_f64;
    for p in &grid {
        let chi = qubit_channel::holevo_for_ensemble(p, &qubit_channel::optimal_ensemble())?;
        worst = worst.max((chi - qubit_channel::erasure_capacity(p)).abs());
    }
    checks.push(outcome("optimal-ensemble-holevo", worst <= 1e-9, format!("max |chi - (1 - eps)| = {worst:.3e}")));

    let c0 = qubit_channel::erasure_capacity(&ChannelParams::new(0.0, 0.0, 0.1, 0.0)?);
    let c9 = qubit_channel::erasure_capacity(&ChannelParams::new(0.0, 0.0, 0.1, 0.9)?);
    let e0 = (c0 - 0.5 * (1.0 + (-0.02f64).exp())).abs();
    let e9 = (c9 - 0.5 * (1.0 + (-0.02f64 / 0.19).exp())).abs();
    checks.push(outcome(
        "erasure-capacity-values",
        e0 <= 1e-9 && e9 <= 1e-9,
        format!("C(x=0) = {c0:.6}, C(x=0.9) = {c9:.6}"),
    ));

    let tiny = moments_closed_form(&ChannelParams::new(0.0, 0.0, 1e-4, 0.0)?);
    let limit_ok = (tiny.a - 1.0).abs() <= 1e-7 && (tiny.d - 1.0).abs() <= 1e-7 && tiny.b <= 1e-7;
    let x1_ok = MEAN_GRID.iter().all(|&t| {
        moments_closed_form(&ChannelParams::new(t, t, 0.2, 1.0).expect("valid"))
            .as_array()
            .iter()
            .all(|v| v.is_finite())
    });
    checks.push(outcome(
        "noiseless-and-x1-limits",
        limit_ok && x1_ok,
        format!("|A-1| = {:.1e}, B = {:.1e}", (tiny.a - 1.0).abs(), tiny.b),
    ));

    let ens = CoherentEnsembleParams::default();
    let m = moments_closed_form(&ChannelParams::new(0.0, 0.0, 0.1, 0.5)?);
    let avg = coherent_channel::average_state(&m, &ens)?;
    let evs = density::eigenvalues(avg.matrix(), density::DEFAULT_EIGEN_TOL)?;
    let sum_defect = (evs.iter().sum::<f64>() - 1.0).abs();
    checks.push(outcome("average-state-trace", sum_defect <= 1e-12, format!("|sum(eig) - 1| = {sum_defect:.1e}")));

    let settings = HolevoSettings::default();
    let mut monotone = true;
    let mut prev_series: Option<Vec<f64>> = None;
    for &s in &[0.3, 0.2, 0.1] {
        let xs: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        let pts = coherent_channel::sweep_x(&ChannelParams::new(0.0, 0.0, s, 0.0)?, &ens, &xs, &[s], settings)?;
        let vals: Vec<f64> = pts.iter().map(|p| p.value).collect();
        monotone &= vals.windows(2).all(|w| w[1] <= w[0]);
        if let Some(prev) = &prev_series {
            monotone &= vals.iter().zip(prev).all(|(a, b)| a > b);
        }
        prev_series = Some(vals);
    }
    checks.push(outcome("holevo-trends", monotone, "chi non-increasing in x, increasing as sigma decreases".into()));

    Ok(VerifyReport { checks })
}
