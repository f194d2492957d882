//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::coherent_channel::{self, CoherentEnsembleParams, HolevoSettings};
use crate::error::{Error, Result};
use crate::noise_model::{moments_closed_form, moments_oracle, ChannelParams, GaussianMoments, Integrator};
use crate::qubit_channel::{self, LogicalQubit, OutputForm};
use crate::sweep::{self, CurvePoint, Grid};
use crate::verify::{self, VerifyConfig};

/// Overrides the worker-thread count used by parallel sweeps.
pub const THREADS_ENV: &str = "POLLOSS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "polloss", version, about = "Photon loss correlated with polarization mixing")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form moments next to quadrature and Monte-Carlo estimates.
    Moments(MomentsArgs),
    /// Holevo information of the weak-coherent ensemble versus x (CSV).
    CoherentSweep(CoherentSweepArgs),
    /// Erasure capacity of the dual-rail encoding versus x (CSV).
    QubitSweep(SweepArgs),
    /// Run the oracle cross-check suite.
    Verify(VerifyArgs),
    /// Print a channel output matrix.
    OutputState(OutputStateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_star: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_star: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
}

impl PointArgs {
    fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.theta_star, self.phi_star, self.sigma, self.x)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_star: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_star: f64,
    /// Comma-separated σ values.
    #[arg(long, default_value = "0.1")]
    pub sigma: String,
    /// Correlation grid `start:stop:step` (or a single value).
    #[arg(long, default_value = "0:0.9:0.1")]
    pub x: String,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    fn grids(&self) -> Result<(ChannelParams, Vec<f64>, Vec<f64>)> {
        let x_grid = self.x.parse::<Grid>()?.values();
        let sigma_list = sweep::parse_list(&self.sigma)?;
        let base = ChannelParams::new(self.theta_star, self.phi_star, sigma_list[0], x_grid[0])?;
        Ok((base, x_grid, sigma_list))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CoherentSweepArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Spread Δ of the amplitude ensemble.
    #[arg(long, default_value_t = coherent_channel::DEFAULT_DELTA)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 40)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 40)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// 5×5 output for a weak coherent input.
    Coherent,
    /// 3×3 output for a dual-rail qubit.
    Qubit,
}

#[derive(Debug, Clone, Args)]
pub struct OutputStateArgs {
    #[arg(value_enum)]
    pub kind: StateKind,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Qubit amplitude on |0⟩_L as `re,im`.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub c0: String,
    /// Qubit amplitude on |1⟩_L as `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub c1: String,
    /// Use the single-mean-rotation form of the qubit channel.
    #[arg(long)]
    pub mean_rotation: bool,
}

fn parse_complex(s: &str) -> Result<Complex64> {
    match sweep::parse_list(s)?.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(Error::InvalidState(format!("expected `re,im`, got `{s}`"))),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `argv` (including the program name) and executes the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    configure_threads();
    match execute(&config.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn warn_if_wide(params: &ChannelParams, err: &mut dyn Write) {
    if params.periodicity_warning() {
        let _ = writeln!(
            err,
            "warning: sigma/sqrt(1-x^2) exceeds pi/8 at sigma={}, x={}; angular periodicity is ignored",
            params.sigma(),
            params.x()
        );
    }
}

fn emit(points: &[CurvePoint], target: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match target {
        Some(path) => sweep::write_csv(points, path),
        None => Ok(out.write_all(sweep::render_csv(points)?.as_bytes())?),
    }
}

fn check_sweep_params(base: &ChannelParams, x_grid: &[f64], sigma_list: &[f64], err: &mut dyn Write) -> Result<()> {
    for &s in sigma_list {
        for &x in x_grid {
            warn_if_wide(&ChannelParams::new(base.theta_star(), base.phi_star(), s, x)?, err);
        }
    }
    Ok(())
}

fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Moments(a) => {
            let p = a.point.params()?;
            warn_if_wide(&p, err);
            let closed = moments_closed_form(&p);
            let quad = moments_oracle(&p, Integrator::Quadrature { nodes: a.nodes })?;
            let mc = moments_oracle(&p, Integrator::MonteCarlo { samples: a.samples, seed: a.seed })?;
            let se = mc.std_errors.map(|s| s.as_array()).unwrap_or([f64::NAN; 6]);
            writeln!(
                out,
                "{:<8} {:>20} {:>20} {:>12} {:>20} {:>12}",
                "moment", "closed", "quadrature", "|diff|", "monte_carlo", "z"
            )?;
            for (k, name) in GaussianMoments::NAMES.iter().enumerate() {
                let (c, q, m) = (closed.as_array()[k], quad.moments.as_array()[k], mc.moments.as_array()[k]);
                let z = if se[k] > 0.0 { (m - c) / se[k] } else { 0.0 };
                writeln!(out, "{name:<8} {c:>20.15} {q:>20.15} {:>12.3e} {m:>20.15} {z:>12.3}", (c - q).abs())?;
            }
            Ok(0)
        }
        Command::CoherentSweep(a) => {
            let (base, x_grid, sigma_list) = a.sweep.grids()?;
            let ensemble = CoherentEnsembleParams::new(a.delta)?;
            check_sweep_params(&base, &x_grid, &sigma_list, err)?;
            let pts = coherent_channel::sweep_x(&base, &ensemble, &x_grid, &sigma_list, HolevoSettings::default())?;
            emit(&pts, &a.sweep.out, out)?;
            Ok(0)
        }
        Command::QubitSweep(a) => {
            let (base, x_grid, sigma_list) = a.grids()?;
            check_sweep_params(&base, &x_grid, &sigma_list, err)?;
            let pts = qubit_channel::sweep_x(&base, &x_grid, &sigma_list)?;
            emit(&pts, &a.out, out)?;
            Ok(0)
        }
        Command::Verify(a) => {
            let config =
                VerifyConfig { seed: a.seed, mc_samples: a.samples, quadrature_nodes: a.nodes, random_cases: a.cases };
            let report = verify::run(&config)?;
            write!(out, "{report}")?;
            Ok(if report.passed() { 0 } else { 2 })
        }
        Command::OutputState(a) => {
            let p = a.point.params()?;
            warn_if_wide(&p, err);
            let m = match a.kind {
                StateKind::Coherent => coherent_channel::output_state_closed_form(
                    &moments_closed_form(&p),
                    Complex64::new(a.alpha_re, a.alpha_im),
                )?
                .into_matrix(),
                StateKind::Qubit => {
                    let psi = LogicalQubit::new(parse_complex(&a.c0)?, parse_complex(&a.c1)?)?;
                    let form = if a.mean_rotation { OutputForm::MeanRotation } else { OutputForm::Exact };
                    qubit_channel::channel_output(&p, &psi, form)?.matrix().clone()
                }
            };
            for i in 0..m.dim() {
                let row: Vec<String> =
                    (0..m.dim()).map(|j| format!("{:+.12}{:+.12}i", m[(i, j)].re, m[(i, j)].im)).collect();
                writeln!(out, "{}", row.join("  "))?;
            }
            Ok(0)
        }
    }
}
