//! Simulation of a photonic channel in which photon loss is statistically
//! correlated with polarization mixing.
//!
//! A mixing beam splitter at angle θ is followed by two loss beam splitters at
//! angle φ, with (θ, φ) drawn from a correlated Gaussian. The crate computes
//! channel outputs for weak coherent and dual-rail single-photon inputs, the
//! Holevo information of a Gaussian coherent-state ensemble and the erasure
//! capacity of the dual-rail encoding. Every closed form has an independent
//! numerical counterpart: Gauss–Hermite quadrature or Monte Carlo over the
//! angles, and an exact single-photon Fock-space simulation of the circuit.

pub mod cli;
pub mod coherent_channel;
pub mod density;
pub mod error;
pub mod fock_sim;
pub mod noise_model;
pub mod quadrature;
pub mod qubit_channel;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use noise_model::{ChannelParams, GaussianMoments, Integrator};
