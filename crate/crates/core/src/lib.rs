//! Pseudo-spectral workbench for solitary waves of two-layer internal-wave
//! systems: the Boussinesq/full-dispersion (B-FD) family, the
//! intermediate-long-wave (ILW) systems and their Benjamin–Ono (BO) limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] – model coefficients, admissibility windows and closed-form
//!   decay constants.
//! * [`spectral`] – periodic grids, transforms and every Fourier multiplier
//!   used by the three families.
//! * [`functionals`] – the energy `E`, the constraint `F`, the Hamiltonian and
//!   per-frequency quadratic-form checks.
//! * [`solvers`] – Petviashvili iteration, Newton–Krylov solves, parameter
//!   continuation and constrained minimisation.
//! * [`decay`] – kernel oracles (quadrature, series and FFT inversion) and tail
//!   fits.
//! * [`evolution`] – ETDRK4 / IMEX time stepping, Hamiltonian tracking and the
//!   small-data global-existence criterion.
//! * [`cli`] – configuration files, report emission and subcommand dispatch.

pub mod cli;
pub mod decay;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod params;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{Depth, ModelParams};
pub use spectral::{Grid, Multiplier, RealField, WavePair};
