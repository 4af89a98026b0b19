//! Kernel oracles and tail diagnostics for the decay laws of computed waves.

pub mod kernels;
pub mod quadrature;
pub mod tails;

pub use kernels::{
    kernel_fft_oracle, kernel_k, kernel_k1, kernel_k2, kernel_k3, kernel_k3_series, Normalization, SeriesValue,
};
pub use tails::{fit_algebraic_tail, fit_exponential_tail, DecayReport, FitOptions, TailKind};
