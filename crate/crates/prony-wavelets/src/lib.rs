//! Sparse multiwavelet signal recovery from deterministic Fourier samples.
//!
//! The library synthesizes sparse signals in a multiwavelet basis of finitely
//! many levels, measures their Fourier transform on a small deterministic
//! frequency set, and recovers the coefficients exactly by per-level linear
//! solves, mask unmixing and Prony's method. The sampling set has at most
//! 2·M·r·(s₀+…+s_{J−1}) points regardless of dimension.

pub mod bank;
pub mod banks;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod prony;
pub mod pwpoly;
pub mod recon;
pub mod sampling;
pub mod scheme;
pub mod signal;
pub mod support;
pub mod trigpoly;

pub use bank::{LambdaSet, WaveletBank};
pub use banks::{make_bank, BankId};
pub use error::{Error, Result};
pub use recon::Tolerances;
pub use sampling::{SamplingPlan, ShiftVector, SparsityVector};
pub use scheme::DilationScheme;
pub use signal::{MeasurementSet, SparseWaveletSignal};
pub use support::SupportBox;
