//! Finite-rank Hankel operators from abstract spectral data and back.
//!
//! The inverse direction takes two interlacing sequences `λ`, `μ` (singular
//! values of `Γ` and of `ΓS`) plus per-level phase data, assembles the
//! operator tuple `(R, R₁, p, φ, φ₁, 𝔍ₚ)` and produces the Hankel symbol
//! `γ_k = ⟨q, (Σ*)^k p⟩`. The forward direction recovers the same data from a
//! truncated Hankel matrix.

pub mod assembly;
pub mod clark;
pub mod error;
pub mod hankel;
pub mod linalg;
pub mod sampling;
pub mod schema;
pub mod spectral_data;
pub mod stability;

pub use error::{Error, Result};
