//! Stability diagnostics for an assembled bundle: decay of `(Σ*)^k p`, the
//! intertwining `Σ*R^{1/2} = R^{1/2}A`, and per-level *-cyclicity
//! certificates for complete non-unitarity.
//!
//! In finite dimensions asymptotic stability is the same as spectral radius
//! below one, so the radius is the test and the decay profile is there for
//! inspection. `R^{1/2}` is always invertible here, which makes the
//! intertwining lemma carry no information of its own; its residual is kept
//! as a consistency check.

use serde::{Deserialize, Serialize};

use crate::assembly::OperatorBundle;
use crate::linalg::{self, c, CMatrix, CVector};

/// Krylov singular values below this fraction of the largest count as zero.
pub const KRYLOV_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub lambda_dim: usize,
    pub lambda_rank: usize,
    /// `None` when `μ_k = 0`, where `φ₁` vanishes.
    pub mu_dim: Option<usize>,
    pub mu_rank: Option<usize>,
}

impl LevelCertificate {
    pub fn pass(&self) -> bool {
        self.lambda_rank == self.lambda_dim && self.mu_rank == self.mu_dim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnuCertificate {
    pub levels: Vec<LevelCertificate>,
}

impl CnuCertificate {
    pub fn pass(&self) -> bool {
        self.levels.iter().all(LevelCertificate::pass)
    }

    pub fn flags(&self) -> Vec<bool> {
        self.levels.iter().map(LevelCertificate::pass).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub spectral_radius_sigma: f64,
    pub spectral_radius_a: f64,
    /// `‖(Σ*)^k p‖` for `k = 0..=K`.
    pub decay_profile: Vec<f64>,
    /// `‖Σ*R^{1/2} − R^{1/2}A‖₂`.
    pub intertwine_residual: f64,
    pub norm_a: f64,
    /// Largest singular value of `Q` on `𝓗₀`.
    pub q_h0_norm: f64,
    /// `‖(Q − I)P_{𝓗₀^⊥}‖₂`.
    pub q_complement_residual: f64,
    pub cnu: CnuCertificate,
}

impl StabilityReport {
    pub fn stable(&self) -> bool {
        self.spectral_radius_sigma < 1.0
    }

    /// `1 − ρ(Σ*)`.
    pub fn margin(&self) -> f64 {
        1.0 - self.spectral_radius_sigma
    }
}

/// Spectral radius, falling back to a Gelfand estimate if the Schur
/// iteration does not converge.
fn radius(m: &CMatrix) -> f64 {
    linalg::spectral_radius(m).unwrap_or_else(|_| {
        let mut p = m.clone();
        let mut steps = 1.0;
        for _ in 0..10 {
            p = &p * &p;
            steps *= 2.0;
        }
        linalg::spectral_norm(&p).powf(1.0 / steps)
    })
}

pub fn stability_report(b: &OperatorBundle, k: usize) -> StabilityReport {
    let s = b.sigma_star();
    let mut x = b.p().clone();
    let mut decay_profile = Vec::with_capacity(k + 1);
    decay_profile.push(x.norm());
    for _ in 0..k {
        x = s * x;
        decay_profile.push(x.norm());
    }
    let r_half = CMatrix::from_diagonal(&b.r().diagonal().map(|z| c(z.re.max(0.0).sqrt())));
    let intertwine_residual = linalg::spectral_norm(&(s * &r_half - &r_half * b.a()));

    let dim = b.dim();
    let h0 = b.layout().h0();
    let mut proj_h0 = CMatrix::zeros(dim, dim);
    for &i in &h0 {
        proj_h0[(i, i)] = c(1.0);
    }
    let proj_rest = CMatrix::identity(dim, dim) - &proj_h0;
    let q_h0 = CMatrix::from_fn(h0.len(), h0.len(), |i, j| b.q_factor()[(h0[i], h0[j])]);
    let q_h0_norm = linalg::singular_values_desc(&q_h0).first().copied().unwrap_or(0.0);
    let q_complement_residual = linalg::spectral_norm(&((b.q_factor() - CMatrix::identity(dim, dim)) * proj_rest));

    StabilityReport {
        spectral_radius_sigma: radius(s),
        spectral_radius_a: radius(b.a()),
        decay_profile,
        intertwine_residual,
        norm_a: linalg::spectral_norm(b.a()),
        q_h0_norm,
        q_complement_residual,
        cnu: cnu_certificate(b),
    }
}

/// Numerical rank of `[u^{−d} v, …, u^{d} v]` for unitary (or partially
/// isometric) `u`.
fn orbit_rank(u: &CMatrix, v: &CVector, d: usize) -> usize {
    let mut cols = vec![v.clone()];
    let mut fwd = v.clone();
    let mut back = v.clone();
    let ua = u.adjoint();
    for _ in 0..d {
        fwd = u * fwd;
        back = &ua * back;
        cols.push(fwd.clone());
        cols.push(back.clone());
    }
    linalg::numerical_rank(&CMatrix::from_columns(&cols), KRYLOV_RANK_TOL)
}

/// Per-level check that `p_k` is *-cyclic for `φ` on `ker(R − λ_k)` and
/// `p¹_k` for `φ₁` on `ker(R₁ − μ_k)`. Passing at every level certifies that
/// `A` has no unitary part.
pub fn cnu_certificate(b: &OperatorBundle) -> CnuCertificate {
    let levels = b
        .layout()
        .levels
        .iter()
        .zip(b.p1())
        .map(|(lv, p1)| {
            let mut pk = CVector::zeros(b.dim());
            for i in lv.lambda_block.clone() {
                pk[i] = b.p()[i];
            }
            let lambda_dim = lv.lambda_block.len();
            let lambda_rank = orbit_rank(b.phi(), &pk, lambda_dim);
            let (mu_dim, mu_rank) = if p1.norm() > 0.0 && b.phi1().norm() > 0.0 && (b.phi1() * p1).norm() > 0.0 {
                let d = 1 + lv.mu_block.len();
                (Some(d), Some(orbit_rank(b.phi1(), p1, d)))
            } else {
                (None, None)
            };
            LevelCertificate { lambda_dim, lambda_rank, mu_dim, mu_rank }
        })
        .collect();
    CnuCertificate { levels }
}
