//! Assembly of the operator tuple `(R, R₁, p, 𝔍ₚ, φ, φ₁)` and the derived
//! contraction `Σ* = φ₁R₁R⁻¹φ*`.
//!
//! Coordinates follow a block layout: for each level `k` a block of size
//! `card supp ρ_k` on which `R = λ_k` (its first vector carries `p`), then for
//! each level a block of size `card supp ρ¹_k − 1` on which `R = μ_k`. The first
//! vectors of the λ-blocks span `𝓗₀`, the only place where `R₁` differs
//! from `R`.

use std::ops::Range;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, conj_matrix, conj_vector, inner, CMatrix, CVector, C64, ONE, ZERO};
use crate::spectral_data::{borg_weights, AtomicMeasure, CompactSpectralData, PhaseData};

/// Relative clamping window for the known-zero eigenvalue of `R₁²`.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelBlocks {
    /// Coordinates of `ker(R − λ_k)`; the first one lies in `𝓗₀`.
    pub lambda_block: Range<usize>,
    /// Coordinates of the part of `ker(R₁ − μ_k)` orthogonal to `𝓗₀`.
    pub mu_block: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    pub dim: usize,
    pub levels: Vec<LevelBlocks>,
}

impl BlockLayout {
    fn new(lambda_sizes: &[usize], mu_sizes: &[usize]) -> Self {
        let mut levels = Vec::with_capacity(lambda_sizes.len());
        let mut at = 0;
        for &s in lambda_sizes {
            levels.push(LevelBlocks { lambda_block: at..at + s, mu_block: 0..0 });
            at += s;
        }
        for (k, &s) in mu_sizes.iter().enumerate() {
            levels[k].mu_block = at..at + s;
            at += s;
        }
        BlockLayout { dim: at, levels }
    }

    /// Coordinates spanning `𝓗₀`, one per level.
    pub fn h0(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.lambda_block.start).collect()
    }

    /// Coordinates spanning `𝓚`: the λ-blocks without their first vector.
    pub fn k(&self) -> Vec<usize> {
        self.levels.iter().flat_map(|l| l.lambda_block.clone().skip(1)).collect()
    }

    /// Coordinates spanning `𝓚₁`: all μ-blocks.
    pub fn k1(&self) -> Vec<usize> {
        self.levels.iter().flat_map(|l| l.mu_block.clone()).collect()
    }
}

/// Finite-dimensional realization of abstract spectral data.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    layout: BlockLayout,
    r: CMatrix,
    r1: CMatrix,
    p: CVector,
    /// Columns: unit eigenvectors of `R₁` inside `𝓗₀`, one per level.
    h0_eigvecs: CMatrix,
    p1: Vec<CVector>,
    jp: CMatrix,
    phi: CMatrix,
    phi1: CMatrix,
    q: CVector,
    qhat: CVector,
    sigma_star: CMatrix,
    sigma_hat_star: CMatrix,
    q_factor: CMatrix,
    a: CMatrix,
}

impl OperatorBundle {
    pub fn dim(&self) -> usize {
        self.layout.dim
    }
    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }
    pub fn r(&self) -> &CMatrix {
        &self.r
    }
    pub fn r1(&self) -> &CMatrix {
        &self.r1
    }
    pub fn p(&self) -> &CVector {
        &self.p
    }
    /// Projections of `p` onto `ker(R₁ − μ_k)`.
    pub fn p1(&self) -> &[CVector] {
        &self.p1
    }
    pub fn h0_eigvecs(&self) -> &CMatrix {
        &self.h0_eigvecs
    }
    /// Matrix `C` of the conjugation `x ↦ C·conj(x)`.
    pub fn jp(&self) -> &CMatrix {
        &self.jp
    }
    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }
    pub fn phi1(&self) -> &CMatrix {
        &self.phi1
    }
    pub fn q(&self) -> &CVector {
        &self.q
    }
    pub fn qhat(&self) -> &CVector {
        &self.qhat
    }
    pub fn sigma_star(&self) -> &CMatrix {
        &self.sigma_star
    }
    pub fn sigma_hat_star(&self) -> &CMatrix {
        &self.sigma_hat_star
    }
    /// `Q = R₁^{1/2} R^{-1/2}`.
    pub fn q_factor(&self) -> &CMatrix {
        &self.q_factor
    }
    /// `A = Q*φ₁Qφ*`.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    /// Applies the conjugation `𝔍ₚ`.
    pub fn apply_jp(&self, x: &CVector) -> CVector {
        &self.jp * conj_vector(x)
    }

    /// Same `R`, `R₁`, `p`, `𝔍ₚ` with the unitaries replaced. No admissibility
    /// check is made beyond dimensions.
    pub fn with_unitaries(&self, phi: CMatrix, phi1: CMatrix) -> Result<Self> {
        let d = self.dim();
        if phi.shape() != (d, d) || phi1.shape() != (d, d) {
            return Err(Error::Dimension("unitaries must match the bundle dimension".into()));
        }
        let mut parts = self.parts();
        parts.phi = phi;
        parts.phi1 = phi1;
        finish(parts)
    }

    /// The equivalent tuple `(φΨ*, φ₁Ψ*, Ψ𝔍ₚ)` for a unitary `Ψ` commuting
    /// with `R` and fixing `p`.
    pub fn with_equivalence(&self, psi: &CMatrix) -> Result<Self> {
        let d = self.dim();
        if psi.shape() != (d, d) {
            return Err(Error::Dimension("Ψ must match the bundle dimension".into()));
        }
        let mut parts = self.parts();
        parts.phi = &self.phi * psi.adjoint();
        parts.phi1 = &self.phi1 * psi.adjoint();
        parts.jp = psi * &self.jp;
        finish(parts)
    }

    fn parts(&self) -> Parts {
        Parts {
            layout: self.layout.clone(),
            r: self.r.clone(),
            r1: self.r1.clone(),
            p: self.p.clone(),
            h0_eigvecs: self.h0_eigvecs.clone(),
            p1: self.p1.clone(),
            jp: self.jp.clone(),
            phi: self.phi.clone(),
            phi1: self.phi1.clone(),
        }
    }
}

struct Parts {
    layout: BlockLayout,
    r: CMatrix,
    r1: CMatrix,
    p: CVector,
    h0_eigvecs: CMatrix,
    p1: Vec<CVector>,
    jp: CMatrix,
    phi: CMatrix,
    phi1: CMatrix,
}

fn finish(parts: Parts) -> Result<OperatorBundle> {
    let Parts { layout, r, r1, p, h0_eigvecs, p1, jp, phi, phi1 } = parts;
    let r_inv = linalg::hpd_inverse(&r)?;
    let q = &phi * (&r_inv * &p);
    let qhat = &jp * conj_vector(&q);
    let sigma_star = &phi1 * &r1 * &r_inv * phi.adjoint();
    let sigma_hat_star = phi1.adjoint() * &r1 * &r_inv * &phi;
    let clamp = CLAMP_TOL * linalg::spectral_norm(&r).powi(2).max(1.0);
    let r1_half = linalg::psd_function(&r1, clamp.sqrt(), f64::sqrt)?;
    let r_inv_half = linalg::psd_function(&r, 0.0, |x| 1.0 / x.sqrt())?;
    let q_factor = r1_half * r_inv_half;
    let a = q_factor.adjoint() * &phi1 * &q_factor * phi.adjoint();
    Ok(OperatorBundle { layout, r, r1, p, h0_eigvecs, p1, jp, phi, phi1, q, qhat, sigma_star, sigma_hat_star, q_factor, a })
}

/// Bundle for cyclic data: every level simple, phases `ξ_k`, `η_k`.
pub fn assemble_cyclic(d: &CompactSpectralData) -> Result<OperatorBundle> {
    match d.phases() {
        PhaseData::Cyclic { .. } => build(&d.to_multiplicity(), false),
        PhaseData::Multiplicity { .. } => Err(Error::InvalidLevelData("expected cyclic phase data".into())),
    }
}

/// Bundle for data with per-level circle measures.
pub fn assemble_multiplicity(d: &CompactSpectralData) -> Result<OperatorBundle> {
    build(&d.to_multiplicity(), false)
}

/// Like [`assemble_multiplicity`] but keeps zero-weight atoms, producing a
/// bundle whose `p` is not *-cyclic on some level.
pub fn assemble_multiplicity_relaxed(d: &CompactSpectralData) -> Result<OperatorBundle> {
    build(&d.to_multiplicity(), true)
}

/// Dispatches on the data mode.
pub fn assemble(d: &CompactSpectralData) -> Result<OperatorBundle> {
    match d.phases() {
        PhaseData::Cyclic { .. } => assemble_cyclic(d),
        PhaseData::Multiplicity { .. } => assemble_multiplicity(d),
    }
}

fn check_cyclic_measure(m: &AtomicMeasure, level: usize, which: &'static str) -> Result<()> {
    if m.atoms().iter().any(|a| a.weight <= 0.0) {
        return Err(Error::SupportNotCyclic { level, which });
    }
    Ok(())
}

// Unitary with spectral measure `m` at the first basis vector, in a real basis:
// H·diag(ζ)·H with H e₀ = (√c_j). Returns the unitary and the eigenvector matrix H.
fn block_unitary(m: &AtomicMeasure) -> (CMatrix, CMatrix) {
    let sqrt_w: Vec<f64> = m.atoms().iter().map(|a| a.weight.max(0.0).sqrt()).collect();
    let norm = sqrt_w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unit: Vec<f64> = sqrt_w.iter().map(|x| x / norm).collect();
    let h = linalg::real_to_complex(&linalg::householder_to(&unit));
    let mut hd = h.clone();
    for (j, a) in m.atoms().iter().enumerate() {
        for i in 0..hd.nrows() {
            hd[(i, j)] *= a.point;
        }
    }
    (&hd * h.transpose(), h)
}

fn build(d: &CompactSpectralData, relaxed: bool) -> Result<OperatorBundle> {
    let (rho, rho1) = match d.phases() {
        PhaseData::Multiplicity { rho, rho1 } => (rho, rho1),
        PhaseData::Cyclic { .. } => unreachable!("converted by caller"),
    };
    let s = d.spectrum();
    let n = s.len();
    let lambda = s.lambda();
    let mu = s.mu();
    if !relaxed {
        for k in 0..n {
            check_cyclic_measure(&rho[k], k, "rho")?;
            if let Some(m) = &rho1[k] {
                check_cyclic_measure(m, k, "rho1")?;
            }
        }
    }
    let lambda_sizes: Vec<usize> = rho.iter().map(|m| m.len()).collect();
    let mu_sizes: Vec<usize> = rho1.iter().map(|m| m.as_ref().map_or(0, |m| m.len() - 1)).collect();
    let layout = BlockLayout::new(&lambda_sizes, &mu_sizes);
    let dim = layout.dim;
    let h0 = layout.h0();

    let a = borg_weights(s)?;
    let sqrt_a: Vec<f64> = a.atoms().iter().map(|x| x.weight.sqrt()).collect();

    let mut r = CMatrix::zeros(dim, dim);
    for (k, lv) in layout.levels.iter().enumerate() {
        for i in lv.lambda_block.clone() {
            r[(i, i)] = c(lambda[k]);
        }
        for i in lv.mu_block.clone() {
            r[(i, i)] = c(mu[k]);
        }
    }
    let mut p = CVector::zeros(dim);
    for (k, &i) in h0.iter().enumerate() {
        p[i] = c(sqrt_a[k]);
    }

    // R₁² on 𝓗₀ is diag(λ²) − √a√aᵀ; everywhere else R₁ = R.
    let m = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { lambda[i] * lambda[i] } else { 0.0 };
        diag - sqrt_a[i] * sqrt_a[j]
    });
    let (ev, mut v) = linalg::symmetric_eigh(&m);
    let clamp = CLAMP_TOL * (lambda[0] * lambda[0]).max(1.0);
    let mut r1_vals = Vec::with_capacity(n);
    for (k, &e) in ev.iter().enumerate() {
        if e < -clamp {
            return Err(Error::SquareRootFailure { value: e });
        }
        r1_vals.push(if mu[k] == 0.0 { 0.0 } else { e.max(0.0).sqrt() });
        let dot: f64 = (0..n).map(|i| sqrt_a[i] * v[(i, k)]).sum();
        if dot < 0.0 {
            for i in 0..n {
                v[(i, k)] = -v[(i, k)];
            }
        }
    }
    let mut h0_eigvecs = CMatrix::zeros(dim, n);
    for k in 0..n {
        for (i, &gi) in h0.iter().enumerate() {
            h0_eigvecs[(gi, k)] = c(v[(i, k)]);
        }
    }
    let mut r1 = r.clone();
    for &i in &h0 {
        for &j in &h0 {
            r1[(i, j)] = ZERO;
        }
    }
    for k in 0..n {
        let col = h0_eigvecs.column(k);
        r1 += col * col.transpose() * c(r1_vals[k]);
    }
    let p1: Vec<CVector> = (0..n)
        .map(|k| {
            let col: CVector = h0_eigvecs.column(k).into_owned();
            &col * inner(&p, &col)
        })
        .collect();

    // φ: block unitaries on the λ-blocks, identity on 𝓚₁.
    let mut phi = CMatrix::identity(dim, dim);
    let mut lambda_frames = Vec::with_capacity(n);
    for (k, lv) in layout.levels.iter().enumerate() {
        let (u, h) = block_unitary(&rho[k]);
        let start = lv.lambda_block.start;
        let sz = lv.lambda_block.len();
        phi.view_mut((start, start), (sz, sz)).copy_from(&u);
        let mut frame = CMatrix::zeros(dim, sz);
        frame.view_mut((start, 0), (sz, sz)).copy_from(&h);
        lambda_frames.push(frame);
    }

    // φ₁: on ker(R₁ − μ_k) the frame is [v_k, μ-block]; identity on 𝓚; zero on ker R₁.
    let mut phi1 = CMatrix::zeros(dim, dim);
    for i in layout.k() {
        phi1[(i, i)] = ONE;
    }
    let mut mu_frames = Vec::with_capacity(n);
    for (k, lv) in layout.levels.iter().enumerate() {
        let Some(m) = &rho1[k] else {
            mu_frames.push(None);
            continue;
        };
        let sz = 1 + lv.mu_block.len();
        let mut basis = CMatrix::zeros(dim, sz);
        basis.set_column(0, &h0_eigvecs.column(k));
        for (j, i) in lv.mu_block.clone().enumerate() {
            basis[(i, j + 1)] = ONE;
        }
        let (u, h) = block_unitary(m);
        phi1 += &basis * u * basis.transpose();
        mu_frames.push(Some(&basis * h));
    }

    // 𝔍ₚ: on 𝓚 / 𝓚₁ the restrictions of the per-level conjugations that fix
    // the eigenvectors of φ, φ₁. R is diagonal with distinct values on 𝓗₀ and p is real there, so the
    // conjugation fixing p and commuting with R is plain conjugation.
    let mut jp = CMatrix::zeros(dim, dim);
    for &g in &h0 {
        jp[(g, g)] = ONE;
    }
    let mut k_proj = CMatrix::zeros(dim, dim);
    for i in layout.k() {
        k_proj[(i, i)] = ONE;
    }
    let mut k1_proj = CMatrix::zeros(dim, dim);
    for i in layout.k1() {
        k1_proj[(i, i)] = ONE;
    }
    for f in &lambda_frames {
        jp += &k_proj * (f * f.transpose()) * &k_proj;
    }
    for f in mu_frames.iter().flatten() {
        jp += &k1_proj * (f * f.transpose()) * &k1_proj;
    }

    finish(Parts { layout, r, r1, p, h0_eigvecs, p1, jp, phi, phi1 })
}

/// `Σ* = φ₁R₁R⁻¹φ*`.
pub fn sigma_star(b: &OperatorBundle) -> CMatrix {
    b.sigma_star.clone()
}

/// `A = Q*φ₁Qφ*` with `Q = R₁^{1/2}R^{-1/2}`.
pub fn stability_operator_a(b: &OperatorBundle) -> CMatrix {
    b.a.clone()
}

/// Residuals of the bundle identities, all expected near zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureResiduals {
    /// `‖R² − R₁² − pp*‖_F`.
    pub rank_one: f64,
    /// `‖I − ΣΣ* − qq*‖_F`.
    pub defect: f64,
    /// `‖φR − Rφ‖_F`.
    pub phi_commutes: f64,
    /// `‖φ₁R₁ − R₁φ₁‖_F`.
    pub phi1_commutes: f64,
    /// `‖φ*φ − I‖_F`.
    pub phi_unitary: f64,
    /// `‖φ₁*φ₁ − P‖_F` with `P` the projection onto `(ker R₁)^⊥`.
    pub phi1_partial_isometry: f64,
    /// `‖Σ*R^{1/2} − R^{1/2}A‖_F`.
    pub intertwining: f64,
    /// `‖A‖`.
    pub norm_a: f64,
}

pub fn structure_residuals(b: &OperatorBundle) -> Result<StructureResiduals> {
    let d = b.dim();
    let id = CMatrix::identity(d, d);
    let rank_one = linalg::frobenius(&(&b.r * &b.r - &b.r1 * &b.r1 - &b.p * b.p.adjoint()));
    let sigma = b.sigma_star.adjoint();
    let defect = linalg::frobenius(&(&id - &sigma * &b.sigma_star - &b.q * b.q.adjoint()));
    let phi_commutes = linalg::frobenius(&(&b.phi * &b.r - &b.r * &b.phi));
    let phi1_commutes = linalg::frobenius(&(&b.phi1 * &b.r1 - &b.r1 * &b.phi1));
    let phi_unitary = linalg::frobenius(&(b.phi.adjoint() * &b.phi - &id));
    // ker R₁ lies in 𝓗₀ and is spanned by the eigenvectors with zero eigenvalue
    let tol = 1e-12 * linalg::spectral_norm(&b.r).max(1.0);
    let mut proj = id.clone();
    for v in b.h0_eigvecs.column_iter() {
        if (&b.r1 * v).norm() <= tol {
            proj -= v * v.adjoint();
        }
    }
    let phi1_partial_isometry = linalg::frobenius(&(b.phi1.adjoint() * &b.phi1 - proj));
    let r_half = linalg::psd_function(&b.r, 0.0, f64::sqrt)?;
    let intertwining = linalg::frobenius(&(&b.sigma_star * &r_half - &r_half * &b.a));
    let norm_a = linalg::spectral_norm(&b.a);
    Ok(StructureResiduals { rank_one, defect, phi_commutes, phi1_commutes, phi_unitary, phi1_partial_isometry, intertwining, norm_a })
}

/// Largest residual of each conjugation law.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationReport {
    pub antilinearity: f64,
    pub involutivity: f64,
    pub isometry: f64,
    pub symmetric_form: f64,
    pub fixes_p: f64,
    pub commutes_r: f64,
    pub commutes_r1: f64,
    pub phi_symmetric: f64,
    pub phi1_symmetric: f64,
}

impl ConjugationReport {
    pub fn max(&self) -> f64 {
        [
            self.antilinearity,
            self.involutivity,
            self.isometry,
            self.symmetric_form,
            self.fixes_p,
            self.commutes_r,
            self.commutes_r1,
            self.phi_symmetric,
            self.phi1_symmetric,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Checks the conjugation laws of `𝔍ₚ` on the matrix level and on 50 random
/// vector pairs (fixed seed).
pub fn conjugation_check(b: &OperatorBundle) -> ConjugationReport {
    let d = b.dim();
    let cm = &b.jp;
    let jp = |x: &CVector| cm * conj_vector(x);
    let jp_op = |m: &CMatrix| cm * conj_matrix(m) * conj_matrix(cm);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut antilinearity: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    let mut symmetric_form: f64 = 0.0;
    let mut involution_vec: f64 = 0.0;
    for _ in 0..50 {
        let x = random_vector(&mut rng, d);
        let y = random_vector(&mut rng, d);
        let alpha = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let lhs = jp(&(&x * alpha + &y));
        let rhs = jp(&x) * alpha.conj() + jp(&y);
        antilinearity = antilinearity.max((lhs - rhs).norm());
        isometry = isometry.max((jp(&x).norm() - x.norm()).abs());
        symmetric_form = symmetric_form.max((inner(&jp(&x), &y) - inner(&jp(&y), &x)).norm());
        involution_vec = involution_vec.max((jp(&jp(&x)) - &x).norm());
    }
    let id = CMatrix::identity(d, d);
    let involutivity = involution_vec.max(linalg::frobenius(&(cm * conj_matrix(cm) - &id)));
    let isometry = isometry.max(linalg::frobenius(&(cm.adjoint() * cm - &id)));
    ConjugationReport {
        antilinearity,
        involutivity,
        isometry,
        symmetric_form,
        fixes_p: (jp(&b.p) - &b.p).norm(),
        commutes_r: linalg::frobenius(&(cm * conj_matrix(&b.r) - &b.r * cm)),
        commutes_r1: linalg::frobenius(&(cm * conj_matrix(&b.r1) - &b.r1 * cm)),
        phi_symmetric: linalg::frobenius(&(b.phi.adjoint() - jp_op(&b.phi))),
        phi1_symmetric: linalg::frobenius(&(b.phi1.adjoint() - jp_op(&b.phi1))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_data::validate_intertwining;

    fn cyclic(l: &[f64], m: &[f64], xi: &[C64], eta: &[Option<C64>]) -> OperatorBundle {
        let s = validate_intertwining(l, m).unwrap();
        assemble_cyclic(&CompactSpectralData::cyclic(s, xi.to_vec(), eta.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn rank_one_bundle() {
        let b = cyclic(&[1.0], &[0.0], &[ONE], &[None]);
        assert_eq!(b.dim(), 1);
        assert_eq!(b.r()[(0, 0)], ONE);
        assert_eq!(b.p()[0], ONE);
        assert_eq!(b.r1()[(0, 0)], ZERO);
        assert_eq!(b.phi()[(0, 0)], ONE);
        assert_eq!(b.phi1()[(0, 0)], ZERO);
        assert!((b.q()[0] - ONE).norm() < 1e-15);
        assert_eq!(b.sigma_star()[(0, 0)], ZERO);
        assert_eq!(b.a()[(0, 0)], ZERO);
        assert_eq!(conjugation_check(&b).max(), 0.0);
    }

    #[test]
    fn two_level_bundle_matches_oracle() {
        let b = cyclic(&[2.0, 1.0], &[2f64.sqrt(), 0.0], &[ONE, ONE], &[Some(ONE), None]);
        assert!((b.p()[0].re - (8.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((b.p()[1].re - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        let r1sq = b.r1() * b.r1();
        let (ev, _) = linalg::hermitian_eigh(&r1sq);
        assert!((ev[0] - 2.0).abs() < 1e-13 && ev[1].abs() < 1e-13);
        let res = structure_residuals(&b).unwrap();
        assert!(res.rank_one <= 1e-12, "{res:?}");
        assert!(res.defect <= 1e-12, "{res:?}");
        assert!(res.intertwining <= 1e-12, "{res:?}");
        assert!(linalg::spectral_radius(b.sigma_star()).unwrap() < 1.0);
    }

    #[test]
    fn complex_phases_keep_conjugation_laws() {
        let i = C64::new(0.0, 1.0);
        let b = cyclic(&[2.0, 1.0], &[1.5, 0.5], &[i, -ONE], &[Some(C64::from_polar(1.0, 0.3)), Some(i)]);
        let rep = conjugation_check(&b);
        assert!(rep.max() <= 1e-12, "{rep:?}");
        let res = structure_residuals(&b).unwrap();
        assert!(res.defect <= 1e-10 && res.phi_unitary <= 1e-12 && res.phi1_partial_isometry <= 1e-12, "{res:?}");
    }

    #[test]
    fn two_atom_level_has_dimension_two() {
        let s = validate_intertwining(&[1.0], &[0.0]).unwrap();
        let rho = AtomicMeasure::circle(&[(ONE, 0.5), (-ONE, 0.5)]).unwrap();
        let d = CompactSpectralData::multiplicity(s, vec![rho], vec![None]).unwrap();
        let b = assemble_multiplicity(&d).unwrap();
        assert_eq!(b.dim(), 2);
        let ker = (b.r() - CMatrix::identity(2, 2)).norm();
        assert!(ker < 1e-15);
        let mut ev: Vec<f64> = linalg::eigenvalues(b.phi()).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!((b.p().norm() - 1.0).abs() < 1e-15);
        assert!(conjugation_check(&b).max() <= 1e-12);
    }

    #[test]
    fn unit_measures_reduce_to_cyclic() {
        let s = validate_intertwining(&[3.0, 2.0], &[2.5, 1.0]).unwrap();
        let cyc = CompactSpectralData::cyclic(s.clone(), vec![ONE, ONE], vec![Some(ONE), Some(ONE)]).unwrap();
        let mul = CompactSpectralData::multiplicity(
            s,
            vec![AtomicMeasure::unit(), AtomicMeasure::unit()],
            vec![Some(AtomicMeasure::unit()), Some(AtomicMeasure::unit())],
        )
        .unwrap();
        let a = assemble_cyclic(&cyc).unwrap();
        let b = assemble_multiplicity(&mul).unwrap();
        assert!((a.sigma_star() - b.sigma_star()).norm() < 1e-15);
        assert!((a.q() - b.q()).norm() < 1e-15);
    }

    #[test]
    fn zero_weight_atom_is_rejected_unless_relaxed() {
        let s = validate_intertwining(&[1.0], &[0.5]).unwrap();
        let atoms = vec![
            crate::spectral_data::Atom { point: ONE, weight: 1.0 },
            crate::spectral_data::Atom { point: -ONE, weight: 0.0 },
        ];
        let rho = AtomicMeasure::relaxed(atoms, true, true).unwrap();
        let d = CompactSpectralData::multiplicity_relaxed(s, vec![rho], vec![Some(AtomicMeasure::unit())]).unwrap();
        assert!(matches!(assemble_multiplicity(&d), Err(Error::SupportNotCyclic { level: 0, .. })));
        assert_eq!(assemble_multiplicity_relaxed(&d).unwrap().dim(), 2);
    }
}
