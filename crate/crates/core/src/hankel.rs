//! Hankel symbols from operator bundles, truncated Hankel matrices, and the
//! forward map from a Hankel matrix back to spectral data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::assembly::{assemble, OperatorBundle};
use crate::error::{Error, Result};
use crate::linalg::{self, c, conj_matrix, inner, CMatrix, CVector, C64, ZERO};
use crate::spectral_data::{borg_weights, validate_intertwining, Atom, AtomicMeasure, CompactSpectralData, Mode, PhaseData};

/// Tail bound `‖(Σ*)^N‖_F` required of an automatic or certified truncation.
pub const TAIL_TOL: f64 = 1e-12;
/// Largest truncation the automatic rule will pick.
pub const MAX_AUTO_N: usize = 4096;
/// Relative anti-diagonal residual tolerated when ingesting a dense matrix.
pub const HANKEL_TOL: f64 = 1e-12;

/// `N × N` Hankel matrix `Γ_{jk} = γ_{j+k}`, stored through its symbol.
///
/// Products with `Γ` go through an FFT convolution, so truncations in the
/// thousands never need the dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    gamma: Vec<C64>,
    size: usize,
}

// Below this size products are formed directly.
const DIRECT_LIMIT: usize = 64;

impl HankelMatrix {
    /// Builds the `n × n` truncation from `γ_0..γ_{2n−2}` (extra coefficients
    /// are ignored).
    pub fn from_symbol(gamma: &[C64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if n > gamma.len().div_ceil(2) {
            return Err(Error::Dimension(format!("{} coefficients cannot fill a {n}x{n} Hankel matrix", gamma.len())));
        }
        if let Some(i) = gamma.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(HankelMatrix { gamma: gamma[..2 * n - 1].to_vec(), size: n })
    }

    /// Reads a dense square matrix, checking anti-diagonal constancy to
    /// `tol` relative to the largest entry.
    pub fn from_dense(m: &CMatrix, tol: f64) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if m.ncols() != n {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", n, m.ncols())));
        }
        if let Some(i) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let gamma: Vec<C64> = (0..2 * n - 1)
            .map(|s| {
                let j = s.saturating_sub(n - 1);
                m[(j, s - j)]
            })
            .collect();
        let residual = antidiagonal_residual(m);
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual > tol * scale {
            return Err(Error::NotHankel { residual });
        }
        Self::from_symbol(&gamma, n)
    }

    pub fn gamma(&self) -> &[C64] {
        &self.gamma
    }

    /// Truncation size `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.gamma[j + k]
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.size, self.size, |j, k| self.gamma[j + k])
    }

    /// `u = Γ*e₀`, the conjugated first row.
    pub fn u(&self) -> CVector {
        CVector::from_iterator(self.size, self.gamma[..self.size].iter().map(|z| z.conj()))
    }

    /// `Γ·X` for a block of column vectors.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let n = self.size;
        assert_eq!(x.nrows(), n, "operand height must equal the truncation size");
        if n <= DIRECT_LIMIT {
            return self.to_dense() * x;
        }
        // y_j = Σ_k γ_{j+k} x_k is entry j + N − 1 of γ ∗ reverse(x).
        let len = (3 * n - 2).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut g = vec![ZERO; len];
        g[..2 * n - 1].copy_from_slice(&self.gamma);
        fwd.process(&mut g);
        let scale = 1.0 / len as f64;
        let mut out = CMatrix::zeros(n, x.ncols());
        let mut buf = vec![ZERO; len];
        for col in 0..x.ncols() {
            buf.iter_mut().for_each(|z| *z = ZERO);
            for k in 0..n {
                buf[n - 1 - k] = x[(k, col)];
            }
            fwd.process(&mut buf);
            for (b, gv) in buf.iter_mut().zip(&g) {
                *b *= gv;
            }
            inv.process(&mut buf);
            for j in 0..n {
                out[(j, col)] = buf[j + n - 1] * scale;
            }
        }
        out
    }

    /// All singular values in decreasing order, from the dense matrix.
    /// Cubic in `N`; meant for small truncations.
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values_desc(&self.to_dense())
    }

    /// Leading singular values above `rel_tol · σ₁` and the matching right
    /// singular vectors, from a seeded randomized range finder.
    pub fn leading_svd(&self, rel_tol: f64, at_least: usize) -> (Vec<f64>, CMatrix) {
        let n = self.size;
        let mut k = n.min(at_least.max(16) + 8);
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a4b);
        loop {
            let omega = CMatrix::from_fn(n, k, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let q = self.apply(&omega).qr().q();
            // Γ is symmetric, so Γ*Q = conj(Γ·conj(Q)).
            let bh = conj_matrix(&self.apply(&conj_matrix(&q)));
            let svd = bh.svd(true, false);
            let u = svd.u.expect("left singular vectors requested");
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap_or(std::cmp::Ordering::Equal));
            let top = svd.singular_values[order[0]];
            let count = order.iter().filter(|&&i| svd.singular_values[i] > rel_tol * top).count();
            if count + 4 <= k || k == n {
                let keep = count.max(at_least).min(order.len());
                let sigma = order[..keep].iter().map(|&i| svd.singular_values[i]).collect();
                let vecs = CMatrix::from_fn(n, keep, |i, j| u[(i, order[j])]);
                return (sigma, vecs);
            }
            k = n.min(2 * k);
        }
    }
}

/// Largest deviation of a square matrix from the Hankel pattern fixed by its
/// first row and last column.
pub fn antidiagonal_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut residual: f64 = 0.0;
    for j in 0..n {
        for k in 0..m.ncols() {
            let s = j + k;
            let j0 = s.saturating_sub(n - 1);
            residual = residual.max((m[(j, k)] - m[(j0, s - j0)]).norm());
        }
    }
    residual
}

/// Symbol coefficients with the residual of the conjugated cross-computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSequence {
    pub gamma: Vec<C64>,
    /// `max_k |⟨q, (Σ*)^k p⟩ − ⟨(Σ̂*)^k p, q̂⟩|`.
    pub cross_residual: f64,
}

/// `γ_k = ⟨q, (Σ*)^k p⟩` for `k = 0..=last`.
pub fn gamma_sequence(b: &OperatorBundle, last: usize) -> GammaSequence {
    let mut x = b.p().clone();
    let mut y = b.p().clone();
    let mut gamma = Vec::with_capacity(last + 1);
    let mut cross_residual: f64 = 0.0;
    for k in 0..=last {
        let g = inner(b.q(), &x);
        let h = inner(&y, b.qhat());
        cross_residual = cross_residual.max((g - h).norm());
        gamma.push(g);
        if k < last {
            x = b.sigma_star() * x;
            y = b.sigma_hat_star() * y;
        }
    }
    GammaSequence { gamma, cross_residual }
}

/// How to pick the truncation size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Smallest `N ≥ dim + 2` with `‖(Σ*)^N p‖` below the tail tolerance,
    /// capped at [`MAX_AUTO_N`].
    Auto,
    /// Exactly this `N`, whatever the tail.
    Fixed(usize),
    /// This `N`, failing if the tail bound is not met.
    Certified(usize),
}

/// `‖(Σ*)^n p‖`.
pub fn tail_norm(b: &OperatorBundle, n: usize) -> f64 {
    let mut x = b.p().clone();
    for _ in 0..n {
        x = b.sigma_star() * x;
    }
    x.norm()
}

/// Resolves a [`Truncation`] to `(N, ‖(Σ*)^N p‖)`.
pub fn choose_truncation(b: &OperatorBundle, t: Truncation, tail_tol: f64) -> Result<(usize, f64)> {
    match t {
        Truncation::Fixed(0) | Truncation::Certified(0) => Err(Error::TruncationTooSmall { requested: 0, tail: f64::INFINITY }),
        Truncation::Fixed(n) => Ok((n, tail_norm(b, n))),
        Truncation::Certified(n) => {
            let tail = tail_norm(b, n);
            if tail > tail_tol {
                Err(Error::TruncationTooSmall { requested: n, tail })
            } else {
                Ok((n, tail))
            }
        }
        Truncation::Auto => {
            let floor = b.dim() + 2;
            let mut x = b.p().clone();
            for n in 1..=MAX_AUTO_N {
                x = b.sigma_star() * x;
                if n >= floor && x.norm() <= tail_tol {
                    return Ok((n, x.norm()));
                }
            }
            Ok((MAX_AUTO_N, x.norm()))
        }
    }
}

/// Output of the inverse map: the bundle, its truncated Hankel matrix and the
/// certified tail.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub bundle: OperatorBundle,
    pub hankel: HankelMatrix,
    pub tail: f64,
    pub cross_residual: f64,
}

pub fn synthesize(d: &CompactSpectralData, t: Truncation, tail_tol: f64) -> Result<Synthesis> {
    let bundle = assemble(d)?;
    synthesize_bundle(bundle, t, tail_tol)
}

pub fn synthesize_bundle(bundle: OperatorBundle, t: Truncation, tail_tol: f64) -> Result<Synthesis> {
    let (n, tail) = choose_truncation(&bundle, t, tail_tol)?;
    let g = gamma_sequence(&bundle, 2 * n - 2);
    let hankel = HankelMatrix::from_symbol(&g.gamma, n)?;
    Ok(Synthesis { bundle, hankel, tail, cross_residual: g.cross_residual })
}

/// Hankel matrix of the data at the requested truncation.
pub fn hankel_from_data(d: &CompactSpectralData, t: Truncation) -> Result<HankelMatrix> {
    Ok(synthesize(d, t, TAIL_TOL)?.hankel)
}

/// `‖Γ*Γ − (ΓS)*(ΓS) − uu*‖_F`. Small for genuine Hankel data up to the
/// truncation tail.
///
/// Uses the Hankel structure: off the last row and column the difference
/// telescopes to `−conj(γ_{i+N}) γ_{k+N}`, so only one product with `Γ` is
/// needed.
pub fn rank_one_identity_residual(h: &HankelMatrix) -> f64 {
    let n = h.size();
    let g = h.gamma();
    let tail: f64 = (0..n - 1).map(|i| g[i + n].norm_sqr()).sum();
    let mut total = tail * tail;
    // last column of Γ*Γ is Γ*(γ_{N−1}, …, γ_{2N−2}) = conj(Γ·conj(·))
    let last = CMatrix::from_fn(n, 1, |j, _| g[j + n - 1].conj());
    let col = conj_matrix(&h.apply(&last));
    for i in 0..n {
        let e = col[(i, 0)] - g[i].conj() * g[n - 1];
        total += if i + 1 == n { e.norm_sqr() } else { 2.0 * e.norm_sqr() };
    }
    total.sqrt()
}

/// The same residual for an arbitrary square matrix, with `u` its
/// conjugated first row. Large when the anti-diagonals are not constant.
pub fn rank_one_identity_residual_dense(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let g1 = CMatrix::from_fn(n, n, |j, k| if k + 1 < n { m[(j, k + 1)] } else { ZERO });
    let u = CVector::from_iterator(n, m.row(0).iter().map(|z| z.conj()));
    linalg::frobenius(&(m.adjoint() * m - g1.adjoint() * &g1 - &u * u.adjoint()))
}

/// `‖ΓS − S*Γ‖_F` over rows and columns `< N − 1` of a square matrix.
pub fn shift_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut total = 0.0;
    for j in 0..n.saturating_sub(1) {
        for k in 0..n.saturating_sub(1) {
            total += (m[(j, k + 1)] - m[(j + 1, k)]).norm_sqr();
        }
    }
    total.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub sigma_min: f64,
    pub numerical_rank: usize,
    /// `σ_min ≤ 1e−8`.
    pub nontrivial_kernel: bool,
}

/// Smallest singular value and rank of the truncation, from a dense SVD.
/// Needs `N ≥ n + 2`.
pub fn kernel_diagnostics(h: &HankelMatrix, n: usize) -> Result<KernelReport> {
    if h.size() < n + 2 {
        return Err(Error::Dimension(format!("truncation {} is smaller than rank {n} + 2", h.size())));
    }
    let s = h.singular_values();
    let sigma_min = s.last().copied().unwrap_or(0.0);
    let rank = match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > 1e-10 * top).count(),
        _ => 0,
    };
    Ok(KernelReport { sigma_min, numerical_rank: rank, nontrivial_kernel: sigma_min <= 1e-8 })
}

/// Numerical thresholds for [`forward_extract`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Use exactly this many singular values instead of thresholding.
    pub rank_hint: Option<usize>,
    /// Singular values above `rank_tol · σ₁` count.
    pub rank_tol: f64,
    /// Relative distance under which values merge into one level.
    pub merge_tol: f64,
    /// Relative distance above which values are distinct levels.
    pub gap_tol: f64,
    /// A level carries `u` if its weight exceeds `weight_tol · ‖u‖²`.
    pub weight_tol: f64,
    /// Eigenvalues of `|Γ₁|²` below `zero_tol · σ₁²` are zero.
    pub zero_tol: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { rank_hint: None, rank_tol: 1e-10, merge_tol: 1e-9, gap_tol: 1e-6, weight_tol: 1e-16, zero_tol: 1e-12 }
    }
}

/// Phase information recovered on one eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecovery {
    pub multiplicity: usize,
    /// `⟨Φv, v⟩` for the unit vector `v` along `u`; only for simple levels.
    pub phase: Option<C64>,
    /// Spectral measure of the restricted unitary at the normalized projection of `u`.
    pub measure: AtomicMeasure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardResiduals {
    /// Numerical rank used.
    pub rank: usize,
    /// `‖C·conj(C) − I‖_F` of the assembled conjugation.
    pub conjugation: f64,
    /// Largest `‖M*M − I‖_F` of the restricted unitaries.
    pub unitarity: f64,
    pub rank_one_identity: f64,
}

/// Spectral data recovered from a Hankel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardData {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// `‖P_{E(λ_k)} u‖²`.
    pub w: Vec<f64>,
    /// `‖P_{E₁(μ_k)} u‖²`.
    pub w1: Vec<f64>,
    pub lambda_levels: Vec<LevelRecovery>,
    /// `None` at `μ_n = 0`.
    pub mu_levels: Vec<Option<LevelRecovery>>,
    pub residuals: ForwardResiduals,
}

impl ForwardData {
    pub fn is_cyclic(&self) -> bool {
        self.lambda_levels.iter().all(|l| l.multiplicity == 1)
            && self.mu_levels.iter().flatten().all(|l| l.multiplicity == 1)
    }

    /// Packs the result as spectral data. Without a mode, cyclic data is
    /// produced exactly when every level is simple.
    pub fn to_spectral_data(&self, mode: Option<Mode>) -> Result<CompactSpectralData> {
        let s = validate_intertwining(&self.lambda, &self.mu)?;
        let mode = mode.unwrap_or(if self.is_cyclic() { Mode::Cyclic } else { Mode::Multiplicity });
        match mode {
            Mode::Cyclic => {
                let unit = |l: &LevelRecovery| -> Result<C64> {
                    let z = l.phase.ok_or_else(|| Error::InvalidLevelData("level with multiplicity has no scalar phase".into()))?;
                    Ok(z / z.norm())
                };
                let xi = self.lambda_levels.iter().map(unit).collect::<Result<Vec<_>>>()?;
                let eta = self.mu_levels.iter().map(|l| l.as_ref().map(unit).transpose()).collect::<Result<Vec<_>>>()?;
                CompactSpectralData::cyclic(s, xi, eta)
            }
            Mode::Multiplicity => CompactSpectralData::multiplicity(
                s,
                self.lambda_levels.iter().map(|l| l.measure.clone()).collect(),
                self.mu_levels.iter().map(|l| l.as_ref().map(|l| l.measure.clone())).collect(),
            ),
        }
    }
}

struct Level {
    value: f64,
    cols: CMatrix,
    weight: f64,
}

// Spectral measure of the unitary `m` (in an orthonormal frame whose first
// vector is the reference vector) at that first vector.
fn level_measure(m: &CMatrix) -> Result<(AtomicMeasure, Option<C64>, f64)> {
    let k = m.nrows();
    let unitarity = linalg::frobenius(&(m.adjoint() * m - CMatrix::identity(k, k)));
    let (vals, vecs) = linalg::normal_eigen(m)?;
    let atoms: Vec<Atom> = vals
        .iter()
        .enumerate()
        .map(|(j, z)| Atom { point: z / z.norm(), weight: vecs[(0, j)].norm_sqr() })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    let atoms = atoms.into_iter().map(|a| Atom { weight: a.weight / total, ..a }).collect();
    let measure = AtomicMeasure::new(atoms, true, true)?;
    let phase = if k == 1 { Some(m[(0, 0)]) } else { None };
    Ok((measure, phase, unitarity))
}

fn unit_projection(cols: &CMatrix, u: &CVector) -> CVector {
    let v = cols * (cols.adjoint() * u);
    let nv = v.norm();
    v / c(nv)
}

/// Recovers `(λ, μ, weights, phases or per-level measures)` from a
/// (numerically) Hankel matrix whose rank is below its size.
pub fn forward_extract(h: &HankelMatrix, opts: &ExtractOptions) -> Result<ForwardData> {
    let size = h.size();
    if let Some(r) = opts.rank_hint {
        if r == 0 || r >= size {
            return Err(Error::Dimension(format!("rank hint {r} outside 1..{size}")));
        }
    }
    let (sigma_all, vecs) = h.leading_svd(opts.rank_tol, opts.rank_hint.unwrap_or(1));
    let top = sigma_all[0];
    if top == 0.0 {
        return Err(Error::InconsistentSpectrum("zero matrix".into()));
    }
    let d = opts.rank_hint.unwrap_or_else(|| sigma_all.iter().filter(|&&s| s > opts.rank_tol * top).count());
    if d >= size {
        return Err(Error::Dimension(format!("numerical rank {d} leaves no kernel in a {size}x{size} truncation")));
    }
    let sigma: Vec<f64> = sigma_all[..d].to_vec();
    let vr = vecs.columns(0, d).into_owned();

    let u = h.u();
    let u_c = vr.adjoint() * &u;
    let u_norm2 = u_c.norm_squared();
    let gv = h.apply(&vr);
    let t = vr.adjoint() * conj_matrix(&gv);
    // S*Γ: rows shifted up, last row zero
    let g1v = CMatrix::from_fn(size, d, |i, j| if i + 1 < size { gv[(i + 1, j)] } else { ZERO });
    let t1 = vr.adjoint() * conj_matrix(&g1v);
    let h1c = g1v.adjoint() * &g1v;

    // Levels of |Γ|: coordinate clusters of σ.
    let id = CMatrix::identity(d, d);
    let mut lambda_levels = Vec::new();
    let mut k1_count = 0;
    for r in linalg::cluster_decreasing(&sigma, top, opts.merge_tol, opts.gap_tol)? {
        let cols = id.columns(r.start, r.len()).into_owned();
        let weight = (cols.adjoint() * &u_c).norm_squared();
        let value = sigma[r.clone()].iter().sum::<f64>() / r.len() as f64;
        if weight > opts.weight_tol * u_norm2 {
            lambda_levels.push(Level { value, cols, weight });
        } else {
            k1_count += r.len();
        }
    }

    // Levels of |Γ₁| restricted to (ker Γ)^⊥.
    let (ev, evecs) = linalg::hermitian_eigh(&h1c);
    let zero = opts.zero_tol * top * top;
    let mu_vals: Vec<f64> = ev.iter().map(|&e| if e <= zero { 0.0 } else { e.sqrt() }).collect();
    let mut mu_levels = Vec::new();
    let mut k_count = 0;
    for r in linalg::cluster_decreasing(&mu_vals, top, opts.merge_tol, opts.gap_tol)? {
        let cols = evecs.columns(r.start, r.len()).into_owned();
        let weight = (cols.adjoint() * &u_c).norm_squared();
        let value = mu_vals[r.clone()].iter().sum::<f64>() / r.len() as f64;
        if weight > opts.weight_tol * u_norm2 {
            mu_levels.push(Level { value, cols, weight });
        } else if value > 0.0 {
            k_count += r.len();
        } else {
            return Err(Error::InconsistentSpectrum("kernel of |Γ₁| not generated by u".into()));
        }
    }
    let n = lambda_levels.len();
    if mu_levels.len() != n {
        return Err(Error::InconsistentSpectrum(format!("{} λ-levels but {} μ-levels", n, mu_levels.len())));
    }
    let lambda: Vec<f64> = lambda_levels.iter().map(|l| l.value).collect();
    let mu: Vec<f64> = mu_levels.iter().map(|l| l.value).collect();
    validate_intertwining(&lambda, &mu).map_err(|e| Error::InconsistentSpectrum(format!("recovered spectra: {e}")))?;
    let k_expected: usize = lambda_levels.iter().map(|l| l.cols.ncols() - 1).sum();
    let k1_expected: usize = mu_levels.iter().map(|l| l.cols.ncols() - 1).sum();
    if k_count != k_expected || k1_count != k1_expected {
        return Err(Error::InconsistentSpectrum("eigenspace dimensions do not match the level structure".into()));
    }

    // 𝔍ᵤ: fixes each P_k u on 𝓗₀, the conjugation of Γ₁ on 𝓚 and that of Γ on 𝓚₁.
    // On 𝓗₀ the conjugation fixes every P_k u, so it is Σ û_k û_kᵀ.
    let mut cmat = CMatrix::zeros(d, d);
    for l in &lambda_levels {
        let uhat = unit_projection(&l.cols, &u_c);
        cmat += &uhat * uhat.transpose();
    }
    let mut frames_lambda = Vec::with_capacity(n);
    for l in &lambda_levels {
        let uhat = unit_projection(&l.cols, &u_c);
        let frame = linalg::complete_basis(&uhat, &l.cols);
        if frame.ncols() > 1 {
            let y = frame.columns(1, frame.ncols() - 1).into_owned();
            let m = y.adjoint() * &t1 * conj_matrix(&y) / c(l.value);
            cmat += &y * m * y.transpose();
        }
        frames_lambda.push(frame);
    }
    let mut frames_mu = Vec::with_capacity(n);
    for l in &mu_levels {
        let uhat = unit_projection(&l.cols, &u_c);
        let frame = linalg::complete_basis(&uhat, &l.cols);
        if frame.ncols() > 1 && l.value > 0.0 {
            let z = frame.columns(1, frame.ncols() - 1).into_owned();
            let m = z.adjoint() * &t * conj_matrix(&z) / c(l.value);
            cmat += &z * m * z.transpose();
        }
        frames_mu.push(frame);
    }
    let conjugation = linalg::frobenius(&(&cmat * conj_matrix(&cmat) - &id));

    let inv_sigma = linalg::diag_real(&sigma.iter().map(|s| 1.0 / s).collect::<Vec<_>>());
    let phi = &t * inv_sigma * conj_matrix(&cmat);
    let g1_pinv = linalg::psd_function(&h1c, f64::INFINITY, |x| if x <= zero { 0.0 } else { 1.0 / x.sqrt() })?;
    let phi1 = &t1 * conj_matrix(&g1_pinv) * conj_matrix(&cmat);

    let mut unitarity: f64 = 0.0;
    let mut out_lambda = Vec::with_capacity(n);
    for f in &frames_lambda {
        let (measure, phase, defect) = level_measure(&(f.adjoint() * &phi * f))?;
        unitarity = unitarity.max(defect);
        out_lambda.push(LevelRecovery { multiplicity: f.ncols(), phase, measure });
    }
    let mut out_mu = Vec::with_capacity(n);
    for (l, f) in mu_levels.iter().zip(&frames_mu) {
        if l.value == 0.0 {
            out_mu.push(None);
            continue;
        }
        let (measure, phase, defect) = level_measure(&(f.adjoint() * &phi1 * f))?;
        unitarity = unitarity.max(defect);
        out_mu.push(Some(LevelRecovery { multiplicity: f.ncols(), phase, measure }));
    }

    Ok(ForwardData {
        lambda,
        mu,
        w: lambda_levels.iter().map(|l| l.weight).collect(),
        w1: mu_levels.iter().map(|l| l.weight).collect(),
        lambda_levels: out_lambda,
        mu_levels: out_mu,
        residuals: ForwardResiduals { rank: d, conjugation, unitarity, rank_one_identity: rank_one_identity_residual(h) },
    })
}

/// Worst deviations between spectral data and what [`forward_extract`]
/// recovered from its Hankel matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoundTripErrors {
    /// Largest `|λ̃ − λ|/λ`.
    pub lambda: f64,
    /// Largest `|μ̃ − μ|/μ`, absolute where `μ = 0`.
    pub mu: f64,
    /// Largest deviation of `w_k` from the Borg weights.
    pub weights: f64,
    /// Largest atom-wise deviation (point or weight) of the per-level
    /// measures, scalar phases being point masses.
    pub phases: f64,
}

impl RoundTripErrors {
    pub fn max(&self) -> f64 {
        self.lambda.max(self.mu).max(self.weights).max(self.phases)
    }
}

/// Atom-wise distance after matching every atom of `a` to the nearest atom
/// of `b`. Infinite when the supports differ in size.
pub fn measure_distance(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a.atoms() {
        let pick = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (b.atoms()[i].point - x.point).norm().total_cmp(&(b.atoms()[j].point - x.point).norm()));
        let Some(j) = pick else { return f64::INFINITY };
        used[j] = true;
        let y = &b.atoms()[j];
        worst = worst.max((x.point - y.point).norm()).max((x.weight - y.weight).abs());
    }
    worst
}

pub fn roundtrip_errors(d: &CompactSpectralData, f: &ForwardData) -> Result<RoundTripErrors> {
    let s = d.spectrum();
    if f.lambda.len() != s.len() {
        return Err(Error::InconsistentSpectrum(format!("recovered {} levels, expected {}", f.lambda.len(), s.len())));
    }
    let rel = |x: f64, y: f64| if y == 0.0 { x.abs() } else { (x - y).abs() / y };
    let lambda = f.lambda.iter().zip(s.lambda()).map(|(&x, &y)| rel(x, y)).fold(0.0, f64::max);
    let mu = f.mu.iter().zip(s.mu()).map(|(&x, &y)| rel(x, y)).fold(0.0, f64::max);
    let a = borg_weights(s)?;
    let weights = f.w.iter().zip(a.atoms()).map(|(&x, y)| (x - y.weight).abs()).fold(0.0, f64::max);
    let mut phases: f64 = 0.0;
    if let PhaseData::Multiplicity { rho, rho1 } = d.to_multiplicity().phases() {
        for (k, m) in rho.iter().enumerate() {
            phases = phases.max(measure_distance(m, &f.lambda_levels[k].measure));
        }
        for (k, m) in rho1.iter().enumerate() {
            phases = phases.max(match (m, &f.mu_levels[k]) {
                (Some(m), Some(l)) => measure_distance(m, &l.measure),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            });
        }
    }
    Ok(RoundTripErrors { lambda, mu, weights, phases })
}
