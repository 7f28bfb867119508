//! Validated spectral data: interlacing singular values, atomic measures and
//! per-level phase data, together with the Borg weight formula and the
//! rational function `Φ` that ties the two spectra together.

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Relative gap below which two squared spectral values count as equal.
pub const DISTINCT_TOL: f64 = 1e-12;
/// Tolerance for measure flags (total mass, unimodularity) and atom distinctness.
pub const MEASURE_TOL: f64 = 1e-10;

/// Two strictly interlacing sequences `λ₁ > μ₁ > λ₂ > … > λ_n > μ_n ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinedSpectrum {
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

impl IntertwinedSpectrum {
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// True when the last `μ` is zero, i.e. `R₁` has a kernel.
    pub fn has_zero_mu(&self) -> bool {
        self.mu.last() == Some(&0.0)
    }

    /// Scale used for all relative tolerances: `max(λ₁², 1)`.
    pub fn scale(&self) -> f64 {
        (self.lambda[0] * self.lambda[0]).max(1.0)
    }
}

/// Checks the interlacing chain and returns the validated spectrum.
///
/// Violations are attributed to the index `k` of the first broken link in
/// `λ_k > μ_k > λ_{k+1}`.
pub fn validate_intertwining(lambda: &[f64], mu: &[f64]) -> Result<IntertwinedSpectrum> {
    validate_intertwining_tol(lambda, mu, DISTINCT_TOL)
}

/// As [`validate_intertwining`], with squared values closer than
/// `rel_tol · max(λ₁², 1)` rejected as degenerate.
pub fn validate_intertwining_tol(lambda: &[f64], mu: &[f64], rel_tol: f64) -> Result<IntertwinedSpectrum> {
    if lambda.is_empty() || mu.is_empty() {
        return Err(Error::EmptyInput);
    }
    if lambda.len() != mu.len() {
        return Err(Error::LengthMismatch { left: lambda.len(), right: mu.len() });
    }
    let n = lambda.len();
    for k in 0..n {
        if !lambda[k].is_finite() || !mu[k].is_finite() {
            return Err(Error::NonFinite(k));
        }
        if lambda[k] < 0.0 || mu[k] < 0.0 {
            return Err(Error::NegativeEntry(k));
        }
    }
    for k in 0..n {
        if !(lambda[k] > mu[k]) {
            return Err(Error::NonInterlacing(k));
        }
        if k + 1 < n && !(mu[k] > lambda[k + 1]) {
            return Err(Error::NonInterlacing(k));
        }
    }
    let tol = rel_tol * (lambda[0] * lambda[0]).max(1.0);
    for k in 0..n {
        let l2 = lambda[k] * lambda[k];
        let m2 = mu[k] * mu[k];
        if l2 - m2 < tol {
            return Err(Error::DegenerateSpectrum(k));
        }
        if k + 1 < n && m2 - lambda[k + 1] * lambda[k + 1] < tol {
            return Err(Error::DegenerateSpectrum(k));
        }
    }
    Ok(IntertwinedSpectrum { lambda: lambda.to_vec(), mu: mu.to_vec() })
}

/// One support point of an [`AtomicMeasure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: C64,
    pub weight: f64,
}

/// Finitely supported nonnegative measure.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    probability: bool,
    circle: bool,
}

impl AtomicMeasure {
    /// Builds a measure with strictly positive weights and distinct points,
    /// checking the requested flags.
    pub fn new(atoms: Vec<Atom>, probability: bool, circle: bool) -> Result<Self> {
        Self::build(atoms, probability, circle, false)
    }

    /// Like [`AtomicMeasure::new`] but admits zero weights. Such measures
    /// violate *-cyclicity and exist to exercise negative controls.
    pub fn relaxed(atoms: Vec<Atom>, probability: bool, circle: bool) -> Result<Self> {
        Self::build(atoms, probability, circle, true)
    }

    /// A circle probability measure from `(point, weight)` pairs.
    pub fn circle(pairs: &[(C64, f64)]) -> Result<Self> {
        let atoms = pairs.iter().map(|&(point, weight)| Atom { point, weight }).collect();
        Self::new(atoms, true, true)
    }

    /// `δ_1`.
    pub fn unit() -> Self {
        AtomicMeasure { atoms: vec![Atom { point: C64::new(1.0, 0.0), weight: 1.0 }], probability: true, circle: true }
    }

    fn build(atoms: Vec<Atom>, probability: bool, circle: bool, allow_zero: bool) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, a) in atoms.iter().enumerate() {
            if !a.point.re.is_finite() || !a.point.im.is_finite() || !a.weight.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if a.weight < 0.0 || (a.weight == 0.0 && !allow_zero) {
                return Err(Error::InvalidMeasure(format!("atom {i} has non-positive weight {}", a.weight)));
            }
            if circle && (a.point.norm() - 1.0).abs() > MEASURE_TOL {
                return Err(Error::InvalidMeasure(format!("atom {i} is off the unit circle")));
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if (atoms[i].point - atoms[j].point).norm() <= MEASURE_TOL {
                    return Err(Error::DegenerateMeasure(i, j));
                }
            }
        }
        if probability {
            let total: f64 = atoms.iter().map(|a| a.weight).sum();
            if (total - 1.0).abs() > MEASURE_TOL {
                return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
            }
        }
        Ok(AtomicMeasure { atoms, probability, circle })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn is_circle(&self) -> bool {
        self.circle
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Atoms sorted by argument in `[0, 2π)`, the canonical order for
    /// comparing circle measures.
    pub fn sorted_by_angle(&self) -> Vec<Atom> {
        let mut v = self.atoms.clone();
        let key = |z: C64| {
            let t = z.im.atan2(z.re);
            if t < -1e-14 { t + std::f64::consts::TAU } else { t.max(0.0) }
        };
        v.sort_by(|a, b| key(a.point).partial_cmp(&key(b.point)).unwrap_or(std::cmp::Ordering::Equal));
        v
    }
}

/// Phase data at every level of a [`CompactSpectralData`].
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseData {
    /// Unimodular `ξ_k`, and `η_k` for every `μ_k > 0` (`None` at `μ_n = 0`).
    Cyclic { xi: Vec<C64>, eta: Vec<Option<C64>> },
    /// Circle probability measures `ρ_k` and `ρ¹_k` (`None` at `μ_n = 0`).
    Multiplicity { rho: Vec<AtomicMeasure>, rho1: Vec<Option<AtomicMeasure>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cyclic,
    Multiplicity,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cyclic => "cyclic",
            Mode::Multiplicity => "multiplicity",
        }
    }
}

/// Interlacing spectrum together with per-level phase data.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSpectralData {
    spectrum: IntertwinedSpectrum,
    phases: PhaseData,
}

impl CompactSpectralData {
    pub fn cyclic(spectrum: IntertwinedSpectrum, xi: Vec<C64>, eta: Vec<Option<C64>>) -> Result<Self> {
        let n = spectrum.len();
        if xi.len() != n {
            return Err(Error::LengthMismatch { left: xi.len(), right: n });
        }
        if eta.len() != n {
            return Err(Error::LengthMismatch { left: eta.len(), right: n });
        }
        for (k, z) in xi.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > MEASURE_TOL {
                return Err(Error::NonUnimodularPhase(k));
            }
        }
        for (k, e) in eta.iter().enumerate() {
            let zero_mu = spectrum.mu[k] == 0.0;
            match (e, zero_mu) {
                (Some(z), false) => {
                    if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > MEASURE_TOL {
                        return Err(Error::NonUnimodularPhase(k));
                    }
                }
                (None, true) => {}
                (Some(_), true) => {
                    return Err(Error::InvalidLevelData(format!("eta given at level {k} where mu is zero")));
                }
                (None, false) => {
                    return Err(Error::InvalidLevelData(format!("eta missing at level {k}")));
                }
            }
        }
        Ok(CompactSpectralData { spectrum, phases: PhaseData::Cyclic { xi, eta } })
    }

    pub fn multiplicity(spectrum: IntertwinedSpectrum, rho: Vec<AtomicMeasure>, rho1: Vec<Option<AtomicMeasure>>) -> Result<Self> {
        Self::multiplicity_inner(spectrum, rho, rho1, false)
    }

    /// Accepts measures built with [`AtomicMeasure::relaxed`].
    pub fn multiplicity_relaxed(spectrum: IntertwinedSpectrum, rho: Vec<AtomicMeasure>, rho1: Vec<Option<AtomicMeasure>>) -> Result<Self> {
        Self::multiplicity_inner(spectrum, rho, rho1, true)
    }

    fn multiplicity_inner(
        spectrum: IntertwinedSpectrum,
        rho: Vec<AtomicMeasure>,
        rho1: Vec<Option<AtomicMeasure>>,
        relaxed: bool,
    ) -> Result<Self> {
        let n = spectrum.len();
        if rho.len() != n {
            return Err(Error::LengthMismatch { left: rho.len(), right: n });
        }
        if rho1.len() != n {
            return Err(Error::LengthMismatch { left: rho1.len(), right: n });
        }
        let check = |m: &AtomicMeasure, k: usize, which: &'static str| -> Result<()> {
            if !m.is_circle() || !m.is_probability() {
                return Err(Error::InvalidLevelData(format!("{which} at level {k} is not a circle probability measure")));
            }
            if !relaxed && m.atoms().iter().any(|a| a.weight <= 0.0) {
                return Err(Error::SupportNotCyclic { level: k, which });
            }
            Ok(())
        };
        for k in 0..n {
            check(&rho[k], k, "rho")?;
            match (&rho1[k], spectrum.mu[k] == 0.0) {
                (Some(m), false) => check(m, k, "rho1")?,
                (None, true) => {}
                (Some(_), true) => {
                    return Err(Error::InvalidLevelData(format!("rho1 given at level {k} where mu is zero")));
                }
                (None, false) => return Err(Error::InvalidLevelData(format!("rho1 missing at level {k}"))),
            }
        }
        Ok(CompactSpectralData { spectrum, phases: PhaseData::Multiplicity { rho, rho1 } })
    }

    pub fn spectrum(&self) -> &IntertwinedSpectrum {
        &self.spectrum
    }

    pub fn phases(&self) -> &PhaseData {
        &self.phases
    }

    pub fn mode(&self) -> Mode {
        match self.phases {
            PhaseData::Cyclic { .. } => Mode::Cyclic,
            PhaseData::Multiplicity { .. } => Mode::Multiplicity,
        }
    }

    /// The same data expressed with per-level measures (`δ_ξ`, `δ_η`).
    pub fn to_multiplicity(&self) -> CompactSpectralData {
        match &self.phases {
            PhaseData::Multiplicity { .. } => self.clone(),
            PhaseData::Cyclic { xi, eta } => {
                let delta = |z: C64| AtomicMeasure { atoms: vec![Atom { point: z, weight: 1.0 }], probability: true, circle: true };
                CompactSpectralData {
                    spectrum: self.spectrum.clone(),
                    phases: PhaseData::Multiplicity {
                        rho: xi.iter().map(|&z| delta(z)).collect(),
                        rho1: eta.iter().map(|e| e.map(delta)).collect(),
                    },
                }
            }
        }
    }
}

// log|x| bounds of finite, normal doubles
const LOG_MAX: f64 = 709.0;
const LOG_MIN: f64 = -708.0;

fn product_weight(lead: f64, numer: impl Iterator<Item = f64>, denom: impl Iterator<Item = f64>, index: usize) -> Result<f64> {
    let mut log = lead.abs().ln();
    let mut sign = lead.signum();
    for x in numer {
        log += x.abs().ln();
        sign *= x.signum();
    }
    for x in denom {
        log -= x.abs().ln();
        sign *= x.signum();
    }
    if log > LOG_MAX {
        return Err(Error::Overflow(index));
    }
    if log < LOG_MIN {
        return Err(Error::Underflow(index));
    }
    Ok(sign * log.exp())
}

/// Masses `a_n` of the spectral measure of `R²` at `p`, placed at `λ_n²`.
///
/// `a_n = (λ_n² − μ_n²) ∏_{k≠n} (λ_n² − μ_k²)/(λ_n² − λ_k²)`; every factor
/// is positive under interlacing.
pub fn borg_weights(s: &IntertwinedSpectrum) -> Result<AtomicMeasure> {
    let l2: Vec<f64> = s.lambda.iter().map(|x| x * x).collect();
    let m2: Vec<f64> = s.mu.iter().map(|x| x * x).collect();
    let n = l2.len();
    let mut atoms = Vec::with_capacity(n);
    for i in 0..n {
        let a = product_weight(
            l2[i] - m2[i],
            (0..n).filter(|&k| k != i).map(|k| l2[i] - m2[k]),
            (0..n).filter(|&k| k != i).map(|k| l2[i] - l2[k]),
            i,
        )?;
        atoms.push(Atom { point: C64::new(l2[i], 0.0), weight: a });
    }
    Ok(AtomicMeasure { atoms, probability: false, circle: false })
}

/// Masses of the spectral measure of `R₁²` at `p`, placed at `μ_m²`.
///
/// This is the measure whose Cauchy transform is `F/(1 − F)`:
/// `b_m = (λ_m² − μ_m²) ∏_{k≠m} (μ_m² − λ_k²)/(μ_m² − μ_k²)`.
pub fn perturbed_weights(s: &IntertwinedSpectrum) -> Result<AtomicMeasure> {
    let l2: Vec<f64> = s.lambda.iter().map(|x| x * x).collect();
    let m2: Vec<f64> = s.mu.iter().map(|x| x * x).collect();
    let n = l2.len();
    let mut atoms = Vec::with_capacity(n);
    for i in 0..n {
        let b = product_weight(
            l2[i] - m2[i],
            (0..n).filter(|&k| k != i).map(|k| m2[i] - l2[k]),
            (0..n).filter(|&k| k != i).map(|k| m2[i] - m2[k]),
            i,
        )?;
        atoms.push(Atom { point: C64::new(m2[i], 0.0), weight: b });
    }
    Ok(AtomicMeasure { atoms, probability: false, circle: false })
}

/// Partial sums reported for data that may be a truncation of an infinite
/// sequence. None of these decide convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDiagnostics {
    /// `Σ (λ_k²/μ_k² − 1)` over the levels with `μ_k > 0`.
    pub sum_lambda_over_mu: f64,
    /// True when some `μ_k = 0`, so the series above has an infinite term.
    pub lambda_over_mu_diverges: bool,
    /// `Σ_{k<n} (μ_k²/λ_{k+1}² − 1)`.
    pub sum_mu_over_next_lambda: f64,
    /// `∏ μ_k²/λ_k²`, equal to `1 − ‖R^{-1}p‖²`.
    pub mu_lambda_product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelConditions {
    pub norm_is_one: bool,
    pub q_not_in_ran_r: bool,
    pub trivial_kernel: bool,
    pub diagnostics: KernelDiagnostics,
}

/// Finite-rank kernel predicates. `‖q‖ = 1` exactly when `μ_n = 0`; `q` is
/// always in the range of `R` at finite rank, so the kernel is never trivial.
pub fn kernel_conditions(s: &IntertwinedSpectrum) -> KernelConditions {
    let n = s.len();
    let norm_is_one = s.has_zero_mu();
    let mut sum_lm = 0.0;
    let mut diverges = false;
    let mut prod = 1.0;
    for k in 0..n {
        let (l2, m2) = (s.lambda[k] * s.lambda[k], s.mu[k] * s.mu[k]);
        if m2 > 0.0 {
            sum_lm += l2 / m2 - 1.0;
        } else {
            diverges = true;
        }
        prod *= m2 / l2;
    }
    let sum_ml = (0..n.saturating_sub(1))
        .map(|k| (s.mu[k] * s.mu[k]) / (s.lambda[k + 1] * s.lambda[k + 1]) - 1.0)
        .sum();
    let q_not_in_ran_r = false;
    KernelConditions {
        norm_is_one,
        q_not_in_ran_r,
        trivial_kernel: norm_is_one && q_not_in_ran_r,
        diagnostics: KernelDiagnostics {
            sum_lambda_over_mu: sum_lm,
            lambda_over_mu_diverges: diverges,
            sum_mu_over_next_lambda: sum_ml,
            mu_lambda_product: prod,
        },
    }
}

/// `Φ(z) = ∏ (z − μ_k²)/(z − λ_k²)` with the default pole tolerance.
pub fn phi_product_eval(s: &IntertwinedSpectrum, z: C64) -> Result<C64> {
    phi_product_eval_tol(s, z, DISTINCT_TOL)
}

/// `Φ(z)`, rejecting `z` within `tol · max(λ₁², 1)` of a pole `λ_k²`.
pub fn phi_product_eval_tol(s: &IntertwinedSpectrum, z: C64, tol: f64) -> Result<C64> {
    let eps = tol * s.scale();
    let mut acc = C64::new(1.0, 0.0);
    for k in 0..s.len() {
        let pole = s.lambda[k] * s.lambda[k];
        let d = z - pole;
        if d.norm() < eps {
            return Err(Error::PoleProximity(k));
        }
        acc *= (z - s.mu[k] * s.mu[k]) / d;
    }
    Ok(acc)
}

/// `F(z) = Σ w_k/(s_k − z)` with the default pole tolerance.
pub fn cauchy_transform_eval(rho: &AtomicMeasure, z: C64) -> Result<C64> {
    cauchy_transform_eval_tol(rho, z, DISTINCT_TOL)
}

/// `F(z)`, rejecting `z` within `tol · max(max|s_k|, 1)` of an atom.
pub fn cauchy_transform_eval_tol(rho: &AtomicMeasure, z: C64, tol: f64) -> Result<C64> {
    let scale = rho.atoms.iter().map(|a| a.point.norm()).fold(1.0, f64::max);
    let mut acc = C64::new(0.0, 0.0);
    for (k, a) in rho.atoms.iter().enumerate() {
        let d = a.point - z;
        if d.norm() < tol * scale {
            return Err(Error::PoleProximity(k));
        }
        acc += a.weight / d;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn spec(l: &[f64], m: &[f64]) -> IntertwinedSpectrum {
        validate_intertwining(l, m).unwrap()
    }

    // Eigenvalues of diag(λ²) − √a√aᵀ, sorted decreasing.
    fn rank_one_eigs(s: &IntertwinedSpectrum, a: &[f64]) -> Vec<f64> {
        let n = s.len();
        let w = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { s.lambda()[i].powi(2) } else { 0.0 };
            d - a[i].sqrt() * a[j].sqrt()
        });
        let mut e: Vec<f64> = SymmetricEigen::new(w).eigenvalues.iter().cloned().collect();
        e.sort_by(|x, y| y.partial_cmp(x).unwrap());
        e
    }

    #[test]
    fn validation_examples() {
        assert!(validate_intertwining(&[1.0], &[0.0]).is_ok());
        assert!(validate_intertwining(&[2.0, 1.0], &[2f64.sqrt(), 0.0]).is_ok());
        assert_eq!(validate_intertwining(&[1.0, 2.0], &[0.5, 0.1]), Err(Error::NonInterlacing(0)));
        assert_eq!(validate_intertwining(&[], &[]), Err(Error::EmptyInput));
        assert_eq!(validate_intertwining(&[1.0, 0.5], &[-0.1, 0.2]), Err(Error::NegativeEntry(0)));
        assert_eq!(validate_intertwining(&[3.0, 2.0, 1.0], &[2.5, 1.5, 0.0]).map(|s| s.len()), Ok(3));
        // μ₂ pushed above λ₂
        assert_eq!(validate_intertwining(&[3.0, 2.0, 1.0], &[2.5, 2.1, 0.0]), Err(Error::NonInterlacing(1)));
        assert_eq!(validate_intertwining(&[1.0, 0.5], &[0.0, 0.1]), Err(Error::NonInterlacing(0)));
    }

    #[test]
    fn borg_two_level_example() {
        let s = spec(&[2.0, 1.0], &[2f64.sqrt(), 0.0]);
        let a: Vec<f64> = borg_weights(&s).unwrap().atoms().iter().map(|x| x.weight).collect();
        assert!((a[0] - 8.0 / 3.0).abs() < 1e-14);
        assert!((a[1] - 1.0 / 3.0).abs() < 1e-14);
        let e = rank_one_eigs(&s, &a);
        assert!((e[0] - 2.0).abs() < 1e-13 && e[1].abs() < 1e-13);
    }

    #[test]
    fn borg_rank_one_is_trace() {
        let s = spec(&[1.0], &[0.0]);
        assert_eq!(borg_weights(&s).unwrap().atoms()[0].weight, 1.0);
        let s = spec(&[1.0], &[0.5]);
        assert!((borg_weights(&s).unwrap().atoms()[0].weight - 0.75).abs() < 1e-15);
    }

    #[test]
    fn perturbed_weights_match_residue_of_f1() {
        // F/(1−F) = 1/Φ − 1; its residue at μ_m² is −b_m, and 1/Φ has a simple
        // pole there, so b_m = −1/Φ'(μ_m²).
        let s = spec(&[3.0, 2.0, 1.2], &[2.6, 1.5, 0.4]);
        let b = perturbed_weights(&s).unwrap();
        for (m, atom) in b.atoms().iter().enumerate() {
            let x = s.mu()[m].powi(2);
            let h = 1e-6;
            let fp = phi_product_eval(&s, C64::new(x + h, 0.0)).unwrap();
            let fm = phi_product_eval(&s, C64::new(x - h, 0.0)).unwrap();
            let deriv = (fp - fm).re / (2.0 * h);
            let oracle = -1.0 / deriv;
            assert!((atom.weight - oracle).abs() < 1e-6 * oracle.abs(), "{} vs {}", atom.weight, oracle);
            assert!(atom.weight > 0.0);
        }
        let sa: f64 = borg_weights(&s).unwrap().total_mass();
        assert!((b.total_mass() - sa).abs() < 1e-12 * sa);
    }

    #[test]
    fn kernel_flag_examples() {
        let k = kernel_conditions(&spec(&[2.0, 1.0], &[2f64.sqrt(), 0.0]));
        assert_eq!((k.norm_is_one, k.q_not_in_ran_r, k.trivial_kernel), (true, false, false));
        assert!(k.diagnostics.lambda_over_mu_diverges);
        let k = kernel_conditions(&spec(&[2.0, 1.0], &[2f64.sqrt(), 0.5]));
        assert_eq!((k.norm_is_one, k.q_not_in_ran_r, k.trivial_kernel), (false, false, false));
        assert!((k.diagnostics.sum_lambda_over_mu - (1.0 + 3.0)).abs() < 1e-12);
        assert!((k.diagnostics.sum_mu_over_next_lambda - 1.0).abs() < 1e-12);
        let k = kernel_conditions(&spec(&[1.0], &[0.0]));
        assert_eq!((k.norm_is_one, k.q_not_in_ran_r, k.trivial_kernel), (true, false, false));
    }

    #[test]
    fn phi_examples() {
        let s = spec(&[1.0], &[0.0]);
        assert!((phi_product_eval(&s, C64::new(-1.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        let s2 = spec(&[2.0, 1.0], &[2f64.sqrt(), 0.0]);
        assert!(phi_product_eval(&s2, C64::new(-1e-300, 0.0)).unwrap().norm() < 1e-290);
        assert_eq!(phi_product_eval(&s2, C64::new(4.0, 0.0)), Err(Error::PoleProximity(0)));
        let s3 = spec(&[2.0, 1.0], &[2f64.sqrt(), 0.5]);
        for z in [C64::new(0.3, 0.1), C64::new(-5.0, 2.0), C64::new(3.0, 1e-3)] {
            assert!(phi_product_eval(&s3, z).unwrap().im < 0.0);
        }
    }

    #[test]
    fn cauchy_examples() {
        let delta = AtomicMeasure::new(vec![Atom { point: C64::new(1.0, 0.0), weight: 1.0 }], false, false).unwrap();
        assert!((cauchy_transform_eval(&delta, C64::new(-1.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        let s = spec(&[2.0, 1.0], &[2f64.sqrt(), 0.0]);
        let rho = borg_weights(&s).unwrap();
        assert!((cauchy_transform_eval(&rho, C64::new(2.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        let z = C64::new(-1e11, 0.0);
        let lead = cauchy_transform_eval(&rho, z).unwrap() * (-z);
        assert!((lead.re - 3.0).abs() < 1e-9);
    }

    #[test]
    fn measure_validation() {
        let one = C64::new(1.0, 0.0);
        assert!(matches!(AtomicMeasure::circle(&[(one, 0.5), (one, 0.5)]), Err(Error::DegenerateMeasure(0, 1))));
        assert!(AtomicMeasure::circle(&[(one, 0.7)]).is_err());
        assert!(AtomicMeasure::circle(&[(C64::new(1.1, 0.0), 1.0)]).is_err());
        assert!(AtomicMeasure::circle(&[(one, 1.0), (-one, 0.0)]).is_err());
        assert!(AtomicMeasure::relaxed(vec![Atom { point: one, weight: 1.0 }, Atom { point: -one, weight: 0.0 }], true, true).is_ok());
    }

    #[test]
    fn cyclic_data_checks_eta_layout() {
        let s = spec(&[2.0, 1.0], &[2f64.sqrt(), 0.0]);
        let one = C64::new(1.0, 0.0);
        assert!(CompactSpectralData::cyclic(s.clone(), vec![one, one], vec![Some(one), None]).is_ok());
        assert!(CompactSpectralData::cyclic(s.clone(), vec![one, one], vec![Some(one), Some(one)]).is_err());
        assert_eq!(
            CompactSpectralData::cyclic(s, vec![one, one * 2.0], vec![Some(one), None]),
            Err(Error::NonUnimodularPhase(1))
        );
    }
}
