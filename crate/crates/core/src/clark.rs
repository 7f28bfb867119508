//! Finite Blaschke products vanishing at the origin and their Clark
//! measures, the finitely supported circle probability measures `ρ` with
//!
//! ```text
//! (1 + θ(z)) / (1 − θ(z)) = ∫ (1 + z ξ̄) / (1 − z ξ̄) dρ(ξ),   z ∈ 𝔻.
//! ```
//!
//! Polynomials are coefficient vectors in ascending powers.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::spectral_data::{Atom, AtomicMeasure};
use crate::{Error, Result};

/// Allowed `| |ξ| − 1 |` for a solution of `θ(ξ) = 1`.
pub const CIRCLE_TOL: f64 = 1e-10;
/// `|θ(0)|` at or below this counts as zero.
pub const ORIGIN_TOL: f64 = 1e-14;
const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    constant: C64,
}

impl BlaschkeProduct {
    /// `θ(z) = c ∏ (z − a_j)/(1 − ā_j z)`. Requires at least one zero, all
    /// zeros in the open disk, `|c| = 1` and `θ(0) = 0`.
    pub fn new(zeros: Vec<C64>, constant: C64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, a) in zeros.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            if a.norm() >= 1.0 {
                return Err(Error::ZeroOutsideDisk(i));
            }
        }
        if !(constant.re.is_finite() && constant.im.is_finite()) || (constant.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NonUnimodularPhase(0));
        }
        let at_origin = zeros.iter().map(|a| a.norm()).fold(1.0, |p, r| p * r);
        if at_origin > ORIGIN_TOL {
            return Err(Error::ThetaAtOriginNonzero);
        }
        Ok(BlaschkeProduct { zeros, constant })
    }

    /// `θ(z) = z`.
    pub fn identity() -> Self {
        BlaschkeProduct { zeros: vec![ZERO], constant: ONE }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.constant, |acc, &a| acc * (z - a) / (ONE - a.conj() * z))
    }

    /// `|θ′(ξ)|` for `|ξ| = 1`, which is `Σ (1 − |a|²)/|ξ − a|²`.
    pub fn derivative_modulus_on_circle(&self, xi: C64) -> f64 {
        self.zeros.iter().map(|a| (1.0 - a.norm_sqr()) / (xi - a).norm_sqr()).sum()
    }

    fn numerator(&self) -> Vec<C64> {
        self.zeros.iter().fold(vec![self.constant], |p, &a| poly_mul(&p, &[-a, ONE]))
    }

    fn denominator(&self) -> Vec<C64> {
        self.zeros.iter().fold(vec![ONE], |p, &a| poly_mul(&p, &[ONE, -a.conj()]))
    }
}

fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_sub(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; p.len().max(q.len())];
    for (i, &a) in p.iter().enumerate() {
        out[i] += a;
    }
    for (i, &b) in q.iter().enumerate() {
        out[i] -= b;
    }
    out
}

fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

fn poly_derivative(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

/// Roots of `p` (leading coefficient nonzero) from the companion matrix, each
/// polished by one Newton step.
fn poly_roots(p: &[C64]) -> Result<Vec<C64>> {
    let m = p.len() - 1;
    let lead = p[m];
    let mut comp = CMatrix::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -p[i] / lead;
    }
    let dp = poly_derivative(p);
    Ok(linalg::eigenvalues(&comp)?
        .into_iter()
        .map(|z| {
            let d = poly_eval(&dp, z);
            if d.norm() > 0.0 {
                z - poly_eval(p, z) / d
            } else {
                z
            }
        })
        .collect())
}

/// `(ξ + z)/(ξ − z)`, the kernel `(1 + zξ̄)/(1 − zξ̄)` for `|ξ| = 1`.
fn kernel(z: C64, xi: C64) -> C64 {
    (xi + z) / (xi - z)
}

/// `max_z |(1+θ)/(1−θ) − Σ w_j (1 + zξ̄_j)/(1 − zξ̄_j)|` over the given points.
pub fn integral_identity_residual(theta: &BlaschkeProduct, rho: &AtomicMeasure, points: &[C64]) -> f64 {
    points
        .iter()
        .map(|&z| {
            let t = theta.eval(z);
            let lhs = (ONE + t) / (ONE - t);
            let rhs: C64 = rho.atoms().iter().map(|a| kernel(z, a.point) * a.weight).sum();
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}

/// Least-squares weights fitting the integral identity at `points`.
fn fit_weights(theta: &BlaschkeProduct, support: &[C64], points: &[C64]) -> Option<Vec<f64>> {
    let n = support.len();
    let m = points.len();
    let mut a = DMatrix::<f64>::zeros(2 * m, n);
    let mut rhs = DVector::<f64>::zeros(2 * m);
    for (i, &z) in points.iter().enumerate() {
        let t = theta.eval(z);
        let f = (ONE + t) / (ONE - t);
        rhs[2 * i] = f.re;
        rhs[2 * i + 1] = f.im;
        for (j, &xi) in support.iter().enumerate() {
            let k = kernel(z, xi);
            a[(2 * i, j)] = k.re;
            a[(2 * i + 1, j)] = k.im;
        }
    }
    let x = a.svd(true, true).solve(&rhs, 1e-14).ok()?;
    Some(x.iter().copied().collect())
}

fn sample_points(n: usize) -> Vec<C64> {
    let m = n.max(1);
    (0..m).map(|k| C64::from_polar(0.5, std::f64::consts::TAU * (k as f64 + 0.25) / m as f64)).collect()
}

/// The Clark measure of `θ`: atoms at the `deg θ` solutions of `θ(ξ) = 1`,
/// weights `1/|θ′(ξ)|` refined against the integral identity.
pub fn clark_measure(theta: &BlaschkeProduct) -> Result<AtomicMeasure> {
    let diff = poly_sub(&theta.numerator(), &theta.denominator());
    let mut roots = poly_roots(&diff)?;
    for (index, z) in roots.iter_mut().enumerate() {
        let deviation = (z.norm() - 1.0).abs();
        if deviation > CIRCLE_TOL {
            return Err(Error::RootOffCircle { index, deviation });
        }
        *z /= z.norm();
    }
    let initial: Vec<f64> = roots.iter().map(|&xi| 1.0 / theta.derivative_modulus_on_circle(xi)).collect();
    let points = sample_points(roots.len());
    let residual = |w: &[f64]| -> f64 {
        points
            .iter()
            .map(|&z| {
                let t = theta.eval(z);
                let s: C64 = roots.iter().zip(w).map(|(&xi, &wj)| kernel(z, xi) * wj).sum();
                ((ONE + t) / (ONE - t) - s).norm()
            })
            .fold(0.0, f64::max)
    };
    let mut weights = initial;
    if let Some(refined) = fit_weights(theta, &roots, &points) {
        if refined.iter().all(|&w| w > 0.0) && residual(&refined) < residual(&weights) {
            weights = refined;
        }
    }
    let total: f64 = weights.iter().sum();
    let atoms = roots.into_iter().zip(weights).map(|(point, w)| Atom { point, weight: w / total }).collect();
    AtomicMeasure::new(atoms, true, true)
}

/// Inverts [`clark_measure`]: `θ = (F − 1)/(F + 1)` with `F` the Herglotz
/// integral of `ρ`.
pub fn inner_from_measure(rho: &AtomicMeasure) -> Result<BlaschkeProduct> {
    if rho.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !rho.is_circle() || !rho.is_probability() {
        return Err(Error::InvalidMeasure("expected a circle probability measure".into()));
    }
    if let Some(i) = rho.atoms().iter().position(|a| a.weight <= 0.0) {
        return Err(Error::InvalidMeasure(format!("atom {i} has no mass")));
    }
    let xs: Vec<C64> = rho.atoms().iter().map(|a| a.point).collect();
    // F = N_F/Π with Π = ∏(ξ_j − z).
    let pi = xs.iter().fold(vec![ONE], |p, &x| poly_mul(&p, &[x, -ONE]));
    let mut nf = vec![ZERO; xs.len() + 1];
    for (j, a) in rho.atoms().iter().enumerate() {
        let others = xs.iter().enumerate().filter(|&(i, _)| i != j).fold(vec![ONE], |p, (_, &x)| poly_mul(&p, &[x, -ONE]));
        let term = poly_mul(&others, &[a.point, ONE]);
        for (k, t) in term.into_iter().enumerate() {
            nf[k] += t * a.weight;
        }
    }
    // N_F − Π vanishes at 0 since ρ has mass one; drop that root exactly.
    let diff = poly_sub(&nf, &pi);
    let mut zeros = vec![ZERO];
    if xs.len() > 1 {
        zeros.extend(poly_roots(&diff[1..])?);
    }
    for (i, a) in zeros.iter().enumerate() {
        if a.norm() >= 1.0 {
            return Err(Error::ZeroOutsideDisk(i));
        }
    }
    let sign = if xs.len() % 2 == 1 { 1.0 } else { -1.0 };
    let constant = xs.iter().fold(C64::new(sign, 0.0), |p, x| p * x.conj());
    BlaschkeProduct::new(zeros, constant / constant.norm())
}

/// `ρ^♯ = ρ∘𝔠`: atoms conjugated, weights kept.
pub fn reflect_measure(rho: &AtomicMeasure) -> AtomicMeasure {
    let atoms = rho.atoms().iter().map(|a| Atom { point: a.point.conj(), weight: a.weight }).collect();
    AtomicMeasure::relaxed(atoms, rho.is_probability(), rho.is_circle()).expect("conjugation keeps a valid measure valid")
}

/// Per-level measures from per-level inner functions:
/// `ρ_k = clark(θ_{λ_k})^♯` and `ρ¹_k = clark(θ¹_{μ_k})^♯`.
pub fn measures_from_inner(
    thetas: &[BlaschkeProduct],
    theta1s: &[Option<BlaschkeProduct>],
) -> Result<(Vec<AtomicMeasure>, Vec<Option<AtomicMeasure>>)> {
    let rho = thetas.iter().map(|t| clark_measure(t).map(|m| reflect_measure(&m))).collect::<Result<_>>()?;
    let rho1 = theta1s
        .iter()
        .map(|t| t.as_ref().map(|t| clark_measure(t).map(|m| reflect_measure(&m))).transpose())
        .collect::<Result<_>>()?;
    Ok((rho, rho1))
}

/// Inverse of [`measures_from_inner`].
pub fn inner_from_measures(
    rho: &[AtomicMeasure],
    rho1: &[Option<AtomicMeasure>],
) -> Result<(Vec<BlaschkeProduct>, Vec<Option<BlaschkeProduct>>)> {
    let thetas = rho.iter().map(|m| inner_from_measure(&reflect_measure(m))).collect::<Result<_>>()?;
    let theta1s = rho1
        .iter()
        .map(|m| m.as_ref().map(|m| inner_from_measure(&reflect_measure(m))).transpose())
        .collect::<Result<_>>()?;
    Ok((thetas, theta1s))
}
