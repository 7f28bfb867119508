//! Seeded generators for valid spectral data, used by the round-trip
//! commands and the test suites.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;

use crate::assembly::OperatorBundle;
use crate::linalg::{c, CMatrix, C64, ONE};
use crate::spectral_data::{validate_intertwining, Atom, AtomicMeasure, CompactSpectralData, IntertwinedSpectrum};

/// Shape of generated spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumShape {
    /// Range for `λ₁`.
    pub top: (f64, f64),
    /// Range of the ratios `μ_k/λ_k` and `λ_{k+1}/μ_k`.
    pub ratio: (f64, f64),
    /// Probability that the last `μ` is zero.
    pub zero_mu: f64,
}

impl Default for SpectrumShape {
    fn default() -> Self {
        SpectrumShape { top: (0.5, 3.0), ratio: (0.7, 0.92), zero_mu: 0.3 }
    }
}

pub fn random_spectrum<R: Rng>(rng: &mut R, n: usize, shape: &SpectrumShape) -> IntertwinedSpectrum {
    let mut lambda = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut x = rng.random_range(shape.top.0..shape.top.1);
    for _ in 0..n {
        lambda.push(x);
        x *= rng.random_range(shape.ratio.0..shape.ratio.1);
        mu.push(x);
        x *= rng.random_range(shape.ratio.0..shape.ratio.1);
    }
    if rng.random_bool(shape.zero_mu) {
        mu[n - 1] = 0.0;
    }
    validate_intertwining(&lambda, &mu).expect("generated spectrum interlaces")
}

pub fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..TAU))
}

/// Circle probability measure with `atoms` points at pairwise angular
/// distance at least `min_sep` and weights bounded away from zero.
pub fn random_circle_measure<R: Rng>(rng: &mut R, atoms: usize, min_sep: f64) -> AtomicMeasure {
    let mut angles: Vec<f64> = Vec::with_capacity(atoms);
    while angles.len() < atoms {
        let t = rng.random_range(0.0..TAU);
        let close = angles.iter().any(|&s| {
            let d = (t - s).rem_euclid(TAU);
            d.min(TAU - d) < min_sep
        });
        if !close {
            angles.push(t);
        }
    }
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let list = angles
        .iter()
        .zip(&raw)
        .map(|(&t, &w)| Atom { point: C64::from_polar(1.0, t), weight: w / total })
        .collect();
    AtomicMeasure::new(list, true, true).expect("generated measure is valid")
}

pub fn random_cyclic_data<R: Rng>(rng: &mut R, n: usize, shape: &SpectrumShape) -> CompactSpectralData {
    let s = random_spectrum(rng, n, shape);
    let xi = (0..n).map(|_| random_phase(rng)).collect();
    let eta = s.mu().iter().map(|&m| if m > 0.0 { Some(random_phase(rng)) } else { None }).collect();
    CompactSpectralData::cyclic(s, xi, eta).expect("generated cyclic data is valid")
}

/// Multiplicity data with `n` levels and between 1 and `max_atoms` atoms per
/// measure.
pub fn random_multiplicity_data<R: Rng>(rng: &mut R, n: usize, max_atoms: usize, shape: &SpectrumShape) -> CompactSpectralData {
    let s = random_spectrum(rng, n, shape);
    let min_sep = 0.5;
    let rho = (0..n).map(|_| {
        let k = rng.random_range(1..=max_atoms);
        random_circle_measure(rng, k, min_sep)
    });
    let rho: Vec<_> = rho.collect();
    let rho1 = s
        .mu()
        .iter()
        .map(|&m| {
            (m > 0.0).then(|| {
                let k = rng.random_range(1..=max_atoms);
                random_circle_measure(rng, k, min_sep)
            })
        })
        .collect();
    CompactSpectralData::multiplicity(s, rho, rho1).expect("generated multiplicity data is valid")
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    g.qr().q()
}

/// Unitary commuting with `R` and fixing `p`: identity on `𝓗₀`, and
/// `O·D·Oᵀ` (real orthogonal `O`, unimodular diagonal `D`) on the rest of
/// each eigenspace of `R`. This shape also keeps `Ψ𝔍ₚ` a conjugation in the
/// real frame used by the assembly.
pub fn random_admissible_psi<R: Rng>(rng: &mut R, b: &OperatorBundle) -> CMatrix {
    let mut psi = CMatrix::identity(b.dim(), b.dim());
    let mut blocks: Vec<std::ops::Range<usize>> = Vec::new();
    for lv in &b.layout().levels {
        if lv.lambda_block.len() > 1 {
            blocks.push(lv.lambda_block.start + 1..lv.lambda_block.end);
        }
        if !lv.mu_block.is_empty() {
            blocks.push(lv.mu_block.clone());
        }
    }
    for r in blocks {
        let m = r.len();
        let o = random_orthogonal(rng, m);
        let mut od = o.map(c);
        for j in 0..m {
            let z = random_phase(rng);
            for i in 0..m {
                od[(i, j)] *= z;
            }
        }
        let block = od * o.transpose().map(c);
        psi.view_mut((r.start, r.start), (m, m)).copy_from(&block);
    }
    psi
}

/// Replaces a random atom weight of `ρ_level` by zero and renormalizes, for
/// negative controls of *-cyclicity.
pub fn zero_out_atom(m: &AtomicMeasure, index: usize) -> AtomicMeasure {
    let mut atoms: Vec<Atom> = m.atoms().to_vec();
    atoms[index].weight = 0.0;
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in &mut atoms {
        a.weight /= total;
    }
    AtomicMeasure::relaxed(atoms, true, true).expect("renormalized measure stays valid")
}

/// `δ_1` at every level.
pub fn unit_phases(s: IntertwinedSpectrum) -> CompactSpectralData {
    let n = s.len();
    let eta = s.mu().iter().map(|&m| (m > 0.0).then_some(ONE)).collect();
    CompactSpectralData::cyclic(s, vec![ONE; n], eta).expect("unit phases are valid")
}
