//! Dense complex helpers shared by the assembly, extraction and stability code.
//!
//! Everything here works on `nalgebra` dynamic matrices over `Complex<f64>`.
//! The inner product is linear in the first argument:
//! `inner(x, y) = Σ x_i · conj(y_i)`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn conj_vector(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v);
    }
    m
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Singular values in decreasing order.
pub fn singular_values_desc(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Eigenvalues of a general square matrix through the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension("eigenvalues of a non-square matrix".into()));
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .map(|v| v.iter().cloned().collect())
        .ok_or(Error::NoConvergence)
}

pub fn spectral_radius(m: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Schur vectors and eigenvalues of a normal matrix. For normal input the
/// Schur vectors are eigenvectors.
pub fn normal_eigen(m: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let values = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    Ok((values, q))
}

/// Hermitian eigendecomposition with eigenvalues sorted in decreasing order.
/// The input is symmetrized first.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let h = (m + m.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Real symmetric eigendecomposition, eigenvalues decreasing.
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let h = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Applies `f` to the spectrum of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `(-clamp, 0)` are treated as zero; anything below `-clamp`
/// is a [`Error::SquareRootFailure`].
pub fn psd_function(m: &CMatrix, clamp: f64, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigh(m);
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        if v < -clamp {
            return Err(Error::SquareRootFailure { value: v });
        }
        let fv = c(f(v.max(0.0)));
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fv;
        }
    }
    Ok(scaled * vectors.adjoint())
}

/// Inverse of a Hermitian positive definite matrix via its eigendecomposition.
pub fn hpd_inverse(m: &CMatrix) -> Result<CMatrix> {
    let (values, _) = hermitian_eigh(m);
    if let Some(&min) = values.last() {
        if min <= 0.0 {
            return Err(Error::Dimension(format!("matrix is not positive definite (min eigenvalue {min:e})")));
        }
    }
    psd_function(m, 0.0, |x| 1.0 / x)
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values_desc(m);
    match s.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&top) => s.iter().filter(|&&x| x > rel_tol * top).count(),
    }
}

/// Real orthogonal symmetric matrix `H` with `H e_0 = v` for a real unit
/// vector `v` (a Householder reflector, or the identity when `v = e_0`).
pub fn householder_to(v: &[f64]) -> DMatrix<f64> {
    let n = v.len();
    let mut w: Vec<f64> = v.to_vec();
    w[0] -= 1.0;
    let norm2: f64 = w.iter().map(|x| x * x).sum();
    let mut h = DMatrix::<f64>::identity(n, n);
    if norm2 <= 1e-30 {
        return h;
    }
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= 2.0 * w[i] * w[j] / norm2;
        }
    }
    h
}

/// Orthonormal basis of `span(ambient)` whose first column is `first`
/// (assumed unit and inside the span). Modified Gram-Schmidt, two passes.
pub fn complete_basis(first: &CVector, ambient: &CMatrix) -> CMatrix {
    let dim = ambient.ncols();
    let mut cols: Vec<CVector> = vec![first.clone()];
    for j in 0..ambient.ncols() {
        if cols.len() == dim {
            break;
        }
        let mut v = ambient.column(j).into_owned();
        for _ in 0..2 {
            for b in &cols {
                let coef = b.dotc(&v);
                v -= b * coef;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            cols.push(v / c(nv));
        }
    }
    CMatrix::from_columns(&cols)
}

/// Groups a decreasing sequence into clusters of numerically equal values.
/// Values closer than `merge_tol · scale` belong together, values further
/// apart than `gap_tol · scale` are distinct, anything in between is an
/// [`Error::ClusterAmbiguity`]. Returns index ranges into `values`.
pub fn cluster_decreasing(values: &[f64], scale: f64, merge_tol: f64, gap_tol: f64) -> Result<Vec<std::ops::Range<usize>>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() {
            if start < i {
                out.push(start..i);
            }
            break;
        }
        let diff = (values[i - 1] - values[i]).abs();
        if diff <= merge_tol * scale {
            continue;
        }
        if diff < gap_tol * scale {
            return Err(Error::ClusterAmbiguity { a: values[i - 1], b: values[i] });
        }
        out.push(start..i);
        start = i;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn householder_maps_e0() {
        let v = [0.6, 0.0, 0.8];
        let h = householder_to(&v);
        let e0 = h.column(0);
        for i in 0..3 {
            assert!((e0[i] - v[i]).abs() < 1e-15);
        }
        assert!((&h * &h - DMatrix::identity(3, 3)).norm() < 1e-14);
        assert!((&h - h.transpose()).norm() < 1e-15);
    }

    #[test]
    fn psd_sqrt_clamps_small_negatives() {
        let m = diag_real(&[4.0, -1e-15]);
        let s = psd_function(&m, 1e-12, f64::sqrt).unwrap();
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-14);
        assert_eq!(s[(1, 1)].re, 0.0);
        let bad = diag_real(&[4.0, -1e-3]);
        assert!(matches!(psd_function(&bad, 1e-12, f64::sqrt), Err(Error::SquareRootFailure { .. })));
    }

    #[test]
    fn cluster_rules() {
        let v = [2.0, 2.0 + 1e-13, 1.0, 0.5];
        let r = cluster_decreasing(&v, 2.0, 1e-9, 1e-6).unwrap();
        assert_eq!(r, vec![0..2, 2..3, 3..4]);
        let amb = [2.0, 2.0 - 1e-7];
        assert!(matches!(cluster_decreasing(&amb, 2.0, 1e-9, 1e-6), Err(Error::ClusterAmbiguity { .. })));
    }

    #[test]
    fn inner_is_linear_in_first_argument() {
        let x = CVector::from_vec(vec![C64::new(0.0, 1.0)]);
        let y = CVector::from_vec(vec![ONE]);
        assert_eq!(inner(&x, &y), C64::new(0.0, 1.0));
        assert_eq!(inner(&y, &x), C64::new(0.0, -1.0));
    }
}
