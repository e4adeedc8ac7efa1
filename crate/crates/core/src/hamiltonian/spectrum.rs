use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::FiniteHamiltonian;
use crate::{Error, Result};

/// Ascending eigenvalues with orthonormal eigenvectors as matching columns.
/// Each eigenvector's largest-magnitude entry is positive (first such entry
/// on ties).
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max_i ‖Hψ_i − E_i ψ_i‖₂`.
    pub fn residual(&self, matrix: &DMatrix<f64>) -> f64 {
        (0..self.len())
            .map(|i| {
                let v = self.vectors.column(i);
                (matrix * v - v * self.values[i]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |QᵀQ − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        (g - DMatrix::identity(self.len(), self.len())).amax()
    }

    /// `‖Q diag(E) Qᵀ − H‖_F`.
    pub fn reconstruction_error(&self, matrix: &DMatrix<f64>) -> f64 {
        let d = DMatrix::from_diagonal(&DVector::from_vec(self.values.clone()));
        (&self.vectors * d * self.vectors.transpose() - matrix).norm()
    }

    /// Distance from `energy` to the nearest eigenvalue.
    pub fn distance_to(&self, energy: f64) -> f64 {
        self.values.iter().map(|e| (e - energy).abs()).fold(f64::INFINITY, f64::min)
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

pub fn diagonalize_matrix(matrix: &DMatrix<f64>) -> Result<Spectrum> {
    if !matrix.is_square() {
        return Err(Error::NotSymmetric(f64::INFINITY));
    }
    let n = matrix.nrows();
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let asym = asymmetry(matrix);
    if asym > 1e-14 * matrix.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, 1000 * n.max(10)).ok_or(Error::Convergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let peak = col.iter().copied().fold(0.0f64, |m, v| m.max(v.abs()));
        let lead = col.iter().copied().find(|v| v.abs() == peak).unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(k, &(col * sign));
    }
    Ok(Spectrum { values, vectors })
}

pub fn diagonalize(h: &FiniteHamiltonian) -> Result<Spectrum> {
    diagonalize_matrix(&h.matrix)
}

/// Smallest inter-spectral spacing `min |E'_i − E''_j|`.
pub fn spectral_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut best) = (0, 0, f64::INFINITY);
    while i < a.len() && j < b.len() {
        best = best.min((a[i] - b[j]).abs());
        if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(best)
}
