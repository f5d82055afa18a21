//! Small dense helpers shared across modules.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

pub(crate) fn ensure_square(a: &Matrix, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Structural(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

pub(crate) fn ensure_finite(a: &Matrix, what: &str) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("{what} has non-finite entries")))
    }
}

/// Entrywise maximum absolute value.
pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Numerical rank: number of singular values above `tol`.
pub fn numerical_rank(a: &Matrix, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    a.clone().singular_values().iter().filter(|s| **s > tol).count()
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
///
/// Starts from the all-ones vector plus a deterministic perturbation so that
/// no eigenvector is orthogonal to the start.
pub(crate) fn power_iteration_sym(g: &Matrix, iters: usize) -> f64 {
    let n = g.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = nalgebra::DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919 % 13) as f64));
    let norm = v.norm();
    v /= norm;
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = g * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        lambda = v.dot(&w);
        v = w / nw;
    }
    lambda.max(0.0)
}

/// Matrices as nested row vectors, for JSON interchange.
pub fn to_rows(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Structural("ragged matrix rows".into()));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Serde adapter storing a matrix as an array of rows.
pub mod rows_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Matrix;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        super::to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        super::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub mod opt_rows_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Matrix;

    pub fn serialize<S: Serializer>(m: &Option<Matrix>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(super::to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Matrix>, D::Error> {
        let rows = Option::<Vec<Vec<f64>>>::deserialize(d)?;
        rows.map(|r| super::from_rows(&r).map_err(serde::de::Error::custom))
            .transpose()
    }
}
