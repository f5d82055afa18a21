//! VAR(d) and VAR-X models, their VAR(1) companion forms, and the
//! design/response matrices of the per-coordinate regressions.
//!
//! Coefficients are stored as `B_k` with the process written
//! `Z_t = B_1ᵀ Z_{t-1} + … + B_dᵀ Z_{t-d} + ε_t`; transposes are applied
//! when the companion or design is built.

use serde::{Deserialize, Serialize};

use crate::dependence::spectral_radius;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A p-dimensional VAR(d) model.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    coeffs: Vec<Matrix>,
}

impl VarModel {
    pub fn new(coeffs: Vec<Matrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Structural("a VAR model needs at least one lag".into()))?;
        let p = first.nrows();
        if p == 0 {
            return Err(Error::Structural("dimension must be positive".into()));
        }
        for (k, b) in coeffs.iter().enumerate() {
            if b.nrows() != p || b.ncols() != p {
                return Err(Error::Structural(format!(
                    "lag {} coefficient is {}x{}, expected {p}x{p}",
                    k + 1,
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { coeffs })
    }

    /// VAR(1) with transition coefficient `b`.
    pub fn var1(b: Matrix) -> Result<Self> {
        Self::new(vec![b])
    }

    pub fn p(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    /// `[B_1; …; B_d]`, the (dp × p) coefficient of the stacked regression
    /// `Y = X · stacked + E`.
    pub fn stacked(&self) -> Matrix {
        let (p, d) = (self.p(), self.d());
        let mut out = Matrix::zeros(d * p, p);
        for (k, b) in self.coeffs.iter().enumerate() {
            out.view_mut((k * p, 0), (p, p)).copy_from(b);
        }
        out
    }

    /// Inverse of [`VarModel::stacked`].
    pub fn from_stacked(stacked: &Matrix, d: usize) -> Result<Self> {
        let p = stacked.ncols();
        if d == 0 || stacked.nrows() != d * p {
            return Err(Error::Structural(format!(
                "stacked coefficient is {}x{}, expected {}x{p}",
                stacked.nrows(),
                p,
                d * p
            )));
        }
        Self::new(
            (0..d)
                .map(|k| stacked.view((k * p, 0), (p, p)).into_owned())
                .collect(),
        )
    }

    pub fn companion(&self) -> Matrix {
        build_companion(self)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius(&self.companion())
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectral_radius()? < 1.0)
    }

    /// Errors unless the companion has spectral radius below one.
    pub fn ensure_stable(&self) -> Result<()> {
        let rho = self.spectral_radius()?;
        if rho < 1.0 {
            Ok(())
        } else {
            Err(Error::Instability { rho })
        }
    }
}

/// VAR-X model: endogenous VAR(d_A) plus `d_B` lags of an exogenous series.
///
/// `exo_coeffs[j]` has shape `exo_dim × p`, so `B_jᵀ z_{t-j}` is p-dimensional.
/// The exogenous series itself is white noise (its own transition is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct VarxModel {
    base: VarModel,
    exo_dim: usize,
    exo_coeffs: Vec<Matrix>,
}

impl VarxModel {
    pub fn new(base: VarModel, exo_dim: usize, exo_coeffs: Vec<Matrix>) -> Result<Self> {
        let p = base.p();
        if exo_dim == 0 && !exo_coeffs.is_empty() {
            return Err(Error::Structural("exogenous lags given for zero exo_dim".into()));
        }
        for (j, b) in exo_coeffs.iter().enumerate() {
            if b.nrows() != exo_dim || b.ncols() != p {
                return Err(Error::Structural(format!(
                    "exogenous lag {} coefficient is {}x{}, expected {exo_dim}x{p}",
                    j + 1,
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self {
            base,
            exo_dim,
            exo_coeffs,
        })
    }

    pub fn base(&self) -> &VarModel {
        &self.base
    }

    pub fn p(&self) -> usize {
        self.base.p()
    }

    pub fn d_a(&self) -> usize {
        self.base.d()
    }

    pub fn d_b(&self) -> usize {
        self.exo_coeffs.len()
    }

    pub fn exo_dim(&self) -> usize {
        self.exo_dim
    }

    pub fn exo_coeffs(&self) -> &[Matrix] {
        &self.exo_coeffs
    }

    /// `F = [A_1; …; A_{d_A}; B_1; …; B_{d_B}]`, the coefficient of the
    /// stacked VAR-X regression.
    pub fn stacked(&self) -> Matrix {
        let p = self.p();
        let q = self.exo_dim;
        let endo_rows = p * self.d_a();
        let mut out = Matrix::zeros(endo_rows + q * self.d_b(), p);
        out.view_mut((0, 0), (endo_rows, p))
            .copy_from(&self.base.stacked());
        for (j, b) in self.exo_coeffs.iter().enumerate() {
            out.view_mut((endo_rows + j * q, 0), (q, p)).copy_from(b);
        }
        out
    }

    pub fn companion(&self) -> Matrix {
        build_varx_companion(self)
    }
}

/// Observed path `Z_0..Z_T` stored one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    data: Matrix,
    exo: Option<Matrix>,
}

impl Trajectory {
    pub fn new(data: Matrix) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Structural("empty trajectory".into()));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("trajectory has non-finite entries".into()));
        }
        Ok(Self { data, exo: None })
    }

    pub fn with_exo(data: Matrix, exo: Matrix) -> Result<Self> {
        let mut traj = Self::new(data)?;
        if exo.nrows() != traj.data.nrows() {
            return Err(Error::Structural(format!(
                "exogenous series has {} observations, endogenous has {}",
                exo.nrows(),
                traj.data.nrows()
            )));
        }
        if !exo.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("exogenous series has non-finite entries".into()));
        }
        traj.exo = Some(exo);
        Ok(traj)
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn exo(&self) -> Option<&Matrix> {
        self.exo.as_ref()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    /// Index of the last observation (T); there are T + 1 rows.
    pub fn horizon(&self) -> usize {
        self.data.nrows() - 1
    }

    /// Observations `first..=last` as a new trajectory.
    pub fn slice(&self, first: usize, last: usize) -> Result<Self> {
        if first > last || last > self.horizon() {
            return Err(Error::Parameter(format!(
                "slice {first}..={last} outside 0..={}",
                self.horizon()
            )));
        }
        let rows = last - first + 1;
        let data = self.data.rows(first, rows).into_owned();
        match &self.exo {
            Some(e) => Self::with_exo(data, e.rows(first, rows).into_owned()),
            None => Self::new(data),
        }
    }
}

/// Design and response of the stacked regression `Y = X·B_stacked + E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionData {
    #[serde(with = "crate::linalg::rows_serde")]
    pub x: Matrix,
    #[serde(with = "crate::linalg::rows_serde")]
    pub y: Matrix,
}

impl RegressionData {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

/// Companion matrix `B̃ᵀ` of a VAR(d): top block row `[B_1ᵀ … B_dᵀ]`,
/// identity blocks on the block sub-diagonal.
pub fn build_companion(model: &VarModel) -> Matrix {
    let (p, d) = (model.p(), model.d());
    let mut c = Matrix::zeros(d * p, d * p);
    for (k, b) in model.coeffs().iter().enumerate() {
        c.view_mut((0, k * p), (p, p)).copy_from(&b.transpose());
    }
    for k in 1..d {
        c.view_mut((k * p, (k - 1) * p), (p, p))
            .fill_with_identity();
    }
    c
}

/// Companion of a VAR-X model with state
/// `y_t = [x_t, …, x_{t-d_A+1}, z_t, …, z_{t-d_B+1}]`.
///
/// The first block row is `[A_1ᵀ … A_{d_A}ᵀ  B_1ᵀ … B_{d_B}ᵀ]`. The row of the
/// newest exogenous slot is zero (the exogenous innovation enters through the
/// noise vector); the remaining exogenous slots shift by one lag.
pub fn build_varx_companion(model: &VarxModel) -> Matrix {
    let p = model.p();
    let q = model.exo_dim();
    let (d_a, d_b) = (model.d_a(), model.d_b());
    let endo = p * d_a;
    let dim = endo + q * d_b;
    let mut c = Matrix::zeros(dim, dim);
    c.view_mut((0, 0), (endo, endo))
        .copy_from(&build_companion(model.base()));
    for (j, b) in model.exo_coeffs().iter().enumerate() {
        c.view_mut((0, endo + j * q), (p, q)).copy_from(&b.transpose());
    }
    for j in 1..d_b {
        c.view_mut((endo + j * q, endo + (j - 1) * q), (q, q))
            .fill_with_identity();
    }
    c
}

/// Design for a VAR(d): row i is `[Z_{i+d-1}ᵀ, …, Z_iᵀ]` (most recent lag
/// first) and the response row i is `Z_{i+d}ᵀ`, for i = 0..n with
/// n = T − d + 1.
pub fn build_design(traj: &Trajectory, d: usize) -> Result<RegressionData> {
    if d == 0 {
        return Err(Error::Parameter("lag order must be at least 1".into()));
    }
    let t = traj.horizon();
    if t < d {
        return Err(Error::InsufficientData {
            needed: d + 1,
            got: t + 1,
        });
    }
    let p = traj.p();
    let n = t - d + 1;
    let z = traj.data();
    let x = Matrix::from_fn(n, d * p, |i, col| {
        let (lag, j) = (col / p, col % p);
        z[(i + d - 1 - lag, j)]
    });
    let y = z.rows(d, n).into_owned();
    Ok(RegressionData { x, y })
}

/// Design for a VAR-X: row for time t is
/// `[x_{t-1}ᵀ … x_{t-d_A}ᵀ  z_{t-1}ᵀ … z_{t-d_B}ᵀ]`, for t from
/// max(d_A, d_B) to T. With `d_b == 0` this is exactly [`build_design`].
pub fn build_varx_design(traj: &Trajectory, d_a: usize, d_b: usize) -> Result<RegressionData> {
    if d_b == 0 {
        return build_design(traj, d_a);
    }
    let exo = traj
        .exo()
        .ok_or_else(|| Error::Parameter("trajectory has no exogenous series".into()))?;
    if d_a == 0 {
        return Err(Error::Parameter("endogenous lag order must be at least 1".into()));
    }
    let start = d_a.max(d_b);
    let t = traj.horizon();
    if t < start {
        return Err(Error::InsufficientData {
            needed: start + 1,
            got: t + 1,
        });
    }
    let p = traj.p();
    let q = exo.ncols();
    let n = t - start + 1;
    let z = traj.data();
    let endo = d_a * p;
    let x = Matrix::from_fn(n, endo + d_b * q, |i, col| {
        let time = start + i;
        if col < endo {
            z[(time - 1 - col / p, col % p)]
        } else {
            let c = col - endo;
            exo[(time - 1 - c / q, c % q)]
        }
    });
    let y = z.rows(start, n).into_owned();
    Ok(RegressionData { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn companion_of_lag_one_is_transpose() {
        let b = m(&[&[0.1, 0.2], &[0.3, 0.4]]);
        let model = VarModel::var1(b.clone()).unwrap();
        assert_eq!(build_companion(&model), b.transpose());
    }

    #[test]
    fn scalar_ar2_companion() {
        let model = VarModel::new(vec![m(&[&[0.3]]), m(&[&[-0.2]])]).unwrap();
        assert_eq!(build_companion(&model), m(&[&[0.3, -0.2], &[1.0, 0.0]]));
    }

    #[test]
    fn zero_coefficient_companion_has_identity_subblock() {
        let model = VarModel::new(vec![Matrix::zeros(2, 2), Matrix::zeros(2, 2)]).unwrap();
        let c = build_companion(&model);
        let mut expected = Matrix::zeros(4, 4);
        expected[(2, 0)] = 1.0;
        expected[(3, 1)] = 1.0;
        assert_eq!(c, expected);
    }

    #[test]
    fn mismatched_lags_rejected() {
        let err = VarModel::new(vec![Matrix::zeros(2, 2), Matrix::zeros(3, 3)]).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
        assert!(matches!(VarModel::new(vec![]), Err(Error::Structural(_))));
    }

    #[test]
    fn varx_companion_scalar_layout() {
        let base = VarModel::var1(m(&[&[0.4]])).unwrap();
        let model = VarxModel::new(base, 1, vec![m(&[&[0.7]])]).unwrap();
        assert_eq!(build_varx_companion(&model), m(&[&[0.4, 0.7], &[0.0, 0.0]]));
    }

    #[test]
    fn varx_companion_zero_blocks_keep_exogenous_shift() {
        let p = 2;
        let base = VarModel::var1(Matrix::zeros(p, p)).unwrap();
        let model =
            VarxModel::new(base, p, vec![Matrix::zeros(p, p), Matrix::zeros(p, p)]).unwrap();
        let c = build_varx_companion(&model);
        assert_eq!(c.nrows(), 3 * p);
        let mut expected = Matrix::zeros(3 * p, 3 * p);
        // z_{t-1} slot receives the previous z_t slot.
        expected[(4, 2)] = 1.0;
        expected[(5, 3)] = 1.0;
        assert_eq!(c, expected);

        let single =
            VarxModel::new(VarModel::var1(Matrix::zeros(p, p)).unwrap(), p, vec![Matrix::zeros(p, p)])
                .unwrap();
        assert_eq!(build_varx_companion(&single), Matrix::zeros(2 * p, 2 * p));
    }

    #[test]
    fn varx_exo_shape_mismatch() {
        let base = VarModel::var1(Matrix::zeros(2, 2)).unwrap();
        assert!(matches!(
            VarxModel::new(base, 2, vec![Matrix::zeros(2, 3)]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn scalar_lag_one_design() {
        let traj = Trajectory::new(m(&[&[1.0], &[2.0], &[3.0]])).unwrap();
        let reg = build_design(&traj, 1).unwrap();
        assert_eq!(reg.x, m(&[&[1.0], &[2.0]]));
        assert_eq!(reg.y, m(&[&[2.0], &[3.0]]));
    }

    #[test]
    fn boundary_design_single_row() {
        // d = 2, T = 2: one row [Z_1ᵀ, Z_0ᵀ].
        let traj = Trajectory::new(m(&[&[1.0, 10.0], &[2.0, 20.0], &[3.0, 30.0]])).unwrap();
        let reg = build_design(&traj, 2).unwrap();
        assert_eq!(reg.x, m(&[&[2.0, 20.0, 1.0, 10.0]]));
        assert_eq!(reg.y, m(&[&[3.0, 30.0]]));
    }

    #[test]
    fn design_needs_enough_data() {
        let traj = Trajectory::new(m(&[&[1.0], &[2.0]])).unwrap();
        assert!(matches!(
            build_design(&traj, 2),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn stacked_roundtrip() {
        let model = VarModel::new(vec![
            m(&[&[0.1, 0.2], &[0.3, 0.4]]),
            m(&[&[0.5, 0.6], &[0.7, 0.8]]),
        ])
        .unwrap();
        let back = VarModel::from_stacked(&model.stacked(), 2).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn varx_design_without_exo_lags_is_plain_design() {
        let traj = Trajectory::with_exo(
            m(&[&[1.0], &[2.0], &[3.0], &[4.0]]),
            m(&[&[9.0], &[8.0], &[7.0], &[6.0]]),
        )
        .unwrap();
        assert_eq!(build_varx_design(&traj, 2, 0).unwrap(), build_design(&traj, 2).unwrap());
        let reg = build_varx_design(&traj, 1, 2).unwrap();
        // t = 2, 3: [x_{t-1}, z_{t-1}, z_{t-2}]
        assert_eq!(reg.x, m(&[&[2.0, 8.0, 9.0], &[3.0, 7.0, 8.0]]));
        assert_eq!(reg.y, m(&[&[3.0], &[4.0]]));
    }
}
