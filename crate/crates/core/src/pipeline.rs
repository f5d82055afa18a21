//! End-to-end VAR / VAR-X estimation with a shared tuning parameter,
//! forecasting, and error metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{build_design, build_varx_design, RegressionData, Trajectory};
use crate::penalties::{lambda_theory, PenaltySpec};
use crate::solvers::{lowrank_sparse_fit, FitResult, GramProblem, LowRankParts, SolverConfig};

/// Minimum number of observations beyond the lag order.
pub const MIN_EXTRA_OBS: usize = 10;
/// Held-out one-step predictions used for the prediction error.
pub const PRED_HORIZON: usize = 10;

fn default_grid() -> usize {
    30
}
fn default_decades() -> f64 {
    3.0
}
fn default_holdout() -> f64 {
    0.1
}
fn one() -> f64 {
    1.0
}

/// How the shared tuning parameter is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LambdaRule {
    Fixed {
        lambda: f64,
    },
    /// `2·Φ̄·K²·𝖢·√(c·w²/n)` evaluated at the design's sample size.
    Theory {
        width: f64,
        k: f64,
        c_factor: f64,
        #[serde(default = "one")]
        phi_bar: f64,
        #[serde(default = "one")]
        c_abs: f64,
    },
    /// Logarithmic grid of `grid` points spanning `center·10^{±decades}`;
    /// each point is fitted on the leading rows and scored on the trailing
    /// `holdout` fraction, then the winner is refitted on all rows.
    Validation {
        center: f64,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_decades")]
        decades: f64,
        #[serde(default = "default_holdout")]
        holdout: f64,
    },
}

impl LambdaRule {
    pub fn validation(center: f64) -> Self {
        LambdaRule::Validation {
            center,
            grid: default_grid(),
            decades: default_decades(),
            holdout: default_holdout(),
        }
    }
}

/// Descending logarithmic grid `center·10^{+decades} … center·10^{-decades}`.
pub fn lambda_grid(center: f64, points: usize, decades: f64) -> Result<Vec<f64>> {
    if !(center > 0.0 && center.is_finite()) || points == 0 || !(decades >= 0.0) {
        return Err(Error::Parameter(
            "validation grid needs a positive center, at least one point and nonnegative span".into(),
        ));
    }
    if points == 1 {
        return Ok(vec![center]);
    }
    Ok((0..points)
        .map(|i| {
            let frac = i as f64 / (points - 1) as f64;
            center * 10f64.powf(decades * (1.0 - 2.0 * frac))
        })
        .collect())
}

/// Row split of a design into leading training rows and trailing
/// validation rows.
pub fn split_rows(data: &RegressionData, holdout: f64) -> Result<(RegressionData, RegressionData)> {
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::Parameter(format!("holdout fraction must lie in (0, 1), got {holdout}")));
    }
    let n = data.n();
    let n_val = ((n as f64 * holdout).round() as usize).max(1);
    if n_val >= n {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let n_train = n - n_val;
    let part = |start: usize, len: usize| RegressionData {
        x: data.x.rows(start, len).into_owned(),
        y: data.y.rows(start, len).into_owned(),
    };
    Ok((part(0, n_train), part(n_train, n_val)))
}

/// Whether a penalty couples the columns of the coefficient matrix; other
/// penalties are applied to each response's coefficient vector separately.
fn is_joint(penalty: &PenaltySpec) -> bool {
    matches!(penalty, PenaltySpec::Nuclear { .. } | PenaltySpec::OwnOther { .. })
}

/// Fits every response with the same penalty and λ. Separable penalties
/// run one regression per column in parallel; the results are assembled
/// by column index, so the outcome does not depend on scheduling.
pub fn fit_design(
    problem: &GramProblem,
    penalty: &PenaltySpec,
    lambda: f64,
    cfg: &SolverConfig,
    init: Option<&Matrix>,
) -> Result<FitResult> {
    if is_joint(penalty) {
        return problem.fit_joint(penalty, lambda, cfg, init);
    }
    let cols: Vec<FitResult> = (0..problem.n_responses())
        .into_par_iter()
        .map(|j| {
            let start = init.map(|b| b.columns(j, 1).into_owned());
            problem.fit_column(j, penalty, lambda, cfg, start.as_ref())
        })
        .collect::<Result<_>>()?;
    let coeffs = Matrix::from_columns(&cols.iter().map(|f| f.coeffs.column(0)).collect::<Vec<_>>());
    Ok(FitResult {
        coeffs,
        objective_trace: Vec::new(),
        iters: cols.iter().map(|f| f.iters).max().unwrap_or(0),
        converged: cols.iter().all(|f| f.converged),
        lambda_used: lambda,
        lowrank: None,
    })
}

/// Chooses λ by the validation rule. Returns the winning λ and the
/// held-out squared error of every grid point (in grid order).
pub fn select_lambda_validation(
    data: &RegressionData,
    penalty: &PenaltySpec,
    grid: &[f64],
    holdout: f64,
    cfg: &SolverConfig,
) -> Result<(f64, Vec<f64>)> {
    let (train, val) = split_rows(data, holdout)?;
    let problem = GramProblem::new(&train.x, &train.y)?;
    let mut scores = Vec::with_capacity(grid.len());
    let mut warm: Option<Matrix> = None;
    for &lambda in grid {
        let fit = fit_design(&problem, penalty, lambda, cfg, warm.as_ref())?;
        scores.push((&val.y - &val.x * &fit.coeffs).norm_squared());
        warm = Some(fit.coeffs);
    }
    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| grid[i])
        .ok_or_else(|| Error::Parameter("empty λ grid".into()))?;
    Ok((best, scores))
}

/// Resolves the rule and fits the design.
pub fn fit_regression(
    data: &RegressionData,
    penalty: &PenaltySpec,
    rule: &LambdaRule,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    let lambda = match rule {
        LambdaRule::Fixed { lambda } => *lambda,
        LambdaRule::Theory {
            width,
            k,
            c_factor,
            phi_bar,
            c_abs,
        } => lambda_theory(*width, data.n(), *k, *c_factor, *phi_bar, *c_abs)?,
        LambdaRule::Validation {
            center,
            grid,
            decades,
            holdout,
        } => {
            let grid = lambda_grid(*center, *grid, *decades)?;
            select_lambda_validation(data, penalty, &grid, *holdout, cfg)?.0
        }
    };
    let problem = GramProblem::new(&data.x, &data.y)?;
    fit_design(&problem, penalty, lambda, cfg, None)
}

fn ensure_length(traj: &Trajectory, d: usize) -> Result<()> {
    if traj.horizon() < d + MIN_EXTRA_OBS {
        return Err(Error::InsufficientData {
            needed: d + MIN_EXTRA_OBS + 1,
            got: traj.horizon() + 1,
        });
    }
    Ok(())
}

/// Fits a VAR(d); the coefficient matrix is the stacked `[B_1; …; B_d]`
/// of shape `dp × p`.
pub fn fit_var(
    traj: &Trajectory,
    d: usize,
    penalty: &PenaltySpec,
    rule: &LambdaRule,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    ensure_length(traj, d)?;
    fit_regression(&build_design(traj, d)?, penalty, rule, cfg)
}

/// Fits the stacked VAR-X coefficient `F = [A_1; …; A_dA; B_1; …; B_dB]`
/// under the Own/Other group penalty. `exo_scale` multiplies the
/// exogenous group weights.
pub fn fit_varx(
    traj: &Trajectory,
    d_a: usize,
    d_b: usize,
    exo_scale: f64,
    rule: &LambdaRule,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    let exo_dim = match (traj.exo(), d_b) {
        (_, 0) => 0,
        (Some(e), _) => e.ncols(),
        (None, _) => return Err(Error::Parameter("trajectory has no exogenous series".into())),
    };
    ensure_length(traj, d_a.max(d_b))?;
    let penalty = PenaltySpec::OwnOther {
        p: traj.p(),
        d_a,
        d_b,
        exo_dim,
        exo_scale,
    };
    fit_regression(&build_varx_design(traj, d_a, d_b)?, &penalty, rule, cfg)
}

/// Low-rank plus sparse VAR(1) fit; `B̂ = L̂ + Ŝ`.
pub fn fit_var_lowrank_sparse(
    traj: &Trajectory,
    d: usize,
    lambda_nuc: f64,
    mu: f64,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    if d != 1 {
        return Err(Error::Parameter(format!(
            "low-rank plus sparse fitting supports lag order 1 only, got {d}"
        )));
    }
    ensure_length(traj, 1)?;
    let data = build_design(traj, 1)?;
    lowrank_sparse_fit(&data.x, &data.y, lambda_nuc, mu, alpha, cfg)
}

fn lagged_row(stacked: &Matrix, lags: &[nalgebra::DVector<f64>]) -> nalgebra::DVector<f64> {
    let p = stacked.ncols();
    let mut out = nalgebra::DVector::zeros(p);
    for (k, z) in lags.iter().enumerate() {
        out += stacked.rows(k * p, p).tr_mul(z);
    }
    out
}

fn lag_order(stacked: &Matrix) -> Result<usize> {
    let p = stacked.ncols();
    if p == 0 || stacked.nrows() % p != 0 {
        return Err(Error::Structural(format!(
            "stacked coefficients of shape {}x{} are not dp x p",
            stacked.nrows(),
            p
        )));
    }
    Ok(stacked.nrows() / p)
}

/// Iterated forecasts `ẑ_{T+1..T+h}` from the last `d` rows of `history`.
pub fn predict(stacked: &Matrix, history: &Matrix, h: usize) -> Result<Matrix> {
    let d = lag_order(stacked)?;
    let p = stacked.ncols();
    if history.ncols() != p {
        return Err(Error::Structural("history dimension differs from model".into()));
    }
    if history.nrows() < d {
        return Err(Error::InsufficientData {
            needed: d,
            got: history.nrows(),
        });
    }
    // Most recent first.
    let mut lags: Vec<nalgebra::DVector<f64>> = (0..d)
        .map(|k| history.row(history.nrows() - 1 - k).transpose())
        .collect();
    let mut out = Matrix::zeros(h, p);
    for step in 0..h {
        let next = lagged_row(stacked, &lags);
        out.row_mut(step).copy_from(&next.transpose());
        lags.rotate_right(1);
        lags[0] = next;
    }
    Ok(out)
}

/// One-step-ahead predictions of rows `d..` of `series` from the realized
/// previous `d` rows.
pub fn one_step_predictions(stacked: &Matrix, series: &Matrix) -> Result<Matrix> {
    let d = lag_order(stacked)?;
    if series.nrows() <= d {
        return Err(Error::InsufficientData {
            needed: d + 1,
            got: series.nrows(),
        });
    }
    let p = stacked.ncols();
    let mut out = Matrix::zeros(series.nrows() - d, p);
    for t in d..series.nrows() {
        let lags: Vec<_> = (1..=d).map(|k| series.row(t - k).transpose()).collect();
        out.row_mut(t - d).copy_from(&lagged_row(stacked, &lags).transpose());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `‖B̂ − B‖_F`
    pub frob_err: f64,
    /// `‖B̂ − B‖_F / ‖B‖_F`
    pub rel_err: f64,
    /// `Σ‖ẑ_k − z_k‖₂ / Σ‖z_k‖₂` over the held-out one-step predictions.
    pub pred_err: f64,
    /// Largest ℓ2 error over the per-response coefficient vectors.
    pub max_row_l2: f64,
}

/// Errors of a stacked estimate against the truth. `holdout` holds `d`
/// history rows followed by at least [`PRED_HORIZON`] target rows; the first
/// [`PRED_HORIZON`] targets are predicted one step ahead from realized data.
pub fn eval_errors(estimate: &Matrix, truth: &Matrix, holdout: &Matrix) -> Result<ErrorMetrics> {
    if estimate.shape() != truth.shape() {
        return Err(Error::Structural(format!(
            "estimate {:?} and truth {:?} differ in shape",
            estimate.shape(),
            truth.shape()
        )));
    }
    let d = lag_order(truth)?;
    if holdout.nrows() < d + PRED_HORIZON {
        return Err(Error::InsufficientData {
            needed: d + PRED_HORIZON,
            got: holdout.nrows(),
        });
    }
    let diff = estimate - truth;
    let frob_err = diff.norm();
    let truth_norm = truth.norm();
    let rel_err = if truth_norm > 0.0 {
        frob_err / truth_norm
    } else if frob_err == 0.0 {
        0.0
    } else {
        return Err(Error::Parameter("relative error undefined for a zero truth".into()));
    };
    let segment = holdout.rows(0, d + PRED_HORIZON).into_owned();
    let pred = one_step_predictions(estimate, &segment)?;
    let actual = segment.rows(d, PRED_HORIZON);
    let num: f64 = (0..PRED_HORIZON).map(|k| (pred.row(k) - actual.row(k)).norm()).sum();
    let den: f64 = (0..PRED_HORIZON).map(|k| actual.row(k).norm()).sum();
    let pred_err = if den > 0.0 { num / den } else { 0.0 };
    let max_row_l2 = diff.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(ErrorMetrics {
        frob_err,
        rel_err,
        pred_err,
        max_row_l2,
    })
}

/// Squared component errors of a low-rank plus sparse estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowRankErrors {
    pub sparse_sq: f64,
    pub lowrank_sq: f64,
    /// `‖B̂ − B‖²_F` with `B = L + S`.
    pub combined_sq: f64,
}

pub fn lowrank_errors(parts: &LowRankParts, l_true: &Matrix, s_true: &Matrix) -> LowRankErrors {
    let dl = &parts.low_rank - l_true;
    let ds = &parts.sparse - s_true;
    LowRankErrors {
        sparse_sq: ds.norm_squared(),
        lowrank_sq: dl.norm_squared(),
        combined_sq: (dl + ds).norm_squared(),
    }
}
