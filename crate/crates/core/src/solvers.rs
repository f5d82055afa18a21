//! Penalized least-squares engines: accelerated proximal gradient for any
//! [`PenaltySpec`], an ℓ1 Dantzig selector, minimum-norm OLS, and a
//! low-rank plus sparse proximal gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, max_abs, power_iteration_sym, rows_serde, Matrix};
use crate::penalties::{soft, svt, PenaltySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `1/L` with `L` from power iteration on the Gram matrix; doubled if
    /// the sufficient-decrease test fails.
    #[default]
    Fixed,
    /// Start from a cheap lower estimate of `L` and double on failure.
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub step_rule: StepRule,
    pub restart: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            rel_tol: 1e-8,
            step_rule: StepRule::Fixed,
            restart: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Parameter("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowRankParts {
    #[serde(with = "rows_serde")]
    pub low_rank: Matrix,
    #[serde(with = "rows_serde")]
    pub sparse: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(with = "rows_serde")]
    pub coeffs: Matrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_trace: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub lambda_used: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowrank: Option<LowRankParts>,
}

impl FitResult {
    /// Drops the per-iteration objective trace (kept out of JSON output
    /// unless requested).
    pub fn without_trace(mut self) -> Self {
        self.objective_trace.clear();
        self
    }
}

fn check_shapes(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(Error::Structural(format!(
            "design has {} rows, response has {}",
            x.nrows(),
            y.nrows()
        )));
    }
    if x.nrows() == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    ensure_finite(x, "design")?;
    ensure_finite(y, "response")
}

/// Quadratic part `(1/n)‖Y − Xβ‖²` kept in Gram form.
struct Quadratic<'a> {
    gram: &'a Matrix,
    cross: Matrix,
    y_sq: f64,
}

impl Quadratic<'_> {
    fn value(&self, b: &Matrix) -> f64 {
        let gb = self.gram * b;
        (b.dot(&gb) - 2.0 * b.dot(&self.cross) + self.y_sq).max(0.0)
    }

    fn grad(&self, b: &Matrix) -> Matrix {
        (self.gram * b - &self.cross) * 2.0
    }
}

/// A least-squares problem reduced to `XᵀX/n`, `XᵀY/n` and the response
/// energies, so that many fits (columns, λ grids) share one Gram matrix.
#[derive(Debug, Clone)]
pub struct GramProblem {
    gram: Matrix,
    cross: Matrix,
    y_sq: Vec<f64>,
    lip: f64,
}

impl GramProblem {
    pub fn new(x: &Matrix, y: &Matrix) -> Result<Self> {
        check_shapes(x, y)?;
        let n = x.nrows() as f64;
        let gram = x.tr_mul(x) / n;
        let lip = 2.0 * power_iteration_sym(&gram, 50);
        Ok(Self {
            cross: x.tr_mul(y) / n,
            y_sq: y.column_iter().map(|c| c.norm_squared() / n).collect(),
            gram,
            lip,
        })
    }

    pub fn n_features(&self) -> usize {
        self.gram.nrows()
    }

    pub fn n_responses(&self) -> usize {
        self.cross.ncols()
    }

    fn quadratic(&self, column: Option<usize>) -> Quadratic<'_> {
        match column {
            Some(j) => Quadratic {
                gram: &self.gram,
                cross: self.cross.columns(j, 1).into_owned(),
                y_sq: self.y_sq[j],
            },
            None => Quadratic {
                gram: &self.gram,
                cross: self.cross.clone(),
                y_sq: self.y_sq.iter().sum(),
            },
        }
    }

    /// Penalized fit of response column `j` alone.
    pub fn fit_column(
        &self,
        j: usize,
        penalty: &PenaltySpec,
        lambda: f64,
        cfg: &SolverConfig,
        init: Option<&Matrix>,
    ) -> Result<FitResult> {
        if j >= self.n_responses() {
            return Err(Error::Structural(format!("response column {j} out of range")));
        }
        self.fit_with(Some(j), penalty, lambda, cfg, init)
    }

    /// Penalized fit of all response columns under one matrix penalty.
    pub fn fit_joint(
        &self,
        penalty: &PenaltySpec,
        lambda: f64,
        cfg: &SolverConfig,
        init: Option<&Matrix>,
    ) -> Result<FitResult> {
        self.fit_with(None, penalty, lambda, cfg, init)
    }

    fn fit_with(
        &self,
        column: Option<usize>,
        penalty: &PenaltySpec,
        lambda: f64,
        cfg: &SolverConfig,
        init: Option<&Matrix>,
    ) -> Result<FitResult> {
        cfg.validate()?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        let q = self.n_features();
        let r = if column.is_some() { 1 } else { self.n_responses() };
        let start = match init {
            Some(b) if b.shape() == (q, r) => b.clone(),
            Some(b) => {
                return Err(Error::Structural(format!(
                    "warm start has shape {:?}, expected ({q}, {r})",
                    b.shape()
                )))
            }
            None => Matrix::zeros(q, r),
        };
        penalty_value(penalty, &start)?;
        solve_composite(&self.quadratic(column), self.lip, penalty, lambda, cfg, start)
    }
}

fn prox_matrix(penalty: &PenaltySpec, m: &Matrix, tau: f64) -> Result<Matrix> {
    if tau == 0.0 {
        return Ok(m.clone());
    }
    let v = penalty.prox(m.as_slice(), tau)?;
    Ok(Matrix::from_vec(m.nrows(), m.ncols(), v))
}

fn penalty_value(penalty: &PenaltySpec, m: &Matrix) -> Result<f64> {
    penalty.value(m.as_slice())
}

/// LASSO-type fit of `(1/n)‖Y − Xβ‖²_F + λ·R(vec β)` where `vec` is the
/// column-major flattening of the `q × r` coefficient matrix.
pub fn fista_fit(
    x: &Matrix,
    y: &Matrix,
    penalty: &PenaltySpec,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    fista_fit_from(x, y, penalty, lambda, cfg, None)
}

/// [`fista_fit`] with an optional warm start.
pub fn fista_fit_from(
    x: &Matrix,
    y: &Matrix,
    penalty: &PenaltySpec,
    lambda: f64,
    cfg: &SolverConfig,
    init: Option<&Matrix>,
) -> Result<FitResult> {
    GramProblem::new(x, y)?.fit_joint(penalty, lambda, cfg, init)
}

fn solve_composite(
    quad: &Quadratic,
    power: f64,
    penalty: &PenaltySpec,
    lambda: f64,
    cfg: &SolverConfig,
    start: Matrix,
) -> Result<FitResult> {
    let mut lip = match cfg.step_rule {
        StepRule::Fixed => power,
        StepRule::Backtracking => 2.0 * quad.gram.trace() / quad.gram.nrows().max(1) as f64,
    };
    if !(lip.is_finite() && lip > 0.0) {
        // Zero design: any step works; the solution is prox of the origin.
        lip = 1.0;
    }
    let objective = |b: &Matrix| -> Result<f64> {
        Ok(quad.value(b) + lambda * penalty_value(penalty, b)?)
    };

    let mut beta = start;
    let mut f_beta = objective(&beta)?;
    let mut trace = vec![f_beta];
    let mut z = beta.clone();
    let mut t = 1.0_f64;
    let mut converged = false;
    let mut iters = 0;

    while iters < cfg.max_iters {
        iters += 1;
        let fz = quad.value(&z);
        let gz = quad.grad(&z);
        // Backtracking on the quadratic upper model.
        let next = loop {
            let step = 1.0 / lip;
            let cand = prox_matrix(penalty, &(&z - &gz * step), lambda * step)?;
            let diff = &cand - &z;
            let model = fz + gz.dot(&diff) + 0.5 * lip * diff.norm_squared();
            if quad.value(&cand) <= model + 1e-12 * (1.0 + fz.abs()) {
                break cand;
            }
            lip *= 2.0;
            if !lip.is_finite() {
                return Err(Error::Numerical("step size underflow in proximal gradient".into()));
            }
        };
        let f_next = objective(&next)?;
        if !f_next.is_finite() {
            return Err(Error::Numerical("objective became non-finite".into()));
        }
        if f_next > f_beta && cfg.restart && z != beta {
            // Function-value restart: drop momentum and retry from beta.
            z = beta.clone();
            t = 1.0;
            continue;
        }
        let moved = (&next - &z).norm() / next.norm().max(1.0);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // A plain proximal step from beta cannot increase the objective
        // beyond rounding, so keep the best value in the trace.
        let prev = std::mem::replace(&mut beta, next);
        f_beta = if cfg.restart { f_next.min(f_beta) } else { f_next };
        trace.push(f_beta);
        z = &beta + (&beta - &prev) * ((t - 1.0) / t_next);
        t = t_next;

        if moved < cfg.rel_tol && fixed_point_residual(quad, penalty, lambda, lip, &beta)? < cfg.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        coeffs: beta,
        objective_trace: trace,
        iters,
        converged,
        lambda_used: lambda,
        lowrank: None,
    })
}

/// `‖β − prox_{λ/L}(β − ∇f(β)/L)‖ / max(1, ‖β‖)`.
fn fixed_point_residual(
    quad: &Quadratic,
    penalty: &PenaltySpec,
    lambda: f64,
    lip: f64,
    beta: &Matrix,
) -> Result<f64> {
    let step = 1.0 / lip;
    let mapped = prox_matrix(penalty, &(beta - quad.grad(beta) * step), lambda * step)?;
    Ok((beta - mapped).norm() / beta.norm().max(1.0))
}

/// Ordinary least squares via an SVD pseudo-inverse; rank-deficient
/// designs get the minimum-norm solution.
pub fn ols_fit(x: &Matrix, y: &Matrix) -> Result<FitResult> {
    check_shapes(x, y)?;
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, s| m.max(*s));
    let eps = smax * x.nrows().max(x.ncols()) as f64 * f64::EPSILON;
    let coeffs = svd
        .solve(y, eps)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
    let rss = (y - x * &coeffs).norm_squared() / x.nrows() as f64;
    Ok(FitResult {
        coeffs,
        objective_trace: vec![rss],
        iters: 1,
        converged: true,
        lambda_used: 0.0,
        lowrank: None,
    })
}

/// ℓ1 Dantzig selector: `min ‖β‖₁` subject to `‖Xᵀ(y − Xβ)/n‖_∞ ≤ λ`.
///
/// Linearized ADMM on the split `Gβ + z = c` with `G = XᵀX/n`,
/// `c = Xᵀy/n` and `z` confined to the ℓ∞ ball of radius λ.
pub fn dantzig_l1(x: &Matrix, y: &Matrix, lambda: f64, cfg: &SolverConfig) -> Result<FitResult> {
    check_shapes(x, y)?;
    cfg.validate()?;
    if y.ncols() != 1 {
        return Err(Error::Structural("Dantzig selector takes a single response column".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let n = x.nrows() as f64;
    let (g, c) = (&(x.tr_mul(x) / n), &(x.tr_mul(y) / n));
    let q = x.ncols();
    if max_abs(c) <= lambda {
        return Ok(FitResult {
            coeffs: Matrix::zeros(q, 1),
            objective_trace: vec![0.0],
            iters: 0,
            converged: true,
            lambda_used: lambda,
            lowrank: None,
        });
    }
    let g_norm_sq = power_iteration_sym(&(g * g), 100).max(f64::MIN_POSITIVE) * 1.01;
    let eta = 1.0 / g_norm_sq;
    let rho = 1.0 / lambda;
    let tol = cfg.rel_tol * max_abs(c).max(1.0);

    let mut beta = Matrix::zeros(q, 1);
    let mut z = c.map(|v| v.clamp(-lambda, lambda));
    let mut u = Matrix::zeros(q, 1);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    while iters < cfg.max_iters {
        iters += 1;
        let resid = g * &beta + &z - c + &u;
        let step = &beta - g * resid * eta;
        let beta_next = step.map(|v| soft(v, eta / rho));
        let gb = g * &beta_next;
        let z_next = (c - &gb - &u).map(|v| v.clamp(-lambda, lambda));
        let primal = &gb + &z_next - c;
        u += &primal;
        let change = max_abs(&(&beta_next - &beta)) + max_abs(&(&z_next - &z));
        beta = beta_next;
        z = z_next;
        trace.push(beta.iter().map(|v| v.abs()).sum());
        if max_abs(&primal) < tol && change < tol {
            converged = true;
            break;
        }
    }
    let slack = (max_abs(&(c - g * &beta)) - lambda).max(0.0);
    Ok(FitResult {
        coeffs: beta,
        objective_trace: trace,
        iters,
        converged: converged && slack <= 1e-6,
        lambda_used: lambda,
        lowrank: None,
    })
}

/// Low-rank plus sparse fit of
/// `½‖Y − X(L+S)‖²_F + λ‖L‖_* + μ‖S‖₁` with `‖L‖_max ≤ α/p`.
///
/// Proximal gradient on `(L, S)` jointly. The `L` step soft-thresholds
/// singular values and then clips entries to the box, an inexact prox for
/// the constrained nuclear term; steps that do not decrease the objective
/// are retried with a halved step.
pub fn lowrank_sparse_fit(
    x: &Matrix,
    y: &Matrix,
    lambda_nuc: f64,
    mu_sparse: f64,
    alpha_box: f64,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    check_shapes(x, y)?;
    cfg.validate()?;
    let (q, r) = (x.ncols(), y.ncols());
    let p = q.max(r) as f64;
    if !(lambda_nuc >= 0.0 && mu_sparse >= 0.0 && lambda_nuc.is_finite() && mu_sparse.is_finite()) {
        return Err(Error::Parameter("penalty levels must be finite and nonnegative".into()));
    }
    if !(alpha_box >= 1.0 && alpha_box <= p) {
        return Err(Error::Parameter(format!(
            "alpha must lie in [1, {p}], got {alpha_box}"
        )));
    }
    let bound = alpha_box / p;
    let gram = x.tr_mul(x);
    let cross = x.tr_mul(y);
    let y_sq = y.norm_squared();
    let smooth = |b: &Matrix| 0.5 * (b.dot(&(&gram * b)) - 2.0 * b.dot(&cross) + y_sq).max(0.0);
    let objective = |l: &Matrix, s: &Matrix| -> f64 {
        let nuc: f64 = l.clone().singular_values().sum();
        let l1: f64 = s.iter().map(|v| v.abs()).sum();
        smooth(&(l + s)) + lambda_nuc * nuc + mu_sparse * l1
    };
    // Gradient of the joint smooth term is Lipschitz with constant 2λ_max(XᵀX).
    let lip = (2.0 * power_iteration_sym(&gram, 100) * 1.01).max(f64::MIN_POSITIVE);
    let mut step = 1.0 / lip;

    let mut l = Matrix::zeros(q, r);
    let mut s = Matrix::zeros(q, r);
    let mut f = objective(&l, &s);
    let mut trace = vec![f];
    let mut converged = false;
    let mut iters = 0;
    while iters < cfg.max_iters {
        iters += 1;
        let grad = &gram * (&l + &s) - &cross;
        let (l_next, s_next, f_next) = loop {
            let l_cand = svt(&(&l - &grad * step), step * lambda_nuc)?
                .map(|v| v.clamp(-bound, bound));
            let s_cand = (&s - &grad * step).map(|v| soft(v, step * mu_sparse));
            let f_cand = objective(&l_cand, &s_cand);
            if f_cand <= f || step < 1e-12 / lip {
                break (l_cand, s_cand, f_cand);
            }
            step *= 0.5;
        };
        if f_next > f {
            // No descent even at a tiny step: stationary for this scheme.
            converged = true;
            break;
        }
        let moved = ((&l_next - &l).norm() + (&s_next - &s).norm()) / (l_next.norm() + s_next.norm()).max(1.0);
        l = l_next;
        s = s_next;
        f = f_next;
        trace.push(f);
        if moved < cfg.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        coeffs: &l + &s,
        objective_trace: trace,
        iters,
        converged,
        lambda_used: lambda_nuc,
        lowrank: Some(LowRankParts {
            low_rank: l,
            sparse: s,
        }),
    })
}

/// Sample-size thresholds `(n_dev, n_RE)` of the deviation and restricted
/// eigenvalue conditions, with the absolute constants set to `c_abs`.
#[allow(clippy::too_many_arguments)]
pub fn sample_size_theory(
    width_unit_ball_sq: f64,
    width_cone_sq: f64,
    gamma2: f64,
    k: f64,
    c_factor: f64,
    lambda_min_sigma: f64,
    phi_bar: f64,
    c_abs: f64,
) -> Result<(f64, f64)> {
    if !(gamma2 > 0.0 && gamma2 <= 2.0) {
        return Err(Error::Parameter(format!("tail index must lie in (0, 2], got {gamma2}")));
    }
    if !(lambda_min_sigma > 0.0) {
        return Err(Error::Parameter("smallest eigenvalue of the covariance must be positive".into()));
    }
    let n_dev = (c_abs * width_unit_ball_sq).powf(4.0 / gamma2 - 1.0);
    let dependence = 16.0 * phi_bar.powi(2) * k.powi(4) * c_factor.powi(2) / lambda_min_sigma.powi(2);
    let n_re = (c_abs * dependence.max(1.0) * width_cone_sq).powf(2.0 / gamma2);
    Ok((n_dev, n_re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(n: usize, m: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, m, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn identity_design_ols() {
        let y = gaussian(4, 2, 1);
        let fit = ols_fit(&Matrix::identity(4, 4), &y).unwrap();
        assert!((fit.coeffs - y).amax() < 1e-12);
    }

    #[test]
    fn duplicated_column_splits_weight() {
        let col = gaussian(10, 1, 2);
        let x = Matrix::from_columns(&[col.column(0), col.column(0)]);
        let y = &col * 3.0;
        let fit = ols_fit(&x, &y).unwrap();
        assert!((fit.coeffs[(0, 0)] - 1.5).abs() < 1e-10);
        assert!((fit.coeffs[(1, 0)] - 1.5).abs() < 1e-10);
    }

    #[test]
    fn normal_equations_hold() {
        let x = gaussian(30, 5, 3);
        let y = gaussian(30, 2, 4);
        let fit = ols_fit(&x, &y).unwrap();
        assert!(max_abs(&x.tr_mul(&(&y - &x * &fit.coeffs))) < 1e-8);
    }

    #[test]
    fn lambda_zero_matches_ols() {
        let x = gaussian(20, 10, 5);
        let y = gaussian(20, 1, 6);
        let ols = ols_fit(&x, &y).unwrap();
        let fit = fista_fit(&x, &y, &PenaltySpec::L1, 0.0, &SolverConfig::default()).unwrap();
        assert!(fit.converged);
        assert!((&fit.coeffs - &ols.coeffs).norm() / ols.coeffs.norm() < 1e-6);
    }

    #[test]
    fn large_lambda_gives_zero() {
        let x = gaussian(40, 6, 7);
        let y = gaussian(40, 1, 8);
        let lmax = max_abs(&(x.tr_mul(&y) * (2.0 / 40.0)));
        let fit = fista_fit(&x, &y, &PenaltySpec::L1, lmax * 1.0001, &SolverConfig::default()).unwrap();
        assert_eq!(fit.coeffs, Matrix::zeros(6, 1));
    }

    #[test]
    fn trace_is_monotone() {
        let x = gaussian(50, 20, 9);
        let y = gaussian(50, 1, 10);
        let fit = fista_fit(&x, &y, &PenaltySpec::L1, 0.05, &SolverConfig::default()).unwrap();
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn dantzig_zero_when_origin_feasible() {
        let x = gaussian(30, 4, 11);
        let y = gaussian(30, 1, 12);
        let lam = max_abs(&(x.tr_mul(&y) / 30.0));
        let fit = dantzig_l1(&x, &y, lam, &SolverConfig::default()).unwrap();
        assert_eq!(fit.coeffs, Matrix::zeros(4, 1));
        assert!(fit.converged);
    }

    #[test]
    fn lowrank_box_always_holds() {
        let x = gaussian(40, 5, 13);
        let y = &x * gaussian(5, 5, 14) * 3.0;
        let fit = lowrank_sparse_fit(&x, &y, 0.1, 0.1, 1.0, &SolverConfig::default()).unwrap();
        let parts = fit.lowrank.unwrap();
        assert!(max_abs(&parts.low_rank) <= 1.0 / 5.0 + 1e-10);
    }

    #[test]
    fn lowrank_trace_monotone() {
        let x = gaussian(40, 5, 15);
        let y = gaussian(40, 5, 16);
        let fit = lowrank_sparse_fit(&x, &y, 1.0, 1.0, 5.0, &SolverConfig::default()).unwrap();
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sample_size_exponents() {
        let (n2, _) = sample_size_theory(10.0, 5.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((n2 - 10.0).abs() < 1e-12);
        let (n1, _) = sample_size_theory(10.0, 5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((n1 - 1000.0).abs() < 1e-9);
        // Dependence term 16·K⁴𝖢²/Λ² = 16 → 64 when Λ halves; γ = 2 keeps it linear.
        let (_, a) = sample_size_theory(1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let (_, b) = sample_size_theory(1.0, 1.0, 2.0, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert!((a - 16.0).abs() < 1e-12 && (b - 64.0).abs() < 1e-12);
        assert!(sample_size_theory(1.0, 1.0, 2.5, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    fn orthonormal(n: usize, q: usize, seed: u64) -> Matrix {
        // Columns scaled so that XᵀX/n = I.
        let qr = gaussian(n, q, seed).qr();
        qr.q() * (n as f64).sqrt()
    }

    #[test]
    fn orthonormal_lasso_and_dantzig() {
        let x = orthonormal(40, 6, 17);
        let y = gaussian(40, 1, 18) * 2.0;
        let c = x.tr_mul(&y) / 40.0;
        let lam_d = 0.3;
        let expected = c.map(|v| soft(v, lam_d));
        let lasso = fista_fit(&x, &y, &PenaltySpec::L1, 2.0 * lam_d, &SolverConfig::default()).unwrap();
        assert!(max_abs(&(&lasso.coeffs - &expected)) < 1e-8);
        let dz = dantzig_l1(&x, &y, lam_d, &SolverConfig::default()).unwrap();
        assert!(dz.converged, "iters {}", dz.iters);
        assert!(max_abs(&(&dz.coeffs - &expected)) < 1e-6);
    }
}
