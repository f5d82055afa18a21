//! Temporal-dependence quantities of linear processes
//! `x_t = Σ_{j≥0} A_j η_{t-j}`, `η_t ~ IID(0, Σ_η)`.
//!
//! The central quantity is the dependence factor
//! `𝖢(𝒜) = Σ_{i≥0} Σ_{j≥0} ‖A_{i+j}‖₂ ‖A_j‖₂`, which equals one for white
//! noise and grows without bound as a VAR generator approaches instability.
//! Alongside it live the spectral-density based stability factors
//! `ℳ(f_X) = sup_θ Λ_max(f_X(θ))` and `𝔪(f_X) = inf_θ Λ_min(f_X(θ))`, and
//! the stationary covariance of a VAR(1).
//!
//! Infinite series are truncated once a geometric extrapolation of the
//! coefficient norms certifies that the omitted tail is below the requested
//! tolerance. Suprema and infima over frequencies are taken on a uniform
//! grid, so `m_upper` is a lower estimate of the essential supremum and
//! `m_lower` an upper estimate of the essential infimum.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_square, Matrix};
use crate::model::VarModel;

/// Number of trailing norm ratios used to extrapolate the geometric tail.
const RATIO_WINDOW: usize = 5;
/// Default θ-grid size for the stability factors.
pub const DEFAULT_GRID: usize = 512;

/// Spectral radius `max |λ_i(A)|`.
///
/// Eigenvalues come from a real Schur decomposition (Hessenberg reduction
/// followed by shifted QR), which handles complex-conjugate dominant pairs
/// and strongly non-normal matrices. If the QR iteration fails to converge
/// the Gelfand limit `‖A^k‖^{1/k}` is used instead.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    let n = ensure_square(a, "matrix")?;
    ensure_finite(a, "matrix")?;
    if n == 0 {
        return Ok(0.0);
    }
    match Schur::try_new(a.clone(), f64::EPSILON, 100_000) {
        Some(schur) => Ok(schur
            .complex_eigenvalues()
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()))),
        None => Ok(gelfand_estimate(a)),
    }
}

fn gelfand_estimate(a: &Matrix) -> f64 {
    // Repeated squaring: ‖A^(2^k)‖^(1/2^k), rescaling to avoid overflow.
    let mut m = a.clone();
    let mut log_scale = 0.0_f64;
    let mut exponent = 1.0_f64;
    for _ in 0..40 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        log_scale += norm.ln() / exponent;
        m /= norm;
        m = &m * &m;
        exponent *= 2.0;
    }
    let norm = m.norm();
    if norm == 0.0 {
        0.0
    } else {
        (log_scale + norm.ln() / exponent).exp()
    }
}

/// Spectral norm (largest singular value).
pub fn op_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Series truncation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_terms: 100_000,
        }
    }
}

/// How the filter coefficients `A_j` are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    /// `A_j = G^j` for the VAR(1) recursion `x_t = G x_{t-1} + η_t`.
    Var1 { generator: Matrix },
    /// A finite list `A_0, …, A_q` (moving-average filter).
    Coefficients(Vec<Matrix>),
}

/// A causal linear process driven by IID innovations with covariance `Σ_η`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProcessSpec {
    filter: Filter,
    sigma_eta: Matrix,
    truncation: Truncation,
}

impl LinearProcessSpec {
    pub fn new(filter: Filter, sigma_eta: Matrix, truncation: Truncation) -> Result<Self> {
        let p = ensure_square(&sigma_eta, "innovation covariance")?;
        ensure_finite(&sigma_eta, "innovation covariance")?;
        let asym = (&sigma_eta - sigma_eta.transpose()).amax();
        if asym > 1e-10 * (1.0 + sigma_eta.amax()) {
            return Err(Error::Parameter("innovation covariance is not symmetric".into()));
        }
        if p > 0 && sigma_eta.clone().symmetric_eigenvalues().min() < -1e-10 * (1.0 + sigma_eta.amax())
        {
            return Err(Error::Parameter(
                "innovation covariance is not positive semidefinite".into(),
            ));
        }
        if !(truncation.tol > 0.0) || truncation.max_terms == 0 {
            return Err(Error::Parameter("truncation needs tol > 0 and max_terms >= 1".into()));
        }
        match &filter {
            Filter::Var1 { generator } => {
                if ensure_square(generator, "generator")? != p {
                    return Err(Error::Structural(format!(
                        "generator is {}x{0}, innovation covariance is {p}x{p}",
                        generator.nrows()
                    )));
                }
                ensure_finite(generator, "generator")?;
            }
            Filter::Coefficients(coeffs) => {
                if coeffs.is_empty() {
                    return Err(Error::Structural("filter needs at least A_0".into()));
                }
                for a in coeffs {
                    if a.nrows() != p || a.ncols() != p {
                        return Err(Error::Structural(format!(
                            "filter coefficient is {}x{}, expected {p}x{p}",
                            a.nrows(),
                            a.ncols()
                        )));
                    }
                    ensure_finite(a, "filter coefficient")?;
                }
            }
        }
        Ok(Self {
            filter,
            sigma_eta,
            truncation,
        })
    }

    /// VAR(1) `x_t = G x_{t-1} + η_t`.
    pub fn var1(generator: Matrix, sigma_eta: Matrix) -> Result<Self> {
        Self::new(Filter::Var1 { generator }, sigma_eta, Truncation::default())
    }

    /// Linear process of a VAR(d) through its companion form; the
    /// innovation covariance is embedded in the leading p×p block.
    pub fn from_var(model: &VarModel, sigma_eta: &Matrix) -> Result<Self> {
        let p = model.p();
        if sigma_eta.nrows() != p || sigma_eta.ncols() != p {
            return Err(Error::Structural(format!(
                "innovation covariance is {}x{}, model dimension is {p}",
                sigma_eta.nrows(),
                sigma_eta.ncols()
            )));
        }
        let dp = p * model.d();
        let mut sigma = Matrix::zeros(dp, dp);
        sigma.view_mut((0, 0), (p, p)).copy_from(sigma_eta);
        Self::var1(model.companion(), sigma)
    }

    /// White noise: `A_0 = I`, all other coefficients zero.
    pub fn white_noise(sigma_eta: Matrix) -> Result<Self> {
        let p = sigma_eta.nrows();
        Self::new(
            Filter::Coefficients(vec![Matrix::identity(p, p)]),
            sigma_eta,
            Truncation::default(),
        )
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Result<Self> {
        if !(truncation.tol > 0.0) || truncation.max_terms == 0 {
            return Err(Error::Parameter("truncation needs tol > 0 and max_terms >= 1".into()));
        }
        self.truncation = truncation;
        Ok(self)
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn sigma_eta(&self) -> &Matrix {
        &self.sigma_eta
    }

    pub fn dim(&self) -> usize {
        self.sigma_eta.nrows()
    }

    /// Spectral radius and norm of the VAR(1) generator. Finite filters are
    /// always stable and report ρ = 0 and the largest ‖A_j‖ for j ≥ 1.
    fn generator_summary(&self) -> Result<(f64, f64)> {
        match &self.filter {
            Filter::Var1 { generator } => Ok((spectral_radius(generator)?, op_norm(generator))),
            Filter::Coefficients(coeffs) => Ok((
                0.0,
                coeffs.iter().skip(1).map(op_norm).fold(0.0, f64::max),
            )),
        }
    }
}

/// Summary of the dependence quantities of a linear process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub c_factor: f64,
    pub rho: f64,
    pub op_norm: f64,
    pub m_upper: Option<f64>,
    pub m_lower: Option<f64>,
    pub truncation_terms: usize,
    pub tail_bound: f64,
}

/// Truncated coefficient sequence `A_0..A_J` with certified tails.
#[derive(Debug, Clone)]
pub struct FilterExpansion {
    coeffs: Vec<Matrix>,
    norms: Vec<f64>,
    /// Bound on `Σ_{j>J} ‖A_j‖₂`.
    norm_tail: f64,
    c_partial: f64,
    /// Bound on `𝖢 − c_partial`.
    c_tail: f64,
    rho: f64,
    op_norm: f64,
}

impl FilterExpansion {
    pub fn new(spec: &LinearProcessSpec) -> Result<Self> {
        let (rho, op) = spec.generator_summary()?;
        match &spec.filter {
            Filter::Coefficients(coeffs) => {
                let norms: Vec<f64> = coeffs.iter().map(op_norm).collect();
                let c_partial = partial_c_factor(&norms);
                Ok(Self {
                    coeffs: coeffs.clone(),
                    norms,
                    norm_tail: 0.0,
                    c_partial,
                    c_tail: 0.0,
                    rho,
                    op_norm: op,
                })
            }
            Filter::Var1 { generator } => {
                if rho >= 1.0 {
                    return Err(Error::Instability { rho });
                }
                Self::expand_var1(generator, rho, op, spec.truncation)
            }
        }
    }

    fn expand_var1(g: &Matrix, rho: f64, op: f64, trunc: Truncation) -> Result<Self> {
        let p = g.nrows();
        // Conservative floor for the extrapolated decay ratio: strictly above ρ.
        let ratio_floor = rho + 0.1 * (1.0 - rho);
        let mut coeffs = vec![Matrix::identity(p, p)];
        let mut norms = vec![if p == 0 { 0.0 } else { 1.0 }];
        loop {
            let j = norms.len() - 1;
            let last = norms[j];
            if last == 0.0 {
                // A_j = 0 implies every later power vanishes.
                let c_partial = partial_c_factor(&norms);
                return Ok(Self {
                    coeffs,
                    norms,
                    norm_tail: 0.0,
                    c_partial,
                    c_tail: 0.0,
                    rho,
                    op_norm: op,
                });
            }
            if j >= RATIO_WINDOW {
                let window_ratio = norms[j - RATIO_WINDOW..=j]
                    .windows(2)
                    .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
                    .fold(0.0, f64::max);
                let r = window_ratio.max(ratio_floor);
                if r < 1.0 {
                    let head: f64 = norms.iter().sum();
                    let norm_tail = last * r / (1.0 - r);
                    let c_tail = head * norm_tail + last * last * r * r / ((1.0 - r * r) * (1.0 - r));
                    if c_tail <= trunc.tol && norm_tail <= trunc.tol {
                        let c_partial = partial_c_factor(&norms);
                        return Ok(Self {
                            coeffs,
                            norms,
                            norm_tail,
                            c_partial,
                            c_tail,
                            rho,
                            op_norm: op,
                        });
                    }
                }
            }
            if norms.len() >= trunc.max_terms {
                let partial = partial_c_factor(&norms);
                return Err(Error::Truncation {
                    partial,
                    terms: norms.len(),
                    tail_bound: f64::INFINITY,
                });
            }
            let next = g * coeffs.last().expect("non-empty");
            norms.push(op_norm(&next));
            coeffs.push(next);
        }
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn terms(&self) -> usize {
        self.norms.len()
    }

    pub fn c_factor(&self) -> f64 {
        self.c_partial
    }

    pub fn c_tail(&self) -> f64 {
        self.c_tail
    }

    /// Bound on the spectral norm of the omitted part of `𝒜(z)`, |z| = 1.
    pub fn norm_tail(&self) -> f64 {
        self.norm_tail
    }

    /// `𝒜(z) = Σ_j A_j z^j` (truncated).
    pub fn transfer(&self, z: Complex64) -> DMatrix<Complex64> {
        let p = self.coeffs.first().map_or(0, |a| a.nrows());
        let mut out = DMatrix::<Complex64>::zeros(p, p);
        let mut zj = Complex64::new(1.0, 0.0);
        for a in &self.coeffs {
            out.zip_apply(a, |o, v| *o += zj * v);
            zj *= z;
        }
        out
    }

    /// `f_X(θ) = 𝒜(e^{-iθ}) Σ_η 𝒜(e^{-iθ})* / 2π`.
    pub fn density(&self, sigma_eta: &Matrix, theta: f64) -> DMatrix<Complex64> {
        let a = self.transfer(Complex64::from_polar(1.0, -theta));
        let sigma = sigma_eta.map(|v| Complex64::new(v / (2.0 * PI), 0.0));
        let mut f = &a * sigma * a.adjoint();
        hermitize(&mut f);
        f
    }
}

/// `Σ_j a_j Σ_{k≥j} a_k` over the available norms.
fn partial_c_factor(norms: &[f64]) -> f64 {
    let mut suffix = 0.0;
    let mut total = 0.0;
    for &a in norms.iter().rev() {
        suffix += a;
        total += a * suffix;
    }
    total
}

fn hermitize(f: &mut DMatrix<Complex64>) {
    let n = f.nrows();
    for i in 0..n {
        f[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (f[(i, j)] + f[(j, i)].conj()) * 0.5;
            f[(i, j)] = avg;
            f[(j, i)] = avg.conj();
        }
    }
}

fn hermitian_extremes(m: DMatrix<Complex64>) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let eig = m.symmetric_eigenvalues();
    (eig.min(), eig.max())
}

/// Dependence factor `𝖢(𝒜)` with a certified truncation tail.
///
/// The report's `m_upper`/`m_lower` are left empty; see
/// [`dependence_report`] for the full summary.
pub fn dependence_factor(spec: &LinearProcessSpec) -> Result<DependenceReport> {
    let exp = FilterExpansion::new(spec)?;
    Ok(DependenceReport {
        c_factor: exp.c_factor(),
        rho: exp.rho,
        op_norm: exp.op_norm,
        m_upper: None,
        m_lower: None,
        truncation_terms: exp.terms(),
        tail_bound: exp.c_tail(),
    })
}

/// Dependence factor together with grid estimates of `ℳ(f_X)` and `𝔪(f_X)`.
pub fn dependence_report(spec: &LinearProcessSpec, grid_size: usize) -> Result<DependenceReport> {
    let exp = FilterExpansion::new(spec)?;
    let (m_upper, m_lower) = stability_from_expansion(&exp, spec.sigma_eta(), grid_size)?;
    Ok(DependenceReport {
        c_factor: exp.c_factor(),
        rho: exp.rho,
        op_norm: exp.op_norm,
        m_upper: Some(m_upper),
        m_lower: Some(m_lower),
        truncation_terms: exp.terms(),
        tail_bound: exp.c_tail(),
    })
}

/// Spectral density matrix at frequency `theta ∈ [−π, π]`.
pub fn spectral_density(spec: &LinearProcessSpec, theta: f64) -> Result<DMatrix<Complex64>> {
    if !(-PI..=PI).contains(&theta) {
        return Err(Error::Parameter(format!("frequency {theta} outside [-pi, pi]")));
    }
    let exp = FilterExpansion::new(spec)?;
    Ok(exp.density(spec.sigma_eta(), theta))
}

fn theta_grid(grid_size: usize) -> Result<impl Iterator<Item = f64>> {
    if grid_size < 8 {
        return Err(Error::Parameter(format!(
            "frequency grid needs at least 8 points, got {grid_size}"
        )));
    }
    Ok((0..grid_size).map(move |k| -PI + 2.0 * PI * k as f64 / grid_size as f64))
}

fn stability_from_expansion(
    exp: &FilterExpansion,
    sigma_eta: &Matrix,
    grid_size: usize,
) -> Result<(f64, f64)> {
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    for theta in theta_grid(grid_size)? {
        let (lo, hi) = hermitian_extremes(exp.density(sigma_eta, theta));
        upper = upper.max(hi);
        lower = lower.min(lo);
    }
    Ok((upper, lower))
}

/// Grid estimates `(ℳ(f_X), 𝔪(f_X))` of the extreme eigenvalues of the
/// spectral density over θ.
pub fn stability_factors(spec: &LinearProcessSpec, grid_size: usize) -> Result<(f64, f64)> {
    let exp = FilterExpansion::new(spec)?;
    stability_from_expansion(&exp, spec.sigma_eta(), grid_size)
}

/// Grid estimates `(μ_min, μ_max)` of the extreme eigenvalues of
/// `𝒜(z)*𝒜(z)` over the unit circle.
pub fn mu_bounds(spec: &LinearProcessSpec, grid_size: usize) -> Result<(f64, f64)> {
    let exp = FilterExpansion::new(spec)?;
    let mut mu_min = f64::INFINITY;
    let mut mu_max = f64::NEG_INFINITY;
    for theta in theta_grid(grid_size)? {
        let a = exp.transfer(Complex64::from_polar(1.0, -theta));
        let mut g = a.adjoint() * &a;
        hermitize(&mut g);
        let (lo, hi) = hermitian_extremes(g);
        mu_min = mu_min.min(lo);
        mu_max = mu_max.max(hi);
    }
    Ok((mu_min, mu_max))
}

/// Stationary covariance of `x_t = Bᵀ x_{t-1} + η_t`, the solution of
/// `Σ = Bᵀ Σ B + Σ_η`.
///
/// Accumulates `Σ_j (Bᵀ)^j Σ_η B^j` by doubling: after k steps the partial
/// sum holds the first 2^k terms and the remainder equals `A Σ Aᵀ` with
/// `A = (Bᵀ)^{2^k}`, so `‖A‖² ‖S‖ / (1 − ‖A‖²)` bounds it.
pub fn solve_lyapunov(b: &Matrix, sigma_eta: &Matrix) -> Result<Matrix> {
    let p = ensure_square(b, "transition")?;
    if sigma_eta.nrows() != p || sigma_eta.ncols() != p {
        return Err(Error::Structural(format!(
            "innovation covariance is {}x{}, transition is {p}x{p}",
            sigma_eta.nrows(),
            sigma_eta.ncols()
        )));
    }
    ensure_finite(b, "transition")?;
    ensure_finite(sigma_eta, "innovation covariance")?;
    let rho = spectral_radius(b)?;
    if rho >= 1.0 {
        return Err(Error::Instability { rho });
    }
    let mut a = b.transpose();
    let mut s = sigma_eta.clone();
    for _ in 0..64 {
        let a_norm = a.norm();
        let s_norm = s.norm();
        if a_norm < 1.0 {
            let a2 = a_norm * a_norm;
            if a2 * s_norm / (1.0 - a2) <= 1e-15 * s_norm.max(1e-300) || s_norm == 0.0 {
                let out = (&s + s.transpose()) * 0.5;
                ensure_finite(&out, "Lyapunov solution")?;
                return Ok(out);
            }
        }
        s = &s + &a * &s * a.transpose();
        a = &a * &a;
    }
    Err(Error::Numerical("Lyapunov doubling did not converge".into()))
}
