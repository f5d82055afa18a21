//! Subweibull innovations, random stable transition matrices, and VAR /
//! VAR-X trajectories.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::dependence::spectral_radius;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{Trajectory, VarModel, VarxModel};

/// Default number of discarded warm-up steps.
pub const DEFAULT_BURN_IN: usize = 500;
const MAX_RESAMPLES: usize = 100;

/// IID Subweibull(γ₂) innovations with a common per-coordinate scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub gamma2: f64,
    pub scale: f64,
    pub p: usize,
}

impl NoiseSpec {
    pub fn new(gamma2: f64, scale: f64, p: usize) -> Result<Self> {
        let spec = Self { gamma2, scale, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma2 > 0.0 && self.gamma2.is_finite()) {
            return Err(Error::Parameter(format!(
                "tail index must be positive, got {}",
                self.gamma2
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Parameter(format!(
                "noise scale must be positive, got {}",
                self.scale
            )));
        }
        if self.p == 0 {
            return Err(Error::Parameter("noise dimension must be positive".into()));
        }
        Ok(())
    }

    /// Standard deviation of a symmetrized Weibull(shape γ₂, scale 1).
    fn raw_std(&self) -> f64 {
        gamma(1.0 + 2.0 / self.gamma2).sqrt()
    }

    /// Subweibull norm `K = ‖ε‖_{ψ_γ₂}` of one standardized coordinate.
    ///
    /// For `|ε| = c·W` with `W ~ Weibull(γ, 1)`, `W^γ` is Exp(1), so
    /// `E exp((|ε|/K)^γ) = 1/(1 − (c/K)^γ)` and the Orlicz condition `≤ 2`
    /// holds exactly at `K = c·2^{1/γ}`.
    pub fn subweibull_norm(&self) -> f64 {
        self.scale / self.raw_std() * 2f64.powf(1.0 / self.gamma2)
    }
}

/// Draws an `n × p` matrix of IID innovations: a random sign times a
/// Weibull(shape γ₂, scale 1) variable, standardized to unit variance and
/// then multiplied by `scale`. Each entry consumes one sign and one uniform
/// draw, so equal seeds give coupled samples across tail indices.
pub fn sample_subweibull<R: Rng + ?Sized>(spec: &NoiseSpec, n: usize, rng: &mut R) -> Result<Matrix> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Parameter("sample count must be at least 1".into()));
    }
    let weibull = Weibull::new(1.0, spec.gamma2)
        .map_err(|e| Error::Parameter(format!("weibull: {e}")))?;
    let factor = spec.scale / spec.raw_std();
    let mut out = Matrix::zeros(n, spec.p);
    for i in 0..n {
        for j in 0..spec.p {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let w: f64 = weibull.sample(rng);
            out[(i, j)] = sign * w * factor;
        }
    }
    Ok(out)
}

/// Low-rank part of a generated transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowRankSpec {
    pub rank: usize,
    /// Fraction of nonzero entries in the sparse part.
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionGenSpec {
    pub p: usize,
    /// Number of nonzero entries of the sparse transition.
    pub sparsity: usize,
    pub target_rho: f64,
    pub low_rank: Option<LowRankSpec>,
}

impl TransitionGenSpec {
    pub fn sparse(p: usize, sparsity: usize, target_rho: f64) -> Self {
        Self {
            p,
            sparsity,
            target_rho,
            low_rank: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !(self.target_rho > 0.0 && self.target_rho < 1.0) {
            return Err(Error::Parameter(format!(
                "target spectral radius must lie in (0, 1), got {}",
                self.target_rho
            )));
        }
        if self.sparsity > self.p * self.p {
            return Err(Error::Parameter(format!(
                "sparsity {} exceeds p^2 = {}",
                self.sparsity,
                self.p * self.p
            )));
        }
        Ok(())
    }
}

fn random_support<R: Rng + ?Sized>(p: usize, count: usize, rng: &mut R) -> Matrix {
    let mut b = Matrix::zeros(p, p);
    for flat in index::sample(rng, p * p, count) {
        b[(flat / p, flat % p)] = rng.random::<f64>();
    }
    b
}

/// A nonnegative matrix has positive spectral radius exactly when its
/// support graph contains a cycle; checked with Kahn's topological sort.
fn support_has_cycle(b: &Matrix) -> bool {
    let p = b.nrows();
    let mut indegree = vec![0usize; p];
    for i in 0..p {
        for j in 0..p {
            if b[(i, j)] != 0.0 {
                indegree[j] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..p).filter(|&j| indegree[j] == 0).collect();
    let mut removed = 0;
    while let Some(i) = queue.pop() {
        removed += 1;
        for j in 0..p {
            if b[(i, j)] != 0.0 {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push(j);
                }
            }
        }
    }
    removed < p
}

fn rescale_checked(b: &Matrix, rho: f64, target: f64) -> Result<Matrix> {
    let scaled = b * (target / rho);
    let got = spectral_radius(&scaled)?;
    if (got - target).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "rescaled spectral radius {got} misses target {target}"
        )));
    }
    Ok(scaled)
}

/// Sparse p×p transition with exactly `sparsity` Uniform(0,1) entries at
/// uniformly chosen positions, rescaled to the target spectral radius.
///
/// Acyclic (nilpotent) supports are redrawn a bounded number of times;
/// their computed eigenvalues are rounding noise and cannot be rescaled.
pub fn gen_sparse_transition<R: Rng + ?Sized>(spec: &TransitionGenSpec, rng: &mut R) -> Result<Matrix> {
    spec.validate()?;
    if spec.sparsity == 0 {
        return Err(Error::Parameter("sparsity must be at least 1".into()));
    }
    for _ in 0..MAX_RESAMPLES {
        let raw = random_support(spec.p, spec.sparsity, rng);
        if !support_has_cycle(&raw) {
            continue;
        }
        let rho = spectral_radius(&raw)?;
        if rho > 0.0 {
            return rescale_checked(&raw, rho, spec.target_rho);
        }
    }
    Err(Error::Numerical(format!(
        "no sampled support with a cycle after {MAX_RESAMPLES} draws"
    )))
}

/// Low-rank plus sparse transition `(L, S)`.
///
/// `L = U Vᵀ` with standard-normal p×r factors; `S` has
/// `round(density·p²)` Uniform(0,1) entries. Both are multiplied by the same
/// scalar so that `ρ(L + S)` equals the target.
pub fn gen_lowrank_sparse_transition<R: Rng + ?Sized>(
    spec: &TransitionGenSpec,
    rng: &mut R,
) -> Result<(Matrix, Matrix)> {
    spec.validate()?;
    let lr = spec
        .low_rank
        .ok_or_else(|| Error::Parameter("low-rank block missing from generator spec".into()))?;
    let p = spec.p;
    if lr.rank == 0 || lr.rank >= p {
        return Err(Error::Parameter(format!(
            "rank must lie in 1..{p}, got {}",
            lr.rank
        )));
    }
    if !(0.0..=1.0).contains(&lr.density) {
        return Err(Error::Parameter(format!(
            "sparse density must lie in [0, 1], got {}",
            lr.density
        )));
    }
    let count = (lr.density * (p * p) as f64).round() as usize;
    for _ in 0..MAX_RESAMPLES {
        let u = Matrix::from_fn(p, lr.rank, |_, _| StandardNormal.sample(rng));
        let v = Matrix::from_fn(p, lr.rank, |_, _| StandardNormal.sample(rng));
        let l = u * v.transpose();
        let s = random_support(p, count, rng);
        let rho = spectral_radius(&(&l + &s))?;
        if rho > 1e-12 {
            let factor = spec.target_rho / rho;
            let (l, s) = (l * factor, s * factor);
            let got = spectral_radius(&(&l + &s))?;
            if (got - spec.target_rho).abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "rescaled spectral radius {got} misses target {}",
                    spec.target_rho
                )));
            }
            return Ok((l, s));
        }
    }
    Err(Error::Numerical("degenerate low-rank plus sparse draws".into()))
}

/// Multiplies every lag coefficient by one common scalar so the companion
/// spectral radius equals `target`. Lag 1 models are rescaled exactly; for
/// longer lags the scalar is found by bisection.
pub fn rescale_to_radius(model: &VarModel, target: f64) -> Result<VarModel> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Parameter(format!(
            "target spectral radius must lie in (0, 1), got {target}"
        )));
    }
    let rho = model.spectral_radius()?;
    if rho <= 1e-12 {
        return Err(Error::Numerical("model has zero spectral radius".into()));
    }
    let scaled = |c: f64| VarModel::new(model.coeffs().iter().map(|b| b * c).collect());
    if model.d() == 1 {
        return scaled(target / rho);
    }
    let radius = |c: f64| scaled(c).and_then(|m| m.spectral_radius());
    let (mut lo, mut hi) = (0.0, 1.0);
    while radius(hi)? < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical("could not bracket target spectral radius".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = radius(mid)?;
        if (r - target).abs() < 1e-10 {
            return scaled(mid);
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    scaled(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub burn_in: usize,
    /// Simulate even when the companion spectral radius is ≥ 1.
    pub allow_unstable: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            burn_in: DEFAULT_BURN_IN,
            allow_unstable: false,
        }
    }
}

/// Trajectory together with the innovations that produced each row.
#[derive(Debug, Clone)]
pub struct RecordedPath {
    pub trajectory: Trajectory,
    /// Row t is `ε_t`, aligned with the trajectory rows.
    pub noise: Matrix,
}

fn check_stability(companion: &Matrix, opts: &SimOptions) -> Result<()> {
    let rho = spectral_radius(companion)?;
    if rho >= 1.0 && !opts.allow_unstable {
        return Err(Error::Instability { rho });
    }
    Ok(())
}

/// Runs `Z_t = Σ_k B_kᵀ Z_{t-k} + ε_t` from a zero initial state over the
/// given innovations (one row per step).
pub fn propagate(model: &VarModel, noise: &Matrix) -> Result<Matrix> {
    let p = model.p();
    if noise.ncols() != p {
        return Err(Error::Structural(format!(
            "noise has {} columns, model dimension is {p}",
            noise.ncols()
        )));
    }
    let steps = noise.nrows();
    let transposed: Vec<Matrix> = model.coeffs().iter().map(|b| b.transpose()).collect();
    let mut z = Matrix::zeros(steps, p);
    for t in 0..steps {
        let mut row = noise.row(t).transpose();
        for (k, bt) in transposed.iter().enumerate() {
            if t > k {
                row += bt * z.row(t - k - 1).transpose();
            }
        }
        z.row_mut(t).copy_from(&row.transpose());
    }
    Ok(z)
}

/// Simulates a VAR(d) and returns `T + 1` observations after burn-in, along
/// with the innovations of those observations.
pub fn simulate_var_recorded<R: Rng + ?Sized>(
    model: &VarModel,
    noise: &NoiseSpec,
    horizon: usize,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<RecordedPath> {
    if noise.p != model.p() {
        return Err(Error::Structural(format!(
            "noise dimension {} differs from model dimension {}",
            noise.p,
            model.p()
        )));
    }
    check_stability(&model.companion(), opts)?;
    let total = opts.burn_in + horizon + 1;
    let eps = sample_subweibull(noise, total, rng)?;
    let z = propagate(model, &eps)?;
    let keep = horizon + 1;
    Ok(RecordedPath {
        trajectory: Trajectory::new(z.rows(opts.burn_in, keep).into_owned())?,
        noise: eps.rows(opts.burn_in, keep).into_owned(),
    })
}

pub fn simulate_var<R: Rng + ?Sized>(
    model: &VarModel,
    noise: &NoiseSpec,
    horizon: usize,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory> {
    simulate_var_recorded(model, noise, horizon, opts, rng).map(|r| r.trajectory)
}

/// Direct two-block recursion for a VAR-X with exogenous white noise
/// `z_t = η_t`.
pub fn propagate_varx(model: &VarxModel, noise: &Matrix, exo: &Matrix) -> Result<Matrix> {
    let p = model.p();
    if noise.ncols() != p || exo.ncols() != model.exo_dim() || exo.nrows() != noise.nrows() {
        return Err(Error::Structural("noise and exogenous shapes do not match model".into()));
    }
    let steps = noise.nrows();
    let endo: Vec<Matrix> = model.base().coeffs().iter().map(|a| a.transpose()).collect();
    let exo_t: Vec<Matrix> = model.exo_coeffs().iter().map(|b| b.transpose()).collect();
    let mut x = Matrix::zeros(steps, p);
    for t in 0..steps {
        let mut row = noise.row(t).transpose();
        for (i, at) in endo.iter().enumerate() {
            if t > i {
                row += at * x.row(t - i - 1).transpose();
            }
        }
        for (j, bt) in exo_t.iter().enumerate() {
            if t > j {
                row += bt * exo.row(t - j - 1).transpose();
            }
        }
        x.row_mut(t).copy_from(&row.transpose());
    }
    Ok(x)
}

/// Simulates a VAR-X. The exogenous series is drawn from `exo_noise` and
/// returned as the trajectory's exogenous block.
pub fn simulate_varx<R: Rng + ?Sized>(
    model: &VarxModel,
    noise: &NoiseSpec,
    exo_noise: &NoiseSpec,
    horizon: usize,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory> {
    if noise.p != model.p() || exo_noise.p != model.exo_dim() {
        return Err(Error::Structural("noise dimensions do not match model".into()));
    }
    check_stability(&model.companion(), opts)?;
    let total = opts.burn_in + horizon + 1;
    let eps = sample_subweibull(noise, total, rng)?;
    let z = sample_subweibull(exo_noise, total, rng)?;
    let x = propagate_varx(model, &eps, &z)?;
    let keep = horizon + 1;
    Trajectory::with_exo(
        x.rows(opts.burn_in, keep).into_owned(),
        z.rows(opts.burn_in, keep).into_owned(),
    )
}
