//! Simulation studies: LASSO error versus sample size across tail indices,
//! OLS / LASSO / low-rank plus sparse comparisons, and Monte-Carlo checks
//! of the Gram and deviation concentration bounds.
//!
//! Every replication draws from its own ChaCha stream derived from
//! `base_seed + replication`, so results do not depend on thread count.

use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dependence::{dependence_factor, solve_lyapunov, LinearProcessSpec};
use crate::error::{Error, Result};
use crate::io::{config_hash, write_rows_csv};
use crate::linalg::Matrix;
use crate::model::{build_design, RegressionData, VarModel};
use crate::penalties::{lambda_theory, PenaltySpec};
use crate::pipeline::{
    eval_errors, fit_regression, lambda_grid, split_rows, ErrorMetrics, LambdaRule, PRED_HORIZON,
};
use crate::simulate::{
    gen_lowrank_sparse_transition, gen_sparse_transition, simulate_var, simulate_var_recorded,
    LowRankSpec, NoiseSpec, SimOptions, TransitionGenSpec, DEFAULT_BURN_IN,
};
use crate::solvers::{lowrank_sparse_fit, ols_fit, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Figsw,
    LsTables,
    Concentration,
}

/// Experiment description as read from JSON. Unset fields take the
/// per-experiment defaults listed on each `resolve_*` method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2_list: Option<Vec<f64>>,
    /// Sample-size multipliers: `n = round(m·s·ln p)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<f64>>,
    /// Sample sizes for the concentration study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// `(p, N)` cells for the comparison tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    /// Adds p = 150 to the default figure grid.
    #[serde(default)]
    pub include_large: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            p_list: None,
            gamma2_list: None,
            m_list: None,
            n_list: None,
            cells: None,
            replications: None,
            base_seed: 0,
            rho_target: None,
            output_path: None,
            noise_scale: None,
            burn_in: None,
            include_large: false,
            solver: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))
    }

    fn common(&self, default_reps: usize, default_rho: f64, default_gammas: &[f64]) -> Result<Common> {
        let replications = self.replications.unwrap_or(default_reps);
        if replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        let rho = self.rho_target.unwrap_or(default_rho);
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("rho_target must lie in (0, 1), got {rho}")));
        }
        let gammas = self.gamma2_list.clone().unwrap_or_else(|| default_gammas.to_vec());
        if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0 && *g <= 2.0)) {
            return Err(Error::Config("gamma2 values must lie in (0, 2]".into()));
        }
        let scale = self.noise_scale.unwrap_or(1.0);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config("noise_scale must be positive".into()));
        }
        let solver = self.solver.unwrap_or(SolverConfig {
            max_iters: 5_000,
            rel_tol: 1e-6,
            ..SolverConfig::default()
        });
        solver.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(Common {
            replications,
            base_seed: self.base_seed,
            rho,
            gammas,
            scale,
            sim: SimOptions {
                burn_in: self.burn_in.unwrap_or(DEFAULT_BURN_IN),
                allow_unstable: false,
            },
            solver,
        })
    }

    fn p_values(&self, default: &[usize]) -> Result<Vec<usize>> {
        let ps = self.p_list.clone().unwrap_or_else(|| default.to_vec());
        if ps.is_empty() || ps.iter().any(|&p| p < 2) {
            return Err(Error::Config("all p must be at least 2".into()));
        }
        Ok(ps)
    }

    /// Defaults: p ∈ {30, 50, 100} (plus 150 with `include_large`),
    /// γ₂ ∈ {0.5, 1, 2}, m ∈ {1, 3, 5, 7, 9, 13, 15, 17, 19}, 30
    /// replications, ρ = 0.5.
    pub fn resolve_figsw(&self) -> Result<FigswSettings> {
        let mut default_p = vec![30, 50, 100];
        if self.include_large {
            default_p.push(150);
        }
        let m_list = self
            .m_list
            .clone()
            .unwrap_or_else(|| vec![1.0, 3.0, 5.0, 7.0, 9.0, 13.0, 15.0, 17.0, 19.0]);
        if m_list.is_empty() || m_list.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::Config("m multipliers must be positive".into()));
        }
        Ok(FigswSettings {
            common: self.common(30, 0.5, &[0.5, 1.0, 2.0])?,
            p_list: self.p_values(&default_p)?,
            m_list,
        })
    }

    /// Defaults: cells (10,30), (10,50), (30,80), (30,100), γ₂ ∈ {2, 1, 0.5},
    /// 20 replications, ρ = 0.7, rank 3, 3% sparse density.
    pub fn resolve_ls(&self) -> Result<LsSettings> {
        let cells = self
            .cells
            .clone()
            .unwrap_or_else(|| vec![(10, 30), (10, 50), (30, 80), (30, 100)]);
        if cells.is_empty() || cells.iter().any(|&(p, n)| p < 4 || n < 2 * MIN_LS_ROWS) {
            return Err(Error::Config(format!(
                "cells need p >= 4 and N >= {}",
                2 * MIN_LS_ROWS
            )));
        }
        Ok(LsSettings {
            common: self.common(20, 0.7, &[2.0, 1.0, 0.5])?,
            cells,
            rank: 3,
            density: 0.03,
        })
    }

    /// Defaults: p = 10, γ₂ ∈ {1, 2}, n ∈ {200, 800}, 1000 replications,
    /// ρ = 0.5.
    pub fn resolve_concentration(&self) -> Result<ConcentrationSettings> {
        let common = self.common(1000, 0.5, &[1.0, 2.0])?;
        if common.replications < 1000 {
            return Err(Error::Config(
                "the concentration study needs at least 1000 replications".into(),
            ));
        }
        let p_list = self.p_values(&[10])?;
        if p_list.iter().any(|&p| p > 20) {
            return Err(Error::Config("the concentration study supports p <= 20".into()));
        }
        let n_list = self.n_list.clone().unwrap_or_else(|| vec![200, 800]);
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        Ok(ConcentrationSettings {
            common,
            p_list,
            n_list,
        })
    }
}

#[derive(Debug, Clone)]
struct Common {
    replications: usize,
    base_seed: u64,
    rho: f64,
    gammas: Vec<f64>,
    scale: f64,
    sim: SimOptions,
    solver: SolverConfig,
}

#[derive(Debug, Clone)]
pub struct FigswSettings {
    common: Common,
    pub p_list: Vec<usize>,
    pub m_list: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LsSettings {
    common: Common,
    pub cells: Vec<(usize, usize)>,
    pub rank: usize,
    pub density: f64,
}

#[derive(Debug, Clone)]
pub struct ConcentrationSettings {
    common: Common,
    pub p_list: Vec<usize>,
    pub n_list: Vec<usize>,
}

// Stream tags keep the transition draw and the noise draw of one
// replication independent of each other and of the grid cell being run.
const STREAM_TRANSITION: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_DIRECTION: u64 = 2;

fn stream_rng(base_seed: u64, replication: usize, p: usize, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(replication as u64));
    rng.set_stream(((p as u64) << 8) | tag);
    rng
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn dependence_of(model: &VarModel) -> Result<f64> {
    let p = model.p();
    Ok(dependence_factor(&LinearProcessSpec::from_var(model, &Matrix::identity(p, p))?)?.c_factor)
}

/// Center of the λ validation grid: the theory value with the true
/// dependence factor and Subweibull norm, `c = 1`, and the ℓ1 width bound
/// `2√log(2q)` for a q-dimensional coefficient vector.
fn l1_theory_center(q: usize, n: usize, noise: &NoiseSpec, c_factor: f64) -> Result<f64> {
    let width = 2.0 * (2.0 * q as f64).ln().sqrt();
    lambda_theory(width, n, noise.subweibull_norm(), c_factor, 1.0, 1.0)
}

/// One row of the error-versus-sample-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigswRow {
    pub p: usize,
    pub gamma2: f64,
    pub m: f64,
    pub n: usize,
    pub mean_err: f64,
    /// Standard deviation of the error across replications.
    pub std_err: f64,
}

pub fn figsw_sample_size(m: f64, p: usize) -> (usize, usize) {
    let s = (p as f64).sqrt().round() as usize;
    let n = (m * s as f64 * (p as f64).ln()).round() as usize;
    (s, n)
}

/// ℓ1-LASSO estimation error `‖B̂ − B‖_F` of a sparse VAR(1) for every
/// `(p, γ₂, m)` in the grid, averaged over replications.
pub fn run_figsw(settings: &FigswSettings) -> Result<Vec<FigswRow>> {
    let c = &settings.common;
    let mut rows = Vec::new();
    for &p in &settings.p_list {
        let (s, _) = figsw_sample_size(1.0, p);
        // Transition and dependence factor per replication, shared by all
        // tail indices and sample sizes.
        let truths: Vec<(Matrix, f64)> = (0..c.replications)
            .into_par_iter()
            .map(|rep| {
                let spec = TransitionGenSpec::sparse(p, s.max(1), c.rho);
                let b = gen_sparse_transition(&spec, &mut stream_rng(c.base_seed, rep, p, STREAM_TRANSITION))?;
                let cf = dependence_of(&VarModel::var1(b.clone())?)?;
                Ok((b, cf))
            })
            .collect::<Result<_>>()?;
        for &gamma2 in &c.gammas {
            let noise = NoiseSpec::new(gamma2, c.scale, p)?;
            for &m in &settings.m_list {
                let (_, n) = figsw_sample_size(m, p);
                let errs: Vec<f64> = (0..c.replications)
                    .into_par_iter()
                    .map(|rep| {
                        let (b, cf) = &truths[rep];
                        let model = VarModel::var1(b.clone())?;
                        let mut rng = stream_rng(c.base_seed, rep, p, STREAM_NOISE);
                        let traj = simulate_var(&model, &noise, n, &c.sim, &mut rng)?;
                        let data = build_design(&traj, 1)?;
                        let center = l1_theory_center(p, data.n(), &noise, *cf)?;
                        let fit = fit_regression(
                            &data,
                            &PenaltySpec::L1,
                            &LambdaRule::validation(center),
                            &c.solver,
                        )?;
                        Ok((&fit.coeffs - b).norm())
                    })
                    .collect::<Result<_>>()?;
                let (mean_err, std_err) = mean_std(&errs);
                rows.push(FigswRow {
                    p,
                    gamma2,
                    m,
                    n,
                    mean_err,
                    std_err,
                });
            }
        }
    }
    Ok(rows)
}

/// One row of the method comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsRow {
    pub p: usize,
    pub n: usize,
    pub gamma2: f64,
    pub method: String,
    pub rel_err: f64,
    pub pred_err: f64,
}

pub const METHODS: [&str; 3] = ["OLS", "LASSO", "LS"];
const MIN_LS_ROWS: usize = 10;
const LS_MU_POINTS: usize = 30;
const LS_NUC_POINTS: usize = 7;

/// Low-rank plus sparse fit with `(λ_nuc, μ)` chosen on a validation
/// split. The μ grid is the LASSO grid rescaled to the ½‖·‖² objective.
/// The λ_nuc grid descends from `‖XᵀY‖₂`, where the low-rank part
/// first leaves zero, and adds an effectively infinite value that reduces
/// the estimator to the LASSO path.
fn ls_validated(data: &RegressionData, lasso_center: f64, alpha: f64, cfg: &SolverConfig) -> Result<Matrix> {
    let (train, val) = split_rows(data, 0.1)?;
    let half_n = 0.5 * train.n() as f64;
    let mus: Vec<f64> = lambda_grid(lasso_center, LS_MU_POINTS, 3.0)?
        .into_iter()
        .map(|l| l * half_n)
        .collect();
    let nuc_max = crate::dependence::op_norm(&train.x.tr_mul(&train.y));
    let mut nucs: Vec<f64> = (0..LS_NUC_POINTS).map(|k| nuc_max * 0.5f64.powi(k as i32)).collect();
    nucs.push(1e12);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &nuc in &nucs {
        for &mu in &mus {
            let fit = lowrank_sparse_fit(&train.x, &train.y, nuc, mu, alpha, cfg)?;
            let score = (&val.y - &val.x * &fit.coeffs).norm_squared();
            if score < best.0 {
                best = (score, nuc, mu);
            }
        }
    }
    let scale = data.n() as f64 / train.n() as f64;
    let fit = lowrank_sparse_fit(&data.x, &data.y, best.1 * scale, best.2 * scale, alpha, cfg)?;
    Ok(fit.coeffs)
}

/// OLS, ℓ1-LASSO and low-rank plus sparse fits of a VAR(1) whose
/// transition is `L + S`; relative estimation and one-step prediction
/// errors averaged over replications.
pub fn run_ls_tables(settings: &LsSettings) -> Result<Vec<LsRow>> {
    let c = &settings.common;
    let mut rows = Vec::new();
    for &(p, big_n) in &settings.cells {
        let gen = TransitionGenSpec {
            p,
            sparsity: 0,
            target_rho: c.rho,
            low_rank: Some(LowRankSpec {
                rank: settings.rank,
                density: settings.density,
            }),
        };
        let truths: Vec<(Matrix, f64)> = (0..c.replications)
            .into_par_iter()
            .map(|rep| {
                let (l, s) = gen_lowrank_sparse_transition(
                    &gen,
                    &mut stream_rng(c.base_seed, rep, p, STREAM_TRANSITION),
                )?;
                let b = l + s;
                let cf = dependence_of(&VarModel::var1(b.clone())?)?;
                Ok((b, cf))
            })
            .collect::<Result<_>>()?;
        for &gamma2 in &c.gammas {
            let noise = NoiseSpec::new(gamma2, c.scale, p)?;
            let per_rep: Vec<[ErrorMetrics; 3]> = (0..c.replications)
                .into_par_iter()
                .map(|rep| {
                    let (b, cf) = &truths[rep];
                    let model = VarModel::var1(b.clone())?;
                    let mut rng = stream_rng(c.base_seed, rep, p, STREAM_NOISE);
                    let traj = simulate_var(&model, &noise, big_n + PRED_HORIZON, &c.sim, &mut rng)?;
                    let train = traj.slice(0, big_n)?;
                    let holdout = traj.data().rows(big_n, PRED_HORIZON + 1).into_owned();
                    let data = build_design(&train, 1)?;
                    let center = l1_theory_center(p, data.n(), &noise, *cf)?;

                    let ols = ols_fit(&data.x, &data.y)?.coeffs;
                    let lasso = fit_regression(
                        &data,
                        &PenaltySpec::L1,
                        &LambdaRule::validation(center),
                        &c.solver,
                    )?
                    .coeffs;
                    let ls = ls_validated(&data, center, p as f64, &c.solver)?;
                    Ok([
                        eval_errors(&ols, b, &holdout)?,
                        eval_errors(&lasso, b, &holdout)?,
                        eval_errors(&ls, b, &holdout)?,
                    ])
                })
                .collect::<Result<_>>()?;
            for (k, method) in METHODS.iter().enumerate() {
                let rel: Vec<f64> = per_rep.iter().map(|m| m[k].rel_err).collect();
                let pred: Vec<f64> = per_rep.iter().map(|m| m[k].pred_err).collect();
                rows.push(LsRow {
                    p,
                    n: big_n,
                    gamma2,
                    method: method.to_string(),
                    rel_err: mean_std(&rel).0,
                    pred_err: mean_std(&pred).0,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `|uᵀ(XᵀX/n − Σ_X)u|`
    Gram,
    /// `|uᵀXᵀη/n|` for the first component regression.
    Deviation,
}

/// Empirical tails of a normalized statistic against the calibrated bound
/// `prefactor·exp(−c·min((nt)^{γ₂/2}, nt²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub statistic: Statistic,
    pub p: usize,
    pub n: usize,
    pub gamma2: f64,
    pub rho: f64,
    pub c_factor: f64,
    pub k_norm: f64,
    pub prefactor: f64,
    pub t_grid: Vec<f64>,
    /// `P(stat > K²𝖢 t)`.
    pub empirical_tail: Vec<f64>,
    /// `P(stat > t)` without the `K²𝖢` normalization.
    pub raw_tail: Vec<f64>,
    pub bound_value: Vec<f64>,
    /// Largest constant keeping the bound above the empirical tail on the
    /// grid; `None` when every positive grid point has zero empirical tail.
    pub c_calibrated: Option<f64>,
}

/// `0` followed by a geometric grid from 1e-3 to 10.
pub fn concentration_t_grid() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend((0..49).map(|i| 1e-3 * 10f64.powf(4.0 * i as f64 / 48.0)));
    t
}

fn exponent(n: usize, t: f64, gamma2: f64) -> f64 {
    let nt = n as f64 * t;
    nt.powf(gamma2 / 2.0).min(nt * t)
}

fn tail(stats: &[f64], t: f64) -> f64 {
    stats.iter().filter(|&&s| s > t).count() as f64 / stats.len() as f64
}

/// Largest `c` with `prefactor·exp(−c·h(t)) ≥ tail(t)` at every grid point.
pub fn calibrate_constant(t_grid: &[f64], tails: &[f64], n: usize, gamma2: f64, prefactor: f64) -> Option<f64> {
    t_grid
        .iter()
        .zip(tails)
        .filter(|(t, e)| **t > 0.0 && **e > 0.0)
        .map(|(t, e)| (prefactor / e).ln() / exponent(n, *t, gamma2))
        .min_by(|a, b| a.total_cmp(b))
        // Shaved so that rounding never lets the bound dip below the tail.
        .map(|c| c * (1.0 - 1e-12))
}

fn report(
    statistic: Statistic,
    stats: &[f64],
    norm: f64,
    (p, n, gamma2, rho, c_factor, k_norm): (usize, usize, f64, f64, f64, f64),
) -> ConcentrationReport {
    let t_grid = concentration_t_grid();
    let normalized: Vec<f64> = stats.iter().map(|s| s / norm).collect();
    let empirical_tail: Vec<f64> = t_grid.iter().map(|&t| tail(&normalized, t)).collect();
    let raw_tail: Vec<f64> = t_grid.iter().map(|&t| tail(stats, t)).collect();
    let prefactor = match statistic {
        Statistic::Gram => 6.0,
        Statistic::Deviation => 6.0 * p as f64,
    };
    let c_calibrated = calibrate_constant(&t_grid, &empirical_tail, n, gamma2, prefactor);
    let bound_value = t_grid
        .iter()
        .map(|&t| match c_calibrated {
            Some(c) => prefactor * (-c * exponent(n, t, gamma2)).exp(),
            None => prefactor,
        })
        .collect();
    ConcentrationReport {
        statistic,
        p,
        n,
        gamma2,
        rho,
        c_factor,
        k_norm,
        prefactor,
        t_grid,
        empirical_tail,
        raw_tail,
        bound_value,
        c_calibrated,
    }
}

/// Monte-Carlo tails of the Gram and deviation statistics of a fixed
/// stable VAR(1) for every `(p, γ₂, n)`.
pub fn run_concentration(settings: &ConcentrationSettings) -> Result<Vec<ConcentrationReport>> {
    let c = &settings.common;
    let mut out = Vec::new();
    for &p in &settings.p_list {
        let b = gen_sparse_transition(
            &TransitionGenSpec::sparse(p, p, c.rho),
            &mut stream_rng(c.base_seed, 0, p, STREAM_TRANSITION),
        )?;
        let model = VarModel::var1(b.clone())?;
        let c_factor = dependence_of(&model)?;
        let sigma_x = solve_lyapunov(&b, &(Matrix::identity(p, p) * (c.scale * c.scale)))?;
        let mut dir_rng = stream_rng(c.base_seed, 0, p, STREAM_DIRECTION);
        let mut u = nalgebra::DVector::from_fn(p, |_, _| dir_rng.sample::<f64, _>(StandardNormal));
        u /= u.norm();
        let quad_true = u.dot(&(&sigma_x * &u));
        for &gamma2 in &c.gammas {
            let noise = NoiseSpec::new(gamma2, c.scale, p)?;
            let k_norm = noise.subweibull_norm();
            let norm = k_norm * k_norm * c_factor;
            for &n in &settings.n_list {
                let stats: Vec<(f64, f64)> = (0..c.replications)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = stream_rng(c.base_seed, rep, p, STREAM_NOISE);
                        let path = simulate_var_recorded(&model, &noise, n, &c.sim, &mut rng)?;
                        let z = path.trajectory.data();
                        let x = z.rows(0, n);
                        let eta = path.noise.view((1, 0), (n, 1));
                        let xu = x * &u;
                        let gram = (xu.norm_squared() / n as f64 - quad_true).abs();
                        let dev = (xu.dot(&eta.column(0)) / n as f64).abs();
                        Ok((gram, dev))
                    })
                    .collect::<Result<_>>()?;
                let meta = (p, n, gamma2, c.rho, c_factor, k_norm);
                let gram: Vec<f64> = stats.iter().map(|s| s.0).collect();
                let dev: Vec<f64> = stats.iter().map(|s| s.1).collect();
                out.push(report(Statistic::Gram, &gram, norm, meta));
                out.push(report(Statistic::Deviation, &dev, norm, meta));
            }
        }
    }
    Ok(out)
}

/// Long-format row of a concentration report (one per t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub statistic: Statistic,
    pub p: usize,
    pub n: usize,
    pub gamma2: f64,
    pub rho: f64,
    pub t: f64,
    pub empirical: f64,
    pub raw_empirical: f64,
    pub bound: f64,
    pub c_calibrated: Option<f64>,
    pub c_factor: f64,
}

pub fn concentration_rows(reports: &[ConcentrationReport]) -> Vec<ConcentrationRow> {
    reports
        .iter()
        .flat_map(|r| {
            (0..r.t_grid.len()).map(move |i| ConcentrationRow {
                statistic: r.statistic,
                p: r.p,
                n: r.n,
                gamma2: r.gamma2,
                rho: r.rho,
                t: r.t_grid[i],
                empirical: r.empirical_tail[i],
                raw_empirical: r.raw_tail[i],
                bound: r.bound_value[i],
                c_calibrated: r.c_calibrated,
                c_factor: r.c_factor,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// JSON mirror of a result table; `R` is `Vec<Row>` when reading back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDocument<R> {
    pub software: String,
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub rows: R,
}

/// Writes a table as CSV (fixed header from the row type) or as a JSON
/// document echoing the configuration, its hash and the software version.
pub fn emit_results<T: Serialize, W: Write>(
    rows: &[T],
    config: &ExperimentConfig,
    format: OutputFormat,
    mut out: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_rows_csv(rows, out),
        OutputFormat::Json => {
            let doc = ResultDocument {
                software: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: config_hash(config)?,
                config: config.clone(),
                rows,
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

/// Runs the configured experiment and writes its table.
pub fn run_and_emit<W: Write>(config: &ExperimentConfig, format: OutputFormat, out: W) -> Result<()> {
    match config.experiment {
        ExperimentKind::Figsw => emit_results(&run_figsw(&config.resolve_figsw()?)?, config, format, out),
        ExperimentKind::LsTables => emit_results(&run_ls_tables(&config.resolve_ls()?)?, config, format, out),
        ExperimentKind::Concentration => {
            let reports = run_concentration(&config.resolve_concentration()?)?;
            emit_results(&concentration_rows(&reports), config, format, out)
        }
    }
}
