//! Reference implementations shared by the integration tests. None of these
//! call into the library's own numerical kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use swvar::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(n: usize, m: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random matrix rescaled to the given spectral norm, via the oracle SVD.
pub fn with_op_norm(a: Matrix, target: f64) -> Matrix {
    let s = jacobi_svd(&a).1[0];
    a * (target / s)
}

/// One-sided Jacobi SVD: `(U, singular values descending, V)` with
/// `A = U·diag(s)·Vᵀ`, for `rows ≥ cols` (transposes otherwise).
pub fn jacobi_svd(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    if a.nrows() < a.ncols() {
        let (u, s, v) = jacobi_svd(&a.transpose());
        return (v, s, u);
    }
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = Matrix::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = w.column(i).norm_squared();
                let beta: f64 = w.column(j).norm_squared();
                let gamma: f64 = w.column(i).dot(&w.column(j));
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for r in 0..m.nrows() {
                        let (x, y) = (m[(r, i)], m[(r, j)]);
                        m[(r, i)] = c * x - s * y;
                        m[(r, j)] = s * x + c * y;
                    }
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut u = Matrix::zeros(a.nrows(), n);
    let mut vs = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        if norms[j] > 0.0 {
            u.set_column(k, &(w.column(j) / norms[j]));
        }
        vs.set_column(k, &v.column(j));
    }
    (u, s, vs)
}

/// Euclidean projection onto `{x : ‖x‖₁ ≤ r}`.
pub fn project_l1_ball(y: &[f64], r: f64) -> Vec<f64> {
    if y.iter().map(|v| v.abs()).sum::<f64>() <= r {
        return y.to_vec();
    }
    let mut a: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, z| z.total_cmp(x));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        cum += ai;
        let t = (cum - r) / (i + 1) as f64;
        if ai > t {
            theta = t;
        }
    }
    y.iter().map(|v| v.signum() * (v.abs() - theta).max(0.0)).collect()
}

/// Projection onto `{x : ‖x_S‖ ≤ r}`, ℓ2 when `l2` and ℓ1 otherwise
/// (coordinates outside `S` untouched).
fn project_cylinder(y: &[f64], s: &[usize], r: f64, l2: bool) -> Vec<f64> {
    let sub: Vec<f64> = s.iter().map(|&i| y[i]).collect();
    let proj = if l2 {
        let n = sub.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n <= r {
            sub
        } else {
            sub.iter().map(|v| v * r / n).collect()
        }
    } else {
        project_l1_ball(&sub, r)
    };
    let mut out = y.to_vec();
    for (k, &i) in s.iter().enumerate() {
        out[i] = proj[k];
    }
    out
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Dykstra's alternating projections onto an intersection of convex
/// cylinders `{‖x_S‖ ≤ r}`.
pub fn dykstra(y: &[f64], sets: &[(Vec<usize>, f64, bool)], cycles: usize) -> Vec<f64> {
    let mut x = y.to_vec();
    let mut incr = vec![vec![0.0; y.len()]; sets.len()];
    for _ in 0..cycles {
        // The iterate can sit still for a whole cycle while the increments
        // are still moving, so both must settle.
        let mut change = 0.0f64;
        for (k, (s, r, l2)) in sets.iter().enumerate() {
            let shifted: Vec<f64> = x.iter().zip(&incr[k]).map(|(a, b)| a + b).collect();
            let z = project_cylinder(&shifted, s, *r, *l2);
            for i in 0..x.len() {
                let next = shifted[i] - z[i];
                change = change.max((next - incr[k][i]).abs()).max((z[i] - x[i]).abs());
                incr[k][i] = next;
            }
            x = z;
        }
        if change < 1e-15 {
            break;
        }
    }
    x
}

/// OWL dual ball `{z : Σ_{t≤i} |z|↓_t ≤ Σ_{t≤i} w_t}` as an intersection of
/// ℓ1 cylinders over every coordinate subset.
pub fn owl_dual_sets(w: &[f64], scale: f64) -> Vec<(Vec<usize>, f64, bool)> {
    let d = w.len();
    let mut sets = Vec::new();
    for k in 1..=d {
        let cap: f64 = w[..k].iter().sum::<f64>() * scale;
        for s in subsets(d, k) {
            sets.push((s, cap, false));
        }
    }
    sets
}

/// k-support dual ball `{z : ‖z_S‖₂ ≤ 1, |S| = k}`.
pub fn ksupport_dual_sets(d: usize, k: usize, scale: f64) -> Vec<(Vec<usize>, f64, bool)> {
    subsets(d, k).into_iter().map(|s| (s, scale, true)).collect()
}

/// `prox_{τR}(u) = u − proj_{τ·dual ball}(u)`.
pub fn moreau_prox(u: &[f64], sets: &[(Vec<usize>, f64, bool)]) -> Vec<f64> {
    let z = dykstra(u, sets, 200_000);
    u.iter().zip(&z).map(|(a, b)| a - b).collect()
}

pub fn prox_oracle_l1(u: &[f64], tau: f64) -> Vec<f64> {
    let sets: Vec<_> = (0..u.len()).map(|i| (vec![i], tau, true)).collect();
    moreau_prox(u, &sets)
}

pub fn prox_oracle_group(u: &[f64], groups: &[Vec<usize>], weights: &[f64], tau: f64) -> Vec<f64> {
    let sets: Vec<_> = groups
        .iter()
        .zip(weights)
        .map(|(g, w)| (g.clone(), tau * w, true))
        .collect();
    moreau_prox(u, &sets)
}

pub fn prox_oracle_owl(u: &[f64], w: &[f64], tau: f64) -> Vec<f64> {
    moreau_prox(u, &owl_dual_sets(w, tau))
}

pub fn prox_oracle_ksupport(u: &[f64], k: usize, tau: f64) -> Vec<f64> {
    moreau_prox(u, &ksupport_dual_sets(u.len(), k, tau))
}

/// Singular-value soft threshold through the oracle SVD.
pub fn prox_oracle_nuclear(m: &Matrix, tau: f64) -> Matrix {
    let (u, s, v) = jacobi_svd(m);
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for (k, sk) in s.iter().enumerate() {
        let shrunk = (sk - tau).max(0.0);
        if shrunk > 0.0 {
            out += u.column(k) * v.column(k).transpose() * shrunk;
        }
    }
    out
}

/// Coordinate descent for `(1/n)‖y − Xb‖² + λ‖b‖₁`.
pub fn lasso_cd(x: &Matrix, y: &[f64], lambda: f64, sweeps: usize) -> Vec<f64> {
    let n = x.nrows() as f64;
    let q = x.ncols();
    let mut b = vec![0.0; q];
    let mut r: Vec<f64> = y.to_vec();
    for _ in 0..sweeps {
        let mut moved = 0.0f64;
        for j in 0..q {
            let col = x.column(j);
            let a = col.norm_squared() / n;
            let rho = col.iter().zip(&r).map(|(c, ri)| c * ri).sum::<f64>() / n + a * b[j];
            let new = rho.signum() * (rho.abs() - lambda / 2.0).max(0.0) / a;
            let delta = new - b[j];
            if delta != 0.0 {
                for (ri, c) in r.iter_mut().zip(col.iter()) {
                    *ri -= c * delta;
                }
                b[j] = new;
                moved = moved.max(delta.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    b
}

/// Empirical covariance of the rows of `z` around zero mean.
pub fn second_moment(z: &Matrix) -> Matrix {
    z.tr_mul(z) / z.nrows() as f64
}
