//! Alignment under marginal constraints with a size-weighted quadratic
//! objective, solved through its concave dual.
//!
//! Primal: `min Σ a_i Q_ij² - 2 Σ C_ij Q_ij` over couplings with marginals
//! `1/k`, `1/k̄`, where `a_i = |C_i|` and `C` is the contingency table.
//! The dual in `(μ, ν)` is smooth; its maximizer gives
//! `Q = [μ_i + ν_j + 2 C_ij]_+ / (2 a_i)`.

use super::coupling::CouplingMatrix;
use super::lbfgs::{minimize, LbfgsConfig};
use crate::error::{PascoError, Result};
use crate::linalg::solve_spd;
use crate::partition::ContingencyTable;

#[derive(Debug, Clone)]
pub struct QuadOtSolution {
    pub plan: CouplingMatrix,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl QuadOtSolution {
    pub fn gap(&self) -> f64 {
        self.primal - self.dual
    }
}

struct Problem {
    k: usize,
    kbar: usize,
    sizes: Vec<f64>,
    /// `2 C_ij`, row-major.
    c2: Vec<f64>,
}

impl Problem {
    /// Negated dual value and its gradient.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let (k, kbar) = (self.k, self.kbar);
        let (mu, nu) = x.split_at(k);
        let (gm, gn) = grad.split_at_mut(k);
        gm.iter_mut().for_each(|g| *g = -1.0 / k as f64);
        gn.iter_mut().for_each(|g| *g = -1.0 / kbar as f64);
        let mut value = -mu.iter().sum::<f64>() / k as f64 - nu.iter().sum::<f64>() / kbar as f64;
        for i in 0..k {
            let inv = 1.0 / (2.0 * self.sizes[i]);
            for j in 0..kbar {
                let t = mu[i] + nu[j] + self.c2[i * kbar + j];
                if t > 0.0 {
                    value += 0.5 * t * t * inv;
                    gm[i] += t * inv;
                    gn[j] += t * inv;
                }
            }
        }
        value
    }

    fn plan(&self, x: &[f64]) -> Vec<f64> {
        let (mu, nu) = x.split_at(self.k);
        let mut q = vec![0.0; self.k * self.kbar];
        for i in 0..self.k {
            for j in 0..self.kbar {
                let t = mu[i] + nu[j] + self.c2[i * self.kbar + j];
                q[i * self.kbar + j] = t.max(0.0) / (2.0 * self.sizes[i]);
            }
        }
        q
    }

    fn primal(&self, q: &[f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..self.k {
            for j in 0..self.kbar {
                let x = q[i * self.kbar + j];
                v += self.sizes[i] * x * x - self.c2[i * self.kbar + j] * x;
            }
        }
        v
    }

    /// `ν = 0` and each `μ_i` solving its own row marginal exactly.
    fn warm_start(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.k + self.kbar];
        for i in 0..self.k {
            let mut c: Vec<f64> = self.c2[i * self.kbar..(i + 1) * self.kbar].to_vec();
            c.sort_by(|a, b| b.total_cmp(a));
            let target = 2.0 * self.sizes[i] / self.k as f64;
            let mut prefix = 0.0;
            for t in 0..c.len() {
                prefix += c[t];
                let mu = (target - prefix) / (t + 1) as f64;
                if mu + c[t] > 0.0 && (t + 1 == c.len() || mu + c[t + 1] <= 0.0) {
                    x[i] = mu;
                    break;
                }
            }
        }
        x
    }

    /// Damped Newton steps on the piecewise-quadratic dual.
    fn polish(&self, x: &mut Vec<f64>, grad: &mut [f64], value: &mut f64) -> usize {
        let (k, kbar) = (self.k, self.kbar);
        let dim = k + kbar;
        let mut steps = 0;
        for _ in 0..50 {
            let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if gnorm < 1e-15 {
                break;
            }
            let mut h = vec![0.0; dim * dim];
            for i in 0..k {
                let inv = 1.0 / (2.0 * self.sizes[i]);
                for j in 0..kbar {
                    if x[i] + x[k + j] + self.c2[i * kbar + j] > 0.0 {
                        h[i * dim + i] += inv;
                        h[(k + j) * dim + k + j] += inv;
                        h[i * dim + k + j] += inv;
                        h[(k + j) * dim + i] += inv;
                    }
                }
            }
            let max_diag = (0..dim).map(|d| h[d * dim + d]).fold(0.0f64, f64::max);
            if max_diag == 0.0 {
                break;
            }
            let lambda = 1e-10 * max_diag;
            (0..dim).for_each(|d| h[d * dim + d] += lambda);
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Ok(dir) = solve_spd(dim, &h, &rhs) else {
                break;
            };
            let slope: f64 = dir.iter().zip(grad.iter()).map(|(d, g)| d * g).sum();
            if slope >= 0.0 {
                break;
            }
            let mut trial_grad = vec![0.0; dim];
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
                let v = self.eval(&trial, &mut trial_grad);
                let tg = trial_grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
                if v <= *value + 1e-4 * t * slope || (v <= *value && tg < gnorm) {
                    *x = trial;
                    grad.copy_from_slice(&trial_grad);
                    *value = v;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
            steps += 1;
        }
        steps
    }
}

pub fn quad_ot_solve(table: &ContingencyTable) -> Result<QuadOtSolution> {
    let (k, kbar) = (table.rows(), table.cols());
    if k == 0 || kbar == 0 {
        return Err(PascoError::Empty("partition"));
    }
    if let Some(i) = table.row_sizes().iter().position(|&s| s == 0) {
        return Err(PascoError::EmptyCluster(i));
    }
    let problem = Problem {
        k,
        kbar,
        sizes: table.row_sizes().iter().map(|&s| s as f64).collect(),
        c2: (0..k * kbar).map(|c| 2.0 * table.get(c / kbar, c % kbar) as f64).collect(),
    };
    let cfg = LbfgsConfig::default();
    let res = minimize(problem.warm_start(), |x, g| problem.eval(x, g), &cfg);
    let mut x = res.x;
    let mut grad = vec![0.0; k + kbar];
    let mut value = problem.eval(&x, &mut grad);
    let newton = problem.polish(&mut x, &mut grad, &mut value);
    let grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if grad_norm > cfg.grad_tol {
        return Err(PascoError::NoConvergence(res.iterations));
    }
    let q = problem.plan(&x);
    let primal = problem.primal(&q);
    let nu = x.split_off(k);
    Ok(QuadOtSolution {
        plan: CouplingMatrix::new(k, kbar, q)?,
        mu: x,
        nu,
        primal,
        dual: -value,
        iterations: res.iterations + newton,
        grad_norm,
    })
}
