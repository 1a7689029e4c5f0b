use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsConfig {
    /// Number of curvature pairs kept.
    pub memory: usize,
    pub max_iters: usize,
    /// Stop once the gradient norm falls to this value.
    pub grad_tol: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    /// L2 weight on the MaxEnt weight matrix (not used by the optimizer itself).
    pub l2: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self { memory: 10, max_iters: 200, grad_tol: 1e-5, armijo: 1e-4, shrink: 0.5, max_backtracks: 50, l2: 1e-4 }
    }
}

impl LbfgsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.memory == 0 {
            return Err("L-BFGS memory must be at least 1".into());
        }
        if !(self.grad_tol > 0.0 && self.armijo > 0.0 && self.armijo < 1.0) {
            return Err("tolerances must be positive".into());
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err("shrink factor must lie in (0, 1)".into());
        }
        if !(self.l2 >= 0.0) {
            return Err("L2 weight must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsReport {
    pub iterations: usize,
    pub termination: Termination,
    pub loss: f64,
    pub grad_norm: f64,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, which returns the objective and its gradient, with
/// two-loop L-BFGS and Armijo backtracking. Returns the best point seen.
pub fn lbfgs_minimize<Func>(mut f: Func, theta0: &[f64], cfg: &LbfgsConfig) -> (Vec<f64>, LbfgsReport)
where
    Func: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = theta0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut trace = vec![fx];
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;

    if norm(&g) <= cfg.grad_tol {
        termination = Termination::Converged;
    } else {
        for iter in 0..cfg.max_iters {
            let mut d = two_loop(&g, &pairs);
            let mut slope = dot(&g, &d);
            if !(slope < 0.0) {
                pairs.clear();
                d = g.iter().map(|v| -v).collect();
                slope = dot(&g, &d);
            }
            let mut alpha = if pairs.is_empty() { (1.0 / norm(&g)).min(1.0) } else { 1.0 };
            let mut accepted = None;
            for _ in 0..=cfg.max_backtracks {
                let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
                let (fn_, gn) = f(&xn);
                if fn_.is_finite() && sufficient_decrease(fx, fn_, slope, dot(&gn, &d), alpha, cfg.armijo) {
                    accepted = Some((xn, fn_, gn));
                    break;
                }
                alpha *= cfg.shrink;
            }
            let Some((xn, fn_, gn)) = accepted else {
                log::warn!("line search failed after {} backtracks at iteration {iter}", cfg.max_backtracks);
                termination = Termination::LineSearchFailed;
                break;
            };
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-10 {
                if pairs.len() == cfg.memory {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, 1.0 / sy));
            }
            x = xn;
            fx = fn_;
            g = gn;
            trace.push(fx);
            iterations = iter + 1;
            if norm(&g) <= cfg.grad_tol {
                termination = Termination::Converged;
                break;
            }
        }
    }
    let grad_norm = norm(&g);
    (x, LbfgsReport { iterations, termination, loss: fx, grad_norm, trace })
}

/// Armijo test. Close to the optimum the decrease in `f` drops below its
/// rounding error, so when both the predicted and the observed change in `f`
/// are within a few ulps the same condition is checked through directional
/// derivatives
/// (`φ'(α) <= (2c - 1) φ'(0)`, exact for quadratics).
fn sufficient_decrease(f0: f64, f1: f64, slope0: f64, slope1: f64, alpha: f64, c: f64) -> bool {
    let noise = 8.0 * f64::EPSILON * f0.abs().max(f64::MIN_POSITIVE);
    f1 <= f0 + c * alpha * slope0
        || ((alpha * slope0).abs() <= noise
            && (f1 - f0).abs() <= noise
            && slope1 <= (2.0 * c - 1.0) * slope0)
}

/// `-H g` from the stored pairs, oldest first.
fn two_loop(g: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = vec![0.0; pairs.len()];
    for (k, (s, y, rho)) in pairs.iter().enumerate().rev() {
        let a = rho * dot(s, &q);
        alphas[k] = a;
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (k, (s, y, rho)) in pairs.iter().enumerate() {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (alphas[k] - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
