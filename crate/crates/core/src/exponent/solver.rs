use super::{divergence_raw, entropy_raw, SOLVER_AGREEMENT};
use crate::channel::ErrorDistribution;
use crate::error::{Error, Result};

/// Result of minimising `f(Q) = D(Q||P) + |1 - H(Q) - R|^+` over the simplex.
#[derive(Debug, Clone)]
pub struct ExponentResult {
    /// `E(R,P)` in base-`d` units.
    pub value: f64,
    /// The minimising distribution `Q*`.
    pub minimizer: ErrorDistribution,
    /// Whether `1 - H(Q*) - R` is (numerically) positive at the minimiser.
    pub rate_term_active: bool,
    /// Inner iterations (mirror-descent steps or objective evaluations).
    pub solver_iterations: usize,
}

const MAX_ITERATIONS: usize = 100_000;
const OBJECTIVE_CHANGE: f64 = 1e-12;
const KKT_GAP: f64 = 1e-11;
const ACTIVE_TOLERANCE: f64 = 1e-9;

/// The problem restricted to `supp P`, natural logarithms throughout.
struct Restricted<'a> {
    p: &'a ErrorDistribution,
    support: Vec<usize>,
    ps: Vec<f64>,
    ln_d: f64,
    r: f64,
}

impl<'a> Restricted<'a> {
    fn new(r: f64, p: &'a ErrorDistribution) -> Self {
        let support = p.support();
        let ps = support.iter().map(|&i| p.probs()[i]).collect();
        Self {
            p,
            support,
            ps,
            ln_d: (p.modulus() as f64).ln(),
            r,
        }
    }

    /// `1 - H(q) - R` in base `d`.
    fn gap(&self, q: &[f64]) -> f64 {
        1.0 - entropy_raw(q, self.ln_d.exp()) - self.r
    }

    fn objective(&self, q: &[f64]) -> f64 {
        divergence_raw(q, &self.ps, self.ln_d.exp()) + self.gap(q).max(0.0)
    }

    fn finish(&self, q: &[f64], iterations: usize) -> ExponentResult {
        let mut full = vec![0.0; self.p.probs().len()];
        for (&i, &x) in self.support.iter().zip(q) {
            full[i] = x;
        }
        let total: f64 = full.iter().sum();
        full.iter_mut().for_each(|x| *x /= total);
        let minimizer = ErrorDistribution::new(self.p.modulus(), full)
            .expect("renormalised simplex point is a distribution");
        ExponentResult {
            value: self.objective(q),
            minimizer,
            rate_term_active: self.gap(q) > ACTIVE_TOLERANCE,
            solver_iterations: iterations,
        }
    }

    /// `D(q||p) + λ(1 - H(q) - R)` up to the factor `ln d`.
    fn lagrangian(&self, lambda: f64, q: &[f64]) -> f64 {
        q.iter()
            .zip(&self.ps)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &p)| x * (x / p).ln() + lambda * x * x.ln())
            .sum::<f64>()
    }

    /// Entropic mirror descent with backtracking on the relative-smoothness
    /// condition `φ(q') <= φ(q) + <∇φ, q' - q> + KL(q'||q)/η`.
    fn minimize_lagrangian(&self, lambda: f64, start: &[f64]) -> (Vec<f64>, usize) {
        let mut q = start.to_vec();
        let mut phi = self.lagrangian(lambda, &q);
        let mut eta: f64 = 1.0;
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            let grad: Vec<f64> = q
                .iter()
                .zip(&self.ps)
                .map(|(&x, &p)| (x / p).ln() + 1.0 + lambda * (x.ln() + 1.0))
                .collect();
            let hi = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = grad.iter().copied().fold(f64::INFINITY, f64::min);
            if hi - lo < KKT_GAP {
                break;
            }
            eta = (2.0 * eta).min(1.0);
            let (next, next_phi) = loop {
                iterations += 1;
                let logs: Vec<f64> = q
                    .iter()
                    .zip(&grad)
                    .map(|(&x, &g)| x.ln() - eta * g)
                    .collect();
                let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = logs.iter().map(|l| (l - top).exp()).sum();
                let next: Vec<f64> = logs
                    .iter()
                    .map(|l| ((l - top).exp() / z).max(f64::MIN_POSITIVE))
                    .collect();
                let next_phi = self.lagrangian(lambda, &next);
                let linear: f64 = grad
                    .iter()
                    .zip(next.iter().zip(&q))
                    .map(|(g, (a, b))| g * (a - b))
                    .sum();
                let kl: f64 = next.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
                if next_phi <= phi + linear + kl / eta + 1e-15 || eta < 1e-12 {
                    break (next, next_phi);
                }
                eta *= 0.5;
            };
            let change = (phi - next_phi).abs();
            q = next;
            phi = next_phi;
            if change < OBJECTIVE_CHANGE * 1e-3 && hi - lo < 1e3 * KKT_GAP {
                break;
            }
        }
        (q, iterations)
    }
}

/// `E(R,P)` from the primal problem.
///
/// The objective is `max_{λ in [0,1]} [D(Q||P) + λ(1 - H(Q) - R)]`; for each
/// `λ` the inner minimum is found by mirror descent over `supp P` and `λ` is
/// bisected on the sign of `1 - H(Q_λ) - R`. The reported value is `f` at the
/// final iterate, so it is an upper bound up to rounding.
pub fn exponent(r: f64, p: &ErrorDistribution) -> ExponentResult {
    assert!(r.is_finite(), "rate must be finite");
    let prob = Restricted::new(r, p);
    if prob.ps.len() == 1 || prob.gap(&prob.ps) <= 0.0 {
        return prob.finish(&prob.ps, 0);
    }
    let (q_one, mut iterations) = prob.minimize_lagrangian(1.0, &prob.ps);
    if prob.gap(&q_one) >= 0.0 {
        return prob.finish(&q_one, iterations);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut q_lo, mut q_hi) = (prob.ps.clone(), q_one);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (q, its) = prob.minimize_lagrangian(mid, &q_lo);
        iterations += its;
        if prob.gap(&q) > 0.0 {
            lo = mid;
            q_lo = q;
        } else {
            hi = mid;
            q_hi = q;
        }
    }
    if prob.objective(&q_lo) <= prob.objective(&q_hi) {
        prob.finish(&q_lo, iterations)
    } else {
        prob.finish(&q_hi, iterations)
    }
}

/// Minimum of `f` over the one-parameter family `Q_s ∝ P^{1/(1+s)}`,
/// `s in [0,1]`: a 201-point grid, golden-section refinement around the best
/// grid point and both endpoints.
pub fn tilted_family_minimum(r: f64, p: &ErrorDistribution) -> ExponentResult {
    assert!(r.is_finite(), "rate must be finite");
    let prob = Restricted::new(r, p);
    let member = |s: f64| -> Vec<f64> {
        let w: Vec<f64> = prob.ps.iter().map(|x| x.powf(1.0 / (1.0 + s))).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let value = |s: f64| prob.objective(&member(s));
    const GRID: usize = 200;
    let mut evaluations = 0;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=GRID {
        let s = i as f64 / GRID as f64;
        let v = value(s);
        evaluations += 1;
        if v < best.1 {
            best = (s, v);
        }
    }
    let step = 1.0 / GRID as f64;
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (value(x1), value(x2));
    while b - a > 1e-14 {
        evaluations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = value(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = value(x2);
        }
    }
    for (s, v) in [(x1, f1), (x2, f2), (0.0, value(0.0)), (1.0, value(1.0))] {
        if v < best.1 {
            best = (s, v);
        }
    }
    prob.finish(&member(best.0), evaluations)
}

/// The tilted-family value, cross-checked against the primal solver.
/// Disagreement beyond `1e-6` is reported as [`Error::SolverInconsistency`].
pub fn exponent_tilted(r: f64, p: &ErrorDistribution) -> Result<ExponentResult> {
    let tilted = tilted_family_minimum(r, p);
    let primal = exponent(r, p);
    if (tilted.value - primal.value).abs() > SOLVER_AGREEMENT {
        return Err(Error::SolverInconsistency {
            primal: primal.value,
            tilted: tilted.value,
        });
    }
    Ok(tilted)
}
