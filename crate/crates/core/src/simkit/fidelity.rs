use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{build_recovery, preskill_lower_bound, RecoveryMap, StabilizerCode};
use crate::channel::{c, random_state, random_unitary, DenseOperator, QuantumChannel};
use crate::error::{Error, Result};

/// Largest code dimension for the state search.
pub const MAX_STATE_SEARCH_DIM: usize = 8;
/// Largest code dimension for the basis search.
pub const MAX_BASIS_SEARCH_DIM: usize = 4;
const STATIONARITY: f64 = 1e-8;
const ORDERING_SLACK: f64 = 1e-7;

/// Multi-start settings for the non-convex fidelity searches.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            max_iterations: 20_000,
        }
    }
}

impl SearchOptions {
    fn rng(&self, start: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(start as u64);
        rng
    }
}

/// `F(ψ) = sum_m |<ψ|K_m|ψ>|^2` over the Kraus set of a composed map.
pub fn state_fidelity(
    psi: &DVector<Complex64>,
    ch_n: &QuantumChannel,
    rec: &RecoveryMap,
) -> Result<f64> {
    let dim = ch_n.dim();
    if psi.len() != dim || rec.channel().dim() != dim {
        return Err(Error::Argument(format!(
            "state of length {} does not match dimension {dim}",
            psi.len()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!("state has norm {norm}")));
    }
    let mut total = 0.0;
    for r in rec.kraus() {
        let left = r.adjoint() * psi;
        for a in ch_n.kraus() {
            total += left.dotc(&(a * psi)).norm_sqr();
        }
    }
    Ok(total)
}

/// The composed map `R ∘ A_n` compressed to the code: blocks
/// `G_m = B† R_j A_u B` for the code basis `B`.
#[derive(Debug, Clone)]
pub struct FidelityModel {
    code_basis: DenseOperator,
    blocks: Vec<DenseOperator>,
}

impl FidelityModel {
    pub fn new(code: &StabilizerCode, ch_n: &QuantumChannel, rec: &RecoveryMap) -> Result<Self> {
        if ch_n.dim() != code.basis().nrows() {
            return Err(Error::Dimension(format!(
                "channel acts on dimension {}, code lives in {}",
                ch_n.dim(),
                code.basis().nrows()
            )));
        }
        let composed = ch_n.then(rec.channel())?;
        Ok(Self::from_kraus(code.basis(), composed.kraus()))
    }

    /// Model for the columns of `code_basis` (orthonormal) and an arbitrary
    /// Kraus set.
    pub fn from_kraus(code_basis: &DenseOperator, kraus: &[DenseOperator]) -> Self {
        let bt = code_basis.adjoint();
        let blocks = kraus
            .iter()
            .map(|k| &bt * k * code_basis)
            .filter(|g| g.norm() > 1e-15)
            .collect();
        Self {
            code_basis: code_basis.clone(),
            blocks,
        }
    }

    /// Restriction to the span of `s`, given in code coordinates with
    /// orthonormal columns.
    pub fn restrict(&self, s: &DenseOperator) -> Self {
        let st = s.adjoint();
        Self {
            code_basis: &self.code_basis * s,
            blocks: self.blocks.iter().map(|g| &st * g * s).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.code_basis.ncols()
    }

    pub fn code_basis(&self) -> &DenseOperator {
        &self.code_basis
    }

    /// Maps code coordinates to a ket of the full space.
    pub fn embed(&self, coords: &DVector<Complex64>) -> DVector<Complex64> {
        let v = &self.code_basis * coords;
        DVector::from_column_slice(v.as_slice())
    }

    pub fn fidelity(&self, x: &DVector<Complex64>) -> f64 {
        self.blocks
            .iter()
            .map(|g| x.dotc(&(g * x)).norm_sqr())
            .sum()
    }

    /// `Γ = 2 sum_m (conj(z_m) G_m x + z_m G_m† x)` with `z_m = x† G_m x`, so
    /// that `dF = Re <δ, Γ>`.
    pub fn gradient(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut grad = DVector::zeros(x.len());
        for g in &self.blocks {
            let gx = g * x;
            let z = x.dotc(&gx);
            grad += gx * (z.conj() * 2.0) + g.ad_mul(x) * (z * 2.0);
        }
        grad
    }

    /// `(1/K) sum_k F(u_k)` over the columns of the unitary `u`.
    pub fn average(&self, u: &DenseOperator) -> f64 {
        let k = u.ncols();
        (0..k)
            .map(|j| self.fidelity(&DVector::from_column_slice(u.column(j).as_slice())))
            .sum::<f64>()
            / k as f64
    }

    /// `sum_m |Tr G_m / K|^2`.
    pub fn entanglement_fidelity(&self) -> f64 {
        let k = self.dim() as f64;
        self.blocks.iter().map(|g| (g.trace() / k).norm_sqr()).sum()
    }

    fn tangent_norm(&self, x: &DVector<Complex64>) -> f64 {
        let g = self.gradient(x);
        (&g - x * x.dotc(&g)).norm()
    }

    /// Skew-Hermitian `A = Γ U† - U Γ†` for the Euclidean gradient `Γ` of the
    /// basis average, and its Frobenius norm.
    fn basis_gradient(&self, u: &DenseOperator) -> (DenseOperator, f64) {
        let k = u.ncols();
        let mut g = DenseOperator::zeros(k, k);
        for j in 0..k {
            let col = DVector::from_column_slice(u.column(j).as_slice());
            let gj = self.gradient(&col) / c(k as f64, 0.0);
            g.set_column(j, &gj);
        }
        let a = &g * u.adjoint() - u * g.adjoint();
        let norm = a.norm();
        (a, norm)
    }

    fn descend_state(&self, mut x: DVector<Complex64>, max_iterations: usize) -> MinFidelity {
        x /= c(x.norm(), 0.0);
        let mut f = self.fidelity(&x);
        let mut step: f64 = 1.0;
        let mut grad_norm = f64::INFINITY;
        let mut iterations = 0;
        while iterations < max_iterations {
            iterations += 1;
            let g = self.gradient(&x);
            let tangent = &g - &x * x.dotc(&g);
            grad_norm = tangent.norm();
            if grad_norm < STATIONARITY {
                break;
            }
            step = (2.0 * step).min(1e3);
            let mut moved = false;
            while step > 1e-18 {
                let mut y = &x - &tangent * c(step, 0.0);
                y /= c(y.norm(), 0.0);
                let fy = self.fidelity(&y);
                // Near the minimum the Armijo decrease drops below rounding
                // of F; accept steps that keep F and shrink the gradient.
                let accept = fy <= f - 1e-4 * step * grad_norm * grad_norm
                    || (fy <= f + 1e-15 && self.tangent_norm(&y) < grad_norm);
                if accept {
                    x = y;
                    f = fy;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        MinFidelity {
            value: f,
            state: self.embed(&x),
            coords: x,
            gradient_norm: grad_norm,
            converged: grad_norm < STATIONARITY,
            iterations,
        }
    }

    /// Best-found `min_ψ F(ψ)` over unit vectors of the code: seeded random
    /// starts plus the code basis kets, each refined by Riemannian gradient
    /// descent on the sphere with Armijo backtracking.
    pub fn min_fidelity(&self, opts: &SearchOptions) -> Result<MinFidelity> {
        let k = self.dim();
        if k == 0 || k > MAX_STATE_SEARCH_DIM {
            return Err(Error::Resource(format!(
                "state search supports code dimensions 1..={MAX_STATE_SEARCH_DIM}, got {k}"
            )));
        }
        let runs: Vec<MinFidelity> = (0..opts.starts + k)
            .into_par_iter()
            .map(|s| {
                let start = if s < opts.starts {
                    random_state(k, &mut opts.rng(s))
                } else {
                    let mut e = DVector::zeros(k);
                    e[s - opts.starts] = c(1.0, 0.0);
                    e
                };
                self.descend_state(start, opts.max_iterations)
            })
            .collect();
        Ok(pick_best(runs, |r| (r.value, r.converged)))
    }

    fn descend_basis(&self, mut u: DenseOperator, max_iterations: usize) -> MinAvgFidelity {
        let k = self.dim();
        let identity = DenseOperator::identity(k, k);
        let mut f = self.average(&u);
        let mut step: f64 = 1.0;
        let mut grad_norm = f64::INFINITY;
        let mut iterations = 0;
        while iterations < max_iterations {
            iterations += 1;
            let (a, norm) = self.basis_gradient(&u);
            grad_norm = norm;
            if grad_norm < STATIONARITY {
                break;
            }
            let decrease = 0.5 * grad_norm * grad_norm;
            step = (2.0 * step).min(1e3);
            let mut moved = false;
            while step > 1e-18 {
                let half = &a * c(0.5 * step, 0.0);
                let Some(inv) = (&identity + &half).try_inverse() else {
                    step *= 0.5;
                    continue;
                };
                let next = inv * (&identity - &half) * &u;
                let fn_ = self.average(&next);
                let accept = fn_ <= f - 1e-4 * step * decrease
                    || (fn_ <= f + 1e-15 && self.basis_gradient(&next).1 < grad_norm);
                if accept {
                    u = next;
                    f = fn_;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        MinAvgFidelity {
            value: f,
            states: &self.code_basis * &u,
            unitary: u,
            gradient_norm: grad_norm,
            converged: grad_norm < STATIONARITY,
            iterations,
        }
    }

    /// Best-found minimum over orthonormal bases of the basis-averaged
    /// fidelity, searching over unitaries with a Cayley-transform descent.
    pub fn min_avg_fidelity(&self, opts: &SearchOptions) -> Result<MinAvgFidelity> {
        let k = self.dim();
        if k == 0 || k > MAX_BASIS_SEARCH_DIM {
            return Err(Error::Resource(format!(
                "basis search supports code dimensions 1..={MAX_BASIS_SEARCH_DIM}, got {k}"
            )));
        }
        let runs: Vec<MinAvgFidelity> = (0..opts.starts + 1)
            .into_par_iter()
            .map(|s| {
                let start = if s < opts.starts {
                    random_unitary(k, &mut opts.rng(s))
                } else {
                    DenseOperator::identity(k, k)
                };
                self.descend_basis(start, opts.max_iterations)
            })
            .collect();
        Ok(pick_best(runs, |r| (r.value, r.converged)))
    }
}

/// Lowest value wins; within `1e-12` a converged run is preferred, and the
/// earliest start breaks remaining ties.
fn pick_best<T>(runs: Vec<T>, key: impl Fn(&T) -> (f64, bool)) -> T {
    let mut best: Option<T> = None;
    for r in runs {
        let better = best.as_ref().is_none_or(|b| {
            let ((vr, cr), (vb, cb)) = (key(&r), key(b));
            vr < vb - 1e-12 || (vr < vb + 1e-12 && cr && !cb)
        });
        if better {
            best = Some(r);
        }
    }
    best.expect("at least one start")
}

/// Best-found minimum fidelity over code states.
#[derive(Debug, Clone)]
pub struct MinFidelity {
    pub value: f64,
    /// Minimiser in code coordinates.
    pub coords: DVector<Complex64>,
    /// Minimiser as a ket of the full space.
    pub state: DVector<Complex64>,
    pub gradient_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Best-found minimum average fidelity over orthonormal code bases.
#[derive(Debug, Clone)]
pub struct MinAvgFidelity {
    pub value: f64,
    /// The basis as a unitary on code coordinates.
    pub unitary: DenseOperator,
    /// The basis kets in the full space, as columns.
    pub states: DenseOperator,
    pub gradient_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Fidelity summary of one code under `A^{⊗n}` and its recovery.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    pub code_index: usize,
    pub min_fidelity: MinFidelity,
    pub min_avg_fidelity: MinAvgFidelity,
    pub entanglement_fidelity: f64,
    /// Lower bound on the fidelity of the min-fidelity state, from the
    /// correctable set of the recovery.
    pub preskill_lb: f64,
}

/// Builds the recovery for `code`, evaluates `F̂`, `F̂_a` and `F_e` for the
/// single-system channel `ch` applied to each of the `n` qudits, and checks
/// `F_e <= F̂_a` and `F̂ <= F̂_a` (slack `1e-7`) and that all values lie in
/// `[0, 1]` up to `1e-9`.
pub fn fidelity_report(
    code: &StabilizerCode,
    ch: &QuantumChannel,
    opts: &SearchOptions,
) -> Result<FidelityReport> {
    let ch_n = ch.tensor_power(code.n())?;
    let rec = build_recovery(code)?;
    let model = FidelityModel::new(code, &ch_n, &rec)?;
    let mut min = model.min_fidelity(opts)?;
    let avg = model.min_avg_fidelity(opts)?;
    // Each vector of the best basis is a candidate state as well.
    for j in 0..avg.unitary.ncols() {
        let col = DVector::from_column_slice(avg.unitary.column(j).as_slice());
        let f = model.fidelity(&col);
        if f < min.value {
            min = model.descend_state(col, opts.max_iterations);
        }
    }
    let fe = model.entanglement_fidelity();
    let preskill_lb = preskill_lower_bound(&min.state, ch, code.error_basis(), rec.leaders())?;
    for (name, value) in [("F", min.value), ("F_a", avg.value), ("F_e", fe)] {
        if !(-1e-9..=1.0 + 1e-9).contains(&value) {
            return Err(Error::InvariantViolation(format!(
                "{name} = {value} outside [0, 1]"
            )));
        }
    }
    if fe > avg.value + ORDERING_SLACK || min.value > avg.value + ORDERING_SLACK {
        return Err(Error::InvariantViolation(format!(
            "fidelity ordering broken: F = {}, F_a = {}, F_e = {fe}",
            min.value, avg.value
        )));
    }
    Ok(FidelityReport {
        code_index: code.index(),
        min_fidelity: min,
        min_avg_fidelity: avg,
        entanglement_fidelity: fe,
        preskill_lb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ErrorBasis;
    use crate::gfsym::{SymplecticSubspace, SymplecticVector};
    use crate::simkit::build_codes;

    fn example_code(index: usize) -> StabilizerCode {
        let b = ErrorBasis::standard(2).unwrap();
        let l = SymplecticSubspace::parse(2, &["0101"]).unwrap();
        let leaders = ["0000", "1000"]
            .iter()
            .map(|s| SymplecticVector::parse(2, s).unwrap())
            .collect();
        build_codes(&l, &b)
            .unwrap()
            .remove(index)
            .with_leaders(leaders)
            .unwrap()
    }

    #[test]
    fn closed_form_state_fidelity() {
        let gamma = 0.3;
        let code = example_code(0);
        let ch_n = QuantumChannel::amplitude_damping(gamma)
            .unwrap()
            .tensor_power(2)
            .unwrap();
        let rec = build_recovery(&code).unwrap();
        let model = FidelityModel::new(&code, &ch_n, &rec).unwrap();
        for (x, y) in [(1.0, 0.0), (0.6, 0.8), (0.0, 1.0)] {
            let mut psi = DVector::zeros(4);
            psi[0] = c(x, 0.0);
            psi[3] = c(0.0, y);
            let f = state_fidelity(&psi, &ch_n, &rec).unwrap();
            assert!((f - (1.0 - gamma * y * y)).abs() < 1e-12, "{f}");
            let coords = code.basis().ad_mul(&psi);
            let coords = DVector::from_column_slice(coords.as_slice());
            assert!((model.fidelity(&coords) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let code = example_code(1);
        let ch_n = QuantumChannel::amplitude_damping(0.4)
            .unwrap()
            .tensor_power(2)
            .unwrap();
        let model = FidelityModel::new(&code, &ch_n, &build_recovery(&code).unwrap()).unwrap();
        let x = DVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5)]);
        let g = model.gradient(&x);
        let h = 1e-6;
        for i in 0..2 {
            for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
                let mut e = DVector::zeros(2);
                e[i] = dir;
                let fd = (model.fidelity(&(&x + &e * c(h, 0.0)))
                    - model.fidelity(&(&x - &e * c(h, 0.0))))
                    / (2.0 * h);
                assert!((fd - e.dotc(&g).re).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn example_minima() {
        let gamma = 0.2;
        let ch = QuantumChannel::amplitude_damping(gamma).unwrap();
        for index in 0..2 {
            let report =
                fidelity_report(&example_code(index), &ch, &SearchOptions::default()).unwrap();
            assert!((report.min_fidelity.value - (1.0 - gamma)).abs() < 1e-9);
            assert!(report.min_fidelity.converged);
            assert!((report.min_avg_fidelity.value - (1.0 - gamma / 2.0)).abs() < 1e-9);
            assert!((report.entanglement_fidelity - (1.0 - 0.75 * gamma)).abs() < 1e-12);
            assert!(report.preskill_lb <= report.min_fidelity.value + 1e-8);
        }
    }

    #[test]
    fn identity_channel_is_perfect() {
        let ch = QuantumChannel::identity(2).unwrap();
        let report = fidelity_report(&example_code(0), &ch, &SearchOptions::default()).unwrap();
        assert!((report.min_fidelity.value - 1.0).abs() < 1e-12);
        assert!((report.min_avg_fidelity.value - 1.0).abs() < 1e-12);
        assert!((report.entanglement_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entanglement_fidelity_oracle() {
        // Explicit |Φ> = K^{-1/2} sum_k |k>|b_k> in reference ⊗ system.
        let code = example_code(0);
        let ch_n = QuantumChannel::amplitude_damping(0.35)
            .unwrap()
            .tensor_power(2)
            .unwrap();
        let rec = build_recovery(&code).unwrap();
        let model = FidelityModel::new(&code, &ch_n, &rec).unwrap();
        let (k, dim) = (code.dim(), 4);
        let mut phi = DVector::<Complex64>::zeros(k * dim);
        for j in 0..k {
            for i in 0..dim {
                phi[j * dim + i] = code.basis()[(i, j)] / (k as f64).sqrt();
            }
        }
        let mut fe = 0.0;
        for r in rec.kraus() {
            for a in ch_n.kraus() {
                let op = crate::channel::kron(&DenseOperator::identity(k, k), &(r * a));
                fe += phi.dotc(&(op * &phi)).norm_sqr();
            }
        }
        assert!((model.entanglement_fidelity() - fe).abs() < 1e-12);
    }

    #[test]
    fn full_depolarizing_on_a_qubit() {
        let b = ErrorBasis::standard(2).unwrap();
        let code = build_codes(&SymplecticSubspace::zero(2, 1).unwrap(), &b)
            .unwrap()
            .remove(0);
        let ch = QuantumChannel::depolarizing(0.75).unwrap();
        let rec = build_recovery(&code).unwrap();
        let model = FidelityModel::new(&code, &ch, &rec).unwrap();
        assert!((model.entanglement_fidelity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let ch = QuantumChannel::amplitude_damping(0.3).unwrap();
        let opts = SearchOptions {
            starts: 8,
            seed: 11,
            ..Default::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| fidelity_report(&example_code(0), &ch, &opts).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(
            a.min_fidelity.value.to_bits(),
            b.min_fidelity.value.to_bits()
        );
        assert_eq!(
            a.min_avg_fidelity.value.to_bits(),
            b.min_avg_fidelity.value.to_bits()
        );
    }
}
