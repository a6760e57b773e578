use std::collections::HashSet;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{build_codes, fidelity_report, orthonormal_columns, FidelityModel, SearchOptions};
use crate::channel::{DenseOperator, ErrorBasis, QuantumChannel};
use crate::error::{Error, Result};
use crate::gfsym::{
    checked_pow, is_coset_leader_set, min_entropy_coset_leaders, SymplecticSubspace,
    SymplecticVector,
};

/// Applies the single-qudit operator `op` to tensor factor `site` of `psi`
/// (first factor most significant).
fn apply_local(
    op: &DenseOperator,
    site: usize,
    n: usize,
    psi: &DVector<Complex64>,
) -> DVector<Complex64> {
    let d = op.nrows();
    let stride = d.pow((n - site - 1) as u32);
    let mut out = DVector::zeros(psi.len());
    for idx in 0..psi.len() {
        let digit = (idx / stride) % d;
        let base = idx - digit * stride;
        for (row, slot) in (0..d).map(|r| (r, base + r * stride)) {
            out[slot] += op[(row, digit)] * psi[idx];
        }
    }
    out
}

fn qudit_count(d: u32, len: usize) -> Result<usize> {
    (1..=20)
        .find(|&n| checked_pow(d, n) == Some(len as u64))
        .ok_or_else(|| Error::Dimension(format!("length {len} is not a power of {d}")))
}

/// `1 - sum_x ||B_x ψ||^2` with `B_x = A_x - sum_{y in J} a_xy N_y`, where
/// `A_x = A_{x_1} ⊗ ... ⊗ A_{x_n}` runs over Kraus tuples of `ch^{⊗n}` and
/// `a_xy = prod_i a_{x_i y_i}`.
pub fn preskill_lower_bound(
    psi: &DVector<Complex64>,
    ch: &QuantumChannel,
    basis: &ErrorBasis,
    j: &[SymplecticVector],
) -> Result<f64> {
    let d = ch.modulus();
    let n = qudit_count(d, psi.len())?;
    if checked_pow(d, 2 * n).is_none_or(|s| s > 1 << 20) {
        return Err(Error::Resource("X^n exceeds 2^20 sequences".into()));
    }
    let coeffs = ch.expansion(basis)?;
    let jpsi: Vec<(Vec<usize>, DVector<Complex64>)> = j
        .iter()
        .map(|y| {
            if y.n() != n || y.modulus() != d {
                return Err(Error::Dimension(format!(
                    "correctable vector {y} has the wrong shape"
                )));
            }
            let ny = basis.pauli_string(y)?;
            let v = &ny * psi;
            Ok((
                (0..n).map(|i| y.symbol_index(i)).collect(),
                DVector::from_column_slice(v.as_slice()),
            ))
        })
        .collect::<Result<_>>()?;
    let kraus = ch.kraus();
    let count = kraus.len().pow(n as u32);
    let mut total = 0.0;
    for t in 0..count {
        let mut x = vec![0usize; n];
        let mut rest = t;
        for slot in x.iter_mut().rev() {
            *slot = rest % kraus.len();
            rest /= kraus.len();
        }
        let mut b = psi.clone();
        for (site, &u) in x.iter().enumerate() {
            b = apply_local(&kraus[u], site, n, &b);
        }
        for (ys, v) in &jpsi {
            let a: Complex64 = x.iter().zip(ys).map(|(&u, &y)| coeffs[u][y]).product();
            if a.norm() > 0.0 {
                b -= v * a;
            }
        }
        total += b.norm_squared();
    }
    Ok(1.0 - total)
}

/// `J = {z + w : z in J_0, w in L}`, sorted by vector index, after checking
/// that no two members differ by an element of `L^⊥ \ L`.
pub fn enlarge_correctable_set(
    l: &SymplecticSubspace,
    j0: &[SymplecticVector],
) -> Result<Vec<SymplecticVector>> {
    if !is_coset_leader_set(l, j0) {
        return Err(Error::InvariantViolation(
            "J_0 members must lie in distinct cosets of L^⊥".into(),
        ));
    }
    let mut seen = HashSet::new();
    let mut j: Vec<SymplecticVector> = Vec::new();
    for z in j0 {
        for w in l.elements() {
            let v = z.add(&w)?;
            if seen.insert(v.clone()) {
                j.push(v);
            }
        }
    }
    j.sort_by_key(|v| v.index());
    let dual = l.dual();
    for (i, a) in j.iter().enumerate() {
        for b in &j[i + 1..] {
            let diff = a.sub(b)?;
            if dual.contains(&diff) && !l.contains(&diff) {
                return Err(Error::InvariantViolation(format!(
                    "{a} - {b} lies in L^⊥ \\ L"
                )));
            }
        }
    }
    let want = expected_size(j0, l);
    if j.len() != want {
        return Err(Error::InvariantViolation(format!(
            "|J| = {}, expected |J_0| d^dim L = {want}",
            j.len()
        )));
    }
    Ok(j)
}

fn expected_size(j0: &[SymplecticVector], l: &SymplecticSubspace) -> usize {
    let distinct: HashSet<&SymplecticVector> = j0.iter().collect();
    distinct.len() * (l.modulus() as usize).pow(l.dim() as u32)
}

/// Outcome of comparing the best entanglement fidelity with the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    /// The lower bracket `F_e` is below `1 - RHS`; the searches cannot
    /// decide either way.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CodeFidelities {
    pub index: usize,
    pub min_fidelity: f64,
    pub min_avg_fidelity: f64,
    pub entanglement_fidelity: f64,
    pub preskill_lb: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleReport {
    /// The correctable set `J` whose complement defines the bound.
    pub correctable: Vec<SymplecticVector>,
    /// `sum_{x not in J} P^n(x) = 1 - sum_{x in J} P^n(x)`.
    pub rhs: f64,
    pub codes: Vec<CodeFidelities>,
    pub verdict: Verdict,
}

impl EnsembleReport {
    pub fn best_entanglement_fidelity(&self) -> f64 {
        self.codes
            .iter()
            .map(|c| c.entanglement_fidelity)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates every syndrome code of `L` under `ch^{⊗n}` and compares the
/// fidelity sandwich `[F_e, F̂_a]` with `1 - RHS`, where `RHS` sums
/// `P^n` over the complement of `J`.
///
/// `J` is `leaders` (default: minimum-entropy coset leaders), enlarged by `L`
/// when `enlarge` is set. The verdict is `Confirmed` when the best `F_e`
/// reaches `1 - RHS` within `1e-9`.
pub fn ensemble_check(
    l: &SymplecticSubspace,
    ch: &QuantumChannel,
    basis: &ErrorBasis,
    leaders: Option<&[SymplecticVector]>,
    enlarge: bool,
    opts: &SearchOptions,
) -> Result<EnsembleReport> {
    let j0 = match leaders {
        Some(ls) => ls.to_vec(),
        None => min_entropy_coset_leaders(l, &[])?,
    };
    let correctable = if enlarge {
        enlarge_correctable_set(l, &j0)?
    } else {
        j0.clone()
    };
    let p = ch.error_distribution(basis)?.product(l.n())?;
    let inside: f64 = correctable.iter().map(|x| p.prob(x)).sum::<Result<f64>>()?;
    let rhs = (1.0 - inside).max(0.0);
    let mut codes = Vec::new();
    for code in build_codes(l, basis)? {
        let code = code.with_leaders(j0.clone())?;
        let report = fidelity_report(&code, ch, opts)?;
        codes.push(CodeFidelities {
            index: report.code_index,
            min_fidelity: report.min_fidelity.value,
            min_avg_fidelity: report.min_avg_fidelity.value,
            entanglement_fidelity: report.entanglement_fidelity,
            preskill_lb: report.preskill_lb,
        });
    }
    let best = codes
        .iter()
        .map(|c| c.entanglement_fidelity)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if best >= 1.0 - rhs - 1e-9 {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    Ok(EnsembleReport {
        correctable,
        rhs,
        codes,
        verdict,
    })
}

/// Result of the greedy half-dimension subcode extraction.
#[derive(Debug, Clone)]
pub struct Subcode {
    /// Kets of the subcode in the full space, as columns.
    pub basis: DenseOperator,
    /// Best-found minimum fidelity on the subcode.
    pub min_fidelity: f64,
    /// Best-found minimum average fidelity of the parent code.
    pub parent_min_avg_fidelity: f64,
    /// `2 (1 - F̂_a) - (1 - F̂(D))`, nonnegative when the inequality holds.
    pub slack: f64,
}

/// Removes `ceil(K/2)` successive fidelity minimisers from the code, each
/// found within the orthogonal complement of those already removed, and
/// checks `1 - F̂(D) <= 2 (1 - F̂_a(C)) + 1e-6` for the remaining
/// `floor(K/2)`-dimensional `D`.
pub fn extract_subcode(model: &FidelityModel, opts: &SearchOptions) -> Result<Subcode> {
    let k = model.dim();
    if k < 2 {
        return Err(Error::Argument(
            "subcode extraction needs a code of dimension at least 2".into(),
        ));
    }
    let mut span = DenseOperator::identity(k, k);
    let mut removed: Vec<DVector<Complex64>> = Vec::new();
    for _ in 0..k.div_ceil(2) {
        let sub = model.restrict(&span);
        let best = sub.min_fidelity(opts)?;
        let psi = &span * &best.coords;
        let psi = DVector::from_column_slice(psi.as_slice());
        let projected = &span - &psi * (psi.adjoint() * &span);
        span = orthonormal_columns(&projected, 1e-8);
        removed.push(psi);
    }
    let sub = model.restrict(&span);
    let fd = sub.min_fidelity(opts)?.value;

    let mut greedy_basis = DenseOperator::zeros(k, k);
    for (j, v) in removed.iter().enumerate() {
        greedy_basis.set_column(j, v);
    }
    for j in 0..span.ncols() {
        greedy_basis.set_column(removed.len() + j, &span.column(j));
    }
    let mut fa = model.average(&greedy_basis);
    if k <= super::fidelity::MAX_BASIS_SEARCH_DIM {
        fa = fa.min(model.min_avg_fidelity(opts)?.value);
    }
    let slack = 2.0 * (1.0 - fa) - (1.0 - fd);
    if slack < -1e-6 {
        return Err(Error::InvariantViolation(format!(
            "1 - F(D) = {} exceeds 2 (1 - F_a(C)) = {}",
            1.0 - fd,
            2.0 * (1.0 - fa)
        )));
    }
    Ok(Subcode {
        basis: model.code_basis() * &span,
        min_fidelity: fd,
        parent_min_avg_fidelity: fa,
        slack,
    })
}
