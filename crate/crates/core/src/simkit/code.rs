use std::f64::consts::PI;

use num_complex::Complex64;

use super::{dense_dim, orthonormal_columns};
use crate::channel::{c, max_abs_diff, DenseOperator, ErrorBasis};
use crate::error::{Error, Result};
use crate::gfsym::{
    is_coset_leader_set, min_entropy_coset_leaders, SymplecticSubspace, SymplecticVector,
};

const EIGEN_TOLERANCE: f64 = 1e-10;

/// A joint eigenspace of `{N_g : g in L}` for a self-orthogonal `L`,
/// together with the coset leaders its recovery corrects.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    stabilizer: SymplecticSubspace,
    error_basis: ErrorBasis,
    syndrome: Vec<u32>,
    eigenvalues: Vec<Complex64>,
    basis: DenseOperator,
    leaders: Vec<SymplecticVector>,
}

impl StabilizerCode {
    pub fn stabilizer(&self) -> &SymplecticSubspace {
        &self.stabilizer
    }

    pub fn error_basis(&self) -> &ErrorBasis {
        &self.error_basis
    }

    pub fn n(&self) -> usize {
        self.stabilizer.n()
    }

    /// Exponents `e_j` of the eigenvalues `λ_{e_j}` chosen for each canonical
    /// generator.
    pub fn syndrome(&self) -> &[u32] {
        &self.syndrome
    }

    /// Base-`d` reading of [`syndrome`](Self::syndrome), first generator most
    /// significant.
    pub fn index(&self) -> usize {
        let d = self.stabilizer.modulus() as usize;
        self.syndrome.iter().fold(0, |acc, &e| acc * d + e as usize)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Orthonormal code kets as columns (`d^n x K`).
    pub fn basis(&self) -> &DenseOperator {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> DenseOperator {
        &self.basis * self.basis.adjoint()
    }

    pub fn leaders(&self) -> &[SymplecticVector] {
        &self.leaders
    }

    /// Replaces the leader set; the leaders must lie in distinct cosets of
    /// `L^⊥`.
    pub fn with_leaders(mut self, leaders: Vec<SymplecticVector>) -> Result<Self> {
        if leaders.is_empty() || !is_coset_leader_set(&self.stabilizer, &leaders) {
            return Err(Error::Argument(
                "leaders must be non-empty and represent distinct cosets of L^⊥".into(),
            ));
        }
        self.leaders = leaders;
        Ok(self)
    }
}

/// Eigenvalues of `N_g`: since `N_g^d = c I`, they are
/// `λ_k = exp(i (arg c + 2πk) / d)`.
fn generator_eigenvalues(ng: &DenseOperator, d: usize) -> Vec<Complex64> {
    let mut power = ng.clone();
    for _ in 1..d {
        power = &power * ng;
    }
    let mut phase = power[(0, 0)].arg();
    // -1 may carry a -0.0 imaginary part; label it as exp(+iπ) consistently.
    if phase < -PI + 1e-9 {
        phase = PI;
    }
    (0..d)
        .map(|k| Complex64::from_polar(1.0, (phase + 2.0 * PI * k as f64) / d as f64))
        .collect()
}

/// `(1/d) sum_t (N_g / λ)^t`, the projector onto the `λ`-eigenspace.
fn eigen_projector(ng: &DenseOperator, lambda: Complex64, d: usize) -> DenseOperator {
    let dim = ng.nrows();
    let step = ng / lambda;
    let mut term = DenseOperator::identity(dim, dim);
    let mut acc = DenseOperator::zeros(dim, dim);
    for _ in 0..d {
        acc += &term;
        term = &term * &step;
    }
    acc / c(d as f64, 0.0)
}

/// All `d^{dim L}` codes of a self-orthogonal `L`, indexed by syndrome, each
/// carrying the default minimum-entropy leaders.
///
/// Every ket is checked against its eigenvalue equations, and the codes are
/// checked to be mutually orthogonal with dimensions summing to `d^n`.
pub fn build_codes(l: &SymplecticSubspace, basis: &ErrorBasis) -> Result<Vec<StabilizerCode>> {
    let d = l.modulus();
    if basis.modulus() != d {
        return Err(Error::Dimension(format!(
            "stabilizer over F_{d} used with a d = {} error basis",
            basis.modulus()
        )));
    }
    if !l.is_self_orthogonal() {
        return Err(Error::Argument("stabilizer is not self-orthogonal".into()));
    }
    let n = l.n();
    let dim = dense_dim(d, n)?;
    let du = d as usize;
    let k = dim / du.pow(l.dim() as u32);
    let leaders = min_entropy_coset_leaders(l, &[])?;

    let generators: Vec<DenseOperator> = l
        .basis()
        .iter()
        .map(|g| basis.pauli_string(g))
        .collect::<Result<_>>()?;
    let spectra: Vec<Vec<Complex64>> = generators
        .iter()
        .map(|g| generator_eigenvalues(g, du))
        .collect();
    let projectors: Vec<Vec<DenseOperator>> = generators
        .iter()
        .zip(&spectra)
        .map(|(g, s)| s.iter().map(|&lam| eigen_projector(g, lam, du)).collect())
        .collect();

    let count = du.pow(l.dim() as u32);
    let mut codes = Vec::with_capacity(count);
    for index in 0..count {
        let mut syndrome = vec![0u32; l.dim()];
        let mut rest = index;
        for slot in syndrome.iter_mut().rev() {
            *slot = (rest % du) as u32;
            rest /= du;
        }
        let mut proj = DenseOperator::identity(dim, dim);
        for (j, &e) in syndrome.iter().enumerate() {
            proj = &projectors[j][e as usize] * proj;
        }
        let kets = orthonormal_columns(&proj, 1e-6);
        if kets.ncols() != k {
            return Err(Error::InvariantViolation(format!(
                "code {index} has dimension {}, expected {k}",
                kets.ncols()
            )));
        }
        let eigenvalues: Vec<Complex64> = syndrome
            .iter()
            .enumerate()
            .map(|(j, &e)| spectra[j][e as usize])
            .collect();
        for (g, &lam) in generators.iter().zip(&eigenvalues) {
            let dev = max_abs_diff(&(g * &kets), &(&kets * lam));
            if dev > EIGEN_TOLERANCE {
                return Err(Error::InvariantViolation(format!(
                    "code {index} violates an eigenvalue equation by {dev:e}"
                )));
            }
        }
        codes.push(StabilizerCode {
            stabilizer: l.clone(),
            error_basis: basis.clone(),
            syndrome,
            eigenvalues,
            basis: kets,
            leaders: leaders.clone(),
        });
    }
    check_decomposition(&codes, dim)?;
    Ok(codes)
}

fn check_decomposition(codes: &[StabilizerCode], dim: usize) -> Result<()> {
    let total: usize = codes.iter().map(|c| c.dim()).sum();
    if total != dim {
        return Err(Error::InvariantViolation(format!(
            "code dimensions sum to {total}, expected {dim}"
        )));
    }
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            let gram = a.basis.adjoint() * &b.basis;
            let want = if i == j {
                DenseOperator::identity(a.dim(), a.dim())
            } else {
                DenseOperator::zeros(a.dim(), b.dim())
            };
            let dev = max_abs_diff(&gram, &want);
            if dev > EIGEN_TOLERANCE {
                return Err(Error::InvariantViolation(format!(
                    "codes {i} and {j} have Gram deviation {dev:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Stabilizer text format: one generator per line as a `2n`-digit string
/// in the interleaved `(u, v)` order, optionally followed by a `leaders:`
/// line and one leader per line. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone)]
pub struct StabilizerFile {
    pub stabilizer: SymplecticSubspace,
    pub leaders: Option<Vec<SymplecticVector>>,
}

impl StabilizerFile {
    pub fn parse(text: &str, d: u32) -> Result<Self> {
        let mut generators = Vec::new();
        let mut leaders: Option<Vec<SymplecticVector>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.eq_ignore_ascii_case("leaders:") {
                if leaders.is_some() {
                    return Err(Error::Parse(format!(
                        "line {}: repeated leaders section",
                        lineno + 1
                    )));
                }
                leaders = Some(Vec::new());
                continue;
            }
            let v = SymplecticVector::parse(d, line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            match leaders.as_mut() {
                Some(ls) => ls.push(v),
                None => generators.push(v),
            }
        }
        let n = generators
            .first()
            .or(leaders.as_ref().and_then(|l| l.first()))
            .map(|v| v.n())
            .ok_or_else(|| Error::Parse("stabilizer file has no vectors".into()))?;
        let all_same = generators
            .iter()
            .chain(leaders.iter().flatten())
            .all(|v| v.n() == n);
        if !all_same {
            return Err(Error::Parse(
                "vectors in the stabilizer file differ in length".into(),
            ));
        }
        let stabilizer = SymplecticSubspace::span(d, n, &generators)?;
        Ok(Self {
            stabilizer,
            leaders,
        })
    }

    /// Codes of the stabilizer, with the listed leaders when given.
    pub fn codes(&self, basis: &ErrorBasis) -> Result<Vec<StabilizerCode>> {
        let codes = build_codes(&self.stabilizer, basis)?;
        match &self.leaders {
            None => Ok(codes),
            Some(ls) => codes
                .into_iter()
                .map(|c| c.with_leaders(ls.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(dim: usize, i: usize) -> DenseOperator {
        let mut v = DenseOperator::zeros(dim, 1);
        v[(i, 0)] = c(1.0, 0.0);
        v
    }

    /// Norm of the component of `v` outside the span of the code.
    fn outside(code: &StabilizerCode, v: &DenseOperator) -> f64 {
        (v - code.projector() * v).norm()
    }

    #[test]
    fn two_qubit_zz_codes() {
        let l = SymplecticSubspace::parse(2, &["0101"]).unwrap();
        let codes = build_codes(&l, &ErrorBasis::standard(2).unwrap()).unwrap();
        assert_eq!(codes.len(), 2);
        for (code, kets) in codes.iter().zip([[0, 3], [1, 2]]) {
            assert_eq!(code.dim(), 2);
            for i in kets {
                assert!(outside(code, &ket(4, i)) < 1e-12);
            }
        }
        assert!((codes[0].eigenvalues()[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((codes[1].eigenvalues()[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(codes[1].index(), 1);
        assert_eq!(codes[0].leaders().len(), 2);
    }

    #[test]
    fn trivial_stabilizer() {
        let l = SymplecticSubspace::zero(2, 2).unwrap();
        let codes = build_codes(&l, &ErrorBasis::standard(2).unwrap()).unwrap();
        assert_eq!(codes.len(), 1);
        assert_eq!(codes[0].dim(), 4);
    }

    #[test]
    fn qutrit_and_xz_generators() {
        // (XZ)^2 = -I, so the spectrum of XZ is ±i.
        let l = SymplecticSubspace::parse(2, &["11"]).unwrap();
        let codes = build_codes(&l, &ErrorBasis::standard(2).unwrap()).unwrap();
        assert_eq!(codes.len(), 2);
        assert!((codes[0].eigenvalues()[0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((codes[1].eigenvalues()[0] - c(0.0, -1.0)).norm() < 1e-12);
        let l3 = SymplecticSubspace::parse(3, &["1020"]).unwrap();
        assert!(l3.is_self_orthogonal());
        let codes3 = build_codes(&l3, &ErrorBasis::standard(3).unwrap()).unwrap();
        assert_eq!(codes3.len(), 3);
        assert!(codes3.iter().all(|c| c.dim() == 3));
    }

    #[test]
    fn rejects_bad_input() {
        let b = ErrorBasis::standard(2).unwrap();
        let l = SymplecticSubspace::parse(2, &["1000", "0100"]).unwrap();
        assert!(matches!(build_codes(&l, &b), Err(Error::Argument(_))));
        let big = SymplecticSubspace::zero(2, 7).unwrap();
        assert!(matches!(build_codes(&big, &b), Err(Error::Resource(_))));
        let code = build_codes(&SymplecticSubspace::parse(2, &["0101"]).unwrap(), &b)
            .unwrap()
            .remove(0);
        let same_coset = vec![
            SymplecticVector::parse(2, "0000").unwrap(),
            SymplecticVector::parse(2, "0001").unwrap(),
        ];
        assert!(code.with_leaders(same_coset).is_err());
    }

    #[test]
    fn stabilizer_file() {
        let text = "# ZZ\n0101\nleaders:\n0000\n1000\n";
        let f = StabilizerFile::parse(text, 2).unwrap();
        assert_eq!(f.stabilizer.dim(), 1);
        let codes = f.codes(&ErrorBasis::standard(2).unwrap()).unwrap();
        assert_eq!(codes[0].leaders()[1].to_string(), "1000");
        assert!(StabilizerFile::parse("01\n0101\n", 2).is_err());
        assert!(StabilizerFile::parse("", 2).is_err());
        assert!(StabilizerFile::parse("0121\n", 2).is_err());
    }
}
