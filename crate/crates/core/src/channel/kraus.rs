use num_complex::Complex64;

use super::{
    c, ensure_finite, is_unitary, kron, max_abs_diff, DenseOperator, ErrorBasis, ErrorDistribution,
    TP_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::gfsym::{check_prime, checked_pow};

/// A trace-preserving completely positive map on `(C^d)^{⊗m}` given by its
/// Kraus operators, `ρ ↦ sum_u A_u ρ A_u†`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    d: u32,
    m: usize,
    kraus: Vec<DenseOperator>,
}

impl QuantumChannel {
    /// Validates shapes, finiteness and `‖sum A_u† A_u - I‖_max <= 1e-9`.
    /// Lists shorter than `(d^m)^2` are implicitly padded with null operators.
    pub fn new(d: u32, m: usize, kraus: Vec<DenseOperator>) -> Result<Self> {
        check_prime(d)?;
        if m == 0 {
            return Err(Error::Argument("m must be at least 1".into()));
        }
        let dim = checked_pow(d, m).filter(|&n| n <= 1 << 12).ok_or_else(|| {
            Error::Resource(format!("d^m = {d}^{m} is too large for dense operators"))
        })? as usize;
        if kraus.is_empty() {
            return Err(Error::Argument(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        if kraus.len() > dim * dim {
            return Err(Error::Argument(format!(
                "{} Kraus operators exceed the (d^m)^2 = {} needed",
                kraus.len(),
                dim * dim
            )));
        }
        for a in &kraus {
            if a.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            ensure_finite(a)?;
        }
        let ch = Self { d, m, kraus };
        let dev = ch.tp_deviation();
        if dev > TP_TOLERANCE {
            return Err(Error::Validation {
                message: "Kraus operators are not trace preserving".into(),
                deviation: dev,
            });
        }
        Ok(ch)
    }

    pub fn identity(d: u32) -> Result<Self> {
        Self::new(d, 1, vec![DenseOperator::identity(d as usize, d as usize)])
    }

    /// `{sqrt(P(u)) N_u}` with zero-probability terms omitted.
    pub fn pauli(basis: &ErrorBasis, p: &ErrorDistribution) -> Result<Self> {
        if basis.modulus() != p.modulus() {
            return Err(Error::Dimension(
                "basis and distribution moduli differ".into(),
            ));
        }
        let kraus = p
            .probs()
            .iter()
            .zip(basis.operators())
            .filter(|(&q, _)| q > 0.0)
            .map(|(&q, n)| n * c(q.sqrt(), 0.0))
            .collect();
        Self::new(p.modulus(), 1, kraus)
    }

    /// Qubit depolarizing channel `{sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) XZ, sqrt(p/3) Z}`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::pauli(
            &ErrorBasis::standard(2)?,
            &ErrorDistribution::depolarizing(2, p)?,
        )
    }

    /// Qubit amplitude damping, `A_0 = diag(1, sqrt(1-γ))`, `A_1 = sqrt(γ)|0><1|`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Argument(format!("γ = {gamma} is not in [0, 1]")));
        }
        let mut a0 = DenseOperator::zeros(2, 2);
        a0[(0, 0)] = c(1.0, 0.0);
        a0[(1, 1)] = c((1.0 - gamma).sqrt(), 0.0);
        let mut a1 = DenseOperator::zeros(2, 2);
        a1[(0, 1)] = c(gamma.sqrt(), 0.0);
        Self::new(2, 1, vec![a0, a1])
    }

    /// Qubit dephasing `ρ ↦ (1-q) ρ + q Z ρ Z`.
    pub fn dephasing(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Argument(format!("q = {q} is not in [0, 1]")));
        }
        let b = ErrorBasis::standard(2)?;
        Self::new(
            2,
            1,
            vec![
                DenseOperator::identity(2, 2) * c((1.0 - q).sqrt(), 0.0),
                b.operator(0, 1) * c(q.sqrt(), 0.0),
            ],
        )
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    /// Number of tensor factors.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `d^m`.
    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[DenseOperator] {
        &self.kraus
    }

    /// `‖sum_u A_u† A_u - I‖_max`.
    pub fn tp_deviation(&self) -> f64 {
        let dim = self.dim();
        let sum = self
            .kraus
            .iter()
            .fold(DenseOperator::zeros(dim, dim), |acc, a| {
                acc + a.adjoint() * a
            });
        max_abs_diff(&sum, &DenseOperator::identity(dim, dim))
    }

    fn require_single(&self) -> Result<()> {
        if self.m != 1 {
            return Err(Error::Argument(format!(
                "operation needs a single-system channel, got m = {}",
                self.m
            )));
        }
        Ok(())
    }

    /// `a_uv` with `A_u = sum_v a_uv N_v`, one row per Kraus operator.
    pub fn expansion(&self, basis: &ErrorBasis) -> Result<Vec<Vec<Complex64>>> {
        self.require_single()?;
        if basis.modulus() != self.d {
            return Err(Error::Dimension(
                "basis and channel dimensions differ".into(),
            ));
        }
        self.kraus.iter().map(|a| basis.expand(a)).collect()
    }

    /// `P_A(v) = sum_u |a_uv|^2` in the given error basis.
    pub fn error_distribution(&self, basis: &ErrorBasis) -> Result<ErrorDistribution> {
        let coeffs = self.expansion(basis)?;
        let mut probs = vec![0.0; (self.d * self.d) as usize];
        for row in &coeffs {
            for (p, a) in probs.iter_mut().zip(row) {
                *p += a.norm_sqr();
            }
        }
        ErrorDistribution::new(self.d, probs)
    }

    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        let dim = self.dim();
        if rho.shape() != (dim, dim) {
            return Err(Error::Argument(format!(
                "state is {}x{}, channel acts on dimension {dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(self
            .kraus
            .iter()
            .fold(DenseOperator::zeros(dim, dim), |acc, a| {
                acc + a * rho * a.adjoint()
            }))
    }

    /// `{U A_u}`: the channel followed by the unitary `U`.
    pub fn compose_unitary(&self, u: &DenseOperator) -> Result<Self> {
        if u.shape() != (self.dim(), self.dim()) || !is_unitary(u, TP_TOLERANCE) {
            return Err(Error::Argument(
                "preprocessing operator is not a unitary of matching size".into(),
            ));
        }
        Self::new(self.d, self.m, self.kraus.iter().map(|a| u * a).collect())
    }

    /// `after ∘ self`, Kraus set `{B_j A_i}`.
    pub fn then(&self, after: &QuantumChannel) -> Result<Self> {
        if after.d != self.d || after.m != self.m {
            return Err(Error::Dimension("channels act on different spaces".into()));
        }
        let kraus = after
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        Self::new_unpadded(self.d, self.m, kraus)
    }

    /// `A^{⊗n}`; Kraus operators indexed by tuples with the first factor most
    /// significant.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("tensor power needs n >= 1".into()));
        }
        let mut kraus = self.kraus.clone();
        for _ in 1..n {
            kraus = kraus
                .iter()
                .flat_map(|a| self.kraus.iter().map(move |b| kron(a, b)))
                .collect();
        }
        Self::new_unpadded(self.d, self.m * n, kraus)
    }

    /// Kraus operators `B_j = sum_i v_ji A_i` for an isometry `v`
    /// (`v† v = I`); the channel itself is unchanged.
    pub fn mix_kraus(&self, v: &DenseOperator) -> Result<Self> {
        if v.ncols() != self.kraus.len() {
            return Err(Error::Dimension(format!(
                "mixing matrix has {} columns for {} Kraus operators",
                v.ncols(),
                self.kraus.len()
            )));
        }
        let dim = self.dim();
        let kraus = (0..v.nrows())
            .map(|j| {
                self.kraus
                    .iter()
                    .enumerate()
                    .fold(DenseOperator::zeros(dim, dim), |acc, (i, a)| {
                        acc + a * v[(j, i)]
                    })
            })
            .collect();
        Self::new_unpadded(self.d, self.m, kraus)
    }

    /// Like [`new`](Self::new) without the `(d^m)^2` length limit, for
    /// Kraus sets produced by composition.
    pub(crate) fn new_unpadded(d: u32, m: usize, kraus: Vec<DenseOperator>) -> Result<Self> {
        let ch = Self { d, m, kraus };
        let dev = ch.tp_deviation();
        if dev > TP_TOLERANCE {
            return Err(Error::Validation {
                message: "composed Kraus set is not trace preserving".into(),
                deviation: dev,
            });
        }
        Ok(ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_damping_expansion() {
        let gamma: f64 = 0.36;
        let b = ErrorBasis::standard(2).unwrap();
        let ch = QuantumChannel::amplitude_damping(gamma).unwrap();
        let a = ch.expansion(&b).unwrap();
        let s = (1.0 - gamma).sqrt();
        // symbols: 0 = (0,0), 1 = (0,1), 2 = (1,0), 3 = (1,1)
        let want0 = [(1.0 + s) / 2.0, (1.0 - s) / 2.0, 0.0, 0.0];
        let want1 = [0.0, 0.0, gamma.sqrt() / 2.0, -gamma.sqrt() / 2.0];
        for k in 0..4 {
            assert!((a[0][k] - c(want0[k], 0.0)).norm() < 1e-15);
            assert!((a[1][k] - c(want1[k], 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn error_distributions() {
        let b = ErrorBasis::standard(2).unwrap();
        let id = QuantumChannel::identity(2)
            .unwrap()
            .error_distribution(&b)
            .unwrap();
        assert_eq!(id.probs(), &[1.0, 0.0, 0.0, 0.0]);
        let dep = QuantumChannel::depolarizing(0.3)
            .unwrap()
            .error_distribution(&b)
            .unwrap();
        assert!((dep.probs()[0] - 0.7).abs() < 1e-15);
        for &q in &dep.probs()[1..] {
            assert!((q - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_tp() {
        let half = DenseOperator::identity(2, 2) * c(0.5, 0.0);
        match QuantumChannel::new(2, 1, vec![half]) {
            Err(Error::Validation { deviation, .. }) => assert!((deviation - 0.75).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(QuantumChannel::new(2, 1, vec![DenseOperator::identity(3, 3)]).is_err());
        assert!(QuantumChannel::new(2, 1, vec![DenseOperator::identity(2, 2); 5]).is_err());
        assert!(QuantumChannel::amplitude_damping(1.5).is_err());
    }

    #[test]
    fn apply_examples() {
        let ad = QuantumChannel::amplitude_damping(1.0).unwrap();
        let mut one = DenseOperator::zeros(2, 2);
        one[(1, 1)] = c(1.0, 0.0);
        let out = ad.apply(&one).unwrap();
        let mut zero = DenseOperator::zeros(2, 2);
        zero[(0, 0)] = c(1.0, 0.0);
        assert!(max_abs_diff(&out, &zero) < 1e-15);

        let mixed = DenseOperator::identity(2, 2) * c(0.5, 0.0);
        let dep = QuantumChannel::depolarizing(0.4).unwrap();
        assert!(max_abs_diff(&dep.apply(&mixed).unwrap(), &mixed) < 1e-15);
        assert!(dep.apply(&DenseOperator::identity(4, 4)).is_err());
    }

    #[test]
    fn compose_with_x_moves_mass() {
        let b = ErrorBasis::standard(2).unwrap();
        let ch = QuantumChannel::identity(2)
            .unwrap()
            .compose_unitary(b.operator(1, 0))
            .unwrap();
        assert_eq!(
            ch.error_distribution(&b).unwrap().probs(),
            &[0.0, 0.0, 1.0, 0.0]
        );
        assert!(QuantumChannel::identity(2)
            .unwrap()
            .compose_unitary(&(DenseOperator::identity(2, 2) * c(2.0, 0.0)))
            .is_err());
    }

    #[test]
    fn tensor_power_shape() {
        let ch = QuantumChannel::amplitude_damping(0.2)
            .unwrap()
            .tensor_power(3)
            .unwrap();
        assert_eq!(ch.dim(), 8);
        assert_eq!(ch.kraus().len(), 8);
        assert!(ch.tp_deviation() < 1e-12);
    }
}
