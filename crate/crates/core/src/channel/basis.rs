use std::f64::consts::PI;

use num_complex::Complex64;

use super::{hs_inner, is_unitary, kron, DenseOperator, TP_TOLERANCE};
use crate::error::{Error, Result};
use crate::gfsym::{check_prime, SymplecticVector};

/// `exp(2πi k/d)` with components that vanish exactly (such as the
/// imaginary part of `-1`) snapped to zero.
fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let angle = 2.0 * PI * (k % d) as f64 / d as f64;
    let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    Complex64::new(snap(angle.cos()), snap(angle.sin()))
}

/// The error basis `{N_(i,j) = X^i Z^j}` of `L(H)` for a prime `d`, where
/// `X|b_j> = |b_(j-1 mod d)>` and `Z|b_j> = ω^j |b_j>` for an orthonormal
/// basis `{b_j}` and a primitive `d`-th root of unity `ω`.
///
/// Operators are indexed by the flat symbol `i * d + j`.
#[derive(Debug, Clone)]
pub struct ErrorBasis {
    d: u32,
    root_power: u32,
    kets: DenseOperator,
    operators: Vec<DenseOperator>,
}

impl ErrorBasis {
    /// Computational kets and `ω = exp(2πi/d)`.
    pub fn standard(d: u32) -> Result<Self> {
        Self::new(d, DenseOperator::identity(d as usize, d as usize), 1)
    }

    /// Computational kets and `ω = exp(2πi k/d)`.
    pub fn with_root(d: u32, k: u32) -> Result<Self> {
        Self::new(d, DenseOperator::identity(d as usize, d as usize), k)
    }

    /// The basis built on the kets given as the columns of `kets` (a unitary)
    /// with `ω = exp(2πi k/d)`.
    pub fn new(d: u32, kets: DenseOperator, k: u32) -> Result<Self> {
        check_prime(d)?;
        let dim = d as usize;
        if kets.shape() != (dim, dim) || !is_unitary(&kets, TP_TOLERANCE) {
            return Err(Error::Argument(format!(
                "ket matrix must be a {dim}x{dim} unitary"
            )));
        }
        if k.is_multiple_of(d) {
            return Err(Error::Argument(format!(
                "exp(2πi {k}/{d}) is not a primitive root of unity"
            )));
        }
        let root_power = k % d;
        let mut x = DenseOperator::zeros(dim, dim);
        let mut z = DenseOperator::zeros(dim, dim);
        for j in 0..dim {
            x[((j + dim - 1) % dim, j)] = Complex64::new(1.0, 0.0);
            z[(j, j)] = root_of_unity(root_power as usize * j, dim);
        }
        let x = &kets * x * kets.adjoint();
        let z = &kets * z * kets.adjoint();
        let mut operators = Vec::with_capacity(dim * dim);
        let mut xi = DenseOperator::identity(dim, dim);
        for _ in 0..dim {
            let mut op = xi.clone();
            for _ in 0..dim {
                operators.push(op.clone());
                op = &op * &z;
            }
            xi = &xi * &x;
        }
        Ok(Self {
            d,
            root_power,
            kets,
            operators,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn omega(&self) -> Complex64 {
        root_of_unity(self.root_power as usize, self.d as usize)
    }

    /// Columns are the kets `b_j` in computational coordinates.
    pub fn kets(&self) -> &DenseOperator {
        &self.kets
    }

    pub fn operators(&self) -> &[DenseOperator] {
        &self.operators
    }

    pub fn operator(&self, i: u32, j: u32) -> &DenseOperator {
        &self.operators[(i * self.d + j) as usize]
    }

    /// `<N, M> = Tr(N† M) / d`, under which the basis is orthonormal.
    pub fn inner(&self, a: &DenseOperator, b: &DenseOperator) -> Complex64 {
        hs_inner(a, b) / a.nrows() as f64
    }

    /// Coefficients `a_v = <N_v, A>` with `A = sum_v a_v N_v`.
    pub fn expand(&self, a: &DenseOperator) -> Result<Vec<Complex64>> {
        let dim = self.d as usize;
        if a.shape() != (dim, dim) {
            return Err(Error::Argument(format!(
                "operator is {}x{}, basis acts on dimension {dim}",
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(self.operators.iter().map(|n| self.inner(n, a)).collect())
    }

    pub fn reconstruct(&self, coeffs: &[Complex64]) -> DenseOperator {
        let dim = self.d as usize;
        self.operators
            .iter()
            .zip(coeffs)
            .fold(DenseOperator::zeros(dim, dim), |acc, (n, &a)| acc + n * a)
    }

    /// `N_x = N_(u_1,v_1) ⊗ ... ⊗ N_(u_n,v_n)`.
    pub fn pauli_string(&self, x: &SymplecticVector) -> Result<DenseOperator> {
        if x.modulus() != self.d {
            return Err(Error::Dimension(format!(
                "vector over F_{} used with a d = {} basis",
                x.modulus(),
                self.d
            )));
        }
        let mut acc = DenseOperator::identity(1, 1);
        for i in 0..x.n() {
            acc = kron(&acc, &self.operators[x.symbol_index(i)]);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{c, max_abs_diff, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(d: usize, entries: &[(usize, usize, Complex64)]) -> DenseOperator {
        let mut m = DenseOperator::zeros(d, d);
        for &(i, j, z) in entries {
            m[(i, j)] = z;
        }
        m
    }

    #[test]
    fn qubit_basis() {
        let b = ErrorBasis::standard(2).unwrap();
        let one = c(1.0, 0.0);
        let x = mat(2, &[(0, 1, one), (1, 0, one)]);
        let z = mat(2, &[(0, 0, one), (1, 1, -one)]);
        assert!(max_abs_diff(b.operator(1, 0), &x) < 1e-15);
        assert!(max_abs_diff(b.operator(0, 1), &z) < 1e-15);
        assert!(max_abs_diff(b.operator(0, 0), &DenseOperator::identity(2, 2)) < 1e-15);
        assert!(max_abs_diff(b.operator(1, 1), &(&x * &z)) < 1e-15);
    }

    #[test]
    fn qutrit_phase() {
        let b = ErrorBasis::standard(3).unwrap();
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let z = b.operator(0, 1);
        assert!((z[(2, 2)] - omega * omega).norm() < 1e-15);
        // X|j> = |j-1>
        assert_eq!(b.operator(1, 0)[(0, 1)], c(1.0, 0.0));
        assert_eq!(b.operator(1, 0)[(2, 0)], c(1.0, 0.0));
    }

    #[test]
    fn orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2u32, 3, 5] {
            let bases = [
                ErrorBasis::standard(d).unwrap(),
                ErrorBasis::new(d, random_unitary(d as usize, &mut rng), d - 1).unwrap(),
            ];
            for b in &bases {
                for (i, n) in b.operators().iter().enumerate() {
                    for (j, m) in b.operators().iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((b.inner(n, m) - c(want, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_composite_and_bad_root() {
        assert!(ErrorBasis::standard(4).is_err());
        assert!(ErrorBasis::with_root(3, 3).is_err());
        assert!(ErrorBasis::new(2, DenseOperator::zeros(2, 2), 1).is_err());
    }

    #[test]
    fn expansion_round_trip_and_errors() {
        let b = ErrorBasis::standard(2).unwrap();
        let coeffs = b.expand(b.operator(1, 1)).unwrap();
        for (k, a) in coeffs.iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((a - c(want, 0.0)).norm() < 1e-15);
        }
        assert!(b.expand(&DenseOperator::identity(3, 3)).is_err());
    }

    #[test]
    fn pauli_strings() {
        let b = ErrorBasis::standard(2).unwrap();
        let zz = b
            .pauli_string(&SymplecticVector::parse(2, "0101").unwrap())
            .unwrap();
        let z = b.operator(0, 1);
        assert!(max_abs_diff(&zz, &kron(z, z)) < 1e-15);
        let xi = b
            .pauli_string(&SymplecticVector::parse(2, "1000").unwrap())
            .unwrap();
        // X ⊗ I maps |00> to |10>
        assert_eq!(xi[(2, 0)], c(1.0, 0.0));
    }
}
