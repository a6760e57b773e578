use super::StabilizerCode;
use crate::channel::{max_abs_diff, DenseOperator, QuantumChannel};
use crate::error::{Error, Result};
use crate::gfsym::{is_coset_leader_set, SymplecticVector};

const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// The recovery `{Π_rest} ∪ {N_r† Π_r : r in J_0}`, where `Π_r` projects onto
/// `N_r C` and `Π_rest` onto the complement of their sum.
#[derive(Debug, Clone)]
pub struct RecoveryMap {
    channel: QuantumChannel,
    leaders: Vec<SymplecticVector>,
    has_rest: bool,
}

impl RecoveryMap {
    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn kraus(&self) -> &[DenseOperator] {
        self.channel.kraus()
    }

    pub fn leaders(&self) -> &[SymplecticVector] {
        &self.leaders
    }

    /// Whether `Π_rest` is nonzero and therefore present as the last Kraus
    /// operator.
    pub fn has_rest(&self) -> bool {
        self.has_rest
    }
}

pub fn build_recovery(code: &StabilizerCode) -> Result<RecoveryMap> {
    let leaders = code.leaders().to_vec();
    if !is_coset_leader_set(code.stabilizer(), &leaders) {
        return Err(Error::Argument(
            "leaders do not lie in distinct cosets of L^⊥".into(),
        ));
    }
    let basis = code.error_basis();
    let dim = code.basis().nrows();
    let mut images = Vec::with_capacity(leaders.len());
    let mut ops = Vec::with_capacity(leaders.len());
    for r in &leaders {
        let nr = basis.pauli_string(r)?;
        images.push(&nr * code.basis());
        ops.push(nr);
    }
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            let overlap = max_abs_diff(
                &(a.adjoint() * b),
                &DenseOperator::zeros(a.ncols(), b.ncols()),
            );
            if overlap > ORTHOGONALITY_TOLERANCE {
                return Err(Error::InvariantViolation(format!(
                    "error images of the code overlap by {overlap:e}"
                )));
            }
        }
    }
    let mut kraus = Vec::with_capacity(leaders.len() + 1);
    let mut rest = DenseOperator::identity(dim, dim);
    for (nr, w) in ops.iter().zip(&images) {
        let pi = w * w.adjoint();
        rest -= &pi;
        kraus.push(nr.adjoint() * pi);
    }
    let has_rest = rest.norm() > 1e-9;
    if has_rest {
        kraus.push(rest);
    }
    let channel = QuantumChannel::new(basis.modulus(), code.n(), kraus)?;
    Ok(RecoveryMap {
        channel,
        leaders,
        has_rest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{c, ErrorBasis};
    use crate::gfsym::SymplecticSubspace;
    use crate::simkit::build_codes;

    fn v(s: &str) -> SymplecticVector {
        SymplecticVector::parse(2, s).unwrap()
    }

    #[test]
    fn two_qubit_recovery() {
        let b = ErrorBasis::standard(2).unwrap();
        let l = SymplecticSubspace::parse(2, &["0101"]).unwrap();
        let code = build_codes(&l, &b)
            .unwrap()
            .remove(0)
            .with_leaders(vec![v("0000"), v("1000")])
            .unwrap();
        let rec = build_recovery(&code).unwrap();
        // N_0 C and N_h C fill the space, so Π_rest vanishes.
        assert!(!rec.has_rest());
        assert_eq!(rec.kraus().len(), 2);
        let p0 = code.projector();
        assert!(max_abs_diff(&rec.kraus()[0], &p0) < 1e-12);
        // X⊗I maps |01> to |11>, and the second Kraus operator undoes it.
        let mut k01 = DenseOperator::zeros(4, 1);
        k01[(1, 0)] = c(1.0, 0.0);
        let mut k11 = DenseOperator::zeros(4, 1);
        k11[(3, 0)] = c(1.0, 0.0);
        assert!(max_abs_diff(&(&rec.kraus()[1] * &k01), &k11) < 1e-12);
        assert!(rec.channel().tp_deviation() < 1e-12);
    }

    #[test]
    fn trivial_code_recovery_is_identity() {
        let b = ErrorBasis::standard(2).unwrap();
        let code = build_codes(&SymplecticSubspace::zero(2, 1).unwrap(), &b)
            .unwrap()
            .remove(0);
        let rec = build_recovery(&code).unwrap();
        assert_eq!(rec.kraus().len(), 1);
        assert!(max_abs_diff(&rec.kraus()[0], &DenseOperator::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn partial_leader_set_has_rest() {
        let b = ErrorBasis::standard(2).unwrap();
        let l = SymplecticSubspace::parse(2, &["0101", "1010"]).unwrap();
        let code = build_codes(&l, &b)
            .unwrap()
            .remove(0)
            .with_leaders(vec![v("0000"), v("1000")])
            .unwrap();
        let rec = build_recovery(&code).unwrap();
        assert!(rec.has_rest());
        assert!(rec.channel().tp_deviation() < 1e-12);
    }
}
