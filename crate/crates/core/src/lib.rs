//! Error exponents and capacity lower bounds for memoryless quantum channels
//! of prime dimension, together with an exact dense simulator for small
//! symplectic (stabilizer) codes.
//!
//! The crate is organised in four layers:
//!
//! - [`gfsym`]: exact linear algebra over `F_d` with the symplectic form,
//!   self-orthogonal subspace enumeration, types of sequences and
//!   minimum-entropy coset leaders.
//! - [`channel`]: Kraus channels, the `X^i Z^j` error basis, the channel
//!   error distribution `P_A`, Choi states and channel files.
//! - [`exponent`]: entropy, divergence, the exponent
//!   `E(R,P) = min_Q [D(Q||P) + |1 - H(Q) - R|^+]`, capacity bounds and the
//!   entangled-fidelity comparison bound `1 - H_1(p')`.
//! - [`simkit`]: code spaces, Knill–Laflamme recovery, minimum / minimum
//!   average / entanglement fidelities and the bounds relating them.
//!
//! ```
//! use qexp::channel::{ErrorBasis, QuantumChannel};
//! use qexp::exponent::{capacity_lower_bound, exponent};
//!
//! let basis = ErrorBasis::standard(2).unwrap();
//! let ch = QuantumChannel::amplitude_damping(0.2).unwrap();
//! let p = ch.error_distribution(&basis).unwrap();
//! assert!(capacity_lower_bound(&p) > 0.0);
//! assert!(exponent(0.1, &p).value > 0.0);
//! ```

pub mod channel;
pub mod error;
pub mod exponent;
pub mod gfsym;
pub mod simkit;

pub use error::{Error, Result};
