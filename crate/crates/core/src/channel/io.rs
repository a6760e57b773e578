use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DenseOperator, QuantumChannel};
use crate::error::{Error, Result};

/// On-disk channel description: `{"d": 2, "m": 1, "kraus": [...]}` where each
/// Kraus operator is a row-major matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub d: u32,
    pub m: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        let kraus = ch
            .kraus()
            .iter()
            .map(|a| {
                (0..a.nrows())
                    .map(|i| {
                        (0..a.ncols())
                            .map(|j| [a[(i, j)].re, a[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            d: ch.modulus(),
            m: ch.m(),
            kraus,
        }
    }

    /// Builds the channel; shape problems surface as dimension errors and a
    /// non-trace-preserving set as a validation error carrying
    /// `max |sum A†A - I|`.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (k, rows) in self.kraus.iter().enumerate() {
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err(Error::Dimension(format!(
                    "Kraus operator {k} is not square"
                )));
            }
            ops.push(DenseOperator::from_fn(dim, dim, |i, j| {
                let [re, im] = rows[i][j];
                Complex64::new(re, im)
            }));
        }
        QuantumChannel::new(self.d, self.m, ops)
    }

    pub fn parse(text: &str) -> Result<QuantumChannel> {
        let file: ChannelFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel file: {e}")))?;
        file.to_channel()
    }

    pub fn load(path: &Path) -> Result<QuantumChannel> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel files always serialise")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::max_abs_diff;

    #[test]
    fn round_trip() {
        let ch = QuantumChannel::amplitude_damping(0.25).unwrap();
        let back = ChannelFile::parse(&ChannelFile::from_channel(&ch).to_json()).unwrap();
        for (a, b) in ch.kraus().iter().zip(back.kraus()) {
            assert_eq!(max_abs_diff(a, b), 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let not_tp = r#"{"d":2,"m":1,"kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        match ChannelFile::parse(not_tp) {
            Err(Error::Validation { deviation, .. }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ChannelFile::parse("{"), Err(Error::Parse(_))));
        let ragged = r#"{"d":2,"m":1,"kraus":[[[[1,0]],[[0,0],[1,0]]]]}"#;
        assert!(matches!(
            ChannelFile::parse(ragged),
            Err(Error::Dimension(_))
        ));
        let identity = r#"{"d":2,"m":1,"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(ChannelFile::parse(identity).is_ok());
    }
}
