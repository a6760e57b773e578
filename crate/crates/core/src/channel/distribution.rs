use crate::error::{Error, Result};
use crate::gfsym::{check_prime, checked_pow, SymplecticVector};

/// Normalisation tolerance for probability vectors.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A probability distribution on `X = F_d^2`, symbol `(u, v)` at index
/// `u * d + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorDistribution {
    d: u32,
    probs: Vec<f64>,
}

impl ErrorDistribution {
    /// Validates length, finiteness, nonnegativity (entries above `-1e-12`
    /// are clamped to zero) and normalisation.
    pub fn new(d: u32, mut probs: Vec<f64>) -> Result<Self> {
        check_prime(d)?;
        let len = (d * d) as usize;
        if probs.len() != len {
            return Err(Error::Dimension(format!(
                "distribution on X = F_{d}^2 needs {len} entries, got {}",
                probs.len()
            )));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::Validation {
                    message: format!("invalid probability {p}"),
                    deviation: p.abs(),
                });
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Validation {
                message: "probabilities do not sum to 1".into(),
                deviation: (total - 1.0).abs(),
            });
        }
        Ok(Self { d, probs })
    }

    pub fn point_mass(d: u32, u: u32, v: u32) -> Result<Self> {
        check_prime(d)?;
        let mut probs = vec![0.0; (d * d) as usize];
        probs[((u % d) * d + v % d) as usize] = 1.0;
        Ok(Self { d, probs })
    }

    pub fn uniform(d: u32) -> Result<Self> {
        check_prime(d)?;
        let len = (d * d) as usize;
        Ok(Self {
            d,
            probs: vec![1.0 / len as f64; len],
        })
    }

    /// `P(0,0) = 1 - p` and `p / (d^2 - 1)` on every other symbol.
    pub fn depolarizing(d: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("p = {p} is not in [0, 1]")));
        }
        check_prime(d)?;
        let len = (d * d) as usize;
        let mut probs = vec![p / (len - 1) as f64; len];
        probs[0] = 1.0 - p;
        Ok(Self { d, probs })
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, u: u32, v: u32) -> f64 {
        self.probs[(u * self.d + v) as usize]
    }

    /// Indices with positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&i| self.probs[i] > 0.0)
            .collect()
    }

    pub fn product(&self, n: usize) -> Result<ProductDistribution> {
        ProductDistribution::new(self.clone(), n)
    }
}

/// Lazily evaluated product distribution `P^n` on `X^n`.
#[derive(Debug, Clone)]
pub struct ProductDistribution {
    base: ErrorDistribution,
    n: usize,
}

impl ProductDistribution {
    pub fn new(base: ErrorDistribution, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("n must be at least 1".into()));
        }
        Ok(Self { base, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &ErrorDistribution {
        &self.base
    }

    /// `prod_i P(y_i)` for flat symbol indices `y_i`.
    pub fn prob_symbols(&self, symbols: &[usize]) -> Result<f64> {
        if symbols.len() != self.n {
            return Err(Error::Dimension(format!(
                "expected {} symbols, got {}",
                self.n,
                symbols.len()
            )));
        }
        Ok(symbols.iter().map(|&s| self.base.probs[s]).product())
    }

    /// `P^n(x)` for `x` read as `n` symbol pairs.
    pub fn prob(&self, x: &SymplecticVector) -> Result<f64> {
        if x.modulus() != self.base.d || x.n() != self.n {
            return Err(Error::Dimension(format!(
                "vector {x} is not in X^{} over F_{}",
                self.n, self.base.d
            )));
        }
        Ok((0..self.n)
            .map(|i| self.base.probs[x.symbol_index(i)])
            .product())
    }

    /// Exhaustive `sum_{x in X^n} P^n(x)`, limited to `d^{2n} <= 2^20`.
    pub fn total(&self) -> Result<f64> {
        let size = checked_pow(self.base.d, 2 * self.n)
            .filter(|&s| s <= 1 << 20)
            .ok_or_else(|| Error::Resource("X^n exceeds 2^20 sequences".into()))?;
        Ok((0..size)
            .map(|i| {
                let x = SymplecticVector::from_index(self.base.d, self.n, i);
                (0..self.n)
                    .map(|k| self.base.probs[x.symbol_index(k)])
                    .product::<f64>()
            })
            .sum())
    }
}
