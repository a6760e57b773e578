//! Exact linear algebra over the prime field `F_d` with the symplectic form
//! `<x, y> = sum_i u_i v'_i - v_i u'_i` on `F_d^{2n}`.
//!
//! Vectors are stored interleaved as `(u_1, v_1, ..., u_n, v_n)`; the pair
//! `(u_i, v_i)` is the error-basis symbol of the `i`-th tensor factor.
//! Subspaces are always kept in reduced row-echelon form, so equality of
//! subspaces is equality of representations.

mod census;
mod leaders;
mod types;

pub use census::{witt_ratio_census, WittCensus};
pub use leaders::{coset_syndrome, is_coset_leader_set, min_entropy_coset_leaders};
pub use types::{type_census, type_of, TypeCensus, TypeClass, TypeDistribution};

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on `log2` of the number of elements any exhaustive enumeration
/// in this module may visit.
pub const ENUMERATION_CAP_BITS: f64 = 24.0;

/// Trial-division primality test.
pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= d as u64 {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn check_prime(d: u32) -> Result<()> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(Error::Argument(format!("modulus {d} is not prime")))
    }
}

pub(crate) fn mul_mod(a: u32, b: u32, d: u32) -> u32 {
    ((a as u64 * b as u64) % d as u64) as u32
}

pub(crate) fn inv_mod(a: u32, d: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(d));
    // Fermat: a^(d-2)
    let mut base = a % d;
    let mut exp = d - 2;
    let mut acc = 1u32;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, d);
        }
        base = mul_mod(base, base, d);
        exp >>= 1;
    }
    acc
}

/// `d^e` as `u64`, or `None` on overflow.
pub(crate) fn checked_pow(d: u32, e: usize) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(d as u64)?;
    }
    Some(acc)
}

/// An element of `F_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: u32, modulus: u32) -> Result<Self> {
        check_prime(modulus)?;
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    pub(crate) fn new_unchecked(value: u32, modulus: u32) -> Self {
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector of `F_d^{2n}` in interleaved `(u_1, v_1, ..., u_n, v_n)` order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticVector {
    d: u32,
    coords: Vec<u32>,
}

impl SymplecticVector {
    pub fn new(d: u32, coords: Vec<u32>) -> Result<Self> {
        check_prime(d)?;
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "symplectic vectors need an even, positive length; got {}",
                coords.len()
            )));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= d) {
            return Err(Error::Argument(format!("coordinate {c} is not in F_{d}")));
        }
        Ok(Self { d, coords })
    }

    pub(crate) fn from_raw(d: u32, coords: Vec<u32>) -> Self {
        Self { d, coords }
    }

    pub fn zero(d: u32, n: usize) -> Self {
        Self {
            d,
            coords: vec![0; 2 * n],
        }
    }

    /// Parses a digit string such as `"0101"`; for `d > 10` the coordinates
    /// are comma separated.
    pub fn parse(d: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let coords: Result<Vec<u32>> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad coordinate {t:?}: {e}")))
                })
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect()
        };
        Self::new(d, coords?)
    }

    /// The vector whose base-`d` digits (most significant first) spell `index`.
    pub fn from_index(d: u32, n: usize, mut index: u64) -> Self {
        let mut coords = vec![0u32; 2 * n];
        for c in coords.iter_mut().rev() {
            *c = (index % d as u64) as u32;
            index /= d as u64;
        }
        Self { d, coords }
    }

    /// Inverse of [`from_index`](Self::from_index); the order agrees with the
    /// lexicographic order of coordinates.
    pub fn index(&self) -> u64 {
        self.coords
            .iter()
            .fold(0u64, |acc, &c| acc * self.d as u64 + c as u64)
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    /// Number of tensor factors `n`.
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// The error-basis symbol `(u_i, v_i)` of factor `i`.
    pub fn symbol(&self, i: usize) -> (u32, u32) {
        (self.coords[2 * i], self.coords[2 * i + 1])
    }

    /// Flat symbol index `u_i * d + v_i` of factor `i`.
    pub fn symbol_index(&self, i: usize) -> usize {
        let (u, v) = self.symbol(i);
        (u * self.d + v) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.coords.len() != other.coords.len() {
            return Err(Error::Dimension(format!(
                "F_{}^{} vs F_{}^{}",
                self.d,
                self.coords.len(),
                other.d,
                other.coords.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let d = self.d;
        Self {
            d,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| (a + b) % d)
                .collect(),
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        let d = self.d;
        Self {
            d,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| (a + d - b) % d)
                .collect(),
        }
    }

    pub fn scale(&self, a: u32) -> Self {
        let d = self.d;
        Self {
            d,
            coords: self.coords.iter().map(|&c| mul_mod(c, a % d, d)).collect(),
        }
    }
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d <= 10 {
            for c in &self.coords {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

pub(crate) fn form_raw(x: &[u32], y: &[u32], d: u32) -> u32 {
    let d64 = d as u64;
    let mut acc = 0u64;
    for i in 0..x.len() / 2 {
        let (u, v) = (x[2 * i] as u64, x[2 * i + 1] as u64);
        let (u2, v2) = (y[2 * i] as u64, y[2 * i + 1] as u64);
        acc = (acc + u * v2 % d64 + d64 - v * u2 % d64) % d64;
    }
    acc as u32
}

/// `<x, y> = sum_i (u_i v'_i - v_i u'_i) mod d`.
pub fn symplectic_form(x: &SymplecticVector, y: &SymplecticVector) -> Result<FieldElement> {
    x.check_compatible(y)?;
    Ok(FieldElement::new_unchecked(
        form_raw(&x.coords, &y.coords, x.d),
        x.d,
    ))
}

/// Reduced row-echelon form over `F_d`; zero rows are dropped and pivots
/// are ascending with unit leading entries.
pub(crate) fn rref(mut rows: Vec<Vec<u32>>, d: u32) -> Vec<Vec<u32>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = inv_mod(rows[rank][col], d);
        for c in rows[rank].iter_mut() {
            *c = mul_mod(*c, inv, d);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (c, &p) in row.iter_mut().zip(&pivot_row) {
                *c = (*c + d - mul_mod(f, p, d)) % d;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// A linear subspace of `F_d^{2n}` held by its canonical (reduced
/// row-echelon) basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticSubspace {
    d: u32,
    n: usize,
    basis: Vec<SymplecticVector>,
}

impl SymplecticSubspace {
    /// The span of `vectors` inside `F_d^{2n}`.
    pub fn span(d: u32, n: usize, vectors: &[SymplecticVector]) -> Result<Self> {
        check_prime(d)?;
        if n == 0 {
            return Err(Error::Dimension("n must be positive".into()));
        }
        for v in vectors {
            if v.d != d || v.n() != n {
                return Err(Error::Dimension(format!(
                    "vector {v} is not in F_{d}^{}",
                    2 * n
                )));
            }
        }
        Ok(Self::from_rows(
            d,
            n,
            vectors.iter().map(|v| v.coords.clone()).collect(),
        ))
    }

    pub(crate) fn from_rows(d: u32, n: usize, rows: Vec<Vec<u32>>) -> Self {
        let basis = rref(rows, d)
            .into_iter()
            .map(|r| SymplecticVector::from_raw(d, r))
            .collect();
        Self { d, n, basis }
    }

    /// Parses generators given as digit strings, e.g. `&["0101"]`.
    pub fn parse(d: u32, generators: &[&str]) -> Result<Self> {
        let vs: Vec<SymplecticVector> = generators
            .iter()
            .map(|s| SymplecticVector::parse(d, s))
            .collect::<Result<_>>()?;
        let n = vs
            .first()
            .map(|v| v.n())
            .ok_or_else(|| Error::Argument("need at least one generator".into()))?;
        Self::span(d, n, &vs)
    }

    pub fn zero(d: u32, n: usize) -> Result<Self> {
        Self::span(d, n, &[])
    }

    pub fn full(d: u32, n: usize) -> Result<Self> {
        check_prime(d)?;
        let rows = (0..2 * n)
            .map(|i| {
                let mut r = vec![0; 2 * n];
                r[i] = 1;
                r
            })
            .collect();
        Ok(Self::from_rows(d, n, rows))
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical basis; pivots ascending.
    pub fn basis(&self) -> &[SymplecticVector] {
        &self.basis
    }

    pub fn contains(&self, x: &SymplecticVector) -> bool {
        if x.d != self.d || x.n() != self.n {
            return false;
        }
        let mut r = x.coords.clone();
        for b in &self.basis {
            let pivot = b.coords.iter().position(|&c| c != 0).unwrap();
            let f = r[pivot];
            if f != 0 {
                for (c, &bc) in r.iter_mut().zip(&b.coords) {
                    *c = (*c + self.d - mul_mod(f, bc, self.d)) % self.d;
                }
            }
        }
        r.iter().all(|&c| c == 0)
    }

    /// `L^⊥ = { x : <x, y> = 0 for all y in L }`.
    pub fn dual(&self) -> Self {
        let (d, m) = (self.d, 2 * self.n);
        // <b, x> = sum_i b_{u,i} x_{v,i} - b_{v,i} x_{u,i}: one linear equation per basis row.
        let eqs: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|b| {
                let mut row = vec![0u32; m];
                for i in 0..self.n {
                    row[2 * i] = (d - b.coords[2 * i + 1]) % d;
                    row[2 * i + 1] = b.coords[2 * i];
                }
                row
            })
            .collect();
        let reduced = rref(eqs, d);
        let pivots: Vec<usize> = reduced
            .iter()
            .map(|r| r.iter().position(|&c| c != 0).unwrap())
            .collect();
        let mut kernel = Vec::with_capacity(m - pivots.len());
        for free in (0..m).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; m];
            v[free] = 1;
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = (d - row[free]) % d;
            }
            kernel.push(v);
        }
        Self::from_rows(d, self.n, kernel)
    }

    /// `L ⊂ L^⊥`: every pair of basis rows pairs to zero.
    pub fn is_self_orthogonal(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| form_raw(&a.coords, &b.coords, self.d) == 0)
        })
    }

    /// All `d^dim` elements, in the order of their coefficient vectors.
    pub fn elements(&self) -> impl Iterator<Item = SymplecticVector> + '_ {
        let k = self.dim();
        let total = (self.d as u64).pow(k as u32);
        (0..total).map(move |mut idx| {
            let mut acc = SymplecticVector::zero(self.d, self.n);
            for b in self.basis.iter().rev() {
                let c = (idx % self.d as u64) as u32;
                idx /= self.d as u64;
                if c != 0 {
                    acc = acc.add_unchecked(&b.scale(c));
                }
            }
            acc
        })
    }
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every subspace of `F_d^{2n}` of dimension `dim`, each exactly once, by
/// walking the reduced row-echelon forms directly.
pub fn enumerate_subspaces(
    n: usize,
    dim: usize,
    d: u32,
) -> Result<impl Iterator<Item = SymplecticSubspace>> {
    check_prime(d)?;
    let m = 2 * n;
    if n == 0 || dim > m {
        return Err(Error::Argument(format!(
            "no {dim}-dimensional subspaces of F_{d}^{m}"
        )));
    }
    let bits = (m * dim) as f64 * (d as f64).log2();
    if bits > ENUMERATION_CAP_BITS + 1e-9 {
        return Err(Error::Resource(format!(
            "enumerating {dim}-dimensional subspaces of F_{d}^{m} needs 2^{bits:.1} steps (cap 2^{ENUMERATION_CAP_BITS})"
        )));
    }
    Ok(combinations(m, dim).into_iter().flat_map(move |pivots| {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..m)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let total = (d as u64).pow(free.len() as u32);
        (0..total).map(move |mut a| {
            let mut rows = vec![vec![0u32; m]; dim];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (a % d as u64) as u32;
                a /= d as u64;
            }
            SymplecticSubspace {
                d,
                n,
                basis: rows
                    .into_iter()
                    .map(|r| SymplecticVector::from_raw(d, r))
                    .collect(),
            }
        })
    }))
}

/// The set `A_so` of self-orthogonal subspaces with the given dimension.
pub fn enumerate_self_orthogonal(
    n: usize,
    dim: usize,
    d: u32,
) -> Result<impl Iterator<Item = SymplecticSubspace>> {
    if dim > n {
        // isotropic subspaces have dimension at most n
        return Err(Error::Argument(format!(
            "self-orthogonal subspaces of F_{d}^{} have dimension <= {n}",
            2 * n
        )));
    }
    Ok(enumerate_subspaces(n, dim, d)?.filter(|l| l.is_self_orthogonal()))
}

/// All vectors of `F_d^{2n}`, guarded by the enumeration cap.
pub fn all_vectors(d: u32, n: usize) -> Result<impl Iterator<Item = SymplecticVector>> {
    check_prime(d)?;
    let total = checked_pow(d, 2 * n)
        .filter(|&t| t <= 1 << ENUMERATION_CAP_BITS as u32)
        .ok_or_else(|| {
            Error::Resource(format!(
                "F_{d}^{} has more than 2^{ENUMERATION_CAP_BITS} elements",
                2 * n
            ))
        })?;
    Ok((0..total).map(move |i| SymplecticVector::from_index(d, n, i)))
}
