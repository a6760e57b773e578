use std::collections::HashSet;

use super::{all_vectors, form_raw, type_of, SymplecticSubspace, SymplecticVector};
use crate::error::{Error, Result};

/// Label of the coset `x + L^⊥`: the pairings `<g_j, x>` with the canonical
/// generators `g_j` of `L`. Two vectors share a coset iff their labels agree.
pub fn coset_syndrome(l: &SymplecticSubspace, x: &SymplecticVector) -> Vec<u32> {
    l.basis()
        .iter()
        .map(|g| form_raw(g.coords(), x.coords(), l.modulus()))
        .collect()
}

fn syndrome_index(s: &[u32], d: u32) -> usize {
    s.iter()
        .fold(0usize, |acc, &c| acc * d as usize + c as usize)
}

/// True iff no two distinct members of `leaders` differ by an element of
/// `L^⊥`, i.e. they represent distinct cosets of `L^⊥`.
pub fn is_coset_leader_set(l: &SymplecticSubspace, leaders: &[SymplecticVector]) -> bool {
    let mut seen = HashSet::new();
    let mut distinct = HashSet::new();
    for x in leaders {
        if x.modulus() != l.modulus() || x.n() != l.n() {
            return false;
        }
        if !distinct.insert(x.clone()) {
            continue;
        }
        if !seen.insert(coset_syndrome(l, x)) {
            return false;
        }
    }
    true
}

/// One minimum-type-entropy representative for every coset of `L^⊥` in
/// `F_d^{2n}`, ordered by coset label (base-`d` digits, first generator most
/// significant); the leader of `L^⊥` itself comes first.
///
/// Ties are broken towards the lexicographically smallest vector. Each
/// vector in `preferred` replaces the leader of its coset, provided it is
/// itself an entropy minimizer there.
pub fn min_entropy_coset_leaders(
    l: &SymplecticSubspace,
    preferred: &[SymplecticVector],
) -> Result<Vec<SymplecticVector>> {
    let (d, n) = (l.modulus(), l.n());
    let cosets = (d as usize).pow(l.dim() as u32);
    let mut best: Vec<Option<(u128, SymplecticVector)>> = vec![None; cosets];
    for x in all_vectors(d, n)? {
        // n <= 12 under the enumeration cap, so n^n fits in u128.
        let key = type_of(&x).concentration().expect("n^n fits in u128");
        let slot = &mut best[syndrome_index(&coset_syndrome(l, &x), d)];
        match slot {
            Some((k, _)) if *k >= key => {}
            _ => *slot = Some((key, x)),
        }
    }
    let mut leaders: Vec<SymplecticVector> = best
        .into_iter()
        .map(|b| b.expect("every coset is non-empty").1)
        .collect();

    let mut overridden = HashSet::new();
    for p in preferred {
        if p.modulus() != d || p.n() != n {
            return Err(Error::Dimension(format!(
                "preferred leader {p} is not in F_{d}^{}",
                2 * n
            )));
        }
        let idx = syndrome_index(&coset_syndrome(l, p), d);
        if !overridden.insert(idx) {
            return Err(Error::Argument(format!(
                "two preferred leaders share the coset of {p}"
            )));
        }
        let current = type_of(&leaders[idx]).concentration();
        if type_of(p).concentration() != current {
            return Err(Error::Argument(format!(
                "preferred leader {p} does not minimize the type entropy of its coset"
            )));
        }
        leaders[idx] = p.clone();
    }
    Ok(leaders)
}
