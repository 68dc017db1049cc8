#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use sumentropy_core::dist::DiscreteDist;
use sumentropy_core::exactnum::{rat, Rat};
use sumentropy_core::partition::Collection;
use sumentropy_core::support::{Basis, SupportSet, SymValue};

const APPROX: [&str; 4] = ["1", "3.141592653589793", "1.4142135623730951", "2.718281828459045"];

pub fn basis(dim: usize) -> Arc<Basis> {
    let names: Vec<(String, &str)> = (0..dim).map(|i| (format!("x{}", i + 1), APPROX[i])).collect();
    let refs: Vec<(&str, &str)> = names.iter().map(|(n, a)| (n.as_str(), *a)).collect();
    Basis::from_names(&refs).unwrap()
}

/// Numerator in [-3, 3], denominator in [1, 3].
pub fn coord() -> impl Strategy<Value = Rat> {
    (-3i64..=3, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

pub fn distinct_atoms(dim: usize, min: usize, max: usize) -> impl Strategy<Value = Vec<SymValue>> {
    prop::collection::btree_set(prop::collection::vec(coord(), dim), min..=max)
        .prop_map(|set| set.into_iter().map(SymValue::new).collect())
}

/// A random support set of dimension 1..=3.
pub fn support(min: usize, max: usize) -> impl Strategy<Value = SupportSet> {
    (1usize..=3).prop_flat_map(move |dim| {
        distinct_atoms(dim, min, max).prop_map(move |atoms| SupportSet::new(basis(dim), atoms).unwrap())
    })
}

/// A random collection: atoms of a random set are dealt into at most three
/// cells or left out; cells equal to {0} are dropped.
pub fn collection() -> impl Strategy<Value = Collection> {
    support(1, 5)
        .prop_flat_map(|s| {
            let n = s.len();
            (Just(s), prop::collection::vec(0usize..4, n))
        })
        .prop_filter_map("no cells", |(s, deal)| {
            let mut groups: Vec<Vec<SymValue>> = vec![Vec::new(); 3];
            for (a, &g) in s.atoms().iter().zip(&deal) {
                if g < 3 {
                    groups[g].push(a.clone());
                }
            }
            let groups: Vec<_> = groups
                .into_iter()
                .filter(|g| !g.is_empty() && !(g.len() == 1 && g[0].is_zero()))
                .collect();
            if groups.is_empty() {
                return None;
            }
            Some(Collection::from_groups(&s, groups).unwrap())
        })
}

/// A random law on 1..=max atoms with weights in 1..=4.
pub fn dist(dim_max: usize, max: usize) -> impl Strategy<Value = DiscreteDist> {
    (1usize..=dim_max)
        .prop_flat_map(move |dim| {
            distinct_atoms(dim, 1, max).prop_flat_map(move |atoms| {
                let n = atoms.len();
                (Just(dim), Just(atoms), prop::collection::vec(1u32..=4, n))
            })
        })
        .prop_map(|(dim, atoms, w)| {
            let pairs = atoms.into_iter().zip(w.into_iter().map(BigUint::from)).collect();
            DiscreteDist::from_weights(basis(dim), pairs).unwrap()
        })
}

/// Deals all atoms of `d` into cells by `deal[i] % k`, keeping nonempty cells.
pub fn cover(s: &SupportSet, deal: &[usize], k: usize) -> Vec<Vec<SymValue>> {
    let mut groups: Vec<Vec<SymValue>> = vec![Vec::new(); k];
    for (a, g) in s.atoms().iter().zip(deal) {
        groups[g % k].push(a.clone());
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

pub fn atom_set(s: &SupportSet) -> BTreeSet<SymValue> {
    s.atoms().iter().cloned().collect()
}
