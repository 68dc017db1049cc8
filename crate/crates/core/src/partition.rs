//! Incommensurable collections, canonical prepartitions and the
//! incommensurability rank.
//!
//! A collection of disjoint cells is incommensurable when every total of `N`
//! draws splits into per-cell partial sums in only one way. For finite cells
//! this is decided exactly: stack the atoms' coordinate rows and an all-ones
//! row (the fixed draw count) into a matrix `M`. Two decompositions of the
//! same total differ by an integer vector `z` with `M·z = 0`, and conversely
//! the positive and negative parts of any such `z` are two decompositions
//! with `N = Σ z⁺`. So the collection is incommensurable iff every kernel
//! vector has zero value sum on every cell.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{common_denominator, kernel_basis, q_dimension, Rat, RatMatrix};
use crate::support::{lattice_of, SupportSet, SymValue};

/// Default cap on states visited by the rank search.
pub const DEFAULT_RANK_BUDGET: u64 = 20_000_000;

/// Default cap on count vectors enumerated by the falsifier.
pub const DEFAULT_FALSIFY_BUDGET: u64 = 50_000_000;

/// Ordered, pairwise disjoint, nonempty cells drawn from a parent support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    parent: SupportSet,
    cells: Vec<SupportSet>,
}

impl Collection {
    pub fn new(parent: SupportSet, cells: Vec<SupportSet>) -> Result<Self> {
        for (j, cell) in cells.iter().enumerate() {
            if cell.is_zero_singleton() {
                return Err(Error::InvalidCollection(format!("cell {j} is {{0}}")));
            }
            if cell.basis().dim() != parent.basis().dim() {
                return Err(Error::DimensionMismatch {
                    expected: parent.basis().dim(),
                    found: cell.basis().dim(),
                });
            }
            if let Some(a) = cell.atoms().iter().find(|a| !parent.contains(a)) {
                return Err(Error::InvalidCollection(format!(
                    "cell {j} contains {} which is not in the parent set",
                    a.expr(parent.basis())
                )));
            }
            for (i, other) in cells[..j].iter().enumerate() {
                if let Some(a) = cell.atoms().iter().find(|a| other.contains(a)) {
                    return Err(Error::InvalidCollection(format!(
                        "cells {i} and {j} share {}",
                        a.expr(parent.basis())
                    )));
                }
            }
        }
        Ok(Collection { parent, cells })
    }

    /// Builds cells from atom groups, all drawn from `parent`.
    pub fn from_groups(parent: &SupportSet, groups: Vec<Vec<SymValue>>) -> Result<Self> {
        let cells = groups
            .into_iter()
            .map(|g| SupportSet::new(parent.basis().clone(), g))
            .collect::<Result<Vec<_>>>()?;
        Collection::new(parent.clone(), cells)
    }

    /// A collection whose parent is the union of its cells.
    pub fn standalone(basis: alloc::sync::Arc<crate::support::Basis>, groups: Vec<Vec<SymValue>>) -> Result<Self> {
        let all: Vec<SymValue> = groups.iter().flatten().cloned().collect();
        let parent = SupportSet::new(basis, all).map_err(|e| match e {
            Error::DuplicateAtom(a) => Error::InvalidCollection(format!("cells overlap on {a}")),
            other => other,
        })?;
        Collection::from_groups(&parent, groups)
    }

    pub fn parent(&self) -> &SupportSet {
        &self.parent
    }

    pub fn cells(&self) -> &[SupportSet] {
        &self.cells
    }

    pub fn k(&self) -> usize {
        self.cells.len()
    }

    /// All cell atoms in cell order, with the owning cell of each.
    pub fn flatten(&self) -> (Vec<SymValue>, Vec<usize>) {
        let mut atoms = Vec::new();
        let mut cell_of = Vec::new();
        for (j, cell) in self.cells.iter().enumerate() {
            for a in cell.atoms() {
                atoms.push(a.clone());
                cell_of.push(j);
            }
        }
        (atoms, cell_of)
    }

    pub fn without_cell(&self, j: usize) -> Result<Collection> {
        let mut cells = self.cells.clone();
        cells.remove(j);
        Collection::new(self.parent.clone(), cells)
    }

    pub fn with_cell_replaced(&self, j: usize, atoms: Vec<SymValue>) -> Result<Collection> {
        let mut cells = self.cells.clone();
        cells[j] = self.parent.subset(atoms)?;
        Collection::new(self.parent.clone(), cells)
    }

    /// Merges cell `b` into cell `a` (the merged cell takes `a`'s position).
    pub fn merged(&self, a: usize, b: usize) -> Result<Collection> {
        if a == b || a >= self.k() || b >= self.k() {
            return Err(Error::Precondition(format!("cannot merge cells {a} and {b}")));
        }
        let mut atoms = self.cells[a].atoms().to_vec();
        atoms.extend_from_slice(self.cells[b].atoms());
        let mut cells = self.cells.clone();
        cells[a] = self.parent.subset(atoms)?;
        cells.remove(b);
        Collection::new(self.parent.clone(), cells)
    }
}

/// Two count assignments over the flattened atoms with the same number of
/// draws and the same total but different per-cell partial sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub draws: BigUint,
    pub left: Vec<BigUint>,
    pub right: Vec<BigUint>,
    pub total: SymValue,
    pub left_cell_sums: Vec<SymValue>,
    pub right_cell_sums: Vec<SymValue>,
}

impl Witness {
    fn from_counts(atoms: &[SymValue], cell_of: &[usize], k: usize, left: Vec<BigUint>, right: Vec<BigUint>) -> Witness {
        let dim = atoms.first().map_or(0, SymValue::dim);
        let left_cell_sums = cell_sums(atoms, cell_of, k, dim, &left);
        let right_cell_sums = cell_sums(atoms, cell_of, k, dim, &right);
        let total = left_cell_sums
            .iter()
            .fold(SymValue::zero(dim), |acc, s| &acc + s);
        Witness {
            draws: left.iter().sum(),
            left,
            right,
            total,
            left_cell_sums,
            right_cell_sums,
        }
    }

    /// Recomputes every claimed quantity from the counts.
    pub fn replay(&self, atoms: &[SymValue], cell_of: &[usize], k: usize) -> bool {
        if self.left.len() != atoms.len() || self.right.len() != atoms.len() {
            return false;
        }
        let dim = atoms.first().map_or(0, SymValue::dim);
        let left = cell_sums(atoms, cell_of, k, dim, &self.left);
        let right = cell_sums(atoms, cell_of, k, dim, &self.right);
        let sum = |v: &[SymValue]| v.iter().fold(SymValue::zero(dim), |acc, s| &acc + s);
        self.left.iter().sum::<BigUint>() == self.draws
            && self.right.iter().sum::<BigUint>() == self.draws
            && left == self.left_cell_sums
            && right == self.right_cell_sums
            && sum(&left) == self.total
            && sum(&right) == self.total
            && left != right
    }
}

fn cell_sums(atoms: &[SymValue], cell_of: &[usize], k: usize, dim: usize, counts: &[BigUint]) -> Vec<SymValue> {
    let mut sums = alloc::vec![SymValue::zero(dim); k];
    for ((a, &j), c) in atoms.iter().zip(cell_of).zip(counts) {
        if !c.is_zero() {
            sums[j] = &sums[j] + &a.scale_int(&BigInt::from(c.clone()));
        }
    }
    sums
}

fn signed_cell_sums(atoms: &[SymValue], cell_of: &[usize], k: usize, z: &[BigInt]) -> Vec<SymValue> {
    let dim = atoms.first().map_or(0, SymValue::dim);
    let mut sums = alloc::vec![SymValue::zero(dim); k];
    for ((a, &j), c) in atoms.iter().zip(cell_of).zip(z) {
        if !c.is_zero() {
            sums[j] = &sums[j] + &a.scale_int(c);
        }
    }
    sums
}

/// Kernel of the coordinate rows plus the all-ones draw-count row.
fn constraint_kernel(atoms: &[SymValue]) -> Vec<Vec<BigInt>> {
    let dim = atoms.first().map_or(0, SymValue::dim);
    let m = RatMatrix::from_fn(dim + 1, atoms.len(), |r, c| {
        if r < dim {
            atoms[c].coords()[r].clone()
        } else {
            Rat::one()
        }
    });
    kernel_basis(&m)
}

fn has_violation(atoms: &[SymValue], cell_of: &[usize], k: usize) -> bool {
    constraint_kernel(atoms)
        .iter()
        .any(|z| signed_cell_sums(atoms, cell_of, k, z).iter().any(|s| !s.is_zero()))
}

/// Verdict of [`is_incommensurable`] with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncommCertificate {
    pub atoms: Vec<SymValue>,
    pub cell_of: Vec<usize>,
    pub k: usize,
    pub kernel: Vec<Vec<BigInt>>,
    /// Per-cell value sums of each kernel vector.
    pub kernel_cell_sums: Vec<Vec<SymValue>>,
    /// Present iff the collection is commensurable.
    pub witness: Option<Witness>,
}

impl IncommCertificate {
    pub fn verdict(&self) -> bool {
        self.witness.is_none()
    }

    /// Re-checks the certificate from scratch: kernel vectors are in the
    /// kernel, and either all their cell sums vanish or the witness replays.
    pub fn replay(&self) -> bool {
        let dim = self.atoms.first().map_or(0, SymValue::dim);
        let in_kernel = self.kernel.iter().all(|z| {
            let count: BigInt = z.iter().sum();
            let value = self
                .atoms
                .iter()
                .zip(z)
                .fold(SymValue::zero(dim), |acc, (a, c)| &acc + &a.scale_int(c));
            count.is_zero() && value.is_zero()
        });
        let sums_match = self
            .kernel
            .iter()
            .zip(&self.kernel_cell_sums)
            .all(|(z, s)| signed_cell_sums(&self.atoms, &self.cell_of, self.k, z) == *s);
        let verdict_ok = match &self.witness {
            None => self.kernel_cell_sums.iter().flatten().all(SymValue::is_zero),
            Some(w) => w.replay(&self.atoms, &self.cell_of, self.k),
        };
        in_kernel && sums_match && verdict_ok && self.kernel.len() == self.kernel_cell_sums.len()
    }
}

/// Decides incommensurability exactly and returns a certificate.
///
/// For a commensurable collection the witness comes from the kernel basis
/// vector with a nonzero cell sum whose positive part is smallest.
pub fn is_incommensurable(c: &Collection) -> IncommCertificate {
    let (atoms, cell_of) = c.flatten();
    let k = c.k();
    let kernel = constraint_kernel(&atoms);
    let kernel_cell_sums: Vec<Vec<SymValue>> = kernel
        .iter()
        .map(|z| signed_cell_sums(&atoms, &cell_of, k, z))
        .collect();
    let witness = kernel
        .iter()
        .zip(&kernel_cell_sums)
        .filter(|(_, sums)| sums.iter().any(|s| !s.is_zero()))
        .map(|(z, _)| {
            let pos: Vec<BigUint> = z.iter().map(|x| if x.is_positive() { x.magnitude().clone() } else { BigUint::zero() }).collect();
            let neg: Vec<BigUint> = z.iter().map(|x| if x.is_negative() { x.magnitude().clone() } else { BigUint::zero() }).collect();
            (pos.iter().sum::<BigUint>(), pos, neg)
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .map(|(_, pos, neg)| Witness::from_counts(&atoms, &cell_of, k, pos, neg));
    IncommCertificate {
        atoms,
        cell_of,
        k,
        kernel,
        kernel_cell_sums,
        witness,
    }
}

/// Scales atoms to integer coordinate vectors (one common denominator per
/// coordinate), which preserves equality of all integer combinations.
fn integer_coords(atoms: &[SymValue]) -> Result<Vec<Vec<i128>>> {
    let dim = atoms.first().map_or(0, SymValue::dim);
    let dens: Vec<BigInt> = (0..dim)
        .map(|d| common_denominator(atoms.iter().map(|a| &a.coords()[d])))
        .collect();
    atoms
        .iter()
        .map(|a| {
            a.coords()
                .iter()
                .zip(&dens)
                .map(|(c, den)| {
                    (c * Rat::from_integer(den.clone()))
                        .to_integer()
                        .to_i64()
                        .map(i128::from)
                        .ok_or_else(|| Error::Precondition("coordinates too large for exhaustive enumeration".into()))
                })
                .collect()
        })
        .collect()
}

/// Counts and per-cell sums of the first count vector seen for a total.
type FirstSeen = (Vec<u64>, Vec<Vec<i128>>);

struct Enumeration<'a> {
    ints: &'a [Vec<i128>],
    cell_of: &'a [usize],
    k: usize,
    counts: Vec<u64>,
    cell_sums: Vec<Vec<i128>>,
    seen: BTreeMap<Vec<i128>, FirstSeen>,
    states: u64,
    budget: u64,
}

impl Enumeration<'_> {
    /// Visits all count vectors for atoms `i..` summing to `remaining`,
    /// lexicographically. Returns the earlier decomposition on a clash.
    fn visit(&mut self, i: usize, remaining: u64) -> Result<Option<Vec<u64>>> {
        let last = i + 1 == self.ints.len();
        let range = if last { remaining..=remaining } else { 0..=remaining };
        for n in range {
            self.counts[i] = n;
            let j = self.cell_of[i];
            for (s, x) in self.cell_sums[j].iter_mut().zip(&self.ints[i]) {
                *s += x * n as i128;
            }
            let found = if last {
                self.states += 1;
                if self.states > self.budget {
                    return Err(Error::EnumerationBudget { budget: self.budget });
                }
                self.record()
            } else {
                self.visit(i + 1, remaining - n)?
            };
            for (s, x) in self.cell_sums[j].iter_mut().zip(&self.ints[i]) {
                *s -= x * n as i128;
            }
            if found.is_some() {
                self.counts[i] = n;
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn record(&mut self) -> Option<Vec<u64>> {
        let dim = self.ints.first().map_or(0, Vec::len);
        let mut total = alloc::vec![0i128; dim];
        for s in &self.cell_sums {
            for (t, x) in total.iter_mut().zip(s) {
                *t += x;
            }
        }
        match self.seen.get(&total) {
            Some((earlier, sums)) if *sums != self.cell_sums => Some(earlier.clone()),
            Some(_) => None,
            None => {
                self.seen.insert(total, (self.counts.clone(), self.cell_sums.clone()));
                None
            }
        }
    }
}

/// Exhaustive search for two decompositions with `N ≤ n_max` draws that
/// share a total but differ in some cell sum. Enumerates `N = 1, 2, …` and
/// count vectors lexicographically; never truncates silently.
pub fn falsify_incommensurability(c: &Collection, n_max: u64, budget: u64) -> Result<Option<Witness>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let (atoms, cell_of) = c.flatten();
    if atoms.is_empty() {
        return Ok(None);
    }
    let ints = integer_coords(&atoms)?;
    let dim = atoms[0].dim();
    let mut e = Enumeration {
        ints: &ints,
        cell_of: &cell_of,
        k: c.k(),
        counts: alloc::vec![0; atoms.len()],
        cell_sums: alloc::vec![alloc::vec![0; dim]; c.k()],
        seen: BTreeMap::new(),
        states: 0,
        budget,
    };
    for n in 1..=n_max {
        e.seen.clear();
        if let Some(earlier) = e.visit(0, n)? {
            let to_big = |v: &[u64]| v.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
            let _ = e.k;
            return Ok(Some(Witness::from_counts(
                &atoms,
                &cell_of,
                c.k(),
                to_big(&earlier),
                to_big(&e.counts),
            )));
        }
    }
    Ok(None)
}

/// Disjoint incommensurable lattice cells of a support plus the leftover
/// atoms. Singleton cells come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prepartition {
    parent: SupportSet,
    cells: Vec<SupportSet>,
    leftover: Vec<SymValue>,
    singletons: usize,
    certificate: IncommCertificate,
}

impl Prepartition {
    /// Validates the cells (lattices, disjoint, incommensurable) and orders
    /// singletons first, otherwise keeping the given order.
    pub fn new(parent: SupportSet, cells: Vec<SupportSet>) -> Result<Self> {
        let (mut ordered, rest): (Vec<_>, Vec<_>) = cells.into_iter().partition(|c| c.len() == 1);
        let singletons = ordered.len();
        ordered.extend(rest);
        for (j, cell) in ordered.iter().enumerate() {
            if cell.detect_lattice().is_none() {
                return Err(Error::InvalidCollection(format!("cell {j} is not a lattice")));
            }
        }
        let collection = Collection::new(parent.clone(), ordered)?;
        let certificate = is_incommensurable(&collection);
        if !certificate.verdict() {
            return Err(Error::InvalidCollection("cells are commensurable".into()));
        }
        let Collection { parent, cells } = collection;
        let leftover = parent
            .atoms()
            .iter()
            .filter(|a| !cells.iter().any(|c| c.contains(a)))
            .cloned()
            .collect();
        Ok(Prepartition {
            parent,
            cells,
            leftover,
            singletons,
            certificate,
        })
    }

    pub fn from_groups(parent: &SupportSet, groups: Vec<Vec<SymValue>>) -> Result<Self> {
        let cells = groups
            .into_iter()
            .map(|g| parent.subset(g))
            .collect::<Result<Vec<_>>>()?;
        Prepartition::new(parent.clone(), cells)
    }

    pub fn parent(&self) -> &SupportSet {
        &self.parent
    }

    pub fn cells(&self) -> &[SupportSet] {
        &self.cells
    }

    pub fn leftover(&self) -> &[SymValue] {
        &self.leftover
    }

    pub fn k(&self) -> usize {
        self.cells.len()
    }

    /// Number of singleton cells; they occupy indices `0..s`.
    pub fn s(&self) -> usize {
        self.singletons
    }

    pub fn is_degenerate(&self) -> bool {
        self.singletons == self.cells.len()
    }

    pub fn covers(&self) -> bool {
        self.leftover.is_empty()
    }

    pub fn certificate(&self) -> &IncommCertificate {
        &self.certificate
    }

    pub fn collection(&self) -> Collection {
        Collection {
            parent: self.parent.clone(),
            cells: self.cells.clone(),
        }
    }

    /// Merges singleton cells `a` and `b` into one two-atom cell.
    pub fn merge_singletons(&self, a: usize, b: usize) -> Result<Prepartition> {
        if a == b || a >= self.singletons || b >= self.singletons {
            return Err(Error::Precondition(format!("cells {a} and {b} are not two singletons")));
        }
        let merged = self.collection().merged(a.min(b), a.max(b))?;
        Prepartition::new(self.parent.clone(), merged.cells)
    }
}

/// Canonical prepartition from the rational span: pick a greedy basis of
/// atoms, and let cell `j` hold the nonzero atoms proportional to basis atom
/// `j`. Its size is the Q-dimension of the span.
pub fn lemma5_prepartition(s: &SupportSet) -> Result<Prepartition> {
    let coords: Vec<Vec<Rat>> = s.atoms().iter().map(|a| a.coords().to_vec()).collect();
    let (_, basis_idx) = q_dimension(&coords);
    let cells = basis_idx
        .iter()
        .map(|&b| {
            let pivot = &s.atoms()[b];
            let members = s
                .atoms()
                .iter()
                .filter(|a| !a.is_zero() && a.ratio_to(pivot).is_some())
                .cloned()
                .collect();
            s.subset(members)
        })
        .collect::<Result<Vec<_>>>()?;
    Prepartition::new(s.clone(), cells)
}

/// Incommensurability rank with the prepartition that attains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOutcome {
    pub rank: usize,
    /// `None` only for singleton supports (rank 0).
    pub certificate: Option<Prepartition>,
    pub states_visited: u64,
}

struct RankSearch<'a> {
    atoms: &'a [SymValue],
    cells: Vec<Vec<usize>>,
    best: usize,
    best_cells: Option<Vec<Vec<usize>>>,
    visited: u64,
    budget: u64,
}

impl RankSearch<'_> {
    fn cell_is_lattice(&self, j: usize) -> bool {
        let atoms: Vec<SymValue> = self.cells[j].iter().map(|&i| self.atoms[i].clone()).collect();
        lattice_of(&atoms).is_some()
    }

    fn is_zero_cell(&self, cell: &[usize]) -> bool {
        cell.len() == 1 && self.atoms[cell[0]].is_zero()
    }

    /// Incommensurability of the partial collection with `{0}` cells dropped.
    /// Dropping cells and shrinking cells preserve incommensurability, so a
    /// commensurable partial collection has no incommensurable completion.
    fn partial_is_incommensurable(&self) -> bool {
        let mut atoms = Vec::new();
        let mut cell_of = Vec::new();
        let mut k = 0;
        for cell in self.cells.iter().filter(|c| !self.is_zero_cell(c)) {
            for &i in cell {
                atoms.push(self.atoms[i].clone());
                cell_of.push(k);
            }
            k += 1;
        }
        atoms.is_empty() || !has_violation(&atoms, &cell_of, k)
    }

    fn feasible(&self, j: usize) -> bool {
        self.cell_is_lattice(j) && self.partial_is_incommensurable()
    }

    fn dfs(&mut self, i: usize) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::Budget {
                budget: self.budget,
                best_lower_bound: self.best,
            });
        }
        let n = self.atoms.len();
        if self.best + 1 >= n {
            return Ok(());
        }
        let has_pair = self.cells.iter().any(|c| c.len() >= 2);
        let optimistic = self.cells.len() + (n - i);
        let optimistic = if has_pair { optimistic } else { optimistic.saturating_sub(1) };
        if optimistic <= self.best {
            return Ok(());
        }
        if i == n {
            if has_pair && !self.cells.iter().any(|c| self.is_zero_cell(c)) {
                self.best = self.cells.len();
                self.best_cells = Some(self.cells.clone());
            }
            return Ok(());
        }
        // New cells are opened in atom order, so each set of cells is
        // generated once (cells ordered by their smallest atom).
        self.cells.push(alloc::vec![i]);
        let j = self.cells.len() - 1;
        if self.feasible(j) {
            self.dfs(i + 1)?;
        }
        self.cells.pop();
        for j in 0..self.cells.len() {
            self.cells[j].push(i);
            if self.feasible(j) {
                self.dfs(i + 1)?;
            }
            self.cells[j].pop();
        }
        self.dfs(i + 1)
    }
}

/// Exhaustive depth-first search for the largest non-degenerate canonical
/// prepartition. Deterministic: the certificate is the first maximal
/// prepartition in search order (atoms in canonical order; each atom tries a
/// new cell, then existing cells in order, then the leftover).
pub fn compute_rank(s: &SupportSet, budget: u64) -> Result<RankOutcome> {
    if s.len() == 1 {
        return Ok(RankOutcome {
            rank: 0,
            certificate: None,
            states_visited: 0,
        });
    }
    let mut search = RankSearch {
        atoms: s.atoms(),
        cells: Vec::new(),
        best: 0,
        best_cells: None,
        visited: 0,
        budget,
    };
    search.dfs(0)?;
    let cells = search
        .best_cells
        .ok_or_else(|| Error::Precondition("no non-degenerate prepartition found".into()))?;
    let groups = cells
        .iter()
        .map(|c| c.iter().map(|&i| s.atoms()[i].clone()).collect())
        .collect();
    let certificate = Prepartition::from_groups(s, groups)?;
    Ok(RankOutcome {
        rank: search.best,
        certificate: Some(certificate),
        states_visited: search.visited,
    })
}

/// Rank of a random variable with support `s`. Shifting the support never
/// changes the rank, so no shift is searched.
pub fn rank_of_variable(s: &SupportSet) -> Result<usize> {
    compute_rank(s, DEFAULT_RANK_BUDGET).map(|r| r.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::Basis;
    use alloc::sync::Arc;
    use alloc::vec;

    fn v(c: &[i64]) -> SymValue {
        SymValue::from_ints(c)
    }

    fn one_pi() -> Arc<Basis> {
        Basis::from_names(&[("1", "1"), ("pi", "3.141592653589793")]).unwrap()
    }

    fn r1_r2_e() -> Arc<Basis> {
        Basis::from_names(&[("r1", "0.7071"), ("r2", "1.3"), ("e", "0.01")]).unwrap()
    }

    fn set(b: &Arc<Basis>, atoms: &[&[i64]]) -> SupportSet {
        SupportSet::new(b.clone(), atoms.iter().map(|a| v(a)).collect()).unwrap()
    }

    fn groups_of(p: &Prepartition) -> Vec<Vec<SymValue>> {
        let mut g: Vec<Vec<SymValue>> = p.cells().iter().map(|c| c.atoms().to_vec()).collect();
        g.sort();
        g
    }

    #[test]
    fn independent_singletons_are_incommensurable() {
        let c = Collection::standalone(one_pi(), vec![vec![v(&[1, 0])], vec![v(&[0, 1])]]).unwrap();
        let cert = is_incommensurable(&c);
        assert!(cert.verdict());
        assert!(cert.replay());

        let c = Collection::standalone(one_pi(), vec![vec![v(&[1, 0])], vec![v(&[0, 1])], vec![v(&[1, 1])]]).unwrap();
        let cert = is_incommensurable(&c);
        assert!(cert.verdict());
        assert!(cert.replay());
    }

    #[test]
    fn shifted_pairs_are_commensurable_at_three_draws() {
        let c = Collection::standalone(
            r1_r2_e(),
            vec![vec![v(&[1, 0, 1]), v(&[2, 0, 1])], vec![v(&[0, 1, 1]), v(&[0, 2, 1])]],
        )
        .unwrap();
        let cert = is_incommensurable(&c);
        assert!(!cert.verdict());
        assert!(cert.replay());
        let w = cert.witness.as_ref().unwrap();
        assert_eq!(w.draws, BigUint::from(3u32));
        assert_eq!(w.total, v(&[2, 2, 3]));

        let brute = falsify_incommensurability(&c, 3, DEFAULT_FALSIFY_BUDGET).unwrap().unwrap();
        assert_eq!(brute.draws, BigUint::from(3u32));
        assert_eq!(brute.total, v(&[2, 2, 3]));
        assert!(brute.replay(&cert.atoms, &cert.cell_of, 2));

        let unshifted = Collection::standalone(
            r1_r2_e(),
            vec![vec![v(&[1, 0, 0]), v(&[2, 0, 0])], vec![v(&[0, 1, 0]), v(&[0, 2, 0])]],
        )
        .unwrap();
        assert!(is_incommensurable(&unshifted).verdict());
    }

    #[test]
    fn falsifier_finds_nothing_when_incommensurable() {
        let c = Collection::standalone(one_pi(), vec![vec![v(&[1, 0])], vec![v(&[0, 1])]]).unwrap();
        assert_eq!(falsify_incommensurability(&c, 8, DEFAULT_FALSIFY_BUDGET).unwrap(), None);
        let b = Basis::from_names(&[("1", "1")]).unwrap();
        let c = Collection::standalone(b, vec![vec![v(&[1]), v(&[2])]]).unwrap();
        assert_eq!(falsify_incommensurability(&c, 5, DEFAULT_FALSIFY_BUDGET).unwrap(), None);
    }

    #[test]
    fn falsifier_budget_is_explicit() {
        let c = Collection::standalone(
            r1_r2_e(),
            vec![vec![v(&[1, 0, 0]), v(&[2, 0, 0])], vec![v(&[0, 1, 0]), v(&[0, 2, 0])]],
        )
        .unwrap();
        assert_eq!(
            falsify_incommensurability(&c, 20, 100),
            Err(Error::EnumerationBudget { budget: 100 })
        );
    }

    #[test]
    fn collection_validation() {
        let b = one_pi();
        assert!(matches!(
            Collection::standalone(b.clone(), vec![vec![v(&[0, 0])], vec![v(&[1, 0])]]),
            Err(Error::InvalidCollection(_))
        ));
        assert!(matches!(
            Collection::standalone(b.clone(), vec![vec![v(&[1, 0])], vec![v(&[1, 0])]]),
            Err(Error::InvalidCollection(_))
        ));
        // A cell holding 0 next to other atoms is allowed.
        assert!(Collection::standalone(b, vec![vec![v(&[0, 0]), v(&[1, 0])]]).is_ok());
    }

    #[test]
    fn lemma5_examples() {
        let s = set(&one_pi(), &[&[1, 0], &[0, 1], &[1, 1]]);
        let p = lemma5_prepartition(&s).unwrap();
        assert_eq!(groups_of(&p), vec![vec![v(&[0, 1])], vec![v(&[1, 0])]]);
        assert_eq!(p.leftover(), &[v(&[1, 1])]);
        assert!(p.is_degenerate());

        let b = Basis::from_names(&[("1", "1"), ("pi", "3.14159"), ("sqrt2", "1.41421")]).unwrap();
        let s = set(&b, &[&[1, 0, 0], &[2, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[0, 0, 2]]);
        let p = lemma5_prepartition(&s).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.s(), 1);
        assert_eq!(p.cells()[0].atoms(), &[v(&[0, 1, 0])]);
        assert_eq!(
            groups_of(&p),
            vec![
                vec![v(&[0, 0, 1]), v(&[0, 0, 2])],
                vec![v(&[0, 1, 0])],
                vec![v(&[1, 0, 0]), v(&[2, 0, 0])],
            ]
        );
        assert_eq!(p.leftover(), &[v(&[1, 1, 0])]);

        let b = Basis::from_names(&[("1", "1")]).unwrap();
        let s = set(&b, &[&[0], &[1], &[2]]);
        let p = lemma5_prepartition(&s).unwrap();
        assert_eq!(groups_of(&p), vec![vec![v(&[1]), v(&[2])]]);
        assert_eq!(p.leftover(), &[v(&[0])]);
    }

    #[test]
    fn rank_examples() {
        let b = Basis::from_names(&[("1", "1")]).unwrap();
        assert_eq!(rank_of_variable(&set(&b, &[&[0], &[1], &[2], &[3]])).unwrap(), 1);
        assert_eq!(rank_of_variable(&set(&b, &[&[0], &[1]])).unwrap(), 1);
        assert_eq!(rank_of_variable(&set(&b, &[&[5]])).unwrap(), 0);
        assert_eq!(rank_of_variable(&set(&one_pi(), &[&[1, 0], &[0, 1]])).unwrap(), 1);

        let out = compute_rank(&set(&one_pi(), &[&[0, 0], &[1, 0], &[0, 1]]), DEFAULT_RANK_BUDGET).unwrap();
        assert_eq!(out.rank, 2);
        let cert = out.certificate.unwrap();
        assert!(!cert.is_degenerate());
        assert!(cert.certificate().replay());
    }

    #[test]
    fn rank_of_pairs_and_their_shift() {
        let b = Basis::from_names(&[("r1", "0.7071"), ("r2", "1.3")]).unwrap();
        let s = set(&b, &[&[1, 0], &[2, 0], &[0, 1], &[0, 2]]);
        assert_eq!(rank_of_variable(&s).unwrap(), 2);
        let shifted = crate::support::shift_by_fresh_symbol(&s, crate::support::Symbol::new("e", "0.01")).unwrap();
        assert_eq!(rank_of_variable(&shifted).unwrap(), 2);
    }

    #[test]
    fn rank_of_six_atom_set() {
        let b = Basis::from_names(&[("1", "1"), ("pi", "3.14159"), ("sqrt2", "1.41421")]).unwrap();
        let s = set(&b, &[&[1, 0, 0], &[2, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[0, 0, 2]]);
        let out = compute_rank(&s, DEFAULT_RANK_BUDGET).unwrap();
        assert_eq!(out.rank, 3);
        let cert = out.certificate.unwrap();
        assert!(!cert.is_degenerate());
        assert!(cert.certificate().replay());
        assert!(is_incommensurable(&cert.collection()).verdict());
    }

    #[test]
    fn rank_budget_reports_lower_bound() {
        let b = Basis::from_names(&[("1", "1"), ("pi", "3.14159"), ("sqrt2", "1.41421")]).unwrap();
        let s = set(&b, &[&[1, 0, 0], &[2, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[0, 0, 2]]);
        match compute_rank(&s, 5) {
            Err(Error::Budget { budget: 5, .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn merging_singletons_gives_non_degenerate() {
        let s = set(&one_pi(), &[&[1, 0], &[0, 1], &[1, 1]]);
        let p = Prepartition::from_groups(&s, vec![vec![v(&[1, 0])], vec![v(&[0, 1])], vec![v(&[1, 1])]]).unwrap();
        assert!(p.is_degenerate());
        let m = p.merge_singletons(0, 1).unwrap();
        assert_eq!(m.k(), 2);
        assert!(!m.is_degenerate());
    }
}
