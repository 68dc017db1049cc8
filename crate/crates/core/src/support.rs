//! Real values as rational coordinate vectors over a declared basis of
//! Q-linearly independent symbols, finite supports, and lattice detection.
//!
//! The basis symbols are a user contract: the crate never checks that the
//! named reals are independent over Q, it treats coordinates as ground truth.
//! With that contract equality of sums is decidable and exact.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rat_gcd, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    /// Decimal approximation, used for display, sorting and sampling only.
    pub approx: String,
}

impl Symbol {
    pub fn new(name: impl Into<String>, approx: impl Into<String>) -> Self {
        Symbol {
            name: name.into(),
            approx: approx.into(),
        }
    }
}

/// Ordered list of real symbols assumed linearly independent over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    symbols: Vec<Symbol>,
}

impl Basis {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Basis { symbols })
    }

    /// Convenience constructor from `(name, approx)` pairs.
    pub fn from_names(names: &[(&str, &str)]) -> Result<Arc<Self>> {
        Basis::new(names.iter().map(|(n, a)| Symbol::new(*n, *a)).collect()).map(Arc::new)
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// The symbol whose approximation is exactly one, if any.
    pub fn unit_index(&self) -> Option<usize> {
        self.symbols
            .iter()
            .position(|s| s.approx.trim().parse::<f64>().ok() == Some(1.0))
    }

    pub fn approx_values(&self) -> Vec<f64> {
        self.symbols
            .iter()
            .map(|s| s.approx.trim().parse::<f64>().unwrap_or(f64::NAN))
            .collect()
    }

    /// A copy of this basis with one more symbol appended.
    pub fn extended(&self, symbol: Symbol) -> Result<Basis> {
        let mut symbols = self.symbols.clone();
        symbols.push(symbol);
        Basis::new(symbols)
    }
}

/// A real number given by its rational coordinates over a [`Basis`].
/// Ordering is lexicographic on coordinates; it is the canonical atom order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymValue {
    coords: Vec<Rat>,
}

impl SymValue {
    pub fn new(coords: Vec<Rat>) -> Self {
        SymValue { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        SymValue {
            coords: coords.iter().map(|&c| Rat::from_integer(c.into())).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SymValue {
            coords: alloc::vec![Rat::zero(); dim],
        }
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, factor: &Rat) -> SymValue {
        SymValue {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_int(&self, factor: &BigInt) -> SymValue {
        self.scale(&Rat::from_integer(factor.clone()))
    }

    /// Appends `extra` zero coordinates (lifting into an extended basis).
    pub fn lifted(&self, extra: usize) -> SymValue {
        let mut coords = self.coords.clone();
        coords.extend(core::iter::repeat_n(Rat::zero(), extra));
        SymValue { coords }
    }

    /// The rational `c` with `self = c · other`, if one exists.
    pub fn ratio_to(&self, other: &SymValue) -> Option<Rat> {
        let pivot = other.coords.iter().position(|c| !c.is_zero())?;
        let c = &self.coords[pivot] / &other.coords[pivot];
        let matches = self
            .coords
            .iter()
            .zip(&other.coords)
            .all(|(a, b)| *a == &c * b);
        matches.then_some(c)
    }

    /// Floating-point value from the basis approximations.
    pub fn approx(&self, basis: &Basis) -> f64 {
        self.coords
            .iter()
            .zip(basis.approx_values())
            .map(|(c, v)| crate::hiprec::DoubleF64::from_rat(c).to_f64() * v)
            .sum()
    }

    /// Coordinates as rational strings.
    pub fn coord_strings(&self) -> Vec<String> {
        self.coords.iter().map(ToString::to_string).collect()
    }

    /// Human-readable linear expression such as `2*r1+e` or `1/2*pi`.
    pub fn expr(&self, basis: &Basis) -> String {
        let mut out = String::new();
        for (c, sym) in self.coords.iter().zip(basis.symbols()) {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if !magnitude.is_one() {
                out.push_str(&format!("{magnitude}*"));
            }
            out.push_str(&sym.name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for SymValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl<'a> Add<&'a SymValue> for &'a SymValue {
    type Output = SymValue;

    fn add(self, rhs: &SymValue) -> SymValue {
        assert_eq!(self.dim(), rhs.dim(), "SymValue dimension mismatch");
        SymValue {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a SymValue> for &'a SymValue {
    type Output = SymValue;

    fn sub(self, rhs: &SymValue) -> SymValue {
        assert_eq!(self.dim(), rhs.dim(), "SymValue dimension mismatch");
        SymValue {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &SymValue {
    type Output = SymValue;

    fn neg(self) -> SymValue {
        SymValue {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// A finite nonempty set of distinct atoms, kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    basis: Arc<Basis>,
    atoms: Vec<SymValue>,
}

impl SupportSet {
    pub fn new(basis: Arc<Basis>, mut atoms: Vec<SymValue>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        for a in &atoms {
            if a.dim() != basis.dim() {
                return Err(Error::DimensionMismatch {
                    expected: basis.dim(),
                    found: a.dim(),
                });
            }
        }
        atoms.sort();
        if let Some(w) = atoms.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateAtom(w[0].expr(&basis)));
        }
        Ok(SupportSet { basis, atoms })
    }

    /// Caller guarantees nonempty, strictly increasing atoms of the right
    /// dimension.
    pub(crate) fn from_sorted_unchecked(basis: Arc<Basis>, atoms: Vec<SymValue>) -> Self {
        debug_assert!(!atoms.is_empty() && atoms.windows(2).all(|w| w[0] < w[1]));
        SupportSet { basis, atoms }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn atoms(&self) -> &[SymValue] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &SymValue) -> Option<usize> {
        self.atoms.binary_search(atom).ok()
    }

    pub fn contains(&self, atom: &SymValue) -> bool {
        self.index_of(atom).is_some()
    }

    /// A subset over the same basis; every atom must belong to `self`.
    pub fn subset(&self, atoms: Vec<SymValue>) -> Result<SupportSet> {
        if let Some(a) = atoms.iter().find(|a| !self.contains(a)) {
            return Err(Error::Precondition(format!(
                "{} is not in the support",
                a.expr(&self.basis)
            )));
        }
        SupportSet::new(self.basis.clone(), atoms)
    }

    pub fn is_zero_singleton(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].is_zero()
    }

    pub fn detect_lattice(&self) -> Option<LatticeParam> {
        lattice_of(&self.atoms)
    }

    pub fn exprs(&self) -> Vec<String> {
        self.atoms.iter().map(|a| a.expr(&self.basis)).collect()
    }
}

/// `atom_i = offset + int_coords[i] · direction` for every atom.
///
/// With two or more atoms the integer coordinates have minimum 0 and gcd 1,
/// so `direction` carries the maximal span symbolically. Its first nonzero
/// coordinate is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeParam {
    pub offset: SymValue,
    pub direction: SymValue,
    pub int_coords: Vec<BigInt>,
}

impl LatticeParam {
    pub fn reconstruct(&self) -> Vec<SymValue> {
        self.int_coords
            .iter()
            .map(|n| &self.offset + &self.direction.scale_int(n))
            .collect()
    }
}

/// Lattice parameters of the support, or `None` when it is not a lattice.
pub fn detect_lattice(s: &SupportSet) -> Option<LatticeParam> {
    s.detect_lattice()
}

/// Like [`detect_lattice`] but over distinct atoms in caller order;
/// `int_coords` follows the input order.
pub fn lattice_of(atoms: &[SymValue]) -> Option<LatticeParam> {
    let base = atoms.first()?;
    if atoms.len() == 1 {
        return Some(LatticeParam {
            offset: base.clone(),
            direction: SymValue::zero(base.dim()),
            int_coords: alloc::vec![BigInt::zero()],
        });
    }
    let step = &atoms[1] - base;
    let mut ratios = Vec::with_capacity(atoms.len());
    for a in atoms {
        ratios.push((a - base).ratio_to(&step)?);
    }
    let mut g = ratios[1].clone();
    for r in &ratios[2..] {
        g = rat_gcd(&g, r).ok()?;
    }
    let mut direction = step.scale(&g);
    let mut ints: Vec<BigInt> = ratios.iter().map(|r| (r / &g).to_integer()).collect();
    let flip = direction
        .coords()
        .iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative());
    if flip {
        direction = -&direction;
        for n in &mut ints {
            *n = -&*n;
        }
    }
    let min = ints.iter().min().cloned().unwrap_or_default();
    for n in &mut ints {
        *n -= &min;
    }
    let offset = base + &direction.scale_int(&min);
    Some(LatticeParam {
        offset,
        direction,
        int_coords: ints,
    })
}

/// Exact variance of the integer lattice coordinates under `probs`
/// (normalized by their sum). This is Var(X)/h² for the conditional variable.
pub fn var_over_h2(lattice: &LatticeParam, probs: &[Rat]) -> Result<Rat> {
    if lattice.int_coords.len() < 2 {
        return Err(Error::SingletonVariance);
    }
    if probs.len() != lattice.int_coords.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.int_coords.len(),
            found: probs.len(),
        });
    }
    let mass: Rat = probs.iter().sum();
    if !mass.is_positive() || probs.iter().any(|p| !p.is_positive()) {
        return Err(Error::InvalidProbability(
            "lattice weights must be positive".into(),
        ));
    }
    let mut mean = Rat::zero();
    let mut second = Rat::zero();
    for (p, n) in probs.iter().zip(&lattice.int_coords) {
        let n = Rat::from_integer(n.clone());
        mean += p * &n;
        second += p * &n * &n;
    }
    mean /= &mass;
    second /= &mass;
    Ok(second - &mean * &mean)
}

/// Translates every atom by `shift`.
pub fn shift_support(s: &SupportSet, shift: &SymValue) -> Result<SupportSet> {
    if shift.dim() != s.basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.basis.dim(),
            found: shift.dim(),
        });
    }
    SupportSet::new(
        s.basis.clone(),
        s.atoms.iter().map(|a| a + shift).collect(),
    )
}

/// Lifts a support into `basis` extended by one fresh symbol and shifts it by
/// that symbol, the construction used to test shift invariance of the rank.
pub fn shift_by_fresh_symbol(s: &SupportSet, symbol: Symbol) -> Result<SupportSet> {
    let basis = Arc::new(s.basis.extended(symbol)?);
    let dim = basis.dim();
    let mut eps = SymValue::zero(dim);
    eps.coords[dim - 1] = Rat::one();
    let lifted = SupportSet::new(basis, s.atoms.iter().map(|a| a.lifted(1)).collect())?;
    shift_support(&lifted, &eps)
}
