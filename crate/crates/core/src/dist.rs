//! Finite discrete distributions with exact probabilities, conditioning,
//! sums of iid copies and Shannon entropy.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conv::Codec;
use crate::error::{Error, Result};
use crate::exactnum::{format_rat, Rat};
use crate::hiprec::{DoubleF64, LN_2};
use crate::partition::Collection;
use crate::support::{var_over_h2, Basis, SupportSet, Symbol, SymValue};

pub use crate::conv::{convolve_iid, convolve_iid_doubling, IidSumWalker};

/// Default cap on the support size of any computed law.
pub const DEFAULT_MAX_SUPPORT: usize = 5_000_000;

/// Significant bits kept when a probability is rounded to floating point.
pub const DEFAULT_PRECISION: u32 = 106;
pub const MIN_PRECISION: u32 = 64;

/// Probabilities are `weights[i] / total` for the atoms in canonical order.
#[derive(Clone, Debug)]
pub struct DiscreteDist {
    support: SupportSet,
    weights: Vec<BigUint>,
    total: BigUint,
}

impl PartialEq for DiscreteDist {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a * &other.total == b * &self.total)
    }
}

impl Eq for DiscreteDist {}

impl DiscreteDist {
    /// Atoms with exact probabilities; all positive, summing to exactly 1.
    pub fn from_pairs(basis: Arc<Basis>, pairs: Vec<(SymValue, Rat)>) -> Result<Self> {
        if let Some((a, p)) = pairs.iter().find(|(_, p)| *p <= Rat::zero()) {
            return Err(Error::InvalidProbability(format!(
                "probability of {} is {}, must be positive",
                a.expr(&basis),
                format_rat(p)
            )));
        }
        let sum: Rat = pairs.iter().map(|(_, p)| p).sum();
        if !sum.is_one() {
            return Err(Error::InvalidProbability(format!("probabilities sum to {}", format_rat(&sum))));
        }
        let total = pairs
            .iter()
            .fold(BigUint::one(), |acc, (_, p)| acc.lcm(p.denom().magnitude()));
        let weighted = pairs
            .into_iter()
            .map(|(a, p)| {
                let w = (p * Rat::from_integer(total.clone().into())).to_integer();
                (a, w.magnitude().clone())
            })
            .collect();
        DiscreteDist::from_weights(basis, weighted)
    }

    /// Atoms with positive integer weights; probabilities are weight / sum.
    pub fn from_weights(basis: Arc<Basis>, pairs: Vec<(SymValue, BigUint)>) -> Result<Self> {
        if let Some((a, _)) = pairs.iter().find(|(_, w)| w.is_zero()) {
            return Err(Error::InvalidProbability(format!("weight of {} is zero", a.expr(&basis))));
        }
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (atoms, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let support = SupportSet::new(basis, atoms)?;
        let total = weights.iter().sum();
        Ok(DiscreteDist { support, weights, total })
    }

    /// Equal mass on each atom.
    pub fn uniform(basis: Arc<Basis>, atoms: Vec<SymValue>) -> Result<Self> {
        DiscreteDist::from_weights(basis, atoms.into_iter().map(|a| (a, BigUint::one())).collect())
    }

    pub(crate) fn from_parts_unchecked(support: SupportSet, weights: Vec<BigUint>, total: BigUint) -> Self {
        DiscreteDist { support, weights, total }
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn basis(&self) -> &Arc<Basis> {
        self.support.basis()
    }

    pub fn atoms(&self) -> &[SymValue] {
        self.support.atoms()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn is_deterministic(&self) -> bool {
        self.len() == 1
    }

    pub fn prob(&self, i: usize) -> Rat {
        Rat::new(self.weights[i].clone().into(), self.total.clone().into())
    }

    pub fn probs(&self) -> Vec<Rat> {
        (0..self.len()).map(|i| self.prob(i)).collect()
    }

    pub fn prob_of(&self, atom: &SymValue) -> Option<Rat> {
        self.support.index_of(atom).map(|i| self.prob(i))
    }

    /// Total probability of the atoms of `cell` that lie in the support.
    pub fn mass(&self, cell: &SupportSet) -> Rat {
        let w: BigUint = cell
            .atoms()
            .iter()
            .filter_map(|a| self.support.index_of(a))
            .map(|i| &self.weights[i])
            .sum();
        Rat::new(w.into(), self.total.clone().into())
    }

    /// Var/h² of a lattice-supported law.
    pub fn var_over_h2(&self) -> Result<Rat> {
        let lattice = self.support.detect_lattice().ok_or(Error::NotALattice)?;
        let w: Vec<Rat> = self.weights.iter().map(|w| Rat::from_integer(w.clone().into())).collect();
        var_over_h2(&lattice, &w)
    }

    /// Pushforward through `f`; atoms with equal images are merged.
    pub fn map_atoms(&self, basis: Arc<Basis>, f: impl Fn(&SymValue) -> SymValue) -> Result<DiscreteDist> {
        let mut merged: BTreeMap<SymValue, BigUint> = BTreeMap::new();
        for (a, w) in self.atoms().iter().zip(&self.weights) {
            *merged.entry(f(a)).or_default() += w;
        }
        DiscreteDist::from_weights(basis, merged.into_iter().collect())
    }
}

/// Mass of `cell` and the law conditioned on landing in it.
pub fn condition(d: &DiscreteDist, cell: &SupportSet) -> Result<(Rat, DiscreteDist)> {
    let pairs: Vec<(SymValue, BigUint)> = cell
        .atoms()
        .iter()
        .filter_map(|a| d.support.index_of(a).map(|i| (a.clone(), d.weights[i].clone())))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NullEvent);
    }
    let tilde = DiscreteDist::from_weights(d.basis().clone(), pairs)?;
    let p = Rat::new(tilde.total.clone().into(), d.total.clone().into());
    Ok((p, tilde))
}

/// Entropy in nats with a bound on its numerical error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub nats: DoubleF64,
    pub error_bound: f64,
}

impl EntropyValue {
    pub fn to_f64(self) -> f64 {
        self.nats.to_f64()
    }

    pub fn bits(self) -> f64 {
        (self.nats / LN_2).to_f64()
    }
}

pub(crate) fn check_precision(bits: u32) -> Result<()> {
    if !(MIN_PRECISION..=DEFAULT_PRECISION).contains(&bits) {
        return Err(Error::Precondition(format!(
            "precision must be between {MIN_PRECISION} and {DEFAULT_PRECISION} bits, got {bits}"
        )));
    }
    Ok(())
}

/// Top `bits` significant bits of `value` as `mantissa · 2^exponent`.
fn rounded(value: &BigUint, bits: u32) -> (DoubleF64, i64) {
    let len = value.bits();
    if len <= u64::from(bits) {
        return DoubleF64::from_biguint_scaled(value);
    }
    let shift = len - u64::from(bits);
    let (m, e) = DoubleF64::from_biguint_scaled(&(value >> shift));
    (m, e + shift as i64)
}

/// `-Σ p ln p` with `p = weight / total`, each `p` rounded to `bits`
/// significant bits and the terms accumulated in double-double.
pub(crate) fn entropy_of_weights(weights: &[BigUint], total: &BigUint, bits: u32) -> EntropyValue {
    let (tm, te) = rounded(total, bits);
    let mut sum = DoubleF64::ZERO;
    let mut underflowed = 0usize;
    for w in weights {
        if w == total {
            continue;
        }
        let (wm, we) = rounded(w, bits);
        let ratio = wm / tm;
        let exp = we - te;
        let ln_p = ratio.ln() + LN_2.mul_f64(exp as f64);
        let p = ratio.ldexp(exp.clamp(-1100, 0) as i32);
        if p.hi() == 0.0 {
            underflowed += 1;
            continue;
        }
        sum = sum - p * ln_p;
    }
    let h = sum.to_f64();
    let rounding = libm::ldexp(1.0, 1 - bits as i32);
    let arithmetic = (weights.len() as f64 + 8.0) * libm::ldexp(1.0, -100);
    EntropyValue {
        nats: sum,
        error_bound: (h + 1.0) * (rounding + arithmetic) + underflowed as f64 * 1e-290,
    }
}

pub fn entropy(d: &DiscreteDist) -> EntropyValue {
    entropy_of_weights(&d.weights, &d.total, DEFAULT_PRECISION)
}

/// Entropy with probabilities rounded to `bits` significant bits (64..=106).
pub fn entropy_with_precision(d: &DiscreteDist, bits: u32) -> Result<EntropyValue> {
    check_precision(bits)?;
    Ok(entropy_of_weights(&d.weights, &d.total, bits))
}

/// Exact joint law of the per-cell partial sums `Y^(j)` and per-cell counts
/// `n^(j)` over `n` iid draws.
///
/// The joint outcome is encoded as a vector in a basis of `k·q + k` symbols:
/// `Y<j>:<symbol>` for cell `j`'s partial sum and `n<j>` for its count
/// (cells numbered from 1). Draws outside every cell contribute nothing.
pub fn decompose_by_cells(d: &DiscreteDist, n: u64, cells: &Collection, max_support: usize) -> Result<DiscreteDist> {
    let basis = d.basis();
    let q = basis.dim();
    let k = cells.k();
    if cells.parent().basis().dim() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: cells.parent().basis().dim(),
        });
    }
    for cell in cells.cells() {
        if let Some(a) = cell.atoms().iter().find(|a| !d.support.contains(a)) {
            return Err(Error::Precondition(format!("{} is not in the support", a.expr(basis))));
        }
    }
    let mut symbols = Vec::with_capacity(k * q + k);
    for j in 1..=k {
        for s in basis.symbols() {
            symbols.push(Symbol::new(format!("Y{j}:{}", s.name), s.approx.clone()));
        }
    }
    for j in 1..=k {
        symbols.push(Symbol::new(format!("n{j}"), "1"));
    }
    let joint_basis = Arc::new(Basis::new(symbols)?);
    let lifted = d.map_atoms(joint_basis, |a| {
        let mut coords = alloc::vec![Rat::zero(); k * q + k];
        if let Some(j) = cells.cells().iter().position(|c| c.contains(a)) {
            coords[j * q..(j + 1) * q].clone_from_slice(a.coords());
            coords[k * q + j] = Rat::one();
        }
        SymValue::new(coords)
    })?;
    convolve_iid(&lifted, n, max_support)
}

/// Monte Carlo entropy estimate of the sum of `n` iid draws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEntropy {
    /// Plug-in estimate plus the Miller–Madow correction.
    pub estimate: EntropyValue,
    pub observed_support: usize,
    pub samples: u64,
}

enum Sampler {
    Exact(WeightedIndex<u64>),
    Approx(WeightedIndex<f64>),
}

impl Sampler {
    fn new(d: &DiscreteDist) -> Sampler {
        if d.total.to_u64().is_some() {
            let w: Vec<u64> = d.weights.iter().map(|w| w.to_u64().unwrap_or(0)).collect();
            Sampler::Exact(WeightedIndex::new(w).expect("positive weights"))
        } else {
            let total = DoubleF64::from_biguint(&d.total);
            let w: Vec<f64> = d
                .weights
                .iter()
                .map(|w| (DoubleF64::from_biguint(w) / total).to_f64())
                .collect();
            Sampler::Approx(WeightedIndex::new(w).expect("positive weights"))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Sampler::Exact(w) => w.sample(rng),
            Sampler::Approx(w) => w.sample(rng),
        }
    }
}

/// Deterministic for fixed inputs: ChaCha8 seeded from `seed`, sums keyed
/// exactly, so distinct values never collide.
pub fn mc_entropy(d: &DiscreteDist, n: u64, samples: u64, seed: u64) -> Result<McEntropy> {
    if samples == 0 || n == 0 {
        return Err(Error::Precondition("N and the sample count must be at least 1".into()));
    }
    let codec = Codec::new(d.atoms(), n)?;
    let codes: Vec<u128> = d.atoms().iter().map(|a| codec.encode(a)).collect();
    let sampler = Sampler::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
    for _ in 0..samples {
        let key: u128 = (0..n).map(|_| codes[sampler.sample(&mut rng)]).sum();
        *counts.entry(key).or_default() += 1;
    }
    let weights: Vec<BigUint> = counts.values().map(|&c| BigUint::from(c)).collect();
    let plug_in = entropy_of_weights(&weights, &BigUint::from(samples), DEFAULT_PRECISION);
    let correction = (counts.len() as f64 - 1.0) / (2.0 * samples as f64);
    Ok(McEntropy {
        estimate: EntropyValue {
            nats: plug_in.nats + DoubleF64::from_f64(correction),
            error_bound: plug_in.error_bound + libm::ldexp(correction, -52),
        },
        observed_support: counts.len(),
        samples,
    })
}
