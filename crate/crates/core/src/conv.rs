//! Exact N-fold iid convolution on packed integer keys.
//!
//! Atoms are scaled to integer coordinate vectors (one common denominator per
//! coordinate), shifted to be nonnegative and packed into a mixed-radix
//! `u128` with radices large enough for sums of `n_max` atoms. Packing is
//! additive and preserves the lexicographic order of coordinates, so sorted
//! key lists of partial sums merge without rational arithmetic. Weights are
//! integers over a common total, which keeps every law exactly normalized.

use alloc::collections::BinaryHeap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::dist::{entropy_of_weights, DiscreteDist, EntropyValue, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::exactnum::{common_denominator, Rat};
use crate::support::{Basis, SupportSet, SymValue};

#[derive(Clone, Debug)]
pub(crate) struct Codec {
    dens: Vec<BigInt>,
    mins: Vec<BigInt>,
    radices: Vec<u128>,
    place: Vec<u128>,
}

impl Codec {
    /// A codec for sums of up to `n_max` draws from `atoms`.
    pub(crate) fn new(atoms: &[SymValue], n_max: u64) -> Result<Codec> {
        let dim = atoms[0].dim();
        let mut dens = Vec::with_capacity(dim);
        let mut mins = Vec::with_capacity(dim);
        let mut radices = Vec::with_capacity(dim);
        for c in 0..dim {
            let den = common_denominator(atoms.iter().map(|a| &a.coords()[c]));
            let scaled: Vec<BigInt> = atoms
                .iter()
                .map(|a| (&a.coords()[c] * Rat::from_integer(den.clone())).to_integer())
                .collect();
            let min = scaled.iter().min().cloned().unwrap_or_default();
            let max = scaled.iter().max().cloned().unwrap_or_default();
            let radix = (max - &min) * BigInt::from(n_max) + BigInt::one();
            radices.push(radix.to_u128().ok_or(Error::KeySpaceOverflow)?);
            dens.push(den);
            mins.push(min);
        }
        let mut place = alloc::vec![1u128; dim];
        let mut span: u128 = 1;
        for c in (0..dim).rev() {
            place[c] = span;
            span = span.checked_mul(radices[c]).ok_or(Error::KeySpaceOverflow)?;
        }
        Ok(Codec {
            dens,
            mins,
            radices,
            place,
        })
    }

    /// Key of a single atom.
    pub(crate) fn encode(&self, atom: &SymValue) -> u128 {
        atom.coords()
            .iter()
            .enumerate()
            .map(|(c, x)| {
                let digit = (x * Rat::from_integer(self.dens[c].clone())).to_integer() - &self.mins[c];
                digit.to_u128().expect("atom outside codec range") * self.place[c]
            })
            .sum()
    }

    /// The value of a key that is the sum of `draws` atom keys.
    pub(crate) fn decode(&self, code: u128, draws: u64) -> SymValue {
        let coords = (0..self.place.len())
            .map(|c| {
                let digit = (code / self.place[c]) % self.radices[c];
                let scaled = BigInt::from(digit) + &self.mins[c] * BigInt::from(draws);
                Rat::new(scaled, self.dens[c].clone())
            })
            .collect();
        SymValue::new(coords)
    }
}

/// Sorted keys with integer weights over a common total.
#[derive(Clone, Debug)]
pub(crate) struct Table {
    pub(crate) codes: Vec<u128>,
    pub(crate) weights: Vec<BigUint>,
    pub(crate) total: BigUint,
    pub(crate) draws: u64,
}

impl Table {
    pub(crate) fn single(d: &DiscreteDist, codec: &Codec) -> Table {
        Table {
            codes: d.atoms().iter().map(|a| codec.encode(a)).collect(),
            weights: d.weights().to_vec(),
            total: d.total().clone(),
            draws: 1,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.codes.len()
    }

    /// Law of the sum of independent draws from `self` and `other`, by a
    /// k-way merge of the longer list shifted by each key of the shorter.
    pub(crate) fn convolve(&self, other: &Table, cap: usize) -> Result<Table> {
        let (long, short) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let draws = long.draws + short.draws;
        let mut heap: BinaryHeap<Reverse<(u128, usize)>> = (0..short.len())
            .map(|j| Reverse((long.codes[0] + short.codes[j], j)))
            .collect();
        let mut pos = alloc::vec![0usize; short.len()];
        let mut codes: Vec<u128> = Vec::with_capacity(long.len() + short.len());
        let mut weights: Vec<BigUint> = Vec::with_capacity(long.len() + short.len());
        while let Some(Reverse((code, j))) = heap.pop() {
            let lw = &long.weights[pos[j]];
            let sw = &short.weights[j];
            let w = if sw.is_one() { lw.clone() } else { lw * sw };
            if codes.last() == Some(&code) {
                *weights.last_mut().expect("parallel vectors") += w;
            } else {
                if codes.len() == cap {
                    return Err(Error::SupportOverflow {
                        n_reached: draws as usize,
                        size: cap + 1,
                        cap,
                    });
                }
                codes.push(code);
                weights.push(w);
            }
            pos[j] += 1;
            if pos[j] < long.len() {
                heap.push(Reverse((long.codes[pos[j]] + short.codes[j], j)));
            }
        }
        Ok(Table {
            codes,
            weights,
            total: &long.total * &short.total,
            draws,
        })
    }

    pub(crate) fn to_dist(&self, basis: Arc<Basis>, codec: &Codec) -> DiscreteDist {
        let atoms = self.codes.iter().map(|&c| codec.decode(c, self.draws)).collect();
        let support = SupportSet::from_sorted_unchecked(basis, atoms);
        DiscreteDist::from_parts_unchecked(support, self.weights.clone(), self.total.clone())
    }
}

fn check_cap(d: &DiscreteDist, cap: usize) -> Result<()> {
    if d.len() > cap {
        return Err(Error::SupportOverflow {
            n_reached: 1,
            size: d.len(),
            cap,
        });
    }
    Ok(())
}

/// Incremental law of `T_n = X_1 + … + X_n` for `n = 1, 2, …, n_max`, so a
/// whole grid of `N` costs one pass.
#[derive(Clone, Debug)]
pub struct IidSumWalker {
    basis: Arc<Basis>,
    codec: Codec,
    base: Table,
    current: Table,
    n_max: u64,
    cap: usize,
}

impl IidSumWalker {
    pub fn new(d: &DiscreteDist, n_max: u64, max_support: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Precondition("N must be at least 1".into()));
        }
        check_cap(d, max_support)?;
        let codec = Codec::new(d.atoms(), n_max)?;
        let base = Table::single(d, &codec);
        Ok(IidSumWalker {
            basis: d.support().basis().clone(),
            current: base.clone(),
            base,
            codec,
            n_max,
            cap: max_support,
        })
    }

    /// Number of summands in the current law.
    pub fn draws(&self) -> u64 {
        self.current.draws
    }

    pub fn support_len(&self) -> usize {
        self.current.len()
    }

    pub fn advance(&mut self) -> Result<()> {
        if self.current.draws >= self.n_max {
            return Err(Error::Precondition(alloc::format!(
                "walker was built for at most {} draws",
                self.n_max
            )));
        }
        self.current = self.current.convolve(&self.base, self.cap)?;
        Ok(())
    }

    pub fn advance_to(&mut self, n: u64) -> Result<()> {
        if n < self.current.draws {
            return Err(Error::Precondition(alloc::format!(
                "walker is already at N={}",
                self.current.draws
            )));
        }
        while self.current.draws < n {
            self.advance()?;
        }
        Ok(())
    }

    pub fn entropy(&self) -> EntropyValue {
        entropy_of_weights(&self.current.weights, &self.current.total, DEFAULT_PRECISION)
    }

    pub fn entropy_with_precision(&self, bits: u32) -> Result<EntropyValue> {
        crate::dist::check_precision(bits)?;
        Ok(entropy_of_weights(&self.current.weights, &self.current.total, bits))
    }

    pub fn distribution(&self) -> DiscreteDist {
        self.current.to_dist(self.basis.clone(), &self.codec)
    }
}

/// Exact law of the sum of `n` iid copies, by repeated one-step convolution.
pub fn convolve_iid(d: &DiscreteDist, n: u64, max_support: usize) -> Result<DiscreteDist> {
    let mut walker = IidSumWalker::new(d, n, max_support)?;
    walker.advance_to(n)?;
    Ok(walker.distribution())
}

/// Same law as [`convolve_iid`], by binary powering.
pub fn convolve_iid_doubling(d: &DiscreteDist, n: u64, max_support: usize) -> Result<DiscreteDist> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    check_cap(d, max_support)?;
    let codec = Codec::new(d.atoms(), n)?;
    let mut power = Table::single(d, &codec);
    let mut acc: Option<Table> = None;
    let mut k = n;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(a) => a.convolve(&power, max_support)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = power.convolve(&power, max_support)?;
    }
    let table = acc.expect("n >= 1");
    debug_assert!(!table.total.is_zero());
    Ok(table.to_dist(d.support().basis().clone(), &codec))
}
