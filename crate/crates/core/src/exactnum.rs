//! Exact rational scalars and linear algebra over Q.
//!
//! Everything here is dense and fully normalized after every step. Supports in
//! this crate are small (tens of atoms at most), so fraction growth is not a
//! concern and the output of every routine is deterministic.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `a/b`, `a`, with an optional leading `-` (ASCII or U+2212).
pub fn parse_rat(text: &str) -> Result<Rat> {
    let trimmed = text.trim();
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, trimmed)
    };
    let malformed = || Error::MalformedRational(text.to_string());
    let digits_only = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let value = match body.split_once('/') {
        Some((n, d)) => {
            if !digits_only(n) || !digits_only(d) {
                return Err(malformed());
            }
            let n: BigInt = n.parse().map_err(|_| malformed())?;
            let d: BigInt = d.parse().map_err(|_| malformed())?;
            if d.is_zero() {
                return Err(malformed());
            }
            Rat::new(n, d)
        }
        None => {
            if !digits_only(body) {
                return Err(malformed());
            }
            Rat::from_integer(body.parse().map_err(|_| malformed())?)
        }
    };
    Ok(if negative { -value } else { value })
}

/// Formats as `a/b`, or `a` when the denominator is one.
pub fn format_rat(value: &Rat) -> String {
    value.to_string()
}

/// Largest positive rational `g` such that `a/g` and `b/g` are both integers.
pub fn rat_gcd(a: &Rat, b: &Rat) -> Result<Rat> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let numer = a.numer().gcd(b.numer());
    let denom = a.denom().lcm(b.denom());
    Ok(Rat::new(numer, denom))
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational vector to a primitive integer vector whose first nonzero
/// entry is positive. The zero vector maps to a zero vector.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<BigInt> {
    let denom = common_denominator(v);
    let mut ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(denom.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if content.is_zero() {
        return ints;
    }
    let negate = ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    for x in &mut ints {
        *x = &*x / &content;
        if negate {
            *x = -&*x;
        }
    }
    ints
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: alloc::vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        RatMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from equal-length rows. `cols` is needed so that a
    /// matrix with zero rows still has a width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let n_rows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(RatMatrix {
            rows: n_rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rat) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    /// Pivot rule: first row (from the current one down) with a nonzero entry.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(pivot_row, found);
            let inv = m.get(pivot_row, col).recip();
            for c in col..m.cols {
                let scaled = m.get(pivot_row, c) * &inv;
                m.set(pivot_row, c, scaled);
            }
            for r in 0..m.rows {
                if r == pivot_row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let updated = m.get(r, c) - &factor * m.get(pivot_row, c);
                    m.set(r, c, updated);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// Basis of the right null space of `m`, one primitive integer vector per
/// free column (first nonzero entry positive).
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    let (reduced, pivots) = m.rref();
    let mut is_pivot = alloc::vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = alloc::vec![Rat::zero(); m.cols()];
        v[free] = Rat::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -reduced.get(row, free).clone();
        }
        basis.push(primitive_integer_vector(&v));
    }
    basis
}

/// Rank over Q of a list of equal-length vectors, together with the
/// lexicographically first maximal independent subset (greedy, left to right).
pub fn q_dimension(vectors: &[Vec<Rat>]) -> (usize, Vec<usize>) {
    // Echelon rows: (pivot position, row scaled so the pivot entry is one).
    let mut echelon: Vec<(usize, Vec<Rat>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut residual = v.clone();
        for (pivot, row) in &echelon {
            if residual[*pivot].is_zero() {
                continue;
            }
            let factor = residual[*pivot].clone();
            for (x, r) in residual.iter_mut().zip(row) {
                *x -= &factor * r;
            }
        }
        if let Some(pivot) = residual.iter().position(|x| !x.is_zero()) {
            let inv = residual[pivot].recip();
            for x in &mut residual {
                *x *= &inv;
            }
            echelon.push((pivot, residual));
            chosen.push(idx);
        }
    }
    (chosen.len(), chosen)
}
