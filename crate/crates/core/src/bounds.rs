//! Closed-form asymptotic entropy expressions of the form
//! `coeff · ln N + intercept`, with the `o(1)` term dropped.
//!
//! Every report is flagged asymptotic: none of them is a certified
//! inequality at finite `N`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::dist::{condition, DiscreteDist};
use crate::error::{Error, Result};
use crate::exactnum::{format_rat, Rat};
use crate::hiprec::DoubleF64;
use crate::partition::{compute_rank, Prepartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundName {
    Thm1Lattice,
    Thm2Multinomial,
    Thm4Equality,
    Thm4Lower,
    Thm4Upper,
    Thm7LowerSltk,
    Thm7LowerSeqk,
    Cor9,
}

impl BoundName {
    pub const ALL: [BoundName; 8] = [
        BoundName::Thm1Lattice,
        BoundName::Thm2Multinomial,
        BoundName::Thm4Equality,
        BoundName::Thm4Lower,
        BoundName::Thm4Upper,
        BoundName::Thm7LowerSltk,
        BoundName::Thm7LowerSeqk,
        BoundName::Cor9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Thm1Lattice => "thm1_lattice",
            BoundName::Thm2Multinomial => "thm2_multinomial",
            BoundName::Thm4Equality => "thm4_equality",
            BoundName::Thm4Lower => "thm4_lower",
            BoundName::Thm4Upper => "thm4_upper",
            BoundName::Thm7LowerSltk => "thm7_lower_sltk",
            BoundName::Thm7LowerSeqk => "thm7_lower_seqk",
            BoundName::Cor9 => "cor9",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Equality,
    Lower,
    Upper,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Equality => "equality",
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        }
    }
}

/// Prepartition data behind a report.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseMeta {
    pub k: usize,
    pub s: usize,
    /// Total mass of the cells.
    pub q: Rat,
    /// λ₁ or λ₂ where defined (λ₂ is undefined for `k = 1`).
    pub lambda: Option<DoubleF64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: BoundName,
    /// Multiplier of `ln N`; always a nonnegative half-integer.
    pub coeff: Rat,
    /// Additive constant in nats.
    pub intercept: DoubleF64,
    pub meta: Option<CaseMeta>,
    pub direction: Direction,
    pub asymptotic: bool,
}

impl BoundReport {
    pub fn value(&self, n: u64) -> DoubleF64 {
        DoubleF64::from_rat(&self.coeff) * DoubleF64::from_f64(n as f64).ln() + self.intercept
    }

    pub fn coeff_f64(&self) -> f64 {
        DoubleF64::from_rat(&self.coeff).to_f64()
    }
}

fn half(n: usize) -> Rat {
    Rat::new(n.into(), 2.into())
}

/// `m/2 · ln(2πe) + ½ ln(product)`.
fn intercept(m: usize, product: &Rat) -> DoubleF64 {
    DoubleF64::ln_2pi_e().mul_f64(m as f64 * 0.5) + DoubleF64::ln_rat(product).mul_f64(0.5)
}

/// `(product)^(1/m)`, if `m > 0`.
fn root(product: &Rat, m: usize) -> Option<DoubleF64> {
    (m > 0).then(|| DoubleF64::ln_rat(product).div_f64(m as f64).exp())
}

fn report(name: BoundName, direction: Direction, m2: usize, product: &Rat, meta: Option<CaseMeta>) -> BoundReport {
    BoundReport {
        name,
        coeff: half(m2),
        intercept: intercept(m2, product),
        meta,
        direction,
        asymptotic: true,
    }
}

/// Lattice law with `v = Var/h²`: `½ ln(2πe·N·v)`.
pub fn thm1_lattice(v: &Rat) -> Result<BoundReport> {
    if !v.is_positive() {
        return Err(Error::Precondition(format!("Var/h² must be positive, got {}", format_rat(v))));
    }
    Ok(report(BoundName::Thm1Lattice, Direction::Equality, 1, v, None))
}

/// Multinomial counts: `(d−1)/2 · ln(2πe·N·(p₁⋯p_d)^(1/(d−1)))`.
pub fn thm2_multinomial(p: &[Rat]) -> Result<BoundReport> {
    if p.len() < 2 {
        return Err(Error::Precondition("need at least two outcomes".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_positive()) {
        return Err(Error::InvalidProbability(format!("probability {} is not positive", format_rat(x))));
    }
    let sum: Rat = p.iter().sum();
    if !sum.is_one() {
        return Err(Error::InvalidProbability(format!("probabilities sum to {}", format_rat(&sum))));
    }
    let product: Rat = p.iter().product();
    Ok(report(BoundName::Thm2Multinomial, Direction::Equality, p.len() - 1, &product, None))
}

struct CellData {
    k: usize,
    s: usize,
    p: Vec<Rat>,
    /// Var/h² of the conditioned law on each non-singleton cell.
    v: Vec<Rat>,
    q: Rat,
}

fn cell_data(pp: &Prepartition, d: &DiscreteDist) -> Result<CellData> {
    if pp.parent().basis().dim() != d.basis().dim() {
        return Err(Error::DimensionMismatch {
            expected: d.basis().dim(),
            found: pp.parent().basis().dim(),
        });
    }
    let mut p = Vec::with_capacity(pp.k());
    let mut v = Vec::new();
    for (j, cell) in pp.cells().iter().enumerate() {
        if let Some(a) = cell.atoms().iter().find(|a| !d.support().contains(a)) {
            return Err(Error::Precondition(format!(
                "cell {j} atom {} has zero probability",
                a.expr(d.basis())
            )));
        }
        let (pj, tilde) = condition(d, cell)?;
        if j >= pp.s() {
            v.push(tilde.var_over_h2()?);
        }
        p.push(pj);
    }
    let q = p.iter().sum();
    Ok(CellData {
        k: pp.k(),
        s: pp.s(),
        p,
        v,
        q,
    })
}

/// Bounds for a prepartition covering the support: the `s = k` equality,
/// the `s ≤ k−1` lower bound (an equality when `s = k−1`) and the
/// `s ≤ k−2` upper bound, whichever apply.
pub fn thm4_report(pp: &Prepartition, d: &DiscreteDist) -> Result<Vec<BoundReport>> {
    if !pp.covers() {
        return Err(Error::Precondition("the cells must cover the support".into()));
    }
    if pp.parent().atoms() != d.atoms() {
        return Err(Error::Precondition("the prepartition is over a different support".into()));
    }
    let c = cell_data(pp, d)?;
    let (k, s) = (c.k, c.s);
    let meta = |lambda| Some(CaseMeta { k, s, q: c.q.clone(), lambda });
    let singles: Rat = c.p[..s].iter().product();
    let singles_mass: Rat = c.p[..s].iter().sum();
    // Empty product and the s-term both equal 1 when s = 0.
    let s_term = if s == 0 { Rat::one() } else { &singles * (Rat::one() - &singles_mass) };
    let mut out = Vec::new();
    if s == k {
        let product: Rat = c.p.iter().product();
        out.push(report(BoundName::Thm4Equality, Direction::Equality, k - 1, &product, meta(None)));
        return Ok(out);
    }
    let lower: Rat = c.p[s..].iter().zip(&c.v).map(|(p, v)| p * v).product::<Rat>() * &s_term;
    let (name, direction) = if s + 1 == k {
        (BoundName::Thm4Equality, Direction::Equality)
    } else {
        (BoundName::Thm4Lower, Direction::Lower)
    };
    out.push(report(name, direction, k, &lower, meta(None)));
    if s + 2 <= k {
        let upper: Rat = c.p[s..].iter().zip(&c.v).map(|(p, v)| p * p * v).product::<Rat>() * &s_term;
        out.push(report(BoundName::Thm4Upper, Direction::Upper, 2 * k - s - 1, &upper, meta(None)));
    }
    Ok(out)
}

/// Lower bound for any prepartition; the leftover may be nonempty.
///
/// For `s < k`: `k/2 · ln(2πe·λ₁·N)` with
/// `λ₁^k = p₁⋯p_s · (1 − Σ_{j≤s} p_j/q) · Π_{j>s} p_j·Var_j/h_j²`.
/// For `s = k`: `(k−1)/2 · ln(2πe·λ₂·N)` with `λ₂^(k−1) = p₁⋯p_k / q`,
/// which is what merging two singletons into a lattice cell reproduces.
pub fn thm7_report(pp: &Prepartition, d: &DiscreteDist) -> Result<BoundReport> {
    let c = cell_data(pp, d)?;
    let (k, s) = (c.k, c.s);
    if k == 0 {
        return Err(Error::Precondition("the prepartition has no cells".into()));
    }
    if s < k {
        let singles: Rat = c.p[..s].iter().product();
        let singles_mass: Rat = c.p[..s].iter().sum();
        let factor = Rat::one() - singles_mass / &c.q;
        let lattices: Rat = c.p[s..].iter().zip(&c.v).map(|(p, v)| p * v).product();
        let product = singles * factor * lattices;
        if !product.is_positive() {
            return Err(Error::Precondition("λ₁ is not positive".into()));
        }
        let meta = CaseMeta {
            k,
            s,
            q: c.q.clone(),
            lambda: root(&product, k),
        };
        Ok(report(BoundName::Thm7LowerSltk, Direction::Lower, k, &product, Some(meta)))
    } else {
        let product = c.p.iter().product::<Rat>() / &c.q;
        if !product.is_positive() {
            return Err(Error::Precondition("λ₂ is not positive".into()));
        }
        let meta = CaseMeta {
            k,
            s,
            q: c.q.clone(),
            lambda: root(&product, k - 1),
        };
        Ok(report(BoundName::Thm7LowerSeqk, Direction::Lower, k - 1, &product, Some(meta)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cor9Outcome {
    pub rank: usize,
    pub report: BoundReport,
    /// Absent only for deterministic laws.
    pub certificate: Option<Prepartition>,
}

/// Rank-driven lower bound `r/2 · ln(2πe·λ₁·N)` evaluated on the first
/// maximal certificate of the rank search.
pub fn cor9_bound(d: &DiscreteDist, budget: u64) -> Result<Cor9Outcome> {
    let outcome = compute_rank(d.support(), budget)?;
    let report = match &outcome.certificate {
        None => BoundReport {
            name: BoundName::Cor9,
            coeff: Rat::zero(),
            intercept: DoubleF64::ZERO,
            meta: None,
            direction: Direction::Lower,
            asymptotic: true,
        },
        Some(pp) => {
            let mut r = thm7_report(pp, d)?;
            r.name = BoundName::Cor9;
            r
        }
    };
    Ok(Cor9Outcome {
        rank: outcome.rank,
        report,
        certificate: outcome.certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::partition::DEFAULT_RANK_BUDGET;
    use crate::support::{Basis, SymValue};
    use alloc::sync::Arc;
    use alloc::vec;

    // Reference values from a 30-digit arbitrary-precision evaluation.
    const THM1_QUARTER_100: f64 = 3.028376445638773;
    const THM2_TRINOMIAL_100: f64 = 5.710179300997574;
    const THM4_EXAMPLE_INTERCEPT: f64 = 1.189958633407181;

    fn v(c: &[i64]) -> SymValue {
        SymValue::from_ints(c)
    }

    fn one_pi() -> Arc<Basis> {
        Basis::from_names(&[("1", "1"), ("pi", "3.141592653589793")]).unwrap()
    }

    fn near(a: DoubleF64, b: f64, tol: f64) -> bool {
        libm::fabs(a.to_f64() - b) <= tol
    }

    #[test]
    fn lattice_and_multinomial_examples() {
        let t1 = thm1_lattice(&rat(1, 4)).unwrap();
        assert_eq!(t1.coeff, rat(1, 2));
        assert!(near(t1.value(100), THM1_QUARTER_100, 1e-14));
        let t2 = thm2_multinomial(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert!(libm::fabs((t2.intercept - t1.intercept).to_f64()) < 1e-30);
        let t3 = thm2_multinomial(&[rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        assert_eq!(t3.coeff, rat(1, 1));
        assert!(near(t3.value(100), THM2_TRINOMIAL_100, 1e-14));
        assert!(thm2_multinomial(&[rat(1, 1), rat(0, 1)]).is_err());
        assert!(thm2_multinomial(&[rat(1, 2), rat(1, 3)]).is_err());
        assert!(thm1_lattice(&rat(0, 1)).is_err());
    }

    #[test]
    fn equality_case_on_three_atoms() {
        let b = one_pi();
        let d = DiscreteDist::uniform(b, vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]).unwrap();
        let pp = Prepartition::from_groups(d.support(), vec![vec![v(&[0, 1])], vec![v(&[0, 0]), v(&[1, 0])]]).unwrap();
        let reports = thm4_report(&pp, &d).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert_eq!(r.name, BoundName::Thm4Equality);
        assert_eq!(r.direction, Direction::Equality);
        assert_eq!(r.coeff, rat(1, 1));
        assert!(near(r.intercept, THM4_EXAMPLE_INTERCEPT, 1e-14));

        let t7 = thm7_report(&pp, &d).unwrap();
        let lambda = t7.meta.as_ref().unwrap().lambda.unwrap().to_f64();
        assert!(libm::fabs(lambda - libm::sqrt(1.0 / 27.0)) < 1e-15);
        for n in [10, 100, 1000] {
            assert!(libm::fabs((t7.value(n) - r.value(n)).to_f64()) < 1e-12);
        }
    }

    #[test]
    fn singleton_cover_matches_lattice_bound() {
        let b = Basis::from_names(&[("1", "1")]).unwrap();
        // {0} may not be a cell, so the cover is taken on the shifted support.
        let shifted = DiscreteDist::uniform(b.clone(), vec![v(&[1]), v(&[2])]).unwrap();
        let pp = Prepartition::from_groups(shifted.support(), vec![vec![v(&[1])], vec![v(&[2])]]).unwrap();
        let r = thm4_report(&pp, &shifted).unwrap();
        let t1 = thm1_lattice(&rat(1, 4)).unwrap();
        assert_eq!(r[0].coeff, t1.coeff);
        assert!(libm::fabs((r[0].intercept - t1.intercept).to_f64()) < 1e-30);

        let d = DiscreteDist::uniform(b, vec![v(&[0]), v(&[1])]).unwrap();

        let lattice = Prepartition::from_groups(d.support(), vec![vec![v(&[0]), v(&[1])]]).unwrap();
        let t7 = thm7_report(&lattice, &d).unwrap();
        assert_eq!(t7.meta.as_ref().unwrap().k, 1);
        assert!(near(t7.meta.as_ref().unwrap().lambda.unwrap(), 0.25, 1e-16));
        assert!(libm::fabs((t7.value(50) - t1.value(50)).to_f64()) < 1e-28);
    }

    #[test]
    fn all_singletons_use_lambda_two() {
        let d = DiscreteDist::uniform(one_pi(), vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        let pp = Prepartition::from_groups(d.support(), vec![vec![v(&[1, 0])], vec![v(&[0, 1])]]).unwrap();
        let t7 = thm7_report(&pp, &d).unwrap();
        assert_eq!(t7.name, BoundName::Thm7LowerSeqk);
        assert!(near(t7.meta.as_ref().unwrap().lambda.unwrap(), 0.25, 1e-16));
        let t1 = thm1_lattice(&rat(1, 4)).unwrap();
        assert!(libm::fabs((t7.value(64) - t1.value(64)).to_f64()) < 1e-28);
    }

    #[test]
    fn upper_bound_is_gated() {
        let b = Basis::from_names(&[("1", "1"), ("pi", "3.14159"), ("sqrt2", "1.41421")]).unwrap();
        let atoms = vec![v(&[1, 0, 0]), v(&[2, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[0, 0, 2])];
        let d = DiscreteDist::uniform(b, atoms).unwrap();
        let pp = Prepartition::from_groups(
            d.support(),
            vec![vec![v(&[0, 1, 0])], vec![v(&[1, 0, 0]), v(&[2, 0, 0])], vec![v(&[0, 0, 1]), v(&[0, 0, 2])]],
        )
        .unwrap();
        let reports = thm4_report(&pp, &d).unwrap();
        let names: Vec<_> = reports.iter().map(|r| r.name).collect();
        assert_eq!(names, vec![BoundName::Thm4Lower, BoundName::Thm4Upper]);
        assert_eq!(reports[0].coeff, rat(3, 2));
        assert_eq!(reports[1].coeff, rat(2, 1));
        for r in &reports {
            assert!(r.value(101) > r.value(100));
        }
    }

    #[test]
    fn merge_invariance_with_leftover() {
        let b = Basis::from_names(&[("1", "1"), ("pi", "3.14159"), ("e", "2.71828")]).unwrap();
        let d = DiscreteDist::from_pairs(
            b,
            vec![
                (v(&[1, 0, 0]), rat(1, 5)),
                (v(&[0, 1, 0]), rat(1, 10)),
                (v(&[0, 0, 1]), rat(3, 10)),
                (v(&[1, 1, 1]), rat(2, 5)),
            ],
        )
        .unwrap();
        let pp = Prepartition::from_groups(d.support(), vec![vec![v(&[1, 0, 0])], vec![v(&[0, 1, 0])], vec![v(&[0, 0, 1])]]).unwrap();
        assert_eq!(pp.leftover().len(), 1);
        let before = thm7_report(&pp, &d).unwrap();
        for (a, c) in [(0, 1), (0, 2), (1, 2)] {
            let after = thm7_report(&pp.merge_singletons(a, c).unwrap(), &d).unwrap();
            assert_eq!(after.name, BoundName::Thm7LowerSltk);
            assert_eq!(after.coeff, before.coeff);
            for n in [10, 1000, 100000] {
                assert!(libm::fabs((after.value(n) - before.value(n)).to_f64()) < 1e-12);
            }
        }
    }

    #[test]
    fn rank_driven_bounds() {
        let line = Basis::from_names(&[("1", "1")]).unwrap();
        let bern = DiscreteDist::uniform(line.clone(), vec![v(&[0]), v(&[1])]).unwrap();
        let c = cor9_bound(&bern, DEFAULT_RANK_BUDGET).unwrap();
        assert_eq!(c.rank, 1);
        let t1 = thm1_lattice(&rat(1, 4)).unwrap();
        assert!(libm::fabs((c.report.value(77) - t1.value(77)).to_f64()) < 1e-28);

        let d = DiscreteDist::uniform(one_pi(), vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]).unwrap();
        let c = cor9_bound(&d, DEFAULT_RANK_BUDGET).unwrap();
        assert_eq!(c.rank, 2);
        assert_eq!(c.report.coeff, rat(1, 1));

        let point = DiscreteDist::uniform(line, vec![v(&[4])]).unwrap();
        let c = cor9_bound(&point, DEFAULT_RANK_BUDGET).unwrap();
        assert_eq!(c.rank, 0);
        assert_eq!(c.report.value(1000).to_f64(), 0.0);
    }
}
