//! Exact entropy of `T_N` over a grid of `N`, side by side with the
//! asymptotic bounds that apply to the distribution.

use std::str::FromStr;

use sumentropy_core::bounds::{cor9_bound, thm1_lattice, thm2_multinomial, thm4_report, thm7_report, BoundReport};
use sumentropy_core::dist::{mc_entropy, DiscreteDist, EntropyValue, IidSumWalker};
use sumentropy_core::exactnum::{kernel_basis, Rat, RatMatrix};
use sumentropy_core::partition::{compute_rank, Prepartition, RankOutcome};
use sumentropy_core::Error as CoreError;

use crate::error::{AppError, AppResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundRequest {
    Thm1,
    Thm2,
    Thm4,
    Thm7,
    Cor9,
}

impl FromStr for BoundRequest {
    type Err = AppError;

    fn from_str(s: &str) -> AppResult<Self> {
        match s.trim() {
            "thm1" | "thm1_lattice" => Ok(BoundRequest::Thm1),
            "thm2" | "thm2_multinomial" => Ok(BoundRequest::Thm2),
            "thm4" => Ok(BoundRequest::Thm4),
            "thm7" => Ok(BoundRequest::Thm7),
            "cor9" => Ok(BoundRequest::Cor9),
            other => Err(AppError::Usage(format!(
                "unknown bound {other:?} (expected thm1, thm2, thm4, thm7 or cor9)"
            ))),
        }
    }
}

/// One bound column of a convergence table.
#[derive(Clone, Debug)]
pub struct BoundColumn {
    pub label: String,
    pub report: BoundReport,
}

/// Bounds that apply to a distribution, and why the others do not.
#[derive(Clone, Debug)]
pub struct ResolvedBounds {
    pub columns: Vec<BoundColumn>,
    pub skipped: Vec<(String, String)>,
    pub rank: Option<RankOutcome>,
}

/// True when the atoms are affinely independent, so `T_N` determines the
/// multinomial count vector.
pub fn is_affinely_independent(d: &DiscreteDist) -> bool {
    let q = d.basis().dim();
    let m = RatMatrix::from_fn(q + 1, d.len(), |r, c| {
        if r < q {
            d.atoms()[c].coords()[r].clone()
        } else {
            Rat::from_integer(1.into())
        }
    });
    kernel_basis(&m).is_empty()
}

/// Resolves the requested bounds for `d`. Thm-4 and Thm-7 use `cells` when
/// given, otherwise the certificate of the rank search.
pub fn resolve_bounds(
    d: &DiscreteDist,
    requests: &[BoundRequest],
    cells: Option<&Prepartition>,
    rank_budget: u64,
) -> AppResult<ResolvedBounds> {
    let needs_rank = requests.iter().any(|r| matches!(r, BoundRequest::Cor9))
        || (cells.is_none() && requests.iter().any(|r| matches!(r, BoundRequest::Thm4 | BoundRequest::Thm7)));
    let rank = if needs_rank { Some(compute_rank(d.support(), rank_budget)?) } else { None };
    let pp = cells.cloned().or_else(|| rank.as_ref().and_then(|r| r.certificate.clone()));
    let mut columns = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |label: &str, report: BoundReport| columns.push(BoundColumn { label: label.into(), report });
    for req in requests {
        match req {
            BoundRequest::Thm1 => match d.var_over_h2() {
                Ok(v) => push("thm1", thm1_lattice(&v)?),
                Err(e) => skipped.push(("thm1".into(), e.to_string())),
            },
            BoundRequest::Thm2 => {
                if d.len() >= 2 && is_affinely_independent(d) {
                    push("thm2", thm2_multinomial(&d.probs())?);
                } else {
                    skipped.push(("thm2".into(), "atoms are not affinely independent".into()));
                }
            }
            BoundRequest::Thm4 => match &pp {
                Some(p) if p.covers() => {
                    for r in thm4_report(p, d)? {
                        let label = r.name.as_str().to_string();
                        push(&label, r);
                    }
                }
                Some(_) => skipped.push(("thm4".into(), "cells do not cover the support".into())),
                None => skipped.push(("thm4".into(), "no prepartition (deterministic law)".into())),
            },
            BoundRequest::Thm7 => match &pp {
                Some(p) => push("thm7", thm7_report(p, d)?),
                None => skipped.push(("thm7".into(), "no prepartition (deterministic law)".into())),
            },
            BoundRequest::Cor9 => push("cor9", cor9_bound(d, rank_budget)?.report),
        }
    }
    Ok(ResolvedBounds { columns, skipped, rank })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub max_support: usize,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    /// Absent when the exact law exceeded the support cap.
    pub entropy: Option<EntropyValue>,
    pub support_size: Option<usize>,
    pub bounds: Vec<f64>,
    pub note: Option<String>,
}

impl ConvergenceRow {
    pub fn h(&self) -> Option<f64> {
        self.entropy.map(EntropyValue::to_f64)
    }

    /// `H − bound` per column, absent with `H`.
    pub fn gaps(&self) -> Vec<Option<f64>> {
        self.bounds.iter().map(|b| self.h().map(|h| h - b)).collect()
    }
}

/// Validates an ascending grid of positive `N`.
pub fn check_grid(grid: &[u64]) -> AppResult<()> {
    if grid.is_empty() {
        return Err(AppError::Usage("empty N grid".into()));
    }
    if grid[0] == 0 {
        return Err(AppError::Usage("N must be at least 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AppError::Usage("the N grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Rows in grid order. With exact entropy a single incremental walker covers
/// the whole grid; once the support cap is hit, later rows carry no entropy.
pub fn run_convergence(
    d: &DiscreteDist,
    grid: &[u64],
    columns: &[BoundColumn],
    mode: EntropyMode,
    caps: Caps,
) -> AppResult<Vec<ConvergenceRow>> {
    check_grid(grid)?;
    let bounds_at = |n: u64| columns.iter().map(|c| c.report.value(n).to_f64()).collect::<Vec<_>>();
    let mut rows = Vec::with_capacity(grid.len());
    match mode {
        EntropyMode::Exact => {
            let last = *grid.last().expect("nonempty grid");
            let mut walker = match IidSumWalker::new(d, last, caps.max_support) {
                Ok(w) => Ok(w),
                Err(e @ (CoreError::SupportOverflow { .. } | CoreError::KeySpaceOverflow)) => Err(e.to_string()),
                Err(e) => return Err(e.into()),
            };
            for &n in grid {
                let mut row = ConvergenceRow {
                    n,
                    entropy: None,
                    support_size: None,
                    bounds: bounds_at(n),
                    note: None,
                };
                match &mut walker {
                    Ok(w) => match w.advance_to(n) {
                        Ok(()) => {
                            row.entropy = Some(w.entropy_with_precision(caps.precision)?);
                            row.support_size = Some(w.support_len());
                        }
                        Err(e @ CoreError::SupportOverflow { .. }) => {
                            row.note = Some(e.to_string());
                            walker = Err(e.to_string());
                        }
                        Err(e) => return Err(e.into()),
                    },
                    Err(msg) => row.note = Some(msg.clone()),
                }
                rows.push(row);
            }
        }
        EntropyMode::MonteCarlo { samples, seed } => {
            for &n in grid {
                let mc = mc_entropy(d, n, samples, seed)?;
                rows.push(ConvergenceRow {
                    n,
                    entropy: Some(mc.estimate),
                    support_size: Some(mc.observed_support),
                    bounds: bounds_at(n),
                    note: None,
                });
            }
        }
    }
    Ok(rows)
}

/// Whether `|H − bound|` strictly decreases along the rows that have `H`
/// and lie in `window`.
pub fn gap_magnitude_decreasing(rows: &[ConvergenceRow], column: usize, window: (u64, u64)) -> bool {
    let gaps: Vec<f64> = rows
        .iter()
        .filter(|r| (window.0..=window.1).contains(&r.n))
        .filter_map(|r| r.gaps()[column].map(f64::abs))
        .collect();
    gaps.len() >= 2 && gaps.windows(2).all(|w| w[1] < w[0])
}

/// `lo, 2·lo, 4·lo, … ≤ hi`.
pub fn dyadic_grid(lo: u64, hi: u64) -> AppResult<Vec<u64>> {
    if lo == 0 || hi < lo {
        return Err(AppError::Usage(format!("invalid dyadic range {lo},{hi}")));
    }
    let mut out = vec![lo];
    while let Some(next) = out.last().and_then(|n| n.checked_mul(2)).filter(|&n| n <= hi) {
        out.push(next);
    }
    Ok(out)
}

/// `a, a+step, … ≤ b`.
pub fn linear_grid(a: u64, b: u64, step: u64) -> AppResult<Vec<u64>> {
    if a == 0 || b < a || step == 0 {
        return Err(AppError::Usage(format!("invalid grid {a},{b},{step}")));
    }
    Ok((a..=b).step_by(step as usize).collect())
}
