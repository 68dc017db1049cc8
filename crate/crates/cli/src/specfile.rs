//! Distribution spec files.
//!
//! ```json
//! {"basis": [{"symbol": "one", "approx": "1"}],
//!  "atoms": [{"coords": ["0"], "prob": "1/2"}, {"coords": ["1"], "prob": "1/2"}]}
//! ```
//!
//! Coordinates are exact rationals over the declared symbols, which are
//! assumed linearly independent over Q. `approx` is used for display only.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use sumentropy_core::dist::DiscreteDist;
use sumentropy_core::exactnum::{format_rat, parse_rat, Rat};
use sumentropy_core::support::{Basis, Symbol, SymValue};

use crate::error::{AppError, AppResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    basis: Vec<RawSymbol>,
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    symbol: String,
    approx: Approx,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Approx {
    Text(String),
    Number(serde_json::Number),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    coords: Vec<String>,
    prob: String,
}

fn spec_err(msg: String) -> AppError {
    AppError::Spec(msg)
}

/// Parses a spec document into its basis and exact distribution.
pub fn parse_spec(text: &str) -> AppResult<(Arc<Basis>, DiscreteDist)> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| spec_err(format!("invalid spec: {e}")))?;
    if raw.basis.is_empty() {
        return Err(spec_err("basis: at least one symbol is required".into()));
    }
    let mut symbols = Vec::with_capacity(raw.basis.len());
    for (i, s) in raw.basis.iter().enumerate() {
        let approx = match &s.approx {
            Approx::Text(t) => t.clone(),
            Approx::Number(n) => n.to_string(),
        };
        if approx.trim().parse::<f64>().is_err() {
            return Err(spec_err(format!("basis[{i}].approx: {approx:?} is not a decimal number")));
        }
        if s.symbol.is_empty() || !s.symbol.chars().all(|c| c.is_alphanumeric() || c == '_') || s.symbol.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(spec_err(format!(
                "basis[{i}].symbol: {:?} must be an identifier (letters, digits, '_', not starting with a digit)",
                s.symbol
            )));
        }
        symbols.push(Symbol::new(s.symbol.clone(), approx));
    }
    let basis = Arc::new(Basis::new(symbols).map_err(|e| spec_err(format!("basis: {e}")))?);
    if raw.atoms.is_empty() {
        return Err(spec_err("atoms: empty support".into()));
    }
    let mut seen: BTreeMap<SymValue, usize> = BTreeMap::new();
    let mut pairs = Vec::with_capacity(raw.atoms.len());
    for (i, a) in raw.atoms.iter().enumerate() {
        if a.coords.len() != basis.dim() {
            return Err(spec_err(format!(
                "atoms[{i}].coords: expected {} coordinates, found {}",
                basis.dim(),
                a.coords.len()
            )));
        }
        let coords = a
            .coords
            .iter()
            .enumerate()
            .map(|(c, x)| parse_rat(x).map_err(|e| spec_err(format!("atoms[{i}].coords[{c}]: {e}"))))
            .collect::<AppResult<Vec<Rat>>>()?;
        let prob = parse_rat(&a.prob).map_err(|e| spec_err(format!("atoms[{i}].prob: {e}")))?;
        if prob <= Rat::from_integer(0.into()) {
            return Err(spec_err(format!("atoms[{i}].prob: {} is not positive", format_rat(&prob))));
        }
        let atom = SymValue::new(coords);
        if let Some(j) = seen.insert(atom.clone(), i) {
            return Err(spec_err(format!(
                "atoms[{i}]: duplicate atom {} (same coordinates as atoms[{j}])",
                atom.expr(&basis)
            )));
        }
        pairs.push((atom, prob));
    }
    let d = DiscreteDist::from_pairs(basis.clone(), pairs).map_err(|e| spec_err(format!("atoms: {e}")))?;
    Ok((basis, d))
}

/// Serializes a distribution back to the spec grammar.
pub fn to_spec_json(d: &DiscreteDist) -> serde_json::Value {
    let basis: Vec<_> = d
        .basis()
        .symbols()
        .iter()
        .map(|s| serde_json::json!({ "symbol": s.name, "approx": s.approx }))
        .collect();
    let atoms: Vec<_> = d
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| serde_json::json!({ "coords": a.coord_strings(), "prob": format_rat(&d.prob(i)) }))
        .collect();
    serde_json::json!({ "basis": basis, "atoms": atoms })
}
