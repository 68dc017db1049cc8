//! CSV number formatting and JSON documents for certificates and reports.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use sumentropy_core::bounds::BoundReport;
use sumentropy_core::exactnum::format_rat;
use sumentropy_core::partition::{IncommCertificate, Prepartition, Witness};
use sumentropy_core::support::{Basis, SupportSet, SymValue};

/// Rounds to 12 significant digits, then prints the shortest decimal that
/// round-trips that rounded value.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if rounded == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn int_json(x: &BigInt) -> Value {
    x.to_i64().map(Value::from).unwrap_or_else(|| Value::String(x.to_string()))
}

fn uint_json(x: &BigUint) -> Value {
    x.to_u64().map(Value::from).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn atom_json(a: &SymValue, basis: &Basis) -> Value {
    json!({ "coords": a.coord_strings(), "expr": a.expr(basis) })
}

pub fn set_json(s: &SupportSet) -> Value {
    Value::Array(s.atoms().iter().map(|a| atom_json(a, s.basis())).collect())
}

fn exprs(values: &[SymValue], basis: &Basis) -> Value {
    Value::Array(values.iter().map(|v| Value::String(v.expr(basis))).collect())
}

pub fn witness_json(w: &Witness, basis: &Basis) -> Value {
    json!({
        "draws": uint_json(&w.draws),
        "left": w.left.iter().map(uint_json).collect::<Vec<_>>(),
        "right": w.right.iter().map(uint_json).collect::<Vec<_>>(),
        "total": w.total.expr(basis),
        "left_cell_sums": exprs(&w.left_cell_sums, basis),
        "right_cell_sums": exprs(&w.right_cell_sums, basis),
    })
}

pub fn certificate_json(c: &IncommCertificate, basis: &Basis) -> Value {
    json!({
        "incommensurable": c.verdict(),
        "atoms": c.atoms.iter().map(|a| atom_json(a, basis)).collect::<Vec<_>>(),
        "cell_of": c.cell_of,
        "kernel": c.kernel.iter().map(|z| z.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "kernel_cell_sums": c.kernel_cell_sums.iter().map(|s| exprs(s, basis)).collect::<Vec<_>>(),
        "witness": c.witness.as_ref().map(|w| witness_json(w, basis)),
        "replays": c.replay(),
    })
}

pub fn prepartition_json(p: &Prepartition) -> Value {
    let basis = p.parent().basis();
    json!({
        "k": p.k(),
        "s": p.s(),
        "degenerate": p.is_degenerate(),
        "cells": p.cells().iter().map(set_json).collect::<Vec<_>>(),
        "leftover": p.leftover().iter().map(|a| atom_json(a, basis)).collect::<Vec<_>>(),
        "incommensurability": certificate_json(p.certificate(), basis),
    })
}

pub fn report_json(r: &BoundReport) -> Value {
    let meta = r.meta.as_ref().map(|m| {
        json!({
            "k": m.k,
            "s": m.s,
            "q": format_rat(&m.q),
            "lambda": m.lambda.map(|l| l.to_f64()),
        })
    });
    json!({
        "name": r.name.as_str(),
        "coeff": format_rat(&r.coeff),
        "intercept": r.intercept.to_f64(),
        "direction": r.direction.as_str(),
        "asymptotic": r.asymptotic,
        "case": meta,
    })
}
