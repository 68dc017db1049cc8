//! Cell lists on the command line: `"r1+e,2r1+e|r2+e,2r2+e"`.
//!
//! Cells are separated by `|`, atoms by `,`. An atom is a linear expression
//! over basis symbols with rational coefficients: `2r1`, `2*r1`, `-1/2 pi`,
//! `1+pi`. A bare number multiplies the symbol whose approximation is 1.

use num_traits::{One, Zero};
use sumentropy_core::exactnum::{parse_rat, Rat};
use sumentropy_core::support::{Basis, SymValue};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
}

fn tokenize(text: &str) -> AppResult<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || d == '/' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Number(s));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Ident(s));
        } else {
            chars.next();
            out.push(match c {
                '+' => Token::Plus,
                '-' | '\u{2212}' => Token::Minus,
                '*' => Token::Star,
                _ => return Err(AppError::Cells(format!("unexpected character {c:?} in {text:?}"))),
            });
        }
    }
    Ok(out)
}

/// Parses one linear expression into a value over `basis`.
pub fn parse_value(text: &str, basis: &Basis) -> AppResult<SymValue> {
    let err = |msg: String| AppError::Cells(format!("{msg} in {text:?}"));
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(err("empty expression".into()));
    }
    let mut coords = vec![Rat::zero(); basis.dim()];
    let mut i = 0;
    let mut first = true;
    while i < tokens.len() {
        let mut sign = Rat::one();
        match tokens[i] {
            Token::Plus if !first || i == 0 => i += 1,
            Token::Minus => {
                sign = -sign;
                i += 1;
            }
            _ if first => {}
            _ => return Err(err("expected '+' or '-'".into())),
        }
        first = false;
        let mut coeff = Rat::one();
        let mut had_number = false;
        if let Some(Token::Number(n)) = tokens.get(i) {
            coeff = parse_rat(n).map_err(|e| err(e.to_string()))?;
            had_number = true;
            i += 1;
            if tokens.get(i) == Some(&Token::Star) {
                i += 1;
                if !matches!(tokens.get(i), Some(Token::Ident(_))) {
                    return Err(err("expected a symbol after '*'".into()));
                }
            }
        }
        let index = match tokens.get(i) {
            Some(Token::Ident(name)) => {
                i += 1;
                basis
                    .index_of(name)
                    .ok_or_else(|| err(format!("unknown symbol {name:?}")))?
            }
            _ if had_number => basis
                .unit_index()
                .ok_or_else(|| err("a bare number needs a basis symbol with approx 1".into()))?,
            _ => return Err(err("expected a number or a symbol".into())),
        };
        coords[index] += sign * coeff;
    }
    Ok(SymValue::new(coords))
}

/// Parses `cell|cell|…` where each cell is `atom,atom,…`.
pub fn parse_cells(text: &str, basis: &Basis) -> AppResult<Vec<Vec<SymValue>>> {
    text.split('|')
        .map(|cell| {
            cell.split(',')
                .map(|atom| parse_value(atom, basis))
                .collect::<AppResult<Vec<_>>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sumentropy_core::exactnum::rat;

    fn basis() -> std::sync::Arc<Basis> {
        Basis::from_names(&[("r1", "0.7"), ("r2", "1.3"), ("e", "0.01")]).unwrap()
    }

    fn unit() -> std::sync::Arc<Basis> {
        Basis::from_names(&[("one", "1"), ("pi", "3.14159")]).unwrap()
    }

    #[test]
    fn expressions() {
        let b = basis();
        assert_eq!(parse_value("2r1+e", &b).unwrap(), SymValue::new(vec![rat(2, 1), rat(0, 1), rat(1, 1)]));
        assert_eq!(parse_value(" 2 * r1 - 1/3 e ", &b).unwrap(), SymValue::new(vec![rat(2, 1), rat(0, 1), rat(-1, 3)]));
        assert_eq!(parse_value("-r2+r2", &b).unwrap(), SymValue::zero(3));
        let u = unit();
        assert_eq!(parse_value("1+pi", &u).unwrap(), SymValue::from_ints(&[1, 1]));
        assert_eq!(parse_value("0", &u).unwrap(), SymValue::from_ints(&[0, 0]));
        assert_eq!(parse_value("\u{2212}2pi", &u).unwrap(), SymValue::from_ints(&[0, -2]));
    }

    #[test]
    fn malformed_expressions() {
        let b = basis();
        for bad in ["", "2", "x", "r1 r2", "2*", "r1+", "1/0 r1", "r1#"] {
            assert!(parse_value(bad, &b).is_err(), "{bad}");
        }
    }

    #[test]
    fn cell_lists() {
        let b = basis();
        let cells = parse_cells("r1+e,2r1+e|r2+e,2r2+e", &b).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[1][1], SymValue::new(vec![rat(0, 1), rat(2, 1), rat(1, 1)]));
    }
}
