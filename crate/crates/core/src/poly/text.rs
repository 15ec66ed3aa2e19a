//! Canonical sparse text: one `coeff e1 ... en` line per term, leading term first.

use super::{Monomial, MultiPoly, MAX_VARS};
use crate::rational::{fmt_q, parse_q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

pub(super) fn format_canonical(f: &MultiPoly) -> String {
    let mut out = String::new();
    for (m, c) in f.terms().rev() {
        out.push_str(&fmt_q(c));
        for i in 0..f.nvars() {
            out.push(' ');
            out.push_str(&m.exp(i).to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses canonical text; blank lines and `#` comments are skipped. Terms may
/// appear in any order and repeated monomials are summed. `nvars` is required
/// only to type an empty (zero) polynomial.
pub fn parse_canonical(text: &str, nvars: Option<usize>) -> Result<MultiPoly, ParseError> {
    let mut terms = Vec::new();
    let mut width = nvars;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ParseError { line: i + 1, msg };
        let mut parts = line.split_whitespace();
        let c = parse_q(parts.next().unwrap()).map_err(|e| err(e.to_string()))?;
        let exps: Vec<u16> = parts
            .map(|p| p.parse::<u16>().map_err(|_| err(format!("bad exponent {p:?}"))))
            .collect::<Result<_, _>>()?;
        match width {
            None => width = Some(exps.len()),
            Some(w) if w != exps.len() => return Err(err(format!("expected {w} exponents, found {}", exps.len()))),
            _ => {}
        }
        if exps.len() > MAX_VARS {
            return Err(err(format!("more than {MAX_VARS} variables")));
        }
        terms.push((Monomial::from_slice(&exps), c));
    }
    let n = width.ok_or(ParseError { line: 0, msg: "empty input needs a variable count".into() })?;
    Ok(MultiPoly::from_monomials(n, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn format_is_grlex_descending() {
        let f = MultiPoly::from_terms(3, [(vec![1, 0, 0], q(1)), (vec![0, 0, 2], qf(-1, 2)), (vec![0, 0, 0], q(7))]);
        assert_eq!(f.to_canonical(), "-1/2 0 0 2\n1 1 0 0\n7 0 0 0\n");
    }

    #[test]
    fn roundtrip() {
        let f = MultiPoly::from_terms(3, [(vec![3, 1, 0], qf(5, 3)), (vec![0, 2, 2], q(-4)), (vec![1, 0, 0], q(1))]);
        assert_eq!(parse_canonical(&f.to_canonical(), None).unwrap(), f);
        assert_eq!(parse_canonical("", Some(3)).unwrap(), MultiPoly::zero(3));
        assert!(parse_canonical("1 0 0\n2 1\n", None).is_err());
        assert!(parse_canonical("", None).is_err());
    }
}
