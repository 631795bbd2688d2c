//! Text form of polynomials.
//!
//! A single grammar serves the whole crate: expressions over the variables
//! `x`, `y0`…`y9`, and `d` (the latter only on surfaces), integer and `p/q`
//! rational literals, the operators `+ - * ^`, and parentheses. `^` takes a
//! nonnegative integer literal, implicit multiplication is not allowed, and
//! a `-` may open an expression (top level or right after `(`) to negate its
//! first term. Errors carry the byte offset at which parsing failed.
//!
//! Family files are one expression per line; `#` starts a comment.

use crate::exactnum::BigRat;
use crate::polyalg::{MultiPoly, PolyError, UniPoly};
use num_bigint::BigInt;
use num_traits::Zero;

/// Hard ceiling on a single `^` exponent. Keeps pathological inputs from
/// allocating unbounded exponent vectors; real workloads stay far below it.
const MAX_EXPONENT: u32 = 10_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// Cuts the input into tokens, each tagged with its starting byte offset.
/// A rational literal `p/q` is one token: the `/` must sit directly between
/// digits, with no interior whitespace.
fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = text[start..i].parse().expect("digits");
                if i < bytes.len()
                    && bytes[i] == b'/'
                    && i + 1 < bytes.len()
                    && bytes[i + 1].is_ascii_digit()
                {
                    i += 1;
                    let dstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let denom: BigInt = text[dstart..i].parse().expect("digits");
                    if denom.is_zero() {
                        return Err(err(dstart, "zero denominator in rational literal"));
                    }
                    toks.push((start, Tok::Num(BigRat::new(numer, denom))));
                } else {
                    toks.push((start, Tok::Num(BigRat::from_integer(numer))));
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(err(
                    i,
                    format!(
                        "unexpected character `{}`",
                        text[i..].chars().next().unwrap()
                    ),
                ))
            }
        }
    }
    Ok(toks)
}

/// Maps a variable name to its slot, or explains why it has none.
type VarTable<'a> = &'a dyn Fn(&str) -> Result<usize, String>;

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    vars: VarTable<'a>,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let negated = matches!(self.peek(), Some(Tok::Minus));
        if negated {
            self.bump();
        }
        let mut acc = self.term()?;
        if negated {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some((_, Tok::Num(n))) => {
                    if !n.is_integer() {
                        return Err(err(pos, "exponent must be a nonnegative integer"));
                    }
                    let n = n.to_integer();
                    if n > BigInt::from(MAX_EXPONENT) {
                        return Err(err(pos, format!("exponent exceeds {}", MAX_EXPONENT)));
                    }
                    let n: u32 = n.try_into().expect("bounded above");
                    Ok(base.pow(n))
                }
                _ => Err(err(
                    pos,
                    "expected a nonnegative integer exponent after `^`",
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        let pos = self.pos();
        match self.bump() {
            Some((_, Tok::Num(c))) => Ok(MultiPoly::constant(self.arity, c)),
            Some((_, Tok::Ident(name))) => match (self.vars)(&name) {
                Ok(v) => Ok(MultiPoly::var(self.arity, v)),
                Err(msg) => Err(err(pos, msg)),
            },
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((p, _)) => Err(err(p, "expected `)`")),
                    None => Err(err(self.end, "expected `)`")),
                }
            }
            Some(_) => Err(err(pos, "expected a variable, literal, or `(`")),
            None => Err(err(pos, "expected a variable, literal, or `(`")),
        }
    }
}

fn parse_with(text: &str, arity: usize, vars: VarTable<'_>) -> Result<MultiPoly, PolyError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        vars,
        arity,
    };
    let poly = p.expr()?;
    if p.i < p.toks.len() {
        return Err(err(
            p.pos(),
            "unexpected token (note: implicit multiplication is not allowed)",
        ));
    }
    Ok(poly)
}

/// Parses a polynomial in `x, y0, …, y_{arity-2}` into a [`MultiPoly`] of the
/// given arity. `x` is slot 0 and `yk` is slot `k + 1`. Arity runs from 1
/// (just `x`) to 11 (`x` plus `y0`…`y9`).
pub fn parse_poly(text: &str, arity: usize) -> Result<MultiPoly, PolyError> {
    if !(1..=11).contains(&arity) {
        return Err(PolyError::Degenerate(format!(
            "arity {} out of range (1..=11)",
            arity
        )));
    }
    let table = move |name: &str| -> Result<usize, String> {
        if name == "x" {
            return Ok(0);
        }
        if let Some(rest) = name.strip_prefix('y') {
            if rest.len() == 1 && rest.as_bytes()[0].is_ascii_digit() {
                let k = (rest.as_bytes()[0] - b'0') as usize;
                if k + 1 < arity {
                    return Ok(k + 1);
                }
                return Err(format!("variable `{}` exceeds arity {}", name, arity));
            }
        }
        Err(format!("unknown variable `{}`", name))
    };
    parse_with(text, arity, &table)
}

/// Parses a surface polynomial. Implicit surfaces use `x, d, y0` (arity 3,
/// `y0` naming the third coordinate); graph surfaces use `x, d` (arity 2).
pub fn parse_surface_poly(text: &str, implicit: bool) -> Result<MultiPoly, PolyError> {
    let arity = if implicit { 3 } else { 2 };
    let table = move |name: &str| -> Result<usize, String> {
        match name {
            "x" => Ok(0),
            "d" => Ok(1),
            "y0" if implicit => Ok(2),
            "y0" => Err("variable `y0` is not allowed on a graph surface".to_string()),
            _ => Err(format!("unknown variable `{}`", name)),
        }
    };
    parse_with(text, arity, &table)
}

/// Parses a univariate polynomial in `x`.
pub fn parse_uni(text: &str) -> Result<UniPoly, PolyError> {
    Ok(parse_poly(text, 1)?.restrict_to(0))
}

/// Parses a family file: one univariate expression per line, `#` comments,
/// blank lines ignored. Error offsets are relative to the whole text and the
/// message names the offending line.
pub fn parse_family(text: &str) -> Result<Vec<UniPoly>, PolyError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for (lineno, line) in text.lines().enumerate() {
        let body = match line.find('#') {
            Some(k) => &line[..k],
            None => line,
        };
        if !body.trim().is_empty() {
            match parse_uni(body) {
                Ok(p) => out.push(p),
                Err(PolyError::Parse { pos, msg }) => {
                    return Err(err(offset + pos, format!("line {}: {}", lineno + 1, msg)));
                }
                Err(e) => return Err(e),
            }
        }
        offset += line.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn pinned_mixed_expression() {
        // "x^2*y0 + 3*x - 1/2" → {(2,1): 1, (1,0): 3, (0,0): −1/2}
        let p = parse_poly("x^2*y0 + 3*x - 1/2", 2).unwrap();
        assert_eq!(p.term_count(), 3);
        assert_eq!(p.coeff(&[2, 1]), rat_int(1));
        assert_eq!(p.coeff(&[1, 0]), rat_int(3));
        assert_eq!(p.coeff(&[0, 0]), rat(-1, 2));
    }

    #[test]
    fn parens_expand() {
        let p = parse_poly("(x+y0)^2", 2).unwrap();
        let q = parse_poly("x^2 + 2*x*y0 + y0^2", 2).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn dangling_caret_position() {
        match parse_poly("x^", 1) {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn implicit_multiplication_rejected() {
        match parse_poly("2x", 1) {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("expected parse error, got {:?}", other),
        }
        assert!(parse_poly("2*x", 1).is_ok());
    }

    #[test]
    fn unary_minus_placement() {
        let p = parse_poly("-x + 2", 1).unwrap();
        assert_eq!(p.coeff(&[1]), rat_int(-1));
        assert_eq!(p.coeff(&[0]), rat_int(2));
        let q = parse_poly("(-x)^3", 1).unwrap();
        assert_eq!(q.coeff(&[3]), rat_int(-1));
        assert!(parse_poly("2*-x", 1).is_err());
        assert!(parse_poly("x+-1", 1).is_err());
    }

    #[test]
    fn unknown_and_out_of_range_variables() {
        assert!(matches!(
            parse_poly("z", 1),
            Err(PolyError::Parse { pos: 0, .. })
        ));
        assert!(matches!(parse_poly("d", 2), Err(PolyError::Parse { .. })));
        let msg = match parse_poly("y3 + x", 2) {
            Err(PolyError::Parse { msg, .. }) => msg,
            other => panic!("expected parse error, got {:?}", other),
        };
        assert!(
            msg.contains("y3"),
            "message should name the variable: {}",
            msg
        );
    }

    #[test]
    fn rational_literal_edges() {
        let p = parse_poly("2/4", 1).unwrap();
        assert_eq!(p.constant_term(), rat(1, 2));
        // `/` must join two digit runs with no interior whitespace.
        assert!(matches!(
            parse_poly("1 / 2", 1),
            Err(PolyError::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("1/0", 1),
            Err(PolyError::Parse { pos: 2, .. })
        ));
        // A rational exponent is a syntax error, not a truncation.
        assert!(parse_poly("x^1/2", 1).is_err());
    }

    #[test]
    fn surface_tables() {
        let g = parse_surface_poly("x*d + 2", false).unwrap();
        assert_eq!(g.arity(), 2);
        assert_eq!(g.coeff(&[1, 1]), rat_int(1));
        let f = parse_surface_poly("y0 - x - d", true).unwrap();
        assert_eq!(f.arity(), 3);
        assert_eq!(f.coeff(&[0, 0, 1]), rat_int(1));
        assert_eq!(f.coeff(&[1, 0, 0]), rat_int(-1));
        assert!(parse_surface_poly("y0", false).is_err());
        assert!(parse_surface_poly("y1", true).is_err());
    }

    #[test]
    fn uni_parse_and_family_files() {
        let f = parse_uni("x^3 - x").unwrap();
        assert_eq!(f.degree(), Some(3));
        assert_eq!(f.coeff(1), rat_int(-1));

        let fam = parse_family("# header\nx^2\n\nx^2 + 1 # shifted\n").unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[1].coeff(0), rat_int(1));

        match parse_family("x^2\nx^\n") {
            Err(PolyError::Parse { pos, msg }) => {
                assert_eq!(pos, 6); // "x^2\n" is 4 bytes; error at offset 2 of line 2
                assert!(msg.contains("line 2"));
            }
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn print_then_parse_is_identity() {
        for text in [
            "x^2*y0 + 3*x - 1/2",
            "-x^4 + 7/3*x*y0^2 - y1",
            "0",
            "5",
            "x*y0*y1",
        ] {
            let p = parse_poly(text, 3).unwrap();
            let printed = p.to_string();
            let q = parse_poly(&printed, 3).unwrap();
            assert_eq!(p, q, "round trip changed {:?} → {:?}", text, printed);
            assert_eq!(printed, q.to_string());
        }
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        let term = (proptest::collection::vec(0u32..5, 3), -9i64..=9, 1i64..=9);
        proptest::collection::vec(term, 0..8).prop_map(|terms| {
            let mut p = MultiPoly::zero(3);
            for (exps, num, den) in terms {
                p.add_term(exps, rat(num, den));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn prop_print_parse_round_trip(p in arb_poly()) {
            let printed = p.to_string();
            let q = parse_poly(&printed, 3).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
