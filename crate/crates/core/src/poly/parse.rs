//! Recursive-descent parser for human-readable polynomial syntax, e.g.
//! `x1^2 + 5*x1*x2 - 1` or `(x1-1)^3 + (x2-1)^3`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::QPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub column: usize,
}

impl ParseError {
    pub fn new(message: String, column: usize) -> Self {
        ParseError { message, column }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Number(BigRational),
    Ident(String),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let col = pos + 1;
        let tok = match c {
            b'+' => {
                pos += 1;
                Tok::Plus
            }
            b'-' => {
                pos += 1;
                Tok::Minus
            }
            b'*' => {
                pos += 1;
                Tok::Star
            }
            b'^' => {
                pos += 1;
                Tok::Caret
            }
            b'/' => {
                pos += 1;
                Tok::Slash
            }
            b'(' => {
                pos += 1;
                Tok::LParen
            }
            b')' => {
                pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let mut frac_digits = 0usize;
                if pos < bytes.len() && bytes[pos] == b'.' {
                    pos += 1;
                    let fstart = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    frac_digits = pos - fstart;
                    if frac_digits == 0 && pos - start == 1 {
                        return Err(ParseError::new("malformed number".into(), col));
                    }
                }
                let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
                let digits: String = text.chars().filter(|c| *c != '.').collect();
                let num: BigInt = digits
                    .parse()
                    .map_err(|_| ParseError::new(format!("malformed number '{text}'"), col))?;
                let den = BigInt::from(10u32).pow(frac_digits);
                Tok::Number(BigRational::new(num, den))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                Tok::Ident(std::str::from_utf8(&bytes[start..pos]).unwrap().to_string())
            }
            other => {
                return Err(ParseError::new(
                    format!("unexpected character '{}'", other as char),
                    col,
                ))
            }
        };
        out.push((tok, col));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(_, c)| c + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    // expr := ['+'|'-']* term (('+'|'-') term)*
    fn expr(&mut self) -> Result<QPoly, ParseError> {
        let mut acc = self.signed_term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.signed_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.signed_term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn signed_term(&mut self) -> Result<QPoly, ParseError> {
        let mut negate = false;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.bump();
                }
                Tok::Minus => {
                    negate = !negate;
                    self.bump();
                }
                _ => break,
            }
        }
        let t = self.term()?;
        Ok(if negate { t.neg() } else { t })
    }

    // term := factor (('*'|'/') factor)*   -- '/' only by a nonzero constant
    fn term(&mut self) -> Result<QPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let col = self.col();
                    let rhs = self.factor()?;
                    let c = constant_of(&rhs).ok_or_else(|| {
                        ParseError::new("can only divide by a constant".into(), col)
                    })?;
                    if c.is_zero() {
                        return Err(ParseError::new("division by zero".into(), col));
                    }
                    acc = acc.scale(&c.recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // factor := atom ('^' uint)?
    fn factor(&mut self) -> Result<QPoly, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let col = self.col();
            match self.bump() {
                Some(Tok::Number(n)) if n.is_integer() && n >= BigRational::zero() => {
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| ParseError::new("exponent too large".into(), col))?;
                    Ok(base.pow(e))
                }
                _ => Err(ParseError::new(
                    "expected non-negative integer exponent".into(),
                    col,
                )),
            }
        } else {
            Ok(base)
        }
    }

    // atom := '(' expr ')' | number | var
    fn atom(&mut self) -> Result<QPoly, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError::new("expected ')'".into(), self.col())),
                }
            }
            Some(Tok::Number(n)) => Ok(QPoly::constant(self.nvars(), n)),
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(QPoly::variable(self.nvars(), i)),
                None => Err(ParseError::new(format!("unknown variable '{name}'"), col)),
            },
            _ => Err(ParseError::new(
                "expected a number, variable, or '('".into(),
                col,
            )),
        }
    }
}

fn constant_of(p: &QPoly) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    if p.degree() == Some(0) {
        return p.terms().next().map(|(_, c)| c.clone());
    }
    None
}

/// Parse `src` as a polynomial in the named variables.
///
/// Accepts `+ - * / ^`, parentheses, integers, decimals, and rationals
/// written as `p/q`; division is restricted to constant divisors.
pub fn parse_polynomial(src: &str, vars: &[String]) -> Result<QPoly, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError::new("empty input".into(), 1));
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        vars,
    };
    let poly = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(ParseError::new("trailing input".into(), parser.col()));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::scalar::{rat, ratio};

    fn vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn parses_basic_syntax() {
        let v = vars(2);
        let p = parse_polynomial("x1^2 + 5*x1*x2 - 1", &v).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), rat(1));
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), rat(5));
        assert_eq!(p.coeff(&Monomial(vec![0, 0])), rat(-1));
    }

    #[test]
    fn parses_rationals_and_decimals() {
        let v = vars(1);
        let p = parse_polynomial("1/2*x1 + 0.25", &v).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![1])), ratio(1, 2));
        assert_eq!(p.coeff(&Monomial(vec![0])), ratio(1, 4));
        // a slash after a non-constant divides the whole running product
        let q = parse_polynomial("(x1+1)/2", &v).unwrap();
        assert_eq!(q.coeff(&Monomial(vec![1])), ratio(1, 2));
    }

    #[test]
    fn parses_parenthesized_powers() {
        let v = vars(2);
        let p = parse_polynomial("(x1-1)^3 + (x2-1)^3", &v).unwrap();
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.coeff(&Monomial(vec![0, 0])), rat(-2));
        assert_eq!(p.coeff(&Monomial(vec![3, 0])), rat(1));
    }

    #[test]
    fn leading_minus_and_double_signs() {
        let v = vars(1);
        assert_eq!(
            parse_polynomial("-x1 + 2", &v).unwrap(),
            parse_polynomial("2 - x1", &v).unwrap()
        );
        assert_eq!(
            parse_polynomial("- -x1", &v).unwrap(),
            parse_polynomial("x1", &v).unwrap()
        );
    }

    #[test]
    fn rejects_garbage_with_column() {
        let v = vars(1);
        let err = parse_polynomial("x1 + $", &v).unwrap_err();
        assert_eq!(err.column, 6);
        let err = parse_polynomial("x1 + y3", &v).unwrap_err();
        assert!(err.message.contains("unknown variable"));
        assert!(parse_polynomial("", &v).is_err());
        assert!(parse_polynomial("x1^-2", &v).is_err());
        assert!(parse_polynomial("1/0", &v).is_err());
        assert!(parse_polynomial("x1 x2", &v).is_err());
    }
}
