//! Text syntax: field descriptors, field elements, K^MW expressions, forms,
//! Thornton prime literals and tensor-triangular point literals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::comparison::HomogeneousPrime;
use crate::field::{Field, FieldElement, FieldKind};
use crate::gw::DiagonalForm;
use crate::mw::MwElement;
use crate::poset::{Group, Height, TTPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown literal: {0}")]
    UnknownLiteral(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
}

fn syn(offset: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Syntax { offset, message: message.into() }
}

fn strip(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// `Q`, `F(q)`, `Q(sqrt(d))`, `Rclosed`, `Cclosed` (also `R`, `C`, `Fq`).
pub fn parse_field(text: &str) -> Result<Field, SyntaxError> {
    let t = strip(text);
    let bad = || SyntaxError::UnsupportedField(text.to_string());
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let f = match t.as_str() {
        "Q" => Field::rationals(),
        "R" | "Rclosed" => Field::real_closed(),
        "C" | "Cclosed" => Field::algebraically_closed(),
        _ => {
            if let Some(rest) = t.strip_prefix("Q(sqrt(").and_then(|r| r.strip_suffix("))")) {
                Field::real_quadratic(num(rest)?).map_err(|e| SyntaxError::UnsupportedField(e.to_string()))?
            } else if let Some(rest) = t.strip_prefix("F(").and_then(|r| r.strip_suffix(')')) {
                Field::finite(num(rest)?).map_err(|e| SyntaxError::UnsupportedField(e.to_string()))?
            } else if let Some(rest) = t.strip_prefix('F') {
                Field::finite(num(rest)?).map_err(|e| SyntaxError::UnsupportedField(e.to_string()))?
            } else {
                return Err(bad());
            }
        }
    };
    Ok(f)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// A nonzero element of the field.
pub fn parse_element(field: &Field, text: &str) -> Result<FieldElement, SyntaxError> {
    let t = strip(text);
    let unknown = || SyntaxError::UnknownLiteral(text.to_string());
    let x = match field.kind() {
        FieldKind::Finite { .. } => {
            if t == "g" {
                field.generator().unwrap()
            } else if let Some(k) = t.strip_prefix("g^") {
                field.gen_pow(k.parse().map_err(|_| unknown())?).map_err(|_| unknown())?
            } else {
                let n: i64 = t.parse().map_err(|_| unknown())?;
                field.from_int(n)
            }
        }
        FieldKind::RealQuadratic(d) => parse_quad(field, *d, &t).ok_or_else(unknown)?,
        _ => field.from_rational(parse_rational(&t).ok_or_else(unknown)?).map_err(|_| unknown())?,
    };
    if field.is_zero(&x) {
        return Err(unknown());
    }
    Ok(x)
}

/// a + b*sqrt(d) written as a signed sum of rationals and rational multiples of sqrt(d).
fn parse_quad(field: &Field, d: u64, t: &str) -> Option<FieldElement> {
    let root = format!("sqrt({d})");
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    let mut rest = t;
    if rest.is_empty() {
        return None;
    }
    while !rest.is_empty() {
        let mut sign = BigRational::one();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        let end = rest[1.min(rest.len())..].find(['+', '-']).map(|i| i + 1).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        if term == root {
            b += sign;
        } else if let Some(c) = term.strip_suffix(&format!("*{root}")) {
            b += sign * parse_rational(c)?;
        } else {
            a += sign * parse_rational(term)?;
        }
    }
    field.quad(a, b).ok()
}

// ---- expressions ----

struct Parser<'a> {
    field: &'a Field,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<BigInt, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| syn(start, "expected a number"))
    }

    fn expr(&mut self) -> Result<MwElement, SyntaxError> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?).unwrap();
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?).unwrap();
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MwElement, SyntaxError> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.mul(&self.power()?).unwrap();
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MwElement, SyntaxError> {
        let mut base = self.factor()?;
        while self.eat('^') {
            let at = self.pos;
            let n = self.number()?;
            let n: u32 = n.try_into().map_err(|_| syn(at, "exponent too large"))?;
            base = base.pow(n);
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<MwElement, SyntaxError> {
        let f = self.field;
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(syn(at, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(syn(self.pos, "expected ')'"));
                }
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some('[') => {
                self.pos += 1;
                let close = self.src[self.pos..].find(']').ok_or_else(|| syn(at, "unclosed '['"))?;
                let lit = &self.src[self.pos..self.pos + close];
                self.pos += close + 1;
                let u = parse_element(f, lit)?;
                Ok(MwElement::symbol(f, u).expect("parsed elements are nonzero"))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(MwElement::integer(f, 1).scale(&n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    "eta" => Ok(MwElement::eta(f)),
                    "h" => Ok(MwElement::h(f)),
                    "eps" => Ok(MwElement::eps(f)),
                    w => Err(syn(start, format!("unknown name '{w}'"))),
                }
            }
            Some(c) => Err(syn(at, format!("unexpected '{c}'"))),
        }
    }
}

pub fn parse_expression(text: &str, field: &Field) -> Result<MwElement, SyntaxError> {
    let mut p = Parser { field, src: text, pos: 0 };
    if p.peek().is_none() {
        return Err(syn(0, "empty expression"));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(syn(p.pos, "trailing input"));
    }
    Ok(e)
}

/// Comma-separated entries, e.g. `1,-1,2`; empty text is the zero form.
pub fn parse_form(text: &str, field: &Field) -> Result<DiagonalForm, SyntaxError> {
    let t = strip(text);
    let t = t.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(&t);
    let entries = if t.is_empty() {
        vec![]
    } else {
        t.split(',').map(|e| parse_element(field, e)).collect::<Result<Vec<_>, _>>()?
    };
    DiagonalForm::new(field, entries).map_err(|e| SyntaxError::UnknownLiteral(e.to_string()))
}

/// `type1`, `type2:p=3`, `type3`, `type4:a=0`, `type5:a=0`, `type6:a=1,p=5`.
pub fn parse_prime(text: &str) -> Result<HomogeneousPrime, SyntaxError> {
    let t = strip(text);
    let bad = || SyntaxError::UnknownLiteral(text.to_string());
    let (tag, args) = t.split_once(':').unwrap_or((&t, ""));
    let mut a = None;
    let mut p = None;
    for kv in args.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
        match k {
            "a" => a = Some(v.parse::<usize>().map_err(|_| bad())?),
            "p" => p = Some(v.parse::<u64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let x = match (tag, a, p) {
        ("type1", None, None) => HomogeneousPrime::T1,
        ("type2", None, Some(p)) => HomogeneousPrime::T2(p),
        ("type3", None, None) => HomogeneousPrime::T3,
        ("type4", Some(a), None) => HomogeneousPrime::T4(a),
        ("type5", Some(a), None) => HomogeneousPrime::T5(a),
        ("type6", Some(a), Some(p)) if p != 2 => HomogeneousPrime::T6(a, p),
        _ => return Err(bad()),
    };
    if let Some(p) = x.prime() {
        if !crate::arith::is_prime(p) {
            return Err(bad());
        }
    }
    Ok(x)
}

/// `C(p,n)` for SH^fin and `P(H,p,n)` for SH(C2), with n a height or `inf`.
pub fn parse_tt_point(text: &str) -> Result<TTPoint, SyntaxError> {
    let t = strip(text);
    let bad = || SyntaxError::UnknownLiteral(text.to_string());
    let height = |s: &str| -> Result<Height, SyntaxError> {
        if s == "inf" || s == "∞" {
            Ok(Height::Infinite)
        } else {
            match s.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(Height::Finite(n)),
                _ => Err(bad()),
            }
        }
    };
    let prime = |s: &str, n: Height| -> Result<u64, SyntaxError> {
        let p: u64 = s.parse().map_err(|_| bad())?;
        let ok = if n == Height::Finite(1) { p == 0 || crate::arith::is_prime(p) } else { crate::arith::is_prime(p) };
        if ok {
            Ok(p)
        } else {
            Err(bad())
        }
    };
    if let Some(body) = t.strip_prefix("C(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let n = height(parts[1])?;
        return Ok(TTPoint::top(prime(parts[0], n)?, n));
    }
    if let Some(body) = t.strip_prefix("P(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let g = match parts[0] {
            "e" => Group::Trivial,
            "C2" => Group::C2,
            _ => return Err(bad()),
        };
        let n = height(parts[2])?;
        return Ok(TTPoint::equivariant(g, prime(parts[1], n)?, n));
    }
    Err(bad())
}

/// Comma-separated list of rational primes.
pub fn parse_primes(text: &str) -> Result<Vec<u64>, SyntaxError> {
    let t = strip(text);
    t.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<u64>() {
            Ok(p) if crate::arith::is_prime(p) => Ok(p),
            _ => Err(SyntaxError::UnknownLiteral(s.to_string())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        assert_eq!(parse_field("Q").unwrap(), Field::rationals());
        assert_eq!(parse_field("F(9)").unwrap(), Field::finite(9).unwrap());
        assert_eq!(parse_field("Q(sqrt(2))").unwrap(), Field::real_quadratic(2).unwrap());
        assert_eq!(parse_field(" Rclosed ").unwrap(), Field::real_closed());
        assert!(parse_field("F(4)").is_err());
        assert!(parse_field("Z").is_err());
    }

    #[test]
    fn elements() {
        let k = Field::real_quadratic(2).unwrap();
        let x = parse_element(&k, "1/2-3*sqrt(2)").unwrap();
        assert_eq!(k.render(&x), "1/2-3*sqrt(2)");
        assert_eq!(parse_element(&k, "-sqrt(2)").unwrap(), k.neg(&parse_element(&k, "sqrt(2)").unwrap()));
        let q = Field::rationals();
        assert!(matches!(parse_element(&q, "1/0"), Err(SyntaxError::UnknownLiteral(_))));
        assert!(matches!(parse_element(&q, "0"), Err(SyntaxError::UnknownLiteral(_))));
        let f9 = Field::finite(9).unwrap();
        assert_eq!(parse_element(&f9, "g^2").unwrap(), f9.gen_pow(2).unwrap());
    }

    #[test]
    fn expressions() {
        let q = Field::rationals();
        let e = parse_expression("(2+[-1]*eta)*eta", &q).unwrap();
        assert!(e.normalize().is_formally_zero());
        let e = parse_expression("h - (2+[-1]*eta)", &q).unwrap();
        assert!(e.normalize().is_formally_zero());
        assert!(matches!(parse_expression("[1/0]", &q), Err(SyntaxError::UnknownLiteral(_))));
        match parse_expression("eta + * 2", &q) {
            Err(SyntaxError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        let e = parse_expression("-eta^2*[3] + 2", &q).unwrap();
        assert_eq!(e.render(), "-eta^2*[3] + 2");
    }

    #[test]
    fn render_round_trip() {
        for (f, src) in [
            (Field::rationals(), "[4] - 3*eta*[6]*[5] + eps^2"),
            (Field::finite(9).unwrap(), "[g^3]*eta + [g]"),
            (Field::real_quadratic(2).unwrap(), "[1+sqrt(2)]*[3] - eta"),
        ] {
            let e = parse_expression(src, &f).unwrap();
            let back = parse_expression(&e.render(), &f).unwrap();
            assert_eq!(back, e);
            let n = e.normalize();
            assert_eq!(parse_expression(&n.render(), &f).unwrap(), n);
        }
    }

    #[test]
    fn literals() {
        assert_eq!(parse_prime("type6:a=1,p=5").unwrap(), HomogeneousPrime::T6(1, 5));
        assert!(parse_prime("type6:a=1,p=2").is_err());
        assert_eq!(parse_tt_point("P(C2,2,3)").unwrap(), TTPoint::equivariant(Group::C2, 2, Height::Finite(3)));
        assert_eq!(parse_tt_point("C(2,inf)").unwrap(), TTPoint::top(2, Height::Infinite));
        assert!(parse_tt_point("C(4,2)").is_err());
        assert_eq!(parse_form("1,-1,2", &Field::rationals()).unwrap().rank(), 3);
        assert_eq!(parse_primes("2,3,5").unwrap(), vec![2, 3, 5]);
    }
}
