//! Base field backends: exact arithmetic, square classes and orderings.
//!
//! `RealClosed` and `AlgebraicallyClosed` are square-class-level models whose
//! elements are rational literals; only their sign (resp. nothing) matters.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;

pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;
/// Largest supported finite field order (log tables are materialized).
pub const MAX_FINITE_ORDER: u64 = 1 << 20;
/// Height cap for the irrational square-class search in real quadratic fields.
const QUAD_SEARCH_HEIGHT: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("zero element")]
    ZeroElement,
    #[error("ordering {0} does not belong to this field")]
    OrderingMismatch(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("{0} cannot be factored within the factor bound {1}")]
    FactorBoundExceeded(String, u64),
    #[error("elements from different fields")]
    FieldMismatch,
    #[error("unsupported entry: {0}")]
    UnsupportedEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Finite { p: u64, k: u32 },
    Rationals,
    RealQuadratic(u64),
    RealClosed,
    AlgebraicallyClosed,
}

struct FiniteData {
    p: u64,
    k: u32,
    q: u64,
    /// exp[i] = g^i, encoded as base-p digit vectors packed into an integer
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    kind: FieldKind,
    factor_bound: u64,
    finite: Option<FiniteData>,
}

/// A supported base field. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind == other.0.kind
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            FieldKind::Finite { p, k } => write!(f, "F({})", p.pow(*k)),
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::RealQuadratic(d) => write!(f, "Q(sqrt({}))", d),
            FieldKind::RealClosed => write!(f, "Rclosed"),
            FieldKind::AlgebraicallyClosed => write!(f, "Cclosed"),
        }
    }
}

/// Exact field element. The variant is fixed by the backend: `Fq` for finite
/// fields, `Quad` for real quadratic fields, `Rat` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Fq(u32),
    Rat(BigRational),
    Quad(BigRational, BigRational),
}

impl FieldElement {
    pub fn rat(n: i64) -> FieldElement {
        FieldElement::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// True for the literal -1, independent of backend.
    pub fn is_minus_one(&self, field: &Field) -> bool {
        match self {
            FieldElement::Fq(v) => field.fdata().map(|d| *v as u64 == d.p - 1).unwrap_or(false),
            FieldElement::Rat(r) => r == &-BigRational::one(),
            FieldElement::Quad(a, b) => b.is_zero() && a == &-BigRational::one(),
        }
    }
}

/// An ordering of a formally real field. For `Q(sqrt(d))`, index 0 makes
/// sqrt(d) positive and index 1 makes it negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering {
    pub index: usize,
    field: FieldKind,
}

impl Ordering {
    pub fn field_kind(&self) -> &FieldKind {
        &self.field
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.index)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

// ---- finite field construction ----

fn digits(mut v: u64, p: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, d| acc * p + d)
}

/// Multiply polynomials over F_p and reduce modulo the monic `f` (low to high).
fn polymulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let k = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c != 0 {
            for j in 0..=k {
                let t = (c * f[j]) % p;
                prod[i - k + j] = (prod[i - k + j] + p - t) % p;
            }
        }
    }
    prod.truncate(k);
    prod.resize(k, 0);
    prod
}

fn polypowmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let k = f.len() - 1;
    let mut r = vec![0u64; k];
    r[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = polymulmod(&r, &b, f, p);
        }
        b = polymulmod(&b, &b, f, p);
        e >>= 1;
    }
    r
}

fn build_finite(p: u64, k: u32) -> FiniteData {
    let q = p.pow(k);
    let order = q - 1;
    let rs = arith::prime_divisors(order);
    // modulus and generator: for k = 1 the smallest primitive root, for k > 1
    // the first primitive monic polynomial with generator x
    let (modulus, gen) = if k == 1 {
        let g = (2..p)
            .find(|g| rs.iter().all(|r| arith::pow_mod(*g, order / r, p) != 1))
            .unwrap_or(1);
        (vec![0, 1], vec![g])
    } else {
        let mut found = None;
        for code in 0..q {
            let mut f = digits(code, p, k);
            if f[0] == 0 {
                continue;
            }
            f.push(1);
            let mut x = vec![0u64; k as usize];
            x[1] = 1;
            let one = {
                let mut o = vec![0u64; k as usize];
                o[0] = 1;
                o
            };
            if polypowmod(&x, order, &f, p) != one {
                continue;
            }
            if rs.iter().all(|r| polypowmod(&x, order / r, &f, p) != one) {
                found = Some((f, x));
                break;
            }
        }
        found.expect("primitive polynomial exists")
    };
    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![0u32; q as usize];
    let mut cur = {
        let mut o = vec![0u64; k as usize];
        o[0] = 1;
        o
    };
    for i in 0..order {
        let code = undigits(&cur, p);
        exp.push(code as u32);
        log[code as usize] = i as u32;
        cur = if k == 1 {
            vec![(cur[0] * gen[0]) % p]
        } else {
            polymulmod(&cur, &gen, &modulus, p)
        };
    }
    FiniteData { p, k, q, exp, log }
}

impl Field {
    fn new(kind: FieldKind, factor_bound: u64) -> Field {
        let finite = match &kind {
            FieldKind::Finite { p, k } => Some(build_finite(*p, *k)),
            _ => None,
        };
        Field(Arc::new(Inner { kind, factor_bound, finite }))
    }

    /// Finite field with `q` elements; `q` must be an odd prime power.
    pub fn finite(q: u64) -> Result<Field, FieldError> {
        if q < 3 || q % 2 == 0 {
            return Err(FieldError::UnsupportedField(format!("F({q}): order must be an odd prime power")));
        }
        if q > MAX_FINITE_ORDER {
            return Err(FieldError::UnsupportedField(format!("F({q}): order exceeds {MAX_FINITE_ORDER}")));
        }
        let ps = arith::prime_divisors(q);
        if ps.len() != 1 {
            return Err(FieldError::UnsupportedField(format!("F({q}): order must be a prime power")));
        }
        let p = ps[0];
        let mut k = 0;
        let mut m = q;
        while m > 1 {
            m /= p;
            k += 1;
        }
        Ok(Field::new(FieldKind::Finite { p, k }, DEFAULT_FACTOR_BOUND))
    }

    pub fn rationals() -> Field {
        Field::new(FieldKind::Rationals, DEFAULT_FACTOR_BOUND)
    }

    pub fn real_quadratic(d: u64) -> Result<Field, FieldError> {
        if d < 2 || arith::factor(d as u128, 1 << 20).unwrap().iter().any(|(_, e)| *e > 1) {
            return Err(FieldError::UnsupportedField(format!("Q(sqrt({d})): d must be squarefree and > 1")));
        }
        Ok(Field::new(FieldKind::RealQuadratic(d), DEFAULT_FACTOR_BOUND))
    }

    pub fn real_closed() -> Field {
        Field::new(FieldKind::RealClosed, DEFAULT_FACTOR_BOUND)
    }

    pub fn algebraically_closed() -> Field {
        Field::new(FieldKind::AlgebraicallyClosed, DEFAULT_FACTOR_BOUND)
    }

    pub fn with_factor_bound(&self, bound: u64) -> Field {
        Field::new(self.0.kind.clone(), bound.max(2))
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0.kind
    }

    pub fn factor_bound(&self) -> u64 {
        self.0.factor_bound
    }

    fn fdata(&self) -> Option<&FiniteData> {
        self.0.finite.as_ref()
    }

    /// Characteristic, 0 for the characteristic-zero backends.
    pub fn characteristic(&self) -> u64 {
        self.fdata().map(|d| d.p).unwrap_or(0)
    }

    /// Order q of a finite field.
    pub fn order(&self) -> Option<u64> {
        self.fdata().map(|d| d.q)
    }

    pub fn quad_d(&self) -> Option<u64> {
        match self.0.kind {
            FieldKind::RealQuadratic(d) => Some(d),
            _ => None,
        }
    }

    // ---- construction of elements ----

    pub fn from_int(&self, n: i64) -> FieldElement {
        match &self.0.kind {
            FieldKind::Finite { .. } => {
                let p = self.characteristic() as i64;
                FieldElement::Fq(n.rem_euclid(p) as u32)
            }
            FieldKind::RealQuadratic(_) => FieldElement::Quad(rat(n), rat(0)),
            _ => FieldElement::Rat(rat(n)),
        }
    }

    pub fn from_rational(&self, r: BigRational) -> Result<FieldElement, FieldError> {
        match &self.0.kind {
            FieldKind::Finite { .. } => {
                let p = self.characteristic();
                let d = arith::mod_p(r.denom(), p);
                if d == 0 {
                    return Err(FieldError::UnsupportedEntry(format!("{r} has denominator divisible by {p}")));
                }
                Ok(FieldElement::Fq(arith::rat_mod_p(&r, p) as u32))
            }
            FieldKind::RealQuadratic(_) => Ok(FieldElement::Quad(r, BigRational::zero())),
            _ => Ok(FieldElement::Rat(r)),
        }
    }

    /// a + b*sqrt(d) in a real quadratic field.
    pub fn quad(&self, a: BigRational, b: BigRational) -> Result<FieldElement, FieldError> {
        match self.0.kind {
            FieldKind::RealQuadratic(_) => Ok(FieldElement::Quad(a, b)),
            _ => Err(FieldError::FieldMismatch),
        }
    }

    /// g^k for the fixed generator of a finite field.
    pub fn gen_pow(&self, k: i64) -> Result<FieldElement, FieldError> {
        let d = self.fdata().ok_or(FieldError::FieldMismatch)?;
        let order = (d.q - 1) as i64;
        Ok(FieldElement::Fq(d.exp[k.rem_euclid(order) as usize]))
    }

    /// Multiplicative generator of a finite field.
    pub fn generator(&self) -> Option<FieldElement> {
        self.fdata().map(|d| FieldElement::Fq(d.exp[1 % (d.q as usize - 1)]))
    }

    /// Discrete logarithm with respect to `generator()`.
    pub fn dlog(&self, x: &FieldElement) -> Result<u64, FieldError> {
        let d = self.fdata().ok_or(FieldError::FieldMismatch)?;
        match x {
            FieldElement::Fq(0) => Err(FieldError::ZeroElement),
            FieldElement::Fq(v) => Ok(d.log[*v as usize] as u64),
            _ => Err(FieldError::FieldMismatch),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn minus_one(&self) -> FieldElement {
        self.from_int(-1)
    }

    pub fn zero(&self) -> FieldElement {
        self.from_int(0)
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        match x {
            FieldElement::Fq(v) => *v == 0,
            FieldElement::Rat(r) => r.is_zero(),
            FieldElement::Quad(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    /// Whether `x` is a well-formed element of this backend.
    pub fn contains_element(&self, x: &FieldElement) -> bool {
        match (&self.0.kind, x) {
            (FieldKind::Finite { .. }, FieldElement::Fq(v)) => (*v as u64) < self.order().unwrap(),
            (FieldKind::RealQuadratic(_), FieldElement::Quad(..)) => true,
            (FieldKind::Rationals | FieldKind::RealClosed | FieldKind::AlgebraicallyClosed, FieldElement::Rat(_)) => {
                true
            }
            _ => false,
        }
    }

    // ---- arithmetic ----

    fn fq_digits(&self, v: u32) -> Vec<u64> {
        let d = self.fdata().unwrap();
        digits(v as u64, d.p, d.k)
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        match (x, y) {
            (FieldElement::Fq(a), FieldElement::Fq(b)) => {
                let p = self.characteristic();
                let s: Vec<u64> = self
                    .fq_digits(*a)
                    .iter()
                    .zip(self.fq_digits(*b))
                    .map(|(u, v)| (u + v) % p)
                    .collect();
                FieldElement::Fq(undigits(&s, p) as u32)
            }
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a + b),
            (FieldElement::Quad(a, b), FieldElement::Quad(c, e)) => FieldElement::Quad(a + c, b + e),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        match x {
            FieldElement::Fq(a) => {
                let p = self.characteristic();
                let s: Vec<u64> = self.fq_digits(*a).iter().map(|u| (p - u) % p).collect();
                FieldElement::Fq(undigits(&s, p) as u32)
            }
            FieldElement::Rat(a) => FieldElement::Rat(-a),
            FieldElement::Quad(a, b) => FieldElement::Quad(-a, -b),
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        match (x, y) {
            (FieldElement::Fq(a), FieldElement::Fq(b)) => {
                if *a == 0 || *b == 0 {
                    return FieldElement::Fq(0);
                }
                let d = self.fdata().unwrap();
                let l = (d.log[*a as usize] as u64 + d.log[*b as usize] as u64) % (d.q - 1);
                FieldElement::Fq(d.exp[l as usize])
            }
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a * b),
            (FieldElement::Quad(a, b), FieldElement::Quad(c, e)) => {
                let d = rat(self.quad_d().unwrap() as i64);
                FieldElement::Quad(a * c + &d * b * e, a * e + b * c)
            }
            _ => panic!("mixed field elements"),
        }
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(x) {
            return Err(FieldError::ZeroElement);
        }
        Ok(match x {
            FieldElement::Fq(a) => {
                let d = self.fdata().unwrap();
                let l = (d.q - 1 - d.log[*a as usize] as u64) % (d.q - 1);
                FieldElement::Fq(d.exp[l as usize])
            }
            FieldElement::Rat(a) => FieldElement::Rat(a.recip()),
            FieldElement::Quad(a, b) => {
                let n = self.norm(x);
                FieldElement::Quad(a / &n, -b / &n)
            }
        })
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> Result<FieldElement, FieldError> {
        let base = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut r = self.one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            n >>= 1;
        }
        Ok(r)
    }

    /// Norm a^2 - d b^2 of a real quadratic element.
    pub fn norm(&self, x: &FieldElement) -> BigRational {
        match x {
            FieldElement::Quad(a, b) => a * a - rat(self.quad_d().unwrap() as i64) * b * b,
            _ => panic!("norm of a non-quadratic element"),
        }
    }

    // ---- square classes ----

    fn rational_class(&self, x: &BigRational) -> Result<BigInt, FieldError> {
        arith::rational_squarefree(x, self.factor_bound())
            .map(|(s, _)| s)
            .ok_or_else(|| FieldError::FactorBoundExceeded(x.to_string(), self.factor_bound()))
    }

    /// Canonical representative among the two rational classes {s, s*d} that
    /// become equal in Q(sqrt(d)).
    fn quad_rational_rep(&self, x: &BigRational) -> Result<BigInt, FieldError> {
        let d = self.quad_d().unwrap();
        let s = self.rational_class(x)?;
        let t = self.rational_class(&BigRational::from_integer(&s * BigInt::from(d)))?;
        Ok(if t.abs() < s.abs() { t } else { s })
    }

    /// Rational number in the square class of an irrational quadratic element,
    /// if one exists (exactly when the norm is a rational square).
    fn quad_rationalize(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        let d = rat(self.quad_d().unwrap() as i64);
        let n2 = a * a - &d * b * b;
        let n = arith::rational_sqrt(&n2)?;
        let two = rat(2);
        let r = &two * (a + &n);
        if r.is_zero() {
            Some(two * (a - n))
        } else {
            Some(r)
        }
    }

    /// Whether x*y is a square in Q(sqrt(d)).
    fn quad_same_class(&self, x: &FieldElement, y: &FieldElement) -> Result<bool, FieldError> {
        let z = self.mul(x, y);
        let FieldElement::Quad(a, b) = &z else { unreachable!() };
        let r = if b.is_zero() {
            a.clone()
        } else {
            match self.quad_rationalize(a, b) {
                Some(r) => r,
                None => return Ok(false),
            }
        };
        let s = self.rational_class(&r)?;
        Ok(s == BigInt::one() || s == BigInt::from(self.quad_d().unwrap()))
    }

    fn quad_square_class(&self, a: &BigRational, b: &BigRational) -> Result<FieldElement, FieldError> {
        if b.is_zero() {
            let s = self.quad_rational_rep(a)?;
            return Ok(FieldElement::Quad(BigRational::from_integer(s), BigRational::zero()));
        }
        if let Some(r) = self.quad_rationalize(a, b) {
            let s = self.quad_rational_rep(&r)?;
            return Ok(FieldElement::Quad(BigRational::from_integer(s), BigRational::zero()));
        }
        // no rational representative: canonical choice is the first element
        // A + B sqrt(d) of a fixed height enumeration in the same class
        let x = FieldElement::Quad(a.clone(), b.clone());
        let l = a.denom() * b.denom();
        let lsq = BigRational::from_integer(&l * &l);
        let (ai, bi) = ((a * &lsq).to_integer(), (b * &lsq).to_integer());
        let h = ai.abs().max(bi.abs());
        let nx = self.norm(&x);
        if h > BigInt::from(QUAD_SEARCH_HEIGHT) {
            // content reduction may bring the height down
            let g = num_integer::Integer::gcd(&ai, &bi);
            let mut c = BigInt::one();
            for (p, e) in arith::factor(arith::to_u128(&g).unwrap_or(0).max(1), self.factor_bound()).unwrap_or_default() {
                c *= BigInt::from(p).pow(e / 2);
            }
            let c2 = &c * &c;
            let (ar, br) = (&ai / &c2, &bi / &c2);
            if ar.abs().max(br.abs()) > BigInt::from(QUAD_SEARCH_HEIGHT) {
                return Err(FieldError::UnsupportedEntry(format!(
                    "square class of {} exceeds the search height {}",
                    self.render(&x),
                    QUAD_SEARCH_HEIGHT
                )));
            }
        }
        let target = self.rational_class(&nx)?;
        for hh in 1..=QUAD_SEARCH_HEIGHT {
            for ca in -hh..=hh {
                for cb in -hh..=hh {
                    if cb == 0 || ca.abs().max(cb.abs()) != hh {
                        continue;
                    }
                    let y = FieldElement::Quad(rat(ca), rat(cb));
                    let ny = self.norm(&y);
                    if self.rational_class(&ny)? != target {
                        continue;
                    }
                    if self.quad_same_class(&x, &y)? {
                        return Ok(y);
                    }
                }
            }
        }
        Err(FieldError::UnsupportedEntry(format!("square class of {}", self.render(&x))))
    }

    /// Canonical representative of x (F^x)^2.
    pub fn square_class(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(x) {
            return Err(FieldError::ZeroElement);
        }
        match (&self.0.kind, x) {
            (FieldKind::Finite { .. }, FieldElement::Fq(_)) => {
                if self.dlog(x)? % 2 == 0 {
                    Ok(self.one())
                } else {
                    Ok(self.generator().unwrap())
                }
            }
            (FieldKind::Rationals, FieldElement::Rat(r)) => Ok(FieldElement::Rat(BigRational::from_integer(self.rational_class(r)?))),
            (FieldKind::RealQuadratic(_), FieldElement::Quad(a, b)) => self.quad_square_class(a, b),
            (FieldKind::RealClosed, FieldElement::Rat(r)) => Ok(FieldElement::rat(if r.is_negative() { -1 } else { 1 })),
            (FieldKind::AlgebraicallyClosed, FieldElement::Rat(_)) => Ok(self.one()),
            _ => Err(FieldError::FieldMismatch),
        }
    }

    pub fn is_square(&self, x: &FieldElement) -> Result<bool, FieldError> {
        Ok(self.square_class(x)? == self.one())
    }

    pub fn same_square_class(&self, x: &FieldElement, y: &FieldElement) -> Result<bool, FieldError> {
        Ok(self.square_class(x)? == self.square_class(y)?)
    }

    /// All square classes, for backends where F^x/(F^x)^2 is small and explicit.
    pub fn square_class_reps(&self) -> Option<Vec<FieldElement>> {
        match &self.0.kind {
            FieldKind::Finite { .. } => Some(vec![self.one(), self.generator().unwrap()]),
            FieldKind::RealClosed => Some(vec![self.minus_one(), self.one()]),
            FieldKind::AlgebraicallyClosed => Some(vec![self.one()]),
            _ => None,
        }
    }

    // ---- orderings ----

    pub fn orderings(&self) -> Vec<Ordering> {
        let n = match &self.0.kind {
            FieldKind::Finite { .. } | FieldKind::AlgebraicallyClosed => 0,
            FieldKind::Rationals | FieldKind::RealClosed => 1,
            FieldKind::RealQuadratic(_) => 2,
        };
        (0..n).map(|index| Ordering { index, field: self.0.kind.clone() }).collect()
    }

    pub fn ordering(&self, index: usize) -> Result<Ordering, FieldError> {
        self.orderings()
            .into_iter()
            .nth(index)
            .ok_or_else(|| FieldError::OrderingMismatch(format!("{self} has no ordering a{index}")))
    }

    pub fn is_nonreal(&self) -> bool {
        self.orderings().is_empty()
    }

    /// Sign of a nonzero element at an ordering.
    pub fn sign(&self, x: &FieldElement, alpha: &Ordering) -> Result<i8, FieldError> {
        if alpha.field != self.0.kind {
            return Err(FieldError::OrderingMismatch(format!("{alpha} is not an ordering of {self}")));
        }
        if self.is_zero(x) {
            return Err(FieldError::ZeroElement);
        }
        let sg = |r: &BigRational| if r.is_negative() { -1i8 } else { 1 };
        match x {
            FieldElement::Rat(r) => Ok(sg(r)),
            FieldElement::Quad(a, b) => {
                let b = if alpha.index == 0 { b.clone() } else { -b };
                if b.is_zero() {
                    return Ok(sg(a));
                }
                if a.is_zero() || sg(a) == sg(&b) {
                    return Ok(sg(&b));
                }
                let d = rat(self.quad_d().unwrap() as i64);
                if a * a > &b * &b * d {
                    Ok(sg(a))
                } else {
                    Ok(sg(&b))
                }
            }
            FieldElement::Fq(_) => Err(FieldError::FieldMismatch),
        }
    }

    pub fn is_positive(&self, x: &FieldElement, alpha: &Ordering) -> Result<bool, FieldError> {
        Ok(self.sign(x, alpha)? > 0)
    }

    /// Unit family used to write down generators of Thornton primes: -1, the
    /// truncation primes, and the extra irrational units of Q(sqrt(d)).
    pub fn unit_family(&self, primes: &[u64]) -> Vec<FieldElement> {
        let mut out = vec![self.minus_one()];
        match &self.0.kind {
            FieldKind::Finite { .. } => {
                let g = self.generator().unwrap();
                if !g.is_minus_one(self) && g != self.one() {
                    out.push(g);
                }
            }
            FieldKind::Rationals => out.extend(primes.iter().map(|p| self.from_int(*p as i64))),
            FieldKind::RealQuadratic(_) => {
                out.extend(primes.iter().map(|p| self.from_int(*p as i64)));
                out.push(FieldElement::Quad(rat(0), rat(1)));
                out.push(FieldElement::Quad(rat(1), rat(1)));
            }
            FieldKind::RealClosed | FieldKind::AlgebraicallyClosed => out.push(self.from_int(2)),
        }
        out
    }

    // ---- rendering ----

    pub fn render(&self, x: &FieldElement) -> String {
        match x {
            FieldElement::Fq(v) => {
                let d = self.fdata().unwrap();
                if d.k == 1 || *v == 0 {
                    v.to_string()
                } else {
                    let l = d.log[*v as usize];
                    if l == 0 {
                        "1".to_string()
                    } else {
                        format!("g^{l}")
                    }
                }
            }
            FieldElement::Rat(r) => r.to_string(),
            FieldElement::Quad(a, b) => {
                let d = self.quad_d().unwrap();
                let coef = |b: &BigRational| -> String {
                    if b.is_one() {
                        format!("sqrt({d})")
                    } else if b == &-BigRational::one() {
                        format!("-sqrt({d})")
                    } else {
                        format!("{b}*sqrt({d})")
                    }
                };
                if b.is_zero() {
                    a.to_string()
                } else if a.is_zero() {
                    coef(b)
                } else {
                    let c = coef(b);
                    if c.starts_with('-') {
                        format!("{a}{c}")
                    } else {
                        format!("{a}+{c}")
                    }
                }
            }
        }
    }

    /// Rational value of an element that lies in Q, if it does.
    pub fn as_rational(&self, x: &FieldElement) -> Option<BigRational> {
        match x {
            FieldElement::Rat(r) => Some(r.clone()),
            FieldElement::Quad(a, b) if b.is_zero() => Some(a.clone()),
            _ => None,
        }
    }

    /// Integer value for small integral rationals.
    pub fn as_small_int(&self, x: &FieldElement) -> Option<i64> {
        self.as_rational(x).filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_rejects_even_and_non_prime_powers() {
        assert!(Field::finite(4).is_err());
        assert!(Field::finite(6).is_err());
        assert!(Field::finite(15).is_err());
        assert!(Field::finite(9).is_ok());
    }

    #[test]
    fn real_quadratic_requires_squarefree() {
        assert!(Field::real_quadratic(8).is_err());
        assert!(Field::real_quadratic(1).is_err());
        assert!(Field::real_quadratic(6).is_ok());
    }

    #[test]
    fn f9_generator_has_full_order() {
        let f = Field::finite(9).unwrap();
        let g = f.generator().unwrap();
        let mut seen = std::collections::BTreeSet::new();
        let mut x = f.one();
        for _ in 0..8 {
            seen.insert(x.clone());
            x = f.mul(&x, &g);
        }
        assert_eq!(seen.len(), 8);
        assert_eq!(x, f.one());
    }

    #[test]
    fn fq_field_axioms_exhaustive_f9() {
        let f = Field::finite(9).unwrap();
        let els: Vec<_> = (0..9).map(FieldElement::Fq).collect();
        for a in &els {
            for b in &els {
                for c in &els {
                    let lhs = f.mul(a, &f.add(b, c));
                    let rhs = f.add(&f.mul(a, b), &f.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
            if !f.is_zero(a) {
                assert_eq!(f.mul(a, &f.inv(a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn square_class_examples() {
        let q = Field::rationals();
        assert_eq!(q.square_class(&FieldElement::rat(-18)).unwrap(), FieldElement::rat(-2));
        let f5 = Field::finite(5).unwrap();
        let c = f5.square_class(&FieldElement::Fq(3)).unwrap();
        assert!(!f5.is_square(&c).unwrap());
        assert_eq!(c, FieldElement::Fq(2));
        let c = Field::algebraically_closed();
        assert_eq!(c.square_class(&FieldElement::rat(-7)).unwrap(), c.one());
        assert_eq!(q.square_class(&q.zero()), Err(FieldError::ZeroElement));
    }

    #[test]
    fn quadratic_square_classes() {
        let k = Field::real_quadratic(2).unwrap();
        // 2 is a square, and 3 ~ 6
        assert_eq!(k.square_class(&k.from_int(2)).unwrap(), k.one());
        assert_eq!(k.square_class(&k.from_int(6)).unwrap(), k.square_class(&k.from_int(3)).unwrap());
        // (1+sqrt2)^2 * 5 ~ 5
        let u = k.quad(rat(1), rat(1)).unwrap();
        let x = k.mul(&k.mul(&u, &u), &k.from_int(5));
        assert_eq!(k.square_class(&x).unwrap(), k.square_class(&k.from_int(5)).unwrap());
        // sqrt2 has norm -2, no rational representative; invariance under squares
        let s = k.quad(rat(0), rat(1)).unwrap();
        let s9 = k.mul(&s, &k.from_int(9));
        assert_eq!(k.square_class(&s).unwrap(), k.square_class(&s9).unwrap());
        let w = k.mul(&s, &k.mul(&u, &u));
        assert_eq!(k.square_class(&s).unwrap(), k.square_class(&w).unwrap());
    }

    #[test]
    fn orderings_census() {
        assert!(Field::finite(3).unwrap().orderings().is_empty());
        assert_eq!(Field::rationals().orderings().len(), 1);
        assert_eq!(Field::real_quadratic(2).unwrap().orderings().len(), 2);
        assert!(Field::algebraically_closed().is_nonreal());
        assert!(!Field::real_closed().is_nonreal());
        assert!(Field::finite(5).unwrap().is_nonreal());
    }

    #[test]
    fn positivity_examples() {
        let q = Field::rationals();
        let a0 = q.ordering(0).unwrap();
        let x = q.from_rational(BigRational::new(3.into(), 7.into())).unwrap();
        assert!(q.is_positive(&x, &a0).unwrap());
        let k = Field::real_quadratic(2).unwrap();
        let ap = k.ordering(0).unwrap();
        let am = k.ordering(1).unwrap();
        let y = k.quad(rat(1), rat(-1)).unwrap();
        assert!(!k.is_positive(&y, &ap).unwrap());
        assert!(k.is_positive(&y, &am).unwrap());
        let r = Field::real_closed();
        assert!(!r.is_positive(&FieldElement::rat(-4), &r.ordering(0).unwrap()).unwrap());
        assert!(matches!(k.is_positive(&y, &a0), Err(FieldError::OrderingMismatch(_))));
    }

    #[test]
    fn render_quadratic() {
        let k = Field::real_quadratic(2).unwrap();
        assert_eq!(k.render(&k.quad(rat(1), rat(-1)).unwrap()), "1-sqrt(2)");
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(k.render(&k.quad(half.clone(), rat(3)).unwrap()), "1/2+3*sqrt(2)");
        assert_eq!(k.render(&k.quad(rat(0), half).unwrap()), "1/2*sqrt(2)");
    }
}
