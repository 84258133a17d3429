//! Milnor-Witt K-theory of a field: monomials eta^k [u1]...[um], the rewrite
//! normal form, equality through the Milnor and Witt images, and the
//! classical quotients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;
use crate::field::{Field, FieldElement, FieldError, FieldKind};
use crate::gw::{GwElement, GwError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MwError {
    #[error("elements over different fields")]
    FieldMismatch,
    #[error("element is not homogeneous")]
    NonHomogeneous,
    #[error("element has nonzero degree {0}")]
    NonZeroDegree(i64),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("coefficient too large for the Witt-side computation")]
    Overflow,
    #[error("Witt class of degree {0} does not lie in the expected power of I")]
    Filtration(i64),
    #[error(transparent)]
    Gw(#[from] GwError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A symbol [u]; the flag makes [-1] sort before every other symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    not_minus_one: bool,
    value: FieldElement,
}

impl Symbol {
    pub fn new(field: &Field, value: FieldElement) -> Symbol {
        Symbol { not_minus_one: !value.is_minus_one(field), value }
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    pub fn is_minus_one(&self) -> bool {
        !self.not_minus_one
    }
}

/// eta^k [u1]...[um] without coefficient. Ordered by (degree, eta power, symbols).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    degree: i64,
    eta: u32,
    symbols: Vec<Symbol>,
}

impl Monomial {
    pub fn new(eta: u32, symbols: Vec<Symbol>) -> Monomial {
        Monomial { degree: symbols.len() as i64 - eta as i64, eta, symbols }
    }

    pub fn unit() -> Monomial {
        Monomial::new(0, vec![])
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn eta_power(&self) -> u32 {
        self.eta
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut s = self.symbols.clone();
        s.extend(other.symbols.iter().cloned());
        Monomial::new(self.eta + other.eta, s)
    }

    fn with_symbols(&self, eta: u32, symbols: Vec<Symbol>) -> Monomial {
        Monomial::new(eta, symbols)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqVerdict {
    Equal,
    Distinct,
    EqualModuloDivisible,
}

impl fmt::Display for EqVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EqVerdict::Equal => "Equal",
            EqVerdict::Distinct => "Distinct",
            EqVerdict::EqualModuloDivisible => "EqualModuloDivisible",
        };
        write!(f, "{s}")
    }
}

/// Three-valued answer of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Zero,
    NonZero,
    Unknown,
}

impl Decision {
    fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::NonZero, _) | (_, Decision::NonZero) => Decision::NonZero,
            (Decision::Zero, Decision::Zero) => Decision::Zero,
            _ => Decision::Unknown,
        }
    }
}

/// Finite integer combination of monomials over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwElement {
    field: Field,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MwElement {
    pub fn zero(field: &Field) -> MwElement {
        MwElement { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn integer(field: &Field, n: i64) -> MwElement {
        MwElement::monomial(field, BigInt::from(n), Monomial::unit())
    }

    pub fn monomial(field: &Field, c: BigInt, m: Monomial) -> MwElement {
        let mut e = MwElement::zero(field);
        e.add_term(m, c);
        e
    }

    pub fn eta(field: &Field) -> MwElement {
        MwElement::monomial(field, BigInt::one(), Monomial::new(1, vec![]))
    }

    pub fn symbol(field: &Field, u: FieldElement) -> Result<MwElement, MwError> {
        if field.is_zero(&u) {
            return Err(FieldError::ZeroElement.into());
        }
        if !field.contains_element(&u) {
            return Err(MwError::FieldMismatch);
        }
        Ok(MwElement::monomial(field, BigInt::one(), Monomial::new(0, vec![Symbol::new(field, u)])))
    }

    /// h = 2 + [-1] eta.
    pub fn h(field: &Field) -> MwElement {
        let m = Monomial::new(1, vec![Symbol::new(field, field.minus_one())]);
        MwElement::integer(field, 2).add_unchecked(&MwElement::monomial(field, BigInt::one(), m))
    }

    /// eps = -(1 + [-1] eta).
    pub fn eps(field: &Field) -> MwElement {
        let m = Monomial::new(1, vec![Symbol::new(field, field.minus_one())]);
        MwElement::integer(field, -1).add_unchecked(&MwElement::monomial(field, -BigInt::one(), m))
    }

    /// <u> = 1 + eta [u].
    pub fn bracket(field: &Field, u: FieldElement) -> Result<MwElement, MwError> {
        let e = MwElement::eta(field).mul(&MwElement::symbol(field, u)?)?;
        Ok(MwElement::integer(field, 1).add_unchecked(&e))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn add_unchecked(&self, other: &MwElement) -> MwElement {
        let mut e = self.clone();
        for (m, c) in &other.terms {
            e.add_term(m.clone(), c.clone());
        }
        e
    }

    fn check(&self, other: &MwElement) -> Result<(), MwError> {
        if self.field != other.field {
            Err(MwError::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &MwElement) -> Result<MwElement, MwError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn neg(&self) -> MwElement {
        self.scale(&-BigInt::one())
    }

    pub fn sub(&self, other: &MwElement) -> Result<MwElement, MwError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> MwElement {
        let mut e = MwElement::zero(&self.field);
        for (m, d) in &self.terms {
            e.add_term(m.clone(), c * d);
        }
        e
    }

    /// Product; eta is central, so monomials multiply by concatenation.
    pub fn mul(&self, other: &MwElement) -> Result<MwElement, MwError> {
        self.check(other)?;
        let mut e = MwElement::zero(&self.field);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                e.add_term(m.times(n), c * d);
            }
        }
        Ok(e)
    }

    pub fn pow(&self, n: u32) -> MwElement {
        let mut acc = MwElement::integer(&self.field, 1);
        for _ in 0..n {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Common degree, or None for the zero element.
    pub fn degree(&self) -> Result<Option<i64>, MwError> {
        let mut d = None;
        for m in self.terms.keys() {
            match d {
                None => d = Some(m.degree),
                Some(x) if x != m.degree => return Err(MwError::NonHomogeneous),
                _ => {}
            }
        }
        Ok(d)
    }

    /// Homogeneous components by degree.
    pub fn components(&self) -> BTreeMap<i64, MwElement> {
        let mut out: BTreeMap<i64, MwElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree).or_insert_with(|| MwElement::zero(&self.field)).add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            match m.eta {
                0 => {}
                1 => factors.push("eta".to_string()),
                k => factors.push(format!("eta^{k}")),
            }
            for s in &m.symbols {
                factors.push(format!("[{}]", self.field.render(&s.value)));
            }
            let a = c.abs();
            let body = if factors.is_empty() {
                a.to_string()
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{a}*{}", factors.join("*"))
            };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for MwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

// ---- normalization ----

/// Representative used once eta is present, where only the square class
/// of a symbol matters: 1, -1, or the canonical square-class representative.
fn mw_rep(field: &Field, u: &FieldElement) -> Option<FieldElement> {
    let c = field.square_class(u).ok()?;
    if c == field.one() {
        return Some(field.one());
    }
    if c == field.square_class(&field.minus_one()).ok()? {
        return Some(field.minus_one());
    }
    Some(c)
}

enum Split {
    /// u = a * b with a an atom
    Product(FieldElement, FieldElement),
    /// u = 1/p
    Reciprocal(FieldElement),
}

fn atomize(field: &Field, u: &FieldElement) -> Option<Split> {
    let mk = |r: BigRational| -> FieldElement {
        match u {
            FieldElement::Quad(..) => FieldElement::Quad(r, BigRational::zero()),
            _ => FieldElement::Rat(r),
        }
    };
    let r = match (field.kind(), u) {
        (FieldKind::Finite { .. }, _) => {
            if u.is_minus_one(field) {
                return None;
            }
            let l = field.dlog(u).ok()?;
            if l <= 1 {
                return None;
            }
            let g = field.generator()?;
            return Some(Split::Product(g.clone(), field.gen_pow(l as i64 - 1).ok()?));
        }
        (_, FieldElement::Rat(r)) => r.clone(),
        (_, FieldElement::Quad(a, b)) if b.is_zero() => a.clone(),
        _ => return None,
    };
    let one = BigRational::one();
    if r == one || r == -one.clone() {
        return None;
    }
    if r.is_negative() {
        return Some(Split::Product(mk(-one), mk(-r)));
    }
    let bound = field.factor_bound();
    let num = arith::to_u128(r.numer())?;
    let den = arith::to_u128(r.denom())?;
    let fnum = arith::factor(num, bound)?;
    let fden = arith::factor(den, bound)?;
    if num == 1 && fden.len() == 1 && fden[0].1 == 1 {
        return Some(Split::Reciprocal(mk(BigRational::from_integer(BigInt::from(den)))));
    }
    if den == 1 && fnum.len() == 1 && fnum[0].1 == 1 {
        return None;
    }
    let a = if let Some((p, _)) = fnum.first() {
        BigRational::from_integer(BigInt::from(*p))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(fden[0].0))
    };
    let b = &r / &a;
    if num == 1 {
        // a = 1/p is not an atom; expand it next round
        return Some(Split::Product(mk(a), mk(b)));
    }
    Some(Split::Product(mk(a), mk(b)))
}

/// One rewrite step on a monomial: None if no rule applies, otherwise the
/// replacement terms as (multiplier, monomial).
fn step(field: &Field, m: &Monomial) -> Option<Vec<(i64, Monomial)>> {
    let one = field.one();
    let s = &m.symbols;
    let k = m.eta;
    // [1] = 0
    if s.iter().any(|x| x.value == one) {
        return Some(vec![]);
    }
    // Steinberg and [u][-u] = 0
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let (a, b) = (&s[i].value, &s[j].value);
            if field.add(a, b) == one || *a == field.neg(b) {
                return Some(vec![]);
            }
        }
    }
    // with eta present only square classes matter
    if k >= 1 {
        for i in 0..s.len() {
            if let Some(r) = mw_rep(field, &s[i].value) {
                if r != s[i].value {
                    let mut t = s.clone();
                    t[i] = Symbol::new(field, r);
                    return Some(vec![(1, m.with_symbols(k, t))]);
                }
            }
        }
    }
    // [-1][c^2 v] = [-1][v], in any position
    if let Some(i) = s.iter().position(|x| x.is_minus_one()) {
        for j in (0..s.len()).filter(|&j| j != i) {
            if let Some(r) = mw_rep(field, &s[j].value) {
                if r != s[j].value {
                    let mut t = s.clone();
                    t[j] = Symbol::new(field, r);
                    return Some(vec![(1, m.with_symbols(k, t))]);
                }
            }
        }
    }
    // [u][u] = [-1][u]
    for i in 0..s.len().saturating_sub(1) {
        if s[i] == s[i + 1] && !s[i].is_minus_one() {
            let mut t = s.clone();
            t[i] = Symbol::new(field, field.minus_one());
            return Some(vec![(1, m.with_symbols(k, t))]);
        }
    }
    // eta [-1] eta = -2 eta and eta [-1][-1] = -2 [-1]
    let nm = s.iter().filter(|x| x.is_minus_one()).count() as u32;
    if k >= 1 && nm >= 1 && k + nm >= 3 {
        let mut t = s.clone();
        let pos = t.iter().position(|x| x.is_minus_one()).unwrap();
        t.remove(pos);
        return Some(vec![(-2, m.with_symbols(k - 1, t))]);
    }
    // sorting: free once eta is present, otherwise ab = eps ba
    if k >= 1 {
        if s.windows(2).any(|w| w[0] > w[1]) {
            let mut t = s.clone();
            t.sort();
            return Some(vec![(1, m.with_symbols(k, t))]);
        }
    } else if let Some(i) = (0..s.len().saturating_sub(1)).find(|&i| s[i] > s[i + 1]) {
        let mut t = s.clone();
        t.swap(i, i + 1);
        let mut u = vec![Symbol::new(field, field.minus_one())];
        u.extend(t.iter().cloned());
        return Some(vec![(-1, m.with_symbols(0, t)), (-1, m.with_symbols(1, u))]);
    }
    // twisted logarithm [ab] = [a] + [b] + eta[a][b]
    for i in 0..s.len() {
        match atomize(field, &s[i].value) {
            None => {}
            Some(Split::Product(a, b)) => {
                let mut ta = s.clone();
                ta[i] = Symbol::new(field, a.clone());
                let mut tb = s.clone();
                tb[i] = Symbol::new(field, b.clone());
                let mut tab = s[..i].to_vec();
                tab.push(Symbol::new(field, a));
                tab.push(Symbol::new(field, b));
                tab.extend(s[i + 1..].iter().cloned());
                return Some(vec![
                    (1, m.with_symbols(k, ta)),
                    (1, m.with_symbols(k, tb)),
                    (1, m.with_symbols(k + 1, tab)),
                ]);
            }
            Some(Split::Reciprocal(p)) => {
                // [1/p] = -[p] - eta[p][p]
                let mut tp = s.clone();
                tp[i] = Symbol::new(field, p.clone());
                let mut tpp = s[..i].to_vec();
                tpp.push(Symbol::new(field, p.clone()));
                tpp.push(Symbol::new(field, p));
                tpp.extend(s[i + 1..].iter().cloned());
                return Some(vec![(-1, m.with_symbols(k, tp)), (-1, m.with_symbols(k + 1, tpp))]);
            }
        }
    }
    None
}

fn to_i128(c: &BigInt) -> Result<i128, MwError> {
    c.to_i128().ok_or(MwError::Overflow)
}

/// prod (<u_i> - 1) in GW(F).
fn pfister_product(field: &Field, symbols: &[Symbol]) -> Result<GwElement, MwError> {
    let mut acc = GwElement::one(field);
    for s in symbols {
        let f = GwElement::class(field, &s.value)?.sub(&GwElement::one(field));
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// Witt-side class of an element: sum of c * prod(<u_i> - 1), ignoring eta.
fn witt_image(e: &MwElement) -> Result<GwElement, MwError> {
    let mut acc = GwElement::zero(&e.field);
    for (m, c) in &e.terms {
        acc = acc.add(&pfister_product(&e.field, &m.symbols)?.scale(to_i128(c)?));
    }
    Ok(acc)
}

fn fq_rebuild(e: &MwElement) -> Result<MwElement, MwError> {
    let f = &e.field;
    let q = f.order().unwrap();
    let g = f.generator().unwrap();
    let g_sym = Symbol::new(f, g.clone());
    let ns = if q % 4 == 3 { Symbol::new(f, f.minus_one()) } else { g_sym.clone() };
    let mut out = MwElement::zero(f);
    for (n, comp) in e.components() {
        if n >= 2 {
            continue;
        }
        if n == 1 {
            let mut c = BigInt::zero();
            for (m, coef) in &comp.terms {
                if m.eta == 0 {
                    c += coef * BigInt::from(f.dlog(&m.symbols[0].value)?);
                }
            }
            let c = c.mod_floor(&BigInt::from(q - 1));
            out.add_term(Monomial::new(0, vec![g_sym.clone()]), c);
            continue;
        }
        let w = witt_image(&comp)?;
        let coef = |key: &FieldElement| w.terms().find(|(k, _)| *k == key).map(|(_, c)| *c).unwrap_or(0);
        let (a, b) = (coef(&f.one()), coef(&g));
        if n == 0 {
            let r: BigInt = comp.terms.iter().filter(|(m, _)| m.symbols.is_empty()).map(|(_, c)| c.clone()).sum();
            out.add_term(Monomial::unit(), r);
            out.add_term(Monomial::new(1, vec![ns.clone()]), BigInt::from(b.rem_euclid(2)));
        } else {
            let k = (-n) as u32;
            if q % 4 == 1 {
                out.add_term(Monomial::new(k, vec![]), BigInt::from((a + b).rem_euclid(2)));
                out.add_term(Monomial::new(k + 1, vec![g_sym.clone()]), BigInt::from(b.rem_euclid(2)));
            } else {
                out.add_term(Monomial::new(k, vec![]), BigInt::from((a - b).rem_euclid(4)));
            }
        }
    }
    Ok(out)
}

impl MwElement {
    /// Normal form under the rewrite system. Over finite fields the result is
    /// the canonical representative of each homogeneous component.
    pub fn normalize(&self) -> MwElement {
        let f = &self.field;
        if let FieldKind::Finite { .. } = f.kind() {
            return fq_rebuild(self).expect("finite field symbols are always reducible");
        }
        let mut out = MwElement::zero(f);
        let mut work: Vec<(Monomial, BigInt)> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        while let Some((m, c)) = work.pop() {
            match step(f, &m) {
                None => out.add_term(m, c),
                Some(rep) => {
                    for (k, n) in rep {
                        work.push((n, &c * BigInt::from(k)));
                    }
                }
            }
        }
        if let FieldKind::AlgebraicallyClosed = f.kind() {
            // W(C) = Z/2, so 2 eta^k = 0 for k >= 1
            let mut red = MwElement::zero(f);
            for (m, c) in out.terms {
                if m.eta >= 1 && m.symbols.is_empty() {
                    red.add_term(m, c.mod_floor(&BigInt::from(2)));
                } else {
                    red.add_term(m, c);
                }
            }
            out = red;
        }
        out
    }

    /// Equality decided componentwise through the Milnor and Witt images.
    pub fn eq_verdict(&self, other: &MwElement) -> Result<EqVerdict, MwError> {
        self.check(other)?;
        let d = self.sub(other)?.normalize();
        let mut v = Decision::Zero;
        for (n, comp) in d.components() {
            v = v.and(decide_zero(&comp, n));
        }
        Ok(match v {
            Decision::Zero => EqVerdict::Equal,
            Decision::NonZero => EqVerdict::Distinct,
            Decision::Unknown => EqVerdict::EqualModuloDivisible,
        })
    }

    /// Image in Milnor K-theory (eta = 0).
    pub fn mod_eta(&self) -> MilnorElement {
        let n = self.normalize();
        let terms = n
            .terms
            .into_iter()
            .filter(|(m, _)| m.eta == 0)
            .map(|(m, c)| (m.symbols, c))
            .collect();
        MilnorElement { field: self.field.clone(), terms }
    }

    /// Image in W(F)[eta, eta^-1]: a Witt class and the eta-exponent.
    pub fn invert_eta(&self) -> Result<WittLaurent, MwError> {
        let d = self.degree()?.unwrap_or(0);
        Ok(WittLaurent { class: witt_image(self)?, eta_exponent: -d })
    }

    /// Image in Witt K-theory: degree n and a Witt class in I^n.
    pub fn mod_h(&self) -> Result<WittKElement, MwError> {
        let d = self.degree()?.unwrap_or(0);
        let w = witt_image(self)?;
        let class = if d.rem_euclid(2) == 1 { w.scale(-1) } else { w };
        if d >= 1 {
            match class.in_fundamental_power(d) {
                Ok(true) => {}
                Ok(false) => return Err(MwError::Filtration(d)),
                Err(GwError::UnsupportedDepth(_)) | Err(GwError::UnsupportedEntries(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(WittKElement { degree: d, class })
    }

    /// Image in Z[[-1], [-1]^-1] for real closed fields, with eta = -2[-1]^-1.
    pub fn invert_minus_one(&self) -> Result<MinusOneLaurent, MwError> {
        if *self.field.kind() != FieldKind::RealClosed {
            return Err(MwError::UnsupportedField(format!("{} is not real closed", self.field)));
        }
        let w = self.mod_h()?;
        let alpha = self.field.ordering(0)?;
        let s = BigInt::from(w.class.signature(&alpha)?);
        let n = w.degree;
        let coeff = if n >= 0 {
            let den = BigInt::one() << (n as usize);
            debug_assert!((&s % &den).is_zero());
            s / den
        } else {
            s << ((-n) as usize)
        };
        Ok(MinusOneLaurent { coeff, exponent: n })
    }

    /// Degree-zero part as an element of GW(F) via eta^n[u1]...[un] -> prod(<ui> - 1).
    pub fn degree0_to_gw(&self) -> Result<GwElement, MwError> {
        for m in self.terms.keys() {
            if m.degree != 0 {
                return Err(MwError::NonZeroDegree(m.degree));
            }
        }
        witt_image(self)
    }
}

fn sign_all_negative(field: &Field, s: &[Symbol], alpha: &crate::field::Ordering) -> Option<bool> {
    let mut all = true;
    for x in s {
        if field.sign(&x.value, alpha).ok()? > 0 {
            all = false;
        }
    }
    Some(all)
}

/// Real symbol of a Milnor element at an ordering: the parity of the
/// coefficients of the monomials whose symbols are all negative.
fn real_symbol(field: &Field, terms: &[(&Vec<Symbol>, &BigInt)], alpha: &crate::field::Ordering) -> Option<bool> {
    let mut acc = BigInt::zero();
    for (s, c) in terms {
        if sign_all_negative(field, s, alpha)? {
            acc += *c;
        }
    }
    Some(acc.is_odd())
}

/// Exact product prod u^c of a degree-one Milnor element.
fn milnor1_trivial(field: &Field, terms: &[(&Vec<Symbol>, &BigInt)]) -> Option<bool> {
    if let FieldKind::Finite { .. } = field.kind() {
        let q = field.order()?;
        let mut t = BigInt::zero();
        for (s, c) in terms {
            t += *c * BigInt::from(field.dlog(&s[0].value).ok()?);
        }
        return Some(t.mod_floor(&BigInt::from(q - 1)).is_zero());
    }
    let mut acc = field.one();
    for (s, c) in terms {
        let e = c.to_i64()?;
        acc = field.mul(&acc, &field.pow(&s[0].value, e).ok()?);
    }
    Some(acc == field.one())
}

/// Tame symbols at odd primes and the real symbol decide K_2(Q).
fn milnor2_rational(field: &Field, terms: &[(&Vec<Symbol>, &BigInt)]) -> Decision {
    let alpha = field.ordering(0).unwrap();
    match real_symbol(field, terms, &alpha) {
        Some(true) => return Decision::NonZero,
        Some(false) => {}
        None => return Decision::Unknown,
    }
    let mut rats = Vec::new();
    let mut primes = std::collections::BTreeSet::new();
    for (s, c) in terms {
        let a = field.as_rational(&s[0].value);
        let b = field.as_rational(&s[1].value);
        let (Some(a), Some(b)) = (a, b) else { return Decision::Unknown };
        for x in [&a, &b] {
            for n in [x.numer(), x.denom()] {
                let Some(v) = arith::to_u128(n) else { return Decision::Unknown };
                let Some(fs) = arith::factor(v, field.factor_bound()) else { return Decision::Unknown };
                primes.extend(fs.into_iter().map(|(p, _)| p));
            }
        }
        rats.push((a, b, (*c).clone()));
    }
    for p in primes {
        if p == 2 {
            continue;
        }
        let Ok(p) = u64::try_from(p) else { return Decision::Unknown };
        let mut acc: u64 = 1;
        for (a, b, c) in &rats {
            let (al, ua) = split_val(a, p);
            let (be, ub) = split_val(b, p);
            // (-1)^(al*be) a'^be / b'^al mod p
            let mut t = arith::pow_mod(arith::rat_mod_p(&ua, p), be.rem_euclid(p as i64 - 1) as u64, p);
            let binv = arith::pow_mod(arith::rat_mod_p(&ub, p), p - 2, p);
            t = ((t as u128 * arith::pow_mod(binv, al.rem_euclid(p as i64 - 1) as u64, p) as u128) % p as u128) as u64;
            if (al * be).rem_euclid(2) == 1 {
                t = (p - t) % p;
            }
            let e = c.mod_floor(&BigInt::from(p - 1)).to_u64().unwrap();
            acc = ((acc as u128 * arith::pow_mod(t, e, p) as u128) % p as u128) as u64;
        }
        if acc != 1 {
            return Decision::NonZero;
        }
    }
    Decision::Zero
}

fn split_val(x: &BigRational, p: u64) -> (i64, BigRational) {
    let vn = arith::valuation(x.numer(), p) as i64;
    let vd = arith::valuation(x.denom(), p) as i64;
    let pp = BigInt::from(p);
    let num = x.numer() / num_traits::pow(pp.clone(), vn as usize);
    let den = x.denom() / num_traits::pow(pp, vd as usize);
    (vn - vd, BigRational::new(num, den))
}

fn milnor_decision(field: &Field, n: i64, comp: &MwElement) -> Decision {
    let terms: Vec<(&Vec<Symbol>, &BigInt)> =
        comp.terms.iter().filter(|(m, _)| m.eta == 0).map(|(m, c)| (&m.symbols, c)).collect();
    if n < 0 || terms.is_empty() {
        return Decision::Zero;
    }
    let yes_no = |b: Option<bool>| match b {
        Some(true) => Decision::Zero,
        Some(false) => Decision::NonZero,
        None => Decision::Unknown,
    };
    if n == 0 {
        let c: BigInt = terms.iter().map(|(_, c)| (*c).clone()).sum();
        return if c.is_zero() { Decision::Zero } else { Decision::NonZero };
    }
    if n == 1 {
        return yes_no(milnor1_trivial(field, &terms));
    }
    let all_signs = |terms: &[(&Vec<Symbol>, &BigInt)]| -> Option<bool> {
        for a in field.orderings() {
            if real_symbol(field, terms, &a)? {
                return Some(false);
            }
        }
        Some(true)
    };
    match field.kind() {
        FieldKind::Finite { .. } => Decision::Zero,
        FieldKind::Rationals if n == 2 => milnor2_rational(field, &terms),
        FieldKind::Rationals => yes_no(all_signs(&terms)),
        FieldKind::RealQuadratic(_) if n >= 3 => yes_no(all_signs(&terms)),
        FieldKind::RealQuadratic(_) | FieldKind::RealClosed => match all_signs(&terms) {
            Some(false) => Decision::NonZero,
            None => Decision::Unknown,
            Some(true) => {
                let torsion_only = *field.kind() == FieldKind::RealClosed
                    && terms.iter().all(|(s, _)| s.iter().all(|x| x.is_minus_one()));
                if torsion_only {
                    Decision::Zero
                } else {
                    Decision::Unknown
                }
            }
        },
        FieldKind::AlgebraicallyClosed => Decision::Unknown,
    }
}

fn witt_decision(comp: &MwElement) -> Decision {
    match witt_image(comp).map_err(|_| ()).and_then(|w| w.witt_is_zero().map_err(|_| ())) {
        Ok(true) => Decision::Zero,
        Ok(false) => Decision::NonZero,
        Err(()) => Decision::Unknown,
    }
}

/// Zero test for a normalized homogeneous component of degree n, using that
/// K^MW_n embeds into K^M_n x I^n (and into W for n < 0).
pub fn decide_zero(comp: &MwElement, n: i64) -> Decision {
    if comp.is_formally_zero() {
        return Decision::Zero;
    }
    milnor_decision(&comp.field, n, comp).and(witt_decision(comp))
}

/// Element of Milnor K-theory: formal sum of symbols {u1,...,un}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorElement {
    field: Field,
    terms: BTreeMap<Vec<Symbol>, BigInt>,
}

impl MilnorElement {
    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn decide_zero(&self) -> Decision {
        let mut v = Decision::Zero;
        let mut by_deg: BTreeMap<usize, MwElement> = BTreeMap::new();
        for (s, c) in &self.terms {
            by_deg
                .entry(s.len())
                .or_insert_with(|| MwElement::zero(&self.field))
                .add_term(Monomial::new(0, s.clone()), c.clone());
        }
        for (n, comp) in by_deg {
            v = v.and(milnor_decision(&self.field, n as i64, &comp));
        }
        v
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| {
                let syms: Vec<String> = s.iter().map(|x| self.field.render(&x.value)).collect();
                format!("{c}*{{{}}}", syms.join(","))
            })
            .collect();
        parts.join(" + ")
    }
}

/// Witt class times eta^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittLaurent {
    pub class: GwElement,
    pub eta_exponent: i64,
}

impl WittLaurent {
    pub fn is_zero(&self) -> Result<bool, GwError> {
        self.class.witt_is_zero()
    }

    pub fn render(&self) -> String {
        format!("({})*eta^{}", self.class.render(), self.eta_exponent)
    }
}

/// Element of K^W_n = I^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittKElement {
    pub degree: i64,
    pub class: GwElement,
}

impl WittKElement {
    pub fn render(&self) -> String {
        format!("degree {}: {}", self.degree, self.class.render())
    }
}

/// c * [-1]^e in Z[[-1], [-1]^-1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinusOneLaurent {
    pub coeff: BigInt,
    pub exponent: i64,
}

impl MinusOneLaurent {
    pub fn render(&self) -> String {
        if self.coeff.is_zero() {
            "0".into()
        } else {
            format!("{}*[-1]^{}", self.coeff, self.exponent)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn backends() -> Vec<Field> {
        vec![
            Field::finite(3).unwrap(),
            Field::finite(5).unwrap(),
            Field::finite(9).unwrap(),
            Field::rationals(),
            Field::real_quadratic(2).unwrap(),
            Field::real_closed(),
            Field::algebraically_closed(),
        ]
    }

    fn sym(f: &Field, n: i64) -> MwElement {
        MwElement::symbol(f, f.from_int(n)).unwrap()
    }

    #[test]
    fn degrees() {
        let q = Field::rationals();
        assert_eq!(MwElement::eta(&q).degree().unwrap(), Some(-1));
        assert_eq!(sym(&q, 2).mul(&sym(&q, 3)).unwrap().degree().unwrap(), Some(2));
        assert!(MwElement::eta(&q).add(&sym(&q, 2)).unwrap().degree().is_err());
    }

    #[test]
    fn basic_identities() {
        for f in backends() {
            let eta = MwElement::eta(&f);
            let h = MwElement::h(&f);
            let eps = MwElement::eps(&f);
            assert!(h.mul(&eta).unwrap().normalize().is_formally_zero(), "{f}");
            assert_eq!(eps.mul(&eta).unwrap().normalize(), eta.normalize(), "{f}");
            let e2 = eps.mul(&eps).unwrap().sub(&MwElement::integer(&f, 1)).unwrap();
            assert!(e2.normalize().is_formally_zero(), "{f}");
            assert!(MwElement::symbol(&f, f.one()).unwrap().normalize().is_formally_zero());
        }
    }

    #[test]
    fn epsilon_commutativity_degree_one() {
        let q = Field::rationals();
        let (a, b) = (sym(&q, 2), sym(&q, 3));
        let lhs = a.mul(&b).unwrap();
        let rhs = MwElement::eps(&q).mul(&b).unwrap().mul(&a).unwrap();
        assert!(lhs.sub(&rhs).unwrap().normalize().is_formally_zero());
    }

    #[test]
    fn four_over_q() {
        let q = Field::rationals();
        let n = sym(&q, 4).normalize();
        assert_eq!(n, sym(&q, 2).scale(&BigInt::from(2)));
        // the unreduced expansion 2[2] + eta[2][2] is the same element
        let alt = sym(&q, 2)
            .scale(&BigInt::from(2))
            .add(&MwElement::eta(&q).mul(&sym(&q, 2)).unwrap().mul(&sym(&q, 2)).unwrap())
            .unwrap();
        assert_eq!(alt.normalize(), n);
    }

    #[test]
    fn eq_examples() {
        let f5 = Field::finite(5).unwrap();
        let x = sym(&f5, 2).mul(&sym(&f5, 3)).unwrap();
        assert_eq!(x.eq_verdict(&MwElement::zero(&f5)).unwrap(), EqVerdict::Equal);
        let r = Field::real_closed();
        let y = sym(&r, -1).mul(&sym(&r, -1)).unwrap();
        assert_eq!(y.eq_verdict(&MwElement::zero(&r)).unwrap(), EqVerdict::Distinct);
        let q = Field::rationals();
        let hn = MwElement::h(&q).mul(&MwElement::eta(&q)).unwrap();
        assert_eq!(hn.eq_verdict(&MwElement::zero(&q)).unwrap(), EqVerdict::Equal);
        // {2,3} is nonzero in K_2(Q): tame symbol at 3 is 2 mod 3
        assert_eq!(sym(&q, 2).mul(&sym(&q, 3)).unwrap().eq_verdict(&MwElement::zero(&q)).unwrap(), EqVerdict::Distinct);
        // {2,-1} = 0 since 2 + (-1) = 1
        assert_eq!(sym(&q, 2).mul(&sym(&q, -1)).unwrap().eq_verdict(&MwElement::zero(&q)).unwrap(), EqVerdict::Equal);
        // [6] = [2] + [3] + eta[2][3]
        let lhs = sym(&q, 6);
        let rhs = sym(&q, 2)
            .add(&sym(&q, 3))
            .unwrap()
            .add(&MwElement::eta(&q).mul(&sym(&q, 2)).unwrap().mul(&sym(&q, 3)).unwrap())
            .unwrap();
        assert_eq!(lhs.eq_verdict(&rhs).unwrap(), EqVerdict::Equal);
        assert_eq!(sym(&q, 2).eq_verdict(&sym(&q, 3)).unwrap(), EqVerdict::Distinct);
    }

    #[test]
    fn fq_canonical_forms() {
        let f5 = Field::finite(5).unwrap();
        // [4] = [2^2] = 2[2] in K^M_1(F5) = F5^x
        assert_eq!(sym(&f5, 4).normalize(), sym(&f5, 2).scale(&BigInt::from(2)));
        // [2][2] lies in degree 2 and vanishes
        assert!(sym(&f5, 2).mul(&sym(&f5, 2)).unwrap().normalize().is_formally_zero());
        // 2 eta = 0 in W(F5) = Z/2[Z/2]
        assert!(MwElement::eta(&f5).scale(&BigInt::from(2)).normalize().is_formally_zero());
        let f3 = Field::finite(3).unwrap();
        // W(F3) = Z/4
        assert!(!MwElement::eta(&f3).scale(&BigInt::from(2)).normalize().is_formally_zero());
        assert!(MwElement::eta(&f3).scale(&BigInt::from(4)).normalize().is_formally_zero());
    }

    #[test]
    fn mod_eta_examples() {
        let q = Field::rationals();
        assert!(MwElement::eta(&q).mul(&sym(&q, 2)).unwrap().mod_eta().is_formally_zero());
        let f5 = Field::finite(5).unwrap();
        assert!(sym(&f5, 2).mul(&sym(&f5, 3)).unwrap().mod_eta().is_formally_zero());
        let r = Field::real_closed();
        let m = sym(&r, -1).mul(&sym(&r, -1)).unwrap().mod_eta();
        assert_eq!(m.decide_zero(), Decision::NonZero);
    }

    #[test]
    fn invert_eta_examples() {
        for f in backends() {
            assert!(MwElement::h(&f).invert_eta().unwrap().is_zero().unwrap());
            let e3 = MwElement::eta(&f).pow(3).invert_eta().unwrap();
            assert_eq!(e3.eta_exponent, 3);
            assert_eq!(e3.class, GwElement::one(&f));
        }
        let r = Field::real_closed();
        let x = MwElement::bracket(&r, r.from_int(-1)).unwrap().invert_eta().unwrap();
        assert_eq!(x.class.signature(&r.ordering(0).unwrap()).unwrap(), -1);
    }

    #[test]
    fn mod_h_examples() {
        let r = Field::real_closed();
        assert!(MwElement::h(&r).mod_h().unwrap().class.witt_is_zero().unwrap());
        let m = sym(&r, -1).mod_h().unwrap();
        assert_eq!((m.degree, m.class.signature(&r.ordering(0).unwrap()).unwrap()), (1, 2));
        let f3 = Field::finite(3).unwrap();
        let g = f3.generator().unwrap();
        let gg = MwElement::symbol(&f3, g.clone()).unwrap().mul(&MwElement::symbol(&f3, g).unwrap()).unwrap();
        let m = gg.mod_h().unwrap();
        assert_eq!(m.degree, 2);
        assert!(m.class.witt_is_zero().unwrap());
    }

    #[test]
    fn invert_minus_one_examples() {
        let r = Field::real_closed();
        assert_eq!(MwElement::h(&r).invert_minus_one().unwrap().coeff, BigInt::zero());
        assert_eq!(
            sym(&r, -1).invert_minus_one().unwrap(),
            MinusOneLaurent { coeff: BigInt::one(), exponent: 1 }
        );
        assert_eq!(
            MwElement::eta(&r).invert_minus_one().unwrap(),
            MinusOneLaurent { coeff: BigInt::from(-2), exponent: -1 }
        );
        assert!(MwElement::eta(&Field::rationals()).invert_minus_one().is_err());
    }

    #[test]
    fn degree_zero_to_gw() {
        let q = Field::rationals();
        let h = MwElement::h(&q).degree0_to_gw().unwrap();
        assert_eq!(h.rank(), 2);
        assert!(h.witt_is_zero().unwrap());
        let b = MwElement::bracket(&q, q.from_int(5)).unwrap().degree0_to_gw().unwrap();
        assert_eq!(b, GwElement::class(&q, &q.from_int(5)).unwrap());
        assert!(MwElement::zero(&q).degree0_to_gw().unwrap().is_formally_zero());
        assert!(sym(&q, 2).degree0_to_gw().is_err());
    }
}
