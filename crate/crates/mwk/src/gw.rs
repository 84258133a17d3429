//! Diagonal quadratic forms, their classifying invariants, Witt classes, the
//! fundamental-ideal filtration and the truncated spectrum of GW(F).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith;
use crate::comparison::{self, HomogeneousPrime};
use crate::field::{Field, FieldElement, FieldError, FieldKind};
use crate::poset::{SpectralPoset, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GwError {
    #[error("form entries must be nonzero")]
    ZeroEntry,
    #[error("forms over different fields")]
    FieldMismatch,
    #[error("unsupported entries: {0}")]
    UnsupportedEntries(String),
    #[error("fundamental ideal power {0} is not decidable for this backend")]
    UnsupportedDepth(i64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A diagonal form <a1,...,an>; the empty list is the zero form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    field: Field,
    entries: Vec<FieldElement>,
}

impl DiagonalForm {
    pub fn new(field: &Field, entries: Vec<FieldElement>) -> Result<DiagonalForm, GwError> {
        if entries.iter().any(|e| field.is_zero(e)) {
            return Err(GwError::ZeroEntry);
        }
        if entries.iter().any(|e| !field.contains_element(e)) {
            return Err(GwError::FieldMismatch);
        }
        Ok(DiagonalForm { field: field.clone(), entries })
    }

    pub fn from_ints(field: &Field, entries: &[i64]) -> Result<DiagonalForm, GwError> {
        DiagonalForm::new(field, entries.iter().map(|a| field.from_int(*a)).collect())
    }

    pub fn hyperbolic(field: &Field, copies: usize) -> DiagonalForm {
        let mut entries = Vec::new();
        for _ in 0..copies {
            entries.push(field.one());
            entries.push(field.minus_one());
        }
        DiagonalForm { field: field.clone(), entries }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn direct_sum(&self, other: &DiagonalForm) -> Result<DiagonalForm, GwError> {
        if self.field != other.field {
            return Err(GwError::FieldMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(DiagonalForm { field: self.field.clone(), entries })
    }

    pub fn tensor(&self, other: &DiagonalForm) -> Result<DiagonalForm, GwError> {
        if self.field != other.field {
            return Err(GwError::FieldMismatch);
        }
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| f.mul(a, b)))
            .collect();
        Ok(DiagonalForm { field: f.clone(), entries })
    }

    /// The form scaled by -1, the additive inverse in W(F).
    pub fn negated(&self) -> DiagonalForm {
        let f = &self.field;
        DiagonalForm { field: f.clone(), entries: self.entries.iter().map(|a| f.neg(a)).collect() }
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|e| self.field.render(e)).collect();
        format!("<{}>", parts.join(","))
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Place of Q used to index Hasse invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinite,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

/// Rank, raw discriminant, signatures per ordering and (for Q and rational
/// forms over Q(sqrt(d))) Hasse invariants at the relevant places.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwInvariants {
    pub rank: usize,
    pub disc: FieldElement,
    pub signatures: Vec<i64>,
    pub hasse: BTreeMap<Place, i8>,
}

impl GwInvariants {
    pub fn to_json(&self, field: &Field) -> Value {
        let sig: serde_json::Map<String, Value> =
            self.signatures.iter().enumerate().map(|(i, s)| (format!("a{i}"), json!(s))).collect();
        let hasse: serde_json::Map<String, Value> =
            self.hasse.iter().map(|(p, s)| (p.to_string(), json!(s))).collect();
        json!({
            "rank": self.rank,
            "disc": field.render(&self.disc),
            "signatures": sig,
            "hasse": hasse,
        })
    }
}

// ---- counted square classes ----

/// Multiset of square classes; the working representation of a form.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Counted {
    field: Field,
    classes: BTreeMap<FieldElement, u128>,
}

impl Counted {
    fn from_form(f: &DiagonalForm) -> Result<Counted, GwError> {
        let mut classes = BTreeMap::new();
        for e in &f.entries {
            *classes.entry(f.field.square_class(e)?).or_insert(0) += 1;
        }
        Ok(Counted { field: f.field.clone(), classes })
    }

    fn rank(&self) -> u128 {
        self.classes.values().sum()
    }

    fn push(&mut self, class: FieldElement, m: u128) {
        if m > 0 {
            *self.classes.entry(class).or_insert(0) += m;
        }
    }

    /// Cancel hyperbolic pairs <a> + <-a>; preserves the Witt class only.
    fn witt_reduce(&self) -> Result<Counted, GwError> {
        let f = &self.field;
        let mut c = self.classes.clone();
        let keys: Vec<FieldElement> = c.keys().cloned().collect();
        for k in keys {
            let nk = f.square_class(&f.neg(&k))?;
            if nk == k {
                // -1 is a square: <a,a> is hyperbolic
                let m = c[&k];
                c.insert(k.clone(), m % 2);
            } else if let (Some(&a), Some(&b)) = (c.get(&k), c.get(&nk)) {
                let t = a.min(b);
                c.insert(k.clone(), a - t);
                c.insert(nk.clone(), b - t);
            }
        }
        c.retain(|_, m| *m > 0);
        Ok(Counted { field: f.clone(), classes: c })
    }

    fn disc(&self) -> Result<FieldElement, GwError> {
        let f = &self.field;
        let mut d = f.one();
        for (k, m) in &self.classes {
            if m % 2 == 1 {
                d = f.square_class(&f.mul(&d, k))?;
            }
        }
        Ok(f.square_class(&d)?)
    }

    /// (-1)^(n(n-1)/2) * disc.
    fn signed_disc(&self) -> Result<FieldElement, GwError> {
        let n = self.rank();
        let d = self.disc()?;
        let f = &self.field;
        let d = if (n * n.saturating_sub(1) / 2) % 2 == 1 { f.neg(&d) } else { d };
        Ok(f.square_class(&d)?)
    }

    fn signature(&self, alpha: &crate::field::Ordering) -> Result<i64, GwError> {
        let mut s: i64 = 0;
        for (k, m) in &self.classes {
            s += self.field.sign(k, alpha)? as i64 * (*m as i64);
        }
        Ok(s)
    }

    fn signatures(&self) -> Result<Vec<i64>, GwError> {
        self.field.orderings().iter().map(|a| self.signature(a)).collect()
    }

    /// Squarefree integer representatives, required by the Hilbert symbol code.
    fn rational(&self) -> Result<Vec<(BigInt, u128)>, GwError> {
        let f = &self.field;
        self.classes
            .iter()
            .map(|(k, m)| match f.as_rational(k) {
                Some(r) if r.is_integer() => Ok((r.to_integer(), *m)),
                _ => Err(GwError::UnsupportedEntries(format!(
                    "{} has no rational square-class representative",
                    f.render(k)
                ))),
            })
            .collect()
    }
}

// ---- Hilbert symbols over Q ----

fn odd_part(a: &BigInt, p: u64) -> (u32, BigInt) {
    let v = arith::valuation(a, p);
    let mut u = a.clone();
    for _ in 0..v {
        u /= BigInt::from(p);
    }
    (v, u)
}

/// Hilbert symbol (a,b) at a place of Q for nonzero integers.
pub fn hilbert(a: &BigInt, b: &BigInt, place: Place) -> i8 {
    match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (al, u) = odd_part(a, 2);
            let (be, v) = odd_part(b, 2);
            let u8_ = arith::mod_p(&u, 8);
            let v8 = arith::mod_p(&v, 8);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u8_) * eps(v8) + al as u64 * omega(v8) + be as u64 * omega(u8_);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (al, u) = odd_part(a, p);
            let (be, v) = odd_part(b, p);
            let mut s: i8 = 1;
            if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 1 {
                s = -s;
            }
            if be % 2 == 1 {
                s *= arith::legendre(arith::mod_p(&u, p), p);
            }
            if al % 2 == 1 {
                s *= arith::legendre(arith::mod_p(&v, p), p);
            }
            s
        }
    }
}

/// Whether a nonzero integer is a square in Q_p (or R).
fn is_local_square(a: &BigInt, place: Place) -> bool {
    match place {
        Place::Infinite => a.is_positive(),
        Place::Prime(p) => {
            let (v, u) = odd_part(a, p);
            if v % 2 == 1 {
                return false;
            }
            if p == 2 {
                arith::mod_p(&u, 8) == 1
            } else {
                arith::legendre(arith::mod_p(&u, p), p) == 1
            }
        }
    }
}

fn hasse_of(classes: &[(BigInt, u128)], place: Place) -> i8 {
    let mut s: i8 = 1;
    for (i, (a, m)) in classes.iter().enumerate() {
        if (m * m.saturating_sub(1) / 2) % 2 == 1 {
            s *= hilbert(a, a, place);
        }
        for (b, n) in &classes[i + 1..] {
            if (m * n) % 2 == 1 {
                s *= hilbert(a, b, place);
            }
        }
    }
    s
}

/// Hasse invariant of k copies of the hyperbolic plane.
fn hasse_hyperbolic(k: u128, place: Place) -> i8 {
    let minus = BigInt::from(-1);
    if (k * k.saturating_sub(1) / 2) % 2 == 1 {
        hilbert(&minus, &minus, place)
    } else {
        1
    }
}

fn rank_of(classes: &[(BigInt, u128)]) -> u128 {
    classes.iter().map(|(_, m)| m).sum()
}

fn disc_of(classes: &[(BigInt, u128)]) -> BigInt {
    let mut d = BigInt::one();
    for (a, m) in classes {
        if m % 2 == 1 {
            d *= a;
        }
    }
    squarefree_int(&d)
}

fn squarefree_int(d: &BigInt) -> BigInt {
    // entries are already squarefree, so a product only needs gcd cancellation
    // of repeated primes; recompute through the prime lists instead
    let mut out = BigInt::one();
    let mut m = d.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    if m > BigInt::one() {
        out *= m;
    }
    if d.is_negative() {
        -out
    } else {
        out
    }
}

fn signed_disc_of(classes: &[(BigInt, u128)]) -> BigInt {
    let n = rank_of(classes);
    let d = disc_of(classes);
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

fn sig_of(classes: &[(BigInt, u128)]) -> i128 {
    classes.iter().map(|(a, m)| if a.is_negative() { -(*m as i128) } else { *m as i128 }).sum()
}

/// Finite primes where the invariants of the classes may be nontrivial.
fn bad_primes(classes: &[(BigInt, u128)]) -> Vec<u64> {
    let mut s = BTreeSet::new();
    s.insert(2u64);
    for (a, _) in classes {
        for p in arith::prime_divisors(a.abs().to_u64().expect("squarefree entries fit in u64")) {
            s.insert(p);
        }
    }
    s.into_iter().collect()
}

fn with_entry(classes: &[(BigInt, u128)], a: &BigInt) -> Vec<(BigInt, u128)> {
    let mut out = classes.to_vec();
    if let Some(e) = out.iter_mut().find(|(b, _)| b == a) {
        e.1 += 1;
    } else {
        out.push((a.clone(), 1));
        out.sort();
    }
    out
}

fn locally_hyperbolic(classes: &[(BigInt, u128)], place: Place) -> bool {
    let n = rank_of(classes);
    n % 2 == 0
        && is_local_square(&signed_disc_of(classes), place)
        && hasse_of(classes, place) == hasse_hyperbolic(n / 2, place)
}

fn q_hyperbolic(classes: &[(BigInt, u128)]) -> bool {
    let n = rank_of(classes);
    n % 2 == 0
        && sig_of(classes) == 0
        && signed_disc_of(classes).is_one()
        && bad_primes(classes).into_iter().all(|p| locally_hyperbolic(classes, Place::Prime(p)))
}

/// The one-dimensional form Witt-equivalent to an odd-rank class, when it exists.
fn odd_delta(classes: &[(BigInt, u128)]) -> BigInt {
    let n = rank_of(classes);
    let d = disc_of(classes);
    // signed disc of the (n+1)-form c + <-delta> must be a square
    let s = if ((n + 1) * n / 2) % 2 == 1 { d } else { -d };
    squarefree_int(&s)
}

fn local_aniso_rank(classes: &[(BigInt, u128)], place: Place) -> u128 {
    let n = rank_of(classes);
    if n % 2 == 0 {
        if locally_hyperbolic(classes, place) {
            0
        } else if !is_local_square(&signed_disc_of(classes), place) {
            2
        } else {
            4
        }
    } else {
        let delta = odd_delta(classes);
        if locally_hyperbolic(&with_entry(classes, &-delta), place) {
            1
        } else {
            3
        }
    }
}

fn q_aniso_rank(classes: &[(BigInt, u128)]) -> u128 {
    let n = rank_of(classes);
    let mut r = sig_of(classes).unsigned_abs();
    for p in bad_primes(classes) {
        r = r.max(local_aniso_rank(classes, Place::Prime(p)));
    }
    if n % 2 == 1 {
        r = r.max(1);
    } else if !signed_disc_of(classes).is_one() {
        r = r.max(2);
    }
    r
}

fn is_squarefree(n: u64) -> bool {
    let mut d = 2;
    let mut m = n;
    while d * d <= m {
        if m % (d * d) == 0 {
            return false;
        }
        if m % d == 0 {
            m /= d;
        }
        d += 1;
    }
    true
}

const REPRESENTATION_SEARCH: u64 = 100_000;

/// Anisotropic diagonal representative of a Witt class over Q.
fn q_anisotropic(classes: &[(BigInt, u128)]) -> Result<Vec<BigInt>, GwError> {
    let mut cur = classes.to_vec();
    let mut out = Vec::new();
    loop {
        let r = q_aniso_rank(&cur);
        if r == 0 {
            break;
        }
        if r == 1 {
            out.push(odd_delta(&cur));
            break;
        }
        let mut found = None;
        'search: for m in 1..=REPRESENTATION_SEARCH {
            if !is_squarefree(m) {
                continue;
            }
            for a in [BigInt::from(m), -BigInt::from(m)] {
                let next = with_entry(&cur, &-&a);
                if q_aniso_rank(&next) == r - 1 {
                    found = Some((a, next));
                    break 'search;
                }
            }
        }
        let (a, next) = found.ok_or_else(|| {
            GwError::UnsupportedEntries("no small value represented by the anisotropic part".into())
        })?;
        out.push(a);
        cur = next;
    }
    Ok(out)
}

// ---- per-backend decisions on counted classes ----

fn split_prime(d: u64, p: u64) -> bool {
    if p == 2 {
        d % 8 == 1
    } else {
        d % p != 0 && arith::legendre(d % p, p) == 1
    }
}

/// Witt-class triviality.
fn witt_zero(c: &Counted) -> Result<bool, GwError> {
    let c = c.witt_reduce()?;
    let f = &c.field;
    match f.kind() {
        FieldKind::Finite { .. } | FieldKind::AlgebraicallyClosed => {
            Ok(c.rank() % 2 == 0 && f.is_square(&c.signed_disc()?)?)
        }
        FieldKind::RealClosed => Ok(c.signatures()?[0] == 0),
        FieldKind::Rationals => Ok(q_hyperbolic(&c.rational()?)),
        FieldKind::RealQuadratic(d) => {
            let n = c.rank();
            if n % 2 == 1 || !f.is_square(&c.signed_disc()?)? || c.signatures()?.iter().any(|s| *s != 0) {
                return Ok(false);
            }
            let rc = c.rational()?;
            Ok(bad_primes(&rc)
                .into_iter()
                .filter(|p| split_prime(*d, *p))
                .all(|p| hasse_of(&rc, Place::Prime(p)) == hasse_hyperbolic(n / 2, Place::Prime(p))))
        }
    }
}

pub fn invariants(f: &DiagonalForm) -> Result<GwInvariants, GwError> {
    let c = Counted::from_form(f)?;
    let field = &f.field;
    let mut hasse = BTreeMap::new();
    match field.kind() {
        FieldKind::Rationals => {
            let rc = c.rational()?;
            for p in bad_primes(&rc) {
                hasse.insert(Place::Prime(p), hasse_of(&rc, Place::Prime(p)));
            }
            hasse.insert(Place::Infinite, hasse_of(&rc, Place::Infinite));
        }
        FieldKind::RealQuadratic(d) => {
            if let Ok(rc) = c.rational() {
                for p in bad_primes(&rc).into_iter().filter(|p| split_prime(*d, *p)) {
                    hasse.insert(Place::Prime(p), hasse_of(&rc, Place::Prime(p)));
                }
            }
        }
        _ => {}
    }
    Ok(GwInvariants { rank: f.rank(), disc: c.disc()?, signatures: c.signatures()?, hasse })
}

pub fn isometric(f: &DiagonalForm, g: &DiagonalForm) -> Result<bool, GwError> {
    if f.field != g.field {
        return Err(GwError::FieldMismatch);
    }
    if f.rank() != g.rank() {
        return Ok(false);
    }
    let (cf, cg) = (Counted::from_form(f)?, Counted::from_form(g)?);
    let field = &f.field;
    match field.kind() {
        FieldKind::Finite { .. } => Ok(cf.disc()? == cg.disc()?),
        FieldKind::RealClosed => Ok(cf.signatures()? == cg.signatures()?),
        FieldKind::AlgebraicallyClosed => Ok(true),
        FieldKind::Rationals => {
            let (rf, rg) = (cf.rational()?, cg.rational()?);
            if disc_of(&rf) != disc_of(&rg) || sig_of(&rf) != sig_of(&rg) {
                return Ok(false);
            }
            let mut ps: BTreeSet<u64> = bad_primes(&rf).into_iter().collect();
            ps.extend(bad_primes(&rg));
            Ok(ps.into_iter().all(|p| hasse_of(&rf, Place::Prime(p)) == hasse_of(&rg, Place::Prime(p))))
        }
        FieldKind::RealQuadratic(d) => {
            if cf.disc()? != cg.disc()? || cf.signatures()? != cg.signatures()? {
                return Ok(false);
            }
            let (rf, rg) = (cf.rational()?, cg.rational()?);
            let mut ps: BTreeSet<u64> = bad_primes(&rf).into_iter().collect();
            ps.extend(bad_primes(&rg));
            Ok(ps
                .into_iter()
                .filter(|p| split_prime(*d, *p))
                .all(|p| hasse_of(&rf, Place::Prime(p)) == hasse_of(&rg, Place::Prime(p))))
        }
    }
}

/// f = anisotropic part + (hyperbolic count) copies of <1,-1>.
pub fn witt_decompose(f: &DiagonalForm) -> Result<(DiagonalForm, usize), GwError> {
    let field = &f.field;
    let c = Counted::from_form(f)?;
    let n = f.rank();
    let aniso: Vec<FieldElement> = match field.kind() {
        FieldKind::Finite { .. } => {
            let disc = c.disc()?;
            if n % 2 == 1 {
                // <delta> with delta chosen so that the signed discriminants agree
                let d = if ((n - 1) / 2) % 2 == 1 { field.neg(&disc) } else { disc };
                vec![field.square_class(&d)?]
            } else if field.is_square(&c.signed_disc()?)? {
                vec![]
            } else {
                let d = if ((n - 2) / 2) % 2 == 1 { field.neg(&disc) } else { disc };
                vec![field.one(), field.square_class(&d)?]
            }
        }
        FieldKind::RealClosed => {
            let s = c.signatures()?[0];
            vec![field.from_int(s.signum()); s.unsigned_abs() as usize]
        }
        FieldKind::AlgebraicallyClosed => vec![field.one(); n % 2],
        FieldKind::Rationals => {
            q_anisotropic(&c.rational()?)?.into_iter().map(|a| FieldElement::Rat(BigRational::from_integer(a))).collect()
        }
        FieldKind::RealQuadratic(_) => {
            return Err(GwError::UnsupportedEntries("Witt decomposition over Q(sqrt(d))".into()))
        }
    };
    let hyp = (n - aniso.len()) / 2;
    Ok((DiagonalForm { field: field.clone(), entries: aniso }, hyp))
}

/// Whether the Witt class of f lies in I^n.
pub fn in_fundamental_power(f: &DiagonalForm, n: i64) -> Result<bool, GwError> {
    let c = Counted::from_form(f)?;
    in_power_counted(&c, n)
}

fn in_power_counted(c: &Counted, n: i64) -> Result<bool, GwError> {
    if n <= 0 {
        return Ok(true);
    }
    let c = c.witt_reduce()?;
    let field = &c.field;
    if n == 1 {
        return Ok(c.rank() % 2 == 0);
    }
    match field.kind() {
        FieldKind::Finite { .. } | FieldKind::AlgebraicallyClosed => witt_zero(&c),
        FieldKind::RealClosed => {
            let s = c.signatures()?[0];
            Ok(s.rem_euclid(1i64 << n.min(62)) == 0)
        }
        FieldKind::Rationals | FieldKind::RealQuadratic(_) => {
            if c.rank() % 2 == 1 || !field.is_square(&c.signed_disc()?)? {
                return Ok(false);
            }
            if n == 2 {
                return Ok(true);
            }
            if matches!(field.kind(), FieldKind::RealQuadratic(_)) {
                return Err(GwError::UnsupportedDepth(n));
            }
            // I^n(Q) for n >= 3 is 2^n Z <1>, detected by the signature
            let s = c.signatures()?[0];
            if s.rem_euclid(1i64 << n.min(62)) != 0 {
                return Ok(false);
            }
            let mut x = c.clone();
            let minus = field.from_int(-s.signum());
            x.push(minus, s.unsigned_abs() as u128);
            witt_zero(&x)
        }
    }
}

// ---- GW elements ----

/// Element of GW(F) as an integer combination of the classes <a>, keyed by
/// canonical square-class representative. Also used for Witt classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwElement {
    field: Field,
    coeffs: BTreeMap<FieldElement, i128>,
}

impl GwElement {
    pub fn zero(field: &Field) -> GwElement {
        GwElement { field: field.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(field: &Field) -> GwElement {
        GwElement::scalar(field, 1)
    }

    pub fn scalar(field: &Field, n: i128) -> GwElement {
        let mut g = GwElement::zero(field);
        g.add_term(field.one(), n);
        g
    }

    /// The class <u>.
    pub fn class(field: &Field, u: &FieldElement) -> Result<GwElement, GwError> {
        let mut g = GwElement::zero(field);
        g.add_term(field.square_class(u)?, 1);
        Ok(g)
    }

    pub fn from_form(f: &DiagonalForm) -> Result<GwElement, GwError> {
        let mut g = GwElement::zero(&f.field);
        for e in &f.entries {
            g.add_term(f.field.square_class(e)?, 1);
        }
        Ok(g)
    }

    fn add_term(&mut self, k: FieldElement, c: i128) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(k.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FieldElement, &i128)> {
        self.coeffs.iter()
    }

    pub fn is_formally_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &GwElement) -> GwElement {
        let mut g = self.clone();
        for (k, c) in &other.coeffs {
            g.add_term(k.clone(), *c);
        }
        g
    }

    pub fn scale(&self, n: i128) -> GwElement {
        let mut g = GwElement::zero(&self.field);
        for (k, c) in &self.coeffs {
            g.add_term(k.clone(), c * n);
        }
        g
    }

    pub fn sub(&self, other: &GwElement) -> GwElement {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &GwElement) -> Result<GwElement, GwError> {
        let f = &self.field;
        let mut g = GwElement::zero(f);
        for (a, c) in &self.coeffs {
            for (b, e) in &other.coeffs {
                g.add_term(f.square_class(&f.mul(a, b))?, c * e);
            }
        }
        Ok(g)
    }

    pub fn rank(&self) -> i128 {
        self.coeffs.values().sum()
    }

    pub fn signature(&self, alpha: &crate::field::Ordering) -> Result<i128, GwError> {
        let mut s = 0;
        for (k, c) in &self.coeffs {
            s += self.field.sign(k, alpha)? as i128 * c;
        }
        Ok(s)
    }

    /// Positive form with the same Witt class: -c<a> becomes c<-a>.
    fn witt_counted(&self) -> Result<Counted, GwError> {
        let f = &self.field;
        let mut c = Counted { field: f.clone(), classes: BTreeMap::new() };
        for (k, n) in &self.coeffs {
            if *n > 0 {
                c.push(k.clone(), *n as u128);
            } else {
                c.push(f.square_class(&f.neg(k))?, n.unsigned_abs());
            }
        }
        c.witt_reduce()
    }

    /// A diagonal form representing the Witt class.
    pub fn witt_form(&self) -> Result<DiagonalForm, GwError> {
        let c = self.witt_counted()?;
        let mut entries = Vec::new();
        for (k, m) in &c.classes {
            for _ in 0..*m {
                entries.push(k.clone());
            }
        }
        Ok(DiagonalForm { field: self.field.clone(), entries })
    }

    /// Zero in W(F).
    pub fn witt_is_zero(&self) -> Result<bool, GwError> {
        witt_zero(&self.witt_counted()?)
    }

    /// Zero in GW(F): rank zero and trivial Witt class.
    pub fn is_zero(&self) -> Result<bool, GwError> {
        Ok(self.rank() == 0 && self.witt_is_zero()?)
    }

    pub fn in_fundamental_power(&self, n: i64) -> Result<bool, GwError> {
        in_power_counted(&self.witt_counted()?, n)
    }

    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|(k, c)| format!("{c}*<{}>", self.field.render(k))).collect();
        parts.join(" + ")
    }
}

// ---- Spec GW(F) ----

/// A prime of GW(F): dim^-1(pZ) or sgn_alpha^-1(pZ), p prime or 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecGwPoint {
    Dim(u64),
    Sgn(usize, u64),
}

impl SpecGwPoint {
    /// Canonical constructor: sgn^-1(2Z) = dim^-1(2Z) since signature and rank
    /// have the same parity.
    pub fn sgn(alpha: usize, p: u64) -> SpecGwPoint {
        if p == 2 {
            SpecGwPoint::Dim(2)
        } else {
            SpecGwPoint::Sgn(alpha, p)
        }
    }

    pub fn id(&self) -> String {
        match self {
            SpecGwPoint::Dim(p) => format!("dim:p={p}"),
            SpecGwPoint::Sgn(a, p) => format!("sgn:a={a},p={p}"),
        }
    }

    pub fn contains(&self, x: &GwElement) -> Result<bool, GwError> {
        let divides = |v: i128, p: u64| if p == 0 { v == 0 } else { v.rem_euclid(p as i128) == 0 };
        match self {
            SpecGwPoint::Dim(p) => Ok(divides(x.rank(), *p)),
            SpecGwPoint::Sgn(a, p) => Ok(divides(x.signature(&x.field.ordering(*a)?)?, *p)),
        }
    }
}

impl fmt::Display for SpecGwPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecGwPoint::Dim(p) => write!(f, "dim^-1({p}Z)"),
            SpecGwPoint::Sgn(a, p) => write!(f, "sgn_a{a}^-1({p}Z)"),
        }
    }
}

impl crate::poset::PointLabel for SpecGwPoint {
    fn id(&self) -> String {
        SpecGwPoint::id(self)
    }
    fn label(&self) -> String {
        self.to_string()
    }
    fn kind(&self) -> String {
        match self {
            SpecGwPoint::Dim(_) => "dim".into(),
            SpecGwPoint::Sgn(..) => "sgn".into(),
        }
    }
    fn extra(&self) -> Vec<(String, Value)> {
        match self {
            SpecGwPoint::Dim(p) => vec![("p".into(), json!(p))],
            SpecGwPoint::Sgn(a, p) => vec![("ordering".into(), json!(a)), ("p".into(), json!(p))],
        }
    }
}

/// Spec GW(F) over a truncation, as the image of the Thornton poset under
/// the degree-zero map with the induced specialization order.
pub fn spec_gw(field: &Field, t: &Truncation) -> SpectralPoset<SpecGwPoint> {
    let thornton = crate::poset::build_spec_h_kmw(field, t);
    let image =
        |x: &HomogeneousPrime| -> SpecGwPoint { comparison::degree_zero(x) };
    SpectralPoset::image(&thornton, image)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn form(f: &Field, xs: &[i64]) -> DiagonalForm {
        DiagonalForm::from_ints(f, xs).unwrap()
    }

    #[test]
    fn hilbert_symbol_table_at_2() {
        // (a,b)_2 for a,b in {-1,2,3,6}: classical table
        let b = |n: i64| BigInt::from(n);
        assert_eq!(hilbert(&b(-1), &b(-1), Place::Prime(2)), -1);
        assert_eq!(hilbert(&b(2), &b(-1), Place::Prime(2)), 1);
        assert_eq!(hilbert(&b(2), &b(3), Place::Prime(2)), -1);
        assert_eq!(hilbert(&b(3), &b(3), Place::Prime(2)), -1);
        assert_eq!(hilbert(&b(5), &b(2), Place::Prime(2)), -1);
    }

    #[test]
    fn hilbert_reciprocity_sampled() {
        let vals = [-15i64, -7, -6, -3, -2, -1, 2, 3, 5, 6, 7, 10, 11, 15, 21, 30];
        for a in vals {
            for b in vals {
                let (ba, bb) = (BigInt::from(a), BigInt::from(b));
                let mut prod = hilbert(&ba, &bb, Place::Infinite);
                for p in [2u64, 3, 5, 7, 11] {
                    prod *= hilbert(&ba, &bb, Place::Prime(p));
                }
                assert_eq!(prod, 1, "reciprocity fails for ({a},{b})");
            }
        }
    }

    #[test]
    fn invariants_examples() {
        let i = invariants(&form(&q(), &[1, -1])).unwrap();
        assert_eq!(i.rank, 2);
        assert_eq!(i.disc, FieldElement::rat(-1));
        assert_eq!(i.signatures, vec![0]);
        assert!(i.hasse.values().all(|s| *s == 1));
        let r = Field::real_closed();
        assert_eq!(invariants(&form(&r, &[1, 1, 1])).unwrap().signatures, vec![3]);
        let f3 = Field::finite(3).unwrap();
        let i = invariants(&form(&f3, &[1, 1])).unwrap();
        assert_eq!((i.rank, i.disc), (2, f3.one()));
    }

    #[test]
    fn isometry_examples() {
        let f5 = Field::finite(5).unwrap();
        assert!(isometric(&form(&f5, &[1, 1]), &form(&f5, &[2, 2])).unwrap());
        assert!(!isometric(&form(&q(), &[1, 1]), &form(&q(), &[1, -1])).unwrap());
        for f in [q(), f5.clone(), Field::real_closed(), Field::algebraically_closed()] {
            assert!(isometric(&form(&f, &[1, 2]), &form(&f, &[2, 1])).unwrap());
        }
        // <1,1> and <2,2> over Q: 2 = 1+1 is represented
        assert!(isometric(&form(&q(), &[1, 1]), &form(&q(), &[2, 2])).unwrap());
        assert!(!isometric(&form(&q(), &[1, 1]), &form(&q(), &[3, 3])).unwrap());
        // over Q(sqrt 2) the latter pair becomes isometric (3 = 1 + 2 and 2 is a square)
        let k = Field::real_quadratic(2).unwrap();
        assert!(isometric(&form(&k, &[1, 1]), &form(&k, &[3, 3])).unwrap());
    }

    #[test]
    fn witt_decompose_examples() {
        let (a, h) = witt_decompose(&form(&q(), &[1, -1, 1])).unwrap();
        assert_eq!((a.entries().to_vec(), h), (vec![FieldElement::rat(1)], 1));
        let f3 = Field::finite(3).unwrap();
        let (a, h) = witt_decompose(&form(&f3, &[1, 1])).unwrap();
        assert_eq!((a.rank(), h), (2, 0));
        let f5 = Field::finite(5).unwrap();
        let (a, h) = witt_decompose(&form(&f5, &[1, 1])).unwrap();
        assert_eq!((a.rank(), h), (0, 1));
    }

    #[test]
    fn q_witt_decompose_recomposes() {
        let cases: &[&[i64]] = &[
            &[1, 1, 1, 1, 1],
            &[1, 2, 3, 5, -7],
            &[3, 3, 3],
            &[1, 1, 1, 7],
            &[2, -3, 5, -30],
            &[-1, -1, -1, -1, 6, 10],
            &[7, 7, 7, 7, 7, 7, 7],
        ];
        for xs in cases {
            let f = form(&q(), xs);
            let (a, h) = witt_decompose(&f).unwrap();
            let back = a.direct_sum(&DiagonalForm::hyperbolic(&q(), h)).unwrap();
            assert!(isometric(&f, &back).unwrap(), "{xs:?} -> {a} + {h}H");
            assert_eq!(q_aniso_rank(&Counted::from_form(&a).unwrap().rational().unwrap()), a.rank() as u128);
        }
    }

    #[test]
    fn fundamental_powers() {
        let r = Field::real_closed();
        assert!(in_fundamental_power(&form(&r, &[1, 1]), 1).unwrap());
        assert!(!in_fundamental_power(&form(&r, &[1, 1]), 2).unwrap());
        assert!(!in_fundamental_power(&form(&q(), &[1]), 1).unwrap());
        let f3 = Field::finite(3).unwrap();
        assert!(!in_fundamental_power(&form(&f3, &[1, 1]), 2).unwrap());
        // 8<1> is the Pfister form <<-1,-1,-1>>
        assert!(in_fundamental_power(&form(&q(), &[1; 8]), 3).unwrap());
        assert!(!in_fundamental_power(&form(&q(), &[1, 1, 1, 1, 1, 1, 1, 7]), 3).unwrap());
        // <<-1,-1>> = <1,1,1,1> in I^2 but not I^3
        assert!(in_fundamental_power(&form(&q(), &[1, 1, 1, 1]), 2).unwrap());
        assert!(!in_fundamental_power(&form(&q(), &[1, 1, 1, 1]), 3).unwrap());
        // <<2,3>> = <1,-2,-3,6>
        assert!(in_fundamental_power(&form(&q(), &[1, -2, -3, 6]), 2).unwrap());
    }

    #[test]
    fn gw_zero_test() {
        let f = q();
        let a = GwElement::from_form(&form(&f, &[1, 1])).unwrap();
        let b = GwElement::from_form(&form(&f, &[2, 2])).unwrap();
        assert!(a.sub(&b).is_zero().unwrap());
        let c = GwElement::from_form(&form(&f, &[3, 3])).unwrap();
        assert!(!a.sub(&c).is_zero().unwrap());
        let h = GwElement::from_form(&form(&f, &[5, -5])).unwrap();
        assert!(h.witt_is_zero().unwrap());
        assert!(!h.is_zero().unwrap());
    }
}
