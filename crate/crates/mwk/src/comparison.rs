//! Thornton primes of K^MW_*(F): evaluation into residue fields, membership,
//! classification, the degree-zero map, the comparison maps from tensor
//! triangular spectra, base change from closures and the coverage checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::gw::SpecGwPoint;
use crate::mw::{MwElement, MwError};
use crate::poset::{self, build_spec_h_kmw, Group, Height, PointLabel, TTPoint, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimeError {
    #[error("{0} is not a homogeneous prime of K^MW over {1}")]
    PrimeFieldMismatch(String, String),
    #[error("element is not homogeneous")]
    NonHomogeneous,
    #[error("generators do not single out a Thornton prime: {0}")]
    NotAThorntonPrime(String),
    #[error("{0} is not a point of this spectrum")]
    InvalidPoint(String),
    #[error("field has no orderings")]
    NonRealField,
    #[error("invalid closure: {0}")]
    InvalidClosure(String),
    #[error(transparent)]
    Mw(#[from] MwError),
}

/// The six shapes of homogeneous primes; orderings are given by index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HomogeneousPrime {
    /// ([F^x], eta)
    T1,
    /// ([F^x], eta, p)
    T2(u64),
    /// ([F^x], 2)
    T3,
    /// ([P_a], h)
    T4(usize),
    /// ([P_a], eta, 2)
    T5(usize),
    /// ([P_a], h, p), p odd
    T6(usize, u64),
}

impl HomogeneousPrime {
    pub fn type_tag(&self) -> u8 {
        match self {
            HomogeneousPrime::T1 => 1,
            HomogeneousPrime::T2(_) => 2,
            HomogeneousPrime::T3 => 3,
            HomogeneousPrime::T4(_) => 4,
            HomogeneousPrime::T5(_) => 5,
            HomogeneousPrime::T6(..) => 6,
        }
    }

    pub fn ordering(&self) -> Option<usize> {
        match self {
            HomogeneousPrime::T4(a) | HomogeneousPrime::T5(a) | HomogeneousPrime::T6(a, _) => Some(*a),
            _ => None,
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            HomogeneousPrime::T2(p) | HomogeneousPrime::T6(_, p) => Some(*p),
            _ => None,
        }
    }

    /// Literal form: type1, type2:p=3, type4:a=0, type6:a=1,p=5.
    pub fn literal(&self) -> String {
        match self {
            HomogeneousPrime::T1 => "type1".into(),
            HomogeneousPrime::T2(p) => format!("type2:p={p}"),
            HomogeneousPrime::T3 => "type3".into(),
            HomogeneousPrime::T4(a) => format!("type4:a={a}"),
            HomogeneousPrime::T5(a) => format!("type5:a={a}"),
            HomogeneousPrime::T6(a, p) => format!("type6:a={a},p={p}"),
        }
    }

    /// Whether the prime exists over the field.
    pub fn valid_for(&self, field: &Field) -> bool {
        let n = field.orderings().len();
        let prime = |p: u64| crate::arith::is_prime(p);
        match self {
            HomogeneousPrime::T1 | HomogeneousPrime::T3 => true,
            HomogeneousPrime::T2(p) => prime(*p),
            HomogeneousPrime::T4(a) | HomogeneousPrime::T5(a) => *a < n,
            HomogeneousPrime::T6(a, p) => *a < n && *p != 2 && prime(*p),
        }
    }
}

impl fmt::Display for HomogeneousPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomogeneousPrime::T1 => write!(f, "([F^x],eta)"),
            HomogeneousPrime::T2(p) => write!(f, "([F^x],eta,{p})"),
            HomogeneousPrime::T3 => write!(f, "([F^x],2)"),
            HomogeneousPrime::T4(a) => write!(f, "([P_a{a}],h)"),
            HomogeneousPrime::T5(a) => write!(f, "([P_a{a}],eta,2)"),
            HomogeneousPrime::T6(a, p) => write!(f, "([P_a{a}],h,{p})"),
        }
    }
}

impl PointLabel for HomogeneousPrime {
    fn id(&self) -> String {
        self.literal()
    }
    fn label(&self) -> String {
        self.to_string()
    }
    fn kind(&self) -> String {
        format!("type{}", self.type_tag())
    }
    fn extra(&self) -> Vec<(String, Value)> {
        let mut v = Vec::new();
        if let Some(a) = self.ordering() {
            v.push(("ordering".into(), json!(a)));
        }
        if let Some(p) = self.prime() {
            v.push(("p".into(), json!(p)));
        }
        v
    }
}

// ---- residue fields ----

/// Graded residue fields L(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueField {
    Rationals,
    Prime(u64),
    F2EtaLaurent,
    QEtaLaurent,
    F2MinusOneLaurent,
    PrimeEtaLaurent(u64),
}

impl ResidueField {
    /// Characteristic of the coefficient field (0 for Q).
    pub fn characteristic(&self) -> u64 {
        match self {
            ResidueField::Rationals | ResidueField::QEtaLaurent => 0,
            ResidueField::F2EtaLaurent | ResidueField::F2MinusOneLaurent => 2,
            ResidueField::Prime(p) | ResidueField::PrimeEtaLaurent(p) => *p,
        }
    }

    /// The graded unit, if any: eta or [-1].
    pub fn generator(&self) -> Option<&'static str> {
        match self {
            ResidueField::Rationals | ResidueField::Prime(_) => None,
            ResidueField::F2EtaLaurent | ResidueField::QEtaLaurent | ResidueField::PrimeEtaLaurent(_) => Some("eta"),
            ResidueField::F2MinusOneLaurent => Some("[-1]"),
        }
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Rationals => write!(f, "Q"),
            ResidueField::Prime(p) => write!(f, "F_{p}"),
            ResidueField::F2EtaLaurent => write!(f, "F_2[eta^+-1]"),
            ResidueField::QEtaLaurent => write!(f, "Q[eta^+-1]"),
            ResidueField::F2MinusOneLaurent => write!(f, "F_2[[-1]^+-1]"),
            ResidueField::PrimeEtaLaurent(p) => write!(f, "F_{p}[eta^+-1]"),
        }
    }
}

pub fn residue_field(prime: &HomogeneousPrime) -> ResidueField {
    match prime {
        HomogeneousPrime::T1 => ResidueField::Rationals,
        HomogeneousPrime::T2(p) => ResidueField::Prime(*p),
        HomogeneousPrime::T3 => ResidueField::F2EtaLaurent,
        HomogeneousPrime::T4(_) => ResidueField::QEtaLaurent,
        HomogeneousPrime::T5(_) => ResidueField::F2MinusOneLaurent,
        HomogeneousPrime::T6(_, p) => ResidueField::PrimeEtaLaurent(*p),
    }
}

/// Homogeneous element c * t^e of a residue field, t the graded unit.
/// Coefficients in F_p are kept reduced in [0, p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueElement {
    pub field: ResidueField,
    pub coeff: BigRational,
    pub exponent: i64,
}

impl ResidueElement {
    fn new(field: ResidueField, coeff: BigRational, exponent: i64) -> ResidueElement {
        let coeff = reduce(&field, coeff);
        let exponent = if coeff.is_zero() { 0 } else { exponent };
        ResidueElement { field, coeff, exponent }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, other: &ResidueElement) -> ResidueElement {
        ResidueElement::new(self.field.clone(), &self.coeff * &other.coeff, self.exponent + other.exponent)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        match self.field.generator() {
            None => self.coeff.to_string(),
            Some(g) if self.exponent == 0 => {
                let _ = g;
                self.coeff.to_string()
            }
            Some(g) => format!("{}*{g}^{}", self.coeff, self.exponent),
        }
    }
}

fn reduce(field: &ResidueField, c: BigRational) -> BigRational {
    let p = field.characteristic();
    if p == 0 {
        return c;
    }
    let pb = BigInt::from(p);
    let n = c.numer().mod_floor(&pb);
    let d = c.denom().mod_floor(&pb);
    assert!(!d.is_zero(), "coefficient denominator divisible by {p}");
    let dinv = BigInt::from(crate::arith::pow_mod(d.to_string().parse().unwrap(), p - 2, p));
    BigRational::from_integer((n * dinv).mod_floor(&pb))
}

fn check_prime(field: &Field, prime: &HomogeneousPrime) -> Result<(), PrimeError> {
    if prime.valid_for(field) {
        Ok(())
    } else {
        Err(PrimeError::PrimeFieldMismatch(prime.literal(), field.to_string()))
    }
}

/// Image of a homogeneous element in L(p).
pub fn evaluate_at_prime(e: &MwElement, prime: &HomogeneousPrime) -> Result<ResidueElement, PrimeError> {
    let field = e.field();
    check_prime(field, prime)?;
    e.degree().map_err(|_| PrimeError::NonHomogeneous)?;
    let rf = residue_field(prime);
    let all_negative = |m: &crate::mw::Monomial, a: usize| -> Result<bool, PrimeError> {
        let alpha = field.ordering(a).map_err(MwError::from)?;
        for s in m.symbols() {
            if field.sign(s.value(), &alpha).map_err(MwError::from)? > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut c = BigRational::zero();
    let mut exponent = 0;
    for (m, coef) in e.terms() {
        let k = m.eta_power() as i64;
        let n = m.symbols().len() as i64;
        let coef = BigRational::from_integer(coef.clone());
        match prime {
            HomogeneousPrime::T1 | HomogeneousPrime::T2(_) => {
                if k == 0 && n == 0 {
                    c += coef;
                }
            }
            HomogeneousPrime::T3 => {
                if n == 0 {
                    c += coef;
                    exponent = k;
                }
            }
            HomogeneousPrime::T4(a) | HomogeneousPrime::T6(a, _) => {
                // [u] -> 0 on positives, otherwise [-1] -> -2 eta^-1
                if all_negative(m, *a)? {
                    let w = num_traits::pow(BigInt::from(-2), n as usize);
                    c += coef * BigRational::from_integer(w);
                    exponent = k - n;
                }
            }
            HomogeneousPrime::T5(a) => {
                if k == 0 && all_negative(m, *a)? {
                    c += coef;
                    exponent = n;
                }
            }
        }
    }
    Ok(ResidueElement::new(rf, c, exponent))
}

pub fn contains(prime: &HomogeneousPrime, e: &MwElement) -> Result<bool, PrimeError> {
    Ok(evaluate_at_prime(e, prime)?.is_zero())
}

/// Ideal generators of a prime over a finite generating family of F^x.
pub fn generators(field: &Field, prime: &HomogeneousPrime, t: &Truncation) -> Result<Vec<MwElement>, PrimeError> {
    check_prime(field, prime)?;
    let family = field.unit_family(&t.primes());
    let sym = |u: &FieldElement| MwElement::symbol(field, u.clone()).map_err(PrimeError::from);
    let all: Vec<MwElement> = family.iter().map(sym).collect::<Result<_, _>>()?;
    let positive = |a: usize| -> Result<Vec<MwElement>, PrimeError> {
        let alpha = field.ordering(a).map_err(MwError::from)?;
        let mut out = Vec::new();
        for u in family.iter().filter(|u| !u.is_minus_one(field)) {
            let s = field.sign(u, &alpha).map_err(MwError::from)?;
            out.push(sym(&if s > 0 { u.clone() } else { field.neg(u) })?);
        }
        Ok(out)
    };
    let eta = MwElement::eta(field);
    let int = |n: u64| MwElement::integer(field, n as i64);
    let mut g = match prime {
        HomogeneousPrime::T1 => vec![eta],
        HomogeneousPrime::T2(p) => vec![eta, int(*p)],
        HomogeneousPrime::T3 => vec![int(2)],
        HomogeneousPrime::T4(_) => vec![MwElement::h(field)],
        HomogeneousPrime::T5(_) => vec![eta, int(2)],
        HomogeneousPrime::T6(_, p) => vec![MwElement::h(field), int(*p)],
    };
    match prime.ordering() {
        None => g.extend(all),
        Some(a) => g.extend(positive(a)?),
    }
    Ok(g)
}

/// The unique minimal Thornton prime of the truncation containing all inputs.
pub fn classify(gens: &[MwElement], field: &Field, t: &Truncation) -> Result<HomogeneousPrime, PrimeError> {
    let spec = build_spec_h_kmw(field, t);
    let mut hits = Vec::new();
    for x in spec.points() {
        let mut ok = true;
        for g in gens {
            if !contains(x, g)? {
                ok = false;
                break;
            }
        }
        if ok {
            hits.push(x.clone());
        }
    }
    let minimal: Vec<&HomogeneousPrime> = hits
        .iter()
        .filter(|y| !hits.iter().any(|x| x != *y && spec.leq(x, y).unwrap()))
        .collect();
    match minimal.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(PrimeError::NotAThorntonPrime("no prime of the truncation contains the generators".into())),
        many => Err(PrimeError::NotAThorntonPrime(format!(
            "several minimal candidates: {}",
            many.iter().map(|x| x.literal()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// p^0 = p intersected with K^MW_0 = GW(F).
pub fn degree_zero(prime: &HomogeneousPrime) -> SpecGwPoint {
    match prime {
        HomogeneousPrime::T1 => SpecGwPoint::Dim(0),
        HomogeneousPrime::T2(p) => SpecGwPoint::Dim(*p),
        HomogeneousPrime::T3 => SpecGwPoint::Dim(2),
        HomogeneousPrime::T4(a) => SpecGwPoint::sgn(*a, 0),
        HomogeneousPrime::T5(_) => SpecGwPoint::Dim(2),
        HomogeneousPrime::T6(a, p) => SpecGwPoint::sgn(*a, *p),
    }
}

// ---- comparison maps ----

pub fn rho_bullet_sh_fin(x: &TTPoint) -> Result<HomogeneousPrime, PrimeError> {
    if !poset::check_tt_point(x) {
        return Err(PrimeError::InvalidPoint(x.to_string()));
    }
    match x {
        TTPoint::Top { n: Height::Finite(1), .. } => Ok(HomogeneousPrime::T1),
        TTPoint::Top { p, .. } => Ok(HomogeneousPrime::T2(*p)),
        _ => Err(PrimeError::InvalidPoint(x.to_string())),
    }
}

pub fn rho_bullet_sh_c2(x: &TTPoint, field: &Field, a: usize) -> Result<HomogeneousPrime, PrimeError> {
    if field.is_nonreal() {
        return Err(PrimeError::NonRealField);
    }
    field.ordering(a).map_err(MwError::from)?;
    if !poset::check_tt_point(x) {
        return Err(PrimeError::InvalidPoint(x.to_string()));
    }
    match x {
        TTPoint::Equivariant { group: Group::Trivial, n: Height::Finite(1), .. } => Ok(HomogeneousPrime::T1),
        TTPoint::Equivariant { group: Group::C2, n: Height::Finite(1), .. } => Ok(HomogeneousPrime::T4(a)),
        TTPoint::Equivariant { group: Group::Trivial, p, .. } => Ok(HomogeneousPrime::T2(*p)),
        TTPoint::Equivariant { group: Group::C2, p: 2, .. } => Ok(HomogeneousPrime::T5(a)),
        TTPoint::Equivariant { group: Group::C2, p, .. } => Ok(HomogeneousPrime::T6(a, *p)),
        _ => Err(PrimeError::InvalidPoint(x.to_string())),
    }
}

/// Primes hit by the cellular and singular motivic fields.
pub fn cellular_field_primes(field: &Field, t: &Truncation) -> Vec<(String, HomogeneousPrime)> {
    let mut out = vec![("P3".to_string(), HomogeneousPrime::T3)];
    for a in field.orderings() {
        let a = a.index;
        out.push((format!("P4^a{a}"), HomogeneousPrime::T4(a)));
        out.push((format!("P5^a{a}"), HomogeneousPrime::T5(a)));
        for p in t.odd_primes() {
            out.push((format!("P6^a{a},{p}"), HomogeneousPrime::T6(a, p)));
        }
    }
    out.push(("ker Sing HQ".to_string(), HomogeneousPrime::T1));
    for p in t.primes() {
        out.push((format!("ker Sing K({p},n-1)"), HomogeneousPrime::T2(p)));
    }
    out
}

/// A point of X_F* = X_F + {inf}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Closure {
    Ordering(usize),
    Infinity,
}

impl Closure {
    pub fn field(&self) -> Field {
        match self {
            Closure::Ordering(_) => Field::real_closed(),
            Closure::Infinity => Field::algebraically_closed(),
        }
    }
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Closure::Ordering(a) => write!(f, "a{a}"),
            Closure::Infinity => write!(f, "inf"),
        }
    }
}

pub fn closures(field: &Field) -> Vec<Closure> {
    let mut v: Vec<Closure> = field.orderings().iter().map(|a| Closure::Ordering(a.index)).collect();
    v.push(Closure::Infinity);
    v
}

/// Pullback of a prime along F -> F_beta.
pub fn base_change(prime: &HomogeneousPrime, target: &Field, beta: Closure) -> Result<HomogeneousPrime, PrimeError> {
    let closed = beta.field();
    if !prime.valid_for(&closed) {
        return Err(PrimeError::InvalidClosure(format!("{} over {closed}", prime.literal())));
    }
    if let Closure::Ordering(a) = beta {
        if a >= target.orderings().len() {
            return Err(PrimeError::InvalidClosure(format!("{target} has no ordering a{a}")));
        }
    }
    let a = match beta {
        Closure::Ordering(a) => a,
        Closure::Infinity => 0,
    };
    Ok(match prime {
        HomogeneousPrime::T1 => HomogeneousPrime::T1,
        HomogeneousPrime::T2(p) => HomogeneousPrime::T2(*p),
        HomogeneousPrime::T3 => HomogeneousPrime::T3,
        HomogeneousPrime::T4(_) => HomogeneousPrime::T4(a),
        HomogeneousPrime::T5(_) => HomogeneousPrime::T5(a),
        HomogeneousPrime::T6(_, p) => HomogeneousPrime::T6(a, *p),
    })
}

/// Image of a field element in the closure F_beta, as an element of the
/// Rclosed or Cclosed backend. Real closures keep rational values and the
/// sign at the ordering; the algebraic closure collapses square classes.
pub fn embed(field: &Field, beta: Closure, u: &FieldElement) -> Result<FieldElement, PrimeError> {
    let closed = beta.field();
    match beta {
        Closure::Infinity => Ok(closed.one()),
        Closure::Ordering(a) => match field.as_rational(u) {
            Some(r) => Ok(FieldElement::Rat(r)),
            None => {
                let alpha = field.ordering(a).map_err(MwError::from)?;
                Ok(closed.from_int(field.sign(u, &alpha).map_err(MwError::from)? as i64))
            }
        },
    }
}

/// Termwise image of an element of K^MW(F) in K^MW(F_beta).
pub fn embed_element(e: &MwElement, beta: Closure) -> Result<MwElement, PrimeError> {
    let closed = beta.field();
    let mut out = MwElement::zero(&closed);
    for (m, c) in e.terms() {
        let mut t = MwElement::monomial(&closed, c.clone(), crate::mw::Monomial::new(m.eta_power(), vec![]));
        for s in m.symbols() {
            let v = embed(e.field(), beta, s.value())?;
            t = t.mul(&MwElement::symbol(&closed, v)?)?;
        }
        out = out.add(&t)?;
    }
    Ok(out)
}

// ---- coverage ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageCheck {
    pub name: String,
    pub pass: bool,
    pub defects: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub field: String,
    pub checks: Vec<CoverageCheck>,
}

impl CoverageReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "pass": c.pass, "defects": c.defects }))
            .collect();
        json!({ "field": self.field, "pass": self.all_pass(), "checks": checks })
    }
}

fn set_check(name: &str, got: &BTreeSet<HomogeneousPrime>, want: &BTreeSet<HomogeneousPrime>) -> CoverageCheck {
    let mut defects: Vec<String> = want.difference(got).map(|x| format!("missing {}", x.literal())).collect();
    defects.extend(got.difference(want).map(|x| format!("unexpected {}", x.literal())));
    CoverageCheck { name: name.into(), pass: defects.is_empty(), defects }
}

pub fn coverage_report(field: &Field, t: &Truncation) -> CoverageReport {
    let spec = build_spec_h_kmw(field, t);
    let all: BTreeSet<HomogeneousPrime> = spec.points().iter().cloned().collect();
    let mut checks = Vec::new();

    let fin: BTreeSet<HomogeneousPrime> =
        poset::build_spc_sh_fin(t).points().iter().map(|x| rho_bullet_sh_fin(x).expect("SH^fin point")).collect();
    let types12: BTreeSet<HomogeneousPrime> =
        all.iter().filter(|x| matches!(x.type_tag(), 1 | 2)).cloned().collect();
    checks.push(set_check("sh_fin_image", &fin, &types12));

    let mut c2 = BTreeSet::new();
    if !field.is_nonreal() {
        let pts = poset::build_spc_sh_c2(t);
        for a in field.orderings() {
            for x in pts.points() {
                c2.insert(rho_bullet_sh_c2(x, field, a.index).expect("SH(C2) point"));
            }
        }
        let mut want = all.clone();
        want.remove(&HomogeneousPrime::T3);
        checks.push(set_check("sh_c2_image", &c2, &want));
    }

    let mut union: BTreeSet<HomogeneousPrime> = cellular_field_primes(field, t).into_iter().map(|(_, x)| x).collect();
    union.extend(fin.iter().cloned());
    union.extend(c2.iter().cloned());
    checks.push(set_check("cellular_union", &union, &all));

    let mut bc = BTreeSet::new();
    for beta in closures(field) {
        let closed = build_spec_h_kmw(&beta.field(), t);
        for x in closed.points() {
            if let Ok(y) = base_change(x, field, beta) {
                bc.insert(y);
            }
        }
    }
    checks.push(set_check("base_change_union", &bc, &all));

    CoverageReport { field: field.to_string(), checks }
}

/// rho tables as explicit maps over a truncation, for continuity checks.
pub fn rho_sh_fin_table(t: &Truncation) -> BTreeMap<TTPoint, HomogeneousPrime> {
    poset::build_spc_sh_fin(t).points().iter().map(|x| (x.clone(), rho_bullet_sh_fin(x).unwrap())).collect()
}

pub fn rho_sh_c2_table(field: &Field, t: &Truncation, a: usize) -> Result<BTreeMap<TTPoint, HomogeneousPrime>, PrimeError> {
    poset::build_spc_sh_c2(t).points().iter().map(|x| Ok((x.clone(), rho_bullet_sh_c2(x, field, a)?))).collect()
}

/// Degree-zero fibers over the truncated Spec GW(F).
pub fn degree_zero_fibers(field: &Field, t: &Truncation) -> BTreeMap<SpecGwPoint, Vec<HomogeneousPrime>> {
    let mut out: BTreeMap<SpecGwPoint, Vec<HomogeneousPrime>> = BTreeMap::new();
    for x in build_spec_h_kmw(field, t).points() {
        out.entry(degree_zero(x)).or_default().push(x.clone());
    }
    out
}

pub fn spec_size_identity(field: &Field, t: &Truncation) -> (usize, usize, usize) {
    let h = build_spec_h_kmw(field, t).len();
    let g = crate::gw::spec_gw(field, t).len();
    (h, g, field.orderings().len() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use HomogeneousPrime::*;

    fn tr() -> Truncation {
        Truncation::new(&[2, 3, 5, 7], 3).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let q = Field::rationals();
        let eta = MwElement::eta(&q);
        assert!(evaluate_at_prime(&eta, &T1).unwrap().is_zero());
        let v = evaluate_at_prime(&eta, &T4(0)).unwrap();
        assert_eq!((v.coeff.clone(), v.exponent), (BigRational::one(), 1));
        let m1 = MwElement::symbol(&q, q.minus_one()).unwrap();
        let v = evaluate_at_prime(&m1, &T5(0)).unwrap();
        assert_eq!((v.is_zero(), v.exponent), (false, 1));
        assert!(contains(&T6(0, 3), &MwElement::h(&q)).unwrap());
        assert!(contains(&T3, &MwElement::h(&q)).unwrap());
        assert!(!contains(&T1, &MwElement::h(&q)).unwrap());
        assert!(contains(&T4(0), &MwElement::symbol(&q, q.from_int(5)).unwrap()).unwrap());
    }

    #[test]
    fn generators_lie_in_their_prime_and_classify_back() {
        for f in [Field::rationals(), Field::real_quadratic(2).unwrap(), Field::finite(3).unwrap(), Field::real_closed(), Field::algebraically_closed()] {
            for x in build_spec_h_kmw(&f, &tr()).points() {
                let g = generators(&f, x, &tr()).unwrap();
                for e in &g {
                    assert!(contains(x, e).unwrap(), "{f} {x} {e}");
                }
                assert_eq!(&classify(&g, &f, &tr()).unwrap(), x, "{f}");
            }
        }
    }

    #[test]
    fn degree_zero_table() {
        assert_eq!(degree_zero(&T2(3)), SpecGwPoint::Dim(3));
        assert_eq!(degree_zero(&T4(0)), SpecGwPoint::Sgn(0, 0));
        assert_eq!(degree_zero(&T5(0)), SpecGwPoint::Dim(2));
    }

    #[test]
    fn spec_gw_sizes() {
        let t = Truncation::new(&[2, 3, 5, 7], 2).unwrap();
        assert_eq!(crate::gw::spec_gw(&Field::rationals(), &t).len(), 9);
        assert_eq!(crate::gw::spec_gw(&Field::finite(3).unwrap(), &Truncation::new(&[2, 3, 5], 2).unwrap()).len(), 4);
        assert_eq!(crate::gw::spec_gw(&Field::real_quadratic(2).unwrap(), &Truncation::new(&[2, 3], 2).unwrap()).len(), 7);
    }

    #[test]
    fn rho_tables() {
        let q = Field::rationals();
        assert_eq!(rho_bullet_sh_fin(&TTPoint::top(0, Height::Finite(1))).unwrap(), T1);
        assert_eq!(rho_bullet_sh_fin(&TTPoint::top(3, Height::Finite(2))).unwrap(), T2(3));
        assert_eq!(rho_bullet_sh_fin(&TTPoint::top(2, Height::Infinite)).unwrap(), T2(2));
        let c = |p, n| TTPoint::equivariant(Group::C2, p, n);
        assert_eq!(rho_bullet_sh_c2(&c(0, Height::Finite(1)), &q, 0).unwrap(), T4(0));
        assert_eq!(rho_bullet_sh_c2(&c(2, Height::Finite(3)), &q, 0).unwrap(), T5(0));
        assert_eq!(rho_bullet_sh_c2(&c(5, Height::Finite(2)), &q, 0).unwrap(), T6(0, 5));
        assert!(rho_bullet_sh_c2(&c(5, Height::Finite(2)), &Field::finite(3).unwrap(), 0).is_err());
    }

    #[test]
    fn coverage_passes() {
        for f in [Field::rationals(), Field::finite(3).unwrap(), Field::real_quadratic(2).unwrap()] {
            let r = coverage_report(&f, &tr());
            assert!(r.all_pass(), "{:?}", r);
        }
    }

    #[test]
    fn base_change_oracle() {
        // a generator of the closed-field prime pulls back into the image prime
        let q = Field::rationals();
        for beta in closures(&q) {
            let closed = beta.field();
            for x in build_spec_h_kmw(&closed, &tr()).points() {
                let y = base_change(x, &q, beta).unwrap();
                for g in generators(&q, &y, &tr()).unwrap() {
                    let img = embed_element(&g, beta).unwrap();
                    assert!(contains(x, &img).unwrap(), "{beta} {x} {y} {g}");
                }
            }
        }
        assert!(base_change(&T4(0), &q, Closure::Infinity).is_err());
    }

    #[test]
    fn residue_table() {
        assert_eq!(residue_field(&T2(5)), ResidueField::Prime(5));
        assert_eq!(residue_field(&T3), ResidueField::F2EtaLaurent);
        assert_eq!(residue_field(&T6(0, 3)), ResidueField::PrimeEtaLaurent(3));
    }
}
