//! Finite spectral spaces as posets (closed sets are up-sets), and the
//! truncated spectra of K^MW_*(F), SH^fin and SH(C2)^c.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::arith;
use crate::comparison::HomogeneousPrime;
use crate::field::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("relation has a cycle through {0}")]
    Cycle(String),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
}

/// Display data attached to the points of an exported poset.
pub trait PointLabel: Clone + Ord + fmt::Debug {
    fn id(&self) -> String;
    fn label(&self) -> String;
    fn kind(&self) -> String;
    fn extra(&self) -> Vec<(String, Value)> {
        vec![]
    }
}

/// Finite poset with its reflexive-transitive order; `x <= y` means y lies
/// in the closure of x.
#[derive(Clone, Debug)]
pub struct SpectralPoset<T: PointLabel> {
    points: Vec<T>,
    index: BTreeMap<T, usize>,
    leq: Vec<Vec<bool>>,
}

impl<T: PointLabel> SpectralPoset<T> {
    /// Order generated by the given pairs (lower, upper).
    pub fn from_relations(points: Vec<T>, relations: &[(T, T)]) -> Result<SpectralPoset<T>, PosetError> {
        let set: BTreeSet<T> = points.into_iter().collect();
        let points: Vec<T> = set.into_iter().collect();
        let index: BTreeMap<T, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = points.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in relations {
            let ia = *index.get(a).ok_or_else(|| PosetError::UnknownPoint(a.id()))?;
            let ib = *index.get(b).ok_or_else(|| PosetError::UnknownPoint(b.id()))?;
            leq[ia][ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(PosetError::Cycle(points[i].id()));
                }
            }
        }
        Ok(SpectralPoset { points, index, leq })
    }

    /// Image poset of a point map with the induced (transitively closed) order.
    pub fn image<S: PointLabel>(src: &SpectralPoset<S>, f: impl Fn(&S) -> T) -> SpectralPoset<T> {
        let imgs: Vec<T> = src.points.iter().map(&f).collect();
        let mut rel = Vec::new();
        for i in 0..src.len() {
            for j in 0..src.len() {
                if src.leq[i][j] && imgs[i] != imgs[j] {
                    rel.push((imgs[i].clone(), imgs[j].clone()));
                }
            }
        }
        SpectralPoset::from_relations(imgs, &rel).expect("image of a poset under a point map")
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }

    fn idx(&self, x: &T) -> Result<usize, PosetError> {
        self.index.get(x).copied().ok_or_else(|| PosetError::UnknownPoint(x.id()))
    }

    pub fn leq(&self, a: &T, b: &T) -> Result<bool, PosetError> {
        Ok(self.leq[self.idx(a)?][self.idx(b)?])
    }

    /// Hasse diagram: pairs a < b with nothing strictly between.
    pub fn covers(&self) -> Vec<(T, T)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j]);
                if !between {
                    out.push((self.points[i].clone(), self.points[j].clone()));
                }
            }
        }
        out
    }

    /// Everything in or above S.
    pub fn closure(&self, s: &[T]) -> Result<BTreeSet<T>, PosetError> {
        let ids: Vec<usize> = s.iter().map(|x| self.idx(x)).collect::<Result<_, _>>()?;
        Ok((0..self.len())
            .filter(|&j| ids.iter().any(|&i| self.leq[i][j]))
            .map(|j| self.points[j].clone())
            .collect())
    }

    pub fn minimal_points(&self) -> BTreeSet<T> {
        let n = self.len();
        (0..n)
            .filter(|&j| !(0..n).any(|i| i != j && self.leq[i][j]))
            .map(|j| self.points[j].clone())
            .collect()
    }

    pub fn maximal_points(&self) -> BTreeSet<T> {
        let n = self.len();
        (0..n)
            .filter(|&i| !(0..n).any(|j| i != j && self.leq[i][j]))
            .map(|i| self.points[i].clone())
            .collect()
    }

    fn sorted_by_id(&self) -> Vec<&T> {
        let mut v: Vec<&T> = self.points.iter().collect();
        v.sort_by_key(|p| p.id());
        v
    }

    fn sorted_covers(&self) -> Vec<(String, String)> {
        let mut c: Vec<(String, String)> = self.covers().iter().map(|(a, b)| (a.id(), b.id())).collect();
        c.sort();
        c
    }

    pub fn export_dot(&self) -> String {
        let mut s = String::from("digraph spectrum {\n  rankdir=BT;\n");
        for p in self.sorted_by_id() {
            s.push_str(&format!("  \"{}\" [label=\"{}\"];\n", p.id(), p.label().replace('"', "\\\"")));
        }
        for (a, b) in self.sorted_covers() {
            s.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .sorted_by_id()
            .into_iter()
            .map(|p| {
                let mut m = serde_json::Map::new();
                m.insert("id".into(), json!(p.id()));
                m.insert("label".into(), json!(p.label()));
                m.insert("kind".into(), json!(p.kind()));
                for (k, v) in p.extra() {
                    m.insert(k, v);
                }
                Value::Object(m)
            })
            .collect();
        let covers: Vec<Value> = self.sorted_covers().into_iter().map(|(a, b)| json!([a, b])).collect();
        json!({ "points": points, "covers": covers })
    }

    pub fn export_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
        s.push('\n');
        s
    }
}

/// Continuity of a map of finite spectral spaces, i.e. monotonicity.
pub fn is_continuous<S: PointLabel, T: PointLabel>(
    src: &SpectralPoset<S>,
    tgt: &SpectralPoset<T>,
    f: &BTreeMap<S, T>,
) -> Result<bool, PosetError> {
    let img = |x: &S| -> Result<&T, PosetError> {
        let y = f.get(x).ok_or_else(|| PosetError::UnknownPoint(x.id()))?;
        if !tgt.contains(y) {
            return Err(PosetError::UnknownPoint(y.id()));
        }
        Ok(y)
    };
    for a in src.points() {
        for b in src.points() {
            if src.leq(a, b)? && !tgt.leq(img(a)?, img(b)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---- truncations ----

/// Finite window on an infinite spectrum: a set of rational primes (always
/// including 2) and a chromatic height bound N; height-infinity points are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    primes: BTreeSet<u64>,
    heights: u32,
}

impl Truncation {
    pub fn new(primes: &[u64], heights: u32) -> Result<Truncation, PosetError> {
        if primes.is_empty() {
            return Err(PosetError::InvalidTruncation("no primes".into()));
        }
        if let Some(p) = primes.iter().find(|p| !arith::is_prime(**p)) {
            return Err(PosetError::InvalidTruncation(format!("{p} is not prime")));
        }
        if heights < 2 {
            return Err(PosetError::InvalidTruncation("height bound must be at least 2".into()));
        }
        let mut set: BTreeSet<u64> = primes.iter().copied().collect();
        set.insert(2);
        Ok(Truncation { primes: set, heights })
    }

    pub fn primes(&self) -> Vec<u64> {
        self.primes.iter().copied().collect()
    }

    pub fn odd_primes(&self) -> Vec<u64> {
        self.primes.iter().copied().filter(|p| *p != 2).collect()
    }

    pub fn heights(&self) -> u32 {
        self.heights
    }
}

// ---- Thornton's poset ----

/// Spec^h(K^MW_*(F)) restricted to a truncation, ordered by inclusion.
pub fn build_spec_h_kmw(field: &Field, t: &Truncation) -> SpectralPoset<HomogeneousPrime> {
    use HomogeneousPrime::*;
    let mut pts = vec![T1, T3];
    let mut rel = Vec::new();
    for p in t.primes() {
        pts.push(T2(p));
        rel.push((T1, T2(p)));
    }
    rel.push((T3, T2(2)));
    for a in field.orderings() {
        let a = a.index;
        pts.push(T4(a));
        pts.push(T5(a));
        rel.push((T4(a), T3));
        rel.push((T4(a), T5(a)));
        rel.push((T5(a), T2(2)));
        for p in t.odd_primes() {
            pts.push(T6(a, p));
            rel.push((T4(a), T6(a, p)));
        }
    }
    SpectralPoset::from_relations(pts, &rel).expect("Thornton poset is acyclic")
}

// ---- tensor-triangular points ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    fn succ(self) -> Height {
        match self {
            Height::Finite(n) => Height::Finite(n + 1),
            Height::Infinite => Height::Infinite,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Trivial,
    C2,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Trivial => write!(f, "e"),
            Group::C2 => write!(f, "C2"),
        }
    }
}

/// Points of Spc(SH^fin) (C(p,n)) and Spc(SH(C2)^c) (P(H,p,n)). Height 1 has
/// a single point, stored with p = 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TTPoint {
    Top { p: u64, n: Height },
    Equivariant { group: Group, p: u64, n: Height },
}

impl TTPoint {
    pub fn top(p: u64, n: Height) -> TTPoint {
        if n == Height::Finite(1) {
            TTPoint::Top { p: 0, n }
        } else {
            TTPoint::Top { p, n }
        }
    }

    pub fn equivariant(group: Group, p: u64, n: Height) -> TTPoint {
        if n == Height::Finite(1) {
            TTPoint::Equivariant { group, p: 0, n }
        } else {
            TTPoint::Equivariant { group, p, n }
        }
    }

    /// Whether the point comes from the chosen truncation.
    fn valid(&self) -> bool {
        let (p, n) = match self {
            TTPoint::Top { p, n } | TTPoint::Equivariant { p, n, .. } => (*p, *n),
        };
        match n {
            Height::Finite(1) => p == 0,
            Height::Finite(0) => false,
            _ => arith::is_prime(p),
        }
    }
}

impl fmt::Display for TTPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TTPoint::Top { p, n } => write!(f, "C({p},{n})"),
            TTPoint::Equivariant { group, p, n } => write!(f, "P({group},{p},{n})"),
        }
    }
}

impl PointLabel for TTPoint {
    fn id(&self) -> String {
        self.to_string()
    }
    fn label(&self) -> String {
        self.to_string()
    }
    fn kind(&self) -> String {
        match self {
            TTPoint::Top { .. } => "chromatic".into(),
            TTPoint::Equivariant { group: Group::Trivial, .. } => "equivariant-e".into(),
            TTPoint::Equivariant { group: Group::C2, .. } => "equivariant-C2".into(),
        }
    }
    fn extra(&self) -> Vec<(String, Value)> {
        let (p, n) = match self {
            TTPoint::Top { p, n } | TTPoint::Equivariant { p, n, .. } => (*p, *n),
        };
        vec![("p".into(), json!(p)), ("height".into(), json!(n.to_string()))]
    }
}

fn chain_heights(t: &Truncation) -> Vec<Height> {
    let mut h: Vec<Height> = (2..=t.heights()).map(Height::Finite).collect();
    h.push(Height::Infinite);
    h
}

fn chromatic_pattern(t: &Truncation, mk: impl Fn(u64, Height) -> TTPoint) -> (Vec<TTPoint>, Vec<(TTPoint, TTPoint)>) {
    let bottom = mk(0, Height::Finite(1));
    let mut pts = vec![bottom.clone()];
    let mut rel = Vec::new();
    for p in t.primes() {
        let mut prev = bottom.clone();
        for n in chain_heights(t) {
            let x = mk(p, n);
            pts.push(x.clone());
            rel.push((prev, x.clone()));
            prev = x;
        }
    }
    (pts, rel)
}

/// Spc(SH^fin): bottom C(0,1) and one chain C(p,2) < ... < C(p,N) < C(p,inf) per prime.
pub fn build_spc_sh_fin(t: &Truncation) -> SpectralPoset<TTPoint> {
    let (pts, rel) = chromatic_pattern(t, TTPoint::top);
    SpectralPoset::from_relations(pts, &rel).expect("chromatic chains are acyclic")
}

/// Spc(SH(C2)^c): a chromatic pattern for each of H = e, C2, plus the
/// comparisons at p = 2 between the C2 points and the e points one height up.
pub fn build_spc_sh_c2(t: &Truncation) -> SpectralPoset<TTPoint> {
    let (mut pts, mut rel) = chromatic_pattern(t, |p, n| TTPoint::equivariant(Group::Trivial, p, n));
    let (p2, r2) = chromatic_pattern(t, |p, n| TTPoint::equivariant(Group::C2, p, n));
    pts.extend(p2);
    rel.extend(r2);
    let e2: Vec<Height> = chain_heights(t);
    // P(C2,0,1) lies below the whole e-chain at 2
    for m in &e2 {
        rel.push((TTPoint::equivariant(Group::C2, 0, Height::Finite(1)), TTPoint::equivariant(Group::Trivial, 2, *m)));
    }
    // P(C2,2,k) lies below P(e,2,m) for m >= k+1
    for k in &e2 {
        for m in &e2 {
            if *m >= k.succ() {
                rel.push((TTPoint::equivariant(Group::C2, 2, *k), TTPoint::equivariant(Group::Trivial, 2, *m)));
            }
        }
    }
    SpectralPoset::from_relations(pts, &rel).expect("equivariant poset is acyclic")
}

pub(crate) fn check_tt_point(x: &TTPoint) -> bool {
    x.valid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use HomogeneousPrime::*;

    fn t(primes: &[u64], n: u32) -> Truncation {
        Truncation::new(primes, n).unwrap()
    }

    #[test]
    fn thornton_censuses() {
        let tr = t(&[2, 3, 5, 7], 2);
        assert_eq!(build_spec_h_kmw(&Field::rationals(), &tr).len(), 11);
        assert_eq!(build_spec_h_kmw(&Field::finite(3).unwrap(), &tr).len(), 6);
        assert_eq!(build_spec_h_kmw(&Field::real_quadratic(2).unwrap(), &tr).len(), 16);
        assert_eq!(build_spec_h_kmw(&Field::real_closed(), &tr).len(), 11);
        assert_eq!(build_spec_h_kmw(&Field::algebraically_closed(), &tr).len(), 6);
    }

    #[test]
    fn closure_of_type_four() {
        let p = build_spec_h_kmw(&Field::rationals(), &t(&[2, 3, 5], 2));
        let c = p.closure(&[T4(0)]).unwrap();
        let want: BTreeSet<_> = [T4(0), T6(0, 3), T6(0, 5), T5(0), T3, T2(2)].into_iter().collect();
        assert_eq!(c, want);
        assert!(p.closure(&[]).unwrap().is_empty());
    }

    #[test]
    fn minimal_and_maximal() {
        let tr = t(&[2, 3, 5], 2);
        let q = build_spec_h_kmw(&Field::rationals(), &tr);
        assert_eq!(q.minimal_points(), [T1, T4(0)].into_iter().collect());
        let maxi: BTreeSet<_> = [T2(2), T2(3), T2(5), T6(0, 3), T6(0, 5)].into_iter().collect();
        assert_eq!(q.maximal_points(), maxi);
        let f3 = build_spec_h_kmw(&Field::finite(3).unwrap(), &tr);
        assert_eq!(f3.minimal_points(), [T1, T3].into_iter().collect());
    }

    #[test]
    fn chromatic_counts() {
        assert_eq!(build_spc_sh_fin(&t(&[2, 3], 4)).len(), 9);
        assert_eq!(build_spc_sh_fin(&t(&[2], 2)).len(), 3);
        assert_eq!(build_spc_sh_c2(&t(&[2, 3], 3)).len(), 14);
        let fin = build_spc_sh_fin(&t(&[2, 3, 5], 3));
        assert_eq!(fin.minimal_points().len(), 1);
        assert_eq!(fin.closure(&[TTPoint::top(0, Height::Finite(1))]).unwrap().len(), fin.len());
    }

    #[test]
    fn equivariant_minimal_and_cross_order() {
        let c2 = build_spc_sh_c2(&t(&[2, 3], 3));
        let e01 = TTPoint::equivariant(Group::Trivial, 0, Height::Finite(1));
        let c01 = TTPoint::equivariant(Group::C2, 0, Height::Finite(1));
        assert_eq!(c2.minimal_points(), [e01.clone(), c01.clone()].into_iter().collect());
        let cl = c2.closure(&[c01]).unwrap();
        assert!(cl.contains(&TTPoint::equivariant(Group::Trivial, 2, Height::Infinite)));
        assert!(!cl.contains(&TTPoint::equivariant(Group::Trivial, 3, Height::Finite(2))));
        let cl_e = c2.closure(&[e01]).unwrap();
        assert!(cl_e.iter().all(|x| matches!(x, TTPoint::Equivariant { group: Group::Trivial, .. })));
        let c22 = TTPoint::equivariant(Group::C2, 2, Height::Finite(2));
        assert!(c2.leq(&c22, &TTPoint::equivariant(Group::Trivial, 2, Height::Finite(3))).unwrap());
        assert!(!c2.leq(&c22, &TTPoint::equivariant(Group::Trivial, 2, Height::Finite(2))).unwrap());
    }

    #[test]
    fn exports() {
        let empty: SpectralPoset<TTPoint> = SpectralPoset::from_relations(vec![], &[]).unwrap();
        assert_eq!(empty.export_dot(), "digraph spectrum {\n  rankdir=BT;\n}\n");
        let a = TTPoint::top(0, Height::Finite(1));
        let b = TTPoint::top(2, Height::Infinite);
        let chain = SpectralPoset::from_relations(vec![a.clone(), b.clone()], &[(a, b)]).unwrap();
        assert_eq!(chain.export_dot().matches("->").count(), 1);
        let q = build_spec_h_kmw(&Field::rationals(), &t(&[2, 3, 5, 7], 2));
        let j = q.to_json();
        assert_eq!(j["points"].as_array().unwrap().len(), 11);
        assert_eq!(q.export_json(), q.export_json());
    }

    #[test]
    fn cycles_are_rejected() {
        let a = TTPoint::top(0, Height::Finite(1));
        let b = TTPoint::top(2, Height::Infinite);
        assert!(SpectralPoset::from_relations(vec![a.clone(), b.clone()], &[(a.clone(), b.clone()), (b, a)]).is_err());
    }
}
