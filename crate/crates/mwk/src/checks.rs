//! Self-checks reachable from the command line. Each returns a JSON report
//! with a pass flag and a list of defects.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::comparison::{self, HomogeneousPrime};
use crate::field::{Field, FieldElement, FieldKind};
use crate::gw::{self, DiagonalForm, GwElement, SpecGwPoint};
use crate::mw::{Monomial, MwElement, Symbol};
use crate::poset::{self, build_spec_h_kmw, is_continuous, Group, Height, TTPoint, Truncation};

pub const CHECKS: &[&str] =
    &["identities", "census", "count", "closure", "rho", "coverage", "forms", "witt", "residue"];

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: Value,
    pub defects: Vec<String>,
}

impl CheckResult {
    fn new(name: &str, details: Value, defects: Vec<String>) -> CheckResult {
        CheckResult { name: name.into(), pass: defects.is_empty(), details, defects }
    }

    pub fn to_json(&self) -> Value {
        json!({ "check": self.name, "pass": self.pass, "details": self.details, "defects": self.defects })
    }
}

pub fn backends() -> Vec<Field> {
    vec![
        Field::finite(3).unwrap(),
        Field::finite(5).unwrap(),
        Field::rationals(),
        Field::real_quadratic(2).unwrap(),
        Field::real_closed(),
        Field::algebraically_closed(),
    ]
}

// ---- random data ----

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(r: &mut impl Rng) -> BigRational {
    loop {
        let n: i64 = r.gen_range(-40..=40);
        let d: i64 = r.gen_range(1..=12);
        if n != 0 {
            return BigRational::new(BigInt::from(n), BigInt::from(d));
        }
    }
}

/// A random nonzero element of small height.
pub fn random_element(field: &Field, r: &mut impl Rng) -> FieldElement {
    match field.kind() {
        FieldKind::Finite { .. } => {
            let q = field.order().unwrap();
            field.gen_pow(r.gen_range(0..(q - 1) as i64)).unwrap()
        }
        FieldKind::RealQuadratic(_) => loop {
            let a = if r.gen_bool(0.3) { BigRational::from_integer(0.into()) } else { small_rational(r) };
            let b = if r.gen_bool(0.4) { BigRational::from_integer(0.into()) } else { small_rational(r) };
            let x = field.quad(a, b).unwrap();
            if !field.is_zero(&x) {
                return x;
            }
        },
        _ => field.from_rational(small_rational(r)).unwrap(),
    }
}

/// A random homogeneous element of the given degree with a few monomials.
pub fn random_homogeneous(field: &Field, degree: i64, r: &mut impl Rng) -> MwElement {
    let mut e = MwElement::zero(field);
    for _ in 0..r.gen_range(1..=3) {
        let lo = 0.max(degree) as u32;
        let m = r.gen_range(lo..=lo + 2);
        let k = (m as i64 - degree) as u32;
        let syms = (0..m).map(|_| Symbol::new(field, random_element(field, r))).collect();
        let c = BigInt::from(r.gen_range(-3i64..=3));
        e = e.add(&MwElement::monomial(field, c, Monomial::new(k, syms))).unwrap();
    }
    e
}

// ---- 1. identities ----

pub fn identities(fields: &[Field], seed: u64) -> CheckResult {
    let mut r = rng(seed);
    let mut defects = Vec::new();
    let mut count = 0;
    for f in fields {
        let eta = MwElement::eta(f);
        let one = MwElement::integer(f, 1);
        let eps = MwElement::eps(f);
        let m1 = MwElement::symbol(f, f.minus_one()).unwrap();
        let two_plus = MwElement::integer(f, 2).add(&m1.mul(&eta).unwrap()).unwrap();
        let mut cases = vec![
            ("(2+[-1]eta)eta".to_string(), two_plus.mul(&eta).unwrap()),
            ("[1]".to_string(), MwElement::symbol(f, f.one()).unwrap()),
            ("eps*eta-eta".to_string(), eps.mul(&eta).unwrap().sub(&eta).unwrap()),
            ("eps^2-1".to_string(), eps.mul(&eps).unwrap().sub(&one).unwrap()),
            ("h*eta^3".to_string(), MwElement::h(f).mul(&eta.pow(3)).unwrap()),
        ];
        for _ in 0..10 {
            let u = random_element(f, &mut r);
            let su = MwElement::symbol(f, u.clone()).unwrap();
            let smu = MwElement::symbol(f, f.neg(&u)).unwrap();
            cases.push((format!("[u][-u], u={}", f.render(&u)), su.mul(&smu).unwrap()));
        }
        for _ in 0..10 {
            let u = random_element(f, &mut r);
            let su = MwElement::symbol(f, u.clone()).unwrap();
            let x = su.mul(&su).unwrap().sub(&su.mul(&m1).unwrap()).unwrap();
            cases.push((format!("[u][u]-[u][-1], u={}", f.render(&u)), x));
        }
        for (name, e) in cases {
            count += 1;
            let n = e.normalize();
            if !n.is_formally_zero() {
                defects.push(format!("{f}: {name} normalizes to {n}"));
            }
        }
    }
    CheckResult::new("identities", json!({ "cases": count }), defects)
}

// ---- 2. census ----

/// Type count 1 + |P| + 1 + |X| (2 + #odd primes).
pub fn expected_census(field: &Field, t: &Truncation) -> usize {
    2 + t.primes().len() + field.orderings().len() * (2 + t.odd_primes().len())
}

pub fn census(fields: &[Field], t: &Truncation) -> CheckResult {
    let mut rows = Vec::new();
    let mut defects = Vec::new();
    for f in fields {
        let p = build_spec_h_kmw(f, t);
        let want = expected_census(f, t);
        let mins = p.minimal_points();
        let mut want_min: BTreeSet<HomogeneousPrime> = f.orderings().iter().map(|a| HomogeneousPrime::T4(a.index)).collect();
        want_min.insert(HomogeneousPrime::T1);
        if f.is_nonreal() {
            want_min.insert(HomogeneousPrime::T3);
        }
        if p.len() != want {
            defects.push(format!("{f}: {} points, type census gives {want}", p.len()));
        }
        if mins != want_min {
            defects.push(format!("{f}: unexpected minimal points"));
        }
        rows.push(json!({
            "field": f.to_string(),
            "points": p.len(),
            "minimal": mins.iter().map(|x| x.literal()).collect::<Vec<_>>(),
            "orderings": f.orderings().len(),
        }));
    }
    CheckResult::new("census", json!({ "fields": rows }), defects)
}

// ---- 3. count identity ----

pub fn count(fields: &[Field], t: &Truncation) -> CheckResult {
    let mut rows = Vec::new();
    let mut defects = Vec::new();
    for f in fields {
        let (h, g, x1) = comparison::spec_size_identity(f, t);
        if h != g + x1 {
            defects.push(format!("{f}: |Spec^h| = {h}, |SpecGW| = {g}, |X_F|+1 = {x1}"));
        }
        let fibers = comparison::degree_zero_fibers(f, t);
        for (y, xs) in &fibers {
            let want = if *y == SpecGwPoint::Dim(2) { x1 + 1 } else { 1 };
            if xs.len() != want {
                defects.push(format!("{f}: fiber over {y} has {} points, expected {want}", xs.len()));
            }
        }
        rows.push(json!({ "field": f.to_string(), "spec_h": h, "spec_gw": g, "x_f_plus_one": x1 }));
    }
    CheckResult::new("count", json!({ "fields": rows }), defects)
}

// ---- 4. closure ----

pub fn closure(fields: &[Field], t: &Truncation, samples: usize, seed: u64) -> CheckResult {
    let mut defects = Vec::new();
    let q = Field::rationals();
    let small = Truncation::new(&[2, 3, 5], t.heights()).unwrap();
    let got = build_spec_h_kmw(&q, &small).closure(&[HomogeneousPrime::T4(0)]).unwrap();
    use HomogeneousPrime::*;
    let want: BTreeSet<_> = [T4(0), T6(0, 3), T6(0, 5), T5(0), T3, T2(2)].into_iter().collect();
    if got != want {
        defects.push("closure of ([P_a0],h) over Q, primes {2,3,5}".into());
    }
    let mut r = rng(seed);
    let mut law = |name: &str, pts: Vec<String>, cl: &dyn Fn(&[usize]) -> BTreeSet<usize>| {
        let n = pts.len();
        for _ in 0..samples {
            let s: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
            let s2: Vec<usize> = s.iter().copied().chain((0..n).filter(|_| r.gen_bool(0.2))).collect();
            let c = cl(&s);
            let cc = cl(&c.iter().copied().collect::<Vec<_>>());
            let c2 = cl(&s2);
            if !s.iter().all(|i| c.contains(i)) {
                defects.push(format!("{name}: closure not extensive"));
            }
            if c != cc {
                defects.push(format!("{name}: closure not idempotent"));
            }
            if !c.is_subset(&c2) {
                defects.push(format!("{name}: closure not monotone"));
            }
        }
    };
    for f in fields {
        let p = build_spec_h_kmw(f, t);
        let pts: Vec<HomogeneousPrime> = p.points().to_vec();
        let cl = |s: &[usize]| -> BTreeSet<usize> {
            let sel: Vec<HomogeneousPrime> = s.iter().map(|i| pts[*i].clone()).collect();
            p.closure(&sel).unwrap().iter().map(|x| pts.iter().position(|y| y == x).unwrap()).collect()
        };
        law(&format!("Spec^h {f}"), pts.iter().map(|x| x.literal()).collect(), &cl);
    }
    for (name, p) in [("SH^fin", poset::build_spc_sh_fin(t)), ("SH(C2)", poset::build_spc_sh_c2(t))] {
        let pts: Vec<TTPoint> = p.points().to_vec();
        let cl = |s: &[usize]| -> BTreeSet<usize> {
            let sel: Vec<TTPoint> = s.iter().map(|i| pts[*i].clone()).collect();
            p.closure(&sel).unwrap().iter().map(|x| pts.iter().position(|y| y == x).unwrap()).collect()
        };
        law(name, pts.iter().map(|x| x.to_string()).collect(), &cl);
    }
    defects.dedup();
    CheckResult::new("closure", json!({ "samples_per_poset": samples }), defects)
}

// ---- 5. rho tables ----

pub fn rho(fields: &[Field], t: &Truncation) -> CheckResult {
    use HomogeneousPrime::*;
    let mut defects = Vec::new();
    let top = |p, n| TTPoint::top(p, n);
    for (x, y) in [
        (top(0, Height::Finite(1)), T1),
        (top(3, Height::Finite(2)), T2(3)),
        (top(2, Height::Infinite), T2(2)),
    ] {
        if comparison::rho_bullet_sh_fin(&x).ok() != Some(y.clone()) {
            defects.push(format!("rho SH^fin at {x}"));
        }
    }
    let q = Field::rationals();
    let eq = |g, p, n| TTPoint::equivariant(g, p, n);
    for (x, y) in [
        (eq(Group::Trivial, 0, Height::Finite(1)), T1),
        (eq(Group::C2, 0, Height::Finite(1)), T4(0)),
        (eq(Group::Trivial, 3, Height::Finite(2)), T2(3)),
        (eq(Group::C2, 2, Height::Finite(3)), T5(0)),
        (eq(Group::C2, 5, Height::Finite(2)), T6(0, 5)),
    ] {
        if comparison::rho_bullet_sh_c2(&x, &q, 0).ok() != Some(y.clone()) {
            defects.push(format!("rho SH(C2) at {x}"));
        }
    }
    for f in fields {
        let spec = build_spec_h_kmw(f, t);
        let fin = poset::build_spc_sh_fin(t);
        let table = comparison::rho_sh_fin_table(t);
        if !is_continuous(&fin, &spec, &table).unwrap_or(false) {
            defects.push(format!("{f}: SH^fin map not continuous"));
        }
        let img: BTreeSet<_> = table.values().cloned().collect();
        let want: BTreeSet<_> = spec.points().iter().filter(|x| matches!(x.type_tag(), 1 | 2)).cloned().collect();
        if img != want {
            defects.push(format!("{f}: SH^fin image is not the type (1),(2) subset"));
        }
        if f.is_nonreal() {
            continue;
        }
        let c2 = poset::build_spc_sh_c2(t);
        let mut union = BTreeSet::new();
        for a in f.orderings() {
            let table = comparison::rho_sh_c2_table(f, t, a.index).unwrap();
            if !is_continuous(&c2, &spec, &table).unwrap_or(false) {
                defects.push(format!("{f}: SH(C2) map at {a} not continuous"));
            }
            union.extend(table.values().cloned());
        }
        let mut want: BTreeSet<_> = spec.points().iter().cloned().collect();
        want.remove(&T3);
        if union != want {
            defects.push(format!("{f}: SH(C2) images miss or exceed Spec^h minus ([F^x],2)"));
        }
    }
    // a corrupted table must be caught
    let fin = poset::build_spc_sh_fin(t);
    let mut bad = comparison::rho_sh_fin_table(t);
    let (a, b) = (top(0, Height::Finite(1)), top(2, Height::Finite(2)));
    let (ya, yb) = (bad[&a].clone(), bad[&b].clone());
    bad.insert(a, yb);
    bad.insert(b, ya);
    if is_continuous(&fin, &build_spec_h_kmw(&q, t), &bad).unwrap_or(true) {
        defects.push("corrupted SH^fin table passes the continuity test".into());
    }
    CheckResult::new("rho", json!({ "heights": t.heights(), "primes": t.primes() }), defects)
}

// ---- 6. coverage ----

pub fn coverage(fields: &[Field], t: &Truncation) -> CheckResult {
    let mut reports = Vec::new();
    let mut defects = Vec::new();
    for f in fields {
        let r = comparison::coverage_report(f, t);
        for c in &r.checks {
            for d in &c.defects {
                defects.push(format!("{f} {}: {d}", c.name));
            }
        }
        reports.push(r.to_json());
    }
    CheckResult::new("coverage", json!({ "reports": reports }), defects)
}

// ---- 7. forms ----

fn fq_values(f: &Field) -> Vec<FieldElement> {
    let q = f.order().unwrap() as i64;
    (0..q - 1).map(|k| f.gen_pow(k).unwrap()).collect()
}

// The brute-force oracle works over prime fields with plain residues.

fn residues(f: &Field, d: &[FieldElement]) -> (u64, Vec<u64>) {
    let p = f.order().expect("finite field");
    let r = d
        .iter()
        .map(|x| match x {
            FieldElement::Fq(v) => *v as u64,
            _ => panic!("not an element of a finite field"),
        })
        .collect();
    (p, r)
}

fn all_vectors(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u64>| (0..p).map(move |e| {
                let mut w = v.clone();
                w.push(e);
                w
            }))
            .collect();
    }
    out
}

fn bilinear(p: u64, d: &[u64], x: &[u64], y: &[u64]) -> u64 {
    (0..d.len()).map(|i| d[i] * x[i] % p * y[i]).sum::<u64>() % p
}

fn pow_mod(b: u64, e: u64, p: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % p)
}

fn independent(p: u64, vs: &[Vec<u64>]) -> bool {
    // Gaussian elimination mod p
    let mut m = vs.to_vec();
    let n = m.first().map(|v| v.len()).unwrap_or(0);
    let mut row = 0;
    for col in 0..n {
        let Some(piv) = (row..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, piv);
        let inv = pow_mod(m[row][col], p - 2, p);
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let c = m[r][col] * inv % p;
                for k in 0..n {
                    m[r][k] = (m[r][k] + p * p - c * m[row][k]) % p;
                }
            }
        }
        row += 1;
    }
    row == m.len()
}

/// Exhaustive search for an orthogonal basis of <d> with values e, over a
/// prime field.
pub fn brute_isometric(f: &Field, d: &[FieldElement], e: &[FieldElement]) -> bool {
    if d.len() != e.len() {
        return false;
    }
    let (p, d) = residues(f, d);
    let (_, e) = residues(f, e);
    let vecs = all_vectors(p, d.len());
    fn go(p: u64, d: &[u64], e: &[u64], vecs: &[Vec<u64>], chosen: &mut Vec<Vec<u64>>) -> bool {
        let i = chosen.len();
        if i == e.len() {
            return true;
        }
        for v in vecs {
            if bilinear(p, d, v, v) != e[i] || chosen.iter().any(|w| bilinear(p, d, v, w) != 0) {
                continue;
            }
            chosen.push(v.clone());
            if independent(p, chosen) && go(p, d, e, vecs, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(p, &d, &e, &vecs, &mut Vec::new())
}

pub fn brute_anisotropic(f: &Field, d: &[FieldElement]) -> bool {
    let (p, d) = residues(f, d);
    all_vectors(p, d.len())
        .into_iter()
        .filter(|v| v.iter().any(|x| *x != 0))
        .all(|v| bilinear(p, &d, &v, &v) != 0)
}

pub fn diagonal_corpus(f: &Field, max_rank: usize) -> Vec<Vec<FieldElement>> {
    let vals = fq_values(f);
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_rank {
        layer = layer
            .into_iter()
            .flat_map(|v: Vec<FieldElement>| vals.iter().map(move |e| {
                let mut w = v.clone();
                w.push(e.clone());
                w
            }))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn forms(pairs: usize, seed: u64) -> CheckResult {
    let mut defects = Vec::new();
    let mut compared = 0;
    for f in [Field::finite(3).unwrap(), Field::finite(5).unwrap()] {
        let corpus = diagonal_corpus(&f, 3);
        for a in &corpus {
            let fa = DiagonalForm::new(&f, a.clone()).unwrap();
            for b in corpus.iter().filter(|b| b.len() == a.len()) {
                let fb = DiagonalForm::new(&f, b.clone()).unwrap();
                compared += 1;
                if gw::isometric(&fa, &fb).unwrap() != brute_isometric(&f, a, b) {
                    defects.push(format!("{f}: isometry of {fa} and {fb}"));
                }
            }
            let (an, h) = gw::witt_decompose(&fa).unwrap();
            let back = an.direct_sum(&DiagonalForm::hyperbolic(&f, h)).unwrap();
            if !brute_isometric(&f, a, back.entries()) || !brute_anisotropic(&f, an.entries()) {
                defects.push(format!("{f}: Witt decomposition of {fa}"));
            }
        }
    }
    let q = Field::rationals();
    let mut r = rng(seed);
    let alpha = q.ordering(0).unwrap();
    for _ in 0..pairs {
        let mk = |r: &mut ChaCha8Rng| {
            let n = r.gen_range(0..=4);
            DiagonalForm::new(&q, (0..n).map(|_| random_element(&q, r)).collect()).unwrap()
        };
        let (a, b) = (mk(&mut r), mk(&mut r));
        let (ia, ib) = (gw::invariants(&a).unwrap(), gw::invariants(&b).unwrap());
        let s = gw::invariants(&a.direct_sum(&b).unwrap()).unwrap();
        let t = gw::invariants(&a.tensor(&b).unwrap()).unwrap();
        let disc_sum = q.square_class(&q.mul(&ia.disc, &ib.disc)).unwrap();
        let disc_tensor = q
            .square_class(&q.mul(&q.pow(&ia.disc, (ib.rank % 2) as i64).unwrap(), &q.pow(&ib.disc, (ia.rank % 2) as i64).unwrap()))
            .unwrap();
        let ok = s.rank == ia.rank + ib.rank
            && s.disc == disc_sum
            && s.signatures[0] == ia.signatures[0] + ib.signatures[0]
            && t.rank == ia.rank * ib.rank
            && t.disc == disc_tensor
            && t.signatures[0] == ia.signatures[0] * ib.signatures[0]
            && GwElement::from_form(&a.direct_sum(&b).unwrap()).unwrap().signature(&alpha).unwrap()
                == ia.signatures[0] as i128 + ib.signatures[0] as i128;
        if !ok {
            defects.push(format!("invariant laws fail for {a}, {b}"));
        }
    }
    CheckResult::new("forms", json!({ "finite_pairs": compared, "rational_pairs": pairs }), defects)
}

// ---- 8. Witt ring ----

/// Distinct Witt classes among forms of rank <= 4, with the group data.
pub fn witt_classes(f: &Field) -> Vec<GwElement> {
    let mut reps: Vec<GwElement> = Vec::new();
    for d in diagonal_corpus(f, 4) {
        let x = GwElement::from_form(&DiagonalForm::new(f, d).unwrap()).unwrap();
        if !reps.iter().any(|y| x.sub(y).witt_is_zero().unwrap()) {
            reps.push(x);
        }
    }
    reps
}

fn additive_order(x: &GwElement) -> usize {
    let mut acc = x.clone();
    let mut n = 1;
    while !acc.witt_is_zero().unwrap() {
        acc = acc.add(x);
        n += 1;
    }
    n
}

pub fn witt() -> CheckResult {
    let mut defects = Vec::new();
    let mut rows = Vec::new();
    for (q, want_max_order) in [(3u64, 4usize), (5, 2)] {
        let f = Field::finite(q).unwrap();
        let cls = witt_classes(&f);
        let orders: Vec<usize> = cls.iter().map(additive_order).collect();
        let max = orders.iter().copied().max().unwrap_or(1);
        // closure of the class set under + and *
        for a in &cls {
            for b in &cls {
                for c in [a.add(b), a.mul(b).unwrap()] {
                    if !cls.iter().any(|y| c.sub(y).witt_is_zero().unwrap()) {
                        defects.push(format!("{f}: class table not closed"));
                    }
                }
            }
        }
        if cls.len() != 4 || max != want_max_order {
            defects.push(format!("{f}: {} classes, largest additive order {max}", cls.len()));
        }
        rows.push(json!({ "field": f.to_string(), "classes": cls.len(), "max_order": max }));
    }
    let r = Field::real_closed();
    let alpha = r.ordering(0).unwrap();
    let forms: Vec<DiagonalForm> = (0..=6usize)
        .flat_map(|n| (0..=n).map(move |neg| (n, neg)))
        .map(|(n, neg)| {
            let mut e = vec![r.from_int(1); n - neg];
            e.extend(vec![r.from_int(-1); neg]);
            DiagonalForm::new(&r, e).unwrap()
        })
        .collect();
    for a in &forms {
        let ga = GwElement::from_form(a).unwrap();
        let sa = ga.signature(&alpha).unwrap();
        for b in &forms {
            let gb = GwElement::from_form(b).unwrap();
            let same = ga.sub(&gb).witt_is_zero().unwrap();
            if same != (sa == gb.signature(&alpha).unwrap()) {
                defects.push(format!("Rclosed: signature vs Witt class for {a}, {b}"));
            }
        }
        for n in 0..=4 {
            let want = sa.rem_euclid(1 << n) == 0;
            if gw::in_fundamental_power(a, n).unwrap() != want {
                defects.push(format!("Rclosed: I^{n} membership of {a}"));
            }
        }
    }
    CheckResult::new("witt", json!({ "finite": rows, "real_closed_forms": forms.len() }), defects)
}

// ---- 9. residue fields and evaluation ----

fn sample_primes(f: &Field, t: &Truncation) -> Vec<HomogeneousPrime> {
    build_spec_h_kmw(f, t).points().to_vec()
}

pub fn residue(fields: &[Field], t: &Truncation, pairs: usize, seed: u64) -> CheckResult {
    use comparison::ResidueField as R;
    use HomogeneousPrime::*;
    let mut defects = Vec::new();
    let table = [
        (T1, R::Rationals),
        (T2(3), R::Prime(3)),
        (T3, R::F2EtaLaurent),
        (T4(0), R::QEtaLaurent),
        (T5(0), R::F2MinusOneLaurent),
        (T6(0, 5), R::PrimeEtaLaurent(5)),
    ];
    for (x, want) in table {
        if comparison::residue_field(&x) != want {
            defects.push(format!("residue field of {x}"));
        }
    }
    let mut r = rng(seed);
    let mut evaluated = 0;
    for f in fields {
        // one representative per type
        let mut reps: BTreeMap<u8, HomogeneousPrime> = BTreeMap::new();
        for x in sample_primes(f, t) {
            reps.entry(x.type_tag()).or_insert(x);
        }
        for x in reps.values() {
            for g in comparison::generators(f, x, t).unwrap() {
                if !comparison::contains(x, &g).unwrap() {
                    defects.push(format!("{f}: generator {g} of {x} survives"));
                }
            }
            for _ in 0..pairs {
                let (d1, d2) = (r.gen_range(-2..=2), r.gen_range(-2..=2));
                let a = random_homogeneous(f, d1, &mut r);
                let b = random_homogeneous(f, d2, &mut r);
                let ea = comparison::evaluate_at_prime(&a, x).unwrap();
                let eb = comparison::evaluate_at_prime(&b, x).unwrap();
                let eab = comparison::evaluate_at_prime(&a.mul(&b).unwrap(), x).unwrap();
                evaluated += 1;
                if eab != ea.mul(&eb) {
                    defects.push(format!("{f}: evaluation at {x} not multiplicative on {a} and {b}"));
                }
            }
        }
    }
    defects.truncate(50);
    CheckResult::new("residue", json!({ "pairs": evaluated }), defects)
}

/// Run a named check (or `all`) with CLI defaults.
pub fn run(name: &str, fields: &[Field], t: &Truncation, seed: u64) -> Result<Vec<CheckResult>, String> {
    let one = |n: &str| -> Result<CheckResult, String> {
        Ok(match n {
            "identities" => identities(fields, seed),
            "census" => census(fields, t),
            "count" => count(fields, t),
            "closure" => closure(fields, t, 1000, seed),
            "rho" => rho(fields, t),
            "coverage" => coverage(fields, t),
            "forms" => forms(10_000, seed),
            "witt" => witt(),
            "residue" => residue(fields, t, 10_000, seed),
            _ => return Err(format!("unknown check '{n}'")),
        })
    };
    if name == "all" {
        CHECKS.iter().map(|n| one(n)).collect()
    } else {
        Ok(vec![one(name)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_agrees_on_small_cases() {
        let f5 = Field::finite(5).unwrap();
        let e = |xs: &[i64]| xs.iter().map(|x| f5.from_int(*x)).collect::<Vec<_>>();
        assert!(brute_isometric(&f5, &e(&[1, 1]), &e(&[2, 2])));
        assert!(!brute_isometric(&f5, &e(&[1, 1]), &e(&[1, 2])));
        assert!(!brute_anisotropic(&f5, &e(&[1, 1])));
        let f3 = Field::finite(3).unwrap();
        assert!(brute_anisotropic(&f3, &[f3.one(), f3.one()]));
    }

    #[test]
    fn quick_checks_pass() {
        let t = Truncation::new(&[2, 3, 5, 7], 3).unwrap();
        let fs = backends();
        for c in [identities(&fs, 7), count(&fs, &t), rho(&fs, &t), coverage(&fs, &t), census(&fs, &t)] {
            assert!(c.pass, "{} {:?}", c.name, c.defects);
        }
    }
}
