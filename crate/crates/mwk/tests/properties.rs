use proptest::prelude::*;
use rand::Rng;

use mwk::checks::{backends, random_element, random_homogeneous, rng};
use mwk::comparison::{contains, evaluate_at_prime};
use mwk::field::Field;
use mwk::gw::{self, DiagonalForm, GwElement};
use mwk::mw::{Decision, EqVerdict, MwElement};
use mwk::poset::{build_spc_sh_c2, build_spec_h_kmw, Truncation};
use mwk::syntax::parse_expression;

fn field(i: usize) -> Field {
    backends()[i % 6].clone()
}

fn tr() -> Truncation {
    Truncation::new(&[2, 3, 5, 7], 3).unwrap()
}

fn inhomogeneous(f: &Field, seed: u64) -> MwElement {
    let mut r = rng(seed);
    let mut e = MwElement::zero(f);
    for _ in 0..r.gen_range(1..=2) {
        let d = r.gen_range(-2..=2);
        e = e.add(&random_homogeneous(f, d, &mut r)).unwrap();
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent(i in 0usize..6, seed in any::<u64>()) {
        let f = field(i);
        let n = inhomogeneous(&f, seed).normalize();
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn normalize_preserves_value(i in 0usize..6, seed in any::<u64>()) {
        let f = field(i);
        let e = inhomogeneous(&f, seed);
        prop_assert_ne!(e.eq_verdict(&e.normalize()).unwrap(), EqVerdict::Distinct);
        prop_assert!(e.sub(&e.normalize()).unwrap().mod_eta().decide_zero() != Decision::NonZero);
    }

    #[test]
    fn quotients_commute_with_normalize(i in 0usize..6, seed in any::<u64>(), d in -2i64..=2) {
        let f = field(i);
        let mut r = rng(seed);
        let e = random_homogeneous(&f, d, &mut r);
        let n = e.normalize();
        let (a, b) = (e.invert_eta(), n.invert_eta());
        prop_assume!(a.is_ok() && b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        if !b.class.witt_is_zero().unwrap() {
            prop_assert_eq!(a.eta_exponent, b.eta_exponent);
        }
        prop_assert!(a.class.sub(&b.class).witt_is_zero().unwrap());
        let (a, b) = (e.mod_h(), n.mod_h());
        prop_assume!(a.is_ok() && b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert!(a.class.sub(&b.class).witt_is_zero().unwrap());
    }

    #[test]
    fn mod_h_lands_in_filtration(seed in any::<u64>(), d in 1i64..=3) {
        // Q, Q(sqrt 2) and the closures
        for f in [Field::rationals(), Field::real_closed(), Field::algebraically_closed(), Field::finite(5).unwrap()] {
            let mut r = rng(seed);
            let e = random_homogeneous(&f, d, &mut r);
            let m = e.mod_h().unwrap();
            match m.class.in_fundamental_power(d) {
                Ok(b) => prop_assert!(b, "{} over {}", e, f),
                Err(gw::GwError::UnsupportedDepth(_)) | Err(gw::GwError::UnsupportedEntries(_)) => {}
                Err(err) => prop_assert!(false, "{}", err),
            }
        }
    }

    #[test]
    fn render_round_trip(i in 0usize..6, seed in any::<u64>()) {
        let f = field(i);
        let e = inhomogeneous(&f, seed).normalize();
        let back = parse_expression(&e.render(), &f).unwrap();
        prop_assert_eq!(back.normalize(), e);
    }

    #[test]
    fn square_class_is_a_homomorphism(i in 0usize..6, seed in any::<u64>()) {
        let f = field(i);
        let mut r = rng(seed);
        let (x, y) = (random_element(&f, &mut r), random_element(&f, &mut r));
        let sx = f.square_class(&x);
        let sy = f.square_class(&y);
        prop_assume!(sx.is_ok() && sy.is_ok() && f.square_class(&f.mul(&x, &y)).is_ok());
        let lhs = f.square_class(&f.mul(&x, &y)).unwrap();
        let rhs = f.square_class(&f.mul(&f.square_class(&x).unwrap(), &f.square_class(&y).unwrap())).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(f.square_class(&f.mul(&x, &f.mul(&y, &y))).unwrap(), f.square_class(&x).unwrap());
    }

    #[test]
    fn homogeneous_primes_are_prime_ideals(i in 0usize..6, seed in any::<u64>()) {
        let f = field(i);
        let t = tr();
        let mut r = rng(seed);
        let a = random_homogeneous(&f, r.gen_range(-2..=2), &mut r);
        let b = random_homogeneous(&f, r.gen_range(-2..=2), &mut r);
        let c = random_homogeneous(&f, a.degree().unwrap().unwrap_or(0), &mut r);
        let ab = a.mul(&b).unwrap();
        for x in build_spec_h_kmw(&f, &t).points() {
            let (ia, ib, iab) = (contains(x, &a).unwrap(), contains(x, &b).unwrap(), contains(x, &ab).unwrap());
            prop_assert_eq!(iab, ia || ib, "{} at {}", ab, x);
            if ia && contains(x, &c).unwrap() && c.degree().unwrap().is_some() && a.degree().unwrap().is_some() {
                prop_assert!(contains(x, &a.add(&c).unwrap()).unwrap());
            }
            prop_assert_eq!(evaluate_at_prime(&ab, x).unwrap(), evaluate_at_prime(&a, x).unwrap().mul(&evaluate_at_prime(&b, x).unwrap()));
        }
    }

    #[test]
    fn closure_preserves_unions(seed in any::<u64>()) {
        let t = tr();
        let mut r = rng(seed);
        let p = build_spec_h_kmw(&Field::real_quadratic(2).unwrap(), &t);
        let s: Vec<_> = p.points().iter().filter(|_| r.gen_bool(0.2)).cloned().collect();
        let u: Vec<_> = p.points().iter().filter(|_| r.gen_bool(0.2)).cloned().collect();
        let both: Vec<_> = s.iter().chain(u.iter()).cloned().collect();
        let mut want = p.closure(&s).unwrap();
        want.extend(p.closure(&u).unwrap());
        prop_assert_eq!(p.closure(&both).unwrap(), want);
        let c2 = build_spc_sh_c2(&t);
        let s: Vec<_> = c2.points().iter().filter(|_| r.gen_bool(0.2)).cloned().collect();
        prop_assert!(p.closure(&[]).unwrap().is_empty());
        prop_assert_eq!(c2.closure(&s).unwrap(), c2.closure(&c2.closure(&s).unwrap().into_iter().collect::<Vec<_>>()).unwrap());
    }

    #[test]
    fn invariants_are_additive_over_q(seed in any::<u64>()) {
        let q = Field::rationals();
        let alpha = q.ordering(0).unwrap();
        let mut r = rng(seed);
        let mut mk = || DiagonalForm::new(&q, (0..r.gen_range(0..=5)).map(|_| random_element(&q, &mut r)).collect()).unwrap();
        let (a, b) = (mk(), mk());
        let (ga, gb) = (GwElement::from_form(&a).unwrap(), GwElement::from_form(&b).unwrap());
        let s = ga.add(&gb);
        prop_assert_eq!(s.rank(), ga.rank() + gb.rank());
        prop_assert_eq!(s.signature(&alpha).unwrap(), ga.signature(&alpha).unwrap() + gb.signature(&alpha).unwrap());
        let p = ga.mul(&gb).unwrap();
        prop_assert_eq!(p.signature(&alpha).unwrap(), ga.signature(&alpha).unwrap() * gb.signature(&alpha).unwrap());
        let ab = a.direct_sum(&b).unwrap();
        prop_assert!(gw::isometric(&ab, &b.direct_sum(&a).unwrap()).unwrap());
        let (an, h) = gw::witt_decompose(&ab).unwrap();
        prop_assert!(gw::isometric(&ab, &an.direct_sum(&DiagonalForm::hyperbolic(&q, h)).unwrap()).unwrap());
    }
}
