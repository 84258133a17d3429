//! Integer helpers: trial-division factorization, squarefree parts, residue symbols.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Factor `n` by trial division up to `bound`.
///
/// A cofactor left over after trial division is accepted when it is provably
/// prime (below `bound^2`) or the square of such a prime; anything else is
/// reported as `None`.
pub fn factor(n: u128, bound: u64) -> Option<Vec<(u128, u32)>> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut m = n;
    let bound = bound.max(2) as u128;
    let mut push = |p: u128, m: &mut u128| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut m);
    let mut p = 3u128;
    while p <= bound && p * p <= m {
        if m % p == 0 {
            push(p, &mut m);
        }
        p += 2;
    }
    if m == 1 {
        return Some(out);
    }
    if p * p > m {
        // no divisor up to sqrt(m): m is prime
        out.push((m, 1));
        return Some(out);
    }
    let bsq = bound.saturating_mul(bound);
    if m < bsq {
        out.push((m, 1));
        return Some(out);
    }
    let r = isqrt(m);
    if r * r == m && r < bsq {
        out.push((r, 2));
        return Some(out);
    }
    None
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of a small integer.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Legendre symbol (a/p) for odd prime p, a given as a residue.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Residue of a signed big integer modulo p.
pub fn mod_p(a: &BigInt, p: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

/// Residue of a rational with denominator prime to p.
pub fn rat_mod_p(x: &BigRational, p: u64) -> u64 {
    let n = mod_p(x.numer(), p);
    let d = mod_p(x.denom(), p);
    assert!(d != 0, "denominator divisible by p");
    let inv = pow_mod(d, p - 2, p);
    ((n as u128 * inv as u128) % p as u128) as u64
}

pub fn to_u128(n: &BigInt) -> Option<u128> {
    n.abs().to_u128()
}

/// Signed squarefree integer in the square class of `x`, with the prime
/// factorization of its absolute value.
pub fn rational_squarefree(x: &BigRational, bound: u64) -> Option<(BigInt, Vec<u128>)> {
    assert!(!x.is_zero());
    let num = to_u128(x.numer())?;
    let den = to_u128(x.denom())?;
    let mut odd: Vec<u128> = Vec::new();
    for (p, e) in factor(num, bound)?.into_iter().chain(factor(den, bound)?) {
        if e % 2 == 1 {
            if let Some(i) = odd.iter().position(|&q| q == p) {
                odd.remove(i);
            } else {
                odd.push(p);
            }
        }
    }
    odd.sort();
    let mut s = BigInt::from(1);
    for p in &odd {
        s *= BigInt::from(*p);
    }
    if x.is_negative() {
        s = -s;
    }
    Some((s, odd))
}

/// p-adic valuation of a nonzero big integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    while (&m % &p).is_zero() {
        m /= &p;
        v += 1;
    }
    v
}

/// Exact rational square root, if it exists.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}
