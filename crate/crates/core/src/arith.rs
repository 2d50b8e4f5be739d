//! Small-integer number theory used throughout: primality, factorization,
//! orders, primitive roots, Kronecker symbols, Bernoulli numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Reduce a signed integer into `0..m`.
pub fn modulo(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let e = (a as i64).extended_gcd(&(m as i64));
    if e.gcd != 1 {
        return None;
    }
    Some(modulo(e.x, m))
}

/// Multiplicative order of `a` modulo `n`; `a` must be a unit.
pub fn mult_order(a: u64, n: u64) -> u64 {
    assert_eq!(gcd(a as i64, n as i64), 1, "mult_order of a non-unit");
    if n == 1 {
        return 1;
    }
    let phi = euler_phi(n);
    let mut ord = phi;
    for q in prime_divisors(phi) {
        while ord.is_multiple_of(q) && mod_pow(a, ord / q, n) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Least primitive root modulo an odd prime power `l^e` (or modulo 2, 4).
pub fn primitive_root(l: u64, e: u32) -> u64 {
    let m = l.pow(e);
    if m <= 2 {
        return 1;
    }
    if m == 4 {
        return 3;
    }
    let phi = euler_phi(m);
    (2..m)
        .find(|&g| gcd(g as i64, m as i64) == 1 && mult_order(g, m) == phi)
        .expect("odd prime powers have primitive roots")
}

/// p-adic valuation of a nonzero integer.
pub fn val_i64(n: i64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i64;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn val_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn big_pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Chinese remaindering of pairwise coprime moduli.
pub fn crt(residues: &[u64], moduli: &[u64]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for (&r, &n) in residues.iter().zip(moduli) {
        // solve x + m*t = r mod n
        let mm = (m % n as u128) as u64;
        let inv = mod_inv(mm, n).expect("moduli must be coprime");
        let diff = modulo(r as i64 - (x % n as u128) as i64, n);
        let t = (diff as u128 * inv as u128) % n as u128;
        x += m * t;
        m *= n as u128;
        x %= m;
    }
    x as u64
}

/// Kronecker symbol (d / n) for n >= 1.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    // factor out 2
    let mut twos = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    for (q, e) in factorize(n) {
        let leg = legendre(d, q);
        if leg == 0 {
            return 0;
        }
        if e % 2 == 1 {
            result *= leg;
        }
    }
    result
}

/// Legendre symbol for an odd prime q.
pub fn legendre(a: i64, q: u64) -> i32 {
    let r = modulo(a, q);
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Bernoulli numbers B_0..=B_n with B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        // binom is now C(m+1, m)
        b.push(-acc / BigRational::from_integer(binom));
    }
    b
}

/// Bernoulli polynomial B_n(x) evaluated at a rational.
pub fn bernoulli_poly(n: usize, x: &BigRational, bern: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    let mut xpow = BigRational::one();
    // B_n(x) = sum_k C(n,k) B_{n-k} x^k
    for k in 0..=n {
        acc += BigRational::from_integer(binom.clone()) * &bern[n - k] * &xpow;
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        xpow *= x;
    }
    acc
}

pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    // generalized binomial for any integer n
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Integer square root (floor) of a nonnegative integer.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn orders_and_roots() {
        assert_eq!(mult_order(7, 3), 1);
        assert_eq!(mult_order(5, 3), 2);
        assert_eq!(mult_order(11, 7), 3);
        assert_eq!(primitive_root(7, 1), 3);
        assert_eq!(primitive_root(5, 2), 2);
        assert_eq!(mult_order(primitive_root(13, 1), 13), 12);
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        let r = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[6], r(1, 42));
        assert_eq!(b[8], r(-1, 30));
    }

    #[test]
    fn kronecker_matches_legendre_and_twos() {
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-23, 3), 1);
        assert_eq!(kronecker(-8, 3), 1);
    }

    #[test]
    fn crt_roundtrip() {
        let x = crt(&[2, 3, 1], &[3, 5, 7]);
        assert_eq!(x % 3, 2);
        assert_eq!(x % 5, 3);
        assert_eq!(x % 7, 1);
    }
}
