//! Morita's p-adic Gamma function.
//!
//! For a positive integer `m`, `Gamma_p(m) = (-1)^m * prod_{0<j<m, p∤j} j`;
//! the function extends continuously to `Z_p`. To evaluate at `x` we pick the
//! representative `m ≡ x (mod p^M')` in `1..=p^M'` with `M' = M + 1`
//! (`M + 2` for `p = 3`) and reduce modulo `p^M`.
//!
//! The product over `p^M'` integers is not computed term by term. Write
//! `P_k(x) = prod_{j<p^k, p∤j} (x + j)`; since the block product is only ever
//! evaluated at multiples of `p^k`, coefficients of degree `d` with
//! `k*d >= M` never matter. `P_(k+1)(x) = prod_(i<p) P_k(x + i p^k)`, and the
//! product up to `m` is assembled from the base-p digits of `m`. The direct
//! product is kept as [`gamma_p_direct`] and the two are cross-checked.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{big_pow, gcd};
use crate::error::{Error, Result};
use crate::padic::{check_prime, PadicNumber};

/// Extra p-adic digits of the representative beyond the output precision.
pub fn continuity_margin(p: u64) -> u32 {
    if p == 3 {
        2
    } else {
        1
    }
}

/// Block polynomials `P_1, ..., P_K` modulo `p^prec`, each truncated to the
/// degrees that matter at arguments divisible by `p^k`.
#[derive(Clone, Debug)]
pub struct BlockProducts {
    p: u64,
    prec: u32,
    modulus: BigInt,
    /// `blocks[k-1]` holds the coefficients of `P_k`, constant term first.
    blocks: Vec<Vec<BigInt>>,
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], len: usize, m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len.min(a.len() + b.len() - 1)];
    for (i, x) in a.iter().enumerate() {
        if i >= out.len() || x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= out.len() {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out.into_iter().map(|c| c.mod_floor(m)).collect()
}

/// `P(x + s)` by Horner on the coefficients.
fn taylor_shift(a: &[BigInt], s: &BigInt, m: &BigInt) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for c in a.iter().rev() {
        // out <- out * (x + s) + c
        let mut next = vec![BigInt::zero(); n];
        for i in 0..n {
            if out[i].is_zero() {
                continue;
            }
            next[i] += &out[i] * s;
            if i + 1 < n {
                next[i + 1] += &out[i];
            }
        }
        next[0] += c;
        out = next.into_iter().map(|v| v.mod_floor(m)).collect();
    }
    out
}

fn degree_bound(k: u32, prec: u32) -> usize {
    // degrees d with k*d < prec
    prec.div_ceil(k) as usize
}

impl BlockProducts {
    pub fn new(p: u64, prec: u32, levels: u32) -> Self {
        let modulus = big_pow(p, prec);
        let mut blocks: Vec<Vec<BigInt>> = Vec::new();
        if levels >= 1 {
            let len = degree_bound(1, prec);
            let mut poly = vec![BigInt::one()];
            for j in 1..p {
                poly = poly_mul_trunc(&poly, &[BigInt::from(j), BigInt::one()], len, &modulus);
            }
            blocks.push(poly);
        }
        for k in 1..levels {
            let prev = &blocks[k as usize - 1];
            let len = degree_bound(k + 1, prec);
            let pk = big_pow(p, k);
            let mut acc = vec![BigInt::one()];
            for i in 0..p {
                let shifted = taylor_shift(prev, &(&pk * i), &modulus);
                acc = poly_mul_trunc(&acc, &shifted, len, &modulus);
            }
            blocks.push(acc);
        }
        Self {
            p,
            prec,
            modulus,
            blocks,
        }
    }

    fn eval(&self, k: u32, x: &BigInt) -> BigInt {
        let poly = &self.blocks[k as usize - 1];
        let mut acc = BigInt::zero();
        for c in poly.iter().rev() {
            acc = (acc * x + c).mod_floor(&self.modulus);
        }
        acc
    }

    /// `prod_{0<j<m, p∤j} j mod p^prec`.
    pub fn unit_factorial(&self, m: &BigInt) -> BigInt {
        let p = self.p;
        let mut digits = Vec::new();
        let mut t = m.clone();
        let pb = BigInt::from(p);
        while !t.is_zero() {
            let (q, r) = t.div_rem(&pb);
            digits.push(r);
            t = q;
        }
        assert!(
            digits.len() <= self.blocks.len() + 1,
            "representative exceeds block table"
        );
        let mut acc = BigInt::one();
        let mut base = BigInt::zero();
        for i in (0..digits.len()).rev() {
            let d: u64 = (&digits[i]).try_into().unwrap();
            if i == 0 {
                for t in 0..d {
                    let j = &base + t;
                    if !(&j % p).is_zero() {
                        acc = (acc * j).mod_floor(&self.modulus);
                    }
                }
                base += d;
            } else {
                let step = big_pow(p, i as u32);
                for _ in 0..d {
                    acc = (acc * self.eval(i as u32, &base)).mod_floor(&self.modulus);
                    base += &step;
                }
            }
        }
        acc
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }
}

/// `Gamma_p(m)` for a positive integer `m` by the literal product.
pub fn gamma_p_direct(m: u64, p: u64, prec: u32) -> BigInt {
    let modulus = p.checked_pow(prec).expect("modulus must fit in 64 bits") as u128;
    let mut acc: u128 = 1;
    for j in 1..m {
        if j % p != 0 {
            acc = acc * j as u128 % modulus;
        }
    }
    if m % 2 == 1 {
        acc = (modulus - acc) % modulus;
    }
    BigInt::from(acc)
}

/// `Gamma_p` on integers modulo `p^prec`, with block tables sized for
/// representatives below `p^(prec + margin)`.
#[derive(Clone, Debug)]
pub struct GammaP {
    p: u64,
    prec: u32,
    rep_digits: u32,
    table: BlockProducts,
}

impl GammaP {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::InsufficientPrecision { needed: 1, have: 0 });
        }
        let rep_digits = prec + continuity_margin(p);
        Ok(Self {
            p,
            prec,
            rep_digits,
            table: BlockProducts::new(p, prec, rep_digits),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Digits of the representative, `M'`.
    pub fn rep_digits(&self) -> u32 {
        self.rep_digits
    }

    /// `Gamma_p(m)` for an integer `1 <= m <= p^M'` (any positive `m` within the table).
    pub fn at_integer(&self, m: &BigInt) -> BigInt {
        let modulus = big_pow(self.p, self.prec);
        let prod = self.table.unit_factorial(m);
        if m.is_odd() {
            (-prod).mod_floor(&modulus)
        } else {
            prod
        }
    }

    /// The representative `m` in `1..=p^M'` of an integral residue.
    pub fn representative(&self, residue: &BigInt) -> BigInt {
        let big = big_pow(self.p, self.rep_digits);
        let r = residue.mod_floor(&big);
        if r.is_zero() {
            big
        } else {
            r
        }
    }

    /// `Gamma_p(x)` for `x` in `Z_p`. The output precision is `min(M, A - margin)`
    /// when `x` is only known to absolute precision `A < M'`.
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        if x.p() != self.p {
            return Err(Error::PrimeMismatch(x.p(), self.p));
        }
        if let Some(v) = x.valuation() {
            if v < 0 {
                return Err(Error::NotIntegral(v));
            }
        }
        let margin = continuity_margin(self.p) as i64;
        let out_prec = match x.abs_prec() {
            None => self.prec as i64,
            Some(a) => (self.prec as i64).min(a - margin),
        };
        if out_prec < 1 {
            return Err(Error::InsufficientPrecision {
                needed: 1 + margin,
                have: x.abs_prec().unwrap_or(0),
            });
        }
        let digits = (out_prec + margin) as u32;
        let residue = x.to_integer_mod(digits)?;
        let m = self.representative(&residue);
        let value = self.at_integer(&m);
        Ok(PadicNumber::from_residue(value, self.p, out_prec as u32))
    }

    /// `Gamma_p(a/N)` with `p ∤ N`.
    pub fn at_rational(&self, a: i64, n: i64) -> Result<PadicNumber> {
        if n == 0 {
            return Err(Error::ZeroDenominator);
        }
        if gcd(n, self.p as i64) != 1 {
            return Err(Error::DivisibleByP(n, self.p));
        }
        let x = PadicNumber::from_rational(a, n, self.p, self.rep_digits + 2)?;
        self.eval(&x)
    }

    /// `log_p Gamma_p(a/N)`.
    pub fn log_at_rational(&self, a: i64, n: i64) -> Result<PadicNumber> {
        self.at_rational(a, n)?.iwasawa_log()
    }
}

/// `gamma_p(x)` at precision `prec`.
pub fn gamma_p(x: &PadicNumber, prec: u32) -> Result<PadicNumber> {
    GammaP::new(x.p(), prec)?.eval(x)
}

/// `Gamma_p(a/N)` at precision `prec`.
pub fn gamma_p_rational(a: i64, n: i64, p: u64, prec: u32) -> Result<PadicNumber> {
    GammaP::new(p, prec)?.at_rational(a, n)
}

/// `m(z)`: the integer in `1..=p` congruent to `z` modulo p.
pub fn reflection_index(z: &PadicNumber) -> Result<u64> {
    let r = z.residue()?;
    Ok(if r == 0 { z.p() } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_values() {
        let g = GammaP::new(7, 6).unwrap();
        assert_eq!(
            g.at_rational(3, 1).unwrap(),
            PadicNumber::from_int(-2, 7, 6).unwrap()
        );
        let g5 = GammaP::new(5, 6).unwrap();
        assert_eq!(
            g5.at_rational(1, 1).unwrap(),
            PadicNumber::from_int(-1, 5, 6).unwrap()
        );
        assert_eq!(
            g5.at_rational(2, 1).unwrap(),
            PadicNumber::from_int(1, 5, 6).unwrap()
        );
        // reflection: Gamma(2) Gamma(-1) = (-1)^2
        assert_eq!(
            g5.at_rational(-1, 1).unwrap(),
            PadicNumber::from_int(1, 5, 6).unwrap()
        );
    }

    #[test]
    fn gamma_of_zero_is_one() {
        for p in [3u64, 5, 7] {
            let g = GammaP::new(p, 5).unwrap();
            assert_eq!(g.at_rational(0, 1).unwrap(), PadicNumber::one(p, 5));
        }
    }

    #[test]
    fn fast_matches_direct() {
        for (p, prec) in [(3u64, 4u32), (5, 4), (7, 3), (13, 2)] {
            let g = GammaP::new(p, prec).unwrap();
            let top = p.pow(g.rep_digits());
            let step = (top / 397).max(1);
            let mut m = 1u64;
            while m <= top {
                assert_eq!(
                    g.at_integer(&BigInt::from(m)),
                    gamma_p_direct(m, p, prec),
                    "p={p} m={m}"
                );
                m += step;
            }
            assert_eq!(g.at_integer(&BigInt::from(top)), gamma_p_direct(top, p, prec));
        }
    }

    #[test]
    fn representative_independence() {
        for p in [3u64, 5, 7] {
            let prec = 3;
            let g = GammaP::new(p, prec).unwrap();
            let modulus = p.pow(g.rep_digits());
            for m in 1..60u64 {
                assert_eq!(
                    gamma_p_direct(m, p, prec),
                    gamma_p_direct(m + modulus, p, prec),
                    "p={p} m={m}"
                );
            }
        }
    }

    #[test]
    fn one_third_in_q7_golden() {
        let v = gamma_p_rational(1, 3, 7, 8).unwrap();
        // frozen from the direct product over the representative of 1/3 mod 7^9
        let direct = {
            let x = PadicNumber::from_rational(1, 3, 7, 12).unwrap();
            let m = x.to_integer_mod(9).unwrap();
            gamma_p_direct(u64::try_from(&m).unwrap(), 7, 8)
        };
        assert_eq!(v.unit(), direct);
        assert_eq!(v.unit(), BigInt::from(GAMMA_7_ONE_THIRD));
    }

    // Gamma_7(1/3) mod 7^8
    const GAMMA_7_ONE_THIRD: u64 = 4271992;

    #[test]
    fn reflection_on_thirds() {
        let g = GammaP::new(7, 6).unwrap();
        let a = g.at_rational(1, 3).unwrap();
        let b = g.at_rational(2, 3).unwrap();
        let z = PadicNumber::from_rational(1, 3, 7, 10).unwrap();
        let sign = if reflection_index(&z).unwrap().is_multiple_of(2) { 1 } else { -1 };
        assert_eq!(&a * &b, PadicNumber::from_int(sign, 7, 6).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(gamma_p_rational(1, 7, 7, 4), Err(Error::DivisibleByP(7, 7)));
        let x = PadicNumber::from_rational(1, 7, 7, 4).unwrap();
        assert_eq!(gamma_p(&x, 4), Err(Error::NotIntegral(-1)));
    }
}
