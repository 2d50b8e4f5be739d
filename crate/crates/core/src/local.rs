//! The unramified extension `Q_q` of degree `f` over `Q_p` and the totally
//! ramified tower `Q_q(pi)`, `pi^(p-1) = -p`.
//!
//! Residue-field elements are coefficient vectors over `F_p` in the basis
//! `1, x, ..., x^(f-1)` modulo the chosen modulus. The modulus is the least
//! monic irreducible polynomial of degree `f` when the non-leading
//! coefficients `c_0, ..., c_(f-1)` are ordered by the integer
//! `c_0 + c_1 p + ... + c_(f-1) p^(f-1)`; for `f = 1` this is `x`.
//!
//! `Z_q` elements are the same vectors with coefficients in `Z/p^W` and the
//! modulus lifted coefficientwise. An element of `Z_q[pi]` is stored as its
//! `p - 1` coordinates in the basis `1, pi, ..., pi^(p-2)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{big_pow, binomial, is_prime, mod_inv, prime_divisors};
use crate::error::{Error, Result};
use crate::padic::{check_prime, PadicNumber};

/// Largest residue field the enumerating routines accept by default.
pub const DEFAULT_MAX_Q: u64 = 1_000_000;

/// `F_q` as `F_p[x]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    f: u32,
    /// Monic, length `f + 1`, constant term first.
    modulus: Vec<u64>,
    /// `Tr(x^i)` for `i < f`.
    trace_basis: Vec<u64>,
}

pub type ResidueElem = Vec<u64>;

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

/// Remainder of `a` modulo a monic `m`.
fn poly_rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let d = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

/// Remainder for a general (not necessarily monic) nonzero divisor.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = poly_trim(m.to_vec());
    let lead_inv = mod_inv(*m.last().unwrap(), p).unwrap();
    let monic: Vec<u64> = m.iter().map(|&c| c * lead_inv % p).collect();
    poly_rem_monic(a, &monic, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem_monic(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem_monic(&poly_mul_mod_p(&acc, &b, p), m, p);
        }
        b = poly_rem_monic(&poly_mul_mod_p(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// `x^(p^k)` modulo `m` by repeated p-th powering.
fn x_pow_p_pow(k: u32, m: &[u64], p: u64) -> Vec<u64> {
    let mut y = poly_rem_monic(&[0, 1], m, p);
    for _ in 0..k {
        y = poly_powmod(&y, p, m, p);
    }
    y
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(out)
}

/// Rabin's test: `m` (monic, degree f) is irreducible over `F_p` iff
/// `x^(p^f) = x mod m` and `gcd(x^(p^(f/l)) - x, m) = 1` for primes `l | f`.
pub fn is_irreducible_mod_p(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    if poly_sub(&x_pow_p_pow(f, m, p), &x, p) != Vec::<u64>::new() {
        return false;
    }
    prime_divisors(f as u64).into_iter().all(|l| {
        let y = poly_sub(&x_pow_p_pow(f / l as u32, m, p), &x, p);
        poly_gcd(m, &y, p).len() == 1
    })
}

/// The least monic irreducible of degree `f` under the documented ordering.
pub fn least_irreducible(p: u64, f: u32) -> Vec<u64> {
    let count = p.checked_pow(f).expect("degree too large");
    for idx in 0..count {
        let mut m = index_to_coeffs(idx, p, f);
        m.push(1);
        if is_irreducible_mod_p(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn index_to_coeffs(mut idx: u64, p: u64, f: u32) -> Vec<u64> {
    (0..f)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            c
        })
        .collect()
}

impl ResidueField {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::InvalidInstance("degree f must be positive".into()));
        }
        let modulus = least_irreducible(p, f);
        let mut fld = Self {
            p,
            f,
            modulus,
            trace_basis: Vec::new(),
        };
        fld.trace_basis = (0..f)
            .map(|i| {
                let mut e = vec![0u64; f as usize];
                e[i as usize] = 1;
                fld.trace_slow(&e)
            })
            .collect();
        Ok(fld)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn pad(&self, v: Vec<u64>) -> ResidueElem {
        let mut v = v;
        v.resize(self.f as usize, 0);
        v
    }

    pub fn zero(&self) -> ResidueElem {
        vec![0; self.f as usize]
    }

    pub fn one(&self) -> ResidueElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> ResidueElem {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    /// Element with base-p digits of `idx` as coefficients.
    pub fn from_index(&self, idx: u64) -> ResidueElem {
        index_to_coeffs(idx, self.p, self.f)
    }

    pub fn index(&self, x: &[u64]) -> u64 {
        x.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ResidueElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ResidueElem {
        self.pad(poly_rem_monic(
            &poly_mul_mod_p(&poly_trim(a.to_vec()), &poly_trim(b.to_vec()), self.p),
            &self.modulus,
            self.p,
        ))
    }

    pub fn pow(&self, a: &[u64], e: u64) -> ResidueElem {
        self.pad(poly_powmod(&poly_trim(a.to_vec()), e, &self.modulus, self.p))
    }

    pub fn inv(&self, a: &[u64]) -> Result<ResidueElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroResidue);
        }
        Ok(self.pow(a, self.q() - 2))
    }

    pub fn frobenius(&self, a: &[u64]) -> ResidueElem {
        self.pow(a, self.p)
    }

    fn trace_slow(&self, x: &[u64]) -> u64 {
        let mut acc = self.zero();
        let mut y = x.to_vec();
        for _ in 0..self.f {
            acc = self.add(&acc, &y);
            y = self.frobenius(&y);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }

    /// `Tr(x) = x + x^p + ... + x^(p^(f-1))`, via the precomputed functional.
    pub fn trace(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.trace_basis)
            .fold(0, |acc, (c, t)| (acc + c * t) % self.p)
    }

    pub fn order(&self, x: &[u64]) -> Result<u64> {
        if self.is_zero(x) {
            return Err(Error::ZeroResidue);
        }
        let n = self.q() - 1;
        let one = self.one();
        let mut ord = n;
        for l in prime_divisors(n) {
            while ord.is_multiple_of(l) && self.pow(x, ord / l) == one {
                ord /= l;
            }
        }
        Ok(ord)
    }

    /// The generator of `F_q^*` with the least index.
    pub fn generator(&self) -> ResidueElem {
        let n = self.q() - 1;
        (1..self.q())
            .map(|i| self.from_index(i))
            .find(|x| self.order(x).ok() == Some(n))
            .expect("F_q^* is cyclic")
    }
}

/// Trace to the prime field.
pub fn trace_to_prime_field(f: &ResidueField, x: &[u64]) -> u64 {
    f.trace(x)
}

/// An element of `Z_q` modulo `p^prec`: coefficients in the power basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqElem(pub Vec<BigInt>);

/// `Q_q` at fixed absolute precision.
#[derive(Clone, Debug)]
pub struct UnramifiedField {
    residue: ResidueField,
    prec: u32,
    pk: BigInt,
}

pub fn make_unramified(p: u64, f: u32, prec: u32) -> Result<UnramifiedField> {
    UnramifiedField::new(p, f, prec)
}

impl UnramifiedField {
    pub fn new(p: u64, f: u32, prec: u32) -> Result<Self> {
        check_prime(p)?;
        let residue = ResidueField::new(p, f)?;
        Ok(Self {
            residue,
            prec,
            pk: big_pow(p, prec),
        })
    }

    pub fn p(&self) -> u64 {
        self.residue.p
    }

    pub fn f(&self) -> u32 {
        self.residue.f
    }

    pub fn q(&self) -> u64 {
        self.residue.q()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    /// The modulus lifted to integer coefficients.
    pub fn modulus(&self) -> &[u64] {
        &self.residue.modulus
    }

    fn red(&self, x: BigInt) -> BigInt {
        x.mod_floor(&self.pk)
    }

    pub fn zero(&self) -> ZqElem {
        ZqElem(vec![BigInt::zero(); self.f() as usize])
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> ZqElem {
        let mut z = self.zero();
        z.0[0] = self.red(n.into());
        z
    }

    pub fn one(&self) -> ZqElem {
        self.from_int(1)
    }

    pub fn lift(&self, r: &[u64]) -> ZqElem {
        ZqElem(r.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn reduce(&self, x: &ZqElem) -> ResidueElem {
        let p = BigInt::from(self.p());
        x.0.iter()
            .map(|c| c.mod_floor(&p).to_u64().unwrap())
            .collect()
    }

    pub fn is_zero(&self, x: &ZqElem) -> bool {
        x.0.iter().all(|c| self.red(c.clone()).is_zero())
    }

    pub fn add(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        ZqElem(a.0.iter().zip(&b.0).map(|(x, y)| self.red(x + y)).collect())
    }

    pub fn sub(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        ZqElem(a.0.iter().zip(&b.0).map(|(x, y)| self.red(x - y)).collect())
    }

    pub fn neg(&self, a: &ZqElem) -> ZqElem {
        ZqElem(a.0.iter().map(|x| self.red(-x)).collect())
    }

    pub fn scale(&self, a: &ZqElem, k: &BigInt) -> ZqElem {
        ZqElem(a.0.iter().map(|x| self.red(x * k)).collect())
    }

    pub fn mul(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let f = self.f() as usize;
        if f == 1 {
            return ZqElem(vec![self.red(&a.0[0] * &b.0[0])]);
        }
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let m = self.modulus();
        for d in (f..2 * f - 1).rev() {
            let lead = std::mem::take(&mut prod[d]);
            if lead.is_zero() {
                continue;
            }
            for (i, &c) in m[..f].iter().enumerate() {
                if c != 0 {
                    prod[d - f + i] -= &lead * c;
                }
            }
        }
        prod.truncate(f);
        ZqElem(prod.into_iter().map(|x| self.red(x)).collect())
    }

    pub fn pow(&self, a: &ZqElem, e: u64) -> ZqElem {
        let mut acc = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// Inverse of a unit by Newton iteration from the residue-field inverse.
    pub fn inv(&self, a: &ZqElem) -> Result<ZqElem> {
        let r = self.reduce(a);
        let r_inv = self.residue.inv(&r)?;
        let mut y = self.lift(&r_inv);
        let two = self.from_int(2);
        for _ in 0..=(self.prec.max(1).ilog2() + 2) {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
        }
        Ok(y)
    }

    /// The `(q-1)`-st root of unity reducing to `r`.
    pub fn teichmuller_lift(&self, r: &[u64]) -> Result<ZqElem> {
        if self.residue.is_zero(r) {
            return Err(Error::ZeroResidue);
        }
        let q = self.q();
        let mut y = self.lift(r);
        for _ in 0..=self.prec {
            let next = self.pow(&y, q);
            if next == y {
                break;
            }
            y = next;
        }
        Ok(y)
    }

    /// `Some(x)` when the element lies in `Z_p`.
    pub fn to_zp(&self, x: &ZqElem) -> Option<BigInt> {
        if x.0[1..].iter().all(|c| c.is_zero()) {
            Some(x.0[0].clone())
        } else {
            None
        }
    }

    pub fn valuation(&self, x: &ZqElem) -> Option<u32> {
        x.0.iter()
            .filter(|c| !c.is_zero())
            .map(|c| crate::arith::val_big(c, self.p()))
            .min()
    }
}

/// `Q_q(pi)` with `pi^(p-1) = -p`, coordinates modulo `p^prec`.
#[derive(Clone, Debug)]
pub struct EisensteinField {
    base: UnramifiedField,
}

/// `sum_i c_i pi^i`, `i < p - 1`, with `c_i` in `Z_q` known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFieldElement {
    pub coords: Vec<ZqElem>,
    pub prec: u32,
}

impl EisensteinField {
    pub fn new(base: UnramifiedField) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &UnramifiedField {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn prec(&self) -> u32 {
        self.base.prec
    }

    fn e(&self) -> usize {
        (self.p() - 1) as usize
    }

    pub fn zero(&self) -> LocalFieldElement {
        LocalFieldElement {
            coords: vec![self.base.zero(); self.e()],
            prec: self.prec(),
        }
    }

    pub fn from_zq(&self, x: &ZqElem) -> LocalFieldElement {
        let mut z = self.zero();
        z.coords[0] = x.clone();
        z
    }

    pub fn from_int(&self, n: i64) -> LocalFieldElement {
        self.from_zq(&self.base.from_int(n))
    }

    pub fn one(&self) -> LocalFieldElement {
        self.from_int(1)
    }

    pub fn pi(&self) -> LocalFieldElement {
        let mut z = self.zero();
        z.coords[1] = self.base.one();
        z
    }

    fn truncate(&self, x: LocalFieldElement, prec: u32) -> LocalFieldElement {
        if prec >= self.prec() {
            return LocalFieldElement { prec, ..x };
        }
        let m = big_pow(self.p(), prec);
        LocalFieldElement {
            coords: x
                .coords
                .into_iter()
                .map(|c| ZqElem(c.0.into_iter().map(|v| v.mod_floor(&m)).collect()))
                .collect(),
            prec,
        }
    }

    pub fn add(&self, a: &LocalFieldElement, b: &LocalFieldElement) -> LocalFieldElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| self.base.add(x, y))
            .collect();
        self.truncate(
            LocalFieldElement {
                coords,
                prec: self.prec(),
            },
            a.prec.min(b.prec),
        )
    }

    pub fn sub(&self, a: &LocalFieldElement, b: &LocalFieldElement) -> LocalFieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &LocalFieldElement) -> LocalFieldElement {
        LocalFieldElement {
            coords: a.coords.iter().map(|x| self.base.neg(x)).collect(),
            prec: a.prec,
        }
    }

    /// Multiply by a `Z_q` scalar.
    pub fn scale(&self, a: &LocalFieldElement, k: &ZqElem) -> LocalFieldElement {
        LocalFieldElement {
            coords: a.coords.iter().map(|x| self.base.mul(x, k)).collect(),
            prec: a.prec,
        }
    }

    pub fn scale_int(&self, a: &LocalFieldElement, k: i64) -> LocalFieldElement {
        let k = BigInt::from(k);
        LocalFieldElement {
            coords: a.coords.iter().map(|x| self.base.scale(x, &k)).collect(),
            prec: a.prec,
        }
    }

    pub fn mul(&self, a: &LocalFieldElement, b: &LocalFieldElement) -> LocalFieldElement {
        let e = self.e();
        let minus_p = BigInt::from(-(self.p() as i64));
        let mut out = vec![self.base.zero(); e];
        for (i, x) in a.coords.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                let mut t = self.base.mul(x, y);
                let mut k = i + j;
                if k >= e {
                    k -= e;
                    t = self.base.scale(&t, &minus_p);
                }
                out[k] = self.base.add(&out[k], &t);
            }
        }
        self.truncate(
            LocalFieldElement {
                coords: out,
                prec: self.prec(),
            },
            a.prec.min(b.prec),
        )
    }

    pub fn pow(&self, a: &LocalFieldElement, e: u64) -> LocalFieldElement {
        let mut acc = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    pub fn is_zero(&self, a: &LocalFieldElement) -> bool {
        a.coords.iter().all(|c| self.base.is_zero(c))
    }

    /// `v_pi`; `None` if the element is zero to its precision.
    pub fn valuation(&self, a: &LocalFieldElement) -> Option<u64> {
        let e = self.e() as u64;
        a.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| self.base.valuation(c).map(|v| e * v as u64 + i as u64))
            .min()
    }

    /// Precision in pi-units.
    pub fn pi_prec(&self, a: &LocalFieldElement) -> u64 {
        (self.e() as u64) * a.prec as u64
    }

    /// Exact division by `p^k`; every coordinate must be divisible.
    pub fn div_p_pow(&self, a: &LocalFieldElement, k: u32) -> Result<LocalFieldElement> {
        if k > a.prec {
            return Err(Error::InsufficientPrecision {
                needed: k as i64,
                have: a.prec as i64,
            });
        }
        let pk = big_pow(self.p(), k);
        let mut coords = Vec::with_capacity(a.coords.len());
        for c in &a.coords {
            let mut v = Vec::with_capacity(c.0.len());
            for x in &c.0 {
                let (q, r) = x.div_rem(&pk);
                if !r.is_zero() {
                    return Err(Error::NonIntegral);
                }
                v.push(q);
            }
            coords.push(ZqElem(v));
        }
        Ok(LocalFieldElement {
            coords,
            prec: a.prec - k,
        })
    }

    /// `a / pi^s` for an element with `v_pi(a) >= s`.
    pub fn div_pi_pow(&self, a: &LocalFieldElement, s: u64) -> Result<LocalFieldElement> {
        let e = self.e() as u64;
        if let Some(v) = self.valuation(a) {
            if v < s {
                return Err(Error::NonIntegral);
            }
        }
        let k = s.div_ceil(e);
        let shifted = self.mul(a, &self.pow(&self.pi(), k * e - s));
        let out = self.div_p_pow(&shifted, k as u32)?;
        // divided by (-p)^k
        Ok(if k % 2 == 1 { self.neg(&out) } else { out })
    }

    /// Inverse of a unit by Newton iteration `y <- y(2 - xy)`.
    pub fn unit_inverse(&self, a: &LocalFieldElement) -> Result<LocalFieldElement> {
        if self.valuation(a) != Some(0) {
            return Err(Error::NotAUnit(
                self.valuation(a).map_or(i64::MAX, |v| v as i64),
            ));
        }
        let r = self.base.reduce(&a.coords[0]);
        let y0 = self.base.lift(&self.base.residue.inv(&r)?);
        let mut y = self.from_zq(&y0);
        y.prec = a.prec;
        let two = self.from_int(2);
        // pi-adic quadratic convergence
        let rounds = (self.pi_prec(a).max(2) as f64).log2().ceil() as u32 + 2;
        for _ in 0..rounds {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
        }
        Ok(y)
    }

    /// `Some(x)` if the element lies in `Z_q`.
    pub fn to_zq(&self, a: &LocalFieldElement) -> Option<ZqElem> {
        if a.coords[1..].iter().all(|c| self.base.is_zero(c)) {
            Some(a.coords[0].clone())
        } else {
            None
        }
    }

    /// `Some(x)` if the element lies in `Z_p`.
    pub fn to_padic(&self, a: &LocalFieldElement) -> Option<PadicNumber> {
        let z = self.to_zq(a)?;
        let v = self.base.to_zp(&z)?;
        Some(PadicNumber::from_residue(v, self.p(), a.prec))
    }

    /// The primitive p-th root of unity `zeta_p = 1 + pi Z`.
    ///
    /// `(1+Y)^p = 1` with `Y = pi Z` reads `Z^(p-1) = u(pi Z)` where
    /// `u(Y) = 1 + sum_(k=2)^(p-1) (C(p,k)/p) Y^(k-1)`; the derivative of
    /// `Z^(p-1) - u(pi Z)` is a unit, so Newton from `Z = 1` converges.
    pub fn zeta_p(&self) -> Result<LocalFieldElement> {
        let p = self.p();
        if self.prec() < 2 {
            return Err(Error::InsufficientPrecision {
                needed: 2,
                have: self.prec() as i64,
            });
        }
        let pb = BigInt::from(p);
        let ucoef: Vec<BigInt> = (2..p)
            .map(|k| binomial(&pb, k as usize) / &pb)
            .collect();
        let pi = self.pi();
        // u(y) = 1 + y P(y); Horner for P and for u'
        let eval_u = |y: &LocalFieldElement| -> (LocalFieldElement, LocalFieldElement) {
            let mut u = self.zero();
            let mut du = self.zero();
            for (idx, c) in ucoef.iter().enumerate().rev() {
                let deg = idx as i64 + 1;
                let c = c.to_i64().unwrap();
                u = self.add(&self.mul(&u, y), &self.from_int(c));
                du = self.add(&self.mul(&du, y), &self.from_int(c * deg));
            }
            (self.add(&self.one(), &self.mul(&u, y)), du)
        };
        let mut z = self.one();
        let rounds = (self.pi_prec(&z) as f64).log2().ceil() as u32 + 4;
        for _ in 0..rounds {
            let y = self.mul(&pi, &z);
            let (u, du) = eval_u(&y);
            let fz = self.sub(&self.pow(&z, p - 1), &u);
            let dfz = self.sub(
                &self.scale_int(&self.pow(&z, p - 2), p as i64 - 1),
                &self.mul(&pi, &du),
            );
            let step = self.mul(&fz, &self.unit_inverse(&dfz)?);
            let next = self.sub(&z, &step);
            if next == z {
                break;
            }
            z = next;
        }
        Ok(self.add(&self.one(), &self.mul(&pi, &z)))
    }
}

/// Convenience: `ζ_p` for the tower over `(p, f)` at precision `prec`.
pub fn zeta_p_element(field: &EisensteinField) -> Result<LocalFieldElement> {
    field.zeta_p()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible(m: &[u64], p: u64) -> bool {
        // no monic factor of degree 1..=deg/2
        let d = m.len() - 1;
        for k in 1..=d / 2 {
            for idx in 0..p.pow(k as u32) {
                let mut g = index_to_coeffs(idx, p, k as u32);
                g.push(1);
                if poly_rem_monic(m, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_matches_exhaustive_scan() {
        for p in [2u64, 3, 5, 7] {
            for f in 1..=4u32 {
                if p.pow(f) > 2500 {
                    continue;
                }
                for idx in 0..p.pow(f) {
                    let mut m = index_to_coeffs(idx, p, f);
                    m.push(1);
                    assert_eq!(
                        is_irreducible_mod_p(&m, p),
                        brute_irreducible(&m, p),
                        "p={p} m={m:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn least_moduli() {
        assert_eq!(least_irreducible(5, 1), vec![0, 1]);
        // x^2 + 2 is the first irreducible quadratic over F_5 (x^2+1 = (x-2)(x-3))
        assert_eq!(least_irreducible(5, 2), vec![2, 0, 1]);
        // -1 is a non-residue mod 7
        assert_eq!(least_irreducible(7, 2), vec![1, 0, 1]);
    }

    #[test]
    fn trace_properties() {
        let fld = ResidueField::new(5, 3).unwrap();
        for idx in 0..fld.q() {
            let x = fld.from_index(idx);
            assert_eq!(fld.trace(&x), fld.trace(&fld.frobenius(&x)));
            assert_eq!(fld.trace(&x), fld.trace_slow(&x));
        }
        for c in 0..5 {
            assert_eq!(fld.trace(&fld.from_int(c)), (3 * c as u64) % 5);
        }
        let f1 = ResidueField::new(7, 1).unwrap();
        assert_eq!(f1.trace(&f1.from_int(4)), 4);
    }

    #[test]
    fn generator_has_full_order() {
        for (p, f) in [(5, 2), (7, 2), (3, 3), (13, 1)] {
            let fld = ResidueField::new(p, f).unwrap();
            let g = fld.generator();
            assert_eq!(fld.order(&g).unwrap(), fld.q() - 1);
        }
    }

    #[test]
    fn teichmuller_agrees_with_prime_field() {
        let fld = make_unramified(5, 1, 4).unwrap();
        let t = fld.teichmuller_lift(&[2]).unwrap();
        assert_eq!(t.0[0], BigInt::from(182));
        let one = fld.teichmuller_lift(&[1]).unwrap();
        assert_eq!(one, fld.one());
        assert_eq!(fld.teichmuller_lift(&[0]), Err(Error::ZeroResidue));
    }

    #[test]
    fn teichmuller_unramified_is_root_of_unity_and_multiplicative() {
        let fld = make_unramified(7, 2, 6).unwrap();
        let res = fld.residue().clone();
        let a = res.from_index(10);
        let b = res.from_index(23);
        let ta = fld.teichmuller_lift(&a).unwrap();
        let tb = fld.teichmuller_lift(&b).unwrap();
        let tab = fld.teichmuller_lift(&res.mul(&a, &b)).unwrap();
        assert_eq!(fld.mul(&ta, &tb), tab);
        assert_eq!(fld.pow(&ta, fld.q() - 1), fld.one());
        assert_eq!(fld.reduce(&ta), a);
    }

    #[test]
    fn zq_inverse() {
        let fld = make_unramified(5, 2, 7).unwrap();
        let x = ZqElem(vec![BigInt::from(3), BigInt::from(11)]);
        let y = fld.inv(&x).unwrap();
        assert_eq!(fld.mul(&x, &y), fld.one());
    }

    #[test]
    fn pi_relation_and_valuation() {
        let k = EisensteinField::new(make_unramified(7, 1, 6).unwrap());
        let pi = k.pi();
        assert_eq!(k.pow(&pi, 6), k.from_int(-7));
        assert_eq!(k.valuation(&pi), Some(1));
        assert_eq!(k.valuation(&k.from_int(49)), Some(12));
        let x = k.add(&k.pow(&pi, 3), &k.from_int(14));
        assert_eq!(k.valuation(&k.mul(&x, &pi)), Some(4));
    }

    #[test]
    fn norm_of_pi_is_p() {
        // conjugates of pi are omega(j) * pi, j in F_p^*
        let p = 7u64;
        let base = make_unramified(p, 1, 6).unwrap();
        let k = EisensteinField::new(base.clone());
        let mut prod = k.one();
        for j in 1..p {
            let w = base.teichmuller_lift(&[j]).unwrap();
            prod = k.mul(&prod, &k.scale(&k.pi(), &w));
        }
        assert_eq!(prod, k.from_int(p as i64));
    }

    #[test]
    fn zeta_p_properties() {
        for (p, f) in [(3u64, 1u32), (5, 2), (7, 1), (13, 1)] {
            let k = EisensteinField::new(make_unramified(p, f, 8).unwrap());
            let z = k.zeta_p().unwrap();
            assert_eq!(k.pow(&z, p), k.one(), "p={p}");
            assert_ne!(z, k.one());
            let d = k.sub(&z, &k.one());
            assert_eq!(k.valuation(&d), Some(1));
            // (zeta - 1) = pi mod pi^2
            let diff = k.sub(&d, &k.pi());
            assert!(k.valuation(&diff).unwrap() >= 2);
            let mut s = k.zero();
            let mut zk = k.one();
            for _ in 0..p {
                s = k.add(&s, &zk);
                zk = k.mul(&zk, &z);
            }
            assert!(k.is_zero(&s));
        }
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let k = EisensteinField::new(make_unramified(5, 2, 6).unwrap());
        let z = k.zeta_p().unwrap();
        let x = k.add(&z, &k.from_int(3));
        let y = k.unit_inverse(&x).unwrap();
        assert_eq!(k.mul(&x, &y), k.one());
    }

    #[test]
    fn divide_by_pi_powers() {
        let k = EisensteinField::new(make_unramified(7, 1, 6).unwrap());
        let u = k.add(&k.one(), &k.pi());
        let x = k.mul(&u, &k.pow(&k.pi(), 9));
        let back = k.div_pi_pow(&x, 9).unwrap();
        assert_eq!(back.prec, 4);
        assert_eq!(back, k.truncate(u, 4));
    }
}
