//! Finite-precision p-adic numbers.
//!
//! A nonzero [`PadicNumber`] is `p^valuation * unit` where the unit is known
//! modulo `p^prec` (relative precision). Zero is its own state: either the
//! exact zero (it only arises from the rational 0) or "zero modulo `p^abs`",
//! which is what cancellation produces.
//!
//! Precision propagation:
//! - `mul`/`div`: relative precision is the minimum of the operands'.
//! - `add`/`sub`: absolute precision is the minimum of the operands'; the
//!   relative precision of the result shrinks by whatever cancels.
//! - `iwasawa_log`: the result is known to absolute precision equal to the
//!   input's relative precision (log is an isometry on `1 + pZ_p`, p odd).
//! - `exp`: the result is known to the absolute precision of the input.
//!
//! Series evaluations (log, exp) run with guard digits so that truncation and
//! division by `k` never cost precision in the returned value. The guard
//! needed is reported by [`log_guard_digits`]; [`precision_loss`] is the
//! tolerance table used by the cross-checks in the rest of the crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow, is_prime, val_big};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum State {
    /// `abs == None` is the exact zero.
    Zero { abs: Option<i64> },
    Nonzero {
        valuation: i64,
        unit: BigInt,
        prec: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PadicRecord", try_from = "PadicRecord")]
pub struct PadicNumber {
    p: u64,
    state: State,
}

/// Wire form of a [`PadicNumber`].
///
/// For a nonzero value `prec` is the relative precision of the unit. For a
/// zero `valuation` is null and `prec` is the absolute precision (null for the
/// exact zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRecord {
    pub p: u64,
    pub valuation: Option<i64>,
    pub unit_digits: String,
    pub prec: Option<i64>,
}

/// Arithmetic operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    Ok(())
}

impl PadicNumber {
    /// The image of `num/den` in Q_p with relative precision `prec`.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        p: u64,
        prec: u32,
    ) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::InsufficientPrecision { needed: 1, have: 0 });
        }
        if num.is_zero() {
            return Ok(Self::zero(p));
        }
        let vn = val_big(&num, p);
        let vd = val_big(&den, p);
        let pk = big_pow(p, prec);
        let un = &num / big_pow(p, vn);
        let ud = &den / big_pow(p, vd);
        let inv = inverse_mod_pk(&ud, p, prec);
        let unit = (un * inv).mod_floor(&pk);
        Ok(Self {
            p,
            state: State::Nonzero {
                valuation: vn as i64 - vd as i64,
                unit,
                prec,
            },
        })
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(n, 1, p, prec)
    }

    pub fn from_ratio(r: &BigRational, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(r.numer().clone(), r.denom().clone(), p, prec)
    }

    /// The exact zero.
    pub fn zero(p: u64) -> Self {
        Self {
            p,
            state: State::Zero { abs: None },
        }
    }

    /// Zero known only modulo `p^abs`.
    pub fn zero_mod(p: u64, abs: i64) -> Self {
        Self {
            p,
            state: State::Zero { abs: Some(abs) },
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self {
            p,
            state: State::Nonzero {
                valuation: 0,
                unit: BigInt::one(),
                prec,
            },
        }
    }

    /// `p^shift * x` where the integer `x` is known modulo `p^rel`.
    pub(crate) fn normalize(p: u64, shift: i64, x: BigInt, rel: u32) -> Self {
        let pk = big_pow(p, rel);
        let x = x.mod_floor(&pk);
        if x.is_zero() {
            return Self::zero_mod(p, shift + rel as i64);
        }
        let w = val_big(&x, p);
        let unit = (x / big_pow(p, w)).mod_floor(&big_pow(p, rel - w));
        Self {
            p,
            state: State::Nonzero {
                valuation: shift + w as i64,
                unit,
                prec: rel - w,
            },
        }
    }

    /// An integer known modulo `p^abs`.
    pub fn from_residue(x: BigInt, p: u64, abs: u32) -> Self {
        Self::normalize(p, 0, x, abs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.state, State::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.state, State::Zero { abs: None })
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.state {
            State::Nonzero { valuation, .. } => Some(*valuation),
            State::Zero { .. } => None,
        }
    }

    /// Unit digits (0 for zero).
    pub fn unit(&self) -> BigInt {
        match &self.state {
            State::Nonzero { unit, .. } => unit.clone(),
            State::Zero { .. } => BigInt::zero(),
        }
    }

    /// Relative precision; 0 for zero.
    pub fn prec(&self) -> u32 {
        match &self.state {
            State::Nonzero { prec, .. } => *prec,
            State::Zero { .. } => 0,
        }
    }

    /// Absolute precision (`None` for the exact zero).
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.state {
            State::Nonzero {
                valuation, prec, ..
            } => Some(valuation + *prec as i64),
            State::Zero { abs } => *abs,
        }
    }

    /// Reduce the relative precision to at most `rel`.
    pub fn truncate_rel(&self, rel: u32) -> Self {
        match &self.state {
            State::Nonzero {
                valuation,
                unit,
                prec,
            } if rel < *prec => {
                if rel == 0 {
                    return Self::zero_mod(self.p, *valuation);
                }
                Self {
                    p: self.p,
                    state: State::Nonzero {
                        valuation: *valuation,
                        unit: unit.mod_floor(&big_pow(self.p, rel)),
                        prec: rel,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    /// Reduce the absolute precision to at most `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.state {
            State::Nonzero { valuation, .. } => {
                if *valuation >= abs {
                    Self::zero_mod(self.p, abs)
                } else {
                    self.truncate_rel((abs - valuation) as u32)
                }
            }
            State::Zero { abs: a } => match a {
                Some(a) if *a <= abs => self.clone(),
                _ => Self::zero_mod(self.p, abs),
            },
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::PrimeMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.p;
        Ok(match (&self.state, &other.state) {
            (State::Zero { abs: None }, _) => other.clone(),
            (_, State::Zero { abs: None }) => self.clone(),
            (State::Zero { abs: Some(a) }, _) => {
                let cap = other.abs_prec().map_or(*a, |b| b.min(*a));
                other.truncate_abs(cap)
            }
            (_, State::Zero { abs: Some(b) }) => {
                let cap = self.abs_prec().map_or(*b, |a| a.min(*b));
                self.truncate_abs(cap)
            }
            (
                State::Nonzero {
                    valuation: v1,
                    unit: u1,
                    prec: r1,
                },
                State::Nonzero {
                    valuation: v2,
                    unit: u2,
                    prec: r2,
                },
            ) => {
                let v = (*v1).min(*v2);
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let rel = (abs - v) as u32;
                let lift = |u: &BigInt, vi: i64| -> BigInt {
                    let d = vi - v;
                    if d >= rel as i64 {
                        BigInt::zero()
                    } else {
                        u * big_pow(p, d as u32)
                    }
                };
                let x = lift(u1, *v1) + lift(u2, *v2);
                Self::normalize(p, v, x, rel)
            }
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.p;
        Ok(match (&self.state, &other.state) {
            (State::Zero { abs: None }, _) | (_, State::Zero { abs: None }) => Self::zero(p),
            (State::Zero { abs: Some(a) }, State::Zero { abs: Some(b) }) => {
                Self::zero_mod(p, a + b)
            }
            (State::Zero { abs: Some(a) }, State::Nonzero { valuation, .. })
            | (State::Nonzero { valuation, .. }, State::Zero { abs: Some(a) }) => {
                Self::zero_mod(p, a + valuation)
            }
            (
                State::Nonzero {
                    valuation: v1,
                    unit: u1,
                    prec: r1,
                },
                State::Nonzero {
                    valuation: v2,
                    unit: u2,
                    prec: r2,
                },
            ) => {
                let r = (*r1).min(*r2);
                Self {
                    p,
                    state: State::Nonzero {
                        valuation: v1 + v2,
                        unit: (u1 * u2).mod_floor(&big_pow(p, r)),
                        prec: r,
                    },
                }
            }
        })
    }

    /// Multiply by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(self.p);
        }
        match &self.state {
            State::Zero { abs: None } => self.clone(),
            State::Zero { abs: Some(a) } => Self::zero_mod(self.p, a + val_big(n, self.p) as i64),
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => Self::normalize(self.p, *valuation, unit * n, *prec + val_big(n, self.p)),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match &self.state {
            State::Zero { .. } => Err(Error::DivisionByZero),
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => Ok(Self {
                p: self.p,
                state: State::Nonzero {
                    valuation: -valuation,
                    unit: inverse_mod_pk(unit, self.p, *prec),
                    prec: *prec,
                },
            }),
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    fn neg_ref(&self) -> Self {
        match &self.state {
            State::Zero { .. } => self.clone(),
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => Self {
                p: self.p,
                state: State::Nonzero {
                    valuation: *valuation,
                    unit: (-unit).mod_floor(&big_pow(self.p, *prec)),
                    prec: *prec,
                },
            },
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut acc = Self::one(self.p, self.prec().max(1));
        if e == 0 {
            return match &self.state {
                State::Nonzero { prec, .. } => Ok(Self::one(self.p, *prec)),
                State::Zero { .. } => Err(Error::InsufficientPrecision { needed: 1, have: 0 }),
            };
        }
        let mut base = self.clone();
        let mut e = e as u64;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first {
                    base.clone()
                } else {
                    acc.checked_mul(&base)?
                };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// The absolute precision to which `self` and `other` agree, i.e.
    /// `v_p(self - other)` capped at the shared absolute precision.
    /// `None` when both are exact and equal.
    pub fn agreement(&self, other: &Self) -> Result<Option<i64>> {
        let d = self.checked_sub(other)?;
        Ok(match d.state {
            State::Zero { abs } => abs,
            State::Nonzero { valuation, .. } => Some(valuation),
        })
    }

    /// A representative integer modulo `p^abs` (requires nonnegative valuation
    /// and enough precision).
    pub fn to_integer_mod(&self, abs: u32) -> Result<BigInt> {
        let pk = big_pow(self.p, abs);
        match &self.state {
            State::Zero { abs: a } => {
                if let Some(a) = a {
                    if *a < abs as i64 {
                        return Err(Error::InsufficientPrecision {
                            needed: abs as i64,
                            have: *a,
                        });
                    }
                }
                Ok(BigInt::zero())
            }
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => {
                if *valuation < 0 {
                    return Err(Error::NotIntegral(*valuation));
                }
                if valuation + (*prec as i64) < abs as i64 && *valuation < abs as i64 {
                    return Err(Error::InsufficientPrecision {
                        needed: abs as i64,
                        have: valuation + *prec as i64,
                    });
                }
                if *valuation >= abs as i64 {
                    return Ok(BigInt::zero());
                }
                Ok((unit * big_pow(self.p, *valuation as u32)).mod_floor(&pk))
            }
        }
    }

    /// Residue modulo p of an integral element.
    pub fn residue(&self) -> Result<u64> {
        Ok(self.to_integer_mod(1)?.to_u64().unwrap_or(0))
    }

    /// Teichmüller representative ω(x): the (p-1)-st root of unity congruent
    /// to `x` mod p, at the precision of `x`.
    pub fn teichmuller(&self) -> Result<Self> {
        match &self.state {
            State::Nonzero {
                valuation: 0,
                unit,
                prec,
            } => Ok(Self {
                p: self.p,
                state: State::Nonzero {
                    valuation: 0,
                    unit: teichmuller_mod_pk(unit, self.p, *prec),
                    prec: *prec,
                },
            }),
            State::Nonzero { valuation, .. } => Err(Error::NotAUnit(*valuation)),
            State::Zero { .. } => Err(Error::NotAUnit(i64::MAX)),
        }
    }

    /// Iwasawa logarithm: `log_p(p) = 0` and roots of unity map to 0.
    pub fn iwasawa_log(&self) -> Result<Self> {
        match &self.state {
            State::Zero { .. } => Err(Error::LogOfZero),
            State::Nonzero { unit, prec, .. } => {
                let v = log_unit_mod_pk(unit, self.p, *prec);
                Ok(Self::normalize(self.p, 0, v, *prec))
            }
        }
    }

    /// Exponential on `pZ_p` (p odd).
    pub fn exp(&self) -> Result<Self> {
        let abs = match self.abs_prec() {
            Some(a) => a,
            None => return Err(Error::InsufficientPrecision { needed: 1, have: 0 }),
        };
        if let Some(v) = self.valuation() {
            if v < 1 {
                return Err(Error::NotIntegral(v));
            }
        }
        if abs < 1 {
            return Err(Error::InsufficientPrecision { needed: 1, have: abs });
        }
        let x = self.to_integer_mod(abs as u32)?;
        Ok(Self::normalize(
            self.p,
            0,
            exp_mod_pk(&x, self.p, abs as u32),
            abs as u32,
        ))
    }
}

/// `arith(a, b, op)` with error reporting for prime mismatch and division by zero.
pub fn arith(a: &PadicNumber, b: &PadicNumber, op: Op) -> Result<PadicNumber> {
    match op {
        Op::Add => a.checked_add(b),
        Op::Sub => a.checked_sub(b),
        Op::Mul => a.checked_mul(b),
        Op::Div => a.checked_div(b),
    }
}

impl Add for &PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: Self) -> PadicNumber {
        self.checked_add(rhs).expect("p-adic add")
    }
}

impl Sub for &PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: Self) -> PadicNumber {
        self.checked_sub(rhs).expect("p-adic sub")
    }
}

impl Mul for &PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: Self) -> PadicNumber {
        self.checked_mul(rhs).expect("p-adic mul")
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.state {
            State::Zero { abs: None } => write!(f, "0"),
            State::Zero { abs: Some(a) } => write!(f, "O({}^{})", self.p, a),
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.p,
                valuation,
                unit,
                self.p,
                valuation + *prec as i64
            ),
        }
    }
}

impl From<PadicNumber> for PadicRecord {
    fn from(x: PadicNumber) -> Self {
        match x.state {
            State::Zero { abs } => PadicRecord {
                p: x.p,
                valuation: None,
                unit_digits: "0".into(),
                prec: abs,
            },
            State::Nonzero {
                valuation,
                unit,
                prec,
            } => PadicRecord {
                p: x.p,
                valuation: Some(valuation),
                unit_digits: unit.to_string(),
                prec: Some(prec as i64),
            },
        }
    }
}

impl TryFrom<PadicRecord> for PadicNumber {
    type Error = Error;
    fn try_from(r: PadicRecord) -> Result<Self> {
        check_prime(r.p)?;
        let unit: BigInt = r
            .unit_digits
            .parse()
            .map_err(|_| Error::Config(format!("bad unit digits {:?}", r.unit_digits)))?;
        match r.valuation {
            None => {
                if !unit.is_zero() {
                    return Err(Error::Config("zero record with nonzero digits".into()));
                }
                Ok(match r.prec {
                    None => PadicNumber::zero(r.p),
                    Some(a) => PadicNumber::zero_mod(r.p, a),
                })
            }
            Some(v) => {
                let prec = r
                    .prec
                    .filter(|&k| k > 0 && k <= u32::MAX as i64)
                    .ok_or_else(|| Error::Config("nonzero record needs prec >= 1".into()))?
                    as u32;
                let pk = big_pow(r.p, prec);
                if unit.is_negative() || unit >= pk || (&unit % r.p).is_zero() {
                    return Err(Error::Config(format!(
                        "unit digits {unit} are not a unit modulo {}^{prec}",
                        r.p
                    )));
                }
                Ok(PadicNumber {
                    p: r.p,
                    state: State::Nonzero {
                        valuation: v,
                        unit,
                        prec,
                    },
                })
            }
        }
    }
}

/// Inverse of a unit modulo `p^k`: the mod-p inverse lifted by Newton steps.
pub fn inverse_mod_pk(u: &BigInt, p: u64, k: u32) -> BigInt {
    let pb = BigInt::from(p);
    let u0 = u.mod_floor(&pb);
    assert!(!u0.is_zero(), "inverse of a non-unit");
    // Fermat inverse mod p
    let mut x = u0.modpow(&BigInt::from(p - 2), &pb);
    let mut known = 1u32;
    while known < k {
        known = (known * 2).min(k);
        let m = big_pow(p, known);
        let ux = (u * &x).mod_floor(&m);
        x = (&x * (BigInt::from(2) - ux)).mod_floor(&m);
    }
    x.mod_floor(&big_pow(p, k))
}

/// Teichmüller lift of a unit modulo `p^k`, by iterating `y -> y^p`.
pub fn teichmuller_mod_pk(u: &BigInt, p: u64, k: u32) -> BigInt {
    let m = big_pow(p, k);
    let pb = BigInt::from(p);
    let mut y = u.mod_floor(&m);
    for _ in 1..k.max(1) {
        let next = y.modpow(&pb, &m);
        if next == y {
            break;
        }
        y = next;
    }
    y
}

/// Number of terms and guard digits for `log(1+z)` with `v_p(z) >= e` to
/// absolute precision `prec`. Terms `k > T` satisfy `k*e - v_p(k) >= prec`.
pub fn log_series_terms(p: u64, prec: u32, e: u32) -> (u32, u32) {
    let e = e.max(1) as i64;
    let prec = prec as i64;
    let mut t: i64 = 0;
    loop {
        let k = t + 1;
        if k * e - ilog(p, k as u64) as i64 >= prec {
            break;
        }
        t += 1;
    }
    let guard = ilog(p, t.max(1) as u64);
    (t as u32, guard)
}

/// Guard digits the logarithm series needs at precision `prec`; the loss a
/// guard-free evaluation would incur.
pub fn log_guard_digits(p: u64, prec: u32) -> u32 {
    log_series_terms(p, prec, 1).1
}

/// Tolerance table for cross-checks: `delta = log + div` where `log` is the
/// worst-case log-series loss and `div` covers one division by a quantity of
/// valuation one (difference quotients, `1/F` factors).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossTable {
    pub log: u32,
    pub div: u32,
}

impl LossTable {
    pub fn delta(&self) -> u32 {
        self.log + self.div
    }
}

pub fn precision_loss(p: u64, prec: u32) -> LossTable {
    LossTable {
        log: log_guard_digits(p, prec),
        div: 1,
    }
}

fn ilog(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut acc = p;
    while acc <= n {
        acc = acc.saturating_mul(p);
        k += 1;
    }
    k
}

/// `log_p(u)` modulo `p^k` for an integer unit `u`.
pub fn log_unit_mod_pk(u: &BigInt, p: u64, k: u32) -> BigInt {
    let (_, guard) = log_series_terms(p, k, 1);
    let work = k + guard;
    let m = big_pow(p, work);
    // u^(p-1) = 1 + z with v(z) >= 1
    let z = (u.modpow(&BigInt::from(p - 1), &m) - BigInt::one()).mod_floor(&m);
    let l = log_one_plus_mod_pk(&z, p, k);
    let inv = inverse_mod_pk(&BigInt::from(p - 1), p, k);
    (l * inv).mod_floor(&big_pow(p, k))
}

/// `log(1 + z)` modulo `p^k` for an integer `z` divisible by p.
pub fn log_one_plus_mod_pk(z: &BigInt, p: u64, k: u32) -> BigInt {
    let target = big_pow(p, k);
    if z.is_zero() || k == 0 {
        return BigInt::zero();
    }
    let e = val_big(z, p).min(k.max(1));
    let (terms, guard) = log_series_terms(p, k, e);
    let work = big_pow(p, k + guard);
    let z = z.mod_floor(&work);
    let mut acc = BigInt::zero();
    let mut zk = BigInt::one();
    for n in 1..=terms as u64 {
        zk = (&zk * &z).mod_floor(&work);
        let vn = crate::arith::val_i64(n as i64, p);
        let pv = big_pow(p, vn);
        let cofactor = BigInt::from(n) / &pv;
        debug_assert!((&zk % &pv).is_zero() || zk.is_zero());
        let term = (&zk / &pv) * inverse_mod_pk(&cofactor, p, k);
        if n % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.mod_floor(&target)
}

/// `exp(x)` modulo `p^k` for an integer `x` divisible by p (p odd).
pub fn exp_mod_pk(x: &BigInt, p: u64, k: u32) -> BigInt {
    let target = big_pow(p, k);
    if x.mod_floor(&target).is_zero() {
        return BigInt::one();
    }
    let e = val_big(&x.mod_floor(&target), p) as i64;
    // v(x^n / n!) >= n e - (n-1)/(p-1)
    let mut terms = 0i64;
    loop {
        let n = terms + 1;
        if n * e - (n - 1) / (p as i64 - 1) >= k as i64 {
            break;
        }
        terms += 1;
    }
    let guard = (0..=terms as u64)
        .map(|n| legendre_factorial_val(n, p))
        .max()
        .unwrap_or(0);
    let work = big_pow(p, k + guard);
    let x = x.mod_floor(&work);
    let mut acc = BigInt::one();
    let mut xn = BigInt::one();
    for n in 1..=terms as u64 {
        xn = (&xn * &x).mod_floor(&work);
        let vf = legendre_factorial_val(n, p);
        let f = crate::arith::factorial(n);
        let pv = big_pow(p, vf);
        let cof = &f / &pv;
        acc += (&xn / &pv) * inverse_mod_pk(&cof, p, k);
    }
    acc.mod_floor(&target)
}

/// `v_p(n!)`.
pub fn legendre_factorial_val(n: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut m = n / p;
    while m > 0 {
        v += m as u32;
        m /= p;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64, p: u64, prec: u32) -> PadicNumber {
        PadicNumber::from_rational(n, d, p, prec).unwrap()
    }

    #[test]
    fn one_third_in_q7() {
        let x = q(1, 3, 7, 4);
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.unit(), BigInt::from(1601));
        // extended-Euclid oracle: 3 * u = 1 mod 2401
        let u = x.unit();
        assert_eq!((u * 3) % 2401, BigInt::from(1));
    }

    #[test]
    fn seven_has_valuation_one() {
        let x = q(7, 1, 7, 4);
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.unit(), BigInt::one());
    }

    #[test]
    fn zero_is_distinguished() {
        let z = q(0, 5, 7, 4);
        assert!(z.is_exact_zero());
        assert_eq!(z.valuation(), None);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            PadicNumber::from_rational(1, 0, 7, 4),
            Err(Error::ZeroDenominator)
        );
        assert_eq!(PadicNumber::from_rational(1, 3, 9, 4), Err(Error::NotPrime(9)));
    }

    #[test]
    fn add_with_carry_into_valuation() {
        let a = q(7, 1, 7, 4);
        let b = q(42, 1, 7, 4);
        let s = &a + &b;
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.unit(), BigInt::one());
        // absolute precision is capped by the operands (1 + 4 = 5)
        assert_eq!(s.abs_prec(), Some(5));
    }

    #[test]
    fn thirds_sum_to_one() {
        let s = &q(1, 3, 7, 4) + &q(2, 3, 7, 4);
        assert_eq!(s, PadicNumber::one(7, 4));
    }

    #[test]
    fn cancellation_gives_zero_mod() {
        let a = q(5, 3, 7, 4);
        let d = &a - &a;
        assert!(d.is_zero());
        assert_eq!(d.abs_prec(), Some(4));
    }

    #[test]
    fn mul_inverse_is_one() {
        for n in [2i64, 3, 14, -98, 1234567] {
            let x = q(n, 11, 7, 6);
            let y = x.inverse().unwrap();
            let one = &x * &y;
            assert_eq!(one, PadicNumber::one(7, 6));
        }
    }

    #[test]
    fn arith_errors() {
        let a = q(1, 1, 7, 4);
        let b = q(1, 1, 5, 4);
        assert_eq!(arith(&a, &b, Op::Add), Err(Error::PrimeMismatch(7, 5)));
        assert_eq!(
            arith(&a, &PadicNumber::zero(7), Op::Div),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            arith(&a, &PadicNumber::zero_mod(7, 3), Op::Div),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn teichmuller_of_two_mod_625() {
        let w = q(2, 1, 5, 4).teichmuller().unwrap();
        assert_eq!(w.unit(), BigInt::from(182));
        assert_eq!((BigInt::from(182).pow(2u32)) % 625, BigInt::from(624));
        assert_eq!(BigInt::from(182).modpow(&BigInt::from(4), &BigInt::from(625)), BigInt::one());
        let w4 = q(4, 1, 5, 4).teichmuller().unwrap();
        assert_eq!(w4.unit(), BigInt::from(624));
        assert_eq!(q(1, 1, 7, 9).teichmuller().unwrap(), PadicNumber::one(7, 9));
        assert_eq!(q(5, 1, 5, 4).teichmuller(), Err(Error::NotAUnit(1)));
    }

    #[test]
    fn log_kills_p_and_torsion() {
        assert!(q(7, 1, 7, 8).iwasawa_log().unwrap().is_zero());
        assert!(q(1, 1, 7, 8).iwasawa_log().unwrap().is_zero());
        let w = q(2, 1, 5, 8).teichmuller().unwrap();
        assert!(w.iwasawa_log().unwrap().is_zero());
        assert_eq!(PadicNumber::zero(5).iwasawa_log(), Err(Error::LogOfZero));
    }

    #[test]
    fn log_of_one_plus_p() {
        // log(1+p) = p - p^2/2 + p^3/3 - ... ; check against a direct rational sum
        let p = 5u64;
        let prec = 6;
        let l = q(6, 1, p, prec).iwasawa_log().unwrap();
        let mut acc = PadicNumber::zero(p);
        for k in 1..20i64 {
            let term = q(5i64.pow(k as u32), k, p, 30);
            acc = if k % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        assert!(l.agreement(&acc).unwrap().unwrap() >= prec as i64);
    }

    #[test]
    fn record_roundtrip() {
        for x in [q(1, 3, 7, 4), q(0, 1, 7, 4), PadicNumber::zero_mod(7, 3), q(-49, 5, 7, 6)] {
            let js = serde_json::to_string(&x).unwrap();
            let y: PadicNumber = serde_json::from_str(&js).unwrap();
            assert_eq!(x, y);
        }
        let js = serde_json::to_string(&q(1, 3, 7, 4)).unwrap();
        assert_eq!(js, r#"{"p":7,"valuation":0,"unit_digits":"1601","prec":4}"#);
    }

    #[test]
    fn loss_table_values() {
        assert_eq!(precision_loss(13, 10).delta(), 1);
        assert_eq!(precision_loss(5, 10).delta(), 2);
        assert_eq!(precision_loss(3, 10).delta(), 3);
    }
}
