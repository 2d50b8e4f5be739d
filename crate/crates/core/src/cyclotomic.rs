//! Exact arithmetic in `Q(zeta_m)` in the power basis modulo `Phi_m`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{euler_phi, gcd};

/// Integer coefficients of the m-th cyclotomic polynomial, constant first.
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    // x^m - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let dq = r.len() - 1 - db;
    let mut q = vec![BigInt::zero(); dq + 1];
    for i in (0..=dq).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    q
}

/// `sum c_i zeta_m^i`, `i < phi(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    m: u64,
    coeffs: Vec<BigRational>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CyclotomicNumber", 2)?;
        st.serialize_field("order", &self.m)?;
        let c: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &c)?;
        st.end()
    }
}

impl CyclotomicNumber {
    pub fn zero(m: u64) -> Self {
        Self {
            m,
            coeffs: vec![BigRational::zero(); euler_phi(m) as usize],
        }
    }

    pub fn from_rational(m: u64, r: BigRational) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(m: u64, n: i64) -> Self {
        Self::from_rational(m, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one(m: u64) -> Self {
        Self::from_int(m, 1)
    }

    /// `zeta_m^k`.
    pub fn root_pow(m: u64, k: i64) -> Self {
        let k = k.rem_euclid(m as i64) as usize;
        let mut full = vec![BigRational::zero(); m as usize];
        full[k] = BigRational::one();
        Self::reduce(m, full)
    }

    fn reduce(m: u64, mut full: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(m);
        let d = phi.len() - 1;
        for i in (d..full.len()).rev() {
            let c = std::mem::take(&mut full[i]);
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi[..d].iter().enumerate() {
                full[i - d + j] -= &c * BigRational::from_integer(pj.clone());
            }
        }
        full.truncate(d);
        full.resize(d, BigRational::zero());
        Self { m, coeffs: full }
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `Some(r)` when the number is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.m, o.m, "cyclotomic order mismatch");
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.m, o.m, "cyclotomic order mismatch");
        let n = self.coeffs.len();
        let mut full = vec![BigRational::zero(); 2 * n.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                full[i + j] += a * b;
            }
        }
        Self::reduce(self.m, full)
    }

    /// The same number in `Q(zeta_e)` for a multiple `e` of the order.
    pub fn lift_to(&self, e: u64) -> Self {
        assert_eq!(e % self.m, 0, "order does not divide the target");
        let step = (e / self.m) as i64;
        let mut acc = Self::zero(e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&Self::root_pow(e, step * i as i64).scale(c));
            }
        }
        acc
    }

    /// Image under `zeta -> zeta^k` (`gcd(k, m) = 1`).
    pub fn galois(&self, k: i64) -> Self {
        assert_eq!(gcd(k, self.m as i64).abs(), 1, "not a Galois element");
        let mut acc = Self::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&Self::root_pow(self.m, k * i as i64).scale(c));
            }
        }
        acc
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*z")?,
                _ => write!(f, "{a}*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn root_powers_multiply() {
        for m in [3u64, 4, 5, 8, 12] {
            for a in 0..m as i64 {
                for b in 0..m as i64 {
                    let lhs = CyclotomicNumber::root_pow(m, a).mul(&CyclotomicNumber::root_pow(m, b));
                    assert_eq!(lhs, CyclotomicNumber::root_pow(m, a + b));
                }
            }
            // 1 + z + ... + z^(m-1) = 0
            let mut s = CyclotomicNumber::zero(m);
            for k in 0..m as i64 {
                s = s.add(&CyclotomicNumber::root_pow(m, k));
            }
            assert!(s.is_zero() || m == 1);
        }
    }

    #[test]
    fn norm_is_rational() {
        let x = CyclotomicNumber::root_pow(5, 1).add(&CyclotomicNumber::from_int(5, 2));
        let mut n = CyclotomicNumber::one(5);
        for k in 1..5 {
            n = n.mul(&x.galois(k));
        }
        // N(2 + z) = Phi_5(-2) = 11
        assert_eq!(n.as_rational(), Some(BigRational::from_integer(BigInt::from(11))));
    }
}
