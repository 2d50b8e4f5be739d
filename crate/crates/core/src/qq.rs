//! Elements of `Q_q` with p-adic coordinates in the power basis of the
//! unramified field's modulus. Used for character-weighted sums whose values
//! need not lie in `Q_p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::local::{UnramifiedField, ZqElem};
use crate::padic::PadicNumber;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QqNumber {
    pub coords: Vec<PadicNumber>,
}

/// A single coordinate prints as that p-adic number, otherwise `(c0, c1, ...)`.
impl std::fmt::Display for QqNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl QqNumber {
    pub fn zero(p: u64, f: u32) -> Self {
        Self {
            coords: vec![PadicNumber::zero(p); f as usize],
        }
    }

    pub fn from_padic(x: PadicNumber, f: u32) -> Self {
        let mut z = Self::zero(x.p(), f);
        z.coords[0] = x;
        z
    }

    /// A `Z_q` element known modulo `p^prec`.
    pub fn from_zq(x: &ZqElem, p: u64, prec: u32) -> Self {
        Self {
            coords: x
                .0
                .iter()
                .map(|c| PadicNumber::from_residue(c.clone(), p, prec))
                .collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.coords[0].p()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, k: &PadicNumber) -> Self {
        Self {
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational, prec: u32) -> Result<Self> {
        let k = PadicNumber::from_ratio(r, self.p(), prec)?;
        Ok(self.scale(&k))
    }

    /// `zeta * x` for a `Z_q` multiplier known to `prec` digits.
    pub fn mul_zq(&self, field: &UnramifiedField, zeta: &ZqElem, prec: u32) -> Self {
        let z = Self::from_zq(zeta, field.p(), prec);
        self.mul(field, &z)
    }

    pub fn mul(&self, field: &UnramifiedField, o: &Self) -> Self {
        let f = self.coords.len();
        let p = self.p();
        if f == 1 {
            return Self {
                coords: vec![&self.coords[0] * &o.coords[0]],
            };
        }
        let mut prod = vec![PadicNumber::zero(p); 2 * f - 1];
        for (i, a) in self.coords.iter().enumerate() {
            for (j, b) in o.coords.iter().enumerate() {
                prod[i + j] = &prod[i + j] + &(a * b);
            }
        }
        let m = field.modulus();
        for d in (f..2 * f - 1).rev() {
            let lead = prod[d].clone();
            for (i, &c) in m[..f].iter().enumerate() {
                if c != 0 {
                    let t = lead.mul_int(&BigInt::from(c));
                    prod[d - f + i] = &prod[d - f + i] - &t;
                }
            }
        }
        prod.truncate(f);
        Self { coords: prod }
    }

    /// The minimum over coordinates of the agreement precision.
    pub fn agreement(&self, o: &Self) -> Result<Option<i64>> {
        let mut best: Option<i64> = None;
        for (a, b) in self.coords.iter().zip(&o.coords) {
            if let Some(v) = a.agreement(b)? {
                best = Some(best.map_or(v, |x| x.min(v)));
            }
        }
        Ok(best)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The constant coordinate if all others vanish.
    pub fn to_padic(&self) -> Result<PadicNumber> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Ok(self.coords[0].clone())
        } else {
            Err(Error::NotInZp("value has non-constant coordinates".into()))
        }
    }

    pub fn truncate_abs(&self, abs: i64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c.truncate_abs(abs)).collect(),
        }
    }

    /// Least absolute precision over the coordinates.
    pub fn abs_prec(&self) -> Option<i64> {
        self.coords.iter().filter_map(|c| c.abs_prec()).min()
    }

    pub fn from_integer(n: BigInt, p: u64, f: u32, prec: u32) -> Self {
        Self::from_padic(PadicNumber::from_residue(n, p, prec), f)
    }
}
