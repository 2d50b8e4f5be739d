//! Gauss sums `g(a) = -sum_x chi(x)^(-a) psi(Tr x)` over `F_q^*`, Jacobi sums
//! `J(a) = g(a)^N`, Stickelberger digit data and the Gross-Koblitz check.
//!
//! `chi(x)` is the N-th root of unity in `Z_q` congruent to `x^((q-1)/N)`;
//! with `gamma` the least generator of `F_q^*` this is `chi(gamma^j) = zeta_N^j`
//! where `zeta_N = Teich(gamma)^((q-1)/N)`. The additive character is
//! `psi(t) = zeta_p^(c t)` (default `c = 1`).
//!
//! The sum is accumulated as `-sum_r zeta_N^(-a r) S_r` where
//! `S_r = sum_t n(r, t) zeta_p^t` and `n(r, t)` counts `j ≡ r (mod N)` with
//! `Tr(gamma^j) = t`; the counts are shared by every `a` and every `c`.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorial, gcd, mult_order};
use crate::error::{Error, Result};
use crate::gamma::GammaP;
use crate::local::{
    make_unramified, EisensteinField, LocalFieldElement, ResidueElem, ZqElem, DEFAULT_MAX_Q,
};
use crate::padic::{check_prime, PadicNumber};

/// `(p, N, a)` together with the derived degree `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaussSumInstance {
    pub p: u64,
    pub n: u64,
    pub f: u32,
    pub a: u64,
    pub prec: u32,
}

impl GaussSumInstance {
    pub fn new(p: u64, n: u64, a: i64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if n < 2 {
            return Err(Error::InvalidInstance(format!("N = {n} must be at least 2")));
        }
        if gcd(n as i64, p as i64) != 1 {
            return Err(Error::InvalidInstance(format!("N = {n} is not prime to p = {p}")));
        }
        let a = a.rem_euclid(n as i64) as u64;
        if a == 0 {
            return Err(Error::InvalidInstance("a must be nonzero modulo N".into()));
        }
        let f = mult_order(p % n, n) as u32;
        Ok(Self { p, n, f, a, prec })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn with_a(&self, a: i64) -> Result<Self> {
        Self::new(self.p, self.n, a, self.prec)
    }
}

/// Base-p digits of `(q-1) a / N` and the two valuation formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StickelbergerData {
    pub digits: Vec<u64>,
    pub digit_sum: u64,
    /// `sum_n <p^n a>` as integers in `0..N`.
    pub residue_sum: u64,
    pub exponent_check: bool,
}

pub fn stickelberger_data(inst: &GaussSumInstance) -> StickelbergerData {
    let (p, n, f) = (inst.p, inst.n, inst.f);
    let q = inst.q();
    let mut k = (q - 1) / n * inst.a;
    let mut digits = Vec::with_capacity(f as usize);
    for _ in 0..f {
        digits.push(k % p);
        k /= p;
    }
    let digit_sum = digits.iter().sum();
    let mut residue_sum = 0;
    let mut t = inst.a;
    for _ in 0..f {
        residue_sum += t;
        t = t * p % n;
    }
    StickelbergerData {
        exponent_check: digit_sum * n == (p - 1) * residue_sum,
        digits,
        digit_sum,
        residue_sum,
    }
}

/// Precomputed data for all Gauss sums over one residue field.
#[derive(Clone, Debug)]
pub struct GaussContext {
    p: u64,
    n: u64,
    f: u32,
    field: EisensteinField,
    generator: ResidueElem,
    zeta_n_powers: Vec<ZqElem>,
    zeta_p_powers: Vec<LocalFieldElement>,
    /// `counts[r][t]`.
    counts: Vec<Vec<u64>>,
    /// discrete log of each nonzero residue index, `dlog[idx]`.
    dlog: Vec<u64>,
}

/// Digits beyond the requested precision kept by the local computations.
fn working_digits(prec: u32, f: u32) -> u32 {
    prec + f + 2
}

impl GaussContext {
    pub fn new(p: u64, n: u64, prec: u32) -> Result<Self> {
        Self::with_bound(p, n, prec, DEFAULT_MAX_Q)
    }

    pub fn with_bound(p: u64, n: u64, prec: u32, max_q: u64) -> Result<Self> {
        let inst = GaussSumInstance::new(p, n, 1, prec)?;
        let f = inst.f;
        let q = inst
            .p
            .checked_pow(f)
            .filter(|&q| q <= max_q)
            .ok_or_else(|| Error::Guardrail(format!("q = {p}^{f} exceeds {max_q}")))?;
        let base = make_unramified(p, f, working_digits(prec, f))?;
        let res = base.residue().clone();
        let field = EisensteinField::new(base.clone());
        let generator = res.generator();
        let teich = base.teichmuller_lift(&generator)?;
        let zeta_n = base.pow(&teich, (q - 1) / n);
        let mut zeta_n_powers = Vec::with_capacity(n as usize);
        let mut z = base.one();
        for _ in 0..n {
            zeta_n_powers.push(z.clone());
            z = base.mul(&z, &zeta_n);
        }
        let zeta_p = field.zeta_p()?;
        let mut zeta_p_powers = Vec::with_capacity(p as usize);
        let mut w = field.one();
        for _ in 0..p {
            zeta_p_powers.push(w.clone());
            w = field.mul(&w, &zeta_p);
        }
        let mut counts = vec![vec![0u64; p as usize]; n as usize];
        let mut dlog = vec![0u64; q as usize];
        let mut x = res.one();
        for j in 0..q - 1 {
            let t = res.trace(&x);
            counts[(j % n) as usize][t as usize] += 1;
            dlog[res.index(&x) as usize] = j;
            x = res.mul(&x, &generator);
        }
        Ok(Self {
            p,
            n,
            f,
            field,
            generator,
            zeta_n_powers,
            zeta_p_powers,
            counts,
            dlog,
        })
    }

    pub fn field(&self) -> &EisensteinField {
        &self.field
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn generator(&self) -> &ResidueElem {
        &self.generator
    }

    pub fn zeta_p(&self) -> &LocalFieldElement {
        &self.zeta_p_powers[1]
    }

    /// `zeta_N^k`.
    pub fn zeta_n_pow(&self, k: i64) -> ZqElem {
        self.zeta_n_powers[k.rem_euclid(self.n as i64) as usize].clone()
    }

    /// The N-th power residue symbol of a nonzero residue-field element.
    pub fn power_residue_character(&self, x: &[u64]) -> Result<ZqElem> {
        Ok(self.zeta_n_pow(self.discrete_log(x)? as i64))
    }

    /// `j` with `x = gamma^j`.
    pub fn discrete_log(&self, x: &[u64]) -> Result<u64> {
        let res = self.field.base().residue();
        if res.is_zero(x) {
            return Err(Error::ZeroResidue);
        }
        Ok(self.dlog[res.index(x) as usize])
    }

    /// `g(a)` with additive character `t -> zeta_p^(c t)`.
    pub fn gauss_sum_with(&self, a: i64, c: i64) -> Result<LocalFieldElement> {
        let p = self.p as i64;
        if c.rem_euclid(p) == 0 {
            return Err(Error::InvalidInstance("additive twist c must be prime to p".into()));
        }
        let k = &self.field;
        let mut total = k.zero();
        for (r, row) in self.counts.iter().enumerate() {
            let mut s_r = k.zero();
            for (t, &cnt) in row.iter().enumerate() {
                if cnt == 0 {
                    continue;
                }
                let idx = (c * t as i64).rem_euclid(p) as usize;
                s_r = k.add(&s_r, &k.scale_int(&self.zeta_p_powers[idx], cnt as i64));
            }
            let coeff = self.zeta_n_pow(-a * r as i64);
            total = k.add(&total, &k.scale(&s_r, &coeff));
        }
        Ok(k.neg(&total))
    }

    pub fn gauss_sum(&self, a: i64) -> Result<LocalFieldElement> {
        self.gauss_sum_with(a, 1)
    }

    pub fn jacobi_sum(&self, a: i64) -> Result<LocalFieldElement> {
        let g = self.gauss_sum(a)?;
        Ok(self.field.pow(&g, self.n))
    }

    /// `J(a)` as an element of `Z_p` (it is fixed by Frobenius).
    pub fn jacobi_sum_padic(&self, a: i64) -> Result<PadicNumber> {
        let j = self.jacobi_sum(a)?;
        self.field
            .to_padic(&j)
            .ok_or_else(|| Error::NotInZp(format!("J({a}) has non-constant coordinates")))
    }

    /// `v_pi(g(a))`, certified against the working precision.
    pub fn gauss_valuation(&self, g: &LocalFieldElement) -> Result<u64> {
        let cap = self.field.pi_prec(g);
        match self.field.valuation(g) {
            Some(v) if v < cap => Ok(v),
            _ => Err(Error::InsufficientPrecision {
                needed: cap as i64 + 1,
                have: cap as i64,
            }),
        }
    }
}

/// A Gauss sum with its pi-adic valuation.
#[derive(Clone, Debug)]
pub struct GaussSum {
    pub value: LocalFieldElement,
    pub valuation: u64,
}

pub fn gauss_sum(inst: &GaussSumInstance) -> Result<GaussSum> {
    let ctx = GaussContext::new(inst.p, inst.n, inst.prec)?;
    let value = ctx.gauss_sum(inst.a as i64)?;
    let valuation = ctx.gauss_valuation(&value)?;
    Ok(GaussSum { value, valuation })
}

pub fn jacobi_sum(inst: &GaussSumInstance) -> Result<PadicNumber> {
    GaussContext::new(inst.p, inst.n, inst.prec)?.jacobi_sum_padic(inst.a as i64)
}

/// Outcome of comparing `g / pi^(digit sum)` with the Gamma product.
#[derive(Clone, Debug, Serialize)]
pub struct GrossKoblitzReport {
    pub instance: GaussSumInstance,
    pub lhs_unit: PadicNumber,
    pub rhs_unit: PadicNumber,
    pub agreement_precision: i64,
    pub factorial_congruence_ok: bool,
    pub digit_sum: u64,
    pub gauss_valuation: u64,
    /// `g(a) g'(a) / q` where `g'` uses `chi^a` and `psi(-t)`.
    pub conjugate_sign: Option<i64>,
}

impl GaussContext {
    pub fn gross_koblitz(&self, inst: &GaussSumInstance) -> Result<GrossKoblitzReport> {
        let k = &self.field;
        let data = stickelberger_data(inst);
        let g = self.gauss_sum(inst.a as i64)?;
        let v = self.gauss_valuation(&g)?;
        let e = k.div_pi_pow(&g, data.digit_sum)?;
        let lhs = k.to_padic(&e).ok_or_else(|| {
            Error::NotInZp(format!(
                "g/pi^s for (p={}, N={}, a={}) has non-constant coordinates",
                inst.p, inst.n, inst.a
            ))
        })?;
        let lhs = lhs.truncate_rel(inst.prec);
        let gp = GammaP::new(inst.p, inst.prec)?;
        let mut rhs = PadicNumber::one(inst.p, inst.prec);
        let mut t = inst.a;
        for _ in 0..inst.f {
            rhs = &rhs * &gp.at_rational(t as i64, inst.n as i64)?;
            t = t * inst.p % inst.n;
        }
        let agreement = lhs.agreement(&rhs)?.unwrap_or(inst.prec as i64);
        let fact = data
            .digits
            .iter()
            .fold(BigInt::from(1), |acc, &z| acc * factorial(z));
        let pb = BigInt::from(inst.p);
        let factorial_congruence_ok =
            (lhs.to_integer_mod(1)? * fact).mod_floor(&pb) == BigInt::from(1);
        let conj = self.gauss_sum_with(-(inst.a as i64), -1)?;
        let prod = k.mul(&g, &conj);
        let conjugate_sign = k
            .div_p_pow(&prod, inst.f)
            .ok()
            .and_then(|x| k.to_padic(&x))
            .and_then(|x| {
                if x == PadicNumber::one(inst.p, x.prec().max(1)) {
                    Some(1)
                } else if (&x + &PadicNumber::one(inst.p, x.abs_prec()? as u32)).is_zero() {
                    Some(-1)
                } else {
                    None
                }
            });
        Ok(GrossKoblitzReport {
            instance: *inst,
            lhs_unit: lhs,
            rhs_unit: rhs,
            agreement_precision: agreement,
            factorial_congruence_ok,
            digit_sum: data.digit_sum,
            gauss_valuation: v,
            conjugate_sign,
        })
    }
}

pub fn gross_koblitz_verify(inst: &GaussSumInstance) -> Result<GrossKoblitzReport> {
    GaussContext::new(inst.p, inst.n, inst.prec)?.gross_koblitz(inst)
}

/// The default `(p, N)` matrix.
pub const DEFAULT_MATRIX: [(u64, u64); 6] = [(7, 3), (5, 4), (13, 3), (5, 3), (7, 4), (11, 5)];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::precision_loss;

    #[test]
    fn stickelberger_examples() {
        let d = stickelberger_data(&GaussSumInstance::new(7, 3, 1, 6).unwrap());
        assert_eq!(d.digits, vec![2]);
        assert_eq!(d.digit_sum, 2);
        let d = stickelberger_data(&GaussSumInstance::new(5, 3, 1, 6).unwrap());
        assert_eq!(d.digits, vec![3, 1]);
        assert_eq!(d.digit_sum, 4);
        assert!(d.exponent_check);
    }

    #[test]
    fn instance_validation() {
        assert!(GaussSumInstance::new(7, 7, 1, 4).is_err());
        assert!(GaussSumInstance::new(7, 3, 3, 4).is_err());
        assert!(GaussSumInstance::new(7, 1, 1, 4).is_err());
        assert_eq!(GaussSumInstance::new(7, 4, 1, 4).unwrap().f, 2);
    }

    #[test]
    fn valuations_match_digit_sums() {
        for (p, n) in DEFAULT_MATRIX {
            let ctx = GaussContext::new(p, n, 5).unwrap();
            for a in 1..n as i64 {
                let inst = GaussSumInstance::new(p, n, a, 5).unwrap();
                let g = ctx.gauss_sum(a).unwrap();
                let v = ctx.gauss_valuation(&g).unwrap();
                assert_eq!(v, stickelberger_data(&inst).digit_sum, "p={p} N={n} a={a}");
            }
        }
    }

    #[test]
    fn power_residue_character_is_multiplicative() {
        let ctx = GaussContext::new(5, 3, 4).unwrap();
        let res = ctx.field().base().residue().clone();
        let base = ctx.field().base().clone();
        assert_eq!(ctx.power_residue_character(&res.one()).unwrap(), base.one());
        for (i, j) in [(3u64, 7u64), (11, 19), (24, 24)] {
            let x = res.from_index(i);
            let y = res.from_index(j);
            let lhs = ctx.power_residue_character(&res.mul(&x, &y)).unwrap();
            let rhs = base.mul(
                &ctx.power_residue_character(&x).unwrap(),
                &ctx.power_residue_character(&y).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
        let chi_g = ctx.power_residue_character(ctx.generator()).unwrap();
        assert_ne!(chi_g, base.one());
        assert_eq!(base.pow(&chi_g, 3), base.one());
    }

    #[test]
    fn jacobi_sum_valuations_and_psi_independence() {
        let ctx = GaussContext::new(7, 3, 6).unwrap();
        let j = ctx.jacobi_sum_padic(1).unwrap();
        assert_eq!(j.valuation(), Some(1));
        let ctx = GaussContext::new(5, 3, 6).unwrap();
        let j = ctx.jacobi_sum_padic(1).unwrap();
        assert_eq!(j.valuation(), Some(3));
        let k = ctx.field();
        for c in 2..5 {
            let gc = ctx.gauss_sum_with(1, c).unwrap();
            assert_eq!(k.pow(&gc, 3), ctx.jacobi_sum(1).unwrap());
        }
    }

    #[test]
    fn gross_koblitz_small() {
        let inst = GaussSumInstance::new(7, 3, 1, 8).unwrap();
        let r = gross_koblitz_verify(&inst).unwrap();
        assert_eq!(r.lhs_unit.residue().unwrap(), 4);
        assert!(r.factorial_congruence_ok);
        let delta = precision_loss(7, 8).delta() as i64;
        assert!(r.agreement_precision >= 8 - delta);
        let inst = GaussSumInstance::new(5, 3, 1, 8).unwrap();
        let r = gross_koblitz_verify(&inst).unwrap();
        assert_eq!(r.lhs_unit.residue().unwrap(), 1);
        assert!(r.factorial_congruence_ok);
        assert!(r.agreement_precision >= 8 - precision_loss(5, 8).delta() as i64);
        assert_eq!(r.conjugate_sign, Some(1));
    }

    #[test]
    fn frobenius_rotation_keeps_valuation() {
        let ctx = GaussContext::new(5, 3, 5).unwrap();
        let v1 = ctx.gauss_valuation(&ctx.gauss_sum(1).unwrap()).unwrap();
        let v5 = ctx.gauss_valuation(&ctx.gauss_sum(5).unwrap()).unwrap();
        assert_eq!(v1, v5);
        let d1 = stickelberger_data(&GaussSumInstance::new(5, 3, 1, 5).unwrap());
        let d5 = stickelberger_data(&GaussSumInstance::new(5, 3, 5, 5).unwrap());
        let mut rot = d1.digits.clone();
        rot.rotate_right(1);
        assert_eq!(d5.digits, rot);
    }
}
