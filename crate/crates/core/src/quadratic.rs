//! Imaginary quadratic fields `K = Q(sqrt d)` and the rank-one identity
//! `L'_p(chi_d omega, 0) = (4/w) log_p(alpha-bar)` for split p, where `alpha`
//! generates `q^h` and `q` is the place picked out by a square root `r` of `d`
//! in `Z_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::arith::{big_pow, is_squarefree, isqrt, kronecker, modulo};
use crate::dirichlet::{
    coset_representatives, lp_derivative_gamma, lp_derivative_jacobi, DirichletCharacter,
    PadicEmbedding,
};
use crate::error::{Error, Result};
use crate::gauss::GaussContext;
use crate::padic::{check_prime, inverse_mod_pk, precision_loss, PadicNumber};

pub const DEFAULT_DISC_BOUND: u64 = 10_000;

pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

fn require_negative_fundamental(d: i64) -> Result<()> {
    if d >= 0 || !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(())
}

/// Number of reduced forms `(a, b, c)` of discriminant `d < 0`.
pub fn class_number(d: i64) -> Result<u64> {
    class_number_bounded(d, DEFAULT_DISC_BOUND)
}

pub fn class_number_bounded(d: i64, bound: u64) -> Result<u64> {
    require_negative_fundamental(d)?;
    if d.unsigned_abs() > bound {
        return Err(Error::Guardrail(format!("|d| = {} exceeds the bound {bound}", d.abs())));
    }
    Ok(reduced_forms(d).len() as u64)
}

/// Reduced forms: `|b| <= a <= c`, `b >= 0` when `|b| = a` or `a = c`.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let n = -d;
    let amax = isqrt((n / 3) as u64) as i64 + 1;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            out.push((a, b, c));
        }
    }
    out
}

/// `x + y rho` with `rho = (1 + sqrt d)/2` (`d ≡ 1 mod 4`) or `sqrt(d/4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticInteger {
    pub x: i64,
    pub y: i64,
}

/// `K = Q(sqrt d)` with `d` a negative fundamental discriminant.
#[derive(Clone, Debug, Serialize)]
pub struct ImaginaryQuadraticField {
    pub d: i64,
    pub h: u64,
    pub w: u64,
    #[serde(skip)]
    chi: DirichletCharacter,
}

impl ImaginaryQuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        let h = class_number(d)?;
        let w = match d {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let chi = DirichletCharacter::quadratic(d)?;
        Ok(Self { d, h, w, chi })
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    fn one_mod_four(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    pub fn norm(&self, a: QuadraticInteger) -> i128 {
        let (x, y) = (a.x as i128, a.y as i128);
        if self.one_mod_four() {
            x * x + x * y + y * y * ((1 - self.d as i128) / 4)
        } else {
            x * x - (self.d as i128 / 4) * y * y
        }
    }

    pub fn conj(&self, a: QuadraticInteger) -> QuadraticInteger {
        if self.one_mod_four() {
            QuadraticInteger { x: a.x + a.y, y: -a.y }
        } else {
            QuadraticInteger { x: a.x, y: -a.y }
        }
    }

    pub fn mul(&self, a: QuadraticInteger, b: QuadraticInteger) -> QuadraticInteger {
        // rho^2 = rho + (d-1)/4 or d/4
        let (c, e) = if self.one_mod_four() {
            (1, (self.d - 1) / 4)
        } else {
            (0, self.d / 4)
        };
        let yy = a.y * b.y;
        QuadraticInteger {
            x: a.x * b.x + e * yy,
            y: a.x * b.y + a.y * b.x + c * yy,
        }
    }

    /// Elements of norm 1, found by enumeration.
    pub fn torsion_units(&self) -> Vec<QuadraticInteger> {
        let mut out = Vec::new();
        for y in -2..=2i64 {
            for x in -3..=3i64 {
                let u = QuadraticInteger { x, y };
                if self.norm(u) == 1 {
                    out.push(u);
                }
            }
        }
        out
    }

    /// All `x + y rho` of norm `n`, in a fixed order.
    pub fn elements_of_norm(&self, n: i128) -> Vec<QuadraticInteger> {
        let dd = self.d.unsigned_abs() as i128;
        // 4N = (2x + y)^2 + |d| y^2 or x^2 + (|d|/4) y^2
        let ymax = ((4 * n / dd) as f64).sqrt() as i64 + 1;
        let xmax = ((n as f64).sqrt() as i64) + ymax + 1;
        let mut out = Vec::new();
        for y in -ymax..=ymax {
            for x in -xmax..=xmax {
                let a = QuadraticInteger { x, y };
                if self.norm(a) == n {
                    out.push(a);
                }
            }
        }
        out
    }
}

/// `-B_{1,chi_d} = 2h/w` together with the bracket form.
#[derive(Clone, Debug, Serialize)]
pub struct DirichletReport {
    pub d: i64,
    pub h: u64,
    pub w: u64,
    pub minus_b1: String,
    pub two_h_over_w: String,
    pub bracket_sum: String,
    pub pass: bool,
}

pub fn dirichlet_check(d: i64) -> Result<DirichletReport> {
    let k = ImaginaryQuadraticField::new(d)?;
    let chi = k.chi();
    let n = d.unsigned_abs() as i64;
    let b1 = chi.bernoulli_b1().as_rational().ok_or_else(|| Error::Character("non-rational B1".into()))?;
    let minus_b1 = -b1;
    let target = BigRational::new(BigInt::from(2 * k.h), BigInt::from(k.w));
    let mut bracket = 0i64;
    for a in 0..n {
        match chi.real_value(a) {
            Some(-1) => bracket += a,
            Some(1) => bracket -= a,
            _ => {}
        }
    }
    let bracket_sum = BigRational::new(BigInt::from(bracket), BigInt::from(n));
    Ok(DirichletReport {
        d,
        h: k.h,
        w: k.w,
        pass: minus_b1 == target && bracket_sum == target,
        minus_b1: minus_b1.to_string(),
        two_h_over_w: target.to_string(),
        bracket_sum: bracket_sum.to_string(),
    })
}

/// Negative fundamental discriminants with `|d| <= bound`.
pub fn negative_fundamental_discriminants(bound: u64) -> Vec<i64> {
    (3..=bound as i64).map(|n| -n).filter(|&d| is_fundamental(d)).collect()
}

/// `r` with `r^2 ≡ d (mod p^prec)`, lifting the least square root mod p.
pub fn sqrt_mod_pk(d: i64, p: u64, prec: u32) -> Result<BigInt> {
    let r0 = (1..p)
        .find(|&r| (r * r) % p == modulo(d, p))
        .ok_or(Error::NotSplit { d, p })?;
    let mut r = BigInt::from(r0);
    let dd = BigInt::from(d);
    let mut k = 1;
    while k < prec {
        k = (2 * k).min(prec);
        let pk = big_pow(p, k);
        let two_r_inv = inverse_mod_pk(&(BigInt::from(2) * &r), p, k);
        r = (&r - (&r * &r - &dd) * two_r_inv).mod_floor(&pk);
    }
    Ok(r)
}

/// The embedding `K -> Q_p` sending `sqrt d` to `r`.
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticEmbedding {
    pub p: u64,
    pub prec: u32,
    #[serde(serialize_with = "ser_big")]
    pub root: BigInt,
}

impl QuadraticEmbedding {
    pub fn new(d: i64, p: u64, prec: u32) -> Result<Self> {
        Ok(Self {
            p,
            prec,
            root: sqrt_mod_pk(d, p, prec)?,
        })
    }

    /// `r -> -r`: the conjugate place.
    pub fn swapped(&self) -> Self {
        let pk = big_pow(self.p, self.prec);
        Self {
            root: (-&self.root).mod_floor(&pk),
            ..self.clone()
        }
    }

    pub fn apply(&self, k: &ImaginaryQuadraticField, a: QuadraticInteger) -> PadicNumber {
        let pk = big_pow(self.p, self.prec);
        let rho = if k.d.rem_euclid(4) == 1 {
            let half = inverse_mod_pk(&BigInt::from(2), self.p, self.prec);
            ((BigInt::one() + &self.root) * half).mod_floor(&pk)
        } else {
            let half = inverse_mod_pk(&BigInt::from(2), self.p, self.prec);
            (&self.root * half).mod_floor(&pk)
        };
        let v = (BigInt::from(a.x) + BigInt::from(a.y) * rho).mod_floor(&pk);
        PadicNumber::from_residue(v, self.p, self.prec)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitGenerator {
    pub alpha: QuadraticInteger,
    pub alpha_bar: QuadraticInteger,
    pub embedding: QuadraticEmbedding,
    pub norm: i128,
}

/// First element of norm `p^h` (in enumeration order) whose image has
/// valuation `h`, so that its conjugate is a p-adic unit.
pub fn split_prime_generator(d: i64, p: u64, prec: u32) -> Result<SplitGenerator> {
    let k = ImaginaryQuadraticField::new(d)?;
    let emb = QuadraticEmbedding::new(d, p, prec)?;
    generator_for(&k, p, &emb)
}

fn generator_for(
    k: &ImaginaryQuadraticField,
    p: u64,
    emb: &QuadraticEmbedding,
) -> Result<SplitGenerator> {
    check_prime(p)?;
    if kronecker(k.d, p) != 1 {
        return Err(Error::NotSplit { d: k.d, p });
    }
    let norm = (p as i128).pow(k.h as u32);
    for alpha in k.elements_of_norm(norm) {
        let bar = k.conj(alpha);
        if emb.apply(k, bar).valuation() == Some(0) {
            return Ok(SplitGenerator {
                alpha,
                alpha_bar: bar,
                embedding: emb.clone(),
                norm,
            });
        }
    }
    Err(Error::GeneratorNotFound(format!("{norm} in Q(sqrt({}))", k.d)))
}

/// Least odd prime `p ∤ d` that splits in `K`.
pub fn smallest_split_prime(d: i64) -> u64 {
    (3u64..).find(|&p| crate::arith::is_prime(p) && kronecker(d, p) == 1)
        .expect("split primes exist")
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneReport {
    pub d: i64,
    pub p: u64,
    pub prec: u32,
    pub h: u64,
    pub w: u64,
    pub generator: SplitGenerator,
    /// `L'_p(chi omega, 0)` by the Gamma formula.
    pub lhs: PadicNumber,
    /// The same derivative through Jacobi sums.
    pub lhs_jacobi: PadicNumber,
    /// `(4/w) log_p(alpha-bar)`.
    pub rhs: PadicNumber,
    /// `(-2/w) log_p(alpha / alpha-bar)`.
    pub rhs_ratio_form: PadicNumber,
    /// `R_p(chi) = (1/h) log_p(alpha / alpha-bar)` and `A_p(chi) = -2h/w`.
    pub regulator: PadicNumber,
    pub leading_term: String,
    pub agreement_precision: i64,
    pub required_precision: i64,
    /// Agreement of the right side across `zeta alpha` for every torsion unit.
    pub unit_invariance: bool,
    /// The conjugate place with the same `alpha` negates the right side.
    pub swap_negates: bool,
    /// The conjugate place with its own generator leaves the right side unchanged.
    pub swap_reselected_agrees: bool,
    pub nonzero: bool,
    pub pass: bool,
}

fn agree(a: &PadicNumber, b: &PadicNumber) -> Result<i64> {
    Ok(a.agreement(b)?.unwrap_or(i64::MAX))
}

pub fn verify_rank_one(d: i64, p: u64, prec: u32) -> Result<RankOneReport> {
    let k = ImaginaryQuadraticField::new(d)?;
    if d.unsigned_abs().is_multiple_of(p) {
        return Err(Error::NotSplit { d, p });
    }
    let work = prec + 4;
    let emb = QuadraticEmbedding::new(d, p, work)?;
    let gen = generator_for(&k, p, &emb)?;
    let chi = k.chi();
    let cemb = PadicEmbedding::for_character(chi, p, work + 4)?;
    let lhs = lp_derivative_gamma(chi, p, &cemb, prec)?.to_padic()?;
    let lhs_jacobi = lp_derivative_jacobi(chi, p, &cemb, prec)?.to_padic()?;

    let w = k.w as i64;
    let four_w = PadicNumber::from_rational(4, w, p, work)?;
    let rhs_of = |emb: &QuadraticEmbedding, bar: QuadraticInteger| -> Result<PadicNumber> {
        Ok(&emb.apply(&k, bar).iwasawa_log()? * &four_w)
    };
    let rhs = rhs_of(&emb, gen.alpha_bar)?.truncate_abs(prec as i64);
    let ratio = emb.apply(&k, gen.alpha).checked_div(&emb.apply(&k, gen.alpha_bar))?;
    let log_ratio = ratio.iwasawa_log()?;
    let rhs_ratio_form = (&log_ratio * &PadicNumber::from_rational(-2, w, p, work)?).truncate_abs(prec as i64);
    let regulator = (&log_ratio * &PadicNumber::from_rational(1, k.h as i64, p, work)?).truncate_abs(prec as i64);

    let mut unit_invariance = true;
    for u in k.torsion_units() {
        let other = rhs_of(&emb, k.conj(k.mul(u, gen.alpha)))?;
        unit_invariance &= agree(&other, &rhs)? >= prec as i64;
    }
    let swapped = emb.swapped();
    let swap_fixed = rhs_of(&swapped, gen.alpha_bar)?;
    let swap_negates = agree(&swap_fixed, &-&rhs)? >= prec as i64;
    let regen = generator_for(&k, p, &swapped)?;
    let swap_reselected_agrees = agree(&rhs_of(&swapped, regen.alpha_bar)?, &rhs)? >= prec as i64;

    let delta = precision_loss(p, prec).delta() as i64;
    let required = prec as i64 - delta;
    let agreement = agree(&lhs, &rhs)?
        .min(agree(&lhs_jacobi, &rhs)?)
        .min(agree(&rhs_ratio_form, &rhs)?);
    let nonzero = !rhs.is_zero();
    let leading = format!("-{}/{}", 2 * k.h, k.w);
    Ok(RankOneReport {
        d,
        p,
        prec,
        h: k.h,
        w: k.w,
        generator: gen,
        lhs,
        lhs_jacobi,
        rhs,
        rhs_ratio_form,
        regulator,
        leading_term: leading,
        agreement_precision: agreement.min(prec as i64),
        required_precision: required,
        unit_invariance,
        swap_negates,
        swap_reselected_agrees,
        nonzero,
        pass: agreement >= required
            && unit_invariance
            && swap_negates
            && swap_reselected_agrees
            && nonzero,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValuationReport {
    pub d: i64,
    pub p: u64,
    /// `ord_p` of `prod_{chi=+1} J(a) / prod_{chi=-1} J(a)` over coset representatives.
    pub jacobi_ord: i64,
    /// `sum_{chi=+1} <a> - sum_{chi=-1} <a>` over `(Z/D)^*`.
    pub bracket_sum: i64,
    /// `-2hD/w`.
    pub expected: i64,
    pub pass: bool,
}

pub fn valuation_identity_check(d: i64, p: u64, prec: u32) -> Result<ValuationReport> {
    let k = ImaginaryQuadraticField::new(d)?;
    if kronecker(d, p) != 1 {
        return Err(Error::NotSplit { d, p });
    }
    let chi = k.chi();
    let n = d.unsigned_abs();
    let mut bracket = 0i64;
    for a in 0..n as i64 {
        match chi.real_value(a) {
            Some(1) => bracket += a,
            Some(-1) => bracket -= a,
            _ => {}
        }
    }
    let f = crate::arith::mult_order(p % n, n) as u32;
    let ctx = GaussContext::new(p, n, prec + f * (n as u32))?;
    let mut ord = 0i64;
    for a in coset_representatives(n, p) {
        let j = ctx.jacobi_sum_padic(a as i64)?;
        let v = j.valuation().ok_or(Error::InsufficientPrecision {
            needed: prec as i64,
            have: 0,
        })?;
        match chi.real_value(a as i64) {
            Some(1) => ord += v,
            Some(-1) => ord -= v,
            _ => {}
        }
    }
    let expected = -2 * (k.h as i64) * (n as i64) / (k.w as i64);
    Ok(ValuationReport {
        d,
        p,
        jacobi_ord: ord,
        bracket_sum: bracket,
        expected,
        pass: ord == expected && bracket == expected,
    })
}

/// `w` from the unit enumeration, for cross-checking the hardcoded table.
pub fn torsion_count(d: i64) -> Result<u64> {
    Ok(ImaginaryQuadraticField::new(d)?.torsion_units().len() as u64)
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Forms of discriminant d up to SL2(Z), counted by brute-force reduction.
    fn class_number_oracle(d: i64) -> u64 {
        use std::collections::BTreeSet;
        let mut classes = BTreeSet::new();
        let n = -d;
        for a in 1..=n {
            for b in -a..=a {
                if (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - d) / (4 * a);
                let (mut a, mut b, mut c) = (a, b, c);
                loop {
                    if b > a || b <= -a {
                        // translate b into (-a, a]
                        let k = (a - b).div_euclid(2 * a);
                        let nb = b + 2 * k * a;
                        c = (nb * nb - d) / (4 * a);
                        b = nb;
                    } else if a > c {
                        std::mem::swap(&mut a, &mut c);
                        b = -b;
                    } else {
                        if a == c && b < 0 {
                            b = -b;
                        }
                        break;
                    }
                }
                classes.insert((a, b, c));
            }
        }
        classes.len() as u64
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(-3).unwrap(), 1);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-47).unwrap(), 5);
        assert!(class_number(-12).is_err());
        for d in negative_fundamental_discriminants(300) {
            assert_eq!(class_number(d).unwrap(), class_number_oracle(d), "d={d}");
        }
    }

    #[test]
    fn torsion_matches_w() {
        for d in [-3i64, -4, -7, -8, -23] {
            let k = ImaginaryQuadraticField::new(d).unwrap();
            assert_eq!(torsion_count(d).unwrap(), k.w);
        }
    }

    #[test]
    fn dirichlet_small() {
        for d in [-3i64, -4, -23] {
            assert!(dirichlet_check(d).unwrap().pass);
        }
        assert_eq!(dirichlet_check(-23).unwrap().minus_b1, "3");
    }

    #[test]
    fn square_roots_and_generators() {
        let r = sqrt_mod_pk(-4, 5, 2).unwrap();
        assert_eq!((&r * &r + 4) % 25, BigInt::from(0));
        let g = split_prime_generator(-4, 5, 6).unwrap();
        assert_eq!(g.norm, 5);
        let k = ImaginaryQuadraticField::new(-4).unwrap();
        assert_eq!(g.embedding.apply(&k, g.alpha).valuation(), Some(1));
        let g = split_prime_generator(-23, 3, 6).unwrap();
        assert_eq!(g.norm, 27);
        assert!(split_prime_generator(-4, 7, 4).is_err());
    }

    #[test]
    fn product_of_images_is_p_to_h() {
        for (d, p) in [(-3i64, 7u64), (-4, 5), (-23, 3), (-7, 11)] {
            let k = ImaginaryQuadraticField::new(d).unwrap();
            let g = split_prime_generator(d, p, 12).unwrap();
            let prod = &g.embedding.apply(&k, g.alpha) * &g.embedding.apply(&k, g.alpha_bar);
            let target = PadicNumber::from_int(p.pow(k.h as u32) as i64, p, 12).unwrap();
            assert!(prod.agreement(&target).unwrap().unwrap_or(99) >= 12);
        }
    }

    #[test]
    fn rank_one_small() {
        let r = verify_rank_one(-4, 5, 8).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_rank_one(-3, 7, 8).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn valuation_identity() {
        for (d, p) in [(-3i64, 7u64), (-4, 5), (-23, 3)] {
            let r = valuation_identity_check(d, p, 4).unwrap();
            assert_eq!(r.bracket_sum, r.expected, "{r:?}");
            assert!(r.pass, "{r:?}");
        }
    }
}
