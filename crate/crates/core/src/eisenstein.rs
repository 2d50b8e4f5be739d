//! Eisenstein families to first order in the weight.
//!
//! Weights are restricted to the disc `k ≡ 1 mod (p-1)`, written `k = 1 + eps`
//! with `eps^2 = 0`. On that disc `d^(k-1) = <d>^(k-1) = 1 + eps log_p d`, so
//! every family below is a q-expansion with coefficients in `Q_p[eps]/eps^2`.
//!
//! Character values must lie in `Q_p`, i.e. the order of `chi` divides `p - 1`.

use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, is_prime};
use crate::dirichlet::{
    lp_derivative_gamma, lp_value_at_zero, zeta_p_residue, DirichletCharacter, InterpolationOracle,
    PadicEmbedding,
};
use crate::error::{Error, Result};
use crate::padic::{precision_loss, PadicNumber};
use crate::qq::QqNumber;

/// `a + b eps` with `eps^2 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualScalar {
    pub value: PadicNumber,
    pub derivative: PadicNumber,
}

fn min_agreement(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl DualScalar {
    pub fn new(value: PadicNumber, derivative: PadicNumber) -> Self {
        Self { value, derivative }
    }

    /// A scalar with no `eps` part.
    pub fn constant(value: PadicNumber) -> Self {
        let p = value.p();
        Self::new(value, PadicNumber::zero(p))
    }

    pub fn zero(p: u64) -> Self {
        Self::new(PadicNumber::zero(p), PadicNumber::zero(p))
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::constant(PadicNumber::one(p, prec))
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Result<Self> {
        Ok(Self::constant(PadicNumber::from_int(n, p, prec)?))
    }

    pub fn p(&self) -> u64 {
        self.value.p()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.value + &o.value, &self.derivative + &o.derivative)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.value - &o.value, &self.derivative - &o.derivative)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.value, -&self.derivative)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = &(&self.value * &o.derivative) + &(&self.derivative * &o.value);
        Self::new(&self.value * &o.value, d)
    }

    pub fn scale(&self, k: &PadicNumber) -> Self {
        Self::new(&self.value * k, &self.derivative * k)
    }

    /// Units are the scalars whose value part is a p-adic unit.
    pub fn is_unit(&self) -> bool {
        self.value.valuation() == Some(0)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.value.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.value.inverse()?;
        let d = -&(&self.derivative * &(&inv * &inv));
        Ok(Self::new(inv, d))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// The weight-one specialization `eps = 0`.
    pub fn specialize(&self) -> PadicNumber {
        self.value.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.derivative.is_zero()
    }

    pub fn truncate_abs(&self, abs: i64) -> Self {
        Self::new(self.value.truncate_abs(abs), self.derivative.truncate_abs(abs))
    }

    /// Agreement of both parts; `None` when both are exactly equal.
    pub fn agreement(&self, o: &Self) -> Result<Option<i64>> {
        Ok(min_agreement(
            self.value.agreement(&o.value)?,
            self.derivative.agreement(&o.derivative)?,
        ))
    }
}

impl fmt::Display for DualScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})·eps", self.value, self.derivative)
    }
}

/// A q-expansion `a_0 + a_1 q + ... + a_{n_max} q^{n_max}` over the dual numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualSeries {
    p: u64,
    coeffs: Vec<DualScalar>,
    level: u64,
    character: String,
}

impl DualSeries {
    pub fn new(p: u64, coeffs: Vec<DualScalar>, level: u64, character: impl Into<String>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least a constant term");
        Self {
            p,
            coeffs,
            level,
            character: character.into(),
        }
    }

    pub fn zero(p: u64, n_max: usize) -> Self {
        Self::new(p, vec![DualScalar::zero(p); n_max + 1], 1, "1")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &str {
        &self.character
    }

    pub fn coeff(&self, n: usize) -> &DualScalar {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[DualScalar] {
        &self.coeffs
    }

    pub fn truncated(&self, n_max: usize) -> Self {
        let n = n_max.min(self.n_max());
        Self {
            coeffs: self.coeffs[..=n].to_vec(),
            ..self.clone()
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&DualScalar, &DualScalar) -> DualScalar) -> Self {
        let n = self.n_max().min(o.n_max());
        let coeffs = (0..=n).map(|i| f(&self.coeffs[i], &o.coeffs[i])).collect();
        Self {
            p: self.p,
            coeffs,
            level: lcm(self.level, o.level),
            character: self.character.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, DualScalar::add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, DualScalar::sub)
    }

    pub fn scale(&self, k: &DualScalar) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
            ..self.clone()
        }
    }

    /// Cauchy product truncated at the smaller `n_max`.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n_max().min(o.n_max());
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(DualScalar::zero(self.p), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&o.coeffs[k - i]))
                })
            })
            .collect();
        Self {
            p: self.p,
            coeffs,
            level: lcm(self.level, o.level),
            character: self.character.clone(),
        }
    }

    /// Value parts: the weight-one specialization.
    pub fn specialize(&self) -> Vec<PadicNumber> {
        self.coeffs.iter().map(DualScalar::specialize).collect()
    }

    /// The series with derivative parts dropped, as a series again.
    pub fn value_series(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| DualScalar::constant(c.value.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Worst agreement over the common range of coefficients.
    pub fn agreement(&self, o: &Self) -> Result<Option<i64>> {
        let n = self.n_max().min(o.n_max());
        let mut worst = None;
        for i in 0..=n {
            worst = min_agreement(worst, self.coeffs[i].agreement(&o.coeffs[i])?);
        }
        Ok(worst)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(DualScalar::is_zero)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a as i64, b as i64) as u64 * b
}

/// `d^(k-1) = 1 + eps log_p d` on the weight disc `k ≡ 1 mod (p-1)`.
pub fn weight_exponent(d: i64, p: u64, prec: u32) -> Result<DualScalar> {
    if d % p as i64 == 0 {
        return Err(Error::DivisibleByP(d, p));
    }
    let log = PadicNumber::from_int(d, p, prec)?.iwasawa_log()?;
    Ok(DualScalar::new(PadicNumber::one(p, prec), log))
}

/// `chi(a)` in `Z_p` for every residue class.
#[derive(Clone, Debug)]
pub struct CharacterValues {
    p: u64,
    prec: u32,
    chi: DirichletCharacter,
    values: Vec<Option<PadicNumber>>,
}

impl CharacterValues {
    pub fn new(chi: &DirichletCharacter, p: u64, prec: u32) -> Result<Self> {
        let emb = PadicEmbedding::for_character(chi, p, prec + 10)?;
        Self::with_embedding(chi, &emb, prec)
    }

    pub fn with_embedding(chi: &DirichletCharacter, emb: &PadicEmbedding, prec: u32) -> Result<Self> {
        let p = emb.p();
        if emb.f() != 1 {
            return Err(Error::Embedding(format!(
                "values of a character of order {} do not lie in Q_{p}",
                chi.order()
            )));
        }
        let values = (0..chi.modulus() as i64)
            .map(|a| -> Result<Option<PadicNumber>> {
                match emb.chi(chi, a)? {
                    Some(z) => Ok(Some(QqNumber::from_zq(&z, p, prec).to_padic()?)),
                    None => Ok(None),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            p,
            prec,
            chi: chi.clone(),
            values,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn value(&self, a: i64) -> Option<&PadicNumber> {
        let n = self.chi.modulus() as i64;
        self.values[a.rem_euclid(n) as usize].as_ref()
    }

    fn label(&self) -> String {
        format!("chi mod {}", self.chi.modulus())
    }
}

fn log_table(p: u64, prec: u32, n_max: usize) -> Result<Vec<Option<PadicNumber>>> {
    (0..=n_max)
        .map(|d| {
            if d == 0 || (d as u64).is_multiple_of(p) {
                Ok(None)
            } else {
                PadicNumber::from_int(d as i64, p, prec)?.iwasawa_log().map(Some)
            }
        })
        .collect()
}

/// Which way a divisor sum attaches the character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Twist {
    /// `chi(d) d^(k-1)`
    OnDivisor,
    /// `chi(n/d) d^(k-1)`
    OnCodivisor,
}

fn stabilized_divisor_sums(cv: &CharacterValues, n_max: usize, twist: Twist) -> Result<Vec<DualScalar>> {
    let p = cv.p;
    let logs = log_table(p, cv.prec, n_max)?;
    let mut a = vec![DualScalar::zero(p); n_max + 1];
    for (d, log_d) in logs.iter().enumerate().skip(1) {
        let Some(log_d) = log_d else { continue };
        let w = DualScalar::new(PadicNumber::one(p, cv.prec), log_d.clone());
        for n in (d..=n_max).step_by(d) {
            let c = match twist {
                Twist::OnDivisor => cv.value(d as i64),
                Twist::OnCodivisor => cv.value((n / d) as i64),
            };
            if let Some(c) = c {
                a[n] = a[n].add(&w.scale(c));
            }
        }
    }
    Ok(a)
}

/// `L(chi, 0)` and the first Taylor coefficients of `L_p(chi omega, s)` at 0.
#[derive(Clone, Debug, Serialize)]
pub struct LData {
    pub l_at_zero: PadicNumber,
    pub lp_at_zero: PadicNumber,
    pub lp_derivative: PadicNumber,
    /// `L_p''(chi omega, 0) / 2`
    pub lp_second: PadicNumber,
}

impl LData {
    pub fn new(chi: &DirichletCharacter, emb: &PadicEmbedding, prec: u32) -> Result<Self> {
        let p = emb.p();
        let l0 = emb.embed(&chi.l_at_zero()?)?.to_padic()?;
        let jet = InterpolationOracle::for_character(chi, emb, prec)?.jet(3)?;
        let lp0 = lp_value_at_zero(chi, p, emb, prec)?.to_padic()?;
        Ok(Self {
            l_at_zero: l0.truncate_abs(prec as i64),
            lp_at_zero: lp0,
            lp_derivative: jet[1].to_padic()?,
            lp_second: jet[2].to_padic()?,
        })
    }

    /// `L_p(chi omega, 1 - k)` at `k = 1 + eps`, i.e. at `s = -eps`.
    pub fn lp_at_one_minus_k(&self) -> DualScalar {
        DualScalar::new(self.lp_at_zero.clone(), -&self.lp_derivative)
    }

    pub fn has_trivial_zero(&self) -> bool {
        self.lp_at_zero.is_zero()
    }
}

/// Everything the families need for one `(chi, p)`.
#[derive(Clone, Debug)]
pub struct FamilyContext {
    p: u64,
    prec: u32,
    cv: CharacterValues,
    emb: PadicEmbedding,
    l: LData,
}

impl FamilyContext {
    pub fn new(chi: &DirichletCharacter, p: u64, prec: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if chi.modulus().is_multiple_of(p) {
            return Err(Error::Character(format!("p = {p} divides the modulus")));
        }
        if !chi.is_odd() {
            return Err(Error::Character("character must be odd".into()));
        }
        let emb = PadicEmbedding::for_character(chi, p, prec + 10)?;
        let cv = CharacterValues::with_embedding(chi, &emb, prec)?;
        let l = LData::new(chi, &emb, prec)?;
        Ok(Self {
            p,
            prec,
            cv,
            emb,
            l,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn character(&self) -> &DirichletCharacter {
        self.cv.character()
    }

    pub fn values(&self) -> &CharacterValues {
        &self.cv
    }

    pub fn l_data(&self) -> &LData {
        &self.l
    }

    fn level(&self) -> u64 {
        self.character().modulus() * self.p
    }

    pub fn chi_p_is_one(&self) -> bool {
        self.cv.value(self.p as i64).is_some_and(|v| {
            v.agreement(&PadicNumber::one(self.p, self.prec))
                .ok()
                .flatten()
                .is_none_or(|a| a >= self.prec as i64)
        })
    }

    fn require_trivial_zero(&self) -> Result<()> {
        if !self.chi_p_is_one() {
            return Err(Error::InvalidInstance(format!("chi({}) != 1", self.p)));
        }
        Ok(())
    }

    /// `E_k^*(1, chi)`: constant term `L_p(chi omega, 1-k)/2`, `a_n = sum_{d|n, p∤d} chi(d) d^(k-1)`.
    pub fn e_star(&self, n_max: usize) -> Result<DualSeries> {
        let mut a = stabilized_divisor_sums(&self.cv, n_max, Twist::OnDivisor)?;
        let half = PadicNumber::from_rational(1, 2, self.p, self.prec)?;
        a[0] = self.l.lp_at_one_minus_k().scale(&half);
        Ok(DualSeries::new(self.p, a, self.level(), self.cv.label()))
    }

    /// `E_k^*(chi, 1)`: no constant term, `a_n = sum_{d|n, p∤d} chi(n/d) d^(k-1)`.
    pub fn e_star_swapped(&self, n_max: usize) -> Result<DualSeries> {
        let a = stabilized_divisor_sums(&self.cv, n_max, Twist::OnCodivisor)?;
        Ok(DualSeries::new(self.p, a, self.level(), self.cv.label()))
    }

    /// The classical weight-one `E_1(1, chi)`: `L(chi,0)/2 + sum (sum_{d|n} chi(d)) q^n`.
    pub fn e_one(&self, n_max: usize) -> Result<DualSeries> {
        let p = self.p;
        let mut a = vec![PadicNumber::zero(p); n_max + 1];
        for d in 1..=n_max {
            if let Some(c) = self.cv.value(d as i64) {
                for n in (d..=n_max).step_by(d) {
                    a[n] = &a[n] + c;
                }
            }
        }
        a[0] = &self.l.l_at_zero * &PadicNumber::from_rational(1, 2, p, self.prec)?;
        let coeffs = a.into_iter().map(DualScalar::constant).collect();
        Ok(DualSeries::new(
            p,
            coeffs,
            self.character().modulus(),
            self.cv.label(),
        ))
    }

    /// `E_k^* = E_k^*(1, chi)` and whether it sits at a trivial zero.
    pub fn family_e_star(&self, n_max: usize) -> Result<(DualSeries, bool)> {
        Ok((self.e_star(n_max)?, self.l.has_trivial_zero()))
    }

    /// `F_k^* = E_k^*(1,chi) - L_p(chi omega, 1-k)/L(chi,0) · E_1(1,chi) G`.
    pub fn f_star(&self, n_max: usize, g: &DualSeries) -> Result<DualSeries> {
        self.require_trivial_zero()?;
        let coef = self.l.lp_at_one_minus_k().div(&DualScalar::constant(self.l.l_at_zero.clone()))?;
        let correction = self.e_one(n_max)?.mul(g).scale(&coef);
        Ok(self.e_star(n_max)?.sub(&correction))
    }

    /// The coefficient `L_p(chi omega,1-k) L(chi^-1,0) / (L_p(chi^-1 omega,1-k) L(chi,0))`
    /// modulo `eps^2`. Both `L_p` factors vanish at `eps = 0`, so the ratio is
    /// taken of leading terms: `(a1 + a2 eps)/(b1 + b2 eps)` after dividing by `eps`.
    pub fn h_coefficient(&self) -> Result<HCoefficient> {
        self.require_trivial_zero()?;
        let chi_bar = self.character().conj();
        let l_bar = LData::new(&chi_bar, &self.emb, self.prec)?;
        // L_p(psi, -eps) = c0 - c1 eps + c2 eps^2
        let a1 = -&self.l.lp_derivative;
        let a2 = self.l.lp_second.clone();
        let b1 = -&l_bar.lp_derivative;
        let b2 = l_bar.lp_second.clone();
        let denominator_nonzero = !b1.is_zero();
        if !denominator_nonzero {
            return Ok(HCoefficient {
                coefficient: None,
                denominator_nonzero,
                l_bar,
            });
        }
        let ratio = DualScalar::new(a1, a2).div(&DualScalar::new(b1, b2))?;
        let lr = l_bar.l_at_zero.checked_div(&self.l.l_at_zero)?;
        Ok(HCoefficient {
            coefficient: Some(ratio.scale(&lr)),
            denominator_nonzero,
            l_bar,
        })
    }

    /// `H_k^* = F_k^* - c E_k^*(chi, 1)`.
    pub fn h_star(&self, n_max: usize, g: &DualSeries) -> Result<(DualSeries, HCoefficient)> {
        let h = self.h_coefficient()?;
        let c = h.coefficient.clone().ok_or_else(|| {
            Error::InvalidInstance("L_p'(chi^-1 omega, 0) vanishes at working precision".into())
        })?;
        let f = self.f_star(n_max, g)?;
        Ok((f.sub(&self.e_star_swapped(n_max)?.scale(&c)), h))
    }

    /// `L_p'(chi omega,0)/L(chi,0) + L_p'(chi^-1 omega,0)/L(chi,0)`.
    pub fn l_invariant_condition(&self) -> Result<LInvariantReport> {
        self.require_trivial_zero()?;
        let l_bar = LData::new(&self.character().conj(), &self.emb, self.prec)?;
        let l0 = &self.l.l_at_zero;
        let first = self.l.lp_derivative.checked_div(l0)?;
        let second = l_bar.lp_derivative.checked_div(l0)?;
        let sum = &first + &second;
        let valuation = sum.valuation();
        Ok(LInvariantReport {
            chi_modulus: self.character().modulus(),
            p: self.p,
            prec: self.prec,
            first_term: first,
            second_term: second,
            sum,
            valuation,
            holds: valuation.is_some(),
            denominator_derivative_nonzero: !l_bar.lp_derivative.is_zero(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HCoefficient {
    pub coefficient: Option<DualScalar>,
    pub denominator_nonzero: bool,
    pub l_bar: LData,
}

#[derive(Clone, Debug, Serialize)]
pub struct LInvariantReport {
    pub chi_modulus: u64,
    pub p: u64,
    pub prec: u32,
    pub first_term: PadicNumber,
    pub second_term: PadicNumber,
    pub sum: PadicNumber,
    pub valuation: Option<i64>,
    /// The sum is nonzero at working precision, so the normalizing operator exists.
    pub holds: bool,
    pub denominator_derivative_nonzero: bool,
}

/// The weight-`(k-1)` normalized Eisenstein family with trivial character:
/// `1 - eps (2/lambda_p) sum (sum_{d|n, p∤d} d^-1) q^n`, where `lambda_p` is the
/// residue of `zeta_p` at `s = 1`. Its value part is the constant 1.
pub fn g_factor(p: u64, n_max: usize, prec: u32) -> Result<GFactor> {
    const STEP: u32 = 3;
    let res = zeta_p_residue(p, prec, STEP)?;
    // the two step sizes differ by a term linear in eps = p^STEP
    let consistent = res.step_agreement.is_none_or(|a| a >= STEP as i64);
    if !consistent {
        return Err(Error::Oracle(format!(
            "zeta_p residue moves by p^{:?} between step sizes",
            res.step_agreement
        )));
    }
    let lambda = res.extrapolated.clone();
    let two_over = PadicNumber::from_int(-2, p, prec)?.checked_div(&lambda)?;
    let mut a = vec![DualScalar::zero(p); n_max + 1];
    a[0] = DualScalar::one(p, prec);
    for d in 1..=n_max {
        if (d as u64).is_multiple_of(p) {
            continue;
        }
        let inv_d = PadicNumber::from_rational(1, d as i64, p, prec)?;
        for n in (d..=n_max).step_by(d) {
            a[n].derivative = &a[n].derivative + &inv_d;
        }
    }
    for c in a.iter_mut().skip(1) {
        c.derivative = &c.derivative * &two_over;
    }
    Ok(GFactor {
        series: DualSeries::new(p, a, p, "1"),
        lambda,
        residue_step_agreement: res.step_agreement,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GFactor {
    pub series: DualSeries,
    pub lambda: PadicNumber,
    pub residue_step_agreement: Option<i64>,
}

/// `(T_l f)_n = a_{nl} + chi(l) l^(k-1) a_{n/l}`, the second term only when `l | n`.
pub fn hecke_t(ell: u64, f: &DualSeries, cv: &CharacterValues) -> Result<DualSeries> {
    let p = cv.p();
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == p || cv.character().modulus().is_multiple_of(ell) {
        return Err(Error::InvalidInstance(format!("T_{ell} needs l prime to pN")));
    }
    let l = ell as usize;
    let out_max = f.n_max() / l;
    if out_max == 0 {
        return Err(Error::Truncation {
            needed: l,
            have: f.n_max(),
        });
    }
    let chi_l = cv
        .value(ell as i64)
        .ok_or_else(|| Error::Character(format!("chi({ell}) = 0")))?;
    let w = weight_exponent(ell as i64, p, cv.prec())?.scale(chi_l);
    let coeffs = (0..=out_max)
        .map(|n| {
            let mut c = f.coeff(n * l).clone();
            if n % l == 0 {
                c = c.add(&f.coeff(n / l).mul(&w));
            }
            c
        })
        .collect();
    Ok(DualSeries {
        coeffs,
        ..f.clone()
    })
}

/// `(U_p f)_n = a_{np}`.
pub fn hecke_u(p: u64, f: &DualSeries) -> Result<DualSeries> {
    let q = p as usize;
    let out_max = f.n_max() / q;
    if out_max == 0 {
        return Err(Error::Truncation {
            needed: q,
            have: f.n_max(),
        });
    }
    let coeffs = (0..=out_max).map(|n| f.coeff(n * q).clone()).collect();
    Ok(DualSeries {
        coeffs,
        ..f.clone()
    })
}

/// The first `count` primes not dividing `p N`.
pub fn default_hecke_primes(p: u64, n: u64, count: usize) -> Vec<u64> {
    (2..)
        .filter(|&l| is_prime(l) && l != p && !n.is_multiple_of(l))
        .take(count)
        .collect()
}

/// One operator's comparison `T f` against `lambda f`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenCheck {
    pub operator: String,
    pub expected: DualScalar,
    /// `(T f)_1 / a_1(f)`, the eigenvalue the data actually carries.
    pub observed: DualScalar,
    /// Worst agreement of `T f` with `expected · f`.
    pub agreement: Option<i64>,
    /// Worst agreement of `T f` with `observed · f`: is `f` an eigenvector at all.
    pub eigen_agreement: Option<i64>,
    pub compared_up_to: usize,
    pub pass: bool,
}

fn eigen_check(
    operator: String,
    f: &DualSeries,
    tf: &DualSeries,
    expected: DualScalar,
    required: i64,
) -> Result<EigenCheck> {
    let ok = |a: Option<i64>| a.is_none_or(|x| x >= required);
    let observed = tf.coeff(1).div(f.coeff(1))?;
    let agreement = tf.agreement(&f.truncated(tf.n_max()).scale(&expected))?;
    let eigen_agreement = tf.agreement(&f.truncated(tf.n_max()).scale(&observed))?;
    Ok(EigenCheck {
        operator,
        expected,
        observed,
        agreement,
        eigen_agreement,
        compared_up_to: tf.n_max(),
        pass: ok(agreement),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FEigenReport {
    pub chi_modulus: u64,
    pub p: u64,
    pub prec: u32,
    pub n_max: usize,
    pub required_precision: i64,
    pub constant_term: DualScalar,
    pub constant_term_cancels: bool,
    /// `eps = 0` specialization of `F^*` equals that of `E^*(1, chi)`.
    pub specializes_to_e1_star: bool,
    pub a1: DualScalar,
    pub hecke: Vec<EigenCheck>,
    pub u_p: EigenCheck,
    /// `L_p'(chi omega, 0)` by the Gamma-function route, independent of the family.
    pub lp_derivative: PadicNumber,
    pub l_at_zero: PadicNumber,
    /// `-L_p'/L(chi,0)`: the `eps` part of the stated `U_p` eigenvalue.
    pub u_p_epsilon_stated: PadicNumber,
    pub u_p_epsilon_observed: PadicNumber,
    pub u_p_epsilon_agreement: Option<i64>,
    /// Agreement of the observed `eps` part with `+L_p'/L(chi,0)`.
    pub u_p_epsilon_opposite_agreement: Option<i64>,
    pub g_weight_reading: String,
    pub pass: bool,
}

/// Check the mod-`eps^2` Hecke eigenvalues of `F_k^*`.
pub fn verify_f_eigen(
    chi: &DirichletCharacter,
    p: u64,
    ells: &[u64],
    n_max: usize,
    prec: u32,
) -> Result<FEigenReport> {
    let ctx = FamilyContext::new(chi, p, prec)?;
    let g = g_factor(p, n_max, prec)?;
    let f = ctx.f_star(n_max, &g.series)?;
    let required = prec as i64 - precision_loss(p, prec).delta() as i64;
    let ok = |a: Option<i64>| a.is_none_or(|x| x >= required);

    let constant_term = f.coeff(0).clone();
    let constant_term_cancels = constant_term.is_zero();
    let e_star = ctx.e_star(n_max)?;
    let specializes_to_e1_star = ok(f.value_series().agreement(&e_star.value_series())?);

    let mut hecke = Vec::new();
    for &ell in ells {
        let tf = hecke_t(ell, &f, ctx.values())?;
        let chi_l = ctx.values().value(ell as i64).cloned().unwrap_or_else(|| PadicNumber::zero(p));
        let expected = DualScalar::one(p, prec).add(&weight_exponent(ell as i64, p, prec)?.scale(&chi_l));
        hecke.push(eigen_check(format!("T_{ell}"), &f, &tf, expected, required)?);
    }

    let emb = PadicEmbedding::for_character(chi, p, prec + 10)?;
    let lp_derivative = lp_derivative_gamma(chi, p, &emb, prec)?.to_padic()?;
    let l0 = ctx.l_data().l_at_zero.clone();
    let stated = -&lp_derivative.checked_div(&l0)?;
    let expected = DualScalar::new(PadicNumber::one(p, prec), stated.clone());
    let uf = hecke_u(p, &f)?;
    let u_p = eigen_check(format!("U_{p}"), &f, &uf, expected, required)?;
    let observed = u_p.observed.derivative.clone();
    let u_p_epsilon_agreement = observed.agreement(&stated)?;
    let u_p_epsilon_opposite_agreement = observed.agreement(&-&stated)?;

    let pass = constant_term_cancels
        && specializes_to_e1_star
        && hecke.iter().all(|h| h.pass)
        && u_p.pass
        && ok(u_p_epsilon_agreement);
    Ok(FEigenReport {
        chi_modulus: chi.modulus(),
        p,
        prec,
        n_max,
        required_precision: required,
        constant_term,
        constant_term_cancels,
        specializes_to_e1_star,
        a1: f.coeff(1).clone(),
        hecke,
        u_p,
        lp_derivative,
        l_at_zero: l0,
        u_p_epsilon_stated: stated,
        u_p_epsilon_observed: observed,
        u_p_epsilon_agreement,
        u_p_epsilon_opposite_agreement,
        g_weight_reading: "G used in weight k-1 so that E_1 G has weight k".into(),
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HReport {
    pub chi_modulus: u64,
    pub p: u64,
    pub prec: u32,
    pub n_max: usize,
    pub required_precision: i64,
    pub constant_term: DualScalar,
    pub constant_term_vanishes: bool,
    pub coefficient: DualScalar,
    /// The value part of the third coefficient is 0.
    pub coefficient_value_vanishes: bool,
    /// `H^*` at `eps = 0` equals `(1 - c_0) E_1^*(1, chi)`.
    pub specialization_consistent: bool,
    pub specializes_to_e1_star: bool,
    pub l_invariant: LInvariantReport,
    pub pass: bool,
}

/// Build `H_k^*` and evaluate the nonvanishing condition that lets it be normalized.
pub fn h_star_report(chi: &DirichletCharacter, p: u64, n_max: usize, prec: u32) -> Result<HReport> {
    let ctx = FamilyContext::new(chi, p, prec)?;
    let g = g_factor(p, n_max, prec)?;
    let (h, hc) = ctx.h_star(n_max, &g.series)?;
    let c = hc.coefficient.expect("h_star fails without a coefficient");
    // the coefficient is a ratio of derivatives and carries less precision
    let required = (prec as i64 - precision_loss(p, prec).delta() as i64)
        .min(c.value.abs_prec().unwrap_or(prec as i64));
    let ok = |a: Option<i64>| a.is_none_or(|x| x >= required);
    let e1 = ctx.e_star(n_max)?.value_series();
    let one_minus_c0 = DualScalar::constant(&PadicNumber::one(p, prec) - &c.value);
    let specialization_consistent = ok(h.value_series().agreement(&e1.scale(&one_minus_c0))?);
    let specializes_to_e1_star = ok(h.value_series().agreement(&e1)?);
    let constant_term = h.coeff(0).clone();
    let constant_term_vanishes = constant_term.is_zero();
    let l_invariant = ctx.l_invariant_condition()?;
    Ok(HReport {
        chi_modulus: chi.modulus(),
        p,
        prec,
        n_max,
        required_precision: required,
        pass: constant_term_vanishes && specialization_consistent,
        constant_term,
        constant_term_vanishes,
        coefficient_value_vanishes: c.value.is_zero(),
        coefficient: c,
        specialization_consistent,
        specializes_to_e1_star,
        l_invariant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi3() -> DirichletCharacter {
        DirichletCharacter::quadratic(-3).unwrap()
    }

    fn chi4() -> DirichletCharacter {
        DirichletCharacter::quadratic(-4).unwrap()
    }

    #[test]
    fn weight_exponent_basics() {
        let one = weight_exponent(1, 7, 10).unwrap();
        assert!(one.derivative.is_zero());
        let a = weight_exponent(3, 7, 10).unwrap();
        let b = weight_exponent(5, 7, 10).unwrap();
        let ab = weight_exponent(15, 7, 10).unwrap();
        assert!(a.mul(&b).agreement(&ab).unwrap().is_none_or(|x| x >= 10));
        // 3 generates (Z/49)^*, so log_7 3 has valuation exactly one
        assert_eq!(a.derivative.valuation(), Some(1));
        assert!(weight_exponent(14, 7, 10).is_err());
    }

    #[test]
    fn dual_inverse() {
        let x = DualScalar::new(
            PadicNumber::from_int(3, 5, 10).unwrap(),
            PadicNumber::from_int(7, 5, 10).unwrap(),
        );
        let y = x.mul(&x.inverse().unwrap());
        assert!(y.agreement(&DualScalar::one(5, 10)).unwrap().is_none_or(|a| a >= 10));
        let z = DualScalar::new(PadicNumber::from_int(5, 5, 10).unwrap(), PadicNumber::one(5, 10));
        assert!(!z.is_unit());
    }

    #[test]
    fn e_star_small_coefficients() {
        let ctx = FamilyContext::new(&chi3(), 7, 8).unwrap();
        let e = ctx.e_star(20).unwrap();
        assert!(e.coeff(1).agreement(&DualScalar::one(7, 8)).unwrap().is_none_or(|a| a >= 8));
        // a_2 = 1 + chi(2)(1 + eps log 2) = -eps log 2
        assert!(e.coeff(2).value.is_zero());
        let log2 = PadicNumber::from_int(2, 7, 8).unwrap().iwasawa_log().unwrap();
        assert!(e.coeff(2).derivative.agreement(&-&log2).unwrap().is_none_or(|a| a >= 8));
        assert!(e.coeff(7).agreement(&DualScalar::one(7, 8)).unwrap().is_none_or(|a| a >= 8));
        // trivial zero: only an eps part in the constant term
        assert!(e.coeff(0).value.is_zero());
        assert!(!e.coeff(0).derivative.is_zero());
    }

    #[test]
    fn g_factor_shape() {
        let g = g_factor(7, 10, 8).unwrap();
        assert_eq!(g.series.coeff(0), &DualScalar::one(7, 8));
        for n in 1..=10 {
            assert!(g.series.coeff(n).value.is_zero());
        }
        let expect = PadicNumber::from_int(-2, 7, 8).unwrap().checked_div(&g.lambda).unwrap();
        assert!(g.series.coeff(1).derivative.agreement(&expect).unwrap().is_none_or(|a| a >= 6));
        // lambda_p = 1 - 1/p
        let classical = PadicNumber::from_rational(6, 7, 7, 8).unwrap();
        assert!(g.lambda.agreement(&classical).unwrap().unwrap() >= 5);
    }

    #[test]
    fn hecke_on_e_star() {
        let ctx = FamilyContext::new(&chi3(), 7, 8).unwrap();
        let e = ctx.e_star(40).unwrap();
        let u = hecke_u(7, &e).unwrap();
        assert_eq!(u.n_max(), 5);
        assert!(u.agreement(&e).unwrap().is_none_or(|a| a >= 8));
        let t = hecke_t(2, &e, ctx.values()).unwrap();
        let lam = DualScalar::one(7, 8).add(&weight_exponent(2, 7, 8).unwrap().scale(&PadicNumber::from_int(-1, 7, 8).unwrap()));
        assert!(t.agreement(&e.truncated(20).scale(&lam)).unwrap().is_none_or(|a| a >= 7));
        assert!(hecke_t(2, &DualSeries::zero(7, 10), ctx.values()).unwrap().is_zero());
        assert!(hecke_t(7, &e, ctx.values()).is_err());
        assert!(hecke_u(7, &e.truncated(6)).is_err());
    }

    #[test]
    fn f_star_cancels_and_specializes() {
        let r = verify_f_eigen(&chi3(), 7, &[2, 5, 11], 60, 10).unwrap();
        assert!(r.constant_term_cancels);
        assert!(r.specializes_to_e1_star);
        for h in &r.hecke {
            assert!(h.pass, "{}: {:?}", h.operator, h.agreement);
        }
        // F^* is a U_p eigenvector, with eps part +L_p'/L(chi, 0)
        assert!(r.u_p.eigen_agreement.is_none_or(|a| a >= r.required_precision));
        assert!(r.u_p_epsilon_opposite_agreement.is_none_or(|a| a >= r.required_precision));
    }

    #[test]
    fn h_star_for_quadratic_characters() {
        let r = h_star_report(&chi4(), 5, 30, 8).unwrap();
        assert!(r.constant_term_vanishes);
        assert!(r.specialization_consistent);
        // chi = chi^-1: the third coefficient is exactly 1 to first order
        let one = DualScalar::one(5, 8);
        assert!(r.coefficient.agreement(&one).unwrap().is_none_or(|a| a >= 6));
        assert!(r.l_invariant.holds);
    }

    #[test]
    fn rejects_bad_characters() {
        let chi5 = DirichletCharacter::quadratic(5).unwrap();
        assert!(FamilyContext::new(&chi5, 7, 8).is_err());
        // chi_{-3}(5) = -1: no trivial zero at 5
        let ctx = FamilyContext::new(&chi3(), 5, 8).unwrap();
        assert!(!ctx.chi_p_is_one());
        assert!(ctx.f_star(10, &g_factor(5, 10, 8).unwrap().series).is_err());
    }
}
