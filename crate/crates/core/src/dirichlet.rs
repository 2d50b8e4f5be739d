//! Dirichlet characters with exact cyclotomic values, their p-adic images,
//! and the Kubota-Leopoldt function `L_p(chi omega, s)` near `s = 0`.
//!
//! A character of order `m` is stored by exponents: `chi(a) = zeta_m^e(a)`.
//! A [`PadicEmbedding`] sends `zeta_m` to `Teich(gamma)^((q-1)/m)` in `Z_q`
//! where `gamma` is the least generator of `F_q^*`, `q = p^f`, `f` the order
//! of p modulo m.
//!
//! Three computations of `L'_p(chi omega, 0)` live here:
//! - [`lp_derivative_gamma`]: `sum chi(a) log_p Gamma_p(a/N) + (1 - chi(p)) B_{1,chi} log_p N`,
//! - [`lp_derivative_jacobi`]: `(1/N) sum over (Z/N)^*/<p> of chi(a) log_p J(a)`,
//! - [`InterpolationOracle`]: the finite-sum formula
//!   `L_p(s, psi) = 1/(F(s-1)) sum_{a<=F, p∤a} psi(a) <a>^(1-s) sum_j C(1-s, j) (F/a)^j B_j`
//!   with `psi = chi omega`, `F = N p`, evaluated at p-adic `s` or expanded
//!   as a power series in `s`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{
    bernoulli_numbers, bernoulli_poly, big_pow, crt, factorize, gcd, kronecker, modulo,
    mult_order, primitive_root,
};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::gamma::GammaP;
use crate::gauss::GaussContext;
use crate::local::{make_unramified, UnramifiedField, ZqElem};
use crate::padic::{check_prime, legendre_factorial_val, PadicNumber};
use crate::qq::QqNumber;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Generators and orders of a cyclic decomposition of `(Z/N)^*`.
pub fn unit_group_generators(n: u64) -> Vec<(u64, u64)> {
    let fac = factorize(n);
    let moduli: Vec<u64> = fac.iter().map(|&(l, e)| l.pow(e)).collect();
    let lift = |local: u64, idx: usize| -> u64 {
        if moduli.len() == 1 {
            return local % n;
        }
        let residues: Vec<u64> = (0..moduli.len())
            .map(|j| if j == idx { local % moduli[j] } else { 1 })
            .collect();
        crt(&residues, &moduli)
    };
    let mut gens = Vec::new();
    for (idx, &(l, e)) in fac.iter().enumerate() {
        let m = moduli[idx];
        if l == 2 {
            if e == 2 {
                gens.push((lift(3, idx), 2));
            } else if e >= 3 {
                gens.push((lift(m - 1, idx), 2));
                gens.push((lift(5, idx), m / 4));
            }
        } else {
            gens.push((lift(primitive_root(l, e), idx), m / l * (l - 1)));
        }
    }
    gens
}

/// A Dirichlet character modulo `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    /// `exps[a]` for `0 <= a < N`.
    exps: Vec<Option<u64>>,
    conductor: u64,
    odd: bool,
}

impl DirichletCharacter {
    /// Build from exponents of `zeta_order`; the order is reduced to the true one.
    pub fn from_exponents(modulus: u64, order: u64, exps: Vec<Option<u64>>) -> Result<Self> {
        if exps.len() != modulus as usize {
            return Err(Error::Character("table length must equal the modulus".into()));
        }
        for a in 0..modulus {
            let unit = gcd(a as i64, modulus as i64) == 1;
            if unit != exps[a as usize].is_some() {
                return Err(Error::Character(format!("support mismatch at {a}")));
            }
        }
        let g = exps
            .iter()
            .flatten()
            .fold(order, |acc, &e| gcd(acc as i64, e as i64) as u64);
        let true_order = order / g;
        let exps: Vec<Option<u64>> = exps.into_iter().map(|e| e.map(|x| (x / g) % true_order)).collect();
        let mut chi = Self {
            modulus,
            order: true_order,
            exps,
            conductor: modulus,
            odd: false,
        };
        if !chi.is_multiplicative() {
            return Err(Error::Character("table is not multiplicative".into()));
        }
        let minus_one = chi.exps[(modulus - 1) as usize].unwrap_or(0);
        chi.odd = modulus > 2 && 2 * minus_one == true_order;
        chi.conductor = chi.compute_conductor();
        Ok(chi)
    }

    /// The character `a -> (d/a)` of conductor `|d|` for a fundamental discriminant `d`.
    pub fn quadratic(d: i64) -> Result<Self> {
        let n = d.unsigned_abs();
        let exps = (0..n)
            .map(|a| match kronecker(d, a) {
                1 => Some(0),
                -1 => Some(1),
                _ => None,
            })
            .collect::<Vec<_>>();
        // kronecker(d, 0) is 0 for |d| > 1
        Self::from_exponents(n, 2, exps)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// Exponent of `chi(a)`, `None` when `gcd(a, N) > 1`.
    pub fn exp(&self, a: i64) -> Option<u64> {
        self.exps[modulo(a, self.modulus) as usize]
    }

    pub fn value(&self, a: i64) -> CyclotomicNumber {
        match self.exp(a) {
            Some(e) => CyclotomicNumber::root_pow(self.order, e as i64),
            None => CyclotomicNumber::zero(self.order),
        }
    }

    /// `chi(a)` for a real character, as an integer.
    pub fn real_value(&self, a: i64) -> Option<i64> {
        if self.order > 2 {
            return None;
        }
        Some(match self.exp(a) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        })
    }

    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    pub fn pow(&self, k: i64) -> Self {
        let m = self.order as i64;
        let exps = self
            .exps
            .iter()
            .map(|e| e.map(|x| modulo(x as i64 * k, m as u64)))
            .collect();
        Self::from_exponents(self.modulus, self.order, exps).expect("powers of characters are characters")
    }

    /// The primitive character inducing this one, modulo its conductor.
    pub fn primitive(&self) -> Self {
        let f = self.conductor;
        let n = self.modulus;
        let exps = (0..f)
            .map(|a| {
                if gcd(a as i64, f as i64) != 1 {
                    return None;
                }
                (0..n)
                    .map(|k| a + k * f)
                    .find(|b| gcd(*b as i64, n as i64) == 1)
                    .and_then(|b| self.exp(b as i64))
            })
            .collect();
        Self::from_exponents(f, self.order, exps).expect("primitive character")
    }

    pub fn is_multiplicative(&self) -> bool {
        let n = self.modulus;
        for a in 0..n {
            for b in 0..n {
                let ab = self.exps[(a * b % n) as usize];
                let lhs = match (self.exps[a as usize], self.exps[b as usize]) {
                    (Some(x), Some(y)) => Some((x + y) % self.order),
                    _ => None,
                };
                if lhs != ab {
                    return false;
                }
            }
        }
        true
    }

    fn compute_conductor(&self) -> u64 {
        let n = self.modulus;
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| {
                (0..n).all(|a| {
                    gcd(a as i64, n as i64) != 1 || a % d != 1 % d || self.exps[a as usize] == Some(0)
                })
            })
            .unwrap_or(n)
    }

    /// `B_{1,chi} = sum_{a=1}^{N} chi(a) a / N`.
    pub fn bernoulli_b1(&self) -> CyclotomicNumber {
        let n = self.modulus as i64;
        let mut acc = CyclotomicNumber::zero(self.order);
        for a in 1..=n {
            if self.exp(a).is_some() {
                acc = acc.add(&self.value(a).scale(&rat(a, n)));
            }
        }
        acc
    }

    /// `L(chi, 0) = -B_{1,chi}` (the trivial character is excluded).
    pub fn l_at_zero(&self) -> Result<CyclotomicNumber> {
        if self.is_trivial() {
            return Err(Error::Character("L(1, 0) is not handled here".into()));
        }
        Ok(self.bernoulli_b1().neg())
    }
}

pub fn bernoulli_b1(chi: &DirichletCharacter) -> CyclotomicNumber {
    chi.bernoulli_b1()
}

/// All characters of `(Z/N)^*`, ordered by their exponent vectors on the
/// generators of [`unit_group_generators`].
pub fn enumerate_characters(n: u64) -> Vec<DirichletCharacter> {
    if n <= 2 {
        let exps = (0..n.max(1))
            .map(|a| (gcd(a as i64, n as i64) == 1).then_some(0))
            .collect();
        return vec![DirichletCharacter::from_exponents(n.max(1), 1, exps).unwrap()];
    }
    let gens = unit_group_generators(n);
    let exponent = gens.iter().fold(1u64, |acc, &(_, o)| {
        acc / gcd(acc as i64, o as i64) as u64 * o
    });
    // discrete logs of every unit in terms of the generators
    let mut logs: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let total: u64 = gens.iter().map(|g| g.1).product();
    for idx in 0..total {
        let mut rem = idx;
        let mut vec = Vec::with_capacity(gens.len());
        let mut x = 1u64;
        for &(g, o) in &gens {
            let e = rem % o;
            rem /= o;
            vec.push(e);
            x = x * crate::arith::mod_pow(g, e, n) % n;
        }
        logs.insert(x, vec);
    }
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let ks: Vec<u64> = gens
            .iter()
            .map(|&(_, o)| {
                let k = rem % o;
                rem /= o;
                k
            })
            .collect();
        let exps = (0..n)
            .map(|a| {
                logs.get(&a).map(|es| {
                    es.iter()
                        .zip(&ks)
                        .zip(&gens)
                        .map(|((e, k), (_, o))| e * k * (exponent / o))
                        .sum::<u64>()
                        % exponent
                })
            })
            .collect();
        out.push(DirichletCharacter::from_exponents(n, exponent, exps).unwrap());
    }
    out
}

/// `zeta_m -> Teich(gamma)^((q-1)/m)` in `Z_q`.
#[derive(Clone, Debug)]
pub struct PadicEmbedding {
    p: u64,
    m: u64,
    field: UnramifiedField,
    zeta: ZqElem,
    prec: u32,
}

impl PadicEmbedding {
    pub fn new(p: u64, m: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if gcd(m as i64, p as i64) != 1 {
            return Err(Error::Embedding(format!("order {m} is divisible by p = {p}")));
        }
        let f = if m <= 2 { 1 } else { mult_order(p % m, m) as u32 };
        let field = make_unramified(p, f, prec)?;
        let q = field.q();
        let gamma = field.residue().generator();
        let t = field.teichmuller_lift(&gamma)?;
        let zeta = field.pow(&t, (q - 1) / m.max(1));
        Ok(Self {
            p,
            m,
            field,
            zeta,
            prec,
        })
    }

    /// An embedding suited to `chi`.
    pub fn for_character(chi: &DirichletCharacter, p: u64, prec: u32) -> Result<Self> {
        Self::new(p, chi.order(), prec)
    }

    /// The same field with `zeta_m` sent to the image of `zeta_m^p`.
    pub fn frobenius(&self) -> Self {
        Self {
            zeta: self.field.pow(&self.zeta, self.p),
            ..self.clone()
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn f(&self) -> u32 {
        self.field.f()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn field(&self) -> &UnramifiedField {
        &self.field
    }

    pub fn root(&self, k: i64) -> ZqElem {
        self.field.pow(&self.zeta, modulo(k, self.m))
    }

    fn check(&self, chi: &DirichletCharacter) -> Result<u64> {
        if !self.m.is_multiple_of(chi.order()) {
            return Err(Error::Embedding(format!(
                "embedding of order {} cannot carry a character of order {}",
                self.m,
                chi.order()
            )));
        }
        Ok(self.m / chi.order())
    }

    /// `chi(a)` in `Z_q`.
    pub fn chi(&self, chi: &DirichletCharacter, a: i64) -> Result<Option<ZqElem>> {
        let scale = self.check(chi)?;
        Ok(chi.exp(a).map(|e| self.root((e * scale) as i64)))
    }

    pub fn embed(&self, x: &CyclotomicNumber) -> Result<QqNumber> {
        if !self.m.is_multiple_of(x.order()) {
            return Err(Error::Embedding("order mismatch".into()));
        }
        let scale = (self.m / x.order()) as i64;
        let mut acc = QqNumber::zero(self.p, self.f());
        for (i, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = QqNumber::from_zq(&self.root(scale * i as i64), self.p, self.prec);
            acc = acc.add(&z.scale_rational(c, self.prec)?);
        }
        Ok(acc)
    }

    /// `sum chi(a) x_a`, grouping terms with equal `chi(a)`.
    pub fn char_sum(
        &self,
        chi: &DirichletCharacter,
        terms: impl IntoIterator<Item = (i64, PadicNumber)>,
    ) -> Result<QqNumber> {
        let scale = self.check(chi)?;
        let mut groups: BTreeMap<u64, PadicNumber> = BTreeMap::new();
        for (a, x) in terms {
            if let Some(e) = chi.exp(a) {
                let slot = groups.entry(e).or_insert_with(|| PadicNumber::zero(self.p));
                *slot = &*slot + &x;
            }
        }
        let mut acc = QqNumber::zero(self.p, self.f());
        for (e, s) in groups {
            let z = QqNumber::from_zq(&self.root((e * scale) as i64), self.p, self.prec);
            acc = acc.add(&z.scale(&s));
        }
        Ok(acc)
    }

    /// `sum chi(a) x_a` with `Q_q`-valued terms.
    pub fn char_sum_qq(
        &self,
        chi: &DirichletCharacter,
        terms: impl IntoIterator<Item = (i64, QqNumber)>,
    ) -> Result<QqNumber> {
        let scale = self.check(chi)?;
        let mut acc = QqNumber::zero(self.p, self.f());
        for (a, x) in terms {
            if let Some(e) = chi.exp(a) {
                let z = self.root((e * scale) as i64);
                acc = acc.add(&x.mul_zq(&self.field, &z, self.prec));
            }
        }
        Ok(acc)
    }
}

fn require_lp_input(chi: &DirichletCharacter, p: u64) -> Result<()> {
    check_prime(p)?;
    if !chi.is_odd() {
        return Err(Error::Character("character must be odd".into()));
    }
    if !chi.is_primitive() {
        return Err(Error::Character("character must be primitive".into()));
    }
    if chi.modulus().is_multiple_of(p) {
        return Err(Error::Character(format!("p = {p} divides the modulus")));
    }
    Ok(())
}

/// `1 - chi(p)` as a cyclotomic number.
fn one_minus_chi_p(chi: &DirichletCharacter, p: u64) -> CyclotomicNumber {
    CyclotomicNumber::one(chi.order()).sub(&chi.value(p as i64))
}

/// `L_p(chi omega, 0) = -(1 - chi(p)) B_{1,chi}`.
pub fn lp_value_at_zero(
    chi: &DirichletCharacter,
    p: u64,
    emb: &PadicEmbedding,
    prec: u32,
) -> Result<QqNumber> {
    require_lp_input(chi, p)?;
    let v = one_minus_chi_p(chi, p).mul(&chi.bernoulli_b1()).neg();
    Ok(emb.embed(&v)?.truncate_abs(prec as i64))
}

/// Derivative at 0 by the Gamma-function formula.
pub fn lp_derivative_gamma(
    chi: &DirichletCharacter,
    p: u64,
    emb: &PadicEmbedding,
    prec: u32,
) -> Result<QqNumber> {
    require_lp_input(chi, p)?;
    let n = chi.modulus() as i64;
    let g = GammaP::new(p, prec)?;
    let mut terms = Vec::new();
    for a in 1..=n {
        if chi.exp(a).is_some() {
            terms.push((a, g.log_at_rational(a, n)?));
        }
    }
    let mut total = emb.char_sum(chi, terms)?;
    let second = one_minus_chi_p(chi, p).mul(&chi.bernoulli_b1());
    if !second.is_zero() {
        let log_n = PadicNumber::from_int(n, p, prec)?.iwasawa_log()?;
        total = total.add(&emb.embed(&second)?.scale(&log_n));
    }
    Ok(total.truncate_abs(prec as i64))
}

/// Representatives (least elements) of `(Z/N)^* / <p>`.
pub fn coset_representatives(n: u64, p: u64) -> Vec<u64> {
    let mut seen = vec![false; n as usize];
    let mut reps = Vec::new();
    for a in 1..n {
        if gcd(a as i64, n as i64) != 1 || seen[a as usize] {
            continue;
        }
        reps.push(a);
        let mut x = a;
        loop {
            seen[x as usize] = true;
            x = x * p % n;
            if x == a {
                break;
            }
        }
    }
    reps
}

/// Derivative at 0 by the Jacobi-sum coset formula (`chi(p) = 1`).
pub fn lp_derivative_jacobi(
    chi: &DirichletCharacter,
    p: u64,
    emb: &PadicEmbedding,
    prec: u32,
) -> Result<QqNumber> {
    require_lp_input(chi, p)?;
    if chi.exp(p as i64) != Some(0) {
        return Err(Error::Character("the Jacobi-sum formula needs chi(p) = 1".into()));
    }
    let n = chi.modulus();
    let f = mult_order(p % n, n) as u32;
    // J has p-adic valuation at most f (N - 1); keep that many extra digits
    let ctx = GaussContext::new(p, n, prec + f * (n as u32 - 1) + 1)?;
    let inv_n = PadicNumber::from_rational(1, n as i64, p, prec + 2)?;
    let mut terms = Vec::new();
    for a in coset_representatives(n, p) {
        let j = ctx.jacobi_sum_padic(a as i64)?;
        terms.push((a as i64, &j.iwasawa_log()? * &inv_n));
    }
    Ok(emb.char_sum(chi, terms)?.truncate_abs(prec as i64))
}

/// Truncated power series in `s` with `Q_q` coefficients.
pub type Jet = Vec<QqNumber>;

/// Finite-sum formula for `L_p(s, psi)`, `psi(a) <a>^(1-s) = c(a) exp(-s log_p a)`.
#[derive(Clone, Debug)]
pub struct InterpolationOracle {
    p: u64,
    f_mod: u64,
    f_deg: u32,
    prec: u32,
    work: u32,
    /// `(a, c(a))` for `1 <= a <= F`, `p ∤ a`.
    coeffs: Vec<(u64, QqNumber)>,
    bern: Vec<BigRational>,
    terms: usize,
}

fn bernoulli_terms(p: u64, work: u32) -> usize {
    // v((F/a)^j B_j / j!) >= j - 1 - v(j!) must exceed the working precision
    let mut j = 1u64;
    let mut last_bad = 0;
    while j < 4 * (work as u64 + 8) {
        if (j as i64) - 1 - (legendre_factorial_val(j, p) as i64) <= work as i64 + 1 {
            last_bad = j;
        }
        j += 1;
    }
    last_bad as usize + 1
}

impl InterpolationOracle {
    /// `psi = chi omega`, `F = N p`: `c(a) = chi(a) a`.
    pub fn for_character(chi: &DirichletCharacter, emb: &PadicEmbedding, prec: u32) -> Result<Self> {
        let p = emb.p();
        require_lp_input(chi, p)?;
        let f_mod = chi.modulus() * p;
        let work = prec + 6;
        let mut coeffs = Vec::new();
        for a in 1..=f_mod {
            if a % p == 0 {
                continue;
            }
            if let Some(z) = emb.chi(chi, a as i64)? {
                let c = QqNumber::from_zq(&z, p, work + 4)
                    .scale(&PadicNumber::from_int(a as i64, p, work + 4)?);
                coeffs.push((a, c));
            }
        }
        Ok(Self::build(p, f_mod, emb.f(), prec, work, coeffs))
    }

    /// `psi = 1`, `F = p`: the p-adic zeta function, `c(a) = <a>`.
    pub fn zeta(p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        let work = prec + 6;
        let mut coeffs = Vec::new();
        for a in 1..p {
            let x = PadicNumber::from_int(a as i64, p, work + 4)?;
            let bracket = x.checked_div(&x.teichmuller()?)?;
            coeffs.push((a, QqNumber::from_padic(bracket, 1)));
        }
        Ok(Self::build(p, p, 1, prec, work, coeffs))
    }

    fn build(p: u64, f_mod: u64, f_deg: u32, prec: u32, work: u32, coeffs: Vec<(u64, QqNumber)>) -> Self {
        let terms = bernoulli_terms(p, work + 4);
        Self {
            p,
            f_mod,
            f_deg,
            prec,
            work,
            coeffs,
            bern: bernoulli_numbers(terms),
            terms,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn padic(&self, r: &BigRational, prec: u32) -> Result<PadicNumber> {
        PadicNumber::from_ratio(r, self.p, prec)
    }

    /// `sum_j C(1-s, j) (F/a)^j B_j` for `s` represented by the integer `s_int`.
    fn bernoulli_sum(&self, a: u64, s_int: &BigInt) -> Result<PadicNumber> {
        let ratio = rat(self.f_mod as i64, a as i64);
        let top = BigInt::one() - s_int;
        let mut acc = BigRational::zero();
        let mut binom = BigRational::one();
        let mut pow = BigRational::one();
        for j in 0..=self.terms {
            if j > 0 {
                binom = binom * BigRational::from_integer(&top - BigInt::from(j - 1))
                    / BigRational::from_integer(BigInt::from(j));
                pow *= &ratio;
            }
            if !self.bern[j].is_zero() {
                acc += &binom * &pow * &self.bern[j];
            }
        }
        self.padic(&acc, self.work + 6)
    }

    /// `L_p(s, psi)` for `s` in `Z_p`, `s != 1`.
    pub fn value(&self, s: &PadicNumber) -> Result<QqNumber> {
        let guard = self.work + 8;
        let s_abs = s.abs_prec().map_or(guard, |a| a.clamp(0, guard as i64) as u32);
        let s_int = if s.is_zero() {
            BigInt::zero()
        } else {
            s.to_integer_mod(s_abs)?
        };
        let s_p = PadicNumber::from_residue(s_int.clone(), self.p, s_abs);
        let mut total = QqNumber::zero(self.p, self.f_deg);
        for (a, c) in &self.coeffs {
            let log_a = PadicNumber::from_int(*a as i64, self.p, guard)?.iwasawa_log()?;
            let e = if s_p.is_zero() || log_a.is_zero() {
                PadicNumber::one(self.p, guard)
            } else {
                (&(-&s_p) * &log_a).exp()?
            };
            let b = self.bernoulli_sum(*a, &s_int)?;
            total = total.add(&c.scale(&(&e * &b)));
        }
        let one = PadicNumber::one(self.p, guard);
        let denom = (&s_p - &one).mul_int(&BigInt::from(self.f_mod));
        let out = total.scale(&denom.inverse()?);
        Ok(out.truncate_abs(self.prec as i64))
    }

    /// Taylor coefficients of `L_p(s, psi)` at `s = 0`, orders `0..k`.
    pub fn jet(&self, k: usize) -> Result<Jet> {
        let p = self.p;
        let w = self.work + 8;
        let mut total: Vec<QqNumber> = vec![QqNumber::zero(p, self.f_deg); k];
        for (a, c) in &self.coeffs {
            let log_a = PadicNumber::from_int(*a as i64, p, w)?.iwasawa_log()?;
            // exp(-s log a)
            let mut e_ser = Vec::with_capacity(k);
            let mut term = PadicNumber::one(p, w);
            for n in 0..k {
                if n > 0 {
                    term = (&term * &(-&log_a)).checked_div(&PadicNumber::from_int(n as i64, p, w)?)?;
                }
                e_ser.push(term.clone());
            }
            // sum_j C(1-s, j) (F/a)^j B_j as a polynomial in s
            let ratio = rat(self.f_mod as i64, *a as i64);
            let mut acc = vec![BigRational::zero(); k];
            let mut binom = vec![BigRational::zero(); k];
            binom[0] = BigRational::one();
            let mut pow = BigRational::one();
            for j in 0..=self.terms {
                if j > 0 {
                    // binom *= (1 - (j-1) - s) / j
                    let c0 = rat(2 - j as i64, j as i64);
                    let c1 = rat(-1, j as i64);
                    let mut next = vec![BigRational::zero(); k];
                    for i in 0..k {
                        next[i] += &binom[i] * &c0;
                        if i + 1 < k {
                            next[i + 1] += &binom[i] * &c1;
                        }
                    }
                    binom = next;
                    pow *= &ratio;
                }
                if !self.bern[j].is_zero() {
                    for i in 0..k {
                        acc[i] += &binom[i] * &pow * &self.bern[j];
                    }
                }
            }
            let b_ser: Vec<PadicNumber> = acc
                .iter()
                .map(|r| self.padic(r, w))
                .collect::<Result<_>>()?;
            for n in 0..k {
                let mut coef = PadicNumber::zero(p);
                for i in 0..=n {
                    coef = &coef + &(&e_ser[i] * &b_ser[n - i]);
                }
                total[n] = total[n].add(&c.scale(&coef));
            }
        }
        // multiply by 1/(F (s - 1)) = -(1/F) sum s^n
        let inv_f = PadicNumber::from_rational(-1, self.f_mod as i64, p, w)?;
        let mut out = Vec::with_capacity(k);
        for n in 0..k {
            let mut acc = QqNumber::zero(p, self.f_deg);
            for t in total.iter().take(n + 1) {
                acc = acc.add(t);
            }
            out.push(acc.scale(&inv_f).truncate_abs(self.prec as i64));
        }
        Ok(out)
    }

    /// `(L(h) - L(0)) / h`.
    pub fn difference_quotient(&self, h: &PadicNumber) -> Result<QqNumber> {
        let l0 = self.value(&PadicNumber::zero(self.p))?;
        let lh = self.value(h)?;
        Ok(lh.sub(&l0).scale(&h.inverse()?))
    }

    /// Richardson combination of the quotients at `h = p^k` and `p^(k+1)`:
    /// `(p Q(p^k) - Q(p^(k+1))) / (p - 1)` removes the linear error term.
    pub fn richardson_derivative(&self, k: u32) -> Result<RichardsonReport> {
        let p = self.p;
        let h1 = PadicNumber::from_residue(big_pow(p, k), p, self.work + 10);
        let h2 = PadicNumber::from_residue(big_pow(p, k + 1), p, self.work + 10);
        let q1 = self.difference_quotient(&h1)?;
        let q2 = self.difference_quotient(&h2)?;
        let pp = PadicNumber::from_int(p as i64, p, self.work)?;
        let inv = PadicNumber::from_rational(1, p as i64 - 1, p, self.work)?;
        let r = q1.scale(&pp).sub(&q2).scale(&inv);
        let step_agreement = q1.agreement(&q2)?;
        Ok(RichardsonReport {
            q_small: q1,
            q_large: q2,
            extrapolated: r,
            step_agreement,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RichardsonReport {
    pub q_small: QqNumber,
    pub q_large: QqNumber,
    pub extrapolated: QqNumber,
    pub step_agreement: Option<i64>,
}

/// `L_p(chi omega, s)` through the finite-sum oracle.
pub fn lp_interpolation_oracle(
    chi: &DirichletCharacter,
    p: u64,
    s: &PadicNumber,
    prec: u32,
) -> Result<QqNumber> {
    let emb = PadicEmbedding::for_character(chi, p, prec + 10)?;
    InterpolationOracle::for_character(chi, &emb, prec)?.value(s)
}

/// `-(1 - phi(p) p^(k-1)) B_{k,phi} / k` with `phi = chi omega^(1-k)`: the
/// value `L_p(chi omega, 1 - k)` predicted by interpolation.
pub fn classical_value(
    chi: &DirichletCharacter,
    emb: &PadicEmbedding,
    k: u32,
    prec: u32,
) -> Result<QqNumber> {
    let p = emb.p();
    require_lp_input(chi, p)?;
    let n = chi.modulus();
    let work = prec + 4 + k;
    let omega_trivial = (k as u64 - 1).is_multiple_of(p - 1);
    let bern = bernoulli_numbers(k as usize);
    let (f_mod, euler) = if omega_trivial {
        (n, true)
    } else {
        (n * p, false)
    };
    let fk1 = BigRational::from_integer(BigInt::from(f_mod).pow(k - 1));
    let mut terms = Vec::new();
    for a in 1..=f_mod {
        if chi.exp(a as i64).is_none() {
            continue;
        }
        let bk = bernoulli_poly(k as usize, &rat(a as i64, f_mod as i64), &bern) * &fk1;
        let mut x = PadicNumber::from_ratio(&bk, p, work)?;
        if !omega_trivial {
            if a % p == 0 {
                continue;
            }
            let w = PadicNumber::from_int(a as i64, p, work)?.teichmuller()?;
            x = &x * &w.pow(1 - k as i64)?;
        }
        terms.push((a as i64, x));
    }
    let bk_phi = emb.char_sum(chi, terms)?;
    let mut factor = QqNumber::from_padic(PadicNumber::one(p, work), emb.f());
    if euler {
        let pk = PadicNumber::from_residue(big_pow(p, k - 1), p, work + k);
        if let Some(z) = emb.chi(chi, p as i64)? {
            let chip = QqNumber::from_zq(&z, p, work);
            factor = factor.sub(&chip.scale(&pk));
        }
    }
    let inv_k = PadicNumber::from_rational(-1, k as i64, p, work)?;
    Ok(factor
        .mul(emb.field(), &bk_phi)
        .scale(&inv_k)
        .truncate_abs(prec as i64))
}

/// Residue of `zeta_p` at `s = 1`, from `eps * zeta_p(1 + eps)` at
/// `eps = p^k` and `p^(k+1)` with a Richardson step.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaResidue {
    pub at_small: PadicNumber,
    pub at_large: PadicNumber,
    pub extrapolated: PadicNumber,
    pub step_agreement: Option<i64>,
}

pub fn zeta_p_residue(p: u64, prec: u32, k: u32) -> Result<ZetaResidue> {
    let oracle = InterpolationOracle::zeta(p, prec + k + 4)?;
    let eval = |e: u32| -> Result<PadicNumber> {
        let eps = PadicNumber::from_residue(big_pow(p, e), p, prec + 2 * k + 12);
        let s = &PadicNumber::one(p, prec + 2 * k + 12) + &eps;
        Ok(&oracle.value(&s)?.to_padic()? * &eps)
    };
    let r1 = eval(k)?;
    let r2 = eval(k + 1)?;
    let pp = PadicNumber::from_int(p as i64, p, prec + 4)?;
    let inv = PadicNumber::from_rational(1, p as i64 - 1, p, prec + 4)?;
    let extrapolated = (&(&pp * &r1) - &r2).checked_mul(&inv)?;
    let step_agreement = r1.agreement(&r2)?;
    Ok(ZetaResidue {
        at_small: r1,
        at_large: r2,
        extrapolated: extrapolated.truncate_abs(prec as i64),
        step_agreement,
    })
}

/// Whether `x` is the rational `r` to the precision of `x`.
pub fn qq_matches_rational(x: &QqNumber, r: &BigRational) -> Result<Option<i64>> {
    let y = QqNumber::from_padic(PadicNumber::from_ratio(r, x.p(), 64)?, x.coords.len() as u32);
    x.agreement(&y)
}

/// Sign helper for reports: `+1`, `-1` or `0` of a rational.
pub fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::precision_loss;

    fn quad(n: u64) -> DirichletCharacter {
        enumerate_characters(n)
            .into_iter()
            .find(|c| c.order() == 2 && c.is_odd())
            .unwrap()
    }

    #[test]
    fn character_counts_and_parity() {
        assert_eq!(enumerate_characters(3).len(), 2);
        assert_eq!(enumerate_characters(4).len(), 2);
        let c5 = enumerate_characters(5);
        assert_eq!(c5.len(), 4);
        let odd: Vec<_> = c5.iter().filter(|c| c.is_odd()).collect();
        assert_eq!(odd.len(), 2);
        assert!(odd.iter().all(|c| c.order() == 4));
        assert_eq!(enumerate_characters(8).len(), 4);
        assert_eq!(enumerate_characters(15).len(), 8);
        for n in [3u64, 4, 5, 7, 8, 12, 15, 16] {
            for c in enumerate_characters(n) {
                assert!(c.is_multiplicative());
            }
        }
    }

    #[test]
    fn brute_force_homomorphism_count() {
        // count maps (Z/N)^* -> mu_m that are homomorphisms by brute force for N = 5
        let n = 5u64;
        let units: Vec<u64> = (1..n).collect();
        let mut count = 0;
        for img in 0..4u64 {
            // determined by image of 2 (a generator)
            let mut ok = true;
            let mut table = BTreeMap::new();
            let mut x = 1u64;
            for e in 0..4u64 {
                table.insert(x, e * img % 4);
                x = x * 2 % n;
            }
            for &a in &units {
                for &b in &units {
                    if (table[&a] + table[&b]) % 4 != table[&(a * b % n)] {
                        ok = false;
                    }
                }
            }
            if ok {
                count += 1;
            }
        }
        assert_eq!(count, enumerate_characters(5).len());
    }

    #[test]
    fn b1_values() {
        let c3 = quad(3);
        assert_eq!(c3.real_value(2), Some(-1));
        assert_eq!(c3.bernoulli_b1().as_rational(), Some(rat(-1, 3)));
        let c4 = quad(4);
        assert_eq!(c4.real_value(3), Some(-1));
        assert_eq!(c4.bernoulli_b1().as_rational(), Some(rat(-1, 2)));
        for n in [5u64, 7, 8, 12] {
            for c in enumerate_characters(n) {
                let b = c.bernoulli_b1();
                if c.is_trivial() {
                    continue;
                }
                assert_eq!(b.is_zero(), !c.is_odd(), "N={n}");
            }
        }
    }

    #[test]
    fn primitive_of_imprimitive() {
        for chi in enumerate_characters(12) {
            let p = chi.primitive();
            assert_eq!(p.modulus(), chi.conductor());
            assert!(p.is_primitive());
            for a in 1..12i64 {
                if chi.exp(a).is_some() {
                    assert_eq!(p.exp(a), chi.exp(a));
                }
            }
        }
    }

    #[test]
    fn conductors() {
        let c12 = enumerate_characters(12);
        let conds: Vec<u64> = c12.iter().map(|c| c.conductor()).collect();
        assert_eq!(conds.iter().filter(|&&d| d == 12).count(), 1);
        assert!(conds.contains(&3) && conds.contains(&4) && conds.contains(&1));
        assert_eq!(DirichletCharacter::quadratic(-23).unwrap().conductor(), 23);
        assert_eq!(DirichletCharacter::quadratic(-8).unwrap().conductor(), 8);
    }

    #[test]
    fn value_at_zero() {
        let c3 = quad(3);
        let emb = PadicEmbedding::for_character(&c3, 7, 12).unwrap();
        assert!(lp_value_at_zero(&c3, 7, &emb, 10).unwrap().is_zero());
        let emb5 = PadicEmbedding::for_character(&c3, 5, 12).unwrap();
        let v = lp_value_at_zero(&c3, 5, &emb5, 10).unwrap();
        assert!(qq_matches_rational(&v, &rat(2, 3)).unwrap().unwrap() >= 10);
        let c4 = quad(4);
        let emb = PadicEmbedding::for_character(&c4, 5, 12).unwrap();
        assert!(lp_value_at_zero(&c4, 5, &emb, 10).unwrap().is_zero());
    }

    #[test]
    fn oracle_value_at_zero_matches() {
        for (n, p) in [(3u64, 5u64), (3, 7), (4, 7), (5, 7)] {
            for chi in enumerate_characters(n).into_iter().filter(|c| c.is_odd()) {
                let emb = PadicEmbedding::for_character(&chi, p, 20).unwrap();
                let o = InterpolationOracle::for_character(&chi, &emb, 10).unwrap();
                let v = o.value(&PadicNumber::zero(p)).unwrap();
                let w = lp_value_at_zero(&chi, p, &emb, 10).unwrap();
                assert!(v.agreement(&w).unwrap().unwrap_or(99) >= 10, "N={n} p={p}");
                let jet = o.jet(2).unwrap();
                assert!(jet[0].agreement(&w).unwrap().unwrap_or(99) >= 10);
            }
        }
    }

    #[test]
    fn gamma_route_matches_jet_and_richardson() {
        for (n, p) in [(3u64, 7u64), (4, 5), (3, 5)] {
            let chi = quad(n);
            let m = 10;
            let emb = PadicEmbedding::for_character(&chi, p, m + 10).unwrap();
            let dg = lp_derivative_gamma(&chi, p, &emb, m).unwrap();
            let o = InterpolationOracle::for_character(&chi, &emb, m + 6).unwrap();
            let jet = o.jet(2).unwrap();
            let delta = precision_loss(p, m).delta() as i64;
            let agree = dg.agreement(&jet[1]).unwrap().unwrap_or(99);
            assert!(agree >= m as i64 - delta, "jet N={n} p={p}: {agree}");
            let r = o.richardson_derivative(3).unwrap();
            let agree = dg.agreement(&r.extrapolated).unwrap().unwrap_or(99);
            assert!(agree >= m as i64 - delta, "richardson N={n} p={p}: {agree}");
        }
    }

    #[test]
    fn jacobi_route_matches_gamma_route() {
        for (n, p) in [(3u64, 7u64), (4, 5), (3, 13), (4, 13)] {
            let chi = quad(n);
            let emb = PadicEmbedding::for_character(&chi, p, 20).unwrap();
            let dg = lp_derivative_gamma(&chi, p, &emb, 10).unwrap();
            let dj = lp_derivative_jacobi(&chi, p, &emb, 10).unwrap();
            let delta = precision_loss(p, 10).delta() as i64;
            assert!(dg.agreement(&dj).unwrap().unwrap_or(99) >= 10 - delta, "N={n} p={p}");
        }
    }

    #[test]
    fn jacobi_route_higher_order_character() {
        // chi mod 5 of order 4 with p = 11 (chi(11) = 1)
        for chi in enumerate_characters(5).into_iter().filter(|c| c.is_odd()) {
            let emb = PadicEmbedding::for_character(&chi, 11, 16).unwrap();
            let dg = lp_derivative_gamma(&chi, 11, &emb, 8).unwrap();
            let dj = lp_derivative_jacobi(&chi, 11, &emb, 8).unwrap();
            assert!(dg.agreement(&dj).unwrap().unwrap_or(99) >= 7);
        }
    }

    #[test]
    fn embedding_frobenius_permutes_orbit() {
        // p = 3 is inert in Q(i): zeta_4 lands in Z_9
        let chars: Vec<_> = enumerate_characters(5).into_iter().filter(|c| c.is_odd()).collect();
        let emb = PadicEmbedding::new(3, 4, 12).unwrap();
        let frob = emb.frobenius();
        for chi in &chars {
            let a = lp_derivative_gamma(chi, 3, &frob, 8).unwrap();
            let b = lp_derivative_gamma(&chi.pow(3), 3, &emb, 8).unwrap();
            assert!(a.agreement(&b).unwrap().unwrap_or(99) >= 8);
        }
    }

    #[test]
    fn oracle_matches_classical_values() {
        for (n, p) in [(3u64, 5u64), (4, 7), (3, 7)] {
            let chi = quad(n);
            let emb = PadicEmbedding::for_character(&chi, p, 24).unwrap();
            let o = InterpolationOracle::for_character(&chi, &emb, 8).unwrap();
            for k in [3u32, 5] {
                let s = PadicNumber::from_int(1 - k as i64, p, 30).unwrap();
                let lhs = o.value(&s).unwrap();
                let rhs = classical_value(&chi, &emb, k, 8).unwrap();
                let agree = lhs.agreement(&rhs).unwrap().unwrap_or(99);
                assert!(agree >= 7, "N={n} p={p} k={k}: {agree}");
            }
        }
    }

    #[test]
    fn zeta_residue_is_one_minus_inverse_p() {
        for p in [5u64, 7] {
            let r = zeta_p_residue(p, 8, 3).unwrap();
            let target = PadicNumber::from_rational(p as i64 - 1, p as i64, p, 20).unwrap();
            let agree = r.extrapolated.agreement(&target).unwrap().unwrap_or(99);
            assert!(agree >= 6, "p={p}: {agree}");
        }
    }
}
