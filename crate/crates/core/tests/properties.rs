use num_bigint::BigInt;
use proptest::prelude::*;

use padic_stark::dirichlet::enumerate_characters;
use padic_stark::eisenstein::{hecke_t, DualScalar, FamilyContext};
use padic_stark::gamma::GammaP;
use padic_stark::gauss::{stickelberger_data, GaussSumInstance};
use padic_stark::group_ring::{FiniteAbelianGroup, IdealFiltration};
use padic_stark::local::UnramifiedField;
use padic_stark::quadratic::{dirichlet_check, is_fundamental};
use padic_stark::PadicNumber;

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

fn unit_rational(p: u64) -> impl Strategy<Value = (i64, i64)> {
    (1i64..5000, 1i64..500).prop_filter("unit", move |(a, b)| a % p as i64 != 0 && b % p as i64 != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_times_denominator_is_numerator(p in prime(), a in -5000i64..5000, b in 1i64..500, prec in 1u32..12) {
        prop_assume!(b % p as i64 != 0);
        let x = PadicNumber::from_rational(a, b, p, prec).unwrap();
        let back = &x * &PadicNumber::from_int(b, p, prec).unwrap();
        prop_assert_eq!(back, PadicNumber::from_int(a, p, prec).unwrap().truncate_abs(x.abs_prec().unwrap()));
    }

    #[test]
    fn ring_laws(p in prime(), a in -999i64..999, b in -999i64..999, c in -999i64..999) {
        let f = |n| PadicNumber::from_int(n, p, 9).unwrap();
        let (x, y, z) = (f(a), f(b), f(c));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        let lhs = &x * &(&y + &z);
        let rhs = &(&x * &y) + &(&x * &z);
        prop_assert!(lhs.agreement(&rhs).unwrap().is_none_or(|k| k >= 9));
    }

    #[test]
    fn log_is_a_homomorphism((p, (a, b), (c, d)) in prime().prop_flat_map(|p| (Just(p), unit_rational(p), unit_rational(p)))) {
        let prec = 8;
        let x = PadicNumber::from_rational(a, b, p, prec).unwrap();
        let y = PadicNumber::from_rational(c, d, p, prec).unwrap();
        let lhs = (&x * &y).iwasawa_log().unwrap();
        let rhs = &x.iwasawa_log().unwrap() + &y.iwasawa_log().unwrap();
        prop_assert!(lhs.agreement(&rhs).unwrap().is_none_or(|k| k >= prec as i64));
    }

    #[test]
    fn exp_inverts_log_near_one(p in prime(), t in -400i64..400) {
        let prec = 8;
        let x = PadicNumber::from_int(1 + p as i64 * t, p, prec).unwrap();
        let back = x.iwasawa_log().unwrap().exp().unwrap();
        prop_assert!(back.agreement(&x).unwrap().is_none_or(|k| k >= prec as i64 - 1));
    }

    #[test]
    fn truncation_is_idempotent(p in prime(), a in -9999i64..9999, k in 0i64..8) {
        let x = PadicNumber::from_int(a, p, 10).unwrap();
        let t = x.truncate_abs(k);
        prop_assert_eq!(t.truncate_abs(k), t.clone());
        prop_assert!(t.agreement(&x).unwrap().is_none_or(|m| m >= k));
    }

    #[test]
    fn gamma_functional_equation(p in prime(), a in -3000i64..3000) {
        let prec = 7;
        let g = GammaP::new(p, prec).unwrap();
        let digits = prec + 3;
        let x = PadicNumber::from_int(a, p, digits).unwrap();
        let next = g.eval(&(&x + &PadicNumber::one(p, digits))).unwrap();
        let cur = g.eval(&x).unwrap();
        let expect = if a.rem_euclid(p as i64) == 0 { -&cur } else { -&(&x * &cur) };
        prop_assert!(next.agreement(&expect).unwrap().is_none_or(|k| k >= prec as i64));
    }

    #[test]
    fn teichmuller_lifts_are_roots_of_unity_and_multiplicative(i in 0usize..4, r1 in 1u64..1000, r2 in 1u64..1000) {
        let (p, f) = [(5u64, 2u32), (7, 2), (3, 3), (11, 1)][i];
        let k = UnramifiedField::new(p, f, 6).unwrap();
        let q = k.q();
        let a = k.residue().from_index(1 + r1 % (q - 1));
        let b = k.residue().from_index(1 + r2 % (q - 1));
        let ta = k.teichmuller_lift(&a).unwrap();
        let tb = k.teichmuller_lift(&b).unwrap();
        prop_assert_eq!(k.pow(&ta, q - 1), k.one());
        let tab = k.teichmuller_lift(&k.residue().mul(&a, &b)).unwrap();
        prop_assert_eq!(k.mul(&ta, &tb), tab);
    }

    #[test]
    fn stickelberger_digit_identity(p in prime(), n in 2u64..14, a in 1i64..14) {
        prop_assume!(n % p != 0 && !(a as u64).is_multiple_of(n));
        let inst = GaussSumInstance::new(p, n, a, 6).unwrap();
        prop_assume!(inst.f <= 4);
        let d = stickelberger_data(&inst);
        prop_assert!(d.exponent_check);
        prop_assert_eq!(d.digit_sum, d.digits.iter().sum::<u64>());
    }

    #[test]
    fn characters_are_multiplicative(n in 3u64..40) {
        for chi in enumerate_characters(n) {
            prop_assert!(chi.is_multiplicative());
            prop_assert_eq!(chi.primitive().conductor(), chi.conductor());
        }
    }

    #[test]
    fn class_number_formula(d in 3i64..3000) {
        prop_assume!(is_fundamental(-d));
        prop_assert!(dirichlet_check(-d).unwrap().pass);
    }

    #[test]
    fn cyclic_filtration_quotients(m in 2u64..10, n in 1usize..5) {
        let f = IdealFiltration::new(&FiniteAbelianGroup::cyclic(m), n + 1).unwrap();
        prop_assert_eq!(f.quotient_invariants(n).unwrap(), vec![m]);
    }

    #[test]
    fn dual_numbers_form_a_ring(p in prime(), a in -99i64..99, b in -99i64..99, c in -99i64..99, d in -99i64..99) {
        let f = |n| PadicNumber::from_int(n, p, 8).unwrap();
        let x = DualScalar::new(f(a), f(b));
        let y = DualScalar::new(f(c), f(d));
        let xy = x.mul(&y);
        prop_assert_eq!(xy.specialize(), &f(a) * &f(c));
        prop_assert_eq!(xy.derivative.clone(), &(&f(a) * &f(d)) + &(&f(b) * &f(c)));
        prop_assert!(xy.agreement(&y.mul(&x)).unwrap().is_none_or(|k| k >= 8));
    }
}

fn family(n: u64, p: u64) -> FamilyContext {
    let chi = enumerate_characters(n)
        .into_iter()
        .find(|c| c.is_odd() && c.is_primitive())
        .unwrap();
    FamilyContext::new(&chi, p, 8).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hecke_operators_commute(i in 0usize..3, j in 0usize..3) {
        let ctx = family(3, 7);
        let ells = [2u64, 5, 11];
        let f = ctx.e_star(300).unwrap();
        let cv = ctx.values();
        let ab = hecke_t(ells[j], &hecke_t(ells[i], &f, cv).unwrap(), cv).unwrap();
        let ba = hecke_t(ells[i], &hecke_t(ells[j], &f, cv).unwrap(), cv).unwrap();
        prop_assert!(ab.agreement(&ba).unwrap().is_none_or(|k| k >= 8));
    }

    #[test]
    fn specialization_commutes_with_hecke(i in 0usize..3) {
        let ctx = family(4, 5);
        let ell = [3u64, 7, 11][i];
        let f = ctx.e_star(200).unwrap();
        let cv = ctx.values();
        let lhs = hecke_t(ell, &f, cv).unwrap().specialize();
        let rhs = hecke_t(ell, &f.value_series(), cv).unwrap().specialize();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn residues_of_big_integers_round_trip() {
    let m = BigInt::from(7).pow(6);
    let x = PadicNumber::from_residue(BigInt::from(123_456), 7, 6);
    assert_eq!(x.to_integer_mod(6).unwrap(), BigInt::from(123_456) % m);
}
