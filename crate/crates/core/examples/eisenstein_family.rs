//! The weight-1 Eisenstein family at k = 1 + eps, modulo eps^2.
use padic_stark::dirichlet::enumerate_characters;
use padic_stark::eisenstein::{default_hecke_primes, h_star_report, verify_f_eigen};
use padic_stark::Result;

fn main() -> Result<()> {
    let chi = enumerate_characters(3)
        .into_iter()
        .find(|c| c.is_odd() && c.is_primitive())
        .expect("odd character mod 3");
    let p = 7;
    let r = verify_f_eigen(&chi, p, &default_hecke_primes(p, 3, 3), 60, 10)?;
    println!("constant term {} cancels: {}", r.constant_term, r.constant_term_cancels);
    for h in &r.hecke {
        println!("{}: eigen-relation holds to {:?} digits", h.operator, h.eigen_agreement);
    }
    println!("U_p eigenvector to {:?} digits", r.u_p.eigen_agreement);
    println!("eps part observed   {}", r.u_p_epsilon_observed);
    println!("-L'/L (stated)      {}", r.u_p_epsilon_stated);
    println!("agreement with -L'/L {:?}, with +L'/L {:?}", r.u_p_epsilon_agreement, r.u_p_epsilon_opposite_agreement);

    let h = h_star_report(&chi, p, 60, 10)?;
    println!("H*: L-invariant condition {}, valuation {:?}", h.l_invariant.holds, h.l_invariant.valuation);
    Ok(())
}
