//! Rank-one Gross-Stark: L_p' against (4/w) log_p of a p-unit.
use padic_stark::quadratic::{dirichlet_check, verify_rank_one};
use padic_stark::Result;

fn main() -> Result<()> {
    for d in [-3, -4, -7, -23, -163] {
        let c = dirichlet_check(d)?;
        println!("d = {d}: h = {}, w = {}, -B1 = {}", c.h, c.w, c.minus_b1);
    }
    for (d, p) in [(-3, 7), (-4, 5), (-7, 11), (-23, 3)] {
        let r = verify_rank_one(d, p, 10)?;
        println!(
            "d = {d}, p = {p}: alpha = {:?} of norm {}, L' and (4/w) log agree to {} digits",
            r.generator.alpha, r.generator.norm, r.agreement_precision
        );
    }
    Ok(())
}
