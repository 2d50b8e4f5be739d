//! Augmentation filtrations, theta_{S,T} and the refined congruence over Q.
use padic_stark::group_ring::{
    calibrate, calibration_instances, refined_congruence_check_over_q, theta_report,
    AbelianFieldDatum, FiniteAbelianGroup, IdealFiltration, DEFAULT_CALIBRATION,
};
use padic_stark::Result;

fn main() -> Result<()> {
    let f = IdealFiltration::new(&FiniteAbelianGroup::elementary(3, 2), 5)?;
    for n in 1..=4 {
        println!("(Z/3)^2: I^{n}/I^{} = {:?}", n + 1, f.quotient_invariants(n)?);
    }

    let d = AbelianFieldDatum::new(12, vec![], vec![2, 3], vec![5])?;
    let t = theta_report(&d)?;
    println!("theta for Q(mu_12), S = {{inf,2,3}}, T = {{5}}: {:?}", t.theta);
    println!("integral {}, interpolates {}, in I^{}: {}", t.integral, t.interpolates, t.n, t.in_i_n);

    let outcome = calibrate(&calibration_instances())?;
    println!("calibration chosen: {:?}", outcome.chosen);
    for d in calibration_instances() {
        let r = refined_congruence_check_over_q(&d, DEFAULT_CALIBRATION)?;
        println!("N = {:>2}, S = {:?}: refined congruence {}", d.modulus, d.s_fin, r.pass);
    }
    Ok(())
}
