//! Unramified Z_49 and the totally ramified extension Q_7(zeta_7).
use padic_stark::local::{EisensteinField, UnramifiedField};
use padic_stark::Result;

fn main() -> Result<()> {
    let k = UnramifiedField::new(7, 2, 6)?;
    println!("Z_49 modulus (coefficients, low first): {:?}", k.modulus());
    let g = k.residue().generator();
    let t = k.teichmuller_lift(&g)?;
    println!("Teichmuller lift of the residue generator: {:?}", t.0);
    println!("t^48 == 1: {}", k.pow(&t, 48) == k.one());

    let e = EisensteinField::new(UnramifiedField::new(7, 1, 6)?);
    let z = e.zeta_p()?;
    let z7 = e.pow(&z, 7);
    println!("zeta_7 has pi-valuation of (zeta - 1): {:?}", e.valuation(&e.sub(&z, &e.one())));
    println!("zeta_7^7 == 1: {}", e.is_zero(&e.sub(&z7, &e.one())));
    Ok(())
}
