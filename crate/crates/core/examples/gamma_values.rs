//! Morita's p-adic Gamma: factorials and the reflection formula.
use padic_stark::gamma::{reflection_index, GammaP};
use padic_stark::{PadicNumber, Result};

fn main() -> Result<()> {
    let g = GammaP::new(5, 8)?;
    for m in 1..=5 {
        println!("Gamma_5({m}) = {}", g.at_rational(m, 1)?);
    }
    let z = PadicNumber::from_rational(1, 3, 5, 10)?;
    let w = PadicNumber::from_rational(2, 3, 5, 10)?;
    let prod = &g.eval(&z)? * &g.eval(&w)?;
    println!("Gamma_5(1/3) Gamma_5(2/3) = {prod}, reflection index {}", reflection_index(&z)?);
    Ok(())
}
