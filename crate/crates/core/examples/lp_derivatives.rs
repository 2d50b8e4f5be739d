//! L_p'(chi omega, 0) three ways for the odd quadratic characters mod 3 and 4.
use padic_stark::dirichlet::{
    enumerate_characters, lp_derivative_gamma, lp_derivative_jacobi, InterpolationOracle,
    PadicEmbedding,
};
use padic_stark::Result;

fn main() -> Result<()> {
    for (n, p) in [(3u64, 7u64), (4, 5), (3, 13)] {
        for chi in enumerate_characters(n).into_iter().filter(|c| c.is_odd() && c.is_primitive()) {
            let emb = PadicEmbedding::for_character(&chi, p, 20)?;
            let gamma = lp_derivative_gamma(&chi, p, &emb, 10)?;
            let jacobi = lp_derivative_jacobi(&chi, p, &emb, 10)?;
            let rich = InterpolationOracle::for_character(&chi, &emb, 16)?.richardson_derivative(3)?;
            println!("mod {n}, p = {p}");
            println!("  Gamma route         {gamma}");
            println!("  Jacobi route        {jacobi}");
            println!("  interpolation       {}", rich.extrapolated.truncate_abs(10));
        }
    }
    Ok(())
}
