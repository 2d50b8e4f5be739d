//! Field operations, log and exp in Q_7 with tracked precision.
use padic_stark::{PadicNumber, Result};

fn main() -> Result<()> {
    let third = PadicNumber::from_rational(1, 3, 7, 4)?;
    println!("1/3 in Q_7 to 4 digits: {third}");
    println!("residue mod 7^4: {}", third.to_integer_mod(4)?);

    let x = PadicNumber::from_rational(22, 5, 7, 8)?;
    let y = PadicNumber::from_rational(-14, 9, 7, 8)?;
    println!("x + y = {}", &x + &y);
    println!("x * y = {}", &x * &y);
    println!("x / y = {}  (one digit lost to v(y) = 1)", x.checked_div(&y)?);

    let log = x.iwasawa_log()?;
    println!("log_7(x) = {log}");
    println!("exp(log(8)) = {}", PadicNumber::from_int(8, 7, 8)?.iwasawa_log()?.exp()?);
    println!("Teichmuller lift of x: {}", x.teichmuller()?);
    Ok(())
}
