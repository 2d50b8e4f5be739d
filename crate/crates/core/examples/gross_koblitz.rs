//! Gauss sums over F_q against products of Gamma_p values, with their valuations.
use padic_stark::gauss::{stickelberger_data, GaussContext, GaussSumInstance, DEFAULT_MATRIX};
use padic_stark::Result;

fn main() -> Result<()> {
    for (p, n) in DEFAULT_MATRIX {
        let ctx = GaussContext::new(p, n, 8)?;
        for a in 1..n as i64 {
            let inst = GaussSumInstance::new(p, n, a, 8)?;
            let r = ctx.gross_koblitz(&inst)?;
            let s = stickelberger_data(&inst);
            println!(
                "p={p} N={n} a={a} q={:>2}: agree to {} digits, v(g) = {} = sum of digits {:?}",
                inst.q(),
                r.agreement_precision,
                r.gauss_valuation,
                s.digits
            );
        }
    }
    Ok(())
}
