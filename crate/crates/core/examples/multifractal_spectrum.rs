//! Fine multifractal spectrum of the uniform Bernoulli measure, via the rate function.

use carpet_dims::multifractal::{alpha_range, spectrum, step4_residual};
use carpet_dims::Carpet;

fn main() -> carpet_dims::Result<()> {
    let c = Carpet::new(8, 27, vec![6, 3])?;
    let range = alpha_range(&c);
    println!("alpha in [{:.6}, {:.6}]", range.alpha_min, range.alpha_max);
    for a in range.interior_grid(12) {
        let s = spectrum(&c, a)?;
        println!("alpha = {:.6}  f = {:.10}  xi = {:+.6}", s.alpha, s.f, s.xi_opt);
    }
    let t = 0.5 * (c.t_lower() + c.t_upper());
    println!("rate/spectrum identity residual at t = {t:.4}: {:.2e}", step4_residual(&c, t)?);
    Ok(())
}
