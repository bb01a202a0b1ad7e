//! The large-deviations rate function of the column counts and its tilted minimiser.

use carpet_dims::{Carpet, RateContext};

fn main() -> carpet_dims::Result<()> {
    let c = Carpet::new(5, 9, vec![7, 2, 4, 4, 1])?;
    let r = RateContext::new(&c)?;
    println!("t in [{:.6}, {:.6})", r.t_lower(), r.t_max());
    for k in 0..=10 {
        let t = r.t_lower() + (r.domain_max() - r.t_lower()) * k as f64 / 10.0;
        let (i, d) = r.rate_and_deriv(t)?;
        println!("t = {t:.6}  I = {i:.10}  I' = {d:.10}");
    }
    let q = r.q_star(c.t_upper())?;
    println!("minimiser at t_upper: lambda = {:.6}, q = {:?}", q.lambda, q.q);
    Ok(())
}
