//! Derivative jumps of the dimension curve at the window boundaries theta = gamma^-L.

use carpet_dims::interdim::{phase_ratio_limit, phase_transition, t_prime, t_star};
use carpet_dims::Carpet;

fn main() -> carpet_dims::Result<()> {
    let c = Carpet::new(8, 27, vec![6, 3])?;
    println!("t' = {:.10}  t* = {:.10}", t_prime(&c)?, t_star(&c)?);
    for l in 1..=12 {
        let p = phase_transition(&c, l)?;
        println!(
            "L = {l:2}  theta = {:.3e}  d- = {:.6e}  d+ = {:.6e}  ratio = {:.6}",
            p.theta, p.d_minus, p.d_plus, p.ratio
        );
    }
    println!("limiting ratio = {:.6}", phase_ratio_limit(&c)?);
    Ok(())
}
