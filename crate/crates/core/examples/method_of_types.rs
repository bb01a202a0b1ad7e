//! Exact word counts by type class compared with the large-deviations prediction.

use carpet_dims::oracle::{psi_sum_auto, tail_count, type_bounds_check, Alphabet, Side};
use carpet_dims::{Carpet, RateContext};
use num_traits::ToPrimitive;

fn main() -> carpet_dims::Result<()> {
    let c = Carpet::new(3, 7, vec![5, 1, 2])?;
    let r = RateContext::new(&c)?;
    let t = 0.5 * (c.t_lower() + c.t_upper());
    println!("tail above t = {t:.4}; expected decay rate I(t) = {:.6}", r.rate(t)?);
    for j in [5, 10, 20, 30, 40] {
        let n = tail_count(&c, j, t, Side::Above, Alphabet::Columns)?;
        let rate = c.ln_big_m() - n.to_f64().unwrap().ln() / j as f64;
        println!("J = {j:2}  count = {n:>20}  ln M - (1/J) ln count = {rate:.6}");
    }
    println!("type bounds hold for M = 3, J = 25: {}", type_bounds_check(3, 25));
    let s = c.dim_box();
    for j in [4, 8, 16] {
        let res = psi_sum_auto(&c, j, s)?;
        println!(
            "J = {j:2}  ln Psi_J = {:.6}  gap to analytic target = {:?}",
            res.value, res.gap
        );
    }
    Ok(())
}
