//! Intermediate dimensions of a carpet across theta, with the window index.

use carpet_dims::interdim::curve;
use carpet_dims::Carpet;

fn main() -> carpet_dims::Result<()> {
    let c = Carpet::new(8, 27, vec![6, 3])?;
    println!(
        "dim_H = {:.10}  dim_B = {:.10}  gamma = {:.6}",
        c.dim_hausdorff(),
        c.dim_box(),
        c.gamma()
    );
    let thetas: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    for r in curve(&c, &thetas) {
        let r = r?;
        println!("theta = {:.2}  L = {:2}  dim = {:.12}", r.theta, r.l, r.s);
    }
    Ok(())
}
