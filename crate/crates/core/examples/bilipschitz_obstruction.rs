//! Two carpets with equal Hausdorff, box and spectra data that intermediate dimensions separate.

use carpet_dims::{full_report, Carpet};

fn repeat(parts: &[(u64, usize)]) -> Vec<u64> {
    parts
        .iter()
        .flat_map(|&(v, r)| std::iter::repeat_n(v, r))
        .collect()
}

fn main() -> carpet_dims::Result<()> {
    let a = Carpet::new(32, 243, repeat(&[(27, 2), (3, 11), (1, 19)]))?;
    let b = Carpet::new(32, 243, repeat(&[(27, 1), (9, 6), (1, 25)]))?;
    let report = full_report(&a, &b);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    let same = full_report(
        &Carpet::new(8, 27, vec![6, 3])?,
        &Carpet::new(8, 27, vec![2, 2, 1, 1])?,
    );
    println!(
        "(8,27,[6,3]) vs (8,27,[2,2,1,1]): equal intermediate dimensions = {}",
        same.verdict_intermediate_dims
    );
    Ok(())
}
