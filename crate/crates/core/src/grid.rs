//! Grid specifications: `start:stop:step` ranges and comma-separated lists.

use crate::error::{Error, Result};

fn number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::MalformedInput(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::MalformedInput(format!("not finite: {s:?}")))
    }
}

/// Parse `start:stop:step`, inclusive of `stop` when it lies on the lattice.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::MalformedInput(format!(
            "expected start:stop:step, got {spec:?}"
        )));
    }
    let (start, stop, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
    if step <= 0.0 || stop < start {
        return Err(Error::MalformedInput(format!(
            "need step > 0 and start <= stop in {spec:?}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(Error::MalformedInput(format!("{spec:?} has too many points")));
    }
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = spec.split(',').map(number).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::MalformedInput("empty list".into()));
    }
    Ok(v)
}

/// Points strictly inside (0, 1) and strictly increasing.
pub fn check_theta_grid(grid: &[f64]) -> Result<()> {
    if let Some(&bad) = grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::DomainError(format!("theta = {bad} outside (0, 1)")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DomainError("theta grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `points` equally spaced values strictly between `lo` and `hi`.
pub fn interior(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| lo + (hi - lo) * k as f64 / (points + 1) as f64)
        .collect()
}
