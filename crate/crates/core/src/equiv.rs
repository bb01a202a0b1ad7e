//! Equivalence conditions between two carpets, grid reconciliation and
//! Hölder-distortion bounds.

use num_bigint::BigUint;
use serde::Serialize;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::interdim::{curve, DimResult};
use crate::multifractal::{alpha_range, spectrum};
use crate::rate::RateContext;

pub const MAX_EXPONENT: u32 = 16;
pub const RATE_TOL: f64 = 1e-9;
pub const SPECTRUM_TOL: f64 = 1e-9;
pub const DIM_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-12;
const DEFAULT_SAMPLES: usize = 50;
const DEFAULT_GRID_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridRelation {
    SameGrid,
    /// m_a^q = m_b^p and n_a^q = n_b^p; a was iterated q times and b p times.
    MultiplicativelyDependent { p: u32, q: u32 },
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateShiftCheck {
    pub ok: bool,
    pub shift: f64,
    pub max_residual: f64,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterdimCheck {
    pub equal: bool,
    pub max_gap: f64,
    pub argmax_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderBound {
    pub theta_best: f64,
    pub alpha_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub grid_relation: GridRelation,
    pub gamma_equal: bool,
    pub condition5: bool,
    pub rate_shift_ok: bool,
    pub interdim_equal: bool,
    pub spectra_equal: bool,
    pub verdict_intermediate_dims: bool,
    pub bilipschitz_obstruction: bool,
    pub holder: Option<HolderBound>,
    pub warnings: Vec<String>,
}

fn same_grid(a: &Carpet, b: &Carpet) -> bool {
    a.m() == b.m() && a.n() == b.n()
}

fn require_same_grid(a: &Carpet, b: &Carpet) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{}",
            a.m(),
            a.n(),
            b.m(),
            b.n()
        )))
    }
}

/// Smallest (p, q) with m_a^q = m_b^p and n_a^q = n_b^p, both at most 16.
pub fn dependence_exponents(a: &Carpet, b: &Carpet) -> Option<(u32, u32)> {
    let pow = |x: u64, e: u32| BigUint::from(x).pow(e);
    for q in 1..=MAX_EXPONENT {
        for p in 1..=MAX_EXPONENT {
            if pow(a.m(), q) == pow(b.m(), p) && pow(a.n(), q) == pow(b.n(), p) {
                return Some((p, q));
            }
        }
    }
    None
}

/// Bring two carpets onto a common grid by iterating them, when possible.
pub fn reconcile_grids(a: &Carpet, b: &Carpet) -> Result<(Carpet, Carpet, GridRelation)> {
    if same_grid(a, b) {
        return Ok((a.clone(), b.clone(), GridRelation::SameGrid));
    }
    match dependence_exponents(a, b) {
        Some((p, q)) => Ok((
            a.iterate(q)?,
            b.iterate(p)?,
            GridRelation::MultiplicativelyDependent { p, q },
        )),
        None => Ok((a.clone(), b.clone(), GridRelation::Incomparable)),
    }
}

/// M0 = M0', R'_j / R_j = M'/M and N_j / N'_j = (M'/M)^gamma for every rank j.
pub fn condition5(a: &Carpet, b: &Carpet) -> Result<bool> {
    require_same_grid(a, b)?;
    let (sa, sb) = (a.summary(), b.summary());
    if sa.len() != sb.len() {
        return Ok(false);
    }
    let (ma, mb) = (a.big_m() as u128, b.big_m() as u128);
    let ratio = (mb as f64 / ma as f64).powf(a.gamma());
    Ok(sa.iter().zip(sb).all(|(&(na, ra), &(nb, rb))| {
        let counts_ok = rb as u128 * ma == mb * ra as u128;
        let q = na as f64 / nb as f64;
        counts_ok && (q - ratio).abs() <= IDENTITY_TOL * ratio
    }))
}

/// Compare I_a(t) with I_b(t - gamma ln(M_b / M_a)) on interior points of (t_lower, t_upper) of a.
pub fn rate_shift_check(a: &Carpet, b: &Carpet, samples: usize) -> Result<RateShiftCheck> {
    require_same_grid(a, b)?;
    let ra = RateContext::new(a)?;
    let rb = RateContext::new(b)?;
    let shift = a.gamma() * (b.big_m() as f64 / a.big_m() as f64).ln();
    let (lo, hi) = (a.t_lower(), a.t_upper());
    let mut max_residual: f64 = 0.0;
    let mut skipped = 0;
    for k in 1..=samples {
        let t = lo + (hi - lo) * k as f64 / (samples + 1) as f64;
        match rb.rate(t - shift) {
            Ok(ib) => max_residual = max_residual.max((ra.rate(t)? - ib).abs()),
            Err(Error::DomainError(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(RateShiftCheck {
        ok: skipped < samples && max_residual <= RATE_TOL,
        shift,
        max_residual,
        skipped,
    })
}

fn solved(c: &Carpet, grid: &[f64]) -> Result<Vec<f64>> {
    curve(c, grid)
        .into_iter()
        .map(|r| r.map(|d: DimResult| d.s))
        .collect()
}

pub fn interdim_equal_check(a: &Carpet, b: &Carpet, grid: &[f64]) -> Result<InterdimCheck> {
    let (da, db) = (solved(a, grid)?, solved(b, grid)?);
    let mut best = InterdimCheck {
        equal: true,
        max_gap: 0.0,
        argmax_theta: grid.first().copied().unwrap_or(f64::NAN),
    };
    for ((&th, x), y) in grid.iter().zip(&da).zip(&db) {
        let gap = (x - y).abs();
        if gap > best.max_gap {
            best.max_gap = gap;
            best.argmax_theta = th;
        }
    }
    best.equal = best.max_gap <= DIM_TOL;
    Ok(best)
}

/// Smallest ratio dim_theta(source) / dim_theta(target) over the grid, capped at 1.
pub fn holder_bound(source: &Carpet, target: &Carpet, grid: &[f64]) -> Result<HolderBound> {
    if grid.is_empty() {
        return Err(Error::DomainError("empty theta grid".into()));
    }
    let (ds, dt) = (solved(source, grid)?, solved(target, grid)?);
    let mut out = HolderBound {
        theta_best: grid[0],
        alpha_bound: f64::INFINITY,
    };
    for ((&th, x), y) in grid.iter().zip(&ds).zip(&dt) {
        let r = x / y;
        if r < out.alpha_bound {
            out = HolderBound {
                theta_best: th,
                alpha_bound: r,
            };
        }
    }
    out.alpha_bound = out.alpha_bound.min(1.0);
    Ok(out)
}

/// theta_k = k / (points + 1), k = 1..=points.
pub fn default_theta_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|k| k as f64 / (points + 1) as f64).collect()
}

fn spectra_check(a: &Carpet, b: &Carpet, warnings: &mut Vec<String>) -> bool {
    let (ra, rb) = (alpha_range(a), alpha_range(b));
    let ranges_match = (ra.alpha_min - rb.alpha_min).abs() <= SPECTRUM_TOL
        && (ra.alpha_max - rb.alpha_max).abs() <= SPECTRUM_TOL;
    if a.has_uniform_fibres() || b.has_uniform_fibres() {
        warnings.push("uniform fibres: spectrum is a single point, compared by its range".into());
        return ranges_match;
    }
    if !ranges_match {
        return false;
    }
    ra.interior_grid(DEFAULT_GRID_POINTS).iter().all(|&alpha| {
        match (spectrum(a, alpha), spectrum(b, alpha)) {
            (Ok(x), Ok(y)) => (x.f - y.f).abs() <= SPECTRUM_TOL,
            _ => false,
        }
    })
}

/// Run every equivalence test and summarise the verdicts.
pub fn full_report(a: &Carpet, b: &Carpet) -> EquivalenceReport {
    let mut warnings = Vec::new();
    let gamma_equal = (a.gamma() - b.gamma()).abs() <= IDENTITY_TOL * a.gamma();
    let reconciled = match reconcile_grids(a, b) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("grid reconciliation failed: {e}"));
            None
        }
    };
    let relation = reconciled
        .as_ref()
        .map_or(GridRelation::Incomparable, |r| r.2);
    if relation == GridRelation::Incomparable && gamma_equal {
        warnings.push(format!(
            "no exponents up to {MAX_EXPONENT} relate the grids; condition (5) not decidable"
        ));
    }

    let (condition5_val, rate_shift_ok) = match &reconciled {
        Some((ra, rb, rel)) if *rel != GridRelation::Incomparable => {
            let c5 = condition5(ra, rb).unwrap_or(false);
            let shift = if ra.has_uniform_fibres() || rb.has_uniform_fibres() {
                warnings.push("uniform fibres: rate function degenerate, shift check uses condition (5)".into());
                c5
            } else {
                match rate_shift_check(ra, rb, DEFAULT_SAMPLES) {
                    Ok(r) => r.ok,
                    Err(e) => {
                        warnings.push(format!("rate shift check failed: {e}"));
                        false
                    }
                }
            };
            (Some(c5), shift)
        }
        _ => (None, false),
    };

    let grid = default_theta_grid(DEFAULT_GRID_POINTS);
    let interdim_equal = match interdim_equal_check(a, b, &grid) {
        Ok(r) => r.equal,
        Err(e) => {
            warnings.push(format!("intermediate dimension check failed: {e}"));
            false
        }
    };
    let spectra_equal = spectra_check(a, b, &mut warnings);

    let verdict = match condition5_val {
        Some(c5) => c5,
        None => {
            warnings.push(
                "grids not reconciled: verdict from gamma and sampled intermediate dimensions".into(),
            );
            gamma_equal && interdim_equal
        }
    };
    if let Some(c5) = condition5_val {
        if !(c5 == rate_shift_ok && c5 == interdim_equal && c5 == spectra_equal) {
            warnings.push(format!(
                "equivalence checks disagree: condition5={c5} rate_shift_ok={rate_shift_ok} \
                 interdim_equal={interdim_equal} spectra_equal={spectra_equal}"
            ));
        }
    }

    let holder = if gamma_equal {
        let mut hgrid = grid.clone();
        hgrid.extend((1..=3).map(|l| a.gamma().powi(-l)));
        hgrid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        match holder_bound(b, a, &hgrid) {
            Ok(h) => Some(h),
            Err(e) => {
                warnings.push(format!("Hölder bound failed: {e}"));
                None
            }
        }
    } else {
        None
    };

    EquivalenceReport {
        grid_relation: relation,
        gamma_equal,
        condition5: condition5_val.unwrap_or(false),
        rate_shift_ok,
        interdim_equal,
        spectra_equal,
        verdict_intermediate_dims: verdict,
        bilipschitz_obstruction: !verdict,
        holder,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: u64, n: u64, cols: &[u64]) -> Carpet {
        Carpet::new(m, n, cols.to_vec()).unwrap()
    }

    fn ex14() -> (Carpet, Carpet) {
        let mut a = vec![27; 2];
        a.extend([3; 11]);
        a.extend([1; 19]);
        let mut b = vec![27];
        b.extend([9; 6]);
        b.extend([1; 25]);
        (c(32, 243, &a), c(32, 243, &b))
    }

    #[test]
    fn reconciliation() {
        let a = c(6, 36, &[9, 6]);
        assert_eq!(reconcile_grids(&a, &a).unwrap().2, GridRelation::SameGrid);
        let (x, y, rel) = reconcile_grids(&c(4, 16, &[3, 1]), &c(8, 64, &[5, 2, 2])).unwrap();
        assert_eq!(rel, GridRelation::MultiplicativelyDependent { p: 2, q: 3 });
        assert_eq!((x.m(), x.n()), (y.m(), y.n()));
        assert_eq!((x.m(), x.n()), (64, 4096));
        let rel = reconcile_grids(&c(6, 36, &[9, 6]), &c(10, 36, &[3, 2])).unwrap().2;
        assert_eq!(rel, GridRelation::Incomparable);
    }

    #[test]
    fn condition5_examples() {
        let a = c(8, 27, &[6, 3]);
        let b = c(8, 27, &[2, 2, 1, 1]);
        assert!(condition5(&a, &b).unwrap());
        assert!(condition5(&b, &a).unwrap());
        assert!(condition5(&a, &a).unwrap());
        let (l, lp) = ex14();
        assert!(!condition5(&l, &lp).unwrap());
        assert_eq!(condition5(&a, &c(6, 36, &[9, 6])).unwrap_err().code(), "GridMismatch");
    }

    #[test]
    fn rate_shift_examples() {
        let a = c(8, 27, &[6, 3]);
        let b = c(8, 27, &[2, 2, 1, 1]);
        let r = rate_shift_check(&a, &b, 50).unwrap();
        assert!(r.ok && r.skipped == 0);
        assert!((r.shift - 3f64.ln()).abs() < 1e-12);
        let r = rate_shift_check(&a, &a, 50).unwrap();
        assert!(r.ok && r.shift == 0.0);
        let (l, lp) = ex14();
        let r = rate_shift_check(&l, &lp, 50).unwrap();
        assert!(!r.ok && r.max_residual > 1e-4);
    }

    #[test]
    fn interdim_checks() {
        let a = c(6, 36, &[9, 6]);
        let b = c(4, 36, &[6, 4]);
        let hi: Vec<f64> = (0..20).map(|i| 0.55 + 0.4 * i as f64 / 19.0).collect();
        let lo: Vec<f64> = (0..20).map(|i| 0.05 + 0.4 * i as f64 / 19.0).collect();
        assert!(interdim_equal_check(&a, &b, &hi).unwrap().equal);
        let r = interdim_equal_check(&a, &b, &lo).unwrap();
        assert!(!r.equal && r.max_gap > 1e-6);
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let r = interdim_equal_check(&c(8, 27, &[6, 3]), &c(8, 27, &[2, 2, 1, 1]), &grid);
        assert!(r.unwrap().equal);
    }

    #[test]
    fn holder_examples() {
        let (l, lp) = ex14();
        let th = (2f64.ln() / 3f64.ln()).powi(2);
        let h = holder_bound(&lp, &l, &[0.3, th, 0.7]).unwrap();
        assert!(h.alpha_bound < 0.9995);
        assert_eq!(h.theta_best, th);
        assert_eq!(holder_bound(&l, &l, &[0.3, 0.5]).unwrap().alpha_bound, 1.0);
        let u = c(2, 4, &[2, 2]);
        assert_eq!(holder_bound(&u, &u, &[0.3, 0.5]).unwrap().alpha_bound, 1.0);
    }

    #[test]
    fn reports() {
        let (l, lp) = ex14();
        let r = full_report(&l, &lp);
        assert!(r.bilipschitz_obstruction);
        assert!(!r.condition5 && !r.rate_shift_ok && !r.interdim_equal && !r.spectra_equal);
        assert!(r.holder.unwrap().alpha_bound < 0.9995);

        let a = c(8, 27, &[6, 3]);
        let b = c(8, 27, &[2, 2, 1, 1]);
        let r = full_report(&a, &b);
        assert!(r.verdict_intermediate_dims && !r.bilipschitz_obstruction);
        assert!(r.condition5 && r.rate_shift_ok && r.interdim_equal && r.spectra_equal);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);

        let r = full_report(&a, &a);
        assert!(r.condition5 && r.rate_shift_ok && r.interdim_equal && r.spectra_equal);
        assert!(!r.bilipschitz_obstruction);

        let r = full_report(&a, &c(6, 36, &[9, 6]));
        assert_eq!(r.grid_relation, GridRelation::Incomparable);
        assert!(!r.gamma_equal && r.bilipschitz_obstruction);
    }

    #[test]
    fn report_symmetry() {
        let pairs = [
            (c(8, 27, &[6, 3]), c(8, 27, &[2, 2, 1, 1])),
            ex14(),
            (c(4, 16, &[3, 1]), c(8, 64, &[5, 2, 2])),
        ];
        for (a, b) in pairs {
            let (x, y) = (full_report(&a, &b), full_report(&b, &a));
            assert_eq!(x.condition5, y.condition5);
            assert_eq!(x.rate_shift_ok, y.rate_shift_ok);
            assert_eq!(x.interdim_equal, y.interdim_equal);
            assert_eq!(x.spectra_equal, y.spectra_equal);
            assert_eq!(x.bilipschitz_obstruction, y.bilipschitz_obstruction);
        }
    }

    #[test]
    fn serialised_shape() {
        let a = c(8, 27, &[6, 3]);
        let v = serde_json::to_value(full_report(&a, &a)).unwrap();
        assert_eq!(v["grid_relation"]["kind"], "same_grid");
        for key in [
            "gamma_equal",
            "condition5",
            "rate_shift_ok",
            "interdim_equal",
            "spectra_equal",
            "verdict_intermediate_dims",
            "bilipschitz_obstruction",
            "holder",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let rel = GridRelation::MultiplicativelyDependent { p: 2, q: 3 };
        let v = serde_json::to_value(rel).unwrap();
        assert_eq!(v["kind"], "multiplicatively_dependent");
        assert_eq!(v["p"], 2);
    }
}
