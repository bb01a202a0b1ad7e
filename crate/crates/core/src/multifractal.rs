//! Multifractal spectrum of the uniform self-affine measure.

use serde::Serialize;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::rate::{RateContext, Tilt};

const XI_BOUND: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub f: f64,
    pub xi_opt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaRange {
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl AlphaRange {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.alpha_min && alpha < self.alpha_max
    }

    /// `k` equally spaced interior points.
    pub fn interior_grid(&self, k: usize) -> Vec<f64> {
        let w = self.alpha_max - self.alpha_min;
        (1..=k)
            .map(|i| self.alpha_min + w * i as f64 / (k + 1) as f64)
            .collect()
    }
}

fn exponent(c: &Carpet, xi: f64) -> f64 {
    let g = 1.0 / c.gamma();
    g + (1.0 - g) * xi
}

pub fn beta(c: &Carpet, xi: f64) -> f64 {
    let tilt = Tilt::from_carpet(c);
    let log_sum = c.ln_big_m() + tilt.log_mgf(exponent(c, xi), 0.0);
    (-xi * c.ln_big_n() + log_sum) / c.ln_m()
}

pub fn beta_deriv(c: &Carpet, xi: f64) -> f64 {
    let tilt = Tilt::from_carpet(c);
    let mean = tilt.moments(exponent(c, xi)).0;
    (-c.ln_big_n() + (1.0 - 1.0 / c.gamma()) * mean) / c.ln_m()
}

pub fn alpha_range(c: &Carpet) -> AlphaRange {
    let k = (1.0 / c.gamma() - 1.0) / c.ln_m();
    let base = c.ln_big_n() / c.ln_m();
    AlphaRange {
        alpha_min: k * c.t_max() + base,
        alpha_max: k * c.t_min() + base,
    }
}

/// f(alpha) = inf over xi of (alpha xi + beta(xi)).
pub fn spectrum(c: &Carpet, alpha: f64) -> Result<SpectrumSample> {
    let range = alpha_range(c);
    let out_of_range = || Error::AlphaOutOfRange {
        alpha,
        min: range.alpha_min,
        max: range.alpha_max,
    };
    if !range.contains(alpha) {
        return Err(out_of_range());
    }
    let tilt = Tilt::from_carpet(c);
    let k = 1.0 - 1.0 / c.gamma();
    let target = (c.ln_big_n() - alpha * c.ln_m()) / k;
    let (e_lo, e_hi) = (exponent(c, -XI_BOUND), exponent(c, XI_BOUND));
    if tilt.moments(e_lo).0 >= target || tilt.moments(e_hi).0 <= target {
        return Err(out_of_range());
    }
    let e = tilt.solve_mean(target, e_lo, e_hi, exponent(c, 0.0))?;
    let xi = (e - 1.0 / c.gamma()) / k;
    Ok(SpectrumSample {
        alpha,
        f: alpha * xi + beta(c, xi),
        xi_opt: xi,
    })
}

/// alpha(t) = ln N / ln m - (1/ln m - 1/ln n) t.
pub fn alpha_of_t(c: &Carpet, t: f64) -> f64 {
    c.ln_big_n() / c.ln_m() - (1.0 / c.ln_m() - 1.0 / c.ln_n()) * t
}

/// |(ln M - I(t)) - (ln m f(alpha(t)) - t / gamma)|.
pub fn step4_residual(c: &Carpet, t: f64) -> Result<f64> {
    let rate = RateContext::new(c)?;
    let lhs = c.ln_big_m() - rate.rate(t)?;
    let sample = spectrum(c, alpha_of_t(c, t))
        .map_err(|e| Error::DomainError(format!("t = {t}: {e}")))?;
    Ok((lhs - (c.ln_m() * sample.f - t / c.gamma())).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: u64, n: u64, cols: &[u64]) -> Carpet {
        Carpet::new(m, n, cols.to_vec()).unwrap()
    }

    #[test]
    fn beta_special_values() {
        let k = c(8, 27, &[6, 3]);
        assert!((beta(&k, 0.0) - k.dim_hausdorff()).abs() < 1e-14);
        assert!(beta(&k, 1.0).abs() < 1e-14);
        let h = 0.05;
        for i in -40..40 {
            let x = i as f64 * h;
            assert!(beta(&k, x - h) - 2.0 * beta(&k, x) + beta(&k, x + h) >= 0.0);
        }
        let fd = (beta(&k, 0.3 + 1e-6) - beta(&k, 0.3 - 1e-6)) / 2e-6;
        assert!((fd - beta_deriv(&k, 0.3)).abs() < 1e-8);
    }

    #[test]
    fn alpha_range_formulas() {
        let k = c(8, 27, &[6, 3]);
        let r = alpha_range(&k);
        let g = k.gamma();
        let lm = 8f64.ln();
        let amin = (1.0 / g - 1.0) / lm * 6f64.ln() + 9f64.ln() / lm;
        let amax = (1.0 / g - 1.0) / lm * 3f64.ln() + 9f64.ln() / lm;
        assert_eq!((r.alpha_min, r.alpha_max), (amin, amax));
        assert_eq!(spectrum(&k, amin).unwrap_err().code(), "AlphaOutOfRange");
        assert_eq!(spectrum(&k, amax + 0.1).unwrap_err().code(), "AlphaOutOfRange");
    }

    #[test]
    fn peak_is_hausdorff_dimension() {
        let k = c(8, 27, &[6, 3]);
        let alpha = -beta_deriv(&k, 0.0);
        let s = spectrum(&k, alpha).unwrap();
        assert!(s.xi_opt.abs() < 1e-10);
        assert!((s.f - k.dim_hausdorff()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_is_concave_and_bounded() {
        let k = c(5, 9, &[7, 2, 4, 4, 1]);
        let grid = alpha_range(&k).interior_grid(60);
        let f: Vec<f64> = grid.iter().map(|&a| spectrum(&k, a).unwrap().f).collect();
        assert!(f.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] <= 1e-9));
        assert!(f.iter().all(|&v| (0.0..=2.0).contains(&v)));
    }

    #[test]
    fn step4_identity() {
        for k in [c(8, 27, &[6, 3]), c(5, 9, &[7, 2, 4, 4, 1]), c(2, 3, &[2, 1])] {
            let r = RateContext::new(&k).unwrap();
            for t in [
                k.t_lower(),
                0.5 * (k.t_lower() + k.t_upper()),
                k.t_upper(),
                0.5 * (k.t_upper() + r.domain_max()),
            ] {
                assert!(step4_residual(&k, t).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn equivalent_carpets_share_spectra() {
        let a = c(8, 27, &[6, 3]);
        let b = c(8, 27, &[2, 2, 1, 1]);
        let ra = alpha_range(&a);
        let rb = alpha_range(&b);
        assert!((ra.alpha_min - rb.alpha_min).abs() < 1e-12);
        assert!((ra.alpha_max - rb.alpha_max).abs() < 1e-12);
        for alpha in ra.interior_grid(25) {
            let fa = spectrum(&a, alpha).unwrap().f;
            let fb = spectrum(&b, alpha).unwrap().f;
            assert!((fa - fb).abs() < 1e-9);
        }
    }
}
