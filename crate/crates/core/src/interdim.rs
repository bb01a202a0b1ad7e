//! Intermediate dimensions via the root of G(theta, s), derivatives and
//! phase-transition data.

use rayon::prelude::*;
use serde::Serialize;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::rate::RateContext;

pub const DEFAULT_MAX_L: usize = 40;
const BOUNDARY_TOL: f64 = 1e-12;
const LOWER_OFFSET: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimResult {
    pub theta: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub s: f64,
    pub t_seq: Vec<f64>,
    pub residual: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTransition {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimOptions {
    pub max_l: usize,
    /// Force a window index instead of deriving it from theta.
    pub window: Option<usize>,
}

impl Default for DimOptions {
    fn default() -> Self {
        DimOptions {
            max_l: DEFAULT_MAX_L,
            window: None,
        }
    }
}

/// One step of the sequence: t, I(t), I'(t).
#[derive(Debug, Clone, Copy)]
struct Step {
    t: f64,
    rate: f64,
    slope: f64,
}

struct Solver<'a> {
    c: &'a Carpet,
    rate: RateContext,
}

impl<'a> Solver<'a> {
    fn new(c: &'a Carpet) -> Result<Self> {
        Ok(Solver {
            c,
            rate: RateContext::new(c)?,
        })
    }

    fn t_first(&self, s: f64) -> f64 {
        (s - self.c.ln_big_m() / self.c.ln_m()) * self.c.ln_n()
    }

    fn sequence(&self, s: f64, l: usize) -> Result<Vec<Step>> {
        let t1 = self.t_first(s);
        let gamma = self.c.gamma();
        let mut out = Vec::with_capacity(l);
        let mut t = t1;
        let mut guess = 1.0;
        for index in 1..=l {
            if !(t < self.rate.domain_max()) {
                return Err(Error::DomainEscape { index, t });
            }
            let (rate, slope) = self.rate.rate_and_deriv_warm(t, guess)?;
            out.push(Step { t, rate, slope });
            guess = slope.max(1e-3);
            t = t1 + gamma * rate;
        }
        Ok(out)
    }

    fn g_with(&self, theta: f64, s: f64, l: usize) -> Result<f64> {
        let seq = self.sequence(s, l)?;
        Ok(self.g_from(theta, s, l, seq.last().unwrap()))
    }

    fn g_from(&self, theta: f64, s: f64, l: usize, last: &Step) -> f64 {
        let c = self.c;
        let gamma = c.gamma();
        let gl = gamma.powi(l as i32) * theta;
        let gl1 = gamma.powi(l as i32 - 1) * theta;
        gl * c.ln_big_n() - (gl - 1.0) * last.t + gamma * (1.0 - gl1) * (c.ln_big_m() - last.rate)
            - s * c.ln_n()
    }

    fn solve(&self, theta: f64, l: usize) -> Result<DimResult> {
        let c = self.c;
        let mut lo = c.dim_hausdorff() + LOWER_OFFSET;
        let mut hi = c.dim_box();
        let g_lo = self.g_with(theta, lo, l)?;
        if !(g_lo > 0.0) {
            let g_hi = self.g_with(theta, hi, l).unwrap_or(f64::NAN);
            return Err(Error::BracketFailure {
                lo,
                hi,
                g_lo,
                g_hi,
            });
        }
        let mut g_hi: Option<f64> = None;
        loop {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.g_with(theta, mid, l) {
                Ok(g) if g > 0.0 => lo = mid,
                Ok(g) => {
                    hi = mid;
                    g_hi = Some(g);
                }
                Err(Error::DomainEscape { .. }) | Err(Error::NoConvergence { .. }) => {
                    hi = mid;
                    g_hi = None;
                }
                Err(e) => return Err(e),
            }
        }
        let seq_lo = self.sequence(lo, l)?;
        let r_lo = self.g_from(theta, lo, l, seq_lo.last().unwrap()).abs();
        let (s, seq, residual) = match g_hi {
            Some(g) if g.abs() < r_lo => (hi, self.sequence(hi, l)?, g.abs()),
            _ => (lo, seq_lo, r_lo),
        };
        Ok(DimResult {
            theta,
            l,
            s,
            t_seq: seq.iter().map(|st| st.t).collect(),
            residual,
            bracket: (lo, hi),
        })
    }

    /// One-sided slope of s(theta) computed from window `l` data at the solved s.
    fn slope(&self, theta: f64, s: f64, l: usize) -> Result<f64> {
        let c = self.c;
        let gamma = c.gamma();
        let seq = self.sequence(s, l)?;
        let mut a = 1.0;
        for step in &seq[..l - 1] {
            a = 1.0 + gamma * step.slope * a;
        }
        let last = seq[l - 1];
        let gl = gamma.powi(l as i32) * theta;
        let gl1 = gamma.powi(l as i32 - 1) * theta;
        let num = gamma.powi(l as i32) / c.ln_n()
            * (c.ln_big_n() - last.t - c.ln_big_m() + last.rate);
        let den = 1.0 + (gl - 1.0 + gamma * (1.0 - gl1) * last.slope) * a;
        Ok(num / den)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("theta = {theta} outside (0, 1)")))
    }
}

/// Integer k >= 1 with theta = gamma^{-k} up to the boundary tolerance.
fn boundary_power(gamma: f64, theta: f64) -> Option<usize> {
    let k = (-theta.ln() / gamma.ln()).round();
    if k >= 1.0 && (theta * gamma.powi(k as i32) - 1.0).abs() <= BOUNDARY_TOL {
        Some(k as usize)
    } else {
        None
    }
}

/// Window L with gamma^{-L} < theta <= gamma^{-(L-1)}; theta = gamma^{-k} is given L = k.
pub fn window_index(c: &Carpet, theta: f64) -> Result<usize> {
    check_theta(theta)?;
    let gamma = c.gamma();
    if let Some(k) = boundary_power(gamma, theta) {
        return Ok(k);
    }
    Ok(1 + (-theta.ln() / gamma.ln()).floor() as usize)
}

/// t_1(s), ..., t_L(s) with t_1 = (s - ln M / ln m) ln n and t_{l+1} = T_s(t_l).
pub fn t_sequence(c: &Carpet, s: f64, l: usize) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::DomainError("sequence length must be >= 1".into()));
    }
    let solver = Solver::new(c)?;
    Ok(solver.sequence(s, l)?.iter().map(|st| st.t).collect())
}

/// T_s(t) = (s - ln M / ln m) ln n + gamma I(t).
pub fn t_map(c: &Carpet, s: f64, t: f64) -> Result<f64> {
    let solver = Solver::new(c)?;
    Ok(solver.t_first(s) + c.gamma() * solver.rate.rate(t)?)
}

pub fn g_value(c: &Carpet, theta: f64, s: f64) -> Result<f64> {
    let l = window_index(c, theta)?;
    Solver::new(c)?.g_with(theta, s, l)
}

pub fn dim_theta(c: &Carpet, theta: f64) -> Result<DimResult> {
    dim_theta_with(c, theta, &DimOptions::default())
}

pub fn dim_theta_with(c: &Carpet, theta: f64, opts: &DimOptions) -> Result<DimResult> {
    check_theta(theta)?;
    let l = match opts.window {
        Some(0) => return Err(Error::DomainError("window index must be >= 1".into())),
        Some(l) => l,
        None => window_index(c, theta)?,
    };
    if l > opts.max_l {
        return Err(Error::DepthLimit {
            window: l,
            max: opts.max_l,
        });
    }
    if c.has_uniform_fibres() {
        return Ok(DimResult {
            theta,
            l: 0,
            s: c.dim_hausdorff(),
            t_seq: Vec::new(),
            residual: 0.0,
            bracket: (c.dim_hausdorff(), c.dim_box()),
        });
    }
    Solver::new(c)?.solve(theta, l)
}

/// Left and right derivatives of theta -> dim_theta.
pub fn derivative_at(c: &Carpet, theta: f64) -> Result<(f64, f64)> {
    derivative_at_with(c, theta, &DimOptions::default())
}

pub fn derivative_at_with(c: &Carpet, theta: f64, opts: &DimOptions) -> Result<(f64, f64)> {
    let res = dim_theta_with(
        c,
        theta,
        &DimOptions {
            window: None,
            ..*opts
        },
    )?;
    if c.has_uniform_fibres() {
        return Ok((0.0, 0.0));
    }
    let solver = Solver::new(c)?;
    let l = res.l;
    if boundary_power(c.gamma(), theta).is_some() {
        let d_plus = solver.slope(theta, res.s, l)?;
        let d_minus = solver.slope(theta, res.s, l + 1)?;
        Ok((d_minus, d_plus))
    } else {
        let d = solver.slope(theta, res.s, l)?;
        Ok((d, d))
    }
}

/// One-sided derivatives at theta = gamma^{-L}.
pub fn phase_transition(c: &Carpet, l: usize) -> Result<PhaseTransition> {
    if l == 0 {
        return Err(Error::DomainError("L must be >= 1".into()));
    }
    let theta = c.gamma().powi(-(l as i32));
    let (d_minus, d_plus) = derivative_at(c, theta)?;
    Ok(PhaseTransition {
        l,
        theta,
        d_minus,
        d_plus,
        ratio: d_plus / d_minus,
    })
}

/// t' with I'(t') = 1/gamma.
pub fn t_prime(c: &Carpet) -> Result<f64> {
    let rate = RateContext::new(c)?;
    Ok(rate.mean_at_lambda(1.0 / c.gamma()))
}

/// t* with I(t*) = (dim_B - dim_H) ln m / (1 - 1/gamma).
pub fn t_star(c: &Carpet) -> Result<f64> {
    let rate = RateContext::new(c)?;
    let target = (c.dim_box() - c.dim_hausdorff()) * c.ln_m() / (1.0 - 1.0 / c.gamma());
    let (mut lo, mut hi) = (rate.t_lower(), rate.domain_max());
    if rate.rate(hi)? < target {
        return Err(Error::NoConvergence {
            iterations: 0,
            target,
        });
    }
    for _ in 0..200 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if rate.rate(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Limit of d_plus / d_minus at gamma^{-L} as L grows.
pub fn phase_ratio_limit(c: &Carpet) -> Result<f64> {
    let rate = RateContext::new(c)?;
    let ts = t_star(c)?;
    let tt = t_map(c, c.dim_hausdorff(), ts)?;
    let base = c.ln_big_n() - c.ln_big_m();
    Ok((base - ts + rate.rate(ts)?) / (base - tt + rate.rate(tt)?))
}

/// dim_theta over a grid, evaluated in parallel, returned in input order.
pub fn curve(c: &Carpet, thetas: &[f64]) -> Vec<Result<DimResult>> {
    curve_with(c, thetas, &DimOptions::default())
}

pub fn curve_with(c: &Carpet, thetas: &[f64], opts: &DimOptions) -> Vec<Result<DimResult>> {
    thetas
        .par_iter()
        .map(|&th| dim_theta_with(c, th, opts))
        .collect()
}
