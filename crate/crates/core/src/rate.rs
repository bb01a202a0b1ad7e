//! The large-deviations rate function of the average of ln N_i under a uniform
//! column pick, with its exponential-tilting dual.

use crate::carpet::Carpet;
use crate::error::{Error, Result};

pub const DEFAULT_GUARD_EPS: f64 = 1e-9;
const MAX_ITER: usize = 200;
const LAMBDA_LIMIT: f64 = 1e6;

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// A finite weighted family of values a_j, tilted by e^{lambda a_j}.
#[derive(Debug, Clone)]
pub(crate) struct Tilt {
    values: Vec<f64>,
    log_weights: Vec<f64>,
}

impl Tilt {
    /// Distinct ln N'_j weighted by R_j / M.
    pub(crate) fn from_carpet(c: &Carpet) -> Self {
        let big_m = c.big_m() as f64;
        let (values, log_weights) = c
            .summary()
            .iter()
            .map(|&(v, r)| ((v as f64).ln(), (r as f64 / big_m).ln()))
            .unzip();
        Tilt {
            values,
            log_weights,
        }
    }

    fn exponents(&self, lambda: f64, centre: f64) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.log_weights)
            .map(|(a, lw)| lw + lambda * (a - centre))
            .collect()
    }

    /// ln sum_j w_j e^{lambda (a_j - centre)}.
    pub(crate) fn log_mgf(&self, lambda: f64, centre: f64) -> f64 {
        log_sum_exp(&self.exponents(lambda, centre))
    }

    /// Mean and variance of the values under the tilted weights.
    pub(crate) fn moments(&self, lambda: f64) -> (f64, f64) {
        let x = self.exponents(lambda, 0.0);
        let top = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = x.iter().map(|v| (v - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let mean = w.iter().zip(&self.values).map(|(w, a)| w * a).sum::<f64>() / total;
        let var = w
            .iter()
            .zip(&self.values)
            .map(|(w, a)| w * (a - mean) * (a - mean))
            .sum::<f64>()
            / total;
        (mean, var)
    }

    /// Solve mean(lambda) = target for lambda in [lo, hi], growing the bracket
    /// geometrically away from the anchor when the target lies beyond it.
    pub(crate) fn solve_mean(&self, target: f64, lo: f64, hi: f64, guess: f64) -> Result<f64> {
        let tol = 1e-13 * target.abs().max(1.0);
        let (mut lo, mut hi) = (lo, hi);
        while self.moments(hi).0 < target {
            lo = hi;
            hi = if hi <= 0.0 { 1.0 } else { hi * 2.0 };
            if hi > LAMBDA_LIMIT {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    target,
                });
            }
        }
        while self.moments(lo).0 > target {
            hi = lo;
            lo = if lo >= 0.0 { -1.0 } else { lo * 2.0 };
            if lo < -LAMBDA_LIMIT {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    target,
                });
            }
        }
        let mut x = if guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..MAX_ITER {
            let (mean, var) = self.moments(x);
            let f = mean - target;
            if f.abs() <= tol {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
                return Ok(x);
            }
            let step = x - f / var;
            x = if var > 0.0 && step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
            target,
        })
    }
}

/// Entropy-maximising vector with a prescribed mean of ln N_i.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedVector {
    pub t: f64,
    pub lambda: f64,
    pub q: Vec<f64>,
}

/// Evaluator of I, I', I'' and the tilted vectors for one carpet.
#[derive(Debug, Clone)]
pub struct RateContext {
    tilt: Tilt,
    column_logs: Vec<f64>,
    summary: Vec<(u64, usize)>,
    ln_big_m: f64,
    t_lower: f64,
    t_upper: f64,
    t_max: f64,
    guard_eps: f64,
}

impl RateContext {
    pub fn new(c: &Carpet) -> Result<Self> {
        if c.has_uniform_fibres() {
            return Err(Error::UniformFibres);
        }
        Ok(RateContext {
            tilt: Tilt::from_carpet(c),
            column_logs: c.columns().iter().map(|&v| (v as f64).ln()).collect(),
            summary: c.summary().to_vec(),
            ln_big_m: c.ln_big_m(),
            t_lower: c.t_lower(),
            t_upper: c.t_upper(),
            t_max: c.t_max(),
            guard_eps: DEFAULT_GUARD_EPS,
        })
    }

    pub fn with_guard_eps(mut self, eps: f64) -> Self {
        self.guard_eps = eps;
        self
    }

    pub fn t_lower(&self) -> f64 {
        self.t_lower
    }
    pub fn t_upper(&self) -> f64 {
        self.t_upper
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn guard_eps(&self) -> f64 {
        self.guard_eps
    }
    /// Largest t accepted by the evaluators.
    pub fn domain_max(&self) -> f64 {
        self.t_max - self.guard_eps
    }

    pub fn mean_at_lambda(&self, lambda: f64) -> f64 {
        self.tilt.moments(lambda).0
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let slack = 1e-13 * t.abs().max(1.0);
        if !t.is_finite() || t < self.t_lower - slack || t > self.domain_max() {
            return Err(Error::DomainError(format!(
                "t = {t} outside [{}, {}]",
                self.t_lower,
                self.domain_max()
            )));
        }
        Ok(())
    }

    pub fn lambda_for_t(&self, t: f64) -> Result<f64> {
        self.lambda_for_t_warm(t, 1.0)
    }

    /// As [`lambda_for_t`](Self::lambda_for_t), starting Newton from `guess`.
    pub fn lambda_for_t_warm(&self, t: f64, guess: f64) -> Result<f64> {
        self.check_domain(t)?;
        if t <= self.t_lower {
            return Ok(0.0);
        }
        self.tilt.solve_mean(t, 0.0, 1.0, guess)
    }

    fn rate_at_lambda(&self, t: f64, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        let c = self.t_lower;
        (lambda * (t - c) - self.tilt.log_mgf(lambda, c)).max(0.0)
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        Ok(self.rate_and_deriv(t)?.0)
    }

    pub fn rate_deriv(&self, t: f64) -> Result<f64> {
        self.lambda_for_t(t)
    }

    pub fn rate_second_deriv(&self, t: f64) -> Result<f64> {
        let lambda = self.lambda_for_t(t)?;
        Ok(1.0 / self.tilt.moments(lambda).1)
    }

    /// (I(t), I'(t)) from a single solve.
    pub fn rate_and_deriv(&self, t: f64) -> Result<(f64, f64)> {
        let lambda = self.lambda_for_t(t)?;
        Ok((self.rate_at_lambda(t, lambda), lambda))
    }

    pub(crate) fn rate_and_deriv_warm(&self, t: f64, guess: f64) -> Result<(f64, f64)> {
        let lambda = self.lambda_for_t_warm(t, guess)?;
        Ok((self.rate_at_lambda(t, lambda), lambda))
    }

    pub fn q_star(&self, t: f64) -> Result<TiltedVector> {
        let lambda = self.lambda_for_t(t)?;
        let x: Vec<f64> = self.column_logs.iter().map(|a| lambda * a).collect();
        let z = log_sum_exp(&x);
        Ok(TiltedVector {
            t,
            lambda,
            q: x.iter().map(|v| (v - z).exp()).collect(),
        })
    }

    /// Explicit rate function for carpets with exactly two distinct column counts.
    pub fn two_column_rate_closed_form(&self, t: f64) -> Result<f64> {
        if self.summary.len() != 2 {
            return Err(Error::NotTwoColumnTypes {
                distinct: self.summary.len(),
            });
        }
        let (n1, r1) = self.summary[0];
        let (n2, r2) = self.summary[1];
        let (a1, a2) = ((n1 as f64).ln(), (n2 as f64).ln());
        if !(a2..=a1).contains(&t) {
            return Err(Error::DomainError(format!("t = {t} outside [{a2}, {a1}]")));
        }
        let q1 = (t - a2) / (a1 - a2);
        let q2 = (a1 - t) / (a1 - a2);
        let h = -xlogy(q1, q1 / r1 as f64) - xlogy(q2, q2 / r2 as f64);
        Ok(self.ln_big_m - h)
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn check_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidVector("empty vector".into()));
    }
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidVector("entries must be finite and >= 0".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidVector(format!("entries sum to {sum}")));
    }
    Ok(())
}

pub fn entropy(p: &[f64]) -> Result<f64> {
    check_vector(p)?;
    Ok(-p.iter().map(|&v| xlogy(v, v)).sum::<f64>())
}

/// Relative entropy H(p || q).
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_vector(p)?;
    check_vector(q)?;
    if p.len() != q.len() {
        return Err(Error::InvalidVector("length mismatch".into()));
    }
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return Err(Error::InvalidVector(
                    "q vanishes where p is positive".into(),
                ));
            }
            total += a * (a / b).ln();
        }
    }
    Ok(total.max(0.0))
}
