//! Method-of-types oracles: cost sums over words, exact tail counts, type-class
//! bounds and approximate-square counts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::carpet::Carpet;
use crate::error::{Error, Result};
use crate::rate::RateContext;

pub const ENUMERATION_BUDGET: u128 = 10_000_000;
pub const MAX_TAIL_J: usize = 40;
const MAX_TYPE_CLASSES: u128 = 10_000_000;
const TIE_TOL: f64 = 1e-11;
const PREFIX_TASKS: u128 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeClass {
    #[serde(rename = "J")]
    pub j: usize,
    pub counts: Vec<usize>,
    pub p: Vec<f64>,
    #[serde(serialize_with = "ser_big")]
    pub cardinality: BigUint,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeOracleResult {
    #[serde(rename = "J")]
    pub j: usize,
    pub s: f64,
    pub t: f64,
    /// ln Psi_J(s).
    pub value: f64,
    pub analytic_target: Option<f64>,
    /// |value / J - analytic_target|.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    Columns,
    Maps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoScaleCost {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub exponent: f64,
}

/// Compensated summation of many small terms.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The s paired with t: s = t / ln n + ln M / ln m.
pub fn s_from_t(c: &Carpet, t: f64) -> f64 {
    t / c.ln_n() + c.ln_big_m() / c.ln_m()
}

/// The t paired with s: t = (s - ln M / ln m) ln n.
pub fn t_from_s(c: &Carpet, s: f64) -> f64 {
    (s - c.ln_big_m() / c.ln_m()) * c.ln_n()
}

/// ln psi_{word|k}(s) = k gamma ln M - s k ln n + sum_{l <= k} ln N_{i_l}, symbols 0-based.
pub fn psi(c: &Carpet, word: &[usize], k: usize, s: f64) -> Result<f64> {
    if k > word.len() {
        return Err(Error::IndexError(format!(
            "k = {k} exceeds word length {}",
            word.len()
        )));
    }
    let cols = c.columns();
    let mut total = 0.0;
    for &i in &word[..k] {
        let n = cols.get(i).ok_or_else(|| {
            Error::IndexError(format!("symbol {i} outside 0..{}", cols.len()))
        })?;
        total += (*n as f64).ln();
    }
    let kf = k as f64;
    Ok(kf * c.gamma() * c.ln_big_m() - s * kf * c.ln_n() + total)
}

/// Average of ln N over the symbols of a word.
pub fn word_average(c: &Carpet, word: &[usize]) -> Result<f64> {
    if word.is_empty() {
        return Err(Error::IndexError("empty word".into()));
    }
    let cols = c.columns();
    let mut total = 0.0;
    for &i in word {
        let n = cols
            .get(i)
            .ok_or_else(|| Error::IndexError(format!("symbol {i} outside 0..{}", cols.len())))?;
        total += (*n as f64).ln();
    }
    Ok(total / word.len() as f64)
}

/// Per-symbol increments of ln psi.
fn steps(c: &Carpet, s: f64) -> Vec<f64> {
    let base = c.gamma() * c.ln_big_m() - s * c.ln_n();
    c.columns().iter().map(|&n| base + (n as f64).ln()).collect()
}

fn word_count(m: usize, j: usize) -> Option<u128> {
    (m as u128).checked_pow(j as u32)
}

fn analytic_target(c: &Carpet, t: f64) -> Option<f64> {
    let rate = RateContext::new(c).ok()?;
    if t < rate.t_lower() {
        Some(c.ln_big_m())
    } else if t <= rate.t_upper() {
        rate.rate(t).ok().map(|i| c.ln_big_m() - i)
    } else {
        None
    }
}

fn oracle_result(c: &Carpet, j: usize, s: f64, value: f64) -> TypeOracleResult {
    let t = t_from_s(c, s);
    let target = analytic_target(c, t);
    TypeOracleResult {
        j,
        s,
        t,
        value,
        analytic_target: target,
        gap: target.map(|a| (value / j as f64 - a).abs()),
    }
}

fn dfs(steps: &[f64], left: usize, sum: f64, min: f64, acc: &mut Neumaier) {
    if left == 0 {
        acc.add(min.exp());
        return;
    }
    for &d in steps {
        let next = sum + d;
        dfs(steps, left - 1, next, min.min(next), acc);
    }
}

/// Psi_J(s) by enumerating every word of length J over the columns.
pub fn psi_sum(c: &Carpet, j: usize, s: f64) -> Result<TypeOracleResult> {
    psi_sum_with(c, j, s, Execution::Parallel)
}

pub fn psi_sum_with(c: &Carpet, j: usize, s: f64, exec: Execution) -> Result<TypeOracleResult> {
    let m = c.big_m();
    let needed = word_count(m, j).unwrap_or(u128::MAX);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let d = steps(c, s);
    let mut depth = 0;
    while depth < j && (m as u128).pow(depth as u32) < PREFIX_TASKS {
        depth += 1;
    }
    let prefixes = (m as u128).pow(depth as u32) as usize;
    let task = |idx: usize| -> f64 {
        let (mut sum, mut min, mut rest) = (0.0f64, 0.0f64, idx);
        for _ in 0..depth {
            sum += d[rest % m];
            min = min.min(sum);
            rest /= m;
        }
        let mut acc = Neumaier::default();
        dfs(&d, j - depth, sum, min, &mut acc);
        acc.value()
    };
    let parts: Vec<f64> = match exec {
        Exec::Parallel => (0..prefixes).into_par_iter().map(task).collect(),
        Exec::Sequential => (0..prefixes).map(task).collect(),
    };
    let mut total = Neumaier::default();
    for p in parts {
        total.add(p);
    }
    Ok(oracle_result(c, j, s, total.value().ln()))
}

use Execution as Exec;

/// Counts of each distinct column value, enumerated as compositions of `len`.
fn compositions(parts: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    if parts > 0 {
        rec(0, len, &mut cur, &mut out);
    }
    out
}

fn composition_count(parts: usize, len: usize) -> u128 {
    // C(len + parts - 1, parts - 1)
    let mut v: u128 = 1;
    for i in 1..parts as u128 {
        v = v.saturating_mul(len as u128 + i) / i;
    }
    v
}

/// Lattice DP over count vectors of distinct values: weighted number of words
/// whose every non-empty prefix sum passes `keep`, grouped by final counts.
fn prefix_dp(
    values: &[f64],
    mult: &[f64],
    len: usize,
    keep: impl Fn(f64) -> bool,
) -> Vec<Vec<(Vec<usize>, f64)>> {
    use std::collections::HashMap;
    let mut levels: Vec<Vec<(Vec<usize>, f64)>> = vec![vec![(vec![0; values.len()], 1.0)]];
    for _ in 0..len {
        let mut next: HashMap<Vec<usize>, f64> = HashMap::new();
        for (counts, w) in levels.last().unwrap() {
            for j in 0..values.len() {
                let mut k = counts.clone();
                k[j] += 1;
                let sum: f64 = k.iter().zip(values).map(|(&n, v)| n as f64 * v).sum();
                if keep(sum) {
                    *next.entry(k).or_insert(0.0) += w * mult[j];
                }
            }
        }
        let mut level: Vec<(Vec<usize>, f64)> = next.into_iter().collect();
        level.sort_by(|a, b| b.0.cmp(&a.0));
        levels.push(level);
    }
    levels
}

/// Psi_J(s) from type classes, splitting each word at the first position where
/// its prefix sum attains the minimum.
pub fn psi_sum_by_types(c: &Carpet, j: usize, s: f64) -> Result<TypeOracleResult> {
    let base = c.gamma() * c.ln_big_m() - s * c.ln_n();
    let values: Vec<f64> = c
        .summary()
        .iter()
        .map(|&(v, _)| base + (v as f64).ln())
        .collect();
    let mult: Vec<f64> = c.summary().iter().map(|&(_, r)| r as f64).collect();
    let needed = composition_count(values.len(), j).saturating_mul(j as u128 + 1);
    if needed > MAX_TYPE_CLASSES {
        return Err(Error::BudgetExceeded {
            needed,
            budget: MAX_TYPE_CLASSES,
        });
    }
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs())) * j.max(1) as f64;
    let tol = TIE_TOL * scale;
    let head = prefix_dp(&values, &mult, j, |sum| sum < -tol);
    let tail = prefix_dp(&values, &mult, j, |sum| sum >= -tol);
    let tail_totals: Vec<f64> = tail
        .iter()
        .map(|lvl| lvl.iter().map(|(_, w)| w).sum())
        .collect();
    let mut total = Neumaier::default();
    for (k, level) in head.iter().enumerate() {
        let mut part = Neumaier::default();
        for (counts, w) in level {
            let sum: f64 = counts.iter().zip(&values).map(|(&n, v)| n as f64 * v).sum();
            part.add(w * sum.min(0.0).exp());
        }
        total.add(part.value() * tail_totals[j - k]);
    }
    Ok(oracle_result(c, j, s, total.value().ln()))
}

/// Psi_J by enumeration when within budget, otherwise by type classes.
pub fn psi_sum_auto(c: &Carpet, j: usize, s: f64) -> Result<TypeOracleResult> {
    match psi_sum(c, j, s) {
        Err(Error::BudgetExceeded { .. }) => psi_sum_by_types(c, j, s),
        other => other,
    }
}

pub fn multinomial(counts: &[usize]) -> BigUint {
    let mut out = BigUint::one();
    let mut n = 0usize;
    for &k in counts {
        for i in 1..=k {
            n += 1;
            out *= BigUint::from(n);
            out /= BigUint::from(i);
        }
    }
    out
}

/// Every type class of words of length J over an alphabet of size M.
pub fn type_classes(m: usize, j: usize) -> Vec<TypeClass> {
    compositions(m, j)
        .into_iter()
        .map(|counts| TypeClass {
            j,
            p: counts.iter().map(|&k| k as f64 / j.max(1) as f64).collect(),
            cardinality: multinomial(&counts),
            counts,
        })
        .collect()
}

/// Compare a word sum with J t, treating near-equality as equality.
fn compare_sum(sum: f64, j: usize, t: f64) -> std::cmp::Ordering {
    let target = j as f64 * t;
    let tol = TIE_TOL * target.abs().max(1.0);
    if (sum - target).abs() <= tol {
        std::cmp::Ordering::Equal
    } else {
        sum.partial_cmp(&target).unwrap()
    }
}

/// Whether a word with sum of ln N equal to `sum` lies on `side` of t.
pub fn in_tail(sum: f64, j: usize, t: f64, side: Side) -> bool {
    let ord = compare_sum(sum, j, t);
    match side {
        Side::Above => ord == std::cmp::Ordering::Greater,
        Side::Below => ord != std::cmp::Ordering::Greater,
    }
}

/// Exact number of words of length J whose average ln N lies strictly above t
/// or at most t.
pub fn tail_count(c: &Carpet, j: usize, t: f64, side: Side, alphabet: Alphabet) -> Result<BigUint> {
    if j > MAX_TAIL_J {
        return Err(Error::BudgetExceeded {
            needed: j as u128,
            budget: MAX_TAIL_J as u128,
        });
    }
    if j == 0 {
        return Err(Error::DomainError("J must be >= 1".into()));
    }
    let summary = c.summary();
    let needed = composition_count(summary.len(), j);
    if needed > MAX_TYPE_CLASSES {
        return Err(Error::BudgetExceeded {
            needed,
            budget: MAX_TYPE_CLASSES,
        });
    }
    let logs: Vec<f64> = summary.iter().map(|&(v, _)| (v as f64).ln()).collect();
    let weights: Vec<BigUint> = summary
        .iter()
        .map(|&(v, r)| match alphabet {
            Alphabet::Columns => BigUint::from(r),
            Alphabet::Maps => BigUint::from(r as u64 * v),
        })
        .collect();
    let mut total = BigUint::zero();
    for counts in compositions(summary.len(), j) {
        let sum: f64 = counts.iter().zip(&logs).map(|(&k, a)| k as f64 * a).sum();
        if in_tail(sum, j, t, side) {
            let mut term = multinomial(&counts);
            for (w, &k) in weights.iter().zip(&counts) {
                term *= w.pow(k as u32);
            }
            total += term;
        }
    }
    Ok(total)
}

fn big_ln(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits < 1000 {
        v.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Check #types <= (J+1)^M and (J+1)^{-M} e^{J H(p)} <= #T(p) <= e^{J H(p)} for all types.
pub fn type_bounds_check(m: usize, j: usize) -> bool {
    let classes = type_classes(m, j);
    let poly = BigUint::from(j + 1).pow(m as u32);
    if BigUint::from(classes.len()) > poly {
        return false;
    }
    let log_poly = m as f64 * ((j + 1) as f64).ln();
    classes.iter().all(|tc| {
        let h: f64 = -tc
            .p
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>();
        let jh = j as f64 * h;
        let lc = big_ln(&tc.cardinality);
        let tol = 1e-12 * jh.abs().max(1.0);
        lc <= jh + tol && lc >= jh - log_poly - tol
    })
}

/// floor(gamma K) computed exactly as the largest j with m^j <= n^K.
pub fn floor_gamma_k(c: &Carpet, k: usize) -> usize {
    let nk = BigUint::from(c.n()).pow(k as u32);
    let m = BigUint::from(c.m());
    let mut j = 0;
    let mut p = m.clone();
    while p <= nk {
        j += 1;
        p *= &m;
    }
    j
}

/// #B_K = N^K M^{floor(gamma K) - K}.
pub fn approx_square_count(c: &Carpet, k: usize) -> Result<BigUint> {
    if k > 64 {
        return Err(Error::DomainError(format!("K = {k} exceeds 64")));
    }
    let g = floor_gamma_k(c, k);
    Ok(BigUint::from(c.big_n()).pow(k as u32) * BigUint::from(c.big_m()).pow((g - k) as u32))
}

/// Per-K exponent of the two-scale cover cost with K the smallest integer having
/// floor(K/theta) - K >= J.
pub fn two_scale_cost_exponent(c: &Carpet, theta: f64, s: f64, j: usize) -> Result<TwoScaleCost> {
    let lo = 1.0 / c.gamma();
    if !(theta >= lo * (1.0 - 1e-12) && theta < 1.0) {
        return Err(Error::DomainError(format!(
            "theta = {theta} outside [{lo}, 1)"
        )));
    }
    let kf = |k: usize| (k as f64 / theta).floor() as usize;
    let mut k = 1usize;
    while kf(k) - k < j {
        k += 1;
    }
    let outer = kf(k);
    let j_eff = outer - k;
    let psi = psi_sum_auto(c, j_eff, s)?;
    let g = floor_gamma_k(c, k) as f64;
    let kk = k as f64;
    let log_cost = kk * c.ln_big_n() + psi.value + (g - outer as f64) * c.ln_big_m()
        - kk * s * c.ln_n();
    Ok(TwoScaleCost {
        k,
        j: j_eff,
        exponent: log_cost / kk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: u64, n: u64, cols: &[u64]) -> Carpet {
        Carpet::new(m, n, cols.to_vec()).unwrap()
    }

    fn words(m: usize, j: usize) -> Vec<Vec<usize>> {
        (0..m.pow(j as u32))
            .map(|mut x| {
                (0..j)
                    .map(|_| {
                        let d = x % m;
                        x /= m;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn psi_values() {
        let k = c(8, 27, &[6, 3]);
        assert_eq!(psi(&k, &[0, 1], 0, 0.7).unwrap(), 0.0);
        let v = psi(&k, &[0], 1, k.dim_box()).unwrap().exp();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        let u = [0, 1, 1];
        let w = [1, 0];
        let uw = [0, 1, 1, 1, 0];
        let s = 0.77;
        let lhs = psi(&k, &uw, 5, s).unwrap();
        let rhs = psi(&k, &u, 3, s).unwrap() + psi(&k, &w, 2, s).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
        assert_eq!(psi(&k, &[0], 2, s).unwrap_err().code(), "IndexError");
        assert_eq!(psi(&k, &[5], 1, s).unwrap_err().code(), "IndexError");
    }

    #[test]
    fn psi_sum_small_case_is_exactly_three() {
        // psi steps are 4/3 and 2/3 at s = dim_B, so Psi_2 = 1 + 8/9 + 2/3 + 4/9.
        let k = c(8, 27, &[6, 3]);
        let r = psi_sum(&k, 2, k.dim_box()).unwrap();
        assert!((r.value.exp() - 3.0).abs() < 1e-12);
        let r = psi_sum_by_types(&k, 2, k.dim_box()).unwrap();
        assert!((r.value.exp() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_routes_agree() {
        for (k, s) in [
            (c(8, 27, &[6, 3]), 0.786),
            (c(5, 9, &[7, 2, 4, 4, 1]), 1.2),
            (c(3, 7, &[5, 1, 2]), 1.1),
            (c(2, 4, &[2, 2]), 1.5),
        ] {
            for j in [1, 3, 6, 9] {
                let a = psi_sum(&k, j, s).unwrap().value;
                let b = psi_sum_by_types(&k, j, s).unwrap().value;
                assert!((a - b).abs() < 1e-12, "j={j}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn two_routes_agree_at_exact_ties() {
        // Steps ln(4/3) and ln(2/3) never tie; (2,4,[2,1]) at s with t = ln 2 gives
        // steps 0 and -ln 2, so many prefix sums are exactly zero.
        let k = c(2, 4, &[2, 1]);
        let s = s_from_t(&k, 2f64.ln());
        for j in [1, 4, 8, 12] {
            let a = psi_sum(&k, j, s).unwrap().value;
            let b = psi_sum_by_types(&k, j, s).unwrap().value;
            assert!((a - b).abs() < 1e-12, "j={j}: {a} vs {b}");
        }
    }

    #[test]
    fn psi_sum_bounds_and_budget() {
        let k = c(5, 9, &[7, 2, 4, 4, 1]);
        for j in 1..8 {
            let r = psi_sum(&k, j, 1.0).unwrap();
            assert!(r.value <= j as f64 * 5f64.ln() + 1e-12);
        }
        assert_eq!(psi_sum(&k, 11, 1.0).unwrap_err().code(), "BudgetExceeded");
        assert!(psi_sum_auto(&k, 11, 1.0).is_ok());
    }

    #[test]
    fn parallel_matches_sequential() {
        let k = c(3, 7, &[5, 1, 2]);
        let a = psi_sum_with(&k, 12, 1.1, Execution::Parallel).unwrap().value;
        let b = psi_sum_with(&k, 12, 1.1, Execution::Sequential).unwrap().value;
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn pressure_converges() {
        let k = c(8, 27, &[6, 3]);
        let bound = |j: usize| 4.0 * ((j + 1) as f64).ln() / j as f64;
        let g8 = psi_sum(&k, 8, k.dim_box()).unwrap().gap.unwrap();
        let g20 = psi_sum(&k, 20, k.dim_box()).unwrap().gap.unwrap();
        assert!(g20 < 2.0 * g8);
        assert!(g20 < bound(20));
    }

    #[test]
    fn pivot_equivalence() {
        let k = c(3, 7, &[5, 1, 2]);
        let t = 0.9;
        let s = s_from_t(&k, t);
        for w in words(3, 8) {
            let below = psi(&k, &w, 8, s).unwrap() <= 1e-12;
            let avg = word_average(&k, &w).unwrap();
            assert_eq!(below, avg <= t + 1e-12);
        }
    }

    #[test]
    fn tail_counts_match_enumeration() {
        let k = c(3, 7, &[5, 1, 2]);
        for j in [1, 3, 6] {
            for t in [0.2, 0.7, 1.0, 5f64.ln(), 2.0] {
                for side in [Side::Above, Side::Below] {
                    let (mut cols, mut maps) = (0u64, 0u64);
                    for w in words(3, j) {
                        let sum: f64 = w.iter().map(|&i| (k.columns()[i] as f64).ln()).sum();
                        if in_tail(sum, j, t, side) {
                            cols += 1;
                            maps += w.iter().map(|&i| k.columns()[i]).product::<u64>();
                        }
                    }
                    let a = tail_count(&k, j, t, side, Alphabet::Columns).unwrap();
                    let b = tail_count(&k, j, t, side, Alphabet::Maps).unwrap();
                    assert_eq!(a, BigUint::from(cols));
                    assert_eq!(b, BigUint::from(maps));
                }
            }
        }
        assert_eq!(
            tail_count(&k, 5, 10.0, Side::Above, Alphabet::Columns).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            tail_count(&k, 41, 1.0, Side::Above, Alphabet::Columns).unwrap_err().code(),
            "BudgetExceeded"
        );
    }

    #[test]
    fn tail_growth_rate() {
        let k = c(8, 27, &[6, 3]);
        let r = RateContext::new(&k).unwrap();
        let t = 0.5 * (k.t_lower() + k.t_upper());
        let q = r.q_star(t).unwrap();
        let h = crate::rate::entropy(&q.q).unwrap();
        let count = tail_count(&k, 40, t, Side::Above, Alphabet::Columns).unwrap();
        let gap = (big_ln(&count) / 40.0 - h).abs();
        assert!(gap <= 3.0 * 41f64.ln() / 40.0);
    }

    #[test]
    fn type_class_facts() {
        let tc = type_classes(2, 4);
        assert_eq!(tc.len(), 5);
        let mid = tc.iter().find(|t| t.counts == vec![2, 2]).unwrap();
        assert_eq!(mid.cardinality, BigUint::from(6u32));
        assert!(type_bounds_check(2, 4));
        assert!(type_bounds_check(2, 30));
        assert!(type_classes(4, 12).len() <= 13usize.pow(4));
        assert_eq!(type_classes(4, 12).len(), 455);
        let total: BigUint = type_classes(3, 7).iter().map(|t| t.cardinality.clone()).sum();
        assert_eq!(total, BigUint::from(3u32.pow(7)));
    }

    #[test]
    fn approximate_squares() {
        let k = c(8, 27, &[6, 3]);
        assert_eq!(approx_square_count(&k, 2).unwrap(), BigUint::from(162u32));
        assert_eq!(approx_square_count(&k, 0).unwrap(), BigUint::one());
        let v = approx_square_count(&k, 64).unwrap();
        let rate = big_ln(&v) / (64.0 * 27f64.ln());
        assert!((rate - k.dim_box()).abs() < 0.02);
        assert_eq!(floor_gamma_k(&c(2, 4, &[2, 1]), 5), 10);
    }

    #[test]
    fn two_scale_sign() {
        let k = c(8, 27, &[6, 3]);
        let theta = 0.8;
        let d = crate::interdim::dim_theta(&k, theta).unwrap().s;
        let above = two_scale_cost_exponent(&k, theta, d - 0.05, 16).unwrap();
        let below = two_scale_cost_exponent(&k, theta, d + 0.05, 16).unwrap();
        assert!(above.exponent > 0.0 && below.exponent < 0.0);
        assert!(above.j >= 16);
        let near_one = two_scale_cost_exponent(&k, 0.999, k.dim_box(), 4).unwrap();
        assert!(near_one.exponent.abs() < 0.01);
        assert_eq!(
            two_scale_cost_exponent(&k, 0.2, 0.78, 4).unwrap_err().code(),
            "DomainError"
        );
    }
}
