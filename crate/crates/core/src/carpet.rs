//! Carpet descriptions, validation and closed-form dimensions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest grid side accepted from an iterate.
const GRID_LIMIT: u64 = 1 << 62;
/// Largest number of columns an iterate may materialise.
const COLUMN_LIMIT: usize = 1 << 24;

/// A Bedford-McMullen carpet reduced to the data every formula needs:
/// the grid and the number of maps in each non-empty column.
#[derive(Debug, Clone, PartialEq)]
pub struct Carpet {
    m: u64,
    n: u64,
    columns: Vec<u64>,
    total: u64,
    gamma: f64,
    ln_m: f64,
    ln_n: f64,
    p: Vec<f64>,
    t_lower: f64,
    t_upper: f64,
    t_max: f64,
    t_min: f64,
    summary: Vec<(u64, usize)>,
    dim_h: f64,
    dim_b: f64,
}

#[derive(Serialize)]
struct CanonicalForm<'a> {
    m: u64,
    n: u64,
    columns: &'a [u64],
}

#[derive(Deserialize)]
struct RawCarpet {
    m: i64,
    n: i64,
    #[serde(default)]
    columns: Option<Vec<i64>>,
    #[serde(default)]
    digits: Option<Vec<(i64, i64)>>,
}

impl Carpet {
    pub fn new(m: u64, n: u64, columns: Vec<u64>) -> Result<Self> {
        if m < 2 || n <= m {
            return Err(Error::InvalidGrid { m, n });
        }
        if columns.is_empty() {
            return Err(Error::InvalidColumns("no non-empty columns".into()));
        }
        if columns.len() as u64 > m {
            return Err(Error::InvalidColumns(format!(
                "{} non-empty columns on a grid with {} columns",
                columns.len(),
                m
            )));
        }
        let mut total: u64 = 0;
        for (i, &c) in columns.iter().enumerate() {
            if c == 0 || c > n {
                return Err(Error::InvalidColumns(format!(
                    "column {} has {} maps, expected 1..={}",
                    i + 1,
                    c,
                    n
                )));
            }
            total = total
                .checked_add(c)
                .ok_or_else(|| Error::Overflow("total map count".into()))?;
        }

        let big_m = columns.len() as f64;
        let (m_root, n_root) = common_root(m, n);
        let gamma = (n_root as f64).ln() / (m_root as f64).ln();
        let ln_m = (m as f64).ln();
        let ln_n = (n as f64).ln();
        let logs: Vec<f64> = columns.iter().map(|&c| (c as f64).ln()).collect();
        let p: Vec<f64> = columns.iter().map(|&c| c as f64 / total as f64).collect();
        let ln_total = (total as f64).ln();

        let mut sorted = columns.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut summary: Vec<(u64, usize)> = Vec::new();
        for v in sorted {
            match summary.last_mut() {
                Some((last, r)) if *last == v => *r += 1,
                _ => summary.push((v, 1)),
            }
        }

        let t_lower = summary
            .iter()
            .map(|&(v, r)| r as f64 * (v as f64).ln())
            .sum::<f64>()
            / big_m;
        // ln N - H(P) = sum_i P_i ln N_i
        let t_upper = summary
            .iter()
            .map(|&(v, r)| (r as f64 * v as f64) / total as f64 * (v as f64).ln())
            .sum::<f64>();
        let t_max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let t_min = logs.iter().cloned().fold(f64::INFINITY, f64::min);

        let uniform = summary.len() == 1;
        let dim_b = ln_total / ln_n + (1.0 - 1.0 / gamma) * big_m.ln() / ln_m;
        let dim_h = if uniform {
            dim_b
        } else {
            let e = 1.0 / gamma;
            let terms: Vec<f64> = summary
                .iter()
                .map(|&(v, r)| (r as f64).ln() + e * (v as f64).ln())
                .collect();
            crate::rate::log_sum_exp(&terms) / ln_m
        };

        Ok(Carpet {
            m,
            n,
            columns,
            total,
            gamma,
            ln_m,
            ln_n,
            p,
            t_lower,
            t_upper,
            t_max,
            t_min,
            summary,
            dim_h,
            dim_b,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn columns(&self) -> &[u64] {
        &self.columns
    }
    /// Number of non-empty columns.
    pub fn big_m(&self) -> usize {
        self.columns.len()
    }
    /// Total number of maps.
    pub fn big_n(&self) -> u64 {
        self.total
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn ln_m(&self) -> f64 {
        self.ln_m
    }
    pub fn ln_n(&self) -> f64 {
        self.ln_n
    }
    pub fn ln_big_m(&self) -> f64 {
        (self.columns.len() as f64).ln()
    }
    pub fn ln_big_n(&self) -> f64 {
        (self.total as f64).ln()
    }
    /// Column distribution N_i / N.
    pub fn p(&self) -> &[f64] {
        &self.p
    }
    /// Uniform distribution on the non-empty columns.
    pub fn q(&self) -> Vec<f64> {
        vec![1.0 / self.columns.len() as f64; self.columns.len()]
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
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
    /// Distinct column counts in descending order with their multiplicities.
    pub fn summary(&self) -> &[(u64, usize)] {
        &self.summary
    }
    pub fn distinct_counts(&self) -> usize {
        self.summary.len()
    }
    pub fn dim_hausdorff(&self) -> f64 {
        self.dim_h
    }
    pub fn dim_box(&self) -> f64 {
        self.dim_b
    }
    pub fn has_uniform_fibres(&self) -> bool {
        self.summary.len() == 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("carpet serialisation cannot fail")
    }

    /// The b-th iterate: grid m^b x n^b with every b-fold product of column counts.
    pub fn iterate(&self, b: u32) -> Result<Carpet> {
        if b == 0 {
            return Err(Error::DomainError("iterate exponent must be >= 1".into()));
        }
        if b == 1 {
            return Ok(self.clone());
        }
        let m = checked_pow_limited(self.m, b)?;
        let n = checked_pow_limited(self.n, b)?;
        let count = (self.columns.len() as u128).checked_pow(b);
        if count.is_none_or(|c| c > COLUMN_LIMIT as u128) {
            return Err(Error::Overflow(format!(
                "iterate would have more than {COLUMN_LIMIT} columns"
            )));
        }
        let mut cols: Vec<u64> = vec![1];
        for _ in 0..b {
            let mut next = Vec::with_capacity(cols.len() * self.columns.len());
            for &prefix in &cols {
                for &c in &self.columns {
                    next.push(prefix * c);
                }
            }
            cols = next;
        }
        Carpet::new(m, n, cols)
    }
}

/// Parse the JSON carpet description, either by column counts or by 1-based digits.
pub fn parse_carpet(text: &str) -> Result<Carpet> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    if !value.is_object() {
        return Err(Error::MalformedInput("expected a JSON object".into()));
    }
    let raw: RawCarpet =
        serde_json::from_value(value).map_err(|e| Error::MalformedInput(e.to_string()))?;
    if raw.m < 2 || raw.n <= raw.m {
        return Err(Error::InvalidGrid {
            m: raw.m.max(0) as u64,
            n: raw.n.max(0) as u64,
        });
    }
    let (m, n) = (raw.m as u64, raw.n as u64);
    let columns = match (raw.columns, raw.digits) {
        (Some(cols), None) => cols
            .into_iter()
            .map(|c| {
                if c < 1 {
                    Err(Error::InvalidColumns(format!("column count {c} < 1")))
                } else {
                    Ok(c as u64)
                }
            })
            .collect::<Result<Vec<u64>>>()?,
        (None, Some(digits)) => columns_from_digits(m, n, &digits)?,
        (Some(_), Some(_)) => {
            return Err(Error::MalformedInput(
                "give either \"columns\" or \"digits\", not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::MalformedInput(
                "missing \"columns\" or \"digits\"".into(),
            ))
        }
    };
    Carpet::new(m, n, columns)
}

fn columns_from_digits(m: u64, n: u64, digits: &[(i64, i64)]) -> Result<Vec<u64>> {
    let mut seen = HashSet::new();
    let mut counts = vec![0u64; m as usize];
    for &(col, row) in digits {
        if col < 1 || col as u64 > m || row < 1 || row as u64 > n {
            return Err(Error::InvalidColumns(format!(
                "digit ({col},{row}) outside the {m}x{n} grid"
            )));
        }
        if !seen.insert((col, row)) {
            return Err(Error::InvalidColumns(format!("duplicate digit ({col},{row})")));
        }
        counts[(col - 1) as usize] += 1;
    }
    Ok(counts.into_iter().filter(|&c| c > 0).collect())
}

impl Serialize for Carpet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CanonicalForm {
            m: self.m,
            n: self.n,
            columns: &self.columns,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Carpet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        parse_carpet(&v.to_string()).map_err(serde::de::Error::custom)
    }
}

fn checked_pow_limited(base: u64, b: u32) -> Result<u64> {
    base.checked_pow(b)
        .filter(|&v| v <= GRID_LIMIT)
        .ok_or_else(|| Error::Overflow(format!("{base}^{b} exceeds 2^62")))
}

fn integer_root(x: u64, b: u32) -> Option<u64> {
    let guess = (x as f64).powf(1.0 / b as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r.checked_pow(b) == Some(x))
}

/// Reduce (m, n) = (m0^b, n0^b) with b maximal, so that iterates share gamma bit for bit.
fn common_root(m: u64, n: u64) -> (u64, u64) {
    for b in (2..=62u32).rev() {
        if let (Some(m0), Some(n0)) = (integer_root(m, b), integer_root(n, b)) {
            if m0 >= 2 {
                return (m0, n0);
            }
        }
    }
    (m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(m: u64, n: u64, cols: &[u64]) -> Carpet {
        Carpet::new(m, n, cols.to_vec()).unwrap()
    }

    #[test]
    fn parses_column_form() {
        let k = parse_carpet(r#"{"m":8,"n":27,"columns":[6,3]}"#).unwrap();
        assert_eq!(k.big_m(), 2);
        assert_eq!(k.big_n(), 9);
        assert!((k.gamma() - 27f64.ln() / 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn parses_digit_form() {
        let k = parse_carpet(r#"{"m":2,"n":3,"digits":[[1,1],[1,2]]}"#).unwrap();
        assert_eq!(k.columns(), &[2]);
        assert_eq!(k.big_n(), 2);
        let k = parse_carpet(r#"{"m":3,"n":4,"digits":[[3,1],[1,2],[1,4]]}"#).unwrap();
        assert_eq!(k.columns(), &[2, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        let e = parse_carpet(r#"{"m":8,"n":27,"columns":[0,3]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidColumns");
        let e = parse_carpet(r#"{"m":3,"n":3,"columns":[1]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidGrid");
        let e = parse_carpet(r#"{"m":2,"n":3,"columns":[1,1,1]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidColumns");
        let e = parse_carpet(r#"{"m":2,"n":3,"columns":[4]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidColumns");
        let e = parse_carpet(r#"{"m":2,"n":3,"digits":[[1,1],[1,1]]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidColumns");
        let e = parse_carpet(r#"{"m":2,"n":3}"#).unwrap_err();
        assert_eq!(e.code(), "MalformedInput");
        let e = parse_carpet("[1,2]").unwrap_err();
        assert_eq!(e.code(), "MalformedInput");
    }

    #[test]
    fn uniform_fibres() {
        assert!(c(2, 4, &[2, 2]).has_uniform_fibres());
        assert!(!c(8, 27, &[6, 3]).has_uniform_fibres());
        assert!(c(3, 5, &[1]).has_uniform_fibres());
    }

    #[test]
    fn closed_form_dimensions() {
        let k = c(8, 27, &[6, 3]);
        assert!((k.dim_hausdorff() - 0.7832279400651925).abs() < 1e-13);
        assert!((k.dim_box() - 0.7896900821428475).abs() < 1e-13);
        let k2 = c(8, 27, &[2, 2, 1, 1]);
        assert!((k.dim_hausdorff() - k2.dim_hausdorff()).abs() < 1e-12);
        let u = c(2, 4, &[2, 2]);
        assert!((u.dim_hausdorff() - 1.5).abs() < 1e-14);
        assert!((u.dim_box() - 1.5).abs() < 1e-14);
        assert!((c(2, 3, &[2, 1]).dim_box() - 1.36907).abs() < 5e-6);
    }

    #[test]
    fn t_bounds() {
        let k = c(8, 27, &[6, 3]);
        assert!((k.t_lower() - (6f64.ln() + 3f64.ln()) / 2.0).abs() < 1e-15);
        let h: f64 = -k.p().iter().map(|p| p * p.ln()).sum::<f64>();
        assert!((k.t_upper() - (9f64.ln() - h)).abs() < 1e-14);
        assert!(k.t_lower() < (9.0f64 / 2.0).ln() && (9.0f64 / 2.0).ln() < k.t_upper());
    }

    #[test]
    fn iterates() {
        let k = c(2, 4, &[2, 1]).iterate(2).unwrap();
        assert_eq!((k.m(), k.n(), k.big_n()), (4, 16, 9));
        let mut cols = k.columns().to_vec();
        cols.sort_unstable();
        assert_eq!(cols, vec![1, 2, 2, 4]);

        let base = c(8, 27, &[6, 3]);
        assert_eq!(base.iterate(1).unwrap(), base);
        let k = base.iterate(2).unwrap();
        assert_eq!((k.big_m(), k.big_n()), (4, 81));
        assert_eq!(k.summary(), &[(36, 1), (18, 2), (9, 1)]);
        assert_eq!(k.gamma(), base.gamma());

        assert_eq!(c(8, 27, &[6, 3]).iterate(40).unwrap_err().code(), "Overflow");
    }

    #[test]
    fn summary_invariants() {
        let k = c(32, 243, &[27, 3, 1, 3, 1, 27]);
        assert_eq!(k.summary(), &[(27, 2), (3, 2), (1, 2)]);
        let r: usize = k.summary().iter().map(|s| s.1).sum();
        assert_eq!(r, k.big_m());
    }

    fn carpet_strategy() -> impl Strategy<Value = Carpet> {
        (2u64..9, 1u64..8)
            .prop_flat_map(|(m, dn)| {
                let n = m + dn;
                (Just(m), Just(n), prop::collection::vec(1..=n, 1..=m as usize))
            })
            .prop_map(|(m, n, cols)| Carpet::new(m, n, cols).unwrap())
    }

    proptest! {
        #[test]
        fn hausdorff_below_box(k in carpet_strategy()) {
            let (h, b) = (k.dim_hausdorff(), k.dim_box());
            if k.has_uniform_fibres() {
                prop_assert!((h - b).abs() < 1e-12);
            } else {
                prop_assert!(h < b);
                prop_assert!(k.t_lower() < k.t_upper());
            }
        }

        #[test]
        fn json_round_trip(k in carpet_strategy()) {
            prop_assert_eq!(parse_carpet(&k.to_json()).unwrap(), k);
        }

        #[test]
        fn iterate_preserves_dimensions(k in carpet_strategy()) {
            if let Ok(k2) = k.iterate(2) {
                prop_assert_eq!(k2.gamma(), k.gamma());
                prop_assert!((k2.dim_hausdorff() - k.dim_hausdorff()).abs() < 1e-10);
                prop_assert!((k2.dim_box() - k.dim_box()).abs() < 1e-10);
            }
        }
    }
}
