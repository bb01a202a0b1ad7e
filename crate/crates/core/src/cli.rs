//! Command-line front end writing CSV and JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::carpet::{parse_carpet, Carpet};
use crate::equiv::full_report;
use crate::error::Error;
use crate::grid::{check_theta_grid, interior, parse_list, parse_range};
use crate::interdim::{curve_with, dim_theta_with, DimOptions, DEFAULT_MAX_L};
use crate::multifractal::{alpha_range, spectrum};
use crate::oracle::{
    approx_square_count, psi_sum, psi_sum_auto, psi_sum_by_types, tail_count,
    two_scale_cost_exponent, type_bounds_check, type_classes, Alphabet, Side,
};
use crate::rate::RateContext;

pub const THREADS_ENV: &str = "CARPET_DIMS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "carpet-dims",
    version,
    about = "Intermediate dimensions of Bedford-McMullen carpets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// dim_theta at a single theta
    Dim {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long = "max-L", default_value_t = DEFAULT_MAX_L)]
        max_l: usize,
    },
    /// dim_theta over a grid of theta
    Curve {
        #[arg(long)]
        carpet: PathBuf,
        #[command(flatten)]
        grid: ThetaGrid,
        #[arg(long = "max-L", default_value_t = DEFAULT_MAX_L)]
        max_l: usize,
    },
    /// Rate function I(t) and I'(t)
    Rate {
        #[arg(long)]
        carpet: PathBuf,
        /// Grid `start:stop:step`; defaults to interior points of (t_lower, t_upper)
        #[arg(long, conflicts_with = "ts_list")]
        ts: Option<String>,
        #[arg(long = "ts-list")]
        ts_list: Option<String>,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Multifractal spectrum f(alpha)
    Spectrum {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long, conflicts_with = "alphas_list")]
        alphas: Option<String>,
        #[arg(long = "alphas-list")]
        alphas_list: Option<String>,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Equivalence report for two carpets
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Method-of-types oracles
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Canonical JSON with derived constants
    Info {
        #[arg(long)]
        carpet: PathBuf,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ThetaGrid {
    /// Grid `start:stop:step`
    #[arg(long)]
    thetas: Option<String>,
    /// Comma-separated values
    #[arg(long = "thetas-list")]
    thetas_list: Option<String>,
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// ln Psi_J(s) for J = 1..=J
    Psi {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long = "J")]
        j: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, value_enum, default_value_t = PsiMethod::Auto)]
        method: PsiMethod,
    },
    /// Exact tail count of words by average ln N
    Tail {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long = "J")]
        j: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Above)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = AlphabetArg::Columns)]
        alphabet: AlphabetArg,
    },
    /// Type-class bound check
    Bounds {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "J")]
        j: usize,
    },
    /// Approximate-square counts for K = 0..=K
    Squares {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long = "K")]
        k: usize,
    },
    /// Per-K exponent of the two-scale cover cost
    Twoscale {
        #[arg(long)]
        carpet: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        s: f64,
        #[arg(long = "J")]
        j: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PsiMethod {
    Auto,
    Enum,
    Types,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Above,
    Below,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlphabetArg {
    Columns,
    Maps,
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("write failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Format with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn error_json(e: &Error) -> String {
    json!({"error": e.code(), "detail": e.to_string()}).to_string()
}

fn load(path: &Path) -> CliResult<Carpet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_carpet(&text)?)
}

fn grid_from(range: &Option<String>, list: &Option<String>) -> CliResult<Option<Vec<f64>>> {
    let parsed = match (range, list) {
        (Some(r), _) => Some(parse_range(r)),
        (None, Some(l)) => Some(parse_list(l)),
        (None, None) => None,
    };
    parsed
        .transpose()
        .map_err(|e| Failure::Usage(e.to_string()))
}

/// Size the global thread pool from `CARPET_DIMS_THREADS`, if set.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Run the command line `args` (including the program name); returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "{}", error_json(&e));
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Dim {
            carpet,
            theta,
            max_l,
        } => {
            let c = load(&carpet)?;
            let opts = DimOptions {
                max_l,
                window: None,
            };
            let r = dim_theta_with(&c, theta, &opts)?;
            writeln!(out, "theta,dim,L,residual")?;
            writeln!(
                out,
                "{},{},{},{}",
                fmt_num(r.theta),
                fmt_num(r.s),
                r.l,
                fmt_num(r.residual)
            )?;
            Ok(0)
        }
        Command::Curve {
            carpet,
            grid,
            max_l,
        } => {
            let c = load(&carpet)?;
            let thetas = grid_from(&grid.thetas, &grid.thetas_list)?.unwrap_or_default();
            check_theta_grid(&thetas)?;
            let opts = DimOptions {
                max_l,
                window: None,
            };
            writeln!(out, "theta,dim,L,t_L,residual")?;
            let mut code = 0;
            for (theta, r) in thetas.iter().zip(curve_with(&c, &thetas, &opts)) {
                match r {
                    Ok(r) => writeln!(
                        out,
                        "{},{},{},{},{}",
                        fmt_num(*theta),
                        fmt_num(r.s),
                        r.l,
                        fmt_opt(r.t_seq.last().copied()),
                        fmt_num(r.residual)
                    )?,
                    Err(e) => {
                        writeln!(out, "{},,,,", fmt_num(*theta))?;
                        writeln!(err, "{}", error_json(&e))?;
                        code = 1;
                    }
                }
            }
            Ok(code)
        }
        Command::Rate {
            carpet,
            ts,
            ts_list,
            points,
        } => {
            let c = load(&carpet)?;
            let rate = RateContext::new(&c)?;
            let grid = grid_from(&ts, &ts_list)?
                .unwrap_or_else(|| interior(c.t_lower(), c.t_upper(), points));
            writeln!(out, "t,I,I_prime")?;
            for t in grid {
                let (i, d) = rate.rate_and_deriv(t)?;
                writeln!(out, "{},{},{}", fmt_num(t), fmt_num(i), fmt_num(d))?;
            }
            Ok(0)
        }
        Command::Spectrum {
            carpet,
            alphas,
            alphas_list,
            points,
        } => {
            let c = load(&carpet)?;
            let grid = match grid_from(&alphas, &alphas_list)? {
                Some(g) => g,
                None => alpha_range(&c).interior_grid(points),
            };
            writeln!(out, "alpha,f")?;
            for a in grid {
                let s = spectrum(&c, a)?;
                writeln!(out, "{},{}", fmt_num(a), fmt_num(s.f))?;
            }
            Ok(0)
        }
        Command::Equiv { a, b } => {
            let (ca, cb) = (load(&a)?, load(&b)?);
            let report = full_report(&ca, &cb);
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(out, "{text}")?;
            Ok(0)
        }
        Command::Oracle(cmd) => oracle(cmd, out),
        Command::Info { carpet } => {
            let c = load(&carpet)?;
            let mut v = serde_json::to_value(&c).map_err(|e| Failure::Usage(e.to_string()))?;
            v["derived"] = json!({
                "M": c.big_m(),
                "N": c.big_n(),
                "gamma": c.gamma(),
                "t_lower": c.t_lower(),
                "t_upper": c.t_upper(),
                "t_max": c.t_max(),
                "t_min": c.t_min(),
                "dim_hausdorff": c.dim_hausdorff(),
                "dim_box": c.dim_box(),
                "uniform_fibres": c.has_uniform_fibres(),
                "multiset_summary": {
                    "M0": c.distinct_counts(),
                    "values": c.summary().iter().map(|s| s.0).collect::<Vec<_>>(),
                    "multiplicities": c.summary().iter().map(|s| s.1).collect::<Vec<_>>(),
                },
            });
            writeln!(out, "{v}")?;
            Ok(0)
        }
    }
}

fn oracle(cmd: OracleCommand, out: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        OracleCommand::Psi {
            carpet,
            j,
            s,
            method,
        } => {
            let c = load(&carpet)?;
            writeln!(out, "J,value,analytic_target,gap")?;
            for jj in 1..=j {
                let r = match method {
                    PsiMethod::Auto => psi_sum_auto(&c, jj, s)?,
                    PsiMethod::Enum => psi_sum(&c, jj, s)?,
                    PsiMethod::Types => psi_sum_by_types(&c, jj, s)?,
                };
                writeln!(
                    out,
                    "{},{},{},{}",
                    jj,
                    fmt_num(r.value),
                    fmt_opt(r.analytic_target),
                    fmt_opt(r.gap)
                )?;
            }
            Ok(0)
        }
        OracleCommand::Tail {
            carpet,
            j,
            t,
            side,
            alphabet,
        } => {
            let c = load(&carpet)?;
            let (side, side_name) = match side {
                SideArg::Above => (Side::Above, "above"),
                SideArg::Below => (Side::Below, "below"),
            };
            let (alphabet, alpha_name) = match alphabet {
                AlphabetArg::Columns => (Alphabet::Columns, "columns"),
                AlphabetArg::Maps => (Alphabet::Maps, "maps"),
            };
            let count = tail_count(&c, j, t, side, alphabet)?;
            writeln!(out, "J,t,side,alphabet,count")?;
            writeln!(out, "{},{},{},{},{}", j, fmt_num(t), side_name, alpha_name, count)?;
            Ok(0)
        }
        OracleCommand::Bounds { m, j } => {
            if m == 0 || m > 4 || j > 30 {
                return Err(Error::DomainError(format!(
                    "bounds check needs 1 <= M <= 4 and J <= 30, got M={m}, J={j}"
                ))
                .into());
            }
            let holds = type_bounds_check(m, j);
            writeln!(out, "M,J,types,holds")?;
            writeln!(out, "{},{},{},{}", m, j, type_classes(m, j).len(), holds)?;
            Ok(0)
        }
        OracleCommand::Squares { carpet, k } => {
            let c = load(&carpet)?;
            writeln!(out, "K,count")?;
            for kk in 0..=k {
                writeln!(out, "{},{}", kk, approx_square_count(&c, kk)?)?;
            }
            Ok(0)
        }
        OracleCommand::Twoscale {
            carpet,
            theta,
            s,
            j,
        } => {
            let c = load(&carpet)?;
            let r = two_scale_cost_exponent(&c, theta, s, j)?;
            writeln!(out, "theta,s,J,K,exponent")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(theta),
                fmt_num(s),
                r.j,
                r.k,
                fmt_num(r.exponent)
            )?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(0.78322794006519), "0.783227940065");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_num(-2.25), "-2.25");
    }

    #[test]
    fn usage_errors() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["carpet-dims", "frobnicate"], &mut out, &mut err), 2);
        assert_eq!(run(["carpet-dims", "dim"], &mut out, &mut err), 2);
        let code = run(
            ["carpet-dims", "dim", "--carpet", "/nonexistent.json", "--theta", "0.5"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, 2);
        assert_eq!(run(["carpet-dims", "--help"], &mut out, &mut err), 0);
    }
}
