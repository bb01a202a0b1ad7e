//! Intermediate dimensions of Bedford-McMullen carpets, computed exactly from
//! a large-deviations rate function, with multifractal spectra, equivalence
//! tests and method-of-types oracles.

pub mod carpet;
pub mod cli;
pub mod equiv;
pub mod error;
pub mod grid;
pub mod interdim;
pub mod multifractal;
pub mod oracle;
pub mod rate;

pub use carpet::{parse_carpet, Carpet};
pub use equiv::{full_report, EquivalenceReport, GridRelation};
pub use error::{Error, Result};
pub use interdim::{derivative_at, dim_theta, DimOptions, DimResult, PhaseTransition};
pub use multifractal::{AlphaRange, SpectrumSample};
pub use oracle::{TypeClass, TypeOracleResult};
pub use rate::{entropy, kl_divergence, RateContext, TiltedVector};
