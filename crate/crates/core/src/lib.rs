//! Densities, sampling and likelihood fitting for nested Archimedean copulas.
//!
//! The density of a nested structure is evaluated as a polynomial contraction:
//! every child node contributes the coefficients of its inner generator
//! derivatives (a polynomial in the root frailty), the root multiplies these
//! polynomials and contracts the product with its own generator derivatives.
//! All intermediate quantities are kept in signed log space, so the
//! log-density stays finite where the density itself over- or underflows.
//!
//! ```
//! use nacopula::{log_density, NacTree};
//!
//! let tree: NacTree = "G(1.3333; 1, G(2; 2, 3))".parse().unwrap();
//! let ld = log_density(&tree, &[0.3, 0.5, 0.7]).unwrap();
//! assert!(ld.value.is_finite());
//! ```

pub mod combinatorics;
pub mod density;
pub mod dsl;
pub mod error;
pub mod generators;
pub mod inner_coeffs;
pub mod mle;
pub mod oracle;
pub mod sampling;
pub mod signed_log;
pub mod specialized;
pub mod stats;
pub mod three_level;
pub mod tree;

pub use density::{cdf, log_density, logpdf2, pdf2, CdfEval, LogDensity};
pub use dsl::parse;
pub use error::{Error, Result};
pub use generators::{Family, GeneratorSpec, TiltBase};
pub use inner_coeffs::{CoeffMethod, CoeffTable, NodePair};
pub use mle::{fit2, grid_scan, nll, FitResult, GridScan};
pub use sampling::{sample_nested, SampleMatrix};
pub use signed_log::{Approx, SignedLog};
pub use three_level::logpdf3;
pub use tree::{NacChild, NacTree};
