//! Exact arithmetic for counting distinct radical fields `Q(F(n)^(1/e))`
//! along the fibers of a superelliptic curve `y^e = F(t)` whose roots are all
//! rational.
//!
//! Modules, bottom-up:
//!
//! - [`poly`]: polynomials given by rational roots, their normalization and
//!   local invariants (`lambda`, `delta`, `S0`, `ell0`, `U`, `V`);
//! - [`padic`]: valuations, factorizations of polynomial values and the
//!   root localizer;
//! - [`sieve`]: (S, ell)-square-free classification with explicit bounds;
//! - [`fields`]: S-equality classes and ramification certificates;
//! - [`pipeline`]: the end-to-end count and its reports.

pub mod error;
pub mod fields;
pub mod padic;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod sieve;

pub use error::{Error, Result};
pub use fields::{
    certify_classes, count_distinct_lower, fields_distinct, quadratic_field_key, s_equal, s_free_kernel, ClassCount,
    DistinctnessCertificate, FieldValue, SClassKey,
};
pub use padic::{factor_integer, factor_value, hensel_locate, ord, Factorization, HenselCertificate, Valuation};
pub use pipeline::{effective_constant, emit_report, prepare, run_superelliptic, CountReport, Prepared, RunConfig};
pub use poly::{
    delta_at, expand, invariants, lambda_at, parse_factored_poly, radical_kernel, reduce_multiplicities,
    scale_to_integer, FactoredPoly, IntPoly, PolyInvariants,
};
pub use report::OutputFormat;
pub use sieve::{
    choose_parameters, classify_range, is_s_ell_squarefree, paper_bound, zeta_upper, ChosenParameters, SieveParams,
    SieveReport,
};
