//! Propagation of Dempster-Shafer belief structures on closed intervals
//! through nonlinear scalar functions.
//!
//! The pipeline quantifies the function over each focal-element box with a
//! tensor Legendre polynomial-chaos surrogate, converts the surrogate to
//! power form, and bounds its range with Bernstein coefficients computed by
//! Garloff's method, optionally tightened by uniform box subdivision. A
//! natural-interval-arithmetic baseline and a deterministic grid+refinement
//! oracle are provided for comparison.
//!
//! Modules:
//! - [`interval`]: closed real intervals and their natural arithmetic;
//! - [`expr`]: expression parsing and point/interval evaluation;
//! - [`evidence`]: Dempster-Shafer structures, combination rules, p-box curves;
//! - [`chaos`]: Legendre basis, Gauss-Legendre quadrature, non-intrusive projection;
//! - [`bernstein`]: basis conversion, Garloff coefficients, range enclosure;
//! - [`propagate`]: end-to-end mapping of DS structures through a function.

pub mod bernstein;
pub mod chaos;
pub mod evidence;
pub mod expr;
pub mod interval;
pub mod multi_index;
pub mod propagate;

pub use evidence::DsStructure;
pub use expr::ExprAst;
pub use interval::Interval;
pub use multi_index::MultiIndex;
