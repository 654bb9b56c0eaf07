//! Numerical toolkit for the `p`-angular dilatation of planar maps of the
//! unit disc.
//!
//! The crate evaluates the dilatation functionals of a map given in polar
//! form, checks the length-area inequalities they satisfy along a ladder of
//! radii shrinking to the origin, and solves the rotationally symmetric
//! nonlinear Beltrami equation `f_r = σ |f_θ|^m f_θ`.
//!
//! Module map:
//! - [`mapping`]: maps, partial derivatives, Jacobian, example catalog.
//! - [`functionals`]: `D_p`, circular and disc means, area, length and the
//!   radial integrals.
//! - [`verifier`]: inequality checks, limit proxies and bound reports.
//! - [`beltrami`]: coefficients, radial solver, residuals and the
//!   Cartesian form of the equation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beltrami;
pub mod error;
pub mod functionals;
pub mod mapping;
pub mod quadrature;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
pub use functionals::{DilatationOrder, DiscMean, GridKind, QuadratureConfig, TruncatedIntegral};
pub use mapping::{CatalogMap, MappingModel, Partials, PolarPoint};
pub use series::RadialSeries;
pub use verifier::{BoundReport, LimitProxy, RadiusLadder};
