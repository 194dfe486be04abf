//! Constructive gauge calculus for (0,1)-connection data on finite
//! resolutions over a ball in ℂⁿ.
//!
//! The crate has two coefficient backends behind one interface — exact
//! truncated power series with rational coefficients, and sampled polar grids
//! on the disk — and builds on them:
//!
//! * [`form`]: the exterior algebra of matrix-valued (0,q)-forms with ∂̄;
//! * [`resolution`]: indexed connection data ω^{s,k} / gauge parameters
//!   η^{s,k} on a length-m resolution, with the integrability checker;
//! * [`recalibration`]: the parameter semigroup, the recalibration action and
//!   its closed-form expansion;
//! * [`holder`]: scale-invariant weighted Hölder norms and the weight
//!   sequence S_k;
//! * [`koppelman`]: the solid Cauchy transform on the disk, its scaling
//!   conjugation and the homotopy-formula diagnostics;
//! * [`solver`]: the rapid-convergence iteration that gauges the connection
//!   forms of an integrable input to zero, producing holomorphic frames.

pub mod coeff;
pub mod error;
pub mod form;
pub mod grid;
pub mod holder;
pub mod koppelman;
pub mod recalibration;
pub mod resolution;
pub mod series;
pub mod solver;
pub mod suite;
pub mod testgen;

pub use coeff::{CRat, Coeff};
pub use error::{Error, Result};
pub use form::MatrixForm;
pub use grid::{GridCoeff, GridCtx, GridSpec};
pub use resolution::{AugmentedData, ConnectionData, GaugeParam};
pub use series::{SeriesCoeff, SeriesCtx};
