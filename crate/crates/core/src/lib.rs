//! Wasserstein-2 projections in the convex order.
//!
//! * [`gauss`]: closed forms for centered Gaussian measures, with a projected
//!   gradient fallback in [`pgd`].
//! * [`one_dim`]: exact projections of finitely supported measures on the line.
//! * [`wot`]: the barycentric weak-transport problem for finitely supported
//!   measures in any dimension.

pub mod bures;
pub mod error;
pub mod gauss;
pub mod linalg;
pub mod measure;
pub mod one_dim;
pub mod pgd;
pub mod transport;
pub mod wot;

pub use bures::{bw2, bw2_gradient, centered_w2, gaussian_w2, GaussianMeasure, GaussianSpec};
pub use error::{Error, Result};
pub use gauss::{
    dominance_check, find_order_transform, is_j_unique, project_i, project_j, Dominance, GaussOptions, Method,
    OrderTransform, ProjectionResult, Solver,
};
pub use linalg::{CorrelationMatrix, Matrix, OrthogonalMatrix, SpdMatrix, SymMatrix, Tolerances, Vector};
pub use pgd::{PgdConfig, PgdTrace, StepRule};
pub use measure::DiscreteMeasure;
pub use one_dim::{g_function, lower_convex_hull, project_1d, quantile_of, GFunction, QuantileFunction};
pub use wot::{
    barycentric_pushforward, check_convex_order_1d, lp_oracle, solve_wot, wasserstein2_discrete, wot_objective, Coupling,
    FwVariant, WotConfig, WotSolution,
};
