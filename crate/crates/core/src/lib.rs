//! Normalization constants of exponential random graph models, with and
//! without an edge-density constraint.
//!
//! For a model with motifs `H_1 = K₂, H_2, …, H_s` and parameters `ζ` on `N`
//! labeled vertices,
//!
//! ```text
//! ψ_N^ζ       = N^{-2} log Σ_G exp(N² Σ_i ζ_i t(H_i, G))
//! ψ^{e,ζ}_{N,t} = N^{-2} log Σ_{G : |e(G) − e| ≤ t} exp(N² Σ_i ζ_i t(H_i, G))
//! ```
//!
//! where `t(H, G)` is the homomorphism density and `e(G) = t(K₂, G)`.
//!
//! * [`exact`] enumerates all graphs for `N ≤ 8`.
//! * [`variational`] solves the limiting scalar problem and builds error
//!   envelopes around it.
//! * [`mcmc`] samples the constrained measure and estimates `ψ^{e,ζ}_{N,t}`
//!   by thermodynamic integration for larger `N`.
//! * [`nld`] evaluates the explicit nonlinear-large-deviation bound terms and
//!   brute-force hypercube oracles.
//! * [`motif_poly`] evaluates the polynomial extension `T(x)` of
//!   `N² t(H, ·)` and its derivatives.
//!
//! ```
//! use cergm::{psi_cond_exact, ConstraintSpec, ExactOptions, ModelSpec};
//!
//! let model = ModelSpec::edge_only(3, 0.0)?
//!     .with_constraint(ConstraintSpec::new(1.0 / 3.0, 0.12)?);
//! let psi = psi_cond_exact(&model, &ExactOptions::default())?;
//! assert!((psi - 6f64.ln() / 9.0).abs() < 1e-15);
//! # Ok::<(), cergm::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod graph;
pub mod mcmc;
pub mod motif_poly;
pub mod nld;
pub mod numerics;
pub mod variational;

pub use error::{Error, Result};
pub use exact::{
    cond_prob_mass, enumerate_exact, expectation_exact, psi_cond_exact, psi_exact,
    truncated_binomial_psi, ExactOptions, ExactTable, ModelSpec,
};
pub use graph::{edge_density, hom_count, hom_density, GraphMotif, SimpleGraph};
pub use mcmc::{run_chain, thermo_integrate, ChainConfig, ChainStats, TiEstimate};
pub use motif_poly::{t_derivative_bounds, t_eval, t_grad, t_hess, EdgeVars, TDerivativeBounds};
pub use nld::{main1_lower_bound, main1_terms, Main1Report, SupNormProfile};
pub use variational::{
    entropy_scalar, solve_constrained_scalar, special_envelope, ConstraintSpec, Envelope,
    ScalarModel, VariationalSolution,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/variational.md")]
    mod variational {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
}
