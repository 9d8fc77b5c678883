//! Heckman–Opdam hypergeometric functions for `BC_n` root systems, the
//! `χ_l`-spherical functions of `G/K` with `G/K` Hermitian, and the
//! associated spherical transform on the compact dual.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod hypergeom;
pub mod jacobi;
pub mod par;
pub mod quadrature;
pub mod rank1;
pub mod rootdata;
pub mod special;
pub mod suite;
pub mod transform;
pub mod weights;

pub use error::{Error, Result};
pub use hypergeom::{f_eval, FEval, SeriesConfig, SpectralParam, TubePoint};
pub use jacobi::{eta_eval, phi_spherical, psi_spherical, Backend, SphericalFunction};
pub use rootdata::{build_root_system, Case, Multiplicity, RootDatum, ShiftSign};
pub use transform::{forward_transform, inner_product, synthesize, SampledSection};
pub use weights::DominantWeight;
