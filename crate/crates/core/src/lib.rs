//! Finite Fourier cosine and sine transforms of positive densities on (0, 1).
//!
//! The crate evaluates `U(x) = ∫ f(t) cos xt dt` and `V(x) = ∫ f(t) sin xt dt`
//! (plus derivatives and reflected variants), locates and certifies their
//! positive zeros, and checks classical zero-distribution and positivity
//! statements against parameter families of densities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod density;
pub mod error;
pub mod hypergeom;
pub mod partial_fractions;
pub mod quad;
pub mod sum;
pub mod transform;
pub mod zeros;

pub use density::{reflect, shape_report, Breakpoint, Convexity, Density, Family, Monotonicity, ShapeReport};
pub use error::{Error, Result};
pub use transform::{closed_form, eval, EvalResult, Method, TransformKind, DEFAULT_TOL};
