//! Integral points on integral Weierstrass models through flattened binary
//! quartic forms: the point/quartic correspondence, the projective
//! transforms relating flattened forms, discriminant-based fibre bounds and
//! family sweeps ordered by naive height.

pub mod arith;
pub mod curve;
pub mod fibre;
pub mod mordell;
pub mod quartic;
pub mod store;
pub mod sweep;

pub use mordell::{IntegralPoint, MordellError, WeierstrassCurve};
pub use quartic::{BinaryQuartic, Invariants, ProjectiveTransform, QuarticError};
