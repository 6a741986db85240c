//! Oscillatory integrals: quadrature, stationary phase, Bessel kernels and
//! Mellin transforms.

pub mod bessel;
pub mod bump;
pub mod mellin;
pub mod quadrature;
pub mod series;
pub mod stationary;
pub mod threefold;

pub use bessel::{bessel_j, bessel_split, bessel_y, BesselSplit};
pub use bump::{canonical_bump, Bump, Plateau, SharpCutoff, Smooth, WeightSpec};
pub use mellin::{mellin_transform, MellinPair};
pub use quadrature::{integrate, oscillatory_quadrature, GaussLegendre, QuadResult, QuadratureConfig};
pub use stationary::{
    phase_stationary_point, stationary_phase_main, Branch, Phase, PhaseContext, PhaseSpec,
    QuadraticPhase, StationaryPoint,
};
pub use threefold::{integral_i, Localization, ThreefoldIntegral, ThreefoldOptions};
