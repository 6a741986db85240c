//! Newform coefficients, the symmetric-square series and its L-values.

pub mod audit;
pub mod curves;
pub mod lvalue;
pub mod params;
pub mod table;

pub use params::ParameterBox;
pub use table::{load_coefficients, CoefficientTable, Normalization};
