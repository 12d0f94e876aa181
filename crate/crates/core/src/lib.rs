//! p-adic distribution modules and their moment-interpolation criterion,
//! Clebsch-Gordan maps on symmetric-tensor coefficients, overconvergent
//! modular symbols with slope decompositions and Coleman-family extraction,
//! (phi, psi, Gamma)-operators with the big-logarithm on power-series
//! modules, and the geometric p-adic Rankin-Selberg L-value recipe with its
//! Euler and interpolation factors.

pub mod dist;
pub mod error;
pub mod ext;
pub mod linalg;
pub mod padic;
pub mod ring;
pub mod series;
pub mod tensor;
pub mod weight;

pub use error::{CoreError, Result};
pub use padic::PadicNumber;
pub use ring::Ring;
