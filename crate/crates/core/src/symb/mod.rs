//! Overconvergent modular symbols: Manin presentation, coefficient actions,
//! symbol-space assembly with Hecke operators and slope decompositions, and
//! eigenform bookkeeping (p-stabilisation, nobility, Coleman-family fits).

pub mod coeff;
pub mod eigen;
pub mod manin;
pub mod space;
