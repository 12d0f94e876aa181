//! Crate-wide error type. Every error names enough context for the CLI to
//! attribute it to the module and operation that raised it.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("division by zero (or by a non-unit at this precision)")]
    DivisionByZero,
    #[error("precision exhausted: result carries no correct digits")]
    PrecisionExhausted,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient moments: {0}")]
    InsufficientMoments(String),
    #[error("compatibility violated at (n={n}, j={j}, coset a={a})")]
    TableCompatibility { n: usize, j: usize, a: u64 },
    #[error("growth criterion violated at level n={0}")]
    GrowthViolation(usize),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("monoid violation: {0}")]
    MonoidViolation(String),
    #[error("divisibility precondition fails at integer weight {0}")]
    NablaDivisibility(i64),
    #[error("disc is not m-accessible: {0}")]
    NotAccessible(String),
    #[error("mismatched weight discs")]
    DiscMismatch,
    #[error("ambiguous slope split: lambda = {0} falls on a Newton-polygon break")]
    SlopeBreak(String),
    #[error("ramified-stabilisation-unsupported: Hecke-polynomial discriminant has odd valuation")]
    RamifiedStabilisation,
    #[error("eigensystem not isolated at working precision: {0}")]
    EigensystemNotIsolated(String),
    #[error("echelon instability: {0}")]
    EchelonInstability(String),
    #[error("pole: point evaluation refused at a simple pole ({0})")]
    Pole(String),
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("psi(f) is not 0 within precision")]
    PsiNotZero,
    #[error("alpha - 1 zero-divisor flag unset (alpha = 1 within precision)")]
    AlphaOne,
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
