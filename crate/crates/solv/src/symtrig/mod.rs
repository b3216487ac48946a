//! Exact symbolic engine over the variables `s`, `t` and the function
//! symbols `a(s)`, `b(s)`, `r(s)`.
//!
//! Expressions are immutable trees ([`SymExpr`]). [`normalize`] rewrites a
//! tree into a canonical rational form in which an identically-zero
//! expression becomes the literal zero node; products of `sin(nt)` and
//! `cos(nt)` are linearized into the Fourier basis by product-to-sum
//! identities, and rational arithmetic is exact (arbitrary precision).
//!
//! [`to_fourier`] and [`to_quasipoly`] clear denominators by the minimal
//! power of the common denominator and return exact coefficient forms.

mod canon;
mod deriv;
mod div;
mod eval;
mod expr;
mod forms;
mod parse;
mod subst;

pub use eval::{eval, BoundFunction, Bindings};
pub use expr::{FuncSym, ParamSym, SymExpr, Var};
pub use forms::{to_fourier, to_quasipoly, ContentSplit, FourierForm, QuasiPolyForm};
pub use parse::parse;
pub use subst::substitute;



use thiserror::Error;

/// Exact rational scalar used throughout the symbolic layer.
pub type Rat = num::BigRational;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SymError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdent { pos: usize, name: String },
    #[error("division by an expression that normalizes to zero")]
    ZeroDenominator,
    #[error("expression is not reducible to the requested form: offending part `{0}`")]
    Form(String),
    #[error("substitution replacement depends on t")]
    ReplacementDependsOnT,
    #[error("missing binding for {0}")]
    MissingBinding(String),
    #[error("evaluation hit a singularity (vanishing denominator)")]
    Singularity,
    #[error("evaluation left the real domain: {0}")]
    Domain(String),
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, SymError>;

/// Rewrites `e` into canonical form. Idempotent; an expression equal to
/// zero normalizes to the literal zero node.
pub fn normalize(e: &SymExpr) -> Result<SymExpr> {
    Ok(canon::canonicalize(e)?.to_expr())
}

/// Exact symbolic derivative with respect to `var`.
pub fn differentiate(e: &SymExpr, var: Var) -> SymExpr {
    deriv::differentiate(e, var)
}

/// True iff `e` normalizes to the zero node.
pub fn is_zero(e: &SymExpr) -> Result<bool> {
    Ok(canon::canonicalize(e)?.is_zero())
}

/// If `e == u * target` for a single multiplicative unit `u` (a rational
/// multiple of a power product of atoms and an exponential factor),
/// returns `u` in normalized form. Used for "nonzero multiple of"
/// structure checks.
pub fn proportional_unit(e: &SymExpr, target: &SymExpr) -> Result<Option<SymExpr>> {
    canon::proportional_unit(e, target)
}
