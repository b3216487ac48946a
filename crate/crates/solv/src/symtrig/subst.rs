//! Function-symbol substitution.

use super::expr::{FuncSym, SymExpr, Var};
use super::{differentiate, normalize, Result, SymError};
use std::sync::Arc;

/// Replace the function symbol `sym` (and all its derivative nodes) by
/// the corresponding derivatives of `replacement`, then normalize.
/// The replacement must depend on `s` only.
pub fn substitute(e: &SymExpr, sym: FuncSym, replacement: &SymExpr) -> Result<SymExpr> {
    if replacement.depends_on_t() {
        return Err(SymError::ReplacementDependsOnT);
    }
    let max_order = e.max_order(sym).unwrap_or(0);
    let mut derivs = Vec::with_capacity(max_order as usize + 1);
    let mut cur = replacement.clone();
    for _ in 0..=max_order {
        derivs.push(cur.clone());
        cur = differentiate(&cur, Var::S);
    }
    let replaced = walk(e, sym, &derivs);
    normalize(&replaced)
}

/// Substitute without normalizing (used where the caller composes
/// several substitutions before one final normalization).
pub(crate) fn substitute_raw(e: &SymExpr, sym: FuncSym, replacement: &SymExpr) -> Result<SymExpr> {
    if replacement.depends_on_t() {
        return Err(SymError::ReplacementDependsOnT);
    }
    let max_order = e.max_order(sym).unwrap_or(0);
    let mut derivs = Vec::with_capacity(max_order as usize + 1);
    let mut cur = replacement.clone();
    for _ in 0..=max_order {
        derivs.push(cur.clone());
        cur = differentiate(&cur, Var::S);
    }
    Ok(walk(e, sym, &derivs))
}

fn walk(e: &SymExpr, sym: FuncSym, derivs: &[SymExpr]) -> SymExpr {
    match e {
        SymExpr::Func(f, k) if *f == sym => derivs[*k as usize].clone(),
        SymExpr::Sum(v) => SymExpr::Sum(v.iter().map(|x| walk(x, sym, derivs)).collect()),
        SymExpr::Product(v) => SymExpr::Product(v.iter().map(|x| walk(x, sym, derivs)).collect()),
        SymExpr::Pow(b, n) => SymExpr::Pow(Arc::new(walk(b, sym, derivs)), *n),
        SymExpr::Quotient(n, d) => SymExpr::Quotient(
            Arc::new(walk(n, sym, derivs)),
            Arc::new(walk(d, sym, derivs)),
        ),
        SymExpr::Exp(u) => SymExpr::Exp(Arc::new(walk(u, sym, derivs))),
        SymExpr::Log(u) => SymExpr::Log(Arc::new(walk(u, sym, derivs))),
        SymExpr::Abs(u) => SymExpr::Abs(Arc::new(walk(u, sym, derivs))),
        other => other.clone(),
    }
}
