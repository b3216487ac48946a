//! Floating-point evaluation of expression trees.

use super::expr::{FuncSym, ParamSym, SymExpr, Var};
use super::{differentiate, Result, SymError};
use num::ToPrimitive;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A bound function symbol: evaluates the k-th derivative at `s`.
pub trait BoundFunction: Send + Sync {
    fn eval(&self, order: u32, s: f64) -> f64;
}

impl<F> BoundFunction for F
where
    F: Fn(u32, f64) -> f64 + Send + Sync,
{
    fn eval(&self, order: u32, s: f64) -> f64 {
        self(order, s)
    }
}

/// Function/parameter bindings for numeric evaluation.
#[derive(Clone, Default)]
pub struct Bindings {
    funcs: BTreeMap<FuncSym, Arc<dyn BoundFunction>>,
    params: BTreeMap<ParamSym, f64>,
}

impl Bindings {
    pub fn none() -> Bindings {
        Bindings::default()
    }

    pub fn with_fn(mut self, sym: FuncSym, f: impl BoundFunction + 'static) -> Bindings {
        self.funcs.insert(sym, Arc::new(f));
        self
    }

    /// Bind a function symbol to a symbolic expression in `s` (and
    /// parameters already bound numerically elsewhere in `self`).
    /// Derivatives are precomputed symbolically up to `max_order`.
    pub fn with_expr_fn(self, sym: FuncSym, expr: &SymExpr, max_order: u32) -> Result<Bindings> {
        if expr.depends_on_t() {
            return Err(SymError::ReplacementDependsOnT);
        }
        let mut derivs = Vec::with_capacity(max_order as usize + 1);
        let mut cur = expr.clone();
        for _ in 0..=max_order {
            derivs.push(cur.clone());
            cur = differentiate(&cur, Var::S);
        }
        let params = self.params.clone();
        let table = ExprTable { derivs, params };
        Ok(self.with_fn(sym, table))
    }

    pub fn with_param(mut self, sym: ParamSym, value: f64) -> Bindings {
        self.params.insert(sym, value);
        self
    }

    pub fn func(&self, sym: FuncSym) -> Option<&Arc<dyn BoundFunction>> {
        self.funcs.get(&sym)
    }

    pub fn param(&self, sym: ParamSym) -> Option<f64> {
        self.params.get(&sym).copied()
    }
}

struct ExprTable {
    derivs: Vec<SymExpr>,
    params: BTreeMap<ParamSym, f64>,
}

impl BoundFunction for ExprTable {
    fn eval(&self, order: u32, s: f64) -> f64 {
        let e = match self.derivs.get(order as usize) {
            Some(e) => e.clone(),
            None => {
                let mut cur = self.derivs.last().expect("nonempty").clone();
                for _ in self.derivs.len()..=order as usize {
                    cur = differentiate(&cur, Var::S);
                }
                cur
            }
        };
        let mut b = Bindings::none();
        b.params = self.params.clone();
        eval(&e, s, 0.0, &b).unwrap_or(f64::NAN)
    }
}

/// Evaluate `e` at `(s, t)` under `bindings`.
pub fn eval(e: &SymExpr, s: f64, t: f64, bindings: &Bindings) -> Result<f64> {
    let v = eval_inner(e, s, t, bindings)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SymError::NonFinite)
    }
}

fn eval_inner(e: &SymExpr, s: f64, t: f64, b: &Bindings) -> Result<f64> {
    Ok(match e {
        SymExpr::Rational(q) => q.to_f64().ok_or(SymError::NonFinite)?,
        SymExpr::Variable(Var::S) => s,
        SymExpr::Variable(Var::T) => t,
        SymExpr::Func(f, k) => match b.func(*f) {
            Some(bf) => bf.eval(*k, s),
            None => return Err(SymError::MissingBinding(format!("{f}"))),
        },
        SymExpr::Param(p) => match b.param(*p) {
            Some(v) => v,
            None => return Err(SymError::MissingBinding(p.name().into())),
        },
        SymExpr::Sum(terms) => {
            let mut acc = 0.0;
            for term in terms {
                acc += eval_inner(term, s, t, b)?;
            }
            acc
        }
        SymExpr::Product(factors) => {
            let mut acc = 1.0;
            for factor in factors {
                acc *= eval_inner(factor, s, t, b)?;
            }
            acc
        }
        SymExpr::Pow(base, n) => {
            let v = eval_inner(base, s, t, b)?;
            if *n < 0 && v == 0.0 {
                return Err(SymError::Singularity);
            }
            v.powi(*n as i32)
        }
        SymExpr::Quotient(num, den) => {
            let d = eval_inner(den, s, t, b)?;
            if d == 0.0 {
                return Err(SymError::Singularity);
            }
            eval_inner(num, s, t, b)? / d
        }
        SymExpr::Sin(n) => (*n as f64 * t).sin(),
        SymExpr::Cos(n) => (*n as f64 * t).cos(),
        SymExpr::Exp(u) => eval_inner(u, s, t, b)?.exp(),
        SymExpr::Log(u) => {
            let v = eval_inner(u, s, t, b)?;
            if v <= 0.0 {
                return Err(SymError::Domain(format!("log of non-positive value {v}")));
            }
            v.ln()
        }
        SymExpr::Abs(u) => eval_inner(u, s, t, b)?.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn eval_basics() {
        let b = Bindings::none();
        let e = parse("sin(2*t)").unwrap();
        let v = eval(&e, 0.0, std::f64::consts::FRAC_PI_4, &b).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_with_function_bindings() {
        let b = Bindings::none().with_fn(FuncSym::R, |k: u32, _s: f64| if k == 0 { 2.0 } else { 0.0 });
        let e = parse("r^6/16").unwrap();
        assert_eq!(eval(&e, 0.3, 0.0, &b).unwrap(), 4.0);
    }

    #[test]
    fn eval_expr_bound_function() {
        // a(s) = lambda - log(s + mu) with lambda = 0, mu = 1
        let sol = parse("lambda - log(s + mu)").unwrap();
        let b = Bindings::none()
            .with_param(ParamSym::Lambda, 0.0)
            .with_param(ParamSym::Mu, 1.0)
            .with_expr_fn(FuncSym::A, &sol, 2)
            .unwrap();
        let res = parse("a'' - a'^2").unwrap();
        let v = eval(&res, 1.0, 0.0, &b).unwrap();
        assert!(v.abs() < 1e-15, "residual {v}");
    }

    #[test]
    fn eval_errors() {
        let b = Bindings::none();
        assert!(matches!(
            eval(&parse("1/(s - s)").unwrap(), 1.0, 0.0, &b),
            Err(SymError::Singularity)
        ));
        assert!(matches!(
            eval(&parse("log(s)").unwrap(), -1.0, 0.0, &b),
            Err(SymError::Domain(_))
        ));
        assert!(matches!(
            eval(&parse("a").unwrap(), 0.0, 0.0, &b),
            Err(SymError::MissingBinding(_))
        ));
    }
}
