//! Symbolic differentiation on expression trees.

use super::expr::{SymExpr, Var};

/// Exact derivative of `e` with respect to `var`. Function symbols
/// increment their derivative order in `s` and are constant in `t`;
/// `abs` is transparent away from zero: `d abs(u) = u u' / abs(u)`.
pub(crate) fn differentiate(e: &SymExpr, var: Var) -> SymExpr {
    match e {
        SymExpr::Rational(_) | SymExpr::Param(_) => SymExpr::zero(),
        SymExpr::Variable(v) => {
            if *v == var {
                SymExpr::one()
            } else {
                SymExpr::zero()
            }
        }
        SymExpr::Func(f, k) => {
            if var == Var::S {
                SymExpr::Func(*f, k + 1)
            } else {
                SymExpr::zero()
            }
        }
        SymExpr::Sin(n) => {
            if var == Var::T {
                SymExpr::mul(vec![SymExpr::int(*n as i64), SymExpr::Cos(*n)])
            } else {
                SymExpr::zero()
            }
        }
        SymExpr::Cos(n) => {
            if var == Var::T {
                SymExpr::mul(vec![SymExpr::int(-(*n as i64)), SymExpr::Sin(*n)])
            } else {
                SymExpr::zero()
            }
        }
        SymExpr::Sum(terms) => {
            let parts: Vec<SymExpr> = terms
                .iter()
                .map(|t| differentiate(t, var))
                .filter(|d| !d.is_zero_literal())
                .collect();
            SymExpr::add(parts)
        }
        SymExpr::Product(factors) => {
            let mut parts = Vec::new();
            for (i, fi) in factors.iter().enumerate() {
                let dfi = differentiate(fi, var);
                if dfi.is_zero_literal() {
                    continue;
                }
                let mut term = Vec::with_capacity(factors.len());
                for (j, fj) in factors.iter().enumerate() {
                    term.push(if i == j { dfi.clone() } else { fj.clone() });
                }
                parts.push(SymExpr::mul(term));
            }
            SymExpr::add(parts)
        }
        SymExpr::Pow(base, n) => {
            if *n == 0 {
                return SymExpr::zero();
            }
            let db = differentiate(base, var);
            if db.is_zero_literal() {
                return SymExpr::zero();
            }
            SymExpr::mul(vec![
                SymExpr::int(*n),
                (**base).clone().pow(n - 1),
                db,
            ])
        }
        SymExpr::Quotient(num, den) => {
            let dn = differentiate(num, var);
            let dd = differentiate(den, var);
            if dd.is_zero_literal() {
                return SymExpr::div(dn, (**den).clone());
            }
            let top = SymExpr::sub(
                SymExpr::mul(vec![dn, (**den).clone()]),
                SymExpr::mul(vec![(**num).clone(), dd]),
            );
            SymExpr::div(top, (**den).clone().pow(2))
        }
        SymExpr::Exp(u) => {
            let du = differentiate(u, var);
            if du.is_zero_literal() {
                return SymExpr::zero();
            }
            SymExpr::mul(vec![du, e.clone()])
        }
        SymExpr::Log(u) => {
            let du = differentiate(u, var);
            if du.is_zero_literal() {
                return SymExpr::zero();
            }
            SymExpr::div(du, (**u).clone())
        }
        SymExpr::Abs(u) => {
            let du = differentiate(u, var);
            if du.is_zero_literal() {
                return SymExpr::zero();
            }
            SymExpr::div(
                SymExpr::mul(vec![(**u).clone(), du]),
                (**u).clone().abs(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{normalize, parse};
    use super::*;

    fn d(src: &str, var: Var) -> String {
        normalize(&differentiate(&parse(src).unwrap(), var))
            .unwrap()
            .to_string()
    }

    #[test]
    fn basic_rules() {
        assert_eq!(d("sin(t)", Var::T), "cos(t)");
        assert_eq!(d("a", Var::S), "a'");
        assert_eq!(d("a", Var::T), "0");
        assert_eq!(d("s*t", Var::S), "t");
        assert_eq!(d("exp(2*s)", Var::S), "2*exp(2*s)");
    }

    #[test]
    fn chain_rule_through_log() {
        // z-component derivative of the cyclic chart in t
        assert_eq!(d("log(b + r*sin(t))", Var::T), "r*cos(t)/(b + r*sin(t))");
    }

    #[test]
    fn abs_is_transparent() {
        // d/ds log|s + mu| = 1/(s + mu)
        assert_eq!(d("log(abs(s + mu))", Var::S), "1/(mu + s)");
    }
}
