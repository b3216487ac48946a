//! Expression trees and their printable form.

use super::Rat;
use num::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// The two chart variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    S,
    T,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::S => "s",
            Var::T => "t",
        })
    }
}

/// Function symbols a(s), b(s), r(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FuncSym {
    A,
    B,
    R,
}

impl fmt::Display for FuncSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FuncSym::A => "a",
            FuncSym::B => "b",
            FuncSym::R => "r",
        })
    }
}

/// Named rational parameters of the classified families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamSym {
    Lambda,
    Mu,
    A0,
    A1,
    B0,
    B1,
}

impl ParamSym {
    pub const ALL: [ParamSym; 6] = [
        ParamSym::Lambda,
        ParamSym::Mu,
        ParamSym::A0,
        ParamSym::A1,
        ParamSym::B0,
        ParamSym::B1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamSym::Lambda => "lambda",
            ParamSym::Mu => "mu",
            ParamSym::A0 => "a0",
            ParamSym::A1 => "a1",
            ParamSym::B0 => "b0",
            ParamSym::B1 => "b1",
        }
    }

    pub fn from_name(name: &str) -> Option<ParamSym> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }
}

impl fmt::Display for ParamSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A symbolic expression over `s`, `t`, the function symbols `a`, `b`,
/// `r` (with derivative order), and the named parameters.
///
/// `Sin(n)`/`Cos(n)` denote `sin(n t)` and `cos(n t)` for `n >= 1`;
/// general trigonometric arguments are not part of the algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymExpr {
    Rational(Rat),
    Variable(Var),
    /// k-th derivative of a function symbol: `Func(A, 2)` is `a''(s)`.
    Func(FuncSym, u32),
    Param(ParamSym),
    Sum(Vec<SymExpr>),
    Product(Vec<SymExpr>),
    /// Integer power.
    Pow(Arc<SymExpr>, i64),
    Quotient(Arc<SymExpr>, Arc<SymExpr>),
    Sin(u32),
    Cos(u32),
    Exp(Arc<SymExpr>),
    Log(Arc<SymExpr>),
    Abs(Arc<SymExpr>),
}

impl SymExpr {
    pub fn zero() -> SymExpr {
        SymExpr::Rational(Rat::zero())
    }

    pub fn one() -> SymExpr {
        SymExpr::Rational(Rat::one())
    }

    pub fn int(n: i64) -> SymExpr {
        SymExpr::Rational(Rat::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> SymExpr {
        SymExpr::Rational(Rat::new(num.into(), den.into()))
    }

    pub fn var(v: Var) -> SymExpr {
        SymExpr::Variable(v)
    }

    pub fn func(f: FuncSym, order: u32) -> SymExpr {
        SymExpr::Func(f, order)
    }

    pub fn add(terms: Vec<SymExpr>) -> SymExpr {
        match terms.len() {
            0 => SymExpr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => SymExpr::Sum(terms),
        }
    }

    pub fn mul(factors: Vec<SymExpr>) -> SymExpr {
        match factors.len() {
            0 => SymExpr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => SymExpr::Product(factors),
        }
    }

    pub fn neg(self) -> SymExpr {
        SymExpr::mul(vec![SymExpr::int(-1), self])
    }

    pub fn sub(x: SymExpr, y: SymExpr) -> SymExpr {
        SymExpr::add(vec![x, y.neg()])
    }

    pub fn pow(self, n: i64) -> SymExpr {
        SymExpr::Pow(Arc::new(self), n)
    }

    pub fn div(num: SymExpr, den: SymExpr) -> SymExpr {
        SymExpr::Quotient(Arc::new(num), Arc::new(den))
    }

    pub fn exp(self) -> SymExpr {
        SymExpr::Exp(Arc::new(self))
    }

    pub fn log(self) -> SymExpr {
        SymExpr::Log(Arc::new(self))
    }

    pub fn abs(self) -> SymExpr {
        SymExpr::Abs(Arc::new(self))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, SymExpr::Rational(q) if q.is_zero())
    }

    /// Structural check: does the expression mention `t` (as a bare
    /// variable, inside sin/cos, or anywhere in a subtree)?
    pub fn depends_on_t(&self) -> bool {
        match self {
            SymExpr::Rational(_) | SymExpr::Func(_, _) | SymExpr::Param(_) => false,
            SymExpr::Variable(v) => *v == Var::T,
            SymExpr::Sin(_) | SymExpr::Cos(_) => true,
            SymExpr::Sum(v) | SymExpr::Product(v) => v.iter().any(|e| e.depends_on_t()),
            SymExpr::Pow(e, _) => e.depends_on_t(),
            SymExpr::Quotient(n, d) => n.depends_on_t() || d.depends_on_t(),
            SymExpr::Exp(e) | SymExpr::Log(e) | SymExpr::Abs(e) => e.depends_on_t(),
        }
    }

    /// Largest derivative order at which `f` occurs, if it occurs.
    pub fn max_order(&self, f: FuncSym) -> Option<u32> {
        match self {
            SymExpr::Func(g, k) if *g == f => Some(*k),
            SymExpr::Sum(v) | SymExpr::Product(v) => {
                v.iter().filter_map(|e| e.max_order(f)).max()
            }
            SymExpr::Pow(e, _) => e.max_order(f),
            SymExpr::Quotient(n, d) => n.max_order(f).max(d.max_order(f)),
            SymExpr::Exp(e) | SymExpr::Log(e) | SymExpr::Abs(e) => e.max_order(f),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------
// Printing. `parse(print(e)) == e` holds structurally for normalized
// expressions; the grammar is documented in docs/grammar.ebnf.
// ---------------------------------------------------------------------

#[derive(PartialEq, PartialOrd)]
enum Prec {
    Sum,
    Prod,
    Unary,
    Power,
    Atom,
}

fn fmt_rat(q: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_prec(e: &SymExpr, parent: Prec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match e {
        SymExpr::Rational(q) => {
            if q.is_negative() {
                Prec::Unary
            } else if q.is_integer() {
                Prec::Atom
            } else {
                Prec::Prod
            }
        }
        SymExpr::Sum(_) => Prec::Sum,
        SymExpr::Product(_) => Prec::Prod,
        SymExpr::Quotient(_, _) => Prec::Prod,
        SymExpr::Pow(_, _) => Prec::Power,
        _ => Prec::Atom,
    };
    let need_parens = prec < parent;
    if need_parens {
        f.write_str("(")?;
    }
    match e {
        SymExpr::Rational(q) => fmt_rat(q, f)?,
        SymExpr::Variable(v) => write!(f, "{v}")?,
        SymExpr::Func(g, k) => {
            write!(f, "{g}")?;
            for _ in 0..*k {
                f.write_str("'")?;
            }
        }
        SymExpr::Param(p) => write!(f, "{p}")?,
        SymExpr::Sum(terms) => {
            for (i, term) in terms.iter().enumerate() {
                // Render `+ (-c)*x` as `- c*x`.
                let (neg, mag) = strip_negation(term);
                if i == 0 {
                    if neg {
                        f.write_str("-")?;
                    }
                } else if neg {
                    f.write_str(" - ")?;
                } else {
                    f.write_str(" + ")?;
                }
                match &mag {
                    Some(m) => write_prec(m, Prec::Prod, f)?,
                    None => write_prec(term, Prec::Prod, f)?,
                }
            }
        }
        SymExpr::Product(factors) => {
            for (i, factor) in factors.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                write_prec(factor, Prec::Unary, f)?;
            }
        }
        SymExpr::Quotient(n, d) => {
            write_prec(n, Prec::Prod, f)?;
            f.write_str("/")?;
            write_prec(d, Prec::Power, f)?;
        }
        SymExpr::Pow(b, n) => {
            write_prec(b, Prec::Atom, f)?;
            if *n < 0 {
                write!(f, "^({n})")?;
            } else {
                write!(f, "^{n}")?;
            }
        }
        SymExpr::Sin(n) => {
            if *n == 1 {
                f.write_str("sin(t)")?;
            } else {
                write!(f, "sin({n}*t)")?;
            }
        }
        SymExpr::Cos(n) => {
            if *n == 1 {
                f.write_str("cos(t)")?;
            } else {
                write!(f, "cos({n}*t)")?;
            }
        }
        SymExpr::Exp(x) => {
            f.write_str("exp(")?;
            write_prec(x, Prec::Sum, f)?;
            f.write_str(")")?;
        }
        SymExpr::Log(x) => {
            f.write_str("log(")?;
            write_prec(x, Prec::Sum, f)?;
            f.write_str(")")?;
        }
        SymExpr::Abs(x) => {
            f.write_str("abs(")?;
            write_prec(x, Prec::Sum, f)?;
            f.write_str(")")?;
        }
    }
    if need_parens {
        f.write_str(")")?;
    }
    Ok(())
}

/// If `term` is a product led by a negative rational (or a bare negative
/// rational), return the positive counterpart for `a - b` rendering.
fn strip_negation(term: &SymExpr) -> (bool, Option<SymExpr>) {
    match term {
        SymExpr::Rational(q) if q.is_negative() => (true, Some(SymExpr::Rational(-q.clone()))),
        SymExpr::Product(fs) => {
            if let Some(SymExpr::Rational(q)) = fs.first() {
                if q.is_negative() {
                    let mut rest = fs.clone();
                    let mq = -q.clone();
                    if mq.is_one() && rest.len() > 1 {
                        rest.remove(0);
                    } else {
                        rest[0] = SymExpr::Rational(mq);
                    }
                    return (true, Some(SymExpr::mul(rest)));
                }
            }
            (false, None)
        }
        _ => (false, None),
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, Prec::Sum, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_basics() {
        let e = SymExpr::add(vec![
            SymExpr::func(FuncSym::A, 2),
            SymExpr::func(FuncSym::A, 1).pow(2).neg(),
        ]);
        assert_eq!(e.to_string(), "a'' - a'^2");
        let q = SymExpr::div(
            SymExpr::mul(vec![SymExpr::func(FuncSym::R, 0), SymExpr::Cos(1)]),
            SymExpr::add(vec![
                SymExpr::func(FuncSym::B, 0),
                SymExpr::mul(vec![SymExpr::func(FuncSym::R, 0), SymExpr::Sin(1)]),
            ]),
        );
        assert_eq!(q.to_string(), "r*cos(t)/(b + r*sin(t))");
    }

    #[test]
    fn display_rationals_and_powers() {
        assert_eq!(SymExpr::ratio(-1, 2).to_string(), "-1/2");
        let e = SymExpr::mul(vec![SymExpr::ratio(1, 16), SymExpr::func(FuncSym::R, 0).pow(6)]);
        assert_eq!(e.to_string(), "1/16*r^6");
        let p = SymExpr::var(Var::S).pow(-2);
        assert_eq!(p.to_string(), "s^(-2)");
    }
}
