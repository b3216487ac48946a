//! Canonical coefficient forms: the Fourier expansion
//! `sum_n A_n(s) cos(nt) + B_n(s) sin(nt)` and the quasi-polynomial
//! expansion `sum c_{n,w}(s) t^n e^{wt}`, both obtained after clearing
//! the minimal power of the common denominator.

use super::canon::{canonicalize, poly_mul_expfree, poly_to_expr, Atom, Canon, Mono, Poly, Trig};
use super::expr::{SymExpr, Var};
use super::{Rat, Result, SymError};
use num::Zero;
use std::collections::BTreeMap;

/// Exact Fourier coefficients of a cleared trigonometric polynomial.
///
/// `a[n]` is the coefficient of `cos(nt)` for `n = 0..=k`; `b[n-1]` the
/// coefficient of `sin(nt)` for `n = 1..=k`. The degree is minimal: for a
/// nonzero form, `a[k]` and `b[k-1]` are not both zero (the zero
/// expression yields `k = 0`, `a = [0]`).
#[derive(Debug, Clone)]
pub struct FourierForm {
    pub k: usize,
    pub a: Vec<SymExpr>,
    pub b: Vec<SymExpr>,
    /// Product of the distinct primitive denominator factors.
    pub denominator: SymExpr,
    pub denominator_power: u32,
}

impl FourierForm {
    /// Coefficient of `cos(nt)` (zero if beyond the degree).
    pub fn coeff_a(&self, n: usize) -> SymExpr {
        self.a.get(n).cloned().unwrap_or_else(SymExpr::zero)
    }

    /// Coefficient of `sin(nt)` for `n >= 1`.
    pub fn coeff_b(&self, n: usize) -> SymExpr {
        if n == 0 {
            return SymExpr::zero();
        }
        self.b.get(n - 1).cloned().unwrap_or_else(SymExpr::zero)
    }

    /// `sum A_n cos(nt) + B_n sin(nt)` as an expression.
    pub fn reconstruct(&self) -> SymExpr {
        let mut terms = Vec::new();
        for (n, an) in self.a.iter().enumerate() {
            if !an.is_zero_literal() {
                if n == 0 {
                    terms.push(an.clone());
                } else {
                    terms.push(SymExpr::mul(vec![an.clone(), SymExpr::Cos(n as u32)]));
                }
            }
        }
        for (i, bn) in self.b.iter().enumerate() {
            if !bn.is_zero_literal() {
                terms.push(SymExpr::mul(vec![bn.clone(), SymExpr::Sin(i as u32 + 1)]));
            }
        }
        SymExpr::add(terms)
    }

    /// The spec'd JSON shape: `{"k", "A", "B", "denominator_power"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "A": self.a.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "B": self.b.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "denominator_power": self.denominator_power,
        })
    }
}

/// One term of a quasi-polynomial form: `coeff * t^n * e^{wt}`.
#[derive(Debug, Clone)]
pub struct QuasiTerm {
    pub t_power: u32,
    pub exp_weight: i64,
    pub coeff: SymExpr,
}

/// Exact quasi-polynomial coefficients after minimal denominator
/// clearing. Basis entries `(t_power, exp_weight)` are pairwise distinct
/// and coefficients are free of `t`.
#[derive(Debug, Clone)]
pub struct QuasiPolyForm {
    pub terms: Vec<QuasiTerm>,
    pub denominator: SymExpr,
    pub denominator_power: u32,
}

impl QuasiPolyForm {
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.t_power).max().unwrap_or(0)
    }

    pub fn coeff(&self, t_power: u32, exp_weight: i64) -> SymExpr {
        self.terms
            .iter()
            .find(|t| t.t_power == t_power && t.exp_weight == exp_weight)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(SymExpr::zero)
    }

    pub fn reconstruct(&self) -> SymExpr {
        let mut out = Vec::new();
        for term in &self.terms {
            let mut fs = vec![term.coeff.clone()];
            if term.t_power > 0 {
                fs.push(SymExpr::var(Var::T).pow(term.t_power as i64));
            }
            if term.exp_weight != 0 {
                fs.push(
                    SymExpr::mul(vec![SymExpr::int(term.exp_weight), SymExpr::var(Var::T)]).exp(),
                );
            }
            out.push(SymExpr::mul(fs));
        }
        SymExpr::add(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "terms": self.terms.iter().map(|t| serde_json::json!({
                "t_power": t.t_power,
                "exp_weight": t.exp_weight,
                "coeff": t.coeff.to_string(),
            })).collect::<Vec<_>>(),
            "denominator_power": self.denominator_power,
        })
    }
}

fn canon_mentions_t(c: &Canon) -> bool {
    fn poly_mentions(p: &Poly) -> bool {
        p.terms.iter().any(|(m, _)| mono_mentions(m))
    }
    fn mono_mentions(m: &Mono) -> bool {
        if m.trig_part.0 != Trig::One {
            return true;
        }
        if let Some(k) = &m.exp_kernel {
            if canon_mentions_t(k) {
                return true;
            }
        }
        m.atoms.iter().any(|(a, _)| match a {
            Atom::Var(Var::T) => true,
            Atom::Log(c) | Atom::Abs(c) => canon_mentions_t(c),
            _ => false,
        })
    }
    poly_mentions(&c.num) || c.den.keys().any(poly_mentions)
}

/// Clear the denominator and collect the cleared numerator polynomial.
/// Returns `(cleared, radical_expr, p)` where `radical_expr` is the
/// product of the distinct primitive factors and `p = max factor power`,
/// so that `radical^p * e == cleared` exactly.
fn clear_denominator(c: &Canon) -> (Poly, SymExpr, u32) {
    if c.den.is_empty() {
        return (c.num.clone(), SymExpr::one(), 0);
    }
    let p = c.den.values().copied().max().unwrap();
    let mut cleared = c.num.clone();
    for (f, k) in &c.den {
        for _ in *k..p {
            cleared = poly_mul_expfree(&cleared, f);
        }
    }
    let radical = SymExpr::mul(c.den.keys().map(poly_to_expr).collect());
    (cleared, radical, p)
}

/// Expand a rational-in-`sin t, cos t` expression into its Fourier form,
/// clearing the minimal power of the common denominator.
pub fn to_fourier(e: &SymExpr) -> Result<FourierForm> {
    let c = canonicalize(e)?;
    for f in c.den.keys() {
        for (m, _) in &f.terms {
            if m.atoms.contains_key(&Atom::Var(Var::T)) || m.exp_kernel.is_some() {
                return Err(SymError::Form(poly_to_expr(f).to_string()));
            }
        }
    }
    for (m, q) in &c.num.terms {
        if m.atoms.contains_key(&Atom::Var(Var::T)) {
            return Err(SymError::Form(
                poly_to_expr(&Poly::from_mono(m.clone(), q.clone())).to_string(),
            ));
        }
        if let Some(kernel) = &m.exp_kernel {
            if canon_mentions_t(kernel) {
                return Err(SymError::Form(
                    poly_to_expr(&Poly::from_mono(m.clone(), q.clone())).to_string(),
                ));
            }
        }
    }
    let (cleared, denominator, power) = clear_denominator(&c);
    let mut a: BTreeMap<usize, Poly> = BTreeMap::new();
    let mut b: BTreeMap<usize, Poly> = BTreeMap::new();
    for (m, q) in &cleared.terms {
        let stripped = Mono {
            atoms: m.atoms.clone(),
            trig_part: Default::default(),
            exp_kernel: m.exp_kernel.clone(),
        };
        match m.trig_part.0 {
            Trig::One => a.entry(0).or_default().insert(stripped, q.clone()),
            Trig::Cos(n) => a.entry(n as usize).or_default().insert(stripped, q.clone()),
            Trig::Sin(n) => b.entry(n as usize).or_default().insert(stripped, q.clone()),
        }
    }
    let k = a
        .keys()
        .chain(b.keys())
        .copied()
        .max()
        .unwrap_or(0);
    let a_vec: Vec<SymExpr> = (0..=k)
        .map(|n| a.get(&n).map(poly_to_expr).unwrap_or_else(SymExpr::zero))
        .collect();
    let b_vec: Vec<SymExpr> = (1..=k)
        .map(|n| b.get(&n).map(poly_to_expr).unwrap_or_else(SymExpr::zero))
        .collect();
    Ok(FourierForm { k, a: a_vec, b: b_vec, denominator, denominator_power: power })
}

/// Expand a finite combination of `t^n e^{wt}` terms into its
/// quasi-polynomial form, clearing the minimal power of the common
/// denominator (denominators may be polynomial in `t`).
pub fn to_quasipoly(e: &SymExpr) -> Result<QuasiPolyForm> {
    let c = canonicalize(e)?;
    for f in c.den.keys() {
        for (m, _) in &f.terms {
            if m.trig_part.0 != Trig::One || m.exp_kernel.is_some() {
                return Err(SymError::Form(poly_to_expr(f).to_string()));
            }
        }
    }
    let (cleared, denominator, power) = clear_denominator(&c);
    let mut buckets: BTreeMap<(u32, i64), Poly> = BTreeMap::new();
    for (m, q) in &cleared.terms {
        if m.trig_part.0 != Trig::One {
            return Err(SymError::Form(
                poly_to_expr(&Poly::from_mono(m.clone(), q.clone())).to_string(),
            ));
        }
        let mut atoms = m.atoms.clone();
        let t_power = atoms.remove(&Atom::Var(Var::T)).unwrap_or(0);
        for (a, _) in &atoms {
            let bad = match a {
                Atom::Log(inner) | Atom::Abs(inner) => canon_mentions_t(inner),
                _ => false,
            };
            if bad {
                return Err(SymError::Form(
                    poly_to_expr(&Poly::from_mono(m.clone(), q.clone())).to_string(),
                ));
            }
        }
        let (w, rest_kernel) = match &m.exp_kernel {
            None => (0i64, None),
            Some(kernel) => split_kernel_t(kernel).ok_or_else(|| {
                SymError::Form(poly_to_expr(&Poly::from_mono(m.clone(), q.clone())).to_string())
            })?,
        };
        let stripped = Mono { atoms, trig_part: Default::default(), exp_kernel: rest_kernel };
        buckets.entry((t_power, w)).or_default().insert(stripped, q.clone());
    }
    let terms: Vec<QuasiTerm> = buckets
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((n, w), p)| QuasiTerm { t_power: n, exp_weight: w, coeff: poly_to_expr(&p) })
        .collect();
    Ok(QuasiPolyForm { terms, denominator, denominator_power: power })
}

/// Split an exponential kernel into `w * t + rest` with integer `w` and
/// `rest` free of `t`. Returns `None` if the kernel mixes `t` any other
/// way.
fn split_kernel_t(kernel: &Canon) -> Option<(i64, Option<std::sync::Arc<Canon>>)> {
    if !kernel.den.is_empty() {
        return if canon_mentions_t(kernel) {
            None
        } else {
            Some((0, Some(std::sync::Arc::new(kernel.clone()))))
        };
    }
    let mut w = Rat::zero();
    let mut rest = Poly::zero();
    for (m, q) in &kernel.num.terms {
        let lone_t = m.trig_part.0 == Trig::One
            && m.exp_kernel.is_none()
            && m.atoms.len() == 1
            && m.atoms.get(&Atom::Var(Var::T)) == Some(&1);
        if lone_t {
            w = q.clone();
        } else {
            let sub = Canon::from_poly(Poly::from_mono(m.clone(), q.clone()));
            if canon_mentions_t(&sub) {
                return None;
            }
            rest.insert(m.clone(), q.clone());
        }
    }
    if !w.is_integer() {
        return None;
    }
    let w = i64::try_from(w.numer()).ok()?;
    let rest_kernel = if rest.is_zero() {
        None
    } else {
        Some(std::sync::Arc::new(Canon::from_poly(rest)))
    };
    Some((w, rest_kernel))
}

/// Content factoring of a coefficient: `e == content * monomial * primitive`.
#[derive(Debug, Clone)]
pub struct ContentSplit {
    pub content: Rat,
    /// Common power product of atoms (1 if none).
    pub monomial: SymExpr,
    /// Primitive remainder (integer coprime coefficients, positive lead).
    pub primitive: SymExpr,
}

impl ContentSplit {
    pub fn of(e: &SymExpr) -> Result<ContentSplit> {
        let c = canonicalize(e)?;
        if c.is_zero() {
            return Ok(ContentSplit {
                content: Rat::zero(),
                monomial: SymExpr::one(),
                primitive: SymExpr::zero(),
            });
        }
        let (content, mono_expr, prim) = super::canon::content_parts(&c);
        Ok(ContentSplit { content, monomial: mono_expr, primitive: prim })
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn simple_fourier() {
        let f = to_fourier(&parse("3*cos(t) + sin(2*t)").unwrap()).unwrap();
        assert_eq!(f.k, 2);
        assert_eq!(f.coeff_a(1).to_string(), "3");
        assert_eq!(f.coeff_b(2).to_string(), "1");
        assert_eq!(f.denominator_power, 0);
    }

    #[test]
    fn constant_fourier() {
        let f = to_fourier(&parse("5/7").unwrap()).unwrap();
        assert_eq!(f.k, 0);
        assert_eq!(f.coeff_a(0).to_string(), "5/7");
        assert!(f.b.is_empty());
    }

    #[test]
    fn clearing_is_minimal() {
        // (cos t)/(b + r sin t)^2 needs power exactly 2
        let e = parse("cos(t)/(b + r*sin(t))^2").unwrap();
        let f = to_fourier(&e).unwrap();
        assert_eq!(f.denominator_power, 2);
        assert_eq!(f.denominator.to_string(), "b + r*sin(t)");
        // multiplying by one extra core keeps the fraction reducible, so
        // the same expression times core clears with power 1
        let e2 = parse("cos(t)*(b + r*sin(t))/(b + r*sin(t))^2").unwrap();
        let f2 = to_fourier(&e2).unwrap();
        assert_eq!(f2.denominator_power, 1);
    }

    #[test]
    fn fourier_rejects_t_polynomials() {
        assert!(matches!(to_fourier(&parse("t*cos(t)").unwrap()), Err(SymError::Form(_))));
        assert!(matches!(to_fourier(&parse("exp(t)").unwrap()), Err(SymError::Form(_))));
    }

    #[test]
    fn quasipoly_basics() {
        let q = to_quasipoly(&parse("a''*t + b''").unwrap()).unwrap();
        assert_eq!(q.degree(), 1);
        assert_eq!(q.coeff(1, 0).to_string(), "a''");
        assert_eq!(q.coeff(0, 0).to_string(), "b''");
        let q2 = to_quasipoly(&parse("exp(2*t)*a''").unwrap()).unwrap();
        assert_eq!(q2.coeff(0, 2).to_string(), "a''");
        assert!(matches!(to_quasipoly(&parse("cos(t)").unwrap()), Err(SymError::Form(_))));
    }

    #[test]
    fn quasipoly_clears_t_denominators() {
        let q = to_quasipoly(&parse("(a''*t^2 + 1)/(a*t + b)").unwrap()).unwrap();
        assert_eq!(q.denominator_power, 1);
        assert_eq!(q.denominator.to_string(), "b + a*t");
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn content_split_of_b5() {
        let cs = ContentSplit::of(&parse("r^6/16").unwrap()).unwrap();
        assert_eq!(cs.content, Rat::new(1.into(), 16.into()));
        assert_eq!(cs.monomial.to_string(), "r^6");
        assert_eq!(cs.primitive.to_string(), "1");
    }
}
