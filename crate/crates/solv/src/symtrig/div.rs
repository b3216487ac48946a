//! Exact division in the atom algebra, used to keep fractions reduced and
//! denominator clearing minimal.
//!
//! Divisors free of trig parts are handled by sparse multivariate long
//! division (lexicographic order). Divisors containing `sin`/`cos` go
//! through the parity-reduced basis `{cos^k, cos^k sin}`: multiplying by
//! the `t -> -t` conjugate makes the divisor a polynomial in `cos t`
//! alone, and the two parity components divide independently.

use super::canon::{Atom, Mono, Poly, Trig, TrigPart};
use super::Rat;
use num::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

type AtomsMono = BTreeMap<Atom, u32>;

/// Monomial for division: opaque atoms plus a power of `c = cos t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
struct DMono {
    atoms: AtomsMono,
    c: u32,
}

#[derive(Debug, Clone, Default)]
struct DPoly {
    terms: BTreeMap<DMono, Rat>,
}

impl DPoly {
    fn insert(&mut self, m: DMono, q: Rat) {
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(q);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + q;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }
}

/// Lexicographic monomial order: priority to the `c` power, then atom
/// exponents in atom order. Translation-invariant, so valid for division.
fn lex_cmp(a: &DMono, b: &DMono) -> Ordering {
    match a.c.cmp(&b.c) {
        Ordering::Equal => {}
        o => return o,
    }
    let keys: std::collections::BTreeSet<&Atom> = a.atoms.keys().chain(b.atoms.keys()).collect();
    for k in keys {
        let ea = a.atoms.get(k).copied().unwrap_or(0);
        let eb = b.atoms.get(k).copied().unwrap_or(0);
        match ea.cmp(&eb) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn lead(p: &DPoly) -> Option<(&DMono, &Rat)> {
    p.terms.iter().max_by(|x, y| lex_cmp(x.0, y.0))
}

fn mono_sub(a: &DMono, b: &DMono) -> Option<DMono> {
    if a.c < b.c {
        return None;
    }
    let mut atoms = a.atoms.clone();
    for (k, eb) in &b.atoms {
        let ea = atoms.get_mut(k)?;
        if *ea < *eb {
            return None;
        }
        *ea -= eb;
        if *ea == 0 {
            atoms.remove(k);
        }
    }
    Some(DMono { atoms, c: a.c - b.c })
}

fn mono_add(a: &DMono, b: &DMono) -> DMono {
    let mut atoms = a.atoms.clone();
    for (k, e) in &b.atoms {
        *atoms.entry(k.clone()).or_insert(0) += e;
    }
    DMono { atoms, c: a.c + b.c }
}

/// Sparse long division by a single divisor; `Some` iff exact.
fn dpoly_div(n: &DPoly, f: &DPoly) -> Option<DPoly> {
    let (lf_mono, lf_coef) = lead(f)?;
    let lf_mono = lf_mono.clone();
    let lf_coef = lf_coef.clone();
    let mut rem = n.clone();
    let mut quot = DPoly::default();
    while let Some((lr_mono, lr_coef)) = lead(&rem) {
        let mq = mono_sub(lr_mono, &lf_mono)?;
        let qc = lr_coef / &lf_coef;
        for (m, c) in &f.terms {
            rem.insert(mono_add(m, &mq), -(c * &qc));
        }
        quot.insert(mq, qc);
    }
    Some(quot)
}

// ---------------------------------------------------------------------
// Chebyshev-basis conversion: cos(nt) = T_n(c), sin(nt) = sin t U_{n-1}(c).
// ---------------------------------------------------------------------

fn cheb_tables(n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut t: Vec<Vec<i64>> = vec![vec![1], vec![0, 1]];
    let mut u: Vec<Vec<i64>> = vec![vec![1], vec![0, 2]];
    for k in 2..=n.max(1) {
        for table in [&mut t, &mut u] {
            let prev = &table[k - 1];
            let prev2 = &table[k - 2];
            let mut next = vec![0i64; k + 1];
            for (j, c) in prev.iter().enumerate() {
                next[j + 1] += 2 * c;
            }
            for (j, c) in prev2.iter().enumerate() {
                next[j] -= c;
            }
            table.push(next);
        }
    }
    (t, u)
}

/// Parity-split representation: coefficient maps for the `1` and `sin t`
/// components, each a polynomial in atoms and `c`.
struct ChebPoly {
    even: DPoly,
    odd: DPoly,
}

fn to_cheb(p: &Poly) -> ChebPoly {
    let maxn = p
        .terms
        .keys()
        .map(|m| match m.trig_part.0 {
            Trig::One => 0,
            Trig::Cos(n) | Trig::Sin(n) => n as usize,
        })
        .max()
        .unwrap_or(0);
    let (t_tab, u_tab) = cheb_tables(maxn);
    let mut out = ChebPoly { even: DPoly::default(), odd: DPoly::default() };
    for (m, q) in &p.terms {
        debug_assert!(m.exp_kernel.is_none());
        match m.trig_part.0 {
            Trig::One => out.even.insert(DMono { atoms: m.atoms.clone(), c: 0 }, q.clone()),
            Trig::Cos(n) => {
                for (j, coef) in t_tab[n as usize].iter().enumerate() {
                    if *coef != 0 {
                        out.even.insert(
                            DMono { atoms: m.atoms.clone(), c: j as u32 },
                            q * Rat::from_integer((*coef).into()),
                        );
                    }
                }
            }
            Trig::Sin(n) => {
                for (j, coef) in u_tab[(n - 1) as usize].iter().enumerate() {
                    if *coef != 0 {
                        out.odd.insert(
                            DMono { atoms: m.atoms.clone(), c: j as u32 },
                            q * Rat::from_integer((*coef).into()),
                        );
                    }
                }
            }
        }
    }
    out
}

/// Multiply parity-split polys; `sin^2 = 1 - c^2`.
fn cheb_mul(a: &ChebPoly, b: &ChebPoly) -> ChebPoly {
    let mut even = DPoly::default();
    let mut odd = DPoly::default();
    let mul_into = |x: &DPoly, y: &DPoly, dst_even: bool, sbar_sq: bool, out_e: &mut DPoly, out_o: &mut DPoly| {
        for (m1, q1) in &x.terms {
            for (m2, q2) in &y.terms {
                let m = mono_add(m1, m2);
                let q = q1 * q2;
                if sbar_sq {
                    // sin^2 = 1 - c^2
                    out_e.insert(m.clone(), q.clone());
                    out_e.insert(DMono { atoms: m.atoms.clone(), c: m.c + 2 }, -q);
                } else if dst_even {
                    out_e.insert(m, q);
                } else {
                    out_o.insert(m, q);
                }
            }
        }
    };
    mul_into(&a.even, &b.even, true, false, &mut even, &mut odd);
    mul_into(&a.even, &b.odd, false, false, &mut even, &mut odd);
    mul_into(&a.odd, &b.even, false, false, &mut even, &mut odd);
    mul_into(&a.odd, &b.odd, true, true, &mut even, &mut odd);
    ChebPoly { even, odd }
}

fn cheb_conj(a: &ChebPoly) -> ChebPoly {
    ChebPoly {
        even: a.even.clone(),
        odd: DPoly {
            terms: a.odd.terms.iter().map(|(m, q)| (m.clone(), -q)).collect(),
        },
    }
}

/// Fourier-basis expansion of `cos(t)^k` (and `sin t cos^k` via one more
/// product-to-sum step), used to convert quotients back.
fn cos_pow_fourier(k: u32) -> Vec<(Trig, Rat)> {
    let mut acc: Vec<(Trig, Rat)> = vec![(Trig::One, Rat::one())];
    for _ in 0..k {
        let mut next: BTreeMap<Trig, Rat> = BTreeMap::new();
        for (t, q) in &acc {
            for (t2, q2) in super::canon::trig_mul(*t, Trig::Cos(1)) {
                let e = next.entry(t2).or_insert_with(Rat::zero);
                *e += q * q2;
            }
        }
        acc = next.into_iter().filter(|(_, q)| !q.is_zero()).collect();
    }
    acc
}

fn from_cheb_component(p: &DPoly, with_sin: bool, out: &mut Poly) {
    for (m, q) in &p.terms {
        let mut basis = cos_pow_fourier(m.c);
        if with_sin {
            let mut next: BTreeMap<Trig, Rat> = BTreeMap::new();
            for (t, qt) in &basis {
                for (t2, q2) in super::canon::trig_mul(*t, Trig::Sin(1)) {
                    let e = next.entry(t2).or_insert_with(Rat::zero);
                    *e += qt * q2;
                }
            }
            basis = next.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        }
        for (t, qt) in basis {
            out.insert(
                Mono { atoms: m.atoms.clone(), trig_part: TrigPart(t), exp_kernel: None },
                &qt * q,
            );
        }
    }
}

// ---------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------

/// Exact division `n / f`, or `None` if not exactly divisible (or the
/// divisor is outside the supported shapes: exponential factors never
/// appear in denominators of the catalogued computations).
pub(crate) fn try_div_exact(n: &Poly, f: &Poly) -> Option<Poly> {
    if f.is_zero() {
        return None;
    }
    if n.is_zero() {
        return Some(Poly::zero());
    }
    if f.has_exp() {
        return None;
    }
    if f.is_one() {
        return Some(n.clone());
    }
    // Group the dividend by exponential kernel; f is exp-free, so each
    // class divides independently.
    let mut groups: BTreeMap<Option<Arc<super::canon::Canon>>, Poly> = BTreeMap::new();
    for (m, q) in &n.terms {
        let stripped = Mono {
            atoms: m.atoms.clone(),
            trig_part: m.trig_part,
            exp_kernel: None,
        };
        groups
            .entry(m.exp_kernel.clone())
            .or_default()
            .insert(stripped, q.clone());
    }
    let f_has_trig = f.has_trig();
    if f_has_trig && f.terms.keys().any(|m| m.has_abs()) {
        return None;
    }
    let mut out = Poly::zero();
    for (kernel, part) in groups {
        let q = if f_has_trig {
            div_with_trig(&part, f)?
        } else {
            div_trig_free(&part, f)?
        };
        for (m, c) in q.terms {
            out.insert(
                Mono { atoms: m.atoms, trig_part: m.trig_part, exp_kernel: kernel.clone() },
                c,
            );
        }
    }
    // Exact-division identity re-checked by multiplication.
    if super::canon::poly_mul_expfree(&out, f) == *n {
        Some(out)
    } else {
        None
    }
}

fn div_trig_free(part: &Poly, f: &Poly) -> Option<Poly> {
    let mut fd = DPoly::default();
    for (m, q) in &f.terms {
        debug_assert!(m.trig_part.0 == Trig::One);
        fd.insert(DMono { atoms: m.atoms.clone(), c: 0 }, q.clone());
    }
    // divide each trig class separately
    let mut classes: BTreeMap<Trig, DPoly> = BTreeMap::new();
    for (m, q) in &part.terms {
        classes
            .entry(m.trig_part.0)
            .or_default()
            .insert(DMono { atoms: m.atoms.clone(), c: 0 }, q.clone());
    }
    let mut out = Poly::zero();
    for (trig, cls) in classes {
        let q = dpoly_div(&cls, &fd)?;
        for (m, c) in q.terms {
            if m.c != 0 {
                return None;
            }
            out.insert(
                Mono { atoms: m.atoms, trig_part: TrigPart(trig), exp_kernel: None },
                c,
            );
        }
    }
    Some(out)
}

fn div_with_trig(part: &Poly, f: &Poly) -> Option<Poly> {
    let fc = to_cheb(f);
    let nc = to_cheb(part);
    let fbar = cheb_conj(&fc);
    let g = cheb_mul(&fc, &fbar);
    if !g.odd.terms.is_empty() {
        return None;
    }
    let m = cheb_mul(&nc, &fbar);
    let q_even = dpoly_div(&m.even, &g.even)?;
    let q_odd = dpoly_div(&m.odd, &g.even)?;
    let mut out = Poly::zero();
    from_cheb_component(&q_even, false, &mut out);
    from_cheb_component(&q_odd, true, &mut out);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::super::canon::{canonicalize, poly_mul_expfree};
    use super::super::parse;
    use super::*;

    fn poly_of(src: &str) -> Poly {
        let c = canonicalize(&parse(src).unwrap()).unwrap();
        assert!(c.den.is_empty(), "expected polynomial for {src}");
        c.num
    }

    #[test]
    fn divides_atom_polys() {
        let n = poly_of("s^2*a + s*a*b");
        let f = poly_of("s*a");
        let q = try_div_exact(&n, &f).expect("divisible");
        assert_eq!(q, poly_of("s + b"));
        assert!(try_div_exact(&poly_of("s^2 + 1"), &poly_of("s + 1")).is_none());
    }

    #[test]
    fn divides_trig_core() {
        let core = poly_of("b + r*sin(t)");
        let n = poly_mul_expfree(&poly_of("a' + r'*cos(t)"), &core);
        let q = try_div_exact(&n, &core).expect("divisible");
        assert_eq!(q, poly_of("a' + r'*cos(t)"));
        assert!(try_div_exact(&poly_of("a' + r'*cos(t)"), &core).is_none());
    }

    #[test]
    fn divides_higher_core_powers() {
        let core = poly_of("b + r*sin(t)");
        let mut n = poly_of("r^2*cos(2*t) - a'*sin(3*t) + 5");
        for _ in 0..3 {
            n = poly_mul_expfree(&n, &core);
        }
        let mut q = n;
        for _ in 0..3 {
            q = try_div_exact(&q, &core).expect("divisible");
        }
        assert_eq!(q, poly_of("r^2*cos(2*t) - a'*sin(3*t) + 5"));
    }

    #[test]
    fn divides_exp_graded_dividend() {
        let core = poly_of("b + r*sin(t)");
        let n0 = poly_of("exp(2*s)*a'' + cos(t)");
        let n = poly_mul_expfree(&n0, &core);
        let q = try_div_exact(&n, &core).expect("divisible");
        assert_eq!(q, n0);
    }

    #[test]
    fn divides_pure_sin_core() {
        let core = poly_of("sin(t)");
        let n = poly_mul_expfree(&poly_of("1 + cos(2*t)"), &core);
        let q = try_div_exact(&n, &core).expect("divisible");
        assert_eq!(q, poly_of("1 + cos(2*t)"));
    }
}
