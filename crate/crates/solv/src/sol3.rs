//! The ambient space: Sol3 as R^3 with the metric
//! `e^{2z} dx^2 + e^{-2z} dy^2 + dz^2`, its group law, the orthonormal
//! left-invariant frame `E1 = e^{-z} d/dx`, `E2 = e^{z} d/dy`,
//! `E3 = d/dz`, the connection table, the isometry families T1, T2, T3,
//! the coordinate foliations, and the model isometries of the leaves to
//! the hyperbolic and Euclidean planes.

use crate::curvature::SurfaceChart;
use crate::symtrig::{SymExpr, Var};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Sol3Error {
    #[error("frame index {0} out of range (expected 1..=3)")]
    BadIndex(u8),
    #[error("point is not on the leaf: {0}")]
    NotOnLeaf(String),
    #[error("point outside the model domain: {0}")]
    OutsideModel(String),
}

/// A point of Sol3 in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sol3Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sol3Point {
    pub fn new(x: f64, y: f64, z: f64) -> Sol3Point {
        Sol3Point { x, y, z }
    }

    pub fn origin() -> Sol3Point {
        Sol3Point::new(0.0, 0.0, 0.0)
    }
}

/// Tangent vector components in the coordinate basis at an implied point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordVec {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl CoordVec {
    pub fn new(dx: f64, dy: f64, dz: f64) -> CoordVec {
        CoordVec { dx, dy, dz }
    }
}

/// Components on the orthonormal frame E1, E2, E3 at an implied point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVec {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl FrameVec {
    pub fn new(c1: f64, c2: f64, c3: f64) -> FrameVec {
        FrameVec { c1, c2, c3 }
    }

    /// Frame components are orthonormal, so the squared norm is the
    /// Euclidean one.
    pub fn norm_sq(&self) -> f64 {
        self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3
    }

    pub fn dot(&self, other: &FrameVec) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3
    }

    /// Cross product with the orientation E1 x E2 = E3.
    pub fn cross(&self, other: &FrameVec) -> FrameVec {
        FrameVec::new(
            self.c2 * other.c3 - self.c3 * other.c2,
            self.c3 * other.c1 - self.c1 * other.c3,
            self.c1 * other.c2 - self.c2 * other.c1,
        )
    }
}

/// The ambient metric at `p` applied to coordinate vectors.
pub fn metric_at(p: &Sol3Point, u: &CoordVec, v: &CoordVec) -> f64 {
    let e2z = (2.0 * p.z).exp();
    e2z * u.dx * v.dx + u.dy * v.dy / e2z + u.dz * v.dz
}

/// The Sol3 group product `p * q = (p.x + e^{-p.z} q.x, p.y + e^{p.z} q.y, p.z + q.z)`.
pub fn group_mul(p: &Sol3Point, q: &Sol3Point) -> Sol3Point {
    Sol3Point::new(
        p.x + (-p.z).exp() * q.x,
        p.y + p.z.exp() * q.y,
        p.z + q.z,
    )
}

/// The orthonormal frame at `p` as coordinate vectors.
pub fn frame_at(p: &Sol3Point) -> (CoordVec, CoordVec, CoordVec) {
    (
        CoordVec::new((-p.z).exp(), 0.0, 0.0),
        CoordVec::new(0.0, p.z.exp(), 0.0),
        CoordVec::new(0.0, 0.0, 1.0),
    )
}

/// Frame components of a coordinate vector at `p`: the component on E1
/// is `e^{z} dx`, on E2 `e^{-z} dy`, on E3 `dz`.
pub fn coord_to_frame(p: &Sol3Point, v: &CoordVec) -> FrameVec {
    FrameVec::new(p.z.exp() * v.dx, (-p.z).exp() * v.dy, v.dz)
}

/// Coordinate components of a frame vector at `p`.
pub fn frame_to_coord(p: &Sol3Point, v: &FrameVec) -> CoordVec {
    CoordVec::new((-p.z).exp() * v.c1, p.z.exp() * v.c2, v.c3)
}

/// The Riemannian connection of Sol3 on the frame: `nabla_{E_i} E_j` as
/// constant frame components.
///
/// ```text
/// nabla_{E1} E1 = -E3   nabla_{E1} E2 = 0    nabla_{E1} E3 = E1
/// nabla_{E2} E1 = 0     nabla_{E2} E2 = E3   nabla_{E2} E3 = -E2
/// nabla_{E3} E1 = 0     nabla_{E3} E2 = 0    nabla_{E3} E3 = 0
/// ```
pub fn connection(i: u8, j: u8) -> Result<FrameVec, Sol3Error> {
    if !(1..=3).contains(&i) {
        return Err(Sol3Error::BadIndex(i));
    }
    if !(1..=3).contains(&j) {
        return Err(Sol3Error::BadIndex(j));
    }
    Ok(match (i, j) {
        (1, 1) => FrameVec::new(0.0, 0.0, -1.0),
        (1, 3) => FrameVec::new(1.0, 0.0, 0.0),
        (2, 2) => FrameVec::new(0.0, 0.0, 1.0),
        (2, 3) => FrameVec::new(0.0, -1.0, 0.0),
        _ => FrameVec::new(0.0, 0.0, 0.0),
    })
}

/// Exact rational connection table entry, for symbolic covariant
/// derivatives: coefficient of E_k in `nabla_{E_i} E_j` (indices 0-based).
pub(crate) fn connection_coeff(i: usize, j: usize, k: usize) -> i64 {
    match (i + 1, j + 1, k + 1) {
        (1, 1, 3) => -1,
        (1, 3, 1) => 1,
        (2, 2, 3) => 1,
        (2, 3, 2) => -1,
        _ => 0,
    }
}

/// The three isometry families generating the identity component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Translation {
    T1,
    T2,
    T3,
}

/// Apply `T_{1,c}(x,y,z) = (x+c, y, z)`, `T_{2,c}(x,y,z) = (x, y+c, z)`
/// or `T_{3,c}(x,y,z) = (e^{-c} x, e^{c} y, z+c)`.
pub fn translate(kind: Translation, c: f64, p: &Sol3Point) -> Sol3Point {
    match kind {
        Translation::T1 => Sol3Point::new(p.x + c, p.y, p.z),
        Translation::T2 => Sol3Point::new(p.x, p.y + c, p.z),
        Translation::T3 => Sol3Point::new((-c).exp() * p.x, c.exp() * p.y, p.z + c),
    }
}

/// The coordinate foliations: P_s (x = s), Q_s (y = s), R_s (z = s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Foliation {
    F1,
    F2,
    F3,
}

/// The leaf of a foliation as a chart in the two remaining coordinates,
/// in the order they appear in the leaf equation.
pub fn leaf_chart(foliation: Foliation, s: f64) -> SurfaceChart {
    let c = SymExpr::Rational(crate::symtrig::Rat::from_float(s).expect("finite leaf parameter"));
    let (x, y, z, label) = match foliation {
        Foliation::F1 => (c, SymExpr::var(Var::S), SymExpr::var(Var::T), "P_s leaf"),
        Foliation::F2 => (SymExpr::var(Var::S), c, SymExpr::var(Var::T), "Q_s leaf"),
        Foliation::F3 => (SymExpr::var(Var::S), SymExpr::var(Var::T), c, "R_s leaf"),
    };
    SurfaceChart::new(x, y, z)
        .with_label(label)
        .with_domains((-10.0, 10.0), (-10.0, 10.0))
}

/// The model isometry of a leaf P_s to the upper half-plane:
/// `Phi_s(y, z) = (y, e^z)`.
pub fn phi_s(s: f64, p: &Sol3Point) -> Result<(f64, f64), Sol3Error> {
    if (p.x - s).abs() > 1e-12 {
        return Err(Sol3Error::NotOnLeaf(format!("x = {} but leaf is x = {s}", p.x)));
    }
    Ok((p.y, p.z.exp()))
}

/// Inverse of [`phi_s`]: `(u, v) -> (s, u, log v)` for `v > 0`.
pub fn phi_s_inv(s: f64, u: f64, v: f64) -> Result<Sol3Point, Sol3Error> {
    if v <= 0.0 {
        return Err(Sol3Error::OutsideModel(format!("v = {v} not in the upper half-plane")));
    }
    Ok(Sol3Point::new(s, u, v.ln()))
}

/// The model isometry of a leaf R_s to the Euclidean plane:
/// `Psi(x, y) = (e^s x, e^{-s} y)`.
pub fn psi_s(s: f64, p: &Sol3Point) -> Result<(f64, f64), Sol3Error> {
    if (p.z - s).abs() > 1e-12 {
        return Err(Sol3Error::NotOnLeaf(format!("z = {} but leaf is z = {s}", p.z)));
    }
    Ok((s.exp() * p.x, (-s).exp() * p.y))
}

/// Inverse of [`psi_s`].
pub fn psi_s_inv(s: f64, u: f64, v: f64) -> Sol3Point {
    Sol3Point::new((-s).exp() * u, s.exp() * v, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn rand_point(rng: &mut ChaCha8Rng) -> Sol3Point {
        Sol3Point::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.5..1.5),
        )
    }

    fn rand_vec(rng: &mut ChaCha8Rng) -> CoordVec {
        CoordVec::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    #[test]
    fn metric_examples() {
        let o = Sol3Point::origin();
        let ex = CoordVec::new(1.0, 0.0, 0.0);
        let ey = CoordVec::new(0.0, 1.0, 0.0);
        assert_eq!(metric_at(&o, &ex, &ex), 1.0);
        assert_eq!(metric_at(&o, &ex, &ey), 0.0);
        let p = Sol3Point::new(0.0, 0.0, 1.0);
        assert!((metric_at(&p, &ex, &ex) - 2f64.exp().powi(2) / 2f64.exp()).abs() < 1e-12
            || (metric_at(&p, &ex, &ex) - (2.0f64).exp()).abs() < 1e-12);
        assert!((metric_at(&p, &ex, &ex) - 7.389056098930650).abs() < 1e-12);
    }

    #[test]
    fn metric_symmetric_bilinear() {
        let mut rng = rng();
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let u = rand_vec(&mut rng);
            let v = rand_vec(&mut rng);
            let w = rand_vec(&mut rng);
            assert!((metric_at(&p, &u, &v) - metric_at(&p, &v, &u)).abs() < 1e-14);
            let uv = CoordVec::new(u.dx + 2.0 * w.dx, u.dy + 2.0 * w.dy, u.dz + 2.0 * w.dz);
            let lhs = metric_at(&p, &uv, &v);
            let rhs = metric_at(&p, &u, &v) + 2.0 * metric_at(&p, &w, &v);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn group_examples() {
        let q = Sol3Point::new(0.3, -1.2, 0.7);
        assert_eq!(group_mul(&Sol3Point::origin(), &q), q);
        let p = Sol3Point::new(0.0, 0.0, 1.0);
        let e = group_mul(&p, &Sol3Point::new(1.0, 0.0, 0.0));
        assert!((e.x - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!((e.y, e.z), (0.0, 1.0));
    }

    #[test]
    fn group_associativity() {
        let mut rng = rng();
        for _ in 0..100 {
            let p = rand_point(&mut rng);
            let q = rand_point(&mut rng);
            let r = rand_point(&mut rng);
            let a = group_mul(&group_mul(&p, &q), &r);
            let b = group_mul(&p, &group_mul(&q, &r));
            assert!((a.x - b.x).abs() < 1e-12);
            assert!((a.y - b.y).abs() < 1e-12);
            assert!((a.z - b.z).abs() < 1e-12);
        }
    }

    #[test]
    fn left_translation_is_isometry_of_metric() {
        // the differential of q -> p*q is diag(e^{-p.z}, e^{p.z}, 1)
        let mut rng = rng();
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let q = rand_point(&mut rng);
            let u = rand_vec(&mut rng);
            let v = rand_vec(&mut rng);
            let du = CoordVec::new((-p.z).exp() * u.dx, p.z.exp() * u.dy, u.dz);
            let dv = CoordVec::new((-p.z).exp() * v.dx, p.z.exp() * v.dy, v.dz);
            let lhs = metric_at(&group_mul(&p, &q), &du, &dv);
            let rhs = metric_at(&q, &u, &v);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn frame_examples_and_orthonormality() {
        let (e1, e2, e3) = frame_at(&Sol3Point::origin());
        assert_eq!(e1, CoordVec::new(1.0, 0.0, 0.0));
        assert_eq!(e2, CoordVec::new(0.0, 1.0, 0.0));
        assert_eq!(e3, CoordVec::new(0.0, 0.0, 1.0));
        let p1 = Sol3Point::new(0.0, 0.0, 1.0);
        assert!((frame_at(&p1).0.dx - (-1.0f64).exp()).abs() < 1e-15);
        let mut rng = rng();
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let f = frame_at(&p);
            let frame = [f.0, f.1, f.2];
            for i in 0..3 {
                for j in 0..3 {
                    let g = metric_at(&p, &frame[i], &frame[j]);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-12, "gram[{i}][{j}] = {g}");
                }
            }
        }
    }

    #[test]
    fn frame_coord_roundtrip() {
        let mut rng = rng();
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let v = rand_vec(&mut rng);
            let fv = coord_to_frame(&p, &v);
            let back = frame_to_coord(&p, &fv);
            assert!((back.dx - v.dx).abs() < 1e-13);
            assert!((back.dy - v.dy).abs() < 1e-13);
            assert!((back.dz - v.dz).abs() < 1e-13);
            // norm agreement: frame components are orthonormal
            assert!((fv.norm_sq() - metric_at(&p, &v, &v)).abs() < 1e-12);
        }
    }

    #[test]
    fn connection_table() {
        assert_eq!(connection(1, 1).unwrap(), FrameVec::new(0.0, 0.0, -1.0));
        assert_eq!(connection(3, 3).unwrap(), FrameVec::new(0.0, 0.0, 0.0));
        assert_eq!(connection(1, 3).unwrap(), FrameVec::new(1.0, 0.0, 0.0));
        assert_eq!(connection(2, 3).unwrap(), FrameVec::new(0.0, -1.0, 0.0));
        assert_eq!(connection(0, 1), Err(Sol3Error::BadIndex(0)));
        assert_eq!(connection(1, 4), Err(Sol3Error::BadIndex(4)));
    }

    #[test]
    fn connection_metric_compatibility() {
        // <nabla_{Ei}Ej, Ek> + <Ej, nabla_{Ei}Ek> = 0 on the orthonormal frame
        for i in 1..=3u8 {
            for j in 1..=3u8 {
                for k in 1..=3u8 {
                    let nij = connection(i, j).unwrap();
                    let nik = connection(i, k).unwrap();
                    let ej = [0.0, 0.0, 0.0].map(|_| 0.0);
                    let _ = ej;
                    let comp_ij_k = [nij.c1, nij.c2, nij.c3][(k - 1) as usize];
                    let comp_ik_j = [nik.c1, nik.c2, nik.c3][(j - 1) as usize];
                    assert_eq!(comp_ij_k + comp_ik_j, 0.0, "i={i} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn translate_examples() {
        let p = Sol3Point::new(1.0, 1.0, 0.0);
        let t3 = translate(Translation::T3, 1.0, &p);
        assert!((t3.x - (-1.0f64).exp()).abs() < 1e-15);
        assert!((t3.y - 1.0f64.exp()).abs() < 1e-15);
        assert_eq!(t3.z, 1.0);
        for kind in [Translation::T1, Translation::T2, Translation::T3] {
            let q = translate(kind, 0.0, &p);
            assert_eq!(q, p);
        }
    }

    #[test]
    fn translations_are_isometries_numerically() {
        // pull back the metric through a finite-difference differential
        let mut rng = rng();
        let h = 1e-5;
        for _ in 0..100 {
            let p = rand_point(&mut rng);
            let u = rand_vec(&mut rng);
            let v = rand_vec(&mut rng);
            let c = rng.gen_range(-1.0..1.0);
            for kind in [Translation::T1, Translation::T2, Translation::T3] {
                let push = |w: &CoordVec| {
                    let plus = translate(
                        kind,
                        c,
                        &Sol3Point::new(p.x + h * w.dx, p.y + h * w.dy, p.z + h * w.dz),
                    );
                    let minus = translate(
                        kind,
                        c,
                        &Sol3Point::new(p.x - h * w.dx, p.y - h * w.dy, p.z - h * w.dz),
                    );
                    CoordVec::new(
                        (plus.x - minus.x) / (2.0 * h),
                        (plus.y - minus.y) / (2.0 * h),
                        (plus.z - minus.z) / (2.0 * h),
                    )
                };
                let tp = translate(kind, c, &p);
                let lhs = metric_at(&tp, &push(&u), &push(&v));
                let rhs = metric_at(&p, &u, &v);
                assert!(
                    (lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0),
                    "{kind:?} pullback mismatch: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn frame_left_invariance() {
        let mut rng = rng();
        for _ in 0..50 {
            let p = rand_point(&mut rng);
            let q = rand_point(&mut rng);
            let fq = frame_at(&q);
            let target = frame_at(&group_mul(&p, &q));
            // differential of left translation by p is diag(e^{-p.z}, e^{p.z}, 1)
            for (vq, vt) in [(fq.0, target.0), (fq.1, target.1), (fq.2, target.2)] {
                let pushed = CoordVec::new((-p.z).exp() * vq.dx, p.z.exp() * vq.dy, vq.dz);
                assert!((pushed.dx - vt.dx).abs() < 1e-10);
                assert!((pushed.dy - vt.dy).abs() < 1e-10);
                assert!((pushed.dz - vt.dz).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn torsion_freeness_against_fd_bracket() {
        // nabla_{Ei}Ej - nabla_{Ej}Ei equals the Lie bracket [Ei, Ej]
        // computed by central differences of the frame fields.
        let mut rng = rng();
        let h = 1e-5;
        let frame_field = |idx: usize, p: &Sol3Point| -> CoordVec {
            let f = frame_at(p);
            [f.0, f.1, f.2][idx]
        };
        for _ in 0..20 {
            let p = rand_point(&mut rng);
            for i in 0..3usize {
                for j in 0..3usize {
                    // directional derivative of E_j along E_i minus the reverse
                    let di = frame_field(i, &p);
                    let dj = frame_field(j, &p);
                    let deriv = |field: usize, dir: &CoordVec| -> CoordVec {
                        let plus = Sol3Point::new(p.x + h * dir.dx, p.y + h * dir.dy, p.z + h * dir.dz);
                        let minus = Sol3Point::new(p.x - h * dir.dx, p.y - h * dir.dy, p.z - h * dir.dz);
                        let fp = frame_field(field, &plus);
                        let fm = frame_field(field, &minus);
                        CoordVec::new(
                            (fp.dx - fm.dx) / (2.0 * h),
                            (fp.dy - fm.dy) / (2.0 * h),
                            (fp.dz - fm.dz) / (2.0 * h),
                        )
                    };
                    let dji = deriv(j, &di);
                    let dij = deriv(i, &dj);
                    let bracket = CoordVec::new(dji.dx - dij.dx, dji.dy - dij.dy, dji.dz - dij.dz);
                    let nij = connection((i + 1) as u8, (j + 1) as u8).unwrap();
                    let nji = connection((j + 1) as u8, (i + 1) as u8).unwrap();
                    let torsionless = FrameVec::new(nij.c1 - nji.c1, nij.c2 - nji.c2, nij.c3 - nji.c3);
                    let expected = frame_to_coord(&p, &torsionless);
                    assert!((bracket.dx - expected.dx).abs() < 1e-6, "i={i} j={j}");
                    assert!((bracket.dy - expected.dy).abs() < 1e-6, "i={i} j={j}");
                    assert!((bracket.dz - expected.dz).abs() < 1e-6, "i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn phi_examples_and_roundtrip() {
        let s = 0.5;
        let p = Sol3Point::new(s, 0.0, 0.0);
        assert_eq!(phi_s(s, &p).unwrap(), (0.0, 1.0));
        assert!(phi_s(s, &Sol3Point::new(s + 1.0, 0.0, 0.0)).is_err());
        assert!(phi_s_inv(s, 0.0, -1.0).is_err());
        let mut rng = rng();
        for _ in 0..30 {
            let p = Sol3Point::new(s, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (u, v) = phi_s(s, &p).unwrap();
            let back = phi_s_inv(s, u, v).unwrap();
            assert!((back.y - p.y).abs() < 1e-12 && (back.z - p.z).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_is_isometry_to_hyperbolic_plane() {
        // pullback of (du^2 + dv^2)/v^2 equals the metric induced on P_s
        let s = 0.25;
        let h = 1e-6;
        let mut rng = rng();
        for _ in 0..50 {
            let p = Sol3Point::new(s, rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5));
            let w = CoordVec::new(0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let plus = phi_s(s, &Sol3Point::new(s, p.y + h * w.dy, p.z + h * w.dz)).unwrap();
            let minus = phi_s(s, &Sol3Point::new(s, p.y - h * w.dy, p.z - h * w.dz)).unwrap();
            let du = (plus.0 - minus.0) / (2.0 * h);
            let dv = (plus.1 - minus.1) / (2.0 * h);
            let (_, v) = phi_s(s, &p).unwrap();
            let hyp = (du * du + dv * dv) / (v * v);
            let amb = metric_at(&p, &w, &w);
            assert!((hyp - amb).abs() < 1e-8 * amb.max(1.0), "{hyp} vs {amb}");
        }
    }

    #[test]
    fn psi_examples_and_isometry() {
        let p = Sol3Point::new(1.0, 1.0, 1.0);
        let (u, v) = psi_s(1.0, &p).unwrap();
        assert!((u - 1.0f64.exp()).abs() < 1e-15);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(psi_s(0.0, &Sol3Point::new(0.0, 0.0, 0.0)).unwrap(), (0.0, 0.0));
        assert!(psi_s(0.0, &p).is_err());
        let s = -0.4;
        let h = 1e-6;
        let mut rng = rng();
        for _ in 0..50 {
            let p = Sol3Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), s);
            let w = CoordVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0);
            let plus = psi_s(s, &Sol3Point::new(p.x + h * w.dx, p.y + h * w.dy, s)).unwrap();
            let minus = psi_s(s, &Sol3Point::new(p.x - h * w.dx, p.y - h * w.dy, s)).unwrap();
            let du = (plus.0 - minus.0) / (2.0 * h);
            let dv = (plus.1 - minus.1) / (2.0 * h);
            let eucl = du * du + dv * dv;
            let amb = metric_at(&p, &w, &w);
            assert!((eucl - amb).abs() < 1e-8 * amb.max(1.0));
            let back = psi_s_inv(s, plus.0, plus.1);
            assert!((back.x - (p.x + h * w.dx)).abs() < 1e-12);
        }
    }
}
