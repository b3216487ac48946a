//! First and second fundamental forms of parametrized charts in Sol3,
//! symbolically (through the exact engine) and numerically.
//!
//! For a chart `X(s,t) = (x, y, z)` the frame components of a coordinate
//! partial are `(e^z dx, e^{-z} dy, dz)`. Second-form entries are taken
//! against a normal field that need not be unit; the H-numerator
//! `E n - 2 F m + G l` and the K-numerator `l n - m^2` vanish identically
//! iff the surface is minimal resp. has vanishing extrinsic K wherever
//! `EG - F^2 != 0`.

use crate::sol3::connection_coeff;
use crate::symtrig::{
    differentiate, eval, normalize, substitute, Bindings, FuncSym, Result, SymError, SymExpr, Var,
};

/// A parametrized surface chart with symbolic components.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    pub x: SymExpr,
    pub y: SymExpr,
    pub z: SymExpr,
    pub s_domain: (f64, f64),
    pub t_domain: (f64, f64),
    pub label: Option<String>,
    /// Frame components of a preset (non-unit) normal, when the chart
    /// carries one.
    pub preset_normal: Option<[SymExpr; 3]>,
}

impl SurfaceChart {
    pub fn new(x: SymExpr, y: SymExpr, z: SymExpr) -> SurfaceChart {
        SurfaceChart {
            x,
            y,
            z,
            s_domain: (-1.0, 1.0),
            t_domain: (-1.0, 1.0),
            label: None,
            preset_normal: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> SurfaceChart {
        self.label = Some(label.into());
        self
    }

    pub fn with_domains(mut self, s_domain: (f64, f64), t_domain: (f64, f64)) -> SurfaceChart {
        self.s_domain = s_domain;
        self.t_domain = t_domain;
        self
    }

    pub fn with_preset_normal(mut self, normal: [SymExpr; 3]) -> SurfaceChart {
        self.preset_normal = Some(normal);
        self
    }

    /// Substitute a function symbol (with its derivatives) in every
    /// component and in the preset normal.
    pub fn bind(&self, sym: FuncSym, replacement: &SymExpr) -> Result<SurfaceChart> {
        let subst_c = |e: &SymExpr| substitute(e, sym, replacement);
        let preset = match &self.preset_normal {
            None => None,
            Some([n1, n2, n3]) => Some([subst_c(n1)?, subst_c(n2)?, subst_c(n3)?]),
        };
        Ok(SurfaceChart {
            x: subst_c(&self.x)?,
            y: subst_c(&self.y)?,
            z: subst_c(&self.z)?,
            s_domain: self.s_domain,
            t_domain: self.t_domain,
            label: self.label.clone(),
            preset_normal: preset,
        })
    }

    /// Numeric position of the chart at `(s, t)`.
    pub fn position(&self, s: f64, t: f64, bindings: &Bindings) -> Result<crate::sol3::Sol3Point> {
        Ok(crate::sol3::Sol3Point::new(
            eval(&self.x, s, t, bindings)?,
            eval(&self.y, s, t, bindings)?,
            eval(&self.z, s, t, bindings)?,
        ))
    }
}

/// Which normal to use for the second fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalChoice {
    /// The chart's preset normal (falls back to the cross product when
    /// the chart has none).
    #[default]
    Preset,
    /// The frame cross product `Xs x Xt` (orientation `E1 x E2 = E3`).
    Cross,
}

/// Frame components of the coordinate partials of the chart.
pub fn partials(chart: &SurfaceChart) -> Result<([SymExpr; 3], [SymExpr; 3])> {
    let ez = chart.z.clone().exp();
    let einv = chart.z.clone().neg().exp();
    let comp = |var: Var| -> Result<[SymExpr; 3]> {
        Ok([
            normalize(&SymExpr::mul(vec![ez.clone(), differentiate(&chart.x, var)]))?,
            normalize(&SymExpr::mul(vec![einv.clone(), differentiate(&chart.y, var)]))?,
            normalize(&differentiate(&chart.z, var))?,
        ])
    };
    Ok((comp(Var::S)?, comp(Var::T)?))
}

/// Covariant derivative of a frame vector field `v` along the chart
/// direction `dir`: the directional derivative of the components plus the
/// connection terms contracted with the frame components of `X_dir`.
pub fn covariant_derivative(
    v: &[SymExpr; 3],
    dir: Var,
    chart: &SurfaceChart,
) -> Result<[SymExpr; 3]> {
    let (xs, xt) = partials(chart)?;
    let w = if dir == Var::S { &xs } else { &xt };
    covariant_derivative_along(v, dir, w)
}

/// Same as [`covariant_derivative`] with the direction field supplied
/// explicitly (avoids recomputing partials).
pub fn covariant_derivative_along(
    v: &[SymExpr; 3],
    dir: Var,
    w: &[SymExpr; 3],
) -> Result<[SymExpr; 3]> {
    let mut out: [Vec<SymExpr>; 3] = [
        vec![differentiate(&v[0], dir)],
        vec![differentiate(&v[1], dir)],
        vec![differentiate(&v[2], dir)],
    ];
    for i in 0..3 {
        for j in 0..3 {
            for (k, slot) in out.iter_mut().enumerate() {
                let c = connection_coeff(i, j, k);
                if c != 0 {
                    slot.push(SymExpr::mul(vec![
                        SymExpr::int(c),
                        w[i].clone(),
                        v[j].clone(),
                    ]));
                }
            }
        }
    }
    Ok([
        normalize(&SymExpr::add(out[0].clone()))?,
        normalize(&SymExpr::add(out[1].clone()))?,
        normalize(&SymExpr::add(out[2].clone()))?,
    ])
}

fn dot(u: &[SymExpr; 3], v: &[SymExpr; 3]) -> SymExpr {
    SymExpr::add(
        (0..3)
            .map(|i| SymExpr::mul(vec![u[i].clone(), v[i].clone()]))
            .collect(),
    )
}

fn cross(u: &[SymExpr; 3], v: &[SymExpr; 3]) -> [SymExpr; 3] {
    let term = |a: usize, b: usize| {
        SymExpr::sub(
            SymExpr::mul(vec![u[a].clone(), v[b].clone()]),
            SymExpr::mul(vec![u[b].clone(), v[a].clone()]),
        )
    };
    [term(1, 2), term(2, 0), term(0, 1)]
}

/// The normal used for second-form entries, per the chosen mode.
pub fn normal(chart: &SurfaceChart, choice: NormalChoice) -> Result<[SymExpr; 3]> {
    if choice == NormalChoice::Preset {
        if let Some(n) = &chart.preset_normal {
            return Ok(n.clone());
        }
    }
    let (xs, xt) = partials(chart)?;
    let c = cross(&xs, &xt);
    Ok([normalize(&c[0])?, normalize(&c[1])?, normalize(&c[2])?])
}

/// First and second fundamental quantities of a chart against a stated
/// (non-unit) normal.
#[derive(Debug, Clone)]
pub struct FundamentalData {
    pub e: SymExpr,
    pub f: SymExpr,
    pub g: SymExpr,
    pub l: SymExpr,
    pub m: SymExpr,
    pub n: SymExpr,
    pub ntilde: [SymExpr; 3],
    pub xs: [SymExpr; 3],
    pub xt: [SymExpr; 3],
}

pub fn fundamental_data(chart: &SurfaceChart, choice: NormalChoice) -> Result<FundamentalData> {
    let (xs, xt) = partials(chart)?;
    let ntilde = normal(chart, choice)?;
    let e = normalize(&dot(&xs, &xs))?;
    let f = normalize(&dot(&xs, &xt))?;
    let g = normalize(&dot(&xt, &xt))?;
    let dss = covariant_derivative_along(&xs, Var::S, &xs)?;
    let dst = covariant_derivative_along(&xt, Var::S, &xs)?;
    let dtt = covariant_derivative_along(&xt, Var::T, &xt)?;
    let l = normalize(&dot(&dss, &ntilde))?;
    let m = normalize(&dot(&dst, &ntilde))?;
    let n = normalize(&dot(&dtt, &ntilde))?;
    Ok(FundamentalData { e, f, g, l, m, n, ntilde, xs, xt })
}

/// The mixed second-form entry computed the other way, as
/// `<nabla_{X_t} X_s, N>`; symbolically equal to `m` by symmetry of the
/// connection.
pub fn m_transposed(chart: &SurfaceChart, choice: NormalChoice) -> Result<SymExpr> {
    let (xs, xt) = partials(chart)?;
    let ntilde = normal(chart, choice)?;
    let dts = covariant_derivative_along(&xs, Var::T, &xt)?;
    normalize(&dot(&dts, &ntilde))
}

/// `E n - 2 F m + G l` with the non-unit normal, normalized.
pub fn h_numerator(chart: &SurfaceChart, choice: NormalChoice) -> Result<SymExpr> {
    let fd = fundamental_data(chart, choice)?;
    h_numerator_of(&fd)
}

pub fn h_numerator_of(fd: &FundamentalData) -> Result<SymExpr> {
    normalize(&SymExpr::add(vec![
        SymExpr::mul(vec![fd.e.clone(), fd.n.clone()]),
        SymExpr::mul(vec![SymExpr::int(-2), fd.f.clone(), fd.m.clone()]),
        SymExpr::mul(vec![fd.g.clone(), fd.l.clone()]),
    ]))
}

/// `l n - m^2` with the non-unit normal, normalized.
pub fn k_numerator(chart: &SurfaceChart, choice: NormalChoice) -> Result<SymExpr> {
    let fd = fundamental_data(chart, choice)?;
    k_numerator_of(&fd)
}

pub fn k_numerator_of(fd: &FundamentalData) -> Result<SymExpr> {
    normalize(&SymExpr::sub(
        SymExpr::mul(vec![fd.l.clone(), fd.n.clone()]),
        fd.m.clone().pow(2),
    ))
}

/// Tolerance below which `EG - F^2` is treated as degenerate in numeric
/// mode.
pub const DEGENERATE_METRIC_TOL: f64 = 1e-12;

/// Precomputed symbolic fundamental data for repeated numeric evaluation.
pub struct CurvatureEvaluator {
    pub fd: FundamentalData,
}

impl CurvatureEvaluator {
    pub fn new(chart: &SurfaceChart, choice: NormalChoice) -> Result<CurvatureEvaluator> {
        Ok(CurvatureEvaluator { fd: fundamental_data(chart, choice)? })
    }

    fn first_second(&self, s: f64, t: f64, b: &Bindings) -> Result<(f64, f64, f64, f64, f64, f64, f64)> {
        let fd = &self.fd;
        let e = eval(&fd.e, s, t, b)?;
        let f = eval(&fd.f, s, t, b)?;
        let g = eval(&fd.g, s, t, b)?;
        let det = e * g - f * f;
        if det <= DEGENERATE_METRIC_TOL {
            return Err(SymError::Singularity);
        }
        let l = eval(&fd.l, s, t, b)?;
        let m = eval(&fd.m, s, t, b)?;
        let n = eval(&fd.n, s, t, b)?;
        let mut nn = 0.0;
        for c in &fd.ntilde {
            let v = eval(c, s, t, b)?;
            nn += v * v;
        }
        Ok((e, f, g, l, m, n, nn.sqrt()))
    }

    /// Mean curvature with the unit normal `Ntilde / |Ntilde|`.
    pub fn mean(&self, s: f64, t: f64, b: &Bindings) -> Result<f64> {
        let (e, f, g, l, m, n, nnorm) = self.first_second(s, t, b)?;
        if nnorm <= DEGENERATE_METRIC_TOL {
            return Err(SymError::Singularity);
        }
        Ok((e * n - 2.0 * f * m + g * l) / (2.0 * (e * g - f * f) * nnorm))
    }

    /// The extrinsic curvature `(l n - m^2)/(EG - F^2)` with the unit
    /// normal (the paper's K).
    pub fn gauss_paper(&self, s: f64, t: f64, b: &Bindings) -> Result<f64> {
        let (e, f, g, l, m, n, nnorm) = self.first_second(s, t, b)?;
        if nnorm <= DEGENERATE_METRIC_TOL {
            return Err(SymError::Singularity);
        }
        Ok((l * n - m * m) / ((e * g - f * f) * nnorm * nnorm))
    }
}

/// One-off mean curvature at a point.
pub fn mean_curvature_numeric(
    chart: &SurfaceChart,
    s: f64,
    t: f64,
    bindings: &Bindings,
) -> Result<f64> {
    CurvatureEvaluator::new(chart, NormalChoice::Preset)?.mean(s, t, bindings)
}

/// One-off extrinsic Gaussian curvature at a point.
pub fn gauss_curvature_numeric(
    chart: &SurfaceChart,
    s: f64,
    t: f64,
    bindings: &Bindings,
) -> Result<f64> {
    CurvatureEvaluator::new(chart, NormalChoice::Preset)?.gauss_paper(s, t, bindings)
}
