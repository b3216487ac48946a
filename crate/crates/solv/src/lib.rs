//! A symbolic and numerical workbench for surfaces in the homogeneous
//! space Sol3.
//!
//! Sol3 is modeled as R^3 with the left-invariant metric
//! `e^{2z} dx^2 + e^{-2z} dy^2 + dz^2`. The crate provides:
//!
//! - [`sol3`]: the ambient space (metric, group law, orthonormal frame,
//!   connection table, isometries, foliations, model maps to the
//!   hyperbolic and Euclidean planes);
//! - [`symtrig`]: an exact expression engine over the variables `s`, `t`
//!   and the function symbols `a`, `b`, `r`, with a parser, symbolic
//!   differentiation, canonical normalization, and extraction of
//!   trigonometric-polynomial and quasi-polynomial coefficient forms;
//! - [`curvature`]: first and second fundamental forms of parametrized
//!   charts, the H- and K-numerators whose coefficientwise vanishing
//!   drives the classification results, and numeric curvature evaluation;
//! - [`families`]: constructors for circles, geodesics, equidistant
//!   lines and horocycles in the totally geodesic leaves, the cyclic
//!   charts they foliate, and the classified minimal/flat surfaces;
//! - [`oracle`]: an independent finite-difference verifier (coordinate
//!   Christoffel symbols, curvatures from raw partials, intrinsic Gauss
//!   curvature, ODE residual checks);
//! - [`verify`]: structured verification runs for the classification
//!   theorems, used by the `solv` command-line tool;
//! - [`mesh`]: deterministic OBJ export of sampled charts.

pub mod curvature;
pub mod sol3;
pub mod symtrig;
