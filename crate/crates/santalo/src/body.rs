//! Convex bodies containing the origin in their interior, described by their
//! gauge `||x||_K = inf { r > 0 : x in rK }` and support function `h_K`.
//!
//! The support function of `K` is the gauge of the polar `K°`, so every body
//! has a polar: closed forms where one exists, otherwise an implicit polar
//! whose gauge is a numerical support-function search.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::lp::max_over_halfspaces;
use crate::sphere::{direction_sequence, SphereRule};

const VERTEX_TOL: f64 = 1e-9;

/// Which description of a polytope was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Halfspaces,
    Vertices,
}

/// `{x : <a_i, x> <= 1}` = `conv(v_j)`; in dimension at most three both lists are complete.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    normals: Vec<Vec<f64>>,
    vertices: Vec<Vec<f64>>,
    given: Rep,
    complete: bool,
}

impl Polytope {
    pub fn from_normals(normals: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_point_list(&normals, "normal")?;
        check_bounded(&normals, dim)?;
        let (vertices, complete) = if dim <= 3 { (enumerate_vertices(&normals, dim), true) } else { (Vec::new(), false) };
        Ok(Self { dim, normals, vertices, given: Rep::Halfspaces, complete })
    }

    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_point_list(&vertices, "vertex")?;
        // conv(V) has the origin inside iff its polar {y : <v, y> <= 1} is bounded.
        check_bounded(&vertices, dim).map_err(|_| {
            Error::Unbounded("vertex hull does not contain the origin in its interior".into())
        })?;
        let (normals, complete) = if dim <= 3 { (enumerate_vertices(&vertices, dim), true) } else { (Vec::new(), false) };
        Ok(Self { dim, normals, vertices, given: Rep::Vertices, complete })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn given(&self) -> Rep {
        self.given
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    fn has_normals(&self) -> bool {
        self.complete || self.given == Rep::Halfspaces
    }

    fn has_vertices(&self) -> bool {
        self.complete || self.given == Rep::Vertices
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        if self.has_normals() {
            self.normals.iter().map(|a| dot(a, x)).fold(0.0, f64::max)
        } else {
            max_over_halfspaces(&self.vertices, x).expect("validated polytope").max(0.0)
        }
    }

    pub fn support(&self, y: &[f64]) -> f64 {
        if self.has_vertices() {
            self.vertices.iter().map(|v| dot(v, y)).fold(f64::NEG_INFINITY, f64::max)
        } else {
            max_over_halfspaces(&self.normals, y).expect("validated polytope")
        }
    }

    /// The polar polytope: normals and vertices trade places.
    pub fn polar(&self) -> Self {
        Self {
            dim: self.dim,
            normals: self.vertices.clone(),
            vertices: self.normals.clone(),
            given: match self.given {
                Rep::Halfspaces => Rep::Vertices,
                Rep::Vertices => Rep::Halfspaces,
            },
            complete: self.complete,
        }
    }

    /// Exact volume from the vertex/facet incidence (dimension at most three).
    pub fn volume(&self) -> Option<f64> {
        if !self.complete {
            return None;
        }
        match self.dim {
            1 => {
                let xs: Vec<f64> = self.vertices.iter().map(|v| v[0]).collect();
                Some(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min))
            }
            2 => {
                let mut vs = self.vertices.clone();
                vs.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
                let area: f64 = (0..vs.len())
                    .map(|i| {
                        let (p, q) = (&vs[i], &vs[(i + 1) % vs.len()]);
                        p[0] * q[1] - p[1] * q[0]
                    })
                    .sum();
                Some(0.5 * area.abs())
            }
            3 => {
                let mut total = 0.0;
                let mut seen: Vec<Vec<f64>> = Vec::new();
                for a in &self.normals {
                    if seen.iter().any(|s| s.iter().zip(a).all(|(u, v)| (u - v).abs() < VERTEX_TOL)) {
                        continue;
                    }
                    seen.push(a.clone());
                    let face: Vec<&Vec<f64>> =
                        self.vertices.iter().filter(|v| (dot(a, v) - 1.0).abs() < 1e-7).collect();
                    if face.len() < 3 {
                        continue;
                    }
                    let c: Vec<f64> =
                        (0..3).map(|j| face.iter().map(|v| v[j]).sum::<f64>() / face.len() as f64).collect();
                    let na = norm(a);
                    let unit: Vec<f64> = a.iter().map(|t| t / na).collect();
                    let e1 = {
                        let d: Vec<f64> = face[0].iter().zip(&c).map(|(p, q)| p - q).collect();
                        let r = norm(&d);
                        d.iter().map(|t| t / r).collect::<Vec<f64>>()
                    };
                    let e2 = cross(&unit, &e1);
                    let mut ring: Vec<(f64, &Vec<f64>)> = face
                        .iter()
                        .map(|v| {
                            let d: Vec<f64> = v.iter().zip(&c).map(|(p, q)| p - q).collect();
                            (dot(&d, &e2).atan2(dot(&d, &e1)), *v)
                        })
                        .collect();
                    ring.sort_by(|x, y| x.0.total_cmp(&y.0));
                    let mut area_vec = [0.0; 3];
                    for i in 0..ring.len() {
                        let cr = cross(ring[i].1, ring[(i + 1) % ring.len()].1);
                        for j in 0..3 {
                            area_vec[j] += cr[j];
                        }
                    }
                    let area = 0.5 * dot(&area_vec, &unit).abs();
                    total += area / (3.0 * na);
                }
                Some(total)
            }
            _ => None,
        }
    }
}

fn check_point_list(points: &[Vec<f64>], what: &str) -> Result<usize> {
    let dim = points.first().map(|p| p.len()).ok_or_else(|| arg(format!("empty {what} list")))?;
    if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(arg(format!("{what} list has inconsistent or non-finite entries")));
    }
    Ok(dim)
}

fn check_bounded(normals: &[Vec<f64>], dim: usize) -> Result<()> {
    for j in 0..dim {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; dim];
            c[j] = sign;
            max_over_halfspaces(normals, &c)?;
        }
    }
    Ok(())
}

/// Vertices of `{y : <a_i, y> <= 1}` by solving every `dim`-subset (dimension at most three).
fn enumerate_vertices(normals: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let m = normals.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |y: Vec<f64>| {
        if normals.iter().all(|a| dot(a, &y) <= 1.0 + VERTEX_TOL)
            && !out.iter().any(|v| v.iter().zip(&y).all(|(p, q)| (p - q).abs() < VERTEX_TOL))
        {
            out.push(y);
        }
    };
    let solve = |rows: &[&Vec<f64>]| -> Option<Vec<f64>> {
        let a = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        let scale = rows.iter().map(|r| norm(r)).fold(0.0, f64::max);
        if a.determinant().abs() < 1e-12 * scale.powi(dim as i32) {
            return None;
        }
        a.lu().solve(&DVector::from_element(dim, 1.0)).map(|v| v.iter().copied().collect())
    };
    match dim {
        1 => {
            for a in normals {
                if a[0].abs() > 1e-15 {
                    push(vec![1.0 / a[0]]);
                }
            }
        }
        2 => {
            for i in 0..m {
                for j in i + 1..m {
                    if let Some(y) = solve(&[&normals[i], &normals[j]]) {
                        push(y);
                    }
                }
            }
        }
        3 => {
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        if let Some(y) = solve(&[&normals[i], &normals[j], &normals[k]]) {
                            push(y);
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Regular simplex with circumradius one and centroid at the origin.
pub fn regular_simplex_vertices(dim: usize) -> Vec<Vec<f64>> {
    let n = dim;
    let scale = ((n + 1) as f64 / n as f64).sqrt();
    (0..=n)
        .map(|i| {
            (1..=n)
                .map(|k| {
                    // Helmert basis vector k: k ones, then -k, normalized.
                    let norm_k = ((k * (k + 1)) as f64).sqrt();
                    let coord = if i < k {
                        1.0
                    } else if i == k {
                        -(k as f64)
                    } else {
                        0.0
                    };
                    scale * coord / norm_k
                })
                .collect()
        })
        .collect()
}

/// A convex body given by one of the supported descriptions.
#[derive(Debug, Clone)]
pub enum ConvexBodySpec {
    /// Unit ball of the `l_p` norm, `1 <= p <= inf`.
    LpBall { dim: usize, p: f64 },
    /// `{x : x^T A x <= 1}` for symmetric positive definite `A`.
    Ellipsoid { matrix: DMatrix<f64>, inverse: DMatrix<f64> },
    HPolytope(Polytope),
    VPolytope(Polytope),
    CenteredSimplex(Polytope),
    /// Gauge `sqrt(||x||_base^2 + lambda |x|^2)`.
    Firey { base: Box<ConvexBodySpec>, lambda: f64 },
    /// The polar of the inner body, evaluated through its support function.
    Polar(Box<ConvexBodySpec>),
    /// The body `map^{-1}(base)`: gauge `x -> ||map x||_base`.
    Linear { base: Box<ConvexBodySpec>, map: DMatrix<f64>, inverse_transpose: DMatrix<f64> },
    /// The body `base + shift`; the origin must stay interior.
    Translated { base: Box<ConvexBodySpec>, shift: Vec<f64> },
}

impl ConvexBodySpec {
    pub fn lp_ball(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(arg("dimension must be positive"));
        }
        if !(p >= 1.0) {
            return Err(arg(format!("l_p ball needs p >= 1, got {p}")));
        }
        Ok(Self::LpBall { dim, p })
    }

    pub fn euclidean_ball(dim: usize) -> Result<Self> {
        Self::lp_ball(dim, 2.0)
    }

    pub fn cube(dim: usize) -> Result<Self> {
        Self::lp_ball(dim, f64::INFINITY)
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(arg("ellipsoid matrix must be square and nonempty"));
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 * matrix.abs().max().max(1.0) {
            return Err(arg("ellipsoid matrix must be symmetric"));
        }
        let chol = matrix.clone().cholesky().ok_or_else(|| arg("ellipsoid matrix must be positive definite"))?;
        let inverse = chol.inverse();
        Ok(Self::Ellipsoid { matrix, inverse })
    }

    pub fn diagonal_ellipsoid(diag: &[f64]) -> Result<Self> {
        Self::ellipsoid(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn h_polytope(normals: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::HPolytope(Polytope::from_normals(normals)?))
    }

    pub fn v_polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::VPolytope(Polytope::from_vertices(vertices)?))
    }

    pub fn centered_simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(arg("dimension must be positive"));
        }
        Ok(Self::CenteredSimplex(Polytope::from_vertices(regular_simplex_vertices(dim))?))
    }

    pub fn firey(base: ConvexBodySpec, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(arg(format!("Firey parameter must be positive, got {lambda}")));
        }
        Ok(Self::Firey { base: Box::new(base), lambda })
    }

    /// The body `{x : map x in base}`.
    pub fn linear_image(base: ConvexBodySpec, map: DMatrix<f64>) -> Result<Self> {
        let n = base.dim();
        if map.nrows() != n || map.ncols() != n {
            return Err(arg("linear map must be square with the body's dimension"));
        }
        let inv = map.clone().try_inverse().ok_or_else(|| arg("linear map must be invertible"))?;
        Ok(Self::Linear { base: Box::new(base), map, inverse_transpose: inv.transpose() })
    }

    /// `{x : x / r in base}`.
    pub fn scaled(base: ConvexBodySpec, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(arg("scale must be positive"));
        }
        let n = base.dim();
        Self::linear_image(base, DMatrix::identity(n, n) / r)
    }

    pub fn translated(base: ConvexBodySpec, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != base.dim() {
            return Err(arg("shift dimension does not match the body"));
        }
        let neg: Vec<f64> = shift.iter().map(|v| -v).collect();
        if base.gauge(&neg) >= 1.0 - 1e-12 {
            return Err(Error::Unbounded("translate does not contain the origin in its interior".into()));
        }
        Ok(Self::Translated { base: Box::new(base), shift })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::LpBall { dim, .. } => *dim,
            Self::Ellipsoid { matrix, .. } => matrix.nrows(),
            Self::HPolytope(p) | Self::VPolytope(p) | Self::CenteredSimplex(p) => p.dim(),
            Self::Firey { base, .. } | Self::Polar(base) | Self::Linear { base, .. } | Self::Translated { base, .. } => {
                base.dim()
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::LpBall { dim, p } => format!("lp_ball(dim={dim},p={p})"),
            Self::Ellipsoid { matrix, .. } => format!("ellipsoid(dim={})", matrix.nrows()),
            Self::HPolytope(p) => format!("h_polytope(dim={},facets={})", p.dim(), p.normals().len()),
            Self::VPolytope(p) => format!("v_polytope(dim={},vertices={})", p.dim(), p.vertices().len()),
            Self::CenteredSimplex(p) => format!("centered_simplex(dim={})", p.dim()),
            Self::Firey { base, lambda } => format!("firey({},lambda={lambda})", base.describe()),
            Self::Polar(b) => format!("polar({})", b.describe()),
            Self::Linear { base, .. } => format!("linear({})", base.describe()),
            Self::Translated { base, shift } => format!("translated({},shift={shift:?})", base.describe()),
        }
    }

    /// Central symmetry known from the description.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::LpBall { .. } | Self::Ellipsoid { .. } => true,
            Self::HPolytope(p) | Self::VPolytope(p) => {
                let pts = if p.given() == Rep::Halfspaces { p.normals() } else { p.vertices() };
                pts.iter().all(|v| {
                    pts.iter().any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() < VERTEX_TOL))
                })
            }
            Self::CenteredSimplex(_) => false,
            Self::Firey { base, .. } | Self::Polar(base) | Self::Linear { base, .. } => base.is_symmetric(),
            Self::Translated { base, shift } => base.is_symmetric() && shift.iter().all(|v| *v == 0.0),
        }
    }

    /// Minkowski functional `||x||_K`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match self {
            Self::LpBall { p, .. } => lp_norm(x, *p),
            Self::Ellipsoid { matrix, .. } => quad_form(matrix, x).max(0.0).sqrt(),
            Self::HPolytope(p) | Self::VPolytope(p) | Self::CenteredSimplex(p) => p.gauge(x),
            Self::Firey { base, lambda } => {
                let g = base.gauge(x);
                (g * g + lambda * dot(x, x)).sqrt()
            }
            Self::Polar(b) => b.support(x),
            Self::Linear { base, map, .. } => base.gauge(&mat_vec(map, x)),
            Self::Translated { base, shift } => translated_gauge(base, shift, x),
        }
    }

    /// Support function `h_K(y) = sup_{x in K} <x, y>`, the gauge of the polar.
    pub fn support(&self, y: &[f64]) -> f64 {
        match self {
            Self::LpBall { p, .. } => lp_norm(y, conjugate_exponent(*p)),
            Self::Ellipsoid { inverse, .. } => quad_form(inverse, y).max(0.0).sqrt(),
            Self::HPolytope(p) | Self::VPolytope(p) | Self::CenteredSimplex(p) => p.support(y),
            Self::Firey { .. } => support_by_search(self, y),
            Self::Polar(b) => b.gauge(y),
            Self::Linear { base, inverse_transpose, .. } => base.support(&mat_vec(inverse_transpose, y)),
            Self::Translated { base, shift } => base.support(y) + dot(shift, y),
        }
    }

    /// Radial function `1 / ||theta||_K`.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        1.0 / self.gauge(theta)
    }

    pub fn polar(&self) -> Self {
        match self {
            Self::LpBall { dim, p } => Self::LpBall { dim: *dim, p: conjugate_exponent(*p) },
            Self::Ellipsoid { matrix, inverse } => Self::Ellipsoid { matrix: inverse.clone(), inverse: matrix.clone() },
            Self::HPolytope(p) => Self::VPolytope(p.polar()),
            Self::VPolytope(p) => Self::HPolytope(p.polar()),
            Self::CenteredSimplex(p) => Self::HPolytope(p.polar()),
            Self::Polar(b) => (**b).clone(),
            Self::Linear { base, map, inverse_transpose } => Self::Linear {
                base: Box::new(base.polar()),
                map: inverse_transpose.clone(),
                inverse_transpose: map.clone(),
            },
            Self::Firey { .. } | Self::Translated { .. } => Self::Polar(Box::new(self.clone())),
        }
    }

    /// Per-axis `[-h_K(-e_i), h_K(e_i)]`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let hi = self.support(&e);
                e[i] = -1.0;
                let lo = -self.support(&e);
                (lo, hi)
            })
            .unzip()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Volume from a closed form, if the description has one.
    pub fn closed_form_volume(&self) -> Option<f64> {
        match self {
            Self::LpBall { dim, p } => Some(lp_ball_volume(*dim, *p)),
            Self::Ellipsoid { matrix, .. } => Some(crate::sphere::ball_volume(matrix.nrows()) / matrix.determinant().sqrt()),
            Self::HPolytope(p) | Self::VPolytope(p) | Self::CenteredSimplex(p) => p.volume(),
            Self::Linear { base, map, .. } => base.closed_form_volume().map(|v| v / map.determinant().abs()),
            Self::Translated { base, .. } => base.closed_form_volume(),
            Self::Polar(b) => match &**b {
                Self::Firey { .. } | Self::Translated { .. } => None,
                other => other.polar().closed_form_volume(),
            },
            Self::Firey { .. } => None,
        }
    }

    fn smoothness(&self) -> Smoothness {
        match self {
            Self::LpBall { p, .. } if *p >= 2.0 && p.is_finite() => Smoothness::Smooth,
            Self::LpBall { p, .. } => Smoothness::Rough(format!("l_p ball with p={p} has a squared gauge that is not C^2")),
            Self::Ellipsoid { .. } => Smoothness::Smooth,
            Self::HPolytope(_) | Self::VPolytope(_) | Self::CenteredSimplex(_) => {
                Smoothness::Rough("polytope gauges are piecewise linear".into())
            }
            Self::Firey { base, .. } => match base.smoothness() {
                Smoothness::Smooth => Smoothness::Smooth,
                _ => Smoothness::Piecewise,
            },
            Self::Polar(b) => match &**b {
                Self::Polar(inner) => inner.smoothness(),
                Self::Firey { .. } | Self::Translated { .. } => match b.smoothness() {
                    Smoothness::Smooth => Smoothness::Smooth,
                    _ => Smoothness::Piecewise,
                },
                other => other.polar().smoothness(),
            },
            Self::Linear { base, .. } | Self::Translated { base, .. } => base.smoothness(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Smoothness {
    Smooth,
    /// Smooth away from a null set of kinks, which sampling skips.
    Piecewise,
    Rough(String),
}

pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `|B_p^n| = (2 Gamma(1 + 1/p))^n / Gamma(1 + n/p)`.
pub fn lp_ball_volume(dim: usize, p: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let n = dim as f64;
    if p.is_infinite() {
        return 2f64.powi(dim as i32);
    }
    (n * (2.0f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + n / p)).exp()
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn quad_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * m[(i, j)] * x[j];
        }
    }
    acc
}

fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// `1 / sup { u >= 0 : ||u x - shift||_base <= 1 }` by bracketing and bisection.
fn translated_gauge(base: &ConvexBodySpec, shift: &[f64], x: &[f64]) -> f64 {
    if x.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let at = |u: f64| -> f64 {
        let z: Vec<f64> = x.iter().zip(shift).map(|(a, s)| u * a - s).collect();
        base.gauge(&z)
    };
    let mut hi = 1.0;
    while at(hi) <= 1.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return 0.0;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    1.0 / (0.5 * (lo + hi))
}

/// `sup_theta <theta, y> / ||theta||_K` by a coarse sphere scan and local refinement.
pub fn support_by_search(body: &ConvexBodySpec, y: &[f64]) -> f64 {
    let n = body.dim();
    if y.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let ratio = |t: &[f64]| dot(t, y) / body.gauge(t);
    if n == 1 {
        return ratio(&[1.0]).max(ratio(&[-1.0]));
    }
    if n == 2 {
        let coarse = 512;
        let step = 2.0 * PI / coarse as f64;
        let at = |a: f64| ratio(&[a.cos(), a.sin()]);
        let (mut best_a, mut best) = (0.0, f64::NEG_INFINITY);
        for k in 0..coarse {
            let a = k as f64 * step;
            let v = at(a);
            if v > best {
                best = v;
                best_a = a;
            }
        }
        // Golden-section search on the bracket around the coarse maximum.
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (best_a - step, best_a + step);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (at(c), at(d));
        for _ in 0..80 {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = at(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = at(d);
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        return best.max(fc).max(fd);
    }
    let coarse = if n == 3 { 600 } else { 4000 };
    let dirs = direction_sequence(n, coarse);
    let mut best_t = dirs[0].clone();
    let mut best = f64::NEG_INFINITY;
    for d in &dirs {
        let v = ratio(d);
        if v > best {
            best = v;
            best_t = d.clone();
        }
    }
    let mut delta = 2.0 * (4.0 * PI / coarse as f64).sqrt();
    while delta > 1e-10 {
        let tangents = tangent_basis(&best_t);
        let mut moved = false;
        for t in &tangents {
            for sign in [1.0, -1.0] {
                let mut cand: Vec<f64> = best_t.iter().zip(t).map(|(a, b)| a + sign * delta * b).collect();
                let r = norm(&cand);
                cand.iter_mut().for_each(|v| *v /= r);
                let v = ratio(&cand);
                if v > best {
                    best = v;
                    best_t = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            delta *= 0.5;
        }
    }
    best
}

fn tangent_basis(t: &[f64]) -> Vec<Vec<f64>> {
    let n = t.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        let proj = dot(&v, t);
        v.iter_mut().zip(t).for_each(|(a, b)| *a -= proj * b);
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
        }
        let r = norm(&v);
        if r > 1e-8 {
            v.iter_mut().for_each(|a| *a /= r);
            basis.push(v);
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

/// Curvature of `1/2 ||.||_K^2` after a linear normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// Ratio of the smallest to the largest sampled Hessian eigenvalue in the normalized frame.
    pub kappa_sq_lower: f64,
    /// Largest Hessian eigenvalue of the squared base gauge (Firey bodies) or of the body itself.
    pub lambda_max_m: f64,
    pub hessian_min: f64,
    pub hessian_max: f64,
    /// Matrix `T` with the normalized body `T^{-1} K`.
    pub normalizing_map: Vec<Vec<f64>>,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Step of the finite-difference Hessian, relative to `|x|`.
pub const HESSIAN_STEP: f64 = 1e-4;
const HESSIAN_BLOWUP: f64 = 1e6;

enum HessianSample {
    Smooth(DMatrix<f64>),
    Kink,
}

fn half_sq_hessian(body: &ConvexBodySpec, x: &[f64]) -> HessianSample {
    let r = norm(x);
    let z: Vec<f64> = x.iter().map(|v| v / r).collect();
    let psi = |p: &[f64]| 0.5 * body.gauge(p).powi(2);
    let fd = |h: f64| -> DMatrix<f64> {
        let n = z.len();
        let mut hm = DMatrix::zeros(n, n);
        let f0 = psi(&z);
        let mut y = z.clone();
        for i in 0..n {
            y[i] = z[i] + h;
            let fp = psi(&y);
            y[i] = z[i] - h;
            let fm = psi(&y);
            y[i] = z[i];
            hm[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in 0..i {
                let mut corner = |si: f64, sj: f64| {
                    y[i] = z[i] + si * h;
                    y[j] = z[j] + sj * h;
                    let v = psi(&y);
                    y[i] = z[i];
                    y[j] = z[j];
                    v
                };
                let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * h * h);
                hm[(i, j)] = v;
                hm[(j, i)] = v;
            }
        }
        hm
    };
    let coarse = fd(HESSIAN_STEP);
    let fine = fd(0.5 * HESSIAN_STEP);
    let scale = coarse.abs().max();
    if scale > HESSIAN_BLOWUP || (&coarse - &fine).abs().max() > 1e-2 * (1.0 + scale) {
        return HessianSample::Kink;
    }
    HessianSample::Smooth(0.5 * (&fine + fine.transpose()))
}

fn reference_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..256)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / 256.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => SphereRule::new(3, 16).expect("3D rule").points,
        _ => direction_sequence(dim, 64 * dim),
    }
}

fn eig_range(m: &DMatrix<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(m.clone()).eigenvalues;
    (e.min(), e.max())
}

/// Sampled curvature bounds of `1/2 ||.||_K^2` in the frame where its mean Hessian is the identity.
pub fn curvature_bounds(body: &ConvexBodySpec, samples: usize) -> Result<CurvatureReport> {
    let n = body.dim();
    if n < 2 {
        return Err(Error::Dim("curvature needs dimension at least 2".into()));
    }
    if samples == 0 {
        return Err(arg("need at least one sample"));
    }
    let smooth = body.smoothness();
    if let Smoothness::Rough(why) = &smooth {
        return Err(Error::Smoothness(why.clone()));
    }
    let strict = smooth == Smoothness::Smooth;

    let mut mean = DMatrix::<f64>::zeros(n, n);
    let mut count = 0usize;
    for d in reference_directions(n) {
        if let HessianSample::Smooth(h) = half_sq_hessian(body, &d) {
            mean += h;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Smoothness("no smooth reference directions".into()));
    }
    mean /= count as f64;
    let eig = SymmetricEigen::new(mean.clone());
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Smoothness("mean Hessian is not positive definite".into()));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let t = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();

    let base_for_m = match body {
        ConvexBodySpec::Firey { base, .. } => Some((**base).clone()),
        _ => None,
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut m_max = f64::NEG_INFINITY;
    let mut skipped = 0usize;
    for theta in direction_sequence(n, samples) {
        let z = mat_vec(&t, &theta);
        match half_sq_hessian(body, &z) {
            HessianSample::Smooth(h) => {
                let normalized = t.transpose() * &h * &t;
                let (a, b) = eig_range(&normalized);
                lo = lo.min(a);
                hi = hi.max(b);
                if base_for_m.is_none() {
                    m_max = m_max.max(eig_range(&h).1);
                }
            }
            HessianSample::Kink => skipped += 1,
        }
        if let Some(base) = &base_for_m {
            if let HessianSample::Smooth(hb) = half_sq_hessian(base, &theta) {
                m_max = m_max.max(eig_range(&hb).1);
            }
        }
    }
    let used = samples - skipped;
    if used == 0 || (strict && skipped * 20 > samples) {
        return Err(Error::Smoothness(format!("{skipped} of {samples} Hessian samples straddle a kink")));
    }
    if !(lo > 0.0) {
        return Err(Error::Smoothness(format!("degenerate curvature: smallest eigenvalue {lo:e}")));
    }
    let kappa_sq = (lo / hi).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(CurvatureReport {
        kappa_sq_lower: kappa_sq,
        lambda_max_m: m_max,
        hessian_min: lo,
        hessian_max: hi,
        normalizing_map: (0..n).map(|i| (0..n).map(|j| t[(i, j)]).collect()).collect(),
        samples_used: used,
        samples_skipped: skipped,
    })
}

/// Extreme Hessian eigenvalues of `1/2 ||.||_K^2` in the body's own frame.
pub fn raw_hessian_range(body: &ConvexBodySpec, samples: usize) -> Result<(f64, f64)> {
    if let Smoothness::Rough(why) = body.smoothness() {
        return Err(Error::Smoothness(why));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for theta in direction_sequence(body.dim(), samples) {
        if let HessianSample::Smooth(h) = half_sq_hessian(body, &theta) {
            let (a, b) = eig_range(&h);
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    if !lo.is_finite() {
        return Err(Error::Smoothness("no smooth samples".into()));
    }
    Ok((lo, hi))
}

/// Empirical 2-uniform convexity constant `C` and smoothness constant `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvexityReport {
    pub c_estimate: f64,
    pub s_estimate: f64,
    pub pairs: usize,
    pub seed: u64,
}

/// Sampled constants from pairs in the Euclidean ball of radius 3.
///
/// Half the pairs are independent; the other half are close pairs at
/// log-uniform separations, which is where the extremes concentrate.
pub fn uniform_convexity_constants(body: &ConvexBodySpec, pairs: usize, seed: u64) -> Result<UniformConvexityReport> {
    let n = body.dim();
    if pairs < 2 {
        return Err(arg("need at least two pairs"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball_point = |rng: &mut ChaCha8Rng, radius: f64| -> Vec<f64> {
        let g: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let r = norm(&g);
        let scale = radius * rng.gen::<f64>().powf(1.0 / n as f64) / r;
        g.iter().map(|v| v * scale).collect()
    };
    let sq = |x: &[f64]| body.gauge(x).powi(2);
    let (mut r_min, mut r_max) = (f64::INFINITY, 0.0f64);
    for k in 0..pairs {
        let u = ball_point(&mut rng, 3.0);
        let w = if k % 2 == 0 {
            ball_point(&mut rng, 3.0)
        } else {
            let sep = 10f64.powf(rng.gen_range(-3.0..0.0));
            let d = ball_point(&mut rng, 1.0);
            let dn = norm(&d).max(1e-300);
            u.iter().zip(&d).map(|(a, b)| a + sep * b / dn).collect()
        };
        let diff: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
        let den = sq(&diff);
        if den <= 1e-24 {
            continue;
        }
        let mid: Vec<f64> = u.iter().zip(&w).map(|(a, b)| 0.5 * (a + b)).collect();
        let r = (0.5 * sq(&u) + 0.5 * sq(&w) - sq(&mid)) / den;
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    let c_estimate = if r_min > 0.0 { 1.0 / (4.0 * r_min) } else { f64::INFINITY };
    Ok(UniformConvexityReport { c_estimate, s_estimate: 4.0 * r_max, pairs, seed })
}

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; one draw per call keeps streams simple.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Ratio of the largest to smallest radius after an inertia normalization;
/// an upper bound for the Banach–Mazur distance to the Euclidean ball.
pub fn banach_mazur_surrogate(body: &ConvexBodySpec, resolution: usize) -> Result<f64> {
    let n = body.dim();
    let rule = SphereRule::new(n, resolution)?;
    let mut cov = DMatrix::<f64>::zeros(n, n);
    let mut vol = 0.0;
    for (theta, w) in rule.points.iter().zip(&rule.weights) {
        let rho = body.radial(theta);
        vol += w * rho.powi(n as i32) / n as f64;
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] += w * theta[i] * theta[j] * rho.powi(n as i32 + 2) / (n as f64 + 2.0);
            }
        }
    }
    cov /= vol;
    let eig = SymmetricEigen::new(cov);
    let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.sqrt()));
    let t_inv_map = &eig.eigenvectors * sqrt * eig.eigenvectors.transpose();
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for theta in &rule.points {
        // gauge of T K at theta is the gauge of K at T^{-1} theta
        let rho = 1.0 / body.gauge(&mat_vec(&t_inv_map, theta));
        rmin = rmin.min(rho);
        rmax = rmax.max(rho);
    }
    Ok(rmax / rmin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lp_gauges_and_polars() {
        let b = ConvexBodySpec::lp_ball(3, 1.5).unwrap();
        let x = [0.3, -1.2, 0.7];
        assert!(close(b.polar().gauge(&x), lp_norm(&x, 3.0), 1e-14));
        assert!(close(b.support(&x), lp_norm(&x, 3.0), 1e-14));
        let c = ConvexBodySpec::cube(2).unwrap();
        assert!(close(c.polar().gauge(&[0.5, -0.25]), 0.75, 1e-15));
    }

    #[test]
    fn ellipsoid_polar() {
        let e = ConvexBodySpec::diagonal_ellipsoid(&[4.0, 1.0]).unwrap();
        let p = e.polar();
        assert!(close(p.gauge(&[1.0, 0.0]), 0.5, 1e-14));
        assert!(close(p.gauge(&[0.0, 2.0]), 2.0, 1e-14));
    }

    #[test]
    fn cube_as_h_polytope() {
        let h = ConvexBodySpec::h_polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let c = ConvexBodySpec::cube(2).unwrap();
        for x in [[0.3, -0.9], [1.5, 0.2], [-2.0, -2.5]] {
            assert!(close(h.gauge(&x), c.gauge(&x), 1e-14));
            assert!(close(h.polar().gauge(&x), c.polar().gauge(&x), 1e-12));
        }
        assert!(close(h.closed_form_volume().unwrap(), 4.0, 1e-12));
        assert!(close(h.polar().closed_form_volume().unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn unbounded_polytopes_rejected() {
        let r = ConvexBodySpec::h_polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(r, Err(Error::Unbounded(_))));
        let r = ConvexBodySpec::v_polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(r, Err(Error::Unbounded(_))));
    }

    #[test]
    fn simplex_volumes() {
        for n in [2usize, 3] {
            let s = ConvexBodySpec::centered_simplex(n).unwrap();
            let v = s.closed_form_volume().unwrap() * s.polar().closed_form_volume().unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let expected = ((n + 1) as f64).powi(n as i32 + 1) / (fact * fact);
            assert!(close(v, expected, 1e-10), "n={n} v={v}");
        }
    }

    #[test]
    fn v_polytope_gauge_by_lp_in_high_dimension() {
        let mut verts = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 4];
                v[i] = s;
                verts.push(v);
            }
        }
        let cross = ConvexBodySpec::v_polytope(verts).unwrap();
        let x = [0.2, -0.3, 0.1, 0.4];
        assert!(close(cross.gauge(&x), 1.0, 1e-12));
    }

    #[test]
    fn firey_support_matches_polar_of_ball() {
        // firey(B_2, lambda) is a scaled ball: gauge sqrt(1+lambda)|x|.
        let f = ConvexBodySpec::firey(ConvexBodySpec::euclidean_ball(2).unwrap(), 3.0).unwrap();
        assert!(close(f.support(&[0.6, 0.8]), 0.5, 1e-12));
        let f3 = ConvexBodySpec::firey(ConvexBodySpec::euclidean_ball(3).unwrap(), 3.0).unwrap();
        assert!(close(f3.support(&[0.0, 0.6, 0.8]), 0.5, 1e-10));
    }

    #[test]
    fn translated_gauge_and_support() {
        let b = ConvexBodySpec::euclidean_ball(2).unwrap();
        let t = ConvexBodySpec::translated(b, vec![0.5, 0.0]).unwrap();
        assert!(close(t.gauge(&[1.5, 0.0]), 1.0, 1e-12));
        assert!(close(t.gauge(&[-0.5, 0.0]), 1.0, 1e-12));
        assert!(close(t.support(&[1.0, 0.0]), 1.5, 1e-14));
        assert!(ConvexBodySpec::translated(ConvexBodySpec::euclidean_ball(2).unwrap(), vec![1.2, 0.0]).is_err());
    }

    #[test]
    fn curvature_of_ball_and_firey() {
        let b = ConvexBodySpec::euclidean_ball(2).unwrap();
        let r = curvature_bounds(&b, 200).unwrap();
        assert!(close(r.kappa_sq_lower, 1.0, 1e-6));
        let e = ConvexBodySpec::diagonal_ellipsoid(&[4.0, 1.0]).unwrap();
        let r = curvature_bounds(&e, 200).unwrap();
        assert!(close(r.kappa_sq_lower, 1.0, 1e-6));
        let f = ConvexBodySpec::firey(ConvexBodySpec::cube(2).unwrap(), 1.0).unwrap();
        let r = curvature_bounds(&f, 400).unwrap();
        assert!(close(r.kappa_sq_lower, 0.5, 1e-4), "{r:?}");
        assert!(matches!(curvature_bounds(&ConvexBodySpec::cube(2).unwrap(), 10), Err(Error::Smoothness(_))));
    }

    #[test]
    fn parallelogram_law_for_ball() {
        let b = ConvexBodySpec::euclidean_ball(3).unwrap();
        let r = uniform_convexity_constants(&b, 2000, 1).unwrap();
        assert!(close(r.c_estimate, 1.0, 1e-6) && close(r.s_estimate, 1.0, 1e-6), "{r:?}");
    }

    #[test]
    fn banach_mazur_of_ellipsoid_is_one() {
        let e = ConvexBodySpec::diagonal_ellipsoid(&[9.0, 1.0]).unwrap();
        assert!(close(banach_mazur_surrogate(&e, 256).unwrap(), 1.0, 1e-8));
    }
}
