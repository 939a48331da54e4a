//! Discrete Legendre transforms, Hopf–Lax flows and their viscous approximation.
//!
//! Conjugates are exact maxima over the sampled points, computed one axis at
//! a time with a lower-hull sweep. A slope whose maximizer sits on the grid
//! edge and points further out is reported as `+inf`: the sampled box cannot
//! certify the value there.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::gaussian::p_endpoint;
use crate::grid::GridFunction;
use crate::quadrature::QuadratureRule;

pub const MAX_LEGENDRE_DIM: usize = 3;

/// Output grid of a conjugate; defaults to the slope range of the input, widened by 10%.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeGrid {
    pub shape: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SlopeGrid {
    pub fn same_as(g: &GridFunction) -> Self {
        Self { shape: g.shape().to_vec(), lo: g.lo().to_vec(), hi: g.hi().to_vec() }
    }

    pub fn cube(dim: usize, m: usize, half: f64) -> Self {
        Self { shape: vec![m; dim], lo: vec![-half; dim], hi: vec![half; dim] }
    }
}

/// Partial-difference range along each axis over finite values, widened by 10%.
pub fn default_slope_grid(f: &GridFunction) -> Result<SlopeGrid> {
    let n = f.dim();
    let strides = f.strides();
    let vals = f.values();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for k in 0..f.len() {
        let idx = f.multi_index(k);
        for a in 0..n {
            if idx[a] + 1 < f.shape()[a] {
                let (u, v) = (vals[k], vals[k + strides[a]]);
                if u.is_finite() && v.is_finite() {
                    let d = (v - u) / f.spacing(a);
                    lo[a] = lo[a].min(d);
                    hi[a] = hi[a].max(d);
                }
            }
        }
    }
    if lo.iter().any(|v| !v.is_finite()) {
        return Err(Error::Improper("no finite differences along some axis".into()));
    }
    let (lo, hi): (Vec<f64>, Vec<f64>) = lo
        .iter()
        .zip(&hi)
        .map(|(&a, &b)| {
            let mid = 0.5 * (a + b);
            let half = (0.55 * (b - a)).max(1e-9);
            (mid - half, mid + half)
        })
        .unzip();
    Ok(SlopeGrid { shape: f.shape().to_vec(), lo, hi })
}

/// One-dimensional discrete conjugate of `values` sampled at `lo + i*h`,
/// evaluated at ascending `slopes`; returns values and maximizing indices.
///
/// `+inf` samples are outside the domain; any `-inf` sample makes every output `+inf`.
fn conjugate_line(lo: f64, h: f64, values: &[f64], slopes: &[f64], out: &mut [f64], arg_out: &mut [usize]) {
    if values.contains(&f64::NEG_INFINITY) {
        out.fill(f64::INFINITY);
        arg_out.fill(0);
        return;
    }
    // Lower hull over finite samples, monotone chain.
    let mut hull: Vec<usize> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // b is above segment a-i: cross product test in index space
            let lhs = (values[b] - values[a]) * (i - a) as f64;
            let rhs = (v - values[a]) * (b - a) as f64;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        arg_out.fill(0);
        return;
    }
    let y = |i: usize| lo + i as f64 * h;
    let mut k = 0;
    for (j, &x) in slopes.iter().enumerate() {
        while k + 1 < hull.len() {
            let cur = x * y(hull[k]) - values[hull[k]];
            let next = x * y(hull[k + 1]) - values[hull[k + 1]];
            if next >= cur {
                k += 1;
            } else {
                break;
            }
        }
        out[j] = x * y(hull[k]) - values[hull[k]];
        arg_out[j] = hull[k];
    }
}

/// One-sided slope estimate at a boundary sample, from the two outermost cells.
fn boundary_slope(vals: [f64; 3], h: f64, upper: bool) -> Option<f64> {
    // vals ordered outward: [edge, inner1, inner2]
    let [e, i1, i2] = vals;
    if !e.is_finite() || !i1.is_finite() {
        return None;
    }
    let d_edge = if upper { (e - i1) / h } else { (i1 - e) / h };
    let correction = if i2.is_finite() {
        let d_inner = if upper { (i1 - i2) / h } else { (i2 - i1) / h };
        if upper {
            0.5 * (d_edge - d_inner)
        } else {
            0.5 * (d_inner - d_edge)
        }
    } else {
        0.0
    };
    Some(if upper { d_edge + correction.max(0.0) } else { d_edge - correction.max(0.0) })
}

/// Discrete Legendre transform on a tensor grid of dimension at most three.
pub fn legendre(f: &GridFunction, out: Option<SlopeGrid>) -> Result<GridFunction> {
    let n = f.dim();
    if n > MAX_LEGENDRE_DIM {
        return Err(Error::Dim(format!("conjugates are supported up to dimension {MAX_LEGENDRE_DIM}, got {n}")));
    }
    let out = match out {
        Some(o) => o,
        None => default_slope_grid(f)?,
    };
    if out.shape.len() != n || out.lo.len() != n || out.hi.len() != n {
        return Err(arg("slope grid dimension does not match the input"));
    }
    let slope_axes: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            let m = out.shape[a];
            (0..m).map(|i| out.lo[a] + i as f64 * (out.hi[a] - out.lo[a]) / (m - 1).max(1) as f64).collect()
        })
        .collect();

    // Stage k holds u_k(x_1..x_k, y_{k+1}..y_n); u_0 = -f.
    let mut shape: Vec<usize> = f.shape().to_vec();
    let mut cur: Vec<f64> = f.values().iter().map(|v| -v).collect();
    let mut argmaxes: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(n);
    for a in 0..n {
        let m_in = shape[a];
        let m_out = out.shape[a];
        let outer: usize = shape[..a].iter().product();
        let inner: usize = shape[a + 1..].iter().product();
        let mut new_shape = shape.clone();
        new_shape[a] = m_out;
        let h = f.spacing(a);
        let y0 = f.lo()[a];
        let slopes = &slope_axes[a];
        let lines: Vec<(Vec<f64>, Vec<usize>)> = (0..outer * inner)
            .into_par_iter()
            .map(|line| {
                let (o, i) = (line / inner, line % inner);
                let vals: Vec<f64> = (0..m_in).map(|j| -cur[(o * m_in + j) * inner + i]).collect();
                let mut res = vec![0.0; m_out];
                let mut am = vec![0usize; m_out];
                conjugate_line(y0, h, &vals, slopes, &mut res, &mut am);
                (res, am)
            })
            .collect();
        let mut next = vec![0.0; outer * m_out * inner];
        let mut am_all = vec![0usize; outer * m_out * inner];
        for (line, (res, am)) in lines.into_iter().enumerate() {
            let (o, i) = (line / inner, line % inner);
            for j in 0..m_out {
                next[(o * m_out + j) * inner + i] = res[j];
                am_all[(o * m_out + j) * inner + i] = am[j];
            }
        }
        argmaxes.push((new_shape.clone(), am_all));
        cur = next;
        shape = new_shape;
    }

    // Flag slopes whose maximizer is pinned to the box edge.
    let in_strides = f.strides();
    let fv = f.values();
    let total = cur.len();
    let flagged: Vec<bool> = (0..total)
        .into_par_iter()
        .map(|k| {
            if !cur[k].is_finite() {
                return false;
            }
            // Recover the maximizer by walking the stages backwards.
            let mut idx = unravel(k, &out.shape);
            let x = idx.iter().enumerate().map(|(a, &i)| slope_axes[a][i]).collect::<Vec<f64>>();
            for a in (0..n).rev() {
                let (ref shp, ref am) = argmaxes[a];
                let flat = ravel(&idx, shp);
                idx[a] = am[flat];
            }
            let base: usize = idx.iter().zip(&in_strides).map(|(i, s)| i * s).sum();
            for a in 0..n {
                let m = f.shape()[a];
                let h = f.spacing(a);
                let tol = 1e-9 * x[a].abs().max(1.0);
                let at = |off: isize| fv[(base as isize + off * in_strides[a] as isize) as usize];
                if idx[a] + 1 == m && m >= 2 {
                    let third = if m >= 3 { at(-2) } else { f64::NAN };
                    if let Some(u) = boundary_slope([at(0), at(-1), third], h, true) {
                        if x[a] > u + tol {
                            return true;
                        }
                    }
                }
                if idx[a] == 0 && m >= 2 {
                    let third = if m >= 3 { at(2) } else { f64::NAN };
                    if let Some(l) = boundary_slope([at(0), at(1), third], h, false) {
                        if x[a] < l - tol {
                            return true;
                        }
                    }
                }
            }
            false
        })
        .collect();
    for (v, flag) in cur.iter_mut().zip(flagged) {
        if flag {
            *v = f64::INFINITY;
        }
    }
    GridFunction::new(out.shape.clone(), out.lo.clone(), out.hi.clone(), cur)
}

fn unravel(mut k: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = k % shape[a];
        k /= shape[a];
    }
    idx
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &m)| acc * m + i)
}

pub fn legendre_1d(f: &GridFunction, out: Option<SlopeGrid>) -> Result<GridFunction> {
    if f.dim() != 1 {
        return Err(Error::Dim(format!("expected a one-dimensional grid, got {}", f.dim())));
    }
    legendre(f, out)
}

pub fn legendre_nd(f: &GridFunction, out: Option<SlopeGrid>) -> Result<GridFunction> {
    legendre(f, out)
}

/// Hopf–Lax value `Q_t phi(x) = inf_y [phi(y) + |x-y|^2/(2t)]` on the input grid.
pub fn hj_flow(phi: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(arg(format!("time must be positive, got {t}")));
    }
    if phi.values().contains(&f64::NEG_INFINITY) {
        return Err(Error::Improper("initial datum takes the value -inf".into()));
    }
    let n = phi.dim();
    let mut shifted = phi.clone();
    for k in 0..shifted.len() {
        let y = phi.point(k);
        let sq: f64 = y.iter().map(|v| v * v).sum();
        shifted.values_mut()[k] = t * phi.values()[k] + 0.5 * sq;
    }
    let conj = legendre(&shifted, Some(SlopeGrid::same_as(phi)))?;
    let mut vals = Vec::with_capacity(conj.len());
    for k in 0..conj.len() {
        let c = conj.values()[k];
        if c == f64::INFINITY {
            let x = conj.point(k);
            return Err(Error::Improper(format!(
                "inf-convolution is unbounded below at x={x:?} (t={t}, dim {n})"
            )));
        }
        let x = conj.point(k);
        let sq: f64 = x.iter().map(|v| v * v).sum();
        vals.push((0.5 * sq - c) / t);
    }
    phi.with_values(vals)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityRow {
    pub eps: f64,
    pub sup_gap: f64,
    /// Some exponent `phi/(2 eps)` exceeded the double range and was handled in log form.
    pub overflow_guarded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityTable {
    pub rows: Vec<ViscosityRow>,
    /// Smallest `C` with `phi(x) >= -C (1 + |x|)` on the grid.
    pub growth_constant: f64,
}

/// `sup |u^eps - Q_1 phi|` over probes, `u^eps = -2 eps log P_eps[exp(-phi/(2 eps))]`.
pub fn vanishing_viscosity_table(
    phi: &GridFunction,
    eps_list: &[f64],
    probes: &[Vec<f64>],
    rule: &QuadratureRule,
) -> Result<ViscosityTable> {
    let n = phi.dim();
    if rule.dim() != n {
        return Err(arg("rule dimension does not match the grid"));
    }
    if probes.is_empty() || probes.iter().any(|p| p.len() != n || !phi.contains(p)) {
        return Err(arg("probes must be nonempty and lie inside the grid box"));
    }
    if phi.values().iter().any(|v| !v.is_finite()) {
        return Err(arg("viscous approximation needs a finite initial datum"));
    }
    let growth_constant = (0..phi.len())
        .map(|k| {
            let r: f64 = phi.point(k).iter().map(|v| v * v).sum::<f64>().sqrt();
            (-phi.values()[k]).max(0.0) / (1.0 + r)
        })
        .fold(0.0, f64::max);
    let hopf_lax = hj_flow(phi, 1.0)?;
    let target: Vec<f64> = probes.iter().map(|x| hopf_lax.interpolate_quadratic(x)).collect();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(arg(format!("viscosity must be positive, got {eps}")));
        }
        let decay = (-eps).exp();
        let spread = p_endpoint(eps).sqrt();
        let results: Vec<(f64, bool)> = probes
            .par_iter()
            .zip(&target)
            .map(|(x, &q)| {
                let mut z = vec![0.0; n];
                let mut terms = Vec::with_capacity(rule.len());
                let mut guarded = false;
                for (y, w) in rule.iter() {
                    for a in 0..n {
                        z[a] = decay * x[a] + spread * y[a];
                    }
                    let expo = -phi.interpolate_quadratic(&z) / (2.0 * eps);
                    guarded |= expo.abs() > 700.0;
                    terms.push(w.ln() + expo);
                }
                let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
                ((-2.0 * eps * lse - q).abs(), guarded)
            })
            .collect();
        let sup_gap = results.iter().map(|r| r.0).fold(0.0, f64::max);
        let overflow_guarded = results.iter().any(|r| r.1);
        rows.push(ViscosityRow { eps, sup_gap, overflow_guarded });
    }
    Ok(ViscosityTable { rows, growth_constant })
}

/// Sampled form of `1/2 ||x||^2` for a gauge.
pub fn half_squared_gauge<G: Fn(&[f64]) -> f64>(gauge: G, dim: usize, m: usize, half: f64) -> Result<GridFunction> {
    GridFunction::cube(dim, m, half, |x| 0.5 * gauge(x).powi(2))
}
