//! Explicit solutions of `dv/dt = beta Lap v + x.grad v + n v` on a grid, the
//! monotone functional built from them, and finite-difference probes of the
//! closure inequality.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::gaussian::HcExponents;
use crate::grid::{format_float, write_atomic, GridFunction};
use crate::ou::{apply_ou, lq_gamma_norm, ScalarField};
use crate::quadrature::QuadratureRule;

/// Relative boundary mass above which a grid is considered truncated.
pub const TRUNCATION_TOL: f64 = 1e-8;
/// Time step of the central difference in the closure probe.
pub const PROBE_TIME_STEP: f64 = 1e-3;
/// Spatial probe step as a fraction of the grid spacing.
pub const PROBE_SPACE_FRACTION: f64 = 1.0 / 50.0;
/// Sign band of the closure probe, relative to `max |v~|`.
pub const PROBE_BAND: f64 = 1e-4;

/// Kernel width (in grid spacings) from which trapezoid convolution is used.
const WIDE_KERNEL: f64 = 3.0;

/// The solution at time `t` together with its initial datum.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub v: GridFunction,
    pub beta: f64,
    pub t: f64,
    pub initial: GridFunction,
}

impl FlowState {
    pub fn mass(&self) -> f64 {
        self.v.integrate_with(|v| v)
    }
}

fn check_initial(v0: &GridFunction) -> Result<()> {
    if !(1..=2).contains(&v0.dim()) {
        return Err(Error::Dim(format!("flows support dimensions 1 and 2, got {}", v0.dim())));
    }
    if v0.values().iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("initial density must be finite and strictly positive on the grid".into()));
    }
    let frac = v0.boundary_fraction(|v| v);
    if frac > TRUNCATION_TOL {
        return Err(Error::Truncation(format!("initial density has boundary mass fraction {frac:.2e}")));
    }
    Ok(())
}

/// `v_t(x) = int v0(y) N(x; e^{-t} y, beta (1 - e^{-2t})) dy` at every node.
///
/// Wide kernels use separable trapezoid sums over the grid; narrow kernels
/// use Gauss–Hermite in the kernel variable with log-quadratic interpolation of `v0`.
pub fn fokker_planck_evolve(v0: &GridFunction, beta: f64, t: f64, rule: &QuadratureRule) -> Result<FlowState> {
    check_initial(v0)?;
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(arg(format!("beta must be at least 1, got {beta}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(arg(format!("time must be nonnegative, got {t}")));
    }
    if rule.dim() != v0.dim() {
        return Err(arg("quadrature rule dimension differs from the grid"));
    }
    if t == 0.0 {
        return Ok(FlowState { v: v0.clone(), beta, t, initial: v0.clone() });
    }
    let sigma = (beta * -(-2.0 * t).exp_m1()).sqrt();
    let width = t.exp() * sigma;
    let h = (0..v0.dim()).map(|a| v0.spacing(a)).fold(f64::INFINITY, f64::min);
    let values = if width >= WIDE_KERNEL * h { convolve_trapezoid(v0, t, sigma) } else { convolve_hermite(v0, t, sigma, rule) };
    let v = v0.with_values(values)?;
    let frac = v.boundary_fraction(|x| x);
    if frac > TRUNCATION_TOL {
        return Err(Error::Truncation(format!("kernel pushes {frac:.2e} of the mass onto the boundary")));
    }
    Ok(FlowState { v, beta, t, initial: v0.clone() })
}

fn convolve_trapezoid(v0: &GridFunction, t: f64, sigma: f64) -> Vec<f64> {
    let decay = (-t).exp();
    let norm = 1.0 / (2.0 * PI * sigma * sigma).sqrt();
    let mut values = v0.values().to_vec();
    let shape = v0.shape().to_vec();
    let strides = v0.strides();
    for axis in 0..v0.dim() {
        let m = shape[axis];
        let xs = v0.axis(axis);
        let h = v0.spacing(axis);
        let kernel: Vec<f64> = (0..m * m)
            .map(|k| {
                let (i, j) = (k / m, k % m);
                let w = if j == 0 || j + 1 == m { 0.5 * h } else { h };
                let d = xs[i] - decay * xs[j];
                w * norm * (-0.5 * d * d / (sigma * sigma)).exp()
            })
            .collect();
        let stride = strides[axis];
        let lines: Vec<usize> = (0..values.len()).filter(|&k| (k / stride).is_multiple_of(m)).collect();
        let updates: Vec<(usize, Vec<f64>)> = lines
            .par_iter()
            .map(|&start| {
                let line: Vec<f64> = (0..m).map(|j| values[start + j * stride]).collect();
                let out = (0..m).map(|i| kernel[i * m..(i + 1) * m].iter().zip(&line).map(|(k, v)| k * v).sum()).collect();
                (start, out)
            })
            .collect();
        for (start, out) in updates {
            for (j, v) in out.into_iter().enumerate() {
                values[start + j * stride] = v;
            }
        }
    }
    values
}

fn convolve_hermite(v0: &GridFunction, t: f64, sigma: f64, rule: &QuadratureRule) -> Vec<f64> {
    let log_v0 = v0.map(f64::ln);
    let growth = t.exp();
    let n = v0.dim();
    (0..v0.len())
        .into_par_iter()
        .map(|k| {
            let x = v0.point(k);
            let mut y = vec![0.0; n];
            let acc: f64 = rule
                .iter()
                .map(|(z, w)| {
                    for ((yi, xi), zi) in y.iter_mut().zip(&x).zip(z) {
                        *yi = growth * (xi - sigma * zi);
                    }
                    w * log_v0.interpolate_quadratic(&y).exp()
                })
                .sum();
            growth.powi(n as i32) * acc
        })
        .collect()
}

fn check_nelson(e: &HcExponents) -> Result<()> {
    if !e.is_nelson_critical(1e-10) {
        return Err(Error::Condition(format!("exponents p={} q={} are off the critical time line", e.p, e.q)));
    }
    if !(e.beta_sp() > 0.0) {
        return Err(Error::Condition(format!("beta_(s,p) = {} is not positive", e.beta_sp())));
    }
    Ok(())
}

/// `x -> (v(x) / gamma(x))^{1/p}` from log-quadratic interpolation of `v`.
fn ratio_field(v: &GridFunction, p: f64) -> Result<ScalarField> {
    if v.values().iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain("density is not strictly positive on the grid".into()));
    }
    let n = v.dim();
    let log_v = Arc::new(v.map(f64::ln));
    let log_norm = 0.5 * n as f64 * (2.0 * PI).ln();
    Ok(ScalarField::new(n, move |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        ((log_v.interpolate_quadratic(x) + 0.5 * r2 + log_norm) / p).exp()
    }))
}

/// `Q(t) = int P_s[(v_t / gamma)^{1/p}]^q dgamma`.
pub fn monotone_functional(state: &FlowState, e: &HcExponents, rule: &QuadratureRule) -> Result<f64> {
    check_nelson(e)?;
    let inner = apply_ou(&ratio_field(&state.v, e.p)?, e.s, rule)?;
    Ok(lq_gamma_norm(&inner, e.q, rule)?.powf(e.q))
}

/// Closure residuals and the sign verdict for the exponent regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureProbe {
    pub residuals: Vec<f64>,
    pub band: f64,
    /// `+1` when residuals must be nonnegative, `-1` when nonpositive.
    pub expected_sign: i8,
    pub passed: bool,
}

/// `d/dt v~ - (beta_sp Lap v~ + x.grad v~ + n v~)` at each probe, where
/// `v~ = P_s[(v_t/gamma)^{1/p}]^q gamma`.
pub fn closure_residual_probe(
    state: &FlowState,
    e: &HcExponents,
    probes: &[Vec<f64>],
    rule: &QuadratureRule,
) -> Result<ClosureProbe> {
    check_nelson(e)?;
    let n = state.v.dim();
    if probes.iter().any(|x| x.len() != n) {
        return Err(arg("probe dimension differs from the grid"));
    }
    for x in probes {
        let inside = (0..n).all(|a| {
            let h = state.v.spacing(a);
            x[a] > state.v.lo()[a] + 2.0 * h && x[a] < state.v.hi()[a] - 2.0 * h
        });
        if !inside {
            return Err(arg(format!("probe {x:?} is not in the grid interior")));
        }
    }
    let tilde = |v: &GridFunction| -> Result<ScalarField> {
        let inner = apply_ou(&ratio_field(v, e.p)?, e.s, rule)?;
        let (q, log_norm) = (e.q, 0.5 * n as f64 * (2.0 * PI).ln());
        let c = (-log_norm).exp();
        Ok(inner.map(move |u| c * u.powf(q)))
    };
    let gauss = |x: &[f64]| (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp();
    let evolve = |t: f64| fokker_planck_evolve(&state.initial, state.beta, t, rule).map(|s| s.v);
    let dt = PROBE_TIME_STEP;
    // Second-order time stencil: central when t >= dt, one-sided otherwise.
    let stencil: Vec<(f64, f64)> = if state.t >= dt {
        vec![(state.t - dt, -0.5 / dt), (state.t + dt, 0.5 / dt)]
    } else {
        vec![(state.t, -1.5 / dt), (state.t + dt, 2.0 / dt), (state.t + 2.0 * dt, -0.5 / dt)]
    };
    let mut time_fields = Vec::with_capacity(stencil.len());
    for &(t, c) in &stencil {
        let v = if t == state.t { state.v.clone() } else { evolve(t)? };
        time_fields.push((tilde(&v)?, c));
    }
    let now = tilde(&state.v)?;
    let beta_sp = e.beta_sp();
    let h = (0..n).map(|a| state.v.spacing(a)).fold(f64::INFINITY, f64::min) * PROBE_SPACE_FRACTION;
    let value = |f: &ScalarField, x: &[f64]| f.eval(x) * gauss(x);
    let residuals: Vec<f64> = probes
        .par_iter()
        .map(|x| {
            let dt_val: f64 = time_fields.iter().map(|(f, c)| c * value(f, x)).sum();
            let center = value(&now, x);
            let mut lap = 0.0;
            let mut drift = 0.0;
            let mut y = x.clone();
            for a in 0..n {
                y[a] = x[a] + h;
                let fp = value(&now, &y);
                y[a] = x[a] - h;
                let fm = value(&now, &y);
                y[a] = x[a];
                lap += (fp - 2.0 * center + fm) / (h * h);
                drift += x[a] * (fp - fm) / (2.0 * h);
            }
            dt_val - (beta_sp * lap + drift + n as f64 * center)
        })
        .collect();
    let scale = grid_sup(&now, &state.v, gauss);
    let band = PROBE_BAND * scale;
    let expected_sign: i8 = if e.q > 0.0 { 1 } else { -1 };
    let passed = residuals.iter().all(|r| if expected_sign > 0 { *r >= -band } else { *r <= band });
    Ok(ClosureProbe { residuals, band, expected_sign, passed })
}

/// `max |v~|` over every fourth grid node.
fn grid_sup(f: &ScalarField, grid: &GridFunction, gauss: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .filter(|&k| grid.multi_index(k).iter().all(|i| i % 4 == 0))
        .map(|k| {
            let x = grid.point(k);
            (f.eval(&x) * gauss(&x)).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// CSV rows `t, x0.., v` for each state.
pub fn trajectory_csv(states: &[FlowState]) -> String {
    let mut out = String::new();
    if let Some(first) = states.first() {
        out.push('t');
        for a in 0..first.v.dim() {
            out.push_str(&format!(",x{a}"));
        }
        out.push_str(",v\n");
    }
    for s in states {
        for k in 0..s.v.len() {
            out.push_str(&format_float(s.t));
            for c in s.v.point(k) {
                out.push(',');
                out.push_str(&format_float(c));
            }
            out.push(',');
            out.push_str(&format_float(s.v.values()[k]));
            out.push('\n');
        }
    }
    out
}

pub fn write_trajectory_csv(states: &[FlowState], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    buf.write_all(trajectory_csv(states).as_bytes())?;
    write_atomic(path, &buf)
}

/// `N(0, beta I)` density sampled on a cube grid.
pub fn gaussian_density_grid(dim: usize, m: usize, half: f64, beta: f64, mass: f64) -> Result<GridFunction> {
    let norm = mass * (2.0 * PI * beta).powf(-0.5 * dim as f64);
    GridFunction::cube(dim, m, half, |x| norm * (-0.5 * x.iter().map(|t| t * t).sum::<f64>() / beta).exp())
}
