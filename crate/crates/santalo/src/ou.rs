//! Quadrature realization of the Ornstein–Uhlenbeck semigroup and the
//! hypercontractive, Harnack and Brascamp–Lieb checks built on it.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{arg, domain, Error, Result};
use crate::gaussian::{p_endpoint, GaussianFunction, HcExponents};
use crate::quadrature::QuadratureRule;
use crate::report::{CheckReport, Provenance};

/// Values below this are treated as zero where logarithms or negative powers are taken.
pub const POSITIVITY_FLOOR: f64 = 1e-300;
/// Step of the finite-difference Hessian probes.
pub const HESSIAN_PROBE_STEP: f64 = 1e-3;
pub const HESSIAN_PROBE_COUNT: usize = 50;
pub const HESSIAN_BAND_TOL: f64 = 1e-5;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function on `R^n`, with an optional attested central symmetry.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    symmetric: bool,
    eval: Arc<Evaluator>,
    /// `ln f`, when it can be evaluated without overflow.
    log_eval: Option<Arc<Evaluator>>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim).field("symmetric", &self.symmetric).finish()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { dim, symmetric: false, eval: Arc::new(f), log_eval: None }
    }

    /// Builds a field and spot-checks `f(-x) = f(x)` at seeded points.
    pub fn symmetric<F>(dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(dim, f).assert_symmetric()
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let log_c = c.ln();
        let log_eval = (c > 0.0).then(|| Arc::new(move |_: &[f64]| log_c) as Arc<Evaluator>);
        Self { dim, symmetric: true, eval: Arc::new(move |_| c), log_eval }
    }

    pub fn from_gaussian(g: GaussianFunction) -> Self {
        let symmetric = g.linear.iter().all(|&b| b == 0.0);
        let log_g = g.clone();
        Self {
            dim: g.dim(),
            symmetric,
            eval: Arc::new(move |x| g.eval(x)),
            log_eval: Some(Arc::new(move |x| log_g.log_eval(x))),
        }
    }

    pub fn assert_symmetric(mut self) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_d00d);
        let mut x = vec![0.0; self.dim];
        let mut neg = vec![0.0; self.dim];
        for _ in 0..64 {
            for (xi, ni) in x.iter_mut().zip(neg.iter_mut()) {
                *xi = rng.gen_range(-3.0..3.0);
                *ni = -*xi;
            }
            let (a, b) = (self.eval(&x), self.eval(&neg));
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::Symmetry(format!("f(x)={a} but f(-x)={b} at x={x:?}")));
            }
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `ln f(x)`, exact in the log domain when the field carries it.
    pub fn log_value(&self, x: &[f64]) -> f64 {
        match &self.log_eval {
            Some(l) => l(x),
            None => self.eval(x).ln(),
        }
    }

    /// Pointwise `f^r`; symmetry is preserved.
    pub fn powf(&self, r: f64) -> Self {
        let inner = self.eval.clone();
        let log_eval = self.log_eval.clone().map(|l| Arc::new(move |x: &[f64]| r * l(x)) as Arc<Evaluator>);
        Self { dim: self.dim, symmetric: self.symmetric, eval: Arc::new(move |x| inner(x).powf(r)), log_eval }
    }

    /// Pointwise `g(f)`; symmetry is preserved.
    pub fn map<G>(&self, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self { dim: self.dim, symmetric: self.symmetric, eval: Arc::new(move |x| g(inner(x))), log_eval: None }
    }
}

fn check_dims(f: &ScalarField, rule: &QuadratureRule) -> Result<()> {
    if f.dim() != rule.dim() {
        return Err(arg(format!("field has dimension {} but rule has {}", f.dim(), rule.dim())));
    }
    Ok(())
}

/// `P_s f` as a lazily evaluated field; non-finite integrand values yield NaN.
pub fn apply_ou(f: &ScalarField, s: f64, rule: &QuadratureRule) -> Result<ScalarField> {
    check_dims(f, rule)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(arg(format!("time must be nonnegative, got {s}")));
    }
    let decay = (-s).exp();
    let spread = p_endpoint(s).sqrt();
    let inner = f.clone();
    let rule = Arc::new(rule.clone());
    let dim = f.dim();
    if f.log_eval.is_some() {
        // Log-sum-exp keeps steep inputs finite at the outer nodes.
        let log_eval = Arc::new(move |x: &[f64]| {
            let mut z = vec![0.0; dim];
            let mut terms = Vec::with_capacity(rule.len());
            for (y, w) in rule.iter() {
                for ((zi, &xi), &yi) in z.iter_mut().zip(x).zip(y) {
                    *zi = decay * xi + spread * yi;
                }
                let l = inner.log_value(&z);
                if l.is_nan() || l == f64::INFINITY {
                    return f64::NAN;
                }
                if w > 0.0 && l > f64::NEG_INFINITY {
                    terms.push(w.ln() + l);
                }
            }
            log_sum_exp(&terms)
        }) as Arc<Evaluator>;
        let exp_of = log_eval.clone();
        return Ok(ScalarField { dim, symmetric: f.symmetric, eval: Arc::new(move |x| exp_of(x).exp()), log_eval: Some(log_eval) });
    }
    let eval = move |x: &[f64]| {
        let mut z = vec![0.0; dim];
        let mut acc = 0.0;
        for (y, w) in rule.iter() {
            for ((zi, &xi), &yi) in z.iter_mut().zip(x).zip(y) {
                *zi = decay * xi + spread * yi;
            }
            let v = inner.eval(&z);
            if !v.is_finite() {
                return f64::NAN;
            }
            acc += w * v;
        }
        acc
    };
    Ok(ScalarField { dim, symmetric: f.symmetric, eval: Arc::new(eval), log_eval: None })
}

/// `ln sum exp(t)`; `-inf` for an empty slice.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

fn node_values(f: &ScalarField, rule: &QuadratureRule) -> Vec<f64> {
    (0..rule.len()).into_par_iter().map(|k| f.eval(rule.node(k))).collect()
}

/// `||f||_{L^q(gamma)}` for `q` in `(-inf, 1]`, with `q = 0` the geometric mean.
pub fn lq_gamma_norm(f: &ScalarField, q: f64, rule: &QuadratureRule) -> Result<f64> {
    check_dims(f, rule)?;
    if !q.is_finite() || q > 1.0 {
        return Err(arg(format!("exponent must lie in (-inf, 1], got {q}")));
    }
    if f.log_eval.is_some() {
        return lq_from_logs(f, q, rule);
    }
    let vals = node_values(f, rule);
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("integrand is not finite ({v}) at a quadrature node")));
    }
    if q <= 0.0 {
        if let Some(v) = vals.iter().find(|&&v| v < POSITIVITY_FLOOR) {
            return Err(domain(format!("value {v:e} below positivity floor with q={q}")));
        }
    } else if let Some(v) = vals.iter().find(|&&v| v < 0.0) {
        return Err(domain(format!("negative value {v} in L^q norm")));
    }
    let w = rule.weights();
    if q == 0.0 {
        let mean_log: f64 = vals.iter().zip(w).map(|(v, w)| w * v.ln()).sum();
        return Ok(mean_log.exp());
    }
    // log-sum-exp of q*log f + log w
    let terms: Vec<f64> = vals
        .iter()
        .zip(w)
        .filter(|(&v, &w)| v > 0.0 && w > 0.0)
        .map(|(v, w)| q * v.ln() + w.ln())
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    Ok((log_sum_exp(&terms) / q).exp())
}

fn lq_from_logs(f: &ScalarField, q: f64, rule: &QuadratureRule) -> Result<f64> {
    let logs: Vec<f64> = (0..rule.len()).into_par_iter().map(|k| f.log_value(rule.node(k))).collect();
    if let Some(l) = logs.iter().find(|l| l.is_nan() || **l == f64::INFINITY) {
        return Err(domain(format!("integrand is not finite (log value {l}) at a quadrature node")));
    }
    if q <= 0.0 {
        let floor = POSITIVITY_FLOOR.ln();
        if let Some(l) = logs.iter().find(|&&l| l < floor) {
            return Err(domain(format!("value exp({l}) below positivity floor with q={q}")));
        }
    }
    let w = rule.weights();
    if q == 0.0 {
        let mean_log: f64 = logs.iter().zip(w).map(|(l, w)| w * l).sum();
        return Ok(mean_log.exp());
    }
    let terms: Vec<f64> = logs
        .iter()
        .zip(w)
        .filter(|(&l, &w)| l > f64::NEG_INFINITY && w > 0.0)
        .map(|(l, w)| q * l + w.ln())
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    Ok((log_sum_exp(&terms) / q).exp())
}

/// `int f dgamma` by the rule.
pub fn gamma_integral(f: &ScalarField, rule: &QuadratureRule) -> Result<f64> {
    check_dims(f, rule)?;
    let vals = node_values(f, rule);
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("integrand is not finite ({v})")));
    }
    Ok(vals.iter().zip(rule.weights()).map(|(v, w)| v * w).sum())
}

fn rule_inputs(b: crate::report::CheckBuilder, rule: &QuadratureRule) -> crate::report::CheckBuilder {
    b.input("dim", rule.dim()).input("nodes", rule.len())
}

/// Reverse inequality at the endpoint exponents for centrally symmetric inputs.
pub fn reverse_hc_check(f: &ScalarField, s: f64, rule: &QuadratureRule, tol: f64) -> Result<CheckReport> {
    if !f.is_symmetric() {
        return Err(Error::Symmetry("reverse endpoint inequality needs a centrally symmetric input".into()));
    }
    if !(s > 0.0) {
        return Err(arg(format!("time must be positive, got {s}")));
    }
    let p = p_endpoint(s);
    let image = apply_ou(&f.powf(1.0 / p), s, rule)?;
    let lhs = lq_gamma_norm(&image, -p, rule)?;
    let mass = gamma_integral(f, rule)?;
    if !(mass > 0.0) {
        return Err(domain(format!("input has nonpositive mass {mass}")));
    }
    let rhs = mass.powf(1.0 / p);
    Ok(rule_inputs(CheckReport::builder("reverse_hc", "reverse_hypercontractivity_endpoint"), rule)
        .input("s", s)
        .input("p", p)
        .input("q", -p)
        .tolerance(tol)
        .provenance(Provenance::Quadrature)
        .at_least(lhs, rhs))
}

/// Extreme eigenvalues of the finite-difference Hessian of `log f` at seeded probes.
pub fn log_hessian_range(f: &ScalarField, radius: f64, probes: usize, seed: u64) -> Result<(f64, f64)> {
    let n = f.dim();
    let h = HESSIAN_PROBE_STEP;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let logf = |x: &[f64]| -> Result<f64> {
        let v = f.eval(x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain(format!("log f undefined at {x:?} (f={v})")));
        }
        Ok(v.ln())
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut x = vec![0.0; n];
    for _ in 0..probes {
        for xi in x.iter_mut() {
            *xi = rng.gen_range(-radius..radius);
        }
        let f0 = logf(&x)?;
        let mut hess = DMatrix::<f64>::zeros(n, n);
        let mut y = x.clone();
        for i in 0..n {
            y[i] = x[i] + h;
            let fp = logf(&y)?;
            y[i] = x[i] - h;
            let fm = logf(&y)?;
            y[i] = x[i];
            hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in 0..i {
                let mut corner = |si: f64, sj: f64| -> Result<f64> {
                    y[i] = x[i] + si * h;
                    y[j] = x[j] + sj * h;
                    let v = logf(&y);
                    y[i] = x[i];
                    y[j] = x[j];
                    v
                };
                let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?) / (4.0 * h * h);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(hess).eigenvalues;
        lo = eig.iter().cloned().fold(lo, f64::min);
        hi = eig.iter().cloned().fold(hi, f64::max);
    }
    Ok((lo, hi))
}

/// Attests `0 <= Hess log f <= (1 - 1/beta) id` on probes inside the quadrature support.
pub fn attest_semi_log_concavity(f: &ScalarField, beta: f64, rule: &QuadratureRule, seed: u64) -> Result<(f64, f64)> {
    let radius = rule.radius().max(1.0);
    let (lo, hi) = log_hessian_range(f, radius, HESSIAN_PROBE_COUNT, seed)?;
    let upper = 1.0 - 1.0 / beta;
    if lo < -HESSIAN_BAND_TOL || hi > upper + HESSIAN_BAND_TOL {
        return Err(Error::Condition(format!(
            "Hessian of log f spans [{lo:.6e}, {hi:.6e}], outside [0, {upper:.6e}]"
        )));
    }
    Ok((lo, hi))
}

/// Forward bound on the Nelson line for log-convex, semi-log-concave inputs.
pub fn forward_hc_check(f: &ScalarField, e: &HcExponents, rule: &QuadratureRule, tol: f64) -> Result<CheckReport> {
    e.validate()?;
    if !(e.p > 0.0 && e.p < 1.0) || !(e.q < 1.0) {
        return Err(Error::Condition(format!("need 0 < p < 1 and q < 1, got p={}, q={}", e.p, e.q)));
    }
    if !e.is_nelson_critical(1e-12) {
        return Err(Error::Condition(format!("exponents off the Nelson line by {:e}", e.nelson_gap())));
    }
    if e.beta < 1.0 {
        return Err(Error::Condition(format!("variance parameter must be at least 1, got {}", e.beta)));
    }
    let beta_sp = e.beta_sp();
    if beta_sp <= 0.0 {
        return Err(Error::Condition(format!("image variance {beta_sp} is not positive")));
    }
    attest_semi_log_concavity(f, e.beta, rule, 0xf0_4a4d)?;
    let n = f.dim() as f64;
    let image = apply_ou(&f.powf(1.0 / e.p), e.s, rule)?;
    let lhs = lq_gamma_norm(&image, e.q, rule)?;
    let mass = gamma_integral(f, rule)?;
    let constant = (0.5 * n * (1.0 - 1.0 / e.p) * e.beta.ln() - 0.5 * n * (1.0 - 1.0 / e.q) * beta_sp.ln()).exp();
    let rhs = constant * mass.powf(1.0 / e.p);
    Ok(rule_inputs(CheckReport::builder("forward_hc", "forward_hypercontractivity_nelson"), rule)
        .input("p", e.p)
        .input("q", e.q)
        .input("s", e.s)
        .input("beta", e.beta)
        .tolerance(tol)
        .provenance(Provenance::Quadrature)
        .at_most(lhs, rhs))
}

/// Dimension-free Harnack inequality between two points.
pub fn harnack_check(
    f: &ScalarField,
    s: f64,
    alpha: f64,
    x: &[f64],
    y: &[f64],
    rule: &QuadratureRule,
    tol: f64,
) -> Result<CheckReport> {
    if !(alpha > 1.0) {
        return Err(arg(format!("Harnack exponent must exceed 1, got {alpha}")));
    }
    if !(s > 0.0) {
        return Err(arg(format!("time must be positive, got {s}")));
    }
    if x.len() != f.dim() || y.len() != f.dim() {
        return Err(arg("probe points must match the field dimension"));
    }
    let pf = apply_ou(f, s, rule)?;
    let pfa = apply_ou(&f.powf(alpha), s, rule)?;
    let dist_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let lhs = pf.eval(x).powf(alpha);
    let penalty = alpha * dist_sq / (2.0 * (alpha - 1.0) * (2.0 * s).exp_m1());
    let rhs = pfa.eval(y) * penalty.exp();
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(domain("semigroup values are not finite at the probe points"));
    }
    Ok(rule_inputs(CheckReport::builder("harnack", "dimension_free_harnack"), rule)
        .input("s", s)
        .input("alpha", alpha)
        .input("x", x.to_vec())
        .input("y", y.to_vec())
        .tolerance(tol)
        .provenance(Provenance::Quadrature)
        .at_most(lhs, rhs))
}

/// Norm identity linking the semigroup to a two-function Brascamp–Lieb form (dimension one).
pub fn bl_duality_check(f: &ScalarField, e: &HcExponents, rule: &QuadratureRule, tol: f64) -> Result<CheckReport> {
    e.validate()?;
    if f.dim() != 1 {
        return Err(Error::Dim(format!("duality identity is checked in dimension 1, got {}", f.dim())));
    }
    if e.q >= 1.0 || e.p >= 1.0 {
        return Err(arg("duality identity needs p, q < 1"));
    }
    let image = apply_ou(&f.powf(1.0 / e.p), e.s, rule)?;
    let norm = lq_gamma_norm(&image, e.q, rule)?;
    let a = p_endpoint(e.s);
    let decay = (-e.s).exp();
    let c1 = 1.0 / e.p;
    let c2 = 1.0 - 1.0 / e.q;
    let q11 = (1.0 - a * c1) / (2.0 * PI * a);
    let q22 = (1.0 - a * c2) / (2.0 * PI * a);
    let q12 = -decay / (2.0 * PI * a);
    let gauss = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let log_norm_q = -e.q * norm.ln();
    let prefactor = (2.0 * PI).powf(0.5 * (c1 + c2) - 1.0) / a.sqrt();
    let integral_on = |half: f64, panels: usize| -> Result<f64> {
        let (xs, ws) = gauss_legendre_panels(-half, half, panels, 8);
        let g1: Vec<f64> = xs.iter().map(|&x| (f.eval(&[x]) * gauss(x)).powf(c1)).collect();
        let g2: Vec<f64> = xs
            .par_iter()
            .map(|&x| {
                let pv = image.eval(&[x]);
                (log_norm_q + e.q * pv.ln() + gauss(x).ln()).exp().powf(c2)
            })
            .collect();
        if g1.iter().chain(&g2).any(|v| !v.is_finite()) {
            return Err(domain("duality integrand is not finite on the truncation box"));
        }
        let total: f64 = (0..xs.len())
            .into_par_iter()
            .map(|i| {
                let x1 = xs[i];
                let mut row = 0.0;
                for j in 0..xs.len() {
                    let x2 = xs[j];
                    let quad = q11 * x1 * x1 + 2.0 * q12 * x1 * x2 + q22 * x2 * x2;
                    row += ws[j] * (-PI * quad).exp() * g2[j];
                }
                ws[i] * g1[i] * row
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        Ok(total)
    };
    let mut prev = integral_on(8.0, 96)?;
    let mut converged = None;
    for half in [12.0, 16.0, 20.0] {
        let cur = integral_on(half, (12.0 * half) as usize)?;
        if (cur - prev).abs() <= 1e-7 * cur.abs() {
            converged = Some(cur);
            break;
        }
        prev = cur;
    }
    let integral = converged.ok_or_else(|| Error::Truncation("duality integral did not stabilize up to |x| <= 20".into()))?;
    let rhs = prefactor * integral;
    Ok(rule_inputs(CheckReport::builder("bl_duality", "semigroup_brascamp_lieb_identity"), rule)
        .input("p", e.p)
        .input("q", e.q)
        .input("s", e.s)
        .tolerance(tol)
        .provenance(Provenance::Quadrature)
        .equal(norm, rhs))
}

/// Composite Gauss–Legendre nodes on `[lo, hi]`.
pub fn gauss_legendre_panels(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(order);
    let width = (hi - lo) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * width;
        for (ti, wi) in t.iter().zip(&w) {
            xs.push(mid + 0.5 * width * ti);
            ws.push(0.5 * width * wi);
        }
    }
    (xs, ws)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{ou_closed_form, GaussianFunction};

    fn rule(m: usize) -> QuadratureRule {
        QuadratureRule::gauss_hermite(m, 1).unwrap()
    }

    #[test]
    fn semigroup_matches_closed_form() {
        let g = GaussianFunction::new(0.4, vec![0.3], 0.1).unwrap();
        let field = ScalarField::from_gaussian(g.clone());
        let pf = apply_ou(&field, 0.6, &rule(64)).unwrap();
        let exact = ou_closed_form(0.6, &g).unwrap();
        for x in [-2.0, 0.0, 0.7, 3.0] {
            assert!((pf.eval(&[x]) / exact.eval(&[x]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn steep_inputs_stay_finite_in_log_domain() {
        let g = GaussianFunction::new(-4.5, vec![0.0], 0.0).unwrap();
        let r = rule(128);
        assert!(g.eval(r.node(r.len() - 1)).is_infinite());
        let pf = apply_ou(&ScalarField::from_gaussian(g.clone()), 0.1, &r).unwrap();
        let exact = ou_closed_form(0.1, &g).unwrap();
        let norm = lq_gamma_norm(&pf, -0.5, &r).unwrap();
        assert!((norm / exact.lq_norm(-0.5).value - 1.0).abs() < 1e-3, "{norm}");
    }

    #[test]
    fn geometric_mean_of_exponential() {
        let f = ScalarField::new(1, |x| x[0].exp());
        assert!((lq_gamma_norm(&f, 0.0, &rule(32)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floor_rejects_tiny_values() {
        let f = ScalarField::new(1, |x| (-1000.0 * x[0] * x[0]).exp());
        assert!(matches!(lq_gamma_norm(&f, -0.5, &rule(32)), Err(Error::Domain(_))));
    }

    #[test]
    fn nan_propagates() {
        let f = ScalarField::new(1, |x| if x[0] > 3.0 { f64::NAN } else { 1.0 });
        let pf = apply_ou(&f, 0.5, &rule(32)).unwrap();
        assert!(pf.eval(&[0.0]).is_nan());
        assert!(lq_gamma_norm(&pf, 0.5, &rule(8)).is_err());
    }

    #[test]
    fn reverse_needs_symmetry() {
        let f = ScalarField::new(1, |x| (x[0]).exp());
        assert!(matches!(reverse_hc_check(&f, 0.5, &rule(32), 1e-9), Err(Error::Symmetry(_))));
        assert!(ScalarField::symmetric(1, |x| x[0].exp()).is_err());
    }

    #[test]
    fn reverse_constant_is_equality() {
        let f = ScalarField::constant(1, 2.5);
        let r = reverse_hc_check(&f, 0.4, &rule(32), 1e-9).unwrap();
        assert!(r.passed && r.margin.abs() < 1e-10);
    }

    #[test]
    fn forward_rejects_off_line() {
        let f = ScalarField::constant(1, 1.0);
        let e = HcExponents::new(0.5, -0.2, 0.5, 2.0).unwrap();
        assert!(matches!(forward_hc_check(&f, &e, &rule(32), 1e-9), Err(Error::Condition(_))));
    }

    #[test]
    fn forward_rejects_band_violation() {
        let beta = 1.5;
        let f = ScalarField::from_gaussian(GaussianFunction::density_ratio(3.0, &[0.0]).unwrap());
        let e = HcExponents::nelson(0.6, 0.4, beta).unwrap();
        assert!(matches!(forward_hc_check(&f, &e, &rule(32), 1e-9), Err(Error::Condition(_))));
    }

    #[test]
    fn harnack_at_same_point() {
        let f = ScalarField::new(1, |x| 1.0 + x[0] * x[0]);
        let r = harnack_check(&f, 0.5, 2.0, &[0.3], &[0.3], &rule(32), 1e-12).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }
}
