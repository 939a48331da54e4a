//! Volumes, volume products, Cauchy-type weighted volumes, functional volume
//! products and the Santaló point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{curvature_bounds, dot, raw_hessian_range, ConvexBodySpec};
use crate::error::{arg, Error, Result};
use crate::fenchel::{legendre_nd, SlopeGrid};
use crate::grid::GridFunction;
use crate::quadrature::QuadratureRule;
use crate::report::{CheckReport, Provenance};
use crate::sphere::{ball_volume, SphereRule};

/// Largest dimension handled by Monte Carlo.
pub const MAX_MC_DIM: usize = 6;
const MC_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    ClosedForm,
    MonteCarlo,
    RadialQuadrature,
    GridQuadrature,
}

impl VolumeMethod {
    fn rank(self) -> u8 {
        match self {
            Self::ClosedForm => 0,
            Self::GridQuadrature => 1,
            Self::RadialQuadrature => 2,
            Self::MonteCarlo => 3,
        }
    }
}

/// A volume-like quantity with its error estimate.
///
/// `std_error` is one standard error for Monte Carlo, a refinement difference
/// for quadrature, and zero for closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub value: f64,
    pub method: VolumeMethod,
    pub std_error: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl VolumeReport {
    fn closed(value: f64) -> Self {
        Self { value, method: VolumeMethod::ClosedForm, std_error: 0.0, samples: 0, seed: None }
    }

    pub fn relative_error(&self) -> f64 {
        self.std_error / self.value.abs()
    }

    /// Product with first-order error propagation.
    pub fn times(&self, other: &VolumeReport) -> VolumeReport {
        let method = if self.method.rank() >= other.method.rank() { self.method } else { other.method };
        VolumeReport {
            value: self.value * other.value,
            method,
            std_error: (self.std_error * other.value).hypot(self.value * other.std_error),
            samples: self.samples + other.samples,
            seed: self.seed.or(other.seed),
        }
    }

    pub fn powf(&self, r: f64) -> VolumeReport {
        VolumeReport {
            value: self.value.powf(r),
            std_error: (r * self.value.powf(r - 1.0) * self.std_error).abs(),
            ..self.clone()
        }
    }

    fn scale(&self, c: f64) -> VolumeReport {
        VolumeReport { value: self.value * c, std_error: self.std_error * c.abs(), ..self.clone() }
    }
}

/// Precision settings shared by the volume routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeOptions {
    pub mc_samples: usize,
    pub seed: u64,
    /// Points per great circle of the sphere rule.
    pub sphere_resolution: usize,
    /// Gauss–Hermite nodes per axis for the Gaussian-side weighted volume.
    pub gauss_nodes: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self { mc_samples: 1_000_000, seed: 0x5eed_0001, sphere_resolution: 4096, gauss_nodes: 160 }
    }
}

impl VolumeOptions {
    fn sphere_rule(&self, dim: usize) -> Result<SphereRule> {
        let res = if dim == 3 { self.sphere_resolution.min(256) } else { self.sphere_resolution };
        SphereRule::new(dim, res)
    }

    fn coarse(&self) -> Self {
        Self { sphere_resolution: self.sphere_resolution / 2, gauss_nodes: self.gauss_nodes / 2, ..*self }
    }
}

/// `|K|`: closed form if available, radial quadrature in dimensions 2 and 3, Monte Carlo otherwise.
pub fn volume(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<VolumeReport> {
    if let Some(v) = body.closed_form_volume() {
        return Ok(VolumeReport::closed(v));
    }
    match body.dim() {
        2 | 3 => volume_radial(body, opts),
        _ => volume_monte_carlo(body, opts),
    }
}

/// `|K| = (1/n) int_S ||theta||_K^{-n}`, with the error taken from halving the resolution.
pub fn volume_radial(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<VolumeReport> {
    radial_report(body, opts, |g, n| g.powi(-(n as i32)) / n as f64)
}

fn radial_report<F>(body: &ConvexBodySpec, opts: &VolumeOptions, integrand: F) -> Result<VolumeReport>
where
    F: Fn(f64, usize) -> f64 + Sync,
{
    let n = body.dim();
    let eval = |o: &VolumeOptions| -> Result<(f64, usize)> {
        let rule = o.sphere_rule(n)?;
        let v: f64 = rule
            .points
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(p, w)| w * integrand(body.gauge(p), n))
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        Ok((v, rule.points.len()))
    };
    let (fine, count) = eval(opts)?;
    let (coarse, _) = eval(&opts.coarse())?;
    Ok(VolumeReport {
        value: fine,
        method: VolumeMethod::RadialQuadrature,
        std_error: (fine - coarse).abs(),
        samples: count as u64,
        seed: None,
    })
}

/// Parallel Monte Carlo of `box_volume * E[f(X)]` for `X` uniform in the bounding box.
fn box_monte_carlo<F>(body: &ConvexBodySpec, opts: &VolumeOptions, f: F) -> Result<VolumeReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = body.dim();
    if n > MAX_MC_DIM {
        return Err(Error::Dim(format!("Monte Carlo is limited to dimension {MAX_MC_DIM}, got {n}")));
    }
    if opts.mc_samples < 2 {
        return Err(arg("need at least two Monte Carlo samples"));
    }
    let (lo, hi) = body.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let chunks = opts.mc_samples.div_ceil(MC_CHUNK);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(opts.mc_samples - c * MC_CHUNK);
            let mut x = vec![0.0; n];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for (xi, (a, b)) in x.iter_mut().zip(lo.iter().zip(&hi)) {
                    *xi = a + (b - a) * rng.gen::<f64>();
                }
                let v = f(&x);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    // Sequential merge keeps the result independent of thread scheduling.
    let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = opts.mc_samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok(VolumeReport {
        value: box_vol * mean,
        method: VolumeMethod::MonteCarlo,
        std_error: box_vol * (var / m).sqrt(),
        samples: opts.mc_samples as u64,
        seed: Some(opts.seed),
    })
}

/// Rejection Monte Carlo inside the bounding box.
pub fn volume_monte_carlo(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<VolumeReport> {
    box_monte_carlo(body, opts, |x| if body.gauge(x) <= 1.0 { 1.0 } else { 0.0 })
}

/// `v(K) = |K| |K°|`.
pub fn volume_product(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<VolumeReport> {
    Ok(volume(body, opts)?.times(&volume(&body.polar(), opts)?))
}

/// Volume product with both factors by Monte Carlo.
pub fn volume_product_monte_carlo(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<VolumeReport> {
    let polar_opts = VolumeOptions { seed: opts.seed.wrapping_add(0x9e37_79b9), ..*opts };
    Ok(volume_monte_carlo(body, opts)?.times(&volume_monte_carlo(&body.polar(), &polar_opts)?))
}

/// The measure with density `a / (a + (1-a)|x|^2)^{(n+2)/2}`, `0 < a < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyMeasure {
    a: f64,
    dim: usize,
}

impl CauchyMeasure {
    pub fn new(a: f64, dim: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(arg(format!("Cauchy parameter must lie in (0,1), got {a}")));
        }
        if dim == 0 {
            return Err(arg("dimension must be positive"));
        }
        Ok(Self { a, dim })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let r2 = dot(x, x);
        self.a / (self.a + (1.0 - self.a) * r2).powf(0.5 * (self.dim as f64 + 2.0))
    }

    /// Mass of the Euclidean ball of radius `r`.
    pub fn ball_mass(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        ball_volume(self.dim) * r.powf(n) / (self.a + (1.0 - self.a) * r * r).powf(0.5 * n)
    }
}

/// How `mu(K)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightedPath {
    /// Tensor Gauss–Hermite on the Gaussian side of the radial identity.
    Gaussian,
    /// Density integrated by Monte Carlo over the bounding box.
    MonteCarlo,
    /// `(1/n) int_S (a ||theta||^2 + 1 - a)^{-n/2}`.
    Radial,
}

/// `mu_{a,n}(K)` along the requested path.
pub fn weighted_volume(
    body: &ConvexBodySpec,
    mu: &CauchyMeasure,
    path: WeightedPath,
    opts: &VolumeOptions,
) -> Result<VolumeReport> {
    let n = body.dim();
    if mu.dim() != n {
        return Err(arg("measure and body dimensions differ"));
    }
    let a = mu.a();
    match path {
        WeightedPath::Radial => radial_report(body, opts, |g, n| (a * g * g + 1.0 - a).powf(-0.5 * n as f64) / n as f64),
        WeightedPath::MonteCarlo => box_monte_carlo(body, opts, |x| if body.gauge(x) <= 1.0 { mu.density(x) } else { 0.0 }),
        WeightedPath::Gaussian => {
            // mu_a(K) = |B| (1-a)^{-n/2} E[exp(-a ||Z / sqrt(1-a)||_K^2 / 2)].
            let eval = |m: usize| -> Result<f64> {
                let rule = QuadratureRule::gauss_hermite(m, n)?;
                let scale = (1.0 - a).sqrt();
                let mean: f64 = (0..rule.len())
                    .into_par_iter()
                    .map(|k| {
                        let z: Vec<f64> = rule.node(k).iter().map(|v| v / scale).collect();
                        rule.weights()[k] * (-0.5 * a * body.gauge(&z).powi(2)).exp()
                    })
                    .collect::<Vec<f64>>()
                    .iter()
                    .sum();
                Ok(ball_volume(n) * (1.0 - a).powf(-0.5 * n as f64) * mean)
            };
            let fine = eval(opts.gauss_nodes)?;
            let coarse = eval(opts.coarse().gauss_nodes.max(1))?;
            Ok(VolumeReport {
                value: fine,
                method: VolumeMethod::GridQuadrature,
                std_error: (fine - coarse).abs(),
                samples: (opts.gauss_nodes as u64).pow(n as u32),
                seed: None,
            })
        }
    }
}

/// Boundary mass allowed for the integrals of a functional volume product.
pub const FUNCTIONAL_BOUNDARY_TOL: f64 = 1e-8;

/// `int e^{-psi} * int e^{-psi*}`, the conjugate taken on the same grid.
pub fn functional_volume_product(psi: &GridFunction) -> Result<f64> {
    check_midpoint_convexity(psi, 4096, 0x0c0f_fee0)?;
    let conj = legendre_nd(psi, Some(SlopeGrid::same_as(psi)))?;
    let mut out = 1.0;
    for (name, g) in [("function", psi), ("conjugate", &conj)] {
        let frac = g.boundary_fraction(|v| (-v).exp());
        if frac > FUNCTIONAL_BOUNDARY_TOL {
            return Err(Error::Truncation(format!(
                "{name} carries {frac:.2e} of its exponential mass on the boundary"
            )));
        }
        out *= g.integrate_with(|v| (-v).exp());
    }
    Ok(out)
}

/// Midpoint convexity on random node pairs whose midpoint is a node.
fn check_midpoint_convexity(psi: &GridFunction, pairs: usize, seed: u64) -> Result<()> {
    let shape = psi.shape().to_vec();
    let strides = psi.strides();
    let values = psi.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let (mut i, mut j, mut mid) = (0usize, 0usize, 0usize);
        for (axis, &m) in shape.iter().enumerate() {
            let u = rng.gen_range(0..m);
            let parity = u % 2;
            let choices = (m - parity).div_ceil(2);
            let w = parity + 2 * rng.gen_range(0..choices);
            i += u * strides[axis];
            j += w * strides[axis];
            mid += (u + w) / 2 * strides[axis];
        }
        let (fi, fj, fm) = (values[i], values[j], values[mid]);
        if fi.is_finite() && fj.is_finite() {
            let slack = 1e-9 * (1.0 + fi.abs().max(fj.abs()));
            if !(fm <= 0.5 * (fi + fj) + slack) {
                return Err(arg("function is not convex on the grid"));
            }
        }
    }
    Ok(())
}

/// `|(K - z)°|` and the barycenter of `(K - z)°` by radial quadrature.
fn polar_moments(body: &ConvexBodySpec, z: &[f64], rule: &SphereRule) -> Option<(f64, Vec<f64>)> {
    let n = body.dim();
    let mut vol = 0.0;
    let mut first = vec![0.0; n];
    for (theta, w) in rule.points.iter().zip(&rule.weights) {
        let h = body.support(theta) - dot(z, theta);
        if h <= 0.0 {
            return None;
        }
        let rho = 1.0 / h;
        vol += w * rho.powi(n as i32) / n as f64;
        let m = w * rho.powi(n as i32 + 1) / (n as f64 + 1.0);
        first.iter_mut().zip(theta).for_each(|(f, t)| *f += m * t);
    }
    Some((vol, first.into_iter().map(|f| f / vol).collect()))
}

/// Barycenter of `K` by radial quadrature.
pub fn centroid(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<Vec<f64>> {
    let n = body.dim();
    let rule = opts.sphere_rule(n)?;
    let mut vol = 0.0;
    let mut first = vec![0.0; n];
    for (theta, w) in rule.points.iter().zip(&rule.weights) {
        let rho = body.radial(theta);
        vol += w * rho.powi(n as i32) / n as f64;
        let m = w * rho.powi(n as i32 + 1) / (n as f64 + 1.0);
        first.iter_mut().zip(theta).for_each(|(f, t)| *f += m * t);
    }
    Ok(first.into_iter().map(|f| f / vol).collect())
}

pub const SANTALO_BUDGET: usize = 200;
pub const SANTALO_SHRINK: f64 = 0.5;
pub const SANTALO_TOL: f64 = 1e-5;

/// The Santaló point and its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SantaloPoint {
    pub point: Vec<f64>,
    pub polar_volume: f64,
    pub barycenter_residual: f64,
    pub iterations: usize,
}

/// Minimizer of `z -> |(K - z)°|` by coordinate search from the centroid,
/// certified by the vanishing barycenter of `(K - z)°`.
pub fn santalo_point(body: &ConvexBodySpec, opts: &VolumeOptions) -> Result<SantaloPoint> {
    let n = body.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::Dim(format!("Santaló point search supports dimensions 2 and 3, got {n}")));
    }
    let rule = opts.sphere_rule(n)?;
    let objective = |z: &[f64]| polar_moments(body, z, &rule).map_or(f64::INFINITY, |m| m.0);
    let mut z = centroid(body, opts)?;
    let mut best = objective(&z);
    let (lo, hi) = body.bounding_box();
    let mut step = 0.25 * lo.iter().zip(&hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let mut iterations = 0;
    while iterations < SANTALO_BUDGET && step > 1e-10 {
        iterations += 1;
        let mut moved = false;
        for axis in 0..n {
            for sign in [1.0, -1.0] {
                let mut cand = z.clone();
                cand[axis] += sign * step;
                let v = objective(&cand);
                if v < best {
                    best = v;
                    z = cand;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= SANTALO_SHRINK;
        }
    }
    let (vol, bary) = polar_moments(body, &z, &rule).ok_or_else(|| Error::Convergence("search left the body".into()))?;
    let residual = dot(&bary, &bary).sqrt();
    if residual > SANTALO_TOL {
        return Err(Error::Convergence(format!(
            "barycenter residual {residual:.2e} exceeds {SANTALO_TOL:.0e} after {iterations} iterations"
        )));
    }
    Ok(SantaloPoint { point: z, polar_volume: vol, barycenter_residual: residual, iterations })
}

/// `(k^2 e^{1-k^2})^{n/2} v(B_2^n)`.
pub fn improved_mahler_bound(kappa_sq: f64, dim: usize) -> f64 {
    (kappa_sq * (1.0 - kappa_sq).exp()).powf(0.5 * dim as f64) * ball_volume(dim).powi(2)
}

/// Volume product against the curvature-improved Mahler bound.
pub fn improved_mahler_check(
    body: &ConvexBodySpec,
    sphere_samples: usize,
    opts: &VolumeOptions,
    tol: f64,
) -> Result<CheckReport> {
    let n = body.dim();
    let curv = curvature_bounds(body, sphere_samples)?;
    let v = volume_product(body, opts)?;
    let bound = improved_mahler_bound(curv.kappa_sq_lower, n);
    let slack = tol + 3.0 * v.relative_error();
    let mut b = CheckReport::builder("improved_mahler", "curvature_improved_mahler_bound")
        .input("body", body.describe())
        .input("kappa_sq", curv.kappa_sq_lower)
        .input("std_error", v.std_error)
        .input("method", serde_json::to_value(v.method)?)
        .tolerance(slack)
        .provenance(provenance_of(v.method));
    if let Some(s) = v.seed {
        b = b.seed(s);
    }
    Ok(b.verdict(v.value, bound, v.value - bound, v.value >= bound * (1.0 - slack)))
}

fn provenance_of(m: VolumeMethod) -> Provenance {
    match m {
        VolumeMethod::ClosedForm => Provenance::ClosedForm,
        VolumeMethod::MonteCarlo => Provenance::MonteCarlo,
        VolumeMethod::RadialQuadrature => Provenance::Quadrature,
        VolumeMethod::GridQuadrature => Provenance::Grid,
    }
}

/// `(beta^{1/(1-a)} (beta a - a + 1)^{-1/(a(1-a))})^{n/2}`.
pub fn weighted_constant(beta: f64, a: f64, dim: usize) -> f64 {
    let log = (beta.ln() / (1.0 - a) - (beta * a - a + 1.0).ln() / (a * (1.0 - a))) * 0.5 * dim as f64;
    log.exp()
}

/// `(4 / (k + 1/k)^2)^{n/2}`.
pub fn cauchy_product_constant(kappa: f64, dim: usize) -> f64 {
    (4.0 / (kappa + 1.0 / kappa).powi(2)).powf(0.5 * dim as f64)
}

/// A body in the frame `k^2 id <= Hess(1/2 ||.||^2) <= id`, with its `k`.
#[derive(Debug, Clone)]
pub struct NormalizedBody {
    pub body: ConvexBodySpec,
    pub kappa: f64,
}

/// Puts a body into the curvature frame. A supplied `kappa` is verified in
/// place; otherwise the mean Hessian is whitened and the top eigenvalue scaled to one.
pub fn normalize_for_curvature(body: &ConvexBodySpec, kappa: Option<f64>, samples: usize) -> Result<NormalizedBody> {
    match kappa {
        Some(k) => {
            if !(k > 0.0 && k <= 1.0) {
                return Err(arg(format!("kappa must lie in (0,1], got {k}")));
            }
            let (lo, hi) = raw_hessian_range(body, samples)?;
            let slack = 1e-6;
            if lo < k * k * (1.0 - slack) || hi > 1.0 + slack {
                return Err(Error::Condition(format!(
                    "Hessian range [{lo:.6}, {hi:.6}] is not inside [{:.6}, 1]",
                    k * k
                )));
            }
            Ok(NormalizedBody { body: body.clone(), kappa: k })
        }
        None => {
            let c = curvature_bounds(body, samples)?;
            let n = body.dim();
            let t = nalgebra::DMatrix::from_fn(n, n, |i, j| c.normalizing_map[i][j] / c.hessian_max.sqrt());
            Ok(NormalizedBody {
                body: ConvexBodySpec::linear_image(body.clone(), t)?,
                kappa: c.kappa_sq_lower.sqrt(),
            })
        }
    }
}

/// Weighted volume-product bound at parameter `a`; at `a = 1/2` also the
/// comparison for the Cauchy measure.
pub fn weighted_bound_checks(
    body: &ConvexBodySpec,
    a: f64,
    kappa: Option<f64>,
    sphere_samples: usize,
    opts: &VolumeOptions,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let n = body.dim();
    let nb = normalize_for_curvature(body, kappa, sphere_samples)?;
    let beta = nb.kappa.powi(-2);
    let mu_k = CauchyMeasure::new(1.0 - a, n)?;
    let mu_p = CauchyMeasure::new(a, n)?;
    let lhs = weighted_volume(&nb.body, &mu_k, WeightedPath::Radial, opts)?
        .powf(1.0 / (1.0 - a))
        .times(&weighted_volume(&nb.body.polar(), &mu_p, WeightedPath::Radial, opts)?.powf(1.0 / a));
    let reference = mu_k.ball_mass(1.0).powf(1.0 / (1.0 - a)) * mu_p.ball_mass(1.0).powf(1.0 / a);
    let rhs = weighted_constant(beta, a, n) * reference;
    let slack = tol + 3.0 * lhs.relative_error();
    let mut out = vec![CheckReport::builder("weighted_product", "cauchy_weighted_product_bound")
        .input("body", body.describe())
        .input("a", a)
        .input("kappa", nb.kappa)
        .tolerance(slack)
        .provenance(Provenance::Quadrature)
        .at_least(lhs.value / reference, rhs / reference)];
    if (a - 0.5).abs() < 1e-12 {
        // Cauchy measure = 2^{-n/2} mu_{1/2}; the factor cancels in the ratio.
        let half = CauchyMeasure::new(0.5, n)?;
        let vk = weighted_volume(&nb.body, &half, WeightedPath::Radial, opts)?
            .times(&weighted_volume(&nb.body.polar(), &half, WeightedPath::Radial, opts)?)
            .scale(2f64.powf(-(n as f64)));
        let vb = half.ball_mass(1.0).powi(2) * 2f64.powf(-(n as f64));
        let slack = tol + 3.0 * vk.relative_error();
        out.push(
            CheckReport::builder("cauchy_product", "cauchy_volume_product_bound")
                .input("body", body.describe())
                .input("kappa", nb.kappa)
                .tolerance(slack)
                .provenance(Provenance::Quadrature)
                .at_least(vk.value / vb, cauchy_product_constant(nb.kappa, n)),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_form_products() {
        let o = VolumeOptions::default();
        let v = volume_product(&ConvexBodySpec::cube(2).unwrap(), &o).unwrap();
        assert_eq!(v.method, VolumeMethod::ClosedForm);
        assert!(rel(v.value, 8.0) < 1e-12);
        let v = volume_product(&ConvexBodySpec::centered_simplex(3).unwrap(), &o).unwrap();
        assert!(rel(v.value, 256.0 / 36.0) < 1e-10);
    }

    #[test]
    fn monte_carlo_cross_polytope() {
        let o = VolumeOptions { mc_samples: 200_000, ..Default::default() };
        let v = volume_monte_carlo(&ConvexBodySpec::lp_ball(3, 1.0).unwrap(), &o).unwrap();
        assert!((v.value - 4.0 / 3.0).abs() < 3.0 * v.std_error, "{v:?}");
        let again = volume_monte_carlo(&ConvexBodySpec::lp_ball(3, 1.0).unwrap(), &o).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn radial_volume_of_polar_firey() {
        let f = ConvexBodySpec::firey(ConvexBodySpec::euclidean_ball(2).unwrap(), 3.0).unwrap();
        let v = volume(&f.polar(), &VolumeOptions { sphere_resolution: 256, ..Default::default() }).unwrap();
        assert!(rel(v.value, 4.0 * PI) < 1e-10);
    }

    #[test]
    fn cauchy_mass_of_ball_is_lebesgue() {
        let b = ConvexBodySpec::euclidean_ball(2).unwrap();
        for a in [0.25, 0.5, 0.75] {
            let mu = CauchyMeasure::new(1.0 - a, 2).unwrap();
            let r = weighted_volume(&b, &mu, WeightedPath::Radial, &VolumeOptions::default()).unwrap();
            assert!(rel(r.value, PI) < 1e-12);
            let g = weighted_volume(&b, &mu, WeightedPath::Gaussian, &VolumeOptions::default()).unwrap();
            assert!(rel(g.value, PI) < 1e-9, "{g:?}");
        }
    }

    #[test]
    fn gaussian_functional_product() {
        let psi = GridFunction::cube(1, 4001, 9.0, |x| 0.5 * x[0] * x[0]).unwrap();
        let v = functional_volume_product(&psi).unwrap();
        assert!(rel(v, 2.0 * PI) < 1e-5, "{v}");
    }

    #[test]
    fn nonconvex_rejected() {
        let psi = GridFunction::cube(1, 201, 5.0, |x| x[0].cos() + 0.1 * x[0] * x[0]).unwrap();
        assert!(functional_volume_product(&psi).is_err());
    }

    #[test]
    fn truncated_grid_rejected() {
        let psi = GridFunction::cube(1, 201, 2.0, |x| 0.5 * x[0] * x[0]).unwrap();
        assert!(matches!(functional_volume_product(&psi), Err(Error::Truncation(_))));
    }

    #[test]
    fn santalo_point_of_translate() {
        let o = VolumeOptions { sphere_resolution: 2048, ..Default::default() };
        let b = ConvexBodySpec::lp_ball(2, 3.0).unwrap();
        let t = ConvexBodySpec::translated(b, vec![0.2, -0.1]).unwrap();
        let s = santalo_point(&t, &o).unwrap();
        assert!((s.point[0] - 0.2).abs() < 1e-4 && (s.point[1] + 0.1).abs() < 1e-4, "{s:?}");
    }

    #[test]
    fn weighted_equality_case() {
        let o = VolumeOptions { sphere_resolution: 512, ..Default::default() };
        for kappa in [0.5, 0.8] {
            let k = ConvexBodySpec::scaled(ConvexBodySpec::euclidean_ball(2).unwrap(), 1.0 / kappa).unwrap();
            for a in [0.25, 0.5] {
                let r = weighted_bound_checks(&k, a, Some(kappa), 100, &o, 1e-9).unwrap();
                for c in &r {
                    assert!(c.passed && rel(c.lhs, c.rhs) < 1e-9, "{c:?}");
                }
            }
        }
    }
}
