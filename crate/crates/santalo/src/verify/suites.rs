//! Job lists for each named suite.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{defaults, Job, Suite, SuiteConfig};
use crate::body::{ConvexBodySpec, lp_norm};
use crate::error::Result;
use crate::fenchel::{half_squared_gauge, hj_flow, legendre_nd, vanishing_viscosity_table, SlopeGrid};
use crate::flows::{closure_residual_probe, fokker_planck_evolve, gaussian_density_grid, monotone_functional};
use crate::gaussian::{
    classify_admissibility, hc_gaussian_norm, p_endpoint, q_endpoint, GaussianFunction, HcExponents,
};
use crate::grid::GridFunction;
use crate::ou::{apply_ou, forward_hc_check, harnack_check, lq_gamma_norm, reverse_hc_check, ScalarField};
use crate::quadrature::QuadratureRule;
use crate::report::{CheckReport, Provenance};
use crate::sphere::ball_volume;
use crate::volumes::{
    functional_volume_product, improved_mahler_check, santalo_point, volume_product, volume_product_monte_carlo,
    weighted_bound_checks, weighted_volume, CauchyMeasure, VolumeOptions, WeightedPath,
};

type BodyCtor = fn(usize) -> Result<ConvexBodySpec>;
type BodyThunk = Box<dyn Fn() -> Result<ConvexBodySpec> + Send + Sync>;

/// Gauss–Hermite nodes per axis; nested semigroup evaluations cost the square of the tensor size.
pub(crate) fn nodes_per_axis(cfg: &SuiteConfig, dim: usize) -> usize {
    if dim == 1 {
        cfg.quadrature_points
    } else {
        cfg.quadrature_points.min(40)
    }
}

fn rule(cfg: &SuiteConfig, dim: usize) -> Result<QuadratureRule> {
    QuadratureRule::gauss_hermite(nodes_per_axis(cfg, dim), dim)
}

fn rng(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn volume_opts(cfg: &SuiteConfig) -> VolumeOptions {
    VolumeOptions { mc_samples: cfg.mc_samples, seed: cfg.seed, ..Default::default() }
}

/// Reports for an identity read off an inequality report's two sides.
fn as_identity(r: &CheckReport, anchor: &str, tol: f64) -> CheckReport {
    let mut b = CheckReport::builder(r.check_id.clone(), anchor).tolerance(tol).provenance(r.provenance);
    for (k, v) in &r.inputs {
        b = b.input(k, v.clone());
    }
    b.equal(r.lhs, r.rhs)
}

pub fn jobs_for(suite: Suite, cfg: &SuiteConfig) -> Vec<Job> {
    match suite {
        Suite::Gaussian => gaussian(cfg),
        Suite::Admissibility => admissibility(cfg),
        Suite::ReverseHc => reverse_hc(cfg),
        Suite::ForwardHc => forward_hc(cfg),
        Suite::Harnack => harnack(cfg),
        Suite::Fenchel => fenchel(cfg),
        Suite::Santalo => santalo(cfg),
        Suite::Mahler => mahler(cfg),
        Suite::Weighted => weighted(cfg),
        Suite::Flows => flows(cfg),
        Suite::All => Suite::CONCRETE.iter().flat_map(|s| jobs_for(*s, cfg)).collect(),
    }
}

// ---------------------------------------------------------------- gaussian

pub(crate) fn scale_check(beta: f64, s: f64, dim: usize, tol: f64) -> Result<CheckReport> {
    let e = HcExponents::new(p_endpoint(s), q_endpoint(s), s, beta)?;
    let v = hc_gaussian_norm(&e, dim)?;
    Ok(CheckReport::builder("", "gaussian_scale_criticality")
        .input("beta", beta)
        .input("s", s)
        .input("dim", dim)
        .tolerance(tol)
        .provenance(Provenance::ClosedForm)
        .equal(v.value, 1.0))
}

/// Nelson tuples whose positivity factors stay away from zero.
pub(crate) fn nelson_tuples(cfg: &SuiteConfig, count: usize) -> Vec<HcExponents> {
    let mut rng = rng(cfg, 0x6a05);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let beta = rng.gen_range(0.5..2.5);
        let p = rng.gen_range(0.1..0.9);
        let s = rng.gen_range(0.2..1.0);
        if let Ok(e) = HcExponents::nelson(p, s, beta) {
            let (a, b) = e.positivity_factors();
            if a >= 0.3 && b >= 0.3 {
                out.push(e);
            }
        }
    }
    out
}

fn gaussian(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let tol = cfg.tol("gaussian.scale", 1e-12);
    for dim in 1..=3 {
        for s in [0.1, 0.5, 1.0] {
            for beta in [0.5, 1.0, 2.0, 5.0] {
                jobs.push(Job::new(format!("gaussian.scale[n={dim},s={s},beta={beta}]"), move || {
                    scale_check(beta, s, dim, tol)
                }));
            }
        }
    }
    let tol = cfg.tol("gaussian.oracle", 1e-8);
    let dim = cfg.dim;
    let c = cfg.clone();
    for (k, e) in nelson_tuples(cfg, 20).into_iter().enumerate() {
        let c = c.clone();
        jobs.push(Job::new(format!("gaussian.oracle[{k:02}]"), move || {
            let r = rule(&c, dim)?;
            let f = ScalarField::from_gaussian(GaussianFunction::density_ratio(e.beta, &vec![0.0; dim])?);
            let numeric = lq_gamma_norm(&apply_ou(&f.powf(1.0 / e.p), e.s, &r)?, e.q, &r)?;
            let exact = hc_gaussian_norm(&e, dim)?.value;
            Ok(CheckReport::builder("", "gaussian_semigroup_norm")
                .input("p", e.p)
                .input("q", e.q)
                .input("s", e.s)
                .input("beta", e.beta)
                .input("dim", dim)
                .input("nodes", r.len())
                .tolerance(tol)
                .provenance(Provenance::Quadrature)
                .equal(numeric, exact))
        }));
    }
    jobs
}

// ----------------------------------------------------------- admissibility

/// Points of the log-spaced variance grid used by the brute-force classifier.
pub const BRUTE_FORCE_BETAS: usize = 2001;

/// Whether the centered-Gaussian norm stays positive (first) and finite
/// (second) over a log grid of variances in `[1e-3, 1e3]`.
pub fn brute_force_admissibility(p: f64, q: f64, s: f64) -> Result<(bool, bool)> {
    let vals = (0..BRUTE_FORCE_BETAS)
        .map(|k| {
            let beta = 10f64.powf(-3.0 + 6.0 * k as f64 / (BRUTE_FORCE_BETAS - 1) as f64);
            hc_gaussian_norm(&HcExponents::new(p, q, s, beta)?, 1).map(|v| v.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rel = 1e-12;
    let last = vals.len() - 1;
    let falls_at_ends = vals[0] < vals[1] * (1.0 - rel) || vals[last] < vals[last - 1] * (1.0 - rel);
    let rises_at_ends = vals[0] > vals[1] * (1.0 + rel) || vals[last] > vals[last - 1] * (1.0 + rel);
    let inf_positive = !vals.contains(&0.0) && !falls_at_ends;
    let sup_finite = !vals.iter().any(|v| v.is_infinite()) && !rises_at_ends;
    Ok((inf_positive, sup_finite))
}

/// `(p, q)` pairs of the 20 x 20 grid that lie beyond the Nelson line at time `s`.
pub fn admissibility_grid(s: f64) -> Vec<(f64, f64)> {
    let lin = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / 19.0;
    let e2 = (2.0 * s).exp();
    (0..20)
        .flat_map(|i| (0..20).map(move |j| (lin(0.05, 0.95, i), lin(-4.0, -0.1, j))))
        .filter(|&(p, q)| q < 1.0 - e2 + e2 * p)
        .collect()
}

fn admissibility(_cfg: &SuiteConfig) -> Vec<Job> {
    let s = 0.5;
    vec![Job::new("admissibility.grid[s=0.5]", move || {
        let grid = admissibility_grid(s);
        let mut agree = 0usize;
        for &(p, q) in &grid {
            let c = classify_admissibility(p, q, s)?;
            if brute_force_admissibility(p, q, s)? == (c.inf_over_beta_positive, c.sup_over_beta_finite) {
                agree += 1;
            }
        }
        Ok(CheckReport::builder("", "gaussian_admissibility_map")
            .input("s", s)
            .input("points", grid.len())
            .input("betas", BRUTE_FORCE_BETAS)
            .tolerance(0.0)
            .provenance(Provenance::Grid)
            .equal(agree as f64, grid.len() as f64))
    })]
}

// -------------------------------------------------------------- reverse_hc

/// Seeded centrally symmetric sum of Gaussian bumps.
pub(crate) fn symmetric_mixture(rng: &mut ChaCha8Rng, dim: usize) -> Result<ScalarField> {
    let parts: Vec<(f64, Vec<f64>, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let w = rng.gen_range(0.2..1.0);
            let m: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sigma = rng.gen_range(0.6..1.5);
            (w, m, sigma)
        })
        .collect();
    let parts = Arc::new(parts);
    ScalarField::symmetric(dim, move |x| {
        parts
            .iter()
            .map(|(w, m, sigma)| {
                let (mut a, mut b) = (0.0, 0.0);
                for (xi, mi) in x.iter().zip(m) {
                    a += (xi - mi).powi(2);
                    b += (xi + mi).powi(2);
                }
                let d = 2.0 * sigma * sigma;
                w * ((-a / d).exp() + (-b / d).exp())
            })
            .sum()
    })
}

fn reverse_hc(cfg: &SuiteConfig) -> Vec<Job> {
    let tol = cfg.tol("reverse_hc.mixture", 1e-9);
    let ctol = cfg.tol("reverse_hc.constant", 1e-9);
    let dim = cfg.dim;
    let mut jobs = Vec::new();
    let mut r = rng(cfg, 0x7e5e);
    for k in 0..25 {
        let seed_k: u64 = r.gen();
        for s in [0.3, 0.7] {
            let c = cfg.clone();
            jobs.push(Job::new(format!("reverse_hc.mixture[{k:02},s={s}]"), move || {
                let f = symmetric_mixture(&mut ChaCha8Rng::seed_from_u64(seed_k), dim)?;
                reverse_hc_check(&f, s, &rule(&c, dim)?, tol).map(|rep| CheckReport { seed: Some(seed_k), ..rep })
            }));
        }
    }
    for s in [0.3, 0.7] {
        for value in [0.5, 3.0] {
            let c = cfg.clone();
            jobs.push(Job::new(format!("reverse_hc.constant[c={value},s={s}]"), move || {
                let rep = reverse_hc_check(&ScalarField::constant(dim, value), s, &rule(&c, dim)?, ctol)?;
                Ok(as_identity(&rep, "reverse_hypercontractivity_equality", ctol))
            }));
        }
    }
    jobs
}

// -------------------------------------------------------------- forward_hc

/// Inputs grow like `exp((1 - 1/beta) |x|^2 / 2)`; the one-dimensional rule needs extra nodes.
const FORWARD_MIN_NODES: usize = 128;

fn forward_rule(cfg: &SuiteConfig, dim: usize) -> Result<QuadratureRule> {
    let m = if dim == 1 { cfg.quadrature_points.max(FORWARD_MIN_NODES) } else { nodes_per_axis(cfg, dim) };
    QuadratureRule::gauss_hermite(m, dim)
}

fn forward_hc(cfg: &SuiteConfig) -> Vec<Job> {
    let dim = cfg.dim;
    // The planar tensor rule is capped by cost, which limits accuracy on growing inputs.
    let default = if dim == 1 { 1e-9 } else { 1e-5 };
    let tol = cfg.tol("forward_hc.tuple", default);
    let etol = cfg.tol("forward_hc.equality", default);
    let mut r = rng(cfg, 0xf0a4);
    let mut tuples = Vec::new();
    while tuples.len() < 20 {
        let beta = r.gen_range(1.2..3.0);
        let p = r.gen_range(0.1..0.9);
        let s = r.gen_range(0.2..1.0);
        let u: f64 = r.gen_range(0.0..1.0);
        if let Ok(e) = HcExponents::nelson(p, s, beta) {
            if e.beta_sp() >= 0.3 {
                tuples.push((e, 1.0 + u * (beta - 1.0)));
            }
        }
    }
    let mut jobs = Vec::new();
    for (k, (e, inner)) in tuples.into_iter().enumerate() {
        for (label, b, equality) in [("tuple", inner, false), ("equality", e.beta, true)] {
            let c = cfg.clone();
            jobs.push(Job::new(format!("forward_hc.{label}[{k:02}]"), move || {
                let f = ScalarField::from_gaussian(GaussianFunction::density_ratio(b, &vec![0.0; dim])?);
                let rep = forward_hc_check(&f, &e, &forward_rule(&c, dim)?, tol)?;
                let rep = CheckReport { inputs: { let mut i = rep.inputs.clone(); i.insert("input_beta".into(), b.into()); i }, ..rep };
                Ok(if equality { as_identity(&rep, "forward_hypercontractivity_equality", etol) } else { rep })
            }));
        }
    }
    jobs
}

// ----------------------------------------------------------------- harnack

fn harnack(cfg: &SuiteConfig) -> Vec<Job> {
    let tol = cfg.tol("harnack", defaults::QUADRATURE);
    let dim = cfg.dim;
    let mut r = rng(cfg, 0x4a27);
    let mut jobs = Vec::new();
    for k in 0..4 {
        let seed_k: u64 = r.gen();
        for (s, alpha) in [(0.5, 2.0), (1.0, 4.0)] {
            let c = cfg.clone();
            jobs.push(Job::new(format!("harnack.mixture[{k},s={s},alpha={alpha}]"), move || {
                let mut g = ChaCha8Rng::seed_from_u64(seed_k);
                let f = symmetric_mixture(&mut g, dim)?;
                let x: Vec<f64> = (0..dim).map(|_| g.gen_range(-1.5..1.5)).collect();
                let y: Vec<f64> = (0..dim).map(|_| g.gen_range(-1.5..1.5)).collect();
                harnack_check(&f, s, alpha, &x, &y, &rule(&c, dim)?, tol).map(|rep| CheckReport { seed: Some(seed_k), ..rep })
            }));
        }
    }
    jobs
}

// ----------------------------------------------------------------- fenchel

/// `(body, polar)` pairs in the plane used for the conjugate-gauge identity.
pub(crate) fn duality_bodies() -> Result<Vec<(&'static str, ConvexBodySpec)>> {
    Ok(vec![
        ("l1", ConvexBodySpec::lp_ball(2, 1.0)?),
        ("l2", ConvexBodySpec::euclidean_ball(2)?),
        ("linf", ConvexBodySpec::cube(2)?),
        ("simplex", ConvexBodySpec::centered_simplex(2)?),
    ])
}

/// Largest `|(1/2 |.|_K^2)^* - 1/2 |.|_{K°}^2|` over grid slopes with `|y| <= radius`.
pub fn gauge_duality_gap(body: &ConvexBodySpec, m: usize, half: f64, radius: f64) -> Result<f64> {
    let f = half_squared_gauge(|x| body.gauge(x), body.dim(), m, half)?;
    let conj = legendre_nd(&f, Some(SlopeGrid::same_as(&f)))?;
    let polar = body.polar();
    Ok((0..conj.len())
        .filter_map(|k| {
            let y = conj.point(k);
            (lp_norm(&y, 2.0) <= radius).then(|| (conj.values()[k] - 0.5 * polar.gauge(&y).powi(2)).abs())
        })
        .fold(0.0, f64::max))
}

/// `u^eps` for `phi = c|x|^2/2` in closed form.
pub(crate) fn viscous_quadratic(c: f64, eps: f64, dim: usize, x: &[f64]) -> f64 {
    let a = 1.0 + c / (2.0 * eps) * (-(-2.0 * eps).exp_m1());
    let r2: f64 = x.iter().map(|v| v * v).sum();
    eps * dim as f64 * a.ln() + 0.5 * c * (-2.0 * eps).exp() * r2 / a
}

pub(crate) const VISCOSITY_CURVATURE: f64 = 0.5;

pub(crate) fn viscosity_probes() -> Vec<Vec<f64>> {
    (0..=40).map(|k| vec![-2.0 + 0.1 * k as f64]).collect()
}

pub(crate) fn viscosity_datum() -> Result<GridFunction> {
    GridFunction::cube(1, 1201, 12.0, |x| 0.5 * VISCOSITY_CURVATURE * x[0] * x[0])
}

fn fenchel(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let tol = cfg.tol("fenchel.duality", 5e-3);
    if let Ok(bodies) = duality_bodies() {
        for (name, body) in bodies {
            jobs.push(Job::new(format!("fenchel.duality[{name}]"), move || {
                let gap = gauge_duality_gap(&body, 401, 3.0, 2.0)?;
                Ok(CheckReport::builder("", "conjugate_of_half_squared_gauge")
                    .input("body", body.describe())
                    .input("grid", 401)
                    .tolerance(tol)
                    .provenance(Provenance::Grid)
                    .verdict(gap, 0.0, -gap, gap <= tol))
            }));
        }
    }
    let tol = cfg.tol("fenchel.hopf_lax", 1e-3);
    for t in [0.5, 1.0, 2.0] {
        jobs.push(Job::new(format!("fenchel.hopf_lax[t={t}]"), move || {
            let c = 1.5;
            let phi = GridFunction::cube(2, 401, 6.0, |x| 0.5 * c * (x[0] * x[0] + x[1] * x[1]))?;
            let flow = hj_flow(&phi, t)?;
            let gap = (0..flow.len())
                .filter_map(|k| {
                    let x = flow.point(k);
                    let r2 = x[0] * x[0] + x[1] * x[1];
                    (r2 <= 4.0).then(|| (flow.values()[k] - 0.5 * c / (1.0 + c * t) * r2).abs())
                })
                .fold(0.0, f64::max);
            Ok(CheckReport::builder("", "hopf_lax_quadratic")
                .input("t", t)
                .input("curvature", c)
                .tolerance(tol)
                .provenance(Provenance::Grid)
                .verdict(gap, 0.0, -gap, gap <= tol))
        }));
    }
    let tol = cfg.tol("fenchel.viscosity", 1e-4);
    let nodes = cfg.quadrature_points;
    jobs.push(Job::new("fenchel.viscosity[closed_form]", move || {
        let eps_list = [0.2, 0.1, 0.05];
        let probes = viscosity_probes();
        let table = vanishing_viscosity_table(&viscosity_datum()?, &eps_list, &probes, &QuadratureRule::gauss_hermite(nodes, 1)?)?;
        let target = |x: &[f64]| VISCOSITY_CURVATURE / (2.0 * (1.0 + VISCOSITY_CURVATURE)) * x[0] * x[0];
        let worst = table
            .rows
            .iter()
            .map(|row| {
                let exact = probes
                    .iter()
                    .map(|x| (viscous_quadratic(VISCOSITY_CURVATURE, row.eps, 1, x) - target(x)).abs())
                    .fold(0.0, f64::max);
                (row.sup_gap - exact).abs()
            })
            .fold(0.0, f64::max);
        let monotone = table.rows.windows(2).all(|w| w[1].sup_gap < w[0].sup_gap);
        Ok(CheckReport::builder("", "vanishing_viscosity_quadratic")
            .input("eps", eps_list.to_vec())
            .input("gaps", table.rows.iter().map(|r| r.sup_gap).collect::<Vec<_>>())
            .input("monotone", monotone)
            .tolerance(tol)
            .provenance(Provenance::Quadrature)
            .verdict(worst, 0.0, -worst, worst <= tol && monotone))
    }));
    jobs
}

// ----------------------------------------------------------------- santalo

fn cube_product(n: usize) -> f64 {
    4f64.powi(n as i32) / factorial(n)
}

fn simplex_product(n: usize) -> f64 {
    ((n + 1) as f64).powi(n as i32 + 1) / factorial(n).powi(2)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `psi = |x|^2/2` plus even convex perturbations.
pub(crate) fn perturbed_potential(rng: &mut ChaCha8Rng, dim: usize) -> impl Fn(&[f64]) -> f64 + Send + Sync {
    let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..2.0)).collect();
    let c = rng.gen_range(0.0..1.0);
    let b = rng.gen_range(0.5..2.0);
    let e = rng.gen_range(0.0..1.0);
    move |x: &[f64]| {
        let quad: f64 = x.iter().zip(&a).map(|(xi, ai)| 0.5 * ai * xi * xi).sum();
        let lc: f64 = x.iter().map(|xi| log_cosh(b * xi)).sum();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        quad + c * lc + e * (1.0 + r2).sqrt()
    }
}

fn log_cosh(t: f64) -> f64 {
    let t = t.abs();
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

pub(crate) fn functional_grid(dim: usize) -> (usize, f64) {
    match dim {
        1 => (6001, 12.0),
        _ => (801, 12.0),
    }
}

fn santalo(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let tol = cfg.tol("santalo.closed_form", defaults::CLOSED_FORM);
    for n in [2usize, 3] {
        let cases: Vec<(&str, BodyCtor, f64)> = vec![
            ("cube", ConvexBodySpec::cube, cube_product(n)),
            ("simplex", ConvexBodySpec::centered_simplex, simplex_product(n)),
            ("ball", ConvexBodySpec::euclidean_ball, ball_volume(n).powi(2)),
        ];
        for (name, make, exact) in cases {
            let opts = volume_opts(cfg);
            jobs.push(Job::new(format!("santalo.closed_form[{name},n={n}]"), move || {
                let v = volume_product(&make(n)?, &opts)?;
                Ok(CheckReport::builder("", "volume_product_closed_form")
                    .input("dim", n)
                    .tolerance(tol)
                    .provenance(Provenance::ClosedForm)
                    .equal(v.value, exact))
            }));
        }
        for (name, make, exact) in [
            ("cube", ConvexBodySpec::cube as fn(usize) -> Result<ConvexBodySpec>, cube_product(n)),
            ("simplex", ConvexBodySpec::centered_simplex, simplex_product(n)),
        ] {
            let opts = volume_opts(cfg);
            let sigmas = cfg.tol("santalo.monte_carlo", defaults::MC_SIGMAS);
            jobs.push(Job::new(format!("santalo.monte_carlo[{name},n={n}]"), move || {
                let v = volume_product_monte_carlo(&make(n)?, &opts)?;
                let dev = (v.value - exact).abs();
                Ok(CheckReport::builder("", "volume_product_closed_form")
                    .input("dim", n)
                    .input("samples", v.samples)
                    .input("std_error", v.std_error)
                    .tolerance(sigmas)
                    .seed(opts.seed)
                    .provenance(Provenance::MonteCarlo)
                    .verdict(v.value, exact, sigmas * v.std_error - dev, dev <= sigmas * v.std_error))
            }));
        }
    }
    let tol = cfg.tol("santalo.lp_family", defaults::QUADRATURE);
    for p in [1.25, 1.5, 3.0, 6.0] {
        let opts = volume_opts(cfg);
        jobs.push(Job::new(format!("santalo.lp_family[p={p}]"), move || {
            let v = volume_product(&ConvexBodySpec::lp_ball(2, p)?, &opts)?;
            let (lo, hi) = (8.0, PI * PI);
            let margin = (v.value - lo).min(hi - v.value);
            Ok(CheckReport::builder("", "volume_product_between_cube_and_ball")
                .input("p", p)
                .input("std_error", v.std_error)
                .tolerance(tol)
                .provenance(Provenance::Quadrature)
                .verdict(v.value, hi, margin, margin >= -tol * hi))
        }));
    }
    let tol = cfg.tol("santalo.linear_invariance", defaults::QUADRATURE);
    {
        let opts = volume_opts(cfg);
        jobs.push(Job::new("santalo.linear_invariance[cube]", move || {
            let map = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.7, -0.3, 0.5]);
            let v = volume_product(&ConvexBodySpec::linear_image(ConvexBodySpec::cube(2)?, map)?, &opts)?;
            Ok(CheckReport::builder("", "volume_product_linear_invariance")
                .input("std_error", v.std_error)
                .tolerance(tol)
                .provenance(Provenance::Quadrature)
                .equal(v.value, 8.0))
        }));
    }
    let tol = cfg.tol("santalo.point", 1e-3);
    for (name, shift) in [("cube", vec![0.3, -0.2]), ("ball", vec![-0.25, 0.1])] {
        let opts = VolumeOptions { sphere_resolution: 1024, ..volume_opts(cfg) };
        jobs.push(Job::new(format!("santalo.point[{name}]"), move || {
            let base = if name == "cube" { ConvexBodySpec::cube(2)? } else { ConvexBodySpec::euclidean_ball(2)? };
            let sp = santalo_point(&ConvexBodySpec::translated(base, shift.clone())?, &opts)?;
            let err = sp.point.iter().zip(&shift).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok(CheckReport::builder("", "santalo_point_of_translate")
                .input("shift", shift.clone())
                .input("point", sp.point.clone())
                .input("barycenter_residual", sp.barycenter_residual)
                .tolerance(tol)
                .provenance(Provenance::Quadrature)
                .verdict(err, 0.0, -err, err <= tol))
        }));
    }
    let tol = cfg.tol("santalo.functional", 1e-4);
    for dim in [1usize, 2] {
        let (m, half) = functional_grid(dim);
        let m = if dim == 2 { 1601 } else { m };
        jobs.push(Job::new(format!("santalo.functional_gaussian[n={dim}]"), move || {
            let psi = GridFunction::cube(dim, m, half, |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>())?;
            let v = functional_volume_product(&psi)?;
            Ok(CheckReport::builder("", "functional_santalo_equality")
                .input("dim", dim)
                .input("grid", m)
                .tolerance(tol)
                .provenance(Provenance::Grid)
                .equal(v, (2.0 * PI).powi(dim as i32)))
        }));
    }
    let mut r = rng(cfg, 0x5a27);
    for dim in [1usize, 2] {
        for k in 0..5 {
            let seed_k: u64 = r.gen();
            let (m, half) = functional_grid(dim);
            jobs.push(Job::new(format!("santalo.functional_perturbed[n={dim},{k}]"), move || {
                let psi = GridFunction::cube(dim, m, half, perturbed_potential(&mut ChaCha8Rng::seed_from_u64(seed_k), dim))?;
                let v = functional_volume_product(&psi)?;
                let (lo, hi) = (4f64.powi(dim as i32), (2.0 * PI).powi(dim as i32));
                let margin = (v - lo).min(hi - v);
                Ok(CheckReport::builder("", "functional_santalo_and_reverse")
                    .input("dim", dim)
                    .input("grid", m)
                    .input("lower", lo)
                    .tolerance(tol)
                    .seed(seed_k)
                    .provenance(Provenance::Grid)
                    .verdict(v, hi, margin, margin >= -tol))
            }));
        }
    }
    jobs
}

// ------------------------------------------------------------------ mahler

pub(crate) const CURVATURE_SAMPLES: usize = 400;

fn mahler(cfg: &SuiteConfig) -> Vec<Job> {
    let tol = cfg.tol("mahler", defaults::QUADRATURE);
    let opts = volume_opts(cfg);
    let mut cases: Vec<(String, BodyThunk)> = Vec::new();
    for lambda in [1.0, 2.0, 4.0] {
        cases.push((format!("firey_cube,lambda={lambda}"), Box::new(move || ConvexBodySpec::firey(ConvexBodySpec::cube(2)?, lambda))));
    }
    cases.push(("ball".into(), Box::new(|| ConvexBodySpec::euclidean_ball(2))));
    cases.push(("scaled_ball".into(), Box::new(|| ConvexBodySpec::scaled(ConvexBodySpec::euclidean_ball(2)?, 2.5))));
    cases.push(("ellipse".into(), Box::new(|| ConvexBodySpec::diagonal_ellipsoid(&[4.0, 1.0]))));
    cases
        .into_iter()
        .map(|(name, make)| {
            Job::new(format!("mahler.improved[{name}]"), move || improved_mahler_check(&make()?, CURVATURE_SAMPLES, &opts, tol))
        })
        .collect()
}

// ---------------------------------------------------------------- weighted

/// Reports for `K = (1/kappa) B_2^2`, where the bound is attained.
pub(crate) fn weighted_equality(kappa: f64, a: f64, opts: &VolumeOptions, tol: f64) -> Result<Vec<CheckReport>> {
    let body = ConvexBodySpec::scaled(ConvexBodySpec::euclidean_ball(2)?, 1.0 / kappa)?;
    Ok(weighted_bound_checks(&body, a, Some(kappa), CURVATURE_SAMPLES, opts, tol)?
        .iter()
        .map(|r| as_identity(r, "weighted_product_equality", tol))
        .collect())
}

fn weighted(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let opts = volume_opts(cfg);
    let tol = cfg.tol("weighted.equality", 1e-3);
    for kappa in [0.5, 0.8] {
        for a in [0.25, 0.5, 0.75] {
            jobs.push(Job::new(format!("weighted.equality[kappa={kappa},a={a}]"), move || {
                let reps = weighted_equality(kappa, a, &opts, tol)?;
                Ok(reps.into_iter().reduce(|worst, r| if !r.passed || r.margin < worst.margin { r } else { worst }).expect("nonempty"))
            }));
        }
    }
    let tol = cfg.tol("weighted.ball_mass", 1e-4);
    for a in [0.25, 0.5, 0.75] {
        for (label, path) in [("radial", WeightedPath::Radial), ("gaussian", WeightedPath::Gaussian)] {
            jobs.push(Job::new(format!("weighted.ball_mass[a={a},{label}]"), move || {
                let mu = CauchyMeasure::new(1.0 - a, 2)?;
                let v = weighted_volume(&ConvexBodySpec::euclidean_ball(2)?, &mu, path, &opts)?;
                Ok(CheckReport::builder("", "cauchy_mass_of_unit_ball")
                    .input("a", a)
                    .input("std_error", v.std_error)
                    .tolerance(tol)
                    .provenance(Provenance::Quadrature)
                    .equal(v.value, PI))
            }));
        }
    }
    let tol = cfg.tol("weighted.paths", 1e-4);
    for a in [0.25, 0.5, 0.75] {
        for name in ["ellipse", "sheared_ellipse"] {
            jobs.push(Job::new(format!("weighted.paths[{name},a={a}]"), move || {
                let mu = CauchyMeasure::new(a, 2)?;
                let body = if name == "ellipse" {
                    ConvexBodySpec::diagonal_ellipsoid(&[2.0, 0.5])?
                } else {
                    let map = nalgebra::DMatrix::from_row_slice(2, 2, &[1.2, 0.6, 0.0, 0.8]);
                    ConvexBodySpec::linear_image(ConvexBodySpec::euclidean_ball(2)?, map)?
                };
                let radial = weighted_volume(&body, &mu, WeightedPath::Radial, &opts)?;
                let gauss = weighted_volume(&body, &mu, WeightedPath::Gaussian, &opts)?;
                Ok(CheckReport::builder("", "cauchy_mass_two_paths")
                    .input("a", a)
                    .input("body", body.describe())
                    .tolerance(tol)
                    .provenance(Provenance::Quadrature)
                    .equal(gauss.value, radial.value))
            }));
        }
        let sigmas = cfg.tol("weighted.monte_carlo", defaults::MC_SIGMAS);
        jobs.push(Job::new(format!("weighted.monte_carlo[cube,a={a}]"), move || {
            let mu = CauchyMeasure::new(a, 2)?;
            let cube = ConvexBodySpec::cube(2)?;
            let radial = weighted_volume(&cube, &mu, WeightedPath::Radial, &opts)?;
            let mc = weighted_volume(&cube, &mu, WeightedPath::MonteCarlo, &opts)?;
            let dev = (mc.value - radial.value).abs();
            Ok(CheckReport::builder("", "cauchy_mass_two_paths")
                .input("a", a)
                .input("samples", mc.samples)
                .input("std_error", mc.std_error)
                .tolerance(sigmas)
                .seed(opts.seed)
                .provenance(Provenance::MonteCarlo)
                .verdict(mc.value, radial.value, sigmas * mc.std_error - dev, dev <= sigmas * mc.std_error))
        }));
    }
    let tol = cfg.tol("weighted.bound", defaults::QUADRATURE);
    for lambda in [1.0, 4.0] {
        for a in [0.25, 0.5] {
            jobs.push(Job::new(format!("weighted.bound[firey_cube,lambda={lambda},a={a}]"), move || {
                let body = ConvexBodySpec::firey(ConvexBodySpec::cube(2)?, lambda)?;
                let reps = weighted_bound_checks(&body, a, None, CURVATURE_SAMPLES, &opts, tol)?;
                Ok(reps.into_iter().reduce(|worst, r| if !r.passed || r.margin < worst.margin { r } else { worst }).expect("nonempty"))
            }));
        }
    }
    jobs
}

// ------------------------------------------------------------------- flows

pub(crate) const FLOW_GRID: (usize, f64) = (481, 12.0);
pub(crate) const FLOW_BETA: f64 = 2.0;
pub(crate) const FLOW_INITIAL_BETA: f64 = 1.5;
pub(crate) const FLOW_TIMES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

fn flow_rule(cfg: &SuiteConfig) -> Result<QuadratureRule> {
    QuadratureRule::gauss_hermite(cfg.quadrature_points.min(48), 1)
}

fn flow_initial(beta: f64) -> Result<GridFunction> {
    gaussian_density_grid(1, FLOW_GRID.0, FLOW_GRID.1, beta, 1.0)
}

fn sup_rel(a: &GridFunction, b: &GridFunction) -> f64 {
    let top = b.values().iter().cloned().fold(0.0, f64::max);
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / top
}

/// `Q(t)` along `FLOW_TIMES` for Nelson exponents at `(p, s)`.
pub(crate) fn flow_functional_path(cfg: &SuiteConfig, p: f64, s: f64, times: &[f64]) -> Result<Vec<f64>> {
    let r = flow_rule(cfg)?;
    let e = HcExponents::nelson(p, s, FLOW_BETA)?;
    let v0 = flow_initial(FLOW_INITIAL_BETA)?;
    times
        .iter()
        .map(|&t| monotone_functional(&fokker_planck_evolve(&v0, FLOW_BETA, t, &r)?, &e, &r))
        .collect()
}

fn flows(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let tol = cfg.tol("flows.kernel", defaults::QUADRATURE);
    let c = cfg.clone();
    jobs.push(Job::new("flows.stationary[beta=2]", move || {
        let v0 = flow_initial(FLOW_BETA)?;
        let state = fokker_planck_evolve(&v0, FLOW_BETA, 1.0, &flow_rule(&c)?)?;
        let gap = sup_rel(&state.v, &v0);
        Ok(CheckReport::builder("", "fokker_planck_stationary_profile")
            .tolerance(tol)
            .provenance(Provenance::Grid)
            .verdict(gap, 0.0, -gap, gap <= tol))
    }));
    for (t, b0) in [(0.3, 1.2), (1.0, 1.5), (0.05, 4.0)] {
        let c = cfg.clone();
        jobs.push(Job::new(format!("flows.gaussian[t={t},beta0={b0}]"), move || {
            let state = fokker_planck_evolve(&flow_initial(b0)?, FLOW_BETA, t, &flow_rule(&c)?)?;
            let bt = FLOW_BETA + (b0 - FLOW_BETA) * (-2.0 * t).exp();
            let gap = sup_rel(&state.v, &flow_initial(bt)?);
            Ok(CheckReport::builder("", "fokker_planck_gaussian_solution")
                .input("t", t)
                .input("initial_beta", b0)
                .tolerance(tol)
                .provenance(Provenance::Grid)
                .verdict(gap, 0.0, -gap, gap <= tol))
        }));
    }
    let c = cfg.clone();
    jobs.push(Job::new("flows.mass[t=0.7]", move || {
        let v0 = flow_initial(FLOW_INITIAL_BETA)?;
        let state = fokker_planck_evolve(&v0, FLOW_BETA, 0.7, &flow_rule(&c)?)?;
        Ok(CheckReport::builder("", "fokker_planck_mass_conservation")
            .tolerance(tol)
            .provenance(Provenance::Grid)
            .equal(state.mass(), v0.integrate_with(|v| v)))
    }));
    let c = cfg.clone();
    jobs.push(Job::new("flows.semigroup[0.3+0.4]", move || {
        let r = flow_rule(&c)?;
        let v0 = flow_initial(FLOW_INITIAL_BETA)?;
        let two_step = fokker_planck_evolve(&fokker_planck_evolve(&v0, FLOW_BETA, 0.3, &r)?.v, FLOW_BETA, 0.4, &r)?;
        let one_step = fokker_planck_evolve(&v0, FLOW_BETA, 0.7, &r)?;
        let gap = sup_rel(&two_step.v, &one_step.v);
        Ok(CheckReport::builder("", "fokker_planck_semigroup_property")
            .tolerance(tol)
            .provenance(Provenance::Grid)
            .verdict(gap, 0.0, -gap, gap <= tol))
    }));
    let step_tol = cfg.tol("flows.monotone", 1e-6);
    for (p, label, decreasing) in [(0.5, "reverse", true), (0.8, "forward", false)] {
        let c = cfg.clone();
        jobs.push(Job::new(format!("flows.monotone[{label},p={p}]"), move || {
            let q_path = flow_functional_path(&c, p, 0.5, &FLOW_TIMES)?;
            let worst = q_path
                .windows(2)
                .map(|w| if decreasing { w[0] - w[1] } else { w[1] - w[0] })
                .fold(f64::INFINITY, f64::min);
            Ok(CheckReport::builder("", "fokker_planck_monotone_functional")
                .input("p", p)
                .input("s", 0.5)
                .input("times", FLOW_TIMES.to_vec())
                .input("values", q_path.clone())
                .tolerance(step_tol)
                .provenance(Provenance::Quadrature)
                .verdict(q_path[q_path.len() - 1], q_path[0], worst, worst >= -step_tol))
        }));
    }
    let tol = cfg.tol("flows.stationary_functional", defaults::QUADRATURE);
    let c = cfg.clone();
    jobs.push(Job::new("flows.stationary_functional[p=0.5]", move || {
        let r = flow_rule(&c)?;
        let e = HcExponents::nelson(0.5, 0.5, FLOW_BETA)?;
        let v0 = flow_initial(FLOW_BETA)?;
        let start = monotone_functional(&fokker_planck_evolve(&v0, FLOW_BETA, 0.0, &r)?, &e, &r)?;
        let later = monotone_functional(&fokker_planck_evolve(&v0, FLOW_BETA, 1.5, &r)?, &e, &r)?;
        Ok(CheckReport::builder("", "monotone_functional_constant_at_equilibrium")
            .tolerance(tol)
            .provenance(Provenance::Quadrature)
            .equal(later, start))
    }));
    let tol = cfg.tol("flows.limit", 1e-4);
    let c = cfg.clone();
    jobs.push(Job::new("flows.limit[p=0.5,t=6]", move || {
        let e = HcExponents::nelson(0.5, 0.5, FLOW_BETA)?;
        let late = flow_functional_path(&c, 0.5, 0.5, &[6.0])?[0];
        let limit = hc_gaussian_norm(&e, 1)?.value.powf(e.q);
        Ok(CheckReport::builder("", "monotone_functional_equilibrium_limit")
            .tolerance(tol)
            .provenance(Provenance::Quadrature)
            .equal(late, limit))
    }));
    for (p, label) in [(0.5, "reverse"), (0.8, "forward")] {
        let c = cfg.clone();
        jobs.push(Job::new(format!("flows.closure[{label},p={p}]"), move || {
            let r = flow_rule(&c)?;
            let e = HcExponents::nelson(p, 0.5, FLOW_BETA)?;
            let state = fokker_planck_evolve(&flow_initial(FLOW_INITIAL_BETA)?, FLOW_BETA, 0.5, &r)?;
            let probes: Vec<Vec<f64>> = (0..10).map(|k| vec![-2.9 + 0.6 * k as f64]).collect();
            let probe = closure_residual_probe(&state, &e, &probes, &r)?;
            let sign = probe.expected_sign as f64;
            let worst = probe.residuals.iter().map(|v| sign * v).fold(f64::INFINITY, f64::min);
            Ok(CheckReport::builder("", "fokker_planck_closure_inequality")
                .input("p", p)
                .input("expected_sign", probe.expected_sign as i64)
                .tolerance(probe.band)
                .provenance(Provenance::Quadrature)
                .verdict(worst, 0.0, worst, probe.passed))
        }));
    }
    jobs
}
