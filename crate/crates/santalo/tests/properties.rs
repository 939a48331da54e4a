use proptest::prelude::*;

use santalo::body::{lp_norm, conjugate_exponent, ConvexBodySpec};
use santalo::fenchel::{hj_flow, legendre, SlopeGrid};
use santalo::flows::{fokker_planck_evolve, gaussian_density_grid};
use santalo::gaussian::{
    classify_admissibility, hc_gaussian_norm, ou_closed_form, p_endpoint, q_endpoint, GaussianFunction, HcExponents,
};
use santalo::grid::GridFunction;
use santalo::ou::{apply_ou, gamma_integral, lq_gamma_norm, reverse_hc_check, ScalarField};
use santalo::quadrature::QuadratureRule;
use santalo::verify::{self, brute_force_admissibility, Suite, SuiteConfig};
use santalo::volumes::{volume_product, VolumeOptions};

use nalgebra::DMatrix;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Exact `int g dgamma` for an exponential-quadratic `g`.
fn exact_mass(g: &GaussianFunction) -> f64 {
    g.lq_norm(1.0).value
}

fn gaussian_fn(dim: usize) -> impl Strategy<Value = GaussianFunction> {
    (-0.4f64..0.9, prop::collection::vec(-1.0f64..1.0, dim), -1.0f64..1.0)
        .prop_map(|(a, b, c)| GaussianFunction::new(a, b, c).unwrap())
}

fn mixture(weights: Vec<f64>, means: Vec<f64>, widths: Vec<f64>) -> ScalarField {
    ScalarField::symmetric(1, move |x| {
        weights
            .iter()
            .zip(&means)
            .zip(&widths)
            .map(|((w, m), s)| {
                let (l, r) = ((x[0] - m) / s, (x[0] + m) / s);
                w * ((-0.5 * l * l).exp() + (-0.5 * r * r).exp())
            })
            .sum()
    })
    .unwrap()
}

fn mixture_parts() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..4).prop_flat_map(|k| {
        (
            prop::collection::vec(0.1f64..1.0, k),
            prop::collection::vec(-1.0f64..1.0, k),
            prop::collection::vec(0.6f64..1.5, k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_semigroup_preserves_mass(g in gaussian_fn(2), s in 0.01f64..3.0) {
        let img = ou_closed_form(s, &g).unwrap();
        prop_assert!(rel(exact_mass(&img), exact_mass(&g)) < 1e-12);
    }

    #[test]
    fn closed_form_semigroup_law(g in gaussian_fn(2), s in 0.01f64..2.0, t in 0.01f64..2.0) {
        let two_step = ou_closed_form(t, &ou_closed_form(s, &g).unwrap()).unwrap();
        let one_step = ou_closed_form(s + t, &g).unwrap();
        prop_assert!((two_step.quad - one_step.quad).abs() <= 1e-12 * one_step.quad.abs().max(1.0));
        prop_assert!((two_step.log_scale - one_step.log_scale).abs() <= 1e-12 * one_step.log_scale.abs().max(1.0));
        for (x, y) in two_step.linear.iter().zip(&one_step.linear) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn endpoint_norm_is_scale_free(beta in 0.05f64..20.0, s in 0.02f64..3.0, dim in 1usize..4) {
        let e = HcExponents::new(p_endpoint(s), q_endpoint(s), s, beta).unwrap();
        let v = hc_gaussian_norm(&e, dim).unwrap();
        prop_assert!(v.is_finite());
        prop_assert!((v.value - 1.0).abs() < 1e-12, "norm {}", v.value);
    }

    #[test]
    fn gaussian_norm_is_monotone_in_q(
        p in 0.1f64..0.95, s in 0.05f64..1.5, beta in 0.2f64..5.0,
        q1 in -4.0f64..0.99, q2 in -4.0f64..0.99,
    ) {
        prop_assume!(q1.abs() > 1e-3 && q2.abs() > 1e-3);
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let a = hc_gaussian_norm(&HcExponents::new(p, lo, s, beta).unwrap(), 1).unwrap();
        let b = hc_gaussian_norm(&HcExponents::new(p, hi, s, beta).unwrap(), 1).unwrap();
        prop_assume!(a.is_finite() && b.is_finite());
        prop_assert!(a.value <= b.value * (1.0 + 1e-12));
    }

    #[test]
    fn image_variance_identity(p in 0.05f64..0.99, s in 0.01f64..2.0, beta in 1.0f64..10.0) {
        let e = HcExponents::nelson(p, s, beta).unwrap();
        let direct = beta - (beta - 1.0) * p_endpoint(s) / p;
        prop_assert!((e.beta_sp() - direct).abs() <= 1e-13 * direct.abs().max(1.0));
    }

    #[test]
    fn gauge_is_positively_homogeneous(
        x in prop::collection::vec(-3.0f64..3.0, 2), t in 0.01f64..100.0, p in 1.0f64..8.0,
    ) {
        for body in [ConvexBodySpec::lp_ball(2, p).unwrap(), ConvexBodySpec::centered_simplex(2).unwrap()] {
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let (g, gt) = (body.gauge(&x), body.gauge(&tx));
            prop_assert!((gt - t * g).abs() <= 1e-12 * gt.abs().max(1.0));
        }
    }

    #[test]
    fn gauge_triangle_inequality(
        x in prop::collection::vec(-3.0f64..3.0, 3), y in prop::collection::vec(-3.0f64..3.0, 3),
        p in 1.0f64..8.0, lambda in 0.2f64..4.0,
    ) {
        let lp = ConvexBodySpec::lp_ball(3, p).unwrap();
        let firey = ConvexBodySpec::firey(ConvexBodySpec::cube(3).unwrap(), lambda).unwrap();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        for body in [lp, firey] {
            prop_assert!(body.gauge(&sum) <= body.gauge(&x) + body.gauge(&y) + 1e-12);
        }
    }

    #[test]
    fn polar_gauge_is_support(y in prop::collection::vec(-3.0f64..3.0, 2), p in 1.0f64..8.0) {
        let body = ConvexBodySpec::lp_ball(2, p).unwrap();
        let polar = body.polar();
        let expected = lp_norm(&y, conjugate_exponent(p));
        prop_assert!(rel(polar.gauge(&y), expected) < 1e-10 || expected < 1e-12);
        prop_assert!(rel(body.support(&y), expected) < 1e-10 || expected < 1e-12);
    }

    #[test]
    fn grid_binary_roundtrip(values in prop::collection::vec(-1e6f64..1e6, 12), lo in -5.0f64..0.0, hi in 0.1f64..5.0) {
        let g = GridFunction::new(vec![3, 4], vec![lo, lo], vec![hi, 2.0 * hi], values).unwrap();
        prop_assert_eq!(GridFunction::from_bytes(&g.to_bytes()).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_matches_brute_force(s in 0.1f64..1.5, p in 0.05f64..0.95, q in -4.0f64..-0.1) {
        let e2 = (2.0 * s).exp();
        prop_assume!(q < 1.0 - e2 + e2 * p);
        // Keep clear of the two endpoint lines, where the variance search is flat.
        prop_assume!((p - p_endpoint(s)).abs() > 0.02 && (q - q_endpoint(s)).abs() > 0.05);
        let report = classify_admissibility(p, q, s).unwrap();
        let (inf_pos, sup_fin) = brute_force_admissibility(p, q, s).unwrap();
        prop_assert_eq!(report.inf_over_beta_positive, inf_pos);
        prop_assert_eq!(report.sup_over_beta_finite, sup_fin);
    }

    #[test]
    fn quadrature_matches_closed_form(g in gaussian_fn(1), s in 0.05f64..2.0, q in -3.0f64..1.0) {
        prop_assume!(q.abs() > 1e-3);
        let rule = QuadratureRule::gauss_hermite(64, 1).unwrap();
        let img = ou_closed_form(s, &g).unwrap();
        // Near-flat integrands converge slowly under a Gaussian-weighted rule.
        prop_assume!(1.0 + q * img.quad >= 0.5);
        let exact = img.lq_norm(q);
        let numeric = lq_gamma_norm(&apply_ou(&ScalarField::from_gaussian(g), s, &rule).unwrap(), q, &rule).unwrap();
        prop_assert!(rel(numeric, exact.value) < 1e-8, "{numeric} vs {}", exact.value);
    }

    #[test]
    fn quadrature_preserves_mass((w, m, sd) in mixture_parts(), s in 0.05f64..2.0) {
        let rule = QuadratureRule::gauss_hermite(64, 1).unwrap();
        let f = mixture(w, m, sd);
        let before = gamma_integral(&f, &rule).unwrap();
        let after = gamma_integral(&apply_ou(&f, s, &rule).unwrap(), &rule).unwrap();
        prop_assert!((after - before).abs() <= 1e-9);
    }

    #[test]
    fn reverse_margin_ratio_is_scale_free((w, m, sd) in mixture_parts(), s in 0.1f64..1.5) {
        let rule = QuadratureRule::gauss_hermite(64, 1).unwrap();
        let base = reverse_hc_check(&mixture(w.clone(), m.clone(), sd.clone()), s, &rule, 1e-9).unwrap();
        prop_assert!(base.passed);
        for c in [0.1, 10.0] {
            let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
            let rep = reverse_hc_check(&mixture(scaled, m.clone(), sd.clone()), s, &rule, 1e-9).unwrap();
            prop_assert!((rep.margin_ratio() - base.margin_ratio()).abs() <= 1e-9 * base.margin_ratio().abs().max(1.0));
        }
    }

    #[test]
    fn fenchel_young_and_order_reversal(a in 0.2f64..3.0, b in 0.0f64..2.0, shift in 0.0f64..1.0) {
        let f = GridFunction::cube(1, 201, 3.0, |x| 0.5 * a * x[0] * x[0] + b * x[0].abs()).unwrap();
        let g = f.map(|v| v + shift);
        let slopes = SlopeGrid::cube(1, 151, 4.0);
        let fc = legendre(&f, Some(slopes.clone())).unwrap();
        let gc = legendre(&g, Some(slopes)).unwrap();
        for j in 0..fc.len() {
            let y = fc.point(j)[0];
            prop_assert!(gc.values()[j] <= fc.values()[j] + 1e-12);
            for k in (0..f.len()).step_by(7) {
                let x = f.point(k)[0];
                prop_assert!(f.values()[k] + fc.values()[j] >= x * y - 1e-12);
            }
        }
    }

    #[test]
    fn biconjugate_of_convex_data(a in 0.2f64..2.0, b in -1.0f64..1.0) {
        let f = GridFunction::cube(1, 401, 2.0, |x| 0.5 * a * x[0] * x[0] + b * x[0] + (0.5 * x[0]).cosh()).unwrap();
        let h = f.spacing(0);
        let lipschitz = f.values().windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
        let range = lipschitz * 1.1;
        let fc = legendre(&f, Some(SlopeGrid { shape: vec![801], lo: vec![-range], hi: vec![range] })).unwrap();
        let fcc = legendre(&fc, Some(SlopeGrid::same_as(&f))).unwrap();
        let gap = f.values().iter().zip(fcc.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 2.0 * h * lipschitz, "gap {gap}");
    }

    #[test]
    fn hopf_lax_scaling(t in 0.3f64..3.0, c in 0.2f64..2.0) {
        let phi = GridFunction::cube(1, 301, 4.0, |x| c * (x[0] * x[0] + 1.0).sqrt()).unwrap();
        let lhs = hj_flow(&phi, t).unwrap().map(|v| t * v);
        let rhs = hj_flow(&phi.map(|v| t * v), 1.0).unwrap();
        let gap = lhs.values().iter().zip(rhs.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-10, "gap {gap}");
    }

    #[test]
    fn volume_product_is_linearly_invariant(
        p in 1.0f64..8.0, entries in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let map = DMatrix::from_row_slice(2, 2, &entries) + DMatrix::identity(2, 2) * 2.5;
        let cond = {
            let sv = map.clone().svd(false, false).singular_values;
            sv.max() / sv.min()
        };
        prop_assume!(cond <= 10.0);
        let opts = VolumeOptions::default();
        let base = ConvexBodySpec::lp_ball(2, p).unwrap();
        let image = ConvexBodySpec::linear_image(base.clone(), map).unwrap();
        let (a, b) = (volume_product(&base, &opts).unwrap(), volume_product(&image, &opts).unwrap());
        let sigma = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        prop_assert!((a.value - b.value).abs() <= (3.0 * sigma).max(1e-9 * a.value));
    }

    #[test]
    fn suite_config_json_roundtrip(seed in any::<u64>(), dim in 1usize..3, qp in 8usize..200, mc in 1usize..1_000_000) {
        let cfg = SuiteConfig { suite: Suite::Fenchel, dim, quadrature_points: qp, mc_samples: mc, seed, ..Default::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(SuiteConfig::parse(&text).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn flow_semigroup_and_positivity(t1 in 0.1f64..0.8, t2 in 0.1f64..0.8, beta0 in 1.0f64..2.5) {
        let rule = QuadratureRule::gauss_hermite(48, 1).unwrap();
        let v0 = gaussian_density_grid(1, 481, 12.0, beta0, 1.0).unwrap();
        let beta = 2.0;
        let first = fokker_planck_evolve(&v0, beta, t1, &rule).unwrap();
        prop_assert!(first.v.values().iter().all(|v| *v > 0.0));
        let two_step = fokker_planck_evolve(&first.v, beta, t2, &rule).unwrap();
        let one_step = fokker_planck_evolve(&v0, beta, t1 + t2, &rule).unwrap();
        let interior = (0..v0.len()).filter(|&k| v0.point(k)[0].abs() <= 6.0);
        let gap = interior.map(|k| (two_step.v.values()[k] - one_step.v.values()[k]).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn suite_output_is_deterministic(seed in any::<u64>()) {
        let cfg = SuiteConfig { suite: Suite::ReverseHc, seed, ..Default::default() };
        let first = verify::reports_json(&verify::run_suite(&cfg).unwrap()).unwrap();
        let second = verify::reports_json(&verify::run_suite(&cfg).unwrap()).unwrap();
        prop_assert_eq!(first, second);
    }
}
