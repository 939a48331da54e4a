//! Closed forms for exponential-quadratic functions under the OU semigroup.
//!
//! Everything here is exact arithmetic on a three-parameter family; the
//! quadrature-based code in [`crate::ou`] is validated against it.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{E, PI};

use crate::error::{arg, domain, Result};

/// `scale * exp(-quad*|x|^2/2 + <linear, x>)`, with the scale kept in log form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFunction {
    pub quad: f64,
    pub linear: Vec<f64>,
    pub log_scale: f64,
}

impl GaussianFunction {
    pub fn new(quad: f64, linear: Vec<f64>, log_scale: f64) -> Result<Self> {
        if linear.is_empty() {
            return Err(arg("dimension must be positive"));
        }
        if !quad.is_finite() || !log_scale.is_finite() || linear.iter().any(|b| !b.is_finite()) {
            return Err(arg("gaussian parameters must be finite"));
        }
        Ok(Self { quad, linear, log_scale })
    }

    pub fn centered(quad: f64, dim: usize) -> Result<Self> {
        Self::new(quad, vec![0.0; dim], 0.0)
    }

    /// The density ratio `gamma_beta(x + shift) / gamma(x)`.
    pub fn density_ratio(beta: f64, shift: &[f64]) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(arg(format!("variance must be positive, got {beta}")));
        }
        let n = shift.len() as f64;
        let shift_sq: f64 = shift.iter().map(|a| a * a).sum();
        Self::new(
            1.0 / beta - 1.0,
            shift.iter().map(|a| -a / beta).collect(),
            -0.5 * n * beta.ln() - shift_sq / (2.0 * beta),
        )
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn log_eval(&self, x: &[f64]) -> f64 {
        let sq: f64 = x.iter().map(|t| t * t).sum();
        let lin: f64 = x.iter().zip(&self.linear).map(|(t, b)| t * b).sum();
        self.log_scale - 0.5 * self.quad * sq + lin
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.log_eval(x).exp()
    }

    /// `self^r`, again exponential-quadratic.
    pub fn powf(&self, r: f64) -> Self {
        Self {
            quad: self.quad * r,
            linear: self.linear.iter().map(|b| b * r).collect(),
            log_scale: self.log_scale * r,
        }
    }

    /// Exact `L^q(gamma)` norm; `q = 0` is the geometric mean.
    pub fn lq_norm(&self, q: f64) -> NormValue {
        let n = self.dim() as f64;
        let b_sq: f64 = self.linear.iter().map(|b| b * b).sum();
        if q == 0.0 {
            return NormValue::finite((self.log_scale - 0.5 * self.quad * n).exp());
        }
        let curv = 1.0 + q * self.quad;
        if curv <= 0.0 {
            return NormValue::second_failed(q);
        }
        let log_norm = self.log_scale - n / (2.0 * q) * curv.ln() + q * b_sq / (2.0 * curv);
        NormValue::finite(log_norm.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormStatus {
    Finite,
    /// The semigroup integral itself diverges.
    FirstConditionFailed,
    /// The semigroup output is not in `L^q`.
    SecondConditionFailed,
}

/// A norm value with the reason it is infinite or zero, if it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub status: NormStatus,
}

impl NormValue {
    fn finite(value: f64) -> Self {
        Self { value, status: NormStatus::Finite }
    }

    fn first_failed() -> Self {
        Self { value: f64::INFINITY, status: NormStatus::FirstConditionFailed }
    }

    fn second_failed(q: f64) -> Self {
        let value = if q > 0.0 { f64::INFINITY } else { 0.0 };
        Self { value, status: NormStatus::SecondConditionFailed }
    }

    pub fn is_finite(&self) -> bool {
        self.status == NormStatus::Finite
    }
}

/// Exponent triple plus an optional variance parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcExponents {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub beta: f64,
}

impl HcExponents {
    pub fn new(p: f64, q: f64, s: f64, beta: f64) -> Result<Self> {
        let e = Self { p, q, s, beta };
        e.validate()?;
        Ok(e)
    }

    /// Exponents on the critical line `(q-1)/(p-1) = e^{2s}`.
    pub fn nelson(p: f64, s: f64, beta: f64) -> Result<Self> {
        Self::new(p, 1.0 + (p - 1.0) * (2.0 * s).exp(), s, beta)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, q, s, beta } = *self;
        if !p.is_finite() || !q.is_finite() || p == 0.0 || q == 0.0 {
            return Err(arg(format!("exponents must be finite and nonzero, got p={p}, q={q}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(arg(format!("time must be positive, got s={s}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(arg(format!("variance must be positive, got beta={beta}")));
        }
        Ok(())
    }

    /// `1 - e^{-2s}`, the endpoint exponent on the input side.
    pub fn p_endpoint(&self) -> f64 {
        p_endpoint(self.s)
    }

    /// `1 - e^{2s}`, the endpoint exponent on the output side.
    pub fn q_endpoint(&self) -> f64 {
        q_endpoint(self.s)
    }

    pub fn nelson_gap(&self) -> f64 {
        (self.q - 1.0) / (self.p - 1.0) - (2.0 * self.s).exp()
    }

    pub fn is_nelson_critical(&self, tol: f64) -> bool {
        self.p != 1.0 && self.nelson_gap().abs() <= tol * (2.0 * self.s).exp()
    }

    /// Past the Nelson line on the reverse side: `q < 1 - e^{2s} + e^{2s} p`.
    pub fn beyond_nelson(&self) -> bool {
        let e2 = (2.0 * self.s).exp();
        self.q < 1.0 - e2 + e2 * self.p
    }

    /// Variance of the image Gaussian on the Nelson line.
    pub fn beta_sp(&self) -> f64 {
        1.0 + (self.beta - 1.0) * (self.q / self.p) * (-2.0 * self.s).exp()
    }

    /// The two factors whose positivity keeps the Gaussian norm finite and nonzero.
    pub fn positivity_factors(&self) -> (f64, f64) {
        let e2 = (-2.0 * self.s).exp();
        let inv = 1.0 / self.beta - 1.0;
        let phi1 = 1.0 + inv * (1.0 - e2) / self.p;
        let phi2 = 1.0 + (1.0 - e2 + self.q * e2) / self.p * inv;
        (phi1, phi2)
    }
}

pub fn p_endpoint(s: f64) -> f64 {
    -(-2.0 * s).exp_m1()
}

pub fn q_endpoint(s: f64) -> f64 {
    -(2.0 * s).exp_m1()
}

/// Exact OU image of an exponential-quadratic function.
pub fn ou_closed_form(s: f64, g: &GaussianFunction) -> Result<GaussianFunction> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(arg(format!("time must be nonnegative, got {s}")));
    }
    let n = g.dim() as f64;
    let p_s = p_endpoint(s);
    let a_s = 1.0 + g.quad * p_s;
    if a_s <= 0.0 {
        return Err(domain(format!("semigroup integral diverges: 1 + a(1-e^(-2s)) = {a_s}")));
    }
    let decay = (-s).exp();
    let b_sq: f64 = g.linear.iter().map(|b| b * b).sum();
    GaussianFunction::new(
        g.quad * decay * decay / a_s,
        g.linear.iter().map(|b| decay * b / a_s).collect(),
        g.log_scale - 0.5 * n * a_s.ln() + p_s * b_sq / (2.0 * a_s),
    )
}

/// `|| P_s[(gamma_beta/gamma)^{1/p}] ||_{L^q(gamma)}` for centered Gaussians.
pub fn hc_gaussian_norm(e: &HcExponents, dim: usize) -> Result<NormValue> {
    e.validate()?;
    if dim == 0 {
        return Err(arg("dimension must be positive"));
    }
    let n = dim as f64;
    let (phi1, phi2) = e.positivity_factors();
    if phi1 <= 0.0 {
        return Ok(NormValue::first_failed());
    }
    if phi2 <= 0.0 {
        return Ok(NormValue::second_failed(e.q));
    }
    let log = -n / (2.0 * e.p) * e.beta.ln() + 0.5 * n * (1.0 / e.q - 1.0) * phi1.ln() - n / (2.0 * e.q) * phi2.ln();
    Ok(NormValue::finite(log.exp()))
}

/// Geometric-mean (`L^0`) counterpart of [`hc_gaussian_norm`].
pub fn hc_gaussian_norm_l0(p: f64, s: f64, beta: f64, dim: usize) -> Result<NormValue> {
    HcExponents::new(p, -1.0, s, beta)?;
    let g = GaussianFunction::density_ratio(beta, &vec![0.0; dim])?.powf(1.0 / p);
    match ou_closed_form(s, &g) {
        Ok(img) => Ok(img.lq_norm(0.0)),
        Err(_) => Ok(NormValue::first_failed()),
    }
}

/// Nelson-line value `beta^{n/2p'} beta_sp^{-n/2q'}`.
pub fn nelson_gaussian_norm(e: &HcExponents, dim: usize) -> Result<f64> {
    e.validate()?;
    let beta_sp = e.beta_sp();
    if beta_sp <= 0.0 {
        return Err(domain(format!("image variance {beta_sp} is not positive")));
    }
    let n = dim as f64;
    let inv_pc = 1.0 - 1.0 / e.p;
    let inv_qc = 1.0 - 1.0 / e.q;
    Ok((0.5 * n * inv_pc * e.beta.ln() - 0.5 * n * inv_qc * beta_sp.ln()).exp())
}

/// Norm of the semigroup applied to a translated Gaussian density ratio.
pub fn translated_gaussian_norm(e: &HcExponents, shift: &[f64]) -> Result<NormValue> {
    e.validate()?;
    let g = GaussianFunction::density_ratio(e.beta, shift)?.powf(1.0 / e.p);
    match ou_closed_form(e.s, &g) {
        Ok(img) => Ok(img.lq_norm(e.q)),
        Err(_) => Ok(NormValue::first_failed()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Nelson,
    BeyondNelsonReverse,
    BeyondNelsonForward,
    Endpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub inf_over_beta_positive: bool,
    pub sup_over_beta_finite: bool,
    /// Root above one of the first positivity condition.
    pub phi1_root: Option<f64>,
    /// Root below one of the second positivity condition.
    pub phi2_root: Option<f64>,
    pub regime: Regime,
}

/// Whether centered Gaussians keep the norm bounded away from zero and infinity.
pub fn classify_admissibility(p: f64, q: f64, s: f64) -> Result<AdmissibilityReport> {
    if !(p > 0.0 && p < 1.0) || !(q < 0.0) || !q.is_finite() {
        return Err(arg(format!("classification needs q < 0 < p < 1, got p={p}, q={q}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(arg(format!("time must be positive, got s={s}")));
    }
    let p_s = p_endpoint(s);
    let q_s = q_endpoint(s);
    let e2 = (-2.0 * s).exp();
    let inf_pos = q_s <= q && p <= p_s;
    let sup_fin = q <= q_s && p >= p_s;
    let c1 = p_s / p;
    let phi1_root = (c1 > 1.0).then(|| c1 / (c1 - 1.0));
    let c2 = (p_s + q * e2) / p;
    let phi2_root = (c2 < 0.0).then(|| c2 / (c2 - 1.0));
    let tol = 1e-12;
    let e = HcExponents { p, q, s, beta: 1.0 };
    let regime = if (p - p_s).abs() <= tol && (q - q_s).abs() <= tol {
        Regime::Endpoint
    } else if !e.beyond_nelson() {
        Regime::Nelson
    } else if p <= p_s {
        Regime::BeyondNelsonReverse
    } else {
        Regime::BeyondNelsonForward
    };
    Ok(AdmissibilityReport { inf_over_beta_positive: inf_pos, sup_over_beta_finite: sup_fin, phi1_root, phi2_root, regime })
}

/// Norm ratio attained by the one-sided exponential witness at the endpoint exponents.
pub fn mahler_witness_norm(dim: usize, s: f64) -> Result<f64> {
    if dim == 0 {
        return Err(arg("dimension must be positive"));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(arg(format!("time must be positive, got s={s}")));
    }
    let n = dim as f64;
    let p = p_endpoint(s);
    let q = q_endpoint(s);
    let per_axis = -1.0 / p - (2.0 * PI).ln() / q + 0.5 * p.ln() + s * (2.0 - 1.0 / q) + ln_gamma(1.0 - q) / q;
    Ok((n * per_axis).exp())
}

/// Small-time limit of `mahler_witness_norm^{-p_s}`.
pub fn mahler_witness_limit(dim: usize) -> f64 {
    (E / (2.0 * PI)).powi(dim as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_time_zero() {
        let g = GaussianFunction::new(0.3, vec![0.2, -0.1], 0.5).unwrap();
        let h = ou_closed_form(0.0, &g).unwrap();
        assert!((h.quad - g.quad).abs() < 1e-15);
        assert!((h.log_scale - g.log_scale).abs() < 1e-15);
    }

    #[test]
    fn constants_are_fixed() {
        let g = GaussianFunction::new(0.0, vec![0.0], 2.0f64.ln()).unwrap();
        let h = ou_closed_form(0.7, &g).unwrap();
        assert!((h.eval(&[1.3]) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn divergent_image_is_rejected() {
        let g = GaussianFunction::centered(-2.0, 1).unwrap();
        assert!(ou_closed_form(1.0, &g).is_err());
    }

    #[test]
    fn endpoint_norm_is_one() {
        for s in [0.1, 0.5, 1.0] {
            for beta in [0.5, 1.0, 2.0, 10.0] {
                let e = HcExponents::new(p_endpoint(s), q_endpoint(s), s, beta).unwrap();
                let v = hc_gaussian_norm(&e, 3).unwrap();
                assert!((v.value - 1.0).abs() < 1e-12, "s={s} beta={beta} v={}", v.value);
            }
        }
    }

    #[test]
    fn sentinels() {
        let e = HcExponents::new(0.1, -1.0, 1.0, 100.0).unwrap();
        let v = hc_gaussian_norm(&e, 1).unwrap();
        assert_eq!(v.status, NormStatus::FirstConditionFailed);
        assert!(v.value.is_infinite());
        let e = HcExponents::new(0.9, -3.0, 0.5, 1e-3).unwrap();
        let v = hc_gaussian_norm(&e, 1).unwrap();
        assert_eq!(v.status, NormStatus::SecondConditionFailed);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn nelson_closed_forms_agree() {
        let e = HcExponents::nelson(0.6, 0.4, 1.7).unwrap();
        let a = hc_gaussian_norm(&e, 2).unwrap().value;
        let b = nelson_gaussian_norm(&e, 2).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translation_with_zero_shift() {
        let e = HcExponents::new(0.7, -0.9, 0.5, 1.4).unwrap();
        let a = translated_gaussian_norm(&e, &[0.0, 0.0]).unwrap().value;
        let b = hc_gaussian_norm(&e, 2).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_limit() {
        let p = p_endpoint(1e-3);
        let v = mahler_witness_norm(1, 1e-3).unwrap().powf(-p);
        assert!((v / mahler_witness_limit(1) - 1.0).abs() < 0.01);
    }

    #[test]
    fn classification_of_endpoint() {
        let s = 0.5;
        let r = classify_admissibility(p_endpoint(s), q_endpoint(s), s).unwrap();
        assert!(r.inf_over_beta_positive && r.sup_over_beta_finite);
        assert_eq!(r.regime, Regime::Endpoint);
        assert!(r.phi1_root.is_none() && r.phi2_root.is_none());
        assert!(classify_admissibility(1.2, -1.0, s).is_err());
    }
}
