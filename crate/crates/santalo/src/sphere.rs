//! Deterministic point sets and integration rules on the unit sphere.

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::ou::gauss_legendre;

/// Surface area of `S^{n-1}`.
pub fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * (0.5 * n * PI.ln() - ln_gamma(0.5 * n)).exp()
}

/// Volume of the Euclidean unit ball.
pub fn ball_volume(dim: usize) -> f64 {
    let n = dim as f64;
    (0.5 * n * PI.ln() - ln_gamma(0.5 * n + 1.0)).exp()
}

/// Nested low-discrepancy directions: every prefix is itself well spread.
pub fn direction_sequence(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => (0..count).map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => {
            let g = 0.5 * (5f64.sqrt() - 1.0);
            (0..count)
                .map(|k| {
                    let t = 2.0 * PI * (0.123_456_7 + k as f64 * g).fract();
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        3 => {
            let alpha = kronecker(2);
            (0..count)
                .map(|k| {
                    let u = (0.271_828 + (k as f64 + 1.0) * alpha[0]).fract();
                    let v = (0.314_159 + (k as f64 + 1.0) * alpha[1]).fract();
                    let z = 1.0 - 2.0 * u;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * PI * v;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let alpha = kronecker(dim);
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (0..count)
                .map(|k| {
                    let g: Vec<f64> = (0..dim)
                        .map(|j| {
                            let u = (0.5 + (k as f64 + 1.0) * alpha[j]).fract().clamp(1e-12, 1.0 - 1e-12);
                            normal.inverse_cdf(u)
                        })
                        .collect();
                    let r = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                    g.iter().map(|v| v / r).collect()
                })
                .collect()
        }
    }
}

fn kronecker(dim: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|j| (1.0 / g.powi(j as i32)).fract()).collect()
}

/// Integration rule on `S^{n-1}` with weights summing to the surface area.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// `resolution` angles on the circle; in 3D, `resolution/2` latitude nodes times `resolution` longitudes.
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        match dim {
            2 => {
                let n = resolution.max(8);
                let w = 2.0 * PI / n as f64;
                let points = (0..n)
                    .map(|k| {
                        let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                Ok(Self { points, weights: vec![w; n] })
            }
            3 => {
                let nphi = resolution.max(8);
                let nz = (resolution / 2).max(4);
                let (zs, wz) = gauss_legendre(nz);
                let mut points = Vec::with_capacity(nz * nphi);
                let mut weights = Vec::with_capacity(nz * nphi);
                for (z, w) in zs.iter().zip(&wz) {
                    let r = (1.0 - z * z).sqrt();
                    for k in 0..nphi {
                        let phi = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                        points.push(vec![r * phi.cos(), r * phi.sin(), *z]);
                        weights.push(w * 2.0 * PI / nphi as f64);
                    }
                }
                Ok(Self { points, weights })
            }
            _ => Err(Error::Dim(format!("sphere rules are available in dimensions 2 and 3, got {dim}"))),
        }
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}
