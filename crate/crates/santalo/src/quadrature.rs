//! Quadrature rules against the standard Gaussian measure.
//!
//! Gauss–Hermite rules are tensorized up to dimension four. Higher dimensions
//! use a shifted Kronecker lattice pushed through the normal quantile, which
//! reports a standard error across independent shifts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{arg, Result};

pub const MAX_NODES_1D: usize = 256;
pub const MAX_TENSOR_DIM: usize = 4;
/// Cap on the total node count of a tensor rule.
pub const MAX_TENSOR_NODES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub enum RuleKind {
    GaussHermite { nodes_per_axis: usize },
    QuasiMonteCarlo { points_per_shift: usize, shifts: usize, seed: u64 },
}

/// Nodes and weights approximating integrals against the standard Gaussian.
///
/// Nodes are stored row-major: node `k` occupies `nodes[k*dim..(k+1)*dim]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    /// Tensor Gauss–Hermite rule with `m` nodes per axis.
    pub fn gauss_hermite(m: usize, dim: usize) -> Result<Self> {
        if m == 0 || m > MAX_NODES_1D {
            return Err(arg(format!("node count {m} outside 1..={MAX_NODES_1D}")));
        }
        if dim == 0 || dim > MAX_TENSOR_DIM {
            return Err(arg(format!(
                "tensor rules support dimension 1..={MAX_TENSOR_DIM}, got {dim}; use quasi_monte_carlo"
            )));
        }
        let total = m
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_TENSOR_NODES)
            .ok_or_else(|| arg(format!("{m}^{dim} nodes exceeds the tensor cap")))?;
        let (x1, w1) = hermite_1d(m);
        let mut nodes = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for &i in &idx {
                nodes.push(x1[i]);
                w *= w1[i];
            }
            weights.push(w);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self { dim, nodes, weights, kind: RuleKind::GaussHermite { nodes_per_axis: m } })
    }

    /// Randomly shifted Kronecker lattice mapped through the normal quantile.
    pub fn quasi_monte_carlo(points_per_shift: usize, shifts: usize, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(arg("dimension must be positive"));
        }
        if points_per_shift == 0 || shifts < 2 {
            return Err(arg("need at least one point per shift and two shifts"));
        }
        let alpha = kronecker_generator(dim);
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = points_per_shift * shifts;
        let mut nodes = Vec::with_capacity(total * dim);
        for _ in 0..shifts {
            let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
            for k in 0..points_per_shift {
                for j in 0..dim {
                    let u = (shift[j] + (k as f64 + 1.0) * alpha[j]).fract();
                    let u = u.clamp(1e-15, 1.0 - 1e-15);
                    nodes.push(normal.inverse_cdf(u));
                }
            }
        }
        let weights = vec![1.0 / total as f64; total];
        Ok(Self { dim, nodes, weights, kind: RuleKind::QuasiMonteCarlo { points_per_shift, shifts, seed } })
    }

    /// Gauss–Hermite when the tensor rule is affordable, lattice rule otherwise.
    pub fn for_dimension(m: usize, dim: usize) -> Result<Self> {
        if dim <= MAX_TENSOR_DIM && m.checked_pow(dim as u32).is_some_and(|t| t <= MAX_TENSOR_NODES) {
            Self::gauss_hermite(m, dim)
        } else {
            Self::quasi_monte_carlo(4096, 16, dim, 0x5a17_0001)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    /// Largest absolute node coordinate.
    pub fn radius(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    /// Weighted sum of `f` over the nodes.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Integral together with a standard error; zero for deterministic rules.
    pub fn integrate_with_error<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> (f64, f64) {
        match self.kind {
            RuleKind::GaussHermite { .. } => (self.integrate(f), 0.0),
            RuleKind::QuasiMonteCarlo { points_per_shift, shifts, .. } => {
                let means: Vec<f64> = (0..shifts)
                    .map(|s| {
                        let lo = s * points_per_shift;
                        (lo..lo + points_per_shift).map(|k| f(self.node(k))).sum::<f64>() / points_per_shift as f64
                    })
                    .collect();
                let mean = means.iter().sum::<f64>() / shifts as f64;
                let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (shifts - 1) as f64;
                (mean, (var / shifts as f64).sqrt())
            }
        }
    }
}

/// Probabilists' Gauss–Hermite nodes and normalized weights, ascending.
pub fn hermite_1d(m: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub–Welsch eigenvalues seed a Newton polish on the orthonormal
    // Hermite recurrence for weight e^{-x^2}.
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let n = m;
    let nf = n as f64;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut seeds: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    seeds.sort_by(f64::total_cmp);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for (i, &seed) in seeds.iter().enumerate().take(n.div_ceil(2)) {
        let mut z = -seed;
        let mut pp = 1.0;
        for _ in 0..50 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        if n % 2 == 1 && i == n / 2 {
            pairs.push((0.0, w));
        } else {
            pairs.push((z, w));
            pairs.push((-z, w));
        }
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> =
        pairs.into_iter().map(|(z, wt)| (z * std::f64::consts::SQRT_2, wt / sqrt_pi)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Renormalize the mass lost to rounding; symmetric pairs stay symmetric.
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(z, wt)| (z, wt / total)).unzip()
}

fn kronecker_generator(dim: usize) -> Vec<f64> {
    // Generalized golden ratio: the positive root of x^{d+1} = x + 1.
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|j| (1.0 / g.powi(j as i32)).fract()).collect()
}
