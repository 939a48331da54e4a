use std::io::{Read, Write};
use std::path::Path;

use crate::error::{arg, Error, Result};

/// Values sampled on a uniform tensor grid over a box, stored row-major
/// (last axis fastest). `+inf` entries mark points outside an effective domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    shape: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(shape: Vec<usize>, lo: Vec<f64>, hi: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() != lo.len() || shape.len() != hi.len() {
            return Err(arg("shape and box bounds must have the same positive length"));
        }
        if shape.iter().any(|&m| m < 2) {
            return Err(arg("each axis needs at least two nodes"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(arg("box bounds must be finite with lo < hi"));
        }
        let len = shape.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).ok_or_else(|| arg("grid too large"))?;
        if values.len() != len {
            return Err(arg(format!("expected {len} values, got {}", values.len())));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(arg("grid values must not be NaN"));
        }
        Ok(Self { shape, lo, hi, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(shape: Vec<usize>, lo: Vec<f64>, hi: Vec<f64>, f: F) -> Result<Self> {
        let probe = Self::new(shape.clone(), lo.clone(), hi.clone(), vec![0.0; shape.iter().product()])?;
        let values = (0..probe.len()).map(|k| f(&probe.point(k))).collect();
        Self::new(shape, lo, hi, values)
    }

    /// Cubic grid `[-half, half]^dim` with `m` nodes per axis.
    pub fn cube<F: Fn(&[f64]) -> f64>(dim: usize, m: usize, half: f64, f: F) -> Result<Self> {
        Self::from_fn(vec![m; dim], vec![-half; dim], vec![half; dim], f)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.shape[axis] - 1) as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + i as f64 * self.spacing(axis)
    }

    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis]).map(|i| self.coord(axis, i)).collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for k in (0..self.dim().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.shape[k + 1];
        }
        s
    }

    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = k % self.shape[a];
            k /= self.shape[a];
        }
        idx
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.multi_index(k).iter().enumerate().map(|(a, &i)| self.coord(a, i)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.shape.clone(), self.lo.clone(), self.hi.clone(), values)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn on_boundary(&self, k: usize) -> bool {
        self.multi_index(k).iter().zip(&self.shape).any(|(&i, &m)| i == 0 || i + 1 == m)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a - 1e-12 && *v <= *b + 1e-12)
    }

    /// Trapezoid-rule integral of `g(value)` over the box.
    pub fn integrate_with<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let mut total = 0.0;
        for k in 0..self.len() {
            let w: f64 = self
                .multi_index(k)
                .iter()
                .zip(&self.shape)
                .map(|(&i, &m)| if i == 0 || i + 1 == m { 0.5 } else { 1.0 })
                .product();
            total += w * g(self.values[k]);
        }
        total * self.cell_volume()
    }

    /// Fraction of `int g` carried by the outermost layer of nodes.
    pub fn boundary_fraction<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let (mut edge, mut all) = (0.0, 0.0);
        for k in 0..self.len() {
            let v = g(self.values[k]).abs();
            all += v;
            if self.on_boundary(k) {
                edge += v;
            }
        }
        if all == 0.0 {
            0.0
        } else {
            edge / all
        }
    }

    fn locate(&self, axis: usize, x: f64) -> (usize, f64) {
        let h = self.spacing(axis);
        let t = (x - self.lo[axis]) / h;
        let i = (t.floor().max(0.0) as usize).min(self.shape[axis] - 2);
        (i, t - i as f64)
    }

    /// Multilinear interpolation; coordinates are clamped to the box.
    pub fn interpolate_linear(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let strides = self.strides();
        let mut base = 0;
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let xc = x[a].clamp(self.lo[a], self.hi[a]);
            let (i, t) = self.locate(a, xc);
            base += i * strides[a];
            frac[a] = t;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut k = base;
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    k += strides[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[k];
            }
        }
        acc
    }

    /// Tensor three-point Lagrange interpolation; exact for quadratics and
    /// extrapolates from the outermost three nodes outside the box.
    pub fn interpolate_quadratic(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let strides = self.strides();
        let mut base = 0;
        let mut weights = vec![[0.0; 3]; n];
        for a in 0..n {
            let m = self.shape[a];
            let h = self.spacing(a);
            let t = (x[a] - self.lo[a]) / h;
            if m < 3 {
                let (i, f) = self.locate(a, x[a]);
                base += i * strides[a];
                weights[a] = [1.0 - f, f, 0.0];
                continue;
            }
            let c = (t.round() as i64).clamp(1, m as i64 - 2) as usize;
            let u = t - c as f64;
            base += (c - 1) * strides[a];
            weights[a] = [0.5 * u * (u - 1.0), 1.0 - u * u, 0.5 * u * (u + 1.0)];
        }
        let mut acc = 0.0;
        let total = 3usize.pow(n as u32);
        for combo in 0..total {
            let mut rem = combo;
            let mut w = 1.0;
            let mut k = base;
            for a in 0..n {
                let j = rem % 3;
                rem /= 3;
                w *= weights[a][j];
                k += j * strides[a];
            }
            if w != 0.0 {
                acc += w * self.values[k];
            }
        }
        acc
    }

    /// Little-endian binary: dim, shape, lo, hi, then the values row-major.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * (1 + 3 * self.dim() + self.len()));
        out.extend_from_slice(&(self.dim() as u64).to_le_bytes());
        for &m in &self.shape {
            out.extend_from_slice(&(m as u64).to_le_bytes());
        }
        for v in self.lo.iter().chain(&self.hi).chain(&self.values) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut words = bytes.chunks_exact(8);
        if !bytes.len().is_multiple_of(8) {
            return Err(arg("binary grid length is not a multiple of 8"));
        }
        let mut next_u64 = || -> Result<u64> {
            words
                .next()
                .map(|w| u64::from_le_bytes(w.try_into().expect("8-byte chunk")))
                .ok_or_else(|| arg("binary grid is truncated"))
        };
        let dim = next_u64()? as usize;
        if dim == 0 || dim > 16 {
            return Err(arg(format!("implausible grid dimension {dim}")));
        }
        let shape = (0..dim).map(|_| next_u64().map(|m| m as usize)).collect::<Result<Vec<_>>>()?;
        let len = shape.iter().try_fold(1usize, |a, &m| a.checked_mul(m)).ok_or_else(|| arg("grid too large"))?;
        let expected = 8 * (1 + 3 * dim + len);
        if bytes.len() != expected {
            return Err(arg(format!("binary grid has {} bytes, expected {expected}", bytes.len())));
        }
        let floats: Vec<f64> = bytes[8 * (1 + dim)..]
            .chunks_exact(8)
            .map(|w| f64::from_le_bytes(w.try_into().expect("8-byte chunk")))
            .collect();
        let lo = floats[..dim].to_vec();
        let hi = floats[dim..2 * dim].to_vec();
        let values = floats[2 * dim..].to_vec();
        Self::new(shape, lo, hi, values)
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    /// CSV with columns `x0..x{n-1},value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dim()).map(|a| format!("x{a}")).chain(["value".to_string()]).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for k in 0..self.len() {
            let row: Vec<String> =
                self.point(k).iter().chain([self.values[k]].iter()).map(|v| format_float(*v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Shortest round-trip representation; infinities as `inf`/`-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or_else(|| Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Arg(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(e)
    })
}
