//! Functions sampled on the periodic box `[−L, L)ᴺ`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::ProfileSpec;

/// Largest supported number of grid nodes.
pub const MAX_NODES: usize = 1 << 24;

/// Isotropic grid: `M` nodes per axis at `−L + k·h`, `h = 2L/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl GridGeometry {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        let g = Self { dim, half_width, points_per_axis };
        g.check()?;
        Ok(g)
    }

    /// `L = 16` with `M = 256` in one and two dimensions, `M = 64` in three.
    pub fn default_for(dim: usize) -> Result<Self> {
        let m = if dim == 3 { 64 } else { 256 };
        Self::new(dim, 16.0, m)
    }

    pub fn check(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(invalid(format!("grid dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(invalid("half_width must be finite and > 0"));
        }
        let m = self.points_per_axis;
        if m < 2 || !m.is_power_of_two() {
            return Err(invalid(format!("points_per_axis must be a power of two ≥ 2, got {m}")));
        }
        match m.checked_pow(self.dim as u32) {
            Some(n) if n <= MAX_NODES => Ok(()),
            _ => Err(Error::Resource(format!(
                "{m}^{} nodes exceeds the cap of {MAX_NODES}",
                self.dim
            ))),
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// `h^N`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    /// Coordinates of the node at flat (row-major) index `i`.
    pub fn point(&self, mut i: usize, out: &mut [f64]) {
        let m = self.points_per_axis;
        for axis in (0..self.dim).rev() {
            out[axis] = self.node(i % m);
            i /= m;
        }
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }
}

/// Sum with pairwise reduction; the result depends only on the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 128;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn pairwise_sum_map(xs: &[f64], f: &impl Fn(f64) -> f64) -> f64 {
    const BLOCK: usize = 128;
    if xs.len() <= BLOCK {
        return xs.iter().map(|&x| f(x)).sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_map(&xs[..mid], f) + pairwise_sum_map(&xs[mid..], f)
}

/// A Lebesgue norm value tagged with its exponent (`q = ∞` for the max norm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LebesgueNorm {
    pub q: f64,
    pub value: f64,
}

/// Real values on a [`GridGeometry`], row-major, always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl GridField {
    pub fn from_values(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        geometry.check()?;
        if values.len() != geometry.len() {
            return Err(invalid(format!(
                "expected {} values for the grid, got {}",
                geometry.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Self { geometry, values })
    }

    pub(crate) fn from_values_unchecked(geometry: GridGeometry, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), geometry.len());
        Self { geometry, values }
    }

    pub fn zeros(geometry: GridGeometry) -> Result<Self> {
        geometry.check()?;
        Ok(Self { values: vec![0.0; geometry.len()], geometry })
    }

    pub fn constant(geometry: GridGeometry, c: f64) -> Result<Self> {
        geometry.check()?;
        if !c.is_finite() {
            return Err(Error::NonFinite("constant field"));
        }
        Ok(Self { values: vec![c; geometry.len()], geometry })
    }

    /// Samples `prof` at every grid node.
    pub fn sample(prof: &ProfileSpec, geometry: GridGeometry) -> Result<Self> {
        geometry.check()?;
        prof.validate(geometry.dim)?;
        let mut values = vec![0.0; geometry.len()];
        if !prof.is_zero() {
            let mut x = [0.0; 3];
            for (i, v) in values.iter_mut().enumerate() {
                geometry.point(i, &mut x);
                *v = prof.evaluate(&x[..geometry.dim]);
            }
        }
        Self::from_values(geometry, values)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `(Σ|fᵢ|^q hᴺ)^{1/q}`, or `maxᵢ|fᵢ|` for `q = ∞`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        assert!(q >= 1.0, "lq_norm needs q ≥ 1, got {q}");
        let m = self.sup_norm();
        if q.is_infinite() || m == 0.0 {
            return m;
        }
        let vol = self.geometry.cell_volume();
        let s = if q == 1.0 {
            pairwise_sum_map(&self.values, &|v| v.abs())
        } else if q == 2.0 {
            pairwise_sum_map(&self.values, &|v| (v / m) * (v / m)) * m * m
        } else {
            // Scale by the max so large q does not overflow.
            return m * (pairwise_sum_map(&self.values, &|v| (v.abs() / m).powf(q)) * vol).powf(1.0 / q);
        };
        (s * vol).powf(1.0 / q)
    }

    pub fn norm(&self, q: f64) -> LebesgueNorm {
        LebesgueNorm { q, value: self.lq_norm(q) }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ f` by the rectangle rule (spectrally accurate for periodic data).
    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.geometry.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// `‖f‖_q^α`, with `α = 0` giving 1 even for the zero field.
    pub fn nonlocal_factor(&self, q: f64, alpha: f64) -> f64 {
        if alpha == 0.0 {
            1.0
        } else {
            self.lq_norm(q).powf(alpha)
        }
    }

    /// Pointwise `‖f‖_q^α |fᵢ|^p`. Overflow is reported as [`Error::NonFinite`].
    pub fn nonlinearity(&self, p: f64, q: f64, alpha: f64) -> Result<GridField> {
        let factor = self.nonlocal_factor(q, alpha);
        if !factor.is_finite() {
            return Err(Error::NonFinite("nonlocal factor"));
        }
        let values: Vec<f64> = if p == 2.0 {
            self.values.iter().map(|v| factor * v * v).collect()
        } else {
            self.values.iter().map(|v| factor * v.abs().powf(p)).collect()
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("nonlinearity"));
        }
        Ok(Self::from_values_unchecked(self.geometry, values))
    }

    pub fn scaled(&self, c: f64) -> Result<GridField> {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridField> {
        Self::from_values(self.geometry, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        self.require_same_geometry(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_values(self.geometry, values)
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn require_same_geometry(&self, other: &GridField) -> Result<()> {
        require_geometry(&self.geometry, &other.geometry)
    }

    /// Little-endian layout: `u64 dim`, `u64 M`, `f64 L`, then the values.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&(self.geometry.dim as u64).to_le_bytes())?;
        w.write_all(&(self.geometry.points_per_axis as u64).to_le_bytes())?;
        w.write_all(&self.geometry.half_width.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<GridField> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        let dim = u64::from_le_bytes(b) as usize;
        r.read_exact(&mut b)?;
        let m = u64::from_le_bytes(b) as usize;
        r.read_exact(&mut b)?;
        let geometry = GridGeometry::new(dim, f64::from_le_bytes(b), m)?;
        let mut values = Vec::with_capacity(geometry.len());
        for _ in 0..geometry.len() {
            r.read_exact(&mut b)?;
            values.push(f64::from_le_bytes(b));
        }
        Self::from_values(geometry, values)
    }

    /// CSV with one coordinate column per axis followed by `value`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let dim = self.geometry.dim;
        if dim > 2 {
            return Err(invalid("CSV export supports dimensions 1 and 2 only"));
        }
        let mut out = csv::Writer::from_writer(w);
        let header: &[&str] = if dim == 1 { &["x", "value"] } else { &["x", "y", "value"] };
        out.write_record(header)?;
        let mut x = [0.0; 3];
        for (i, v) in self.values.iter().enumerate() {
            self.geometry.point(i, &mut x);
            let mut row: Vec<String> = x[..dim].iter().map(|c| c.to_string()).collect();
            row.push(v.to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn require_geometry(expected: &GridGeometry, found: &GridGeometry) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::GeometryMismatch {
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        })
    }
}
