//! Cell-centred radial grids and the functions sampled on them.
//!
//! Nodes sit at `r_j = (j + 1/2) h`, `h = R / M`, so the origin is never a
//! node and weights such as `|x|^α` with `α < 0` stay finite. Integrals over
//! `ℝ^N` of radial functions use the midpoint rule in `r` with the Jacobian
//! `ω_{N-1} r^{N-1}`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{LabError, Result};

/// Minimum number of cells accepted by [`RadialGrid::new`].
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    dim: f64,
    radius: f64,
    cells: usize,
}

impl RadialGrid {
    pub fn new(dim: f64, radius: f64, cells: usize) -> Result<Self> {
        if !(dim >= 1.0) || !dim.is_finite() {
            return Err(LabError::Domain(format!("grid dimension {dim} must be >= 1")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(LabError::Domain(format!("grid radius {radius} must be positive")));
        }
        if cells < MIN_CELLS {
            return Err(LabError::Domain(format!("grid needs at least {MIN_CELLS} cells, got {cells}")));
        }
        Ok(RadialGrid { dim, radius, cells })
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.cells).map(move |j| (j as f64 + 0.5) * h)
    }

    /// Surface measure `ω_{N-1} = 2 π^{N/2} / Γ(N/2)` of the unit sphere.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Quadrature weight of node `j` for integrals over `ℝ^N`.
    pub fn volume_weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        self.sphere_area() * self.node(j).powf(self.dim - 1.0) * h
    }

    /// Same grid with `M` scaled by `factor` (halves `h` for `factor = 2`).
    pub fn refined(&self, factor: usize) -> Self {
        RadialGrid { cells: self.cells * factor, ..*self }
    }

    /// Grid covering `factor · R` at the same spacing.
    pub fn extended(&self, factor: usize) -> Self {
        RadialGrid { radius: self.radius * factor as f64, cells: self.cells * factor, ..*self }
    }
}

pub fn sphere_area(dim: f64) -> f64 {
    2.0 * PI.powf(dim / 2.0) / gamma(dim / 2.0)
}

/// A radial function sampled at the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
    /// Set when a value exceeded the cap of [`weighted_power`].
    overflowed: bool,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(LabError::Domain(format!(
                "field has {} values for a grid of {} cells",
                values.len(),
                grid.cells()
            )));
        }
        Ok(RadialField { grid, values, overflowed: false })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        RadialField { grid, values: vec![0.0; grid.cells()], overflowed: false }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: RadialGrid, f: F) -> Self {
        let values = grid.nodes().map(f).collect();
        RadialField { grid, values, overflowed: false }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn overflowed(&self) -> bool {
        self.overflowed
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialField {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            overflowed: self.overflowed,
        }
    }

    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let values = self.grid.nodes().zip(&self.values).map(|(r, &v)| f(r, v)).collect();
        RadialField { grid: self.grid, values, overflowed: self.overflowed }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// `∫_{ℝ^N} u dx` by the midpoint rule.
    pub fn integral(&self) -> f64 {
        (0..self.values.len()).map(|j| self.grid.volume_weight(j) * self.values[j]).sum()
    }

    /// Linear interpolation in `r`; constant extrapolation towards the
    /// origin and zero beyond `R`.
    pub fn interpolate(&self, r: f64) -> f64 {
        let h = self.grid.spacing();
        let x = r / h - 0.5;
        if x <= 0.0 {
            return self.values[0];
        }
        let j = x.floor() as usize;
        let last = self.values.len() - 1;
        if j >= last {
            // between the last node and the boundary, decay linearly to 0 at R
            if r >= self.grid.radius() {
                return 0.0;
            }
            let frac = (r - self.grid.node(last)) / (0.5 * h);
            return self.values[last] * (1.0 - frac);
        }
        let frac = x - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    /// Two-column text: a header line `# radial-field N=.. R=.. M=..` followed
    /// by one `r value` pair per node. Floats use the shortest representation
    /// that round-trips.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# radial-field N={} R={} M={}",
            self.grid.dim(),
            self.grid.radius(),
            self.grid.cells()
        );
        for (r, v) in self.grid.nodes().zip(&self.values) {
            let _ = writeln!(out, "{r} {v}");
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| LabError::Parse("empty field file".into()))??;
        let mut dim = None;
        let mut radius = None;
        let mut cells = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                let bad = |_| LabError::Parse(format!("bad header value {tok}"));
                match k {
                    "N" => dim = Some(v.parse::<f64>().map_err(bad)?),
                    "R" => radius = Some(v.parse::<f64>().map_err(bad)?),
                    "M" => cells = Some(v.parse::<usize>().map_err(|_| LabError::Parse(format!("bad header value {tok}")))?),
                    _ => {}
                }
            }
        }
        let (Some(dim), Some(radius), Some(cells)) = (dim, radius, cells) else {
            return Err(LabError::Parse(format!("header must carry N, R and M: {header}")));
        };
        let grid = RadialGrid::new(dim, radius, cells)?;
        let mut values = Vec::with_capacity(cells);
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let _r = cols.next();
            let v = cols
                .next()
                .ok_or_else(|| LabError::Parse(format!("expected two columns: {line}")))?;
            values.push(v.parse::<f64>().map_err(|_| LabError::Parse(format!("bad value {v}")))?);
        }
        RadialField::new(grid, values)
    }
}

/// `ν(x) = (1 + |x|)^{α/(p-1)}` with `α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuWeight {
    alpha: f64,
    p: f64,
}

impl NuWeight {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(LabError::Domain(format!("nu weight needs alpha > 0, got {alpha}")));
        }
        if !(p > 1.0) {
            return Err(LabError::Domain(format!("nu weight needs p > 1, got {p}")));
        }
        Ok(NuWeight { alpha, p })
    }

    pub fn exponent(&self) -> f64 {
        self.alpha / (self.p - 1.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        (1.0 + r).powf(self.exponent())
    }
}

/// `L^q` norm over `ℝ^N`; `q = f64::INFINITY` gives the max norm.
pub fn lq_norm(field: &RadialField, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(LabError::Domain(format!("L^q norm needs q >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(field.sup_norm());
    }
    let grid = field.grid();
    let h = grid.spacing();
    let nm1 = grid.dim() - 1.0;
    // factor out the max to avoid overflow of |u|^q
    let scale = field.sup_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = grid
        .nodes()
        .zip(field.values())
        .map(|(r, v)| (v.abs() / scale).powf(q) * r.powf(nm1))
        .sum();
    Ok(scale * (grid.sphere_area() * sum * h).powf(1.0 / q))
}

/// `‖ν u‖_{L^∞}`.
pub fn nu_norm(field: &RadialField, weight: &NuWeight) -> f64 {
    field
        .grid()
        .nodes()
        .zip(field.values())
        .fold(0.0_f64, |acc, (r, v)| acc.max(weight.eval(r) * v.abs()))
}

/// Pointwise `r^α |u|^p`. Values above `cap` are clamped to `cap` and the
/// result is flagged as overflowed.
pub fn weighted_power(field: &RadialField, alpha: f64, p: f64, cap: f64) -> RadialField {
    let mut overflowed = field.overflowed;
    let values = field
        .grid()
        .nodes()
        .zip(field.values())
        .map(|(r, v)| {
            let out = r.powf(alpha) * v.abs().powf(p);
            if !(out <= cap) {
                overflowed = true;
                cap
            } else {
                out
            }
        })
        .collect();
    RadialField { grid: *field.grid(), values, overflowed }
}
