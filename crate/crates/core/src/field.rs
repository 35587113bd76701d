//! Grids, scalar fields and the discrete L² geometry.
//!
//! A [`Grid`] is node-centred: `nx × ny` nodes including the boundary ring,
//! spacing `dx = lx / (nx - 1)`. Field values are stored row-major with the
//! y index outer, so node `(i, j)` lives at `j * nx + i`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::dynamics::StepDiagnostics;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes per direction"));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidGrid("extents must be positive and finite"));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square grid with `n × n` nodes on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn dx(&self) -> f64 {
        self.lx / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / (self.ny - 1) as f64
    }

    /// Domain area `|D|`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Stride `s` such that coarse node `(i, j)` coincides with fine node
    /// `(s·i, s·j)`, when `self` is nested in `fine`.
    pub fn nesting_stride(&self, fine: &Grid) -> Result<usize> {
        if self.lx != fine.lx || self.ly != fine.ly {
            return Err(Error::NotNested("domain extents differ"));
        }
        let (fx, fy) = (fine.nx - 1, fine.ny - 1);
        let (cx, cy) = (self.nx - 1, self.ny - 1);
        if fx % cx != 0 || fy % cy != 0 {
            return Err(Error::NotNested("fine cell count not divisible by coarse"));
        }
        let (sx, sy) = (fx / cx, fy / cy);
        if sx != sy {
            return Err(Error::NotNested("refinement factor differs between x and y"));
        }
        Ok(sx)
    }

    /// Coarse grid with `factor` times the spacing of `self`.
    pub fn coarsened(&self, factor: usize) -> Result<Grid> {
        if factor == 0 || !(self.nx - 1).is_multiple_of(factor) || !(self.ny - 1).is_multiple_of(factor) {
            return Err(Error::NotNested("coarsening factor does not divide the cell count"));
        }
        Grid::new((self.nx - 1) / factor + 1, (self.ny - 1) / factor + 1, self.lx, self.ly)
    }
}

/// A real scalar sampled on every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` on every node, boundary included.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                values.push(f(grid.x(i), y));
            }
        }
        Self { grid, values }
    }

    /// Samples `f(x, y)` on interior nodes and pins the boundary ring to zero.
    pub fn dirichlet_from_fn(grid: Grid, f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Self::from_fn(grid, f);
        out.zero_boundary();
        out
    }

    pub fn grid(&self) -> &Grid {
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn zero_boundary(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        self.values[..nx].fill(0.0);
        self.values[(ny - 1) * nx..].fill(0.0);
        for j in 1..ny - 1 {
            self.values[j * nx] = 0.0;
            self.values[j * nx + nx - 1] = 0.0;
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        (0..nx).all(|i| self.get(i, 0) == 0.0 && self.get(i, ny - 1) == 0.0)
            && (0..ny).all(|j| self.get(0, j) == 0.0 && self.get(nx - 1, j) == 0.0)
    }

    pub fn ensure_dirichlet(&self) -> Result<()> {
        if self.is_dirichlet() {
            Ok(())
        } else {
            Err(Error::NotDirichlet)
        }
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite {
                i: k % self.grid.nx,
                j: k / self.grid.nx,
            }),
        }
    }

    pub fn ensure_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Field) {
        assert_eq!(self.grid, x.grid, "axpy on mismatched grids");
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, mut f: impl FnMut(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "zip_map on mismatched grids");
        Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Plain quadrature `ΣΣ f · dx · dy`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Domain average of the field.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `‖f‖²` without the finiteness check.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }
}

/// Discrete L² norm `sqrt(ΣΣ f² dx dy)`.
pub fn l2_norm(f: &Field) -> Result<f64> {
    f.ensure_finite()?;
    Ok(libm::sqrt(f.norm_sq()))
}

/// Discrete scalar product `ΣΣ f g dx dy`.
pub fn inner_product(f: &Field, g: &Field) -> Result<f64> {
    f.ensure_same_grid(g)?;
    let s: f64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum();
    Ok(s * f.grid.cell_area())
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Field> for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                self.zip_map(rhs, |a, b| a $op b)
            }
        }
        impl $tr<Field> for Field {
            type Output = Field;
            fn $method(mut self, rhs: Field) -> Field {
                assert_eq!(self.grid, rhs.grid, "arithmetic on mismatched grids");
                for (a, b) in self.values.iter_mut().zip(&rhs.values) {
                    *a -= b;
                }
                self
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl AddAssign<&Field> for Field {
    fn add_assign(&mut self, rhs: &Field) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Field> for Field {
    fn sub_assign(&mut self, rhs: &Field) {
        assert_eq!(self.grid, rhs.grid, "arithmetic on mismatched grids");
        for (a, b) in self.values.iter_mut().zip(&rhs.values) {
            *a -= b;
        }
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        rhs.scaled(self)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}

/// Time-ordered snapshots of one run plus per-step scalar diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    times: Vec<f64>,
    snapshots: Vec<Field>,
    diagnostics: Vec<StepDiagnostics>,
    /// Closure forcing in effect at each stored time, when the run had one.
    forcing: Vec<Field>,
}

impl Trajectory {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            times: Vec::new(),
            snapshots: Vec::new(),
            diagnostics: Vec::new(),
            forcing: Vec::new(),
        }
    }

    pub fn push_snapshot(&mut self, t: f64, q: Field) -> Result<()> {
        if q.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::Misaligned("snapshot times must increase strictly"));
            }
        }
        self.times.push(t);
        self.snapshots.push(q);
        Ok(())
    }

    pub fn push_forcing(&mut self, sigma: Field) {
        self.forcing.push(sigma);
    }

    pub fn push_diagnostics(&mut self, d: StepDiagnostics) {
        self.diagnostics.push(d);
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    /// Closure forcing aligned with [`Trajectory::times`]; empty when the
    /// run was unforced by a closure.
    pub fn closure_forcing(&self) -> &[Field] {
        &self.forcing
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&Field> {
        self.snapshots.last()
    }

    /// Pointwise mean of the snapshots after discarding the leading
    /// `spin_up_fraction` of them.
    pub fn time_mean(&self, spin_up_fraction: f64) -> Result<Field> {
        time_mean(&self.snapshots, spin_up_fraction)
    }
}

/// Index of the first sample kept after discarding a leading fraction.
pub fn spin_up_start(len: usize, spin_up_fraction: f64) -> usize {
    let skip = libm::floor(spin_up_fraction.clamp(0.0, 1.0) * len as f64) as usize;
    skip.min(len.saturating_sub(1))
}

/// Pointwise mean of a field sequence after discarding a leading fraction.
pub fn time_mean(fields: &[Field], spin_up_fraction: f64) -> Result<Field> {
    let first = fields.first().ok_or(Error::TooFewSamples { needed: 1, have: 0 })?;
    let kept = &fields[spin_up_start(fields.len(), spin_up_fraction)..];
    let mut acc = Field::zeros(first.grid);
    for f in kept {
        f.ensure_same_grid(&acc)?;
        acc += f;
    }
    Ok(acc.scaled(1.0 / kept.len() as f64))
}
