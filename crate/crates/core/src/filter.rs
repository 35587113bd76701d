//! Gaussian filter, fine-to-coarse restriction and seeded perturbations.
//!
//! The Gaussian kernel `G_δ` is applied in the sine basis: sine mode
//! `(k1, k2)` is multiplied by `exp(-δ²(κ1² + κ2²)/4)` with `κ1 = π k1 / lx`
//! and `κ2 = π k2 / ly`. This equals planar convolution of the odd
//! (Dirichlet) extension of the field, so filtered fields keep `q = 0` on the
//! boundary and the filter commutes with the discrete Laplacian and Poisson
//! inverse.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{l2_norm, Field, Grid};
use crate::rng::{member_rng, white_noise_dirichlet};
use crate::spectral::{SineCoeffs, SineTransform};

/// Filter width `δ ≥ 0`; `δ = 0` is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub delta: f64,
}

impl FilterSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "filter width must be finite and non-negative",
            });
        }
        Ok(Self { delta })
    }

    /// Transfer function value at continuum wavenumbers `(κ1, κ2)`.
    pub fn transfer(&self, kappa1: f64, kappa2: f64) -> f64 {
        libm::exp(-self.delta * self.delta * (kappa1 * kappa1 + kappa2 * kappa2) / 4.0)
    }
}

/// A [`FilterSpec`] bound to a grid with its transfer symbol precomputed.
#[derive(Debug, Clone)]
pub struct GaussianFilter {
    spec: FilterSpec,
    transform: SineTransform,
    symbol: SineCoeffs,
}

impl GaussianFilter {
    pub fn new(grid: Grid, spec: FilterSpec) -> Self {
        let transform = SineTransform::new(grid);
        let (n1, n2) = (grid.nx() - 2, grid.ny() - 2);
        let mut symbol = SineCoeffs::zeros(n1, n2);
        for k2 in 1..=n2 {
            let kappa2 = PI * k2 as f64 / grid.ly();
            for k1 in 1..=n1 {
                symbol.set(k1, k2, spec.transfer(PI * k1 as f64 / grid.lx(), kappa2));
            }
        }
        Self {
            spec,
            transform,
            symbol,
        }
    }

    pub fn spec(&self) -> FilterSpec {
        self.spec
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.transform.apply_diagonal(f, &self.symbol)
    }
}

/// One-shot Gaussian filter; prefer a cached [`GaussianFilter`] in loops.
pub fn gaussian_filter(f: &Field, spec: FilterSpec) -> Result<Field> {
    FilterSpec::new(spec.delta)?;
    GaussianFilter::new(*f.grid(), spec).apply(f)
}

/// Samples `f` at the nodes of `coarse` that coincide with fine nodes.
pub fn restrict(f: &Field, coarse: &Grid) -> Result<Field> {
    let fine = f.grid();
    let s = coarse.nesting_stride(fine)?;
    if s == 1 {
        return Ok(f.clone());
    }
    let mut out = Field::zeros(*coarse);
    for j in 0..coarse.ny() {
        for i in 0..coarse.nx() {
            out.set(i, j, f.get(s * i, s * j));
        }
    }
    Ok(out)
}

/// Adds seeded Dirichlet white noise scaled so that `‖noise‖ = amplitude ·
/// ‖f‖`.
pub fn perturb_field(f: &Field, amplitude: f64, seed: u64) -> Result<Field> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            reason: "perturbation amplitude must be finite and non-negative",
        });
    }
    let norm = l2_norm(f)?;
    if amplitude == 0.0 || norm == 0.0 {
        return Ok(f.clone());
    }
    let noise = white_noise_dirichlet(*f.grid(), &mut member_rng(seed, 0));
    let scale = amplitude * norm / l2_norm(&noise)?;
    let mut out = f.clone();
    out.axpy(scale, &noise);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::laplacian;
    use crate::rng::member_rng;

    fn mode(g: Grid, k1: f64, k2: f64) -> Field {
        let (lx, ly) = (g.lx(), g.ly());
        Field::dirichlet_from_fn(g, |x, y| libm::sin(k1 * PI * x / lx) * libm::sin(k2 * PI * y / ly))
    }

    fn multi_mode(g: Grid) -> Field {
        &(&mode(g, 1.0, 1.0) + &mode(g, 2.0, 3.0).scaled(0.5)) + &mode(g, 5.0, 2.0).scaled(0.25)
    }

    fn rel(a: &Field, b: &Field) -> f64 {
        l2_norm(&(a - b)).unwrap() / l2_norm(b).unwrap()
    }

    #[test]
    fn negative_delta_is_rejected() {
        assert!(FilterSpec::new(-0.1).is_err());
        let f = Field::zeros(Grid::unit_square(9).unwrap());
        assert!(gaussian_filter(&f, FilterSpec { delta: -1.0 }).is_err());
    }

    #[test]
    fn zero_width_is_identity() {
        let g = Grid::unit_square(33).unwrap();
        let f = white_noise_dirichlet(g, &mut member_rng(1, 0));
        let out = gaussian_filter(&f, FilterSpec::new(0.0).unwrap()).unwrap();
        assert!(rel(&out, &f) <= 1e-13);
    }

    #[test]
    fn single_mode_transfer() {
        let g = Grid::unit_square(65).unwrap();
        let f = mode(g, 1.0, 1.0);
        let out = gaussian_filter(&f, FilterSpec::new(0.1).unwrap()).unwrap();
        let expected = libm::exp(-0.01 * 2.0 * PI * PI / 4.0);
        assert!((expected - 0.95185).abs() < 1e-5);
        assert!(rel(&out, &f.scaled(expected)) <= 1e-6);
        assert!(l2_norm(&out).unwrap() <= l2_norm(&f).unwrap());
    }

    #[test]
    fn filtering_twice_differs_from_once() {
        let g = Grid::unit_square(65).unwrap();
        let filt = GaussianFilter::new(g, FilterSpec::new(4.0 * g.dx()).unwrap());
        let once = filt.apply(&multi_mode(g)).unwrap();
        let twice = filt.apply(&once).unwrap();
        assert!(l2_norm(&(&twice - &once)).unwrap() > 0.0);
    }

    #[test]
    fn filter_is_linear() {
        let g = Grid::new(41, 33, 1.0, 0.8).unwrap();
        let filt = GaussianFilter::new(g, FilterSpec::new(0.07).unwrap());
        let f = white_noise_dirichlet(g, &mut member_rng(2, 0));
        let h = white_noise_dirichlet(g, &mut member_rng(2, 1));
        let combo = &f.scaled(2.5) + &h.scaled(-0.75);
        let lhs = filt.apply(&combo).unwrap();
        let rhs = &filt.apply(&f).unwrap().scaled(2.5) + &filt.apply(&h).unwrap().scaled(-0.75);
        assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn filter_commutes_with_laplacian() {
        let g = Grid::unit_square(49).unwrap();
        let filt = GaussianFilter::new(g, FilterSpec::new(0.05).unwrap());
        let f = white_noise_dirichlet(g, &mut member_rng(8, 0));
        let a = filt.apply(&laplacian(&f)).unwrap();
        let b = laplacian(&filt.apply(&f).unwrap());
        assert!(l2_norm(&(&a - &b)).unwrap() <= 1e-10 * l2_norm(&laplacian(&f)).unwrap());
    }

    #[test]
    fn filter_error_is_second_order_in_delta() {
        let g = Grid::unit_square(129).unwrap();
        let f = multi_mode(g);
        let errs: alloc::vec::Vec<f64> = [0.04, 0.02, 0.01, 0.005]
            .iter()
            .map(|&d| l2_norm(&(&gaussian_filter(&f, FilterSpec::new(d).unwrap()).unwrap() - &f)).unwrap())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn restrict_samples_nested_nodes() {
        let fine = Grid::unit_square(33).unwrap();
        let coarse = fine.coarsened(4).unwrap();
        assert_eq!(restrict(&Field::zeros(fine), &coarse).unwrap(), Field::zeros(coarse));

        let m = restrict(&mode(fine, 1.0, 1.0), &coarse).unwrap();
        let exact = mode(coarse, 1.0, 1.0);
        assert!((&m - &exact).max_abs() <= 1e-14);

        let f = white_noise_dirichlet(fine, &mut member_rng(4, 0));
        let r = restrict(&f, &coarse).unwrap();
        let mut k = 0;
        for j in (0..33).step_by(4) {
            for i in (0..33).step_by(4) {
                assert_eq!(r.values()[k], f.values()[j * 33 + i]);
                k += 1;
            }
        }
        assert!(restrict(&f, &Grid::unit_square(7).unwrap()).is_err());
    }

    #[test]
    fn perturbation_contract() {
        let g = Grid::unit_square(33).unwrap();
        let f = multi_mode(g);
        assert_eq!(perturb_field(&f, 0.0, 3).unwrap(), f);
        let a = perturb_field(&f, 1e-4, 3).unwrap();
        let b = perturb_field(&f, 1e-4, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.is_dirichlet());
        let r = rel(&a, &f);
        assert!((r - 1e-4).abs() <= 1e-10, "{r}");
        assert_ne!(perturb_field(&f, 1e-4, 4).unwrap(), a);
    }
}
