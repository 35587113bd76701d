//! Finite-difference operators and the Dirichlet Poisson solver.
//!
//! The grid constructor already rejects fewer than three nodes per
//! direction, so the stencils below always have an interior to act on.

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::spectral::{SineCoeffs, SineTransform};

/// Five-point Laplacian on interior nodes; the boundary ring of the result
/// is zero.
pub fn laplacian(f: &Field) -> Field {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (cx, cy) = (1.0 / (g.dx() * g.dx()), 1.0 / (g.dy() * g.dy()));
    let v = f.values();
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for j in 1..ny - 1 {
        let row = j * nx;
        for i in 1..nx - 1 {
            let k = row + i;
            o[k] = cx * (v[k + 1] - 2.0 * v[k] + v[k - 1]) + cy * (v[k + nx] - 2.0 * v[k] + v[k - nx]);
        }
    }
    out
}

/// `(∂f/∂x, ∂f/∂y)`: centred differences inside, first-order one-sided
/// differences on the edges.
pub fn gradient(f: &Field) -> (Field, Field) {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());
    let mut fx = Field::zeros(g);
    let mut fy = Field::zeros(g);
    for j in 0..ny {
        for i in 0..nx {
            let ddx = if i == 0 {
                (f.get(1, j) - f.get(0, j)) / dx
            } else if i == nx - 1 {
                (f.get(i, j) - f.get(i - 1, j)) / dx
            } else {
                (f.get(i + 1, j) - f.get(i - 1, j)) / (2.0 * dx)
            };
            let ddy = if j == 0 {
                (f.get(i, 1) - f.get(i, 0)) / dy
            } else if j == ny - 1 {
                (f.get(i, j) - f.get(i, j - 1)) / dy
            } else {
                (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * dy)
            };
            fx.set(i, j, ddx);
            fy.set(i, j, ddy);
        }
    }
    (fx, fy)
}

/// Centred `∂f/∂x` on interior nodes, zero on the boundary ring.
pub fn ddx_interior(f: &Field) -> Field {
    let g = *f.grid();
    let nx = g.nx();
    let c = 0.5 / g.dx();
    let v = f.values();
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for j in 1..g.ny() - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            o[k] = c * (v[k + 1] - v[k - 1]);
        }
    }
    out
}

/// Largest flow speed `|(-ψ_y, ψ_x)|` over interior nodes.
pub fn max_speed(psi: &Field) -> f64 {
    let g = *psi.grid();
    let nx = g.nx();
    let (cx, cy) = (0.5 / g.dx(), 0.5 / g.dy());
    let v = psi.values();
    let mut m: f64 = 0.0;
    for j in 1..g.ny() - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let u = cy * (v[k + nx] - v[k - nx]);
            let w = cx * (v[k + 1] - v[k - 1]);
            m = m.max(u * u + w * w);
        }
    }
    libm::sqrt(m)
}

/// Arakawa's energy- and enstrophy-conserving Jacobian `J(a, b) ≈ a_x b_y
/// - a_y b_x`, the mean of the `++`, `+×` and `×+` forms.
///
/// Written as `J++(a,b) + J+×(a,b) − J+×(b,a)`, which makes `J(a, b) =
/// −J(b, a)` and `J(a, a) = 0` hold bit for bit.
pub fn arakawa_jacobian(a: &Field, b: &Field) -> Result<Field> {
    a.ensure_same_grid(b)?;
    let g = *a.grid();
    let nx = g.nx();
    let scale = 1.0 / (12.0 * g.dx() * g.dy());
    let (av, bv) = (a.values(), b.values());
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for j in 1..g.ny() - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let pp = (av[k + 1] - av[k - 1]) * (bv[k + nx] - bv[k - nx])
                - (av[k + nx] - av[k - nx]) * (bv[k + 1] - bv[k - 1]);
            o[k] = scale * (pp + (plus_cross(av, bv, k, nx) - plus_cross(bv, av, k, nx)));
        }
    }
    Ok(out)
}

#[inline(always)]
fn plus_cross(a: &[f64], b: &[f64], k: usize, nx: usize) -> f64 {
    let (e, w, n, s) = (k + 1, k - 1, k + nx, k - nx);
    let (ne, nw, se, sw) = (n + 1, n - 1, s + 1, s - 1);
    (a[e] * (b[ne] - b[se]) - a[w] * (b[nw] - b[sw])) - (a[n] * (b[ne] - b[nw]) - a[s] * (b[se] - b[sw]))
}

/// Solves `Δψ = q` with `ψ = 0` on the boundary by exact diagonalisation of
/// the five-point Laplacian in the sine basis.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    transform: SineTransform,
    inverse_eigenvalues: SineCoeffs,
}

impl PoissonSolver {
    pub fn new(grid: Grid) -> Self {
        let (n1, n2) = (grid.nx() - 2, grid.ny() - 2);
        let mut inv = SineCoeffs::zeros(n1, n2);
        for k2 in 1..=n2 {
            for k1 in 1..=n1 {
                inv.set(k1, k2, 1.0 / discrete_eigenvalue(&grid, k1, k2));
            }
        }
        Self {
            transform: SineTransform::new(grid),
            inverse_eigenvalues: inv,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    pub fn transform(&self) -> &SineTransform {
        &self.transform
    }

    pub fn eigenvalue(&self, k1: usize, k2: usize) -> f64 {
        discrete_eigenvalue(self.grid(), k1, k2)
    }

    pub fn solve(&self, q: &Field) -> Result<Field> {
        if q.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        self.transform.apply_diagonal(q, &self.inverse_eigenvalues)
    }
}

/// Eigenvalue of the Dirichlet five-point Laplacian for sine mode
/// `(k1, k2)`; strictly negative for every interior mode.
pub fn discrete_eigenvalue(grid: &Grid, k1: usize, k2: usize) -> f64 {
    let sx = libm::sin(core::f64::consts::PI * k1 as f64 / (2.0 * (grid.nx() - 1) as f64));
    let sy = libm::sin(core::f64::consts::PI * k2 as f64 / (2.0 * (grid.ny() - 1) as f64));
    -4.0 * sx * sx / (grid.dx() * grid.dx()) - 4.0 * sy * sy / (grid.dy() * grid.dy())
}

/// One-shot Poisson solve; prefer a cached [`PoissonSolver`] in loops.
pub fn solve_poisson(q: &Field) -> Result<Field> {
    PoissonSolver::new(*q.grid()).solve(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{inner_product, l2_norm};
    use crate::rng::{member_rng, white_noise_dirichlet};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn mode(g: Grid, k1: f64, k2: f64) -> Field {
        let (lx, ly) = (g.lx(), g.ly());
        Field::dirichlet_from_fn(g, |x, y| libm::sin(k1 * PI * x / lx) * libm::sin(k2 * PI * y / ly))
    }

    fn rel_diff(a: &Field, b: &Field) -> f64 {
        l2_norm(&(a - b)).unwrap() / l2_norm(b).unwrap()
    }

    #[test]
    fn laplacian_of_zero_is_zero() {
        let g = Grid::unit_square(9).unwrap();
        assert_eq!(laplacian(&Field::zeros(g)), Field::zeros(g));
    }

    #[test]
    fn laplacian_of_sine_mode() {
        let g = Grid::new(129, 129, 1.0, 1.0).unwrap();
        let f = mode(g, 1.0, 1.0);
        let lap = laplacian(&f);
        let continuum = f.scaled(-PI * PI * 2.0);
        assert!(rel_diff(&lap, &continuum) <= 1e-3);

        let (dx, dy) = (g.dx(), g.dy());
        let sx = libm::sin(PI * dx / 2.0);
        let sy = libm::sin(PI * dy / 2.0);
        let lam = -(4.0 / (dx * dx)) * sx * sx - (4.0 / (dy * dy)) * sy * sy;
        assert!(rel_diff(&lap, &f.scaled(lam)) <= 1e-12);
        assert!((lam - discrete_eigenvalue(&g, 1, 1)).abs() <= 1e-12 * lam.abs());
    }

    #[test]
    fn eigenvalues_are_negative() {
        let g = Grid::new(17, 11, 2.0, 0.5).unwrap();
        for k2 in 1..=9 {
            for k1 in 1..=15 {
                assert!(discrete_eigenvalue(&g, k1, k2) < 0.0);
            }
        }
    }

    #[test]
    fn gradient_of_zero_and_sine() {
        let g = Grid::unit_square(129).unwrap();
        let (zx, zy) = gradient(&Field::zeros(g));
        assert_eq!(zx.max_abs() + zy.max_abs(), 0.0);
        let f = Field::from_fn(g, |x, y| libm::sin(PI * x) * libm::sin(PI * y));
        let (fx, _) = gradient(&f);
        let exact = Field::from_fn(g, |x, y| PI * libm::cos(PI * x) * libm::sin(PI * y));
        assert!((&fx - &exact).max_abs() <= 5e-3);
    }

    #[test]
    fn gradient_matches_direct_stencil() {
        let g = Grid::new(13, 9, 1.0, 0.7).unwrap();
        let f = white_noise_dirichlet(g, &mut member_rng(2, 0));
        let (fx, fy) = gradient(&f);
        let (dx, dy) = (g.dx(), g.dy());
        for j in 0..9 {
            for i in 0..13 {
                let ex = match i {
                    0 => (f.get(1, j) - f.get(0, j)) / dx,
                    12 => (f.get(12, j) - f.get(11, j)) / dx,
                    _ => (f.get(i + 1, j) - f.get(i - 1, j)) / (2.0 * dx),
                };
                let ey = match j {
                    0 => (f.get(i, 1) - f.get(i, 0)) / dy,
                    8 => (f.get(i, 8) - f.get(i, 7)) / dy,
                    _ => (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * dy),
                };
                assert_eq!(fx.get(i, j), ex);
                assert_eq!(fy.get(i, j), ey);
            }
        }
    }

    #[test]
    fn jacobian_identities_exact() {
        let g = Grid::new(33, 25, 1.0, 0.8).unwrap();
        let f = white_noise_dirichlet(g, &mut member_rng(9, 0));
        let h = white_noise_dirichlet(g, &mut member_rng(9, 1));
        let jff = arakawa_jacobian(&f, &f).unwrap();
        assert_eq!(jff.max_abs(), 0.0);
        let jfh = arakawa_jacobian(&f, &h).unwrap();
        let jhf = arakawa_jacobian(&h, &f).unwrap();
        assert_eq!(jfh, -&jhf);
    }

    #[test]
    fn jacobian_of_parallel_modes_vanishes() {
        let g = Grid::unit_square(33).unwrap();
        let q = mode(g, 2.0, 3.0);
        let psi = q.scaled(-0.01);
        assert!(arakawa_jacobian(&psi, &q).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn jacobian_grid_mismatch() {
        let a = Field::zeros(Grid::unit_square(9).unwrap());
        let b = Field::zeros(Grid::unit_square(11).unwrap());
        assert_eq!(arakawa_jacobian(&a, &b), Err(Error::GridMismatch));
    }

    #[test]
    fn jacobian_approximates_continuum() {
        let g = Grid::unit_square(129).unwrap();
        let a = mode(g, 1.0, 2.0);
        let b = mode(g, 3.0, 1.0);
        let exact = Field::dirichlet_from_fn(g, |x, y| {
            let ax = PI * libm::cos(PI * x) * libm::sin(2.0 * PI * y);
            let ay = 2.0 * PI * libm::sin(PI * x) * libm::cos(2.0 * PI * y);
            let bx = 3.0 * PI * libm::cos(3.0 * PI * x) * libm::sin(PI * y);
            let by = PI * libm::sin(3.0 * PI * x) * libm::cos(PI * y);
            ax * by - ay * bx
        });
        let j = arakawa_jacobian(&a, &b).unwrap();
        assert!(rel_diff(&j, &exact) < 2e-3);
    }

    #[test]
    fn poisson_zero_and_eigenpair() {
        let g = Grid::new(65, 49, 1.0, 0.75).unwrap();
        let solver = PoissonSolver::new(g);
        assert_eq!(solver.solve(&Field::zeros(g)).unwrap().max_abs(), 0.0);
        let psi = mode(g, 1.0, 1.0);
        let q = psi.scaled(discrete_eigenvalue(&g, 1, 1));
        assert!(rel_diff(&solver.solve(&q).unwrap(), &psi) <= 1e-12);
    }

    #[test]
    fn poisson_residual_on_random_input() {
        let g = Grid::new(47, 40, 1.2, 1.0).unwrap();
        let solver = PoissonSolver::new(g);
        let q = white_noise_dirichlet(g, &mut member_rng(4, 4));
        let psi = solver.solve(&q).unwrap();
        assert!(psi.is_dirichlet());
        assert!(rel_diff(&laplacian(&psi), &q) <= 1e-10);
    }

    #[test]
    fn integral_estimate_on_smooth_triples() {
        // |∫ J(Δf, g) Δh| ≤ sqrt(2|D|/π) ‖Δf‖ ‖Δg‖ ‖Δh‖, observed only.
        let g = Grid::new(65, 65, 1.0, 1.0).unwrap();
        let c = libm::sqrt(2.0 * g.area() / PI);
        let triples = [
            ((1.0, 1.0), (2.0, 1.0), (1.0, 2.0)),
            ((1.0, 2.0), (3.0, 1.0), (2.0, 2.0)),
            ((2.0, 3.0), (1.0, 1.0), (3.0, 3.0)),
            ((4.0, 1.0), (1.0, 4.0), (2.0, 5.0)),
        ];
        for ((a1, a2), (b1, b2), (c1, c2)) in triples {
            let lf = laplacian(&mode(g, a1, a2));
            let lg = laplacian(&mode(g, b1, b2));
            let lh = laplacian(&mode(g, c1, c2));
            let lhs = inner_product(&arakawa_jacobian(&lf, &mode(g, b1, b2)).unwrap(), &lh)
                .unwrap()
                .abs();
            let rhs = c * l2_norm(&lf).unwrap() * l2_norm(&lg).unwrap() * l2_norm(&lh).unwrap();
            assert!(lhs <= rhs, "{lhs} > {rhs}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn jacobian_conserves_energy_and_enstrophy(seed in any::<u64>(), nx in 5usize..40, ny in 5usize..40) {
            let g = Grid::new(nx, ny, 1.0, ny as f64 / nx as f64).unwrap();
            let f = white_noise_dirichlet(g, &mut member_rng(seed, 0));
            let h = white_noise_dirichlet(g, &mut member_rng(seed, 1));
            let j = arakawa_jacobian(&f, &h).unwrap();
            let (nf, nh) = (l2_norm(&f).unwrap(), l2_norm(&h).unwrap());
            prop_assert!(inner_product(&j, &h).unwrap().abs() <= 1e-12 * nf * nh * nh / g.cell_area());
            prop_assert!(inner_product(&j, &f).unwrap().abs() <= 1e-12 * nf * nf * nh / g.cell_area());
        }

        #[test]
        fn poisson_inverts_laplacian(seed in any::<u64>(), nx in 4usize..40, ny in 4usize..40) {
            let g = Grid::new(nx, ny, 1.0, 1.0).unwrap();
            let psi = white_noise_dirichlet(g, &mut member_rng(seed, 3));
            prop_assume!(psi.max_abs() > 0.0);
            let back = PoissonSolver::new(g).solve(&laplacian(&psi)).unwrap();
            prop_assert!(rel_diff(&back, &psi) <= 1e-10);
        }
    }
}
