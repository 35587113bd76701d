//! Tendencies of the barotropic vorticity equation, classical RK4 and the
//! time-stepping driver.
//!
//! The true model is `q_t = −J(ψ, q) − β ψ_x + f + ν Δq − r q` with `Δψ = q`
//! and `q = ψ = 0` on the boundary. The LES model has the same form with the
//! filtered forcing and an additive closure term `σ`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{inner_product, Field, Grid, Trajectory};
use crate::operators::{arakawa_jacobian, ddx_interior, laplacian, max_speed, PoissonSolver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub beta: f64,
    pub nu: f64,
    pub r: f64,
}

impl PhysicalParams {
    pub fn new(beta: f64, nu: f64, r: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: "viscosity must be positive",
            });
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: "Ekman constant must be positive",
            });
        }
        if !beta.is_finite() || !nu.is_finite() || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "parameters must be finite",
            });
        }
        Ok(Self { beta, nu, r })
    }

    /// `ν = r = 0`, for conservation checks. The enstrophy estimate does not
    /// apply to these parameters.
    pub fn inviscid(beta: f64) -> Self {
        Self { beta, nu: 0.0, r: 0.0 }
    }

    /// Decay rate of the enstrophy estimate,
    /// `α = r/2 + πν/|D| − |β|(|D|/π + 1)/2`.
    pub fn alpha(&self, area: f64) -> f64 {
        use core::f64::consts::PI;
        self.r / 2.0 + PI * self.nu / area - 0.5 * self.beta.abs() * (area / PI + 1.0)
    }
}

/// Steady double-gyre wind forcing `amplitude · sin(2π y / ly)`, uniform in
/// x, zero on the boundary ring.
pub fn double_gyre_forcing(grid: Grid, amplitude: f64) -> Field {
    use core::f64::consts::PI;
    let ly = grid.ly();
    Field::dirichlet_from_fn(grid, |_, y| amplitude * libm::sin(2.0 * PI * y / ly))
}

/// State that RK4 can advance: anything closed under `y + h·k`.
pub trait OdeState: Sized {
    /// `self + h · k`
    fn offset(&self, h: f64, k: &Self) -> Self;

    /// `self + dt/6 · (k1 + 2 k2 + 2 k3 + k4)`
    fn rk4_update(&self, dt: f64, k1: &Self, k2: &Self, k3: &Self, k4: &Self) -> Self;
}

impl OdeState for Field {
    fn offset(&self, h: f64, k: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(h, k);
        out
    }

    fn rk4_update(&self, dt: f64, k1: &Self, k2: &Self, k3: &Self, k4: &Self) -> Self {
        let c = dt / 6.0;
        let mut out = self.clone();
        let (a, b, d, e) = (k1.values(), k2.values(), k3.values(), k4.values());
        for (n, v) in out.values_mut().iter_mut().enumerate() {
            *v += c * (a[n] + 2.0 * b[n] + 2.0 * d[n] + e[n]);
        }
        out
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn offset(&self, h: f64, k: &Self) -> Self {
        (self.0.offset(h, &k.0), self.1.offset(h, &k.1))
    }

    fn rk4_update(&self, dt: f64, k1: &Self, k2: &Self, k3: &Self, k4: &Self) -> Self {
        (
            self.0.rk4_update(dt, &k1.0, &k2.0, &k3.0, &k4.0),
            self.1.rk4_update(dt, &k1.1, &k2.1, &k3.1, &k4.1),
        )
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<S: OdeState, E>(
    y: &S,
    dt: f64,
    mut rhs: impl FnMut(&S) -> core::result::Result<S, E>,
) -> core::result::Result<S, E> {
    let k1 = rhs(y)?;
    let k2 = rhs(&y.offset(0.5 * dt, &k1))?;
    let k3 = rhs(&y.offset(0.5 * dt, &k2))?;
    let k4 = rhs(&y.offset(dt, &k3))?;
    Ok(y.rk4_update(dt, &k1, &k2, &k3, &k4))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Store a snapshot every this many steps (the final state is always
    /// stored).
    pub store_every: usize,
    /// Largest CFL number accepted for the initial state.
    pub cfl_safety: f64,
}

impl StepperConfig {
    pub fn new(dt: f64, t_end: f64, store_every: usize) -> Result<Self> {
        let s = Self {
            dt,
            t_end,
            store_every,
            cfl_safety: 0.5,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_cfl_safety(mut self, cfl_safety: f64) -> Self {
        self.cfl_safety = cfl_safety;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad("dt", "time step must be positive");
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad("t_end", "final time must be positive");
        }
        if self.store_every == 0 {
            return bad("store_every", "snapshot cadence must be at least one step");
        }
        let n = libm::round(self.t_end / self.dt);
        if n < 1.0 || (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return bad("t_end", "final time must be a whole number of steps");
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// Per-step scalar record of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    /// `‖q‖²`
    pub enstrophy: f64,
    /// Discrete kinetic energy `−⟨ψ, q⟩`, the five-point analogue of
    /// `‖∇ψ‖²`.
    pub energy: f64,
    /// Right-hand side of the enstrophy estimate at `t`.
    pub lemma1_bound: f64,
    pub cfl: f64,
    /// `‖f + σ‖²` applied over the step starting at `t`.
    pub forcing_sq: f64,
}

/// Additive closure `σ(t, Q)` sampled once per step and held over its four
/// stages.
pub trait Closure {
    fn sample(&mut self, t: f64, q: &Field) -> Result<Field>;
}

impl<C: Closure + ?Sized> Closure for Box<C> {
    fn sample(&mut self, t: f64, q: &Field) -> Result<Field> {
        (**self).sample(t, q)
    }
}

/// Running evaluation of `‖q0‖² e^{−2αt} + (1/r) ∫₀ᵗ ‖f(s)‖² e^{2α(s−t)} ds`
/// with trapezoid quadrature over steps of piecewise-constant forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaOneBound {
    alpha: f64,
    r: f64,
    q0_sq: f64,
    t: f64,
    integral: f64,
}

impl LemmaOneBound {
    pub fn new(params: &PhysicalParams, area: f64, q0_sq: f64) -> Self {
        Self {
            alpha: params.alpha(area),
            r: params.r,
            q0_sq,
            t: 0.0,
            integral: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Advances by `dt` under forcing of squared norm `forcing_sq`.
    pub fn advance(&mut self, dt: f64, forcing_sq: f64) {
        let decay = libm::exp(-2.0 * self.alpha * dt);
        self.integral = decay * self.integral + 0.5 * dt * forcing_sq * (decay + 1.0);
        self.t += dt;
    }

    pub fn value(&self) -> f64 {
        let forced = if self.integral == 0.0 {
            0.0
        } else {
            self.integral / self.r
        };
        self.q0_sq * libm::exp(-2.0 * self.alpha * self.t) + forced
    }
}

/// One point of the enstrophy estimate check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub t: f64,
    pub enstrophy: f64,
    pub bound: f64,
}

/// Evaluates both sides of the enstrophy estimate along a recorded history.
/// `forcing_sq[n]` is `‖f‖²` over `[times[n], times[n + 1])`.
pub fn enstrophy_bound(
    times: &[f64],
    enstrophy: &[f64],
    forcing_sq: &[f64],
    params: &PhysicalParams,
    area: f64,
) -> Result<Vec<BoundSample>> {
    if times.len() != enstrophy.len() || forcing_sq.len() + 1 < times.len() {
        return Err(Error::Misaligned("history lengths differ"));
    }
    let Some(&q0_sq) = enstrophy.first() else {
        return Ok(Vec::new());
    };
    let mut bound = LemmaOneBound::new(params, area, q0_sq);
    let mut out = Vec::with_capacity(times.len());
    out.push(BoundSample {
        t: times[0],
        enstrophy: q0_sq,
        bound: bound.value(),
    });
    for n in 1..times.len() {
        bound.advance(times[n] - times[n - 1], forcing_sq[n - 1]);
        out.push(BoundSample {
            t: times[n],
            enstrophy: enstrophy[n],
            bound: bound.value(),
        });
    }
    Ok(out)
}

/// Enstrophy estimate along the per-step diagnostics of a trajectory.
pub fn trajectory_enstrophy_bound(traj: &Trajectory, params: &PhysicalParams) -> Result<Vec<BoundSample>> {
    let d = traj.diagnostics();
    let times: Vec<f64> = d.iter().map(|s| s.t).collect();
    let ens: Vec<f64> = d.iter().map(|s| s.enstrophy).collect();
    let fsq: Vec<f64> = d.iter().map(|s| s.forcing_sq).collect();
    enstrophy_bound(&times, &ens, &fsq, params, traj.grid().area())
}

/// A configured barotropic vorticity model on one grid.
#[derive(Debug, Clone)]
pub struct Model {
    params: PhysicalParams,
    forcing: Field,
    poisson: PoissonSolver,
}

impl Model {
    pub fn new(params: PhysicalParams, forcing: Field) -> Result<Self> {
        let finite = params.beta.is_finite() && params.nu.is_finite() && params.r.is_finite();
        if !finite || params.nu < 0.0 || params.r < 0.0 {
            return Err(Error::InvalidParameter {
                name: "params",
                reason: "parameters must be finite with nu, r >= 0",
            });
        }
        forcing.ensure_finite()?;
        let poisson = PoissonSolver::new(*forcing.grid());
        let mut forcing = forcing;
        forcing.zero_boundary();
        Ok(Self {
            params,
            forcing,
            poisson,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.poisson.grid()
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn forcing(&self) -> &Field {
        &self.forcing
    }

    pub fn poisson(&self) -> &PoissonSolver {
        &self.poisson
    }

    pub fn streamfunction(&self, q: &Field) -> Result<Field> {
        self.poisson.solve(q)
    }

    /// `−J(ψ, q) − β ψ_x + f + ν Δq − r q (+ σ)` for a known `ψ`.
    pub fn tendency(&self, q: &Field, psi: &Field, sigma: Option<&Field>) -> Result<Field> {
        q.ensure_same_grid(&self.forcing)?;
        psi.ensure_same_grid(q)?;
        if let Some(s) = sigma {
            s.ensure_same_grid(q)?;
        }
        let PhysicalParams { beta, nu, r } = self.params;
        let jac = arakawa_jacobian(psi, q)?;
        let lap = laplacian(q);
        let mut out = Field::zeros(*q.grid());
        let (o, jv, lv, qv, fv) = (
            out.values_mut(),
            jac.values(),
            lap.values(),
            q.values(),
            self.forcing.values(),
        );
        if beta != 0.0 {
            let psi_x = ddx_interior(psi);
            let pv = psi_x.values();
            for k in 0..o.len() {
                o[k] = -jv[k] - beta * pv[k] + fv[k] + nu * lv[k] - r * qv[k];
            }
        } else {
            for k in 0..o.len() {
                o[k] = -jv[k] + fv[k] + nu * lv[k] - r * qv[k];
            }
        }
        if let Some(s) = sigma {
            for (v, sv) in o.iter_mut().zip(s.values()) {
                *v += sv;
            }
        }
        out.zero_boundary();
        Ok(out)
    }

    pub fn rhs_true(&self, q: &Field) -> Result<Field> {
        let psi = self.poisson.solve(q)?;
        self.tendency(q, &psi, None)
    }

    pub fn rhs_les(&self, q: &Field, sigma: &Field) -> Result<Field> {
        let psi = self.poisson.solve(q)?;
        self.tendency(q, &psi, Some(sigma))
    }

    /// CFL number `max|u| · dt / min(dx, dy)` for streamfunction `psi`.
    pub fn cfl(&self, psi: &Field, dt: f64) -> f64 {
        let g = self.grid();
        max_speed(psi) * dt / g.dx().min(g.dy())
    }

    /// Advances `(q, ψ)` by one RK4 step with `σ` frozen across the stages.
    /// Returns the new state, its streamfunction and CFL number.
    pub fn step(
        &self,
        q: &Field,
        psi: &Field,
        dt: f64,
        sigma: Option<&Field>,
        step: usize,
    ) -> Result<(Field, Field, f64)> {
        let mut first = Some(self.tendency(q, psi, sigma)?);
        let q_new = rk4_step(q, dt, |s| match first.take() {
            Some(k1) => Ok(k1),
            None => {
                let p = self.poisson.solve(s)?;
                self.tendency(s, &p, sigma)
            }
        })?;
        if q_new.ensure_finite().is_err() {
            return Err(Error::Blowup { step });
        }
        let psi_new = self.poisson.solve(&q_new)?;
        let cfl = self.cfl(&psi_new, dt);
        if cfl > 1.0 {
            return Err(Error::Cfl { step, cfl, limit: 1.0 });
        }
        Ok((q_new, psi_new, cfl))
    }

    /// Integrates from `q0` to `stepper.t_end`, recording snapshots every
    /// `store_every` steps and diagnostics every step.
    pub fn run(
        &self,
        q0: &Field,
        mut closure: Option<&mut dyn Closure>,
        stepper: &StepperConfig,
    ) -> Result<Trajectory> {
        stepper.validate()?;
        q0.ensure_same_grid(&self.forcing)?;
        q0.ensure_finite()?;
        q0.ensure_dirichlet()?;

        let grid = *self.grid();
        let dt = stepper.dt;
        let n_steps = stepper.n_steps();
        let mut traj = Trajectory::new(grid);
        let mut bound = LemmaOneBound::new(&self.params, grid.area(), q0.norm_sq());

        let mut q = q0.clone();
        let mut psi = self.poisson.solve(&q)?;
        let mut cfl = self.cfl(&psi, dt);
        if cfl > stepper.cfl_safety {
            return Err(Error::Cfl {
                step: 0,
                cfl,
                limit: stepper.cfl_safety,
            });
        }

        let mut sigma = match closure.as_deref_mut() {
            Some(c) => Some(c.sample(0.0, &q)?),
            None => None,
        };
        traj.push_snapshot(0.0, q.clone())?;
        if let Some(s) = &sigma {
            traj.push_forcing(s.clone());
        }

        for n in 0..n_steps {
            let t = stepper.time(n);
            let forcing_sq = self.total_forcing_sq(sigma.as_ref());
            traj.push_diagnostics(StepDiagnostics {
                t,
                enstrophy: q.norm_sq(),
                energy: -inner_product(&psi, &q)?,
                lemma1_bound: bound.value(),
                cfl,
                forcing_sq,
            });

            let (q_new, psi_new, cfl_new) = self.step(&q, &psi, dt, sigma.as_ref(), n)?;
            bound.advance(dt, forcing_sq);
            q = q_new;
            psi = psi_new;
            cfl = cfl_new;

            let t_next = stepper.time(n + 1);
            if let Some(c) = closure.as_deref_mut() {
                sigma = Some(c.sample(t_next, &q)?);
            }
            if (n + 1) % stepper.store_every == 0 || n + 1 == n_steps {
                traj.push_snapshot(t_next, q.clone())?;
                if let Some(s) = &sigma {
                    traj.push_forcing(s.clone());
                }
            }
        }
        traj.push_diagnostics(StepDiagnostics {
            t: stepper.time(n_steps),
            enstrophy: q.norm_sq(),
            energy: -inner_product(&psi, &q)?,
            lemma1_bound: bound.value(),
            cfl,
            forcing_sq: self.total_forcing_sq(sigma.as_ref()),
        });
        Ok(traj)
    }

    fn total_forcing_sq(&self, sigma: Option<&Field>) -> f64 {
        match sigma {
            None => self.forcing.norm_sq(),
            Some(s) => {
                let sum: f64 = self
                    .forcing
                    .values()
                    .iter()
                    .zip(s.values())
                    .map(|(f, s)| (f + s) * (f + s))
                    .sum();
                sum * self.grid().cell_area()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::l2_norm;
    use crate::operators::discrete_eigenvalue;
    use crate::rng::{member_rng, white_noise_dirichlet};
    use core::f64::consts::PI;

    fn mode(g: Grid, k1: f64, k2: f64) -> Field {
        let (lx, ly) = (g.lx(), g.ly());
        Field::dirichlet_from_fn(g, |x, y| libm::sin(k1 * PI * x / lx) * libm::sin(k2 * PI * y / ly))
    }

    fn params(beta: f64) -> PhysicalParams {
        PhysicalParams::new(beta, 1e-3, 0.05).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, -1.0).is_err());
        assert!(PhysicalParams::new(-3.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn alpha_formula() {
        let p = PhysicalParams::new(0.0, 0.001, 0.01).unwrap();
        let a = p.alpha(1.0);
        assert!((a - (0.005 + 0.001 * PI)).abs() < 1e-15);
        assert!((a - 0.0081416).abs() < 1e-7);
        assert!(PhysicalParams::new(1.0, 0.001, 0.01).unwrap().alpha(1.0) < 0.0);
    }

    #[test]
    fn double_gyre_profile() {
        let g = Grid::new(65, 65, 1.0, 1.0).unwrap();
        assert_eq!(double_gyre_forcing(g, 0.0).max_abs(), 0.0);
        let f = double_gyre_forcing(g, 2.5);
        assert!((f.get(10, 16) - 2.5).abs() < 1e-12);
        assert_eq!(f.get(10, 16), f.get(40, 16));
        assert!(f.integral().abs() <= 1e-12 * 2.5 * g.area());
        assert!(f.is_dirichlet());
    }

    #[test]
    fn rest_state_is_steady_and_forcing_isolated() {
        let g = Grid::unit_square(33).unwrap();
        let zero = Field::zeros(g);
        let m = Model::new(params(1.5), zero.clone()).unwrap();
        assert_eq!(m.rhs_true(&zero).unwrap().max_abs(), 0.0);

        let f = double_gyre_forcing(g, 3.0);
        let m = Model::new(params(1.5), f.clone()).unwrap();
        assert_eq!(m.rhs_true(&zero).unwrap(), f);
    }

    #[test]
    fn single_mode_decays_at_discrete_rate() {
        let g = Grid::new(33, 33, 1.0, 1.0).unwrap();
        let p = params(0.0);
        let m = Model::new(p, Field::zeros(g)).unwrap();
        let q = mode(g, 2.0, 1.0);
        let lam = discrete_eigenvalue(&g, 2, 1);
        let expected = q.scaled(p.nu * lam - p.r);
        let got = m.rhs_true(&q).unwrap();
        assert!(l2_norm(&(&got - &expected)).unwrap() <= 1e-12 * l2_norm(&expected).unwrap());
    }

    #[test]
    fn les_tendency_is_additive_in_sigma() {
        let g = Grid::new(33, 25, 1.0, 0.75).unwrap();
        let m = Model::new(params(2.0), double_gyre_forcing(g, 1.0)).unwrap();
        let q = white_noise_dirichlet(g, &mut member_rng(1, 0));
        let s = white_noise_dirichlet(g, &mut member_rng(1, 1));
        let zero = Field::zeros(g);
        assert_eq!(m.rhs_les(&q, &zero).unwrap(), m.rhs_true(&q).unwrap());
        let with = m.rhs_les(&q, &s).unwrap();
        let without = m.rhs_les(&q, &zero).unwrap();
        for ((a, b), sv) in with.values().iter().zip(without.values()).zip(s.values()) {
            assert!(((a - b) - sv).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()));
        }
        let wrong = Field::zeros(Grid::unit_square(9).unwrap());
        assert!(m.rhs_les(&q, &wrong).is_err());
    }

    #[test]
    fn les_tendency_matches_term_by_term_oracle() {
        let g = Grid::new(29, 29, 1.0, 1.0).unwrap();
        let p = params(3.0);
        let f = double_gyre_forcing(g, 0.7);
        let m = Model::new(p, f.clone()).unwrap();
        let q = white_noise_dirichlet(g, &mut member_rng(6, 0));
        let s = white_noise_dirichlet(g, &mut member_rng(6, 1));
        let psi = crate::operators::solve_poisson(&q).unwrap();
        let j = arakawa_jacobian(&psi, &q).unwrap();
        let (psi_x, _) = crate::operators::gradient(&psi);
        let lap = laplacian(&q);
        let mut oracle = Field::zeros(g);
        for jj in 1..28 {
            for ii in 1..28 {
                let v = -j.get(ii, jj) - p.beta * psi_x.get(ii, jj) + f.get(ii, jj) + p.nu * lap.get(ii, jj)
                    - p.r * q.get(ii, jj)
                    + s.get(ii, jj);
                oracle.set(ii, jj, v);
            }
        }
        let got = m.rhs_les(&q, &s).unwrap();
        assert!(l2_norm(&(&got - &oracle)).unwrap() <= 1e-14 * l2_norm(&oracle).unwrap());
    }

    #[test]
    fn rk4_zero_rhs_and_linear_decay() {
        let g = Grid::unit_square(9).unwrap();
        let q = white_noise_dirichlet(g, &mut member_rng(0, 0));
        let same = rk4_step(&q, 0.1, |s: &Field| Ok::<_, Error>(Field::zeros(*s.grid()))).unwrap();
        assert_eq!(same, q);

        let (r, dt) = (0.7, 0.3);
        let out = rk4_step(&q, dt, |s: &Field| Ok::<_, Error>(s.scaled(-r))).unwrap();
        let h = r * dt;
        let factor = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
        let expected = q.scaled(factor);
        assert!(l2_norm(&(&out - &expected)).unwrap() <= 1e-14 * l2_norm(&expected).unwrap());
    }

    #[test]
    fn stepper_validation() {
        assert!(StepperConfig::new(0.0, 1.0, 1).is_err());
        assert!(StepperConfig::new(0.1, 1.0, 0).is_err());
        assert!(StepperConfig::new(0.3, 1.0, 1).is_err());
        assert_eq!(StepperConfig::new(0.1, 1.0, 3).unwrap().n_steps(), 10);
    }

    #[test]
    fn zero_run_stays_zero() {
        let g = Grid::unit_square(17).unwrap();
        let m = Model::new(params(1.0), Field::zeros(g)).unwrap();
        let st = StepperConfig::new(0.01, 0.1, 3).unwrap();
        let traj = m.run(&Field::zeros(g), None, &st).unwrap();
        assert_eq!(traj.times().len(), 5);
        assert!(traj.snapshots().iter().all(|s| s.max_abs() == 0.0));
        assert_eq!(traj.diagnostics().len(), 11);
    }

    #[test]
    fn single_mode_run_matches_exponential() {
        let g = Grid::new(33, 33, 1.0, 1.0).unwrap();
        let p = params(0.0);
        let m = Model::new(p, Field::zeros(g)).unwrap();
        let q0 = mode(g, 1.0, 1.0);
        let st = StepperConfig::new(0.05, 5.0, 10).unwrap();
        let traj = m.run(&q0, None, &st).unwrap();
        let rate = p.nu * discrete_eigenvalue(&g, 1, 1) - p.r;
        let n0 = l2_norm(&q0).unwrap();
        for (t, q) in traj.times().iter().zip(traj.snapshots()) {
            let expected = n0 * libm::exp(rate * t);
            assert!((l2_norm(q).unwrap() - expected).abs() <= 1e-8 * n0, "t={t}");
        }
    }

    #[test]
    fn run_rejects_bad_inputs() {
        let g = Grid::unit_square(17).unwrap();
        let m = Model::new(params(0.0), Field::zeros(g)).unwrap();
        let st = StepperConfig::new(0.01, 0.1, 1).unwrap();
        let bad = Field::from_fn(g, |_, _| 1.0);
        assert_eq!(m.run(&bad, None, &st).unwrap_err(), Error::NotDirichlet);
        let other = Field::zeros(Grid::unit_square(9).unwrap());
        assert_eq!(m.run(&other, None, &st).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let g = Grid::unit_square(33).unwrap();
        let m = Model::new(params(0.0), Field::zeros(g)).unwrap();
        let q0 = mode(g, 1.0, 1.0).scaled(500.0);
        let st = StepperConfig::new(0.5, 1.0, 1).unwrap().with_cfl_safety(100.0);
        match m.run(&q0, None, &st).unwrap_err() {
            Error::Cfl { step, cfl, .. } => {
                assert_eq!(step, 0);
                assert!(cfl > 1.0);
            }
            e => panic!("unexpected {e:?}"),
        }
        let st = StepperConfig::new(0.5, 1.0, 1).unwrap();
        assert!(matches!(m.run(&q0, None, &st), Err(Error::Cfl { .. })));
    }

    #[test]
    fn zero_forcing_bound_is_pure_decay() {
        let p = params(0.0);
        let times = [0.0, 1.0, 2.0];
        let b = enstrophy_bound(&times, &[4.0, 3.0, 2.0], &[0.0, 0.0], &p, 1.0).unwrap();
        for s in &b {
            assert!((s.bound - 4.0 * libm::exp(-2.0 * p.alpha(1.0) * s.t)).abs() < 1e-14);
        }
    }

    #[test]
    fn steady_forcing_bound_matches_closed_form() {
        let p = params(0.0);
        let a = p.alpha(1.0);
        let dt = 1e-3;
        let times: Vec<f64> = (0..=2000).map(|n| n as f64 * dt).collect();
        let ens = alloc::vec![0.0; times.len()];
        let fsq = alloc::vec![2.0; times.len()];
        let b = enstrophy_bound(&times, &ens, &fsq, &p, 1.0).unwrap();
        let t = 2.0;
        let exact = 2.0 / p.r * (1.0 - libm::exp(-2.0 * a * t)) / (2.0 * a);
        assert!((b.last().unwrap().bound - exact).abs() < 1e-6 * exact);
    }
}
