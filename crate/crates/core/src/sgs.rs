//! Subgrid-scale stress: a-priori diagnosis, statistics, and the stochastic
//! closures built from them.
//!
//! The SGS stress of a resolved state is `R(q) = J(ψ̄, q̄) − \overline{J(ψ, q)}`,
//! computed on the fine grid and then restricted to the LES grid.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{rk4_step, Closure, Model, StepperConfig};
use crate::error::{Error, Result};
use crate::field::{spin_up_start, Field, Grid, Trajectory};
use crate::filter::{restrict, FilterSpec, GaussianFilter};
use crate::operators::{arakawa_jacobian, PoissonSolver};
use crate::rng::{member_rng, standard_normal, Rng};
use crate::spectral::{SineCoeffs, SineTransform};

/// Time series of SGS stress snapshots on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SgsSeries {
    grid: Grid,
    delta: f64,
    times: Vec<f64>,
    fields: Vec<Field>,
}

impl SgsSeries {
    pub fn new(grid: Grid, delta: f64) -> Self {
        Self {
            grid,
            delta,
            times: Vec::new(),
            fields: Vec::new(),
        }
    }

    pub fn from_parts(grid: Grid, delta: f64, times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        let mut s = Self::new(grid, delta);
        if times.len() != fields.len() {
            return Err(Error::Misaligned("one field per time required"));
        }
        for (t, f) in times.into_iter().zip(fields) {
            s.push(t, f)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, t: f64, f: Field) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if self.times.last().is_some_and(|&last| !(t > last)) {
            return Err(Error::Misaligned("times must increase strictly"));
        }
        self.times.push(t);
        self.fields.push(f);
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `∫ ‖R‖² dt` by the trapezoid rule over the stored times.
    pub fn integral_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.fields.iter().map(Field::norm_sq).collect();
        trapezoid(&self.times, &sq)
    }
}

pub(crate) fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Fine-grid SGS stress evaluator for one filter width.
#[derive(Debug, Clone)]
pub struct SgsDiagnoser {
    filter: GaussianFilter,
    poisson: PoissonSolver,
}

impl SgsDiagnoser {
    pub fn new(fine: Grid, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "filter width for SGS diagnosis must be positive",
            });
        }
        Ok(Self {
            filter: GaussianFilter::new(fine, FilterSpec::new(delta)?),
            poisson: PoissonSolver::new(fine),
        })
    }

    pub fn filter(&self) -> &GaussianFilter {
        &self.filter
    }

    /// `R(q)` on the fine grid given `q` and its streamfunction.
    pub fn stress_with_psi(&self, q: &Field, psi: &Field) -> Result<Field> {
        let psi_bar = self.filter.apply(psi)?;
        let q_bar = self.filter.apply(q)?;
        let resolved = arakawa_jacobian(&psi_bar, &q_bar)?;
        let full = self.filter.apply(&arakawa_jacobian(psi, q)?)?;
        Ok(resolved - full)
    }

    pub fn stress(&self, q: &Field) -> Result<Field> {
        let psi = self.poisson.solve(q)?;
        self.stress_with_psi(q, &psi)
    }
}

/// Diagnoses `R(q)` for every snapshot of a fine trajectory and restricts it
/// to `coarse`.
pub fn diagnose_sgs(traj: &Trajectory, delta: f64, coarse: &Grid) -> Result<SgsSeries> {
    coarse.nesting_stride(traj.grid())?;
    let diag = SgsDiagnoser::new(*traj.grid(), delta)?;
    let mut out = SgsSeries::new(*coarse, delta);
    for (&t, q) in traj.times().iter().zip(traj.snapshots()) {
        out.push(t, restrict(&diag.stress(q)?, coarse)?)?;
    }
    Ok(out)
}

/// Equal-width histogram of pooled values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let (lo, hi) = if values.is_empty() {
            (0.0, 1.0)
        } else if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        };
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|b| lo + b as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = libm::floor((v - lo) / width) as isize;
            counts[b.clamp(0, bins as isize - 1) as usize] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Number of histogram bins used by [`estimate_stats`].
pub const HISTOGRAM_BINS: usize = 64;

/// Summary statistics of an SGS series after spin-up.
#[derive(Debug, Clone, PartialEq)]
pub struct SgsStats {
    pub mean_field: Field,
    pub std_field: Field,
    /// Integral correlation time of the basin-integrated `R²`.
    pub tau: f64,
    /// Sampling interval of the series the statistics came from.
    pub sample_dt: f64,
    /// Temporal variance of each sine-mode amplitude of `R − mean`.
    pub spatial_spectrum: SineCoeffs,
    /// Pooled interior values.
    pub histogram: Histogram,
    /// Snapshots used.
    pub samples: usize,
}

impl SgsStats {
    pub fn grid(&self) -> &Grid {
        self.mean_field.grid()
    }

    /// Basin averages of `|mean_field|` and `std_field` over interior nodes.
    pub fn basin_mean_abs_mean_and_std(&self) -> (f64, f64) {
        let g = *self.grid();
        let (mut m, mut s, mut n) = (0.0, 0.0, 0usize);
        for j in 1..g.ny() - 1 {
            for i in 1..g.nx() - 1 {
                m += self.mean_field.get(i, j).abs();
                s += self.std_field.get(i, j);
                n += 1;
            }
        }
        (m / n as f64, s / n as f64)
    }

    /// `∫₀ᵀ E‖σ‖² dt` for a stationary process with these moments.
    pub fn expected_norm_sq(&self) -> f64 {
        self.mean_field.norm_sq() + self.std_field.norm_sq()
    }
}

/// Minimum number of post-spin-up snapshots accepted by [`estimate_stats`].
pub const MIN_STATS_SAMPLES: usize = 10;

pub fn estimate_stats(series: &SgsSeries, spin_up_fraction: f64) -> Result<SgsStats> {
    let n_all = series.len();
    let start = if n_all == 0 {
        0
    } else {
        spin_up_start(n_all, spin_up_fraction)
    };
    let kept = &series.fields[start..];
    let times = &series.times[start..];
    if kept.len() < MIN_STATS_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_STATS_SAMPLES,
            have: kept.len(),
        });
    }
    let sample_dt = uniform_spacing(times)?;
    let grid = series.grid;
    let n = kept.len() as f64;

    let mut mean = Field::zeros(grid);
    for f in kept {
        mean += f;
    }
    let mean = mean.scaled(1.0 / n);

    let mut var = Field::zeros(grid);
    for f in kept {
        for ((v, x), m) in var.values_mut().iter_mut().zip(f.values()).zip(mean.values()) {
            *v += (x - m) * (x - m);
        }
    }
    let std_field = var.map(|v| libm::sqrt(v / n));

    let transform = SineTransform::new(grid);
    let mut spectrum = SineCoeffs::zeros(grid.nx() - 2, grid.ny() - 2);
    for f in kept {
        let c = transform.forward(&(f - &mean))?;
        for (s, v) in spectrum.data.iter_mut().zip(&c.data) {
            *s += v * v;
        }
    }
    for s in &mut spectrum.data {
        *s /= n;
    }

    let mut pooled = Vec::with_capacity(kept.len() * (grid.nx() - 2) * (grid.ny() - 2));
    for f in kept {
        for j in 1..grid.ny() - 1 {
            for i in 1..grid.nx() - 1 {
                pooled.push(f.get(i, j));
            }
        }
    }

    let energy: Vec<f64> = kept.iter().map(Field::norm_sq).collect();
    Ok(SgsStats {
        mean_field: mean,
        std_field,
        tau: integral_time_scale(&energy, sample_dt),
        sample_dt,
        spatial_spectrum: spectrum,
        histogram: Histogram::from_values(&pooled, HISTOGRAM_BINS),
        samples: kept.len(),
    })
}

fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            have: times.len(),
        });
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::Misaligned("statistics need uniformly spaced samples"));
    }
    Ok(dt)
}

/// Integral time scale of a scalar series: trapezoid integral of its
/// normalised autocorrelation up to the first zero crossing.
///
/// A series with no variance gets the full record length.
pub fn integral_time_scale(series: &[f64], dt: f64) -> f64 {
    let n = series.len();
    if n < 2 {
        return dt;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = dev.iter().map(|d| d * d).sum::<f64>();
    if c0 <= 0.0 {
        return (n - 1) as f64 * dt;
    }
    let mut tau = 0.0;
    let mut prev = 1.0;
    for lag in 1..n {
        let c: f64 = dev[..n - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum();
        let rho = c / c0;
        if rho <= 0.0 {
            // linear interpolation to the crossing
            tau += 0.5 * prev * (prev / (prev - rho)) * dt;
            return tau;
        }
        tau += 0.5 * (prev + rho) * dt;
        prev = rho;
    }
    tau
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosureKind {
    Null,
    Replay,
    PerturbedReplay,
    Ar1Matched,
}

impl ClosureKind {
    pub const ALL: [ClosureKind; 4] = [
        ClosureKind::Null,
        ClosureKind::Replay,
        ClosureKind::PerturbedReplay,
        ClosureKind::Ar1Matched,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosureKind::Null => "null",
            ClosureKind::Replay => "replay",
            ClosureKind::PerturbedReplay => "perturbed_replay",
            ClosureKind::Ar1Matched => "ar1_matched",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Whether different seeds can produce different closure forcing or
    /// initial conditions.
    pub fn is_random(self) -> bool {
        matches!(self, ClosureKind::PerturbedReplay | ClosureKind::Ar1Matched)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ClosureSource<'a> {
    None,
    Series(&'a SgsSeries),
    Stats(&'a SgsStats),
}

/// Which closure to build and from what.
#[derive(Debug, Clone, Copy)]
pub struct ClosureSpec<'a> {
    pub kind: ClosureKind,
    pub source: ClosureSource<'a>,
    pub seed: u64,
    pub amplitude_scale: f64,
}

impl<'a> ClosureSpec<'a> {
    pub fn null() -> Self {
        Self {
            kind: ClosureKind::Null,
            source: ClosureSource::None,
            seed: 0,
            amplitude_scale: 1.0,
        }
    }

    pub fn replay(series: &'a SgsSeries) -> Self {
        Self {
            kind: ClosureKind::Replay,
            source: ClosureSource::Series(series),
            seed: 0,
            amplitude_scale: 1.0,
        }
    }

    /// Same forcing as [`ClosureSpec::replay`]; the seed perturbs the initial
    /// condition of the run that uses it.
    pub fn perturbed_replay(series: &'a SgsSeries, seed: u64) -> Self {
        Self {
            kind: ClosureKind::PerturbedReplay,
            source: ClosureSource::Series(series),
            seed,
            amplitude_scale: 1.0,
        }
    }

    pub fn ar1_matched(stats: &'a SgsStats, seed: u64) -> Self {
        Self {
            kind: ClosureKind::Ar1Matched,
            source: ClosureSource::Stats(stats),
            seed,
            amplitude_scale: 1.0,
        }
    }

    pub fn with_amplitude_scale(mut self, scale: f64) -> Self {
        self.amplitude_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude_scale.is_finite() {
            return Err(Error::ClosureSpec("amplitude scale must be finite"));
        }
        match (self.kind, self.source) {
            (ClosureKind::Null, _) => Ok(()),
            (ClosureKind::Replay | ClosureKind::PerturbedReplay, ClosureSource::Series(s)) => {
                if s.is_empty() {
                    Err(Error::ClosureSpec("replay series is empty"))
                } else {
                    Ok(())
                }
            }
            (ClosureKind::Ar1Matched, ClosureSource::Stats(_)) => Ok(()),
            (ClosureKind::Replay | ClosureKind::PerturbedReplay, _) => {
                Err(Error::ClosureSpec("replay closures need an SGS series"))
            }
            (ClosureKind::Ar1Matched, _) => Err(Error::ClosureSpec("ar1_matched needs SGS statistics")),
        }
    }
}

/// Builds the sampler `σ(t, Q)` described by `spec` for a run with the
/// given stepper.
pub fn make_closure<'a>(spec: &ClosureSpec<'a>, stepper: &StepperConfig) -> Result<Box<dyn Closure + 'a>> {
    spec.validate()?;
    stepper.validate()?;
    Ok(match (spec.kind, spec.source) {
        (ClosureKind::Null, _) => Box::new(NullClosure),
        (ClosureKind::Replay | ClosureKind::PerturbedReplay, ClosureSource::Series(series)) => {
            Box::new(ReplayClosure::new(series, spec.amplitude_scale))
        }
        (ClosureKind::Ar1Matched, ClosureSource::Stats(stats)) => {
            Box::new(Ar1Closure::new(stats, stepper.dt, spec.seed, spec.amplitude_scale))
        }
        _ => unreachable!("validated above"),
    })
}

/// `σ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClosure;

impl Closure for NullClosure {
    fn sample(&mut self, _t: f64, q: &Field) -> Result<Field> {
        Ok(Field::zeros(*q.grid()))
    }
}

/// Replays a diagnosed series, linear in time between stored snapshots.
#[derive(Debug, Clone)]
pub struct ReplayClosure<'a> {
    series: &'a SgsSeries,
    scale: f64,
    tol: f64,
}

impl<'a> ReplayClosure<'a> {
    pub fn new(series: &'a SgsSeries, scale: f64) -> Self {
        let t = series.times();
        let span = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let tol = if span.is_finite() { 1e-9 * span } else { 1e-12 };
        Self { series, scale, tol }
    }

    pub fn at(&self, t: f64) -> Result<Field> {
        let times = self.series.times();
        let fields = self.series.fields();
        let (start, end) = (times[0], times[times.len() - 1]);
        if t < start - self.tol || t > end + self.tol {
            return Err(Error::OutOfRange { t, start, end });
        }
        let k = times.partition_point(|&s| s <= t + self.tol).saturating_sub(1);
        let exact = |k: usize| {
            if self.scale == 1.0 {
                fields[k].clone()
            } else {
                fields[k].scaled(self.scale)
            }
        };
        if (t - times[k]).abs() <= self.tol || k + 1 == times.len() {
            return Ok(exact(k));
        }
        if (times[k + 1] - t).abs() <= self.tol {
            return Ok(exact(k + 1));
        }
        let w = (t - times[k]) / (times[k + 1] - times[k]);
        let (a, b) = (self.scale * (1.0 - w), self.scale * w);
        Ok(fields[k].zip_map(&fields[k + 1], |x, y| a * x + b * y))
    }
}

impl Closure for ReplayClosure<'_> {
    fn sample(&mut self, t: f64, q: &Field) -> Result<Field> {
        if q.grid() != self.series.grid() {
            return Err(Error::GridMismatch);
        }
        self.at(t)
    }
}

/// Gaussian AR(1) field process matched to [`SgsStats`]: pointwise mean and
/// standard deviation, diagonal sine-mode spectrum and correlation time.
#[derive(Debug, Clone)]
pub struct Ar1Closure {
    mean: Field,
    std: Field,
    mode_std: SineCoeffs,
    unit_scale: Field,
    transform: SineTransform,
    a: f64,
    state: Option<Field>,
    rng: Rng,
    scale: f64,
}

impl Ar1Closure {
    pub fn new(stats: &SgsStats, dt: f64, seed: u64, scale: f64) -> Self {
        let grid = *stats.grid();
        let mut mode_std = stats.spatial_spectrum.clone();
        for v in &mut mode_std.data {
            *v = libm::sqrt(v.max(0.0));
        }
        Self {
            mean: stats.mean_field.clone(),
            std: stats.std_field.clone(),
            unit_scale: pointwise_unit_scale(grid, &stats.spatial_spectrum),
            mode_std,
            transform: SineTransform::new(grid),
            a: libm::exp(-dt / stats.tau),
            state: None,
            rng: member_rng(seed, 0),
            scale,
        }
    }

    pub fn coefficient(&self) -> f64 {
        self.a
    }

    fn innovation(&mut self) -> Field {
        let mut c = self.mode_std.clone();
        for v in &mut c.data {
            *v *= standard_normal(&mut self.rng);
        }
        let mut eta = self.transform.inverse(&c);
        for (e, s) in eta.values_mut().iter_mut().zip(self.unit_scale.values()) {
            *e *= s;
        }
        eta
    }

    /// Advances the unit-variance process and returns it.
    pub fn advance(&mut self) -> &Field {
        let eta = self.innovation();
        let next = match self.state.take() {
            None => eta,
            Some(z) => {
                let b = libm::sqrt(1.0 - self.a * self.a);
                z.zip_map(&eta, |x, e| self.a * x + b * e)
            }
        };
        self.state.insert(next)
    }
}

impl Closure for Ar1Closure {
    fn sample(&mut self, _t: f64, q: &Field) -> Result<Field> {
        if q.grid() != self.mean.grid() {
            return Err(Error::GridMismatch);
        }
        let z = self.advance().clone();
        let scale = self.scale;
        let mut out = self.mean.clone();
        for ((o, s), zv) in out.values_mut().iter_mut().zip(self.std.values()).zip(z.values()) {
            *o = scale * (*o + s * zv);
        }
        Ok(out)
    }
}

/// `1 / sqrt(Σ_k S_k φ_k(x)²)`: rescales a field synthesised from spectrum
/// `S` to unit pointwise variance (zero where the variance vanishes).
fn pointwise_unit_scale(grid: Grid, spectrum: &SineCoeffs) -> Field {
    use core::f64::consts::PI;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (n1, n2) = (spectrum.n1, spectrum.n2);
    let sin_sq = |k: usize, i: usize, n: usize| {
        let s = libm::sin(PI * (k * i) as f64 / (n - 1) as f64);
        s * s
    };
    // partial[k1][j] = Σ_k2 S[k1,k2] sin²(π k2 j / (ny - 1))
    let mut partial = vec![0.0; n1 * ny];
    for k2 in 1..=n2 {
        for j in 1..ny - 1 {
            let w = sin_sq(k2, j, ny);
            for k1 in 1..=n1 {
                partial[(k1 - 1) * ny + j] += spectrum.get(k1, k2) * w;
            }
        }
    }
    let mut out = Field::zeros(grid);
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let var: f64 = (1..=n1).map(|k1| sin_sq(k1, i, nx) * partial[(k1 - 1) * ny + j]).sum();
            if var > 0.0 {
                out.set(i, j, 1.0 / libm::sqrt(var));
            }
        }
    }
    out
}

/// `∫ ‖R − σ‖² dt` (trapezoid) for series sampled at the same times.
pub fn closure_mismatch(series_r: &SgsSeries, sampled_sigma: &SgsSeries) -> Result<f64> {
    if series_r.grid() != sampled_sigma.grid() {
        return Err(Error::GridMismatch);
    }
    if series_r.len() != sampled_sigma.len() {
        return Err(Error::Misaligned("series lengths differ"));
    }
    let tol = 1e-9 * series_r.times().last().copied().unwrap_or(1.0).abs().max(1e-300);
    if series_r
        .times()
        .iter()
        .zip(sampled_sigma.times())
        .any(|(a, b)| (a - b).abs() > tol)
    {
        return Err(Error::Misaligned("sample times differ"));
    }
    let sq: Vec<f64> = series_r
        .fields()
        .iter()
        .zip(sampled_sigma.fields())
        .map(|(r, s)| (r - s).norm_sq())
        .collect();
    Ok(trapezoid(series_r.times(), &sq))
}

/// Output of [`run_exact_replay`]: the filtered benchmark and the LES run
/// at the same stored times.
#[derive(Debug, Clone)]
pub struct ExactReplay {
    pub benchmark: Trajectory,
    pub les: Trajectory,
}

/// Integrates the resolved model and the same-grid LES together, feeding
/// the LES the SGS stress of the resolved state at every RK4 stage. With
/// `Q(0) = q̄(0)` the LES then reproduces `q̄` to round-off.
pub fn run_exact_replay(
    truth: &Model,
    les: &Model,
    diagnoser: &SgsDiagnoser,
    q0: &Field,
    stepper: &StepperConfig,
) -> Result<ExactReplay> {
    stepper.validate()?;
    q0.ensure_dirichlet()?;
    if truth.grid() != les.grid() || truth.grid() != diagnoser.filter().grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *truth.grid();
    let filter = diagnoser.filter();
    let mut state = (q0.clone(), filter.apply(q0)?);
    let mut benchmark = Trajectory::new(grid);
    let mut les_traj = Trajectory::new(grid);
    benchmark.push_snapshot(0.0, state.1.clone())?;
    les_traj.push_snapshot(0.0, state.1.clone())?;

    let n_steps = stepper.n_steps();
    for n in 0..n_steps {
        state = rk4_step(&state, stepper.dt, |(q, big_q): &(Field, Field)| {
            let psi = truth.streamfunction(q)?;
            let kq = truth.tendency(q, &psi, None)?;
            let sigma = diagnoser.stress_with_psi(q, &psi)?;
            let big_psi = les.streamfunction(big_q)?;
            let kbig = les.tendency(big_q, &big_psi, Some(&sigma))?;
            Ok::<_, Error>((kq, kbig))
        })?;
        if state.0.ensure_finite().is_err() || state.1.ensure_finite().is_err() {
            return Err(Error::Blowup { step: n });
        }
        if (n + 1) % stepper.store_every == 0 || n + 1 == n_steps {
            let t = stepper.time(n + 1);
            benchmark.push_snapshot(t, filter.apply(&state.0)?)?;
            les_traj.push_snapshot(t, state.1.clone())?;
        }
    }
    Ok(ExactReplay {
        benchmark,
        les: les_traj,
    })
}
