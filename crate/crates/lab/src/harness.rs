//! Experiment orchestration: the resolved run, SGS diagnosis, coarse LES
//! runs, the time-mean triptych and the two convergence checks.

use rayon::prelude::*;

use qgles_core::rng::{member_rng, member_seed, white_noise_dirichlet};
use qgles_core::sgs::{closure_mismatch, run_exact_replay, SgsDiagnoser};
use qgles_core::{
    diagnose_sgs, double_gyre_forcing, estimate_stats, l2_norm, make_closure, perturb_field, restrict, ClosureKind,
    ClosureSpec, Field, FilterSpec, GaussianFilter, Grid, Model, SgsSeries, SgsStats, StepperConfig, Trajectory,
};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

/// Stream index of the initial-condition noise; ensemble members use
/// streams `0..ensemble`.
pub const IC_STREAM: u64 = 1 << 32;

/// Slack factor of the closure ordering check.
pub const ORDERING_SLACK: f64 = 2.0;

/// Minimum ensemble for [`verify_theorem_i`].
pub const MIN_ENSEMBLE: usize = 8;

pub fn fine_model(cfg: &ExperimentConfig) -> LabResult<Model> {
    let grid = cfg.fine_grid()?;
    Ok(Model::new(
        cfg.params()?,
        double_gyre_forcing(grid, cfg.forcing_amplitude),
    )?)
}

/// Smoothed seeded noise scaled to `ic_amplitude`, then integrated for
/// `spin_up_time` if that is positive.
pub fn initial_condition(cfg: &ExperimentConfig) -> LabResult<Field> {
    let grid = cfg.fine_grid()?;
    let noise = white_noise_dirichlet(grid, &mut member_rng(cfg.seed, IC_STREAM));
    let smooth = GaussianFilter::new(grid, FilterSpec::new(cfg.ic_smoothing)?).apply(&noise)?;
    let norm = l2_norm(&smooth)?;
    let q0 = if norm > 0.0 {
        smooth.scaled(cfg.ic_amplitude / norm)
    } else {
        smooth
    };
    if cfg.spin_up_time == 0.0 {
        return Ok(q0);
    }
    let steps = StepperConfig::new(cfg.fine_dt, cfg.spin_up_time, usize::MAX)?.with_cfl_safety(cfg.cfl_safety);
    let traj = fine_model(cfg)?.run(&q0, None, &steps)?;
    Ok(traj.last().expect("final state is stored").clone())
}

/// Fine-grid run with its attractor time means.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub traj: Trajectory,
    pub mean_q: Field,
    pub mean_psi: Field,
}

impl ResolvedRun {
    pub fn from_trajectory(cfg: &ExperimentConfig, traj: Trajectory) -> LabResult<Self> {
        if *traj.grid() != cfg.fine_grid()? {
            return Err(LabError::Invalid(
                "resolved trajectory grid does not match the config".into(),
            ));
        }
        let mean_q = traj.time_mean(cfg.spin_up_fraction)?;
        let mean_psi = qgles_core::solve_poisson(&mean_q)?;
        Ok(Self { traj, mean_q, mean_psi })
    }

    pub fn q0(&self) -> &Field {
        &self.traj.snapshots()[0]
    }
}

pub fn run_resolved(cfg: &ExperimentConfig) -> LabResult<ResolvedRun> {
    let q0 = initial_condition(cfg)?;
    let traj = fine_model(cfg)?.run(&q0, None, &cfg.fine_stepper()?)?;
    ResolvedRun::from_trajectory(cfg, traj)
}

/// SGS stress of the resolved run at width `delta_cells · dx`, restricted to
/// the coarse grid.
pub fn diagnose(cfg: &ExperimentConfig, resolved: &ResolvedRun) -> LabResult<SgsSeries> {
    Ok(diagnose_sgs(&resolved.traj, cfg.delta()?, &cfg.coarse_grid()?)?)
}

pub fn stats(cfg: &ExperimentConfig, series: &SgsSeries) -> LabResult<SgsStats> {
    Ok(estimate_stats(series, cfg.spin_up_fraction)?)
}

/// Coarse LES model, its initial state `restrict(q̄0)` and stepper.
#[derive(Debug, Clone)]
pub struct LesSetup {
    pub model: Model,
    pub q0: Field,
    pub stepper: StepperConfig,
    filter: GaussianFilter,
    coarse: Grid,
}

impl LesSetup {
    pub fn new(cfg: &ExperimentConfig, q0_fine: &Field) -> LabResult<Self> {
        let fine = cfg.fine_grid()?;
        let coarse = cfg.coarse_grid()?;
        let filter = GaussianFilter::new(fine, FilterSpec::new(cfg.delta()?)?);
        let forcing = restrict(
            &filter.apply(&double_gyre_forcing(fine, cfg.forcing_amplitude))?,
            &coarse,
        )?;
        Ok(Self {
            model: Model::new(cfg.params()?, forcing)?,
            q0: restrict(&filter.apply(q0_fine)?, &coarse)?,
            stepper: cfg.coarse_stepper()?,
            filter,
            coarse,
        })
    }

    /// `restrict(q̄)` for a fine field.
    pub fn benchmark(&self, q: &Field) -> LabResult<Field> {
        Ok(restrict(&self.filter.apply(q)?, &self.coarse)?)
    }

    /// Runs one LES. `perturbed_replay` perturbs the initial state with the
    /// spec's seed; other kinds start from `restrict(q̄0)`.
    pub fn run(&self, cfg: &ExperimentConfig, spec: &ClosureSpec) -> LabResult<Trajectory> {
        let q0 = match spec.kind {
            ClosureKind::PerturbedReplay => perturb_field(&self.q0, cfg.perturbation, spec.seed)?,
            _ => self.q0.clone(),
        };
        let mut closure = make_closure(spec, &self.stepper)?;
        Ok(self.model.run(&q0, Some(&mut *closure), &self.stepper)?)
    }
}

pub fn closure_spec<'a>(
    kind: ClosureKind,
    series: &'a SgsSeries,
    stats: Option<&'a SgsStats>,
    seed: u64,
) -> LabResult<ClosureSpec<'a>> {
    Ok(match kind {
        ClosureKind::Null => ClosureSpec::null(),
        ClosureKind::Replay => ClosureSpec::replay(series),
        ClosureKind::PerturbedReplay => ClosureSpec::perturbed_replay(series, seed),
        ClosureKind::Ar1Matched => ClosureSpec::ar1_matched(
            stats.ok_or(LabError::MissingStage {
                stage: "stats",
                path: "SGS statistics".into(),
            })?,
            seed,
        ),
    })
}

/// Time mean of an LES run and its streamfunction on the coarse grid.
pub fn les_means(cfg: &ExperimentConfig, traj: &Trajectory) -> LabResult<(Field, Field)> {
    let q = traj.time_mean(cfg.spin_up_fraction)?;
    let psi = qgles_core::solve_poisson(&q)?;
    Ok((q, psi))
}

#[derive(Debug, Clone)]
pub struct TriptychReport {
    /// Filtered, restricted resolved means.
    pub resolved_q: Field,
    pub resolved_psi: Field,
    /// LES with `σ = 0`.
    pub null_q: Field,
    pub null_psi: Field,
    /// LES with replayed `R` from a perturbed start.
    pub stoch_q: Field,
    pub stoch_psi: Field,
    pub e_null: f64,
    pub e_stoch: f64,
    pub e_null_q: f64,
    pub e_stoch_q: f64,
}

/// Attractor time means of the resolved run, the null-closure LES and the
/// perturbed-replay LES, with their streamfunction and vorticity errors.
pub fn run_triptych(cfg: &ExperimentConfig, resolved: &ResolvedRun, series: &SgsSeries) -> LabResult<TriptychReport> {
    let setup = LesSetup::new(cfg, resolved.q0())?;
    let seed = member_seed(cfg.seed, 0);
    let runs: Vec<LabResult<Trajectory>> = [ClosureSpec::null(), ClosureSpec::perturbed_replay(series, seed)]
        .par_iter()
        .map(|spec| setup.run(cfg, spec))
        .collect();
    let mut runs = runs.into_iter();
    let (null_q, null_psi) = les_means(cfg, &runs.next().expect("two runs")?)?;
    let (stoch_q, stoch_psi) = les_means(cfg, &runs.next().expect("two runs")?)?;
    let resolved_q = setup.benchmark(&resolved.mean_q)?;
    let resolved_psi = setup.benchmark(&resolved.mean_psi)?;
    let dist = |a: &Field, b: &Field| l2_norm(&(a - b));
    Ok(TriptychReport {
        e_null: dist(&resolved_psi, &null_psi)?,
        e_stoch: dist(&resolved_psi, &stoch_psi)?,
        e_null_q: dist(&resolved_q, &null_q)?,
        e_stoch_q: dist(&resolved_q, &stoch_q)?,
        resolved_q,
        resolved_psi,
        null_q,
        null_psi,
        stoch_q,
        stoch_psi,
    })
}

/// One ensemble member of one closure.
#[derive(Debug, Clone)]
struct MemberOutcome {
    seed: u64,
    lhs: Vec<f64>,
    rhs: f64,
    sigma_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureRow {
    pub kind: ClosureKind,
    /// Distinct runs behind the ensemble mean (1 for deterministic closures).
    pub runs: usize,
    /// Ensemble mean of `‖q̄ − Q‖²` at each stored time.
    pub lhs: Vec<f64>,
    /// Ensemble mean of `∫‖R − σ‖² dt`.
    pub rhs: f64,
    pub sup_lhs: f64,
    /// `sup_lhs / rhs` (infinite when `rhs = 0`).
    pub ratio: f64,
    /// Largest `∫‖σ‖² dt` over members.
    pub sigma_sq_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremOneReport {
    pub times: Vec<f64>,
    pub rows: Vec<ClosureRow>,
    /// `M(T)` of the integrability condition.
    pub sigma_bound: f64,
    pub slack: f64,
}

impl TheoremOneReport {
    pub fn row(&self, kind: ClosureKind) -> Option<&ClosureRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }

    /// Rows ordered by increasing `rhs`.
    pub fn by_rhs(&self) -> Vec<&ClosureRow> {
        let mut rows: Vec<&ClosureRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.rhs.total_cmp(&b.rhs).then(a.kind.cmp(&b.kind)));
        rows
    }

    /// Pairs `(a, b)` with `rhs_a < rhs_b` but `sup_lhs_a > slack · sup_lhs_b`.
    pub fn ordering_violations(&self) -> Vec<(ClosureKind, ClosureKind)> {
        let rows = self.by_rhs();
        let mut out = Vec::new();
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                if a.rhs < b.rhs && a.sup_lhs > self.slack * b.sup_lhs {
                    out.push((a.kind, b.kind));
                }
            }
        }
        out
    }

    /// Closures whose members all satisfy `∫‖σ‖² ≤ M(T)`.
    pub fn integrable(&self, kind: ClosureKind) -> bool {
        self.row(kind).is_some_and(|r| r.sigma_sq_max <= self.sigma_bound)
    }
}

fn member_outcome(
    setup: &LesSetup,
    cfg: &ExperimentConfig,
    spec: &ClosureSpec,
    series: &SgsSeries,
    bench: &[Field],
) -> LabResult<MemberOutcome> {
    let traj = setup.run(cfg, spec)?;
    if traj.len() != bench.len() {
        return Err(LabError::Invalid(
            "LES and resolved snapshot times do not line up".into(),
        ));
    }
    let lhs = traj
        .snapshots()
        .iter()
        .zip(bench)
        .map(|(q, b)| (b - q).norm_sq())
        .collect();
    let sigma = SgsSeries::from_parts(
        *series.grid(),
        series.delta(),
        traj.times().to_vec(),
        traj.closure_forcing().to_vec(),
    )?;
    Ok(MemberOutcome {
        seed: spec.seed,
        lhs,
        rhs: closure_mismatch(series, &sigma)?,
        sigma_sq: sigma.integral_norm_sq(),
    })
}

fn reduce(kind: ClosureKind, mut members: Vec<MemberOutcome>, ensemble: usize) -> ClosureRow {
    members.sort_by_key(|m| m.seed);
    let runs = members.len();
    let n = members.len() as f64;
    let len = members[0].lhs.len();
    let mut lhs = vec![0.0; len];
    let mut rhs = 0.0;
    for m in &members {
        for (acc, v) in lhs.iter_mut().zip(&m.lhs) {
            *acc += v;
        }
        rhs += m.rhs;
    }
    lhs.iter_mut().for_each(|v| *v /= n);
    rhs /= n;
    let sup_lhs = lhs.iter().copied().fold(0.0, f64::max);
    ClosureRow {
        kind,
        runs: if kind.is_random() { runs } else { runs.min(ensemble) },
        ratio: if rhs > 0.0 { sup_lhs / rhs } else { f64::INFINITY },
        sigma_sq_max: members.iter().map(|m| m.sigma_sq).fold(0.0, f64::max),
        lhs,
        rhs,
        sup_lhs,
    }
}

/// Ensemble estimate of both sides of the stochastic approximation bound for every
/// closure in `cfg.closures`. Deterministic closures run once.
pub fn verify_theorem_i(
    cfg: &ExperimentConfig,
    resolved: &ResolvedRun,
    series: &SgsSeries,
    stats: &SgsStats,
) -> LabResult<TheoremOneReport> {
    if cfg.ensemble < MIN_ENSEMBLE {
        return Err(LabError::Invalid(format!(
            "ensemble of {} is too small for the closure ordering check (need at least {MIN_ENSEMBLE})",
            cfg.ensemble
        )));
    }
    let setup = LesSetup::new(cfg, resolved.q0())?;
    let bench = resolved
        .traj
        .snapshots()
        .iter()
        .map(|q| setup.benchmark(q))
        .collect::<LabResult<Vec<Field>>>()?;

    let mut jobs = Vec::new();
    for &kind in &cfg.closures {
        let members = if kind.is_random() { cfg.ensemble } else { 1 };
        for m in 0..members {
            jobs.push((kind, member_seed(cfg.seed, m as u64)));
        }
    }
    let outcomes = jobs
        .par_iter()
        .map(|&(kind, seed)| {
            let spec = closure_spec(kind, series, Some(stats), seed)?;
            member_outcome(&setup, cfg, &spec, series, &bench)
        })
        .collect::<LabResult<Vec<MemberOutcome>>>()?;

    let mut rows = Vec::new();
    for &kind in &cfg.closures {
        let members: Vec<MemberOutcome> = jobs
            .iter()
            .zip(&outcomes)
            .filter(|((k, _), _)| *k == kind)
            .map(|(_, o)| o.clone())
            .collect();
        rows.push(reduce(kind, members, cfg.ensemble));
    }
    Ok(TheoremOneReport {
        times: resolved.traj.times().to_vec(),
        rows,
        sigma_bound: cfg.sigma_bound_factor * cfg.t_end * stats.expected_norm_sq(),
        slack: ORDERING_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReplayReport {
    pub times: Vec<f64>,
    /// `‖q̄ − Q‖²` per stored time.
    pub lhs: Vec<f64>,
    /// `‖q̄ − Q‖ / ‖q̄‖` per stored time.
    pub rel_err: Vec<f64>,
}

impl ExactReplayReport {
    pub fn sup_rel_err(&self) -> f64 {
        self.rel_err.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_lhs(&self) -> f64 {
        self.lhs.iter().copied().fold(0.0, f64::max)
    }
}

/// Same-grid LES fed the SGS stress of the resolved state at every stage,
/// started from `q̄0`, compared with the filtered resolved run up to
/// `replay_check_t`. The mismatch `R − σ` is zero by construction.
pub fn exact_replay(cfg: &ExperimentConfig, q0: &Field) -> LabResult<ExactReplayReport> {
    let fine = cfg.fine_grid()?;
    let truth = fine_model(cfg)?;
    let diagnoser = SgsDiagnoser::new(fine, cfg.delta()?)?;
    let les = Model::new(cfg.params()?, diagnoser.filter().apply(truth.forcing())?)?;
    let stepper = StepperConfig::new(cfg.fine_dt, cfg.replay_check_t, cfg.store_every)?;
    let out = run_exact_replay(&truth, &les, &diagnoser, q0, &stepper)?;
    let mut lhs = Vec::new();
    let mut rel_err = Vec::new();
    for (b, q) in out.benchmark.snapshots().iter().zip(out.les.snapshots()) {
        let d = l2_norm(&(b - q))?;
        let n = l2_norm(b)?;
        lhs.push(d * d);
        rel_err.push(if n > 0.0 { d / n } else { d });
    }
    Ok(ExactReplayReport {
        times: out.benchmark.times().to_vec(),
        lhs,
        rel_err,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta_cells: f64,
    pub delta: f64,
    /// `∫‖σ‖² dt` with `σ = R_δ`.
    pub sigma_sq_int: f64,
    /// `‖q − Q‖²` per stored time.
    pub err: Vec<f64>,
    pub sup_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremTwoReport {
    pub times: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl TheoremTwoReport {
    /// Both columns strictly decrease down the (decreasing-δ) list.
    pub fn monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sigma_sq_int < w[0].sigma_sq_int && w[1].sup_err < w[0].sup_err)
    }
}

pub fn validate_sweep(deltas: &[f64]) -> LabResult<()> {
    if deltas.is_empty() {
        return Err(LabError::Invalid("delta sweep is empty".into()));
    }
    if deltas.iter().any(|&d| !(d >= 1.0) || !d.is_finite()) {
        return Err(LabError::Invalid(
            "every sweep width must be at least one fine grid spacing".into(),
        ));
    }
    if deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::Invalid("delta sweep must be strictly decreasing".into()));
    }
    Ok(())
}

/// Fine-grid LES with `σ = R_δ` replayed from the resolved run, for each
/// width in `deltas_cells` (in fine spacings), against the unfiltered
/// solution.
pub fn verify_theorem_ii(
    cfg: &ExperimentConfig,
    resolved: &ResolvedRun,
    deltas_cells: &[f64],
) -> LabResult<TheoremTwoReport> {
    validate_sweep(deltas_cells)?;
    let fine = cfg.fine_grid()?;
    let truth = fine_model(cfg)?;
    let stepper = cfg.fine_stepper()?;
    let rows = deltas_cells
        .par_iter()
        .map(|&cells| {
            let delta = cells * fine.dx();
            let series = diagnose_sgs(&resolved.traj, delta, &fine)?;
            let filter = GaussianFilter::new(fine, FilterSpec::new(delta)?);
            let les = Model::new(cfg.params()?, filter.apply(truth.forcing())?)?;
            let mut closure = make_closure(&ClosureSpec::replay(&series), &stepper)?;
            let traj = les.run(&filter.apply(resolved.q0())?, Some(&mut *closure), &stepper)?;
            let err: Vec<f64> = resolved
                .traj
                .snapshots()
                .iter()
                .zip(traj.snapshots())
                .map(|(q, big_q)| (q - big_q).norm_sq())
                .collect();
            Ok(SweepRow {
                delta_cells: cells,
                delta,
                sigma_sq_int: series.integral_norm_sq(),
                sup_err: err.iter().copied().fold(0.0, f64::max),
                err,
            })
        })
        .collect::<LabResult<Vec<SweepRow>>>()?;
    Ok(TheoremTwoReport {
        times: resolved.traj.times().to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig::parse(
            "fine_nx = 33\nfine_ny = 33\nnu = 1e-3\nr = 0.5\nforcing_amplitude = 10\nic_amplitude = 5\n\
             fine_dt = 0.005\ncoarse_dt = 0.02\nt_end = 0.4\nstore_every = 4\nensemble = 8\nreplay_check_t = 0.1\n",
        )
        .unwrap()
    }

    #[test]
    fn zero_forcing_and_ic_give_zero_means() {
        let mut cfg = tiny();
        cfg.forcing_amplitude = 0.0;
        cfg.ic_amplitude = 0.0;
        let run = run_resolved(&cfg).unwrap();
        assert_eq!(run.mean_q.max_abs(), 0.0);
        assert_eq!(run.mean_psi.max_abs(), 0.0);
    }

    #[test]
    fn initial_condition_has_requested_norm() {
        let cfg = tiny();
        let q0 = initial_condition(&cfg).unwrap();
        assert!((l2_norm(&q0).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(q0, initial_condition(&cfg).unwrap());
    }

    #[test]
    fn les_and_resolved_store_the_same_times() {
        let cfg = tiny();
        let run = run_resolved(&cfg).unwrap();
        let series = diagnose(&cfg, &run).unwrap();
        let setup = LesSetup::new(&cfg, run.q0()).unwrap();
        let traj = setup.run(&cfg, &ClosureSpec::replay(&series)).unwrap();
        assert_eq!(traj.len(), run.traj.len());
        for (a, b) in traj.times().iter().zip(run.traj.times()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert_eq!(traj.closure_forcing()[3], series.fields()[3]);
    }

    #[test]
    fn theorem_i_report_shape_and_null_rhs() {
        let cfg = tiny();
        let run = run_resolved(&cfg).unwrap();
        let series = diagnose(&cfg, &run).unwrap();
        let st = stats(&cfg, &series).unwrap();
        let report = verify_theorem_i(&cfg, &run, &series, &st).unwrap();
        assert_eq!(report.rows.len(), 3);
        let null = report.row(ClosureKind::Null).unwrap();
        assert_eq!(null.runs, 1);
        assert!((null.rhs - series.integral_norm_sq()).abs() <= 1e-12 * null.rhs);
        let pr = report.row(ClosureKind::PerturbedReplay).unwrap();
        assert_eq!(pr.runs, 8);
        assert_eq!(pr.rhs, 0.0);
        assert!(pr.lhs[0] > 0.0);
        assert!(report.integrable(ClosureKind::Ar1Matched));
        for r in &report.rows {
            assert!(r.lhs.iter().all(|v| v.is_finite() && *v >= 0.0));
        }

        let mut small = cfg.clone();
        small.ensemble = 4;
        assert!(verify_theorem_i(&small, &run, &series, &st).is_err());
    }

    #[test]
    fn ensemble_mean_is_independent_of_member_order() {
        let mk = |seed, v: f64| MemberOutcome {
            seed,
            lhs: vec![v, 2.0 * v],
            rhs: v / 3.0,
            sigma_sq: v,
        };
        let a = vec![mk(5, 0.1), mk(2, 0.7), mk(9, 1e-9)];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(
            reduce(ClosureKind::Ar1Matched, a, 3),
            reduce(ClosureKind::Ar1Matched, b, 3)
        );
    }

    #[test]
    fn sweep_validation() {
        assert!(validate_sweep(&[8.0, 4.0, 2.0]).is_ok());
        assert!(validate_sweep(&[4.0]).is_ok());
        assert!(validate_sweep(&[4.0, 4.0]).is_err());
        assert!(validate_sweep(&[2.0, 4.0]).is_err());
        assert!(validate_sweep(&[0.5]).is_err());
        assert!(validate_sweep(&[]).is_err());
    }

    #[test]
    fn single_row_sweep_runs() {
        let cfg = tiny();
        let run = run_resolved(&cfg).unwrap();
        let report = verify_theorem_ii(&cfg, &run, &[4.0]).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.monotone());
        assert!(report.rows[0].sup_err > 0.0 && report.rows[0].sigma_sq_int > 0.0);
    }

    #[test]
    fn exact_replay_tracks_benchmark() {
        let cfg = tiny();
        let q0 = initial_condition(&cfg).unwrap();
        let report = exact_replay(&cfg, &q0).unwrap();
        assert!(report.sup_rel_err() <= 1e-10, "{}", report.sup_rel_err());
    }
}
