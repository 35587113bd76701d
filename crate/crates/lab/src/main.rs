use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qgles::format::{self, num, Manifest};
use qgles::harness::{self, ResolvedRun};
use qgles::{ExperimentConfig, LabError, LabResult};
use qgles_core::{Field, SgsSeries, SgsStats};

/// Stochastic LES laboratory for the beta-plane barotropic vorticity
/// equation.
#[derive(Debug, Parser)]
#[command(name = "qgles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (`key = value` lines); built-in defaults if absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Ensemble size, overriding the config.
    #[arg(long, global = true)]
    ensemble: Option<usize>,
    /// Reuse the `resolve` (and `diagnose`, `stats` if present) outputs of an
    /// earlier run with the same config and seed.
    #[arg(long, global = true)]
    from: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fine-grid run with time-mean fields.
    Resolve,
    /// SGS stress of the resolved run on the coarse grid.
    Diagnose,
    /// SGS statistics.
    Stats,
    /// Coarse LES for each configured closure.
    Les,
    /// Time means of resolved, null-closure and replay LES runs.
    Triptych,
    /// Stochastic approximation check over an ensemble.
    #[command(name = "verify-i")]
    VerifyI,
    /// Scale convergence sweep over filter widths.
    #[command(name = "verify-ii")]
    VerifyIi {
        /// Filter widths in fine grid spacings, overriding the config.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Resolve => "resolve",
            Command::Diagnose => "diagnose",
            Command::Stats => "stats",
            Command::Les => "les",
            Command::Triptych => "triptych",
            Command::VerifyI => "verify-i",
            Command::VerifyIi { .. } => "verify-ii",
        }
    }
}

/// Pipeline stages computed on demand, or loaded with `--from`.
struct Lab {
    cfg: ExperimentConfig,
    from: Option<PathBuf>,
    resolved: Option<ResolvedRun>,
    series: Option<SgsSeries>,
    stats: Option<SgsStats>,
}

impl Lab {
    fn check_source(&self, dir: &Path, stage: &'static str) -> LabResult<bool> {
        let manifest = dir.join(Manifest::FILE);
        if !manifest.exists() {
            return Ok(false);
        }
        let m = Manifest::read(dir)?;
        if m.get("config_hash") != Some(self.cfg.hash().as_str()) {
            return Err(LabError::format(
                &manifest,
                format!("stage `{stage}` was produced with a different config or seed"),
            ));
        }
        Ok(true)
    }

    fn resolved(&mut self) -> LabResult<&ResolvedRun> {
        if self.resolved.is_none() {
            let run = match &self.from {
                Some(from) => {
                    let dir = from.join("resolve");
                    if !self.check_source(&dir, "resolve")? {
                        return Err(LabError::MissingStage {
                            stage: "resolve",
                            path: dir.join(Manifest::FILE),
                        });
                    }
                    ResolvedRun::from_trajectory(&self.cfg, format::read_trajectory(&dir)?)?
                }
                None => harness::run_resolved(&self.cfg)?,
            };
            self.resolved = Some(run);
        }
        Ok(self.resolved.as_ref().expect("set above"))
    }

    fn series(&mut self) -> LabResult<&SgsSeries> {
        if self.series.is_none() {
            let loaded = match &self.from {
                Some(from) if self.check_source(&from.join("diagnose"), "diagnose")? => {
                    Some(format::read_series(&from.join("diagnose"))?)
                }
                _ => None,
            };
            let series = match loaded {
                Some(s) => s,
                None => {
                    let cfg = self.cfg.clone();
                    harness::diagnose(&cfg, self.resolved()?)?
                }
            };
            self.series = Some(series);
        }
        Ok(self.series.as_ref().expect("set above"))
    }

    fn stats(&mut self) -> LabResult<&SgsStats> {
        if self.stats.is_none() {
            let loaded = match &self.from {
                Some(from) if self.check_source(&from.join("stats"), "stats")? => {
                    Some(format::read_stats(&from.join("stats"))?)
                }
                _ => None,
            };
            let stats = match loaded {
                Some(s) => s,
                None => {
                    let cfg = self.cfg.clone();
                    harness::stats(&cfg, self.series()?)?
                }
            };
            self.stats = Some(stats);
        }
        Ok(self.stats.as_ref().expect("set above"))
    }
}

fn manifest(cfg: &ExperimentConfig, command: &str) -> Manifest {
    Manifest::new()
        .with("command", command)
        .with("config_hash", cfg.hash())
        .with("seed", cfg.seed)
}

fn write_means(dir: &Path, q: &Field, psi: &Field, prefix: &str) -> LabResult<()> {
    format::write_field(&dir.join(format!("{prefix}mean_q.qgf")), q, 0.0)?;
    format::write_field(&dir.join(format!("{prefix}mean_psi.qgf")), psi, 0.0)
}

fn run(cli: Cli) -> LabResult<String> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.ensemble {
        cfg.ensemble = n;
    }
    if let Command::VerifyIi { deltas: Some(d) } = &cli.command {
        cfg.delta_sweep = d.clone();
    }
    cfg.validate()?;

    let out = cli.out.clone();
    format::create_dir(&out)?;
    format::write_bytes(&out.join("config.txt"), cfg.to_text().as_bytes())?;
    let command = cli.command.name();
    let m = manifest(&cfg, command);
    let mut lab = Lab {
        cfg: cfg.clone(),
        from: cli.from.clone(),
        resolved: None,
        series: None,
        stats: None,
    };

    match &cli.command {
        Command::Resolve => {
            let run = lab.resolved()?;
            let dir = out.join("resolve");
            format::write_trajectory(&dir, &run.traj, m)?;
            write_means(&dir, &run.mean_q, &run.mean_psi, "")?;
            let last = run.traj.diagnostics().last().map(|d| d.enstrophy).unwrap_or(0.0);
            Ok(format!(
                "resolve: {} snapshots, final enstrophy {}",
                run.traj.len(),
                num(last)
            ))
        }
        Command::Diagnose => {
            let series = lab.series()?;
            let dir = out.join("diagnose");
            format::write_series(&dir, series, m)?;
            let rows: Vec<Vec<String>> = series
                .times()
                .iter()
                .zip(series.fields())
                .map(|(t, r)| vec![num(*t), num(r.norm_sq())])
                .collect();
            format::write_csv(&dir.join("norms.csv"), &["t", "r_norm_sq"], &rows)?;
            Ok(format!(
                "diagnose: {} SGS snapshots, integral {}",
                series.len(),
                num(series.integral_norm_sq())
            ))
        }
        Command::Stats => {
            let stats = lab.stats()?;
            format::write_stats(&out.join("stats"), stats, m)?;
            let (mean, std) = stats.basin_mean_abs_mean_and_std();
            Ok(format!(
                "stats: tau {}, basin |mean| {}, basin std {}",
                num(stats.tau),
                num(mean),
                num(std)
            ))
        }
        Command::Les => {
            lab.stats()?;
            let (resolved, series, stats) = (
                lab.resolved.as_ref().expect("loaded"),
                lab.series.as_ref().expect("loaded"),
                lab.stats.as_ref(),
            );
            let setup = harness::LesSetup::new(&cfg, resolved.q0())?;
            let bench_psi = setup.benchmark(&resolved.mean_psi)?;
            let mut rows = Vec::new();
            for &kind in &cfg.closures {
                let seed = qgles_core::rng::member_seed(cfg.seed, 0);
                let spec = harness::closure_spec(kind, series, stats, seed)?;
                let traj = setup.run(&cfg, &spec)?;
                let dir = out.join("les").join(kind.name());
                format::write_trajectory(&dir, &traj, m.clone().with("closure", kind.name()))?;
                let (q, psi) = harness::les_means(&cfg, &traj)?;
                write_means(&dir, &q, &psi, "")?;
                let e = qgles_core::l2_norm(&(&bench_psi - &psi))?;
                rows.push(vec![kind.name().to_string(), num(e)]);
            }
            format::write_csv(&out.join("les").join("summary.csv"), &["closure", "e_psi"], &rows)?;
            Ok(format!("les: {} closures", rows.len()))
        }
        Command::Triptych => {
            lab.series()?;
            let report = harness::run_triptych(
                &cfg,
                lab.resolved.as_ref().expect("loaded"),
                lab.series.as_ref().expect("loaded"),
            )?;
            let dir = out.join("triptych");
            format::create_dir(&dir)?;
            write_means(&dir, &report.resolved_q, &report.resolved_psi, "resolved_")?;
            write_means(&dir, &report.null_q, &report.null_psi, "null_")?;
            write_means(&dir, &report.stoch_q, &report.stoch_psi, "stoch_")?;
            format::write_csv(
                &dir.join("triptych.csv"),
                &["quantity", "e_null", "e_stoch"],
                &[
                    vec!["psi".into(), num(report.e_null), num(report.e_stoch)],
                    vec!["q".into(), num(report.e_null_q), num(report.e_stoch_q)],
                ],
            )?;
            m.write(&dir)?;
            Ok(format!(
                "triptych: e_null {}, e_stoch {}",
                num(report.e_null),
                num(report.e_stoch)
            ))
        }
        Command::VerifyI => {
            lab.stats()?;
            let resolved = lab.resolved.as_ref().expect("loaded");
            let report = harness::verify_theorem_i(
                &cfg,
                resolved,
                lab.series.as_ref().expect("loaded"),
                lab.stats.as_ref().expect("loaded"),
            )?;
            let exact = harness::exact_replay(&cfg, resolved.q0())?;
            let dir = out.join("verify_i");
            format::create_dir(&dir)?;
            let rows: Vec<Vec<String>> = report
                .by_rhs()
                .iter()
                .map(|r| {
                    vec![
                        r.kind.name().to_string(),
                        r.runs.to_string(),
                        num(r.rhs),
                        num(r.sup_lhs),
                        num(r.ratio),
                        num(r.sigma_sq_max),
                        num(report.sigma_bound),
                        report.integrable(r.kind).to_string(),
                    ]
                })
                .collect();
            format::write_csv(
                &dir.join("summary.csv"),
                &[
                    "closure",
                    "runs",
                    "rhs",
                    "sup_lhs",
                    "ratio",
                    "sigma_sq_max",
                    "sigma_bound",
                    "integrable",
                ],
                &rows,
            )?;
            let mut header = vec!["t".to_string()];
            header.extend(report.rows.iter().map(|r| r.kind.name().to_string()));
            let rows: Vec<Vec<String>> = report
                .times
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let mut row = vec![num(*t)];
                    row.extend(report.rows.iter().map(|r| num(r.lhs[k])));
                    row
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            format::write_csv(&dir.join("lhs.csv"), &header, &rows)?;
            let violations = report.ordering_violations();
            let rows: Vec<Vec<String>> = violations
                .iter()
                .map(|(a, b)| vec![a.name().to_string(), b.name().to_string()])
                .collect();
            format::write_csv(&dir.join("violations.csv"), &["smaller_rhs", "larger_rhs"], &rows)?;
            let rows: Vec<Vec<String>> = exact
                .times
                .iter()
                .zip(exact.lhs.iter().zip(&exact.rel_err))
                .map(|(t, (l, e))| vec![num(*t), num(*l), num(*e)])
                .collect();
            format::write_csv(&dir.join("exact_replay.csv"), &["t", "lhs", "rel_err"], &rows)?;
            m.write(&dir)?;
            Ok(format!(
                "verify-i: {} ordering violations, exact replay sup relative error {}",
                violations.len(),
                num(exact.sup_rel_err())
            ))
        }
        Command::VerifyIi { .. } => {
            let report = harness::verify_theorem_ii(&cfg, lab.resolved()?, &cfg.delta_sweep)?;
            let dir = out.join("verify_ii");
            format::create_dir(&dir)?;
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| vec![num(r.delta_cells), num(r.delta), num(r.sigma_sq_int), num(r.sup_err)])
                .collect();
            format::write_csv(
                &dir.join("sweep.csv"),
                &["delta_cells", "delta", "sigma_sq_int", "sup_err"],
                &rows,
            )?;
            let mut header = vec!["t".to_string()];
            header.extend(report.rows.iter().map(|r| format!("err_delta_{}", r.delta_cells)));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<String>> = report
                .times
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let mut row = vec![num(*t)];
                    row.extend(report.rows.iter().map(|r| num(r.err[k])));
                    row
                })
                .collect();
            format::write_csv(&dir.join("errors.csv"), &header, &rows)?;
            m.write(&dir)?;
            Ok(format!(
                "verify-ii: {} rows, monotone {}",
                report.rows.len(),
                report.monotone()
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}
