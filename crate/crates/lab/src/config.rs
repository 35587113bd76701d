//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is optional and falls
//! back to [`ExperimentConfig::default`]; unknown and repeated keys are
//! rejected. Lists are comma separated.

use std::fmt::Write as _;
use std::path::Path;

use qgles_core::{ClosureKind, Grid, PhysicalParams, StepperConfig};
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lx: f64,
    pub ly: f64,
    /// Fine-grid node counts, boundary included.
    pub fine_nx: usize,
    pub fine_ny: usize,
    /// Coarse grid spacing in units of the fine spacing.
    pub coarse_factor: usize,
    pub beta: f64,
    pub nu: f64,
    pub r: f64,
    pub forcing_amplitude: f64,
    /// `‖q0‖` of the smoothed random initial vorticity.
    pub ic_amplitude: f64,
    /// Gaussian width used to smooth the initial noise.
    pub ic_smoothing: f64,
    /// Resolved integration before `t = 0`; the end state becomes `q0`.
    pub spin_up_time: f64,
    pub fine_dt: f64,
    pub coarse_dt: f64,
    pub t_end: f64,
    /// Snapshot cadence in fine steps.
    pub store_every: usize,
    pub cfl_safety: f64,
    /// Filter width in fine grid spacings.
    pub delta_cells: f64,
    pub spin_up_fraction: f64,
    pub ensemble: usize,
    pub seed: u64,
    /// Relative initial-condition perturbation of `perturbed_replay`.
    pub perturbation: f64,
    pub closures: Vec<ClosureKind>,
    /// Filter widths of the scale-convergence sweep, in fine spacings.
    pub delta_sweep: Vec<f64>,
    /// `M(T) = sigma_bound_factor · T · E‖σ‖²` for the integrability check.
    pub sigma_bound_factor: f64,
    /// Horizon of the same-grid exact replay check.
    pub replay_check_t: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lx: 1.0,
            ly: 1.0,
            fine_nx: 257,
            fine_ny: 257,
            coarse_factor: 4,
            beta: 0.0,
            nu: 2e-4,
            r: 0.2,
            forcing_amplitude: 10.0,
            ic_amplitude: 8.0,
            ic_smoothing: 0.06,
            spin_up_time: 0.0,
            fine_dt: 5e-4,
            coarse_dt: 2e-3,
            t_end: 1.0,
            store_every: 8,
            cfl_safety: 0.5,
            delta_cells: 4.0,
            spin_up_fraction: 0.5,
            ensemble: 16,
            seed: 1,
            perturbation: 1e-4,
            closures: vec![ClosureKind::PerturbedReplay, ClosureKind::Ar1Matched, ClosureKind::Null],
            delta_sweep: vec![8.0, 4.0, 2.0],
            sigma_bound_factor: 4.0,
            replay_check_t: 0.1,
        }
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn fmt_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

macro_rules! config_keys {
    ($( $key:ident : $kind:ident ),* $(,)?) => {
        impl ExperimentConfig {
            /// Every accepted key, in canonical order.
            pub const KEYS: &'static [&'static str] = &[$(stringify!($key)),*];

            fn set(&mut self, key: &str, value: &str) -> Option<Result<(), ()>> {
                match key {
                    $(stringify!($key) => Some(config_keys!(@parse $kind, self.$key, value)),)*
                    _ => None,
                }
            }

            /// Canonical text form; parsing it gives back an equal config.
            pub fn to_text(&self) -> String {
                let mut out = String::new();
                $( let _ = writeln!(out, "{} = {}", stringify!($key), config_keys!(@fmt $kind, self.$key)); )*
                out
            }
        }
    };
    (@parse num, $field:expr, $v:expr) => {
        $v.parse().map(|x| $field = x).map_err(|_| ())
    };
    (@parse closures, $field:expr, $v:expr) => {
        parse_list($v, ClosureKind::from_name).map(|x| $field = x).ok_or(())
    };
    (@parse floats, $field:expr, $v:expr) => {
        parse_list($v, |s| s.parse().ok()).map(|x| $field = x).ok_or(())
    };
    (@fmt num, $field:expr) => { $field.to_string() };
    (@fmt closures, $field:expr) => { fmt_list(&$field, |k| k.name().to_string()) };
    (@fmt floats, $field:expr) => { fmt_list(&$field, |x| x.to_string()) };
}

config_keys! {
    lx: num,
    ly: num,
    fine_nx: num,
    fine_ny: num,
    coarse_factor: num,
    beta: num,
    nu: num,
    r: num,
    forcing_amplitude: num,
    ic_amplitude: num,
    ic_smoothing: num,
    spin_up_time: num,
    fine_dt: num,
    coarse_dt: num,
    t_end: num,
    store_every: num,
    cfl_safety: num,
    delta_cells: num,
    spin_up_fraction: num,
    ensemble: num,
    seed: num,
    perturbation: num,
    closures: closures,
    delta_sweep: floats,
    sigma_bound_factor: num,
    replay_check_t: num,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| LabError::Config { line: line_no, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(bad(format!("duplicate key `{key}`")));
            }
            match cfg.set(key, value) {
                None => return Err(bad(format!("unknown key `{key}`"))),
                Some(Err(())) => return Err(bad(format!("invalid value `{value}` for `{key}`"))),
                Some(Ok(())) => seen.push(key),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            LabError::Config { line, msg } => LabError::Config {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })
    }

    /// Hex SHA-256 of [`ExperimentConfig::to_text`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> LabResult<()> {
        let fail = |msg: &str| {
            Err(LabError::Config {
                line: 0,
                msg: msg.to_string(),
            })
        };
        let positive = [
            ("lx", self.lx),
            ("ly", self.ly),
            ("nu", self.nu),
            ("r", self.r),
            ("fine_dt", self.fine_dt),
            ("coarse_dt", self.coarse_dt),
            ("t_end", self.t_end),
            ("cfl_safety", self.cfl_safety),
            ("delta_cells", self.delta_cells),
            ("sigma_bound_factor", self.sigma_bound_factor),
            ("replay_check_t", self.replay_check_t),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return fail(&format!("`{name}` must be positive and finite"));
            }
        }
        for (name, v) in [
            ("ic_amplitude", self.ic_amplitude),
            ("ic_smoothing", self.ic_smoothing),
            ("spin_up_time", self.spin_up_time),
            ("perturbation", self.perturbation),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return fail(&format!("`{name}` must be non-negative and finite"));
            }
        }
        if !self.beta.is_finite() || !self.forcing_amplitude.is_finite() {
            return fail("`beta` and `forcing_amplitude` must be finite");
        }
        if !(0.0..1.0).contains(&self.spin_up_fraction) {
            return fail("`spin_up_fraction` must lie in [0, 1)");
        }
        if self.coarse_factor == 0 || self.store_every == 0 || self.ensemble == 0 {
            return fail("`coarse_factor`, `store_every` and `ensemble` must be at least 1");
        }
        for n in [self.fine_nx, self.fine_ny] {
            if n < 3 || (n - 1) % self.coarse_factor != 0 || (n - 1) / self.coarse_factor < 2 {
                return fail(
                    "fine grid cells must be a multiple of `coarse_factor` with a coarse grid of at least 3 nodes",
                );
            }
        }
        let ratio = self.time_ratio()?;
        if !self.store_every.is_multiple_of(ratio) {
            return fail("`store_every` must be a multiple of coarse_dt / fine_dt");
        }
        self.fine_stepper()?;
        self.coarse_stepper()?;
        if self.replay_check_t > self.t_end || StepperConfig::new(self.fine_dt, self.replay_check_t, 1).is_err() {
            return fail("`replay_check_t` must be a whole number of fine steps not beyond `t_end`");
        }
        if self.spin_up_time > 0.0 && StepperConfig::new(self.fine_dt, self.spin_up_time, 1).is_err() {
            return fail("`spin_up_time` must be a whole number of fine steps");
        }
        if self.closures.is_empty() {
            return fail("`closures` must name at least one closure");
        }
        PhysicalParams::new(self.beta, self.nu, self.r)?;
        Ok(())
    }

    /// Fine steps per coarse step.
    pub fn time_ratio(&self) -> LabResult<usize> {
        let ratio = self.coarse_dt / self.fine_dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio {
            return Err(LabError::Config {
                line: 0,
                msg: "`coarse_dt` must be a whole multiple of `fine_dt`".to_string(),
            });
        }
        Ok(rounded as usize)
    }

    pub fn fine_grid(&self) -> LabResult<Grid> {
        Ok(Grid::new(self.fine_nx, self.fine_ny, self.lx, self.ly)?)
    }

    pub fn coarse_grid(&self) -> LabResult<Grid> {
        Ok(self.fine_grid()?.coarsened(self.coarse_factor)?)
    }

    pub fn params(&self) -> LabResult<PhysicalParams> {
        Ok(PhysicalParams::new(self.beta, self.nu, self.r)?)
    }

    pub fn delta(&self) -> LabResult<f64> {
        Ok(self.delta_cells * self.fine_grid()?.dx())
    }

    pub fn fine_stepper(&self) -> LabResult<StepperConfig> {
        Ok(StepperConfig::new(self.fine_dt, self.t_end, self.store_every)?.with_cfl_safety(self.cfl_safety))
    }

    pub fn coarse_stepper(&self) -> LabResult<StepperConfig> {
        let every = self.store_every / self.time_ratio()?;
        Ok(StepperConfig::new(self.coarse_dt, self.t_end, every.max(1))?.with_cfl_safety(self.cfl_safety))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn parses_values_comments_and_lists() {
        let cfg = ExperimentConfig::parse(
            "# comment\n\nbeta = 0.5   # trailing\nclosures = null, replay\ndelta_sweep = 8, 4\nseed=7\n",
        )
        .unwrap();
        assert_eq!(cfg.beta, 0.5);
        assert_eq!(cfg.closures, vec![ClosureKind::Null, ClosureKind::Replay]);
        assert_eq!(cfg.delta_sweep, vec![8.0, 4.0]);
        assert_eq!(cfg.seed, 7);
        assert_ne!(cfg.hash(), ExperimentConfig::default().hash());
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let err = ExperimentConfig::parse("beta = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(err, LabError::Config { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("bogus"));
        assert!(ExperimentConfig::parse("seed = 1\nseed = 2\n").is_err());
        assert!(ExperimentConfig::parse("seed 1\n").is_err());
        assert!(ExperimentConfig::parse("seed = x\n").is_err());
        assert!(ExperimentConfig::parse("closures = null, bogus\n").is_err());
    }

    #[test]
    fn rejects_inconsistent_settings() {
        for text in [
            "nu = 0",
            "fine_nx = 250",
            "coarse_dt = 0.0007",
            "store_every = 6",
            "ensemble = 0",
            "spin_up_fraction = 1",
            "t_end = 0.10001",
            "replay_check_t = 2",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn derived_quantities() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.fine_grid().unwrap().nx(), 257);
        assert_eq!(cfg.coarse_grid().unwrap().nx(), 65);
        assert_eq!(cfg.time_ratio().unwrap(), 4);
        assert_eq!(cfg.coarse_stepper().unwrap().store_every, 2);
        assert!((cfg.delta().unwrap() - 4.0 / 256.0).abs() < 1e-15);
    }
}
