//! Implementations behind the `rodwheel` command-line front end.
//!
//! Exit-code contract (stable for scripting): 0 on a completed horizon,
//! 1 on usage/configuration/solver errors, 2 when the run ends in a fall.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::control::{ControlLaw, ControllerSpec, Gains};
use crate::eom;
use crate::lagrangian::{lagrangian, GenVel};
use crate::oracle::{self, FdConfig};
use crate::scenario::{load_scenario, write_trajectory_csv, LoadedScenario, ScenarioError};
use crate::sim::{audit_constraints, audit_energy, simulate, SimError, Trajectory};

/// Seed for the audit's random-state sweep; fixed so reports are
/// reproducible run to run.
const AUDIT_SEED: u64 = 0x0d15ea5e;
/// Oracle agreement tolerance (assembly and closed form).
pub const AUDIT_ORACLE_TOL: f64 = 1e-6;
/// Acceleration-level constraint residual bound.
pub const AUDIT_CONSTRAINT_TOL: f64 = 1e-8;

/// Energy-drift bound for a second-order scheme, scaled to the step size:
/// `100·dt²` (1e-4 at dt = 1e-3).
pub fn drift_tolerance(dt: f64) -> f64 {
    100.0 * dt * dt
}

/// Work-balance bound, scaled like the drift: `10³·dt²·max(|E₀|, 1)`.
pub fn balance_tolerance(dt: f64, e0: f64) -> f64 {
    1e3 * dt * dt * e0.abs().max(1.0)
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

fn apply_overrides(loaded: &mut LoadedScenario, ov: &SimulateOverrides) -> Result<(), CliError> {
    if let Some(dt) = ov.dt {
        loaded.scenario.dt = dt;
    }
    if let Some(duration) = ov.duration {
        loaded.scenario.duration = duration;
    }
    if let Some(stride) = ov.stride {
        if stride == 0 {
            return Err(CliError::Usage("--stride must be at least 1".into()));
        }
        loaded.sample_stride = stride;
    }
    if let Some(kind) = &ov.controller {
        loaded.scenario.controller = match kind.as_str() {
            "none" => ControllerSpec::none(),
            "case1" => ControllerSpec::case1(),
            "case2" => ControllerSpec::case2(),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown controller '{other}' (expected none|case1|case2)"
                )))
            }
        };
    }
    if let Some(out) = &ov.out {
        loaded.output_path = Some(out.clone());
    }
    Ok(())
}

/// Flag overrides for `rodwheel simulate`.
#[derive(Debug, Default, Clone)]
pub struct SimulateOverrides {
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub controller: Option<String>,
    pub out: Option<PathBuf>,
    pub stride: Option<usize>,
}

/// Result summary of a simulate run.
#[derive(Debug)]
pub struct SimulateReport {
    pub trajectory: Trajectory,
    pub csv_path: PathBuf,
    pub rows_written: usize,
}

impl SimulateReport {
    pub fn fell(&self) -> bool {
        self.trajectory.fall.is_some()
    }
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.trajectory.samples.last().unwrap();
        writeln!(
            f,
            "wrote {} rows to {}",
            self.rows_written,
            self.csv_path.display()
        )?;
        write!(f, "final t = {:.3} s, state = [", last.t)?;
        for (i, v) in last.state.to_array().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6}")?;
        }
        write!(f, "], E = {:.6} J", last.energy)?;
        if let Some(fall) = &self.trajectory.fall {
            write!(f, "\nFALL at t = {:.3} s ({:?})", fall.t, fall.reason)?;
        }
        Ok(())
    }
}

/// Run a scenario file and export the trajectory CSV.
pub fn cmd_simulate(path: &Path, ov: &SimulateOverrides) -> Result<SimulateReport, CliError> {
    let mut loaded = load_scenario(path)?;
    apply_overrides(&mut loaded, ov)?;

    let trajectory = simulate(&loaded.scenario)?;

    let csv_path = loaded.output_path.clone().unwrap_or_else(|| {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trajectory".into());
        PathBuf::from(format!("{stem}.csv"))
    });
    let file = File::create(&csv_path).map_err(|source| CliError::Output {
        path: csv_path.clone(),
        source,
    })?;
    let mut writer = BufWriter::new(file);
    let rows_written = write_trajectory_csv(&trajectory, loaded.sample_stride, &mut writer)
        .map_err(|source| CliError::Output {
            path: csv_path.clone(),
            source,
        })?;

    Ok(SimulateReport {
        trajectory,
        csv_path,
        rows_written,
    })
}

/// One line of the audit report.
#[derive(Debug, Clone)]
pub struct AuditCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Outcome of `rodwheel audit`.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
    pub fell: bool,
}

impl AuditReport {
    fn push(&mut self, name: &'static str, value: f64, bound: f64) {
        self.checks.push(AuditCheck {
            name,
            value,
            bound,
            passed: value <= bound,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>12.3e}  (bound {:>9.3e})  {}",
                c.name,
                c.value,
                c.bound,
                if c.passed { "ok" } else { "FAIL" }
            )?;
        }
        if self.fell {
            writeln!(f, "note: run ended in a fall; audits cover the samples before it")?;
        }
        write!(
            f,
            "audit: {}",
            if self.passed() { "all checks passed" } else { "FAILED" }
        )
    }
}

/// Cross-check the engine against the oracle at the scenario's initial
/// state and `n` seeded random states, then run the trajectory audits.
pub fn cmd_audit(path: &Path) -> Result<AuditReport, CliError> {
    let loaded = load_scenario(path)?;
    let sc = &loaded.scenario;
    let params = sc.params;
    let cfg = FdConfig::default();
    let mut report = AuditReport::default();

    if loaded.audits.oracle {
        let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED);
        let mut worst_assembly = 0.0f64;
        let mut worst_closed_form = 0.0f64;

        let x0 = sc.x0;
        let q0 = x0.gen_pos();
        let mut cases = vec![(q0, x0.rates())];
        for _ in 0..100 {
            let x = oracle::sample_state(&mut rng, 1.2);
            cases.push((x.gen_pos(), x.rates()));
        }

        for (q, rates) in &cases {
            let (mo, bo) = oracle::fd_mass_and_rhs(q, rates, &params, &cfg);
            let me = eom::mass_matrix(q, &params);
            let be = eom::rhs_vector(q, rates, &params);
            for i in 0..8 {
                for j in 0..8 {
                    worst_assembly = worst_assembly.max(oracle::rel_diff(mo[i][j], me[i][j]));
                }
                worst_assembly = worst_assembly.max(oracle::rel_diff(bo[i], be[i]));
            }

            let (dc1, dc2) =
                eom::constrained_velocities(q, [rates[0], rates[1], rates[2]], &params);
            let dq = GenVel::new(dc1, dc2, rates[0], rates[1], rates[2], rates[3]);
            let engine_l = lagrangian(q, &dq, &params);
            let oracle_l =
                oracle::closed_form_lagrangian(q, &dq, &params, params.legacy_potential);
            worst_closed_form = worst_closed_form.max(oracle::rel_diff(engine_l, oracle_l));
        }

        report.push("oracle assembly agreement", worst_assembly, AUDIT_ORACLE_TOL);
        report.push("closed-form agreement", worst_closed_form, 1e-10);
    }

    let mut traj = simulate(sc)?;
    report.fell = traj.fall.is_some();
    if report.fell && traj.samples.len() > 1 {
        // The terminal fall sample sits outside the validity domain; the
        // audits cover the run up to it.
        traj.samples.pop();
    }

    if loaded.audits.energy {
        let audit = audit_energy(&traj);
        if matches!(sc.controller.law, ControlLaw::None) {
            // Conservation is only an invariant without motor input; with a
            // controller the work-balance residual is the energy check.
            report.push("energy drift (relative)", audit.max_rel_drift, drift_tolerance(sc.dt));
        }
        report.push(
            "work-balance residual",
            audit.work_residual,
            balance_tolerance(sc.dt, traj.samples[0].energy),
        );
    }
    if loaded.audits.constraints {
        report.push(
            "constraint residual",
            audit_constraints(&traj),
            AUDIT_CONSTRAINT_TOL,
        );
    }

    Ok(report)
}

/// Parameters `rodwheel sweep` can vary.
pub const SWEEP_PARAMS: [&str; 6] = ["theta0", "dt", "v_ref", "k_p", "k_d", "k_theta"];

/// Per-value summary row of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub value: f64,
    pub fell: bool,
    pub t_fall: Option<f64>,
    pub final_dphi: f64,
    pub max_abs_theta: f64,
}

impl fmt::Display for SweepRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t_fall = match self.t_fall {
            Some(t) => format!("{t:.3}"),
            None => "-".into(),
        };
        write!(
            f,
            "{:>12.6}  {:>5}  {:>8}  {:>12.6}  {:>12.6e}",
            self.value, self.fell, t_fall, self.final_dphi, self.max_abs_theta
        )
    }
}

pub const SWEEP_HEADER: &str =
    "       value   fell    t_fall    final_dphi     max|theta|";

fn gains_of(law: ControlLaw) -> Gains {
    match law {
        ControlLaw::Custom(g) => g,
        ControlLaw::Case1 => Gains::CASE1,
        ControlLaw::Case2 => Gains::CASE2,
        ControlLaw::None => Gains {
            k_p: 0.0,
            k_d: 0.0,
            k_theta: 0.0,
            amplitude: 0.0,
            v_ref: 0.0,
        },
    }
}

/// Run one scenario per value of the swept parameter. Each run is isolated;
/// rows come back in input order.
pub fn cmd_sweep(path: &Path, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    if !SWEEP_PARAMS.contains(&param) {
        return Err(CliError::Usage(format!(
            "unknown sweep parameter '{param}' (expected one of {})",
            SWEEP_PARAMS.join("|")
        )));
    }
    let loaded = load_scenario(path)?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut sc = loaded.scenario;
        match param {
            "theta0" => sc.x0.theta = value,
            "dt" => sc.dt = value,
            _ => {
                let mut gains = gains_of(sc.controller.law);
                match param {
                    "v_ref" => gains.v_ref = value,
                    "k_p" => gains.k_p = value,
                    "k_d" => gains.k_d = value,
                    "k_theta" => gains.k_theta = value,
                    _ => unreachable!(),
                }
                sc.controller.law = ControlLaw::Custom(gains);
            }
        }
        let traj = simulate(&sc)?;
        rows.push(SweepRow {
            value,
            fell: traj.fall.is_some(),
            t_fall: traj.fall.map(|f| f.t),
            final_dphi: traj.final_state().dphi,
            max_abs_theta: traj.max_abs_theta(),
        });
    }
    Ok(rows)
}
