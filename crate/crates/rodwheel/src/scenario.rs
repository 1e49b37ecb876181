//! Scenario files and trajectory CSV interchange.
//!
//! Scenarios are TOML documents; missing parameters default to the reference
//! set `(m, g, r, μ, ℓ) = (5, 9.81, 1, 1, 2)`. Trajectories are exported as
//! CSV with a fixed column order and full-precision (round-trippable)
//! floating-point formatting, independent of locale.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::control::{ControlLaw, ControllerSpec, Gains};
use crate::eom::State;
use crate::kinematics::Params;
use crate::sim::{Sample, Scenario, Trajectory};

/// Exact header of every trajectory CSV.
pub const CSV_HEADER: &str = "t,c1,c2,phi,theta,psi,beta,dphi,dtheta,dpsi,dbeta,u,E,lambda1,lambda2";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawParams {
    m: Option<f64>,
    g: Option<f64>,
    r: Option<f64>,
    mu: Option<f64>,
    ell: Option<f64>,
    legacy_potential: Option<bool>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawController {
    kind: Option<String>,
    k_p: Option<f64>,
    k_d: Option<f64>,
    k_theta: Option<f64>,
    amplitude: Option<f64>,
    v_ref: Option<f64>,
    u_max: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    dt: Option<f64>,
    duration: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    sample_stride: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAudit {
    energy: Option<bool>,
    constraints: Option<bool>,
    oracle: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    initial_state: Vec<f64>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    controller: RawController,
    #[serde(default)]
    integration: RawIntegration,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    audit: RawAudit,
}

/// Which audits the `audit` subcommand runs for this scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditToggles {
    pub energy: bool,
    pub constraints: bool,
    pub oracle: bool,
}

impl Default for AuditToggles {
    fn default() -> Self {
        AuditToggles {
            energy: true,
            constraints: true,
            oracle: true,
        }
    }
}

/// A parsed scenario file: the simulation request plus export and audit
/// settings.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub output_path: Option<PathBuf>,
    pub sample_stride: usize,
    pub audits: AuditToggles,
}

fn controller_from_raw(raw: &RawController) -> Result<ControllerSpec, ScenarioError> {
    let kind = raw.kind.as_deref().unwrap_or("none");
    let law = match kind {
        "none" => ControlLaw::None,
        "case1" => ControlLaw::Case1,
        "case2" => ControlLaw::Case2,
        "custom" => ControlLaw::Custom(Gains {
            k_p: raw.k_p.unwrap_or(0.0),
            k_d: raw.k_d.unwrap_or(0.0),
            k_theta: raw.k_theta.unwrap_or(0.0),
            amplitude: raw.amplitude.unwrap_or(0.0),
            v_ref: raw.v_ref.unwrap_or(0.0),
        }),
        other => {
            return Err(ScenarioError::Invalid(format!(
                "unknown controller kind '{other}' (expected none|case1|case2|custom)"
            )))
        }
    };
    if !matches!(law, ControlLaw::Custom(_)) {
        for (name, value) in [
            ("k_p", raw.k_p),
            ("k_d", raw.k_d),
            ("k_theta", raw.k_theta),
            ("amplitude", raw.amplitude),
            ("v_ref", raw.v_ref),
        ] {
            if value.is_some() {
                return Err(ScenarioError::Invalid(format!(
                    "gain '{name}' only applies to controller kind 'custom'"
                )));
            }
        }
    }
    Ok(ControllerSpec {
        law,
        u_max: raw.u_max,
    })
}

/// Parse a scenario document.
pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text)?;

    if raw.initial_state.len() != 10 {
        return Err(ScenarioError::Invalid(format!(
            "initial_state must have exactly 10 entries (c1,c2,phi,theta,psi,beta,dphi,dtheta,dpsi,dbeta), got {}",
            raw.initial_state.len()
        )));
    }
    let mut x0 = [0.0; 10];
    x0.copy_from_slice(&raw.initial_state);

    let defaults = Params::default_set();
    let params = Params::new(
        raw.params.m.unwrap_or(defaults.m),
        raw.params.g.unwrap_or(defaults.g),
        raw.params.r.unwrap_or(defaults.r),
        raw.params.mu.unwrap_or(defaults.mu),
        raw.params.ell.unwrap_or(defaults.ell),
    )
    .map_err(|e| ScenarioError::Invalid(e.to_string()))?
    .with_legacy_potential(raw.params.legacy_potential.unwrap_or(false));

    let controller = controller_from_raw(&raw.controller)?;
    let dt = raw.integration.dt.unwrap_or(0.01);
    let duration = raw.integration.duration.unwrap_or(8.0);
    let stride = raw.output.sample_stride.unwrap_or(1);
    if stride == 0 {
        return Err(ScenarioError::Invalid("sample_stride must be at least 1".into()));
    }

    Ok(LoadedScenario {
        scenario: Scenario {
            params,
            x0: State::from_array(x0),
            controller,
            dt,
            duration,
        },
        output_path: raw.output.path.clone(),
        sample_stride: stride,
        audits: AuditToggles {
            energy: raw.audit.energy.unwrap_or(true),
            constraints: raw.audit.constraints.unwrap_or(true),
            oracle: raw.audit.oracle.unwrap_or(true),
        },
    })
}

/// Load a scenario from disk.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

fn write_sample(w: &mut impl Write, s: &Sample) -> io::Result<()> {
    let x = s.state.to_array();
    write!(w, "{}", s.t)?;
    for v in x {
        write!(w, ",{v}")?;
    }
    writeln!(w, ",{},{},{},{}", s.u, s.energy, s.lambda1, s.lambda2)
}

/// Write a trajectory as CSV, keeping every `stride`-th sample plus the
/// terminal one.
pub fn write_trajectory_csv(
    traj: &Trajectory,
    stride: usize,
    w: &mut impl Write,
) -> io::Result<usize> {
    writeln!(w, "{CSV_HEADER}")?;
    let stride = stride.max(1);
    let last = traj.samples.len() - 1;
    let mut rows = 0;
    for (i, s) in traj.samples.iter().enumerate() {
        if i % stride == 0 || i == last {
            write_sample(w, s)?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// Parse a trajectory CSV back into samples. Values round-trip exactly.
pub fn read_trajectory_csv(reader: impl io::Read) -> Result<Vec<Sample>, ScenarioError> {
    let buf = io::BufReader::new(reader);
    let mut lines = buf.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => {
            return Err(ScenarioError::Csv {
                line: 1,
                reason: e.to_string(),
            })
        }
        None => {
            return Err(ScenarioError::Csv {
                line: 1,
                reason: "empty file".into(),
            })
        }
    };
    if header != CSV_HEADER {
        return Err(ScenarioError::Csv {
            line: 1,
            reason: format!("unexpected header '{header}'"),
        });
    }

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| ScenarioError::Csv {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(ScenarioError::Csv {
                line: idx + 1,
                reason: format!("expected 15 fields, got {}", fields.len()),
            });
        }
        let mut values = [0.0; 15];
        for (k, f) in fields.iter().enumerate() {
            values[k] = f.parse::<f64>().map_err(|e| ScenarioError::Csv {
                line: idx + 1,
                reason: format!("field {k}: {e}"),
            })?;
        }
        let mut x = [0.0; 10];
        x.copy_from_slice(&values[1..11]);
        samples.push(Sample {
            t: values[0],
            state: State::from_array(x),
            u: values[11],
            energy: values[12],
            lambda1: values[13],
            lambda2: values[14],
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate;

    const MINIMAL: &str = "initial_state = [4.0, 0.0, 0.0, 0.3, 0.0, -0.5, 6.0, -3.0, 0.0, 0.0]\n";

    #[test]
    fn minimal_scenario_gets_reference_defaults() {
        let loaded = parse_scenario(MINIMAL).unwrap();
        let p = loaded.scenario.params;
        assert_eq!((p.m, p.g, p.r, p.mu, p.ell), (5.0, 9.81, 1.0, 1.0, 2.0));
        assert!(!p.legacy_potential);
        assert_eq!(loaded.scenario.dt, 0.01);
        assert_eq!(loaded.scenario.duration, 8.0);
        assert_eq!(loaded.sample_stride, 1);
        assert_eq!(loaded.scenario.controller, ControllerSpec::none());
    }

    #[test]
    fn rejects_wrong_state_length() {
        let err = parse_scenario("initial_state = [1.0, 2.0]\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid(_)));
    }

    #[test]
    fn rejects_unknown_sections_and_kinds() {
        let text = format!("{MINIMAL}[controller]\nkind = \"pid\"\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Invalid(_))
        ));
        let text = format!("{MINIMAL}[nonsense]\nx = 1\n");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn rejects_gains_on_fixed_controllers() {
        let text = format!("{MINIMAL}[controller]\nkind = \"case1\"\nk_p = 3.0\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Invalid(_))
        ));
    }

    #[test]
    fn custom_controller_gains() {
        let text = format!(
            "{MINIMAL}[controller]\nkind = \"custom\"\nk_p = 7.0\nv_ref = 4.0\nu_max = 25.0\n"
        );
        let loaded = parse_scenario(&text).unwrap();
        match loaded.scenario.controller.law {
            ControlLaw::Custom(g) => {
                assert_eq!(g.k_p, 7.0);
                assert_eq!(g.k_d, 0.0);
                assert_eq!(g.v_ref, 4.0);
            }
            other => panic!("expected custom law, got {other:?}"),
        }
        assert_eq!(loaded.scenario.controller.u_max, Some(25.0));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let loaded = parse_scenario(MINIMAL).unwrap();
        let mut sc = loaded.scenario;
        sc.duration = 0.5;
        let traj = simulate(&sc).unwrap();

        let mut bytes = Vec::new();
        let rows = write_trajectory_csv(&traj, 1, &mut bytes).unwrap();
        assert_eq!(rows, traj.samples.len());

        let parsed = read_trajectory_csv(bytes.as_slice()).unwrap();
        assert_eq!(parsed.len(), traj.samples.len());
        for (a, b) in parsed.iter().zip(&traj.samples) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_stride_keeps_terminal_sample() {
        let loaded = parse_scenario(MINIMAL).unwrap();
        let mut sc = loaded.scenario;
        sc.duration = 0.1; // 11 samples
        let traj = simulate(&sc).unwrap();
        let mut bytes = Vec::new();
        let rows = write_trajectory_csv(&traj, 4, &mut bytes).unwrap();
        // indices 0,4,8 plus terminal 10
        assert_eq!(rows, 4);
        let parsed = read_trajectory_csv(bytes.as_slice()).unwrap();
        assert_eq!(parsed.last().unwrap(), traj.samples.last().unwrap());
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        let text = format!("{CSV_HEADER}\n1.0,2.0\n");
        assert!(matches!(
            read_trajectory_csv(text.as_bytes()),
            Err(ScenarioError::Csv { line: 2, .. })
        ));
        let text = "wrong,header\n";
        assert!(matches!(
            read_trajectory_csv(text.as_bytes()),
            Err(ScenarioError::Csv { line: 1, .. })
        ));
    }
}
