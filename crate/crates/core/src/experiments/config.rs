//! TOML scenario files.
//!
//! ```toml
//! [grid]
//! dim = 1                # 1 or 2
//! cells = 400            # M
//! cells_periodic = 8     # P, 2D only
//! refinements = [64, 128]  # reilly mode only
//!
//! [coefficients]
//! a = "canonical"        # canonical | power:α:β | one | cubic
//! kappa = 1.0            # real or "inf"
//! phi = "kappa_over_eps" # kappa_over_eps | power:γ
//!
//! [data]
//! u0 = "cosine:1"        # constant:c | linear | cosine:k[:j] | sine:k | monomial:n
//!                        # | eigenmode:κ:parity:m | bump
//! w0 = "trace"           # trace | constant:c
//! splice = true
//!
//! [run]
//! name = "my-run"
//! mode = "flow"          # flow | reilly | gamma
//! eps = "0.2,0.1,0.05"   # or an array
//! dt = 2.5e-4
//! T = 0.25
//! snapshots = "0.125"
//! references = ["neumann", "dynamic"]
//! workers = 4
//!
//! [output]
//! path = "out.csv"
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use super::{BoundaryRecipe, InitialRecipe, Mode, ReferenceKind, Scenario};
use crate::coefficients::{CapacityProfile, ConductivityProfile, Kappa};
use crate::par::Execution;
use crate::solvers::Parity;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{0}")]
    Document(String),

    #[error("missing mandatory key {0}")]
    Missing(&'static str),

    #[error("conflicting capacity spec: {0}")]
    ConflictingCapacity(String),

    #[error("invalid value for {key}: {message}")]
    Invalid { key: &'static str, message: String },

    #[error("cannot align epsilon sweep {sweep:?} on a multiple of {cells} cells within 4096")]
    Alignment { cells: usize, sweep: Vec<f64> },

    #[error("unknown preset {name:?}; available presets: {available}")]
    UnknownPreset { name: String, available: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    coefficients: RawCoefficients,
    data: RawData,
    run: RawRun,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dim: Option<usize>,
    cells: Option<usize>,
    cells_periodic: Option<usize>,
    refinements: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawKappa {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    a: Option<String>,
    kappa: Option<RawKappa>,
    phi: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    u0: Option<String>,
    w0: Option<String>,
    splice: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawList {
    Text(String),
    Numbers(Vec<f64>),
    Number(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    name: Option<String>,
    mode: Option<String>,
    eps: Option<RawList>,
    dt: Option<f64>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    snapshots: Option<RawList>,
    references: Option<Vec<String>>,
    workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn list(raw: &RawList, key: &'static str) -> Result<Vec<f64>, ConfigError> {
    match raw {
        RawList::Number(v) => Ok(vec![*v]),
        RawList::Numbers(v) => Ok(v.clone()),
        RawList::Text(s) => s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<f64>().map_err(|e| ConfigError::Invalid {
                    key,
                    message: format!("{p:?}: {e}"),
                })
            })
            .collect(),
    }
}

fn number<T: std::str::FromStr>(part: Option<&str>, key: &'static str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    let p = part.ok_or(ConfigError::Invalid {
        key,
        message: "missing parameter".into(),
    })?;
    p.parse().map_err(|e| ConfigError::Invalid {
        key,
        message: format!("{p:?}: {e}"),
    })
}

pub(crate) fn parse_conductivity(s: &str) -> Result<ConductivityProfile, ConfigError> {
    let mut parts = s.split(':');
    match parts.next() {
        Some("canonical") => Ok(ConductivityProfile::Canonical),
        Some("one") => Ok(ConductivityProfile::ConstantOne),
        Some("cubic") => Ok(ConductivityProfile::DegenerateCubic),
        Some("power") => Ok(ConductivityProfile::Power {
            alpha: number(parts.next(), "coefficients.a")?,
            beta: number(parts.next(), "coefficients.a")?,
        }),
        _ => Err(ConfigError::Invalid {
            key: "coefficients.a",
            message: format!("unknown conductivity {s:?}"),
        }),
    }
}

pub(crate) fn parse_initial(s: &str) -> Result<InitialRecipe, ConfigError> {
    const KEY: &str = "data.u0";
    let mut parts = s.split(':');
    let recipe = match parts.next() {
        Some("constant") => InitialRecipe::Constant(number(parts.next(), KEY)?),
        Some("linear") => InitialRecipe::Linear,
        Some("cosine") => InitialRecipe::Cosine {
            k: number(parts.next(), KEY)?,
            wavenumber: parts.next().map(|p| number(Some(p), KEY)).transpose()?,
        },
        Some("sine") => InitialRecipe::Sine(number(parts.next(), KEY)?),
        Some("monomial") => InitialRecipe::Monomial(number(parts.next(), KEY)?),
        Some("eigenmode") => {
            let kappa = number(parts.next(), KEY)?;
            let parity = match parts.next() {
                Some("odd") => Parity::Odd,
                Some("even") => Parity::Even,
                other => {
                    return Err(ConfigError::Invalid {
                        key: KEY,
                        message: format!("parity {other:?}, expected odd|even"),
                    })
                }
            };
            InitialRecipe::Eigenmode {
                kappa,
                parity,
                m: number(parts.next(), KEY)?,
            }
        }
        Some("bump") => InitialRecipe::Bump,
        _ => {
            return Err(ConfigError::Invalid {
                key: KEY,
                message: format!("unknown initial field {s:?}"),
            })
        }
    };
    if parts.next().is_some() {
        return Err(ConfigError::Invalid {
            key: KEY,
            message: format!("too many parameters in {s:?}"),
        });
    }
    Ok(recipe)
}

fn parse_boundary(s: &str) -> Result<BoundaryRecipe, ConfigError> {
    match s.split_once(':') {
        None if s == "trace" => Ok(BoundaryRecipe::Trace),
        Some(("constant", c)) => Ok(BoundaryRecipe::Constant(number(Some(c), "data.w0")?)),
        _ => Err(ConfigError::Invalid {
            key: "data.w0",
            message: format!("unknown boundary data {s:?}"),
        }),
    }
}

fn parse_kappa(raw: &RawKappa) -> Result<Kappa, ConfigError> {
    let v = match raw {
        RawKappa::Number(v) => *v,
        RawKappa::Text(s) if s == "inf" => f64::INFINITY,
        RawKappa::Text(s) => s.parse().map_err(|_| ConfigError::Invalid {
            key: "coefficients.kappa",
            message: format!("{s:?}"),
        })?,
    };
    if v.is_infinite() && v > 0.0 {
        Ok(Kappa::Infinite)
    } else if v == 0.0 {
        Ok(Kappa::Zero)
    } else if v > 0.0 && v.is_finite() {
        Ok(Kappa::Finite(v))
    } else {
        Err(ConfigError::Invalid {
            key: "coefficients.kappa",
            message: format!("{v} is not in [0, inf]"),
        })
    }
}

fn parse_capacity(kappa: Option<Kappa>, phi: Option<&str>) -> Result<CapacityProfile, ConfigError> {
    let from_phi = match phi {
        None => None,
        Some("kappa_over_eps") => match kappa {
            Some(Kappa::Finite(k)) => Some(CapacityProfile::KappaOverEps(k)),
            _ => {
                return Err(ConfigError::ConflictingCapacity(
                    "phi = kappa_over_eps needs a finite positive kappa".into(),
                ))
            }
        },
        Some(s) => match s.split_once(':') {
            Some(("power", g)) => {
                Some(CapacityProfile::Power(number(Some(g), "coefficients.phi")?))
            }
            _ => {
                return Err(ConfigError::Invalid {
                    key: "coefficients.phi",
                    message: format!("unknown family {s:?}"),
                })
            }
        },
    };
    match (kappa, from_phi) {
        (None, None) => Err(ConfigError::Missing("coefficients.kappa")),
        (Some(Kappa::Finite(k)), None) => Ok(CapacityProfile::KappaOverEps(k)),
        (Some(k), None) => Err(ConfigError::Invalid {
            key: "coefficients.kappa",
            message: format!("kappa = {k} needs an explicit phi = \"power:γ\""),
        }),
        (None, Some(p)) => {
            p.kappa_limit().map_err(|e| ConfigError::Invalid {
                key: "coefficients.phi",
                message: e.to_string(),
            })?;
            Ok(p)
        }
        (Some(k), Some(p)) => {
            let implied = p.kappa_limit().map_err(|e| ConfigError::Invalid {
                key: "coefficients.phi",
                message: e.to_string(),
            })?;
            if implied == k {
                Ok(p)
            } else {
                Err(ConfigError::ConflictingCapacity(format!(
                    "kappa = {k} but phi = {} has kappa = {implied}",
                    phi.unwrap_or_default()
                )))
            }
        }
    }
}

fn parse_reference(s: &str) -> Result<ReferenceKind, ConfigError> {
    match s {
        "dynamic" => Ok(ReferenceKind::Dynamic),
        "neumann" => Ok(ReferenceKind::Neumann),
        "dirichlet" => Ok(ReferenceKind::Dirichlet),
        _ => Err(ConfigError::Invalid {
            key: "run.references",
            message: format!("unknown reference {s:?}"),
        }),
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => ConfigError::Syntax {
            line: line_of(text, span.start),
            message: e.message().to_string(),
        },
        None => ConfigError::Document(e.message().to_string()),
    })?;

    let mode = match raw.run.mode.as_deref() {
        None | Some("flow") => Mode::Flow,
        Some("reilly") => Mode::Reilly,
        Some("gamma") => Mode::Gamma,
        Some(other) => {
            return Err(ConfigError::Invalid {
                key: "run.mode",
                message: format!("{other:?}"),
            })
        }
    };
    let dimension = raw.grid.dim.unwrap_or(1);
    let cells = raw.grid.cells.ok_or(ConfigError::Missing("grid.cells"))?;
    let sweep = list(
        raw.run
            .eps
            .as_ref()
            .ok_or(ConfigError::Missing("run.eps"))?,
        "run.eps",
    )?;
    if sweep.is_empty() || sweep.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
        return Err(ConfigError::Invalid {
            key: "run.eps",
            message: "values must lie in (0, 1/2)".into(),
        });
    }
    let kappa = raw
        .coefficients
        .kappa
        .as_ref()
        .map(parse_kappa)
        .transpose()?;
    let capacity = parse_capacity(kappa, raw.coefficients.phi.as_deref())?;
    let conductivity = parse_conductivity(raw.coefficients.a.as_deref().unwrap_or("canonical"))?;
    let u0 = parse_initial(
        raw.data
            .u0
            .as_deref()
            .ok_or(ConfigError::Missing("data.u0"))?,
    )?;
    let w0 = parse_boundary(raw.data.w0.as_deref().unwrap_or("trace"))?;
    let needs_time = mode != Mode::Reilly;
    let dt = match raw.run.dt {
        Some(v) if v > 0.0 => v,
        Some(v) => {
            return Err(ConfigError::Invalid {
                key: "run.dt",
                message: format!("{v} must be positive"),
            })
        }
        None if needs_time => return Err(ConfigError::Missing("run.dt")),
        None => 0.0,
    };
    let horizon = match raw.run.horizon {
        Some(v) if v > 0.0 => v,
        Some(v) => {
            return Err(ConfigError::Invalid {
                key: "run.T",
                message: format!("{v} must be positive"),
            })
        }
        None if needs_time => return Err(ConfigError::Missing("run.T")),
        None => 0.0,
    };
    let snapshots = raw
        .run
        .snapshots
        .as_ref()
        .map(|s| list(s, "run.snapshots"))
        .transpose()?
        .unwrap_or_default();
    let references = match &raw.run.references {
        Some(r) => r
            .iter()
            .map(|s| parse_reference(s))
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            let k = capacity.kappa_limit().map_err(|e| ConfigError::Invalid {
                key: "coefficients.phi",
                message: e.to_string(),
            })?;
            vec![ReferenceKind::for_kappa(k)]
        }
    };
    if references.is_empty() {
        return Err(ConfigError::Invalid {
            key: "run.references",
            message: "at least one reference".into(),
        });
    }

    let mut warnings = Vec::new();
    let mut cells_final = cells;
    let mut refinements = raw.grid.refinements.clone().unwrap_or_default();
    if mode == Mode::Reilly {
        if refinements.is_empty() {
            return Err(ConfigError::Missing("grid.refinements"));
        }
        for m in &mut refinements {
            let aligned = Scenario::aligned_cells(*m, &sweep).ok_or(ConfigError::Alignment {
                cells: *m,
                sweep: sweep.clone(),
            })?;
            if aligned != *m {
                warnings.push(format!(
                    "refinement M = {m} refined to {aligned} to align the epsilon sweep"
                ));
                *m = aligned;
            }
        }
    } else {
        cells_final = Scenario::aligned_cells(cells, &sweep).ok_or(ConfigError::Alignment {
            cells,
            sweep: sweep.clone(),
        })?;
        if cells_final != cells {
            warnings.push(format!(
                "M = {cells} refined to {cells_final} so that every epsilon is a grid multiple"
            ));
        }
        let eps_min = sweep.iter().copied().fold(f64::INFINITY, f64::min);
        if 1.0 / cells_final as f64 > eps_min / 4.0 + 1e-15 {
            warnings.push(format!(
                "h = 1/{cells_final} leaves fewer than 4 cells in the thinnest layer (epsilon = {eps_min})"
            ));
        }
    }

    let scenario = Scenario {
        name: raw.run.name.unwrap_or_else(|| "config".into()),
        mode,
        dimension,
        cells: cells_final,
        cells_periodic: raw.grid.cells_periodic,
        refinements,
        conductivity,
        capacity,
        u0,
        w0,
        splice: raw.data.splice.unwrap_or(true),
        sweep,
        dt,
        horizon,
        snapshots,
        references,
        workers: raw.run.workers,
        execution: Execution::Parallel,
        output: raw.output.path.map(PathBuf::from),
        warnings,
    };
    scenario.grid().map_err(|e| ConfigError::Invalid {
        key: "grid",
        message: e.to_string(),
    })?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
cells = 400

[coefficients]
kappa = 1

[data]
u0 = "cosine:1"

[run]
eps = "0.2,0.1,0.05"
dt = 1e-3
T = 0.1
"#;

    #[test]
    fn minimal_document() {
        let s = parse_config(MINIMAL).unwrap();
        assert_eq!(s.sweep, vec![0.2, 0.1, 0.05]);
        assert_eq!(s.references, vec![ReferenceKind::Dynamic]);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn misaligned_epsilon_refines_the_grid() {
        let doc = MINIMAL
            .replace("cells = 400", "cells = 10")
            .replace("\"0.2,0.1,0.05\"", "0.15");
        let s = parse_config(&doc).unwrap();
        assert_eq!(s.cells, 20);
        assert!(s.warnings.iter().any(|w| w.contains("refined to 20")));
    }

    #[test]
    fn conflicting_capacity() {
        let doc = MINIMAL.replace("kappa = 1", "kappa = 1\nphi = \"power:2\"");
        let err = parse_config(&doc).unwrap_err();
        assert!(
            err.to_string().contains("conflicting capacity spec"),
            "{err}"
        );
    }

    #[test]
    fn unknown_key_reports_line() {
        let doc = MINIMAL.replace("cells = 400", "cells = 400\ncolor = 3");
        match parse_config(&doc).unwrap_err() {
            ConfigError::Syntax { line, message } => {
                assert_eq!(line, 4, "{message}");
                assert!(message.contains("color"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_key() {
        let doc = MINIMAL.replace("u0 = \"cosine:1\"", "");
        assert!(matches!(
            parse_config(&doc),
            Err(ConfigError::Missing("data.u0"))
        ));
    }
}
