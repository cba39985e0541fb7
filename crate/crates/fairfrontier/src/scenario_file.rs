//! Custom scenario files.
//!
//! A scenario file is TOML with a `[joint]` table holding `a0y0 .. a1y1` and
//! one `[dist.aAyY]` table per cell. Each distribution table has a `kind`
//! (`normal`, `triangular` or `mixture`) and the kind's parameters:
//!
//! ```toml
//! label = "example1"
//!
//! [joint]
//! a0y0 = 0.125
//! a0y1 = 0.125
//! a1y0 = 0.25
//! a1y1 = 0.5
//!
//! [dist.a0y0]
//! kind = "normal"
//! mean = -1.0
//! stddev = 2.0
//!
//! [dist.a0y1]
//! kind = "triangular"
//! lower = 3.0
//! upper = 7.0
//! mode = 5.0
//!
//! [dist.a1y0]
//! kind = "mixture"
//!
//! [[dist.a1y0.components]]
//! weight = 0.5
//! kind = "normal"
//! mean = 0.0
//! stddev = 1.0
//! ```
//!
//! Mixture components carry a `weight` plus an ordinary distribution table.

use std::path::Path;

use fairfrontier_core::population::{self, DistSpec, ScenarioSpec};
use fairfrontier_core::{GroupConditionalModel, ScenarioId};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    joint: JointTable,
    dist: DistTable,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointTable {
    a0y0: f64,
    a0y1: f64,
    a1y0: f64,
    a1y1: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistTable {
    a0y0: DistEntry,
    a0y1: DistEntry,
    a1y0: DistEntry,
    a1y1: DistEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DistEntry {
    Normal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<f64>,
        mean: f64,
        stddev: f64,
    },
    Triangular {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<f64>,
        lower: f64,
        upper: f64,
        mode: f64,
    },
    Mixture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<f64>,
        components: Vec<DistEntry>,
    },
}

impl DistEntry {
    fn weight(&self) -> Option<f64> {
        match self {
            DistEntry::Normal { weight, .. }
            | DistEntry::Triangular { weight, .. }
            | DistEntry::Mixture { weight, .. } => *weight,
        }
    }

    fn to_spec(&self, path: &str) -> std::result::Result<DistSpec, String> {
        Ok(match self {
            DistEntry::Normal { mean, stddev, .. } => DistSpec::Normal {
                mean: *mean,
                stddev: *stddev,
            },
            DistEntry::Triangular {
                lower, upper, mode, ..
            } => DistSpec::Triangular {
                lower: *lower,
                upper: *upper,
                mode: *mode,
            },
            DistEntry::Mixture { components, .. } => {
                if components.is_empty() {
                    return Err(format!(
                        "{path}.components: a mixture needs at least one component"
                    ));
                }
                let comps = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let p = format!("{path}.components[{i}]");
                        let w = c
                            .weight()
                            .ok_or_else(|| format!("{p}.weight: missing component weight"))?;
                        Ok((w, c.to_spec(&p)?))
                    })
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                DistSpec::Mixture(comps)
            }
        })
    }

    fn from_spec(spec: &DistSpec, weight: Option<f64>) -> Self {
        match spec {
            DistSpec::Normal { mean, stddev } => DistEntry::Normal {
                weight,
                mean: *mean,
                stddev: *stddev,
            },
            DistSpec::Triangular { lower, upper, mode } => DistEntry::Triangular {
                weight,
                lower: *lower,
                upper: *upper,
                mode: *mode,
            },
            DistSpec::Mixture(comps) => DistEntry::Mixture {
                weight,
                components: comps
                    .iter()
                    .map(|(w, d)| DistEntry::from_spec(d, Some(*w)))
                    .collect(),
            },
        }
    }
}

/// Parses scenario text without validating the parameters.
pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioSpec> {
    let parse_err = |message: String| CliError::Parse {
        origin: origin.to_owned(),
        message,
    };
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| parse_err(e.to_string().trim_end().to_owned()))?;
    let d = &file.dist;
    let cells = [
        [("a0y0", &d.a0y0), ("a0y1", &d.a0y1)],
        [("a1y0", &d.a1y0), ("a1y1", &d.a1y1)],
    ];
    let mut conditional: Vec<DistSpec> = Vec::with_capacity(4);
    for (key, entry) in cells.iter().flatten() {
        let path = format!("dist.{key}");
        if entry.weight().is_some() {
            let line = locate(text, &format!("{path}.weight"));
            return Err(parse_err(with_line(
                line,
                format!("{path}.weight: only mixture components take a weight"),
            )));
        }
        let spec = entry.to_spec(&path).map_err(|m| {
            let field = m.split(':').next().unwrap_or_default().to_owned();
            parse_err(with_line(locate(text, &field), m))
        })?;
        conditional.push(spec);
    }
    let mut it = conditional.into_iter();
    let mut next = || it.next().expect("four cells");
    let j = &file.joint;
    Ok(ScenarioSpec {
        label: file.label.unwrap_or_else(|| origin.to_owned()),
        joint: [[j.a0y0, j.a0y1], [j.a1y0, j.a1y1]],
        conditional: [[next(), next()], [next(), next()]],
    })
}

/// Parses and validates scenario text; validation failures name each field
/// and, where it can be found, its line.
pub fn model_from_text(text: &str, origin: &str) -> Result<GroupConditionalModel> {
    let spec = parse_scenario(text, origin)?;
    let report = population::validate(&spec);
    if !report.passed() {
        let details = report
            .failures()
            .map(|f| match locate(text, &f.name) {
                Some(line) => format!("  line {line}: {}: {}", f.name, f.detail),
                None => format!("  {}: {}", f.name, f.detail),
            })
            .collect::<Vec<_>>()
            .join("\n");
        return Err(CliError::Validation {
            label: spec.label,
            details,
        });
    }
    Ok(GroupConditionalModel::from_spec(spec)?)
}

pub fn read_scenario(path: &Path) -> Result<GroupConditionalModel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    model_from_text(&text, &path.display().to_string())
}

/// Serializes a scenario; [`parse_scenario`] reads it back bit-identically.
pub fn write_scenario(spec: &ScenarioSpec) -> String {
    let c = &spec.conditional;
    let file = ScenarioFile {
        label: Some(spec.label.clone()),
        joint: JointTable {
            a0y0: spec.joint[0][0],
            a0y1: spec.joint[0][1],
            a1y0: spec.joint[1][0],
            a1y1: spec.joint[1][1],
        },
        dist: DistTable {
            a0y0: DistEntry::from_spec(&c[0][0], None),
            a0y1: DistEntry::from_spec(&c[0][1], None),
            a1y0: DistEntry::from_spec(&c[1][0], None),
            a1y1: DistEntry::from_spec(&c[1][1], None),
        },
    };
    toml::to_string(&file).expect("scenario tables always serialize")
}

/// Resolves a `--scenario` value: a preset name or a path to a scenario file.
pub fn load(name_or_path: &str) -> Result<GroupConditionalModel> {
    match ScenarioId::parse(name_or_path) {
        Ok(id) => Ok(id.model()),
        Err(unknown) => {
            let path = Path::new(name_or_path);
            if path.exists() {
                read_scenario(path)
            } else {
                Err(unknown.into())
            }
        }
    }
}

fn with_line(line: Option<usize>, message: String) -> String {
    match line {
        Some(n) => format!("line {n}: {message}"),
        None => message,
    }
}

/// 1-based line of a dotted field such as `dist.a1y1.mode` or
/// `dist.a0y1.components[1].stddev`.
fn locate(text: &str, field: &str) -> Option<usize> {
    let (table, key) = field.rsplit_once('.')?;
    let (header, index) = match table.strip_suffix(']').and_then(|t| t.split_once('[')) {
        Some((h, i)) => (h, Some(i.parse::<usize>().ok()?)),
        None => (table, None),
    };
    let key_of = |l: &str| {
        l.split('=')
            .next()
            .map(str::trim)
            .map(|k| k.trim_matches('"').to_owned())
    };
    let mut seen = 0usize;
    let mut inside = false;
    let mut header_line = None;
    for (n, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.starts_with('[') {
            let array = l.starts_with("[[");
            let name = l.trim_start_matches('[').trim_end_matches(']').trim();
            inside = match index {
                Some(i) if array && name == header => {
                    seen += 1;
                    seen - 1 == i
                }
                Some(_) => false,
                None => !array && name == header,
            };
            if inside {
                header_line = Some(n + 1);
            }
            continue;
        }
        match key_of(l) {
            Some(k) if inside && k == key => return Some(n + 1),
            Some(k) if k == field => return Some(n + 1),
            _ => {}
        }
    }
    header_line
}
