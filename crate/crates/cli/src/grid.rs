//! Verification grids: built-in presets and flat key-value config files.
//!
//! A config file holds `key = value` lines; `#` starts a comment.
//!
//! ```text
//! name       = wide-shapes          # optional, defaults to the file stem
//! shapes     = 2x2, 3x7, 10x40      # required
//! field      = both                 # real | complex | both, default real
//! thresholds = auto                 # auto, or scaled thresholds: 4, 12.5, 40
//! trials     = 200000               # default 100000
//! ```

use std::path::Path;

use kappa_core::shapes::{Field, MatrixShape};
use kappa_core::Error;

pub const PRESETS: [&str; 3] = ["smoke", "deep-tail", "acceptance"];
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Thresholds {
    /// `{d, √(d·x_hi), x_hi}` from the trial budget.
    Auto,
    /// Explicit scaled thresholds.
    Scaled(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCase {
    pub shape: MatrixShape,
    pub field: Field,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub name: String,
    pub trials: u64,
    pub cases: Vec<GridCase>,
}

fn shape(m: usize, n: usize) -> MatrixShape {
    MatrixShape::canonicalize(m, n).expect("preset shape")
}

fn auto(shapes: &[(usize, usize)], fields: &[Field]) -> Vec<GridCase> {
    shapes
        .iter()
        .flat_map(|&(m, n)| {
            fields.iter().map(move |&field| GridCase {
                shape: shape(m, n),
                field,
                thresholds: Thresholds::Auto,
            })
        })
        .collect()
}

impl GridSpec {
    pub fn preset(name: &str) -> Option<GridSpec> {
        let (trials, cases) = match name {
            "smoke" => (100_000, auto(&[(2, 2), (2, 4), (3, 3), (5, 10)], &[Field::Real])),
            "acceptance" => (
                1_000_000,
                auto(&[(2, 2), (2, 4), (3, 3), (3, 5), (5, 10)], &Field::ALL),
            ),
            // Thresholds where a million trials expect a few dozen exceedances.
            "deep-tail" => {
                let case = |m, n, field, xs: &[f64]| GridCase {
                    shape: shape(m, n),
                    field,
                    thresholds: Thresholds::Scaled(xs.to_vec()),
                };
                (
                    1_000_000,
                    vec![
                        case(2, 2, Field::Real, &[1e4, 1e5]),
                        case(2, 4, Field::Real, &[60.0, 150.0]),
                        case(2, 2, Field::Complex, &[300.0, 600.0]),
                        case(3, 3, Field::Real, &[1e4, 1e5]),
                    ],
                )
            }
            _ => return None,
        };
        Some(GridSpec {
            name: name.to_string(),
            trials,
            cases,
        })
    }

    /// A preset name, or else a config file path.
    pub fn resolve(grid: &str) -> Result<GridSpec, Error> {
        if let Some(spec) = GridSpec::preset(grid) {
            return Ok(spec);
        }
        let path = Path::new(grid);
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!(
                "'{grid}' is neither a preset ({}) nor a readable config file: {e}",
                PRESETS.join(", ")
            ))
        })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
        GridSpec::parse(&text, stem)
    }

    pub fn parse(text: &str, default_name: &str) -> Result<GridSpec, Error> {
        let mut name = default_name.to_string();
        let mut shapes = None;
        let mut fields = vec![Field::Real];
        let mut thresholds = Thresholds::Auto;
        let mut trials = DEFAULT_TRIALS;
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            match key {
                "name" => name = value.to_string(),
                "shapes" => {
                    let list = split_list(value)
                        .map(|s| s.parse::<MatrixShape>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| err(e.to_string()))?;
                    shapes = Some(list);
                }
                "field" => {
                    fields = match value.to_ascii_lowercase().as_str() {
                        "both" => Field::ALL.to_vec(),
                        other => vec![other.parse().map_err(|e: Error| err(e.to_string()))?],
                    }
                }
                "thresholds" => {
                    thresholds = if value.eq_ignore_ascii_case("auto") {
                        Thresholds::Auto
                    } else {
                        let mut xs = split_list(value)
                            .map(|s| match s.parse::<f64>() {
                                Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
                                _ => Err(err(format!("threshold '{s}' is not a positive number"))),
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        xs.sort_by(f64::total_cmp);
                        xs.dedup();
                        Thresholds::Scaled(xs)
                    }
                }
                "trials" => {
                    trials = value
                        .replace('_', "")
                        .parse()
                        .ok()
                        .filter(|&t: &u64| t > 0)
                        .ok_or_else(|| err(format!("trials '{value}' is not a positive integer")))?;
                }
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        let shapes = shapes.ok_or_else(|| Error::Config("config has no 'shapes' entry".into()))?;
        if shapes.is_empty() {
            return Err(Error::Config("'shapes' is empty".into()));
        }
        if matches!(&thresholds, Thresholds::Scaled(xs) if xs.is_empty()) {
            return Err(Error::Config("'thresholds' is empty".into()));
        }
        let cases = shapes
            .iter()
            .flat_map(|&shape| {
                let thresholds = &thresholds;
                fields.iter().map(move |&field| GridCase {
                    shape,
                    field,
                    thresholds: thresholds.clone(),
                })
            })
            .collect();
        Ok(GridSpec { name, trials, cases })
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}
