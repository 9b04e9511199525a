//! Solver settings shared by the numerical modules.
//!
//! Files are flat `key = value` lines; `#` starts a comment. Unknown keys are
//! rejected so that typos do not silently fall back to defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Branch;

/// Which way the branch index `n` runs along a singularity cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Singularities below the real axis, `|η_s|` growing towards `−i∞`.
    #[default]
    Lower,
    /// Mirror image in the upper half plane.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub quad_tol: f64,
    pub quad_max_subdiv: usize,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub p_max: f64,
    pub m: usize,
    pub eta_max: f64,
    pub eta_min: f64,
    /// Node spacing in |η| for stored inner solutions.
    pub eta_step: f64,
    pub ray_deg: f64,
    #[serde(skip)]
    pub sqrt_branch: Branch,
    pub orientation: Orientation,
    pub stokes: Option<Complex64>,
    pub n_min: i64,
    pub wedge_delta: f64,
    pub norm_alpha: f64,
    pub picard_max_iter: usize,
    pub blowup_threshold: f64,
    pub output: OutputFormat,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-12,
            newton_max_iter: 100,
            quad_tol: 1e-12,
            quad_max_subdiv: 4000,
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-13,
            p_max: 10.0,
            m: 400,
            eta_max: 50.0,
            eta_min: 2.0,
            eta_step: 0.025,
            ray_deg: 0.0,
            sqrt_branch: Branch::Principal,
            orientation: Orientation::Lower,
            stokes: None,
            n_min: 1,
            wedge_delta: 0.05,
            norm_alpha: 1.0,
            picard_max_iter: 200,
            blowup_threshold: 1e8,
            output: OutputFormat::Json,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(v: &str) -> Result<Complex64> {
    let v = v.trim();
    let (re, im) = v.split_once(',').unwrap_or((v, "0"));
    Ok(Complex64::new(parse_num("complex", re)?, parse_num("complex", im)?))
}

impl SolverConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "newton_tol" => self.newton_tol = parse_num(key, v)?,
            "newton_max_iter" => self.newton_max_iter = parse_num(key, v)?,
            "quad_tol" => self.quad_tol = parse_num(key, v)?,
            "quad_max_subdiv" => self.quad_max_subdiv = parse_num(key, v)?,
            "ode_rel_tol" => self.ode_rel_tol = parse_num(key, v)?,
            "ode_abs_tol" => self.ode_abs_tol = parse_num(key, v)?,
            "p_max" => self.p_max = parse_num(key, v)?,
            "m" => self.m = parse_num(key, v)?,
            "eta_max" => self.eta_max = parse_num(key, v)?,
            "eta_min" => self.eta_min = parse_num(key, v)?,
            "eta_step" => self.eta_step = parse_num(key, v)?,
            "ray_deg" => self.ray_deg = parse_num(key, v)?,
            "sqrt_branch" => {
                self.sqrt_branch = match v {
                    "principal" | "+" => Branch::Principal,
                    "negative" | "-" => Branch::Negative,
                    _ => return Err(Error::Config(format!("sqrt_branch: unknown value {v:?}"))),
                }
            }
            "orientation" => {
                self.orientation = match v {
                    "lower" => Orientation::Lower,
                    "upper" => Orientation::Upper,
                    _ => return Err(Error::Config(format!("orientation: unknown value {v:?}"))),
                }
            }
            "stokes" => {
                self.stokes = match v {
                    "" | "none" => None,
                    _ => Some(parse_complex(v)?),
                }
            }
            "n_min" => self.n_min = parse_num(key, v)?,
            "wedge_delta" => self.wedge_delta = parse_num(key, v)?,
            "norm_alpha" => self.norm_alpha = parse_num(key, v)?,
            "picard_max_iter" => self.picard_max_iter = parse_num(key, v)?,
            "blowup_threshold" => self.blowup_threshold = parse_num(key, v)?,
            "output" => {
                self.output = match v {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(Error::Config(format!("output: unknown value {v:?}"))),
                }
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Overlays the settings of a `key = value` text on `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_str_checked(text: &str) -> Result<Self> {
        let mut c = SolverConfig::default();
        c.merge_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        self.merge_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("newton_tol", self.newton_tol),
            ("quad_tol", self.quad_tol),
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
        ];
        for (k, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if self.m < 16 {
            return Err(Error::Config(format!("m must be at least 16, got {}", self.m)));
        }
        if !(self.p_max > 0.0) {
            return Err(Error::Config("p_max must be positive".into()));
        }
        if !(self.eta_min > 0.0 && self.eta_max > self.eta_min) {
            return Err(Error::Config(format!(
                "need eta_max > eta_min > 0, got {} and {}",
                self.eta_max, self.eta_min
            )));
        }
        if let Some(c) = self.stokes {
            if c == Complex64::new(0.0, 0.0) {
                return Err(Error::Config("stokes constant must be nonzero".into()));
            }
        }
        if !(self.eta_step > 0.0 && self.eta_step.is_finite()) {
            return Err(Error::Config("eta_step must be positive".into()));
        }
        if !(self.wedge_delta >= 0.0 && self.wedge_delta < std::f64::consts::PI / 9.0) {
            return Err(Error::Config("wedge_delta must lie in [0, π/9)".into()));
        }
        Ok(())
    }
}

impl fmt::Display for SolverConfig {
    /// Writes the settings back in the file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "newton_tol = {:e}", self.newton_tol)?;
        writeln!(f, "newton_max_iter = {}", self.newton_max_iter)?;
        writeln!(f, "quad_tol = {:e}", self.quad_tol)?;
        writeln!(f, "quad_max_subdiv = {}", self.quad_max_subdiv)?;
        writeln!(f, "ode_rel_tol = {:e}", self.ode_rel_tol)?;
        writeln!(f, "ode_abs_tol = {:e}", self.ode_abs_tol)?;
        writeln!(f, "p_max = {}", self.p_max)?;
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "eta_max = {}", self.eta_max)?;
        writeln!(f, "eta_min = {}", self.eta_min)?;
        writeln!(f, "eta_step = {}", self.eta_step)?;
        writeln!(f, "ray_deg = {}", self.ray_deg)?;
        let b = match self.sqrt_branch {
            Branch::Principal => "principal",
            Branch::Negative => "negative",
        };
        writeln!(f, "sqrt_branch = {b}")?;
        let o = match self.orientation {
            Orientation::Lower => "lower",
            Orientation::Upper => "upper",
        };
        writeln!(f, "orientation = {o}")?;
        match self.stokes {
            Some(c) => writeln!(f, "stokes = {},{}", c.re, c.im)?,
            None => writeln!(f, "stokes = none")?,
        }
        writeln!(f, "n_min = {}", self.n_min)?;
        writeln!(f, "wedge_delta = {}", self.wedge_delta)?;
        writeln!(f, "norm_alpha = {}", self.norm_alpha)?;
        writeln!(f, "picard_max_iter = {}", self.picard_max_iter)?;
        writeln!(f, "blowup_threshold = {:e}", self.blowup_threshold)?;
        let out = match self.output {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        };
        writeln!(f, "output = {out}")
    }
}
