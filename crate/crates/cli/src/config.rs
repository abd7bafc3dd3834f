//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` are comments. Unset keys fall back to the
//! per-command defaults in [`crate::experiments`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use canardlab_core::{phi_finite_k, RegularizationFunction, TwoFoldNormalForm};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiChoice {
    Cubic,
    Finite,
}

impl FromStr for PhiChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cubic" => Ok(PhiChoice::Cubic),
            "finite" | "finite_k" => Ok(PhiChoice::Finite),
            other => Err(format!("unknown phi `{other}` (expected cubic or finite)")),
        }
    }
}

impl PhiChoice {
    fn as_str(self) -> &'static str {
        match self {
            PhiChoice::Cubic => "cubic",
            PhiChoice::Finite => "finite",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub b: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub c_minus_gamma: Option<f64>,
    pub c_plus_gamma: Option<f64>,
    pub xi: Option<f64>,
    pub phi: Option<PhiChoice>,
    pub k: Option<u32>,
    pub delta: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub grid_points: Option<usize>,
    pub z1_min: Option<f64>,
    pub z1_max: Option<f64>,
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
    pub xi_step: Option<f64>,
    pub eps: Option<f64>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub eps_count: Option<usize>,
    pub z: Option<f64>,
    pub z_values: Option<Vec<f64>>,
    pub rho: Option<f64>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub z0: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str, line: usize) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| CliError::Config {
        line,
        message: format!("bad value for `{key}`: {e}"),
    })
}

fn parse_list(key: &str, raw: &str, line: usize) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(|s| parse_value::<f64>(key, s.trim(), line))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            macro_rules! set {
                ($field:ident) => {
                    cfg.$field = Some(parse_value(key, value, line)?)
                };
            }
            match key {
                "b" => set!(b),
                "beta" => set!(beta),
                "c" => set!(c),
                "gamma" => set!(gamma),
                "c_minus_gamma" => set!(c_minus_gamma),
                "c_plus_gamma" => set!(c_plus_gamma),
                "xi" => set!(xi),
                "phi" => set!(phi),
                "k" => set!(k),
                "delta" => set!(delta),
                "rtol" => set!(rtol),
                "atol" => set!(atol),
                "grid_points" => set!(grid_points),
                "z1_min" => set!(z1_min),
                "z1_max" => set!(z1_max),
                "xi_min" => set!(xi_min),
                "xi_max" => set!(xi_max),
                "xi_step" => set!(xi_step),
                "eps" => set!(eps),
                "eps_min" => set!(eps_min),
                "eps_max" => set!(eps_max),
                "eps_count" => set!(eps_count),
                "z" => set!(z),
                "z_values" => cfg.z_values = Some(parse_list(key, value, line)?),
                "rho" => set!(rho),
                "x0" => set!(x0),
                "y0" => set!(y0),
                "z0" => set!(z0),
                "t_end" => set!(t_end),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Config {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Emit set keys in a fixed order; `parse` reads the result back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        macro_rules! emit {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    let _ = writeln!(out, "{} = {}", stringify!($field), v);
                })*
            };
        }
        emit!(b, beta, c, gamma, c_minus_gamma, c_plus_gamma, xi);
        if let Some(p) = self.phi {
            let _ = writeln!(out, "phi = {}", p.as_str());
        }
        emit!(k, delta, rtol, atol, grid_points, z1_min, z1_max, xi_min, xi_max, xi_step);
        emit!(eps, eps_min, eps_max, eps_count, z);
        if let Some(zs) = &self.z_values {
            let list: Vec<String> = zs.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "z_values = {}", list.join(","));
        }
        emit!(rho, x0, y0, z0, t_end);
        if let Some(p) = &self.out {
            let _ = writeln!(out, "out = {}", p.display());
        }
        out
    }

    /// Values set in `other` replace those in `self`.
    pub fn merged(mut self, other: &ExperimentConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() {
                    self.$field = other.$field.clone();
                })*
            };
        }
        take!(
            b, beta, c, gamma, c_minus_gamma, c_plus_gamma, xi, phi, k, delta, rtol, atol,
            grid_points, z1_min, z1_max, xi_min, xi_max, xi_step, eps, eps_min, eps_max,
            eps_count, z, z_values, rho, x0, y0, z0, t_end, out
        );
        self
    }

    /// Normal form from whichever parameterization is set, with the given defaults
    /// for `(b, β, c−γ, ξ)`.
    pub fn normal_form(&self, defaults: ParamDefaults) -> CliResult<TwoFoldNormalForm> {
        let b = self.b.unwrap_or(defaults.b);
        let beta = self.beta.unwrap_or(defaults.beta);
        let form = match (self.c, self.gamma) {
            (Some(c), Some(gamma)) => TwoFoldNormalForm::new(b, beta, c, gamma)?,
            (None, None) => {
                let cmg = self.c_minus_gamma.unwrap_or(defaults.c_minus_gamma);
                match (self.c_plus_gamma, self.xi.or(defaults.xi)) {
                    (Some(cpg), _) => TwoFoldNormalForm::from_sums(b, beta, cmg, cpg)?,
                    (None, Some(xi)) => TwoFoldNormalForm::with_eigen_ratio(b, beta, cmg, xi)?,
                    (None, None) => TwoFoldNormalForm::from_sums(b, beta, cmg, defaults.c_plus_gamma)?,
                }
            }
            _ => {
                return Err(CliError::Input(
                    "`c` and `gamma` must be given together".into(),
                ))
            }
        };
        Ok(form)
    }

    pub fn regularization(&self) -> CliResult<RegularizationFunction> {
        let k = match self.phi.unwrap_or(PhiChoice::Cubic) {
            PhiChoice::Cubic => 2,
            PhiChoice::Finite => self.k.unwrap_or(2),
        };
        Ok(phi_finite_k(k)?)
    }
}

/// Fallback parameters when the config leaves them unset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDefaults {
    pub b: f64,
    pub beta: f64,
    pub c_minus_gamma: f64,
    pub c_plus_gamma: f64,
    pub xi: Option<f64>,
}

impl ParamDefaults {
    /// Case N, visible-invisible, `χ₊ = -2`, `χ₋ = -1/2`, `ξ = 3.5`.
    pub const CANARD_FAMILY: ParamDefaults = ParamDefaults {
        b: 1.0,
        beta: -1.0,
        c_minus_gamma: 2.5,
        c_plus_gamma: 0.0,
        xi: Some(3.5),
    };

    /// Visible two-fold with `c = γ = 0`.
    pub const VISIBLE: ParamDefaults = ParamDefaults {
        b: 1.0,
        beta: 1.0,
        c_minus_gamma: 0.0,
        c_plus_gamma: 0.0,
        xi: None,
    };
}
