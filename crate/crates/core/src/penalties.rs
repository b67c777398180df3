//! Sparsity-promoting potentials `ρ` and their derivatives.
//!
//! Every potential is continuous, nondecreasing on `[0, ∞)` with `ρ(0) = 0`,
//! concave there, and has right derivative `ρ'(0⁺) = γ`. Concavity gives the
//! tangent bound `ρ(|u|) <= ρ'(|v|)(|u| - |v|) + ρ(|v|)` that turns the
//! penalty `sum_ij ρ(|A_ij|)` into a weighted ℓ1 norm with weights
//! `Ω_ij = ρ'(|A'_ij|)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    LogSum,
    Atan,
    Mangasarian,
    Mcp,
    Scad,
    L1,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::LogSum, Family::Atan, Family::Mangasarian, Family::Mcp, Family::Scad, Family::L1];

    pub fn name(self) -> &'static str {
        match self {
            Family::LogSum => "logsum",
            Family::Atan => "atan",
            Family::Mangasarian => "mangasarian",
            Family::Mcp => "mcp",
            Family::Scad => "scad",
            Family::L1 => "l1",
        }
    }

    /// Name of the second hyperparameter, if the family has one.
    pub fn shape_name(self) -> Option<&'static str> {
        match self {
            Family::L1 => None,
            Family::Scad => Some("a"),
            _ => Some("lambda"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "logsum" | "log" => Ok(Family::LogSum),
            "atan" => Ok(Family::Atan),
            "mangasarian" => Ok(Family::Mangasarian),
            "mcp" => Ok(Family::Mcp),
            "scad" => Ok(Family::Scad),
            "l1" | "lasso" => Ok(Family::L1),
            _ => Err(Error::InvalidArgument(format!("unknown penalty family '{s}'"))),
        }
    }
}

/// A potential with its hyperparameters. `gamma` is the slope at zero;
/// `shape` is `λ` for log-sum, atan, Mangasarian and MCP, `a` for SCAD and
/// unused for ℓ1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    family: Family,
    gamma: f64,
    shape: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Potential {
    /// Generic constructor; `shape` is ignored for ℓ1.
    pub fn new(family: Family, gamma: f64, shape: f64) -> Result<Self> {
        let gamma = positive("gamma", gamma)?;
        let shape = match family {
            Family::L1 => 0.0,
            Family::Scad => {
                if !(shape > 2.0 && shape.is_finite()) {
                    return Err(Error::InvalidArgument(format!("SCAD requires a > 2, got {shape}")));
                }
                shape
            }
            _ => positive("lambda", shape)?,
        };
        Ok(Potential { family, gamma, shape })
    }

    pub fn log_sum(gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::LogSum, gamma, lambda)
    }

    pub fn atan(gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::Atan, gamma, lambda)
    }

    pub fn mangasarian(gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::Mangasarian, gamma, lambda)
    }

    pub fn mcp(gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::Mcp, gamma, lambda)
    }

    pub fn scad(gamma: f64, a: f64) -> Result<Self> {
        Self::new(Family::Scad, gamma, a)
    }

    pub fn l1(gamma: f64) -> Result<Self> {
        Self::new(Family::L1, gamma, 0.0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `λ` (or `a` for SCAD); `None` for ℓ1.
    pub fn shape(&self) -> Option<f64> {
        self.family.shape_name().map(|_| self.shape)
    }

    /// `ρ(|u|)`.
    pub fn rho(&self, u: f64) -> f64 {
        let t = u.abs();
        let g = self.gamma;
        let l = self.shape;
        match self.family {
            Family::L1 => g * t,
            Family::LogSum => g * l * (t / l).ln_1p(),
            Family::Atan => g / l * (l * t).atan(),
            Family::Mangasarian => -g / l * (-l * t).exp_m1(),
            Family::Mcp => {
                if t <= l * g {
                    g * t - t * t / (2.0 * l)
                } else {
                    l * g * g / 2.0
                }
            }
            Family::Scad => {
                let a = l;
                if t <= g {
                    g * t
                } else if t <= a * g {
                    -(g * g - 2.0 * a * g * t + t * t) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * g * g / 2.0
                }
            }
        }
    }

    /// `ρ'(|u|)`; at `u = 0` this is the right limit `γ`.
    pub fn rho_prime(&self, u: f64) -> f64 {
        let t = u.abs();
        let g = self.gamma;
        let l = self.shape;
        match self.family {
            Family::L1 => g,
            Family::LogSum => g * l / (t + l),
            Family::Atan => g / (1.0 + l * l * t * t),
            Family::Mangasarian => g * (-l * t).exp(),
            Family::Mcp => (g - t / l).max(0.0),
            // Exact derivative of the middle branch, (aγ - |u|)/(a - 1), so
            // that ρ' is continuous at |u| = γ and |u| = aγ.
            Family::Scad => {
                let a = l;
                if t <= g {
                    g
                } else if t <= a * g {
                    (a * g - t) / (a - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// `sum_ij ρ(|A_ij|)`.
    pub fn penalty_value(&self, a: &DMatrix<f64>) -> f64 {
        a.iter().map(|&v| self.rho(v)).sum()
    }

    /// Reweighting matrix `Ω_ij = ρ'(|A'_ij|)`.
    pub fn weight_matrix(&self, a_prev: &DMatrix<f64>) -> DMatrix<f64> {
        a_prev.map(|v| self.rho_prime(v))
    }

    /// `(u, ρ(|u|))` pairs over `grid`.
    pub fn curve(&self, grid: &[f64]) -> Vec<(f64, f64)> {
        grid.iter().map(|&u| (u, self.rho(u))).collect()
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family.shape_name() {
            Some(name) => write!(f, "{}(gamma={}, {}={})", self.family, self.gamma, name, self.shape),
            None => write!(f, "{}(gamma={})", self.family, self.gamma),
        }
    }
}

pub fn rho(p: &Potential, u: f64) -> f64 {
    p.rho(u)
}

pub fn rho_prime(p: &Potential, u: f64) -> f64 {
    p.rho_prime(u)
}

pub fn penalty_value(p: &Potential, a: &DMatrix<f64>) -> f64 {
    p.penalty_value(a)
}

pub fn weight_matrix(p: &Potential, a_prev: &DMatrix<f64>) -> DMatrix<f64> {
    p.weight_matrix(a_prev)
}

/// Evenly spaced grid of `points` values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

pub fn emit_penalty_curve(p: &Potential, grid: &[f64]) -> Vec<(f64, f64)> {
    p.curve(grid)
}
