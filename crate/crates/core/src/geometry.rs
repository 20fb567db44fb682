//! Problem definition for a pair of Dirichlet strips joined through a window.
//!
//! The upper strip occupies `0 <= y <= d1`, the lower one `-d2 <= y <= 0`.
//! The common boundary `y = 0` carries a Dirichlet condition except on the
//! window `|x| <= a`. Setting `d2 = 0` selects the half-strip problem of
//! width `d1` with a Neumann condition on the window, which is the y-even
//! part of the symmetric two-strip problem.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative shrink applied to the top of the search window so the outer
/// decay exponent of the lowest mode stays strictly positive.
pub const DEFAULT_SEARCH_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    d1: f64,
    d2: f64,
    a: f64,
}

impl Geometry {
    pub fn new(d1: f64, d2: f64, a: f64) -> Result<Self> {
        if !(d1.is_finite() && d1 > 0.0) {
            return Err(Error::InvalidGeometry(format!("d1 must be positive, got {d1}")));
        }
        if !(d2.is_finite() && d2 >= 0.0) {
            return Err(Error::InvalidGeometry(format!("d2 must be non-negative, got {d2}")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidGeometry(format!("a must be positive, got {a}")));
        }
        let g = Geometry { d1, d2, a };
        if a >= g.d() {
            return Err(Error::out_of_range(
                "a",
                a,
                format!("window half-width must be below the strip width d = {}", g.d()),
            ));
        }
        Ok(g)
    }

    /// Half-strip of width `d` with a Neumann window of half-width `a`.
    pub fn half_strip(d: f64, a: f64) -> Result<Self> {
        Self::new(d, 0.0, a)
    }

    /// Two strips of equal width `d`.
    pub fn symmetric_pair(d: f64, a: f64) -> Result<Self> {
        Self::new(d, d, a)
    }

    /// Same strips, different window.
    pub fn with_window(&self, a: f64) -> Result<Self> {
        Self::new(self.d1, self.d2, a)
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn is_half_strip(&self) -> bool {
        self.d2 == 0.0
    }

    /// Width of the wider strip; it fixes the essential spectrum.
    pub fn d(&self) -> f64 {
        if self.is_half_strip() {
            self.d1
        } else {
            self.d1.max(self.d2)
        }
    }

    /// Total cross-section `D = d1 + d2`.
    pub fn total_width(&self) -> f64 {
        self.d1 + self.d2
    }

    pub fn threshold(&self) -> f64 {
        threshold(self)
    }

    pub fn eigen_bracket(&self) -> SpectralWindow {
        eigen_bracket(self)
    }

    /// Reads a plain-text file with `d1`, `d2` and `a` entries.
    pub fn from_config_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    /// Parses `key = value` (or `key: value`) lines; `#` starts a comment.
    /// `d2` may be omitted and then defaults to 0.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg = GeometryConfig::parse(text)?;
        let d1 = cfg.d1.ok_or_else(|| Error::Parse("missing key d1".into()))?;
        let a = cfg.a.ok_or_else(|| Error::Parse("missing key a".into()))?;
        Self::new(d1, cfg.d2.unwrap_or(0.0), a)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d1={} d2={} a={}", self.d1, self.d2, self.a)
    }
}

/// Partially specified geometry as read from a configuration file. Command
/// line flags are layered on top before validation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeometryConfig {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub a: Option<f64>,
}

impl GeometryConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = GeometryConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: `{}` is not a number", lineno + 1, value.trim())))?;
            let slot = match key {
                "d1" => &mut cfg.d1,
                "d2" => &mut cfg.d2,
                "a" => &mut cfg.a,
                other => return Err(Error::Parse(format!("line {}: unknown key `{other}`", lineno + 1))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Open energy interval searched for the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub margin: f64,
}

impl SpectralWindow {
    pub fn contains(&self, e: f64) -> bool {
        e > self.e_min && e < self.e_max
    }
}

/// Bottom of the essential spectrum, `(pi/d)^2`.
pub fn threshold(g: &Geometry) -> f64 {
    (PI / g.d()).powi(2)
}

/// Search window below the threshold. The lower end is `(pi/D)^2` for two
/// strips and the Neumann-Dirichlet cut-off `(pi/2d)^2` for the half-strip.
pub fn eigen_bracket(g: &Geometry) -> SpectralWindow {
    eigen_bracket_with_margin(g, DEFAULT_SEARCH_MARGIN)
}

pub fn eigen_bracket_with_margin(g: &Geometry, margin: f64) -> SpectralWindow {
    let e_min = if g.is_half_strip() {
        (PI / (2.0 * g.d())).powi(2)
    } else {
        (PI / g.total_width()).powi(2)
    };
    SpectralWindow {
        e_min,
        e_max: threshold(g) * (1.0 - margin),
        margin,
    }
}
