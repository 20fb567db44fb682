//! Transverse eigenfunctions of the window and outer cross-sections and their
//! overlap integrals, all in closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Relative tolerance used when checking that one interval contains another.
const INTERVAL_SLACK: f64 = 1e-12;

/// Frequency differences below this fraction of `pi/width` use the
/// analytic limit of `sin(x)/x`.
const RESONANCE_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeFamily {
    /// `sqrt(2/w) sin(n pi (y - lo)/w)` on `[lo, lo + w]`.
    OuterDirichlet { lo: f64, width: f64 },
    /// `sqrt(2/w) cos((m - 1/2) pi y/w)` on `[0, w]`: Neumann at 0, Dirichlet at `w`.
    InnerNeumannDirichlet { width: f64 },
    /// `sqrt(2/W) sin(m pi (y + offset)/W)` on `[-offset, W - offset]`.
    InnerFullDirichlet { width: f64, offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    pub index: usize,
    pub family: ModeFamily,
}

/// `amp * sin(k y + phase)` in the global `y` coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amp: f64,
    pub k: f64,
    pub phase: f64,
}

impl TransverseMode {
    pub fn new(index: usize, family: ModeFamily) -> Self {
        assert!(index >= 1, "transverse modes are indexed from 1");
        TransverseMode { index, family }
    }

    pub fn outer(index: usize, lo: f64, width: f64) -> Self {
        Self::new(index, ModeFamily::OuterDirichlet { lo, width })
    }

    pub fn neumann_dirichlet(index: usize, width: f64) -> Self {
        Self::new(index, ModeFamily::InnerNeumannDirichlet { width })
    }

    pub fn full_dirichlet(index: usize, width: f64, offset: f64) -> Self {
        Self::new(index, ModeFamily::InnerFullDirichlet { width, offset })
    }

    pub fn width(&self) -> f64 {
        match self.family {
            ModeFamily::OuterDirichlet { width, .. }
            | ModeFamily::InnerNeumannDirichlet { width }
            | ModeFamily::InnerFullDirichlet { width, .. } => width,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self.family {
            ModeFamily::OuterDirichlet { lo, width } => (lo, lo + width),
            ModeFamily::InnerNeumannDirichlet { width } => (0.0, width),
            ModeFamily::InnerFullDirichlet { width, offset } => (-offset, width - offset),
        }
    }

    /// Transverse wavenumber.
    pub fn wavenumber(&self) -> f64 {
        let n = self.index as f64;
        match self.family {
            ModeFamily::OuterDirichlet { width, .. } | ModeFamily::InnerFullDirichlet { width, .. } => {
                n * PI / width
            }
            ModeFamily::InnerNeumannDirichlet { width } => (n - 0.5) * PI / width,
        }
    }

    /// Transverse eigenvalue.
    pub fn rate(&self) -> f64 {
        self.wavenumber().powi(2)
    }

    pub fn sinusoid(&self) -> Sinusoid {
        let amp = (2.0 / self.width()).sqrt();
        let k = self.wavenumber();
        let phase = match self.family {
            ModeFamily::OuterDirichlet { lo, .. } => -k * lo,
            ModeFamily::InnerNeumannDirichlet { .. } => FRAC_PI_2,
            ModeFamily::InnerFullDirichlet { offset, .. } => k * offset,
        };
        Sinusoid { amp, k, phase }
    }

    /// Value at `y`; zero outside the mode's interval.
    pub fn eval(&self, y: f64) -> f64 {
        let (lo, hi) = self.interval();
        if y < lo || y > hi {
            return 0.0;
        }
        let s = self.sinusoid();
        s.amp * (s.k * y + s.phase).sin()
    }
}

/// `sin(x)/x`, switching to its Taylor limit below `cutoff`.
fn sinc(x: f64, cutoff: f64) -> f64 {
    if x.abs() < cutoff {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `int_{t0}^{t1} cos(w y + g) dy` without cancellation for small `w`.
fn cos_integral(w: f64, g: f64, t0: f64, t1: f64, cutoff: f64) -> f64 {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t0 + t1);
    2.0 * half * (w * mid + g).cos() * sinc(w * half, cutoff)
}

/// `int_{t0}^{t1} f(y) g(y) dy` for two sinusoids, by product-to-sum.
pub fn sinusoid_product_integral(f: &Sinusoid, g: &Sinusoid, t0: f64, t1: f64, scale: f64) -> f64 {
    let cutoff = RESONANCE_CUTOFF * (PI / scale) * 0.5 * (t1 - t0);
    0.5 * f.amp
        * g.amp
        * (cos_integral(f.k - g.k, f.phase - g.phase, t0, t1, cutoff)
            - cos_integral(f.k + g.k, f.phase + g.phase, t0, t1, cutoff))
}

/// `<chi_n, phi_m>` on `[0, d]` for the half-strip bases; exact rational
/// multiple of `1/pi`, independent of `d`.
pub fn neumann_dirichlet_overlap(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (1.0 / (n + m - 0.5) + 1.0 / (n - m + 0.5)) / PI
}

/// Integral of `outer * inner` over the outer mode's interval.
pub fn overlap(outer: &TransverseMode, inner: &TransverseMode) -> Result<f64> {
    let (olo, ohi) = outer.interval();
    let (ilo, ihi) = inner.interval();
    let slack = INTERVAL_SLACK * (ihi - ilo).max(ohi - olo);
    if olo < ilo - slack || ohi > ihi + slack {
        return Err(Error::IncompatibleInterval {
            outer_lo: olo,
            outer_hi: ohi,
            inner_lo: ilo,
            inner_hi: ihi,
        });
    }
    if let (ModeFamily::OuterDirichlet { lo, width }, ModeFamily::InnerNeumannDirichlet { width: w2 }) =
        (outer.family, inner.family)
    {
        if lo == 0.0 && width == w2 {
            return Ok(neumann_dirichlet_overlap(outer.index, inner.index));
        }
    }
    let scale = outer.width().min(inner.width());
    Ok(sinusoid_product_integral(&outer.sinusoid(), &inner.sinusoid(), olo, ohi, scale))
}

/// `int_{t0}^{t1} mode^2`, with `t0`, `t1` measured from the lower end of the
/// mode's interval.
pub fn mode_norm_on_subinterval(mode: &TransverseMode, t0: f64, t1: f64) -> Result<f64> {
    let w = mode.width();
    if !(t0 >= 0.0 && t0 < t1 && t1 <= w * (1.0 + INTERVAL_SLACK)) {
        return Err(Error::out_of_range(
            "subinterval",
            t1 - t0,
            format!("need 0 <= t0 < t1 <= {w}, got [{t0}, {t1}]"),
        ));
    }
    let (lo, _) = mode.interval();
    let s = mode.sinusoid();
    let cutoff = RESONANCE_CUTOFF * PI;
    let y0 = lo + t0;
    let y1 = lo + t1;
    Ok(0.5 * s.amp * s.amp * ((y1 - y0) - cos_integral(2.0 * s.k, 2.0 * s.phase, y0, y1, cutoff)))
}
