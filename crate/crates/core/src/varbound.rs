//! Trial-function upper bound on the eigenvalue gap.
//!
//! The trial function is `psi = F + G` with `F = f(x) chi_1(y)`, where `f`
//! equals `alpha` over the window and decays like `exp(-kappa (|x| - a))`
//! outside it, and `G = eta cos(pi x / 2a) R(y)` supported in the window
//! column. `R` decays like `exp(-pi y / 2a)` up to mid-strip and then falls
//! linearly to zero. `psi` already has the right Dirichlet traces and lies
//! in the form domain, so the quotient
//!
//! `(||grad psi||^2 - (pi/d)^2 ||psi||^2) / ||psi||^2`
//!
//! bounds `E - (pi/d)^2` from above. Every term is evaluated exactly, the
//! quotient is minimized in `eta` as a 2x2 generalized eigenproblem and in
//! `log kappa` by golden-section search.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;

const OVERLAP_QUAD_TOL: f64 = 1e-14;
const MAX_LINE_SEARCH: usize = 200;
const LOG_KAPPA_TOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub alpha: f64,
    pub kappa: f64,
    pub eta: f64,
}

impl TrialParams {
    pub fn new(kappa: f64, eta: f64) -> Self {
        TrialParams { alpha: 1.0, kappa, eta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialVariant {
    /// `F + G` on the half-strip, or its even extension on two equal strips.
    Symmetric,
    /// `F + G` in the wider strip and a copy of `G` built on the narrower one.
    Nonsymmetric,
}

impl TrialVariant {
    pub fn for_geometry(g: &Geometry) -> Self {
        if g.is_half_strip() || g.d1() == g.d2() {
            TrialVariant::Symmetric
        } else {
            TrialVariant::Nonsymmetric
        }
    }
}

/// `R(y)` on a strip of width `d` for window half-width `a`.
pub fn profile(d: f64, a: f64, y: f64) -> f64 {
    if y <= 0.5 * d {
        (-PI * y / (2.0 * a)).exp()
    } else {
        2.0 * (1.0 - y / d) * (-PI * d / (4.0 * a)).exp()
    }
}

pub fn profile_derivative(d: f64, a: f64, y: f64) -> f64 {
    if y < 0.5 * d {
        -PI / (2.0 * a) * (-PI * y / (2.0 * a)).exp()
    } else {
        -2.0 / d * (-PI * d / (4.0 * a)).exp()
    }
}

/// `||R||^2` on `(0, d)`.
pub fn profile_norm_sq(d: f64, a: f64) -> f64 {
    a / PI + (d / 6.0 - a / PI) * (-PI * d / (2.0 * a)).exp()
}

/// `||R'||^2` on `(0, d)`.
pub fn profile_derivative_norm_sq(d: f64, a: f64) -> f64 {
    let e = (-PI * d / (2.0 * a)).exp();
    PI / (4.0 * a) * (1.0 - e) + 2.0 / d * e
}

/// `<chi_1, R>` on `(0, d)` by adaptive quadrature, split at the kink.
pub fn chi1_profile_overlap(d: f64, a: f64) -> f64 {
    let chi = |y: f64| (2.0 / d).sqrt() * (PI * y / d).sin();
    let f = |y: f64| chi(y) * profile(d, a, y);
    let left = quadrature::integrate(f, 0.0, 0.5 * d, OVERLAP_QUAD_TOL).integral;
    let right = quadrature::integrate(f, 0.5 * d, d, OVERLAP_QUAD_TOL).integral;
    left + right
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialTerms {
    pub f_x_sq: f64,
    pub g_x_sq: f64,
    pub g_y_sq: f64,
    pub g_sq: f64,
    /// `(F, G)`.
    pub f_g: f64,
    /// `int G(x, 0) dx` over the window.
    pub g_window_integral: f64,
    /// `-2 alpha chi_1'(0) int G(x, 0) dx`.
    pub coupling: f64,
    pub f_sq: f64,
    pub psi_sq: f64,
    /// `||grad psi||^2 - (pi/d)^2 ||psi||^2`.
    pub numerator: f64,
}

impl TrialTerms {
    pub fn quotient(&self) -> f64 {
        self.numerator / self.psi_sq
    }
}

/// Coefficients of the quotient as quadratic forms in `(alpha, eta)`.
#[derive(Debug, Clone, Copy)]
struct Pencil {
    /// `eta^2` coefficients of `||G_x||^2`, `||G_y||^2`, `||G||^2`.
    gx: f64,
    gy: f64,
    g: f64,
    /// `alpha eta` coefficient of `(F, G)`.
    fg: f64,
    /// `alpha eta` coefficient of the window coupling.
    coupling: f64,
    a: f64,
    threshold: f64,
}

impl Pencil {
    fn new(g: &Geometry, variant: TrialVariant) -> Result<Self> {
        let d = g.d();
        let a = g.a();
        if a >= PI * d / 8.0 {
            return Err(Error::out_of_range("a", a, format!("the trial bound needs a < pi d / 8 = {}", PI * d / 8.0)));
        }
        let narrow = match variant {
            TrialVariant::Symmetric => {
                if !(g.is_half_strip() || g.d1() == g.d2()) {
                    return Err(Error::InvalidGeometry(
                        "the symmetric trial function needs a half-strip or two equal strips".into(),
                    ));
                }
                None
            }
            TrialVariant::Nonsymmetric => {
                if g.is_half_strip() {
                    return Err(Error::InvalidGeometry("the nonsymmetric trial function needs two strips".into()));
                }
                Some(g.d1().min(g.d2()))
            }
        };
        let r = profile_norm_sq(d, a);
        let rp = profile_derivative_norm_sq(d, a);
        let mut p = Pencil {
            gx: PI * PI / (4.0 * a) * r,
            gy: a * rp,
            g: a * r,
            fg: 4.0 * a / PI * chi1_profile_overlap(d, a),
            coupling: -2.0 * (PI / d) * (2.0 / d).sqrt() * 4.0 * a / PI,
            a,
            threshold: (PI / d).powi(2),
        };
        if let Some(d2) = narrow {
            let r2 = profile_norm_sq(d2, a);
            p.gx += PI * PI / (4.0 * a) * r2;
            p.gy += a * profile_derivative_norm_sq(d2, a);
            p.g += a * r2;
        }
        Ok(p)
    }

    /// `(n11, n12, n22)` and `(d11, d12, d22)` of numerator and norm.
    fn forms(&self, kappa: f64) -> ([f64; 3], [f64; 3]) {
        let n = [kappa, 0.5 * self.coupling, self.gx + self.gy - self.threshold * self.g];
        let m = [2.0 * self.a + 1.0 / kappa, self.fg, self.g];
        (n, m)
    }

    fn terms(&self, p: &TrialParams) -> TrialTerms {
        let (al, k, et) = (p.alpha, p.kappa, p.eta);
        let f_x_sq = al * al * k;
        let g_x_sq = et * et * self.gx;
        let g_y_sq = et * et * self.gy;
        let g_sq = et * et * self.g;
        let f_g = al * et * self.fg;
        let coupling = al * et * self.coupling;
        let f_sq = al * al * (2.0 * self.a + 1.0 / k);
        let psi_sq = f_sq + g_sq + 2.0 * f_g;
        TrialTerms {
            f_x_sq,
            g_x_sq,
            g_y_sq,
            g_sq,
            f_g,
            g_window_integral: 4.0 * self.a * et / PI,
            coupling,
            f_sq,
            psi_sq,
            numerator: f_x_sq + g_x_sq + g_y_sq - self.threshold * g_sq + coupling,
        }
    }

    /// Smallest quotient over `eta` at fixed `kappa`, with its minimizer.
    fn best_eta(&self, kappa: f64) -> (f64, f64) {
        let (n, m) = self.forms(kappa);
        // det(N - l M) = qa l^2 + qb l + qc
        let qa = m[0] * m[2] - m[1] * m[1];
        let qb = -(n[0] * m[2] + n[2] * m[0] - 2.0 * n[1] * m[1]);
        let qc = n[0] * n[2] - n[1] * n[1];
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
        let root = -0.5 * (qb + qb.signum() * disc.sqrt());
        let (l1, l2) = (root / qa, qc / root);
        let lam = l1.min(l2);
        let eta = -(n[0] - lam * m[0]) / (n[1] - lam * m[1]);
        (lam, eta)
    }
}

pub fn trial_terms(g: &Geometry, p: &TrialParams) -> Result<TrialTerms> {
    trial_terms_variant(g, p, TrialVariant::for_geometry(g))
}

pub fn trial_terms_variant(g: &Geometry, p: &TrialParams, variant: TrialVariant) -> Result<TrialTerms> {
    if !(p.kappa > 0.0 && p.kappa.is_finite()) {
        return Err(Error::out_of_range("kappa", p.kappa, "must be positive"));
    }
    Ok(Pencil::new(g, variant)?.terms(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialBound {
    pub params: TrialParams,
    /// Optimized quotient; negative means a level below threshold.
    pub value: f64,
    pub terms: TrialTerms,
    pub variant: TrialVariant,
    /// The closed-form chain value printed with the bound, for comparison.
    pub closed_form_value: f64,
    pub iterations: usize,
}

/// Starting `kappa` of the line search, `2^6 a^2 / (pi d^3)`.
pub fn initial_kappa(g: &Geometry) -> f64 {
    64.0 * g.a().powi(2) / (PI * g.d().powi(3))
}

/// Small-`a` limit of the optimal `kappa` for the symmetric trial function.
pub fn limiting_kappa(g: &Geometry) -> f64 {
    32.0 * g.a().powi(2) / (PI * g.d().powi(3))
}

/// Small-`a` limit of the optimized symmetric quotient, `-2^10 a^4 / (pi^2 d^6)`.
pub fn limiting_value(g: &Geometry) -> f64 {
    -1024.0 * g.a().powi(4) / (PI * PI * g.d().powi(6))
}

/// The bound as it comes out of the printed inequality chain at vanishing
/// epsilons, with the minus sign restored.
pub fn closed_form_value(g: &Geometry, variant: TrialVariant) -> f64 {
    let base = g.a().powi(4) / (PI * PI * g.d().powi(6));
    match variant {
        TrialVariant::Symmetric => -4096.0 * base,
        TrialVariant::Nonsymmetric => -1024.0 * base,
    }
}

pub fn optimize_trial(g: &Geometry) -> Result<TrialBound> {
    optimize_trial_variant(g, TrialVariant::for_geometry(g))
}

pub fn optimize_trial_variant(g: &Geometry, variant: TrialVariant) -> Result<TrialBound> {
    let pencil = Pencil::new(g, variant)?;
    let f = |t: f64| pencil.best_eta(t.exp()).0;
    let centre = initial_kappa(g).ln();
    let (mut lo, mut hi) = (centre - 8.0, centre + 4.0);
    let mut iterations = 0;
    // widen until the minimum is interior
    loop {
        let (fl, fc, fh) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        if fc <= fl && fc <= fh {
            break;
        }
        if fl < fc {
            lo -= 4.0;
        } else {
            hi += 4.0;
        }
        iterations += 1;
        if iterations > MAX_LINE_SEARCH {
            return Err(Error::NoConvergence("could not bracket the optimal kappa".into()));
        }
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > LOG_KAPPA_TOL {
        iterations += 1;
        if iterations > MAX_LINE_SEARCH {
            return Err(Error::NoConvergence(format!(
                "kappa line search exceeded {MAX_LINE_SEARCH} iterations"
            )));
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let kappa = (0.5 * (lo + hi)).exp();
    let (value, eta) = pencil.best_eta(kappa);
    let params = TrialParams::new(kappa, eta);
    Ok(TrialBound {
        params,
        value,
        terms: pencil.terms(&params),
        variant,
        closed_form_value: closed_form_value(g, variant),
        iterations,
    })
}

/// `-8 sqrt(2) a / d^(3/2)`, the window coupling per unit `alpha eta`.
pub fn coupling_coefficient(g: &Geometry) -> f64 {
    -8.0 * SQRT_2 * g.a() / g.d().powf(1.5)
}
