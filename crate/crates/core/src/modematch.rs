//! Ground state by matching transverse-mode expansions at the window edge.
//!
//! Inside the window column `|x| < a` the even eigenfunction is expanded in
//! the inner cross-section basis with `x`-profiles normalized to one at
//! `x = a`; outside it is a sum of decaying outer strip modes. Matching the
//! trace through the inner basis and the normal derivative through the
//! outer basis gives the symmetric secular matrix
//!
//! `M(s) = O diag(t) O^T + diag(kappa)`
//!
//! in the gap variable `s = threshold - E`. Every entry is nondecreasing in
//! `s`, so `M` is positive definite exactly above the ground-state gap and a
//! Cholesky attempt is an exact sign test. The root is polished by Newton on
//! the smallest eigenvalue and the truncation is doubled with Richardson
//! extrapolation in the mode count.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{eigen_bracket, Geometry};
use crate::modes::{neumann_dirichlet_overlap, overlap, TransverseMode};

/// Per-strip mode count of the coarsest truncation level.
pub const START_MODES: usize = 16;
pub const DEFAULT_MAX_MODES: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Gaps below this fraction of the threshold are not resolved.
pub const PRECISION_FLOOR: f64 = 1e-13;

/// Truncation error of the gap expands in `N^-3/2`, `N^-2`, `N^-5/2`; each
/// doubling removes one term.
const LEADING_ORDER: f64 = 1.5;
const SECOND_ORDER: f64 = 2.0;
const THIRD_ORDER: f64 = 2.5;
const TAN_POLE_GUARD: f64 = 1e-12;
const POLE_SHIFT: f64 = 1e-13;
const SCAN_STEP: f64 = 0.5;
const MAX_NEWTON: usize = 80;
const MAX_INVERSE_STEPS: usize = 100;

/// Inner `x`-profile data of one transverse mode at a given gap.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Profile {
    exponent: f64,
    propagating: bool,
    log_derivative: f64,
    slope: f64,
}

fn inner_profile(shift: f64, s: f64, a: f64) -> Profile {
    let mu = shift + s;
    if mu >= 0.0 {
        let nu = mu.sqrt();
        let x = nu * a;
        let th = x.tanh();
        let slope = if x < 1e-6 {
            a
        } else {
            let sech = 1.0 / x.cosh();
            (th + x * sech * sech) / (2.0 * nu)
        };
        Profile {
            exponent: nu,
            propagating: false,
            log_derivative: nu * th,
            slope,
        }
    } else {
        let mut k = (-mu).sqrt();
        let mut x = k * a;
        let off = (x - 0.5 * PI).rem_euclid(PI);
        if off.min(PI - off) < TAN_POLE_GUARD {
            k = (k * k + POLE_SHIFT).sqrt();
            x = k * a;
        }
        let tn = x.tan();
        let slope = if x < 1e-6 {
            a
        } else {
            let sec = 1.0 / x.cos();
            (tn + x * sec * sec) / (2.0 * k)
        };
        Profile {
            exponent: k,
            propagating: true,
            log_derivative: -k * tn,
            slope,
        }
    }
}

/// Overlaps and transverse rates for one truncation; independent of energy.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    geometry: Geometry,
    n_upper: usize,
    n_lower: usize,
    overlaps: DMatrix<f64>,
    overlaps_t: DMatrix<f64>,
    inner_shift: Vec<f64>,
    outer_shift: Vec<f64>,
}

impl ModeBasis {
    /// `n_upper` and `n_lower` outer modes per strip (`n_lower` is ignored
    /// for the half-strip) and `n_inner` window modes.
    pub fn new(g: &Geometry, n_inner: usize, n_upper: usize, n_lower: usize) -> Result<Self> {
        let n_lower = if g.is_half_strip() { 0 } else { n_lower };
        if n_inner < 1 {
            return Err(Error::TruncationTooSmall("need at least one inner mode".into()));
        }
        if n_upper < 1 || (!g.is_half_strip() && n_lower < 1) {
            return Err(Error::TruncationTooSmall("need at least one outer mode per strip".into()));
        }
        let thr = g.threshold();
        let n_outer = n_upper + n_lower;
        let outer: Vec<TransverseMode> = (1..=n_upper)
            .map(|n| TransverseMode::outer(n, 0.0, g.d1()))
            .chain((1..=n_lower).map(|n| TransverseMode::outer(n, -g.d2(), g.d2())))
            .collect();
        let inner: Vec<TransverseMode> = if g.is_half_strip() {
            (1..=n_inner).map(|m| TransverseMode::neumann_dirichlet(m, g.d1())).collect()
        } else {
            (1..=n_inner)
                .map(|m| TransverseMode::full_dirichlet(m, g.total_width(), g.d2()))
                .collect()
        };
        let mut overlaps = DMatrix::zeros(n_outer, n_inner);
        for (j, phi) in inner.iter().enumerate() {
            for (i, chi) in outer.iter().enumerate() {
                overlaps[(i, j)] = if g.is_half_strip() {
                    neumann_dirichlet_overlap(chi.index, phi.index)
                } else {
                    overlap(chi, phi)?
                };
            }
        }
        // rate - threshold, formed so the lowest mode of the wider strip gives exactly 0
        let shift = |k: f64| k * k - (PI / g.d()).powi(2);
        let inner_shift = inner.iter().map(|m| shift(m.wavenumber())).collect();
        let outer_shift = outer
            .iter()
            .map(|m| if m.index == 1 && m.width() == g.d() { 0.0 } else { shift(m.wavenumber()) })
            .collect();
        debug_assert!(thr > 0.0);
        let overlaps_t = overlaps.transpose();
        Ok(ModeBasis {
            geometry: *g,
            n_upper,
            n_lower,
            overlaps,
            overlaps_t,
            inner_shift,
            outer_shift,
        })
    }

    /// Splits `n_outer` between the strips in proportion to their widths.
    pub fn with_outer_total(g: &Geometry, n_inner: usize, n_outer: usize) -> Result<Self> {
        if g.is_half_strip() {
            return Self::new(g, n_inner, n_outer, 0);
        }
        if n_outer < 2 {
            return Err(Error::TruncationTooSmall("two strips need at least two outer modes".into()));
        }
        let up = ((n_outer as f64) * g.d1() / g.total_width()).round() as usize;
        let up = up.clamp(1, n_outer - 1);
        Self::new(g, n_inner, up, n_outer - up)
    }

    /// Square truncation with `level` modes in the wider strip.
    pub fn at_level(g: &Geometry, level: usize) -> Result<Self> {
        if g.is_half_strip() {
            return Self::new(g, level, level, 0);
        }
        let per = |w: f64| (((level as f64) * w / g.d()).round() as usize).max(1);
        let (up, low) = (per(g.d1()), per(g.d2()));
        Self::new(g, up + low, up, low)
    }

    pub fn n_inner(&self) -> usize {
        self.overlaps.ncols()
    }

    pub fn n_outer(&self) -> usize {
        self.overlaps.nrows()
    }

    pub fn split(&self) -> (usize, usize) {
        (self.n_upper, self.n_lower)
    }

    pub fn overlaps(&self) -> &DMatrix<f64> {
        &self.overlaps
    }

    fn profiles(&self, s: f64) -> Vec<Profile> {
        let a = self.geometry.a();
        self.inner_shift.iter().map(|&sh| inner_profile(sh, s, a)).collect()
    }

    fn outer_rates(&self, s: f64) -> Vec<f64> {
        self.outer_shift.iter().map(|&sh| (sh + s).sqrt()).collect()
    }

    /// Symmetric secular matrix at gap `s`.
    fn matrix_at(&self, profiles: &[Profile], kappa: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.overlaps.clone();
        for (j, p) in profiles.iter().enumerate() {
            scaled.column_mut(j).scale_mut(p.log_derivative);
        }
        let mut m = &scaled * &self.overlaps_t;
        for (i, k) in kappa.iter().enumerate() {
            m[(i, i)] += k;
        }
        // exact symmetry keeps the Cholesky test honest
        for i in 0..m.nrows() {
            for j in 0..i {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn system_at_gap(&self, s: f64) -> SecularSystem {
        let profiles = self.profiles(s);
        SecularSystem {
            energy: self.geometry.threshold() - s,
            gap: s,
            n_inner: self.n_inner(),
            n_outer: self.n_outer(),
            overlaps: self.overlaps.clone(),
            inner_exponents: profiles.iter().map(|p| p.exponent).collect(),
            inner_propagating: profiles.iter().map(|p| p.propagating).collect(),
            inner_log_derivatives: profiles.iter().map(|p| p.log_derivative).collect(),
            outer_rates: self.outer_rates(s),
        }
    }

    fn is_definite(&self, s: f64) -> bool {
        let profiles = self.profiles(s);
        let kappa = self.outer_rates(s);
        self.matrix_at(&profiles, &kappa).cholesky().is_some()
    }

    fn probe(&self, s: f64, start: &DVector<f64>) -> Result<Probe> {
        let profiles = self.profiles(s);
        let kappa = self.outer_rates(s);
        let m = self.matrix_at(&profiles, &kappa);
        let row_norm = max_row_norm(&m);
        let energy = self.geometry.threshold() - s;
        let (definite, solver): (bool, Box<dyn Fn(&DVector<f64>) -> Option<DVector<f64>>>) =
            match m.clone().cholesky() {
                Some(ch) => (true, Box::new(move |v| Some(ch.solve(v)))),
                None => {
                    let lu = m.clone().lu();
                    (false, Box::new(move |v| lu.solve(v)))
                }
            };
        let mut v = start.normalize();
        let mut lambda = f64::NAN;
        for _ in 0..MAX_INVERSE_STEPS {
            let x = match solver(&v) {
                Some(x) if x.norm().is_finite() && x.norm() > 0.0 => x,
                // numerically singular: the current vector already spans the kernel
                _ if lambda.is_finite() || !definite => {
                    lambda = 0.0;
                    break;
                }
                _ => return Err(Error::Factorization { energy }),
            };
            let norm = x.norm();
            v = x / norm;
            let mv = &m * &v;
            let l = v.dot(&mv);
            let resid = (mv - l * &v).norm();
            let settled = (l - lambda).abs() <= 1e-15 * row_norm;
            lambda = l;
            if resid <= 1e-12 * row_norm || settled {
                break;
            }
        }
        let projected = &self.overlaps_t * &v;
        let slope: f64 = profiles
            .iter()
            .zip(projected.iter())
            .map(|(p, b)| p.slope * b * b)
            .sum::<f64>()
            + kappa.iter().zip(v.iter()).map(|(k, c)| 0.5 / k * c * c).sum::<f64>();
        Ok(Probe {
            s,
            definite,
            lambda,
            slope,
            vector: v,
            row_norm,
        })
    }

    /// Newton on the smallest eigenvalue in `r = sqrt(s)`, safeguarded by the
    /// bracket `[lo, hi]` whose top is definite and bottom is not.
    fn polish(&self, guess: f64, mut lo: f64, mut hi: f64, start: DVector<f64>) -> Result<Probe> {
        let mut s = if guess > lo && guess < hi { guess } else { (lo * hi).sqrt() };
        let mut v = start;
        for _ in 0..MAX_NEWTON {
            let p = self.probe(s, &v)?;
            if p.definite {
                hi = s;
            } else {
                lo = s;
            }
            v = p.vector.clone();
            let r = s.sqrt();
            let r_new = r - p.lambda / (2.0 * r * p.slope);
            let mut s_new = r_new * r_new;
            if !(r_new > 0.0 && s_new > lo && s_new < hi) || !p.slope.is_finite() || p.slope <= 0.0 {
                s_new = (lo * hi).sqrt();
            }
            let attainable = 100.0 * f64::EPSILON * p.row_norm / p.slope.max(f64::MIN_POSITIVE);
            let step = (s_new - s).abs();
            if step <= (1e-14 * s).max(attainable) || hi - lo <= 1e-14 * hi {
                return Ok(p);
            }
            s = s_new;
        }
        Err(Error::NoConvergence(format!(
            "secular root at {} modes did not settle in {MAX_NEWTON} steps",
            self.n_inner()
        )))
    }

    /// Root of this truncation, or `None` when `M` stays definite down to the
    /// precision floor.
    pub fn ground_root(&self) -> Result<Option<TruncatedRoot>> {
        let g = self.geometry;
        let thr = g.threshold();
        let window = eigen_bracket(&g);
        let s_top = thr - window.e_min;
        let floor = PRECISION_FLOOR * thr;
        if !self.is_definite(s_top) {
            return Ok(None);
        }
        let mut hi = s_top;
        let mut tau = s_top.ln();
        let lo = loop {
            tau -= SCAN_STEP;
            let s = tau.exp().max(floor);
            if !self.is_definite(s) {
                break s;
            }
            if s <= floor {
                return Ok(None);
            }
            hi = s;
        };
        let start = DVector::from_element(self.n_outer(), 1.0);
        let p = self.polish((lo * hi).sqrt(), lo, hi, start)?;
        Ok(Some(self.finish(p)))
    }

    fn finish(&self, p: Probe) -> TruncatedRoot {
        let b = &self.overlaps_t * &p.vector;
        TruncatedRoot {
            gap: p.s,
            residual: p.lambda.abs() / p.row_norm,
            inner: b,
            outer: p.vector,
            n_inner: self.n_inner(),
            n_outer: self.n_outer(),
        }
    }

    /// Trace and normal-derivative mismatch across the window edge for outer
    /// coefficients `c` at gap `s`, in closed form from the overlap matrix.
    pub fn edge_mismatch(&self, s: f64, c: &DVector<f64>) -> EdgeMismatch {
        let profiles = self.profiles(s);
        let kappa = self.outer_rates(s);
        let b = &self.overlaps_t * c;
        let ob = &self.overlaps * &b;
        let value_sq = b.norm_squared() + c.norm_squared() - 2.0 * c.dot(&ob);
        let bt = DVector::from_iterator(b.len(), b.iter().zip(&profiles).map(|(x, p)| x * p.log_derivative));
        let ck = DVector::from_iterator(c.len(), c.iter().zip(&kappa).map(|(x, k)| x * k));
        let deriv_sq = bt.norm_squared() + ck.norm_squared() + 2.0 * ck.dot(&(&self.overlaps * &bt));
        EdgeMismatch {
            value: value_sq.max(0.0).sqrt(),
            derivative: deriv_sq.max(0.0).sqrt(),
            trace_norm: c.norm(),
            derivative_norm: ck.norm(),
        }
    }
}

fn max_row_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
struct Probe {
    s: f64,
    definite: bool,
    lambda: f64,
    slope: f64,
    vector: DVector<f64>,
    row_norm: f64,
}

/// Root of the secular system at one fixed truncation.
#[derive(Debug, Clone)]
pub struct TruncatedRoot {
    pub gap: f64,
    pub residual: f64,
    pub inner: DVector<f64>,
    pub outer: DVector<f64>,
    pub n_inner: usize,
    pub n_outer: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMismatch {
    /// L2 norm over the cross-section of inner minus outer trace.
    pub value: f64,
    /// L2 norm of inner minus outer `x`-derivative.
    pub derivative: f64,
    pub trace_norm: f64,
    pub derivative_norm: f64,
}

/// Secular system at one energy, in the layout of the outer-projected form
/// `A[n][m] = O[n][m] (t_m + kappa_n)`.
#[derive(Debug, Clone)]
pub struct SecularSystem {
    pub energy: f64,
    pub gap: f64,
    pub n_inner: usize,
    pub n_outer: usize,
    pub overlaps: DMatrix<f64>,
    /// `nu_m` for evanescent and `k_m` for propagating inner modes.
    pub inner_exponents: Vec<f64>,
    pub inner_propagating: Vec<bool>,
    /// `t_m`, the log-derivative of the even inner profile at `x = a`.
    pub inner_log_derivatives: Vec<f64>,
    /// `kappa_n`.
    pub outer_rates: Vec<f64>,
}

impl SecularSystem {
    /// Symmetric form used by the solver: `O diag(t) O^T + diag(kappa)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut scaled = self.overlaps.clone();
        for (j, t) in self.inner_log_derivatives.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*t);
        }
        let mut m = &scaled * self.overlaps.transpose();
        for (i, k) in self.outer_rates.iter().enumerate() {
            m[(i, i)] += k;
        }
        m
    }

    /// Both matching conditions projected onto the outer basis.
    pub fn outer_projected_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_outer, self.n_inner, |n, m| {
            self.overlaps[(n, m)] * (self.inner_log_derivatives[m] + self.outer_rates[n])
        })
    }
}

pub fn assemble_secular(g: &Geometry, energy: f64, n_inner: usize, n_outer: usize) -> Result<SecularSystem> {
    let w = eigen_bracket(g);
    if !(energy > w.e_min && energy < g.threshold()) {
        return Err(Error::EnergyOutOfBracket {
            energy,
            lo: w.e_min,
            hi: w.e_max,
        });
    }
    if n_inner < 1 {
        return Err(Error::TruncationTooSmall("need at least one inner mode".into()));
    }
    if n_outer < n_inner {
        return Err(Error::TruncationTooSmall(format!(
            "n_outer = {n_outer} must be at least n_inner = {n_inner}"
        )));
    }
    let basis = ModeBasis::with_outer_total(g, n_inner, n_outer)?;
    Ok(basis.system_at_gap(g.threshold() - energy))
}

/// Smallest singular value of the solver's symmetric matrix, divided by its
/// largest row norm.
pub fn smallest_singular_value(sys: &SecularSystem) -> Result<f64> {
    let m = sys.matrix();
    let scale = max_row_norm(&m);
    if !scale.is_finite() {
        return Err(Error::Factorization { energy: sys.energy });
    }
    let eig = m.symmetric_eigen().eigenvalues;
    Ok(eig.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min) / scale)
}

/// `sigma_min(A) / max_i sum_j |A_ij|` for any real matrix.
pub fn scaled_smallest_singular_value(m: &DMatrix<f64>) -> Result<f64> {
    let scale = max_row_norm(m);
    if !scale.is_finite() || m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Factorization { energy: f64::NAN });
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sv = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::Factorization { energy: f64::NAN })?
        .singular_values;
    Ok(sv.iter().cloned().fold(f64::INFINITY, f64::min) / scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    /// Largest per-strip mode count tried.
    pub n_max: usize,
    pub n_start: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            n_max: DEFAULT_MAX_MODES,
            n_start: START_MODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n_inner: usize,
    pub raw_gap: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub energy: f64,
    pub gap: f64,
    /// `|lambda_min| / max row norm` of the secular matrix at the finest root.
    pub residual: f64,
    /// Inner (window) coefficients of the eigenfunction, unit outer norm.
    pub kernel_vector: Vec<f64>,
    pub outer_coefficients: Vec<f64>,
    /// Change of the extrapolated gap between the last two levels.
    pub truncation_error: f64,
    pub n_modes: usize,
    pub n_outer: usize,
    /// Unextrapolated gap at the finest truncation.
    pub raw_gap: f64,
    pub levels: Vec<LevelRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unresolved {
    /// The secular matrix is singular already at the bottom of the search window.
    NoRootInBracket,
    /// The gap is below `PRECISION_FLOOR` times the threshold.
    PrecisionFloor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Bound(EigenResult),
    Unresolved(Unresolved),
}

impl SolveOutcome {
    pub fn bound(&self) -> Option<&EigenResult> {
        match self {
            SolveOutcome::Bound(r) => Some(r),
            SolveOutcome::Unresolved(_) => None,
        }
    }

    pub fn into_bound(self) -> Option<EigenResult> {
        match self {
            SolveOutcome::Bound(r) => Some(r),
            SolveOutcome::Unresolved(_) => None,
        }
    }
}

pub fn solve_ground_state(g: &Geometry, tol: f64, n_max: usize) -> Result<SolveOutcome> {
    solve_with(
        g,
        &SolverOptions {
            tol,
            n_max,
            ..SolverOptions::default()
        },
    )
}

/// Pads the previous level's outer vector into the next level's layout.
fn pad_outer(prev: &DVector<f64>, prev_split: (usize, usize), next: (usize, usize)) -> DVector<f64> {
    let mut v = DVector::zeros(next.0 + next.1);
    for i in 0..prev_split.0.min(next.0) {
        v[i] = prev[i];
    }
    for i in 0..prev_split.1.min(next.1) {
        v[next.0 + i] = prev[prev_split.0 + i];
    }
    v
}

pub fn solve_with(g: &Geometry, opts: &SolverOptions) -> Result<SolveOutcome> {
    if !(opts.tol > 1e-14 && opts.tol < 1e-4) {
        return Err(Error::out_of_range("tol", opts.tol, "must lie in (1e-14, 1e-4)"));
    }
    if opts.n_start < 2 {
        return Err(Error::TruncationTooSmall("starting mode count must be at least 2".into()));
    }
    if opts.n_max < 4 * opts.n_start {
        return Err(Error::TruncationTooSmall(format!(
            "n_max = {} leaves fewer than three truncation levels above {}",
            opts.n_max, opts.n_start
        )));
    }
    let thr = g.threshold();
    let floor = PRECISION_FLOOR * thr;
    let s_top = thr - eigen_bracket(g).e_min;
    let q = 2f64.powf(LEADING_ORDER);
    let q2 = 2f64.powf(SECOND_ORDER);
    let q3 = 2f64.powf(THIRD_ORDER);

    let mut raw: Vec<f64> = Vec::new();
    let mut first: Vec<f64> = Vec::new();
    let mut second: Vec<f64> = Vec::new();
    let mut est: Vec<f64> = Vec::new();
    let mut levels = Vec::new();
    let mut prev: Option<(DVector<f64>, (usize, usize))> = None;
    let mut level = opts.n_start;
    let mut last_err = f64::INFINITY;

    while level <= opts.n_max {
        let basis = ModeBasis::at_level(g, level)?;
        let root = match &prev {
            None => match basis.ground_root()? {
                Some(r) => r,
                None => {
                    let why = if basis.is_definite(s_top) {
                        Unresolved::PrecisionFloor
                    } else {
                        Unresolved::NoRootInBracket
                    };
                    return Ok(SolveOutcome::Unresolved(why));
                }
            },
            Some((v, split)) => {
                let k = raw.len();
                let guess = if k >= 2 {
                    est[k - 1] + (raw[k - 1] - est[k - 1]) / q
                } else {
                    raw[k - 1]
                };
                let start = pad_outer(v, *split, basis.split());
                let p = basis.polish(guess.clamp(floor, s_top), floor, s_top, start)?;
                basis.finish(p)
            }
        };
        if root.gap <= floor * (1.0 + 1e-9) {
            return Ok(SolveOutcome::Unresolved(Unresolved::PrecisionFloor));
        }
        let k = raw.len();
        raw.push(root.gap);
        first.push(if k == 0 {
            root.gap
        } else {
            (q * raw[k] - raw[k - 1]) / (q - 1.0)
        });
        second.push(match k {
            0 | 1 => first[k],
            _ => (q2 * first[k] - first[k - 1]) / (q2 - 1.0),
        });
        est.push(match k {
            0..=2 => second[k],
            _ => (q3 * second[k] - second[k - 1]) / (q3 - 1.0),
        });
        levels.push(LevelRecord {
            n_inner: root.n_inner,
            raw_gap: root.gap,
            estimate: est[k],
        });
        // whichever extrapolation settles first; the third stage is preferred
        let settled = [(4, &est), (2, &second)].into_iter().find_map(|(min_k, seq)| {
            (k >= min_k).then(|| (seq[k], (seq[k] - seq[k - 1]).abs())).filter(|(v, e)| *e < opts.tol * v)
        });
        if k >= 1 {
            last_err = (est[k] - est[k - 1]).abs().min((second[k] - second[k - 1]).abs());
        }
        if settled.is_none() && k >= 2 && est[k].max(second[k]) < floor && last_err < floor {
            return Ok(SolveOutcome::Unresolved(Unresolved::PrecisionFloor));
        }
        if let Some((gap, err)) = settled {
            if gap <= floor {
                return Ok(SolveOutcome::Unresolved(Unresolved::PrecisionFloor));
            }
            return Ok(SolveOutcome::Bound(EigenResult {
                energy: thr - gap,
                gap,
                residual: root.residual,
                kernel_vector: root.inner.iter().cloned().collect(),
                outer_coefficients: root.outer.iter().cloned().collect(),
                truncation_error: err,
                n_modes: root.n_inner,
                n_outer: root.n_outer,
                raw_gap: root.gap,
                levels,
            }));
        }
        prev = Some((root.outer, basis.split()));
        level *= 2;
    }
    Err(Error::NoConvergence(format!(
        "truncation change {last_err:e} still above tol * gap after {} modes",
        level / 2
    )))
}
