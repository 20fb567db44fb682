//! One-dimensional variational oracles for the inequalities behind the
//! lower bound.
//!
//! A quadratic form `int phi'^2 + c(t) phi^2` is discretized with linear
//! finite elements. Dirichlet endpoints are fixed, linear constraints are
//! removed exactly with Householder reflections, and the reduced problem is
//! either an energy minimization (inhomogeneous data) or a generalized
//! eigenproblem (homogeneous data, Rayleigh quotient against `int phi^2`).

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{mode_norm_on_subinterval, overlap, TransverseMode};

pub const MIN_CELLS: usize = 64;
/// Relative change between `n` and `2n` cells accepted by `min_quadratic_form`.
pub const ACCEPT_CHANGE: f64 = 0.01;
const MAX_REFINEMENTS: usize = 6;

// three-point Gauss-Legendre on [-1, 1]
const GL_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_W: [f64; 3] = [0.555_555_555_555_555_6, 0.888_888_888_888_888_9, 0.555_555_555_555_555_6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    /// Number of cells; nodes are `t0 + i h` for `i = 0..=n`.
    pub n: usize,
    pub t0: f64,
    pub t1: f64,
}

impl Grid1D {
    pub fn new(n: usize, t0: f64, t1: f64) -> Result<Self> {
        if n < MIN_CELLS {
            return Err(Error::out_of_range("n", n as f64, format!("need at least {MIN_CELLS} cells")));
        }
        if !(t1 > t0 && t0.is_finite() && t1.is_finite()) {
            return Err(Error::out_of_range("interval", t1 - t0, "need t0 < t1"));
        }
        Ok(Grid1D { n, t0, t1 })
    }

    pub fn h(&self) -> f64 {
        (self.t1 - self.t0) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h()
    }

    pub fn refined(&self) -> Self {
        Grid1D { n: 2 * self.n, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    Dirichlet(f64),
    Free,
}

/// `values[k]` applies between `breaks[k-1]` and `breaks[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn constant(v: f64) -> Self {
        PiecewiseConstant {
            breaks: vec![],
            values: vec![v],
        }
    }

    pub fn two_piece(split: f64, left: f64, right: f64) -> Self {
        PiecewiseConstant {
            breaks: vec![split],
            values: vec![left, right],
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        let k = self.breaks.iter().take_while(|b| t >= **b).count();
        self.values[k]
    }
}

pub type Weight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `int weight * phi = target`.
#[derive(Clone)]
pub struct LinearConstraint {
    pub weight: Weight,
    pub target: f64,
}

impl std::fmt::Debug for LinearConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearConstraint").field("target", &self.target).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Minimum of the form under the boundary data and constraints.
    Energy,
    /// Minimum of the form over `int phi^2`; data must be homogeneous.
    Rayleigh,
}

#[derive(Debug, Clone)]
pub struct QuadraticFormSpec {
    pub mass: PiecewiseConstant,
    pub left: Boundary,
    pub right: Boundary,
    pub constraints: Vec<LinearConstraint>,
    pub objective: Objective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormMinimum {
    pub value: f64,
    /// Minimizer at the grid nodes.
    pub samples: Vec<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergedMinimum {
    pub value: f64,
    pub coarse_value: f64,
    pub samples: Vec<f64>,
    pub n: usize,
}

struct Assembled {
    form: DMatrix<f64>,
    mass: DMatrix<f64>,
    constraints: DMatrix<f64>,
    targets: DVector<f64>,
}

fn simpson(f: impl Fn(f64) -> f64, s0: f64, s1: f64) -> f64 {
    (s1 - s0) / 6.0 * (f(s0) + 4.0 * f(0.5 * (s0 + s1)) + f(s1))
}

fn assemble(spec: &QuadraticFormSpec, grid: &Grid1D) -> Assembled {
    let n = grid.n;
    let h = grid.h();
    let mut form = DMatrix::zeros(n + 1, n + 1);
    let mut mass = DMatrix::zeros(n + 1, n + 1);
    let mut constraints = DMatrix::zeros(spec.constraints.len(), n + 1);
    for i in 0..n {
        let (l, r) = (grid.node(i), grid.node(i + 1));
        let n0 = |t: f64| (r - t) / h;
        let n1 = |t: f64| (t - l) / h;
        // stiffness
        form[(i, i)] += 1.0 / h;
        form[(i + 1, i + 1)] += 1.0 / h;
        form[(i, i + 1)] -= 1.0 / h;
        form[(i + 1, i)] -= 1.0 / h;
        // coefficient mass, exact on every piece of the cell
        let mut cuts = vec![l];
        cuts.extend(spec.mass.breaks.iter().cloned().filter(|b| *b > l && *b < r));
        cuts.push(r);
        for w in cuts.windows(2) {
            let c = spec.mass.at(0.5 * (w[0] + w[1]));
            let m00 = simpson(|t| n0(t) * n0(t), w[0], w[1]);
            let m01 = simpson(|t| n0(t) * n1(t), w[0], w[1]);
            let m11 = simpson(|t| n1(t) * n1(t), w[0], w[1]);
            form[(i, i)] += c * m00;
            form[(i, i + 1)] += c * m01;
            form[(i + 1, i)] += c * m01;
            form[(i + 1, i + 1)] += c * m11;
        }
        mass[(i, i)] += h / 3.0;
        mass[(i + 1, i + 1)] += h / 3.0;
        mass[(i, i + 1)] += h / 6.0;
        mass[(i + 1, i)] += h / 6.0;
        for (k, con) in spec.constraints.iter().enumerate() {
            let (mut a0, mut a1) = (0.0, 0.0);
            for (x, w) in GL_X.iter().zip(GL_W.iter()) {
                let t = 0.5 * (l + r) + 0.5 * h * x;
                let f = (con.weight)(t) * 0.5 * h * w;
                a0 += f * n0(t);
                a1 += f * n1(t);
            }
            constraints[(k, i)] += a0;
            constraints[(k, i + 1)] += a1;
        }
    }
    let targets = DVector::from_iterator(spec.constraints.len(), spec.constraints.iter().map(|c| c.target));
    Assembled {
        form,
        mass,
        constraints,
        targets,
    }
}

/// Unit Householder vectors mapping the columns of `c` (rows = unknowns)
/// onto the leading coordinates, plus the resulting triangular factor.
fn householder(mut c: DMatrix<f64>) -> Result<(Vec<DVector<f64>>, DMatrix<f64>)> {
    let (rows, k) = c.shape();
    if k > rows {
        return Err(Error::ConstraintDegeneracy);
    }
    let scale = c.amax();
    let mut vs = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = DVector::zeros(rows);
        for i in j..rows {
            v[i] = c[(i, j)];
        }
        let norm = v.norm();
        if norm <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ConstraintDegeneracy);
        }
        let sign = if v[j] >= 0.0 { 1.0 } else { -1.0 };
        v[j] += sign * norm;
        let vn = v.norm();
        v /= vn;
        // c <- (I - 2 v v^T) c
        let vt_c = v.transpose() * &c;
        c.ger(-2.0, &v, &vt_c.transpose(), 1.0);
        vs.push(v);
    }
    let r = c.rows(0, k).into_owned();
    Ok((vs, r))
}

fn reflect_vec(vs: &[DVector<f64>], x: &mut DVector<f64>) {
    for v in vs {
        let s = 2.0 * v.dot(x);
        x.axpy(-s, v, 1.0);
    }
}

fn reflect_vec_back(vs: &[DVector<f64>], x: &mut DVector<f64>) {
    for v in vs.iter().rev() {
        let s = 2.0 * v.dot(x);
        x.axpy(-s, v, 1.0);
    }
}

fn reflect_sym(vs: &[DVector<f64>], b: &mut DMatrix<f64>) {
    for v in vs {
        let u = &*b * v;
        let vu = v.dot(&u);
        b.ger(-2.0, v, &u, 1.0);
        b.ger(-2.0, &u, v, 1.0);
        b.ger(4.0 * vu, v, v, 1.0);
    }
}

/// Minimum of the discretized problem on one grid.
pub fn minimize_on_grid(spec: &QuadraticFormSpec, grid: &Grid1D) -> Result<FormMinimum> {
    let asm = assemble(spec, grid);
    let n_nodes = grid.n + 1;
    let mut fixed = DVector::zeros(n_nodes);
    let mut free: Vec<usize> = (0..n_nodes).collect();
    if let Boundary::Dirichlet(v) = spec.right {
        fixed[grid.n] = v;
        free.pop();
    }
    if let Boundary::Dirichlet(v) = spec.left {
        fixed[0] = v;
        free.remove(0);
    }
    let nf = free.len();
    let k = spec.constraints.len();
    if spec.objective == Objective::Rayleigh
        && (fixed.iter().any(|x| *x != 0.0) || asm.targets.iter().any(|x| *x != 0.0))
    {
        return Err(Error::out_of_range(
            "boundary data",
            fixed.amax().max(asm.targets.amax()),
            "a Rayleigh quotient needs homogeneous data",
        ));
    }
    let a_fixed = &asm.form * &fixed;
    let constant = fixed.dot(&a_fixed);
    let mut b = DMatrix::from_fn(nf, nf, |i, j| asm.form[(free[i], free[j])]);
    let mut lin = DVector::from_fn(nf, |i, _| a_fixed[free[i]]);
    let shifted_targets = &asm.targets - &asm.constraints * &fixed;
    let (vs, r) = if k > 0 {
        householder(DMatrix::from_fn(nf, k, |i, j| asm.constraints[(j, free[i])]))?
    } else {
        (Vec::new(), DMatrix::zeros(0, 0))
    };
    reflect_sym(&vs, &mut b);
    reflect_vec(&vs, &mut lin);
    // leading coordinates are pinned by R^T w1 = g
    let w1 = if k > 0 {
        r.transpose()
            .solve_lower_triangular(&shifted_targets)
            .ok_or(Error::ConstraintDegeneracy)?
    } else {
        DVector::zeros(0)
    };
    let m = nf - k;
    let b22 = b.view((k, k), (m, m)).into_owned();
    let b21 = b.view((k, 0), (m, k)).into_owned();
    let mut w = DVector::zeros(nf);
    w.rows_mut(0, k).copy_from(&w1);
    let value = match spec.objective {
        Objective::Energy => {
            let rhs = -(lin.rows(k, m) + &b21 * &w1);
            let chol = b22.cholesky().ok_or(Error::IndefiniteForm)?;
            let w2 = chol.solve(&rhs);
            w.rows_mut(k, m).copy_from(&w2);
            constant + 2.0 * lin.dot(&w) + w.dot(&(&b * &w))
        }
        Objective::Rayleigh => {
            let mut mm = DMatrix::from_fn(nf, nf, |i, j| asm.mass[(free[i], free[j])]);
            reflect_sym(&vs, &mut mm);
            let m22 = mm.view((k, k), (m, m)).into_owned();
            let l = m22.cholesky().ok_or(Error::ConstraintDegeneracy)?.l();
            let linv_b = l.solve_lower_triangular(&b22).ok_or(Error::ConstraintDegeneracy)?;
            let c = l
                .solve_lower_triangular(&linv_b.transpose())
                .ok_or(Error::ConstraintDegeneracy)?;
            let c = 0.5 * (&c + c.transpose());
            let eig = c.symmetric_eigen();
            let (idx, lam) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
            let y = eig.eigenvectors.column(idx).into_owned();
            let w2 = l.transpose().solve_upper_triangular(&y).ok_or(Error::ConstraintDegeneracy)?;
            w.rows_mut(k, m).copy_from(&w2);
            lam
        }
    };
    reflect_vec_back(&vs, &mut w);
    let mut samples = fixed.clone();
    for (i, f) in free.iter().enumerate() {
        samples[*f] = w[i];
    }
    if spec.objective == Objective::Rayleigh {
        let norm = samples.dot(&(&asm.mass * &samples)).sqrt();
        if norm > 0.0 {
            samples /= norm;
        }
    }
    Ok(FormMinimum {
        value,
        samples: samples.iter().cloned().collect(),
        n: grid.n,
    })
}

/// Refines from `grid` until two successive minima differ by less than 1%.
pub fn min_quadratic_form(spec: &QuadraticFormSpec, grid: &Grid1D) -> Result<ConvergedMinimum> {
    let mut g = *grid;
    let mut prev = minimize_on_grid(spec, &g)?;
    for _ in 0..MAX_REFINEMENTS {
        g = g.refined();
        let next = minimize_on_grid(spec, &g)?;
        if (next.value - prev.value).abs() <= ACCEPT_CHANGE * next.value.abs().max(f64::MIN_POSITIVE) {
            return Ok(ConvergedMinimum {
                value: next.value,
                coarse_value: prev.value,
                samples: next.samples,
                n: next.n,
            });
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!(
        "form minimum still changing by more than {ACCEPT_CHANGE} at {} cells",
        g.n
    )))
}

/// `(v_n - v_2n) / (v_2n - v_4n)`; about 4 for a second-order scheme.
pub fn convergence_ratio(v: [f64; 3]) -> f64 {
    (v[0] - v[1]) / (v[1] - v[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub numeric: f64,
    pub closed_form: f64,
    pub ratio: f64,
}

impl LemmaReport {
    fn new(numeric: f64, closed_form: f64) -> Self {
        LemmaReport {
            numeric,
            closed_form,
            ratio: numeric / closed_form,
        }
    }
}

fn chi1(d: f64) -> Weight {
    Arc::new(move |t: f64| (2.0 / d).sqrt() * (PI * t / d).sin())
}

/// Half-line bound: `int phi'^2 + m^2 phi^2 >= m alpha^2` for `phi(0) = alpha`,
/// on `[0, 12/m]` with a free far end.
pub fn lemma1(m: f64, alpha: f64, n: usize) -> Result<LemmaReport> {
    if !(m > 0.0) {
        return Err(Error::out_of_range("m", m, "must be positive"));
    }
    let spec = QuadraticFormSpec {
        mass: PiecewiseConstant::constant(m * m),
        left: Boundary::Dirichlet(alpha),
        right: Boundary::Free,
        constraints: vec![],
        objective: Objective::Energy,
    };
    let r = min_quadratic_form(&spec, &Grid1D::new(n, 0.0, 12.0 / m)?)?;
    Ok(LemmaReport::new(r.value, m * alpha * alpha))
}

/// Interval bound: `int phi'^2 >= (pi/2b)^2 int phi^2` for `phi(+-b) = 0`.
pub fn lemma2(b: f64, n: usize) -> Result<LemmaReport> {
    if !(b > 0.0) {
        return Err(Error::out_of_range("b", b, "must be positive"));
    }
    let spec = QuadraticFormSpec {
        mass: PiecewiseConstant::constant(0.0),
        left: Boundary::Dirichlet(0.0),
        right: Boundary::Dirichlet(0.0),
        constraints: vec![],
        objective: Objective::Rayleigh,
    };
    let r = min_quadratic_form(&spec, &Grid1D::new(n, -b, b)?)?;
    Ok(LemmaReport::new(r.value, (PI / (2.0 * b)).powi(2)))
}

/// What the overlap argument alone certifies for an even function whose
/// normalized overlap with `|g_2|` is below `eps1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Route {
    /// `<chi_1, phi_1>`, equal to `8 / (3 pi)`.
    pub xi1: f64,
    /// Largest `eps1` for which the route still beats `(pi/d)^2`.
    pub eps1_critical: f64,
    /// The `eps1` used downstream, half the critical value.
    pub eps1: f64,
    /// Largest admissible `|gamma_1|` at `eps1`.
    pub gamma_max: f64,
    /// `(pi/2d)^2 (9 - 8 gamma_max^2)`.
    pub bound: f64,
    pub epsilon2: f64,
    /// `7 pi^2 / (4 d^2)`, the value the route is stated to reach.
    pub stated_bound: f64,
    pub stated_bound_reached: bool,
}

/// Largest `|gamma_1|` allowed by `xi1 |gamma| <= eps1 + sqrt(1 - xi1^2) sqrt(1 - gamma^2)`.
pub fn gamma_max(xi1: f64, eps1: f64) -> f64 {
    if eps1 >= xi1 {
        return 1.0;
    }
    eps1 * xi1 + (1.0 - eps1 * eps1).sqrt() * (1.0 - xi1 * xi1).sqrt()
}

pub fn lemma3_route(d: f64) -> Result<Lemma3Route> {
    if !(d > 0.0) {
        return Err(Error::out_of_range("d", d, "must be positive"));
    }
    let xi1 = overlap(&TransverseMode::outer(1, 0.0, d), &TransverseMode::neumann_dirichlet(1, d))?;
    // route bound beats (pi/d)^2 while gamma^2 < 5/8
    let beta = xi1.acos();
    let eps1_critical = ((5.0f64 / 8.0).sqrt().acos() + beta).cos();
    let eps1 = 0.5 * eps1_critical;
    let g = gamma_max(xi1, eps1);
    let base = (PI / (2.0 * d)).powi(2);
    let bound = base * (9.0 - 8.0 * g * g);
    let stated = 7.0 * PI * PI / (4.0 * d * d);
    Ok(Lemma3Route {
        xi1,
        eps1_critical,
        eps1,
        gamma_max: g,
        bound,
        epsilon2: bound / (PI / d).powi(2) - 1.0,
        stated_bound: stated,
        stated_bound_reached: bound >= stated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    /// `min int phi'^2 / int phi^2` over `phi(d) = 0`, `phi` orthogonal to `chi_1`.
    pub minimum: f64,
    pub epsilon2: f64,
    /// `|<phi, chi_1>| / ||phi||` of the discrete minimizer.
    pub constraint_overlap: f64,
    /// Whether the exact minimum itself reaches `7 pi^2 / (4 d^2)`.
    pub reaches_stated_bound: bool,
    pub route: Lemma3Route,
    pub samples: Vec<f64>,
}

fn lemma3_spec(d: f64, orthogonal: bool) -> QuadraticFormSpec {
    QuadraticFormSpec {
        mass: PiecewiseConstant::constant(0.0),
        left: Boundary::Free,
        right: Boundary::Dirichlet(0.0),
        constraints: if orthogonal {
            vec![LinearConstraint {
                weight: chi1(d),
                target: 0.0,
            }]
        } else {
            vec![]
        },
        objective: Objective::Rayleigh,
    }
}

/// Exact `int chi_1 phi` for a piecewise linear `phi`, by five-point
/// Gauss-Legendre per cell (the integrand is smooth on every cell).
fn chi1_overlap_p1(d: f64, grid: &Grid1D, samples: &[f64]) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let h = grid.h();
    let chi = chi1(d);
    (0..grid.n)
        .map(|i| {
            let l = grid.node(i);
            X.iter()
                .zip(W.iter())
                .map(|(x, w)| {
                    let s = 0.5 * (1.0 + x);
                    let phi = samples[i] * (1.0 - s) + samples[i + 1] * s;
                    0.5 * h * w * chi(l + s * h) * phi
                })
                .sum::<f64>()
        })
        .sum()
}

/// Orthogonality gap on `[0, d]` with `n` cells.
pub fn lemma3_gap(d: f64, n: usize) -> Result<Lemma3Report> {
    let route = lemma3_route(d)?;
    let grid = Grid1D::new(n, 0.0, d)?;
    let r = minimize_on_grid(&lemma3_spec(d, true), &grid)?;
    let epsilon2 = r.value / (PI / d).powi(2) - 1.0;
    if !(epsilon2 > 0.0) {
        return Err(Error::NoConvergence(format!("orthogonality gap is not positive: {epsilon2}")));
    }
    let constraint_overlap = chi1_overlap_p1(d, &grid, &r.samples).abs();
    Ok(Lemma3Report {
        minimum: r.value,
        epsilon2,
        constraint_overlap,
        reaches_stated_bound: r.value >= route.stated_bound,
        route,
        samples: r.samples,
    })
}

/// The same minimum without the orthogonality constraint.
pub fn lemma3_unconstrained(d: f64, n: usize) -> Result<f64> {
    Ok(minimize_on_grid(&lemma3_spec(d, false), &Grid1D::new(n, 0.0, d)?)?.value)
}

/// Largest `a` with `2 ||chi_1||_{[0,a]} < eps1`.
pub fn window_threshold(d: f64, eps1: f64) -> Result<f64> {
    let chi = TransverseMode::outer(1, 0.0, d);
    let f = |a: f64| -> Result<f64> { Ok(2.0 * mode_norm_on_subinterval(&chi, 0.0, a)?.sqrt() - eps1) };
    if f(d)? <= 0.0 {
        return Ok(d);
    }
    let (mut lo, mut hi) = (0.0, d);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * d {
            break;
        }
    }
    Ok(lo)
}

/// Closed-form constant `(m / sqrt 3) tanh(m / sqrt 3)`.
pub fn c0_closed_form(m: f64) -> f64 {
    let mu = m / 3f64.sqrt();
    mu * mu.tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    /// `a * min M(phi) / beta^2`.
    pub numeric: f64,
    pub closed_form: f64,
    pub ratio: f64,
    pub a0: f64,
    /// `min(a0, m d / (pi sqrt 3))`.
    pub a_limit: f64,
}

pub fn lemma4_constant(m: f64, d: f64, a: f64, n: usize) -> Result<Lemma4Report> {
    lemma4_constant_with_beta(m, d, a, n, 1.0)
}

pub fn lemma4_constant_with_beta(m: f64, d: f64, a: f64, n: usize, beta: f64) -> Result<Lemma4Report> {
    if !(m > 0.0) {
        return Err(Error::out_of_range("m", m, "must be positive"));
    }
    if !(beta != 0.0 && beta.is_finite()) {
        return Err(Error::out_of_range("beta", beta, "must be nonzero"));
    }
    let route = lemma3_route(d)?;
    let a0 = window_threshold(d, route.eps1)?;
    let a_limit = a0.min(m * d / (PI * 3f64.sqrt()));
    if !(a > 0.0 && a < a_limit) {
        return Err(Error::out_of_range("a", a, format!("the window estimate needs 0 < a < {a_limit}")));
    }
    let thr = (PI / d).powi(2);
    let spec = QuadraticFormSpec {
        mass: PiecewiseConstant::two_piece(a, (m / a).powi(2) - thr, -thr),
        left: Boundary::Dirichlet(beta),
        right: Boundary::Dirichlet(0.0),
        constraints: vec![LinearConstraint {
            weight: chi1(d),
            target: 0.0,
        }],
        objective: Objective::Energy,
    };
    let r = minimize_on_grid(&spec, &Grid1D::new(n, 0.0, d)?)?;
    let numeric = a * r.value / (beta * beta);
    let closed = c0_closed_form(m);
    Ok(Lemma4Report {
        numeric,
        closed_form: closed,
        ratio: numeric / closed,
        a0,
        a_limit,
    })
}
