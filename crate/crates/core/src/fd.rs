//! Five-point finite-difference oracle for the ground state.
//!
//! The strip interiors are eliminated exactly: in each strip the discrete
//! Laplacian separates into sine modes across the strip and a tridiagonal
//! operator along it, whose inverse has a closed form. What remains is a
//! small symmetric Schur complement on the window nodes, singular exactly at
//! a discrete eigenvalue. The window sits on `y = 0`, the corner nodes
//! `(+-a, 0)` carry the Dirichlet value and the half-strip window uses a
//! ghost-node reflection, symmetrized by halving its row.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{eigen_bracket, Geometry};

/// Smallest admissible window as a fraction of the strip width.
pub const MIN_WINDOW_FRACTION: f64 = 0.2;
/// Smallest admissible truncation half-length in units of the strip width.
pub const MIN_EXTENT_FACTOR: f64 = 4.0;
const ALIGN_TOL: f64 = 1e-9;
/// The corner singularity limits the scheme to first order in `h`.
pub const CONVERGENCE_ORDER: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub h: f64,
    pub x_extent: f64,
    pub geometry: Geometry,
}

fn steps(len: f64, h: f64, name: &'static str) -> Result<usize> {
    let r = len / h;
    let n = r.round();
    if (r - n).abs() > ALIGN_TOL * r.max(1.0) {
        return Err(Error::out_of_range(name, len, format!("not a multiple of the grid step {h}")));
    }
    Ok(n as usize)
}

impl GridSpec {
    pub fn new(geometry: Geometry, h: f64, x_extent: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::out_of_range("h", h, "must be positive"));
        }
        let d = geometry.d();
        if !(x_extent >= MIN_EXTENT_FACTOR * d * (1.0 - ALIGN_TOL)) {
            return Err(Error::out_of_range("X", x_extent, format!("must be at least {MIN_EXTENT_FACTOR} d")));
        }
        steps(geometry.d1(), h, "d1")?;
        steps(geometry.d2(), h, "d2")?;
        steps(x_extent, h, "X")?;
        if steps(geometry.a(), h, "a")? < 1 {
            return Err(Error::out_of_range("a", geometry.a(), "window narrower than one grid step"));
        }
        Ok(GridSpec { h, x_extent, geometry })
    }

    pub fn refined(&self) -> Result<Self> {
        GridSpec::new(self.geometry, 0.5 * self.h, self.x_extent)
    }
}

/// Lowest eigenvalue of the discrete Dirichlet problem across a strip of
/// width `w`; it is the bottom of the discrete continuum.
pub fn discrete_strip_threshold(w: f64, h: f64) -> f64 {
    (2.0 / h * (PI * h / (2.0 * w)).sin()).powi(2)
}

/// Schur complement of the discrete operator onto the window nodes.
struct WindowSchur {
    h: f64,
    /// Interior nodes along `x`.
    nx_total: usize,
    /// 1-based global `x`-indices of the window nodes.
    nodes: Vec<usize>,
    /// `(2/ny) sin^2(q pi/ny)` and `lambda_q` for every strip and sine mode.
    strip_modes: Vec<(f64, f64)>,
    half_strip: bool,
}

impl WindowSchur {
    fn new(spec: &GridSpec) -> Result<Self> {
        let g = spec.geometry;
        let h = spec.h;
        let nx = steps(spec.x_extent, h, "X")?;
        let ia = steps(g.a(), h, "a")?;
        let nodes = ((nx + 1 - ia)..=(nx + ia - 1)).collect();
        let mut strip_modes = Vec::new();
        let widths: &[f64] = if g.is_half_strip() { &[g.d1()] } else { &[g.d1(), g.d2()] };
        for &w in widths {
            let ny = steps(w, h, "strip width")?;
            for q in 1..ny {
                let weight = 2.0 / ny as f64 * (q as f64 * PI / ny as f64).sin().powi(2);
                let lambda = (2.0 / h * (q as f64 * PI / (2.0 * ny as f64)).sin()).powi(2);
                strip_modes.push((weight, lambda));
            }
        }
        Ok(WindowSchur {
            h,
            nx_total: 2 * nx - 1,
            nodes,
            strip_modes,
            half_strip: g.is_half_strip(),
        })
    }

    fn size(&self) -> usize {
        self.nodes.len()
    }

    fn matrix(&self, e: f64) -> DMatrix<f64> {
        let nw = self.size();
        let h2 = self.h * self.h;
        let span = 2.0 * (self.nx_total + 1) as f64;
        let first = self.nodes[0];
        // Green's function of tridiag(-1, 2 + mu h^2, -1) is a Toeplitz part
        // in |i - k| plus a Hankel part in i + k.
        let mut toeplitz = vec![0.0; nw];
        let mut hankel = vec![0.0; 2 * nw - 1];
        for &(weight, lambda) in &self.strip_modes {
            let mu = lambda - e;
            let theta = 2.0 * (0.5 * self.h * mu.sqrt()).asinh();
            let den = 2.0 * theta.sinh() * -(-theta * span).exp_m1();
            let f = |j: f64| ((-theta * j).exp() + (-theta * (span - j)).exp()) * weight / den;
            for (j, t) in toeplitz.iter_mut().enumerate() {
                *t += f(j as f64);
            }
            for (j, hk) in hankel.iter_mut().enumerate() {
                *hk += f((2 * first + j) as f64);
            }
        }
        let (diag, off, mass) = if self.half_strip { (2.0, -0.5, 0.5) } else { (4.0, -1.0, 1.0) };
        DMatrix::from_fn(nw, nw, |i, k| {
            let stencil = match i.abs_diff(k) {
                0 => diag / h2 - e * mass,
                1 => off / h2,
                _ => 0.0,
            };
            stencil - (toeplitz[i.abs_diff(k)] - hankel[i + k]) / h2
        })
    }

    fn lowest(&self, e: f64) -> f64 {
        self.matrix(e).symmetric_eigenvalues().min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdLevel {
    pub energy: f64,
    pub h: f64,
    pub discrete_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdResult {
    /// Extrapolated eigenvalue.
    pub energy: f64,
    pub coarse: FdLevel,
    pub fine: FdLevel,
    pub h: f64,
    pub x_extent: f64,
}

/// Discrete ground state on a single grid.
pub fn fd_eigenvalue(spec: &GridSpec) -> Result<FdLevel> {
    let g = spec.geometry;
    let schur = WindowSchur::new(spec)?;
    let thr = discrete_strip_threshold(g.d(), spec.h);
    let top = thr * (1.0 - 1e-12);
    let f_top = schur.lowest(top);
    if f_top >= 0.0 {
        return Err(Error::BracketEmpty {
            threshold: thr,
            lowest: f_top,
        });
    }
    let mut bottom = eigen_bracket(&g).e_min;
    let mut tries = 0;
    while schur.lowest(bottom) <= 0.0 {
        bottom *= 0.5;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoConvergence("no positive lower end for the discrete eigenvalue search".into()));
        }
    }
    let mut conv = SimpleConvergency {
        eps: 1e-13 * thr,
        max_iter: 200,
    };
    let energy = find_root_brent(bottom, top, |e| schur.lowest(e), &mut conv)
        .map_err(|e| Error::NoConvergence(format!("discrete eigenvalue search: {e:?}")))?;
    Ok(FdLevel {
        energy,
        h: spec.h,
        discrete_threshold: thr,
    })
}

/// Eigenvalue at `h` and `h/2`, extrapolated at the scheme's observed order.
pub fn fd_ground_state(spec: &GridSpec) -> Result<FdResult> {
    let g = spec.geometry;
    if g.a() < MIN_WINDOW_FRACTION * g.d() {
        return Err(Error::out_of_range(
            "a",
            g.a(),
            format!("the oracle is only meant for a >= {MIN_WINDOW_FRACTION} d"),
        ));
    }
    let coarse = fd_eigenvalue(spec)?;
    let fine = fd_eigenvalue(&spec.refined()?)?;
    let r = 2f64.powf(CONVERGENCE_ORDER);
    Ok(FdResult {
        energy: (r * fine.energy - coarse.energy) / (r - 1.0),
        coarse,
        fine,
        h: spec.h,
        x_extent: spec.x_extent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn half(a: f64) -> Geometry {
        Geometry::half_strip(1.0, a).unwrap()
    }

    #[test]
    fn strip_threshold_is_second_order() {
        let h = 1.0 / 80.0;
        let err = PI * PI - discrete_strip_threshold(1.0, h);
        assert_relative_eq!(err, PI.powi(4) / 12.0 * h * h, max_relative = 1e-3);
        let err2 = PI * PI - discrete_strip_threshold(1.0, 0.5 * h);
        assert_relative_eq!(err / err2, 4.0, max_relative = 1e-3);
    }

    #[test]
    fn schur_matrix_matches_brute_force() {
        // Dense discrete operator on a tiny grid, window rows eliminated by hand.
        let g = Geometry::symmetric_pair(1.0, 0.25).unwrap();
        let spec = GridSpec::new(g, 0.125, 4.0).unwrap();
        let schur = WindowSchur::new(&spec).unwrap();
        let h = spec.h;
        let nx = 32usize;
        let ncol = 2 * nx - 1;
        let ny = 8usize;
        // rows y = -7h..7h, y = 0 only at window columns
        let win: Vec<usize> = schur.nodes.clone();
        let mut index = std::collections::HashMap::new();
        let mut count = 0;
        for j in -(ny as i64 - 1)..=(ny as i64 - 1) {
            for i in 1..=ncol {
                if j != 0 || win.contains(&i) {
                    index.insert((i, j), count);
                    count += 1;
                }
            }
        }
        let e = 8.0;
        let mut k = DMatrix::<f64>::zeros(count, count);
        for (&(i, j), &r) in &index {
            k[(r, r)] = 4.0 / (h * h) - e;
            for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let key = ((i as i64 + di) as usize, j + dj);
                if let Some(&c) = index.get(&key) {
                    k[(r, c)] = -1.0 / (h * h);
                }
            }
        }
        // Schur complement onto the window rows
        let w_idx: Vec<usize> = win.iter().map(|i| index[&(*i, 0)]).collect();
        let rest: Vec<usize> = (0..count).filter(|r| !w_idx.contains(r)).collect();
        let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |a, b| k[(rows[a], cols[b])]);
        let kww = pick(&w_idx, &w_idx);
        let kwr = pick(&w_idx, &rest);
        let krr = pick(&rest, &rest);
        let s = kww - &kwr * krr.lu().solve(&kwr.transpose()).unwrap();
        let fast = schur.matrix(e);
        assert!((s - fast).abs().max() < 1e-8);
    }

    #[test]
    fn half_strip_and_pair_agree() {
        let h = 1.0 / 40.0;
        let a = half(0.3);
        let b = Geometry::symmetric_pair(1.0, 0.3).unwrap();
        let ea = fd_eigenvalue(&GridSpec::new(a, h, 4.0).unwrap()).unwrap().energy;
        let eb = fd_eigenvalue(&GridSpec::new(b, h, 4.0).unwrap()).unwrap().energy;
        assert_relative_eq!(ea, eb, max_relative = 1e-12);
    }

    #[test]
    fn discrete_eigenvalue_lies_below_discrete_threshold() {
        for a in [0.2, 0.3, 0.45] {
            let spec = GridSpec::new(half(a), 1.0 / 40.0, 4.0).unwrap();
            let lvl = fd_eigenvalue(&spec).unwrap();
            assert!(lvl.energy < lvl.discrete_threshold);
            assert!(lvl.energy > (PI / 2.0).powi(2));
        }
    }

    #[test]
    fn first_order_convergence() {
        // the change halves with h because of the window-corner singularity
        let g = half(0.3);
        let e: Vec<f64> = [40.0, 80.0, 160.0]
            .iter()
            .map(|n| fd_eigenvalue(&GridSpec::new(g, 1.0 / n, 4.0).unwrap()).unwrap().energy)
            .collect();
        let ratio = (e[1] - e[0]) / (e[2] - e[1]);
        assert!(ratio > 1.7 && ratio < 2.3, "ratio {ratio}");
    }

    #[test]
    fn grid_validation() {
        let g = half(0.3);
        assert!(GridSpec::new(g, 0.07, 4.2).is_err());
        assert!(GridSpec::new(g, 0.1, 3.0).is_err());
        assert!(GridSpec::new(g, -0.1, 4.0).is_err());
        assert!(GridSpec::new(g, 0.1, 4.0).is_ok());
        let narrow = GridSpec::new(half(0.1), 0.05, 4.0).unwrap();
        assert!(matches!(fd_ground_state(&narrow), Err(Error::OutOfRange { name: "a", .. })));
    }
}
