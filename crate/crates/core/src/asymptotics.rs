//! Window sweeps, power-law fits of the gap and the two-sided quartic check.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ConstantChain;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::modematch::{solve_ground_state, SolveOutcome, Unresolved};

pub const CSV_HEADER: [&str; 5] = ["a", "E", "gap", "n_modes", "residual"];

/// `0.02 * sqrt(2)^k` for `k = 0..7`.
pub fn default_grid() -> Vec<f64> {
    (0..7).map(|k| 0.02 * 2f64.sqrt().powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Resolved,
    PrecisionFloor,
    NoRootInBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub gap: f64,
    pub n_modes: usize,
    pub residual: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub coefficient: f64,
    pub a_lo: f64,
    pub a_hi: f64,
    /// Largest `|ln gap - ln fit|` over the window.
    pub max_residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: Option<PowerFit>,
}

impl SweepResult {
    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        let fit = fit_power_law(&rows);
        SweepResult { rows, fit }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.a.to_string(),
                r.energy.to_string(),
                r.gap.to_string(),
                r.n_modes.to_string(),
                r.residual.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rows with a non-positive gap are read back as unresolved.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::Parse(format!("expected header {}, got {}", CSV_HEADER.join(","), header.join(","))));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("column {}: {e}", CSV_HEADER[i])))
            };
            let gap = num(2)?;
            rows.push(SweepRow {
                a: num(0)?,
                energy: num(1)?,
                gap,
                n_modes: rec[3]
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("column n_modes: {e}")))?,
                residual: num(4)?,
                status: if gap > 0.0 {
                    RowStatus::Resolved
                } else {
                    RowStatus::PrecisionFloor
                },
            });
        }
        if rows.windows(2).any(|w| !(w[0].a < w[1].a)) {
            return Err(Error::Parse("a column must be strictly increasing".into()));
        }
        Ok(SweepResult::from_rows(rows))
    }
}

fn row_for(g: &Geometry, tol: f64, n_max: usize) -> Result<SweepRow> {
    let thr = g.threshold();
    Ok(match solve_ground_state(g, tol, n_max)? {
        SolveOutcome::Bound(r) => SweepRow {
            a: g.a(),
            energy: r.energy,
            gap: r.gap,
            n_modes: r.n_modes,
            residual: r.residual,
            status: RowStatus::Resolved,
        },
        SolveOutcome::Unresolved(why) => SweepRow {
            a: g.a(),
            energy: thr,
            gap: 0.0,
            n_modes: 0,
            residual: 0.0,
            status: match why {
                Unresolved::PrecisionFloor => RowStatus::PrecisionFloor,
                Unresolved::NoRootInBracket => RowStatus::NoRootInBracket,
            },
        },
    })
}

/// Solves every window independently; `threads = 0` uses the global pool.
pub fn sweep(base: &Geometry, a_values: &[f64], tol: f64, n_max: usize, threads: usize) -> Result<SweepResult> {
    if a_values.is_empty() {
        return Err(Error::out_of_range("a_values", 0.0, "need at least one window"));
    }
    if a_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::out_of_range("a_values", f64::NAN, "must be strictly increasing"));
    }
    let limit = std::f64::consts::PI * base.d() / 8.0;
    if let Some(a) = a_values.iter().find(|a| **a >= limit) {
        return Err(Error::out_of_range("a", *a, format!("sweep windows must stay below pi d / 8 = {limit}")));
    }
    let geoms = a_values.iter().map(|a| base.with_window(*a)).collect::<Result<Vec<_>>>()?;
    let run = || geoms.par_iter().map(|g| row_for(g, tol, n_max)).collect::<Result<Vec<_>>>();
    let rows = if threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::out_of_range("threads", threads as f64, e.to_string()))?
            .install(run)?
    };
    Ok(SweepResult::from_rows(rows))
}

/// Least squares of `ln gap` on `ln a` over the lower half of the resolved rows.
pub fn fit_power_law(rows: &[SweepRow]) -> Option<PowerFit> {
    let resolved: Vec<&SweepRow> = rows.iter().filter(|r| r.status == RowStatus::Resolved && r.gap > 0.0).collect();
    let window = &resolved[..resolved.len().div_ceil(2)];
    if window.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = window.iter().map(|r| r.a.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|r| r.gap.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Some(PowerFit {
        slope,
        coefficient: intercept.exp(),
        a_lo: window[0].a,
        a_hi: window[window.len() - 1].a,
        max_residual,
        points: window.len(),
    })
}

/// Variational bound at one window, as read from the upper-bound output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperPoint {
    pub a: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub a: f64,
    pub gap: f64,
    /// `|value|` of the variational bound.
    pub variational: f64,
    /// `c1 a^4`.
    pub chain: f64,
    /// False for rows above `a_star` or without a resolved gap.
    pub checked: bool,
    /// `gap >= variational`.
    pub above_variational: bool,
    /// `gap <= chain`.
    pub below_chain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub verdict: Verdict,
    pub a_star: f64,
    pub c1: f64,
    pub rows: Vec<SandwichRow>,
    pub fit: Option<PowerFit>,
}

fn same_window(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
}

pub fn sandwich_report(s: &SweepResult, upper: &[UpperPoint], chain: &ConstantChain) -> Result<SandwichReport> {
    if upper.len() != s.rows.len() || s.rows.iter().zip(upper).any(|(r, u)| !same_window(r.a, u.a)) {
        return Err(Error::GridMismatch(format!(
            "sweep has {} windows, upper bounds have {}, or their a values differ",
            s.rows.len(),
            upper.len()
        )));
    }
    let rows: Vec<SandwichRow> = s
        .rows
        .iter()
        .zip(upper)
        .map(|(r, u)| {
            let variational = u.value.abs();
            let chain_bound = chain.c1 * r.a.powi(4);
            let checked = r.status == RowStatus::Resolved && r.gap > 0.0 && r.a <= chain.a_star;
            SandwichRow {
                a: r.a,
                gap: r.gap,
                variational,
                chain: chain_bound,
                checked,
                above_variational: r.gap >= variational,
                below_chain: r.gap <= chain_bound,
            }
        })
        .collect();
    let checked: Vec<&SandwichRow> = rows.iter().filter(|r| r.checked).collect();
    let verdict = if checked.iter().any(|r| !(r.above_variational && r.below_chain)) {
        Verdict::Fail
    } else if checked.is_empty() || s.fit.is_none() {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(SandwichReport {
        verdict,
        a_star: chain.a_star,
        c1: chain.c1,
        rows,
        fit: s.fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_chain;
    use approx::assert_relative_eq;

    fn synthetic(coef: f64, slope: f64) -> SweepResult {
        let rows = default_grid()
            .into_iter()
            .map(|a| SweepRow {
                a,
                energy: 0.0,
                gap: coef * a.powf(slope),
                n_modes: 64,
                residual: 1e-15,
                status: RowStatus::Resolved,
            })
            .collect();
        SweepResult::from_rows(rows)
    }

    #[test]
    fn grid_is_geometric() {
        let g = default_grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.02);
        for w in g.windows(2) {
            assert_relative_eq!(w[1] / w[0], 2f64.sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn fit_recovers_power_law() {
        let s = synthetic(240.0, 4.0);
        let f = s.fit.unwrap();
        assert_relative_eq!(f.slope, 4.0, max_relative = 1e-12);
        assert_relative_eq!(f.coefficient, 240.0, max_relative = 1e-10);
        assert_eq!(f.points, 4);
        assert_eq!(f.a_lo, 0.02);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let s = synthetic(240.0, 4.0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a,E,gap,n_modes,residual\n"));
        assert!(!text.contains('\r'));
        let back = SweepResult::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(matches!(
            SweepResult::read_csv("a,gap\n0.1,1\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    fn uppers(s: &SweepResult, scale: f64) -> Vec<UpperPoint> {
        s.rows.iter().map(|r| UpperPoint { a: r.a, value: -scale * r.a.powi(4) }).collect()
    }

    #[test]
    fn sandwich_pass_and_fault_injection() {
        let chain = build_chain(1.0, 0.16).unwrap();
        let s = synthetic(240.0, 4.0);
        let rep = sandwich_report(&s, &uppers(&s, 100.0), &chain).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);

        // doubling stays far below c1 a^4, so nothing fails
        let doubled = synthetic(480.0, 4.0);
        let rep = sandwich_report(&doubled, &uppers(&doubled, 100.0), &chain).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);

        // a gap above c1 a^4 trips exactly the chain check
        let huge = synthetic(2.0 * chain.c1, 4.0);
        let rep = sandwich_report(&huge, &uppers(&huge, 100.0), &chain).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.rows.iter().all(|r| !r.below_chain && r.above_variational));

        // a gap below the variational bound trips the other one
        let rep = sandwich_report(&s, &uppers(&s, 300.0), &chain).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.rows.iter().all(|r| !r.above_variational && r.below_chain));
    }

    #[test]
    fn sandwich_grid_mismatch() {
        let chain = build_chain(1.0, 0.16).unwrap();
        let s = synthetic(240.0, 4.0);
        let mut u = uppers(&s, 100.0);
        u[2].a *= 1.001;
        assert!(matches!(sandwich_report(&s, &u, &chain), Err(Error::GridMismatch(_))));
        assert!(matches!(sandwich_report(&s, &u[1..], &chain), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn floored_rows_are_inconclusive() {
        let chain = build_chain(1.0, 0.16).unwrap();
        let mut s = synthetic(240.0, 4.0);
        for r in &mut s.rows {
            r.gap = 0.0;
            r.status = RowStatus::PrecisionFloor;
        }
        let s = SweepResult::from_rows(s.rows);
        assert!(s.fit.is_none());
        let rep = sandwich_report(&s, &uppers(&s, 100.0), &chain).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn sweep_validation() {
        let g = Geometry::half_strip(1.0, 0.1).unwrap();
        assert!(sweep(&g, &[0.1, 0.05], 1e-6, 1024, 1).is_err());
        assert!(sweep(&g, &[0.1, 0.4], 1e-6, 1024, 1).is_err());
        assert!(sweep(&g, &[], 1e-6, 1024, 1).is_err());
    }

    #[test]
    fn small_sweep_is_ordered_and_monotone() {
        let g = Geometry::half_strip(1.0, 0.1).unwrap();
        let s = sweep(&g, &[0.16, 0.2, 0.25], 1e-6, 1024, 2).unwrap();
        assert_eq!(s.rows.iter().map(|r| r.a).collect::<Vec<_>>(), vec![0.16, 0.2, 0.25]);
        assert!(s.rows.windows(2).all(|w| w[0].gap < w[1].gap));
    }
}
