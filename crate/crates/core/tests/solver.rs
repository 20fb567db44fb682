use std::f64::consts::PI;

use nalgebra::DVector;
use windowgap::fd::{fd_ground_state, GridSpec};
use windowgap::modematch::ModeBasis;
use windowgap::varbound::optimize_trial;
use windowgap::{solve_ground_state, Geometry, SolveOutcome};

fn gap(g: &Geometry, tol: f64) -> f64 {
    solve_ground_state(g, tol, 4096).unwrap().into_bound().unwrap().gap
}

#[test]
fn half_strip_and_symmetric_pair_agree() {
    for a in [0.1, 0.2, 0.3] {
        let h = gap(&Geometry::half_strip(1.0, a).unwrap(), 1e-7);
        let p = gap(&Geometry::symmetric_pair(1.0, a).unwrap(), 1e-7);
        assert!((h - p).abs() <= 1e-8 * h, "a={a}: {h} vs {p}");
    }
}

#[test]
fn energy_lies_in_the_bracket() {
    let r = solve_ground_state(&Geometry::symmetric_pair(1.0, 0.3).unwrap(), 1e-8, 2048)
        .unwrap()
        .into_bound()
        .unwrap();
    assert!(r.energy > (PI / 2.0).powi(2) && r.energy < PI * PI);
    assert!((r.energy - 8.675_091_096_7).abs() < 1e-7, "{}", r.energy);
}

#[test]
fn finite_differences_agree_with_mode_matching() {
    let g = Geometry::symmetric_pair(1.0, 0.3).unwrap();
    let fd = fd_ground_state(&GridSpec::new(g, 1.0 / 160.0, 6.0).unwrap()).unwrap();
    let mm = solve_ground_state(&g, 1e-8, 2048).unwrap().into_bound().unwrap();
    let rel = (fd.energy - mm.energy).abs() / mm.energy;
    assert!(rel < 1e-3, "{} vs {} ({rel:e})", fd.energy, mm.energy);
}

#[test]
fn finite_differences_agree_for_unequal_strips() {
    let g = Geometry::new(1.0, 0.5, 0.25).unwrap();
    let fd = fd_ground_state(&GridSpec::new(g, 1.0 / 80.0, 6.0).unwrap()).unwrap();
    let mm = solve_ground_state(&g, 1e-8, 4096).unwrap().into_bound().unwrap();
    let rel = (fd.energy - mm.energy).abs() / mm.energy;
    assert!(rel < 1e-3, "{} vs {} ({rel:e})", fd.energy, mm.energy);
}

#[test]
fn trial_bound_stays_below_the_gap() {
    for (d1, d2) in [(1.0, 0.0), (1.0, 1.0), (1.0, 0.5)] {
        for a in [0.04, 0.08, 0.16] {
            let g = Geometry::new(d1, d2, a).unwrap();
            let s = gap(&g, 1e-5);
            let ub = optimize_trial(&g).unwrap();
            assert!(ub.value < 0.0 && -ub.value <= s, "d2={d2} a={a}: {} vs {s}", ub.value);
        }
    }
}

#[test]
fn gap_grows_with_the_window() {
    let mut prev = 0.0;
    for a in [0.05, 0.1, 0.15, 0.2, 0.3, 0.4] {
        let s = gap(&Geometry::half_strip(1.0, a).unwrap(), 1e-7);
        assert!(s > prev);
        prev = s;
    }
}

#[test]
fn tiny_window_hits_the_precision_floor() {
    let out = solve_ground_state(&Geometry::half_strip(1.0, 1e-4).unwrap(), 1e-6, 2048).unwrap();
    assert!(matches!(out, SolveOutcome::Unresolved(_)));
}

#[test]
fn truncated_gaps_converge_toward_the_extrapolation() {
    let r = solve_ground_state(&Geometry::half_strip(1.0, 0.2).unwrap(), 1e-9, 4096)
        .unwrap()
        .into_bound()
        .unwrap();
    let errs: Vec<f64> = r.levels.iter().map(|l| (l.raw_gap - r.gap).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    // leading truncation error shrinks by about 2^1.5 per doubling
    let last = errs.len() - 1;
    let ratio = errs[last - 1] / errs[last];
    assert!(ratio > 2.3 && ratio < 3.5, "{ratio}");
}

/// Value continuity across the junction improves like 1/N; the normal
/// derivative does not converge in the mean-square sense, because the
/// corner singularity puts the derivative outside the trace space.
#[test]
fn junction_mismatch_behaviour() {
    let g = Geometry::half_strip(1.0, 0.3).unwrap();
    let mut values = Vec::new();
    let mut derivs = Vec::new();
    for level in [16usize, 64, 256] {
        let basis = ModeBasis::at_level(&g, level).unwrap();
        let root = basis.ground_root().unwrap().unwrap();
        let c: DVector<f64> = root.outer.clone();
        let m = basis.edge_mismatch(root.gap, &c);
        values.push(m.value / m.trace_norm);
        derivs.push(m.derivative / m.derivative_norm.max(m.trace_norm));
    }
    assert!(values[1] < values[0] / 3.0 && values[2] < values[1] / 3.0, "{values:?}");
    assert!(values[2] < 3e-3);
    assert!(derivs.iter().all(|d| *d > 0.5), "{derivs:?}");
}
