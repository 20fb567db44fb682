//! End-to-end acceptance checks. Runs without the libtest harness so that
//! one PASS/FAIL line per criterion is always printed.

mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use windowgap::asymptotics::{default_grid, sandwich_report, sweep, SweepResult, UpperPoint, Verdict};
use windowgap::chain::{build_chain, darboux_tail_sum, exp_integral_e1};
use windowgap::fd::{fd_ground_state, GridSpec};
use windowgap::lemmas::{c0_closed_form, convergence_ratio, lemma1, lemma2, lemma3_gap, lemma4_constant};
use windowgap::varbound::{optimize_trial, trial_terms, TrialParams};
use windowgap::{overlap, solve_ground_state, Geometry, Result, TransverseMode};

type Check = Result<(bool, String)>;

static SWEEP: OnceLock<std::result::Result<(SweepResult, f64), String>> = OnceLock::new();

/// The default sweep over two unit strips, shared by the first two criteria.
fn unit_sweep() -> Result<(SweepResult, f64)> {
    SWEEP
        .get_or_init(|| {
            let t = Instant::now();
            let base = Geometry::symmetric_pair(1.0, 0.1).map_err(|e| e.to_string())?;
            let s = sweep(&base, &default_grid(), 1e-6, 4096, 0).map_err(|e| e.to_string())?;
            Ok((s, t.elapsed().as_secs_f64()))
        })
        .clone()
        .map_err(windowgap::Error::NoConvergence)
}

fn quartic_law() -> Check {
    let (s, secs) = unit_sweep()?;
    let fit = match s.fit {
        Some(f) => f,
        None => return Ok((false, "no resolved rows to fit".into())),
    };
    let ok = (fit.slope - 4.0).abs() <= 0.05 && secs <= 300.0;
    Ok((
        ok,
        format!(
            "slope {:.4} coefficient {:.2} on a in [{}, {}], {:.1} s",
            fit.slope, fit.coefficient, fit.a_lo, fit.a_hi, secs
        ),
    ))
}

fn sandwich() -> Check {
    let grid = default_grid();
    let base = Geometry::symmetric_pair(1.0, 0.1)?;
    let (s, _) = unit_sweep()?;
    let chain = build_chain(1.0, *grid.last().unwrap())?;
    let upper = grid
        .iter()
        .map(|a| Ok(UpperPoint { a: *a, value: optimize_trial(&base.with_window(*a)?)?.value }))
        .collect::<Result<Vec<_>>>()?;
    let rep = sandwich_report(&s, &upper, &chain)?;
    let checked = rep.rows.iter().filter(|r| r.checked).count();
    let worst = rep
        .rows
        .iter()
        .filter(|r| r.checked)
        .map(|r| r.variational / r.gap)
        .fold(0.0, f64::max);
    Ok((
        rep.verdict == Verdict::Pass && checked == grid.len(),
        format!(
            "{:?}, {checked} rows with a <= a_star = {:.4}, c1 = {:.4e}, largest |upper| / gap = {:.3}",
            rep.verdict, rep.a_star, rep.c1, worst
        ),
    ))
}

fn symmetric_equivalence() -> Check {
    let mut worst = 0.0f64;
    for a in [0.1, 0.2, 0.3] {
        let h = solve_ground_state(&Geometry::half_strip(1.0, a)?, 1e-7, 4096)?;
        let p = solve_ground_state(&Geometry::symmetric_pair(1.0, a)?, 1e-7, 4096)?;
        match (h.bound(), p.bound()) {
            (Some(h), Some(p)) => worst = worst.max((h.energy - p.energy).abs() / h.energy),
            _ => return Ok((false, format!("unresolved at a = {a}"))),
        }
    }
    Ok((worst < 1e-8, format!("largest relative difference {worst:.2e}")))
}

fn oracle_agreement() -> Check {
    let t = Instant::now();
    let g = Geometry::symmetric_pair(1.0, 0.3)?;
    let fd = fd_ground_state(&GridSpec::new(g, 1.0 / 160.0, 6.0)?)?;
    let secs = t.elapsed().as_secs_f64();
    let mm = match solve_ground_state(&g, 1e-8, 4096)?.into_bound() {
        Some(r) => r,
        None => return Ok((false, "mode matching unresolved".into())),
    };
    let rel = (fd.energy - mm.energy).abs() / mm.energy;
    Ok((
        rel < 1e-3 && secs <= 120.0,
        format!(
            "finite differences {:.10} vs mode matching {:.10}, relative {rel:.2e}, {secs:.1} s",
            fd.energy, mm.energy
        ),
    ))
}

fn lemma_suite() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, alpha) in [(1.0, 1.0), (0.5, 2.0), (4.0, 0.3)] {
        let r = lemma1(m, alpha, 256)?;
        ok &= (r.ratio - 1.0).abs() < 0.01;
        notes.push(format!("l1 {:.5}", r.ratio));
    }
    for b in [0.5, 1.0, 2.0] {
        let r = lemma2(b, 128)?;
        ok &= (r.ratio - 1.0).abs() < 0.005;
        notes.push(format!("l2 {:.5}", r.ratio));
    }
    let v: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|n| lemma3_gap(1.0, *n).map(|r| r.epsilon2))
        .collect::<Result<_>>()?;
    let order = convergence_ratio([v[0], v[1], v[2]]);
    ok &= v[2] > 0.0 && (order - 4.0).abs() < 0.5;
    notes.push(format!("l3 eps2 {:.5} ratio {:.3}", v[2], order));
    let c0 = c0_closed_form(PI / 8.0);
    for (d, a) in [(1.0, 0.05), (1.0, 0.02), (2.0, 0.05)] {
        let r = lemma4_constant(PI / 8.0, d, a, 2048)?;
        ok &= r.numeric >= c0;
        notes.push(format!("l4({d},{a}) {:.4}", r.numeric));
    }
    notes.push(format!("c0 {c0:.5}"));
    Ok((ok, notes.join(", ")))
}

fn overlap_identity() -> Check {
    let v = overlap(&TransverseMode::outer(1, 0.0, 1.0), &TransverseMode::neumann_dirichlet(1, 1.0))?;
    let err = (v - 8.0 / (3.0 * PI)).abs();
    Ok((err <= 1e-12, format!("overlap {v:.16}, error {err:.1e}")))
}

fn variational_audit() -> Check {
    let (d, a) = (1.0, 0.1);
    let g = Geometry::half_strip(d, a)?;
    let mut runner = TestRunner::deterministic();
    let strategy = (0.1f64..3.0, -1.0f64..1.0);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (kappa, eta) = strategy.new_tree(&mut runner).expect("strategy").current();
        let p = TrialParams::new(kappa, eta);
        let terms = trial_terms(&g, &p)?;
        let (num, _) = common::brute_force(d, a, &p);
        worst = worst.max((terms.numerator - num).abs() / num.abs());
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=8 {
        let a = 1e-3 * 10f64.powf(k as f64 / 8.0);
        let c = optimize_trial(&Geometry::half_strip(d, a)?)?.value / a.powi(4);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok((
        worst < 1e-8 && lo >= -415.0 && hi <= -100.0,
        format!("audit error {worst:.1e}, value / a^4 in [{lo:.2}, {hi:.2}]"),
    ))
}

fn constant_chain() -> Check {
    let bound = exp_integral_e1(2.0 * PI);
    let mut ok = true;
    let mut sums = Vec::new();
    for a in [0.1, 0.05, 0.02] {
        let s = darboux_tail_sum(1.0, a);
        ok &= s <= bound;
        sums.push(format!("{s:.4e}"));
    }
    for (d, a_max) in [(1.0, 0.16), (1.0, 0.5), (2.0, 0.3)] {
        let ch = build_chain(d, a_max)?;
        let m = PI / 8.0 * ch.delta.sqrt();
        let mu = m / 3f64.sqrt();
        let c0 = mu * mu.tanh();
        ok &= ch.m == m && ch.c0 == c0 && ch.c1 == 2.0 * (4.0 * PI * PI / (c0 * d.powi(3))).powi(2);
    }
    Ok((ok, format!("tail sums {} <= E1(2 pi) = {bound:.4e}", sums.join(", "))))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("quartic law", quartic_law),
        ("sandwich", sandwich),
        ("symmetric equivalence", symmetric_equivalence),
        ("oracle agreement", oracle_agreement),
        ("lemma suite", lemma_suite),
        ("overlap identity", overlap_identity),
        ("variational audit", variational_audit),
        ("constant chain", constant_chain),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        println!("criterion {} ({name}): {} - {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
