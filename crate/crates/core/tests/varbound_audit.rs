//! Independent 2-D quadrature of the trial quotient against the assembled terms.

mod common;

use common::brute_force;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use windowgap::varbound::{trial_terms, TrialParams};
use windowgap::Geometry;

#[test]
fn assembled_terms_match_quadrature() {
    let (d, a) = (1.0, 0.1);
    let g = Geometry::half_strip(d, a).unwrap();
    let mut runner = TestRunner::deterministic();
    let strategy = (0.1f64..3.0, -1.0f64..1.0);
    for _ in 0..5 {
        let (kappa, eta) = strategy.new_tree(&mut runner).unwrap().current();
        let p = TrialParams::new(kappa, eta);
        let terms = trial_terms(&g, &p).unwrap();
        let (num, norm) = brute_force(d, a, &p);
        let rn = (terms.numerator - num).abs() / num.abs();
        let rd = (terms.psi_sq - norm).abs() / norm;
        assert!(rn < 1e-8, "kappa={kappa} eta={eta}: numerator {} vs {num} ({rn:e})", terms.numerator);
        assert!(rd < 1e-8, "kappa={kappa} eta={eta}: norm {} vs {norm} ({rd:e})", terms.psi_sq);
    }
}

#[test]
fn symmetric_pair_audit_matches_half_strip() {
    let half = Geometry::half_strip(1.0, 0.05).unwrap();
    let pair = Geometry::symmetric_pair(1.0, 0.05).unwrap();
    let p = TrialParams::new(0.3, -0.2);
    let (a, b) = (trial_terms(&half, &p).unwrap(), trial_terms(&pair, &p).unwrap());
    assert_eq!(a.quotient(), b.quotient());
}
