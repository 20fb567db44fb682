//! Brute-force quadrature shared by the integration targets.

use std::f64::consts::PI;

use windowgap::varbound::{profile, profile_derivative, TrialParams};

const TOL: f64 = 1e-13;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::integrate(f, a, b, TOL).integral
}

/// `int_0^d` split at the kink of the profile.
fn across(d: f64, f: impl Fn(f64) -> f64) -> f64 {
    integrate(&f, 0.0, 0.5 * d) + integrate(&f, 0.5 * d, d)
}

/// Numerator and norm of the trial function over the half-strip, by brute force.
pub fn brute_force(d: f64, a: f64, p: &TrialParams) -> (f64, f64) {
    let thr = (PI / d).powi(2);
    let chi = |y: f64| (2.0 / d).sqrt() * (PI * y / d).sin();
    let dchi = |y: f64| (2.0 / d).sqrt() * (PI / d) * (PI * y / d).cos();
    let (al, k, et) = (p.alpha, p.kappa, p.eta);
    let col = |x: f64| (PI * x / (2.0 * a)).cos();
    let dcol = |x: f64| -(PI / (2.0 * a)) * (PI * x / (2.0 * a)).sin();

    let window_energy = integrate(
        |x| {
            across(d, |y| {
                let psi = al * chi(y) + et * col(x) * profile(d, a, y);
                let px = et * dcol(x) * profile(d, a, y);
                let py = al * dchi(y) + et * col(x) * profile_derivative(d, a, y);
                px * px + py * py - thr * psi * psi
            })
        },
        0.0,
        a,
    );
    let window_norm = integrate(
        |x| {
            across(d, |y| {
                let psi = al * chi(y) + et * col(x) * profile(d, a, y);
                psi * psi
            })
        },
        0.0,
        a,
    );
    // outside the window u = exp(-kappa (x - a)) maps (a, inf) onto (0, 1]
    let outer_energy = integrate(
        |u| across(d, |y| al * al * u * (k * k * chi(y).powi(2) + dchi(y).powi(2) - thr * chi(y).powi(2)) / k),
        0.0,
        1.0,
    );
    let outer_norm = integrate(|u| across(d, |y| al * al * u * chi(y).powi(2) / k), 0.0, 1.0);
    (2.0 * (window_energy + outer_energy), 2.0 * (window_norm + outer_norm))
}
