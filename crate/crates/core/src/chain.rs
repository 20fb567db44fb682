//! Terminal constants of the lower-bound argument: the uniform norm constant
//! `C`, the admissible `delta`, `m = (pi/8) sqrt(delta)`, `c0` and `c1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemmas::{c0_closed_form, lemma3_route, window_threshold};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = int_1^inf e^{-x t} / t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument");
    if x <= 1.0 {
        // -gamma - ln x - sum (-x)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // modified Lentz on the continued fraction e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

fn check_width(d: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::out_of_range("d", d, "must be positive"));
    }
    Ok(())
}

/// `C = (16/d) (2 pi^2 / (3 d^2) + E1(2 pi / d))`.
pub fn gamma_constant(d: f64) -> Result<f64> {
    check_width(d)?;
    Ok(16.0 / d * (2.0 * PI * PI / (3.0 * d * d) + exp_integral_e1(2.0 * PI / d)))
}

/// `sum_{n > floor(1/a)} e^{-2 pi a n / d} / n`, summed until the terms vanish.
pub fn darboux_tail_sum(d: f64, a: f64) -> f64 {
    let start = (1.0 / a + 1e-9).floor() as u64 + 1;
    let q = (-2.0 * PI * a / d).exp();
    let mut sum = 0.0;
    let mut pow = q.powf(start as f64);
    let mut n = start;
    loop {
        let term = pow / n as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= q;
        n += 1;
    }
    sum
}

/// A bound on the tail sum valid for every `a`: `E1(2 pi a floor(1/a) / d)`.
/// It coincides with the uniform `E1(2 pi / d)` only when `1/a` is an integer.
pub fn darboux_tail_bound(d: f64, a: f64) -> f64 {
    let n = (1.0 / a + 1e-9).floor();
    exp_integral_e1(2.0 * PI * a * n / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    pub d: f64,
    pub a_max: f64,
    #[serde(rename = "C")]
    pub gamma: f64,
    /// Largest `a` for which `delta = 1` is admissible.
    pub a_star: f64,
    pub delta: f64,
    pub m: f64,
    pub c0: f64,
    pub c1: f64,
    /// `c0 d / (2 pi)`, below which `c0 / (2a) > pi / d`.
    pub small_window: f64,
    /// Window bound required by the `c0` estimate, `min(a0, m d / (pi sqrt 3))`.
    pub lemma4_window: f64,
    /// Smallest of `a_star`, `small_window`, `lemma4_window`.
    pub a_threshold: f64,
}

pub fn build_chain(d: f64, a_max: f64) -> Result<ConstantChain> {
    check_width(d)?;
    if !(a_max > 0.0 && a_max.is_finite()) {
        return Err(Error::out_of_range("a_max", a_max, "must be positive"));
    }
    let gamma = gamma_constant(d)?;
    let a_star = (2.0 * PI / (d * gamma)).sqrt();
    let delta = (2.0 * PI / (d * gamma * a_max * a_max)).min(1.0);
    let m = PI / 8.0 * delta.sqrt();
    let c0 = c0_closed_form(m);
    let c1 = 2.0 * (4.0 * PI * PI / (c0 * d.powi(3))).powi(2);
    let small_window = c0 * d / (2.0 * PI);
    let a0 = window_threshold(d, lemma3_route(d)?.eps1)?;
    let lemma4_window = a0.min(m * d / (PI * 3f64.sqrt()));
    Ok(ConstantChain {
        d,
        a_max,
        gamma,
        a_star,
        delta,
        m,
        c0,
        c1,
        small_window,
        lemma4_window,
        a_threshold: a_star.min(small_window).min(lemma4_window),
    })
}
