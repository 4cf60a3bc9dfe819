//! Numeric-integration oracles. Plain trigonometry on midpoint grids,
//! independent of the simulator.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_8, PI, TAU};

const GRID: usize = 720;

fn midpoints(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |k| (k as f64 + 0.5) * TAU / n as f64)
}

/// E[cos²(θ − θ′)] for independent uniform θ, θ′: a guessed angle checked
/// against the true one.
pub fn guess_pass() -> f64 {
    let mut sum = 0.0;
    for a in midpoints(GRID) {
        for b in midpoints(GRID) {
            sum += (a - b).cos().powi(2);
        }
    }
    sum / (GRID * GRID) as f64
}

/// E_θ[cos⁴(θ − φ) + sin⁴(θ − φ)]: measure-resend in the basis at `φ`.
pub fn measure_resend_pass(phi: f64) -> f64 {
    midpoints(GRID)
        .map(|t| (t - phi).cos().powi(4) + (t - phi).sin().powi(4))
        .sum::<f64>()
        / GRID as f64
}

/// Distance between the lines at angles `a` and `b`, in `[0, π/2]`.
fn line_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// E[cos²(θ0 − θ1)] over independent uniform pairs at least `min_sep` apart
/// as lines: a flipped register checked with the other angle.
pub fn flip_pass(min_sep: f64) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for a in midpoints(GRID) {
        for b in midpoints(GRID) {
            if line_distance(a, b) >= min_sep {
                sum += (a - b).cos().powi(2);
                count += 1;
            }
        }
    }
    sum / count as f64
}

pub const AUTH_MIN_SEPARATION: f64 = FRAC_PI_8;

/// Binomial standard error at probability `p`.
pub fn std_error(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
