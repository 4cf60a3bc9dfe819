//! Monte Carlo estimates of forgery and tamper pass rates, with the
//! closed forms they are compared against.
//!
//! Trial `t` of a run with seed `s` draws from `RandomSource::for_stream(s, t)`
//! and trial outcomes are summed as integers, so estimates are bitwise
//! identical for any rayon thread count.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{
    attack_measure_resend, attack_unitary_flip, expected_bank_pass_prob, forge_guess,
    AttackStrategy, OpaqueRegister,
};
use crate::authcode::{auth_encode, auth_keygen, auth_verify, flip_detection_prob, SharedAuthKey};
use crate::error::{Error, Result};
use crate::protocol::{check_bank, prepare_register, read_bank, store, BitString, RegisterBank};
use crate::qcore::{fidelity, rank1_projector, RandomSource};

/// Bernoulli mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        assert!(trials >= 1);
        let mean = successes as f64 / trials as f64;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    /// `|mean − target| ≤ k·σ`, with `σ` taken at the target so that
    /// estimates of 0 or 1 are still judged against a nonzero band.
    pub fn within_std_errors(&self, target: f64, k: f64) -> bool {
        let sigma = (target * (1.0 - target) / self.trials as f64).sqrt();
        (self.mean - target).abs() <= k * sigma.max(self.std_error)
    }
}

/// One row of a sweep; field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub strategy: String,
    pub empirical_pass: f64,
    pub analytic_pass: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Least-squares slope of `ln(empirical_pass)` against `n`. Rows with a
    /// zero estimate are skipped.
    pub fn log_linear_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.empirical_pass > 0.0)
            .map(|r| (r.n as f64, r.empirical_pass.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

fn run_trial(strategy: &AttackStrategy, n: usize, rng: &mut RandomSource) -> Result<bool> {
    match strategy {
        AttackStrategy::GuessForge => {
            let (bank, key) = store(&BitString::random(n, rng), rng);
            let (c, _) = read_bank(&bank, rng)?;
            let forged = forge_guess(&c, rng);
            Ok(check_bank(&forged, &key, rng)?.0.all_pass)
        }
        AttackStrategy::MeasureResend { basis_angle } => {
            let (bank, key) = store(&BitString::random(n, rng), rng);
            let resent =
                attack_measure_resend(OpaqueRegister::from_bank(&bank), *basis_angle, rng)?;
            Ok(check_bank(&resent, &key, rng)?.0.all_pass)
        }
        AttackStrategy::UnitaryFlip(targets) => {
            let key = auth_keygen(n, rng)?;
            let signed = auth_encode(&BitString::random(n, rng), &key)?;
            let tampered = attack_unitary_flip(&signed, &targets.resolve(n)?)?;
            Ok(auth_verify(&tampered, &key, rng)?.0.authentic)
        }
    }
}

/// Fraction of trials in which an attacked bank of `n` registers passes the
/// full check.
///
/// Guess and measure-resend attack a freshly stored random message and are
/// checked with the storage key. Flip tampers with a freshly signed message
/// under a fresh auth key and counts acceptances by the verifier.
pub fn mc_forgery_pass_rate(
    strategy: &AttackStrategy,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 || n == 0 {
        return Err(Error::Invalid("need n ≥ 1 and trials ≥ 1".into()));
    }
    if let AttackStrategy::UnitaryFlip(targets) = strategy {
        targets.resolve(n)?;
    }
    let passes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RandomSource::for_stream(seed, t);
            run_trial(strategy, n, &mut rng).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_counts(passes, trials, seed))
}

/// Analytic `q^n` for each `n`.
pub fn pass_curve(per_register_pass: f64, n_values: &[usize]) -> Result<Vec<(usize, f64)>> {
    if !(0.0..=1.0).contains(&per_register_pass) {
        return Err(Error::Invalid(format!(
            "per-register pass probability {per_register_pass} outside [0, 1]"
        )));
    }
    Ok(n_values
        .iter()
        .map(|&n| (n, per_register_pass.powi(n as i32)))
        .collect())
}

/// One Monte Carlo row per `n`, all under the same seed.
pub fn sweep(
    strategy: &AttackStrategy,
    n_values: &[usize],
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    if n_values.is_empty() {
        return Err(Error::Invalid("empty n list".into()));
    }
    let rows = n_values
        .iter()
        .map(|&n| {
            let est = mc_forgery_pass_rate(strategy, n, trials, seed)?;
            Ok(SweepRow {
                n,
                strategy: strategy.name().to_string(),
                empirical_pass: est.mean,
                analytic_pass: expected_bank_pass_prob(strategy, n)?,
                std_error: est.std_error,
                trials,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityScan {
    pub best_angle: f64,
    pub best_fidelity: f64,
    /// `(basis_angle, mean fidelity)` for every grid point.
    pub profile: Vec<(f64, f64)>,
}

/// Mean fidelity of the measure-resend output to the original register,
/// for basis angles `kπ/grid`, `k = 0..grid`, over `theta_samples` random
/// secret angles shared by all grid points.
pub fn estimation_fidelity_scan(
    angle_grid_size: usize,
    theta_samples: usize,
    seed: u64,
) -> Result<FidelityScan> {
    if angle_grid_size < 2 || theta_samples == 0 {
        return Err(Error::Invalid(
            "need a grid of at least 2 angles and at least 1 θ sample".into(),
        ));
    }
    let mut rng = RandomSource::new(seed);
    let samples: Vec<(bool, f64)> = (0..theta_samples)
        .map(|_| (rng.bit(), rng.angle()))
        .collect();

    let profile: Vec<(f64, f64)> = (0..angle_grid_size)
        .into_par_iter()
        .map(|k| {
            let phi = k as f64 * PI / angle_grid_size as f64;
            let total: f64 = samples
                .iter()
                .map(|&(bit, theta)| resend_fidelity(bit, theta, phi))
                .sum();
            (phi, total / theta_samples as f64)
        })
        .collect();

    let (best_angle, best_fidelity) =
        profile
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, p| {
                if p.1 > best.1 {
                    p
                } else {
                    best
                }
            });
    Ok(FidelityScan {
        best_angle,
        best_fidelity,
        profile,
    })
}

/// Expected fidelity after measuring `prepare(bit, θ)` in the basis at `φ`
/// and resending the observed basis state.
fn resend_fidelity(bit: bool, theta: f64, phi: f64) -> f64 {
    let original = prepare_register(bit, theta);
    let along = prepare_register(bit, phi);
    let across = prepare_register(bit, phi + FRAC_PI_2);
    let p = rank1_projector(&along).probability(&original);
    p * fidelity(&along, &original) + (1.0 - p) * fidelity(&across, &original)
}

/// `1 − fidelity` per register between a reference bank and its current state.
pub fn fidelity_deviation(reference: &RegisterBank, current: &RegisterBank) -> Result<Vec<f64>> {
    if reference.len() != current.len() {
        return Err(Error::LengthMismatch {
            bank: current.len(),
            key: reference.len(),
        });
    }
    Ok(reference
        .registers()
        .iter()
        .zip(current.registers())
        .map(|(a, b)| 1.0 - fidelity(a, b))
        .collect())
}

/// Alternates reading and checking an honest bank of `bank_len` registers
/// for `rounds` rounds and returns the largest `1 − fidelity` to the
/// prepared state seen after any operation.
pub fn nondisturbance_audit(bank_len: usize, rounds: usize, seed: u64) -> Result<f64> {
    let mut rng = RandomSource::new(seed);
    let c = BitString::random(bank_len, &mut rng);
    let (prepared, key) = store(&c, &mut rng);
    let mut bank = prepared.clone();
    let mut worst = 0.0f64;
    for _ in 0..rounds {
        let (read, after_read) = read_bank(&bank, &mut rng)?;
        if read != c {
            return Ok(1.0);
        }
        worst = worst.max(max_of(&fidelity_deviation(&prepared, &after_read)?));
        let (report, after_check) = check_bank(&after_read, &key, &mut rng)?;
        worst = worst.max(max_of(&fidelity_deviation(&prepared, &after_check)?));
        if !report.all_pass {
            return Ok(worst.max(1.0));
        }
        bank = after_check;
    }
    Ok(worst)
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// Detection statistics for flipping one position of a message signed
/// under a fixed auth key.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipDetectionRow {
    pub index: usize,
    pub theta0: f64,
    pub theta1: f64,
    pub empirical_detection: f64,
    pub analytic_detection: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// For each key position `k`: sign a random message, flip position `k`,
/// verify, and count rejections. Trial `t` at position `k` uses stream
/// `k·trials + t`.
pub fn flip_detection_per_index(
    key: &SharedAuthKey,
    trials: u64,
    seed: u64,
) -> Result<Vec<FlipDetectionRow>> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let n = key.len();
    (0..n)
        .map(|k| {
            let detected = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = RandomSource::for_stream(seed, k as u64 * trials + t);
                    let signed = auth_encode(&BitString::random(n, &mut rng), key)?;
                    let tampered = attack_unitary_flip(&signed, &[k])?;
                    let (verdict, _) = auth_verify(&tampered, key, &mut rng)?;
                    Ok(u64::from(!verdict.authentic))
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            let est = McEstimate::from_counts(detected, trials, seed);
            let e = key.entries()[k];
            Ok(FlipDetectionRow {
                index: k,
                theta0: e.theta0,
                theta1: e.theta1,
                empirical_detection: est.mean,
                analytic_detection: flip_detection_prob(&e),
                std_error: est.std_error,
                trials,
                seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{expected_pass_prob, FlipTargets};
    use crate::authcode::{auth_keygen, min_flip_detection};

    #[test]
    fn estimate_std_error() {
        let e = McEstimate::from_counts(25, 100, 0);
        assert_eq!(e.mean, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.within_std_errors(0.25, 4.0));
        assert!(!e.within_std_errors(0.5, 4.0));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let s = AttackStrategy::GuessForge;
        assert!(mc_forgery_pass_rate(&s, 0, 10, 0).is_err());
        assert!(mc_forgery_pass_rate(&s, 1, 0, 0).is_err());
        assert!(sweep(&s, &[], 10, 0).is_err());
        assert!(pass_curve(1.5, &[1]).is_err());
        assert!(estimation_fidelity_scan(1, 10, 0).is_err());
        let flip = AttackStrategy::UnitaryFlip(FlipTargets::Indices(vec![3]));
        assert!(mc_forgery_pass_rate(&flip, 2, 10, 0).is_err());
    }

    #[test]
    fn pass_curve_examples() {
        for (n, p) in pass_curve(1.0, &[1, 10, 1000]).unwrap() {
            assert_eq!(p, 1.0, "n = {n}");
        }
        let p = pass_curve(0.75, &[32]).unwrap()[0].1;
        assert!((p - 1.00452e-4).abs() < 1e-8, "{p}");
        let p = pass_curve(0.5, &[64]).unwrap()[0].1;
        assert!((p - 5.421e-20).abs() < 1e-22, "{p}");
        let curve = pass_curve(0.9, &[1, 2, 3, 5, 8, 13]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
        let product: f64 = (0..5).map(|_| 0.9).product();
        assert!((curve[3].1 - product).abs() <= 2.0 * f64::EPSILON * product);
    }

    #[test]
    fn small_mc_runs_match_closed_forms() {
        let trials = 100_000;
        for s in [
            AttackStrategy::GuessForge,
            AttackStrategy::measure_resend(0.4),
            AttackStrategy::UnitaryFlip(FlipTargets::All),
        ] {
            let est = mc_forgery_pass_rate(&s, 1, trials, 17).unwrap();
            assert!(
                est.within_std_errors(expected_pass_prob(&s), 4.0),
                "{s}: {est:?}"
            );
        }
    }

    #[test]
    fn flip_on_subset_only_counts_targets() {
        let s = AttackStrategy::UnitaryFlip(FlipTargets::Indices(vec![2]));
        let est = mc_forgery_pass_rate(&s, 6, 50_000, 3).unwrap();
        assert!(
            est.within_std_errors(expected_pass_prob(&s), 4.0),
            "{est:?}"
        );
    }

    #[test]
    fn mc_is_reproducible() {
        let s = AttackStrategy::measure_resend(0.0);
        let a = mc_forgery_pass_rate(&s, 3, 5_000, 99).unwrap();
        let b = mc_forgery_pass_rate(&s, 3, 5_000, 99).unwrap();
        assert_eq!(a, b);
        let c = mc_forgery_pass_rate(&s, 3, 5_000, 100).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn sweep_rows_and_slope() {
        let s = AttackStrategy::measure_resend(0.0);
        let result = sweep(&s, &[1, 2, 4], 20_000, 5).unwrap();
        assert_eq!(result.rows.len(), 3);
        for r in &result.rows {
            assert_eq!(r.analytic_pass, 0.75f64.powi(r.n as i32));
            assert_eq!(r.strategy, "measure-resend");
        }
        let single = sweep(&s, &[1], 20_000, 5).unwrap();
        assert_eq!(single.rows[0], result.rows[0]);
        let slope = result.log_linear_slope().unwrap();
        assert!((slope - 0.75f64.ln()).abs() < 0.05, "{slope}");
    }

    #[test]
    fn fidelity_scan_examples() {
        let scan = estimation_fidelity_scan(2, 50_000, 1).unwrap();
        assert_eq!(scan.profile.len(), 2);
        assert_eq!(scan.profile[1].0, FRAC_PI_2);
        // cos⁴(θ−π/2) + sin⁴(θ−π/2) = sin⁴θ + cos⁴θ: the two grid points see
        // identical per-sample values up to rounding.
        assert!((scan.profile[0].1 - scan.profile[1].1).abs() < 1e-12);

        for seed in 0..20 {
            let one = estimation_fidelity_scan(4, 1, seed).unwrap();
            for &(_, f) in &one.profile {
                assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&f), "{f}");
            }
        }
    }

    #[test]
    fn resend_fidelity_closed_form() {
        for k in 0..50 {
            let theta = k as f64 * 0.37;
            let phi = 0.2;
            let (c, s) = ((theta - phi).cos(), (theta - phi).sin());
            let f = resend_fidelity(k % 2 == 0, theta, phi);
            assert!((f - (c.powi(4) + s.powi(4))).abs() < 1e-12);
        }
    }

    #[test]
    fn audit_examples() {
        assert_eq!(nondisturbance_audit(16, 0, 1).unwrap(), 0.0);
        assert!(nondisturbance_audit(32, 20, 2).unwrap() < 1e-9);

        let mut rng = RandomSource::new(3);
        let (bank, _) = store(&BitString::random(8, &mut rng), &mut rng);
        let flipped = attack_unitary_flip(&bank, &[5]).unwrap();
        let dev = fidelity_deviation(&bank, &flipped).unwrap();
        assert_eq!(dev[5], 1.0);
        assert!(dev
            .iter()
            .enumerate()
            .all(|(i, &d)| i == 5 || d.abs() < 1e-15));
    }

    #[test]
    fn flip_detection_rows() {
        let key = auth_keygen(3, &mut RandomSource::new(4)).unwrap();
        let rows = flip_detection_per_index(&key, 20_000, 6).unwrap();
        assert_eq!(rows.len(), 3);
        for r in rows {
            assert!(r.analytic_detection >= min_flip_detection() - 1e-15);
            let est = McEstimate::from_counts(
                (r.empirical_detection * r.trials as f64).round() as u64,
                r.trials,
                r.seed,
            );
            assert!(est.within_std_errors(r.analytic_detection, 4.0), "{r:?}");
        }
    }
}
