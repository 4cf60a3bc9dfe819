//! Cheater models.
//!
//! An adversary holds registers only through [`OpaqueRegister`], which
//! allows measuring, applying unitaries and preparing fresh registers, and
//! never exposes amplitudes or secret angles.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::authcode::MIN_SEPARATION;
use crate::error::{Error, Result};
use crate::protocol::{prepare_register, read_bit, validate_indices, BitString, RegisterBank};
use crate::qcore::{project_measure, rank1_projector, Projector, RandomSource, StateVec, Unitary4};

/// A register in an adversary's custody.
#[derive(Clone, Debug)]
pub struct OpaqueRegister {
    state: StateVec,
}

impl OpaqueRegister {
    /// Hands every register of `bank` to the adversary.
    pub fn from_bank(bank: &RegisterBank) -> Vec<OpaqueRegister> {
        bank.registers()
            .iter()
            .map(|&state| OpaqueRegister { state })
            .collect()
    }

    /// A register the adversary prepares itself.
    pub fn prepare(bit: bool, theta: f64) -> Self {
        Self {
            state: prepare_register(bit, theta),
        }
    }

    /// Honest Reading Protocol measurement.
    pub fn read_bit(&mut self, rng: &mut RandomSource) -> Result<bool> {
        let (bit, post) = read_bit(&self.state, rng)?;
        self.state = post;
        Ok(bit)
    }

    /// Two-outcome measurement `{P, I−P}`; returns whether `P` clicked.
    pub fn measure(&mut self, p: &Projector, rng: &mut RandomSource) -> Result<bool> {
        let m = project_measure(&self.state, p, rng)?;
        self.state = m.post;
        Ok(m.success)
    }

    pub fn apply(&mut self, u: &Unitary4) {
        self.state = u.apply(&self.state);
    }

    /// Returns the registers to the checker.
    pub fn into_bank(registers: Vec<OpaqueRegister>, label: impl Into<String>) -> RegisterBank {
        RegisterBank::new(label, registers.into_iter().map(|r| r.state).collect())
    }
}

/// Which registers a unitary flip touches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum FlipTargets {
    #[default]
    All,
    Indices(Vec<usize>),
}

impl FlipTargets {
    pub fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            FlipTargets::All => Ok((0..n).collect()),
            FlipTargets::Indices(idx) => {
                validate_indices(idx, n)?;
                Ok(idx.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AttackStrategy {
    /// Re-prepare every bit with a fresh random angle.
    GuessForge,
    /// Read the bit, measure in the basis at `basis_angle` inside that
    /// bit's subspace, resend the observed basis state.
    MeasureResend { basis_angle: f64 },
    /// Swap the bit-0 and bit-1 subspaces on the targeted registers.
    UnitaryFlip(FlipTargets),
}

impl AttackStrategy {
    pub fn measure_resend(basis_angle: f64) -> Self {
        AttackStrategy::MeasureResend {
            basis_angle: basis_angle.rem_euclid(PI),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttackStrategy::GuessForge => "guess",
            AttackStrategy::MeasureResend { .. } => "measure-resend",
            AttackStrategy::UnitaryFlip(_) => "flip",
        }
    }
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackStrategy {
    type Err = Error;

    /// Parses the CLI names; measure-resend defaults to basis angle 0 and
    /// flip to every register.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "guess" => Ok(AttackStrategy::GuessForge),
            "measure-resend" => Ok(AttackStrategy::measure_resend(0.0)),
            "flip" => Ok(AttackStrategy::UnitaryFlip(FlipTargets::All)),
            other => Err(Error::Invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Forges a bank for `c` by guessing every angle.
pub fn forge_guess(c: &BitString, rng: &mut RandomSource) -> RegisterBank {
    let forged = c
        .bits()
        .iter()
        .map(|&bit| OpaqueRegister::prepare(bit, rng.angle()))
        .collect();
    OpaqueRegister::into_bank(forged, "forged")
}

/// Intercept-resend within each register's bit subspace.
pub fn attack_measure_resend(
    mut registers: Vec<OpaqueRegister>,
    basis_angle: f64,
    rng: &mut RandomSource,
) -> Result<RegisterBank> {
    let phi = basis_angle.rem_euclid(PI);
    let mut resent = Vec::with_capacity(registers.len());
    for reg in registers.iter_mut() {
        let bit = reg.read_bit(rng)?;
        let along = reg.measure(&rank1_projector(&prepare_register(bit, phi)), rng)?;
        let angle = if along { phi } else { phi + FRAC_PI_2 };
        resent.push(OpaqueRegister::prepare(bit, angle));
    }
    Ok(OpaqueRegister::into_bank(resent, "resent"))
}

/// Applies the subspace swap at each index; reading those registers then
/// yields the complemented bit with certainty.
pub fn attack_unitary_flip(bank: &RegisterBank, indices: &[usize]) -> Result<RegisterBank> {
    validate_indices(indices, bank.len())?;
    let swap = Unitary4::subspace_swap();
    let mut registers = OpaqueRegister::from_bank(bank);
    for &i in indices {
        registers[i].apply(&swap);
    }
    Ok(OpaqueRegister::into_bank(registers, bank.label.clone()))
}

/// Pass probability of a flipped register checked against the key pair
/// `(θ0, θ1)`: `cos²(θ0 − θ1)`.
pub fn flip_pass_prob(theta0: f64, theta1: f64) -> f64 {
    (theta0 - theta1).cos().powi(2)
}

/// `E[cos²Δ]` for a ray separation `Δ` uniform on `[δ, π/2]`, i.e.
/// `1/2 − sin(2δ) / (2π − 4δ)`.
pub fn flip_pass_prob_averaged(min_separation: f64) -> f64 {
    if min_separation <= 0.0 {
        return 0.5;
    }
    0.5 - (2.0 * min_separation).sin() / (2.0 * PI - 4.0 * min_separation)
}

/// Per-register probability that a tampered or forged register passes the
/// check, averaged over the provider's secret angles.
///
/// Flip is averaged over keys produced by `auth_keygen`, so the value
/// includes the minimum-separation correction (≈ 0.3499 rather than 1/2).
pub fn expected_pass_prob(strategy: &AttackStrategy) -> f64 {
    match strategy {
        AttackStrategy::GuessForge => 0.5,
        AttackStrategy::MeasureResend { .. } => 0.75,
        AttackStrategy::UnitaryFlip(_) => flip_pass_prob_averaged(MIN_SEPARATION),
    }
}

/// Probability that a whole bank of `n` registers passes.
pub fn expected_bank_pass_prob(strategy: &AttackStrategy, n: usize) -> Result<f64> {
    let q = expected_pass_prob(strategy);
    let touched = match strategy {
        AttackStrategy::UnitaryFlip(targets) => targets.resolve(n)?.len(),
        _ => n,
    };
    Ok(q.powi(touched as i32))
}
