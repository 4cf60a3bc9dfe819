//! Storing, reading and checking classical bits held in 4-state registers.
//!
//! Bit `c` with secret angle `θ` is stored as `cos θ |α_c⟩ + sin θ |β_c⟩`.
//! Anyone can read `c` by projecting onto `span{α0, β0}`; only a holder of
//! `θ` can check that the register is the one that was prepared.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    project_measure, rank1_projector, subspace_projector, Basis, RandomSource, StateVec,
};

/// Reduces an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn random(n: usize, rng: &mut RandomSource) -> Self {
        Self((0..n).map(|_| rng.bit()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .filter(|(a, b)| a != b)
            .count()
            + self.len().abs_diff(other.len())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StorageKeyEntry {
    pub theta: f64,
    pub bit: bool,
}

/// The provider's checking credential: one `(θ_i, c_i)` per register.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SecretKey {
    entries: Vec<StorageKeyEntry>,
}

impl SecretKey {
    pub fn new(entries: Vec<StorageKeyEntry>) -> Result<Self> {
        for e in &entries {
            if !(0.0..TAU).contains(&e.theta) {
                return Err(Error::AngleOutOfRange(e.theta));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[StorageKeyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// An ordered set of registers plus a free-form label.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegisterBank {
    pub label: String,
    registers: Vec<StateVec>,
}

impl RegisterBank {
    pub fn new(label: impl Into<String>, registers: Vec<StateVec>) -> Self {
        Self {
            label: label.into(),
            registers,
        }
    }

    pub fn registers(&self) -> &[StateVec] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub(crate) fn with_registers(&self, registers: Vec<StateVec>) -> Self {
        Self {
            label: self.label.clone(),
            registers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub per_index: Vec<(usize, bool)>,
    pub all_pass: bool,
}

impl CheckReport {
    fn from_results(per_index: Vec<(usize, bool)>) -> Self {
        let all_pass = per_index.iter().all(|&(_, pass)| pass);
        Self {
            per_index,
            all_pass,
        }
    }

    pub fn failures(&self) -> usize {
        self.per_index.iter().filter(|(_, pass)| !pass).count()
    }
}

/// `cos θ |α_bit⟩ + sin θ |β_bit⟩`, with `θ` reduced mod 2π first.
pub fn prepare_register(bit: bool, theta: f64) -> StateVec {
    let theta = normalize_angle(theta);
    let mut amp = [0.0; 4];
    amp[Basis::alpha(bit).index()] = theta.cos();
    amp[Basis::beta(bit).index()] = theta.sin();
    StateVec::from_real(amp).expect("cos² + sin² is 1")
}

/// Storing: a fresh uniform angle per bit. Returns the bank for the user
/// and the key the provider keeps.
pub fn store(c: &BitString, rng: &mut RandomSource) -> (RegisterBank, SecretKey) {
    let mut registers = Vec::with_capacity(c.len());
    let mut entries = Vec::with_capacity(c.len());
    for &bit in c.bits() {
        let theta = rng.angle();
        registers.push(prepare_register(bit, theta));
        entries.push(StorageKeyEntry { theta, bit });
    }
    (RegisterBank::new("", registers), SecretKey { entries })
}

/// Reading: success of the bit-0 subspace projection means 0, failure means 1.
pub fn read_bit(s: &StateVec, rng: &mut RandomSource) -> Result<(bool, StateVec)> {
    let m = project_measure(s, &subspace_projector(false), rng)?;
    Ok((!m.success, m.post))
}

pub fn read_bank(bank: &RegisterBank, rng: &mut RandomSource) -> Result<(BitString, RegisterBank)> {
    let mut bits = Vec::with_capacity(bank.len());
    let mut post = Vec::with_capacity(bank.len());
    for s in bank.registers() {
        let (bit, p) = read_bit(s, rng)?;
        bits.push(bit);
        post.push(p);
    }
    Ok((BitString(bits), bank.with_registers(post)))
}

/// Checking one register: project onto the state it should have been
/// prepared in. Passes with probability `fidelity(prepared, s)`.
pub fn check_register(
    s: &StateVec,
    bit: bool,
    theta: f64,
    rng: &mut RandomSource,
) -> Result<(bool, StateVec)> {
    let expected = prepare_register(bit, theta);
    let m = project_measure(s, &rank1_projector(&expected), rng)?;
    Ok((m.success, m.post))
}

pub fn check_bank(
    bank: &RegisterBank,
    key: &SecretKey,
    rng: &mut RandomSource,
) -> Result<(CheckReport, RegisterBank)> {
    if bank.len() != key.len() {
        return Err(Error::LengthMismatch {
            bank: bank.len(),
            key: key.len(),
        });
    }
    let mut per_index = Vec::with_capacity(bank.len());
    let mut post = Vec::with_capacity(bank.len());
    for (i, (s, e)) in bank.registers().iter().zip(key.entries()).enumerate() {
        let (pass, p) = check_register(s, e.bit, e.theta, rng)?;
        per_index.push((i, pass));
        post.push(p);
    }
    Ok((
        CheckReport::from_results(per_index),
        bank.with_registers(post),
    ))
}

/// Checks only the registers at `indices`, in the given order. The rest of
/// the bank is returned unchanged.
pub fn check_subset(
    bank: &RegisterBank,
    key: &SecretKey,
    indices: &[usize],
    rng: &mut RandomSource,
) -> Result<(CheckReport, RegisterBank)> {
    if bank.len() != key.len() {
        return Err(Error::LengthMismatch {
            bank: bank.len(),
            key: key.len(),
        });
    }
    validate_indices(indices, bank.len())?;
    let mut registers = bank.registers().to_vec();
    let mut per_index = Vec::with_capacity(indices.len());
    for &i in indices {
        let e = key.entries()[i];
        let (pass, p) = check_register(&registers[i], e.bit, e.theta, rng)?;
        registers[i] = p;
        per_index.push((i, pass));
    }
    Ok((
        CheckReport::from_results(per_index),
        bank.with_registers(registers),
    ))
}

pub(crate) fn validate_indices(indices: &[usize], len: usize) -> Result<()> {
    let mut seen = HashSet::with_capacity(indices.len());
    for &i in indices {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        if !seen.insert(i) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(())
}
