//! Message authentication with pre-shared angle pairs.
//!
//! Sender and verifier share `(θ0_i, θ1_i)` for every position. The sender
//! encodes bit `c_i` with angle `θ{c_i}_i`; the verifier reads the message
//! and then checks every register against the angle for the bit it read.
//! Changing a bit with a subspace swap leaves the register at the wrong
//! angle, which the check catches with probability `1 − cos²(θ0_i − θ1_i)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{
    check_bank, prepare_register, read_bank, BitString, CheckReport, RegisterBank, SecretKey,
    StorageKeyEntry,
};
use crate::qcore::RandomSource;

/// Minimum [`ray_separation`] between `θ0_i` and `θ1_i`. A single flipped
/// bit is then caught with probability at least `sin²(π/8)`.
pub const MIN_SEPARATION: f64 = FRAC_PI_8;

/// Separation of two angles as states, in `[0, π/2]`.
///
/// `θ` and `θ + π` prepare the same state up to a global sign, so the
/// difference is taken mod π and folded. A flipped register then passes
/// with probability `cos²` of this value.
pub fn ray_separation(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthKeyEntry {
    pub theta0: f64,
    pub theta1: f64,
}

impl AuthKeyEntry {
    pub fn angle_for(&self, bit: bool) -> f64 {
        if bit {
            self.theta1
        } else {
            self.theta0
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharedAuthKey {
    entries: Vec<AuthKeyEntry>,
    spent: bool,
}

impl SharedAuthKey {
    pub fn new(entries: Vec<AuthKeyEntry>) -> Result<Self> {
        Self::with_spent(entries, false)
    }

    pub fn with_spent(entries: Vec<AuthKeyEntry>, spent: bool) -> Result<Self> {
        for (index, e) in entries.iter().enumerate() {
            for theta in [e.theta0, e.theta1] {
                if !(0.0..TAU).contains(&theta) {
                    return Err(Error::AngleOutOfRange(theta));
                }
            }
            let separation = ray_separation(e.theta0, e.theta1);
            if separation < MIN_SEPARATION {
                return Err(Error::AngleSeparation {
                    index,
                    separation,
                    min: MIN_SEPARATION,
                });
            }
        }
        Ok(Self { entries, spent })
    }

    pub fn entries(&self) -> &[AuthKeyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether this key has already signed a message.
    pub fn is_spent(&self) -> bool {
        self.spent
    }

    /// One-shot signing: encodes `c` and marks the key spent. A second call
    /// fails with [`Error::KeyReused`], since every encoding shows the
    /// messenger one angle of each pair.
    pub fn sign(&mut self, c: &BitString) -> Result<RegisterBank> {
        if self.spent {
            return Err(Error::KeyReused);
        }
        let bank = auth_encode(c, self)?;
        self.spent = true;
        Ok(bank)
    }

    /// The per-position storage key that `c` selects.
    fn storage_key_for(&self, c: &BitString) -> SecretKey {
        let entries = c
            .bits()
            .iter()
            .zip(&self.entries)
            .map(|(&bit, e)| StorageKeyEntry {
                theta: e.angle_for(bit),
                bit,
            })
            .collect();
        SecretKey::new(entries).expect("auth angles are validated on construction")
    }
}

pub fn auth_keygen(n: usize, rng: &mut RandomSource) -> Result<SharedAuthKey> {
    if n == 0 {
        return Err(Error::Invalid("auth key length must be at least 1".into()));
    }
    let entries = (0..n)
        .map(|_| loop {
            let (theta0, theta1) = (rng.angle(), rng.angle());
            if ray_separation(theta0, theta1) >= MIN_SEPARATION {
                break AuthKeyEntry { theta0, theta1 };
            }
        })
        .collect();
    Ok(SharedAuthKey {
        entries,
        spent: false,
    })
}

/// Deterministic encoding of `c` under `key`. Does not mark the key spent;
/// see [`SharedAuthKey::sign`].
pub fn auth_encode(c: &BitString, key: &SharedAuthKey) -> Result<RegisterBank> {
    if c.len() != key.len() {
        return Err(Error::LengthMismatch {
            bank: c.len(),
            key: key.len(),
        });
    }
    let registers = c
        .bits()
        .iter()
        .zip(key.entries())
        .map(|(&bit, e)| prepare_register(bit, e.angle_for(bit)))
        .collect();
    Ok(RegisterBank::new("signed", registers))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuthVerdict {
    pub message: BitString,
    pub authentic: bool,
    pub report: CheckReport,
}

/// Reads the message, then checks each register against the angle its bit
/// selects. Returns the verdict and the post-measurement bank.
pub fn auth_verify(
    bank: &RegisterBank,
    key: &SharedAuthKey,
    rng: &mut RandomSource,
) -> Result<(AuthVerdict, RegisterBank)> {
    if bank.len() != key.len() {
        return Err(Error::LengthMismatch {
            bank: bank.len(),
            key: key.len(),
        });
    }
    let (message, after_read) = read_bank(bank, rng)?;
    let (report, after_check) = check_bank(&after_read, &key.storage_key_for(&message), rng)?;
    Ok((
        AuthVerdict {
            message,
            authentic: report.all_pass,
            report,
        },
        after_check,
    ))
}

/// Lower bound on the probability that one flipped bit is detected.
pub fn min_flip_detection() -> f64 {
    MIN_SEPARATION.sin().powi(2)
}

/// `1 − cos²(θ0 − θ1)`.
pub fn flip_detection_prob(entry: &AuthKeyEntry) -> f64 {
    debug_assert!(ray_separation(entry.theta0, entry.theta1) <= FRAC_PI_2);
    1.0 - (entry.theta0 - entry.theta1).cos().powi(2)
}
