//! Versioned JSON files for banks and keys, and CSV output for experiments.
//!
//! A bank file holds raw amplitudes. Holding the file models physical
//! custody of the registers; code that only has an [`OpaqueRegister`]
//! cannot see them.
//!
//! [`OpaqueRegister`]: crate::adversary::OpaqueRegister

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{FlipDetectionRow, SweepRow};
use crate::authcode::{AuthKeyEntry, SharedAuthKey};
use crate::protocol::{RegisterBank, SecretKey, StorageKeyEntry};
use crate::qcore::StateVec;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankFile {
    pub version: u32,
    pub label: String,
    pub n: usize,
    /// `n × 4` amplitudes as `[re, im]`.
    pub registers: Vec<[[f64; 2]; 4]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageEntryRecord {
    pub theta: f64,
    pub bit: u8,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KeyBody {
    Storage {
        entries: Vec<StorageEntryRecord>,
    },
    Auth {
        entries: Vec<AuthKeyEntry>,
        #[serde(default)]
        spent: bool,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KeyFile {
    pub version: u32,
    pub n: usize,
    #[serde(flatten)]
    pub body: KeyBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Key {
    Storage(SecretKey),
    Auth(SharedAuthKey),
}

impl BankFile {
    pub fn from_bank(bank: &RegisterBank) -> Self {
        Self {
            version: FORMAT_VERSION,
            label: bank.label.clone(),
            n: bank.len(),
            registers: bank
                .registers()
                .iter()
                .map(|s| s.amplitudes().map(|a| [a.re, a.im]))
                .collect(),
        }
    }

    pub fn into_bank(self) -> Result<RegisterBank, String> {
        if self.version != FORMAT_VERSION {
            return Err(format!("unsupported version {}", self.version));
        }
        if self.n != self.registers.len() {
            return Err(format!(
                "n = {} but {} registers",
                self.n,
                self.registers.len()
            ));
        }
        let registers = self
            .registers
            .iter()
            .enumerate()
            .map(|(i, r)| {
                StateVec::new(r.map(|[re, im]| Complex64::new(re, im)))
                    .map_err(|e| format!("register {i}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RegisterBank::new(self.label, registers))
    }
}

impl KeyFile {
    pub fn from_key(key: &Key) -> Self {
        match key {
            Key::Storage(k) => Self {
                version: FORMAT_VERSION,
                n: k.len(),
                body: KeyBody::Storage {
                    entries: k
                        .entries()
                        .iter()
                        .map(|e| StorageEntryRecord {
                            theta: e.theta,
                            bit: u8::from(e.bit),
                        })
                        .collect(),
                },
            },
            Key::Auth(k) => Self {
                version: FORMAT_VERSION,
                n: k.len(),
                body: KeyBody::Auth {
                    entries: k.entries().to_vec(),
                    spent: k.is_spent(),
                },
            },
        }
    }

    pub fn into_key(self) -> Result<Key, String> {
        if self.version != FORMAT_VERSION {
            return Err(format!("unsupported version {}", self.version));
        }
        let len = match &self.body {
            KeyBody::Storage { entries } => entries.len(),
            KeyBody::Auth { entries, .. } => entries.len(),
        };
        if self.n != len {
            return Err(format!("n = {} but {len} entries", self.n));
        }
        match self.body {
            KeyBody::Storage { entries } => {
                let entries = entries
                    .into_iter()
                    .map(|e| match e.bit {
                        0 | 1 => Ok(StorageKeyEntry {
                            theta: e.theta,
                            bit: e.bit == 1,
                        }),
                        b => Err(format!("bit {b} is not 0 or 1")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SecretKey::new(entries)
                    .map(Key::Storage)
                    .map_err(|e| e.to_string())
            }
            KeyBody::Auth { entries, spent } => SharedAuthKey::with_spent(entries, spent)
                .map(Key::Auth)
                .map_err(|e| e.to_string()),
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value).expect("file records serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| FileError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| corrupt(path, e.to_string()))
}

fn corrupt(path: &Path, reason: String) -> FileError {
    FileError::Corrupt {
        path: path.to_path_buf(),
        reason,
    }
}

pub fn save_bank(path: &Path, bank: &RegisterBank) -> Result<(), FileError> {
    write_json(path, &BankFile::from_bank(bank))
}

pub fn load_bank(path: &Path) -> Result<RegisterBank, FileError> {
    read_json::<BankFile>(path)?
        .into_bank()
        .map_err(|reason| corrupt(path, reason))
}

pub fn save_key(path: &Path, key: &Key) -> Result<(), FileError> {
    write_json(path, &KeyFile::from_key(key))
}

pub fn load_key(path: &Path) -> Result<Key, FileError> {
    read_json::<KeyFile>(path)?
        .into_key()
        .map_err(|reason| corrupt(path, reason))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), FileError> {
    let to_err = |e: csv::Error| FileError::Write {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for r in rows {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush().map_err(|source| FileError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Columns: `n,strategy,empirical_pass,analytic_pass,std_error,trials,seed`.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), FileError> {
    write_csv(path, rows)
}

/// Columns: `index,theta0,theta1,empirical_detection,analytic_detection,std_error,trials,seed`.
pub fn write_flip_detection_csv(path: &Path, rows: &[FlipDetectionRow]) -> Result<(), FileError> {
    write_csv(path, rows)
}
