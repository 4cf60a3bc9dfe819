//! Classical bits stored in 4-state quantum registers with secret angles.
//!
//! Each bit `c` is held as `cos θ |α_c⟩ + sin θ |β_c⟩` for a secret angle
//! `θ`. Anyone can read the bit without disturbing the register, while only
//! the holder of `θ` can tell the original register from a re-prepared copy.
//!
//! - [`qcore`]: 4-dimensional states, unitaries, projective measurement.
//! - [`protocol`]: storing, reading and checking banks of registers.
//! - [`adversary`]: forgery and tampering strategies.
//! - [`analysis`]: Monte Carlo pass rates and closed forms.
//! - [`authcode`]: message authentication with pre-shared angle pairs.
//! - [`io`]: bank/key files and CSV output.

pub mod adversary;
pub mod analysis;
pub mod authcode;
pub mod error;
pub mod io;
pub mod protocol;
pub mod qcore;

pub use error::{Error, Result};
