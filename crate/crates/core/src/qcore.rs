//! Complex linear algebra in dimension 4.
//!
//! A register is a unit vector over the orthonormal basis
//! `α0, β0, α1, β1`, stored at indices `0..4` in that order. Everything here
//! is a small `Copy` value; the only mutable thing is the [`RandomSource`]
//! threaded through measurements.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance for unit norm, unitarity and orthonormality checks.
pub const NORM_TOL: f64 = 1e-9;

/// Outcome probabilities this close to 0 or 1 are forced instead of sampled.
pub const FORCE_TOL: f64 = 1e-12;

/// Residual vectors with a smaller squared norm cannot be renormalized.
const ZERO_NORM_SQR: f64 = 1e-24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Named basis states of a 4-state register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Alpha0 = 0,
    Beta0 = 1,
    Alpha1 = 2,
    Beta1 = 3,
}

impl Basis {
    pub fn alpha(bit: bool) -> Self {
        if bit {
            Basis::Alpha1
        } else {
            Basis::Alpha0
        }
    }

    pub fn beta(bit: bool) -> Self {
        if bit {
            Basis::Beta1
        } else {
            Basis::Beta0
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A pure state of one register.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec {
    amp: [Complex64; 4],
}

impl StateVec {
    /// Builds a state, rejecting amplitudes whose squared norm is not 1.
    pub fn new(amp: [Complex64; 4]) -> Result<Self> {
        let n2 = norm_sqr(&amp);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amp })
    }

    pub fn from_real(amp: [f64; 4]) -> Result<Self> {
        Self::new(amp.map(|a| Complex64::new(a, 0.0)))
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amp: [Complex64; 4]) -> Result<Self> {
        let n2 = norm_sqr(&amp);
        if n2 < ZERO_NORM_SQR {
            return Err(Error::ImpossibleBranch(n2));
        }
        // Leave vectors that are already unit to the last bit untouched so
        // that forced honest branches return their input exactly.
        if (n2 - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self { amp });
        }
        let inv = 1.0 / n2.sqrt();
        Ok(Self {
            amp: amp.map(|a| a * inv),
        })
    }

    pub fn basis(b: Basis) -> Self {
        let mut amp = [ZERO; 4];
        amp[b.index()] = ONE;
        Self { amp }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amp)
    }
}

fn norm_sqr(amp: &[Complex64; 4]) -> f64 {
    amp.iter().map(|a| a.norm_sqr()).sum()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &StateVec, b: &StateVec) -> Complex64 {
    a.amp
        .iter()
        .zip(b.amp.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `|⟨a|b⟩|²`: the probability that `b` passes a projective check onto `a`.
pub fn fidelity(a: &StateVec, b: &StateVec) -> f64 {
    inner(a, b).norm_sqr().min(1.0)
}

/// A 4×4 unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary4 {
    m: [[Complex64; 4]; 4],
}

impl Unitary4 {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self> {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let dot: Complex64 = (0..4).map(|k| m[i][k] * m[j][k].conj()).sum();
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - expected).norm());
            }
        }
        if worst > NORM_TOL {
            return Err(Error::NotUnitary(worst));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self { m }
    }

    /// Permutation `α0↔α1, β0↔β1`: moves a register into the other bit's
    /// subspace while keeping its angle.
    pub fn subspace_swap() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][2] = ONE;
        m[2][0] = ONE;
        m[1][3] = ONE;
        m[3][1] = ONE;
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn apply(&self, s: &StateVec) -> StateVec {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(self.m.iter()) {
            *o = row.iter().zip(s.amp.iter()).map(|(x, y)| x * y).sum();
        }
        StateVec { amp: out }
    }
}

pub fn apply_unitary(u: &Unitary4, s: &StateVec) -> StateVec {
    u.apply(s)
}

/// Orthogonal projector onto the span of 1 to 3 orthonormal vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    basis: Vec<StateVec>,
}

impl Projector {
    pub fn new(basis: Vec<StateVec>) -> Result<Self> {
        if basis.is_empty() || basis.len() > 3 {
            return Err(Error::ProjectorRank(basis.len()));
        }
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                if inner(a, b).norm() > NORM_TOL {
                    return Err(Error::NonOrthonormalBasis);
                }
            }
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &[StateVec] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `P|s⟩`, not renormalized.
    pub fn project(&self, s: &StateVec) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for b in &self.basis {
            let c = inner(b, s);
            for (o, a) in out.iter_mut().zip(b.amp.iter()) {
                *o += a * c;
            }
        }
        out
    }

    /// `⟨s|P|s⟩`.
    pub fn probability(&self, s: &StateVec) -> f64 {
        self.basis
            .iter()
            .map(|b| inner(b, s).norm_sqr())
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Matrix of the operator, for completeness checks.
    pub fn matrix(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        for b in &self.basis {
            for (i, row) in m.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x += b.amp[i] * b.amp[j].conj();
                }
            }
        }
        m
    }
}

pub fn rank1_projector(psi: &StateVec) -> Projector {
    Projector { basis: vec![*psi] }
}

/// Projector onto `span{α_bit, β_bit}`.
pub fn subspace_projector(bit: bool) -> Projector {
    Projector {
        basis: vec![
            StateVec::basis(Basis::alpha(bit)),
            StateVec::basis(Basis::beta(bit)),
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub success: bool,
    pub post: StateVec,
    /// `⟨s|P|s⟩` before the measurement.
    pub prob: f64,
}

/// Two-outcome projective measurement `{P, I−P}` with collapse.
///
/// Probabilities within [`FORCE_TOL`] of 0 or 1 are decided without drawing
/// from `rng`, so honest protocol branches never flip on rounding noise.
pub fn project_measure(s: &StateVec, p: &Projector, rng: &mut RandomSource) -> Result<Measurement> {
    let prob = p.probability(s);
    let success = if prob >= 1.0 - FORCE_TOL {
        true
    } else if prob <= FORCE_TOL {
        false
    } else {
        rng.uniform() < prob
    };
    let projected = p.project(s);
    let post = if success {
        StateVec::normalized(projected)?
    } else {
        let mut rest = s.amp;
        for (r, x) in rest.iter_mut().zip(projected.iter()) {
            *r -= x;
        }
        StateVec::normalized(rest)?
    };
    Ok(Measurement {
        success,
        post,
        prob,
    })
}

/// Seeded ChaCha8 stream. Identical `(seed, stream)` and call sequence give
/// identical draws.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    /// Independent stream `stream` under `seed`, e.g. one per Monte Carlo trial.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position within the stream, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[0, 2π)`.
    pub fn angle(&mut self) -> f64 {
        self.rng.random_range(0.0..TAU)
    }

    pub fn bit(&mut self) -> bool {
        self.rng.random::<bool>()
    }
}
