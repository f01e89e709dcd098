//! Classical samplers for [`ReducedQubo`] problems.
//!
//! Free bit `i` of a `B`-bit assignment maps to bit `B − 1 − i` of the
//! packed state index, so integer order is lexicographic order with the
//! first free bit most significant. Ties between energies closer than
//! [`tie_tolerance`] are resolved towards the lexicographically smaller
//! bitstring.

mod anneal;
mod exhaustive;

pub use anneal::{solve_sa, SaSchedule};
pub use exhaustive::{ground_state, solve_exhaustive, spectrum_slice, MAX_EXHAUSTIVE_BITS};

use serde::Serialize;

use crate::qubo::ReducedQubo;

/// A measured bitstring over all `B + 1` variables (bit 0 is the clamped
/// bit) with its energy `qᵀPq`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub bits: Vec<bool>,
    pub energy: f64,
}

impl Solution {
    /// Build from free bits, recomputing the energy exactly.
    pub fn from_free_bits(reduced: &ReducedQubo, free: &[bool]) -> Self {
        Self {
            energy: reduced.energy(free),
            bits: ReducedQubo::expand(free),
        }
    }

    pub fn free_bits(&self) -> &[bool] {
        &self.bits[1..]
    }

    pub fn hex(&self) -> String {
        bits_to_hex(&self.bits)
    }
}

/// One distinct energy level of a full enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub energy: f64,
    pub multiplicity: u64,
    /// Packed index of the lexicographically smallest state at this level.
    pub representative: u64,
}

/// All distinct energies of a reduced QUBO, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySpectrum {
    pub bits: usize,
    pub levels: Vec<SpectrumLevel>,
    /// Second level minus the first; zero when only one level exists.
    pub gap: f64,
}

impl EnergySpectrum {
    pub fn representative_bits(&self, level: usize) -> Vec<bool> {
        unpack(self.levels[level].representative, self.bits)
    }

    pub fn total_states(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }
}

/// A best-so-far improvement seen by a sampler.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub energy: f64,
    /// Full bitstring, clamped bit first.
    pub bits: Vec<bool>,
}

/// Sequence of strictly decreasing best-so-far energies.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

/// Absolute tolerance below which two energies of `reduced` are treated as
/// degenerate.
pub fn tie_tolerance(reduced: &ReducedQubo) -> f64 {
    1e-10 * reduced.scale().max(1e-300)
}

/// Unpack a state index into `bits` free bits, first bit most significant.
pub fn unpack(state: u64, bits: usize) -> Vec<bool> {
    (0..bits).map(|i| state >> (bits - 1 - i) & 1 == 1).collect()
}

/// Inverse of [`unpack`].
pub fn pack(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

/// Hex string of a bitstring, first bit most significant, left-padded to a
/// whole number of nibbles.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let pad = (4 - bits.len() % 4) % 4;
    let padded: Vec<bool> = std::iter::repeat_n(false, pad).chain(bits.iter().copied()).collect();
    padded
        .chunks(4)
        .map(|c| {
            let v = c.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

/// Incremental single-flip energy bookkeeping shared by the samplers.
pub(crate) struct FlipState {
    n: usize,
    /// `Q + Qᵀ` with zero diagonal, row-major.
    coupling: Vec<f64>,
    /// `linear_i + Q_ii`.
    diag: Vec<f64>,
    pub(crate) x: Vec<bool>,
    /// `Σ_{k≠i} (Q_ik + Q_ki) x_k`.
    field: Vec<f64>,
    pub(crate) energy: f64,
}

impl FlipState {
    pub(crate) fn new(reduced: &ReducedQubo, x: Vec<bool>) -> Self {
        let n = reduced.len();
        let q = &reduced.quadratic;
        let mut coupling = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    coupling[i * n + k] = q[(i, k)] + q[(k, i)];
                }
            }
        }
        let diag = (0..n).map(|i| reduced.linear[i] + q[(i, i)]).collect();
        let mut s = Self {
            n,
            coupling,
            diag,
            x,
            field: vec![0.0; n],
            energy: 0.0,
        };
        s.resync(reduced);
        s
    }

    /// Recompute field and energy from scratch.
    pub(crate) fn resync(&mut self, reduced: &ReducedQubo) {
        for i in 0..self.n {
            let row = &self.coupling[i * self.n..(i + 1) * self.n];
            self.field[i] = row.iter().zip(&self.x).filter(|(_, &b)| b).map(|(c, _)| c).sum();
        }
        self.energy = reduced.energy(&self.x);
    }

    #[inline]
    pub(crate) fn delta(&self, i: usize) -> f64 {
        let on = self.diag[i] + self.field[i];
        if self.x[i] {
            -on
        } else {
            on
        }
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize, delta: f64) {
        let sign = if self.x[i] { -1.0 } else { 1.0 };
        self.x[i] = !self.x[i];
        self.energy += delta;
        let row = &self.coupling[i * self.n..(i + 1) * self.n];
        for (f, c) in self.field.iter_mut().zip(row) {
            *f += sign * c;
        }
    }
}
