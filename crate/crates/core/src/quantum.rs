//! Dense toy-scale simulation of adiabatic annealing.
//!
//! Basis state `|b⟩` of an `n`-qubit register stores qubit `j` in bit
//! `n − 1 − j` of `b`, so qubit 0 is the leftmost tensor factor. Spin
//! `s_j = +1` corresponds to qubit state `|0⟩` (`σ^z|0⟩ = |0⟩`). Since
//! [`crate::qubo::to_ising`] maps spin `+1` to QUBO bit 1, the QUBO
//! assignment encoded by `|b⟩` is the bitwise complement of `b`; see
//! [`qubo_bits_for_basis_state`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SymmetricEigen};
use crate::qubo::IsingProblem;

/// Qubit limit for dense eigensolves.
pub const MAX_EIGEN_QUBITS: usize = 12;
/// Qubit limit for time evolution.
pub const MAX_EVOLVE_QUBITS: usize = 10;
/// Minimum number of time steps accepted by [`evolve`].
pub const MIN_EVOLVE_STEPS: usize = 100;
/// Gaps at or below this are treated as degenerate.
pub const GAP_THRESHOLD: f64 = 1e-10;

const EIGEN_TOLERANCE: f64 = 1e-12;

/// Known sparsity structure of a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Structure {
    Diagonal,
    /// `−B_x Σ_j σ^x_j`.
    TransverseField {
        bx: f64,
    },
    General,
}

/// Real symmetric `2ⁿ × 2ⁿ` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    n: usize,
    matrix: DMatrix<f64>,
    structure: Structure,
}

impl DenseHamiltonian {
    /// Wrap an arbitrary symmetric matrix of size `2ⁿ`.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let size = matrix.nrows();
        if !matrix.is_square() || !size.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "{}x{} is not a 2^n square matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = size.trailing_zeros() as usize;
        if n > MAX_EIGEN_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: MAX_EIGEN_QUBITS,
            });
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 {
            return Err(Error::InvalidConfig("Hamiltonian is not symmetric".into()));
        }
        Ok(Self {
            n,
            matrix,
            structure: Structure::General,
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn eigen(&self) -> SymmetricEigen {
        symmetric_eigen(&self.matrix, EIGEN_TOLERANCE)
    }
}

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooManyQubits { n, max });
    }
    Ok(())
}

/// Spin of qubit `j` in basis state `b`.
fn spin(b: usize, j: usize, n: usize) -> i8 {
    if b >> (n - 1 - j) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Spins `s_j` of basis state `b`.
pub fn spins_for_basis_state(b: usize, n: usize) -> Vec<i8> {
    (0..n).map(|j| spin(b, j, n)).collect()
}

/// QUBO bits encoded by basis state `b` under the `x = (1 + s)/2` map.
pub fn qubo_bits_for_basis_state(b: usize, n: usize) -> Vec<bool> {
    spins_for_basis_state(b, n).into_iter().map(|s| s == 1).collect()
}

/// Diagonal problem Hamiltonian `Σ h_j σ^z_j + Σ J_jk σ^z_j σ^z_k`
/// (the Ising offset is not included).
pub fn build_hp(ising: &IsingProblem) -> Result<DenseHamiltonian> {
    let n = ising.len();
    check_qubits(n, MAX_EIGEN_QUBITS)?;
    let size = 1usize << n;
    let mut diag = vec![0.0; size];
    for (b, d) in diag.iter_mut().enumerate() {
        for (j, h) in ising.h.iter().enumerate() {
            *d += h * f64::from(spin(b, j, n));
        }
        for (&(a, c), v) in &ising.j {
            *d += v * f64::from(spin(b, a, n) * spin(b, c, n));
        }
    }
    Ok(DenseHamiltonian {
        n,
        matrix: DMatrix::from_diagonal(&DVector::from_vec(diag)),
        structure: Structure::Diagonal,
    })
}

/// Transverse-field Hamiltonian `−B_x Σ_j σ^x_j`.
pub fn build_hi(n: usize, bx: f64) -> Result<DenseHamiltonian> {
    check_qubits(n, MAX_EIGEN_QUBITS)?;
    if !(bx > 0.0 && bx.is_finite()) {
        return Err(Error::InvalidConfig(format!("B_x must be positive, got {bx}")));
    }
    let size = 1usize << n;
    let mut m = DMatrix::zeros(size, size);
    for b in 0..size {
        for j in 0..n {
            m[(b, b ^ (1 << j))] = -bx;
        }
    }
    Ok(DenseHamiltonian {
        n,
        matrix: m,
        structure: Structure::TransverseField { bx },
    })
}

/// `H(s) = (1 − s)·H_I + s·H_P`.
pub fn interpolate(hi: &DenseHamiltonian, hp: &DenseHamiltonian, s: f64) -> Result<DenseHamiltonian> {
    if hi.n != hp.n {
        return Err(Error::DimensionMismatch {
            expected: hi.n,
            got: hp.n,
        });
    }
    if s == 0.0 {
        return Ok(hi.clone());
    }
    if s == 1.0 {
        return Ok(hp.clone());
    }
    Ok(DenseHamiltonian {
        n: hi.n,
        matrix: &hi.matrix * (1.0 - s) + &hp.matrix * s,
        structure: Structure::General,
    })
}

/// One point of a [`GapCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSample {
    pub s: f64,
    pub gap: f64,
    pub ground_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCurve {
    pub samples: Vec<GapSample>,
}

impl GapCurve {
    /// Sample with the smallest gap.
    pub fn min_gap(&self) -> Option<GapSample> {
        self.samples.iter().copied().min_by(|a, b| a.gap.total_cmp(&b.gap))
    }
}

fn grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points".into()));
    }
    Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect())
}

/// Gap between the two lowest eigenvalues of `H(s)` on a uniform grid.
pub fn gap_curve(hi: &DenseHamiltonian, hp: &DenseHamiltonian, grid_points: usize) -> Result<GapCurve> {
    let samples = grid(grid_points)?
        .into_iter()
        .map(|s| {
            let e = interpolate(hi, hp, s)?.eigen();
            let gap = if e.values.len() > 1 {
                (e.values[1] - e.values[0]).max(0.0)
            } else {
                0.0
            };
            Ok(GapSample {
                s,
                gap,
                ground_energy: e.values[0],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapCurve { samples })
}

/// Result of [`annealing_rate_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBound {
    /// `max_s max_{m≠0} |⟨E_m|dH/ds|E_0⟩| / (E_m − E_0)²`.
    pub t_min: f64,
    /// Grid point attaining the maximum.
    pub at_s: f64,
}

/// Minimum total anneal time scale from the adiabatic criterion, with
/// `dH/ds = H_P − H_I`.
pub fn annealing_rate_bound(hi: &DenseHamiltonian, hp: &DenseHamiltonian, grid_points: usize) -> Result<RateBound> {
    if hi.n != hp.n {
        return Err(Error::DimensionMismatch {
            expected: hi.n,
            got: hp.n,
        });
    }
    let dh = &hp.matrix - &hi.matrix;
    let mut best = RateBound { t_min: 0.0, at_s: 0.0 };
    for s in grid(grid_points)? {
        let e = interpolate(hi, hp, s)?.eigen();
        if e.values.len() < 2 {
            continue;
        }
        let gap = e.values[1] - e.values[0];
        if gap <= GAP_THRESHOLD {
            return Err(Error::DegenerateGap { s, gap });
        }
        let ground = e.vectors.column(0);
        let dh_ground = &dh * ground;
        for m in 1..e.values.len() {
            let element = e.vectors.column(m).dot(&dh_ground).abs();
            let ratio = element / (e.values[m] - e.values[0]).powi(2);
            if ratio > best.t_min {
                best = RateBound { t_min: ratio, at_s: s };
            }
        }
    }
    Ok(best)
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn basis(n: usize, b: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[b] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    /// `|+⟩^⊗n`, the ground state of the transverse field.
    pub fn plus(n: usize) -> Self {
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        Self {
            n,
            amplitudes: vec![Complex64::new(a, 0.0); 1 << n],
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, b: usize) -> f64 {
        self.amplitudes[b].norm_sqr()
    }

    /// Apply the Hadamard gate to qubit `j`.
    pub fn hadamard(&mut self, j: usize) {
        let mask = 1usize << (self.n - 1 - j);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for b in (0..self.amplitudes.len()).filter(|b| b & mask == 0) {
            let (a0, a1) = (self.amplitudes[b], self.amplitudes[b | mask]);
            self.amplitudes[b] = (a0 + a1) * h;
            self.amplitudes[b | mask] = (a0 - a1) * h;
        }
    }

    pub fn hadamard_all(&mut self) {
        for j in 0..self.n {
            self.hadamard(j);
        }
    }

    /// `Σ_k |⟨v_k|ψ⟩|²` over orthonormal real vectors `v_k`.
    fn projection_weight<'a>(&self, vectors: impl Iterator<Item = nalgebra::DVectorView<'a, f64>>) -> f64 {
        vectors
            .map(|v| {
                v.iter()
                    .zip(&self.amplitudes)
                    .map(|(c, a)| a * *c)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }
}

/// How [`evolve_with`] advances the state by one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Propagator {
    /// Symmetric split of the diagonal and transverse-field parts; needs
    /// a diagonal `H_P` and a transverse-field `H_I`.
    Split,
    /// `exp(−i·H(s_mid)·Δt)` from a full eigen-decomposition.
    Exact,
}

/// Final state of an anneal and its weight on the ground space of `H_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: QuantumState,
    pub ground_overlap: f64,
}

/// Step count keeping `‖H‖·Δt` at or below `0.05` for an anneal of total
/// time `total_time`, never fewer than [`MIN_EVOLVE_STEPS`].
pub fn suggested_steps(hi: &DenseHamiltonian, hp: &DenseHamiltonian, total_time: f64) -> usize {
    // Row-sum bounds on the spectral norms.
    let row_bound = |m: &DMatrix<f64>| {
        m.row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let norm = row_bound(hi.matrix()).max(row_bound(hp.matrix()));
    ((total_time * norm / 0.05).ceil() as usize).max(MIN_EVOLVE_STEPS)
}

/// Evolve `|+⟩^⊗n` under `H(t/T)` for total time `T` using the
/// exponential-midpoint rule, split when the structure allows it.
pub fn evolve(hi: &DenseHamiltonian, hp: &DenseHamiltonian, total_time: f64, steps: usize) -> Result<Evolution> {
    let propagator = match (hi.structure, hp.structure) {
        (Structure::TransverseField { .. }, Structure::Diagonal) => Propagator::Split,
        _ => Propagator::Exact,
    };
    evolve_with(hi, hp, total_time, steps, propagator)
}

pub fn evolve_with(
    hi: &DenseHamiltonian,
    hp: &DenseHamiltonian,
    total_time: f64,
    steps: usize,
    propagator: Propagator,
) -> Result<Evolution> {
    if hi.n != hp.n {
        return Err(Error::DimensionMismatch {
            expected: hi.n,
            got: hp.n,
        });
    }
    let n = hi.n;
    check_qubits(n, MAX_EVOLVE_QUBITS)?;
    if steps < MIN_EVOLVE_STEPS {
        return Err(Error::InvalidConfig(format!(
            "evolution needs at least {MIN_EVOLVE_STEPS} steps, got {steps}"
        )));
    }
    if !(total_time >= 0.0 && total_time.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid anneal time {total_time}")));
    }
    let mut psi = QuantumState::plus(n);
    let dt = total_time / steps as f64;

    match propagator {
        Propagator::Split => {
            let (Structure::TransverseField { bx }, Structure::Diagonal) = (hi.structure, hp.structure) else {
                return Err(Error::InvalidConfig(
                    "split propagation needs a transverse-field H_I and a diagonal H_P".into(),
                ));
            };
            let energies: Vec<f64> = hp.matrix.diagonal().iter().copied().collect();
            for k in 0..steps {
                let s = (k as f64 + 0.5) / steps as f64;
                apply_diagonal_phase(&mut psi, &energies, s * dt / 2.0);
                apply_transverse(&mut psi, (1.0 - s) * bx * dt);
                apply_diagonal_phase(&mut psi, &energies, s * dt / 2.0);
            }
        }
        Propagator::Exact => {
            for k in 0..steps {
                let s = (k as f64 + 0.5) / steps as f64;
                let e = interpolate(hi, hp, s)?.eigen();
                let mut coeffs: Vec<Complex64> = (0..psi.amplitudes.len())
                    .map(|m| {
                        e.vectors
                            .column(m)
                            .iter()
                            .zip(&psi.amplitudes)
                            .map(|(c, a)| a * *c)
                            .sum()
                    })
                    .collect();
                for (c, &lambda) in coeffs.iter_mut().zip(&e.values) {
                    *c *= Complex64::from_polar(1.0, -lambda * dt);
                }
                for (b, amp) in psi.amplitudes.iter_mut().enumerate() {
                    *amp = coeffs.iter().enumerate().map(|(m, c)| c * e.vectors[(b, m)]).sum();
                }
            }
        }
    }

    let ground_overlap = ground_space_weight(hp, &psi);
    Ok(Evolution {
        state: psi,
        ground_overlap,
    })
}

/// Probability mass of `psi` on the lowest eigenspace of `hp`.
pub fn ground_space_weight(hp: &DenseHamiltonian, psi: &QuantumState) -> f64 {
    if hp.structure == Structure::Diagonal {
        let diag = hp.matrix.diagonal();
        let min = diag.min();
        let tol = GAP_THRESHOLD * diag.amax().max(1.0);
        diag.iter()
            .enumerate()
            .filter(|(_, &e)| e <= min + tol)
            .map(|(b, _)| psi.probability(b))
            .sum()
    } else {
        let e = hp.eigen();
        let tol = GAP_THRESHOLD * e.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let ground = e.values.iter().take_while(|&&v| v <= e.values[0] + tol).count();
        psi.projection_weight((0..ground).map(|m| e.vectors.column(m)))
    }
}

fn apply_diagonal_phase(psi: &mut QuantumState, energies: &[f64], tau: f64) {
    for (a, &e) in psi.amplitudes.iter_mut().zip(energies) {
        *a *= Complex64::from_polar(1.0, -e * tau);
    }
}

/// `exp(i·θ·Σ_j σ^x_j)` as a product of commuting single-qubit rotations.
fn apply_transverse(psi: &mut QuantumState, theta: f64) {
    let (sin, cos) = theta.sin_cos();
    let isin = Complex64::new(0.0, sin);
    for j in 0..psi.n {
        let mask = 1usize << j;
        for b in (0..psi.amplitudes.len()).filter(|b| b & mask == 0) {
            let (a0, a1) = (psi.amplitudes[b], psi.amplitudes[b | mask]);
            psi.amplitudes[b] = a0 * cos + a1 * isin;
            psi.amplitudes[b | mask] = a0 * isin + a1 * cos;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single(h: f64) -> IsingProblem {
        IsingProblem::new(vec![h])
    }

    #[test]
    fn hp_examples() {
        let hp = build_hp(&single(1.0)).unwrap();
        assert_eq!(hp.matrix().diagonal().as_slice(), &[1.0, -1.0]);

        let mut ising = IsingProblem::new(vec![0.0, 0.0]);
        ising.add_coupling(0, 1, 1.0).unwrap();
        let hp = build_hp(&ising).unwrap();
        assert_eq!(hp.matrix().diagonal().as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(build_hp(&IsingProblem::new(vec![0.0; 13])).is_err());
    }

    #[test]
    fn hi_examples() {
        let hi = build_hi(1, 1.0).unwrap();
        assert_eq!(hi.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        let e = hi.eigen();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-12);

        for n in 1..=4 {
            let e = build_hi(n, 1.0).unwrap().eigen();
            assert_abs_diff_eq!(e.values[0], -(n as f64), epsilon = 1e-10);
            let g = e.vectors.column(0);
            let expected = 1.0 / ((1 << n) as f64).sqrt();
            for v in g.iter() {
                assert_abs_diff_eq!(v.abs(), expected, epsilon = 1e-9);
            }
        }
        assert!(build_hi(2, 0.0).is_err());
        assert!(matches!(build_hi(13, 1.0), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn interpolation_endpoints() {
        let hi = build_hi(2, 0.7).unwrap();
        let mut ising = IsingProblem::new(vec![0.3, -0.2]);
        ising.add_coupling(0, 1, 0.5).unwrap();
        let hp = build_hp(&ising).unwrap();
        assert_eq!(interpolate(&hi, &hp, 0.0).unwrap().matrix(), hi.matrix());
        assert_eq!(interpolate(&hi, &hp, 1.0).unwrap().matrix(), hp.matrix());
        let mid = interpolate(&hi, &hp, 0.5).unwrap();
        assert!((mid.matrix() - (hi.matrix() + hp.matrix()) * 0.5).abs().max() < 1e-15);
        assert!(interpolate(&hi, &build_hi(3, 1.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn gap_of_equal_operators_is_constant() {
        let hi = build_hi(2, 1.0).unwrap();
        let same = DenseHamiltonian::from_matrix(hi.matrix().clone()).unwrap();
        let curve = gap_curve(&hi, &same, 11).unwrap();
        for s in &curve.samples {
            assert_abs_diff_eq!(s.gap, curve.samples[0].gap, epsilon = 1e-10);
        }
        let bound = annealing_rate_bound(&hi, &same, 11).unwrap();
        assert_eq!(bound.t_min, 0.0);
    }

    #[test]
    fn degenerate_gap_is_reported() {
        // Two decoupled qubits without fields: H_P has a fourfold ground space.
        let hi = build_hi(2, 1.0).unwrap();
        let hp = build_hp(&IsingProblem::new(vec![0.0, 0.0])).unwrap();
        assert!(matches!(
            annealing_rate_bound(&hi, &hp, 5),
            Err(Error::DegenerateGap { s, .. }) if s == 1.0
        ));
    }

    #[test]
    fn hadamard_builds_uniform_superposition() {
        for n in 1..=5 {
            let mut psi = QuantumState::basis(n, 0);
            psi.hadamard_all();
            let expected = QuantumState::plus(n);
            for (a, b) in psi.amplitudes.iter().zip(&expected.amplitudes) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn frozen_evolution_keeps_plus_state() {
        let hi = build_hi(3, 1.0).unwrap();
        let hp = build_hp(&IsingProblem::new(vec![0.5, -0.3, 0.2])).unwrap();
        let ev = evolve(&hi, &hp, 1e-9, 100).unwrap();
        assert_abs_diff_eq!(ev.ground_overlap, 1.0 / 8.0, epsilon = 1e-9);
        assert!(evolve(&hi, &hp, 1.0, 10).is_err());
        assert!(evolve(&build_hi(11, 1.0).unwrap(), &build_hi(11, 1.0).unwrap(), 1.0, 100).is_err());
    }

    #[test]
    fn split_and_exact_propagators_agree() {
        let hi = build_hi(3, 1.0).unwrap();
        let mut ising = IsingProblem::new(vec![0.4, -0.6, 0.3]);
        ising.add_coupling(0, 1, 0.5).unwrap();
        ising.add_coupling(1, 2, -0.7).unwrap();
        let hp = build_hp(&ising).unwrap();
        let a = evolve_with(&hi, &hp, 5.0, 2000, Propagator::Split).unwrap();
        let b = evolve_with(&hi, &hp, 5.0, 2000, Propagator::Exact).unwrap();
        assert_abs_diff_eq!(a.state.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.state.norm(), 1.0, epsilon = 1e-9);
        for (x, y) in a.state.amplitudes.iter().zip(&b.state.amplitudes) {
            assert!((x - y).norm() < 1e-4, "{x} vs {y}");
        }
        assert_abs_diff_eq!(a.ground_overlap, b.ground_overlap, epsilon = 1e-5);
    }

    #[test]
    fn basis_state_convention() {
        assert_eq!(spins_for_basis_state(0b01, 2), vec![1, -1]);
        assert_eq!(qubo_bits_for_basis_state(0b01, 2), vec![true, false]);
    }
}
