//! Gray-code enumeration of every free-bit assignment.

use super::{tie_tolerance, unpack, EnergySpectrum, FlipState, Solution, SpectrumLevel};
use crate::error::{Error, Result};
use crate::qubo::ReducedQubo;

/// Largest number of free bits accepted by the exhaustive routines.
pub const MAX_EXHAUSTIVE_BITS: usize = 24;

const RESYNC_INTERVAL: u64 = 4096;

fn check_size(reduced: &ReducedQubo) -> Result<usize> {
    let b = reduced.len();
    if b > MAX_EXHAUSTIVE_BITS {
        return Err(Error::TooManyBits {
            bits: b,
            max: MAX_EXHAUSTIVE_BITS,
        });
    }
    Ok(b)
}

/// Visit `(state, energy)` for all `2^B` states in Gray-code order.
fn walk(reduced: &ReducedQubo, mut visit: impl FnMut(u64, f64)) {
    let b = reduced.len();
    let mut s = FlipState::new(reduced, vec![false; b]);
    let mut state = 0u64;
    visit(state, s.energy);
    for t in 1..(1u64 << b) {
        let p = t.trailing_zeros() as usize;
        let i = b - 1 - p;
        let d = s.delta(i);
        s.flip(i, d);
        state ^= 1 << p;
        if t % RESYNC_INTERVAL == 0 {
            s.resync(reduced);
        }
        visit(state, s.energy);
    }
}

/// Lexicographically smallest global minimizer, without building the
/// spectrum.
pub fn ground_state(reduced: &ReducedQubo) -> Result<Solution> {
    let b = check_size(reduced)?;
    let mut min = f64::INFINITY;
    walk(reduced, |_, e| min = min.min(e));
    let threshold = min + tie_tolerance(reduced);
    let mut best = u64::MAX;
    walk(reduced, |state, e| {
        if e <= threshold && state < best {
            best = state;
        }
    });
    Ok(Solution::from_free_bits(reduced, &unpack(best, b)))
}

/// State indices sorted by energy, grouped into degenerate levels; within a
/// level the indices are ascending.
fn sorted_levels(reduced: &ReducedQubo) -> (Vec<f64>, Vec<u32>, Vec<usize>) {
    let b = reduced.len();
    let mut energies = vec![0.0; 1 << b];
    walk(reduced, |state, e| energies[state as usize] = e);
    let mut order: Vec<u32> = (0..(1u32 << b)).collect();
    order.sort_unstable_by(|&a, &c| energies[a as usize].total_cmp(&energies[c as usize]).then(a.cmp(&c)));

    let tol = tie_tolerance(reduced);
    let mut starts = Vec::new();
    let mut level_energy = f64::NEG_INFINITY;
    for (pos, &s) in order.iter().enumerate() {
        let e = energies[s as usize];
        if starts.is_empty() || e > level_energy + tol {
            starts.push(pos);
            level_energy = e;
        }
    }
    let ends: Vec<usize> = starts.iter().skip(1).copied().chain([order.len()]).collect();
    for (&a, &z) in starts.iter().zip(&ends) {
        order[a..z].sort_unstable();
    }
    (energies, order, starts)
}

/// Global minimum plus the full energy spectrum.
pub fn solve_exhaustive(reduced: &ReducedQubo) -> Result<(Solution, EnergySpectrum)> {
    let b = check_size(reduced)?;
    let (energies, order, starts) = sorted_levels(reduced);
    let ends: Vec<usize> = starts.iter().skip(1).copied().chain([order.len()]).collect();
    let levels: Vec<SpectrumLevel> = starts
        .iter()
        .zip(&ends)
        .map(|(&a, &z)| SpectrumLevel {
            energy: energies[order[a] as usize],
            multiplicity: (z - a) as u64,
            representative: u64::from(order[a]),
        })
        .collect();
    let gap = if levels.len() > 1 {
        levels[1].energy - levels[0].energy
    } else {
        0.0
    };
    let ground = Solution::from_free_bits(reduced, &unpack(levels[0].representative, b));
    Ok((ground, EnergySpectrum { bits: b, levels, gap }))
}

/// The `m` lowest states as `(energy, free bits)`, ascending by level then
/// lexicographically within a level. Energies are recomputed exactly.
pub fn spectrum_slice(reduced: &ReducedQubo, m: usize) -> Result<Vec<(f64, Vec<bool>)>> {
    let b = check_size(reduced)?;
    let (_, order, _) = sorted_levels(reduced);
    Ok(order
        .iter()
        .take(m)
        .map(|&s| {
            let bits = unpack(u64::from(s), b);
            (reduced.energy(&bits), bits)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn single_bit() {
        let r = ReducedQubo::new(DMatrix::zeros(1, 1), vec![1.0], 0.0).unwrap();
        let (sol, spectrum) = solve_exhaustive(&r).unwrap();
        assert_eq!(sol.bits, vec![true, false]);
        assert_eq!(sol.energy, 0.0);
        assert_eq!(spectrum.levels.len(), 2);
        assert_eq!(spectrum.levels[0].multiplicity, 1);
        assert_eq!(spectrum.levels[1].energy, 1.0);
        assert_eq!(spectrum.gap, 1.0);
    }

    #[test]
    fn two_bits_tie_break() {
        let r = ReducedQubo::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]),
            vec![-1.0, -1.0],
            0.0,
        )
        .unwrap();
        let (sol, spectrum) = solve_exhaustive(&r).unwrap();
        assert_eq!(sol.free_bits(), &[false, true]);
        assert_eq!(sol.energy, -1.0);
        assert_eq!(spectrum.levels[0].multiplicity, 2);
        assert_eq!(spectrum.total_states(), 4);
        assert_eq!(ground_state(&r).unwrap(), sol);

        let slice = spectrum_slice(&r, 4).unwrap();
        let order: Vec<Vec<bool>> = slice.iter().map(|(_, b)| b.clone()).collect();
        assert_eq!(
            order,
            vec![
                vec![false, true],
                vec![true, false],
                vec![false, false],
                vec![true, true]
            ]
        );
        assert_eq!(slice[3].0, 2.0);
    }

    #[test]
    fn too_many_bits() {
        let r = ReducedQubo::new(DMatrix::zeros(25, 25), vec![0.0; 25], 0.0).unwrap();
        assert!(matches!(solve_exhaustive(&r), Err(Error::TooManyBits { .. })));
        assert!(matches!(ground_state(&r), Err(Error::TooManyBits { .. })));
        assert!(matches!(spectrum_slice(&r, 1), Err(Error::TooManyBits { .. })));
    }

    #[test]
    fn constant_problem_has_one_level() {
        let r = ReducedQubo::new(DMatrix::zeros(3, 3), vec![0.0; 3], 2.5).unwrap();
        let (sol, spectrum) = solve_exhaustive(&r).unwrap();
        assert_eq!(sol.energy, 2.5);
        assert_eq!(spectrum.levels.len(), 1);
        assert_eq!(spectrum.levels[0].multiplicity, 8);
        assert_eq!(spectrum.gap, 0.0);
    }
}
