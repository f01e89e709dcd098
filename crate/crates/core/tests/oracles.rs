//! Cross-checks against independently computed reference values.

use nalgebra::DMatrix;
use rand::Rng;

use pointset_qubo::basis::build_basis_2d;
use pointset_qubo::datasets::fish;
use pointset_qubo::geometry::{center, rotation_matrix_2d, RigidTransform};
use pointset_qubo::pipeline::Instance;
use pointset_qubo::quantum::{
    annealing_rate_bound, build_hi, build_hp, evolve, gap_curve, qubo_bits_for_basis_state, DenseHamiltonian,
};
use pointset_qubo::qubo::{to_ising, IsingProblem, ReducedQubo};
use pointset_qubo::rng::seeded_rng;
use pointset_qubo::samplers::{ground_state, solve_exhaustive};

/// Minimum of `Σ‖x − R y‖²` over every assembled `R`, using the moment form
/// `Σ‖x‖² − 2⟨R, Σ x yᵀ⟩ + ⟨RᵀR, Σ y yᵀ⟩` with plain arrays.
#[test]
fn fish_ground_state_matches_brute_force() {
    let x = center(&fish()).0;
    let y = x.transformed(&RigidTransform::from_rotation(rotation_matrix_2d(1.1)));
    let mut sxx = 0.0;
    let mut c = [[0.0; 2]; 2];
    let mut syy = [[0.0; 2]; 2];
    for (a, b) in x.iter().zip(y.iter()) {
        sxx += a[0] * a[0] + a[1] * a[1];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] += a[i] * b[j];
                syy[i][j] += b[i] * b[j];
            }
        }
    }
    let basis = build_basis_2d();
    let mats: Vec<[[f64; 2]; 2]> = basis
        .elements()
        .iter()
        .map(|e| {
            [
                [e.matrix[(0, 0)], e.matrix[(0, 1)]],
                [e.matrix[(1, 0)], e.matrix[(1, 1)]],
            ]
        })
        .collect();
    let mut best = (f64::INFINITY, [[0.0; 2]; 2]);
    for state in 0u32..(1 << mats.len()) {
        let mut r = [[0.0; 2]; 2];
        for (k, m) in mats.iter().enumerate() {
            if state >> k & 1 == 1 {
                for i in 0..2 {
                    for j in 0..2 {
                        r[i][j] += m[i][j];
                    }
                }
            }
        }
        let mut e = sxx;
        for i in 0..2 {
            for j in 0..2 {
                e -= 2.0 * r[i][j] * c[i][j];
                let rtr: f64 = (0..2).map(|l| r[l][i] * r[l][j]).sum();
                e += rtr * syy[i][j];
            }
        }
        if e < best.0 {
            best = (e, r);
        }
    }

    let inst = Instance::te(&x, &y).unwrap();
    let ground = ground_state(&inst.reduced).unwrap();
    let r = inst.basis.assemble(ground.free_bits()).unwrap();
    assert!(
        (ground.energy - best.0).abs() <= 1e-9 * best.0.abs().max(1.0),
        "{} vs {}",
        ground.energy,
        best.0
    );
    let oracle = DMatrix::from_row_slice(2, 2, &[best.1[0][0], best.1[0][1], best.1[1][0], best.1[1][1]]);
    assert!((r - oracle).abs().max() < 1e-12);
}

fn random_reduced(n: usize, seed: u64) -> ReducedQubo {
    let mut rng = seeded_rng(seed, 0);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(-1.0..1.0);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let linear = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ReducedQubo::new(q, linear, rng.random_range(-1.0..1.0)).unwrap()
}

#[test]
fn final_gap_equals_classical_spectrum_gap() {
    for seed in 0..5 {
        let reduced = random_reduced(6, seed);
        let (_, spectrum) = solve_exhaustive(&reduced).unwrap();
        let ising = to_ising(&reduced);
        let hp = build_hp(&ising).unwrap();
        let curve = gap_curve(&build_hi(6, 1.0).unwrap(), &hp, 11).unwrap();
        let last = curve.samples.last().unwrap();
        assert_eq!(last.s, 1.0);
        assert!(
            (last.gap - spectrum.gap).abs() < 1e-9,
            "{} vs {}",
            last.gap,
            spectrum.gap
        );
        assert!((last.ground_energy + ising.offset - spectrum.levels[0].energy).abs() < 1e-9);
    }
}

#[test]
fn hp_ground_state_decodes_to_qubo_minimizer() {
    for seed in 10..15 {
        let reduced = random_reduced(7, seed);
        let ising = to_ising(&reduced);
        let hp = build_hp(&ising).unwrap();
        let diag: Vec<f64> = (0..1 << 7).map(|b| hp.matrix()[(b, b)]).collect();
        let b = (0..diag.len()).min_by(|&a, &c| diag[a].total_cmp(&diag[c])).unwrap();
        let ground = ground_state(&reduced).unwrap();
        assert_eq!(qubo_bits_for_basis_state(b, 7), ground.free_bits());
    }
}

fn single_qubit(h: f64, bx: f64) -> (DenseHamiltonian, DenseHamiltonian) {
    (build_hi(1, bx).unwrap(), build_hp(&IsingProblem::new(vec![h])).unwrap())
}

#[test]
fn single_qubit_rate_bound_closed_form() {
    // |⟨E1|dH/ds|E0⟩| = |Bx h| / r and the gap is 2r, so the ratio is
    // |Bx h| / (4 r³) with r(s) = sqrt((1 − s)² Bx² + s² h²).
    for (h, bx) in [(1.0, 1.0), (0.1, 1.0), (-0.5, 2.0)] {
        let (hi, hp) = single_qubit(h, bx);
        let bound = annealing_rate_bound(&hi, &hp, 101).unwrap();
        let expected = (0..101)
            .map(|i| {
                let s = i as f64 / 100.0;
                let r = ((1.0 - s).powi(2) * bx * bx + s * s * h * h).sqrt();
                (bx * h).abs() / (4.0 * r.powi(3))
            })
            .fold(0.0, f64::max);
        assert!(
            (bound.t_min - expected).abs() < 1e-9 * expected,
            "{} vs {expected}",
            bound.t_min
        );
    }
    let easy = annealing_rate_bound(&single_qubit(1.0, 1.0).0, &single_qubit(1.0, 1.0).1, 101).unwrap();
    let hard = annealing_rate_bound(&single_qubit(0.1, 1.0).0, &single_qubit(0.1, 1.0).1, 101).unwrap();
    assert!(hard.t_min > easy.t_min);
}

#[test]
fn sudden_limit_keeps_initial_state() {
    let mut ising = IsingProblem::new(vec![0.5, -0.3, 0.2]);
    ising.add_coupling(0, 1, 0.4).unwrap();
    let hp = build_hp(&ising).unwrap();
    let hi = build_hi(3, 1.0).unwrap();
    // |⟨b|+⟩|² = 1/8 for every computational state.
    let overlap = evolve(&hi, &hp, 1e-9, 100).unwrap().ground_overlap;
    assert!((overlap - 0.125).abs() < 1e-6, "{overlap}");
}

#[test]
fn single_qubit_slow_anneal_finds_ground() {
    let (hi, hp) = single_qubit(0.7, 1.0);
    let overlap = evolve(&hi, &hp, 200.0, 4000).unwrap().ground_overlap;
    assert!(overlap > 0.999, "{overlap}");
    let quick = evolve(&hi, &hp, 0.0, 100).unwrap().ground_overlap;
    assert!((quick - 0.5).abs() < 1e-12);
}
