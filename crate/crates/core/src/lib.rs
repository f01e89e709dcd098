//! Rigid point-set alignment and correspondence-free registration encoded
//! as QUBO problems.
//!
//! A linear map is approximated by a bit-selected sum of weighted
//! generator matrices ([`basis`]). The squared alignment residual is then a
//! quadratic form in those bits ([`qubo`]), which classical samplers
//! ([`samplers`]) minimize. Solutions decode back to transformations
//! ([`unembed`]) and are scored by [`metrics`]. [`quantum`] simulates
//! adiabatic annealing of small Ising problems, and [`bench`] runs the
//! evaluation protocols end to end.

pub mod basis;
pub mod bench;
pub mod datasets;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod quantum;
pub mod qubo;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod unembed;

pub use basis::{build_basis_2d, build_basis_3d, RotationBasis};
pub use error::{Error, Result};
pub use geometry::{LinkSet, PointSet, RigidTransform};
pub use qubo::{build_qubo, reduce_clamped, to_ising, IsingProblem, QuboProblem, ReducedQubo};
pub use samplers::{ground_state, solve_exhaustive, solve_sa, SaSchedule, Solution};
pub use unembed::{project_to_rotation, unembed};
