//! Decoding measured bitstrings into transformations.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::RotationBasis;
use crate::error::{Error, Result};
use crate::geometry::RigidTransform;
use crate::linalg::svd_jacobi;
use crate::samplers::Solution;

/// Singular values below this mark a decoded map as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

const SVD_TOLERANCE: f64 = 1e-13;

/// Sum the basis elements selected by the solution's free bits and recover
/// the translation `t = c_ref − R·c_tmpl`. The result is affine.
pub fn unembed(
    solution: &Solution,
    basis: &RotationBasis,
    ref_centroid: &[f64],
    tmpl_centroid: &[f64],
) -> Result<RigidTransform> {
    if solution.bits.len() != basis.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: basis.len() + 1,
            got: solution.bits.len(),
        });
    }
    if !solution.bits[0] {
        return Err(Error::ClampViolated);
    }
    let d = basis.dim();
    for c in [ref_centroid, tmpl_centroid] {
        if c.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: c.len(),
            });
        }
    }
    let r = basis.assemble(solution.free_bits())?;
    let t = DVector::from_column_slice(ref_centroid) - &r * DVector::from_column_slice(tmpl_centroid);
    Ok(RigidTransform::new(r, t))
}

/// Closest proper rotation to a linear map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    #[serde(serialize_with = "crate::report::serialize_matrix")]
    pub rotation: DMatrix<f64>,
    /// The smallest singular value of the input was below
    /// [`DEGENERACY_THRESHOLD`]; the rotation is valid but not unique.
    pub degenerate: bool,
    pub singular_values: Vec<f64>,
}

/// `R_r = U·diag(1, …, 1, det(UVᵀ))·Vᵀ` from the SVD `R = UΣVᵀ`, the
/// minimizer of `‖R_r − R‖_HS` over proper rotations.
pub fn project_to_rotation(r: &DMatrix<f64>) -> Projection {
    let svd = svd_jacobi(r, SVD_TOLERANCE);
    let n = r.nrows();
    let det = (&svd.u * svd.v.transpose()).determinant();
    let mut fix = DVector::from_element(n, 1.0);
    fix[n - 1] = det.signum();
    let rotation = &svd.u * DMatrix::from_diagonal(&fix) * svd.v.transpose();
    let smallest = svd.singular.last().copied().unwrap_or(0.0);
    let scale = svd.singular.first().copied().unwrap_or(0.0);
    Projection {
        rotation,
        degenerate: smallest < DEGENERACY_THRESHOLD || smallest < DEGENERACY_THRESHOLD * scale,
        singular_values: svd.singular,
    }
}

/// Largest singular value of a matrix.
pub fn max_singular_value(r: &DMatrix<f64>) -> f64 {
    svd_jacobi(r, SVD_TOLERANCE).singular[0]
}
