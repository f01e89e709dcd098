//! Per-instance error measures.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{LinkSet, PointSet, RigidTransform};

/// `e_2D = ‖R·Y − X‖_HS / ‖X‖_HS` under index correspondences.
pub fn alignment_error(r: &DMatrix<f64>, x: &PointSet, y: &PointSet) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::CardinalityMismatch {
            reference: x.len(),
            template: y.len(),
        });
    }
    let denom = x.hs_norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    let diff = r * y.to_matrix() - x.to_matrix();
    Ok(diff.norm() / denom)
}

/// `e_R = ‖I − R·Rᵀ‖_HS`; zero exactly for orthogonal `R`.
pub fn transformation_discrepancy(r: &DMatrix<f64>) -> f64 {
    let n = r.nrows();
    (DMatrix::identity(n, n) - r * r.transpose()).norm()
}

/// Point masses for [`gpe`]; `None` means unit masses.
#[derive(Debug, Clone, Copy, Default)]
pub struct Masses<'a> {
    pub reference: Option<&'a [f64]>,
    pub template: Option<&'a [f64]>,
}

/// Gravitational potential energy `Σ_m Σ_n μ_m μ_n ‖R y_m + t − x_n‖₂`
/// over all pairs (unsquared distances).
pub fn gpe(transform: &RigidTransform, x: &PointSet, y: &PointSet, masses: Masses<'_>) -> f64 {
    let moved = y.transformed(transform);
    let mu = |m: Option<&[f64]>, i: usize| m.map_or(1.0, |v| v[i]);
    let mut e = 0.0;
    for (m, ym) in moved.iter().enumerate() {
        let wm = mu(masses.template, m);
        for (n, xn) in x.iter().enumerate() {
            let d: f64 = ym.iter().zip(xn).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            e += wm * mu(masses.reference, n) * d;
        }
    }
    e
}

/// `Σ_n Σ_{l ∈ links(n)} ‖x_n − R y_l‖²`: the quantity the QUBO encodes.
pub fn residual_energy(r: &DMatrix<f64>, x: &PointSet, y: &PointSet, links: &LinkSet) -> Result<f64> {
    if links.len() != x.len() {
        return Err(Error::InvalidLinks(format!(
            "{} link lists for {} reference points",
            links.len(),
            x.len()
        )));
    }
    let ry: Vec<DVector<f64>> = y.iter().map(|p| r * DVector::from_column_slice(p)).collect();
    let mut e = 0.0;
    for (n, ls) in links.iter().enumerate() {
        let xn = x.point(n);
        for &l in ls {
            let yl = ry
                .get(l)
                .ok_or_else(|| Error::InvalidLinks(format!("template index {l} out of range")))?;
            e += xn.iter().zip(yl.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
    }
    Ok(e)
}

/// Metrics for one decoded solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Absent when no ground-truth correspondences exist.
    pub e2d: Option<f64>,
    pub e_r: f64,
    pub gpe: f64,
    pub qubo_energy: f64,
    pub residual_energy: f64,
}

impl EvalReport {
    /// Whether the QUBO energy and the directly evaluated residual agree.
    pub fn is_consistent(&self) -> bool {
        (self.qubo_energy - self.residual_energy).abs() <= 1e-9 * self.qubo_energy.abs().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rotation_matrix_2d;
    use approx::assert_abs_diff_eq;

    fn ps(pts: &[(f64, f64)]) -> PointSet {
        PointSet::new(2, &pts.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn alignment_error_examples() {
        let x = ps(&[(1.0, 0.0), (-1.0, 2.0), (0.0, -2.0)]);
        let rot = rotation_matrix_2d(0.3);
        let y = x.transformed(&RigidTransform::from_rotation(rot.transpose()));
        assert!(alignment_error(&rot, &x, &y).unwrap() < 1e-15);
        assert_abs_diff_eq!(alignment_error(&DMatrix::zeros(2, 2), &x, &y).unwrap(), 1.0);
        let e = alignment_error(&(DMatrix::identity(2, 2) * 0.95), &x, &x).unwrap();
        assert_abs_diff_eq!(e, 0.05, epsilon = 1e-15);
        assert!(matches!(
            alignment_error(&rot, &x, &ps(&[(0.0, 0.0)])),
            Err(Error::CardinalityMismatch { .. })
        ));
        let zero = ps(&[(0.0, 0.0)]);
        assert!(matches!(alignment_error(&rot, &zero, &zero), Err(Error::ZeroReference)));
    }

    #[test]
    fn discrepancy_examples() {
        assert!(transformation_discrepancy(&rotation_matrix_2d(2.0)) < 1e-12);
        let e = transformation_discrepancy(&(DMatrix::identity(2, 2) * 0.95));
        assert_abs_diff_eq!(e, 0.0975 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            transformation_discrepancy(&DMatrix::zeros(2, 2)),
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gpe_examples() {
        let rot = rotation_matrix_2d(0.7);
        let t = RigidTransform::new(rot.clone(), DVector::from_column_slice(&[1.0, -1.0]));
        let y = ps(&[(2.0, 3.0)]);
        let x = y.transformed(&t);
        assert!(gpe(&t, &x, &y, Masses::default()) < 1e-12);

        let id = RigidTransform::identity(2);
        assert_eq!(gpe(&id, &ps(&[(0.0, 0.0)]), &ps(&[(1.0, 0.0)]), Masses::default()), 1.0);

        // Hand sum: |(1,0)-(0,0)| + |(1,0)-(3,4)| + |(0,1)-(0,0)| + |(0,1)-(3,4)|.
        let x = ps(&[(0.0, 0.0), (3.0, 4.0)]);
        let y = ps(&[(1.0, 0.0), (0.0, 1.0)]);
        let expected = 1.0 + 20f64.sqrt() + 1.0 + 18f64.sqrt();
        assert_abs_diff_eq!(gpe(&id, &x, &y, Masses::default()), expected, epsilon = 1e-12);
        let w = [2.0, 1.0];
        let masses = Masses {
            reference: Some(&w),
            template: None,
        };
        let weighted = 2.0 * 1.0 + 20f64.sqrt() + 2.0 * 1.0 + 18f64.sqrt();
        assert_abs_diff_eq!(gpe(&id, &x, &y, masses), weighted, epsilon = 1e-12);
    }

    #[test]
    fn residual_examples() {
        let x = ps(&[(1.0, 2.0), (-1.0, -2.0)]);
        let rot = rotation_matrix_2d(0.4);
        let y = x.transformed(&RigidTransform::from_rotation(rot.transpose()));
        let links = LinkSet::identity(2);
        assert!(residual_energy(&rot, &x, &y, &links).unwrap() < 1e-24);
        let r = DMatrix::identity(2, 2) * 0.3;
        let base = residual_energy(&r, &x, &y, &links).unwrap();
        let doubled = residual_energy(&r, &x.scaled(2.0), &y.scaled(2.0), &links).unwrap();
        assert_abs_diff_eq!(doubled, 4.0 * base, epsilon = 1e-12);
    }
}
