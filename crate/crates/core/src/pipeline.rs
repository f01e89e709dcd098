//! Build, solve and decode one alignment instance.

use serde::{Deserialize, Serialize};

use crate::basis::RotationBasis;
use crate::error::Result;
use crate::geometry::{center, LinkSet, PointSet, RigidTransform};
use crate::metrics::{alignment_error, gpe, residual_energy, transformation_discrepancy, EvalReport, Masses};
use crate::qubo::{build_phi_psr, build_qubo, reduce_clamped, QuboProblem, ReducedQubo};
use crate::samplers::{ground_state, solve_sa, SaSchedule, Solution, Trace};
use crate::unembed::{project_to_rotation, unembed, Projection};

/// Which sampler minimizes the QUBO.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Sampler {
    #[default]
    Exhaustive,
    Sa(SaSchedule),
}

/// A centered reference/template pair with its link set and QUBO.
#[derive(Debug, Clone)]
pub struct Instance {
    pub reference: PointSet,
    pub template: PointSet,
    pub ref_centroid: Vec<f64>,
    pub tmpl_centroid: Vec<f64>,
    pub links: LinkSet,
    pub basis: RotationBasis,
    pub problem: QuboProblem,
    pub reduced: ReducedQubo,
}

/// A solution decoded into an affine map and its closest rotation.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub solution: Solution,
    pub transform: RigidTransform,
    pub projection: Projection,
}

impl Instance {
    /// Transformation estimation: point `n` of the reference corresponds to
    /// point `n` of the template.
    pub fn te(reference: &PointSet, template: &PointSet) -> Result<Self> {
        if reference.len() != template.len() {
            return Err(crate::Error::CardinalityMismatch {
                reference: reference.len(),
                template: template.len(),
            });
        }
        Self::psr(reference, template, LinkSet::identity(reference.len()))
    }

    /// Registration with explicit links from reference to template indices.
    /// Both sets are centered on their own centroids first.
    pub fn psr(reference: &PointSet, template: &PointSet, links: LinkSet) -> Result<Self> {
        let basis = RotationBasis::for_dim(reference.dim())?;
        let (reference, ref_centroid) = center(reference);
        let (template, tmpl_centroid) = center(template);
        let phi = build_phi_psr(&reference, &template, &links, &basis)?;
        let problem = build_qubo(&phi, reference.dim());
        let reduced = reduce_clamped(&problem);
        Ok(Self {
            reference,
            template,
            ref_centroid,
            tmpl_centroid,
            links,
            basis,
            problem,
            reduced,
        })
    }

    /// Minimize the QUBO. The trace is empty for the exhaustive sampler.
    pub fn solve(&self, sampler: &Sampler, seed: u64) -> Result<(Decoded, Trace)> {
        let (solution, trace) = match sampler {
            Sampler::Exhaustive => (ground_state(&self.reduced)?, Trace::default()),
            Sampler::Sa(schedule) => solve_sa(&self.reduced, schedule, seed)?,
        };
        Ok((self.decode(solution)?, trace))
    }

    pub fn decode(&self, solution: Solution) -> Result<Decoded> {
        let transform = unembed(&solution, &self.basis, &self.ref_centroid, &self.tmpl_centroid)?;
        let projection = project_to_rotation(&transform.rotation);
        Ok(Decoded {
            solution,
            transform,
            projection,
        })
    }

    /// Score a decoded map. `truth` is the clean template in the centered
    /// reference frame with index correspondences, when known.
    pub fn evaluate(&self, decoded: &Decoded, truth: Option<&PointSet>) -> Result<EvalReport> {
        let r = &decoded.transform.rotation;
        let e2d = truth.map(|y| alignment_error(r, &self.reference, y)).transpose()?;
        let centered = RigidTransform::from_rotation(r.clone());
        Ok(EvalReport {
            e2d,
            e_r: transformation_discrepancy(r),
            gpe: gpe(&centered, &self.reference, &self.template, Masses::default()),
            qubo_energy: decoded.solution.energy,
            residual_energy: residual_energy(r, &self.reference, &self.template, &self.links)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::fish;
    use crate::geometry::rotation_2d;

    #[test]
    fn te_at_zero_rotation_finds_scaled_identity() {
        let x = fish().prefix(20);
        let inst = Instance::te(&x, &x).unwrap();
        let (dec, trace) = inst.solve(&Sampler::Exhaustive, 0).unwrap();
        assert!(trace.events.is_empty());
        let report = inst.evaluate(&dec, Some(&inst.template)).unwrap();
        assert!(report.is_consistent());
        assert!((report.e2d.unwrap() - 0.05).abs() < 1e-12);
        assert!((dec.transform.rotation[(0, 0)] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn translation_is_recovered_from_centroids() {
        let x = fish().prefix(15);
        let mut y = x.transformed(&rotation_2d(0.4));
        y = y.transformed(&RigidTransform::new(
            nalgebra::DMatrix::identity(2, 2),
            nalgebra::DVector::from_column_slice(&[3.0, -2.0]),
        ));
        let inst = Instance::te(&x, &y).unwrap();
        let (dec, _) = inst.solve(&Sampler::Exhaustive, 0).unwrap();
        let moved = y.transformed(&dec.transform);
        let err = moved
            .iter()
            .zip(x.iter())
            .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
            .fold(0.0, f64::max);
        assert!(err < 0.1, "{err}");
    }
}
