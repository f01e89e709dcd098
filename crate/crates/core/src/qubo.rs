//! Construction of `Φ`, the weight matrix `P = ΦΦᵀ`, elimination of the
//! clamped bit and conversion to Ising form.
//!
//! Row 0 of `Φ` holds the reference coordinates; row `k + 1` holds the
//! negated template coordinates transformed by basis element `k`. For any
//! bitstring `q` with `q₀ = 1`, `qᵀPq = ‖qᵀΦ‖²` is the squared residual of
//! the linked point pairs under `R(q) = Σ q_{k+1} Q_k`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::basis::RotationBasis;
use crate::error::{Error, Result};
use crate::geometry::{LinkSet, PointSet};

/// Centroid norm above which an input is rejected as not centered.
pub const CENTERING_TOLERANCE: f64 = 1e-9;

/// Work counters from building `Φ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhiStats {
    /// `(reference, link, basis element)` placements written into `Φ`.
    pub placements: usize,
    /// Distinct `Q_k·y_m` products computed.
    pub products: usize,
}

fn check_centered(ps: &PointSet) -> Result<()> {
    let norm = ps.centroid().iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = ps
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(1.0, f64::max);
    if norm > CENTERING_TOLERANCE * scale {
        return Err(Error::NotCentered { norm });
    }
    Ok(())
}

fn check_dims(reference: &PointSet, template: &PointSet, basis: &RotationBasis) -> Result<()> {
    if reference.dim() != template.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            got: template.dim(),
        });
    }
    if basis.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            got: basis.dim(),
        });
    }
    Ok(())
}

/// `Φ` for transformation estimation: index correspondences, `N = M`.
/// Shape `(B + 1) × (D·N)`.
pub fn build_phi_te(reference: &PointSet, template: &PointSet, basis: &RotationBasis) -> Result<DMatrix<f64>> {
    if reference.len() != template.len() {
        return Err(Error::CardinalityMismatch {
            reference: reference.len(),
            template: template.len(),
        });
    }
    build_phi_psr(reference, template, &LinkSet::identity(reference.len()), basis)
}

/// `Φ = [Φ_1 … Φ_N]` for registration with local links.
/// Shape `(B + 1) × (D·Σ L(n))`.
pub fn build_phi_psr(
    reference: &PointSet,
    template: &PointSet,
    links: &LinkSet,
    basis: &RotationBasis,
) -> Result<DMatrix<f64>> {
    build_phi_with_stats(reference, template, links, basis).map(|(phi, _)| phi)
}

/// [`build_phi_psr`] plus work counters.
pub fn build_phi_with_stats(
    reference: &PointSet,
    template: &PointSet,
    links: &LinkSet,
    basis: &RotationBasis,
) -> Result<(DMatrix<f64>, PhiStats)> {
    check_dims(reference, template, basis)?;
    check_centered(reference)?;
    check_centered(template)?;
    if links.len() != reference.len() {
        return Err(Error::InvalidLinks(format!(
            "{} link lists for {} reference points",
            links.len(),
            reference.len()
        )));
    }
    if let Some(bad) = links.iter().flatten().find(|&&m| m >= template.len()) {
        return Err(Error::InvalidLinks(format!(
            "template index {bad} >= {}",
            template.len()
        )));
    }

    let d = reference.dim();
    let b = basis.len();
    let mut stats = PhiStats::default();

    // −Q_k·y_m is computed once per referenced template point and reused.
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; template.len()];
    let mut products = |m: usize, stats: &mut PhiStats| -> Vec<f64> {
        cache[m]
            .get_or_insert_with(|| {
                stats.products += b;
                let y = DVector::from_column_slice(template.point(m));
                let mut col = Vec::with_capacity(b * d);
                for e in basis.elements() {
                    let qy = &e.matrix * &y;
                    col.extend(qy.iter().map(|v| -v));
                }
                col
            })
            .clone()
    };

    let mut phi = DMatrix::zeros(b + 1, d * links.total());
    let mut col = 0;
    for (n, ls) in links.iter().enumerate() {
        let x = reference.point(n);
        for &m in ls {
            let sub = products(m, &mut stats);
            for c in 0..d {
                phi[(0, col + c)] = x[c];
                for k in 0..b {
                    phi[(k + 1, col + c)] = sub[k * d + c];
                }
            }
            stats.placements += b;
            col += d;
        }
    }
    Ok((phi, stats))
}

/// Dense symmetric QUBO weight matrix over `B + 1` variables, variable 0
/// clamped to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    p: DMatrix<f64>,
    dim: usize,
}

impl QuboProblem {
    /// Wrap an explicit symmetric matrix.
    pub fn from_matrix(p: DMatrix<f64>, dim: usize) -> Result<Self> {
        if !p.is_square() || p.nrows() < 1 {
            return Err(Error::InvalidConfig(
                "weight matrix must be square and non-empty".into(),
            ));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("weight matrix has non-finite entries".into()));
        }
        if p != p.transpose() {
            return Err(Error::InvalidConfig("weight matrix is not symmetric".into()));
        }
        Ok(Self { p, dim })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Point dimension `D` of the encoded problem.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis size `B`.
    pub fn basis_size(&self) -> usize {
        self.p.nrows() - 1
    }

    /// Index of the clamped variable (always 0).
    pub fn clamped_bit(&self) -> usize {
        0
    }

    /// `qᵀPq` over the full bitstring.
    pub fn energy(&self, q: &[bool]) -> Result<f64> {
        if q.len() != self.p.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.p.nrows(),
                got: q.len(),
            });
        }
        let mut e = 0.0;
        for i in (0..q.len()).filter(|&i| q[i]) {
            for j in (0..q.len()).filter(|&j| q[j]) {
                e += self.p[(i, j)];
            }
        }
        Ok(e)
    }

    /// `vᵀPv` for a real vector.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.p * v))
    }
}

/// `P = ΦΦᵀ`, built symmetric by filling the upper triangle and mirroring.
pub fn build_qubo(phi: &DMatrix<f64>, dim: usize) -> QuboProblem {
    let rows = phi.nrows();
    let mut p = DMatrix::zeros(rows, rows);
    for i in 0..rows {
        let ri = phi.row(i);
        for j in i..rows {
            let v = ri.dot(&phi.row(j));
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
    QuboProblem { p, dim }
}

/// QUBO over the `B` free bits after fixing variable 0 to 1:
/// `E(b) = constant + Σ linear_i b_i + Σ_ij Q_ij b_i b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedQubo {
    pub quadratic: DMatrix<f64>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl ReducedQubo {
    pub fn new(quadratic: DMatrix<f64>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        if !quadratic.is_square() || quadratic.nrows() != linear.len() {
            return Err(Error::LengthMismatch {
                expected: quadratic.nrows(),
                got: linear.len(),
            });
        }
        Ok(Self {
            quadratic,
            linear,
            constant,
        })
    }

    /// Number of free bits `B`.
    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        debug_assert_eq!(bits.len(), self.len());
        let mut e = self.constant;
        for i in (0..bits.len()).filter(|&i| bits[i]) {
            e += self.linear[i];
            for j in (0..bits.len()).filter(|&j| bits[j]) {
                e += self.quadratic[(i, j)];
            }
        }
        e
    }

    /// Upper bound on the magnitude of any single term, used to scale
    /// floating-point tie tolerances.
    pub fn scale(&self) -> f64 {
        self.constant.abs()
            + self.linear.iter().map(|v| v.abs()).sum::<f64>()
            + self.quadratic.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Full `B + 1` bitstring with the clamped bit restored.
    pub fn expand(bits: &[bool]) -> Vec<bool> {
        std::iter::once(true).chain(bits.iter().copied()).collect()
    }
}

/// Eliminate the clamped bit analytically.
pub fn reduce_clamped(problem: &QuboProblem) -> ReducedQubo {
    let p = &problem.p;
    let b = p.nrows() - 1;
    ReducedQubo {
        quadratic: p.view((1, 1), (b, b)).into_owned(),
        linear: (1..=b).map(|j| 2.0 * p[(0, j)]).collect(),
        constant: p[(0, 0)],
    }
}

/// `E(s) = Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`, each unordered pair once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingProblem {
    pub h: Vec<f64>,
    /// Couplings keyed by `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn new(h: Vec<f64>) -> Self {
        Self {
            h,
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// Add `value` to the coupling between `a` and `b` (`a ≠ b`).
    pub fn add_coupling(&mut self, a: usize, b: usize, value: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidConfig(format!("self-coupling on spin {a}")));
        }
        if a.max(b) >= self.h.len() {
            return Err(Error::InvalidConfig(format!(
                "coupling ({a}, {b}) outside {} spins",
                self.h.len()
            )));
        }
        *self.j.entry((a.min(b), a.max(b))).or_insert(0.0) += value;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Ising energy without the offset. Spins are `±1`.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e: f64 = self.h.iter().zip(spins).map(|(h, &s)| h * f64::from(s)).sum();
        for (&(a, b), &v) in &self.j {
            e += v * f64::from(spins[a]) * f64::from(spins[b]);
        }
        e
    }

    /// Parse lines `h i value` and `J i j value` (zero-based indices);
    /// `#` comments and blank lines are skipped. `n` fixes the spin count;
    /// otherwise it is one past the largest index seen.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self> {
        let mut fields = Vec::new();
        let mut couplings = Vec::new();
        let mut max_index = None::<usize>;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Format {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let idx = |t: &str| t.parse::<usize>().map_err(|_| err("bad index"));
            let val = |t: &str| t.parse::<f64>().map_err(|_| err("bad value"));
            match toks.as_slice() {
                ["h", i, v] => {
                    let i = idx(i)?;
                    max_index = max_index.max(Some(i));
                    fields.push((i, val(v)?));
                }
                ["J", i, j, v] => {
                    let (i, j) = (idx(i)?, idx(j)?);
                    if i == j {
                        return Err(err("self-coupling"));
                    }
                    max_index = max_index.max(Some(i.max(j)));
                    couplings.push((i, j, val(v)?));
                }
                _ => return Err(err("expected `h i value` or `J i j value`")),
            }
        }
        let n = n.unwrap_or(max_index.map_or(0, |m| m + 1));
        if max_index.is_some_and(|m| m >= n) {
            return Err(Error::InvalidConfig(format!("index outside {n} spins")));
        }
        let mut ising = IsingProblem::new(vec![0.0; n]);
        for (i, v) in fields {
            ising.h[i] += v;
        }
        for (i, j, v) in couplings {
            ising.add_coupling(i, j, v)?;
        }
        Ok(ising)
    }

    /// Text form accepted by [`IsingProblem::parse`]; the offset is not stored.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, h) in self.h.iter().enumerate() {
            out.push_str(&format!("h {i} {h:.16e}\n"));
        }
        for (&(a, b), v) in &self.j {
            out.push_str(&format!("J {a} {b} {v:.16e}\n"));
        }
        out
    }
}

/// Map a reduced QUBO to Ising form via `x_i = (1 + s_i)/2`, so spin `+1`
/// corresponds to bit 1. QUBO energy equals Ising energy plus offset.
pub fn to_ising(reduced: &ReducedQubo) -> IsingProblem {
    let n = reduced.len();
    let q = &reduced.quadratic;
    let mut ising = IsingProblem::new(vec![0.0; n]);
    let mut offset = reduced.constant;
    for i in 0..n {
        let a = reduced.linear[i] + q[(i, i)];
        ising.h[i] += a / 2.0;
        offset += a / 2.0;
        for j in (i + 1)..n {
            let b = q[(i, j)] + q[(j, i)];
            if b == 0.0 {
                continue;
            }
            ising.h[i] += b / 4.0;
            ising.h[j] += b / 4.0;
            ising.j.insert((i, j), b / 4.0);
            offset += b / 4.0;
        }
    }
    ising.offset = offset;
    ising
}

/// Spins for a bit assignment under the `x = (1 + s)/2` map.
pub fn bits_to_spins(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis_2d;
    use crate::rng::seeded_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn ps(pts: &[(f64, f64)]) -> PointSet {
        PointSet::new(2, &pts.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn phi_single_point() {
        // Centering is vacuous only for the origin, so use a symmetric pair.
        let x = ps(&[(1.0, 0.0), (-1.0, 0.0)]);
        let basis = build_basis_2d();
        let phi = build_phi_te(&x, &x, &basis).unwrap();
        assert_eq!(phi.shape(), (21, 4));
        assert_eq!(phi[(0, 0)], 1.0);
        assert_eq!(phi[(0, 1)], 0.0);
        assert_eq!(phi[(1, 0)], -0.5);
        assert_eq!(phi[(1, 1)], 0.0);
    }

    #[test]
    fn phi_zero_template() {
        let x = ps(&[(1.0, 2.0), (-1.0, -2.0)]);
        let y = ps(&[(0.0, 0.0), (0.0, 0.0)]);
        let phi = build_phi_te(&x, &y, &build_basis_2d()).unwrap();
        assert!(phi.rows(1, 20).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phi_errors() {
        let basis = build_basis_2d();
        let x = ps(&[(1.0, 0.0), (-1.0, 0.0)]);
        let y3 = ps(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            build_phi_te(&x, &y3, &basis),
            Err(Error::CardinalityMismatch { .. })
        ));
        let off = ps(&[(2.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(build_phi_te(&off, &x, &basis), Err(Error::NotCentered { .. })));
    }

    #[test]
    fn phi_psr_shape_and_reuse() {
        let basis = build_basis_2d();
        let x = ps(&[(1.0, 0.0), (-1.0, 0.0)]);
        let y = ps(&[(0.0, 1.0), (0.0, -1.0)]);
        let links = LinkSet::new(vec![vec![0, 1], vec![0]], 2).unwrap();
        let (phi, stats) = build_phi_with_stats(&x, &y, &links, &basis).unwrap();
        assert_eq!(phi.shape(), (21, 6));
        // Template point 0 appears in block 1 (cols 0..2) and block 2 (cols 4..6).
        assert_eq!(phi.view((1, 0), (20, 2)), phi.view((1, 4), (20, 2)));
        assert_eq!(stats.placements, 20 * 3);
        assert_eq!(stats.products, 20 * 2);
    }

    #[test]
    fn clamped_bit_energy() {
        let x = ps(&[(1.0, 2.0), (-1.0, -2.0)]);
        let y = ps(&[(0.5, 1.0), (-0.5, -1.0)]);
        let qubo = build_qubo(&build_phi_te(&x, &y, &build_basis_2d()).unwrap(), 2);
        let mut q = vec![false; 21];
        q[0] = true;
        assert_relative_eq!(qubo.energy(&q).unwrap(), 10.0, max_relative = 1e-15);
        assert_eq!(qubo.basis_size(), 20);
        assert_eq!(qubo.clamped_bit(), 0);
    }

    #[test]
    fn reduce_identity() {
        let qubo = QuboProblem::from_matrix(DMatrix::identity(4, 4), 2).unwrap();
        let r = reduce_clamped(&qubo);
        assert_eq!(r.constant, 1.0);
        assert_eq!(r.linear, vec![0.0; 3]);
        assert_eq!(r.quadratic, DMatrix::identity(3, 3));
        assert_eq!(r.energy(&[false; 3]), 1.0);
    }

    #[test]
    fn reduce_matches_full_energy() {
        let mut rng = seeded_rng(11, 0);
        let a = DMatrix::from_fn(9, 14, |_, _| rng.random_range(-1.0..1.0));
        let qubo = QuboProblem::from_matrix(build_qubo(&a, 2).matrix().clone(), 2).unwrap();
        let r = reduce_clamped(&qubo);
        for _ in 0..100 {
            let free: Vec<bool> = (0..8).map(|_| rng.random()).collect();
            let full = qubo.energy(&ReducedQubo::expand(&free)).unwrap();
            assert_relative_eq!(r.energy(&free), full, max_relative = 1e-12);
        }
    }

    #[test]
    fn ising_single_variable() {
        let r = ReducedQubo::new(DMatrix::from_element(1, 1, 1.0), vec![0.0], 0.0).unwrap();
        let ising = to_ising(&r);
        assert_eq!(ising.h, vec![0.5]);
        assert!(ising.j.is_empty());
        assert_eq!(ising.offset, 0.5);
        assert_eq!(ising.energy(&[-1]) + ising.offset, 0.0);
        assert_eq!(ising.energy(&[1]) + ising.offset, 1.0);
    }

    #[test]
    fn ising_zero() {
        let r = ReducedQubo::new(DMatrix::zeros(3, 3), vec![0.0; 3], 0.0).unwrap();
        let ising = to_ising(&r);
        assert_eq!(ising.h, vec![0.0; 3]);
        assert!(ising.j.is_empty());
        assert_eq!(ising.offset, 0.0);
    }

    #[test]
    fn ising_text_roundtrip() {
        let text = "# demo\nh 0 1.5\nh 2 -0.25\nJ 0 1 0.5\nJ 2 1 -1\n";
        let ising = IsingProblem::parse(text, None).unwrap();
        assert_eq!(ising.len(), 3);
        assert_eq!(ising.j[&(1, 2)], -1.0);
        assert_eq!(IsingProblem::parse(&ising.to_text(), Some(3)).unwrap(), ising);
        assert!(IsingProblem::parse("J 0 0 1", None).is_err());
        assert!(IsingProblem::parse("x 0 1", None).is_err());
        assert!(IsingProblem::parse("h 4 1", Some(3)).is_err());
    }
}
