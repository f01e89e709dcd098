//! Point sets, nearest-neighbour linking, outlier injection and rigid
//! transformations.
//!
//! Point sets are stored row-major (one point after another). Indices in
//! [`LinkSet`] are zero-based template indices.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// A finite set of `N` points in `R^D`, `D ∈ {2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Build from a list of points. Every point must have `dim` coordinates.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidPointSet(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Build from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidPointSet(format!("dimension {dim} not in {{2, 3}}")));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidPointSet(format!(
                "{} coordinates do not form a non-empty set of {dim}-vectors",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPointSet("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    /// Build from a `D×N` matrix whose columns are points.
    pub fn from_columns(m: &DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        let mut coords = Vec::with_capacity(m.len());
        for c in m.column_iter() {
            coords.extend(c.iter().copied());
        }
        Self::from_flat(dim, coords)
    }

    /// Parse the whitespace-separated text format: one point per line,
    /// blank lines and `#` comments skipped, dimension taken from the first
    /// data line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut coords = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| Error::Format {
                        line: lineno + 1,
                        msg: format!("non-numeric token {tok:?}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let d = *dim.get_or_insert(row.len());
            if !(d == 2 || d == 3) {
                return Err(Error::Format {
                    line: lineno + 1,
                    msg: format!("dimension {d} not in {{2, 3}}"),
                });
            }
            if row.len() != d {
                return Err(Error::Format {
                    line: lineno + 1,
                    msg: format!("expected {d} values, found {}", row.len()),
                });
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Format {
                    line: lineno + 1,
                    msg: format!("non-finite value {bad}"),
                });
            }
            coords.extend(row);
        }
        let Some(dim) = dim else {
            return Err(Error::Format {
                line: 0,
                msg: "no data lines".into(),
            });
        };
        Self::from_flat(dim, coords)
    }

    /// Serialize into the text format accepted by [`PointSet::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// `D×N` matrix with one point per column.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.dim, self.len(), &self.coords)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (acc, v) in c.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    /// Frobenius norm of the `D×N` coordinate matrix.
    pub fn hs_norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for d in 0..self.dim {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Apply `x ↦ R x + t` to every point.
    pub fn transformed(&self, transform: &RigidTransform) -> PointSet {
        let mut out = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            let v = &transform.rotation * DVector::from_column_slice(p) + &transform.translation;
            out.extend(v.iter().copied());
        }
        PointSet {
            dim: self.dim,
            coords: out,
        }
    }

    pub fn scaled(&self, c: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|v| v * c).collect(),
        }
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords[..n.min(self.len()) * self.dim].to_vec(),
        }
    }

    /// Points at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet { dim: self.dim, coords }
    }
}

/// Read a point set from the text format.
pub fn load_point_set(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PointSet::parse(&text)
}

/// Subtract the centroid. Returns the centered set and the original centroid.
pub fn center(ps: &PointSet) -> (PointSet, Vec<f64>) {
    let c = ps.centroid();
    let mut coords = ps.coords.clone();
    for p in coords.chunks_exact_mut(ps.dim) {
        for (v, m) in p.iter_mut().zip(&c) {
            *v -= m;
        }
    }
    (PointSet { dim: ps.dim, coords }, c)
}

/// For every reference point, the ordered list of template points it
/// interacts with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkSet {
    links: Vec<Vec<usize>>,
}

impl LinkSet {
    /// Validate and wrap explicit links against a template of `m` points.
    pub fn new(links: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        for (n, l) in links.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidLinks(format!("reference {n} has no links")));
            }
            let mut seen = l.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidLinks(format!("reference {n} has duplicate links")));
            }
            if let Some(&bad) = l.iter().find(|&&i| i >= m) {
                return Err(Error::InvalidLinks(format!(
                    "reference {n} links template index {bad} >= {m}"
                )));
            }
        }
        Ok(Self { links })
    }

    /// Index correspondences `n ↔ n` for `n` reference points.
    pub fn identity(n: usize) -> Self {
        Self {
            links: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Every reference point linked to every one of `m` template points.
    pub fn global(n: usize, m: usize) -> Self {
        Self {
            links: vec![(0..m).collect(); n],
        }
    }

    pub fn links(&self, n: usize) -> &[usize] {
        &self.links[n]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.links.iter().map(Vec::as_slice)
    }

    /// Number of reference points.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// `Σ L(n)`.
    pub fn total(&self) -> usize {
        self.links.iter().map(Vec::len).sum()
    }

    /// `L̄`, the mean number of links per reference point.
    pub fn mean_degree(&self) -> f64 {
        self.total() as f64 / self.len() as f64
    }
}

/// The `k` nearest template points of every reference point, by brute-force
/// scan. Ties go to the smaller template index.
pub fn knn_links(reference: &PointSet, template: &PointSet, k: usize) -> Result<LinkSet> {
    if reference.dim() != template.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            got: template.dim(),
        });
    }
    let m = template.len();
    if k < 1 || k > m {
        return Err(Error::InvalidK { k, m });
    }
    let links = reference
        .iter()
        .map(|x| {
            let mut d: Vec<(f64, usize)> = template.iter().enumerate().map(|(j, y)| (sq_dist(x, y), j)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();
    Ok(LinkSet { links })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Append `⌊ratio·M⌋` points drawn uniformly from the template's bounding box.
pub fn add_uniform_outliers(template: &PointSet, ratio: f64, seed: u64) -> Result<PointSet> {
    if !(0.0..=0.5).contains(&ratio) {
        return Err(Error::InvalidRatio(ratio));
    }
    let count = (ratio * template.len() as f64).floor() as usize;
    let (lo, hi) = template.bounding_box();
    let mut rng = seeded_rng(seed, 0);
    let mut coords = template.coords.clone();
    for _ in 0..count {
        for d in 0..template.dim {
            let v = if hi[d] > lo[d] {
                rng.random_range(lo[d]..=hi[d])
            } else {
                lo[d]
            };
            coords.push(v);
        }
    }
    Ok(PointSet {
        dim: template.dim,
        coords,
    })
}

/// A linear map plus translation. Rotation is not required to be
/// orthogonal; decoded solutions are affine until projected.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    pub rotation: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl RigidTransform {
    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn from_rotation(rotation: DMatrix<f64>) -> Self {
        let d = rotation.nrows();
        Self {
            rotation,
            translation: DVector::zeros(d),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_rotation(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.rotation.nrows()
    }
}

/// `[[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn rotation_matrix_2d(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

pub fn rotation_2d(theta: f64) -> RigidTransform {
    RigidTransform::from_rotation(rotation_matrix_2d(theta))
}

/// Uniformly distributed rotation. 2D draws θ from `[0, 2π)`; 3D normalizes
/// a Gaussian quaternion.
pub fn random_rotation(dim: usize, seed: u64) -> Result<RigidTransform> {
    let mut rng = seeded_rng(seed, 0);
    match dim {
        2 => Ok(rotation_2d(rng.random_range(0.0..std::f64::consts::TAU))),
        3 => {
            let mut q = [0.0f64; 4];
            let mut norm = 0.0;
            while norm < 1e-12 {
                for v in q.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            let [w, x, y, z] = q.map(|v| v / norm);
            let r = DMatrix::from_row_slice(
                3,
                3,
                &[
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            );
            Ok(RigidTransform::from_rotation(r))
        }
        d => Err(Error::DimensionMismatch { expected: 3, got: d }),
    }
}
