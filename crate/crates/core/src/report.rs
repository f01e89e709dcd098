//! Machine-readable outputs: CSV tables and JSON documents.
//!
//! Floats are written with 17 significant digits so that every value
//! round-trips exactly.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::basis::RotationBasis;
use crate::error::{Error, Result};
use crate::geometry::RigidTransform;
use crate::qubo::QuboProblem;
use crate::samplers::{bits_to_hex, EnergySpectrum, Solution, Trace};
use crate::unembed::Projection;

/// Serialize a matrix as a list of rows.
pub fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

fn serialize_vector<S: Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a header and rows as CSV.
pub fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write text to `path`, creating parent directories.
pub fn write_text(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Row/column labels of `P`: the clamped variable followed by the basis.
pub fn p_labels(basis: &RotationBasis) -> Vec<String> {
    std::iter::once("clamp".to_string())
        .chain(basis.elements().iter().map(|e| e.label()))
        .collect()
}

/// Dense `P` with a label column and a label header.
pub fn p_dense_csv(p: &QuboProblem, labels: &[String]) -> Result<String> {
    let m = p.matrix();
    let mut header = vec!["label"];
    header.extend(labels.iter().map(String::as_str));
    csv_string(
        &header,
        (0..m.nrows()).map(|i| {
            std::iter::once(labels[i].clone())
                .chain(m.row(i).iter().map(|&v| fmt_f64(v)))
                .collect::<Vec<_>>()
        }),
    )
}

/// Upper-triangular coordinate list `i j value` (zero-based, diagonal
/// included, exact zeros skipped).
pub fn p_coo_text(p: &QuboProblem) -> String {
    let m = p.matrix();
    let mut out = String::from("# i j value\n");
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if m[(i, j)] != 0.0 {
                out.push_str(&format!("{i} {j} {}\n", fmt_f64(m[(i, j)])));
            }
        }
    }
    out
}

/// Metadata written next to an exported `P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildSidecar {
    pub dim: usize,
    pub basis_size: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub link_degree: usize,
    pub clamped_bit: usize,
}

/// Sampler trace as `step, energy, bitstring` with hex bitstrings.
pub fn trace_csv(trace: &Trace) -> Result<String> {
    csv_string(
        &["step", "energy", "bitstring"],
        trace
            .events
            .iter()
            .map(|e| vec![e.step.to_string(), fmt_f64(e.energy), bits_to_hex(&e.bits)]),
    )
}

/// The lowest `levels` levels of a spectrum. Representatives include the
/// clamped bit.
pub fn spectrum_csv(spectrum: &EnergySpectrum, levels: usize) -> Result<String> {
    csv_string(
        &["energy", "multiplicity", "bitstring"],
        spectrum.levels.iter().enumerate().take(levels).map(|(i, l)| {
            let mut bits = vec![true];
            bits.extend(spectrum.representative_bits(i));
            vec![fmt_f64(l.energy), l.multiplicity.to_string(), bits_to_hex(&bits)]
        }),
    )
}

/// Decoded solution as emitted by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(rename = "R_affine", serialize_with = "serialize_matrix")]
    pub r_affine: DMatrix<f64>,
    #[serde(rename = "R_projected", serialize_with = "serialize_matrix")]
    pub r_projected: DMatrix<f64>,
    #[serde(serialize_with = "serialize_vector")]
    pub t: DVector<f64>,
    pub degenerate: bool,
    pub energy: f64,
    pub bitstring: String,
}

impl SolveReport {
    pub fn new(solution: &Solution, transform: &RigidTransform, projection: &Projection) -> Self {
        Self {
            r_affine: transform.rotation.clone(),
            r_projected: projection.rotation.clone(),
            t: transform.translation.clone(),
            degenerate: projection.degenerate,
            energy: solution.energy,
            bitstring: solution.hex(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis_2d;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .count();
            assert_eq!(digits, 17);
        }
    }

    #[test]
    fn dense_and_coo_exports() {
        let p = QuboProblem::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]), 2).unwrap();
        let labels = vec!["clamp".to_string(), "a".to_string()];
        let csv = p_dense_csv(&p, &labels).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,clamp,a");
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.split(',').count() == 3));
        let coo = p_coo_text(&p);
        assert_eq!(coo.lines().count(), 3);
        assert!(coo.contains("0 1 5.0000000000000000e-1"));
    }

    #[test]
    fn labels_follow_basis_order() {
        let labels = p_labels(&build_basis_2d());
        assert_eq!(labels.len(), 21);
        assert_eq!(labels[0], "clamp");
        assert_eq!(labels[1], "+0.5I");
    }

    #[test]
    fn sidecar_keys() {
        let s = BuildSidecar {
            dim: 2,
            basis_size: 20,
            n: 91,
            m: 91,
            link_degree: 1,
            clamped_bit: 0,
        };
        let v = serde_json::to_value(&s).unwrap();
        for key in ["dim", "basisSize", "N", "M", "linkDegree", "clampedBit"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
