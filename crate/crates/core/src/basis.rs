//! Additive bases for 2D and 3D linear maps.
//!
//! A rotation `exp(θM)` is `cos θ·I + sin θ·M` in 2D and
//! `I + sin θ·M + (1 − cos θ)·M²` in 3D. Each basis element is a weighted
//! signed copy of one of the generators appearing in those expansions, so
//! that a bit-selected sum of elements approximates the rotation.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Weights shared by both bases. The repeated `0.1` is intentional; the
/// largest reachable multiple of a generator is `0.95`.
pub const WEIGHTS: [f64; 5] = [0.5, 0.2, 0.1, 0.1, 0.05];

/// Unsigned generator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    /// Identity.
    I,
    /// 2D quarter turn `[[0, −1], [1, 0]]`.
    M,
    /// 3D skew generators.
    Ma,
    Mb,
    Mc,
    /// 3D symmetric hollow generators spanning the off-diagonal of `M²`.
    Md,
    Me,
    Mf,
    /// `diag(1, 1, 0)`; used negated for the diagonal of `M²`.
    Dxy,
    /// `diag(0, 1, 1)`; used negated for the diagonal of `M²`.
    Dyz,
}

/// Structural family of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    Identity,
    Skew,
    SymmetricHollow,
    Diagonal,
}

impl Generator {
    pub fn family(self) -> Family {
        match self {
            Generator::I => Family::Identity,
            Generator::M | Generator::Ma | Generator::Mb | Generator::Mc => Family::Skew,
            Generator::Md | Generator::Me | Generator::Mf => Family::SymmetricHollow,
            Generator::Dxy | Generator::Dyz => Family::Diagonal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::I => "I",
            Generator::M => "M",
            Generator::Ma => "Ma",
            Generator::Mb => "Mb",
            Generator::Mc => "Mc",
            Generator::Md => "Md",
            Generator::Me => "Me",
            Generator::Mf => "Mf",
            Generator::Dxy => "Dxy",
            Generator::Dyz => "Dyz",
        }
    }

    /// The generator as a `dim × dim` matrix.
    pub fn matrix(self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        match self {
            Generator::I => m.fill_with_identity(),
            Generator::M => {
                m[(0, 1)] = -1.0;
                m[(1, 0)] = 1.0;
            }
            Generator::Ma => {
                m[(0, 1)] = 1.0;
                m[(1, 0)] = -1.0;
            }
            Generator::Mb => {
                m[(0, 2)] = 1.0;
                m[(2, 0)] = -1.0;
            }
            Generator::Mc => {
                m[(1, 2)] = 1.0;
                m[(2, 1)] = -1.0;
            }
            Generator::Md => {
                m[(0, 1)] = 1.0;
                m[(1, 0)] = 1.0;
            }
            Generator::Me => {
                m[(0, 2)] = 1.0;
                m[(2, 0)] = 1.0;
            }
            Generator::Mf => {
                m[(1, 2)] = 1.0;
                m[(2, 1)] = 1.0;
            }
            Generator::Dxy => {
                m[(0, 0)] = 1.0;
                m[(1, 1)] = 1.0;
            }
            Generator::Dyz => {
                m[(1, 1)] = 1.0;
                m[(2, 2)] = 1.0;
            }
        }
        m
    }
}

/// A signed generator, `sign ∈ {+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedGenerator {
    pub generator: Generator,
    pub negated: bool,
}

impl SignedGenerator {
    const fn pos(generator: Generator) -> Self {
        Self {
            generator,
            negated: false,
        }
    }

    const fn neg(generator: Generator) -> Self {
        Self {
            generator,
            negated: true,
        }
    }

    pub fn sign(self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }

    pub fn label(self) -> String {
        format!("{}{}", if self.negated { "-" } else { "+" }, self.generator.name())
    }
}

/// Generator order for the 2D basis.
pub const GENERATORS_2D: [SignedGenerator; 4] = [
    SignedGenerator::pos(Generator::I),
    SignedGenerator::pos(Generator::M),
    SignedGenerator::neg(Generator::I),
    SignedGenerator::neg(Generator::M),
];

/// Generator order for the 3D basis: the fourteen signed I/skew/symmetric
/// generators followed by the two negated diagonal generators.
pub const GENERATORS_3D: [SignedGenerator; 16] = [
    SignedGenerator::pos(Generator::I),
    SignedGenerator::neg(Generator::I),
    SignedGenerator::pos(Generator::Ma),
    SignedGenerator::neg(Generator::Ma),
    SignedGenerator::pos(Generator::Mb),
    SignedGenerator::neg(Generator::Mb),
    SignedGenerator::pos(Generator::Mc),
    SignedGenerator::neg(Generator::Mc),
    SignedGenerator::pos(Generator::Md),
    SignedGenerator::neg(Generator::Md),
    SignedGenerator::pos(Generator::Me),
    SignedGenerator::neg(Generator::Me),
    SignedGenerator::pos(Generator::Mf),
    SignedGenerator::neg(Generator::Mf),
    SignedGenerator::neg(Generator::Dxy),
    SignedGenerator::neg(Generator::Dyz),
];

/// One weighted basis matrix `Q_k = ω·C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisElement {
    pub weight: f64,
    pub generator: SignedGenerator,
    #[serde(serialize_with = "crate::report::serialize_matrix")]
    pub matrix: DMatrix<f64>,
}

impl BasisElement {
    pub fn family(&self) -> Family {
        self.generator.generator.family()
    }

    /// Human-readable label such as `+0.5I` or `-0.05Ma`.
    pub fn label(&self) -> String {
        let sign = if self.generator.negated { "-" } else { "+" };
        format!("{sign}{}{}", self.weight, self.generator.generator.name())
    }
}

/// Ordered additive basis. Weights form the outer loop, generators the inner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationBasis {
    dim: usize,
    elements: Vec<BasisElement>,
}

impl RotationBasis {
    pub fn for_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(build_basis_2d()),
            3 => Ok(build_basis_3d()),
            d => Err(Error::DimensionMismatch { expected: 2, got: d }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements `B`; the QUBO has `B + 1` variables.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &BasisElement {
        &self.elements[k]
    }

    /// `Σ_k bits[k]·Q_k`.
    pub fn assemble(&self, bits: &[bool]) -> Result<DMatrix<f64>> {
        if bits.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: bits.len(),
            });
        }
        let mut r = DMatrix::zeros(self.dim, self.dim);
        for (e, _) in self.elements.iter().zip(bits).filter(|(_, &b)| b) {
            r += &e.matrix;
        }
        Ok(r)
    }
}

fn build(dim: usize, generators: &[SignedGenerator]) -> RotationBasis {
    let mut elements = Vec::with_capacity(WEIGHTS.len() * generators.len());
    for &weight in &WEIGHTS {
        for &g in generators {
            elements.push(BasisElement {
                weight,
                generator: g,
                matrix: g.generator.matrix(dim) * (weight * g.sign()),
            });
        }
    }
    RotationBasis { dim, elements }
}

/// The 20-element 2D basis over `{I, M, −I, −M}`.
pub fn build_basis_2d() -> RotationBasis {
    build(2, &GENERATORS_2D)
}

/// The 80-element 3D basis over [`GENERATORS_3D`].
pub fn build_basis_3d() -> RotationBasis {
    build(3, &GENERATORS_3D)
}
