//! Dense complex matrices built from Kronecker products.
//!
//! Used as the reference path for conjugation, Trotter circuits and exact
//! evolution. Qubit 0 is the leftmost Kronecker factor, i.e. the most
//! significant bit of the basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{Pauli, PauliString};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest register for which full unitaries are built.
pub const MAX_DENSE_QUBITS: usize = 12;

pub fn mat2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

pub fn pauli_1q(p: Pauli) -> CMatrix {
    match p {
        Pauli::I => mat2(ONE, ZERO, ZERO, ONE),
        Pauli::X => mat2(ZERO, ONE, ONE, ZERO),
        Pauli::Y => mat2(ZERO, -I, I, ZERO),
        Pauli::Z => mat2(ONE, ZERO, ZERO, -ONE),
    }
}

pub fn hadamard() -> CMatrix {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    mat2(r, r, r, -r)
}

pub fn phase_s() -> CMatrix {
    mat2(ONE, ZERO, ZERO, I)
}

pub fn phase_sdg() -> CMatrix {
    mat2(ONE, ZERO, ZERO, -I)
}

pub fn rx(theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    mat2(c.into(), -I * s, -I * s, c.into())
}

pub fn ry(theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    mat2(c.into(), (-s).into(), s.into(), c.into())
}

pub fn rz(theta: f64) -> CMatrix {
    mat2(
        Complex64::from_polar(1.0, -theta / 2.0),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

pub fn kron_list(factors: &[CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// `gate` on qubit `q` of an n-qubit register, identity elsewhere.
pub fn embed_1q(n: usize, q: usize, gate: &CMatrix) -> CMatrix {
    let factors: Vec<CMatrix> = (0..n).map(|i| if i == q { gate.clone() } else { pauli_1q(Pauli::I) }).collect();
    kron_list(&factors)
}

/// |0><0|_c ⊗ 1 + |1><1|_c ⊗ X_t.
pub fn cnot(n: usize, control: usize, target: usize) -> CMatrix {
    let p0 = mat2(ONE, ZERO, ZERO, ZERO);
    let p1 = mat2(ZERO, ZERO, ZERO, ONE);
    let branch = |proj: &CMatrix, flip: bool| {
        let factors: Vec<CMatrix> = (0..n)
            .map(|i| {
                if i == control {
                    proj.clone()
                } else if i == target && flip {
                    pauli_1q(Pauli::X)
                } else {
                    pauli_1q(Pauli::I)
                }
            })
            .collect();
        kron_list(&factors)
    };
    branch(&p0, false) + branch(&p1, true)
}

pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let factors: Vec<CMatrix> = (0..p.num_qubits()).map(|q| pauli_1q(p.get(q))).collect();
    kron_list(&factors)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// A Hamiltonian (or any operator) as a full 2^n x 2^n matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n: usize,
    pub matrix: CMatrix,
}

impl DenseOperator {
    pub fn from_hamiltonian(h: &Hamiltonian) -> Result<Self> {
        let n = h.num_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut matrix = CMatrix::zeros(dim, dim);
        for t in h.terms() {
            matrix += pauli_matrix(&t.pauli) * Complex64::new(t.coeff, 0.0);
        }
        Ok(DenseOperator { n, matrix })
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// <psi|M|psi>.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let v = nalgebra::DVector::from_column_slice(psi);
        (v.adjoint() * &self.matrix * &v)[(0, 0)]
    }
}
