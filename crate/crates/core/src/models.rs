//! Built-in spin-model generators.
//!
//! Coefficients are taken verbatim from the `j` and `h` arguments; no
//! implicit minus sign is applied.

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, PauliTerm};
use crate::pauli::{Pauli, PauliString};

fn bonds(n: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic {
        b.push((n - 1, 0));
    }
    b
}

fn two_site(n: usize, a: usize, b: usize, op: Pauli) -> PauliString {
    let mut p = PauliString::identity(n);
    p.set(a, op);
    p.set(b, op);
    p
}

fn one_site(n: usize, a: usize, op: Pauli) -> PauliString {
    let mut p = PauliString::identity(n);
    p.set(a, op);
    p
}

/// Transverse-field Ising model: `j` Z_i Z_{i+1} on every bond plus `h` X_i.
pub fn tfim(n: usize, j: f64, h: f64, periodic: bool) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    let couplings = bonds(n, periodic)
        .into_iter()
        .map(|(a, b)| PauliTerm::new(j, two_site(n, a, b, Pauli::Z)));
    let fields = (0..n).map(|q| PauliTerm::new(h, one_site(n, q, Pauli::X)));
    Hamiltonian::new(n, couplings.chain(fields).collect::<Vec<_>>())
}

/// Heisenberg XXX chain: `j` (XX + YY + ZZ) on every bond plus `h` Z_i.
pub fn heisenberg(n: usize, j: f64, h: f64, periodic: bool) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    let mut terms = Vec::new();
    for (a, b) in bonds(n, periodic) {
        for op in [Pauli::X, Pauli::Y, Pauli::Z] {
            terms.push(PauliTerm::new(j, two_site(n, a, b, op)));
        }
    }
    terms.extend((0..n).map(|q| PauliTerm::new(h, one_site(n, q, Pauli::Z))));
    Hamiltonian::new(n, terms)
}

/// Coefficient of the extra Z_0 term in [`imbalanced_tfim`].
pub const IMBALANCED_Z0: f64 = 10.0;
/// Transverse field of [`imbalanced_tfim`].
pub const IMBALANCED_FIELD: f64 = 1e-2;

/// Periodic TFIM with j = 1, h = 1e-2 and an extra 10·Z_0 term, so the
/// Z-type and X-type groups differ in weight by orders of magnitude.
pub fn imbalanced_tfim(n: usize) -> Result<Hamiltonian> {
    let base = tfim(n, 1.0, IMBALANCED_FIELD, true)?;
    let mut terms = base.terms().to_vec();
    terms.push(PauliTerm::new(IMBALANCED_Z0, one_site(n, 0, Pauli::Z)));
    Hamiltonian::new(n, terms)
}
