//! Exact reference values: Pauli-wise expectations and dense time evolution.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::par::{self, ExecPolicy};
use crate::pauli::PauliString;
use crate::sim::StateVector;

/// Largest register for Pauli-wise expectation values.
pub const MAX_EXPECTATION_QUBITS: usize = 20;
/// Largest register for dense eigendecomposition.
pub const MAX_EVOLUTION_QUBITS: usize = 10;

/// <psi|P|psi> by applying P directly to the amplitudes.
///
/// P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>.
pub fn pauli_expectation(p: &PauliString, psi: &[Complex64]) -> Complex64 {
    let x = p.basis_x_mask() as usize;
    let z = p.basis_z_mask() as usize;
    let phase = match p.y_count() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let sum: Complex64 = psi
        .iter()
        .enumerate()
        .map(|(b, &amp)| {
            let v = psi[b ^ x].conj() * amp;
            if (b & z).count_ones() % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .sum();
    phase * sum
}

fn check_dims(h: &Hamiltonian, state: &StateVector) -> Result<()> {
    if h.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.num_qubits(),
            found: state.num_qubits(),
        });
    }
    Ok(())
}

/// sum_i c_i Re<psi|P_i|psi>.
pub fn exact_expectation(h: &Hamiltonian, state: &StateVector) -> Result<f64> {
    exact_expectation_with(h, state, ExecPolicy::Sequential)
}

pub fn exact_expectation_with(h: &Hamiltonian, state: &StateVector, policy: ExecPolicy) -> Result<f64> {
    check_dims(h, state)?;
    let n = h.num_qubits();
    if n > MAX_EXPECTATION_QUBITS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_EXPECTATION_QUBITS,
        });
    }
    let psi = state.amplitudes();
    let parts = par::map_slice(policy, h.terms(), |t| {
        let e = pauli_expectation(&t.pauli, psi);
        assert!(e.im.abs() <= 1e-9, "Pauli expectation has imaginary part {}", e.im);
        t.coeff * e.re
    });
    Ok(parts.into_iter().sum())
}

/// exp(-iHt)|psi> via the spectral decomposition of the dense Hamiltonian.
pub fn exact_evolve(h: &Hamiltonian, state: &StateVector, t: f64) -> Result<StateVector> {
    check_dims(h, state)?;
    let n = h.num_qubits();
    if n > MAX_EVOLUTION_QUBITS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_EVOLUTION_QUBITS,
        });
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let op = DenseOperator::from_hamiltonian(h)?;
    let eig = op.matrix.symmetric_eigen();
    let v = &eig.eigenvectors;
    let psi = DVector::from_column_slice(state.amplitudes());
    let mut coords = v.adjoint() * psi;
    for (c, &lambda) in coords.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= Complex64::from_polar(1.0, -lambda * t);
    }
    let out = v * coords;
    let evolved = StateVector::from_amplitudes(out.iter().copied().collect())?;
    let drift = (evolved.norm_sqr() - state.norm_sqr()).abs();
    assert!(drift <= 1e-9, "exact evolution changed the norm by {drift}");
    Ok(evolved)
}
