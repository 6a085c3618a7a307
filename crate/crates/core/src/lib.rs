//! Observable estimation for Hamiltonian simulation.
//!
//! The pipeline groups the Pauli terms of H = sum_i c_i P_i into k-commuting
//! sets by sorted insertion, synthesizes a segment-local Clifford circuit
//! that diagonalizes each set, splits a shot budget across the resulting
//! measurement circuits, and aggregates parity-weighted counts into an
//! estimate of <H>. A dense statevector simulator and an exact oracle
//! provide the reference values.

pub mod clifford;
pub mod dense;
pub mod diagonalize;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod grouping;
pub mod hamiltonian;
pub mod models;
pub mod oracle;
pub mod par;
pub mod pauli;
pub mod shots;
pub mod sim;

pub use clifford::{conjugate_circuit, conjugate_gate, CliffordCircuit, CliffordGate, SignedPauli};
pub use diagonalize::{diagonalize_group, DiagonalizedGroup};
pub use error::{Error, Result};
pub use estimator::{estimate, repeated_error, EstimationConfig, EstimationMode, EstimationReport};
pub use experiment::{
    run_experiment, write_outputs, ExperimentConfig, ExperimentKind, HamiltonianSource, MetricsRecord, ModelKind, Summary,
};
pub use grouping::{sorted_insertion_grouping, CommutingGroup, GroupingResult};
pub use hamiltonian::{parse_hamiltonian, Hamiltonian, PauliTerm};
pub use oracle::{exact_evolve, exact_expectation};
pub use par::ExecPolicy;
pub use pauli::{parse_pauli, Pauli, PauliString};
pub use shots::{allocate, bin_plan, group_statistic, shots_for_precision, ShotPlan, WeightingScheme};
pub use sim::{Circuit, Gate, StateVector};
