//! Clifford gates and exact conjugation of signed Pauli strings.
//!
//! Conjugation follows the symplectic update rules: a gate U maps P to
//! U P U†, tracked as a ±1 sign plus the new Pauli string. Hermitian Paulis
//! never pick up a factor of ±i under Clifford conjugation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    /// Qubits the gate acts on.
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::Sdg(q) | CliffordGate::X(q) => ([q, q], 1),
            CliffordGate::Cnot { control, target } => ([control, target], 2),
        }
    }

    pub fn max_qubit(&self) -> usize {
        let (q, _) = self.qubits();
        q[0].max(q[1])
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    /// Same gate with every qubit index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> CliffordGate {
        match *self {
            CliffordGate::H(q) => CliffordGate::H(q + offset),
            CliffordGate::S(q) => CliffordGate::S(q + offset),
            CliffordGate::Sdg(q) => CliffordGate::Sdg(q + offset),
            CliffordGate::X(q) => CliffordGate::X(q + offset),
            CliffordGate::Cnot { control, target } => CliffordGate::Cnot {
                control: control + offset,
                target: target + offset,
            },
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let (q, _) = self.qubits();
        for &i in &q {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        if let CliffordGate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::SameControlTarget(control));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CliffordGate::H(q) => write!(f, "H {q}"),
            CliffordGate::S(q) => write!(f, "S {q}"),
            CliffordGate::Sdg(q) => write!(f, "SDG {q}"),
            CliffordGate::X(q) => write!(f, "X {q}"),
            CliffordGate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

impl FromStr for CliffordGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SyntaxError {
            line: 0,
            message: format!("invalid gate {s:?}"),
        };
        let fields: Vec<&str> = s.split_whitespace().collect();
        let idx = |i: usize| -> Result<usize> { fields.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let gate = match (fields.first().copied(), fields.len()) {
            (Some("H"), 2) => CliffordGate::H(idx(1)?),
            (Some("S"), 2) => CliffordGate::S(idx(1)?),
            (Some("SDG"), 2) => CliffordGate::Sdg(idx(1)?),
            (Some("X"), 2) => CliffordGate::X(idx(1)?),
            (Some("CNOT"), 3) => CliffordGate::Cnot {
                control: idx(1)?,
                target: idx(2)?,
            },
            _ => return Err(bad()),
        };
        Ok(gate)
    }
}

/// Ordered gate list; gates apply to the state left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(n: usize) -> Self {
        CliffordCircuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(CliffordCircuit { n, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`'s gates shifted onto qubits `offset..offset + other.n`.
    pub fn append_shifted(&mut self, other: &CliffordCircuit, offset: usize) -> Result<()> {
        if offset + other.n > self.n {
            return Err(Error::IndexOutOfRange {
                index: offset + other.n - 1,
                n: self.n,
            });
        }
        self.gates.extend(other.gates.iter().map(|g| g.shifted(offset)));
        Ok(())
    }

    /// Reversed gate order with S and S† swapped.
    pub fn inverse(&self) -> CliffordCircuit {
        CliffordCircuit {
            n: self.n,
            gates: self.gates.iter().rev().map(CliffordGate::inverse).collect(),
        }
    }

    /// Depth with gates greedily packed into layers of disjoint qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            let (q, arity) = g.qubits();
            let qs = &q[..arity];
            let layer = qs.iter().map(|&i| level[i]).max().unwrap_or(0) + 1;
            for &i in qs {
                level[i] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// One gate per line, e.g. `H 3` or `CNOT 0 4`.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let g: CliffordGate = line.parse().map_err(|_| Error::SyntaxError {
                line: i + 1,
                message: format!("invalid gate {line:?}"),
            })?;
            gates.push(g);
        }
        CliffordCircuit::from_gates(n, gates)
    }
}

/// A Pauli string with a ±1 sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: PauliString,
}

impl SignedPauli {
    pub fn positive(pauli: PauliString) -> Self {
        SignedPauli { negative: false, pauli }
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.pauli)
    }
}

/// In-place U P U† for a single gate. Indices must already be validated.
pub(crate) fn conjugate_gate_in_place(p: &mut SignedPauli, gate: &CliffordGate) {
    let pauli = &mut p.pauli;
    match *gate {
        CliffordGate::H(q) => {
            let (x, z) = (pauli.x(q), pauli.z(q));
            p.negative ^= x & z;
            pauli.set_bits(q, z, x);
        }
        CliffordGate::S(q) => {
            let (x, z) = (pauli.x(q), pauli.z(q));
            p.negative ^= x & z;
            pauli.set_bits(q, x, z ^ x);
        }
        CliffordGate::Sdg(q) => {
            let (x, z) = (pauli.x(q), pauli.z(q));
            p.negative ^= x & !z;
            pauli.set_bits(q, x, z ^ x);
        }
        CliffordGate::X(q) => {
            p.negative ^= pauli.z(q);
        }
        CliffordGate::Cnot { control, target } => {
            let (xc, zc) = (pauli.x(control), pauli.z(control));
            let (xt, zt) = (pauli.x(target), pauli.z(target));
            p.negative ^= xc & zt & !(xt ^ zc);
            pauli.set_bits(control, xc, zc ^ zt);
            pauli.set_bits(target, xt ^ xc, zt);
        }
    }
}

/// U P U† for one gate.
pub fn conjugate_gate(p: &SignedPauli, gate: &CliffordGate) -> Result<SignedPauli> {
    gate.validate(p.pauli.num_qubits())?;
    let mut out = p.clone();
    conjugate_gate_in_place(&mut out, gate);
    Ok(out)
}

/// U P U† where U is the whole circuit (first gate applied first).
pub fn conjugate_circuit(p: &SignedPauli, circuit: &CliffordCircuit) -> Result<SignedPauli> {
    if circuit.n != p.pauli.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n,
            found: p.pauli.num_qubits(),
        });
    }
    let mut out = p.clone();
    for g in &circuit.gates {
        conjugate_gate_in_place(&mut out, g);
    }
    Ok(out)
}

/// Full unitary of a Clifford circuit as a dense matrix (reference path).
pub fn circuit_unitary(circuit: &CliffordCircuit) -> Result<CMatrix> {
    let n = circuit.n;
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let mut u = CMatrix::identity(1 << n, 1 << n);
    for g in &circuit.gates {
        let m = match *g {
            CliffordGate::H(q) => dense::embed_1q(n, q, &dense::hadamard()),
            CliffordGate::S(q) => dense::embed_1q(n, q, &dense::phase_s()),
            CliffordGate::Sdg(q) => dense::embed_1q(n, q, &dense::phase_sdg()),
            CliffordGate::X(q) => dense::embed_1q(n, q, &dense::pauli_1q(Pauli::X)),
            CliffordGate::Cnot { control, target } => dense::cnot(n, control, target),
        };
        u = m * u;
    }
    Ok(u)
}
