//! Dense statevector simulation.
//!
//! Amplitude index bits follow the crate-wide convention: qubit 0 is the most
//! significant bit, so basis state `|q0 q1 … q(n-1)>` reads left to right.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordCircuit, CliffordGate};
use crate::dense::{self, CMatrix, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::par::ExecPolicy;
use crate::pauli::Pauli;

/// Default cap on register size for dense amplitudes.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Amplitude count above which gate application fans out across threads.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
}

impl Gate {
    fn indices(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => ([q, q], 1),
            Gate::Cnot { control, target } => ([control, target], 2),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let (q, _) = self.indices();
        if let Some(&bad) = q.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        match *self {
            Gate::Cnot { control, target } if control == target => Err(Error::SameControlTarget(control)),
            Gate::Rx(_, t) | Gate::Ry(_, t) | Gate::Rz(_, t) if !t.is_finite() => Err(Error::InvalidAngle),
            _ => Ok(()),
        }
    }

    /// 2x2 matrix of a single-qubit gate as `[a, b, c, d]` (row-major).
    fn matrix(&self) -> Option<[Complex64; 4]> {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Some(match *self {
            Gate::H(_) => [r, r, r, -r],
            Gate::S(_) => [one, z, z, i],
            Gate::Sdg(_) => [one, z, z, -i],
            Gate::X(_) => [z, one, one, z],
            Gate::Rx(_, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                [c.into(), -i * s, -i * s, c.into()]
            }
            Gate::Ry(_, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                [c.into(), (-s).into(), s.into(), c.into()]
            }
            Gate::Rz(_, t) => [Complex64::from_polar(1.0, -t / 2.0), z, z, Complex64::from_polar(1.0, t / 2.0)],
            Gate::Cnot { .. } => return None,
        })
    }
}

impl From<CliffordGate> for Gate {
    fn from(g: CliffordGate) -> Self {
        match g {
            CliffordGate::H(q) => Gate::H(q),
            CliffordGate::S(q) => Gate::S(q),
            CliffordGate::Sdg(q) => Gate::Sdg(q),
            CliffordGate::X(q) => Gate::X(q),
            CliffordGate::Cnot { control, target } => Gate::Cnot { control, target },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Rx(q, t) => write!(f, "RX {q} {t}"),
            Gate::Ry(q, t) => write!(f, "RY {q} {t}"),
            Gate::Rz(q, t) => write!(f, "RZ {q} {t}"),
        }
    }
}

/// Gate list plus a global phase angle (applied as e^{i·phase}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn extend_clifford(&mut self, other: &CliffordCircuit) -> Result<()> {
        if other.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.num_qubits(),
            });
        }
        self.gates.extend(other.gates().iter().map(|&g| Gate::from(g)));
        Ok(())
    }

    pub fn count_rotations(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..)))
            .count()
    }

    pub fn count_cnots(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// Debug text: one gate per line, rotation angle last in radians.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Dense unitary (reference path, n <= 12).
    pub fn unitary(&self) -> Result<CMatrix> {
        let n = self.n;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let mut u = CMatrix::identity(1 << n, 1 << n) * Complex64::from_polar(1.0, self.global_phase);
        for g in &self.gates {
            let m = match *g {
                Gate::Cnot { control, target } => dense::cnot(n, control, target),
                Gate::H(q) => dense::embed_1q(n, q, &dense::hadamard()),
                Gate::S(q) => dense::embed_1q(n, q, &dense::phase_s()),
                Gate::Sdg(q) => dense::embed_1q(n, q, &dense::phase_sdg()),
                Gate::X(q) => dense::embed_1q(n, q, &dense::pauli_1q(Pauli::X)),
                Gate::Rx(q, t) => dense::embed_1q(n, q, &dense::rx(t)),
                Gate::Ry(q, t) => dense::embed_1q(n, q, &dense::ry(t)),
                Gate::Rz(q, t) => dense::embed_1q(n, q, &dense::rz(t)),
            };
            u = m * u;
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0> on n qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_limit(n, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_limit(n: usize, limit: usize) -> Result<Self> {
        if n > limit {
            return Err(Error::TooLarge { n, limit });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two(),
                found: len,
            });
        }
        Ok(StateVector {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn apply_1q(&mut self, q: usize, m: [Complex64; 4], policy: ExecPolicy) {
        let stride = 1usize << (self.n - 1 - q);
        let kernel = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0] * x + m[1] * y;
                *b = m[2] * x + m[3] * y;
            }
        };
        #[cfg(feature = "parallel")]
        if policy.is_parallel() && self.amps.len() >= PARALLEL_THRESHOLD {
            use rayon::prelude::*;
            if stride >= 1024 {
                // few large blocks: split the pair loop instead
                self.amps.par_chunks_mut(2 * stride).for_each(|chunk| {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| {
                        let (x, y) = (*a, *b);
                        *a = m[0] * x + m[1] * y;
                        *b = m[2] * x + m[3] * y;
                    });
                });
            } else {
                self.amps.par_chunks_mut(2 * stride).for_each(kernel);
            }
            return;
        }
        let _ = policy;
        self.amps.chunks_mut(2 * stride).for_each(kernel);
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << (self.n - 1 - control);
        let tbit = 1usize << (self.n - 1 - target);
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, g: &Gate, policy: ExecPolicy) -> Result<()> {
        g.validate(self.n)?;
        match *g {
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => {
                self.apply_1q(q, g.matrix().expect("single-qubit gate"), policy)
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit, policy: ExecPolicy) -> Result<()> {
        if c.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.n,
            });
        }
        for g in &c.gates {
            self.apply_gate(g, policy)?;
        }
        if c.global_phase != 0.0 {
            let ph = Complex64::from_polar(1.0, c.global_phase);
            self.amps.iter_mut().for_each(|a| *a *= ph);
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, c: &CliffordCircuit) -> Result<()> {
        if c.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.num_qubits(),
            });
        }
        for g in c.gates() {
            self.apply_gate(&Gate::from(*g), ExecPolicy::Sequential)?;
        }
        Ok(())
    }
}

/// Returns `circuit` applied to `state`.
pub fn apply(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_circuit(circuit, ExecPolicy::default())?;
    Ok(out)
}

/// Basis outcome (as an index) → probability, dropping entries below 1e-15.
pub fn exact_distribution(state: &StateVector) -> BTreeMap<usize, f64> {
    state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.norm_sqr()))
        .filter(|&(_, p)| p >= 1e-15)
        .collect()
}

/// Renders a basis index as a bitstring with qubit 0 first.
pub fn outcome_label(index: usize, n: usize) -> String {
    (0..n).map(|q| if (index >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

/// Multinomial draw of `shots` outcomes from |amplitude|^2, realised as a
/// chain of conditional binomials over basis states in index order.
pub fn sample<R: Rng + ?Sized>(state: &StateVector, shots: u64, rng: &mut R) -> Result<SampleCounts> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    let probs = state.probabilities();
    let mut remaining_mass: f64 = probs.iter().sum();
    let mut remaining = shots;
    let mut counts = BTreeMap::new();
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let c = if i == last || remaining_mass <= p {
            remaining
        } else {
            let cond = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, cond).expect("probability in [0, 1]").sample(rng)
        };
        if c > 0 {
            counts.insert(i, c);
        }
        remaining -= c;
        remaining_mass -= p;
    }
    Ok(SampleCounts { shots, counts })
}

/// X on every odd qubit: |0101…>.
pub fn build_neel(n: usize) -> Circuit {
    let gates = (1..n).step_by(2).map(Gate::X).collect();
    Circuit {
        n,
        gates,
        global_phase: 0.0,
    }
}

/// Hardware-efficient ansatz: `layers` × (RY, RZ on every qubit, then CNOT
/// chain 0→1→…) followed by a final RY/RZ layer. Angles are uniform in
/// [0, 2π) from a ChaCha8 stream seeded with `seed`.
pub fn build_random_ansatz(n: usize, layers: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::with_capacity((layers + 1) * 2 * n + layers * n.saturating_sub(1));
    let mut rotations = |gates: &mut Vec<Gate>| {
        for q in 0..n {
            gates.push(Gate::Ry(q, rng.random_range(0.0..TAU)));
            gates.push(Gate::Rz(q, rng.random_range(0.0..TAU)));
        }
    };
    for _ in 0..layers {
        rotations(&mut gates);
        for q in 0..n.saturating_sub(1) {
            gates.push(Gate::Cnot { control: q, target: q + 1 });
        }
    }
    rotations(&mut gates);
    Circuit {
        n,
        gates,
        global_phase: 0.0,
    }
}

/// First-order product formula: `steps` repetitions of exp(-i (t/steps) c P)
/// over the terms in `order` (Hamiltonian order when `None`).
///
/// Each exponential maps X/Y factors to Z (H, or S† then H), gathers the
/// parity onto the highest support qubit with a CNOT chain, applies
/// RZ(2 c t / steps) there and undoes the chain and basis change. Identity
/// terms only shift the global phase.
pub fn build_trotter(h: &Hamiltonian, t: f64, steps: usize, order: Option<&[usize]>) -> Result<Circuit> {
    if steps == 0 {
        return Err(Error::InvalidSteps);
    }
    let len = h.len();
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut seen = vec![false; len];
            if o.len() != len || o.iter().any(|&i| i >= len || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidPermutation(len));
            }
            o.to_vec()
        }
        None => (0..len).collect(),
    };
    let n = h.num_qubits();
    let dt = t / steps as f64;
    let mut c = Circuit::new(n);
    for _ in 0..steps {
        for &i in &order {
            let term = &h.terms()[i];
            let support = term.pauli.support();
            let Some(&top) = support.last() else {
                c.global_phase -= term.coeff * dt;
                continue;
            };
            let mut basis = Vec::new();
            let mut unbasis = Vec::new();
            for &q in &support {
                match term.pauli.get(q) {
                    Pauli::X => {
                        basis.push(Gate::H(q));
                        unbasis.push(Gate::H(q));
                    }
                    Pauli::Y => {
                        basis.extend([Gate::Sdg(q), Gate::H(q)]);
                        unbasis.extend([Gate::H(q), Gate::S(q)]);
                    }
                    _ => {}
                }
            }
            let ladder: Vec<Gate> = support
                .windows(2)
                .map(|w| Gate::Cnot {
                    control: w[0],
                    target: w[1],
                })
                .collect();
            c.gates.extend(basis);
            c.gates.extend(ladder.iter().copied());
            c.gates.push(Gate::Rz(top, 2.0 * term.coeff * dt));
            c.gates.extend(ladder.iter().rev().copied());
            c.gates.extend(unbasis);
        }
    }
    Ok(c)
}
