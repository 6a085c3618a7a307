//! Test-side oracles built straight from 2x2 matrices and Kronecker
//! products, sharing no code with the library's own dense helpers.
#![allow(dead_code)]

use kcommute::{CliffordCircuit, CliffordGate, Hamiltonian, Pauli, PauliString, PauliTerm};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn one_qubit(p: char) -> M {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let e = match p {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        'Z' => [o, z, z, -o],
        _ => panic!("bad pauli {p}"),
    };
    DMatrix::from_row_slice(2, 2, &e)
}

pub fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

/// Dense matrix of a Pauli string; the leftmost factor acts on qubit 0 (the
/// most significant bit).
pub fn pauli_dense(p: &PauliString) -> M {
    p.to_string().chars().map(one_qubit).reduce(|acc, m| kron(&acc, &m)).unwrap()
}

pub fn hamiltonian_dense(h: &Hamiltonian) -> M {
    let dim = 1 << h.num_qubits();
    h.terms()
        .iter()
        .fold(M::zeros(dim, dim), |acc, t| acc + pauli_dense(&t.pauli) * c(t.coeff, 0.0))
}

fn embed(n: usize, q: usize, g: &M) -> M {
    (0..n)
        .map(|i| if i == q { g.clone() } else { M::identity(2, 2) })
        .reduce(|acc, m| kron(&acc, &m))
        .unwrap()
}

/// Permutation matrix for CNOT on the computational basis.
fn cnot_dense(n: usize, control: usize, target: usize) -> M {
    let dim = 1 << n;
    let (cb, tb) = (1 << (n - 1 - control), 1 << (n - 1 - target));
    let mut m = M::zeros(dim, dim);
    for b in 0..dim {
        let out = if b & cb != 0 { b ^ tb } else { b };
        m[(out, b)] = c(1.0, 0.0);
    }
    m
}

pub fn gate_dense(n: usize, g: &CliffordGate) -> M {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match *g {
        CliffordGate::H(q) => embed(n, q, &DMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)])),
        CliffordGate::S(q) => embed(n, q, &DMatrix::from_row_slice(2, 2, &[o, z, z, c(0.0, 1.0)])),
        CliffordGate::Sdg(q) => embed(n, q, &DMatrix::from_row_slice(2, 2, &[o, z, z, c(0.0, -1.0)])),
        CliffordGate::X(q) => embed(n, q, &one_qubit('X')),
        CliffordGate::Cnot { control, target } => cnot_dense(n, control, target),
    }
}

/// U for a circuit whose gates apply left to right.
pub fn circuit_dense(circuit: &CliffordCircuit) -> M {
    let n = circuit.num_qubits();
    circuit
        .gates()
        .iter()
        .fold(M::identity(1 << n, 1 << n), |u, g| gate_dense(n, g) * u)
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_zero(a: &M, tol: f64) -> bool {
    a.iter().all(|z| z.norm() <= tol)
}

/// exp(A) by scaling and squaring a truncated Taylor series.
pub fn expm(a: &M) -> M {
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let s = (norm / 0.25).log2().ceil().max(0.0) as i32;
    let scaled = a * c(0.5f64.powi(s), 0.0);
    let dim = a.nrows();
    let mut term = M::identity(dim, dim);
    let mut sum = M::identity(dim, dim);
    for k in 1..=24 {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// exp(-iHt) as a dense matrix.
pub fn propagator(h: &Hamiltonian, t: f64) -> M {
    expm(&(hamiltonian_dense(h) * c(0.0, -t)))
}

/// Largest singular value.
pub fn op_norm(a: &M) -> f64 {
    a.clone().singular_values().max()
}

pub fn expectation(h: &M, psi: &[Complex64]) -> Complex64 {
    let v = DVector::from_column_slice(psi);
    (v.adjoint() * h * &v)[(0, 0)]
}

pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let ops = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, ops[rng.random_range(0..4)]);
    }
    p
}

pub fn random_nonidentity_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    loop {
        let p = random_pauli(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> CliffordGate {
    let q = rng.random_range(0..n);
    match rng.random_range(0..if n > 1 { 5 } else { 4 }) {
        0 => CliffordGate::H(q),
        1 => CliffordGate::S(q),
        2 => CliffordGate::Sdg(q),
        3 => CliffordGate::X(q),
        _ => {
            let mut t = rng.random_range(0..n - 1);
            if t >= q {
                t += 1;
            }
            CliffordGate::Cnot { control: q, target: t }
        }
    }
}

pub fn random_clifford<R: Rng>(rng: &mut R, n: usize, len: usize) -> CliffordCircuit {
    let gates = (0..len).map(|_| random_gate(rng, n)).collect();
    CliffordCircuit::from_gates(n, gates).unwrap()
}

/// Distinct non-identity strings that pairwise commute on every k-qubit
/// segment, built by pulling random diagonal strings back through a random
/// Clifford on each segment.
pub fn random_commuting_strings<R: Rng>(rng: &mut R, n: usize, k: usize, size: usize) -> Vec<PauliString> {
    let segs: Vec<(usize, usize)> = (0..n).step_by(k).map(|s| (s, (s + k).min(n))).collect();
    let unitaries: Vec<CliffordCircuit> = segs
        .iter()
        .map(|&(a, b)| random_clifford(rng, b - a, 3 * (b - a) + 2).inverse())
        .collect();
    let mut out: Vec<PauliString> = Vec::new();
    let mut attempts = 0;
    while out.len() < size && attempts < 50 * size {
        attempts += 1;
        let mut p = PauliString::identity(n);
        for (&(a, b), u) in segs.iter().zip(&unitaries) {
            let w = b - a;
            let mut d = PauliString::identity(w);
            for q in 0..w {
                if rng.random_bool(0.5) {
                    d.set(q, Pauli::Z);
                }
            }
            let img = kcommute::conjugate_circuit(&kcommute::SignedPauli::positive(d), u).unwrap();
            for q in 0..w {
                p.set(a + q, img.pauli.get(q));
            }
        }
        if !p.is_identity() && !out.contains(&p) {
            out.push(p);
        }
    }
    out.shuffle(rng);
    out
}

pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, terms: usize) -> Hamiltonian {
    loop {
        let t: Vec<PauliTerm> = (0..terms)
            .map(|_| PauliTerm::new(rng.random_range(-1.0..1.0), random_nonidentity_pauli(rng, n)))
            .collect();
        if let Ok(h) = Hamiltonian::new(n, t) {
            return h;
        }
    }
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> kcommute::StateVector {
    let mut amps: Vec<Complex64> = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    kcommute::StateVector::from_amplitudes(amps).unwrap()
}
