mod common;

use common::*;
use kcommute::diagonalize::{diagonalizing_circuit, segments, Synthesis};
use kcommute::oracle::pauli_expectation;
use kcommute::{conjugate_circuit, diagonalize_group, CliffordCircuit, CommutingGroup, Hamiltonian, PauliString, PauliTerm, SignedPauli};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

/// Hamiltonian made of the given strings (random coefficients) with one
/// group holding all of them.
fn as_group(seed: u64, strings: Vec<PauliString>, k: usize) -> (Hamiltonian, CommutingGroup) {
    let n = strings[0].num_qubits();
    let mut r = rng(seed ^ 0xABCD);
    let terms: Vec<PauliTerm> = strings.into_iter().map(|p| PauliTerm::new(r.random_range(0.1..1.0), p)).collect();
    let h = Hamiltonian::new(n, terms).unwrap();
    let g = CommutingGroup {
        k,
        members: (0..h.len()).collect(),
    };
    (h, g)
}

fn random_group(seed: u64, max_n: usize, max_size: usize) -> Option<(Hamiltonian, CommutingGroup)> {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_n);
    let k = r.random_range(1..=n);
    let size = r.random_range(1..=max_size);
    let strings = random_commuting_strings(&mut r, n, k, size);
    (!strings.is_empty()).then(|| as_group(seed, strings, k))
}

fn gates_in_segment(c: &CliffordCircuit, start: usize, end: usize) -> CliffordCircuit {
    let gates = c
        .gates()
        .iter()
        .filter(|g| {
            let (qs, arity) = g.qubits();
            qs[..arity].iter().all(|&q| q >= start && q < end)
        })
        .copied()
        .collect();
    CliffordCircuit::from_gates(c.num_qubits(), gates).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn images_are_diagonal_and_match_dense(seed in any::<u64>()) {
        let Some((h, g)) = random_group(seed, 6, 8) else { return Ok(()) };
        let d = diagonalize_group(&h, &g).unwrap();
        let u = circuit_dense(&d.circuit);
        for (j, &m) in g.members.iter().enumerate() {
            let img = &d.images[j];
            prop_assert!(img.pauli.is_diagonal());
            let lhs = &u * pauli_dense(&h.terms()[m].pauli) * u.adjoint();
            let rhs = pauli_dense(&img.pauli) * Complex64::new(img.sign(), 0.0);
            prop_assert!(max_diff(&lhs, &rhs) <= 1e-10);
        }
    }

    #[test]
    fn gates_stay_inside_segments_and_act_locally(seed in any::<u64>()) {
        let Some((h, g)) = random_group(seed, 8, 8) else { return Ok(()) };
        let n = h.num_qubits();
        prop_assume!(g.k < n);
        let d = diagonalize_group(&h, &g).unwrap();
        let segs = segments(n, g.k);
        for gate in d.circuit.gates() {
            let (qs, arity) = gate.qubits();
            let seg_of = |q: usize| segs.iter().position(|&(a, b)| q >= a && q < b).unwrap();
            prop_assert!(qs[..arity].iter().all(|&q| seg_of(q) == seg_of(qs[0])));
        }
        for &(a, b) in &segs {
            let local = gates_in_segment(&d.circuit, a, b);
            for (j, &m) in g.members.iter().enumerate() {
                let partial = conjugate_circuit(&SignedPauli::positive(h.terms()[m].pauli.clone()), &local).unwrap();
                prop_assert_eq!(partial.pauli.slice(a, b), d.images[j].pauli.slice(a, b));
                // qubits outside the segment are untouched
                for q in (0..n).filter(|&q| q < a || q >= b) {
                    prop_assert_eq!(partial.pauli.get(q), h.terms()[m].pauli.get(q));
                }
            }
        }
    }

    #[test]
    fn expectation_transport(seed in any::<u64>()) {
        let Some((h, g)) = random_group(seed, 6, 8) else { return Ok(()) };
        let d = diagonalize_group(&h, &g).unwrap();
        let psi = random_state(&mut rng(seed.wrapping_add(1)), h.num_qubits());
        let mut moved = psi.clone();
        moved.apply_clifford(&d.circuit).unwrap();
        for (j, &m) in g.members.iter().enumerate() {
            let before = pauli_expectation(&h.terms()[m].pauli, psi.amplitudes());
            let after = pauli_expectation(&d.images[j].pauli, moved.amplitudes()) * d.images[j].sign();
            prop_assert!((before - after).norm() <= 1e-10);
        }
    }

    #[test]
    fn symplectic_route_also_diagonalizes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=7);
        let strings = random_commuting_strings(&mut r, n, n, 10);
        prop_assume!(!strings.is_empty());
        let c = diagonalizing_circuit(&strings, Synthesis::Symplectic).expect("symplectic synthesis");
        for s in &strings {
            prop_assert!(conjugate_circuit(&SignedPauli::positive(s.clone()), &c).unwrap().pauli.is_diagonal());
        }
    }

    #[test]
    fn diagonal_groups_need_no_gates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=10);
        let strings: Vec<PauliString> = (0..6)
            .map(|_| {
                let mut p = PauliString::identity(n);
                p.set(r.random_range(0..n), kcommute::Pauli::Z);
                for q in 0..n {
                    if r.random_bool(0.3) {
                        p.set(q, kcommute::Pauli::Z);
                    }
                }
                p
            })
            .collect();
        let (h, g) = as_group(seed, strings, r.random_range(1..=n));
        let d = diagonalize_group(&h, &g).unwrap();
        prop_assert!(d.circuit.is_empty());
        prop_assert_eq!(d.measurement_depth(), 0);
    }
}

fn check_against_dense(strs: &[&str], k: usize) -> Vec<SignedPauli> {
    let strings: Vec<PauliString> = strs.iter().map(|s| s.parse().unwrap()).collect();
    let (h, g) = as_group(0, strings, k);
    let d = diagonalize_group(&h, &g).unwrap();
    let u = circuit_dense(&d.circuit);
    for (j, &m) in g.members.iter().enumerate() {
        let lhs = &u * pauli_dense(&h.terms()[m].pauli) * u.adjoint();
        let rhs = pauli_dense(&d.images[j].pauli) * Complex64::new(d.images[j].sign(), 0.0);
        assert!(max_diff(&lhs, &rhs) <= 1e-10, "{}", strs[j]);
        assert!(d.images[j].pauli.is_diagonal());
    }
    assert!(!d.fallback_used);
    d.images
}

#[test]
fn two_segment_example() {
    let images = check_against_dense(&["XXII", "YYZZ", "ZZXX"], 2);
    assert_eq!(images.len(), 3);
}

#[test]
fn zz_xx_pair() {
    // the diagonal member must not be skipped, or XX undoes it
    check_against_dense(&["ZZ", "XX"], 2);
    check_against_dense(&["XX", "ZZ"], 2);
    check_against_dense(&["XX", "YY", "ZZ"], 2);
}

#[test]
fn trivial_groups() {
    let z = check_against_dense(&["Z"], 1);
    assert_eq!(z[0].to_string(), "+Z");
    let strings = vec!["X".parse().unwrap()];
    let (h, g) = as_group(0, strings, 1);
    let d = diagonalize_group(&h, &g).unwrap();
    assert_eq!(d.circuit.to_text().trim(), "H 0");
    assert_eq!(d.images[0].to_string(), "+Z");
}

#[test]
fn rejects_non_commuting_group() {
    let h = Hamiltonian::from_strs(&[(1.0, "XI"), (1.0, "ZI")]).unwrap();
    let g = CommutingGroup { k: 2, members: vec![0, 1] };
    assert!(matches!(diagonalize_group(&h, &g), Err(kcommute::Error::NotCommutingGroup { .. })));
}
