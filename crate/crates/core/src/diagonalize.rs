//! Measurement-circuit synthesis for k-commuting groups.
//!
//! Each k-qubit segment is handled independently and the segment circuits are
//! concatenated, so no gate crosses a segment boundary. Within a segment the
//! primary route repeatedly takes the non-diagonal string with the smallest
//! minimum support, maps its X/Y factors to Z with H and S† gates, and folds
//! the resulting Z string onto its minimum-support qubit with a CNOT ladder.
//! That qubit is then retired: every other string commutes with the pivot and
//! so carries only I or Z there, and later gates never touch it.
//!
//! Every result is checked by conjugating the members through the circuit.
//! If the primary route leaves a non-diagonal image, the segment is redone by
//! symplectic Gaussian elimination and the group is flagged.

use serde::{Deserialize, Serialize};

use crate::clifford::{conjugate_circuit, conjugate_gate_in_place, CliffordCircuit, CliffordGate, SignedPauli};
use crate::error::{Error, Result};
use crate::grouping::{CommutingGroup, GroupingResult};
use crate::hamiltonian::Hamiltonian;
use crate::par::{self, ExecPolicy};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Synthesis {
    /// Minimum-support pivoting with CNOT ladders.
    MinSupport,
    /// Gaussian elimination on the group's (x | z) tableau.
    Symplectic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizedGroup {
    pub group: CommutingGroup,
    pub circuit: CliffordCircuit,
    /// Signed diagonal image of each member, aligned with `group.members`.
    pub images: Vec<SignedPauli>,
    pub fallback_used: bool,
}

impl DiagonalizedGroup {
    pub fn measurement_depth(&self) -> usize {
        self.circuit.depth()
    }
}

/// Circuit depth with greedily packed layers.
pub fn measurement_depth(d: &DiagonalizedGroup) -> usize {
    d.measurement_depth()
}

fn apply_all(strings: &mut [SignedPauli], circuit: &mut CliffordCircuit, gate: CliffordGate) {
    circuit.push(gate).expect("gate indices come from the segment width");
    for s in strings.iter_mut() {
        conjugate_gate_in_place(s, &gate);
    }
}

fn min_active_support(p: &PauliString, active: &[bool]) -> Option<usize> {
    (0..p.num_qubits()).find(|&q| active[q] && p.get(q) != Pauli::I)
}

fn min_support_route(strings: &[PauliString], width: usize) -> Option<CliffordCircuit> {
    let mut cur: Vec<SignedPauli> = strings.iter().cloned().map(SignedPauli::positive).collect();
    let mut active = vec![true; width];
    let mut circuit = CliffordCircuit::new(width);
    loop {
        let pivot = cur
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.pauli.is_diagonal())
            .filter_map(|(i, s)| min_active_support(&s.pauli, &active).map(|q| (q, i)))
            .min();
        let Some((q, idx)) = pivot else { break };

        let p = cur[idx].pauli.clone();
        let support: Vec<usize> = (q..width).filter(|&s| active[s] && p.get(s) != Pauli::I).collect();
        for &s in &support {
            match p.get(s) {
                Pauli::X => apply_all(&mut cur, &mut circuit, CliffordGate::H(s)),
                Pauli::Y => {
                    apply_all(&mut cur, &mut circuit, CliffordGate::Sdg(s));
                    apply_all(&mut cur, &mut circuit, CliffordGate::H(s));
                }
                _ => {}
            }
        }
        for pair in support.windows(2).rev() {
            apply_all(
                &mut cur,
                &mut circuit,
                CliffordGate::Cnot {
                    control: pair[1],
                    target: pair[0],
                },
            );
        }

        let reduced = &cur[idx].pauli;
        let pivot_ok = (0..width).all(|s| {
            let f = reduced.get(s);
            if s == q {
                f == Pauli::Z
            } else if active[s] {
                f == Pauli::I
            } else {
                !reduced.x(s)
            }
        });
        if !pivot_ok || cur.iter().any(|s| s.pauli.x(q)) {
            return None;
        }
        active[q] = false;
    }
    Some(circuit)
}

fn symplectic_route(strings: &[PauliString], width: usize) -> Option<CliffordCircuit> {
    let mut rows: Vec<SignedPauli> = strings.iter().cloned().map(SignedPauli::positive).collect();
    let mut used = vec![false; width];
    let mut is_pivot_row = vec![false; rows.len()];
    let mut circuit = CliffordCircuit::new(width);
    loop {
        let found = rows.iter().enumerate().find_map(|(r, row)| {
            if is_pivot_row[r] {
                return None;
            }
            (0..width).find(|&q| !used[q] && row.pauli.x(q)).map(|q| (r, q))
        });
        let Some((r, q)) = found else { break };

        let pivot = rows[r].pauli.clone();
        for (j, row) in rows.iter_mut().enumerate() {
            if j != r && row.pauli.x(q) {
                row.pauli.mul_assign_unsigned(&pivot);
            }
        }
        let free: Vec<usize> = (0..width).filter(|&t| t != q && !used[t]).collect();
        for &t in &free {
            if rows[r].pauli.x(t) {
                apply_all(&mut rows, &mut circuit, CliffordGate::Cnot { control: q, target: t });
            }
        }
        for &t in &free {
            if rows[r].pauli.z(t) {
                // controlled-Z(q, t)
                apply_all(&mut rows, &mut circuit, CliffordGate::H(t));
                apply_all(&mut rows, &mut circuit, CliffordGate::Cnot { control: q, target: t });
                apply_all(&mut rows, &mut circuit, CliffordGate::H(t));
            }
        }
        if rows[r].pauli.z(q) {
            apply_all(&mut rows, &mut circuit, CliffordGate::S(q));
        }
        apply_all(&mut rows, &mut circuit, CliffordGate::H(q));
        used[q] = true;
        is_pivot_row[r] = true;
    }
    Some(circuit)
}

fn diagonalizes(strings: &[PauliString], circuit: &CliffordCircuit) -> bool {
    strings.iter().all(|s| {
        conjugate_circuit(&SignedPauli::positive(s.clone()), circuit)
            .map(|img| img.pauli.is_diagonal())
            .unwrap_or(false)
    })
}

/// Synthesizes a circuit mapping every (pairwise commuting) string to a
/// diagonal one, or `None` if the chosen route fails the final check.
pub fn diagonalizing_circuit(strings: &[PauliString], method: Synthesis) -> Option<CliffordCircuit> {
    let width = strings.first().map(PauliString::num_qubits)?;
    let circuit = match method {
        Synthesis::MinSupport => min_support_route(strings, width)?,
        Synthesis::Symplectic => symplectic_route(strings, width)?,
    };
    diagonalizes(strings, &circuit).then_some(circuit)
}

/// Segment boundaries `[start, end)` for segment size `k` on `n` qubits.
pub fn segments(n: usize, k: usize) -> Vec<(usize, usize)> {
    (0..n).step_by(k).map(|s| (s, (s + k).min(n))).collect()
}

/// Builds the measurement circuit and signed diagonal images for one group.
pub fn diagonalize_group(h: &Hamiltonian, group: &CommutingGroup) -> Result<DiagonalizedGroup> {
    group.validate(h)?;
    let n = h.num_qubits();
    let members: Vec<&PauliString> = group.members.iter().map(|&i| &h.terms()[i].pauli).collect();

    let mut circuit = CliffordCircuit::new(n);
    let mut fallback_used = false;
    for (start, end) in segments(n, group.k) {
        let local: Vec<PauliString> = members.iter().map(|p| p.slice(start, end)).collect();
        let seg = match diagonalizing_circuit(&local, Synthesis::MinSupport) {
            Some(c) => c,
            None => {
                log::warn!("min-support synthesis failed on segment {start}..{end}; using symplectic fallback");
                fallback_used = true;
                diagonalizing_circuit(&local, Synthesis::Symplectic).ok_or(Error::SynthesisFailure { segment_start: start })?
            }
        };
        circuit.append_shifted(&seg, start)?;
    }

    let images = members
        .iter()
        .map(|p| conjugate_circuit(&SignedPauli::positive((*p).clone()), &circuit))
        .collect::<Result<Vec<_>>>()?;
    if images.iter().any(|img| !img.pauli.is_diagonal()) {
        return Err(Error::SynthesisFailure { segment_start: 0 });
    }
    Ok(DiagonalizedGroup {
        group: group.clone(),
        circuit,
        images,
        fallback_used,
    })
}

/// Diagonalizes every group of a grouping result.
pub fn diagonalize_all(h: &Hamiltonian, grouping: &GroupingResult, policy: ExecPolicy) -> Result<Vec<DiagonalizedGroup>> {
    par::try_map_indices(policy, grouping.groups.len(), |i| diagonalize_group(h, &grouping.groups[i]))
}
