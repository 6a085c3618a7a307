//! Sorted-insertion grouping into k-commuting sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// Term indices whose Pauli strings pairwise k-commute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutingGroup {
    pub k: usize,
    pub members: Vec<usize>,
}

impl CommutingGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Coefficients of the members, in member order.
    pub fn coeffs(&self, h: &Hamiltonian) -> Vec<f64> {
        self.members.iter().map(|&i| h.terms()[i].coeff).collect()
    }

    /// Re-checks every member pair; returns the first offending pair.
    pub fn validate(&self, h: &Hamiltonian) -> Result<()> {
        let terms = h.terms();
        for &i in &self.members {
            if i >= terms.len() {
                return Err(Error::TermOutOfRange {
                    index: i,
                    len: terms.len(),
                });
            }
        }
        for (a, &i) in self.members.iter().enumerate() {
            for &j in &self.members[a + 1..] {
                if i == j || !terms[i].pauli.k_commutes(&terms[j].pauli, self.k)? {
                    return Err(Error::NotCommutingGroup { k: self.k, a: i, b: j });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingResult {
    pub k: usize,
    pub groups: Vec<CommutingGroup>,
    pub num_terms: usize,
}

impl GroupingResult {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(CommutingGroup::len).collect()
    }
}

/// Greedy grouping: terms in order of decreasing |coeff| (stable), each
/// placed in the first group, in creation order, whose members all
/// k-commute with it.
pub fn sorted_insertion_grouping(h: &Hamiltonian, k: usize) -> Result<GroupingResult> {
    let n = h.num_qubits();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if h.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let terms = h.terms();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].coeff.abs().total_cmp(&terms[a].coeff.abs()));

    let mut groups: Vec<CommutingGroup> = Vec::new();
    'terms: for i in order {
        let p = &terms[i].pauli;
        for g in groups.iter_mut() {
            let fits = g
                .members
                .iter()
                .all(|&m| terms[m].pauli.k_commutes(p, k).expect("dimensions checked at ingestion"));
            if fits {
                g.members.push(i);
                continue 'terms;
            }
        }
        groups.push(CommutingGroup { k, members: vec![i] });
    }
    Ok(GroupingResult {
        k,
        groups,
        num_terms: terms.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tfim;

    #[test]
    fn single_group_for_commuting_pairs() {
        let h = Hamiltonian::from_strs(&[(1.0, "XX"), (0.9, "YY"), (0.5, "ZZ")]).unwrap();
        let g = sorted_insertion_grouping(&h, 2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.groups[0].members, [0, 1, 2]);
    }

    #[test]
    fn anticommuting_terms_split() {
        let h = Hamiltonian::from_strs(&[(1.0, "X"), (1.0, "Z")]).unwrap();
        let g = sorted_insertion_grouping(&h, 1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.groups[0].members, [0]);
        assert_eq!(g.groups[1].members, [1]);
    }

    #[test]
    fn tfim_full_commuting_has_two_groups() {
        let h = tfim(4, 1.0, 1.0, true).unwrap();
        let g = sorted_insertion_grouping(&h, 4).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.groups[0].members, [0, 1, 2, 3]);
        assert_eq!(g.groups[1].members, [4, 5, 6, 7]);
    }

    #[test]
    fn sort_is_by_magnitude_then_position() {
        let h = Hamiltonian::from_strs(&[(0.1, "XI"), (-2.0, "ZI"), (0.1, "IX"), (2.0, "IZ")]).unwrap();
        let g = sorted_insertion_grouping(&h, 2).unwrap();
        // ZI and IZ first (ties keep order), then XI and IX
        assert_eq!(g.groups[0].members, [1, 3]);
        assert_eq!(g.groups[1].members, [0, 2]);
    }

    #[test]
    fn rejects_bad_k() {
        let h = tfim(3, 1.0, 1.0, false).unwrap();
        assert_eq!(sorted_insertion_grouping(&h, 0), Err(Error::InvalidK { k: 0, n: 3 }));
        assert_eq!(sorted_insertion_grouping(&h, 4), Err(Error::InvalidK { k: 4, n: 3 }));
    }

    #[test]
    fn validate_catches_bad_group() {
        let h = Hamiltonian::from_strs(&[(1.0, "X"), (1.0, "Z")]).unwrap();
        let bad = CommutingGroup { k: 1, members: vec![0, 1] };
        assert!(matches!(bad.validate(&h), Err(Error::NotCommutingGroup { .. })));
        let oob = CommutingGroup { k: 1, members: vec![5] };
        assert!(matches!(oob.validate(&h), Err(Error::TermOutOfRange { .. })));
    }
}
