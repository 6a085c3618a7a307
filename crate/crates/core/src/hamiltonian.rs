//! Weighted Pauli sums and the plain-text Hamiltonian format.
//!
//! ```text
//! # two-qubit example
//! 2
//! 0.5   XX
//! -1.0  ZI
//! ```
//!
//! The first non-comment line is the qubit count; every following non-empty
//! line is `<coeff> <pauli-string>`. `#` starts a comment.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{parse_pauli, PauliString};

/// Coefficients with magnitude at or below this are dropped at ingestion.
pub const DROP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, pauli: PauliString) -> Self {
        PauliTerm { coeff, pauli }
    }
}

/// H = sum_i c_i P_i over a fixed qubit count.
///
/// Construction merges duplicate strings by summing coefficients (first
/// occurrence keeps its position) and then drops near-zero terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    pub fn new(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for term in terms {
            if term.pauli.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: term.pauli.num_qubits(),
                });
            }
            if !term.coeff.is_finite() {
                return Err(Error::SyntaxError {
                    line: 0,
                    message: format!("non-finite coefficient for {}", term.pauli),
                });
            }
            match index.get(&term.pauli) {
                Some(&i) => merged[i].coeff += term.coeff,
                None => {
                    index.insert(term.pauli.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coeff.abs() > DROP_TOLERANCE);
        if merged.is_empty() {
            return Err(Error::EmptyHamiltonian);
        }
        Ok(Hamiltonian { n, terms: merged })
    }

    /// Convenience constructor from `(coeff, "XZI…")` pairs.
    pub fn from_strs(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(c, s)| Ok(PauliTerm::new(c, parse_pauli(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map(|t| t.pauli.num_qubits()).ok_or(Error::EmptyHamiltonian)?;
        Hamiltonian::new(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of |c_i|, used to normalise reported errors.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Sub-Hamiltonian on the given term indices, in the order given.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let terms = indices
            .iter()
            .map(|&i| {
                self.terms.get(i).cloned().ok_or(Error::TermOutOfRange {
                    index: i,
                    len: self.terms.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(self.n, terms)
    }

    /// Renders in the text format accepted by [`parse_hamiltonian`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for t in &self.terms {
            writeln!(f, "{} {}", t.coeff, t.pauli)?;
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the plain-text Hamiltonian format (LF or CRLF line endings).
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut n: Option<usize> = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw.trim_end_matches('\r')).trim();
        if line.is_empty() {
            continue;
        }
        let Some(width) = n else {
            let parsed: usize = line.parse().map_err(|_| Error::SyntaxError {
                line: line_no,
                message: format!("expected qubit count, found {line:?}"),
            })?;
            if parsed == 0 {
                return Err(Error::SyntaxError {
                    line: line_no,
                    message: "qubit count must be positive".into(),
                });
            }
            n = Some(parsed);
            continue;
        };
        let mut fields = line.split_whitespace();
        let (Some(c), Some(s), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::SyntaxError {
                line: line_no,
                message: "expected `<coeff> <pauli-string>`".into(),
            });
        };
        let coeff: f64 = c.parse().map_err(|_| Error::SyntaxError {
            line: line_no,
            message: format!("invalid coefficient {c:?}"),
        })?;
        if !coeff.is_finite() {
            return Err(Error::SyntaxError {
                line: line_no,
                message: format!("non-finite coefficient {c:?}"),
            });
        }
        let pauli = parse_pauli(s).map_err(|e| Error::SyntaxError {
            line: line_no,
            message: e.to_string(),
        })?;
        if pauli.num_qubits() != width {
            return Err(Error::InconsistentWidth {
                line: line_no,
                expected: width,
                found: pauli.num_qubits(),
            });
        }
        terms.push(PauliTerm::new(coeff, pauli));
    }
    let n = n.ok_or(Error::EmptyHamiltonian)?;
    Hamiltonian::new(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_simple_document() {
        let h = parse_hamiltonian("2\n0.5 XX\n-1.0 ZI").unwrap();
        assert_eq!(h.num_qubits(), 2);
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[1].coeff, -1.0);
        assert_eq!(h.terms()[1].pauli.to_string(), "ZI");
    }

    #[test]
    fn merges_duplicates_in_place() {
        let h = parse_hamiltonian("2\n0.5 XX\n1 ZZ\n0.5 XX\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].coeff, 1.0);
        assert_eq!(h.terms()[0].pauli.to_string(), "XX");
    }

    #[test]
    fn drops_tiny_and_cancelled_terms() {
        assert_eq!(parse_hamiltonian("2\n1e-15 XX\n"), Err(Error::EmptyHamiltonian));
        let h = parse_hamiltonian("2\n1 XX\n-1 XX\n2 ZZ").unwrap();
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn comments_crlf_and_scientific() {
        let h = parse_hamiltonian("# header\r\n3 # qubits\r\n\r\n2.5e-1 XYZ # t\r\n-1E2 IIZ\r\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].coeff, 0.25);
        assert_eq!(h.terms()[1].coeff, -100.0);
    }

    #[test]
    fn reports_errors_with_lines() {
        assert!(matches!(
            parse_hamiltonian("2\n0.5 XXX"),
            Err(Error::InconsistentWidth {
                line: 2,
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(parse_hamiltonian("2\nabc XX"), Err(Error::SyntaxError { line: 2, .. })));
        assert!(matches!(parse_hamiltonian("2\n1.0 XQ"), Err(Error::SyntaxError { line: 2, .. })));
        assert!(matches!(parse_hamiltonian("two\n1 XX"), Err(Error::SyntaxError { line: 1, .. })));
        assert!(matches!(parse_hamiltonian("2\n1.0 XX extra"), Err(Error::SyntaxError { .. })));
        assert_eq!(parse_hamiltonian("# nothing\n"), Err(Error::EmptyHamiltonian));
        assert_eq!(parse_hamiltonian("3\n"), Err(Error::EmptyHamiltonian));
    }

    #[test]
    fn render_round_trip() {
        let h = Hamiltonian::from_strs(&[(0.1, "XIZ"), (-3.25e-7, "YYI"), (1.0 / 3.0, "IIZ")]).unwrap();
        assert_eq!(parse_hamiltonian(&h.to_text()).unwrap(), h);
    }
}
