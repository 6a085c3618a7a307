//! Pauli strings in symplectic (x, z) bit form.
//!
//! Qubit 0 is the leftmost character of the string form. When a string is
//! mapped onto a computational-basis index, qubit 0 is the most significant
//! bit (see [`PauliString::basis_x_mask`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// An n-qubit tensor product of Pauli factors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
        }
    }

    /// Builds a string from explicit (x, z) bit vectors of equal length.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        let mut p = PauliString::identity(x.len());
        for q in 0..x.len() {
            p.set_bits(q, x[q], z[q]);
        }
        Ok(p)
    }

    /// Builds a string with the given factors on the listed qubits.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, op) in ops {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n });
            }
            p.set(q, op);
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x(q), self.z(q))
    }

    #[inline]
    pub fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn set(&mut self, q: usize, op: Pauli) {
        let (x, z) = op.bits();
        self.set_bits(q, x, z);
    }

    pub fn x_bits(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.x(q)).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.z(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when every factor is I or Z.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones() as usize).sum()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }

    /// Smallest qubit index with a non-identity factor.
    pub fn min_support(&self) -> Result<usize> {
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let m = x | z;
            if m != 0 {
                return Ok(w * WORD + m.trailing_zeros() as usize);
            }
        }
        Err(Error::IdentityString)
    }

    fn check_dim(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Per-word mask of qubits where the single-qubit factors anticommute.
    fn anticommute_words<'a>(&'a self, other: &'a PauliString) -> impl Iterator<Item = u64> + 'a {
        (0..self.x.len()).map(move |w| (self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w]))
    }

    /// Full commutation via the symplectic inner product.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dim(other)?;
        let count: u32 = self.anticommute_words(other).map(u64::count_ones).sum();
        Ok(count.is_multiple_of(2))
    }

    /// Commutation restricted to every consecutive block of `k` qubits. When
    /// `k` does not divide n, the last block holds the remaining n mod k qubits.
    pub fn k_commutes(&self, other: &PauliString, k: usize) -> Result<bool> {
        self.check_dim(other)?;
        if k < 1 || k > self.n {
            return Err(Error::InvalidK { k, n: self.n });
        }
        let anti: Vec<u64> = self.anticommute_words(other).collect();
        let mut start = 0;
        while start < self.n {
            let end = (start + k).min(self.n);
            if count_range(&anti, start, end) % 2 == 1 {
                return Ok(false);
            }
            start = end;
        }
        Ok(true)
    }

    /// Multiplies in `other` ignoring phase (bitwise xor of both halves).
    pub fn mul_assign_unsigned(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        for w in 0..self.x.len() {
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
    }

    /// Substring on qubits `start..end`, re-indexed from zero.
    pub fn slice(&self, start: usize, end: usize) -> PauliString {
        let mut p = PauliString::identity(end - start);
        for q in start..end {
            p.set_bits(q - start, self.x(q), self.z(q));
        }
        p
    }

    /// Mask over basis-state indices of the qubits with an X component
    /// (qubit 0 is the most significant bit). Requires n <= 64.
    pub fn basis_x_mask(&self) -> u64 {
        self.basis_mask(|q| self.x(q))
    }

    /// Mask over basis-state indices of the qubits with a Z component.
    pub fn basis_z_mask(&self) -> u64 {
        self.basis_mask(|q| self.z(q))
    }

    fn basis_mask(&self, bit: impl Fn(usize) -> bool) -> u64 {
        assert!(self.n <= 64, "basis masks need n <= 64");
        (0..self.n).filter(|&q| bit(q)).fold(0u64, |m, q| m | (1u64 << (self.n - 1 - q)))
    }
}

fn count_range(words: &[u64], start: usize, end: usize) -> u32 {
    let mut count = 0;
    let mut q = start;
    while q < end {
        let (w, b) = (q / WORD, q % WORD);
        let len = (WORD - b).min(end - q);
        let mask = if len == WORD { u64::MAX } else { ((1u64 << len) - 1) << b };
        count += (words[w] & mask).count_ones();
        q += len;
    }
    count
}

/// Parses a string over {I,X,Y,Z}; the leftmost character is qubit 0.
pub fn parse_pauli(text: &str) -> Result<PauliString> {
    if text.is_empty() {
        return Err(Error::EmptyString);
    }
    let chars: Vec<char> = text.chars().collect();
    let mut p = PauliString::identity(chars.len());
    for (position, &c) in chars.iter().enumerate() {
        let op = Pauli::from_char(c).ok_or(Error::InvalidCharacter { position, character: c })?;
        p.set(position, op);
    }
    Ok(p)
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_pauli(&s).map_err(serde::de::Error::custom)
    }
}
