//! Symplectic representation of n-qubit Pauli operators (phases dropped).
//!
//! Qubit `q` is character `q` of a label, counting from the left. The dense
//! index of a Pauli is `sum_q c_q * 4^q` with per-qubit digit
//! `I = 0, X = 1, Y = 2, Z = 3`, so the leftmost character is the least
//! significant base-4 digit. Every dense spectrum in this crate uses that
//! order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest register a [`PauliOp`] can describe (two 64-bit masks).
pub const MAX_QUBITS: usize = 32;

/// Number of Paulis on `n` qubits, `4^n`.
pub fn dimension(n: usize) -> usize {
    1usize << (2 * n)
}

/// An n-qubit Pauli operator without phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n: n as u8, x: 0, z: 0 }
    }

    /// Build from symplectic masks; bit `q` of `x`/`z` belongs to qubit `q`.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mask = Self::mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Dimension(format!("symplectic bits exceed {n} qubits")));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// A single non-identity letter on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        if q >= n {
            return Err(Error::Dimension(format!("qubit {q} out of range for {n} qubits")));
        }
        let mut p = Self::identity(n);
        p.set(q, letter)?;
        Ok(p)
    }

    pub fn from_index(index: usize, n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if n < MAX_QUBITS && (index as u128) >= (dimension(n) as u128) {
            return Err(Error::Dimension(format!("index {index} out of range for {n} qubits")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for q in 0..n {
            let (xb, zb) = match (index >> (2 * q)) & 3 {
                0 => (0, 0),
                1 => (1, 0),
                2 => (1, 1),
                _ => (0, 1),
            };
            x |= xb << q;
            z |= zb << q;
        }
        Ok(Self { n: n as u8, x, z })
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Dense index `sum_q c_q 4^q`.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for q in 0..self.num_qubits() {
            let digit = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 0,
                (1, 0) => 1,
                (1, 1) => 2,
                _ => 3,
            };
            idx |= digit << (2 * q);
        }
        idx
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    fn set(&mut self, q: usize, letter: char) -> Result<()> {
        let (xb, zb) = match letter {
            'I' => (0, 0),
            'X' => (1, 0),
            'Y' => (1, 1),
            'Z' => (0, 1),
            other => return Err(Error::InvalidLabel(other.to_string())),
        };
        self.x = (self.x & !(1 << q)) | (xb << q);
        self.z = (self.z & !(1 << q)) | (zb << q);
        Ok(())
    }

    /// Number of qubits carrying a non-identity letter.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let s = self.x | self.z;
        (0..self.num_qubits()).filter(|&q| (s >> q) & 1 == 1).collect()
    }

    /// Symplectic commutation test. Both operators must act on the same
    /// register; use [`commutes`] for a checked version.
    #[inline]
    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        debug_assert_eq!(self.n, other.n);
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// True when the two operators commute on every qubit individually.
    pub fn qubitwise_commutes(&self, other: &PauliOp) -> bool {
        let both = (self.x | self.z) & (other.x | other.z);
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// Product with the phase discarded.
    pub fn product(&self, other: &PauliOp) -> PauliOp {
        debug_assert_eq!(self.n, other.n);
        PauliOp { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// Iterate over all `4^n` Paulis in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliOp> {
        (0..dimension(n)).map(move |i| PauliOp::from_index(i, n).expect("index in range"))
    }

    fn mask(n: usize) -> u64 {
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }
}

/// Checked commutation test.
pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    if p.n != q.n {
        return Err(Error::Dimension(format!(
            "cannot compare {}-qubit and {}-qubit Paulis",
            p.n, q.n
        )));
    }
    Ok(p.commutes_with(q))
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut p = PauliOp::identity(n);
        for (q, c) in s.chars().enumerate() {
            p.set(q, c).map_err(|_| Error::InvalidLabel(s.to_string()))?;
        }
        Ok(p)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.num_qubits()).map(|q| self.letter(q)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl Ord for PauliOp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.index().cmp(&other.index()))
    }
}

impl PartialOrd for PauliOp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
