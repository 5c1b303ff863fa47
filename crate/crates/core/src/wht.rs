//! Dense Pauli spectra and the Walsh-Hadamard transform between them.
//!
//! `H[j][k] = +1` when Paulis `j` and `k` commute and `-1` otherwise. Because
//! commutation signs factor over qubits, `H` is the n-fold tensor power of a
//! 4x4 kernel and is applied digit by digit in `O(n 4^n)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{dimension, PauliOp};

/// What a dense spectrum holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Probabilities,
    Fidelities,
    LogFidelities,
    /// Dense generator rates including the identity entry.
    Rates,
}

/// A length-`4^n` complex vector indexed by Pauli.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVector {
    n: usize,
    values: Vec<Complex64>,
    kind: SpectrumKind,
}

impl SpectrumVector {
    pub fn new(n: usize, values: Vec<Complex64>, kind: SpectrumKind) -> Result<Self> {
        if values.len() != dimension(n) {
            return Err(Error::Dimension(format!(
                "spectrum for {n} qubits needs {} entries, got {}",
                dimension(n),
                values.len()
            )));
        }
        Ok(Self { n, values, kind })
    }

    pub fn from_real(n: usize, values: &[f64], kind: SpectrumKind) -> Result<Self> {
        Self::new(n, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), kind)
    }

    /// Length-`4^n` vector with a single one at `index`.
    pub fn indicator(n: usize, index: usize, kind: SpectrumKind) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); dimension(n)];
        let slot = values
            .get_mut(index)
            .ok_or_else(|| Error::Dimension(format!("index {index} out of range")))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self { n, values, kind })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, p: &PauliOp) -> Complex64 {
        self.values[p.index()]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn with_kind(mut self, kind: SpectrumKind) -> Self {
        self.kind = kind;
        self
    }

    /// Elementwise map keeping the length.
    pub fn map(&self, kind: SpectrumKind, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| f(v)).collect(), kind }
    }
}

fn transformed_kind(kind: SpectrumKind) -> SpectrumKind {
    match kind {
        SpectrumKind::Probabilities => SpectrumKind::Fidelities,
        SpectrumKind::Fidelities => SpectrumKind::Probabilities,
        SpectrumKind::LogFidelities => SpectrumKind::Rates,
        SpectrumKind::Rates => SpectrumKind::LogFidelities,
    }
}

/// Qubit count `n` with `4^n == len`, if any.
pub fn qubits_for_len(len: usize) -> Option<usize> {
    if len == 0 || !len.is_power_of_two() || len.trailing_zeros() % 2 != 0 {
        return None;
    }
    Some(len.trailing_zeros() as usize / 2)
}

/// In-place unnormalized transform `v <- H v`.
pub fn fwht_in_place(v: &mut [Complex64]) -> Result<()> {
    let n = qubits_for_len(v.len())
        .ok_or_else(|| Error::Dimension(format!("length {} is not a power of 4", v.len())))?;
    let mut stride = 1;
    for _ in 0..n {
        let block = 4 * stride;
        for base in (0..v.len()).step_by(block) {
            for off in base..base + stride {
                let a = v[off];
                let b = v[off + stride];
                let c = v[off + 2 * stride];
                let d = v[off + 3 * stride];
                // rows I, X, Y, Z of the single-qubit commutation kernel
                v[off] = a + b + c + d;
                v[off + stride] = a + b - c - d;
                v[off + 2 * stride] = a - b + c - d;
                v[off + 3 * stride] = a - b - c + d;
            }
        }
        stride = block;
    }
    Ok(())
}

/// In-place normalized inverse `v <- H v / 4^n`.
pub fn ifwht_in_place(v: &mut [Complex64]) -> Result<()> {
    fwht_in_place(v)?;
    let scale = 1.0 / v.len() as f64;
    for x in v.iter_mut() {
        *x *= scale;
    }
    Ok(())
}

/// `H v`. Probabilities map to fidelities and log-fidelities to (scaled) rates.
pub fn walsh_hadamard(v: &SpectrumVector) -> SpectrumVector {
    let mut values = v.values.clone();
    fwht_in_place(&mut values).expect("spectrum length is a power of 4");
    SpectrumVector { n: v.n, values, kind: transformed_kind(v.kind) }
}

/// `H v / 4^n`, the inverse of [`walsh_hadamard`].
pub fn inverse_walsh_hadamard(v: &SpectrumVector) -> SpectrumVector {
    let mut values = v.values.clone();
    ifwht_in_place(&mut values).expect("spectrum length is a power of 4");
    SpectrumVector { n: v.n, values, kind: transformed_kind(v.kind) }
}

/// Real-valued variant used by the fitting code.
pub fn fwht_real_in_place(v: &mut [f64]) -> Result<()> {
    let n = qubits_for_len(v.len())
        .ok_or_else(|| Error::Dimension(format!("length {} is not a power of 4", v.len())))?;
    let mut stride = 1;
    for _ in 0..n {
        let block = 4 * stride;
        for base in (0..v.len()).step_by(block) {
            for off in base..base + stride {
                let (a, b, c, d) = (v[off], v[off + stride], v[off + 2 * stride], v[off + 3 * stride]);
                v[off] = a + b + c + d;
                v[off + stride] = a + b - c - d;
                v[off + 2 * stride] = a - b + c - d;
                v[off + 3 * stride] = a - b - c + d;
            }
        }
        stride = block;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Brute-force `H` built entry by entry from symplectic commutation.
    fn dense_h(n: usize) -> Vec<Vec<f64>> {
        let all: Vec<PauliOp> = PauliOp::all(n).collect();
        all.iter()
            .map(|a| all.iter().map(|b| if a.commutes_with(b) { 1.0 } else { -1.0 }).collect())
            .collect()
    }

    #[test]
    fn identity_channel_has_unit_fidelities() {
        let p = SpectrumVector::indicator(1, 0, SpectrumKind::Probabilities).unwrap();
        let f = walsh_hadamard(&p);
        assert_eq!(f.kind(), SpectrumKind::Fidelities);
        assert!(f.values().iter().all(|v| (*v - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn single_qubit_family_example() {
        let p = SpectrumVector::from_real(1, &[0.1, 0.0, 0.8, 0.1], SpectrumKind::Probabilities).unwrap();
        let f = walsh_hadamard(&p);
        let want = [1.0, -0.8, 0.8, -0.6];
        for (got, w) in f.values().iter().zip(want) {
            assert!((got - c(w)).norm() < 1e-12, "{got} vs {w}");
        }
        let back = inverse_walsh_hadamard(&f);
        for (got, w) in back.values().iter().zip([0.1, 0.0, 0.8, 0.1]) {
            assert!((got - c(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn first_row_is_all_ones() {
        let v = SpectrumVector::indicator(2, 0, SpectrumKind::Probabilities).unwrap();
        let f = walsh_hadamard(&v);
        assert_eq!(f.values().len(), 16);
        assert!(f.values().iter().all(|v| *v == c(1.0)));
        let back = inverse_walsh_hadamard(&SpectrumVector::from_real(1, &[1.0; 4], SpectrumKind::Fidelities).unwrap());
        assert_eq!(back.real_parts(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_lengths() {
        let mut v = vec![c(0.0); 8];
        assert!(fwht_in_place(&mut v).is_err());
        assert!(SpectrumVector::new(2, vec![c(0.0); 4], SpectrumKind::Fidelities).is_err());
        assert_eq!(qubits_for_len(1), Some(0));
        assert_eq!(qubits_for_len(256), Some(4));
        assert_eq!(qubits_for_len(32), None);
    }

    #[test]
    fn h_is_symmetric_with_unit_first_row_and_column() {
        for n in 1..=3 {
            let h = dense_h(n);
            let d = h.len();
            for j in 0..d {
                assert_eq!(h[0][j], 1.0);
                assert_eq!(h[j][0], 1.0);
                for k in 0..d {
                    assert_eq!(h[j][k], h[k][j]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force_matrix(n in 1usize..=4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = dimension(n);
            let v: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let h = dense_h(n);
            let spec = SpectrumVector::new(n, v.clone(), SpectrumKind::Probabilities).unwrap();
            let fast = walsh_hadamard(&spec);
            for j in 0..d {
                let slow: Complex64 = (0..d).map(|k| v[k] * h[j][k]).sum();
                prop_assert!((fast.values()[j] - slow).norm() <= 1e-12);
            }
            let back = inverse_walsh_hadamard(&fast);
            for j in 0..d {
                prop_assert!((back.values()[j] - v[j]).norm() <= 1e-12);
            }
        }
    }
}
