//! Small dense complex matrices: Pauli strings, Kronecker products,
//! column-stacking superoperators and a scaling-and-squaring exponential.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliOp;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator(DMatrix<Complex64>);

impl DenseOperator {
    pub fn zeros(d: usize) -> Self {
        Self(DMatrix::from_element(d, d, ZERO))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    /// Row-major entries of a `d x d` matrix.
    pub fn from_row_major(d: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::Dimension(format!("{} entries for a {d}x{d} matrix", entries.len())));
        }
        Ok(Self(DMatrix::from_row_slice(d, d, entries)))
    }

    /// Matrix of a Pauli string; qubit 0 is the leftmost tensor factor.
    pub fn pauli(p: &PauliOp) -> Self {
        let mut out = Self::identity(1);
        for q in 0..p.num_qubits() {
            out = out.kron(&single_qubit(p.letter(q)));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.0[(i, j)] = v;
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn kron(&self, other: &DenseOperator) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|v| v.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn one_norm(&self) -> f64 {
        (0..self.dim())
            .map(|j| self.0.column(j).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `exp(A)` by scaling and squaring with a degree-13 Padé approximant.
    pub fn exp(&self) -> Self {
        matrix_exponential(self)
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &rhs.0)
    }
}

impl Mul for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: DenseOperator) -> DenseOperator {
        DenseOperator(self.0 * rhs.0)
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 - &rhs.0)
    }
}

fn single_qubit(letter: char) -> DenseOperator {
    let i = Complex64::new(0.0, 1.0);
    let e = match letter {
        'I' => [ONE, ZERO, ZERO, ONE],
        'X' => [ZERO, ONE, ONE, ZERO],
        'Y' => [ZERO, -i, i, ZERO],
        _ => [ONE, ZERO, ZERO, -ONE],
    };
    DenseOperator::from_row_major(2, &e).expect("2x2")
}

// Padé(13) coefficients, Higham 2005.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A)` by scaling and squaring with a Padé(13) approximant.
pub fn matrix_exponential(a: &DenseOperator) -> DenseOperator {
    let d = a.dim();
    if d == 0 {
        return a.clone();
    }
    let norm = a.one_norm();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a.0.clone() * Complex64::new(0.5f64.powi(s), 0.0);

    let eye = DMatrix::<Complex64>::identity(d, d);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9))
        + &a6 * c(7)
        + &a4 * c(5)
        + &a2 * c(3)
        + &eye * c(1);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8))
        + &a6 * c(6)
        + &a4 * c(4)
        + &a2 * c(2)
        + &eye * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    DenseOperator(r)
}

/// Superoperator on column-stacked density matrices: `vec(A X B) = (B^T (x) A) vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator(DenseOperator);

impl Superoperator {
    pub fn from_matrix(m: DenseOperator) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &DenseOperator {
        &self.0
    }

    /// Hilbert-space dimension the map acts on.
    pub fn hilbert_dim(&self) -> usize {
        (self.0.dim() as f64).sqrt().round() as usize
    }

    /// `rho -> U rho U^dagger`.
    pub fn unitary(u: &DenseOperator) -> Self {
        Self(u.conj().kron(u))
    }

    /// Lindbladian `-i[H, .] + sum_j rate_j (L rho L^dagger - {L^dagger L, rho}/2)`.
    pub fn lindbladian(hamiltonian: &DenseOperator, jumps: &[(f64, DenseOperator)]) -> Self {
        let d = hamiltonian.dim();
        let id = DenseOperator::identity(d);
        let mi = Complex64::new(0.0, -1.0);
        let mut gen = (&id.kron(hamiltonian) - &hamiltonian.transpose().kron(&id)).scale(mi);
        for (rate, l) in jumps {
            let ldl = &l.adjoint() * l;
            let term = &(&l.conj().kron(l) - &id.kron(&ldl).scale(Complex64::new(0.5, 0.0)))
                - &ldl.transpose().kron(&id).scale(Complex64::new(0.5, 0.0));
            gen = &gen + &term.scale(Complex64::new(*rate, 0.0));
        }
        Self(gen)
    }

    pub fn exp(&self) -> Self {
        Self(self.0.exp())
    }

    pub fn compose(&self, after: &Superoperator) -> Self {
        Self(&after.0 * &self.0)
    }

    /// Apply to an operator.
    pub fn apply(&self, rho: &DenseOperator) -> DenseOperator {
        let d = rho.dim();
        let vec = DMatrix::from_iterator(d * d, 1, rho.0.iter().copied());
        let out = &self.0 .0 * vec;
        DenseOperator(DMatrix::from_iterator(d, d, out.iter().copied()))
    }

    /// `max |Tr S(E_ij) - delta_ij|` over matrix units.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim();
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let (i, j) = (col % d, col / d);
            let tr: Complex64 = (0..d).map(|k| self.0.get(k + k * d, col)).sum();
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((tr - want).norm());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for d in [1, 2, 4, 16] {
            assert!(DenseOperator::zeros(d).exp().max_abs_diff(&DenseOperator::identity(d)) < 1e-15);
        }
    }

    #[test]
    fn pauli_rotation_identity() {
        let x = DenseOperator::pauli(&"X".parse().unwrap());
        let e = x.scale(c(0.0, -std::f64::consts::FRAC_PI_2)).exp();
        assert!(e.max_abs_diff(&x.scale(c(0.0, -1.0))) < 1e-14);
    }

    #[test]
    fn exp_of_diagonal_and_large_norm() {
        let mut a = DenseOperator::zeros(3);
        a.set(0, 0, c(-3.0, 0.5));
        a.set(1, 1, c(12.0, 0.0));
        a.set(2, 2, c(0.1, -40.0));
        let e = a.exp();
        for k in 0..3 {
            let want = a.get(k, k).exp();
            assert!((e.get(k, k) - want).norm() <= 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn exp_matches_rotation_closed_form() {
        // exp(-i theta n.sigma) = cos(theta) I - i sin(theta) n.sigma
        let theta = 2.3;
        let (nx, ny, nz) = (0.48f64, -0.6f64, 0.64f64);
        let x = DenseOperator::pauli(&"X".parse().unwrap());
        let y = DenseOperator::pauli(&"Y".parse().unwrap());
        let z = DenseOperator::pauli(&"Z".parse().unwrap());
        let ns = &(&x.scale(c(nx, 0.0)) + &y.scale(c(ny, 0.0))) + &z.scale(c(nz, 0.0));
        let u = ns.scale(c(0.0, -theta)).exp();
        let want = &DenseOperator::identity(2).scale(c(theta.cos(), 0.0)) + &ns.scale(c(0.0, -theta.sin()));
        assert!(u.max_abs_diff(&want) < 1e-13);
        assert!(u.is_unitary(1e-13));
    }

    #[test]
    fn pauli_matrices_follow_qubit_order() {
        let xz = DenseOperator::pauli(&"XZ".parse().unwrap());
        // X on the left factor, Z on the right
        assert_eq!(xz.get(0, 2), c(1.0, 0.0));
        assert_eq!(xz.get(1, 3), c(-1.0, 0.0));
    }

    #[test]
    fn unitary_superoperator_matches_conjugation() {
        let u = DenseOperator::pauli(&"Y".parse().unwrap()).scale(c(0.0, -0.7)).exp();
        let rho = DenseOperator::from_row_major(2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        let direct = &(&u * &rho) * &u.adjoint();
        let via = Superoperator::unitary(&u).apply(&rho);
        assert!(direct.max_abs_diff(&via) < 1e-14);
    }

    #[test]
    fn amplitude_damping_lindbladian_is_trace_preserving() {
        let sm = DenseOperator::from_row_major(2, &[ZERO, ONE, ZERO, ZERO]).unwrap();
        let h = DenseOperator::pauli(&"Z".parse().unwrap()).scale(c(0.3, 0.0));
        let l = Superoperator::lindbladian(&h, &[(0.4, sm)]);
        let e = l.exp();
        assert!(e.trace_defect() < 1e-13);
        // excited population decays as exp(-kappa t)
        let excited = DenseOperator::from_row_major(2, &[ZERO, ZERO, ZERO, ONE]).unwrap();
        let out = e.apply(&excited);
        assert!((out.get(1, 1).re - (-0.4f64).exp()).abs() < 1e-13);
    }
}
