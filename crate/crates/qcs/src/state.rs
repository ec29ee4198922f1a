//! Dense complex state vectors over 1..=12 qubits.
//!
//! Basis convention: qubit 1 (Alice) is the most significant bit of the
//! computational basis index, so `|q1 q2 ... qn>` maps to the integer with
//! q1 in the top bit.

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{QcsError, Result};
use crate::{MAX_QUBITS, TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// 2x2 matrix in row-major order: `u[row][col]`.
pub type Mat2 = [[C64; 2]; 2];

pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
pub const IDENTITY2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Hadamard, mapping the z basis to the x basis.
pub fn hadamard() -> Mat2 {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

/// exp(i * phi * Z / 2) = diag(e^{i phi/2}, e^{-i phi/2}).
pub fn z_rotation(phi: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, phi / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, -phi / 2.0)],
    ]
}

pub fn mat2_is_unitary(u: &Mat2, tol: f64) -> bool {
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let mut e = ZERO;
            for k in 0..2 {
                e += u[k][r].conj() * u[k][c];
            }
            let target = if r == c { ONE } else { ZERO };
            dev = dev.max((e - target).norm());
        }
    }
    dev <= tol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A tensor product of single-qubit Pauli operators, one letter per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// A single Pauli letter on `qubit` (1-based), identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        s.set(qubit, p)?;
        Ok(s)
    }

    /// Two Pauli letters on distinct qubits.
    pub fn two(n_qubits: usize, q1: usize, p1: Pauli, q2: usize, p2: Pauli) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        s.set(q1, p1)?;
        s.set(q2, p2)?;
        Ok(s)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) -> Result<()> {
        if qubit == 0 || qubit > self.letters.len() {
            return Err(QcsError::IndexOutOfRange {
                index: qubit,
                n_qubits: self.letters.len(),
            });
        }
        self.letters[qubit - 1] = p;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }
}

#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n_qubits: usize,
    amps: Vec<[f64; 2]>,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// A computational basis state with the given index.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(QcsError::IndexOutOfRange {
                index,
                n_qubits,
            });
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Build from raw amplitudes; rejects NaN/Inf and wrong dimensions.
    pub fn from_amps(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(QcsError::DimensionMismatch {
                left: amps.len(),
                right: 1 << n_qubits,
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QcsError::InvalidArgument(
                "non-finite amplitude".to_string(),
            ));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    /// Bit shift of `qubit` (1-based, qubit 1 = most significant).
    pub fn bit_shift(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(QcsError::IndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(self.n_qubits - qubit)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= 0.0 {
            return Err(QcsError::ZeroProbability);
        }
        let amps = self.amps.iter().map(|a| a / n).collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(QcsError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|, for comparisons modulo global phase.
    pub fn overlap_modulus(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Apply a 2x2 unitary to a single qubit.
    pub fn apply_single_qubit(&self, qubit: usize, u: &Mat2) -> Result<Self> {
        if !mat2_is_unitary(u, TOL) {
            return Err(QcsError::NonUnitary { deviation: TOL });
        }
        Ok(self.apply_mat2_unchecked(qubit, u)?)
    }

    /// Apply a 2x2 matrix to a single qubit without a unitarity check
    /// (used for projectors and internal routines).
    pub fn apply_mat2_unchecked(&self, qubit: usize, u: &Mat2) -> Result<Self> {
        let shift = self.bit_shift(qubit)?;
        let mask = 1usize << shift;
        let mut amps = self.amps.clone();
        for i0 in 0..self.dim() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            amps[i0] = u[0][0] * a0 + u[0][1] * a1;
            amps[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// Apply the same 2x2 unitary to every qubit (U^{tensor N}).
    pub fn apply_global_rotation(&self, u: &Mat2) -> Result<Self> {
        if !mat2_is_unitary(u, TOL) {
            return Err(QcsError::NonUnitary { deviation: TOL });
        }
        let mut s = self.clone();
        for q in 1..=self.n_qubits {
            s = s.apply_mat2_unchecked(q, u)?;
        }
        Ok(s)
    }

    /// P|self> for a Pauli string.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        if p.n_qubits() != self.n_qubits {
            return Err(QcsError::DimensionMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let mut amps = vec![ZERO; self.dim()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let mut coeff = ONE;
            let mut target = idx;
            for (pos, &letter) in p.letters().iter().enumerate() {
                let shift = self.n_qubits - 1 - pos;
                let bit = (idx >> shift) & 1;
                match letter {
                    Pauli::I => {}
                    Pauli::X => target ^= 1 << shift,
                    Pauli::Y => {
                        target ^= 1 << shift;
                        coeff *= if bit == 0 { I } else { -I };
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            coeff = -coeff;
                        }
                    }
                }
            }
            amps[target] += coeff * a;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// <self|P|self>, real for Hermitian P.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let applied = self.apply_pauli(p)?;
        Ok(self.inner(&applied)?.re)
    }

    /// Project `qubit` onto `outcome_vector` (which must be normalized).
    /// Returns the unnormalized post state and the outcome probability.
    pub fn project(&self, qubit: usize, outcome_vector: &[C64; 2]) -> Result<(Self, f64)> {
        let vnorm = outcome_vector[0].norm_sqr() + outcome_vector[1].norm_sqr();
        if (vnorm - 1.0).abs() > 1e-8 {
            return Err(QcsError::InvalidArgument(
                "outcome vector not normalized".to_string(),
            ));
        }
        let v0 = outcome_vector[0];
        let v1 = outcome_vector[1];
        // |v><v| as a 2x2 matrix.
        let proj: Mat2 = [
            [v0 * v0.conj(), v0 * v1.conj()],
            [v1 * v0.conj(), v1 * v1.conj()],
        ];
        let post = self.apply_mat2_unchecked(qubit, &proj)?;
        let prob = post.norm_sqr();
        Ok((post, prob))
    }

    /// Measure `qubit` in the orthonormal 2-frame `basis`, sampling the
    /// outcome with Born probabilities. Returns (outcome index, normalized
    /// post state, outcome probability).
    pub fn measure(
        &self,
        qubit: usize,
        basis: &[[C64; 2]; 2],
        rng: &mut crate::rng::Rng,
    ) -> Result<(usize, Self, f64)> {
        let ortho = basis[0][0].conj() * basis[1][0] + basis[0][1].conj() * basis[1][1];
        if ortho.norm() > 1e-8 {
            return Err(QcsError::InvalidArgument(
                "measurement basis not orthogonal".to_string(),
            ));
        }
        let (post0, p0) = self.project(qubit, &basis[0])?;
        let r: f64 = rng.random();
        if r < p0 {
            Ok((0, post0.normalized()?, p0))
        } else {
            let (post1, p1) = self.project(qubit, &basis[1])?;
            Ok((1, post1.normalized()?, p1))
        }
    }

    /// Free evolution under H = (hbar omega / 2) sum_n Z_n for time `t`.
    /// Each basis amplitude picks up exp(-i omega t (n0 - n1) / 2).
    pub fn evolve(&self, t: f64, omega: f64) -> Self {
        let n = self.n_qubits as i32;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let ones = idx.count_ones() as i32;
                let weight = (n - 2 * ones) as f64;
                a * C64::from_polar(1.0, -omega * t * weight / 2.0)
            })
            .collect();
        Self {
            n_qubits: self.n_qubits,
            amps,
        }
    }

    /// Bitstring label of a basis index, qubit 1 first.
    pub fn basis_label(&self, index: usize) -> String {
        (0..self.n_qubits)
            .map(|q| {
                let shift = self.n_qubits - 1 - q;
                if (index >> shift) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let j = StateJson {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        Ok(serde_json::to_string(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(text)?;
        Self::from_amps(
            j.n_qubits,
            j.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        )
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(QcsError::QubitCount {
            n,
            min: 1,
            max: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// The X measurement basis { |+>, |-> }.
pub fn x_basis() -> [[C64; 2]; 2] {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}
