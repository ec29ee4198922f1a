//! Dense density matrices for mixed states under noise and purification.

use nalgebra::DMatrix;

use crate::error::{QcsError, Result};
use crate::state::{C64, Mat2, PauliString, Pauli, StateVector, ZERO};
use crate::{EIG_TOL, MAX_QUBITS, TOL};

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    elems: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let d = state.dim();
        let elems = DMatrix::from_fn(d, d, |r, c| state.amp(r) * state.amp(c).conj());
        Self {
            n_qubits: state.n_qubits(),
            elems,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QcsError::QubitCount {
                n: n_qubits,
                min: 1,
                max: MAX_QUBITS,
            });
        }
        let d = 1usize << n_qubits;
        let w = C64::new(1.0 / d as f64, 0.0);
        let elems = DMatrix::from_fn(d, d, |r, c| if r == c { w } else { ZERO });
        Ok(Self { n_qubits, elems })
    }

    pub fn from_elems(n_qubits: usize, elems: DMatrix<C64>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if elems.nrows() != d || elems.ncols() != d {
            return Err(QcsError::DimensionMismatch {
                left: elems.nrows(),
                right: d,
            });
        }
        Ok(Self { n_qubits, elems })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elems.nrows()
    }

    pub fn elems(&self) -> &DMatrix<C64> {
        &self.elems
    }

    pub fn elem(&self, r: usize, c: usize) -> C64 {
        self.elems[(r, c)]
    }

    pub fn trace(&self) -> C64 {
        self.elems.diagonal().sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            elems: &self.elems * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(QcsError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            elems: &self.elems + &other.elems,
        })
    }

    /// Symmetrize to suppress Hermiticity drift across channel compositions.
    pub fn hermitized(&self) -> Self {
        let adj = self.elems.adjoint();
        Self {
            n_qubits: self.n_qubits,
            elems: (&self.elems + adj) * C64::new(0.5, 0.0),
        }
    }

    /// Tensor product, `self` on the high bits.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(QcsError::QubitCount {
                n,
                min: 1,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits: n,
            elems: self.elems.kronecker(&other.elems),
        })
    }

    fn bit_shift(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(QcsError::IndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(self.n_qubits - qubit)
    }

    /// Conjugation by a single-qubit matrix: rho -> U_q rho U_q^dag.
    pub fn conjugate_mat2(&self, qubit: usize, u: &Mat2) -> Result<Self> {
        let shift = self.bit_shift(qubit)?;
        let mask = 1usize << shift;
        let d = self.dim();
        let mut m = self.elems.clone();
        // rows
        for c in 0..d {
            for r0 in 0..d {
                if r0 & mask != 0 {
                    continue;
                }
                let r1 = r0 | mask;
                let a0 = m[(r0, c)];
                let a1 = m[(r1, c)];
                m[(r0, c)] = u[0][0] * a0 + u[0][1] * a1;
                m[(r1, c)] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        // columns (conjugate)
        for r in 0..d {
            for c0 in 0..d {
                if c0 & mask != 0 {
                    continue;
                }
                let c1 = c0 | mask;
                let a0 = m[(r, c0)];
                let a1 = m[(r, c1)];
                m[(r, c0)] = u[0][0].conj() * a0 + u[0][1].conj() * a1;
                m[(r, c1)] = u[1][0].conj() * a0 + u[1][1].conj() * a1;
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            elems: m,
        })
    }

    /// Conjugation by CNOT(control -> target).
    pub fn conjugate_cnot(&self, control: usize, target: usize) -> Result<Self> {
        let cs = self.bit_shift(control)?;
        let ts = self.bit_shift(target)?;
        if control == target {
            return Err(QcsError::InvalidArgument(
                "cnot control equals target".to_string(),
            ));
        }
        let d = self.dim();
        let perm = |i: usize| {
            if (i >> cs) & 1 == 1 {
                i ^ (1 << ts)
            } else {
                i
            }
        };
        let elems = DMatrix::from_fn(d, d, |r, c| self.elems[(perm(r), perm(c))]);
        Ok(Self {
            n_qubits: self.n_qubits,
            elems,
        })
    }

    /// Project `qubit` onto computational outcome `bit`; returns the
    /// unnormalized post state and the outcome probability.
    pub fn project_z(&self, qubit: usize, bit: usize) -> Result<(Self, f64)> {
        let shift = self.bit_shift(qubit)?;
        let d = self.dim();
        let keep = |i: usize| (i >> shift) & 1 == bit;
        let elems = DMatrix::from_fn(d, d, |r, c| {
            if keep(r) && keep(c) {
                self.elems[(r, c)]
            } else {
                ZERO
            }
        });
        let post = Self {
            n_qubits: self.n_qubits,
            elems,
        };
        let prob = post.trace().re;
        Ok((post, prob))
    }

    /// Partial trace keeping the listed qubits (1-based, ascending output
    /// order). Traces out everything else.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QcsError::InvalidArgument("empty keep set".to_string()));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        for &q in &kept {
            self.bit_shift(q)?;
        }
        let kept_shifts: Vec<usize> = kept.iter().map(|&q| self.n_qubits - q).collect();
        let traced_shifts: Vec<usize> = (1..=self.n_qubits)
            .filter(|q| !kept.contains(q))
            .map(|q| self.n_qubits - q)
            .collect();
        let k = kept.len();
        let dk = 1usize << k;
        let de = 1usize << traced_shifts.len();
        let expand = |bits: usize, shifts: &[usize]| {
            // bits are ordered with the first listed qubit as the most
            // significant output bit.
            let mut idx = 0usize;
            for (pos, &s) in shifts.iter().enumerate() {
                if (bits >> (shifts.len() - 1 - pos)) & 1 == 1 {
                    idx |= 1 << s;
                }
            }
            idx
        };
        let mut out = DMatrix::from_element(dk, dk, ZERO);
        for a in 0..dk {
            let fa = expand(a, &kept_shifts);
            for b in 0..dk {
                let fb = expand(b, &kept_shifts);
                let mut acc = ZERO;
                for e in 0..de {
                    let fe = expand(e, &traced_shifts);
                    acc += self.elems[(fa | fe, fb | fe)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(Self {
            n_qubits: k,
            elems: out,
        })
    }

    /// tr(rho P) for a Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n_qubits() != self.n_qubits {
            return Err(QcsError::DimensionMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let mut acc = ZERO;
        for j in 0..self.dim() {
            let (m, c) = pauli_column(self.n_qubits, p, j);
            acc += c * self.elems[(j, m)];
        }
        Ok(acc.re)
    }

    /// <target|rho|target> for a pure target state.
    pub fn fidelity_with(&self, target: &StateVector) -> Result<f64> {
        if target.dim() != self.dim() {
            return Err(QcsError::DimensionMismatch {
                left: target.dim(),
                right: self.dim(),
            });
        }
        let mut acc = ZERO;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                acc += target.amp(r).conj() * self.elems[(r, c)] * target.amp(c);
            }
        }
        Ok(acc.re)
    }

    /// Eigenvalues via the real symmetric embedding [[Re, -Im], [Im, Re]].
    /// Each eigenvalue of rho appears twice in the embedding; the returned
    /// list is the full doubled spectrum, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::<f64>::from_fn(2 * d, 2 * d, |r, c| {
            let (rb, ri) = (r % d, r / d);
            let (cb, ci) = (c % d, c / d);
            let e = self.elems[(rb, cb)];
            match (ri, ci) {
                (0, 0) | (1, 1) => e.re,
                (0, 1) => -e.im,
                (1, 0) => e.im,
                _ => unreachable!(),
            }
        });
        let eig = m.symmetric_eigenvalues();
        let mut vals: Vec<f64> = eig.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Check the density-matrix invariants: Hermitian, unit trace,
    /// nonnegative spectrum.
    pub fn validate(&self) -> Result<()> {
        let adj = self.elems.adjoint();
        let herm_dev = (&self.elems - adj).iter().map(|e| e.norm()).fold(0.0, f64::max);
        if herm_dev > TOL {
            return Err(QcsError::Invariant(format!(
                "not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(QcsError::Invariant(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -EIG_TOL {
            return Err(QcsError::Invariant(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

/// For basis column j of Pauli string p: P|j> = coeff |target>.
fn pauli_column(n_qubits: usize, p: &PauliString, j: usize) -> (usize, C64) {
    let mut coeff = C64::new(1.0, 0.0);
    let mut target = j;
    for (pos, &letter) in p.letters().iter().enumerate() {
        let shift = n_qubits - 1 - pos;
        let bit = (j >> shift) & 1;
        match letter {
            Pauli::I => {}
            Pauli::X => target ^= 1 << shift,
            Pauli::Y => {
                target ^= 1 << shift;
                coeff *= if bit == 0 {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(0.0, -1.0)
                };
            }
            Pauli::Z => {
                if bit == 1 {
                    coeff = -coeff;
                }
            }
        }
    }
    (target, coeff)
}
