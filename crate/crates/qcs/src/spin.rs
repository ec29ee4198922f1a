//! Total-spin operators and singlet-state constructors.
//!
//! The singlet sector of n qubits is the simultaneous kernel of the total
//! spin operators; its dimension is the Catalan number C_{n/2}.

use nalgebra::{DMatrix, DVector};

use crate::error::{QcsError, Result};
use crate::rng::Rng;
use crate::state::{C64, StateVector, ZERO, I};
use crate::{MAX_QUBITS, SVD_CUT};
#[cfg(test)]
use crate::TOL;
use rand::Rng as _;

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Catalan number C_m = binomial(2m, m) / (m + 1).
pub fn catalan(half_n: u64) -> Result<u128> {
    if half_n > 30 {
        return Err(QcsError::InvalidArgument(format!(
            "catalan({half_n}) exceeds the supported range (<= 30)"
        )));
    }
    Ok(binomial(2 * half_n, half_n) / (half_n as u128 + 1))
}

#[derive(Clone, Copy, Debug)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// S^a |psi> with S^a = sum_q sigma^a_q / 2, computed without forming the
/// operator matrix. The result is generally unnormalized.
pub fn apply_spin(state: &StateVector, axis: Axis) -> StateVector {
    let n = state.n_qubits();
    let mut out = vec![ZERO; state.dim()];
    for (idx, &a) in state.amps().iter().enumerate() {
        if a == ZERO {
            continue;
        }
        for q in 0..n {
            let mask = 1usize << q;
            let bit = (idx & mask) != 0;
            match axis {
                Axis::X => out[idx ^ mask] += a * 0.5,
                Axis::Y => {
                    let c = if bit { -I } else { I };
                    out[idx ^ mask] += a * c * 0.5;
                }
                Axis::Z => {
                    let sign = if bit { -0.5 } else { 0.5 };
                    out[idx] += a * sign;
                }
            }
        }
    }
    StateVector::from_amps(n, out).expect("spin application preserves dimensions")
}

/// S^2 |psi> = sum_a S^a S^a |psi>.
pub fn apply_s2(state: &StateVector) -> StateVector {
    let mut out = vec![ZERO; state.dim()];
    for axis in AXES {
        let once = apply_spin(state, axis);
        let twice = apply_spin(&once, axis);
        for (o, t) in out.iter_mut().zip(twice.amps()) {
            *o += t;
        }
    }
    StateVector::from_amps(state.n_qubits(), out).expect("dimensions preserved")
}

/// <S^2> = sum_a ||S^a psi||^2; zero exactly on the singlet sector.
pub fn singlet_residual(state: &StateVector) -> f64 {
    AXES.iter()
        .map(|&a| apply_spin(state, a).norm_sqr())
        .sum()
}

/// Error unless the state is a singlet within `tol`.
pub fn require_singlet(state: &StateVector, tol: f64) -> Result<()> {
    let r = singlet_residual(state);
    if r > tol {
        Err(QcsError::NotSinglet { residual: r })
    } else {
        Ok(())
    }
}

/// Dense total-spin operator matrices.
pub struct SpinOperators {
    pub n_qubits: usize,
    pub sx: DMatrix<C64>,
    pub sy: DMatrix<C64>,
    pub sz: DMatrix<C64>,
    pub s2: DMatrix<C64>,
}

impl SpinOperators {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_even(n_qubits).ok(); // allow odd here; only range-checked
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QcsError::QubitCount {
                n: n_qubits,
                min: 1,
                max: MAX_QUBITS,
            });
        }
        let d = 1usize << n_qubits;
        let column = |f: &dyn Fn(&StateVector) -> StateVector, j: usize| {
            let basis = StateVector::basis_state(n_qubits, j).unwrap();
            DVector::from_vec(f(&basis).amps().to_vec())
        };
        let build = |f: &dyn Fn(&StateVector) -> StateVector| {
            let cols: Vec<_> = (0..d).map(|j| column(f, j)).collect();
            DMatrix::from_columns(&cols)
        };
        Ok(Self {
            n_qubits,
            sx: build(&|s| apply_spin(s, Axis::X)),
            sy: build(&|s| apply_spin(s, Axis::Y)),
            sz: build(&|s| apply_spin(s, Axis::Z)),
            s2: build(&apply_s2),
        })
    }
}

fn check_even(n: usize) -> Result<()> {
    if n % 2 != 0 {
        Err(QcsError::OddQubits { n })
    } else {
        Ok(())
    }
}

fn check_even_in_range(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(QcsError::QubitCount {
            n,
            min,
            max: MAX_QUBITS,
        });
    }
    check_even(n)
}

/// Symmetric superposition of all `m_qubits`-bit strings with exactly `k`
/// ones, normalized by the binomial count.
pub fn dicke_state(m_qubits: usize, k: usize) -> Result<StateVector> {
    if m_qubits == 0 || m_qubits > MAX_QUBITS {
        return Err(QcsError::QubitCount {
            n: m_qubits,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    if k > m_qubits {
        return Err(QcsError::IndexOutOfRange {
            index: k,
            n_qubits: m_qubits,
        });
    }
    let count = binomial(m_qubits as u64, k as u64) as f64;
    let w = C64::new(1.0 / count.sqrt(), 0.0);
    let mut amps = vec![ZERO; 1 << m_qubits];
    for (idx, a) in amps.iter_mut().enumerate() {
        if idx.count_ones() as usize == k {
            *a = w;
        }
    }
    StateVector::from_amps(m_qubits, amps)
}

/// The alternating-sign equal-weight coupling of two maximal-spin halves:
/// sum_k (-1)^k / sqrt(n/2+1) |D_k^{n/2}> (x) |D_{n/2-k}^{n/2}>.
pub fn supersinglet(n_qubits: usize) -> Result<StateVector> {
    check_even_in_range(n_qubits, 2)?;
    let h = n_qubits / 2;
    let norm = 1.0 / ((h as f64) + 1.0).sqrt();
    let mut amps = vec![ZERO; 1 << n_qubits];
    for hi in 0..1usize << h {
        let k = hi.count_ones() as usize;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w_hi = (binomial(h as u64, k as u64) as f64).sqrt();
        let w_lo = (binomial(h as u64, (h - k) as u64) as f64).sqrt();
        let coeff = C64::new(sign * norm / (w_hi * w_lo), 0.0);
        for lo in 0..1usize << h {
            if lo.count_ones() as usize == h - k {
                amps[(hi << h) | lo] = coeff;
            }
        }
    }
    StateVector::from_amps(n_qubits, amps)
}

/// The same state written as a single sum over balanced bit strings,
/// weighted by k1! (n/2 - k1)! where k1 counts ones in the first half.
pub fn supersinglet_permutation_form(n_qubits: usize) -> Result<StateVector> {
    check_even_in_range(n_qubits, 2)?;
    let h = n_qubits / 2;
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    let norm = 1.0 / (fact(h) * ((h as f64) + 1.0).sqrt());
    let mut amps = vec![ZERO; 1 << n_qubits];
    for (idx, a) in amps.iter_mut().enumerate() {
        if idx.count_ones() as usize != h {
            continue;
        }
        let k1 = (idx >> h).count_ones() as usize;
        let sign = if k1 % 2 == 0 { 1.0 } else { -1.0 };
        *a = C64::new(sign * norm * fact(k1) * fact(h - k1), 0.0);
    }
    StateVector::from_amps(n_qubits, amps)
}

/// Orthonormal basis of the singlet sector.
pub struct SingletBasis {
    pub n_qubits: usize,
    pub vectors: Vec<StateVector>,
}

impl SingletBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Numeric null-space extraction for the simultaneous kernel of S^2 and
/// Sz. Both operators are real in the computational basis, so the problem
/// stays in real arithmetic.
pub fn singlet_subspace(n_qubits: usize) -> Result<SingletBasis> {
    check_even_in_range(n_qubits, 2)?;
    let d = 1usize << n_qubits;
    // Stack the actions of S^2 and Sz on the basis columns.
    let mut stacked = DMatrix::<f64>::zeros(2 * d, d);
    for j in 0..d {
        let basis = StateVector::basis_state(n_qubits, j)?;
        let s2 = apply_s2(&basis);
        let sz = apply_spin(&basis, Axis::Z);
        for r in 0..d {
            stacked[(r, j)] = s2.amp(r).re;
            stacked[(d + r, j)] = sz.amp(r).re;
        }
    }
    let svd = stacked.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| QcsError::InvalidArgument("SVD without V^T".to_string()))?;
    let mut vectors = Vec::new();
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        // Ambiguous rank: a singular value in the decade around the cutoff
        // is neither clearly zero nor clearly part of the range.
        if sv > SVD_CUT / 10.0 && sv < SVD_CUT * 10.0 {
            let margin = (sv - SVD_CUT).abs();
            return Err(QcsError::RankAmbiguity {
                value: sv,
                cutoff: SVD_CUT,
                margin,
            });
        }
        if sv < SVD_CUT {
            let amps: Vec<C64> = v_t.row(i).iter().map(|&x| C64::new(x, 0.0)).collect();
            vectors.push(StateVector::from_amps(n_qubits, amps)?.normalized()?);
        }
    }
    let expected = catalan((n_qubits / 2) as u64)? as usize;
    if vectors.len() != expected {
        return Err(QcsError::Invariant(format!(
            "singlet sector dimension {} differs from expected {expected}",
            vectors.len()
        )));
    }
    Ok(SingletBasis { n_qubits, vectors })
}

/// A normalized random complex combination of singlet-basis vectors.
pub fn random_singlet_from(basis: &SingletBasis, rng: &mut Rng) -> StateVector {
    let dim = 1usize << basis.n_qubits;
    let mut amps = vec![ZERO; dim];
    for v in &basis.vectors {
        let c = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        for (a, &b) in amps.iter_mut().zip(v.amps()) {
            *a += c * b;
        }
    }
    StateVector::from_amps(basis.n_qubits, amps)
        .expect("dimensions preserved")
        .normalized()
        .expect("generic combination has nonzero norm")
}

pub fn random_singlet(n_qubits: usize, rng: &mut Rng) -> Result<StateVector> {
    let basis = singlet_subspace(n_qubits)?;
    Ok(random_singlet_from(&basis, rng))
}

/// Indices of balanced (weight n/2) bit strings, ascending.
fn balanced_indices(n_qubits: usize) -> Vec<usize> {
    (0..1usize << n_qubits)
        .filter(|i| i.count_ones() as usize == n_qubits / 2)
        .collect()
}

/// Singlet whose balanced-weight amplitudes all share modulus
/// 1/sqrt(binomial(n, n/2)), with phases solving the local consistency
/// relations: for every weight-(n/2+1) string, the phases of its adjacent
/// balanced strings (one bit lowered) sum to zero as unit complex numbers.
///
/// Solutions are non-unique; any phase assignment satisfying the
/// constraints is returned, chosen by the random initialization.
pub fn homogeneous_singlet(n_qubits: usize, rng: &mut Rng) -> Result<StateVector> {
    check_even_in_range(n_qubits, 2)?;
    let balanced = balanced_indices(n_qubits);
    let pos: std::collections::HashMap<usize, usize> = balanced
        .iter()
        .enumerate()
        .map(|(p, &idx)| (idx, p))
        .collect();
    // One constraint per weight-(n/2 + 1) string: the balanced neighbors
    // reached by clearing one set bit.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for tau in 0..1usize << n_qubits {
        if tau.count_ones() as usize != n_qubits / 2 + 1 {
            continue;
        }
        let members = (0..n_qubits)
            .filter(|b| tau & (1 << b) != 0)
            .map(|b| pos[&(tau & !(1 << b))])
            .collect();
        groups.push(members);
    }
    let n_vars = balanced.len();
    let residual = |phases: &[f64], out: &mut Vec<f64>| {
        out.clear();
        for g in &groups {
            let (mut re, mut im) = (0.0, 0.0);
            for &p in g {
                re += phases[p].cos();
                im += phases[p].sin();
            }
            out.push(re);
            out.push(im);
        }
    };
    let n_res = 2 * groups.len();
    let max_restarts = 50;
    let mut best_norm = f64::INFINITY;
    for _ in 0..max_restarts {
        let mut phases: Vec<f64> =
            (0..n_vars).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let mut r = Vec::with_capacity(n_res);
        let mut lambda = 1e-3;
        residual(&phases, &mut r);
        let mut norm: f64 = r.iter().map(|x| x * x).sum();
        for _ in 0..400 {
            if norm < 1e-22 {
                break;
            }
            // Analytic Jacobian: d/d phase_p of (cos, sin) terms.
            let mut jac = DMatrix::<f64>::zeros(n_res, n_vars);
            for (gi, g) in groups.iter().enumerate() {
                for &p in g {
                    jac[(2 * gi, p)] += -phases[p].sin();
                    jac[(2 * gi + 1, p)] += phases[p].cos();
                }
            }
            let rv = DVector::from_vec(r.clone());
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * &rv;
            // Levenberg-Marquardt step with adaptive damping.
            let mut stepped = false;
            for _ in 0..12 {
                let damped = &jtj + DMatrix::identity(n_vars, n_vars) * lambda;
                let Some(chol) = damped.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let delta = chol.solve(&g);
                let trial: Vec<f64> = phases
                    .iter()
                    .zip(delta.iter())
                    .map(|(p, d)| p - d)
                    .collect();
                let mut tr = Vec::with_capacity(n_res);
                residual(&trial, &mut tr);
                let tnorm: f64 = tr.iter().map(|x| x * x).sum();
                if tnorm < norm {
                    phases = trial;
                    r = tr;
                    norm = tnorm;
                    lambda = (lambda * 0.3).max(1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !stepped {
                break;
            }
        }
        best_norm = best_norm.min(norm);
        if norm.sqrt() < 1e-9 {
            let w = 1.0 / (n_vars as f64).sqrt();
            let mut amps = vec![ZERO; 1 << n_qubits];
            for (&idx, &phi) in balanced.iter().zip(phases.iter()) {
                amps[idx] = C64::from_polar(w, phi);
            }
            return StateVector::from_amps(n_qubits, amps)?.normalized();
        }
    }
    Err(QcsError::SolverFailure {
        restarts: max_restarts,
        residual: best_norm.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Pauli, PauliString};
    use approx::assert_abs_diff_eq;

    #[test]
    fn catalan_values() {
        let want = [1u128, 1, 2, 5, 14, 42];
        for (m, &w) in want.iter().enumerate() {
            assert_eq!(catalan(m as u64).unwrap(), w);
        }
    }

    #[test]
    fn dicke_two_one() {
        let d = dicke_state(2, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(d.amp(0b01).re, s, epsilon = TOL);
        assert_abs_diff_eq!(d.amp(0b10).re, s, epsilon = TOL);
        assert_abs_diff_eq!(d.amp(0b00).norm(), 0.0, epsilon = TOL);
    }

    #[test]
    fn dicke_four_two_amplitudes() {
        let d = dicke_state(4, 2).unwrap();
        let w = 1.0 / 6f64.sqrt();
        let mut hits = 0;
        for i in 0..16usize {
            if i.count_ones() == 2 {
                assert_abs_diff_eq!(d.amp(i).re, w, epsilon = TOL);
                hits += 1;
            } else {
                assert_abs_diff_eq!(d.amp(i).norm(), 0.0, epsilon = TOL);
            }
        }
        assert_eq!(hits, 6);
    }

    #[test]
    fn dicke_zero_excitations_is_all_zeros() {
        let d = dicke_state(3, 0).unwrap();
        assert_abs_diff_eq!(d.amp(0).re, 1.0, epsilon = TOL);
    }

    #[test]
    fn dicke_matches_lowering_operator_oracle() {
        // |D_k^m> is proportional to (sum_q |1><0|_q)^k |0...0>.
        for m in 2..=5usize {
            for k in 0..=m {
                let mut cur = StateVector::zero_state(m).unwrap();
                for _ in 0..k {
                    let mut amps = vec![ZERO; 1 << m];
                    for (idx, &a) in cur.amps().iter().enumerate() {
                        if a == ZERO {
                            continue;
                        }
                        for q in 0..m {
                            let mask = 1usize << q;
                            if idx & mask == 0 {
                                amps[idx | mask] += a;
                            }
                        }
                    }
                    cur = StateVector::from_amps(m, amps).unwrap().normalized().unwrap();
                }
                let d = dicke_state(m, k).unwrap();
                assert_abs_diff_eq!(cur.overlap_modulus(&d).unwrap(), 1.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn dicke_sz_eigenvalue() {
        let d = dicke_state(4, 1).unwrap();
        let sz = apply_spin(&d, Axis::Z);
        // eigenvalue (m - 2k)/2 = 1
        assert_abs_diff_eq!(d.inner(&sz).unwrap().re, 1.0, epsilon = TOL);
        assert_abs_diff_eq!(sz.norm_sqr(), 1.0, epsilon = TOL);
    }

    #[test]
    fn supersinglet_two_is_bell_singlet() {
        let s = supersinglet(2).unwrap();
        let bell = StateVector::from_amps(
            2,
            vec![
                ZERO,
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ZERO,
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(s.overlap_modulus(&bell).unwrap(), 1.0, epsilon = TOL);
    }

    #[test]
    fn supersinglet_four_amplitudes() {
        let s = supersinglet(4).unwrap();
        let a = 1.0 / 3f64.sqrt();
        let b = -1.0 / (2.0 * 3f64.sqrt());
        for i in 0..16usize {
            let want = match i {
                0b0011 | 0b1100 => a,
                0b0101 | 0b0110 | 0b1001 | 0b1010 => b,
                _ => 0.0,
            };
            assert_abs_diff_eq!(s.amp(i).re, want, epsilon = TOL);
            assert_abs_diff_eq!(s.amp(i).im, 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn supersinglet_is_annihilated_by_spin() {
        for n in [2usize, 4, 6] {
            let s = supersinglet(n).unwrap();
            assert!(singlet_residual(&s) < TOL);
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = TOL);
        }
    }

    #[test]
    fn supersinglet_rejects_odd_or_out_of_range() {
        assert!(supersinglet(3).is_err());
        assert!(supersinglet(0).is_err());
        assert!(supersinglet(14).is_err());
    }

    #[test]
    fn permutation_form_matches_direct_construction() {
        for n in [2usize, 4, 6] {
            let a = supersinglet(n).unwrap();
            let b = supersinglet_permutation_form(n).unwrap();
            assert_abs_diff_eq!(a.overlap_modulus(&b).unwrap(), 1.0, epsilon = TOL);
            assert_abs_diff_eq!(b.norm_sqr(), 1.0, epsilon = TOL);
        }
    }

    #[test]
    fn spin_operator_commutators() {
        let ops = SpinOperators::new(3).unwrap();
        let comm = &ops.sx * &ops.sy - &ops.sy * &ops.sx;
        let target = &ops.sz * I;
        let dev = (&comm - &target).iter().map(|e| e.norm()).fold(0.0, f64::max);
        assert!(dev < TOL);
        let c2 = &ops.s2 * &ops.sz - &ops.sz * &ops.s2;
        let dev2 = c2.iter().map(|e| e.norm()).fold(0.0, f64::max);
        assert!(dev2 < TOL);
    }

    #[test]
    fn singlet_subspace_dimensions_small() {
        assert_eq!(singlet_subspace(2).unwrap().dim(), 1);
        assert_eq!(singlet_subspace(4).unwrap().dim(), 2);
    }

    #[test]
    fn singlet_subspace_vectors_are_singlets_and_orthonormal() {
        let basis = singlet_subspace(4).unwrap();
        for (i, v) in basis.vectors.iter().enumerate() {
            assert!(singlet_residual(v) < crate::EIG_TOL);
            for (j, w) in basis.vectors.iter().enumerate() {
                let ip = v.inner(w).unwrap().norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ip, want, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn random_singlet_properties() {
        let mut rng = crate::rng::master(3);
        let basis = singlet_subspace(4).unwrap();
        for _ in 0..10 {
            let s = random_singlet_from(&basis, &mut rng);
            assert!(singlet_residual(&s) < crate::EIG_TOL);
            // sum rule over Z1Zn
            let mut sum = 0.0;
            for n in 2..=4 {
                let zz = PauliString::two(4, 1, Pauli::Z, n, Pauli::Z).unwrap();
                let v = s.expectation(&zz).unwrap();
                assert!(v >= -1.0 - 1e-9 && v <= 1.0 / 3.0 + 1e-9);
                sum += v;
            }
            assert_abs_diff_eq!(sum, -1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn singlet_correlation_identities() {
        let mut rng = crate::rng::master(5);
        let s = random_singlet(4, &mut rng).unwrap();
        for n in 1..=4usize {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let op = PauliString::single(4, n, p).unwrap();
                assert_abs_diff_eq!(s.expectation(&op).unwrap(), 0.0, epsilon = TOL);
            }
        }
        for n in 2..=4usize {
            let zz = PauliString::two(4, 1, Pauli::Z, n, Pauli::Z).unwrap();
            let xx = PauliString::two(4, 1, Pauli::X, n, Pauli::X).unwrap();
            let yy = PauliString::two(4, 1, Pauli::Y, n, Pauli::Y).unwrap();
            let xz = PauliString::two(4, 1, Pauli::X, n, Pauli::Z).unwrap();
            let z = s.expectation(&zz).unwrap();
            assert_abs_diff_eq!(s.expectation(&xx).unwrap(), z, epsilon = TOL);
            assert_abs_diff_eq!(s.expectation(&yy).unwrap(), z, epsilon = TOL);
            assert_abs_diff_eq!(s.expectation(&xz).unwrap(), 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn homogeneous_singlet_two_qubits() {
        let mut rng = crate::rng::master(1);
        let s = homogeneous_singlet(2, &mut rng).unwrap();
        assert!(singlet_residual(&s) < 1e-8);
        let w = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amp(0b01).norm(), w, epsilon = 1e-8);
        assert_abs_diff_eq!(s.amp(0b10).norm(), w, epsilon = 1e-8);
    }

    #[test]
    fn homogeneous_singlet_four_qubits() {
        let mut rng = crate::rng::master(2);
        let s = homogeneous_singlet(4, &mut rng).unwrap();
        assert!(singlet_residual(&s) < 1e-8);
        let w = 1.0 / 6f64.sqrt();
        for i in 0..16usize {
            if i.count_ones() == 2 {
                assert_abs_diff_eq!(s.amp(i).norm(), w, epsilon = 1e-7);
            } else {
                assert_abs_diff_eq!(s.amp(i).norm(), 0.0, epsilon = TOL);
            }
        }
        // every party's correlation with qubit 1 is the same, -1/3
        for n in 2..=4 {
            let zz = PauliString::two(4, 1, Pauli::Z, n, Pauli::Z).unwrap();
            assert_abs_diff_eq!(s.expectation(&zz).unwrap(), -1.0 / 3.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn supersinglet_rotation_invariance() {
        use crate::state::{hadamard, Mat2};
        let s = supersinglet(4).unwrap();
        let h = hadamard();
        let rot = s.apply_global_rotation(&h).unwrap();
        assert_abs_diff_eq!(s.overlap_modulus(&rot).unwrap(), 1.0, epsilon = TOL);
        // a non-trivial unitary too
        let (c, sn) = (0.8f64, 0.6f64);
        let u: Mat2 = [
            [C64::new(c, 0.0), C64::new(0.0, -sn)],
            [C64::new(0.0, -sn), C64::new(c, 0.0)],
        ];
        let rot2 = s.apply_global_rotation(&u).unwrap();
        assert_abs_diff_eq!(s.overlap_modulus(&rot2).unwrap(), 1.0, epsilon = TOL);
    }
}
