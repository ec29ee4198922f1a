//! Independent per-qubit dephasing, the worst-case systematic Z rotation,
//! and fidelity helpers.

use crate::density::DensityMatrix;
use crate::error::{QcsError, Result};
use crate::protocol::{amplitude_correlation, AmplitudeTable};
use crate::spin::supersinglet;
use crate::state::{Pauli, PauliString, StateVector, PAULI_Z};
#[cfg(test)]
use crate::TOL;

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        Err(QcsError::InvalidArgument(format!(
            "phase-flip probability {p} outside [0, 1]"
        )))
    } else {
        Ok(())
    }
}

/// Apply the phase-flip channel rho -> (1-p) rho + p Z rho Z independently
/// to every qubit.
pub fn dephase(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let mut out = rho.clone();
    for q in 1..=rho.n_qubits() {
        let flipped = out.conjugate_mat2(q, &PAULI_Z)?;
        out = out.scale(1.0 - p).add(&flipped.scale(p))?;
    }
    Ok(out.hermitized())
}

/// Signal amplitudes tr(rho X_1 X_n) of the dephased canonical singlet.
pub fn dephased_amplitudes(n_qubits: usize, p: f64) -> Result<AmplitudeTable> {
    check_probability(p)?;
    if n_qubits % 2 != 0 {
        return Err(QcsError::OddQubits { n: n_qubits });
    }
    if n_qubits < 4 {
        return Err(QcsError::QubitCount {
            n: n_qubits,
            min: 4,
            max: crate::MAX_QUBITS,
        });
    }
    let s = supersinglet(n_qubits)?;
    let rho = dephase(&DensityMatrix::from_pure(&s), p)?;
    let clean = amplitude_correlation(&s)?;
    let mut table = clean;
    for e in &mut table.entries {
        let xx = PauliString::two(n_qubits, 1, Pauli::X, e.party, Pauli::X)?;
        e.amplitude = rho.expectation(&xx)?;
    }
    Ok(table)
}

/// The worst systematic error at a given fidelity: a relative Z rotation
/// of Alice's qubit, exp(-i epsilon Z_1) |S>. Fidelity to the input is
/// cos^2(epsilon) and the signal shifts as omega t -> omega t - 2 epsilon.
pub fn preskill_worst_case(singlet: &StateVector, epsilon: f64) -> Result<StateVector> {
    crate::spin::require_singlet(singlet, 1e-8)?;
    // exp(-i eps Z) = exp(i phi Z / 2) with phi = -2 eps
    singlet.apply_single_qubit(1, &crate::state::z_rotation(-2.0 * epsilon))
}

/// <target| rho |target> for a pure target.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    rho.fidelity_with(target)
}

/// |<a|b>|^2 for pure states.
pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.overlap_modulus(b)?.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_strength_is_identity() {
        let s = supersinglet(4).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        let out = dephase(&rho, 0.0).unwrap();
        let dev = (out.elems() - rho.elems())
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        assert!(dev < TOL);
    }

    #[test]
    fn full_strength_is_all_z_conjugation() {
        let s = supersinglet(4).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        let out = dephase(&rho, 1.0).unwrap();
        let mut zrho = rho.clone();
        for q in 1..=4 {
            zrho = zrho.conjugate_mat2(q, &PAULI_Z).unwrap();
        }
        let dev = (out.elems() - zrho.elems())
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        assert!(dev < TOL);
    }

    #[test]
    fn half_strength_kills_off_diagonals() {
        let s = supersinglet(4).unwrap();
        let out = dephase(&DensityMatrix::from_pure(&s), 0.5).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                if r != c {
                    assert_abs_diff_eq!(out.elem(r, c).norm(), 0.0, epsilon = TOL);
                }
            }
        }
        out.validate().unwrap();
    }

    #[test]
    fn dephased_amplitude_scaling() {
        // X1 Xn picks up a factor (1-2p) from each of the two qubits.
        for p in [0.1, 0.2, 0.35] {
            let table = dephased_amplitudes(4, p).unwrap();
            let clean = crate::protocol::amplitude_closed_form(4).unwrap();
            let scale = (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
            for (e, c) in table.entries.iter().zip(&clean.entries) {
                assert_abs_diff_eq!(e.amplitude, c.amplitude * scale, epsilon = TOL);
            }
        }
    }

    #[test]
    fn dephased_amplitudes_vanish_at_half() {
        let table = dephased_amplitudes(4, 0.5).unwrap();
        for e in &table.entries {
            assert_abs_diff_eq!(e.amplitude, 0.0, epsilon = TOL);
        }
    }

    #[test]
    fn group_one_is_invariant_across_sizes() {
        for p in [0.1, 0.3] {
            let a4 = dephased_amplitudes(4, p).unwrap().amplitude(2).unwrap();
            let a6 = dephased_amplitudes(6, p).unwrap().amplitude(2).unwrap();
            let a8 = dephased_amplitudes(8, p).unwrap().amplitude(2).unwrap();
            assert_abs_diff_eq!(a4, a6, epsilon = TOL);
            assert_abs_diff_eq!(a6, a8, epsilon = TOL);
        }
    }

    #[test]
    fn amplitudes_symmetric_in_p() {
        let a = dephased_amplitudes(4, 0.2).unwrap();
        let b = dephased_amplitudes(4, 0.8).unwrap();
        assert!(a.max_deviation(&b) < TOL);
    }

    #[test]
    fn worst_case_fidelity_and_signal_offset() {
        let s = supersinglet(4).unwrap();
        for eps in [0.0, 0.3, 0.9] {
            let rotated = preskill_worst_case(&s, eps).unwrap();
            assert_abs_diff_eq!(
                fidelity_pure(&rotated, &s).unwrap(),
                eps.cos().powi(2),
                epsilon = TOL
            );
        }
    }

    #[test]
    fn channel_preserves_validity_on_random_states() {
        let mut rng = crate::rng::master(31);
        let basis = crate::spin::singlet_subspace(4).unwrap();
        for _ in 0..10 {
            let s = crate::spin::random_singlet_from(&basis, &mut rng);
            let out = dephase(&DensityMatrix::from_pure(&s), 0.23).unwrap();
            out.validate().unwrap();
        }
    }

    #[test]
    fn bad_probability_rejected() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(dephase(&rho, -0.1).is_err());
        assert!(dephase(&rho, 1.1).is_err());
    }
}
