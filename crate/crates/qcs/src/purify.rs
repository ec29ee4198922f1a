//! Bell-pair purification under an uncontrolled relative Z phase, the
//! wrong-sector check, and the idealized singlet-subspace projection used
//! in place of the full multiparty distillation step.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{QcsError, Result};
use crate::rng::Rng;
use crate::spin::SingletBasis;
use crate::state::{z_rotation, C64, Mat2, StateVector, ZERO};
use crate::TOL;
use rand::Rng as _;

const SQ: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn bell(amps: [(usize, f64); 2]) -> StateVector {
    let mut v = vec![ZERO; 4];
    for (i, a) in amps {
        v[i] = C64::new(a, 0.0);
    }
    StateVector::from_amps(2, v).unwrap()
}

pub fn psi_minus() -> StateVector {
    bell([(0b01, SQ), (0b10, -SQ)])
}

pub fn psi_plus() -> StateVector {
    bell([(0b01, SQ), (0b10, SQ)])
}

pub fn phi_plus() -> StateVector {
    bell([(0b00, SQ), (0b11, SQ)])
}

pub fn phi_minus() -> StateVector {
    bell([(0b00, SQ), (0b11, -SQ)])
}

/// Mixture of the four Bell projectors, ordered
/// (psi_minus, phi_plus, phi_minus, psi_plus).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BellDiagonalState {
    pub weights: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < -TOL) || (sum - 1.0).abs() > TOL {
            return Err(QcsError::InvalidArgument(format!(
                "invalid Bell weights {weights:?} (sum {sum})"
            )));
        }
        Ok(Self { weights })
    }

    /// Werner state with the given singlet fidelity:
    /// F |psi-><psi-| + (1-F) I/4 restricted to Bell weights.
    pub fn werner(fidelity: f64) -> Result<Self> {
        let rest = (1.0 - fidelity) / 3.0;
        Self::new([fidelity, rest, rest, rest])
    }

    pub fn fidelity(&self) -> f64 {
        self.weights[0]
    }

    /// <Z1 Z2>: +1 on the phi states, -1 on the psi states.
    pub fn zz(&self) -> f64 {
        let [a, b, c, d] = self.weights;
        -a + b + c - d
    }

    pub fn to_density(&self) -> DensityMatrix {
        let states = [psi_minus(), phi_plus(), phi_minus(), psi_plus()];
        let mut m = DMatrix::from_element(4, 4, ZERO);
        for (w, s) in self.weights.iter().zip(&states) {
            let p = DensityMatrix::from_pure(s);
            m += p.elems() * C64::new(*w, 0.0);
        }
        DensityMatrix::from_elems(2, m).unwrap()
    }

    /// Conjugation by Z on qubit 1: swaps each psi with the matching phi
    /// sector partner.
    pub fn sector_flip(&self) -> Self {
        let [a, b, c, d] = self.weights;
        // Z1 maps psi- <-> psi+ ... check: Z1|psi-> = (|01> + |10>)/sqrt2 = psi+
        // Z1|phi+> = (|00> - |11>)/sqrt2 = phi-
        Self {
            weights: [d, c, b, a],
        }
    }
}

/// Record of one purification sequence at a fixed input phase.
#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub fidelity: f64,
    pub success_prob: f64,
    pub zz: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PurificationTrace {
    pub phi: f64,
    pub rounds: Vec<RoundRecord>,
}

/// The phase-offset pair exp(i phi Z1 / 2) |psi-> as a density matrix;
/// its singlet fidelity is cos^2(phi/2).
pub fn preskill_input(phi: f64) -> DensityMatrix {
    let rotated = psi_minus()
        .apply_single_qubit(1, &z_rotation(phi))
        .expect("rotation is unitary");
    DensityMatrix::from_pure(&rotated)
}

/// Exact Bell-basis diagonal extraction; equivalent to averaging over
/// identical local rotations on both qubits, and preserves each Bell
/// fidelity exactly.
pub fn bell_twirl(rho: &DensityMatrix) -> Result<BellDiagonalState> {
    if rho.dim() != 4 {
        return Err(QcsError::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let states = [psi_minus(), phi_plus(), phi_minus(), psi_plus()];
    let mut weights = [0.0; 4];
    for (w, s) in weights.iter_mut().zip(&states) {
        *w = rho.fidelity_with(s)?;
    }
    BellDiagonalState::new(weights)
}

/// exp(-i theta X / 2).
fn x_rotation(theta: f64) -> Mat2 {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    [[c, s], [s, c]]
}

/// One purification round simulated on the full two-pair density matrix:
/// bilateral X rotations (opposite senses on the two sides), transversal
/// CNOTs onto the target pair, parity postselection on equal outcomes,
/// and a fixed local correction on the kept pair, followed by a twirl.
///
/// Register layout: qubit 1 = side-A source, 2 = side-B source,
/// 3 = side-A target, 4 = side-B target.
pub fn bbpssw_round(state: &BellDiagonalState) -> Result<(BellDiagonalState, f64)> {
    let pair = state.to_density();
    let mut rho = pair.kron(&pair)?;
    let rx_p = x_rotation(std::f64::consts::FRAC_PI_2);
    let rx_m = x_rotation(-std::f64::consts::FRAC_PI_2);
    for q in [1usize, 3] {
        rho = rho.conjugate_mat2(q, &rx_p)?;
    }
    for q in [2usize, 4] {
        rho = rho.conjugate_mat2(q, &rx_m)?;
    }
    rho = rho.conjugate_cnot(1, 3)?.conjugate_cnot(2, 4)?;
    // keep branches where the target qubits agree
    let (b00, _) = rho.project_z(3, 0)?;
    let (b00, p00) = b00.project_z(4, 0)?;
    let (b11, _) = rho.project_z(3, 1)?;
    let (b11, p11) = b11.project_z(4, 1)?;
    let success = p00 + p11;
    if success <= TOL {
        return Err(QcsError::ZeroProbability);
    }
    let kept = b00.add(&b11)?.scale(1.0 / success);
    let mut out = kept.partial_trace(&[1, 2])?;
    // local correction returning the success branch to the psi- sector
    let zx: Mat2 = [
        [ZERO, C64::new(1.0, 0.0)],
        [C64::new(-1.0, 0.0), ZERO],
    ];
    out = out.conjugate_mat2(1, &zx)?.hermitized();
    Ok((bell_twirl(&out)?, success))
}

/// Closed-form Bell-weight map of one round; oracle for `bbpssw_round`.
pub fn bbpssw_recurrence(state: &BellDiagonalState) -> Result<(BellDiagonalState, f64)> {
    let [a, b, c, d] = state.weights;
    let p = (a + b) * (a + b) + (c + d) * (c + d);
    if p <= TOL {
        return Err(QcsError::ZeroProbability);
    }
    let next = BellDiagonalState::new([
        (a * a + b * b) / p,
        2.0 * c * d / p,
        (c * c + d * d) / p,
        2.0 * a * b / p,
    ])?;
    Ok((next, p))
}

/// Iterate rounds at each input phase, recording fidelity, success
/// probability and the pair correlation.
pub fn purify_sweep(phi_grid: &[f64], rounds: usize) -> Result<Vec<PurificationTrace>> {
    if rounds == 0 {
        return Err(QcsError::InvalidArgument("rounds must be >= 1".to_string()));
    }
    phi_grid
        .iter()
        .map(|&phi| {
            let mut state = bell_twirl(&preskill_input(phi))?;
            let mut recs = Vec::with_capacity(rounds);
            for round in 1..=rounds {
                let (next, success) = bbpssw_round(&state)?;
                state = next;
                recs.push(RoundRecord {
                    round,
                    fidelity: state.fidelity(),
                    success_prob: success,
                    zz: state.zz(),
                });
            }
            Ok(PurificationTrace {
                phi,
                rounds: recs,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SectorDecision {
    Keep,
    Flip,
}

/// Decide from a sampled <Z1 Z2> estimate whether the purified pairs sit
/// in the wrong Bell sector. Flip when the estimate is far from the
/// singlet value -1; refuse to decide when the standard error is large.
pub fn sector_check(estimate: f64, std_err: f64) -> Result<SectorDecision> {
    if std_err >= 0.1 {
        return Err(QcsError::Indeterminate { std_err });
    }
    if estimate > -0.5 {
        Ok(SectorDecision::Flip)
    } else {
        Ok(SectorDecision::Keep)
    }
}

/// Estimate <Z1 Z2> from `shots` two-outcome samples of the state.
pub fn sample_zz(state: &BellDiagonalState, shots: u64, rng: &mut Rng) -> (f64, f64) {
    // outcome value is +1 with probability (1 + zz)/2
    let p = (1.0 + state.zz()) / 2.0;
    let mut sum = 0i64;
    for _ in 0..shots {
        if rng.random::<f64>() < p {
            sum += 1;
        } else {
            sum -= 1;
        }
    }
    let mean = sum as f64 / shots as f64;
    let var = (1.0 - mean * mean).max(0.0) / shots as f64;
    (mean, var.sqrt())
}

/// Full pair-level sequence: twirl, purify, sector check by sampling, and
/// on a flip decision rotate the sector and purify again.
pub fn purify_with_sector_check(
    phi: f64,
    rounds: usize,
    check_shots: u64,
    rng: &mut Rng,
) -> Result<(BellDiagonalState, SectorDecision, Vec<RoundRecord>)> {
    let mut trace = Vec::new();
    let mut state = bell_twirl(&preskill_input(phi))?;
    let run = |state: &mut BellDiagonalState, trace: &mut Vec<RoundRecord>| -> Result<()> {
        for round in 1..=rounds {
            let (next, success) = bbpssw_round(state)?;
            *state = next;
            trace.push(RoundRecord {
                round,
                fidelity: state.fidelity(),
                success_prob: success,
                zz: state.zz(),
            });
        }
        Ok(())
    };
    run(&mut state, &mut trace)?;
    let (est, se) = sample_zz(&state, check_shots, rng);
    let decision = sector_check(est, se)?;
    if decision == SectorDecision::Flip {
        state = state.sector_flip();
        run(&mut state, &mut trace)?;
    }
    Ok((state, decision, trace))
}

/// Project onto the singlet sector and renormalize; the idealized
/// stand-in for the multiparty distillation step.
pub fn singlet_project(rho: &DensityMatrix, basis: &SingletBasis) -> Result<DensityMatrix> {
    let d = rho.dim();
    if d != 1 << basis.n_qubits {
        return Err(QcsError::DimensionMismatch {
            left: d,
            right: 1 << basis.n_qubits,
        });
    }
    let mut proj = DMatrix::from_element(d, d, ZERO);
    for v in &basis.vectors {
        for r in 0..d {
            for c in 0..d {
                proj[(r, c)] += v.amp(r) * v.amp(c).conj();
            }
        }
    }
    let projected = proj.clone() * rho.elems() * proj;
    let out = DensityMatrix::from_elems(basis.n_qubits, projected)?;
    let tr = out.trace().re;
    if tr <= TOL {
        return Err(QcsError::ZeroProbability);
    }
    Ok(out.scale(1.0 / tr).hermitized())
}
