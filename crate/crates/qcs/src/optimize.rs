//! Search over the singlet manifold for states maximizing the geometric
//! mean of the signal amplitudes.

use serde::Serialize;

use crate::error::{QcsError, Result};
use crate::protocol::amplitude_correlation;
use crate::rng::Rng;
use crate::spin::{singlet_subspace, supersinglet, SingletBasis};
use crate::state::{C64, StateVector, ZERO};
#[cfg(test)]
use crate::TOL;
use rand::Rng as _;

/// Floor applied to |A_n| inside the geometric mean to avoid log
/// singularities when an amplitude vanishes.
const AMP_FLOOR: f64 = 1e-15;

/// (prod_n |A_n|)^{1/(N-1)} over parties 2..N.
pub fn objective_geomean(state: &StateVector) -> Result<f64> {
    let table = amplitude_correlation(state)?;
    let n = state.n_qubits();
    let log_sum: f64 = table
        .entries
        .iter()
        .map(|e| e.amplitude.abs().max(AMP_FLOOR).ln())
        .sum();
    Ok((log_sum / (n as f64 - 1.0)).exp())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanPoint {
    pub theta: f64,
    pub phi: f64,
    /// None marks a skipped near-zero-norm superposition.
    pub objective: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub theta_steps: usize,
    pub phi_steps: usize,
    pub points: Vec<ScanPoint>,
    pub best_value: f64,
    pub maxima: Vec<ScanPoint>,
}

/// |psi-> (x) |psi-> on four qubits.
fn pair_product() -> StateVector {
    let pair = crate::purify::psi_minus();
    let mut amps = vec![ZERO; 16];
    for i in 0..4 {
        for j in 0..4 {
            amps[(i << 2) | j] = pair.amp(i) * pair.amp(j);
        }
    }
    StateVector::from_amps(4, amps).unwrap()
}

/// Two-parameter four-qubit family: cos(theta) |psi->|psi-> +
/// e^{i phi} sin(theta) |S_4>, renormalized after superposing. The scan
/// covers theta in [0, pi] inclusive and phi in [0, 2 pi).
pub fn scan_n4(theta_steps: usize, phi_steps: usize) -> Result<ScanResult> {
    if theta_steps < 8 || phi_steps < 8 {
        return Err(QcsError::InvalidArgument(
            "scan resolution must be at least 8 steps per axis".to_string(),
        ));
    }
    let product = pair_product();
    let s4 = supersinglet(4)?;
    let mut points = Vec::with_capacity((theta_steps + 1) * phi_steps);
    let mut best_value = f64::NEG_INFINITY;
    for ti in 0..=theta_steps {
        let theta = ti as f64 * std::f64::consts::PI / theta_steps as f64;
        for pi in 0..phi_steps {
            let phi = pi as f64 * std::f64::consts::TAU / phi_steps as f64;
            let ct = C64::new(theta.cos(), 0.0);
            let st = C64::from_polar(theta.sin(), phi);
            let amps: Vec<C64> = product
                .amps()
                .iter()
                .zip(s4.amps())
                .map(|(&a, &b)| ct * a + st * b)
                .collect();
            let raw = StateVector::from_amps(4, amps)?;
            let objective = if raw.norm_sqr() < 1e-12 {
                None
            } else {
                let v = objective_geomean(&raw.normalized()?)?;
                best_value = best_value.max(v);
                Some(v)
            };
            points.push(ScanPoint {
                theta,
                phi,
                objective,
            });
        }
    }
    let maxima = points
        .iter()
        .filter(|p| p.objective.is_some_and(|v| v >= best_value - 1e-9))
        .copied()
        .collect();
    Ok(ScanResult {
        theta_steps,
        phi_steps,
        points,
        best_value,
        maxima,
    })
}

fn combine(basis: &SingletBasis, coords: &[f64]) -> Result<StateVector> {
    let mut amps = vec![ZERO; 1 << basis.n_qubits];
    for (i, v) in basis.vectors.iter().enumerate() {
        let c = C64::new(coords[2 * i], coords[2 * i + 1]);
        for (a, &b) in amps.iter_mut().zip(v.amps()) {
            *a += c * b;
        }
    }
    StateVector::from_amps(basis.n_qubits, amps)?.normalized()
}

/// Gradient-free compass search over the real and imaginary singlet-basis
/// coordinates with a shrinking step, restarted from random points.
pub fn optimize_singlet(
    n_qubits: usize,
    restarts: usize,
    rng: &mut Rng,
) -> Result<(StateVector, f64)> {
    if restarts < 1 {
        return Err(QcsError::InvalidArgument("restarts must be >= 1".to_string()));
    }
    if n_qubits % 2 != 0 || !(4..=6).contains(&n_qubits) {
        return Err(QcsError::InvalidArgument(format!(
            "optimization supports 4 or 6 qubits, got {n_qubits}"
        )));
    }
    let basis = singlet_subspace(n_qubits)?;
    let dim = 2 * basis.dim();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..restarts {
        let mut coords: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut value = objective_geomean(&combine(&basis, &coords)?)?;
        let mut step = 0.5;
        while step > 1e-8 {
            let mut improved = false;
            for i in 0..dim {
                for sign in [1.0, -1.0] {
                    let saved = coords[i];
                    coords[i] = saved + sign * step;
                    match combine(&basis, &coords).and_then(|s| objective_geomean(&s)) {
                        Ok(v) if v > value + 1e-14 => {
                            value = v;
                            improved = true;
                        }
                        _ => coords[i] = saved,
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
            best = Some((coords, value));
        }
    }
    let (coords, value) = best.ok_or(QcsError::SolverFailure {
        restarts,
        residual: f64::NAN,
    })?;
    Ok((combine(&basis, &coords)?, value))
}

/// The closed-form optimum value for the canonical singlet.
pub fn supersinglet_objective(n_qubits: usize) -> Result<f64> {
    objective_geomean(&supersinglet(n_qubits)?)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundReport {
    /// Smallest distance of any amplitude above the lower bound -1.
    pub lower_margin: f64,
    /// Smallest distance of any amplitude below the upper bound 1/3.
    pub upper_margin: f64,
}

/// Verify -1 <= A_n <= 1/3 for every party; violations beyond 1e-9
/// indicate a kernel bug and are hard errors.
pub fn amplitude_bound_check(state: &StateVector) -> Result<BoundReport> {
    let table = amplitude_correlation(state)?;
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    for e in &table.entries {
        lower_margin = lower_margin.min(e.amplitude + 1.0);
        upper_margin = upper_margin.min(1.0 / 3.0 - e.amplitude);
    }
    if lower_margin < -1e-9 || upper_margin < -1e-9 {
        return Err(QcsError::Invariant(format!(
            "amplitude bound violated: margins ({lower_margin:.3e}, {upper_margin:.3e})"
        )));
    }
    Ok(BoundReport {
        lower_margin,
        upper_margin,
    })
}

/// Largest elementwise deviation of a two-qubit state from
/// x |psi-><psi-| + (1 - x) I / 4.
pub fn werner_fit_residual(rho: &crate::density::DensityMatrix, x: f64) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(QcsError::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let singlet = crate::density::DensityMatrix::from_pure(&crate::purify::psi_minus());
    let mut residual: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let ident = if r == c { 0.25 } else { 0.0 };
            let w = singlet.elem(r, c) * C64::new(x, 0.0) + C64::new((1.0 - x) * ident, 0.0);
            residual = residual.max((rho.elem(r, c) - w).norm());
        }
    }
    Ok(residual)
}
