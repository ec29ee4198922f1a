//! Timing-error budget: the systematic offset from imperfect fidelity,
//! the shot-noise floor, and Monte Carlo validation of the estimator.

use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{QcsError, Result};
use crate::protocol::Group;
use crate::rng::Rng;

/// Cesium hyperfine clock period, seconds per radian.
pub const CS_OMEGA_INV_S: f64 = 17e-12;
/// Strontium optical clock period, seconds per radian.
pub const SR_OMEGA_INV_S: f64 = 0.4e-15;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorBudget {
    pub shots: u64,
    pub fidelity: f64,
    pub omega: f64,
    pub delta_t_f: f64,
    pub delta_t_sql: f64,
    pub delta_t_total: f64,
}

impl ErrorBudget {
    /// Dimensionless error delta_t * omega.
    pub fn dt_omega(&self) -> f64 {
        self.delta_t_total * self.omega
    }

    /// Total error in picoseconds for the cesium preset.
    pub fn cs_picoseconds(&self) -> f64 {
        self.dt_omega() * CS_OMEGA_INV_S * 1e12
    }

    /// Total error in femtoseconds for the strontium preset.
    pub fn sr_femtoseconds(&self) -> f64 {
        self.dt_omega() * SR_OMEGA_INV_S * 1e15
    }
}

fn check_fidelity(f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        Err(QcsError::InvalidArgument(format!(
            "fidelity {f} outside (0, 1]"
        )))
    } else {
        Ok(())
    }
}

fn check_shots(m: u64) -> Result<()> {
    if m < 1 {
        Err(QcsError::InvalidArgument("shot count must be >= 1".to_string()))
    } else {
        Ok(())
    }
}

/// Systematic offset from imperfect fidelity: 2 sqrt(1 - F) / omega.
pub fn delta_t_fidelity(fidelity: f64, omega: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    Ok(2.0 * (1.0 - fidelity).sqrt() / omega)
}

/// Shot-noise floor: 1 / (omega sqrt(2 M)).
pub fn delta_t_shot(shots: u64, omega: f64) -> Result<f64> {
    check_shots(shots)?;
    Ok(1.0 / (omega * (2.0 * shots as f64).sqrt()))
}

/// Quadrature combination of the two error sources.
pub fn delta_t_total(shots: u64, fidelity: f64, omega: f64) -> Result<ErrorBudget> {
    let delta_t_f = delta_t_fidelity(fidelity, omega)?;
    let delta_t_sql = delta_t_shot(shots, omega)?;
    Ok(ErrorBudget {
        shots,
        fidelity,
        omega,
        delta_t_f,
        delta_t_sql,
        delta_t_total: (delta_t_f * delta_t_f + delta_t_sql * delta_t_sql).sqrt(),
    })
}

/// Probability of reading 00 on the pair (1, n) of the canonical singlet:
/// 1/3 within the first half, (N/2 - 1)/(3N) across halves.
pub fn pair_p00(n_qubits: usize, party: usize) -> Result<f64> {
    if n_qubits % 2 != 0 {
        return Err(QcsError::OddQubits { n: n_qubits });
    }
    if party < 2 || party > n_qubits {
        return Err(QcsError::IndexOutOfRange {
            index: party,
            n_qubits,
        });
    }
    Ok(match Group::of(party, n_qubits) {
        Group::I => 1.0 / 3.0,
        Group::II => (n_qubits as f64 / 2.0 - 1.0) / (3.0 * n_qubits as f64),
    })
}

/// X-basis outcome probabilities for party `n` at time `t` with a residual
/// rotation `epsilon`:
/// p+ = 2 p00 cos^2((wt - 2e)/2) + 2 p01 sin^2((wt - 2e)/2), p- = 1 - p+.
pub fn shot_probabilities(
    n_qubits: usize,
    party: usize,
    omega: f64,
    t: f64,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let p00 = pair_p00(n_qubits, party)?;
    let p01 = 0.5 - p00;
    let half = (omega * t - 2.0 * epsilon) / 2.0;
    let p_plus = 2.0 * p00 * half.cos().powi(2) + 2.0 * p01 * half.sin().powi(2);
    Ok((p_plus, 1.0 - p_plus))
}

/// Nominal signal amplitude of party `n` for the canonical singlet,
/// derived from the same pair probabilities.
pub fn nominal_amplitude(n_qubits: usize, party: usize) -> Result<f64> {
    Ok(4.0 * pair_p00(n_qubits, party)? - 1.0)
}

/// Exact standard deviation of x = (2k - M)/M for k ~ Binomial(M, p).
pub fn binomial_std_x(shots: u64, p: f64) -> f64 {
    2.0 * (p * (1.0 - p) / shots as f64).sqrt()
}

/// The width 1/sqrt(2M) assumed by the shot-noise term of the budget.
pub fn assumed_std_x(shots: u64) -> f64 {
    1.0 / (2.0 * shots as f64).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TimingStats {
    pub mean: f64,
    pub std: f64,
    pub trials: u64,
}

/// Sample the time estimator: per trial, draw k ~ Binomial(M, p+),
/// form x = (2k - M)/M and invert t_hat = arccos(clamp(x / A_n)) / omega.
pub fn monte_carlo_timing(
    n_qubits: usize,
    party: usize,
    omega: f64,
    t: f64,
    epsilon: f64,
    shots: u64,
    trials: u64,
    rng: &mut Rng,
) -> Result<TimingStats> {
    check_shots(shots)?;
    if trials < 1 {
        return Err(QcsError::InvalidArgument("trials must be >= 1".to_string()));
    }
    let wt = omega * t;
    if !(wt > 0.0 && wt < std::f64::consts::PI) {
        return Err(QcsError::InvalidArgument(format!(
            "omega * t = {wt} outside the inversion window (0, pi)"
        )));
    }
    let (p_plus, _) = shot_probabilities(n_qubits, party, omega, t, epsilon)?;
    let a = nominal_amplitude(n_qubits, party)?;
    let dist = Binomial::new(shots, p_plus)
        .map_err(|e| QcsError::InvalidArgument(e.to_string()))?;
    let mut estimates = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let k = dist.sample(rng) as f64;
        let x = (2.0 * k - shots as f64) / shots as f64;
        let c = (x / a).clamp(-1.0, 1.0);
        estimates.push(c.acos() / omega);
    }
    let mean = estimates.iter().sum::<f64>() / trials as f64;
    let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
        / (trials as f64 - 1.0).max(1.0);
    Ok(TimingStats {
        mean,
        std: var.sqrt(),
        trials,
    })
}

/// Error budget over a (shots, fidelity) grid, fidelity-major order.
pub fn error_sweep(m_grid: &[u64], f_list: &[f64], omega: f64) -> Result<Vec<ErrorBudget>> {
    if m_grid.is_empty() || f_list.is_empty() {
        return Err(QcsError::InvalidArgument("empty sweep grid".to_string()));
    }
    let mut rows = Vec::with_capacity(m_grid.len() * f_list.len());
    for &f in f_list {
        for &m in m_grid {
            rows.push(delta_t_total(m, f, omega)?);
        }
    }
    Ok(rows)
}
