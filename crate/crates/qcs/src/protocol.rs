//! The clock-synchronization protocol: Alice's X measurement, the
//! conditional pi correction, signal extraction and the per-party
//! amplitude table computed by several independent routes.

use serde::Serialize;

use crate::error::{QcsError, Result};
use crate::rng::Rng;
use crate::spin::require_singlet;
use crate::state::{x_basis, z_rotation, Pauli, PauliString, StateVector, C64};
#[cfg(test)]
use crate::state::{ONE, ZERO};
use crate::TOL;

/// Singlet-precondition tolerance for protocol entry points.
pub const SINGLET_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorrectionMode {
    /// Apply exp(i pi S^z) whenever Alice obtains the minus outcome.
    Physical,
    /// Leave the state alone; parties multiply their outcomes by Alice's
    /// reported sign.
    Classical,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolConfig {
    pub n_qubits: usize,
    pub omega: f64,
    pub correction_mode: CorrectionMode,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits % 2 != 0 {
            return Err(QcsError::OddQubits { n: self.n_qubits });
        }
        if self.omega <= 0.0 {
            return Err(QcsError::InvalidArgument(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

/// Parties 2..=N/2 sit in Alice's half of the canonical bipartition;
/// the rest form the second half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    I,
    II,
}

impl Group {
    pub fn of(party: usize, n_qubits: usize) -> Self {
        if party <= n_qubits / 2 {
            Group::I
        } else {
            Group::II
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Group::I => "I",
            Group::II => "II",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeEntry {
    pub party: usize,
    pub group: Group,
    pub amplitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeTable {
    pub n_qubits: usize,
    pub entries: Vec<AmplitudeEntry>,
}

impl AmplitudeTable {
    fn from_values(n_qubits: usize, values: Vec<f64>) -> Self {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, amplitude)| {
                let party = i + 2;
                AmplitudeEntry {
                    party,
                    group: Group::of(party, n_qubits),
                    amplitude,
                }
            })
            .collect();
        Self { n_qubits, entries }
    }

    pub fn amplitude(&self, party: usize) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.party == party)
            .map(|e| e.amplitude)
            .ok_or(QcsError::IndexOutOfRange {
                index: party,
                n_qubits: self.n_qubits,
            })
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude).sum()
    }

    /// Sum rule and range bounds.
    pub fn validate(&self) -> Result<()> {
        let s = self.sum();
        if (s + 1.0).abs() > TOL {
            return Err(QcsError::Invariant(format!(
                "amplitude sum {s} differs from -1"
            )));
        }
        for e in &self.entries {
            if e.amplitude < -1.0 - TOL || e.amplitude > 1.0 / 3.0 + TOL {
                return Err(QcsError::Invariant(format!(
                    "amplitude {} for party {} outside [-1, 1/3]",
                    e.amplitude, e.party
                )));
            }
        }
        Ok(())
    }

    /// Largest absolute difference against another table.
    pub fn max_deviation(&self, other: &AmplitudeTable) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.amplitude - b.amplitude).abs())
            .fold(0.0, f64::max)
    }
}

/// Alice measures qubit 1 in the X basis. Outcome is +1 or -1.
pub fn alice_measure(
    state: &StateVector,
    rng: &mut Rng,
) -> Result<(i32, StateVector, f64)> {
    require_singlet(state, SINGLET_TOL)?;
    let (idx, post, prob) = state.measure(1, &x_basis(), rng)?;
    let outcome = if idx == 0 { 1 } else { -1 };
    Ok((outcome, post, prob))
}

/// The conditional correction exp(i pi S^z) = prod_q exp(i pi Z_q / 2),
/// applied when Alice reports the minus outcome.
pub fn apply_correction(state: &StateVector, alice_outcome: i32) -> Result<StateVector> {
    if alice_outcome >= 0 {
        return Ok(state.clone());
    }
    let u = z_rotation(std::f64::consts::PI);
    state.apply_global_rotation(&u)
}

/// Deterministic plus-branch state at t = 0: project qubit 1 onto |+> and
/// renormalize.
fn plus_branch(singlet: &StateVector) -> Result<StateVector> {
    let plus: [C64; 2] = [
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ];
    let (post, _prob) = singlet.project(1, &plus)?;
    post.normalized()
}

fn minus_branch(singlet: &StateVector) -> Result<StateVector> {
    let minus: [C64; 2] = [
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ];
    let (post, _prob) = singlet.project(1, &minus)?;
    post.normalized()
}

/// A_n = <X_n> on the post-measurement plus-branch state at t = 0.
pub fn amplitude_direct(singlet: &StateVector) -> Result<AmplitudeTable> {
    require_singlet(singlet, SINGLET_TOL)?;
    let n = singlet.n_qubits();
    let psi = plus_branch(singlet)?;
    let values = (2..=n)
        .map(|party| {
            let x = PauliString::single(n, party, Pauli::X)?;
            psi.expectation(&x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable::from_values(n, values))
}

/// A_n = <X_1 X_n> on the singlet itself; the Z_1 Z_n route must agree.
pub fn amplitude_correlation(singlet: &StateVector) -> Result<AmplitudeTable> {
    require_singlet(singlet, SINGLET_TOL)?;
    let n = singlet.n_qubits();
    let mut values = Vec::with_capacity(n - 1);
    for party in 2..=n {
        let xx = PauliString::two(n, 1, Pauli::X, party, Pauli::X)?;
        let zz = PauliString::two(n, 1, Pauli::Z, party, Pauli::Z)?;
        let vx = singlet.expectation(&xx)?;
        let vz = singlet.expectation(&zz)?;
        if (vx - vz).abs() > TOL {
            return Err(QcsError::Invariant(format!(
                "XX and ZZ correlation routes disagree for party {party}: {vx} vs {vz}"
            )));
        }
        values.push(vx);
    }
    Ok(AmplitudeTable::from_values(n, values))
}

/// Closed-form table for the canonical alternating-sign singlet:
/// Group I -> 1/3, Group II -> -(N+4)/(3N).
pub fn amplitude_closed_form(n_qubits: usize) -> Result<AmplitudeTable> {
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
    let nf = n_qubits as f64;
    let group_two = -(nf + 4.0) / (3.0 * nf);
    let values = (2..=n_qubits)
        .map(|party| match Group::of(party, n_qubits) {
            Group::I => 1.0 / 3.0,
            Group::II => group_two,
        })
        .collect();
    Ok(AmplitudeTable::from_values(n_qubits, values))
}

/// Classical post-processing route: weight the two unflipped branches with
/// a -1 factor on the minus branch, A_n = p_+ <X_n>_+ - p_- <X_n>_-.
pub fn amplitude_postprocessed(singlet: &StateVector) -> Result<AmplitudeTable> {
    require_singlet(singlet, SINGLET_TOL)?;
    let n = singlet.n_qubits();
    let plus = plus_branch(singlet)?;
    let minus = minus_branch(singlet)?;
    let values = (2..=n)
        .map(|party| {
            let x = PauliString::single(n, party, Pauli::X)?;
            Ok(0.5 * plus.expectation(&x)? - 0.5 * minus.expectation(&x)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable::from_values(n, values))
}

/// f_n(t) = A_n cos(omega t).
pub fn signal(table: &AmplitudeTable, party: usize, t: f64, omega: f64) -> Result<f64> {
    Ok(table.amplitude(party)? * (omega * t).cos())
}

/// raw / A_n, the party-independent normalized signal.
pub fn normalize_signal(raw: f64, party: usize, table: &AmplitudeTable) -> Result<f64> {
    let a = table.amplitude(party)?;
    if a.abs() < TOL {
        return Err(QcsError::InvalidArgument(format!(
            "cannot normalize by zero amplitude for party {party}"
        )));
    }
    Ok(raw / a)
}

#[derive(Clone, Debug, Serialize)]
pub struct PartyRecord {
    pub party: usize,
    pub group: Group,
    /// Count of +1 outcomes among the M samples (after any classical
    /// sign processing).
    pub plus_count: u64,
    pub x_bar: f64,
    pub t_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub n_qubits: usize,
    pub shots: u64,
    pub t_true: f64,
    pub omega: f64,
    pub seed: u64,
    pub correction_mode: CorrectionMode,
    pub parties: Vec<PartyRecord>,
}

/// Run the protocol on `shots` fresh copies of `singlet`: Alice measures,
/// the correction is applied per the configured mode, the state evolves to
/// `t_true`, and every party samples its qubit in the X basis. Each party
/// inverts its mean outcome through the supplied amplitude table.
///
/// Time inversion requires omega * t in (0, pi); the mean outcome is
/// clamped into [-1, 1] before the arccos.
pub fn simulate_run(
    config: &ProtocolConfig,
    singlet: &StateVector,
    table: &AmplitudeTable,
    t_true: f64,
    shots: u64,
    rng: &mut Rng,
) -> Result<RunRecord> {
    config.validate()?;
    // Imperfectly distilled inputs are allowed (they carry a small
    // residual rotation out of the singlet sector); only reject states
    // that are nowhere near a singlet.
    require_singlet(singlet, 0.5)?;
    let n = singlet.n_qubits();
    let wt = config.omega * t_true;
    if !(wt > 0.0 && wt < std::f64::consts::PI) {
        return Err(QcsError::InvalidArgument(format!(
            "omega * t = {wt} outside the unambiguous window (0, pi)"
        )));
    }
    if shots == 0 {
        return Err(QcsError::InvalidArgument("shots must be >= 1".to_string()));
    }
    // The two Alice branches occur with probability 1/2 each; precompute
    // the evolved post-processing inputs once instead of re-projecting
    // per shot.
    let plus = plus_branch(singlet)?.evolve(t_true, config.omega);
    let prepared_minus = match config.correction_mode {
        CorrectionMode::Physical => {
            // After the correction the minus branch coincides with the
            // plus branch up to a global phase.
            apply_correction(&minus_branch(singlet)?, -1)?.evolve(t_true, config.omega)
        }
        CorrectionMode::Classical => minus_branch(singlet)?.evolve(t_true, config.omega),
    };
    let xb = x_basis();
    let mut plus_counts = vec![0u64; n - 1];
    for _ in 0..shots {
        let r: f64 = rand::Rng::random(rng);
        let (mut state, alice_sign) = if r < 0.5 {
            (plus.clone(), 1i64)
        } else {
            (prepared_minus.clone(), -1i64)
        };
        let sign = match config.correction_mode {
            CorrectionMode::Physical => 1i64,
            CorrectionMode::Classical => alice_sign,
        };
        for party in 2..=n {
            let (idx, post, _) = state.measure(party, &xb, rng)?;
            state = post;
            let outcome = if idx == 0 { 1i64 } else { -1i64 };
            if outcome * sign > 0 {
                plus_counts[party - 2] += 1;
            }
        }
    }
    let parties = (2..=n)
        .map(|party| {
            let k = plus_counts[party - 2];
            let x_bar = (2.0 * k as f64 - shots as f64) / shots as f64;
            let a = table.amplitude(party)?;
            let c = (x_bar / a).clamp(-1.0, 1.0);
            Ok(PartyRecord {
                party,
                group: Group::of(party, n),
                plus_count: k,
                x_bar,
                t_estimate: c.acos() / config.omega,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunRecord {
        n_qubits: n,
        shots,
        t_true,
        omega: config.omega,
        seed: config.seed,
        correction_mode: config.correction_mode,
        parties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{homogeneous_singlet, supersinglet};
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_tables() {
        let t4 = amplitude_closed_form(4).unwrap();
        let want4 = [1.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0];
        for (e, w) in t4.entries.iter().zip(want4) {
            assert_abs_diff_eq!(e.amplitude, w, epsilon = TOL);
        }
        let t6 = amplitude_closed_form(6).unwrap();
        assert_abs_diff_eq!(t6.amplitude(2).unwrap(), 1.0 / 3.0, epsilon = TOL);
        assert_abs_diff_eq!(t6.amplitude(3).unwrap(), 1.0 / 3.0, epsilon = TOL);
        for p in 4..=6 {
            assert_abs_diff_eq!(t6.amplitude(p).unwrap(), -5.0 / 9.0, epsilon = TOL);
        }
        t4.validate().unwrap();
        t6.validate().unwrap();
        assert!(amplitude_closed_form(2).is_err());
        assert!(amplitude_closed_form(5).is_err());
    }

    #[test]
    fn three_routes_agree_on_supersinglet() {
        for n in [4usize, 6] {
            let s = supersinglet(n).unwrap();
            let direct = amplitude_direct(&s).unwrap();
            let corr = amplitude_correlation(&s).unwrap();
            let post = amplitude_postprocessed(&s).unwrap();
            let closed = amplitude_closed_form(n).unwrap();
            assert!(direct.max_deviation(&corr) < TOL);
            assert!(direct.max_deviation(&post) < TOL);
            assert!(direct.max_deviation(&closed) < TOL);
            assert_abs_diff_eq!(direct.sum(), -1.0, epsilon = TOL);
        }
    }

    #[test]
    fn homogeneous_singlet_amplitudes_are_uniform() {
        let mut rng = crate::rng::master(9);
        let s = homogeneous_singlet(4, &mut rng).unwrap();
        let t = amplitude_correlation(&s).unwrap();
        for e in &t.entries {
            assert_abs_diff_eq!(e.amplitude, -1.0 / 3.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn two_qubit_amplitude_is_minus_one() {
        let s = supersinglet(2).unwrap();
        let t = amplitude_direct(&s).unwrap();
        assert_abs_diff_eq!(t.amplitude(2).unwrap(), -1.0, epsilon = TOL);
    }

    #[test]
    fn alice_measurement_is_unbiased_and_singlet_checked() {
        let s = supersinglet(4).unwrap();
        let mut rng = crate::rng::master(4);
        let (_, _, prob) = alice_measure(&s, &mut rng).unwrap();
        assert_abs_diff_eq!(prob, 0.5, epsilon = TOL);
        // a product state is rejected
        let bad = StateVector::zero_state(4).unwrap();
        assert!(matches!(
            alice_measure(&bad, &mut rng),
            Err(QcsError::NotSinglet { .. })
        ));
    }

    #[test]
    fn correction_maps_minus_branch_onto_plus_branch() {
        for n in [2usize, 4] {
            let s = supersinglet(n).unwrap();
            let plus = plus_branch(&s).unwrap();
            let minus = minus_branch(&s).unwrap();
            let corrected = apply_correction(&minus, -1).unwrap();
            assert_abs_diff_eq!(plus.overlap_modulus(&corrected).unwrap(), 1.0, epsilon = TOL);
            // the plus branch passes through untouched
            let same = apply_correction(&plus, 1).unwrap();
            assert_eq!(plus.amps(), same.amps());
        }
    }

    #[test]
    fn post_measurement_state_has_spin_half() {
        // After Alice's measurement the other qubits carry total spin 1/2:
        // <S^2> = 3/4 on qubits 2..N, which shows up as <S^2> = 3/4 + the
        // single-qubit 3/4 of Alice's collapsed qubit plus cross terms.
        let s = supersinglet(4).unwrap();
        let plus = plus_branch(&s).unwrap();
        // <(S_{2..4})^2> via the restricted spin operators applied to the
        // full 4-qubit state.
        let mut s2 = 0.0;
        let n = 4usize;
        for axis in crate::spin::AXES {
            // S restricted to qubits 2..4 applied to the full state
            let mut out = vec![ZERO; 1 << n];
            for (idx, &a) in plus.amps().iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for q in 2..=n {
                    let mask = 1usize << (n - q);
                    let bit = (idx & mask) != 0;
                    match axis {
                        crate::spin::Axis::X => out[idx ^ mask] += a * 0.5,
                        crate::spin::Axis::Y => {
                            let c = if bit { -crate::state::I } else { crate::state::I };
                            out[idx ^ mask] += a * c * 0.5;
                        }
                        crate::spin::Axis::Z => {
                            out[idx] += a * if bit { -0.5 } else { 0.5 };
                        }
                    }
                }
            }
            let v = StateVector::from_amps(n, out).unwrap();
            s2 += v.norm_sqr();
        }
        assert_abs_diff_eq!(s2, 0.75, epsilon = TOL);
    }

    #[test]
    fn signal_and_normalization() {
        let t = amplitude_closed_form(4).unwrap();
        assert_abs_diff_eq!(signal(&t, 2, 0.0, 1.0).unwrap(), 1.0 / 3.0, epsilon = TOL);
        let raw = signal(&t, 3, std::f64::consts::PI, 1.0).unwrap();
        assert_abs_diff_eq!(raw, 2.0 / 3.0, epsilon = TOL);
        assert_abs_diff_eq!(
            normalize_signal(raw, 3, &t).unwrap(),
            -1.0,
            epsilon = TOL
        );
        let quarter = signal(&t, 2, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert_abs_diff_eq!(quarter, 0.0, epsilon = TOL);
    }

    #[test]
    fn simulate_run_recovers_time() {
        let s = supersinglet(4).unwrap();
        let table = amplitude_direct(&s).unwrap();
        let config = ProtocolConfig {
            n_qubits: 4,
            omega: 1.0,
            correction_mode: CorrectionMode::Physical,
            seed: 11,
        };
        let mut rng = crate::rng::master(config.seed);
        let t_true = 1.0;
        let rec = simulate_run(&config, &s, &table, t_true, 20_000, &mut rng).unwrap();
        for p in &rec.parties {
            assert!(
                (p.t_estimate - t_true).abs() < 0.05,
                "party {} estimate {} vs {}",
                p.party,
                p.t_estimate,
                t_true
            );
        }
    }

    #[test]
    fn correction_modes_agree_statistically() {
        let s = supersinglet(4).unwrap();
        let table = amplitude_direct(&s).unwrap();
        let t_true = 0.8;
        let shots = 20_000u64;
        let run = |mode, seed| {
            let config = ProtocolConfig {
                n_qubits: 4,
                omega: 1.0,
                correction_mode: mode,
                seed,
            };
            let mut rng = crate::rng::master(seed);
            simulate_run(&config, &s, &table, t_true, shots, &mut rng).unwrap()
        };
        let a = run(CorrectionMode::Physical, 21);
        let b = run(CorrectionMode::Classical, 22);
        // 3-sigma two-sample comparison of x_bar per party
        for (pa, pb) in a.parties.iter().zip(&b.parties) {
            let sd = 2.0 / (shots as f64).sqrt(); // bound on std of x_bar
            assert!(
                (pa.x_bar - pb.x_bar).abs() < 3.0 * sd * std::f64::consts::SQRT_2,
                "party {}: {} vs {}",
                pa.party,
                pa.x_bar,
                pb.x_bar
            );
        }
    }

    #[test]
    fn simulate_run_rejects_out_of_window_times() {
        let s = supersinglet(4).unwrap();
        let table = amplitude_direct(&s).unwrap();
        let config = ProtocolConfig {
            n_qubits: 4,
            omega: 1.0,
            correction_mode: CorrectionMode::Physical,
            seed: 0,
        };
        let mut rng = crate::rng::master(0);
        assert!(simulate_run(&config, &s, &table, 0.0, 10, &mut rng).is_err());
        assert!(simulate_run(&config, &s, &table, 4.0, 10, &mut rng).is_err());
    }

    #[test]
    fn zz_correlation_matches_pair_probability() {
        // <Z1 Zn> = 4 p00 - 1 with p00 the probability of reading 00 on
        // the pair (1, n).
        for n in [4usize, 6] {
            let s = supersinglet(n).unwrap();
            for party in 2..=n {
                let p00_expected = match Group::of(party, n) {
                    Group::I => 1.0 / 3.0,
                    Group::II => (n as f64 / 2.0 - 1.0) / (3.0 * n as f64),
                };
                // p00 by double projection
                let (post1, _) = s.project(1, &[ONE, ZERO]).unwrap();
                let (post2, p) = post1.project(party, &[ONE, ZERO]).unwrap();
                let _ = post2;
                assert_abs_diff_eq!(p, p00_expected, epsilon = TOL);
                let zz = PauliString::two(n, 1, Pauli::Z, party, Pauli::Z).unwrap();
                assert_abs_diff_eq!(
                    s.expectation(&zz).unwrap(),
                    4.0 * p00_expected - 1.0,
                    epsilon = TOL
                );
            }
        }
    }
}
