//! The staged transfer protocol.
//!
//! 1. The sender's atom holds the target `α|e⟩ + β|g⟩`; the others are in |g⟩.
//! 2. With only the receiver's laser on, the secular ring Hamiltonian swaps
//!    the sender excitation into a sender–receiver pair for `t₁ = (k₁π + π/2)/Γ_r`.
//! 3. Drives are switched off and the sender's own laser applies a Rabi
//!    rotation of angle `τ`.
//! 4. The sender is measured; outcome `e` is the success branch.
//! 5. The receiver's qubit is extracted and a fixed 2×2 correction applied.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hamiltonians::{build_h_secular, N_ATOMS};
use crate::qcore::{
    c, extract_qubit, measure_qubit, outcome_probability, pauli, qubit_fidelity, Axis, CMatrix, CVector, Complex64,
    DenseOperator, QubitState, SpectralPropagator, Spin, StateVector, ALGEBRA_TOL,
};

/// Relative phase of the frozen correction `diag(1, e^{iφ})` for even `k1`.
///
/// Exact unitary evolution leaves the success-branch receiver qubit equal to
/// the target up to a global phase for every role assignment, so the fitted
/// phase is zero. Odd `k1` flips the sign of the stage-1 amplitude and adds
/// π. `fit_correction_phase` recomputes both.
pub const DERIVED_CORRECTION_PHASE: f64 = 0.0;

/// Default number of uniform θ nodes for the averaging integrals.
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

/// Monte Carlo draws per independent generator stream.
pub const SAMPLE_BATCH: usize = 4096;

/// Which atom each party holds. Atoms are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartyRoles {
    pub sender: usize,
    pub receiver: usize,
    pub bystander: usize,
}

impl PartyRoles {
    pub fn new(sender: usize, receiver: usize) -> Result<Self> {
        let valid = |a: usize| (1..=N_ATOMS).contains(&a);
        if !valid(sender) || !valid(receiver) {
            return Err(Error::InvalidRoles(format!(
                "atoms must be 1..=3, got {sender} -> {receiver}"
            )));
        }
        if sender == receiver {
            return Err(Error::InvalidRoles(format!(
                "sender and receiver are both atom {sender}"
            )));
        }
        Ok(Self {
            sender,
            receiver,
            bystander: 6 - sender - receiver,
        })
    }

    pub fn alice_to_bob() -> Self {
        Self {
            sender: 1,
            receiver: 2,
            bystander: 3,
        }
    }

    pub fn alice_to_charlie() -> Self {
        Self {
            sender: 1,
            receiver: 3,
            bystander: 2,
        }
    }

    pub fn bob_to_charlie() -> Self {
        Self {
            sender: 2,
            receiver: 3,
            bystander: 1,
        }
    }

    /// All six ordered (sender, receiver) pairs.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(6);
        for s in 1..=3 {
            for r in (1..=3).filter(|&r| r != s) {
                out.push(Self::new(s, r).expect("valid pair"));
            }
        }
        out
    }
}

/// `diag(1, e^{iφ})` in `(e, g)` order.
pub fn phase_correction(phase: f64) -> DenseOperator {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = Complex64::from_polar(1.0, phase);
    DenseOperator::new(m).expect("square")
}

/// `diag(1, e^{iπ/2})`, the rotation that undoes a `−i` on the |g⟩ amplitude.
pub fn half_pi_rotation() -> DenseOperator {
    phase_correction(FRAC_PI_2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSchedule {
    pub roles: PartyRoles,
    pub k1: u32,
    /// Stage-1 duration, `(k₁π + π/2)/Γ_receiver`.
    pub t1: f64,
    /// Stage-2 Rabi angle `Γ_sender (t − t₁)`.
    pub tau: f64,
    /// 2×2 unitary applied to the receiver qubit, `(e, g)` order.
    pub correction: DenseOperator,
}

impl ProtocolSchedule {
    pub fn new(roles: PartyRoles, k1: u32, tau: f64, gamma_receiver: f64, correction: DenseOperator) -> Result<Self> {
        if !(gamma_receiver > 0.0 && gamma_receiver.is_finite()) {
            return Err(Error::ZeroReceiverGamma(gamma_receiver));
        }
        if !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite tau {tau}")));
        }
        if correction.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: correction.dim(),
            });
        }
        let residual = correction.unitary_residual();
        if residual > ALGEBRA_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let t1 = (k1 as f64 * PI + FRAC_PI_2) / gamma_receiver;
        Ok(Self {
            roles,
            k1,
            t1,
            tau,
            correction,
        })
    }

    /// Shortest stage-1 pulse and the frozen derived correction.
    pub fn standard(roles: PartyRoles, tau: f64, gammas: [f64; 3]) -> Result<Self> {
        Self::new(roles, 0, tau, gammas[roles.receiver - 1], derived_correction(0))
    }
}

/// Derived correction for a stage-1 pulse `(k1π + π/2)/Γ`.
pub fn derived_correction(k1: u32) -> DenseOperator {
    phase_correction(DERIVED_CORRECTION_PHASE + PI * (k1 % 2) as f64)
}

/// Result of one measurement branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferOutcome {
    pub measured: Spin,
    pub branch_probability: f64,
    /// `None` when the branch has (numerically) zero probability.
    pub receiver_state: Option<QubitState>,
    pub fidelity: Option<f64>,
    pub success: bool,
}

/// Both branches of the sender measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub success: TransferOutcome,
    pub failure: TransferOutcome,
}

impl TransferReport {
    pub fn success_probability(&self) -> f64 {
        self.success.branch_probability
    }
}

/// Sender holds `target`; the other two atoms are in |g⟩.
pub fn initial_state(target: &QubitState, roles: &PartyRoles) -> StateVector {
    let mut excited = *b"ggg";
    excited[roles.sender - 1] = b'e';
    let excited = std::str::from_utf8(&excited).expect("ascii");
    StateVector::from_terms(N_ATOMS, &[(excited, target.alpha), ("ggg", target.beta)]).expect("normalized target")
}

/// Evolves under the secular Hamiltonian with only the receiver's laser on.
pub fn stage1_entangle(psi: &StateVector, roles: &PartyRoles, gamma_receiver: f64, t1: f64) -> Result<StateVector> {
    if gamma_receiver.is_nan() || gamma_receiver <= 0.0 {
        return Err(Error::ZeroReceiverGamma(gamma_receiver));
    }
    let mut gamma = [0.0; 3];
    gamma[roles.receiver - 1] = gamma_receiver;
    SpectralPropagator::new(&build_h_secular(gamma))?.evolve(t1, psi)
}

/// Rabi rotation of the sender by angle `tau` under `Γ_s σˣ_s` alone.
pub fn stage2_local_rabi(psi: &StateVector, sender: usize, gamma_sender: f64, tau: f64) -> Result<StateVector> {
    if gamma_sender.is_nan() || gamma_sender <= 0.0 {
        return Err(Error::ZeroSenderGamma(gamma_sender));
    }
    let h = pauli(Axis::X, sender, psi.n_atoms())?.scale(gamma_sender);
    SpectralPropagator::new(&h)?.evolve(tau / gamma_sender, psi)
}

fn apply_correction(u: &DenseOperator, q: &QubitState) -> Result<QubitState> {
    let m = u.entries();
    QubitState::normalized(
        m[(0, 0)] * q.alpha + m[(0, 1)] * q.beta,
        m[(1, 0)] * q.alpha + m[(1, 1)] * q.beta,
    )
}

fn branch(
    psi: &StateVector,
    schedule: &ProtocolSchedule,
    target: &QubitState,
    outcome: Spin,
) -> Result<TransferOutcome> {
    let success = outcome == Spin::Excited;
    let probability = outcome_probability(psi, schedule.roles.sender, outcome)?;
    let (branch_probability, receiver_state) = match measure_qubit(psi, schedule.roles.sender, outcome) {
        Ok((p, post)) => {
            let raw = extract_qubit(&post, schedule.roles.receiver)?;
            (p, Some(apply_correction(&schedule.correction, &raw)?.phase_fixed()))
        }
        Err(Error::ZeroProbabilityBranch { .. }) => (probability, None),
        Err(e) => return Err(e),
    };
    Ok(TransferOutcome {
        measured: outcome,
        branch_probability,
        fidelity: receiver_state.map(|r| qubit_fidelity(&r, target)),
        receiver_state,
        success,
    })
}

/// Runs all stages and reports both measurement branches.
pub fn run_transfer(schedule: &ProtocolSchedule, target: &QubitState, gammas: [f64; 3]) -> Result<TransferReport> {
    let roles = &schedule.roles;
    let psi = initial_state(target, roles);
    let psi = stage1_entangle(&psi, roles, gammas[roles.receiver - 1], schedule.t1)?;
    let psi = stage2_local_rabi(&psi, roles.sender, gammas[roles.sender - 1], schedule.tau)?;
    Ok(TransferReport {
        success: branch(&psi, schedule, target, Spin::Excited)?,
        failure: branch(&psi, schedule, target, Spin::Ground)?,
    })
}

/// Fits the relative phase `φ` of `diag(1, e^{iφ})` that maximizes the mean
/// success-branch fidelity over a fixed set of complex probe targets.
pub fn fit_correction_phase(roles: PartyRoles, k1: u32, tau: f64, gammas: [f64; 3]) -> Result<f64> {
    let bare = ProtocolSchedule::new(roles, k1, tau, gammas[roles.receiver - 1], DenseOperator::identity(2))?;
    let mut received = Vec::new();
    for &(theta, chi) in &[(0.3, 0.0), (0.7, 1.1), (1.2, -2.0), (2.0, 0.4), (0.9, 2.9)] {
        let target = QubitState::new(c(f64::cos(theta), 0.0), Complex64::from_polar(f64::sin(theta), chi))?;
        let report = run_transfer(&bare, &target, gammas)?;
        if let Some(r) = report.success.receiver_state {
            received.push((target, r));
        }
    }
    if received.is_empty() {
        return Err(Error::InvalidArgument(format!("no success branch at tau = {tau}")));
    }
    let objective = |phase: f64| {
        let u = phase_correction(phase);
        received
            .iter()
            .map(|(t, r)| qubit_fidelity(&apply_correction(&u, r).expect("unitary"), t))
            .sum::<f64>()
    };

    let steps = 720;
    let h = 2.0 * PI / steps as f64;
    let coarse = (0..steps)
        .map(|i| -PI + i as f64 * h)
        .max_by(|a, b| objective(*a).total_cmp(&objective(*b)))
        .expect("nonempty scan");

    // golden-section refinement on [coarse - h, coarse + h]
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (coarse - h, coarse + h);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        }
    }
    let phase = 0.5 * (a + b);
    Ok(phase - 2.0 * PI * ((phase + PI) / (2.0 * PI)).floor())
}

/// Success probability for the real target `cos θ|e⟩ + sin θ|g⟩`.
pub fn p_theta(theta: f64, tau: f64) -> f64 {
    let (ct, st) = (theta.cos(), theta.sin());
    let (cu, su) = (tau.cos(), tau.sin());
    ct * ct * cu * cu + st * st * su * su
}

/// Closed-form fidelity of the success branch. Signed: its modulus is the
/// physical overlap.
pub fn f_theta(theta: f64, tau: f64) -> Result<f64> {
    let p = p_theta(theta, tau);
    if p < 1e-15 {
        return Err(Error::UndefinedFidelity { theta, probability: p });
    }
    let (ct, st) = (theta.cos(), theta.sin());
    Ok((ct * ct * tau.cos() + st * st * tau.sin()) / p.sqrt())
}

/// θ-average of `p_theta` from ⟨cos²θ⟩ = ⟨sin²θ⟩ = ½.
pub fn average_success(tau: f64) -> f64 {
    0.5 * tau.cos().powi(2) + 0.5 * tau.sin().powi(2)
}

/// Trapezoid rule with `n` uniform nodes on the full period.
pub fn average_success_quadrature(tau: f64, n: usize) -> f64 {
    periodic_trapezoid(n, |theta| Ok(p_theta(theta, tau))).expect("integrand total")
}

pub fn average_fidelity(tau: f64) -> Result<f64> {
    average_fidelity_with(tau, DEFAULT_QUADRATURE_POINTS)
}

/// θ-average of `f_theta` by the periodic trapezoid rule on `n` nodes.
pub fn average_fidelity_with(tau: f64, n: usize) -> Result<f64> {
    periodic_trapezoid(n, |theta| {
        let p = p_theta(theta, tau);
        if p < 1e-12 {
            return Err(Error::SingularIntegrand { theta, probability: p });
        }
        f_theta(theta, tau)
    })
}

fn periodic_trapezoid(n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    let h = 2.0 * PI / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        sum += f(i as f64 * h)?;
    }
    Ok(sum / n as f64)
}

/// Number of successes in `n` Bernoulli(`p`) draws.
///
/// Draws are split into batches of [`SAMPLE_BATCH`]; batch `b` uses
/// `ChaCha8Rng::seed_from_u64(seed)` jumped to stream `b`, so the count is
/// independent of how batches are scheduled.
pub fn sample_successes_with(exec: Execution, p: f64, n: u64, seed: u64) -> u64 {
    let batch = SAMPLE_BATCH as u64;
    let batches = n.div_ceil(batch);
    exec.map_indexed(batches as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let len = batch.min(n - b as u64 * batch);
        (0..len).filter(|_| rng.gen::<f64>() < p).count() as u64
    })
    .into_iter()
    .sum()
}

/// Empirical success rate over `n` runs with `θ` drawn uniformly from
/// `[0, 2π)` for each run.
///
/// Stages 1 and 2 are linear, so the two basis inputs are propagated once and
/// each draw combines them. Batching and streams follow
/// [`sample_successes_with`].
pub fn sample_average_success_with(
    exec: Execution,
    schedule: &ProtocolSchedule,
    gammas: [f64; 3],
    n: u64,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let roles = &schedule.roles;
    let evolve = |q: QubitState| -> Result<CVector> {
        let psi = stage1_entangle(
            &initial_state(&q, roles),
            roles,
            gammas[roles.receiver - 1],
            schedule.t1,
        )?;
        Ok(
            stage2_local_rabi(&psi, roles.sender, gammas[roles.sender - 1], schedule.tau)?
                .amplitudes()
                .clone(),
        )
    };
    let (ve, vg) = (evolve(QubitState::excited())?, evolve(QubitState::ground())?);
    let sender_bit = 1usize << (N_ATOMS - roles.sender);
    let success_rows: Vec<usize> = (0..ve.len()).filter(|i| i & sender_bit != 0).collect();

    let batch = SAMPLE_BATCH as u64;
    let batches = n.div_ceil(batch);
    let successes: u64 = exec
        .map_indexed(batches as usize, |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = batch.min(n - b as u64 * batch);
            (0..len)
                .filter(|_| {
                    let theta = 2.0 * PI * rng.gen::<f64>();
                    let (ct, st) = (theta.cos(), theta.sin());
                    let p: f64 = success_rows.iter().map(|&i| (ve[i] * ct + vg[i] * st).norm_sqr()).sum();
                    rng.gen::<f64>() < p
                })
                .count() as u64
        })
        .into_iter()
        .sum();
    Ok(successes as f64 / n as f64)
}

/// Empirical success rate of `n` simulated protocol runs.
pub fn sample_outcomes(
    schedule: &ProtocolSchedule,
    target: &QubitState,
    gammas: [f64; 3],
    n: u64,
    seed: u64,
) -> Result<f64> {
    sample_outcomes_with(Execution::default(), schedule, target, gammas, n, seed)
}

pub fn sample_outcomes_with(
    exec: Execution,
    schedule: &ProtocolSchedule,
    target: &QubitState,
    gammas: [f64; 3],
    n: u64,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let p = run_transfer(schedule, target, gammas)?.success_probability();
    Ok(sample_successes_with(exec, p, n, seed) as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    const GAMMAS: [f64; 3] = [0.8, 1.3, 0.6];

    #[test]
    fn roles_validated() {
        assert_eq!(PartyRoles::new(1, 2).unwrap(), PartyRoles::alice_to_bob());
        assert_eq!(PartyRoles::new(2, 3).unwrap().bystander, 1);
        assert!(PartyRoles::new(2, 2).is_err());
        assert!(PartyRoles::new(0, 2).is_err());
        assert!(PartyRoles::new(1, 4).is_err());
        assert_eq!(PartyRoles::all().len(), 6);
    }

    #[test]
    fn initial_states() {
        let ab = PartyRoles::alice_to_bob();
        assert_eq!(
            initial_state(&QubitState::excited(), &ab),
            StateVector::basis_state("egg").unwrap()
        );
        assert_eq!(
            initial_state(&QubitState::ground(), &ab),
            StateVector::basis_state("ggg").unwrap()
        );
        let theta = 0.4;
        let psi = initial_state(&QubitState::from_theta(theta), &PartyRoles::bob_to_charlie());
        assert_eq!(psi.amplitude("geg").unwrap(), c(theta.cos(), 0.0));
        assert_eq!(psi.amplitude("ggg").unwrap(), c(theta.sin(), 0.0));
    }

    #[test]
    fn ground_state_stationary_in_stage1() {
        let roles = PartyRoles::alice_to_bob();
        let ggg = StateVector::basis_state("ggg").unwrap();
        for t in [0.0, 0.7, 3.0, 11.0] {
            assert_eq!(stage1_entangle(&ggg, &roles, 1.3, t).unwrap(), ggg);
        }
        assert!(matches!(
            stage1_entangle(&ggg, &roles, 0.0, 1.0),
            Err(Error::ZeroReceiverGamma(_))
        ));
    }

    #[test]
    fn stage1_moves_excitation_with_minus_i() {
        let roles = PartyRoles::alice_to_bob();
        let out = stage1_entangle(&StateVector::basis_state("egg").unwrap(), &roles, 2.0, FRAC_PI_2 / 2.0).unwrap();
        assert!((out.amplitude("eeg").unwrap() - c(0.0, -1.0)).norm() < 1e-12);

        let theta = 0.9;
        let psi = initial_state(&QubitState::from_theta(theta), &roles);
        let out = stage1_entangle(&psi, &roles, 1.0, FRAC_PI_2).unwrap();
        assert!((out.population("eeg").unwrap() - theta.cos().powi(2)).abs() < 1e-12);
        assert!((out.population("ggg").unwrap() - theta.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn stage2_rotations() {
        let psi = StateVector::basis_state("eeg").unwrap();
        let same = stage2_local_rabi(&psi, 1, 0.5, 0.0).unwrap();
        assert!((psi.overlap(&same).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let out = stage2_local_rabi(&psi, 1, 0.5, FRAC_PI_2).unwrap();
        assert!((out.population("geg").unwrap() - 1.0).abs() < 1e-12);
        assert!(stage2_local_rabi(&psi, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn stage2_branch_amplitudes() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let roles = PartyRoles::alice_to_bob();
        let psi = initial_state(&QubitState::new(alpha, beta).unwrap(), &roles);
        let psi = stage1_entangle(&psi, &roles, 1.0, FRAC_PI_2).unwrap();
        let psi = stage2_local_rabi(&psi, 1, 1.0, FRAC_PI_4).unwrap();
        // sender-e branch carries −i(α cos τ |e⟩ + β sin τ |g⟩)
        let s = FRAC_PI_4.cos();
        assert!((psi.amplitude("eeg").unwrap() - c(0.0, -1.0) * alpha * s).norm() < 1e-12);
        assert!((psi.amplitude("egg").unwrap() - c(0.0, -1.0) * beta * s).norm() < 1e-12);
    }

    #[test]
    fn transfer_at_quarter_period() {
        for roles in [
            PartyRoles::alice_to_bob(),
            PartyRoles::alice_to_charlie(),
            PartyRoles::bob_to_charlie(),
        ] {
            let schedule = ProtocolSchedule::standard(roles, FRAC_PI_4, GAMMAS).unwrap();
            for theta in [0.0, FRAC_PI_4, 1.0, 2.5] {
                let report = run_transfer(&schedule, &QubitState::from_theta(theta), GAMMAS).unwrap();
                assert!((report.success.fidelity.unwrap() - 1.0).abs() < 1e-10);
                assert!((report.success_probability() - 0.5).abs() < 1e-12);
                assert!((report.success.branch_probability + report.failure.branch_probability - 1.0).abs() < 1e-12);
                assert!(report.success.success && !report.failure.success);
            }
        }
    }

    #[test]
    fn averaged_sampling_is_execution_independent() {
        let schedule = ProtocolSchedule::standard(PartyRoles::bob_to_charlie(), 0.4, GAMMAS).unwrap();
        let seq = sample_average_success_with(Execution::Sequential, &schedule, GAMMAS, 10_000, 5).unwrap();
        let par = sample_average_success_with(Execution::default(), &schedule, GAMMAS, 10_000, 5).unwrap();
        assert_eq!(seq, par);
        assert!((seq - 0.5).abs() < 4.0 * (0.25f64 / 10_000.0).sqrt());
    }

    #[test]
    fn zero_probability_branch_is_reported() {
        let schedule = ProtocolSchedule::standard(PartyRoles::alice_to_bob(), FRAC_PI_2, GAMMAS).unwrap();
        let report = run_transfer(&schedule, &QubitState::excited(), GAMMAS).unwrap();
        assert!(report.success.branch_probability < 1e-15);
        assert!(report.success.receiver_state.is_none() && report.success.fidelity.is_none());
        assert!((report.failure.branch_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fitted_phase_matches_frozen_constant() {
        for roles in PartyRoles::all() {
            for k1 in 0..2 {
                let phase = fit_correction_phase(roles, k1, FRAC_PI_4, GAMMAS).unwrap();
                let expected = derived_correction(k1).entries()[(1, 1)];
                assert!(
                    (Complex64::from_polar(1.0, phase) - expected).norm() < 1e-6,
                    "{roles:?} k1={k1}: {phase}"
                );
            }
        }
    }

    #[test]
    fn half_pi_rotation_is_not_the_fix() {
        let schedule =
            ProtocolSchedule::new(PartyRoles::alice_to_bob(), 0, FRAC_PI_4, GAMMAS[1], half_pi_rotation()).unwrap();
        let report = run_transfer(&schedule, &QubitState::from_theta(FRAC_PI_4), GAMMAS).unwrap();
        assert!((report.success.fidelity.unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn schedule_validation() {
        let roles = PartyRoles::alice_to_bob();
        assert!(ProtocolSchedule::new(roles, 0, 0.1, 0.0, DenseOperator::identity(2)).is_err());
        let bad = DenseOperator::identity(2).scale(2.0);
        assert!(matches!(
            ProtocolSchedule::new(roles, 0, 0.1, 1.0, bad),
            Err(Error::NotUnitary { .. })
        ));
        let s = ProtocolSchedule::new(roles, 2, 0.1, 2.0, DenseOperator::identity(2)).unwrap();
        assert!((s.t1 - 2.5 * PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        assert!((p_theta(FRAC_PI_4, 0.37) - 0.5).abs() < 1e-15);
        assert!(p_theta(0.0, FRAC_PI_2) < 1e-30);
        for theta in [0.0, 0.3, 1.7, 4.0] {
            assert!((f_theta(theta, FRAC_PI_4).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(f_theta(0.0, 0.0).unwrap(), 1.0);
        assert!((f_theta(0.0, 3.0 * FRAC_PI_4).unwrap() + 1.0).abs() < 1e-14);
        assert!(matches!(f_theta(0.0, FRAC_PI_2), Err(Error::UndefinedFidelity { .. })));
    }

    #[test]
    fn averages() {
        for tau in [0.0, 0.3, FRAC_PI_4, 2.0] {
            assert!((average_success(tau) - 0.5).abs() < 1e-15);
            assert!((average_success_quadrature(tau, 10_000) - 0.5).abs() < 1e-9);
        }
        assert!((average_fidelity(FRAC_PI_4).unwrap() - 1.0).abs() < 1e-9);
        assert!(average_fidelity(FRAC_PI_4 + 0.1).unwrap() < 1.0);
        assert!(matches!(
            average_fidelity(FRAC_PI_2),
            Err(Error::SingularIntegrand { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_schedule_independent() {
        let a = sample_successes_with(Execution::Sequential, 0.37, 20_001, 42);
        let b = sample_successes_with(Execution::Parallel, 0.37, 20_001, 42);
        assert_eq!(a, b);
        assert_ne!(a, sample_successes_with(Execution::Sequential, 0.37, 20_001, 43));
        assert_eq!(sample_successes_with(Execution::Sequential, 0.0, 5000, 1), 0);
        assert_eq!(sample_successes_with(Execution::Sequential, 1.0, 5000, 1), 5000);
    }

    #[test]
    fn single_sample_reproducible() {
        let schedule = ProtocolSchedule::standard(PartyRoles::alice_to_bob(), FRAC_PI_4, GAMMAS).unwrap();
        let target = QubitState::from_theta(0.3);
        let first = sample_outcomes(&schedule, &target, GAMMAS, 1, 9).unwrap();
        for _ in 0..5 {
            assert_eq!(sample_outcomes(&schedule, &target, GAMMAS, 1, 9).unwrap(), first);
        }
        assert!(sample_outcomes(&schedule, &target, GAMMAS, 0, 9).is_err());
    }

    #[test]
    fn certain_failure_samples_zero() {
        let schedule = ProtocolSchedule::standard(PartyRoles::alice_to_bob(), FRAC_PI_2, GAMMAS).unwrap();
        let rate = sample_outcomes(&schedule, &QubitState::excited(), GAMMAS, 10_000, 3).unwrap();
        assert_eq!(rate, 0.0);
    }
}
