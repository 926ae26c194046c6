use super::{c, CMatrix, CVector, QubitState, Spin, StateVector, ALGEBRA_TOL};
use crate::error::{Error, Result};

/// Branches below this probability cannot be projected onto.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-15;

fn check_site(psi: &StateVector, site: usize) -> Result<()> {
    let n = psi.n_atoms();
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    Ok(())
}

fn spin_of(label: &str, site: usize) -> Spin {
    Spin::from_char(label.as_bytes()[site - 1] as char).expect("labels validated on construction")
}

/// Born probability of finding atom `site` in `outcome`.
pub fn outcome_probability(psi: &StateVector, site: usize, outcome: Spin) -> Result<f64> {
    check_site(psi, site)?;
    Ok(psi
        .basis()
        .iter()
        .zip(psi.amplitudes().iter())
        .filter(|(label, _)| spin_of(label, site) == outcome)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Projective measurement of one atom: returns the branch probability and the
/// renormalized post-measurement state.
pub fn measure_qubit(psi: &StateVector, site: usize, outcome: Spin) -> Result<(f64, StateVector)> {
    check_site(psi, site)?;
    let projected = CVector::from_iterator(
        psi.dim(),
        psi.basis().iter().zip(psi.amplitudes().iter()).map(|(label, &a)| {
            if spin_of(label, site) == outcome {
                a
            } else {
                c(0.0, 0.0)
            }
        }),
    );
    let probability: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
    if probability < MIN_BRANCH_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch { probability });
    }
    Ok((probability.min(1.0), psi.with_amplitudes(projected)?))
}

/// Reduced 2×2 density matrix of one atom in `(e, g)` order.
fn reduced_density(psi: &StateVector, site: usize) -> CMatrix {
    let mut rho = CMatrix::zeros(2, 2);
    let idx = |s: Spin| if s == Spin::Excited { 0 } else { 1 };
    for (label, a) in psi.basis().iter().zip(psi.amplitudes().iter()) {
        let s = spin_of(label, site);
        let mut partner: Vec<u8> = label.bytes().collect();
        partner[site - 1] = s.flipped().as_char() as u8;
        let partner = String::from_utf8(partner).expect("ascii label");
        rho[(idx(s), idx(s))] += a * a.conj();
        if let Some(b) = psi.amplitude(&partner) {
            rho[(idx(s), idx(s.flipped()))] += a * b.conj();
        }
    }
    rho
}

/// Single-qubit factor of atom `site`, which must be unentangled with the
/// rest of the register. The returned state is phase-fixed (see
/// [`QubitState::phase_fixed`]).
pub fn extract_qubit(psi: &StateVector, site: usize) -> Result<QubitState> {
    check_site(psi, site)?;
    let rho = reduced_density(psi, site);
    let (a, d, b) = (rho[(0, 0)].re, rho[(1, 1)].re, rho[(0, 1)]);
    let trace = a + d;
    let gap = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
    let dominant = (0.5 * (trace + gap) / trace).min(1.0);
    if dominant < 1.0 - 1e-10 {
        return Err(Error::ResidualEntanglement { site, dominant });
    }
    // For a pure ρ = |q⟩⟨q| the heavier column is q·q_k*.
    let k = if a >= d { 0 } else { 1 };
    let scale = rho[(k, k)].re.sqrt();
    let q = QubitState::normalized(rho[(0, k)] / scale, rho[(1, k)] / scale)?;
    Ok(q.phase_fixed())
}

/// `|⟨a|b⟩|`, clamped to `[0, 1]`.
pub fn qubit_fidelity(a: &QubitState, b: &QubitState) -> f64 {
    let overlap = a.alpha.conj() * b.alpha + a.beta.conj() * b.beta;
    let f = overlap.norm();
    debug_assert!(f <= 1.0 + 10.0 * ALGEBRA_TOL);
    f.min(1.0)
}
