//! Self-checks run by `aqst validate`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use crate::couplings::{derive_couplings, reference_params};
use crate::exec::Execution;
use crate::hamiltonians::{build_h_secular_form, restrict, SecularForm, SubspaceBasis};
use crate::protocol::{
    average_success, average_success_quadrature, initial_state, run_transfer, stage1_entangle, PartyRoles,
    ProtocolSchedule,
};
use crate::qcore::{c, hermitian_eigensystem, max_abs_diff, CMatrix, DenseOperator, QubitState};
use crate::sweep::secular_sweep;

pub const CHECKS: [&str; 7] = [
    "block-matrix",
    "eigenvalues",
    "stage1-transfer",
    "success-average",
    "fidelity",
    "secular-monotone",
    "coupling-symmetry",
];

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Secular Hamiltonian with only Γ₂ = 1, expected on the ring subspace.
pub fn expected_block_matrix(gamma2: f64) -> CMatrix {
    let mut m = CMatrix::zeros(6, 6);
    for (a, b) in [(0, 1), (1, 0), (3, 4), (4, 3)] {
        m[(a, b)] = c(gamma2, 0.0);
    }
    m
}

/// Reference eigenvector rows for the block matrix, in subspace order.
pub fn reference_eigenbasis() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let rows = [
         s,  s, 0.0, 0.0, 0.0, 0.0,
        -s,  s, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0,  s,  s, 0.0,
        0.0, 0.0, 0.0, -s,  s, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, -1.0, 0.0, 0.0, 0.0,
    ];
    CMatrix::from_row_iterator(6, 6, rows.iter().map(|&v| c(v, 0.0)))
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult {
            name,
            passed: true,
            detail,
        },
        Err(detail) => CheckResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn restricted(form: SecularForm) -> Result<CMatrix, String> {
    restrict(
        &build_h_secular_form([0.0, 1.0, 0.0], form),
        &SubspaceBasis::ising_ring(),
    )
    .map_err(|e| e.to_string())
}

fn run_one(name: &'static str, form: SecularForm) -> CheckResult {
    match name {
        "block-matrix" => check(name, || {
            let dev = max_abs_diff(&restricted(form)?, &expected_block_matrix(1.0));
            if dev <= 1e-14 {
                Ok("restricted secular Hamiltonian matches the 6x6 block pattern".into())
            } else {
                Err(format!("max entry deviation {dev:e}"))
            }
        }),
        "eigenvalues" => check(name, || {
            let h = DenseOperator::new(restricted(form)?).map_err(|e| e.to_string())?;
            let sys = hermitian_eigensystem(&h).map_err(|e| e.to_string())?;
            let expected = [-1.0, -1.0, 0.0, 0.0, 1.0, 1.0];
            let dev = sys
                .eigenvalues
                .iter()
                .zip(expected)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev > 1e-12 {
                return Err(format!("spectrum {:?}, expected {expected:?}", sys.eigenvalues));
            }
            // every reference row is an eigenvector; eigenspace projectors agree
            let reference = reference_eigenbasis();
            for (value, _) in sys.clusters(1e-9) {
                let mut p = CMatrix::zeros(6, 6);
                for r in 0..6 {
                    let row = reference.row(r).transpose();
                    let rayleigh = (row.adjoint() * h.entries() * &row)[(0, 0)].re;
                    if (rayleigh - value).abs() < 1e-9 {
                        p += &row * row.adjoint();
                    }
                }
                let dev = max_abs_diff(&p, &sys.eigenspace_projector(value, 1e-9));
                if dev > 1e-10 {
                    return Err(format!("eigenspace {value} differs from reference rows by {dev:e}"));
                }
            }
            Ok(format!(
                "spectrum {expected:?}; reference eigenbasis spans the same eigenspaces"
            ))
        }),
        "stage1-transfer" => check(name, || {
            let roles = PartyRoles::alice_to_bob();
            let egg = initial_state(&QubitState::excited(), &roles);
            for k in 0..2 {
                let t1 = (k as f64 * PI + FRAC_PI_2) / 1.0;
                let out = stage1_entangle(&egg, &roles, 1.0, t1).map_err(|e| e.to_string())?;
                let pop = out.population("eeg").unwrap_or(0.0);
                if (pop - 1.0).abs() > 1e-12 {
                    return Err(format!("k = {k}: population on eeg is {pop}"));
                }
            }
            Ok("full transfer egg -> eeg at k = 0, 1".into())
        }),
        "success-average" => check(name, || {
            for tau in [0.0, PI / 8.0, FRAC_PI_4, 1.0, 3.0 * FRAC_PI_4] {
                let (a, q) = (average_success(tau), average_success_quadrature(tau, 10_000));
                if (a - 0.5).abs() > 1e-9 || (a - q).abs() > 1e-9 {
                    return Err(format!("tau = {tau}: analytic {a}, quadrature {q}"));
                }
            }
            Ok("average success probability 1/2 for 5 values of tau".into())
        }),
        "fidelity" => check(name, || {
            let gammas = [1.0; 3];
            for roles in [
                PartyRoles::alice_to_bob(),
                PartyRoles::alice_to_charlie(),
                PartyRoles::bob_to_charlie(),
            ] {
                let schedule = ProtocolSchedule::standard(roles, FRAC_PI_4, gammas).map_err(|e| e.to_string())?;
                for i in 0..16 {
                    let theta = 2.0 * PI * i as f64 / 16.0;
                    let report =
                        run_transfer(&schedule, &QubitState::from_theta(theta), gammas).map_err(|e| e.to_string())?;
                    let f = report.success.fidelity.unwrap_or(0.0);
                    if (f - 1.0).abs() > 1e-10 {
                        return Err(format!(
                            "{}->{} theta = {theta}: fidelity {f}",
                            roles.sender, roles.receiver
                        ));
                    }
                }
            }
            Ok("fidelity 1 at tau = pi/4 for roles 1->2, 1->3, 2->3".into())
        }),
        "secular-monotone" => check(name, || {
            let psi = initial_state(&QubitState::excited(), &PartyRoles::alice_to_bob());
            let rows = secular_sweep(Execution::default(), 1.0, &[0.1, 0.03, 0.01, 0.003], 201, &psi)
                .map_err(|e| e.to_string())?;
            let devs: Vec<f64> = rows.iter().map(|r| r.max_deviation).collect();
            let listed = devs.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", ");
            if devs.windows(2).all(|w| w[1] < w[0]) {
                Ok(format!("deviations {listed}"))
            } else {
                Err(format!("not monotone: {listed}"))
            }
        }),
        "coupling-symmetry" => check(name, || {
            let cp = derive_couplings(&reference_params()).map_err(|e| e.to_string())?;
            let (js, als) = (cp.j_spread(), cp.alpha_spread());
            if js <= 1e-12 * cp.j[0].abs() && als <= 1e-12 * cp.alpha[0].norm() {
                Ok(format!("J0 = {:e}, spreads {js:e} / {als:e}", cp.j[0]))
            } else {
                Err(format!("J spread {js:e}, alpha spread {als:e}"))
            }
        }),
        _ => unreachable!("check names validated by caller"),
    }
}

/// Runs all checks, or just `only`. Returns `Err` for an unknown check name.
pub fn run_checks(only: Option<&str>, form: SecularForm) -> Result<Vec<CheckResult>, String> {
    let selected: Vec<&'static str> = match only {
        None => CHECKS.to_vec(),
        Some(name) => vec![*CHECKS
            .iter()
            .find(|c| **c == name)
            .ok_or_else(|| format!("unknown check {name:?}; available: {}", CHECKS.join(", ")))?],
    };
    Ok(selected.into_iter().map(|name| run_one(name, form)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_checks_pass() {
        let results = run_checks(None, SecularForm::Projector).unwrap();
        assert_eq!(results.len(), CHECKS.len());
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn unprojected_form_fails_block_check() {
        let r = run_checks(Some("block-matrix"), SecularForm::Literal).unwrap();
        assert!(!r[0].passed);
    }

    #[test]
    fn filtering() {
        let r = run_checks(Some("eigenvalues"), SecularForm::Projector).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].name, "eigenvalues");
        assert!(run_checks(Some("bogus"), SecularForm::Projector).is_err());
    }
}
