//! Parameter sweeps over the protocol and the secular approximation.
//!
//! Rows are computed through [`Execution`] and always returned in grid order,
//! so sequential and parallel runs emit identical bytes.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hamiltonians::secular_error_with;
use crate::protocol::{f_theta, p_theta, run_transfer, PartyRoles, ProtocolSchedule};
use crate::qcore::{DenseOperator, QubitState, StateVector};

pub const CURVE_HEADER: &str = "tau,theta,p_theta,f_theta,sim_probability,sim_fidelity";
pub const SECULAR_HEADER: &str = "ratio,j0,gamma,max_deviation";

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// 17 significant digits in scientific notation; non-finite values print `nan`.
pub fn format_sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// One (τ, θ) grid point. `f_theta` and `sim_fidelity` are NaN where the
/// success branch has zero probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub tau: f64,
    pub theta: f64,
    pub p_theta: f64,
    pub f_theta: f64,
    pub sim_probability: f64,
    pub sim_fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct CurveSpec {
    pub roles: PartyRoles,
    pub gammas: [f64; 3],
    pub k1: u32,
    pub correction: DenseOperator,
    pub thetas: Vec<f64>,
    pub taus: Vec<f64>,
}

/// Closed forms next to full simulation on the τ-major grid.
pub fn fidelity_curve(exec: Execution, spec: &CurveSpec) -> Result<Vec<SweepRecord>> {
    let n_theta = spec.thetas.len();
    let gamma_receiver = spec.gammas[spec.roles.receiver - 1];
    let schedules = spec
        .taus
        .iter()
        .map(|&tau| ProtocolSchedule::new(spec.roles, spec.k1, tau, gamma_receiver, spec.correction.clone()))
        .collect::<Result<Vec<_>>>()?;
    exec.try_map_indexed(n_theta * spec.taus.len(), |idx| {
        let (ti, hi) = (idx / n_theta, idx % n_theta);
        let (tau, theta) = (spec.taus[ti], spec.thetas[hi]);
        let report = run_transfer(&schedules[ti], &QubitState::from_theta(theta), spec.gammas)?;
        Ok(SweepRecord {
            tau,
            theta,
            p_theta: p_theta(theta, tau),
            f_theta: f_theta(theta, tau).unwrap_or(f64::NAN),
            sim_probability: report.success.branch_probability,
            sim_fidelity: report.success.fidelity.unwrap_or(f64::NAN),
        })
    })
}

pub fn curve_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for r in records {
        let fields = [r.tau, r.theta, r.p_theta, r.f_theta, r.sim_probability, r.sim_fidelity];
        let line: Vec<String> = fields.iter().map(|&x| format_sci(x)).collect();
        writeln!(out, "{}", line.join(",")).expect("write to string");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecularRecord {
    /// Γ/J₀
    pub ratio: f64,
    pub j0: f64,
    pub gamma: f64,
    pub max_deviation: f64,
}

/// Secular-approximation error for each Γ/J₀ in `ratios`, with the same Γ on
/// all three atoms, over `time_points` uniform times in `[0, π/(2Γ)]`.
pub fn secular_sweep(
    exec: Execution,
    j0: f64,
    ratios: &[f64],
    time_points: usize,
    psi0: &StateVector,
) -> Result<Vec<SecularRecord>> {
    if time_points < 2 {
        return Err(Error::InvalidArgument(
            "secular sweep needs at least 2 time points".into(),
        ));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument(format!("ratio must be positive, got {r}")));
    }
    exec.try_map_indexed(ratios.len(), |i| {
        let gamma = ratios[i] * j0;
        let grid = linspace(0.0, FRAC_PI_2 / gamma, time_points);
        let max_deviation = secular_error_with(exec, j0, [gamma; 3], psi0, &grid)?;
        Ok(SecularRecord {
            ratio: ratios[i],
            j0,
            gamma,
            max_deviation,
        })
    })
}

pub fn secular_csv(records: &[SecularRecord]) -> String {
    let mut out = String::new();
    out.push_str(SECULAR_HEADER);
    out.push('\n');
    for r in records {
        let line: Vec<String> = [r.ratio, r.j0, r.gamma, r.max_deviation]
            .iter()
            .map(|&x| format_sci(x))
            .collect();
        writeln!(out, "{}", line.join(",")).expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::phase_correction;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn spec(thetas: Vec<f64>, taus: Vec<f64>) -> CurveSpec {
        CurveSpec {
            roles: PartyRoles::alice_to_bob(),
            gammas: [1.0, 1.0, 1.0],
            k1: 0,
            correction: phase_correction(0.0),
            thetas,
            taus,
        }
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, PI, 5);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], PI);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn sci_format_is_fixed_width_mantissa() {
        assert_eq!(format_sci(1.0), "1.0000000000000000e0");
        assert_eq!(format_sci(-0.00125), "-1.2500000000000000e-3");
        assert_eq!(format_sci(f64::NAN), "nan");
    }

    #[test]
    fn two_point_grid_two_rows() {
        let rows = fidelity_curve(Execution::Sequential, &spec(vec![FRAC_PI_4], vec![0.0, FRAC_PI_4])).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[1].f_theta - 1.0).abs() < 1e-14);
        let csv = curve_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().next().unwrap(), CURVE_HEADER);
    }

    #[test]
    fn zero_probability_rows_are_nan() {
        let rows = fidelity_curve(Execution::Sequential, &spec(vec![0.0], vec![FRAC_PI_2])).unwrap();
        assert!(rows[0].f_theta.is_nan() && rows[0].sim_fidelity.is_nan());
        assert!(curve_csv(&rows).lines().nth(1).unwrap().contains(",nan,"));
    }

    #[test]
    fn peak_at_quarter_period() {
        let taus = linspace(0.0, PI, 81);
        let rows = fidelity_curve(Execution::default(), &spec(vec![FRAC_PI_4], taus)).unwrap();
        let best = rows.iter().max_by(|a, b| a.f_theta.total_cmp(&b.f_theta)).unwrap();
        assert!((best.tau - FRAC_PI_4).abs() < 1e-12);
        assert!((best.f_theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequential_matches_parallel() {
        let s = spec(linspace(0.0, 2.0 * PI, 9), linspace(0.0, PI, 7));
        let a = fidelity_curve(Execution::Sequential, &s).unwrap();
        let b = fidelity_curve(Execution::Parallel, &s).unwrap();
        assert_eq!(curve_csv(&a), curve_csv(&b));
    }

    #[test]
    fn secular_rows_ordered() {
        let psi = StateVector::basis_state("egg").unwrap();
        let rows = secular_sweep(Execution::Parallel, 1.0, &[0.1, 0.01], 21, &psi).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].max_deviation > rows[1].max_deviation);
        assert!(secular_sweep(Execution::Parallel, 1.0, &[0.0], 21, &psi).is_err());
        assert!(secular_sweep(Execution::Parallel, 1.0, &[0.1], 1, &psi).is_err());
    }
}
