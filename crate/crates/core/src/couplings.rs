//! Effective drive amplitudes and Ising couplings of the three-cavity ring.
//!
//! Cavities are indexed cyclically: pair phases are stored as
//! `phi = [φ₂₁, φ₃₂, φ₁₃]` and couplings as `j = [J₁₂, J₂₃, J₃₁]`, so pair
//! `p` joins atoms `p + 1` and `(p + 1) % 3 + 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::Complex64;

/// Allowed |Δ/κ − 1| for "Δ ≈ κ".
pub const DETUNING_MISMATCH_MAX: f64 = 0.2;
/// Minimum κ/g for "κ ≫ g".
pub const KAPPA_OVER_G_MIN: f64 = 20.0;
/// Maximum Γ/|J| for "Γ ≪ J".
pub const GAMMA_OVER_J_MAX: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    pub kappa: f64,
    pub g: f64,
    pub delta: f64,
    pub epsilon: [Complex64; 3],
    /// `[φ₂₁, φ₃₂, φ₁₃]`, radians.
    pub phi: [f64; 3],
    pub gamma: [f64; 3],
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.kappa, self.g, self.delta]
            .iter()
            .chain(&self.phi)
            .chain(&self.gamma)
            .all(|v| v.is_finite())
            && self.epsilon.iter().all(|e| e.re.is_finite() && e.im.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParams(format!("g must be positive, got {}", self.g)));
        }
        if self.delta == 0.0 {
            return Err(Error::InvalidParams("delta must be nonzero".into()));
        }
        if let Some(g) = self.gamma.iter().find(|&&g| g < 0.0) {
            return Err(Error::InvalidParams(format!(
                "laser strengths must be nonnegative, got {g}"
            )));
        }
        Ok(())
    }

    /// Relabels atom `i` as atom `i + 1` (cyclically).
    pub fn rotated(&self) -> Self {
        let rot = |a: [f64; 3]| [a[2], a[0], a[1]];
        Self {
            epsilon: [self.epsilon[2], self.epsilon[0], self.epsilon[1]],
            phi: rot(self.phi),
            gamma: rot(self.gamma),
            ..self.clone()
        }
    }
}

/// Equal drives `ε₀` and equal fiber phases `φ₀` on all three cavities.
pub fn symmetric_params(
    eps0: Complex64,
    phi0: f64,
    kappa: f64,
    g: f64,
    delta: f64,
    gamma: [f64; 3],
) -> Result<PhysicalParams> {
    let p = PhysicalParams {
        kappa,
        g,
        delta,
        epsilon: [eps0; 3],
        phi: [phi0; 3],
        gamma,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveCouplings {
    /// g²/Δ
    pub chi: f64,
    /// iΔ + κ
    pub m: Complex64,
    /// κ³ e^{i(φ₂₁+φ₃₂+φ₁₃)}
    pub w3: Complex64,
    pub alpha: [Complex64; 3],
    /// `[J₁₂, J₂₃, J₃₁]`
    pub j: [f64; 3],
}

impl EffectiveCouplings {
    /// Largest pairwise |Jₐ − J_b|.
    pub fn j_spread(&self) -> f64 {
        spread(&self.j.map(|j| Complex64::new(j, 0.0)))
    }

    /// Largest pairwise |αₐ − α_b|.
    pub fn alpha_spread(&self) -> f64 {
        spread(&self.alpha)
    }
}

fn spread(v: &[Complex64; 3]) -> f64 {
    [(0, 1), (1, 2), (2, 0)]
        .iter()
        .map(|&(a, b)| (v[a] - v[b]).norm())
        .fold(0.0, f64::max)
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Field amplitudes αᵢ and Ising couplings Jᵢⱼ for a physical configuration.
pub fn derive_couplings(p: &PhysicalParams) -> Result<EffectiveCouplings> {
    p.validate()?;
    let kappa = p.kappa;
    let chi = p.g * p.g / p.delta;
    let m = Complex64::new(kappa, p.delta);
    let w3 = kappa.powi(3) * cis(p.phi[0] + p.phi[1] + p.phi[2]);
    let m2 = m * m;
    let m3 = m2 * m;
    let denom = m3 - w3;
    if denom.norm() < 1e-15 * m3.norm() {
        return Err(Error::SingularDenominator {
            magnitude: denom.norm(),
        });
    }

    let eps = &p.epsilon;
    let phi = &p.phi;
    let alpha: [Complex64; 3] = std::array::from_fn(|a| {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        (m2 * eps[a] + kappa * kappa * cis(phi[b] + phi[c]) * eps[b] + m * kappa * cis(phi[c]) * eps[c]) / denom
    });
    let j: [f64; 3] = std::array::from_fn(|pair| {
        let (b, c) = ((pair + 1) % 3, (pair + 2) % 3);
        let kernel = (m * cis(phi[pair]) + kappa * cis(phi[b] + phi[c])) / denom;
        2.0 * kappa * chi * chi * (alpha[pair] * alpha[b].conj() * kernel).im
    });

    Ok(EffectiveCouplings { chi, m, w3, alpha, j })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    /// |Δ/κ − 1|
    pub detuning_mismatch: f64,
    pub kappa_over_g: f64,
    /// max Γᵢ / min |Jᵢⱼ|; infinite when some J vanishes under a nonzero drive.
    pub gamma_over_j: f64,
    pub detuning_ok: bool,
    pub strong_cavity_ok: bool,
    pub secular_ok: bool,
    pub all_ok: bool,
}

/// Checks Δ ≈ κ ≫ g and Γ ≪ J against the module thresholds.
pub fn validate_regime(p: &PhysicalParams, c: &EffectiveCouplings) -> RegimeReport {
    let detuning_mismatch = (p.delta / p.kappa - 1.0).abs();
    let kappa_over_g = p.kappa / p.g;
    let gamma_max = p.gamma.iter().copied().fold(0.0, f64::max);
    let j_min = c.j.iter().map(|j| j.abs()).fold(f64::INFINITY, f64::min);
    let gamma_over_j = if gamma_max == 0.0 { 0.0 } else { gamma_max / j_min };
    let detuning_ok = detuning_mismatch <= DETUNING_MISMATCH_MAX;
    let strong_cavity_ok = kappa_over_g >= KAPPA_OVER_G_MIN;
    let secular_ok = gamma_over_j <= GAMMA_OVER_J_MAX;
    RegimeReport {
        detuning_mismatch,
        kappa_over_g,
        gamma_over_j,
        detuning_ok,
        strong_cavity_ok,
        secular_ok,
        all_ok: detuning_ok && strong_cavity_ok && secular_ok,
    }
}

/// κ = Δ = 1, κ/g = 50, ε₀ = 1, φ₀ = 0.3, and every Γᵢ = 0.01·|J₀|.
pub fn reference_params() -> PhysicalParams {
    let mut p = symmetric_params(Complex64::new(1.0, 0.0), 0.3, 1.0, 0.02, 1.0, [0.0; 3])
        .expect("reference parameters are valid");
    let j0 = derive_couplings(&p).expect("nonsingular").j[0];
    p.gamma = [0.01 * j0.abs(); 3];
    p
}
