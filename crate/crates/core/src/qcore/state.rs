use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{c, CVector, Complex64, ALGEBRA_TOL};
use crate::error::{Error, Result};

/// Level of a single two-level atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    #[serde(rename = "e")]
    Excited,
    #[serde(rename = "g")]
    Ground,
}

impl Spin {
    pub fn from_char(ch: char) -> Option<Spin> {
        match ch {
            'e' => Some(Spin::Excited),
            'g' => Some(Spin::Ground),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Spin::Excited => 'e',
            Spin::Ground => 'g',
        }
    }

    /// σᶻ eigenvalue.
    pub fn sz(self) -> f64 {
        match self {
            Spin::Excited => 1.0,
            Spin::Ground => -1.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Excited => Spin::Ground,
            Spin::Ground => Spin::Excited,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Label of computational basis index `index` for `n` atoms.
pub fn basis_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| if index >> (n - 1 - k) & 1 == 1 { 'e' } else { 'g' })
        .collect()
}

/// Computational basis index of `label`.
pub fn basis_index(label: &str) -> Result<usize> {
    label.chars().try_fold(0usize, |acc, ch| match Spin::from_char(ch) {
        Some(Spin::Excited) => Ok(acc << 1 | 1),
        Some(Spin::Ground) => Ok(acc << 1),
        None => Err(Error::InvalidBasis(format!("bad character {ch:?} in label {label:?}"))),
    })
}

/// All `2^n` labels in computational order.
pub fn computational_basis(n: usize) -> Vec<String> {
    (0..1usize << n).map(|i| basis_label(i, n)).collect()
}

/// Normalized amplitude vector over an ordered list of basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    basis: Vec<String>,
}

impl StateVector {
    /// Builds a state, rejecting it unless Σ|a|² = 1 within 1e-12.
    pub fn new(basis: Vec<String>, amplitudes: CVector) -> Result<Self> {
        let state = Self::unchecked(basis, amplitudes)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    /// Builds a state after rescaling the amplitudes to unit norm.
    pub fn normalized(basis: Vec<String>, amplitudes: CVector) -> Result<Self> {
        let mut state = Self::unchecked(basis, amplitudes)?;
        let norm = state.norm_sqr().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        state.amplitudes.unscale_mut(norm);
        Ok(state)
    }

    fn unchecked(basis: Vec<String>, amplitudes: CVector) -> Result<Self> {
        if basis.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                actual: amplitudes.len(),
            });
        }
        if basis.is_empty() {
            return Err(Error::InvalidBasis("empty basis".into()));
        }
        let width = basis[0].len();
        let mut seen = HashSet::new();
        for label in &basis {
            if label.len() != width || label.chars().any(|ch| Spin::from_char(ch).is_none()) {
                return Err(Error::InvalidBasis(format!("malformed label {label:?}")));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidBasis(format!("duplicate label {label:?}")));
            }
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes, basis })
    }

    /// `|label⟩` in the full computational basis of `label.len()` atoms.
    pub fn basis_state(label: &str) -> Result<Self> {
        let n = label.len();
        let index = basis_index(label)?;
        let mut amplitudes = CVector::zeros(1 << n);
        amplitudes[index] = c(1.0, 0.0);
        Self::new(computational_basis(n), amplitudes)
    }

    /// Normalized superposition of computational basis states of `n` atoms.
    pub fn from_terms(n: usize, terms: &[(&str, Complex64)]) -> Result<Self> {
        let mut amplitudes = CVector::zeros(1 << n);
        for (label, amp) in terms {
            if label.len() != n {
                return Err(Error::InvalidBasis(format!("label {label:?} is not {n} atoms wide")));
            }
            amplitudes[basis_index(label)?] += amp;
        }
        Self::normalized(computational_basis(n), amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of atoms (label width).
    pub fn n_atoms(&self) -> usize {
        self.basis[0].len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn amplitude(&self, label: &str) -> Option<Complex64> {
        self.basis.iter().position(|l| l == label).map(|i| self.amplitudes[i])
    }

    pub fn population(&self, label: &str) -> Option<f64> {
        self.amplitude(label).map(|a| a.norm_sqr())
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩, matching amplitudes by label.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.basis == other.basis {
            return Ok(self.amplitudes.dotc(&other.amplitudes));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        self.basis
            .iter()
            .zip(self.amplitudes.iter())
            .try_fold(c(0.0, 0.0), |acc, (label, a)| {
                other
                    .amplitude(label)
                    .map(|b| acc + a.conj() * b)
                    .ok_or_else(|| Error::InvalidBasis(format!("label {label:?} missing from other state")))
            })
    }

    /// Same basis, new amplitudes (renormalized).
    pub(crate) fn with_amplitudes(&self, amplitudes: CVector) -> Result<Self> {
        Self::normalized(self.basis.clone(), amplitudes)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, a) in self.basis.iter().zip(self.amplitudes.iter()) {
            if a.norm() < 1e-14 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, label)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Single-qubit state `α|e⟩ + β|g⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    /// `cos θ |e⟩ + sin θ |g⟩`.
    pub fn from_theta(theta: f64) -> Self {
        Self {
            alpha: c(theta.cos(), 0.0),
            beta: c(theta.sin(), 0.0),
        }
    }

    pub fn excited() -> Self {
        Self::from_theta(0.0)
    }

    pub fn ground() -> Self {
        Self {
            alpha: c(0.0, 0.0),
            beta: c(1.0, 0.0),
        }
    }

    pub fn amplitude(&self, spin: Spin) -> Complex64 {
        match spin {
            Spin::Excited => self.alpha,
            Spin::Ground => self.beta,
        }
    }

    /// Rotates the global phase so the larger-magnitude amplitude is real and
    /// nonnegative (`alpha` wins ties).
    pub fn phase_fixed(self) -> Self {
        let pivot = if self.beta.norm() > self.alpha.norm() {
            self.beta
        } else {
            self.alpha
        };
        if pivot.norm() == 0.0 {
            return self;
        }
        let phase = pivot.conj() / pivot.norm();
        Self {
            alpha: self.alpha * phase,
            beta: self.beta * phase,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        assert_eq!(basis_label(4, 3), "egg");
        assert_eq!(basis_label(0, 3), "ggg");
        for i in 0..8 {
            assert_eq!(basis_index(&basis_label(i, 3)).unwrap(), i);
        }
        assert!(basis_index("exg").is_err());
    }

    #[test]
    fn rejects_unnormalized_and_duplicates() {
        let amps = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            StateVector::new(vec!["e".into(), "g".into()], amps.clone()),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            StateVector::normalized(vec!["e".into(), "e".into()], amps.clone()),
            Err(Error::InvalidBasis(_))
        ));
        let s = StateVector::normalized(vec!["e".into(), "g".into()], amps).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        let amps = CVector::zeros(2);
        assert!(StateVector::normalized(vec!["e".into(), "g".into()], amps).is_err());
    }

    #[test]
    fn phase_fix_prefers_larger_component() {
        let q = QubitState::normalized(c(0.0, 0.3), c(0.0, -0.9)).unwrap().phase_fixed();
        assert!(q.beta.im.abs() < 1e-15 && q.beta.re > 0.0);
        assert!((q.alpha.re + 0.3 / 0.9f64.hypot(0.3)).abs() < 1e-15);
    }
}
