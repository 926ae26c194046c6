//! Ising-ring Hamiltonians on three atoms and the secular (rotating-wave)
//! transverse term.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::qcore::{basis_index, basis_label, c, pauli, Axis, CMatrix, DenseOperator, SpectralPropagator, StateVector};

pub const N_ATOMS: usize = 3;
pub const DIM: usize = 1 << N_ATOMS;

/// `(i, j, k)` with `j, k` the two ring neighbours of `i`, 1-based.
const RING: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

/// The six one- and two-excitation states `|φ₁⟩ … |φ₆⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    labels: Vec<String>,
    embedding: Vec<usize>,
}

impl SubspaceBasis {
    pub const LABELS: [&'static str; 6] = ["egg", "eeg", "geg", "gee", "gge", "ege"];

    pub fn ising_ring() -> Self {
        let labels: Vec<String> = Self::LABELS.iter().map(|s| s.to_string()).collect();
        let embedding = labels.iter().map(|l| basis_index(l).expect("valid label")).collect();
        Self { labels, embedding }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Full 8-dim index of subspace vector `i`.
    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Which operator form of the secular Hamiltonian to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SecularForm {
    /// `Γᵢ σᵢˣ (1 − σⱼᶻσₖᶻ)/2`: atom `i` flips only between anti-aligned
    /// neighbours.
    #[default]
    Projector,
    /// `Γᵢ σᵢˣ (1 − ½ σⱼᶻσₖᶻ)`, with the unprojected coefficient. Kept for
    /// comparison; it couples |ggg⟩ and |eee⟩ into the ring subspace.
    Literal,
}

/// `J₁₂σ₁ᶻσ₂ᶻ + J₂₃σ₂ᶻσ₃ᶻ + J₃₁σ₃ᶻσ₁ᶻ`, diagonal in the computational basis.
pub fn build_h_zz(j: [f64; 3]) -> DenseOperator {
    let mut m = CMatrix::zeros(DIM, DIM);
    for idx in 0..DIM {
        let s: Vec<f64> = basis_label(idx, N_ATOMS)
            .chars()
            .map(|ch| if ch == 'e' { 1.0 } else { -1.0 })
            .collect();
        m[(idx, idx)] = c(j[0] * s[0] * s[1] + j[1] * s[1] * s[2] + j[2] * s[2] * s[0], 0.0);
    }
    DenseOperator::new(m).expect("square")
}

/// `Σᵢ Γᵢ (σᵢ⁻ + σᵢ⁺)`.
pub fn build_h_x(gamma: [f64; 3]) -> DenseOperator {
    (1..=N_ATOMS).fold(DenseOperator::zeros(DIM), |acc, site| {
        &acc + &pauli(Axis::X, site, N_ATOMS)
            .expect("site in range")
            .scale(gamma[site - 1])
    })
}

pub fn build_h_secular(gamma: [f64; 3]) -> DenseOperator {
    build_h_secular_form(gamma, SecularForm::Projector)
}

pub fn build_h_secular_form(gamma: [f64; 3], form: SecularForm) -> DenseOperator {
    let identity = DenseOperator::identity(DIM);
    RING.iter().fold(DenseOperator::zeros(DIM), |acc, &(i, j, k)| {
        let x = pauli(Axis::X, i, N_ATOMS).expect("site in range");
        let zz =
            &pauli(Axis::Z, j, N_ATOMS).expect("site in range") * &pauli(Axis::Z, k, N_ATOMS).expect("site in range");
        let gate = match form {
            SecularForm::Projector => (&identity - &zz).scale(0.5),
            SecularForm::Literal => &identity - &zz.scale(0.5),
        };
        &acc + &(&x * &gate).scale(gamma[i - 1])
    })
}

/// `H_zz`, `H_x`, `H_eff = H_zz + H_x` and the secular `H̃` for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSet {
    pub h_zz: DenseOperator,
    pub h_x: DenseOperator,
    pub h_eff: DenseOperator,
    pub h_secular: DenseOperator,
}

impl HamiltonianSet {
    pub fn new(j: [f64; 3], gamma: [f64; 3]) -> Self {
        let h_zz = build_h_zz(j);
        let h_x = build_h_x(gamma);
        let h_eff = &h_zz + &h_x;
        Self {
            h_zz,
            h_x,
            h_eff,
            h_secular: build_h_secular(gamma),
        }
    }

    pub fn symmetric(j0: f64, gamma: [f64; 3]) -> Self {
        Self::new([j0; 3], gamma)
    }
}

/// Matrix of `h` in the ordered subspace basis. Fails if `h` maps the
/// subspace onto its complement by more than 1e-12.
pub fn restrict(h: &DenseOperator, basis: &SubspaceBasis) -> Result<CMatrix> {
    if h.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            actual: h.dim(),
        });
    }
    let m = h.entries();
    let inside = basis.embedding();
    let mut leakage = 0.0f64;
    for &col in inside {
        for row in (0..DIM).filter(|r| !inside.contains(r)) {
            leakage = leakage.max(m[(row, col)].norm());
        }
    }
    if leakage > 1e-12 {
        return Err(Error::Leakage { leakage });
    }
    let n = basis.len();
    Ok(CMatrix::from_fn(n, n, |a, b| m[(inside[a], inside[b])]))
}

/// Maximum population deviation between full evolution under `H_eff` and the
/// secular reconstruction `e^{−iH_zz t} e^{−iH̃t}`, over `t_grid`.
pub fn secular_error(j0: f64, gamma: [f64; 3], psi0: &StateVector, t_grid: &[f64]) -> Result<f64> {
    secular_error_with(Execution::default(), j0, gamma, psi0, t_grid)
}

pub fn secular_error_with(
    exec: Execution,
    j0: f64,
    gamma: [f64; 3],
    psi0: &StateVector,
    t_grid: &[f64],
) -> Result<f64> {
    if j0.is_nan() || j0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("j0 must be positive, got {j0}")));
    }
    if psi0.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            actual: psi0.dim(),
        });
    }
    let set = HamiltonianSet::symmetric(j0, gamma);
    let full = SpectralPropagator::new(&set.h_eff)?;
    let zz = SpectralPropagator::new(&set.h_zz)?;
    let secular = SpectralPropagator::new(&set.h_secular)?;
    let deviations = exec.try_map_indexed(t_grid.len(), |i| -> Result<f64> {
        let t = t_grid[i];
        let exact = full.evolve(t, psi0)?;
        let approx = zz.evolve(t, &secular.evolve(t, psi0)?)?;
        Ok(exact
            .populations()
            .iter()
            .zip(approx.populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    })?;
    Ok(deviations.into_iter().fold(0.0, f64::max))
}
