use nalgebra::SymmetricEigen;

use super::{c, CMatrix, CVector, DenseOperator, StateVector};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order and the unitary `S` with `S H S† = diag(E)`.
///
/// Row `i` of `S` holds ⟨ψᵢ| in the computational basis, so the eigenvector
/// |ψᵢ⟩ is the conjugate of that row. For real symmetric `H` the rows are the
/// eigenvectors themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub transform: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// |ψᵢ⟩ as a column vector.
    pub fn eigenvector(&self, i: usize) -> CVector {
        self.transform.row(i).transpose().map(|z| z.conj())
    }

    /// `S† diag(E) S`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&e| c(e, 0.0)),
        ));
        self.transform.adjoint() * d * &self.transform
    }

    /// max |S S† − I|.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        super::max_abs_diff(&(&self.transform * self.transform.adjoint()), &CMatrix::identity(n, n))
    }

    /// Projector onto the eigenspace of eigenvalue `e` (within `tol`).
    pub fn eigenspace_projector(&self, e: f64, tol: f64) -> CMatrix {
        let n = self.dim();
        let mut p = CMatrix::zeros(n, n);
        for (i, &ev) in self.eigenvalues.iter().enumerate() {
            if (ev - e).abs() <= tol {
                let v = self.eigenvector(i);
                p += &v * v.adjoint();
            }
        }
        p
    }

    /// Distinct eigenvalues with their multiplicities.
    pub fn clusters(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some((head, count)) if (e - *head).abs() <= tol => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian operator.
///
/// Degenerate eigenspaces are re-expressed in a canonical basis (pivoted
/// Gram–Schmidt over the eigenspace projector applied to computational basis
/// vectors), and every eigenvector's largest component is made real positive.
pub fn hermitian_eigensystem(h: &DenseOperator) -> Result<EigenSystem> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            residual: h.hermitian_residual(),
        });
    }
    let n = h.dim();
    // Symmetrize away sub-tolerance anti-Hermitian noise before the solver sees it.
    let m = (h.entries() + h.entries().adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let cluster_tol = 1e-9 * scale;

    let mut vectors: Vec<CVector> = Vec::with_capacity(n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        let block: Vec<CVector> = order[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let basis = if block.len() == 1 {
            block
        } else {
            canonical_basis(&block)
        };
        for v in basis {
            vectors.push(fix_phase(v));
            eigenvalues.push(if end - start == 1 { values[start] } else { mean });
        }
        start = end;
    }

    let mut transform = CMatrix::zeros(n, n);
    for (i, v) in vectors.iter().enumerate() {
        for j in 0..n {
            transform[(i, j)] = v[j].conj();
        }
    }
    Ok(EigenSystem { eigenvalues, transform })
}

fn canonical_basis(block: &[CVector]) -> Vec<CVector> {
    let n = block[0].len();
    let projector = block.iter().fold(CMatrix::zeros(n, n), |acc, v| acc + v * v.adjoint());
    let mut basis: Vec<CVector> = Vec::with_capacity(block.len());
    for _ in 0..block.len() {
        let mut best: Option<(f64, CVector)> = None;
        for k in 0..n {
            let mut r: CVector = projector.column(k).into_owned();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &basis {
                    let overlap = q.dotc(&r);
                    r -= q * overlap;
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > b * (1.0 + 1e-12)) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("nonempty basis");
        basis.push(r.unscale(norm));
    }
    basis
}

fn fix_phase(v: CVector) -> CVector {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap_or(c(1.0, 0.0));
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    v.map(|z| z * phase)
}

/// Precomputed spectral form of `e^{-iHt}`.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    system: EigenSystem,
    inverse: CMatrix,
}

impl SpectralPropagator {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        let system = hermitian_eigensystem(h)?;
        let inverse = system.transform.adjoint();
        Ok(Self { system, inverse })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// `cᵢ(t) = Σⱼ [S⁻¹]ᵢⱼ [S c(0)]ⱼ e^{−iEⱼt}` on a raw amplitude vector.
    pub fn evolve_vector(&self, t: f64, c0: &CVector) -> Result<CVector> {
        if c0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: c0.len(),
            });
        }
        let mut rotated = &self.system.transform * c0;
        for (z, &e) in rotated.iter_mut().zip(&self.system.eigenvalues) {
            *z *= c(0.0, -e * t).exp();
        }
        Ok(&self.inverse * rotated)
    }

    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {t}")));
        }
        let out = self.evolve_vector(t, psi.amplitudes())?;
        psi.with_amplitudes(out)
    }

    /// Dense `e^{-iHt}`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let n = self.dim();
        let phases = CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            self.system.eigenvalues.iter().map(|&e| c(0.0, -e * t).exp()),
        ));
        &self.inverse * phases * &self.system.transform
    }
}

/// `e^{-iHt}|ψ₀⟩` by spectral decomposition.
pub fn propagate(h: &DenseOperator, t: f64, psi0: &StateVector) -> Result<StateVector> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    SpectralPropagator::new(h)?.evolve(t, psi0)
}
