use std::ops::{Add, Mul, Sub};

use super::{c, CMatrix, CVector, StateVector, ALGEBRA_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    /// σ⁺ = |e⟩⟨g|
    Plus,
    /// σ⁻ = |g⟩⟨e|
    Minus,
}

/// Square complex matrix. The `hermitian` flag is computed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    entries: CMatrix,
    hermitian: bool,
}

impl DenseOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite operator entry".into()));
        }
        Ok(Self::from_square(entries))
    }

    fn from_square(entries: CMatrix) -> Self {
        let hermitian = hermitian_residual(&entries) <= ALGEBRA_TOL;
        Self { entries, hermitian }
    }

    /// Builds from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.len(),
            });
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_square(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_square(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.entries)
    }

    /// max |U U† − I|.
    pub fn unitary_residual(&self) -> f64 {
        let prod = &self.entries * self.entries.adjoint();
        super::max_abs_diff(&prod, &CMatrix::identity(self.dim(), self.dim()))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_square(self.entries.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_square(self.entries.map(|z| z * factor))
    }

    /// `self ⊗ other`, with `self` on the more significant atoms.
    pub fn kron(&self, other: &DenseOperator) -> Self {
        Self::from_square(self.entries.kronecker(&other.entries))
    }

    /// max |AB − BA|.
    pub fn commutator_norm(&self, other: &DenseOperator) -> f64 {
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        super::max_abs_diff(&ab, &ba)
    }

    /// Raw (unnormalized) image `H|ψ⟩`.
    pub fn apply(&self, psi: &StateVector) -> Result<CVector> {
        self.apply_vector(psi.amplitudes())
    }

    pub fn apply_vector(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        Ok(&self.entries * v)
    }

    fn check_same_dim(&self, other: &DenseOperator) {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
    }
}

fn hermitian_residual(m: &CMatrix) -> f64 {
    super::max_abs_diff(m, &m.adjoint())
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        self.check_same_dim(rhs);
        DenseOperator::from_square(&self.entries + &rhs.entries)
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        self.check_same_dim(rhs);
        DenseOperator::from_square(&self.entries - &rhs.entries)
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.check_same_dim(rhs);
        DenseOperator::from_square(&self.entries * &rhs.entries)
    }
}

/// Local 2×2 matrix in computational order (index 0 = g, 1 = e).
fn local(axis: Axis) -> CMatrix {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let rows = match axis {
        Axis::X => [o, l, l, o],
        // -i σ⁺ + i σ⁻
        Axis::Y => [o, i, -i, o],
        Axis::Z => [-l, o, o, l],
        Axis::Plus => [o, o, l, o],
        Axis::Minus => [o, l, o, o],
    };
    CMatrix::from_row_slice(2, 2, &rows)
}

/// `I ⊗ … ⊗ σ_axis ⊗ … ⊗ I` acting on atom `site` (1-based) of `n`.
pub fn pauli(axis: Axis, site: usize, n: usize) -> Result<DenseOperator> {
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    let left = CMatrix::identity(1 << (site - 1), 1 << (site - 1));
    let right = CMatrix::identity(1 << (n - site), 1 << (n - site));
    Ok(DenseOperator::from_square(
        left.kronecker(&local(axis)).kronecker(&right),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Complex64, StateVector};

    fn applied(op: &DenseOperator, label: &str) -> CVector {
        op.apply(&StateVector::basis_state(label).unwrap()).unwrap()
    }

    #[test]
    fn sigma_x_flips_ground() {
        let x = pauli(Axis::X, 1, 1).unwrap();
        let out = applied(&x, "g");
        assert_eq!(out, StateVector::basis_state("e").unwrap().amplitudes().clone());
    }

    #[test]
    fn sigma_z_sign_convention() {
        let z = pauli(Axis::Z, 2, 3).unwrap();
        let out = applied(&z, "egg");
        let expected = StateVector::basis_state("egg").unwrap().amplitudes().map(|a| -a);
        assert_eq!(out, expected);
        let z1 = pauli(Axis::Z, 1, 3).unwrap();
        assert_eq!(applied(&z1, "egg")[4], c(1.0, 0.0));
    }

    #[test]
    fn raising_annihilates_excited() {
        let p = pauli(Axis::Plus, 1, 1).unwrap();
        assert!(applied(&p, "e").iter().all(|a| a.norm() == 0.0));
        assert_eq!(applied(&p, "g")[1], c(1.0, 0.0));
    }

    #[test]
    fn pauli_algebra() {
        for site in 1..=3 {
            let x = pauli(Axis::X, site, 3).unwrap();
            let y = pauli(Axis::Y, site, 3).unwrap();
            let z = pauli(Axis::Z, site, 3).unwrap();
            let p = pauli(Axis::Plus, site, 3).unwrap();
            let m = pauli(Axis::Minus, site, 3).unwrap();
            assert!(x.is_hermitian() && y.is_hermitian() && z.is_hermitian());
            assert!(!p.is_hermitian());
            assert_eq!(&p + &m, x);
            // xy = iz
            let xy = &x * &y;
            let iz = DenseOperator::new(z.entries().map(|v| v * Complex64::i())).unwrap();
            assert!(crate::qcore::max_abs_diff(xy.entries(), iz.entries()) < 1e-15);
        }
    }

    #[test]
    fn site_out_of_range() {
        assert_eq!(pauli(Axis::X, 0, 3), Err(Error::SiteOutOfRange { site: 0, n: 3 }));
        assert_eq!(pauli(Axis::X, 4, 3), Err(Error::SiteOutOfRange { site: 4, n: 3 }));
    }

    #[test]
    fn non_square_rejected() {
        assert!(DenseOperator::new(CMatrix::zeros(2, 3)).is_err());
    }
}
