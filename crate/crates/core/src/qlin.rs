//! Dense complex linear algebra and entropy kernels.
//!
//! Everything is base-2: entropies are returned in bits. Matrices are small
//! (total dimension at most [`MAX_TOTAL_DIM`]) and stored densely.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SdcError};

/// Dense square complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as exactly zero in entropy sums.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Tolerance used when validating density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Largest Hilbert-space dimension accepted by the constructors.
pub const MAX_TOTAL_DIM: usize = 81;

const HERMITIAN_TOL: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    mats.into_iter()
        .fold(identity(1), |acc, m| acc.kronecker(m))
}

/// `a x a†`
pub fn conjugate(a: &CMatrix, x: &CMatrix) -> CMatrix {
    a * x * a.adjoint()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Real eigenvalues, sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> CMatrix {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| c(l, 0.0)),
        ));
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eig(a: &CMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(SdcError::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let residual = hermiticity_residual(a);
    if residual > HERMITIAN_TOL {
        return Err(SdcError::NotHermitian(residual));
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let n = a.nrows();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

fn eigenvalue_entropy(eigenvalues: impl IntoIterator<Item = f64>) -> f64 {
    eigenvalues
        .into_iter()
        .filter(|&l| l > EIGEN_CUTOFF)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Base-2 entropy of a Hermitian matrix's spectrum, without state validation.
pub(crate) fn matrix_entropy(a: &CMatrix) -> f64 {
    let sym = (a + a.adjoint()).scale(0.5);
    eigenvalue_entropy(sym.symmetric_eigenvalues().iter().copied())
}

/// Hermitian, positive semidefinite, unit-trace matrix with a subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at [`STATE_TOL`].
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        check_layout(&mat, &dims)?;
        let herm = hermiticity_residual(&mat);
        if herm > STATE_TOL {
            return Err(SdcError::InvalidState(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(SdcError::InvalidState(format!("trace {tr} is not 1")));
        }
        let spectrum = hermitian_eig(&mat)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(SdcError::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { mat, dims })
    }

    /// Skips validation; for outputs of maps already known to be CPTP.
    pub(crate) fn from_parts(mat: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        Self { mat, dims }
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn from_pure(psi: &CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(SdcError::InvalidState(format!(
                "state vector has norm {norm}"
            )));
        }
        let mat = psi * psi.adjoint();
        check_layout(&mat, &dims)?;
        Ok(Self { mat, dims })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let dim: usize = dims.iter().product();
        let mat = identity(dim).scale(1.0 / dim as f64);
        Self { mat, dims }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.mat)
            .map(|s| s.eigenvalues)
            .expect("density matrix is Hermitian")
    }

    /// Same matrix with a different subsystem split.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_layout(&self.mat, &dims)?;
        Ok(Self {
            mat: self.mat.clone(),
            dims,
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        check_dim_cap(dims.iter().product())?;
        Ok(Self {
            mat: kron(&self.mat, &other.mat),
            dims,
        })
    }

    /// `U rho U†` with `U` acting on the full space.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(SdcError::DimensionMismatch(format!(
                "operator is {}x{}, state is {}-dimensional",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        Ok(Self {
            mat: conjugate(u, &self.mat),
            dims: self.dims.clone(),
        })
    }

    /// Reorders the subsystems: new subsystem `i` is old subsystem `order[i]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(SdcError::DimensionMismatch(format!(
                "permutation of length {} for {n} subsystems",
                order.len()
            )));
        }
        for &o in order {
            if o >= n {
                return Err(SdcError::SubsystemOutOfRange { index: o, count: n });
            }
            if std::mem::replace(&mut seen[o], true) {
                return Err(SdcError::Invalid(format!(
                    "subsystem {o} repeated in permutation"
                )));
            }
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let old_strides = strides(&self.dims);
        let dim = self.dim();
        // map new flat index -> old flat index
        let new_strides = strides(&new_dims);
        let map: Vec<usize> = (0..dim)
            .map(|idx| {
                order
                    .iter()
                    .enumerate()
                    .map(|(pos, &old)| {
                        ((idx / new_strides[pos]) % new_dims[pos]) * old_strides[old]
                    })
                    .sum()
            })
            .collect();
        let mat = CMatrix::from_fn(dim, dim, |i, j| self.mat[(map[i], map[j])]);
        Ok(Self {
            mat,
            dims: new_dims,
        })
    }
}

pub(crate) fn check_dim_cap(dim: usize) -> Result<()> {
    if dim > MAX_TOTAL_DIM {
        Err(SdcError::DimensionOverflow {
            dim,
            max: MAX_TOTAL_DIM,
        })
    } else {
        Ok(())
    }
}

fn check_layout(mat: &CMatrix, dims: &[usize]) -> Result<()> {
    if !mat.is_square() {
        return Err(SdcError::DimensionMismatch("matrix is not square".into()));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(SdcError::DimensionMismatch(format!(
            "invalid subsystem dimensions {dims:?}"
        )));
    }
    let product: usize = dims.iter().product();
    if product != mat.nrows() {
        return Err(SdcError::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} multiply to {product}, matrix side is {}",
            mat.nrows()
        )));
    }
    if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SdcError::InvalidState("non-finite entry".into()));
    }
    Ok(())
}

/// Row-major strides for a subsystem layout (last subsystem fastest).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Reduced state over the subsystems listed in `keep`.
///
/// `keep` may be given in any order; the output keeps the original subsystem order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.dims.len();
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(SdcError::SubsystemOutOfRange { index: k, count: n });
        }
        kept[k] = true;
    }
    let mat = partial_trace_matrix(&rho.mat, &rho.dims, &kept);
    let dims: Vec<usize> = (0..n).filter(|&i| kept[i]).map(|i| rho.dims[i]).collect();
    let dims = if dims.is_empty() { vec![1] } else { dims };
    Ok(DensityMatrix::from_parts(mat, dims))
}

pub(crate) fn partial_trace_matrix(mat: &CMatrix, dims: &[usize], kept: &[bool]) -> CMatrix {
    let st = strides(dims);
    let kept_idx: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).collect();
    let traced_idx: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).collect();
    let offsets = |which: &[usize]| -> Vec<usize> {
        let sub: Vec<usize> = which.iter().map(|&i| dims[i]).collect();
        let sub_st = strides(&sub);
        let total: usize = sub.iter().product();
        (0..total)
            .map(|flat| {
                which
                    .iter()
                    .enumerate()
                    .map(|(pos, &sys)| ((flat / sub_st[pos]) % sub[pos]) * st[sys])
                    .sum()
            })
            .collect()
    };
    let kept_off = offsets(&kept_idx);
    let traced_off = offsets(&traced_idx);
    let out_dim = kept_off.len();
    CMatrix::from_fn(out_dim, out_dim, |i, j| {
        traced_off
            .iter()
            .map(|&t| mat[(kept_off[i] + t, kept_off[j] + t)])
            .sum()
    })
}

/// Von Neumann entropy `-tr(rho log2 rho)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    matrix_entropy(&rho.mat)
}

/// Base-2 Shannon entropy with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(&bad) = p.iter().find(|&&x| x < -1e-12 || !x.is_finite()) {
        return Err(SdcError::Normalization(format!("entry {bad} is negative")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SdcError::Normalization(format!("entries sum to {sum}")));
    }
    Ok(p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Binary entropy `H2(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x]
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

/// Quantum relative entropy `tr rho (log2 rho - log2 sigma)`.
///
/// Returns [`SdcError::SupportViolation`] when `rho` has weight outside the
/// support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(SdcError::DimensionMismatch(format!(
            "relative entropy between {}- and {}-dimensional states",
            rho.dim(),
            sigma.dim()
        )));
    }
    relative_entropy_matrix(&rho.mat, &sigma.mat)
}

pub(crate) fn relative_entropy_matrix(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let neg_entropy = -matrix_entropy(rho);
    let sig = hermitian_eig(sigma)?;
    let mut cross = 0.0;
    for (j, &lambda) in sig.eigenvalues.iter().enumerate() {
        let v = sig.eigenvectors.column(j);
        let weight = (v.adjoint() * rho * v)[(0, 0)].re;
        if lambda > EIGEN_CUTOFF {
            cross += weight * lambda.log2();
        } else if weight > STATE_TOL {
            return Err(SdcError::SupportViolation);
        }
    }
    Ok((neg_entropy - cross).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v, 0.0)),
        ))
    }

    fn phi_plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        DensityMatrix::from_pure(&psi, vec![2, 2]).unwrap()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let z = diag(&[1.0, -1.0]);
        assert_eq!(kron(&z, &identity(2)), diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn xx_fixes_phi_plus() {
        let xx = kron(&sigma_x(), &sigma_x());
        let bell = phi_plus();
        let out = conjugate(&xx, bell.matrix());
        assert!(max_abs_diff(&out, bell.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        let bell = phi_plus();
        let b = partial_trace(&bell, &[1]).unwrap();
        assert!(max_abs_diff(b.matrix(), &identity(2).scale(0.5)) < 1e-15);

        let ra = DensityMatrix::new(diag(&[0.7, 0.3]), vec![2]).unwrap();
        let rb = DensityMatrix::new(diag(&[0.1, 0.2, 0.7]), vec![3]).unwrap();
        let prod = ra.tensor(&rb).unwrap();
        let back = partial_trace(&prod, &[0]).unwrap();
        assert!(max_abs_diff(back.matrix(), ra.matrix()) < 1e-15);
        let back_b = partial_trace(&prod, &[1]).unwrap();
        assert!(max_abs_diff(back_b.matrix(), rb.matrix()) < 1e-15);
        assert_eq!(back_b.dims(), &[3]);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let bell = phi_plus();
        assert_eq!(
            partial_trace(&bell, &[2]),
            Err(SdcError::SubsystemOutOfRange { index: 2, count: 2 })
        );
    }

    #[test]
    fn werner_marginal_by_direct_contraction() {
        // oracle: contract indices of the explicit 4x4 Werner matrix by hand
        let eta = 0.5;
        let w = phi_plus().matrix().scale(eta) + identity(4).scale((1.0 - eta) / 4.0);
        let mut oracle = CMatrix::zeros(2, 2);
        for b1 in 0..2 {
            for b2 in 0..2 {
                for a in 0..2 {
                    oracle[(b1, b2)] += w[(2 * a + b1, 2 * a + b2)];
                }
            }
        }
        let rho = DensityMatrix::new(w, vec![2, 2]).unwrap();
        let pt = partial_trace(&rho, &[1]).unwrap();
        assert!(max_abs_diff(pt.matrix(), &oracle) < 1e-15);
        assert!(max_abs_diff(pt.matrix(), &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn eig_examples() {
        let s = hermitian_eig(&diag(&[0.3, 0.7])).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.3, epsilon = 1e-14);
        let s = hermitian_eig(&sigma_x()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_werner_matches_characteristic_polynomial_roots() {
        // det(W - x I) for the qubit Werner state factors as
        // ((1+3e)/4 - x) ((1-e)/4 - x)^3
        for &eta in &[0.0, 0.2, 0.6, 1.0] {
            let w = phi_plus().matrix().scale(eta) + identity(4).scale((1.0 - eta) / 4.0);
            let s = hermitian_eig(&w).unwrap();
            let expected = [
                (1.0 + 3.0 * eta) / 4.0,
                (1.0 - eta) / 4.0,
                (1.0 - eta) / 4.0,
                (1.0 - eta) / 4.0,
            ];
            for (got, want) in s.eigenvalues.iter().zip(expected) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
            }
            for &root in &expected {
                let det = (&w - identity(4).scale(root)).determinant();
                assert!(det.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(hermitian_eig(&m), Err(SdcError::NotHermitian(_))));
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(phi_plus().entropy(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert_abs_diff_eq!(mixed.entropy(), 2.0, epsilon = 1e-12);
        let d = DensityMatrix::new(diag(&[0.625, 0.125, 0.125, 0.125]), vec![4]).unwrap();
        assert_abs_diff_eq!(d.entropy(), 1.548_794_940_695_398_5, epsilon = 1e-12);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&[0.25; 4]).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            shannon_entropy(&[0.05, 0.95]).unwrap(),
            0.286_396_957_115_956_25,
            epsilon = 1e-12
        );
        assert!(matches!(
            shannon_entropy(&[0.5, 0.6]),
            Err(SdcError::Normalization(_))
        ));
        assert!(matches!(
            shannon_entropy(&[1.5, -0.5]),
            Err(SdcError::Normalization(_))
        ));
    }

    #[test]
    fn relative_entropy_examples() {
        let zero = DensityMatrix::new(diag(&[1.0, 0.0]), vec![2]).unwrap();
        let one = DensityMatrix::new(diag(&[0.0, 1.0]), vec![2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert_abs_diff_eq!(
            relative_entropy(&mixed, &mixed).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            relative_entropy(&zero, &mixed).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(
            relative_entropy(&zero, &one),
            Err(SdcError::SupportViolation)
        );
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(diag(&[0.5, 0.6]), vec![2]).is_err());
        assert!(DensityMatrix::new(diag(&[1.2, -0.2]), vec![2]).is_err());
        assert!(DensityMatrix::new(diag(&[0.5, 0.5]), vec![3]).is_err());
        let skew = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.)]);
        assert!(DensityMatrix::new(skew, vec![2]).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        let ra = DensityMatrix::new(diag(&[0.7, 0.3]), vec![2]).unwrap();
        let rb = DensityMatrix::new(diag(&[0.1, 0.2, 0.7]), vec![3]).unwrap();
        let ab = ra.tensor(&rb).unwrap();
        let ba = rb.tensor(&ra).unwrap();
        let swapped = ab.permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        assert!(max_abs_diff(swapped.matrix(), ba.matrix()) < 1e-15);
    }
}
