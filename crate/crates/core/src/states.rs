//! Resource states: Bell, Werner, Bell-diagonal, GHZ and copies of bipartite states.
//!
//! Within one copy the sender subsystem comes first. Multi-copy states are
//! regrouped as `[a1..ak, b1..bk]` so the sender block is always a leading
//! tensor factor.

use crate::channels::{weyl_op, WeylIndex};
use crate::error::{check_unit_interval, Result, SdcError};
use crate::qlin::{c, check_dim_cap, identity, kron, CMatrix, CVector, DensityMatrix};

/// `(V_mn ⊗ 1)|ψ00⟩` with `|ψ00⟩ = Σ_k |kk⟩/√d`.
pub fn bell_state(d: usize, m: usize, n: usize) -> Result<DensityMatrix> {
    let idx = WeylIndex::new(m, n, d)?;
    check_dim_cap(d * d)?;
    let amp = 1.0 / (d as f64).sqrt();
    let psi00 = CVector::from_fn(d * d, |i, _| {
        if i / d == i % d {
            c(amp, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let psi = kron(&weyl_op(idx), &identity(d)) * psi00;
    DensityMatrix::from_pure(&psi, vec![d, d])
}

/// `η |ψ00⟩⟨ψ00| + (1-η) 1/d²`.
pub fn werner_state(d: usize, eta: f64) -> Result<DensityMatrix> {
    check_unit_interval("eta", eta)?;
    let bell = bell_state(d, 0, 0)?;
    let dd = d * d;
    let mat = bell.matrix().scale(eta) + identity(dd).scale((1.0 - eta) / dd as f64);
    Ok(DensityMatrix::from_parts(mat, vec![d, d]))
}

/// Bell-diagonal weights equivalent to a qubit Werner state.
pub fn werner_weights(eta: f64) -> [f64; 4] {
    let rest = (1.0 - eta) / 4.0;
    [(1.0 + 3.0 * eta) / 4.0, rest, rest, rest]
}

/// `Σ p_n (σ_n ⊗ 1)|Φ+⟩⟨Φ+|(σ_n ⊗ 1)` with σ order (1, x, y, z).
pub fn bell_diagonal(p: [f64; 4]) -> Result<DensityMatrix> {
    crate::qlin::shannon_entropy(&p)?;
    let phi = bell_state(2, 0, 0)?;
    let mut mat = CMatrix::zeros(4, 4);
    for (k, &pk) in p.iter().enumerate() {
        if pk <= 0.0 {
            continue;
        }
        let v = kron(&weyl_op(WeylIndex::sigma(k)), &identity(2));
        mat += (&v * phi.matrix() * v.adjoint()).scale(pk);
    }
    Ok(DensityMatrix::from_parts(mat, vec![2, 2]))
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `parties` qubits.
pub fn ghz_state(parties: usize) -> Result<DensityMatrix> {
    if parties < 2 {
        return Err(SdcError::Invalid(format!(
            "GHZ state needs at least 2 parties, got {parties}"
        )));
    }
    let dim = 1usize
        .checked_shl(parties as u32)
        .filter(|&d| d <= crate::qlin::MAX_TOTAL_DIM)
        .ok_or(SdcError::DimensionOverflow {
            dim: if parties < usize::BITS as usize {
                1 << parties
            } else {
                usize::MAX
            },
            max: crate::qlin::MAX_TOTAL_DIM,
        })?;
    let mut psi = CVector::zeros(dim);
    psi[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[dim - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&psi, vec![2; parties])
}

/// `ρ^{⊗k}` of a bipartite state, regrouped as `[a1..ak, b1..bk]`.
pub fn k_copies(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 {
        return Err(SdcError::DimensionMismatch(format!(
            "copies need a bipartite state, got layout {:?}",
            rho.dims()
        )));
    }
    if k == 0 {
        return Err(SdcError::Invalid("k must be at least 1".into()));
    }
    let total = rho.dim().checked_pow(k as u32).unwrap_or(usize::MAX);
    check_dim_cap(total)?;
    let mut out = rho.clone();
    for _ in 1..k {
        out = out.tensor(rho)?;
    }
    let order: Vec<usize> = (0..k)
        .map(|i| 2 * i)
        .chain((0..k).map(|i| 2 * i + 1))
        .collect();
    out.permute_subsystems(&order)
}

/// Declarative description of a resource state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bell { d: usize, m: usize, n: usize },
    Werner { d: usize, eta: f64 },
    BellDiagonal([f64; 4]),
    Ghz { parties: usize },
    KCopy { inner: Box<StateSpec>, k: usize },
    Explicit(DensityMatrix),
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Bell { d, m, n } => bell_state(*d, *m, *n),
            StateSpec::Werner { d, eta } => werner_state(*d, *eta),
            StateSpec::BellDiagonal(p) => bell_diagonal(*p),
            StateSpec::Ghz { parties } => ghz_state(*parties),
            StateSpec::KCopy { inner, k } => k_copies(&inner.build()?, *k),
            StateSpec::Explicit(rho) => Ok(rho.clone()),
        }
    }
}
