//! Output-entropy minimisation over sender-side encodings, plus root finding
//! and parameter sweeps.
//!
//! Every search starts its first restart at the identity encoding, so the
//! reported minimum never exceeds the identity value. Restarts run in parallel
//! with seeds derived from the run seed and the restart index, and are merged
//! by minimum value with ties going to the lower index.

pub mod nelder_mead;
pub mod roots;
pub mod sweep;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{leading_prefix, KrausChannel, QuantumChannel};
use crate::error::{Result, SdcError};
use crate::qlin::{
    c, hermitian_eig, identity, kron, kron_all, matrix_entropy, CMatrix, DensityMatrix,
};
use crate::random;

pub use nelder_mead::{NmOptions, NmResult};

/// Block structure of a sender unitary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Structure {
    /// One unitary on the whole sender space of this dimension.
    Global(usize),
    /// A tensor product of unitaries, one per listed sender subsystem.
    Local(Vec<usize>),
}

impl Structure {
    pub fn sender_dim(&self) -> usize {
        match self {
            Structure::Global(d) => *d,
            Structure::Local(dims) => dims.iter().product(),
        }
    }

    fn blocks(&self) -> Vec<usize> {
        match self {
            Structure::Global(d) => vec![*d],
            Structure::Local(dims) => dims.clone(),
        }
    }

    pub fn param_len(&self) -> usize {
        self.blocks().iter().map(|d| d * d - 1).sum()
    }
}

/// Generalised Gell-Mann matrices: `d² − 1` traceless Hermitian generators.
pub fn gell_mann_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(1.0, 0.0);
            sym[(k, j)] = c(1.0, 0.0);
            basis.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, -1.0);
            anti[(k, j)] = c(0.0, 1.0);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}

/// `exp(iH)` for Hermitian `H`.
pub fn expi_hermitian(h: &CMatrix) -> CMatrix {
    let spec = hermitian_eig(h).expect("generator is Hermitian by construction");
    let v = &spec.eigenvectors;
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        spec.eigenvalues.len(),
        spec.eigenvalues.iter().map(|&l| c(l.cos(), l.sin())),
    ));
    v * phases * v.adjoint()
}

/// Unitary `exp(i Σ θ_j G_j)` per block, tensored according to `structure`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryParam {
    pub generator: Vec<f64>,
    pub structure: Structure,
}

impl UnitaryParam {
    pub fn identity(structure: Structure) -> Self {
        Self {
            generator: vec![0.0; structure.param_len()],
            structure,
        }
    }

    pub fn unitary(&self) -> CMatrix {
        unitary_from(&self.structure, &self.generator)
    }
}

fn unitary_from(structure: &Structure, theta: &[f64]) -> CMatrix {
    let mut offset = 0;
    let factors: Vec<CMatrix> = structure
        .blocks()
        .into_iter()
        .map(|d| {
            let basis = gell_mann_basis(d);
            let h = basis
                .iter()
                .zip(&theta[offset..offset + basis.len()])
                .fold(CMatrix::zeros(d, d), |acc, (g, &t)| acc + g.scale(t));
            offset += basis.len();
            expi_hermitian(&h)
        })
        .collect();
    kron_all(&factors)
}

/// Isometry `A (A†A)^{-1/2}` from sender space into sender ⊗ environment,
/// environment dimension `D_A²`; Kraus operator `e` is row block `e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CptpParam {
    pub sender_dim: usize,
    /// Real and imaginary parts of `A`, row-major, interleaved.
    pub raw: Vec<f64>,
}

impl CptpParam {
    pub fn env_dim(&self) -> usize {
        self.sender_dim * self.sender_dim
    }

    fn param_len(sender_dim: usize) -> usize {
        2 * sender_dim * sender_dim * sender_dim * sender_dim
    }

    /// Starting point whose map is the identity.
    pub fn identity(sender_dim: usize) -> Self {
        let mut raw = vec![0.0; Self::param_len(sender_dim)];
        for i in 0..sender_dim {
            raw[2 * (i * sender_dim + i)] = 1.0;
        }
        Self { sender_dim, raw }
    }

    pub fn kraus(&self) -> KrausChannel {
        kraus_from(self.sender_dim, &self.raw)
    }
}

fn kraus_from(d: usize, raw: &[f64]) -> KrausChannel {
    let rows = d * d * d;
    let a = CMatrix::from_fn(rows, d, |i, j| {
        let k = 2 * (i * d + j);
        c(raw[k], raw[k + 1])
    });
    let gram = a.adjoint() * &a;
    let spec = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    let v = &spec.eigenvectors;
    let inv_sqrt = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        spec.eigenvalues
            .iter()
            .map(|&l| c(1.0 / l.max(1e-300).sqrt(), 0.0)),
    ));
    let w = a * (v * inv_sqrt * v.adjoint());
    let ops = (0..d * d).map(|e| w.rows(e * d, d).into_owned()).collect();
    KrausChannel::from_ops_unchecked(ops).expect("non-empty Kraus list")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Param {
    Unitary(UnitaryParam),
    Cptp(CptpParam),
}

/// Optimiser settings; the defaults are 32 restarts, tolerance 1e-9 and 2000
/// iterations per restart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            tol: 1e-9,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub best_value: f64,
    pub best_param: Param,
    pub restarts_used: usize,
    /// Whether the restart that produced the minimum met the tolerance.
    pub converged: bool,
    pub seed: u64,
    /// Output entropy with the identity encoding.
    pub identity_value: f64,
}

fn check_sender_block(
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
    sender_dim: usize,
) -> Result<usize> {
    if ch.dim() != rho.dim() {
        return Err(SdcError::DimensionMismatch(format!(
            "channel dimension {} vs state dimension {}",
            ch.dim(),
            rho.dim()
        )));
    }
    leading_prefix(rho.dims(), sender_dim)?;
    Ok(rho.dim() / sender_dim)
}

fn check_options(opts: &OptOptions) -> Result<()> {
    if opts.restarts == 0 {
        return Err(SdcError::ParameterOutOfRange {
            name: "restarts",
            value: 0.0,
            range: ">= 1",
        });
    }
    if !(opts.tol > 0.0) {
        return Err(SdcError::ParameterOutOfRange {
            name: "tol",
            value: opts.tol,
            range: "> 0",
        });
    }
    Ok(())
}

struct Restart {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn run_restarts<F, S>(opts: &OptOptions, start: S, objective: F) -> Vec<Restart>
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(usize, &mut random::SdcRng) -> Vec<f64> + Sync,
{
    let nm = NmOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        ..NmOptions::default()
    };
    (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::rng(random::derived_seed(opts.seed, i as u64));
            let x0 = start(i, &mut rng);
            let r = nelder_mead::minimize(&objective, &x0, nm);
            Restart {
                x: r.x,
                value: r.value,
                converged: r.converged,
            }
        })
        .collect()
}

fn best_restart(results: &[Restart]) -> usize {
    // strict comparison keeps the lowest index on ties
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value < results[best].value {
            best = i;
        }
    }
    best
}

/// Minimises `S(Λ((U ⊗ 1) ρ (U ⊗ 1)†))` over sender unitaries of the given structure.
pub fn min_output_entropy_unitary(
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
    structure: &Structure,
    opts: &OptOptions,
) -> Result<OptResult> {
    check_options(opts)?;
    let rest = check_sender_block(rho, ch, structure.sender_dim())?;
    let id_rest = identity(rest);
    let objective = |theta: &[f64]| {
        let u = kron(&unitary_from(structure, theta), &id_rest);
        matrix_entropy(&ch.apply_matrix(&(&u * rho.matrix() * u.adjoint())))
    };
    let identity_value = matrix_entropy(&ch.apply_matrix(rho.matrix()));
    let len = structure.param_len();
    let results = run_restarts(
        opts,
        |i, rng| {
            if i == 0 {
                vec![0.0; len]
            } else {
                (0..len)
                    .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect()
            }
        },
        objective,
    );
    let best = best_restart(&results);
    Ok(OptResult {
        best_value: results[best].value.max(0.0),
        best_param: Param::Unitary(UnitaryParam {
            generator: results[best].x.clone(),
            structure: structure.clone(),
        }),
        restarts_used: results.len(),
        converged: results[best].converged,
        seed: opts.seed,
        identity_value,
    })
}

/// Minimises `S(Λ((Γ ⊗ id)(ρ)))` over CPTP maps `Γ` on the sender block of dimension `sender_dim`.
pub fn min_output_entropy_cptp(
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
    sender_dim: usize,
    opts: &OptOptions,
) -> Result<OptResult> {
    check_options(opts)?;
    let rest = check_sender_block(rho, ch, sender_dim)?;
    let id_rest = identity(rest);
    let objective = |raw: &[f64]| {
        let gamma = kraus_from(sender_dim, raw);
        let mut pre = CMatrix::zeros(rho.dim(), rho.dim());
        for k in gamma.ops() {
            let full = kron(k, &id_rest);
            pre += &full * rho.matrix() * full.adjoint();
        }
        matrix_entropy(&ch.apply_matrix(&pre))
    };
    let identity_value = matrix_entropy(&ch.apply_matrix(rho.matrix()));
    let len = CptpParam::param_len(sender_dim);
    let results = run_restarts(
        opts,
        |i, rng| {
            if i == 0 {
                CptpParam::identity(sender_dim).raw
            } else {
                (0..len)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect()
            }
        },
        objective,
    );
    let best = best_restart(&results);
    Ok(OptResult {
        best_value: results[best].value.max(0.0),
        best_param: Param::Cptp(CptpParam {
            sender_dim,
            raw: results[best].x.clone(),
        }),
        restarts_used: results.len(),
        converged: results[best].converged,
        seed: opts.seed,
        identity_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarising_probs, PauliChannel};
    use crate::qlin::{max_abs_diff, trace};
    use crate::states::{bell_diagonal, bell_state, werner_state, werner_weights};
    use approx::assert_abs_diff_eq;

    fn quick(restarts: usize, seed: u64) -> OptOptions {
        OptOptions {
            restarts,
            seed,
            ..OptOptions::default()
        }
    }

    #[test]
    fn gell_mann_properties() {
        for d in 2..=4 {
            let b = gell_mann_basis(d);
            assert_eq!(b.len(), d * d - 1);
            for (i, g) in b.iter().enumerate() {
                assert!(trace(g).norm() < 1e-14);
                assert!(max_abs_diff(g, &g.adjoint()) < 1e-15);
                for (j, h) in b.iter().enumerate() {
                    let ip = trace(&(g * h)).re;
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert_abs_diff_eq!(ip, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn parameterised_maps_are_valid() {
        let mut rng = random::rng(8);
        for structure in [Structure::Global(4), Structure::Local(vec![2, 3])] {
            let theta: Vec<f64> = (0..structure.param_len())
                .map(|_| rng.gen_range(-3.0..3.0))
                .collect();
            let u = unitary_from(&structure, &theta);
            let dim = structure.sender_dim();
            assert!(max_abs_diff(&(&u * u.adjoint()), &identity(dim)) < 1e-9);
        }
        assert!(
            max_abs_diff(
                &UnitaryParam::identity(Structure::Global(3)).unitary(),
                &identity(3)
            ) < 1e-15
        );
        for d in [2, 3] {
            let raw: Vec<f64> = (0..CptpParam::param_len(d))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let k = CptpParam { sender_dim: d, raw }.kraus();
            assert!(k.completeness_residual() < 1e-8);
            assert!(k.choi_min_eigenvalue() > -1e-9);
            let id = CptpParam::identity(d).kraus();
            let x = random::random_density(&mut rng, &[d]);
            assert!(max_abs_diff(&id.apply_matrix(x.matrix()), x.matrix()) < 1e-12);
        }
    }

    #[test]
    fn noiseless_pure_state_reaches_zero() {
        let bell = bell_state(2, 0, 0).unwrap();
        let id = PauliChannel::identity(vec![2, 2]);
        let r =
            min_output_entropy_unitary(&bell, &id, &Structure::Global(2), &quick(4, 1)).unwrap();
        assert!(r.best_value < 1e-9);
        assert!(r.identity_value < 1e-9);
        let r = min_output_entropy_cptp(&bell, &id, 2, &quick(2, 1)).unwrap();
        assert!(r.best_value < 1e-9);
    }

    #[test]
    fn fully_correlated_bell_diagonal_identity_optimal() {
        let p4 = [0.5, 0.2, 0.2, 0.1];
        let rho = bell_diagonal(p4).unwrap();
        let ch = PauliChannel::fully_correlated([0.3, 0.3, 0.2, 0.2], 2).unwrap();
        let r = min_output_entropy_unitary(&rho, &ch, &Structure::Global(2), &quick(8, 3)).unwrap();
        let claimed = crate::qlin::shannon_entropy(&p4).unwrap();
        assert_abs_diff_eq!(r.identity_value, claimed, epsilon = 1e-9);
        assert!(r.best_value >= claimed - 1e-4);
        assert_abs_diff_eq!(r.best_value, claimed, epsilon = 1e-4);
    }

    #[test]
    fn two_sided_depolarising_is_flat() {
        let bell = bell_state(2, 0, 0).unwrap();
        let ch = PauliChannel::depolarising_two_sided(2, 0.5).unwrap();
        let oracle = werner_state(2, 0.25).unwrap().entropy();
        let r =
            min_output_entropy_unitary(&bell, &ch, &Structure::Global(2), &quick(20, 5)).unwrap();
        assert_abs_diff_eq!(r.best_value, oracle, epsilon = 1e-4);
        // every random start already sits at the optimum
        let mut rng = random::rng(6);
        for _ in 0..20 {
            let u = kron(&random::random_unitary(&mut rng, 2), &identity(2));
            let s = ch.apply(&bell.conjugated(&u).unwrap()).unwrap().entropy();
            assert_abs_diff_eq!(s, oracle, epsilon = 1e-6);
        }
    }

    #[test]
    fn cptp_not_worse_than_unitary() {
        let bell = bell_state(2, 0, 0).unwrap();
        let ch = PauliChannel::quasiclassical_correlated(0.2, 0.0).unwrap();
        let opts = quick(4, 2);
        let u = min_output_entropy_unitary(&bell, &ch, &Structure::Global(2), &opts).unwrap();
        let g = min_output_entropy_cptp(&bell, &ch, 2, &opts).unwrap();
        assert!(u.best_value <= u.identity_value + 1e-12);
        assert!(g.best_value <= u.best_value + 1e-6);
        // the ground-state reset is feasible and gives 1 + H2(p)
        assert!(g.best_value <= 1.0 + crate::qlin::binary_entropy(0.2) + 1e-6);
    }

    #[test]
    fn deterministic_given_seed() {
        let rho = werner_state(2, 0.7).unwrap();
        let ch = PauliChannel::one_sided(
            &depolarising_probs(2, 0.3).unwrap(),
            crate::channels::Side::Sender,
        )
        .unwrap();
        let a =
            min_output_entropy_unitary(&rho, &ch, &Structure::Global(2), &quick(6, 42)).unwrap();
        let b =
            min_output_entropy_unitary(&rho, &ch, &Structure::Global(2), &quick(6, 42)).unwrap();
        assert_eq!(a, b);
        let bd = bell_diagonal(werner_weights(0.4)).unwrap();
        let a = min_output_entropy_cptp(&bd, &ch, 2, &quick(3, 9)).unwrap();
        let b = min_output_entropy_cptp(&bd, &ch, 2, &quick(3, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bell = bell_state(2, 0, 0).unwrap();
        let id = PauliChannel::identity(vec![2, 2]);
        assert!(
            min_output_entropy_unitary(&bell, &id, &Structure::Global(2), &quick(0, 1)).is_err()
        );
        assert!(
            min_output_entropy_unitary(&bell, &id, &Structure::Global(3), &quick(1, 1)).is_err()
        );
        let wrong = PauliChannel::identity(vec![3, 3]);
        assert!(min_output_entropy_cptp(&bell, &wrong, 2, &quick(1, 1)).is_err());
    }
}
