//! Seeded sampling of states, unitaries and channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qlin::{c, CMatrix, DensityMatrix};

pub type SdcRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SdcRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for the `index`-th task derived from `seed` (splitmix64 step).
pub fn derived_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / std::f64::consts::SQRT_2
    })
}

/// Random full-rank density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng>(rng: &mut R, dims: &[usize]) -> DensityMatrix {
    let dim = dims.iter().product();
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = crate::qlin::trace(&m).re;
    let m = m.unscale(tr);
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::from_parts(m, dims.to_vec())
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    (&g + g.adjoint()).scale(0.5)
}

/// Uniformly random probability vector (flat Dirichlet).
pub fn random_distribution<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len)
        .map(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}
