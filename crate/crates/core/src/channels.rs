//! Weyl displacement operators, Pauli-family channels and Kraus maps.
//!
//! A Pauli channel is stored as a list of independent noise blocks. Each block
//! carries a sparse probability table over tuples of Weyl indices, one index
//! per subsystem it acts on. Uncorrelated noise uses one block per subsystem,
//! correlated noise uses one block spanning the correlated subsystems.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_unit_interval, Result, SdcError};
use crate::qlin::{
    c, check_dim_cap, identity, kron, kron_all, max_abs_diff, strides, CMatrix, DensityMatrix,
};
use crate::random;

/// Index `(m, n)` of the displacement operator `V_mn` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WeylIndex {
    pub m: usize,
    pub n: usize,
    pub d: usize,
}

impl WeylIndex {
    pub fn new(m: usize, n: usize, d: usize) -> Result<Self> {
        if d == 0 || m >= d || n >= d {
            return Err(SdcError::Invalid(format!(
                "Weyl index ({m}, {n}) invalid in dimension {d}"
            )));
        }
        Ok(Self { m, n, d })
    }

    pub fn identity(d: usize) -> Self {
        Self { m: 0, n: 0, d }
    }

    /// Qubit Pauli labeling: 0 → 1, 1 → σx, 2 → σy (up to phase), 3 → σz.
    pub fn sigma(k: usize) -> Self {
        let (m, n) = match k {
            0 => (0, 0),
            1 => (1, 0),
            2 => (1, 1),
            3 => (0, 1),
            _ => panic!("Pauli label {k} out of range"),
        };
        Self { m, n, d: 2 }
    }

    /// All `d²` indices in `(m, n)` row-major order.
    pub fn all(d: usize) -> impl Iterator<Item = WeylIndex> {
        (0..d).flat_map(move |m| (0..d).map(move |n| WeylIndex { m, n, d }))
    }

    pub fn is_identity(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

fn omega(d: usize, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (power % d) as f64 / d as f64)
}

/// `V_mn = Σ_k exp(2πi kn/d) |k⟩⟨k+m mod d|`.
pub fn weyl_op(idx: WeylIndex) -> CMatrix {
    let d = idx.d;
    let mut v = CMatrix::zeros(d, d);
    for k in 0..d {
        v[(k, (k + idx.m) % d)] = omega(d, k * idx.n);
    }
    v
}

/// Tensor product of Weyl operators.
pub fn weyl_tensor(indices: &[WeylIndex]) -> CMatrix {
    let ops: Vec<CMatrix> = indices.iter().map(|&i| weyl_op(i)).collect();
    kron_all(&ops)
}

/// All tuples of Weyl indices over the given dimensions, first slot slowest.
pub fn weyl_tuples(dims: &[usize]) -> Vec<Vec<WeylIndex>> {
    dims.iter().fold(vec![Vec::new()], |acc, &d| {
        acc.into_iter()
            .flat_map(|prefix| {
                WeylIndex::all(d).map(move |w| {
                    let mut next = prefix.clone();
                    next.push(w);
                    next
                })
            })
            .collect()
    })
}

/// Sparse probability table over tuples of Weyl indices of a fixed dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbTable {
    d: usize,
    arity: usize,
    entries: BTreeMap<Vec<WeylIndex>, f64>,
}

impl ProbTable {
    /// Builds a validated table. Duplicate tuples are summed; zero entries are dropped.
    pub fn new(
        d: usize,
        arity: usize,
        entries: impl IntoIterator<Item = (Vec<WeylIndex>, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (key, p) in entries {
            if key.len() != arity {
                return Err(SdcError::Invalid(format!(
                    "tuple of length {} in a table of arity {arity}",
                    key.len()
                )));
            }
            if let Some(bad) = key.iter().find(|w| w.d != d || w.m >= d || w.n >= d) {
                return Err(SdcError::Invalid(format!(
                    "index {bad:?} does not belong to dimension {d}"
                )));
            }
            if !(p >= -1e-12) {
                return Err(SdcError::Normalization(format!(
                    "probability {p} is negative"
                )));
            }
            *map.entry(key).or_insert(0.0) += p.max(0.0);
        }
        map.retain(|_, p| *p > 0.0);
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SdcError::Normalization(format!("table sums to {sum}")));
        }
        Ok(Self {
            d,
            arity,
            entries: map,
        })
    }

    /// Single-use table from `q[m * d + n]`.
    pub fn from_grid(d: usize, q: &[f64]) -> Result<Self> {
        if q.len() != d * d {
            return Err(SdcError::Invalid(format!(
                "expected {} probabilities for d = {d}, got {}",
                d * d,
                q.len()
            )));
        }
        Self::new(d, 1, WeylIndex::all(d).zip(q).map(|(w, &p)| (vec![w], p)))
    }

    /// Noiseless table: all weight on the identity tuple.
    pub fn noiseless(d: usize, arity: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(vec![WeylIndex::identity(d); arity], 1.0);
        Self { d, arity, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<WeylIndex>, f64)> {
        self.entries.iter().map(|(k, &p)| (k, p))
    }

    pub fn get(&self, key: &[WeylIndex]) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.values().copied().collect()
    }

    pub fn shannon_entropy(&self) -> f64 {
        self.entries
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum::<f64>()
            .max(0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.entries.len() == 1
            && self
                .entries
                .keys()
                .all(|k| k.iter().all(|w| w.is_identity()))
    }

    /// Qubit single-use table as weights over (σ0, σx, σy, σz).
    pub fn sigma_weights(&self) -> Result<[f64; 4]> {
        if self.d != 2 || self.arity != 1 {
            return Err(SdcError::Invalid(
                "Pauli weights need a single-use qubit table".into(),
            ));
        }
        Ok([0, 1, 2, 3].map(|k| self.get(&[WeylIndex::sigma(k)])))
    }

    /// Independent product `self ⊗ other`.
    pub fn product(&self, other: &ProbTable) -> Result<Self> {
        if self.d != other.d {
            return Err(SdcError::DimensionMismatch(format!(
                "tables in dimensions {} and {}",
                self.d, other.d
            )));
        }
        let mut entries = BTreeMap::new();
        for (a, pa) in &self.entries {
            for (b, pb) in &other.entries {
                let key: Vec<WeylIndex> = a.iter().chain(b).copied().collect();
                entries.insert(key, pa * pb);
            }
        }
        Ok(Self {
            d: self.d,
            arity: self.arity + other.arity,
            entries,
        })
    }

    /// Marginal over the listed slots (in the listed order).
    pub fn marginal(&self, slots: &[usize]) -> Result<Self> {
        if let Some(&bad) = slots.iter().find(|&&s| s >= self.arity) {
            return Err(SdcError::SubsystemOutOfRange {
                index: bad,
                count: self.arity,
            });
        }
        let mut entries = BTreeMap::new();
        for (key, p) in &self.entries {
            let sub: Vec<WeylIndex> = slots.iter().map(|&s| key[s]).collect();
            *entries.entry(sub).or_insert(0.0) += p;
        }
        Ok(Self {
            d: self.d,
            arity: slots.len(),
            entries,
        })
    }
}

/// Depolarising weights: `q_00 = 1 - p + p/d²`, all others `p/d²`.
pub fn depolarising_probs(d: usize, p: f64) -> Result<ProbTable> {
    check_unit_interval("p", p)?;
    let d2 = (d * d) as f64;
    ProbTable::new(
        d,
        1,
        WeylIndex::all(d).map(|w| {
            let q = if w.is_identity() {
                1.0 - p + p / d2
            } else {
                p / d2
            };
            (vec![w], q)
        }),
    )
}

/// Quasi-classical weights: `(1-p)/d` for pure phase shifts (`m = 0`),
/// `p / (d(d-1))` for every index with a displacement.
pub fn quasiclassical_probs(d: usize, p: f64) -> Result<ProbTable> {
    check_unit_interval("p", p)?;
    if d < 2 {
        return Err(SdcError::Invalid(
            "quasi-classical channel needs d >= 2".into(),
        ));
    }
    let df = d as f64;
    ProbTable::new(
        d,
        1,
        WeylIndex::all(d).map(|w| {
            let q = if w.m == 0 {
                (1.0 - p) / df
            } else {
                p / (df * (df - 1.0))
            };
            (vec![w], q)
        }),
    )
}

/// Qubit table from weights over (σ0, σx, σy, σz).
pub fn sigma_probs(q4: [f64; 4]) -> Result<ProbTable> {
    ProbTable::new(2, 1, (0..4).map(|k| (vec![WeylIndex::sigma(k)], q4[k])))
}

/// Two-use table `(1-μ) q_a q_b + μ q_a δ_ab`.
pub fn correlate_pairwise(q: &ProbTable, mu: f64) -> Result<ProbTable> {
    check_unit_interval("mu", mu)?;
    single_use(q)?;
    let mut entries: Vec<(Vec<WeylIndex>, f64)> = Vec::new();
    for (a, pa) in q.iter() {
        for (b, pb) in q.iter() {
            let mut weight = (1.0 - mu) * pa * pb;
            if a == b {
                weight += mu * pa;
            }
            entries.push((vec![a[0], b[0]], weight));
        }
    }
    ProbTable::new(q.d, 2, entries)
}

fn single_use(q: &ProbTable) -> Result<()> {
    if q.arity != 1 {
        return Err(SdcError::Invalid(format!(
            "expected a single-use table, got arity {}",
            q.arity
        )));
    }
    Ok(())
}

/// Pairs `(j, l)`, `j < l`, in the order used for correlation-degree lists.
pub fn correlation_pairs(parties: usize) -> Vec<(usize, usize)> {
    (0..parties)
        .flat_map(|j| (j + 1..parties).map(move |l| (j, l)))
        .collect()
}

const MAX_FREE_PAIRS: usize = 16;

/// Multi-use table with pairwise correlation degrees.
///
/// `mu` lists one degree per pair in [`correlation_pairs`] order. The table is
/// the expansion over subsets `T` of pairs with weight
/// `Π_{T} μ_jl Π_{not T} (1 - μ_jl)`; the pairs in `T` force equal indices on
/// the channels they connect (transitively), and each group of tied channels
/// draws one index from `q`.
pub fn multiparty_correlated_probs(q: &ProbTable, mu: &[f64], parties: usize) -> Result<ProbTable> {
    single_use(q)?;
    if parties < 2 {
        return Err(SdcError::Invalid(
            "correlated table needs at least 2 uses".into(),
        ));
    }
    let pairs = correlation_pairs(parties);
    if mu.len() != pairs.len() {
        return Err(SdcError::Invalid(format!(
            "{parties} uses need {} correlation degrees, got {}",
            pairs.len(),
            mu.len()
        )));
    }
    for &m in mu {
        check_unit_interval("mu", m)?;
    }
    let forced: Vec<usize> = (0..pairs.len()).filter(|&i| mu[i] == 1.0).collect();
    let free: Vec<usize> = (0..pairs.len())
        .filter(|&i| mu[i] > 0.0 && mu[i] < 1.0)
        .collect();
    if free.len() > MAX_FREE_PAIRS {
        return Err(SdcError::UnsupportedCorrelation(format!(
            "{} partially correlated pairs exceed the supported {MAX_FREE_PAIRS}",
            free.len()
        )));
    }

    let single: Vec<(WeylIndex, f64)> = q.iter().map(|(k, p)| (k[0], p)).collect();
    let mut acc: BTreeMap<Vec<WeylIndex>, f64> = BTreeMap::new();
    for mask in 0u32..(1u32 << free.len()) {
        let mut weight = 1.0;
        let mut selected = forced.clone();
        for (bit, &pair) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                weight *= mu[pair];
                selected.push(pair);
            } else {
                weight *= 1.0 - mu[pair];
            }
        }
        if weight == 0.0 {
            continue;
        }
        let groups = tie_groups(parties, selected.iter().map(|&i| pairs[i]));
        let group_count = groups.iter().copied().max().map_or(0, |g| g + 1);
        // enumerate one index per group
        let mut choice = vec![0usize; group_count];
        loop {
            let p: f64 = choice.iter().map(|&ci| single[ci].1).product();
            let key: Vec<WeylIndex> = groups.iter().map(|&g| single[choice[g]].0).collect();
            *acc.entry(key).or_insert(0.0) += weight * p;
            // odometer increment
            let mut pos = 0;
            while pos < group_count {
                choice[pos] += 1;
                if choice[pos] < single.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == group_count {
                break;
            }
        }
    }
    ProbTable::new(q.d, parties, acc).map_err(|e| match e {
        SdcError::Normalization(msg) => SdcError::UnsupportedCorrelation(msg),
        other => other,
    })
}

/// Group label per party after merging the given pairs.
fn tie_groups(parties: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..parties).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for (a, b) in pairs {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut labels = BTreeMap::new();
    (0..parties)
        .map(|x| {
            let root = find(&mut parent, x);
            let next = labels.len();
            *labels.entry(root).or_insert(next)
        })
        .collect()
}

/// Fully correlated table: the same index on every use.
pub fn fully_correlated_probs(q: &ProbTable, parties: usize) -> Result<ProbTable> {
    single_use(q)?;
    ProbTable::new(
        q.d,
        parties,
        q.iter().map(|(k, p)| (vec![k[0]; parties], p)),
    )
}

/// A linear map on operators of a fixed total dimension.
pub trait QuantumChannel: Send + Sync {
    fn dim(&self) -> usize;

    /// Action on an arbitrary operator (linear extension).
    fn apply_matrix(&self, x: &CMatrix) -> CMatrix;

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(SdcError::DimensionMismatch(format!(
                "channel acts on dimension {}, state has dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(DensityMatrix::from_parts(
            self.apply_matrix(rho.matrix()),
            rho.dims().to_vec(),
        ))
    }
}

/// Which end of a bipartite link the noise acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Sender,
    Receiver,
}

#[derive(Debug, Clone, PartialEq)]
struct NoiseBlock {
    subsystems: Vec<usize>,
    table: ProbTable,
    // permutation and phase per table entry
    terms: Vec<(f64, Vec<usize>, Vec<Complex64>)>,
}

/// Random-unitary channel built from Weyl operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    dims: Vec<usize>,
    blocks: Vec<NoiseBlock>,
}

impl PauliChannel {
    /// Single correlated block acting on the `noisy` subsystems, identity elsewhere.
    pub fn new(dims: Vec<usize>, table: ProbTable, noisy: &[usize]) -> Result<Self> {
        Self::from_blocks(dims, vec![(noisy.to_vec(), table)])
    }

    /// Independent blocks; block subsystem sets must be disjoint.
    pub fn from_blocks(dims: Vec<usize>, blocks: Vec<(Vec<usize>, ProbTable)>) -> Result<Self> {
        check_dim_cap(dims.iter().product())?;
        let mut used = vec![false; dims.len()];
        let mut built = Vec::with_capacity(blocks.len());
        for (subsystems, table) in blocks {
            if subsystems.len() != table.arity() {
                return Err(SdcError::DimensionMismatch(format!(
                    "table of arity {} on {} subsystems",
                    table.arity(),
                    subsystems.len()
                )));
            }
            for &s in &subsystems {
                if s >= dims.len() {
                    return Err(SdcError::SubsystemOutOfRange {
                        index: s,
                        count: dims.len(),
                    });
                }
                if std::mem::replace(&mut used[s], true) {
                    return Err(SdcError::Invalid(format!(
                        "subsystem {s} appears in two noise blocks"
                    )));
                }
                if dims[s] != table.d() {
                    return Err(SdcError::DimensionMismatch(format!(
                        "subsystem {s} has dimension {}, table has {}",
                        dims[s],
                        table.d()
                    )));
                }
            }
            let terms = table
                .iter()
                .map(|(key, p)| {
                    let (perm, phase) = monomial(&dims, &subsystems, key);
                    (p, perm, phase)
                })
                .collect();
            built.push(NoiseBlock {
                subsystems,
                table,
                terms,
            });
        }
        Ok(Self {
            dims,
            blocks: built,
        })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        Self {
            dims,
            blocks: Vec::new(),
        }
    }

    /// Bipartite `[d, d]` channel with noise on one side only.
    pub fn one_sided(q: &ProbTable, side: Side) -> Result<Self> {
        single_use(q)?;
        let slot = match side {
            Side::Sender => 0,
            Side::Receiver => 1,
        };
        Self::new(vec![q.d(), q.d()], q.clone(), &[slot])
    }

    /// Bipartite channel with independent noise on both sides.
    pub fn two_sided(q_sender: &ProbTable, q_receiver: &ProbTable) -> Result<Self> {
        single_use(q_sender)?;
        single_use(q_receiver)?;
        Self::from_blocks(
            vec![q_sender.d(), q_receiver.d()],
            vec![(vec![0], q_sender.clone()), (vec![1], q_receiver.clone())],
        )
    }

    /// Bipartite channel with correlation degree `mu` between the two uses.
    pub fn correlated_two_sided(q: &ProbTable, mu: f64) -> Result<Self> {
        let table = correlate_pairwise(q, mu)?;
        Self::new(vec![q.d(), q.d()], table, &[0, 1])
    }

    /// Independent depolarising noise of strength `p` on both sides of `[d, d]`.
    pub fn depolarising_two_sided(d: usize, p: f64) -> Result<Self> {
        let q = depolarising_probs(d, p)?;
        Self::two_sided(&q, &q)
    }

    /// Independent copies of the same single-use noise on every subsystem.
    pub fn uncorrelated(dims: Vec<usize>, q: &ProbTable) -> Result<Self> {
        single_use(q)?;
        let blocks = (0..dims.len()).map(|s| (vec![s], q.clone())).collect();
        Self::from_blocks(dims, blocks)
    }

    /// Qubit quasi-classical channel on both sides with correlation `mu`.
    pub fn quasiclassical_correlated(p: f64, mu: f64) -> Result<Self> {
        let q = quasiclassical_probs(2, p)?;
        Self::correlated_two_sided(&q, mu)
    }

    /// `Σ_m q_m σ_m^{⊗ parties}` on `parties` qubits.
    pub fn fully_correlated(q4: [f64; 4], parties: usize) -> Result<Self> {
        let table = fully_correlated_probs(&sigma_probs(q4)?, parties)?;
        Self::new(vec![2; parties], table, &(0..parties).collect::<Vec<_>>())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn noisy_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dims.len()];
        for b in &self.blocks {
            for &s in &b.subsystems {
                mask[s] = true;
            }
        }
        mask
    }

    /// Joint table over the noisy subsystems in increasing subsystem order.
    pub fn joint_table(&self) -> Result<ProbTable> {
        let mut order: Vec<usize> = Vec::new();
        let mut table: Option<ProbTable> = None;
        for b in &self.blocks {
            order.extend(&b.subsystems);
            table = Some(match table {
                None => b.table.clone(),
                Some(t) => t.product(&b.table)?,
            });
        }
        let Some(table) = table else {
            let d = self.dims.first().copied().unwrap_or(1);
            return Ok(ProbTable::noiseless(d, 0));
        };
        let mut slots: Vec<usize> = (0..order.len()).collect();
        slots.sort_by_key(|&i| order[i]);
        table.marginal(&slots)
    }

    /// Noise restricted to the subsystems at or after `first`, as a channel on them.
    pub fn restricted_to_tail(&self, first: usize) -> Result<PauliChannel> {
        let dims = self.dims[first..].to_vec();
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let slots: Vec<usize> = (0..b.subsystems.len())
                .filter(|&i| b.subsystems[i] >= first)
                .collect();
            if slots.is_empty() {
                continue;
            }
            let subs = slots.iter().map(|&i| b.subsystems[i] - first).collect();
            blocks.push((subs, b.table.marginal(&slots)?));
        }
        Self::from_blocks(dims, blocks)
    }
}

/// Permutation and phase vectors of a tensor product of Weyl operators on `subsystems`.
fn monomial(
    dims: &[usize],
    subsystems: &[usize],
    key: &[WeylIndex],
) -> (Vec<usize>, Vec<Complex64>) {
    let st = strides(dims);
    let total: usize = dims.iter().product();
    let mut perm = Vec::with_capacity(total);
    let mut phase = Vec::with_capacity(total);
    for i in 0..total {
        let mut target = i;
        let mut ph = c(1.0, 0.0);
        for (&s, w) in subsystems.iter().zip(key) {
            let d = dims[s];
            let k = (i / st[s]) % d;
            let shifted = (k + w.m) % d;
            target = target - k * st[s] + shifted * st[s];
            ph *= omega(d, k * w.n);
        }
        perm.push(target);
        phase.push(ph);
    }
    (perm, phase)
}

impl QuantumChannel for PauliChannel {
    fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let dim = self.dim();
        assert_eq!(x.nrows(), dim, "operator dimension mismatch");
        let mut current = x.clone();
        for block in &self.blocks {
            let mut out = CMatrix::zeros(dim, dim);
            for (p, perm, phase) in &block.terms {
                for j in 0..dim {
                    let pj = phase[j].conj() * *p;
                    let cj = perm[j];
                    for i in 0..dim {
                        out[(i, j)] += phase[i] * pj * current[(perm[i], cj)];
                    }
                }
            }
            current = out;
        }
        current
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dims() != self.dims.as_slice() {
            return Err(SdcError::DimensionMismatch(format!(
                "channel layout {:?}, state layout {:?}",
                self.dims,
                rho.dims()
            )));
        }
        Ok(DensityMatrix::from_parts(
            self.apply_matrix(rho.matrix()),
            self.dims.clone(),
        ))
    }
}

/// Map given by Kraus operators on a single `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    dim: usize,
}

pub const KRAUS_TOL: f64 = 1e-8;

impl KrausChannel {
    /// Validates squareness and completeness `Σ K†K = 1` within [`KRAUS_TOL`].
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::from_ops_unchecked(ops)?;
        let residual = ch.completeness_residual();
        if residual > KRAUS_TOL {
            return Err(SdcError::NotTracePreserving(residual));
        }
        Ok(ch)
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops
            .first()
            .map(|k| k.nrows())
            .ok_or_else(|| SdcError::Invalid("empty Kraus list".into()))?;
        if ops.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(SdcError::DimensionMismatch(
                "Kraus operators must share one square shape".into(),
            ));
        }
        Ok(Self { ops, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![identity(dim)],
            dim,
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .ops
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs_diff(&sum, &identity(self.dim))
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                let out = self.apply_matrix(&e);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&out);
            }
        }
        choi
    }

    /// Smallest Choi eigenvalue; `>= -tol` certifies complete positivity.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        crate::qlin::hermitian_eig(&self.choi())
            .map(|s| *s.eigenvalues.last().unwrap())
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &KrausChannel) -> Result<Self> {
        if after.dim != self.dim {
            return Err(SdcError::DimensionMismatch(
                "composing maps of different dimension".into(),
            ));
        }
        let ops = after
            .ops
            .iter()
            .flat_map(|b| self.ops.iter().map(move |a| b * a))
            .collect();
        Ok(Self { ops, dim: self.dim })
    }

    /// Applies the map to the leading block of `rho` whose dimension is `self.dim()`
    /// (identity on the remaining subsystems).
    pub fn apply_on_leading(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        leading_prefix(rho.dims(), self.dim)?;
        let rest = rho.dim() / self.dim;
        let id = identity(rest);
        let mut out = CMatrix::zeros(rho.dim(), rho.dim());
        for k in &self.ops {
            match as_monomial(k) {
                Some((perm, phase)) => {
                    conjugate_monomial_into(&mut out, rho.matrix(), &perm, &phase, rest)
                }
                None => {
                    let full = kron(k, &id);
                    out += &full * rho.matrix() * full.adjoint();
                }
            }
        }
        Ok(DensityMatrix::from_parts(out, rho.dims().to_vec()))
    }
}

/// `(perm, phase)` with `K[a, perm[a]] = phase[a]` when every row of `k` has exactly one nonzero.
fn as_monomial(k: &CMatrix) -> Option<(Vec<usize>, Vec<Complex64>)> {
    let mut perm = Vec::with_capacity(k.nrows());
    let mut phase = Vec::with_capacity(k.nrows());
    for a in 0..k.nrows() {
        let mut hit = None;
        for x in 0..k.ncols() {
            if k[(a, x)] != Complex64::new(0.0, 0.0) {
                if hit.is_some() {
                    return None;
                }
                hit = Some(x);
            }
        }
        let x = hit?;
        perm.push(x);
        phase.push(k[(a, x)]);
    }
    Some((perm, phase))
}

/// Adds `(K ⊗ 1_rest) ρ (K ⊗ 1_rest)†` for a monomial `K` to `out`.
fn conjugate_monomial_into(
    out: &mut CMatrix,
    rho: &CMatrix,
    perm: &[usize],
    phase: &[Complex64],
    rest: usize,
) {
    let d = perm.len();
    for a in 0..d {
        for a2 in 0..d {
            let f = phase[a] * phase[a2].conj();
            for b in 0..rest {
                for b2 in 0..rest {
                    out[(a * rest + b, a2 * rest + b2)] +=
                        f * rho[(perm[a] * rest + b, perm[a2] * rest + b2)];
                }
            }
        }
    }
}

/// Number of leading subsystems whose dimensions multiply to `block_dim`.
pub fn leading_prefix(dims: &[usize], block_dim: usize) -> Result<usize> {
    let mut prod = 1;
    for (i, &d) in dims.iter().enumerate() {
        if prod == block_dim {
            return Ok(i);
        }
        prod *= d;
    }
    if prod == block_dim {
        return Ok(dims.len());
    }
    Err(SdcError::DimensionMismatch(format!(
        "no leading subsystems of {dims:?} span dimension {block_dim}"
    )))
}

impl QuantumChannel for KrausChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * x * k.adjoint()
            })
    }
}

/// Pre-processing with Kraus operators `|0⟩⟨1|` and `|0⟩⟨0|`: resets a qubit to `|0⟩`.
pub fn ground_state_reset() -> KrausChannel {
    let mut e1 = CMatrix::zeros(2, 2);
    e1[(0, 1)] = c(1.0, 0.0);
    let mut e2 = CMatrix::zeros(2, 2);
    e2[(0, 0)] = c(1.0, 0.0);
    KrausChannel {
        ops: vec![e1, e2],
        dim: 2,
    }
}

/// Sender-side Weyl operators `V_i ⊗ 1` for the first `senders` subsystems.
pub fn sender_weyl_ops(dims: &[usize], senders: usize) -> Vec<CMatrix> {
    let rest: usize = dims[senders..].iter().product();
    weyl_tuples(&dims[..senders])
        .iter()
        .map(|t| kron(&weyl_tensor(t), &identity(rest)))
        .collect()
}

/// Largest `|Λ(VρV†) - VΛ(ρ)V†|` over random states and all sender-side Weyl operators.
pub fn verify_covariance(
    ch: &dyn QuantumChannel,
    dims: &[usize],
    senders: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if dims.iter().product::<usize>() != ch.dim() {
        return Err(SdcError::DimensionMismatch(format!(
            "layout {dims:?} does not match channel dimension {}",
            ch.dim()
        )));
    }
    if senders > dims.len() {
        return Err(SdcError::SubsystemOutOfRange {
            index: senders,
            count: dims.len(),
        });
    }
    let ops = sender_weyl_ops(dims, senders);
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random::random_density(&mut rng, dims);
        let out = ch.apply_matrix(rho.matrix());
        for v in &ops {
            let lhs = ch.apply_matrix(&(v * rho.matrix() * v.adjoint()));
            let rhs = v * &out * v.adjoint();
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    Ok(worst)
}

/// `(1/d²) Σ_mn V_mn Ξ V_mn†`.
pub fn twirl(xi: &CMatrix, d: usize) -> Result<CMatrix> {
    if xi.nrows() != d || xi.ncols() != d {
        return Err(SdcError::DimensionMismatch(format!(
            "twirl in dimension {d} of a {}x{} operator",
            xi.nrows(),
            xi.ncols()
        )));
    }
    let sum = WeylIndex::all(d).fold(CMatrix::zeros(d, d), |acc, w| {
        let v = weyl_op(w);
        acc + &v * xi * v.adjoint()
    });
    Ok(sum.unscale((d * d) as f64))
}
