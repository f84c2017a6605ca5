//! Holevo quantity, the covariant-channel capacity formula and the closed forms
//! for the solved state/channel combinations.
//!
//! Subsystems are ordered senders first. An encoding acts on the leading block
//! whose dimension is the sender dimension `D_A`.

use serde::Serialize;

use crate::channels::{
    depolarising_probs, leading_prefix, quasiclassical_probs, weyl_tensor, weyl_tuples,
    KrausChannel, PauliChannel, ProbTable, QuantumChannel, WeylIndex,
};
use crate::error::{check_unit_interval, Result, SdcError};
use crate::qlin::{
    binary_entropy, partial_trace, partial_trace_matrix, relative_entropy_matrix, shannon_entropy,
    CMatrix, DensityMatrix,
};
use crate::states::werner_state;

/// Probability-weighted sender-side encodings.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingEnsemble {
    members: Vec<(f64, KrausChannel)>,
}

impl EncodingEnsemble {
    pub fn new(members: Vec<(f64, KrausChannel)>) -> Result<Self> {
        let probs: Vec<f64> = members.iter().map(|(p, _)| *p).collect();
        shannon_entropy(&probs)?;
        let dim = members
            .first()
            .map(|(_, k)| k.dim())
            .ok_or_else(|| SdcError::Invalid("empty ensemble".into()))?;
        for (_, k) in &members {
            if k.dim() != dim {
                return Err(SdcError::DimensionMismatch(
                    "ensemble members act on different dimensions".into(),
                ));
            }
            let r = k.completeness_residual();
            if r > crate::channels::KRAUS_TOL {
                return Err(SdcError::NotTracePreserving(r));
            }
        }
        Ok(Self { members })
    }

    /// `{(1/D_A², V_i ∘ Γ)}` with `V_i` running over Weyl tensors on the senders.
    pub fn weyl_after(gamma: &KrausChannel, sender_dims: &[usize]) -> Result<Self> {
        let d_a: usize = sender_dims.iter().product();
        if gamma.dim() != d_a {
            return Err(SdcError::DimensionMismatch(format!(
                "pre-processing acts on dimension {}, senders span {d_a}",
                gamma.dim()
            )));
        }
        let tuples = weyl_tuples(sender_dims);
        let p = 1.0 / tuples.len() as f64;
        let members = tuples
            .iter()
            .map(|t| {
                let v = weyl_tensor(t);
                let ops = gamma.ops().iter().map(|k| &v * k).collect();
                (
                    p,
                    KrausChannel::from_ops_unchecked(ops).expect("non-empty Kraus list"),
                )
            })
            .collect();
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, KrausChannel)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn sender_dim(&self) -> usize {
        self.members[0].1.dim()
    }
}

fn ensemble_outputs(
    ensemble: &EncodingEnsemble,
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
) -> Result<(Vec<(f64, DensityMatrix)>, CMatrix)> {
    if ch.dim() != rho.dim() {
        return Err(SdcError::DimensionMismatch(format!(
            "channel dimension {} vs state dimension {}",
            ch.dim(),
            rho.dim()
        )));
    }
    let mut avg = CMatrix::zeros(rho.dim(), rho.dim());
    let mut outs = Vec::with_capacity(ensemble.len());
    for (p, enc) in ensemble.members() {
        let out = ch.apply(&enc.apply_on_leading(rho)?)?;
        avg += out.matrix().scale(*p);
        outs.push((*p, out));
    }
    Ok((outs, avg))
}

/// `χ = S(Σ p_i Λ(ρ_i)) − Σ p_i S(Λ(ρ_i))`.
pub fn holevo_chi(
    ensemble: &EncodingEnsemble,
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
) -> Result<f64> {
    let (outs, avg) = ensemble_outputs(ensemble, rho, ch)?;
    let mean_entropy: f64 = outs.iter().map(|(p, o)| p * o.entropy()).sum();
    Ok(crate::qlin::matrix_entropy(&avg) - mean_entropy)
}

/// `χ = Σ p_i S(Λ(ρ_i) ‖ average)`.
pub fn holevo_chi_relative(
    ensemble: &EncodingEnsemble,
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
) -> Result<f64> {
    let (outs, avg) = ensemble_outputs(ensemble, rho, ch)?;
    outs.iter()
        .map(|(p, o)| relative_entropy_matrix(o.matrix(), &avg).map(|s| p * s))
        .sum()
}

/// `S(tr_A Λ(ρ))`, the receiver-side output entropy.
pub fn receiver_output_entropy(
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
    sender_dim: usize,
) -> Result<f64> {
    let senders = leading_prefix(rho.dims(), sender_dim)?;
    let out = ch.apply(rho)?;
    let kept: Vec<bool> = (0..rho.dims().len()).map(|i| i >= senders).collect();
    Ok(crate::qlin::matrix_entropy(&partial_trace_matrix(
        out.matrix(),
        rho.dims(),
        &kept,
    )))
}

/// `log2 D_A + S(Λ_b(ρ_b)) − min_entropy`.
pub fn capacity_via_min_entropy(
    rho: &DensityMatrix,
    ch: &dyn QuantumChannel,
    min_entropy: f64,
    sender_dim: usize,
) -> Result<f64> {
    Ok((sender_dim as f64).log2() + receiver_output_entropy(rho, ch, sender_dim)? - min_entropy)
}

/// Ensemble reaching [`capacity_via_min_entropy`] when `gamma_min` minimises the output entropy.
pub fn optimal_ensemble(rho: &DensityMatrix, gamma_min: &KrausChannel) -> Result<EncodingEnsemble> {
    let senders = leading_prefix(rho.dims(), gamma_min.dim())?;
    EncodingEnsemble::weyl_after(gamma_min, &rho.dims()[..senders])
}

/// `log2 D_A + S(ρ_b) − S(ρ)` with the first `senders` subsystems as the sender side.
pub fn c_noiseless(rho: &DensityMatrix, senders: usize) -> Result<f64> {
    if senders == 0 || senders >= rho.dims().len() {
        return Err(SdcError::SubsystemOutOfRange {
            index: senders,
            count: rho.dims().len(),
        });
    }
    let d_a: usize = rho.dims()[..senders].iter().product();
    let rest: Vec<usize> = (senders..rho.dims().len()).collect();
    let rho_b = partial_trace(rho, &rest)?;
    Ok((d_a as f64).log2() + rho_b.entropy() - rho.entropy())
}

/// `log2 d² − H({(1−η)/d² + η q_mn})`: Werner input, Pauli noise on one side.
pub fn c_one_sided_pauli_werner(d: usize, eta: f64, q: &ProbTable) -> Result<f64> {
    check_unit_interval("eta", eta)?;
    if q.arity() != 1 || q.d() != d {
        return Err(SdcError::DimensionMismatch(format!(
            "need a single-use table in dimension {d}"
        )));
    }
    let dd = (d * d) as f64;
    let mixed: Vec<f64> = WeylIndex::all(d)
        .map(|w| (1.0 - eta) / dd + eta * q.get(&[w]))
        .collect();
    Ok(dd.log2() - shannon_entropy(&mixed)?)
}

/// `log d + S(Λ_b(ρ_b)) − S(Λ_ab(ρ))` for depolarising noise of strength `p` on both sides.
pub fn c_two_sided_depolarising(rho: &DensityMatrix, p: f64) -> Result<f64> {
    let [da, db] = bipartite_dims(rho)?;
    let ch = PauliChannel::two_sided(&depolarising_probs(da, p)?, &depolarising_probs(db, p)?)?;
    capacity_via_min_entropy(rho, &ch, ch.apply(rho)?.entropy(), da)
}

fn bipartite_dims(rho: &DensityMatrix) -> Result<[usize; 2]> {
    match rho.dims() {
        &[a, b] => Ok([a, b]),
        other => Err(SdcError::DimensionMismatch(format!(
            "expected a bipartite state, got layout {other:?}"
        ))),
    }
}

/// Classical capacity of the qubit depolarising channel, `1 − H2(p/2)`.
pub fn classical_capacity_dep_qubit(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(1.0 - binary_entropy(p / 2.0))
}

/// `2 − S(Λ^Q(ρ_w))` for the correlated qubit quasi-classical channel.
pub fn c_quasiclassical_werner(eta: f64, p: f64, mu: f64) -> Result<f64> {
    let rho = werner_state(2, eta)?;
    let ch = PauliChannel::quasiclassical_correlated(p, mu)?;
    Ok(2.0 - ch.apply(&rho)?.entropy())
}

/// `2 − H(p4)`: Bell-diagonal input through a fully correlated qubit channel.
pub fn c_fully_correlated_bell_diagonal(p4: [f64; 4]) -> Result<f64> {
    Ok(2.0 - shannon_entropy(&p4)?)
}

/// `2 − S(ρ_w)`: Werner input through a fully correlated qubit channel.
pub fn c_fully_correlated_werner(eta: f64) -> Result<f64> {
    Ok(2.0 - werner_state(2, eta)?.entropy())
}

/// `1 − H2(p)`: Bell input, ground-state reset before encoding, quasi-classical noise.
pub fn transferred_info_quasiclassical_gamma(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(1.0 - binary_entropy(p))
}

/// `1 − H2(q)` with `q = q0 + q3`: Werner input, reset, fully correlated noise.
pub fn transferred_info_fully_gamma(q: f64) -> Result<f64> {
    check_unit_interval("q", q)?;
    Ok(1.0 - binary_entropy(q))
}

/// `k log2 d² − H(q)` for `k` Bell pairs with noise table `q` over the `k` sender halves.
pub fn c_kcopy_bell_correlated(d: usize, table: &ProbTable) -> Result<f64> {
    if table.d() != d {
        return Err(SdcError::DimensionMismatch(format!(
            "table in dimension {}, copies in dimension {d}",
            table.d()
        )));
    }
    let k = table.arity() as f64;
    Ok(k * ((d * d) as f64).log2() - shannon_entropy(&table.probabilities())?)
}

/// `k (2 − H(p4))`.
pub fn c_kcopy_bell_diagonal_fully(k: usize, p4: [f64; 4]) -> Result<f64> {
    check_copies(k)?;
    Ok(k as f64 * c_fully_correlated_bell_diagonal(p4)?)
}

/// `2k` for a `2k`-party GHZ state through a fully correlated channel.
pub fn c_ghz_fully(k: usize) -> Result<f64> {
    check_copies(k)?;
    Ok(2.0 * k as f64)
}

/// `k` times the single-copy two-sided depolarising capacity.
pub fn c_kcopy_depolarising(k: usize, rho: &DensityMatrix, p: f64) -> Result<f64> {
    check_copies(k)?;
    Ok(k as f64 * c_two_sided_depolarising(rho, p)?)
}

fn check_copies(k: usize) -> Result<()> {
    if k == 0 {
        return Err(SdcError::Invalid("k must be at least 1".into()));
    }
    Ok(())
}

/// Qubit quasi-classical table in σ order, for callers that only have `p`.
pub fn quasiclassical_sigma(p: f64) -> Result<[f64; 4]> {
    quasiclassical_probs(2, p)?.sigma_weights()
}

/// Result of evaluating one capacity formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub value: f64,
    pub case: String,
    pub formula_id: &'static str,
    pub formula: &'static str,
    pub inputs: Vec<(String, String)>,
    /// Description of the ensemble reaching the value, when one is known.
    pub witness: Option<String>,
    /// Value at or below `log2 D_A`, what the senders could send without entanglement.
    pub below_classical: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ground_state_reset, Side};
    use crate::states::{bell_diagonal, bell_state, k_copies, werner_weights};
    use approx::assert_abs_diff_eq;

    fn uniform_weyl(rho: &DensityMatrix, d_a: usize) -> EncodingEnsemble {
        optimal_ensemble(rho, &KrausChannel::identity(d_a)).unwrap()
    }

    #[test]
    fn chi_examples() {
        let bell = bell_state(2, 0, 0).unwrap();
        let id = PauliChannel::identity(vec![2, 2]);
        let single = EncodingEnsemble::new(vec![(1.0, KrausChannel::identity(2))]).unwrap();
        assert_abs_diff_eq!(
            holevo_chi(&single, &bell, &id).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let ens = uniform_weyl(&bell, 2);
        assert_eq!(ens.len(), 4);
        assert_abs_diff_eq!(holevo_chi(&ens, &bell, &id).unwrap(), 2.0, epsilon = 1e-10);

        let dep =
            PauliChannel::one_sided(&depolarising_probs(2, 0.5).unwrap(), Side::Sender).unwrap();
        let chi = holevo_chi(&ens, &bell, &dep).unwrap();
        assert_abs_diff_eq!(chi, 0.451_205_059_304_601_53, epsilon = 1e-10);
        assert_abs_diff_eq!(
            chi,
            holevo_chi_relative(&ens, &bell, &dep).unwrap(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn ensemble_validation() {
        assert!(EncodingEnsemble::new(vec![(0.5, KrausChannel::identity(2))]).is_err());
        assert!(EncodingEnsemble::new(vec![]).is_err());
        let bell = bell_state(2, 0, 0).unwrap();
        let ens = uniform_weyl(&bell, 2);
        let ch = PauliChannel::identity(vec![3, 3]);
        assert!(holevo_chi(&ens, &bell, &ch).is_err());
    }

    #[test]
    fn noiseless_examples() {
        assert_abs_diff_eq!(
            c_noiseless(&bell_state(2, 0, 0).unwrap(), 1).unwrap(),
            2.0,
            epsilon = 1e-10
        );
        let zero = DensityMatrix::from_pure(
            &crate::qlin::CVector::from_fn(4, |i, _| {
                crate::qlin::c(if i == 0 { 1.0 } else { 0.0 }, 0.0)
            }),
            vec![2, 2],
        )
        .unwrap();
        assert_abs_diff_eq!(c_noiseless(&zero, 1).unwrap(), 1.0, epsilon = 1e-10);
        let w = werner_state(2, 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(
            c_noiseless(&w, 1).unwrap(),
            0.207_518_749_639_421_96,
            epsilon = 1e-10
        );
        assert!(c_noiseless(&w, 2).is_err());
    }

    #[test]
    fn one_sided_examples() {
        let id = depolarising_probs(2, 0.0).unwrap();
        assert_abs_diff_eq!(
            c_one_sided_pauli_werner(2, 1.0, &id).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let id3 = depolarising_probs(3, 0.0).unwrap();
        assert_abs_diff_eq!(
            c_one_sided_pauli_werner(3, 1.0, &id3).unwrap(),
            9f64.log2(),
            epsilon = 1e-12
        );
        let half = depolarising_probs(2, 0.5).unwrap();
        assert_abs_diff_eq!(
            c_one_sided_pauli_werner(2, 1.0, &half).unwrap(),
            0.451_205_059_304_601_53,
            epsilon = 1e-10
        );
        let q = quasiclassical_probs(3, 0.3).unwrap();
        assert_abs_diff_eq!(
            c_one_sided_pauli_werner(3, 0.0, &q).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(c_one_sided_pauli_werner(3, 0.5, &half).is_err());
    }

    #[test]
    fn one_sided_matches_chi() {
        for d in [2, 3] {
            for &eta in &[0.2, 0.7, 1.0] {
                for q in [
                    depolarising_probs(d, 0.4).unwrap(),
                    quasiclassical_probs(d, 0.25).unwrap(),
                ] {
                    let rho = werner_state(d, eta).unwrap();
                    let ch = PauliChannel::one_sided(&q, Side::Sender).unwrap();
                    let chi = holevo_chi(&uniform_weyl(&rho, d), &rho, &ch).unwrap();
                    let closed = c_one_sided_pauli_werner(d, eta, &q).unwrap();
                    assert_abs_diff_eq!(chi, closed, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn one_sided_monotone_in_p() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let p = i as f64 / 49.0;
            let v = c_one_sided_pauli_werner(2, 0.8, &depolarising_probs(2, p).unwrap()).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn two_sided_examples() {
        let bell = bell_state(2, 0, 0).unwrap();
        assert_abs_diff_eq!(
            c_two_sided_depolarising(&bell, 0.0).unwrap(),
            2.0,
            epsilon = 1e-10
        );
        let mut rng = crate::random::rng(4);
        for dims in [[2, 2], [3, 3], [2, 3]] {
            let rho = crate::random::random_density(&mut rng, &dims);
            assert_abs_diff_eq!(
                c_two_sided_depolarising(&rho, 1.0).unwrap(),
                0.0,
                epsilon = 1e-10
            );
        }
        // at p = 0.345 the Bell value sits just below the separable one
        let v = c_two_sided_depolarising(&bell, 0.345).unwrap();
        assert_abs_diff_eq!(v, 0.336_182_918_822_808_04, epsilon = 1e-9);
        assert_abs_diff_eq!(
            classical_capacity_dep_qubit(0.345).unwrap(),
            0.336_608_108_152_482_1,
            epsilon = 1e-9
        );
    }

    #[test]
    fn two_sided_local_unitary_invariance() {
        let mut rng = crate::random::rng(21);
        let rho = crate::random::random_density(&mut rng, &[2, 2]);
        let base = c_two_sided_depolarising(&rho, 0.3).unwrap();
        for _ in 0..20 {
            let u = crate::qlin::kron(
                &crate::random::random_unitary(&mut rng, 2),
                &crate::random::random_unitary(&mut rng, 2),
            );
            let v = c_two_sided_depolarising(&rho.conjugated(&u).unwrap(), 0.3).unwrap();
            assert_abs_diff_eq!(v, base, epsilon = 1e-8);
        }
    }

    #[test]
    fn classical_dep_examples() {
        assert_abs_diff_eq!(
            classical_capacity_dep_qubit(0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            classical_capacity_dep_qubit(1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            classical_capacity_dep_qubit(0.5).unwrap(),
            0.188_721_875_540_867_17,
            epsilon = 1e-12
        );
        // same as two-sided formula on a pure product state
        let zero = DensityMatrix::from_pure(
            &crate::qlin::CVector::from_fn(4, |i, _| {
                crate::qlin::c(if i == 0 { 1.0 } else { 0.0 }, 0.0)
            }),
            vec![2, 2],
        )
        .unwrap();
        for p in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(
                c_two_sided_depolarising(&zero, p).unwrap(),
                classical_capacity_dep_qubit(p).unwrap(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn quasiclassical_examples() {
        for p in [0.0, 0.3, 0.8] {
            assert_abs_diff_eq!(
                c_quasiclassical_werner(1.0, p, 1.0).unwrap(),
                2.0,
                epsilon = 1e-10
            );
        }
        // p = 0 still dephases completely (q0 = q3 = 1/2)
        assert_abs_diff_eq!(
            c_quasiclassical_werner(1.0, 0.0, 0.0).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            c_quasiclassical_werner(1.0, 0.0, 0.5).unwrap(),
            1.188_721_875_540_866_8,
            epsilon = 1e-10
        );
        let un = c_quasiclassical_werner(1.0, 0.05, 0.2).unwrap();
        assert_abs_diff_eq!(un, 0.643_550_009_447_906_1, epsilon = 1e-9);
        let gamma = transferred_info_quasiclassical_gamma(0.05).unwrap();
        assert_abs_diff_eq!(gamma, 0.713_603_042_884_043_7, epsilon = 1e-12);
        assert!(gamma > un);
    }

    #[test]
    fn fully_correlated_examples() {
        assert_abs_diff_eq!(
            c_fully_correlated_bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_fully_correlated_bell_diagonal([0.25; 4]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_fully_correlated_bell_diagonal(werner_weights(1.0 / 3.0)).unwrap(),
            0.207_518_749_639_421_96,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            c_fully_correlated_werner(1.0 / 3.0).unwrap(),
            0.207_518_749_639_421_96,
            epsilon = 1e-10
        );
    }

    #[test]
    fn gamma_examples() {
        assert_abs_diff_eq!(
            transferred_info_quasiclassical_gamma(0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            transferred_info_quasiclassical_gamma(0.5).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            transferred_info_fully_gamma(1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            transferred_info_fully_gamma(0.5).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            transferred_info_fully_gamma(0.8).unwrap(),
            0.278_071_905_112_637_7,
            epsilon = 1e-12
        );
        for q in [0.1, 0.35, 0.6] {
            assert_abs_diff_eq!(
                transferred_info_fully_gamma(q).unwrap(),
                transferred_info_fully_gamma(1.0 - q).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn gamma_reset_through_channel() {
        let reset = ground_state_reset();
        let bell = bell_state(2, 0, 0).unwrap();
        for (p, mu) in [(0.05, 0.0), (0.2, 0.5), (0.7, 1.0)] {
            let ch = PauliChannel::quasiclassical_correlated(p, mu).unwrap();
            let min = ch
                .apply(&reset.apply_on_leading(&bell).unwrap())
                .unwrap()
                .entropy();
            let c = capacity_via_min_entropy(&bell, &ch, min, 2).unwrap();
            assert_abs_diff_eq!(
                c,
                transferred_info_quasiclassical_gamma(p).unwrap(),
                epsilon = 1e-8
            );
            let ens = optimal_ensemble(&bell, &reset).unwrap();
            assert_abs_diff_eq!(holevo_chi(&ens, &bell, &ch).unwrap(), c, epsilon = 1e-8);
        }
    }

    #[test]
    fn min_entropy_form_examples() {
        let bell = bell_state(2, 0, 0).unwrap();
        let id = PauliChannel::identity(vec![2, 2]);
        assert_abs_diff_eq!(
            capacity_via_min_entropy(&bell, &id, 0.0, 2).unwrap(),
            2.0,
            epsilon = 1e-10
        );
        let p4 = [0.4, 0.3, 0.2, 0.1];
        let bd = bell_diagonal(p4).unwrap();
        let ch = PauliChannel::fully_correlated([0.1, 0.6, 0.2, 0.1], 2).unwrap();
        let c = capacity_via_min_entropy(&bd, &ch, bd.entropy(), 2).unwrap();
        assert_abs_diff_eq!(
            c,
            c_fully_correlated_bell_diagonal(p4).unwrap(),
            epsilon = 1e-10
        );
        let chi = holevo_chi(&uniform_weyl(&bd, 2), &bd, &ch).unwrap();
        assert_abs_diff_eq!(chi, c, epsilon = 1e-8);
    }

    #[test]
    fn kcopy_examples() {
        let half = depolarising_probs(2, 0.5).unwrap();
        assert_abs_diff_eq!(
            c_kcopy_bell_correlated(2, &half).unwrap(),
            c_one_sided_pauli_werner(2, 1.0, &half).unwrap(),
            epsilon = 1e-12
        );
        let product = half.product(&half).unwrap();
        assert_abs_diff_eq!(
            c_kcopy_bell_correlated(2, &product).unwrap(),
            0.902_410_118_609_203,
            epsilon = 1e-10
        );
        let full = crate::channels::fully_correlated_probs(&half, 2).unwrap();
        assert_abs_diff_eq!(
            c_kcopy_bell_correlated(2, &full).unwrap(),
            2.451_205_059_304_601_5,
            epsilon = 1e-10
        );

        assert_abs_diff_eq!(
            c_kcopy_bell_diagonal_fully(3, [1.0, 0.0, 0.0, 0.0]).unwrap(),
            6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_kcopy_bell_diagonal_fully(2, [0.25; 4]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_kcopy_bell_diagonal_fully(2, werner_weights(1.0 / 3.0)).unwrap(),
            0.415_037_499_278_843_9,
            epsilon = 1e-10
        );
        assert_eq!(c_ghz_fully(1).unwrap(), 2.0);
        assert_eq!(c_ghz_fully(2).unwrap(), 4.0);
        assert!(c_ghz_fully(0).is_err());
    }

    #[test]
    fn kcopy_depolarising_examples() {
        let bell = bell_state(2, 0, 0).unwrap();
        assert_abs_diff_eq!(
            c_kcopy_depolarising(1, &bell, 0.3).unwrap(),
            c_two_sided_depolarising(&bell, 0.3).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_kcopy_depolarising(2, &bell, 0.0).unwrap(),
            4.0,
            epsilon = 1e-9
        );
        let v = c_kcopy_depolarising(2, &bell, 0.5).unwrap();
        assert_abs_diff_eq!(v, 0.239_518_370_111_704_3, epsilon = 1e-9);
        // brute force on the four-qubit product
        let two = k_copies(&bell, 2).unwrap();
        let ch =
            PauliChannel::uncorrelated(vec![2; 4], &depolarising_probs(2, 0.5).unwrap()).unwrap();
        let brute =
            capacity_via_min_entropy(&two, &ch, ch.apply(&two).unwrap().entropy(), 4).unwrap();
        assert_abs_diff_eq!(brute, v, epsilon = 1e-8);
    }
}
