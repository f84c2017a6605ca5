//! Registry of the solved state/channel combinations.
//!
//! Each case knows its closed form, the parameters it reads, and how to build
//! the state, channel and pre-processing whose Weyl ensemble attains the value.

use serde::Serialize;

use crate::capacity::{
    c_fully_correlated_bell_diagonal, c_fully_correlated_werner, c_ghz_fully,
    c_kcopy_bell_correlated, c_kcopy_bell_diagonal_fully, c_kcopy_depolarising, c_noiseless,
    c_one_sided_pauli_werner, c_quasiclassical_werner, c_two_sided_depolarising,
    classical_capacity_dep_qubit, holevo_chi, optimal_ensemble, transferred_info_fully_gamma,
    transferred_info_quasiclassical_gamma, CapacityReport,
};
use crate::channels::{
    correlation_pairs, depolarising_probs, ground_state_reset, multiparty_correlated_probs,
    quasiclassical_probs, KrausChannel, PauliChannel, ProbTable, Side,
};
use crate::error::{check_unit_interval, Result, SdcError};
use crate::qlin::{c, CVector, DensityMatrix, MAX_TOTAL_DIM};
use crate::states::{bell_diagonal, bell_state, ghz_state, k_copies, werner_state, werner_weights};

/// Single-use noise family selectable for the `d`-dimensional cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoiseKind {
    Depolarising,
    Quasiclassical,
}

impl NoiseKind {
    pub fn table(self, d: usize, p: f64) -> Result<ProbTable> {
        match self {
            NoiseKind::Depolarising => depolarising_probs(d, p),
            NoiseKind::Quasiclassical => quasiclassical_probs(d, p),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            NoiseKind::Depolarising => "depolarising",
            NoiseKind::Quasiclassical => "quasiclassical",
        }
    }
}

/// Resource state selectable for the cases that accept any input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateKind {
    Bell,
    Werner,
    BellDiagonal,
    Product,
}

impl StateKind {
    pub fn id(self) -> &'static str {
        match self {
            StateKind::Bell => "bell",
            StateKind::Werner => "werner",
            StateKind::BellDiagonal => "bell-diagonal",
            StateKind::Product => "product",
        }
    }
}

/// Parameters shared by all cases; each case reads the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseParams {
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub mu: f64,
    pub eta: f64,
    pub q: Option<f64>,
    /// Channel weights over (σ0, σx, σy, σz).
    pub q4: Option<[f64; 4]>,
    /// Bell-diagonal state weights.
    pub p4: Option<[f64; 4]>,
    pub noise: NoiseKind,
    pub state: StateKind,
    pub side: Side,
}

impl Default for CaseParams {
    fn default() -> Self {
        Self {
            d: 2,
            k: 1,
            p: 0.0,
            mu: 0.0,
            eta: 1.0,
            q: None,
            q4: None,
            p4: None,
            noise: NoiseKind::Depolarising,
            state: StateKind::Bell,
            side: Side::Sender,
        }
    }
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Side::Sender => "sender",
            Side::Receiver => "receiver",
        })
    }
}

/// Solved combinations of resource state and channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    Noiseless,
    OneSidedBell,
    OneSidedWerner,
    TwoSidedDepolarising,
    ClassicalDep2,
    QuasiclassicalBell,
    QuasiclassicalWerner,
    FullyCorrelatedBell,
    FullyCorrelatedWerner,
    FullyCorrelatedBellDiagonal,
    GammaQuasiclassical,
    GammaFully,
    KCopyBellCorrelated,
    KCopyBellFully,
    KCopyBellDiagonalFully,
    GhzFully,
    KCopyDepolarising,
}

impl Case {
    pub const ALL: [Case; 17] = [
        Case::Noiseless,
        Case::OneSidedBell,
        Case::OneSidedWerner,
        Case::TwoSidedDepolarising,
        Case::ClassicalDep2,
        Case::QuasiclassicalBell,
        Case::QuasiclassicalWerner,
        Case::FullyCorrelatedBell,
        Case::FullyCorrelatedWerner,
        Case::FullyCorrelatedBellDiagonal,
        Case::GammaQuasiclassical,
        Case::GammaFully,
        Case::KCopyBellCorrelated,
        Case::KCopyBellFully,
        Case::KCopyBellDiagonalFully,
        Case::GhzFully,
        Case::KCopyDepolarising,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Case::Noiseless => "noiseless",
            Case::OneSidedBell => "one-sided-bell",
            Case::OneSidedWerner => "one-sided-werner",
            Case::TwoSidedDepolarising => "two-sided-depolarising",
            Case::ClassicalDep2 => "classical-dep2",
            Case::QuasiclassicalBell => "quasiclassical-bell",
            Case::QuasiclassicalWerner => "quasiclassical-werner",
            Case::FullyCorrelatedBell => "fully-correlated-bell",
            Case::FullyCorrelatedWerner => "fully-correlated-werner",
            Case::FullyCorrelatedBellDiagonal => "fully-correlated-bell-diagonal",
            Case::GammaQuasiclassical => "gamma-quasiclassical",
            Case::GammaFully => "gamma-fully",
            Case::KCopyBellCorrelated => "kcopy-bell-correlated",
            Case::KCopyBellFully => "kcopy-bell-fully",
            Case::KCopyBellDiagonalFully => "kcopy-bell-diagonal-fully",
            Case::GhzFully => "ghz-fully",
            Case::KCopyDepolarising => "kcopy-depolarising",
        }
    }

    pub fn from_id(id: &str) -> Result<Case> {
        Case::ALL
            .into_iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| SdcError::UnknownCase(id.to_string()))
    }

    /// Stable identifier of the formula evaluated for this case.
    pub fn formula_id(self) -> &'static str {
        match self {
            Case::Noiseless => "noiseless-split",
            Case::OneSidedBell => "one-sided-pauli-bell",
            Case::OneSidedWerner => "one-sided-pauli-werner",
            Case::TwoSidedDepolarising => "two-sided-depolarising",
            Case::ClassicalDep2 => "depolarising-classical-qubit",
            Case::QuasiclassicalBell => "quasiclassical-bell-unitary",
            Case::QuasiclassicalWerner => "quasiclassical-werner-unitary",
            Case::FullyCorrelatedBell => "fully-correlated-bell",
            Case::FullyCorrelatedWerner => "fully-correlated-werner",
            Case::FullyCorrelatedBellDiagonal => "fully-correlated-bell-diagonal",
            Case::GammaQuasiclassical => "quasiclassical-bell-reset",
            Case::GammaFully => "fully-correlated-werner-reset",
            Case::KCopyBellCorrelated => "kcopy-bell-correlated-senders",
            Case::KCopyBellFully => "kcopy-bell-fully-correlated",
            Case::KCopyBellDiagonalFully => "kcopy-bell-diagonal-fully-correlated",
            Case::GhzFully => "ghz-fully-correlated",
            Case::KCopyDepolarising => "kcopy-uncorrelated-depolarising",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Case::Noiseless => "log2 d + S(rho_b) - S(rho)",
            Case::OneSidedBell => "log2 d^2 - H(q)",
            Case::OneSidedWerner => "log2 d^2 - H((1-eta)/d^2 + eta q)",
            Case::TwoSidedDepolarising => "log2 d + S(L_b(rho_b)) - S(L_ab(rho))",
            Case::ClassicalDep2 => "1 - H2(p/2)",
            Case::QuasiclassicalBell => "2 - S(L_Q(bell))",
            Case::QuasiclassicalWerner => "2 - S(L_Q(rho_w))",
            Case::FullyCorrelatedBell => "2",
            Case::FullyCorrelatedWerner => "2 - S(rho_w)",
            Case::FullyCorrelatedBellDiagonal => "2 - H(p4)",
            Case::GammaQuasiclassical => "1 - H2(p)",
            Case::GammaFully => "1 - H2(q0 + q3)",
            Case::KCopyBellCorrelated => "k log2 d^2 - H(q_k)",
            Case::KCopyBellFully => "2k",
            Case::KCopyBellDiagonalFully => "k (2 - H(p4))",
            Case::GhzFully => "2k",
            Case::KCopyDepolarising => "k (log2 d + S(L_b(rho_b)) - S(L_ab(rho)))",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Case::Noiseless => "any bipartite state, noiseless channel",
            Case::OneSidedBell => "Bell state, Pauli noise on one side",
            Case::OneSidedWerner => "Werner state, Pauli noise on one side",
            Case::TwoSidedDepolarising => "any bipartite state, depolarising noise on both sides",
            Case::ClassicalDep2 => "qubit depolarising channel without entanglement",
            Case::QuasiclassicalBell => "Bell state, correlated quasi-classical channel",
            Case::QuasiclassicalWerner => "Werner state, correlated quasi-classical channel",
            Case::FullyCorrelatedBell => "Bell state, fully correlated Pauli channel",
            Case::FullyCorrelatedWerner => "Werner state, fully correlated Pauli channel",
            Case::FullyCorrelatedBellDiagonal => {
                "Bell-diagonal state, fully correlated Pauli channel"
            }
            Case::GammaQuasiclassical => {
                "Bell state, reset pre-processing, quasi-classical channel"
            }
            Case::GammaFully => "Werner state, reset pre-processing, fully correlated channel",
            Case::KCopyBellCorrelated => "k Bell pairs, correlated Pauli noise on the senders",
            Case::KCopyBellFully => "k Bell pairs, fully correlated channel on all qubits",
            Case::KCopyBellDiagonalFully => "k Bell-diagonal pairs, fully correlated channel",
            Case::GhzFully => "2k-party GHZ state, fully correlated channel",
            Case::KCopyDepolarising => "k copies of a state, uncorrelated depolarising noise",
        }
    }

    /// True when the identity pre-processing attains the value.
    pub fn unitary(self) -> bool {
        !matches!(self, Case::GammaQuasiclassical | Case::GammaFully)
    }
}

/// State, channel and pre-processing whose Weyl ensemble attains a case's value.
pub struct WitnessSetup {
    pub rho: DensityMatrix,
    pub channel: PauliChannel,
    pub gamma: KrausChannel,
    pub sender_dim: usize,
}

impl WitnessSetup {
    /// Holevo quantity of `{(1/D_A², V_i ∘ Γ)}`.
    pub fn chi(&self) -> Result<f64> {
        let ens = optimal_ensemble(&self.rho, &self.gamma)?;
        holevo_chi(&ens, &self.rho, &self.channel)
    }

    pub fn members(&self) -> usize {
        self.sender_dim * self.sender_dim
    }
}

fn qubit_only(case: Case, params: &CaseParams) -> Result<()> {
    if params.d != 2 {
        return Err(SdcError::ParameterOutOfRange {
            name: "d",
            value: params.d as f64,
            range: "{2} for this case",
        });
    }
    let _ = case;
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(SdcError::ParameterOutOfRange {
            name: "d",
            value: d as f64,
            range: ">= 2",
        });
    }
    crate::qlin::check_dim_cap(d * d)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(SdcError::ParameterOutOfRange {
            name: "k",
            value: 0.0,
            range: ">= 1",
        });
    }
    Ok(())
}

fn product_state(d: usize) -> Result<DensityMatrix> {
    let psi = CVector::from_fn(d * d, |i, _| c(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    DensityMatrix::from_pure(&psi, vec![d, d])
}

/// The selected bipartite input for cases that accept any state.
pub fn selected_state(params: &CaseParams) -> Result<DensityMatrix> {
    check_d(params.d)?;
    match params.state {
        StateKind::Bell => bell_state(params.d, 0, 0),
        StateKind::Werner => werner_state(params.d, params.eta),
        StateKind::Product => product_state(params.d),
        StateKind::BellDiagonal => {
            if params.d != 2 {
                return Err(SdcError::ParameterOutOfRange {
                    name: "d",
                    value: params.d as f64,
                    range: "{2} for Bell-diagonal states",
                });
            }
            bell_diagonal(bell_diagonal_weights(params))
        }
    }
}

fn bell_diagonal_weights(params: &CaseParams) -> [f64; 4] {
    params.p4.unwrap_or_else(|| werner_weights(params.eta))
}

/// Weights of a fully correlated qubit channel: `q4` if given, otherwise built from `q`
/// (`q0 = q3 = q/2`), otherwise the depolarising weights at `p`.
fn fully_weights(params: &CaseParams) -> Result<[f64; 4]> {
    if let Some(q4) = params.q4 {
        return Ok(q4);
    }
    if let Some(q) = params.q {
        check_unit_interval("q", q)?;
        return Ok([q / 2.0, (1.0 - q) / 2.0, (1.0 - q) / 2.0, q / 2.0]);
    }
    depolarising_probs(2, params.p)?.sigma_weights()
}

fn kcopy_table(params: &CaseParams) -> Result<ProbTable> {
    check_k(params.k)?;
    let q = params.noise.table(params.d, params.p)?;
    if params.k == 1 {
        return Ok(q);
    }
    let mus = vec![params.mu; correlation_pairs(params.k).len()];
    multiparty_correlated_probs(&q, &mus, params.k)
}

fn check_total(dim: usize) -> Result<()> {
    crate::qlin::check_dim_cap(dim)
}

/// Closed-form value of a case.
pub fn closed_form(case: Case, params: &CaseParams) -> Result<f64> {
    check_unit_interval("p", params.p)?;
    check_unit_interval("mu", params.mu)?;
    check_unit_interval("eta", params.eta)?;
    match case {
        Case::Noiseless => c_noiseless(&selected_state(params)?, 1),
        Case::OneSidedBell => {
            check_d(params.d)?;
            c_one_sided_pauli_werner(params.d, 1.0, &params.noise.table(params.d, params.p)?)
        }
        Case::OneSidedWerner => {
            check_d(params.d)?;
            c_one_sided_pauli_werner(
                params.d,
                params.eta,
                &params.noise.table(params.d, params.p)?,
            )
        }
        Case::TwoSidedDepolarising => c_two_sided_depolarising(&selected_state(params)?, params.p),
        Case::ClassicalDep2 => {
            qubit_only(case, params)?;
            classical_capacity_dep_qubit(params.p)
        }
        Case::QuasiclassicalBell => {
            qubit_only(case, params)?;
            c_quasiclassical_werner(1.0, params.p, params.mu)
        }
        Case::QuasiclassicalWerner => {
            qubit_only(case, params)?;
            c_quasiclassical_werner(params.eta, params.p, params.mu)
        }
        Case::FullyCorrelatedBell => {
            qubit_only(case, params)?;
            c_fully_correlated_bell_diagonal([1.0, 0.0, 0.0, 0.0])
        }
        Case::FullyCorrelatedWerner => {
            qubit_only(case, params)?;
            c_fully_correlated_werner(params.eta)
        }
        Case::FullyCorrelatedBellDiagonal => {
            qubit_only(case, params)?;
            c_fully_correlated_bell_diagonal(bell_diagonal_weights(params))
        }
        Case::GammaQuasiclassical => {
            qubit_only(case, params)?;
            transferred_info_quasiclassical_gamma(params.p)
        }
        Case::GammaFully => {
            qubit_only(case, params)?;
            let q4 = fully_weights(params)?;
            crate::qlin::shannon_entropy(&q4)?;
            transferred_info_fully_gamma((q4[0] + q4[3]).clamp(0.0, 1.0))
        }
        Case::KCopyBellCorrelated => {
            check_d(params.d)?;
            c_kcopy_bell_correlated(params.d, &kcopy_table(params)?)
        }
        Case::KCopyBellFully => {
            qubit_only(case, params)?;
            check_k(params.k)?;
            c_kcopy_bell_diagonal_fully(params.k, [1.0, 0.0, 0.0, 0.0])
        }
        Case::KCopyBellDiagonalFully => {
            qubit_only(case, params)?;
            check_k(params.k)?;
            c_kcopy_bell_diagonal_fully(params.k, bell_diagonal_weights(params))
        }
        Case::GhzFully => {
            check_k(params.k)?;
            check_total(
                1usize
                    .checked_shl(2 * params.k as u32)
                    .unwrap_or(usize::MAX),
            )?;
            c_ghz_fully(params.k)
        }
        Case::KCopyDepolarising => {
            check_k(params.k)?;
            let rho = selected_state(params)?;
            check_total(rho.dim().checked_pow(params.k as u32).unwrap_or(usize::MAX))?;
            c_kcopy_depolarising(params.k, &rho, params.p)
        }
    }
}

/// State, channel and pre-processing reaching the case's value.
pub fn witness_setup(case: Case, params: &CaseParams) -> Result<WitnessSetup> {
    let identity = |rho: DensityMatrix, channel: PauliChannel, sender_dim: usize| WitnessSetup {
        rho,
        channel,
        gamma: KrausChannel::identity(sender_dim),
        sender_dim,
    };
    let d = params.d;
    Ok(match case {
        Case::Noiseless => {
            let rho = selected_state(params)?;
            let ch = PauliChannel::identity(rho.dims().to_vec());
            identity(rho, ch, d)
        }
        Case::OneSidedBell | Case::OneSidedWerner => {
            check_d(d)?;
            let eta = if case == Case::OneSidedBell {
                1.0
            } else {
                params.eta
            };
            let ch = PauliChannel::one_sided(&params.noise.table(d, params.p)?, params.side)?;
            identity(werner_state(d, eta)?, ch, d)
        }
        Case::TwoSidedDepolarising => {
            let rho = selected_state(params)?;
            identity(rho, PauliChannel::depolarising_two_sided(d, params.p)?, d)
        }
        Case::ClassicalDep2 => {
            qubit_only(case, params)?;
            identity(
                product_state(2)?,
                PauliChannel::depolarising_two_sided(2, params.p)?,
                2,
            )
        }
        Case::QuasiclassicalBell | Case::QuasiclassicalWerner => {
            qubit_only(case, params)?;
            let eta = if case == Case::QuasiclassicalBell {
                1.0
            } else {
                params.eta
            };
            let ch = PauliChannel::quasiclassical_correlated(params.p, params.mu)?;
            identity(werner_state(2, eta)?, ch, 2)
        }
        Case::FullyCorrelatedBell
        | Case::FullyCorrelatedWerner
        | Case::FullyCorrelatedBellDiagonal => {
            qubit_only(case, params)?;
            let rho = match case {
                Case::FullyCorrelatedBell => bell_state(2, 0, 0)?,
                Case::FullyCorrelatedWerner => werner_state(2, params.eta)?,
                _ => bell_diagonal(bell_diagonal_weights(params))?,
            };
            identity(
                rho,
                PauliChannel::fully_correlated(fully_weights(params)?, 2)?,
                2,
            )
        }
        Case::GammaQuasiclassical => {
            qubit_only(case, params)?;
            WitnessSetup {
                rho: bell_state(2, 0, 0)?,
                channel: PauliChannel::quasiclassical_correlated(params.p, params.mu)?,
                gamma: ground_state_reset(),
                sender_dim: 2,
            }
        }
        Case::GammaFully => {
            qubit_only(case, params)?;
            WitnessSetup {
                rho: werner_state(2, params.eta)?,
                channel: PauliChannel::fully_correlated(fully_weights(params)?, 2)?,
                gamma: ground_state_reset(),
                sender_dim: 2,
            }
        }
        Case::KCopyBellCorrelated => {
            check_d(d)?;
            let table = kcopy_table(params)?;
            let rho = k_copies(&bell_state(d, 0, 0)?, params.k)?;
            let senders: Vec<usize> = (0..params.k).collect();
            let ch = PauliChannel::new(rho.dims().to_vec(), table, &senders)?;
            identity(rho, ch, d.pow(params.k as u32))
        }
        Case::KCopyBellFully | Case::KCopyBellDiagonalFully => {
            qubit_only(case, params)?;
            check_k(params.k)?;
            let pair = if case == Case::KCopyBellFully {
                bell_state(2, 0, 0)?
            } else {
                bell_diagonal(bell_diagonal_weights(params))?
            };
            let rho = k_copies(&pair, params.k)?;
            let ch = PauliChannel::fully_correlated(fully_weights(params)?, 2 * params.k)?;
            identity(rho, ch, 1 << params.k)
        }
        Case::GhzFully => {
            check_k(params.k)?;
            let parties = 2 * params.k;
            let rho = ghz_state(parties)?;
            let ch = PauliChannel::fully_correlated(fully_weights(params)?, parties)?;
            identity(rho, ch, 1 << (parties - 1))
        }
        Case::KCopyDepolarising => {
            check_k(params.k)?;
            let rho = k_copies(&selected_state(params)?, params.k)?;
            let ch =
                PauliChannel::uncorrelated(rho.dims().to_vec(), &depolarising_probs(d, params.p)?)?;
            identity(rho, ch, d.pow(params.k as u32))
        }
    })
}

fn inputs(case: Case, params: &CaseParams) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| out.push((k.to_string(), v));
    let uses_state = matches!(
        case,
        Case::Noiseless | Case::TwoSidedDepolarising | Case::KCopyDepolarising
    );
    let uses_d = !matches!(case, Case::GhzFully);
    let uses_eta = matches!(
        case,
        Case::OneSidedWerner
            | Case::QuasiclassicalWerner
            | Case::FullyCorrelatedWerner
            | Case::GammaFully
    ) || (uses_state && params.state == StateKind::Werner)
        || (matches!(
            case,
            Case::FullyCorrelatedBellDiagonal | Case::KCopyBellDiagonalFully
        ) && params.p4.is_none());
    if uses_state {
        push("state", params.state.id().to_string());
    }
    if uses_d {
        push("d", params.d.to_string());
    }
    if matches!(
        case,
        Case::KCopyBellCorrelated
            | Case::KCopyBellFully
            | Case::KCopyBellDiagonalFully
            | Case::GhzFully
            | Case::KCopyDepolarising
    ) {
        push("k", params.k.to_string());
    }
    if matches!(
        case,
        Case::OneSidedBell | Case::OneSidedWerner | Case::KCopyBellCorrelated
    ) {
        push("noise", params.noise.id().to_string());
    }
    if matches!(
        case,
        Case::OneSidedBell
            | Case::OneSidedWerner
            | Case::TwoSidedDepolarising
            | Case::ClassicalDep2
            | Case::QuasiclassicalBell
            | Case::QuasiclassicalWerner
            | Case::GammaQuasiclassical
            | Case::KCopyBellCorrelated
            | Case::KCopyDepolarising
    ) {
        push("p", params.p.to_string());
    }
    if matches!(
        case,
        Case::QuasiclassicalBell | Case::QuasiclassicalWerner | Case::KCopyBellCorrelated
    ) {
        push("mu", params.mu.to_string());
    }
    if uses_eta {
        push("eta", params.eta.to_string());
    }
    if matches!(
        case,
        Case::FullyCorrelatedBellDiagonal | Case::KCopyBellDiagonalFully
    ) || (uses_state && params.state == StateKind::BellDiagonal)
    {
        if let Some(p4) = params.p4 {
            push("p4", format!("{},{},{},{}", p4[0], p4[1], p4[2], p4[3]));
        }
    }
    if case == Case::GammaFully {
        if let Ok(q4) = fully_weights(params) {
            push("q", (q4[0] + q4[3]).to_string());
        }
    }
    out
}

fn sender_dim(case: Case, params: &CaseParams) -> usize {
    match case {
        Case::KCopyBellCorrelated | Case::KCopyDepolarising => {
            params.d.saturating_pow(params.k as u32)
        }
        Case::KCopyBellFully | Case::KCopyBellDiagonalFully => 1usize << params.k.min(30),
        Case::GhzFully => 1usize << (2 * params.k).saturating_sub(1).min(60),
        _ => params.d,
    }
}

/// Closed-form value with its formula, inputs and witness description.
pub fn evaluate(case: Case, params: &CaseParams) -> Result<CapacityReport> {
    let value = closed_form(case, params)?;
    let d_a = sender_dim(case, params);
    let witness = if d_a * d_a <= MAX_TOTAL_DIM * MAX_TOTAL_DIM {
        let pre = if case.unitary() {
            "identity"
        } else {
            "ground-state reset"
        };
        Some(format!(
            "{} Weyl encodings after {pre}, probability 1/{}",
            d_a * d_a,
            d_a * d_a
        ))
    } else {
        None
    };
    Ok(CapacityReport {
        value,
        case: case.id().to_string(),
        formula_id: case.formula_id(),
        formula: case.formula(),
        inputs: inputs(case, params),
        witness,
        below_classical: value <= (d_a as f64).log2() + 1e-12,
    })
}
