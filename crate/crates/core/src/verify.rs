//! Pass/fail matrix over every solved state/channel cell plus the threshold and
//! crossover claims.
//!
//! Each solved cell is checked three ways: the closed form, the Holevo quantity
//! of the uniform Weyl ensemble after applying the channel numerically, and
//! (for small systems) a restart search over sender unitaries that must not
//! find an output entropy below the identity's. The search can only corroborate
//! optimality of the identity, never prove it.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{c_kcopy_depolarising, c_two_sided_depolarising, capacity_via_min_entropy};
use crate::cases::{
    closed_form, witness_setup, Case, CaseParams, NoiseKind, StateKind, WitnessSetup,
};
use crate::channels::{depolarising_probs, KrausChannel, PauliChannel, ProbTable};
use crate::error::Result;
use crate::optimize::roots::{
    crossover_eta_tilde, crossover_mu_tilde, crossover_p_range, depolarising_transition_threshold,
    linspace, quasiclassical_gap, DEFAULT_TOL,
};
use crate::optimize::{min_output_entropy_unitary, OptOptions, Structure};
use crate::qlin::DensityMatrix;
use crate::random::{random_density, random_distribution, rng};
use crate::states::k_copies;

/// Closed form and witness χ must agree this closely.
pub const CHI_TOL: f64 = 1e-8;
/// The identity encoding must reproduce the closed form this closely.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Slack allowed when the search finds an entropy below the identity's.
pub const SEARCH_SLACK: f64 = 1e-4;
/// Largest total dimension for which the unitary search runs.
pub const SEARCH_MAX_DIM: usize = 16;

/// Published values the numerics are compared against.
pub const REFERENCE_P_T: f64 = 0.345;
pub const REFERENCE_ETA: f64 = 0.747;
pub const REFERENCE_MU_TILDE: f64 = 0.294;
pub const REFERENCE_INTERVAL: (f64, f64) = (0.007, 0.293);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Open,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Open => "SKIPPED(open)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub group: &'static str,
    pub state: &'static str,
    pub channel: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub opt: OptOptions,
    /// Run the unitary search on small systems.
    pub search: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            opt: OptOptions::default(),
            search: true,
        }
    }
}

/// One parameter point of a cell.
struct Instance {
    label: String,
    closed: f64,
    setup: WitnessSetup,
}

#[derive(Default)]
struct Outcome {
    points: usize,
    max_chi_gap: f64,
    max_identity_gap: f64,
    searched: usize,
    max_search_drop: f64,
    failures: Vec<String>,
}

impl Outcome {
    fn row(self, group: &'static str, state: &'static str, channel: &'static str) -> CheckRow {
        let mut detail = format!(
            "{} points, max |closed - chi| {:.1e}",
            self.points, self.max_chi_gap
        );
        if self.searched > 0 {
            detail.push_str(&format!(
                ", identity gap {:.1e}, {} searched, max drop below identity {:.1e}",
                self.max_identity_gap, self.searched, self.max_search_drop
            ));
        }
        if !self.failures.is_empty() {
            detail.push_str("; ");
            detail.push_str(&self.failures.join("; "));
        }
        CheckRow {
            group,
            state,
            channel,
            status: if self.failures.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            },
            detail,
        }
    }
}

fn check_instance(inst: &Instance, opts: &VerifyOptions, out: &mut Outcome) -> Result<()> {
    out.points += 1;
    let chi = inst.setup.chi()?;
    let gap = (chi - inst.closed).abs();
    out.max_chi_gap = out.max_chi_gap.max(gap);
    if !(gap <= CHI_TOL) {
        out.failures.push(format!(
            "{}: closed {} vs chi {}",
            inst.label, inst.closed, chi
        ));
    }
    let small = inst.setup.rho.dim() <= SEARCH_MAX_DIM;
    let unitary_witness = inst.setup.gamma == KrausChannel::identity(inst.setup.sender_dim);
    if opts.search && small && unitary_witness {
        let d_a = inst.setup.sender_dim;
        let res = min_output_entropy_unitary(
            &inst.setup.rho,
            &inst.setup.channel,
            &Structure::Global(d_a),
            &opts.opt,
        )?;
        let at_identity = capacity_via_min_entropy(
            &inst.setup.rho,
            &inst.setup.channel,
            res.identity_value,
            d_a,
        )?;
        let id_gap = (at_identity - inst.closed).abs();
        let drop = (res.identity_value - res.best_value).max(0.0);
        out.searched += 1;
        out.max_identity_gap = out.max_identity_gap.max(id_gap);
        out.max_search_drop = out.max_search_drop.max(drop);
        if !(id_gap <= IDENTITY_TOL) {
            out.failures.push(format!(
                "{}: identity gives {} vs {}",
                inst.label, at_identity, inst.closed
            ));
        }
        if drop > SEARCH_SLACK {
            out.failures.push(format!(
                "{}: search found entropy {} below identity {}",
                inst.label, res.best_value, res.identity_value
            ));
        }
    }
    Ok(())
}

fn from_case(case: Case, params: CaseParams) -> Result<Instance> {
    Ok(Instance {
        label: format!("{} d={} k={}", case.id(), params.d, params.k),
        closed: closed_form(case, &params)?,
        setup: witness_setup(case, &params)?,
    })
}

fn base() -> CaseParams {
    CaseParams {
        p: 0.3,
        mu: 0.4,
        eta: 0.6,
        q4: Some([0.4, 0.1, 0.2, 0.3]),
        p4: Some([0.5, 0.2, 0.2, 0.1]),
        ..CaseParams::default()
    }
}

fn arbitrary_state(d: usize, seed: u64) -> Result<DensityMatrix> {
    Ok(random_density(&mut rng(seed), &[d, d]))
}

fn random_table(d: usize, seed: u64) -> Result<ProbTable> {
    ProbTable::from_grid(d, &random_distribution(&mut rng(seed), d * d))
}

type Builder = fn() -> Result<Vec<Instance>>;

struct Cell {
    group: &'static str,
    state: &'static str,
    channel: &'static str,
    build: Option<Builder>,
}

const T1_CHANNELS: [&str; 5] = [
    "one-sided Pauli",
    "two-sided depolarising",
    "two-sided correlated depolarising",
    "correlated quasi-classical",
    "fully correlated Pauli",
];
const T2_CHANNELS: [&str; 3] = [
    "correlated Pauli on senders",
    "fully correlated Pauli",
    "uncorrelated depolarising",
];

fn one_sided(eta_case: Case) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        for noise in [NoiseKind::Depolarising, NoiseKind::Quasiclassical] {
            out.push(from_case(eta_case, CaseParams { d, noise, ..base() })?);
        }
        // an arbitrary Pauli table
        let table = random_table(d, 11 + d as u64)?;
        let eta = if eta_case == Case::OneSidedBell {
            1.0
        } else {
            0.6
        };
        let rho = crate::states::werner_state(d, eta)?;
        out.push(Instance {
            label: format!("random table d={d}"),
            closed: crate::capacity::c_one_sided_pauli_werner(d, eta, &table)?,
            setup: WitnessSetup {
                rho,
                channel: PauliChannel::one_sided(&table, crate::channels::Side::Sender)?,
                gamma: KrausChannel::identity(d),
                sender_dim: d,
            },
        });
    }
    Ok(out)
}

fn two_sided(state: StateKind) -> Result<Vec<Instance>> {
    let dims: &[usize] = if state == StateKind::BellDiagonal {
        &[2]
    } else {
        &[2, 3]
    };
    dims.iter()
        .map(|&d| {
            from_case(
                Case::TwoSidedDepolarising,
                CaseParams { d, state, ..base() },
            )
        })
        .collect()
}

fn quasi(case: Case) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for mu in [0.0, 0.4, 1.0] {
        for p in [0.05, 0.3] {
            out.push(from_case(case, CaseParams { mu, p, ..base() })?);
        }
    }
    Ok(out)
}

fn arbitrary_two_sided() -> Result<Vec<Instance>> {
    [2usize, 3]
        .iter()
        .map(|&d| {
            let rho = arbitrary_state(d, 100 + d as u64)?;
            Ok(Instance {
                label: format!("random state d={d}"),
                closed: c_two_sided_depolarising(&rho, 0.3)?,
                setup: WitnessSetup {
                    channel: PauliChannel::depolarising_two_sided(d, 0.3)?,
                    gamma: KrausChannel::identity(d),
                    sender_dim: d,
                    rho,
                },
            })
        })
        .collect()
}

fn over_dk(case: Case, dims: &[usize], params: CaseParams) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for &d in dims {
        for k in [1, 2] {
            out.push(from_case(
                case,
                CaseParams {
                    d,
                    k,
                    ..params.clone()
                },
            )?);
        }
    }
    Ok(out)
}

fn arbitrary_kcopy() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for d in [2usize, 3] {
        let rho = arbitrary_state(d, 200 + d as u64)?;
        for k in [1usize, 2] {
            let copies = k_copies(&rho, k)?;
            let channel =
                PauliChannel::uncorrelated(copies.dims().to_vec(), &depolarising_probs(d, 0.3)?)?;
            out.push(Instance {
                label: format!("random state d={d} k={k}"),
                closed: c_kcopy_depolarising(k, &rho, 0.3)?,
                setup: WitnessSetup {
                    rho: copies,
                    channel,
                    gamma: KrausChannel::identity(d.pow(k as u32)),
                    sender_dim: d.pow(k as u32),
                },
            });
        }
    }
    Ok(out)
}

fn cells() -> Vec<Cell> {
    let t1: [(&'static str, [Option<Builder>; 5]); 4] = [
        (
            "Bell",
            [
                Some(|| one_sided(Case::OneSidedBell)),
                Some(|| two_sided(StateKind::Bell)),
                None,
                Some(|| quasi(Case::QuasiclassicalBell)),
                Some(|| Ok(vec![from_case(Case::FullyCorrelatedBell, base())?])),
            ],
        ),
        (
            "Werner",
            [
                Some(|| one_sided(Case::OneSidedWerner)),
                Some(|| two_sided(StateKind::Werner)),
                None,
                Some(|| quasi(Case::QuasiclassicalWerner)),
                Some(|| {
                    [0.0, 0.6, 1.0]
                        .iter()
                        .map(|&eta| {
                            from_case(Case::FullyCorrelatedWerner, CaseParams { eta, ..base() })
                        })
                        .collect()
                }),
            ],
        ),
        (
            "Bell-diagonal",
            [
                None,
                Some(|| two_sided(StateKind::BellDiagonal)),
                None,
                None,
                Some(|| Ok(vec![from_case(Case::FullyCorrelatedBellDiagonal, base())?])),
            ],
        ),
        (
            "arbitrary",
            [None, Some(arbitrary_two_sided), None, None, None],
        ),
    ];
    let t2: [(&'static str, [Option<Builder>; 3]); 4] = [
        (
            "k Bell pairs",
            [
                Some(|| over_dk(Case::KCopyBellCorrelated, &[2, 3], base())),
                Some(|| over_dk(Case::KCopyBellFully, &[2], base())),
                Some(|| over_dk(Case::KCopyDepolarising, &[2, 3], base())),
            ],
        ),
        (
            "k Bell-diagonal pairs",
            [
                None,
                Some(|| over_dk(Case::KCopyBellDiagonalFully, &[2], base())),
                Some(|| {
                    over_dk(
                        Case::KCopyDepolarising,
                        &[2],
                        CaseParams {
                            state: StateKind::BellDiagonal,
                            ..base()
                        },
                    )
                }),
            ],
        ),
        (
            "2k-party GHZ",
            [None, Some(|| over_dk(Case::GhzFully, &[2], base())), None],
        ),
        ("k arbitrary pairs", [None, None, Some(arbitrary_kcopy)]),
    ];
    let mut out = Vec::new();
    for (state, builders) in t1 {
        for (channel, build) in T1_CHANNELS.iter().zip(builders) {
            out.push(Cell {
                group: "bipartite",
                state,
                channel,
                build,
            });
        }
    }
    for (state, builders) in t2 {
        for (channel, build) in T2_CHANNELS.iter().zip(builders) {
            out.push(Cell {
                group: "multipartite",
                state,
                channel,
                build,
            });
        }
    }
    out
}

fn run_cell(cell: &Cell, opts: &VerifyOptions) -> CheckRow {
    let Some(build) = cell.build else {
        return CheckRow {
            group: cell.group,
            state: cell.state,
            channel: cell.channel,
            status: Status::Open,
            detail: "no closed form".into(),
        };
    };
    let mut outcome = Outcome::default();
    let result = build().and_then(|insts| {
        insts
            .iter()
            .try_for_each(|inst| check_instance(inst, opts, &mut outcome))
    });
    if let Err(e) = result {
        outcome.failures.push(format!("error: {e}"));
    }
    outcome.row(cell.group, cell.state, cell.channel)
}

fn claim(state: &'static str, ok: bool, detail: String) -> CheckRow {
    CheckRow {
        group: "claim",
        state,
        channel: "",
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn claim_or_error(state: &'static str, r: Result<(bool, String)>) -> CheckRow {
    match r {
        Ok((ok, detail)) => claim(state, ok, detail),
        Err(e) => claim(state, false, format!("error: {e}")),
    }
}

/// Correlation degrees checked for unitary-encoding dominance.
pub fn dominance_mus() -> Vec<f64> {
    linspace(0.3, 1.0, 8)
}

/// First `(mu, p)` on the 101-point p grid where the reset pre-processing beats
/// unitary encoding, for the given correlation degrees.
pub fn dominance_violation(mus: &[f64]) -> Result<Option<(f64, f64, f64)>> {
    for &mu in mus {
        for p in linspace(0.0, 1.0, 101) {
            let gap = quasiclassical_gap(p, mu)?;
            if gap < 0.0 {
                return Ok(Some((mu, p, -gap)));
            }
        }
    }
    Ok(None)
}

fn claims() -> Vec<CheckRow> {
    let tol = DEFAULT_TOL;
    vec![
        claim_or_error(
            "fully correlated Bell = 2, GHZ(2k) = 2k",
            (|| {
                let bell = closed_form(Case::FullyCorrelatedBell, &base())?;
                let mut worst: f64 = (bell - 2.0).abs();
                for k in 1..=3 {
                    let v = closed_form(Case::GhzFully, &CaseParams { k, ..base() })?;
                    worst = worst.max((v - 2.0 * k as f64).abs());
                }
                Ok((worst <= 1e-9, format!("max deviation {worst:.1e}")))
            })(),
        ),
        claim_or_error(
            "depolarising threshold p_t",
            (|| {
                let pt = depolarising_transition_threshold(tol)?;
                Ok((
                    (pt - REFERENCE_P_T).abs() <= 0.005,
                    format!("p_t = {pt:.6}, expected {REFERENCE_P_T} +- 0.005"),
                ))
            })(),
        ),
        claim_or_error(
            "Werner boundary eta",
            (|| {
                let eta = crossover_eta_tilde(0.0, tol)?;
                Ok((
                    (eta - REFERENCE_ETA).abs() <= 0.005,
                    format!("eta = {eta:.6}, expected {REFERENCE_ETA} +- 0.005"),
                ))
            })(),
        ),
        claim_or_error(
            "crossover mu at p = 0.05",
            (|| {
                let mu = crossover_mu_tilde(0.05, tol)?;
                let ok = mu.is_some_and(|m| (m - REFERENCE_MU_TILDE).abs() <= 0.01);
                let shown = mu.map_or("none".to_string(), |m| format!("{m:.6}"));
                Ok((
                    ok,
                    format!("mu = {shown}, expected {REFERENCE_MU_TILDE} +- 0.01"),
                ))
            })(),
        ),
        claim_or_error(
            "reset advantage interval at mu = 0.2",
            (|| {
                let iv = crossover_p_range(0.2, tol)?;
                let lower = iv.first().copied();
                let ok = lower.is_some_and(|(a, b)| {
                    (a - REFERENCE_INTERVAL.0).abs() <= 0.005
                        && (b - REFERENCE_INTERVAL.1).abs() <= 0.005
                });
                Ok((
                    ok,
                    format!("intervals {iv:.6?}, expected lower {REFERENCE_INTERVAL:?} +- 0.005"),
                ))
            })(),
        ),
        claim_or_error(
            "unitary encoding dominates for mu >= 0.3",
            (|| {
                let mus = dominance_mus();
                Ok(match dominance_violation(&mus)? {
                    None => (
                        true,
                        format!("no reset advantage at 101 p for mu in {mus:.2?}"),
                    ),
                    Some((mu, p, gap)) => (
                        false,
                        format!("reset wins by {gap:.2e} at mu = {mu:.2}, p = {p:.2}"),
                    ),
                })
            })(),
        ),
    ]
}

/// Runs every cell and claim.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let cells = cells();
    let mut rows: Vec<CheckRow> = cells.par_iter().map(|c| run_cell(c, opts)).collect();
    rows.extend(claims());
    VerifyReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout() {
        let cells = cells();
        assert_eq!(cells.len(), 4 * 5 + 4 * 3);
        let solved = cells.iter().filter(|c| c.build.is_some()).count();
        assert_eq!(solved, 11 + 7);
    }

    #[test]
    fn solved_cells_pass_without_search() {
        let opts = VerifyOptions {
            search: false,
            ..VerifyOptions::default()
        };
        for cell in cells().iter().filter(|c| c.build.is_some()) {
            let row = run_cell(cell, &opts);
            assert_eq!(row.status, Status::Pass, "{row:?}");
        }
    }

    #[test]
    fn dominance_fails_just_above_point_three() {
        // crossover reaches just past 0.3, so the claim is off at the boundary
        let v = dominance_violation(&[0.3]).unwrap().unwrap();
        assert!(v.1 > 0.05 && v.1 < 0.11, "{v:?}");
        assert!(dominance_violation(&[0.31, 0.5, 1.0]).unwrap().is_none());
    }
}
