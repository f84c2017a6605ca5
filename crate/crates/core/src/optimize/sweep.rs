//! Parameter grids over the closed forms, evaluated in parallel with ordered output.

use rayon::prelude::*;
use serde::Serialize;

use super::roots::{
    c_bell_two_sided_dep, crossover_eta_tilde, crossover_mu_tilde, linspace, DEFAULT_TOL,
};
use crate::capacity::{
    c_fully_correlated_werner, c_one_sided_pauli_werner, c_quasiclassical_werner,
    classical_capacity_dep_qubit, transferred_info_fully_gamma,
    transferred_info_quasiclassical_gamma,
};
use crate::cases::{closed_form, Case, CaseParams};
use crate::channels::depolarising_probs;
use crate::error::{check_unit_interval, Result, SdcError};

/// Rows of numbers under named columns; `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    fn new(columns: &[&str], rows: Vec<Vec<Option<f64>>>) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    /// Comma separated with a header line, `\n` endings, empty cells for `None`.
    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map(|x| format!("{x:.precision$}")).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Grid and fixed parameters for the figure sweeps.
///
/// `p` and `mu` are only read by the figures that hold them fixed; when unset
/// those figures use `p = 0.05` and `mu = 0.2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub steps: usize,
    pub from: f64,
    pub to: f64,
    pub p: Option<f64>,
    pub mu: Option<f64>,
    pub tol: f64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            steps: 101,
            from: 0.0,
            to: 1.0,
            p: None,
            mu: None,
            tol: DEFAULT_TOL,
        }
    }
}

pub const FIGURES: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

fn grid(opts: &FigureOptions) -> Result<Vec<f64>> {
    check_unit_interval("from", opts.from)?;
    check_unit_interval("to", opts.to)?;
    if opts.steps == 0 {
        return Err(SdcError::ParameterOutOfRange {
            name: "steps",
            value: 0.0,
            range: ">= 1",
        });
    }
    if opts.from > opts.to {
        return Err(SdcError::Invalid(format!(
            "from {} is larger than to {}",
            opts.from, opts.to
        )));
    }
    Ok(linspace(opts.from, opts.to, opts.steps))
}

fn rows<T, F>(points: Vec<T>, f: F) -> Result<Vec<Vec<Option<f64>>>>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<Vec<Option<f64>>> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn pairs(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .collect()
}

/// Tabulates one of the eight published curves or surfaces.
pub fn figure(n: u8, opts: &FigureOptions) -> Result<Table> {
    let xs = grid(opts)?;
    let fixed_p = opts.p.unwrap_or(0.05);
    let fixed_mu = opts.mu.unwrap_or(0.2);
    check_unit_interval("p", fixed_p)?;
    check_unit_interval("mu", fixed_mu)?;
    match n {
        1 => {
            let dep = |p: f64| depolarising_probs(2, p);
            Ok(Table::new(
                &[
                    "p",
                    "C_classical",
                    "C_ch_dep2",
                    "C_one_sided",
                    "C_two_sided",
                ],
                rows(xs, |&p| {
                    Ok(vec![
                        Some(p),
                        Some(1.0),
                        Some(classical_capacity_dep_qubit(p)?),
                        Some(c_one_sided_pauli_werner(2, 1.0, &dep(p)?)?),
                        Some(c_bell_two_sided_dep(p)?),
                    ])
                })?,
            ))
        }
        2 => Ok(Table::new(
            &["p", "mu", "C_un"],
            rows(pairs(&xs, &xs), |&(p, mu)| {
                Ok(vec![
                    Some(p),
                    Some(mu),
                    Some(c_quasiclassical_werner(1.0, p, mu)?),
                ])
            })?,
        )),
        3 => Ok(Table::new(
            &["mu", "eta", "C_un"],
            rows(pairs(&xs, &xs), |&(mu, eta)| {
                Ok(vec![
                    Some(mu),
                    Some(eta),
                    Some(c_quasiclassical_werner(eta, fixed_p, mu)?),
                ])
            })?,
        )),
        4 => Ok(Table::new(
            &["p", "mu_tilde"],
            rows(xs, |&p| Ok(vec![Some(p), crossover_mu_tilde(p, opts.tol)?]))?,
        )),
        5 => Ok(Table::new(
            &["p", "C_un", "C_gamma"],
            rows(xs, |&p| {
                Ok(vec![
                    Some(p),
                    Some(c_quasiclassical_werner(1.0, p, fixed_mu)?),
                    Some(transferred_info_quasiclassical_gamma(p)?),
                ])
            })?,
        )),
        6 => {
            let gamma = transferred_info_quasiclassical_gamma(fixed_p)?;
            Ok(Table::new(
                &["mu", "C_un", "C_gamma"],
                rows(xs, |&mu| {
                    Ok(vec![
                        Some(mu),
                        Some(c_quasiclassical_werner(1.0, fixed_p, mu)?),
                        Some(gamma),
                    ])
                })?,
            ))
        }
        7 => Ok(Table::new(
            &["eta", "q", "C_un", "C_gamma"],
            rows(pairs(&xs, &xs), |&(eta, q)| {
                Ok(vec![
                    Some(eta),
                    Some(q),
                    Some(c_fully_correlated_werner(eta)?),
                    Some(transferred_info_fully_gamma(q)?),
                ])
            })?,
        )),
        8 => Ok(Table::new(
            &["q", "eta_tilde"],
            rows(xs, |&q| {
                Ok(vec![Some(q), Some(crossover_eta_tilde(q, opts.tol)?)])
            })?,
        )),
        _ => Err(SdcError::ParameterOutOfRange {
            name: "figure",
            value: n as f64,
            range: "1..=8",
        }),
    }
}

/// Parameter a case sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    P,
    Mu,
    Eta,
    Q,
}

impl SweepVar {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "p" => Ok(SweepVar::P),
            "mu" => Ok(SweepVar::Mu),
            "eta" => Ok(SweepVar::Eta),
            "q" => Ok(SweepVar::Q),
            other => Err(SdcError::Invalid(format!("cannot sweep over '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::P => "p",
            SweepVar::Mu => "mu",
            SweepVar::Eta => "eta",
            SweepVar::Q => "q",
        }
    }

    fn set(self, base: &CaseParams, x: f64) -> CaseParams {
        let mut p = base.clone();
        match self {
            SweepVar::P => p.p = x,
            SweepVar::Mu => p.mu = x,
            SweepVar::Eta => p.eta = x,
            SweepVar::Q => {
                p.q = Some(x);
                p.q4 = None;
            }
        }
        p
    }
}

/// Closed form of one case along a grid of one parameter.
pub fn case_sweep(
    case: Case,
    base: &CaseParams,
    var: SweepVar,
    opts: &FigureOptions,
) -> Result<Table> {
    let xs = grid(opts)?;
    let cols = [var.name(), "C"];
    Ok(Table::new(
        &cols,
        rows(xs, |&x| {
            Ok(vec![Some(x), Some(closed_form(case, &var.set(base, x))?)])
        })?,
    ))
}
