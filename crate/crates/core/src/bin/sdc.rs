use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use sdc_core::capacity::{capacity_via_min_entropy, CapacityReport};
use sdc_core::cases::{
    evaluate, selected_state, witness_setup, Case, CaseParams, NoiseKind, StateKind,
};
use sdc_core::channels::{depolarising_probs, PauliChannel, Side};
use sdc_core::optimize::roots::{
    crossover_eta_tilde, crossover_mu_tilde, crossover_p_range, depolarising_transition_threshold,
};
use sdc_core::optimize::sweep::{case_sweep, figure, FigureOptions, SweepVar, Table};
use sdc_core::optimize::{
    min_output_entropy_cptp, min_output_entropy_unitary, OptOptions, OptResult, Structure,
};
use sdc_core::qlin::DensityMatrix;
use sdc_core::verify::{self, Status, VerifyOptions};
use sdc_core::SdcError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Capacity,
    Sweep,
    Optimize,
    Crossover,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateArg {
    Bell,
    Werner,
    BellDiagonal,
    Product,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoiseArg {
    Depolarising,
    Quasiclassical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Sender,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    /// Same single-use noise on both sides, independent.
    Depolarising,
    /// Single-use noise on both sides with correlation degree mu.
    Correlated,
    /// Qubit quasi-classical noise with correlation degree mu.
    Quasiclassical,
    /// Identical qubit Pauli noise on both sides (weights from --q4).
    Fully,
    /// Noise on one side only.
    OneSided,
    Noiseless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    // optimize
    Unitary,
    Cptp,
    // crossover
    Threshold,
    MuTilde,
    PRange,
    EtaTilde,
}

#[derive(Debug, Parser)]
#[command(
    name = "sdc",
    version,
    about = "Dense coding capacities over covariant noisy channels",
    allow_negative_numbers = true
)]
struct Cli {
    command: Command,
    /// Case id (see `sdc capacity --case list`).
    #[arg(long)]
    case: Option<String>,
    /// Figure number 1-8 for `sweep`.
    #[arg(long)]
    figure: Option<u8>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    q: Option<f64>,
    /// Qubit channel weights on (1, X, Y, Z).
    #[arg(long, value_parser = parse_quad)]
    q4: Option<[f64; 4]>,
    /// Bell-diagonal state weights.
    #[arg(long, value_parser = parse_quad)]
    p4: Option<[f64; 4]>,
    #[arg(long, value_enum, default_value_t = StateArg::Bell)]
    state: StateArg,
    #[arg(long, value_enum, default_value_t = NoiseArg::Depolarising)]
    noise: NoiseArg,
    #[arg(long, value_enum, default_value_t = SideArg::Sender)]
    side: SideArg,
    /// Channel for `optimize` when no case is given.
    #[arg(long, value_enum, default_value_t = ChannelArg::Depolarising)]
    channel: ChannelArg,
    /// Encoding family for `optimize`, or quantity for `crossover`.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    /// Parameter a case sweep varies: p, mu, eta or q.
    #[arg(long, default_value = "p")]
    vary: String,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, env = "SDC_SEED", default_value_t = 0)]
    seed: u64,
    /// Optimiser entropy tolerance, or root tolerance for `crossover`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Skip the unitary search in `verify`.
    #[arg(long)]
    no_search: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 6)]
    precision: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_quad(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated numbers, got {}", v.len()))
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<SdcError> for Failure {
    fn from(e: SdcError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

impl Cli {
    fn case_params(&self) -> CaseParams {
        CaseParams {
            d: self.d,
            k: self.k,
            p: self.p.unwrap_or(0.0),
            mu: self.mu.unwrap_or(0.0),
            eta: self.eta.unwrap_or(1.0),
            q: self.q,
            q4: self.q4,
            p4: self.p4,
            noise: match self.noise {
                NoiseArg::Depolarising => NoiseKind::Depolarising,
                NoiseArg::Quasiclassical => NoiseKind::Quasiclassical,
            },
            state: match self.state {
                StateArg::Bell => StateKind::Bell,
                StateArg::Werner => StateKind::Werner,
                StateArg::BellDiagonal => StateKind::BellDiagonal,
                StateArg::Product => StateKind::Product,
            },
            side: match self.side {
                SideArg::Sender => Side::Sender,
                SideArg::Receiver => Side::Receiver,
            },
        }
    }

    fn case(&self) -> CliResult<Case> {
        match &self.case {
            Some(id) => Ok(Case::from_id(id)?),
            None => Err(Failure::Usage("--case is required".into())),
        }
    }

    fn fmt(&self, x: f64) -> String {
        format!("{x:.prec$}", prec = self.precision)
    }

    fn opt_options(&self) -> OptOptions {
        OptOptions {
            restarts: self.restarts,
            seed: self.seed,
            tol: self.tol.unwrap_or(1e-9),
            max_iter: self.max_iter,
        }
    }
}

fn metadata(cli: &Cli, extra: Value) -> Value {
    let mut meta = json!({ "tool": "sdc", "version": VERSION, "seed": cli.seed });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    meta
}

fn csv_line(cells: &[String]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // writing to memory cannot fail
    w.write_record(cells).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}

fn list_cases() -> String {
    let mut out = csv_line(&[
        "case".into(),
        "formula_id".into(),
        "formula".into(),
        "description".into(),
    ]);
    for c in Case::ALL {
        out.push_str(&csv_line(&[
            c.id().into(),
            c.formula_id().into(),
            c.formula().into(),
            c.description().into(),
        ]));
    }
    out
}

fn cmd_capacity(cli: &Cli) -> CliResult<String> {
    if cli.case.as_deref() == Some("list") {
        return Ok(list_cases());
    }
    let case = cli.case()?;
    let report: CapacityReport = evaluate(case, &cli.case_params())?;
    Ok(match cli.format {
        Format::Csv => {
            let mut header = vec![
                "case".to_string(),
                "formula_id".into(),
                "formula".into(),
                "value".into(),
                "below_classical".into(),
            ];
            let mut row = vec![
                report.case.clone(),
                report.formula_id.into(),
                report.formula.into(),
                cli.fmt(report.value),
                report.below_classical.to_string(),
            ];
            for (k, v) in &report.inputs {
                header.push(k.clone());
                row.push(v.clone());
            }
            csv_line(&header) + &csv_line(&row)
        }
        Format::Json => {
            let meta = metadata(
                cli,
                json!({ "formula_id": report.formula_id, "case": report.case }),
            );
            let inputs: serde_json::Map<String, Value> = report
                .inputs
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect();
            pretty(&json!({
                "metadata": meta,
                "value": report.value,
                "formula": report.formula,
                "inputs": inputs,
                "witness": report.witness,
                "below_classical": report.below_classical,
            }))
        }
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn table_json(cli: &Cli, t: &Table, meta: Value) -> String {
    let p = cli.precision as i32;
    let scale = 10f64.powi(p);
    let rows: Vec<Vec<Option<f64>>> = t
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| v.map(|x| (x * scale).round() / scale))
                .collect()
        })
        .collect();
    pretty(&json!({ "metadata": metadata(cli, meta), "columns": t.columns, "rows": rows }))
}

fn figure_options(cli: &Cli) -> FigureOptions {
    FigureOptions {
        steps: cli.steps,
        from: cli.from,
        to: cli.to,
        p: cli.p,
        mu: cli.mu,
        tol: cli.tol.unwrap_or(sdc_core::optimize::roots::DEFAULT_TOL),
    }
}

fn cmd_sweep(cli: &Cli) -> CliResult<String> {
    let opts = figure_options(cli);
    let (table, meta) = match (cli.figure, &cli.case) {
        (Some(n), _) => (figure(n, &opts)?, json!({ "figure": n })),
        (None, Some(_)) => {
            let case = cli.case()?;
            let var = SweepVar::parse(&cli.vary)?;
            (
                case_sweep(case, &cli.case_params(), var, &opts)?,
                json!({ "case": case.id(), "formula_id": case.formula_id(), "vary": var.name() }),
            )
        }
        (None, None) => return Err(Failure::Usage("sweep needs --figure or --case".into())),
    };
    Ok(match cli.format {
        Format::Csv => table.to_csv(cli.precision),
        Format::Json => table_json(cli, &table, meta),
    })
}

fn optimize_setup(cli: &Cli) -> CliResult<(DensityMatrix, PauliChannel, usize, String)> {
    let params = cli.case_params();
    if cli.case.is_some() {
        let case = cli.case()?;
        let s = witness_setup(case, &params)?;
        return Ok((s.rho, s.channel, s.sender_dim, case.id().to_string()));
    }
    let rho = selected_state(&params)?;
    let d = params.d;
    let table = || params.noise.table(d, params.p);
    let channel = match cli.channel {
        ChannelArg::Depolarising => PauliChannel::two_sided(&table()?, &table()?)?,
        ChannelArg::Correlated => PauliChannel::correlated_two_sided(&table()?, params.mu)?,
        ChannelArg::Quasiclassical => PauliChannel::quasiclassical_correlated(params.p, params.mu)?,
        ChannelArg::Fully => {
            let q4 = match params.q4 {
                Some(q4) => q4,
                None => depolarising_probs(2, params.p)?.sigma_weights()?,
            };
            PauliChannel::fully_correlated(q4, 2)?
        }
        ChannelArg::OneSided => PauliChannel::one_sided(&table()?, params.side)?,
        ChannelArg::Noiseless => PauliChannel::identity(vec![d, d]),
    };
    let label = format!("{}+{:?}", params.state.id(), cli.channel).to_lowercase();
    Ok((rho, channel, d, label))
}

fn cmd_optimize(cli: &Cli) -> CliResult<String> {
    let (rho, channel, d_a, label) = optimize_setup(cli)?;
    let opts = cli.opt_options();
    let kind = cli.kind.unwrap_or(KindArg::Unitary);
    let res: OptResult = match kind {
        KindArg::Unitary => {
            min_output_entropy_unitary(&rho, &channel, &Structure::Global(d_a), &opts)?
        }
        KindArg::Cptp => min_output_entropy_cptp(&rho, &channel, d_a, &opts)?,
        other => {
            return Err(Failure::Usage(format!(
                "--kind {other:?} is not an encoding family"
            )))
        }
    };
    let capacity = capacity_via_min_entropy(&rho, &channel, res.best_value, d_a)?;
    let identity_capacity = capacity_via_min_entropy(&rho, &channel, res.identity_value, d_a)?;
    let warning = (!res.converged)
        .then_some("best restart did not converge; value is an upper bound on the minimum");
    let kind_name = if kind == KindArg::Unitary {
        "unitary"
    } else {
        "cptp"
    };
    Ok(match cli.format {
        Format::Csv => {
            let header = [
                "setup",
                "kind",
                "best_entropy",
                "identity_entropy",
                "capacity",
                "identity_capacity",
                "restarts",
                "seed",
                "converged",
                "warning",
            ];
            let row = [
                label,
                kind_name.into(),
                cli.fmt(res.best_value),
                cli.fmt(res.identity_value),
                cli.fmt(capacity),
                cli.fmt(identity_capacity),
                res.restarts_used.to_string(),
                res.seed.to_string(),
                res.converged.to_string(),
                warning.unwrap_or("").into(),
            ];
            csv_line(&header.map(String::from)) + &csv_line(&row)
        }
        Format::Json => pretty(&json!({
            "metadata": metadata(cli, json!({ "setup": label, "kind": kind_name })),
            "best_entropy": res.best_value,
            "identity_entropy": res.identity_value,
            "capacity": capacity,
            "identity_capacity": identity_capacity,
            "restarts": res.restarts_used,
            "converged": res.converged,
            "warning": warning,
            "best_param": res.best_param,
        })),
    })
}

fn required(name: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this crossover")))
}

fn cmd_crossover(cli: &Cli) -> CliResult<String> {
    let tol = cli.tol.unwrap_or(sdc_core::optimize::roots::DEFAULT_TOL);
    let kind = cli.kind.unwrap_or(KindArg::Threshold);
    let (columns, rows): (Vec<&str>, Vec<Vec<Option<f64>>>) = match kind {
        KindArg::Threshold => (
            vec!["p_t"],
            vec![vec![Some(depolarising_transition_threshold(tol)?)]],
        ),
        KindArg::MuTilde => {
            let p = required("p", cli.p)?;
            (
                vec!["p", "mu_tilde"],
                vec![vec![Some(p), crossover_mu_tilde(p, tol)?]],
            )
        }
        KindArg::PRange => {
            let mu = required("mu", cli.mu)?;
            let rows = crossover_p_range(mu, tol)?
                .into_iter()
                .map(|(a, b)| vec![Some(mu), Some(a), Some(b)])
                .collect();
            (vec!["mu", "p_from", "p_to"], rows)
        }
        KindArg::EtaTilde => {
            let q = required("q", cli.q)?;
            (
                vec!["q", "eta_tilde"],
                vec![vec![Some(q), Some(crossover_eta_tilde(q, tol)?)]],
            )
        }
        other => {
            return Err(Failure::Usage(format!(
                "--kind {other:?} is not a crossover quantity"
            )))
        }
    };
    let table = Table {
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows,
    };
    Ok(match cli.format {
        Format::Csv => table.to_csv(cli.precision),
        Format::Json => table_json(
            cli,
            &table,
            json!({ "kind": format!("{kind:?}").to_lowercase(), "tol": tol }),
        ),
    })
}

fn cmd_verify(cli: &Cli) -> (String, bool) {
    let report = verify::run(&VerifyOptions {
        opt: cli.opt_options(),
        search: !cli.no_search,
    });
    let ok = report.passed();
    let text = match cli.format {
        Format::Csv => {
            let mut out =
                csv_line(&["group", "state", "channel", "status", "detail"].map(String::from));
            for r in &report.rows {
                out.push_str(&csv_line(&[
                    r.group.into(),
                    r.state.into(),
                    r.channel.into(),
                    r.status.label().into(),
                    r.detail.clone(),
                ]));
            }
            out
        }
        Format::Json => pretty(&json!({
            "metadata": metadata(cli, json!({
                "passed": report.count(Status::Pass),
                "failed": report.count(Status::Fail),
                "open": report.count(Status::Open),
            })),
            "rows": report.rows,
        })),
    };
    (text, ok)
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let text = match cli.command {
        Command::Capacity => cmd_capacity(cli)?,
        Command::Sweep => cmd_sweep(cli)?,
        Command::Optimize => cmd_optimize(cli)?,
        Command::Crossover => cmd_crossover(cli)?,
        Command::Verify => {
            let (text, ok) = cmd_verify(cli);
            emit(cli, &text)?;
            return if ok {
                Ok(())
            } else {
                Err(Failure::Verification)
            };
        }
    };
    emit(cli, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!(
                "usage: sdc <capacity|sweep|optimize|crossover|verify> [OPTIONS]; see sdc --help"
            );
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
