//! Library half of the `survbound` command-line tool: argument types,
//! command implementations and deterministic CSV/JSON rendering. The
//! binary in `main.rs` is a thin dispatcher over these.

pub mod figures;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use survbound::cutoff_bounds::{amplitude_curve, build_cutoff_spec};
use survbound::envelope::{composite_bound, sweep_envelope, CompositeBound, EnvelopeResult};
use survbound::grid::{cutoff_grid, time_grid};
use survbound::moments::{b_from_h, e_from_h, ebar_from_b};
use survbound::oracle::{exact_survival_grid, SurvivalSample};
use survbound::series_bounds::{p_series_curve, ri_curve};
use survbound::{BoundCurve, EnergyDistribution, Error, QuadSettings, Result};

/// Bounds on quantum survival amplitudes from energy moments.
#[derive(Debug, Parser)]
#[command(name = "survbound", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print energy moments (h), correlation moments (e) and, with a
    /// cut-off, edge moments (b).
    Moments(MomentsArgs),
    /// Evaluate series or fixed-cut-off bound curves over a time grid.
    Bounds(BoundsArgs),
    /// Sample the exact survival amplitude.
    Exact(ExactArgs),
    /// Sweep the cut-off envelope, or assemble the composite best bounds.
    Envelope(EnvelopeArgs),
    /// Emit the dataset bundle for one of the stock figures.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundTarget {
    /// Series bounds on the survival probability P(t).
    P,
    /// Bounds on |A(t)| (√P without a cut-off, α√p ± (1−α) with one).
    AbsA,
    /// The real/imaginary-part bound chains.
    Ri,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Distribution spec file (JSON).
    #[arg(long, value_name = "PATH")]
    pub spec: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Accept tabulated/discrete inputs whose raw weight is far from 1.
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Truncate at this cut-off energy (edge moments included).
    #[arg(long, value_name = "C")]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Even bound orders, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6, 8])]
    pub order: Vec<usize>,
    /// Time horizon T.
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    /// Number of time-grid points.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Fixed cut-off energy (switches to the cut-off amplitude bounds).
    #[arg(long, value_name = "C")]
    pub cutoff: Option<f64>,
    /// What to bound.
    #[arg(long, value_enum, default_value = "p")]
    pub target: BoundTarget,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Time horizon T.
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    /// Number of time-grid points.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Even bound orders, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6, 8])]
    pub order: Vec<usize>,
    /// Number of cut-off grid points.
    #[arg(long, default_value_t = 256)]
    pub c_grid: usize,
    /// Time horizon (composite assembly only).
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    /// Number of time-grid points (composite assembly only).
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Assemble the pointwise best lower/upper bounds instead of the
    /// parametric envelope points.
    #[arg(long)]
    pub composite: bool,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure name: fig1..fig7.
    #[arg(value_parser = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"])]
    pub name: String,
    /// Output directory for the dataset bundle.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

/// Quadrature settings, honouring the SURVBOUND_TOL override.
pub fn settings_from_env() -> QuadSettings {
    match std::env::var("SURVBOUND_TOL") {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(tol) if tol > 0.0 && tol.is_finite() => QuadSettings::with_tol(tol),
            _ => QuadSettings::default(),
        },
        Err(_) => QuadSettings::default(),
    }
}

/// Moments table: one row per order k.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentRow {
    pub k: usize,
    /// hₖ (or h̄ₖ under a cut-off); absent where the moment diverges.
    pub h: Option<f64>,
    /// ēₖ for even k.
    pub e: Option<f64>,
    /// bₖ when a cut-off is active.
    pub b: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentsTable {
    pub alpha: f64,
    pub cutoff: Option<f64>,
    pub rows: Vec<MomentRow>,
}

pub fn cmd_moments(
    dist: &EnergyDistribution,
    order: usize,
    cutoff: Option<f64>,
    s: &QuadSettings,
) -> Result<MomentsTable> {
    let mut rows: Vec<MomentRow> = (0..=order)
        .map(|k| MomentRow {
            k,
            h: None,
            e: None,
            b: None,
        })
        .collect();
    match cutoff {
        None => {
            let (h, _divergent_from) = dist.raw_moments_available(order)?;
            for k in 0..=h.order() {
                rows[k].h = Some(h.raw_at(k)?);
            }
            let e_order = h.order().min(order) & !1usize;
            if e_order >= 2 {
                let e = e_from_h(&h, e_order)?;
                for k in (0..=e_order).step_by(2) {
                    rows[k].e = Some(e.raw_at(k)?);
                }
            } else {
                rows[0].e = Some(1.0);
            }
            Ok(MomentsTable {
                alpha: 1.0,
                cutoff: None,
                rows,
            })
        }
        Some(c) => {
            let view = dist.truncate(c)?;
            let hbar = view.truncated_moments(order, s)?;
            let b = b_from_h(&hbar, view.edge(), order)?;
            for k in 0..=order {
                rows[k].h = Some(hbar.raw_at(k)?);
                rows[k].b = Some(b.raw_at(k)?);
            }
            let e_order = order & !1usize;
            if e_order >= 2 {
                let ebar = ebar_from_b(&b, e_order)?;
                for k in (0..=e_order).step_by(2) {
                    rows[k].e = Some(ebar.raw_at(k)?);
                }
            } else {
                rows[0].e = Some(1.0);
            }
            Ok(MomentsTable {
                alpha: view.alpha(),
                cutoff: Some(c),
                rows,
            })
        }
    }
}

pub fn cmd_exact(
    dist: &EnergyDistribution,
    t_max: f64,
    grid_n: usize,
) -> Result<Vec<SurvivalSample>> {
    if !(t_max > 0.0) || grid_n < 2 {
        return Err(Error::InvalidInput(
            "need t_max > 0 and at least 2 grid points".into(),
        ));
    }
    exact_survival_grid(dist, &time_grid(t_max, grid_n))
}

pub fn cmd_bounds(
    dist: &EnergyDistribution,
    orders: &[usize],
    t_max: f64,
    grid_n: usize,
    cutoff: Option<f64>,
    target: BoundTarget,
    s: &QuadSettings,
) -> Result<Vec<BoundCurve>> {
    if !(t_max > 0.0) || grid_n < 2 {
        return Err(Error::InvalidInput(
            "need t_max > 0 and at least 2 grid points".into(),
        ));
    }
    let grid = time_grid(t_max, grid_n);
    let mut curves = Vec::new();
    match target {
        BoundTarget::Ri => {
            let max_even = orders.iter().copied().max().unwrap_or(4);
            let h = dist.raw_moments(max_even)?;
            for n in 1..=max_even {
                curves.push(ri_curve(&h, n, &grid)?);
            }
        }
        BoundTarget::P => {
            for &n in orders {
                let h = dist.raw_moments(n)?;
                let e = e_from_h(&h, n)?;
                curves.push(p_series_curve(&e, n, &grid)?);
            }
        }
        BoundTarget::AbsA => match cutoff {
            Some(c) => {
                for &n in orders {
                    let spec = build_cutoff_spec(dist, c, n, s)?;
                    curves.push(amplitude_curve(&spec, &grid)?);
                }
            }
            None => {
                for &n in orders {
                    let h = dist.raw_moments(n)?;
                    let e = e_from_h(&h, n)?;
                    curves.push(survbound::series_bounds::abs_series_curve(&e, n, &grid)?);
                }
            }
        },
    }
    Ok(curves)
}

pub fn cmd_envelope(
    dist: &EnergyDistribution,
    orders: &[usize],
    c_grid_n: usize,
    s: &QuadSettings,
) -> Result<Vec<EnvelopeResult>> {
    let c_grid = cutoff_grid(dist, c_grid_n.max(2))?;
    let mut out = Vec::new();
    for &n in orders {
        out.push(sweep_envelope(dist, n, &c_grid, s)?);
    }
    Ok(out)
}

pub fn cmd_composite(
    dist: &EnergyDistribution,
    orders: &[usize],
    t_max: f64,
    s: &QuadSettings,
) -> Result<CompositeBound> {
    composite_bound(dist, orders, t_max, s)
}

/// Exit code for a computation-side failure, per the convention
/// 1 = usage, 2 = invalid input, 3 = computation failed.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonNormalizable { .. }
        | Error::NegativeDensity { .. }
        | Error::InvalidDistribution(_)
        | Error::CutoffOutOfSupport { .. }
        | Error::OrderTooLarge { .. }
        | Error::InvalidInput(_) => 2,
        Error::MomentDivergent { .. }
        | Error::InsufficientOrder { .. }
        | Error::NonPositiveCorrelationMoment { .. }
        | Error::NonPositiveEdgeMoment { .. }
        | Error::DegenerateEdge
        | Error::RootMismatch { .. }
        | Error::NoPositiveRoot
        | Error::EmptyEnvelope
        | Error::QuadratureFailure { .. } => 3,
    }
}

/// Top-level dispatch used by the binary.
pub fn run(cli: Cli) -> std::result::Result<(), (i32, String)> {
    let s = settings_from_env();
    let fail = |e: Error| (exit_code(&e), e.to_string());
    let io_fail = |e: std::io::Error| (3, format!("io error: {e}"));
    match cli.command {
        Command::Moments(args) => {
            let dist = survbound::load_spec_file(&args.common.spec, args.common.renormalize)
                .map_err(fail)?;
            let table = cmd_moments(&dist, args.order, args.cutoff, &s).map_err(fail)?;
            let text = match args.common.format {
                OutputFormat::Csv => output::moments_csv(&table),
                OutputFormat::Json => output::to_json(&table),
            };
            output::write_out(args.common.out.as_deref(), &text).map_err(io_fail)
        }
        Command::Bounds(args) => {
            let dist = survbound::load_spec_file(&args.common.spec, args.common.renormalize)
                .map_err(fail)?;
            let curves = cmd_bounds(
                &dist,
                &args.order,
                args.t_max,
                args.grid,
                args.cutoff,
                args.target,
                &s,
            )
            .map_err(fail)?;
            let text = match args.common.format {
                OutputFormat::Csv => output::bound_curves_csv(&curves),
                OutputFormat::Json => output::bound_curves_json(&curves),
            };
            output::write_out(args.common.out.as_deref(), &text).map_err(io_fail)
        }
        Command::Exact(args) => {
            let dist = survbound::load_spec_file(&args.common.spec, args.common.renormalize)
                .map_err(fail)?;
            let samples = cmd_exact(&dist, args.t_max, args.grid).map_err(fail)?;
            let text = match args.common.format {
                OutputFormat::Csv => output::exact_csv(&samples),
                OutputFormat::Json => output::exact_json(&samples),
            };
            output::write_out(args.common.out.as_deref(), &text).map_err(io_fail)
        }
        Command::Envelope(args) => {
            let dist = survbound::load_spec_file(&args.common.spec, args.common.renormalize)
                .map_err(fail)?;
            let text = if args.composite {
                let comp =
                    cmd_composite(&dist, &args.order, args.t_max, &s).map_err(fail)?;
                match args.common.format {
                    OutputFormat::Csv => output::composite_csv(&comp),
                    OutputFormat::Json => output::composite_json(&comp),
                }
            } else {
                let envs = cmd_envelope(&dist, &args.order, args.c_grid, &s).map_err(fail)?;
                match args.common.format {
                    OutputFormat::Csv => output::envelopes_csv(&envs),
                    OutputFormat::Json => output::envelopes_json(&envs),
                }
            };
            output::write_out(args.common.out.as_deref(), &text).map_err(io_fail)
        }
        Command::Figure(args) => {
            let bundle = figures::build_figure(&args.name, &s).map_err(fail)?;
            figures::write_bundle(&args.out, &bundle).map_err(io_fail)
        }
    }
}
