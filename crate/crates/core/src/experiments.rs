//! Reproduction pipelines and parameter sweeps: each figure of the study
//! maps to a set of deterministic CSV files (one per panel or curve),
//! with optional SVG line plots for a quick look.
//!
//! CSV contract: header row; time traces carry `t,value_numeric` plus
//! `value_analytic` where a closed form exists; sweeps carry the axis
//! name and one value column; floats are printed with 12 significant
//! digits, `,` delimiters and LF line endings. Multi-curve panels add a
//! leading `tau` column.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{
    dark_state, mixed_initial, DensityMatrix, ModulationSchedule, SystemParams,
};
use crate::observables::{self, TimeSeries};
use crate::open_system::{evolve_master, DecaySpec};
use crate::propagate::evolve_pure;

/// Identifier of a reproducible figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Fidelity vs time, single-modulation panels plus the multi-period
    /// double-modulation panel.
    Fig2,
    /// Oscillation amplitude and center vs cycle period, both modes.
    Fig3,
    /// Detuned time traces of fidelity and absorption.
    Fig4Te,
    /// Absorption envelope vs detuning at several periods.
    Fig4Am,
    /// Projector-decay absorption traces and detuning sweep of the
    /// plateau.
    Fig5,
    /// Mixed-state strong-coupling variant of Fig5.
    Fig6,
    /// Lindblad counterpart of Fig5.
    Fig7,
    /// Lindblad counterpart of Fig6.
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4Te,
        FigureId::Fig4Am,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4Te => "fig4_te",
            FigureId::Fig4Am => "fig4_am",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Optional parameter overrides applied on top of a figure's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub omega_c: Option<f64>,
    pub omega_p: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_ab: Option<f64>,
    pub gamma_ac: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
}

/// A figure-reproduction request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub figure: FigureId,
    pub overrides: Overrides,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl ExperimentSpec {
    pub fn new(figure: FigureId, out_dir: impl Into<PathBuf>) -> Self {
        Self { figure, overrides: Overrides::default(), out_dir: out_dir.into(), svg: false }
    }
}

/// Axis of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Tau(Vec<f64>),
    Delta(Vec<f64>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Tau(_) => "tau",
            SweepAxis::Delta(_) => "delta",
        }
    }

    pub fn grid(&self) -> &[f64] {
        match self {
            SweepAxis::Tau(g) | SweepAxis::Delta(g) => g,
        }
    }
}

/// Observable evaluated at each grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepObservable {
    /// Analytic absorption envelope.
    Envelope,
    /// Long-time absorption plateau probed at the given time.
    Plateau { probe: f64 },
    /// Oscillation amplitude and center of the stroboscopic fidelity.
    OscStats,
}

/// Grid sweep output: the axis plus one or more value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_name: &'static str,
    pub axis: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub metadata: String,
}

/// Default fidelity-stats window: three periods of the zero-period
/// single-modulation oscillation.
pub fn default_stats_window() -> f64 {
    3.0 * 8.0 * std::f64::consts::PI / 5f64.sqrt()
}

fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut body = String::with_capacity(rows.len() * 32 + header.len() + 1);
    body.push_str(header);
    body.push('\n');
    for row in rows {
        let mut first = true;
        for x in row {
            if !first {
                body.push(',');
            }
            let _ = write!(body, "{}", fmt12(*x));
            first = false;
        }
        body.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    Ok(())
}

/// Thin fixed-size polyline plot; the CSV files are the contract, this
/// is convenience output only.
fn write_svg(path: &Path, title: &str, curves: &[(String, &[f64], &[f64])]) -> Result<()> {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const MARGIN: f64 = 60.0;
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (_, xs, ys) in curves {
        for &x in *xs {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
        }
        for &y in *ys {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmax <= xmin {
        xmax = xmin + 1.0;
    }
    if !ymin.is_finite() || ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = (W - 2.0 * MARGIN) / (xmax - xmin);
    let sy = (H - 2.0 * MARGIN) / (ymax - ymin);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\"><rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{title}</text>",
        W / 2.0
    );
    let _ = write!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for (k, (label, xs, ys)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in xs.iter().zip(ys.iter()) {
            let px = MARGIN + (x - xmin) * sx;
            let py = H - MARGIN - (y - ymin) * sy;
            let _ = write!(points, "{px:.2},{py:.2} ");
        }
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>",
            points.trim_end()
        );
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>",
            W - MARGIN + 4.0,
            MARGIN + 14.0 * (k as f64 + 1.0)
        );
    }
    for (value, x, y, anchor) in [
        (xmin, MARGIN, H - MARGIN + 16.0, "middle"),
        (xmax, W - MARGIN, H - MARGIN + 16.0, "middle"),
        (ymin, MARGIN - 6.0, H - MARGIN, "end"),
        (ymax, MARGIN - 6.0, MARGIN, "end"),
    ] {
        let _ = write!(
            svg,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"{anchor}\">{value:.3}</text>"
        );
    }
    svg.push_str("</svg>");
    fs::write(path, svg)?;
    Ok(())
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + step * k as f64).collect()
}

fn fmt_tau(tau: f64) -> String {
    // Compact period label for file names: 0.01 -> "0.01".
    format!("{tau}")
}

fn closed_params(omega_c: f64, omega_p: f64, delta: f64) -> SystemParams {
    SystemParams { omega_c, omega_p, delta, decay: DecaySpec::None }
}

/// Evaluate one observable over a grid. Grid points run independently and
/// land in input order.
pub fn sweep(
    schedule: &ModulationSchedule,
    params: &SystemParams,
    axis: &SweepAxis,
    observable: &SweepObservable,
) -> Result<SweepResult> {
    if axis.grid().is_empty() {
        return Err(Error::EmptyGrid);
    }
    if axis.grid().windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("sweep grid must be strictly increasing".into()));
    }

    let point = |value: f64| -> Result<Vec<f64>> {
        let (schedule_here, params_here) = match axis {
            SweepAxis::Tau(_) => {
                let s = match schedule {
                    ModulationSchedule::Standard => {
                        return Err(Error::NoCycle);
                    }
                    ModulationSchedule::SingleMod { .. } => ModulationSchedule::single(value)?,
                    ModulationSchedule::DoubleMod { .. } => ModulationSchedule::double(value)?,
                };
                (s, params.clone())
            }
            SweepAxis::Delta(_) => {
                let mut p = params.clone();
                p.delta = value;
                (*schedule, p)
            }
        };
        match observable {
            SweepObservable::Envelope => {
                let tau = schedule_here.sampling_period();
                Ok(vec![analytic::absorption_envelope(tau, params_here.delta)])
            }
            SweepObservable::Plateau { probe } => {
                let tau = schedule_here.sampling_period();
                let initial = initial_for(&params_here)?;
                let traj = evolve_master(
                    &initial,
                    &schedule_here,
                    &params_here,
                    probe + tau,
                    1,
                    true,
                )?;
                let plateau = observables::plateau_value(&traj.absorption_series(), *probe)?;
                Ok(vec![plateau.value])
            }
            SweepObservable::OscStats => {
                let window = default_stats_window();
                let mut closed = params_here.clone();
                closed.decay = DecaySpec::None;
                let initial = dark_state(&closed)?;
                let traj = evolve_pure(&initial, &schedule_here, &closed, window, 1)?;
                let stats =
                    observables::oscillation_stats(&traj.fidelity_series(), (0.0, window))?;
                Ok(vec![stats.amplitude, stats.center])
            }
        }
    };

    let rows: Vec<Vec<f64>> =
        axis.grid().par_iter().map(|&v| point(v)).collect::<Result<Vec<_>>>()?;

    let series = match observable {
        SweepObservable::OscStats => vec![
            ("amplitude".to_string(), rows.iter().map(|r| r[0]).collect()),
            ("center".to_string(), rows.iter().map(|r| r[1]).collect()),
        ],
        _ => vec![("value".to_string(), rows.iter().map(|r| r[0]).collect())],
    };
    let metadata = format!(
        "mode={} omega_c={} omega_p={} delta={} decay={:?} observable={:?}",
        schedule.mode_name(),
        params.omega_c,
        params.omega_p,
        params.delta,
        params.decay,
        observable,
    );
    Ok(SweepResult { axis_name: axis.name(), axis: axis.grid().to_vec(), series, metadata })
}

/// Dark-state start for near-unit drives; the strong-coupling mixed
/// preparation when the coupling dominates by an order of magnitude.
fn initial_for(params: &SystemParams) -> Result<DensityMatrix> {
    if params.omega_c > 3.0 * params.omega_p {
        mixed_initial(0.99, 0.01)
    } else {
        Ok(dark_state(params)?.density())
    }
}

struct FigureContext<'a> {
    spec: &'a ExperimentSpec,
    files: Vec<PathBuf>,
}

impl<'a> FigureContext<'a> {
    fn new(spec: &'a ExperimentSpec) -> Result<Self> {
        fs::create_dir_all(&spec.out_dir)?;
        Ok(Self { spec, files: Vec::new() })
    }

    fn emit_csv(&mut self, name: &str, header: &str, rows: &[Vec<f64>]) -> Result<()> {
        let path = self.spec.out_dir.join(name);
        write_csv(&path, header, rows)?;
        self.files.push(path);
        Ok(())
    }

    fn emit_svg(&mut self, name: &str, title: &str, curves: &[(String, &[f64], &[f64])]) -> Result<()> {
        if !self.spec.svg {
            return Ok(());
        }
        let path = self.spec.out_dir.join(name);
        write_svg(&path, title, curves)?;
        self.files.push(path);
        Ok(())
    }
}

/// Run one figure pipeline, writing one CSV per panel or curve (plus
/// optional SVG). Identical specs produce byte-identical CSV output.
pub fn reproduce_figure(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let mut ctx = FigureContext::new(spec)?;
    match spec.figure {
        FigureId::Fig2 => fig2(&mut ctx)?,
        FigureId::Fig3 => fig3(&mut ctx)?,
        FigureId::Fig4Te => fig4_te(&mut ctx)?,
        FigureId::Fig4Am => fig4_am(&mut ctx)?,
        FigureId::Fig5 => decay_figure(&mut ctx, DecayFigure::fig5())?,
        FigureId::Fig6 => decay_figure(&mut ctx, DecayFigure::fig6())?,
        FigureId::Fig7 => decay_figure(&mut ctx, DecayFigure::fig7())?,
        FigureId::Fig8 => decay_figure(&mut ctx, DecayFigure::fig8())?,
    }
    Ok(ctx.files)
}

fn stroboscopic_fidelity(
    mode_double: bool,
    tau: f64,
    delta: f64,
    t_end: f64,
) -> Result<(TimeSeries, TimeSeries)> {
    let params = closed_params(1.0, 1.0, delta);
    let schedule = if mode_double {
        ModulationSchedule::double(tau)?
    } else {
        ModulationSchedule::single(tau)?
    };
    let initial = dark_state(&params)?;
    let traj = evolve_pure(&initial, &schedule, &params, t_end, 1)?;
    Ok((traj.fidelity_series(), traj.absorption_series()))
}

fn fig2(ctx: &mut FigureContext) -> Result<()> {
    let single_taus =
        ctx.spec.overrides.tau_list.clone().unwrap_or_else(|| vec![1.9, 1.6, 0.8, 0.1]);
    let double_taus = vec![0.1, 0.5, 0.8, 1.6, 1.9];
    let t_end = 60.0;

    for &tau in &single_taus {
        let (fid, _) = stroboscopic_fidelity(false, tau, 0.0, t_end)?;
        let rows: Vec<Vec<f64>> = fid
            .iter()
            .map(|(t, f)| Ok(vec![t, f, analytic::fidelity_single(t, tau)?]))
            .collect::<Result<_>>()?;
        let name = format!("fig2_single_tau_{}.csv", fmt_tau(tau));
        ctx.emit_csv(&name, "t,F_numeric,F_analytic", &rows)?;
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let num: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let ana: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        ctx.emit_svg(
            &format!("fig2_single_tau_{}.svg", fmt_tau(tau)),
            &format!("single-modulation fidelity, tau = {tau}"),
            &[
                ("numeric".to_string(), xs.as_slice(), num.as_slice()),
                ("analytic".to_string(), xs.as_slice(), ana.as_slice()),
            ],
        )?;
    }

    // Panel (e): all double-modulation periods in one long-format file.
    let mut rows = Vec::new();
    for &tau in &double_taus {
        let (fid, _) = stroboscopic_fidelity(true, tau, 0.0, t_end)?;
        for (t, f) in fid.iter() {
            rows.push(vec![tau, t, f, analytic::fidelity_double(t, tau)?]);
        }
    }
    ctx.emit_csv("fig2_double.csv", "tau,t,F_numeric,F_analytic", &rows)?;
    Ok(())
}

fn fig3(ctx: &mut FigureContext) -> Result<()> {
    let taus = ctx
        .spec
        .overrides
        .tau_list
        .clone()
        .unwrap_or_else(|| (1..=19).map(|k| 0.1 * k as f64).collect());
    let params = closed_params(1.0, 1.0, 0.0);
    for mode_double in [false, true] {
        let schedule = if mode_double {
            ModulationSchedule::double(taus[0])?
        } else {
            ModulationSchedule::single(taus[0])?
        };
        let numeric =
            sweep(&schedule, &params, &SweepAxis::Tau(taus.clone()), &SweepObservable::OscStats)?;
        let rows: Vec<Vec<f64>> = taus
            .iter()
            .enumerate()
            .map(|(k, &tau)| {
                let (amp, center) = if mode_double {
                    analytic::double_mod_extrema(tau)?
                } else {
                    analytic::single_mod_extrema(tau)?
                };
                Ok(vec![
                    tau,
                    numeric.series[0].1[k],
                    numeric.series[1].1[k],
                    amp,
                    center,
                ])
            })
            .collect::<Result<_>>()?;
        let name = if mode_double { "fig3_double.csv" } else { "fig3_single.csv" };
        ctx.emit_csv(
            name,
            "tau,amplitude_numeric,center_numeric,amplitude_analytic,center_analytic",
            &rows,
        )?;
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let amp: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let cen: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        ctx.emit_svg(
            &format!("fig3_{}.svg", if mode_double { "double" } else { "single" }),
            &format!(
                "fidelity oscillation stats, {} modulation",
                if mode_double { "double" } else { "single" }
            ),
            &[
                ("amplitude".to_string(), xs.as_slice(), amp.as_slice()),
                ("center".to_string(), xs.as_slice(), cen.as_slice()),
            ],
        )?;
    }
    Ok(())
}

fn fig4_te(ctx: &mut FigureContext) -> Result<()> {
    let tau = 0.1;
    let delta = ctx.spec.overrides.delta.unwrap_or(-0.1);
    let (fid, abs) = stroboscopic_fidelity(true, tau, delta, 60.0)?;
    let fid_rows: Vec<Vec<f64>> = fid
        .iter()
        .map(|(t, f)| vec![t, f, analytic::fidelity_detuned(t, tau, delta)])
        .collect();
    ctx.emit_csv("fig4_te_fidelity.csv", "t,value_numeric,value_analytic", &fid_rows)?;
    let abs_rows: Vec<Vec<f64>> = abs
        .iter()
        .map(|(t, a)| vec![t, a, analytic::absorption_detuned(t, tau, delta)])
        .collect();
    ctx.emit_csv("fig4_te_absorption.csv", "t,value_numeric,value_analytic", &abs_rows)?;
    for (name, title, rows) in [
        ("fig4_te_fidelity.svg", "detuned fidelity", &fid_rows),
        ("fig4_te_absorption.svg", "detuned absorption", &abs_rows),
    ] {
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let num: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let ana: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        ctx.emit_svg(
            name,
            title,
            &[
                ("numeric".to_string(), xs.as_slice(), num.as_slice()),
                ("analytic".to_string(), xs.as_slice(), ana.as_slice()),
            ],
        )?;
    }
    Ok(())
}

fn fig4_am(ctx: &mut FigureContext) -> Result<()> {
    let taus =
        ctx.spec.overrides.tau_list.clone().unwrap_or_else(|| vec![0.01, 0.1, 0.5, 0.8]);
    let grid = uniform_grid(-0.5, 0.5, 81);
    for &tau in &taus {
        let rows: Vec<Vec<f64>> = grid
            .iter()
            .map(|&d| vec![d, analytic::absorption_envelope(tau, d)])
            .collect();
        let name = format!("fig4_am_tau_{}.csv", fmt_tau(tau));
        ctx.emit_csv(&name, "delta,value", &rows)?;
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        ctx.emit_svg(
            &format!("fig4_am_tau_{}.svg", fmt_tau(tau)),
            &format!("absorption envelope, tau = {tau}"),
            &[("envelope".to_string(), xs.as_slice(), ys.as_slice())],
        )?;
    }
    Ok(())
}

/// Shared layout of the four decay figures: panel (a) absorption traces
/// at fixed detuning, panel (b) detuning sweep of the plateau.
struct DecayFigure {
    prefix: &'static str,
    omega_c: f64,
    omega_p: f64,
    delta_trace: f64,
    decay: DecaySpec,
    mixed_start: bool,
    taus: Vec<f64>,
    t_end: f64,
    probe: f64,
    delta_grid: Vec<f64>,
}

impl DecayFigure {
    fn fig5() -> Self {
        Self {
            prefix: "fig5",
            omega_c: 1.0,
            omega_p: 1.0,
            delta_trace: -0.1,
            decay: DecaySpec::Projector { gamma: 1.0 },
            mixed_start: false,
            taus: vec![0.8, 0.5, 0.2, 0.01],
            t_end: 100.0,
            probe: 80.0,
            delta_grid: uniform_grid(-0.5, 0.5, 81),
        }
    }

    fn fig6() -> Self {
        Self {
            prefix: "fig6",
            omega_c: 99f64.sqrt(),
            omega_p: 1.0,
            delta_trace: 1.0,
            decay: DecaySpec::Projector { gamma: 5.0 },
            mixed_start: true,
            taus: vec![0.8, 0.5, 0.2, 0.01],
            t_end: 10.0,
            probe: 8.0,
            delta_grid: uniform_grid(-3.0, 3.0, 121),
        }
    }

    fn fig7() -> Self {
        Self {
            decay: DecaySpec::Lindblad { gamma_ab: 0.5, gamma_ac: 0.5 },
            prefix: "fig7",
            ..Self::fig5()
        }
    }

    fn fig8() -> Self {
        Self {
            decay: DecaySpec::Lindblad { gamma_ab: 2.5, gamma_ac: 2.5 },
            prefix: "fig8",
            ..Self::fig6()
        }
    }

    fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(x) = ov.omega_c {
            self.omega_c = x;
        }
        if let Some(x) = ov.omega_p {
            self.omega_p = x;
        }
        if let Some(x) = ov.delta {
            self.delta_trace = x;
        }
        if let Some(list) = &ov.tau_list {
            self.taus = list.clone();
        }
        match &mut self.decay {
            DecaySpec::Projector { gamma } => {
                if let Some(x) = ov.gamma {
                    *gamma = x;
                }
            }
            DecaySpec::Lindblad { gamma_ab, gamma_ac } => {
                if let Some(x) = ov.gamma_ab {
                    *gamma_ab = x;
                }
                if let Some(x) = ov.gamma_ac {
                    *gamma_ac = x;
                }
            }
            DecaySpec::None => {}
        }
    }

    fn params(&self, delta: f64) -> Result<SystemParams> {
        SystemParams::new(self.omega_c, self.omega_p, delta, self.decay)
    }

    fn initial(&self, params: &SystemParams) -> Result<DensityMatrix> {
        if self.mixed_start {
            mixed_initial(0.99, 0.01)
        } else {
            Ok(dark_state(params)?.density())
        }
    }
}

fn decay_figure(ctx: &mut FigureContext, mut fig: DecayFigure) -> Result<()> {
    fig.apply_overrides(&ctx.spec.overrides);

    // Panel (a): absorption traces, 10 samples per cycle, plus the
    // unmodulated comparison run.
    let params = fig.params(fig.delta_trace)?;
    let mut panel_a: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    let schedules: Vec<(String, ModulationSchedule)> = fig
        .taus
        .iter()
        .map(|&tau| Ok((format!("tau_{}", fmt_tau(tau)), ModulationSchedule::double(tau)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .chain(std::iter::once(("standard".to_string(), ModulationSchedule::Standard)))
        .collect();
    for (label, schedule) in &schedules {
        let initial = fig.initial(&params)?;
        let traj = evolve_master(&initial, schedule, &params, fig.t_end, 10, true)?;
        let abs = traj.absorption_series();
        let rows: Vec<Vec<f64>> = abs.iter().map(|(t, v)| vec![t, v]).collect();
        ctx.emit_csv(&format!("{}a_{}.csv", fig.prefix, label), "t,value_numeric", &rows)?;
        panel_a.push((
            label.clone(),
            abs.times().to_vec(),
            abs.values().to_vec(),
        ));
    }
    let curves: Vec<(String, &[f64], &[f64])> = panel_a
        .iter()
        .map(|(l, xs, ys)| (l.clone(), xs.as_slice(), ys.as_slice()))
        .collect();
    ctx.emit_svg(
        &format!("{}a.svg", fig.prefix),
        &format!("{} absorption traces", fig.prefix),
        &curves,
    )?;

    // Panel (b): plateau vs detuning for each curve, evaluated in
    // parallel over the grid.
    let mut panel_b: Vec<(String, Vec<f64>)> = Vec::new();
    for (label, schedule) in &schedules {
        let values: Vec<f64> = fig
            .delta_grid
            .par_iter()
            .map(|&delta| -> Result<f64> {
                let params = fig.params(delta)?;
                let initial = fig.initial(&params)?;
                let tau = schedule.sampling_period();
                let traj =
                    evolve_master(&initial, schedule, &params, fig.probe + tau, 1, true)?;
                Ok(observables::plateau_value(&traj.absorption_series(), fig.probe)?.value)
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> =
            fig.delta_grid.iter().zip(&values).map(|(&d, &v)| vec![d, v]).collect();
        ctx.emit_csv(&format!("{}b_{}.csv", fig.prefix, label), "delta,value", &rows)?;
        panel_b.push((label.clone(), values));
    }
    let curves: Vec<(String, &[f64], &[f64])> = panel_b
        .iter()
        .map(|(l, ys)| (l.clone(), fig.delta_grid.as_slice(), ys.as_slice()))
        .collect();
    ctx.emit_svg(
        &format!("{}b.svg", fig.prefix),
        &format!("{} plateau vs detuning", fig.prefix),
        &curves,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_id_roundtrip() {
        for f in FigureId::ALL {
            assert_eq!(FigureId::from_str(f.name()).unwrap(), f);
        }
        assert!(matches!(FigureId::from_str("fig9"), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        let p = closed_params(1.0, 1.0, 0.0);
        let s = ModulationSchedule::double(0.1).unwrap();
        let err = sweep(&s, &p, &SweepAxis::Tau(vec![]), &SweepObservable::Envelope);
        assert!(matches!(err, Err(Error::EmptyGrid)));
    }

    #[test]
    fn sweep_single_point() {
        let p = closed_params(1.0, 1.0, 0.0);
        let s = ModulationSchedule::double(0.1).unwrap();
        let r = sweep(&s, &p, &SweepAxis::Tau(vec![0.1]), &SweepObservable::Envelope).unwrap();
        assert_eq!(r.axis.len(), 1);
        assert_eq!(r.series[0].1.len(), 1);
        assert!((r.series[0].1[0] - 3.0 * 0.1 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_envelope_minimum_at_zero_detuning() {
        let p = closed_params(1.0, 1.0, 0.0);
        let s = ModulationSchedule::double(0.1).unwrap();
        let grid: Vec<f64> = (0..33).map(|k| -0.2 + 0.0125 * k as f64).collect();
        let r = sweep(&s, &p, &SweepAxis::Delta(grid.clone()), &SweepObservable::Envelope)
            .unwrap();
        let (argmin, _) = r.series[0]
            .1
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert!(grid[argmin].abs() < 1e-12);
    }

    #[test]
    fn sweep_osc_stats_center_rises_toward_one() {
        let p = closed_params(1.0, 1.0, 0.0);
        let s = ModulationSchedule::double(0.5).unwrap();
        let taus = vec![0.1, 0.5, 1.0, 1.5, 1.9];
        let r = sweep(&s, &p, &SweepAxis::Tau(taus), &SweepObservable::OscStats).unwrap();
        let centers = &r.series[1].1;
        for pair in centers.windows(2) {
            assert!(pair[0] > pair[1], "center should rise as tau falls: {centers:?}");
        }
        assert!(centers[0] > 0.999);
    }

    #[test]
    fn fmt12_has_twelve_significant_digits() {
        assert_eq!(fmt12(0.1), "1.00000000000e-1");
        assert_eq!(fmt12(-3.0), "-3.00000000000e0");
    }
}
