//! Experiment dispatch: runs one config and writes its artifacts.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{BarrierSection, Experiment, ExperimentConfig, InitialData};
use super::series::TimeSeries;
use super::svg::{render, AxisKind};
use super::HarnessError;
use crate::axisym::{energy, local_energy, simulate, Halt, RadialGrid, RunOptions, Scheme, SolverParams, Trace};
use crate::barriers::{
    check_ordering, eta_reversed_time_bound, eta_scale_bound, fit_supersolution_scale, BarrierSpec, BetaClock,
    OrderingReport,
};
use crate::blowup::{default_resolution_cap, detect, fit_beta_law, BetaLawFit, BlowupReport, LOCAL_ENERGY_RADIUS};
use crate::coeffs::LeslieCoefficients;
use crate::hopf::{dirichlet_energy_s3, initial_data_energy, EnergyEstimate, InitialDataEnergy};
use crate::poiseuille::{
    self, counterexample_run, energy_identity_residual, heat_reduction_check, Boundary, CounterexampleReport,
    EnergyIdentity, LineGrid, PoiseuilleRun, PoiseuilleState,
};

/// Solver parameters for an axisymmetric section: scheme defaults, optional
/// `dt` override, and a clip guard of `1/dr` (none for blow-up runs, which stop
/// at the detection cap instead).
pub fn solver_params(
    a: &super::config::AxisymSection,
    grid: &RadialGrid,
    c: &LeslieCoefficients,
    experiment: Experiment,
) -> Result<SolverParams, HarnessError> {
    let mut p = SolverParams::with_defaults(grid, c, a.scheme, a.t_end).map_err(HarnessError::Validation)?;
    if let Some(dt) = a.dt {
        p.dt = dt;
    }
    p.clip_guard = match (a.clip_guard, experiment) {
        (Some(g), _) => g,
        (None, Experiment::AxisymBlowup) => f64::INFINITY,
        (None, _) => 1.0 / grid.dr(),
    };
    p.check(grid, c).map_err(HarnessError::Validation)?;
    Ok(p)
}

/// Result of one `run`: the files written, and a halt description when the
/// experiment stopped early in a way its scenario does not expect.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub halted: Option<String>,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
    plots: bool,
    hash: String,
}

impl Writer {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
        move |source| HarnessError::Io { path: path.to_path_buf(), source }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), HarnessError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(Self::io(&path))?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), HarnessError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Series(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `<stem>.csv`, `<stem>.meta.json`, and optionally `<stem>.svg`.
    fn series(&mut self, stem: &str, mut s: TimeSeries, plot: Option<(AxisKind, &str)>) -> Result<(), HarnessError> {
        s.metadata.insert("config_sha256".into(), self.hash.clone());
        if let (true, Some((kind, title))) = (self.plots, plot) {
            if !s.is_empty() {
                let p = render(&s, kind, title)?;
                s.metadata.insert("svg_dropped_points".into(), p.dropped.to_string());
                self.write(&format!("{stem}.svg"), p.svg.as_bytes())?;
            }
        }
        self.write(&format!("{stem}.csv"), s.to_csv().as_bytes())?;
        self.json(&format!("{stem}.meta.json"), &s.metadata)
    }
}

/// Runs `config`, writing every artifact under `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path, plots: bool) -> Result<Outcome, HarnessError> {
    config.validate()?;
    fs::create_dir_all(out_dir).map_err(Writer::io(out_dir))?;
    let mut w = Writer { dir: out_dir.to_path_buf(), files: Vec::new(), plots, hash: config.hash()? };
    w.write("config.toml", config.to_toml()?.as_bytes())?;
    let halted = match config.experiment {
        Experiment::AxisymGlobal => axisym_global(config, &mut w)?,
        Experiment::AxisymBlowup => axisym_blowup(config, &mut w)?,
        Experiment::BarrierCheck => {
            let report = barrier_check(&config.barrier.clone().unwrap_or_default())?;
            w.series("barrier_sets", report.table()?, None)?;
            w.json("report.json", &report)?;
            None
        }
        Experiment::PoiseuilleCounterexample => poiseuille_counterexample(config, &mut w)?,
        Experiment::PoiseuilleGeneric => poiseuille_generic(config, &mut w)?,
        Experiment::HopfDecay => {
            let report = hopf_decay(&config.hopf.clone().unwrap_or_default())?;
            let mut s = TimeSeries::new(["lambda", "energy", "mesh", "warning_flag"]);
            for e in &report.sphere {
                s.push(vec![e.lambda, e.energy, e.mesh as f64, e.underresolved as u8 as f64])?;
            }
            s.metadata.insert("mesh".into(), report.mesh.to_string());
            let mut energy_only = TimeSeries::new(["lambda", "energy"]);
            for e in &report.sphere {
                energy_only.push(vec![e.lambda, e.energy])?;
            }
            if w.plots {
                let p = render(&energy_only, AxisKind::LogLog, "Dirichlet energy of H o Psi_lambda")?;
                s.metadata.insert("svg_dropped_points".into(), p.dropped.to_string());
                w.write("energy.svg", p.svg.as_bytes())?;
            }
            w.series("energy", s, None)?;
            w.json("report.json", &report)?;
            None
        }
    };
    Ok(Outcome { dir: w.dir, files: w.files, halted })
}

fn radial_series(trace: &Trace, radius: f64, scheme: Scheme) -> Result<TimeSeries, HarnessError> {
    let mut s = TimeSeries::new(["t", "phi_r_origin", "e_total", "e_grad", "e_sin", "local_energy_R"]);
    for snap in &trace.snapshots {
        let e = energy(snap);
        let local = local_energy(snap, radius).map_err(HarnessError::Runtime)?;
        s.push(vec![snap.t(), crate::blowup::origin_gradient(snap), e.total, e.grad, e.sin, local])?;
    }
    s.metadata.insert("n_cells".into(), trace.grid().n_cells().to_string());
    s.metadata.insert("dt".into(), trace.params.dt.to_string());
    s.metadata.insert("scheme".into(), format!("{scheme:?}"));
    s.metadata.insert("local_energy_radius".into(), radius.to_string());
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalReport {
    pub n_cells: usize,
    pub dt: f64,
    pub t_end: f64,
    pub halt: Halt,
    pub detected: bool,
    pub phi_min: f64,
    pub phi_max: f64,
    /// `10·dr²`
    pub max_principle_tol: f64,
    /// `−tol ≤ φ ≤ π + tol` at every stored snapshot.
    pub max_principle_ok: bool,
    pub ordering: Option<OrderingReport>,
    pub ordering_note: Option<String>,
    pub energy_initial: f64,
    pub energy_max: f64,
}

/// Runs the global-existence scenario and summarizes it.
pub fn global_report(
    trace: &Trace,
    c: &LeslieCoefficients,
) -> Result<GlobalReport, HarnessError> {
    let grid = *trace.grid();
    let tol = 10.0 * grid.dr() * grid.dr();
    let (phi_min, phi_max) = trace
        .snapshots
        .iter()
        .flat_map(|s| s.phi().iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let initial = &trace.snapshots[0];
    let (ordering, ordering_note) = match fit_supersolution_scale(&grid.nodes(), initial.phi()) {
        Ok(scale) => {
            let sup = BarrierSpec::supersolution(scale, c).map_err(HarnessError::Runtime)?;
            let sub = BarrierSpec::subsolution(scale, c).map_err(HarnessError::Runtime)?;
            match check_ordering(Some(&sub), trace, Some(&sup)) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let detected = detect(trace, None).map(|r| r.detected).unwrap_or(false);
    let energies: Vec<f64> = trace.snapshots.iter().map(|s| energy(s).total).collect();
    Ok(GlobalReport {
        n_cells: grid.n_cells(),
        dt: trace.params.dt,
        t_end: trace.last().t(),
        halt: trace.halt,
        detected,
        phi_min,
        phi_max,
        max_principle_tol: tol,
        max_principle_ok: phi_min >= -tol && phi_max <= PI + tol,
        ordering,
        ordering_note,
        energy_initial: energies[0],
        energy_max: energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

fn run_axisym(config: &ExperimentConfig, stop_at_cap: bool) -> Result<(Trace, LeslieCoefficients), HarnessError> {
    let c = config.coefficients()?;
    let a = config.axisym()?;
    let grid = RadialGrid::new(a.n).map_err(HarnessError::Validation)?;
    let params = solver_params(a, &grid, &c, config.experiment)?;
    let cap = a.resolution_cap.unwrap_or_else(|| default_resolution_cap(grid.dr()));
    let opts = RunOptions {
        snapshot_stride: config.snapshot_stride,
        monitor_stride: a.monitor_stride,
        stop_origin_gradient: stop_at_cap.then_some(cap),
    };
    let trace = simulate(a.initial.state(grid)?, &c, &params, opts).map_err(HarnessError::Runtime)?;
    Ok((trace, c))
}

fn axisym_global(config: &ExperimentConfig, w: &mut Writer) -> Result<Option<String>, HarnessError> {
    let (trace, c) = run_axisym(config, false)?;
    let radius = LOCAL_ENERGY_RADIUS.max(2.0 * trace.grid().dr());
    w.series("series", radial_series(&trace, radius, config.axisym()?.scheme)?, Some((AxisKind::Linear, "origin gradient and energies")))?;
    let report = global_report(&trace, &c)?;
    w.json("report.json", &report)?;
    Ok(match trace.halt {
        Halt::Completed => None,
        h => Some(format!("{h:?}")),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    /// `β₀` of the shrinking bubble under the initial data.
    pub beta0: f64,
    pub samples_checked: usize,
    /// Samples with `φ_r(0) < 0.95·2/β(t)`.
    pub violations: usize,
    /// Smallest `φ_r(0)/(2/β(t))` seen.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupOutcome {
    pub n_cells: usize,
    pub dt: f64,
    pub halt: Halt,
    pub initial_origin_gradient: f64,
    /// The initial data already exceed the detection cap.
    pub degenerate: bool,
    pub report: BlowupReport,
    pub beta_law: Option<BetaLawFit>,
    pub beta_law_note: Option<String>,
    pub domination: Option<Domination>,
}

/// Detection, profile, law fit, and the bubble-domination check for a blow-up run.
pub fn blowup_outcome(trace: &Trace, cap: Option<f64>, initial: &InitialData) -> Result<BlowupOutcome, HarnessError> {
    let report = detect(trace, cap).map_err(HarnessError::Runtime)?;
    let (beta_law, beta_law_note) = match fit_beta_law(&report) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let domination = match initial {
        InitialData::Bubble { beta0, .. } => {
            let clock = BetaClock::new(*beta0).map_err(HarnessError::Validation)?;
            let horizon = report.t_detect.unwrap_or(f64::INFINITY).min(clock.t0());
            let mut d = Domination { beta0: *beta0, samples_checked: 0, violations: 0, worst_ratio: f64::INFINITY };
            for &(t, g) in report.grad_history.iter().filter(|(t, _)| *t < horizon) {
                let ratio = g / (2.0 / clock.beta(t).map_err(HarnessError::Runtime)?);
                d.samples_checked += 1;
                d.worst_ratio = d.worst_ratio.min(ratio);
                if ratio < 0.95 {
                    d.violations += 1;
                }
            }
            Some(d)
        }
        _ => None,
    };
    let initial_origin_gradient = trace.samples[0].origin_gradient;
    Ok(BlowupOutcome {
        n_cells: trace.grid().n_cells(),
        dt: trace.params.dt,
        halt: trace.halt,
        initial_origin_gradient,
        degenerate: initial_origin_gradient >= report.resolution_cap,
        report,
        beta_law,
        beta_law_note,
        domination,
    })
}

fn axisym_blowup(config: &ExperimentConfig, w: &mut Writer) -> Result<Option<String>, HarnessError> {
    let (trace, _) = run_axisym(config, true)?;
    let a = config.axisym()?;
    let radius = LOCAL_ENERGY_RADIUS.max(2.0 * trace.grid().dr());
    w.series("series", radial_series(&trace, radius, a.scheme)?, None)?;
    let outcome = blowup_outcome(&trace, a.resolution_cap, &a.initial)?;
    let mut g = TimeSeries::new(["t", "phi_r_origin"]);
    let mut b = TimeSeries::new(["t", "beta_hat"]);
    for &(t, v) in &outcome.report.grad_history {
        g.push(vec![t, v])?;
    }
    for &(t, v) in &outcome.report.beta_fit {
        b.push(vec![t, v])?;
    }
    w.series("gradient", g, Some((AxisKind::Linear, "origin gradient")))?;
    w.series("beta_hat", b, None)?;
    w.json("report.json", &outcome)?;
    Ok(match trace.halt {
        Halt::Completed | Halt::OriginCap { .. } => None,
        h => Some(format!("{h:?}")),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierSet {
    pub coefficients: LeslieCoefficients,
    pub lambda1: f64,
    pub lambda2: f64,
    pub super_scale: f64,
    pub beta0: f64,
    /// Smallest supersolution residual over the sample grid.
    pub super_min: f64,
    pub super_violations: usize,
    /// Largest eta residual over the sample grid.
    pub eta_max: f64,
    pub eta_violations: usize,
    /// Samples where the displayed bound with reversed time derivative is positive.
    pub reversed_bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierControl {
    pub cbrt_beta0: f64,
    pub positive_samples: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierCheckReport {
    pub seed: u64,
    pub samples_per_axis: usize,
    pub sets: Vec<BarrierSet>,
    pub super_passed: bool,
    pub eta_passed: bool,
    pub control: BarrierControl,
}

impl BarrierCheckReport {
    fn table(&self) -> Result<TimeSeries, HarnessError> {
        let mut s = TimeSeries::new([
            "set", "lambda1", "lambda2", "beta0", "super_min", "eta_max", "eta_violations",
        ]);
        for (k, b) in self.sets.iter().enumerate() {
            s.push(vec![k as f64, b.lambda1, b.lambda2, b.beta0, b.super_min, b.eta_max, b.eta_violations as f64])?;
        }
        Ok(s)
    }
}

/// A random coefficient set that satisfies every relation.
pub fn random_coefficients(rng: &mut impl Rng) -> LeslieCoefficients {
    loop {
        let mut c = LeslieCoefficients::from_lambdas(rng.gen_range(0.2..5.0), rng.gen_range(-3.0..3.0));
        let mu1: f64 = rng.gen_range(-2.0..2.0);
        c.mu1 = mu1;
        c.mu4 += rng.gen_range(0.0..2.0) + mu1.abs();
        if c.validate().map(|v| v.is_pass()).unwrap_or(false) {
            return c;
        }
    }
}

/// Signs of the closed-form barrier residuals on an `(r, t)` grid for random
/// validated coefficient sets, plus a negative control with `β₀^{1/3}` near 1.
pub fn barrier_check(section: &BarrierSection) -> Result<BarrierCheckReport, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(section.seed);
    let m = section.samples;
    let r_at = |i: usize| (i + 1) as f64 / m as f64;
    let mut sets = Vec::new();
    for _ in 0..section.sets {
        let c = random_coefficients(&mut rng);
        let bound = eta_scale_bound(&c).map_err(HarnessError::Runtime)?;
        let beta0 = (rng.gen_range(0.1..0.9) * bound).powi(3);
        let scale = rng.gen_range(0.05..2.0);
        let sup = BarrierSpec::supersolution(scale, &c).map_err(HarnessError::Runtime)?;
        let eta = BarrierSpec::eta(beta0, &c).map_err(HarnessError::Runtime)?;
        let clock = eta.clock().expect("eta barrier has a clock");
        let mut set = BarrierSet {
            coefficients: c,
            lambda1: c.lambda1(),
            lambda2: c.lambda2(),
            super_scale: scale,
            beta0,
            super_min: f64::INFINITY,
            super_violations: 0,
            eta_max: f64::NEG_INFINITY,
            eta_violations: 0,
            reversed_bound_violations: 0,
        };
        for j in 0..m {
            let t_sup = 2.0 * j as f64 / m as f64;
            let t_eta = clock.t0() * j as f64 / m as f64;
            let beta = clock.beta(t_eta).map_err(HarnessError::Runtime)?;
            for i in 0..m {
                let r = r_at(i);
                let s = sup.residual(&c, r, t_sup).map_err(HarnessError::Runtime)?;
                set.super_min = set.super_min.min(s);
                set.super_violations += (s < 0.0) as usize;
                let e = eta.residual(&c, r, t_eta).map_err(HarnessError::Runtime)?;
                set.eta_max = set.eta_max.max(e);
                set.eta_violations += (e > 0.0) as usize;
                set.reversed_bound_violations += (eta_reversed_time_bound(beta, &c, r) > 0.0) as usize;
            }
        }
        sets.push(set);
    }

    // control: a set with λ₂ ≠ 0 and β₀^{1/3} far above the bound
    let c = LeslieCoefficients::from_lambdas(1.0, 0.5);
    let beta0 = section.control_cbrt_beta0.powi(3);
    let eta = BarrierSpec::eta_unconstrained(beta0).map_err(HarnessError::Runtime)?;
    let t0 = eta.clock().expect("eta barrier has a clock").t0();
    let mut control = BarrierControl { cbrt_beta0: section.control_cbrt_beta0, positive_samples: 0, max_residual: f64::NEG_INFINITY };
    for j in 0..m {
        for i in 0..m {
            let e = eta.residual(&c, r_at(i), t0 * j as f64 / m as f64).map_err(HarnessError::Runtime)?;
            control.max_residual = control.max_residual.max(e);
            control.positive_samples += (e > 0.0) as usize;
        }
    }
    Ok(BarrierCheckReport {
        seed: section.seed,
        samples_per_axis: m,
        super_passed: sets.iter().all(|s| s.super_violations == 0),
        eta_passed: sets.iter().all(|s| s.eta_violations == 0),
        sets,
        control,
    })
}

fn poiseuille_series(run: &PoiseuilleRun, exact_w: Option<fn(f64) -> f64>) -> Result<TimeSeries, HarnessError> {
    let mut cols = vec!["t", "max_abs_phi"];
    if exact_w.is_some() {
        cols.push("max_w_error");
    }
    cols.extend(["energy", "dissipation"]);
    let mut s = TimeSeries::new(cols);
    for (snap, e) in run.snapshots.iter().zip(&run.energy) {
        let mut row = vec![snap.t(), snap.phi().iter().map(|p| p.abs()).fold(0.0, f64::max)];
        if let Some(f) = exact_w {
            let x = snap.grid().nodes();
            row.push(x.iter().zip(snap.w()).map(|(x, w)| (w - f(*x)).abs()).fold(0.0, f64::max));
        }
        row.extend([e.energy, e.dissipation]);
        s.push(row)?;
    }
    s.metadata.insert("dt".into(), run.dt.to_string());
    s.metadata.insert("steps".into(), run.steps.to_string());
    if let Some(first) = run.snapshots.first() {
        s.metadata.insert("n_cells".into(), first.grid().n_cells().to_string());
        s.metadata.insert("half_width".into(), first.grid().half_width().to_string());
    }
    Ok(s)
}

fn poiseuille_counterexample(config: &ExperimentConfig, w: &mut Writer) -> Result<Option<String>, HarnessError> {
    let p = config.poiseuille()?;
    let (report, run): (CounterexampleReport, PoiseuilleRun) =
        counterexample_run(p.half_width, p.n, p.t_end).map_err(HarnessError::Runtime)?;
    w.series("series", poiseuille_series(&run, Some(|x| -2.0 * x))?, Some((AxisKind::Linear, "counterexample")))?;
    w.json("report.json", &report)?;
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericReport {
    pub n_cells: usize,
    pub half_width: f64,
    pub dt: f64,
    pub steps: usize,
    pub t_end: f64,
    pub energy_identity: EnergyIdentity,
    /// Only meaningful for the simplified coefficients.
    pub heat_residual: Option<f64>,
    pub energy_initial: f64,
    pub energy_final: f64,
}

/// `w₀ = A·x·exp(−x²)`, `φ₀ = 0`, frozen boundary values.
pub fn poiseuille_generic_run(
    c: &LeslieCoefficients,
    half_width: f64,
    n: usize,
    t_end: f64,
    dt: Option<f64>,
    a: f64,
    amplitude: f64,
    snapshot_stride: usize,
) -> Result<(GenericReport, PoiseuilleRun), HarnessError> {
    let grid = LineGrid::new(half_width, n).map_err(HarnessError::Validation)?;
    let initial = PoiseuilleState::from_fns(grid, |x| amplitude * x * (-x * x).exp(), |_| 0.0, a, Boundary::Frozen, 0.0)
        .map_err(HarnessError::Validation)?;
    let dt_max = match dt {
        Some(dt) => dt,
        None => poiseuille::stable_dt(&grid, c).map_err(HarnessError::Validation)?,
    };
    let run = poiseuille::run(initial, c, dt_max, t_end, snapshot_stride).map_err(HarnessError::Runtime)?;
    let energy_identity = energy_identity_residual(&run).map_err(HarnessError::Runtime)?;
    let heat_residual = if *c == LeslieCoefficients::simplified() && a == 0.0 {
        Some(heat_reduction_check(&run.snapshots).map_err(HarnessError::Runtime)?)
    } else {
        None
    };
    let report = GenericReport {
        n_cells: n,
        half_width,
        dt: run.dt,
        steps: run.steps,
        t_end,
        energy_identity,
        heat_residual,
        energy_initial: run.energy[0].energy,
        energy_final: run.energy.last().map(|e| e.energy).unwrap_or(f64::NAN),
    };
    Ok((report, run))
}

fn poiseuille_generic(config: &ExperimentConfig, w: &mut Writer) -> Result<Option<String>, HarnessError> {
    let c = config.coefficients()?;
    let p = config.poiseuille()?;
    let (report, run) =
        poiseuille_generic_run(&c, p.half_width, p.n, p.t_end, p.dt, p.a, p.amplitude, config.snapshot_stride)?;
    w.series("series", poiseuille_series(&run, None)?, Some((AxisKind::Linear, "energy and dissipation")))?;
    w.json("report.json", &report)?;
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfReport {
    pub mesh: usize,
    pub sphere: Vec<EnergyEstimate>,
    pub strictly_decreasing: bool,
    /// `E(λ_last)/E(λ_first)`
    pub ratio_last_first: f64,
    pub ball: Vec<InitialDataEnergy>,
}

pub fn hopf_decay(section: &super::config::HopfSection) -> Result<HopfReport, HarnessError> {
    let sphere = section
        .lambdas
        .iter()
        .map(|&l| dirichlet_energy_s3(l, section.mesh))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(HarnessError::Runtime)?;
    let ball = if section.ball_mesh == 0 {
        Vec::new()
    } else {
        section
            .lambdas
            .iter()
            .map(|&l| initial_data_energy(l, section.scale_u, section.ball_mesh))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(HarnessError::Runtime)?
    };
    Ok(HopfReport {
        mesh: section.mesh,
        strictly_decreasing: sphere.windows(2).all(|w| w[1].energy < w[0].energy),
        ratio_last_first: sphere.last().map(|e| e.energy).unwrap_or(f64::NAN) / sphere[0].energy,
        sphere,
        ball,
    })
}
