//! One-dimensional Poiseuille reduction
//!
//! ```text
//! w_t + a = (g(φ) w_x + h(φ) φ_t)_x
//! λ₁ φ_t  = φ_xx − h(φ) w_x
//! ```
//!
//! on `[−L, L]` with Dirichlet data, explicit in time. `φ_t` is evaluated from
//! the second equation first and then enters the flux of the first, so no
//! mixed-derivative stencil is needed.

use serde::{Deserialize, Serialize};

use crate::coeffs::{g_coeff, g_max, h_coeff, LeslieCoefficients};
use crate::quadrature::{cumulative_trapezoid, gradient, trapezoid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    half_width: f64,
    n_cells: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!("half width must be > 0, got {half_width}")));
        }
        if n_cells < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 cells, got {n_cells}")));
        }
        Ok(Self { half_width, n_cells })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|i| self.node(i)).collect()
    }
}

/// A closed-form solution used as Dirichlet data.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolution {
    pub w: fn(f64, f64) -> f64,
    pub phi: fn(f64, f64) -> f64,
    pub phi_t: fn(f64, f64) -> f64,
}

impl PartialEq for ExactSolution {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.w as *const (), other.w as *const ())
            && std::ptr::eq(self.phi as *const (), other.phi as *const ())
            && std::ptr::eq(self.phi_t as *const (), other.phi_t as *const ())
    }
}

/// The pair `w = −2x`, `φ = t` of the simplified system.
pub fn counterexample_solution() -> ExactSolution {
    ExactSolution { w: |x, _| -2.0 * x, phi: |_, t| t, phi_t: |_, _| 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// End values stay at their initial values.
    Frozen,
    Exact(ExactSolution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoiseuilleState {
    grid: LineGrid,
    w: Vec<f64>,
    phi: Vec<f64>,
    t: f64,
    a: f64,
    boundary: Boundary,
    /// `v(−L, t)`, advanced with the boundary flux.
    v_left: f64,
}

impl PoiseuilleState {
    pub fn new(
        grid: LineGrid,
        w: Vec<f64>,
        phi: Vec<f64>,
        a: f64,
        boundary: Boundary,
        v_left: f64,
    ) -> Result<Self> {
        let m = grid.n_cells + 1;
        if w.len() != m || phi.len() != m {
            return Err(Error::InvalidParameter(format!(
                "fields must have {m} nodes, got w: {}, phi: {}",
                w.len(),
                phi.len()
            )));
        }
        if w.iter().chain(&phi).any(|v| !v.is_finite()) || !a.is_finite() || !v_left.is_finite() {
            return Err(Error::NonFinite("Poiseuille state"));
        }
        let mut s = Self { grid, w, phi, t: 0.0, a, boundary, v_left };
        s.impose_boundary();
        Ok(s)
    }

    pub fn from_fns(
        grid: LineGrid,
        w0: impl Fn(f64) -> f64,
        phi0: impl Fn(f64) -> f64,
        a: f64,
        boundary: Boundary,
        v_left: f64,
    ) -> Result<Self> {
        let x = grid.nodes();
        Self::new(
            grid,
            x.iter().map(|&x| w0(x)).collect(),
            x.iter().map(|&x| phi0(x)).collect(),
            a,
            boundary,
            v_left,
        )
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn v_left(&self) -> f64 {
        self.v_left
    }

    fn impose_boundary(&mut self) {
        if let Boundary::Exact(exact) = self.boundary {
            let n = self.grid.n_cells;
            for i in [0, n] {
                let x = self.grid.node(i);
                self.w[i] = (exact.w)(x, self.t);
                self.phi[i] = (exact.phi)(x, self.t);
            }
        }
    }

    fn boundary_phi_t(&self, i: usize) -> f64 {
        match self.boundary {
            Boundary::Frozen => 0.0,
            Boundary::Exact(exact) => (exact.phi_t)(self.grid.node(i), self.t),
        }
    }
}

/// Instantaneous rates of the explicit scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    /// `φ_t` at every node (boundary nodes from the boundary data).
    pub phi_t: Vec<f64>,
    /// `w_t` at interior nodes (boundary entries are zero).
    pub w_t: Vec<f64>,
    /// `g w_x + h φ_t` at the cell midpoints.
    pub flux: Vec<f64>,
}

impl Rates {
    /// Flux at `x = −L`, extrapolated linearly from the first two midpoints.
    pub fn left_flux(&self) -> f64 {
        1.5 * self.flux[0] - 0.5 * self.flux[1]
    }

    pub fn right_flux(&self) -> f64 {
        let m = self.flux.len();
        1.5 * self.flux[m - 1] - 0.5 * self.flux[m - 2]
    }
}

pub fn rates(state: &PoiseuilleState, c: &LeslieCoefficients) -> Rates {
    let n = state.grid.n_cells;
    let dx = state.grid.dx();
    let l1 = c.lambda1();
    let (w, phi) = (&state.w, &state.phi);

    let mut phi_t = vec![0.0; n + 1];
    phi_t[0] = state.boundary_phi_t(0);
    phi_t[n] = state.boundary_phi_t(n);
    for i in 1..n {
        let phi_xx = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (dx * dx);
        let w_x = (w[i + 1] - w[i - 1]) / (2.0 * dx);
        phi_t[i] = (phi_xx - h_coeff(c, phi[i]) * w_x) / l1;
    }

    let flux: Vec<f64> = (0..n)
        .map(|i| {
            let mid = 0.5 * (phi[i] + phi[i + 1]);
            let w_x = (w[i + 1] - w[i]) / dx;
            g_coeff(c, mid) * w_x + h_coeff(c, mid) * 0.5 * (phi_t[i] + phi_t[i + 1])
        })
        .collect();

    let mut w_t = vec![0.0; n + 1];
    for i in 1..n {
        w_t[i] = -state.a + (flux[i] - flux[i - 1]) / dx;
    }
    Rates { phi_t, w_t, flux }
}

/// `0.25 dx² min(λ₁, 1/max g)`
pub fn stable_dt(grid: &LineGrid, c: &LeslieCoefficients) -> Result<f64> {
    let gm = g_max(c);
    if !(gm > 0.0) || !(c.lambda1() > 0.0) {
        return Err(Error::InvalidParameter("coefficients give non-positive diffusivity".into()));
    }
    Ok(0.25 * grid.dx() * grid.dx() * c.lambda1().min(1.0 / gm))
}

fn advance(state: &PoiseuilleState, r: &Rates, dt: f64) -> Result<PoiseuilleState> {
    let n = state.grid.n_cells;
    let mut next = state.clone();
    for i in 1..n {
        next.w[i] += dt * r.w_t[i];
        next.phi[i] += dt * r.phi_t[i];
    }
    next.v_left += dt * r.left_flux();
    next.t = state.t + dt;
    next.impose_boundary();
    if next.w.iter().chain(&next.phi).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteField { t: next.t });
    }
    Ok(next)
}

/// One forward-Euler step of the coupled system for general coefficients.
pub fn step_general(state: &PoiseuilleState, c: &LeslieCoefficients, dt: f64) -> Result<PoiseuilleState> {
    let limit = stable_dt(&state.grid, c)?;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "dt {dt} outside (0, {limit}] (0.25 dx^2 min(lambda1, 1/max g))"
        )));
    }
    advance(state, &rates(state, c), dt)
}

/// `v = v(−L) + ∫_{−L}^x w`.
#[derive(Debug, Clone, PartialEq)]
pub struct VPotential {
    pub v: Vec<f64>,
}

pub fn v_potential(state: &PoiseuilleState) -> VPotential {
    let mut v = cumulative_trapezoid(&state.w, state.grid.dx());
    for x in &mut v {
        *x += state.v_left;
    }
    VPotential { v }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    /// `½∫(w² + φ_x²)`
    pub energy: f64,
    /// `∫(w_x² + φ_t² + (w_x + φ_t)²)`
    pub dissipation: f64,
    /// Running `∫₀ᵗ D` accumulated every step.
    pub dissipated: f64,
    /// `|w F| + |φ_x φ_t|` summed over both ends.
    pub boundary_power: f64,
}

fn energy_terms(state: &PoiseuilleState, r: &Rates) -> (f64, f64, f64) {
    let dx = state.grid.dx();
    let n = state.grid.n_cells;
    let w_x = gradient(&state.w, dx);
    let phi_x = gradient(&state.phi, dx);
    let e: Vec<f64> = state.w.iter().zip(&phi_x).map(|(w, p)| w * w + p * p).collect();
    let d: Vec<f64> = w_x
        .iter()
        .zip(&r.phi_t)
        .map(|(wx, pt)| wx * wx + pt * pt + (wx + pt).powi(2))
        .collect();
    let boundary = (state.w[0] * r.left_flux()).abs()
        + (state.w[n] * r.right_flux()).abs()
        + (phi_x[0] * r.phi_t[0]).abs()
        + (phi_x[n] * r.phi_t[n]).abs();
    (0.5 * trapezoid(&e, dx), trapezoid(&d, dx), boundary)
}

#[derive(Debug, Clone)]
pub struct PoiseuilleRun {
    pub snapshots: Vec<PoiseuilleState>,
    pub energy: Vec<EnergySample>,
    pub dt: f64,
    pub steps: usize,
}

/// Integrates to `t_end` with a step no larger than `dt_max` that divides the
/// interval evenly, keeping every `snapshot_stride`-th state plus the last one.
pub fn run(
    initial: PoiseuilleState,
    c: &LeslieCoefficients,
    dt_max: f64,
    t_end: f64,
    snapshot_stride: usize,
) -> Result<PoiseuilleRun> {
    if !(t_end > initial.t) {
        return Err(Error::InvalidParameter(format!("t_end {t_end} must exceed t0 {}", initial.t)));
    }
    let limit = stable_dt(&initial.grid, c)?;
    let dt_max = dt_max.min(limit);
    let span = t_end - initial.t;
    let steps = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let stride = snapshot_stride.max(1);
    let t0 = initial.t;

    let mut state = initial;
    let mut dissipated = 0.0;
    let mut snapshots = Vec::new();
    let mut energy = Vec::new();
    for k in 0..=steps {
        let r = rates(&state, c);
        let (e, d, boundary_power) = energy_terms(&state, &r);
        if k % stride == 0 || k == steps {
            energy.push(EnergySample { t: state.t, energy: e, dissipation: d, dissipated, boundary_power });
            snapshots.push(state.clone());
        }
        if k == steps {
            break;
        }
        let mut next = advance(&state, &r, dt)?;
        next.t = t0 + (k + 1) as f64 * dt;
        next.impose_boundary();
        dissipated += dt * d;
        state = next;
    }
    Ok(PoiseuilleRun { snapshots, energy, dt, steps })
}

/// Max over snapshot pairs and interior nodes of `|Δs/Δt − s_xx|` for `s = v + φ`.
pub fn heat_reduction_check(snapshots: &[PoiseuilleState]) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "heat reduction check needs 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    let s_of = |st: &PoiseuilleState| -> Vec<f64> {
        v_potential(st).v.iter().zip(&st.phi).map(|(v, p)| v + p).collect()
    };
    let mut worst: f64 = 0.0;
    for pair in snapshots.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let dt = b.t - a.t;
        let dx = a.grid.dx();
        let (sa, sb) = (s_of(a), s_of(b));
        for i in 1..a.grid.n_cells {
            let s_t = (sb[i] - sa[i]) / dt;
            let s_xx = (sa[i + 1] - 2.0 * sa[i] + sa[i - 1]) / (dx * dx);
            worst = worst.max((s_t - s_xx).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    /// `max |ΔE/Δt + ΔD_int/Δt|` over consecutive samples.
    pub residual: f64,
    /// Energy flux through `±L` was not negligible.
    pub boundary_warning: bool,
}

const BOUNDARY_POWER_TOL: f64 = 1e-8;

/// Discrete check of `d/dt ½∫(w² + φ_x²) + ∫(w_x² + φ_t² + (w_x + φ_t)²) = 0`.
pub fn energy_identity_residual(run: &PoiseuilleRun) -> Result<EnergyIdentity> {
    if run.energy.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "energy identity needs 3 samples, got {}",
            run.energy.len()
        )));
    }
    let residual = run
        .energy
        .windows(2)
        .map(|p| {
            let dt = p[1].t - p[0].t;
            ((p[1].energy - p[0].energy) + (p[1].dissipated - p[0].dissipated)).abs() / dt
        })
        .fold(0.0, f64::max);
    let boundary_warning = run.energy.iter().any(|s| s.boundary_power > BOUNDARY_POWER_TOL);
    Ok(EnergyIdentity { residual, boundary_warning })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub half_width: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub steps: usize,
    pub t_end: f64,
    pub max_phi_initial: f64,
    pub max_phi_final: f64,
    /// `max |φ(x, t_end) − t_end|`
    pub phi_error_max: f64,
    /// `max |w(x, t_end) + 2x|`
    pub w_error_max: f64,
    pub heat_residual: f64,
    pub max_principle_violated: bool,
}

/// Runs the simplified system from `w₀ = −2x`, `φ₀ = 0` with exact Dirichlet data.
pub fn counterexample_run(half_width: f64, n_cells: usize, t_end: f64) -> Result<(CounterexampleReport, PoiseuilleRun)> {
    let c = LeslieCoefficients::simplified();
    let grid = LineGrid::new(half_width, n_cells)?;
    let exact = counterexample_solution();
    let initial = PoiseuilleState::from_fns(
        grid,
        |x| -2.0 * x,
        |_| 0.0,
        0.0,
        Boundary::Exact(exact),
        -half_width * half_width,
    )?;
    let max_phi_initial = initial.phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dt_max = stable_dt(&grid, &c)?;
    let steps_estimate = (t_end / dt_max).ceil() as usize;
    let stride = (steps_estimate / 100).max(1);
    let out = run(initial, &c, dt_max, t_end, stride)?;
    let last = out.snapshots.last().expect("run stores the final state");
    let max_phi_final = last.phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let phi_error_max = last.phi.iter().map(|p| (p - t_end).abs()).fold(0.0, f64::max);
    let w_error_max = grid
        .nodes()
        .iter()
        .zip(&last.w)
        .map(|(x, w)| (w + 2.0 * x).abs())
        .fold(0.0, f64::max);
    let heat_residual = heat_reduction_check(&out.snapshots)?;
    let report = CounterexampleReport {
        half_width,
        n_cells,
        dt: out.dt,
        steps: out.steps,
        t_end,
        max_phi_initial,
        max_phi_final,
        phi_error_max,
        w_error_max,
        heat_residual,
        max_principle_violated: max_phi_final > max_phi_initial,
    };
    Ok((report, out))
}
