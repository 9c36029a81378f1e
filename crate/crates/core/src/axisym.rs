//! Finite-difference solver for the reduced axisymmetric angle equation
//!
//! ```text
//! λ₁(φ_t + rφ_r) = φ_rr + φ_r/r − sin(2φ)/(2r²) − 3λ₂ sinφ cosφ,   r ∈ [0, 1]
//! φ(0, t) = 0,   φ(1, t) = φ₀(1)
//! ```
//!
//! The velocity that produces the transport term is the static pair
//! `v(r) = r`, `w(z) = −2z` ([`StaticFields`]).

use serde::{Deserialize, Serialize};

use crate::blowup::origin_gradient;
use crate::coeffs::LeslieCoefficients;
use crate::quadrature::{gradient, trapezoid};
use crate::{tridiag, Error, Result};

pub const MIN_CELLS: usize = 16;

/// Uniform nodes `r_i = i/n` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n_cells: usize,
    dr: f64,
}

impl RadialGrid {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self { n_cells, dr: 1.0 / n_cells as f64 })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|i| self.node(i)).collect()
    }
}

/// Angle field on a [`RadialGrid`] at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    grid: RadialGrid,
    phi: Vec<f64>,
    t: f64,
}

impl RadialState {
    pub fn new(grid: RadialGrid, phi: Vec<f64>, t: f64) -> Result<Self> {
        if phi.len() != grid.n_nodes() {
            return Err(Error::InvalidParameter(format!(
                "expected {} nodal values, got {}",
                grid.n_nodes(),
                phi.len()
            )));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("angle field"));
        }
        if phi[0] != 0.0 {
            return Err(Error::InvalidParameter(format!("phi(0) must be 0, got {}", phi[0])));
        }
        Ok(Self { grid, phi, t })
    }

    /// Samples `f` at the nodes; `f(0)` must vanish (values below `1e-14` are snapped to 0).
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut phi: Vec<f64> = grid.nodes().into_iter().map(&f).collect();
        if phi[0].abs() < 1e-14 {
            phi[0] = 0.0;
        }
        Self::new(grid, phi, 0.0)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn boundary_value(&self) -> f64 {
        self.phi[self.grid.n_cells]
    }

    /// Largest cell slope `max |φ_{i+1} − φ_i| / dr`.
    pub fn max_gradient(&self) -> f64 {
        let dr = self.grid.dr;
        self.phi
            .windows(2)
            .map(|w| ((w[1] - w[0]) / dr).abs())
            .fold(0.0, f64::max)
    }
}

/// The static velocity fields `v(r) = r`, `w(z) = −2z`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StaticFields;

pub fn static_fields() -> StaticFields {
    StaticFields
}

impl StaticFields {
    pub fn v(&self, r: f64) -> f64 {
        r
    }

    pub fn w(&self, z: f64) -> f64 {
        -2.0 * z
    }

    /// `(1/r)(r v)_r + w_z` by central differences of the closed forms.
    pub fn divergence_residual(&self, r: f64, z: f64) -> f64 {
        let h = 1e-5 * r.max(1e-3);
        let rv = |s: f64| s * self.v(s);
        let radial = (rv(r + h) - rv(r - h)) / (2.0 * h) / r;
        let axial = (self.w(z + h) - self.w(z - h)) / (2.0 * h);
        radial + axial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Crank–Nicolson diffusion, linearised Crank–Nicolson for `sin(2φ)/(2r²)`,
    /// explicit transport and `λ₂` terms.
    SemiImplicit,
    /// Classical RK4 on the full right-hand side.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Halt once `max |φ_r|` exceeds this value.
    pub clip_guard: f64,
}

impl SolverParams {
    pub fn new(
        grid: &RadialGrid,
        c: &LeslieCoefficients,
        scheme: Scheme,
        dt: f64,
        t_end: f64,
        clip_guard: f64,
    ) -> Result<Self> {
        let p = Self { dt, scheme, t_end, clip_guard };
        p.check(grid, c)?;
        Ok(p)
    }

    /// Default step: `min(0.25 dr² λ₁, 1e−5)` explicit, `1e−4` semi-implicit.
    /// Default guard: `1/dr`.
    pub fn with_defaults(
        grid: &RadialGrid,
        c: &LeslieCoefficients,
        scheme: Scheme,
        t_end: f64,
    ) -> Result<Self> {
        let dt = match scheme {
            Scheme::Explicit => explicit_dt_limit(grid, c).min(1e-5),
            Scheme::SemiImplicit => 1e-4,
        };
        Self::new(grid, c, scheme, dt, t_end, 1.0 / grid.dr())
    }

    pub fn check(&self, grid: &RadialGrid, c: &LeslieCoefficients) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.clip_guard > 0.0) {
            return Err(Error::InvalidParameter("clip_guard must be > 0".into()));
        }
        if !(c.lambda1() > 0.0) {
            return Err(Error::InvalidParameter("lambda1 must be > 0".into()));
        }
        if self.scheme == Scheme::Explicit {
            let limit = explicit_dt_limit(grid, c);
            if self.dt > limit * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "explicit dt {} exceeds stability limit 0.25 dr^2 lambda1 = {limit}",
                    self.dt
                )));
            }
        }
        Ok(())
    }
}

pub fn explicit_dt_limit(grid: &RadialGrid, c: &LeslieCoefficients) -> f64 {
    0.25 * grid.dr() * grid.dr() * c.lambda1()
}

/// Writes `φ_t` at interior nodes `1..n` into `out[1..n]`; `out[0]`, `out[n]` are zeroed.
fn rhs_into(phi: &[f64], grid: &RadialGrid, l1: f64, l2: f64, out: &mut [f64]) {
    let n = grid.n_cells;
    let dr = grid.dr;
    let inv_dr2 = 1.0 / (dr * dr);
    let inv_2dr = 0.5 / dr;
    out[0] = 0.0;
    out[n] = 0.0;
    for i in 1..n {
        let r = grid.node(i);
        let d1 = (phi[i + 1] - phi[i - 1]) * inv_2dr;
        let d2 = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_dr2;
        let (s, c) = phi[i].sin_cos();
        let elastic = d2 + d1 / r - s * c / (r * r) - 3.0 * l2 * s * c;
        out[i] = elastic / l1 - r * d1;
    }
}

/// `φ_t` at the interior nodes `i = 1..n−1` (length `n − 1`).
pub fn rhs(state: &RadialState, c: &LeslieCoefficients) -> Vec<f64> {
    let mut out = vec![0.0; state.phi.len()];
    rhs_into(&state.phi, &state.grid, c.lambda1(), c.lambda2(), &mut out);
    out[1..state.grid.n_cells].to_vec()
}

/// Advances the state by `p.dt`.
pub fn step(state: &RadialState, c: &LeslieCoefficients, p: &SolverParams) -> Result<RadialState> {
    step_by(state, c, p.scheme, p.dt)
}

fn step_by(state: &RadialState, c: &LeslieCoefficients, scheme: Scheme, dt: f64) -> Result<RadialState> {
    let phi = match scheme {
        Scheme::Explicit => rk4(state, c, dt),
        Scheme::SemiImplicit => semi_implicit(state, c, dt)?,
    };
    let t = state.t + dt;
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteField { t });
    }
    Ok(RadialState { grid: state.grid, phi, t })
}

fn rk4(state: &RadialState, c: &LeslieCoefficients, dt: f64) -> Vec<f64> {
    let (l1, l2) = (c.lambda1(), c.lambda2());
    let grid = &state.grid;
    let m = state.phi.len();
    let y0 = &state.phi;
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut tmp = y0.clone();

    rhs_into(y0, grid, l1, l2, &mut k1);
    for i in 0..m {
        tmp[i] = y0[i] + 0.5 * dt * k1[i];
    }
    rhs_into(&tmp, grid, l1, l2, &mut k2);
    for i in 0..m {
        tmp[i] = y0[i] + 0.5 * dt * k2[i];
    }
    rhs_into(&tmp, grid, l1, l2, &mut k3);
    for i in 0..m {
        tmp[i] = y0[i] + dt * k3[i];
    }
    rhs_into(&tmp, grid, l1, l2, &mut k4);
    for i in 0..m {
        tmp[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    // boundary rows of k are zero, so the Dirichlet values are untouched
    tmp[0] = 0.0;
    tmp[m - 1] = y0[m - 1];
    tmp
}

fn semi_implicit(state: &RadialState, c: &LeslieCoefficients, dt: f64) -> Result<Vec<f64>> {
    let (l1, l2) = (c.lambda1(), c.lambda2());
    let grid = &state.grid;
    let n = grid.n_cells;
    let dr = grid.dr;
    let phi = &state.phi;
    let inv_dr2 = 1.0 / (dr * dr);
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut b = vec![0.0; m];
    for i in 1..n {
        let r = grid.node(i);
        let a_lo = inv_dr2 - 0.5 / (r * dr);
        let a_hi = inv_dr2 + 0.5 / (r * dr);
        let lap = a_lo * phi[i - 1] - 2.0 * inv_dr2 * phi[i] + a_hi * phi[i + 1];
        let (s, co) = phi[i].sin_cos();
        let reaction = s * co / (r * r);
        let reaction_slope = (co * co - s * s) / (r * r);
        let transport = -l1 * r * (phi[i + 1] - phi[i - 1]) / (2.0 * dr);
        let k = i - 1;
        lower[k] = -0.5 * a_lo;
        upper[k] = -0.5 * a_hi;
        diag[k] = l1 / dt + inv_dr2 + 0.5 * reaction_slope;
        b[k] = l1 / dt * phi[i] + 0.5 * lap - reaction + 0.5 * reaction_slope * phi[i]
            - 3.0 * l2 * s * co
            + transport;
    }
    // Dirichlet data: φ₀ = 0 contributes nothing, φ_n is frozen.
    b[m - 1] -= upper[m - 1] * phi[n];
    let interior = tridiag::solve(&lower, &diag, &upper, &b)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    out.extend_from_slice(&interior);
    out.push(phi[n]);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Energy {
    pub total: f64,
    pub grad: f64,
    pub sin: f64,
}

/// Trapezoidal `∫(φ_r² + sin²φ/r²) r dr` over `[0, 1]`, split into its two parts.
pub fn energy(state: &RadialState) -> Energy {
    let dr = state.grid.dr;
    let dphi = gradient(&state.phi, dr);
    let nodes = state.grid.nodes();
    let grad_density: Vec<f64> = dphi.iter().zip(&nodes).map(|(d, r)| d * d * r).collect();
    let sin_density: Vec<f64> = state
        .phi
        .iter()
        .zip(&nodes)
        .map(|(p, &r)| if r == 0.0 { 0.0 } else { p.sin().powi(2) / r })
        .collect();
    let grad = trapezoid(&grad_density, dr);
    let sin = trapezoid(&sin_density, dr);
    Energy { total: grad + sin, grad, sin }
}

/// Trapezoidal `∫₀ᴿ φ_r² r dr`.
pub fn local_energy(state: &RadialState, radius: f64) -> Result<f64> {
    let dr = state.grid.dr;
    if !(radius >= 2.0 * dr) || radius > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "local energy radius {radius} outside [2 dr, 1] = [{}, 1]",
            2.0 * dr
        )));
    }
    let dphi = gradient(&state.phi, dr);
    let density: Vec<f64> = dphi
        .iter()
        .enumerate()
        .map(|(i, d)| d * d * state.grid.node(i))
        .collect();
    let n = state.grid.n_cells;
    let k = ((radius / dr).floor() as usize).min(n);
    let mut total = trapezoid(&density[..=k], dr);
    let rest = radius - state.grid.node(k);
    if k < n && rest > 0.0 {
        let frac = rest / dr;
        let end = density[k] + frac * (density[k + 1] - density[k]);
        total += 0.5 * rest * (density[k] + end);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    pub origin_gradient: f64,
    pub max_gradient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Halt {
    Completed,
    ClipGuard { t: f64, max_gradient: f64 },
    NonFinite { t: f64 },
    SolverBreakdown { t: f64, row: usize },
    /// The origin gradient reached [`RunOptions::stop_origin_gradient`].
    OriginCap { t: f64, origin_gradient: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Keep every `snapshot_stride`-th state (the initial and final states are always kept).
    pub snapshot_stride: usize,
    /// Record a monitor sample every `monitor_stride` steps.
    pub monitor_stride: usize,
    /// Stop once `φ_r(0, t)` reaches this value.
    pub stop_origin_gradient: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { snapshot_stride: 100, monitor_stride: 1, stop_origin_gradient: None }
    }
}

/// Stored output of one run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub snapshots: Vec<RadialState>,
    pub samples: Vec<MonitorSample>,
    pub halt: Halt,
    pub params: SolverParams,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Trace {
    pub fn grid(&self) -> &RadialGrid {
        self.snapshots[0].grid()
    }

    pub fn last(&self) -> &RadialState {
        self.snapshots.last().expect("trace holds the initial state")
    }
}

fn sample(state: &RadialState) -> MonitorSample {
    MonitorSample {
        t: state.t,
        origin_gradient: origin_gradient(state),
        max_gradient: state.max_gradient(),
    }
}

/// Integrates from `initial` to `params.t_end`, or until the clip guard trips or the
/// solver fails. Failures are reported in [`Trace::halt`], not as errors.
pub fn simulate(
    initial: RadialState,
    c: &LeslieCoefficients,
    params: &SolverParams,
    opts: RunOptions,
) -> Result<Trace> {
    params.check(initial.grid(), c)?;
    let snapshot_stride = opts.snapshot_stride.max(1);
    let monitor_stride = opts.monitor_stride.max(1);
    let t0 = initial.t;
    let span = params.t_end - t0;
    let n_steps = if span > 0.0 { (span / params.dt - 1e-9).ceil() as usize } else { 0 };

    let mut samples = vec![sample(&initial)];
    let mut snapshots = vec![initial.clone()];
    let mut state = initial;
    let mut halt = Halt::Completed;
    let mut stored_last = true;

    let origin0 = origin_gradient(&state);
    if state.max_gradient() > params.clip_guard {
        halt = Halt::ClipGuard { t: state.t, max_gradient: state.max_gradient() };
    } else if opts.stop_origin_gradient.map_or(false, |cap| origin0 >= cap) {
        halt = Halt::OriginCap { t: state.t, origin_gradient: origin0 };
    } else {
        for k in 1..=n_steps {
            let target = if k == n_steps { params.t_end } else { t0 + k as f64 * params.dt };
            let dt = target - state.t;
            let next = match step_by(&state, c, params.scheme, dt) {
                Ok(mut s) => {
                    s.t = target;
                    s
                }
                Err(Error::SolverBreakdown { row, .. }) => {
                    halt = Halt::SolverBreakdown { t: state.t, row };
                    break;
                }
                Err(_) => {
                    halt = Halt::NonFinite { t: target };
                    break;
                }
            };
            state = next;
            let guard = state.max_gradient();
            let tripped = guard > params.clip_guard;
            let origin = origin_gradient(&state);
            let capped = opts.stop_origin_gradient.map_or(false, |cap| origin >= cap);
            if k % monitor_stride == 0 || k == n_steps || tripped || capped {
                samples.push(sample(&state));
            }
            stored_last = k % snapshot_stride == 0;
            if stored_last {
                snapshots.push(state.clone());
            }
            if tripped {
                halt = Halt::ClipGuard { t: state.t, max_gradient: guard };
                break;
            }
            if capped {
                halt = Halt::OriginCap { t: state.t, origin_gradient: origin };
                break;
            }
        }
    }
    if !stored_last {
        snapshots.push(state);
    }
    Ok(Trace {
        snapshots,
        samples,
        halt,
        params: *params,
        lambda1: c.lambda1(),
        lambda2: c.lambda2(),
    })
}
