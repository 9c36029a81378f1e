//! Finite-time blow-up diagnostics for the axisymmetric solver: origin
//! gradient monitoring, rescaled bubble profile extraction, and the fit of the
//! concentration scale law.

use serde::{Deserialize, Serialize};

use crate::axisym::{local_energy, Halt, RadialState, Trace};
use crate::{Error, Result};

/// Smallest origin gradient at which a bubble profile is considered resolvable.
pub const PROFILE_MIN_GRADIENT: f64 = 100.0;
/// Radius of the local energy monitor.
pub const LOCAL_ENERGY_RADIUS: f64 = 0.05;
const PROFILE_SAMPLES: usize = 201;

/// One-sided second-order slope `(−3φ₀ + 4φ₁ − φ₂)/(2dr)` at `r = 0`.
pub fn origin_gradient(state: &RadialState) -> f64 {
    let phi = state.phi();
    (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * state.grid().dr())
}

/// Default detection threshold `0.5/dr`.
pub fn default_resolution_cap(dr: f64) -> f64 {
    0.5 / dr
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub detected: bool,
    /// A non-finite field appeared before the cap was reached.
    pub hard_overflow: bool,
    pub t_detect: Option<f64>,
    pub t_end: f64,
    pub resolution_cap: f64,
    pub gradient_at_detection: Option<f64>,
    /// `(t, φ_r(0, t))`
    pub grad_history: Vec<(f64, f64)>,
    pub profile_beta_hat: Option<f64>,
    pub profile_fit_error: Option<f64>,
    /// `(t, β̂(t) = 2/φ_r(0, t))` for samples with resolvable profiles.
    pub beta_fit: Vec<(f64, f64)>,
    pub local_energy_radius: f64,
    /// `(t, ∫₀ᴿ φ_r² r dr)` at every stored snapshot.
    pub local_energy_trace: Vec<(f64, f64)>,
}

/// Scans a run for the first time the origin gradient exceeds `resolution_cap`
/// (default `0.5/dr`).
///
/// A negative verdict needs at least 10 stored snapshots; a run that reached
/// the cap is conclusive however short it is.
pub fn detect(trace: &Trace, resolution_cap: Option<f64>) -> Result<BlowupReport> {
    let dr = trace.grid().dr();
    let cap = resolution_cap.unwrap_or_else(|| default_resolution_cap(dr));
    let grad_history: Vec<(f64, f64)> =
        trace.samples.iter().map(|s| (s.t, s.origin_gradient)).collect();

    let hit = grad_history.iter().find(|(_, g)| *g >= cap).copied();
    let overflow = matches!(trace.halt, Halt::NonFinite { .. });
    if hit.is_none() && !overflow && trace.snapshots.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "blow-up detection needs at least 10 snapshots, got {}",
            trace.snapshots.len()
        )));
    }
    let (detected, t_detect, gradient_at_detection) = match (hit, &trace.halt) {
        (Some((t, g)), _) => (true, Some(t), Some(g)),
        (None, Halt::NonFinite { t }) => (true, Some(*t), None),
        _ => (false, None, None),
    };
    let hard_overflow = overflow && hit.is_none();

    let radius = LOCAL_ENERGY_RADIUS.max(2.0 * dr);
    let local_energy_trace = trace
        .snapshots
        .iter()
        .map(|s| local_energy(s, radius).map(|e| (s.t(), e)))
        .collect::<Result<Vec<_>>>()?;

    let horizon = t_detect.unwrap_or(f64::INFINITY);
    let beta_fit = grad_history
        .iter()
        .filter(|(t, g)| *g >= PROFILE_MIN_GRADIENT && *t <= horizon)
        .map(|&(t, g)| (t, 2.0 / g))
        .collect();

    // latest resolvable snapshot no later than detection
    let profile = trace
        .snapshots
        .iter()
        .rev()
        .filter(|s| s.t() <= horizon)
        .find_map(|s| extract_profile(s).ok());

    let t_end = trace.last().t();
    Ok(BlowupReport {
        detected,
        hard_overflow,
        t_detect,
        t_end,
        resolution_cap: cap,
        gradient_at_detection,
        grad_history,
        profile_beta_hat: profile.map(|p| p.beta_hat),
        profile_fit_error: profile.map(|p| p.profile_error),
        beta_fit,
        local_energy_radius: radius,
        local_energy_trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub beta_hat: f64,
    pub profile_error: f64,
}

/// Rescales the state by `β̂ = 2/φ_r(0)` and measures the max distance to the
/// unit bubble `2·arctan(ρ)` on `ρ ∈ [0, 1]`.
pub fn extract_profile(state: &RadialState) -> Result<Profile> {
    let g = origin_gradient(state);
    if !(g >= PROFILE_MIN_GRADIENT) {
        return Err(Error::NoBubble { gradient: g, required: PROFILE_MIN_GRADIENT });
    }
    let beta_hat = 2.0 / g;
    let dr = state.grid().dr();
    let phi = state.phi();
    let n = state.grid().n_cells();
    let mut worst: f64 = 0.0;
    for k in 0..PROFILE_SAMPLES {
        let rho = k as f64 / (PROFILE_SAMPLES - 1) as f64;
        let r = (beta_hat * rho).min(1.0);
        let pos = r / dr;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        let value = phi[i] + frac * (phi[i + 1] - phi[i]);
        worst = worst.max((value - 2.0 * rho.atan()).abs());
    }
    Ok(Profile { beta_hat, profile_error: worst })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Least-squares line through `(t, β̂(t)^{1/3})` over the resolvable samples.
pub fn fit_beta_law(report: &BlowupReport) -> Result<BetaLawFit> {
    if !report.detected {
        return Err(Error::InsufficientData("no blow-up detected".into()));
    }
    let pts: Vec<(f64, f64)> = report.beta_fit.iter().map(|&(t, b)| (t, b.cbrt())).collect();
    if pts.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "beta law fit needs 20 resolvable samples, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all samples share one time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    Ok(BetaLawFit { slope, intercept, r2, samples: pts.len() })
}
