//! Closed-form barriers for the axisymmetric angle equation and the
//! comparison harness that checks a simulated run against them.
//!
//! All three families are rescaled harmonic-map bubbles `2·arctan(±r/β(t))`:
//!
//! | kind  | profile                       | scale `β(t)`               |
//! |-------|-------------------------------|----------------------------|
//! | super | `2·arctan(r e^{bt}/c)`        | `c e^{−bt}`                |
//! | sub   | `2·arctan(−r e^{bt}/c)`       | `c e^{−bt}`                |
//! | eta   | `2·arctan(r/β(t))`            | `((3β₀^{1/3} − t)/3)³`     |
//!
//! with `b = 3|λ₂|/λ₁`. Because the bubble is harmonic, the elliptic part of
//! the operator cancels and the residual
//! `λ₁(φ_t + rφ_r) − φ_rr − φ_r/r + sin(2φ)/(2r²) + 3λ₂ sinφ cosφ`
//! of `2·arctan(r/β)` reduces to `2r/(β² + r²) · (λ₁β − λ₁β′ + 3λ₂β cosφ)`.

use serde::{Deserialize, Serialize};

use crate::axisym::Trace;
use crate::coeffs::LeslieCoefficients;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    Super,
    Sub,
    Eta,
}

/// `β(t) = ((3β₀^{1/3} − t)/3)³`, the solution of `β′ = −β^{2/3}`, `β(0) = β₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaClock {
    beta0: f64,
    t0: f64,
}

impl BetaClock {
    pub fn new(beta0: f64) -> Result<Self> {
        if !(beta0 > 0.0) || !beta0.is_finite() {
            return Err(Error::InvalidParameter(format!("beta0 must be > 0, got {beta0}")));
        }
        Ok(Self { beta0, t0: 3.0 * beta0.cbrt() })
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Collapse time `T₀ = 3β₀^{1/3}`.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn beta(&self, t: f64) -> Result<f64> {
        if t >= self.t0 {
            return Err(Error::ClockExpired { t, t0: self.t0 });
        }
        Ok(((self.t0 - t) / 3.0).powi(3))
    }

    pub fn beta_prime(&self, t: f64) -> Result<f64> {
        Ok(-self.beta(t)?.powf(2.0 / 3.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub kind: BarrierKind,
    /// Scale at `t = 0` for super/sub.
    pub c: f64,
    /// Growth exponent `3|λ₂|/λ₁` for super/sub.
    pub b: f64,
    /// Initial scale for eta.
    pub beta0: f64,
}

fn growth_exponent(coeffs: &LeslieCoefficients) -> Result<f64> {
    let l1 = coeffs.lambda1();
    if !(l1 > 0.0) {
        return Err(Error::InvalidParameter("lambda1 must be > 0".into()));
    }
    Ok(3.0 * coeffs.lambda2().abs() / l1)
}

impl BarrierSpec {
    pub fn supersolution(c: f64, coeffs: &LeslieCoefficients) -> Result<Self> {
        Self::bubble_pair(BarrierKind::Super, c, coeffs)
    }

    pub fn subsolution(c: f64, coeffs: &LeslieCoefficients) -> Result<Self> {
        Self::bubble_pair(BarrierKind::Sub, c, coeffs)
    }

    fn bubble_pair(kind: BarrierKind, c: f64, coeffs: &LeslieCoefficients) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("barrier scale c must be > 0, got {c}")));
        }
        Ok(Self { kind, c, b: growth_exponent(coeffs)?, beta0: f64::NAN })
    }

    /// The shrinking bubble, checked against `β₀^{1/3} < λ₁/(λ₁ + 3|λ₂|)`.
    pub fn eta(beta0: f64, coeffs: &LeslieCoefficients) -> Result<Self> {
        let spec = Self::eta_unconstrained(beta0)?;
        let bound = eta_scale_bound(coeffs)?;
        if !(beta0.cbrt() < bound) {
            return Err(Error::InvalidParameter(format!(
                "beta0^(1/3) = {} must be below lambda1/(lambda1 + 3|lambda2|) = {bound}",
                beta0.cbrt()
            )));
        }
        Ok(spec)
    }

    /// The shrinking bubble without the scale constraint (for negative controls).
    pub fn eta_unconstrained(beta0: f64) -> Result<Self> {
        BetaClock::new(beta0)?;
        Ok(Self { kind: BarrierKind::Eta, c: f64::NAN, b: f64::NAN, beta0 })
    }

    pub fn clock(&self) -> Option<BetaClock> {
        match self.kind {
            BarrierKind::Eta => BetaClock::new(self.beta0).ok(),
            _ => None,
        }
    }

    /// `(signed argument scale, β, β′)` such that the barrier is `2·arctan(sign·r/β)`.
    fn scale(&self, t: f64) -> Result<(f64, f64, f64)> {
        match self.kind {
            BarrierKind::Super | BarrierKind::Sub => {
                let beta = self.c * (-self.b * t).exp();
                let sign = if self.kind == BarrierKind::Super { 1.0 } else { -1.0 };
                Ok((sign, beta, -self.b * beta))
            }
            BarrierKind::Eta => {
                let clock = BetaClock::new(self.beta0)?;
                Ok((1.0, clock.beta(t)?, clock.beta_prime(t)?))
            }
        }
    }

    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        let (sign, beta, _) = self.scale(t)?;
        Ok(2.0 * (sign * r / beta).atan())
    }

    /// `∂_r` of the barrier at `r = 0`: `±2/β(t)`.
    pub fn origin_slope(&self, t: f64) -> Result<f64> {
        let (sign, beta, _) = self.scale(t)?;
        Ok(sign * 2.0 / beta)
    }

    /// Residual of the angle operator on the barrier, from its closed form.
    pub fn residual(&self, coeffs: &LeslieCoefficients, r: f64, t: f64) -> Result<f64> {
        let (sign, beta, beta_prime) = self.scale(t)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let (l1, l2) = (coeffs.lambda1(), coeffs.lambda2());
        // cos is even, so the sign of the profile only flips the prefactor
        let cos_phi = (beta * beta - r * r) / (beta * beta + r * r);
        let prefactor = 2.0 * r / (beta * beta + r * r);
        Ok(sign * prefactor * (l1 * beta - l1 * beta_prime + 3.0 * l2 * beta * cos_phi))
    }
}

/// `λ₁/(λ₁ + 3|λ₂|)`
pub fn eta_scale_bound(coeffs: &LeslieCoefficients) -> Result<f64> {
    let l1 = coeffs.lambda1();
    if !(l1 > 0.0) {
        return Err(Error::InvalidParameter("lambda1 must be > 0".into()));
    }
    Ok(l1 / (l1 + 3.0 * coeffs.lambda2().abs()))
}

/// Upper bound `2rβ^{2/3}/(β²+r²) · (−λ₁ + (λ₁ + 3|λ₂|)β^{1/3})` that the eta
/// family would satisfy if its time derivative entered with the opposite sign.
/// Non-positive whenever the scale constraint holds.
pub fn eta_reversed_time_bound(beta: f64, coeffs: &LeslieCoefficients, r: f64) -> f64 {
    let (l1, l2) = (coeffs.lambda1(), coeffs.lambda2());
    2.0 * r * beta.powf(2.0 / 3.0) / (beta * beta + r * r)
        * (-l1 + (l1 + 3.0 * l2.abs()) * beta.cbrt())
}

/// Bisects for the largest `c` such that
/// `2·arctan(r/c) ≥ φ₀(r)` at every node, then halved for margin.
///
/// Fails when `max φ₀ ≥ π`, where no supersolution bubble can lie above the data.
pub fn fit_supersolution_scale(nodes: &[f64], phi0: &[f64]) -> Result<f64> {
    let max = phi0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max < std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "initial data reaches {max} >= pi; no supersolution scale exists"
        )));
    }
    let above = |c: f64| nodes.iter().zip(phi0).all(|(&r, &p)| 2.0 * (r / c).atan() >= p);
    let (mut lo, mut hi) = (1e-12, 1e3);
    if !above(lo) {
        return Err(Error::InvalidParameter("initial data above every supersolution".into()));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Worst signed violation: `φ − super` for the upper bound, `sub − φ` for the lower.
    /// Positive values are violations.
    pub worst: f64,
    pub r: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub passed: bool,
    pub tolerance: f64,
    pub snapshots_checked: usize,
    pub lower: Option<Violation>,
    pub upper: Option<Violation>,
}

/// Scans every stored snapshot of `trace` and reports the worst violation of
/// `sub ≤ φ ≤ super`. Snapshots at or beyond an eta barrier's collapse time are skipped.
pub fn check_ordering(
    sub: Option<&BarrierSpec>,
    trace: &Trace,
    sup: Option<&BarrierSpec>,
) -> Result<OrderingReport> {
    let grid = *trace.grid();
    let tolerance = 10.0 * (grid.dr() * grid.dr() + trace.params.dt);
    let nodes = grid.nodes();
    let n = grid.n_cells();

    let alive = |b: &BarrierSpec, t: f64| b.clock().map_or(true, |c| t < c.t0());

    // initial data and boundary values over time
    for (k, snap) in trace.snapshots.iter().enumerate() {
        let idx: Vec<usize> = if k == 0 { (0..=n).collect() } else { vec![0, n] };
        for &i in &idx {
            let (r, p) = (nodes[i], snap.phi()[i]);
            if let Some(b) = sub.filter(|b| alive(b, snap.t())) {
                let v = b.eval(r, snap.t())?;
                if v - p > tolerance {
                    return Err(Error::OrderingPrecondition(format!(
                        "sub {v} > phi {p} at r = {r}, t = {}",
                        snap.t()
                    )));
                }
            }
            if let Some(b) = sup.filter(|b| alive(b, snap.t())) {
                let v = b.eval(r, snap.t())?;
                if p - v > tolerance {
                    return Err(Error::OrderingPrecondition(format!(
                        "phi {p} > super {v} at r = {r}, t = {}",
                        snap.t()
                    )));
                }
            }
        }
    }

    let mut lower: Option<Violation> = None;
    let mut upper: Option<Violation> = None;
    let mut checked = 0;
    let worse = |slot: &mut Option<Violation>, v: Violation| {
        if slot.map_or(true, |w| v.worst > w.worst) {
            *slot = Some(v);
        }
    };
    for snap in &trace.snapshots {
        let t = snap.t();
        let mut used = false;
        if let Some(b) = sub.filter(|b| alive(b, t)) {
            used = true;
            for (&r, &p) in nodes.iter().zip(snap.phi()) {
                worse(&mut lower, Violation { worst: b.eval(r, t)? - p, r, t });
            }
        }
        if let Some(b) = sup.filter(|b| alive(b, t)) {
            used = true;
            for (&r, &p) in nodes.iter().zip(snap.phi()) {
                worse(&mut upper, Violation { worst: p - b.eval(r, t)?, r, t });
            }
        }
        if used {
            checked += 1;
        }
    }
    let ok = |v: &Option<Violation>| v.map_or(true, |v| v.worst <= tolerance);
    Ok(OrderingReport {
        passed: ok(&lower) && ok(&upper),
        tolerance,
        snapshots_checked: checked,
        lower,
        upper,
    })
}
