//! Leslie viscosity coefficients and the Poiseuille coefficient functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance for the Parodi relation `μ₂ + μ₃ = μ₆ − μ₅`.
pub const PARODI_TOL: f64 = 1e-12;

/// The six Leslie viscosities `μ₁ … μ₆`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeslieCoefficients {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub mu5: f64,
    pub mu6: f64,
}

/// A named relation among the Leslie coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// `μ₂ + μ₃ = μ₆ − μ₅`
    Parodi,
    /// `λ₁ = μ₃ − μ₂ > 0`
    Lambda1Positive,
    /// `μ₄ > 0`
    Mu4Positive,
    /// `2μ₁ + 3μ₄ + 2μ₅ + 2μ₆ > 0`
    BulkViscosity,
    /// `2μ₄ + μ₅ + μ₆ > λ₂²/λ₁`
    StretchBound,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Parodi => "mu2 + mu3 = mu6 - mu5",
            Relation::Lambda1Positive => "lambda1 = mu3 - mu2 > 0",
            Relation::Mu4Positive => "mu4 > 0",
            Relation::BulkViscosity => "2 mu1 + 3 mu4 + 2 mu5 + 2 mu6 > 0",
            Relation::StretchBound => "2 mu4 + mu5 + mu6 > lambda2^2 / lambda1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValidationResult {
    Pass,
    Fail(Vec<Relation>),
}

impl ValidationResult {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationResult::Pass)
    }

    pub fn violations(&self) -> &[Relation] {
        match self {
            ValidationResult::Pass => &[],
            ValidationResult::Fail(v) => v,
        }
    }
}

impl LeslieCoefficients {
    pub fn new(mu: [f64; 6]) -> Self {
        let [mu1, mu2, mu3, mu4, mu5, mu6] = mu;
        Self { mu1, mu2, mu3, mu4, mu5, mu6 }
    }

    /// The simplified Poiseuille set `(0, −1, 1, 3, 0, 0)`: `λ₁ = 2`, `λ₂ = 0`, `g ≡ 2`, `h ≡ 1`.
    pub fn simplified() -> Self {
        Self::new([0.0, -1.0, 1.0, 3.0, 0.0, 0.0])
    }

    /// Builds a set satisfying every relation with the requested `λ₁ > 0` and `λ₂`.
    ///
    /// `μ₁ = 0`, `μ₅ = 0`, `μ₆ = λ₂`, `μ₂, μ₃` from `λ₁` and Parodi, and `μ₄`
    /// large enough for the strict inequalities.
    pub fn from_lambdas(lambda1: f64, lambda2: f64) -> Self {
        let mu3 = 0.5 * (lambda1 + lambda2);
        let mu2 = 0.5 * (lambda2 - lambda1);
        let mu6 = lambda2;
        let mu4 = 1.0 + lambda2.abs() + lambda2 * lambda2 / lambda1;
        Self::new([0.0, mu2, mu3, mu4, 0.0, mu6])
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu6]
    }

    pub fn lambda1(&self) -> f64 {
        self.mu3 - self.mu2
    }

    pub fn lambda2(&self) -> f64 {
        self.mu6 - self.mu5
    }

    pub fn validate(&self) -> Result<ValidationResult> {
        validate(self)
    }
}

/// Checks Parodi, compatibility and the empirical inequalities.
///
/// Strict inequalities are compared exactly: equality is a violation.
pub fn validate(c: &LeslieCoefficients) -> Result<ValidationResult> {
    if c.as_array().iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite("Leslie coefficients"));
    }
    let l1 = c.lambda1();
    let l2 = c.lambda2();
    let mut violated = Vec::new();
    if ((c.mu2 + c.mu3) - (c.mu6 - c.mu5)).abs() > PARODI_TOL {
        violated.push(Relation::Parodi);
    }
    if !(l1 > 0.0) {
        violated.push(Relation::Lambda1Positive);
    }
    if !(c.mu4 > 0.0) {
        violated.push(Relation::Mu4Positive);
    }
    if !(2.0 * c.mu1 + 3.0 * c.mu4 + 2.0 * c.mu5 + 2.0 * c.mu6 > 0.0) {
        violated.push(Relation::BulkViscosity);
    }
    // Without λ₁ > 0 the bound is meaningless; report it as violated too.
    if !(l1 > 0.0 && 2.0 * c.mu4 + c.mu5 + c.mu6 > l2 * l2 / l1) {
        violated.push(Relation::StretchBound);
    }
    Ok(if violated.is_empty() {
        ValidationResult::Pass
    } else {
        ValidationResult::Fail(violated)
    })
}

/// `g(φ) = μ₁ sin²φ cos²φ + (μ₅−μ₂)/2 sin²φ + (μ₃+μ₆)/2 cos²φ + μ₄/2`.
///
/// Evaluated with `cos² = 1 − sin²` so that angle-independent coefficient
/// sets give a constant, bit for bit.
pub fn g_coeff(c: &LeslieCoefficients, phi: f64) -> f64 {
    let s2 = phi.sin().powi(2);
    let (a, b) = (0.5 * (c.mu5 - c.mu2), 0.5 * (c.mu3 + c.mu6));
    c.mu1 * s2 * (1.0 - s2) + (a - b) * s2 + (b + 0.5 * c.mu4)
}

/// `h(φ) = μ₃ cos²φ − μ₂ sin²φ = μ₃ − (μ₂ + μ₃) sin²φ`.
pub fn h_coeff(c: &LeslieCoefficients, phi: f64) -> f64 {
    c.mu3 - (c.mu2 + c.mu3) * phi.sin().powi(2)
}

/// Upper bound of `g` over one period, sampled densely.
pub fn g_max(c: &LeslieCoefficients) -> f64 {
    const SAMPLES: usize = 720;
    (0..=SAMPLES)
        .map(|k| g_coeff(c, std::f64::consts::PI * k as f64 / SAMPLES as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn simplified_set_passes() {
        let c = LeslieCoefficients::simplified();
        assert_eq!(c.validate().unwrap(), ValidationResult::Pass);
        assert_eq!(c.lambda1(), 2.0);
        assert_eq!(c.lambda2(), 0.0);
        for k in 0..50 {
            let phi = -3.0 + 0.13 * k as f64;
            assert!((g_coeff(&c, phi) - 2.0).abs() < 1e-15);
            assert!((h_coeff(&c, phi) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coefficients_fail() {
        let c = LeslieCoefficients::new([0.0; 6]);
        let v = c.validate().unwrap();
        assert!(v.violations().contains(&Relation::Lambda1Positive));
        assert!(v.violations().contains(&Relation::Mu4Positive));
        assert!(!v.violations().contains(&Relation::Parodi));
    }

    #[test]
    fn negative_mu4_named() {
        let c = LeslieCoefficients::new([0.0, -1.0, 1.0, -1.0, 0.0, 0.0]);
        let v = c.validate().unwrap();
        assert!(v.violations().contains(&Relation::Mu4Positive));
    }

    #[test]
    fn equality_counts_as_failure() {
        // 2μ₄ + μ₅ + μ₆ == λ₂²/λ₁ exactly
        let c = LeslieCoefficients::new([0.0, 0.0, 1.0, 1.0, -1.0, 0.0]);
        assert_eq!(c.lambda1(), 1.0);
        assert_eq!(c.lambda2(), 1.0);
        let v = c.validate().unwrap();
        assert_eq!(v.violations(), &[Relation::StretchBound]);
    }

    #[test]
    fn parodi_violation_named() {
        let c = LeslieCoefficients::new([0.0, -1.0, 1.0, 3.0, 0.0, 1e-9]);
        let v = c.validate().unwrap();
        assert_eq!(v.violations(), &[Relation::Parodi]);
    }

    #[test]
    fn non_finite_is_an_error() {
        let c = LeslieCoefficients::new([0.0, f64::NAN, 1.0, 3.0, 0.0, 0.0]);
        assert_eq!(c.validate(), Err(Error::NonFinite("Leslie coefficients")));
        let c = LeslieCoefficients::new([f64::INFINITY, -1.0, 1.0, 3.0, 0.0, 0.0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn g_and_h_special_angles() {
        let c = LeslieCoefficients::new([0.3, -0.7, 0.9, 1.1, 0.2, 0.4]);
        assert!((g_coeff(&c, 0.0) - (0.5 * (c.mu3 + c.mu6) + 0.5 * c.mu4)).abs() < 1e-15);
        assert!((g_coeff(&c, FRAC_PI_2) - (0.5 * (c.mu5 - c.mu2) + 0.5 * c.mu4)).abs() < 1e-15);
        assert_eq!(h_coeff(&c, 0.0), c.mu3);
        let l1 = LeslieCoefficients::from_lambdas(1.7, -0.4);
        assert!((h_coeff(&l1, FRAC_PI_4) - 0.85).abs() < 1e-15);
        assert!((g_coeff(&c, PI) - g_coeff(&c, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn from_lambdas_validates() {
        for &(l1, l2) in &[(1.0, 0.0), (1.0, 0.5), (1.0, -0.5), (0.2, 3.0), (5.0, -7.0)] {
            let c = LeslieCoefficients::from_lambdas(l1, l2);
            assert!(c.validate().unwrap().is_pass(), "{l1} {l2}");
            assert!((c.lambda1() - l1).abs() < 1e-15);
            assert!((c.lambda2() - l2).abs() < 1e-15);
        }
    }

    fn validated() -> impl Strategy<Value = LeslieCoefficients> {
        (0.05f64..5.0, -3.0f64..3.0, -2.0f64..2.0, 0.0f64..2.0).prop_map(|(l1, l2, mu1, extra)| {
            let mut c = LeslieCoefficients::from_lambdas(l1, l2);
            c.mu1 = mu1;
            c.mu4 += extra + mu1.abs();
            c
        })
    }

    proptest! {
        #[test]
        fn h_two_forms_agree(c in validated(), phi in -10.0f64..10.0) {
            prop_assume!(c.validate().unwrap().is_pass());
            let alt = 0.5 * (c.lambda1() + c.lambda2() * (2.0 * phi).cos());
            prop_assert!((h_coeff(&c, phi) - alt).abs() <= 1e-12);
        }

        #[test]
        fn g_even_and_pi_periodic(c in validated(), phi in -10.0f64..10.0) {
            let g = g_coeff(&c, phi);
            prop_assert!((g - g_coeff(&c, -phi)).abs() <= 1e-12);
            prop_assert!((g - g_coeff(&c, phi + PI)).abs() <= 1e-12);
        }

        #[test]
        fn parodi_forces_lambda2(mu2 in -3.0f64..0.0, mu3 in 0.0f64..3.0, mu5 in -2.0f64..2.0) {
            let c = LeslieCoefficients::new([0.0, mu2, mu3, 10.0, mu5, mu5 + mu2 + mu3]);
            prop_assert!((c.lambda2() - (c.mu2 + c.mu3)).abs() <= 1e-12);
        }
    }
}
