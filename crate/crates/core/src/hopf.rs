//! Hopf-map initial data on `S³` and on the unit ball.
//!
//! `S³ ⊂ ℂ²` is embedded in `ℝ⁴` as `(Re z, Im z, Re w, Im w)`. The projection
//! pole is `e = (1, 0)`, so `H(e) = (1, 0, 0)` and the antipode `−e` projects
//! to the origin of `ℝ³`.
//!
//! The Hopf map is taken in the conjugate form `H(z, w) = (|z|² − |w|², 2 z w̄)`,
//! which lands on `S²`; the unconjugated product does not. Both readings are
//! Hopf fibrations with the same energy density.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `|z|² + |w|² = 1`.
pub const UNIT_TOL: f64 = 1e-12;
/// Distance to the pole below which a point is treated as the pole.
pub const POLE_TOL: f64 = 1e-14;
/// Coordinate step of the tangential central differences.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S3Point {
    z: Complex64,
    w: Complex64,
}

impl S3Point {
    pub fn new(z: Complex64, w: Complex64) -> Result<Self> {
        let norm = z.norm_sqr() + w.norm_sqr();
        if !norm.is_finite() {
            return Err(Error::NonFinite("S3 point"));
        }
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!("|z|^2 + |w|^2 = {norm}, expected 1")));
        }
        Ok(Self { z, w })
    }

    /// The projection pole `e = (1, 0)`.
    pub fn pole() -> Self {
        Self { z: Complex64::new(1.0, 0.0), w: Complex64::new(0.0, 0.0) }
    }

    pub fn antipode() -> Self {
        Self { z: Complex64::new(-1.0, 0.0), w: Complex64::new(0.0, 0.0) }
    }

    /// `z = cos η e^{iξ₁}`, `w = sin η e^{iξ₂}`.
    pub fn from_hopf_coords(eta: f64, xi1: f64, xi2: f64) -> Self {
        let (s, c) = eta.sin_cos();
        Self { z: Complex64::from_polar(c, xi1), w: Complex64::from_polar(s, xi2) }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn to_r4(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn distance(&self, other: &S3Point) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }
}

/// `(|z|² − |w|², 2 z w̄)` as a vector in `ℝ × ℂ ≅ ℝ³`.
pub fn hopf(p: &S3Point) -> [f64; 3] {
    let zw = 2.0 * p.z * p.w.conj();
    [p.z.norm_sqr() - p.w.norm_sqr(), zw.re, zw.im]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationParam(f64);

impl DilationParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        Ok(Self(lambda))
    }

    pub fn lambda(&self) -> f64 {
        self.0
    }
}

/// Stereographic projection from the pole: `(x₂, x₃, x₄)/(1 − x₁)`.
pub fn stereographic(p: &S3Point) -> Result<[f64; 3]> {
    if p.distance(&S3Point::pole()) <= POLE_TOL {
        return Err(Error::PoleProjection);
    }
    let [x1, x2, x3, x4] = p.to_r4();
    let d = 1.0 - x1;
    Ok([x2 / d, x3 / d, x4 / d])
}

pub fn inverse_stereographic(y: [f64; 3]) -> S3Point {
    let s = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let k = 2.0 / (s + 1.0);
    S3Point {
        z: Complex64::new((s - 1.0) / (s + 1.0), k * y[0]),
        w: Complex64::new(k * y[1], k * y[2]),
    }
}

/// `Ψ_λ = Π⁻¹ ∘ D_λ ∘ Π`; undefined at the pole.
pub fn psi_lambda(p: &S3Point, d: DilationParam) -> Result<S3Point> {
    let y = stereographic(p)?;
    let l = d.lambda();
    Ok(inverse_stereographic([l * y[0], l * y[1], l * y[2]]))
}

/// [`psi_lambda`] continued to the pole, which is a fixed point.
pub fn psi_lambda_extended(p: &S3Point, d: DilationParam) -> S3Point {
    psi_lambda(p, d).unwrap_or_else(|_| S3Point::pole())
}

/// Ball-to-sphere map `x ↦ (−cos(π|x|), sin(π|x|) x/|x|)`, sending the centre to
/// `−e` and the unit sphere (and anything outside) to `e`.
pub fn ball_map(x: [f64; 3]) -> S3Point {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r >= 1.0 {
        return S3Point::pole();
    }
    if r == 0.0 {
        return S3Point::antipode();
    }
    let (s, c) = (std::f64::consts::PI * r).sin_cos();
    let k = s / r;
    S3Point { z: Complex64::new(-c, k * x[0]), w: Complex64::new(k * x[1], k * x[2]) }
}

/// Divergence-free swirl `(1 − |x|²)² (−x₂, x₁, 0)`, vanishing on the unit sphere.
pub fn swirl_velocity(x: [f64; 3]) -> [f64; 3] {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let f = if r2 < 1.0 { (1.0 - r2).powi(2) } else { 0.0 };
    [-f * x[1], f * x[0], 0.0]
}

/// The director `H ∘ Ψ_λ ∘ Φ` at `x`.
pub fn initial_director(x: [f64; 3], d: DilationParam) -> [f64; 3] {
    hopf(&psi_lambda_extended(&ball_map(x), d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub lambda: f64,
    pub mesh: usize,
    pub energy: f64,
    /// `λ > mesh/8`: the `1/λ` length scale is under-resolved.
    pub underresolved: bool,
}

fn check_mesh(mesh: usize) -> Result<()> {
    if mesh < 16 {
        return Err(Error::InvalidParameter(format!("mesh must be >= 16, got {mesh}")));
    }
    Ok(())
}

fn diff_sq(f: impl Fn(f64) -> [f64; 3], x: f64) -> f64 {
    let (a, b) = (f(x + FD_STEP), f(x - FD_STEP));
    let h2 = 2.0 * FD_STEP;
    (0..3).map(|k| ((a[k] - b[k]) / h2).powi(2)).sum()
}

/// `∫_{S³} |∇(H ∘ Ψ_λ)|² dσ` by midpoint quadrature in Hopf coordinates
/// (`mesh` cells in `η`, `4·mesh` in each of `ξ₁, ξ₂`) with central differences.
pub fn dirichlet_energy_s3(lambda: f64, mesh: usize) -> Result<EnergyEstimate> {
    let d = DilationParam::new(lambda)?;
    check_mesh(mesh)?;
    let n_eta = mesh;
    let n_xi = 4 * mesh;
    let d_eta = std::f64::consts::FRAC_PI_2 / n_eta as f64;
    let d_xi = std::f64::consts::TAU / n_xi as f64;
    let f = |eta: f64, xi1: f64, xi2: f64| hopf(&psi_lambda_extended(&S3Point::from_hopf_coords(eta, xi1, xi2), d));

    // Row sums are reduced in index order so the result is independent of the thread count.
    let rows: Vec<f64> = (0..n_eta * n_xi)
        .into_par_iter()
        .map(|row| {
            let (i, j) = (row / n_xi, row % n_xi);
            let eta = (i as f64 + 0.5) * d_eta;
            let xi1 = (j as f64 + 0.5) * d_xi;
            let (s, c) = eta.sin_cos();
            let mut acc = 0.0;
            for k in 0..n_xi {
                let xi2 = (k as f64 + 0.5) * d_xi;
                let density = diff_sq(|e| f(e, xi1, xi2), eta)
                    + diff_sq(|x| f(eta, x, xi2), xi1) / (c * c)
                    + diff_sq(|x| f(eta, xi1, x), xi2) / (s * s);
                acc += density;
            }
            acc * s * c
        })
        .collect();
    let energy = rows.iter().sum::<f64>() * d_eta * d_xi * d_xi;
    Ok(EnergyEstimate { lambda, mesh, energy, underresolved: lambda > mesh as f64 / 8.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDataEnergy {
    pub lambda: f64,
    pub mesh: usize,
    /// `½∫|u|²` with `u` scaled by `λ⁻¹` when requested.
    pub kinetic: f64,
    /// `½∫|∇(H ∘ Ψ_λ ∘ Φ)|²`
    pub director: f64,
    pub total: f64,
    pub underresolved: bool,
}

/// `½∫_{B₁}(|λ⁻¹u|² + |∇(H ∘ Ψ_λ ∘ Φ)|²)` by midpoint quadrature in spherical
/// coordinates (`mesh` cells in radius and polar angle, `2·mesh` in azimuth).
/// With `scale_u = false` the velocity enters unscaled.
pub fn initial_data_energy(lambda: f64, scale_u: bool, mesh: usize) -> Result<InitialDataEnergy> {
    let d = DilationParam::new(lambda)?;
    check_mesh(mesh)?;
    let (n_r, n_th, n_ph) = (mesh, mesh, 2 * mesh);
    let dr = 1.0 / n_r as f64;
    let dth = std::f64::consts::PI / n_th as f64;
    let dph = std::f64::consts::TAU / n_ph as f64;
    let u_factor = if scale_u { 1.0 / lambda } else { 1.0 };
    let cart = |r: f64, th: f64, ph: f64| {
        let (st, ct) = th.sin_cos();
        let (sp, cp) = ph.sin_cos();
        [r * st * cp, r * st * sp, r * ct]
    };
    let f = |r: f64, th: f64, ph: f64| initial_director(cart(r, th, ph), d);

    let rows: Vec<(f64, f64)> = (0..n_r * n_th)
        .into_par_iter()
        .map(|row| {
            let (i, j) = (row / n_th, row % n_th);
            let r = (i as f64 + 0.5) * dr;
            let th = (j as f64 + 0.5) * dth;
            let st = th.sin();
            let weight = r * r * st;
            let (mut kin, mut dir) = (0.0, 0.0);
            for k in 0..n_ph {
                let ph = (k as f64 + 0.5) * dph;
                let u = swirl_velocity(cart(r, th, ph));
                kin += (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) * u_factor * u_factor;
                dir += diff_sq(|x| f(x, th, ph), r)
                    + diff_sq(|x| f(r, x, ph), th) / (r * r)
                    + diff_sq(|x| f(r, th, x), ph) / (r * r * st * st);
            }
            (kin * weight, dir * weight)
        })
        .collect();
    let cell = dr * dth * dph;
    let kinetic = 0.5 * cell * rows.iter().map(|r| r.0).sum::<f64>();
    let director = 0.5 * cell * rows.iter().map(|r| r.1).sum::<f64>();
    Ok(InitialDataEnergy {
        lambda,
        mesh,
        kinetic,
        director,
        total: kinetic + director,
        underresolved: lambda > mesh as f64 / 8.0,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    // 16π², the Dirichlet energy of the Hopf map on the unit 3-sphere.
    const HOPF_ENERGY: f64 = 157.91367041742973;
    // Radial reduction of the ball energies, integrated with 30-digit quadrature.
    const BALL_DIRECTOR_1: f64 = 71.87743047301191;
    const BALL_DIRECTOR_8: f64 = 11.367838369038501;
    const BALL_KINETIC_1: f64 = 0.03570863444639747;

    fn random_point(rng: &mut ChaCha8Rng) -> S3Point {
        loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-3 && n <= 1.0 {
                return S3Point::new(Complex64::new(v[0] / n, v[1] / n), Complex64::new(v[2] / n, v[3] / n))
                    .unwrap();
            }
        }
    }

    fn norm3(v: [f64; 3]) -> f64 {
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    #[test]
    fn hopf_examples() {
        assert_eq!(hopf(&S3Point::pole()), [1.0, 0.0, 0.0]);
        let p = S3Point::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(hopf(&p), [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_off_sphere_points() {
        assert!(S3Point::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        assert!(S3Point::new(Complex64::new(f64::NAN, 0.0), Complex64::new(0.0, 0.0)).is_err());
        assert!(DilationParam::new(0.0).is_err());
        assert!(DilationParam::new(-2.0).is_err());
    }

    #[test]
    fn hopf_lands_on_the_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let p = random_point(&mut rng);
            assert!((norm3(hopf(&p)) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn psi_identity_and_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let one = DilationParam::new(1.0).unwrap();
        for _ in 0..2000 {
            let p = random_point(&mut rng);
            assert!(psi_lambda(&p, one).unwrap().distance(&p) <= 1e-12);
            let l = rng.gen_range(0.05..20.0);
            let q = psi_lambda(&p, DilationParam::new(l).unwrap()).unwrap();
            assert!((q.norm_sqr() - 1.0).abs() <= 1e-12);
            let back = psi_lambda(&q, DilationParam::new(1.0 / l).unwrap()).unwrap();
            assert!(back.distance(&p) <= 1e-10, "{l}");
        }
    }

    #[test]
    fn pole_and_antipode() {
        let d = DilationParam::new(5.0).unwrap();
        assert_eq!(psi_lambda(&S3Point::pole(), d), Err(Error::PoleProjection));
        assert_eq!(psi_lambda_extended(&S3Point::pole(), d), S3Point::pole());
        for &l in &[0.1, 1.0, 3.0, 1e3] {
            let q = psi_lambda(&S3Point::antipode(), DilationParam::new(l).unwrap()).unwrap();
            assert_eq!(q, S3Point::antipode());
        }
    }

    #[test]
    fn ball_map_boundary_and_centre() {
        assert_eq!(ball_map([0.0; 3]), S3Point::antipode());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = norm3(v);
            let on_sphere = [v[0] / n, v[1] / n, v[2] / n];
            let l = rng.gen_range(0.5..16.0);
            let d = DilationParam::new(l).unwrap();
            let boundary = initial_director(on_sphere, d);
            let e = hopf(&S3Point::pole());
            assert!((0..3).all(|k| (boundary[k] - e[k]).abs() < 1e-12), "{boundary:?}");
            let inner = [0.9 * v[0], 0.9 * v[1], 0.9 * v[2]];
            assert!((norm3(initial_director(inner, d)) - 1.0).abs() <= 1e-12);
            assert!((ball_map(inner).norm_sqr() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn swirl_is_divergence_free() {
        let h = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.55..0.55));
            let mut div = 0.0;
            for k in 0..3 {
                let (mut a, mut b) = (x, x);
                a[k] += h;
                b[k] -= h;
                div += (swirl_velocity(a)[k] - swirl_velocity(b)[k]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-8);
        }
        assert_eq!(swirl_velocity([0.6, 0.8, 0.0]), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn s3_energy_matches_oracle() {
        let e1 = dirichlet_energy_s3(1.0, 32).unwrap();
        assert!((e1.energy - HOPF_ENERGY).abs() <= 0.02 * HOPF_ENERGY, "{e1:?}");
        assert!(!e1.underresolved);
        let e2 = dirichlet_energy_s3(2.0, 32).unwrap();
        let exact2 = 128.0 * PI * PI / 9.0;
        assert!((e2.energy - exact2).abs() <= 0.02 * exact2, "{e2:?}");
        assert!(dirichlet_energy_s3(8.0, 16).unwrap().underresolved);
        assert!(dirichlet_energy_s3(1.0, 8).is_err());
    }

    #[test]
    fn s3_energy_converges_under_refinement() {
        let e: Vec<f64> = [16, 32, 64].iter().map(|&m| dirichlet_energy_s3(2.0, m).unwrap().energy).collect();
        let (d1, d2) = ((e[0] - e[1]).abs(), (e[1] - e[2]).abs());
        assert!(d1 >= 3.0 * d2, "{e:?}");
    }

    #[test]
    fn ball_energy_matches_radial_oracle() {
        let e1 = initial_data_energy(1.0, true, 48).unwrap();
        assert!((e1.director - BALL_DIRECTOR_1).abs() <= 0.01 * BALL_DIRECTOR_1, "{e1:?}");
        assert!((e1.kinetic - BALL_KINETIC_1).abs() <= 0.01 * BALL_KINETIC_1, "{e1:?}");
        let e8 = initial_data_energy(8.0, true, 64).unwrap();
        assert!((e8.director - BALL_DIRECTOR_8).abs() <= 0.02 * BALL_DIRECTOR_8, "{e8:?}");
        assert!(e8.total < e1.total);
    }

    #[test]
    fn kinetic_term_scales_inverse_square() {
        let base = initial_data_energy(1.0, true, 16).unwrap().kinetic;
        for &l in &[2.0, 4.0, 8.0] {
            let e = initial_data_energy(l, true, 16).unwrap();
            assert!((e.kinetic - base / (l * l)).abs() <= 1e-12 * base);
            let unscaled = initial_data_energy(l, false, 16).unwrap();
            assert!((unscaled.kinetic - base).abs() <= 1e-12 * base);
        }
    }
}
