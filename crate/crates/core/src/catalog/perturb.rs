//! Seeded, compactly supported perturbations used as negative controls.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::almost_contact::AlmostContactStructure;
use crate::chart_geometry::{Domain, TensorField};
use crate::error::{Error, Result};

/// Exclusive upper bound on ε.
pub const EPSILON_MAX: f64 = 0.1;

#[derive(Debug, Clone)]
struct Rotation {
    direction: DVector<f64>,
    wave: DVector<f64>,
    phase: f64,
    center: Vec<f64>,
    radius: Vec<f64>,
    epsilon: f64,
}

impl Rotation {
    fn new(domain: &Domain, epsilon: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = domain.lower().len();
        let mut draw = |n: usize| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let direction = draw(n);
        let wave = draw(n);
        let phase = std::f64::consts::PI * rng.random_range(-1.0..1.0);
        let center = domain.sample_lower().iter().zip(domain.sample_upper()).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = domain.lower().iter().zip(domain.upper()).map(|(a, b)| 0.5 * (b - a)).collect();
        Rotation { direction, wave, phase, center, radius, epsilon }
    }

    /// Smooth, supported in the box |p_i − c_i| < r_i, equal to 1 at c.
    fn bump(&self, p: &[f64]) -> f64 {
        let mut b = 1.0;
        for ((x, c), r) in p.iter().zip(&self.center).zip(&self.radius) {
            let u = (x - c) / r;
            if u.abs() >= 1.0 {
                return 0.0;
            }
            b *= (1.0 - 1.0 / (1.0 - u * u)).exp();
        }
        b
    }

    fn angle(&self, p: &[f64]) -> f64 {
        let x = DVector::from_column_slice(p);
        self.epsilon * self.bump(p) * (1.0 + 0.5 * (self.wave.dot(&x) + self.phase).sin())
    }

    /// exp(±αK) for the g-skew K X = g(F,X)ξ − g(ξ,X)F with F = P·direction.
    /// K rotates span{ξ, F} at rate |F|, so the exponential has a closed form.
    fn matrices(&self, s: &AlmostContactStructure, p: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let alg = s.algebra(p);
        let n = alg.dim();
        let f = &alg.proj * &self.direction;
        let gf = &alg.g * &f;
        let k = &alg.xi * gf.transpose() - &f * alg.eta.transpose();
        let k2 = &k * &k;
        let alpha = self.angle(p);
        let r = f.dot(&gf).max(0.0).sqrt();
        let x = alpha * r;
        let (a, b) = if x.abs() < 1e-4 {
            (alpha * (1.0 - x * x / 6.0), 0.5 * alpha * alpha * (1.0 - x * x / 12.0))
        } else {
            (x.sin() / r, (1.0 - x.cos()) / (r * r))
        };
        let id = DMatrix::identity(n, n);
        (&id + &k * a + &k2 * b, &id - &k * a + &k2 * b)
    }
}

/// Conjugates the structure by a g-orthogonal field of rotations in the plane
/// of ξ and a seeded 𝒟-direction. The metric is unchanged, so the result is
/// again an almost contact metric structure, but with a tilted Reeb field.
/// ε = 0 returns the input unchanged.
pub fn perturb(s: &AlmostContactStructure, epsilon: f64, seed: u64) -> Result<AlmostContactStructure> {
    if epsilon == 0.0 {
        return Ok(s.clone());
    }
    if !(epsilon > 0.0 && epsilon < EPSILON_MAX) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let n = s.dim();
    let rot = Rotation::new(s.chart().domain(), epsilon, seed);
    let name = format!("{}+perturb(eps={epsilon},seed={seed})", s.name());
    let (s1, r1) = (s.clone(), rot.clone());
    let xi = TensorField::vector(n, move |p| {
        let (q, _) = r1.matrices(&s1, p);
        q * s1.xi().eval_vector(p)
    });
    let (s2, r2) = (s.clone(), rot.clone());
    let eta = TensorField::covector(n, move |p| {
        let (q, _) = r2.matrices(&s2, p);
        s2.chart().metric(p) * q * s2.xi().eval_vector(p)
    });
    let (s3, r3) = (s.clone(), rot);
    let phi = TensorField::endomorphism(n, move |p| {
        let (q, qinv) = r3.matrices(&s3, p);
        q * s3.phi().eval_matrix(p) * qinv
    });
    Ok(AlmostContactStructure::new(name, s.chart().clone(), xi, eta, phi))
}
