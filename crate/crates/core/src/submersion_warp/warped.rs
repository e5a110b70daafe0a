//! The two warped products of an almost Hermitian manifold with a line.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::hermitian::AlmostHermitianStructure;
use crate::almost_contact::AlmostContactStructure;
use crate::chart_geometry::{Chart, Domain, FdConfig, TensorField};
use crate::error::{Error, Result};

/// Half-width of the line factor's box; samples stay within half of it.
const LINE_HALF: f64 = 2.0;

/// Points at which a warp must be positive before a product is built.
const WARP_GATE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// M̂ ×_f ℝ with f on the base, ξ = f⁻¹∂_t.
    BaseTimesLine,
    /// ℝ ×_f M̌ with f = f(t), ξ = ∂_t.
    LineTimesFiber,
}

#[derive(Debug, Clone)]
pub struct WarpedProductSpec {
    pub orientation: Orientation,
    pub base_or_fiber: AlmostHermitianStructure,
    /// Scalar field on the base chart, or on the 1-dimensional t-line.
    pub warp: TensorField,
}

impl WarpedProductSpec {
    pub fn build(&self) -> Result<AlmostContactStructure> {
        match self.orientation {
            Orientation::BaseTimesLine => build_warped_base_times_line(&self.base_or_fiber, &self.warp),
            Orientation::LineTimesFiber => build_warped_line_times_fiber(&self.base_or_fiber, &self.warp),
        }
    }

    /// Chart coordinates of M → coordinates on the Hermitian factor.
    pub fn factor_point(&self, p: &[f64]) -> Vec<f64> {
        match self.orientation {
            Orientation::BaseTimesLine => p[..p.len() - 1].to_vec(),
            Orientation::LineTimesFiber => p[1..].to_vec(),
        }
    }

    /// Coordinates on which the warp depends.
    pub fn warp_point(&self, p: &[f64]) -> Vec<f64> {
        match self.orientation {
            Orientation::BaseTimesLine => p[..p.len() - 1].to_vec(),
            Orientation::LineTimesFiber => vec![p[0]],
        }
    }
}

fn check_warp(warp: &TensorField, points: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    for p in points {
        let value = warp.eval_scalar(&p);
        if !(value > 0.0) {
            return Err(Error::NonPositiveWarp { point: p, value });
        }
    }
    Ok(())
}

fn corners(lower: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    let d = lower.len();
    (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] }).collect())
        .collect()
}

/// g = ĝ ⊕ f²dt², ξ = f⁻¹∂_t, η = f dt, φ = Ĵ on TM̂. Coordinates (base…, t).
pub fn build_warped_base_times_line(base: &AlmostHermitianStructure, f: &TensorField) -> Result<AlmostContactStructure> {
    let m = base.dim();
    let n = m + 1;
    let bd = base.chart().domain();
    let gate_fd = FdConfig::default();
    let mut gate = base.chart().sample_points(WARP_GATE_POINTS, 0x3a2f, &gate_fd);
    gate.extend(corners(bd.sample_lower(), bd.sample_upper()));
    check_warp(f, gate)?;

    let mut lower = bd.lower().to_vec();
    let mut upper = bd.upper().to_vec();
    let mut s_lower = bd.sample_lower().to_vec();
    let mut s_upper = bd.sample_upper().to_vec();
    lower.push(-LINE_HALF);
    upper.push(LINE_HALF);
    s_lower.push(-LINE_HALF / 2.0);
    s_upper.push(LINE_HALF / 2.0);
    let name = format!("{}_x_f_R", base.name());
    let domain = Domain::boxed(lower, upper).with_sample_box(s_lower, s_upper);

    let (bc, fm) = (base.chart().clone(), f.clone());
    let chart = Chart::new(name.clone(), domain, move |p: &[f64]| {
        let mut g = DMatrix::zeros(n, n);
        g.view_mut((0, 0), (m, m)).copy_from(&bc.metric(&p[..m]));
        g[(m, m)] = fm.eval_scalar(&p[..m]).powi(2);
        g
    });
    let fx = f.clone();
    let xi = TensorField::vector(n, move |p| {
        let mut v = DVector::zeros(n);
        v[m] = 1.0 / fx.eval_scalar(&p[..m]);
        v
    });
    let fe = f.clone();
    let eta = TensorField::covector(n, move |p| {
        let mut v = DVector::zeros(n);
        v[m] = fe.eval_scalar(&p[..m]);
        v
    });
    let j = base.j().clone();
    let phi = TensorField::endomorphism(n, move |p| {
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, 0), (m, m)).copy_from(&j.eval_matrix(&p[..m]));
        out
    });
    Ok(AlmostContactStructure::new(name, chart, xi, eta, phi))
}

/// g = dt² ⊕ f(t)²ǧ, ξ = ∂_t, η = dt, φ = J̌ on TM̌. Coordinates (t, fiber…).
/// `f` is a scalar field on the 1-dimensional t-line.
pub fn build_warped_line_times_fiber(fiber: &AlmostHermitianStructure, f: &TensorField) -> Result<AlmostContactStructure> {
    assert_eq!(f.dim(), 1, "line warp is a function of t alone");
    let m = fiber.dim();
    let n = m + 1;
    let steps = 64;
    check_warp(f, (0..=steps).map(|k| vec![-LINE_HALF + 2.0 * LINE_HALF * k as f64 / steps as f64]))?;

    let fd_ = fiber.chart().domain();
    let mut lower = vec![-LINE_HALF];
    let mut upper = vec![LINE_HALF];
    let mut s_lower = vec![-LINE_HALF / 2.0];
    let mut s_upper = vec![LINE_HALF / 2.0];
    lower.extend_from_slice(fd_.lower());
    upper.extend_from_slice(fd_.upper());
    s_lower.extend_from_slice(fd_.sample_lower());
    s_upper.extend_from_slice(fd_.sample_upper());
    let name = format!("R_x_f_{}", fiber.name());
    let domain = Domain::boxed(lower, upper).with_sample_box(s_lower, s_upper);

    let (fc, fm) = (fiber.chart().clone(), f.clone());
    let chart = Chart::new(name.clone(), domain, move |p: &[f64]| {
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = 1.0;
        let w = fm.eval_scalar(&p[..1]).powi(2);
        g.view_mut((1, 1), (m, m)).copy_from(&(fc.metric(&p[1..]) * w));
        g
    });
    let unit_t = move |_: &[f64]| {
        let mut v = DVector::zeros(n);
        v[0] = 1.0;
        v
    };
    let xi = TensorField::vector(n, unit_t);
    let eta = TensorField::covector(n, unit_t);
    let j = fiber.j().clone();
    let phi = TensorField::endomorphism(n, move |p| {
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((1, 1), (m, m)).copy_from(&j.eval_matrix(&p[1..]));
        out
    });
    Ok(AlmostContactStructure::new(name, chart, xi, eta, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::almost_contact::validate_structure;
    use crate::catalog::hermitian::flat_kahler;

    #[test]
    fn products_pass_the_axioms() {
        let fd = FdConfig::default();
        let f = TensorField::scalar(2, |p| 1.0 + 0.25 * p[0] * p[0]);
        let s = build_warped_base_times_line(&flat_kahler(1.0), &f).unwrap();
        validate_structure(&s, &s.chart().sample_points(8, 1, &fd), &fd).unwrap();
        let f = TensorField::scalar(1, |p| p[0].exp());
        let s = build_warped_line_times_fiber(&flat_kahler(1.0), &f).unwrap();
        validate_structure(&s, &s.chart().sample_points(8, 1, &fd), &fd).unwrap();
    }

    #[test]
    fn non_positive_warp_is_rejected() {
        let f = TensorField::scalar(2, |p| p[0]);
        assert!(matches!(
            build_warped_base_times_line(&flat_kahler(1.0), &f),
            Err(Error::NonPositiveWarp { .. })
        ));
        let f = TensorField::scalar(1, |p| 1.0 - p[0]);
        assert!(matches!(
            build_warped_line_times_fiber(&flat_kahler(1.0), &f),
            Err(Error::NonPositiveWarp { .. })
        ));
    }
}
