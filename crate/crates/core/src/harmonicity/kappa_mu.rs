//! Least-squares fit of the nullity constants in R(X,Y)ξ = (κ + μh) r(X,Y)ξ.

use serde::{Deserialize, Serialize};

use super::point::PointData;
use crate::almost_contact::bar::r_tensor;
use crate::almost_contact::{contact_metric_defect, AlmostContactStructure};
use crate::chart_geometry::tensor::vector_norm;
use crate::chart_geometry::FdConfig;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Below this ratio Σ|hu|² / Σ|u|² the μ column is treated as absent.
const MU_IDENTIFIABLE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaMuFit {
    pub kappa: f64,
    /// `None` when h vanishes at every sample, so μ has no effect.
    pub mu: Option<f64>,
    /// max |R(X,Y)ξ − κ r(X,Y)ξ − μ h r(X,Y)ξ| over the sampled frame pairs.
    pub residual: f64,
    pub samples: usize,
}

impl KappaMuFit {
    pub fn mu_identifiable(&self) -> bool {
        self.mu.is_some()
    }
}

/// One observation per frame pair: (y, u, v) = (R(X,Y)ξ, r(X,Y)ξ, h r(X,Y)ξ).
type Obs = (nalgebra::DVector<f64>, nalgebra::DVector<f64>, nalgebra::DVector<f64>, nalgebra::DMatrix<f64>);

fn observations(d: &PointData) -> Vec<Obs> {
    let r = d.riemann();
    let g = &d.alg.g;
    let xi = &d.alg.xi;
    let mut out = Vec::new();
    for a in 0..d.frame.len() {
        for b in (a + 1)..d.frame.len() {
            let (x, y) = (&d.frame[a], &d.frame[b]);
            let u = r_tensor(x, y, xi, g);
            let v = d.h() * &u;
            out.push((r.apply(x, y, xi), u, v, g.clone()));
        }
    }
    out
}

pub fn kappa_mu_fit(s: &AlmostContactStructure, points: &[Vec<f64>], fd: &FdConfig) -> Result<KappaMuFit> {
    kappa_mu_fit_with(s, points, fd, Execution::available())
}

pub fn kappa_mu_fit_with(
    s: &AlmostContactStructure,
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<KappaMuFit> {
    for p in points {
        s.chart().check_point(p, fd)?;
        if !(contact_metric_defect(s, p, fd) < fd.tol_d1) {
            return Err(Error::NotContactMetric(s.name().to_string()));
        }
    }
    let obs: Vec<Obs> = exec
        .map(points, |_, p| observations(&PointData::new(s, p, fd)))
        .into_iter()
        .flatten()
        .collect();
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (y, u, v, g) in &obs {
        let ip = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| a.dot(&(g * b));
        suu += ip(u, u);
        suv += ip(u, v);
        svv += ip(v, v);
        suy += ip(u, y);
        svy += ip(v, y);
    }
    let (kappa, mu) = if suu == 0.0 {
        (0.0, None)
    } else if svv < MU_IDENTIFIABLE * suu {
        (suy / suu, None)
    } else {
        let det = suu * svv - suv * suv;
        ((suy * svv - svy * suv) / det, Some((svy * suu - suy * suv) / det))
    };
    let m = mu.unwrap_or(0.0);
    let residual = obs
        .iter()
        .map(|(y, u, v, g)| {
            let e = vector_norm(g, &(y - u * kappa - v * m));
            if e.is_nan() {
                f64::INFINITY
            } else {
                e
            }
        })
        .fold(0.0, f64::max);
    Ok(KappaMuFit { kappa, mu, residual, samples: points.len() })
}
