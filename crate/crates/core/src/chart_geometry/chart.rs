use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fd::FdConfig;
use crate::error::{Error, Result};

pub type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
pub type DomainPredicate = dyn Fn(&[f64]) -> bool + Send + Sync;

/// Coordinate box the chart is valid on, plus the sub-box points are drawn from.
#[derive(Clone)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    sample_lower: Vec<f64>,
    sample_upper: Vec<f64>,
    predicate: Option<Arc<DomainPredicate>>,
}

impl Domain {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Domain {
            sample_lower: lower.clone(),
            sample_upper: upper.clone(),
            lower,
            upper,
            predicate: None,
        }
    }

    /// Restricts sampling to a sub-box; coordinates outside the domain box are clipped.
    pub fn with_sample_box(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.sample_lower = lower
            .iter()
            .zip(&self.lower)
            .map(|(s, d)| s.max(*d))
            .collect();
        self.sample_upper = upper
            .iter()
            .zip(&self.upper)
            .map(|(s, d)| s.min(*d))
            .collect();
        self
    }

    pub fn with_predicate<F>(mut self, predicate: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.predicate = Some(Arc::new(predicate));
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn sample_lower(&self) -> &[f64] {
        &self.sample_lower
    }

    pub fn sample_upper(&self) -> &[f64] {
        &self.sample_upper
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    pub fn contains_with_margin(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x - margin >= *lo && *x + margin <= *hi)
            && self.predicate.as_ref().is_none_or(|pred| pred(p))
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("sample_lower", &self.sample_lower)
            .field("sample_upper", &self.sample_upper)
            .finish()
    }
}

/// A single coordinate chart carrying metric components g_ij.
#[derive(Clone)]
pub struct Chart {
    name: String,
    domain: Domain,
    metric: Arc<MetricFn>,
}

impl Chart {
    pub fn new<F>(name: impl Into<String>, domain: Domain, metric: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Chart {
            name: name.into(),
            domain,
            metric: Arc::new(metric),
        }
    }

    /// Flat chart with g = identity on the given box.
    pub fn euclidean(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let dim = lower.len();
        Chart::new(name, Domain::boxed(lower, upper), move |_| {
            DMatrix::identity(dim, dim)
        })
    }

    /// Sphere of radius r in colatitude/longitude (θ, ϕ), g = r²(dθ² + sin²θ dϕ²),
    /// on θ ∈ [0.2, π − 0.2] away from the coordinate poles. Curvature 1/r².
    pub fn round_sphere(radius: f64) -> Self {
        let r2 = radius * radius;
        let domain = Domain::boxed(vec![0.2, -3.0], vec![std::f64::consts::PI - 0.2, 3.0])
            .with_sample_box(vec![0.4, -2.5], vec![std::f64::consts::PI - 0.4, 2.5]);
        Chart::new("round_sphere", domain, move |p: &[f64]| {
            DMatrix::from_diagonal(&DVector::from_vec(vec![r2, r2 * p[0].sin().powi(2)]))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        (self.metric)(p)
    }

    pub fn metric_fn(&self) -> Arc<MetricFn> {
        Arc::clone(&self.metric)
    }

    /// Errors unless every nested stencil around `p` stays in the domain.
    pub fn check_point(&self, p: &[f64], fd: &FdConfig) -> Result<()> {
        if self.domain.contains_with_margin(p, fd.margin()) {
            Ok(())
        } else {
            Err(Error::DomainViolation {
                point: p.to_vec(),
                margin: fd.margin(),
            })
        }
    }

    /// Seeded uniform points in the sample box, kept `fd.margin()` away from
    /// the domain boundary.
    pub fn sample_points(&self, count: usize, seed: u64, fd: &FdConfig) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let margin = fd.margin();
        let lo: Vec<f64> = self
            .domain
            .sample_lower
            .iter()
            .zip(&self.domain.lower)
            .map(|(s, d)| s.max(d + margin))
            .collect();
        let hi: Vec<f64> = self
            .domain
            .sample_upper
            .iter()
            .zip(&self.domain.upper)
            .map(|(s, d)| s.min(d - margin))
            .collect();
        let mut points = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while points.len() < count && attempts < 1000 * count.max(1) {
            attempts += 1;
            let p: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| if b > a { rng.random_range(*a..*b) } else { *a })
                .collect();
            if self.domain.contains_with_margin(&p, margin) {
                points.push(p);
            }
        }
        points
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("domain", &self.domain)
            .finish()
    }
}

/// g^{ij} via Cholesky; fails when g is not positive-definite.
pub fn metric_inverse(chart: &Chart, p: &[f64]) -> Result<DMatrix<f64>> {
    inverse_of(&chart.metric(p)).ok_or_else(|| Error::SingularMetric { point: p.to_vec() })
}

pub(crate) fn inverse_of(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    g.clone().cholesky().map(|c| c.inverse())
}

/// Inverse without the positivity check, for use inside field closures where
/// the point has already been validated. Falls back to NaNs.
pub(crate) fn metric_inverse_unchecked(chart: &Chart, p: &[f64]) -> DMatrix<f64> {
    let n = chart.dim();
    inverse_of(&chart.metric(p)).unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart_geometry::fd::FdConfig;

    #[test]
    fn flat_inverse_is_identity() {
        let chart = Chart::euclidean("flat", vec![-1.0; 3], vec![1.0; 3]);
        let inv = metric_inverse(&chart, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(inv, DMatrix::identity(3, 3));
    }

    #[test]
    fn indefinite_metric_is_singular() {
        let chart = Chart::new("bad", Domain::boxed(vec![-1.0], vec![1.0]), |_| {
            DMatrix::from_element(1, 1, -1.0)
        });
        assert!(matches!(
            metric_inverse(&chart, &[0.0]),
            Err(Error::SingularMetric { .. })
        ));
    }

    #[test]
    fn sampling_is_seeded_and_respects_margin() {
        let chart = Chart::euclidean("flat", vec![-1.0; 2], vec![1.0; 2]);
        let fd = FdConfig::default();
        let a = chart.sample_points(20, 7, &fd);
        let b = chart.sample_points(20, 7, &fd);
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        for p in &a {
            chart.check_point(p, &fd).unwrap();
        }
        assert!(chart.check_point(&[1.0, 0.0], &fd).is_err());
    }
}
