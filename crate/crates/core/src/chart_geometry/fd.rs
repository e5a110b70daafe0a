//! Central finite differences and the tolerance classes attached to them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy order of the central-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            other => Err(Error::InvalidFd(format!("order must be 2 or 4, got {other}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }

    /// Number of steps the stencil reaches on each side.
    fn half_width(self) -> f64 {
        match self {
            FdOrder::Second => 1.0,
            FdOrder::Fourth => 2.0,
        }
    }
}

/// Which derivative level an identity lives at; picks its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TolClass {
    Algebraic,
    D1,
    D2,
}

impl TolClass {
    pub fn label(self) -> &'static str {
        match self {
            TolClass::Algebraic => "algebraic",
            TolClass::D1 => "d1",
            TolClass::D2 => "d2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub step: f64,
    pub order: FdOrder,
    pub tol_algebraic: f64,
    pub tol_d1: f64,
    pub tol_d2: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 1e-4,
            order: FdOrder::Second,
            tol_algebraic: 1e-12,
            tol_d1: 1e-7,
            tol_d2: 1e-5,
        }
    }
}

impl FdConfig {
    pub fn new(step: f64, order: FdOrder) -> Result<Self> {
        FdConfig {
            step,
            order,
            ..FdConfig::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidFd(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        let tols = [self.tol_algebraic, self.tol_d1, self.tol_d2];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidFd("tolerances must be positive".into()));
        }
        if !(self.tol_algebraic <= self.tol_d1 && self.tol_d1 <= self.tol_d2) {
            return Err(Error::InvalidFd(
                "tolerances must be ordered algebraic <= d1 <= d2".into(),
            ));
        }
        Ok(self)
    }

    pub fn with_step(self, step: f64) -> Result<Self> {
        FdConfig { step, ..self }.validated()
    }

    pub fn with_order(self, order: FdOrder) -> Self {
        FdConfig { order, ..self }
    }

    /// Multiplies every tolerance class by `k`.
    pub fn with_tol_scale(self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidFd(format!(
                "tolerance scale must be positive, got {k}"
            )));
        }
        FdConfig {
            tol_algebraic: self.tol_algebraic * k,
            tol_d1: self.tol_d1 * k,
            tol_d2: self.tol_d2 * k,
            ..self
        }
        .validated()
    }

    pub fn tolerance(&self, class: TolClass) -> f64 {
        match class {
            TolClass::Algebraic => self.tol_algebraic,
            TolClass::D1 => self.tol_d1,
            TolClass::D2 => self.tol_d2,
        }
    }

    /// Distance a point must keep from the domain boundary so that nested
    /// stencils (up to four levels deep) stay inside.
    pub fn margin(&self) -> f64 {
        4.0 * self.step * self.order.half_width()
    }
}

/// Central difference of a vector-valued function along coordinate `k`.
pub fn partial<F>(f: F, p: &[f64], k: usize, fd: &FdConfig) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let h = fd.step;
    let mut q = p.to_vec();
    let mut at = |offset: f64| {
        q[k] = p[k] + offset;
        f(&q)
    };
    match fd.order {
        FdOrder::Second => {
            let plus = at(h);
            let minus = at(-h);
            plus.iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        }
        FdOrder::Fourth => {
            let p2 = at(2.0 * h);
            let p1 = at(h);
            let m1 = at(-h);
            let m2 = at(-2.0 * h);
            (0..p1.len())
                .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
                .collect()
        }
    }
}

/// All coordinate partials of `f` at `p`: `out[k]` is ∂_k f.
pub fn jacobian<F>(f: F, p: &[f64], fd: &FdConfig) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    (0..p.len()).map(|k| partial(&f, p, k, fd)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_is_exact_on_quadratics() {
        let fd = FdConfig::default();
        let d = partial(|x| vec![3.0 * x[0] * x[0] + x[0]], &[0.7], 0, &fd);
        assert!((d[0] - (6.0 * 0.7 + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn fourth_order_beats_second_on_sine() {
        let h = 1e-2;
        let second = FdConfig::new(h, FdOrder::Second).unwrap();
        let fourth = FdConfig::new(h, FdOrder::Fourth).unwrap();
        let f = |x: &[f64]| vec![x[0].sin()];
        let exact = 0.3f64.cos();
        let e2 = (partial(f, &[0.3], 0, &second)[0] - exact).abs();
        let e4 = (partial(f, &[0.3], 0, &fourth)[0] - exact).abs();
        assert!(e4 < e2 / 100.0, "e2 = {e2:e}, e4 = {e4:e}");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(FdConfig::new(0.0, FdOrder::Second).is_err());
        assert!(FdOrder::from_int(3).is_err());
        let fd = FdConfig {
            tol_d1: 1e-3,
            ..FdConfig::default()
        };
        assert!(fd.validated().is_err());
        assert!(FdConfig::default().with_tol_scale(-1.0).is_err());
    }
}
