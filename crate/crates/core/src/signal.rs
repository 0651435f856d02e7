//! Uniform time grids, sampled complex envelopes and the quadrature/interpolation
//! that everything else is built on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::composite_weights;

/// Uniform grid `t(i) = t0 + i*dt` for `i in 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidInput(format!("grid needs finite t0 and dt > 0 (t0={t0}, dt={dt})")));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 samples, got {n}")));
        }
        Ok(Self { t0, dt, n })
    }

    /// Smallest grid covering `[lo, hi]` whose step does not exceed `dt_max`.
    /// The sample count is forced odd so Simpson's rule applies cleanly.
    pub fn spanning(lo: f64, hi: f64, dt_max: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
        }
        if !(dt_max > 0.0) {
            return Err(Error::InvalidInput(format!("dt_max must be positive, got {dt_max}")));
        }
        let mut intervals = ((hi - lo) / dt_max).ceil() as usize;
        intervals = intervals.max(2);
        if intervals % 2 == 1 {
            intervals += 1;
        }
        Self::new(lo, (hi - lo) / intervals as f64, intervals + 1)
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.t(self.n - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.t(i)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.end()
    }

    /// Same grid (up to floating-point noise in the parameters).
    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.n == other.n
            && (self.t0 - other.t0).abs() <= 1e-12 * (1.0 + self.t0.abs())
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
    }
}

/// Complex envelope sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
}

impl ComplexSignal {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "signal has {} samples but grid has {}",
                values.len(),
                grid.n
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at t = {}", grid.t(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.n] }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, (0..grid.n).map(|i| f(grid.t(i))).collect())
    }

    pub fn from_real_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn from_real(grid: TimeGrid, re: &[f64]) -> Result<Self> {
        Self::new(grid, re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.grid.t(i), v)).collect();
        Self { grid: self.grid, values }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn add(&self, other: &ComplexSignal) -> Result<Self> {
        check_grids(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Cubic Hermite interpolation at an arbitrary time; zero outside the window.
    pub fn at(&self, t: f64) -> Complex64 {
        let g = &self.grid;
        if !(t >= g.t0) || t > g.end() {
            return Complex64::new(0.0, 0.0);
        }
        let u = (t - g.t0) / g.dt;
        let nearest = u.round();
        if (u - nearest).abs() < 1e-9 {
            return self.values[(nearest as usize).min(g.n - 1)];
        }
        let i = (u.floor() as usize).min(g.n - 2);
        let s = u - i as f64;
        let v = &self.values;
        let (p0, p1) = (v[i], v[i + 1]);
        let (m0, m1) = (slope(v, i), slope(v, i + 1));
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        p0 * h00 + m0 * h10 + p1 * h01 + m1 * h11
    }

    /// Derivative by fourth-order central differences (lower order at the edges).
    pub fn derivative(&self) -> Self {
        let h = self.grid.dt;
        let values = (0..self.len()).map(|i| slope(&self.values, i) / h).collect();
        Self { grid: self.grid, values }
    }

    /// Value at the sample nearest `t` (no interpolation).
    pub fn nearest(&self, t: f64) -> Complex64 {
        let u = ((t - self.grid.t0) / self.grid.dt).round();
        if u < 0.0 || u as usize >= self.grid.n {
            return Complex64::new(0.0, 0.0);
        }
        self.values[u as usize]
    }
}

/// Slope per unit index (i.e. derivative times dt) at sample `i`.
fn slope(v: &[Complex64], i: usize) -> Complex64 {
    let n = v.len();
    if n < 3 {
        return v[1] - v[0];
    }
    if i >= 2 && i + 2 < n {
        (v[i - 2] - v[i - 1] * 8.0 + v[i + 1] * 8.0 - v[i + 2]) / 12.0
    } else if i >= 1 && i + 1 < n {
        (v[i + 1] - v[i - 1]) * 0.5
    } else if i == 0 {
        (v[0] * -3.0 + v[1] * 4.0 - v[2]) * 0.5
    } else {
        (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * 0.5
    }
}

fn check_grids(a: &ComplexSignal, b: &ComplexSignal) -> Result<()> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch(format!(
            "t0 {} vs {}, dt {} vs {}, n {} vs {}",
            a.grid.t0, b.grid.t0, a.grid.dt, b.grid.dt, a.grid.n, b.grid.n
        )));
    }
    Ok(())
}

/// `<a|b> = ∫ conj(a) b dt` by the composite rule of [`composite_weights`].
pub fn inner_product(a: &ComplexSignal, b: &ComplexSignal) -> Result<Complex64> {
    check_grids(a, b)?;
    let w = composite_weights(a.grid.n, a.grid.dt);
    Ok(a.values
        .iter()
        .zip(&b.values)
        .zip(&w)
        .map(|((x, y), &wi)| x.conj() * y * wi)
        .sum())
}

pub fn norm_squared(a: &ComplexSignal) -> f64 {
    let w = composite_weights(a.grid.n, a.grid.dt);
    let s: f64 = a.values.iter().zip(&w).map(|(v, &wi)| v.norm_sqr() * wi).sum();
    s.max(0.0)
}

/// Result of [`resample`]; `extrapolated` is set when the target reaches past
/// the source window while the source is still non-negligible at that edge.
#[derive(Debug, Clone)]
pub struct Resampled {
    pub signal: ComplexSignal,
    pub extrapolated: bool,
}

pub fn resample(a: &ComplexSignal, target: TimeGrid) -> Resampled {
    if a.grid.same_as(&target) {
        return Resampled { signal: a.clone(), extrapolated: false };
    }
    let signal = ComplexSignal { grid: target, values: (0..target.n).map(|i| a.at(target.t(i))).collect() };
    Resampled { signal, extrapolated: window_overrun(a, target.t0, target.end()) }
}

/// True if `[lo, hi]` leaves `a`'s window on a side where `a` has not decayed.
pub(crate) fn window_overrun(a: &ComplexSignal, lo: f64, hi: f64) -> bool {
    let tol = 1e-9 * a.max_abs().max(f64::MIN_POSITIVE);
    let eps = 1e-12 * (1.0 + a.grid.end().abs());
    (lo < a.grid.t0 - eps && a.values[0].norm() > tol)
        || (hi > a.grid.end() + eps && a.values[a.len() - 1].norm() > tol)
}
