//! Quadrature rules and small 1-D solvers.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Composite weights on `n` uniform samples: Simpson when the interval count is
/// even; otherwise Simpson on the leading intervals and the 3/8 rule on the last
/// three. Two samples fall back to the trapezoid.
pub fn composite_weights(n: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => return w,
        2 => {
            w[0] = dt / 2.0;
            w[1] = dt / 2.0;
            return w;
        }
        _ => {}
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    let mut i = 0;
    while i < simpson_end {
        w[i] += dt / 3.0;
        w[i + 1] += 4.0 * dt / 3.0;
        w[i + 2] += dt / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let j = simpson_end;
        w[j] += 3.0 * dt / 8.0;
        w[j + 1] += 9.0 * dt / 8.0;
        w[j + 2] += 9.0 * dt / 8.0;
        w[j + 3] += 3.0 * dt / 8.0;
    }
    w
}

pub fn integrate_samples(values: &[f64], dt: f64) -> f64 {
    composite_weights(values.len(), dt).iter().zip(values).map(|(w, v)| w * v).sum()
}

/// Running integral `∫_{t0}^{t_i}` of uniformly sampled data, fourth-order
/// accurate: each step integrates the cubic through four neighbouring samples.
pub fn cumulative(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * dt * (values[i - 1] + values[i]);
        }
        return out;
    }
    for i in 0..n - 1 {
        // Step [i, i+1] using stencil starting at j.
        let j = i.saturating_sub(1).min(n - 4);
        let step = cubic_step_integral(&values[j..j + 4], i - j);
        out[i + 1] = out[i] + step * dt;
    }
    out
}

/// Integral over one unit interval `[k, k+1]` of the cubic through `f[0..4]`
/// at nodes 0,1,2,3.
fn cubic_step_integral(f: &[f64], k: usize) -> f64 {
    // Precomputed Newton–Cotes-like weights for each sub-interval of a 4-node stencil.
    const W: [[f64; 4]; 3] = [
        [9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0],
        [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0],
        [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0, 9.0 / 24.0],
    ];
    let w = &W[k];
    w[0] * f[0] + w[1] * f[1] + w[2] * f[2] + w[3] * f[3]
}

/// Scalar-like values that the adaptive integrator can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

// Tabulated Gauss-Kronrod abscissae and weights, kept at their published digits.
#[allow(clippy::excessive_precision)]
const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_X[j];
        let s = f(c - x) + f(c + x);
        kron = kron + s * GK_WK[j];
        if j % 2 == 1 {
            gauss = gauss + s * GK_WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

/// Adaptive Gauss–Kronrod (7/15) integration on `[a, b]`.
pub fn adaptive<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> T {
    if a == b {
        return T::zero();
    }
    let (v, e) = gk15(&f, a, b);
    let mut stack = vec![(a, b, v, e)];
    let mut total = T::zero();
    let mut finished = Vec::new();
    let mut evals = 0usize;
    while let Some((lo, hi, val, err)) = stack.pop() {
        let width_frac = ((hi - lo) / (b - a)).abs();
        if err <= (abs_tol * width_frac).max(rel_tol * val.magnitude()) || (hi - lo).abs() < 1e-14 * (1.0 + lo.abs()) || evals > 200_000 {
            finished.push(val);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evals += 30;
        stack.push((lo, mid, v1, e1));
        stack.push((mid, hi, v2, e2));
    }
    for v in finished {
        total = total + v;
    }
    total
}

/// Adaptive integration over consecutive pieces separated by `breaks`.
pub fn adaptive_pieces<T: Integrand>(f: impl Fn(f64) -> T, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> T {
    let mut total = T::zero();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total = total + adaptive(&f, w[0], w[1], abs_tol, rel_tol);
        }
    }
    total
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) < tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
