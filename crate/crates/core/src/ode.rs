//! Embedded Dormand–Prince 5(4) integrator for small complex systems, with the
//! standard fourth-order continuous extension for dense output.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step the controller may take; keeps narrow drive features from
    /// being stepped over while the state is still flat.
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_max: f64::INFINITY }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn lin<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, writing dense-output samples at
/// each of `out_times` (sorted, inside `[t0, t1]`) into `out`. Returns the state
/// at `t1`.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[C; N]) -> [C; N],
    t0: f64,
    y0: [C; N],
    t1: f64,
    opts: &OdeOptions,
    out_times: &[f64],
    out: &mut Vec<[C; N]>,
) -> Result<[C; N]> {
    let mut t = t0;
    let mut y = y0;
    let mut next_out = 0usize;
    while next_out < out_times.len() && out_times[next_out] <= t0 {
        out.push(y0);
        next_out += 1;
    }
    if t1 <= t0 {
        return Ok(y);
    }
    let span = t1 - t0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, span, opts).min(opts.h_max);
    let mut reject_streak = 0;
    loop {
        if t + h >= t1 || t + 1.01 * h >= t1 {
            h = t1 - t;
        }
        if h <= 1e-13 * (1.0 + t.abs()) && t1 - t > 1e-13 * (1.0 + t.abs()) {
            return Err(Error::Stiffness { t, h });
        }
        let k2 = f(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = lin(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1);

        let mut err2 = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = opts.atol + opts.rtol * y[i].norm().max(y1[i].norm());
            err2 += e.norm_sqr() / (sc * sc);
        }
        let err = (err2 / N as f64).sqrt();

        if err <= 1.0 {
            let t_new = t + h;
            // Dense output for every requested time inside (t, t_new].
            if next_out < out_times.len() && out_times[next_out] <= t_new {
                let ydiff: [C; N] = std::array::from_fn(|i| y1[i] - y[i]);
                let bspl: [C; N] = std::array::from_fn(|i| k1[i] * h - ydiff[i]);
                let r4: [C; N] = std::array::from_fn(|i| ydiff[i] - k7[i] * h - bspl[i]);
                let r5: [C; N] = std::array::from_fn(|i| {
                    (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h
                });
                while next_out < out_times.len() && out_times[next_out] <= t_new {
                    let th = ((out_times[next_out] - t) / h).clamp(0.0, 1.0);
                    let th1 = 1.0 - th;
                    out.push(std::array::from_fn(|i| {
                        y[i] + (ydiff[i] + (bspl[i] + (r4[i] + r5[i] * th1) * th) * th1) * th
                    }));
                    next_out += 1;
                }
            }
            t = t_new;
            y = y1;
            k1 = k7;
            reject_streak = 0;
            if t >= t1 {
                break;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(opts.h_max);
        } else {
            reject_streak += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= if reject_streak > 3 { fac.min(0.5) } else { fac };
        }
    }
    while next_out < out_times.len() {
        out.push(y);
        next_out += 1;
    }
    Ok(y)
}

/// Runs [`integrate`] across consecutive pieces separated by `breaks` (sorted,
/// first and last being the overall start and end), restarting the step
/// controller at every break so that drive discontinuities are never stepped
/// across. Samples at `out_times` (sorted) are appended to `out`.
pub fn integrate_piecewise<const N: usize>(
    mut f: impl FnMut(f64, &[C; N]) -> [C; N],
    breaks: &[f64],
    y0: [C; N],
    opts: &OdeOptions,
    out_times: &[f64],
    out: &mut Vec<[C; N]>,
) -> Result<[C; N]> {
    let mut y = y0;
    let mut next = 0usize;
    for (i, w) in breaks.windows(2).enumerate() {
        let last = i + 2 == breaks.len();
        let stop = if last {
            out_times.len()
        } else {
            next + out_times[next..].partition_point(|&t| t <= w[1])
        };
        // Keep every evaluation strictly inside the piece so that a drive which
        // switches exactly at a break is seen from the correct side.
        let (a, b) = (w[0], w[1]);
        let eps = 1e-12 * (1.0 + a.abs().max(b.abs()));
        let (lo, hi) = if b - a > 4.0 * eps { (a + eps, b - eps) } else { (a, b) };
        y = integrate(|t, y: &[C; N]| f(t.clamp(lo, hi), y), a, y, b, opts, &out_times[next..stop], out)?;
        next = stop;
    }
    if breaks.len() < 2 {
        out.extend(std::iter::repeat_n(y, out_times.len()));
    }
    Ok(y)
}

fn initial_step<const N: usize>(y: &[C; N], f0: &[C; N], span: f64, opts: &OdeOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].norm();
        d0 += (y[i].norm() / sc).powi(2);
        d1 += (f0[i].norm() / sc).powi(2);
    }
    let d0 = (d0 / N as f64).sqrt();
    let d1 = (d1 / N as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).max(1e-12 * span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_dense_output() {
        // y = e^{iωt}, y' = iω y
        let w = 3.0;
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let mut out = Vec::new();
        let yend = integrate(
            |_, y: &[C; 1]| [y[0] * C::new(0.0, w)],
            0.0,
            [C::new(1.0, 0.0)],
            5.0,
            &OdeOptions::default(),
            &times,
            &mut out,
        )
        .unwrap();
        assert_eq!(out.len(), times.len());
        for (t, y) in times.iter().zip(&out) {
            assert!((y[0] - C::new(0.0, w * t).exp()).norm() < 1e-8, "t={t}");
        }
        assert!((yend[0] - C::new(0.0, w * 5.0).exp()).norm() < 1e-8);
    }

    #[test]
    fn piecewise_matches_single_run_with_a_switched_drive() {
        // y' = −y + H(t − 1): exact y(t) = e^{−t} + (1 − e^{−(t−1)}) for t > 1
        let rhs = |t: f64, y: &[C; 1]| [-y[0] + C::new(if t > 1.0 { 1.0 } else { 0.0 }, 0.0)];
        let times = [0.0, 0.5, 1.0, 1.5, 2.0];
        let mut out = Vec::new();
        integrate_piecewise(rhs, &[0.0, 1.0, 2.0], [C::new(1.0, 0.0)], &OdeOptions::default(), &times, &mut out).unwrap();
        assert_eq!(out.len(), times.len());
        for (t, y) in times.iter().zip(&out) {
            let exact = (-t).exp() + if *t > 1.0 { 1.0 - (-(t - 1.0)).exp() } else { 0.0 };
            assert!((y[0].re - exact).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn decaying_pair() {
        let mut out = Vec::new();
        let y = integrate(
            |_, y: &[C; 2]| [-y[0], y[0] - y[1] * 2.0],
            0.0,
            [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            3.0,
            &OdeOptions::default(),
            &[],
            &mut out,
        )
        .unwrap();
        let exact = (-3.0f64).exp() - (-6.0f64).exp();
        assert!((y[0].re - (-3.0f64).exp()).abs() < 1e-10);
        assert!((y[1].re - exact).abs() < 1e-10);
    }
}
