//! Lerch transcendent `Φ(z, s, a) = Σ_{n≥0} zⁿ/(n + a)^s` for real arguments.
//!
//! Two routes are provided: the defining series (accelerated when it
//! alternates) and, for `s = 1`, the integral representation
//! `Φ(z, 1, a) = ∫₀¹ v^{a−1}/(1 − z v) dv`, which continues the function to
//! every `z < 1`.

use crate::quad::adaptive_pieces;

/// Series evaluation. Returns `None` when the series does not converge
/// (`|z| > 1`, or `z = 1` with `s ≤ 1`) or when `a ≤ 0`.
pub fn lerch_phi_series(z: f64, s: f64, a: f64) -> Option<f64> {
    if !(a > 0.0) || !z.is_finite() || z.abs() > 1.0 || (z == 1.0 && s <= 1.0) {
        return None;
    }
    if z < 0.0 {
        // Alternating: Σ (−1)ⁿ bₙ with bₙ = |z|ⁿ/(n+a)^s completely monotone.
        let w = -z;
        let b = |n: usize| w.powi(n as i32) / (n as f64 + a).powf(s);
        return Some(alternating_sum(b, 40));
    }
    let mut sum = 0.0;
    let mut zn = 1.0;
    for n in 0..200_000usize {
        let term = zn / (n as f64 + a).powf(s);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Some(sum);
        }
        zn *= z;
    }
    None
}

/// Cohen–Rodriguez Villegas–Zagier acceleration of `Σ_{k≥0} (−1)^k b_k` using
/// the first `n` terms.
fn alternating_sum(b: impl Fn(usize) -> f64, n: usize) -> f64 {
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut bb = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..n {
        c = bb - c;
        s += c * b(k);
        let kf = k as f64;
        let nf = n as f64;
        bb = (kf + nf) * (kf - nf) * bb / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// `Φ(z, 1, a)` through its integral representation; valid for `z < 1`, `a > 0`.
pub fn lerch_phi_s1_integral(z: f64, a: f64) -> Option<f64> {
    if !(a > 0.0) || !(z < 1.0) {
        return None;
    }
    let f = |v: f64| {
        if v <= 0.0 {
            if a == 1.0 {
                1.0
            } else if a > 1.0 {
                0.0
            } else {
                // integrable singularity at v = 0; never sampled by Gauss–Kronrod
                f64::INFINITY
            }
        } else {
            v.powf(a - 1.0) / (1.0 - z * v)
        }
    };
    let mut breaks = vec![0.0];
    if z < -1.0 {
        let knee = 1.0 / (-z);
        breaks.extend([knee * 0.1, knee, (knee * 10.0).min(1.0)].iter().filter(|&&b| b < 1.0));
    }
    breaks.push(1.0);
    breaks.dedup();
    Some(adaptive_pieces(f, &breaks, 1e-16, 1e-13))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_log_at_a_one() {
        // Φ(z, 1, 1) = −ln(1 − z)/z
        for z in [-1.0, -0.9, -0.3, 0.2, 0.7] {
            let exact = -(1.0f64 - z).ln() / z;
            let v = lerch_phi_series(z, 1.0, 1.0).unwrap();
            assert!((v - exact).abs() < 1e-12, "z={z}: {v} vs {exact}");
        }
    }

    #[test]
    fn integral_matches_series() {
        for &(z, a) in &[(-0.5, 1.5), (-0.99, 1.25), (0.4, 2.0), (-1.0, 1.7)] {
            let s = lerch_phi_series(z, 1.0, a).unwrap();
            let i = lerch_phi_s1_integral(z, a).unwrap();
            assert!((s - i).abs() < 1e-11, "z={z} a={a}: {s} vs {i}");
        }
    }

    #[test]
    fn half_integer_closed_form_beyond_unit_disk() {
        // Φ(−w², 1, 3/2) = 2(w − arctan w)/w³
        for w in [0.5, 2.0, 10.0, 300.0] {
            let exact = 2.0 * (w - f64::atan(w)) / (w * w * w);
            let v = lerch_phi_s1_integral(-w * w, 1.5).unwrap();
            assert!((v - exact).abs() < 1e-11 * exact.max(1e-300) + 1e-15, "w={w}: {v} vs {exact}");
        }
        assert!(lerch_phi_series(-4.0, 1.0, 1.5).is_none());
    }
}
