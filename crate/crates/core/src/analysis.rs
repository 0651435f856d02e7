//! Success probabilities, error sweeps, separability indices, closed-form
//! references and fidelity calculators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::p_success_ode;
use crate::error::{Error, Result};
use crate::quad::{adaptive_pieces, composite_weights};
use crate::signal::{inner_product, ComplexSignal};
use crate::transform::TransferSetup;

type C = Complex64;

/// `|⟨Φ|Ψ⟩|²` clamped to `[0, 1]`.
pub fn p_success_overlap(phi: &ComplexSignal, psi: &ComplexSignal) -> Result<f64> {
    Ok(inner_product(phi, psi)?.norm_sqr().clamp(0.0, 1.0))
}

/// The three error variables `x = Δω₀/γ₂`, `y = log₂(ξ/ξᵢ)`, `z = γ₂ΔT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorAxis {
    Omega0,
    LogXi,
    Timing,
}

impl ErrorAxis {
    pub const ALL: [ErrorAxis; 3] = [ErrorAxis::Omega0, ErrorAxis::LogXi, ErrorAxis::Timing];

    /// Half-width of the base region `R` along this axis.
    pub fn region_half_width(self) -> f64 {
        match self {
            ErrorAxis::Omega0 => 3.0,
            ErrorAxis::LogXi => 6.0,
            ErrorAxis::Timing => 7.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorAxis::Omega0 => "omega0",
            ErrorAxis::LogXi => "logxi",
            ErrorAxis::Timing => "timing",
        }
    }

    /// Column header including the unit convention.
    pub fn header(self) -> &'static str {
        match self {
            ErrorAxis::Omega0 => "d_omega0_over_gamma2",
            ErrorAxis::LogXi => "d_log2_xi",
            ErrorAxis::Timing => "gamma2_dT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omega0" | "omega" | "x" | "frequency" => Some(ErrorAxis::Omega0),
            "logxi" | "xi" | "y" | "stretch" => Some(ErrorAxis::LogXi),
            "timing" | "t" | "z" => Some(ErrorAxis::Timing),
            _ => None,
        }
    }

    fn place(self, v: f64, xyz: &mut [f64; 3]) {
        let i = match self {
            ErrorAxis::Omega0 => 0,
            ErrorAxis::LogXi => 1,
            ErrorAxis::Timing => 2,
        };
        xyz[i] = v;
    }
}

/// Uniform samples along one error axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: ErrorAxis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn new(axis: ErrorAxis, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("axis range needs lo < hi and n >= 2 (got {lo}:{hi}:{n})")));
        }
        Ok(Self { axis, lo, hi, n })
    }

    /// Symmetric range over the region `R_s`.
    pub fn region(axis: ErrorAxis, scale: f64, n: usize) -> Result<Self> {
        let h = axis.region_half_width() * scale;
        Self::new(axis, -h, h, n)
    }

    pub fn samples(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.hi } else { self.lo + i as f64 * step }).collect()
    }
}

/// How sweep points are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    /// Piecewise overlap of the packets including the finite device window.
    Window,
    /// Overlap with the whole packet transformed (device window longer than
    /// the packet); depends only on the error variables and the envelope.
    FullTransform,
}

/// A 2-D table of success probabilities; rows follow `axis1`.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axis1: ErrorAxis,
    pub samples1: Vec<f64>,
    pub axis2: ErrorAxis,
    pub samples2: Vec<f64>,
    pub values: DMatrix<f64>,
}

/// Full-transform overlap in error variables for a fixed envelope. With
/// `β(τ) = β₁(τ/γ₁)` (unit norm in `τ = γ₂ s`):
/// `P = 2^y |∫ e^{ixτ} β(τ) β(2^y(τ+z)) dτ|²`, evaluated with the narrower of
/// the two factors on a fixed Simpson grid and the wider one interpolated.
#[derive(Debug, Clone)]
pub struct ErrorVariableOverlap {
    beta1: ComplexSignal,
    gamma1: f64,
    tau: Vec<f64>,
    weighted: Vec<f64>,
}

impl ErrorVariableOverlap {
    pub fn new(beta1: &ComplexSignal, gamma1: f64, samples: usize) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidInput("need at least 3 samples".into()));
        }
        let (lo, hi) = (gamma1 * beta1.grid.t0, gamma1 * beta1.grid.end());
        let n = samples | 1;
        let dt = (hi - lo) / (n - 1) as f64;
        let tau: Vec<f64> = (0..n).map(|i| lo + i as f64 * dt).collect();
        let w = composite_weights(n, dt);
        let weighted = tau.iter().zip(&w).map(|(&t, wi)| wi * beta1.at(t / gamma1).re).collect();
        Ok(Self { beta1: beta1.clone(), gamma1, tau, weighted })
    }

    pub fn for_setup(setup: &TransferSetup) -> Result<Self> {
        Self::new(&setup.emission.beta1, setup.emission.gamma1, 6001)
    }

    fn beta(&self, tau: f64) -> f64 {
        self.beta1.at(tau / self.gamma1).re
    }

    pub fn p_success(&self, x: f64, y: f64, z: f64) -> f64 {
        let s = y.exp2();
        let sum: C = if y <= 0.0 {
            self.tau
                .iter()
                .zip(&self.weighted)
                .map(|(&t, &w)| C::from_polar(w * self.beta(s * (t + z)), x * t))
                .sum::<C>()
                * s.sqrt()
        } else {
            self.tau
                .iter()
                .zip(&self.weighted)
                .map(|(&u, &w)| C::from_polar(w * self.beta(u / s - z), x * u / s))
                .sum::<C>()
                / s.sqrt()
        };
        sum.norm_sqr().clamp(0.0, 1.0)
    }
}

/// Full-transform overlap for an arbitrary envelope `β(τ)` given as a function,
/// integrated adaptively. `support` bounds where `β` is nonzero and `kinks`
/// lists points where it is not smooth.
pub fn overlap_limit_adaptive(beta: impl Fn(f64) -> f64, support: (f64, f64), kinks: &[f64], x: f64, y: f64, z: f64) -> f64 {
    let s = y.exp2();
    // Integrate in τ; the stretched factor β(s(τ+z)) is nonzero for
    // τ ∈ [support.0/s − z, support.1/s − z].
    let lo = support.0.max(support.0 / s - z);
    let hi = support.1.min(support.1 / s - z);
    if !(hi > lo) {
        return 0.0;
    }
    let mut breaks = vec![lo, hi];
    for &k in kinks {
        breaks.push(k);
        breaks.push(k / s - z);
    }
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let f = |t: f64| C::from_polar(beta(t) * beta(s * (t + z)), x * t);
    let v = adaptive_pieces(f, &breaks, 1e-13, 1e-11);
    (s * v.norm_sqr()).clamp(0.0, 1.0)
}

/// Evaluates success probabilities around a setup's ideal point.
pub struct Sweeper<'a> {
    pub setup: &'a TransferSetup,
    pub method: SweepMethod,
    full: Option<ErrorVariableOverlap>,
}

impl<'a> Sweeper<'a> {
    pub fn new(setup: &'a TransferSetup, method: SweepMethod) -> Result<Self> {
        let full = match method {
            SweepMethod::FullTransform => Some(ErrorVariableOverlap::for_setup(setup)?),
            SweepMethod::Window => None,
        };
        Ok(Self { setup, method, full })
    }

    pub fn p_success(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        match &self.full {
            Some(f) => Ok(f.p_success(x, y, z)),
            None => self.setup.p_success(&self.setup.unitary_at(x, y, z)),
        }
    }
}

/// Success probability along one axis with the other two variables at zero.
pub fn sweep_1d(setup: &TransferSetup, method: SweepMethod, axis: &AxisSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let sw = Sweeper::new(setup, method)?;
    let xs = axis.samples();
    let p = xs
        .par_iter()
        .map(|&v| {
            let mut xyz = [0.0; 3];
            axis.axis.place(v, &mut xyz);
            sw.p_success(xyz[0], xyz[1], xyz[2])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((xs, p))
}

/// Success probability on the product grid of two axes, the third at zero.
pub fn sweep_2d(setup: &TransferSetup, method: SweepMethod, a1: &AxisSpec, a2: &AxisSpec) -> Result<SweepGrid> {
    if a1.axis == a2.axis {
        return Err(Error::InvalidInput("sweep axes must differ".into()));
    }
    let sw = Sweeper::new(setup, method)?;
    let (s1, s2) = (a1.samples(), a2.samples());
    let cells: Vec<(usize, usize)> = (0..s1.len()).flat_map(|i| (0..s2.len()).map(move |j| (i, j))).collect();
    let vals = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut xyz = [0.0; 3];
            a1.axis.place(s1[i], &mut xyz);
            a2.axis.place(s2[j], &mut xyz);
            sw.p_success(xyz[0], xyz[1], xyz[2])
        })
        .collect::<Result<Vec<f64>>>()?;
    let values = DMatrix::from_row_slice(s1.len(), s2.len(), &vals);
    Ok(SweepGrid { axis1: a1.axis, samples1: s1, axis2: a2.axis, samples2: s2, values })
}

/// `n` points drawn uniformly from the region `R_scale`, reproducible from `seed`.
pub fn random_points_in_region(n: usize, scale: f64, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [hx, hy, hz] = ErrorAxis::ALL.map(|a| scale * a.region_half_width());
    (0..n)
        .map(|_| (rng.random_range(-hx..=hx), rng.random_range(-hy..=hy), rng.random_range(-hz..=hz)))
        .collect()
}

/// Overlap-route and ODE-route probabilities at each `(x, y, z)` point.
pub fn ode_oracle(setup: &TransferSetup, points: &[(f64, f64, f64)]) -> Result<Vec<(f64, f64)>> {
    points
        .par_iter()
        .map(|&(x, y, z)| {
            let u = setup.unitary_at(x, y, z);
            Ok((setup.p_success(&u)?, p_success_ode(setup, &u)?))
        })
        .collect()
}

/// Full width at half maximum by linear interpolation between samples.
pub fn fwhm(axis: &[f64], curve: &[f64]) -> Result<f64> {
    if axis.len() != curve.len() || axis.len() < 3 {
        return Err(Error::InvalidInput("fwhm needs matching axis and curve with at least 3 samples".into()));
    }
    let (imax, &peak) = curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if imax == 0 || imax + 1 == curve.len() {
        return Err(Error::PeakAtBoundary);
    }
    let half = 0.5 * peak;
    let cross = |i: usize, j: usize| axis[i] + (half - curve[i]) * (axis[j] - axis[i]) / (curve[j] - curve[i]);
    let left = (0..imax).rev().find(|&i| curve[i] <= half).map(|i| cross(i, i + 1)).ok_or(Error::PeakAtBoundary)?;
    let right = (imax + 1..curve.len()).find(|&i| curve[i] <= half).map(|i| cross(i - 1, i)).ok_or(Error::PeakAtBoundary)?;
    Ok(right - left)
}

/// `σ²_max / Σσ²` of `a`, or of `a` minus its mean when `zero_mean` is set.
pub fn separability_index(a: &DMatrix<f64>, zero_mean: bool) -> Result<f64> {
    let m = if zero_mean { a.add_scalar(-a.mean()) } else { a.clone() };
    let frob2 = m.norm_squared();
    if !(frob2 > 0.0) {
        return Err(Error::Degenerate("separability index of a zero matrix".into()));
    }
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    Ok(smax * smax / frob2)
}

/// Statistics of the separability index of i.i.d. uniform matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineStats {
    pub mean: f64,
    pub std: f64,
    pub mean_zero_mean: f64,
}

pub fn random_matrix_baseline(n: usize, trials: usize, seed: u64) -> Result<BaselineStats> {
    if n < 2 || trials < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2 and trials >= 2 (got {n}, {trials})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Vec::with_capacity(trials);
    let mut s0 = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
        s.push(separability_index(&m, false)?);
        s0.push(separability_index(&m, true)?);
    }
    let mean = statrs::statistics::Statistics::mean(&s);
    let std = statrs::statistics::Statistics::std_dev(&s);
    let mean_zero_mean = statrs::statistics::Statistics::mean(&s0);
    Ok(BaselineStats { mean, std, mean_zero_mean })
}

/// Full-transform success probability of the one-sided exponential packet in
/// the impulse limit `r → 0`:
/// `2^{y+2}/((1+2^y)² + (2x)²) · (e^z for z ≤ 0, e^{−2^y z} for z > 0)`.
pub fn psucc_closed_form_r0(x: f64, y: f64, z: f64) -> f64 {
    let s = y.exp2();
    let lorentz = 4.0 * s / ((1.0 + s).powi(2) + 4.0 * x * x);
    lorentz * if z <= 0.0 { z.exp() } else { (-s * z).exp() }
}

/// Success probability with no channel transformation for an exponential
/// packet from node 1 and a time-reversed drive on node 2, with its upper
/// bound: `(value, 4γ₁γ₂e^{−γ₂Tᵢ}/(ω₀ᵢ² + g²))`, `g = (γ₁ − γ₂)/2`.
pub fn psucc_no_unitary_exponential(gamma1: f64, gamma2: f64, omega0_i: f64, t_i: f64) -> (f64, f64) {
    if t_i <= 0.0 {
        return (0.0, 0.0);
    }
    let g = 0.5 * (gamma1 - gamma2);
    let w = C::new(-g, omega0_i);
    let decay = (-gamma2 * t_i).exp();
    let bound = 4.0 * gamma1 * gamma2 * decay / (omega0_i * omega0_i + g * g);
    let value = if w.norm() < 1e-300 {
        gamma1 * gamma2 * decay * t_i * t_i
    } else {
        let ratio = if w.norm() * t_i < 1e-6 { C::new(t_i, 0.0) } else { ((w * t_i).exp() - 1.0) / w };
        gamma1 * gamma2 * decay * ratio.norm_sqr()
    };
    (value, bound)
}

/// `γ²T_d²e^{−γT_d}` for `T_d > 0`, else 0.
pub fn exp_packet_self_overlap(gamma: f64, t_d: f64) -> f64 {
    if t_d <= 0.0 {
        0.0
    } else {
        let u = gamma * t_d;
        u * u * (-u).exp()
    }
}

/// Inputs of the transferred-state fidelity: excited population `x = |c_e|²`,
/// transfer amplitude `a = |α₂(t_e)|` and phase error `dtheta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityInputs {
    pub x: f64,
    pub a: f64,
    pub dtheta: f64,
}

impl FidelityInputs {
    pub fn new(x: f64, a: f64, dtheta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&a) || !dtheta.is_finite() {
            return Err(Error::InvalidInput(format!("fidelity needs x, a in [0, 1] (got x={x}, a={a})")));
        }
        Ok(Self { x, a, dtheta })
    }
}

/// `a²x² + (1−x)(1−a²x) + 2cos(δθ)√((1−x)(1−a²x))·ax`.
pub fn fidelity(inp: &FidelityInputs) -> f64 {
    let FidelityInputs { x, a, dtheta } = *inp;
    let a2 = a * a;
    let rest = ((1.0 - x) * (1.0 - a2 * x)).max(0.0);
    a2 * x * x + rest + 2.0 * dtheta.cos() * rest.sqrt() * a * x
}

/// Fidelity averaged over the Bloch sphere:
/// `1/2 + a²/4 + cos δθ [a√(1−a²)(2a²−1) + arcsin a]/(2πa²)`.
pub fn avg_fidelity(a: f64, dtheta: f64) -> f64 {
    let a2 = a * a;
    let bracket_over_a2 = if a < 1e-4 {
        // a√(1−a²)(2a²−1) + arcsin a = 8a³/3 + O(a⁵)
        8.0 * a / 3.0
    } else {
        (a * (1.0 - a2).max(0.0).sqrt() * (2.0 * a2 - 1.0) + a.min(1.0).asin()) / a2
    };
    0.5 + 0.25 * a2 + dtheta.cos() * bracket_over_a2 / (2.0 * std::f64::consts::PI)
}

/// `(1 + |c|²)/2` for a heralded scheme with packet overlap `c`.
pub fn heralded_fidelity(c: C) -> f64 {
    0.5 * (1.0 + c.norm_sqr())
}
