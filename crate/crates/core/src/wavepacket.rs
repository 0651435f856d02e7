//! Pulse design and wave-packet synthesis for the emitting node, and the
//! transformed / ideal packets seen by the receiving node.
//!
//! Conventions: natural units with `γ₂ = 1` unless a caller chooses otherwise;
//! the atomic and cavity amplitudes of node 1 are real and non-negative, and the
//! drive `G₁` is chosen non-negative for monotone targets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{adaptive_pieces, cumulative};
use crate::signal::{ComplexSignal, TimeGrid};

type C = Complex64;

/// Tolerance on the (scaled) radicand and on the β-constraint integral below
/// which a target still counts as producible.
pub const PRODUCIBILITY_TOL: f64 = 1e-9;
/// Drive or derivative magnitudes below this are treated as zero in divisions.
pub const EPS_DIV: f64 = 1e-12;
/// Floor for the remaining-energy integral in the slowly-varying pulse.
pub const EPS_TAIL: f64 = 1e-15;

/// Physical link: cavity decay rates, laser-frequency mismatch and the rate of
/// the logistic drive on node 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub zeta: f64,
    pub k: f64,
}

impl LinkParams {
    pub fn new(gamma1: f64, gamma2: f64, zeta: f64, k: f64) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(gamma1) || !ok(gamma2) || !ok(k) || !zeta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "link needs gamma1, gamma2, k > 0 and finite zeta (got {gamma1}, {gamma2}, {k}, {zeta})"
            )));
        }
        Ok(Self { gamma1, gamma2, zeta, k })
    }

    /// The heterogeneous reference link: γ₁ = 2, γ₂ = 1, ζ = 50, k = 2.
    pub fn reference() -> Self {
        Self { gamma1: 2.0, gamma2: 1.0, zeta: 50.0, k: 2.0 }
    }

    /// `r = γ₁ / 2k`.
    pub fn r(&self) -> f64 {
        self.gamma1 / (2.0 * self.k)
    }
}

/// Channel transformation: frequency shift `ω₀`, stretch `ξ`, timing `T` and
/// the duration `t_l` of the segment that passes through the device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryParams {
    pub omega0: f64,
    pub xi: f64,
    /// Timing parameter `T`.
    pub timing: f64,
    pub t_l: f64,
}

impl UnitaryParams {
    pub fn new(omega0: f64, xi: f64, timing: f64, t_l: f64) -> Result<Self> {
        if !(xi > 0.0) || !xi.is_finite() || !(t_l >= 0.0) || !omega0.is_finite() || !timing.is_finite() {
            return Err(Error::InvalidInput(format!(
                "unitary needs xi > 0, t_l >= 0 and finite omega0, T (got xi={xi}, t_l={t_l})"
            )));
        }
        Ok(Self { omega0, xi, timing, t_l })
    }

    /// Start of transformed-field production, `t_s = T / (1 + 1/ξ)`.
    pub fn t_s(&self) -> f64 {
        self.timing / (1.0 + 1.0 / self.xi)
    }

    /// Start of the segment entering the device, `t_i = t_s − t_l`.
    pub fn t_i(&self) -> f64 {
        self.t_s() - self.t_l
    }

    /// End of transformed-field production, `t_f = t_s + t_l/ξ`.
    pub fn t_f(&self) -> f64 {
        self.t_s() + self.t_l / self.xi
    }
}

/// Verdict of a producibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Producibility {
    pub producible: bool,
    pub margin: f64,
    pub max_weight: f64,
}

/// `(1 + tanh(−kt))/2` written as `1/(1 + e^{2kt})` without cancellation.
pub fn logistic_value(k: f64, t: f64) -> f64 {
    let x = 2.0 * k * t;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

pub fn logistic_alpha1(link: &LinkParams, grid: TimeGrid) -> ComplexSignal {
    ComplexSignal::from_real_fn(grid, |t| logistic_value(link.k, t)).expect("logistic values are finite")
}

/// Window over which node 1 emits: from `−15/k` (where the logistic amplitude
/// is within 1e-13 of 1) to the later of `15/k` and `30/γ₁`, by which the
/// cavity field has decayed by at least `e^{−15}`.
pub fn emission_window(link: &LinkParams) -> (f64, f64) {
    (-15.0 / link.k, (15.0 / link.k).max(30.0 / link.gamma1))
}

/// Sampling grid for node-1 quantities: 200 samples per shortest time scale.
pub fn emission_grid(link: &LinkParams) -> TimeGrid {
    let (lo, hi) = emission_window(link);
    let dt = (1.0 / link.k).min(1.0 / link.gamma1) / 200.0;
    TimeGrid::spanning(lo, hi, dt).expect("emission window is non-empty")
}

/// Scaled radicand `D̃(t) = e^{−γ₁(t−t_p)} · [radicand of the pulse formula]`,
/// which equals `β₁²(t)` wherever the pulse exists, together with `α̇₁`.
struct Radicand {
    dtilde: Vec<f64>,
    alpha_dot: Vec<f64>,
}

fn real_part_checked(sig: &ComplexSignal, what: &str) -> Result<Vec<f64>> {
    let scale = sig.max_abs().max(1.0);
    if !sig.is_real(1e-12 * scale) {
        return Err(Error::InvalidInput(format!("{what} must be real-valued")));
    }
    Ok(sig.re())
}

/// Lagrange weights of the cubic through nodes 0..4 evaluated at `x`.
fn cubic_weights(x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for (j, wj) in w.iter_mut().enumerate() {
        for m in 0..4 {
            if m != j {
                *wj *= (x - m as f64) / (j as f64 - m as f64);
            }
        }
    }
    w
}

fn scaled_radicand(alpha1: &ComplexSignal, gamma1: f64) -> Result<Radicand> {
    if !(gamma1 >= 0.0) {
        return Err(Error::InvalidInput(format!("gamma1 must be non-negative, got {gamma1}")));
    }
    let a = real_part_checked(alpha1, "alpha1")?;
    let alpha_dot = alpha1.derivative().re();
    let n = a.len();
    let h = alpha1.grid.dt;
    // source term of D̃' = −γ₁ D̃ + s with s = −2 α̇ α
    let s: Vec<f64> = a.iter().zip(&alpha_dot).map(|(x, d)| -2.0 * x * d).collect();
    let decay = (-gamma1 * h).exp();
    let gx = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let gw = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let mut d = vec![0.0; n];
    d[0] = (1.0 - a[0] * a[0]).max(0.0);
    for i in 0..n - 1 {
        let mut acc = 0.0;
        for q in 0..3 {
            let u = 0.5 * h * (1.0 + gx[q]);
            let sv = if n >= 4 {
                let j0 = i.saturating_sub(1).min(n - 4);
                let w = cubic_weights((i - j0) as f64 + u / h);
                (0..4).map(|m| w[m] * s[j0 + m]).sum::<f64>()
            } else {
                s[i] + (s[i + 1] - s[i]) * u / h
            };
            acc += gw[q] * (-gamma1 * (h - u)).exp() * sv;
        }
        d[i + 1] = decay * d[i] + h * acc;
    }
    Ok(Radicand { dtilde: d, alpha_dot })
}

/// Radicand of the unscaled pulse formula at sample `i`, i.e. `e^{γ₁(t−t_p)} D̃`,
/// computed in log space so long windows cannot overflow.
fn unscaled(d: f64, gamma1: f64, elapsed: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let v = (d.abs().ln() + gamma1 * elapsed).exp().min(f64::MAX);
    v.copysign(d)
}

fn first_violation(r: &Radicand, grid: &TimeGrid, gamma1: f64) -> Option<(f64, f64)> {
    let tol_ln = PRODUCIBILITY_TOL.ln();
    r.dtilde.iter().enumerate().find_map(|(i, &d)| {
        let elapsed = grid.t(i) - grid.t0;
        (d < 0.0 && (-d).ln() + gamma1 * elapsed > tol_ln).then(|| (grid.t(i), unscaled(d, gamma1, elapsed)))
    })
}

fn pulse_from_radicand(r: &Radicand, grid: &TimeGrid) -> Result<Vec<f64>> {
    let mut g = vec![0.0; r.dtilde.len()];
    for (i, (&d, &ad)) in r.dtilde.iter().zip(&r.alpha_dot).enumerate() {
        if d > 0.0 {
            g[i] = -ad / d.sqrt();
        } else if ad.abs() < EPS_DIV {
            g[i] = 0.0;
        } else {
            return Err(Error::DivisionSingularity { t: grid.t(i) });
        }
    }
    Ok(g)
}

/// Drive `G₁` that makes node 1 follow the real amplitude `α₁`, with the
/// preparation time taken at the grid start. The radicand is accumulated as
/// `D̃ = β₁²` by an exponentially weighted fourth-order quadrature.
pub fn pulse_from_alpha1(alpha1: &ComplexSignal, gamma1: f64) -> Result<ComplexSignal> {
    let r = scaled_radicand(alpha1, gamma1)?;
    if let Some((t, radicand)) = first_violation(&r, &alpha1.grid, gamma1) {
        return Err(Error::NotProducible { t, radicand });
    }
    let g = pulse_from_radicand(&r, &alpha1.grid)?;
    ComplexSignal::from_real(alpha1.grid, &g)
}

/// Cavity amplitude `β₁ = −α̇₁/G₁`. Samples where both the drive and the
/// derivative vanish carry the previous value forward (zero before any drive).
pub fn beta1_from_alpha1(alpha1: &ComplexSignal, pulse: &ComplexSignal) -> Result<ComplexSignal> {
    if !alpha1.grid.same_as(&pulse.grid) {
        return Err(Error::GridMismatch("alpha1 and pulse must share a grid".into()));
    }
    let ad = alpha1.derivative();
    let mut out = Vec::with_capacity(alpha1.len());
    let mut last = C::new(0.0, 0.0);
    for i in 0..alpha1.len() {
        let g = pulse.values[i];
        let d = ad.values[i];
        let b = if g.norm() >= EPS_DIV {
            -d / g
        } else if d.norm() < EPS_DIV {
            last
        } else {
            return Err(Error::DivisionSingularity { t: alpha1.grid.t(i) });
        };
        last = b;
        out.push(b);
    }
    ComplexSignal::new(alpha1.grid, out)
}

/// Node-1 quantities for a designed emission: target amplitude, drive and
/// cavity amplitude, all on the same grid.
#[derive(Debug, Clone)]
pub struct Emission {
    pub alpha1: ComplexSignal,
    pub pulse: ComplexSignal,
    pub beta1: ComplexSignal,
    pub gamma1: f64,
}

impl Emission {
    /// Build from a target `α₁`; `β₁` is taken as `√D̃` directly, which equals
    /// `−α̇₁/G₁` but stays accurate where both factors are tiny.
    pub fn from_alpha1(alpha1: ComplexSignal, gamma1: f64) -> Result<Self> {
        let r = scaled_radicand(&alpha1, gamma1)?;
        if let Some((t, radicand)) = first_violation(&r, &alpha1.grid, gamma1) {
            return Err(Error::NotProducible { t, radicand });
        }
        let g = pulse_from_radicand(&r, &alpha1.grid)?;
        let b: Vec<f64> = r.dtilde.iter().map(|d| d.max(0.0).sqrt()).collect();
        Ok(Self {
            pulse: ComplexSignal::from_real(alpha1.grid, &g)?,
            beta1: ComplexSignal::from_real(alpha1.grid, &b)?,
            alpha1,
            gamma1,
        })
    }

    /// Logistic target on the default emission grid.
    pub fn logistic(link: &LinkParams) -> Result<Self> {
        Self::from_alpha1(logistic_alpha1(link, emission_grid(link)), link.gamma1)
    }

    pub fn grid(&self) -> TimeGrid {
        self.beta1.grid
    }

    /// `γ₁ ∫ β₁² dt`, the emitted norm.
    pub fn emitted_norm(&self) -> f64 {
        self.gamma1 * crate::signal::norm_squared(&self.beta1)
    }
}

/// Cavity amplitude for the logistic target evaluated without a grid.
///
/// `r = 1/2` and `r = 1` use their elementary closed forms. Other `r` use the
/// Lerch-transcendent expression where it is well conditioned and otherwise
/// the exponentially weighted integral `β₁² = ∫ e^{−γ₁(t−t′)} k sech²(kt′) α₁(t′) dt′`.
pub fn beta1_closed_form_logistic(link: &LinkParams, t: f64) -> f64 {
    let k = link.k;
    let r = link.r();
    let kt = k * t;
    if (r - 0.5).abs() < 1e-15 {
        let sech = 1.0 / kt.cosh();
        let v = 2.0 * kt.exp().atan() + sech * kt.tanh();
        return 0.5 * (-kt / 2.0).exp() * v.max(0.0).sqrt();
    }
    if (r - 1.0).abs() < 1e-15 {
        return 0.5 / kt.cosh();
    }
    if kt.abs() < 8.0 {
        if let Some(v) = beta1_lerch(r, kt) {
            return v;
        }
    }
    beta1_by_quadrature(link, t)
}

/// Lerch form; `None` when cancellation would cost more than six digits.
fn beta1_lerch(r: f64, kt: f64) -> Option<f64> {
    let z = kt.exp();
    let w = z * z;
    let phi = if w < 0.5 {
        crate::special::lerch_phi_series(-w, 1.0, 1.0 + r)?
    } else {
        crate::special::lerch_phi_s1_integral(-w, 1.0 + r)?
    };
    let t1 = 1.0 / ((1.0 + w) * (1.0 + w));
    let t2 = (1.0 - r) / (1.0 + w);
    let t3 = (1.0 - r) * r * phi;
    let inner = t1 + t2 - t3;
    let scale = t1.abs().max(t2.abs()).max(t3.abs());
    if inner < 1e-6 * scale {
        return None;
    }
    Some(z * inner.sqrt())
}

/// `β₁(t)` for the logistic target from the exponentially weighted source
/// integral; accurate for every `r`, including the impulse-like `r ≪ 1`.
pub fn beta1_by_quadrature(link: &LinkParams, t: f64) -> f64 {
    let (k, g) = (link.k, link.gamma1);
    let src = |tp: f64| {
        let c = (k * tp).cosh();
        let sech2 = if c.is_finite() { 1.0 / (c * c) } else { 0.0 };
        (-g * (t - tp)).exp() * k * sech2 * logistic_value(k, tp)
    };
    let lo = if t < -40.0 / k { t - 40.0 / (2.0 * k + g) } else { -40.0 / k };
    let hi = t.min(40.0 / k);
    if hi <= lo {
        return 0.0;
    }
    let mut breaks = vec![lo];
    for b in [-5.0 / k, 0.0, 5.0 / k] {
        if b > lo && b < hi {
            breaks.push(b);
        }
    }
    breaks.push(hi);
    adaptive_pieces(src, &breaks, 1e-18, 1e-12).max(0.0).sqrt()
}

/// Emission constraint on a real atomic amplitude. The margin is the smallest
/// value of the pulse radicand over the grid.
pub fn check_alpha1_producible(alpha1: &ComplexSignal, gamma1: f64) -> Result<Producibility> {
    let r = scaled_radicand(alpha1, gamma1)?;
    let grid = alpha1.grid;
    let margin = r
        .dtilde
        .iter()
        .enumerate()
        .map(|(i, &d)| unscaled(d, gamma1, grid.t(i) - grid.t0))
        .fold(f64::INFINITY, f64::min);
    let producible = first_violation(&r, &grid, gamma1).is_none();
    Ok(Producibility { producible, margin, max_weight: if producible { 1.0 } else { 0.0 } })
}

/// Constraint on a real cavity envelope `B`:
/// `I(t) = 2∫_{t_p}^t (Ḃ + γ₁B/2) B dt′ ≤ 1`, evaluated as the exact identity
/// `I(t) = B(t)² − B(t_p)² + γ₁∫_{t_p}^t B² dt′`. A target violating it can
/// still be produced with weight `w² ≤ 1/max I`.
pub fn check_beta1_producible(b: &ComplexSignal, gamma1: f64) -> Result<Producibility> {
    let v = real_part_checked(b, "B")?;
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let cum = cumulative(&sq, b.grid.dt);
    let b0 = sq[0];
    let max_i = sq
        .iter()
        .zip(&cum)
        .map(|(s, c)| s - b0 + gamma1 * c)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = 1.0 - max_i;
    let max_weight = if max_i <= 1.0 { 1.0 } else { 1.0 / max_i };
    Ok(Producibility { producible: margin >= -PRODUCIBILITY_TOL, margin, max_weight })
}

/// Drive for a target packet in the slowly-varying limit.
#[derive(Debug, Clone)]
pub struct SlowlyVaryingPulse {
    /// Real drive magnitude `G₁(t)`.
    pub magnitude: ComplexSignal,
    /// Laser phase `θ₀(t) = −θ_β(t)` (unwrapped, zero constant offset).
    pub theta0: Vec<f64>,
    /// Largest value of `((Ḃ/B)² + θ̇_β²)/(γ₁²/4)` where the packet is
    /// appreciable; the design is trustworthy when this is small.
    pub slow_ratio: f64,
}

impl SlowlyVaryingPulse {
    /// Complex drive `G₁ e^{iθ₀}`.
    pub fn drive(&self) -> ComplexSignal {
        let values = self
            .magnitude
            .values
            .iter()
            .zip(&self.theta0)
            .map(|(g, th)| C::from_polar(g.re, *th))
            .collect();
        ComplexSignal { grid: self.magnitude.grid, values }
    }
}

/// `G₁ = (√γ₁/2) |Ψ| / √(∫_t^∞ |Ψ|²)` with the laser phase cancelling the
/// packet phase. `psi` is the emitted field `√γ₁ β₁`.
pub fn pulse_from_beta1_slowly_varying(psi: &ComplexSignal, gamma1: f64) -> Result<SlowlyVaryingPulse> {
    if !(gamma1 > 0.0) {
        return Err(Error::InvalidInput(format!("gamma1 must be positive, got {gamma1}")));
    }
    let mag = psi.abs();
    let sq: Vec<f64> = mag.iter().map(|m| m * m).collect();
    let cum = cumulative(&sq, psi.grid.dt);
    let total = *cum.last().unwrap();
    if total > 1.0 + 1e-6 {
        return Err(Error::InvalidInput(format!("packet norm {total:.6} exceeds 1")));
    }
    let g: Vec<f64> = mag
        .iter()
        .zip(&cum)
        .map(|(m, c)| 0.5 * gamma1.sqrt() * m / (total - c).max(EPS_TAIL).sqrt())
        .collect();
    let mut theta = Vec::with_capacity(psi.len());
    let (pi, tau) = (std::f64::consts::PI, std::f64::consts::TAU);
    let mut prev_arg = 0.0;
    let mut prev = 0.0;
    for (i, v) in psi.values.iter().enumerate() {
        let a = v.arg();
        let un = if i == 0 { a } else { prev + ((a - prev_arg + pi).rem_euclid(tau) - pi) };
        theta.push(un);
        prev = un;
        prev_arg = a;
    }
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    let dt = psi.grid.dt;
    let mut slow_ratio: f64 = 0.0;
    for i in 1..psi.len().saturating_sub(1) {
        if mag[i] > 1e-3 * peak {
            let dlog = (mag[i + 1] - mag[i - 1]) / (2.0 * dt * mag[i]);
            let dth = (theta[i + 1] - theta[i - 1]) / (2.0 * dt);
            slow_ratio = slow_ratio.max((dlog * dlog + dth * dth) / (gamma1 * gamma1 / 4.0));
        }
    }
    Ok(SlowlyVaryingPulse {
        magnitude: ComplexSignal::from_real(psi.grid, &g)?,
        theta0: theta.iter().map(|t| -t).collect(),
        slow_ratio,
    })
}

/// Ideal packet `Φ(t) = √γ₂ e^{iω₀(T−t)} β₁(ξ(T−t))` at the passed parameters.
pub fn ideal_phi(beta1: &ComplexSignal, link: &LinkParams, u: &UnitaryParams, grid: TimeGrid) -> ComplexSignal {
    let sg = link.gamma2.sqrt();
    ComplexSignal {
        grid,
        values: (0..grid.n)
            .map(|i| {
                let lag = u.timing - grid.t(i);
                C::from_polar(sg, u.omega0 * lag) * beta1.at(u.xi * lag)
            })
            .collect(),
    }
}

/// Which stage of the transformation a time falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Field passes untouched.
    Passthrough,
    /// Field is inside the device and blocked.
    Blocked,
    /// Transformed field is being produced.
    Transformed,
}

pub fn stage(u: &UnitaryParams, t: f64) -> Stage {
    if u.t_l <= 0.0 {
        return Stage::Passthrough;
    }
    let (ti, ts, tf) = (u.t_i(), u.t_s(), u.t_f());
    if t > ti && t < ts {
        Stage::Blocked
    } else if t >= ts && t <= tf {
        Stage::Transformed
    } else {
        Stage::Passthrough
    }
}

/// Transformed packet `Ψ(t) = √γ₁ χ(t) β₁(f(t))` at a single time.
pub fn psi_at(beta1: &ComplexSignal, link: &LinkParams, u: &UnitaryParams, t: f64) -> C {
    match stage(u, t) {
        Stage::Passthrough => beta1.at(t) * link.gamma1.sqrt(),
        Stage::Blocked => C::new(0.0, 0.0),
        Stage::Transformed => {
            let lag = u.timing - t;
            C::from_polar((link.gamma1 * u.xi).sqrt(), u.omega0 * lag) * beta1.at(u.xi * lag)
        }
    }
}

/// The source term `e^{iζt} Ψ(t)` that drives cavity 2. On the transformed
/// stage the two carriers are combined into `e^{iω₀T} e^{i(ζ−ω₀)t}`, which is
/// slow whenever `ω₀ ≈ ζ`.
pub fn drive_at(beta1: &ComplexSignal, link: &LinkParams, u: &UnitaryParams, t: f64) -> C {
    match stage(u, t) {
        Stage::Passthrough => C::from_polar(link.gamma1.sqrt(), link.zeta * t) * beta1.at(t),
        Stage::Blocked => C::new(0.0, 0.0),
        Stage::Transformed => {
            let phase = u.omega0 * u.timing + (link.zeta - u.omega0) * t;
            C::from_polar((link.gamma1 * u.xi).sqrt(), phase) * beta1.at(u.xi * (u.timing - t))
        }
    }
}

pub fn synthesize_psi(beta1: &ComplexSignal, link: &LinkParams, u: &UnitaryParams, grid: TimeGrid) -> ComplexSignal {
    ComplexSignal { grid, values: (0..grid.n).map(|i| psi_at(beta1, link, u, grid.t(i))).collect() }
}
