//! Direct integration of the excitation-amplitude equations: the ideal
//! two-node transfer, the general complex-drive form, and node-1 emission with
//! spontaneous decay.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{integrate_piecewise, OdeOptions};
use crate::signal::{window_overrun, ComplexSignal, Resampled, TimeGrid};
use crate::transform::TransferSetup;
use crate::wavepacket::{drive_at, LinkParams, UnitaryParams};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// The four single-excitation amplitudes at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub alpha1: C,
    pub beta1: C,
    pub alpha2: C,
    pub beta2: C,
}

impl Amplitudes {
    pub fn ground() -> Self {
        Self { alpha1: ZERO, beta1: ZERO, alpha2: ZERO, beta2: ZERO }
    }

    /// Excitation stored in emitter 1.
    pub fn excited_node1() -> Self {
        Self { alpha1: C::new(1.0, 0.0), ..Self::ground() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha1.norm_sqr() + self.beta1.norm_sqr() + self.alpha2.norm_sqr() + self.beta2.norm_sqr()
    }
}

/// Amplitude time series sampled on a common grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub alpha1: Vec<C>,
    pub beta1: Vec<C>,
    pub alpha2: Vec<C>,
    pub beta2: Vec<C>,
}

impl Trajectory {
    pub fn final_state(&self) -> Amplitudes {
        let n = self.grid.n - 1;
        Amplitudes { alpha1: self.alpha1[n], beta1: self.beta1[n], alpha2: self.alpha2[n], beta2: self.beta2[n] }
    }

    pub fn state(&self, i: usize) -> Amplitudes {
        Amplitudes { alpha1: self.alpha1[i], beta1: self.beta1[i], alpha2: self.alpha2[i], beta2: self.beta2[i] }
    }

    /// `|α₂(t_e)|²` at the last sample.
    pub fn transfer_probability(&self) -> f64 {
        self.alpha2[self.grid.n - 1].norm_sqr()
    }

    /// True when `|d|α₂|²/dt|` stays below `1e-8` over the final 5% of the
    /// window, i.e. the transfer has finished by the end time.
    pub fn is_settled(&self) -> bool {
        let n = self.grid.n;
        let start = n - (n / 20).max(2);
        self.alpha2[start..]
            .windows(2)
            .all(|w| ((w[1].norm_sqr() - w[0].norm_sqr()) / self.grid.dt).abs() < 1e-8)
    }

    fn signal(&self, v: &[C]) -> ComplexSignal {
        ComplexSignal { grid: self.grid, values: v.to_vec() }
    }

    pub fn alpha1_signal(&self) -> ComplexSignal {
        self.signal(&self.alpha1)
    }

    pub fn beta1_signal(&self) -> ComplexSignal {
        self.signal(&self.beta1)
    }

    pub fn alpha2_signal(&self) -> ComplexSignal {
        self.signal(&self.alpha2)
    }

    pub fn beta2_signal(&self) -> ComplexSignal {
        self.signal(&self.beta2)
    }
}

/// Spontaneous-decay treatment of the emitter's upper level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    None,
    /// Only the induced atomic damping `Γ̃/2 = 2G²/(γC)` is kept.
    LargeDetuning,
    /// Full complex-detuning coefficients with `Γ_r = Γ/(2Δ)`.
    FiniteDetuning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel {
    pub kind: DecayKind,
    /// Emitter cooperativity `C₁ = 4g²/(γΓ)`.
    pub c1: f64,
    /// Rescaled decay rate `Γ_r = Γ/(2Δ)`.
    pub gamma_r: f64,
}

impl DecayModel {
    pub fn none() -> Self {
        Self { kind: DecayKind::None, c1: f64::INFINITY, gamma_r: 0.0 }
    }

    pub fn large_detuning(c1: f64) -> Result<Self> {
        Self::validated(DecayKind::LargeDetuning, c1, 0.0)
    }

    pub fn finite_detuning(c1: f64, gamma_r: f64) -> Result<Self> {
        Self::validated(DecayKind::FiniteDetuning, c1, gamma_r)
    }

    /// Finite detuning at `Δ = 5·max(g, 2γ)`, taking the upper-level decay
    /// rate equal to the cavity rate so that `g = γ√C/2`. Then
    /// `Γ_r = 1/(5·max(√C, 4))`.
    pub fn finite_detuning_default(c1: f64) -> Result<Self> {
        if !(c1 > 0.0) {
            return Err(Error::InvalidInput(format!("cooperativity must be positive, got {c1}")));
        }
        Self::finite_detuning(c1, 1.0 / (5.0 * c1.sqrt().max(4.0)))
    }

    fn validated(kind: DecayKind, c1: f64, gamma_r: f64) -> Result<Self> {
        if !(c1 > 0.0) || !(gamma_r >= 0.0) || !gamma_r.is_finite() {
            return Err(Error::InvalidInput(format!("decay model needs C1 > 0 and Gamma_r >= 0 (got {c1}, {gamma_r})")));
        }
        Ok(Self { kind, c1, gamma_r })
    }
}

/// Coefficients of one node's equations,
/// `ȧ = −p a_β − κ a`, `β̇ = q a − λ β`, at a given time.
struct NodeCoefficients {
    p: C,
    q: C,
    kappa: C,
    lambda: C,
}

fn default_h_max(link: &LinkParams, stretch: f64) -> f64 {
    0.25 * (1.0 / link.k).min(1.0 / link.gamma1) / stretch.max(1.0)
}

fn options(h_max: f64) -> OdeOptions {
    OdeOptions { h_max, ..OdeOptions::default() }
}

/// Integrates one node from `t_start` over `breaks`, sampling at `times`.
fn solve_node(
    coef: impl Fn(f64) -> NodeCoefficients,
    source: impl Fn(f64) -> C,
    init: [C; 2],
    breaks: &[f64],
    h_max: f64,
    times: &[f64],
) -> Result<Vec<[C; 2]>> {
    let rhs = |t: f64, y: &[C; 2]| {
        let c = coef(t);
        [-c.p * y[1] - c.kappa * y[0], c.q * y[0] - c.lambda * y[1] + source(t)]
    };
    let mut out = Vec::with_capacity(times.len());
    integrate_piecewise(rhs, breaks, init, &options(h_max), times, &mut out)?;
    Ok(out)
}

fn sorted_breaks(lo: f64, hi: f64, inner: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut b = vec![lo];
    b.extend(inner.into_iter().filter(|&t| t > lo && t < hi));
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    b
}

/// Node-1 solution on its drive's grid, extended to arbitrary times: the
/// initial state before the window, and afterwards a frozen emitter with a
/// freely decaying cavity.
struct Node1 {
    alpha: ComplexSignal,
    beta: ComplexSignal,
    init: [C; 2],
    gamma1: f64,
}

impl Node1 {
    fn at(&self, t: f64) -> [C; 2] {
        let g = self.alpha.grid;
        if t < g.t0 {
            self.init
        } else if t > g.end() {
            let n = g.n - 1;
            [self.alpha.values[n], self.beta.values[n] * (-0.5 * self.gamma1 * (t - g.end())).exp()]
        } else {
            [self.alpha.at(t), self.beta.at(t)]
        }
    }
}

fn run_node1(
    drive: &ComplexSignal,
    coef: impl Fn(f64, C) -> NodeCoefficients,
    init: [C; 2],
    link: &LinkParams,
) -> Result<Node1> {
    let g = drive.grid;
    let times = g.times();
    let out = solve_node(|t| coef(t, drive.at(t)), |_| ZERO, init, &[g.t0, g.end()], default_h_max(link, 1.0), &times)?;
    Ok(Node1 {
        alpha: ComplexSignal { grid: g, values: out.iter().map(|y| y[0]).collect() },
        beta: ComplexSignal { grid: g, values: out.iter().map(|y| y[1]).collect() },
        init,
        gamma1: link.gamma1,
    })
}

/// Node-2 drive `G₂(t) = ξᵢ G₁(ξᵢ(Tᵢ − t))` sampled on `grid`. The flag is set
/// when the mirrored argument leaves `pulse1`'s window where it is not yet
/// negligible.
pub fn g2_time_reversed(pulse1: &ComplexSignal, xi_i: f64, t_i: f64, grid: TimeGrid) -> Result<Resampled> {
    if !(xi_i > 0.0) {
        return Err(Error::InvalidInput(format!("xi_i must be positive, got {xi_i}")));
    }
    let signal = ComplexSignal::from_fn(grid, |t| pulse1.at(xi_i * (t_i - t)) * xi_i)?;
    let lo = xi_i * (t_i - grid.end());
    let hi = xi_i * (t_i - grid.t0);
    Ok(Resampled { signal, extrapolated: window_overrun(pulse1, lo, hi) })
}

/// Ideal two-node transfer with real drives. Node 1 is integrated on
/// `pulse1`'s grid; its cavity field, transformed by `u`, drives cavity 2
/// through `−√γ₂ e^{iζt} Ψ(t)`. `init` is the state at the earlier of the two
/// grid starts, and the result is sampled on `grid`.
pub fn integrate_ideal(
    pulse1: &ComplexSignal,
    pulse2: &ComplexSignal,
    link: &LinkParams,
    u: &UnitaryParams,
    init: Amplitudes,
    grid: TimeGrid,
) -> Result<Trajectory> {
    integrate_general(pulse1, pulse2, 0.0, 0.0, link, u, init, grid)
}

/// Two-node transfer with complex drives `Ω_j = G_j e^{iφ_j}` and residual
/// cavity shifts `d_j`:
/// `ȧ_j = −Ω_j β_j`, `β̇_j = Ω_j* a_j − (γ_j/2 + i d_j) β_j`, plus the source
/// on cavity 2. Any emitter frequency shift is assumed folded into the drive
/// phase.
#[allow(clippy::too_many_arguments)]
pub fn integrate_general(
    drive1: &ComplexSignal,
    drive2: &ComplexSignal,
    d1: f64,
    d2: f64,
    link: &LinkParams,
    u: &UnitaryParams,
    init: Amplitudes,
    grid: TimeGrid,
) -> Result<Trajectory> {
    let half1 = C::new(0.5 * link.gamma1, d1);
    let node1 = run_node1(
        drive1,
        |_, w| NodeCoefficients { p: w, q: w.conj(), kappa: ZERO, lambda: half1 },
        [init.alpha1, init.beta1],
        link,
    )?;
    let beta1 = &node1.beta;

    let t_start = grid.t0.min(drive1.grid.t0);
    let (b_lo, b_hi) = (beta1.grid.t0, beta1.grid.end());
    let mut inner = vec![b_lo, b_hi, grid.t0, u.timing - b_hi / u.xi, u.timing - b_lo / u.xi];
    if u.t_l > 0.0 {
        inner.extend([u.t_i(), u.t_s(), u.t_f()]);
    }
    let breaks = sorted_breaks(t_start, grid.end(), inner);
    let sg2 = link.gamma2.sqrt();
    let half2 = C::new(0.5 * link.gamma2, d2);
    let times = grid.times();
    let out2 = solve_node(
        |t| {
            let w = drive2.at(t);
            NodeCoefficients { p: w, q: w.conj(), kappa: ZERO, lambda: half2 }
        },
        |t| -sg2 * drive_at(beta1, link, u, t),
        [init.alpha2, init.beta2],
        &breaks,
        default_h_max(link, u.xi.max(link.gamma2 / link.gamma1)),
        &times,
    )?;

    let n1: Vec<[C; 2]> = times.iter().map(|&t| node1.at(t)).collect();
    Ok(Trajectory {
        grid,
        alpha1: n1.iter().map(|y| y[0]).collect(),
        beta1: n1.iter().map(|y| y[1]).collect(),
        alpha2: out2.iter().map(|y| y[0]).collect(),
        beta2: out2.iter().map(|y| y[1]).collect(),
    })
}

/// Largest deviation between node 2 and the stretched mirror image of node 1:
/// `max_t max(||α₂(t)| − |α₁(ξᵢ(Tᵢ−t))||, ||β₂(t)| − |β₁(ξᵢ(Tᵢ−t))||)`, with
/// node-1 values held at their end values outside the trajectory.
pub fn verify_time_reversal(traj: &Trajectory, link: &LinkParams, u_ideal: &UnitaryParams) -> f64 {
    let xi = link.gamma2 / link.gamma1;
    let g = traj.grid;
    let a1 = traj.alpha1_signal();
    let b1 = traj.beta1_signal();
    let clamped = |s: &ComplexSignal, t: f64| s.at(t.clamp(g.t0, g.end())).norm();
    (0..g.n)
        .map(|i| {
            let s = xi * (u_ideal.timing - g.t(i));
            let da = (traj.alpha2[i].norm() - clamped(&a1, s)).abs();
            let db = (traj.beta2[i].norm() - clamped(&b1, s)).abs();
            da.max(db)
        })
        .fold(0.0, f64::max)
}

/// Node-1 emission driven by the real pulse `pulse1` under a decay model.
/// Node 2 is left in its ground state; the trajectory lives on `pulse1`'s grid.
pub fn integrate_with_decay(model: &DecayModel, pulse1: &ComplexSignal, link: &LinkParams, init: Amplitudes) -> Result<Trajectory> {
    let gamma = link.gamma1;
    let (c, extra) = match model.kind {
        DecayKind::None => (C::new(1.0, 0.0), ZERO),
        DecayKind::LargeDetuning => (C::new(1.0, 0.0), ZERO),
        DecayKind::FiniteDetuning => {
            let c = C::new(1.0, model.gamma_r).inv();
            (c, c * (model.gamma_r * model.gamma_r * model.c1))
        }
    };
    let damp = match model.kind {
        DecayKind::None => 0.0,
        _ => 2.0 / (gamma * model.c1),
    };
    let node1 = run_node1(
        pulse1,
        |_, w| {
            let gc = w * c;
            NodeCoefficients { p: gc, q: gc, kappa: gc * w * damp, lambda: (C::new(1.0, 0.0) + extra) * (0.5 * gamma) }
        },
        [init.alpha1, init.beta1],
        link,
    )?;
    let n = pulse1.grid.n;
    Ok(Trajectory {
        grid: pulse1.grid,
        alpha1: node1.alpha.values,
        beta1: node1.beta.values,
        alpha2: vec![ZERO; n],
        beta2: vec![ZERO; n],
    })
}

/// Emission figures of merit relative to a target cavity amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionMetrics {
    /// `η² = γ₁∫|β₁|² / γ₁∫|β₁ᵗ|²`, the emitted norm relative to the target's.
    pub efficiency: f64,
    /// Shape overlap `|γ₁∫β₁* β₁ᵗ|² / (γ₁∫|β₁|² · γ₁∫|β₁ᵗ|²)`.
    pub overlap: f64,
}

pub fn emission_metrics(traj: &Trajectory, target_beta1: &ComplexSignal, gamma1: f64) -> Result<EmissionMetrics> {
    let g = traj.grid;
    let target = ComplexSignal::from_fn(g, |t| target_beta1.at(t))?;
    let got = traj.beta1_signal();
    let n_got = gamma1 * crate::signal::norm_squared(&got);
    let n_target = gamma1 * crate::signal::norm_squared(&target);
    if !(n_got.sqrt() >= 1e-9) || !(n_target > 0.0) {
        return Err(Error::Degenerate(format!("emitted norm {n_got:.3e} too small")));
    }
    let cross = crate::signal::inner_product(&got, &target)? * gamma1;
    Ok(EmissionMetrics { efficiency: n_got / n_target, overlap: cross.norm_sqr() / (n_got * n_target) })
}

/// Logistic emission from node 1 driven by its decay-free pulse, scored against
/// the decay-free cavity amplitude under `model`.
pub fn logistic_emission_with_decay(link: &LinkParams, model: &DecayModel) -> Result<EmissionMetrics> {
    let em = crate::wavepacket::Emission::logistic(link)?;
    let init = Amplitudes { alpha1: em.alpha1.values[0], beta1: em.beta1.values[0], ..Amplitudes::ground() };
    let traj = integrate_with_decay(model, &em.pulse, link, init)?;
    emission_metrics(&traj, &em.beta1, link.gamma1)
}

/// Effective cooperativity from `C/(1 + C) = η²`.
pub fn c_eff(efficiency: f64) -> f64 {
    efficiency / (1.0 - efficiency)
}

/// A full transfer at `u` integrated directly, with node 2 driven by the
/// time-reversed node-1 pulse timed at the setup's optimal `Tᵢ*`.
pub fn transfer_ode(setup: &TransferSetup, u: &UnitaryParams) -> Result<Trajectory> {
    let grid = setup.eval_grid(u)?;
    let pulse2 = g2_time_reversed(&setup.emission.pulse, setup.ideal.xi_i, setup.t_i_star(), grid)?;
    integrate_ideal(&setup.emission.pulse, &pulse2.signal, &setup.link, u, Amplitudes::excited_node1(), grid)
}

/// `|α₂(t_e)|²` from [`transfer_ode`].
pub fn p_success_ode(setup: &TransferSetup, u: &UnitaryParams) -> Result<f64> {
    Ok(transfer_ode(setup, u)?.transfer_probability())
}
