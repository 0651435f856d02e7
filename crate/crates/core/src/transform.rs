//! Unitary-parameter logic: ideal values, optimal timing, and the bundled
//! reference setup that sweeps and validations perturb.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{bisect, cumulative, golden_max};
use crate::signal::{inner_product, ComplexSignal, TimeGrid};
use crate::wavepacket::{emission_window, ideal_phi, stage, synthesize_psi, Emission, LinkParams, Stage, UnitaryParams};

type C = Complex64;

/// Ideal frequency shift `ω₀ᵢ = ζ`, stretch `ξᵢ = γ₂/γ₁`, and the optimal
/// timing once it has been solved for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealParams {
    pub omega0_i: f64,
    pub xi_i: f64,
    pub t_i_star: Option<f64>,
}

pub fn ideal_params(link: &LinkParams) -> IdealParams {
    IdealParams { omega0_i: link.zeta, xi_i: link.gamma2 / link.gamma1, t_i_star: None }
}

/// Result of [`optimal_ts`]. `fallback` is set when no stationary point
/// exists and the window was instead placed to capture the most mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSolution {
    pub t_s_star: f64,
    pub t_i_star: f64,
    pub fallback: bool,
}

/// Running integral of `β₁²` that can be read at any time (clamped to the
/// window ends, where it equals 0 and the total respectively).
struct MassProfile {
    cum: ComplexSignal,
    total: f64,
}

impl MassProfile {
    fn new(beta1: &ComplexSignal) -> Self {
        let sq: Vec<f64> = beta1.values.iter().map(|v| v.norm_sqr()).collect();
        let c = cumulative(&sq, beta1.grid.dt);
        let total = *c.last().unwrap();
        Self { cum: ComplexSignal::from_real(beta1.grid, &c).expect("finite"), total }
    }

    fn upto(&self, t: f64) -> f64 {
        let g = &self.cum.grid;
        if t <= g.t0 {
            0.0
        } else if t >= g.end() {
            self.total
        } else {
            self.cum.at(t).re
        }
    }

    fn between(&self, a: f64, b: f64) -> f64 {
        self.upto(b) - self.upto(a)
    }
}

/// `γ₁ ∫_{t_s−t_l}^{t_s} β₁² dt`: the fraction of the emitted packet that
/// enters the device.
pub fn captured_mass(beta1: &ComplexSignal, gamma1: f64, t_s: f64, t_l: f64) -> f64 {
    gamma1 * MassProfile::new(beta1).between(t_s - t_l, t_s)
}

/// Solves `β₁²(t_s) = β₁²(t_s − t_l)` for the start of transformed-field
/// production, which maximizes the captured mass. When several roots exist the
/// one capturing the most mass wins; when none exists the mass is maximized
/// directly and the result is flagged.
pub fn optimal_ts(beta1: &ComplexSignal, t_l: f64, xi_i: f64) -> Result<TimingSolution> {
    if !(t_l > 0.0) {
        return Err(Error::InvalidInput(format!("t_l must be positive, got {t_l}")));
    }
    if !(xi_i > 0.0) {
        return Err(Error::InvalidInput(format!("xi_i must be positive, got {xi_i}")));
    }
    let g = beta1.grid;
    let mass = MassProfile::new(beta1);
    if mass.total <= 0.0 {
        return Err(Error::Degenerate("beta1 carries no mass".into()));
    }
    let h = |ts: f64| beta1.at(ts).norm_sqr() - beta1.at(ts - t_l).norm_sqr();
    let lo = g.t0;
    let hi = g.end() + t_l;
    let steps = ((hi - lo) / g.dt).ceil() as usize;
    let step = (hi - lo) / steps as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut prev_t = lo;
    let mut prev_h = h(lo);
    for i in 1..=steps {
        let t = lo + i as f64 * step;
        let ht = h(t);
        if prev_h > 0.0 && ht <= 0.0 {
            if let Some(root) = bisect(h, prev_t, t, 1e-12 * (1.0 + t.abs())) {
                let m = mass.between(root - t_l, root);
                if best.is_none_or(|(_, bm)| m > bm) {
                    best = Some((root, m));
                }
            }
        }
        prev_t = t;
        prev_h = ht;
    }
    let (t_s, fallback) = match best {
        Some((root, _)) => (root, false),
        None => (golden_max(|ts| mass.between(ts - t_l, ts), lo, hi, 1e-9), true),
    };
    Ok(TimingSolution { t_s_star: t_s, t_i_star: t_s * (1.0 + 1.0 / xi_i), fallback })
}

/// Overlap `⟨Φ|Ψ⟩` between the ideal packet at `phi_u` and the transformed
/// packet at `psi_u`, integrated piecewise so that stage boundaries and the
/// edges of both supports fall on sample points. Each piece gets its own step,
/// fine enough for its carrier and for the envelope stretch present there.
pub fn packet_overlap(beta1: &ComplexSignal, link: &LinkParams, phi_u: &UnitaryParams, psi_u: &UnitaryParams) -> Result<C> {
    let (b_lo, b_hi) = (beta1.grid.t0, beta1.grid.end());
    let phi_lo = phi_u.timing - b_hi / phi_u.xi;
    let phi_hi = phi_u.timing - b_lo / phi_u.xi;
    let tr_lo = psi_u.timing - b_hi / psi_u.xi;
    let tr_hi = psi_u.timing - b_lo / psi_u.xi;
    let mut breaks = vec![phi_lo, phi_hi, b_lo, b_hi, tr_lo, tr_hi];
    if psi_u.t_l > 0.0 {
        breaks.extend([psi_u.t_i(), psi_u.t_s(), psi_u.t_f()]);
    }
    breaks.retain(|&b| b >= phi_lo && b <= phi_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    let env = (1.0 / link.k).min(1.0 / link.gamma1);
    let mut total = C::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 1e-12 * (1.0 + a.abs()) {
            continue;
        }
        let mid = 0.5 * (a + b);
        let (carrier, stretch) = match stage(psi_u, mid) {
            Stage::Blocked => continue,
            Stage::Transformed => {
                if mid < tr_lo || mid > tr_hi {
                    continue;
                }
                ((psi_u.omega0 - phi_u.omega0).abs(), psi_u.xi.max(phi_u.xi).max(1.0))
            }
            Stage::Passthrough => {
                if mid < b_lo || mid > b_hi {
                    continue;
                }
                (phi_u.omega0.abs(), phi_u.xi.max(1.0))
            }
        };
        let mut dt = env / (20.0 * stretch);
        if carrier > 0.0 {
            dt = dt.min(std::f64::consts::TAU / (32.0 * carrier));
        }
        let grid = TimeGrid::spanning(a, b, dt)?;
        let phi = ideal_phi(beta1, link, phi_u, grid);
        let psi = synthesize_psi(beta1, link, psi_u, grid);
        total += inner_product(&phi, &psi)?;
    }
    Ok(total)
}

/// Real part of `⟨Φ|Φ_l⟩` with both packets at the parameters `u`, including
/// the untransformed segments and their carrier factor. For large `|ω₀ᵢ|` it
/// reduces to [`captured_mass`].
pub fn general_timing_objective(beta1: &ComplexSignal, link: &LinkParams, u: &UnitaryParams) -> Result<f64> {
    Ok(packet_overlap(beta1, link, u, u)?.re)
}

/// Everything needed to evaluate transfers around one ideal operating point:
/// the link, the designed emission, the device duration and the optimal timing.
#[derive(Debug, Clone)]
pub struct TransferSetup {
    pub link: LinkParams,
    pub t_l: f64,
    pub emission: Emission,
    pub ideal: IdealParams,
    pub timing: TimingSolution,
}

impl TransferSetup {
    /// Logistic emission at the link's `k` with the optimal timing for `t_l`.
    pub fn logistic(link: LinkParams, t_l: f64) -> Result<Self> {
        Self::from_emission(link, t_l, Emission::logistic(&link)?)
    }

    pub fn from_emission(link: LinkParams, t_l: f64, emission: Emission) -> Result<Self> {
        let mut ideal = ideal_params(&link);
        let timing = optimal_ts(&emission.beta1, t_l, ideal.xi_i)?;
        ideal.t_i_star = Some(timing.t_i_star);
        Ok(Self { link, t_l, emission, ideal, timing })
    }

    pub fn t_i_star(&self) -> f64 {
        self.timing.t_i_star
    }

    pub fn ideal_unitary(&self) -> UnitaryParams {
        UnitaryParams { omega0: self.ideal.omega0_i, xi: self.ideal.xi_i, timing: self.t_i_star(), t_l: self.t_l }
    }

    /// Parameters at error variables `x = Δω₀/γ₂`, `y = Δlog₂ξ`, `z = γ₂ΔT`.
    pub fn unitary_at(&self, x: f64, y: f64, z: f64) -> UnitaryParams {
        let g2 = self.link.gamma2;
        UnitaryParams {
            omega0: self.ideal.omega0_i + x * g2,
            xi: self.ideal.xi_i * y.exp2(),
            timing: self.t_i_star() + z / g2,
            t_l: self.t_l,
        }
    }

    /// Inverse of [`TransferSetup::unitary_at`].
    pub fn error_variables(&self, u: &UnitaryParams) -> (f64, f64, f64) {
        let g2 = self.link.gamma2;
        ((u.omega0 - self.ideal.omega0_i) / g2, (u.xi / self.ideal.xi_i).log2(), (u.timing - self.t_i_star()) * g2)
    }

    /// Interval where the ideal packet is nonzero.
    pub fn phi_support(&self) -> (f64, f64) {
        let g = self.emission.grid();
        let (xi, t) = (self.ideal.xi_i, self.t_i_star());
        (t - g.end() / xi, t - g.t0 / xi)
    }

    pub fn overlap(&self, u: &UnitaryParams) -> Result<C> {
        packet_overlap(&self.emission.beta1, &self.link, &self.ideal_unitary(), u)
    }

    /// `|⟨Φ|Ψ⟩|²` clamped to `[0, 1]`.
    pub fn p_success(&self, u: &UnitaryParams) -> Result<f64> {
        Ok(self.overlap(u)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Output step for a transfer at `u`: at least 32 samples per carrier cycle
    /// and 20 per envelope feature after stretching.
    pub fn eval_dt(&self, u: &UnitaryParams) -> f64 {
        let l = &self.link;
        let fastest = l.zeta.abs().max(u.omega0.abs()).max((l.zeta - u.omega0).abs());
        let env = (1.0 / l.k).min(1.0 / l.gamma1) / (20.0 * u.xi.max(self.ideal.xi_i).max(1.0));
        if fastest > 0.0 {
            env.min(std::f64::consts::TAU / (32.0 * fastest))
        } else {
            env
        }
    }

    /// Grid from the start of emission (or of the ideal packet, if earlier) to
    /// the end of the ideal packet, after which node 2 no longer changes.
    pub fn eval_grid(&self, u: &UnitaryParams) -> Result<TimeGrid> {
        let (e_lo, e_hi) = emission_window(&self.link);
        let (p_lo, p_hi) = self.phi_support();
        TimeGrid::spanning(e_lo.min(p_lo), p_hi.max(e_hi), self.eval_dt(u))
    }
}
