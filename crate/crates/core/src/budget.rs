//! Standard-loss survival probabilities, cooperativity records, thermal
//! occupation, and the expected trial count of the repeat-until-success
//! error-correction protocol.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

type C = Complex64;

/// Raw experimental inputs behind a cooperativity record. Rates are over 2π
/// in MHz; transmissions and losses in ppm, or cavity decay rates when
/// `kappa_*` are given instead.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawInputs {
    pub g: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_sd: Option<f64>,
    pub t_in: Option<f64>,
    pub t_out: Option<f64>,
    pub loss: Option<f64>,
    pub kappa_c: Option<f64>,
    pub kappa_l: Option<f64>,
    pub p_cav_reported: Option<f64>,
}

/// Qualifiers attached to a record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordFlags {
    /// `C_cav` backtracked from a reported cavity efficiency.
    pub inferred: bool,
    /// Extra loss not reported and taken as zero (an overestimate).
    pub loss_not_reported: bool,
    /// No cavity figures apply to this setup.
    pub no_cavity: bool,
    /// Cavity figures are a lower bound for an optimized setup.
    pub lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CooperativityRecord {
    pub label: String,
    pub emitter_type: String,
    pub c_em: f64,
    pub c_cav: Option<f64>,
    pub raw: RawInputs,
    pub flags: RecordFlags,
}

impl CooperativityRecord {
    /// Record with known cooperativities and no raw inputs.
    pub fn new(label: &str, c_em: f64, c_cav: f64) -> Result<Self> {
        if !(c_em > 0.0) || !(c_cav > 0.0) {
            return Err(Error::InvalidInput(format!("cooperativities must be positive (got {c_em}, {c_cav})")));
        }
        Ok(Self {
            label: label.to_string(),
            emitter_type: String::new(),
            c_em,
            c_cav: Some(c_cav),
            raw: RawInputs::default(),
            flags: RecordFlags::default(),
        })
    }

    /// Builds a record from raw inputs: `C_em = 4g²/(γΓ_sd)` and `C_cav` from
    /// (in order of precedence) the reported cavity efficiency when flagged as
    /// inferred, `κ_c/κ_l`, or `𝒯_i/(𝒯_o + ℒ)` with missing `ℒ` as zero.
    pub fn from_raw(label: &str, emitter_type: &str, raw: RawInputs, flags: RecordFlags) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Data(format!("{label}: missing {name}")));
        let (g, gamma, gsd) = (need(raw.g, "g")?, need(raw.gamma, "gamma")?, need(raw.gamma_sd, "gamma_sd")?);
        let c_em = c_em_from_rates(g, gamma, gsd)?;
        let c_cav = if flags.no_cavity {
            None
        } else if flags.inferred {
            Some(c_from_survival(need(raw.p_cav_reported, "p_cav_reported")?)?)
        } else if let (Some(kc), Some(kl)) = (raw.kappa_c, raw.kappa_l) {
            Some(positive_ratio(kc, kl, label)?)
        } else {
            let ti = need(raw.t_in, "t_in")?;
            let to = need(raw.t_out, "t_out")?;
            Some(positive_ratio(ti, to + raw.loss.unwrap_or(0.0), label)?)
        };
        Ok(Self { label: label.to_string(), emitter_type: emitter_type.to_string(), c_em, c_cav, raw, flags })
    }

    pub fn p_em(&self) -> f64 {
        survival(self.c_em)
    }

    pub fn p_cav(&self) -> Option<f64> {
        self.c_cav.map(survival)
    }

    /// `(P_em P_cav)²`: emission at one node and absorption at an identical one.
    pub fn p_tot(&self) -> Option<f64> {
        self.p_cav().map(|pc| (self.p_em() * pc).powi(2))
    }

    /// Extra loss implied by an inferred `C_cav`: `ℒ = 𝒯_i/C_cav − 𝒯_o`.
    pub fn inferred_loss(&self) -> Option<f64> {
        match (self.flags.inferred, self.c_cav, self.raw.t_in, self.raw.t_out) {
            (true, Some(c), Some(ti), Some(to)) => Some(ti / c - to),
            _ => None,
        }
    }
}

fn positive_ratio(num: f64, den: f64, label: &str) -> Result<f64> {
    if !(num > 0.0) || !(den > 0.0) {
        return Err(Error::Data(format!("{label}: non-positive rate in cooperativity ratio")));
    }
    Ok(num / den)
}

/// `C = 4g²/(γΓ_sd)`.
pub fn c_em_from_rates(g: f64, gamma: f64, gamma_sd: f64) -> Result<f64> {
    if !(g > 0.0) || !(gamma > 0.0) || !(gamma_sd > 0.0) {
        return Err(Error::InvalidInput(format!("rates must be positive (g={g}, gamma={gamma}, gamma_sd={gamma_sd})")));
    }
    Ok(4.0 * g * g / (gamma * gamma_sd))
}

/// `C/(1 + C)`.
pub fn survival(c: f64) -> f64 {
    c / (1.0 + c)
}

/// Inverse of [`survival`]: `C = P/(1 − P)`.
pub fn c_from_survival(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("survival probability must lie in (0, 1), got {p}")));
    }
    Ok(p / (1.0 - p))
}

/// Survival probabilities of emission, cavity out-coupling and line
/// transmission over `x/x_tl` attenuation lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survival {
    pub p_em: f64,
    pub p_cav: f64,
    pub p_line: f64,
}

pub fn survival_probabilities(rec: &CooperativityRecord, x_over_xtl: f64) -> Result<Survival> {
    if !(x_over_xtl >= 0.0) {
        return Err(Error::InvalidInput(format!("line length must be non-negative, got {x_over_xtl}")));
    }
    let p_cav = rec.p_cav().ok_or_else(|| Error::InvalidInput(format!("{}: no cavity cooperativity", rec.label)))?;
    Ok(Survival { p_em: rec.p_em(), p_cav, p_line: (-x_over_xtl).exp() })
}

/// `p · P_em,1 P_em,2 · P_cav,1 P_cav,2 · e^{−x/x_tl}`.
pub fn tilde_p_success(p: f64, rec1: &CooperativityRecord, rec2: &CooperativityRecord, x_over_xtl: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("success probability must lie in [0, 1], got {p}")));
    }
    let s1 = survival_probabilities(rec1, x_over_xtl)?;
    let s2 = survival_probabilities(rec2, 0.0)?;
    Ok(p * s1.p_em * s2.p_em * s1.p_cav * s2.p_cav * s1.p_line)
}

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bose–Einstein occupation `1/(e^{ħω/k_BT} − 1)` for SI inputs (rad/s, K).
pub fn thermal_occupation(angular_frequency: f64, temperature: f64) -> Result<f64> {
    if !(angular_frequency > 0.0) || !(temperature > 0.0) {
        return Err(Error::InvalidInput("frequency and temperature must be positive".into()));
    }
    let u = HBAR * angular_frequency / (K_B * temperature);
    Ok(1.0 / u.exp_m1())
}

pub fn angular_frequency_from_wavelength(wavelength_m: f64) -> f64 {
    std::f64::consts::TAU * SPEED_OF_LIGHT / wavelength_m
}

/// Single-transmission amplitudes of the error-correction protocol for its
/// two transmissions (`*_t` for the second one). `alpha` is the ground-state
/// amplitude, `beta` the transferred one, `upsilon1` photon loss and
/// `upsilon2` an excitation left behind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EczChannel {
    pub alpha: C,
    pub beta: C,
    pub upsilon1: C,
    pub upsilon2: C,
    pub alpha_t: C,
    pub beta_t: C,
    pub upsilon1_t: C,
    pub upsilon2_t: C,
}

impl EczChannel {
    pub fn new(first: [C; 4], second: [C; 4]) -> Result<Self> {
        for (i, a) in [first, second].iter().enumerate() {
            let norm = a[1].norm_sqr() + a[2].norm_sqr() + a[3].norm_sqr();
            if (norm - 1.0).abs() > 1e-9 || a[0].norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "transmission {}: need |beta|^2+|U1|^2+|U2|^2 = 1 and |alpha| <= 1 (got {norm:.12}, {:.12})",
                    i + 1,
                    a[0].norm()
                )));
            }
        }
        Ok(Self {
            alpha: first[0],
            beta: first[1],
            upsilon1: first[2],
            upsilon2: first[3],
            alpha_t: second[0],
            beta_t: second[1],
            upsilon1_t: second[2],
            upsilon2_t: second[3],
        })
    }

    /// Same amplitudes for both transmissions.
    pub fn systematic(alpha: C, beta: C, upsilon1: C, upsilon2: C) -> Result<Self> {
        let a = [alpha, beta, upsilon1, upsilon2];
        Self::new(a, a)
    }

    /// Real non-negative amplitudes from `|α|²` and the three populations
    /// `|Υ₁|²`, `|Υ₂|²` (with `|β|²` the remainder).
    pub fn systematic_from_populations(alpha2: f64, upsilon1_2: f64, upsilon2_2: f64) -> Result<Self> {
        let beta2 = 1.0 - upsilon1_2 - upsilon2_2;
        if !(0.0..=1.0).contains(&alpha2) || !(beta2 >= -1e-15) || upsilon1_2 < 0.0 || upsilon2_2 < 0.0 {
            return Err(Error::InvalidInput("populations must lie in [0, 1] and sum to at most 1".into()));
        }
        let r = |p: f64| C::new(p.max(0.0).sqrt(), 0.0);
        Self::systematic(r(alpha2), r(beta2), r(upsilon1_2), r(upsilon2_2))
    }
}

/// Failure probabilities of the protocol steps and the overall success
/// probability `P_s = Π(1 − P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EczSteps {
    pub p_jump: f64,
    pub p_ii: f64,
    pub p_jump_tilde: f64,
    pub p_iv: f64,
    pub p_s: f64,
}

/// Tracks the renormalized amplitudes through both transmissions and the two
/// intermediate measurements.
pub fn ecz_step_probabilities(ch: &EczChannel) -> EczSteps {
    let a2 = ch.alpha.norm_sqr();
    let b2 = ch.beta.norm_sqr();
    let u1 = ch.upsilon1.norm_sqr();
    let u2 = ch.upsilon2.norm_sqr();
    let at2 = ch.alpha_t.norm_sqr();
    let ut1 = ch.upsilon1_t.norm_sqr();
    let ut2 = ch.upsilon2_t.norm_sqr();

    // Transmission 1 without a jump, renormalized by N_ii² = (1 + |α|²)/2.
    let p_jump = 0.5 * (1.0 - a2 + u1);
    let n_ii2 = 0.5 * (1.0 + a2);
    let (a2p, b2p, u1p, u2p) = (a2 / n_ii2, b2 / n_ii2, u1 / n_ii2, u2 / n_ii2);
    let p_ii = 0.5 * u2p;

    // Atom 1 not found excited: project out the Υ₂ branch.
    let keep = 1.0 - 0.5 * u2p;
    let (a2pp, b2pp, u1pp) = (a2p / keep, b2p / keep, u1p / keep);

    // Transmission 2.
    let p_jump_tilde = 0.5 * ((1.0 - at2) * (b2pp + u1pp) + ut1 * a2pp);
    let n_iv2 = (a2 + at2 * (1.0 - u2)) / (1.0 + a2 - u2);
    let (at2p, ut1p, ut2p) = (at2 / n_iv2, ut1 / n_iv2, ut2 / n_iv2);
    let p_iv = 0.5 * (a2pp * (ut1p + ut2p) + at2p * u1pp);

    let p_s = (1.0 - p_jump) * (1.0 - p_ii) * (1.0 - p_jump_tilde) * (1.0 - p_iv);
    EczSteps { p_jump, p_ii, p_jump_tilde, p_iv, p_s }
}

/// `E[n] = 1/P_s`. With `systematic` set the second transmission is taken to
/// repeat the first one's amplitudes.
pub fn ecz_expected_trials(ch: &EczChannel, systematic: bool) -> Result<f64> {
    let ch = if systematic {
        EczChannel::systematic(ch.alpha, ch.beta, ch.upsilon1, ch.upsilon2)?
    } else {
        *ch
    };
    let p_s = ecz_step_probabilities(&ch).p_s;
    if !(p_s > 1e-300) {
        return Err(Error::Divergence(p_s));
    }
    Ok(1.0 / p_s)
}

/// Worst case with `|α| = 1` and loss-dominated errors `|Υ₁|² = ε`:
/// `E[n] = 4/((1 − ε)(2 − ε)²)`.
pub fn worst_case_expected_trials(epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    if epsilon >= 1.0 {
        return Err(Error::Divergence(0.0));
    }
    Ok(4.0 / ((1.0 - epsilon) * (2.0 - epsilon).powi(2)))
}

/// `E[n]` against `1 − P_success` for identical nodes with `C_em = C_cav = C₀`:
/// each bare success probability is degraded by the standard losses and the
/// remainder taken as the loss error `ε = 1 − P̃_success`. Returns
/// `(1 − P_success, E[n])` pairs; points with `P̃_success = 0` are skipped.
pub fn en_vs_psuccess_curve(c0: f64, x_over_xtl: f64, psucc_axis: &[f64]) -> Result<Vec<(f64, f64)>> {
    let rec = CooperativityRecord::new("shared", c0, c0)?;
    let mut out = Vec::with_capacity(psucc_axis.len());
    for &p in psucc_axis {
        let eps = 1.0 - tilde_p_success(p, &rec, &rec, x_over_xtl)?;
        if let Ok(en) = worst_case_expected_trials(eps) {
            out.push((1.0 - p, en));
        }
    }
    Ok(out)
}

/// Bare success probability at which the worst-case `E[n]` reaches `target`
/// for identical nodes with cooperativity `c0`.
pub fn psuccess_for_expected_trials(c0: f64, x_over_xtl: f64, target: f64) -> Result<f64> {
    let rec = CooperativityRecord::new("shared", c0, c0)?;
    let ceiling = tilde_p_success(1.0, &rec, &rec, x_over_xtl)?;
    let en = |p: f64| worst_case_expected_trials(1.0 - ceiling * p).unwrap_or(f64::INFINITY);
    if en(1.0) > target {
        return Err(Error::InvalidInput(format!("E[n] exceeds {target} even at P_success = 1")));
    }
    crate::quad::bisect(|p| en(p) - target, 1e-12, 1.0, 1e-13)
        .ok_or_else(|| Error::InvalidInput(format!("no crossing of E[n] = {target}")))
}

/// Fidelity of the final joint state when the two transmissions differ by
/// amplitude ratios `r_a`, `r_b` and phase mismatch `δ_ab`:
/// `1/2 + r_a r_b cos δ_ab/(r_a² + r_b²)`.
pub fn ecz_nonsystematic_fidelity(ratio_a: f64, ratio_b: f64, delta_ab: f64) -> Result<f64> {
    if !(ratio_a > 0.0) || !(ratio_b > 0.0) {
        return Err(Error::InvalidInput(format!("amplitude ratios must be positive (got {ratio_a}, {ratio_b})")));
    }
    Ok(0.5 + ratio_a * ratio_b * delta_ab.cos() / (ratio_a * ratio_a + ratio_b * ratio_b))
}

/// One row of the cooperativity data file.
#[derive(Debug, Deserialize)]
struct CsvRow {
    label: String,
    emitter_type: String,
    g: Option<f64>,
    gamma: Option<f64>,
    gamma_sd: Option<f64>,
    t_in: Option<f64>,
    t_out: Option<f64>,
    loss: Option<f64>,
    kappa_c: Option<f64>,
    kappa_l: Option<f64>,
    p_cav_reported: Option<f64>,
    #[serde(default)]
    flags: String,
}

fn parse_flags(s: &str, label: &str) -> Result<RecordFlags> {
    let mut f = RecordFlags::default();
    for tok in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        match tok {
            "inferred" => f.inferred = true,
            "loss_not_reported" => f.loss_not_reported = true,
            "no_cavity" => f.no_cavity = true,
            "lower_bound" => f.lower_bound = true,
            other => return Err(Error::Data(format!("{label}: unknown flag '{other}'"))),
        }
    }
    Ok(f)
}

/// Reads cooperativity records from comma-separated text with a header row.
pub fn read_cooperativity_csv(reader: impl std::io::Read) -> Result<Vec<CooperativityRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::Data(format!("row {}: {e}", i + 1)))?;
        let flags = parse_flags(&row.flags, &row.label)?;
        let raw = RawInputs {
            g: row.g,
            gamma: row.gamma,
            gamma_sd: row.gamma_sd,
            t_in: row.t_in,
            t_out: row.t_out,
            loss: row.loss,
            kappa_c: row.kappa_c,
            kappa_l: row.kappa_l,
            p_cav_reported: row.p_cav_reported,
        };
        out.push(CooperativityRecord::from_raw(&row.label, &row.emitter_type, raw, flags)?);
    }
    Ok(out)
}

pub fn load_cooperativity_csv(path: &Path) -> Result<Vec<CooperativityRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    read_cooperativity_csv(f)
}

/// The bundled dataset of published node parameters.
pub fn builtin_cooperativity_records() -> Vec<CooperativityRecord> {
    read_cooperativity_csv(BUILTIN_DATA.as_bytes()).expect("bundled dataset parses")
}

const BUILTIN_DATA: &str = include_str!("../../../data/cooperativity.csv");

/// Plain and trimmed (largest and smallest dropped) averages of the
/// cooperativities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityAverages {
    pub c_em: f64,
    pub c_cav: f64,
    pub c_em_trimmed: f64,
    pub c_cav_trimmed: f64,
}

/// Averages over records with complete, reported figures: rows without a
/// cavity or with unreported loss are skipped, and lower-bound cavity values
/// are left out of the cavity average.
pub fn cooperativity_averages(records: &[CooperativityRecord]) -> Result<CooperativityAverages> {
    let usable: Vec<&CooperativityRecord> =
        records.iter().filter(|r| !r.flags.no_cavity && !r.flags.loss_not_reported).collect();
    let em: Vec<f64> = usable.iter().map(|r| r.c_em).collect();
    let cav: Vec<f64> = usable.iter().filter(|r| !r.flags.lower_bound).filter_map(|r| r.c_cav).collect();
    Ok(CooperativityAverages {
        c_em: mean(&em)?,
        c_cav: mean(&cav)?,
        c_em_trimmed: trimmed_mean(&em)?,
        c_cav_trimmed: trimmed_mean(&cav)?,
    })
}

fn mean(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Degenerate("average of no values".into()));
    }
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

fn trimmed_mean(v: &[f64]) -> Result<f64> {
    if v.len() < 3 {
        return Err(Error::Degenerate("trimmed average needs at least 3 values".into()));
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    mean(&s[1..s.len() - 1])
}
