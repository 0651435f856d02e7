//! End-to-end acceptance checks. Each numbered check prints one PASS/FAIL line
//! with the measured values; the process exits non-zero if any check fails.

use std::f64::consts::{E, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hqst::analysis::{
    avg_fidelity, exp_packet_self_overlap, fidelity, fwhm, overlap_limit_adaptive, psucc_closed_form_r0,
    random_matrix_baseline, random_points_in_region, separability_index, sweep_1d, sweep_2d, ode_oracle, AxisSpec, ErrorAxis, FidelityInputs,
    SweepMethod,
};
use hqst::budget::{
    angular_frequency_from_wavelength, builtin_cooperativity_records, cooperativity_averages, ecz_expected_trials,
    psuccess_for_expected_trials, survival, thermal_occupation, worst_case_expected_trials, EczChannel,
};
use hqst::dynamics::{
    integrate_general, logistic_emission_with_decay, p_success_ode, Amplitudes, DecayModel, EmissionMetrics,
};
use hqst::quad::{bisect, golden_max};
use hqst::transform::TransferSetup;
use hqst::wavepacket::{
    beta1_closed_form_logistic, check_beta1_producible, logistic_alpha1, pulse_from_beta1_slowly_varying, Emission,
};
use hqst::{Complex64, ComplexSignal, LinkParams, TimeGrid, UnitaryParams};

type Check = fn() -> Result<(bool, String), String>;

fn reference_setup() -> Result<TransferSetup, String> {
    TransferSetup::logistic(LinkParams::reference(), 10.0).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_fig2() -> Result<(bool, String), String> {
    let s = reference_setup()?;
    let ideal = s.ideal_unitary();
    let off = UnitaryParams::new(50.0, 0.75, 17.0, 10.0).map_err(err)?;
    let p_ideal_ov = s.p_success(&ideal).map_err(err)?;
    let p_ideal_ode = p_success_ode(&s, &ideal).map_err(err)?;
    let p_off_ov = s.p_success(&off).map_err(err)?;
    let p_off_ode = p_success_ode(&s, &off).map_err(err)?;
    let ok = (p_ideal_ov - 0.999995).abs() <= 1e-4
        && (p_ideal_ode - 0.999995).abs() <= 1e-4
        && (p_off_ov - 0.186).abs() <= 1e-3
        && (p_off_ode - 0.186).abs() <= 1e-3;
    Ok((
        ok,
        format!(
            "ideal overlap {p_ideal_ov:.7} ode {p_ideal_ode:.7}; xi=0.75,T=17 overlap {p_off_ov:.5} ode {p_off_ode:.5}"
        ),
    ))
}

fn c2_timing() -> Result<(bool, String), String> {
    let s = reference_setup()?;
    let t = s.t_i_star();
    Ok(((t - 19.7).abs() <= 0.05 && !s.timing.fallback, format!("T*_i = {t:.4}, t_s* = {:.4}", s.timing.t_s_star)))
}

fn c3_ode_oracle() -> Result<(bool, String), String> {
    let s = reference_setup()?;
    let pts = random_points_in_region(25, 1.0, 3);
    let res = ode_oracle(&s, &pts).map_err(err)?;
    let worst = res.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((worst <= 1e-5, format!("{} points in R, max |P_ode - P_overlap| = {worst:.2e}", pts.len())))
}

fn exp_beta(tau: f64) -> f64 {
    if tau < 0.0 {
        0.0
    } else {
        (-0.5 * tau).exp()
    }
}

fn c4_frequency() -> Result<(bool, String), String> {
    let s = reference_setup()?;
    let axis = AxisSpec::new(ErrorAxis::Omega0, -3.0, 3.0, 201).map_err(err)?;
    let (xs, p) = sweep_1d(&s, SweepMethod::Window, &axis).map_err(err)?;
    let w = fwhm(&xs, &p).map_err(err)?;
    let lorentz_dev = (0..=60)
        .map(|i| {
            let x = -3.0 + 0.1 * i as f64;
            (overlap_limit_adaptive(exp_beta, (0.0, 80.0), &[0.0], x, 0.0, 0.0) - 1.0 / (1.0 + x * x)).abs()
        })
        .fold(0.0, f64::max);
    Ok((
        (w - 1.4).abs() <= 0.05 && lorentz_dev <= 1e-3,
        format!("FWHM = {w:.4} gamma2; impulse-limit max |P - 1/(1+x^2)| = {lorentz_dev:.1e}"),
    ))
}

const PAIRS: [(ErrorAxis, ErrorAxis, &str); 3] = [
    (ErrorAxis::Timing, ErrorAxis::LogXi, "S_T,xi"),
    (ErrorAxis::Omega0, ErrorAxis::LogXi, "S_w0,xi"),
    (ErrorAxis::Omega0, ErrorAxis::Timing, "S_w0,T"),
];

fn separability_on(scale: f64, n: usize) -> Result<Vec<(f64, f64)>, String> {
    let s = reference_setup()?;
    PAIRS
        .iter()
        .map(|&(a, b, _)| {
            let g = sweep_2d(
                &s,
                SweepMethod::FullTransform,
                &AxisSpec::region(a, scale, n).map_err(err)?,
                &AxisSpec::region(b, scale, n).map_err(err)?,
            )
            .map_err(err)?;
            Ok((separability_index(&g.values, false).map_err(err)?, separability_index(&g.values, true).map_err(err)?))
        })
        .collect()
}

fn c5_separability() -> Result<(bool, String), String> {
    let s = separability_on(2.0, 121)?;
    let want = [(0.87, 0.80, 0.01), (0.87, 0.80, 0.01), (0.998, 0.97, 0.001)];
    let ok = s
        .iter()
        .zip(&want)
        .all(|(&(v, v0), &(w, w0, tol))| (v - w).abs() <= tol && (v0 - w0).abs() <= 0.01);
    let detail = PAIRS
        .iter()
        .zip(&s)
        .map(|((_, _, name), (v, v0))| format!("{name} {v:.4} (zero-mean {v0:.4})"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, format!("121x121 on R2: {detail}")))
}

fn c6_stability() -> Result<(bool, String), String> {
    let fine = separability_on(2.0, 121)?;
    let coarse = separability_on(2.0, 61)?;
    let worst = fine.iter().zip(&coarse).map(|(a, b)| (a.0 - b.0).abs()).fold(0.0, f64::max);
    Ok((worst < 0.005, format!("max |S(121) - S(61)| on R2 = {worst:.2e}")))
}

fn c7_random_baseline() -> Result<(bool, String), String> {
    let b = random_matrix_baseline(61, 100, 7).map_err(err)?;
    Ok((
        (b.mean - 0.758).abs() <= 0.01,
        format!("61x61 uniform, 100 trials: mean S {:.4}, std {:.4}, zero-mean mean {:.4}", b.mean, b.std, b.mean_zero_mean),
    ))
}

fn c8_impulse_limit() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (x, y, z) = (rng.random_range(-3.0..3.0), rng.random_range(-6.0..6.0), rng.random_range(-7.5..7.5));
        let q = overlap_limit_adaptive(exp_beta, (0.0, 200.0), &[0.0], x, y, z);
        worst = worst.max((q - psucc_closed_form_r0(x, y, z)).abs());
    }
    // Separability of the closed form on R4 (401 samples per axis).
    let n = 401;
    let axis = |a: ErrorAxis| AxisSpec::region(a, 4.0, n).map(|s| s.samples());
    let mut s = Vec::new();
    for &(a, b, _) in &PAIRS {
        let (sa, sb) = (axis(a).map_err(err)?, axis(b).map_err(err)?);
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let mut xyz = [0.0; 3];
            for (ax, v) in [(a, sa[i]), (b, sb[j])] {
                match ax {
                    ErrorAxis::Omega0 => xyz[0] = v,
                    ErrorAxis::LogXi => xyz[1] = v,
                    ErrorAxis::Timing => xyz[2] = v,
                }
            }
            psucc_closed_form_r0(xyz[0], xyz[1], xyz[2])
        });
        s.push(separability_index(&m, true).map_err(err)?);
    }
    let ok = worst <= 1e-3 && (s[0] - 0.78).abs() <= 0.02 && (s[1] - 0.85).abs() <= 0.02 && (s[2] - 1.00).abs() <= 0.02;
    Ok((
        ok,
        format!(
            "closed form vs quadrature max dev {worst:.1e}; zero-mean S on R4: T,xi {:.4} w0,xi {:.4} w0,T {:.4}",
            s[0], s[1], s[2]
        ),
    ))
}

fn gaussian_weight(sigma: f64, gamma: f64) -> Result<f64, String> {
    let g = TimeGrid::spanning(-12.0 * sigma, 12.0 * sigma, sigma / 400.0).map_err(err)?;
    let norm = (gamma * sigma * PI.sqrt()).sqrt();
    let b = ComplexSignal::from_real_fn(g, |t| (-t * t / (2.0 * sigma * sigma)).exp() / norm).map_err(err)?;
    let p = check_beta1_producible(&b, gamma).map_err(err)?;
    if p.producible {
        return Err(format!("gaussian with sigma {sigma} reported producible"));
    }
    Ok(p.max_weight)
}

fn sech_producible(sigma: f64, gamma: f64) -> Result<bool, String> {
    let g = TimeGrid::spanning(-40.0 * sigma, 40.0 * sigma, sigma / 400.0).map_err(err)?;
    let amp = 1.0 / (2.0 * gamma * sigma).sqrt();
    let b = ComplexSignal::from_real_fn(g, |t| amp / (t / sigma).cosh()).map_err(err)?;
    Ok(check_beta1_producible(&b, gamma).map_err(err)?.producible)
}

fn c9_producibility() -> Result<(bool, String), String> {
    let gamma = 2.0;
    let w1 = gaussian_weight(1.0 / gamma, gamma)?;
    let w2 = gaussian_weight(1e-10 / gamma, gamma)?;
    let step = 0.01;
    let sigmas: Vec<f64> = (0..=40).map(|i| (1.8 + step * i as f64) / gamma).collect();
    let flags = sigmas.iter().map(|&s| sech_producible(s, gamma)).collect::<Result<Vec<bool>, String>>()?;
    let flip = flags.windows(2).position(|w| !w[0] && w[1]).map(|i| sigmas[i + 1] * gamma);
    let monotone = flags.windows(2).all(|w| w[0] <= w[1]);
    let ok = (w1 - 0.83).abs() <= 0.01
        && (w2 / 2e-10) > 0.1
        && (w2 / 2e-10) < 10.0
        && monotone
        && flip.is_some_and(|f| (f - 2.0).abs() <= step + 1e-12);
    Ok((
        ok,
        format!(
            "gaussian w^2(1/g) = {w1:.4}, w^2(1e-10/g) = {w2:.2e}; sech producible from sigma*gamma = {}",
            flip.map_or("none".into(), |f| format!("{f:.2}"))
        ),
    ))
}

fn c10_closed_forms() -> Result<(bool, String), String> {
    let mut worst: f64 = 0.0;
    for (gamma1, k) in [(2.0, 2.0), (2.0, 1.0)] {
        let link = LinkParams::new(gamma1, 1.0, 0.0, k).map_err(err)?;
        let em = Emission::logistic(&link).map_err(err)?;
        let g = em.grid();
        for i in (0..g.n).step_by(37) {
            let t = g.t(i);
            worst = worst.max((em.beta1.values[i].re - beta1_closed_form_logistic(&link, t)).abs());
        }
    }
    // r = 1e-3 on a custom grid: k = 1, gamma1 = 2e-3.
    let link = LinkParams::new(2e-3, 1.0, 0.0, 1.0).map_err(err)?;
    let g = TimeGrid::spanning(-15.0, 30.0, 1.0 / 400.0).map_err(err)?;
    let em = Emission::from_alpha1(logistic_alpha1(&link, g), link.gamma1).map_err(err)?;
    let asym = |t: f64| {
        let l = 1.0 / (1.0 + (2.0 * t).exp());
        if t < 0.0 {
            (1.0 - l * l).max(0.0).sqrt()
        } else {
            ((-link.gamma1 * t).exp() - l * l).max(0.0).sqrt()
        }
    };
    let small_r = (0..g.n).map(|i| (em.beta1.values[i].re - asym(g.t(i))).abs()).fold(0.0, f64::max);
    Ok((
        worst <= 1e-6 && small_r <= 2e-3,
        format!("r=1/2,1 construction vs closed form max dev {worst:.1e}; r=1e-3 vs asymptotic {small_r:.1e}"),
    ))
}

fn decay_run(r: f64, model: DecayModel) -> Result<EmissionMetrics, String> {
    let link = LinkParams::new(2.0 * r, 1.0, 0.0, 1.0).map_err(err)?;
    logistic_emission_with_decay(&link, &model).map_err(err)
}

fn c11_decay() -> Result<(bool, String), String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [1.0, 5.0, 20.0] {
        let run = decay_run(5.0, DecayModel::large_detuning(c).map_err(err)?)?;
        let target = c / (1.0 + c);
        ok &= (run.efficiency - target).abs() <= 0.01;
        parts.push(format!("r=5 C={c}: eta^2 {:.4} vs {target:.4}", run.efficiency));
    }
    for r in [0.25, 5.0] {
        let i = decay_run(r, DecayModel::large_detuning(5.0).map_err(err)?)?;
        let ii = decay_run(r, DecayModel::finite_detuning_default(5.0).map_err(err)?)?;
        ok &= (0.983..=0.995).contains(&i.overlap) && (i.overlap - ii.overlap).abs() <= 0.002;
        parts.push(format!("r={r} C=5: overlap i {:.4}, ii {:.4}", i.overlap, ii.overlap));
    }
    Ok((ok, parts.join("; ")))
}

fn slowly_varying_overlap(r: f64) -> Result<f64, String> {
    let gamma = 1.0;
    let k = gamma / (2.0 * r);
    let link = LinkParams::new(gamma, 1.0, 0.0, k).map_err(err)?;
    let g = TimeGrid::spanning(-15.0 / k, 15.0 / k, (1.0 / k).min(1.0 / gamma) / 200.0).map_err(err)?;
    let amp = (k / (2.0 * gamma)).sqrt();
    let target = ComplexSignal::from_fn(g, |t| {
        Complex64::from_polar(amp / (k * t).cosh(), (k * t).atan() + 0.5 * PI)
    })
    .map_err(err)?;
    let psi = target.scale(Complex64::new(gamma.sqrt(), 0.0));
    let design = pulse_from_beta1_slowly_varying(&psi, gamma).map_err(err)?;
    let u = UnitaryParams::new(0.0, 1.0, 0.0, 0.0).map_err(err)?;
    let traj = integrate_general(
        &design.drive(),
        &ComplexSignal::zeros(g),
        0.0,
        0.0,
        &link,
        &u,
        Amplitudes::excited_node1(),
        g,
    )
    .map_err(err)?;
    let overlap = hqst::inner_product(&target, &traj.beta1_signal()).map_err(err)? * gamma;
    Ok(overlap.norm())
}

fn c12_slowly_varying() -> Result<(bool, String), String> {
    let rs = [1.0, 2.0, 4.0, 8.0, 16.0];
    let vals = rs.iter().map(|&r| slowly_varying_overlap(r)).collect::<Result<Vec<f64>, String>>()?;
    let monotone = vals.windows(2).all(|w| w[1] > w[0]);
    let ok = monotone && vals[4] > 0.999;
    let detail = rs.iter().zip(&vals).map(|(r, v)| format!("r={r}: {v:.5}")).collect::<Vec<_>>().join(", ");
    Ok((ok, format!("emitted overlap {detail}")))
}

/// Printed table values as strings so the tolerance follows the printed digits.
const PRINTED: [(&str, &str, &str, &str); 13] = [
    ("Ritter 2012", "73.5", "90.0", "43.8"),
    ("Reiserer 2013/2014", "85.7", "92.2", "62.5"),
    ("Chibani 2016", "98.5", "56.9", "31.4"),
    ("Morin 2019", "74.6", "88.9", "44.0"),
    ("Daiss 2021 A", "88.5", "92.0", "66.3"),
    ("Daiss 2021 B", "87.3", "85.7", "56.0"),
    ("Deist 2022", "82.1", "", ""),
    ("Keller 2004", "45.5", "99.0", "20.3"),
    ("Steiner 2014", "4.6", "32.3", "0.02"),
    ("Begley 2016", "23.6", "87.0", "4.2"),
    ("Krutyanskiy 2023 A", "44.7", "20.0", "0.8"),
    ("Krutyanskiy 2023 B", "65.7", "78.0", "26.3"),
    ("Takahashi 2020", "76.2", "20.0", "2.3"),
];

/// Row whose printed emission probability is reproduced neither from the raw rates
/// (44.63%) nor from its printed two-decimal cooperativity (44.75%). It is held to
/// one printed unit instead of half a unit, and is named in the output.
const INCONSISTENT_PEM_ROW: &str = "Krutyanskiy 2023 A";

fn printed_deviation_in_units(value_percent: f64, printed: &str) -> f64 {
    let decimals = printed.split('.').nth(1).map_or(0, str::len) as i32;
    let unit = 10f64.powi(-decimals);
    let p: f64 = printed.parse().unwrap_or(f64::NAN);
    (value_percent - p).abs() / unit
}

fn matches_printed(value_percent: f64, printed: &str) -> bool {
    printed_deviation_in_units(value_percent, printed) <= 0.5 + 1e-9
}

fn c13_budget() -> Result<(bool, String), String> {
    let recs = builtin_cooperativity_records();
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for (label, pem, pcav, ptot) in PRINTED {
        let r = recs.iter().find(|r| r.label == label).ok_or(format!("missing row {label}"))?;
        // Probabilities are accepted from the raw rates or from the two-decimal printed
        // cooperativity, since the table itself mixes the two routes.
        let raw = 100.0 * r.p_em();
        let rounded = 100.0 * survival((r.c_em * 100.0).round() / 100.0);
        let pem_ok = if matches_printed(raw, pem) {
            true
        } else if matches_printed(rounded, pem) {
            notes.push(format!("{label} P_em via printed C_em"));
            true
        } else if label == INCONSISTENT_PEM_ROW && printed_deviation_in_units(raw, pem) <= 1.0 {
            notes.push(format!("{label} P_em {raw:.2} vs printed {pem}, one-unit exception"));
            true
        } else {
            false
        };
        let row_ok = pem_ok
            && match (r.p_cav(), r.p_tot()) {
                (Some(pc), Some(pt)) => matches_printed(100.0 * pc, pcav) && matches_printed(100.0 * pt, ptot),
                (None, None) => pcav.is_empty() && ptot.is_empty(),
                _ => false,
            };
        if !row_ok {
            bad.push(label);
        }
    }
    let a = cooperativity_averages(&recs).map_err(err)?;
    let r1 = |v: f64| (v * 10.0).round() / 10.0;
    let avg_ok = r1(a.c_em) == 9.0 && r1(a.c_cav) == 5.9 && r1(a.c_em_trimmed) == 3.6 && r1(a.c_cav_trimmed) == 5.8;
    if !bad.is_empty() {
        notes.push(format!("mismatch: {}", bad.join(", ")));
    }
    Ok((
        bad.is_empty() && avg_ok,
        format!(
            "{} of {} rows match printed rounding [{}]; averages C_em {:.3}, C_cav {:.3}, trimmed {:.3}/{:.3}",
            PRINTED.len() - bad.len(),
            PRINTED.len(),
            notes.join("; "),
            a.c_em,
            a.c_cav,
            a.c_em_trimmed,
            a.c_cav_trimmed
        ),
    ))
}

fn c14_ecz() -> Result<(bool, String), String> {
    let en0 = worst_case_expected_trials(0.0).map_err(err)?;
    let eps10 = bisect(|e| worst_case_expected_trials(e).unwrap_or(f64::INFINITY) - 10.0, 0.0, 0.99, 1e-12)
        .ok_or("no E[n]=10 crossing")?;
    let p15 = psuccess_for_expected_trials(15.0, 0.0, 10.0).map_err(err)?;
    let p5 = psuccess_for_expected_trials(5.0, 0.0, 10.0).map_err(err)?;
    let mut both_dev: f64 = 0.0;
    for eps in [0.05f64, 0.2, 0.4, 0.6] {
        let a = Complex64::new((1.0 - eps).sqrt(), 0.0);
        let ch = EczChannel::systematic(a, a, Complex64::new(eps.sqrt(), 0.0), Complex64::new(0.0, 0.0)).map_err(err)?;
        let en = ecz_expected_trials(&ch, true).map_err(err)?;
        both_dev = both_dev.max((en * (1.0 - eps).powi(3) - 1.0).abs());
    }
    let ok = (en0 - 1.0).abs() < 1e-15
        && (eps10 - 0.747).abs() <= 0.005
        && (p15 - 0.33).abs() <= 0.02
        && (p5 - 0.53).abs() <= 0.02
        && both_dev < 1e-12;
    Ok((
        ok,
        format!(
            "E[n](0) = {en0}; E[n]=10 at eps {eps10:.4}; bare P at E[n]=10: C0=15 {p15:.4}, C0=5 {p5:.4}; both-errors rel dev {both_dev:.1e}"
        ),
    ))
}

fn c15_fidelity() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut dev_x1: f64 = 0.0;
    let mut dev_min: f64 = 0.0;
    let mut argmin_dev: f64 = 0.0;
    let mut dev_avg: f64 = 0.0;
    for _ in 0..10 {
        let a: f64 = rng.random_range(0.0..1.0);
        let dt: f64 = rng.random_range(-PI..PI);
        dev_x1 = dev_x1.max((fidelity(&FidelityInputs::new(1.0, a, dt).map_err(err)?) - a * a).abs());
        let f_half = fidelity(&FidelityInputs::new(0.5, 1.0, dt).map_err(err)?);
        let x_min = golden_max(|x| -fidelity(&FidelityInputs { x, a: 1.0, dtheta: dt }), 0.0, 1.0, 1e-10);
        dev_min = dev_min.max((f_half - (dt / 2.0).cos().powi(2)).abs());
        argmin_dev = argmin_dev.max((x_min - 0.5).abs());
        let oracle = hqst::quad::adaptive(
            |th: f64| fidelity(&FidelityInputs { x: (th / 2.0).sin().powi(2), a, dtheta: dt }) / PI,
            0.0,
            PI,
            1e-14,
            1e-13,
        );
        dev_avg = dev_avg.max((avg_fidelity(a, dt) - oracle).abs());
    }
    let g = 1.7;
    let t_best = golden_max(|t| exp_packet_self_overlap(g, t), 0.0, 10.0, 1e-10);
    let peak = exp_packet_self_overlap(g, t_best);
    let ok = dev_x1 < 1e-15 && dev_min < 1e-12 && argmin_dev < 1e-6 && dev_avg <= 1e-6 && (t_best - 2.0 / g).abs() <= 1e-6 && (peak - 4.0 / (E * E)).abs() <= 1e-6;
    Ok((
        ok,
        format!(
            "F(x=1)-a^2 {dev_x1:.1e}; F(1/2) vs cos^2 {dev_min:.1e}, argmin dev {argmin_dev:.1e}; <F> vs oracle {dev_avg:.1e}; overlap max {peak:.7} at gamma*T_d {:.7}",
            t_best * g
        ),
    ))
}

fn c16_thermal() -> Result<(bool, String), String> {
    let n_opt = thermal_occupation(angular_frequency_from_wavelength(700e-9), 293.0).map_err(err)?;
    let n_mw = thermal_occupation(angular_frequency_from_wavelength(20e-3), 293.0).map_err(err)?;
    Ok(((1e-31..1e-30).contains(&n_opt) && (n_mw / 400.0 - 1.0).abs() <= 0.05, format!("700 nm: {n_opt:.2e}; 20 mm: {n_mw:.1}")))
}

fn main() {
    let checks: [(u32, &str, Check); 16] = [
        (1, "transfer at the reference point", c1_fig2),
        (2, "optimal timing", c2_timing),
        (3, "ODE vs overlap", c3_ode_oracle),
        (4, "frequency-error curve", c4_frequency),
        (5, "separability indices", c5_separability),
        (6, "separability grid stability", c6_stability),
        (7, "random-matrix baseline", c7_random_baseline),
        (8, "impulse limit", c8_impulse_limit),
        (9, "producibility", c9_producibility),
        (10, "closed-form cavity amplitude", c10_closed_forms),
        (11, "spontaneous decay", c11_decay),
        (12, "slowly varying pulse design", c12_slowly_varying),
        (13, "loss budget table", c13_budget),
        (14, "error-correction overhead", c14_ecz),
        (15, "fidelity", c15_fidelity),
        (16, "thermal occupation", c16_thermal),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, name, f) in checks {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let t0 = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {id:>2} {name}: {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
