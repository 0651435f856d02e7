//! One function per subcommand. Each builds its CSV in memory and writes it
//! once at the end; summaries go to stderr.

use anyhow::Context;
use rayon::prelude::*;

use hqst::analysis::{
    fwhm, ode_oracle, random_matrix_baseline, random_points_in_region, separability_index, sweep_1d, sweep_2d,
    AxisSpec, ErrorAxis,
};
use hqst::budget::{
    builtin_cooperativity_records, cooperativity_averages, ecz_expected_trials, en_vs_psuccess_curve,
    load_cooperativity_csv, worst_case_expected_trials, EczChannel,
};
use hqst::dynamics::{c_eff, logistic_emission_with_decay, p_success_ode, DecayModel};
use hqst::wavepacket::{ideal_phi, synthesize_psi};
use hqst::{Complex64, LinkParams};

use crate::config::{axis_spec, linspace, parse_range, DecayKindArg, Scenario};
use crate::output::{num, opt_num, Table};
use crate::Command;

pub fn dispatch(cmd: &Command, s: &Scenario) -> anyhow::Result<()> {
    match cmd {
        Command::Wavepacket(_) => wavepacket(s),
        Command::Psuccess { no_ode, .. } => psuccess(s, !no_ode),
        Command::Sweep(_) => sweep(s),
        Command::Separability(_) => separability(s),
        Command::Budget(_) => budget(s),
        Command::Ecz { .. } => ecz(s),
        Command::Decay(_) => decay(s),
        Command::Validate { .. } => validate(s),
        Command::Table { .. } => table(s),
    }
}

fn wavepacket(s: &Scenario) -> anyhow::Result<()> {
    let setup = s.setup()?;
    let u = s.unitary(&setup)?;
    let grid = setup.eval_grid(&u)?;
    let em = &setup.emission;
    let phi = ideal_phi(&em.beta1, &setup.link, &setup.ideal_unitary(), grid);
    let psi = synthesize_psi(&em.beta1, &setup.link, &u, grid);
    let mut t = Table::new(
        "wavepacket",
        &s.hash("wavepacket"),
        &[
            "t", "alpha1_re", "alpha1_im", "beta1_re", "beta1_im", "drive1_re", "drive1_im", "phi_re", "phi_im", "psi_re",
            "psi_im",
        ],
    );
    for i in 0..grid.n {
        let ti = grid.t(i);
        let (a, b, g) = (em.alpha1.at(ti), em.beta1.at(ti), em.pulse.at(ti));
        let (p, q) = (phi.values[i], psi.values[i]);
        t.row(&[ti, a.re, a.im, b.re, b.im, g.re, g.im, p.re, p.im, q.re, q.im].map(num));
    }
    t.finish(s.output.as_ref())
}

fn psuccess(s: &Scenario, with_ode: bool) -> anyhow::Result<()> {
    let setup = s.setup()?;
    let u = s.unitary(&setup)?;
    let (x, y, z) = setup.error_variables(&u);
    let p = setup.p_success(&u)?;
    let ode = if with_ode { Some(p_success_ode(&setup, &u)?) } else { None };
    let mut t = Table::new(
        "psuccess",
        &s.hash("psuccess"),
        &[
            ErrorAxis::Omega0.header(),
            ErrorAxis::LogXi.header(),
            ErrorAxis::Timing.header(),
            "omega0",
            "xi",
            "timing",
            "t_i_star",
            "p_success_overlap",
            "p_success_ode",
        ],
    );
    t.row(&[
        num(x),
        num(y),
        num(z),
        num(u.omega0),
        num(u.xi),
        num(u.timing),
        num(setup.t_i_star()),
        num(p),
        opt_num(ode),
    ]);
    t.finish(s.output.as_ref())
}

fn sweep(s: &Scenario) -> anyhow::Result<()> {
    let setup = s.setup()?;
    let cfg = &s.sweep;
    let a1 = axis_spec(&cfg.axis, &cfg.range)?;
    let hash = s.hash("sweep");
    match (&cfg.axis2, &cfg.range2) {
        (None, None) => {
            let (xs, ps) = sweep_1d(&setup, cfg.method.into(), &a1)?;
            match fwhm(&xs, &ps) {
                Ok(w) => eprintln!("fwhm along {}: {w:.6}", a1.axis.name()),
                Err(e) => eprintln!("fwhm along {}: {e}", a1.axis.name()),
            }
            let mut t = Table::new("sweep", &hash, &[a1.axis.header(), "p_success"]);
            for (x, p) in xs.iter().zip(&ps) {
                t.row(&[num(*x), num(*p)]);
            }
            t.finish(s.output.as_ref())
        }
        (Some(ax2), Some(r2)) => {
            let a2 = axis_spec(ax2, r2)?;
            let g = sweep_2d(&setup, cfg.method.into(), &a1, &a2)?;
            let mut t = Table::new("sweep", &hash, &[a1.axis.header(), a2.axis.header(), "p_success"]);
            for (i, v1) in g.samples1.iter().enumerate() {
                for (j, v2) in g.samples2.iter().enumerate() {
                    t.row(&[num(*v1), num(*v2), num(g.values[(i, j)])]);
                }
            }
            t.finish(s.output.as_ref())
        }
        _ => anyhow::bail!("a two-dimensional sweep needs both axis2 and range2"),
    }
}

fn separability(s: &Scenario) -> anyhow::Result<()> {
    let setup = s.setup()?;
    let cfg = &s.separability;
    let pairs = [
        (ErrorAxis::Timing, ErrorAxis::LogXi),
        (ErrorAxis::Omega0, ErrorAxis::LogXi),
        (ErrorAxis::Omega0, ErrorAxis::Timing),
    ];
    let mut t =
        Table::new("separability", &s.hash("separability"), &["pair", "points", "region_scale", "s", "s_zero_mean"]);
    for (a, b) in pairs {
        let g = sweep_2d(
            &setup,
            cfg.method.into(),
            &AxisSpec::region(a, cfg.scale, cfg.points)?,
            &AxisSpec::region(b, cfg.scale, cfg.points)?,
        )?;
        t.row(&[
            format!("{}-{}", a.name(), b.name()),
            cfg.points.to_string(),
            num(cfg.scale),
            num(separability_index(&g.values, false)?),
            num(separability_index(&g.values, true)?),
        ]);
    }
    if cfg.baseline_trials > 0 {
        let b = random_matrix_baseline(cfg.points, cfg.baseline_trials, s.seed)?;
        eprintln!("uniform baseline: mean {:.4}, std {:.4} over {} trials", b.mean, b.std, cfg.baseline_trials);
        t.row(&["uniform-random".into(), cfg.points.to_string(), String::new(), num(b.mean), num(b.mean_zero_mean)]);
    }
    t.finish(s.output.as_ref())
}

fn budget(s: &Scenario) -> anyhow::Result<()> {
    let cfg = &s.budget;
    let (lo, hi, n) = parse_range(&cfg.psuccess)?;
    let axis = linspace(lo, hi, n);
    let mut t = Table::new("budget", &s.hash("budget"), &["c0", "x_over_xtl", "one_minus_p_success", "expected_trials"]);
    for &c0 in &cfg.c0 {
        for (one_minus_p, en) in en_vs_psuccess_curve(c0, cfg.x_over_xtl, &axis)? {
            t.row(&[num(c0), num(cfg.x_over_xtl), num(one_minus_p), num(en)]);
        }
    }
    t.finish(s.output.as_ref())
}

fn ecz(s: &Scenario) -> anyhow::Result<()> {
    let (lo, hi, n) = parse_range(&s.ecz.epsilon)?;
    let mut t = Table::new("ecz", &s.hash("ecz"), &["epsilon", "expected_trials_worst_case", "expected_trials_both_errors"]);
    let zero = Complex64::new(0.0, 0.0);
    for eps in linspace(lo, hi, n) {
        if eps >= 1.0 {
            continue;
        }
        let worst = worst_case_expected_trials(eps)?;
        let a = Complex64::new((1.0 - eps).sqrt(), 0.0);
        let ch = EczChannel::systematic(a, a, Complex64::new(eps.sqrt(), 0.0), zero)?;
        t.row(&[num(eps), num(worst), num(ecz_expected_trials(&ch, true)?)]);
    }
    t.finish(s.output.as_ref())
}

fn decay_model(kind: DecayKindArg, c: f64, gamma_r: Option<f64>) -> hqst::Result<DecayModel> {
    match (kind, gamma_r) {
        (DecayKindArg::None, _) => Ok(DecayModel::none()),
        (DecayKindArg::LargeDetuning, _) => DecayModel::large_detuning(c),
        (DecayKindArg::FiniteDetuning, Some(g)) => DecayModel::finite_detuning(c, g),
        (DecayKindArg::FiniteDetuning, None) => DecayModel::finite_detuning_default(c),
    }
}

fn decay(s: &Scenario) -> anyhow::Result<()> {
    let cfg = &s.decay;
    let cases: Vec<(f64, f64)> = cfg.r.iter().flat_map(|&r| cfg.cooperativity.iter().map(move |&c| (r, c))).collect();
    let results = cases
        .par_iter()
        .map(|&(r, c)| {
            let link = LinkParams::new(2.0 * r, 1.0, 0.0, 1.0)?;
            logistic_emission_with_decay(&link, &decay_model(cfg.model, c, cfg.gamma_r)?)
        })
        .collect::<hqst::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "decay",
        &s.hash("decay"),
        &["r", "cooperativity", "ideal_efficiency", "efficiency", "shape_overlap", "c_eff"],
    );
    for ((r, c), m) in cases.iter().zip(&results) {
        t.row(&[num(*r), num(*c), num(c / (1.0 + c)), num(m.efficiency), num(m.overlap), num(c_eff(m.efficiency))]);
    }
    t.finish(s.output.as_ref())
}

fn validate(s: &Scenario) -> anyhow::Result<()> {
    let setup = s.setup()?;
    let cfg = &s.validate;
    let points = random_points_in_region(cfg.points, cfg.scale, s.seed);
    let res = ode_oracle(&setup, &points)?;
    let mut t = Table::new(
        "validate",
        &s.hash("validate"),
        &[
            ErrorAxis::Omega0.header(),
            ErrorAxis::LogXi.header(),
            ErrorAxis::Timing.header(),
            "p_success_overlap",
            "p_success_ode",
            "abs_diff",
        ],
    );
    let mut worst: f64 = 0.0;
    for (&(x, y, z), &(p, q)) in points.iter().zip(&res) {
        worst = worst.max((p - q).abs());
        t.row(&[x, y, z, p, q, (p - q).abs()].map(num));
    }
    eprintln!("max |P_ode - P_overlap| over {} points: {worst:.3e}", points.len());
    t.finish(s.output.as_ref())
}

fn table(s: &Scenario) -> anyhow::Result<()> {
    let recs = match &s.budget.data {
        Some(p) => load_cooperativity_csv(p).with_context(|| format!("loading {}", p.display()))?,
        None => builtin_cooperativity_records(),
    };
    let mut t = Table::new(
        "table",
        &s.hash("table"),
        &["label", "emitter_type", "c_em", "p_em_percent", "c_cav", "p_cav_percent", "p_tot_percent", "flags"],
    );
    for r in &recs {
        let f = r.flags;
        let flags: Vec<&str> = [
            (f.inferred, "inferred"),
            (f.loss_not_reported, "loss_not_reported"),
            (f.no_cavity, "no_cavity"),
            (f.lower_bound, "lower_bound"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        t.row(&[
            r.label.clone(),
            r.emitter_type.clone(),
            num(r.c_em),
            num(100.0 * r.p_em()),
            opt_num(r.c_cav),
            opt_num(r.p_cav().map(|p| 100.0 * p)),
            opt_num(r.p_tot().map(|p| 100.0 * p)),
            flags.join(";"),
        ]);
    }
    let a = cooperativity_averages(&recs)?;
    eprintln!(
        "averages: C_em {:.2}, C_cav {:.2}; without extremes: C_em {:.2}, C_cav {:.2}",
        a.c_em, a.c_cav, a.c_em_trimmed, a.c_cav_trimmed
    );
    t.finish(s.output.as_ref())
}
