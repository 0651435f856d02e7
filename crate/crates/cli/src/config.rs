//! Scenario files: sectioned TOML with every field optional. Missing link
//! parameters fall back to the reference link and missing unitary fields to the
//! ideal values for that link.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hqst::analysis::{AxisSpec, ErrorAxis, SweepMethod};
use hqst::transform::TransferSetup;
use hqst::{LinkParams, UnitaryParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Destination of the CSV; not part of the scenario hash.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub transfer: TransferSection,
    #[serde(default)]
    pub unitary: UnitarySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub separability: SeparabilitySection,
    #[serde(default)]
    pub decay: DecaySection,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub ecz: EczSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

impl Default for Scenario {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub gamma1: f64,
    pub gamma2: f64,
    pub zeta: f64,
    pub k: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        let r = LinkParams::reference();
        Self { gamma1: r.gamma1, gamma2: r.gamma2, zeta: r.zeta, k: r.k }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSection {
    pub t_l: f64,
}

impl Default for TransferSection {
    fn default() -> Self {
        Self { t_l: 10.0 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitarySection {
    pub omega0: Option<f64>,
    pub xi: Option<f64>,
    pub timing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Overlap with the finite capture window of the channel.
    Window,
    /// Overlap of the fully transformed packet in error variables.
    Full,
}

impl From<Method> for SweepMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Window => SweepMethod::Window,
            Method::Full => SweepMethod::FullTransform,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub method: Method,
    pub axis: String,
    pub range: String,
    pub axis2: Option<String>,
    pub range2: Option<String>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { method: Method::Window, axis: "omega0".into(), range: "-3:3:201".into(), axis2: None, range2: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeparabilitySection {
    pub method: Method,
    /// Region scale `s` of `R_s`.
    pub scale: f64,
    pub points: usize,
    /// Uniform random matrices for the baseline row; 0 skips it.
    pub baseline_trials: usize,
}

impl Default for SeparabilitySection {
    fn default() -> Self {
        Self { method: Method::Full, scale: 2.0, points: 121, baseline_trials: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DecayKindArg {
    None,
    LargeDetuning,
    FiniteDetuning,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    pub model: DecayKindArg,
    pub cooperativity: Vec<f64>,
    /// Ratios `r = γ₁/2k`; each run uses `k = 1`.
    pub r: Vec<f64>,
    /// `Γ_r` for the finite-detuning model; defaults to `1/(5 max(√C, 4))`.
    pub gamma_r: Option<f64>,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self { model: DecayKindArg::LargeDetuning, cooperativity: vec![1.0, 5.0, 20.0], r: vec![0.25, 5.0], gamma_r: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSection {
    /// Cooperativity dataset; the bundled one when absent.
    pub data: Option<PathBuf>,
    pub c0: Vec<f64>,
    /// Line length in units of the attenuation length.
    pub x_over_xtl: f64,
    pub psuccess: String,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self { data: None, c0: vec![5.0, 15.0], x_over_xtl: 0.0, psuccess: "0.05:1:96".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EczSection {
    pub epsilon: String,
}

impl Default for EczSection {
    fn default() -> Self {
        Self { epsilon: "0:0.95:96".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    pub points: usize,
    pub scale: f64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { points: 25, scale: 1.0 }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn link(&self) -> hqst::Result<LinkParams> {
        let l = &self.link;
        LinkParams::new(l.gamma1, l.gamma2, l.zeta, l.k)
    }

    pub fn setup(&self) -> hqst::Result<TransferSetup> {
        TransferSetup::logistic(self.link()?, self.transfer.t_l)
    }

    /// The configured unitary with unspecified fields at their ideal values.
    pub fn unitary(&self, setup: &TransferSetup) -> hqst::Result<UnitaryParams> {
        let ideal = setup.ideal_unitary();
        let u = &self.unitary;
        UnitaryParams::new(
            u.omega0.unwrap_or(ideal.omega0),
            u.xi.unwrap_or(ideal.xi),
            u.timing.unwrap_or(ideal.timing),
            self.transfer.t_l,
        )
    }

    /// SHA-256 of the canonical TOML form of the effective scenario and the
    /// subcommand, as 16 hex digits.
    pub fn hash(&self, command: &str) -> String {
        use sha2::{Digest, Sha256};
        let canonical = toml::to_string(self).expect("scenario serializes");
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0u8]);
        h.update(canonical.as_bytes());
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// `lo:hi:n` with `n ≥ 2`.
pub fn parse_range(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("range `{s}` must look like lo:hi:n");
    }
    let lo: f64 = parts[0].trim().parse().with_context(|| format!("range `{s}`: bad lower bound"))?;
    let hi: f64 = parts[1].trim().parse().with_context(|| format!("range `{s}`: bad upper bound"))?;
    let n: usize = parts[2].trim().parse().with_context(|| format!("range `{s}`: bad sample count"))?;
    if n < 2 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        bail!("range `{s}` needs hi > lo and n >= 2");
    }
    Ok((lo, hi, n))
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn parse_axis(name: &str) -> anyhow::Result<ErrorAxis> {
    ErrorAxis::parse(name).with_context(|| format!("unknown axis `{name}` (expected omega0, xi or timing)"))
}

pub fn axis_spec(name: &str, range: &str) -> anyhow::Result<AxisSpec> {
    let (lo, hi, n) = parse_range(range)?;
    Ok(AxisSpec::new(parse_axis(name)?, lo, hi, n)?)
}
