//! Command-line front end of the `dunklpot` binary.
//!
//! Every subcommand reads its options from flags, optionally layered over a
//! TOML file given with `--config`, validates them into an
//! [`ExperimentConfig`] and writes CSV (profiles, rate tables) or JSON
//! (scalar reports). Exit codes: 0 on success, 1 on input errors, 2 on
//! numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::inversion::{
    truncated_biparam_inverse_sweep, truncated_riesz_inverse_sweep, InversionSpec,
};
use crate::numerics::{bessel_j, gamma};
use crate::potentials::{biparametric, riesz, PotentialKind, PotentialSpec};
use crate::radial_transform::{
    eval_at_origin, read_profile_file, sample_profile, transform_fn, weighted_norm,
    write_profile_csv, DunklParams, GridSpec, RadialProfile, TransformOptions,
};
use crate::rates::{convergence_rate, y_function, Modulus};
use crate::semigroup::{apply_semigroup, kernel_at_origin, kernel_profile, kernel_value, SemigroupSpec};
use crate::wavelet::{construct_vanishing_moments, WaveletMeasure};

#[derive(Parser, Debug)]
#[command(name = "dunklpot", version, about = "Dunkl-type potentials, semigroups and wavelet inversion")]
struct Cli {
    /// TOML file with default option values; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Omit the `# generated=` header line so output is byte-for-byte reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Setting {
    /// Dimension.
    #[arg(long)]
    n: Option<u32>,
    /// Multiplicity weight (sum of k over positive roots).
    #[arg(long)]
    gamma: Option<f64>,
    /// Radial grid as R_MIN:R_MAX:COUNT (log-spaced).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Debug, Default)]
struct InversionArgs {
    /// riesz or biparam.
    #[arg(long)]
    kind: Option<String>,
    /// Potential order alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Stability index beta > 0.
    #[arg(long)]
    beta: Option<f64>,
    /// Wavelet measure as s:c pairs, e.g. "1:1,2:-2,3:1".
    #[arg(long)]
    measure: Option<String>,
    /// gaussian, constant:C or file:PATH.
    #[arg(long)]
    profile: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel profile of the beta-semigroup.
    Kernel {
        #[command(flatten)]
        setting: Setting,
        /// Stability index beta > 0.
        #[arg(long)]
        beta: Option<f64>,
        /// Semigroup time t > 0.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Apply the beta-semigroup to a profile.
    Semigroup {
        #[command(flatten)]
        setting: Setting,
        /// Stability index beta > 0.
        #[arg(long)]
        beta: Option<f64>,
        /// Semigroup time t > 0.
        #[arg(long)]
        t: Option<f64>,
        /// gaussian, constant:C or file:PATH.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Apply a Riesz, bi-parametric, Bessel or Flett potential to a profile.
    Potential {
        #[command(flatten)]
        setting: Setting,
        /// riesz, biparam, bessel or flett.
        #[arg(long)]
        kind: Option<String>,
        /// Potential order alpha.
        #[arg(long)]
        alpha: Option<f64>,
        /// Stability index beta > 0.
        #[arg(long)]
        beta: Option<f64>,
        /// gaussian, constant:C or file:PATH.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Wavelet measures.
    Wavelet {
        #[command(subcommand)]
        action: WaveletCommand,
    },
    /// Invert a potential with truncated wavelet integrals along an eps grid.
    Invert {
        #[command(flatten)]
        setting: Setting,
        #[command(flatten)]
        inv: InversionArgs,
        /// EPS_MAX:EPS_MIN:COUNT (log-spaced) or a comma list.
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Convergence rate of the inversion at the origin.
    Rates {
        #[command(flatten)]
        setting: Setting,
        #[command(flatten)]
        inv: InversionArgs,
        /// Modulus of continuity, power:LAMBDA or power:LAMBDA:A:RHO.
        #[arg(long)]
        eta: Option<String>,
        /// EPS_MAX:EPS_MIN:COUNT (log-spaced) or a comma list.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Check golden values against closed forms.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum WaveletCommand {
    /// Build a measure with vanishing moments and tabulate C(r, nu).
    Make {
        /// Comma-separated atom positions.
        #[arg(long)]
        points: Option<String>,
        /// Number of vanishing moments M (moments 0..=M vanish).
        #[arg(long)]
        vanish: Option<usize>,
        /// Comma-separated orders r for C(r, nu).
        #[arg(long)]
        r: Option<String>,
    },
}

/// Option values read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<u32>,
    gamma: Option<f64>,
    grid: Option<String>,
    kind: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    t: Option<f64>,
    measure: Option<String>,
    profile: Option<String>,
    eps_grid: Option<String>,
    eps: Option<String>,
    eta: Option<String>,
    points: Option<String>,
    vanish: Option<usize>,
    r: Option<String>,
    out: Option<PathBuf>,
    no_timestamp: Option<bool>,
}

/// Where the input profile comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Gaussian,
    Constant(f64),
    File(PathBuf),
}

impl ProfileSource {
    fn parse(s: &str) -> Result<Self> {
        if s == "gaussian" {
            Ok(ProfileSource::Gaussian)
        } else if let Some(c) = s.strip_prefix("constant:") {
            Ok(ProfileSource::Constant(parse_num(c, "profile")?))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(ProfileSource::File(PathBuf::from(p)))
        } else {
            Err(Error::Parse(format!(
                "--profile must be gaussian, constant:C or file:PATH, got {s:?}"
            )))
        }
    }

    /// Sample or read the profile.
    pub fn load(&self, grid: &GridSpec) -> Result<RadialProfile> {
        match self {
            ProfileSource::Gaussian => sample_profile(|r| (-0.5 * r * r).exp(), grid),
            ProfileSource::Constant(c) => RadialProfile::constant(*c, grid),
            ProfileSource::File(p) => read_profile_file(p),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub enum Experiment {
    Kernel {
        spec: SemigroupSpec,
        grid: GridSpec,
    },
    Semigroup {
        spec: SemigroupSpec,
        profile: ProfileSource,
        grid: GridSpec,
    },
    Potential {
        spec: PotentialSpec,
        profile: ProfileSource,
        grid: GridSpec,
    },
    Wavelet {
        nu: WaveletMeasure,
        orders: Vec<f64>,
    },
    Invert {
        spec: InversionSpec,
        eps: Vec<f64>,
        profile: ProfileSource,
        grid: GridSpec,
    },
    Rates {
        spec: InversionSpec,
        eta: Modulus,
        eps: Vec<f64>,
        profile: ProfileSource,
        grid: GridSpec,
    },
    Selftest,
}

/// An experiment plus output settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
    pub timestamp: bool,
}

fn parse_num<T: std::str::FromStr>(s: &str, flag: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("--{flag}: malformed value {s:?}")))
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| parse_num(x, flag)).collect()
}

/// `A:B:COUNT` as COUNT log-spaced values from A to B, or a comma list.
fn parse_eps(s: &str, flag: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let eps = if parts.len() == 3 {
        let a: f64 = parse_num(parts[0], flag)?;
        let b: f64 = parse_num(parts[1], flag)?;
        let n: usize = parse_num(parts[2], flag)?;
        if !(a > 0.0 && b > 0.0) || n < 2 {
            return Err(Error::InvalidArgument(format!("--{flag}: need positive ends and at least 2 points")));
        }
        (0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect()
    } else {
        parse_list(s, flag)?
    };
    if eps.len() < 2 || eps.iter().any(|&e| !(e > 0.0)) || eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "--{flag}: eps values must be positive and strictly decreasing"
        )));
    }
    Ok(eps)
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("--grid must be R_MIN:R_MAX:COUNT, got {s:?}")));
    }
    GridSpec::new(
        parse_num(parts[0], "grid")?,
        parse_num(parts[1], "grid")?,
        parse_num(parts[2], "grid")?,
    )
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing required option --{flag}")))
}

struct Resolved<'a> {
    cfg: &'a ConfigFile,
}

impl Resolved<'_> {
    fn params(&self, s: &Setting) -> Result<DunklParams> {
        DunklParams::new(s.n.or(self.cfg.n).unwrap_or(1), s.gamma.or(self.cfg.gamma).unwrap_or(0.0))
    }

    fn grid(&self, s: &Setting, default: GridSpec) -> Result<GridSpec> {
        match s.grid.clone().or_else(|| self.cfg.grid.clone()) {
            Some(g) => parse_grid(&g),
            None => Ok(default),
        }
    }

    fn profile(&self, p: &Option<String>) -> Result<ProfileSource> {
        ProfileSource::parse(p.as_deref().or(self.cfg.profile.as_deref()).unwrap_or("gaussian"))
    }

    fn inversion(&self, s: &Setting, inv: &InversionArgs) -> Result<InversionSpec> {
        let params = self.params(s)?;
        let kind = match inv.kind.as_deref().or(self.cfg.kind.as_deref()).unwrap_or("riesz") {
            "riesz" => PotentialKind::Riesz,
            "biparam" => PotentialKind::Biparametric,
            other => return Err(Error::Parse(format!("--kind must be riesz or biparam, got {other:?}"))),
        };
        let alpha = required(inv.alpha.or(self.cfg.alpha), "alpha")?;
        let beta = inv.beta.or(self.cfg.beta).unwrap_or(2.0);
        let nu: WaveletMeasure = inv
            .measure
            .as_deref()
            .or(self.cfg.measure.as_deref())
            .unwrap_or("1:1,2:-1")
            .parse()?;
        InversionSpec::new(nu, alpha, beta, params, kind)
    }
}

fn default_grid() -> GridSpec {
    GridSpec {
        r_min: 1e-3,
        r_max: 30.0,
        count: 600,
    }
}

fn to_args<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    args.into_iter().map(Into::into).collect()
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn build(cli: Cli) -> Result<ExperimentConfig> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    let res = Resolved { cfg: &cfg };
    let experiment = match &cli.command {
        Command::Kernel { setting, beta, t } => Experiment::Kernel {
            spec: SemigroupSpec::new(
                required(beta.or(cfg.beta), "beta")?,
                t.or(cfg.t).unwrap_or(1.0),
                res.params(setting)?,
            )?,
            grid: res.grid(setting, default_grid())?,
        },
        Command::Semigroup {
            setting,
            beta,
            t,
            profile,
        } => Experiment::Semigroup {
            spec: SemigroupSpec::new(
                required(beta.or(cfg.beta), "beta")?,
                required(t.or(cfg.t), "t")?,
                res.params(setting)?,
            )?,
            profile: res.profile(profile)?,
            grid: res.grid(setting, default_grid())?,
        },
        Command::Potential {
            setting,
            kind,
            alpha,
            beta,
            profile,
        } => {
            let params = res.params(setting)?;
            let alpha = required(alpha.or(cfg.alpha), "alpha")?;
            let beta = beta.or(cfg.beta);
            let spec = match kind.as_deref().or(cfg.kind.as_deref()).unwrap_or("riesz") {
                "riesz" => PotentialSpec::riesz(alpha, params)?,
                "biparam" => PotentialSpec::biparametric(alpha, required(beta, "beta")?, params)?,
                "bessel" => PotentialSpec::bessel(alpha, params)?,
                "flett" => PotentialSpec::flett(alpha, params)?,
                other => {
                    return Err(Error::Parse(format!(
                        "--kind must be riesz, biparam, bessel or flett, got {other:?}"
                    )))
                }
            };
            Experiment::Potential {
                spec,
                profile: res.profile(profile)?,
                grid: res.grid(setting, default_grid())?,
            }
        }
        Command::Wavelet {
            action: WaveletCommand::Make { points, vanish, r },
        } => {
            let points = parse_list(
                &required(points.clone().or_else(|| cfg.points.clone()), "points")?,
                "points",
            )?;
            let vanish = required(vanish.or(cfg.vanish), "vanish")?;
            let nu = construct_vanishing_moments(&points, vanish)?;
            let orders = match r.clone().or_else(|| cfg.r.clone()) {
                Some(r) => parse_list(&r, "r")?,
                None => vec![vanish as f64 + 0.5],
            };
            Experiment::Wavelet { nu, orders }
        }
        Command::Invert {
            setting,
            inv,
            eps_grid,
        } => Experiment::Invert {
            spec: res.inversion(setting, inv)?,
            eps: parse_eps(
                eps_grid.as_deref().or(cfg.eps_grid.as_deref()).unwrap_or("1e-1:1e-4:4"),
                "eps-grid",
            )?,
            profile: res.profile(&inv.profile)?,
            grid: res.grid(setting, default_grid())?,
        },
        Command::Rates {
            setting,
            inv,
            eta,
            eps,
        } => Experiment::Rates {
            spec: res.inversion(setting, inv)?,
            eta: eta.as_deref().or(cfg.eta.as_deref()).unwrap_or("power:1.0").parse()?,
            eps: parse_eps(eps.as_deref().or(cfg.eps.as_deref()).unwrap_or("1e-1:1e-4:8"), "eps")?,
            profile: res.profile(&inv.profile)?,
            grid: res.grid(setting, default_grid())?,
        },
        Command::Selftest => Experiment::Selftest,
    };
    Ok(ExperimentConfig {
        experiment,
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        timestamp: !(cli.no_timestamp || cfg.no_timestamp.unwrap_or(false)),
    })
}

/// Parse and validate a command line (including the program name).
pub fn parse_args<I, T>(args: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = Cli::try_parse_from(to_args(args)).map_err(|e| Error::Parse(e.to_string()))?;
    build(cli)
}

fn timestamp_line() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# generated={secs}\n")
}

fn profile_csv(p: &RadialProfile) -> Result<String> {
    let mut buf = Vec::new();
    write_profile_csv(p, &mut buf)?;
    Ok(String::from_utf8(buf).expect("profile CSV is ASCII"))
}

fn json_text(mut value: serde_json::Value, timestamp: bool) -> String {
    if timestamp {
        if let Some(obj) = value.as_object_mut() {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            obj.insert("generated".into(), json!(secs));
        }
    }
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

/// One golden-value comparison of the self-test.
#[derive(Debug, Clone)]
pub struct GoldenCheck {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl GoldenCheck {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Closed-form golden values checked by `dunklpot selftest`.
pub fn golden_checks() -> Result<Vec<GoldenCheck>> {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};
    let sqrt_pi = PI.sqrt();
    let mut out = Vec::new();
    let mut push = |name, value, expected, tolerance| {
        out.push(GoldenCheck {
            name,
            value,
            expected,
            tolerance,
        })
    };
    push("gamma(-1/2)", gamma(-0.5)?, -2.0 * sqrt_pi, 1e-13);
    push("J_1/2(pi/2)", bessel_j(0.5, PI / 2.0)?, 2.0 / PI, 1e-14);
    push("J_-1/2(pi)", bessel_j(-0.5, PI)?, -(2.0f64).sqrt() / PI, 1e-14);
    let opts = TransformOptions::default();
    let weber = transform_fn(&|s: f64| (-0.5 * s * s).exp(), &DunklParams::from_order(0.0)?, &[1.0], f64::INFINITY, &opts)?[0];
    let laplace = transform_fn(&|s: f64| (-s).exp(), &DunklParams::from_order(-0.5)?, &[2.0], f64::INFINITY, &opts)?[0];
    push("Weber integral v=0 r=1", weber, (-0.5f64).exp(), 1e-9);
    push("Laplace-Hankel v=-1/2 r=2", laplace, (2.0 / PI).sqrt() / 5.0, 1e-9);
    let grid = GridSpec::new(1e-4, 30.0, 1200)?;
    let gauss = sample_profile(|r| (-0.5 * r * r).exp(), &grid)?;
    let p1 = DunklParams::new(1, 0.0)?;
    push(
        "transform of Gaussian at origin (n=3, gamma=0.5)",
        eval_at_origin(&gauss, &DunklParams::new(3, 0.5)?)?,
        1.0,
        1e-7,
    );
    push(
        "weighted L2 norm of Gaussian (n=1)",
        weighted_norm(&gauss, 2.0, &p1)?,
        (sqrt_pi / 2.0).sqrt(),
        1e-9,
    );
    push(
        "Poisson kernel at origin (t=1, n=1)",
        kernel_at_origin(&SemigroupSpec::new(1.0, 1.0, p1)?)?,
        (2.0 / PI).sqrt(),
        1e-13,
    );
    push(
        "heat kernel at r=1 (t=1, n=3, gamma=0.5)",
        kernel_value(&SemigroupSpec::new(2.0, 1.0, DunklParams::new(3, 0.5)?)?, 1.0)?,
        0.25 * (-0.25f64).exp(),
        1e-14,
    );
    let built = construct_vanishing_moments(&[1.0, 2.0, 3.0], 1)?;
    push("vanishing-moment weight c_2 for points (1,2,3)", built.atoms()[1].1, -2.0, 1e-12);
    let nu12: WaveletMeasure = "1:1,2:-1".parse()?;
    let nu123: WaveletMeasure = "1:1,2:-2,3:1".parse()?;
    push("moment 2 of (1,-2,1)", nu123.moment(2.0), 2.0, 1e-12);
    push(
        "mu(1) for delta_1 - delta_2",
        nu12.laplace_transform(1.0),
        (-1.0f64).exp() - (-2.0f64).exp(),
        1e-15,
    );
    let c_half = 2.0 * sqrt_pi * (2f64.sqrt() - 1.0);
    push("C(1/2, delta_1 - delta_2)", nu12.normalizing_constant(0.5)?, c_half, 1e-13);
    push("C(1/2, delta_1 - delta_2) via mu", nu12.normalizing_constant_via_mu(0.5, 1e-9)?, c_half, 1e-6);
    let c_one = 3.0 * 3f64.ln() - 4.0 * 2f64.ln();
    push("C(1, (1,-2,1))", nu123.normalizing_constant(1.0)?, c_one, 1e-13);
    push("C(1, (1,-2,1)) via mu", nu123.normalizing_constant_via_mu(1.0, 1e-9)?, c_one, 1e-6);
    push("kappa(1/2) for delta_1 - delta_2", nu12.kappa(0.5), 1.0 - FRAC_1_SQRT_2, 1e-15);
    push(
        "K_1/2(4) for delta_1 - delta_2",
        nu12.rl_kernel(0.5, 4.0)?,
        (3f64.sqrt() - 2f64.sqrt()) / (2.0 * sqrt_pi),
        1e-14,
    );
    push("integral of K_1/2 equals C(1/2)", nu12.rl_kernel_integral(0.5, 1e-7)?, c_half, 1e-5);
    push("Y(2, 1e-4)", y_function(2.0, 1e-4), 1e-2, 1e-16);
    push("Y(1/2, 1e-2)", y_function(0.5, 1e-2), 1e-1, 1e-16);
    let p = DunklParams::new(2, 0.6)?;
    let v = p.v();
    let coarse = sample_profile(|r| (-0.5 * r * r).exp(), &GridSpec::new(1e-3, 20.0, 500)?)?;
    push(
        "Riesz potential of Gaussian at origin (alpha=1, n=2, gamma=0.6)",
        riesz(&coarse, &PotentialSpec::riesz(1.0, p)?)?.origin_value(),
        2f64.powf(-0.5) * gamma(v + 0.5)? / gamma(v + 1.0)?,
        1e-7,
    );
    Ok(out)
}

fn selftest_report() -> Result<(String, bool)> {
    let checks = golden_checks()?;
    let mut text = String::new();
    let mut all = true;
    for c in &checks {
        let ok = c.passed();
        all &= ok;
        text.push_str(&format!(
            "{} {}: value={:.16e} expected={:.16e} tol={:.1e}\n",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.expected,
            c.tolerance
        ));
    }
    text.push_str(&format!(
        "{} of {} golden values passed\n",
        checks.iter().filter(|c| c.passed()).count(),
        checks.len()
    ));
    Ok((text, all))
}

fn invert_report(spec: &InversionSpec, eps: &[f64], f: &RadialProfile) -> Result<serde_json::Value> {
    let c = spec.constant()?;
    let outs = match spec.kind {
        PotentialKind::Riesz => {
            let g = riesz(f, &PotentialSpec::riesz(spec.alpha, spec.params)?)?;
            truncated_riesz_inverse_sweep(&g, spec, eps)?
        }
        PotentialKind::Biparametric => {
            let g = biparametric(f, &PotentialSpec::biparametric(spec.alpha, spec.beta, spec.params)?)?;
            truncated_biparam_inverse_sweep(&g, spec, eps)?
        }
    };
    let mut rows = Vec::new();
    for (&e, out) in eps.iter().zip(&outs) {
        let approx = out.scaled(1.0 / c);
        let diff = approx.linear_combination(1.0, f, -1.0)?;
        rows.push(json!({
            "eps": e,
            "sup_error": approx.sup_distance(f),
            "weighted_l2_error": weighted_norm(&diff, 2.0, &spec.params)?,
            "origin_error": (approx.origin_value() - f.origin_value()).abs(),
        }));
    }
    Ok(json!({
        "kind": spec.kind,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "theta": spec.theta(),
        "n": spec.params.n,
        "gamma": spec.params.gamma,
        "measure": spec.nu.to_string(),
        "constant": c,
        "results": rows,
    }))
}

/// Run a validated experiment and return the text to emit plus whether it
/// counts as a success.
pub fn execute(config: &ExperimentConfig) -> Result<(String, bool)> {
    let stamp = if config.timestamp { timestamp_line() } else { String::new() };
    match &config.experiment {
        Experiment::Kernel { spec, grid } => Ok((stamp + &profile_csv(&kernel_profile(spec, grid)?)?, true)),
        Experiment::Semigroup { spec, profile, grid } => {
            let f = profile.load(grid)?;
            Ok((stamp + &profile_csv(&apply_semigroup(&f, spec)?)?, true))
        }
        Experiment::Potential { spec, profile, grid } => {
            let f = profile.load(grid)?;
            let out = match spec.kind {
                PotentialKind::Riesz => riesz(&f, spec)?,
                PotentialKind::Biparametric => biparametric(&f, spec)?,
            };
            Ok((stamp + &profile_csv(&out)?, true))
        }
        Experiment::Wavelet { nu, orders } => {
            let table = orders
                .iter()
                .map(|&r| Ok(json!({ "r": r, "constant": nu.normalizing_constant(r)? })))
                .collect::<Result<Vec<_>>>()?;
            let atoms: Vec<_> = nu.atoms().iter().map(|&(s, c)| json!({ "s": s, "c": c })).collect();
            let report = json!({
                "atoms": atoms,
                "vanishing_order": nu.vanishing_order(),
                "total_variation": nu.total_variation(),
                "constants": table,
            });
            Ok((json_text(report, config.timestamp), true))
        }
        Experiment::Invert {
            spec,
            eps,
            profile,
            grid,
        } => {
            let f = profile.load(grid)?;
            Ok((json_text(invert_report(spec, eps, &f)?, config.timestamp), true))
        }
        Experiment::Rates {
            spec,
            eta,
            eps,
            profile,
            grid,
        } => {
            let f = profile.load(grid)?;
            let report = convergence_rate(&f, spec, eta, eps)?;
            let mut text = stamp;
            text.push_str(&format!(
                "# predicted_exponent={:.16e} fitted_slope={:.16e} monotone={} passed={}\n",
                report.predicted_exponent, report.fitted_slope, report.monotone, report.passed
            ));
            text.push_str(&report.to_csv());
            Ok((text, true))
        }
        Experiment::Selftest => selftest_report(),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DUNKLPOT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("DUNKLPOT_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Parse("DUNKLPOT_THREADS must be at least 1".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match Cli::try_parse_from(to_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads()
        .and_then(|_| build(cli))
        .and_then(|config| {
            let (text, ok) = execute(&config)?;
            match &config.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(text.as_bytes())?;
                    stdout.flush()?;
                }
            }
            Ok(ok)
        });
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("dunklpot: error: {e}");
            exit_code(&e)
        }
    }
}
