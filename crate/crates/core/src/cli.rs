//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and writes JSON (or CSV for sweeps) to stdout or `--out`.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain/condition/input error,
//! 3 numerical failure. Errors are also written to stderr as one JSON line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;

use crate::analysis;
use crate::bayesdemo::{self, Scenario};
use crate::bounds;
use crate::calibration::{CORPUS_SEED, CORPUS_SIZE};
use crate::error::{Error, Result};
use crate::io::{self, InstanceFile};
use crate::metrics;
use crate::quadform::{InversionConfig, QuadFormLaw};
use crate::spectrum::Spectrum;

#[derive(Parser, Debug)]
#[command(
    name = "ballprob",
    version,
    about = "Gaussian ball probabilities: exact laws of ‖ξ − a‖², comparison and anti-concentration bounds"
)]
struct Cli {
    /// Absolute tolerance of every inversion.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for corpora and Monte Carlo checks.
    #[arg(long, global = true, default_value_t = CORPUS_SEED)]
    seed: u64,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

/// A Gaussian law `‖ξ − a‖²`, given inline or as an instance file.
#[derive(Args, Debug, Clone)]
struct LawArgs {
    /// Covariance eigenvalues as a JSON array.
    #[arg(long, value_name = "JSON", conflicts_with = "instance")]
    spectrum: Option<String>,
    /// Shift in the eigenbasis of the sorted spectrum, as a JSON array.
    #[arg(long, value_name = "JSON", conflicts_with = "instance")]
    shift: Option<String>,
    /// Instance file {"spectrum": [..], "shift": [..]}.
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// Instance file for ξ (its shift is the ball centre a).
    #[arg(long = "x", value_name = "PATH", conflicts_with_all = ["sx", "shift"])]
    x: Option<PathBuf>,
    /// Instance file for η (its shift is ignored).
    #[arg(long = "y", value_name = "PATH", conflicts_with = "sy")]
    y: Option<PathBuf>,
    /// Spectrum of ξ as a JSON array.
    #[arg(long, value_name = "JSON")]
    sx: Option<String>,
    /// Spectrum of η as a JSON array.
    #[arg(long, value_name = "JSON")]
    sy: Option<String>,
    /// Shift a of the first ball, as a JSON array.
    #[arg(long, value_name = "JSON")]
    shift: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// κ(Σ) and its regime: the dimension-free factor in the density and
    /// comparison bounds.
    Kappa(LawArgs),
    /// P(‖ξ − a‖² ≤ x) by characteristic-function inversion.
    Cdf {
        #[command(flatten)]
        law: LawArgs,
        /// Evaluation points (repeatable).
        #[arg(long = "x", required = true, num_args = 1..)]
        x: Vec<f64>,
    },
    /// Density of ‖ξ − a‖² by inversion; needs two positive weights.
    Density {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long = "x", required = true, num_args = 1..)]
        x: Vec<f64>,
    },
    /// Smallest x with P(‖ξ − a‖² ≤ x) ≥ p.
    Quantile {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        p: f64,
    },
    /// Evaluates one of the constant-free bounds.
    Bound {
        #[command(subcommand)]
        kind: BoundCmd,
    },
    /// Kolmogorov distance on balls between ‖ξ − a‖² and ‖η‖², with the
    /// comparison bound and their ratio.
    Compare {
        #[command(flatten)]
        pair: PairArgs,
        /// Centre both balls at a.
        #[arg(long)]
        same_shift: bool,
    },
    /// ε-band probability P(x < ‖ξ − a‖² < x + ε); its sup over x without --at.
    Band {
        #[command(flatten)]
        law: LawArgs,
        /// Band width ε on the squared-radius scale.
        #[arg(long)]
        eps: f64,
        /// Left end of the band.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Tightness constructions and integral lemmas as pass/fail records.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCmd,
    },
    /// Ratio sweep over the seeded corpus; CSV with one row per instance.
    Sweep {
        #[arg(long, default_value_t = CORPUS_SIZE)]
        n: usize,
    },
    /// Prior-impact and coverage demos for linear Gaussian Bayes; one JSON
    /// line per record. Runs the built-in scenario suite without --scenario.
    Bayes {
        /// Scenario file {"n","p","sigma2","design_seed","G_spec","G1_spec","alpha"}.
        #[arg(long, value_name = "PATH")]
        scenario: Option<PathBuf>,
        /// Monte Carlo replications for a cross-check (0 to skip).
        #[arg(long, default_value_t = 0)]
        mc: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// (κ_ξ + κ_η)(‖λ_ξ − λ_η‖₁ + ‖a‖²).
    Comparison(PairArgs),
    /// The same with (Λ₁Λ₂)^{-1/2} in place of κ.
    Lambda12(PairArgs),
    /// The same with 1/‖Σ‖_Fr in place of κ; needs 3λ₁² ≤ Λ₁² for both.
    Frobenius(PairArgs),
    /// κ·ε for the ε-band of ‖ξ − a‖².
    Anticoncentration {
        #[command(flatten)]
        law: LawArgs,
        /// Band width ε on the squared-radius scale.
        #[arg(long)]
        eps: f64,
    },
    /// κ, uniform in x and the shift, for the density of ‖ξ − a‖².
    DensityUniform(LawArgs),
    /// Pointwise density bound with a Gaussian factor in (√x − ‖a‖).
    DensityNonuniform {
        #[command(flatten)]
        law: LawArgs,
        /// Evaluation point x.
        #[arg(long = "at")]
        at: f64,
        /// Free parameter λ > λ₁ (default tr Σ).
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Pinsker total-variation baseline for diagonal covariances.
    Pinsker(PairArgs),
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// λ = (1, 0): sup band of width ε against √ε/(2√π).
    DegenerateBand {
        /// Band width ε, at most ln 2.
        #[arg(long)]
        eps: f64,
    },
    /// diag(λ₁, λ₂, λ₃) against diag(λ₁, λ₂, λ₃(1+ε)) at radius √(2λ₃).
    R3 {
        /// Three eigenvalues as a JSON array.
        #[arg(long, default_value = "[1,1,1]")]
        lam: String,
        /// Relative perturbation of λ₃, in (0, 1).
        #[arg(long)]
        eps: f64,
    },
    /// 1-D distance between N(0, λ_X)² and N(0, λ_Y)² against explicit envelopes.
    OneDim {
        #[arg(long)]
        lam_x: f64,
        #[arg(long)]
        lam_y: f64,
    },
    /// H(a) = ∫₀^∞ (1 + t²)^{-(a+1/2)} dt and its recurrence residual.
    HIntegral {
        #[arg(long)]
        a: f64,
    },
    /// ∫₀^∞ Π(1 + λ_j²t²)^{-1/4} dt with its Hölder exponents.
    Holder(LawArgs),
}

fn parse_vec(s: &str, what: &str) -> Result<Vec<f64>> {
    io::parse_json(s, what)
}

impl LawArgs {
    fn instance(&self) -> Result<InstanceFile> {
        if let Some(p) = &self.instance {
            return io::read_instance(p);
        }
        let Some(s) = &self.spectrum else {
            return Err(Error::domain("give --spectrum or --instance"));
        };
        let spectrum = Spectrum::new(parse_vec(s, "--spectrum")?)?;
        let shift = match &self.shift {
            Some(a) => parse_vec(a, "--shift")?,
            None => Vec::new(),
        };
        Ok(InstanceFile { spectrum, shift })
    }

    fn law(&self) -> Result<QuadFormLaw> {
        let i = self.instance()?;
        check_shift_len(&i)?;
        Ok(QuadFormLaw::from_gaussian(&i.spectrum, &i.shift))
    }
}

fn check_shift_len(i: &InstanceFile) -> Result<()> {
    if i.shift.len() > i.spectrum.len() {
        return Err(Error::domain(format!(
            "shift has {} entries for a spectrum of length {}",
            i.shift.len(),
            i.spectrum.len()
        )));
    }
    Ok(())
}

impl PairArgs {
    /// `(Σ_ξ, Σ_η, a)`.
    fn resolve(&self) -> Result<(Spectrum, Spectrum, Vec<f64>)> {
        let (sx, shift) = match (&self.x, &self.sx) {
            (Some(p), _) => {
                let i = io::read_instance(p)?;
                check_shift_len(&i)?;
                (i.spectrum, i.shift)
            }
            (None, Some(s)) => {
                let sx = Spectrum::new(parse_vec(s, "--sx")?)?;
                let a = match &self.shift {
                    Some(a) => parse_vec(a, "--shift")?,
                    None => Vec::new(),
                };
                (sx, a)
            }
            (None, None) => return Err(Error::domain("give --x or --sx")),
        };
        let sy = match (&self.y, &self.sy) {
            (Some(p), _) => io::read_instance(p)?.spectrum,
            (None, Some(s)) => Spectrum::new(parse_vec(s, "--sy")?)?,
            (None, None) => return Err(Error::domain("give --y or --sy")),
        };
        Ok((sx, sy, shift))
    }
}

fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>() + 0.0
}

enum Output {
    Json(String),
    Text(String),
}

fn json<T: Serialize>(v: &T) -> Output {
    Output::Json(io::to_json(v))
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let cfg = InversionConfig::with_tol(cli.tol);
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::domain(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.cmd {
        Cmd::Kappa(law) => {
            let s = law.instance()?.spectrum;
            Ok(json(&json!({
                "kappa": s.kappa()?,
                "kappa_unified": crate::spectrum::kappa_unified(&s),
                "regime": s.regime().as_str(),
            })))
        }
        Cmd::Cdf { law, x } => {
            evaluations(law.law()?.cdf_many(x, &cfg)?)
        }
        Cmd::Density { law, x } => {
            evaluations(law.law()?.density_many(x, &cfg)?)
        }
        Cmd::Quantile { law, p } => {
            let law = law.law()?;
            let q = law.quantile(*p, &cfg)?;
            Ok(json(&json!({ "p": p, "quantile": q })))
        }
        Cmd::Bound { kind } => bound(kind).map(|b| json(&b)),
        Cmd::Compare { pair, same_shift } => {
            let (sx, sy, a) = pair.resolve()?;
            Ok(json(&metrics::compare(&sx, &sy, &a, *same_shift, &cfg)?))
        }
        Cmd::Band { law, eps, at } => {
            let l = law.law()?;
            Ok(match at {
                Some(x) => json(&json!({
                    "x": x,
                    "eps": eps,
                    "probability": metrics::band_probability(&l, *x, *eps, &cfg)?,
                })),
                None => {
                    let (p, x) = metrics::sup_band(&l, *eps, &cfg)?;
                    json(&json!({ "eps": eps, "probability": p, "argmax_x": x }))
                }
            })
        }
        Cmd::Experiment { which } => experiment(which, &cfg),
        Cmd::Sweep { n } => {
            let rows = analysis::ratio_sweep(cli.seed, *n, &cfg)?;
            let mut buf = Vec::new();
            io::write_sweep_csv(&rows, &mut buf)?;
            Ok(Output::Text(String::from_utf8(buf).expect("CSV is UTF-8")))
        }
        Cmd::Bayes { scenario, mc } => bayes(scenario.as_ref(), *mc, cli.seed, &cfg),
    }
}

fn evaluations(ev: Vec<crate::quadform::Evaluation>) -> Result<Output> {
    Ok(if ev.len() == 1 { json(&ev[0]) } else { json(&ev) })
}

fn bound(kind: &BoundCmd) -> Result<bounds::BoundReport> {
    match kind {
        BoundCmd::Comparison(p) => {
            let (sx, sy, a) = p.resolve()?;
            bounds::comparison_bound(&sx, &sy, norm_sq(&a))
        }
        BoundCmd::Lambda12(p) => {
            let (sx, sy, a) = p.resolve()?;
            bounds::comparison_bound_lambda12(&sx, &sy, norm_sq(&a))
        }
        BoundCmd::Frobenius(p) => {
            let (sx, sy, a) = p.resolve()?;
            bounds::comparison_bound_frobenius(&sx, &sy, norm_sq(&a))
        }
        BoundCmd::Anticoncentration { law, eps } => {
            bounds::anticoncentration_bound(&law.instance()?.spectrum, *eps)
        }
        BoundCmd::DensityUniform(law) => bounds::density_uniform_bound(&law.instance()?.spectrum),
        BoundCmd::DensityNonuniform { law, at, lambda } => {
            bounds::density_nonuniform_bound(&law.law()?, *at, *lambda)
        }
        BoundCmd::Pinsker(p) => {
            let (sx, sy, a) = p.resolve()?;
            let dim = sx.len().max(sy.len()).max(a.len());
            let diag = |s: &Spectrum| DMatrix::from_fn(dim, dim, |i, j| if i == j { s.lambda(i + 1) } else { 0.0 });
            let mut shift = a.clone();
            shift.resize(dim, 0.0);
            bounds::pinsker_baseline(&diag(&sx), &diag(&sy), &shift)
        }
    }
}

fn experiment(which: &ExperimentCmd, cfg: &InversionConfig) -> Result<Output> {
    match which {
        ExperimentCmd::DegenerateBand { eps } => Ok(json(&analysis::degenerate_band(*eps)?)),
        ExperimentCmd::R3 { lam, eps } => {
            let l = parse_vec(lam, "--lam")?;
            if l.len() != 3 {
                return Err(Error::domain(format!("--lam needs three values, got {}", l.len())));
            }
            Ok(json(&analysis::r3_lower_bound(l[0], l[1], l[2], *eps, cfg)?))
        }
        ExperimentCmd::OneDim { lam_x, lam_y } => Ok(json(&analysis::one_dim_bounds(*lam_x, *lam_y, cfg)?)),
        ExperimentCmd::HIntegral { a } => {
            let h = analysis::h_integral(*a)?;
            let h1 = analysis::h_integral(a + 1.0)?;
            let residual = h1 - a / (a + 0.5) * h;
            let rec = analysis::ExperimentRecord::new("h_integral", &[("a", *a)], residual.abs())
                .extra("h", h)
                .extra("h_next", h1)
                .with_upper(1e-8);
            Ok(json(&rec))
        }
        ExperimentCmd::Holder(law) => {
            let s = law.instance()?.spectrum;
            let r = analysis::holder_product_integral(&s)?;
            let rec = analysis::ExperimentRecord::new("holder_product_integral", &[("frobenius", r.frobenius)], r.integral * r.frobenius)
                .extra("integral", r.integral)
                .extra("tau", r.tau)
                .extra("holder_bound", r.holder_bound)
                .with_upper(crate::calibration::C_LEMMA);
            Ok(json(&json!({ "record": rec, "q": r.q })))
        }
    }
}

fn bayes(path: Option<&PathBuf>, mc: usize, seed: u64, cfg: &InversionConfig) -> Result<Output> {
    let scenarios: Vec<Scenario> = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::domain(format!("cannot read {}: {e}", p.display())))?;
            vec![io::parse_json(&text, &p.display().to_string())?]
        }
        None => bayesdemo::scenario_suite(),
    };
    let mut lines = String::new();
    for sc in &scenarios {
        let (mut impact, mut coverage) = sc.run(cfg)?;
        if mc > 0 {
            let model = sc.model()?;
            let (g, g1) = (sc.g_sq()?, sc.g1_sq()?);
            let w = DMatrix::identity(sc.p, sc.p);
            let a = DMatrix::identity(sc.n, sc.n);
            let p1 = bayesdemo::prior_impact_monte_carlo(&model, &g, &g1, &w, impact.extras["radius"], mc, seed)?;
            let p2 = bayesdemo::coverage_monte_carlo(&model, &g, &a, coverage.extras["radius"], mc, seed)?;
            impact = impact.extra("exceedance_mc", p1);
            coverage = coverage.extra("miss_probability_mc", p2);
        }
        for r in [impact, coverage] {
            lines.push_str(&io::to_json(&r));
            lines.push('\n');
        }
    }
    Ok(Output::Text(lines))
}

fn error_json(kind: &str, message: &str) -> String {
    io::to_json(&json!({ "error": kind, "message": message }))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Condition(_) => 2,
        Error::Numerical { .. } => 3,
    }
}

/// Applies `BALLPROB_THREADS` (0 or unset: one thread per core) to the
/// global rayon pool. Later calls are no-ops once the pool exists.
fn init_threads() {
    let n = std::env::var("BALLPROB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    init_threads();
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(e.kind(), &e.to_string()));
            return exit_code(&e);
        }
    };
    let mut text = match out {
        Output::Json(s) => s,
        Output::Text(s) => s,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.out {
        Some(p) => std::fs::write(p, text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| format!("cannot write stdout: {e}")),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(stderr, "{}", error_json("IoError", &msg));
            2
        }
    }
}
