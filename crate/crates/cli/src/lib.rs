//! Command-line adapter over the `hypoexp` library.
//!
//! Each subcommand parses its inputs, makes one library call and prints an
//! envelope `{"command": .., "config": .., "result": ..}`. Exit codes: 0 on
//! success, 1 on invalid input, 2 when a verdict is negative (reject,
//! incompatible, failed check).

pub mod format;
pub mod input;

use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypoexp::characterization::is_exponential_series;
use hypoexp::oracle::{convolve_numeric, exponentiality_test, GridSpec, TestVerdict};
use hypoexp::sampling::DEFAULT_SEED;
use hypoexp::{
    c_coefficients, d_coefficients, forward_solve_theorem1, forward_solve_theorem2,
    lagrange_weights, lemma2_check, residual_h, residual_q, weights_from_scales,
    HypoexpDistribution, LaplaceForm, RateVector, ScaleVector, Series, Verdict, DEFAULT_ORDER,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::input::read_vector;

#[derive(Parser, Debug)]
#[command(
    name = "hypoexp",
    version,
    about = "Hypoexponential distributions and the exponential characterization"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Rates λ_j as a JSON array, a CSV/newline file, or `-` for stdin
    #[arg(long, global = true)]
    pub rates: Option<String>,
    /// Scale coefficients μ_j, same forms as --rates
    #[arg(long, global = true)]
    pub scales: Option<String>,
    /// Component rate used with --scales; the rates become λ/μ_j
    #[arg(long, global = true, default_value_t = 1.0)]
    pub lambda: f64,
    /// Truncation order of power series
    #[arg(long = "K", global = true, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Scaled tolerance for residuals and identity checks
    #[arg(long, global = true, default_value = "1e-10")]
    pub tol: f64,
    /// Master seed for sampling and shuffling
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Product,
    Mixture,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquationArg {
    H,
    Q,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Lagrange weights ℓ_j, in input order
    Weights,
    /// Density at --x
    Pdf {
        #[arg(long)]
        x: String,
    },
    /// Distribution function at --x
    Cdf {
        #[arg(long)]
        x: String,
    },
    /// Survival function at --x
    Sf {
        #[arg(long)]
        x: String,
    },
    /// Quantiles at probabilities --p
    Quantile {
        #[arg(long)]
        p: String,
    },
    /// Raw moments E[S^1..S^k]
    Moments {
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Seeded random draws
    Sample {
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Laplace transform at --t
    Laplace {
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value_t = Form::Both)]
        form: Form,
    },
    /// Weight identities up to order K
    VerifyLemma2,
    /// Structural coefficients c_1..c_K or d_1..d_K
    Coeffs {
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Residuals of a candidate series ψ = 1/φ
    Residual {
        /// Coefficients a_0, a_1, ... (padded with zeros to order K)
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum)]
        which: EquationArg,
    },
    /// Forward solve the truncated functional equation
    Solve {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        /// Free first coefficient, required for --theorem 1
        #[arg(long)]
        a1: Option<f64>,
    },
    /// Trapezoid convolution of the component densities against the closed form
    OracleConvolve {
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Grid end; defaults to the 1 - 1e-10 quantile rounded up
        #[arg(long)]
        upper: Option<f64>,
    },
    /// Exponentiality test of positive data
    TestExponential {
        /// Data file (single column) or `-` for stdin
        #[arg(long)]
        data: String,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Outcome {
    config: Map<String, Value>,
    result: Value,
    negative: bool,
}

/// The printed JSON object.
pub fn envelope(command: &str, config: Map<String, Value>, result: Value) -> Value {
    json!({ "command": command, "config": config, "result": result })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Weights => "weights",
        Command::Pdf { .. } => "pdf",
        Command::Cdf { .. } => "cdf",
        Command::Sf { .. } => "sf",
        Command::Quantile { .. } => "quantile",
        Command::Moments { .. } => "moments",
        Command::Sample { .. } => "sample",
        Command::Laplace { .. } => "laplace",
        Command::VerifyLemma2 => "verify-lemma2",
        Command::Coeffs { .. } => "coeffs",
        Command::Residual { .. } => "residual",
        Command::Solve { .. } => "solve",
        Command::OracleConvolve { .. } => "oracle-convolve",
        Command::TestExponential { .. } => "test-exponential",
    }
}

enum Source {
    Rates(Vec<f64>),
    Scales(Vec<f64>),
}

struct Context<'a> {
    common: &'a Common,
    stdin: &'a mut dyn Read,
    config: Map<String, Value>,
}

impl Context<'_> {
    fn source(&mut self) -> Result<Source, String> {
        match (&self.common.rates, &self.common.scales) {
            (Some(r), None) => {
                let v = read_vector(r, self.stdin)?;
                self.config.insert("rates".into(), to_value(&v));
                Ok(Source::Rates(v))
            }
            (None, Some(s)) => {
                let v = read_vector(s, self.stdin)?;
                self.config.insert("scales".into(), to_value(&v));
                Ok(Source::Scales(v))
            }
            _ => Err("give exactly one of --rates or --scales".into()),
        }
    }

    fn rate_vector(&mut self) -> Result<RateVector, String> {
        match self.source()? {
            Source::Rates(r) => RateVector::new(&r).map_err(err),
            Source::Scales(s) => {
                self.config
                    .insert("lambda".into(), to_value(&self.common.lambda));
                ScaleVector::new(&s)
                    .map_err(err)?
                    .to_rates(self.common.lambda)
                    .map_err(err)
            }
        }
    }

    fn distribution(&mut self) -> Result<HypoexpDistribution, String> {
        HypoexpDistribution::new(self.rate_vector()?).map_err(err)
    }

    /// Scales directly, or `μ_j = 1/λ_j` from rates.
    fn scale_vector(&mut self) -> Result<ScaleVector, String> {
        match self.source()? {
            Source::Scales(s) => ScaleVector::new(&s).map_err(err),
            Source::Rates(r) => RateVector::new(&r)
                .map_err(err)?
                .to_scales(1.0)
                .map_err(err),
        }
    }

    fn points(&mut self, key: &str, raw: &str) -> Result<Vec<f64>, String> {
        let v = read_vector(raw, self.stdin)?;
        self.config.insert(key.into(), to_value(&v));
        Ok(v)
    }

    fn set<T: Serialize>(&mut self, key: &str, v: T) {
        self.config.insert(key.into(), to_value(&v));
    }
}

fn evaluate<F>(xs: &[f64], f: F) -> Result<Vec<f64>, String>
where
    F: Fn(f64) -> hypoexp::Result<f64>,
{
    xs.iter().map(|&x| f(x).map_err(err)).collect()
}

fn dispatch(cmd: &Command, ctx: &mut Context) -> Result<(Value, bool), String> {
    let common = ctx.common.clone();
    let (k_max, tol) = (common.order, common.tol);
    let ok = |v: Value| Ok((v, false));
    match cmd {
        Command::Weights => match ctx.source()? {
            Source::Rates(r) => {
                let rv = RateVector::new(&r).map_err(err)?;
                let w = lagrange_weights(&rv).map_err(err)?;
                ok(to_value(&rv.to_input_order(w.values())))
            }
            Source::Scales(s) => {
                let mu = ScaleVector::new(&s).map_err(err)?;
                let w = weights_from_scales(&mu).map_err(err)?;
                ok(to_value(&mu.to_input_order(w.values())))
            }
        },
        Command::Pdf { x } | Command::Cdf { x } | Command::Sf { x } => {
            let d = ctx.distribution()?;
            let xs = ctx.points("x", x)?;
            let values = match cmd {
                Command::Pdf { .. } => evaluate(&xs, |v| d.pdf(v))?,
                Command::Cdf { .. } => evaluate(&xs, |v| d.cdf(v))?,
                _ => evaluate(&xs, |v| d.survival(v))?,
            };
            ok(to_value(&values))
        }
        Command::Quantile { p } => {
            let d = ctx.distribution()?;
            let ps = ctx.points("p", p)?;
            ok(to_value(&evaluate(&ps, |v| d.quantile(v))?))
        }
        Command::Moments { k } => {
            let d = ctx.distribution()?;
            ctx.set("k", k);
            let m = (1..=*k)
                .map(|i| d.moment(i))
                .collect::<hypoexp::Result<Vec<_>>>()
                .map_err(err)?;
            ok(json!({ "moments": m, "mean": d.mean(), "variance": d.variance() }))
        }
        Command::Sample { n } => {
            let d = ctx.distribution()?;
            ctx.set("n", n);
            ctx.set("seed", common.seed);
            ok(to_value(&d.sample(*n, common.seed).map_err(err)?))
        }
        Command::Laplace { t, form } => {
            let d = ctx.distribution()?;
            let ts = ctx.points("t", t)?;
            let mut out = Map::new();
            if *form != Form::Mixture {
                out.insert(
                    "product".into(),
                    to_value(&evaluate(&ts, |v| d.laplace(v, LaplaceForm::Product))?),
                );
            }
            if *form != Form::Product {
                out.insert(
                    "mixture".into(),
                    to_value(&evaluate(&ts, |v| d.laplace(v, LaplaceForm::Mixture))?),
                );
            }
            ok(Value::Object(out))
        }
        Command::VerifyLemma2 => {
            let rv = ctx.rate_vector()?;
            ctx.set("K", k_max);
            ctx.set("tol", tol);
            let report = lemma2_check(&rv, k_max, tol).map_err(err)?;
            Ok((to_value(&report), !report.passed))
        }
        Command::Coeffs { which } => {
            let mu = ctx.scale_vector()?;
            ctx.set("K", k_max);
            ctx.set("tol", tol);
            let c = match which {
                Which::C => c_coefficients(&mu, k_max, tol),
                Which::D => d_coefficients(&mu, k_max, tol),
            }
            .map_err(err)?;
            ok(to_value(&c))
        }
        Command::Residual { psi, which } => {
            let mu = ctx.scale_vector()?;
            let coeffs = ctx.points("psi", psi)?;
            ctx.set("K", k_max);
            ctx.set("tol", tol);
            if coeffs.len() > k_max + 1 {
                return Err(format!(
                    "psi has {} coefficients, more than K + 1 = {}",
                    coeffs.len(),
                    k_max + 1
                ));
            }
            let series = Series::from_poly(&coeffs, k_max).map_err(err)?;
            let report = match which {
                EquationArg::H => residual_h(&series, &mu, tol),
                EquationArg::Q => residual_q(&series, &mu, tol),
            }
            .map_err(err)?;
            let negative = report.verdict == Verdict::Incompatible;
            Ok((to_value(&report), negative))
        }
        Command::Solve { theorem, a1 } => {
            let mu = ctx.scale_vector()?;
            ctx.set("theorem", theorem);
            ctx.set("K", k_max);
            ctx.set("tol", tol);
            let psi = match (theorem, a1) {
                (1, Some(a)) => {
                    ctx.set("a1", a);
                    forward_solve_theorem1(&mu, *a, k_max, tol)
                }
                (1, None) => return Err("--theorem 1 needs --a1".into()),
                _ => forward_solve_theorem2(&mu, k_max, tol),
            }
            .map_err(err)?;
            let fit = is_exponential_series(&psi, tol);
            ok(json!({ "series": psi, "is_exponential": fit.is_exponential, "lambda": fit.lambda }))
        }
        Command::OracleConvolve { step, upper } => {
            let rv = ctx.rate_vector()?;
            let upper = match upper {
                Some(u) => *u,
                None => {
                    let d = HypoexpDistribution::new(rv.clone()).map_err(err)?;
                    (d.quantile(1.0 - 1e-10).map_err(err)? / step).ceil() * step
                }
            };
            ctx.set("step", step);
            ctx.set("upper", upper);
            let r = convolve_numeric(rv.rates(), GridSpec { step: *step, upper }).map_err(err)?;
            ok(json!({
                "points": r.density.grid.len(),
                "sup_distance": r.sup_distance,
                "integral": r.density.trapezoid_integral(),
            }))
        }
        Command::TestExponential { data, alpha } => {
            let mu = ctx.scale_vector()?;
            let values = read_vector(data, ctx.stdin)?;
            ctx.set("data", data);
            ctx.set("alpha", alpha);
            ctx.set("seed", common.seed);
            let report = exponentiality_test(&values, &mu, *alpha, common.seed).map_err(err)?;
            let negative = report.verdict == TestVerdict::Reject;
            Ok((to_value(&report), negative))
        }
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, String> {
    let mut ctx = Context {
        common: &cli.common,
        stdin,
        config: Map::new(),
    };
    let (result, negative) = dispatch(&cli.command, &mut ctx)?;
    let mut config = ctx.config;
    for (k, v) in [
        ("K", to_value(&cli.common.order)),
        ("tol", to_value(&cli.common.tol)),
        ("seed", to_value(&cli.common.seed)),
    ] {
        config.entry(k).or_insert(v);
    }
    Ok(Outcome {
        config,
        result,
        negative,
    })
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Output {
                    code: 1,
                    stdout: String::new(),
                    stderr: format!(
                        "{}\n",
                        text.lines().next().unwrap_or("error: invalid arguments")
                    ),
                },
            };
        }
    };
    match execute(&cli, stdin) {
        Ok(out) => {
            let name = command_name(&cli.command);
            let value = envelope(name, out.config, out.result);
            let text = match cli.common.format {
                Format::Json => format::to_json(&value),
                Format::Table => format::to_table(&value),
            };
            Output {
                code: if out.negative { 2 } else { 0 },
                stdout: text + "\n",
                stderr: String::new(),
            }
        }
        Err(e) => Output {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
