//! Command-line surface. `run` does all the work so it can be driven in-process;
//! output is assembled first and written only on success.
//!
//! Exit codes: 0 success, 1 verification failure or mismatch, 2 parse/config
//! error, 3 invalid datum, 4 ε unavailable.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::arith::parse_q;
use crate::conjclass::enumerate_elliptic_data;
use crate::endoscopy::{
    centralizer_shape, contragredient_enhanced, endoscopic_datum_of, endoscopic_parameters, enumerate_s_elements,
    epsilon_minus_eigenspace, image_in_component_group, luo_fourier, twist_enhanced, EnhancedParameter,
    FormalPacketDistribution, FourierDirection, SElement,
};
use crate::error::Error;
use crate::etale::{check_regular, ClassDatum};
use crate::localfield::{hilbert_symbol_oracle, hilbert_symbol_q, oracle_default_depth, square_class, LocalField};
use crate::lparam::{delta_c, epsilon, AdditiveCharacter, MpParameter};
use crate::spinor::{spinor_norm_formula, spinor_norm_oracle};
use crate::verify::{run_suite, Suite, SuiteConfig, TierPolicy};

#[derive(Parser, Debug)]
#[command(name = "psivar", version, about = "Exact local-field symbols, spinor norms and ψ-variation signs")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical square class of a rational.
    Sqclass {
        #[arg(long)]
        field: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Hilbert symbol (a, b).
    Hilbert {
        #[arg(long)]
        field: String,
        /// Use the brute-force conic search.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Spinor norm of a class datum (inline JSON or file path).
    SpinorNorm {
        #[arg(long, conflicts_with = "both")]
        oracle: bool,
        /// Print both paths; exit 1 if they disagree.
        #[arg(long)]
        both: bool,
        datum: String,
    },
    /// ε-factors of the summands of a parameter.
    Epsilon {
        #[command(flatten)]
        p: Payload,
    },
    /// The character δ_c.
    DeltaC {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[command(flatten)]
        p: Payload,
    },
    /// (φ, χ, ψ) ↦ (φζ_c, χδ_c, ψ_c).
    Twist {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[command(flatten)]
        p: Payload,
    },
    /// Contragredient of an enhanced parameter.
    Contragredient {
        #[command(flatten)]
        p: Payload,
    },
    /// Elliptic endoscopic data and involutions of S_φ.
    Endoscopy {
        #[command(subcommand)]
        cmd: EndoscopyCmd,
    },
    /// Fourier transform between packet and distribution coefficients.
    Fourier {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        dist: String,
    },
    /// Seeded randomized verification.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Comma-separated field list, e.g. `R,Qp:3`.
        #[arg(long)]
        fields: Option<String>,
        #[arg(long, default_value = "both")]
        tier: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

#[derive(Args, Debug)]
pub struct Payload {
    /// Parameter or enhanced-parameter JSON (inline or file path).
    pub payload: String,
    /// Rescale ψ by this class (overrides the payload).
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum EndoscopyCmd {
    /// List elliptic data (n′, n″) with n′ + n″ = n.
    List {
        #[arg(long)]
        n: usize,
    },
    /// Enumerate involutions s with their images and data.
    SElements { parameter: String },
    /// The datum, image and ε(φ^{s=−1}) of one involution.
    DatumOfS {
        parameter: String,
        /// JSON list of (p, q) signatures, e.g. `[[1,0],[0,2]]`.
        #[arg(long)]
        s: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Inverse,
}

/// Failure with an exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(exit_code(&e), e.to_string())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EpsilonUnavailable(_) => 4,
        Error::InvalidDatum(_)
        | Error::DegenerateWitness
        | Error::NotRegular
        | Error::DimensionMismatch(_)
        | Error::ConventionMismatch
        | Error::InvalidParameter(_)
        | Error::GroupMismatch(_) => 3,
        Error::SamplingExhausted(_) => 1,
        Error::ZeroInput
        | Error::NotPrime(_)
        | Error::Parse(_)
        | Error::FieldMismatch(_)
        | Error::InsufficientDepth { .. }
        | Error::UnsupportedTier(_)
        | Error::Config(_) => 2,
    }
}

fn parse_field(s: &str) -> Result<LocalField, Fail> {
    Ok(s.parse::<LocalField>()?)
}

fn read_payload(src: &str) -> Result<String, Fail> {
    let t = src.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(src.to_string());
    }
    std::fs::read_to_string(Path::new(src)).map_err(|e| Fail(2, format!("cannot read {src}: {e}")))
}

/// Deserializes a payload; any failure (syntax or content) is an invalid input.
fn load<T: DeserializeOwned>(src: &str, what: &str) -> Result<T, Fail> {
    let text = read_payload(src)?;
    serde_json::from_str(&text).map_err(|e| invalid(what, e))
}

/// Validation errors already carry their own prefix; syntax errors do not.
fn invalid(what: &str, e: serde_json::Error) -> Fail {
    let msg = e.to_string();
    if msg.starts_with("invalid ") {
        Fail(3, msg)
    } else {
        Fail(3, format!("invalid {what}: {msg}"))
    }
}

/// An enhanced parameter, or a bare parameter with trivial χ and standard ψ.
fn load_enhanced(p: &Payload) -> Result<EnhancedParameter, Fail> {
    let text = read_payload(&p.payload)?;
    let mut e: EnhancedParameter = match serde_json::from_str::<EnhancedParameter>(&text) {
        Ok(e) => e,
        Err(first) => match serde_json::from_str::<MpParameter>(&text) {
            Ok(phi) => {
                let k = phi.i_plus().len();
                let psi = AdditiveCharacter::standard(phi.field());
                EnhancedParameter::new(phi, crate::lparam::SignVector::trivial(k), psi)?
            }
            Err(second) => {
                let wrapped = serde_json::from_str::<serde_json::Value>(&text)
                    .is_ok_and(|v| v.get("parameter").is_some());
                return Err(invalid("parameter", if wrapped { first } else { second }));
            }
        },
    };
    if let Some(s) = &p.psi {
        e.psi = AdditiveCharacter { scale: e.parameter.field().parse_class(s)? };
    }
    Ok(e)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Runs one invocation; returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                0
            } else {
                let _ = write!(err, "{text}");
                2
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, text)) => {
            let _ = writeln!(out, "{text}");
            code
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, String), Fail> {
    let json = cli.json;
    match &cli.command {
        Command::Sqclass { field, x } => {
            let f = parse_field(field)?;
            let cl = square_class(f, &parse_q(x)?)?;
            Ok((0, if json { json!({"field": f, "x": x, "class": cl.to_string()}).to_string() } else { cl.to_string() }))
        }
        Command::Hilbert { field, oracle, depth, a, b } => {
            let f = parse_field(field)?;
            let (a, b) = (parse_q(a)?, parse_q(b)?);
            let v = if *oracle {
                hilbert_symbol_oracle(f, &a, &b, depth.unwrap_or_else(|| oracle_default_depth(f, &a, &b)))?
            } else {
                hilbert_symbol_q(f, &a, &b)?
            };
            Ok((0, if json { json!({"field": f, "value": v}).to_string() } else { v.to_string() }))
        }
        Command::SpinorNorm { oracle, both, datum } => {
            let d: ClassDatum = load(datum, "datum")?;
            if !check_regular(&d) {
                return Err(Error::NotRegular.into());
            }
            if *both {
                let (fo, or) = (spinor_norm_formula(&d)?, spinor_norm_oracle(&d)?);
                let agree = fo == or;
                let text = if json {
                    json!({"formula": fo.to_string(), "oracle": or.to_string(), "agree": agree}).to_string()
                } else {
                    format!("formula {fo}\noracle {or}")
                };
                return Ok((if agree { 0 } else { 1 }, text));
            }
            let v = if *oracle { spinor_norm_oracle(&d)? } else { spinor_norm_formula(&d)? };
            Ok((0, if json { json!({"spinor_norm": v.to_string()}).to_string() } else { v.to_string() }))
        }
        Command::Epsilon { p } => {
            let e = load_enhanced(p)?;
            let mut rows = Vec::new();
            for (s, m) in e.parameter.summands() {
                let v = epsilon(s, &e.psi)?;
                rows.push((s.to_string(), *m, v.to_string()));
            }
            let text = if json {
                to_json(&rows.iter().map(|(s, m, v)| json!({"summand": s, "m": m, "epsilon": v})).collect::<Vec<_>>())
            } else {
                rows.iter().map(|(s, m, v)| format!("{s} x{m}: {v}")).collect::<Vec<_>>().join("\n")
            };
            Ok((0, text))
        }
        Command::DeltaC { c, p } => {
            let e = load_enhanced(p)?;
            let c = e.parameter.field().parse_class(c)?;
            let d = delta_c(&e.parameter, &c, &e.psi)?;
            let text = if json {
                to_json(&d)
            } else {
                d.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
            };
            Ok((0, text))
        }
        Command::Twist { c, p } => {
            let e = load_enhanced(p)?;
            let c = e.parameter.field().parse_class(c)?;
            Ok((0, to_json(&twist_enhanced(&e, &c)?)))
        }
        Command::Contragredient { p } => {
            let e = load_enhanced(p)?;
            Ok((0, to_json(&contragredient_enhanced(&e)?)))
        }
        Command::Endoscopy { cmd } => endoscopy(cmd, json),
        Command::Fourier { direction, dist } => {
            let d: FormalPacketDistribution = load(dist, "distribution")?;
            let dir = match direction {
                DirectionArg::Forward => FourierDirection::Forward,
                DirectionArg::Inverse => FourierDirection::Inverse,
            };
            Ok((0, to_json(&luo_fourier(&d, dir)?)))
        }
        Command::Verify { suite, seed, cases, fields, tier, n_max } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = SuiteConfig::new(*seed, *cases);
            if let Some(fs) = fields {
                cfg.fields = fs.split(',').map(|s| s.trim().parse::<LocalField>()).collect::<Result<_, _>>()?;
            }
            cfg.tier = tier.parse::<TierPolicy>()?;
            cfg.n_max = *n_max;
            let report = run_suite(&cfg, suite).map_err(|e| Fail(2, e.to_string()))?;
            let code = if report.passed() { 0 } else { 1 };
            let text = if json {
                to_json(&report)
            } else {
                let mut lines = vec![format!(
                    "suite {} seed {}: {} cases, {} failures",
                    report.suite,
                    report.seed,
                    report.cases,
                    report.failures.len()
                )];
                for s in &report.suites {
                    lines.push(format!("  {}: {} cases, {} failures", s.suite, s.cases, s.failures));
                }
                for f in &report.failures {
                    lines.push(format!(
                        "  FAIL {}#{} case_seed={} field={} {}",
                        f.suite,
                        f.index,
                        f.case_seed,
                        f.field,
                        f.detail.as_deref().unwrap_or("")
                    ));
                }
                lines.join("\n")
            };
            Ok((code, text))
        }
    }
}

fn endoscopy(cmd: &EndoscopyCmd, json: bool) -> Result<(i32, String), Fail> {
    match cmd {
        EndoscopyCmd::List { n } => {
            let data = enumerate_elliptic_data(*n);
            let text = if json {
                to_json(&data.iter().map(|d| json!([d.n_prime, d.n_double_prime])).collect::<Vec<_>>())
            } else {
                data.iter().map(|d| format!("({}, {})", d.n_prime, d.n_double_prime)).collect::<Vec<_>>().join("\n")
            };
            Ok((0, text))
        }
        EndoscopyCmd::SElements { parameter } => {
            let phi: MpParameter = load(parameter, "parameter")?;
            let shape = centralizer_shape(&phi);
            let mut rows = Vec::new();
            for s in enumerate_s_elements(&shape) {
                let img = image_in_component_group(&shape, &s)?;
                let d = endoscopic_datum_of(&phi, &s)?;
                rows.push(json!({"s": s.signatures, "image": img, "datum": [d.n_prime, d.n_double_prime]}));
            }
            let text = if json {
                to_json(&json!({"order": shape.component_group_order(), "elements": rows}))
            } else {
                let mut lines = vec![format!("|S_phi| = {}", shape.component_group_order())];
                lines.extend(rows.iter().map(|r| format!("s={} image={} datum={}", r["s"], r["image"], r["datum"])));
                lines.join("\n")
            };
            Ok((0, text))
        }
        EndoscopyCmd::DatumOfS { parameter, s } => {
            let phi: MpParameter = load(parameter, "parameter")?;
            let signatures: Vec<(u32, u32)> =
                serde_json::from_str(s).map_err(|e| Fail(2, format!("cannot parse --s: {e}")))?;
            let s = SElement { signatures };
            let shape = centralizer_shape(&phi);
            let img = image_in_component_group(&shape, &s)?;
            let d = endoscopic_datum_of(&phi, &s)?;
            let eps = epsilon_minus_eigenspace(&phi, &s, &AdditiveCharacter::standard(phi.field()))?;
            let (p1, p2) = endoscopic_parameters(&phi, &s)?;
            let v = json!({
                "datum": [d.n_prime, d.n_double_prime],
                "image": img,
                "epsilon": eps,
                "phi_prime": p1,
                "phi_double_prime": p2,
            });
            Ok((0, if json { to_json(&v) } else { format!("datum ({}, {}) image {} epsilon {}", d.n_prime, d.n_double_prime, v["image"], eps) }))
        }
    }
}
