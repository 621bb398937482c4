use super::config::{OutputFormat, RunConfig};
use super::parse::{parse_curve_file, parse_curves, BUILTIN_CURVES};
use crate::derivative::{congruence_filtration_check, single_derivative_element, DerivativeDescriptor};
use crate::ec::CurveProfile;
use crate::error::{Error, Result};
use crate::group_ring::{AbelianGroup, Character};
use crate::lseries::{l_value, twisted_l_value, FourierCoefficients};
use crate::modsym::{cache, EigenSymbol};
use crate::theta::{build_theta, theta_p_part};
use crate::verifier::{
    check_rank_part, good_squarefree_family, scan, CheckKind, CurveContext, Verdict, VerificationReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENCY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mtlab", version, about = "Mazur-Tate elements of elliptic curves")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    /// Curve database file (the bundled table when omitted).
    #[arg(long, global = true)]
    pub curves: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions of the modular symbol space of level N.
    Space {
        #[arg(long)]
        level: u64,
    },
    /// theta_S with exact coefficients.
    Theta(CurveS),
    /// Order of vanishing of theta_S in the augmentation filtration.
    Ord(CurveS),
    /// Theorem checks for one S or for a family of S.
    Verify {
        #[arg(long)]
        curve: String,
        #[arg(long = "S")]
        s: Option<u64>,
        /// Scan all square-free products of good primes up to this bound.
        #[arg(long)]
        family_bound: Option<u64>,
        #[arg(long, value_enum, default_value_t = CheckArg::Rank)]
        check: CheckArg,
        #[arg(long)]
        p: Option<u64>,
    },
    /// L(E, 1) or L(E, chi, 1).
    Lvalue {
        #[arg(long)]
        curve: String,
        /// Modulus m of the character; omitted for the untwisted value.
        #[arg(long)]
        modulus: Option<u64>,
        /// Exponents of chi on the cyclic factors of (Z/m)^x.
        #[arg(long, value_delimiter = ',')]
        chi: Vec<u64>,
    },
    /// Derivative operators: D^(k) in Z[Z/n], or a product applied to theta_S.
    Derive {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        curve: Option<String>,
        #[arg(long = "S")]
        s: Option<u64>,
        /// Terms l:k separated by commas.
        #[arg(long, value_delimiter = ',')]
        terms: Vec<String>,
        /// Work in the p-Sylow quotient and run the congruence criterion.
        #[arg(long)]
        p: Option<u64>,
    },
}

#[derive(Args, Debug)]
pub struct CurveS {
    #[arg(long)]
    pub curve: String,
    #[arg(long = "S")]
    pub s: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CheckArg {
    Rank,
    Trivial,
    Leading,
}

fn load_curves(cli: &Cli) -> Result<Vec<CurveProfile>> {
    match &cli.curves {
        Some(p) => parse_curve_file(p),
        None => parse_curves(BUILTIN_CURVES),
    }
}

fn find_curve(cli: &Cli, label: &str) -> Result<CurveProfile> {
    load_curves(cli)?
        .into_iter()
        .find(|c| c.label == label)
        .ok_or_else(|| Error::Unsupported(format!("curve {label} not in the database")))
}

fn context(cli: &Cli, label: &str) -> Result<CurveContext> {
    let c = &cli.config;
    Ok(CurveContext::new(find_curve(cli, label)?, c.precision, c.cache.as_deref(), c.p_bound)?.with_t_max(c.t_max))
}

fn eigen_symbol(cli: &Cli, profile: &CurveProfile) -> Result<EigenSymbol> {
    let space = Arc::new(cache::load_or_build(cli.config.cache.as_deref(), profile.curve.conductor)?);
    let fc = FourierCoefficients::new(profile.curve.clone());
    EigenSymbol::for_curve(space, &fc, cli.config.precision)
}

fn emit<T: Serialize>(out: &mut dyn Write, fmt: OutputFormat, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match fmt {
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
        OutputFormat::Text | OutputFormat::Csv => writeln!(out, "{}", text())?,
    }
    Ok(())
}

fn report_line(r: &VerificationReport) -> String {
    format!(
        "{},{},{},{:?},{},{}",
        r.curve,
        r.s,
        r.theorem,
        r.verdict,
        r.ord_found.map_or("-".into(), |o| o.to_string()),
        r.ord_required
    )
}

#[derive(Serialize)]
struct SpaceJson {
    schema: &'static str,
    level: u64,
    p1: usize,
    dim: usize,
    dim_cuspidal: usize,
    genus: usize,
}

#[derive(Serialize)]
struct LValueJson {
    schema: &'static str,
    curve: String,
    chi: Option<ChiJson>,
    value_re: String,
    value_im: String,
    precision: u32,
}

#[derive(Serialize)]
struct ChiJson {
    modulus: u64,
    exps: Vec<u64>,
    conductor: u64,
    parity: i64,
}

#[derive(Serialize)]
struct DeriveJson {
    schema: &'static str,
    support: u64,
    conductor: u64,
    order: u64,
    n: u64,
    group_orders: Vec<u64>,
    coefficients: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    congruent_mod_n: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    congruence: Option<crate::derivative::CongruenceReport>,
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let fmt = cli.config.format;
    match &cli.command {
        Command::Space { level } => {
            let s = cache::load_or_build(cli.config.cache.as_deref(), *level)?;
            let j = SpaceJson {
                schema: "mtlab.space.v1",
                level: *level,
                p1: s.p1.len(),
                dim: s.dim(),
                dim_cuspidal: s.cuspidal_dim(),
                genus: s.genus(),
            };
            emit(out, fmt, &j, || format!("level {} dim {} cuspidal {}", j.level, j.dim, j.dim_cuspidal))?;
        }
        Command::Theta(a) => {
            let prof = find_curve(cli, &a.curve)?;
            let eig = eigen_symbol(cli, &prof)?;
            let t = build_theta(&eig, &prof.label, a.s)?;
            let j = t.to_json();
            emit(out, fmt, &j, || {
                j.coefficients.iter().map(|(a, c)| format!("{a},{c}")).collect::<Vec<_>>().join("\n")
            })?;
        }
        Command::Ord(a) => {
            let ctx = context(cli, &a.curve)?;
            let r = check_rank_part(&ctx, a.s)?;
            emit(out, fmt, &r, || report_line(&r))?;
            if r.verdict == Verdict::Inconsistency {
                return Ok(EXIT_INCONSISTENCY);
            }
        }
        Command::Verify { curve, s, family_bound, check, p } => {
            let ctx = context(cli, curve)?;
            let kind = match check {
                CheckArg::Rank => CheckKind::RankPart,
                CheckArg::Trivial => CheckKind::TrivialZeros,
                CheckArg::Leading => CheckKind::Leading {
                    p: p.ok_or_else(|| Error::Unsupported("--check leading needs --p".into()))?,
                },
            };
            let ss: Vec<u64> = match (s, family_bound) {
                (Some(s), None) => vec![*s],
                (None, Some(b)) => good_squarefree_family(&ctx.profile, *b),
                _ => return Err(Error::Unsupported("give exactly one of --S and --family-bound".into())),
            };
            let items: Vec<(String, u64)> = ss.iter().map(|&s| (curve.clone(), s)).collect();
            let contexts = BTreeMap::from([(curve.clone(), ctx)]);
            let res = scan(&contexts, &items, kind);
            emit(out, fmt, &res, || {
                let mut lines = vec!["curve,S,theorem,verdict,ord_found,ord_required".to_string()];
                for e in &res.entries {
                    match &e.report {
                        Some(r) => lines.push(report_line(r)),
                        None => lines.push(format!("{},{},error,{}", e.curve, e.s, e.error.clone().unwrap_or_default())),
                    }
                }
                lines.join("\n")
            })?;
            if res.summary.inconsistency > 0 {
                return Ok(EXIT_INCONSISTENCY);
            }
            if res.summary.errors > 0 {
                return Ok(EXIT_RUNTIME);
            }
        }
        Command::Lvalue { curve, modulus, chi } => {
            let prof = find_curve(cli, curve)?;
            let fc = FourierCoefficients::new(prof.curve.clone());
            let digits = cli.config.precision;
            let (re, im, cj) = match modulus {
                None => (l_value(&fc, digits)?, None, None),
                Some(m) => {
                    let g = Arc::new(AbelianGroup::units_mod(*m)?);
                    if chi.len() != g.rank() {
                        return Err(Error::Unsupported(format!(
                            "(Z/{m})^x has {} cyclic factors; --chi gave {}",
                            g.rank(),
                            chi.len()
                        )));
                    }
                    let c = Character::new(g, chi.clone());
                    let v = twisted_l_value(&fc, &c, digits)?;
                    let cj = ChiJson { modulus: *m, exps: c.exps.clone(), conductor: c.conductor(), parity: c.parity() };
                    (v.re, Some(v.im), Some(cj))
                }
            };
            let j = LValueJson {
                schema: "mtlab.lvalue.v1",
                curve: prof.label.clone(),
                chi: cj,
                value_re: re.to_decimal(digits as usize),
                value_im: im.map_or("0".into(), |x| x.to_decimal(digits as usize)),
                precision: digits,
            };
            emit(out, fmt, &j, || format!("{} {} {}", j.curve, j.value_re, j.value_im))?;
        }
        Command::Derive { n, k, curve, s, terms, p } => {
            let j = match (n, k, curve, s) {
                (Some(n), Some(k), None, None) => {
                    let d = single_derivative_element(*n, *k);
                    DeriveJson {
                        schema: "mtlab.derive.v1",
                        support: 1,
                        conductor: 1,
                        order: (*k).max(0) as u64,
                        n: *n,
                        group_orders: vec![*n],
                        coefficients: d.coeffs.iter().map(|c| c.to_string()).collect(),
                        congruent_mod_n: None,
                        congruence: None,
                    }
                }
                (None, None, Some(curve), Some(s)) => derive_on_theta(cli, curve, *s, terms, *p)?,
                _ => return Err(Error::Unsupported("derive needs --n and --k, or --curve and --S".into())),
            };
            emit(out, fmt, &j, || j.coefficients.join(","))?;
        }
    }
    Ok(EXIT_OK)
}

fn derive_on_theta(cli: &Cli, curve: &str, s: u64, terms: &[String], p: Option<u64>) -> Result<DeriveJson> {
    let prof = find_curve(cli, curve)?;
    let eig = eigen_symbol(cli, &prof)?;
    let theta = build_theta(&eig, &prof.label, s)?.element;
    let parsed: Vec<(u64, u64)> = terms
        .iter()
        .map(|t| {
            let (l, k) = t.split_once(':').ok_or_else(|| Error::Unsupported(format!("term '{t}' is not l:k")))?;
            let l = l.trim().parse().map_err(|_| Error::Unsupported(format!("bad prime in '{t}'")))?;
            let k = k.trim().parse().map_err(|_| Error::Unsupported(format!("bad k in '{t}'")))?;
            Ok((l, k))
        })
        .collect::<Result<_>>()?;
    let (x, congruence) = match p {
        Some(p) => {
            let (_, img) = theta_p_part(&theta, p);
            let (_, xi) = img.clear_denominators();
            let rep = congruence_filtration_check(&xi, prof.rank.max(1) as usize, p);
            (img, Some(rep))
        }
        None => (theta, None),
    };
    let d = DerivativeDescriptor::new(x.group.clone(), &parsed)?;
    let y = d.apply_rational(&x)?;
    let n_d = num_bigint::BigInt::from(d.n());
    let congruent = y.is_integral().then(|| {
        y.coeffs.iter().all(|c| num_integer::Integer::mod_floor(c.numer(), &n_d) == num_bigint::BigInt::from(0))
    });
    Ok(DeriveJson {
        schema: "mtlab.derive.v1",
        support: d.support(),
        conductor: d.conductor(),
        order: d.order(),
        n: d.n(),
        group_orders: x.group.orders(),
        coefficients: y.coeffs.iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect(),
        congruent_mod_n: congruent,
        congruence,
    })
}

/// Parses argv, runs the command and returns the process exit code:
/// 0 success, 1 inconsistency found, 2 usage error, 3 runtime error.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}
