//! Command-line front end: recipes → relation → bases → decomposition.
//!
//! Exit codes are a stable contract:
//! 0 success, 1 internal/IO, 2 parse, 3 evaluation, 4 coprimality,
//! 5 insufficient precision, 6 degenerate input, 7 basis gap.

use crate::basis_rr::{genus, ExpandedBasis, OrderCompleteBasis};
use crate::error::{Error, Result};
use crate::exact::QRat;
use crate::funcfield::FunctionField;
use crate::intbasis::{infinity_basis, integral_basis};
use crate::normalize::{normalize_at_infinity, NormalizedBasis};
use crate::qseries::{evaluate_recipe, LaurentSeries, SeriesRecipe};
use crate::reduce::{check_congruence, closed_form, express};
use crate::relation::{find_relation, required_precision, BivariatePoly};
use clap::{Parser, Subcommand, ValueEnum};
use num::One;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "ordbasis", version, about = "Order-complete bases of modular-function rings, exact decompositions, and partition congruences")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the payload to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a series recipe and print its q-expansion
    Series {
        /// Recipe file (s-expression grammar, see README)
        recipe: PathBuf,
        /// Absolute precision: expansion printed modulo O(q^TRUNC)
        #[arg(long, default_value_t = 10)]
        trunc: i64,
    },
    /// Find the algebraic relation p(t, f) = 0 from two recipes
    Relation {
        /// Recipe for the generator t
        t: PathBuf,
        /// Recipe for the generator f
        f: PathBuf,
        /// Working precision (defaults to the Ansatz bound)
        #[arg(long)]
        trunc: Option<i64>,
    },
    /// Compute the order-complete basis B_d^REF from a relation file
    Basis {
        /// Relation file (lines `i j coefficient`)
        relation: PathBuf,
        /// Recipe for t
        t: PathBuf,
        /// Recipe for f
        f: PathBuf,
        /// Riemann-Roch parameter d
        #[arg(long, default_value_t = 1)]
        d: i64,
        /// Series window printed per entry
        #[arg(long, default_value_t = 10)]
        trunc: i64,
    },
    /// Express a target series in B_d^REF and emit the closed form
    Express {
        /// Relation file
        relation: PathBuf,
        /// Recipe for t
        t: PathBuf,
        /// Recipe for f
        f: PathBuf,
        /// Recipe for the target series
        target: PathBuf,
        /// Certification window for the residual
        #[arg(long, default_value_t = 50)]
        trunc: i64,
        /// Force a particular d (defaults to the smallest that covers
        /// the target's pole order)
        #[arg(long)]
        d: Option<i64>,
    },
    /// Check p(a·n + b) ≡ 0 (mod m) for n = 0..count-1
    Congruence {
        a: i64,
        b: i64,
        m: i64,
        #[arg(long, default_value_t = 200)]
        count: i64,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    eprintln!("ordbasis {}", env!("CARGO_PKG_VERSION"));
    let payload = match dispatch(&cli) {
        Ok(p) => p,
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match &cli.out {
        None => {
            println!("{payload}");
            0
        }
        Some(path) => match std::fs::write(path, payload + "\n") {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                1
            }
        },
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::Eval(_) | Error::ZeroDivisor | Error::ZeroSeries => 3,
        Error::Coprimality(..) => 4,
        Error::InsufficientPrecision(_) | Error::Precision(_) => 5,
        Error::DegenerateInput(_) => 6,
        Error::Gap(_) => 7,
        Error::InternalContractViolation(_) => 1,
    }
}

enum CliError {
    Io(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CResult<T> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_recipe(path: &Path) -> CResult<SeriesRecipe> {
    Ok(SeriesRecipe::parse(&read_file(path)?)?)
}

fn read_relation(path: &Path) -> CResult<BivariatePoly> {
    Ok(BivariatePoly::from_text(&read_file(path)?)?)
}

fn rational_str(c: &QRat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn series_terms_json(s: &LaurentSeries) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .filter(|(_, c)| !num::Zero::is_zero(*c))
        .map(|(k, c)| json!({"exp": k, "coeff": rational_str(c)}))
        .collect();
    json!({
        "valuation": s.valuation(),
        "trunc": s.trunc(),
        "terms": terms,
    })
}

fn series_text(s: &LaurentSeries) -> String {
    let mut out = String::new();
    for (k, c) in s.terms() {
        if num::Zero::is_zero(c) {
            continue;
        }
        out.push_str(&format!("q^{k}: {}\n", rational_str(c)));
    }
    out.push_str(&format!("O(q^{})", s.trunc()));
    out
}

/// The series-independent half of the pipeline: integral bases and the
/// normalization at infinity. This is by far the most expensive part,
/// so it is computed once and shared.
fn pipeline_nb(p: BivariatePoly) -> Result<NormalizedBasis> {
    let field = FunctionField::new(p)?;
    let global = integral_basis(&field)?;
    let at_inf = infinity_basis(&field)?;
    normalize_at_infinity(&global, &at_inf)
}

/// Evaluate the generator recipes and build `B_d^REF`, retrying with
/// more series precision when the evaluation window collapses. With
/// `d = None` the smallest `d` whose basis reaches pole order
/// `p_target` is used (available as `ocb.d_used`).
fn ocb_with_retry(
    nb: &NormalizedBasis,
    t: &SeriesRecipe,
    f: &SeriesRecipe,
    d: Option<i64>,
    p_target: i64,
    window: i64,
) -> Result<(OrderCompleteBasis, LaurentSeries, LaurentSeries)> {
    let mut prec = window + 60;
    for _ in 0..6 {
        let ts = evaluate_recipe(t, prec)?;
        let fs = evaluate_recipe(f, prec)?;
        let run = || -> Result<OrderCompleteBasis> {
            let eb = ExpandedBasis::new(nb, &ts, &fs)?;
            let d_used = match d {
                Some(du) => du,
                None => eb.min_d_for_order(p_target, 4)?,
            };
            eb.order_complete_basis(d_used, window)
        };
        match run() {
            Err(Error::InsufficientPrecision(_)) => {
                prec *= 2;
                continue;
            }
            Err(e) => return Err(e),
            Ok(ocb) => return Ok((ocb, ts, fs)),
        }
    }
    Err(Error::InsufficientPrecision(
        "basis pipeline did not stabilize; raise --trunc".into(),
    ))
}

fn dispatch(cli: &Cli) -> CResult<String> {
    match &cli.cmd {
        Cmd::Series { recipe, trunc } => {
            let r = read_recipe(recipe)?;
            let s = evaluate_recipe(&r, *trunc)
                .map_err(|e| match e {
                    Error::Parse { .. } => e,
                    other => Error::Eval(other.to_string()),
                })?;
            Ok(match cli.format {
                Format::Text => series_text(&s),
                Format::Json => serde_json::to_string_pretty(&series_terms_json(&s)).unwrap(),
            })
        }

        Cmd::Relation { t, f, trunc } => {
            let tr = read_recipe(t)?;
            let fr = read_recipe(f)?;
            // probe pole orders to pick the Ansatz precision
            let probe_t = evaluate_recipe(&tr, 1)?;
            let probe_f = evaluate_recipe(&fr, 1)?;
            let n = probe_t.pole_order()?;
            let m = probe_f.pole_order()?;
            let prec = trunc.unwrap_or_else(|| required_precision(n, m));
            let ts = evaluate_recipe(&tr, prec)?;
            let fs = evaluate_recipe(&fr, prec)?;
            let p = find_relation(&ts, &fs)?;
            Ok(match cli.format {
                Format::Text => p.to_text().trim_end().to_string(),
                Format::Json => {
                    let coeffs: Vec<Value> = p
                        .coeffs()
                        .iter()
                        .map(|(&(i, j), c)| json!({"i": i, "j": j, "coeff": c.to_string()}))
                        .collect();
                    serde_json::to_string_pretty(&json!({
                        "degx": p.degx(),
                        "degy": p.degy(),
                        "coeffs": coeffs,
                        "display": p.to_string(),
                    }))
                    .unwrap()
                }
            })
        }

        Cmd::Basis {
            relation,
            t,
            f,
            d,
            trunc,
        } => {
            let p = read_relation(relation)?;
            let tr = read_recipe(t)?;
            let fr = read_recipe(f)?;
            let nb = pipeline_nb(p)?;
            let (ocb, _, _) = ocb_with_retry(&nb, &tr, &fr, Some(*d), 0, *trunc)?;
            let g = genus(&nb);
            Ok(match cli.format {
                Format::Text => {
                    let mut out = String::new();
                    out.push_str(&format!("d = {}, genus = {g}, gaps = {:?}\n", ocb.d_used, ocb.gaps));
                    for e in &ocb.entries {
                        out.push_str(&format!(
                            "pole order {}: {}\n  series: {}\n",
                            e.pole_order, e.expr, e.series
                        ));
                    }
                    out.trim_end().to_string()
                }
                Format::Json => {
                    let entries: Vec<Value> = ocb
                        .entries
                        .iter()
                        .map(|e| {
                            json!({
                                "pole_order": e.pole_order,
                                "expr": e.expr.to_string(),
                                "series": series_terms_json(&e.series),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&json!({
                        "d": ocb.d_used,
                        "genus": g,
                        "gaps": ocb.gaps.iter().collect::<Vec<_>>(),
                        "entries": entries,
                    }))
                    .unwrap()
                }
            })
        }

        Cmd::Express {
            relation,
            t,
            f,
            target,
            trunc,
            d,
        } => {
            let p = read_relation(relation)?;
            let tr = read_recipe(t)?;
            let fr = read_recipe(f)?;
            let tg = read_recipe(target)?;
            let target_series = evaluate_recipe(&tg, *trunc)?;
            let nb = pipeline_nb(p)?;
            let p_target = target_series.pole_order()?.max(0);
            let (ocb, ts, fs) = ocb_with_retry(&nb, &tr, &fr, *d, p_target, *trunc)?;
            let d_used = ocb.d_used;
            let dec = express(&target_series, &ocb, &ts)?;
            let cf = closed_form(&dec, &ocb);
            // independent identity report: re-expand the closed form
            let redo = cf.to_qseries(&ts, &fs, *trunc)?;
            let diff = target_series
                .sub(&redo)
                .truncate_to((*trunc).min(redo.trunc()));
            let closed_form_residual = diff.valuation().unwrap_or(diff.trunc());
            let terms: Vec<(i64, String)> = dec
                .terms
                .iter()
                .map(|(i, c)| (ocb.entries[*i].pole_order, c.to_string()))
                .collect();
            Ok(match cli.format {
                Format::Text => {
                    let mut out = String::new();
                    out.push_str(&format!("d = {d_used}\n"));
                    for (o, c) in &terms {
                        out.push_str(&format!("order {o}: {c}\n"));
                    }
                    out.push_str(&format!(
                        "residual valuation: {} (certified to O(q^{}))\n",
                        dec.residual_valuation, dec.certified_to
                    ));
                    out.push_str(&format!("closed form: {cf}\n"));
                    out.push_str(&format!(
                        "closed-form re-expansion residual: O(q^{closed_form_residual})"
                    ));
                    out
                }
                Format::Json => serde_json::to_string_pretty(&json!({
                    "d": d_used,
                    "terms": terms
                        .iter()
                        .map(|(o, c)| json!({"order": o, "coefficient": c}))
                        .collect::<Vec<_>>(),
                    "residual_valuation": dec.residual_valuation,
                    "certified_to": dec.certified_to,
                    "closed_form": cf.to_string(),
                    "closed_form_residual": closed_form_residual,
                }))
                .unwrap(),
            })
        }

        Cmd::Congruence { a, b, m, count } => {
            let violations = check_congruence(*a, *b, *m, *count);
            Ok(match cli.format {
                Format::Text => {
                    if violations.is_empty() {
                        format!("PASS: p({a}n+{b}) ≡ 0 (mod {m}) for n = 0..{count}")
                    } else {
                        format!(
                            "FAIL: violations at n = {:?} for p({a}n+{b}) mod {m}",
                            violations
                        )
                    }
                }
                Format::Json => serde_json::to_string_pretty(&json!({
                    "a": a, "b": b, "modulus": m, "count": count,
                    "violations": violations,
                    "pass": violations.is_empty(),
                }))
                .unwrap(),
            })
        }
    }
}
