use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mwk::checks;
use mwk::comparison::{self, residue_field};
use mwk::field::Field;
use mwk::gw::{self, GwElement};
use mwk::poset::{self, build_spec_h_kmw, Truncation};
use mwk::syntax::{parse_expression, parse_field, parse_form, parse_prime, parse_primes, parse_tt_point};

#[derive(Parser)]
#[command(name = "mwk", about = "Milnor-Witt K-theory of fields and its spectra")]
struct Cli {
    /// Trial-division bound for factoring rationals.
    #[arg(long, global = true, env = "MWK_FACTOR_BOUND")]
    factor_bound: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FieldArg {
    /// Q, F(q), Q(sqrt(d)), Rclosed or Cclosed.
    #[arg(long, default_value = "Q")]
    field: String,
}

#[derive(Args, Clone)]
struct TruncArgs {
    #[arg(long, default_value = "2,3,5,7")]
    primes: String,
    #[arg(long, default_value_t = 3)]
    heights: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    SpecH,
    SpecGw,
    ShFin,
    ShC2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    ShFin,
    ShC2,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the normal form of an expression.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Decide equality of two expressions.
    Eq {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Print the degree of a homogeneous expression.
    Degree {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Invariants and Witt decomposition of a diagonal form.
    Gw {
        #[arg(allow_hyphen_values = true)]
        form: String,
        /// Second form to test for isometry.
        #[arg(long, allow_hyphen_values = true)]
        compare: Option<String>,
        /// Test membership in I^n.
        #[arg(long)]
        power: Option<i64>,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Build a truncated spectrum.
    Spec {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        trunc: TruncArgs,
        #[arg(long, value_enum, default_value = "spec-h")]
        space: Space,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a comparison map at a point.
    Rho {
        #[arg(long, value_enum)]
        source: Source,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 0)]
        ordering: usize,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Residue field of a prime, and optionally the image of an expression.
    Residue {
        #[arg(long)]
        prime: String,
        #[arg(long, allow_hyphen_values = true)]
        expr: Option<String>,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Run a self-check and print a JSON report.
    Check {
        /// One of identities, census, count, closure, rho, coverage, forms, witt, residue, all.
        name: String,
        /// Restrict to one field; all backends otherwise.
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        trunc: TruncArgs,
        #[arg(long, default_value_t = 20240229)]
        seed: u64,
    },
    /// Write all spectra and reports for a field into a directory.
    Export {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        trunc: TruncArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Defects(String),
}

type Out = Result<String, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn field(cli: &Cli, text: &str) -> Result<Field, Failure> {
    let f = parse_field(text).map_err(usage)?;
    Ok(match cli.factor_bound {
        Some(b) => f.with_factor_bound(b),
        None => f,
    })
}

fn truncation(t: &TruncArgs) -> Result<Truncation, Failure> {
    Truncation::new(&parse_primes(&t.primes).map_err(usage)?, t.heights).map_err(usage)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn spec_text(f: &Field, t: &Truncation, space: Space, format: Format) -> String {
    macro_rules! emit {
        ($p:expr) => {{
            let p = $p;
            match format {
                Format::Dot => p.export_dot(),
                Format::Json => p.export_json(),
            }
        }};
    }
    match space {
        Space::SpecH => emit!(build_spec_h_kmw(f, t)),
        Space::SpecGw => emit!(gw::spec_gw(f, t)),
        Space::ShFin => emit!(poset::build_spc_sh_fin(t)),
        Space::ShC2 => emit!(poset::build_spc_sh_c2(t)),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Normalize { expr, field: fa } => {
            let f = field(cli, &fa.field)?;
            Ok(format!("{}\n", parse_expression(expr, &f).map_err(usage)?.normalize()))
        }
        Cmd::Eq { lhs, rhs, field: fa } => {
            let f = field(cli, &fa.field)?;
            let a = parse_expression(lhs, &f).map_err(usage)?;
            let b = parse_expression(rhs, &f).map_err(usage)?;
            Ok(format!("{}\n", a.eq_verdict(&b).map_err(usage)?))
        }
        Cmd::Degree { expr, field: fa } => {
            let f = field(cli, &fa.field)?;
            match parse_expression(expr, &f).map_err(usage)?.degree().map_err(usage)? {
                Some(n) => Ok(format!("{n}\n")),
                None => Ok("zero\n".into()),
            }
        }
        Cmd::Gw { form, compare, power, field: fa } => {
            let f = field(cli, &fa.field)?;
            let q = parse_form(form, &f).map_err(usage)?;
            let inv = gw::invariants(&q).map_err(usage)?;
            let (an, h) = gw::witt_decompose(&q).map_err(usage)?;
            let mut v = json!({
                "form": q.to_string(),
                "invariants": inv.to_json(&f),
                "anisotropic": an.to_string(),
                "hyperbolic_planes": h,
                "witt_zero": GwElement::from_form(&q).map_err(usage)?.witt_is_zero().map_err(usage)?,
            });
            if let Some(c) = compare {
                let g = parse_form(c, &f).map_err(usage)?;
                v["isometric"] = json!(gw::isometric(&q, &g).map_err(usage)?);
            }
            if let Some(n) = power {
                v["in_power"] = json!({ "n": n, "member": gw::in_fundamental_power(&q, *n).map_err(usage)? });
            }
            Ok(pretty(&v))
        }
        Cmd::Spec { field: fa, trunc, space, format, out } => {
            let f = field(cli, &fa.field)?;
            let t = truncation(trunc)?;
            let text = spec_text(&f, &t, *space, *format);
            match out {
                Some(p) => write_file(p, &text).map(|_| String::new()),
                None => Ok(text),
            }
        }
        Cmd::Rho { source, point, ordering, field: fa } => {
            let f = field(cli, &fa.field)?;
            let x = parse_tt_point(point).map_err(usage)?;
            let y = match source {
                Source::ShFin => comparison::rho_bullet_sh_fin(&x),
                Source::ShC2 => comparison::rho_bullet_sh_c2(&x, &f, *ordering),
            }
            .map_err(usage)?;
            Ok(format!("{}\n", y.literal()))
        }
        Cmd::Residue { prime, expr, field: fa } => {
            let f = field(cli, &fa.field)?;
            let x = parse_prime(prime).map_err(usage)?;
            if !x.valid_for(&f) {
                return Err(usage(format!("{} is not a point of Spec^h over {f}", x.literal())));
            }
            let rf = residue_field(&x);
            let mut v = json!({ "prime": x.literal(), "residue_field": rf.to_string() });
            if let Some(e) = expr {
                let e = parse_expression(e, &f).map_err(usage)?;
                let r = comparison::evaluate_at_prime(&e, &x).map_err(usage)?;
                v["value"] = json!(r.render());
                v["in_prime"] = json!(r.is_zero());
            }
            Ok(pretty(&v))
        }
        Cmd::Check { name, field: fa, trunc, seed } => {
            let fields = match fa {
                Some(text) => vec![field(cli, text)?],
                None => checks::backends(),
            };
            let t = truncation(trunc)?;
            let results = checks::run(name, &fields, &t, *seed).map_err(usage)?;
            let pass = results.iter().all(|r| r.pass);
            let report = json!({
                "pass": pass,
                "seed": seed,
                "checks": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            if pass {
                Ok(pretty(&report))
            } else {
                Err(Failure::Defects(pretty(&report)))
            }
        }
        Cmd::Export { field: fa, trunc, out } => {
            let f = field(cli, &fa.field)?;
            let t = truncation(trunc)?;
            fs::create_dir_all(out).map_err(usage)?;
            let mut written = Vec::new();
            for (space, stem) in [
                (Space::SpecH, "spec_h"),
                (Space::SpecGw, "spec_gw"),
                (Space::ShFin, "sh_fin"),
                (Space::ShC2, "sh_c2"),
            ] {
                for (format, ext) in [(Format::Dot, "dot"), (Format::Json, "json")] {
                    let p = out.join(format!("{stem}.{ext}"));
                    write_file(&p, &spec_text(&f, &t, space, format))?;
                    written.push(p.display().to_string());
                }
            }
            let p = out.join("coverage.json");
            write_file(&p, &pretty(&comparison::coverage_report(&f, &t).to_json()))?;
            written.push(p.display().to_string());
            Ok(written.join("\n") + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Defects(report)) => {
            print!("{report}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

