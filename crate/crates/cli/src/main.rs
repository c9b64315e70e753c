//! `qg`: command-line access to forms, ideals and class groups of imaginary
//! quadratic orders.
//!
//! Results go to stdout, either as text or as a JSON envelope
//! `{"status":"ok","command":..,"result":..}`. Errors always go to stderr as
//! `{"status":"error","command":..,"error":..}`. Exit codes: 0 ok, 1 domain
//! error, 2 usage error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use qg_core::forms::{compose_crt, enumerate_reduced, parse_triple};
use qg_core::ideal::compose_via_matrices_traced;
use qg_core::verify::{verify_range, VerifyOptions};
use qg_core::{
    apply_transform, form_action, form_to_ideal, ideal_mul, ideal_to_form, norm_form,
    solve_transform, BinaryForm, ClassGroup, Discriminant, Error, GenTuple, IntMatrix,
    MultiQuadraticForm, OrderIdeal, QuadInt, Strategy,
};
use serde_json::{json, Value};

const MAX_TUPLE_LEN: usize = 64;

#[derive(Parser)]
#[command(
    name = "qg",
    version,
    about = "Exact arithmetic for imaginary quadratic orders"
)]
struct Cli {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "QG_FORMAT",
        default_value = "text"
    )]
    format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Disc {
    /// Discriminant, negative and congruent to 0 or 1 mod 4.
    #[arg(short = 'd', long = "disc", allow_hyphen_values = true)]
    d: String,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a form and report the reducing matrix.
    Reduce {
        #[command(flatten)]
        d: Disc,
        form: String,
    },
    /// List the reduced forms of discriminant d.
    Enumerate {
        #[command(flatten)]
        d: Disc,
    },
    /// Compose two forms by the CRT formula and reduce.
    Compose {
        #[command(flatten)]
        d: Disc,
        f: String,
        g: String,
    },
    /// Compose two forms by substitution into the principal norm form.
    ComposeMatrix {
        #[command(flatten)]
        d: Disc,
        f: String,
        g: String,
    },
    /// Class group: reduced forms, invariant factors, ambiguous classes.
    Classgroup {
        #[command(flatten)]
        d: Disc,
        /// Include the full multiplication table (indices into `elements`).
        #[arg(long)]
        table: bool,
    },
    /// Multiply two ideals given as "[a, (-b+sqrt(d))/2]" or "a,b".
    IdealMul {
        #[command(flatten)]
        d: Disc,
        alpha: String,
        beta: String,
    },
    /// Ideal corresponding to a form.
    Form2ideal {
        #[command(flatten)]
        d: Disc,
        form: String,
    },
    /// Form corresponding to an ideal.
    Ideal2form {
        #[command(flatten)]
        d: Disc,
        ideal: String,
    },
    /// Norm form of a generator tuple.
    Normform {
        #[command(flatten)]
        d: Disc,
        /// Comma-separated elements, each "p:q" for (p+q*sqrt(d))/2 or an integer.
        #[arg(allow_hyphen_values = true)]
        tuple: String,
    },
    /// Integer matrix carrying one generator tuple onto another.
    SolveTransform {
        #[command(flatten)]
        d: Disc,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Substitute an integer matrix into a form or a tuple's norm form.
    #[command(group(ArgGroup::new("source").required(true).args(["form", "tuple"])))]
    FormAction {
        #[command(flatten)]
        d: Disc,
        /// Rows separated by ';', entries by ','.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        form: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        tuple: Option<String>,
    },
    /// Two-torsion and the quotient by squares.
    Genus {
        #[command(flatten)]
        d: Disc,
    },
    /// Check that the composition routes agree over a discriminant range.
    Verify {
        /// Inclusive range "A..B", e.g. "-4..-2000".
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Pairs per discriminant; every pair is checked when h^2 fits.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        fundamental_only: bool,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Reduce { .. } => "reduce",
            Command::Enumerate { .. } => "enumerate",
            Command::Compose { .. } => "compose",
            Command::ComposeMatrix { .. } => "compose-matrix",
            Command::Classgroup { .. } => "classgroup",
            Command::IdealMul { .. } => "ideal-mul",
            Command::Form2ideal { .. } => "form2ideal",
            Command::Ideal2form { .. } => "ideal2form",
            Command::Normform { .. } => "normform",
            Command::SolveTransform { .. } => "solve-transform",
            Command::FormAction { .. } => "form-action",
            Command::Genus { .. } => "genus",
            Command::Verify { .. } => "verify",
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Output {
    json: Value,
    text: String,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn disc(d: &Disc) -> Outcome<Discriminant> {
    Ok(d.d.parse::<Discriminant>()?)
}

fn form(s: &str, d: &Discriminant) -> Outcome<BinaryForm> {
    Ok(BinaryForm::parse(s, d)?)
}

fn int(s: &str) -> Outcome<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("expected an integer, got {s:?}")))
}

fn tuple(s: &str, d: &Discriminant) -> Outcome<GenTuple> {
    let t = s.trim();
    let t = t.strip_prefix('(').unwrap_or(t);
    let t = t.strip_suffix(')').unwrap_or(t);
    let items: Vec<&str> = t.split(',').collect();
    if items.len() > MAX_TUPLE_LEN {
        return Err(Failure::Usage(format!(
            "tuple has {} elements, at most {MAX_TUPLE_LEN} allowed",
            items.len()
        )));
    }
    let coeffs = items
        .iter()
        .map(|item| match item.split_once(':') {
            Some((p, q)) => Ok(QuadInt::new(int(p)?, int(q)?, d)?),
            None => Ok(QuadInt::from_int(int(item)?, d)),
        })
        .collect::<Outcome<Vec<_>>>()?;
    Ok(GenTuple::new(coeffs)?)
}

fn lines<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| format!("{x}\n")).collect()
}

fn structure_text(s: &[u64]) -> String {
    if s.is_empty() {
        "trivial".into()
    } else {
        s.iter()
            .map(|n| format!("Z/{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

fn run(command: &Command) -> Outcome<Output> {
    match command {
        Command::Reduce { d, form: s } => {
            let d = disc(d)?;
            let f = form(s, &d)?;
            let (r, m) = f.reduce();
            Ok(Output {
                json: json!({ "input": to_json(&f), "reduced": to_json(&r), "matrix": to_json(&m) }),
                text: format!("{r}\nmatrix {m}\n"),
            })
        }
        Command::Enumerate { d } => {
            let d = disc(d)?;
            let forms = enumerate_reduced(&d)?;
            Ok(Output {
                json: json!({ "d": to_json(&d), "h": forms.len().to_string(), "forms": to_json(&forms) }),
                text: format!("h = {}\n{}", forms.len(), lines(&forms)),
            })
        }
        Command::Compose { d, f, g } => {
            let d = disc(d)?;
            let (f, g) = (form(f, &d)?, form(g, &d)?);
            let r = compose_crt(&f, &g)?;
            Ok(Output {
                json: json!({ "f": to_json(&f), "g": to_json(&g), "result": to_json(&r) }),
                text: format!("{r}\n"),
            })
        }
        Command::ComposeMatrix { d, f, g } => {
            let d = disc(d)?;
            let (f, g) = (form(f, &d)?, form(g, &d)?);
            let c = compose_via_matrices_traced(&f, &g)?;
            let text = format!(
                "{}\npartner {}\ntau1 {}\ntau2 {}\nB {}\ncomposite {}\nunreduced {}\n",
                c.reduced, c.partner, c.tau.tau1, c.tau.tau2, c.tau.big_b, c.composite, c.raw
            );
            Ok(Output {
                json: json!({
                    "f": to_json(&f),
                    "g": to_json(&g),
                    "partner": to_json(&c.partner),
                    "tau": to_json(&c.tau),
                    "composite": to_json(&c.composite),
                    "unreduced": to_json(&c.raw),
                    "result": to_json(&c.reduced),
                }),
                text,
            })
        }
        Command::Classgroup { d, table } => {
            let d = disc(d)?;
            let g = ClassGroup::compute(&d)?;
            let report = g.report(*table);
            let mut text = format!(
                "d = {d}\nh = {}\nstructure = {}\ngenus order = {}\ntwo-torsion = {}\nelements:\n{}",
                g.class_number(),
                structure_text(g.structure()),
                report.genus_order,
                report.two_torsion.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" "),
                lines(g.elements()),
            );
            if let Some(t) = &report.table {
                text.push_str("table:\n");
                for row in t {
                    let _ = writeln!(text, "{}", row.join(" "));
                }
            }
            Ok(Output {
                json: to_json(&report),
                text,
            })
        }
        Command::IdealMul { d, alpha, beta } => {
            let d = disc(d)?;
            let (a, b) = (OrderIdeal::parse(alpha, &d)?, OrderIdeal::parse(beta, &d)?);
            let p = ideal_mul(&a, &b)?;
            Ok(Output {
                json: json!({ "alpha": to_json(&a), "beta": to_json(&b), "content": p.content.to_string(), "ideal": to_json(&p.ideal) }),
                text: format!("{} * {}\n", p.content, p.ideal),
            })
        }
        Command::Form2ideal { d, form: s } => {
            let d = disc(d)?;
            let f = form(s, &d)?;
            let i = form_to_ideal(&f);
            Ok(Output {
                json: to_json(&i),
                text: format!("{i}\n"),
            })
        }
        Command::Ideal2form { d, ideal } => {
            let d = disc(d)?;
            let i = OrderIdeal::parse(ideal, &d)?;
            let f = ideal_to_form(&i);
            Ok(Output {
                json: to_json(&f),
                text: format!("{f}\n"),
            })
        }
        Command::Normform { d, tuple: s } => {
            let d = disc(d)?;
            let x = tuple(s, &d)?;
            let nf = norm_form(&x);
            Ok(Output {
                json: json!({ "tuple": to_json(&x), "form": to_json(&nf) }),
                text: format!("{nf}\n"),
            })
        }
        Command::SolveTransform { d, from, to } => {
            let d = disc(d)?;
            let (x, y) = (tuple(from, &d)?, tuple(to, &d)?);
            let h = solve_transform(&x, &y)?;
            let image = apply_transform(&h, &x.padded(h.dim()))?;
            Ok(Output {
                json: json!({ "from": to_json(&x), "to": to_json(&y), "matrix": to_json(&h), "image": to_json(&image) }),
                text: format!("{h}\n"),
            })
        }
        Command::FormAction {
            d,
            matrix,
            form: f,
            tuple: t,
        } => {
            let d = disc(d)?;
            let h: IntMatrix = matrix.parse()?;
            let source = match (f, t) {
                (Some(s), _) => binary_form(s, &d)?,
                (None, Some(s)) => {
                    let x = tuple(s, &d)?;
                    norm_form(&x)
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let out = form_action(&h, &source)?;
            Ok(Output {
                json: json!({ "matrix": to_json(&h), "input": to_json(&source), "output": to_json(&out) }),
                text: format!("{out}\n"),
            })
        }
        Command::Genus { d } => {
            let d = disc(d)?;
            let g = ClassGroup::compute(&d)?;
            let q = g.cl_mod_squares();
            let two = g.two_torsion();
            let classes: Vec<Value> = g
                .elements()
                .iter()
                .zip(&q.coset_of)
                .map(|(f, &c)| json!({ "form": to_json(f), "coset": to_json(&g.elements()[c]) }))
                .collect();
            let mut text = format!(
                "d = {d}\nh = {}\ngenus order = {}\ntwo-torsion = {}\n",
                g.class_number(),
                q.order,
                two.iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            for (f, &c) in g.elements().iter().zip(&q.coset_of) {
                let _ = writeln!(text, "{f} -> {}", g.elements()[c]);
            }
            Ok(Output {
                json: json!({
                    "d": to_json(&d),
                    "h": g.class_number().to_string(),
                    "structure": to_json(&g.report(false).structure),
                    "two_torsion": to_json(&two),
                    "genus_order": q.order.to_string(),
                    "coset_reps": to_json(&q.coset_reps),
                    "classes": classes,
                }),
                text,
            })
        }
        Command::Verify {
            range,
            samples,
            seed,
            fundamental_only,
            sequential,
        } => {
            let (from, to) = parse_range(range)?;
            let opts = VerifyOptions {
                samples: *samples,
                fundamental_only: *fundamental_only,
                seed: *seed,
                strategy: if *sequential {
                    Strategy::Sequential
                } else {
                    Strategy::default()
                },
            };
            let report = verify_range(from, to, &opts)?;
            let mut text = format!(
                "range {}..{}: {} discriminants, {} pairs, {} mismatches\n",
                report.range[0],
                report.range[1],
                report.discriminants,
                report.pairs,
                report.mismatches.len()
            );
            for m in &report.mismatches {
                let _ = writeln!(
                    text,
                    "d={} f={} g={} crt={} matrix={} ideal={}",
                    m.d, m.f, m.g, m.crt, m.matrix, m.ideal
                );
            }
            Ok(Output {
                json: to_json(&report),
                text,
            })
        }
    }
}

/// A raw binary form for substitution; it need not be primitive or reduced,
/// but its discriminant must match `d`.
fn binary_form(s: &str, d: &Discriminant) -> Outcome<MultiQuadraticForm> {
    let (a, b, c) = parse_triple(s)?;
    let actual = &b * &b - BigInt::from(4) * &a * &c;
    if &actual != d.value() {
        return Err(Error::FormDiscriminant {
            form: format!("({a},{b},{c})"),
            actual,
            expected: d.value().clone(),
        }
        .into());
    }
    Ok(MultiQuadraticForm::binary(a, b, c, d))
}

fn parse_range(s: &str) -> Outcome<(i64, i64)> {
    let bad = || Failure::Usage(format!("expected a range A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn envelope_error(command: &str, message: &str) -> String {
    json!({ "status": "error", "command": command, "error": message }).to_string()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let command = args
                .iter()
                .skip(1)
                .find(|a| !a.starts_with('-'))
                .map(String::as_str)
                .unwrap_or("");
            let message = e.render().to_string();
            eprintln!("{}", envelope_error(command, message.trim_end()));
            return ExitCode::from(2);
        }
    };
    let name = cli.command.name();
    let format = if cli.json { Format::Json } else { cli.format };
    match run(&cli.command) {
        Ok(out) => {
            let body = match format {
                Format::Json => {
                    json!({ "status": "ok", "command": name, "result": out.json }).to_string()
                        + "\n"
                }
                Format::Text => out.text,
            };
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("{}", envelope_error(name, &msg));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", envelope_error(name, &msg));
            ExitCode::from(2)
        }
    }
}
