//! Command-line front end. `run` is the whole program; `main` only wires
//! it to the process streams and exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::catalog::{adjacency, adjacency_closure, SingularityClass};
use crate::classify::{classify_prenormal, ClassificationReport};
use crate::deform::{
    apply, bifurcation_grid, directions_with, grid_points, miniversal_spec, parse_grid, parse_lambda, q_discriminant,
    BifurcationOptions, QFamily,
};
use crate::envelope::{emit, envelope_branches, trace_numeric, Format, TraceBox};
use crate::error::Error;
use crate::expr::prenormal_from_text;
use crate::germ::PrenormalForm;
use crate::series::{rat_to_string, Truncation, DEFAULT_TRUNCATION};
use crate::tanspace::{stable_codimension, tangential_codimension, MAX_DEGREE};

pub const MAX_JET_ENV: &str = "GERMFORGE_MAX_JET";

/// Index bound for the infinite families listed by `adjacency`.
const ADJACENCY_BOUND: u32 = 4;
const DEFAULT_RES: usize = 400;
const DEFAULT_BOX: f64 = 0.5;

#[derive(Parser, Debug)]
#[command(name = "germforge", version, about = "Classify germs of tangential families of plane curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// `<x-expr> ; <y-expr>` in xi and t
    #[arg(long)]
    family: Option<String>,
    /// Class name: I, II, S1,n, Tn, S2,2, S2,3+, S2,3-, S2,4, ...
    #[arg(long)]
    class: Option<String>,
    /// Read the family as `xi ; psi` and present it as `(xi + t, psi(xi + t, t))`
    #[arg(long = "xi-form")]
    xi_form: bool,
    #[arg(long = "max-jet")]
    max_jet: Option<u32>,
    /// Also write the JSON result here; errors go to stderr as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Trace {
    /// Source box `xi0:xi1:t0:t1`
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long)]
    res: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a family or a named normal form
    Classify(Input),
    /// Print the prenormal presentation `(xi + t, phi)`
    Prenormal(Input),
    /// Envelope branches, with optional SVG/CSV sketches
    Envelope {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        deform: Option<String>,
        #[command(flatten)]
        trace: Trace,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Codimension and tangential codimension from the tangent space
    Codim(Input),
    /// Normal form and miniversal directions of a class
    NormalForm(Input),
    /// Apply a miniversal deformation and reclassify
    Deform {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        deform: Option<String>,
    },
    /// Sample the discriminant of `x^(n+1) + l_n x^(n-1) + ... + l_1` for class Tn
    Discriminant {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify the miniversal deformation over a parameter grid
    Bifurcation {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        trace: Trace,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Adjacency closure of a class, or a single query with --to
    Adjacency {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        to: Option<String>,
    },
}

impl Command {
    fn input(&self) -> &Input {
        match self {
            Command::Classify(i) | Command::Prenormal(i) | Command::Codim(i) | Command::NormalForm(i) => i,
            Command::Envelope { input, .. }
            | Command::Deform { input, .. }
            | Command::Discriminant { input, .. }
            | Command::Bifurcation { input, .. }
            | Command::Adjacency { input, .. } => input,
        }
    }
}

/// Runs the program on `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let json_mode = cli.cmd.input().json.is_some();
    match dispatch(&cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            if json_mode {
                let v = json!({"error": e.kind(), "message": e.to_string(), "exitCode": e.exit_code()});
                let _ = writeln!(err, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

fn max_jet(input: &Input) -> Result<u32, Error> {
    if let Some(n) = input.max_jet {
        return Ok(n);
    }
    match std::env::var(MAX_JET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{MAX_JET_ENV} must be a natural number, got `{v}`"))),
        Err(_) => Ok(DEFAULT_TRUNCATION),
    }
}

fn parse_class(name: &str) -> Result<SingularityClass, Error> {
    Ok(name.parse::<SingularityClass>()?)
}

struct Loaded {
    label: String,
    class: Option<SingularityClass>,
    pf: PrenormalForm,
}

/// Reads `--family` or `--class` as a prenormal form at total degree `n`.
fn load(input: &Input, n: u32) -> Result<Loaded, Error> {
    let tr = Truncation::TotalDegree(n.max(3));
    match (&input.family, &input.class) {
        (Some(text), None) => Ok(Loaded {
            label: text.clone(),
            class: None,
            pf: prenormal_from_text(text, input.xi_form, tr)?,
        }),
        (None, Some(name)) => {
            let class = parse_class(name)?;
            let phi = class
                .normal_form(tr)
                .ok_or_else(|| Error::Usage(format!("class {class} has no normal form")))?;
            Ok(Loaded {
                label: class.name(),
                class: Some(class),
                pf: PrenormalForm::from_phi(phi)?,
            })
        }
        _ => Err(Error::Usage("give exactly one of --family or --class".into())),
    }
}

fn class_of(loaded: &Loaded, jet: u32) -> Result<SingularityClass, Error> {
    match loaded.class {
        Some(c) => Ok(c),
        None => Ok(classify_prenormal(&loaded.pf, jet)?.class),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Prints `value` as pretty JSON and mirrors it to `--json`.
fn emit_json<T: Serialize>(input: &Input, value: &T, out: &mut dyn Write) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))? + "\n";
    out.write_all(text.as_bytes())?;
    if let Some(p) = &input.json {
        write_file(p, text.as_bytes())?;
    }
    Ok(())
}

fn mirror_json<T: Serialize>(input: &Input, value: &T) -> Result<(), Error> {
    if let Some(p) = &input.json {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))? + "\n";
        write_file(p, text.as_bytes())?;
    }
    Ok(())
}

fn parse_box(spec: Option<&str>) -> Result<TraceBox, Error> {
    let Some(spec) = spec else {
        return Ok(TraceBox::square(DEFAULT_BOX));
    };
    let v: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Usage(format!("bad --box `{spec}`, expected xi0:xi1:t0:t1")))?;
    match v.as_slice() {
        [a, b, c, d] => Ok(TraceBox { xi: (*a, *b), t: (*c, *d) }),
        _ => Err(Error::Usage(format!("bad --box `{spec}`, expected xi0:xi1:t0:t1"))),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClassifyOutput<'a> {
    subcommand: &'static str,
    input: &'a str,
    class: String,
    codim: crate::catalog::Codim,
    tang_codim: crate::catalog::Codim,
    report: &'a ClassificationReport,
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<(), Error> {
    let input = cmd.input();
    let jet = max_jet(input)?;
    match cmd {
        Command::Classify(_) => {
            let l = load(input, jet)?;
            let report = classify_prenormal(&l.pf, jet)?;
            let (codim, tang_codim) = report.class.codims();
            emit_json(
                input,
                &ClassifyOutput {
                    subcommand: "classify",
                    input: &l.label,
                    class: report.class.name(),
                    codim,
                    tang_codim,
                    report: &report,
                },
                out,
            )
        }
        Command::Prenormal(_) => {
            let l = load(input, jet)?;
            writeln!(out, "xi + t ; {}", l.pf.phi())?;
            mirror_json(
                input,
                &json!({
                    "subcommand": "prenormal",
                    "input": l.label,
                    "phi": l.pf.phi().to_string(),
                    "alpha": rat_to_string(l.pf.alpha()),
                    "k": l.pf.k().iter().map(rat_to_string).collect::<Vec<_>>(),
                }),
            )
        }
        Command::NormalForm(_) => {
            let name = input
                .class
                .as_deref()
                .ok_or_else(|| Error::Usage("normal-form needs --class".into()))?;
            let class = parse_class(name)?;
            let tr = Truncation::TotalDegree(jet.max(3));
            let phi = match class.normal_form_text() {
                Some(t) => t,
                None => class
                    .normal_form(tr)
                    .ok_or_else(|| Error::Usage(format!("class {class} has no normal form")))?
                    .to_string(),
            };
            let dirs: Vec<String> = class
                .miniversal_directions()
                .unwrap_or_default()
                .iter()
                .map(|m| m.render())
                .collect();
            writeln!(out, "xi + t ; {phi}")?;
            writeln!(out, "directions: {}", if dirs.is_empty() { "none".to_string() } else { dirs.join(", ") })?;
            mirror_json(
                input,
                &json!({"subcommand": "normal-form", "class": class, "family": format!("xi + t ; {phi}"), "directions": dirs}),
            )
        }
        Command::Codim(_) => {
            let l = load(input, jet.max(MAX_DEGREE + 3))?;
            let f = l.pf.map_germ();
            let (c, degree) = stable_codimension(&f)?;
            let (tau, tau_stable) = tangential_codimension(&f, degree)?;
            emit_json(
                input,
                &json!({"subcommand": "codim", "input": l.label, "codim": c, "tangCodim": tau, "degree": degree, "stable": tau_stable}),
                out,
            )
        }
        Command::Deform { deform, .. } => {
            let l = load(input, jet)?;
            let class = class_of(&l, jet)?;
            let spec = miniversal_spec(class)?;
            let lambda = parse_lambda(deform.as_deref().unwrap_or(""), &spec.param_names)?;
            let deformed = apply(&l.pf, &spec, &lambda)?;
            let report = classify_prenormal(&deformed, jet)?;
            emit_json(
                input,
                &json!({
                    "subcommand": "deform",
                    "input": l.label,
                    "spec": spec,
                    "lambda": lambda.iter().map(rat_to_string).collect::<Vec<_>>(),
                    "prenormal": deformed.phi().to_string(),
                    "class": report.class.name(),
                    "report": report,
                }),
                out,
            )
        }
        Command::Envelope {
            deform, trace, svg, csv, ..
        } => {
            let l = load(input, jet)?;
            let (pf, dirs, lambda) = match deform {
                Some(d) => {
                    let spec = miniversal_spec(class_of(&l, jet)?)?;
                    let lambda = parse_lambda(d, &spec.param_names)?;
                    let dirs = directions_with(&spec, &lambda, l.pf.truncation());
                    (apply(&l.pf, &spec, &lambda)?, dirs, lambda)
                }
                None => (l.pf.clone(), Vec::new(), Vec::new()),
            };
            let rep = envelope_branches(&pf, crate::classify::ENVELOPE_TERMS)?;
            if svg.is_some() || csv.is_some() {
                let bbox = parse_box(trace.bbox.as_deref())?;
                let mut sketch = trace_numeric(&l.pf, &dirs, bbox, trace.res.unwrap_or(DEFAULT_RES))?;
                sketch.meta.family = l.label.clone();
                sketch.meta.lambda = lambda.iter().map(rat_to_string).collect();
                if let Some(p) = svg {
                    write_file(p, &emit(&sketch, Format::Svg))?;
                }
                if let Some(p) = csv {
                    write_file(p, &emit(&sketch, Format::Csv))?;
                }
            }
            emit_json(input, &json!({"subcommand": "envelope", "input": l.label, "envelope": rep}), out)
        }
        Command::Discriminant { grid, csv, .. } => {
            let name = input
                .class
                .as_deref()
                .ok_or_else(|| Error::Usage("discriminant needs --class Tn".into()))?;
            let SingularityClass::T(n) = parse_class(name)? else {
                return Err(Error::Usage("discriminant is defined for Tn classes".into()));
            };
            let names: Vec<String> = (1..=n).map(|i| format!("l{i}")).collect();
            let points = grid_points(&parse_grid(grid)?, &names)?;
            let mut text = names.join(",") + ",disc\n";
            let mut rows = Vec::new();
            for p in points {
                let d = q_discriminant(&QFamily::new(p.clone()));
                let vals: Vec<String> = p.iter().map(rat_to_string).collect();
                text.push_str(&format!("{},{}\n", vals.join(","), rat_to_string(&d)));
                rows.push(json!({"lambda": vals, "disc": rat_to_string(&d)}));
            }
            match csv {
                Some(p) => write_file(p, text.as_bytes())?,
                None => out.write_all(text.as_bytes())?,
            }
            mirror_json(input, &json!({"subcommand": "discriminant", "n": n, "points": rows}))
        }
        Command::Bifurcation { grid, trace, csv, .. } => {
            let name = input
                .class
                .as_deref()
                .ok_or_else(|| Error::Usage("bifurcation needs --class".into()))?;
            let class = parse_class(name)?;
            let tangency = match (&trace.bbox, trace.res) {
                (None, None) => None,
                (b, r) => Some((parse_box(b.as_deref())?, r.unwrap_or(DEFAULT_RES))),
            };
            let opts = BifurcationOptions {
                max_jet: jet,
                truncation: Truncation::TotalDegree(jet.max(3)),
                tangency,
            };
            let map = bifurcation_grid(class, &parse_grid(grid)?, &opts)?;
            let text = map.to_csv();
            match csv {
                Some(p) => write_file(p, text.as_bytes())?,
                None => out.write_all(text.as_bytes())?,
            }
            mirror_json(input, &map)
        }
        Command::Adjacency { to, .. } => {
            let name = input
                .class
                .as_deref()
                .ok_or_else(|| Error::Usage("adjacency needs --class".into()))?;
            let from = parse_class(name)?;
            match to {
                Some(t) => {
                    let to = parse_class(t)?;
                    let yes = adjacency(from, to);
                    writeln!(out, "{yes}")?;
                    mirror_json(input, &json!({"from": from.name(), "to": to.name(), "adjacent": yes}))
                }
                None => {
                    let closure: Vec<String> = adjacency_closure(from, ADJACENCY_BOUND).iter().map(|c| c.name()).collect();
                    for c in &closure {
                        writeln!(out, "{c}")?;
                    }
                    mirror_json(input, &json!({"from": from.name(), "bound": ADJACENCY_BOUND, "closure": closure}))
                }
            }
        }
    }
}
