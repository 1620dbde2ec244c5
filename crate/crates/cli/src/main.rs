//! Command-line front door for the cone/operator toolkit: inspect cone
//! specs, project points, validate and verify operator specs, reproduce the
//! built-in worked examples, and sweep directories of cones through the
//! cross-validation suites.
//!
//! Exit codes: 0 — every check passed (or the command is informational);
//! 1 — a check failed or came back inconclusive; 2 — parse or configuration
//! error; 3 — structurally valid input the toolkit cannot handle.
//! With the same inputs, seed, and tolerances, output bytes are identical
//! across runs, and the text and JSON formats carry the same verdicts.

mod demos;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use avn_core::numeric::{ToleranceConfig, Vector};
use avn_core::operators::{ConeMap, Property};
use avn_core::projection::project;
use avn_core::report::{SuiteResult, Verdict};
use avn_core::specs;
use avn_core::verify::{
    check_proper, coisotone_projection_suite, run_axiom_suite, selfdual_lattice_suite,
};
use avn_core::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use render::{combine, fmt_floats, render_suite, to_json, verdict_word, Rendered};

#[derive(Parser)]
#[command(
    name = "avn",
    version,
    about = "Numerical toolkit for convex cones, metric projections, and asymmetric vector norms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the absolute, relative, and membership tolerances together
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,

    /// Sample count for the randomized checks
    #[arg(long, global = true, value_name = "INT")]
    samples: Option<usize>,

    /// Seed for the deterministic sample streams
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print a cone's representation, order properties, and dual generators
    ConeInfo {
        /// Cone spec (JSON file)
        path: PathBuf,
    },
    /// Project a point onto a cone and report the orthogonal split
    Project {
        /// Cone spec (JSON file)
        cone: PathBuf,
        /// Point as comma-separated floats, e.g. "1,-0.5,2"
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Validate an operator spec and re-serialize it with references inlined
    AvnBuild {
        /// Operator spec (JSON file)
        path: PathBuf,
    },
    /// Build an operator spec and run the full axiom suite against it
    AvnVerify {
        /// Operator spec (JSON file)
        path: PathBuf,
    },
    /// Reproduce a built-in worked example by id
    PaperDemo {
        /// One of: ska, latt, primitiv, exx, nopro, cons, exavn, prop2
        id: String,
        /// Ambient dimension (exx and nopro only)
        #[arg(long, value_name = "INT")]
        dim: Option<usize>,
    },
    /// Run the projection/lattice cross-validation suites over a directory of cone specs
    Suite {
        /// Directory containing cone spec JSON files
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = tolerances(&cli).and_then(|tol| dispatch(&cli, &tol));
    match outcome {
        Ok(rendered) => {
            if let Err(e) = emit(&cli, &rendered) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match rendered.verdict {
                Verdict::Pass => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ParseError(_) => 2,
        _ => 3,
    }
}

fn tolerances(cli: &Cli) -> Result<ToleranceConfig> {
    let mut tol = ToleranceConfig::default();
    if let Some(t) = cli.tol {
        tol.abs_tol = t;
        tol.rel_tol = t;
        tol.membership_tol = t;
    }
    if let Some(s) = cli.samples {
        tol.sample_count = s;
    }
    if let Some(seed) = cli.seed {
        tol.seed = seed;
    }
    tol.validate()?;
    Ok(tol)
}

fn dispatch(cli: &Cli, tol: &ToleranceConfig) -> Result<Rendered> {
    match &cli.command {
        Command::ConeInfo { path } => cmd_cone_info(path, tol),
        Command::Project { cone, point } => cmd_project(cone, point, tol),
        Command::AvnBuild { path } => cmd_avn_build(path, tol),
        Command::AvnVerify { path } => cmd_avn_verify(path, tol),
        Command::PaperDemo { id, dim } => demos::run(id, *dim, tol),
        Command::Suite { dir } => cmd_suite(dir, tol),
    }
}

fn emit(cli: &Cli, rendered: &Rendered) -> std::io::Result<()> {
    let body = match cli.format {
        Format::Text => rendered.text.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rendered.json)
                .expect("report values are finite");
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn cmd_cone_info(path: &Path, tol: &ToleranceConfig) -> Result<Rendered> {
    let k = specs::load_cone(path)?;
    let pointed = k.is_pointed(tol);
    let full_dimensional = k.is_full_dimensional();
    let coisotone = k.is_coisotone(tol).ok();
    let selfdual = k.is_selfdual_simplicial(tol).ok();

    let mut summary = vec![
        k.kind_name().to_string(),
        format!("dimension {}", k.dim()),
        (if pointed { "pointed" } else { "NOT pointed" }).to_string(),
        (if full_dimensional {
            "full-dimensional"
        } else {
            "NOT full-dimensional"
        })
        .to_string(),
    ];
    if let Some(c) = coisotone {
        summary.push((if c { "coisotone" } else { "NOT coisotone" }).to_string());
    }
    if let Some(s) = selfdual {
        summary.push((if s { "self-dual" } else { "NOT self-dual" }).to_string());
    }
    let mut text = summary.join(", ");
    text.push('\n');

    let dual_generators: Option<Vec<Vec<f64>>> = k
        .dual()
        .ok()
        .and_then(|d| d.generator_columns().ok())
        .map(|m| m.column_iter().map(|c| c.as_slice().to_vec()).collect());
    match &dual_generators {
        Some(columns) => {
            text.push_str("dual cone generators:\n");
            for c in columns {
                text.push_str(&format!("  {}\n", fmt_floats(c)));
            }
            text.push_str("polar cone generators: the negatives of the dual generators\n");
        }
        None => {
            text.push_str("dual/polar generators: not computable in this representation\n");
        }
    }

    Ok(Rendered {
        text,
        json: json!({
            "kind": k.kind_name(),
            "dim": k.dim(),
            "pointed": pointed,
            "full_dimensional": full_dimensional,
            "coisotone": coisotone,
            "selfdual": selfdual,
            "dual_generators": dual_generators,
        }),
        verdict: Verdict::Pass,
    })
}

fn parse_point(text: &str) -> Result<Vector> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::ParseError(format!("not a number in the point: {piece:?}")))
        })
        .collect::<Result<_>>()?;
    if coords.is_empty() {
        return Err(Error::ParseError("the point has no coordinates".into()));
    }
    Ok(Vector::from_slice(&coords))
}

fn cmd_project(cone: &Path, point: &str, tol: &ToleranceConfig) -> Result<Rendered> {
    let k = specs::load_cone(cone)?;
    let x = parse_point(point)?;
    if x.dim() != k.dim() {
        return Err(Error::ParseError(format!(
            "point has {} coordinates but the cone lives in dimension {}",
            x.dim(),
            k.dim()
        )));
    }
    let result = project(&k, &x, tol)?;
    let text = format!(
        "x            = {}\n\
         P x          = {}\n\
         (I − P) x    = {}\n\
         ⟨Px, (I−P)x⟩ = {:e}\n\
         distance     = {}\n\
         active face  = {:?} (generator indices)\n",
        fmt_floats(x.as_slice()),
        fmt_floats(result.projected.as_slice()),
        fmt_floats(result.residual.as_slice()),
        result.inner,
        result.distance(),
        result.active_face,
    );
    Ok(Rendered {
        text,
        json: json!({
            "point": x.as_slice(),
            "projected": result.projected.as_slice(),
            "residual": result.residual.as_slice(),
            "inner": result.inner,
            "distance": result.distance(),
            "active_face": result.active_face,
        }),
        verdict: Verdict::Pass,
    })
}

fn cmd_avn_build(path: &Path, tol: &ToleranceConfig) -> Result<Rendered> {
    let doc = specs::load_avn_doc(path)?;
    let base = specs::base_dir(path);
    let op = doc.build(base, tol)?;
    let canonical = doc.canonicalize(base)?;
    let canonical_json = serde_json::to_value(&canonical)
        .map_err(|e| Error::ParseError(format!("re-serialization failed: {e}")))?;
    let pretty = serde_json::to_string_pretty(&canonical_json)
        .map_err(|e| Error::ParseError(format!("re-serialization failed: {e}")))?;
    let text = format!(
        "valid: {} in dimension {}\ncanonical spec:\n{pretty}\n",
        op.label(),
        op.dim(),
    );
    Ok(Rendered {
        text,
        json: canonical_json,
        verdict: Verdict::Pass,
    })
}

fn cmd_avn_verify(path: &Path, tol: &ToleranceConfig) -> Result<Rendered> {
    let op = specs::load_avn(path, tol)?;
    let mut suite = run_axiom_suite(&op, tol);
    // The suite covers claimed properties; properness is always verified
    // here, claimed or not, since a silent lack of properness is exactly
    // what this command exists to surface.
    if !op.claimed_properties().contains(&Property::Proper) {
        let mut reports = suite.reports;
        reports.push(check_proper(&op, tol, tol.sample_count));
        suite = SuiteResult::new(suite.suite_name, reports);
    }
    let verdict = suite.verdict;
    Ok(Rendered {
        text: render_suite(&suite),
        json: to_json(&suite),
        verdict,
    })
}

fn cmd_suite(dir: &Path, tol: &ToleranceConfig) -> Result<Rendered> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::ParseError(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::ParseError(format!(
            "no .json cone specs found in {}",
            dir.display()
        )));
    }

    let mut text = String::new();
    let mut entries = Vec::new();
    let mut verdicts = Vec::new();
    for file in &files {
        let name = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let k = specs::load_cone(file)?;
        let projection_suite = coisotone_projection_suite(&k, tol)?;
        let lattice_suite = selfdual_lattice_suite(&k, tol)?;
        text.push_str(&format!("== {name} ==\n"));
        text.push_str(&render_suite(&projection_suite));
        text.push_str(&render_suite(&lattice_suite));
        text.push('\n');
        verdicts.push(projection_suite.verdict);
        verdicts.push(lattice_suite.verdict);
        entries.push(json!({
            "file": name,
            "coisotone_projection": to_json(&projection_suite),
            "selfdual_lattice": to_json(&lattice_suite),
        }));
    }
    let verdict = combine(verdicts);
    text.push_str(&format!("overall: {}\n", verdict_word(verdict)));
    Ok(Rendered {
        text,
        json: json!({ "cones": entries, "overall": to_json(&verdict) }),
        verdict,
    })
}
