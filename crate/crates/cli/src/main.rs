//! `tropdeg`: build the example degenerations, run the combinatorial checks
//! and write JSON reports or SVG pictures.
//!
//! Exit status: 0 on success, 1 when a check fails (for example a space that
//! is not simple), 2 on malformed input or an out-of-range parameter.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tropdeg::examples::{ExampleSpec, Pipeline};
use tropdeg::report::{
    embedding_report, example_report, lg_report, parse_complex, ring_report, space_simplicity_report,
    to_canonical_string,
};
use tropdeg::svg::{net, render_svg};
use tropdeg::tropical::TropicalSpace;
use tropdeg::Error;

const DEFAULT_MAX_DIM: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "tropdeg", version, about = "Toric Tyurin degenerations: examples, checks and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an example pipeline and summarize it.
    Example(Source),
    /// Report the tropical space of an example or a complex file.
    Tropicalize(Source),
    /// Check that every monodromy polytope is an elementary simplex.
    CheckSimple(Source),
    /// Check integral surjectivity of the embedding of the central fibre.
    EmbedCheck(Source),
    /// Truncate the Landau-Ginzburg component and check its open embedding.
    LgTruncate(Source),
    /// Hilbert counts and presentation of the zeroth-order ring.
    Ring(Source),
    /// Draw a 2-dimensional space as SVG, marking its discriminant.
    Render(Source),
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Example name: kp1-2, quintic or hypercube.
    #[arg(long)]
    example: Option<String>,
    /// Parameter k for kp1-2 and hypercube.
    #[arg(long)]
    k: Option<usize>,
    /// Parameter i for the quintic.
    #[arg(long)]
    i: Option<usize>,
    /// A complex file: {"points": [...], "cells": [[...]]}.
    #[arg(long, conflicts_with = "example")]
    complex: Option<PathBuf>,
    /// Degree bound for `ring`.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Output file; reports go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command did not succeed.
#[derive(Debug)]
enum Failure {
    /// A check ran and answered no; the report is still written.
    Check,
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn max_dim() -> Result<usize, Failure> {
    match std::env::var("TROPDEG_MAX_DIM") {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("TROPDEG_MAX_DIM must be a nonnegative integer, got '{v}'"))),
    }
}

fn check_dim(dim: usize) -> Result<(), Failure> {
    let limit = max_dim()?;
    if dim > limit {
        return Err(Error::DimensionLimit { dim, limit }.into());
    }
    Ok(())
}

enum Input {
    Example(Box<Pipeline>),
    Complex(TropicalSpace),
}

impl Input {
    fn space(&self) -> &TropicalSpace {
        match self {
            Input::Example(p) => &p.space,
            Input::Complex(t) => t,
        }
    }

    fn source(&self) -> Value {
        match self {
            Input::Example(p) => json!(p.spec),
            Input::Complex(t) => json!({ "complex": t.label() }),
        }
    }

    fn pipeline(&self, verb: &str) -> Result<&Pipeline, Failure> {
        match self {
            Input::Example(p) => Ok(p),
            Input::Complex(_) => Err(Failure::Input(format!("{verb} needs --example"))),
        }
    }
}

fn load(src: &Source) -> Result<Input, Failure> {
    match (&src.example, &src.complex) {
        (Some(name), None) => {
            let spec = ExampleSpec { name: name.clone(), k: src.k, i: src.i };
            if let Some(d) = spec.ambient_dim() {
                check_dim(d)?;
            }
            Ok(Input::Example(Box::new(spec.build()?)))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            let t = parse_complex(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            check_dim(t.ambient_dim())?;
            Ok(Input::Complex(t))
        }
        _ => Err(Failure::Input("give exactly one of --example or --complex".into())),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(src: &Source, report: &Value) -> Result<(), Failure> {
    write_out(src.out.as_deref(), &to_canonical_string(report))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Example(src) => {
            let input = load(&src)?;
            emit(&src, &example_report(input.pipeline("example")?)?)
        }
        Command::Tropicalize(src) => {
            let input = load(&src)?;
            let t = input.space();
            emit(&src, &json!({ "source": input.source(), "space": t.to_report() }))
        }
        Command::CheckSimple(src) => {
            let input = load(&src)?;
            let report = space_simplicity_report(input.space(), input.source())?;
            emit(&src, &report)?;
            if report["simple"] == json!(true) {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::EmbedCheck(src) => {
            let input = load(&src)?;
            let report = embedding_report(input.pipeline("embed-check")?)?;
            emit(&src, &report)?;
            if report["integrally_surjective"] == json!(true) && report["central_fibre_matches"] == json!(true) {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::LgTruncate(src) => {
            let input = load(&src)?;
            let report = lg_report(input.pipeline("lg-truncate")?)?;
            emit(&src, &report)?;
            if report["open_embedding"].get("error").is_some() {
                Err(Failure::Check)
            } else {
                Ok(())
            }
        }
        Command::Ring(src) => {
            let input = load(&src)?;
            emit(&src, &ring_report(input.space(), src.degree)?)
        }
        Command::Render(src) => {
            let input = load(&src)?;
            let t = input.space();
            let svg = render_svg(t)?;
            let marks = net(t)?.marks.len();
            let summary = json!({
                "source": input.source(),
                "cells": t.maximal_cells().len(),
                "discriminant_marks": marks,
                "svg": src.out.as_ref().map(|p| p.display().to_string()),
            });
            match &src.out {
                Some(p) => {
                    write_out(Some(p), &svg)?;
                    print!("{}", to_canonical_string(&summary));
                    Ok(())
                }
                None => write_out(None, &svg),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
