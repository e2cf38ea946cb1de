mod args;
mod commands;
mod points;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command};

/// A command that could not produce a result, with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.into() }
    }
    pub fn input(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, msg: msg.into() }
    }
}

impl From<convexgeo::Error> for Failure {
    fn from(e: convexgeo::Error) -> Self {
        use convexgeo::Error::*;
        let code = match e {
            Parse { .. } | Io(_) | NonManifoldEdge(..) | OpenSurface(..) | EulerCharacteristic(_) | Degenerate(_)
            | InvalidPoint(_) | OriginNotInterior => EXIT_INPUT,
            ChartTooLarge(_) | OutsideChart | NotInChartImage(_) | EmptySources | EmptyGrid | GridOutsideDomain
            | InvalidParameter(_) => EXIT_USAGE,
            ToleranceUnreachable { .. } | ZeroLengthPath | MidpointCertification(_) | NoAdmissiblePairs(_) => EXIT_CHECK,
        };
        Failure { code, msg: e.to_string() }
    }
}

/// Result of a successful run.
pub struct Outcome {
    pub result: Value,
    pub pass: bool,
    pub svg: Option<(PathBuf, String)>,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CONVEXGEO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Failure::usage(format!("CONVEXGEO_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))
}

fn describe(cmd: &Command) -> (&'static str, Value, Option<PathBuf>) {
    fn v<T: serde::Serialize>(t: &T) -> Value {
        serde_json::to_value(t).unwrap_or(Value::Null)
    }
    match cmd {
        Command::CheckConvex(a) => ("check-convex", v(a), a.output.out.clone()),
        Command::Chart(a) => ("chart", v(a), a.output.out.clone()),
        Command::Distance(a) => ("distance", v(a), a.output.out.clone()),
        Command::Diameter(a) => ("diameter", v(a), a.output.out.clone()),
        Command::Approx(a) => ("approx", v(a), a.output.out.clone()),
        Command::Converge(a) => ("converge", v(a), a.output.out.clone()),
        Command::DcCheck(a) => ("dc-check", v(a), a.output.out.clone()),
        Command::Field(a) => ("field", v(a), a.output.out.clone()),
        Command::Levelset(a) => ("levelset", v(a), a.output.out.clone()),
        Command::Scan(a) => ("scan", v(a), a.output.out.clone()),
        Command::Exoskeleton(a) => ("exoskeleton", v(a), a.output.out.clone()),
    }
}

fn emit(doc: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Failure::input(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("writing {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("writing stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.msg);
        return ExitCode::from(f.code);
    }
    let (name, params, out) = describe(&cli.command);
    let mut doc = json!({
        "tool": "convexgeo",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "params": params,
    });
    let code = match commands::run(&cli.command) {
        Ok(o) => {
            doc["pass"] = Value::Bool(o.pass);
            doc["result"] = o.result;
            if let Some((path, svg)) = o.svg {
                if let Err(e) = std::fs::write(&path, svg) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            }
            if o.pass { 0 } else { EXIT_CHECK }
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            doc["pass"] = Value::Bool(false);
            doc["error"] = json!({ "code": f.code, "message": f.msg });
            f.code
        }
    };
    if let Err(f) = emit(&doc, out.as_ref()) {
        eprintln!("error: {}", f.msg);
        return ExitCode::from(f.code);
    }
    ExitCode::from(code)
}
