mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ggm_core::model::{Caps, ModelKind, ModelSpec};
use ggm_core::verify::{compare_models, dump_chains, run_all, Format, Options};
use ggm_core::{Error, Result, Q};

#[derive(Parser, Debug)]
#[command(name = "ggm", version, about = "Exact verification of Getzler–Gauss–Manin connections for LG models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check on one model.
    Verify(Common),
    /// Run both models and compare their connection matrices.
    Compare(Common),
    /// Print the basis representatives as chain text.
    DumpChains(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// aorb or d.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<u16>,
    /// Order in the deformation parameters.
    #[arg(long = "def-order")]
    def_order: Option<u32>,
    /// Largest |u|-exponent kept.
    #[arg(long = "u-window")]
    u_window: Option<i32>,
    #[arg(long = "tensor-cap")]
    tensor_cap: Option<usize>,
    #[arg(long = "weight-cap")]
    weight_cap: Option<u32>,
    /// `default` resets all caps before the individual cap flags apply.
    #[arg(long)]
    caps: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or md.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// A key = value file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip the rerun with a larger u-window and tensor cap.
    #[arg(long)]
    no_stabilize: bool,
    /// Record per-stage timings in the report.
    #[arg(long)]
    timings: bool,
}

struct Settings {
    spec: ModelSpec,
    out: Option<PathBuf>,
    format: Format,
    options: Options,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("invalid value `{}` for {}", value, key)))
}

fn resolve(c: &Common) -> Result<Settings> {
    let mut values: BTreeMap<String, String> = match &c.config {
        Some(path) => config::load(path)?,
        None => BTreeMap::new(),
    };
    if let Some(caps) = &c.caps {
        if caps != "default" {
            return Err(Error::Parse(format!("unknown caps preset `{}`", caps)));
        }
        for key in ["def-order", "u-window", "tensor-cap", "weight-cap"] {
            values.remove(key);
        }
    }
    let flags: [(&str, Option<String>); 9] = [
        ("model", c.model.clone()),
        ("n", c.n.map(|v| v.to_string())),
        ("def-order", c.def_order.map(|v| v.to_string())),
        ("u-window", c.u_window.map(|v| v.to_string())),
        ("tensor-cap", c.tensor_cap.map(|v| v.to_string())),
        ("weight-cap", c.weight_cap.map(|v| v.to_string())),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
        ("format", c.format.clone()),
        ("seed", c.seed.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            values.insert(key.into(), v);
        }
    }
    let get = |key: &str| values.get(key).map(String::as_str);
    let kind: ModelKind = get("model").unwrap_or("aorb").parse()?;
    let n: u16 = get("n").map_or(Ok(2), |v| parse_value("n", v))?;
    let mut caps = Caps::default();
    if let Some(v) = get("def-order") {
        caps.k_max = parse_value("def-order", v)?;
    }
    if let Some(v) = get("u-window") {
        caps.u_max = parse_value("u-window", v)?;
    }
    if let Some(v) = get("tensor-cap") {
        caps.tensor_cap = parse_value("tensor-cap", v)?;
    }
    if let Some(v) = get("weight-cap") {
        caps.weight_cap = parse_value("weight-cap", v)?;
    }
    let seed = get("seed").map_or(Ok(0), |v| parse_value("seed", v))?;
    let format = get("format").unwrap_or("json").parse()?;
    let spec = ModelSpec { kind, n, caps, seed };
    spec.validate()?;
    let options = Options { stabilize: !c.no_stabilize, timings: c.timings, ..Options::default() };
    Ok(Settings { spec, out: get("out").map(PathBuf::from), format, options })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {}", path.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify(c) => {
            let s = resolve(&c)?;
            let report = run_all::<Q>(s.spec, &s.options)?;
            emit(&report.render(s.format), &s.out)?;
            Ok(report.exit_code())
        }
        Command::Compare(c) => {
            let s = resolve(&c)?;
            let report = compare_models::<Q>(s.spec.n, s.spec.caps, s.spec.seed, &s.options)?;
            emit(&report.render(s.format), &s.out)?;
            Ok(report.exit_code())
        }
        Command::DumpChains(c) => {
            let s = resolve(&c)?;
            emit(&dump_chains::<Q>(s.spec)?, &s.out)?;
            Ok(0)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Parse(_) | Error::Io(_) => 4,
        Error::Stabilization(_) | Error::SeriesDiverged(_) | Error::UWindowOverflow { .. } | Error::CapMismatch(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
