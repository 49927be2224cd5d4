use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use levy_core::dragon::{self, Limits, RenderStyle};
use levy_core::spectral::{self, SpectralConfig};
use levy_core::typedyn::{self, TypeCensus};
use levy_core::{verify, Error};

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_STRUCTURE: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "levy", version, about = "Boundary dimension of the Lévy dragon")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Iteration depth (census, verify, render) or matrix power for the bounds (spectral, dimension).
    #[arg(long, global = true)]
    depth: Option<u32>,

    /// Power-method convergence tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Largest power tried when checking primitivity of the core block.
    #[arg(long, global = true)]
    max_power: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for the geometric census.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest depth accepted by geometric commands.
    #[arg(long, global = true, default_value_t = dragon::DEFAULT_MAX_DEPTH)]
    depth_limit: u32,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// SVG drawing of N_k with F^k(T0).
    Render {
        #[arg(long, value_enum, default_value_t = Style::ByClass)]
        style: Style,
    },
    /// Neighborhood-type census of N_k.
    Census {
        /// Count types geometrically instead of by symbolic evolution.
        #[arg(long)]
        geometric: bool,
    },
    /// The stable type set with class annotations.
    StableSet,
    /// The transition matrix over the stable types.
    Matrix,
    /// Full spectral report for the core block.
    Spectral,
    /// Perron root and boundary dimension.
    Dimension,
    /// Cross-check geometry against the symbolic engine.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
    Svg,
    Triplets,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Plain,
    ByClass,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            error: anyhow::anyhow!(msg.into()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ResourceLimit { .. } => EXIT_RESOURCE,
            Error::InvalidArgument(_) | Error::LevelMismatch { .. } => EXIT_INVALID,
            Error::Io(_) | Error::Json(_) => EXIT_IO,
            _ => EXIT_STRUCTURE,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_IO,
            error,
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::invalid(e.to_string()))?;
    }
    if let Some(t) = cli.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::invalid(format!("--tolerance must be positive, got {t}")));
        }
    }
    let limits = Limits {
        max_depth: cli.depth_limit,
    };
    match cli.command {
        Command::Render { style } => render(cli, style, &limits),
        Command::Census { geometric } => census(cli, geometric, &limits),
        Command::StableSet => stable_set(cli),
        Command::Matrix => matrix(cli),
        Command::Spectral => spectral_cmd(cli, false),
        Command::Dimension => spectral_cmd(cli, true),
        Command::Verify => verify_cmd(cli, &limits),
    }
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::invalid(format!(
            "format {f:?} is not available for this command (use one of {allowed:?})"
        )))
    }
}

fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn render(cli: &Cli, style: Style, limits: &Limits) -> Outcome {
    format_or(cli, Format::Svg, &[Format::Svg])?;
    let style = match style {
        Style::Plain => RenderStyle::Plain,
        Style::ByClass => RenderStyle::ByClass,
    };
    let svg = dragon::render(cli.depth.unwrap_or(5), style, limits)?;
    emit(cli.out.as_deref(), &svg)?;
    Ok(0)
}

fn census(cli: &Cli, geometric: bool, limits: &Limits) -> Outcome {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Text])?;
    let depth = cli.depth.unwrap_or(14);
    let census = if geometric {
        dragon::type_census(depth, limits)?
    } else {
        typedyn::evolve(&TypeCensus::seed(), depth as usize)
    };
    let content = match format {
        Format::Text => census
            .iter()
            .map(|(c, n)| format!("{c} {n}\n"))
            .collect::<String>(),
        _ => to_json(&json!({
            "command": "census",
            "depth": depth,
            "method": if geometric { "geometric" } else { "symbolic" },
            "types": census.len(),
            "total": census.total_mass().to_string(),
            "boundary": typedyn::boundary_count(&census).to_string(),
            "covered": census.get(levy_core::TypeCode::COVERED).to_string(),
            "counts": census.to_json(),
            "provenance": {
                "counts": "V(k): number of triangles of N_k of each neighborhood type",
                "total": "15 * 2^k triangles in N_k",
                "boundary": "|B_k| = V(k) . J, occupied triangles that are not covered",
                "covered": "triangles of type 32767",
            },
        })),
    };
    emit(cli.out.as_deref(), &content)?;
    Ok(0)
}

fn stable_set(cli: &Cli) -> Outcome {
    let format = format_or(cli, Format::Text, &[Format::Json, Format::Text])?;
    let stable = typedyn::stable_set()?;
    let classes = typedyn::classify(&stable)?;
    let content = match format {
        Format::Json => {
            let codes = |v: &[levy_core::TypeCode]| v.iter().map(|c| c.value()).collect::<Vec<_>>();
            to_json(&json!({
                "command": "stable-set",
                "stabilization_depth": stable.depth(),
                "size": stable.len(),
                "transient": codes(&classes.transient),
                "core": codes(&classes.core),
                "absorbing": codes(&classes.absorbing),
                "provenance": {
                    "stabilization_depth": "smallest k with S_k = S_(k+1)",
                    "size": "|S_inf|",
                    "transient": "S_t, types on permutation cycles",
                    "core": "S_e, the primitive block",
                    "absorbing": "S_a",
                },
            }))
        }
        _ => classes
            .canonical_order()
            .iter()
            .map(|&c| format!("{c} {}\n", classes.class_of(c).expect("code is classified")))
            .collect(),
    };
    emit(cli.out.as_deref(), &content)?;
    Ok(0)
}

fn matrix(cli: &Cli) -> Outcome {
    let format = format_or(cli, Format::Triplets, &[Format::Triplets, Format::Json])?;
    let (m, _) = spectral::core_pipeline()?;
    match format {
        Format::Json => emit(cli.out.as_deref(), &to_json(&m.metadata()))?,
        _ => {
            emit(cli.out.as_deref(), &m.to_triplets())?;
            if let Some(path) = &cli.out {
                let meta = path.with_extension("meta.json");
                emit(Some(&meta), &to_json(&m.metadata()))?;
            }
        }
    }
    Ok(0)
}

fn spectral_cmd(cli: &Cli, dimension_only: bool) -> Outcome {
    let default = if dimension_only { Format::Text } else { Format::Json };
    let format = format_or(cli, default, &[Format::Json, Format::Text])?;
    let defaults = SpectralConfig::default();
    let config = SpectralConfig {
        tolerance: cli.tolerance.unwrap_or(defaults.tolerance),
        bounds_power: cli.depth.unwrap_or(defaults.bounds_power),
        max_power: cli.max_power.unwrap_or(defaults.max_power),
        ..defaults
    };
    if config.bounds_power == 0 {
        return Err(Failure::invalid("--depth must be at least 1 for the row-sum bounds"));
    }
    let report = spectral::spectral_report(&config)?;
    let content = match format {
        Format::Text => {
            let mut s = format!(
                "lambda={}\ndimension={}\nlower_bound={}\nupper_bound={}\nbounds_power={}\n",
                report.lambda_estimate,
                report.dimension_estimate,
                report.lower_bound,
                report.upper_bound,
                report.bounds.power,
            );
            if !dimension_only {
                s.push_str(&format!(
                    "min_row_sum={}\nmax_row_sum={}\nprimitivity_exponent={}\niterations={}\nlambda_exceeds_sqrt2={}\n",
                    report.bounds.min_row_sum,
                    report.bounds.max_row_sum,
                    report.primitivity_exponent,
                    report.iterations_used,
                    report.lambda_exceeds_sqrt2,
                ));
            }
            s
        }
        _ => {
            let mut value = serde_json::to_value(&report).map_err(Error::from)?;
            value["command"] = json!(if dimension_only { "dimension" } else { "spectral" });
            value["provenance"] = json!({
                "lambda_estimate": "Perron root of the core block C, power iteration",
                "dimension_estimate": "ln(lambda) / ln(sqrt 2)",
                "bounds.min_row_sum": "u_k, minimum row sum of C^k",
                "bounds.max_row_sum": "U_k, maximum row sum of C^k",
                "lower_bound": "certified decimal l with l^k <= u_k",
                "upper_bound": "certified decimal h with h^k >= U_k",
                "primitivity_exponent": "smallest m with C^m entrywise positive",
                "absorbing_diagonal": "diagonal of the absorbing block (types 0 and 32767 each yield two children of their own type)",
            });
            to_json(&value)
        }
    };
    emit(cli.out.as_deref(), &content)?;
    Ok(0)
}

fn verify_cmd(cli: &Cli, limits: &Limits) -> Outcome {
    let format = format_or(cli, Format::Text, &[Format::Json, Format::Text])?;
    let report = verify::verify(cli.depth.unwrap_or(14), limits)?;
    let content = match format {
        Format::Json => to_json(&serde_json::to_value(&report).map_err(Error::from)?),
        _ => report.to_text(),
    };
    emit(cli.out.as_deref(), &content)?;
    if report.passed() {
        Ok(0)
    } else {
        if let Some(d) = &report.first_divergence {
            eprintln!("first divergent census entry: {d}");
        }
        Ok(EXIT_MISMATCH)
    }
}
