//! Command-line front end.
//!
//! Exit status is 0 on success, 2 on invalid input (with a JSON diagnostic on
//! stderr) and 1 when an internal consistency check fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::atlas::LegendrianAtlas;
use crate::farey::{product, Slope};
use crate::invariants::CableParams;
use crate::llc::{required_block, tb_upper_bound, yasui_width_bound, LlcError};
use crate::negcable::{classify, ToriAtlas};
use crate::paths::{enumerate_solid_torus, enumerate_thickened, shortest_path, tail};
use crate::poscable::{expand, transverse_intervals, width_gate};
use crate::render::{render_mountain_range, LabelMode, RenderFormat, RenderSpec};

#[derive(Debug, Parser)]
#[command(
    name = "cabling",
    version,
    about = "Legendrian cables, Farey paths and mountain ranges"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Farey graph arithmetic.
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Tight contact structures on thickened tori and solid tori.
    #[command(subcommand)]
    Tci(TciCmd),
    /// Classify cables of a knot.
    #[command(subcommand)]
    Cable(CableCmd),
    /// Legendrian large cables.
    #[command(subcommand)]
    Llc(LlcCmd),
    /// Draw the mountain range of an atlas.
    Render(RenderArgs),
}

#[derive(Debug, Subcommand)]
enum FareyCmd {
    /// Shortest clockwise path from the floor of a slope, with its tail.
    Path {
        #[arg(allow_hyphen_values = true)]
        slope: Slope,
    },
    /// The Farey product `a · b`.
    Product {
        #[arg(allow_hyphen_values = true)]
        a: Slope,
        #[arg(allow_hyphen_values = true)]
        b: Slope,
    },
    /// Tail length, step and continuation of a slope.
    Tail {
        #[arg(allow_hyphen_values = true)]
        slope: Slope,
    },
}

#[derive(Debug, Args)]
struct TciRange {
    /// Inner slope; `inf` for a solid torus.
    #[arg(long, allow_hyphen_values = true)]
    from: Slope,
    /// Outer slope.
    #[arg(long, allow_hyphen_values = true)]
    to: Slope,
}

#[derive(Debug, Subcommand)]
enum TciCmd {
    /// List canonical decorated paths.
    Enumerate(TciRange),
    /// Count tight structures.
    Count(TciRange),
}

#[derive(Debug, Args)]
struct CableArgs {
    #[arg(short, allow_hyphen_values = true)]
    p: i64,
    #[arg(short, allow_hyphen_values = true)]
    q: i64,
}

#[derive(Debug, Args)]
struct RenderOpts {
    /// Draw the cable mountain range instead of printing JSON.
    #[arg(long, value_enum)]
    render: Option<RenderFormat>,
    /// Lowest tb to draw.
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<i64>,
    #[arg(long, value_enum, default_value_t = LabelMode::Counts)]
    labels: LabelMode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum CableCmd {
    /// Cables with slope above the contact width.
    Positive {
        #[arg(long)]
        atlas: PathBuf,
        #[command(flatten)]
        cable: CableArgs,
        /// Include transverse intervals.
        #[arg(long)]
        transverse: bool,
        #[command(flatten)]
        render: RenderOpts,
    },
    /// Cables with slope below the contact width, from declared tori.
    Negative {
        #[arg(long)]
        tori: PathBuf,
        /// Print the classification report in this format.
        #[arg(long, value_enum)]
        report: Option<ReportFormat>,
        #[command(flatten)]
        render: RenderOpts,
    },
    /// Upper bound on tb of cables.
    TbBound {
        #[arg(long)]
        atlas: PathBuf,
        #[command(flatten)]
        cable: CableArgs,
    },
}

#[derive(Debug, Subcommand)]
enum LlcCmd {
    /// Block size needed for a cable with the given tb.
    Check {
        #[command(flatten)]
        cable: CableArgs,
        #[arg(long, allow_hyphen_values = true)]
        tb: i64,
    },
    /// Upper bound on tb of cables.
    Bound {
        #[arg(long)]
        atlas: PathBuf,
        #[command(flatten)]
        cable: CableArgs,
    },
    /// Width lower bound for the twist knots with m <= -5.
    Yasui {
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    atlas: PathBuf,
    #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
    format: RenderFormat,
    /// Lowest tb to draw; defaults to three below the top.
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<i64>,
    #[arg(long, value_enum, default_value_t = LabelMode::Counts)]
    labels: LabelMode,
}

/// A failure reported to the user.
#[derive(Debug)]
enum Failure {
    Invalid { kind: &'static str, message: String },
    Internal(String),
}

impl Failure {
    fn invalid(kind: &'static str, e: impl std::fmt::Display) -> Failure {
        Failure::Invalid {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid("io", format!("{}: {e}", path.display())))
}

fn load_atlas(path: &Path) -> CliResult<LegendrianAtlas> {
    LegendrianAtlas::from_json(&read_file(path)?).map_err(|e| Failure::invalid("atlas", e))
}

fn params(c: &CableArgs) -> CliResult<CableParams> {
    CableParams::new(c.p, c.q).map_err(|e| Failure::invalid("cable", e))
}

fn compact(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("output serializes") + "\n"
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn big_json(v: &num_bigint::BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn farey(cmd: FareyCmd) -> CliResult<String> {
    let path_err = |e| Failure::invalid("farey", e);
    match cmd {
        FareyCmd::Path { slope } => {
            let path = shortest_path(&slope).map_err(path_err)?;
            let (k, continuation) = match tail(&slope) {
                Ok(t) => (t.k, t.continuation),
                Err(_) => (0, Vec::new()),
            };
            Ok(compact(&json!({
                "path": path.vertices(),
                "tail": k,
                "continuation": continuation,
            })))
        }
        FareyCmd::Product { a, b } => Ok(compact(&big_json(&product(&a, &b)))),
        FareyCmd::Tail { slope } => {
            let t = tail(&slope).map_err(path_err)?;
            Ok(compact(&json!({
                "k": t.k,
                "step": t.step,
                "continuation": t.continuation,
            })))
        }
    }
}

fn tci(cmd: TciCmd) -> CliResult<String> {
    let list = |r: &TciRange| {
        if r.from.is_infinite() {
            enumerate_solid_torus(&r.to)
        } else {
            enumerate_thickened(&r.from, &r.to)
        }
        .map_err(|e| Failure::invalid("tci", e))
    };
    match cmd {
        TciCmd::Enumerate(r) => Ok(pretty(&list(&r)?)),
        TciCmd::Count(r) => Ok(compact(&list(&r)?.len())),
    }
}

fn draw(
    atlas: &LegendrianAtlas,
    opts: &RenderOpts,
    format: RenderFormat,
    default_floor: i64,
) -> CliResult<String> {
    let floor = opts.floor.unwrap_or(default_floor);
    let range = atlas
        .mountain_range(floor)
        .map_err(|e| Failure::invalid("render", e))?;
    render_mountain_range(
        &range,
        RenderSpec {
            format,
            tb_floor: floor,
            label_mode: opts.labels,
        },
    )
    .map_err(|e| Failure::invalid("render", e))
}

/// Atlas JSON with extra top-level keys; the atlas loader ignores them.
fn annotated(atlas: &LegendrianAtlas, extra: Vec<(&str, Value)>) -> Value {
    let mut doc = serde_json::to_value(atlas).expect("atlas serializes");
    let obj = doc.as_object_mut().expect("atlas is an object");
    for (k, v) in extra {
        obj.insert(k.to_string(), v);
    }
    doc
}

fn tb_bound(path: &Path, cable: &CableArgs) -> CliResult<String> {
    let atlas = load_atlas(path)?;
    let params = params(cable)?;
    let gate = width_gate(&atlas);
    let bound = tb_upper_bound(params, gate.bound, atlas.max_tb())
        .map_err(|e| Failure::invalid("llc", e))?;
    let branch = if params.q() <= params.p() * gate.bound {
        "tail"
    } else {
        "max_tb"
    };
    Ok(compact(&json!({
        "bound": bound,
        "branch": branch,
        "width": gate,
    })))
}

fn cable(cmd: CableCmd) -> CliResult<String> {
    match cmd {
        CableCmd::Positive {
            atlas,
            cable,
            transverse,
            render,
        } => {
            let base = load_atlas(&atlas)?;
            let params = params(&cable)?;
            let e = expand(&base, params).map_err(|e| Failure::invalid("cable", e))?;
            if let Some(format) = render.render {
                return draw(&e.atlas, &render, format, e.atlas.max_tb() - 2 * params.p());
            }
            let mut extra = vec![
                ("gate", json!(e.gate)),
                ("legendrian_simple", json!(e.atlas.is_legendrian_simple())),
                (
                    "transversely_simple",
                    json!(e.atlas.is_transversely_simple()),
                ),
            ];
            if transverse {
                let floor = render.floor.unwrap_or(base.max_tb() - 4);
                let intervals = transverse_intervals(&base, params, floor)
                    .map_err(|e| Failure::invalid("cable", e))?;
                extra.push(("transverse_intervals", json!(intervals)));
            }
            Ok(pretty(&annotated(&e.atlas, extra)))
        }
        CableCmd::Negative {
            tori,
            report,
            render,
        } => {
            let ta = ToriAtlas::from_json(&read_file(&tori)?)
                .map_err(|e| Failure::invalid("tori", e))?;
            let c = classify(&ta).map_err(|e| Failure::invalid("tori", e))?;
            if let Some(format) = render.render {
                return draw(&c.atlas, &render, format, c.atlas.max_tb() - 3);
            }
            match report {
                Some(ReportFormat::Text) => Ok(c.report.to_text()),
                Some(ReportFormat::Json) => Ok(pretty(&c.report)),
                None => Ok(pretty(&annotated(
                    &c.atlas,
                    vec![
                        ("report", json!(c.report)),
                        ("legendrian_simple", json!(c.atlas.is_legendrian_simple())),
                        (
                            "transversely_simple",
                            json!(c.atlas.is_transversely_simple()),
                        ),
                    ],
                ))),
            }
        }
        CableCmd::TbBound { atlas, cable } => tb_bound(&atlas, &cable),
    }
}

fn llc(cmd: LlcCmd) -> CliResult<String> {
    match cmd {
        LlcCmd::Check { cable, tb } => {
            let params = params(&cable)?;
            let m = required_block(tb, params);
            Ok(compact(&json!({
                "tb": tb,
                "pq": params.pq(),
                "large": m.is_some(),
                "m": m,
                "block_length": m.map(|m| 2 * m),
                "center": params.slope(),
            })))
        }
        LlcCmd::Bound { atlas, cable } => tb_bound(&atlas, &cable),
        LlcCmd::Yasui { m } => match yasui_width_bound(m) {
            Ok(b) => Ok(compact(&b)),
            Err(e @ LlcError::YasuiRange(_)) => Err(Failure::invalid("llc", e)),
            Err(e) => Err(Failure::Internal(e.to_string())),
        },
    }
}

fn render(args: RenderArgs) -> CliResult<String> {
    let atlas = load_atlas(&args.atlas)?;
    let opts = RenderOpts {
        render: Some(args.format),
        floor: args.floor,
        labels: args.labels,
    };
    draw(&atlas, &opts, args.format, atlas.max_tb() - 3)
}

fn dispatch(command: Command) -> CliResult<String> {
    match command {
        Command::Farey(c) => farey(c),
        Command::Tci(c) => tci(c),
        Command::Cable(c) => cable(c),
        Command::Llc(c) => llc(c),
        Command::Render(a) => render(a),
    }
}

/// Runs the tool on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = dispatch(cli.command).and_then(|text| {
        match &cli.output {
            Some(path) => std::fs::write(path, text.as_bytes()),
            None => stdout.write_all(text.as_bytes()),
        }
        .map_err(|e| Failure::Internal(format!("writing output: {e}")))
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Invalid { kind, message }) => {
            let _ =
                stderr.write_all(compact(&json!({ "error": kind, "message": message })).as_bytes());
            2
        }
        Err(Failure::Internal(message)) => {
            let _ = stderr
                .write_all(compact(&json!({ "error": "internal", "message": message })).as_bytes());
            1
        }
    }
}
