//! Command-line front end. `run` is the whole program minus process I/O so
//! tests can drive it in-process.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::braille;
use crate::sgln::{self, CodecConfig, CodecError, DirectionCode, TagFields, TagWord};
use crate::sim::{self, PowerState, SimConfig, WalkScript};
use crate::street_map::file::MapFile;
use crate::street_map::ConditionRegistry;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rfid-cane", version, about = "Road tag codec, planner, walk simulator and Braille renderer")]
struct Cli {
    /// JSON file with header/filter/partition, tick_s, draw, queue_capacity, capacity, low_threshold
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pack tag fields into a 24-digit hex word
    Encode(EncodeArgs),
    /// Unpack a hex word into JSON fields
    Decode {
        hex: String,
        /// Reject words whose header differs from the configured one
        #[arg(long)]
        strict: bool,
    },
    /// Lay out tags for every road of a map (`-` or no path reads stdin)
    Plan { map: Option<PathBuf> },
    /// List invariant violations of a planned map
    Validate { map: Option<PathBuf> },
    /// Simulate a walk and print the JSON Lines trace
    Walk(WalkArgs),
    /// Render up to two lines of text as a Unicode Braille frame
    BrailleRender { line1: String, line2: Option<String> },
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Read the fields as a JSON object from stdin instead
    #[arg(long)]
    json: bool,
    #[arg(long, required_unless_present = "json")]
    company_code: Option<u32>,
    #[arg(long, required_unless_present = "json")]
    tag_direction: Option<DirectionCode>,
    #[arg(long, required_unless_present = "json")]
    main_road: Option<u8>,
    #[arg(long, required_unless_present = "json")]
    sub_road: Option<u8>,
    #[arg(long, required_unless_present = "json")]
    path: Option<u8>,
    #[arg(long, required_unless_present = "json")]
    building_number: Option<u16>,
    #[arg(long, required_unless_present = "json")]
    feature_direction: Option<DirectionCode>,
    /// Condition code or name (ENTRANCE, CROSSWALK, ...)
    #[arg(long, required_unless_present = "json")]
    road_condition: Option<String>,
    #[arg(long, required_unless_present = "json")]
    serial: Option<u32>,
    #[arg(long)]
    header: Option<u8>,
    #[arg(long)]
    filter: Option<u8>,
    #[arg(long)]
    partition: Option<u8>,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    script: PathBuf,
    /// Battery capacity in charge units
    #[arg(long)]
    capacity: Option<u32>,
    /// Charge at or below which supply moves to the solar cell
    #[arg(long)]
    threshold: Option<u32>,
    /// Also print every displayed frame as Unicode Braille
    #[arg(long)]
    braille: bool,
}

/// Contents of the `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CliConfig {
    #[serde(flatten)]
    pub codec: CodecConfig,
    #[serde(flatten)]
    pub sim: SimConfig,
    #[serde(default)]
    pub capacity: Option<u32>,
    #[serde(default)]
    pub low_threshold: Option<u32>,
}

/// Error class decides the exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn status(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

type Outcome = Result<(), Failure>;

/// Runs one command. Payload goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return status;
        }
    };
    match execute(cli, stdin, stdout) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message());
            failure.status()
        }
    }
}

fn execute(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Outcome {
    let config = match &cli.config {
        Some(path) => parse_json::<CliConfig>(&read_path(path)?, path)?,
        None => CliConfig::default(),
    };
    match cli.command {
        Command::Encode(args) => encode(args, &config, stdin, stdout),
        Command::Decode { hex, strict } => decode(&hex, strict, &config, stdout),
        Command::Plan { map } => plan(map.as_deref(), &config, stdin, stdout),
        Command::Validate { map } => validate(map.as_deref(), stdin, stdout),
        Command::Walk(args) => walk(args, &config, stdout),
        Command::BrailleRender { line1, line2 } => {
            let frame = braille::render_text(&line1, line2.as_deref().unwrap_or(""));
            emit(stdout, &braille::frame_to_unicode(&frame))
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    writeln!(out, "{text}").map_err(usage)
}

fn read_path(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_input(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => read_path(p),
        _ => {
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(usage)?;
            Ok(text)
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &Path) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| usage(format!("{}: {e}", origin.display())))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn encode(args: EncodeArgs, config: &CliConfig, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Outcome {
    let mut fields = if args.json {
        let text = read_input(None, stdin)?;
        let mut fields: TagFields = parse_json(&text, Path::new("<stdin>"))?;
        // JSON without constants picks them up from the config
        let value: serde_json::Value = serde_json::from_str(&text).map_err(usage)?;
        if value.get("header").is_none() {
            fields.header = config.codec.header;
        }
        if value.get("filter").is_none() {
            fields.filter = config.codec.filter;
        }
        if value.get("partition").is_none() {
            fields.partition = config.codec.partition;
        }
        fields
    } else {
        let missing = |name: &str| usage(format!("missing --{name}"));
        let condition = args.road_condition.as_deref().ok_or_else(|| missing("road-condition"))?;
        TagFields {
            company_code: args.company_code.ok_or_else(|| missing("company-code"))?,
            tag_direction: args.tag_direction.ok_or_else(|| missing("tag-direction"))?,
            main_road: args.main_road.ok_or_else(|| missing("main-road"))?,
            sub_road: args.sub_road.ok_or_else(|| missing("sub-road"))?,
            path: args.path.ok_or_else(|| missing("path"))?,
            building_number: args.building_number.ok_or_else(|| missing("building-number"))?,
            feature_direction: args.feature_direction.ok_or_else(|| missing("feature-direction"))?,
            road_condition: parse_condition(condition)?,
            serial: args.serial.ok_or_else(|| missing("serial"))?,
            ..config.codec.blank_fields()
        }
    };
    if let Some(h) = args.header {
        fields.header = h;
    }
    if let Some(f) = args.filter {
        fields.filter = f;
    }
    if let Some(p) = args.partition {
        fields.partition = p;
    }
    let word = sgln::encode(&fields).map_err(domain)?;
    emit(stdout, &word.to_hex())
}

/// Numeric codes may exceed the field width; that is reported by the encoder.
fn parse_condition(text: &str) -> Result<u8, Failure> {
    if let Ok(code) = text.trim().parse::<u8>() {
        return Ok(code);
    }
    ConditionRegistry::default()
        .code(text)
        .map(|c| c.0)
        .ok_or_else(|| usage(format!("unknown road condition {text:?}")))
}

fn decode(hex: &str, strict: bool, config: &CliConfig, stdout: &mut dyn Write) -> Outcome {
    let word = TagWord::from_hex(hex.trim()).map_err(usage)?;
    let check = if strict {
        sgln::HeaderCheck::Strict(config.codec.header)
    } else {
        config.codec.header_check()
    };
    match sgln::decode_with(word, check) {
        Ok(fields) => emit(stdout, &to_pretty(&fields)),
        Err(e @ (CodecError::BadExtensionBit | CodecError::BadHeader { .. })) => Err(domain(e)),
        Err(e) => Err(usage(e)),
    }
}

fn plan(path: Option<&Path>, config: &CliConfig, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Outcome {
    let text = read_input(path, stdin)?;
    let file: MapFile = parse_json(&text, path.unwrap_or(Path::new("<stdin>")))?;
    let map = file.plan(&config.codec).map_err(domain)?;
    emit(stdout, &to_pretty(&map.to_file()))
}

fn validate(path: Option<&Path>, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Outcome {
    let text = read_input(path, stdin)?;
    let file: MapFile = parse_json(&text, path.unwrap_or(Path::new("<stdin>")))?;
    let map = file.load().map_err(domain)?;
    let violations = map.validate();
    emit(stdout, &to_pretty(&violations))?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(domain(format!("{} violation(s)", violations.len())))
    }
}

fn walk(args: WalkArgs, config: &CliConfig, stdout: &mut dyn Write) -> Outcome {
    let file: MapFile = parse_json(&read_path(&args.map)?, &args.map)?;
    let script: WalkScript = parse_json(&read_path(&args.script)?, &args.script)?;
    let map = file.plan(&config.codec).map_err(domain)?;

    let defaults = PowerState::default();
    let capacity = args.capacity.or(config.capacity).unwrap_or(defaults.capacity);
    let threshold = args.threshold.or(config.low_threshold).unwrap_or(defaults.low_threshold);
    let power = PowerState::new(capacity, threshold);

    let events = sim::simulate(&map, &script, power, &config.sim).map_err(domain)?;
    let mut out = String::new();
    for e in &events {
        out.push_str(&sim::to_jsonl(std::slice::from_ref(e)));
        if let (true, sim::Event::Frame { lines }) = (args.braille, &e.event) {
            for line in lines {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    stdout.write_all(out.as_bytes()).map_err(usage)
}
