//! Command-line front end. Every command is a thin wrapper over the library
//! and returns its output text together with the process exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::braidword::{check_homogenization, homogenize, random_word, twist_bound, BraidWord};
use crate::curves::{library, satellite, ParamBraid};
use crate::error::{Error, Result};
use crate::fibercheck::{check, companion_power_bound, search_eps, word_twist_plan, CheckOptions, FibrationReport};
use crate::polyloop::{track, TrackOptions};
use crate::wordextract::{extract, ExtractOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PFIBER_THREADS";

#[derive(Parser, Debug)]
#[command(name = "pfiber", version, about = "Fibration checks for braids given as loops of polynomials")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Uniform samples per loop.
    #[arg(long, global = true, default_value_t = 4096)]
    pub grid: usize,
    /// Smallest accepted |dφ/dt|.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub margin: f64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for commands that draw random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test a braid for the fibration property. BRAID is a JSON file or a library name.
    Check { braid: String },
    /// Build a satellite from a JSON spec, extract its word and check it.
    Satellite { spec: PathBuf },
    /// Thread a word into an alternating, homogeneous word on twice the strands.
    Homogenize {
        #[arg(allow_hyphen_values = true)]
        word: String,
        strands: usize,
    },
    /// Full twists that make a word's closure fibered: "k1 k2".
    Twistbound {
        #[arg(allow_hyphen_values = true)]
        word: String,
        strands: usize,
    },
    /// Schedule of critical-value motion for a word and the twist count it implies.
    Twistplan {
        #[arg(allow_hyphen_values = true)]
        word: String,
        strands: usize,
        /// Total time spent on positive letters.
        #[arg(long, default_value_t = 0.1)]
        positive_time: f64,
    },
    /// Print a built-in braid as JSON.
    Library { name: String },
    /// Critical point and value tracks as CSV.
    Tracks { braid: String },
    /// Read off the braid word of a parametrized braid.
    Extract { braid: String },
    /// Run the homogenization checks on seeded random words.
    HomogenizeSuite {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_strands: usize,
        #[arg(long, default_value_t = 12)]
        max_length: usize,
    },
}

/// Text to emit and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, code: EXIT_PASS }
    }

    fn verdict(output: String, pass: bool) -> Self {
        Self { output, code: if pass { EXIT_PASS } else { EXIT_FAIL } }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 64 {
            return Err(Error::Config(format!("--grid must be at least 64, got {}", self.grid)));
        }
        if self.margin.is_nan() || self.margin <= 0.0 {
            return Err(Error::Config(format!("--margin must be positive, got {}", self.margin)));
        }
        Ok(())
    }

    fn check_options(&self) -> CheckOptions {
        CheckOptions { grid: self.grid, margin: self.margin }
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::Config(format!("format {f:?} is not available for this command")))
        }
    }
}

/// Runs one command. Errors are returned, not printed.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    cfg.validate()?;
    match &cli.command {
        Command::Check { braid } => cmd_check(&load_braid(braid)?, cfg),
        Command::Satellite { spec } => cmd_satellite(&std::fs::read_to_string(spec)?, spec.parent(), cfg),
        Command::Homogenize { word, strands } => cmd_homogenize(word, *strands, cfg),
        Command::Twistbound { word, strands } => cmd_twistbound(word, *strands, cfg),
        Command::Twistplan { word, strands, positive_time } => {
            let plan = word_twist_plan(&BraidWord::parse(word, *strands)?, *positive_time, None)?;
            Ok(Outcome::ok(serde_json::to_string_pretty(&plan)?))
        }
        Command::Library { name } => Ok(Outcome::ok(library(name)?.to_json())),
        Command::Tracks { braid } => cmd_tracks(&load_braid(braid)?, cfg),
        Command::Extract { braid } => cmd_extract(&load_braid(braid)?, cfg),
        Command::HomogenizeSuite { count, max_strands, max_length } => {
            cmd_homogenize_suite(cfg.seed, *count, *max_strands, *max_length)
        }
    }
}

/// A path to a braid JSON file, or else a library name.
pub fn load_braid(arg: &str) -> Result<ParamBraid> {
    let path = Path::new(arg);
    if path.is_file() {
        ParamBraid::from_json(&std::fs::read_to_string(path)?)
    } else {
        library(arg)
    }
}

pub fn cmd_check(b: &ParamBraid, cfg: &RunConfig) -> Result<Outcome> {
    let format = cfg.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let report = check(b, &cfg.check_options())?;
    let text = match format {
        Format::Text => report_text(&report),
        _ => report.to_json(),
    };
    Ok(Outcome::verdict(text, report.passed()))
}

fn report_text(r: &FibrationReport) -> String {
    let verdict = if r.passed() { "pass" } else { "fail" };
    let mut out = format!("{verdict} min|dphi/dt| = {:.9} winding = {:.6}\n", r.min_abs(), r.total_winding);
    for (p, b) in r.branches.iter().enumerate() {
        out.push_str(&format!(
            "branch {}: min {:.9} max {:.9} winding {:.6} sign changes {}\n",
            p + 1,
            b.min,
            b.max,
            b.winding,
            b.sign_changes.len()
        ));
    }
    out
}

fn braid_from_value(v: &Value, base: Option<&Path>) -> Result<ParamBraid> {
    match v {
        Value::String(name) => match base.map(|d| d.join(name)).filter(|p| p.is_file()) {
            Some(p) => ParamBraid::from_json(&std::fs::read_to_string(p)?),
            None => load_braid(name),
        },
        Value::Object(_) => Ok(serde_json::from_value(v.clone())?),
        _ => Err(Error::Config("a braid must be a library name, a file name or an object".into())),
    }
}

/// Spec: `{"pattern", "companions", "eps": number | "auto", "powers": [ints] | "auto"}`.
/// Braids are library names, file names relative to the spec, or inline objects.
pub fn cmd_satellite(spec: &str, base: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    cfg.format_or(Format::Json, &[Format::Json])?;
    let spec: Value = serde_json::from_str(spec)?;
    let field = |k: &str| spec.get(k).ok_or_else(|| Error::Config(format!("satellite spec lacks `{k}`")));
    let pattern = braid_from_value(field("pattern")?, base)?;
    let companions = field("companions")?
        .as_array()
        .ok_or_else(|| Error::Config("`companions` must be a list".into()))?
        .iter()
        .map(|v| braid_from_value(v, base))
        .collect::<Result<Vec<_>>>()?;
    let opts = cfg.check_options();

    let mut out = serde_json::Map::new();
    let powers: Vec<i64> = match field("powers")? {
        Value::String(s) if s == "auto" => {
            let bounds = companion_power_bound(&pattern, &companions, cfg.grid)?;
            out.insert("power_bounds".into(), serde_json::to_value(&bounds)?);
            bounds.iter().map(|b| b.power as i64).collect()
        }
        v => serde_json::from_value(v.clone())?,
    };
    out.insert("powers".into(), json!(powers));

    let eps = match field("eps")? {
        Value::String(s) if s == "auto" => {
            let search = search_eps(&pattern, &companions, &powers, &opts)?;
            out.insert("eps_search".into(), serde_json::to_value(&search.attempts)?);
            match search.eps {
                Some(eps) => eps,
                None => {
                    out.insert("verdict".into(), json!("fail"));
                    return Ok(Outcome::verdict(serde_json::to_string_pretty(&Value::Object(out))?, false));
                }
            }
        }
        v => v.as_f64().ok_or_else(|| Error::Config("`eps` must be a number or \"auto\"".into()))?,
    };
    let sat = satellite(&pattern, &companions, eps, &powers)?;
    let report = check(&sat, &opts)?;
    out.insert("eps".into(), json!(eps));
    match extract(&sat, &ExtractOptions { grid: cfg.grid, ..Default::default() }) {
        Ok(e) => out.insert("word".into(), json!(e.word.to_string())),
        Err(e) => out.insert("word_error".into(), json!(e.to_string())),
    };
    out.insert("verdict".into(), serde_json::to_value(report.verdict)?);
    out.insert("report".into(), serde_json::to_value(&report)?);
    out.insert("braid".into(), serde_json::to_value(&sat)?);
    Ok(Outcome::verdict(serde_json::to_string_pretty(&Value::Object(out))?, report.passed()))
}

pub fn cmd_homogenize(word: &str, n: usize, cfg: &RunConfig) -> Result<Outcome> {
    let w = BraidWord::parse(word, n)?;
    let h = homogenize(&w);
    Ok(Outcome::ok(match cfg.format_or(Format::Text, &[Format::Text, Format::Json])? {
        Format::Json => serde_json::to_string_pretty(&json!({"strands": h.strands(), "word": h.to_string()}))?,
        _ => h.to_string(),
    }))
}

pub fn cmd_twistbound(word: &str, n: usize, cfg: &RunConfig) -> Result<Outcome> {
    let (k1, k2) = twist_bound(&BraidWord::parse(word, n)?);
    Ok(Outcome::ok(match cfg.format_or(Format::Text, &[Format::Text, Format::Json])? {
        Format::Json => serde_json::to_string_pretty(&json!({"positive_twists": k1, "negative_twists": k2}))?,
        _ => format!("{k1} {k2}"),
    }))
}

pub fn cmd_tracks(b: &ParamBraid, cfg: &RunConfig) -> Result<Outcome> {
    cfg.format_or(Format::Csv, &[Format::Csv])?;
    let tracks = track(b, &TrackOptions { grid: cfg.grid, ..TrackOptions::default() })?;
    Ok(Outcome::ok(tracks.to_csv()))
}

pub fn cmd_extract(b: &ParamBraid, cfg: &RunConfig) -> Result<Outcome> {
    let e = extract(b, &ExtractOptions { grid: cfg.grid, ..Default::default() })?;
    Ok(Outcome::ok(match cfg.format_or(Format::Text, &[Format::Text, Format::Json, Format::Csv])? {
        Format::Csv => e.events_csv(),
        Format::Json => serde_json::to_string_pretty(&json!({
            "strands": e.word.strands(),
            "word": e.word.to_string(),
            "writhe": e.word.writhe(),
            "basepoint": e.basepoint,
            "projection_angle": e.projection_angle,
            "events": e.events,
        }))?,
        Format::Text => e.word.to_string(),
    }))
}

pub fn cmd_homogenize_suite(seed: u64, count: usize, max_strands: usize, max_length: usize) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = (0..count)
        .map(|_| check_homogenization(&random_word(&mut rng, max_strands, max_length)))
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
    let pass = failures.is_empty();
    let text = serde_json::to_string_pretty(&json!({
        "seed": seed,
        "count": count,
        "verdict": if pass { "pass" } else { "fail" },
        "failures": failures,
    }))?;
    Ok(Outcome::verdict(text, pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pfiber").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults() {
        let c = cli(&["library", "hopf"]);
        assert_eq!(c.config.grid, 4096);
        assert_eq!(c.config.margin, 1e-4);
        assert!(c.config.format.is_none());
    }

    #[test]
    fn word_commands() {
        assert_eq!(run(&cli(&["twistbound", "-1", "2"])).unwrap().output, "1 1");
        assert_eq!(run(&cli(&["homogenize", "1", "2"])).unwrap().output, "1 -2 1 3 -2");
    }

    #[test]
    fn config_is_validated() {
        assert!(run(&cli(&["--grid", "10", "library", "hopf"])).is_err());
        assert!(run(&cli(&["--margin", "0", "library", "hopf"])).is_err());
        assert!(run(&cli(&["--format", "csv", "check", "hopf"])).is_err());
    }

    #[test]
    fn library_json_shape() {
        let out = run(&cli(&["library", "figure8"])).unwrap().output;
        let v: Value = serde_json::from_str(&out).unwrap();
        let terms = v["components"][0]["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 4);
        assert!(terms.iter().all(|t| t["freq_den"] == 3));
    }

    #[test]
    fn satellite_rejects_mismatched_companions() {
        let spec = r#"{"pattern":"hopf","companions":["trefoil_neg","hopf"],"eps":0.1,"powers":[1,1]}"#;
        assert!(matches!(
            cmd_satellite(spec, None, &cli(&["library", "hopf"]).config),
            Err(Error::SatelliteMismatch(_))
        ));
    }
}
