//! Run configuration from flags and flat `key=value` files.
//!
//! Every setting has one key, used as `--key value` on the command line and
//! as `key = value` in a config file. Flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Arg, ArgAction};

use crate::error::{CliError, CliResult};

/// Settable keys and their help text.
pub const KEYS: &[(&str, &str)] = &[
    ("grid", "cells on the quadrant of normal angles"),
    ("j", "pancake family index"),
    ("i", "sausage family index"),
    ("alpha", "power of the Gauss curvature"),
    ("t-end", "final time"),
    ("cfl", "CFL factor in (0, 0.5]"),
    ("snapshot-every", "time between report rows"),
    ("stop-inradius", "halt below this inradius"),
    ("speed-cap", "upper bound on the normal speed"),
    ("b", "frying-pan barrier half-width used by verify"),
    ("t", "paperclip time"),
    ("emit-curve", "write paperclip curve samples"),
    ("per-quadrant", "paperclip samples per quadrant"),
    ("translator-grid", "translator step-size divisor"),
    ("out", "output root directory"),
    ("name", "run directory name"),
    ("formats", "comma list of csv, json, svg"),
    ("in", "run directory or report to verify"),
    ("jobs", "concurrent runs in a sweep"),
    ("command", "command swept by `sweep`"),
];

/// Keys a sweep may vary.
pub const SWEEP_KEYS: &[&str] = &["alpha", "b", "grid", "i", "j", "t"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Pancake,
    Sausage,
    Translator,
    Paperclip,
    Glued,
    Verify,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Pancake,
        Command::Sausage,
        Command::Translator,
        Command::Paperclip,
        Command::Glued,
        Command::Verify,
        Command::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Pancake => "pancake",
            Command::Sausage => "sausage",
            Command::Translator => "translator",
            Command::Paperclip => "paperclip",
            Command::Glued => "glued",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Command::Pancake => "evolve a member of the pancake family (alpha = 1)",
            Command::Sausage => "evolve a member of the sausage family (1/2 < alpha < 1)",
            Command::Translator => "solve the translator ODE",
            Command::Paperclip => "evaluate the paperclip closed form",
            Command::Glued => "evolve the glued sausage (alpha > 1) to extinction",
            Command::Verify => "replay a stored run through the check suite",
            Command::Sweep => "fan a command out over a comma list of one key",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub command: Command,
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Merged raw settings, as embedded in artifacts.
    pub settings: BTreeMap<String, String>,
    pub grid: usize,
    pub j: u32,
    pub i: u32,
    pub alpha: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub snapshot_every: Option<f64>,
    pub stop_inradius: f64,
    pub speed_cap: f64,
    pub b: f64,
    pub t: f64,
    pub emit_curve: bool,
    pub per_quadrant: usize,
    pub translator_grid: usize,
    pub out: PathBuf,
    pub name: Option<String>,
    pub formats: Formats,
    pub input: Option<PathBuf>,
    pub jobs: usize,
    pub sweep: Option<SweepSpec>,
}

fn bad(key: &str, value: &str, expected: &str) -> CliError {
    CliError::BadValue { key: key.into(), value: value.into(), expected: expected.into() }
}

fn cli() -> clap::Command {
    let mut root = clap::Command::new("gcflab")
        .about("Rotationally symmetric alpha-Gauss curvature flow laboratory")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in Command::ALL {
        let mut sub = clap::Command::new(c.as_str())
            .about(c.about())
            .arg(Arg::new("config").long("config").value_name("FILE").help("flat key=value file"));
        for (key, help) in KEYS {
            let arg = Arg::new(*key).long(*key).help(*help);
            sub = sub.arg(if *key == "emit-curve" {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.value_name("VALUE").allow_hyphen_values(true)
            });
        }
        root = root.subcommand(sub);
    }
    root
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::UnknownKey(key));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses `args` (program name first). A `--config FILE` is read first and
/// every flag given overrides its value.
pub fn parse_config<I, S>(args: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let matches = cli().try_get_matches_from(args).map_err(from_clap)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = Command::parse(name).expect("subcommands mirror Command");
    let mut settings = match sub.get_one::<String>("config") {
        Some(path) => parse_config_text(&read_file(Path::new(path))?)?,
        None => BTreeMap::new(),
    };
    for (key, _) in KEYS {
        if *key == "emit-curve" {
            if sub.get_flag(key) {
                settings.insert(key.to_string(), "true".into());
            }
        } else if let Some(v) = sub.get_one::<String>(key) {
            settings.insert(key.to_string(), v.clone());
        }
    }
    RunConfig::build(command, settings)
}

fn from_clap(e: clap::Error) -> CliError {
    match e.kind() {
        ErrorKind::UnknownArgument => {
            let arg = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => s.clone(),
                _ => String::new(),
            };
            let key = arg.trim_start_matches('-').split('=').next().unwrap_or("").to_string();
            CliError::UnknownKey(key)
        }
        ErrorKind::DisplayHelp | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::DisplayVersion => {
            CliError::Help(e.render().to_string())
        }
        _ => CliError::Usage(e.render().to_string().trim_end().to_string()),
    }
}

struct Reader<'a> {
    settings: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.settings.get(key).map(String::as_str)
    }

    fn float(&self, key: &str, default: f64, ok: impl Fn(f64) -> bool, expected: &str) -> CliResult<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() && ok(x) => Ok(x),
                _ => Err(bad(key, v, expected)),
            },
        }
    }

    fn opt_float(&self, key: &str, ok: impl Fn(f64) -> bool, expected: &str) -> CliResult<Option<f64>> {
        self.raw(key).map(|_| self.float(key, 0.0, ok, expected)).transpose()
    }

    fn int(&self, key: &str, default: u64, min: u64) -> CliResult<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => match v.parse::<u64>() {
                Ok(x) if x >= min && x <= u32::MAX as u64 => Ok(x),
                _ => Err(bad(key, v, &format!("an integer >= {min}"))),
            },
        }
    }

    fn flag(&self, key: &str) -> CliResult<bool> {
        match self.raw(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(bad(key, v, "true or false")),
        }
    }
}

impl RunConfig {
    /// Validates merged settings for `command`.
    pub fn build(command: Command, settings: BTreeMap<String, String>) -> CliResult<RunConfig> {
        let sweep = if command == Command::Sweep { Some(sweep_spec(&settings)?) } else { None };
        if let Some(spec) = &sweep {
            for v in &spec.values {
                let mut child = settings.clone();
                child.remove("command");
                child.insert(spec.key.clone(), v.clone());
                RunConfig::build(spec.command, child)?;
            }
        }
        // A sweep parent carries the numeric fields of its first run.
        let target = sweep.as_ref().map_or(command, |s| s.command);
        let first = sweep.as_ref().map(|s| {
            let mut m = settings.clone();
            m.insert(s.key.clone(), s.values[0].clone());
            m
        });
        let r = Reader { settings: first.as_ref().unwrap_or(&settings) };
        let j = r.int("j", 5, 1)? as u32;
        let i = r.int("i", 4, 1)? as u32;
        let alpha = read_alpha(&r, target)?;
        let t_end = read_t_end(&r, target, j)?;
        let formats = read_formats(r.raw("formats"))?;
        let config = RunConfig {
            command,
            grid: r.int("grid", 512, gcflab::convex::MIN_CELLS as u64)? as usize,
            j,
            i,
            alpha,
            t_end,
            cfl: r.float("cfl", 0.2, |x| x > 0.0 && x <= 0.5, "a number in (0, 0.5]")?,
            snapshot_every: r.opt_float("snapshot-every", |x| x > 0.0, "a positive number")?,
            stop_inradius: r.float("stop-inradius", 1e-3, |x| x > 0.0, "a positive number")?,
            speed_cap: r.float("speed-cap", gcflab::flow::DEFAULT_SPEED_CAP, |x| x > 0.0, "a positive number")?,
            b: r.float("b", 1.0, |x| x > 0.0 && x <= 4.0, "a number in (0, 4]")?,
            t: r.float("t", -3.0, |x| x < 0.0, "a negative number")?,
            emit_curve: r.flag("emit-curve")?,
            per_quadrant: r.int("per-quadrant", 400, 2)? as usize,
            translator_grid: r.int("translator-grid", 4096, 64)? as usize,
            out: PathBuf::from(r.raw("out").unwrap_or("runs")),
            name: r.raw("name").map(str::to_string),
            formats,
            input: r.raw("in").map(PathBuf::from),
            jobs: r.int("jobs", 1, 1)? as usize,
            sweep,
            settings,
        };
        if command == Command::Verify && config.input.is_none() {
            return Err(CliError::Usage("verify needs --in <run directory>".into()));
        }
        Ok(config)
    }

    /// Default run directory name.
    pub fn run_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match self.command {
            Command::Pancake => format!("pancake_j{}", self.j),
            Command::Sausage => format!("sausage_i{}_alpha{}", self.i, self.alpha),
            Command::Translator => format!("translator_alpha{}", self.alpha),
            Command::Paperclip => format!("paperclip_t{}", self.t),
            Command::Glued => format!("glued_alpha{}", self.alpha),
            Command::Verify => "verify".into(),
            Command::Sweep => {
                let s = self.sweep.as_ref().expect("sweep spec");
                format!("sweep_{}_{}", s.command.as_str(), s.key)
            }
        }
    }
}

fn read_alpha(r: &Reader, command: Command) -> CliResult<f64> {
    match command {
        Command::Pancake => r.float("alpha", 1.0, |x| x == 1.0, "1 (the pancake family has alpha = 1)"),
        Command::Sausage => r.float("alpha", 0.75, |x| x > 0.5 && x < 1.0, "a number in (1/2, 1)"),
        Command::Glued => r.float("alpha", 2.0, |x| x > 1.0, "a number above 1"),
        _ => r.float("alpha", 2.0, |x| x > 0.5, "a number above 1/2"),
    }
}

fn read_t_end(r: &Reader, command: Command, j: u32) -> CliResult<f64> {
    match command {
        Command::Pancake => {
            let start = -(j as f64);
            r.float("t-end", -0.5, |x| x > start && x < 0.0, &format!("a number in ({start}, 0)"))
        }
        Command::Sausage => r.float("t-end", 0.5, |x| x > 0.0, "a positive number"),
        Command::Glued => r.float("t-end", 5.0, |x| x > -1.0, "a number above -1"),
        _ => r.float("t-end", 0.0, |_| true, "a number"),
    }
}

fn read_formats(raw: Option<&str>) -> CliResult<Formats> {
    let Some(raw) = raw else {
        return Ok(Formats { csv: true, json: true, svg: false });
    };
    let mut f = Formats { csv: false, json: false, svg: false };
    for part in raw.split(',').map(str::trim) {
        match part {
            "csv" => f.csv = true,
            "json" => f.json = true,
            "svg" => f.svg = true,
            _ => return Err(bad("formats", raw, "a comma list of csv, json, svg")),
        }
    }
    Ok(f)
}

fn sweep_spec(settings: &BTreeMap<String, String>) -> CliResult<SweepSpec> {
    let target = settings.get("command").ok_or_else(|| CliError::Usage("sweep needs --command".into()))?;
    let command = match Command::parse(target) {
        Some(c) if !matches!(c, Command::Verify | Command::Sweep) => c,
        _ => return Err(bad("command", target, "one of pancake, sausage, translator, paperclip, glued")),
    };
    let lists: Vec<&String> =
        settings.iter().filter(|(k, v)| *k != "formats" && v.contains(',')).map(|(k, _)| k).collect();
    let key = match lists.as_slice() {
        [k] if SWEEP_KEYS.contains(&k.as_str()) => (*k).clone(),
        [k] => return Err(bad(k, &settings[*k], "a single value (only alpha, b, grid, i, j, t may be swept)")),
        [] => return Err(CliError::Usage("sweep needs one comma list, e.g. --alpha 0.75,1,2".into())),
        _ => return Err(CliError::Usage("sweep varies exactly one key".into())),
    };
    let values = settings[&key].split(',').map(|v| v.trim().to_string()).collect();
    Ok(SweepSpec { command, key, values })
}
